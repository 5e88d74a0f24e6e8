//! Pauli-expectation cost functions.
//!
//! `C = Σ f · (⟨P⟩_actual − ⟨P⟩_desired)²` summed over [`CostTerm`]s.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Observed;
use crate::pauli::PauliString;
use crate::state::DensityMatrix;

/// Which state a term is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Site {
    /// The joint state of the network's output wires.
    Output,
    /// The state captured by probe `k` of the task.
    Probe(usize),
}

/// The desired expectation of a term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Value(f64),
    /// Expectation of the same Pauli string on the reference (usually the input) state.
    Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTerm {
    pub site: Site,
    pub pauli: PauliString,
    pub target: Target,
    pub weight: f64,
}

impl CostTerm {
    pub fn output(pauli: PauliString, target: Target) -> Self {
        Self {
            site: Site::Output,
            pauli,
            target,
            weight: 1.0,
        }
    }
}

/// A non-empty weighted list of cost terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<CostTerm>", into = "Vec<CostTerm>")]
pub struct CostSpec {
    terms: Vec<CostTerm>,
}

impl TryFrom<Vec<CostTerm>> for CostSpec {
    type Error = Error;

    fn try_from(terms: Vec<CostTerm>) -> Result<Self> {
        Self::new(terms)
    }
}

impl From<CostSpec> for Vec<CostTerm> {
    fn from(c: CostSpec) -> Self {
        c.terms
    }
}

impl CostSpec {
    pub fn new(terms: Vec<CostTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Config("cost needs at least one term".into()));
        }
        for t in &terms {
            if !(t.weight >= 0.0 && t.weight.is_finite()) {
                return Err(Error::Config(format!(
                    "cost weight {} must be finite and non-negative",
                    t.weight
                )));
            }
            if let Target::Value(v) = t.target {
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::Config(format!(
                        "desired expectation {v} is outside [-1, 1]"
                    )));
                }
            }
        }
        Ok(Self { terms })
    }

    /// Every Pauli string on `n` output qubits, each matched to the reference state.
    pub fn match_all_paulis(n: usize) -> Self {
        let terms = PauliString::all(n)
            .into_iter()
            .map(|p| CostTerm::output(p, Target::Reference))
            .collect();
        Self::new(terms).expect("4^n > 0 terms")
    }

    /// Local σ₁, σ₂, σ₃ on each of `n` output wires, matched to the reference state.
    pub fn match_local_paulis(n: usize) -> Self {
        let terms = (0..n)
            .flat_map(|wire| (1..=3).map(move |j| PauliString::local(n, wire, j)))
            .map(|p| CostTerm::output(p, Target::Reference))
            .collect();
        Self::new(terms).expect("n > 0")
    }

    pub fn terms(&self) -> &[CostTerm] {
        &self.terms
    }

    pub fn push(&mut self, term: CostTerm) -> Result<()> {
        let mut terms = std::mem::take(&mut self.terms);
        terms.push(term);
        *self = Self::new(terms)?;
        Ok(())
    }

    /// Highest probe index referenced, if any.
    pub fn max_probe(&self) -> Option<usize> {
        self.terms
            .iter()
            .filter_map(|t| match t.site {
                Site::Probe(k) => Some(k),
                Site::Output => None,
            })
            .max()
    }
}

/// Weighted squared expectation gaps over the observed states.
pub fn eval_cost(
    spec: &CostSpec,
    observed: &Observed,
    reference: Option<&DensityMatrix>,
) -> Result<f64> {
    let mut total = 0.0;
    for term in &spec.terms {
        if term.weight == 0.0 {
            continue;
        }
        let state = match term.site {
            Site::Output => &observed.output,
            Site::Probe(k) => observed
                .probes
                .get(k)
                .ok_or_else(|| Error::Config(format!("cost term refers to missing probe {k}")))?,
        };
        let actual = state.expectation(&term.pauli)?;
        let desired = match term.target {
            Target::Value(v) => v,
            Target::Reference => reference
                .ok_or_else(|| Error::Config("cost term needs a reference state".into()))?
                .expectation(&term.pauli)?,
        };
        let gap = actual - desired;
        total += term.weight * gap * gap;
    }
    Ok(total)
}

/// [`eval_cost`] for specs that only refer to the output state.
pub fn eval_output_cost(
    spec: &CostSpec,
    actual: &DensityMatrix,
    reference: Option<&DensityMatrix>,
) -> Result<f64> {
    let observed = Observed {
        output: actual.clone(),
        probes: Vec::new(),
    };
    eval_cost(spec, &observed, reference)
}

/// Classical quadratic cost `½ |y − a|²`.
pub fn classical_cost(desired: &[f64], actual: &[f64]) -> f64 {
    0.5 * desired
        .iter()
        .zip(actual)
        .map(|(y, a)| (y - a) * (y - a))
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, ZERO};

    fn bell(sign: f64) -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::from_pure(&[C64::new(h, 0.0), ZERO, ZERO, C64::new(sign * h, 0.0)]).unwrap()
    }

    #[test]
    fn perfect_match_costs_nothing() {
        let spec = CostSpec::match_all_paulis(2);
        let s = bell(1.0);
        assert!(eval_output_cost(&spec, &s, Some(&s)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn maximal_single_term_gap() {
        let spec = CostSpec::new(vec![CostTerm::output(
            PauliString::single(3),
            Target::Value(1.0),
        )])
        .unwrap();
        let one = DensityMatrix::basis(1, 1).unwrap();
        assert_eq!(eval_output_cost(&spec, &one, None).unwrap(), 4.0);
    }

    #[test]
    fn bell_states_differ_by_eight() {
        // ⟨XX⟩: +1 vs −1, ⟨YY⟩: −1 vs +1, everything else agrees.
        let mut table = Vec::new();
        for p in PauliString::all(2) {
            let a = bell(1.0).expectation(&p).unwrap();
            let b = bell(-1.0).expectation(&p).unwrap();
            table.push((a - b).powi(2));
        }
        let oracle: f64 = table.iter().sum();
        assert!((oracle - 8.0).abs() < 1e-12);
        let spec = CostSpec::match_all_paulis(2);
        let c = eval_output_cost(&spec, &bell(1.0), Some(&bell(-1.0))).unwrap();
        assert!((c - 8.0).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(CostSpec::new(vec![]).is_err());
        let bad_target = CostTerm::output(PauliString::single(1), Target::Value(1.5));
        assert!(CostSpec::new(vec![bad_target]).is_err());
        let mut neg = CostTerm::output(PauliString::single(1), Target::Value(0.0));
        neg.weight = -1.0;
        assert!(CostSpec::new(vec![neg]).is_err());
    }

    #[test]
    fn missing_reference_or_probe_is_an_error() {
        let spec = CostSpec::match_all_paulis(1);
        assert!(eval_output_cost(&spec, &DensityMatrix::zero(1), None).is_err());
        let probe_term = CostTerm {
            site: Site::Probe(0),
            pauli: PauliString::single(1),
            target: Target::Value(0.0),
            weight: 1.0,
        };
        let spec = CostSpec::new(vec![probe_term]).unwrap();
        assert_eq!(spec.max_probe(), Some(0));
        assert!(eval_output_cost(&spec, &DensityMatrix::zero(1), None).is_err());
    }

    #[test]
    fn local_pauli_terms_compare_marginals() {
        let desired = DensityMatrix::basis(2, 0b01).unwrap();
        let spec = CostSpec::match_local_paulis(2);
        assert_eq!(spec.terms().len(), 6);
        assert!(eval_output_cost(&spec, &desired, Some(&desired)).unwrap() < 1e-15);
        let other = DensityMatrix::basis(2, 0b00).unwrap();
        assert!((eval_output_cost(&spec, &other, Some(&desired)).unwrap() - 4.0).abs() < 1e-15);
        // Local terms cannot see correlations: Φ⁺ and the classical mixture look alike.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi =
            DensityMatrix::from_pure(&[C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)]).unwrap();
        let mix = DensityMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(eval_output_cost(&spec, &phi, Some(&mix)).unwrap() < 1e-15);
    }

    #[test]
    fn sigma_z_cost_is_eight_times_classical_cost_on_diagonal_states() {
        // Two output bits; marginal a_j = P(bit j = 1) and ⟨σ₃⟩_j = 1 − 2 a_j.
        let spec = CostSpec::new(
            (0..2)
                .map(|w| CostTerm::output(PauliString::local(2, w, 3), Target::Reference))
                .collect(),
        )
        .unwrap();
        let marginals = |p: &[f64; 4]| [p[2] + p[3], p[1] + p[3]];
        let mut states: Vec<[f64; 4]> = (0..4)
            .map(|k| {
                let mut p = [0.0; 4];
                p[k] = 1.0;
                p
            })
            .collect();
        states.push([0.1, 0.2, 0.3, 0.4]);
        states.push([0.5, 0.0, 0.25, 0.25]);
        for actual in &states {
            for desired in &states {
                let rho = DensityMatrix::diagonal(actual).unwrap();
                let sigma = DensityMatrix::diagonal(desired).unwrap();
                let quantum = eval_output_cost(&spec, &rho, Some(&sigma)).unwrap();
                let classical = classical_cost(&marginals(desired), &marginals(actual));
                assert!((quantum - 8.0 * classical).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spec_serializes_as_term_list() {
        let spec = CostSpec::match_all_paulis(1);
        let text = serde_json::to_string(&spec).unwrap();
        let back: CostSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<CostSpec>("[]").is_err());
    }
}
