//! The classical special case: a permutation-matrix neuron on basis states
//! reproduces the Heaviside neuron's truth table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Network, NetworkBuilder};
use crate::state::DensityMatrix;
use crate::unitary::ParamUnitary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSet {
    pub weights: Vec<f64>,
    pub threshold: f64,
}

impl WeightSet {
    pub fn new(weights: Vec<f64>, threshold: f64) -> Self {
        Self { weights, threshold }
    }

    pub fn or() -> Self {
        Self::new(vec![1.0, 1.0], 0.5)
    }

    pub fn and() -> Self {
        Self::new(vec![1.0, 1.0], 1.5)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRow {
    pub inputs: Vec<bool>,
    pub classical: bool,
    /// `None` when the quantum output was not an exact basis state.
    pub quantum: Option<bool>,
}

impl TruthRow {
    pub fn matches(&self) -> bool {
        self.quantum == Some(self.classical)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSetReport {
    pub weights: WeightSet,
    pub rows: Vec<TruthRow>,
}

impl WeightSetReport {
    /// Indices of rows where the two truth tables disagree.
    pub fn mismatches(&self) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&i| !self.rows[i].matches())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub sets: Vec<WeightSetReport>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.sets.iter().all(|s| s.mismatches().is_empty())
    }

    /// Human-readable description of every failing row.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for s in &self.sets {
            for i in s.mismatches() {
                let r = &s.rows[i];
                out.push(format!(
                    "weights {:?} threshold {}: inputs {:?} classical {} quantum {:?}",
                    s.weights.weights, s.weights.threshold, r.inputs, r.classical, r.quantum
                ));
            }
        }
        out
    }
}

/// Inputs on wires 0..n, the dummy on wire n, which is also the output.
pub fn classical_neuron_network(set: &WeightSet) -> Result<Network> {
    let n = set.weights.len();
    let wires: Vec<usize> = (0..=n).collect();
    NetworkBuilder::new(n + 1)
        .inputs(&wires[..n])
        .outputs(&[n])
        .gate(
            ParamUnitary::classical(set.weights.clone(), set.threshold)?,
            &wires,
            0,
        )
        .build()
}

fn bits_of(index: usize, n: usize) -> Vec<bool> {
    (0..n).map(|k| (index >> (n - 1 - k)) & 1 == 1).collect()
}

/// The neuron evaluated directly: `Σ w·x − t > 0`.
fn classical_fires(set: &WeightSet, inputs: &[bool]) -> bool {
    let mut z = -set.threshold;
    for (w, &x) in set.weights.iter().zip(inputs) {
        if x {
            z += w;
        }
    }
    z > 0.0
}

/// Compares the two truth tables of every weight set over all 2ⁿ basis inputs.
/// The quantum output must be exactly |0⟩⟨0| or |1⟩⟨1|; anything else counts as a mismatch.
pub fn classical_equivalence_check(sets: &[WeightSet]) -> Result<EquivalenceReport> {
    let mut reports = Vec::with_capacity(sets.len());
    for set in sets {
        let n = set.weights.len();
        if n == 0 {
            return Err(Error::Config("weight set is empty".into()));
        }
        let net = classical_neuron_network(set)?;
        let rows = (0..1usize << n)
            .map(|index| {
                let inputs = bits_of(index, n);
                let out = net.output_state(&DensityMatrix::basis(n, index)?)?;
                let m = out.matrix();
                let quantum = if m[(0, 1)].norm() != 0.0 || m[(1, 0)].norm() != 0.0 {
                    None
                } else if m[(1, 1)].re == 1.0 && m[(0, 0)].norm() == 0.0 {
                    Some(true)
                } else if m[(0, 0)].re == 1.0 && m[(1, 1)].norm() == 0.0 {
                    Some(false)
                } else {
                    None
                };
                Ok(TruthRow {
                    classical: classical_fires(set, &inputs),
                    inputs,
                    quantum,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        reports.push(WeightSetReport {
            weights: set.clone(),
            rows,
        });
    }
    Ok(EquivalenceReport { sets: reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Element;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn or_and_and_tables() {
        let report = classical_equivalence_check(&[WeightSet::or(), WeightSet::and()]).unwrap();
        assert!(report.passed(), "{:?}", report.failures());
        let or: Vec<bool> = report.sets[0].rows.iter().map(|r| r.classical).collect();
        let and: Vec<bool> = report.sets[1].rows.iter().map(|r| r.classical).collect();
        assert_eq!(or, vec![false, true, true, true]);
        assert_eq!(and, vec![false, false, false, true]);
    }

    #[test]
    fn random_weight_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sets: Vec<WeightSet> = (0..100)
            .map(|_| {
                WeightSet::new(
                    vec![rng.random_range(-2.0..=2.0), rng.random_range(-2.0..=2.0)],
                    0.5,
                )
            })
            .collect();
        assert!(classical_equivalence_check(&sets).unwrap().passed());
    }

    #[test]
    fn mismatch_names_the_row() {
        let report = EquivalenceReport {
            sets: vec![WeightSetReport {
                weights: WeightSet::or(),
                rows: vec![TruthRow {
                    inputs: vec![true, false],
                    classical: true,
                    quantum: Some(false),
                }],
            }],
        };
        assert!(!report.passed());
        assert!(report.failures()[0].contains("[true, false]"));
    }

    /// Pushes a probability vector through a circuit of threshold neurons by
    /// moving mass between bit strings, independently of any matrix code.
    fn classical_simulate(
        num_wires: usize,
        gates: &[(Vec<usize>, WeightSet)],
        probs: &[f64],
    ) -> Vec<f64> {
        let mut p = probs.to_vec();
        for (wires, set) in gates {
            let mut next = vec![0.0; p.len()];
            for (state, &mass) in p.iter().enumerate() {
                let bit = |w: usize| (state >> (num_wires - 1 - w)) & 1 == 1;
                let inputs: Vec<bool> = wires[..wires.len() - 1].iter().map(|&w| bit(w)).collect();
                let target = wires[wires.len() - 1];
                let flip = if classical_fires(set, &inputs) {
                    1 << (num_wires - 1 - target)
                } else {
                    0
                };
                next[state ^ flip] += mass;
            }
            p = next;
        }
        p
    }

    #[test]
    fn layered_classical_network_matches_reversible_simulation() {
        // Wires 0, 1 inputs; 2 = OR(0, 1); 3 = AND(0, 1); 4 fires on (2 and not 3), i.e. XOR.
        let gates = vec![
            (vec![0, 1, 2], WeightSet::or()),
            (vec![0, 1, 3], WeightSet::and()),
            (vec![2, 3, 4], WeightSet::new(vec![1.0, -1.0], 0.5)),
        ];
        let mut b = NetworkBuilder::new(5)
            .inputs(&[0, 1])
            .outputs(&[0, 1, 2, 3, 4]);
        for (wires, set) in &gates {
            b = b.gate(
                ParamUnitary::classical(set.weights.clone(), set.threshold).unwrap(),
                wires,
                0,
            );
        }
        let net = b.build().unwrap();
        assert!(net.elements().iter().all(|e| matches!(e, Element::Gate(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let input: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let out = net
                .output_state(&DensityMatrix::diagonal(&input).unwrap())
                .unwrap();
            // Extend the input distribution with dummies at 0: index = in << 3.
            let mut full = vec![0.0; 32];
            for (k, &p) in input.iter().enumerate() {
                full[k << 3] = p;
            }
            let expected = classical_simulate(5, &gates, &full);
            for (r, &want) in expected.iter().enumerate() {
                for c in 0..32 {
                    let v = out.matrix()[(r, c)];
                    if r == c {
                        assert_eq!(v.re, want);
                        assert_eq!(v.im, 0.0);
                    } else {
                        assert_eq!(v.norm(), 0.0);
                    }
                }
            }
        }
    }
}
