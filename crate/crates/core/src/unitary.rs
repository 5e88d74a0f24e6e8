//! Parametrized unitary families used as quantum neurons.
//!
//! Parameter layouts (the order `params` is stored and flattened in):
//!
//! * `GeneralN { qubits: N }`: 4^N coefficients α of `exp(i Σ α_P P)`, indexed by the
//!   Pauli string with the first qubit most significant (`α_{j₁…j_N}` at `Σ j_k 4^(N-k)`).
//! * `SingleQubit`: `(α₀, α₁, α₂, α₃)` of the closed form
//!   `e^{iα₀}(cos Ω 𝟙 + i sin Ω/Ω Σ α_j σ_j)`, `Ω = |(α₁, α₂, α₃)|`.
//! * `Neuron2` / `Neuron3`: the 4^m parameters of the control-basis unitary `V`
//!   (a `GeneralN` on m = 1 or 2 qubits) followed by 2^m blocks of four
//!   single-qubit parameters, one per `T_j`. The target is the last wire.
//! * `TwoParam`: `(θ, φ)`.
//! * `FanOut2`: same layout as `GeneralN { qubits: 2 }`.
//! * `ClassicalPermutation`: no trainable parameters.

use std::f64::consts::FRAC_PI_4;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{exp_hermitian, ComplexMatrix, C64, I, ONE, ZERO};
use crate::pauli::{pauli, PauliString};

/// Largest register a `GeneralN` gate may act on; its parameter count grows as 4^N.
pub const MAX_GENERAL_QUBITS: usize = 3;

const OMEGA_SERIES_BELOW: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    GeneralN {
        qubits: usize,
    },
    /// One control qubit plus a target.
    Neuron2,
    /// Two control qubits plus a target.
    Neuron3,
    SingleQubit,
    TwoParam,
    FanOut2,
    ClassicalPermutation {
        weights: Vec<f64>,
        threshold: f64,
    },
}

impl Family {
    /// Number of qubits the gate acts on.
    pub fn arity(&self) -> usize {
        match self {
            Family::GeneralN { qubits } => *qubits,
            Family::Neuron2 => 2,
            Family::Neuron3 => 3,
            Family::SingleQubit => 1,
            Family::TwoParam | Family::FanOut2 => 2,
            Family::ClassicalPermutation { weights, .. } => weights.len() + 1,
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            Family::GeneralN { qubits } => 4usize.pow(*qubits as u32),
            Family::Neuron2 => 4 + 2 * 4,
            Family::Neuron3 => 16 + 4 * 4,
            Family::SingleQubit => 4,
            Family::TwoParam => 2,
            Family::FanOut2 => 16,
            Family::ClassicalPermutation { .. } => 0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Family::GeneralN { qubits } if *qubits == 0 || *qubits > MAX_GENERAL_QUBITS => {
                Err(Error::Config(format!(
                    "general unitaries support 1..={MAX_GENERAL_QUBITS} qubits, got {qubits}"
                )))
            }
            Family::ClassicalPermutation { weights, threshold } => {
                if weights.is_empty() {
                    return Err(Error::Config(
                        "classical neuron needs at least one input".into(),
                    ));
                }
                if weights.len() + 1 > crate::state::MAX_QUBITS {
                    return Err(Error::Config(format!(
                        "{} classical inputs is too many",
                        weights.len()
                    )));
                }
                if !threshold.is_finite() || weights.iter().any(|w| !w.is_finite()) {
                    return Err(Error::Config(
                        "classical neuron weights must be finite".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// A unitary family together with its parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParamUnitary")]
pub struct ParamUnitary {
    #[serde(flatten)]
    family: Family,
    params: Vec<f64>,
}

#[derive(Deserialize)]
struct RawParamUnitary {
    #[serde(flatten)]
    family: Family,
    params: Vec<f64>,
}

impl TryFrom<RawParamUnitary> for ParamUnitary {
    type Error = Error;

    fn try_from(raw: RawParamUnitary) -> Result<Self> {
        Self::new(raw.family, raw.params)
    }
}

impl ParamUnitary {
    pub fn new(family: Family, params: Vec<f64>) -> Result<Self> {
        family.validate()?;
        let expected = family.param_count();
        if params.len() != expected {
            return Err(Error::ParamCount {
                expected,
                actual: params.len(),
            });
        }
        Ok(Self { family, params })
    }

    /// All parameters zero.
    pub fn zeroed(family: Family) -> Result<Self> {
        let n = family.param_count();
        Self::new(family, vec![0.0; n])
    }

    pub fn classical(weights: Vec<f64>, threshold: f64) -> Result<Self> {
        Self::new(
            Family::ClassicalPermutation { weights, threshold },
            Vec::new(),
        )
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn arity(&self) -> usize {
        self.family.arity()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn with_params(&self, params: Vec<f64>) -> Result<Self> {
        Self::new(self.family.clone(), params)
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let p = &self.params;
        match &self.family {
            Family::GeneralN { qubits } => build_general(p, *qubits),
            Family::FanOut2 => build_general(p, 2),
            Family::SingleQubit => Ok(build_single_qubit([p[0], p[1], p[2], p[3]])),
            Family::Neuron2 => build_neuron(1, &p[..4], &p[4..]),
            Family::Neuron3 => build_neuron(2, &p[..16], &p[16..]),
            Family::TwoParam => Ok(build_two_param(p[0], p[1])),
            Family::ClassicalPermutation { weights, threshold } => {
                Ok(build_classical_permutation(weights, *threshold))
            }
        }
    }
}

fn pauli_basis(n: usize) -> &'static [PauliString] {
    static CACHE: [OnceLock<Vec<PauliString>>; MAX_GENERAL_QUBITS + 1] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    CACHE[n].get_or_init(|| PauliString::all(n))
}

/// Hermitian generator Σ α_P P over all N-qubit Pauli strings.
pub fn general_generator(alpha: &[f64], n: usize) -> Result<ComplexMatrix> {
    if n == 0 || n > MAX_GENERAL_QUBITS {
        return Err(Error::Config(format!(
            "general unitaries support 1..={MAX_GENERAL_QUBITS} qubits, got {n}"
        )));
    }
    let expected = 4usize.pow(n as u32);
    if alpha.len() != expected {
        return Err(Error::ParamCount {
            expected,
            actual: alpha.len(),
        });
    }
    let dim = 1usize << n;
    let mut h = ComplexMatrix::zeros(dim, dim);
    for (p, &a) in pauli_basis(n).iter().zip(alpha) {
        if a == 0.0 {
            continue;
        }
        for row in 0..dim {
            let (col, v) = p.row_entry(row);
            h[(row, col)] += v * a;
        }
    }
    Ok(h)
}

/// `exp(i Σ α_{j₁…j_N} σ_{j₁} ⊗ … ⊗ σ_{j_N})`.
pub fn build_general(alpha: &[f64], n: usize) -> Result<ComplexMatrix> {
    exp_hermitian(&general_generator(alpha, n)?)
}

/// Closed-form single-qubit unitary `e^{iα₀}(cos Ω 𝟙 + i (sin Ω / Ω) Σ α_j σ_j)`.
pub fn build_single_qubit(alpha: [f64; 4]) -> ComplexMatrix {
    let [a0, a1, a2, a3] = alpha;
    let omega = (a1 * a1 + a2 * a2 + a3 * a3).sqrt();
    // sin Ω / Ω has a removable singularity at 0.
    let sinc = if omega < OMEGA_SERIES_BELOW {
        1.0 - omega * omega / 6.0
    } else {
        omega.sin() / omega
    };
    let c = C64::new(omega.cos(), 0.0);
    let s = I * sinc;
    // cos Ω 𝟙 + i sinc (a1 X + a2 Y + a3 Z)
    let m00 = c + s * a3;
    let m11 = c - s * a3;
    let m01 = s * C64::new(a1, -a2);
    let m10 = s * C64::new(a1, a2);
    let phase = C64::from_polar(1.0, a0);
    ComplexMatrix::from_rows(&[[phase * m00, phase * m01], [phase * m10, phase * m11]])
}

/// `Σ_j |τ_j⟩⟨τ_j| ⊗ T_j` with `|τ_j⟩ = V|j⟩` on `controls` qubits and the target last.
pub fn build_neuron(controls: usize, v_params: &[f64], t_params: &[f64]) -> Result<ComplexMatrix> {
    if !(1..=2).contains(&controls) {
        return Err(Error::Config(format!(
            "neurons take 1 or 2 controls, got {controls}"
        )));
    }
    let blocks = 1usize << controls;
    if t_params.len() != 4 * blocks {
        return Err(Error::ParamCount {
            expected: 4 * blocks,
            actual: t_params.len(),
        });
    }
    let v = build_general(v_params, controls)?;
    let targets: Vec<ComplexMatrix> = t_params
        .chunks_exact(4)
        .map(|c| build_single_qubit([c[0], c[1], c[2], c[3]]))
        .collect();
    let dim = 2 * blocks;
    let mut u = ComplexMatrix::zeros(dim, dim);
    for a in 0..blocks {
        for b in 0..blocks {
            for (j, t) in targets.iter().enumerate() {
                let w = v[(a, j)] * v[(b, j)].conj();
                if w == ZERO {
                    continue;
                }
                for s in 0..2 {
                    for r in 0..2 {
                        u[(2 * a + s, 2 * b + r)] += w * t[(s, r)];
                    }
                }
            }
        }
    }
    Ok(u)
}

/// `|τ⟩⟨τ| ⊗ 𝟙 + |τ⊥⟩⟨τ⊥| ⊗ σ₁` with `|τ⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`
/// and `|τ⊥⟩ = sin(θ/2)|0⟩ − e^{iφ} cos(θ/2)|1⟩`.
pub fn build_two_param(theta: f64, phi: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    let e = C64::from_polar(1.0, phi);
    let tau = [C64::new(c, 0.0), e * s];
    let perp = [C64::new(s, 0.0), -e * c];
    let p = ComplexMatrix::outer(&tau, &tau);
    let q = ComplexMatrix::outer(&perp, &perp);
    crate::linalg::tensor(&p, &ComplexMatrix::identity(2))
        .add(&crate::linalg::tensor(&q, &pauli(1)))
}

/// Heaviside neuron: fires when `Σ w_k in_k > threshold` (strict).
pub fn heaviside_fires(weights: &[f64], threshold: f64, inputs: &[bool]) -> bool {
    let z: f64 = weights
        .iter()
        .zip(inputs)
        .map(|(&w, &b)| if b { w } else { 0.0 })
        .sum();
    z > threshold
}

/// Reversible permutation `|in, d⟩ → |in, d ⊕ H(Σ w·in − threshold)⟩` on n + 1 bits,
/// input bits first (first input most significant) and the dummy bit last.
pub fn build_classical_permutation(weights: &[f64], threshold: f64) -> ComplexMatrix {
    let n = weights.len();
    let dim = 1usize << (n + 1);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let bits: Vec<bool> = (0..n).map(|k| (col >> (n - k)) & 1 == 1).collect();
        let fire = heaviside_fires(weights, threshold, &bits) as usize;
        m[(col ^ fire, col)] = ONE;
    }
    m
}

/// Parameters for a `FanOut2`/`GeneralN(2)` gate equal to CNOT.
///
/// CNOT = exp(iπ |1⟩⟨1| ⊗ |−⟩⟨−|) = exp(i (π/4)(𝟙 − σ₃) ⊗ (𝟙 − σ₁)).
pub fn fan_out_cnot_params() -> Vec<f64> {
    let mut alpha = vec![0.0; 16];
    alpha[0] = FRAC_PI_4; // σ₀σ₀
    alpha[1] = -FRAC_PI_4; // σ₀σ₁
    alpha[12] = -FRAC_PI_4; // σ₃σ₀
    alpha[13] = FRAC_PI_4; // σ₃σ₁
    alpha
}

/// Recovers `GeneralN` coefficients from a Hermitian generator: `α_P = Tr(H P) / 2^N`.
pub fn general_params_from_generator(h: &ComplexMatrix, n: usize) -> Result<Vec<f64>> {
    let dim = 1usize << n;
    if h.rows() != dim || h.cols() != dim {
        return Err(Error::Dimension(format!(
            "{}x{} generator for {n} qubits",
            h.rows(),
            h.cols()
        )));
    }
    Ok(pauli_basis(n)
        .iter()
        .map(|p| {
            let mut acc = ZERO;
            for row in 0..dim {
                let (col, v) = p.row_entry(row);
                // Tr(H P) = Σ_row (P H)_{row,row} = Σ_row P[row][col] H[col][row]
                acc += v * h[(col, row)];
            }
            acc.re / dim as f64
        })
        .collect())
}
