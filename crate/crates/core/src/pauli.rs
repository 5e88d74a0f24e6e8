use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{tensor_all, ComplexMatrix, C64, I, ONE, ZERO};

/// σ₀ (identity), σ₁ (X), σ₂ (Y) or σ₃ (Z).
pub fn pauli(index: u8) -> ComplexMatrix {
    match index {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_rows(&[[ZERO, ONE], [ONE, ZERO]]),
        2 => ComplexMatrix::from_rows(&[[ZERO, -I], [I, ZERO]]),
        3 => ComplexMatrix::from_rows(&[[ONE, ZERO], [ZERO, -ONE]]),
        _ => panic!("Pauli index {index} out of range"),
    }
}

/// Tensor product σ_{j₁} ⊗ … ⊗ σ_{j_N}, one index per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct PauliString(Vec<u8>);

impl PauliString {
    pub fn new(indices: Vec<u8>) -> Result<Self> {
        if let Some(bad) = indices.iter().find(|&&j| j > 3) {
            return Err(Error::Pauli(format!("index {bad} is not in 0..=3")));
        }
        Ok(Self(indices))
    }

    /// A single σ_j on one qubit.
    pub fn single(index: u8) -> Self {
        Self::new(vec![index]).expect("valid Pauli index")
    }

    /// σ_j on `wire` and identity on the other `n - 1` qubits.
    pub fn local(n: usize, wire: usize, index: u8) -> Self {
        assert!(wire < n);
        let mut v = vec![0; n];
        v[wire] = index;
        Self::new(v).expect("valid Pauli index")
    }

    /// All 4^n strings in lexicographic order (first qubit most significant).
    pub fn all(n: usize) -> Vec<Self> {
        (0..4usize.pow(n as u32))
            .map(|mut code| {
                let mut v = vec![0u8; n];
                for slot in v.iter_mut().rev() {
                    *slot = (code % 4) as u8;
                    code /= 4;
                }
                Self(v)
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[u8] {
        &self.0
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let factors: Vec<ComplexMatrix> = self.0.iter().map(|&j| pauli(j)).collect();
        tensor_all(&factors)
    }

    /// Row `r` of the string's matrix has a single non-zero entry; returns its column and value.
    ///
    /// X and Y flip their qubit's bit, Y and Z contribute a phase. Used to evaluate
    /// `Tr(ρ P)` in O(4^n) instead of a dense product.
    pub(crate) fn row_entry(&self, row: usize) -> (usize, C64) {
        let n = self.0.len();
        let mut col = row;
        let mut phase = ONE;
        for (w, &j) in self.0.iter().enumerate() {
            let shift = n - 1 - w;
            let bit = (row >> shift) & 1;
            match j {
                0 => {}
                1 => col ^= 1 << shift,
                2 => {
                    col ^= 1 << shift;
                    // ⟨0|Y|1⟩ = -i, ⟨1|Y|0⟩ = i
                    phase *= if bit == 0 { -I } else { I };
                }
                3 => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
                _ => unreachable!(),
            }
        }
        (col, phase)
    }
}

impl TryFrom<Vec<u8>> for PauliString {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PauliString> for Vec<u8> {
    fn from(p: PauliString) -> Self {
        p.0
    }
}
