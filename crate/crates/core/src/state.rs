//! Density matrices on qubit registers and the operations the networks apply to them.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, tensor, ComplexMatrix, C64, I, ONE, UNITARY_TOL, ZERO};
use crate::pauli::PauliString;

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 12;

const STATE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;

/// A 2^n × 2^n Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let num_qubits = qubits_for_dim(matrix.rows())?;
        if !matrix.is_square() {
            return Err(Error::Dimension("density matrix must be square".into()));
        }
        let herm = matrix.hermiticity_deviation();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let state = Self { num_qubits, matrix };
        let min = state.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(state)
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        let num_qubits = qubits_for_dim(matrix.rows()).expect("power-of-two dimension");
        Self { num_qubits, matrix }
    }

    /// |ψ⟩⟨ψ| for the normalized `amplitudes`.
    pub fn from_pure(amplitudes: &[C64]) -> Result<Self> {
        qubits_for_dim(amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 || !norm.is_finite() {
            return Err(Error::InvalidState("state vector has zero norm".into()));
        }
        let psi: Vec<C64> = amplitudes.iter().map(|a| a / norm).collect();
        Ok(Self::from_matrix_unchecked(ComplexMatrix::outer(
            &psi, &psi,
        )))
    }

    /// Computational basis state |index⟩ on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let dim = dim_for_qubits(n)?;
        if index >= dim {
            return Err(Error::Dimension(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(index, index)] = ONE;
        Ok(Self::from_matrix_unchecked(m))
    }

    /// |0…0⟩⟨0…0|.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0).expect("register size checked by caller")
    }

    /// Diagonal state with the given probabilities over computational basis states.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        let diag: Vec<C64> = probabilities.iter().map(|&p| C64::new(p, 0.0)).collect();
        Self::from_matrix(ComplexMatrix::from_diagonal(&diag))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1usize << n;
        Self::from_matrix_unchecked(
            ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        )
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        // ρ is Hermitian, so Tr(ρ²) = Σ |ρ_ij|².
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = &self.matrix;
        let sym = m.add(&m.adjoint()).scale(C64::new(0.5, 0.0));
        let (values, _) = hermitian_eigen(&sym).expect("symmetrized matrix is Hermitian");
        values.into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Checks the state invariants at a caller-chosen tolerance.
    pub fn check(&self, tol: f64) -> Result<()> {
        let herm = self.matrix.hermiticity_deviation();
        if herm > tol {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = self.min_eigenvalue();
        if min < -10.0 * tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// ρ ⊗ σ, with `self` on the more significant wires.
    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_matrix_unchecked(tensor(&self.matrix, &other.matrix))
    }

    /// U ρ U† for a full-register unitary.
    pub fn apply(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::Dimension(format!(
                "{}x{} operator on a {}-dimensional state",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        let deviation = u.unitarity_deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self::from_matrix_unchecked(
            u.mul(&self.matrix).mul(&u.adjoint()),
        ))
    }

    /// Applies a k-qubit unitary to the listed wires without materializing the
    /// full-register operator.
    pub fn apply_on(&self, gate: &ComplexMatrix, wires: &[usize]) -> Result<Self> {
        check_gate_shape(gate, wires.len())?;
        check_wires(wires, self.num_qubits)?;
        let deviation = gate.unitarity_deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        let mut out = self.clone();
        out.conjugate_in_place(gate, wires);
        Ok(out)
    }

    /// ρ ← G ρ G† on `wires`. Shapes, wires and unitarity are the caller's responsibility.
    pub(crate) fn conjugate_in_place(&mut self, gate: &ComplexMatrix, wires: &[usize]) {
        let dim = self.dim();
        let layout = WireLayout::new(wires, self.num_qubits);
        let k = layout.offsets.len();
        let g = gate.as_slice();
        let data = self.matrix.as_mut_slice();
        let mut buf = vec![ZERO; k];

        // Left multiplication: columns are independent.
        for base in layout.bases(dim) {
            for c in 0..dim {
                for (h, &off) in layout.offsets.iter().enumerate() {
                    buf[h] = data[(base | off) * dim + c];
                }
                for (row, &off) in layout.offsets.iter().enumerate() {
                    let gr = &g[row * k..(row + 1) * k];
                    data[(base | off) * dim + c] = gr.iter().zip(&buf).map(|(&a, &b)| a * b).sum();
                }
            }
        }
        // Right multiplication by G†: rows are independent.
        for r in 0..dim {
            let row = &mut data[r * dim..(r + 1) * dim];
            for base in layout.bases(dim) {
                for (h, &off) in layout.offsets.iter().enumerate() {
                    buf[h] = row[base | off];
                }
                for (col, &off) in layout.offsets.iter().enumerate() {
                    let gr = &g[col * k..(col + 1) * k];
                    row[base | off] = gr.iter().zip(&buf).map(|(&a, &b)| b * a.conj()).sum();
                }
            }
        }
    }

    /// Reduced state on `keep`, in the listed order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Wiring(
                "partial trace needs at least one kept wire".into(),
            ));
        }
        check_wires(keep, self.num_qubits)?;
        let n = self.num_qubits;
        let traced: Vec<usize> = (0..n).filter(|w| !keep.contains(w)).collect();
        let keep_off = WireLayout::new(keep, n).offsets;
        let trace_off = WireLayout::new(&traced, n).offsets;
        let m = keep_off.len();
        let dim = self.dim();
        let src = self.matrix.as_slice();
        let mut out = ComplexMatrix::zeros(m, m);
        for (a, &ka) in keep_off.iter().enumerate() {
            for (b, &kb) in keep_off.iter().enumerate() {
                let mut acc = ZERO;
                for &t in &trace_off {
                    acc += src[(ka | t) * dim + (kb | t)];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(Self::from_matrix_unchecked(out))
    }

    /// Tr(ρ P). The imaginary part vanishes for Hermitian ρ and is dropped.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.len() != self.num_qubits {
            return Err(Error::Dimension(format!(
                "Pauli string of length {} on a {}-qubit state",
                p.len(),
                self.num_qubits
            )));
        }
        let dim = self.dim();
        let src = self.matrix.as_slice();
        let mut acc = ZERO;
        for row in 0..dim {
            // (ρP)_{cc} summed: P has one entry per row, P[row][col] = v.
            let (col, v) = p.row_entry(row);
            acc += src[col * dim + row] * v;
        }
        Ok(acc.re)
    }

    /// ½(ρ + Z_w ρ Z_w): removes coherences between the |0⟩ and |1⟩ blocks of `wire`.
    pub fn dephase_z(&self, wire: usize) -> Result<Self> {
        if wire >= self.num_qubits {
            return Err(Error::Wiring(format!(
                "wire {wire} out of range for {} qubits",
                self.num_qubits
            )));
        }
        let mut out = self.clone();
        out.dephase_in_place(wire);
        Ok(out)
    }

    pub(crate) fn dephase_in_place(&mut self, wire: usize) {
        let dim = self.dim();
        let mask = 1usize << (self.num_qubits - 1 - wire);
        let data = self.matrix.as_mut_slice();
        for r in 0..dim {
            for c in 0..dim {
                if (r ^ c) & mask != 0 {
                    data[r * dim + c] = ZERO;
                }
            }
        }
    }
}

/// Full-register operator acting as `gate` on `wires` (in listed order) and identity elsewhere.
pub fn embed(gate: &ComplexMatrix, wires: &[usize], n: usize) -> Result<ComplexMatrix> {
    check_gate_shape(gate, wires.len())?;
    check_wires(wires, n)?;
    let dim = dim_for_qubits(n)?;
    let layout = WireLayout::new(wires, n);
    let mut out = ComplexMatrix::zeros(dim, dim);
    for base in layout.bases(dim) {
        for (r, &ro) in layout.offsets.iter().enumerate() {
            for (c, &co) in layout.offsets.iter().enumerate() {
                out[(base | ro, base | co)] = gate[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Haar-random pure state: a normalized complex Gaussian vector.
pub fn sample_haar_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::Dimension(
            "Haar sampling needs at least one qubit".into(),
        ));
    }
    let dim = dim_for_qubits(n)?;
    let amps: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    DensityMatrix::from_pure(&amps)
}

/// The six Pauli eigenstates |0⟩, |1⟩, |+⟩, |−⟩, |+i⟩, |−i⟩.
pub fn axis_states() -> Vec<DensityMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = C64::new(h, 0.0);
    let vectors = [
        [ONE, ZERO],
        [ZERO, ONE],
        [r, r],
        [r, -r],
        [r, I * h],
        [r, -I * h],
    ];
    vectors
        .iter()
        .map(|v| DensityMatrix::from_pure(v).expect("normalized"))
        .collect()
}

pub(crate) fn dim_for_qubits(n: usize) -> Result<usize> {
    if n > MAX_QUBITS {
        return Err(Error::Dimension(format!(
            "{n} qubits exceeds the {MAX_QUBITS}-qubit limit"
        )));
    }
    Ok(1usize << n)
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    dim_for_qubits(n)?;
    Ok(n)
}

fn check_gate_shape(gate: &ComplexMatrix, k: usize) -> Result<()> {
    let d = 1usize << k;
    if gate.rows() != d || gate.cols() != d {
        return Err(Error::Dimension(format!(
            "{}x{} gate on {k} wires",
            gate.rows(),
            gate.cols()
        )));
    }
    Ok(())
}

pub(crate) fn check_wires(wires: &[usize], n: usize) -> Result<()> {
    for (i, &w) in wires.iter().enumerate() {
        if w >= n {
            return Err(Error::Wiring(format!(
                "wire {w} out of range for {n} qubits"
            )));
        }
        if wires[..i].contains(&w) {
            return Err(Error::Wiring(format!("wire {w} listed twice")));
        }
    }
    Ok(())
}

/// Bit offsets of each sub-register basis state within the full register.
struct WireLayout {
    offsets: Vec<usize>,
    mask: usize,
}

impl WireLayout {
    fn new(wires: &[usize], n: usize) -> Self {
        let k = wires.len();
        let shifts: Vec<usize> = wires.iter().map(|&w| n - 1 - w).collect();
        let offsets = (0..1usize << k)
            .map(|g| {
                shifts
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (g >> (k - 1 - i)) & 1 == 1)
                    .fold(0, |acc, (_, &s)| acc | (1 << s))
            })
            .collect();
        let mask = shifts.iter().fold(0, |acc, &s| acc | (1 << s));
        Self { offsets, mask }
    }

    /// Full-register indices whose bits on the layout's wires are all zero.
    fn bases(&self, dim: usize) -> impl Iterator<Item = usize> + '_ {
        (0..dim).filter(move |i| i & self.mask == 0)
    }
}
