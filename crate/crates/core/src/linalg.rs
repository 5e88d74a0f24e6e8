//! Dense complex matrices and the handful of factorizations the simulator needs.
//!
//! Register convention: in `tensor(a, b)` the indices of `a` are the more
//! significant ones, so wire 0 of a register is the leftmost tensor factor and
//! basis index `b = Σ bit_w · 2^(n-1-w)`.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance used when checking that a generator is Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance used when checking that an operator is unitary before applying it.
pub const UNITARY_TOL: f64 = 1e-8;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty {rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a square matrix from nested rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self::new(n, cols, data).expect("well-formed rows")
    }

    /// Real-valued convenience constructor.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                m[(i, j)] = x * y.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "cannot multiply {}x{} by {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn apply_to_vector(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Max-entry norm of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-entry norm of `M - M†`.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Max-entry norm of `U†U - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint()
            .mul(self)
            .max_abs_diff(&Self::identity(self.rows))
    }

    /// Compares two matrices modulo a global phase, aligning on the largest entry of `self`.
    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return false;
        }
        let (k, _) = self.data.iter().enumerate().fold((0, 0.0), |best, (k, z)| {
            if z.norm() > best.1 {
                (k, z.norm())
            } else {
                best
            }
        });
        if other.data[k].norm() < tol {
            return self.max_abs_diff(other) <= tol;
        }
        let phase = self.data[k] / other.data[k];
        let phase = phase / phase.norm();
        self.max_abs_diff(&other.scale(phase)) <= tol
    }

    /// Entry-wise modulus.
    pub fn abs(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm()).collect()
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        let (rows, cols) = m.shape();
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`; indices of `a` are the more significant ones.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    let out_cols = ac * bc;
    for i in 0..ar {
        for j in 0..ac {
            let x = a.data[i * ac + j];
            if x == ZERO {
                continue;
            }
            for k in 0..br {
                let row = (i * br + k) * out_cols + j * bc;
                for l in 0..bc {
                    out.data[row + l] = x * b.data[k * bc + l];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of factors, left to right.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| tensor(&acc, f))
}

/// Eigen-decomposition `H = Q Λ Q†` of a Hermitian matrix. Eigenvectors are the columns of `Q`.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let deviation = h.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = SymmetricEigen::new(h.to_nalgebra());
    Ok((
        eig.eigenvalues.iter().copied().collect(),
        ComplexMatrix::from_nalgebra(&eig.eigenvectors),
    ))
}

/// `exp(iH)` for Hermitian `H`, reconstructed from its eigen-decomposition.
pub fn exp_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, q) = hermitian_eigen(h)?;
    let n = values.len();
    let phases: Vec<C64> = values.iter().map(|&l| C64::from_polar(1.0, l)).collect();
    // Q · diag(phases) · Q†
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for (k, &p) in phases.iter().enumerate() {
                acc += q[(i, k)] * p * q[(j, k)].conj();
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Principal Hermitian logarithm of a unitary: returns `H` with `exp(iH) = U` and
/// eigenvalues of `H` in `(-π, π]`.
///
/// `U` is normal, so its Hermitian and anti-Hermitian parts commute and a generic
/// real combination of them shares `U`'s eigenvectors.
pub fn log_unitary(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let deviation = u.unitarity_deviation();
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let n = u.rows();
    let ud = u.adjoint();
    let herm = u.add(&ud).scale(C64::new(0.5, 0.0));
    let anti = u.sub(&ud).scale(C64::new(0.0, -0.5));
    let mut best: Option<(f64, ComplexMatrix)> = None;
    for mix in [0.618_034, 1.372_519, -2.693_147] {
        let k = herm.add(&anti.scale(C64::new(mix, 0.0)));
        let (_, q) = hermitian_eigen(&k)?;
        let diag = q.adjoint().mul(u).mul(&q);
        let angles: Vec<C64> = (0..n).map(|i| C64::new(diag[(i, i)].arg(), 0.0)).collect();
        let h = q
            .mul(&ComplexMatrix::from_diagonal(&angles))
            .mul(&q.adjoint());
        // Symmetrize away rounding so the result passes the Hermitian check downstream.
        let h = h.add(&h.adjoint()).scale(C64::new(0.5, 0.0));
        let err = exp_hermitian(&h)?.max_abs_diff(u);
        if err < 1e-11 {
            return Ok(h);
        }
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, h));
        }
    }
    let (err, h) = best.expect("at least one attempt");
    if err < 1e-9 {
        Ok(h)
    } else {
        Err(Error::Dimension(format!(
            "matrix logarithm failed to converge (residual {err:e})"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let data = (0..n * n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ComplexMatrix::new(n, n, data).unwrap()
    }

    pub(crate) fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let a = random_matrix(n, rng);
        a.add(&a.adjoint()).scale(C64::new(0.5, 0.0))
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]])
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn tensor_of_z_with_z_is_parity_diagonal() {
        let zz = tensor(&pauli_z(), &pauli_z());
        let expected = ComplexMatrix::from_diagonal(&[ONE, -ONE, -ONE, ONE]);
        assert_eq!(zz, expected);
    }

    #[test]
    fn tensor_matches_index_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(2, &mut rng);
        let b = random_matrix(2, &mut rng);
        let ab = tensor(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        assert_eq!(ab[(2 * i + k, 2 * j + l)], a[(i, j)] * b[(k, l)]);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_handles_rectangular_factors() {
        let col = ComplexMatrix::new(2, 1, vec![ONE, I]).unwrap();
        let row = ComplexMatrix::new(1, 3, vec![ONE, ONE, -ONE]).unwrap();
        let t = tensor(&col, &row);
        assert_eq!((t.rows(), t.cols()), (2, 3));
        assert_eq!(t[(1, 2)], -I);
    }

    #[test]
    fn exp_of_zero_generator_is_identity() {
        let u = exp_hermitian(&ComplexMatrix::zeros(4, 4)).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn exp_of_half_pi_x_is_i_x() {
        let h = pauli_x().scale(C64::new(std::f64::consts::FRAC_PI_2, 0.0));
        let u = exp_hermitian(&h).unwrap();
        assert!(u.max_abs_diff(&pauli_x().scale(I)) < 1e-14);
    }

    #[test]
    fn exp_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(exp_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    fn taylor_exp_i(h: &ComplexMatrix, terms: usize) -> ComplexMatrix {
        let n = h.rows();
        let ih = h.scale(I);
        let mut term = ComplexMatrix::identity(n);
        let mut sum = term.clone();
        for k in 1..=terms {
            term = term.mul(&ih).scale(C64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        sum
    }

    #[test]
    fn exp_matches_taylor_series_on_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let h = random_hermitian(8, &mut rng);
            let u = exp_hermitian(&h).unwrap();
            assert!(u.unitarity_deviation() < 1e-10);
            assert!(u.max_abs_diff(&taylor_exp_i(&h, 40)) < 1e-8);
        }
    }

    #[test]
    fn log_unitary_inverts_exp() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [2, 4, 8] {
            let h = random_hermitian(n, &mut rng);
            let u = exp_hermitian(&h).unwrap();
            let back = log_unitary(&u).unwrap();
            assert!(exp_hermitian(&back).unwrap().max_abs_diff(&u) < 1e-10);
        }
    }

    #[test]
    fn log_unitary_handles_degenerate_spectrum() {
        // CNOT has eigenvalues {1, 1, 1, -1}.
        let cnot = ComplexMatrix::from_real_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]);
        let h = log_unitary(&cnot).unwrap();
        assert!(exp_hermitian(&h).unwrap().max_abs_diff(&cnot) < 1e-10);
    }

    #[test]
    fn phase_insensitive_comparison() {
        let x = pauli_x();
        assert!(x.approx_eq_up_to_phase(&x.scale(C64::from_polar(1.0, 0.7)), 1e-12));
        assert!(!x.approx_eq_up_to_phase(&pauli_z(), 1e-6));
    }

    #[test]
    fn new_rejects_bad_shapes() {
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::new(2, 2, vec![ONE; 3]).is_err());
    }
}
