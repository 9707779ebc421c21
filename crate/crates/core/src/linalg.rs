//! Dense complex matrices and a cyclic Jacobi eigensolver for Hermitian input.
//!
//! Composite indices follow the A-major convention: for a bipartite basis
//! state `|i⟩_A ⊗ |j⟩_B` the row/column index is `i * d_B + j`. Every tensor,
//! partial-trace and dephasing routine in the crate relies on this ordering.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::DensityMatrix;

/// Default tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Jacobi stops once the off-diagonal Frobenius norm drops below this.
pub const JACOBI_OFF_TOL: f64 = 1e-12;
/// Maximum number of full Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!(
                "{rows}x{cols} has an empty dimension"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
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

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == cols), "ragged rows");
        Self::new(r, cols, rows.concat()).expect("non-empty rows")
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn column(entries: &[Complex64]) -> Self {
        Self::new(entries.len(), 1, entries.to_vec()).expect("non-empty column")
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(c(factor, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Largest entrywise modulus of `self - other`; `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tol)
    }

    /// Largest entrywise modulus of `self - self†`. Infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `U†U == I` within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && matmul(&adjoint(self), self)
                .map(|p| p.approx_eq(&Self::identity(self.rows), tol))
                .unwrap_or(false)
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        matmul(&matmul(u, self)?, &adjoint(u))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, col): (usize, usize)) -> &Complex64 {
        assert!(
            r < self.rows && col < self.cols,
            "index ({r},{col}) out of bounds"
        );
        &self.data[r * self.cols + col]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut Complex64 {
        assert!(
            r < self.rows && col < self.cols,
            "index ({r},{col}) out of bounds"
        );
        &mut self.data[r * self.cols + col]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for col in 0..self.cols {
                let z = self[(r, col)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik == ZERO {
                continue;
            }
            for j in 0..b.cols {
                out.data[i * b.cols + j] += aik * b[(k, j)];
            }
        }
    }
    Ok(out)
}

/// Conjugate transpose.
pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.cols, a.rows);
    for r in 0..a.rows {
        for col in 0..a.cols {
            out[(col, r)] = a[(r, col)].conj();
        }
    }
    out
}

/// Kronecker product with `a` as the major (outer) factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let s = a[(ar, ac)];
            if s == ZERO {
                continue;
            }
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out[(ar * b.rows + br, ac * b.cols + bc)] = s * b[(br, bc)];
                }
            }
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues sorted in descending order.
    pub values: Vec<f64>,
    /// Unitary whose k-th column is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `⟨v_k| m |v_k⟩` for every eigenvector, in eigenvalue order.
    pub fn expectations(&self, m: &ComplexMatrix) -> Result<Vec<f64>> {
        let n = self.vectors.rows();
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "operator {}x{} vs eigenbasis of dimension {n}",
                m.rows(),
                m.cols()
            )));
        }
        let mv = matmul(m, &self.vectors)?;
        Ok((0..n)
            .map(|k| {
                (0..n)
                    .map(|i| self.vectors[(i, k)].conj() * mv[(i, k)])
                    .sum::<Complex64>()
                    .re
            })
            .collect())
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi diagonalisation of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a[p][q]` with a
/// diagonal unitary and then applies the classical real Jacobi rotation, so
/// the combined 2x2 block is unitary and the pivot is annihilated exactly.
pub fn hermitian_eigen(a: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::InvalidShape(format!(
            "{}x{} is not square",
            a.rows, a.cols
        )));
    }
    let deviation = a.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    let n = a.rows;
    // symmetrise so round-off in the input does not leak into the rotations
    let mut m = a.add(&adjoint(a))?.scale_real(0.5);
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFF_TOL * frobenius(a).max(1.0);

    let mut sweeps = 0;
    while off_diagonal_norm(&m) >= threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off_diagonal_norm(&m),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, dst)] = v[(r, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn frobenius(a: &ComplexMatrix) -> f64 {
    a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = (apq / r).conj();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    // signum(0.0) == 1.0, which gives the 45° rotation for equal diagonals
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;

    // G = diag(1, phase) · [[c, s], [-s, c]] restricted to the (p, q) plane
    let g_pp = c(cs, 0.0);
    let g_pq = c(sn, 0.0);
    let g_qp = phase * (-sn);
    let g_qq = phase * cs;

    let n = m.rows;
    // m <- m G
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * g_pp + mkq * g_qp;
        m[(k, q)] = mkp * g_pq + mkq * g_qq;
    }
    // m <- G† m
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = g_pp.conj() * mpk + g_qp.conj() * mqk;
        m[(q, k)] = g_pq.conj() * mpk + g_qq.conj() * mqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = c(m[(p, p)].re, 0.0);
    m[(q, q)] = c(m[(q, q)].re, 0.0);
    // v <- v G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Real eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues(a: &ComplexMatrix, tol: f64) -> Result<Vec<f64>> {
    hermitian_eigen(a, tol).map(|e| e.values)
}

/// `½ Σ |λ_i|` over the eigenvalues of `a − b`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "states of dimension {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = a.matrix().sub(b.matrix())?;
    let values = hermitian_eigenvalues(&diff, HERMITIAN_TOL)?;
    Ok(0.5 * values.iter().map(|x| x.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn identity_times_x() {
        let x = gates::pauli_x();
        assert_eq!(matmul(&ComplexMatrix::identity(2), &x).unwrap(), x);
        assert!(matmul(&x, &x)
            .unwrap()
            .approx_eq(&ComplexMatrix::identity(2), 0.0));
    }

    #[test]
    fn kraus_gram_product() {
        let k1 = gates::erasing_kraus_1();
        let got = matmul(&adjoint(&k1), &k1).unwrap();
        let want = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.0, -0.5)],
            vec![c(0.0, 0.5), c(0.5, 0.0)],
        ]);
        assert!(got.approx_eq(&want, 1e-15), "{got:?}");
    }

    #[test]
    fn matmul_rejects_mismatch() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(matmul(&a, &a), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn adjoint_examples() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(adjoint(&id), id);
        assert_eq!(
            adjoint(&ComplexMatrix::diag(&[ONE, I])),
            ComplexMatrix::diag(&[ONE, -I])
        );
        let want = ComplexMatrix::from_rows(&[vec![c(0.0, -S), ZERO], vec![c(S, 0.0), ZERO]]);
        assert!(adjoint(&gates::erasing_kraus_1()).approx_eq(&want, 1e-15));
    }

    #[test]
    fn kron_examples() {
        let id2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&id2, &id2), ComplexMatrix::identity(4));

        let block = kron(&ComplexMatrix::diag(&[ONE, ZERO]), &gates::pauli_x());
        let mut want = ComplexMatrix::zeros(4, 4);
        want[(0, 1)] = ONE;
        want[(1, 0)] = ONE;
        assert_eq!(block, want);

        let ket = kron(
            &ComplexMatrix::column(&[ONE, ZERO]),
            &ComplexMatrix::column(&[ZERO, ONE]),
        );
        assert_eq!(ket, ComplexMatrix::column(&[ZERO, ONE, ZERO, ZERO]));
    }

    #[test]
    fn shape_validation() {
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::new(2, 2, vec![ZERO; 3]).is_err());
    }

    #[test]
    fn eigenvalues_pauli_z_and_mixed() {
        let ev = hermitian_eigenvalues(&gates::pauli_z(), HERMITIAN_TOL).unwrap();
        assert_eq!(ev, vec![1.0, -1.0]);
        let mixed = ComplexMatrix::identity(4).scale_real(0.25);
        let ev = hermitian_eigenvalues(&mixed, HERMITIAN_TOL).unwrap();
        assert!(ev.iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn eigenvalues_of_werner_half() {
        let rho = crate::states::werner(0.5).unwrap();
        let ev = hermitian_eigenvalues(rho.matrix(), HERMITIAN_TOL).unwrap();
        for (got, want) in ev.iter().zip([0.625, 0.125, 0.125, 0.125]) {
            assert!((got - want).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn eigenvectors_diagonalise() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.5)],
            vec![c(1.0, 1.0), c(-1.0, 0.0), c(0.3, 0.0)],
            vec![c(0.0, -0.5), c(0.3, 0.0), c(0.5, 0.0)],
        ]);
        let e = hermitian_eigen(&m, HERMITIAN_TOL).unwrap();
        assert!(e.vectors.is_unitary(1e-12));
        let d = matmul(&matmul(&adjoint(&e.vectors), &m).unwrap(), &e.vectors).unwrap();
        let want = ComplexMatrix::diag(&e.values.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
        assert!(d.approx_eq(&want, 1e-12), "{d:?}");
        assert!((e.values.iter().sum::<f64>() - m.trace().re).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(
            hermitian_eigenvalues(&m, HERMITIAN_TOL),
            Err(Error::NotHermitian { .. })
        ));
        assert!(hermitian_eigenvalues(&ComplexMatrix::zeros(2, 3), HERMITIAN_TOL).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        use crate::states::pure_state;
        let zero = pure_state(&[ONE, ZERO]).unwrap();
        let one = pure_state(&[ZERO, ONE]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(&[2]);
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_distance(&zero, &mixed).unwrap() - 0.5).abs() < 1e-15);
        assert!(trace_distance(&zero, &crate::states::werner(0.2).unwrap()).is_err());
    }
}
