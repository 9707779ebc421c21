//! Density matrices and the concrete states used throughout the crate.
//!
//! The incoherent basis is the computational basis of every subsystem.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, kron, ComplexMatrix, ONE, ZERO};

/// Tolerance applied when validating density-matrix invariants.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A validated quantum state: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        Self::with_tol(mat, dims, STATE_TOL)
    }

    pub fn with_tol(mat: ComplexMatrix, dims: Vec<usize>, tol: f64) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidState(format!(
                "{}x{} matrix is not square",
                mat.rows(),
                mat.cols()
            )));
        }
        if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != mat.rows() {
            return Err(Error::InvalidState(format!(
                "subsystem dims {dims:?} do not multiply to {}",
                mat.rows()
            )));
        }
        let dev = mat.hermitian_deviation();
        if dev > tol {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {dev:e})"
            )));
        }
        let tr = mat.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = linalg::hermitian_eigenvalues(&mat, tol)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { mat, dims })
    }

    /// `I/d` over the given subsystem dimensions.
    pub fn maximally_mixed(dims: &[usize]) -> Self {
        let d: usize = dims.iter().product();
        Self {
            mat: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            dims: dims.to_vec(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn is_bipartite(&self) -> bool {
        self.dims.len() == 2
    }

    pub(crate) fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.dims[..] {
            [da, db] => Ok((da, db)),
            _ => Err(Error::InvalidSubsystem(format!(
                "expected a bipartite state, got subsystem dims {:?}",
                self.dims
            ))),
        }
    }

    /// Same matrix, different subsystem split.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().product::<usize>() != self.dim() {
            return Err(Error::InvalidState(format!(
                "dims {dims:?} incompatible with dimension {}",
                self.dim()
            )));
        }
        Ok(Self {
            mat: self.mat.clone(),
            dims,
        })
    }

    /// Applies `U ρ U†` for a unitary `u`.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        if !u.is_unitary(1e-10) {
            return Err(Error::InvalidGate("operator is not unitary".into()));
        }
        Self::new(self.mat.conjugate_by(u)?, self.dims.clone())
    }

    pub(crate) fn from_parts_unchecked(mat: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), mat.rows());
        Self { mat, dims }
    }
}

/// Tensor product of two states; subsystem lists are concatenated.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    DensityMatrix {
        mat: kron(&a.mat, &b.mat),
        dims,
    }
}

/// Convex combination `Σ w_i ρ_i`.
pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<DensityMatrix> {
    check_distribution(weights)?;
    if weights.len() != states.len() || states.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} states",
            weights.len(),
            states.len()
        )));
    }
    let dims = states[0].dims.clone();
    let mut acc = ComplexMatrix::zeros(states[0].dim(), states[0].dim());
    for (w, s) in weights.iter().zip(states) {
        if s.dims != dims {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} vs {:?}",
                s.dims, dims
            )));
        }
        acc = acc.add(&s.mat.scale_real(*w))?;
    }
    DensityMatrix::new(acc, dims)
}

fn check_distribution(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|&w| w.is_nan() || w < 0.0) {
        return Err(Error::InvalidDecomposition(format!(
            "negative or NaN weight in {weights:?}"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidDecomposition(format!(
            "weights sum to {total}, not 1"
        )));
    }
    Ok(())
}

/// Normalised `|v⟩⟨v|` on a single subsystem of dimension `v.len()`.
pub fn pure_state(v: &[Complex64]) -> Result<DensityMatrix> {
    pure_state_with_dims(v, vec![v.len()])
}

pub fn pure_state_with_dims(v: &[Complex64], dims: Vec<usize>) -> Result<DensityMatrix> {
    let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if v.is_empty() || norm_sqr == 0.0 || !norm_sqr.is_finite() {
        return Err(Error::InvalidState("cannot normalise a zero vector".into()));
    }
    let n = v.len();
    let mut mat = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            mat[(i, j)] = v[i] * v[j].conj() / norm_sqr;
        }
    }
    if dims.iter().product::<usize>() != n {
        return Err(Error::InvalidState(format!(
            "dims {dims:?} incompatible with vector length {n}"
        )));
    }
    Ok(DensityMatrix { mat, dims })
}

/// `|Φ₊⟩⟨Φ₊|` with `|Φ₊⟩ = (|00⟩ + |11⟩)/√2`.
pub fn bell_phi_plus() -> DensityMatrix {
    let s = c(FRAC_1_SQRT_2, 0.0);
    pure_state_with_dims(&[s, ZERO, ZERO, s], vec![2, 2]).expect("normalisable")
}

/// Werner state `p|Φ₊⟩⟨Φ₊| + (1−p) I/4`. Endpoints are admitted.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!(
            "Werner parameter p = {p} outside [0, 1]"
        )));
    }
    let bell = bell_phi_plus();
    let mat = bell
        .mat
        .scale_real(p)
        .add(&ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0))?;
    Ok(DensityMatrix {
        mat,
        dims: vec![2, 2],
    })
}

/// `|Ψ₂⟩⟨Ψ₂|` with `|Ψ₂⟩ = (|0⟩ + |1⟩)/√2`.
pub fn maximally_coherent_qubit() -> DensityMatrix {
    pure_state(&[ONE, ONE]).expect("normalisable")
}

/// Real Bloch coordinates of a qubit state.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Unit vector with polar angle `theta` and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }
}

/// `½[[1+z, x−iy], [x+iy, 1−z]]`.
pub fn bloch_qubit(b: BlochVector) -> Result<DensityMatrix> {
    if b.norm().is_nan() || b.norm() > 1.0 + STATE_TOL {
        return Err(Error::OutOfRange(format!(
            "Bloch vector norm {} exceeds 1",
            b.norm()
        )));
    }
    let mat = ComplexMatrix::from_rows(&[
        vec![c(0.5 * (1.0 + b.z), 0.0), c(0.5 * b.x, -0.5 * b.y)],
        vec![c(0.5 * b.x, 0.5 * b.y), c(0.5 * (1.0 - b.z), 0.0)],
    ]);
    Ok(DensityMatrix { mat, dims: vec![2] })
}

/// Reduced state of a bipartite density matrix on `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let (da, db) = rho.bipartite_dims()?;
    let m = &rho.mat;
    let out = match keep {
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(da, da);
            for i in 0..da {
                for k in 0..da {
                    out[(i, k)] = (0..db).map(|j| m[(i * db + j, k * db + j)]).sum();
                }
            }
            DensityMatrix {
                mat: out,
                dims: vec![da],
            }
        }
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(db, db);
            for j in 0..db {
                for l in 0..db {
                    out[(j, l)] = (0..da).map(|i| m[(i * db + j, i * db + l)]).sum();
                }
            }
            DensityMatrix {
                mat: out,
                dims: vec![db],
            }
        }
    };
    Ok(out)
}

/// One B-side component of a zero-discord decomposition: a state on the full
/// B space whose support lies inside `indices`.
#[derive(Debug, Clone)]
pub struct BBlock {
    pub indices: Vec<usize>,
    pub state: DensityMatrix,
}

impl BBlock {
    /// Embeds `local` (dimension `indices.len()`) into a `dim_b`-dimensional
    /// space on the listed basis indices.
    pub fn embed(indices: Vec<usize>, local: &DensityMatrix, dim_b: usize) -> Result<Self> {
        if local.dim() != indices.len() {
            return Err(Error::InvalidDecomposition(format!(
                "local state of dimension {} for {} indices",
                local.dim(),
                indices.len()
            )));
        }
        if indices.iter().any(|&i| i >= dim_b) {
            return Err(Error::InvalidDecomposition(format!(
                "index out of range in {indices:?} for d_B = {dim_b}"
            )));
        }
        let mut mat = ComplexMatrix::zeros(dim_b, dim_b);
        for (a, &ia) in indices.iter().enumerate() {
            for (b, &ib) in indices.iter().enumerate() {
                mat[(ia, ib)] = local.mat[(a, b)];
            }
        }
        Ok(Self {
            indices,
            state: DensityMatrix {
                mat,
                dims: vec![dim_b],
            },
        })
    }
}

/// A decomposition `Σ_α p_α ρ^A_α ⊗ ρ^B_α` with the `ρ^B_α` supported on
/// pairwise disjoint sets of incoherent basis states.
#[derive(Debug, Clone)]
pub struct ZeroDiscordSpec {
    pub weights: Vec<f64>,
    pub a_states: Vec<DensityMatrix>,
    pub b_blocks: Vec<BBlock>,
}

impl ZeroDiscordSpec {
    pub fn validate(&self) -> Result<()> {
        let n = self.weights.len();
        if n == 0 || self.a_states.len() != n || self.b_blocks.len() != n {
            return Err(Error::InvalidDecomposition(format!(
                "{} weights, {} A states, {} B blocks",
                n,
                self.a_states.len(),
                self.b_blocks.len()
            )));
        }
        check_distribution(&self.weights)?;
        let da = self.a_states[0].dim();
        let db = self.b_blocks[0].state.dim();
        if self.a_states.iter().any(|s| s.dim() != da)
            || self.b_blocks.iter().any(|b| b.state.dim() != db)
        {
            return Err(Error::InvalidDecomposition(
                "components have inconsistent dimensions".into(),
            ));
        }
        let mut owner = vec![None; db];
        for (alpha, block) in self.b_blocks.iter().enumerate() {
            if block.indices.is_empty() {
                return Err(Error::InvalidDecomposition(format!(
                    "block {alpha} is empty"
                )));
            }
            for &i in &block.indices {
                if i >= db {
                    return Err(Error::InvalidDecomposition(format!(
                        "index {i} out of range for d_B = {db}"
                    )));
                }
                if let Some(prev) = owner[i] {
                    return Err(Error::InvalidDecomposition(format!(
                        "blocks {prev} and {alpha} overlap on basis index {i}"
                    )));
                }
                owner[i] = Some(alpha);
            }
            let m = block.state.matrix();
            for r in 0..db {
                for col in 0..db {
                    let inside = block.indices.contains(&r) && block.indices.contains(&col);
                    if !inside && m[(r, col)].norm() > STATE_TOL {
                        return Err(Error::InvalidDecomposition(format!(
                            "block {alpha} state has support outside {:?}",
                            block.indices
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim_a(&self) -> usize {
        self.a_states.first().map_or(0, DensityMatrix::dim)
    }

    pub fn dim_b(&self) -> usize {
        self.b_blocks.first().map_or(0, |b| b.state.dim())
    }
}

/// Builds `Σ_α p_α ρ^A_α ⊗ ρ^B_α` after validating the decomposition.
pub fn zero_discord_state(spec: &ZeroDiscordSpec) -> Result<DensityMatrix> {
    spec.validate()?;
    let (da, db) = (spec.dim_a(), spec.dim_b());
    let mut acc = ComplexMatrix::zeros(da * db, da * db);
    for ((w, a), b) in spec.weights.iter().zip(&spec.a_states).zip(&spec.b_blocks) {
        acc = acc.add(&kron(a.matrix(), b.state.matrix()).scale_real(*w))?;
    }
    DensityMatrix::new(acc, vec![da, db])
}

/// Seeded random generators for property tests and the verification suites.
pub mod random {
    use rand::seq::SliceRandom;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    use super::*;

    fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
        let data = (0..rows * cols)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                c(re, im)
            })
            .collect();
        ComplexMatrix::new(rows, cols, data).expect("positive dims")
    }

    /// `G G† / tr(G G†)` for a `dim × rank` complex Gaussian `G`.
    pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
        let g = ginibre(rng, dim, rank.max(1));
        let gg = linalg::matmul(&g, &linalg::adjoint(&g)).expect("conformable");
        let tr = gg.trace().re;
        // exact Hermitian symmetrisation keeps the validator happy at 1e-10
        let mat = gg
            .add(&linalg::adjoint(&gg))
            .expect("same shape")
            .scale_real(0.5 / tr);
        DensityMatrix::from_parts_unchecked(mat, vec![dim])
    }

    pub fn full_rank<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> DensityMatrix {
        let d = dims.iter().product();
        let mut rho = density_matrix(rng, d, d);
        rho.dims = dims.to_vec();
        rho
    }

    pub fn pure<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
        density_matrix(rng, dim, 1)
    }

    /// Permutation composed with uniformly random diagonal phases.
    pub fn monomial_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
        let mut perm: Vec<usize> = (0..dim).collect();
        perm.shuffle(rng);
        let mut u = ComplexMatrix::zeros(dim, dim);
        for (col, &row) in perm.iter().enumerate() {
            let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            u[(row, col)] = Complex64::from_polar(1.0, angle);
        }
        u
    }

    /// Random valid decomposition on `d_A ⊗ d_B`: the B basis is shuffled and
    /// cut into between one and `d_B` disjoint blocks.
    pub fn zero_discord_spec<R: Rng + ?Sized>(
        rng: &mut R,
        da: usize,
        db: usize,
    ) -> ZeroDiscordSpec {
        let mut basis: Vec<usize> = (0..db).collect();
        basis.shuffle(rng);
        let terms = rng.random_range(1..=db);
        let mut cuts: Vec<usize> = (1..db).collect();
        cuts.shuffle(rng);
        let mut cuts: Vec<usize> = cuts.into_iter().take(terms - 1).collect();
        cuts.sort_unstable();
        let mut bounds = vec![0];
        bounds.extend(cuts);
        bounds.push(db);

        let raw: Vec<f64> = (0..terms).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let head: f64 = weights[..terms - 1].iter().sum();
        weights[terms - 1] = 1.0 - head;

        let mut a_states = Vec::with_capacity(terms);
        let mut b_blocks = Vec::with_capacity(terms);
        for t in 0..terms {
            let mut indices = basis[bounds[t]..bounds[t + 1]].to_vec();
            indices.sort_unstable();
            let rank_a = rng.random_range(1..=da);
            a_states.push(density_matrix(rng, da, rank_a));
            let rank_b = rng.random_range(1..=indices.len());
            let local = density_matrix(rng, indices.len(), rank_b);
            b_blocks.push(BBlock::embed(indices, &local, db).expect("indices in range"));
        }
        ZeroDiscordSpec {
            weights,
            a_states,
            b_blocks,
        }
    }
}
