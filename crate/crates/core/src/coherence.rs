//! Entropic quantities in bits: von Neumann and relative entropy, dephasing,
//! relative entropy of coherence, QI relative entropy and basis-dependent
//! discord.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, ComplexMatrix, HERMITIAN_TOL, ZERO};
use crate::states::{partial_trace, tensor, DensityMatrix, Subsystem};

/// Eigenvalues in `[-EIGEN_CLAMP, 0)` are treated as exact zeros.
pub const EIGEN_CLAMP: f64 = 1e-10;
/// `σ` eigenvalues below this count as outside its support.
pub const SUPPORT_EIGEN_TOL: f64 = 1e-12;
/// `ρ` weight on a null direction of `σ` above this makes `S(ρ‖σ)` infinite.
pub const SUPPORT_WEIGHT_TOL: f64 = 1e-10;

/// Which subsystems a dephasing acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dephasing {
    /// Full dephasing Π in the product incoherent basis.
    All,
    /// Dephasing of one party of a bipartite state, e.g. Π^B.
    Only(Subsystem),
}

fn clamp_spectrum(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&x| {
            if x < -EIGEN_CLAMP {
                Err(Error::InvalidState(format!(
                    "eigenvalue {x:e} below -{EIGEN_CLAMP:e}"
                )))
            } else {
                Ok(x.max(0.0))
            }
        })
        .collect()
}

/// Shannon entropy of a probability vector in bits, with `0 log 0 = 0`.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&q| q > 0.0)
        .map(|&q| q * q.log2())
        .sum::<f64>()
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let values = hermitian_eigenvalues(rho.matrix(), HERMITIAN_TOL)?;
    Ok(shannon_entropy(&clamp_spectrum(&values)?))
}

/// `Tr ρ log₂ρ − Tr ρ log₂σ`; `f64::INFINITY` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "states of dimension {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let neg_entropy = -von_neumann_entropy(rho)?;
    let eig = hermitian_eigen(sigma.matrix(), HERMITIAN_TOL)?;
    let weights = eig.expectations(rho.matrix())?;
    let mut cross = 0.0;
    for (&lambda, &w) in eig.values.iter().zip(&weights) {
        if lambda < SUPPORT_EIGEN_TOL {
            if w > SUPPORT_WEIGHT_TOL {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += w * lambda.log2();
    }
    Ok(neg_entropy - cross)
}

/// Zeroes every element that is off-diagonal in the incoherent basis of the
/// targeted subsystems.
pub fn dephase(rho: &DensityMatrix, targets: Dephasing) -> Result<DensityMatrix> {
    let m = rho.matrix();
    let n = rho.dim();
    let keep: Box<dyn Fn(usize, usize) -> bool> = match targets {
        Dephasing::All => Box::new(|r, col| r == col),
        Dephasing::Only(sub) => {
            let (_, db) = rho.bipartite_dims()?;
            match sub {
                Subsystem::A => Box::new(move |r, col| r / db == col / db),
                Subsystem::B => Box::new(move |r, col| r % db == col % db),
            }
        }
    };
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for col in 0..n {
            if keep(r, col) {
                out[(r, col)] = m[(r, col)];
            } else {
                out[(r, col)] = ZERO;
            }
        }
    }
    Ok(DensityMatrix::from_parts_unchecked(
        out,
        rho.dims().to_vec(),
    ))
}

/// Relative entropy of coherence `S(Π(ρ)) − S(ρ)`.
pub fn c_re(rho: &DensityMatrix) -> Result<f64> {
    let diag: Vec<f64> = (0..rho.dim()).map(|i| rho.matrix()[(i, i)].re).collect();
    let dephased = shannon_entropy(&clamp_spectrum(&diag)?);
    Ok(dephased - von_neumann_entropy(rho)?)
}

/// QI relative entropy `S(Π^B(ρ)) − S(ρ)` of a bipartite state.
pub fn qi_relative_entropy(rho: &DensityMatrix) -> Result<f64> {
    let dephased = dephase(rho, Dephasing::Only(Subsystem::B))?;
    Ok(von_neumann_entropy(&dephased)? - von_neumann_entropy(rho)?)
}

/// Basis-dependent discord `D^{A|B}_{Π^B}`, evaluated as
/// `C_re^{A|B}(ρ) − C_re(ρ^B)`.
///
/// Debug builds also evaluate [`basis_dependent_discord_mutual_info`] and
/// assert that both routes agree to 1e-8.
pub fn basis_dependent_discord(rho: &DensityMatrix) -> Result<f64> {
    let qi = qi_relative_entropy(rho)?;
    let marginal = partial_trace(rho, Subsystem::B)?;
    let d = qi - c_re(&marginal)?;
    #[cfg(debug_assertions)]
    {
        let other = basis_dependent_discord_mutual_info(rho)?;
        if other.is_finite() {
            debug_assert!(
                (other - d).abs() < 1e-8,
                "discord routes disagree: {d} vs {other}"
            );
        }
    }
    Ok(d)
}

/// `S(ρ‖ρ^A⊗ρ^B) − S(Π^B(ρ)‖ρ^A⊗Π^B(ρ^B))`: mutual information lost under
/// dephasing of B.
pub fn basis_dependent_discord_mutual_info(rho: &DensityMatrix) -> Result<f64> {
    let rho_a = partial_trace(rho, Subsystem::A)?;
    let rho_b = partial_trace(rho, Subsystem::B)?;
    let before = relative_entropy(rho, &tensor(&rho_a, &rho_b))?;
    let dephased = dephase(rho, Dephasing::Only(Subsystem::B))?;
    let rho_b_dephased = dephase(&rho_b, Dephasing::All)?;
    let after = relative_entropy(&dephased, &tensor(&rho_a, &rho_b_dephased))?;
    Ok(before - after)
}
