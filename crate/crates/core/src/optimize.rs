//! Werner-state gap analysis: closed-form QI relative entropy and protocol
//! rate, the conditional coherence of a steered Bob state as a function of its
//! Bloch z-coordinate, and two numerical searches over measurement directions.

use std::f64::consts::{LN_2, PI, TAU};

use serde::Serialize;

use crate::coherence::c_re;
use crate::error::{Error, Result};
use crate::protocols::{ensemble_rate, measure_local_A, KrausChannel};
use crate::states::{bloch_qubit, mixture, werner, BlochVector, DensityMatrix};

/// Values closer than this are treated as ties when scanning a grid, so the
/// lexicographically first `(θ, φ)` wins.
pub const TIE_TOL: f64 = 1e-12;
/// `|f″|` below this is reported as an inflection point.
pub const INFLECTION_TOL: f64 = 1e-9;

fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("p = {p} outside [0, 1]")))
    }
}

/// `(1−p)/4 log₂(1−p) − (1+p)/2 log₂(1+p) + (1+3p)/4 log₂(1+3p)`.
pub fn qi_werner_closed_form(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(0.25 * xlog2x(1.0 - p) - 0.5 * xlog2x(1.0 + p) + 0.25 * xlog2x(1.0 + 3.0 * p))
}

/// `(1+p)/2 log₂(1+p) + (1−p)/2 log₂(1−p)`.
pub fn rate_werner_closed_form(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(0.5 * xlog2x(1.0 + p) + 0.5 * xlog2x(1.0 - p))
}

/// C_re of `p ρ̃ + (1−p)I/2` for a pure `ρ̃` with Bloch z-coordinate `z`.
pub fn conditional_c_re(p: f64, z: f64) -> Result<f64> {
    check_p(p)?;
    if !(-1.0..=1.0).contains(&z) {
        return Err(Error::OutOfRange(format!("z = {z} outside [-1, 1]")));
    }
    let pz = p * z;
    Ok(0.5 * xlog2x(1.0 - p) + 0.5 * xlog2x(1.0 + p)
        - 0.5 * xlog2x(1.0 + pz)
        - 0.5 * xlog2x(1.0 - pz))
}

/// `(1+3p)/4 log₂(1+3p) − (1−p)/4 log₂(1−p) − (1+p) log₂(1+p)`.
pub fn gap_closed_form(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(0.25 * xlog2x(1.0 + 3.0 * p) - 0.25 * xlog2x(1.0 - p) - xlog2x(1.0 + p))
}

/// `(1−3p) / ((1+3p)(1−p²) ln 2)`; `None` at the endpoints.
pub fn gap_second_derivative(p: f64) -> Result<Option<f64>> {
    check_p(p)?;
    if p == 0.0 || p == 1.0 {
        return Ok(None);
    }
    Ok(Some(
        (1.0 - 3.0 * p) / ((1.0 + 3.0 * p) * (1.0 - p * p) * LN_2),
    ))
}

/// Central second difference of [`gap_closed_form`].
pub fn gap_second_derivative_fd(p: f64, step: f64) -> Result<f64> {
    if step.is_nan() || step <= 0.0 || p - step < 0.0 || p + step > 1.0 {
        return Err(Error::OutOfRange(format!(
            "stencil p ± {step} leaves [0, 1] at p = {p}"
        )));
    }
    let (lo, mid, hi) = (
        gap_closed_form(p - step)?,
        gap_closed_form(p)?,
        gap_closed_form(p + step)?,
    );
    Ok((hi - 2.0 * mid + lo) / (step * step))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Curvature {
    Convex,
    Concave,
    Inflection,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapAnalysis {
    pub p: f64,
    pub qi_value: f64,
    pub rate_value: f64,
    pub gap: f64,
    /// `None` where the closed form is undefined (p = 0 or 1).
    pub second_derivative: Option<f64>,
}

impl GapAnalysis {
    pub fn curvature(&self) -> Option<Curvature> {
        self.second_derivative.map(|d| {
            if d.abs() < INFLECTION_TOL {
                Curvature::Inflection
            } else if d > 0.0 {
                Curvature::Convex
            } else {
                Curvature::Concave
            }
        })
    }
}

pub fn gap_analysis(p: f64) -> Result<GapAnalysis> {
    Ok(GapAnalysis {
        p,
        qi_value: qi_werner_closed_form(p)?,
        rate_value: rate_werner_closed_form(p)?,
        gap: gap_closed_form(p)?,
        second_derivative: gap_second_derivative(p)?,
    })
}

/// Polar × azimuthal resolution: θ takes `theta_steps` values spanning
/// `[0, π]` inclusive, φ takes `phi_steps` values spanning `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngularGrid {
    pub theta_steps: usize,
    pub phi_steps: usize,
}

impl AngularGrid {
    pub const fn new(theta_steps: usize, phi_steps: usize) -> Self {
        Self {
            theta_steps,
            phi_steps,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.theta_steps < 2 || self.phi_steps < 1 {
            return Err(Error::OutOfRange(format!("degenerate grid {self:?}")));
        }
        Ok(())
    }

    pub fn theta(&self, i: usize) -> f64 {
        PI * i as f64 / (self.theta_steps - 1) as f64
    }

    pub fn phi(&self, j: usize) -> f64 {
        TAU * j as f64 / self.phi_steps as f64
    }

    /// Deterministic maximum over the grid; ties (within [`TIE_TOL`]) keep the
    /// earliest `(θ, φ)` in lexicographic order.
    fn argmax(&self, mut f: impl FnMut(f64, f64) -> Result<f64>) -> Result<(f64, usize, usize)> {
        let mut best = (f64::NEG_INFINITY, 0, 0);
        for i in 0..self.theta_steps {
            for j in 0..self.phi_steps {
                let v = f(self.theta(i), self.phi(j))?;
                if v > best.0 + TIE_TOL {
                    best = (v, i, j);
                }
            }
        }
        Ok(best)
    }
}

impl Default for AngularGrid {
    fn default() -> Self {
        Self::new(200, 400)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionalMax {
    pub value: f64,
    /// Canonical representative: `z ≥ 0`, azimuth in `[0, π)`.
    pub argmax: BlochVector,
    /// Set when `p = 0`: every direction gives zero.
    pub degenerate: bool,
}

/// Bob state `p ρ̃(n) + (1−p)I/2` for the unit Bloch direction `n`.
pub fn steered_bob_state(p: f64, n: BlochVector) -> Result<DensityMatrix> {
    check_p(p)?;
    mixture(
        &[p, 1.0 - p],
        &[bloch_qubit(n)?, DensityMatrix::maximally_mixed(&[2])],
    )
}

fn canonical_direction(theta: f64, phi: f64) -> BlochVector {
    let (mut theta, mut phi) = (theta, phi.rem_euclid(TAU));
    if theta > PI / 2.0 {
        theta = PI - theta;
    }
    if phi >= PI {
        phi -= PI;
    }
    BlochVector::from_angles(theta, phi)
}

/// Maximises C_re of the steered Bob state over the unit sphere: a coarse
/// `(θ, φ)` grid followed by golden-section refinement in θ.
pub fn maximize_conditional(p: f64, grid: AngularGrid) -> Result<ConditionalMax> {
    check_p(p)?;
    grid.validate()?;
    if p == 0.0 {
        return Ok(ConditionalMax {
            value: 0.0,
            argmax: BlochVector::new(1.0, 0.0, 0.0),
            degenerate: true,
        });
    }
    let objective =
        |theta: f64, phi: f64| c_re(&steered_bob_state(p, BlochVector::from_angles(theta, phi))?);
    let (_, i, j) = grid.argmax(objective)?;
    let phi = grid.phi(j);
    let h = PI / (grid.theta_steps - 1) as f64;
    let lo = (grid.theta(i) - h).max(0.0);
    let hi = (grid.theta(i) + h).min(PI);
    let theta = golden_section_max(|t| objective(t, phi), lo, hi, 1e-10)?;
    let value = objective(theta, phi)?;
    Ok(ConditionalMax {
        value,
        argmax: canonical_direction(theta, phi),
        degenerate: false,
    })
}

fn golden_section_max(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasurementOpt {
    pub rate: f64,
    pub theta: f64,
    pub phi: f64,
    /// Alice's measurement axis.
    pub direction: BlochVector,
}

/// One-round rate `Σ q C_re(ρ_B|q)` of Alice's projective measurement along
/// `(theta, phi)` on a Werner state.
pub fn projective_measurement_rate(rho: &DensityMatrix, theta: f64, phi: f64) -> Result<f64> {
    ensemble_rate(&measure_local_A(
        rho,
        &KrausChannel::projective(theta, phi),
    )?)
}

/// Exhaustive search over Alice's rank-one projective measurements on the
/// grid, evaluated through the full matrix pipeline.
pub fn brute_force_measurement_opt(p: f64, grid: AngularGrid) -> Result<MeasurementOpt> {
    check_p(p)?;
    grid.validate()?;
    let rho = werner(p)?;
    let (rate, i, j) = grid.argmax(|theta, phi| projective_measurement_rate(&rho, theta, phi))?;
    let (theta, phi) = (grid.theta(i), grid.phi(j));
    Ok(MeasurementOpt {
        rate,
        theta,
        phi,
        direction: BlochVector::from_angles(theta, phi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::qi_relative_entropy;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn qi_closed_form_values() {
        close(qi_werner_closed_form(0.0).unwrap(), 0.0, 1e-15);
        close(
            qi_werner_closed_form(0.5).unwrap(),
            0.262_483_183_763_733_8,
            1e-12,
        );
        close(qi_werner_closed_form(1.0).unwrap(), 1.0, 1e-15);
        assert!(qi_werner_closed_form(1.5).is_err());
    }

    #[test]
    fn qi_closed_form_matches_matrix_route() {
        for k in 0..50 {
            let p = k as f64 / 49.0;
            let matrix = qi_relative_entropy(&werner(p).unwrap()).unwrap();
            close(qi_werner_closed_form(p).unwrap(), matrix, 1e-9);
        }
    }

    #[test]
    fn rate_closed_form_values() {
        close(rate_werner_closed_form(0.0).unwrap(), 0.0, 1e-15);
        close(rate_werner_closed_form(1.0).unwrap(), 1.0, 1e-15);
        close(
            rate_werner_closed_form(0.5).unwrap(),
            0.188_721_875_540_867_17,
            1e-12,
        );
        assert!(rate_werner_closed_form(-0.1).is_err());
    }

    #[test]
    fn conditional_values() {
        for p in [0.1, 0.5, 0.9, 1.0] {
            close(
                conditional_c_re(p, 0.0).unwrap(),
                rate_werner_closed_form(p).unwrap(),
                1e-15,
            );
            close(conditional_c_re(p, 1.0).unwrap(), 0.0, 1e-15);
            close(conditional_c_re(p, -1.0).unwrap(), 0.0, 1e-15);
        }
        close(
            conditional_c_re(0.5, 0.5).unwrap(),
            0.143_155_878_465_832_1,
            1e-12,
        );
        assert!(conditional_c_re(0.5, 1.1).is_err());
        assert!(conditional_c_re(1.1, 0.0).is_err());
    }

    #[test]
    fn conditional_matches_matrix_oracle() {
        for &(p, z, phi) in &[
            (0.5, 0.5, 0.3),
            (0.2, -0.7, 2.0),
            (0.9, 0.1, 4.0),
            (1.0, 0.3, 0.0),
        ] {
            let r = (1.0f64 - z * z).sqrt();
            let n = BlochVector::new(r * f64::cos(phi), r * f64::sin(phi), z);
            let oracle = c_re(&steered_bob_state(p, n).unwrap()).unwrap();
            close(conditional_c_re(p, z).unwrap(), oracle, 1e-12);
        }
    }

    #[test]
    fn gap_values() {
        let g = gap_analysis(1.0 / 3.0).unwrap();
        close(g.gap, 0.044_110_417_748_401_1, 1e-12);
        close(g.second_derivative.unwrap(), 0.0, 1e-12);
        assert_eq!(g.curvature(), Some(Curvature::Inflection));
        close(
            gap_analysis(0.5).unwrap().gap,
            0.073_761_308_222_867_2,
            1e-12,
        );
        assert!(gap_analysis(1.0).unwrap().second_derivative.is_none());
        assert!(gap_analysis(0.0).unwrap().second_derivative.is_none());
        close(gap_analysis(1.0).unwrap().gap, 0.0, 1e-15);
        assert!(gap_analysis(1.0 - 1e-6).unwrap().gap < 1e-4);
    }

    #[test]
    fn gap_positive_on_interior_grid() {
        close(gap_closed_form(0.001).unwrap(), 7.199_071_053_5e-7, 1e-15);
        for k in 1..=999 {
            let f = gap_closed_form(k as f64 / 1000.0).unwrap();
            assert!(f > 0.0, "k = {k}: {f}");
            if k >= 2 {
                assert!(f > 1e-6, "k = {k}: {f}");
            }
        }
    }

    #[test]
    fn second_derivative_matches_finite_difference() {
        for k in 0..=90 {
            let p = 0.05 + 0.01 * k as f64;
            let closed = gap_second_derivative(p).unwrap().unwrap();
            let fd = gap_second_derivative_fd(p, 1e-4).unwrap();
            close(closed, fd, 1e-4);
        }
        assert!(gap_second_derivative_fd(0.00005, 1e-4).is_err());
    }

    #[test]
    fn maximize_conditional_values() {
        let grid = AngularGrid::new(61, 24);
        let one = maximize_conditional(1.0, grid).unwrap();
        close(one.value, 1.0, 1e-6);
        assert!(one.argmax.z.abs() < 1e-3);
        let half = maximize_conditional(0.5, grid).unwrap();
        close(half.value, 0.188_721_875_540_867_17, 1e-6);
        assert!(half.argmax.z.abs() < 1e-3 && half.argmax.z >= 0.0);
        let tenth = maximize_conditional(0.1, grid).unwrap();
        close(tenth.value, rate_werner_closed_form(0.1).unwrap(), 1e-6);
        let zero = maximize_conditional(0.0, grid).unwrap();
        assert!(zero.degenerate && zero.value == 0.0);
    }

    #[test]
    fn brute_force_small_grid() {
        let r = brute_force_measurement_opt(1.0, AngularGrid::new(21, 8)).unwrap();
        close(r.rate, 1.0, 1e-9);
        let rho = werner(0.6).unwrap();
        close(
            projective_measurement_rate(&rho, 0.0, 0.0).unwrap(),
            0.0,
            1e-12,
        );
        close(
            projective_measurement_rate(&rho, PI, 1.0).unwrap(),
            0.0,
            1e-12,
        );
        assert!(brute_force_measurement_opt(0.5, AngularGrid::new(1, 4)).is_err());
    }

    proptest! {
        #[test]
        fn conditional_even_and_monotone(p in 0.0f64..=1.0, z in 0.0f64..=1.0, dz in 0.0f64..=1.0) {
            let a = conditional_c_re(p, z).unwrap();
            prop_assert!((a - conditional_c_re(p, -z).unwrap()).abs() < 1e-14);
            let z2 = (z + dz).min(1.0);
            prop_assert!(conditional_c_re(p, z2).unwrap() <= a + 1e-14);
        }

        #[test]
        fn gap_is_qi_minus_rate(p in 0.0f64..=1.0) {
            let g = gap_analysis(p).unwrap();
            prop_assert!((g.gap - (g.qi_value - g.rate_value)).abs() < 1e-10);
            prop_assert!(g.rate_value >= -1e-15 && g.rate_value <= g.qi_value + 1e-12 && g.qi_value <= 2.0);
        }
    }
}
