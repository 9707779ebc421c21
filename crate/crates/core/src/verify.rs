//! Structured checks over the lower layers: zero-discord equalities, the
//! Werner gap, the outer segments of the rate chain, and scan data.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coherence::{
    basis_dependent_discord, basis_dependent_discord_mutual_info, c_re, qi_relative_entropy,
};
use crate::error::{Error, Result};
use crate::linalg::{trace_distance, ONE, ZERO};
use crate::optimize::{brute_force_measurement_opt, gap_analysis, AngularGrid, Curvature};
use crate::protocols::{licc_erasing_protocol, lqicc_werner_protocol, werner_target_state};
use crate::states::{
    maximally_coherent_qubit, mixture, partial_trace, pure_state, random, tensor, werner,
    zero_discord_state, BBlock, DensityMatrix, Subsystem, ZeroDiscordSpec,
};

/// Zero-discord and QI = C_re(ρ^B) tolerance.
pub const THEOREM3_TOL: f64 = 1e-9;
/// Agreement between the two discord routes.
pub const DISCORD_ROUTE_TOL: f64 = 1e-8;
/// Protocol rate vs. closed form.
pub const PROTOCOL_RATE_TOL: f64 = 1e-10;
/// Corrected Bob state vs. the target state, in trace distance.
pub const PROTOCOL_STATE_TOL: f64 = 1e-12;
/// Brute-force optimum vs. closed form.
pub const BRUTE_FORCE_TOL: f64 = 2e-4;
/// Slack on the chain inequalities.
pub const CHAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct Theorem3Report {
    pub discord: f64,
    pub discord_mutual_info: f64,
    pub qi: f64,
    pub c_re_b: f64,
    pub pass: bool,
}

/// Checks `D = 0` and `C_re^{A|B} = C_re(ρ^B)` on an arbitrary bipartite
/// state. Used directly for negative controls.
pub fn check_zero_discord(rho: &DensityMatrix) -> Result<Theorem3Report> {
    let discord = basis_dependent_discord(rho)?;
    let discord_mutual_info = basis_dependent_discord_mutual_info(rho)?;
    let qi = qi_relative_entropy(rho)?;
    let c_re_b = c_re(&partial_trace(rho, Subsystem::B)?)?;
    let pass = discord.abs() < THEOREM3_TOL
        && (qi - c_re_b).abs() < THEOREM3_TOL
        && (discord_mutual_info - discord).abs() < DISCORD_ROUTE_TOL;
    Ok(Theorem3Report {
        discord,
        discord_mutual_info,
        qi,
        c_re_b,
        pass,
    })
}

pub fn check_theorem3(spec: &ZeroDiscordSpec) -> Result<Theorem3Report> {
    check_zero_discord(&zero_discord_state(spec)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem4Row {
    pub p: f64,
    pub qi: f64,
    pub closed_form_rate: f64,
    pub lqicc_rate: f64,
    pub licc_rate: f64,
    pub max_state_distance: f64,
    pub brute_force_rate: f64,
    pub gap: f64,
    pub curvature: Option<Curvature>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem4Report {
    pub rows: Vec<Theorem4Row>,
    pub pass: bool,
}

fn theorem4_row(p: f64, grid: AngularGrid) -> Result<Theorem4Row> {
    let gap = gap_analysis(p)?;
    let lqicc = lqicc_werner_protocol(p)?;
    let licc = licc_erasing_protocol(p)?;
    let target = werner_target_state(p)?;
    let mut max_state_distance: f64 = 0.0;
    for item in lqicc.ensemble.items().iter().chain(licc.ensemble.items()) {
        max_state_distance = max_state_distance.max(trace_distance(&item.state, &target)?);
    }
    let brute = brute_force_measurement_opt(p, grid)?;
    let closed = gap.rate_value;
    let pass = p > 0.0
        && p < 1.0
        && (lqicc.rate - closed).abs() < PROTOCOL_RATE_TOL
        && (licc.rate - closed).abs() < PROTOCOL_RATE_TOL
        && max_state_distance < PROTOCOL_STATE_TOL
        && (brute.rate - closed).abs() < BRUTE_FORCE_TOL
        && brute.rate <= closed + CHAIN_TOL
        && gap.gap > 0.0;
    Ok(Theorem4Row {
        p,
        qi: gap.qi_value,
        closed_form_rate: closed,
        lqicc_rate: lqicc.rate,
        licc_rate: licc.rate,
        max_state_distance,
        brute_force_rate: brute.rate,
        gap: gap.gap,
        curvature: gap.curvature(),
        pass,
    })
}

/// For each `p`: both protocols reach the closed-form rate with exact target
/// states, brute force over projective measurements does no better, and the
/// gap to the QI relative entropy is strictly positive.
pub fn check_theorem4(p_grid: &[f64], grid: AngularGrid) -> Result<Theorem4Report> {
    let rows = p_grid
        .iter()
        .map(|&p| theorem4_row(p, grid))
        .collect::<Result<Vec<_>>>()?;
    let pass = rows.iter().all(|r| r.pass);
    Ok(Theorem4Report { rows, pass })
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub c_re_b: f64,
    pub rate: f64,
    pub qi: f64,
    pub pass: bool,
}

/// `C_re(ρ^B) ≤ rate ≤ C_re^{A|B}(ρ)` within [`CHAIN_TOL`].
pub fn check_chain(rho: &DensityMatrix, achieved_rate: f64) -> Result<ChainReport> {
    let c_re_b = c_re(&partial_trace(rho, Subsystem::B)?)?;
    let qi = qi_relative_entropy(rho)?;
    let pass = c_re_b <= achieved_rate + CHAIN_TOL && achieved_rate <= qi + CHAIN_TOL;
    Ok(ChainReport {
        c_re_b,
        rate: achieved_rate,
        qi,
        pass,
    })
}

/// One row of a Werner parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRecord {
    pub p: f64,
    pub qi: f64,
    pub rate: f64,
    pub gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brute_force_rate: Option<f64>,
    pub pass: bool,
}

/// Closed-form values on `steps` uniformly spaced points of `[p_from, p_to]`.
pub fn figure_data(p_from: f64, p_to: f64, steps: usize) -> Result<Vec<ScanRecord>> {
    if !(0.0 <= p_from && p_from < p_to && p_to <= 1.0) || steps < 2 {
        return Err(Error::OutOfRange(format!(
            "need 0 <= from < to <= 1 and steps >= 2, got [{p_from}, {p_to}] with {steps} steps"
        )));
    }
    (0..steps)
        .map(|k| {
            let p = if k == steps - 1 {
                p_to
            } else {
                p_from + (p_to - p_from) * k as f64 / (steps - 1) as f64
            };
            let g = gap_analysis(p)?;
            let pass = g.rate_value >= -CHAIN_TOL
                && g.rate_value <= g.qi_value + CHAIN_TOL
                && g.qi_value <= 2.0;
            Ok(ScanRecord {
                p,
                qi: g.qi_value,
                rate: g.rate_value,
                gap: g.gap,
                brute_force_rate: None,
                pass,
            })
        })
        .collect()
}

/// A named pass/fail line from one of the verification suites.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, pass: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            pass,
            detail,
        }
    }
}

/// `1/2 |0⟩⟨0| ⊗ |+⟩⟨+| + 1/2 |1⟩⟨1| ⊗ |0⟩⟨0|`: B parts overlap, so discord is positive.
pub fn overlapping_control_state() -> DensityMatrix {
    let k0 = pure_state(&[ONE, ZERO]).expect("nonzero");
    let k1 = pure_state(&[ZERO, ONE]).expect("nonzero");
    let a = tensor(&k0, &maximally_coherent_qubit());
    let b = tensor(&k1, &k0);
    mixture(&[0.5, 0.5], &[a, b]).expect("valid mixture")
}

/// `ρ^A ⊗ |+⟩⟨+|` with `ρ^A = |0⟩⟨0|`.
pub fn product_plus_spec() -> ZeroDiscordSpec {
    ZeroDiscordSpec {
        weights: vec![1.0],
        a_states: vec![pure_state(&[ONE, ZERO]).expect("nonzero")],
        b_blocks: vec![BBlock::embed(vec![0, 1], &maximally_coherent_qubit(), 2).expect("in range")],
    }
}

/// Qubit ⊗ qutrit: block {0,1} holds `|+⟩`, block {2} holds `|2⟩`.
pub fn two_block_qutrit_spec() -> ZeroDiscordSpec {
    let plus = maximally_coherent_qubit();
    let two = pure_state(&[ONE]).expect("nonzero");
    ZeroDiscordSpec {
        weights: vec![0.6, 0.4],
        a_states: vec![pure_state(&[ONE, ZERO]).expect("nonzero"), plus.clone()],
        b_blocks: vec![
            BBlock::embed(vec![0, 1], &plus, 3).expect("in range"),
            BBlock::embed(vec![2], &two, 3).expect("in range"),
        ],
    }
}

fn theorem3_line(name: &str, r: &Theorem3Report, expect_pass: bool) -> CheckOutcome {
    CheckOutcome::new(
        name,
        r.pass == expect_pass,
        format!(
            "discord={:.3e} discord_mi={:.3e} qi={:.6} c_re_b={:.6}{}",
            r.discord,
            r.discord_mutual_info,
            r.qi,
            r.c_re_b,
            if expect_pass {
                ""
            } else {
                " (expected to fail)"
            }
        ),
    )
}

/// Werner states with `p ≥ 0.1` must fail the zero-discord check.
pub const WERNER_CONTROL_PS: [f64; 4] = [0.1, 0.4, 0.7, 1.0];

/// Fixed zero-discord examples plus the Werner negative controls.
pub fn suite_theorem3() -> Result<Vec<CheckOutcome>> {
    let mut out = vec![
        theorem3_line(
            "theorem3/product_plus",
            &check_theorem3(&product_plus_spec())?,
            true,
        ),
        theorem3_line(
            "theorem3/two_block_qutrit",
            &check_theorem3(&two_block_qutrit_spec())?,
            true,
        ),
    ];
    for p in WERNER_CONTROL_PS {
        let r = check_zero_discord(&werner(p)?)?;
        out.push(theorem3_line(
            &format!("theorem3/werner_control p={p:.1}"),
            &r,
            false,
        ));
    }
    Ok(out)
}

pub const LEMMA1_CASES: usize = 100;
const LEMMA1_DIMS: [(usize, usize); 4] = [(2, 2), (2, 3), (3, 2), (3, 3)];

/// Seeded random decompositions with disjoint B supports, plus negative
/// controls with overlapping supports and Werner states.
pub fn suite_lemma1(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(LEMMA1_CASES + 2);
    for case in 0..LEMMA1_CASES {
        let (da, db) = LEMMA1_DIMS[case % LEMMA1_DIMS.len()];
        let spec = random::zero_discord_spec(&mut rng, da, db);
        let r = check_theorem3(&spec)?;
        out.push(theorem3_line(
            &format!(
                "lemma1/random#{case:03} {da}x{db} terms={}",
                spec.weights.len()
            ),
            &r,
            true,
        ));
    }
    out.push(theorem3_line(
        "lemma1/overlap_control",
        &check_zero_discord(&overlapping_control_state())?,
        false,
    ));
    out.push(theorem3_line(
        "lemma1/werner_control p=0.5",
        &check_zero_discord(&werner(0.5)?)?,
        false,
    ));
    Ok(out)
}

/// p = 0.1, 0.2, …, 0.9 and the inflection point 1/3.
pub fn theorem4_default_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    g.push(1.0 / 3.0);
    g.sort_by(f64::total_cmp);
    g
}

pub fn suite_theorem4(grid: AngularGrid) -> Result<Vec<CheckOutcome>> {
    let report = check_theorem4(&theorem4_default_grid(), grid)?;
    let mut out: Vec<CheckOutcome> = report
        .rows
        .iter()
        .map(|r| {
            let flag = if r.curvature == Some(Curvature::Inflection) { " inflection" } else { "" };
            CheckOutcome::new(
                format!("theorem4/p={:.6}", r.p),
                r.pass,
                format!(
                    "qi={:.6} rate={:.6} lqicc={:.6} licc={:.6} brute={:.6} gap={:.6} dist={:.1e}{flag}",
                    r.qi, r.closed_form_rate, r.lqicc_rate, r.licc_rate, r.brute_force_rate, r.gap, r.max_state_distance
                ),
            )
        })
        .collect();
    for &p in &[0.1, 0.5, 0.9] {
        let rho = werner(p)?;
        let chain = check_chain(&rho, lqicc_werner_protocol(p)?.rate)?;
        let strict = chain.rate < chain.qi;
        out.push(CheckOutcome::new(
            format!("chain/werner p={p:.1}"),
            chain.pass && strict,
            format!("{:.6} <= {:.6} < {:.6}", chain.c_re_b, chain.rate, chain.qi),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem3_examples() {
        let r = check_theorem3(&product_plus_spec()).unwrap();
        assert!(r.pass);
        assert!((r.qi - 1.0).abs() < 1e-9 && (r.c_re_b - 1.0).abs() < 1e-9);
        assert!(check_theorem3(&two_block_qutrit_spec()).unwrap().pass);
        let mut bad = two_block_qutrit_spec();
        bad.weights = vec![0.5, 0.6];
        assert!(check_theorem3(&bad).is_err());
    }

    #[test]
    fn negative_controls_fail() {
        assert!(
            !check_zero_discord(&overlapping_control_state())
                .unwrap()
                .pass
        );
        for p in WERNER_CONTROL_PS {
            assert!(!check_zero_discord(&werner(p).unwrap()).unwrap().pass);
        }
    }

    #[test]
    fn chain_examples() {
        let w = werner(0.5).unwrap();
        let r = check_chain(&w, lqicc_werner_protocol(0.5).unwrap().rate).unwrap();
        assert!(r.pass && r.c_re_b.abs() < 1e-12 && r.rate < r.qi);

        let rho = zero_discord_state(&two_block_qutrit_spec()).unwrap();
        let trivial = c_re(&partial_trace(&rho, Subsystem::B).unwrap()).unwrap();
        let r = check_chain(&rho, trivial).unwrap();
        assert!(r.pass && (r.qi - r.c_re_b).abs() < 1e-9);

        let diag = tensor(
            &pure_state(&[ONE, ZERO]).unwrap(),
            &DensityMatrix::maximally_mixed(&[2]),
        );
        let r = check_chain(&diag, 0.0).unwrap();
        assert!(r.pass && r.qi.abs() < 1e-12 && r.c_re_b.abs() < 1e-12);
        assert!(!check_chain(&w, 0.3).unwrap().pass);
    }

    #[test]
    fn theorem4_empty_and_small() {
        let empty = check_theorem4(&[], AngularGrid::default()).unwrap();
        assert!(empty.pass && empty.rows.is_empty());
        let r = check_theorem4(&[1.0 / 3.0], AngularGrid::new(41, 8)).unwrap();
        assert!(r.pass);
        assert_eq!(r.rows[0].curvature, Some(Curvature::Inflection));
        assert!((r.rows[0].gap - 0.044_110_417_748_401_1).abs() < 1e-9);
        assert!(!check_theorem4(&[1.0], AngularGrid::new(5, 4)).unwrap().pass);
    }

    #[test]
    fn figure_data_examples() {
        let rows = figure_data(0.0, 1.0, 101).unwrap();
        assert_eq!(rows.len(), 101);
        assert!(rows.iter().all(|r| r.gap >= 0.0 && r.pass));
        assert!(rows[0].gap.abs() < 1e-12 && rows[100].gap.abs() < 1e-12);
        let mid = &rows[50];
        assert_eq!(mid.p, 0.5);
        assert_eq!(
            format!("{:.6},{:.6},{:.6}", mid.qi, mid.rate, mid.gap),
            "0.262483,0.188722,0.073761"
        );
        assert!(figure_data(0.5, 0.5, 10).is_err());
        assert!(figure_data(0.9, 0.1, 10).is_err());
        assert!(figure_data(0.0, 1.0, 1).is_err());
        assert_eq!(
            figure_data(0.2, 0.8, 7).unwrap(),
            figure_data(0.2, 0.8, 7).unwrap()
        );
    }

    #[test]
    fn lemma1_suite_passes() {
        let lines = suite_lemma1(42).unwrap();
        assert_eq!(lines.len(), LEMMA1_CASES + 2);
        for l in &lines {
            assert!(l.pass, "{} {}", l.name, l.detail);
        }
    }

    #[test]
    fn theorem3_suite_passes() {
        assert!(suite_theorem3().unwrap().iter().all(|l| l.pass));
    }
}
