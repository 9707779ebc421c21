//! Kraus channels, Alice-side local measurements and Bob-side incoherent
//! corrections, plus the two one-round assisted distillation protocols for
//! Werner states.

use serde::Serialize;

use crate::coherence::c_re;
use crate::error::{Error, Result};
use crate::gates;
use crate::linalg::{adjoint, kron, matmul, ComplexMatrix};
use crate::states::{partial_trace, werner, DensityMatrix, Subsystem};

/// Completeness tolerance for `Σ K†K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Entries at or below this modulus count as zero in the incoherence test.
pub const INCOHERENCE_TOL: f64 = 1e-12;
/// Outcomes with probability below this are discarded.
pub const MIN_OUTCOME_PROB: f64 = 1e-14;

/// True iff every column has at most one nonzero entry, i.e. `K|m⟩ ∝ |n⟩`.
pub fn is_incoherent_kraus(k: &ComplexMatrix) -> bool {
    (0..k.cols()).all(|col| {
        (0..k.rows())
            .filter(|&r| k[(r, col)].norm() > INCOHERENCE_TOL)
            .count()
            <= 1
    })
}

#[derive(Debug, Clone)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
    labels: Vec<String>,
}

impl KrausChannel {
    pub fn new(operators: Vec<ComplexMatrix>, labels: Vec<String>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        }
        if labels.len() != operators.len() {
            return Err(Error::InvalidChannel(format!(
                "{} labels for {} operators",
                labels.len(),
                operators.len()
            )));
        }
        let d = operators[0].rows();
        if operators.iter().any(|k| k.rows() != d || k.cols() != d) {
            return Err(Error::InvalidChannel(
                "Kraus operators must share one square shape".into(),
            ));
        }
        let sum = completeness_sum(&operators)?;
        let dev = sum
            .max_abs_diff(&ComplexMatrix::identity(d))
            .unwrap_or(f64::INFINITY);
        if dev > COMPLETENESS_TOL {
            return Err(Error::InvalidChannel(format!(
                "Σ K†K deviates from I by {dev:e}"
            )));
        }
        Ok(Self { operators, labels })
    }

    /// Labels default to "1", "2", ...
    pub fn from_operators(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let labels = (1..=operators.len()).map(|i| i.to_string()).collect();
        Self::new(operators, labels)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            operators: vec![ComplexMatrix::identity(dim)],
            labels: vec!["id".into()],
        }
    }

    /// Alice's X-basis measurement, outcomes "+1" and "-1".
    pub fn x_basis() -> Self {
        let [plus, minus] = gates::x_basis_projectors();
        Self::new(vec![plus, minus], vec!["+1".into(), "-1".into()]).expect("complete")
    }

    pub fn z_basis() -> Self {
        let [zero, one] = gates::z_basis_projectors();
        Self::new(vec![zero, one], vec!["0".into(), "1".into()]).expect("complete")
    }

    /// The two-outcome erasing measurement `{K₁, K₂}`.
    pub fn erasing() -> Self {
        Self::new(
            vec![gates::erasing_kraus_1(), gates::erasing_kraus_2()],
            vec!["1".into(), "2".into()],
        )
        .expect("complete")
    }

    /// Projective measurement along the Bloch direction `(theta, phi)`.
    pub fn projective(theta: f64, phi: f64) -> Self {
        let [up, down] = gates::projective_pair(theta, phi);
        Self {
            operators: vec![up, down],
            labels: vec!["+n".into(), "-n".into()],
        }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }

    pub fn is_incoherent(&self) -> bool {
        self.operators.iter().all(is_incoherent_kraus)
    }
}

/// `Σ_l K_l† K_l`.
pub fn completeness_sum(operators: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let d = operators.first().map_or(1, ComplexMatrix::cols);
    let mut acc = ComplexMatrix::zeros(d, d);
    for k in operators {
        acc = acc.add(&matmul(&adjoint(k), k)?)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
pub struct EnsembleItem {
    pub label: String,
    pub probability: f64,
    pub state: DensityMatrix,
}

/// Probability-weighted conditional states, one per retained outcome.
#[derive(Debug, Clone)]
pub struct Ensemble {
    items: Vec<EnsembleItem>,
}

impl Ensemble {
    pub fn new(items: Vec<EnsembleItem>) -> Result<Self> {
        if items
            .iter()
            .any(|it| it.probability.is_nan() || it.probability < 0.0)
        {
            return Err(Error::InvalidState("negative outcome probability".into()));
        }
        let total: f64 = items.iter().map(|it| it.probability).sum();
        if (total - 1.0).abs() > COMPLETENESS_TOL {
            return Err(Error::InvalidState(format!(
                "outcome probabilities sum to {total}"
            )));
        }
        if let Some(first) = items.first() {
            if items.iter().any(|it| it.state.dims() != first.state.dims()) {
                return Err(Error::DimensionMismatch(
                    "ensemble members differ in dimension".into(),
                ));
            }
        }
        Ok(Self { items })
    }

    pub fn single(state: DensityMatrix) -> Self {
        Self {
            items: vec![EnsembleItem {
                label: "id".into(),
                probability: 1.0,
                state,
            }],
        }
    }

    pub fn items(&self) -> &[EnsembleItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Alice applies `channel` to subsystem A; returns Bob's normalised
/// conditional states with their outcome probabilities.
#[allow(non_snake_case)]
pub fn measure_local_A(rho: &DensityMatrix, channel: &KrausChannel) -> Result<Ensemble> {
    let (da, db) = rho.bipartite_dims()?;
    if channel.dim() != da {
        return Err(Error::DimensionMismatch(format!(
            "channel acts on dimension {} but subsystem A has dimension {da}",
            channel.dim()
        )));
    }
    let id_b = ComplexMatrix::identity(db);
    let mut items = Vec::with_capacity(channel.operators.len());
    for (k, label) in channel.operators.iter().zip(&channel.labels) {
        let full = kron(k, &id_b);
        let post = rho.matrix().conjugate_by(&full)?;
        let q = post.trace().re;
        if q < MIN_OUTCOME_PROB {
            continue;
        }
        let unnormalised =
            DensityMatrix::from_parts_unchecked(post.scale_real(1.0 / q), vec![da, db]);
        let bob = partial_trace(&unnormalised, Subsystem::B)?;
        items.push(EnsembleItem {
            label: label.clone(),
            probability: q,
            state: bob,
        });
    }
    Ensemble::new(items)
}

/// Applies `gates[i]` to the i-th ensemble member. Every gate must be an
/// incoherent unitary.
pub fn apply_correction(e: &Ensemble, gates: &[ComplexMatrix]) -> Result<Ensemble> {
    if gates.len() != e.items.len() {
        return Err(Error::InvalidGate(format!(
            "{} gates for {} outcomes",
            gates.len(),
            e.items.len()
        )));
    }
    let items = e
        .items
        .iter()
        .zip(gates)
        .map(|(it, g)| {
            validate_gate(g)?;
            Ok(EnsembleItem {
                label: it.label.clone(),
                probability: it.probability,
                state: it.state.evolve(g)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ensemble { items })
}

fn validate_gate(g: &ComplexMatrix) -> Result<()> {
    if !g.is_unitary(1e-10) {
        return Err(Error::InvalidGate(format!("not unitary: {g:?}")));
    }
    if !is_incoherent_kraus(g) {
        return Err(Error::InvalidGate(format!("gate creates coherence: {g:?}")));
    }
    Ok(())
}

/// `Σ_i q_i C_re(ρ_i)`: the rate Bob reaches by distilling each flagged branch
/// separately.
pub fn ensemble_rate(e: &Ensemble) -> Result<f64> {
    e.items
        .iter()
        .map(|it| Ok(it.probability * c_re(&it.state)?))
        .sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct TranscriptEntry {
    pub outcome: String,
    pub probability: f64,
    pub correction: String,
}

#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub ensemble: Ensemble,
    pub rate: f64,
    pub transcript: Vec<TranscriptEntry>,
}

fn run_protocol(
    p: f64,
    channel: &KrausChannel,
    corrections: &[(&str, &str, ComplexMatrix)],
) -> Result<ProtocolResult> {
    let rho = werner(p)?;
    let raw = measure_local_A(&rho, channel)?;
    let mut gates = Vec::with_capacity(raw.len());
    let mut transcript = Vec::with_capacity(raw.len());
    for item in raw.items() {
        let (_, name, gate) = corrections
            .iter()
            .find(|(label, _, _)| *label == item.label)
            .ok_or_else(|| {
                Error::InvalidGate(format!("no correction for outcome {}", item.label))
            })?;
        gates.push(gate.clone());
        transcript.push(TranscriptEntry {
            outcome: item.label.clone(),
            probability: item.probability,
            correction: (*name).to_string(),
        });
    }
    let ensemble = apply_correction(&raw, &gates)?;
    let rate = ensemble_rate(&ensemble)?;
    Ok(ProtocolResult {
        ensemble,
        rate,
        transcript,
    })
}

/// Alice measures in the X basis; on outcome −1 Bob applies Z.
pub fn lqicc_werner_protocol(p: f64) -> Result<ProtocolResult> {
    run_protocol(
        p,
        &KrausChannel::x_basis(),
        &[
            ("+1", "I", ComplexMatrix::identity(2)),
            ("-1", "Z", gates::pauli_z()),
        ],
    )
}

/// Alice performs the erasing measurement; Bob applies X followed by
/// `diag(1, −i)` on outcome 1 and X followed by `diag(1, i)` on outcome 2.
pub fn licc_erasing_protocol(p: f64) -> Result<ProtocolResult> {
    let x = gates::pauli_x();
    let fix1 = matmul(&gates::phase_s_dagger(), &x)?;
    let fix2 = matmul(&gates::phase_s(), &x)?;
    run_protocol(
        p,
        &KrausChannel::erasing(),
        &[("1", "S_dag*X", fix1), ("2", "S*X", fix2)],
    )
}

/// Bob's target state `p|+⟩⟨+| + (1−p)I/2`.
pub fn werner_target_state(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("p = {p} outside [0, 1]")));
    }
    crate::states::bloch_qubit(crate::states::BlochVector::new(p, 0.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, trace_distance, I, ONE, ZERO};
    use crate::states::{pure_state, random, tensor};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rate_closed_form(p: f64) -> f64 {
        let t = |x: f64| if x > 0.0 { x * x.log2() } else { 0.0 };
        0.5 * t(1.0 + p) + 0.5 * t(1.0 - p)
    }

    #[test]
    fn incoherence_test_examples() {
        assert!(is_incoherent_kraus(&gates::pauli_z()));
        assert!(!is_incoherent_kraus(&gates::hadamard()));
        assert!(is_incoherent_kraus(&gates::erasing_kraus_1()));
        assert!(is_incoherent_kraus(&gates::erasing_kraus_2()));
        assert!(is_incoherent_kraus(&gates::pauli_x()));
    }

    #[test]
    fn erasing_completeness() {
        let sum = completeness_sum(&[gates::erasing_kraus_1(), gates::erasing_kraus_2()]).unwrap();
        assert!(sum.approx_eq(&ComplexMatrix::identity(2), 1e-15));
        assert!(KrausChannel::erasing().is_incoherent());
        assert!(!KrausChannel::x_basis().is_incoherent());
    }

    #[test]
    fn channel_validation() {
        assert!(KrausChannel::from_operators(vec![gates::erasing_kraus_1()]).is_err());
        assert!(KrausChannel::from_operators(vec![]).is_err());
        assert!(KrausChannel::new(vec![ComplexMatrix::identity(2)], vec![]).is_err());
    }

    #[test]
    fn z_measurement_on_werner() {
        let p = 0.6;
        let e = measure_local_A(&werner(p).unwrap(), &KrausChannel::z_basis()).unwrap();
        assert_eq!(e.len(), 2);
        let want = [
            ComplexMatrix::diag(&[c((1.0 + p) / 2.0, 0.0), c((1.0 - p) / 2.0, 0.0)]),
            ComplexMatrix::diag(&[c((1.0 - p) / 2.0, 0.0), c((1.0 + p) / 2.0, 0.0)]),
        ];
        for (it, w) in e.items().iter().zip(&want) {
            assert!((it.probability - 0.5).abs() < 1e-15);
            assert!(it.state.matrix().approx_eq(w, 1e-15));
        }
        assert!(ensemble_rate(&e).unwrap().abs() < 1e-12);
    }

    #[test]
    fn x_measurement_plus_outcome_steers_target() {
        let p = 0.35;
        let e = measure_local_A(&werner(p).unwrap(), &KrausChannel::x_basis()).unwrap();
        let plus = &e.items()[0];
        assert_eq!(plus.label, "+1");
        assert!(trace_distance(&plus.state, &werner_target_state(p).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn product_state_is_not_steered() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random::full_rank(&mut rng, &[2]);
        let b = random::full_rank(&mut rng, &[3]);
        let ab = tensor(&a, &b);
        for ch in [
            KrausChannel::x_basis(),
            KrausChannel::erasing(),
            KrausChannel::projective(0.4, 1.9),
        ] {
            let e = measure_local_A(&ab, &ch).unwrap();
            let total: f64 = e.items().iter().map(|it| it.probability).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for it in e.items() {
                assert!(it.state.matrix().approx_eq(b.matrix(), 1e-12));
            }
        }
    }

    #[test]
    fn measurement_dimension_mismatch() {
        let rho = crate::states::random::full_rank(&mut ChaCha8Rng::seed_from_u64(2), &[3, 2]);
        assert!(measure_local_A(&rho, &KrausChannel::x_basis()).is_err());
        assert!(
            measure_local_A(&pure_state(&[ONE, ZERO]).unwrap(), &KrausChannel::x_basis()).is_err()
        );
    }

    #[test]
    fn correction_examples() {
        let p = 0.5;
        let target = werner_target_state(p).unwrap();
        let minus =
            crate::states::bloch_qubit(crate::states::BlochVector::new(-p, 0.0, 0.0)).unwrap();
        let e = Ensemble::new(vec![EnsembleItem {
            label: "-1".into(),
            probability: 1.0,
            state: minus,
        }])
        .unwrap();
        let same = apply_correction(&e, &[ComplexMatrix::identity(2)]).unwrap();
        assert_eq!(same.items()[0].state, e.items()[0].state);
        let fixed = apply_correction(&e, &[gates::pauli_z()]).unwrap();
        assert!(trace_distance(&fixed.items()[0].state, &target).unwrap() < 1e-15);

        // (i|0⟩ + |1⟩)/√2 branch, X then diag(1, −i)
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let pure1 = pure_state(&[I * s, c(s, 0.0)]).unwrap();
        let rho1 = crate::states::mixture(
            &[p, 1.0 - p],
            &[pure1, DensityMatrix::maximally_mixed(&[2])],
        )
        .unwrap();
        let e1 = Ensemble::single(rho1);
        let gate = matmul(&gates::phase_s_dagger(), &gates::pauli_x()).unwrap();
        let fixed = apply_correction(&e1, &[gate]).unwrap();
        assert!(trace_distance(&fixed.items()[0].state, &target).unwrap() < 1e-15);
    }

    #[test]
    fn coherence_creating_gates_are_rejected() {
        let e = Ensemble::single(DensityMatrix::maximally_mixed(&[2]));
        assert!(matches!(
            apply_correction(&e, &[gates::hadamard()]),
            Err(Error::InvalidGate(_))
        ));
        let not_unitary = ComplexMatrix::diag(&[ONE, c(0.5, 0.0)]);
        assert!(matches!(
            apply_correction(&e, &[not_unitary]),
            Err(Error::InvalidGate(_))
        ));
        assert!(apply_correction(&e, &[]).is_err());
    }

    #[test]
    fn ensemble_rate_examples() {
        let t = werner_target_state(0.5).unwrap();
        assert!(
            (ensemble_rate(&Ensemble::single(t.clone())).unwrap() - c_re(&t).unwrap()).abs()
                < 1e-15
        );
        let pair = Ensemble::new(vec![
            EnsembleItem {
                label: "a".into(),
                probability: 0.5,
                state: t.clone(),
            },
            EnsembleItem {
                label: "b".into(),
                probability: 0.5,
                state: t,
            },
        ])
        .unwrap();
        assert!((ensemble_rate(&pair).unwrap() - 0.188_721_875_540_867_17).abs() < 1e-12);
        let diag = Ensemble::single(pure_state(&[ZERO, ONE]).unwrap());
        assert_eq!(ensemble_rate(&diag).unwrap(), 0.0);
    }

    #[test]
    fn lqicc_protocol_values() {
        for (p, want) in [(0.5, 0.188_721_875_540_867_17), (1.0, 1.0), (0.0, 0.0)] {
            let r = lqicc_werner_protocol(p).unwrap();
            assert!((r.rate - want).abs() < 1e-12, "p={p}: {}", r.rate);
            assert_eq!(r.ensemble.len(), 2);
            for it in r.ensemble.items() {
                assert!((it.probability - 0.5).abs() < 1e-15);
            }
            assert_eq!(r.transcript[1].correction, "Z");
        }
    }

    #[test]
    fn licc_protocol_values() {
        let r = licc_erasing_protocol(0.5).unwrap();
        assert!((r.rate - 0.188_721_875_540_867_17).abs() < 1e-12);
        assert!((r.rate - lqicc_werner_protocol(0.5).unwrap().rate).abs() < 1e-12);
        assert!((licc_erasing_protocol(1.0).unwrap().rate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn licc_raw_outcome_two_at_p_one() {
        let raw = measure_local_A(&werner(1.0).unwrap(), &KrausChannel::erasing()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = pure_state(&[-I * s, c(s, 0.0)]).unwrap();
        assert_eq!(raw.items()[1].label, "2");
        assert!(raw.items()[1]
            .state
            .matrix()
            .approx_eq(want.matrix(), 1e-15));
    }

    #[test]
    fn protocols_agree_across_p() {
        for k in 0..100 {
            let p = (k as f64 + 0.5) / 100.0;
            let a = lqicc_werner_protocol(p).unwrap().rate;
            let b = licc_erasing_protocol(p).unwrap().rate;
            assert!((a - b).abs() < 1e-12, "p={p}");
            assert!((a - rate_closed_form(p)).abs() < 1e-10);
        }
    }

    #[test]
    fn doing_nothing_keeps_marginal_coherence() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let rho = random::full_rank(&mut rng, &[2, 2]);
            let e = measure_local_A(&rho, &KrausChannel::identity(2)).unwrap();
            let marginal = partial_trace(&rho, Subsystem::B).unwrap();
            assert!(ensemble_rate(&e).unwrap() >= c_re(&marginal).unwrap() - 1e-9);
        }
    }
}
