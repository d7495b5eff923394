//! The acceptance suite: ten desk-scale checks that pin every verdict,
//! identity, and tolerance this crate promises. The `selftest` CLI command
//! and the `acceptance` integration-test target both run these functions.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::measure::{recover_measure, AtomicMeasure};
use crate::moment::{
    hankel, is_pd, q_poly_closed, q_poly_sum, q_poly_with_band, second_difference, MomentSequence,
};
use crate::roots::{
    cpd_scaling_witness, random_corpus, random_probability_measure, stampfli_family,
    three_isometry_family, verify_root_3isometry, verify_root_normal, verify_root_quasinormal,
    verify_root_subnormal, CorpusOptions, EvidenceStatus, RootParams,
};
use crate::shift::{
    classify_all, classify_subnormal, classify_subnormal_generic, BergerSpec, ClassStatus,
    ClassWitness, ClassifyParams, EventuallyConstantSpec, ShiftSpec, WeightedShift,
};
use crate::tol::ToleranceConfig;
use crate::triplet::{
    b_n_identity_check, berger_measure, power_transform, reconstruct_moments, recover_triplet,
    subnormality_certificate, ScalarTriplet,
};

/// Configuration of one suite run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AcceptanceConfig {
    pub tol: ToleranceConfig,
    pub params: ClassifyParams,
    pub seed: u64,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig {
            tol: ToleranceConfig::default(),
            params: ClassifyParams::default(),
            seed: 7,
        }
    }
}

/// Result of one criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub millis: u128,
}

impl CriterionOutcome {
    /// One human-readable line: `PASS  3  q-poly-identities  (12 ms): ...`.
    pub fn line(&self) -> String {
        format!(
            "{}  {:2}  {:<22} ({} ms): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.millis,
            self.detail
        )
    }
}

/// Runs the whole suite in order.
pub fn run_all(cfg: &AcceptanceConfig) -> Vec<CriterionOutcome> {
    vec![
        criterion_1_stampfli_bullets(cfg),
        criterion_2_boundary_flip(cfg),
        criterion_3_q_poly_identities(cfg),
        criterion_4_triplet_roundtrip(cfg),
        criterion_5_subnormal_pipeline(cfg),
        criterion_6_power_transform_law(cfg),
        criterion_7_root_harnesses(cfg),
        criterion_8_three_isometry_example(cfg),
        criterion_9_scaling_witness(cfg),
        criterion_10_brute_force_oracle(cfg),
    ]
}

fn outcome(
    id: usize,
    name: &'static str,
    started: Instant,
    result: Result<String, String>,
) -> CriterionOutcome {
    let millis = started.elapsed().as_millis();
    match result {
        Ok(detail) => CriterionOutcome {
            id,
            name,
            passed: true,
            detail,
            millis,
        },
        Err(detail) => CriterionOutcome {
            id,
            name,
            passed: false,
            detail,
            millis,
        },
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn measures_close(a: &AtomicMeasure, b: &AtomicMeasure, tol: f64) -> Result<(), String> {
    if a.atoms().len() != b.atoms().len() {
        return Err(format!(
            "atom counts differ: {} vs {}",
            a.atoms().len(),
            b.atoms().len()
        ));
    }
    for (x, y) in a.atoms().iter().zip(b.atoms()) {
        if (x.node - y.node).abs() > tol * x.node.abs().max(1.0) {
            return Err(format!("nodes differ: {} vs {}", x.node, y.node));
        }
        if (x.mass - y.mass).abs() > tol * x.mass.abs().max(1.0) {
            return Err(format!(
                "masses differ at node {}: {} vs {}",
                x.node, x.mass, y.mass
            ));
        }
    }
    Ok(())
}

/// Criterion 1: the eventually-constant instance with head {1, 0.5} shows
/// the full verdict pattern — normaloid, not subnormal (with a concrete
/// Hankel refutation at small order), not CPD, and a subnormal square — in
/// under a second.
pub fn criterion_1_stampfli_bullets(cfg: &AcceptanceConfig) -> CriterionOutcome {
    let started = Instant::now();
    let result = (|| -> Result<String, String> {
        let instance =
            stampfli_family(2, vec![1.0, 0.5], 1.0).map_err(|e| e.to_string())?;
        let report =
            classify_all(&instance.shift, &cfg.params, &cfg.tol).map_err(|e| e.to_string())?;
        if report.normaloid.status != ClassStatus::ExactTrue {
            return Err(format!("normaloid: {:?}", report.normaloid.status));
        }
        if report.subnormal.status != ClassStatus::ExactFalse {
            return Err(format!("subnormal: {:?}", report.subnormal.status));
        }
        if report.cpd.status != ClassStatus::Refuted {
            return Err(format!("cpd: {:?}", report.cpd.status));
        }
        let generic = classify_subnormal_generic(&instance.shift, &cfg.params, &cfg.tol)
            .map_err(|e| e.to_string())?;
        let Some(ClassWitness::Hankel { witness, .. }) = generic.witness else {
            return Err("generic subnormal branch produced no Hankel witness".into());
        };
        if witness.size > 8 {
            return Err(format!("refutation only at order {}", witness.size));
        }
        let summands = instance.shift.power_decompose(2).map_err(|e| e.to_string())?;
        for (r, summand) in summands.iter().enumerate() {
            let v = classify_subnormal(summand, &cfg.params, &cfg.tol).map_err(|e| e.to_string())?;
            if !v.status.holds() {
                return Err(format!("square summand {r} not subnormal: {:?}", v.status));
            }
        }
        if started.elapsed().as_millis() >= 1000 {
            return Err(format!("took {} ms", started.elapsed().as_millis()));
        }
        Ok(format!(
            "all bullets hold, refutation at hankel order {}",
            witness.size
        ))
    })();
    outcome(1, "stampfli-bullets", started, result)
}

/// Criterion 2: the single-head boundary family flips subnormality exactly
/// at weight 1, with the exact and generic branches agreeing.
pub fn criterion_2_boundary_flip(cfg: &AcceptanceConfig) -> CriterionOutcome {
    let started = Instant::now();
    let result = (|| -> Result<String, String> {
        for (alpha, expect_subnormal) in [(0.9, true), (1.0, true), (1.1, false)] {
            let shift = WeightedShift::new(ShiftSpec::EventuallyConstant(
                EventuallyConstantSpec {
                    head: vec![alpha],
                    tail: 1.0,
                },
            ))
            .map_err(|e| e.to_string())?;
            let exact =
                classify_subnormal(&shift, &cfg.params, &cfg.tol).map_err(|e| e.to_string())?;
            let generic = classify_subnormal_generic(&shift, &cfg.params, &cfg.tol)
                .map_err(|e| e.to_string())?;
            if exact.status.holds() != expect_subnormal {
                return Err(format!(
                    "alpha {alpha}: exact branch gave {:?}",
                    exact.status
                ));
            }
            if generic.status.holds() != expect_subnormal {
                return Err(format!(
                    "alpha {alpha}: generic branch gave {:?}",
                    generic.status
                ));
            }
        }
        Ok("flip at alpha = 1 confirmed by both branches".into())
    })();
    outcome(2, "boundary-flip", started, result)
}

/// Criterion 3: the kernel polynomials satisfy their two defining
/// identities on a grid of [0, 10] including the removable singularity.
pub fn criterion_3_q_poly_identities(cfg: &AcceptanceConfig) -> CriterionOutcome {
    let started = Instant::now();
    let result = (|| -> Result<String, String> {
        let band = cfg.tol.singular_band;
        let mut checked = 0usize;
        for i in 0..=100usize {
            let x = i as f64 / 10.0;
            for n in 0..=40usize {
                let recurrence = q_poly_with_band(n + 2, x, band)
                    - 2.0 * q_poly_with_band(n + 1, x, band)
                    + q_poly_with_band(n, x, band);
                let target = x.powi(n as i32);
                if !rel_close(recurrence, target, 1e-10) {
                    return Err(format!("recurrence fails at n {n}, x {x}: {recurrence} vs {target}"));
                }
                if (x - 1.0).abs() >= band {
                    let closed = q_poly_closed(n, x);
                    let summed = q_poly_sum(n, x);
                    if !rel_close(closed, summed, 1e-10) {
                        return Err(format!(
                            "dual forms disagree at n {n}, x {x}: {closed} vs {summed}"
                        ));
                    }
                }
                checked += 1;
            }
        }
        Ok(format!("{checked} grid points verified"))
    })();
    outcome(3, "q-poly-identities", started, result)
}

const TRIPLET_SALT: u64 = 0x74726970;

/// Random valid triplet: atoms in [0,5] outside (0.9, 1.1), separated for
/// binary64 recoverability, c = 0 half the time, and a reconstructed
/// sequence that stays positive.
fn random_triplet(rng: &mut ChaCha8Rng, tol: &ToleranceConfig) -> (ScalarTriplet, usize) {
    loop {
        let atom_count = rng.gen_range(0..=4usize);
        let c = if rng.gen_bool(0.5) {
            0.0
        } else {
            rng.gen_range(0.0..1.0)
        };
        // When c > 0 the measure M carries an atom at 1, so the separation
        // policy applies around 1 as well.
        let guard_around_one = if c > 0.0 { 0.25 } else { 0.1 };
        let mut nodes: Vec<f64> = Vec::new();
        let mut attempts = 0;
        while nodes.len() < atom_count && attempts < 100 {
            attempts += 1;
            let x: f64 = rng.gen_range(0.0..5.0);
            if (x - 1.0).abs() < guard_around_one {
                continue;
            }
            if nodes.iter().any(|&y| (x - y).abs() < 0.25) {
                continue;
            }
            nodes.push(x);
        }
        let pairs: Vec<(f64, f64)> = nodes
            .iter()
            .map(|&x| (x, rng.gen_range(0.05..5.0)))
            .collect();
        let b = rng.gen_range(-2.0..2.0);
        let f_measure = match AtomicMeasure::from_atoms(pairs, tol.eps_node) {
            Ok(m) => m,
            Err(_) => continue,
        };
        let Ok(t) = ScalarTriplet::new(b, c, f_measure, tol) else {
            continue;
        };
        let atoms = t.f_measure().atoms().len() + usize::from(t.c() > 0.0);
        let order = 2 * atoms + 4;
        let Ok(seq) = reconstruct_moments(&t, order, tol) else {
            continue;
        };
        if seq.values().iter().any(|&v| v <= 1e-9) {
            continue;
        }
        return (t, order);
    }
}

/// Criterion 4: 200 random triplets reconstruct and recover to 1e-6 on every
/// component within five seconds.
pub fn criterion_4_triplet_roundtrip(cfg: &AcceptanceConfig) -> CriterionOutcome {
    let started = Instant::now();
    let result = (|| -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ TRIPLET_SALT);
        for trial in 0..200usize {
            let (t, order) = random_triplet(&mut rng, &cfg.tol);
            let seq = reconstruct_moments(&t, order, &cfg.tol).map_err(|e| e.to_string())?;
            let back = recover_triplet(&seq, &cfg.tol)
                .map_err(|e| format!("trial {trial}: recovery failed: {e}"))?;
            if (back.b() - t.b()).abs() > 1e-6 {
                return Err(format!("trial {trial}: b {} vs {}", back.b(), t.b()));
            }
            if (back.c() - t.c()).abs() > 1e-6 {
                return Err(format!("trial {trial}: c {} vs {}", back.c(), t.c()));
            }
            if let Err(e) = measures_f_close(back.f_measure(), t.f_measure()) {
                return Err(format!("trial {trial}: {e}"));
            }
        }
        if started.elapsed().as_millis() >= 5000 {
            return Err(format!("took {} ms", started.elapsed().as_millis()));
        }
        Ok("200 roundtrips within 1e-6".into())
    })();
    outcome(4, "triplet-roundtrip", started, result)
}

fn measures_f_close(a: &AtomicMeasure, b: &AtomicMeasure) -> Result<(), String> {
    if a.atoms().len() != b.atoms().len() {
        return Err(format!(
            "atom counts differ: {} vs {}",
            a.atoms().len(),
            b.atoms().len()
        ));
    }
    for (x, y) in a.atoms().iter().zip(b.atoms()) {
        if (x.node - y.node).abs() > 1e-6 {
            return Err(format!("nodes differ: {} vs {}", x.node, y.node));
        }
        if (x.mass - y.mass).abs() > 1e-6 {
            return Err(format!("masses differ: {} vs {}", x.mass, y.mass));
        }
    }
    Ok(())
}

const BERGER_SALT: u64 = 0x62657267;

fn berger_corpus(cfg: &AcceptanceConfig, count: usize) -> Vec<(AtomicMeasure, WeightedShift)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ BERGER_SALT);
    let options = CorpusOptions::default();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let measure = random_probability_measure(&mut rng, &options);
        if let Ok(shift) = WeightedShift::new(ShiftSpec::Berger(BergerSpec {
            measure: measure.clone(),
        })) {
            out.push((measure, shift));
        }
    }
    out
}

/// Criterion 5: for 100 Berger-generated shifts the recovered triplet passes
/// the subnormality certificate, reproduces the generating measure to 1e-6,
/// and its Berger measure carries the orbit moments to 1e-8.
pub fn criterion_5_subnormal_pipeline(cfg: &AcceptanceConfig) -> CriterionOutcome {
    let started = Instant::now();
    let result = (|| -> Result<String, String> {
        for (i, (mu, shift)) in berger_corpus(cfg, 100).iter().enumerate() {
            let orbit = shift
                .orbit_moments(0, cfg.params.order)
                .map_err(|e| e.to_string())?;
            let t = recover_triplet(&orbit, &cfg.tol)
                .map_err(|e| format!("shift {i}: triplet recovery failed: {e}"))?;
            let cert = subnormality_certificate(&t, &cfg.tol).map_err(|e| e.to_string())?;
            if !cert.pass {
                return Err(format!("shift {i}: certificate failed: {:?}", cert.first_failing));
            }
            let bm = berger_measure(&t, &cfg.tol).map_err(|e| e.to_string())?;
            measures_close(&bm, mu, 1e-6).map_err(|e| format!("shift {i}: {e}"))?;
            let bm_moments = bm.moments(cfg.params.order).map_err(|e| e.to_string())?;
            for n in 0..=cfg.params.order {
                if !rel_close(bm_moments.get(n), orbit.get(n), 1e-8) {
                    return Err(format!(
                        "shift {i}: moment {n} mismatch: {} vs {}",
                        bm_moments.get(n),
                        orbit.get(n)
                    ));
                }
            }
        }
        Ok("100 pipelines certified".into())
    })();
    outcome(5, "subnormal-pipeline", started, result)
}

/// Criterion 6: the predicted power transform of the recovered triplet
/// matches the measure recovered from the power orbit, and the two routes to
/// the b-component agree, over the same corpus and n in {2, 3}.
pub fn criterion_6_power_transform_law(cfg: &AcceptanceConfig) -> CriterionOutcome {
    let started = Instant::now();
    let result = (|| -> Result<String, String> {
        for (i, (_, shift)) in berger_corpus(cfg, 100).iter().enumerate() {
            let orbit = shift
                .orbit_moments(0, cfg.params.order)
                .map_err(|e| e.to_string())?;
            let t = recover_triplet(&orbit, &cfg.tol).map_err(|e| e.to_string())?;
            for n in [2u32, 3] {
                let predicted = power_transform(&t, n).map_err(|e| e.to_string())?;
                let long = shift
                    .orbit_moments(0, cfg.params.order * n as usize)
                    .map_err(|e| e.to_string())?;
                let stride = long.stride(n as usize).map_err(|e| e.to_string())?;
                let beta = second_difference(&stride).map_err(|e| e.to_string())?;
                let direct = recover_measure(&beta, &cfg.tol)
                    .map_err(|e| format!("shift {i}, n {n}: recovery failed: {e}"))?;
                measures_close(&predicted, &direct, 1e-6)
                    .map_err(|e| format!("shift {i}, n {n}: {e}"))?;
                let residual =
                    b_n_identity_check(&t, n, &cfg.tol).map_err(|e| e.to_string())?;
                if residual > 1e-6 {
                    return Err(format!("shift {i}, n {n}: b_n residual {residual}"));
                }
            }
        }
        Ok("power transforms and b_n identity agree over the corpus".into())
    })();
    outcome(6, "power-transform-law", started, result)
}

/// Criterion 7: no violation over the full corpus and every harness, and the
/// eventually-constant family is vacuous for subnormal roots precisely
/// because the CPD premise is refuted; all inside a minute.
pub fn criterion_7_root_harnesses(cfg: &AcceptanceConfig) -> CriterionOutcome {
    let started = Instant::now();
    let result = (|| -> Result<String, String> {
        let params = RootParams {
            classify: cfg.params,
            ..RootParams::default()
        };
        let corpus = random_corpus(cfg.seed, 500, &CorpusOptions::default());
        let mut evidences = 0usize;
        for (i, shift) in corpus.iter().enumerate() {
            for n in [2u32, 3] {
                let runs = [
                    verify_root_subnormal(shift, n, &params, &cfg.tol),
                    verify_root_quasinormal(shift, n, &params, &cfg.tol),
                    verify_root_normal(shift, n, &params, &cfg.tol),
                    verify_root_3isometry(shift, n, 3, &params, &cfg.tol),
                ];
                for run in runs {
                    let evidence = run.map_err(|e| format!("spec {i}, n {n}: {e}"))?;
                    evidences += 1;
                    if evidence.status == EvidenceStatus::Violation {
                        return Err(format!(
                            "spec {i}, n {n}, theorem {:?}: VIOLATION",
                            evidence.theorem
                        ));
                    }
                }
            }
        }
        let stampfli = stampfli_family(2, vec![1.0, 0.5], 1.0).map_err(|e| e.to_string())?;
        let evidence =
            verify_root_subnormal(&stampfli.shift, 2, &params, &cfg.tol).map_err(|e| e.to_string())?;
        if evidence.status != EvidenceStatus::Vacuous {
            return Err(format!("stampfli instance: {:?}", evidence.status));
        }
        if evidence.premises.cpd.status != ClassStatus::Refuted {
            return Err("stampfli instance: CPD premise not refuted".into());
        }
        if started.elapsed().as_millis() >= 60_000 {
            return Err(format!("took {} ms", started.elapsed().as_millis()));
        }
        Ok(format!("{evidences} evidences, zero violations"))
    })();
    outcome(7, "root-harnesses", started, result)
}

/// Criterion 8: the degree-one polynomial family p(n) = n + 1 realizes a
/// CPD, non-normaloid, non-subnormal 3-isometry whose square root evidence
/// is supported.
pub fn criterion_8_three_isometry_example(cfg: &AcceptanceConfig) -> CriterionOutcome {
    let started = Instant::now();
    let result = (|| -> Result<String, String> {
        let instance = three_isometry_family(vec![1.0, 1.0]).map_err(|e| e.to_string())?;
        let shift = &instance.shift;
        for k in 0..=cfg.params.basis {
            let orbit = shift
                .orbit_moments(k, cfg.params.order)
                .map_err(|e| e.to_string())?;
            let d3 = crate::moment::finite_difference(&orbit, 3).map_err(|e| e.to_string())?;
            let worst = d3.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if worst > 1e-9 {
                return Err(format!("third difference at basis {k} is {worst}"));
            }
        }
        let norm = shift.operator_norm();
        if (norm - 2f64.sqrt()).abs() > 1e-12 {
            return Err(format!("norm {norm} is not sqrt(2)"));
        }
        let report = classify_all(shift, &cfg.params, &cfg.tol).map_err(|e| e.to_string())?;
        let Some(ClassWitness::SpectralGap { radius, .. }) = report.normaloid.witness else {
            return Err("normaloid verdict carries no spectral data".into());
        };
        if radius != 1.0 {
            return Err(format!("spectral radius {radius} is not exactly 1"));
        }
        if report.normaloid.status != ClassStatus::ExactFalse {
            return Err(format!("normaloid: {:?}", report.normaloid.status));
        }
        if report.cpd.status != ClassStatus::ConsistentUpTo {
            return Err(format!("cpd: {:?}", report.cpd.status));
        }
        if report.subnormal.status != ClassStatus::Refuted {
            return Err(format!("subnormal: {:?}", report.subnormal.status));
        }
        let params = RootParams {
            classify: cfg.params,
            ..RootParams::default()
        };
        let evidence =
            verify_root_3isometry(shift, 2, 3, &params, &cfg.tol).map_err(|e| e.to_string())?;
        if evidence.status != EvidenceStatus::Supported {
            return Err(format!("root evidence: {:?}", evidence.status));
        }
        Ok("3-isometry example verified end to end".into())
    })();
    outcome(8, "three-isometry-example", started, result)
}

/// Criterion 9: a 32-point log grid over [0.25, 4] finds a scaling of the
/// polynomial shift whose CPD test is refuted with a verifiable negative
/// Hankel form; Berger-generated shifts never produce one.
pub fn criterion_9_scaling_witness(cfg: &AcceptanceConfig) -> CriterionOutcome {
    let started = Instant::now();
    let result = (|| -> Result<String, String> {
        let grid: Vec<f64> = (0..32)
            .map(|i| 0.25 * 16f64.powf(i as f64 / 31.0))
            .collect();
        let params = RootParams {
            classify: cfg.params,
            ..RootParams::default()
        };
        let instance = three_isometry_family(vec![1.0, 1.0]).map_err(|e| e.to_string())?;
        let hit = cpd_scaling_witness(&instance.shift, &grid, &params, &cfg.tol)
            .map_err(|e| e.to_string())?
            .ok_or("no refuting scale found on the grid")?;
        // Verify the witness against an independently rebuilt Hankel form.
        let scaled = instance.shift.scaled(hit.alpha).map_err(|e| e.to_string())?;
        let orbit = scaled
            .orbit_moments(hit.basis, cfg.params.order)
            .map_err(|e| e.to_string())?;
        let beta = second_difference(&orbit).map_err(|e| e.to_string())?;
        let h = hankel(&beta, hit.witness.offset, hit.witness.size).map_err(|e| e.to_string())?;
        let form = h.quadratic_form(&hit.witness.coefficients);
        if form >= 0.0 {
            return Err(format!("witness form {form} is not negative"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ BERGER_SALT);
        let mu = random_probability_measure(&mut rng, &CorpusOptions::default());
        let berger =
            WeightedShift::new(ShiftSpec::Berger(BergerSpec { measure: mu })).map_err(|e| e.to_string())?;
        if let Some(w) = cpd_scaling_witness(&berger, &grid, &params, &cfg.tol)
            .map_err(|e| e.to_string())?
        {
            return Err(format!(
                "subnormal shift produced a refuting scale {}",
                w.alpha
            ));
        }
        Ok(format!(
            "refuting scale {} with hankel form {:.3e}",
            hit.alpha, form
        ))
    })();
    outcome(9, "scaling-witness", started, result)
}

/// Criterion 10: on every sequence of at most 7 moments with entries in
/// {-2, .., 2}, a dense-grid minimization of the quadratic form never finds
/// a negative direction that the eigenvalue test missed.
pub fn criterion_10_brute_force_oracle(cfg: &AcceptanceConfig) -> CriterionOutcome {
    let started = Instant::now();
    let result = (|| -> Result<String, String> {
        let mut checked = 0usize;
        let mut refutations = 0usize;
        for len in 3..=7usize {
            let total = 5usize.pow(len as u32);
            for code in 0..total {
                let mut values = Vec::with_capacity(len);
                let mut rest = code;
                for _ in 0..len {
                    values.push((rest % 5) as f64 - 2.0);
                    rest /= 5;
                }
                let seq = MomentSequence::new(values).map_err(|e| e.to_string())?;
                let verdict = is_pd(&seq, &cfg.tol).map_err(|e| e.to_string())?;
                if verdict.is_refuted() {
                    refutations += 1;
                }
                if brute_force_negative_direction(&seq, &cfg.tol) && !verdict.is_refuted() {
                    return Err(format!(
                        "grid minimization beats the eigenvalue test on {:?}",
                        seq.values()
                    ));
                }
                checked += 1;
            }
        }
        Ok(format!(
            "{checked} sequences checked, {refutations} refuted, 0 mismatches"
        ))
    })();
    outcome(10, "brute-force-oracle", started, result)
}

/// Independent oracle: dense grid of integer coefficient vectors in
/// {-2, .., 2}^size, normalized, against every feasible plain Hankel
/// section. True when some direction attains a form below the same relative
/// threshold the eigenvalue test uses.
fn brute_force_negative_direction(seq: &MomentSequence, tol: &ToleranceConfig) -> bool {
    let order = seq.order();
    let max_size = order / 2 + 1;
    for size in 1..=max_size {
        let h = match hankel(seq, 0, size) {
            Ok(h) => h,
            Err(_) => continue,
        };
        let threshold = -tol.eps_psd * h.max_abs();
        let total = 5usize.pow(size as u32);
        let mut coeffs = vec![0.0f64; size];
        for code in 1..total {
            let mut rest = code;
            let mut norm2 = 0.0;
            for c in coeffs.iter_mut() {
                *c = (rest % 5) as f64 - 2.0;
                rest /= 5;
                norm2 += *c * *c;
            }
            if norm2 == 0.0 {
                continue;
            }
            if h.quadratic_form(&coeffs) < threshold * norm2 {
                return true;
            }
        }
    }
    false
}
