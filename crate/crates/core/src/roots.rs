//! Harnesses for the nth-root class-invariance statements, the two example
//! families, the scaling search, and the randomized spec corpus.
//!
//! Each harness evaluates the premises (the base shift passes the CPD test,
//! and every orthogonal summand of `T^n` belongs to the target class) and the
//! conclusion (the base shift belongs to the class). `Supported` needs both;
//! `Vacuous` records that a premise failed; `Violation` — premises hold but
//! the conclusion is refuted — is a test failure by definition: the
//! statements are proved, so a violation always indicates a numerical or
//! logic bug, never a discovery.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{recover_measure, AtomicMeasure};
use crate::moment::second_difference;
use crate::shift::{
    classify_cpd, classify_m_isometry, classify_normal, classify_quasinormal, classify_subnormal,
    BergerSpec, ClassStatus, ClassVerdict, ClassifyParams, EventuallyConstantSpec, PolySpec,
    ShiftSpec, WeightedShift,
};
use crate::tol::{ToleranceConfig, DEFAULT_EPS_NODE};

/// Which root statement a harness exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootTheorem {
    #[serde(rename = "subnormal")]
    Subnormal,
    #[serde(rename = "quasinormal")]
    Quasinormal,
    #[serde(rename = "normal")]
    Normal,
    #[serde(rename = "3isometry")]
    ThreeIsometry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceStatus {
    Supported,
    Vacuous,
    Violation,
}

/// Premise verdicts: CPD of the base shift and the class verdict of every
/// orthogonal summand of the power.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Premises {
    pub cpd: ClassVerdict,
    pub power_summands: Vec<ClassVerdict>,
}

/// Conclusion verdicts: the class of the base shift, plus the optional
/// proof-mechanism checks of the 3-isometry harness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conclusion {
    pub class: ClassVerdict,
    /// Each summand is itself a 3-isometry (intermediate step; on by default).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summand_three_isometry: Option<Vec<ClassVerdict>>,
    /// Support of the recovered second-difference measure stays near 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_measure_support: Option<SupportCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportCheck {
    pub band: f64,
    pub max_deviation: f64,
    pub within_band: bool,
}

/// One harness run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootEvidence {
    pub theorem: RootTheorem,
    pub n: u32,
    pub premises: Premises,
    pub conclusion: Conclusion,
    pub status: EvidenceStatus,
}

/// Parameters shared by the harnesses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootParams {
    pub classify: ClassifyParams,
    /// Radius around 1 allowed for the recovered measure support check.
    pub support_band: f64,
    /// Also assert the intermediate claim that each summand of the power is
    /// a 3-isometry.
    pub check_intermediate: bool,
}

impl Default for RootParams {
    fn default() -> Self {
        RootParams {
            classify: ClassifyParams::default(),
            support_band: 1e-6,
            check_intermediate: true,
        }
    }
}

fn evidence_status(premises: &Premises, conclusion: &Conclusion) -> EvidenceStatus {
    let premises_hold = premises.cpd.status.holds()
        && premises.power_summands.iter().all(|v| v.status.holds());
    if !premises_hold {
        return EvidenceStatus::Vacuous;
    }
    let mut conclusion_holds = conclusion.class.status.holds();
    if let Some(steps) = &conclusion.summand_three_isometry {
        conclusion_holds &= steps.iter().all(|v| v.status.holds());
    }
    if let Some(support) = &conclusion.orbit_measure_support {
        conclusion_holds &= support.within_band;
    }
    if conclusion_holds {
        EvidenceStatus::Supported
    } else {
        EvidenceStatus::Violation
    }
}

fn root_harness(
    theorem: RootTheorem,
    shift: &WeightedShift,
    n: u32,
    params: &RootParams,
    tol: &ToleranceConfig,
    classify: impl Fn(&WeightedShift) -> Result<ClassVerdict>,
) -> Result<RootEvidence> {
    if n < 2 {
        return Err(Error::InvalidShift("root power must be at least 2".into()));
    }
    let cpd = classify_cpd(shift, &params.classify, tol)?;
    let summands = shift.power_decompose(n)?;
    let mut power_summands = Vec::with_capacity(summands.len());
    for summand in &summands {
        power_summands.push(classify(summand)?);
    }
    let premises = Premises {
        cpd,
        power_summands,
    };
    let conclusion = Conclusion {
        class: classify(shift)?,
        summand_three_isometry: None,
        orbit_measure_support: None,
    };
    let status = evidence_status(&premises, &conclusion);
    Ok(RootEvidence {
        theorem,
        n,
        premises,
        conclusion,
        status,
    })
}

/// CPD shift whose power is subnormal must itself be subnormal.
pub fn verify_root_subnormal(
    shift: &WeightedShift,
    n: u32,
    params: &RootParams,
    tol: &ToleranceConfig,
) -> Result<RootEvidence> {
    root_harness(RootTheorem::Subnormal, shift, n, params, tol, |t| {
        classify_subnormal(t, &params.classify, tol)
    })
}

/// CPD shift whose power is quasinormal must itself be quasinormal.
pub fn verify_root_quasinormal(
    shift: &WeightedShift,
    n: u32,
    params: &RootParams,
    tol: &ToleranceConfig,
) -> Result<RootEvidence> {
    root_harness(RootTheorem::Quasinormal, shift, n, params, tol, |t| {
        classify_quasinormal(t, &params.classify, tol)
    })
}

/// CPD shift whose power is normal must itself be normal. Weighted shifts
/// are never normal, so the premise always fails; the harness records the
/// vacuity explicitly rather than skipping the statement.
pub fn verify_root_normal(
    shift: &WeightedShift,
    n: u32,
    params: &RootParams,
    tol: &ToleranceConfig,
) -> Result<RootEvidence> {
    root_harness(RootTheorem::Normal, shift, n, params, tol, |t| {
        classify_normal(t, &params.classify, tol)
    })
}

/// CPD shift whose power is an m-isometry must be a 3-isometry.
///
/// Also checks the proof mechanism when enabled: every summand of the power
/// is itself a 3-isometry, and the recovered second-difference measure of
/// every base orbit is supported inside a band around 1.
pub fn verify_root_3isometry(
    shift: &WeightedShift,
    n: u32,
    m: usize,
    params: &RootParams,
    tol: &ToleranceConfig,
) -> Result<RootEvidence> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidShift(
            "root power and isometry order must be at least 2".into(),
        ));
    }
    let cpd = classify_cpd(shift, &params.classify, tol)?;
    let summands = shift.power_decompose(n)?;
    let mut power_summands = Vec::with_capacity(summands.len());
    for summand in &summands {
        power_summands.push(classify_m_isometry(summand, m, &params.classify, tol)?);
    }
    let premises = Premises {
        cpd,
        power_summands,
    };

    let class = classify_m_isometry(shift, 3, &params.classify, tol)?;
    let premises_hold = premises.cpd.status.holds()
        && premises.power_summands.iter().all(|v| v.status.holds());

    let mut summand_three_isometry = None;
    let mut orbit_measure_support = None;
    if premises_hold {
        if params.check_intermediate {
            let mut steps = Vec::with_capacity(summands.len());
            for summand in &summands {
                steps.push(classify_m_isometry(summand, 3, &params.classify, tol)?);
            }
            summand_three_isometry = Some(steps);
        }
        // Proof mechanism: supp(M) must collapse onto {1}. Differences at
        // the rounding floor of the orbit mean the zero measure.
        let mut max_deviation = 0.0f64;
        for k in 0..=params.classify.basis {
            let orbit = shift.orbit_moments(k, params.classify.order)?;
            let beta = second_difference(&orbit)?;
            if beta.max_abs() <= tol.eps_psd * orbit.max_abs() {
                continue;
            }
            let measure = recover_measure(&beta, tol)?;
            for atom in measure.atoms() {
                max_deviation = max_deviation.max((atom.node - 1.0).abs());
            }
        }
        orbit_measure_support = Some(SupportCheck {
            band: params.support_band,
            max_deviation,
            within_band: max_deviation <= params.support_band,
        });
    }

    let conclusion = Conclusion {
        class,
        summand_three_isometry,
        orbit_measure_support,
    };
    let status = evidence_status(&premises, &conclusion);
    Ok(RootEvidence {
        theorem: RootTheorem::ThreeIsometry,
        n,
        premises,
        conclusion,
        status,
    })
}

/// Expected structural verdicts attached to an example-family instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedVerdicts {
    pub normaloid: ClassStatus,
    pub cpd: ClassStatus,
    pub subnormal: ClassStatus,
    /// Powers T^n are subnormal exactly for n at or above this threshold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subnormal_power_from: Option<u32>,
    /// The shift is a 3-isometry.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub three_isometry: Option<ClassStatus>,
}

/// A family instance: the shift plus its guaranteed verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyInstance {
    pub shift: WeightedShift,
    pub expected: ExpectedVerdicts,
}

/// Eventually-constant family with weights in (0, 1], tail 1, and some
/// interior head weight different from 1: normaloid, not CPD, with `T^n`
/// subnormal exactly for `n >= kappa`.
pub fn stampfli_family(kappa: usize, head: Vec<f64>, tail: f64) -> Result<FamilyInstance> {
    if kappa < 2 {
        return Err(Error::InvalidFamily("kappa must be at least 2".into()));
    }
    if head.len() != kappa {
        return Err(Error::InvalidFamily(format!(
            "head length {} must equal kappa {kappa}",
            head.len()
        )));
    }
    if tail != 1.0 {
        return Err(Error::InvalidFamily("tail must be 1".into()));
    }
    if head.iter().any(|&w| !(w > 0.0 && w <= 1.0)) {
        return Err(Error::InvalidFamily(
            "head weights must lie in (0, 1]".into(),
        ));
    }
    if head.iter().skip(1).all(|&w| w == 1.0) {
        return Err(Error::InvalidFamily(
            "some interior head weight must differ from 1".into(),
        ));
    }
    let shift = WeightedShift::new(ShiftSpec::EventuallyConstant(EventuallyConstantSpec {
        head,
        tail,
    }))?;
    Ok(FamilyInstance {
        shift,
        expected: ExpectedVerdicts {
            normaloid: ClassStatus::ExactTrue,
            cpd: ClassStatus::Refuted,
            subnormal: ClassStatus::ExactFalse,
            subnormal_power_from: Some(kappa as u32),
            three_isometry: None,
        },
    })
}

/// Polynomial family `lambda_n = sqrt(p(n+1)/p(n))`: a non-isometric
/// 3-isometry, CPD, and not normaloid.
pub fn three_isometry_family(p: Vec<f64>) -> Result<FamilyInstance> {
    let shift = WeightedShift::new(ShiftSpec::Poly3iso(PolySpec { p }))
        .map_err(|e| Error::InvalidFamily(e.to_string()))?;
    Ok(FamilyInstance {
        shift,
        expected: ExpectedVerdicts {
            normaloid: ClassStatus::ExactFalse,
            cpd: ClassStatus::ConsistentUpTo,
            subnormal: ClassStatus::Refuted,
            subnormal_power_from: None,
            three_isometry: Some(ClassStatus::ConsistentUpTo),
        },
    })
}

/// A scaling factor whose application breaks the CPD test, with its witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingWitness {
    pub alpha: f64,
    pub basis: usize,
    pub witness: crate::moment::QuadraticWitness,
}

/// Searches a grid of positive scaling factors for one that makes the CPD
/// test refute `alpha T`. Subnormal shifts never yield a witness (every
/// positive multiple stays subnormal); non-subnormal shifts must, on a fine
/// enough grid, because a shift that stays CPD under every positive scaling
/// is subnormal.
pub fn cpd_scaling_witness(
    shift: &WeightedShift,
    alpha_grid: &[f64],
    params: &RootParams,
    tol: &ToleranceConfig,
) -> Result<Option<ScalingWitness>> {
    for &alpha in alpha_grid {
        let scaled = shift.scaled(alpha)?;
        let verdict = classify_cpd(&scaled, &params.classify, tol)?;
        if verdict.status == ClassStatus::Refuted {
            let (basis, witness) = verdict
                .witness
                .and_then(|w| w.into_hankel())
                .expect("cpd refutations carry a hankel witness");
            return Ok(Some(ScalingWitness {
                alpha,
                basis,
                witness,
            }));
        }
    }
    Ok(None)
}

/// Knobs of the random corpus generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorpusOptions {
    pub max_atoms: usize,
    pub node_max: f64,
    /// Nodes avoid this band around 1 so the recovery tolerances stay
    /// attainable in binary64.
    pub node_exclusion: f64,
    pub min_separation: f64,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            max_atoms: 4,
            node_max: 5.0,
            node_exclusion: 0.15,
            min_separation: 0.25,
        }
    }
}

/// Deterministic pseudo-random shift corpus: Berger-generated shifts from
/// small atomic probability measures, eventually-constant instances (both
/// the single-head boundary family and valid multi-head ones), and positive
/// polynomials of degree 1 or 2. Reproducible from the seed.
pub fn random_corpus(seed: u64, count: usize, options: &CorpusOptions) -> Vec<WeightedShift> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let kind = rng.gen_range(0..4u8);
        let shift = match kind {
            0 => random_berger(&mut rng, options),
            1 => random_stampfli(&mut rng),
            2 => random_poly(&mut rng),
            _ => {
                // Boundary family: one head weight around the flip point.
                let alpha = rng.gen_range(0.5..1.3);
                WeightedShift::new(ShiftSpec::EventuallyConstant(EventuallyConstantSpec {
                    head: vec![alpha],
                    tail: 1.0,
                }))
            }
        };
        match shift {
            Ok(s) => out.push(s),
            Err(_) => continue,
        }
    }
    out
}

/// Random atomic probability measure for a Berger-generated shift.
pub fn random_probability_measure(rng: &mut ChaCha8Rng, options: &CorpusOptions) -> AtomicMeasure {
    loop {
        let atoms = rng.gen_range(1..=options.max_atoms);
        let mut nodes: Vec<f64> = Vec::with_capacity(atoms);
        let mut attempts = 0;
        while nodes.len() < atoms && attempts < 200 {
            attempts += 1;
            let x: f64 = rng.gen_range(0.0..options.node_max);
            if (x - 1.0).abs() < options.node_exclusion {
                continue;
            }
            if nodes
                .iter()
                .any(|&y| (x - y) < options.min_separation && (y - x) < options.min_separation)
            {
                continue;
            }
            nodes.push(x);
        }
        if nodes.is_empty() || nodes.iter().all(|&x| x == 0.0) {
            continue;
        }
        let masses: Vec<f64> = (0..nodes.len()).map(|_| rng.gen_range(0.1..10.0)).collect();
        let total: f64 = masses.iter().sum();
        let pairs: Vec<(f64, f64)> = nodes
            .iter()
            .zip(masses.iter())
            .map(|(&x, &m)| (x, m / total))
            .collect();
        if let Ok(mu) = AtomicMeasure::from_atoms(pairs, DEFAULT_EPS_NODE) {
            if mu.max_node().is_some_and(|x| x > 0.0) {
                return mu;
            }
        }
    }
}

fn random_berger(rng: &mut ChaCha8Rng, options: &CorpusOptions) -> Result<WeightedShift> {
    let measure = random_probability_measure(rng, options);
    WeightedShift::new(ShiftSpec::Berger(BergerSpec { measure }))
}

fn random_stampfli(rng: &mut ChaCha8Rng) -> Result<WeightedShift> {
    let kappa = rng.gen_range(2..=4usize);
    let mut head: Vec<f64> = Vec::with_capacity(kappa);
    head.push(rng.gen_range(0.3..=1.0));
    for _ in 1..kappa {
        // Interior weights stay strictly below 1 so the family is valid.
        head.push(rng.gen_range(0.3..0.95));
    }
    Ok(stampfli_family(kappa, head, 1.0)?.shift)
}

fn random_poly(rng: &mut ChaCha8Rng) -> Result<WeightedShift> {
    let degree = rng.gen_range(1..=2u8);
    let c0 = rng.gen_range(0.5..3.0);
    let c1 = rng.gen_range(0.1..2.0);
    let p = if degree == 1 {
        vec![c0, c1]
    } else {
        vec![c0, c1, rng.gen_range(0.1..1.0)]
    };
    WeightedShift::new(ShiftSpec::Poly3iso(PolySpec { p }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::classify_all;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn params() -> RootParams {
        RootParams::default()
    }

    fn berger_two_atoms() -> WeightedShift {
        let measure =
            AtomicMeasure::from_atoms(vec![(1.0, 0.5), (4.0, 0.5)], DEFAULT_EPS_NODE).unwrap();
        WeightedShift::new(ShiftSpec::Berger(BergerSpec { measure })).unwrap()
    }

    fn constant(w: f64) -> WeightedShift {
        WeightedShift::new(ShiftSpec::EventuallyConstant(EventuallyConstantSpec {
            head: vec![],
            tail: w,
        }))
        .unwrap()
    }

    #[test]
    fn subnormal_root_supported_for_berger() {
        let e = verify_root_subnormal(&berger_two_atoms(), 2, &params(), &tol()).unwrap();
        assert_eq!(e.status, EvidenceStatus::Supported);
    }

    #[test]
    fn subnormal_root_vacuous_for_stampfli() {
        let instance = stampfli_family(2, vec![1.0, 0.5], 1.0).unwrap();
        let e = verify_root_subnormal(&instance.shift, 2, &params(), &tol()).unwrap();
        assert_eq!(e.status, EvidenceStatus::Vacuous);
        // The power is subnormal; only the CPD premise fails.
        assert!(e.premises.power_summands.iter().all(|v| v.status.holds()));
        assert_eq!(e.premises.cpd.status, ClassStatus::Refuted);
    }

    #[test]
    fn subnormal_root_supported_for_isometry() {
        let e = verify_root_subnormal(&constant(1.0), 3, &params(), &tol()).unwrap();
        assert_eq!(e.status, EvidenceStatus::Supported);
    }

    #[test]
    fn quasinormal_root_cases() {
        let e = verify_root_quasinormal(&constant(0.7), 3, &params(), &tol()).unwrap();
        assert_eq!(e.status, EvidenceStatus::Supported);

        let head = WeightedShift::new(ShiftSpec::EventuallyConstant(EventuallyConstantSpec {
            head: vec![0.5],
            tail: 1.0,
        }))
        .unwrap();
        let e = verify_root_quasinormal(&head, 2, &params(), &tol()).unwrap();
        assert_eq!(e.status, EvidenceStatus::Vacuous);

        let e = verify_root_quasinormal(&berger_two_atoms(), 2, &params(), &tol()).unwrap();
        assert_eq!(e.status, EvidenceStatus::Vacuous);
    }

    #[test]
    fn normal_root_always_vacuous() {
        for shift in [constant(1.0), berger_two_atoms()] {
            for n in [2u32, 3] {
                let e = verify_root_normal(&shift, n, &params(), &tol()).unwrap();
                assert_eq!(e.status, EvidenceStatus::Vacuous);
            }
        }
    }

    #[test]
    fn three_isometry_root_supported_for_poly() {
        let instance = three_isometry_family(vec![1.0, 1.0]).unwrap();
        let e = verify_root_3isometry(&instance.shift, 2, 3, &params(), &tol()).unwrap();
        assert_eq!(e.status, EvidenceStatus::Supported);
        let support = e.conclusion.orbit_measure_support.unwrap();
        assert!(support.within_band);
        assert!(e.conclusion.summand_three_isometry.is_some());
    }

    #[test]
    fn three_isometry_root_isometry_and_stampfli() {
        let e = verify_root_3isometry(&constant(1.0), 2, 2, &params(), &tol()).unwrap();
        assert_eq!(e.status, EvidenceStatus::Supported);

        let instance = stampfli_family(2, vec![1.0, 0.5], 1.0).unwrap();
        let e = verify_root_3isometry(&instance.shift, 2, 3, &params(), &tol()).unwrap();
        assert_eq!(e.status, EvidenceStatus::Vacuous);
    }

    #[test]
    fn stampfli_family_validation() {
        assert!(stampfli_family(2, vec![1.0, 0.5], 1.0).is_ok());
        assert!(stampfli_family(3, vec![1.0, 0.5, 0.8], 1.0).is_ok());
        assert!(stampfli_family(2, vec![1.0, 1.0], 1.0).is_err());
        assert!(stampfli_family(2, vec![1.0], 1.0).is_err());
        assert!(stampfli_family(2, vec![1.0, 1.2], 1.0).is_err());
    }

    #[test]
    fn three_isometry_family_validation() {
        assert!(three_isometry_family(vec![1.0, 1.0]).is_ok());
        assert!(three_isometry_family(vec![1.0, 0.0, 1.0]).is_ok());
        assert!(three_isometry_family(vec![0.5, -1.0]).is_err());
    }

    #[test]
    fn stampfli_bullets_hold() {
        let instance = stampfli_family(2, vec![1.0, 0.5], 1.0).unwrap();
        let report = classify_all(&instance.shift, &ClassifyParams::default(), &tol()).unwrap();
        assert_eq!(report.normaloid.status, instance.expected.normaloid);
        assert_eq!(report.cpd.status, instance.expected.cpd);
        assert_eq!(report.subnormal.status, instance.expected.subnormal);
    }

    #[test]
    fn scaling_witness_found_for_non_subnormal_poly() {
        let instance = three_isometry_family(vec![1.0, 1.0]).unwrap();
        let grid = [0.5, 0.9, 1.1, 2.0];
        let hit = cpd_scaling_witness(&instance.shift, &grid, &params(), &tol())
            .unwrap()
            .expect("a refuting scale must exist");
        assert_eq!(hit.alpha, 0.5);
        assert!(hit.witness.value < 0.0);
    }

    #[test]
    fn scaling_witness_absent_for_subnormal() {
        let grid = [0.5, 0.9, 1.1, 2.0];
        let hit = cpd_scaling_witness(&berger_two_atoms(), &grid, &params(), &tol()).unwrap();
        assert!(hit.is_none());
        let hit = cpd_scaling_witness(&constant(1.0), &[2.0], &params(), &tol()).unwrap();
        assert!(hit.is_none());
    }

    #[test]
    fn corpus_is_deterministic() {
        let a = random_corpus(42, 3, &CorpusOptions::default());
        let b = random_corpus(42, 3, &CorpusOptions::default());
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        assert!(random_corpus(42, 0, &CorpusOptions::default()).is_empty());
        let c = random_corpus(43, 3, &CorpusOptions::default());
        assert_ne!(a, c);
    }
}
