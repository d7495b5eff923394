//! Unilateral weighted-shift models and per-class verdicts at finite
//! truncation.
//!
//! A shift is described symbolically (eventually-constant weights, weights
//! generated by a Berger probability measure, or the square-root ratio of a
//! positive polynomial) plus a scalar factor, so the family is closed under
//! scaling and under taking powers: `T^n` splits into `n` orthogonal
//! summands that are again shifts of the same three kinds.
//!
//! Classification quantifies over basis vectors only. Orbit sequences of
//! arbitrary vectors are nonnegative combinations of basis orbit sequences,
//! and the tested properties pass to such combinations, so basis orbits are
//! exhaustive for shifts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::moment::{
    finite_difference, is_cpd, is_stieltjes, MomentSequence, QuadraticWitness,
};
use crate::tol::ToleranceConfig;

/// Largest admissible weight; keeps orbit moments inside f64 range at the
/// supported truncation orders.
pub const MAX_WEIGHT: f64 = 1e6;

/// Tolerance for the unit-mass invariant of a Berger measure.
const BERGER_MASS_TOL: f64 = 1e-8;

/// Symbolic weight specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ShiftSpec {
    /// Weights `head[0], .., head[k-1], tail, tail, ...`.
    EventuallyConstant(EventuallyConstantSpec),
    /// Weights `sqrt(gamma_{k+1} / gamma_k)` for the moments of a probability
    /// measure.
    Berger(BergerSpec),
    /// Weights `sqrt(p(k+1) / p(k))` for a positive polynomial of degree 1
    /// or 2.
    Poly3iso(PolySpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventuallyConstantSpec {
    pub head: Vec<f64>,
    pub tail: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BergerSpec {
    pub measure: AtomicMeasure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolySpec {
    /// Coefficients `[c0, c1]` or `[c0, c1, c2]`, constant term first.
    pub p: Vec<f64>,
}

impl PolySpec {
    pub fn eval(&self, x: f64) -> f64 {
        self.p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    fn degree(&self) -> usize {
        if self.p.len() == 3 && self.p[2] != 0.0 {
            2
        } else {
            1
        }
    }
}

/// A validated weighted shift: a spec plus a positive scalar factor on every
/// weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedShift {
    #[serde(flatten)]
    spec: ShiftSpec,
    #[serde(skip_serializing_if = "is_unit_scale")]
    scale: f64,
}

fn is_unit_scale(s: &f64) -> bool {
    *s == 1.0
}

impl<'de> Deserialize<'de> for WeightedShift {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let spec = ShiftSpec::deserialize(deserializer)?;
        WeightedShift::new(spec).map_err(serde::de::Error::custom)
    }
}

impl WeightedShift {
    pub fn new(spec: ShiftSpec) -> Result<Self> {
        let shift = WeightedShift { spec, scale: 1.0 };
        shift.validate()?;
        Ok(shift)
    }

    /// The shift with every weight multiplied by `alpha`; equivalently the
    /// orbit moments scaled by `alpha^(2n)`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidShift(format!(
                "scale factor {alpha} must be positive and finite"
            )));
        }
        let shift = WeightedShift {
            spec: self.spec.clone(),
            scale: self.scale * alpha,
        };
        shift.validate()?;
        Ok(shift)
    }

    pub fn spec(&self) -> &ShiftSpec {
        &self.spec
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn validate(&self) -> Result<()> {
        match &self.spec {
            ShiftSpec::EventuallyConstant(ec) => {
                for (i, &w) in ec.head.iter().enumerate() {
                    if !(w > 0.0 && w.is_finite()) {
                        return Err(Error::InvalidShift(format!(
                            "head weight {i} must be positive, got {w}"
                        )));
                    }
                }
                if !(ec.tail > 0.0 && ec.tail.is_finite()) {
                    return Err(Error::InvalidShift(format!(
                        "tail weight must be positive, got {}",
                        ec.tail
                    )));
                }
            }
            ShiftSpec::Berger(b) => {
                let total = b.measure.total_mass();
                if (total - 1.0).abs() > BERGER_MASS_TOL {
                    return Err(Error::InvalidShift(format!(
                        "Berger measure must be a probability measure, total mass {total}"
                    )));
                }
                match b.measure.max_node() {
                    Some(x) if x > 0.0 => {}
                    _ => {
                        return Err(Error::InvalidShift(
                            "Berger measure must have a node above 0".into(),
                        ))
                    }
                }
            }
            ShiftSpec::Poly3iso(poly) => {
                if !(poly.p.len() == 2 || poly.p.len() == 3) {
                    return Err(Error::InvalidShift(
                        "polynomial must have degree 1 or 2 (2 or 3 coefficients)".into(),
                    ));
                }
                if poly.p.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidShift("non-finite coefficient".into()));
                }
                let lead = *poly.p.last().unwrap();
                if poly.degree() == 1 && poly.p[1] == 0.0 {
                    return Err(Error::InvalidShift(
                        "polynomial must have degree at least 1".into(),
                    ));
                }
                if lead <= 0.0 {
                    return Err(Error::InvalidShift(format!(
                        "leading coefficient must be positive, got {lead}"
                    )));
                }
                // Eventual positivity is decided by the leading coefficient;
                // sampling past the largest real root covers the rest.
                let horizon = poly_positivity_horizon(poly);
                for n in 0..=horizon {
                    let v = poly.eval(n as f64);
                    if !(v > 0.0) {
                        return Err(Error::InvalidShift(format!(
                            "p({n}) = {v} is not positive"
                        )));
                    }
                }
            }
        }
        let norm = self.operator_norm();
        if !(norm.is_finite() && norm <= MAX_WEIGHT) {
            return Err(Error::InvalidShift(format!(
                "weights must stay below {MAX_WEIGHT}, sup is {norm}"
            )));
        }
        Ok(())
    }

    /// Weight `lambda_k`.
    pub fn weight(&self, k: usize) -> f64 {
        let raw = match &self.spec {
            ShiftSpec::EventuallyConstant(ec) => {
                if k < ec.head.len() {
                    ec.head[k]
                } else {
                    ec.tail
                }
            }
            ShiftSpec::Berger(b) => {
                let mk = power_moment(&b.measure, k as u32);
                let mk1 = power_moment(&b.measure, k as u32 + 1);
                (mk1 / mk).sqrt()
            }
            ShiftSpec::Poly3iso(poly) => {
                (poly.eval((k + 1) as f64) / poly.eval(k as f64)).sqrt()
            }
        };
        self.scale * raw
    }

    /// Orbit moments `gamma_n(k) = prod_{j<n} lambda_{k+j}^2` for `n <= n_max`.
    pub fn orbit_moments(&self, k: usize, n_max: usize) -> Result<MomentSequence> {
        let mut values = Vec::with_capacity(n_max + 1);
        let mut acc = 1.0;
        values.push(acc);
        for j in 0..n_max {
            let w = self.weight(k + j);
            acc *= w * w;
            values.push(acc);
        }
        MomentSequence::new(values)
    }

    /// Adjoint orbit moments: `prod_{j=1..n} lambda_{k-j}^2` for `n <= k`,
    /// and 0 beyond (the adjoint annihilates the first basis vector).
    pub fn adjoint_orbit_moments(&self, k: usize, n_max: usize) -> Result<MomentSequence> {
        let mut values = Vec::with_capacity(n_max + 1);
        let mut acc = 1.0;
        values.push(acc);
        for n in 1..=n_max {
            if n > k {
                values.push(0.0);
            } else {
                let w = self.weight(k - n);
                acc *= w * w;
                values.push(acc);
            }
        }
        MomentSequence::new(values)
    }

    /// Exact operator norm `sup_k lambda_k`.
    pub fn operator_norm(&self) -> f64 {
        let raw = match &self.spec {
            ShiftSpec::EventuallyConstant(ec) => ec
                .head
                .iter()
                .fold(ec.tail, |acc, &w| acc.max(w)),
            // Moment ratios increase toward the largest node, so the norm is
            // its square root.
            ShiftSpec::Berger(b) => b.measure.max_node().unwrap_or(0.0).sqrt(),
            ShiftSpec::Poly3iso(poly) => {
                let mut best = poly.eval(1.0) / poly.eval(0.0);
                for n in poly_ratio_candidates(poly) {
                    let v = poly.eval((n + 1) as f64) / poly.eval(n as f64);
                    best = best.max(v);
                }
                best.max(1.0).sqrt()
            }
        };
        self.scale * raw
    }

    /// The `n` orthogonal summands of `T^n`: the r-th one has weight-at-k
    /// equal to `prod_{j<n} lambda_{r+kn+j}`, and stays inside the same
    /// symbolic family.
    pub fn power_decompose(&self, n: u32) -> Result<Vec<WeightedShift>> {
        if n == 0 {
            return Err(Error::InvalidShift("power must be positive".into()));
        }
        let scale = self.scale.powi(n as i32);
        let mut out = Vec::with_capacity(n as usize);
        for r in 0..n as usize {
            let spec = match &self.spec {
                ShiftSpec::EventuallyConstant(ec) => {
                    let kappa = ec.head.len();
                    let head_len = kappa.div_ceil(n as usize);
                    let head: Vec<f64> = (0..head_len)
                        .map(|k| {
                            (0..n as usize)
                                .map(|j| {
                                    let idx = r + k * n as usize + j;
                                    if idx < kappa {
                                        ec.head[idx]
                                    } else {
                                        ec.tail
                                    }
                                })
                                .product()
                        })
                        .collect();
                    ShiftSpec::EventuallyConstant(EventuallyConstantSpec {
                        head,
                        tail: ec.tail.powi(n as i32),
                    })
                }
                ShiftSpec::Berger(b) => {
                    // Berger measure of the r-th summand: reweight by x^r,
                    // normalize, push forward under x -> x^n.
                    let reweighted = b.measure.reweight_monomial(r as u32).normalized()?;
                    ShiftSpec::Berger(BergerSpec {
                        measure: reweighted.pushforward_power(n),
                    })
                }
                ShiftSpec::Poly3iso(poly) => {
                    // q(k) = p(r + kn) has the same degree and stays positive
                    // on the nonnegative integers.
                    let c0 = poly.p[0];
                    let c1 = poly.p[1];
                    let c2 = if poly.p.len() == 3 { poly.p[2] } else { 0.0 };
                    let rf = r as f64;
                    let nf = n as f64;
                    let q0 = c2 * rf * rf + c1 * rf + c0;
                    let q1 = 2.0 * c2 * rf * nf + c1 * nf;
                    let q2 = c2 * nf * nf;
                    let p = if q2 == 0.0 {
                        vec![q0, q1]
                    } else {
                        vec![q0, q1, q2]
                    };
                    ShiftSpec::Poly3iso(PolySpec { p })
                }
            };
            let shift = WeightedShift { spec, scale };
            shift.validate()?;
            out.push(shift);
        }
        Ok(out)
    }
}

/// Moment of order `n` of a measure (plain power sum).
fn power_moment(mu: &AtomicMeasure, n: u32) -> f64 {
    mu.atoms()
        .iter()
        .map(|a| a.mass * a.node.powi(n as i32))
        .sum()
}

/// Sample horizon covering every real root of `p`, per the positivity check.
fn poly_positivity_horizon(poly: &PolySpec) -> usize {
    let max_root = poly_real_roots(poly)
        .into_iter()
        .fold(0.0f64, |acc, r| acc.max(r.abs()));
    (10.0 * max_root.max(1.0)).ceil() as usize
}

fn poly_real_roots(poly: &PolySpec) -> Vec<f64> {
    let c0 = poly.p[0];
    let c1 = poly.p[1];
    let c2 = if poly.p.len() == 3 { poly.p[2] } else { 0.0 };
    if c2 == 0.0 {
        if c1 == 0.0 {
            Vec::new()
        } else {
            vec![-c0 / c1]
        }
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc < 0.0 {
            Vec::new()
        } else {
            let s = disc.sqrt();
            vec![(-c1 - s) / (2.0 * c2), (-c1 + s) / (2.0 * c2)]
        }
    }
}

/// Integer candidates for the maximum of `p(n+1)/p(n)` over the nonnegative
/// integers: 0, and the integers around the critical points of the ratio.
fn poly_ratio_candidates(poly: &PolySpec) -> Vec<usize> {
    let c0 = poly.p[0];
    let c1 = poly.p[1];
    let c2 = if poly.p.len() == 3 { poly.p[2] } else { 0.0 };
    let mut candidates = vec![0usize];
    if c2 != 0.0 {
        // Critical points of p(x+1)/p(x) solve
        // -2 c2^2 x^2 - 2 c2 (c2 + c1) x + (c2 (2 c0 - c1) - c1^2) = 0.
        let a = -2.0 * c2 * c2;
        let b = -2.0 * c2 * (c2 + c1);
        let c = c2 * (2.0 * c0 - c1) - c1 * c1;
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let s = disc.sqrt();
            for root in [(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)] {
                if root.is_finite() && root > 0.0 {
                    candidates.push(root.floor().max(0.0) as usize);
                    candidates.push(root.ceil() as usize);
                }
            }
        }
    }
    candidates
}

/// Verdict status for one operator class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassStatus {
    /// Settled by an exact structural criterion.
    ExactTrue,
    /// Settled negatively by an exact structural criterion.
    ExactFalse,
    /// A finite certificate against membership was found.
    Refuted,
    /// No refutation up to the stated truncation.
    ConsistentUpTo,
}

impl ClassStatus {
    /// True when the verdict is compatible with class membership.
    pub fn holds(self) -> bool {
        matches!(self, ClassStatus::ExactTrue | ClassStatus::ConsistentUpTo)
    }
}

/// Supporting data attached to a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassWitness {
    /// Negative Hankel form on the orbit (or second-difference) sequence of
    /// one basis vector.
    Hankel {
        basis: usize,
        witness: QuadraticWitness,
    },
    /// Forward and adjoint orbit moments disagree.
    AdjointMismatch {
        basis: usize,
        power: usize,
        forward: f64,
        adjoint: f64,
    },
    /// A sampled weight differs from the reference weight.
    WeightMismatch {
        index: usize,
        value: f64,
        reference: f64,
    },
    /// A finite difference of an orbit sequence fails to vanish.
    NonzeroDifference {
        basis: usize,
        index: usize,
        value: f64,
    },
    /// Operator norm against exact spectral radius.
    SpectralGap { norm: f64, radius: f64 },
    /// Operator norm against a windowed spectral-radius estimate.
    SpectralWindow {
        norm: f64,
        estimate: f64,
        window: usize,
        nondecreasing: bool,
    },
}

impl ClassWitness {
    /// Extracts the Hankel refutation, when that is what the witness holds.
    pub fn into_hankel(self) -> Option<(usize, QuadraticWitness)> {
        match self {
            ClassWitness::Hankel { basis, witness } => Some((basis, witness)),
            _ => None,
        }
    }
}

/// Per-class verdict record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub status: ClassStatus,
    /// Moment (or window) order used by the test.
    pub order: usize,
    /// Number of basis vectors examined.
    pub basis_range: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ClassWitness>,
}

impl ClassVerdict {
    fn new(status: ClassStatus, order: usize, basis_range: usize) -> Self {
        ClassVerdict {
            status,
            order,
            basis_range,
            witness: None,
        }
    }

    fn with_witness(mut self, witness: ClassWitness) -> Self {
        self.witness = Some(witness);
        self
    }
}

/// Truncation parameters shared by the classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyParams {
    /// Number of orbit moments per basis vector.
    pub order: usize,
    /// Basis vectors 0..=basis are examined.
    pub basis: usize,
    /// Window length for spectral-radius estimates.
    pub horizon: usize,
    /// Which m-isometry class the combined report tests.
    pub isometry_order: usize,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        // The known refutations all appear at order <= 8; these margins are
        // generous and still sub-second.
        ClassifyParams {
            order: 24,
            basis: 12,
            horizon: 64,
            isometry_order: 3,
        }
    }
}

/// Combined report across every classifier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub subnormal: ClassVerdict,
    pub quasinormal: ClassVerdict,
    pub normal: ClassVerdict,
    pub cpd: ClassVerdict,
    pub normaloid: ClassVerdict,
    pub m_isometry: MIsometryVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MIsometryVerdict {
    pub m: usize,
    #[serde(flatten)]
    pub verdict: ClassVerdict,
}

/// Lambert-style generic subnormality test: every basis orbit sequence must
/// be a Stieltjes moment sequence up to the truncation.
pub fn classify_subnormal_generic(
    shift: &WeightedShift,
    params: &ClassifyParams,
    tol: &ToleranceConfig,
) -> Result<ClassVerdict> {
    scan_orbits(shift, params, |seq| is_stieltjes(seq, tol))
}

fn scan_orbits(
    shift: &WeightedShift,
    params: &ClassifyParams,
    test: impl Fn(&MomentSequence) -> Result<crate::moment::PositivityVerdict>,
) -> Result<ClassVerdict> {
    for k in 0..=params.basis {
        let orbit = shift.orbit_moments(k, params.order)?;
        let verdict = test(&orbit)?;
        if verdict.is_refuted() {
            let witness = verdict.witness.expect("refutations carry a witness");
            return Ok(
                ClassVerdict::new(ClassStatus::Refuted, params.order, params.basis)
                    .with_witness(ClassWitness::Hankel { basis: k, witness }),
            );
        }
    }
    Ok(ClassVerdict::new(
        ClassStatus::ConsistentUpTo,
        params.order,
        params.basis,
    ))
}

/// Exact structural subnormality criterion, when one applies:
///
/// - Berger-generated shifts are subnormal by construction.
/// - Eventually-constant shifts with (effective) tail 1 are settled by the
///   known dichotomy: `{alpha, 1, 1, ...}` is subnormal iff `alpha <= 1`,
///   and any interior weight different from 1 rules subnormality out.
fn exact_subnormal(shift: &WeightedShift, tol: &ToleranceConfig) -> Option<bool> {
    match shift.spec() {
        ShiftSpec::Berger(_) => Some(true),
        ShiftSpec::EventuallyConstant(ec) => {
            let tail = shift.scale * ec.tail;
            if (tail - 1.0).abs() > tol.eps_eq {
                return None;
            }
            let mut head: Vec<f64> = ec.head.iter().map(|&w| shift.scale * w).collect();
            while head
                .last()
                .is_some_and(|&w| (w - 1.0).abs() <= tol.eps_eq)
            {
                head.pop();
            }
            match head.len() {
                0 => Some(true),
                1 => Some(head[0] <= 1.0 + tol.eps_eq),
                _ => Some(false),
            }
        }
        ShiftSpec::Poly3iso(_) => None,
    }
}

/// Subnormality verdict: exact branch when available (with the generic
/// Hankel refutation attached on an exact negative), generic Lambert branch
/// otherwise.
pub fn classify_subnormal(
    shift: &WeightedShift,
    params: &ClassifyParams,
    tol: &ToleranceConfig,
) -> Result<ClassVerdict> {
    match exact_subnormal(shift, tol) {
        Some(true) => Ok(ClassVerdict::new(
            ClassStatus::ExactTrue,
            params.order,
            params.basis,
        )),
        Some(false) => {
            let generic = classify_subnormal_generic(shift, params, tol)?;
            let mut verdict =
                ClassVerdict::new(ClassStatus::ExactFalse, params.order, params.basis);
            verdict.witness = generic.witness;
            Ok(verdict)
        }
        None => classify_subnormal_generic(shift, params, tol),
    }
}

/// CPD verdict: every basis orbit sequence must pass the conditional
/// positivity test.
pub fn classify_cpd(
    shift: &WeightedShift,
    params: &ClassifyParams,
    tol: &ToleranceConfig,
) -> Result<ClassVerdict> {
    scan_orbits(shift, params, |seq| is_cpd(seq, tol))
}

/// Quasinormality is exactly constant weights (Embry's criterion specialized
/// to shifts); sampled over the head, tail, and indices up to basis + order.
pub fn classify_quasinormal(
    shift: &WeightedShift,
    params: &ClassifyParams,
    tol: &ToleranceConfig,
) -> Result<ClassVerdict> {
    let reference = shift.weight(0);
    let eq = |w: f64| (w - reference).abs() <= tol.eps_eq * reference.max(1.0);
    let sample_to = params.basis + params.order;
    for k in 0..=sample_to {
        let w = shift.weight(k);
        if !eq(w) {
            return Ok(
                ClassVerdict::new(ClassStatus::ExactFalse, params.order, params.basis)
                    .with_witness(ClassWitness::WeightMismatch {
                        index: k,
                        value: w,
                        reference,
                    }),
            );
        }
    }
    Ok(ClassVerdict::new(
        ClassStatus::ExactTrue,
        params.order,
        params.basis,
    ))
}

/// Shifts with positive weights are never normal: the adjoint annihilates
/// the first basis vector while the shift does not.
pub fn classify_normal(
    shift: &WeightedShift,
    params: &ClassifyParams,
    _tol: &ToleranceConfig,
) -> Result<ClassVerdict> {
    let forward = shift.orbit_moments(0, 1)?.get(1);
    let adjoint = shift.adjoint_orbit_moments(0, 1)?.get(1);
    Ok(
        ClassVerdict::new(ClassStatus::ExactFalse, params.order, params.basis).with_witness(
            ClassWitness::AdjointMismatch {
                basis: 0,
                power: 1,
                forward,
                adjoint,
            },
        ),
    )
}

/// m-isometry test: the m-th difference of every basis orbit sequence must
/// vanish relative to the orbit scale.
pub fn classify_m_isometry(
    shift: &WeightedShift,
    m: usize,
    params: &ClassifyParams,
    tol: &ToleranceConfig,
) -> Result<ClassVerdict> {
    if params.order < m {
        return Err(Error::OrderTooSmall {
            order: params.order,
            required: m,
        });
    }
    for k in 0..=params.basis {
        let orbit = shift.orbit_moments(k, params.order)?;
        let scale = orbit.max_abs();
        let diff = finite_difference(&orbit, m)?;
        for (n, &v) in diff.values().iter().enumerate() {
            if v.abs() > tol.eps_eq * scale {
                return Ok(ClassVerdict::new(
                    ClassStatus::Refuted,
                    params.order,
                    params.basis,
                )
                .with_witness(ClassWitness::NonzeroDifference {
                    basis: k,
                    index: n,
                    value: v,
                }));
            }
        }
    }
    Ok(ClassVerdict::new(
        ClassStatus::ConsistentUpTo,
        params.order,
        params.basis,
    ))
}

/// Normaloid test: spectral radius against operator norm.
///
/// The radius is exact for eventually-constant specs (the tail) and for the
/// polynomial family (1). Berger-generated shifts get a windowed estimate,
/// which settles the verdict only when the window sequence is numerically
/// constant.
pub fn classify_normaloid(
    shift: &WeightedShift,
    params: &ClassifyParams,
    tol: &ToleranceConfig,
) -> Result<ClassVerdict> {
    let norm = shift.operator_norm();
    let close = |a: f64, b: f64| (a - b).abs() <= tol.eps_eq * a.abs().max(1.0);
    match shift.spec() {
        ShiftSpec::EventuallyConstant(ec) => {
            let radius = shift.scale * ec.tail;
            let status = if close(radius, norm) {
                ClassStatus::ExactTrue
            } else {
                ClassStatus::ExactFalse
            };
            Ok(
                ClassVerdict::new(status, params.horizon, params.basis)
                    .with_witness(ClassWitness::SpectralGap { norm, radius }),
            )
        }
        ShiftSpec::Poly3iso(_) => {
            let radius = shift.scale;
            let status = if close(radius, norm) {
                ClassStatus::ExactTrue
            } else {
                ClassStatus::ExactFalse
            };
            Ok(
                ClassVerdict::new(status, params.horizon, params.basis)
                    .with_witness(ClassWitness::SpectralGap { norm, radius }),
            )
        }
        ShiftSpec::Berger(_) => {
            let window = params.horizon.max(2);
            let sup_mean = |n: usize| -> Result<f64> {
                let mut best = 0.0f64;
                for k in 0..=params.basis {
                    let orbit = shift.orbit_moments(k, n)?;
                    best = best.max(orbit.get(n).powf(1.0 / (2.0 * n as f64)));
                }
                Ok(best)
            };
            let mut seq = Vec::with_capacity(window);
            for n in 1..=window {
                seq.push(sup_mean(n)?);
            }
            let estimate = seq[window - 1];
            let spread = seq.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - seq.iter().cloned().fold(f64::INFINITY, f64::min);
            let nondecreasing = seq.windows(2).all(|w| w[1] >= w[0] - tol.eps_eq);
            let witness = ClassWitness::SpectralWindow {
                norm,
                estimate,
                window,
                nondecreasing,
            };
            let status = if spread <= tol.eps_eq * estimate.max(1.0) {
                if close(estimate, norm) {
                    ClassStatus::ExactTrue
                } else {
                    ClassStatus::ExactFalse
                }
            } else {
                ClassStatus::ConsistentUpTo
            };
            Ok(ClassVerdict::new(status, window, params.basis).with_witness(witness))
        }
    }
}

/// Runs every classifier and checks the class inclusions before returning.
pub fn classify_all(
    shift: &WeightedShift,
    params: &ClassifyParams,
    tol: &ToleranceConfig,
) -> Result<ClassReport> {
    let subnormal = classify_subnormal(shift, params, tol)?;
    let quasinormal = classify_quasinormal(shift, params, tol)?;
    let normal = classify_normal(shift, params, tol)?;
    let cpd = classify_cpd(shift, params, tol)?;
    let normaloid = classify_normaloid(shift, params, tol)?;
    let m = params.isometry_order;
    let m_isometry = MIsometryVerdict {
        m,
        verdict: classify_m_isometry(shift, m, params, tol)?,
    };

    if quasinormal.status == ClassStatus::ExactTrue && !subnormal.status.holds() {
        return Err(Error::HierarchyViolation(
            "quasinormal verdict is exact-true but subnormality is refuted".into(),
        ));
    }
    if subnormal.status.holds() && cpd.status == ClassStatus::Refuted {
        return Err(Error::HierarchyViolation(
            "subnormality holds but the CPD test is refuted".into(),
        ));
    }

    Ok(ClassReport {
        subnormal,
        quasinormal,
        normal,
        cpd,
        normaloid,
        m_isometry,
    })
}
