//! Per-vector representing-triplet calculus: recover `(b, c, F)` from an
//! orbit moment sequence, rebuild the moments from a triplet, issue
//! subnormality and quasinormality certificates, produce the Berger measure,
//! and apply the power-transform law.
//!
//! The split of the second-difference measure `M` into `F` (everything away
//! from 1) and `c = M({1})/2` is discontinuous at the node 1; a band of
//! radius `eps_node` around 1 makes it deterministic: mass recovered inside
//! the band is assigned to `c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{recover_measure, AtomicMeasure};
use crate::moment::{is_cpd, q_poly_with_band, second_difference, MomentSequence};
use crate::tol::ToleranceConfig;

/// Scalar compression `(b, c, F)` of a representing triplet at a unit vector.
///
/// Invariants: `c >= 0` (clamped to 0 when within `eps_eq` below), and `F`
/// carries no atom within `eps_node` of 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TripletRepr", into = "TripletRepr")]
pub struct ScalarTriplet {
    b: f64,
    c: f64,
    f_measure: AtomicMeasure,
}

/// JSON shape: `{"b": x, "c": y, "F": {"atoms": [...]}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TripletRepr {
    b: f64,
    c: f64,
    #[serde(rename = "F")]
    f: AtomicMeasure,
}

impl TryFrom<TripletRepr> for ScalarTriplet {
    type Error = Error;
    fn try_from(repr: TripletRepr) -> Result<Self> {
        ScalarTriplet::new(repr.b, repr.c, repr.f, &ToleranceConfig::default())
    }
}

impl From<ScalarTriplet> for TripletRepr {
    fn from(t: ScalarTriplet) -> TripletRepr {
        TripletRepr {
            b: t.b,
            c: t.c,
            f: t.f_measure,
        }
    }
}

impl ScalarTriplet {
    pub fn new(b: f64, c: f64, f_measure: AtomicMeasure, tol: &ToleranceConfig) -> Result<Self> {
        if !b.is_finite() || !c.is_finite() {
            return Err(Error::InvalidTriplet("b and c must be finite".into()));
        }
        let c = if c < 0.0 {
            if c >= -tol.eps_eq {
                0.0
            } else {
                return Err(Error::InvalidTriplet(format!("c = {c} must be nonnegative")));
            }
        } else {
            c
        };
        if f_measure.atom_at(1.0, tol)? != 0.0 {
            return Err(Error::InvalidTriplet(
                "F must have no atom at the node 1".into(),
            ));
        }
        Ok(ScalarTriplet { b, c, f_measure })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn f_measure(&self) -> &AtomicMeasure {
        &self.f_measure
    }

    /// The second-difference measure `M = F + 2c * delta_1`.
    pub fn m_measure(&self) -> AtomicMeasure {
        let mut pairs: Vec<(f64, f64)> = self
            .f_measure
            .atoms()
            .iter()
            .map(|a| (a.node, a.mass))
            .collect();
        if self.c > 0.0 {
            pairs.push((1.0, 2.0 * self.c));
        }
        AtomicMeasure::from_atoms(pairs, crate::tol::DEFAULT_EPS_NODE)
            .expect("triplet components form a valid measure")
    }
}

/// Band around the node 1 inside which recovered mass is assigned to `c`.
///
/// Quadrature recovery positions a node only to ~1e-9 in binary64 when the
/// moment data barely constrains it, so the split has to be wider than
/// `eps_node`; 1e-6 matches the node tolerance promised by the roundtrip
/// contract while staying far below any admissible `F` atom near 1.
const NEAR_ONE_BAND: f64 = 1e-6;

/// Recovers the scalar triplet from a normalized orbit moment sequence.
///
/// The sequence must have `gamma_0 = 1` (within `eps_eq`) and pass the CPD
/// test. `M` is recovered from the second differences; mass recovered within
/// [`NEAR_ONE_BAND`] of 1 becomes `2c`, the rest is `F`, and
/// `b = gamma_1 - gamma_0 - c`.
pub fn recover_triplet(seq: &MomentSequence, tol: &ToleranceConfig) -> Result<ScalarTriplet> {
    let gamma0 = seq.get(0);
    if (gamma0 - 1.0).abs() > tol.eps_eq {
        return Err(Error::NotNormalized { gamma0 });
    }
    let verdict = is_cpd(seq, tol)?;
    if verdict.is_refuted() {
        return Err(Error::NotCpd);
    }
    let beta = second_difference(seq)?;
    // Differences at or below the rounding floor of the orbit itself mean a
    // numerically affine sequence: M is the zero measure.
    let m = if beta.max_abs() <= tol.eps_psd * seq.max_abs() {
        AtomicMeasure::empty()
    } else {
        recover_measure(&beta, tol)?
    };
    let split = ToleranceConfig {
        eps_node: NEAR_ONE_BAND.max(tol.eps_node),
        ..*tol
    };
    let f_measure = m.remove_atom(1.0, &split);
    let c = (m.total_mass() - f_measure.total_mass()) / 2.0;
    let b = (seq.get(1) - gamma0) - c;
    ScalarTriplet::new(b, c, f_measure, tol)
}

/// Rebuilds `gamma_n = 1 + n b + n^2 c + sum_i Q_n(x_i) f_i` for `n <= order`.
pub fn reconstruct_moments(
    t: &ScalarTriplet,
    order: usize,
    tol: &ToleranceConfig,
) -> Result<MomentSequence> {
    let values: Vec<f64> = (0..=order)
        .map(|n| {
            let nf = n as f64;
            let mut acc = 1.0 + nf * t.b + nf * nf * t.c;
            for atom in t.f_measure.atoms() {
                acc += q_poly_with_band(n, atom.node, tol.singular_band) * atom.mass;
            }
            acc
        })
        .collect();
    MomentSequence::new(values)
}

/// Which certificate condition failed first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateCondition {
    A,
    B,
    C,
}

/// Subnormality certificate: the three triplet conditions evaluated at the
/// scalar level with the identity bound compressed to `gamma_0 = 1`.
///
/// - (a) `integral of 1/(x-1)^2 dF <= 1`
/// - (b) `b = integral of 1/(x-1) dF`
/// - (c) `c = 0`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubnormalityCertificate {
    /// Value of the (a)-integral and whether it stays below 1.
    pub mass_check: CheckedValue,
    /// Residual `|b - integral of 1/(x-1) dF|` and its gate.
    pub b_check: CheckedValue,
    /// Value `|c|` and its gate.
    pub c_check: CheckedValue,
    pub pass: bool,
    /// First failing condition in the order (a), (b), (c).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failing: Option<CertificateCondition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckedValue {
    pub value: f64,
    pub passed: bool,
}

/// Evaluates the subnormality certificate.
///
/// `F` carries no atom at 1 by invariant, so the integrands are finite. The
/// check is a necessary condition at the scalar level and exact for shift
/// orbits at basis vectors.
pub fn subnormality_certificate(
    t: &ScalarTriplet,
    tol: &ToleranceConfig,
) -> Result<SubnormalityCertificate> {
    let mass = t
        .f_measure
        .integrate(|x| 1.0 / ((x - 1.0) * (x - 1.0)))?;
    let mass_pass = mass <= 1.0 + tol.eps_eq;
    let b_target = t.f_measure.integrate(|x| 1.0 / (x - 1.0))?;
    let b_residual = (t.b - b_target).abs();
    let b_pass = b_residual <= tol.eps_eq * t.b.abs().max(1.0);
    let c_pass = t.c.abs() <= tol.eps_eq;
    let first_failing = if !mass_pass {
        Some(CertificateCondition::A)
    } else if !b_pass {
        Some(CertificateCondition::B)
    } else if !c_pass {
        Some(CertificateCondition::C)
    } else {
        None
    };
    Ok(SubnormalityCertificate {
        mass_check: CheckedValue {
            value: mass,
            passed: mass_pass,
        },
        b_check: CheckedValue {
            value: b_residual,
            passed: b_pass,
        },
        c_check: CheckedValue {
            value: t.c.abs(),
            passed: c_pass,
        },
        pass: first_failing.is_none(),
        first_failing,
    })
}

/// Berger measure of the orbit: density `1/(x-1)^2` against `F`, plus the
/// defect mass at 1 when it exceeds `eps_eq`. Total mass 1.
pub fn berger_measure(t: &ScalarTriplet, tol: &ToleranceConfig) -> Result<AtomicMeasure> {
    let cert = subnormality_certificate(t, tol)?;
    if !cert.pass {
        let condition = match cert.first_failing {
            Some(CertificateCondition::A) => 'a',
            Some(CertificateCondition::B) => 'b',
            _ => 'c',
        };
        return Err(Error::CertificateFailed { condition });
    }
    let mut pairs: Vec<(f64, f64)> = t
        .f_measure
        .atoms()
        .iter()
        .map(|a| (a.node, a.mass / ((a.node - 1.0) * (a.node - 1.0))))
        .collect();
    let defect = 1.0 - pairs.iter().map(|p| p.1).sum::<f64>();
    if defect > tol.eps_eq {
        pairs.push((1.0, defect));
    }
    AtomicMeasure::from_atoms(pairs, tol.eps_node)
}

/// Scalar shadow of projection-valuedness: for a shift orbit at a basis
/// vector, quasinormality forces the Berger measure to be a single point
/// mass. Necessary-and-sufficient for shift basis orbits, necessary in
/// general.
pub fn shift_quasinormal_certificate(t: &ScalarTriplet, tol: &ToleranceConfig) -> Result<bool> {
    let cert = subnormality_certificate(t, tol)?;
    if !cert.pass {
        return Ok(false);
    }
    Ok(berger_measure(t, tol)?.atoms().len() == 1)
}

/// Predicted second-difference measure of `T^n`: reweight `M` by the squared
/// geometric sum, then push forward under `x -> x^n`.
pub fn power_transform(t: &ScalarTriplet, n: u32) -> Result<AtomicMeasure> {
    if n == 0 {
        return Err(Error::InvalidTriplet("power must be positive".into()));
    }
    Ok(t.m_measure()
        .reweight_geometric_square(n)
        .pushforward_power(n))
}

/// Cross-checks the `b`-component of the `T^n` triplet along two routes:
/// recovery from the stride-n subsequence of the reconstructed moments, and
/// the direct integral of `(x^n - 1)/(x - 1)^2` against `F`. Returns the
/// absolute difference.
pub fn b_n_identity_check(t: &ScalarTriplet, n: u32, tol: &ToleranceConfig) -> Result<f64> {
    let cert = subnormality_certificate(t, tol)?;
    if !cert.pass {
        let condition = match cert.first_failing {
            Some(CertificateCondition::A) => 'a',
            Some(CertificateCondition::B) => 'b',
            _ => 'c',
        };
        return Err(Error::CertificateFailed { condition });
    }
    let atoms = t.f_measure.atoms().len() + usize::from(t.c > 0.0);
    let stride_order = 2 * (atoms + 1) + 4;
    let full = reconstruct_moments(t, stride_order * n as usize, tol)?;
    let stride = full.stride(n as usize)?;
    let power_triplet = recover_triplet(&stride, tol)?;
    let direct = t.f_measure.integrate(|x| {
        let nf = n as i32;
        (x.powi(nf) - 1.0) / ((x - 1.0) * (x - 1.0))
    })?;
    Ok((power_triplet.b - direct).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::DEFAULT_EPS_NODE;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn measure(pairs: &[(f64, f64)]) -> AtomicMeasure {
        AtomicMeasure::from_atoms(pairs.to_vec(), DEFAULT_EPS_NODE).unwrap()
    }

    fn triplet(b: f64, c: f64, pairs: &[(f64, f64)]) -> ScalarTriplet {
        ScalarTriplet::new(b, c, measure(pairs), &tol()).unwrap()
    }

    fn seq(values: Vec<f64>) -> MomentSequence {
        MomentSequence::new(values).unwrap()
    }

    #[test]
    fn triplet_invariants() {
        // Tiny negative c clamps to zero.
        let t = ScalarTriplet::new(0.0, -1e-9, AtomicMeasure::empty(), &tol()).unwrap();
        assert_eq!(t.c(), 0.0);
        assert!(ScalarTriplet::new(0.0, -1.0, AtomicMeasure::empty(), &tol()).is_err());
        assert!(ScalarTriplet::new(0.0, 0.0, measure(&[(1.0, 0.5)]), &tol()).is_err());
    }

    #[test]
    fn recover_isometry_orbit() {
        let t = recover_triplet(&seq(vec![1.0; 10]), &tol()).unwrap();
        assert_eq!(t.b(), 0.0);
        assert_eq!(t.c(), 0.0);
        assert!(t.f_measure().is_empty());
    }

    #[test]
    fn recover_quadratic_orbit() {
        let g: Vec<f64> = (0..=10)
            .map(|n| 1.0 + 0.3 * n as f64 + 0.5 * (n * n) as f64)
            .collect();
        let t = recover_triplet(&seq(g), &tol()).unwrap();
        assert!((t.b() - 0.3).abs() < 1e-9);
        assert!((t.c() - 0.5).abs() < 1e-9);
        assert!(t.f_measure().is_empty());
    }

    #[test]
    fn recover_geometric_orbit() {
        let g: Vec<f64> = (0..=10).map(|n| 4f64.powi(n)).collect();
        let t = recover_triplet(&seq(g), &tol()).unwrap();
        assert!((t.b() - 3.0).abs() < 1e-8);
        assert!(t.c().abs() < 1e-9);
        assert_eq!(t.f_measure().atoms().len(), 1);
        assert!((t.f_measure().atoms()[0].node - 4.0).abs() < 1e-8);
        assert!((t.f_measure().atoms()[0].mass - 9.0).abs() < 1e-7);
    }

    #[test]
    fn recover_rejects_unnormalized_and_non_cpd() {
        let g: Vec<f64> = (0..=8).map(|n| 2.0 * 4f64.powi(n)).collect();
        assert!(matches!(
            recover_triplet(&seq(g), &tol()),
            Err(Error::NotNormalized { .. })
        ));
        let mut g = vec![1.0, 1.0];
        g.extend(std::iter::repeat(0.25).take(8));
        assert_eq!(recover_triplet(&seq(g), &tol()), Err(Error::NotCpd));
    }

    #[test]
    fn reconstruct_examples() {
        let zero = triplet(0.0, 0.0, &[]);
        assert_eq!(
            reconstruct_moments(&zero, 4, &tol()).unwrap().values(),
            &[1.0; 5]
        );

        let t = triplet(3.0, 0.0, &[(4.0, 9.0)]);
        let m = reconstruct_moments(&t, 3, &tol()).unwrap();
        assert_eq!(m.values(), &[1.0, 4.0, 16.0, 64.0]);

        let q = triplet(0.3, 0.5, &[]);
        let m = reconstruct_moments(&q, 2, &tol()).unwrap();
        assert!((m.get(1) - 1.8).abs() < 1e-15);
        assert!((m.get(2) - 3.6).abs() < 1e-15);
    }

    #[test]
    fn certificate_examples() {
        let good = subnormality_certificate(&triplet(3.0, 0.0, &[(4.0, 9.0)]), &tol()).unwrap();
        assert!(good.pass);
        assert!((good.mass_check.value - 1.0).abs() < 1e-12);

        let c_fail = subnormality_certificate(&triplet(0.3, 0.5, &[]), &tol()).unwrap();
        assert!(!c_fail.pass);
        assert!(!c_fail.c_check.passed);

        let a_fail = subnormality_certificate(&triplet(0.0, 0.0, &[(4.0, 18.0)]), &tol()).unwrap();
        assert!(!a_fail.pass);
        assert_eq!(a_fail.first_failing, Some(CertificateCondition::A));
        assert!((a_fail.mass_check.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn berger_measure_examples() {
        let b = berger_measure(&triplet(3.0, 0.0, &[(4.0, 9.0)]), &tol()).unwrap();
        assert_eq!(b.atoms().len(), 1);
        assert!((b.atoms()[0].node - 4.0).abs() < 1e-12);
        assert!((b.atoms()[0].mass - 1.0).abs() < 1e-12);

        let iso = berger_measure(&triplet(0.0, 0.0, &[]), &tol()).unwrap();
        assert_eq!(iso.atoms().len(), 1);
        assert_eq!(iso.atoms()[0].node, 1.0);
        assert!((iso.atoms()[0].mass - 1.0).abs() < 1e-12);

        // Forward from the Berger measure 0.5 delta_0.5 + 0.5 delta_1:
        // F = delta_0.5 with mass 0.125 and b = -0.25.
        let two = berger_measure(&triplet(-0.25, 0.0, &[(0.5, 0.125)]), &tol()).unwrap();
        assert_eq!(two.atoms().len(), 2);
        assert!((two.atoms()[0].node - 0.5).abs() < 1e-12);
        assert!((two.atoms()[0].mass - 0.5).abs() < 1e-12);
        assert!((two.atoms()[1].node - 1.0).abs() < 1e-12);
        assert!((two.atoms()[1].mass - 0.5).abs() < 1e-12);

        let bad = berger_measure(&triplet(0.3, 0.5, &[]), &tol());
        assert!(matches!(bad, Err(Error::CertificateFailed { .. })));
    }

    #[test]
    fn quasinormal_certificate_examples() {
        assert!(shift_quasinormal_certificate(&triplet(3.0, 0.0, &[(4.0, 9.0)]), &tol()).unwrap());
        assert!(shift_quasinormal_certificate(&triplet(0.0, 0.0, &[]), &tol()).unwrap());
        assert!(
            !shift_quasinormal_certificate(&triplet(-0.25, 0.0, &[(0.5, 0.125)]), &tol()).unwrap()
        );
    }

    #[test]
    fn power_transform_examples() {
        let t = triplet(3.0, 0.0, &[(4.0, 9.0)]);
        let m2 = power_transform(&t, 2).unwrap();
        assert_eq!(m2.atoms().len(), 1);
        assert!((m2.atoms()[0].node - 16.0).abs() < 1e-12);
        assert!((m2.atoms()[0].mass - 225.0).abs() < 1e-12);

        // Pure quadratic growth: the mass at 1 scales by n^2.
        let q = triplet(0.0, 0.4, &[]);
        for n in 1..=4u32 {
            let m = power_transform(&q, n).unwrap();
            assert_eq!(m.atoms().len(), 1);
            assert_eq!(m.atoms()[0].node, 1.0);
            assert!((m.atoms()[0].mass - 0.8 * (n * n) as f64).abs() < 1e-12);
        }

        let any = triplet(-0.25, 0.0, &[(0.5, 0.125)]);
        assert_eq!(power_transform(&any, 1).unwrap(), any.m_measure());
    }

    #[test]
    fn b_n_identity_examples() {
        let t = triplet(3.0, 0.0, &[(4.0, 9.0)]);
        let r = b_n_identity_check(&t, 2, &tol()).unwrap();
        assert!(r <= 1e-8, "residual {r}");

        let iso = triplet(0.0, 0.0, &[]);
        for n in 1..=3u32 {
            assert!(b_n_identity_check(&iso, n, &tol()).unwrap() <= 1e-12);
        }

        let two = triplet(-0.25, 0.0, &[(0.5, 0.125)]);
        let r = b_n_identity_check(&two, 3, &tol()).unwrap();
        assert!(r <= 1e-6, "residual {r}");
    }

    #[test]
    fn triplet_json_round_trip() {
        let t = triplet(3.0, 0.0, &[(4.0, 9.0)]);
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"b":3.0,"c":0.0,"F":{"atoms":[[4.0,9.0]]}}"#);
        let back: ScalarTriplet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        // F with an atom at 1 violates the invariants.
        assert!(serde_json::from_str::<ScalarTriplet>(
            r#"{"b":0.0,"c":0.0,"F":{"atoms":[[1.0,0.5]]}}"#
        )
        .is_err());
    }
}
