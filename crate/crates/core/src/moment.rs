//! Finite-truncation positivity calculus for real sequences: Hankel sections,
//! positive-definite / Stieltjes / conditionally-positive-definite tests,
//! finite differences, and the kernel polynomials `Q_n`.
//!
//! Verdicts are finite certificates. `Refuted` carries the coefficient vector
//! attaining a negative quadratic form, which remains a valid certificate for
//! the corresponding infinite statement; `ConsistentUpTo(order)` records how
//! far the search went and never claims a proof.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, SymMatrix};
use crate::tol::{ToleranceConfig, DEFAULT_SINGULAR_BAND};

/// Finite truncation of a real sequence `gamma_0 .. gamma_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MomentSequence {
    values: Vec<f64>,
}

impl MomentSequence {
    /// Wraps the values; every entry must be finite and the list non-empty.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySequence);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(MomentSequence { values })
    }

    /// Truncation order `N` (one less than the number of entries).
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }

    /// Largest entry in absolute value.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// The subsequence `gamma_{kn}` for `k = 0 ..` as far as the data allows.
    pub fn stride(&self, n: usize) -> Result<MomentSequence> {
        if n == 0 {
            return Err(Error::InvalidMeasure("stride must be positive".into()));
        }
        MomentSequence::new(self.values.iter().copied().step_by(n).collect())
    }
}

impl TryFrom<Vec<f64>> for MomentSequence {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        MomentSequence::new(values)
    }
}

impl From<MomentSequence> for Vec<f64> {
    fn from(seq: MomentSequence) -> Vec<f64> {
        seq.values
    }
}

/// A coefficient vector attaining a negative quadratic form against a stated
/// Hankel section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticWitness {
    /// Hankel offset (0 for the plain section, 1 for the shifted one).
    pub offset: usize,
    /// Size of the refuting Hankel section.
    pub size: usize,
    /// Unit coefficient vector.
    pub coefficients: Vec<f64>,
    /// Attained quadratic-form value (negative beyond the threshold).
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityStatus {
    Refuted,
    ConsistentUpTo,
}

/// Outcome of a positivity test at finite truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityVerdict {
    pub status: PositivityStatus,
    /// Largest Hankel section examined.
    pub order_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<QuadraticWitness>,
}

impl PositivityVerdict {
    fn refuted(order_checked: usize, witness: QuadraticWitness) -> Self {
        PositivityVerdict {
            status: PositivityStatus::Refuted,
            order_checked,
            witness: Some(witness),
        }
    }

    fn consistent(order_checked: usize) -> Self {
        PositivityVerdict {
            status: PositivityStatus::ConsistentUpTo,
            order_checked,
            witness: None,
        }
    }

    pub fn is_refuted(&self) -> bool {
        self.status == PositivityStatus::Refuted
    }
}

/// Builds the `size x size` section `H[i][j] = gamma_{i+j+offset}`.
///
/// Exactly symmetric by construction.
pub fn hankel(seq: &MomentSequence, offset: usize, size: usize) -> Result<SymMatrix> {
    if size == 0 {
        return Err(Error::IndexOverflow {
            offset,
            size,
            order: seq.order(),
        });
    }
    let top = offset + 2 * (size - 1);
    if top > seq.order() {
        return Err(Error::IndexOverflow {
            offset,
            size,
            order: seq.order(),
        });
    }
    Ok(SymMatrix::from_fn(size, |i, j| seq.get(i + j + offset)))
}

/// Largest feasible Hankel size at the given offset, or 0 if none.
fn max_hankel_size(order: usize, offset: usize) -> usize {
    if offset > order {
        0
    } else {
        (order - offset) / 2 + 1
    }
}

/// Scans Hankel sections of every feasible size at one offset, smallest
/// first, and stops at the first refutation. Witness selection is therefore
/// deterministic: smallest section, then the eigenvector of the most negative
/// eigenvalue.
///
/// `floor` is an absolute lower bound on the refutation threshold; derived
/// sequences (second differences) pass the scale of their parent sequence so
/// cancellation noise is never mistaken for a certificate.
fn scan_offset(
    seq: &MomentSequence,
    offset: usize,
    tol: &ToleranceConfig,
    floor: f64,
) -> PositivityVerdict {
    let max_size = max_hankel_size(seq.order(), offset);
    for size in 1..=max_size {
        let h = hankel(seq, offset, size).expect("size is feasible");
        let threshold = -(tol.eps_psd * h.max_abs()).max(floor);
        let eigen = sym_eigen(&h);
        if eigen.values[0] < threshold {
            let coefficients = eigen.vectors[0].clone();
            let value = h.quadratic_form(&coefficients);
            if value < threshold {
                return PositivityVerdict::refuted(
                    size,
                    QuadraticWitness {
                        offset,
                        size,
                        coefficients,
                        value,
                    },
                );
            }
        }
    }
    PositivityVerdict::consistent(max_size)
}

/// Tests positive definiteness of the sequence through its Hankel sections.
///
/// Requires order >= 2.
pub fn is_pd(seq: &MomentSequence, tol: &ToleranceConfig) -> Result<PositivityVerdict> {
    if seq.order() < 2 {
        return Err(Error::OrderTooSmall {
            order: seq.order(),
            required: 2,
        });
    }
    Ok(scan_offset(seq, 0, tol, 0.0))
}

fn stieltjes_scan(seq: &MomentSequence, tol: &ToleranceConfig, floor: f64) -> PositivityVerdict {
    let plain = scan_offset(seq, 0, tol, floor);
    if plain.is_refuted() {
        return plain;
    }
    let shifted = scan_offset(seq, 1, tol, floor);
    if shifted.is_refuted() {
        return shifted;
    }
    PositivityVerdict::consistent(plain.order_checked)
}

/// Tests the Stieltjes property: both the plain and the shifted Hankel
/// sections must be positive semidefinite. A refutation is tagged with the
/// offset at which it was found.
///
/// Requires order >= 3.
pub fn is_stieltjes(seq: &MomentSequence, tol: &ToleranceConfig) -> Result<PositivityVerdict> {
    if seq.order() < 3 {
        return Err(Error::OrderTooSmall {
            order: seq.order(),
            required: 3,
        });
    }
    Ok(stieltjes_scan(seq, tol, 0.0))
}

/// Second difference `beta_n = gamma_{n+2} - 2 gamma_{n+1} + gamma_n`.
///
/// Requires order >= 2; the result has order N - 2.
pub fn second_difference(seq: &MomentSequence) -> Result<MomentSequence> {
    if seq.order() < 2 {
        return Err(Error::OrderTooSmall {
            order: seq.order(),
            required: 2,
        });
    }
    let g = seq.values();
    let beta: Vec<f64> = (0..g.len() - 2)
        .map(|n| g[n + 2] - 2.0 * g[n + 1] + g[n])
        .collect();
    MomentSequence::new(beta)
}

/// Tests conditional positive definiteness of an orbit-type sequence.
///
/// Finite-order CPD restricted to coefficient vectors with zero sum equals
/// positive definiteness of the second-difference Hankel in the difference
/// basis `d_i = e_i - e_{i+1}`; the shifted section additionally encodes
/// half-line support of the associated measure, which holds for every
/// bounded-operator orbit sequence. Requires order >= 4.
///
/// Differencing cancels up to the full magnitude of the input, so the
/// refutation threshold is floored at `eps_psd` times the input scale: a
/// certificate must exceed what rounding of the original sequence could
/// produce.
pub fn is_cpd(seq: &MomentSequence, tol: &ToleranceConfig) -> Result<PositivityVerdict> {
    if seq.order() < 4 {
        return Err(Error::OrderTooSmall {
            order: seq.order(),
            required: 4,
        });
    }
    let beta = second_difference(seq)?;
    Ok(stieltjes_scan(&beta, tol, tol.eps_psd * seq.max_abs()))
}

/// m-th forward difference `(D^m gamma)_n = sum_k (-1)^(m-k) C(m,k) gamma_{n+k}`.
///
/// Requires m >= 1 and order >= m; the result has order N - m.
pub fn finite_difference(seq: &MomentSequence, m: usize) -> Result<MomentSequence> {
    if m == 0 {
        return Err(Error::OrderTooSmall {
            order: seq.order(),
            required: 1,
        });
    }
    if seq.order() < m {
        return Err(Error::OrderTooSmall {
            order: seq.order(),
            required: m,
        });
    }
    let coeffs = binomial_row(m);
    let g = seq.values();
    let out: Vec<f64> = (0..g.len() - m)
        .map(|n| {
            let mut acc = 0.0;
            for (k, &c) in coeffs.iter().enumerate() {
                let sign = if (m - k) % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * c * g[n + k];
            }
            acc
        })
        .collect();
    MomentSequence::new(out)
}

fn binomial_row(m: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for k in 1..=m {
        let prev = row[k - 1];
        row.push(prev * (m - k + 1) as f64 / k as f64);
    }
    row
}

/// Kernel polynomial `Q_n` evaluated with the default singular band.
///
/// `Q_0 = Q_1 = 0`; for n >= 2 the closed form
/// `(x^n - 1 - n(x-1)) / (x-1)^2` is used away from x = 1 and the summed form
/// inside the band, where the closed form cancels catastrophically.
pub fn q_poly(n: usize, x: f64) -> f64 {
    q_poly_with_band(n, x, DEFAULT_SINGULAR_BAND)
}

/// `Q_n` with an explicit singular band around x = 1.
pub fn q_poly_with_band(n: usize, x: f64, singular_band: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if (x - 1.0).abs() < singular_band {
        q_poly_sum(n, x)
    } else {
        q_poly_closed(n, x)
    }
}

/// Summed form `sum_{j=0}^{n-2} (n - j - 1) x^j`, evaluated by Horner.
pub fn q_poly_sum(n: usize, x: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    for j in (0..=n - 2).rev() {
        acc = acc * x + (n - j - 1) as f64;
    }
    acc
}

/// Closed form `(x^n - 1 - n(x-1)) / (x-1)^2`; removable singularity at x = 1.
pub fn q_poly_closed(n: usize, x: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let d = x - 1.0;
    (x.powi(n as i32) - 1.0 - n as f64 * d) / (d * d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(values: &[f64]) -> MomentSequence {
        MomentSequence::new(values.to_vec()).unwrap()
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn sequence_invariants() {
        assert!(MomentSequence::new(vec![]).is_err());
        assert!(MomentSequence::new(vec![1.0, f64::NAN]).is_err());
        assert_eq!(seq(&[1.0, 2.0, 3.0]).order(), 2);
    }

    #[test]
    fn hankel_constant_sequence() {
        let h = hankel(&seq(&[1.0; 5]), 0, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h.get(i, j), 1.0);
            }
        }
    }

    #[test]
    fn hankel_shifted_powers_of_two() {
        let h = hankel(&seq(&[1.0, 2.0, 4.0, 8.0, 16.0]), 1, 2).unwrap();
        assert_eq!(h.get(0, 0), 2.0);
        assert_eq!(h.get(0, 1), 4.0);
        assert_eq!(h.get(1, 0), 4.0);
        assert_eq!(h.get(1, 1), 8.0);
    }

    #[test]
    fn hankel_direct_indexing() {
        let h = hankel(&seq(&[1.0, 2.0, 1.0, 2.0, 1.0]), 0, 2).unwrap();
        assert_eq!(h.get(0, 0), 1.0);
        assert_eq!(h.get(0, 1), 2.0);
        assert_eq!(h.get(1, 1), 1.0);
    }

    #[test]
    fn hankel_overflow_is_rejected() {
        let e = hankel(&seq(&[1.0, 2.0, 1.0]), 1, 2).unwrap_err();
        assert!(matches!(e, Error::IndexOverflow { .. }));
    }

    #[test]
    fn pd_point_mass_moments() {
        // Moments of a point mass at 2.
        let g: Vec<f64> = (0..=8).map(|n| 2f64.powi(n)).collect();
        let v = is_pd(&seq(&g), &tol()).unwrap();
        assert!(!v.is_refuted());
        assert_eq!(v.order_checked, 5);
    }

    #[test]
    fn pd_alternating_refuted_with_witness() {
        let v = is_pd(&seq(&[1.0, 2.0, 1.0, 2.0, 1.0]), &tol()).unwrap();
        assert!(v.is_refuted());
        let w = v.witness.unwrap();
        assert_eq!(w.offset, 0);
        assert_eq!(w.size, 2);
        // The witness attains a strictly negative form on the stated section.
        assert!(w.value < 0.0);
    }

    #[test]
    fn pd_all_ones_consistent() {
        let v = is_pd(&seq(&[1.0; 9]), &tol()).unwrap();
        assert!(!v.is_refuted());
    }

    #[test]
    fn stieltjes_two_atom_moments() {
        // Forward oracle: moments of 0.5*delta_1 + 0.5*delta_3.
        let g: Vec<f64> = (0..=8)
            .map(|n| 0.5 + 0.5 * 3f64.powi(n))
            .collect();
        let v = is_stieltjes(&seq(&g), &tol()).unwrap();
        assert!(!v.is_refuted());
    }

    #[test]
    fn stieltjes_signed_support_refuted_at_offset_one() {
        // Moments of a point mass at -1: PD, but not supported on the
        // half-line. The shifted 1x1 section is [-1].
        let g: Vec<f64> = (0..=7).map(|n| (-1f64).powi(n)).collect();
        let v = is_stieltjes(&seq(&g), &tol()).unwrap();
        assert!(v.is_refuted());
        assert_eq!(v.witness.unwrap().offset, 1);
    }

    #[test]
    fn stieltjes_all_ones_consistent() {
        let v = is_stieltjes(&seq(&[1.0; 8]), &tol()).unwrap();
        assert!(!v.is_refuted());
    }

    #[test]
    fn second_difference_affine_vanishes() {
        let g: Vec<f64> = (0..=6).map(|n| n as f64).collect();
        let b = second_difference(&seq(&g)).unwrap();
        assert!(b.values().iter().all(|&v| v == 0.0));
        assert_eq!(b.order(), 4);
    }

    #[test]
    fn second_difference_geometric() {
        // gamma_n = 4^n gives beta_n = (4-1)^2 * 4^n = 9 * 4^n.
        let g: Vec<f64> = (0..=6).map(|n| 4f64.powi(n)).collect();
        let b = second_difference(&seq(&g)).unwrap();
        for (n, &v) in b.values().iter().enumerate() {
            let expect = 9.0 * 4f64.powi(n as i32);
            assert!((v - expect).abs() <= 1e-12 * expect);
        }
    }

    #[test]
    fn second_difference_quadratic_forward_construction() {
        let g = seq(&[1.0, 1.8, 3.6, 6.4]);
        let b = second_difference(&g).unwrap();
        assert!((b.get(0) - 1.0).abs() < 1e-12);
        assert!((b.get(1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn second_difference_needs_order_two() {
        let e = second_difference(&seq(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(e, Error::OrderTooSmall { .. }));
    }

    #[test]
    fn cpd_quadratic_orbit_consistent() {
        let g: Vec<f64> = (0..=10)
            .map(|n| 1.0 + 0.3 * n as f64 + 0.5 * (n * n) as f64)
            .collect();
        let v = is_cpd(&seq(&g), &tol()).unwrap();
        assert!(!v.is_refuted());
    }

    #[test]
    fn cpd_atomic_moments_consistent() {
        // PD implies CPD: moments of an atomic measure.
        let g: Vec<f64> = (0..=10).map(|n| 0.7 + 0.3 * 2f64.powi(n)).collect();
        let v = is_cpd(&seq(&g), &tol()).unwrap();
        assert!(!v.is_refuted());
    }

    #[test]
    fn cpd_stampfli_orbit_refuted() {
        // Orbit of the eventually-constant shift with weights {1, 0.5, 1, ...}
        // at the first basis vector: {1, 1, 0.25, 0.25, ...}.
        let mut g = vec![1.0, 1.0];
        g.extend(std::iter::repeat(0.25).take(9));
        let v = is_cpd(&seq(&g), &tol()).unwrap();
        assert!(v.is_refuted());
        // beta_0 = 0.25 - 2 + 1 < 0: refuted already by the 1x1 section.
        assert_eq!(v.witness.unwrap().size, 1);
    }

    #[test]
    fn q_poly_degenerate_orders() {
        for x in [0.0, 0.5, 1.0, 3.7] {
            assert_eq!(q_poly(0, x), 0.0);
            assert_eq!(q_poly(1, x), 0.0);
        }
    }

    #[test]
    fn q_poly_both_forms_at_small_order() {
        assert_eq!(q_poly_sum(3, 2.0), 4.0);
        assert_eq!(q_poly_closed(3, 2.0), 4.0);
        assert_eq!(q_poly(3, 2.0), 4.0);
    }

    #[test]
    fn q_poly_at_one_is_triangular() {
        for n in 0..=40usize {
            let expect = (n * n.saturating_sub(1)) as f64 / 2.0;
            assert_eq!(q_poly(n, 1.0), expect);
        }
    }

    #[test]
    fn finite_difference_annihilates_low_degree() {
        let g: Vec<f64> = (0..=8).map(|n| (n + 1) as f64).collect();
        let d = finite_difference(&seq(&g), 3).unwrap();
        assert!(d.values().iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn finite_difference_quadratic_constant() {
        let g: Vec<f64> = (0..=8).map(|n| (n * n) as f64).collect();
        let d = finite_difference(&seq(&g), 2).unwrap();
        assert!(d.values().iter().all(|&v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn finite_difference_geometric_fixed_point() {
        let g: Vec<f64> = (0..=8).map(|n| 2f64.powi(n)).collect();
        let d = finite_difference(&seq(&g), 1).unwrap();
        for (n, &v) in d.values().iter().enumerate() {
            assert!((v - 2f64.powi(n as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_difference_needs_enough_order() {
        let e = finite_difference(&seq(&[1.0, 2.0]), 3).unwrap_err();
        assert!(matches!(e, Error::OrderTooSmall { .. }));
    }
}
