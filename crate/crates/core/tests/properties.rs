//! Cross-module invariants: algebraic identities between the positivity
//! layers, measure-transform laws, recovery roundtrips, and the class
//! hierarchy over a randomized spec corpus.

use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cpdshift_core::measure::{recover_measure, AtomicMeasure};
use cpdshift_core::moment::{
    hankel, is_cpd, is_pd, q_poly, second_difference, MomentSequence, PositivityStatus,
};
use cpdshift_core::roots::{random_corpus, CorpusOptions};
use cpdshift_core::shift::{classify_all, ClassStatus, ClassifyParams, ShiftSpec};
use cpdshift_core::tol::ToleranceConfig;
use cpdshift_core::triplet::{reconstruct_moments, recover_triplet, ScalarTriplet};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn arb_sequence(max_len: usize) -> impl Strategy<Value = MomentSequence> {
    prop::collection::vec(-10.0f64..10.0, 3..max_len)
        .prop_map(|v| MomentSequence::new(v).unwrap())
}

fn arb_measure() -> impl Strategy<Value = AtomicMeasure> {
    prop::collection::vec((0.0f64..5.0, 0.1f64..5.0), 0..4)
        .prop_map(|pairs| AtomicMeasure::from_atoms(pairs, 1e-9).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hankel_sections_are_exactly_symmetric(
        seq in arb_sequence(14),
        offset in 0usize..2,
        size_seed in 1usize..8,
    ) {
        let order = seq.order();
        if offset > order {
            return Ok(());
        }
        let max_size = (order - offset) / 2 + 1;
        let size = 1 + size_seed % max_size;
        let h = hankel(&seq, offset, size).unwrap();
        prop_assert!(h.is_symmetric());
        for i in 0..size {
            for j in 0..size {
                prop_assert_eq!(h.get(i, j), seq.get(i + j + offset));
            }
        }
    }

    /// The quadratic form of gamma over zero-sum coefficient vectors equals
    /// the second-difference Hankel form in the difference basis
    /// d_i = e_i - e_{i+1}.
    #[test]
    fn difference_basis_identity(
        seq in arb_sequence(14),
        coords in prop::collection::vec(-3.0f64..3.0, 1..6),
    ) {
        let order = seq.order();
        let k = coords.len().min(order / 2);
        if k == 0 {
            return Ok(());
        }
        let c = &coords[..k];
        // mu = sum_i c_i (e_i - e_{i+1}) has zero coefficient sum.
        let mut mu = vec![0.0f64; k + 1];
        for (i, &ci) in c.iter().enumerate() {
            mu[i] += ci;
            mu[i + 1] -= ci;
        }
        let mut gamma_form = 0.0;
        let mut scale = 1.0f64;
        for i in 0..=k {
            for j in 0..=k {
                let term = seq.get(i + j) * mu[i] * mu[j];
                gamma_form += term;
                scale = scale.max(term.abs());
            }
        }
        let beta = second_difference(&seq).unwrap();
        let mut beta_form = 0.0;
        for i in 0..k {
            for j in 0..k {
                beta_form += beta.get(i + j) * c[i] * c[j];
            }
        }
        prop_assert!(
            (gamma_form - beta_form).abs() <= 1e-12 * scale,
            "{} vs {}",
            gamma_form,
            beta_form
        );
    }

    /// Half-line moment sequences pass the PD test and are never CPD-refuted.
    #[test]
    fn pd_implies_cpd_for_stieltjes_inputs(mu in arb_measure()) {
        let seq = mu.moments(10).unwrap();
        let pd = is_pd(&seq, &tol()).unwrap();
        prop_assert!(!pd.is_refuted());
        let cpd = is_cpd(&seq, &tol()).unwrap();
        prop_assert!(!cpd.is_refuted());
    }

    /// For arbitrary real sequences, a PD pass rules out any plain-section
    /// CPD refutation at the orders the PD test covered. (A shifted-section
    /// refutation only certifies that no half-line measure exists, which PD
    /// alone does not promise.)
    #[test]
    fn pd_pass_excludes_plain_cpd_refutation(seq in arb_sequence(14)) {
        if seq.order() < 4 {
            return Ok(());
        }
        let pd = is_pd(&seq, &tol()).unwrap();
        if pd.status == PositivityStatus::ConsistentUpTo {
            let cpd = is_cpd(&seq, &tol()).unwrap();
            if let Some(w) = &cpd.witness {
                prop_assert_eq!(w.offset, 1, "plain refutation after PD pass: {:?}", w);
            }
        }
    }

    #[test]
    fn q_poly_recurrence_random_points(n in 0usize..40, x in 0.0f64..10.0) {
        let lhs = q_poly(n + 2, x) - 2.0 * q_poly(n + 1, x) + q_poly(n, x);
        let rhs = x.powi(n as i32);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
    }

    /// Transport law: moments of the pushforward are the stride subsequence
    /// of the original moments.
    #[test]
    fn pushforward_transport_identity(mu in arb_measure(), n in 1u32..5, order in 1usize..8) {
        let pushed = mu.pushforward_power(n).moments(order).unwrap();
        let long = mu.moments(order * n as usize).unwrap();
        for m in 0..=order {
            let a = pushed.get(m);
            let b = long.get(m * n as usize);
            prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{} vs {}", a, b);
        }
    }

    /// Reweighting by the squared geometric sum is integration against that
    /// density.
    #[test]
    fn reweight_identity(mu in arb_measure(), n in 1u32..5, m in 0usize..11) {
        let lhs = mu
            .reweight_geometric_square(n)
            .integrate(|x| x.powi(m as i32))
            .unwrap();
        let rhs = mu
            .integrate(|x| {
                let mut geo = 0.0;
                for _ in 0..n {
                    geo = geo * x + 1.0;
                }
                x.powi(m as i32) * geo * geo
            })
            .unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
    }

    /// Mass positivity and strict node ordering survive every transform.
    #[test]
    fn measure_invariants_preserved(mu in arb_measure(), n in 1u32..5, x0 in 0.0f64..5.0) {
        let check = |m: &AtomicMeasure| {
            for a in m.atoms() {
                prop_assert!(a.mass > 0.0);
                prop_assert!(a.node >= 0.0);
            }
            for w in m.atoms().windows(2) {
                prop_assert!(w[0].node < w[1].node);
            }
            Ok(())
        };
        check(&mu.pushforward_power(n))?;
        check(&mu.reweight_geometric_square(n))?;
        check(&mu.remove_atom(x0, &tol()))?;
    }
}

/// Quadrature roundtrip over 200 seeded random measures with up to 4 atoms
/// in [0, 5] and masses in [0.1, 10].
#[test]
fn measure_recovery_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d6561);
    let tol = tol();
    for trial in 0..200 {
        let atoms = rng.gen_range(1..=4usize);
        let mut nodes: Vec<f64> = Vec::new();
        while nodes.len() < atoms {
            let x: f64 = rng.gen_range(0.0..5.0);
            if nodes.iter().all(|&y| (x - y).abs() >= 0.1) {
                nodes.push(x);
            }
        }
        let pairs: Vec<(f64, f64)> = nodes
            .iter()
            .map(|&x| (x, rng.gen_range(0.1..10.0)))
            .collect();
        let mu = AtomicMeasure::from_atoms(pairs, tol.eps_node).unwrap();
        let r = mu.atoms().len();
        let order = (2 * r + 1).max(3);
        let seq = mu.moments(order).unwrap();
        let rec = recover_measure(&seq, &tol)
            .unwrap_or_else(|e| panic!("trial {trial}: recovery failed on {mu:?}: {e}"));
        assert_eq!(rec.atoms().len(), r, "trial {trial}: {mu:?} vs {rec:?}");
        let mass_tol = 1e-6 * mu.total_mass();
        for (a, b) in rec.atoms().iter().zip(mu.atoms()) {
            assert!(
                (a.node - b.node).abs() <= 1e-6,
                "trial {trial}: node {} vs {}",
                a.node,
                b.node
            );
            assert!(
                (a.mass - b.mass).abs() <= mass_tol,
                "trial {trial}: mass {} vs {}",
                a.mass,
                b.mass
            );
        }
    }
}

/// Two triplets with the same reconstructed moments agree as triplets; here
/// via the recovery roundtrip on seeded random triplets.
#[test]
fn triplet_uniqueness_shadow() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x756e69);
    let tol = tol();
    let mut done = 0;
    while done < 50 {
        let atoms = rng.gen_range(0..=3usize);
        let c = if rng.gen_bool(0.5) {
            0.0
        } else {
            rng.gen_range(0.0..1.0)
        };
        let exclusion = if c > 0.0 { 0.25 } else { 0.15 };
        let mut nodes: Vec<f64> = Vec::new();
        let mut guard = 0;
        while nodes.len() < atoms && guard < 50 {
            guard += 1;
            let x: f64 = rng.gen_range(0.0..5.0);
            if (x - 1.0).abs() >= exclusion && nodes.iter().all(|&y| (x - y).abs() >= 0.25) {
                nodes.push(x);
            }
        }
        let pairs: Vec<(f64, f64)> = nodes
            .iter()
            .map(|&x| (x, rng.gen_range(0.1..3.0)))
            .collect();
        let f_measure = AtomicMeasure::from_atoms(pairs, tol.eps_node).unwrap();
        let b = rng.gen_range(-1.0..2.0);
        let Ok(t) = ScalarTriplet::new(b, c, f_measure, &tol) else {
            continue;
        };
        let r = t.f_measure().atoms().len() + usize::from(t.c() > 0.0);
        let order = 2 * r + 4;
        let seq = reconstruct_moments(&t, order, &tol).unwrap();
        if seq.values().iter().any(|&v| v <= 1e-9) {
            continue;
        }
        let t2 = recover_triplet(&seq, &tol).expect("roundtrip recovery");
        let seq2 = reconstruct_moments(&t2, order, &tol).unwrap();
        for n in 0..=order {
            let a = seq.get(n);
            let b2 = seq2.get(n);
            assert!(
                (a - b2).abs() <= 1e-8 * a.abs().max(1.0),
                "moments diverge at {n}: {a} vs {b2}"
            );
        }
        assert!((t2.b() - t.b()).abs() <= 1e-6);
        assert!((t2.c() - t.c()).abs() <= 1e-6);
        assert_eq!(t2.f_measure().atoms().len(), t.f_measure().atoms().len());
        done += 1;
    }
}

/// Class inclusions over 500 random specs: quasinormal implies subnormal,
/// subnormal excludes a CPD refutation, and Berger-generated specs are never
/// refuted for either.
#[test]
fn hierarchy_over_random_corpus() {
    let tol = tol();
    let params = ClassifyParams::default();
    let corpus = random_corpus(0x686965, 500, &CorpusOptions::default());
    for (i, shift) in corpus.iter().enumerate() {
        let report = classify_all(shift, &params, &tol)
            .unwrap_or_else(|e| panic!("spec {i}: {e}"));
        if report.quasinormal.status == ClassStatus::ExactTrue {
            assert!(
                report.subnormal.status.holds(),
                "spec {i}: quasinormal but subnormal {:?}",
                report.subnormal.status
            );
        }
        if report.subnormal.status.holds() {
            assert_ne!(
                report.cpd.status,
                ClassStatus::Refuted,
                "spec {i}: subnormal but CPD refuted"
            );
        }
        if matches!(shift.spec(), ShiftSpec::Berger(_)) {
            assert_eq!(report.subnormal.status, ClassStatus::ExactTrue, "spec {i}");
            assert_eq!(
                report.cpd.status,
                ClassStatus::ConsistentUpTo,
                "spec {i}: Berger spec CPD-refuted"
            );
        }
    }
}
