use cpdshift_core::measure::{recover_measure, AtomicMeasure};
use cpdshift_core::moment::second_difference;
use cpdshift_core::roots::{random_probability_measure, CorpusOptions};
use cpdshift_core::shift::{BergerSpec, ShiftSpec, WeightedShift};
use cpdshift_core::tol::ToleranceConfig;
use cpdshift_core::triplet::{power_transform, reconstruct_moments, recover_triplet, ScalarTriplet};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TRIPLET_SALT: u64 = 0x74726970;
const BERGER_SALT: u64 = 0x62657267;

fn random_triplet(rng: &mut ChaCha8Rng, tol: &ToleranceConfig) -> (ScalarTriplet, usize) {
    loop {
        let atom_count = rng.gen_range(0..=4usize);
        let mut nodes: Vec<f64> = Vec::new();
        let mut attempts = 0;
        while nodes.len() < atom_count && attempts < 100 {
            attempts += 1;
            let x: f64 = rng.gen_range(0.0..5.0);
            if (x - 1.0).abs() < 0.1 { continue; }
            if nodes.iter().any(|&y| (x - y).abs() < 0.25) { continue; }
            nodes.push(x);
        }
        let pairs: Vec<(f64, f64)> = nodes.iter().map(|&x| (x, rng.gen_range(0.05..5.0))).collect();
        let c = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..1.0) };
        let b = rng.gen_range(-2.0..2.0);
        let f_measure = match AtomicMeasure::from_atoms(pairs, tol.eps_node) { Ok(m) => m, Err(_) => continue };
        let Ok(t) = ScalarTriplet::new(b, c, f_measure, tol) else { continue };
        let atoms = t.f_measure().atoms().len() + usize::from(t.c() > 0.0);
        let order = 2 * atoms + 4;
        let Ok(seq) = reconstruct_moments(&t, order, tol) else { continue };
        if seq.values().iter().any(|&v| v <= 1e-9) { continue; }
        return (t, order);
    }
}

fn main() {
    let tol = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7 ^ TRIPLET_SALT);
    for trial in 0..=108 {
        let (t, order) = random_triplet(&mut rng, &tol);
        if trial < 108 { continue; }
        println!("trial {trial}: b={} c={} order={}", t.b(), t.c(), order);
        println!("F atoms: {:?}", t.f_measure().atoms());
        let seq = reconstruct_moments(&t, order, &tol).unwrap();
        let back = recover_triplet(&seq, &tol).unwrap();
        println!("back: b={} c={} F={:?}", back.b(), back.c(), back.f_measure().atoms());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7 ^ BERGER_SALT);
    let options = CorpusOptions::default();
    for i in 0..=8 {
        let mu = random_probability_measure(&mut rng, &options);
        if i < 8 { continue; }
        println!("\nshift 8 mu: {:?}", mu.atoms());
        let shift = WeightedShift::new(ShiftSpec::Berger(BergerSpec { measure: mu.clone() })).unwrap();
        let orbit = shift.orbit_moments(0, 24).unwrap();
        let t = recover_triplet(&orbit, &tol).unwrap();
        println!("t: b={} c={} F={:?}", t.b(), t.c(), t.f_measure().atoms());
        let n = 3u32;
        let predicted = power_transform(&t, n).unwrap();
        println!("predicted M_3: {:?}", predicted.atoms());
        let long = shift.orbit_moments(0, 24 * n as usize).unwrap();
        let stride = long.stride(n as usize).unwrap();
        let beta = second_difference(&stride).unwrap();
        let direct = recover_measure(&beta, &tol).unwrap();
        println!("direct M_3:    {:?}", direct.atoms());
    }
}
