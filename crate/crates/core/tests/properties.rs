use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kgcur::covariance::{alpha_lightcone, alpha_invariant, OnShell};
use kgcur::currents::compute_current;
use kgcur::dynamics::evolve;
use kgcur::oracle::{oracle_vs_spectral, PlaneWaveSet};
use kgcur::spectral::{forward_transform, inverse_transform, ComplexField, SpectralGrid};
use kgcur::state::{gaussian_state, Branch, MomentumState};
use kgcur::verify::random_two_branch_state;

fn grid() -> SpectralGrid {
    SpectralGrid::new(128, 12.0).unwrap()
}

fn field(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(r, i)| Complex64::new(r, i)), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_is_unitary_and_invertible(v in field(128)) {
        let g = grid();
        let f = ComplexField::position(v.clone());
        let spec = forward_transform(&f, &g).unwrap();
        let back = inverse_transform(&spec, &g).unwrap();
        let scale = v.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for (a, b) in v.iter().zip(&back.values) {
            prop_assert!((a - b).norm() <= 1e-13 * scale);
        }
        let nx: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.dx();
        let np: f64 = spec.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.dp();
        prop_assert!((nx - np).abs() <= 1e-12 * nx.max(1.0));
    }

    #[test]
    fn transform_is_linear(u in field(128), v in field(128), c in -3.0..3.0f64) {
        let g = grid();
        let w: Vec<Complex64> = u.iter().zip(&v).map(|(a, b)| a * c + b).collect();
        let fu = forward_transform(&ComplexField::position(u), &g).unwrap().values;
        let fv = forward_transform(&ComplexField::position(v), &g).unwrap().values;
        let fw = forward_transform(&ComplexField::position(w), &g).unwrap().values;
        for j in 0..g.n {
            prop_assert!((fw[j] - (fu[j] * c + fv[j])).norm() <= 1e-12);
        }
    }

    #[test]
    fn random_states_are_positive_and_subluminal(seed in any::<u64>(), t in -30.0..30.0f64) {
        let s = evolve(&random_two_branch_state(&mut ChaCha8Rng::seed_from_u64(seed), grid()), t);
        let c = compute_current(&s);
        prop_assert!(c.min_rho() >= -1e-12);
        prop_assert!(c.max_superluminal_excess() <= 1e-10);
    }

    #[test]
    fn evolution_composes(seed in any::<u64>(), t1 in -10.0..10.0f64, t2 in -10.0..10.0f64) {
        let s = random_two_branch_state(&mut ChaCha8Rng::seed_from_u64(seed), grid());
        let once = evolve(&s, t1 + t2);
        let twice = evolve(&evolve(&s, t1), t2);
        for (x, y) in once.a.iter().zip(&twice.a).chain(once.b.iter().zip(&twice.b)) {
            prop_assert!((x - y).norm() <= 1e-12);
        }
        prop_assert!((once.norm() - s.norm()).abs() <= 1e-12);
    }

    #[test]
    fn total_charge_is_time_independent(seed in any::<u64>(), t in 0.0..50.0f64) {
        let s = random_two_branch_state(&mut ChaCha8Rng::seed_from_u64(seed), grid());
        let q0 = compute_current(&s).integral();
        let qt = compute_current(&evolve(&s, t)).integral();
        prop_assert!((q0 - qt).abs() <= 1e-10 * q0);
    }

    #[test]
    fn json_round_trip_is_exact(seed in any::<u64>(), t in -5.0..5.0f64) {
        let s = evolve(&random_two_branch_state(&mut ChaCha8Rng::seed_from_u64(seed), grid()), t);
        let back = MomentumState::from_json(&s.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn spectral_current_matches_plane_wave_sums(seed in any::<u64>(), k in 1usize..=8, t in -20.0..20.0f64) {
        let g = SpectralGrid::new(128, 8.0).unwrap();
        let pw = PlaneWaveSet::random_on_grid(&mut ChaCha8Rng::seed_from_u64(seed), k, &g, true).unwrap();
        prop_assert!(oracle_vs_spectral(&pw, g, t).unwrap() <= 1e-10);
    }

    #[test]
    fn alpha_forms_agree(p in -50.0..50.0f64, k in -50.0..50.0f64, neg in any::<bool>()) {
        let b = if neg { Branch::Negative } else { Branch::Positive };
        let (p, k) = (OnShell::new(p, b), OnShell::new(k, b));
        let ainv = alpha_invariant(p, k).unwrap();
        prop_assert!((ainv - alpha_lightcone(p, k, true).unwrap()).abs() <= 1e-12);
        prop_assert!((ainv - alpha_lightcone(p, k, false).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn mirrored_packet_has_odd_flux(sigma in 0.2..3.0f64) {
        let g = SpectralGrid::for_gaussian(sigma, 0.0).unwrap();
        let c = compute_current(&evolve(&gaussian_state(0.0, sigma, 0.0, g).unwrap(), 1.0));
        let peak = c.max_rho();
        // x_k and x_{n-k} are mirror images; x_0 = -L/2 has no partner
        for k in 1..g.n {
            prop_assert!((c.j[k] + c.j[g.n - k]).abs() <= 1e-10 * peak);
            prop_assert!((c.rho[k] - c.rho[g.n - k]).abs() <= 1e-10 * peak);
        }
    }
}
