mod support;

use std::f64::consts::{FRAC_PI_2, PI};

use photon_focus::correlations::{g_m_closed_form, g_m_from_matrix, g_m_operator, g_m_paths, PermanentMethod};
use photon_focus::{DetectionConfig, EmitterChain, PhaseMatrix};
use support::{brute_force_g, factorial, rel_diff, SplitMix};

#[test]
fn all_routes_match_brute_force() {
    let mut rng = SplitMix(2024);
    for n in 1..=7 {
        for m in 1..=n {
            for _ in 0..8 {
                let kd = rng.uniform(0.5, 2.0 * PI);
                let angles: Vec<f64> = (0..m).map(|_| rng.uniform(-FRAC_PI_2, FRAC_PI_2)).collect();
                let chain = EmitterChain::new(n, kd).unwrap();
                let det = DetectionConfig::new(angles.clone()).unwrap();
                let oracle = brute_force_g(n, kd, &angles);
                let paths = g_m_paths(&chain, &det).unwrap().value;
                let op = g_m_operator(&chain, &det).unwrap().value;
                assert!(rel_diff(paths, oracle) < 1e-9, "paths n={n} m={m}: {paths} vs {oracle}");
                assert!(rel_diff(op, oracle) < 1e-9, "operator n={n} m={m}: {op} vs {oracle}");
            }
        }
    }
}

#[test]
fn closed_form_matches_paths_on_grid() {
    for n in 2..=8 {
        let chain = EmitterChain::new(n, PI).unwrap();
        for m in 2..=n {
            for theta1 in [0.0, 0.3] {
                for k in 0..101 {
                    let theta2 = -FRAC_PI_2 + PI * k as f64 / 100.0;
                    let cf = g_m_closed_form(n, m, theta1, theta2, PI).unwrap().value;
                    let det = DetectionConfig::heralded(m, theta1, theta2).unwrap();
                    let paths = g_m_paths(&chain, &det).unwrap().value;
                    assert!(
                        rel_diff(cf, paths) < 1e-8,
                        "n={n} m={m} theta1={theta1} theta2={theta2}: {cf} vs {paths}"
                    );
                }
            }
        }
    }
}

#[test]
fn coincident_detectors_give_factorial_squared() {
    for n in 1..=8 {
        let expected = factorial(n).powi(2);
        for theta1 in [0.0, 0.4, -1.1] {
            let chain = EmitterChain::new(n, 2.7).unwrap();
            let det = DetectionConfig::new(vec![theta1; n]).unwrap();
            assert!(rel_diff(g_m_paths(&chain, &det).unwrap().value, expected) < 1e-9);
            assert!(rel_diff(g_m_operator(&chain, &det).unwrap().value, expected) < 1e-9);
            if n >= 2 {
                let cf = g_m_closed_form(n, n, theta1, theta1, 2.7).unwrap().value;
                assert!(rel_diff(cf, expected) < 1e-9);
            }
        }
    }
}

#[test]
fn emitter_index_shift_leaves_g_unchanged() {
    let mut rng = SplitMix(7);
    for _ in 0..60 {
        let n = rng.int(1, 7);
        let m = rng.int(1, n);
        let kd = rng.uniform(0.5, 2.0 * PI);
        let angles: Vec<f64> = (0..m).map(|_| rng.uniform(-FRAC_PI_2, FRAC_PI_2)).collect();
        let chain = EmitterChain::new(n, kd).unwrap();
        let det = DetectionConfig::new(angles).unwrap();
        let base = g_m_from_matrix(&PhaseMatrix::new(&chain, &det), PermanentMethod::Ryser).unwrap();
        for offset in [-3, 1, 5, 17] {
            let shifted = PhaseMatrix::with_index_offset(&chain, &det, offset);
            let g = g_m_from_matrix(&shifted, PermanentMethod::Ryser).unwrap();
            assert!(rel_diff(g, base) < 1e-10, "offset {offset}: {g} vs {base}");
        }
    }
}

#[test]
fn periodic_in_sine_with_period_two_pi_over_kd() {
    let mut rng = SplitMix(99);
    for _ in 0..60 {
        let n = rng.int(1, 6);
        let m = rng.int(1, n);
        let kd = rng.uniform(1.0, 2.0 * PI);
        let sines: Vec<f64> = (0..m).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let base = g_m_from_matrix(&PhaseMatrix::from_sines(n, kd, &sines).unwrap(), PermanentMethod::Ryser).unwrap();
        let j = rng.int(0, m - 1);
        let mut shifted = sines.clone();
        shifted[j] += 2.0 * PI / kd;
        let g = g_m_from_matrix(
            &PhaseMatrix::from_sines(n, kd, &shifted).unwrap(),
            PermanentMethod::Ryser,
        )
        .unwrap();
        assert!(rel_diff(g, base) < 1e-9, "{g} vs {base}");
    }
    // A physical pair: with kd = 2 pi, sin theta = -0.5 and +0.5 differ by one period.
    let chain = EmitterChain::new(4, 2.0 * PI).unwrap();
    let a = g_m_paths(&chain, &DetectionConfig::new(vec![0.2, (-0.5f64).asin()]).unwrap())
        .unwrap()
        .value;
    let b = g_m_paths(&chain, &DetectionConfig::new(vec![0.2, 0.5f64.asin()]).unwrap())
        .unwrap()
        .value;
    assert!(rel_diff(a, b) < 1e-9);
}

#[test]
fn closed_form_floor_and_peak_values() {
    // At a Dirichlet zero only the floor N!(m-1)!/(N-m)! (N-m)/(N-1) remains.
    for n in 3..=8 {
        for m in 2..n {
            let zero = (2.0 / n as f64).asin();
            let floor = factorial(n) * factorial(m - 1) / factorial(n - m) * (n - m) as f64 / (n - 1) as f64;
            let cf = g_m_closed_form(n, m, 0.0, zero, PI).unwrap().value;
            assert!(rel_diff(cf, floor) < 1e-10, "n={n} m={m}: {cf} vs {floor}");
            assert!(rel_diff(brute_force_g(n, PI, &[vec![0.0; m - 1], vec![zero]].concat()), floor) < 1e-9);
        }
    }
}
