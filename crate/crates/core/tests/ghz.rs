use ensemble_verify::arith::{Exact, Prob};
use ensemble_verify::crosscheck::ghz_noise_at;
use ensemble_verify::ghz::{
    ghz_aux_dim, ghz_dense, ghz_density, ghz_depolarize, ghz_enumerate, ghz_failure_probability, ghz_monte_carlo,
    make_ghz, mcx_update, GHZDiagonalState, GhzRounds,
};
use proptest::prelude::*;

fn noise(parties: usize) -> GHZDiagonalState<Exact> {
    ghz_noise_at(Exact::from_ratio(17, 20), parties).unwrap()
}

#[test]
fn monte_carlo_agrees_with_exact() {
    let exact = noise(3);
    let f = exact.to_f64();
    for n in [1, 3, 6] {
        for rounds in [GhzRounds::Amplitude, GhzRounds::AmplitudeThenPhase] {
            let p = ghz_failure_probability(&exact, n, rounds).unwrap().to_f64();
            let est = ghz_monte_carlo(&f, n, rounds, 200_000, 7 + n, 2).unwrap();
            let sigma = (p * (1.0 - p) / 2e5).sqrt();
            assert!((est.estimate - p).abs() <= 4.0 * sigma, "n={n} {rounds:?}: {} vs {p}", est.estimate);
        }
    }
}

#[test]
fn monte_carlo_is_reproducible() {
    let f = noise(4).to_f64();
    let a = ghz_monte_carlo(&f, 5, GhzRounds::AmplitudeThenPhase, 30_000, 3, 1).unwrap();
    let b = ghz_monte_carlo(&f, 5, GhzRounds::AmplitudeThenPhase, 30_000, 3, 4).unwrap();
    assert_eq!(a, b);
}

#[test]
fn dense_matches_exact_for_small_ensembles() {
    let exact = noise(3);
    let f = exact.to_f64();
    for n in 1..=3 {
        let out = ghz_dense(&f, n).unwrap();
        let amp = ghz_failure_probability(&exact, n, GhzRounds::Amplitude).unwrap().to_f64();
        let two = ghz_failure_probability(&exact, n, GhzRounds::AmplitudeThenPhase).unwrap().to_f64();
        assert!((out.amplitude - amp).abs() < 1e-10 && (out.two_round - two).abs() < 1e-10, "n={n}");
    }
}

#[test]
fn acceptance_decreases_with_ensemble_size() {
    let f = noise(3).to_f64();
    for rounds in [GhzRounds::Amplitude, GhzRounds::AmplitudeThenPhase] {
        let values: Vec<f64> = (1..=40).map(|n| ghz_failure_probability(&f, n, rounds).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-15), "{rounds:?}");
    }
}

#[test]
fn depolarizing_recovers_diagonal_weights() {
    let f = noise(3).to_f64();
    let back = ghz_depolarize(&ghz_density(&f).unwrap()).unwrap();
    assert!((back.fidelity - f.fidelity).abs() < 1e-12);
    assert!((back.lambda0 - f.lambda0).abs() < 1e-12);
    for (a, b) in back.lambda.iter().zip(&f.lambda) {
        assert!((a - b).abs() < 1e-12);
    }
    let target = make_ghz(3, 0, 0).unwrap();
    assert!((ghz_density(&f).unwrap().expectation(&target).unwrap() - f.fidelity).abs() < 1e-12);
}

#[test]
fn aux_dimension_covers_ensemble() {
    for n in 1..=64 {
        let d = ghz_aux_dim(n);
        assert!(d.is_power_of_two() && d > n && d >= 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mcx_updates_stay_in_range(bits in proptest::collection::vec(0u8..2, 4), aux in proptest::collection::vec(0u64..8, 3)) {
        let out = mcx_update(&bits, &aux, 8).unwrap();
        prop_assert!(out.iter().all(|&v| v < 8));
        // an all-equal control leaves the counters unchanged
        let flat = vec![bits[0]; 4];
        prop_assert_eq!(mcx_update(&flat, &aux, 8).unwrap(), aux.clone());
    }

    #[test]
    fn dp_equals_enumeration(num in 50i64..=100, n in 1u64..=4) {
        let g = ghz_noise_at(Exact::from_ratio(num, 100), 3).unwrap();
        for rounds in [GhzRounds::Amplitude, GhzRounds::AmplitudeThenPhase] {
            prop_assert_eq!(ghz_failure_probability(&g, n, rounds).unwrap(), ghz_enumerate(&g, n, rounds).unwrap());
        }
    }
}
