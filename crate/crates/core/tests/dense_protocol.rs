use ensemble_verify::analytic::failure_probability;
use ensemble_verify::arith::{ceil_log2, parse_exact, Prob};
use ensemble_verify::dense::{
    apply_bcx, apply_bcx_inverse, apply_bgcx, dense_run, make_qudit_bell, measure_parity_pair, noise_density,
    total_variation, twirl_to_werner, Pair, StateVector,
};
use ensemble_verify::model::NoiseModel;
use ensemble_verify::oracle::{enumerate_shift_distribution, enumerate_strategy_failure};
use ensemble_verify::protocol::{Strategy, StrategySpec};
use ensemble_verify::Error;
use proptest::prelude::*;

#[test]
fn dense_acceptance_matches_oracle() {
    for f in ["0.6", "0.85"] {
        let fx = parse_exact(f).unwrap();
        let ff: f64 = f.parse().unwrap();
        for n in 1..=4u64 {
            let k = ceil_log2(n + 1);
            let mut strategies = vec![
                Strategy::Rank2Full,
                Strategy::Rank2Subspace { rounds: 1 },
                Strategy::WernerFull,
                Strategy::WernerSubspace { rounds: 1 },
                Strategy::SingleCopyBaseline,
            ];
            // the embedded run at n = 4 alone takes minutes
            if n <= 3 {
                strategies.push(Strategy::EmbedEng { embedded: k });
            }
            for strategy in strategies {
                let spec = StrategySpec::new(strategy, n).unwrap();
                let run = match dense_run(&spec, &strategy.design_noise(ff).unwrap()) {
                    Ok(run) => run,
                    Err(Error::Resource(_)) => continue,
                    Err(e) => panic!("{strategy} n={n}: {e}"),
                };
                let oracle = enumerate_strategy_failure(&spec, &strategy.design_noise(fx.clone()).unwrap()).unwrap();
                assert!((run.acceptance - oracle.to_f64()).abs() < 1e-10, "{strategy} F={f} n={n}");
            }
        }
    }
}

#[test]
fn dense_index_distribution_matches_oracle() {
    let fx = parse_exact("0.75").unwrap();
    for n in 1..=3u64 {
        let spec = StrategySpec::new(Strategy::WernerFull, n).unwrap();
        let run = dense_run(&spec, &NoiseModel::werner(0.75).unwrap()).unwrap();
        let d = spec.aux_dim().unwrap();
        let oracle = enumerate_shift_distribution(&NoiseModel::werner(fx.clone()).unwrap(), n, d).unwrap().to_f64();
        assert!(total_variation(&run.index_distribution, &oracle) < 1e-10, "n={n}");
    }
}

#[test]
fn counter_gates_invert_and_oppose() {
    let control = ensemble_verify::dense::make_bell(1, 1).unwrap();
    let start = control.tensor(&make_qudit_bell(8, 0, 3).unwrap()).unwrap();
    let (c, t) = (Pair::new(0, 1), Pair::new(2, 3));
    let mut s = start.clone();
    apply_bcx(&mut s, c, t).unwrap();
    assert!(s.fidelity(&start).unwrap() < 0.5);
    apply_bcx_inverse(&mut s, c, t).unwrap();
    assert!(s.fidelity(&start).unwrap() > 1.0 - 1e-12);
    apply_bcx(&mut s, c, t).unwrap();
    apply_bgcx(&mut s, c, t).unwrap();
    assert!(s.fidelity(&start).unwrap() > 1.0 - 1e-12);
}

#[test]
fn twirling_a_werner_state_is_idempotent() {
    for f in [0.3, 0.7, 0.95] {
        let rho = noise_density(&NoiseModel::werner(f).unwrap()).unwrap();
        match twirl_to_werner(&rho).unwrap() {
            NoiseModel::Werner { fidelity } => assert!((fidelity - f).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }
}

#[test]
fn simulator_rejects_oversized_runs() {
    let spec = StrategySpec::new(Strategy::WernerFull, 40).unwrap();
    assert!(matches!(dense_run(&spec, &NoiseModel::werner(0.9).unwrap()), Err(Error::Resource(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parity_branches_are_complete(d_exp in 1u32..=3, j in 0usize..8, m in 0usize..8) {
        let d = 1usize << d_exp;
        let (j, m) = (j % d, m % d);
        let state: StateVector = make_qudit_bell(d, m, j).unwrap();
        let total: f64 = measure_parity_pair(&state, Pair::new(0, 1)).unwrap().iter().map(|r| r.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dense_float_acceptance_within_unit_interval(num in 30u32..=100, n in 1u64..=3) {
        let f = num as f64 / 100.0;
        let spec = StrategySpec::new(Strategy::WernerFull, n).unwrap();
        let noise = NoiseModel::werner(f).unwrap();
        let a = dense_run(&spec, &noise).unwrap().acceptance;
        prop_assert!((a - failure_probability(&spec, &noise).unwrap()).abs() < 1e-10);
    }
}
