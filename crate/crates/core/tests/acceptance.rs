//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;

use ensemble_verify::analytic::{
    isotropic_delta, isotropic_delta_subspace, copies_required, rank2_delta_full, rank2_delta_subspace,
    single_copy_copies, subspace_asymptotic_copies, werner_delta_full, werner_delta_subspace,
};
use ensemble_verify::arith::{ceil_log2, parse_exact, Exact, Prob};
use ensemble_verify::dense::{
    apply_bcx, apply_eng, dense_run, apply_eng_inverse, difference_distribution, embed_pairs, make_bell, make_qudit_bell,
    measure_parity_pair, noise_density, pure_trace_distance, reembed_and_correct, trace_distance, twirl_channel,
    twirl_to_isotropic, DensityMatrix, Pair, StateVector,
};
use ensemble_verify::ghz::{
    ghz_amplitude_distribution, ghz_dense, ghz_enumerate, ghz_failure_probability, ghz_verify, GHZDiagonalState,
    GhzRounds, GhzSample,
};
use ensemble_verify::model::{fidelity_to_q, NoiseModel, Verdict};
use ensemble_verify::oracle::enumerate_strategy_failure;
use ensemble_verify::protocol::montecarlo::batch_rng;
use ensemble_verify::protocol::{monte_carlo, Strategy, StrategySpec};
use ensemble_verify::reproduce::{default_grid, relaxed_ratio};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(text: &str) -> Exact {
    parse_exact(text).unwrap()
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|err| err.to_string())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut worst_float: f64 = 0.0;
    for f in ["0.5", "0.7", "0.9", "0.99"] {
        let fx = q(f);
        let ff: f64 = f.parse().unwrap();
        for n in 1..=10u64 {
            let k = ceil_log2(n + 1);
            let mut compare = |strategy: Strategy, exact: Exact, float: f64| -> Result<(), String> {
                let spec = e(StrategySpec::new(strategy, n))?;
                let noise = e(strategy.design_noise(fx.clone()))?;
                let oracle = e(enumerate_strategy_failure(&spec, &noise))?;
                ensure(exact == oracle, || format!("{strategy} F={f} n={n}: {exact} != {oracle}"))?;
                worst_float = worst_float.max((float - oracle.to_f64()).abs());
                cases += 1;
                Ok(())
            };
            let r2 = e(rank2_delta_full(fx.clone(), n))?;
            ensure(r2 == Prob::powu(&fx, n), || format!("rank-2 F={f} n={n} is not F^n"))?;
            compare(Strategy::Rank2Full, r2, e(rank2_delta_full(ff, n))?)?;
            compare(Strategy::WernerFull, e(werner_delta_full(fx.clone(), n))?, e(werner_delta_full(ff, n))?)?;
            for m in 1..=k {
                compare(
                    Strategy::Rank2Subspace { rounds: m },
                    e(rank2_delta_subspace(fx.clone(), n, m))?,
                    e(rank2_delta_subspace(ff, n, m))?,
                )?;
                compare(
                    Strategy::WernerSubspace { rounds: m },
                    e(werner_delta_subspace(fx.clone(), n, m))?,
                    e(werner_delta_subspace(ff, n, m))?,
                )?;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst_float <= 1e-12, || format!("float deviation {worst_float:.3e} > 1e-12"))?;
    ensure(secs < 60.0, || format!("runtime {secs:.1}s >= 60s"))?;
    Ok(format!("{cases} cases exact, float max deviation {worst_float:.2e}, {secs:.2}s"))
}

fn isotropic_consistency() -> Outcome {
    let mut cases = 0;
    for f in default_grid() {
        let fx = q(&format!("{f}"));
        let qx = e(fidelity_to_q(fx.clone(), 2))?;
        for n in 1..=12u64 {
            let main = e(werner_delta_full(fx.clone(), n))?;
            let app = e(isotropic_delta(qx.clone(), n))?;
            ensure(main == app, || format!("F={f} n={n}: {main} != {app}"))?;
            cases += 1;
            for m in 1..=ceil_log2(n + 1) {
                let main = e(werner_delta_subspace(fx.clone(), n, m))?;
                let app = e(isotropic_delta_subspace(qx.clone(), n, m))?;
                ensure(main == app, || format!("F={f} n={n} m={m}: {main} != {app}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} exact equalities"))
}

fn monte_carlo_validation() -> Outcome {
    let combos: [(Strategy, &str, u64); 12] = [
        (Strategy::Rank2Full, "0.9", 5),
        (Strategy::Rank2Full, "0.7", 3),
        (Strategy::Rank2Subspace { rounds: 1 }, "0.8", 6),
        (Strategy::WernerFull, "0.7", 2),
        (Strategy::WernerFull, "0.9", 9),
        (Strategy::WernerSubspace { rounds: 1 }, "0.7", 3),
        (Strategy::WernerSubspace { rounds: 2 }, "0.9", 7),
        (Strategy::EmbedEng { embedded: 2 }, "0.9", 3),
        (Strategy::EmbedEng { embedded: 3 }, "0.8", 7),
        (Strategy::EmbedEngSubspace { embedded: 3, rounds: 1 }, "0.9", 5),
        (Strategy::DirectEmbedMeasure { embedded: 2 }, "0.9", 0),
        (Strategy::SingleCopyBaseline, "0.9", 10),
    ];
    let trials = 1_000_000;
    let workers = std::thread::available_parallelism().map_or(2, |n| n.get()).max(2);
    let mut worst: f64 = 0.0;
    for (i, (strategy, f, n)) in combos.into_iter().enumerate() {
        let spec = e(StrategySpec::new(strategy, n))?;
        let p = e(enumerate_strategy_failure(&spec, &e(strategy.design_noise(q(f)))?))?.to_f64();
        let noise = e(strategy.design_noise(f.parse::<f64>().unwrap()))?;
        let seed = 1000 + i as u64;
        let est = e(monte_carlo(&spec, &noise, trials, seed, workers))?;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let z = (est.estimate - p).abs() / sigma;
        ensure(z <= 4.0, || format!("{strategy} F={f} n={n}: estimate {} vs {p} ({z:.2} sigma)", est.estimate))?;
        worst = worst.max(z);
        if i % 4 == 0 {
            let single = e(monte_carlo(&spec, &noise, trials, seed, 1))?;
            ensure(single == est, || format!("{strategy}: result depends on worker count"))?;
        }
    }
    Ok(format!("12 combinations at 1e6 trials, max {worst:.2} sigma, worker-count independent"))
}

fn pairs_close(a: &StateVector, b: &StateVector, tol: f64) -> Result<f64, String> {
    let fid = e(a.fidelity(b))?;
    ensure(fid >= 1.0 - tol, || format!("fidelity {fid}"))?;
    Ok(fid)
}

fn gate_level() -> Outcome {
    let mut cases = 0;
    let mut worst: f64 = 1.0;
    let control = Pair::new(0, 1);
    let target = Pair::new(2, 3);
    for d in [2usize, 4, 8] {
        for j in 0..d {
            let aux = e(make_qudit_bell(d, 0, j))?;
            let shifted = |delta: i64| make_qudit_bell(d, 0, (j as i64 + delta).rem_euclid(d as i64) as usize);
            for (m, n) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
                let c = e(StateVector::basis(vec![2, 2], &[m, n]))?;
                let mut s = e(c.tensor(&aux))?;
                e(apply_bcx(&mut s, control, target))?;
                let want = e(c.tensor(&e(shifted(n as i64 - m as i64))?))?;
                worst = worst.min(pairs_close(&s, &want, 1e-10)?);
                cases += 1;
            }
            for (phase, amp) in [(0usize, 0usize), (1, 0), (0, 1), (1, 1)] {
                let c = e(make_bell(phase, amp))?;
                let mut s = e(c.tensor(&aux))?;
                e(apply_bcx(&mut s, control, target))?;
                let want = if amp == 0 {
                    e(c.tensor(&aux))?
                } else {
                    // (|01⟩|Φ_{0,j+1}⟩ + (-1)^phase |10⟩|Φ_{0,j-1}⟩)/√2
                    let sign = if phase == 1 { -1.0 } else { 1.0 };
                    let up = e(e(StateVector::basis(vec![2, 2], &[0, 1]))?.tensor(&e(shifted(1))?))?;
                    let down = e(e(StateVector::basis(vec![2, 2], &[1, 0]))?.tensor(&e(shifted(-1))?))?;
                    let s2 = 0.5f64.sqrt();
                    e(up.scaled(Complex64::new(s2, 0.0)).plus(&down.scaled(Complex64::new(sign * s2, 0.0))))?
                };
                worst = worst.min(pairs_close(&s, &want, 1e-10)?);
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} control/target cases, min fidelity {worst:.15}"))
}

fn joint_state() -> Outcome {
    let (n, f, d) = (3u64, 0.8, 4usize);
    let noise = e(NoiseModel::rank2(f))?;
    let mut joint = e(ensemble_verify::dense::protocol::ensemble_with_aux(&noise, n, d))?;
    let pairs: Vec<Pair> = (0..n as usize).map(|k| Pair::new(2 * k, 2 * k + 1)).collect();
    e(apply_eng(&mut joint, &pairs, Pair::new(2 * n as usize, 2 * n as usize + 1)))?;

    // Σ_j C(n,j) F^(n-j) (1-F)^j Γ_j ⊗ |Φ_0j⟩⟨Φ_0j|, Γ_j built from all
    // placements of j copies of |01⟩ among |Ψ00⟩ copies
    let bell = e(make_bell(0, 0))?;
    let flip = e(StateVector::basis(vec![2, 2], &[0, 1]))?;
    let mut terms = Vec::new();
    for subset in 0..1usize << n {
        let j = subset.count_ones() as usize;
        let weight = f.powi(n as i32 - j as i32) * (1.0 - f).powi(j as i32);
        let mut psi = e(StateVector::basis(vec![], &[]))?;
        for k in 0..n as usize {
            psi = e(psi.tensor(if subset >> k & 1 == 1 { &flip } else { &bell }))?;
        }
        terms.push((weight, e(psi.tensor(&e(make_qudit_bell(d, 0, j))?))?));
    }
    let rhs = e(DensityMatrix::from_mixture(&terms))?;
    let td = e(trace_distance(&joint, &rhs))?;
    ensure(td.exact, || "trace distance was only bounded".into())?;
    ensure(td.value <= 1e-10, || format!("trace distance {:.3e}", td.value))?;
    Ok(format!("dimension {}, trace distance {:.2e}", rhs.layout().size(), td.value))
}

/// Projects `state`'s trailing `d × d` register onto `|Φ^d_00⟩` and returns
/// the trace distance between `state` and the resulting product state.
fn product_form_distance(state: &StateVector, d: usize) -> Result<f64, String> {
    let amps = state.amplitudes();
    let block = d * d;
    let s = 1.0 / (d as f64).sqrt();
    let mut product = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (e_idx, chunk) in amps.chunks(block).enumerate() {
        let chi: Complex64 = (0..d).map(|k| chunk[k * d + k]).sum::<Complex64>() * s;
        for k in 0..d {
            product[e_idx * block + k * d + k] = chi * s;
        }
    }
    let norm = product.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    ensure(norm > 1e-6, || "no weight on the reference auxiliary state".into())?;
    let product = e(StateVector::new(state.layout().clone(), product.iter().map(|a| a / norm).collect()))?;
    e(pure_trace_distance(state, &product))
}

fn parity_round_trip() -> Outcome {
    let (n, d) = (3usize, 8usize);
    let copy = e(noise_density(&e(NoiseModel::werner(0.85))?))?;
    let purified = e(copy.purify(1e-14))?;
    let mut state = e(StateVector::basis(vec![], &[]))?;
    for _ in 0..n {
        state = e(state.tensor(&purified))?;
    }
    state = e(state.tensor(&e(make_qudit_bell(d, 0, 0))?))?;
    let regs = purified.layout().len();
    let pairs: Vec<Pair> = (0..n).map(|k| Pair::new(regs * k, regs * k + 1)).collect();
    let aux = Pair::new(regs * n, regs * n + 1);
    let amplitudes = state.layout().size();
    e(apply_eng(&mut state, &pairs, aux))?;
    let mut worst: f64 = 0.0;
    let mut total = 0.0;
    for rec in e(measure_parity_pair(&state, aux))? {
        let Some(residual) = rec.state else { continue };
        total += rec.probability;
        let mut restored = e(reembed_and_correct(&residual, aux, rec.outcome))?;
        e(apply_eng_inverse(&mut restored, &pairs, aux))?;
        let td = product_form_distance(&restored, d)?;
        ensure(td <= 1e-10, || format!("outcome {:?}: product-form trace distance {td:.3e}", rec.outcome))?;
        worst = worst.max(td);
    }
    ensure((total - 1.0).abs() < 1e-12, || format!("branch probabilities sum to {total}"))?;
    Ok(format!("{amplitudes} amplitudes, all four outcomes, max product-form distance {worst:.2e}"))
}

fn embedding_formula() -> Outcome {
    let copy = e(noise_density(&e(NoiseModel::werner(0.9))?))?;
    let embedded = e(embed_pairs(&e(copy.tensor(&copy))?))?;
    let NoiseModel::IsotropicQudit { weight, .. } = e(twirl_to_isotropic(&embedded))? else {
        return Err("twirl did not return an isotropic state".into());
    };
    let want = (16.0 * 0.81 - 1.0) / 15.0;
    ensure((weight - want).abs() <= 1e-12, || format!("q = {weight}, expected {want}"))?;
    let twirled = e(twirl_channel(&embedded, &e(make_qudit_bell(4, 0, 0))?))?;
    let accept = e(difference_distribution(&twirled.diagonal(), twirled.layout(), Pair::new(0, 1)))?[0];
    ensure((accept - 0.848).abs() <= 1e-12, || format!("direct-measure acceptance {accept}"))?;
    let spec = e(StrategySpec::new(Strategy::DirectEmbedMeasure { embedded: 2 }, 0))?;
    let run = e(dense_run(&spec, &e(NoiseModel::werner(0.9))?))?;
    ensure((run.acceptance - 0.848).abs() <= 1e-12, || format!("dense direct-measure acceptance {}", run.acceptance))?;
    Ok(format!("q = {weight:.15}, direct-measure acceptance {accept:.15}"))
}

fn asymptotic_constancy() -> Outcome {
    let mut worst: f64 = 0.0;
    for f in [0.7, 0.9] {
        for m in 1..=3u32 {
            let target = 0.5f64.powi(m as i32);
            let v = e(werner_delta_subspace(f, 1023, m))?;
            let rel = (v - target).abs() / target;
            ensure(rel <= 0.05, || format!("F={f} m={m}: {v} vs {target}"))?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("max relative deviation from 2^-m {worst:.2e}"))
}

fn fig2a_structure() -> Outcome {
    let start = Instant::now();
    let delta = 0.1;
    ensure(e(single_copy_copies(delta, 0.9))? == 22, || "baseline at F=0.9".into())?;
    let coll = e(copies_required(Strategy::Rank2Full, 0.9, delta))?;
    ensure(coll.copies_consumed == 5, || format!("collective at F=0.9: {}", coll.copies_consumed))?;
    let m = e(subspace_asymptotic_copies(delta))?;
    let mut last = 0.0;
    let (mut last_integer, mut integer_dips) = (0.0, 0);
    for f in default_grid() {
        let base = e(single_copy_copies(delta, f))?;
        ensure(base == (delta.ln() / f.ln()).ceil() as u64, || format!("baseline at F={f}"))?;
        let coll = e(copies_required(Strategy::Rank2Full, f, delta))?;
        ensure(coll.copies_consumed == ceil_log2(coll.n + 1) as u64 && coll.delta <= delta, || {
            format!("collective at F={f}: {} copies for n={}", coll.copies_consumed, coll.n)
        })?;
        let integer = base as f64 / coll.copies_consumed as f64;
        if integer <= last_integer {
            integer_dips += 1;
        }
        last_integer = integer;
        ensure(e(subspace_asymptotic_copies(delta))? == 4, || "asymptotic subspace count".into())?;
        let ratio = e(relaxed_ratio(f, delta))?;
        ensure(ratio > last, || format!("ratio not increasing at F={f}: {ratio} after {last}"))?;
        last = ratio;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("runtime {secs:.1}s"))?;
    Ok(format!(
        "22 vs 5 copies at F=0.9, subspace constant {m}, ratio increasing \
         ({integer_dips} non-increasing steps of the integer copy ratio), {secs:.3}s"
    ))
}

fn ghz_criteria() -> Outcome {
    // phase errors never move the amplitude vector
    let phase_only = e(GHZDiagonalState::new(3, q("0"), q("1"), vec![q("0"); 3]))?;
    for n in 1..=6 {
        let acc = e(ghz_failure_probability(&phase_only, n, GhzRounds::Amplitude))?;
        ensure(acc == q("1"), || format!("phase error detected in amplitude round at n={n}"))?;
    }
    // one sampled phase error among targets is always caught by the phase round
    for n in 1..=6usize {
        for pos in 0..n {
            let mut ens = vec![GhzSample::Target; n];
            ens[pos] = GhzSample::Phase;
            for seed in 0..20 {
                let mut rng = batch_rng(seed, 0);
                let amp = e(ghz_verify(&ens, 3, GhzRounds::Amplitude, &mut rng))?;
                let two = e(ghz_verify(&ens, 3, GhzRounds::AmplitudeThenPhase, &mut rng))?;
                ensure(amp.verdict == Verdict::Accept && two.verdict == Verdict::Reject, || {
                    format!("phase error at {pos} of {n} not handled")
                })?;
            }
        }
    }
    // exact amplitude-round acceptance against enumeration
    let noise = e(GHZDiagonalState::new(3, q("0.8"), q("0.02"), vec![q("0.08"), q("0.01"), q("0")]))?;
    for n in 1..=6 {
        for rounds in [GhzRounds::Amplitude, GhzRounds::AmplitudeThenPhase] {
            let dp = e(ghz_failure_probability(&noise, n, rounds))?;
            let en = e(ghz_enumerate(&noise, n, rounds))?;
            ensure(dp == en, || format!("n={n} {rounds:?}: {dp} != {en}"))?;
        }
    }
    // dense simulation
    let nf = noise.to_f64();
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        let dense = e(ghz_dense(&nf, n))?;
        let dp = e(ghz_amplitude_distribution(&nf, n))?;
        let tvd = 0.5 * dense.amplitude_distribution.iter().zip(&dp).map(|(a, b)| (a - b).abs()).sum::<f64>();
        let two = e(ghz_failure_probability(&nf, n, GhzRounds::AmplitudeThenPhase))?;
        let two_tvd = (dense.two_round - two).abs();
        ensure(tvd <= 1e-10 && two_tvd <= 1e-10, || format!("n={n}: TVD {tvd:.3e}, two-round {two_tvd:.3e}"))?;
        worst = worst.max(tvd).max(two_tvd);
    }
    let dense_phase = e(ghz_dense(&phase_only.to_f64(), 1))?;
    ensure((dense_phase.amplitude - 1.0).abs() < 1e-12 && dense_phase.two_round.abs() < 1e-12, || {
        format!("dense phase-error run: {dense_phase:?}")
    })?;
    Ok(format!("amplitude round blind to phase errors, phase round exact, dense TVD {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("isotropic-form consistency", isotropic_consistency),
        ("monte carlo validation", monte_carlo_validation),
        ("gate-level checks", gate_level),
        ("eng joint state", joint_state),
        ("parity round trip", parity_round_trip),
        ("embedding formula", embedding_formula),
        ("asymptotic constancy", asymptotic_constancy),
        ("copy-count structure", fig2a_structure),
        ("ghz verification", ghz_criteria),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
