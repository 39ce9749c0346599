//! Monte Carlo estimation of acceptance probabilities.
//!
//! Trials are split into fixed batches of [`BATCH_SIZE`]; batch `b` draws from
//! a ChaCha8 generator seeded with `seed` on stream `b`. Estimates therefore
//! depend only on `(seed, trials)` and not on the number of workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::embedding_q;
use crate::error::{domain, Error, Result};
use crate::model::{NoiseModel, RunOutcome, Verdict};
use crate::protocol::strategy::{AuxInit, Readout, StrategySpec};
use crate::protocol::symbolic::{readout_full, readout_subspace, SymbolicAux};

pub const BATCH_SIZE: u64 = 10_000;

/// Per-copy sampler over shift values.
#[derive(Clone, Debug)]
struct ShiftSampler {
    shifts: Vec<i64>,
    cumulative: Vec<f64>,
    target: f64,
}

impl ShiftSampler {
    fn new(noise: &NoiseModel<f64>) -> Self {
        let weights = noise.shift_weights();
        let mut acc = 0.0;
        let mut shifts = Vec::with_capacity(weights.len());
        let mut cumulative = Vec::with_capacity(weights.len());
        for (s, w) in weights {
            acc += w;
            shifts.push(s);
            cumulative.push(acc);
        }
        Self { shifts, cumulative, target: noise.fidelity() }
    }

    fn shift<R: Rng>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.random::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        let idx = self.cumulative.partition_point(|&c| c <= u).min(self.shifts.len() - 1);
        self.shifts[idx]
    }
}

/// Plan shared by all trials of one estimate.
#[derive(Clone, Debug)]
struct RunPlan {
    spec: StrategySpec,
    sampler: ShiftSampler,
    d: u64,
    aux_weight: f64,
}

impl RunPlan {
    fn new(spec: &StrategySpec, noise: &NoiseModel<f64>) -> Result<Self> {
        spec.validate()?;
        noise.validate()?;
        let d = spec.aux_dim().unwrap_or(0);
        let aux_weight = match spec.aux_init() {
            AuxInit::Pure => 1.0,
            AuxInit::Embedded(e) => embedding_q(noise.fidelity(), e)?.1,
        };
        Ok(Self { spec: *spec, sampler: ShiftSampler::new(noise), d, aux_weight })
    }

    fn run<R: Rng>(&self, rng: &mut R) -> RunOutcome {
        let spec = &self.spec;
        if spec.aux_dim().is_none() {
            let mut measured = 0;
            let mut verdict = Verdict::Accept;
            while measured < spec.n {
                measured += 1;
                if rng.random::<f64>() >= self.sampler.target {
                    verdict = Verdict::Reject;
                    break;
                }
            }
            return RunOutcome {
                verdict,
                copies_consumed: measured,
                ebits_consumed: measured as f64,
                measured_j: None,
                subspaces_measured: 0,
            };
        }
        let j0 = if self.aux_weight >= 1.0 || rng.random::<f64>() < self.aux_weight {
            0
        } else {
            rng.random_range(0..self.d)
        };
        let mut aux = SymbolicAux { d: self.d, j: j0, pure: self.aux_weight >= 1.0 };
        let d = self.d as i128;
        let mut j = aux.j as i128;
        for _ in 0..spec.n {
            j += self.sampler.shift(rng) as i128;
        }
        aux.j = j.rem_euclid(d) as u64;
        match spec.readout() {
            Readout::Full => {
                let (verdict, measured) = readout_full(&aux);
                RunOutcome {
                    verdict,
                    copies_consumed: spec.copies_consumed(),
                    ebits_consumed: spec.ebits_consumed(),
                    measured_j: Some(measured),
                    subspaces_measured: 0,
                }
            }
            Readout::Subspace(rounds) => {
                let out = readout_subspace(&aux, rounds).expect("validated spec");
                RunOutcome {
                    verdict: out.verdict,
                    copies_consumed: spec.copies_consumed(),
                    ebits_consumed: out.rounds_done as f64,
                    measured_j: None,
                    subspaces_measured: out.rounds_done,
                }
            }
        }
    }
}

/// One protocol run with label sampling from `noise`.
pub fn sample_run<R: Rng>(spec: &StrategySpec, noise: &NoiseModel<f64>, rng: &mut R) -> Result<RunOutcome> {
    Ok(RunPlan::new(spec, noise)?.run(rng))
}

/// Acceptance-probability estimate with a normal-approximation 95% interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub accepts: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Mean number of ensemble copies consumed per run.
    pub mean_copies: f64,
}

impl MonteCarloEstimate {
    pub(crate) fn from_counts(trials: u64, accepts: u64, copies: u64) -> Self {
        let n = trials as f64;
        let p = accepts as f64 / n;
        let se = (p * (1.0 - p) / n).sqrt();
        Self {
            trials,
            accepts,
            estimate: p,
            std_error: se,
            ci_low: (p - 1.96 * se).max(0.0),
            ci_high: (p + 1.96 * se).min(1.0),
            mean_copies: copies as f64 / n,
        }
    }
}

/// Generator for batch `batch` of a run seeded with `seed`.
pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Runs batches `0..ceil(trials / BATCH_SIZE)` on `workers` threads and sums
/// the per-batch results of `f(rng, batch_len)`.
pub(crate) fn run_batches<F>(trials: u64, seed: u64, workers: usize, f: F) -> Result<(u64, u64)>
where
    F: Fn(&mut ChaCha8Rng, u64) -> (u64, u64) + Sync,
{
    if trials == 0 {
        return domain("trial count must be >= 1");
    }
    if workers == 0 {
        return domain("worker count must be >= 1");
    }
    let batches = trials.div_ceil(BATCH_SIZE);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        (0..batches)
            .into_par_iter()
            .map(|b| {
                let len = BATCH_SIZE.min(trials - b * BATCH_SIZE);
                let mut rng = batch_rng(seed, b);
                f(&mut rng, len)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    }))
}

/// Estimates the acceptance probability of `spec` against `noise`.
pub fn monte_carlo(
    spec: &StrategySpec,
    noise: &NoiseModel<f64>,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<MonteCarloEstimate> {
    let plan = RunPlan::new(spec, noise)?;
    let (accepts, copies) = run_batches(trials, seed, workers, |rng, len| {
        let mut accepts = 0;
        let mut copies = 0;
        for _ in 0..len {
            let out = plan.run(rng);
            accepts += out.accepted() as u64;
            copies += out.copies_consumed;
        }
        (accepts, copies)
    })?;
    Ok(MonteCarloEstimate::from_counts(trials, accepts, copies))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::strategy::Strategy;

    #[test]
    fn pure_ensemble_always_accepted() {
        let spec = StrategySpec::new(Strategy::WernerFull, 9).unwrap();
        let est = monte_carlo(&spec, &NoiseModel::PureTarget, 5_000, 1, 2).unwrap();
        assert_eq!(est.estimate, 1.0);
    }

    #[test]
    fn independent_of_worker_count() {
        let spec = StrategySpec::new(Strategy::WernerSubspace { rounds: 2 }, 7).unwrap();
        let noise = NoiseModel::werner(0.8).unwrap();
        let a = monte_carlo(&spec, &noise, 35_000, 42, 1).unwrap();
        let b = monte_carlo(&spec, &noise, 35_000, 42, 4).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo(&spec, &noise, 35_000, 43, 4).unwrap();
        assert_ne!(a.accepts, c.accepts);
    }

    #[test]
    fn bad_arguments() {
        let spec = StrategySpec::new(Strategy::WernerFull, 3).unwrap();
        let noise = NoiseModel::werner(0.8).unwrap();
        assert!(monte_carlo(&spec, &noise, 0, 1, 1).is_err());
        assert!(monte_carlo(&spec, &noise, 10, 1, 0).is_err());
    }

    #[test]
    fn baseline_stops_at_first_failure() {
        let spec = StrategySpec::new(Strategy::SingleCopyBaseline, 10).unwrap();
        let noise = NoiseModel::rank2(0.0).unwrap();
        let mut rng = batch_rng(0, 0);
        let out = sample_run(&spec, &noise, &mut rng).unwrap();
        assert_eq!((out.verdict, out.copies_consumed), (Verdict::Reject, 1));
    }
}
