//! Equivalence suite: closed forms against exact enumeration, Monte Carlo and
//! the dense simulator.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analytic::{
    isotropic_delta, isotropic_delta_subspace, failure_probability, werner_delta_full, werner_delta_subspace,
};
use crate::arith::{ceil_log2, parse_exact, Exact, Prob};
use crate::dense::dense_run;
use crate::error::{Error, Result};
use crate::ghz::{ghz_dense, ghz_enumerate, ghz_failure_probability, GHZDiagonalState, GhzRounds};
use crate::model::fidelity_to_q;
use crate::oracle::enumerate_strategy_failure;
use crate::protocol::{monte_carlo, Strategy, StrategySpec};

/// Parameters of a cross-check run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CrosscheckConfig {
    pub max_n: u64,
    pub grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    /// Added to every closed-form value before comparison. Nonzero values
    /// must make the suite fail.
    pub perturb: f64,
}

impl Default for CrosscheckConfig {
    fn default() -> Self {
        Self { max_n: 8, grid: vec![0.5, 0.7, 0.9, 0.99], trials: 200_000, seed: 1, workers: 1, perturb: 0.0 }
    }
}

/// Outcome of one family of comparisons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// All check results.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub checks: Vec<CheckResult>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for CrosscheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<20} cases={:<5} max_deviation={:.3e} tolerance={:.1e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.cases,
                c.max_deviation,
                c.tolerance
            )?;
        }
        Ok(())
    }
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    max: f64,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, tolerance, cases: 0, max: 0.0 }
    }

    fn add(&mut self, deviation: f64) {
        self.cases += 1;
        if deviation.is_nan() || deviation > self.max {
            self.max = if deviation.is_nan() { f64::INFINITY } else { deviation };
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            cases: self.cases,
            max_deviation: self.max,
            tolerance: self.tolerance,
            passed: self.cases > 0 && self.max <= self.tolerance,
        }
    }
}

fn exact_of(f: f64) -> Result<Exact> {
    parse_exact(&format!("{f}"))
}

fn exact_deviation(a: &Exact, b: &Exact) -> f64 {
    if a == b {
        0.0
    } else {
        let diff = (a - b).to_f64().abs();
        // distinct rationals never compare as equal
        if diff == 0.0 { f64::MIN_POSITIVE } else { diff }
    }
}

/// Strategies compared on an ensemble of `n` (each valid for that `n`).
fn strategies_for(n: u64) -> Vec<Strategy> {
    let k = ceil_log2(n + 1).max(1);
    let mut out = vec![Strategy::Rank2Full, Strategy::WernerFull, Strategy::SingleCopyBaseline];
    for rounds in 1..=k {
        out.push(Strategy::Rank2Subspace { rounds });
        out.push(Strategy::WernerSubspace { rounds });
    }
    out.push(Strategy::EmbedEng { embedded: k });
    out.push(Strategy::EmbedEngSubspace { embedded: k, rounds: 1 });
    out
}

fn applicable(strategy: Strategy, fidelity: f64) -> bool {
    let werner = !matches!(strategy, Strategy::Rank2Full | Strategy::Rank2Subspace { .. } | Strategy::SingleCopyBaseline);
    let embedded = strategy.embedded().is_some();
    (!werner || fidelity >= 0.25) && (!embedded || fidelity >= 0.5)
}

/// Representative GHZ noise at fidelity `F`: a quarter of the infidelity on
/// the phase error, the rest spread evenly over the amplitude errors.
pub fn ghz_noise_at<P: Prob>(fidelity: P, parties: usize) -> Result<GHZDiagonalState<P>> {
    let k = (1i64 << (parties - 1)) - 1;
    let rest = P::one() - fidelity.clone();
    let lambda0 = rest.clone() * P::from_ratio(1, 4);
    let each = rest * P::from_ratio(3, 8 * k);
    GHZDiagonalState::new(parties, fidelity, lambda0, vec![each; k as usize])
}

/// Runs the full suite.
pub fn crosscheck(config: &CrosscheckConfig) -> Result<CrosscheckReport> {
    if config.grid.is_empty() || config.max_n == 0 {
        return Err(Error::Domain("cross-check needs a non-empty grid and max_n >= 1".into()));
    }
    let perturb_exact = crate::arith::f64_to_exact(config.perturb)?;
    let mut exact = Tally::new("analytic=oracle", 0.0);
    let mut float = Tally::new("analytic-f64=oracle", 1e-12);
    let mut app_b = Tally::new("isotropic=werner", 0.0);
    let mut mc = Tally::new("monte-carlo(sigma)", 4.0);
    let mut dense = Tally::new("dense=analytic", 1e-10);
    let mut ghz_exact = Tally::new("ghz dp=enumeration", 0.0);
    let mut ghz_dense_t = Tally::new("ghz dense=dp", 1e-10);

    for &f in &config.grid {
        let fx = exact_of(f)?;
        for n in 1..=config.max_n {
            for strategy in strategies_for(n) {
                if !applicable(strategy, f) {
                    continue;
                }
                let spec = StrategySpec::new(strategy, n)?;
                let noise_x = strategy.design_noise(fx.clone())?;
                let a = failure_probability(&spec, &noise_x)? + perturb_exact.clone();
                let o = enumerate_strategy_failure(&spec, &noise_x)?;
                exact.add(exact_deviation(&a, &o));
                let af = failure_probability(&spec, &strategy.design_noise(f)?)? + config.perturb;
                float.add((af - o.to_f64()).abs());
            }
            if f >= 0.25 {
                let q = fidelity_to_q(fx.clone(), 2)?;
                let w = werner_delta_full(fx.clone(), n)? + perturb_exact.clone();
                app_b.add(exact_deviation(&w, &isotropic_delta(q.clone(), n)?));
                for m in 1..=ceil_log2(n + 1).max(1) {
                    let w = werner_delta_subspace(fx.clone(), n, m)? + perturb_exact.clone();
                    app_b.add(exact_deviation(&w, &isotropic_delta_subspace(q.clone(), n, m)?));
                }
            }
        }

        let n_mc = config.max_n.min(4);
        let mut mc_specs = vec![
            StrategySpec::new(Strategy::Rank2Full, n_mc)?,
            StrategySpec::new(Strategy::WernerFull, n_mc)?,
            StrategySpec::new(Strategy::WernerSubspace { rounds: 1 }, n_mc)?,
            StrategySpec::new(Strategy::SingleCopyBaseline, n_mc)?,
        ];
        if f >= 0.5 {
            mc_specs.push(StrategySpec::new(Strategy::EmbedEng { embedded: ceil_log2(n_mc + 1).max(1) }, n_mc)?);
        }
        for spec in &mc_specs {
            if !applicable(spec.strategy, f) {
                continue;
            }
            let noise = spec.strategy.design_noise(f)?;
            let p = failure_probability(spec, &noise)? + config.perturb;
            let est = monte_carlo(spec, &noise, config.trials, config.seed, config.workers)?;
            let sigma = (p * (1.0 - p) / config.trials as f64).sqrt();
            let diff = (est.estimate - p).abs();
            mc.add(if sigma > 0.0 { diff / sigma } else if diff == 0.0 { 0.0 } else { f64::INFINITY });
        }

        for n in 1..=config.max_n.min(3) {
            let k = ceil_log2(n + 1).max(1);
            for strategy in [
                Strategy::Rank2Full,
                Strategy::WernerFull,
                Strategy::WernerSubspace { rounds: 1 },
                Strategy::EmbedEng { embedded: k },
            ] {
                if !applicable(strategy, f) {
                    continue;
                }
                let spec = StrategySpec::new(strategy, n)?;
                let noise = strategy.design_noise(f)?;
                match dense_run(&spec, &noise) {
                    Ok(run) => {
                        let p = failure_probability(&spec, &noise)? + config.perturb;
                        dense.add((run.acceptance - p).abs());
                    }
                    Err(Error::Resource(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
        }

        let gx = ghz_noise_at(fx.clone(), 3)?;
        for n in 1..=config.max_n.min(6) {
            for rounds in [GhzRounds::Amplitude, GhzRounds::AmplitudeThenPhase] {
                let a = ghz_failure_probability(&gx, n, rounds)? + perturb_exact.clone();
                ghz_exact.add(exact_deviation(&a, &ghz_enumerate(&gx, n, rounds)?));
            }
        }
        let gf = gx.to_f64();
        for n in 1..=config.max_n.min(2) {
            let out = ghz_dense(&gf, n)?;
            let amp = ghz_failure_probability(&gf, n, GhzRounds::Amplitude)? + config.perturb;
            let two = ghz_failure_probability(&gf, n, GhzRounds::AmplitudeThenPhase)? + config.perturb;
            ghz_dense_t.add((out.amplitude - amp).abs().max((out.two_round - two).abs()));
        }
    }

    Ok(CrosscheckReport {
        checks: [exact, float, app_b, mc, dense, ghz_exact, ghz_dense_t].into_iter().map(Tally::finish).collect(),
    })
}
