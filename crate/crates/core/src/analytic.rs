//! Closed-form failure probabilities and resource solvers.
//!
//! The failure probability `δ` of a strategy is the probability that it
//! accepts (reports a perfect ensemble) although every copy is noisy. All
//! probability-valued functions are generic over [`Prob`] and therefore run
//! in `f64` or exactly in rationals.
//!
//! The amplitude index after the error number gate is `j = Δ mod d` where
//! `Δ = #type-1 - #type-2`. For qubit noise the per-copy shift takes the
//! values `0, +1, -1` with weights `(stay, up, down)`; [`pr_j`] sums the
//! trinomial terms with `(k - l) mod d = j`.

use serde::{Deserialize, Serialize};

use crate::arith::{ceil_log2, Prob};
use crate::error::{domain, Error, Result};
use crate::model::{fidelity_to_q, werner_error_probs, NoiseModel};
use crate::protocol::strategy::{Strategy, StrategySpec, MAX_EMBEDDED};

/// Per-copy shift weights of a qubit noise model.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftClasses<P> {
    /// Target or type-3 (shift 0).
    pub stay: P,
    /// Type-1 (shift +1).
    pub up: P,
    /// Type-2 (shift -1).
    pub down: P,
}

impl<P: Prob> ShiftClasses<P> {
    pub fn werner(fidelity: P) -> Result<Self> {
        let [p0, p1, p2, p3] = werner_error_probs(fidelity)?;
        Ok(Self { stay: p0 + p3, up: p1, down: p2 })
    }

    pub fn rank2(fidelity: P) -> Result<Self> {
        check_unit(&fidelity)?;
        Ok(Self { up: P::one() - fidelity.clone(), stay: fidelity, down: P::zero() })
    }

    pub fn from_noise(noise: &NoiseModel<P>) -> Result<Self> {
        match noise {
            NoiseModel::PureTarget => Ok(Self { stay: P::one(), up: P::zero(), down: P::zero() }),
            NoiseModel::Rank2 { fidelity } => Self::rank2(fidelity.clone()),
            NoiseModel::Werner { fidelity } => Self::werner(fidelity.clone()),
            NoiseModel::IsotropicQudit { .. } => {
                domain("closed forms cover qubit noise only; use the oracle for qudit ensembles")
            }
        }
    }
}

fn check_unit<P: Prob>(x: &P) -> Result<()> {
    if *x < P::zero() || *x > P::one() {
        return domain(format!("probability must lie in [0, 1], got {x:?}"));
    }
    Ok(())
}

/// `δ = F^n`: rank-2 ensemble, full readout.
pub fn rank2_delta_full<P: Prob>(fidelity: P, n: u64) -> Result<P> {
    check_unit(&fidelity)?;
    if n == 0 {
        return domain("ensemble size must be >= 1");
    }
    Ok(fidelity.powu(n))
}

/// Rank-2 ensemble after `m` parity rounds:
/// `Σ_k C(n, 2^m k) F^(n - 2^m k) (1-F)^(2^m k)`.
pub fn rank2_delta_subspace<P: Prob>(fidelity: P, n: u64, m: u32) -> Result<P> {
    check_unit(&fidelity)?;
    if n == 0 {
        return domain("ensemble size must be >= 1");
    }
    let max_m = ceil_log2(n + 1).max(1);
    if m == 0 || m > max_m {
        return domain(format!("m must lie in 1..={max_m} for n = {n}, got {m}"));
    }
    let step = 1u64 << m;
    let miss = P::one() - fidelity.clone();
    let mut total = P::zero();
    let mut errors = 0u64;
    while errors <= n {
        total = total + P::binomial_term(n, errors, &fidelity, &miss);
        errors += step;
    }
    Ok(total)
}

/// Full distribution `Pr(j)`, `j < d`, of the amplitude index after the
/// error number gate on `n` copies.
pub fn pr_distribution<P: Prob>(classes: &ShiftClasses<P>, n: u64, d: u64) -> Result<Vec<P>> {
    if d < 2 {
        return domain(format!("auxiliary dimension must be >= 2, got {d}"));
    }
    let probs = [classes.stay.clone(), classes.up.clone(), classes.down.clone()];
    Ok(P::trinomial_mod(n, d, &probs))
}

/// `Pr(j)` for one amplitude index.
pub fn pr_j<P: Prob>(classes: &ShiftClasses<P>, n: u64, d: u64, j: u64) -> Result<P> {
    if j >= d {
        return domain(format!("index j = {j} out of range for d = {d}"));
    }
    let dist = pr_distribution(classes, n, d)?;
    Ok(dist[j as usize].clone())
}

/// Probability that the accumulated shift is a multiple of `2^m` (equivalently
/// that every one of `m` parity rounds on a `d = 2^k ≥ 2^m` register comes
/// out even).
pub fn pr_multiple_of_pow2<P: Prob>(classes: &ShiftClasses<P>, n: u64, m: u32) -> Result<P> {
    let d = subspace_dim(n).max(1u64 << m);
    let dist = pr_distribution(classes, n, d)?;
    let step = 1usize << m;
    Ok(dist.into_iter().step_by(step).fold(P::zero(), |a, b| a + b))
}

/// Werner-ensemble `Pr(j)`.
pub fn werner_pr_j<P: Prob>(fidelity: P, n: u64, d: u64, j: u64) -> Result<P> {
    pr_j(&ShiftClasses::werner(fidelity)?, n, d, j)
}

/// `δ = Pr(j = 0)` with `d = n + 1`.
pub fn werner_delta_full<P: Prob>(fidelity: P, n: u64) -> Result<P> {
    if n == 0 {
        return domain("ensemble size must be >= 1");
    }
    werner_pr_j(fidelity, n, n + 1, 0)
}

/// Power-of-two auxiliary dimension used by every subspace strategy.
pub fn subspace_dim(n: u64) -> u64 {
    1u64 << ceil_log2(n + 1).max(1)
}

/// Werner ensemble after `m` parity rounds, `d = 2^⌈log2(n+1)⌉`: the sum of
/// `Pr(j)` over all `j ≡ 0 (mod 2^m)`.
pub fn werner_delta_subspace<P: Prob>(fidelity: P, n: u64, m: u32) -> Result<P> {
    if n == 0 {
        return domain("ensemble size must be >= 1");
    }
    let k = ceil_log2(subspace_dim(n));
    if m == 0 || m > k {
        return domain(format!("m must lie in 1..={k} for n = {n}, got {m}"));
    }
    pr_multiple_of_pow2(&ShiftClasses::werner(fidelity)?, n, m)
}

/// Number of ways (weighted) that `s` fully-mixed copies leave the index
/// invariant: `Σ_j (1/4)^(2j) (1/2)^(s-2j) s! / (j! j! (s-2j)!)`.
pub fn omega<P: Prob>(s: u64) -> P {
    shift_weight_mixed(s, 0)
}

/// Probability that `s` fully-mixed copies produce net shift `±shift` for a
/// fixed sign: `Σ_j (1/4)^j (1/4)^(j+shift) (1/2)^(s-2j-shift) s!/(j!(j+shift)!(s-2j-shift)!)`.
fn shift_weight_mixed<P: Prob>(s: u64, shift: u64) -> P {
    if shift > s {
        return P::zero();
    }
    let quarter = P::from_ratio(1, 4);
    let half = P::from_ratio(1, 2);
    let mut total = P::zero();
    let mut j = 0u64;
    while 2 * j + shift <= s {
        let counts = [j, j + shift, s - 2 * j - shift];
        total = total + P::multinomial_term(&counts, &[quarter.clone(), quarter.clone(), half.clone()]);
        j += 1;
    }
    total
}

/// Subspace analogue of [`omega`]: probability that `s` fully-mixed copies
/// give a net shift that is a multiple of `2^m`.
pub fn omega_subspace<P: Prob>(s: u64, m: u32) -> P {
    let step = 1u64 << m;
    let mut total = shift_weight_mixed::<P>(s, 0);
    let mut t = 1u64;
    while t * step <= s {
        total = total + P::from_u64(2) * shift_weight_mixed::<P>(s, t * step);
        t += 1;
    }
    total
}

fn check_weight<P: Prob>(q: &P, n: u64) -> Result<()> {
    check_unit(q)?;
    if n == 0 {
        return domain("ensemble size must be >= 1");
    }
    Ok(())
}

/// Failure probability written over the number `i` of fully-mixed copies:
/// `Σ_i C(n,i) q^(n-i) (1-q)^i Ω(i)`.
pub fn isotropic_delta<P: Prob>(q: P, n: u64) -> Result<P> {
    check_weight(&q, n)?;
    let mixed = P::one() - q.clone();
    Ok((0..=n).fold(P::zero(), |acc, i| {
        acc + P::binomial_term(n, i, &q, &mixed) * omega::<P>(i)
    }))
}

/// Subspace counterpart of [`isotropic_delta`], with `Ω(i, m)` counting both
/// signs of every nonzero multiple of `2^m` once and the zero shift once.
pub fn isotropic_delta_subspace<P: Prob>(q: P, n: u64, m: u32) -> Result<P> {
    check_weight(&q, n)?;
    if m == 0 {
        return domain("m must be >= 1");
    }
    let mixed = P::one() - q.clone();
    Ok((0..=n).fold(P::zero(), |acc, i| {
        acc + P::binomial_term(n, i, &q, &mixed) * omega_subspace::<P>(i, m)
    }))
}

/// Dimension and isotropic weight of `m_embed` embedded copies after
/// depolarization: `d = 2^m_embed`, `q = (d² F^m_embed - 1)/(d² - 1)`.
pub fn embedding_q<P: Prob>(fidelity: P, m_embed: u32) -> Result<(u64, P)> {
    if m_embed == 0 || m_embed > MAX_EMBEDDED {
        return domain(format!("m_embed must lie in 1..={MAX_EMBEDDED}, got {m_embed}"));
    }
    if fidelity < P::from_ratio(1, 2) || fidelity > P::one() {
        return domain(format!("embedding requires F in [1/2, 1], got {fidelity:?}"));
    }
    let d = 1u64 << m_embed;
    let q = fidelity_to_q(fidelity.powu(m_embed as u64), d)?;
    Ok((d, q))
}

/// Measuring the embedded register directly: `δ = (1 + d F^m)/(1 + d)`.
pub fn direct_measure_delta<P: Prob>(fidelity: P, m_embed: u32) -> Result<P> {
    let (d, _) = embedding_q(fidelity.clone(), m_embed)?;
    let d = P::from_u64(d);
    Ok((P::one() + d.clone() * fidelity.powu(m_embed as u64)) / (P::one() + d))
}

/// Error number gate from `n` Werner copies into an embedded noisy register:
/// `q_aux Pr_net(0) + (1 - q_aux)/d`.
pub fn embed_eng_delta<P: Prob>(fidelity: P, n: u64, m_embed: u32) -> Result<P> {
    embedded_failure(&ShiftClasses::werner(fidelity.clone())?, fidelity, n, m_embed, None)
}

/// As [`embed_eng_delta`] with `rounds` parity measurements instead of a full
/// readout: `q_aux Pr_net(j ≡ 0 mod 2^r) + (1 - q_aux) 2^-r`.
pub fn embed_eng_subspace_delta<P: Prob>(fidelity: P, n: u64, m_embed: u32, rounds: u32) -> Result<P> {
    embedded_failure(&ShiftClasses::werner(fidelity.clone())?, fidelity, n, m_embed, Some(rounds))
}

fn embedded_failure<P: Prob>(
    classes: &ShiftClasses<P>,
    fidelity: P,
    n: u64,
    m_embed: u32,
    rounds: Option<u32>,
) -> Result<P> {
    let (d, q) = embedding_q(fidelity, m_embed)?;
    if d < n + 1 {
        return domain(format!("2^m_embed = {d} is smaller than n + 1 = {}", n + 1));
    }
    let rounds = rounds.unwrap_or(m_embed);
    if rounds == 0 || rounds > m_embed {
        return domain(format!("rounds must lie in 1..={m_embed}, got {rounds}"));
    }
    let dist = pr_distribution(classes, n, d)?;
    let net = dist
        .into_iter()
        .step_by(1usize << rounds)
        .fold(P::zero(), |a, b| a + b);
    let uniform = P::one() / P::from_u64(1u64 << rounds);
    Ok(q.clone() * net + (P::one() - q) * uniform)
}

/// Failure probability of any strategy against qubit noise.
pub fn failure_probability<P: Prob>(spec: &StrategySpec, noise: &NoiseModel<P>) -> Result<P> {
    spec.validate()?;
    noise.validate()?;
    let classes = ShiftClasses::from_noise(noise)?;
    let n = spec.n;
    match spec.strategy {
        Strategy::Rank2Full | Strategy::WernerFull => pr_j(&classes, n, n + 1, 0),
        Strategy::Rank2Subspace { rounds } | Strategy::WernerSubspace { rounds } => {
            pr_multiple_of_pow2(&classes, n, rounds)
        }
        Strategy::DirectEmbedMeasure { embedded } => direct_measure_delta(noise.fidelity(), embedded),
        Strategy::EmbedEng { embedded } => embedded_failure(&classes, noise.fidelity(), n, embedded, None),
        Strategy::EmbedEngSubspace { embedded, rounds } => {
            embedded_failure(&classes, noise.fidelity(), n, embedded, Some(rounds))
        }
        Strategy::SingleCopyBaseline => Ok(noise.fidelity().powu(n)),
    }
}

/// Copies consumed by optimal single-copy verification: `⌈ln δ / ln F⌉`.
pub fn single_copy_copies(delta_target: f64, fidelity: f64) -> Result<u64> {
    if !(delta_target > 0.0 && delta_target < 1.0) {
        return domain(format!("target failure probability must lie in (0, 1), got {delta_target}"));
    }
    if !(0.0..=1.0).contains(&fidelity) {
        return domain(format!("fidelity must lie in [0, 1], got {fidelity}"));
    }
    if fidelity == 1.0 {
        return Err(Error::BaselineUndefined);
    }
    if fidelity == 0.0 {
        return Ok(1);
    }
    let k = (delta_target.ln() / fidelity.ln()).ceil();
    Ok((k as u64).max(1))
}

/// Constant copy count of the subspace strategy on an asymptotically large
/// ensemble: the smallest `m` with `2^-m ≤ δ`.
pub fn subspace_asymptotic_copies(delta_target: f64) -> Result<u32> {
    if !(delta_target > 0.0 && delta_target < 1.0) {
        return domain(format!("target failure probability must lie in (0, 1), got {delta_target}"));
    }
    Ok((-delta_target.log2()).ceil() as u32)
}

/// Largest ensemble the embedded-strategy search evaluates.
pub const EMBED_SEARCH_MAX_N: u64 = (1 << 12) - 1;

/// Result of [`copies_required`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub strategy: Strategy,
    /// Ensemble size certified.
    pub n: u64,
    pub copies_consumed: u64,
    pub ebits_consumed: f64,
    /// Failure probability actually achieved.
    pub delta: f64,
}

/// Smallest ensemble (or embedding) meeting a target failure probability.
///
/// `strategy` is evaluated against its design noise family at fidelity `F`
/// (rank-2 for `rank2-*` and the baseline, Werner otherwise). Pure-register
/// strategies binary-search `n` in `1..=2·k_single + 64`; embedded strategies
/// scan `m_embed` with `n = 2^m_embed - 1`.
pub fn copies_required(strategy: Strategy, fidelity: f64, delta_target: f64) -> Result<ResourceReport> {
    if !(delta_target > 0.0 && delta_target < 1.0) {
        return domain(format!("target failure probability must lie in (0, 1), got {delta_target}"));
    }
    let noise = strategy.design_noise(fidelity)?;
    let report = |spec: StrategySpec, delta: f64| ResourceReport {
        strategy: spec.strategy,
        n: spec.n,
        copies_consumed: spec.copies_consumed(),
        ebits_consumed: spec.ebits_consumed(),
        delta,
    };
    match strategy {
        Strategy::SingleCopyBaseline => {
            let k = single_copy_copies(delta_target, fidelity)?;
            let spec = StrategySpec::new(strategy, k)?;
            Ok(report(spec, fidelity.powu(k)))
        }
        Strategy::Rank2Full
        | Strategy::WernerFull
        | Strategy::Rank2Subspace { .. }
        | Strategy::WernerSubspace { .. } => {
            let upper = 2 * single_copy_copies(delta_target, fidelity)? + 64;
            let eval = |n: u64| -> Result<Option<f64>> {
                let spec = StrategySpec { strategy, n };
                if spec.validate().is_err() {
                    return Ok(None);
                }
                failure_probability(&spec, &noise).map(Some)
            };
            let meets = |n: u64| -> Result<bool> {
                Ok(matches!(eval(n)?, Some(delta) if delta <= delta_target))
            };
            let (mut lo, mut hi) = (1u64, upper);
            if meets(lo)? {
                hi = lo;
            } else if !meets(upper)? {
                return Err(Error::SearchFailed(format!(
                    "{strategy} does not reach δ = {delta_target} at F = {fidelity} within n ≤ {upper}"
                )));
            }
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if meets(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let spec = StrategySpec::new(strategy, hi)?;
            let delta = eval(hi)?.expect("validated");
            Ok(report(spec, delta))
        }
        Strategy::DirectEmbedMeasure { .. } | Strategy::EmbedEng { .. } | Strategy::EmbedEngSubspace { .. } => {
            let rounds = strategy.rounds();
            for embedded in rounds.unwrap_or(1).max(1)..=MAX_EMBEDDED {
                let (candidate, n) = match strategy {
                    Strategy::DirectEmbedMeasure { .. } => (Strategy::DirectEmbedMeasure { embedded }, 0),
                    Strategy::EmbedEng { .. } => (Strategy::EmbedEng { embedded }, (1u64 << embedded) - 1),
                    _ => (
                        Strategy::EmbedEngSubspace { embedded, rounds: rounds.expect("subspace") },
                        (1u64 << embedded) - 1,
                    ),
                };
                if n > EMBED_SEARCH_MAX_N {
                    break;
                }
                let spec = StrategySpec::new(candidate, n)?;
                let delta = failure_probability(&spec, &noise)?;
                if delta <= delta_target {
                    return Ok(report(spec, delta));
                }
            }
            Err(Error::SearchFailed(format!(
                "{strategy} does not reach δ = {delta_target} at F = {fidelity}"
            )))
        }
    }
}
