//! Exact ground truth by enumeration.
//!
//! Every assignment of error labels to the ensemble copies is visited, the
//! counter-gate index rule is applied literally and the assignment weight is
//! accumulated into the bucket of its final amplitude index. Weights are kept
//! as integer numerators over the common denominator `D^n`, so no rational
//! arithmetic happens in the inner loop. Beyond [`BRUTE_FORCE_MAX_N`] copies
//! the distribution is built by exact convolution modulo `d` instead.

use num::{BigInt, BigUint, One, Zero};

use crate::arith::Exact;
use crate::error::{domain, Error, Result};
use crate::model::{fidelity_to_q, NoiseModel};
use crate::protocol::strategy::{AuxInit, Readout, StrategySpec};

/// Largest ensemble enumerated assignment by assignment.
pub const BRUTE_FORCE_MAX_N: u64 = 12;
/// Largest ensemble handled by the convolution fallback.
pub const DP_MAX_N: u64 = 10_000;

/// Exact distribution of the auxiliary amplitude index.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactDistribution {
    pub d: u64,
    /// `weights[j] = Pr(j)`.
    pub weights: Vec<Exact>,
}

impl ExactDistribution {
    pub fn point(d: u64, j: u64) -> Self {
        let mut weights = vec![Exact::zero(); d as usize];
        weights[j as usize] = Exact::one();
        Self { d, weights }
    }

    pub fn get(&self, j: u64) -> Exact {
        self.weights[j as usize].clone()
    }

    pub fn total(&self) -> Exact {
        self.weights.iter().fold(Exact::zero(), |a, b| a + b)
    }

    /// `Pr(j ≡ 0 mod 2^m)`.
    pub fn multiple_of_pow2(&self, m: u32) -> Exact {
        let step = 1u64 << m;
        (0..self.d).filter(|j| j % step == 0).fold(Exact::zero(), |a, j| a + self.get(j))
    }

    /// Distribution of `(j + k) mod d` for independent `j ~ self`, `k ~ other`.
    pub fn convolve(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        let d = self.d as usize;
        let mut weights = vec![Exact::zero(); d];
        for (a, wa) in self.weights.iter().enumerate() {
            if wa.is_zero() {
                continue;
            }
            for (b, wb) in other.weights.iter().enumerate() {
                if !wb.is_zero() {
                    weights[(a + b) % d] += wa * wb;
                }
            }
        }
        Self { d: self.d, weights }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.weights.iter().map(crate::arith::exact_to_f64).collect()
    }
}

/// How [`enumerate_shift_distribution_with`] evaluates the sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    BruteForce,
    Convolution,
}

/// Per-copy label alphabet as (shift, numerator) over a common denominator.
fn label_alphabet(noise: &NoiseModel<Exact>) -> Result<(Vec<(i64, BigUint)>, BigUint)> {
    noise.validate()?;
    let labels = noise.error_distribution();
    let mut den = BigInt::one();
    for (_, w) in &labels {
        den = num::integer::lcm(den, w.denom().clone());
    }
    let mut out = Vec::new();
    for (label, w) in labels {
        let numer = (w.numer() * (&den / w.denom())).to_biguint().expect("weights are non-negative");
        if !numer.is_zero() {
            out.push((label.shift(), numer));
        }
    }
    Ok((out, den.to_biguint().expect("positive denominator")))
}

/// Exact `Pr(j)` for `n` copies and auxiliary dimension `d`.
pub fn enumerate_shift_distribution(noise: &NoiseModel<Exact>, n: u64, d: u64) -> Result<ExactDistribution> {
    let method = if n <= BRUTE_FORCE_MAX_N { Method::BruteForce } else { Method::Convolution };
    enumerate_shift_distribution_with(noise, n, d, method)
}

pub fn enumerate_shift_distribution_with(
    noise: &NoiseModel<Exact>,
    n: u64,
    d: u64,
    method: Method,
) -> Result<ExactDistribution> {
    if d < 2 {
        return domain(format!("auxiliary dimension must be >= 2, got {d}"));
    }
    let (alphabet, den) = label_alphabet(noise)?;
    match method {
        Method::BruteForce => {
            if n > BRUTE_FORCE_MAX_N {
                return Err(Error::Resource(format!(
                    "brute-force enumeration limited to n <= {BRUTE_FORCE_MAX_N}, got {n}"
                )));
            }
            brute_force(&alphabet, &den, n, d)
        }
        Method::Convolution => {
            if n > DP_MAX_N {
                return Err(Error::Resource(format!("exact convolution limited to n <= {DP_MAX_N}, got {n}")));
            }
            let mut one_copy = vec![Exact::zero(); d as usize];
            let den_q = Exact::from_integer(BigInt::from(den));
            for (shift, numer) in &alphabet {
                let j = shift.rem_euclid(d as i64) as usize;
                one_copy[j] += Exact::from_integer(BigInt::from(numer.clone())) / &den_q;
            }
            let one_copy = ExactDistribution { d, weights: one_copy };
            let mut acc = ExactDistribution::point(d, 0);
            for _ in 0..n {
                acc = acc.convolve(&one_copy);
            }
            Ok(acc)
        }
    }
}

fn brute_force(alphabet: &[(i64, BigUint)], den: &BigUint, n: u64, d: u64) -> Result<ExactDistribution> {
    let total_den = num::pow::pow(den.clone(), n as usize);
    let d_usize = d as usize;
    let shifts: Vec<usize> = alphabet.iter().map(|(s, _)| s.rem_euclid(d as i64) as usize).collect();
    let numerators: Option<Vec<u128>> = alphabet.iter().map(|(_, w)| u128::try_from(w).ok()).collect();
    let fits = total_den.bits() < 120;
    let sums: Vec<BigUint> = match numerators {
        Some(nums) if fits => {
            let mut sums = vec![0u128; d_usize];
            dfs_u128(&shifts, &nums, n, 0, 1, d_usize, &mut sums);
            sums.into_iter().map(BigUint::from).collect()
        }
        _ => {
            let nums: Vec<BigUint> = alphabet.iter().map(|(_, w)| w.clone()).collect();
            let mut sums = vec![BigUint::zero(); d_usize];
            dfs_big(&shifts, &nums, n, 0, BigUint::one(), d_usize, &mut sums);
            sums
        }
    };
    let den_int = BigInt::from(total_den);
    Ok(ExactDistribution {
        d,
        weights: sums.into_iter().map(|s| Exact::new(BigInt::from(s), den_int.clone())).collect(),
    })
}

fn dfs_u128(shifts: &[usize], nums: &[u128], left: u64, j: usize, weight: u128, d: usize, sums: &mut [u128]) {
    if left == 0 {
        sums[j] += weight;
        return;
    }
    for (s, w) in shifts.iter().zip(nums) {
        dfs_u128(shifts, nums, left - 1, (j + s) % d, weight * w, d, sums);
    }
}

fn dfs_big(shifts: &[usize], nums: &[BigUint], left: u64, j: usize, weight: BigUint, d: usize, sums: &mut [BigUint]) {
    if left == 0 {
        sums[j] += weight;
        return;
    }
    for (s, w) in shifts.iter().zip(nums) {
        dfs_big(shifts, nums, left - 1, (j + s) % d, &weight * w, d, sums);
    }
}

/// Initial distribution of the auxiliary index for a strategy.
fn aux_initial(spec: &StrategySpec, noise: &NoiseModel<Exact>, d: u64) -> Result<ExactDistribution> {
    match spec.aux_init() {
        AuxInit::Pure => Ok(ExactDistribution::point(d, 0)),
        AuxInit::Embedded(e) => {
            let f = noise.fidelity();
            if f < Exact::new(BigInt::from(1), BigInt::from(2)) {
                return domain(format!("embedding requires F >= 1/2, got {f}"));
            }
            // e copies of fidelity F overlap the embedded target with F^e
            let q = fidelity_to_q(num::pow::pow(f, e as usize), d)?;
            let uniform = (Exact::one() - q.clone()) / Exact::from_integer(BigInt::from(d));
            let mut weights = vec![uniform; d as usize];
            weights[0] += q;
            Ok(ExactDistribution { d, weights })
        }
    }
}

/// Exact acceptance probability of `spec` on an ensemble drawn from `noise`.
///
/// Subspace readouts are evaluated by checking the parity rounds bit by bit
/// on every index.
pub fn enumerate_strategy_failure(spec: &StrategySpec, noise: &NoiseModel<Exact>) -> Result<Exact> {
    spec.validate()?;
    noise.validate()?;
    let Some(d) = spec.aux_dim() else {
        let target = noise
            .error_distribution()
            .into_iter()
            .filter(|(l, _)| l.is_target())
            .fold(Exact::zero(), |a, (_, w)| a + w);
        return Ok(num::pow::pow(target, spec.n as usize));
    };
    let init = aux_initial(spec, noise, d)?;
    let joint = if spec.n == 0 {
        init
    } else {
        init.convolve(&enumerate_shift_distribution(noise, spec.n, d)?)
    };
    let accepted = |j: u64| match spec.readout() {
        Readout::Full => j == 0,
        Readout::Subspace(rounds) => {
            let mut rest = j;
            for _ in 0..rounds {
                if rest % 2 == 1 {
                    return false;
                }
                rest /= 2;
            }
            true
        }
    };
    Ok((0..d).filter(|&j| accepted(j)).fold(Exact::zero(), |a, j| a + joint.get(j)))
}
