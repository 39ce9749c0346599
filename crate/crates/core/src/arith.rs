//! Arithmetic backends.
//!
//! Every closed-form quantity in this crate is written once, generically over
//! [`Prob`], and evaluated either in `f64` or in exact arbitrary-precision
//! rationals ([`Exact`]). The float backend switches to log-space multinomial
//! coefficients above [`LOG_SPACE_THRESHOLD`] copies.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num::{BigInt, BigRational, BigUint, One, ToPrimitive, Zero};
use statrs::function::factorial::ln_factorial;

use crate::error::{domain, Result};

/// Exact rational probability.
pub type Exact = BigRational;

/// Ensemble sizes above this use log-space coefficients in float mode.
pub const LOG_SPACE_THRESHOLD: u64 = 60;

/// A probability-valued scalar: `f64` or an exact rational.
pub trait Prob:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// True for the rational backend.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn powu(&self, exp: u64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;

    fn from_u64(v: u64) -> Self {
        Self::from_ratio(v as i64, 1)
    }

    /// `(k_1 + ... + k_r)! / (k_1! ... k_r!) * p_1^k_1 ... p_r^k_r`.
    fn multinomial_term(counts: &[u64], probs: &[Self]) -> Self;

    /// `C(n, k) * stay^(n-k) * hit^k`.
    fn binomial_term(n: u64, k: u64, stay: &Self, hit: &Self) -> Self {
        Self::multinomial_term(&[n - k, k], &[stay.clone(), hit.clone()])
    }

    /// `out[j] = Σ_{up - down ≡ j (mod d)} multinomial(stay, up, down)` over
    /// all splits of `n` copies, with `probs = [stay, up, down]`.
    fn trinomial_mod(n: u64, d: u64, probs: &[Self; 3]) -> Vec<Self> {
        trinomial_mod_with(n, d, probs, |counts| Self::multinomial_term(counts, probs))
    }
}

fn trinomial_mod_with<P: Prob>(n: u64, d: u64, probs: &[P; 3], term: impl Fn(&[u64; 3]) -> P) -> Vec<P> {
    let mut out = vec![P::zero(); d as usize];
    for up in 0..=n {
        if up > 0 && probs[1].is_zero() {
            break;
        }
        for down in 0..=(n - up) {
            if down > 0 && probs[2].is_zero() {
                break;
            }
            let j = (up as i64 - down as i64).rem_euclid(d as i64) as usize;
            out[j] = out[j].clone() + term(&[n - up - down, up, down]);
        }
    }
    out
}

impl Prob for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn powu(&self, exp: u64) -> Self {
        if exp <= i32::MAX as u64 {
            self.powi(exp as i32)
        } else {
            self.powf(exp as f64)
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn multinomial_term(counts: &[u64], probs: &[Self]) -> Self {
        debug_assert_eq!(counts.len(), probs.len());
        if counts.iter().zip(probs).any(|(&k, &p)| k > 0 && p == 0.0) {
            return 0.0;
        }
        let n: u64 = counts.iter().sum();
        if n <= LOG_SPACE_THRESHOLD {
            let mut coef = 1.0;
            let mut seen = 0u64;
            for &k in counts {
                seen += k;
                coef *= binomial_u128(seen, k) as f64;
            }
            counts
                .iter()
                .zip(probs)
                .fold(coef, |acc, (&k, &p)| acc * p.powu(k))
        } else {
            let mut log = ln_factorial(n);
            for (&k, &p) in counts.iter().zip(probs) {
                if k > 0 {
                    log += k as f64 * p.ln() - ln_factorial(k);
                }
            }
            log.exp()
        }
    }

    fn trinomial_mod(n: u64, d: u64, probs: &[Self; 3]) -> Vec<Self> {
        if n <= LOG_SPACE_THRESHOLD {
            return trinomial_mod_with(n, d, probs, |c| Self::multinomial_term(c, probs));
        }
        let lf: Vec<f64> = (0..=n).map(ln_factorial).collect();
        let lp = probs.map(|p| p.ln());
        let ln_n = lf[n as usize];
        trinomial_mod_with(n, d, probs, |c| {
            let mut log = ln_n;
            for (&k, l) in c.iter().zip(&lp) {
                if k > 0 {
                    log += k as f64 * l - lf[k as usize];
                }
            }
            log.exp()
        })
    }
}

impl Prob for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn powu(&self, exp: u64) -> Self {
        num::pow::pow(self.clone(), exp as usize)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn multinomial_term(counts: &[u64], probs: &[Self]) -> Self {
        debug_assert_eq!(counts.len(), probs.len());
        if counts
            .iter()
            .zip(probs)
            .any(|(&k, p)| k > 0 && Zero::is_zero(p))
        {
            return Zero::zero();
        }
        let mut coef = BigUint::one();
        let mut seen = 0u64;
        for &k in counts {
            seen += k;
            coef *= binomial_big(seen, k);
        }
        counts.iter().zip(probs).fold(
            BigRational::from_integer(BigInt::from(coef)),
            |acc, (&k, p)| acc * p.powu(k),
        )
    }
}

/// Exact binomial coefficient; panics only on u128 overflow (n > 120 or so).
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Exact binomial coefficient in arbitrary precision.
pub fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Smallest `e` with `2^e >= x` (`x >= 1`).
pub fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Parses `"0.9"`, `"9/10"`, `"1"` or `"2.5e-1"` into an exact rational.
pub fn parse_exact(text: &str) -> Result<Exact> {
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| crate::Error::Domain(format!("not a rational: {text}")))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| crate::Error::Domain(format!("not a rational: {text}")))?;
        if den.is_zero() {
            return domain(format!("zero denominator in {text}"));
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..]
                .parse()
                .map_err(|_| crate::Error::Domain(format!("bad exponent in {text}")))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return domain(format!("not a decimal number: {text}"));
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().unwrap() / 10;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * num::pow::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num::pow::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Converts an exact value to `f64` (used when handing exact inputs to the
/// float backend).
pub fn exact_to_f64(x: &Exact) -> f64 {
    Prob::to_f64(x)
}

/// Converts a finite `f64` to the exact rational it represents.
pub fn f64_to_exact(x: f64) -> Result<Exact> {
    BigRational::from_float(x).ok_or_else(|| crate::Error::Domain(format!("non-finite value {x}")))
}
