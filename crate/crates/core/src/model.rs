//! Shared domain types: Bell labels, the error taxonomy, the promised noise
//! families and run accounting.

use serde::{Deserialize, Serialize};

use crate::arith::Prob;
use crate::error::{domain, Result};

/// Label `(i, j)` of the qubit Bell state `1 ⊗ X^j Z^i |Φ+⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BellLabel {
    phase_bit: u8,
    amplitude_bit: u8,
}

impl BellLabel {
    pub const TARGET: BellLabel = BellLabel { phase_bit: 0, amplitude_bit: 0 };

    pub fn new(phase_bit: u8, amplitude_bit: u8) -> Result<Self> {
        if phase_bit > 1 || amplitude_bit > 1 {
            return domain(format!("Bell label bits must be 0 or 1, got ({phase_bit}, {amplitude_bit})"));
        }
        Ok(Self { phase_bit, amplitude_bit })
    }

    pub fn phase_bit(&self) -> u8 {
        self.phase_bit
    }

    pub fn amplitude_bit(&self) -> u8 {
        self.amplitude_bit
    }
}

/// Label `(m, n)` of the generalized Bell state `|Φ^d_mn⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuditBellLabel {
    dim: usize,
    phase: usize,
    amplitude: usize,
}

impl QuditBellLabel {
    pub fn new(dim: usize, phase: usize, amplitude: usize) -> Result<Self> {
        if dim < 2 {
            return domain(format!("qudit dimension must be >= 2, got {dim}"));
        }
        if phase >= dim || amplitude >= dim {
            return domain(format!("indices ({phase}, {amplitude}) out of range for d = {dim}"));
        }
        Ok(Self { dim, phase, amplitude })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn phase(&self) -> usize {
        self.phase
    }
    pub fn amplitude(&self) -> usize {
        self.amplitude
    }
}

/// Classical class of one ensemble copy as seen by the counter gate.
///
/// `Type1` is `|01⟩`, `Type2` is `|10⟩` and `Type3` is the phase-flipped Bell
/// state. `GeneralShift(s)` covers qudit controls and GHZ amplitude errors;
/// `Phase` is a GHZ phase error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorLabel {
    Target,
    Type1,
    Type2,
    Type3,
    GeneralShift(i64),
    Phase,
}

impl ErrorLabel {
    /// Amplitude-index shift this copy applies to a phase-zero auxiliary state.
    pub fn shift(&self) -> i64 {
        match self {
            ErrorLabel::Target | ErrorLabel::Type3 | ErrorLabel::Phase => 0,
            ErrorLabel::Type1 => 1,
            ErrorLabel::Type2 => -1,
            ErrorLabel::GeneralShift(s) => *s,
        }
    }

    pub fn is_target(&self) -> bool {
        matches!(self, ErrorLabel::Target)
    }
}

/// The promised noisy alternative for every copy of the ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum NoiseModel<P = f64> {
    PureTarget,
    /// `F |Ψ00⟩⟨Ψ00| + (1-F) |01⟩⟨01|`.
    Rank2 { fidelity: P },
    /// Werner state of fidelity `F ∈ [1/4, 1]`.
    Werner { fidelity: P },
    /// `q |Φ^d_00⟩⟨Φ^d_00| + (1-q) 1/d²` on a qudit pair.
    IsotropicQudit { dim: usize, weight: P },
}

impl<P: Prob> NoiseModel<P> {
    pub fn rank2(fidelity: P) -> Result<Self> {
        let model = NoiseModel::Rank2 { fidelity };
        model.validate()?;
        Ok(model)
    }

    pub fn werner(fidelity: P) -> Result<Self> {
        let model = NoiseModel::Werner { fidelity };
        model.validate()?;
        Ok(model)
    }

    pub fn isotropic(dim: usize, weight: P) -> Result<Self> {
        let model = NoiseModel::IsotropicQudit { dim, weight };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModel::PureTarget => Ok(()),
            NoiseModel::Rank2 { fidelity } => check_unit(fidelity, "rank-2 fidelity"),
            NoiseModel::Werner { fidelity } => werner_error_probs(fidelity.clone()).map(|_| ()),
            NoiseModel::IsotropicQudit { dim, weight } => {
                if *dim < 2 {
                    return domain(format!("isotropic dimension must be >= 2, got {dim}"));
                }
                check_unit(weight, "isotropic weight")
            }
        }
    }

    /// Overlap of one copy with the target state.
    pub fn fidelity(&self) -> P {
        match self {
            NoiseModel::PureTarget => P::one(),
            NoiseModel::Rank2 { fidelity } | NoiseModel::Werner { fidelity } => fidelity.clone(),
            NoiseModel::IsotropicQudit { dim, weight } => {
                let d2 = P::from_u64((dim * dim) as u64);
                weight.clone() + (P::one() - weight.clone()) / d2
            }
        }
    }

    /// Local dimension of one copy (2 for Bell pairs).
    pub fn copy_dim(&self) -> usize {
        match self {
            NoiseModel::IsotropicQudit { dim, .. } => *dim,
            _ => 2,
        }
    }

    /// Largest amplitude shift a single copy can cause.
    pub fn max_shift(&self) -> u64 {
        (self.copy_dim() - 1) as u64
    }

    /// Distribution of a single copy over [`ErrorLabel`]s; weights sum to one.
    pub fn error_distribution(&self) -> Vec<(ErrorLabel, P)> {
        match self {
            NoiseModel::PureTarget => vec![(ErrorLabel::Target, P::one())],
            NoiseModel::Rank2 { fidelity } => vec![
                (ErrorLabel::Target, fidelity.clone()),
                (ErrorLabel::Type1, P::one() - fidelity.clone()),
            ],
            NoiseModel::Werner { fidelity } => {
                let [p0, p1, p2, p3] = werner_error_probs(fidelity.clone())
                    .expect("validated Werner fidelity");
                vec![
                    (ErrorLabel::Target, p0),
                    (ErrorLabel::Type1, p1),
                    (ErrorLabel::Type2, p2),
                    (ErrorLabel::Type3, p3),
                ]
            }
            NoiseModel::IsotropicQudit { dim, weight } => {
                let d = *dim as i64;
                let unit = (P::one() - weight.clone()) / P::from_u64((d * d) as u64);
                let mut out = vec![(ErrorLabel::Target, weight.clone() + unit.clone())];
                // (m, n) with m - n = s occurs d - |s| times; (0,0) is the target.
                out.push((ErrorLabel::GeneralShift(0), P::from_u64((d - 1) as u64) * unit.clone()));
                for s in 1..d {
                    let w = P::from_u64((d - s) as u64) * unit.clone();
                    out.push((ErrorLabel::GeneralShift(s), w.clone()));
                    out.push((ErrorLabel::GeneralShift(-s), w));
                }
                out
            }
        }
    }

    /// Per-copy distribution of the amplitude shift, aggregated by shift value
    /// and sorted by shift.
    pub fn shift_weights(&self) -> Vec<(i64, P)> {
        let mut out: Vec<(i64, P)> = Vec::new();
        for (label, w) in self.error_distribution() {
            let s = label.shift();
            match out.iter_mut().find(|(t, _)| *t == s) {
                Some(entry) => entry.1 = entry.1.clone() + w,
                None => out.push((s, w)),
            }
        }
        out.sort_by_key(|(s, _)| *s);
        out
    }
}

impl NoiseModel<crate::arith::Exact> {
    /// Float copy of an exact noise model.
    pub fn to_f64(&self) -> NoiseModel<f64> {
        match self {
            NoiseModel::PureTarget => NoiseModel::PureTarget,
            NoiseModel::Rank2 { fidelity } => NoiseModel::Rank2 { fidelity: fidelity.to_f64() },
            NoiseModel::Werner { fidelity } => NoiseModel::Werner { fidelity: fidelity.to_f64() },
            NoiseModel::IsotropicQudit { dim, weight } => {
                NoiseModel::IsotropicQudit { dim: *dim, weight: weight.to_f64() }
            }
        }
    }
}

fn check_unit<P: Prob>(x: &P, what: &str) -> Result<()> {
    if *x < P::zero() || *x > P::one() {
        return domain(format!("{what} must lie in [0, 1], got {x:?}"));
    }
    Ok(())
}

/// Werner class probabilities `(p0, p1, p2, p3) = (F, (1-F)/3, (1-F)/3, (1-F)/3)`.
pub fn werner_error_probs<P: Prob>(fidelity: P) -> Result<[P; 4]> {
    if fidelity < P::from_ratio(1, 4) || fidelity > P::one() {
        return domain(format!("Werner fidelity must lie in [1/4, 1], got {fidelity:?}"));
    }
    let p = (P::one() - fidelity.clone()) / P::from_u64(3);
    Ok([fidelity, p.clone(), p.clone(), p])
}

/// Isotropic mixing weight `q = (d² F - 1) / (d² - 1)` for a qudit pair of
/// dimension `d`.
pub fn fidelity_to_q<P: Prob>(fidelity: P, dim: u64) -> Result<P> {
    if dim < 2 {
        return domain(format!("dimension must be >= 2, got {dim}"));
    }
    let d2 = P::from_u64(dim) * P::from_u64(dim);
    if fidelity < P::one() / d2.clone() || fidelity > P::one() {
        return domain(format!("fidelity must lie in [1/d², 1] for d = {dim}, got {fidelity:?}"));
    }
    Ok((d2.clone() * fidelity - P::one()) / (d2 - P::one()))
}

/// Inverse of [`fidelity_to_q`].
pub fn q_to_fidelity<P: Prob>(q: P, dim: u64) -> Result<P> {
    if dim < 2 {
        return domain(format!("dimension must be >= 2, got {dim}"));
    }
    check_unit(&q, "isotropic weight")?;
    let d2 = P::from_u64(dim) * P::from_u64(dim);
    Ok((q * (d2.clone() - P::one()) + P::one()) / d2)
}

/// Ensemble size, promise gap and the noisy alternative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsemblePromise<P = f64> {
    pub n: u64,
    pub epsilon: P,
    pub noise: NoiseModel<P>,
}

impl<P: Prob> EnsemblePromise<P> {
    pub fn new(n: u64, epsilon: P, noise: NoiseModel<P>) -> Result<Self> {
        if n == 0 {
            return domain("ensemble size must be >= 1");
        }
        if epsilon <= P::zero() || epsilon > P::one() {
            return domain(format!("promise gap must lie in (0, 1], got {epsilon:?}"));
        }
        noise.validate()?;
        if noise.fidelity() > P::one() - epsilon.clone() {
            return domain(format!(
                "noisy alternative has fidelity {:?} above 1 - epsilon",
                noise.fidelity()
            ));
        }
        Ok(Self { n, epsilon, noise })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Accept,
    Reject,
}

/// Verdict and resource accounting of one protocol run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub verdict: Verdict,
    pub copies_consumed: u64,
    pub ebits_consumed: f64,
    pub measured_j: Option<u64>,
    pub subspaces_measured: u32,
}

impl RunOutcome {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Exact;

    #[test]
    fn werner_probs_examples() {
        assert_eq!(werner_error_probs(1.0).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        let p = werner_error_probs(0.85).unwrap();
        assert!((p[1] - 0.05).abs() < 1e-15 && p[1] == p[2] && p[2] == p[3]);
        let p = werner_error_probs(0.7).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((p[3] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn werner_probs_exact_sum() {
        let p = werner_error_probs(Exact::from_ratio(7, 10)).unwrap();
        let total = p.iter().cloned().fold(Exact::zero(), |a, b| a + b);
        assert_eq!(total, Exact::one());
        assert_eq!(p[1], Exact::from_ratio(1, 10));
    }

    #[test]
    fn werner_domain() {
        assert!(werner_error_probs(0.2).is_err());
        assert!(werner_error_probs(1.01).is_err());
        assert!(werner_error_probs(0.25).is_ok());
    }

    #[test]
    fn fidelity_to_q_examples() {
        assert_eq!(fidelity_to_q(1.0, 2).unwrap(), 1.0);
        assert!((fidelity_to_q(0.7, 2).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(fidelity_to_q(Exact::from_ratio(1, 9), 3).unwrap(), Exact::zero());
        assert_eq!(fidelity_to_q(Exact::from_ratio(7, 10), 2).unwrap(), Exact::from_ratio(3, 5));
        assert!(fidelity_to_q(0.2, 2).is_err());
    }

    #[test]
    fn rank2_labels_only_target_and_type1() {
        let dist = NoiseModel::rank2(0.9).unwrap().error_distribution();
        assert_eq!(dist.len(), 2);
        assert!(dist.iter().all(|(l, _)| matches!(l, ErrorLabel::Target | ErrorLabel::Type1)));
    }

    #[test]
    fn isotropic_distribution_sums_to_one() {
        let noise = NoiseModel::isotropic(3, Exact::from_ratio(1, 2)).unwrap();
        let total = noise
            .error_distribution()
            .into_iter()
            .fold(Exact::zero(), |a, (_, w)| a + w);
        assert_eq!(total, Exact::one());
        for (label, _) in noise.error_distribution() {
            if let ErrorLabel::GeneralShift(s) = label {
                assert!(s.abs() < 3);
            }
        }
        // q + (1-q)/d² with q = 1/2, d = 3
        assert_eq!(noise.fidelity(), Exact::from_ratio(5, 9));
    }

    #[test]
    fn promise_requires_gap() {
        let noise = NoiseModel::werner(0.9).unwrap();
        assert!(EnsemblePromise::new(10, 0.1, noise.clone()).is_ok());
        assert!(EnsemblePromise::new(10, 0.2, noise.clone()).is_err());
        assert!(EnsemblePromise::new(0, 0.1, noise).is_err());
    }

    #[test]
    fn bell_label_bounds() {
        assert!(BellLabel::new(1, 1).is_ok());
        assert!(BellLabel::new(2, 0).is_err());
        assert!(QuditBellLabel::new(4, 3, 3).is_ok());
        assert!(QuditBellLabel::new(4, 4, 0).is_err());
        assert!(QuditBellLabel::new(1, 0, 0).is_err());
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn q_round_trips_exactly(num in 0u32..=1000, d in 2u64..6) {
            let lo = Exact::from_ratio(1, (d * d) as i64);
            let f = lo.clone() + (Exact::one() - lo) * Exact::from_ratio(num as i64, 1000);
            let q = fidelity_to_q(f.clone(), d).unwrap();
            prop_assert_eq!(q_to_fidelity(q, d).unwrap(), f);
        }

        #[test]
        fn werner_distribution_sums_to_one(num in 250u32..=1000) {
            let noise = NoiseModel::werner(Exact::from_ratio(num as i64, 1000)).unwrap();
            let total = noise.error_distribution().into_iter().fold(Exact::zero(), |a, (_, w)| a + w);
            prop_assert_eq!(total, Exact::one());
        }
    }
}
