//! Strategies executed on dense states.
//!
//! Each noisy copy is eigen-decomposed into a mixture of pure states; every
//! product term (with every term of the auxiliary register) is pushed through
//! the counter gates and read out with the parity-measurement sequence, and
//! the results are averaged with the mixture weights.

use crate::dense::channels::{
    difference_distribution, embed_pairs, measure_parity_pair, noise_density, twirl_to_isotropic,
};
use crate::dense::gates::{apply_eng, make_bell, make_qudit_bell, Pair};
use crate::dense::state::{DensityMatrix, StateVector};
use crate::error::{domain, Error, Result};
use crate::model::NoiseModel;
use crate::protocol::strategy::{AuxInit, Readout, StrategySpec};

/// Upper bound on `terms × amplitudes` processed by [`dense_run`].
pub const WORK_BUDGET: usize = 1 << 28;

const EIGEN_CUTOFF: f64 = 1e-14;

/// Result of a dense strategy run.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseRun {
    /// `Pr(j)` of the auxiliary `Z ⊗ Z` outcome difference before readout
    /// (empty for the single-copy baseline).
    pub index_distribution: Vec<f64>,
    /// Acceptance probability of the strategy's readout.
    pub acceptance: f64,
}

fn product_mixture(copy: &[(f64, StateVector)], n: u64) -> Result<Vec<(f64, StateVector)>> {
    let mut acc: Vec<(f64, StateVector)> = vec![(1.0, StateVector::basis(vec![], &[])?)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(acc.len() * copy.len());
        for (w, s) in &acc {
            for (v, c) in copy {
                next.push((w * v, s.tensor(c)?));
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Auxiliary register as a mixture on layout `[d, d]`.
fn aux_mixture(spec: &StrategySpec, noise: &NoiseModel<f64>, d: usize) -> Result<Vec<(f64, StateVector)>> {
    match spec.aux_init() {
        AuxInit::Pure => Ok(vec![(1.0, make_qudit_bell(d, 0, 0)?)]),
        AuxInit::Embedded(e) => {
            let copy = noise_density(noise)?;
            let mut rho = copy.clone();
            for _ in 1..e {
                rho = rho.tensor(&copy)?;
            }
            let embedded = embed_pairs(&rho)?;
            let iso = twirl_to_isotropic(&embedded)?;
            noise_density(&iso)?.to_mixture(EIGEN_CUTOFF)
        }
    }
}

/// Probability that `rounds` successive parity measurements on `aux` are all
/// even.
fn subspace_acceptance(state: &StateVector, aux: Pair, rounds: u32) -> Result<f64> {
    if rounds == 0 {
        return Ok(1.0);
    }
    let mut total = 0.0;
    for rec in measure_parity_pair(state, aux)? {
        if rec.outcome.is_even() {
            if let Some(next) = &rec.state {
                total += rec.probability * subspace_acceptance(next, aux, rounds - 1)?;
            }
        }
    }
    Ok(total)
}

/// Runs `spec` against `noise` on dense states.
pub fn dense_run(spec: &StrategySpec, noise: &NoiseModel<f64>) -> Result<DenseRun> {
    spec.validate()?;
    let copy = noise_density(noise)?;
    let Some(d) = spec.aux_dim() else {
        let f = copy.expectation(&make_bell(0, 0)?)?;
        return Ok(DenseRun { index_distribution: Vec::new(), acceptance: f.powi(spec.n as i32) });
    };
    let d = d as usize;
    let copy_terms = copy.to_mixture(EIGEN_CUTOFF)?;
    let aux_terms = aux_mixture(spec, noise, d)?;
    let n = u32::try_from(spec.n).unwrap_or(u32::MAX);
    let amps = 4usize.checked_pow(n).and_then(|a| a.checked_mul(d * d));
    let terms = copy_terms.len().checked_pow(n).and_then(|t| t.checked_mul(aux_terms.len()));
    let work = amps.zip(terms).and_then(|(a, t)| a.checked_mul(t));
    if work.is_none_or(|w| w > WORK_BUDGET) {
        let (amps, terms) = (amps.map_or("too many".into(), |a| a.to_string()), terms.map_or("too many".into(), |t| t.to_string()));
        return Err(Error::Resource(format!(
            "dense run needs {terms} terms of {amps} amplitudes, above the work budget"
        )));
    }
    let ensemble = product_mixture(&copy_terms, spec.n)?;
    let pairs: Vec<Pair> = (0..spec.n as usize).map(|k| Pair::new(2 * k, 2 * k + 1)).collect();
    let aux = Pair::new(2 * spec.n as usize, 2 * spec.n as usize + 1);
    let mut dist = vec![0.0; d];
    let mut acceptance = 0.0;
    for (we, e) in &ensemble {
        for (wa, a) in &aux_terms {
            let w = we * wa;
            let mut s = e.tensor(a)?;
            apply_eng(&mut s, &pairs, aux)?;
            let probs = s.probabilities();
            let diff = difference_distribution(&probs, s.layout(), aux)?;
            for (slot, p) in dist.iter_mut().zip(&diff) {
                *slot += w * p;
            }
            acceptance += w * match spec.readout() {
                Readout::Full => diff[0],
                Readout::Subspace(rounds) => subspace_acceptance(&s, aux, rounds)?,
            };
        }
    }
    Ok(DenseRun { index_distribution: dist, acceptance })
}

/// Mixture of `n` copies of `noise` followed by a pure `|Φ^d_00⟩`, as a
/// density matrix on `[A1, B1, …, An, Bn, A, B]`.
pub fn ensemble_with_aux(noise: &NoiseModel<f64>, n: u64, d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return domain("auxiliary dimension must be >= 2");
    }
    let copy = noise_density(noise)?;
    let mut rho = make_qudit_bell(d, 0, 0)?.to_density()?;
    for _ in 0..n {
        rho = copy.tensor(&rho)?;
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::strategy::Strategy;

    #[test]
    fn pure_ensemble_accepted() {
        let spec = StrategySpec::new(Strategy::WernerSubspace { rounds: 2 }, 3).unwrap();
        let run = dense_run(&spec, &NoiseModel::PureTarget).unwrap();
        assert!((run.acceptance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn werner_two_copies() {
        let spec = StrategySpec::new(Strategy::WernerFull, 2).unwrap();
        let run = dense_run(&spec, &NoiseModel::werner(0.7).unwrap()).unwrap();
        for (p, want) in run.index_distribution.iter().zip([0.66, 0.17, 0.17]) {
            assert!((p - want).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_embed_statistics() {
        let spec = StrategySpec::new(Strategy::DirectEmbedMeasure { embedded: 2 }, 0).unwrap();
        let run = dense_run(&spec, &NoiseModel::werner(0.9).unwrap()).unwrap();
        assert!((run.acceptance - 0.848).abs() < 1e-12);
    }
}
