//! Noise states, twirling channels, embedding and auxiliary-pair readouts.

use num_complex::Complex64;
use rand::Rng;

use crate::dense::gates::{apply_amplitude_shift, make_bell, make_qudit_bell, Pair};
use crate::dense::state::{DensityMatrix, Layout, StateVector};
use crate::error::{domain, Result};
use crate::model::{fidelity_to_q, NoiseModel};

/// Density matrix of one copy of `noise` on layout `[d, d]`.
pub fn noise_density(noise: &NoiseModel<f64>) -> Result<DensityMatrix> {
    noise.validate()?;
    match noise {
        NoiseModel::PureTarget => make_bell(0, 0)?.to_density(),
        NoiseModel::Rank2 { fidelity } => {
            let flip = StateVector::basis(vec![2, 2], &[0, 1])?;
            DensityMatrix::from_mixture(&[(*fidelity, make_bell(0, 0)?), (1.0 - fidelity, flip)])
        }
        NoiseModel::Werner { fidelity } => {
            let target = make_bell(0, 0)?;
            twirled(&target, *fidelity)
        }
        NoiseModel::IsotropicQudit { dim, weight } => {
            let target = make_qudit_bell(*dim, 0, 0)?;
            let pure = target.to_density()?;
            let mixed = DensityMatrix::maximally_mixed(vec![*dim, *dim])?;
            pure.combine(*weight, &mixed, 1.0 - weight)
        }
    }
}

/// `f |t⟩⟨t| + (1 - f)/(D - 1) (1 - |t⟩⟨t|)`.
fn twirled(target: &StateVector, f: f64) -> Result<DensityMatrix> {
    let d = target.layout().size();
    let proj = target.to_density()?;
    let ident = DensityMatrix::maximally_mixed(target.layout().dims().to_vec())?;
    let rest = (1.0 - f) / (d as f64 - 1.0);
    // maximally_mixed is 1/D; rescale to the identity
    let out = ident.combine(rest * d as f64, &proj, f - rest)?;
    Ok(out)
}

/// Fidelity-preserving twirl onto `target`.
pub fn twirl_channel(rho: &DensityMatrix, target: &StateVector) -> Result<DensityMatrix> {
    let f = rho.expectation(target)?;
    twirled(target, f)
}

fn check_bipartite(rho: &DensityMatrix) -> Result<usize> {
    let dims = rho.layout().dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return domain(format!("expected a [d, d] pair layout, got {dims:?}"));
    }
    Ok(dims[0])
}

/// Twirls a two-qubit state into Werner form.
pub fn twirl_to_werner(rho: &DensityMatrix) -> Result<NoiseModel<f64>> {
    if check_bipartite(rho)? != 2 {
        return domain("Werner twirl acts on qubit pairs");
    }
    NoiseModel::werner(rho.expectation(&make_bell(0, 0)?)?)
}

/// Twirls a `d × d` pair into isotropic form.
pub fn twirl_to_isotropic(rho: &DensityMatrix) -> Result<NoiseModel<f64>> {
    let d = check_bipartite(rho)?;
    let f = rho.expectation(&make_qudit_bell(d, 0, 0)?)?;
    // guard against rounding just below 1/d² or above 1
    let f = f.clamp(1.0 / (d * d) as f64, 1.0);
    NoiseModel::isotropic(d, fidelity_to_q(f, d as u64)?)
}

/// Embeds `m` qubit pairs laid out `[A1, B1, …, Am, Bm]` into one
/// `2^m × 2^m` pair. Pair 1 becomes the least significant digit.
pub fn embed_pairs(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let dims = rho.layout().dims();
    if dims.len() % 2 != 0 || dims.iter().any(|&d| d != 2) {
        return domain(format!("embedding needs [A1, B1, …] qubit registers, got {dims:?}"));
    }
    let m = dims.len() / 2;
    let perm: Vec<usize> = (0..m).rev().map(|k| 2 * k).chain((0..m).rev().map(|k| 2 * k + 1)).collect();
    rho.reorder(&perm)?.merge(0, m)?.merge(1, m)
}

/// Same as [`embed_pairs`] for pure states.
pub fn embed_pairs_pure(psi: &StateVector) -> Result<StateVector> {
    let dims = psi.layout().dims();
    if dims.len() % 2 != 0 || dims.iter().any(|&d| d != 2) {
        return domain(format!("embedding needs [A1, B1, …] qubit registers, got {dims:?}"));
    }
    let m = dims.len() / 2;
    let perm: Vec<usize> = (0..m).rev().map(|k| 2 * k).chain((0..m).rev().map(|k| 2 * k + 1)).collect();
    psi.reorder(&perm)?.merge(0, m)?.merge(1, m)
}

/// Distribution of the `Z ⊗ Z` outcome difference `(k - l) mod d` on `aux`.
pub fn difference_distribution(probabilities: &[f64], layout: &Layout, aux: Pair) -> Result<Vec<f64>> {
    let dims = layout.dims();
    if aux.a >= dims.len() || aux.b >= dims.len() || dims[aux.a] != dims[aux.b] {
        return domain("invalid auxiliary pair");
    }
    let d = dims[aux.a];
    let mut out = vec![0.0; d];
    let mut digits = vec![0; dims.len()];
    for (i, p) in probabilities.iter().enumerate() {
        if *p != 0.0 {
            layout.digits(i, &mut digits);
            out[(digits[aux.a] + d - digits[aux.b]) % d] += p;
        }
    }
    Ok(out)
}

/// Outcome of measuring the least significant qubit of each side of an
/// auxiliary pair, labelled by `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParityOutcome {
    /// `(0, 0)`.
    M1,
    /// `(0, 1)`.
    M2,
    /// `(1, 0)`.
    M3,
    /// `(1, 1)`.
    M4,
}

impl ParityOutcome {
    pub fn from_bits(a: usize, b: usize) -> Self {
        match (a, b) {
            (0, 0) => ParityOutcome::M1,
            (0, 1) => ParityOutcome::M2,
            (1, 0) => ParityOutcome::M3,
            _ => ParityOutcome::M4,
        }
    }

    pub fn bits(&self) -> (usize, usize) {
        match self {
            ParityOutcome::M1 => (0, 0),
            ParityOutcome::M2 => (0, 1),
            ParityOutcome::M3 => (1, 0),
            ParityOutcome::M4 => (1, 1),
        }
    }

    pub fn is_even(&self) -> bool {
        matches!(self, ParityOutcome::M1 | ParityOutcome::M4)
    }

    /// Residual amplitude index on `d/2` given the pre-measurement index `j`.
    ///
    /// With `A = 2u + a` and `B = 2v + b`, `u - v = (j - a + b)/2`.
    pub fn residual_index(&self, j: u64, d: u64) -> u64 {
        let (a, b) = self.bits();
        let twice = (j as i64 - a as i64 + b as i64).rem_euclid(d as i64);
        (twice as u64 / 2) % (d / 2)
    }

    /// Amplitude shift that restores `j` after re-embedding the residual.
    pub fn correction_shift(&self) -> i64 {
        let (a, b) = self.bits();
        a as i64 - b as i64
    }
}

/// One branch of a parity measurement.
#[derive(Clone, Debug)]
pub struct MeasurementRecord {
    pub outcome: ParityOutcome,
    pub probability: f64,
    /// Normalized post-measurement state with the auxiliary pair reduced to
    /// dimension `d/2` (absent when the branch has probability zero).
    pub state: Option<StateVector>,
}

/// Measures the least significant qubit on each side of `aux` (dimension
/// `d = 2^k`) and returns all four branches.
pub fn measure_parity_pair(state: &StateVector, aux: Pair) -> Result<Vec<MeasurementRecord>> {
    let layout = state.layout();
    let dims = layout.dims();
    if aux.a >= dims.len() || aux.b >= dims.len() || dims[aux.a] != dims[aux.b] {
        return domain("invalid auxiliary pair");
    }
    let d = dims[aux.a];
    if d < 2 || !d.is_power_of_two() {
        return domain(format!("parity measurement needs a power-of-two dimension, got {d}"));
    }
    let mut new_dims = dims.to_vec();
    new_dims[aux.a] = d / 2;
    new_dims[aux.b] = d / 2;
    let new_layout = Layout::new(new_dims)?;
    let mut branches: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); new_layout.size()]; 4];
    let mut probs = [0.0; 4];
    let mut digits = vec![0; dims.len()];
    for (i, amp) in state.amplitudes().iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        layout.digits(i, &mut digits);
        let k = (digits[aux.a] & 1) * 2 + (digits[aux.b] & 1);
        digits[aux.a] >>= 1;
        digits[aux.b] >>= 1;
        branches[k][new_layout.index(&digits)] = *amp;
        probs[k] += amp.norm_sqr();
    }
    let mut out = Vec::with_capacity(4);
    for (k, amps) in branches.into_iter().enumerate() {
        let outcome = ParityOutcome::from_bits(k / 2, k % 2);
        let state = if probs[k] > 1e-300 {
            Some(StateVector::from_raw(new_layout.clone(), amps).normalized()?)
        } else {
            None
        };
        out.push(MeasurementRecord { outcome, probability: probs[k], state });
    }
    Ok(out)
}

/// Draws one branch of [`measure_parity_pair`].
pub fn sample_parity_pair<R: Rng>(state: &StateVector, aux: Pair, rng: &mut R) -> Result<MeasurementRecord> {
    let branches = measure_parity_pair(state, aux)?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for b in &branches {
        acc += b.probability;
        if u < acc && b.state.is_some() {
            return Ok(b.clone());
        }
    }
    Ok(branches.into_iter().rev().find(|b| b.state.is_some()).expect("some branch has weight"))
}

/// Re-embeds a residual auxiliary pair with a fresh `|Ψ00⟩` as its new least
/// significant qubit pair, then applies the outcome-dependent amplitude
/// correction.
pub fn reembed_and_correct(residual: &StateVector, aux: Pair, outcome: ParityOutcome) -> Result<StateVector> {
    let layout = residual.layout();
    let dims = layout.dims();
    if aux.a >= dims.len() || aux.b >= dims.len() || dims[aux.a] != dims[aux.b] {
        return domain("invalid auxiliary pair");
    }
    let half = dims[aux.a];
    let mut new_dims = dims.to_vec();
    new_dims[aux.a] = 2 * half;
    new_dims[aux.b] = 2 * half;
    let new_layout = Layout::new(new_dims)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); new_layout.size()];
    let s = 0.5f64.sqrt();
    let mut digits = vec![0; dims.len()];
    for (i, amp) in residual.amplitudes().iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        layout.digits(i, &mut digits);
        let (u, v) = (digits[aux.a], digits[aux.b]);
        for x in 0..2 {
            digits[aux.a] = 2 * u + x;
            digits[aux.b] = 2 * v + x;
            amps[new_layout.index(&digits)] = amp * s;
        }
        digits[aux.a] = u;
        digits[aux.b] = v;
    }
    let mut out = StateVector::new(new_layout, amps)?;
    apply_amplitude_shift(&mut out, aux, outcome.correction_shift())?;
    Ok(out)
}
