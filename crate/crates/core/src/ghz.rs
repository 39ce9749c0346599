//! Verification of `m`-party GHZ ensembles.
//!
//! `|Ψ_{i,k}⟩ = (|0 k⟩ + (-1)^i |1 k̄⟩)/√2` where `k` is an `(m-1)`-bit vector
//! (component `c` is bit `c` of the integer `k`, party `c + 2`). After
//! depolarization every copy is `Target` with weight `F`, a phase error with
//! `λ0`, or one of the amplitude errors `|0k⟩`, `|1k̄⟩` with weight `λ_k` each.
//!
//! The amplitude round runs the multipartite counter gate into a GHZ-type
//! qudit register and accepts iff every component of its amplitude vector is
//! zero; `|0k⟩` adds `k` and `|1k̄⟩` subtracts it. The phase round uses a
//! qubit GHZ register as control of transversal CNOTs and reads its phase bit
//! in the X basis. Phase errors add to that bit; a copy holding an amplitude
//! error carries a uniformly random phase bit and so randomizes it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{ceil_log2, Prob};
use crate::dense::{DensityMatrix, Layout, StateVector};
use crate::error::{domain, Error, Result};
use crate::model::{RunOutcome, Verdict};
use crate::protocol::montecarlo::{run_batches, MonteCarloEstimate};

/// Largest supported party count.
pub const MAX_PARTIES: usize = 12;

/// Label `(i, k)` of `|Ψ_{i,k}⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GHZLabel {
    pub parties: usize,
    pub phase_bit: u8,
    /// `m - 1` amplitude bits.
    pub amplitude: Vec<u8>,
}

impl GHZLabel {
    pub fn new(parties: usize, phase_bit: u8, amplitude: Vec<u8>) -> Result<Self> {
        check_parties(parties)?;
        if phase_bit > 1 || amplitude.iter().any(|&b| b > 1) {
            return domain("GHZ label bits must be 0 or 1");
        }
        if amplitude.len() != parties - 1 {
            return domain(format!("{} amplitude bits for {parties} parties", amplitude.len()));
        }
        Ok(Self { parties, phase_bit, amplitude })
    }

    /// Amplitude vector as an integer (component 0 is bit 0).
    pub fn amplitude_index(&self) -> usize {
        self.amplitude.iter().enumerate().map(|(c, &b)| (b as usize) << c).sum()
    }
}

fn check_parties(m: usize) -> Result<()> {
    if !(2..=MAX_PARTIES).contains(&m) {
        return domain(format!("party count must lie in 2..={MAX_PARTIES}, got {m}"));
    }
    Ok(())
}

/// Depolarized GHZ-diagonal state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GHZDiagonalState<P = f64> {
    pub parties: usize,
    pub fidelity: P,
    pub lambda0: P,
    /// `λ_k` for `k = 1 ..= 2^(m-1) - 1` (index `k - 1`).
    pub lambda: Vec<P>,
}

impl<P: Prob> GHZDiagonalState<P> {
    pub fn new(parties: usize, fidelity: P, lambda0: P, lambda: Vec<P>) -> Result<Self> {
        let state = Self { parties, fidelity, lambda0, lambda };
        state.validate()?;
        Ok(state)
    }

    pub fn pure(parties: usize) -> Result<Self> {
        check_parties(parties)?;
        Self::new(parties, P::one(), P::zero(), vec![P::zero(); (1 << (parties - 1)) - 1])
    }

    pub fn validate(&self) -> Result<()> {
        check_parties(self.parties)?;
        let k_max = (1usize << (self.parties - 1)) - 1;
        if self.lambda.len() != k_max {
            return domain(format!("expected {k_max} amplitude weights, got {}", self.lambda.len()));
        }
        let weights = std::iter::once(&self.fidelity).chain(std::iter::once(&self.lambda0)).chain(&self.lambda);
        if weights.clone().any(|w| *w < P::zero()) {
            return domain("GHZ weights must be non-negative");
        }
        let total = self.lambda.iter().fold(self.fidelity.clone() + self.lambda0.clone(), |acc, l| {
            acc + P::from_ratio(2, 1) * l.clone()
        });
        let tol = if P::EXACT { 0.0 } else { 1e-12 };
        if (total.to_f64() - 1.0).abs() > tol || (P::EXACT && total != P::one()) {
            return domain(format!("F + λ0 + 2 Σ λ_k must equal 1, got {total:?}"));
        }
        Ok(())
    }

    /// Per-copy classes as `(amplitude shift k, sign, phase flips, weight)`.
    fn classes(&self) -> Vec<(usize, i8, bool, P)> {
        let mut out = vec![(0, 0, false, self.fidelity.clone()), (0, 0, true, self.lambda0.clone())];
        for (idx, l) in self.lambda.iter().enumerate() {
            out.push((idx + 1, 1, false, l.clone()));
            out.push((idx + 1, -1, false, l.clone()));
        }
        out.retain(|c| !c.3.is_zero());
        out
    }
}

impl GHZDiagonalState<crate::arith::Exact> {
    pub fn to_f64(&self) -> GHZDiagonalState<f64> {
        GHZDiagonalState {
            parties: self.parties,
            fidelity: self.fidelity.to_f64(),
            lambda0: self.lambda0.to_f64(),
            lambda: self.lambda.iter().map(|l| l.to_f64()).collect(),
        }
    }
}

/// Multipartite counter gate on one computational control `(i_1, …, i_m)`:
/// `j'_k = j_k + i_(k+1) - i_1 (mod d)`.
pub fn mcx_update(control: &[u8], aux: &[u64], d: u64) -> Result<Vec<u64>> {
    if control.len() < 2 || aux.len() != control.len() - 1 {
        return domain("aux vector must have one component per non-leading party");
    }
    if d < 2 || aux.iter().any(|&j| j >= d) || control.iter().any(|&b| b > 1) {
        return domain("invalid control bits or aux components");
    }
    let lead = control[0] as u64;
    Ok(aux
        .iter()
        .zip(&control[1..])
        .map(|(&j, &i)| (j + i as u64 + d - lead) % d)
        .collect())
}

/// Which rounds a GHZ run performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GhzRounds {
    Amplitude,
    AmplitudeThenPhase,
}

/// Auxiliary dimension of the amplitude round: smallest power of two `≥ n+1`.
pub fn ghz_aux_dim(n: u64) -> u64 {
    1u64 << ceil_log2(n + 1).max(1)
}

fn vector_shift(k: usize, sign: i8, comps: usize, d: u64, code: usize) -> usize {
    // code is the base-d encoding of the aux vector, component c at d^c
    let d = d as usize;
    let mut out = 0;
    let mut rest = code;
    let mut place = 1;
    for c in 0..comps {
        let digit = rest % d;
        rest /= d;
        let bit = (k >> c) & 1;
        let next = if sign >= 0 { (digit + bit) % d } else { (digit + d - bit) % d };
        out += next * place;
        place *= d;
    }
    out
}

/// Joint distribution over `(aux vector code, any amplitude error, phase
/// parity)` after `n` copies, flattened as `(code * 2 + amp) * 2 + parity`.
fn ghz_dp<P: Prob>(noise: &GHZDiagonalState<P>, n: u64) -> Result<Vec<P>> {
    noise.validate()?;
    if n == 0 {
        return domain("ensemble size must be >= 1");
    }
    let comps = noise.parties - 1;
    let d = ghz_aux_dim(n);
    let space = (d as usize)
        .checked_pow(comps as u32)
        .filter(|&s| s <= 1 << 22)
        .ok_or_else(|| Error::Resource(format!("aux vector space d^{comps} with d = {d} is too large")))?;
    let idx = |code: usize, amp: bool, parity: bool| (code * 2 + amp as usize) * 2 + parity as usize;
    let mut dist = vec![P::zero(); space * 4];
    dist[idx(0, false, false)] = P::one();
    let classes = noise.classes();
    let mut moves = Vec::with_capacity(space * classes.len());
    for code in 0..space {
        for (k, sign, _, _) in &classes {
            moves.push(if *k == 0 { code } else { vector_shift(*k, *sign, comps, d, code) });
        }
    }
    for _ in 0..n {
        let mut next = vec![P::zero(); space * 4];
        for code in 0..space {
            for amp in [false, true] {
                for parity in [false, true] {
                    let w = &dist[idx(code, amp, parity)];
                    if w.is_zero() {
                        continue;
                    }
                    for (c, (k, _, flip, p)) in classes.iter().enumerate() {
                        let to = moves[code * classes.len() + c];
                        let slot = idx(to, amp || *k != 0, parity ^ *flip);
                        next[slot] = next[slot].clone() + w.clone() * p.clone();
                    }
                }
            }
        }
        dist = next;
    }
    Ok(dist)
}

/// Distribution of the aux amplitude vector after the amplitude round,
/// indexed by its base-`d` code (component 0 least significant).
pub fn ghz_amplitude_distribution<P: Prob>(noise: &GHZDiagonalState<P>, n: u64) -> Result<Vec<P>> {
    let dist = ghz_dp(noise, n)?;
    Ok(dist.chunks(4).map(|c| c.iter().fold(P::zero(), |a, b| a + b.clone())).collect())
}

/// Exact acceptance probability of the GHZ protocol by dynamic programming
/// over the aux amplitude vector.
pub fn ghz_failure_probability<P: Prob>(noise: &GHZDiagonalState<P>, n: u64, rounds: GhzRounds) -> Result<P> {
    let dist = ghz_dp(noise, n)?;
    let half = P::from_ratio(1, 2);
    let mut total = P::zero();
    for (slot, w) in dist[..4].iter().enumerate() {
        let (amp, parity) = (slot & 2 != 0, slot & 1 != 0);
        total = total
            + match rounds {
                GhzRounds::Amplitude => w.clone(),
                GhzRounds::AmplitudeThenPhase if amp => w.clone() * half.clone(),
                GhzRounds::AmplitudeThenPhase if !parity => w.clone(),
                GhzRounds::AmplitudeThenPhase => P::zero(),
            };
    }
    Ok(total)
}

/// Exact acceptance probability by enumerating every label assignment and
/// folding [`mcx_update`] over the computational controls. Phase-round
/// randomness from amplitude-error copies is averaged over their phase bits.
pub fn ghz_enumerate<P: Prob>(noise: &GHZDiagonalState<P>, n: u64, rounds: GhzRounds) -> Result<P> {
    noise.validate()?;
    let m = noise.parties;
    let d = ghz_aux_dim(n);
    // (control bits, phase flip, is amplitude error, weight)
    let mut labels: Vec<(Vec<u8>, bool, bool, P)> = Vec::new();
    labels.push((vec![0; m], false, false, noise.fidelity.clone()));
    labels.push((vec![0; m], true, false, noise.lambda0.clone()));
    for (idx, l) in noise.lambda.iter().enumerate() {
        let k = idx + 1;
        let bits: Vec<u8> = (0..m - 1).map(|c| ((k >> c) & 1) as u8).collect();
        let mut zero_k = vec![0u8];
        zero_k.extend(&bits);
        let mut one_kbar = vec![1u8];
        one_kbar.extend(bits.iter().map(|b| 1 - b));
        labels.push((zero_k, false, true, l.clone()));
        labels.push((one_kbar, false, true, l.clone()));
    }
    labels.retain(|l| !l.3.is_zero());
    let count = (labels.len() as u64).checked_pow(n as u32).filter(|&c| c <= 1 << 24);
    let Some(count) = count else {
        return Err(Error::Resource(format!("{}^{n} label assignments is too many to enumerate", labels.len())));
    };
    let half = P::from_ratio(1, 2);
    let mut total = P::zero();
    for code in 0..count {
        let mut rest = code;
        let mut aux = vec![0u64; m - 1];
        let mut weight = P::one();
        let mut parity = false;
        let mut amp = false;
        for _ in 0..n {
            let (bits, flip, is_amp, w) = &labels[(rest % labels.len() as u64) as usize];
            rest /= labels.len() as u64;
            aux = mcx_update(bits, &aux, d)?;
            weight = weight * w.clone();
            parity ^= flip;
            amp |= is_amp;
        }
        if aux.iter().any(|&j| j != 0) {
            continue;
        }
        total = total
            + match rounds {
                GhzRounds::Amplitude => weight,
                GhzRounds::AmplitudeThenPhase if amp => weight * half.clone(),
                GhzRounds::AmplitudeThenPhase if !parity => weight,
                GhzRounds::AmplitudeThenPhase => P::zero(),
            };
    }
    Ok(total)
}

/// Sampled label of one copy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GhzSample {
    Target,
    Phase,
    /// `|0k⟩` (`upper = false`) or `|1k̄⟩` (`upper = true`).
    Amplitude { k: usize, upper: bool },
}

impl GhzSample {
    /// Computational control bits `(i_1, …, i_m)`.
    pub fn control_bits(&self, parties: usize) -> Vec<u8> {
        match *self {
            GhzSample::Target | GhzSample::Phase => vec![0; parties],
            GhzSample::Amplitude { k, upper } => {
                let mut bits = vec![upper as u8];
                bits.extend((0..parties - 1).map(|c| ((k >> c) & 1) as u8 ^ upper as u8));
                bits
            }
        }
    }
}

/// Draws one copy label.
pub fn sample_ghz<R: Rng>(noise: &GHZDiagonalState<f64>, rng: &mut R) -> GhzSample {
    let mut u: f64 = rng.random();
    if u < noise.fidelity {
        return GhzSample::Target;
    }
    u -= noise.fidelity;
    if u < noise.lambda0 {
        return GhzSample::Phase;
    }
    u -= noise.lambda0;
    for (idx, l) in noise.lambda.iter().enumerate() {
        if u < 2.0 * l {
            return GhzSample::Amplitude { k: idx + 1, upper: u >= *l };
        }
        u -= 2.0 * l;
    }
    // rounding remainder: fall back to the last populated class
    match noise.lambda.iter().rposition(|l| *l > 0.0) {
        Some(idx) => GhzSample::Amplitude { k: idx + 1, upper: true },
        None if noise.lambda0 > 0.0 => GhzSample::Phase,
        None => GhzSample::Target,
    }
}

/// One protocol run on a sampled ensemble.
pub fn ghz_verify<R: Rng>(ensemble: &[GhzSample], parties: usize, rounds: GhzRounds, rng: &mut R) -> Result<RunOutcome> {
    check_parties(parties)?;
    let n = ensemble.len() as u64;
    let d = ghz_aux_dim(n);
    let mut aux = vec![0u64; parties - 1];
    for s in ensemble {
        aux = mcx_update(&s.control_bits(parties), &aux, d)?;
    }
    let ebits = (d as f64).log2();
    if aux.iter().any(|&j| j != 0) {
        return Ok(RunOutcome {
            verdict: Verdict::Reject,
            copies_consumed: ceil_log2(d) as u64,
            ebits_consumed: ebits,
            measured_j: None,
            subspaces_measured: 1,
        });
    }
    let mut verdict = Verdict::Accept;
    let mut rounds_done = 1;
    if rounds == GhzRounds::AmplitudeThenPhase {
        rounds_done = 2;
        let mut phase = false;
        for s in ensemble {
            phase ^= match s {
                GhzSample::Target => false,
                GhzSample::Phase => true,
                GhzSample::Amplitude { .. } => rng.random::<bool>(),
            };
        }
        if phase {
            verdict = Verdict::Reject;
        }
    }
    Ok(RunOutcome {
        verdict,
        copies_consumed: ceil_log2(d) as u64 + (rounds_done - 1),
        ebits_consumed: ebits + (rounds_done - 1) as f64,
        measured_j: None,
        subspaces_measured: rounds_done as u32,
    })
}

/// Monte Carlo acceptance estimate (same batching and seeding rules as the
/// bipartite estimator).
pub fn ghz_monte_carlo(
    noise: &GHZDiagonalState<f64>,
    n: u64,
    rounds: GhzRounds,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<MonteCarloEstimate> {
    noise.validate()?;
    if n == 0 {
        return domain("ensemble size must be >= 1");
    }
    let (accepts, copies) = run_batches(trials, seed, workers, |rng, len| {
        let mut accepts = 0;
        let mut copies = 0;
        let mut ensemble = Vec::with_capacity(n as usize);
        for _ in 0..len {
            ensemble.clear();
            ensemble.extend((0..n).map(|_| sample_ghz(noise, rng)));
            let out = ghz_verify(&ensemble, noise.parties, rounds, rng).expect("validated");
            accepts += out.accepted() as u64;
            copies += out.copies_consumed;
        }
        (accepts, copies)
    })?;
    Ok(MonteCarloEstimate::from_counts(trials, accepts, copies))
}

/// `|Ψ_{i,k}⟩` on `m` qubit registers.
pub fn make_ghz(parties: usize, phase_bit: u8, k: usize) -> Result<StateVector> {
    check_parties(parties)?;
    if phase_bit > 1 || k >= 1 << (parties - 1) {
        return domain("invalid GHZ label");
    }
    let layout = Layout::new(vec![2; parties])?;
    let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); layout.size()];
    let mut lower = vec![0usize];
    lower.extend((0..parties - 1).map(|c| (k >> c) & 1));
    let upper: Vec<usize> = lower.iter().map(|b| 1 - b).collect();
    let s = 0.5f64.sqrt();
    amps[layout.index(&lower)] = num_complex::Complex64::new(s, 0.0);
    amps[layout.index(&upper)] = num_complex::Complex64::new(if phase_bit == 1 { -s } else { s }, 0.0);
    StateVector::new(layout, amps)
}

/// GHZ-diagonal coefficients of an `m`-qubit density matrix.
pub fn ghz_depolarize(rho: &DensityMatrix) -> Result<GHZDiagonalState<f64>> {
    let dims = rho.layout().dims();
    if dims.iter().any(|&d| d != 2) {
        return domain("GHZ depolarization acts on qubit registers");
    }
    let m = dims.len();
    check_parties(m)?;
    let fidelity = rho.expectation(&make_ghz(m, 0, 0)?)?;
    let lambda0 = rho.expectation(&make_ghz(m, 1, 0)?)?;
    let mut lambda = Vec::new();
    for k in 1..1usize << (m - 1) {
        let a = rho.expectation(&make_ghz(m, 0, k)?)?;
        let b = rho.expectation(&make_ghz(m, 1, k)?)?;
        lambda.push(0.5 * (a + b));
    }
    GHZDiagonalState::new(m, fidelity, lambda0, lambda)
}

/// Density matrix of a GHZ-diagonal state.
pub fn ghz_density(noise: &GHZDiagonalState<f64>) -> Result<DensityMatrix> {
    noise.validate()?;
    let m = noise.parties;
    let mut terms = vec![(noise.fidelity, make_ghz(m, 0, 0)?), (noise.lambda0, make_ghz(m, 1, 0)?)];
    for (idx, l) in noise.lambda.iter().enumerate() {
        terms.push((*l, make_ghz(m, 0, idx + 1)?));
        terms.push((*l, make_ghz(m, 1, idx + 1)?));
    }
    DensityMatrix::from_mixture(&terms)
}

/// Acceptance probabilities from a dense simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct GhzDenseOutcome {
    pub amplitude: f64,
    pub two_round: f64,
    /// Distribution of the amplitude vector `j_k = x_1 - x_(k+1) (mod d)`
    /// read from the qudit register's Z outcomes `x`.
    pub amplitude_distribution: Vec<f64>,
}

/// Dense simulation of both rounds.
///
/// Registers: `n` copies of `m` qubits, the amplitude-round register (`m`
/// qudits of dimension `d`, prepared in `Σ_k |k…k⟩/√d`) and the phase-round
/// register (`m` qubits in `|Ψ_{0,0}⟩`). The counter gate applies `X_d^{-1}`
/// on party `p` of the qudit register for every copy whose party-`p` qubit is
/// 1; the phase round applies a CNOT from every phase-register qubit onto the
/// same party's qubit of every copy, and reads the phase register in the X
/// basis. Every copy is taken from the eigen-decomposition of `ghz_density`.
pub fn ghz_dense(noise: &GHZDiagonalState<f64>, n: u64) -> Result<GhzDenseOutcome> {
    let m = noise.parties;
    let d = ghz_aux_dim(n) as usize;
    let terms = ghz_density(noise)?.to_mixture(1e-14)?;
    let mut dims = vec![2; m * n as usize];
    dims.extend(std::iter::repeat_n(d, m));
    dims.extend(std::iter::repeat_n(2, m));
    let layout = Layout::new(dims)?;
    let q0 = m * n as usize;
    let p0 = q0 + m;
    // combined basis permutation of both rounds
    let mut digits = vec![0; layout.len()];
    let mut map = Vec::with_capacity(layout.size());
    for i in 0..layout.size() {
        layout.digits(i, &mut digits);
        for c in 0..n as usize {
            for p in 0..m {
                if digits[c * m + p] == 1 {
                    digits[q0 + p] = (digits[q0 + p] + d - 1) % d;
                }
            }
        }
        for c in 0..n as usize {
            for p in 0..m {
                digits[c * m + p] ^= digits[p0 + p];
            }
        }
        map.push(layout.index(&digits));
    }
    let mut qudit_ghz = vec![0.0; d.pow(m as u32)];
    let qudit_layout = Layout::new(vec![d; m])?;
    for k in 0..d {
        qudit_ghz[qudit_layout.index(&vec![k; m])] = 1.0 / (d as f64).sqrt();
    }
    let phase_ghz = make_ghz(m, 0, 0)?;
    let mut amplitude = 0.0;
    let mut two_round = 0.0;
    let mut amplitude_distribution = vec![0.0; d.pow(m as u32 - 1)];
    let mut product = vec![(1.0, vec![num_complex::Complex64::new(1.0, 0.0)])];
    for _ in 0..n {
        let mut next = Vec::new();
        for (w, amps) in &product {
            for (v, t) in &terms {
                let mut out = Vec::with_capacity(amps.len() * t.amplitudes().len());
                for a in amps {
                    for b in t.amplitudes() {
                        out.push(a * b);
                    }
                }
                next.push((w * v, out));
            }
        }
        product = next;
    }
    let aux: Vec<num_complex::Complex64> = qudit_ghz
        .iter()
        .flat_map(|q| phase_ghz.amplitudes().iter().map(move |p| p * q))
        .collect();
    for (w, ens) in &product {
        let mut state = vec![num_complex::Complex64::new(0.0, 0.0); layout.size()];
        for (ei, e) in ens.iter().enumerate() {
            if e.norm_sqr() == 0.0 {
                continue;
            }
            for (ai, a) in aux.iter().enumerate() {
                state[map[ei * aux.len() + ai]] = e * a;
            }
        }
        // amplitude round accepts iff all qudit digits agree
        let mut acc_amp = 0.0;
        let mut acc_even = num_complex::Complex64::new(0.0, 0.0);
        let flip_all = (1usize << m) - 1;
        for (i, amp) in state.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            layout.digits(i, &mut digits);
            let code: usize = (1..m).rev().fold(0, |acc, p| acc * d + (digits[q0] + d - digits[q0 + p]) % d);
            amplitude_distribution[code] += w * amp.norm_sqr();
            if code != 0 {
                continue;
            }
            acc_amp += amp.norm_sqr();
            // ⟨ψ| X^{⊗m} |ψ⟩ on the phase register, restricted to accepted digits
            let phase_code: usize = (0..m).map(|p| digits[p0 + p] << (m - 1 - p)).sum();
            let partner = i - phase_code + (phase_code ^ flip_all);
            acc_even += amp.conj() * state[partner];
        }
        amplitude += w * acc_amp;
        two_round += w * 0.5 * (acc_amp + acc_even.re);
    }
    Ok(GhzDenseOutcome { amplitude, two_round, amplitude_distribution })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Exact;

    fn q(a: i64, b: i64) -> Exact {
        <Exact as Prob>::from_ratio(a, b)
    }

    fn oracle_noise() -> GHZDiagonalState<Exact> {
        GHZDiagonalState::new(3, q(8, 10), q(2, 100), vec![q(8, 100), q(1, 100), q(0, 1)]).unwrap()
    }

    #[test]
    fn mcx_examples() {
        assert_eq!(mcx_update(&[0, 1, 1], &[0, 0], 4).unwrap(), vec![1, 1]);
        assert_eq!(mcx_update(&[1, 0, 0], &[0, 0], 4).unwrap(), vec![3, 3]);
        assert_eq!(mcx_update(&[1, 1, 1], &[2, 3], 4).unwrap(), vec![2, 3]);
        assert_eq!(mcx_update(&[0, 0, 0], &[2, 3], 4).unwrap(), vec![2, 3]);
    }

    #[test]
    fn mcx_invariance_exhaustive() {
        for m in 2..=5usize {
            for d in 2..=4u64 {
                for code in 0..1usize << m {
                    let bits: Vec<u8> = (0..m).map(|p| ((code >> p) & 1) as u8).collect();
                    let out = mcx_update(&bits, &vec![0; m - 1], d).unwrap();
                    let uniform = bits.iter().all(|&b| b == bits[0]);
                    assert_eq!(out.iter().all(|&j| j == 0), uniform, "{bits:?} d={d}");
                }
            }
        }
    }

    #[test]
    fn frozen_oracle_values() {
        let amp = [q(41, 50), q(3427, 5000), q(145_837, 250_000), q(25_241_507, 50_000_000)];
        let two = [q(4, 5), q(6469, 10_000), q(10_579, 20_000), q(8_749_807, 20_000_000)];
        let noise = oracle_noise();
        for n in 1..=4u64 {
            let i = n as usize - 1;
            assert_eq!(ghz_failure_probability(&noise, n, GhzRounds::Amplitude).unwrap(), amp[i]);
            assert_eq!(ghz_failure_probability(&noise, n, GhzRounds::AmplitudeThenPhase).unwrap(), two[i]);
        }
    }

    #[test]
    fn dp_matches_enumeration() {
        let noise = oracle_noise();
        for n in 1..=5u64 {
            for rounds in [GhzRounds::Amplitude, GhzRounds::AmplitudeThenPhase] {
                assert_eq!(
                    ghz_failure_probability(&noise, n, rounds).unwrap(),
                    ghz_enumerate(&noise, n, rounds).unwrap()
                );
            }
        }
    }

    #[test]
    fn degenerate_cases() {
        let pure = GHZDiagonalState::<Exact>::pure(4).unwrap();
        assert_eq!(ghz_failure_probability(&pure, 3, GhzRounds::AmplitudeThenPhase).unwrap(), q(1, 1));
        let phase_only = GHZDiagonalState::new(3, q(0, 1), q(1, 1), vec![q(0, 1); 3]).unwrap();
        assert_eq!(ghz_failure_probability(&phase_only, 3, GhzRounds::Amplitude).unwrap(), q(1, 1));
        assert_eq!(ghz_failure_probability(&phase_only, 3, GhzRounds::AmplitudeThenPhase).unwrap(), q(0, 1));
        assert!(GHZDiagonalState::new(3, 0.5, 0.1, vec![0.1, 0.1, 0.1]).is_err());
    }

    #[test]
    fn phase_error_detection() {
        let mut rng = crate::protocol::montecarlo::batch_rng(0, 0);
        let ens = [GhzSample::Phase, GhzSample::Target];
        let out = ghz_verify(&ens, 3, GhzRounds::Amplitude, &mut rng).unwrap();
        assert_eq!(out.verdict, Verdict::Accept);
        let out = ghz_verify(&ens, 3, GhzRounds::AmplitudeThenPhase, &mut rng).unwrap();
        assert_eq!(out.verdict, Verdict::Reject);
    }

    #[test]
    fn depolarize_examples() {
        let pure = make_ghz(3, 0, 0).unwrap().to_density().unwrap();
        let g = ghz_depolarize(&pure).unwrap();
        assert!((g.fidelity - 1.0).abs() < 1e-12);
        let flipped = make_ghz(3, 1, 0).unwrap().to_density().unwrap();
        assert!((ghz_depolarize(&flipped).unwrap().lambda0 - 1.0).abs() < 1e-12);
        let mix = DensityMatrix::from_mixture(&[
            (0.8, make_ghz(3, 0, 0).unwrap()),
            (0.2, make_ghz(3, 0, 2).unwrap()),
        ])
        .unwrap();
        let g = ghz_depolarize(&mix).unwrap();
        assert!((g.fidelity - 0.8).abs() < 1e-12 && (g.lambda[1] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn dense_single_copy() {
        let noise = oracle_noise().to_f64();
        let out = ghz_dense(&noise, 1).unwrap();
        assert!((out.amplitude - 0.82).abs() < 1e-10, "{out:?}");
        assert!((out.two_round - 0.8).abs() < 1e-10, "{out:?}");
    }

    #[test]
    fn dense_distribution_matches_dp() {
        let noise = oracle_noise().to_f64();
        let out = ghz_dense(&noise, 2).unwrap();
        let dp = ghz_amplitude_distribution(&noise, 2).unwrap();
        assert_eq!(out.amplitude_distribution.len(), dp.len());
        for (a, b) in out.amplitude_distribution.iter().zip(&dp) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}
