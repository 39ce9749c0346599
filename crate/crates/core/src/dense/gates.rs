//! Bell states and the counter gates.
//!
//! A bipartite pair is a pair of registers `(a, b)`, one held by each party.
//! `|Φ^d_mn⟩ = Σ_k ω^(km) |k⟩|k ⊖ n⟩ / √d`. The qubit counter gate `bCX`
//! applies `CX^{A_c A_t} ⊗ CX^{B_c B_t}` with `X_d |k⟩ = |k ⊖ 1⟩`, and the
//! qudit counter gate `bGCX` adds the control digit to the target digit on
//! each side.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dense::state::{DensityMatrix, Layout, StateVector};
use crate::error::{domain, Result};

/// Register indices of a bipartite pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pair {
    pub a: usize,
    pub b: usize,
}

impl Pair {
    pub const fn new(a: usize, b: usize) -> Self {
        Self { a, b }
    }
}

/// `|Φ^d_mn⟩` on layout `[d, d]`.
pub fn make_qudit_bell(d: usize, m: usize, n: usize) -> Result<StateVector> {
    if d < 2 || m >= d || n >= d {
        return domain(format!("invalid qudit Bell label (d={d}, m={m}, n={n})"));
    }
    let layout = Layout::new(vec![d, d])?;
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    let norm = 1.0 / (d as f64).sqrt();
    for k in 0..d {
        let phase = 2.0 * PI * ((k * m) % d) as f64 / d as f64;
        amps[k * d + (k + d - n) % d] = Complex64::from_polar(norm, phase);
    }
    StateVector::new(layout, amps)
}

/// `|Ψ_ij⟩ = 1 ⊗ X^j Z^i (|00⟩ + |11⟩)/√2`.
pub fn make_bell(i: usize, j: usize) -> Result<StateVector> {
    if i > 1 || j > 1 {
        return domain(format!("Bell label bits must be 0 or 1, got ({i}, {j})"));
    }
    make_qudit_bell(2, i, j)
}

/// States a counter gate can act on.
pub trait BasisPermutable {
    fn layout_dims(&self) -> &[usize];
    fn permute(&mut self, f: &dyn Fn(&mut [usize]));
}

impl BasisPermutable for StateVector {
    fn layout_dims(&self) -> &[usize] {
        self.layout().dims()
    }
    fn permute(&mut self, f: &dyn Fn(&mut [usize])) {
        self.permute_basis(f)
    }
}

impl BasisPermutable for DensityMatrix {
    fn layout_dims(&self) -> &[usize] {
        self.layout().dims()
    }
    fn permute(&mut self, f: &dyn Fn(&mut [usize])) {
        self.permute_basis(f)
    }
}

fn check_pairs<S: BasisPermutable>(state: &S, control: Pair, target: Pair) -> Result<(usize, usize)> {
    let dims = state.layout_dims();
    let regs = [control.a, control.b, target.a, target.b];
    if regs.iter().any(|&r| r >= dims.len()) {
        return domain("pair register out of range");
    }
    let mut sorted = regs;
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return domain("control and target registers must be distinct");
    }
    if dims[control.a] != dims[control.b] || dims[target.a] != dims[target.b] {
        return domain("both halves of a pair must have the same dimension");
    }
    Ok((dims[control.a], dims[target.a]))
}

/// Qubit-control counter gate: `|Ψ_mn⟩|Φ^d_0j⟩ → |Ψ_mn⟩|Φ^d_{0, j⊖m⊕n}⟩` on
/// computational controls `|m n⟩`.
pub fn apply_bcx<S: BasisPermutable>(state: &mut S, control: Pair, target: Pair) -> Result<()> {
    let (dc, d) = check_pairs(state, control, target)?;
    if dc != 2 {
        return domain(format!("bCX needs a qubit control pair, got dimension {dc}"));
    }
    state.permute(&|x: &mut [usize]| {
        if x[control.a] == 1 {
            x[target.a] = (x[target.a] + d - 1) % d;
        }
        if x[control.b] == 1 {
            x[target.b] = (x[target.b] + d - 1) % d;
        }
    });
    Ok(())
}

/// Inverse of [`apply_bcx`].
pub fn apply_bcx_inverse<S: BasisPermutable>(state: &mut S, control: Pair, target: Pair) -> Result<()> {
    let (dc, d) = check_pairs(state, control, target)?;
    if dc != 2 {
        return domain(format!("bCX needs a qubit control pair, got dimension {dc}"));
    }
    state.permute(&|x: &mut [usize]| {
        if x[control.a] == 1 {
            x[target.a] = (x[target.a] + 1) % d;
        }
        if x[control.b] == 1 {
            x[target.b] = (x[target.b] + 1) % d;
        }
    });
    Ok(())
}

/// Qudit-control counter gate: `|m n⟩|Φ^D_0j⟩ → |m n⟩|Φ^D_{0, j⊖n⊕m}⟩`.
pub fn apply_bgcx<S: BasisPermutable>(state: &mut S, control: Pair, target: Pair) -> Result<()> {
    let (_, d) = check_pairs(state, control, target)?;
    state.permute(&|x: &mut [usize]| {
        x[target.a] = (x[target.a] + x[control.a]) % d;
        x[target.b] = (x[target.b] + x[control.b]) % d;
    });
    Ok(())
}

/// Inverse of [`apply_bgcx`].
pub fn apply_bgcx_inverse<S: BasisPermutable>(state: &mut S, control: Pair, target: Pair) -> Result<()> {
    let (_, d) = check_pairs(state, control, target)?;
    state.permute(&|x: &mut [usize]| {
        x[target.a] = (x[target.a] + d - x[control.a] % d) % d;
        x[target.b] = (x[target.b] + d - x[control.b] % d) % d;
    });
    Ok(())
}

fn pair_dim<S: BasisPermutable>(state: &S, p: Pair) -> usize {
    state.layout_dims()[p.a]
}

/// Error number gate: one counter gate from every ensemble pair into `aux`
/// (`bCX` for qubit pairs, `bGCX` otherwise).
pub fn apply_eng<S: BasisPermutable>(state: &mut S, ensemble: &[Pair], aux: Pair) -> Result<()> {
    for &c in ensemble {
        if pair_dim(state, c) == 2 {
            apply_bcx(state, c, aux)?;
        } else {
            apply_bgcx(state, c, aux)?;
        }
    }
    Ok(())
}

/// Inverse of [`apply_eng`].
pub fn apply_eng_inverse<S: BasisPermutable>(state: &mut S, ensemble: &[Pair], aux: Pair) -> Result<()> {
    for &c in ensemble.iter().rev() {
        if pair_dim(state, c) == 2 {
            apply_bcx_inverse(state, c, aux)?;
        } else {
            apply_bgcx_inverse(state, c, aux)?;
        }
    }
    Ok(())
}

/// `|k⟩|l⟩ → |k⟩|l ⊖ δ⟩` on `aux`, which maps `|Φ_{m,j}⟩` to `|Φ_{m,j⊕δ}⟩`.
pub fn apply_amplitude_shift<S: BasisPermutable>(state: &mut S, aux: Pair, delta: i64) -> Result<()> {
    let dims = state.layout_dims();
    if aux.a >= dims.len() || aux.b >= dims.len() {
        return domain("pair register out of range");
    }
    let d = dims[aux.b] as i64;
    let step = delta.rem_euclid(d) as usize;
    let d = d as usize;
    state.permute(&|x: &mut [usize]| x[aux.b] = (x[aux.b] + d - step) % d);
    Ok(())
}
