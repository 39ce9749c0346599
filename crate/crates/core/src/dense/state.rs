//! Dense pure and mixed states over a register layout.
//!
//! Basis indices are row-major in the register order: register 0 is the most
//! significant digit.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Largest number of stored complex entries (vector amplitudes or matrix
/// elements).
pub const MAX_ENTRIES: usize = 1 << 20;

/// Largest matrix dimension for which trace distances are computed exactly.
pub const EXACT_TRACE_DISTANCE_MAX_DIM: usize = 1024;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Ordered local dimensions of the registers of a state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    dims: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl Layout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.iter().any(|&d| d < 1) {
            return domain("register dimensions must be >= 1");
        }
        let mut size: usize = 1;
        for &d in &dims {
            size = size
                .checked_mul(d)
                .filter(|&s| s <= MAX_ENTRIES)
                .ok_or_else(|| Error::Resource(format!("joint dimension of {dims:?} exceeds {MAX_ENTRIES}")))?;
        }
        let mut strides = vec![1; dims.len()];
        for r in (0..dims.len().saturating_sub(1)).rev() {
            strides[r] = strides[r + 1] * dims[r + 1];
        }
        Ok(Self { dims, strides, size })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn digits(&self, mut index: usize, out: &mut [usize]) {
        for r in 0..self.dims.len() {
            out[r] = index / self.strides[r];
            index %= self.strides[r];
        }
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    pub fn concat(&self, other: &Layout) -> Result<Layout> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Layout::new(dims)
    }

    fn check_reg(&self, reg: usize) -> Result<()> {
        if reg >= self.dims.len() {
            return domain(format!("register {reg} out of range for layout {:?}", self.dims));
        }
        Ok(())
    }

    /// Index map of a basis permutation given as an in-place digit update.
    fn permutation(&self, f: &impl Fn(&mut [usize])) -> Vec<usize> {
        let mut digits = vec![0; self.dims.len()];
        let mut out = Vec::with_capacity(self.size);
        for i in 0..self.size {
            self.digits(i, &mut digits);
            f(&mut digits);
            debug_assert!(digits.iter().zip(&self.dims).all(|(x, d)| x < d));
            out.push(self.index(&digits));
        }
        debug_assert!({
            let mut seen = vec![false; self.size];
            out.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
        });
        out
    }

    /// Layout with registers listed in `perm` order, plus the old→new index map.
    fn reordered(&self, perm: &[usize]) -> Result<(Layout, Vec<usize>)> {
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..self.dims.len()).collect::<Vec<_>>() {
            return domain(format!("{perm:?} is not a permutation of the registers"));
        }
        let layout = Layout::new(perm.iter().map(|&r| self.dims[r]).collect())?;
        let mut digits = vec![0; self.dims.len()];
        let mut new_digits = vec![0; self.dims.len()];
        let map = (0..self.size)
            .map(|i| {
                self.digits(i, &mut digits);
                for (t, &r) in perm.iter().enumerate() {
                    new_digits[t] = digits[r];
                }
                layout.index(&new_digits)
            })
            .collect();
        Ok((layout, map))
    }

    /// Merges registers `start..start+count` into one register (the first
    /// is the most significant digit).
    fn merged(&self, start: usize, count: usize) -> Result<Layout> {
        if count == 0 || start + count > self.dims.len() {
            return domain("merge range out of bounds");
        }
        let mut dims = self.dims[..start].to_vec();
        dims.push(self.dims[start..start + count].iter().product());
        dims.extend_from_slice(&self.dims[start + count..]);
        Layout::new(dims)
    }

    /// Splits register `reg` into registers of the given dimensions.
    fn split(&self, reg: usize, parts: &[usize]) -> Result<Layout> {
        self.check_reg(reg)?;
        if parts.iter().product::<usize>() != self.dims[reg] {
            return domain(format!("cannot split a dimension-{} register into {parts:?}", self.dims[reg]));
        }
        let mut dims = self.dims[..reg].to_vec();
        dims.extend_from_slice(parts);
        dims.extend_from_slice(&self.dims[reg + 1..]);
        Layout::new(dims)
    }
}

/// Pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    layout: Layout,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(layout: Layout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.size() {
            return domain(format!("{} amplitudes for a layout of size {}", amps.len(), layout.size()));
        }
        let state = Self { layout, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return domain(format!("state is not normalized (norm² = {norm})"));
        }
        Ok(state)
    }

    /// Unnormalized state; callers are responsible for normalization.
    pub(crate) fn from_raw(layout: Layout, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), layout.size());
        Self { layout, amps }
    }

    pub fn basis(dims: Vec<usize>, digits: &[usize]) -> Result<Self> {
        let layout = Layout::new(dims)?;
        if digits.len() != layout.len() || digits.iter().zip(layout.dims()).any(|(x, d)| x >= d) {
            return domain(format!("basis digits {digits:?} invalid for {:?}", layout.dims()));
        }
        let mut amps = vec![C0; layout.size()];
        amps[layout.index(digits)] = Complex64::new(1.0, 0.0);
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n < 1e-300 {
            return domain("cannot normalize the zero vector");
        }
        for a in &mut self.amps {
            *a /= n;
        }
        Ok(self)
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        for a in &mut self.amps {
            *a *= c;
        }
        self
    }

    /// `self + other` (same layout).
    pub fn plus(&self, other: &StateVector) -> Result<StateVector> {
        if self.layout != other.layout {
            return domain("layout mismatch");
        }
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect();
        Ok(Self::from_raw(self.layout.clone(), amps))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.layout.dims() != other.layout.dims() {
            return domain("layout mismatch");
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let layout = self.layout.concat(&other.layout)?;
        let mut amps = Vec::with_capacity(layout.size());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self::from_raw(layout, amps))
    }

    /// Applies the basis permutation `|digits⟩ → |f(digits)⟩`.
    pub fn permute_basis(&mut self, f: impl Fn(&mut [usize])) {
        let map = self.layout.permutation(&f);
        let mut out = vec![C0; self.amps.len()];
        for (i, &j) in map.iter().enumerate() {
            out[j] = self.amps[i];
        }
        self.amps = out;
    }

    /// Applies a unitary `u` to register `reg`.
    pub fn apply_local(&mut self, reg: usize, u: &DMatrix<Complex64>) -> Result<()> {
        self.layout.check_reg(reg)?;
        let d = self.layout.dims()[reg];
        if u.nrows() != d || u.ncols() != d {
            return domain(format!("operator is {}x{}, register has dimension {d}", u.nrows(), u.ncols()));
        }
        let stride = self.layout.strides[reg];
        let block = stride * d;
        let mut buf = vec![C0; d];
        for base in (0..self.amps.len()).step_by(block) {
            for off in 0..stride {
                for (k, slot) in buf.iter_mut().enumerate() {
                    *slot = self.amps[base + off + k * stride];
                }
                for r in 0..d {
                    let mut acc = C0;
                    for (c, v) in buf.iter().enumerate() {
                        acc += u[(r, c)] * v;
                    }
                    self.amps[base + off + r * stride] = acc;
                }
            }
        }
        Ok(())
    }

    /// Same state with registers listed in `perm` order.
    pub fn reorder(&self, perm: &[usize]) -> Result<StateVector> {
        let (layout, map) = self.layout.reordered(perm)?;
        let mut amps = vec![C0; self.amps.len()];
        for (i, &j) in map.iter().enumerate() {
            amps[j] = self.amps[i];
        }
        Ok(Self::from_raw(layout, amps))
    }

    /// Same amplitudes with registers `start..start+count` viewed as one.
    pub fn merge(&self, start: usize, count: usize) -> Result<StateVector> {
        Ok(Self::from_raw(self.layout.merged(start, count)?, self.amps.clone()))
    }

    /// Same amplitudes with register `reg` viewed as several.
    pub fn split(&self, reg: usize, parts: &[usize]) -> Result<StateVector> {
        Ok(Self::from_raw(self.layout.split(reg, parts)?, self.amps.clone()))
    }

    /// Probability of each basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Reduced density matrix of the registers in `keep` (in that order).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut perm = keep.to_vec();
        perm.extend((0..self.layout.len()).filter(|r| !keep.contains(r)));
        let moved = self.reorder(&perm)?;
        let keep_dims: Vec<usize> = keep.iter().map(|&r| self.layout.dims()[r]).collect();
        let dk: usize = keep_dims.iter().product();
        check_matrix_dim(dk)?;
        let dr = self.amps.len() / dk;
        let psi = DMatrix::from_row_slice(dk, dr, &moved.amps);
        let rho = &psi * psi.adjoint();
        DensityMatrix::new(Layout::new(keep_dims)?, rho)
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_pure(self)
    }
}

fn check_matrix_dim(d: usize) -> Result<()> {
    if d.checked_mul(d).is_none_or(|e| e > MAX_ENTRIES) {
        return Err(Error::Resource(format!("a {d}x{d} density matrix exceeds {MAX_ENTRIES} entries")));
    }
    Ok(())
}

/// Mixed state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    layout: Layout,
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(layout: Layout, mat: DMatrix<Complex64>) -> Result<Self> {
        check_matrix_dim(layout.size())?;
        if mat.nrows() != layout.size() || mat.ncols() != layout.size() {
            return domain("matrix shape does not match layout");
        }
        Ok(Self { layout, mat })
    }

    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let d = psi.layout.size();
        check_matrix_dim(d)?;
        let v = DMatrix::from_column_slice(d, 1, &psi.amps);
        Ok(Self { layout: psi.layout.clone(), mat: &v * v.adjoint() })
    }

    /// `Σ w_k |ψ_k⟩⟨ψ_k|`.
    pub fn from_mixture(terms: &[(f64, StateVector)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return domain("empty mixture");
        };
        let layout = first.layout.clone();
        let d = layout.size();
        check_matrix_dim(d)?;
        let mut mat = DMatrix::from_element(d, d, C0);
        for (w, psi) in terms {
            if psi.layout != layout {
                return domain("mixture terms have different layouts");
            }
            let v = DMatrix::from_column_slice(d, 1, &psi.amps);
            mat += (&v * v.adjoint()) * Complex64::new(*w, 0.0);
        }
        Ok(Self { layout, mat })
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let layout = Layout::new(dims)?;
        let d = layout.size();
        check_matrix_dim(d)?;
        Ok(Self { layout, mat: DMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0) })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// `a ρ + b σ` (same layout).
    pub fn combine(&self, a: f64, other: &DensityMatrix, b: f64) -> Result<DensityMatrix> {
        if self.layout != other.layout {
            return domain("layout mismatch");
        }
        Ok(Self {
            layout: self.layout.clone(),
            mat: &self.mat * Complex64::new(a, 0.0) + &other.mat * Complex64::new(b, 0.0),
        })
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let layout = self.layout.concat(&other.layout)?;
        check_matrix_dim(layout.size())?;
        Ok(Self { layout, mat: self.mat.kronecker(&other.mat) })
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if psi.layout.dims() != self.layout.dims() {
            return domain("layout mismatch");
        }
        let v = DMatrix::from_column_slice(psi.amps.len(), 1, &psi.amps);
        Ok((v.adjoint() * &self.mat * &v)[(0, 0)].re)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.mat.nrows()).map(|i| self.mat[(i, i)].re).collect()
    }

    /// `P ρ P†` for the basis permutation `|digits⟩ → |f(digits)⟩`.
    pub fn permute_basis(&mut self, f: impl Fn(&mut [usize])) {
        let map = self.layout.permutation(&f);
        let d = map.len();
        let mut out = DMatrix::from_element(d, d, C0);
        for c in 0..d {
            for r in 0..d {
                out[(map[r], map[c])] = self.mat[(r, c)];
            }
        }
        self.mat = out;
    }

    pub fn reorder(&self, perm: &[usize]) -> Result<DensityMatrix> {
        let (layout, map) = self.layout.reordered(perm)?;
        let d = map.len();
        let mut mat = DMatrix::from_element(d, d, C0);
        for c in 0..d {
            for r in 0..d {
                mat[(map[r], map[c])] = self.mat[(r, c)];
            }
        }
        Ok(Self { layout, mat })
    }

    pub fn merge(&self, start: usize, count: usize) -> Result<DensityMatrix> {
        Ok(Self { layout: self.layout.merged(start, count)?, mat: self.mat.clone() })
    }

    pub fn split(&self, reg: usize, parts: &[usize]) -> Result<DensityMatrix> {
        Ok(Self { layout: self.layout.split(reg, parts)?, mat: self.mat.clone() })
    }

    /// Partial trace keeping the registers in `keep` (in that order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut perm = keep.to_vec();
        perm.extend((0..self.layout.len()).filter(|r| !keep.contains(r)));
        let moved = self.reorder(&perm)?;
        let keep_dims: Vec<usize> = keep.iter().map(|&r| self.layout.dims()[r]).collect();
        let dk: usize = keep_dims.iter().product();
        let dr = self.layout.size() / dk;
        let mut mat = DMatrix::from_element(dk, dk, C0);
        for a in 0..dk {
            for b in 0..dk {
                let mut acc = C0;
                for r in 0..dr {
                    acc += moved.mat[(a * dr + r, b * dr + r)];
                }
                mat[(a, b)] = acc;
            }
        }
        Self::new(Layout::new(keep_dims)?, mat)
    }

    /// Eigen-decomposition into a mixture of pure states; eigenvalues below
    /// `cutoff` are dropped.
    pub fn to_mixture(&self, cutoff: f64) -> Result<Vec<(f64, StateVector)>> {
        let eig = hermitian_eigen(self.mat.clone())?;
        let mut out = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > cutoff {
                let amps = eig.eigenvectors.column(k).iter().copied().collect();
                out.push((lambda, StateVector::from_raw(self.layout.clone(), amps).normalized()?));
            }
        }
        Ok(out)
    }

    /// Purification `Σ √λ_k |ψ_k⟩|k⟩` with a trailing reference register.
    pub fn purify(&self, cutoff: f64) -> Result<StateVector> {
        let terms = self.to_mixture(cutoff)?;
        let rank = terms.len();
        let mut dims = self.layout.dims().to_vec();
        dims.push(rank);
        let layout = Layout::new(dims)?;
        let mut amps = vec![C0; layout.size()];
        for (k, (lambda, psi)) in terms.iter().enumerate() {
            let s = lambda.sqrt();
            for (i, a) in psi.amps.iter().enumerate() {
                amps[i * rank + k] = a * s;
            }
        }
        StateVector::from_raw(layout, amps).normalized()
    }

    /// Smallest eigenvalue (for positivity checks).
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(self.mat.clone())
            .map_or(f64::NAN, |eig| eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
    }
}

// The default machine-epsilon stopping rule can fail on highly degenerate
// density matrices and return NaN.
const EIGEN_EPS: f64 = 1e-14;
const EIGEN_MAX_ITER: usize = 1_000_000;

fn hermitian_eigen(m: DMatrix<Complex64>) -> Result<SymmetricEigen<Complex64, nalgebra::Dyn>> {
    SymmetricEigen::try_new(m, EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Resource("eigensolver did not converge".into()))
}

fn real_eigenvalues(m: DMatrix<f64>) -> Result<Vec<f64>> {
    SymmetricEigen::try_new(m, EIGEN_EPS, EIGEN_MAX_ITER)
        .map(|eig| eig.eigenvalues.iter().copied().collect())
        .ok_or_else(|| Error::Resource("eigensolver did not converge".into()))
}

/// Trace distance, exact or a rigorous upper bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceDistance {
    pub value: f64,
    /// False when `value` is the bound `½ √D ‖ρ - σ‖_F`.
    pub exact: bool,
}

/// `½ ‖ρ - σ‖_1`, exact up to [`EXACT_TRACE_DISTANCE_MAX_DIM`].
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<TraceDistance> {
    if a.layout.dims() != b.layout.dims() {
        return domain("layout mismatch");
    }
    let diff = &a.mat - &b.mat;
    let d = diff.nrows();
    if d > EXACT_TRACE_DISTANCE_MAX_DIM {
        let frob = diff.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        return Ok(TraceDistance { value: 0.5 * (d as f64).sqrt() * frob, exact: false });
    }
    // zero rows of a Hermitian matrix contribute zero eigenvalues
    let live: Vec<usize> = (0..d).filter(|&i| diff.row(i).iter().any(|z| *z != C0)).collect();
    if live.is_empty() {
        return Ok(TraceDistance { value: 0.0, exact: true });
    }
    let diff = DMatrix::from_fn(live.len(), live.len(), |i, j| diff[(live[i], live[j])]);
    let eigenvalues: Vec<f64> = if diff.iter().all(|z| z.im == 0.0) {
        real_eigenvalues(diff.map(|z| z.re))?
    } else {
        hermitian_eigen(diff)?.eigenvalues.iter().copied().collect()
    };
    let value = 0.5 * eigenvalues.iter().map(|l| l.abs()).sum::<f64>();
    Ok(TraceDistance { value, exact: true })
}

/// Trace distance between two pure states, `√(1 - |⟨ψ|φ⟩|²)`, evaluated as
/// the norm of the component of `φ` orthogonal to `ψ` to keep full precision
/// for nearly equal states.
pub fn pure_trace_distance(a: &StateVector, b: &StateVector) -> Result<f64> {
    let na = a.norm_sqr().sqrt();
    let nb = b.norm_sqr().sqrt();
    let c = a.inner(b)? / (na * na);
    let perp: f64 = a.amps.iter().zip(&b.amps).map(|(x, y)| (y - c * x).norm_sqr()).sum();
    Ok(perp.sqrt() / nb)
}

/// Total variation distance between two probability vectors.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    0.5 * (0..n)
        .map(|i| (p.get(i).copied().unwrap_or(0.0) - q.get(i).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn layout_digits_round_trip() {
        let l = Layout::new(vec![2, 3, 4]).unwrap();
        let mut d = [0; 3];
        for i in 0..l.size() {
            l.digits(i, &mut d);
            assert_eq!(l.index(&d), i);
        }
        l.digits(23, &mut d);
        assert_eq!(d, [1, 2, 3]);
        assert!(matches!(Layout::new(vec![1 << 11, 1 << 10]), Err(Error::Resource(_))));
    }

    #[test]
    fn reorder_and_reduce() {
        let a = StateVector::basis(vec![2], &[1]).unwrap();
        let b = StateVector::basis(vec![3], &[2]).unwrap();
        let ab = a.tensor(&b).unwrap();
        let ba = ab.reorder(&[1, 0]).unwrap();
        assert_eq!(ba, b.tensor(&a).unwrap());
        let rho = ab.reduced(&[1]).unwrap();
        assert!((rho.expectation(&b).unwrap() - 1.0).abs() < 1e-15);
        let rho_full = ab.to_density().unwrap();
        let pt = rho_full.partial_trace(&[1]).unwrap();
        assert!(trace_distance(&pt, &rho).unwrap().value < 1e-14);
    }

    #[test]
    fn local_unitary_hadamard() {
        let h = DMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(1.0), c(-1.0)]) * c(0.5f64.sqrt());
        let mut s = StateVector::basis(vec![2, 2], &[0, 0]).unwrap();
        s.apply_local(1, &h).unwrap();
        assert!((s.amplitudes()[1].re - 0.5f64.sqrt()).abs() < 1e-15);
        s.apply_local(1, &h).unwrap();
        assert!((s.amplitudes()[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn purification_reproduces_state() {
        let a = StateVector::basis(vec![2], &[0]).unwrap();
        let b = StateVector::basis(vec![2], &[1]).unwrap();
        let rho = DensityMatrix::from_mixture(&[(0.3, a), (0.7, b)]).unwrap();
        let pure = rho.purify(1e-14).unwrap();
        let back = pure.reduced(&[0]).unwrap();
        assert!(trace_distance(&rho, &back).unwrap().value < 1e-14);
    }

    #[test]
    fn trace_distance_examples() {
        let a = StateVector::basis(vec![2], &[0]).unwrap().to_density().unwrap();
        let b = StateVector::basis(vec![2], &[1]).unwrap().to_density().unwrap();
        assert!((trace_distance(&a, &b).unwrap().value - 1.0).abs() < 1e-14);
        let mixed = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        assert!((trace_distance(&a, &mixed).unwrap().value - 0.5).abs() < 1e-14);
        assert_eq!(total_variation(&[0.5, 0.5], &[1.0]), 0.5);
    }
}
