//! Truncated Fock space F²(C^d): orthonormal monomials e_α = z^α/√α! with |α| ≤ N in
//! graded-lex order, and dense operators on their span.
//!
//! Entries of `weyl_matrix` are exact matrix elements of W_z; products of truncated
//! matrices are not, so all accuracy statements refer to an inner block |α| ≤ N − margin.

pub mod convolution;
pub mod quadrature;
pub mod symbol;
pub mod toeplitz;

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::PhasePoint;

pub use convolution::{
    conv_fun_op, conv_op_op, symplectic_fourier, symplectic_fourier_closed_form, symplectic_fourier_gaussian,
};
pub use quadrature::{GaussFrame, QuadratureSpec};
pub use symbol::{FunctionSymbol, HorizontalProfile, Symbol};
pub use toeplitz::{toeplitz_matrix, toeplitz_matrix_certified};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// |z|² beyond which e^{−|z|²/2} underflows in the coefficient recursion.
pub const OVERFLOW_BUDGET: f64 = 1400.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockTruncation {
    pub d: usize,
    pub n: usize,
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

impl FockTruncation {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("d must be at least 1".into()));
        }
        if d > 2 {
            log::warn!("d = {d} truncations grow quickly; d <= 2 is the supported regime");
        }
        Ok(FockTruncation { d, n })
    }

    /// C(N + d, d).
    pub fn size(&self) -> usize {
        binomial(self.n + self.d, self.d)
    }

    /// Number of indices with |α| ≤ m.
    pub fn size_up_to(&self, m: usize) -> usize {
        binomial(m + self.d, self.d)
    }

    /// Multi-indices by total degree, then lexicographically descending
    /// ((2,0), (1,1), (0,2) for degree 2).
    pub fn indices(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.size());
        for deg in 0..=self.n {
            let mut cur = vec![0; self.d];
            compositions(deg, 0, &mut cur, &mut out);
        }
        out
    }

    pub fn index_map(&self) -> HashMap<Vec<usize>, usize> {
        self.indices().into_iter().enumerate().map(|(i, a)| (a, i)).collect()
    }

    /// Size of the inner block |α| ≤ N − margin.
    pub fn inner_size(&self, margin: usize) -> Result<usize> {
        if margin > self.n {
            return Err(Error::InvalidInput(format!("margin {margin} exceeds cutoff {}", self.n)));
        }
        Ok(self.size_up_to(self.n - margin))
    }

    /// Largest inner cutoff m whose W-image stays below the cutoff for shifts of size |z| ≤ reach:
    /// (√m + reach)² + 4 N^{1/3} ≤ N. Level m of W_z spreads over [(√m − |z|)², (√m + |z|)²]
    /// with an Airy-type edge of width ~N^{1/3}.
    pub fn inner_cutoff_for_reach(&self, reach: f64) -> usize {
        let n = self.n as f64;
        let budget = n - 4.0 * n.cbrt();
        if budget <= 0.0 {
            return 0;
        }
        let r = (budget.sqrt() - reach).max(0.0);
        (r * r).floor() as usize
    }

    /// Margin N − inner_cutoff_for_reach(reach).
    pub fn margin_for_reach(&self, reach: f64) -> usize {
        self.n - self.inner_cutoff_for_reach(reach).min(self.n)
    }
}

fn compositions(rem: usize, pos: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let d = cur.len();
    if pos == d - 1 {
        cur[pos] = rem;
        out.push(cur.clone());
        return;
    }
    for a in (0..=rem).rev() {
        cur[pos] = a;
        compositions(rem - a, pos + 1, cur, out);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    pub trunc: FockTruncation,
    pub mat: CMatrix,
}

impl TruncatedOperator {
    pub fn new(trunc: FockTruncation, mat: CMatrix) -> Result<Self> {
        let s = trunc.size();
        if mat.nrows() != s || mat.ncols() != s {
            return Err(Error::DimensionMismatch { expected: s, found: mat.nrows() });
        }
        Ok(TruncatedOperator { trunc, mat })
    }

    pub fn identity(trunc: FockTruncation) -> Self {
        let s = trunc.size();
        TruncatedOperator { trunc, mat: CMatrix::identity(s, s) }
    }

    pub fn zeros(trunc: FockTruncation) -> Self {
        let s = trunc.size();
        TruncatedOperator { trunc, mat: CMatrix::zeros(s, s) }
    }

    /// u ⊗ v = ⟨·, v⟩ u.
    pub fn rank_one(trunc: FockTruncation, u: &CVector, v: &CVector) -> Self {
        TruncatedOperator { trunc, mat: u * v.adjoint() }
    }

    /// 1 ⊗ 1, the projection onto the constants.
    pub fn vacuum_projection(trunc: FockTruncation) -> Self {
        let mut t = Self::zeros(trunc);
        t.mat[(0, 0)] = C64::new(1.0, 0.0);
        t
    }

    pub fn basis_vector(trunc: FockTruncation, i: usize) -> CVector {
        let mut v = CVector::zeros(trunc.size());
        v[i] = C64::new(1.0, 0.0);
        v
    }

    pub fn size(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(TruncatedOperator { trunc: self.trunc, mat: &self.mat * &other.mat })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(TruncatedOperator { trunc: self.trunc, mat: &self.mat + &other.mat })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(TruncatedOperator { trunc: self.trunc, mat: &self.mat - &other.mat })
    }

    pub fn scale(&self, c: C64) -> Self {
        TruncatedOperator { trunc: self.trunc, mat: &self.mat * c }
    }

    pub fn adjoint(&self) -> Self {
        TruncatedOperator { trunc: self.trunc, mat: self.mat.adjoint() }
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.mat * v
    }

    fn same(&self, other: &Self) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::DimensionMismatch { expected: self.size(), found: other.size() });
        }
        Ok(())
    }

    /// Leading block |α| ≤ N − margin.
    pub fn inner_block(&self, margin: usize) -> Result<CMatrix> {
        let m = self.trunc.inner_size(margin)?;
        Ok(self.mat.view((0, 0), (m, m)).into_owned())
    }

    /// Spectral norm of the inner block.
    pub fn inner_norm(&self, margin: usize) -> Result<f64> {
        Ok(spectral_norm(&self.inner_block(margin)?))
    }

    /// Largest entry modulus of the inner block.
    pub fn inner_max_abs(&self, margin: usize) -> Result<f64> {
        Ok(self.inner_block(margin)?.iter().fold(0.0, |m, v| m.max(v.norm())))
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().fold(0.0, |a, b| a.max(*b))
}

fn coherent_1d(z: C64, n: usize) -> Vec<C64> {
    let mut c = Vec::with_capacity(n + 1);
    let mut v = C64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    c.push(v);
    let zb = z.conj();
    for m in 1..=n {
        v = v * zb / (m as f64).sqrt();
        c.push(v);
    }
    c
}

fn guard(z: &PhasePoint, trunc: &FockTruncation) -> Result<()> {
    if z.d() != trunc.d {
        return Err(Error::DimensionMismatch { expected: trunc.d, found: z.d() });
    }
    let r2 = z.norm_sqr();
    if !r2.is_finite() || r2 > OVERFLOW_BUDGET {
        return Err(Error::OverflowGuard(r2));
    }
    Ok(())
}

/// k_z: coefficients e^{−|z|²/2} z̄^α/√α!.
pub fn coherent_state(z: &PhasePoint, trunc: &FockTruncation) -> Result<CVector> {
    guard(z, trunc)?;
    if z.norm_sqr() > trunc.n as f64 {
        log::debug!("coherent state |z|^2 = {:.2} exceeds cutoff {}; truncated norm is deficient", z.norm_sqr(), trunc.n);
    }
    let d = trunc.d;
    let per: Vec<Vec<C64>> = (0..d).map(|j| coherent_1d(z.component(j), trunc.n)).collect();
    let idx = trunc.indices();
    Ok(CVector::from_iterator(
        idx.len(),
        idx.iter().map(|a| (0..d).map(|j| per[j][a[j]]).product::<C64>()),
    ))
}

/// One-dimensional W_z on levels 0..=n. Column recurrence
/// col₀ = k_z, col_{m+1} = (a† col_m − z col_m)/√(m+1), (a† v)_k = √k v_{k−1};
/// every stored entry is an exact matrix element.
pub fn weyl_matrix_1d(z: C64, n: usize) -> CMatrix {
    let s = n + 1;
    let mut w = CMatrix::zeros(s, s);
    let c0 = coherent_1d(z, n);
    for k in 0..s {
        w[(k, 0)] = c0[k];
    }
    let sq: Vec<f64> = (0..=s).map(|k| (k as f64).sqrt()).collect();
    for m in 0..n {
        for k in 0..s {
            let up = if k == 0 { C64::new(0.0, 0.0) } else { w[(k - 1, m)] * sq[k] };
            w[(k, m + 1)] = (up - z * w[(k, m)]) / sq[m + 1];
        }
    }
    w
}

/// Π_j M_j[α_j, β_j] over the truncation index set.
pub fn tensor_product(factors: &[CMatrix], trunc: &FockTruncation) -> CMatrix {
    let idx = trunc.indices();
    let s = idx.len();
    if trunc.d == 1 {
        return factors[0].view((0, 0), (s, s)).into_owned();
    }
    CMatrix::from_fn(s, s, |r, c| {
        let (a, b) = (&idx[r], &idx[c]);
        let mut v = C64::new(1.0, 0.0);
        for (j, f) in factors.iter().enumerate() {
            v *= f[(a[j], b[j])];
        }
        v
    })
}

/// W_z f(w) = k_z(w) f(w − z), as a matrix over the truncation.
pub fn weyl_matrix(z: &PhasePoint, trunc: &FockTruncation) -> Result<TruncatedOperator> {
    guard(z, trunc)?;
    let factors: Vec<CMatrix> = (0..trunc.d).map(|j| weyl_matrix_1d(z.component(j), trunc.n)).collect();
    Ok(TruncatedOperator { trunc: *trunc, mat: tensor_product(&factors, trunc) })
}

/// U f(z) = f(−z): diag((−1)^{|α|}).
pub fn parity_matrix(trunc: &FockTruncation) -> TruncatedOperator {
    let idx = trunc.indices();
    let s = idx.len();
    let mut m = CMatrix::zeros(s, s);
    for (i, a) in idx.iter().enumerate() {
        let deg: usize = a.iter().sum();
        m[(i, i)] = C64::new(if deg % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    TruncatedOperator { trunc: *trunc, mat: m }
}

/// ⟨A k_z, k_z⟩.
pub fn berezin(a: &TruncatedOperator, z: &PhasePoint) -> Result<C64> {
    let k = coherent_state(z, &a.trunc)?;
    Ok(k.dotc(&(&a.mat * &k)))
}

/// tr(A W_ξ).
pub fn fourier_weyl(a: &TruncatedOperator, xi: &PhasePoint) -> Result<C64> {
    let w = weyl_matrix(xi, &a.trunc)?;
    Ok(trace_of_product(&a.mat, &w.mat))
}

pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let s = a.nrows();
    let mut t = C64::new(0.0, 0.0);
    for i in 0..s {
        for k in 0..s {
            t += a[(i, k)] * b[(k, i)];
        }
    }
    t
}

/// ‖[A, B]‖ on the inner block |α| ≤ N − margin.
pub fn commutator_inner_norm(a: &TruncatedOperator, b: &TruncatedOperator, margin: usize) -> Result<f64> {
    if a.trunc != b.trunc {
        return Err(Error::DimensionMismatch { expected: a.size(), found: b.size() });
    }
    if margin >= a.trunc.n.max(1) && a.trunc.n > 0 {
        return Err(Error::InvalidInput(format!("margin {margin} must be below the cutoff {}", a.trunc.n)));
    }
    let c = TruncatedOperator { trunc: a.trunc, mat: &a.mat * &b.mat - &b.mat * &a.mat };
    c.inner_norm(margin)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityScan {
    pub min_abs: f64,
    pub argmin: PhasePoint,
    pub is_regular_on_grid: bool,
}

/// min over the grid of |F_W(A)(ξ)|.
pub fn regularity_scan(a: &TruncatedOperator, grid: &[PhasePoint], tol: f64) -> Result<RegularityScan> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("regularity scan needs a nonempty grid".into()));
    }
    let mut best = (f64::INFINITY, grid[0].clone());
    for xi in grid {
        let v = fourier_weyl(a, xi)?.norm();
        if v < best.0 {
            best = (v, xi.clone());
        }
    }
    Ok(RegularityScan { min_abs: best.0, argmin: best.1, is_regular_on_grid: best.0 > tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(c: &[f64]) -> PhasePoint {
        PhasePoint::new(c.to_vec()).unwrap()
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// W_{αβ} = e^{−|z|²/2} √(α!β!) Σ_δ (−z)^{β−δ} z̄^{α−δ} / (δ!(β−δ)!(α−δ)!).
    fn weyl_entry_oracle(z: C64, a: usize, b: usize) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for dl in 0..=a.min(b) {
            s += (-z).powu((b - dl) as u32) * z.conj().powu((a - dl) as u32)
                / (factorial(dl) * factorial(b - dl) * factorial(a - dl));
        }
        s * (-0.5 * z.norm_sqr()).exp() * (factorial(a) * factorial(b)).sqrt()
    }

    #[test]
    fn index_set_order() {
        let t = FockTruncation::new(2, 2).unwrap();
        assert_eq!(t.size(), 6);
        assert_eq!(t.indices(), vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(t.inner_size(1).unwrap(), 3);
        assert_eq!(FockTruncation::new(3, 4).unwrap().size(), 35);
    }

    #[test]
    fn coherent_examples() {
        let t = FockTruncation::new(1, 60).unwrap();
        let k0 = coherent_state(&p(&[0.0, 0.0]), &t).unwrap();
        assert_eq!(k0[0], C64::new(1.0, 0.0));
        assert!(k0.iter().skip(1).all(|v| *v == C64::new(0.0, 0.0)));
        let k1 = coherent_state(&p(&[1.0, 0.0]), &t).unwrap();
        assert!((k1.norm() - 1.0).abs() < 1e-10);
        let z = p(&[0.4, -0.3]);
        let w = p(&[-0.2, 0.9]);
        let (zc, wc) = (z.component(0), w.component(0));
        // ⟨k_z, k_w⟩ = Σ k_z,α conj(k_w,α)
        let got = coherent_state(&w, &t).unwrap().dotc(&coherent_state(&z, &t).unwrap());
        let want = (wc * zc.conj() - 0.5 * (z.norm_sqr() + w.norm_sqr())).exp();
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn weyl_entries_match_closed_form() {
        let z = C64::new(0.7, -1.1);
        let w = weyl_matrix_1d(z, 30);
        for a in 0..=30 {
            for b in 0..=30 {
                // the alternating oracle sum loses a few digits at high degree
                let e = (w[(a, b)] - weyl_entry_oracle(z, a, b)).norm();
                assert!(e < 1e-10, "({a},{b}) {e}");
            }
        }
    }

    #[test]
    fn weyl_basics() {
        let t = FockTruncation::new(1, 40).unwrap();
        let id = weyl_matrix(&p(&[0.0, 0.0]), &t).unwrap();
        assert_eq!(id.mat, CMatrix::identity(41, 41));
        let z = p(&[0.6, 0.8]);
        let w = weyl_matrix(&z, &t).unwrap();
        assert!((w.mat[(0, 0)].re - (-0.5f64).exp()).abs() < 1e-15);
        // W_z k_w = e^{−(i/2)σ(z,w)} k_{z+w}
        let v = p(&[-0.3, 0.5]);
        let lhs = w.apply(&coherent_state(&v, &t).unwrap());
        let rhs = coherent_state(&(&z + &v), &t).unwrap() * C64::new(0.0, -0.5 * z.sigma(&v)).exp();
        let inner = t.inner_size(15).unwrap();
        let e = (0..inner).map(|i| (lhs[i] - rhs[i]).norm()).fold(0.0, f64::max);
        assert!(e < 1e-12);
    }

    #[test]
    fn weyl_2d_factorizes() {
        let t = FockTruncation::new(2, 6).unwrap();
        let z = p(&[0.3, -0.2, 0.5, 0.1]);
        let w = weyl_matrix(&z, &t).unwrap();
        let idx = t.indices();
        let w1 = weyl_matrix_1d(z.component(0), 6);
        let w2 = weyl_matrix_1d(z.component(1), 6);
        for (r, a) in idx.iter().enumerate() {
            for (c, b) in idx.iter().enumerate() {
                assert!((w.mat[(r, c)] - w1[(a[0], b[0])] * w2[(a[1], b[1])]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn parity_is_involution() {
        let t = FockTruncation::new(1, 5).unwrap();
        let u = parity_matrix(&t);
        assert_eq!(u.mat[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(u.mat[(1, 1)], C64::new(-1.0, 0.0));
        assert_eq!(u.mul(&u).unwrap().mat, CMatrix::identity(6, 6));
    }

    #[test]
    fn berezin_examples() {
        let t = FockTruncation::new(1, 60).unwrap();
        let z = p(&[0.5, -0.7]);
        assert!((berezin(&TruncatedOperator::identity(t), &z).unwrap() - 1.0).norm() < 1e-12);
        let w = p(&[0.9, 0.2]);
        let b = berezin(&weyl_matrix(&w, &t).unwrap(), &z).unwrap();
        let want = C64::new(-0.5 * w.norm_sqr(), z.sigma(&w)).exp();
        assert!((b - want).norm() < 1e-12);
        let b = berezin(&TruncatedOperator::vacuum_projection(t), &z).unwrap();
        assert!((b.re - (-z.norm_sqr()).exp()).abs() < 1e-15);
    }

    #[test]
    fn fourier_weyl_examples() {
        let t = FockTruncation::new(1, 40).unwrap();
        let a = TruncatedOperator::vacuum_projection(t);
        assert!((fourier_weyl(&a, &p(&[0.0, 0.0])).unwrap() - 1.0).norm() < 1e-15);
        let xi = p(&[0.8, -0.6]);
        assert!((fourier_weyl(&a, &xi).unwrap().re - (-0.5f64).exp()).abs() < 1e-15);
        let far = fourier_weyl(&a, &p(&[4.0, 0.0])).unwrap().norm();
        assert!(far < 1e-3);
    }

    #[test]
    fn commutator_examples() {
        let t = FockTruncation::new(1, 40).unwrap();
        let a = weyl_matrix(&p(&[0.3, 0.1]), &t).unwrap();
        assert_eq!(commutator_inner_norm(&a, &a, 10).unwrap(), 0.0);
        let b = weyl_matrix(&p(&[0.0, 1.0]), &t).unwrap();
        let c = weyl_matrix(&p(&[1.0, 0.0]), &t).unwrap();
        assert!(commutator_inner_norm(&c, &b, 15).unwrap() > 0.5);
    }

    #[test]
    fn regularity_examples() {
        let t = FockTruncation::new(1, 30).unwrap();
        let grid: Vec<PhasePoint> = (0..21).map(|k| p(&[0.1 * k as f64, 0.0])).collect();
        let a = TruncatedOperator::vacuum_projection(t);
        assert!(regularity_scan(&a, &grid, 1e-8).unwrap().is_regular_on_grid);
        // e0⊗e0 + e1⊗e1 has F_W = e^{−r²/2}(2 − r²), zero at r = √2
        let mut b = a.clone();
        b.mat[(1, 1)] = C64::new(1.0, 0.0);
        let grid: Vec<PhasePoint> = (0..=200).map(|k| p(&[2.0 * k as f64 / 200.0 * (2f64).sqrt() / 2.0, 0.0])).collect();
        let scan = regularity_scan(&b, &grid, 1e-8).unwrap();
        assert!(!scan.is_regular_on_grid);
        assert!((scan.argmin.norm() - 2f64.sqrt()).abs() < 1e-12);
        assert!(regularity_scan(&a, &[], 1e-8).is_err());
        let _ = PI;
    }
}
