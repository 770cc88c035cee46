//! Lagrangian normal form: a symplectic S with S·G = (R ⊕ {0})^k ⊕ (√(πt) Z ⊕ √(πt) Z)^{d−k}.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;
use crate::subgroup::{classify, ClosedSubgroup};
use crate::symplectic::{omega, symplectic_defect, PhasePoint, SymplecticMap, Tolerances};

#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormResult<T: Real> {
    pub s: SymplecticMap<T>,
    pub k: usize,
    pub residual: T,
    /// Integer matrix U with S·lattice_gens = model_gens·U, det U = ±1.
    pub change_of_basis: Vec<Vec<i64>>,
}

/// M_ij = round(σ(g_i, g_j) / 2π).
pub fn integer_skew_gram<T: Real>(l: &[PhasePoint<T>]) -> Result<Vec<Vec<i64>>> {
    integer_skew_gram_scaled(l, T::one(), Tolerances::default().tol_int)
}

/// M_ij = round(σ(g_i, g_j) / 2πt); errors unless every pairing is integral within `tol`.
pub fn integer_skew_gram_scaled<T: Real>(l: &[PhasePoint<T>], t: T, tol: T) -> Result<Vec<Vec<i64>>> {
    let n = l.len();
    let mut m = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if l[i].d() != l[j].d() {
                return Err(Error::DimensionMismatch { expected: l[i].d(), found: l[j].d() });
            }
            let v = l[i].sigma(&l[j]) / (T::two_pi() * t);
            let r = v.round();
            if (v - r).abs() > tol * (T::one() + v.abs()) {
                return Err(Error::NotIsotropic(v.as_f64()));
            }
            m[i][j] = r.as_f64() as i64;
        }
    }
    Ok(m)
}

struct Congruence {
    m: Vec<Vec<i64>>,
    p: Vec<Vec<i64>>,
}

impl Congruence {
    fn new(m: Vec<Vec<i64>>) -> Self {
        let n = m.len();
        let p = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        Congruence { m, p }
    }

    fn swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.m.swap(a, b);
        for row in self.m.iter_mut() {
            row.swap(a, b);
        }
        for row in self.p.iter_mut() {
            row.swap(a, b);
        }
    }

    /// basis vector k ← k + c·l
    fn add(&mut self, k: usize, l: usize, c: i64) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        let n = self.m.len();
        let ck = |x: i64, y: i64| -> Result<i64> { x.checked_add(c.checked_mul(y).ok_or(Error::Overflow)?).ok_or(Error::Overflow) };
        for j in 0..n {
            self.m[k][j] = ck(self.m[k][j], self.m[l][j])?;
        }
        for i in 0..n {
            self.m[i][k] = ck(self.m[i][k], self.m[i][l])?;
        }
        for i in 0..n {
            self.p[i][k] = ck(self.p[i][k], self.p[i][l])?;
        }
        Ok(())
    }
}

/// Reduces an alternating integer matrix by unimodular congruence to
/// blocks [[0, d_j], [−d_j, 0]] with d_j > 0; returns (Pᵀ M P, P, divisors).
pub fn skew_normal_form(m: &[Vec<i64>]) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<i64>)> {
    let n = m.len();
    for i in 0..n {
        if m[i].len() != n || m[i][i] != 0 || (0..n).any(|j| m[i][j] != -m[j][i]) {
            return Err(Error::InvalidInput("not an alternating integer matrix".into()));
        }
    }
    let mut c = Congruence::new(m.to_vec());
    let mut divisors = Vec::new();
    let mut b = 0;
    while b + 1 < n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in b..n {
                for j in b..n {
                    let v = c.m[i][j];
                    if v != 0 && best.map_or(true, |(bi, bj)| v.abs() < c.m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((i, j)) = best else {
                return Ok((c.m, c.p, divisors));
            };
            c.swap(b, i);
            let j = if j == b { i } else { j };
            c.swap(b + 1, j);
            if c.m[b][b + 1] < 0 {
                c.swap(b, b + 1);
            }
            let piv = c.m[b][b + 1];
            let mut clean = true;
            for k in b + 2..n {
                // clear pairing of e_b with e_k using e_{b+1}
                let q = c.m[b][k].div_euclid(piv);
                c.add(k, b + 1, -q)?;
                // clear pairing of e_{b+1} with e_k using e_b (σ(e_{b+1}, e_b) = −piv)
                let q2 = c.m[b + 1][k].div_euclid(piv);
                c.add(k, b, q2)?;
                if c.m[b][k] != 0 || c.m[b + 1][k] != 0 {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        divisors.push(c.m[b][b + 1]);
        b += 2;
    }
    Ok((c.m, c.p, divisors))
}

fn det_i64(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    // Bareiss fraction-free elimination
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Complex Gram–Schmidt of the standard basis against the complex span of `u`.
fn complex_complement<T: Real>(u: &[Vec<Complex<T>>], d: usize) -> Vec<Vec<Complex<T>>> {
    let mut basis: Vec<Vec<Complex<T>>> = u.to_vec();
    let mut out = Vec::new();
    let dot = |a: &[Complex<T>], b: &[Complex<T>]| -> Complex<T> {
        a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |s, (x, y)| s + *x * y.conj())
    };
    for e in 0..d {
        let mut v: Vec<Complex<T>> = (0..d)
            .map(|j| if j == e { Complex::new(T::one(), T::zero()) } else { Complex::new(T::zero(), T::zero()) })
            .collect();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                for j in 0..d {
                    v[j] -= c * b[j];
                }
            }
        }
        let nrm = dot(&v, &v).re.sqrt();
        if nrm > T::lit(1e-6) {
            for x in v.iter_mut() {
                *x /= Complex::new(nrm, T::zero());
            }
            basis.push(v.clone());
            out.push(v);
        }
    }
    out
}

fn to_complex<T: Real>(v: &DVector<T>, d: usize) -> Vec<Complex<T>> {
    (0..d).map(|j| Complex::new(v[j], v[d + j])).collect()
}

fn from_complex<T: Real>(c: &[Complex<T>]) -> DVector<T> {
    let d = c.len();
    let mut v = DVector::zeros(2 * d);
    for j in 0..d {
        v[j] = c[j].re;
        v[d + j] = c[j].im;
    }
    v
}

/// Newton steps S ← S(I − ½ Ω⁻¹ E), E = SᵀΩS − Ω, toward the symplectic group. The basis
/// inversion above loses accuracy with the condition of the lattice basis; this restores
/// symplecticity to rounding level without moving S by more than O(E).
fn refine_symplectic<T: Real>(mut s: DMatrix<T>) -> DMatrix<T> {
    let n = s.nrows();
    let om = omega::<T>(n / 2);
    let Some(om_inv) = om.clone().try_inverse() else {
        return s;
    };
    let half = T::lit(0.5);
    for _ in 0..3 {
        let e = s.transpose() * &om * &s - &om;
        if e.amax() == T::zero() {
            break;
        }
        let step = DMatrix::<T>::identity(n, n) - &om_inv * e * half;
        let next = &s * step;
        if symplectic_defect(&next).unwrap() >= symplectic_defect(&s).unwrap() {
            break;
        }
        s = next;
    }
    s
}

/// Constructive normal form for a Lagrangian group (for σ_t with t = scale_t).
pub fn lagrangian_normal_form<T: Real>(g: &ClosedSubgroup<T>) -> Result<NormalFormResult<T>> {
    if !classify(g)?.is_lagrangian {
        return Err(Error::NotLagrangian);
    }
    let tol = Tolerances::<T>::default();
    let d = g.d();
    let n = 2 * d;
    let t = g.scale_t();
    let k = g.vector_dim();

    // vector part: real orthonormal e_j; together with i e_j a complex orthonormal set
    let q = linalg::orthonormal_span(&g.vector_matrix(), tol.tol_rank);
    let e: Vec<Vec<Complex<T>>> = (0..k).map(|j| to_complex(&q.column(j).into_owned(), d)).collect();
    let rest = complex_complement(&e, d);
    if rest.len() != d - k {
        return Err(Error::InvalidInput("vector part is not totally real".into()));
    }

    // lattice part projected off the vector span
    let proj: Vec<PhasePoint<T>> = g
        .lattice_gens()
        .iter()
        .map(|l| PhasePoint::from_vector(linalg::project_out(&q, l.coords())))
        .collect::<Result<_>>()?;
    if proj.len() != 2 * (d - k) {
        return Err(Error::InvalidInput("lattice rank does not match a Lagrangian group".into()));
    }
    let gram = integer_skew_gram_scaled(&proj, t, tol.tol_int)?;
    let (_, p, divisors) = skew_normal_form(&gram)?;
    if divisors.len() != d - k {
        return Err(Error::ElementaryDivisor(0));
    }
    if let Some(bad) = divisors.iter().find(|v| **v != 1) {
        return Err(Error::ElementaryDivisor(*bad));
    }
    let m = proj.len();
    let symp_basis: Vec<DVector<T>> = (0..m)
        .map(|c| {
            let mut v = DVector::zeros(n);
            for (i, gi) in proj.iter().enumerate() {
                v += gi.coords() * T::lit(p[i][c] as f64);
            }
            v
        })
        .collect();

    // source basis and its model image
    let a = (T::pi() * t).sqrt();
    let mut src = DMatrix::zeros(n, n);
    let mut dst = DMatrix::zeros(n, n);
    for j in 0..k {
        let ej = from_complex(&e[j]);
        let iej = PhasePoint::from_vector(ej.clone())?.times_i();
        src.set_column(2 * j, &ej);
        src.set_column(2 * j + 1, iej.coords());
        dst.set_column(2 * j, PhasePoint::<T>::basis(d, j).coords());
        dst.set_column(2 * j + 1, PhasePoint::<T>::basis(d, d + j).coords());
    }
    for b in 0..d - k {
        let plane = k + b;
        // σ(p, q) = 2πt pairs with σ(√(πt) i, √(πt)) = 2πt
        src.set_column(2 * plane, &symp_basis[2 * b]);
        src.set_column(2 * plane + 1, &symp_basis[2 * b + 1]);
        dst.set_column(2 * plane, &(PhasePoint::<T>::basis(d, d + plane).coords() * a));
        dst.set_column(2 * plane + 1, &(PhasePoint::<T>::basis(d, plane).coords() * a));
    }
    let inv = src
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("degenerate symplectic basis".into()))?;
    let smat = refine_symplectic(&dst * inv);
    let defect = symplectic_defect(&smat).unwrap();
    let s = SymplecticMap::new(smat, tol.tol_symp.max(defect * T::lit(1.0001)))?;
    if defect > T::lit(1e-8) {
        return Err(Error::InvalidInput(format!("normal form map defect {:e}", defect.as_f64())));
    }

    // residuals: S·V inside the model subspace, S·L on the model lattice
    let mut residual = T::zero();
    for v in g.vector_basis() {
        let w = s.apply(v);
        let mut off = T::zero();
        for j in 0..d {
            if j >= k {
                off += w.re(j) * w.re(j);
            }
            off += w.im(j) * w.im(j);
        }
        residual = residual.max(off.sqrt() / v.norm());
    }
    let mut change = vec![vec![0i64; m]; m];
    for (c, l) in g.lattice_gens().iter().enumerate() {
        let w = s.apply(l);
        // vector coordinates are free; lattice coordinates in units of √(πt)
        for b in 0..d - k {
            let plane = k + b;
            let first = w.im(plane) / a;
            let second = w.re(plane) / a;
            let (r1, r2) = (first.round(), second.round());
            residual = residual.max((first - r1).abs() * a).max((second - r2).abs() * a);
            change[2 * b][c] = r1.as_f64() as i64;
            change[2 * b + 1][c] = r2.as_f64() as i64;
        }
        for j in 0..k {
            residual = residual.max(w.im(j).abs());
        }
    }
    let det = det_i64(&change);
    if det.abs() != 1 {
        return Err(Error::ElementaryDivisor(det as i64));
    }
    Ok(NormalFormResult { s, k, residual, change_of_basis: change })
}
