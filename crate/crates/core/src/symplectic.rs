//! Phase space R^{2d} ≅ C^d with σ(z, w) = 2 Im(z·w̄).
//!
//! Coordinates are stacked: `(x_1..x_d, y_1..y_d)` with `z_j = x_j + i y_j`.
//! In these coordinates σ(z, w) = zᵀ Ω w with Ω = [[0, -2I], [2I, 0]].

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint<T: Real> {
    coords: DVector<T>,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() || coords.len() % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "phase point needs an even, nonzero number of coordinates, got {}",
                coords.len()
            )));
        }
        Ok(PhasePoint { coords: DVector::from_vec(coords) })
    }

    pub fn from_vector(coords: DVector<T>) -> Result<Self> {
        Self::new(coords.as_slice().to_vec())
    }

    pub fn zero(d: usize) -> Self {
        assert!(d >= 1);
        PhasePoint { coords: DVector::zeros(2 * d) }
    }

    /// Builds z from its real parts `x` and imaginary parts `y`.
    pub fn from_re_im(x: &[T], y: &[T]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
        }
        let mut c = x.to_vec();
        c.extend_from_slice(y);
        Self::new(c)
    }

    pub fn from_complex(z: &[Complex<T>]) -> Result<Self> {
        let x: Vec<T> = z.iter().map(|c| c.re).collect();
        let y: Vec<T> = z.iter().map(|c| c.im).collect();
        Self::from_re_im(&x, &y)
    }

    /// Unit vector `e_k` of R^{2d}; `k < d` are the real directions.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut p = Self::zero(d);
        p.coords[k] = T::one();
        p
    }

    pub fn d(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn re(&self, j: usize) -> T {
        self.coords[j]
    }

    pub fn im(&self, j: usize) -> T {
        self.coords[self.d() + j]
    }

    pub fn component(&self, j: usize) -> Complex<T> {
        Complex::new(self.re(j), self.im(j))
    }

    pub fn to_complex(&self) -> Vec<Complex<T>> {
        (0..self.d()).map(|j| self.component(j)).collect()
    }

    pub fn coords(&self) -> &DVector<T> {
        &self.coords
    }

    pub fn as_slice(&self) -> &[T] {
        self.coords.as_slice()
    }

    pub fn norm(&self) -> T {
        self.coords.norm()
    }

    pub fn norm_sqr(&self) -> T {
        self.coords.norm_squared()
    }

    pub fn scale(&self, s: T) -> Self {
        PhasePoint { coords: &self.coords * s }
    }

    /// Multiplication by i, coordinatewise: (x, y) ↦ (-y, x).
    pub fn times_i(&self) -> Self {
        let d = self.d();
        let mut c = DVector::zeros(2 * d);
        for j in 0..d {
            c[j] = -self.coords[d + j];
            c[d + j] = self.coords[j];
        }
        PhasePoint { coords: c }
    }

    /// σ(self, w) without the dimension check.
    pub fn sigma(&self, w: &Self) -> T {
        let d = self.d();
        let mut s = T::zero();
        for j in 0..d {
            s += self.coords[d + j] * w.coords[j] - self.coords[j] * w.coords[d + j];
        }
        s + s
    }

    pub fn cast<U: Real>(&self) -> PhasePoint<U> {
        PhasePoint { coords: self.coords.map(|v| U::lit(v.as_f64())) }
    }

    pub fn to_f64(&self) -> PhasePoint<f64> {
        self.cast()
    }
}

impl<T: Real> Add for &PhasePoint<T> {
    type Output = PhasePoint<T>;
    fn add(self, rhs: Self) -> PhasePoint<T> {
        PhasePoint { coords: &self.coords + &rhs.coords }
    }
}

impl<T: Real> Sub for &PhasePoint<T> {
    type Output = PhasePoint<T>;
    fn sub(self, rhs: Self) -> PhasePoint<T> {
        PhasePoint { coords: &self.coords - &rhs.coords }
    }
}

impl<T: Real> Neg for &PhasePoint<T> {
    type Output = PhasePoint<T>;
    fn neg(self) -> PhasePoint<T> {
        PhasePoint { coords: -&self.coords }
    }
}

impl<T: Real> Mul<&PhasePoint<T>> for f64 {
    type Output = PhasePoint<T>;
    fn mul(self, rhs: &PhasePoint<T>) -> PhasePoint<T> {
        rhs.scale(T::lit(self))
    }
}

/// σ(z, w) = 2 Σ_j (y_j u_j − x_j v_j) for z = (x, y), w = (u, v).
pub fn symplectic_form<T: Real>(z: &PhasePoint<T>, w: &PhasePoint<T>) -> Result<T> {
    if z.d() != w.d() {
        return Err(Error::DimensionMismatch { expected: z.d(), found: w.d() });
    }
    Ok(z.sigma(w))
}

/// Gram matrix Ω of σ in stacked coordinates.
pub fn omega<T: Real>(d: usize) -> DMatrix<T> {
    let two = T::lit(2.0);
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    for j in 0..d {
        m[(j, d + j)] = -two;
        m[(d + j, j)] = two;
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T: Real> {
    pub tol_symp: T,
    pub tol_int: T,
    pub tol_rank: T,
    pub tol_num: T,
}

impl<T: Real> Default for Tolerances<T> {
    /// 1e-10 / 1e-9 / 1e-10 / 1e-8, raised to a few hundred ulps for `f32`.
    fn default() -> Self {
        let floor = |v: f64, ulps: f64| T::lit(v.max(ulps * T::eps().as_f64()));
        Tolerances {
            tol_symp: floor(1e-10, 200.0),
            tol_int: floor(1e-9, 400.0),
            tol_rank: floor(1e-10, 200.0),
            tol_num: floor(1e-8, 1000.0),
        }
    }
}

impl<T: Real> Tolerances<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.tol_symp, self.tol_int, self.tol_rank, self.tol_num]
            .iter()
            .all(|t| *t > T::zero());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput("tolerances must be strictly positive".into()))
        }
    }
}

/// ‖SᵀΩS − Ω‖_max ≤ tol.
pub fn is_symplectic<T: Real>(s: &DMatrix<T>, tol: T) -> bool {
    symplectic_defect(s).map(|e| e <= tol).unwrap_or(false)
}

/// ‖SᵀΩS − Ω‖_max, or `None` if `s` is not square of even size.
pub fn symplectic_defect<T: Real>(s: &DMatrix<T>) -> Option<T> {
    let n = s.nrows();
    if n == 0 || n % 2 != 0 || s.ncols() != n {
        return None;
    }
    let om = omega::<T>(n / 2);
    let r = s.transpose() * &om * s - om;
    Some(r.amax())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMap<T: Real> {
    m: DMatrix<T>,
}

impl<T: Real> SymplecticMap<T> {
    pub fn new(m: DMatrix<T>, tol: T) -> Result<Self> {
        let n = m.nrows();
        if n == 0 || n % 2 != 0 || m.ncols() != n {
            return Err(Error::InvalidInput(format!("{}x{} is not a 2d x 2d matrix", n, m.ncols())));
        }
        match symplectic_defect(&m) {
            Some(e) if e <= tol => Ok(SymplecticMap { m }),
            Some(e) => Err(Error::InvalidInput(format!("matrix is not symplectic (defect {:e})", e.as_f64()))),
            None => unreachable!(),
        }
    }

    pub fn identity(d: usize) -> Self {
        SymplecticMap { m: DMatrix::identity(2 * d, 2 * d) }
    }

    /// Multiplies coordinate `j` by e^{iθ}.
    pub fn rotation(d: usize, j: usize, theta: T) -> Self {
        let mut m = DMatrix::identity(2 * d, 2 * d);
        let (s, c) = theta.sin_cos();
        m[(j, j)] = c;
        m[(j, d + j)] = -s;
        m[(d + j, j)] = s;
        m[(d + j, d + j)] = c;
        SymplecticMap { m }
    }

    /// Real form of a complex unitary d×d matrix; unitaries preserve Im(z·w̄).
    pub fn from_unitary(u: &DMatrix<Complex<T>>, tol: T) -> Result<Self> {
        let d = u.nrows();
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        for r in 0..d {
            for c in 0..d {
                let e = u[(r, c)];
                m[(r, c)] = e.re;
                m[(r, d + c)] = -e.im;
                m[(d + r, c)] = e.im;
                m[(d + r, d + c)] = e.re;
            }
        }
        Self::new(m, tol)
    }

    /// x ↦ x + A y for symmetric A.
    pub fn shear_upper(a: &DMatrix<T>, tol: T) -> Result<Self> {
        let d = a.nrows();
        let mut m = DMatrix::identity(2 * d, 2 * d);
        m.view_mut((0, d), (d, d)).copy_from(a);
        Self::new(m, tol)
    }

    /// y ↦ y + A x for symmetric A.
    pub fn shear_lower(a: &DMatrix<T>, tol: T) -> Result<Self> {
        let d = a.nrows();
        let mut m = DMatrix::identity(2 * d, 2 * d);
        m.view_mut((d, 0), (d, d)).copy_from(a);
        Self::new(m, tol)
    }

    /// x_j + i y_j ↦ r x_j + i y_j / r.
    pub fn squeeze(d: usize, j: usize, r: T) -> Self {
        let mut m = DMatrix::identity(2 * d, 2 * d);
        m[(j, j)] = r;
        m[(d + j, d + j)] = T::one() / r;
        SymplecticMap { m }
    }

    pub fn d(&self) -> usize {
        self.m.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.m
    }

    pub fn defect(&self) -> T {
        symplectic_defect(&self.m).unwrap()
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Self) -> Self {
        SymplecticMap { m: &self.m * &other.m }
    }

    /// S⁻¹ = Ω⁻¹ Sᵀ Ω, exact up to rounding for symplectic S.
    pub fn inverse(&self) -> Self {
        let d = self.d();
        let om = omega::<T>(d);
        let om_inv = -&om * T::lit(0.25);
        SymplecticMap { m: om_inv * self.m.transpose() * om }
    }

    pub fn apply(&self, z: &PhasePoint<T>) -> PhasePoint<T> {
        PhasePoint { coords: &self.m * &z.coords }
    }
}

pub fn apply_map<T: Real>(s: &SymplecticMap<T>, z: &PhasePoint<T>) -> Result<PhasePoint<T>> {
    if s.d() != z.d() {
        return Err(Error::DimensionMismatch { expected: s.d(), found: z.d() });
    }
    Ok(s.apply(z))
}
