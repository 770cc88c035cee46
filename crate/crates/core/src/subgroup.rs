//! Closed subgroups G = span(V) ⊕ Z g_1 ⊕ … ⊕ Z g_m of R^{2d} and their annihilators
//! G^σ = {z : σ(z, w) ∈ 2πZ for all w ∈ G}.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;
use crate::symplectic::{omega, PhasePoint, SymplecticMap, Tolerances};

/// Condition number above which membership tests refuse to answer.
pub const MAX_CONDITION: f64 = 1e10;

/// Largest denominator searched when reducing rationally dependent lattice generators.
pub const MAX_DENOMINATOR: i64 = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedSubgroup<T: Real> {
    d: usize,
    vector_basis: Vec<PhasePoint<T>>,
    lattice_gens: Vec<PhasePoint<T>>,
    scale_t: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport<T: Real> {
    pub is_coisotropic: bool,
    pub is_lagrangian: bool,
    pub algebra_commutative: bool,
    pub annihilator: ClosedSubgroup<T>,
}

impl<T: Real> ClosedSubgroup<T> {
    pub fn new(
        d: usize,
        vector_basis: Vec<PhasePoint<T>>,
        lattice_gens: Vec<PhasePoint<T>>,
        scale_t: T,
    ) -> Result<Self> {
        Self::with_tolerances(d, vector_basis, lattice_gens, scale_t, &Tolerances::default())
    }

    /// Validates the closedness certificate: `[V | L]` has full column rank.
    pub fn with_tolerances(
        d: usize,
        vector_basis: Vec<PhasePoint<T>>,
        lattice_gens: Vec<PhasePoint<T>>,
        scale_t: T,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("d must be at least 1".into()));
        }
        for p in vector_basis.iter().chain(lattice_gens.iter()) {
            if p.d() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.d() });
            }
            if p.as_slice().iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("non-finite generator coordinate".into()));
            }
        }
        if !(scale_t > T::zero()) || !scale_t.is_finite() {
            return Err(Error::InvalidInput("scale_t must be positive".into()));
        }
        let r = vector_basis.len();
        let m = lattice_gens.len();
        if r + m > 2 * d {
            return Err(Error::NotClosed(format!("{} generators exceed 2d = {}", r + m, 2 * d)));
        }
        let g = ClosedSubgroup { d, vector_basis, lattice_gens, scale_t };
        let vm = g.vector_matrix();
        if linalg::rank(&vm, tol.tol_rank) != r {
            return Err(Error::NotClosed("vector basis is linearly dependent".into()));
        }
        if linalg::rank(&g.combined_matrix(), tol.tol_rank) != r + m {
            return Err(Error::NotClosed(
                "lattice generators are dependent modulo the vector part (dense subgroup)".into(),
            ));
        }
        Ok(g)
    }

    pub fn trivial(d: usize) -> Self {
        ClosedSubgroup { d, vector_basis: vec![], lattice_gens: vec![], scale_t: T::one() }
    }

    pub fn whole(d: usize) -> Self {
        let vb = (0..2 * d).map(|k| PhasePoint::basis(d, k)).collect();
        ClosedSubgroup { d, vector_basis: vb, lattice_gens: vec![], scale_t: T::one() }
    }

    pub fn lattice(d: usize, gens: Vec<PhasePoint<T>>) -> Result<Self> {
        Self::new(d, vec![], gens, T::one())
    }

    pub fn subspace(d: usize, basis: Vec<PhasePoint<T>>) -> Result<Self> {
        Self::new(d, basis, vec![], T::one())
    }

    /// (R ⊕ {0})^k ⊕ (√(πt) Z ⊕ √(πt) Z)^{d−k}; Lagrangian for σ_t.
    pub fn model(d: usize, k: usize, scale_t: T) -> Self {
        assert!(k <= d);
        let a = (T::pi() * scale_t).sqrt();
        let vb = (0..k).map(|j| PhasePoint::basis(d, j)).collect();
        let mut lg = Vec::new();
        for j in k..d {
            lg.push(PhasePoint::basis(d, j).scale(a));
            lg.push(PhasePoint::basis(d, d + j).scale(a));
        }
        ClosedSubgroup { d, vector_basis: vb, lattice_gens: lg, scale_t }
    }

    /// m₁Z + m₂iZ in d = 1.
    pub fn rectangular(m1: T, m2: T) -> Result<Self> {
        let z = T::zero();
        Self::lattice(1, vec![PhasePoint::new(vec![m1, z])?, PhasePoint::new(vec![z, m2])?])
    }

    pub fn with_scale(mut self, t: T) -> Result<Self> {
        if !(t > T::zero()) {
            return Err(Error::InvalidInput("scale_t must be positive".into()));
        }
        self.scale_t = t;
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vector_basis(&self) -> &[PhasePoint<T>] {
        &self.vector_basis
    }

    pub fn lattice_gens(&self) -> &[PhasePoint<T>] {
        &self.lattice_gens
    }

    pub fn scale_t(&self) -> T {
        self.scale_t
    }

    pub fn vector_dim(&self) -> usize {
        self.vector_basis.len()
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_gens.len()
    }

    pub fn vector_matrix(&self) -> DMatrix<T> {
        let cols: Vec<DVector<T>> = self.vector_basis.iter().map(|p| p.coords().clone()).collect();
        linalg::columns(2 * self.d, &cols)
    }

    pub fn lattice_matrix(&self) -> DMatrix<T> {
        let cols: Vec<DVector<T>> = self.lattice_gens.iter().map(|p| p.coords().clone()).collect();
        linalg::columns(2 * self.d, &cols)
    }

    /// `[V | L]`.
    pub fn combined_matrix(&self) -> DMatrix<T> {
        let cols: Vec<DVector<T>> = self
            .vector_basis
            .iter()
            .chain(self.lattice_gens.iter())
            .map(|p| p.coords().clone())
            .collect();
        linalg::columns(2 * self.d, &cols)
    }

    /// S·G, keeping scale_t.
    pub fn transform(&self, s: &SymplecticMap<T>) -> Result<Self> {
        if s.d() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: s.d() });
        }
        Ok(ClosedSubgroup {
            d: self.d,
            vector_basis: self.vector_basis.iter().map(|p| s.apply(p)).collect(),
            lattice_gens: self.lattice_gens.iter().map(|p| s.apply(p)).collect(),
            scale_t: self.scale_t,
        })
    }

    pub fn cast<U: Real>(&self) -> ClosedSubgroup<U> {
        ClosedSubgroup {
            d: self.d,
            vector_basis: self.vector_basis.iter().map(|p| p.cast()).collect(),
            lattice_gens: self.lattice_gens.iter().map(|p| p.cast()).collect(),
            scale_t: U::lit(self.scale_t.as_f64()),
        }
    }
}

fn orthonormal_vectors<T: Real>(g: &ClosedSubgroup<T>, tol: T) -> DMatrix<T> {
    linalg::orthonormal_span(&g.vector_matrix(), tol)
}

/// z ∈ G: least squares in `[V | L]`, rounding of the lattice coefficients, residual ≤ tol·(1 + |z|).
pub fn member<T: Real>(g: &ClosedSubgroup<T>, z: &PhasePoint<T>, tol: T) -> Result<bool> {
    if z.d() != g.d {
        return Err(Error::DimensionMismatch { expected: g.d, found: z.d() });
    }
    let a = g.combined_matrix();
    if a.ncols() == 0 {
        return Ok(z.norm() <= tol);
    }
    let cond = linalg::condition(&a);
    if cond.as_f64() > MAX_CONDITION {
        return Err(Error::IllConditioned(cond.as_f64()));
    }
    let r = g.vector_dim();
    let coef = linalg::pinv(&a, T::eps())? * z.coords();
    let mut rest = z.coords().clone();
    for (j, l) in g.lattice_gens.iter().enumerate() {
        rest -= l.coords() * coef[r + j].round();
    }
    let q = orthonormal_vectors(g, T::lit(1e-12).max(T::eps() * T::lit(10.0)));
    let res = linalg::project_out(&q, &rest).norm();
    Ok(res <= tol * (T::one() + z.norm()))
}

/// G^{σ_t} for t = G.scale_t, i.e. t·G^σ.
///
/// W = σ-complement of span(V) (orthonormal basis Q); Φ(z)_j = σ(z, g_j)/2π on W;
/// vector part = Q·ker Φ, lattice part = Q·Φ⁺ (least-norm right inverse).
pub fn annihilator<T: Real>(g: &ClosedSubgroup<T>) -> Result<ClosedSubgroup<T>> {
    annihilator_with(g, &Tolerances::default())
}

pub fn annihilator_with<T: Real>(g: &ClosedSubgroup<T>, tol: &Tolerances<T>) -> Result<ClosedSubgroup<T>> {
    let d = g.d;
    let n = 2 * d;
    let om = omega::<T>(d);
    let two_pi = T::two_pi();
    let t = g.scale_t;

    let ov = om.clone() * g.vector_matrix();
    let ov_span = linalg::orthonormal_span(&ov, tol.tol_rank);
    let q = linalg::orthonormal_complement(&ov_span, n);

    let m = g.lattice_rank();
    let mut f = DMatrix::zeros(m, q.ncols());
    for (j, l) in g.lattice_gens.iter().enumerate() {
        // row j: z ↦ zᵀ Ω g_j / 2π restricted to W
        let row = (q.transpose() * (&om * l.coords())) / two_pi;
        f.set_row(j, &row.transpose());
    }
    if m > 0 && linalg::rank(&f, tol.tol_rank) != m {
        return Err(Error::NotClosed("annihilator pairing map has deficient rank".into()));
    }
    let ker = linalg::null_space(&f, tol.tol_rank);
    let vec_part = &q * ker;
    let right_inv = &q * linalg::pinv(&f, tol.tol_rank)?;

    let vector_basis = (0..vec_part.ncols())
        .map(|j| PhasePoint::from_vector(vec_part.column(j).into_owned()))
        .collect::<Result<Vec<_>>>()?;
    let lattice_gens = (0..right_inv.ncols())
        .map(|j| PhasePoint::from_vector(right_inv.column(j) * t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClosedSubgroup { d, vector_basis, lattice_gens, scale_t: t })
}

/// H ⊂ G.
pub fn contains<T: Real>(g: &ClosedSubgroup<T>, h: &ClosedSubgroup<T>, tol: T) -> Result<bool> {
    if g.d != h.d {
        return Err(Error::DimensionMismatch { expected: g.d, found: h.d });
    }
    let q = orthonormal_vectors(g, T::lit(1e-12).max(T::eps() * T::lit(10.0)));
    for v in &h.vector_basis {
        let res = linalg::project_out(&q, v.coords()).norm();
        if res > tol * (T::one() + v.norm()) {
            return Ok(false);
        }
    }
    for l in &h.lattice_gens {
        if !member(g, l, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Mutual containment.
pub fn equal<T: Real>(g: &ClosedSubgroup<T>, h: &ClosedSubgroup<T>, tol: T) -> Result<bool> {
    Ok(contains(g, h, tol)? && contains(h, g, tol)?)
}

/// Default tolerance of the classification containment tests.
pub fn classification_tol<T: Real>() -> T {
    Tolerances::<T>::default().tol_num
}

pub fn classify<T: Real>(g: &ClosedSubgroup<T>) -> Result<ClassificationReport<T>> {
    classify_with(g, classification_tol())
}

/// Coisotropic ⇔ G ⊃ G^σ ⇔ the invariant Toeplitz algebra is commutative.
pub fn classify_with<T: Real>(g: &ClosedSubgroup<T>, tol: T) -> Result<ClassificationReport<T>> {
    let ann = annihilator(g)?;
    let co = contains(g, &ann, tol)?;
    let lag = co && contains(&ann, g, tol)?;
    Ok(ClassificationReport { is_coisotropic: co, is_lagrangian: lag, algebra_commutative: co, annihilator: ann })
}

/// (G_vec, G_disc): the vector part and the lattice generators projected onto span(V)^⊥.
/// For Lagrangian G the two parts are also orthogonal for the complex inner product;
/// that is asserted.
pub fn split_vector_discrete<T: Real>(
    g: &ClosedSubgroup<T>,
) -> Result<(ClosedSubgroup<T>, ClosedSubgroup<T>)> {
    let tol = Tolerances::<T>::default();
    let q = orthonormal_vectors(g, tol.tol_rank);
    let gvec = ClosedSubgroup { d: g.d, vector_basis: g.vector_basis.clone(), lattice_gens: vec![], scale_t: g.scale_t };
    let projected = g
        .lattice_gens
        .iter()
        .map(|l| PhasePoint::from_vector(linalg::project_out(&q, l.coords())))
        .collect::<Result<Vec<_>>>()?;
    let gdisc = ClosedSubgroup { d: g.d, vector_basis: vec![], lattice_gens: projected, scale_t: g.scale_t };
    if classify(g)?.is_lagrangian {
        let scale = g.lattice_gens.iter().map(|l| l.norm()).fold(T::one(), |a, b| a.max(b));
        for l in &gdisc.lattice_gens {
            for v in &g.vector_basis {
                let re = l.coords().dot(v.coords());
                let im = l.sigma(v) * T::lit(0.5);
                let e = (re * re + im * im).sqrt() / (v.norm() * scale);
                if e > tol.tol_num {
                    return Err(Error::InvalidInput(format!(
                        "Lagrangian split not orthogonal (defect {:e})",
                        e.as_f64()
                    )));
                }
            }
        }
    }
    Ok((gvec, gdisc))
}

fn rational_denominator<T: Real>(c: &[T], tol: T) -> Option<i64> {
    (1..=MAX_DENOMINATOR).find(|&q| {
        let qf = T::lit(q as f64);
        c.iter().all(|v| ((*v * qf) - (*v * qf).round()).abs() <= tol * qf)
    })
}

/// G + H when it is closed. scale_t is taken from `g`. Rationally dependent lattice
/// generators are merged by an integer Hermite reduction; irrational dependence (a dense
/// sum such as Z + √2 Z) is rejected.
pub fn sum<T: Real>(g: &ClosedSubgroup<T>, h: &ClosedSubgroup<T>) -> Result<ClosedSubgroup<T>> {
    if g.d != h.d {
        return Err(Error::DimensionMismatch { expected: g.d, found: h.d });
    }
    let d = g.d;
    let n = 2 * d;
    let tol = Tolerances::<T>::default();
    let vcols: Vec<DVector<T>> = g
        .vector_basis
        .iter()
        .chain(h.vector_basis.iter())
        .map(|p| p.coords().clone())
        .collect();
    let q = linalg::orthonormal_span(&linalg::columns(n, &vcols), tol.tol_rank);

    let scale = g
        .lattice_gens
        .iter()
        .chain(h.lattice_gens.iter())
        .map(|l| l.norm())
        .fold(T::one(), |a, b| a.max(b));
    let mut basis: Vec<DVector<T>> = Vec::new();
    let mut extra: Vec<DVector<T>> = Vec::new();
    for l in g.lattice_gens.iter().chain(h.lattice_gens.iter()) {
        let p = linalg::project_out(&q, l.coords());
        if p.norm() <= tol.tol_num * scale {
            continue;
        }
        let mut trial = basis.clone();
        trial.push(p.clone());
        if linalg::rank(&linalg::columns(n, &trial), tol.tol_rank) == trial.len() {
            basis = trial;
        } else {
            extra.push(p);
        }
    }
    if q.ncols() + basis.len() > n {
        return Err(Error::NotClosed("sum exceeds the ambient dimension".into()));
    }
    let b = linalg::columns(n, &basis);
    let r = basis.len();
    let mut gens = basis.clone();
    if !extra.is_empty() {
        let bp = linalg::pinv(&b, T::eps())?;
        let mut coefs: Vec<Vec<T>> = Vec::new();
        for e in &extra {
            let c = &bp * e;
            if (&b * &c - e).norm() > tol.tol_num * scale {
                return Err(Error::NotClosed("sum generator outside the lattice span".into()));
            }
            coefs.push(c.iter().copied().collect());
        }
        let all: Vec<T> = coefs.iter().flatten().copied().collect();
        let den = rational_denominator(&all, T::lit(1e-9)).ok_or_else(|| {
            Error::NotClosed("lattice generators are irrationally dependent (dense sum)".into())
        })?;
        let denf = T::lit(den as f64);
        let mut int_cols: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|k| if k == i { den } else { 0 }).collect())
            .collect();
        for c in &coefs {
            int_cols.push(c.iter().map(|v| (*v * denf).round().as_f64() as i64).collect());
        }
        let hb = linalg::integer_column_basis(&int_cols, r)?;
        gens = hb
            .iter()
            .map(|col| {
                let mut v = DVector::zeros(n);
                for (k, ck) in col.iter().enumerate() {
                    v += &basis[k] * (T::lit(*ck as f64) / denf);
                }
                v
            })
            .collect();
    }
    let vector_basis = (0..q.ncols())
        .map(|j| PhasePoint::from_vector(q.column(j).into_owned()))
        .collect::<Result<Vec<_>>>()?;
    let lattice_gens = gens.into_iter().map(PhasePoint::from_vector).collect::<Result<Vec<_>>>()?;
    ClosedSubgroup::new(d, vector_basis, lattice_gens, g.scale_t)
}

/// G ∩ H = (G^σ + H^σ)^σ.
pub fn intersection<T: Real>(g: &ClosedSubgroup<T>, h: &ClosedSubgroup<T>) -> Result<ClosedSubgroup<T>> {
    let h = h.clone().with_scale(g.scale_t)?;
    annihilator(&sum(&annihilator(g)?, &annihilator(&h)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(c: &[f64]) -> PhasePoint<f64> {
        PhasePoint::new(c.to_vec()).unwrap()
    }

    fn sqpi() -> f64 {
        PI.sqrt()
    }

    #[test]
    fn membership_examples() {
        let g = ClosedSubgroup::rectangular(sqpi(), sqpi()).unwrap();
        assert!(member(&g, &p(&[0.0, 0.0]), 1e-10).unwrap());
        assert!(member(&g, &p(&[3.0 * sqpi(), -2.0 * sqpi()]), 1e-10).unwrap());
        assert!(!member(&g, &p(&[sqpi() / 2.0, 0.0]), 1e-10).unwrap());
        let line = ClosedSubgroup::subspace(1, vec![p(&[1.0, 1.0])]).unwrap();
        assert!(member(&line, &p(&[-2.5, -2.5]), 1e-10).unwrap());
        assert!(!member(&line, &p(&[1.0, 0.0]), 1e-10).unwrap());
    }

    #[test]
    fn dense_group_rejected() {
        let r = ClosedSubgroup::lattice(1, vec![p(&[1.0, 0.0]), p(&[2f64.sqrt(), 0.0])]);
        assert!(matches!(r, Err(Error::NotClosed(_))));
        let r = ClosedSubgroup::new(1, vec![p(&[1.0, 0.0])], vec![p(&[3.0, 0.0])], 1.0);
        assert!(matches!(r, Err(Error::NotClosed(_))));
    }

    #[test]
    fn annihilator_rectangular() {
        for (m1, m2) in [(1.0, 1.0), (sqpi(), sqpi()), (2.0, PI / 2.0), (0.5, 2.0 * PI)] {
            let g = ClosedSubgroup::rectangular(m1, m2).unwrap();
            let a = annihilator(&g).unwrap();
            let want = ClosedSubgroup::rectangular(PI / m2, PI / m1).unwrap();
            assert!(equal(&a, &want, 1e-12).unwrap(), "{m1} {m2}");
        }
    }

    #[test]
    fn annihilator_extremes() {
        for d in 1..=3 {
            let a = annihilator(&ClosedSubgroup::<f64>::trivial(d)).unwrap();
            assert_eq!(a.vector_dim(), 2 * d);
            let b = annihilator(&ClosedSubgroup::<f64>::whole(d)).unwrap();
            assert_eq!(b.vector_dim() + b.lattice_rank(), 0);
        }
    }

    #[test]
    fn mixed_model_is_self_dual() {
        let g = ClosedSubgroup::<f64>::model(2, 1, 1.0);
        let a = annihilator(&g).unwrap();
        assert!(equal(&a, &g, 1e-12).unwrap());
        let c = classify(&g).unwrap();
        assert!(c.is_lagrangian && c.is_coisotropic && c.algebra_commutative);
    }

    #[test]
    fn annihilator_scales_with_t() {
        let g = ClosedSubgroup::rectangular(sqpi(), sqpi()).unwrap().with_scale(2.0).unwrap();
        let a = annihilator(&g).unwrap();
        let want = ClosedSubgroup::rectangular(2.0 * sqpi(), 2.0 * sqpi()).unwrap();
        assert!(equal(&a, &want, 1e-12).unwrap());
        assert_eq!(a.scale_t(), 2.0);
    }

    #[test]
    fn containment_examples() {
        let g = ClosedSubgroup::rectangular(sqpi(), sqpi()).unwrap();
        let h = ClosedSubgroup::rectangular(2.0 * sqpi(), 2.0 * sqpi()).unwrap();
        assert!(contains(&g, &g, 1e-10).unwrap());
        assert!(contains(&g, &h, 1e-10).unwrap());
        assert!(!contains(&h, &g, 1e-10).unwrap());
        for a in [0.0, 0.3, 1.7] {
            let g = ClosedSubgroup::lattice(1, vec![p(&[1.0, 0.0]), p(&[a, PI])]).unwrap();
            let ann = annihilator(&g).unwrap();
            assert!(contains(&g, &ann, 1e-10).unwrap(), "a = {a}");
        }
    }

    #[test]
    fn classification_examples() {
        for (m1, m2, comm) in [(1.0, 1.0, false), (sqpi(), sqpi(), true), (1.0, PI / 2.0, true), (1.0, PI / 3.0, true), (1.0, PI / 2.5, false)] {
            let c = classify(&ClosedSubgroup::rectangular(m1, m2).unwrap()).unwrap();
            assert_eq!(c.algebra_commutative, comm, "{m1} {m2}");
        }
        let line = ClosedSubgroup::subspace(1, vec![p(&[1.0, 0.0])]).unwrap();
        assert!(classify(&line).unwrap().is_lagrangian);
        let half = ClosedSubgroup::rectangular(1.0, PI / 2.0).unwrap();
        let c = classify(&half).unwrap();
        assert!(c.is_coisotropic && !c.is_lagrangian);
    }

    #[test]
    fn split_examples() {
        let g = ClosedSubgroup::<f64>::model(2, 1, 1.0);
        let (v, l) = split_vector_discrete(&g).unwrap();
        assert_eq!(v.vector_dim(), 1);
        assert_eq!(l.lattice_rank(), 2);
        let w = ClosedSubgroup::<f64>::whole(2);
        let (v, l) = split_vector_discrete(&w).unwrap();
        assert_eq!((v.vector_dim(), l.lattice_rank()), (4, 0));
        let sheared = ClosedSubgroup::new(1, vec![p(&[1.0, 0.0])], vec![p(&[0.7, 2.0])], 1.0).unwrap();
        let (_, l) = split_vector_discrete(&sheared).unwrap();
        assert!((l.lattice_gens()[0].re(0)).abs() < 1e-15);
    }

    #[test]
    fn sum_merges_commensurable_generators() {
        let a = ClosedSubgroup::lattice(1, vec![p(&[2.0, 0.0])]).unwrap();
        let b = ClosedSubgroup::lattice(1, vec![p(&[3.0, 0.0]), p(&[0.0, 1.0])]).unwrap();
        let s = sum(&a, &b).unwrap();
        let want = ClosedSubgroup::lattice(1, vec![p(&[1.0, 0.0]), p(&[0.0, 1.0])]).unwrap();
        assert!(equal(&s, &want, 1e-10).unwrap());
        let c = ClosedSubgroup::lattice(1, vec![p(&[2f64.sqrt(), 0.0])]).unwrap();
        assert!(matches!(sum(&a, &c), Err(Error::NotClosed(_))));
    }

    #[test]
    fn intersection_of_lattices() {
        let a = ClosedSubgroup::rectangular(2.0, 1.0).unwrap();
        let b = ClosedSubgroup::rectangular(3.0, 1.0).unwrap();
        let i = intersection(&a, &b).unwrap();
        let want = ClosedSubgroup::rectangular(6.0, 1.0).unwrap();
        assert!(equal(&i, &want, 1e-9).unwrap());
    }

    #[test]
    fn generic_over_f32() {
        let s = std::f32::consts::PI.sqrt();
        let g = ClosedSubgroup::<f32>::rectangular(s, s).unwrap();
        let c = classify(&g).unwrap();
        assert!(c.is_lagrangian);
        let g = ClosedSubgroup::<f32>::rectangular(1.0, 1.0).unwrap();
        assert!(!classify(&g).unwrap().is_coisotropic);
    }
}
