//! Fundamental-triangle area test for rank-2 lattices in d = 1.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::subgroup::{classify, ClosedSubgroup};
use crate::symplectic::PhasePoint;

#[derive(Clone, Debug, PartialEq)]
pub struct TriangleAreaReport<T: Real> {
    /// |σ(z1, z2)| / 4.
    pub area: T,
    pub coisotropic: bool,
    pub lagrangian: bool,
    /// area / (π/2).
    pub area_in_half_pi: T,
    /// π / (2·area); an integer exactly when the lattice is coisotropic.
    pub dual_index: T,
    /// The naive quantization "coisotropic ⇒ area ∈ (π/2)·N" fails on this input.
    pub quantization_counterexample: bool,
    /// area = π/2 ⇔ Lagrangian holds on this input.
    pub half_pi_matches_lagrangian: bool,
}

fn near_integer<T: Real>(v: T, tol: T) -> bool {
    v >= T::one() - tol && (v - v.round()).abs() <= tol * (T::one() + v.abs())
}

pub fn triangle_area_criterion<T: Real>(z1: &PhasePoint<T>, z2: &PhasePoint<T>) -> Result<TriangleAreaReport<T>> {
    if z1.d() != 1 || z2.d() != 1 {
        return Err(Error::InvalidInput("triangle area criterion needs d = 1".into()));
    }
    let g = ClosedSubgroup::lattice(1, vec![z1.clone(), z2.clone()])?;
    let c = classify(&g)?;
    let area = z1.sigma(z2).abs() / T::lit(4.0);
    let half_pi = T::frac_pi_2();
    let q = area / half_pi;
    let tol = T::lit(1e-9).max(T::eps() * T::lit(100.0));
    let in_half_pi_n = near_integer(q, tol);
    let is_half_pi = (q - T::one()).abs() <= tol;
    Ok(TriangleAreaReport {
        area,
        coisotropic: c.is_coisotropic,
        lagrangian: c.is_lagrangian,
        area_in_half_pi: q,
        dual_index: half_pi / area,
        quantization_counterexample: c.is_coisotropic && !in_half_pi_n,
        half_pi_matches_lagrangian: is_half_pi == c.is_lagrangian,
    })
}
