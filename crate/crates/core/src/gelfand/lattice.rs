//! Lattice case G = √πZ ⊕ √πZ: cell weight H(λ), γ_a and γ_A on T².

use std::f64::consts::PI;

use rayon::prelude::*;

use super::theta::lattice_kernel;
use super::{GelfandValue, LatticeData, TorusPoint, C64};
use crate::error::{Error, Result};
use crate::fock::quadrature::{gauss_legendre, QuadratureSpec};
use crate::fock::{coherent_state, CVector, Symbol, TruncatedOperator};
use crate::PhasePoint;

fn pt1(z: [C64; 1]) -> PhasePoint {
    PhasePoint::from_complex(&z).expect("one coordinate")
}

const DEFAULT_CELL_NODES: usize = 24;

/// Energy fraction allowed above level ⌊5N/6⌋ in the contract probes A k_z.
pub(crate) const DECAY_TOL: f64 = 1e-4;

/// Gauss–Legendre nodes on R₀ = [0, √π]² with weights of dμ = π^{-1} e^{−|z|²} dA.
fn cell_rule(n: usize) -> Vec<(C64, f64)> {
    let (x, w) = gauss_legendre(n, 0.0, PI.sqrt());
    let mut out = Vec::with_capacity(n * n);
    for (a, wa) in x.iter().zip(&w) {
        for (b, wb) in x.iter().zip(&w) {
            let z = C64::new(*a, *b);
            out.push((z, wa * wb * (-z.norm_sqr()).exp() / PI));
        }
    }
    out
}

fn non_convergence(what: &str, diff: f64, tol: f64) -> Error {
    Error::NonConvergence { what: what.to_string(), diff, tol }
}

fn lattice_d1(d: usize) -> Result<()> {
    if d != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: d });
    }
    Ok(())
}

/// Below this H(λ) counts as zero; H integrates to 1 over T².
const H_ZERO: f64 = 1e-13;
/// Below this the quotient num/H is replaced by its limit from a ring around λ.
const H_FLOOR: f64 = 1e-6;
const RING_RADIUS: f64 = 0.05;
const RING_POINTS: usize = 8;

fn h_weight_raw(lam: &TorusPoint, n: usize, data: &LatticeData) -> f64 {
    cell_rule(n).iter().map(|(z, w)| w * lattice_kernel(*z, lam, data).norm_sqr()).sum()
}

fn h_weight_checked(lam: &TorusPoint, quad: &QuadratureSpec, data: &LatticeData) -> Result<f64> {
    quad.validate()?;
    let n = quad.nodes_or(DEFAULT_CELL_NODES);
    let h = h_weight_raw(lam, n, data);
    if !quad.certify {
        return Ok(h);
    }
    let h2 = h_weight_raw(lam, 2 * n, &data.doubled());
    let diff = (h - h2).abs();
    let tol = quad.tol * h2.abs().max(H_ZERO);
    if diff > tol {
        return Err(non_convergence("cell weight H", diff, tol));
    }
    Ok(h2)
}

/// H(λ) = ∫_{R₀} |h(z, λ)|² dμ(z), checked against doubled nodes and doubled cutoff.
/// Values below 1e-13 are reported as `NonPositive`: with the twisted kernel H vanishes at
/// λ = (−1, −1).
pub fn h_weight(lam: &TorusPoint, quad: &QuadratureSpec, data: &LatticeData) -> Result<f64> {
    let h = h_weight_checked(lam, quad, data)?;
    if !(h > H_ZERO) {
        return Err(Error::NonPositive(h));
    }
    Ok(h)
}

/// ∫_{T²} H dν by the m × m uniform rule, exact for trigonometric polynomials of degree
/// below m; |h|² has degree 2K, so m > 2K suffices.
pub fn haar_mass(m: usize, quad: &QuadratureSpec, data: &LatticeData) -> Result<f64> {
    let m = m.max(2 * data.k + 2);
    let grid = TorusPoint::grid(m);
    let vals: Vec<Result<f64>> = grid.par_iter().map(|l| h_weight_checked(l, quad, data)).collect();
    let mut s = 0.0;
    for v in vals {
        s += v?;
    }
    Ok(s / (m * m) as f64)
}

/// (∫_{R₀} F h̄ dμ-type numerator, H) at one λ.
type Quotient<'a> = dyn Fn(&TorusPoint, usize, &LatticeData) -> (C64, f64) + Sync + 'a;

fn ring_mean(q: &Quotient<'_>, lam: &TorusPoint, r: f64, n: usize, data: &LatticeData) -> C64 {
    let [t1, t2] = lam.theta();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..RING_POINTS {
        let a = 2.0 * PI * i as f64 / RING_POINTS as f64;
        let (num, den) = q(&TorusPoint::new(t1 + r * a.cos(), t2 + r * a.sin()), n, data);
        s += num / den;
    }
    s / RING_POINTS as f64
}

/// num/H at λ, or where H is numerically zero the continuous extension: ring means at
/// radii ρ and ρ/2 combined to cancel the ρ² term. Returns the value and a bound on the
/// extrapolation error.
fn quotient_value(q: &Quotient<'_>, lam: &TorusPoint, n: usize, data: &LatticeData) -> (C64, f64) {
    let (num, den) = q(lam, n, data);
    if den >= H_FLOOR {
        return (num / den, 0.0);
    }
    let a = ring_mean(q, lam, RING_RADIUS, n, data);
    let b = ring_mean(q, lam, RING_RADIUS / 2.0, n, data);
    ((4.0 * b - a) / 3.0, (a - b).norm() / 3.0)
}

fn certified_quotient(
    q: &Quotient<'_>,
    what: &str,
    lam: &TorusPoint,
    quad: &QuadratureSpec,
    data: &LatticeData,
) -> Result<GelfandValue> {
    let n = quad.nodes_or(DEFAULT_CELL_NODES);
    let (v, e) = quotient_value(q, lam, n, data);
    if !quad.certify {
        return Ok(GelfandValue::new(v, e));
    }
    let (v2, e2) = quotient_value(q, lam, 2 * n, &data.doubled());
    let diff = (v - v2).norm();
    let tol = quad.tol * v2.norm().max(1.0);
    if diff > tol {
        return Err(non_convergence(what, diff, tol));
    }
    Ok(GelfandValue::new(v2, diff + e2))
}

fn symbol_raw(a: &Symbol, lam: &TorusPoint, n: usize, data: &LatticeData) -> (C64, f64) {
    let mut num = C64::new(0.0, 0.0);
    let mut den = 0.0;
    for (z, w) in cell_rule(n) {
        let h2 = lattice_kernel(z, lam, data).norm_sqr() * w;
        num += a.eval(&pt1([z])) * h2;
        den += h2;
    }
    (num, den)
}

/// γ_a(λ) = H(λ)^{-1} ∫_{R₀} a |h|² dμ; only the restriction of a to R₀ is read.
pub fn gelfand_symbol_lattice(a: &Symbol, lam: &TorusPoint, quad: &QuadratureSpec, data: &LatticeData) -> Result<GelfandValue> {
    lattice_d1(a.d())?;
    a.validate()?;
    quad.validate()?;
    certified_quotient(&|l, n, d| symbol_raw(a, l, n, d), "lattice symbol transform", lam, quad, data)
}

/// |∫_{R₀} g_j |h|² dμ − H(λ) λ^{−j}| with g_j the Weyl symbol of w_j, evaluated at doubled
/// nodes and doubled K.
pub fn curious_identity_residual(j: [i64; 2], lam: &TorusPoint, quad: &QuadratureSpec, data: &LatticeData) -> Result<f64> {
    quad.validate()?;
    let wj = LatticeData::generator(j);
    let g = Symbol::WeylSymbol { w: pt1([wj]) };
    let n = quad.nodes_or(DEFAULT_CELL_NODES);
    let (num, den) = symbol_raw(&g, lam, 2 * n, &data.doubled());
    Ok((num - lam.pow_neg(j) * den).norm())
}

/// A k_{−w_k} for all k in the cutoff, reused across λ.
struct LatticeProbe {
    vecs: Vec<([i64; 2], CVector)>,
    n: usize,
}

fn tail_fraction(v: &CVector, n: usize) -> f64 {
    let cut = 5 * n / 6;
    let tot = v.norm_squared();
    if tot == 0.0 {
        return 0.0;
    }
    v.iter().skip(cut + 1).map(|c| c.norm_sqr()).sum::<f64>() / tot
}

fn lattice_probe(a: &TruncatedOperator, data: &LatticeData) -> Result<LatticeProbe> {
    let mut vecs = Vec::new();
    for k in data.indices() {
        let w = -LatticeData::generator(k);
        let v = a.apply(&coherent_state(&pt1([w]), &a.trunc)?);
        // contract probes: k = 0 and the unit shifts ±e_i
        if k[0].abs() + k[1].abs() <= 1 && tail_fraction(&v, a.trunc.n) > DECAY_TOL {
            return Err(Error::InvalidInput(format!(
                "operator violates the finite-rank decay contract: A k_(-w_{:?}) carries {:.2e} of its energy near the cutoff",
                k,
                tail_fraction(&v, a.trunc.n)
            )));
        }
        vecs.push((k, v));
    }
    Ok(LatticeProbe { vecs, n: a.trunc.n })
}

fn operator_raw(p: &LatticeProbe, lam: &TorusPoint, n: usize, data: &LatticeData) -> (C64, f64) {
    // S(λ) = Σ ε_k λ^{−k} A k_{−w_k}
    let mut s = CVector::zeros(p.n + 1);
    for (k, v) in &p.vecs {
        if k[0].unsigned_abs() as usize > data.k || k[1].unsigned_abs() as usize > data.k {
            continue;
        }
        s.axpy(lam.pow_neg(*k) * data.sign(*k), v, C64::new(1.0, 0.0));
    }
    let mut num = C64::new(0.0, 0.0);
    let mut den = 0.0;
    for (z, w) in cell_rule(n) {
        // F(z) = e^{|z|²/2} ⟨S, k_z⟩ = Σ S_α z^α/√α!
        let mut e = C64::new(1.0, 0.0);
        let mut f = s[0];
        for a in 1..=p.n {
            e = e * z / (a as f64).sqrt();
            f += s[a] * e;
        }
        let h = lattice_kernel(z, lam, data);
        num += h.conj() * f * w;
        den += h.norm_sqr() * w;
    }
    (num, den)
}

fn lattice_operator_from_probe(
    p: &LatticeProbe,
    lam: &TorusPoint,
    quad: &QuadratureSpec,
    data: &LatticeData,
) -> Result<GelfandValue> {
    certified_quotient(&|l, n, d| operator_raw(p, l, n, d), "lattice operator transform", lam, quad, data)
}

/// γ_A(λ) = H(λ)^{-1} ∫_{R₀} h̄(z, λ) e^{|z|²/2} Σ_k ε_k ⟨A k_{−w_k}, k_z⟩ λ^{−k} dμ(z).
/// Certified against doubled nodes and doubled K; A must map the probes k_{−w_k} into
/// vectors that decay before the cutoff.
pub fn gelfand_operator_lattice(
    a: &TruncatedOperator,
    lam: &TorusPoint,
    quad: &QuadratureSpec,
    data: &LatticeData,
) -> Result<GelfandValue> {
    lattice_d1(a.trunc.d)?;
    quad.validate()?;
    let pd = if quad.certify { data.doubled() } else { *data };
    let probe = lattice_probe(a, &pd)?;
    lattice_operator_from_probe(&probe, lam, quad, data)
}

pub fn lattice_grid_symbol(
    a: &Symbol,
    grid: &[TorusPoint],
    quad: &QuadratureSpec,
    data: &LatticeData,
) -> Vec<Result<GelfandValue>> {
    grid.par_iter().map(|l| gelfand_symbol_lattice(a, l, quad, data)).collect()
}

/// γ_A over a λ-grid; the probe vectors are built once.
pub fn lattice_grid_operator(
    a: &TruncatedOperator,
    grid: &[TorusPoint],
    quad: &QuadratureSpec,
    data: &LatticeData,
) -> Result<Vec<Result<GelfandValue>>> {
    lattice_d1(a.trunc.d)?;
    quad.validate()?;
    let pd = if quad.certify { data.doubled() } else { *data };
    let probe = lattice_probe(a, &pd)?;
    Ok(grid.par_iter().map(|l| lattice_operator_from_probe(&probe, l, quad, data)).collect())
}
