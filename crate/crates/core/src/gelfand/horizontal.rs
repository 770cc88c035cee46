//! Horizontal case G = iR: symbols and operators become multiplications on L²(R).

use std::f64::consts::PI;

use rayon::prelude::*;

use super::lattice::DECAY_TOL;
use super::{GelfandValue, C64};
use crate::error::{Error, Result};
use crate::fock::quadrature::{composite_legendre, QuadratureSpec};
use crate::fock::{coherent_state, FockTruncation, HorizontalProfile, TruncatedOperator};
use crate::PhasePoint;

const PANELS: usize = 16;
const PER_PANEL: usize = 10;

fn pt(z: C64) -> PhasePoint {
    PhasePoint::from_re_im(&[z.re], &[z.im]).expect("one coordinate")
}

/// Composite Legendre nodes on [a, b] with panel edges forced at the given breaks.
fn split_rule(a: f64, b: f64, breaks: &[f64], panels: usize) -> (Vec<f64>, Vec<f64>) {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|t| *t > a && *t < b).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut edges = vec![a];
    edges.extend(cuts);
    edges.push(b);
    let (mut xs, mut ws) = (Vec::new(), Vec::new());
    for e in edges.windows(2) {
        let p = ((panels as f64) * (e[1] - e[0]) / (b - a)).ceil().max(1.0) as usize;
        let (x, w) = composite_legendre(p, PER_PANEL, e[0], e[1]);
        xs.extend(x);
        ws.extend(w);
    }
    (xs, ws)
}

fn symbol_raw(a: &HorizontalProfile, x: f64, window: f64, panels: usize) -> C64 {
    let r2 = 2f64.sqrt();
    let breaks: Vec<f64> = a.breaks.iter().map(|b| b * r2).collect();
    let (ys, ws) = split_rule(x - window, x + window, &breaks, panels);
    let s: C64 = ys.iter().zip(&ws).map(|(y, w)| a.eval(y / r2) * (w * (-(x - y) * (x - y)).exp())).sum();
    s / PI.sqrt()
}

/// γ_a(x) = π^{-1/2} ∫ a(y/√2) e^{−(x−y)²} dy over |y − x| ≤ quad.window, panels split at
/// the profile's jumps. The estimate is the difference to doubled panels.
pub fn gelfand_symbol_horizontal(a: &HorizontalProfile, x: f64, quad: &QuadratureSpec) -> Result<GelfandValue> {
    quad.validate()?;
    if a.d != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: a.d });
    }
    let p = quad.nodes_or(PANELS * PER_PANEL).div_ceil(PER_PANEL);
    let v = symbol_raw(a, x, quad.window, p);
    if !quad.certify {
        return Ok(GelfandValue::new(v, 0.0));
    }
    let v2 = symbol_raw(a, x, quad.window, 2 * p);
    Ok(GelfandValue::new(v2, (v - v2).norm()))
}

/// m(η) = ∫ ⟨A k_{iη}, k_s⟩ ds on an η-rule, shared by every x.
struct HorizontalProbe {
    eta: Vec<f64>,
    weta: Vec<f64>,
    m: Vec<C64>,
    /// Largest |⟨A k_{iη}, k_s⟩| on the boundary circle.
    edge: f64,
}

/// The (η, s) integral runs over the disk η² + s² ≤ R²: the pairing of truncated coherent
/// states is accurate while |η s| stays well below N, which a square window would break at
/// its corners.
fn probe_raw(a: &TruncatedOperator, radius: f64, panels: usize) -> Result<HorizontalProbe> {
    let (eta, weta) = composite_legendre(panels, PER_PANEL, -radius, radius);
    let rows: Vec<Result<(C64, f64)>> = eta
        .par_iter()
        .map(|e| {
            let v = a.apply(&coherent_state(&pt(C64::new(0.0, *e)), &a.trunc)?);
            let half = (radius * radius - e * e).max(0.0).sqrt();
            let p = ((panels as f64) * half / radius).ceil().max(1.0) as usize;
            let (ss, ws) = composite_legendre(p, PER_PANEL, -half, half);
            let mut m = C64::new(0.0, 0.0);
            let mut edge = 0.0f64;
            for (i, (s, w)) in ss.iter().zip(&ws).enumerate() {
                let val = coherent_state(&pt(C64::new(*s, 0.0)), &a.trunc)?.dotc(&v);
                m += val * *w;
                if i == 0 || i + 1 == ss.len() {
                    edge = edge.max(val.norm());
                }
            }
            Ok((m, edge))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let edge = rows.iter().fold(0.0f64, |acc, r| acc.max(r.1));
    Ok(HorizontalProbe { eta, weta, m: rows.into_iter().map(|r| r.0).collect(), edge })
}

fn eval_probe(p: &HorizontalProbe, x: f64) -> C64 {
    let r2 = 2f64.sqrt();
    let s: C64 = p.eta.iter().zip(&p.weta).zip(&p.m).map(|((e, w), m)| C64::new(0.0, r2 * e * x).exp() * m * *w).sum();
    s * (r2 / (2.0 * PI)) * (0.5 * x * x).exp()
}

fn check_decay(a: &TruncatedOperator) -> Result<()> {
    for e in [-1.0, 0.0, 1.0] {
        let v = a.apply(&coherent_state(&pt(C64::new(0.0, e)), &a.trunc)?);
        let tot = v.norm_squared();
        let cut = 5 * a.trunc.n / 6;
        let tail: f64 = v.iter().skip(cut + 1).map(|c| c.norm_sqr()).sum();
        if tot > 0.0 && tail / tot > DECAY_TOL {
            return Err(Error::InvalidInput(format!(
                "operator violates the finite-rank decay contract: A k_(i{e}) carries {:.2e} of its energy near the cutoff",
                tail / tot
            )));
        }
    }
    Ok(())
}

struct HorizontalPlan {
    coarse: HorizontalProbe,
    fine: Option<HorizontalProbe>,
    window: f64,
}

/// Disk radius R = min(quad.window, √(0.6 N)).
fn operator_window(trunc: &FockTruncation, quad: &QuadratureSpec) -> f64 {
    quad.window.min((0.6 * trunc.n as f64).sqrt())
}

fn plan(a: &TruncatedOperator, quad: &QuadratureSpec) -> Result<HorizontalPlan> {
    if a.trunc.d != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: a.trunc.d });
    }
    quad.validate()?;
    check_decay(a)?;
    let window = operator_window(&a.trunc, quad);
    let p = quad.nodes_or(PANELS * PER_PANEL).div_ceil(PER_PANEL);
    let coarse = probe_raw(a, window, p)?;
    let fine = if quad.certify { Some(probe_raw(a, window, 2 * p)?) } else { None };
    Ok(HorizontalPlan { coarse, fine, window })
}

fn eval_plan(pl: &HorizontalPlan, x: f64) -> GelfandValue {
    let v = eval_probe(&pl.coarse, x);
    let Some(f) = &pl.fine else {
        return GelfandValue::new(v, 0.0);
    };
    let v2 = eval_probe(f, x);
    // mass left outside the window, read off the integrand at its edges
    let pref = (2f64.sqrt() / (2.0 * PI)) * (0.5 * x * x).exp();
    let tail = pref * 2.0 * pl.window * f.edge;
    GelfandValue::new(v2, (v - v2).norm() + tail)
}

/// γ_A(x) = (√2/2π) e^{x²/2} ∫ e^{i√2ηx} ∫ ⟨A k_{iη}, k_s⟩ ds dη.
/// The double integral runs over a disk of radius min(quad.window, √(0.6N)); the estimate
/// adds the panel-doubling difference and the integrand size on the boundary.
pub fn gelfand_operator_horizontal(a: &TruncatedOperator, x: f64, quad: &QuadratureSpec) -> Result<GelfandValue> {
    Ok(eval_plan(&plan(a, quad)?, x))
}

pub fn horizontal_grid_symbol(a: &HorizontalProfile, xs: &[f64], quad: &QuadratureSpec) -> Vec<Result<GelfandValue>> {
    xs.par_iter().map(|x| gelfand_symbol_horizontal(a, *x, quad)).collect()
}

/// γ_A over an x-grid; m(η) is computed once.
pub fn horizontal_grid_operator(a: &TruncatedOperator, xs: &[f64], quad: &QuadratureSpec) -> Result<Vec<GelfandValue>> {
    let pl = plan(a, quad)?;
    Ok(xs.iter().map(|x| eval_plan(&pl, *x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{toeplitz_matrix, weyl_matrix, Symbol};

    fn xgrid() -> Vec<f64> {
        (0..=8).map(|i| -2.0 + 0.5 * i as f64).collect()
    }

    #[test]
    fn symbol_route_closed_forms() {
        let q = QuadratureSpec::default();
        for x in xgrid() {
            let one = gelfand_symbol_horizontal(&HorizontalProfile::constant(1.0), x, &q).unwrap();
            assert!((one.value - 1.0).norm() < 1e-14);
            let c = 1.7;
            let v = gelfand_symbol_horizontal(&HorizontalProfile::plane(c), x, &q).unwrap();
            let want = C64::new(0.0, c * x / 2f64.sqrt()).exp() * (-c * c / 8.0).exp();
            assert!((v.value - want).norm() < 1e-13, "{x}");
        }
        let sg = HorizontalProfile::sign();
        assert!(gelfand_symbol_horizontal(&sg, 0.0, &q).unwrap().value.norm() < 1e-15);
        let a = gelfand_symbol_horizontal(&sg, 0.6, &q).unwrap().value;
        let b = gelfand_symbol_horizontal(&sg, -0.6, &q).unwrap().value;
        assert!((a + b).norm() < 1e-14 && a.re > 0.0 && a.re < 1.0);
    }

    #[test]
    fn operator_route_identity_and_weyl() {
        let t = FockTruncation::new(1, 60).unwrap();
        let q = QuadratureSpec::default();
        let id = horizontal_grid_operator(&TruncatedOperator::identity(t), &xgrid(), &q).unwrap();
        let y0 = 0.8;
        let w = weyl_matrix(&PhasePoint::from_re_im(&[0.0], &[y0]).unwrap(), &t).unwrap();
        let ww = horizontal_grid_operator(&w, &xgrid(), &q).unwrap();
        for ((x, a), b) in xgrid().iter().zip(&id).zip(&ww) {
            assert!((a.value - 1.0).norm() < 1e-6, "{x} {}", a.value);
            let want = C64::new(0.0, -2f64.sqrt() * y0 * x).exp();
            assert!((b.value - want).norm() < 1e-4, "{x} {}", b.value);
            assert!(b.estimated_error < 1e-3);
        }
    }

    #[test]
    fn toeplitz_routes_agree() {
        let t = FockTruncation::new(1, 60).unwrap();
        let q = QuadratureSpec::default();
        let prof = HorizontalProfile::cos(1.3);
        let tm = toeplitz_matrix(&Symbol::HorizontalProfile(prof.clone()), &t, &q).unwrap();
        let op = horizontal_grid_operator(&tm, &xgrid(), &q).unwrap();
        for (x, g) in xgrid().iter().zip(op) {
            let s = gelfand_symbol_horizontal(&prof, *x, &q).unwrap();
            assert!((g.value - s.value).norm() < 1e-4, "{x}");
        }
    }

    #[test]
    fn decay_contract_rejects_top_heavy_operators() {
        let t = FockTruncation::new(1, 30).unwrap();
        let e = TruncatedOperator::basis_vector(t, 30);
        let v = TruncatedOperator::basis_vector(t, 0);
        let a = TruncatedOperator::rank_one(t, &e, &v);
        assert!(matches!(gelfand_operator_horizontal(&a, 0.0, &QuadratureSpec::default()), Err(Error::InvalidInput(_))));
    }
}
