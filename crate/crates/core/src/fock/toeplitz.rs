//! Toeplitz matrices ⟨T_f e_β, e_α⟩ = ∫ f e_β ē_α dμ by Gauss–Hermite grids.
//!
//! Nodes live in a frame z = c + s·u with u on the standard Hermite grid. Each node weight
//! is kept as a complex logarithm, so rows √|w| e_β(z) never overflow, and
//! T = Eᴴ diag(phase) E.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::quadrature::{gauss_hermite, non_convergence, GaussFrame, QuadratureSpec};
use super::symbol::Symbol;
use super::{tensor_product, CMatrix, FockTruncation, TruncatedOperator, C64};
use crate::error::{Error, Result};
use crate::PhasePoint;

const CHUNK: usize = 256;

/// Frame adapted to f·e^{−|z|²}: for a Gaussian envelope of center c and width s the
/// product is a Gaussian of center c/(1+s²) and width s/√(1+s²).
pub(crate) fn toeplitz_frame(f: &Symbol, quad: &QuadratureSpec) -> GaussFrame {
    if let Some((c, s)) = f.gaussian_envelope() {
        let k = 1.0 + s * s;
        return GaussFrame {
            center: (0..c.d()).map(|j| c.component(j) / k).collect(),
            scale: s / k.sqrt(),
        };
    }
    quad.frame.clone().unwrap_or(GaussFrame { center: vec![C64::new(0.0, 0.0); f.d()], scale: 1.0 })
}

/// Largest frequency |ξ| among the oscillatory factors of f.
pub(crate) fn max_frequency(f: &Symbol) -> f64 {
    match f {
        Symbol::PlaneWave { xi } => xi.norm(),
        Symbol::WeylSymbol { w } => w.norm(),
        Symbol::TrigPoly { terms, .. } | Symbol::GaussianTrigPoly { terms, .. } => {
            terms.iter().fold(0.0, |m, (_, xi)| m.max(xi.norm()))
        }
        Symbol::HorizontalProfile(_) => 2.0,
        _ => 0.0,
    }
}

/// Tensor Hermite grid in a frame; `log_w` holds Σ (ln w + x²) over the 2d axes.
struct Grid {
    d: usize,
    points: Vec<PhasePoint>,
    log_w: Vec<f64>,
}

fn hermite_grid(d: usize, nodes: usize, frame: &GaussFrame) -> Grid {
    let gh = gauss_hermite(nodes);
    let total = nodes.pow(2 * d as u32);
    let mut points = Vec::with_capacity(total);
    let mut log_w = Vec::with_capacity(total);
    let mut idx = vec![0usize; 2 * d];
    for _ in 0..total {
        let mut re = Vec::with_capacity(d);
        let mut im = Vec::with_capacity(d);
        let mut lw = 0.0;
        for j in 0..d {
            let (a, b) = (idx[j], idx[d + j]);
            re.push(frame.center[j].re + frame.scale * gh.nodes[a]);
            im.push(frame.center[j].im + frame.scale * gh.nodes[b]);
            lw += gh.log_compensated[a] + gh.log_compensated[b];
        }
        re.extend(im);
        points.push(PhasePoint::new(re).unwrap());
        log_w.push(lw);
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < nodes {
                break;
            }
            *slot = 0;
        }
    }
    Grid { d, points, log_w }
}

fn ln_factorial_halves(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    for k in 1..=n {
        v[k] = v[k - 1] + 0.5 * (k as f64).ln();
    }
    v
}

/// Raw quadrature of ∫ f e_β ē_α dμ over the truncation, no certification.
fn toeplitz_raw(f: &Symbol, trunc: &FockTruncation, nodes: usize, frame: &GaussFrame) -> CMatrix {
    let d = trunc.d;
    let grid = hermite_grid(d, nodes, frame);
    let idx = trunc.indices();
    let size = idx.len();
    let half_lf = ln_factorial_halves(trunc.n);
    let base = 2.0 * d as f64 * frame.scale.ln() - d as f64 * std::f64::consts::PI.ln();
    let n_nodes = grid.points.len();
    let chunks: Vec<(usize, usize)> = (0..n_nodes).step_by(CHUNK).map(|a| (a, (a + CHUNK).min(n_nodes))).collect();
    let partials: Vec<CMatrix> = chunks
        .par_iter()
        .map(|&(a, b)| {
            let mut e = DMatrix::<C64>::zeros(b - a, size);
            let mut phase = vec![C64::new(0.0, 0.0); b - a];
            for (r, n) in (a..b).enumerate() {
                let z = &grid.points[n];
                let lf = match f.ln_times_gauss(z) {
                    Some(v) => v,
                    None => continue,
                };
                let lw = grid.log_w[n] + base + lf.re;
                if lw < -745.0 {
                    continue;
                }
                phase[r] = C64::new(0.0, lf.im).exp();
                // per-coordinate ln|z_j|^a − ½ ln a! and a·arg z_j
                let mut lmag = vec![vec![0.0; trunc.n + 1]; grid.d];
                let mut arg = vec![0.0; grid.d];
                let mut zero = vec![false; grid.d];
                for j in 0..grid.d {
                    let zj = z.component(j);
                    let m = zj.norm();
                    zero[j] = m == 0.0;
                    arg[j] = zj.arg();
                    let lm = if zero[j] { 0.0 } else { m.ln() };
                    for k in 0..=trunc.n {
                        lmag[j][k] = k as f64 * lm - half_lf[k];
                    }
                }
                for (c, al) in idx.iter().enumerate() {
                    let mut l = 0.5 * lw;
                    let mut ph = 0.0;
                    let mut vanish = false;
                    for j in 0..grid.d {
                        if zero[j] && al[j] > 0 {
                            vanish = true;
                            break;
                        }
                        l += lmag[j][al[j]];
                        ph += al[j] as f64 * arg[j];
                    }
                    if !vanish && l > -745.0 {
                        e[(r, c)] = C64::from_polar(l.exp(), ph);
                    }
                }
            }
            let mut de = e.clone();
            for r in 0..de.nrows() {
                let p = phase[r];
                de.row_mut(r).iter_mut().for_each(|v| *v *= p);
            }
            e.adjoint() * de
        })
        .collect();
    let mut t = CMatrix::zeros(size, size);
    for p in partials {
        t += p;
    }
    t
}

fn default_nodes(f: &Symbol, trunc: &FockTruncation, frame: &GaussFrame) -> usize {
    let r = max_frequency(f) * frame.scale;
    trunc.n + 32 + (8.0 * r * r).ceil() as usize
}

fn toeplitz_direct(f: &Symbol, trunc: &FockTruncation, quad: &QuadratureSpec) -> Result<(CMatrix, f64)> {
    let frame = toeplitz_frame(f, quad);
    if frame.center.len() != trunc.d || !(frame.scale > 0.0) {
        return Err(Error::InvalidInput("quadrature frame does not match the symbol".into()));
    }
    let n = quad.nodes_or(default_nodes(f, trunc, &frame));
    let t = toeplitz_raw(f, trunc, n, &frame);
    if !quad.certify {
        return Ok((t, 0.0));
    }
    let t2 = toeplitz_raw(f, trunc, 2 * n, &frame);
    let diff = (&t - &t2).iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let scale = t2.iter().fold(1.0f64, |m, v| m.max(v.norm()));
    if diff > quad.tol * scale {
        return Err(non_convergence("Toeplitz quadrature", diff, quad.tol * scale));
    }
    Ok((t2, diff))
}

/// T_f on the truncation together with the node-doubling difference (0 if uncertified).
/// Factorizable symbols in d ≥ 2 are assembled from one-dimensional factors.
pub fn toeplitz_matrix_certified(
    f: &Symbol,
    trunc: &FockTruncation,
    quad: &QuadratureSpec,
) -> Result<(TruncatedOperator, f64)> {
    f.validate()?;
    quad.validate()?;
    if f.d() != trunc.d {
        return Err(Error::DimensionMismatch { expected: trunc.d, found: f.d() });
    }
    if trunc.d == 1 {
        let (m, e) = toeplitz_direct(f, trunc, quad)?;
        return Ok((TruncatedOperator { trunc: *trunc, mat: m }, e));
    }
    match f.factorize() {
        Some(terms) => {
            let one = FockTruncation { d: 1, n: trunc.n };
            let mut mat = CMatrix::zeros(trunc.size(), trunc.size());
            let mut err = 0.0f64;
            for (c, factors) in terms {
                let mut mats = Vec::with_capacity(factors.len());
                let mut fq = quad.clone();
                fq.frame = None;
                for g in &factors {
                    let (m, e) = toeplitz_direct(g, &one, &fq)?;
                    err = err.max(e);
                    mats.push(m);
                }
                mat += tensor_product(&mats, trunc) * c;
            }
            Ok((TruncatedOperator { trunc: *trunc, mat }, err))
        }
        None => {
            let (m, e) = toeplitz_direct(f, trunc, quad)?;
            Ok((TruncatedOperator { trunc: *trunc, mat: m }, e))
        }
    }
}

/// T_f = P M_f on the truncation, certified by node doubling unless `quad.certify` is off.
pub fn toeplitz_matrix(f: &Symbol, trunc: &FockTruncation, quad: &QuadratureSpec) -> Result<TruncatedOperator> {
    Ok(toeplitz_matrix_certified(f, trunc, quad)?.0)
}
