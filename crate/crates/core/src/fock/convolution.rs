//! QHA convolutions f ∗ A = ∫ f(w) W_w A W_w* dw and A ∗ B, and the symplectic Fourier
//! transform F_σ f(ξ) = π^{-d} ∫ e^{−iσ(ξ,z)} f(z) dz.

use rayon::prelude::*;

use super::quadrature::{gauss_hermite, non_convergence, GaussFrame, QuadratureSpec};
use super::symbol::Symbol;
use super::toeplitz::max_frequency;
use super::{parity_matrix, trace_of_product, weyl_matrix, CMatrix, TruncatedOperator, C64};
use crate::error::{Error, Result};
use crate::PhasePoint;

const CHUNK: usize = 64;

/// Quadrature nodes z_n and weights ω_n with Σ ω_n g(z_n) ≈ ∫ g(z) f(z) dz.
struct WeightedNodes {
    points: Vec<PhasePoint>,
    weights: Vec<C64>,
}

fn frame_nodes(d: usize, nodes: usize, frame: &GaussFrame) -> (Vec<PhasePoint>, Vec<f64>, Vec<f64>) {
    let gh = gauss_hermite(nodes);
    let total = nodes.pow(2 * d as u32);
    let mut pts = Vec::with_capacity(total);
    let mut w = Vec::with_capacity(total);
    let mut lc = Vec::with_capacity(total);
    let mut idx = vec![0usize; 2 * d];
    for _ in 0..total {
        let mut c = vec![0.0; 2 * d];
        let (mut ww, mut ll) = (1.0, 0.0);
        for j in 0..d {
            let (a, b) = (idx[j], idx[d + j]);
            c[j] = frame.center[j].re + frame.scale * gh.nodes[a];
            c[d + j] = frame.center[j].im + frame.scale * gh.nodes[b];
            ww *= gh.weights[a] * gh.weights[b];
            ll += gh.log_compensated[a] + gh.log_compensated[b];
        }
        pts.push(PhasePoint::new(c).unwrap());
        w.push(ww);
        lc.push(ll);
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < nodes {
                break;
            }
            *slot = 0;
        }
    }
    (pts, w, lc)
}

/// Gaussian-envelope symbols integrate in their own frame with exact weights; everything
/// else uses compensated weights in the standard (or user) frame, i.e. it is assumed that
/// the rest of the integrand supplies the Gaussian decay.
fn weighted_nodes(f: &Symbol, nodes: usize, quad: &QuadratureSpec) -> WeightedNodes {
    let d = f.d();
    let s2d = |s: f64| s.powi(2 * d as i32);
    if let Some((c, s)) = f.gaussian_envelope() {
        let frame = GaussFrame { center: (0..d).map(|j| c.component(j)).collect(), scale: s };
        let (pts, w, _) = frame_nodes(d, nodes, &frame);
        let weights = pts.iter().zip(&w).map(|(z, w)| f.over_envelope(z) * (w * s2d(s))).collect();
        return WeightedNodes { points: pts, weights };
    }
    let frame = quad.frame.clone().unwrap_or(GaussFrame { center: vec![C64::new(0.0, 0.0); d], scale: 1.0 });
    let (pts, _, lc) = frame_nodes(d, nodes, &frame);
    let weights = pts.iter().zip(&lc).map(|(z, l)| f.eval(z) * (l.exp() * s2d(frame.scale))).collect();
    WeightedNodes { points: pts, weights }
}

fn check_frame(f: &Symbol, quad: &QuadratureSpec) -> Result<()> {
    if let Some(fr) = &quad.frame {
        if fr.center.len() != f.d() || !(fr.scale > 0.0) {
            return Err(Error::InvalidInput("quadrature frame does not match the symbol".into()));
        }
    }
    Ok(())
}

fn default_conv_nodes(f: &Symbol, a: &TruncatedOperator) -> usize {
    let s = f.gaussian_envelope().map_or(1.0, |(_, s)| s);
    let r = max_frequency(f) * s;
    if f.gaussian_envelope().is_some() {
        // the Gaussian frame resolves W_w A W_w* over a region of radius ~ 5s
        20 + (4.0 * s * (a.trunc.n as f64).sqrt()).ceil() as usize + (8.0 * r * r).ceil() as usize
    } else {
        a.trunc.n + 24 + (8.0 * r * r).ceil() as usize
    }
}

/// Low-rank factors A = X Yᴴ with near-zero singular values dropped. X = A V is formed
/// directly (the library's left singular vectors are unreliable on rank-deficient input);
/// if the reconstruction misses, the trivial factorization A · I is used.
fn low_rank(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.unwrap();
    let smax = svd.singular_values.iter().fold(0.0f64, |m, v| m.max(*v));
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-15 * smax)
        .collect();
    let mut y = CMatrix::zeros(n, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        y.set_column(j, &vt.row(i).adjoint());
    }
    let x = a * &y;
    if (&x * y.adjoint() - a).norm() > 1e-13 * a.norm().max(1.0) {
        return (a.clone(), CMatrix::identity(n, n));
    }
    (x, y)
}

fn conv_raw(f: &Symbol, a: &TruncatedOperator, nodes: usize, quad: &QuadratureSpec) -> Result<CMatrix> {
    let wn = weighted_nodes(f, nodes, quad);
    let (x, y) = low_rank(&a.mat);
    let size = a.size();
    let idx: Vec<usize> = (0..wn.points.len()).filter(|&i| wn.weights[i] != C64::new(0.0, 0.0)).collect();
    let partials: Vec<Result<CMatrix>> = idx
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = CMatrix::zeros(size, size);
            for &i in chunk {
                let w = weyl_matrix(&wn.points[i], &a.trunc)?;
                let wx = &w.mat * &x * wn.weights[i];
                let wy = &w.mat * &y;
                acc += wx * wy.adjoint();
            }
            Ok(acc)
        })
        .collect();
    let mut out = CMatrix::zeros(size, size);
    for p in partials {
        out += p?;
    }
    Ok(out)
}

/// f ∗ A = ∫ f(w) α_w(A) dw with α_w(A) = W_w A W_w*. Certified by node doubling on the
/// inner block |α| ≤ N/2 unless `quad.certify` is off.
pub fn conv_fun_op(f: &Symbol, a: &TruncatedOperator, quad: &QuadratureSpec) -> Result<TruncatedOperator> {
    f.validate()?;
    quad.validate()?;
    check_frame(f, quad)?;
    if f.d() != a.trunc.d {
        return Err(Error::DimensionMismatch { expected: a.trunc.d, found: f.d() });
    }
    let n = quad.nodes_or(default_conv_nodes(f, a));
    let m = conv_raw(f, a, n, quad)?;
    if !quad.certify {
        return Ok(TruncatedOperator { trunc: a.trunc, mat: m });
    }
    let m2 = conv_raw(f, a, 2 * n, quad)?;
    let inner = a.trunc.size_up_to(a.trunc.n / 2);
    let mut diff = 0.0f64;
    let mut scale = 1.0f64;
    for i in 0..inner {
        for k in 0..inner {
            diff = diff.max((m[(i, k)] - m2[(i, k)]).norm());
            scale = scale.max(m2[(i, k)].norm());
        }
    }
    if diff > quad.tol * scale {
        return Err(non_convergence("convolution quadrature", diff, quad.tol * scale));
    }
    Ok(TruncatedOperator { trunc: a.trunc, mat: m2 })
}

/// (A ∗ B)(z) = tr(A W_z U B U W_z*).
pub fn conv_op_op(a: &TruncatedOperator, b: &TruncatedOperator, z: &PhasePoint) -> Result<C64> {
    if a.trunc != b.trunc {
        return Err(Error::DimensionMismatch { expected: a.size(), found: b.size() });
    }
    let w = weyl_matrix(z, &a.trunc)?;
    let u = parity_matrix(&a.trunc);
    let inner = &w.mat * &u.mat * &b.mat * &u.mat * w.mat.adjoint();
    Ok(trace_of_product(&a.mat, &inner))
}

/// Closed form of F_σ for Gaussian-envelope symbols: for f = A e^{−|z−c|²/s²} Σ c_k e^{iσ(z,ξ_k)},
/// F_σ f(ξ) = A s^{2d} Σ c_k e^{−iσ(ξ+ξ_k, c)} e^{−s²|ξ+ξ_k|²}.
pub fn symplectic_fourier_closed_form(f: &Symbol, xi: &PhasePoint) -> Option<C64> {
    let d = f.d() as i32;
    let one = |amp: C64, c: &PhasePoint, s: f64, eta: &PhasePoint| {
        amp * s.powi(2 * d) * C64::new(-s * s * eta.norm_sqr(), -eta.sigma(c)).exp()
    };
    match f {
        Symbol::GaussianBump { center, width, amplitude } => Some(one(C64::new(*amplitude, 0.0), center, *width, xi)),
        Symbol::GaussianTrigPoly { center, width, terms } => {
            Some(terms.iter().map(|(c, k)| one(*c, center, *width, &(xi + k))).sum())
        }
        _ => None,
    }
}

/// F_σ f as a symbol, for a single Gaussian bump: a Gaussian trig polynomial in ξ.
pub fn symplectic_fourier_gaussian(f: &Symbol) -> Option<Symbol> {
    match f {
        Symbol::GaussianBump { center, width, amplitude } => {
            let d = center.d() as i32;
            Some(Symbol::GaussianTrigPoly {
                center: PhasePoint::zero(center.d()),
                width: 1.0 / width,
                terms: vec![(C64::new(amplitude * width.powi(2 * d), 0.0), -center)],
            })
        }
        _ => None,
    }
}

fn fourier_raw(f: &Symbol, xi: &PhasePoint, nodes: usize, quad: &QuadratureSpec) -> C64 {
    let wn = weighted_nodes(f, nodes, quad);
    let c = std::f64::consts::PI.powi(-(f.d() as i32));
    let s: C64 = wn
        .points
        .iter()
        .zip(&wn.weights)
        .map(|(z, w)| w * C64::new(0.0, -xi.sigma(z)).exp())
        .sum();
    s * c
}

/// F_σ f(ξ) by quadrature, certified by node doubling. Gaussian-envelope symbols use their
/// own frame; general function symbols are integrated against the compensated Hermite
/// weights of `quad.frame` and must decay like a Gaussian there. Plane waves, trig
/// polynomials and horizontal profiles are not integrable.
pub fn symplectic_fourier(f: &Symbol, xi: &PhasePoint, quad: &QuadratureSpec) -> Result<C64> {
    f.validate()?;
    quad.validate()?;
    check_frame(f, quad)?;
    if xi.d() != f.d() {
        return Err(Error::DimensionMismatch { expected: f.d(), found: xi.d() });
    }
    let s = match f {
        Symbol::Function(_) => quad.frame.as_ref().map_or(1.0, |fr| fr.scale),
        _ if f.is_integrable() => f.gaussian_envelope().unwrap().1,
        _ => return Err(Error::NotIntegrable(f.description())),
    };
    let r = (xi.norm() + max_frequency(f)) * s;
    let n = quad.nodes_or(24 + (2.0 * r * r).ceil() as usize);
    let v = fourier_raw(f, xi, n, quad);
    if !quad.certify {
        return Ok(v);
    }
    let v2 = fourier_raw(f, xi, 2 * n, quad);
    let diff = (v - v2).norm();
    let tol = quad.tol * v2.norm().max(1.0);
    if diff > tol {
        return Err(non_convergence("symplectic Fourier quadrature", diff, tol));
    }
    Ok(v2)
}

#[cfg(test)]
mod tests {
    use super::super::{coherent_state, fourier_weyl, toeplitz_matrix, FockTruncation};
    use super::*;
    use std::f64::consts::PI;

    fn p(c: &[f64]) -> PhasePoint {
        PhasePoint::new(c.to_vec()).unwrap()
    }

    fn inner_diff(a: &CMatrix, b: &CMatrix, m: usize) -> f64 {
        let mut e = 0.0f64;
        for i in 0..m {
            for k in 0..m {
                e = e.max((a[(i, k)] - b[(i, k)]).norm());
            }
        }
        e
    }

    #[test]
    fn gaussian_fourier_matches_closed_form() {
        let f = Symbol::GaussianBump { center: p(&[0.3, -0.5]), width: 0.7, amplitude: 1.5 };
        for xi in [p(&[0.0, 0.0]), p(&[0.4, 0.9]), p(&[-1.2, 0.3])] {
            let q = symplectic_fourier(&f, &xi, &QuadratureSpec::default()).unwrap();
            let c = symplectic_fourier_closed_form(&f, &xi).unwrap();
            assert!((q - c).norm() < 1e-12);
        }
        // ξ = 0 gives π^{-1} ∫ f = A s²
        let v = symplectic_fourier(&f, &p(&[0.0, 0.0]), &QuadratureSpec::default()).unwrap();
        assert!((v.re - 1.5 * 0.49).abs() < 1e-13);
        assert!(symplectic_fourier(&Symbol::PlaneWave { xi: p(&[1.0, 0.0]) }, &p(&[0.0, 0.0]), &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn fourier_is_an_involution() {
        let f = Symbol::GaussianBump { center: p(&[0.4, 0.1]), width: 0.8, amplitude: 1.0 };
        let g = symplectic_fourier_gaussian(&f).unwrap();
        let quad = QuadratureSpec::default();
        for z in [p(&[0.0, 0.0]), p(&[0.5, -0.3]), p(&[1.0, 0.7])] {
            let ff = symplectic_fourier(&g, &z, &quad).unwrap();
            assert!((ff - f.eval(&z)).norm() < 1e-12);
        }
        // nested: inner transform by quadrature, outer by a Legendre box rule
        let (x, w) = super::super::quadrature::composite_legendre(10, 10, -6.5, 6.5);
        let inner = QuadratureSpec::default().uncertified();
        let z = p(&[0.3, 0.2]);
        let mut acc = C64::new(0.0, 0.0);
        for (a, wa) in x.iter().zip(&w) {
            for (b, wb) in x.iter().zip(&w) {
                let xi = p(&[*a, *b]);
                let v = symplectic_fourier(&f, &xi, &inner).unwrap();
                acc += v * C64::new(0.0, -z.sigma(&xi)).exp() * (wa * wb);
            }
        }
        let e = (acc / PI - f.eval(&z)).norm();
        assert!(e < 1e-10, "{e}");
    }

    #[test]
    fn toeplitz_bridge_gaussian() {
        let t = FockTruncation::new(1, 30).unwrap();
        let f = Symbol::gaussian(p(&[0.2, 0.3]), 0.9);
        let quad = QuadratureSpec::default();
        let c = conv_fun_op(&f, &TruncatedOperator::vacuum_projection(t), &quad).unwrap();
        let tf = toeplitz_matrix(&f, &t, &quad).unwrap().scale(C64::new(PI, 0.0));
        assert!(inner_diff(&c.mat, &tf.mat, t.inner_size(10).unwrap()) < 1e-10);
    }

    #[test]
    fn toeplitz_bridge_trig_poly() {
        let t = FockTruncation::new(1, 30).unwrap();
        let f = Symbol::TrigPoly { d: 1, terms: vec![(C64::new(1.0, 0.0), p(&[0.5, 0.0])), (C64::new(0.0, 0.5), p(&[0.0, -0.8]))] };
        let quad = QuadratureSpec::default();
        let c = conv_fun_op(&f, &TruncatedOperator::vacuum_projection(t), &quad).unwrap();
        let tf = toeplitz_matrix(&f, &t, &quad).unwrap().scale(C64::new(PI, 0.0));
        assert!(inner_diff(&c.mat, &tf.mat, t.inner_size(10).unwrap()) < 1e-9);
    }

    #[test]
    fn narrow_gaussian_is_approximate_identity() {
        let t = FockTruncation::new(1, 20).unwrap();
        let a = weyl_matrix(&p(&[0.3, -0.2]), &t).unwrap();
        let f = Symbol::gaussian_mass_one(p(&[0.0, 0.0]), 0.02);
        let c = conv_fun_op(&f, &a, &QuadratureSpec::default()).unwrap();
        assert!(inner_diff(&c.mat, &a.mat, t.inner_size(8).unwrap()) < 1e-2);
    }

    #[test]
    fn shift_covariance() {
        let t = FockTruncation::new(1, 30).unwrap();
        let a = TruncatedOperator::vacuum_projection(t);
        let f = Symbol::gaussian(p(&[0.1, 0.0]), 0.6);
        let y = p(&[0.4, 0.3]);
        let quad = QuadratureSpec::default();
        let lhs = conv_fun_op(&f.translate(&y), &a, &quad).unwrap();
        let w = weyl_matrix(&y, &t).unwrap();
        let rhs = &w.mat * conv_fun_op(&f, &a, &quad).unwrap().mat * w.mat.adjoint();
        assert!(inner_diff(&lhs.mat, &rhs, t.inner_size(12).unwrap()) < 1e-9);
    }

    #[test]
    fn operator_convolution_examples() {
        let t = FockTruncation::new(1, 40).unwrap();
        let a = TruncatedOperator::vacuum_projection(t);
        assert!((conv_op_op(&a, &a, &p(&[0.0, 0.0])).unwrap() - 1.0).norm() < 1e-15);
        for r in [0.5, 1.0, 1.5] {
            let z = p(&[r, 0.0]);
            let v = conv_op_op(&a, &a, &z).unwrap();
            assert!((v.re - (-r * r as f64).exp()).abs() < 1e-12);
        }
        let b = TruncatedOperator::rank_one(t, &coherent_state(&p(&[0.2, 0.1]), &t).unwrap(), &coherent_state(&p(&[0.2, 0.1]), &t).unwrap());
        let z0 = p(&[0.0, 0.0]);
        let ab = conv_op_op(&a, &b, &z0).unwrap();
        let ba = conv_op_op(&b, &a, &z0).unwrap();
        assert!((ab - ba).norm() < 1e-12);
    }

    #[test]
    fn convolution_theorem_ratio_is_constant() {
        let t = FockTruncation::new(1, 40).unwrap();
        let a = TruncatedOperator::vacuum_projection(t);
        let f = Symbol::gaussian(p(&[0.0, 0.0]), 0.7);
        let quad = QuadratureSpec::default();
        let c = conv_fun_op(&f, &a, &quad).unwrap();
        for xi in [p(&[0.3, 0.0]), p(&[-0.5, 0.8]), p(&[1.0, 1.0])] {
            let r = fourier_weyl(&c, &xi).unwrap()
                / (symplectic_fourier(&f, &xi, &quad).unwrap() * fourier_weyl(&a, &xi).unwrap());
            assert!((r - PI).norm() < 1e-9, "{r}");
        }
    }
}
