//! Jacobi ϑ and the lattice kernel h(z, λ) = V(1).

use std::f64::consts::PI;

use super::{LatticeData, LatticeKernel, TorusPoint, C64};
use crate::error::{Error, Result};

/// Below this |h| the theta cross-check reports the absolute deviation.
const ABS_GUARD: f64 = 1e-10;

/// ϑ(w, τ) = Σ_{|m| ≤ K} e^{πi m² τ + 2πi m w}.
pub fn theta3(w: C64, tau: C64, k: usize) -> Result<C64> {
    if !(tau.im > 0.0) {
        return Err(Error::InvalidInput(format!("theta needs Im(tau) > 0, got {}", tau.im)));
    }
    let i = C64::new(0.0, 1.0);
    let mut s = C64::new(0.0, 0.0);
    // symmetric accumulation from the outside in
    for m in (1..=k as i64).rev() {
        let mf = m as f64;
        let q = (i * PI * mf * mf * tau).exp();
        let e = 2.0 * PI * i * mf * w;
        s += q * (e.exp() + (-e).exp());
    }
    Ok(s + 1.0)
}

/// Smallest K with e^{−πK² Im τ + 2πK|Im w|} ≤ tol.
pub fn theta3_cutoff(w: C64, tau: C64, tol: f64) -> Result<usize> {
    if !(tau.im > 0.0) {
        return Err(Error::InvalidInput(format!("theta needs Im(tau) > 0, got {}", tau.im)));
    }
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        if -PI * kf * kf * tau.im + 2.0 * PI * kf * w.im.abs() <= tol.ln() {
            return Ok(k);
        }
        k += 1;
        if k > 100_000 {
            return Err(Error::InvalidInput("theta cutoff does not fit a reasonable series".into()));
        }
    }
}

fn kernel_sum(z: C64, lam: &TorusPoint, data: &LatticeData) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for k in data.indices() {
        let w = LatticeData::generator(k);
        let e = -z * w.conj() - 0.5 * w.norm_sqr();
        s += e.exp() * lam.pow_neg(k) * data.sign(k);
    }
    s
}

/// h(z, λ) = Σ_{|k_j| ≤ K} e^{−z w̄_k − |w_k|²/2} λ^{−k}, the direct double series.
pub fn h_function(z: C64, lam: &TorusPoint, k: usize) -> C64 {
    kernel_sum(z, lam, &LatticeData { k, kernel: LatticeKernel::Plain })
}

/// h_c(z, λ) = Σ (−1)^{k₁k₂} e^{−z w̄_k − |w_k|²/2} λ^{−k}.
pub fn h_twisted(z: C64, lam: &TorusPoint, k: usize) -> C64 {
    kernel_sum(z, lam, &LatticeData { k, kernel: LatticeKernel::Twisted })
}

pub fn lattice_kernel(z: C64, lam: &TorusPoint, data: &LatticeData) -> C64 {
    kernel_sum(z, lam, data)
}

/// ϑ(z₁, i/2) ϑ(z₂, i/2) with z₁ = −(iθ₁ + √π z)/(2πi), z₂ = (i√π z − iθ₂)/(2πi).
pub fn theta_product(z: C64, lam: &TorusPoint, k: usize) -> C64 {
    let i = C64::new(0.0, 1.0);
    let [t1, t2] = lam.theta();
    let sp = PI.sqrt();
    let z1 = -(i * t1 + sp * z) / (2.0 * PI * i);
    let z2 = (i * sp * z - i * t2) / (2.0 * PI * i);
    let tau = C64::new(0.0, 0.5);
    theta3(z1, tau, k).unwrap() * theta3(z2, tau, k).unwrap()
}

/// |h − ϑϑ| / |h|, or the absolute difference where |h| is below a small guard.
pub fn theta_product_crosscheck(z: C64, lam: &TorusPoint, k: usize) -> f64 {
    let h = h_function(z, lam, k);
    let p = theta_product(z, lam, k);
    let d = (h - p).norm();
    if h.norm() < ABS_GUARD {
        d
    } else {
        d / h.norm()
    }
}

/// V(f)(z, λ) = Σ ε_k e^{−z w̄_k − |w_k|²/2} f(z + w_k) λ^{−k}, ε_k the kernel signs.
pub fn v_transform(f: impl Fn(C64) -> C64, z: C64, lam: &TorusPoint, data: &LatticeData) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for k in data.indices() {
        let w = LatticeData::generator(k);
        let e = -z * w.conj() - 0.5 * w.norm_sqr();
        s += e.exp() * f(z + w) * lam.pow_neg(k) * data.sign(k);
    }
    s
}

/// Zeros of the plain h inside the box [re.0, re.1] × [im.0, im.1], from the two theta
/// factors:
/// z = −iθ₁/√π − 2√π m i + √π n + √π(1 − 2i)/2 and z = θ₂/√π + 2√π m + √π n i + √π(2 + i)/2.
pub fn predicted_zeros(lam: &TorusPoint, re: (f64, f64), im: (f64, f64)) -> Vec<C64> {
    let sp = PI.sqrt();
    let [t1, t2] = lam.theta();
    let inside = |z: &C64| z.re >= re.0 && z.re <= re.1 && z.im >= im.0 && z.im <= im.1;
    let span = ((re.1 - re.0).abs() + (im.1 - im.0).abs() + t1.abs() + t2.abs()) / sp + re.0.abs().max(re.1.abs()) / sp
        + im.0.abs().max(im.1.abs()) / sp
        + 4.0;
    let r = span.ceil() as i64;
    let mut out = Vec::new();
    for m in -r..=r {
        for n in -r..=r {
            let (mf, nf) = (m as f64, n as f64);
            let a = C64::new(sp * nf + sp / 2.0, -t1 / sp - 2.0 * sp * mf - sp);
            let b = C64::new(t2 / sp + 2.0 * sp * mf + sp, sp * nf + sp / 2.0);
            for z in [a, b] {
                if inside(&z) {
                    out.push(z);
                }
            }
        }
    }
    out.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    out.dedup_by(|x, y| (*x - *y).norm() < 1e-12);
    out
}
