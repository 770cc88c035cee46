//! Gauss–Hermite and Gauss–Legendre rules.
//!
//! Hermite weights are also returned in compensated log form `ln w + x²`, which stays O(1)
//! for large node counts where `w` itself underflows.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// ln(w_i) + x_i².
    pub log_compensated: Vec<f64>,
}

/// Orthonormal Hermite functions ψ_{n−1}(z), ψ_n(z) by the stable three-term recurrence.
fn hermite_functions(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI.powf(-0.25) * (-0.5 * z * z).exp();
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p2, p1)
}

/// n-point rule for ∫ g(x) e^{−x²} dx, nodes ascending. Roots start from the eigenvalues of
/// the Jacobi matrix and are polished by Newton on the Hermite functions, which also give
/// the weights in compensated form without underflow.
pub fn gauss_hermite(n: usize) -> GaussHermite {
    assert!(n >= 1);
    let nf = n as f64;
    let jac = DMatrix::<f64>::from_fn(n, n, |i, k| {
        if i + 1 == k || k + 1 == i {
            (i.max(k) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut guess: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    guess.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let m = (n + 1) / 2;
    let mut x = vec![0.0; n];
    let mut lc = vec![0.0; n];
    for i in 0..m {
        let mut z = guess[i];
        let mut pp = 0.0;
        for _ in 0..50 {
            let (p2, p1) = hermite_functions(n, z);
            // d/dz of the polynomial part: √(2n) ψ_{n−1}
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                let (p2, _) = hermite_functions(n, z);
                pp = (2.0 * nf).sqrt() * p2;
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        let l = 2f64.ln() - 2.0 * pp.abs().ln();
        lc[i] = l;
        lc[n - 1 - i] = l;
    }
    if n % 2 == 1 {
        x[m - 1] = 0.0;
    }
    x.reverse();
    lc.reverse();
    let weights = x.iter().zip(&lc).map(|(xi, l)| (l - xi * xi).exp()).collect();
    GaussHermite { nodes: x, weights, log_compensated: lc }
}

/// n-point Gauss–Legendre rule on [a, b].
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    let nf = n as f64;
    let (xm, xl) = (0.5 * (b + a), 0.5 * (b - a));
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 {
                break;
            }
        }
        x[i] = xm - xl * z;
        x[n - 1 - i] = xm + xl * z;
        w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss–Legendre: `panels` equal panels of `per_panel` nodes on [a, b].
pub fn composite_legendre(panels: usize, per_panel: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let h = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(panels * per_panel);
    let mut ws = Vec::with_capacity(panels * per_panel);
    for p in 0..panels {
        let (x, w) = gauss_legendre(per_panel, a + p as f64 * h, a + (p + 1) as f64 * h);
        xs.extend(x);
        ws.extend(w);
    }
    (xs, ws)
}

/// Gaussian frame z = center + scale·x for Hermite grids.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussFrame {
    pub center: Vec<num_complex::Complex64>,
    pub scale: f64,
}

/// Quadrature settings shared by the Fock and Gelfand evaluators.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Nodes per axis (Hermite grid, or box rule on the fundamental cell). 0 selects a
    /// default adapted to the truncation.
    pub nodes: usize,
    /// Certify by recomputing with doubled node counts.
    pub certify: bool,
    /// Allowed difference between refinement levels.
    pub tol: f64,
    /// Frame for Hermite grids; `None` picks the symbol's own Gaussian or the standard frame.
    pub frame: Option<GaussFrame>,
    /// Half-width of integration windows for non-Gaussian real-line integrals.
    pub window: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { nodes: 0, certify: true, tol: 1e-8, frame: None, window: 8.0 }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(nodes: usize) -> Self {
        QuadratureSpec { nodes, ..Default::default() }
    }

    pub fn uncertified(mut self) -> Self {
        self.certify = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes != 0 && self.nodes < 4 {
            return Err(Error::InvalidInput("quadrature needs at least 4 nodes per axis".into()));
        }
        if !(self.tol > 0.0) || !(self.window > 0.0) {
            return Err(Error::InvalidInput("quadrature tolerance and window must be positive".into()));
        }
        Ok(())
    }

    pub fn nodes_or(&self, default: usize) -> usize {
        if self.nodes == 0 {
            default
        } else {
            self.nodes
        }
    }
}

pub(crate) fn non_convergence(what: &str, diff: f64, tol: f64) -> Error {
    Error::NonConvergence { what: what.to_string(), diff, tol }
}
