//! Gelfand transforms of the commutative model algebras: the horizontal case on R, the
//! von Neumann lattice √πZ ⊕ √πZ on T², and their tensor products.

mod general;
mod horizontal;
mod lattice;
mod theta;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use general::{gelfand_general, GeneralInput, GelfandPoint, ModelFactor};
pub use horizontal::{gelfand_operator_horizontal, gelfand_symbol_horizontal, horizontal_grid_operator, horizontal_grid_symbol};
pub use lattice::{
    curious_identity_residual, gelfand_operator_lattice, gelfand_symbol_lattice, h_weight, haar_mass,
    lattice_grid_operator, lattice_grid_symbol,
};
pub use theta::{
    h_function, h_twisted, lattice_kernel, predicted_zeros, theta3, theta3_cutoff, theta_product,
    theta_product_crosscheck, v_transform,
};

pub type C64 = Complex64;

/// λ = (e^{iθ₁}, e^{iθ₂}) ∈ T², stored by angles in [0, 2π).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusPoint {
    theta: [f64; 2],
}

fn reduce_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl TorusPoint {
    pub fn new(theta1: f64, theta2: f64) -> Self {
        TorusPoint { theta: [reduce_angle(theta1), reduce_angle(theta2)] }
    }

    /// From unimodular complex numbers; the modulus is ignored.
    pub fn from_lambda(l1: C64, l2: C64) -> Self {
        Self::new(l1.arg(), l2.arg())
    }

    pub fn one() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn theta(&self) -> [f64; 2] {
        self.theta
    }

    pub fn lambda(&self) -> [C64; 2] {
        [C64::from_polar(1.0, self.theta[0]), C64::from_polar(1.0, self.theta[1])]
    }

    /// λ^{−k} computed directly from the angles.
    pub fn pow_neg(&self, k: [i64; 2]) -> C64 {
        let a = (k[0] as f64) * self.theta[0] + (k[1] as f64) * self.theta[1];
        C64::from_polar(1.0, -a)
    }

    /// n × n grid θ_j = 2π i/n, θ₁ major.
    pub fn grid(n: usize) -> Vec<TorusPoint> {
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(Self::new(TAU * i as f64 / n as f64, TAU * j as f64 / n as f64));
            }
        }
        out
    }
}

/// Which series realizes V(1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeKernel {
    /// h(z, λ) = Σ e^{−z w̄_k − |w_k|²/2} λ^{−k}.
    Plain,
    /// The same series with signs (−1)^{k₁k₂}. These make W_{w_j} act on the fibres as
    /// the characters (−1)^{j₁j₂} λ^{−j}; without them the lattice shifts do not act by
    /// multiplication at all.
    Twisted,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeData {
    /// Series cutoff: |k₁|, |k₂| ≤ k.
    pub k: usize,
    pub kernel: LatticeKernel,
}

impl Default for LatticeData {
    fn default() -> Self {
        LatticeData { k: 6, kernel: LatticeKernel::Twisted }
    }
}

impl LatticeData {
    pub fn new(k: usize, kernel: LatticeKernel) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("series cutoff K must be at least 1".into()));
        }
        Ok(LatticeData { k, kernel })
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn doubled(&self) -> Self {
        LatticeData { k: 2 * self.k, kernel: self.kernel }
    }

    /// w_k = √π(k₁ + i k₂).
    pub fn generator(k: [i64; 2]) -> C64 {
        C64::new(k[0] as f64, k[1] as f64) * PI.sqrt()
    }

    /// Bound on the largest omitted term of the series on R₀:
    /// max over max|k_j| = K+1 of e^{π(|k₁| + |k₂|) − π|k|²/2}.
    pub fn tail_bound(&self) -> f64 {
        let k = self.k as f64 + 1.0;
        // worst companion index is ±1
        (PI * (k + 1.0) - PI * (k * k + 1.0) / 2.0).exp()
    }

    pub(crate) fn sign(&self, k: [i64; 2]) -> f64 {
        match self.kernel {
            LatticeKernel::Plain => 1.0,
            LatticeKernel::Twisted => {
                if (k[0] * k[1]).rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    pub(crate) fn indices(&self) -> Vec<[i64; 2]> {
        let k = self.k as i64;
        let mut v = Vec::with_capacity(((2 * k + 1) * (2 * k + 1)) as usize);
        for a in -k..=k {
            for b in -k..=k {
                v.push([a, b]);
            }
        }
        v
    }
}

/// A Gelfand transform value with its refinement-difference error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GelfandValue {
    pub value: C64,
    pub estimated_error: f64,
}

impl GelfandValue {
    pub fn new(value: C64, estimated_error: f64) -> Self {
        GelfandValue { value, estimated_error: estimated_error.abs() }
    }
}
