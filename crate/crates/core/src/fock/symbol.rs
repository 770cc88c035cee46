//! Closed-form symbols on C^d.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::PhasePoint;

type C64 = Complex64;

/// A real-variable profile a(s) applied to Re z_coord; such symbols are invariant under
/// the imaginary translations z ↦ z + i y e_coord.
#[derive(Clone)]
pub struct HorizontalProfile {
    pub d: usize,
    pub coord: usize,
    pub f: Arc<dyn Fn(f64) -> C64 + Send + Sync>,
    pub description: String,
    /// Jump locations in s; quadrature panels are split there.
    pub breaks: Vec<f64>,
}

impl HorizontalProfile {
    pub fn new(f: impl Fn(f64) -> C64 + Send + Sync + 'static, description: &str) -> Self {
        HorizontalProfile { d: 1, coord: 0, f: Arc::new(f), description: description.to_string(), breaks: vec![] }
    }

    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }

    pub fn on_coordinate(mut self, d: usize, coord: usize) -> Self {
        assert!(coord < d);
        self.d = d;
        self.coord = coord;
        self
    }

    pub fn eval(&self, s: f64) -> C64 {
        (self.f)(s)
    }

    pub fn cos(c: f64) -> Self {
        Self::new(move |s| C64::new((c * s).cos(), 0.0), &format!("cos({c} s)"))
    }

    pub fn plane(c: f64) -> Self {
        Self::new(move |s| C64::new(0.0, c * s).exp(), &format!("exp(i {c} s)"))
    }

    pub fn sign() -> Self {
        Self::new(|s| C64::new(if s > 0.0 { 1.0 } else if s < 0.0 { -1.0 } else { 0.0 }, 0.0), "sign(s)")
            .with_breaks(vec![0.0])
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| C64::new(c, 0.0), &format!("{c}"))
    }
}

impl fmt::Debug for HorizontalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HorizontalProfile({} on Re z_{}, d = {})", self.description, self.coord, self.d)
    }
}

/// General function symbol with an optional Gaussian envelope hint for quadrature.
#[derive(Clone)]
pub struct FunctionSymbol {
    pub d: usize,
    pub f: Arc<dyn Fn(&PhasePoint) -> C64 + Send + Sync>,
    pub description: String,
}

impl fmt::Debug for FunctionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FunctionSymbol({}, d = {})", self.description, self.d)
    }
}

#[derive(Clone, Debug)]
pub enum Symbol {
    /// z ↦ e^{iσ(z, ξ)}.
    PlaneWave { xi: PhasePoint },
    /// g_w(z) = e^{iσ(z, w) + |w|²/2}, the symbol with T_{g_w} = W_w.
    WeylSymbol { w: PhasePoint },
    /// amplitude · e^{−|z − center|² / width²}.
    GaussianBump { center: PhasePoint, width: f64, amplitude: f64 },
    /// Σ c_k e^{iσ(z, ξ_k)}.
    TrigPoly { d: usize, terms: Vec<(C64, PhasePoint)> },
    /// e^{−|z − center|² / width²} · Σ c_k e^{iσ(z, ξ_k)}.
    GaussianTrigPoly { center: PhasePoint, width: f64, terms: Vec<(C64, PhasePoint)> },
    HorizontalProfile(HorizontalProfile),
    Function(FunctionSymbol),
}

fn check_d(expected: usize, p: &PhasePoint) -> Result<()> {
    if p.d() != expected {
        return Err(Error::DimensionMismatch { expected, found: p.d() });
    }
    Ok(())
}

impl Symbol {
    pub fn constant(d: usize, c: f64) -> Self {
        Symbol::TrigPoly { d, terms: vec![(C64::new(c, 0.0), PhasePoint::zero(d))] }
    }

    pub fn gaussian(center: PhasePoint, width: f64) -> Self {
        Symbol::GaussianBump { center, width, amplitude: 1.0 }
    }

    /// Gaussian of total mass 1 with respect to Lebesgue measure.
    pub fn gaussian_mass_one(center: PhasePoint, width: f64) -> Self {
        let d = center.d() as i32;
        let amplitude = 1.0 / (std::f64::consts::PI * width * width).powi(d);
        Symbol::GaussianBump { center, width, amplitude }
    }

    pub fn function(d: usize, f: impl Fn(&PhasePoint) -> C64 + Send + Sync + 'static, description: &str) -> Self {
        Symbol::Function(FunctionSymbol { d, f: Arc::new(f), description: description.to_string() })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Symbol::GaussianBump { width, .. } | Symbol::GaussianTrigPoly { width, .. } if !(*width > 0.0) => {
                Err(Error::InvalidInput("Gaussian width must be positive".into()))
            }
            Symbol::TrigPoly { d, terms } => terms.iter().try_for_each(|(_, xi)| check_d(*d, xi)),
            Symbol::GaussianTrigPoly { center, terms, .. } => {
                terms.iter().try_for_each(|(_, xi)| check_d(center.d(), xi))
            }
            _ => Ok(()),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            Symbol::PlaneWave { xi } => xi.d(),
            Symbol::WeylSymbol { w } => w.d(),
            Symbol::GaussianBump { center, .. } => center.d(),
            Symbol::TrigPoly { d, .. } => *d,
            Symbol::GaussianTrigPoly { center, .. } => center.d(),
            Symbol::HorizontalProfile(h) => h.d,
            Symbol::Function(f) => f.d,
        }
    }

    pub fn description(&self) -> String {
        match self {
            Symbol::HorizontalProfile(h) => h.description.clone(),
            Symbol::Function(f) => f.description.clone(),
            other => format!("{:?}", other),
        }
    }

    fn trig(z: &PhasePoint, terms: &[(C64, PhasePoint)]) -> C64 {
        terms.iter().map(|(c, xi)| c * C64::new(0.0, z.sigma(xi)).exp()).sum()
    }

    pub fn eval(&self, z: &PhasePoint) -> C64 {
        match self {
            Symbol::PlaneWave { xi } => C64::new(0.0, z.sigma(xi)).exp(),
            Symbol::WeylSymbol { w } => C64::new(0.5 * w.norm_sqr(), z.sigma(w)).exp(),
            Symbol::GaussianBump { center, width, amplitude } => {
                C64::new(amplitude * (-(z - center).norm_sqr() / (width * width)).exp(), 0.0)
            }
            Symbol::TrigPoly { terms, .. } => Self::trig(z, terms),
            Symbol::GaussianTrigPoly { center, width, terms } => {
                Self::trig(z, terms) * (-(z - center).norm_sqr() / (width * width)).exp()
            }
            Symbol::HorizontalProfile(h) => h.eval(z.re(h.coord)),
            Symbol::Function(f) => (f.f)(z),
        }
    }

    /// ln(f(z)) − |z|², evaluated without forming overflowing intermediates. `None` where f = 0.
    pub fn ln_times_gauss(&self, z: &PhasePoint) -> Option<C64> {
        let g = -z.norm_sqr();
        match self {
            Symbol::PlaneWave { xi } => Some(C64::new(g, z.sigma(xi))),
            Symbol::WeylSymbol { w } => Some(C64::new(g + 0.5 * w.norm_sqr(), z.sigma(w))),
            Symbol::GaussianBump { center, width, amplitude } => {
                if *amplitude == 0.0 {
                    return None;
                }
                let a = C64::new(*amplitude, 0.0).ln();
                Some(a + g - (z - center).norm_sqr() / (width * width))
            }
            Symbol::GaussianTrigPoly { center, width, terms } => {
                let t = Self::trig(z, terms);
                if t == C64::new(0.0, 0.0) {
                    return None;
                }
                Some(t.ln() + g - (z - center).norm_sqr() / (width * width))
            }
            _ => {
                let v = self.eval(z);
                if v == C64::new(0.0, 0.0) {
                    None
                } else {
                    Some(v.ln() + g)
                }
            }
        }
    }

    /// (center, width) of a Gaussian envelope, if the symbol has one.
    pub fn gaussian_envelope(&self) -> Option<(PhasePoint, f64)> {
        match self {
            Symbol::GaussianBump { center, width, .. } | Symbol::GaussianTrigPoly { center, width, .. } => {
                Some((center.clone(), *width))
            }
            _ => None,
        }
    }

    /// f / envelope for envelope-carrying symbols.
    pub fn over_envelope(&self, z: &PhasePoint) -> C64 {
        match self {
            Symbol::GaussianBump { amplitude, .. } => C64::new(*amplitude, 0.0),
            Symbol::GaussianTrigPoly { terms, .. } => Self::trig(z, terms),
            other => other.eval(z),
        }
    }

    /// Absolutely integrable over C^d.
    pub fn is_integrable(&self) -> bool {
        matches!(self, Symbol::GaussianBump { .. } | Symbol::GaussianTrigPoly { .. })
    }

    /// True when every value is real.
    pub fn is_real(&self) -> bool {
        matches!(self, Symbol::GaussianBump { .. })
    }

    /// The symbol z ↦ f(z − y).
    pub fn translate(&self, y: &PhasePoint) -> Symbol {
        let shift_terms = |terms: &[(C64, PhasePoint)]| -> Vec<(C64, PhasePoint)> {
            terms.iter().map(|(c, xi)| (c * C64::new(0.0, -y.sigma(xi)).exp(), xi.clone())).collect()
        };
        match self {
            Symbol::PlaneWave { xi } => Symbol::TrigPoly {
                d: xi.d(),
                terms: vec![(C64::new(0.0, -y.sigma(xi)).exp(), xi.clone())],
            },
            Symbol::WeylSymbol { w } => Symbol::TrigPoly {
                d: w.d(),
                terms: vec![(C64::new(0.5 * w.norm_sqr(), -y.sigma(w)).exp(), w.clone())],
            },
            Symbol::GaussianBump { center, width, amplitude } => {
                Symbol::GaussianBump { center: center + y, width: *width, amplitude: *amplitude }
            }
            Symbol::TrigPoly { d, terms } => Symbol::TrigPoly { d: *d, terms: shift_terms(terms) },
            Symbol::GaussianTrigPoly { center, width, terms } => {
                Symbol::GaussianTrigPoly { center: center + y, width: *width, terms: shift_terms(terms) }
            }
            other => {
                let f = other.clone();
                let y = y.clone();
                Symbol::function(other.d(), move |z| f.eval(&(z - &y)), &format!("{} shifted", other.description()))
            }
        }
    }

    /// Splits into Σ_t c_t Π_j f_{t,j}(z_j) with one-dimensional factors; `None` if not
    /// available in closed form.
    pub fn factorize(&self) -> Option<Vec<(C64, Vec<Symbol>)>> {
        let d = self.d();
        let one_d = |p: &PhasePoint, j: usize| PhasePoint::new(vec![p.re(j), p.im(j)]).unwrap();
        let waves = |coef: C64, xi: &PhasePoint| -> (C64, Vec<Symbol>) {
            (coef, (0..d).map(|j| Symbol::PlaneWave { xi: one_d(xi, j) }).collect())
        };
        match self {
            Symbol::PlaneWave { xi } => Some(vec![waves(C64::new(1.0, 0.0), xi)]),
            Symbol::WeylSymbol { w } => Some(vec![(
                C64::new(1.0, 0.0),
                (0..d).map(|j| Symbol::WeylSymbol { w: one_d(w, j) }).collect(),
            )]),
            Symbol::GaussianBump { center, width, amplitude } => Some(vec![(
                C64::new(*amplitude, 0.0),
                (0..d).map(|j| Symbol::gaussian(one_d(center, j), *width)).collect(),
            )]),
            Symbol::TrigPoly { terms, .. } => Some(terms.iter().map(|(c, xi)| waves(*c, xi)).collect()),
            Symbol::GaussianTrigPoly { center, width, terms } => Some(
                terms
                    .iter()
                    .map(|(c, xi)| {
                        let f = (0..d)
                            .map(|j| Symbol::GaussianTrigPoly {
                                center: one_d(center, j),
                                width: *width,
                                terms: vec![(C64::new(1.0, 0.0), one_d(xi, j))],
                            })
                            .collect();
                        (*c, f)
                    })
                    .collect(),
            ),
            Symbol::HorizontalProfile(h) => {
                let f = (0..d)
                    .map(|j| {
                        if j == h.coord {
                            Symbol::HorizontalProfile(h.clone().on_coordinate(1, 0))
                        } else {
                            Symbol::constant(1, 1.0)
                        }
                    })
                    .collect();
                Some(vec![(C64::new(1.0, 0.0), f)])
            }
            Symbol::Function(_) if d == 1 => Some(vec![(C64::new(1.0, 0.0), vec![self.clone()])]),
            Symbol::Function(_) => None,
        }
    }
}
