//! Tensor products of the one-dimensional models, one factor per coordinate.

use super::horizontal::{gelfand_operator_horizontal, gelfand_symbol_horizontal};
use super::lattice::{gelfand_operator_lattice, gelfand_symbol_lattice};
use super::{GelfandValue, LatticeData, TorusPoint, C64};
use crate::error::{Error, Result};
use crate::fock::quadrature::QuadratureSpec;
use crate::fock::{HorizontalProfile, Symbol, TruncatedOperator};
use crate::PhasePoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelFactor {
    Horizontal,
    Lattice,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GelfandPoint {
    Horizontal(f64),
    Lattice(TorusPoint),
}

#[derive(Clone, Copy, Debug)]
pub enum GeneralInput<'a> {
    /// A symbol on C^d with a closed-form product splitting.
    Symbol(&'a Symbol),
    /// An elementary tensor A₁ ⊗ … ⊗ A_d, one truncated operator per coordinate.
    Operator(&'a [TruncatedOperator]),
}

/// Reads a one-dimensional factor as a profile of Re z; the factor must be invariant under
/// imaginary translations for this to be meaningful.
fn as_profile(f: &Symbol) -> HorizontalProfile {
    match f {
        Symbol::HorizontalProfile(h) => h.clone(),
        other => {
            let g = other.clone();
            let desc = g.description();
            HorizontalProfile::new(move |s| g.eval(&PhasePoint::new(vec![s, 0.0]).expect("one coordinate")), &desc)
        }
    }
}

fn factor_value(
    part: ModelFactor,
    point: &GelfandPoint,
    sym: Option<&Symbol>,
    op: Option<&TruncatedOperator>,
    quad: &QuadratureSpec,
    data: &LatticeData,
) -> Result<GelfandValue> {
    match (part, point) {
        (ModelFactor::Horizontal, GelfandPoint::Horizontal(x)) => match (sym, op) {
            (Some(s), _) => gelfand_symbol_horizontal(&as_profile(s), *x, quad),
            (_, Some(a)) => gelfand_operator_horizontal(a, *x, quad),
            _ => unreachable!(),
        },
        (ModelFactor::Lattice, GelfandPoint::Lattice(l)) => match (sym, op) {
            (Some(s), _) => gelfand_symbol_lattice(s, l, quad, data),
            (_, Some(a)) => gelfand_operator_lattice(a, l, quad, data),
            _ => unreachable!(),
        },
        (p, q) => Err(Error::InvalidInput(format!("point {q:?} does not belong to a {p:?} factor"))),
    }
}

/// Product of the per-coordinate values Π_j γ^{(j)}; products of sums are expanded term by
/// term. The error estimate is first order in the factor errors.
pub fn gelfand_general(
    parts: &[ModelFactor],
    point: &[GelfandPoint],
    input: GeneralInput<'_>,
    quad: &QuadratureSpec,
    data: &LatticeData,
) -> Result<GelfandValue> {
    let d = parts.len();
    if d == 0 {
        return Err(Error::InvalidInput("at least one factor is required".into()));
    }
    if point.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: point.len() });
    }
    let product = |vals: &[GelfandValue]| -> (C64, f64) {
        let v: C64 = vals.iter().map(|g| g.value).product();
        let mut e = 0.0;
        for (j, g) in vals.iter().enumerate() {
            let others: f64 = vals.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, h)| h.value.norm()).product();
            e += g.estimated_error * others;
        }
        (v, e)
    };
    match input {
        GeneralInput::Symbol(s) => {
            if s.d() != d {
                return Err(Error::DimensionMismatch { expected: d, found: s.d() });
            }
            let terms = s
                .factorize()
                .ok_or_else(|| Error::Unsupported(format!("symbol {} has no product splitting", s.description())))?;
            let mut total = C64::new(0.0, 0.0);
            let mut err = 0.0;
            for (c, fs) in terms {
                let vals = (0..d)
                    .map(|j| factor_value(parts[j], &point[j], Some(&fs[j]), None, quad, data))
                    .collect::<Result<Vec<_>>>()?;
                let (v, e) = product(&vals);
                total += c * v;
                err += c.norm() * e;
            }
            Ok(GelfandValue::new(total, err))
        }
        GeneralInput::Operator(ops) => {
            if ops.len() != d {
                return Err(Error::Unsupported(format!(
                    "operator input must be an elementary tensor of {d} one-dimensional factors, got {}",
                    ops.len()
                )));
            }
            if let Some(a) = ops.iter().find(|a| a.trunc.d != 1) {
                return Err(Error::Unsupported(format!(
                    "tensor factors must act on one coordinate, got a d = {} factor",
                    a.trunc.d
                )));
            }
            let vals = (0..d)
                .map(|j| factor_value(parts[j], &point[j], None, Some(&ops[j]), quad, data))
                .collect::<Result<Vec<_>>>()?;
            let (v, e) = product(&vals);
            Ok(GelfandValue::new(v, e))
        }
    }
}
