//! File formats: group JSON, symbol JSON, operator dumps, Gelfand CSV grids and the run
//! configuration. Every float is written with 17 significant digits.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::quadrature::QuadratureSpec;
use crate::fock::{CMatrix, FockTruncation, HorizontalProfile, Symbol, TruncatedOperator, C64};
use crate::gelfand::{GelfandValue, LatticeData, LatticeKernel, TorusPoint};
use crate::normal_form::NormalFormResult;
use crate::subgroup::ClassificationReport;
use crate::{ClosedSubgroup, PhasePoint};

/// `{:.16e}`, i.e. 17 significant digits; enough for an exact f64 round trip.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Compact JSON with every float in `{:.16e}` form.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        w.write_all(fmt17(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> std::io::Result<()> {
        self.write_f64(w, v as f64)
    }
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    v.serialize(&mut ser).map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

fn parse_json<'a, T: Deserialize<'a>>(s: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("{what}: {e}")))
}

fn point(c: &[f64], d: usize) -> Result<PhasePoint> {
    if c.len() != 2 * d {
        return Err(Error::DimensionMismatch { expected: 2 * d, found: c.len() });
    }
    PhasePoint::new(c.to_vec())
}

fn one() -> f64 {
    1.0
}

/// `{"d", "vector_basis", "lattice_gens", "scale_t"}`; coordinates stacked (x₁..x_d, y₁..y_d).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub d: usize,
    #[serde(default)]
    pub vector_basis: Vec<Vec<f64>>,
    #[serde(default, alias = "lattice")]
    pub lattice_gens: Vec<Vec<f64>>,
    #[serde(default = "one")]
    pub scale_t: f64,
}

impl GroupFile {
    pub fn parse(s: &str) -> Result<Self> {
        parse_json(s, "group file")
    }

    pub fn to_group(&self) -> Result<ClosedSubgroup> {
        let vb = self.vector_basis.iter().map(|c| point(c, self.d)).collect::<Result<Vec<_>>>()?;
        let lg = self.lattice_gens.iter().map(|c| point(c, self.d)).collect::<Result<Vec<_>>>()?;
        ClosedSubgroup::new(self.d, vb, lg, self.scale_t)
    }

    pub fn from_group(g: &ClosedSubgroup) -> Self {
        let rows = |v: &[PhasePoint]| v.iter().map(|p| p.as_slice().to_vec()).collect();
        GroupFile {
            d: g.d(),
            vector_basis: rows(g.vector_basis()),
            lattice_gens: rows(g.lattice_gens()),
            scale_t: g.scale_t(),
        }
    }

    /// parse → validate → re-serialize.
    pub fn normalize(s: &str) -> Result<String> {
        to_json(&Self::from_group(&Self::parse(s)?.to_group()?))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationJson {
    pub commutative: bool,
    pub coisotropic: bool,
    pub lagrangian: bool,
    pub annihilator: GroupFile,
}

impl From<&ClassificationReport<f64>> for ClassificationJson {
    fn from(r: &ClassificationReport<f64>) -> Self {
        ClassificationJson {
            commutative: r.algebra_commutative,
            coisotropic: r.is_coisotropic,
            lagrangian: r.is_lagrangian,
            annihilator: GroupFile::from_group(&r.annihilator),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalFormJson {
    pub k: usize,
    pub residual: f64,
    pub symplectic_defect: f64,
    /// S row by row.
    pub s: Vec<Vec<f64>>,
    pub change_of_basis: Vec<Vec<i64>>,
}

impl From<&NormalFormResult<f64>> for NormalFormJson {
    fn from(r: &NormalFormResult<f64>) -> Self {
        let m = r.s.matrix();
        NormalFormJson {
            k: r.k,
            residual: r.residual,
            symplectic_defect: r.s.defect(),
            s: (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect(),
            change_of_basis: r.change_of_basis.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitJson {
    pub vector: GroupFile,
    pub discrete: GroupFile,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Constant,
    Cos,
    Plane,
    Sign,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub xi: Vec<f64>,
}

/// Symbol files, tagged by `"type"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolFile {
    Constant { d: usize, value: f64 },
    PlaneWave { xi: Vec<f64> },
    WeylSymbol { w: Vec<f64> },
    Gaussian { center: Vec<f64>, width: f64, #[serde(default = "one")] amplitude: f64 },
    TrigPoly { d: usize, terms: Vec<TermFile> },
    GaussianTrigPoly { center: Vec<f64>, width: f64, terms: Vec<TermFile> },
    Horizontal {
        profile: ProfileKind,
        #[serde(default = "one")]
        c: f64,
        #[serde(default = "one_usize")]
        d: usize,
        #[serde(default)]
        coord: usize,
    },
}

fn one_usize() -> usize {
    1
}

fn pt_any(c: &[f64]) -> Result<PhasePoint> {
    PhasePoint::new(c.to_vec())
}

fn terms(d: usize, t: &[TermFile]) -> Result<Vec<(C64, PhasePoint)>> {
    t.iter().map(|t| Ok((C64::new(t.re, t.im), point(&t.xi, d)?))).collect()
}

impl SymbolFile {
    pub fn parse(s: &str) -> Result<Self> {
        parse_json(s, "symbol file")
    }

    pub fn to_symbol(&self) -> Result<Symbol> {
        let s = match self {
            SymbolFile::Constant { d, value } => Symbol::constant(*d, *value),
            SymbolFile::PlaneWave { xi } => Symbol::PlaneWave { xi: pt_any(xi)? },
            SymbolFile::WeylSymbol { w } => Symbol::WeylSymbol { w: pt_any(w)? },
            SymbolFile::Gaussian { center, width, amplitude } => {
                Symbol::GaussianBump { center: pt_any(center)?, width: *width, amplitude: *amplitude }
            }
            SymbolFile::TrigPoly { d, terms: t } => Symbol::TrigPoly { d: *d, terms: terms(*d, t)? },
            SymbolFile::GaussianTrigPoly { center, width, terms: t } => {
                let c = pt_any(center)?;
                let d = c.d();
                Symbol::GaussianTrigPoly { center: c, width: *width, terms: terms(d, t)? }
            }
            SymbolFile::Horizontal { profile, c, d, coord } => {
                if *d == 0 || coord >= d {
                    return Err(Error::InvalidInput(format!("horizontal profile on coordinate {coord} of d = {d}")));
                }
                let p = match profile {
                    ProfileKind::Constant => HorizontalProfile::constant(*c),
                    ProfileKind::Cos => HorizontalProfile::cos(*c),
                    ProfileKind::Plane => HorizontalProfile::plane(*c),
                    ProfileKind::Sign => HorizontalProfile::sign(),
                };
                Symbol::HorizontalProfile(p.on_coordinate(*d, *coord))
            }
        };
        s.validate()?;
        Ok(s)
    }
}

/// `{"d", "N", "order": "grlex", "data": [[re, im], …]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDump {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub order: String,
    pub data: Vec<[f64; 2]>,
}

pub const INDEX_ORDER: &str = "grlex";

impl OperatorDump {
    pub fn parse(s: &str) -> Result<Self> {
        parse_json(s, "operator dump")
    }

    pub fn from_operator(a: &TruncatedOperator) -> Self {
        let m = &a.mat;
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        OperatorDump { d: a.trunc.d, n: a.trunc.n, order: INDEX_ORDER.to_string(), data }
    }

    pub fn to_operator(&self) -> Result<TruncatedOperator> {
        if self.order != INDEX_ORDER {
            return Err(Error::InvalidInput(format!("unknown basis order {:?}, expected \"grlex\"", self.order)));
        }
        let t = FockTruncation::new(self.d, self.n)?;
        let k = t.size();
        if self.data.len() != k * k {
            return Err(Error::DimensionMismatch { expected: k * k, found: self.data.len() });
        }
        let m = CMatrix::from_fn(k, k, |i, j| {
            let [re, im] = self.data[i * k + j];
            C64::new(re, im)
        });
        TruncatedOperator::new(t, m)
    }
}

/// `re,im,est_error,status` of one grid point. A failure keeps its row: NaN values, the
/// refinement difference when there is one, and the quoted message.
pub fn csv_value_columns(v: &Result<GelfandValue>) -> String {
    let (re, im, e, st) = match v {
        Ok(g) => (g.value.re, g.value.im, g.estimated_error, "ok".to_string()),
        Err(e) => {
            let est = match e {
                Error::NonConvergence { diff, .. } => *diff,
                _ => f64::NAN,
            };
            (f64::NAN, f64::NAN, est, format!("\"{}\"", e.to_string().replace('"', "'")))
        }
    };
    format!("{},{},{},{}", fmt17(re), fmt17(im), fmt17(e), st)
}

/// `theta1,theta2,re,im,est_error,status`; failed points keep their row with NaN values.
pub fn lattice_csv(rows: &[(TorusPoint, Result<GelfandValue>)]) -> String {
    let mut s = String::from("theta1,theta2,re,im,est_error,status\n");
    for (l, v) in rows {
        let [t1, t2] = l.theta();
        s.push_str(&format!("{},{},{}\n", fmt17(t1), fmt17(t2), csv_value_columns(v)));
    }
    s
}

/// `x,re,im,est_error,status`.
pub fn horizontal_csv(rows: &[(f64, Result<GelfandValue>)]) -> String {
    let mut s = String::from("x,re,im,est_error,status\n");
    for (x, v) in rows {
        s.push_str(&format!("{},{}\n", fmt17(*x), csv_value_columns(v)));
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelChoice {
    Plain,
    Twisted,
}

/// Settings shared by all subcommands. Loaded from TOML by the front end, then overridden
/// by flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Fock truncation N (total degree).
    pub n: usize,
    /// Quadrature nodes per axis; 0 picks the evaluator's default.
    pub nodes: usize,
    /// Lattice series cutoff K.
    pub k: usize,
    pub tol: f64,
    pub certify: bool,
    pub format: OutputFormat,
    pub seed: u64,
    pub kernel: KernelChoice,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 60,
            nodes: 0,
            k: 6,
            tol: 1e-8,
            certify: true,
            format: OutputFormat::Json,
            seed: 7,
            kernel: KernelChoice::Twisted,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 || !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidInput("config: N, K and tol must be positive".into()));
        }
        self.quad().validate()
    }

    pub fn quad(&self) -> QuadratureSpec {
        QuadratureSpec { nodes: self.nodes, certify: self.certify, tol: self.tol, ..Default::default() }
    }

    pub fn lattice(&self) -> LatticeData {
        let kernel = match self.kernel {
            KernelChoice::Plain => LatticeKernel::Plain,
            KernelChoice::Twisted => LatticeKernel::Twisted,
        };
        LatticeData { k: self.k, kernel }
    }
}
