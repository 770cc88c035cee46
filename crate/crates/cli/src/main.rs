//! `fockqha`: subgroup algebra, truncated Fock operators, Gelfand grids and the property
//! suites from the command line. Exit codes: 0 ok, 1 a verified property failed, 2 invalid
//! input, 3 precondition violation, 4 numerical failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Serialize;

use fockqha::fock::{
    berezin, conv_fun_op, conv_op_op, fourier_weyl, toeplitz_matrix, weyl_matrix, FockTruncation, Symbol,
    TruncatedOperator,
};
use fockqha::gelfand::{
    gelfand_general, horizontal_grid_operator, horizontal_grid_symbol, lattice_grid_operator, lattice_grid_symbol,
    GelfandPoint, GelfandValue, GeneralInput, ModelFactor, TorusPoint,
};
use fockqha::io::{
    csv_value_columns, fmt17, horizontal_csv, lattice_csv, to_json, ClassificationJson, GroupFile, KernelChoice,
    NormalFormJson, OperatorDump, OutputFormat, RunConfig, SplitJson, SymbolFile,
};
use fockqha::normal_form::lagrangian_normal_form;
use fockqha::properties::{self, Suite};
use fockqha::subgroup::{annihilator, classify, split_vector_discrete};
use fockqha::{Error, PhasePoint, Result};

#[derive(Parser)]
#[command(name = "fockqha", version, about = "Phase-space subgroups, Fock-space operators and Gelfand transforms")]
struct Cli {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

/// Overrides applied on top of `--config`.
#[derive(Args)]
struct ConfigArgs {
    /// TOML file with RunConfig fields (n, nodes, k, tol, certify, format, seed, kernel).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Fock truncation N.
    #[arg(long = "n", short = 'N', global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Lattice series cutoff K.
    #[arg(long = "k", short = 'K', global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Skip the refinement pass that produces error estimates.
    #[arg(long, global = true)]
    no_certify: bool,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    kernel: Option<Kernel>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kernel {
    Plain,
    Twisted,
}

#[derive(Subcommand)]
enum Command {
    /// Closed subgroup operations on a group JSON file.
    Group {
        #[arg(value_enum)]
        action: GroupAction,
        file: PathBuf,
    },
    /// Truncated operators and their transforms.
    Op {
        #[command(subcommand)]
        action: OpAction,
    },
    /// Gelfand transform on a grid, written as CSV.
    Gelfand {
        #[arg(value_enum)]
        case: GelfandCase,
        #[command(flatten)]
        input: GelfandInput,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run the property suites; the report is JSON.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: VerifySuite,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupAction {
    Annihilate,
    Classify,
    NormalForm,
    Split,
}

#[derive(Clone, Copy, ValueEnum)]
enum GelfandCase {
    Horizontal,
    Lattice,
    General,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifySuite {
    Subgroup,
    Fock,
    Gelfand,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum SymbolKind {
    Constant,
    PlaneWave,
    WeylSymbol,
    Gaussian,
}

/// A symbol given inline or by file.
#[derive(Args, Clone, Default)]
struct SymbolArgs {
    #[arg(long, value_enum)]
    symbol: Option<SymbolKind>,
    /// Symbol JSON file.
    #[arg(long, conflicts_with = "symbol")]
    symbol_file: Option<PathBuf>,
    /// Frequency of a plane wave, stacked (x₁..x_d, y₁..y_d).
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    xi: Option<Vec<f64>>,
    /// Shift of a Weyl symbol.
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    w: Option<Vec<f64>>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    center: Option<Vec<f64>>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    value: Option<f64>,
    /// Dimension of a constant symbol.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Subcommand)]
enum OpAction {
    /// Dump of W_z.
    Weyl {
        #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
        z: Vec<f64>,
    },
    /// Dump of T_f.
    Toeplitz {
        #[command(flatten)]
        sym: SymbolArgs,
    },
    /// f ∗ A as a dump, or A ∗ B at the points `--z` when `--op2` is given. A defaults to
    /// the vacuum projection 1⊗1.
    Convolve {
        #[command(flatten)]
        sym: SymbolArgs,
        #[arg(long)]
        op: Option<PathBuf>,
        #[arg(long)]
        op2: Option<PathBuf>,
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        z: Option<Vec<f64>>,
    },
    /// tr(A W_ξ) at one or more frequencies (`--xi` may repeat).
    FourierWeyl {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true, action = clap::ArgAction::Append)]
        xi: Vec<f64>,
    },
    /// ⟨A k_z, k_z⟩ at z, or along z + Σ c_i g_i (|c_i| ≤ steps) over the lattice
    /// generators of `--group`.
    Berezin {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
        z: Vec<f64>,
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        steps: i64,
    },
}

#[derive(Args)]
struct GelfandInput {
    #[arg(long, conflicts_with = "op")]
    symbol_file: Option<PathBuf>,
    /// Operator dump; repeat once per factor in the general case.
    #[arg(long, action = clap::ArgAction::Append)]
    op: Vec<PathBuf>,
    /// Factor models of the general case, e.g. `horizontal,lattice`.
    #[arg(long, value_delimiter = ',', value_enum)]
    parts: Vec<Part>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Part {
    Horizontal,
    Lattice,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    x_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    x_max: f64,
    /// Number of x points.
    #[arg(long, default_value_t = 9)]
    x_steps: usize,
    /// The torus grid is m × m points θ = 2π i / m.
    #[arg(long, default_value_t = 8)]
    torus: usize,
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))
}

fn load_config(a: &ConfigArgs) -> Result<RunConfig> {
    let mut c = match &a.config {
        Some(p) => toml::from_str(&read(p)?).map_err(|e| Error::InvalidInput(format!("config: {e}")))?,
        None => RunConfig::default(),
    };
    if let Some(v) = a.n {
        c.n = v;
    }
    if let Some(v) = a.nodes {
        c.nodes = v;
    }
    if let Some(v) = a.k {
        c.k = v;
    }
    if let Some(v) = a.tol {
        c.tol = v;
    }
    if a.no_certify {
        c.certify = false;
    }
    if let Some(f) = a.format {
        c.format = match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        };
    }
    if let Some(s) = a.seed {
        c.seed = s;
    }
    if let Some(k) = a.kernel {
        c.kernel = match k {
            Kernel::Plain => KernelChoice::Plain,
            Kernel::Twisted => KernelChoice::Twisted,
        };
    }
    c.validate()?;
    Ok(c)
}

fn point(c: &[f64]) -> Result<PhasePoint> {
    if c.is_empty() || c.len() % 2 != 0 {
        return Err(Error::InvalidInput(format!("a phase-space point needs 2d coordinates, got {}", c.len())));
    }
    PhasePoint::new(c.to_vec())
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::InvalidInput(format!("missing --{flag}")))
}

fn symbol(s: &SymbolArgs) -> Result<Option<Symbol>> {
    if let Some(p) = &s.symbol_file {
        return SymbolFile::parse(&read(p)?)?.to_symbol().map(Some);
    }
    let Some(kind) = s.symbol else {
        return Ok(None);
    };
    let file = match kind {
        SymbolKind::Constant => SymbolFile::Constant { d: s.d.unwrap_or(1), value: s.value.unwrap_or(1.0) },
        SymbolKind::PlaneWave => SymbolFile::PlaneWave { xi: need(&s.xi, "xi")? },
        SymbolKind::WeylSymbol => SymbolFile::WeylSymbol { w: need(&s.w, "w")? },
        SymbolKind::Gaussian => SymbolFile::Gaussian {
            center: need(&s.center, "center")?,
            width: s.width.unwrap_or(1.0),
            amplitude: s.value.unwrap_or(1.0),
        },
    };
    file.to_symbol().map(Some)
}

fn operator(p: &Path) -> Result<TruncatedOperator> {
    OperatorDump::parse(&read(p)?)?.to_operator()
}

#[derive(Serialize)]
struct ScalarRow {
    point: Vec<f64>,
    re: f64,
    im: f64,
}

fn scalar_rows(rows: &[(PhasePoint, C64)], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => {
            let v: Vec<ScalarRow> =
                rows.iter().map(|(p, c)| ScalarRow { point: p.as_slice().to_vec(), re: c.re, im: c.im }).collect();
            to_json(&v)
        }
        OutputFormat::Csv => {
            let d = rows.first().map_or(1, |r| r.0.d());
            let mut head: Vec<String> = (1..=d).map(|j| format!("x{j}")).collect();
            head.extend((1..=d).map(|j| format!("y{j}")));
            let mut s = format!("{},re,im\n", head.join(","));
            for (p, c) in rows {
                let coords: Vec<String> = p.as_slice().iter().map(|x| fmt17(*x)).collect();
                s.push_str(&format!("{},{},{}\n", coords.join(","), fmt17(c.re), fmt17(c.im)));
            }
            Ok(s)
        }
    }
}

fn cmd_group(action: GroupAction, file: &Path) -> Result<String> {
    let g = GroupFile::parse(&read(file)?)?.to_group()?;
    match action {
        GroupAction::Annihilate => to_json(&GroupFile::from_group(&annihilator(&g)?)),
        GroupAction::Classify => to_json(&ClassificationJson::from(&classify(&g)?)),
        GroupAction::NormalForm => to_json(&NormalFormJson::from(&lagrangian_normal_form(&g)?)),
        GroupAction::Split => {
            let (v, disc) = split_vector_discrete(&g)?;
            to_json(&SplitJson { vector: GroupFile::from_group(&v), discrete: GroupFile::from_group(&disc) })
        }
    }
}

/// Points z + Σ c_i g_i with |c_i| ≤ steps, in lexicographic order of c.
fn orbit(z: &PhasePoint, gens: &[PhasePoint], steps: i64) -> Vec<PhasePoint> {
    let mut pts = vec![z.clone()];
    for g in gens {
        let mut next = Vec::new();
        for p in &pts {
            for c in -steps..=steps {
                next.push(p + &g.scale(c as f64));
            }
        }
        pts = next;
    }
    pts
}

fn cmd_op(action: &OpAction, cfg: &RunConfig) -> Result<String> {
    let quad = cfg.quad();
    match action {
        OpAction::Weyl { z } => {
            let z = point(z)?;
            let t = FockTruncation::new(z.d(), cfg.n)?;
            to_json(&OperatorDump::from_operator(&weyl_matrix(&z, &t)?))
        }
        OpAction::Toeplitz { sym } => {
            let f = symbol(sym)?.ok_or_else(|| Error::InvalidInput("toeplitz needs --symbol or --symbol-file".into()))?;
            let t = FockTruncation::new(f.d(), cfg.n)?;
            to_json(&OperatorDump::from_operator(&toeplitz_matrix(&f, &t, &quad)?))
        }
        OpAction::Convolve { sym, op, op2, z } => {
            if let Some(b) = op2 {
                let a = operator(op.as_deref().ok_or_else(|| Error::InvalidInput("A ∗ B needs --op and --op2".into()))?)?;
                let b = operator(b)?;
                let zs = z.as_ref().ok_or_else(|| Error::InvalidInput("A ∗ B needs --z".into()))?;
                let d = a.trunc.d;
                if zs.len() % (2 * d) != 0 || zs.is_empty() {
                    return Err(Error::DimensionMismatch { expected: 2 * d, found: zs.len() });
                }
                let rows = zs
                    .chunks(2 * d)
                    .map(|c| {
                        let p = point(c)?;
                        let v = conv_op_op(&a, &b, &p)?;
                        Ok((p, v))
                    })
                    .collect::<Result<Vec<_>>>()?;
                return scalar_rows(&rows, cfg.format);
            }
            let f = symbol(sym)?.ok_or_else(|| Error::InvalidInput("f ∗ A needs --symbol or --symbol-file".into()))?;
            let a = match op {
                Some(p) => operator(p)?,
                None => TruncatedOperator::vacuum_projection(FockTruncation::new(f.d(), cfg.n)?),
            };
            to_json(&OperatorDump::from_operator(&conv_fun_op(&f, &a, &quad)?))
        }
        OpAction::FourierWeyl { op, xi } => {
            let a = operator(op)?;
            let d = a.trunc.d;
            if xi.len() % (2 * d) != 0 {
                return Err(Error::DimensionMismatch { expected: 2 * d, found: xi.len() });
            }
            let rows = xi
                .chunks(2 * d)
                .map(|c| {
                    let p = point(c)?;
                    let v = fourier_weyl(&a, &p)?;
                    Ok((p, v))
                })
                .collect::<Result<Vec<_>>>()?;
            scalar_rows(&rows, cfg.format)
        }
        OpAction::Berezin { op, z, group, steps } => {
            let a = operator(op)?;
            let z = point(z)?;
            if z.d() != a.trunc.d {
                return Err(Error::DimensionMismatch { expected: a.trunc.d, found: z.d() });
            }
            let pts = match group {
                Some(g) => {
                    let g = GroupFile::parse(&read(g)?)?.to_group()?;
                    orbit(&z, g.lattice_gens(), (*steps).max(0))
                }
                None => vec![z],
            };
            let rows = pts
                .into_iter()
                .map(|p| {
                    let v = berezin(&a, &p)?;
                    Ok((p, v))
                })
                .collect::<Result<Vec<_>>>()?;
            scalar_rows(&rows, cfg.format)
        }
    }
}

fn xgrid(g: &GridArgs) -> Result<Vec<f64>> {
    if g.x_steps == 0 || !(g.x_max >= g.x_min) {
        return Err(Error::InvalidInput("x grid needs x_steps >= 1 and x_min <= x_max".into()));
    }
    if g.x_steps == 1 {
        return Ok(vec![g.x_min]);
    }
    let h = (g.x_max - g.x_min) / (g.x_steps - 1) as f64;
    Ok((0..g.x_steps).map(|i| g.x_min + h * i as f64).collect())
}

fn torus(g: &GridArgs) -> Result<Vec<TorusPoint>> {
    if g.torus == 0 {
        return Err(Error::InvalidInput("torus grid needs at least one point per axis".into()));
    }
    Ok(TorusPoint::grid(g.torus))
}

enum Loaded {
    Symbol(Symbol),
    Operators(Vec<TruncatedOperator>),
}

fn load_input(i: &GelfandInput) -> Result<Loaded> {
    if let Some(p) = &i.symbol_file {
        return Ok(Loaded::Symbol(SymbolFile::parse(&read(p)?)?.to_symbol()?));
    }
    if i.op.is_empty() {
        return Err(Error::InvalidInput("gelfand needs --symbol-file or --op".into()));
    }
    Ok(Loaded::Operators(i.op.iter().map(|p| operator(p)).collect::<Result<_>>()?))
}

fn single(ops: &[TruncatedOperator]) -> Result<&TruncatedOperator> {
    match ops {
        [a] => Ok(a),
        _ => Err(Error::InvalidInput(format!("expected one operator dump, got {}", ops.len()))),
    }
}

fn cmd_gelfand(case: GelfandCase, input: &GelfandInput, grid: &GridArgs, cfg: &RunConfig) -> Result<String> {
    let quad = cfg.quad();
    let data = cfg.lattice();
    let loaded = load_input(input)?;
    match case {
        GelfandCase::Horizontal => {
            let xs = xgrid(grid)?;
            let vals: Vec<Result<GelfandValue>> = match &loaded {
                Loaded::Symbol(Symbol::HorizontalProfile(p)) => horizontal_grid_symbol(p, &xs, &quad),
                Loaded::Symbol(_) => {
                    return Err(Error::Unsupported("the horizontal case takes a horizontal profile symbol".into()))
                }
                Loaded::Operators(ops) => horizontal_grid_operator(single(ops)?, &xs, &quad)?.into_iter().map(Ok).collect(),
            };
            Ok(horizontal_csv(&xs.into_iter().zip(vals).collect::<Vec<_>>()))
        }
        GelfandCase::Lattice => {
            let ls = torus(grid)?;
            let vals = match &loaded {
                Loaded::Symbol(s) => lattice_grid_symbol(s, &ls, &quad, &data),
                Loaded::Operators(ops) => lattice_grid_operator(single(ops)?, &ls, &quad, &data)?,
            };
            Ok(lattice_csv(&ls.into_iter().zip(vals).collect::<Vec<_>>()))
        }
        GelfandCase::General => {
            if input.parts.is_empty() {
                return Err(Error::InvalidInput("the general case needs --parts".into()));
            }
            let parts: Vec<ModelFactor> = input
                .parts
                .iter()
                .map(|p| match p {
                    Part::Horizontal => ModelFactor::Horizontal,
                    Part::Lattice => ModelFactor::Lattice,
                })
                .collect();
            let xs = xgrid(grid)?;
            let ls = torus(grid)?;
            // Cartesian product of the factor grids, last factor fastest
            let mut points: Vec<Vec<GelfandPoint>> = vec![vec![]];
            for p in &parts {
                let axis: Vec<GelfandPoint> = match p {
                    ModelFactor::Horizontal => xs.iter().map(|x| GelfandPoint::Horizontal(*x)).collect(),
                    ModelFactor::Lattice => ls.iter().map(|l| GelfandPoint::Lattice(*l)).collect(),
                };
                points = points
                    .into_iter()
                    .flat_map(|pre| {
                        axis.iter().map(move |a| {
                            let mut v = pre.clone();
                            v.push(*a);
                            v
                        })
                    })
                    .collect();
            }
            let gi = match &loaded {
                Loaded::Symbol(s) => GeneralInput::Symbol(s),
                Loaded::Operators(ops) => GeneralInput::Operator(ops),
            };
            let mut head = Vec::new();
            for (j, p) in parts.iter().enumerate() {
                match p {
                    ModelFactor::Horizontal => head.push(format!("x{}", j + 1)),
                    ModelFactor::Lattice => {
                        head.push(format!("theta1_{}", j + 1));
                        head.push(format!("theta2_{}", j + 1));
                    }
                }
            }
            let mut s = format!("{},re,im,est_error,status\n", head.join(","));
            for pt in &points {
                let mut cols = Vec::new();
                for q in pt {
                    match q {
                        GelfandPoint::Horizontal(x) => cols.push(fmt17(*x)),
                        GelfandPoint::Lattice(l) => cols.extend(l.theta().iter().map(|t| fmt17(*t))),
                    }
                }
                let row = gelfand_general(&parts, pt, gi, &quad, &data);
                s.push_str(&format!("{},{}\n", cols.join(","), csv_value_columns(&row)));
            }
            Ok(s)
        }
    }
}

fn cmd_verify(suite: VerifySuite, cfg: &RunConfig) -> Result<(String, bool)> {
    let suites: &[Suite] = match suite {
        VerifySuite::Subgroup => &[Suite::Subgroup],
        VerifySuite::Fock => &[Suite::Fock],
        VerifySuite::Gelfand => &[Suite::Gelfand],
        VerifySuite::All => &[Suite::Subgroup, Suite::Fock, Suite::Gelfand],
    };
    let report = properties::run(suites, cfg);
    Ok((to_json(&report)?, report.passed))
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("FOCKQHA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("FOCKQHA_THREADS must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(Error::InvalidInput("FOCKQHA_THREADS must be positive".into()));
    }
    // fails only if a pool already exists, which cannot happen before this point
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).and_then(|_| so.flush()).map_err(|e| Error::InvalidInput(e.to_string()))
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    configure_threads()?;
    let cfg = load_config(&cli.cfg)?;
    let (text, ok) = match &cli.cmd {
        Command::Group { action, file } => (cmd_group(*action, file)?, true),
        Command::Op { action } => (cmd_op(action, &cfg)?, true),
        Command::Gelfand { case, input, grid } => (cmd_gelfand(*case, input, grid, &cfg)?, true),
        Command::Verify { suite } => cmd_verify(*suite, &cfg)?,
    };
    emit(&cli.out, &text)?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_enumerates_the_box() {
        let z = PhasePoint::new(vec![0.1, 0.2]).unwrap();
        let g = [PhasePoint::new(vec![1.0, 0.0]).unwrap(), PhasePoint::new(vec![0.0, 1.0]).unwrap()];
        let pts = orbit(&z, &g, 1);
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0].as_slice(), &[-0.9, -0.8]);
    }

    #[test]
    fn grids() {
        let g = GridArgs { x_min: -1.0, x_max: 1.0, x_steps: 5, torus: 3 };
        assert_eq!(xgrid(&g).unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(torus(&g).unwrap().len(), 9);
        let bad = GridArgs { x_steps: 0, ..g };
        assert!(xgrid(&bad).is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
