//! The `gaussmech` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 domain or usage error,
//! 3 I/O or parse error. Data goes to stdout as comma-separated values with a
//! header row and LF line endings; warnings and metadata go to stderr.
//!
//! Numbers are printed in shortest round-trip form unless a number of
//! significant digits is requested with `--precision` or the
//! `GAUSSMECH_PRECISION` environment variable.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{evaluate_surface, Axis, GridSpec, Spacing, SurfaceKind};
use crate::calibrate::{self, Method, PrivacyParams, Sensitivity};
use crate::error::Error;
use crate::exact::{self, RootSolveConfig};
use crate::mechanism;

pub const PRECISION_ENV: &str = "GAUSSMECH_PRECISION";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gaussmech", version, about = "Noise calibration for the Gaussian mechanism")]
struct Cli {
    /// Significant digits for printed numbers (default: shortest round-trip).
    #[arg(long, global = true)]
    precision: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the noise scale sigma for (epsilon, delta).
    Calibrate(CalibrateArgs),
    /// Tabulate a comparison surface as CSV.
    Grid(GridArgs),
    /// Check the ordering, floor, oracle and dominance invariants on a grid.
    Verify(VerifyArgs),
    /// Perturb a value or a CSV column with calibrated Gaussian noise.
    Noise(NoiseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Standard,
    ClosedForm,
    Simplified,
    Optimal,
    Analytic,
    All,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Standard => vec![Method::Standard],
            MethodArg::ClosedForm => vec![Method::ClosedForm],
            MethodArg::Simplified => vec![Method::Simplified],
            MethodArg::Optimal => vec![Method::OptimalSufficient],
            MethodArg::Analytic => vec![Method::AnalyticExact],
            MethodArg::All => Method::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Args)]
struct PrivacyArgs {
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    sensitivity: f64,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[command(flatten)]
    privacy: PrivacyArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::All)]
    method: MethodArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SurfaceArg {
    G,
    D,
    R,
    Rho,
    Crossover,
}

impl From<SurfaceArg> for SurfaceKind {
    fn from(s: SurfaceArg) -> Self {
        match s {
            SurfaceArg::G => SurfaceKind::G,
            SurfaceArg::D => SurfaceKind::D,
            SurfaceArg::R => SurfaceKind::R,
            SurfaceArg::Rho => SurfaceKind::Rho,
            SurfaceArg::Crossover => SurfaceKind::Crossover,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpacingArg {
    Linear,
    Log,
}

impl From<SpacingArg> for Spacing {
    fn from(s: SpacingArg) -> Self {
        match s {
            SpacingArg::Linear => Spacing::Linear,
            SpacingArg::Log => Spacing::Log,
        }
    }
}

/// `lo:hi:n` axis syntax.
#[derive(Debug, Clone, Copy, PartialEq)]
struct RangeArg {
    lo: f64,
    hi: f64,
    n: usize,
}

impl FromStr for RangeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("expected lo:hi:n, got '{s}'"));
        };
        let lo = lo.parse().map_err(|_| format!("bad lower bound '{lo}'"))?;
        let hi = hi.parse().map_err(|_| format!("bad upper bound '{hi}'"))?;
        let n = n.parse().map_err(|_| format!("bad point count '{n}'"))?;
        Ok(RangeArg { lo, hi, n })
    }
}

impl RangeArg {
    fn axis(self) -> Result<Axis, Error> {
        Axis::new(self.lo, self.hi, self.n)
    }
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, value_enum)]
    surface: SurfaceArg,
    /// Epsilon axis as lo:hi:n (ignored by rho and crossover).
    #[arg(long, default_value = "0.01:1:50")]
    eps: RangeArg,
    /// Delta axis as lo:hi:n.
    #[arg(long, default_value = "0.01:0.99:50")]
    delta: RangeArg,
    #[arg(long, value_enum, default_value_t = SpacingArg::Linear)]
    spacing: SpacingArg,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value = "0.001:10:30")]
    eps: RangeArg,
    #[arg(long, default_value = "1e-12:0.999:30")]
    delta: RangeArg,
    #[arg(long, value_enum, default_value_t = SpacingArg::Log)]
    spacing: SpacingArg,
    /// Comma-separated sensitivities.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,7")]
    sensitivities: Vec<f64>,
    /// Override the slack of every check.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Debug, Args)]
struct NoiseArgs {
    #[command(flatten)]
    privacy: PrivacyArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::ClosedForm)]
    method: MethodArg,
    /// A single value to perturb.
    #[arg(long, conflicts_with = "input", required_unless_present = "input", allow_hyphen_values = true)]
    value: Option<f64>,
    /// CSV file with a header row.
    #[arg(long = "in", requires = "column")]
    input: Option<PathBuf>,
    /// Column to perturb: 1-based index or header name.
    #[arg(long)]
    column: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn domain(msg: impl Into<String>) -> Self {
        Self { code: EXIT_DOMAIN, message: msg.into() }
    }

    fn io(msg: impl Into<String>) -> Self {
        Self { code: EXIT_IO, message: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::domain(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::io(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

/// Formats a double either in shortest round-trip form or rounded to `digits` significant digits.
pub fn format_number(x: f64, digits: Option<usize>) -> String {
    let x = match digits {
        Some(d) if x.is_finite() && d > 0 => {
            format!("{:.*e}", d - 1, x).parse().unwrap_or(x)
        }
        _ => x,
    };
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Flag(bool),
    Text(String),
    Empty,
}

/// Header plus rows, written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Significant digits; `None` prints shortest round-trip decimals.
    pub precision: Option<usize>,
}

impl OutputTable {
    pub fn new(header: &[&str], precision: Option<usize>) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new(), precision }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row arity must match the header");
        self.rows.push(row);
    }

    pub fn write_csv<W: Write + ?Sized>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => format_number(*x, self.precision),
                    Cell::Flag(b) => if *b { "1" } else { "0" }.to_string(),
                    Cell::Text(s) => s.clone(),
                    Cell::Empty => String::new(),
                })
                .collect();
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_DOMAIN
                }
            };
        }
    };
    let result = resolve_precision(cli.precision).and_then(|precision| match cli.command {
        Command::Calibrate(a) => cmd_calibrate(&a, precision, stdout, stderr),
        Command::Grid(a) => cmd_grid(&a, precision, stdout),
        Command::Verify(a) => cmd_verify(&a, stdout),
        Command::Noise(a) => cmd_noise(&a, precision, stdout, stderr),
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn resolve_precision(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    let p = match flag {
        Some(p) => Some(p),
        None => match std::env::var(PRECISION_ENV) {
            Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
                Failure::domain(format!("{PRECISION_ENV} must be a positive integer, got '{v}'"))
            })?),
            Err(_) => None,
        },
    };
    match p {
        Some(0) => Err(Failure::domain("precision must be at least 1 significant digit")),
        Some(p) if p > 17 => Err(Failure::domain("precision must be at most 17 significant digits")),
        other => Ok(other),
    }
}

fn privacy_inputs(a: &PrivacyArgs, label: Option<Method>) -> Result<(PrivacyParams, Sensitivity), Failure> {
    let suffix = label.map(|m| format!(" for {m}")).unwrap_or_default();
    if !(a.epsilon.is_finite() && a.epsilon > 0.0) {
        return Err(Failure::domain(format!("epsilon must be finite and > 0{suffix}, got {}", a.epsilon)));
    }
    if !(a.delta > 0.0 && a.delta <= 1.0) {
        return Err(Failure::domain(format!("delta must be in (0,1]{suffix}, got {}", a.delta)));
    }
    let params = PrivacyParams::new(a.epsilon, a.delta)?;
    let sens = Sensitivity::new(a.sensitivity)?;
    Ok((params, sens))
}

fn cmd_calibrate(
    a: &CalibrateArgs,
    precision: Option<usize>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let methods = a.method.methods();
    let single = (methods.len() == 1).then(|| methods[0]);
    let (params, sens) = privacy_inputs(&a.privacy, single)?;
    let mut table = OutputTable::new(&["method", "sigma", "z"], precision);
    for m in methods {
        match calibrate::calibrate(m, &params, sens) {
            Ok(r) => {
                if let Some(w) = &r.domain_warning {
                    writeln!(err, "warning: {m}: {w}")?;
                }
                let z = r.z_value.map(Cell::Num).unwrap_or(Cell::Empty);
                table.push(vec![Cell::Text(m.to_string()), Cell::Num(r.sigma), z]);
            }
            Err(e) if single.is_none() => writeln!(err, "skipped {m}: {e}")?,
            Err(e) => return Err(e.into()),
        }
    }
    if table.rows.is_empty() {
        return Err(Failure::domain("no method applies to these parameters"));
    }
    table.write_csv(out)?;
    Ok(EXIT_OK)
}

fn cmd_grid(a: &GridArgs, precision: Option<usize>, stdout: &mut dyn Write) -> CmdResult {
    let kind: SurfaceKind = a.surface.into();
    // the epsilon axis is irrelevant for 1-D surfaces; keep it valid regardless
    let eps = if kind.is_one_dimensional() { Axis::new(1.0, 1.0, 1)? } else { a.eps.axis()? };
    let grid = GridSpec::new(eps, a.delta.axis()?, a.spacing.into())?;
    let points = evaluate_surface(kind, &grid)?;
    let table = if kind.is_one_dimensional() {
        let mut t = OutputTable::new(&["delta", "value"], precision);
        for p in &points {
            t.push(vec![Cell::Num(p.delta), Cell::Num(p.value)]);
        }
        t
    } else {
        let mut t = OutputTable::new(&["epsilon", "delta", "value", "violated"], precision);
        for p in &points {
            t.push(vec![
                Cell::Num(p.epsilon.unwrap_or(0.0)),
                Cell::Num(p.delta),
                Cell::Num(p.value),
                Cell::Flag(p.violated),
            ]);
        }
        t
    };
    match &a.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            table.write_csv(&mut w)?;
            w.flush()?;
        }
        None => table.write_csv(stdout)?,
    }
    Ok(EXIT_OK)
}

/// Result of one invariant check over the verification grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub points: usize,
    /// Largest observed excess over the allowed bound (negative when every point has margin).
    pub max_violation: f64,
    pub tolerance: f64,
    /// First `(epsilon, delta, sensitivity)` at which the check failed.
    pub failure: Option<(f64, f64, f64)>,
}

impl CheckReport {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, points: 0, max_violation: f64::NEG_INFINITY, tolerance, failure: None }
    }

    /// Records one point; `excess > tolerance` (or NaN) is a failure.
    fn record(&mut self, excess: f64, at: (f64, f64, f64)) {
        self.points += 1;
        if excess > self.max_violation || excess.is_nan() {
            self.max_violation = excess;
        }
        if self.failure.is_none() && (excess.is_nan() || excess > self.tolerance) {
            self.failure = Some(at);
        }
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Upper δ limit of the region where the closed-form bound beats the standard one for ε < 1.
const DOMINANCE_DELTA_LIMIT: f64 = 0.946;

/// Runs the cross-module invariants on every `(ε, δ, Δ)` grid point.
///
/// `tolerance` replaces the default slack of every check: relative 1e-12 for
/// the orderings, relative 1e-9 for the bisection oracle and absolute 1e-12
/// for the exact-condition sufficiency. The floor check is strict and takes
/// no slack.
pub fn verify_invariants(
    eps: &[f64],
    deltas: &[f64],
    sensitivities: &[f64],
    tolerance: Option<f64>,
) -> Result<Vec<CheckReport>, Error> {
    let ord_tol = tolerance.unwrap_or(1e-12);
    let oracle_tol = tolerance.unwrap_or(1e-9);
    let abs_tol = tolerance.unwrap_or(1e-12);
    let mut ordering = CheckReport::new("ordering", ord_tol);
    let mut floor = CheckReport::new("floor", 0.0);
    let mut oracle = CheckReport::new("oracle-equivalence", oracle_tol);
    let mut dom_std = CheckReport::new("dominance-standard", ord_tol);
    let mut dom_exact = CheckReport::new("dominance-exact", ord_tol);
    let mut suff = CheckReport::new("sufficiency", abs_tol);
    let cfg = RootSolveConfig::default();

    for &dq in sensitivities {
        let sens = Sensitivity::new(dq)?;
        for &delta in deltas {
            for &e in eps {
                let params = PrivacyParams::new(e, delta)?;
                let at = (e, delta, dq);
                let closed = calibrate::closed_form_sigma(&params, sens)?.sigma;
                let simp = calibrate::simplified_sigma(&params, sens)?.sigma;
                if delta >= 1.0 {
                    ordering.record((closed - simp) / simp, at);
                    continue;
                }
                let opt = calibrate::optimal_sufficient_sigma(&params, sens)?.sigma;
                ordering.record(((opt - closed) / closed).max((closed - simp) / simp), at);
                if dq == 0.0 {
                    continue;
                }
                let fl = calibrate::sigma_floor(&params, sens);
                // strictly above: excess 0 means equality, which fails a zero-slack check
                floor.record(if opt > fl { (fl - opt) / fl } else { f64::INFINITY }, at);

                let bis = exact::solve_sufficient_sigma(&params, sens, &cfg)?;
                oracle.record((bis - opt).abs() / opt, at);

                if e < 1.0 && delta < DOMINANCE_DELTA_LIMIT {
                    let std = calibrate::standard_sigma(&params, sens)?.sigma;
                    dom_std.record((closed - std) / std, at);
                }
                let an = exact::solve_analytic_sigma(&params, sens, &cfg)?.sigma;
                dom_exact.record((an - opt) / opt, at);
                suff.record(exact::balle_lhs(closed, &params, sens)? - delta, at);
            }
        }
    }
    Ok(vec![ordering, floor, oracle, dom_std, dom_exact, suff])
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    if let Some(t) = a.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Failure::domain(format!("tolerance must be finite and >= 0, got {t}")));
        }
    }
    let spacing: Spacing = a.spacing.into();
    let grid = GridSpec::new(a.eps.axis()?, a.delta.axis()?, spacing)?;
    if a.sensitivities.is_empty() {
        return Err(Failure::domain("at least one sensitivity is required"));
    }
    let reports = verify_invariants(
        &grid.eps.points(spacing),
        &grid.delta.points(spacing),
        &a.sensitivities,
        a.tolerance,
    )?;
    let mut all_ok = true;
    for r in &reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        write!(
            out,
            "{status} {}: points={} max_violation={:e} tolerance={:e}",
            r.name, r.points, r.max_violation, r.tolerance
        )?;
        if let Some((e, d, s)) = r.failure {
            write!(
                out,
                " first_failure=(epsilon={}, delta={}, sensitivity={})",
                format_number(e, None),
                format_number(d, None),
                format_number(s, None)
            )?;
            all_ok = false;
        }
        writeln!(out)?;
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn single_method(arg: MethodArg) -> Result<Method, Failure> {
    match arg.methods().as_slice() {
        [m] => Ok(*m),
        _ => Err(Failure::domain("noise needs a single --method")),
    }
}

fn cmd_noise(
    a: &NoiseArgs,
    precision: Option<usize>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    let method = single_method(a.method)?;
    let (params, sens) = privacy_inputs(&a.privacy, Some(method))?;

    let mut sink: Box<dyn Write + '_> = match &a.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(&mut *stdout),
    };

    let output = if let Some(v) = a.value {
        let out = mechanism::calibrate_and_sample(&params, sens, method, &[v], a.seed)?;
        writeln!(sink, "{}", format_number(out.noisy_values[0], precision))?;
        out
    } else {
        let path = a.input.as_ref().expect("clap enforces --value or --in");
        let column = a.column.as_deref().expect("clap enforces --column with --in");
        perturb_csv(path, column, &params, sens, method, a.seed, precision, &mut sink)?
    };
    sink.flush()?;

    if let Some(w) = &output.domain_warning {
        writeln!(stderr, "warning: {method}: {w}")?;
    }
    writeln!(
        stderr,
        "sigma_used={} method={} seed_used={}",
        format_number(output.sigma_used, None),
        method,
        output.seed_used
    )?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn perturb_csv(
    path: &PathBuf,
    column: &str,
    params: &PrivacyParams,
    sens: Sensitivity,
    method: Method,
    seed: Option<u64>,
    precision: Option<usize>,
    sink: &mut dyn Write,
) -> Result<mechanism::NoiseOutput, Failure> {
    let io_err = |e: csv::Error| Failure::io(format!("{}: {e}", path.display()));
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(io_err)?;
    let header = reader.headers().map_err(io_err)?.clone();
    let idx = match column.parse::<usize>() {
        Ok(0) => return Err(Failure::domain("--column index is 1-based")),
        Ok(i) if i <= header.len() => i - 1,
        Ok(i) => return Err(Failure::io(format!("column {i} out of range: file has {} columns", header.len()))),
        Err(_) => header
            .iter()
            .position(|h| h == column)
            .ok_or_else(|| Failure::io(format!("no column named '{column}'")))?,
    };
    let records: Vec<csv::StringRecord> = reader.records().collect::<Result<_, _>>().map_err(io_err)?;
    let values = records
        .iter()
        .enumerate()
        .map(|(row, r)| {
            let cell = r.get(idx).unwrap_or("");
            cell.trim()
                .parse::<f64>()
                .map_err(|_| Failure::io(format!("row {}: cannot parse '{cell}' as a number", row + 1)))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    if values.is_empty() {
        return Err(Failure::io(format!("{}: no data rows", path.display())));
    }

    let out = mechanism::calibrate_and_sample(params, sens, method, &values, seed)?;
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    writer.write_record(&header).map_err(io_err)?;
    for (r, noisy) in records.iter().zip(&out.noisy_values) {
        let row: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(i, f)| if i == idx { format_number(*noisy, precision) } else { f.to_string() })
            .collect();
        writer.write_record(&row).map_err(io_err)?;
    }
    writer.flush()?;
    Ok(out)
}
