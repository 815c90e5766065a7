//! The `mcu-synth` command line.
//!
//! Exit codes: 0 success, 1 verification failed, 2 invalid input.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use crate::circuit::{counts, emit_json, emit_qasm, merge_pass, parse_json, Circuit};
use crate::error::{Error, Result};
use crate::exp_synth::exp_synthesize_with;
use crate::oracle::{dense_cap, equiv_cnu_exhaustive, equiv_sampled_with, Equivalence, SampleOptions, VerifyOptions};
use crate::poly_synth::{poly_synthesize_with, ToffoliPolicy};
use crate::qmath::{named_gate, Mat2, Unitary2, C64};
use crate::reporting::{self, Metric, Scheme, TableOptions};

/// Default `auto` threshold: exponential up to this `n`. The measured
/// crossover is `n = 10`; the stated claim is `n > 8`.
pub const AUTO_THRESHOLD: usize = 9;

/// A one-qubit gate given on the command line.
///
/// Accepted forms: a name (`X`, `H`, `T`, ...), a rotation with an angle
/// in radians (`rz(pi/4)`, `phase(-0.5)`, `ry(3pi/8)`), `random(SEED)`,
/// or `file:PATH` holding a JSON matrix `[[[re,im],[re,im]],[[re,im],[re,im]]]`.
///
/// ```
/// use mcu_synth::cli::UnitarySpec;
/// let s: UnitarySpec = "rz(pi/4)".parse().unwrap();
/// assert_eq!(s, UnitarySpec::Parameterized("rz".into(), std::f64::consts::FRAC_PI_4));
/// assert!("rz(pi/0)".parse::<UnitarySpec>().is_err());
/// ```
#[derive(Clone, Debug, PartialEq)]
pub enum UnitarySpec {
    Named(String),
    Parameterized(String, f64),
    Random(u64),
    File(PathBuf),
}

fn bad_spec(s: &str, why: &str) -> Error {
    Error::GateParameter { name: s.to_string(), reason: why.to_string() }
}

/// Parses `[±][coef][*]pi[/den]` or a plain float.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(x) = t.parse::<f64>() {
        return if x.is_finite() { Ok(x) } else { Err(bad_spec(s, "angle must be finite")) };
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (t.as_str(), None),
    };
    let Some(coef) = num.strip_suffix("pi") else {
        return Err(bad_spec(s, "expected a number or a multiple of pi"));
    };
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad_spec(s, "bad coefficient of pi"))?,
    };
    let d = match den {
        None => 1.0,
        Some(d) => d.parse::<f64>().map_err(|_| bad_spec(s, "bad denominator"))?,
    };
    let x = c * std::f64::consts::PI / d;
    if d == 0.0 || !x.is_finite() {
        return Err(bad_spec(s, "angle must be finite"));
    }
    Ok(x)
}

impl FromStr for UnitarySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<UnitarySpec> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(UnitarySpec::File(PathBuf::from(path)));
        }
        let Some((name, rest)) = s.split_once('(') else {
            return Ok(UnitarySpec::Named(s.to_string()));
        };
        let arg = rest.strip_suffix(')').ok_or_else(|| bad_spec(s, "missing `)`"))?;
        if name == "random" {
            let seed = arg.trim().parse::<u64>().map_err(|_| bad_spec(s, "seed must be a non-negative integer"))?;
            return Ok(UnitarySpec::Random(seed));
        }
        Ok(UnitarySpec::Parameterized(name.to_string(), parse_angle(arg)?))
    }
}

fn read_matrix(path: &Path) -> Result<Unitary2> {
    let text = std::fs::read_to_string(path)?;
    let m: [[[f64; 2]; 2]; 2] = serde_json::from_str(&text)?;
    let e = |p: [f64; 2]| C64::new(p[0], p[1]);
    Unitary2::with_tol(Mat2::new(e(m[0][0]), e(m[0][1]), e(m[1][0]), e(m[1][1])), 1e-10)
}

impl UnitarySpec {
    pub fn resolve(&self) -> Result<Unitary2> {
        match self {
            UnitarySpec::Named(n) => named_gate(n, None),
            UnitarySpec::Parameterized(n, a) => named_gate(n, Some(*a)),
            UnitarySpec::Random(seed) => Ok(crate::qmath::random_unitary(*seed)),
            UnitarySpec::File(p) => read_matrix(p),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "mcu-synth", version, about = "Synthesize n-qubit controlled-U gates into CNOT and one-qubit gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Exp,
    Poly,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ToffoliArg {
    Cmps,
    Exact,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VerifyArg {
    Dense,
    Sampled,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Dense,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Cnot,
    Total,
}

#[derive(clap::Args, Debug)]
struct CheckArgs {
    /// Random trials for sampled checks.
    #[arg(long, default_value_t = 32)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance; defaults to 1e-9 for dense checks and 1e-8 for sampled.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize C^n(U), check it, print its counts and optionally write it.
    Synth {
        /// Number of wires, controls plus target.
        #[arg(long)]
        n: usize,
        /// The gate U: a name, rz(pi/4)-style rotation, random(SEED) or file:PATH.
        #[arg(long)]
        u: String,
        /// `auto` picks exp for n <= --auto-threshold, else poly.
        #[arg(long, value_enum, default_value = "auto")]
        scheme: SchemeArg,
        /// Exp up to this n under `--scheme auto`. Measured crossover is 10; the stated claim is n > 8.
        #[arg(long, default_value_t = AUTO_THRESHOLD)]
        auto_threshold: usize,
        /// Lower to CNOT and one-qubit gates.
        #[arg(long)]
        flatten: bool,
        /// Run the merge pass (flattened circuits only).
        #[arg(long)]
        merge: bool,
        /// Use the aggressive merge pass.
        #[arg(long)]
        aggressive: bool,
        /// Toffoli lowering: 3-CNOT everywhere, exact everywhere, or the licensed default.
        #[arg(long, value_enum, default_value = "auto")]
        toffoli: ToffoliArg,
        /// Write the circuit; `.qasm` selects OpenQASM, anything else JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Final check; default dense for n <= 11, sampled above.
        #[arg(long, value_enum)]
        verify: Option<VerifyArg>,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Check a JSON circuit against C^n(U).
    Verify {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        u: String,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Compare measured counts of both schemes with the closed-form formulas.
    Table {
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[arg(long, default_value = "H")]
        u: String,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        /// Crossover metric; both when omitted.
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
    },
}

/// Why a command stopped.
enum Failure {
    Invalid(Error),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Verification(m) => Failure::Mismatch(m),
            e => Failure::Invalid(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Invalid(e.into())
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn check(c: &Circuit, n: usize, u: &Unitary2, dense: bool, a: &CheckArgs) -> Result<(&'static str, Equivalence)> {
    if dense {
        let cap = dense_cap();
        if n > cap {
            return Err(Error::DenseCap { n, cap });
        }
        Ok(("dense", equiv_cnu_exhaustive(c, n, u, a.tol.unwrap_or(1e-9))?))
    } else {
        let opts = SampleOptions { trials: a.trials, seed: a.seed, tol: a.tol.unwrap_or(1e-8), ..Default::default() };
        Ok(("sampled", equiv_sampled_with(c, n, u, &opts)?))
    }
}

fn report_check(out: &mut dyn Write, method: &str, r: &Equivalence) -> CmdResult {
    writeln!(
        out,
        "verify: {method}, max deviation {:.3e}, {}",
        r.max_dev,
        if r.equal { "equivalent" } else { "NOT equivalent" }
    )?;
    if r.equal {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("{method} check: max deviation {:.3e}", r.max_dev)))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_synth(
    out: &mut dyn Write,
    n: usize,
    u: &str,
    scheme: SchemeArg,
    auto_threshold: usize,
    flatten: bool,
    merge: bool,
    aggressive: bool,
    toffoli: ToffoliArg,
    path: Option<&Path>,
    verify: Option<VerifyArg>,
    a: &CheckArgs,
) -> CmdResult {
    let u = u.parse::<UnitarySpec>()?.resolve()?;
    let scheme = match scheme {
        SchemeArg::Exp => Scheme::Exp,
        SchemeArg::Poly => Scheme::Poly,
        SchemeArg::Auto if n <= auto_threshold => Scheme::Exp,
        SchemeArg::Auto => Scheme::Poly,
    };
    let policy = match toffoli {
        ToffoliArg::Cmps => ToffoliPolicy::Cmps,
        ToffoliArg::Exact => ToffoliPolicy::Exact,
        ToffoliArg::Auto => ToffoliPolicy::Auto,
    };
    let lib_merge = merge && aggressive;
    let internal = VerifyOptions::default();
    let synth = match scheme {
        Scheme::Exp => exp_synthesize_with(n, &u, flatten, lib_merge, &internal)?,
        Scheme::Poly => poly_synthesize_with(n, &u, policy, flatten, lib_merge, &internal)?,
    };
    let mut circuit = synth.circuit;
    if merge && !aggressive && flatten {
        circuit = merge_pass(&circuit, false)?;
    }
    writeln!(out, "scheme: {scheme}, n = {n}")?;
    for note in &synth.notes {
        writeln!(out, "note: {note}")?;
    }
    let r = counts(&circuit);
    writeln!(
        out,
        "counts: cnot={} one_qubit={} toffoli={} controlled_u={}",
        r.cnot, r.one_qubit, r.toffoli, r.controlled_u
    )?;
    let mode = verify.unwrap_or(if n <= 11 { VerifyArg::Dense } else { VerifyArg::Sampled });
    let checked = match mode {
        VerifyArg::None => Ok(()),
        m => {
            let (method, res) = check(&circuit, n, &u, m == VerifyArg::Dense, a)?;
            report_check(out, method, &res)
        }
    };
    if let Some(p) = path {
        let text = if p.extension().is_some_and(|e| e == "qasm") { emit_qasm(&circuit)? } else { emit_json(&circuit)? };
        std::fs::write(p, text)?;
    }
    checked
}

fn cmd_verify(out: &mut dyn Write, path: &Path, n: usize, u: &str, mode: Option<ModeArg>, a: &CheckArgs) -> CmdResult {
    let u = u.parse::<UnitarySpec>()?.resolve()?;
    let text = std::fs::read_to_string(path)?;
    let c = parse_json(&text)?;
    if c.n() != n {
        return Err(Failure::Invalid(Error::WidthMismatch { left: c.n(), right: n }));
    }
    let dense = match mode {
        Some(m) => m == ModeArg::Dense,
        None => n <= 11,
    };
    let (method, res) = check(&c, n, &u, dense, a)?;
    report_check(out, method, &res)
}

fn cmd_table(
    out: &mut dyn Write,
    err: &mut dyn Write,
    n_min: usize,
    n_max: usize,
    u: &str,
    format: FormatArg,
    metric: Option<MetricArg>,
) -> CmdResult {
    if n_min == 0 || n_min > n_max || n_max > crate::exp_synth::MAX_N {
        return Err(Failure::Invalid(Error::OutOfRange {
            what: "table range",
            value: if n_min == 0 { 0 } else { n_max as i64 },
            allowed: format!("1 <= n-min <= n-max <= {}", crate::exp_synth::MAX_N),
        }));
    }
    let opts = TableOptions { u: u.parse::<UnitarySpec>()?.resolve()?, ..Default::default() };
    let rows = reporting::comparison_table(n_min..=n_max, &opts)?;
    let metrics = match metric {
        Some(MetricArg::Cnot) => vec![Metric::Cnot],
        Some(MetricArg::Total) => vec![Metric::Total],
        None => vec![Metric::Cnot, Metric::Total],
    };
    let mut summary = String::new();
    for m in metrics {
        summary.push_str(&reporting::render_crossover(&reporting::crossover(&rows, m)));
        summary.push('\n');
    }
    summary.push_str("errata:\n");
    summary.push_str(&reporting::render_errata(&reporting::errata(&rows)));
    match format {
        FormatArg::Csv => {
            reporting::write_csv(&rows, &mut *out)?;
            err.write_all(summary.as_bytes())?;
        }
        FormatArg::Text => {
            out.write_all(reporting::render_text(&rows).as_bytes())?;
            writeln!(out)?;
            out.write_all(summary.as_bytes())?;
        }
    }
    Ok(())
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Synth {
            n,
            u,
            scheme,
            auto_threshold,
            flatten,
            merge,
            aggressive,
            toffoli,
            out: path,
            verify,
            check,
        } => cmd_synth(
            out,
            n,
            &u,
            scheme,
            auto_threshold,
            flatten,
            merge,
            aggressive,
            toffoli,
            path.as_deref(),
            verify,
            &check,
        ),
        Command::Verify { circuit, n, u, mode, check } => cmd_verify(out, &circuit, n, &u, mode, &check),
        Command::Table { n_min, n_max, u, format, metric } => cmd_table(out, err, n_min, n_max, &u, format, metric),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Mismatch(m)) => {
            let _ = writeln!(err, "error: verification failed: {m}");
            1
        }
        Err(Failure::Invalid(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
