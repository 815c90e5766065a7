//! Gate-count bookkeeping: closed-form formulas, measured-vs-formula
//! tables, the crossover study and the errata list.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::circuit::{counts, CountReport, Gate};
use crate::error::{Error, Result};
use crate::exp_synth::{exp_flat, exp_plan, exp_synthesize_with};
use crate::oracle::VerifyOptions;
use crate::poly_synth::{poly_blocks, poly_synthesize_with, ToffoliPolicy};
use crate::qmath::Unitary2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Exp,
    Poly,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Exp => "exp",
            Scheme::Poly => "poly",
        })
    }
}

/// First `n` at which the polynomial formulas are claimed.
pub const POLY_FORMULA_MIN_N: usize = 7;

/// The stated claim about where the polynomial scheme wins.
pub const STATED_CROSSOVER: &str = "n > 8";

/// Closed-form gate counts for one `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaCounts {
    pub cnot: i64,
    pub one_qubit: i64,
    pub toffoli: Option<i64>,
    pub controlled_u: Option<i64>,
    /// False when `n` is below the range the formulas are claimed for.
    pub in_range: bool,
}

impl FormulaCounts {
    pub fn total(&self) -> i64 {
        self.cnot + self.one_qubit
    }
}

/// Evaluates the closed-form count formulas.
///
/// ```
/// use mcu_synth::reporting::{formula_counts, Scheme};
/// let p = formula_counts(10, Scheme::Poly).unwrap();
/// assert_eq!((p.cnot, p.one_qubit, p.toffoli), (820, 1059, Some(254)));
/// assert_eq!(formula_counts(5, Scheme::Exp).unwrap().cnot, 30);
/// assert!(!formula_counts(3, Scheme::Poly).unwrap().in_range);
/// ```
pub fn formula_counts(n: usize, scheme: Scheme) -> Result<FormulaCounts> {
    if n == 0 || n > 62 {
        return Err(Error::OutOfRange { what: "wire count", value: n as i64, allowed: "1..=62".into() });
    }
    let m = n as i64;
    Ok(match scheme {
        Scheme::Exp => {
            FormulaCounts { cnot: (1 << n) - 2, one_qubit: 1 << n, toffoli: None, controlled_u: None, in_range: true }
        }
        Scheme::Poly => FormulaCounts {
            cnot: 24 * m * m - 212 * m + 540,
            one_qubit: 32 * m * m - 288 * m + 739,
            toffoli: Some(8 * m * m - 72 * m + 174),
            controlled_u: Some(2 * m - 3),
            in_range: n >= POLY_FORMULA_MIN_N,
        },
    })
}

/// One scheme at one `n`: measured counts next to the formulas.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub scheme: Scheme,
    /// Counts of the verified flattened, merged circuit.
    pub measured: CountReport,
    /// Toffolis before lowering (polynomial scheme only).
    pub toffoli_structural: Option<usize>,
    pub formula: FormulaCounts,
    pub notes: Vec<String>,
}

impl ComparisonRow {
    pub fn total_measured(&self) -> i64 {
        (self.measured.cnot + self.measured.one_qubit) as i64
    }

    pub fn cnot_delta(&self) -> i64 {
        self.measured.cnot as i64 - self.formula.cnot
    }

    pub fn one_qubit_delta(&self) -> i64 {
        self.measured.one_qubit as i64 - self.formula.one_qubit
    }

    pub fn total_delta(&self) -> i64 {
        self.total_measured() - self.formula.total()
    }

    pub fn metric(&self, metric: Metric) -> (i64, i64) {
        match metric {
            Metric::Cnot => (self.measured.cnot as i64, self.formula.cnot),
            Metric::Total => (self.total_measured(), self.formula.total()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableOptions {
    pub u: Unitary2,
    pub policy: ToffoliPolicy,
    pub verify: VerifyOptions,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { u: crate::qmath::hadamard(), policy: ToffoliPolicy::Auto, verify: VerifyOptions::default() }
    }
}

/// Synthesizes, verifies and counts one row.
pub fn comparison_row(n: usize, scheme: Scheme, opts: &TableOptions) -> Result<ComparisonRow> {
    let formula = formula_counts(n, scheme)?;
    let (synth, toffoli_structural) = match scheme {
        Scheme::Exp => (exp_synthesize_with(n, &opts.u, true, true, &opts.verify)?, None),
        Scheme::Poly => {
            let s = poly_synthesize_with(n, &opts.u, opts.policy, true, true, &opts.verify)?;
            let t = if n > 6 { Some(counts(&poly_blocks(n, &opts.u)?).toffoli) } else { None };
            (s, t)
        }
    };
    let mut notes = Vec::new();
    if scheme == Scheme::Poly && n < POLY_FORMULA_MIN_N {
        notes.push(format!("fallback to exponential; formulas claimed for n >= {POLY_FORMULA_MIN_N}"));
    } else {
        notes.extend(synth.notes);
    }
    Ok(ComparisonRow { n, scheme, measured: counts(&synth.circuit), toffoli_structural, formula, notes })
}

/// Both schemes for every `n` in `range`, ordered by `n` then scheme.
pub fn comparison_table(range: RangeInclusive<usize>, opts: &TableOptions) -> Result<Vec<ComparisonRow>> {
    if range.is_empty() || *range.start() == 0 {
        return Err(Error::OutOfRange {
            what: "table range start",
            value: *range.start() as i64,
            allowed: "1..=end".into(),
        });
    }
    let mut rows = Vec::new();
    for n in range {
        for scheme in [Scheme::Exp, Scheme::Poly] {
            rows.push(comparison_row(n, scheme, opts)?);
        }
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Cnot,
    Total,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Cnot => "cnot",
            Metric::Total => "total",
        })
    }
}

/// Smallest `n ≥ 7` at which the polynomial scheme is no worse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Crossover {
    pub metric: Metric,
    pub formula: Option<usize>,
    pub measured: Option<usize>,
}

/// Crossover of the formulas alone over `range`.
///
/// ```
/// use mcu_synth::reporting::{formula_crossover, Metric};
/// assert_eq!(formula_crossover(1..=20, Metric::Cnot), Some(10));
/// assert_eq!(formula_crossover(1..=20, Metric::Total), Some(10));
/// assert_eq!(formula_crossover(1..=5, Metric::Total), None);
/// ```
pub fn formula_crossover(range: RangeInclusive<usize>, metric: Metric) -> Option<usize> {
    let pick = |p: FormulaCounts| match metric {
        Metric::Cnot => p.cnot,
        Metric::Total => p.total(),
    };
    range.filter(|&n| n >= POLY_FORMULA_MIN_N).find(|&n| {
        let e = formula_counts(n, Scheme::Exp).map(pick);
        let p = formula_counts(n, Scheme::Poly).map(pick);
        matches!((p, e), (Ok(p), Ok(e)) if p <= e)
    })
}

/// Crossover from table rows, measured and by formula. Below `n = 7` the
/// polynomial scheme is the exponential one, so those rows are skipped.
pub fn crossover(rows: &[ComparisonRow], metric: Metric) -> Crossover {
    let mut by_n: BTreeMap<usize, [Option<i64>; 2]> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.n >= POLY_FORMULA_MIN_N) {
        by_n.entry(r.n).or_default()[r.scheme as usize] = Some(r.metric(metric).0);
    }
    let measured = by_n.iter().find_map(|(&n, v)| match v {
        [Some(e), Some(p)] if p <= e => Some(n),
        _ => None,
    });
    let formula = match (rows.iter().map(|r| r.n).min(), rows.iter().map(|r| r.n).max()) {
        (Some(lo), Some(hi)) => formula_crossover(lo..=hi, metric),
        _ => None,
    };
    Crossover { metric, formula, measured }
}

pub fn render_crossover(c: &Crossover) -> String {
    let show = |x: Option<usize>| x.map_or_else(|| "no crossover in range".to_string(), |n| format!("n = {n}"));
    format!(
        "crossover ({}): formulas {}; measured {}; stated {}",
        c.metric,
        show(c.formula),
        show(c.measured),
        STATED_CROSSOVER
    )
}

/// Backward second differences `c(n) − 2c(n−1) + c(n−2)` of consecutive
/// points.
///
/// ```
/// use mcu_synth::reporting::second_differences;
/// let pts: Vec<(usize, i64)> = (1..6).map(|n| (n, 24 * (n * n) as i64)).collect();
/// assert_eq!(second_differences(&pts), [(3, 48), (4, 48), (5, 48)]);
/// ```
pub fn second_differences(points: &[(usize, i64)]) -> Vec<(usize, i64)> {
    points
        .windows(3)
        .filter(|w| w[1].0 == w[0].0 + 1 && w[2].0 == w[1].0 + 1)
        .map(|w| (w[2].0, w[2].1 - 2 * w[1].1 + w[0].1))
        .collect()
}

pub const CSV_HEADER: [&str; 11] = [
    "n",
    "scheme",
    "cnot_measured",
    "cnot_paper",
    "oneq_measured",
    "oneq_paper",
    "toffoli_measured",
    "toffoli_paper",
    "total_measured",
    "total_paper",
    "notes",
];

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn row_fields(r: &ComparisonRow) -> [String; 11] {
    let mut notes = r.notes.clone();
    if !r.formula.in_range {
        notes.push("formula outside its claimed range".into());
    }
    [
        r.n.to_string(),
        r.scheme.to_string(),
        r.measured.cnot.to_string(),
        r.formula.cnot.to_string(),
        r.measured.one_qubit.to_string(),
        r.formula.one_qubit.to_string(),
        opt(r.toffoli_structural),
        opt(r.formula.toffoli),
        r.total_measured().to_string(),
        r.formula.total().to_string(),
        notes.join("; "),
    ]
}

pub fn write_csv<W: io::Write>(rows: &[ComparisonRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(row_fields(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Aligned columns, notes last and unpadded.
pub fn render_text(rows: &[ComparisonRow]) -> String {
    let cells: Vec<[String; 11]> =
        std::iter::once(CSV_HEADER.map(String::from)).chain(rows.iter().map(row_fields)).collect();
    let mut widths = [0usize; 10];
    for c in &cells {
        for (w, s) in widths.iter_mut().zip(c.iter()) {
            *w = (*w).max(s.len());
        }
    }
    let mut out = String::new();
    for c in &cells {
        let mut line = String::new();
        for (i, w) in widths.iter().enumerate() {
            if i < 2 {
                write!(line, "{:<w$}  ", c[i]).unwrap();
            } else {
                write!(line, "{:>w$}  ", c[i]).unwrap();
            }
        }
        line.push_str(&c[10]);
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// One place where a stated figure and this implementation differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Erratum {
    pub topic: String,
    pub stated: String,
    pub observed: String,
}

fn erratum(topic: &str, stated: impl Into<String>, observed: impl Into<String>) -> Erratum {
    Erratum { topic: topic.into(), stated: stated.into(), observed: observed.into() }
}

/// The four-wire base as printed in the reference listing, in print order
/// (last gate first). `Cab` is a CNOT from wire `a` onto `b`; `n` is the
/// target. Angle factors keep their printed names.
pub const REFERENCE_C4_LISTING: [&str; 30] = [
    "D@n", "C1n", "E@n", "C2n", "C12", "G†@2", "E†@n", "C2n", "C12", "E@n", "C3n", "C23", "E†@n", "G†@2", "C13", "C14",
    "G@3", "E@n", "C23", "C2n", "G†@3", "E†@n", "C13", "C1n", "E@n", "C3n", "G@1", "G@2", "G@3", "F@n",
];

fn token(g: &Gate, n: usize) -> String {
    let w = |x: usize| if x == n { "n".to_string() } else { x.to_string() };
    match g {
        Gate::CNot { control, target } => format!("C{}{}", w(*control), w(*target)),
        Gate::OneQubit { target, label, .. } => format!("{label}@{}", w(*target)),
        g => format!("{}@{}", g.kind_name(), w(g.target())),
    }
}

/// Multiset difference between the reference listing and the emitted
/// unmerged four-wire base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ListingDiff {
    pub only_reference: Vec<String>,
    pub only_emitted: Vec<String>,
}

pub fn reference_c4_diff() -> ListingDiff {
    let plan = exp_plan(4, &crate::qmath::pauli_x()).expect("n = 4 is in range");
    let mut emitted: BTreeMap<String, i64> = BTreeMap::new();
    for g in exp_flat(&plan).ops() {
        *emitted.entry(token(g, 4)).or_default() += 1;
    }
    let mut reference: BTreeMap<String, i64> = BTreeMap::new();
    for t in REFERENCE_C4_LISTING.iter().filter(|t| !t.is_empty()) {
        *reference.entry(t.to_string()).or_default() += 1;
    }
    let excess = |a: &BTreeMap<String, i64>, b: &BTreeMap<String, i64>| -> Vec<String> {
        a.iter()
            .flat_map(|(k, &c)| {
                let extra = c - b.get(k).copied().unwrap_or(0);
                std::iter::repeat_n(k.clone(), extra.max(0) as usize)
            })
            .collect()
    };
    ListingDiff { only_reference: excess(&reference, &emitted), only_emitted: excess(&emitted, &reference) }
}

/// Known differences, with observed values computed from `rows` where
/// they apply.
pub fn errata(rows: &[ComparisonRow]) -> Vec<Erratum> {
    let mut out = vec![
        erratum("Pauli X", "sigma_x printed as [[1,0],[0,1]]", "Pauli X [[0,1],[1,0]] is used throughout"),
        erratum(
            "usual Toffoli cost",
            "14 basic operations",
            "standard network has 6 CNOT + 9 one-qubit = 15 before merging",
        ),
    ];
    let d = reference_c4_diff();
    out.push(erratum(
        "four-wire base listing",
        format!("only in listing: {}", d.only_reference.join(" ")),
        format!("only in verified network: {}", d.only_emitted.join(" ")),
    ));
    for metric in [Metric::Cnot, Metric::Total] {
        let c = crossover(rows, metric);
        let show = |x: Option<usize>| x.map_or_else(|| "none in range".into(), |n| n.to_string());
        out.push(erratum(
            &format!("crossover ({metric})"),
            STATED_CROSSOVER,
            format!("formulas n = {}; measured n = {}", show(c.formula), show(c.measured)),
        ));
    }
    let mut fallbacks: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.scheme == Scheme::Poly && r.n >= POLY_FORMULA_MIN_N) {
        for note in &r.notes {
            fallbacks.entry(note.split(':').next().unwrap_or(note).to_string()).or_default().push(r.n);
        }
    }
    for (stage, ns) in fallbacks {
        out.push(erratum(
            "3-CNOT Toffoli placement",
            "licensed positions verify",
            format!("{stage} failed verification for n in {ns:?}; fell back"),
        ));
    }
    for r in rows.iter().filter(|r| r.scheme == Scheme::Exp && (r.cnot_delta(), r.one_qubit_delta()) != (0, 0)) {
        out.push(erratum(
            "exponential count",
            format!("n = {}: {} CNOT, {} one-qubit", r.n, r.formula.cnot, r.formula.one_qubit),
            format!("{} CNOT, {} one-qubit", r.measured.cnot, r.measured.one_qubit),
        ));
    }
    let poly: Vec<&ComparisonRow> =
        rows.iter().filter(|r| r.scheme == Scheme::Poly && r.n >= POLY_FORMULA_MIN_N).collect();
    if !poly.is_empty() {
        let pts = |f: fn(&ComparisonRow) -> i64| -> Vec<(usize, i64)> { poly.iter().map(|r| (r.n, f(r))).collect() };
        let d2c = second_differences(&pts(|r| r.measured.cnot as i64));
        let d2o = second_differences(&pts(|r| r.measured.one_qubit as i64));
        let worst = poly
            .iter()
            .map(|r| (r.n, r.cnot_delta() as f64 / r.formula.cnot as f64))
            .fold((0, 0.0f64), |a, b| if b.1.abs() > a.1.abs() { b } else { a });
        out.push(erratum(
            "polynomial merged counts",
            "24n^2-212n+540 CNOT, 32n^2-288n+739 one-qubit",
            format!(
                "second differences cnot {:?}, one-qubit {:?}; largest CNOT deviation {:+.1}% at n = {}",
                d2c.iter().map(|p| p.1).collect::<Vec<_>>(),
                d2o.iter().map(|p| p.1).collect::<Vec<_>>(),
                100.0 * worst.1,
                worst.0
            ),
        ));
    }
    out
}

pub fn render_errata(errata: &[Erratum]) -> String {
    let mut s = String::new();
    for e in errata {
        writeln!(s, "- {}: stated {}; observed {}", e.topic, e.stated, e.observed).unwrap();
    }
    s
}
