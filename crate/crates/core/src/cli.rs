//! Command-line front end: tongue sweeps, pinch reports, certificates,
//! conjugacies and perturbation demos.

use crate::circle_map::CircleMapError;
use crate::forcing::{Forcing, ForcingError, ReducedPLForcing};
use crate::numeric::{fmt_rational, parse_rational, rat, to_f64, CertifiedReal, Rational, RationalInterval};
use crate::perturb::{exact_pinch_scan, perturb_demo, PerturbError};
use crate::pinch::{
    build_conjugacy, characterizations, enumerate_pinches, find_pinch, invariant_density, verify_pinch, PinchError,
    PinchOmega, PinchPoint, StepDensity,
};
use crate::pl::{pl_from_family, PLMap};
use crate::tongue_scan::{b_grid, default_tol, scan_tongues, tongue_record, TongueError, TongueRecord};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Parser, Debug)]
#[command(
    name = "tongues",
    version,
    about = "Arnol'd tongues and pinch points of circle-map families"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sweep tongue boundaries over a b grid; writes CSV, JSON and/or SVG.
    Scan(ScanArgs),
    /// Pinch report for a two-break PL forcing, every p/q with q ≤ qmax.
    Pinch(PinchArgs),
    /// Pinch certificate for given b, ω and p/q.
    Verify(PointArgs),
    /// Conjugacy to the rotation and invariant step density at an exact pinch.
    Conjugacy(PointArgs),
    /// Plausible roots before and after a separating perturbation.
    PerturbDemo(PerturbArgs),
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub forcing: String,
    #[arg(long, default_value_t = 4)]
    pub qmax: u32,
    #[arg(long = "b-steps", default_value_t = 16)]
    pub b_steps: u32,
    /// Boundary tolerance: a rational, a decimal, `1e-10` or `2^-40`.
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PinchArgs {
    #[arg(long)]
    pub forcing: String,
    #[arg(long, default_value_t = 4)]
    pub qmax: u32,
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PointArgs {
    #[arg(long)]
    pub forcing: String,
    /// Rotation number `p/q`.
    #[arg(long)]
    pub pq: String,
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long)]
    pub omega: Option<String>,
    /// Use the j-th two-break pinch of the tongue instead of `--b/--omega`.
    #[arg(long)]
    pub j: Option<u32>,
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PerturbArgs {
    #[arg(long)]
    pub forcing: String,
    /// Multiset size `q`.
    #[arg(long, default_value_t = 3)]
    pub qmax: u32,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value = "1/1000")]
    pub eps: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Unresolved(String),
    Negative(String),
    Io(String),
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Negative(_) | CliError::Compute(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Unresolved(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Unresolved(_) => "unresolved",
            CliError::Negative(_) => "negative",
            CliError::Io(_) => "io",
            CliError::Compute(_) => "compute",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m)
            | CliError::Unresolved(m)
            | CliError::Negative(m)
            | CliError::Io(m)
            | CliError::Compute(m) => m,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({"error": self.kind(), "message": self.message()}).to_string()
    }
}

impl From<ForcingError> for CliError {
    fn from(e: ForcingError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<TongueError> for CliError {
    fn from(e: TongueError) -> Self {
        match e {
            TongueError::Unresolved { .. } | TongueError::CircleMap(CircleMapError::Unresolved { .. }) => {
                CliError::Unresolved(e.to_string())
            }
            TongueError::CircleMap(CircleMapError::NonMonotone(_)) => CliError::Parse(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<PinchError> for CliError {
    fn from(e: PinchError) -> Self {
        match e {
            PinchError::Unresolved(_) => CliError::Unresolved(e.to_string()),
            PinchError::NotPinch { .. } | PinchError::NotExactPinch => CliError::Negative(e.to_string()),
            PinchError::JOutOfRange { .. } | PinchError::NonPositiveWeight | PinchError::NotTwoBreak => {
                CliError::Parse(e.to_string())
            }
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<PerturbError> for CliError {
    fn from(e: PerturbError) -> Self {
        match e {
            PerturbError::BudgetExhausted(_) => CliError::Unresolved(e.to_string()),
            PerturbError::Pinch(p) => p.into(),
            PerturbError::DegenerateFactor { .. } | PerturbError::Numeric(_) => CliError::Compute(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

/// Parses a tolerance: `a/b`, a decimal, `1e-10` or `2^-40`. Must be positive.
pub fn parse_tol(s: &str) -> Result<Rational, CliError> {
    let bad = || CliError::Parse(format!("bad tolerance `{s}`"));
    let t = s.trim();
    let r = if let Some(e) = t.strip_prefix("2^") {
        let e: i32 = e.parse().map_err(|_| bad())?;
        pow_rational(2, e)
    } else if let Some((m, e)) = t.split_once(['e', 'E']) {
        let m = parse_rational(m).map_err(|_| bad())?;
        let e: i32 = e.parse().map_err(|_| bad())?;
        m * pow_rational(10, e)
    } else {
        parse_rational(t).map_err(|_| bad())?
    };
    if r.is_positive() {
        Ok(r)
    } else {
        Err(bad())
    }
}

fn pow_rational(base: i64, e: i32) -> Rational {
    let p = Rational::from_integer(num_traits::pow(BigInt::from(base), e.unsigned_abs() as usize));
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

fn parse_rat(name: &str, s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e| CliError::Parse(format!("--{name}: {e}")))
}

fn parse_pq(s: &str) -> Result<(i64, u32), CliError> {
    let bad = || CliError::Parse(format!("--pq must look like p/q, got `{s}`"));
    let (p, q) = s.split_once('/').ok_or_else(bad)?;
    let p: i64 = p.trim().parse().map_err(|_| bad())?;
    let q: u32 = q.trim().parse().map_err(|_| bad())?;
    if q == 0 {
        return Err(bad());
    }
    Ok((p, q))
}

fn parse_forcing(s: &str) -> Result<Forcing, CliError> {
    Ok(Forcing::from_str(s)?)
}

fn pl_forcing(s: &str) -> Result<ReducedPLForcing, CliError> {
    parse_forcing(s)?
        .as_pl()
        .cloned()
        .ok_or_else(|| CliError::Parse(format!("`{s}` is not a PL forcing")))
}

fn tol_or_default(t: &Option<String>) -> Result<Rational, CliError> {
    t.as_deref().map_or_else(|| Ok(default_tol()), parse_tol)
}

/// ω tolerance for pinch computations, fine enough for the sup-norm bound.
fn pinch_tol() -> Rational {
    rat(1, 1 << 50)
}

fn pinch_tol_or_default(t: &Option<String>) -> Result<Rational, CliError> {
    t.as_deref().map_or_else(|| Ok(pinch_tol()), parse_tol)
}

/// One CSV line per record; rationals as `a/b` plus float columns.
#[derive(Serialize, Deserialize)]
struct CsvRow {
    p: i64,
    q: u32,
    b: String,
    omega_left_lo: String,
    omega_left_hi: String,
    omega_right_lo: String,
    omega_right_hi: String,
    width_lb: String,
    b_f64: f64,
    omega_left_f64: f64,
    omega_right_f64: f64,
    width_lb_f64: f64,
}

pub fn write_csv<W: Write>(records: &[TongueRecord], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow {
            p: r.p,
            q: r.q,
            b: fmt_rational(&r.b),
            omega_left_lo: fmt_rational(r.omega_left.lo()),
            omega_left_hi: fmt_rational(r.omega_left.hi()),
            omega_right_lo: fmt_rational(r.omega_right.lo()),
            omega_right_hi: fmt_rational(r.omega_right.hi()),
            width_lb: fmt_rational(&r.width_lower_bound),
            b_f64: to_f64(&r.b),
            omega_left_f64: to_f64(&r.omega_left.mid()),
            omega_right_f64: to_f64(&r.omega_right.mid()),
            width_lb_f64: to_f64(&r.width_lower_bound),
        })
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads records written by [`write_csv`]; float columns are ignored.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<TongueRecord>, CliError> {
    let mut rd = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in rd.deserialize::<CsvRow>() {
        let row = row.map_err(|e| CliError::Parse(e.to_string()))?;
        let f = |name: &str, s: &str| parse_rat(name, s);
        let rec = TongueRecord::new(
            row.p,
            row.q,
            f("b", &row.b)?,
            RationalInterval::new(
                f("omega_left_lo", &row.omega_left_lo)?,
                f("omega_left_hi", &row.omega_left_hi)?,
            ),
            RationalInterval::new(
                f("omega_right_lo", &row.omega_right_lo)?,
                f("omega_right_hi", &row.omega_right_hi)?,
            ),
        );
        if rec.width_lower_bound != f("width_lb", &row.width_lb)? {
            return Err(CliError::Parse(format!(
                "width_lb of {}/{} disagrees with its boundaries",
                row.p, row.q
            )));
        }
        out.push(rec);
    }
    Ok(out)
}

const PLOT_W: f64 = 800.0;
const PLOT_H: f64 = 600.0;
const LEFT: f64 = 50.0;
const TOP: f64 = 20.0;

fn sx(omega: f64) -> f64 {
    LEFT + omega * PLOT_W
}

fn sy(b: f64) -> f64 {
    TOP + (1.0 - b) * PLOT_H
}

/// Tongue diagram: ω horizontal, b vertical, one polyline per boundary,
/// pinch markers at `(ω, b)`. Output depends only on the input.
pub fn render_svg(records: &[TongueRecord], pinches: &[Mark]) -> String {
    let mut groups: BTreeMap<(u32, i64), Vec<&TongueRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.q, r.p)).or_default().push(r);
    }
    let mut s = String::new();
    let total_w = LEFT + PLOT_W + 20.0;
    let total_h = TOP + PLOT_H + 40.0;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{total_h}" viewBox="0 0 {total_w} {total_h}">"#
    );
    s.push_str(
        "<style>polyline{fill:none;stroke-width:1}.q1{stroke:#000}.q2{stroke:#1f4e9c}.q3{stroke:#2a8a3a}\
         .q4{stroke:#c0392b}.qn{stroke:#888}.pinch{fill:#c0392b}text{font:12px sans-serif}</style>\n",
    );
    let _ = writeln!(
        s,
        r#"<clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{PLOT_W}" height="{PLOT_H}"/></clipPath>"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="#000"/>"##
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            sx(t),
            TOP + PLOT_H + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t}</text>"#,
            LEFT - 6.0,
            sy(t) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">ω</text>"#,
        sx(0.5),
        TOP + PLOT_H + 34.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">b</text>"#,
        LEFT - 34.0,
        sy(0.5)
    );
    s.push_str("<g clip-path=\"url(#plot)\">\n");
    for ((q, p), mut rs) in groups {
        rs.sort_by(|a, b| a.b.cmp(&b.b));
        let class = if q <= 4 { format!("q{q}") } else { "qn".to_string() };
        let apex = to_f64(&rat(p, q as i64));
        let mut left = Vec::new();
        let mut right = Vec::new();
        if !rs[0].b.is_zero() {
            left.push((apex, 0.0));
            right.push((apex, 0.0));
        }
        for r in &rs {
            left.push((to_f64(&r.omega_left.mid()), to_f64(&r.b)));
            right.push((to_f64(&r.omega_right.mid()), to_f64(&r.b)));
        }
        for shift in [-1.0, 0.0, 1.0] {
            if left.len() == 1 {
                let (x, y) = left[0];
                let _ = writeln!(
                    s,
                    r#"<circle class="{class}" cx="{:.2}" cy="{:.2}" r="2"/>"#,
                    sx(x + shift),
                    sy(y)
                );
                continue;
            }
            for line in [&left, &right] {
                let pts: Vec<String> = line
                    .iter()
                    .map(|(x, y)| format!("{:.2},{:.2}", sx(x + shift), sy(*y)))
                    .collect();
                let _ = writeln!(s, r#"<polyline class="{class}" points="{}"/>"#, pts.join(" "));
            }
        }
    }
    for (omega, b) in pinches {
        for shift in [-1.0, 0.0, 1.0] {
            let _ = writeln!(
                s,
                r#"<circle class="pinch" cx="{:.2}" cy="{:.2}" r="3"/>"#,
                sx(omega + shift),
                sy(*b)
            );
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// Pinch locations known for a PL forcing, with one extra scan row at
/// each (the midpoint of the b enclosure when b is not rational).
fn pinch_rows(f: &Forcing, q_max: u32) -> Result<(Vec<PinchRow>, Vec<Mark>), CliError> {
    let Some(pl) = f.as_pl() else {
        return Ok((Vec::new(), Vec::new()));
    };
    let mut rows = Vec::new();
    let mut marks = Vec::new();
    if let Some(w) = pl.two_break_weight() {
        for pp in enumerate_pinches(w, q_max, &pinch_tol()) {
            let pp = pp?;
            let b = pp.b.as_exact().cloned().unwrap_or_else(|| pp.b.enclosure().mid());
            marks.push((to_f64(&pp.omega.enclosure().mid()), pp.b.approx()));
            rows.push((pp.p, pp.q, b));
        }
    } else {
        for e in exact_pinch_scan(pl, q_max)? {
            marks.push((to_f64(&e.omega), to_f64(&e.b)));
            rows.push((e.p, e.q, e.b));
        }
    }
    Ok((rows, marks))
}

/// Records of a sweep, ordered by `q`, `p`, then `b`, and pinch markers.
/// Records, pinch markers, and the records that could not be certified.
pub type ScanOutput = (Vec<TongueRecord>, Vec<Mark>, Vec<TongueError>);

type PinchRow = (i64, u32, Rational);

/// A pinch marker `(ω, b)` in plot coordinates.
pub type Mark = (f64, f64);

pub fn scan(f: &Forcing, q_max: u32, b_steps: u32, tol: &Rational) -> Result<ScanOutput, CliError> {
    if q_max == 0 || b_steps == 0 {
        return Err(CliError::Parse("--qmax and --b-steps must be positive".into()));
    }
    let grid = b_grid(b_steps);
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for r in scan_tongues(f, q_max, &grid, tol) {
        match r {
            Ok(r) => records.push(r),
            Err(e) => failures.push(e),
        }
    }
    let (rows, marks) = pinch_rows(f, q_max)?;
    for (p, q, b) in rows {
        if records.iter().any(|r| r.p == p && r.q == q && r.b == b) {
            continue;
        }
        match tongue_record(f, &b, p, q, tol) {
            Ok(r) => records.push(r),
            Err(e) => failures.push(e),
        }
    }
    records.sort_by(|a, b| (a.q, a.p, &a.b).cmp(&(b.q, b.p, &b.b)));
    Ok((records, marks, failures))
}

fn emit(out: &Option<PathBuf>, body: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => stdout.write_all(body.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn run_scan(a: &ScanArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let f = parse_forcing(&a.forcing)?;
    let tol = tol_or_default(&a.tol)?;
    let (records, marks, failures) = scan(&f, a.qmax, a.b_steps, &tol)?;
    if let Some(p) = &a.csv {
        write_csv(&records, std::fs::File::create(p)?)?;
    }
    if let Some(p) = &a.json {
        std::fs::write(p, to_json(&records))?;
    }
    if let Some(p) = &a.svg {
        std::fs::write(p, render_svg(&records, &marks))?;
    }
    if a.csv.is_none() && a.json.is_none() && a.svg.is_none() {
        write_csv(&records, &mut *stdout)?;
    }
    if !failures.is_empty() {
        let msgs: Vec<String> = failures.iter().map(|e| e.to_string()).collect();
        return Err(CliError::Unresolved(msgs.join("; ")));
    }
    Ok(())
}

fn run_pinch(a: &PinchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let f = pl_forcing(&a.forcing)?;
    let w = f.two_break_weight().ok_or(PinchError::NotTwoBreak)?;
    let tol = pinch_tol_or_default(&a.tol)?;
    let pinches: Vec<PinchPoint> = enumerate_pinches(w, a.qmax, &tol)
        .into_iter()
        .collect::<Result<_, _>>()?;
    emit(&a.out, &to_json(&pinches), stdout)
}

/// Exact `(b, ω)` from the flags, or the two-break pinch `j`.
fn point_of(a: &PointArgs, f: &ReducedPLForcing, p: i64, q: u32) -> Result<(CertifiedReal, PinchOmega), CliError> {
    if let Some(j) = a.j {
        let w = f.two_break_weight().ok_or(PinchError::NotTwoBreak)?;
        let pp = find_pinch(p, q, j, w, &pinch_tol_or_default(&a.tol)?)?;
        return Ok((pp.b, pp.omega));
    }
    let (Some(b), Some(om)) = (&a.b, &a.omega) else {
        return Err(CliError::Parse("give --b and --omega, or --j".into()));
    };
    Ok((
        CertifiedReal::exact(parse_rat("b", b)?),
        PinchOmega::Exact {
            exact: parse_rat("omega", om)?,
        },
    ))
}

#[derive(Serialize)]
struct VerifyReport {
    p: i64,
    q: u32,
    b: CertifiedReal,
    omega: PinchOmega,
    certificate: crate::pinch::Certificate,
}

fn run_verify(a: &PointArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let f = pl_forcing(&a.forcing)?;
    let (p, q) = parse_pq(&a.pq)?;
    let (b, omega) = point_of(a, &f, p, q)?;
    let certificate = verify_pinch(&b, &omega, &f, p, q)?;
    emit(
        &a.out,
        &to_json(&VerifyReport {
            p,
            q,
            b,
            omega,
            certificate,
        }),
        stdout,
    )
}

#[derive(Serialize)]
struct ConjugacyReport {
    p: i64,
    q: u32,
    #[serde(with = "crate::numeric::serde_rational")]
    b: Rational,
    #[serde(with = "crate::numeric::serde_rational")]
    omega: Rational,
    map: PLMap,
    h: PLMap,
    density: StepDensity,
    characterizations: [bool; 4],
}

fn run_conjugacy(a: &PointArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let f = pl_forcing(&a.forcing)?;
    let (p, q) = parse_pq(&a.pq)?;
    let (b, omega) = point_of(a, &f, p, q)?;
    let (Some(b), Some(omega)) = (b.as_exact().cloned(), omega.as_exact().cloned()) else {
        return Err(PinchError::NotExactPinch.into());
    };
    if b.is_negative() || b > Rational::one() {
        return Err(CliError::Parse(format!("b = {} outside [0, 1]", fmt_rational(&b))));
    }
    let g = pl_from_family(&b, &omega, &f).map_err(PinchError::from)?;
    let h = build_conjugacy(&g, p, q)?;
    let density = invariant_density(&g, &h)?;
    let report = ConjugacyReport {
        p,
        q,
        characterizations: characterizations(&g, p, q),
        b,
        omega,
        map: g,
        h,
        density,
    };
    emit(&a.out, &to_json(&report), stdout)
}

fn run_perturb(a: &PerturbArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let f = pl_forcing(&a.forcing)?;
    let eps = parse_tol(&a.eps)?;
    let report = perturb_demo(&f, a.qmax, a.n, &eps, a.seed)?;
    emit(&a.out, &to_json(&report), stdout)
}

/// Runs one subcommand, writing results to `stdout` (or the named files)
/// and machine-readable errors to `stderr`. Returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = writeln!(
                stderr,
                "{}",
                CliError::Parse(e.to_string().trim().to_string()).to_json()
            );
            return 2;
        }
    };
    let result = match &cli.command {
        Command::Scan(a) => run_scan(a, stdout),
        Command::Pinch(a) => run_pinch(a, stdout),
        Command::Verify(a) => run_verify(a, stdout),
        Command::Conjugacy(a) => run_conjugacy(a, stdout),
        Command::PerturbDemo(a) => run_perturb(a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.to_json());
            e.exit_code()
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            std::iter::once("tongues").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn tolerances() {
        assert_eq!(parse_tol("2^-10").unwrap(), rat(1, 1024));
        assert_eq!(parse_tol("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_tol("2.5e2").unwrap(), rat(250, 1));
        assert_eq!(parse_tol("1/7").unwrap(), rat(1, 7));
        assert!(parse_tol("0").is_err());
        assert!(parse_tol("-1e-3").is_err());
        assert!(parse_tol("x").is_err());
    }

    #[test]
    fn svg_edge_cases() {
        let empty = render_svg(&[], &[]);
        assert!(empty.contains("<rect") && !empty.contains("<polyline") && !empty.contains("<circle"));
        assert_eq!(empty, render_svg(&[], &[]));
        let c = RationalInterval::point(rat(1, 3));
        let one = render_svg(&[TongueRecord::new(1, 3, rat(0, 1), c.clone(), c)], &[]);
        assert!(!one.contains("<polyline"));
        assert_eq!(one.matches("<circle").count(), 3);
    }

    #[test]
    fn csv_round_trip() {
        let f = Forcing::triangle(rat(1, 2)).unwrap();
        let (records, _, failures) = scan(&f, 2, 2, &rat(1, 1 << 20)).unwrap();
        assert!(failures.is_empty());
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("p,q,b,omega_left_lo,"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn exit_codes() {
        let (code, _, err) = run_capture(&["scan", "--forcing", "cosine"]);
        assert_eq!(code, 2);
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "parse");
        assert_eq!(run_capture(&["bogus"]).0, 2);
        assert_eq!(run_capture(&["scan", "--forcing", "sine", "--tol", "-1"]).0, 2);
        assert_eq!(run_capture(&["pinch", "--forcing", "sine"]).0, 2);
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("scan"));
        // not a pinch: answered, but negatively
        let (code, _, err) = run_capture(&[
            "verify",
            "--forcing",
            "triangle:1/2",
            "--pq",
            "1/3",
            "--b",
            "1/2",
            "--omega",
            "1/3",
        ]);
        assert_eq!(code, 1);
        assert!(err.contains("negative"));
        let (code, _, _) = run_capture(&["perturb-demo", "--forcing", "triangle:1/2"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn exact_pinch_report() {
        let (code, out, _) = run_capture(&["pinch", "--forcing", "pl:w=-1,4/3;l=4/7,3/7", "--qmax", "3"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let all = v.as_array().unwrap();
        // τ(2, 4/3) = 1 as well: (1 - b)(1 + 4b/3) = 1 at b = 1/4
        let pq: Vec<(i64, i64, &str)> = all
            .iter()
            .map(|x| {
                (
                    x["p"].as_i64().unwrap(),
                    x["q"].as_i64().unwrap(),
                    x["b"]["exact"].as_str().unwrap(),
                )
            })
            .collect();
        assert_eq!(pq, vec![(1, 2, "1/4"), (1, 3, "3/4"), (2, 3, "3/4")]);
        assert!(all.iter().all(|x| x["certificate"] == "exact"));
        let omega = all[1]["omega"]["exact"].as_str().unwrap().to_string();
        let (code, out, _) = run_capture(&[
            "conjugacy",
            "--forcing",
            "pl:w=-1,4/3;l=4/7,3/7",
            "--pq",
            "1/3",
            "--b",
            "3/4",
            "--omega",
            &omega,
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["characterizations"], serde_json::json!([true, true, true, true]));
        let (code, out, _) = run_capture(&["verify", "--forcing", "triangle:1/2", "--pq", "1/3", "--j", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("interval:"));
    }

    #[test]
    fn perturb_demo_is_deterministic() {
        let args = [
            "perturb-demo",
            "--forcing",
            "pl:w=-1,4/3,20;l=114/175,237/700,1/100",
            "--qmax",
            "3",
            "--seed",
            "5",
        ];
        let (code, a, _) = run_capture(&args);
        assert_eq!(code, 0);
        let (_, b, _) = run_capture(&args);
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["before"]["distinct"], false);
        assert_eq!(v["after"]["distinct"], true);
    }
}
