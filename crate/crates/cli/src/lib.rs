//! Command implementations for the `qsr` binary.
//!
//! Every command renders its whole output in memory first; nothing is
//! written unless rendering succeeded.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qsr_core::closed_forms::{verify_closed_forms, VerifyGrid, VerifyReport};
use qsr_core::phase::DEFAULT_QUAD_STEPS;
use qsr_core::ring::{RingConfig, RingPosition};
use qsr_core::sweep::{
    self, arm_coloring, find_printed_switch_loci, find_switch_loci, run_sweep, sweep_csv,
    table1_etas, table1_report, table1_special_etas, ArmColoring, SweepSpec, SwitchLocus,
    DEFAULT_DELTA_POINTS,
};
use qsr_core::{phase, Angle, BellFamilyState, BellKind, PhaseValue, QsrError, Sign};

mod svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "qsr",
    version,
    about = "Spin-orbit phases of a Bell pair on a square Rashba ring"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Phase decomposition at one ring position.
    Phase(PhaseArgs),
    /// Scan the δ-arm for a list of p0 and η values.
    Sweep(SweepArgs),
    /// Locate where the discrete geometric phase switches.
    Loci(LociArgs),
    /// Reproduce the phase taxonomy table.
    Table1(Table1Args),
    /// SVG ring schematic colored by geometric phase.
    Figure(FigureArgs),
    /// Compare the closed forms against the engine.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Phi,
    Psi,
}

impl From<FamilyArg> for BellKind {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Phi => BellKind::Phi,
            FamilyArg::Psi => BellKind::Psi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    #[value(name = "+", alias = "plus")]
    Plus,
    #[value(name = "-", alias = "minus")]
    Minus,
    Both,
}

impl SignArg {
    fn signs(self) -> Vec<Sign> {
        match self {
            SignArg::Plus => vec![Sign::Plus],
            SignArg::Minus => vec![Sign::Minus],
            SignArg::Both => vec![Sign::Plus, Sign::Minus],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArmArg {
    Eta,
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Oracle,
    Closed,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PhaseArgs {
    /// e.g. `phi+:p0=0.3`, `psi-:p0=1`.
    #[arg(long)]
    pub state: BellFamilyState,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Angle,
    /// Coordinate along the chosen arm.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Angle,
    #[arg(long, value_enum, default_value = "delta")]
    pub arm: ArmArg,
    #[arg(long, env = "QSR_QUAD_STEPS", default_value_t = DEFAULT_QUAD_STEPS)]
    pub quad_steps: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, value_enum, default_value = "+")]
    pub sign: SignArg,
    #[arg(long, value_delimiter = ',', required = true)]
    pub p0: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub eta: Vec<Angle>,
    #[arg(long, default_value_t = DEFAULT_DELTA_POINTS)]
    pub delta_points: usize,
    #[arg(long, value_enum, default_value = "oracle")]
    pub engine: EngineArg,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LociArgs {
    #[arg(long)]
    pub state: BellFamilyState,
    #[arg(long, value_delimiter = ',', required = true)]
    pub eta: Vec<Angle>,
    /// Also list zeros of the closed-form switching expression (p0 = 1/2).
    #[arg(long)]
    pub printed: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Table1Args {
    #[arg(long, default_value_t = DEFAULT_DELTA_POINTS)]
    pub delta_points: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(long)]
    pub state: BellFamilyState,
    /// One ring per value, drawn as nested squares.
    #[arg(long, value_delimiter = ',', default_value = "pi/2,pi,3pi/2,2pi")]
    pub eta: Vec<Angle>,
    #[arg(long, default_value_t = DEFAULT_DELTA_POINTS)]
    pub delta_points: usize,
    #[arg(long, value_enum, default_value = "svg")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, value_delimiter = ',', required = true)]
    pub p0: Vec<f64>,
    #[arg(long, value_enum, default_value = "both")]
    pub sign: SignArg,
    #[arg(long, default_value_t = 16)]
    pub eta_grid: usize,
    #[arg(long, default_value_t = 16)]
    pub delta_grid: usize,
    #[arg(long, default_value = "2pi")]
    pub eta_max: Angle,
    #[arg(long, env = "QSR_QUAD_STEPS", default_value_t = DEFAULT_QUAD_STEPS)]
    pub quad_steps: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Contract(QsrError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Contract(_) => EXIT_CONTRACT,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<QsrError> for CliError {
    fn from(e: QsrError) -> Self {
        match e {
            QsrError::Parse(m) => CliError::Parse(m),
            other => CliError::Contract(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Rendered output plus where it goes.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub body: String,
    pub path: Option<PathBuf>,
}

impl Rendered {
    pub fn emit(&self) -> CliResult<()> {
        use std::io::Write;
        match &self.path {
            Some(p) => std::fs::write(p, &self.body).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            }),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(self.body.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Io {
                        path: "<stdout>".into(),
                        source,
                    })
            }
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn unsupported(cmd: &str, f: Format) -> CliError {
    CliError::Parse(format!("{cmd} does not support --format {f:?}").to_lowercase())
}

fn check_steps(steps: usize) -> CliResult<()> {
    if steps == 0 {
        return Err(CliError::Contract(QsrError::InvalidParameter(
            "quadrature steps must be >= 1".into(),
        )));
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> CliResult<Rendered> {
    match &cli.command {
        Command::Phase(a) => cmd_phase(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Loci(a) => cmd_loci(a),
        Command::Table1(a) => cmd_table1(a),
        Command::Figure(a) => cmd_figure(a),
        Command::Verify(a) => cmd_verify(a).map(|v| v.rendered),
    }
}

/// Parses argv and runs; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match execute(&cli).and_then(|r| r.emit()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Fixed 12-decimal rendering without a spurious `-0.000000000000`.
fn fmt_num(x: f64) -> String {
    let r = format!("{x:.12}");
    if r.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        r.trim_start_matches('-').to_string()
    } else {
        r
    }
}

fn fmt_phase(v: &PhaseValue) -> String {
    match v.angle() {
        Some(a) => fmt_num(a),
        None => format!("undefined (overlap={:.3e})", v.magnitude()),
    }
}

#[derive(Debug, Serialize)]
struct PhaseJson {
    #[serde(flatten)]
    breakdown: phase::PhaseBreakdown,
    dynamic_quadrature: f64,
    quad_steps: usize,
}

pub fn cmd_phase(a: &PhaseArgs) -> CliResult<Rendered> {
    check_steps(a.quad_steps)?;
    let cfg = RingConfig::new(a.eta)?;
    let pos = match a.arm {
        ArmArg::Eta => RingPosition::eta_arm(a.delta),
        ArmArg::Delta => RingPosition::delta_arm(a.delta),
    };
    pos.validate(&cfg)?;
    let b = phase::evaluate(&a.state, &cfg, &pos)?;
    let quad = phase::dynamic_phase_quadrature(&a.state, &cfg, &pos, a.quad_steps)?;
    let body = match a.format {
        Format::Json => to_json(&PhaseJson {
            breakdown: b,
            dynamic_quadrature: quad,
            quad_steps: a.quad_steps,
        }),
        Format::Text => {
            let arm = match a.arm {
                ArmArg::Eta => "eta-arm",
                ArmArg::Delta => "delta-arm",
            };
            let mut s = String::new();
            let _ = writeln!(s, "state              {}", a.state);
            let _ = writeln!(s, "eta                {}", a.eta);
            let _ = writeln!(s, "position           {arm} at {}", a.delta);
            let _ = writeln!(s, "total              {}", fmt_phase(&b.total));
            let _ = writeln!(s, "dynamic            {}", fmt_num(b.dynamic_oracle));
            let _ = writeln!(
                s,
                "dynamic quadrature {} ({} steps)",
                fmt_num(quad),
                a.quad_steps
            );
            let _ = writeln!(s, "dynamic printed    {}", fmt_num(b.dynamic_printed));
            let _ = writeln!(s, "geometric          {}", fmt_phase(&b.geometric));
            let _ = writeln!(s, "overlap            {}", fmt_num(b.total.magnitude()));
            s
        }
        f => return Err(unsupported("phase", f)),
    };
    Ok(Rendered {
        body,
        path: a.out.output.clone(),
    })
}

pub fn cmd_sweep(a: &SweepArgs) -> CliResult<Rendered> {
    let sign = match a.sign {
        SignArg::Plus => Sign::Plus,
        SignArg::Minus => Sign::Minus,
        SignArg::Both => return Err(CliError::Parse("sweep takes a single sign".into())),
    };
    let spec = SweepSpec {
        family: a.family.into(),
        sign,
        p0s: a.p0.clone(),
        etas: a.eta.clone(),
        delta_points: a.delta_points,
        engine: match a.engine {
            EngineArg::Oracle => sweep::Engine::Oracle,
            EngineArg::Closed => sweep::Engine::Closed,
            EngineArg::Both => sweep::Engine::Both,
        },
    };
    if !matches!(a.format, Format::Csv | Format::Json) {
        return Err(unsupported("sweep", a.format));
    }
    let rows = run_sweep(&spec)?;
    let body = match a.format {
        Format::Csv => sweep_csv(&rows)?,
        _ => to_json(&rows),
    };
    Ok(Rendered {
        body,
        path: a.out.output.clone(),
    })
}

#[derive(Debug, Serialize)]
struct LociEntry {
    eta: Angle,
    loci: Vec<SwitchLocus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    printed_loci: Option<Vec<SwitchLocus>>,
}

#[derive(Debug, Serialize)]
struct LociJson {
    state: BellFamilyState,
    entries: Vec<LociEntry>,
}

pub fn cmd_loci(a: &LociArgs) -> CliResult<Rendered> {
    if !matches!(a.format, Format::Json | Format::Text) {
        return Err(unsupported("loci", a.format));
    }
    for &eta in &a.eta {
        RingConfig::new(eta)?;
    }
    let mut entries = Vec::new();
    for &eta in &a.eta {
        let printed_loci = if a.printed {
            Some(find_printed_switch_loci(eta, a.state.sign)?)
        } else {
            None
        };
        entries.push(LociEntry {
            eta,
            loci: find_switch_loci(&a.state, eta)?,
            printed_loci,
        });
    }
    let body = match a.format {
        Format::Json => to_json(&LociJson {
            state: a.state,
            entries,
        }),
        _ => {
            let mut s = format!("state {}\n", a.state);
            let line = |s: &mut String, l: &SwitchLocus| {
                let _ = writeln!(
                    s,
                    "  delta* = {:.12}  {:?}  denominator {:.3e}  overlap {:.3e}",
                    l.delta_star, l.kind, l.denominator, l.overlap
                );
            };
            for e in &entries {
                let _ = writeln!(s, "eta = {} ({} loci)", e.eta, e.loci.len());
                e.loci.iter().for_each(|l| line(&mut s, l));
                if let Some(p) = &e.printed_loci {
                    let _ = writeln!(s, " closed-form expression zeros ({}):", p.len());
                    p.iter().for_each(|l| line(&mut s, l));
                }
            }
            s
        }
    };
    Ok(Rendered {
        body,
        path: a.out.output.clone(),
    })
}

pub fn cmd_table1(a: &Table1Args) -> CliResult<Rendered> {
    if a.delta_points < 2 {
        return Err(QsrError::InvalidParameter("delta resolution must be >= 2".into()).into());
    }
    if !matches!(a.format, Format::Json | Format::Text) {
        return Err(unsupported("table1", a.format));
    }
    let report = table1_report(&table1_etas(), &table1_special_etas(), a.delta_points)?;
    let body = match a.format {
        Format::Json => to_json(&report),
        _ => report.render_text(),
    };
    Ok(Rendered {
        body,
        path: a.out.output.clone(),
    })
}

pub fn cmd_figure(a: &FigureArgs) -> CliResult<Rendered> {
    if a.delta_points < 2 {
        return Err(QsrError::InvalidParameter("delta resolution must be >= 2".into()).into());
    }
    if a.eta.is_empty() {
        return Err(QsrError::InvalidParameter("need at least one eta".into()).into());
    }
    for &eta in &a.eta {
        RingConfig::new(eta)?;
        if eta.radians() <= 0.0 {
            return Err(QsrError::InvalidRing("eta must be > 0".into()).into());
        }
    }
    let colorings: Vec<ArmColoring> = a
        .eta
        .iter()
        .map(|&eta| arm_coloring(&a.state, eta, a.delta_points))
        .collect::<qsr_core::Result<_>>()?;
    let body = match a.format {
        Format::Svg => svg::render(&a.state, &colorings),
        Format::Json => to_json(&colorings),
        f => return Err(unsupported("figure", f)),
    };
    Ok(Rendered {
        body,
        path: a.out.output.clone(),
    })
}

/// Result of `verify`: the report itself plus its rendering.
#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub report: VerifyReport,
    pub rendered: Rendered,
}

pub fn cmd_verify(a: &VerifyArgs) -> CliResult<VerifyOutcome> {
    check_steps(a.quad_steps)?;
    if !matches!(a.format, Format::Json | Format::Text | Format::Csv) {
        return Err(unsupported("verify", a.format));
    }
    let grid = VerifyGrid {
        signs: a.sign.signs(),
        eta_points: a.eta_grid,
        delta_points: a.delta_grid,
        eta_max: a.eta_max,
        quad_steps: a.quad_steps,
        ..VerifyGrid::new(a.family.into(), a.p0.clone())
    };
    let report = verify_closed_forms(&grid)?;
    let body = match a.format {
        Format::Json => to_json(&report),
        Format::Csv => report.to_csv()?,
        _ => render_verify_text(&report, &grid),
    };
    Ok(VerifyOutcome {
        report,
        rendered: Rendered {
            body,
            path: a.out.output.clone(),
        },
    })
}

fn render_verify_text(report: &VerifyReport, grid: &VerifyGrid) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "closed-form verification: {:?} family, {} eta x {} delta points, eta_max {}, {} quadrature steps",
        report.family, grid.eta_points, grid.delta_points, grid.eta_max, grid.quad_steps
    );
    for n in &report.notes {
        let _ = writeln!(s, "note: {n}");
    }
    let _ = writeln!(
        s,
        "sign convention: D = -int <psi|i U^+ dU/ds|psi> ds, geometric = total - D"
    );
    if let Some(fit) = &report.coefficient_fit {
        let _ = writeln!(
            s,
            "  under this convention D = -c (p0-p1) sin(eta) delta with c = {:.12}",
            fit.coefficient
        );
        let _ = writeln!(
            s,
            "  under the opposite convention (D = +int ...) the same fit gives c = {:.12}",
            -fit.coefficient
        );
    }
    let _ = writeln!(
        s,
        "{:<6} {:>8} {:>10} {:>15}",
        "eq", "match", "mismatch", "both-undefined"
    );
    for e in &report.summary {
        let _ = writeln!(
            s,
            "{:<6} {:>8} {:>10} {:>15}",
            e.eq_id.as_str(),
            e.matches,
            e.mismatches,
            e.both_undefined
        );
    }
    match &report.coefficient_fit {
        Some(fit) => {
            let _ = writeln!(s, "{}", fit.verdict_line());
        }
        None => {
            let _ = writeln!(s, "dynamic coefficient: not identifiable ((p0-p1) sin(eta) delta vanishes on this grid)");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("qsr").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn phase_text_reports_all_parts() {
        let cli = parse(&[
            "phase",
            "--state",
            "psi+:p0=0.5",
            "--eta",
            "pi",
            "--delta",
            "pi/2",
        ]);
        let out = execute(&cli).unwrap().body;
        assert!(out.contains("geometric          3.141592653590"), "{out}");
        assert!(out.contains("dynamic            0.000000000000"), "{out}");
    }

    #[test]
    fn undefined_phase_is_not_an_error() {
        let cli = parse(&[
            "phase",
            "--state",
            "phi+:p0=0.5",
            "--eta",
            "pi",
            "--delta",
            "0",
        ]);
        let out = execute(&cli).unwrap().body;
        assert!(
            out.contains("total              undefined (overlap="),
            "{out}"
        );
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run([
                "qsr",
                "phase",
                "--state",
                "chi+:p0=1",
                "--eta",
                "pi",
                "--delta",
                "0"
            ]),
            EXIT_PARSE
        );
        assert_eq!(
            run([
                "qsr",
                "phase",
                "--state",
                "phi+:p0=1",
                "--eta",
                "pi",
                "--delta",
                "4"
            ]),
            EXIT_CONTRACT
        );
        assert_eq!(
            run([
                "qsr",
                "sweep",
                "--family",
                "psi",
                "--p0",
                "0.5",
                "--eta",
                "pi",
                "--delta-points",
                "1"
            ]),
            EXIT_CONTRACT
        );
        assert_eq!(run(["qsr", "--help"]), EXIT_OK);
    }

    #[test]
    fn verify_reports_both_conventions() {
        let cli = parse(&[
            "verify",
            "--family",
            "psi",
            "--p0",
            "1",
            "--eta-grid",
            "4",
            "--delta-grid",
            "4",
            "--quad-steps",
            "64",
        ]);
        let out = execute(&cli).unwrap().body;
        assert!(out.contains("opposite convention"));
        assert!(out.contains("dynamic coefficient c = 1.0000"), "{out}");
    }
}
