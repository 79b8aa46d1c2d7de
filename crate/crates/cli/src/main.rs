//! `eitfwm`: sweeps and integrity checks for the two-frequency-mode channel.
//!
//! Each figure subcommand writes a deterministic CSV (or JSON) table; `check`
//! runs the built-in identity suites; `transfer` dumps one transfer matrix.

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;

use eitfwm::fock::{
    apply_channel, apply_channel_dilation, choi_matrix, FockDensityMatrix, PureTwoModeState,
};
use eitfwm::gates::{
    coherent_response, hadamard_detuning, hom_probabilities, noon_report, qubit_probabilities,
    swap_report, Branch,
};
use eitfwm::medium::{loss_identity_check, transfer_matrix, transfer_matrix_expm, MediumParams};

const EXIT_USAGE: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_CHECK: u8 = 3;

#[derive(Parser)]
#[command(name = "eitfwm", version, about = "Two-frequency-mode EIT/FWM channel sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coherent transmittances and phase shifts vs relative phase.
    Fig2(SweepArgs),
    /// Single-photon output probabilities vs optical depth.
    Fig3a(SweepArgs),
    /// Hadamard balance detunings vs amplitude ratio u.
    Fig3b(SweepArgs),
    /// Two-photon output probabilities vs detuning.
    Fig4a(SweepArgs),
    /// Two-photon probabilities vs optical depth along delta = od/pi.
    Fig4b(SweepArgs),
    /// NOON fidelity vs optical depth along delta = od/pi.
    Fig4c(SweepArgs),
    /// SWAP fidelity statistics vs optical depth along delta = od/2pi.
    Fig5a(SweepArgs),
    /// SWAP truth table at a single operating point.
    Fig5b(SweepArgs),
    /// Run the transfer-matrix, channel, and quadrature identity suites.
    Check,
    /// Print one transfer matrix and derived quantities as JSON.
    Transfer(TransferArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum DeltaRule {
    /// delta = od / pi
    OdOverPi,
    /// delta = od / (2 pi)
    OdOver2pi,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Csv,
    Json,
}

/// Sweep flags shared by the figure subcommands. Every field can also come
/// from a JSON config file; explicit flags win.
#[derive(Args, Debug, Default, Clone)]
struct SweepArgs {
    /// JSON file with the same keys as the flags (snake_case).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Optical depth (fixed value, or ignored by od sweeps).
    #[arg(long)]
    od: Option<f64>,
    /// Detuning in units of Gamma; mutually exclusive with --delta-rule.
    #[arg(long)]
    delta: Option<f64>,
    /// Rule tying the detuning to the optical depth.
    #[arg(long, value_enum)]
    delta_rule: Option<DeltaRule>,
    /// Number of grid points (>= 2).
    #[arg(long)]
    points: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Table format.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Qubit amplitude ratio u.
    #[arg(long)]
    u: Option<f64>,
    /// Coherent amplitude ratio u_beta.
    #[arg(long)]
    u_beta: Option<f64>,
    /// Relative phase phi_r (radians).
    #[arg(long)]
    phi_r: Option<f64>,
    /// Coupling-field phase (radians).
    #[arg(long)]
    phi_c: Option<f64>,
    /// Driving-field phase (radians).
    #[arg(long)]
    phi_d: Option<f64>,
    /// Lower end of the swept variable.
    #[arg(long)]
    min: Option<f64>,
    /// Upper end of the swept variable.
    #[arg(long)]
    max: Option<f64>,
}

/// File-side mirror of [`SweepArgs`].
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    od: Option<f64>,
    delta: Option<f64>,
    delta_rule: Option<DeltaRule>,
    points: Option<usize>,
    output: Option<PathBuf>,
    format: Option<Format>,
    u: Option<f64>,
    u_beta: Option<f64>,
    phi_r: Option<f64>,
    phi_c: Option<f64>,
    phi_d: Option<f64>,
    min: Option<f64>,
    max: Option<f64>,
}

#[derive(Args, Debug)]
struct TransferArgs {
    #[arg(long)]
    od: f64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 0.0)]
    phi_c: f64,
    #[arg(long, default_value_t = 0.0)]
    phi_d: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(String),
    CheckFailed,
}

impl From<eitfwm::Error> for CliError {
    fn from(err: eitfwm::Error) -> Self {
        CliError::Domain(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Domain(format!("io error: {err}"))
    }
}

/// Resolved sweep settings after merging config file and defaults.
struct Sweep {
    od: f64,
    delta: Option<f64>,
    delta_rule: Option<DeltaRule>,
    points: usize,
    output: Option<PathBuf>,
    format: Format,
    u: f64,
    u_beta: f64,
    phi_r: f64,
    phi_c: f64,
    phi_d: f64,
    min: f64,
    max: f64,
}

/// Per-subcommand defaults for the merge.
struct SweepDefaults {
    od: f64,
    delta_rule: Option<DeltaRule>,
    u: f64,
    u_beta: f64,
    phi_r: f64,
    min: f64,
    max: f64,
}

impl SweepArgs {
    fn resolve(&self, defaults: &SweepDefaults) -> Result<Sweep, CliError> {
        let file: SweepFile = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Usage(format!("--config {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?
            }
            None => SweepFile::default(),
        };
        let delta = self.delta.or(file.delta);
        let delta_rule = self.delta_rule.or(file.delta_rule);
        if delta.is_some() && delta_rule.is_some() {
            return Err(CliError::Usage(
                "--delta and --delta-rule are mutually exclusive".to_string(),
            ));
        }
        let points = self.points.or(file.points).unwrap_or(400);
        if points < 2 {
            return Err(CliError::Usage(format!("--points must be >= 2, got {points}")));
        }
        let min = self.min.or(file.min).unwrap_or(defaults.min);
        let max = self.max.or(file.max).unwrap_or(defaults.max);
        if !min.is_finite() || !max.is_finite() || min >= max {
            return Err(CliError::Usage(format!("--min {min} must be below --max {max}")));
        }
        Ok(Sweep {
            od: self.od.or(file.od).unwrap_or(defaults.od),
            delta,
            delta_rule: delta_rule.or(defaults.delta_rule),
            points,
            output: self.output.clone().or(file.output),
            format: self.format.or(file.format).unwrap_or(Format::Csv),
            u: self.u.or(file.u).unwrap_or(defaults.u),
            u_beta: self.u_beta.or(file.u_beta).unwrap_or(defaults.u_beta),
            phi_r: self.phi_r.or(file.phi_r).unwrap_or(defaults.phi_r),
            phi_c: self.phi_c.or(file.phi_c).unwrap_or(0.0),
            phi_d: self.phi_d.or(file.phi_d).unwrap_or(0.0),
            min,
            max,
        })
    }
}

impl Sweep {
    fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| self.min + (self.max - self.min) * k as f64 / (n - 1) as f64)
            .collect()
    }

    /// Detuning for a given optical depth under the active rule.
    fn delta_for(&self, od: f64) -> f64 {
        if let Some(delta) = self.delta {
            return delta;
        }
        match self.delta_rule {
            Some(DeltaRule::OdOverPi) => od / PI,
            Some(DeltaRule::OdOver2pi) => od / (2.0 * PI),
            None => od / PI,
        }
    }

    fn params(&self, od: f64, delta: f64) -> MediumParams {
        MediumParams::new(od, delta).with_phases(self.phi_c, self.phi_d)
    }
}

#[derive(Clone)]
enum Cell {
    Num(f64),
    Text(String),
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

fn fmt_num(v: f64) -> String {
    // 12 significant digits, locale independent.
    format!("{v:.11e}")
}

impl Table {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.header.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|c| match c {
                            Cell::Num(v) => fmt_num(*v),
                            Cell::Text(s) => s.clone(),
                        })
                        .collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: serde_json::Map<String, serde_json::Value> = self
                            .header
                            .iter()
                            .zip(row)
                            .map(|(name, cell)| {
                                let value = match cell {
                                    Cell::Num(v) => serde_json::json!(v),
                                    Cell::Text(s) => serde_json::json!(s),
                                };
                                (name.to_string(), value)
                            })
                            .collect();
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                let mut text = serde_json::to_string_pretty(&rows).expect("serializable rows");
                text.push('\n');
                text
            }
        }
    }
}

fn emit(table: &Table, format: Format, output: Option<&PathBuf>) -> Result<(), CliError> {
    let text = table.render(format);
    match output {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn sweep_rows<F>(grid: &[f64], row: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(f64) -> Result<Vec<Cell>, CliError> + Sync,
{
    grid.par_iter().map(|&x| row(x)).collect()
}

fn fig2(args: &SweepArgs) -> Result<(), CliError> {
    let sweep = args.resolve(&SweepDefaults {
        od: 50.0,
        delta_rule: None,
        u: 1.0,
        u_beta: 1.0,
        phi_r: 0.0,
        min: 0.0,
        max: 2.0 * PI,
    })?;
    let params = sweep.params(sweep.od, sweep.delta.unwrap_or(13.0));
    let rows = sweep_rows(&sweep.grid(), |phi_r| {
        let resp = coherent_response(&params, sweep.u_beta, phi_r)?;
        Ok(vec![
            Cell::Num(phi_r),
            Cell::Num(resp.t_p),
            Cell::Num(resp.t_s),
            Cell::Num(resp.dphi_p),
            Cell::Num(resp.dphi_s),
        ])
    })?;
    let table = Table {
        header: vec!["phi_r", "T_p", "T_s", "dphi_p", "dphi_s"],
        rows,
    };
    emit(&table, sweep.format, sweep.output.as_ref())
}

fn fig3a(args: &SweepArgs) -> Result<(), CliError> {
    let sweep = args.resolve(&SweepDefaults {
        od: 200.0,
        delta_rule: None,
        u: 1.0,
        u_beta: 1.0,
        phi_r: PI / 2.0,
        min: 0.0,
        max: 400.0,
    })?;
    let delta = sweep.delta.unwrap_or(200.0 / PI);
    let phi_u = sweep.phi_r + sweep.phi_c - sweep.phi_d;
    let rows = sweep_rows(&sweep.grid(), |od| {
        let rep = qubit_probabilities(&sweep.params(od, delta), sweep.u, phi_u)?;
        Ok(vec![Cell::Num(od), Cell::Num(rep.p_1p0s), Cell::Num(rep.p_0p1s)])
    })?;
    let table = Table {
        header: vec!["od", "p_1p0s", "p_0p1s"],
        rows,
    };
    emit(&table, sweep.format, sweep.output.as_ref())
}

fn fig3b(args: &SweepArgs) -> Result<(), CliError> {
    let sweep = args.resolve(&SweepDefaults {
        od: 200.0,
        delta_rule: None,
        u: 1.0,
        u_beta: 1.0,
        phi_r: PI / 2.0,
        // Below u of about 0.26 the signal balance condition has no root
        // inside (0, od] at the default depth.
        min: 0.3,
        max: 2.0,
    })?;
    let od = sweep.od;
    let rows = sweep_rows(&sweep.grid(), |u| {
        let probe = hadamard_detuning(od, u, Branch::Probe)?;
        let signal = hadamard_detuning(od, u, Branch::Signal)?;
        Ok(vec![Cell::Num(u), Cell::Num(probe), Cell::Num(signal)])
    })?;
    let table = Table {
        header: vec!["u", "delta_probe", "delta_signal"],
        rows,
    };
    emit(&table, sweep.format, sweep.output.as_ref())
}

fn fig4a(args: &SweepArgs) -> Result<(), CliError> {
    let sweep = args.resolve(&SweepDefaults {
        od: 200.0,
        delta_rule: None,
        u: 1.0,
        u_beta: 1.0,
        phi_r: 0.0,
        min: 10.0,
        max: 120.0,
    })?;
    let od = sweep.od;
    let rows = sweep_rows(&sweep.grid(), |delta| {
        let hom = hom_probabilities(&sweep.params(od, delta))?;
        Ok(vec![
            Cell::Num(delta),
            Cell::Num(hom.p_2p0s),
            Cell::Num(hom.p_0p2s),
            Cell::Num(hom.p_1p1s),
        ])
    })?;
    let table = Table {
        header: vec!["delta", "p_2p0s", "p_0p2s", "p_1p1s"],
        rows,
    };
    emit(&table, sweep.format, sweep.output.as_ref())
}

fn fig4b(args: &SweepArgs) -> Result<(), CliError> {
    let sweep = args.resolve(&SweepDefaults {
        od: 200.0,
        delta_rule: Some(DeltaRule::OdOverPi),
        u: 1.0,
        u_beta: 1.0,
        phi_r: 0.0,
        min: 10.0,
        max: 2000.0,
    })?;
    let rows = sweep_rows(&sweep.grid(), |od| {
        let hom = hom_probabilities(&sweep.params(od, sweep.delta_for(od)))?;
        Ok(vec![
            Cell::Num(od),
            Cell::Num(hom.p_2p0s),
            Cell::Num(hom.p_0p2s),
            Cell::Num(hom.p_2p0s + hom.p_0p2s),
        ])
    })?;
    let table = Table {
        header: vec!["od", "p_2p0s", "p_0p2s", "sum"],
        rows,
    };
    emit(&table, sweep.format, sweep.output.as_ref())
}

fn fig4c(args: &SweepArgs) -> Result<(), CliError> {
    let sweep = args.resolve(&SweepDefaults {
        od: 200.0,
        delta_rule: Some(DeltaRule::OdOverPi),
        u: 1.0,
        u_beta: 1.0,
        phi_r: 0.0,
        min: 10.0,
        max: 2000.0,
    })?;
    let rows = sweep_rows(&sweep.grid(), |od| {
        let rep = noon_report(&sweep.params(od, sweep.delta_for(od)))?;
        Ok(vec![
            Cell::Num(od),
            Cell::Num(rep.noon_fidelity),
            Cell::Num(rep.noon_fidelity * rep.noon_fidelity),
        ])
    })?;
    let table = Table {
        header: vec!["od", "noon_fidelity_sqrt", "noon_fidelity_linear"],
        rows,
    };
    emit(&table, sweep.format, sweep.output.as_ref())
}

fn fig5a(args: &SweepArgs) -> Result<(), CliError> {
    let sweep = args.resolve(&SweepDefaults {
        od: 1000.0,
        delta_rule: Some(DeltaRule::OdOver2pi),
        u: 1.0,
        u_beta: 1.0,
        phi_r: 0.0,
        min: 50.0,
        max: 2000.0,
    })?;
    let rows = sweep_rows(&sweep.grid(), |od| {
        let rep = swap_report(&sweep.params(od, sweep.delta_for(od)))?;
        Ok(vec![
            Cell::Num(od),
            Cell::Num(rep.mean_fidelity),
            Cell::Num(rep.std_fidelity),
        ])
    })?;
    let table = Table {
        header: vec!["od", "mean_fidelity", "std_fidelity"],
        rows,
    };
    emit(&table, sweep.format, sweep.output.as_ref())
}

fn fig5b(args: &SweepArgs) -> Result<(), CliError> {
    let sweep = args.resolve(&SweepDefaults {
        od: 1000.0,
        delta_rule: Some(DeltaRule::OdOver2pi),
        u: 1.0,
        u_beta: 1.0,
        phi_r: 0.0,
        min: 50.0,
        max: 2000.0,
    })?;
    let od = sweep.od;
    let rep = swap_report(&sweep.params(od, sweep.delta_for(od)))?;
    let mut rows = Vec::new();
    for (input, row) in &rep.truth_table {
        for (output, prob) in row {
            rows.push(vec![
                Cell::Text(input.clone()),
                Cell::Text(output.clone()),
                Cell::Num(*prob),
            ]);
        }
    }
    let table = Table {
        header: vec!["input", "output", "probability"],
        rows,
    };
    emit(&table, sweep.format, sweep.output.as_ref())
}

fn transfer(args: &TransferArgs) -> Result<(), CliError> {
    let params = MediumParams::new(args.od, args.delta).with_phases(args.phi_c, args.phi_d);
    let tm = transfer_matrix(&params)?;
    let complex = |z: Complex64| serde_json::json!({ "re": z.re, "im": z.im });
    let value = serde_json::json!({
        "od": args.od,
        "delta": args.delta,
        "phi_c": args.phi_c,
        "phi_d": args.phi_d,
        "a": complex(tm.a),
        "b": complex(tm.b),
        "c": complex(tm.c),
        "d": complex(tm.d),
        "phase_diff": tm.phase_diff(),
        "loss_probe": tm.loss_probe(),
        "loss_signal": tm.loss_signal(),
        "absorption_rate": params.absorption_rate(),
    });
    let mut text = serde_json::to_string_pretty(&value).expect("serializable");
    text.push('\n');
    match &args.output {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn check() -> Result<(), CliError> {
    let mut all_ok = true;
    let mut run = |name: &str, ok: bool, residual: f64, tol: f64| {
        let verdict = if ok { "pass" } else { "FAIL" };
        println!("check {name}: {verdict} (residual {residual:.3e}, tolerance {tol:.0e})");
        all_ok &= ok;
    };

    let mut worst = 0.0f64;
    for od in [0.0, 1.0, 50.0, 200.0, 1000.0] {
        for delta in [0.0, 1.0, 13.0, od / PI, od] {
            let params = MediumParams::new(od, delta).with_phases(0.8, 0.1);
            let diff = transfer_matrix(&params)?.max_abs_diff(&transfer_matrix_expm(&params)?);
            worst = worst.max(diff);
        }
    }
    run("transfer matrix analytic vs expm", worst <= 1e-12, worst, 1e-12);

    let tm = transfer_matrix(&MediumParams::new(200.0, 200.0 / PI).with_phases(0.8, 0.1))?;
    let mut worst = 0.0f64;
    for (n_p, n_s) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)] {
        let rho = FockDensityMatrix::fock_state(2, n_p, n_s)?;
        let diff = apply_channel(&tm, &rho)?.max_abs_diff(&apply_channel_dilation(&tm, &rho)?);
        worst = worst.max(diff);
    }
    let qubit = FockDensityMatrix::from_pure(&PureTwoModeState::two_color_qubit(2, 1.0, 0.7)?);
    worst = worst
        .max(apply_channel(&tm, &qubit)?.max_abs_diff(&apply_channel_dilation(&tm, &qubit)?));
    run("channel vs dilation oracle", worst <= 1e-10, worst, 1e-10);

    let choi = choi_matrix(&tm, 2)?;
    let herm = (&choi + choi.adjoint()).scale(0.5);
    let min_eig = nalgebra::SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    run("Choi positivity", min_eig >= -1e-10, min_eig.min(0.0).abs(), 1e-10);

    let mut worst = 0.0f64;
    for od in [1.0, 50.0, 200.0, 1000.0] {
        for delta in [0.0, 13.0, od / PI] {
            let rep = loss_identity_check(&MediumParams::new(od, delta), 32)?;
            worst = worst
                .max(rep.residual_probe)
                .max(rep.residual_signal)
                .max((rep.lhs_probe - rep.closed_form).abs());
        }
    }
    run("noise quadrature vs power deficit", worst <= 1e-9, worst, 1e-9);

    if all_ok {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

fn init_workers() {
    if let Ok(value) = std::env::var("EITFWM_WORKERS") {
        if let Ok(n) = value.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    init_workers();
    let result = match &cli.command {
        Command::Fig2(args) => fig2(args),
        Command::Fig3a(args) => fig3a(args),
        Command::Fig3b(args) => fig3b(args),
        Command::Fig4a(args) => fig4a(args),
        Command::Fig4b(args) => fig4b(args),
        Command::Fig4c(args) => fig4c(args),
        Command::Fig5a(args) => fig5a(args),
        Command::Fig5b(args) => fig5b(args),
        Command::Check => check(),
        Command::Transfer(args) => transfer(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DOMAIN)
        }
        Err(CliError::CheckFailed) => {
            eprintln!("error: one or more checks failed");
            ExitCode::from(EXIT_CHECK)
        }
    }
}
