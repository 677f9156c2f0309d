mod config;
mod csv;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use magnonet::moments::validate_adiabatic;
use magnonet::propagators::{conversion_efficiency, squeezing_parameter};
use magnonet::protocol::{
    entangle, fig5_curves, fig5_r_grid, run_transfer, validate, Check, EntangleSettings,
    ScenarioConfig, TruncationPolicy, FIG5_EFFICIENCIES, SQUEEZE_TRUNCATION,
};
use magnonet::Error;

use config::{ConfigFile, DEFAULT_QLE_RATIOS};
use csv::{num, opt, sha256_hex, RunManifest, Table};

#[derive(Parser)]
#[command(name = "magnonet", version, about = "Pulsed magnon-phonon network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Magnon-to-phonon state transfer over fiber, one row per initial state.
    Transfer(Run),
    /// Magnon-phonon entanglement from one Stokes pulse and one swap.
    Entangle(Run),
    /// Log negativity over the r grid for W = 1, 0.8, 0.5, 0.2.
    Fig5(Fig5Args),
    /// Regime checks for a scenario.
    Validate(Run),
    /// Swap efficiency from the moment equations against the adiabatic formula.
    Qle(Run),
}

#[derive(Args)]
struct Run {
    /// Scenario file (TOML).
    config: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Fig5Args {
    /// Optional scenario file; only `numerics.leak_tol` is read.
    config: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-mode Fock truncation.
    #[arg(long)]
    truncation: Option<usize>,
}

enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::LeakBudget { .. }
            | Error::Unstable { .. }
            | Error::Unphysical(_)
            | Error::NotPositive(_)
            | Error::NotHermitian(_)
            | Error::NotNormalized(_)
            | Error::Trace(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

struct Loaded {
    file: ConfigFile,
    scenario: ScenarioConfig,
    hash: String,
}

fn load(path: &Path, truncation: Option<usize>) -> Result<Loaded, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure::Config(format!("{}: not UTF-8", path.display())))?;
    let file = ConfigFile::parse(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let mut scenario = file.scenario().map_err(Failure::Config)?;
    if truncation.is_some() {
        scenario.truncation = truncation;
    }
    Ok(Loaded { file, scenario, hash: sha256_hex(&bytes) })
}

fn manifest(name: &str, common: &Common, hash: Option<String>) -> RunManifest {
    let mut command = name.to_string();
    if let Some(d) = common.truncation {
        command.push_str(&format!(" --truncation {d}"));
    }
    RunManifest { command, config_hash: hash }
}

fn emit(table: &Table, out: &Option<PathBuf>) -> Result<(), Failure> {
    let text = table.render();
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn warn(checks: &[Check]) {
    for c in checks.iter().filter(|c| !c.passed) {
        eprintln!(
            "warning: {} = {:.6e} fails {} {:.3e}",
            c.name, c.measured, c.relation, c.limit
        );
    }
}

fn cmd_transfer(run: &Run) -> Result<(), Failure> {
    let l = load(&run.config, run.common.truncation)?;
    let mut table = Table::new(
        manifest("transfer", &run.common, Some(l.hash)),
        &["state", "S", "W", "T", "F_engine", "F_closed", "abs_diff", "F_unconditional"],
    );
    warn(&validate(&l.scenario)?);
    for state in &l.scenario.states {
        let r = run_transfer(&l.scenario, state)?;
        table.push(vec![
            r.state.clone(),
            num(r.s),
            num(r.w),
            num(r.t),
            num(r.fidelity),
            opt(r.fidelity_closed),
            opt(r.fidelity_closed.map(|c| (c - r.fidelity).abs())),
            num(r.fidelity_unconditional),
        ]);
    }
    emit(&table, &run.common.out)
}

fn cmd_entangle(run: &Run) -> Result<(), Failure> {
    let l = load(&run.config, run.common.truncation)?;
    let s = &l.scenario;
    warn(&validate(s)?);
    let r = match l.file.entangle.r {
        Some(r) => r,
        None => squeezing_parameter(&s.stokes_pulse()?).squeezing,
    };
    let w = match l.file.entangle.w {
        Some(w) => w,
        None => conversion_efficiency(&s.mechanical_pulse()?).efficiency,
    };
    let t = if s.include_loss_in_entanglement {
        eprintln!("note: fiber loss applied to the entanglement pulse (extension)");
        s.fiber.transmittance()
    } else {
        1.0
    };
    let rep = entangle(&EntangleSettings {
        r,
        w,
        t,
        truncation: s.truncation.unwrap_or(SQUEEZE_TRUNCATION),
        leak_tol: s.leak_tol,
        unconditional: true,
    })?;
    let mut table = Table::new(
        manifest("entangle", &run.common, Some(l.hash)),
        &["r", "W", "EN_closed", "EN_fock", "truncation", "leak", "EN_unconditional"],
    );
    table.push(vec![
        num(rep.r),
        num(rep.w),
        num(rep.en_closed),
        num(rep.en_fock),
        rep.truncation.to_string(),
        num(rep.leak),
        opt(rep.en_unconditional),
    ]);
    emit(&table, &run.common.out)
}

fn cmd_fig5(args: &Fig5Args) -> Result<(), Failure> {
    let (leak_tol, hash) = match &args.config {
        Some(path) => {
            let l = load(path, None)?;
            (l.scenario.leak_tol, Some(l.hash))
        }
        None => (ScenarioConfig::reference().leak_tol, None),
    };
    let policy = match args.common.truncation {
        Some(d) => TruncationPolicy::Fixed(d),
        None => TruncationPolicy::Adaptive { min: SQUEEZE_TRUNCATION },
    };
    let rows = fig5_curves(&fig5_r_grid(), &FIG5_EFFICIENCIES, policy, leak_tol)?;
    let mut table = Table::new(
        manifest("fig5", &args.common, hash),
        &["r", "W", "EN_closed", "EN_fock", "truncation", "leak"],
    );
    for row in rows {
        table.push(vec![
            num(row.r),
            num(row.w),
            num(row.en_closed),
            num(row.en_fock),
            row.truncation.to_string(),
            num(row.leak),
        ]);
    }
    emit(&table, &args.common.out)
}

fn cmd_validate(run: &Run) -> Result<(), Failure> {
    let l = load(&run.config, run.common.truncation)?;
    let checks = validate(&l.scenario)?;
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        eprintln!(
            "{:<width$}  {}  {:.6e} {} {:.3e}",
            c.name,
            if c.passed { "pass" } else { "WARN" },
            c.measured,
            c.relation,
            c.limit,
        );
    }
    eprintln!("fiber transmittance T = {:.6}", l.scenario.fiber.transmittance());
    let mut table = Table::new(
        manifest("validate", &run.common, Some(l.hash)),
        &["check", "passed", "measured", "relation", "limit"],
    );
    for c in &checks {
        table.push(vec![
            c.name.to_string(),
            c.passed.to_string(),
            num(c.measured),
            c.relation.to_string(),
            num(c.limit),
        ]);
    }
    table.push(vec![
        "fiber_transmittance".into(),
        "true".into(),
        num(l.scenario.fiber.transmittance()),
        "=".into(),
        String::new(),
    ]);
    emit(&table, &run.common.out)
}

fn cmd_qle(run: &Run) -> Result<(), Failure> {
    let l = load(&run.config, run.common.truncation)?;
    let q = &l.file.qle;
    let readout = l.scenario.readout_pulse()?;
    let exponent = q.exponent.unwrap_or_else(|| readout.exponent());
    let kappa = q
        .kappa_over_2pi_hz
        .map_or(readout.linewidth(), |f| 2.0 * std::f64::consts::PI * f);
    let ratios = q.g_over_kappa.clone().unwrap_or_else(|| DEFAULT_QLE_RATIOS.to_vec());
    let rows = validate_adiabatic(exponent, kappa, &ratios)?;
    let mut table = Table::new(
        manifest("qle", &run.common, Some(l.hash)),
        &["G_over_kappa", "eta_integrated", "eta_closed", "rel_err"],
    );
    for row in rows {
        table.push(vec![
            num(row.g_over_kappa),
            num(row.eta_integrated),
            num(row.eta_closed),
            num(row.rel_err),
        ]);
    }
    emit(&table, &run.common.out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Transfer(r) => cmd_transfer(r),
        Command::Entangle(r) => cmd_entangle(r),
        Command::Fig5(a) => cmd_fig5(a),
        Command::Validate(r) => cmd_validate(r),
        Command::Qle(r) => cmd_qle(r),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
