//! `ringtrap` command-line tool.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ringtrap_cli::commands;
use ringtrap_cli::config::{LifetimeInputKind, RunConfig, SpectrumMode};
use ringtrap_cli::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ringtrap", version, about = "Microring atom-trap modelling and data reduction")]
struct Cli {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for synthetic data (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also render SVG plots.
    #[arg(long, global = true)]
    plot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Potential line cuts along z and the B_fict / U_tot map in the xz plane.
    Potential,
    /// Level energies and Raman coupling tables per axis.
    Raman,
    /// Fit a transmission spectrum (collective cooperativity or bare resonator).
    Spectrum(SpectrumArgs),
    /// Fit a pulsed superradiant decay.
    Decay(DecayArgs),
    /// Spilling thermometry, survival curve and density maps.
    Spill(DataArgs),
    /// Fit an atom-number loss curve.
    Lifetime(LifetimeArgs),
    /// Solve the trap calibration against the configured targets.
    Calibrate,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// CSV dataset; synthetic data from the config when omitted.
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum)]
    mode: Option<SpectrumMode>,
}

#[derive(Debug, Args)]
struct DecayArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Fit window start and end, ns.
    #[arg(long, num_args = 2, value_names = ["START", "END"])]
    window_ns: Option<Vec<f64>>,
    /// Background counts per bin.
    #[arg(long)]
    background: Option<f64>,
}

#[derive(Debug, Args)]
struct LifetimeArgs {
    #[command(flatten)]
    data: DataArgs,
    /// one | one+two | one+three
    #[arg(long, value_parser = parse_family)]
    family: Option<ringtrap::ModelFamily>,
    /// What the value column holds.
    #[arg(long, value_enum)]
    input: Option<LifetimeInputKind>,
    /// Hold τ fixed, s.
    #[arg(long, value_name = "SECONDS", conflicts_with = "free_tau")]
    fix_tau: Option<f64>,
    /// Fit τ even if the config fixes it.
    #[arg(long)]
    free_tau: bool,
    /// Hold n₀ fixed, m⁻³.
    #[arg(long, value_name = "PER_M3", conflicts_with = "free_n0")]
    fix_n0: Option<f64>,
    /// Fit n₀ even if the config fixes it.
    #[arg(long)]
    free_n0: bool,
}

fn parse_family(s: &str) -> Result<ringtrap::ModelFamily, String> {
    ringtrap::ModelFamily::parse(s).ok_or_else(|| format!("unknown model family {s:?} (one, one+two, one+three)"))
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            let base = path.parent().map(PathBuf::from).unwrap_or_default();
            RunConfig::from_json(&text, &base)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = load_config(&cli)?;
    let out_dir = cli.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let outputs = match cli.command {
        Command::Potential => commands::potential(&cfg, cli.plot)?,
        Command::Raman => commands::raman(&cfg, cli.plot)?,
        Command::Spectrum(a) => {
            if let Some(d) = a.data.data {
                cfg.spectrum.data = Some(d);
            }
            if let Some(m) = a.mode {
                cfg.spectrum.mode = m;
            }
            commands::spectrum(&cfg, cli.plot)?
        }
        Command::Decay(a) => {
            if let Some(d) = a.data.data {
                cfg.decay.data = Some(d);
            }
            if let Some(w) = a.window_ns {
                cfg.decay.window_s = [w[0] * 1e-9, w[1] * 1e-9];
            }
            if let Some(b) = a.background {
                cfg.decay.background = b;
            }
            commands::decay(&cfg, cli.plot)?
        }
        Command::Spill(a) => {
            if let Some(d) = a.data {
                cfg.spill.data = Some(d);
            }
            commands::spill(&cfg, cli.plot)?
        }
        Command::Lifetime(a) => {
            let l = &mut cfg.lifetime;
            if let Some(d) = a.data.data {
                l.data = Some(d);
            }
            if let Some(f) = a.family {
                l.family = f;
            }
            if let Some(i) = a.input {
                l.input = i;
            }
            if let Some(t) = a.fix_tau {
                l.fixed_tau_s = Some(t);
            }
            if a.free_tau {
                l.fixed_tau_s = None;
            }
            if let Some(n) = a.fix_n0 {
                l.fixed_n0_per_m3 = Some(n);
            }
            if a.free_n0 {
                l.fixed_n0_per_m3 = None;
            }
            commands::lifetime(&cfg, cli.plot)?
        }
        Command::Calibrate => commands::calibrate(&cfg)?,
    };
    outputs.commit(&out_dir)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
