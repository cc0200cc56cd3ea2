//! Command-line front end for coexistence-noise and secret-key-rate sweeps.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on numeric
//! failures (integration or verification).

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use coexist_core::scenario::Protocol;

use commands::{CommonArgs, FwmToolsArgs, NumericFailure};
use config::ConfigDocument;
use output::OutputFormat;

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum ProtocolArg {
    Bb84,
    GmcsHom,
    GmcsHet,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Protocol {
        match p {
            ProtocolArg::Bb84 => Protocol::Bb84,
            ProtocolArg::GmcsHom => Protocol::GmcsHom,
            ProtocolArg::GmcsHet => Protocol::GmcsHet,
        }
    }
}

#[derive(Parser)]
#[command(name = "coexist", version, about = "Coexistence interference and QKD rate modeling")]
struct Cli {
    /// Scenario configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Table format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutputFormat,

    /// Propagation direction: fwd, bwd or both (overrides the config).
    #[arg(long, global = true)]
    direction: Option<String>,

    /// Protocol: bb84, gmcs-hom or gmcs-het (overrides the config).
    #[arg(long, global = true, value_enum)]
    protocol: Option<ProtocolArg>,

    /// Run built-in oracle cross-checks alongside the command.
    #[arg(long, global = true)]
    verify: bool,

    /// Override the fiber's OH- concentration scale.
    #[arg(long, global = true)]
    oh_scale: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Wavelength-dependent fiber parameter table.
    FiberProfile,
    /// Per-mechanism interference noise versus wavelength.
    NoiseSweep,
    /// Secret-key rate versus wavelength (with optional extra-noise family).
    SkrSweep,
    /// Secret-key rate over the wavelength x length grid.
    SkrMap,
    /// Band-averaged SKR versus QKD band center, per band width.
    BandAverage,
    /// Noise and SKR for the configured classical-loading variants.
    MultiBand,
    /// FWM combination counting and spacing-suppression tables.
    FwmTools {
        /// Number of classical channels.
        #[arg(long, default_value_t = 16)]
        channels: u32,
        /// Single quantum slot index (all supported indices when omitted).
        #[arg(long)]
        quantum_index: Option<i64>,
        /// Emit the averaged-kernel suppression versus channel spacing.
        #[arg(long)]
        spacing_sweep: bool,
        /// Index mismatches i^2-h^2+k^2-l^2 for the spacing sweep.
        #[arg(long, value_delimiter = ',')]
        mismatch: Vec<i64>,
        #[arg(long, default_value_t = 200.0)]
        spacing_max_ghz: f64,
        #[arg(long, default_value_t = 100)]
        spacing_points: usize,
        #[arg(long, default_value_t = 0.2)]
        alpha_db_km: f64,
        #[arg(long, default_value_t = -28.0, allow_hyphen_values = true)]
        beta2_ps2_km: f64,
        #[arg(long, default_value_t = 50.0)]
        length_km: f64,
    },
    /// Schema and physics lint report for a configuration.
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

/// 2 for configuration problems, 3 for numeric failures.
fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<NumericFailure>().is_some() {
            return 3;
        }
        if let Some(core) = cause.downcast_ref::<coexist_core::Error>() {
            return match core {
                coexist_core::Error::Config(_) | coexist_core::Error::Parse(_) => 2,
                _ => 3,
            };
        }
    }
    2
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let common = CommonArgs {
        format: cli.format,
        output: cli.output.as_deref(),
        verify: cli.verify,
    };

    if let Command::FwmTools {
        channels,
        quantum_index,
        spacing_sweep,
        mismatch,
        spacing_max_ghz,
        spacing_points,
        alpha_db_km,
        beta2_ps2_km,
        length_km,
    } = &cli.command
    {
        let args = FwmToolsArgs {
            channels: *channels,
            quantum_index: *quantum_index,
            spacing_sweep: *spacing_sweep,
            mismatch: mismatch.clone(),
            spacing_max_ghz: *spacing_max_ghz,
            spacing_points: *spacing_points,
            alpha_db_km: *alpha_db_km,
            beta2_ps2_km: *beta2_ps2_km,
            length_km: *length_km,
        };
        return commands::fwm_tools(&args, &common);
    }

    let config_path = cli
        .config
        .as_ref()
        .context("--config is required for this command")?;
    let (cfg, base) = ConfigDocument::load(config_path)?;
    let direction = cli.direction.as_deref();

    match &cli.command {
        Command::FiberProfile => commands::fiber_profile(&cfg, &base, cli.oh_scale, &common),
        Command::Validate => commands::validate(&cfg, &base, cli.oh_scale, direction),
        Command::NoiseSweep => {
            let scenario = cfg.scenario(&base, cli.oh_scale, direction)?;
            commands::noise_sweep(&scenario, &cfg.lambda_grid(), &common)
        }
        Command::SkrSweep => {
            let scenario = cfg.scenario(&base, cli.oh_scale, direction)?;
            let protocol = pick_protocol(cli, &cfg)?;
            commands::skr_sweep(
                &scenario,
                &cfg.lambda_grid(),
                protocol,
                &cfg.run.extra_excess_noise_snu,
                &common,
            )
        }
        Command::SkrMap => {
            let scenario = cfg.scenario(&base, cli.oh_scale, direction)?;
            let protocol = pick_protocol(cli, &cfg)?;
            let lengths = cfg.length_grid_km()?;
            commands::skr_map_cmd(&scenario, &cfg.lambda_grid(), &lengths, protocol, &common)
        }
        Command::BandAverage => {
            let scenario = cfg.scenario(&base, cli.oh_scale, direction)?;
            let protocol = pick_protocol(cli, &cfg)?;
            commands::band_average(&cfg, &scenario, protocol, &common)
        }
        Command::MultiBand => {
            let protocol = pick_protocol(cli, &cfg)?;
            commands::multi_band(&cfg, &base, cli.oh_scale, direction, protocol, &common)
        }
        Command::FwmTools { .. } => unreachable!("handled above"),
    }
}

fn pick_protocol(cli: &Cli, cfg: &ConfigDocument) -> anyhow::Result<Protocol> {
    if let Some(p) = cli.protocol {
        return Ok(p.into());
    }
    if let Some(p) = cfg.run.protocol {
        return Ok(p);
    }
    bail!("no protocol selected: pass --protocol or set run.protocol in the config")
}
