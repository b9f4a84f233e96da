//! `coilfield` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input, 2 I/O failure, 3 numeric failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, ErrorKind};

#[derive(Debug, Parser)]
#[command(
    name = "coilfield",
    version,
    about = "Field maps and homogeneity of coaxial circular coil systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Preset catalog.
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
    /// Write a preset as a project file over its default region.
    Preset {
        #[arg(long)]
        name: String,
        /// Base radius, meters.
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        turns: u32,
        /// Current, amperes.
        #[arg(long)]
        current: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the field over the project's region.
    Simulate {
        #[arg(long)]
        project: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Print one line per completed row with the estimated time left.
        #[arg(long)]
        progress: bool,
    },
    /// Homogeneous region, inscribed square and experimentation volume.
    Homogeneity {
        #[arg(long)]
        results: PathBuf,
        /// Percent, in (0, 100].
        #[arg(long, allow_negative_numbers = true)]
        threshold: f64,
        /// Use the signed deviation instead of its magnitude.
        #[arg(long)]
        signed: bool,
        /// Results file with the homogeneity report attached.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Heatmap of |B| as SVG.
    Render {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        /// Lower color limit, mT.
        #[arg(long, allow_negative_numbers = true, requires = "bmax")]
        bmin: Option<f64>,
        /// Upper color limit, mT.
        #[arg(long, allow_negative_numbers = true, requires = "bmin")]
        bmax: Option<f64>,
        #[arg(long, default_value = "viridis")]
        colormap: String,
        #[arg(long)]
        show_coils: bool,
    },
    /// Field at the lattice point nearest (y, z).
    Probe {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
    },
    /// Field along the symmetry axis (y = 0) as CSV.
    AxisProfile {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum PresetsAction {
    List,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Presets {
            action: PresetsAction::List,
        } => commands::presets_list(),
        Command::Preset {
            name,
            radius,
            turns,
            current,
            out,
        } => commands::preset(&name, radius, turns, current, &out),
        Command::Simulate { project, out, progress } => commands::simulate(&project, &out, progress),
        Command::Homogeneity {
            results,
            threshold,
            signed,
            out,
            svg,
        } => commands::homogeneity(&results, threshold, signed, &out, svg.as_deref()),
        Command::Render {
            results,
            svg,
            bmin,
            bmax,
            colormap,
            show_coils,
        } => commands::render(&results, &svg, bmin.zip(bmax), &colormap, show_coils),
        Command::Probe { results, y, z } => commands::probe(&results, y, z),
        Command::AxisProfile { results, out } => commands::axis_profile(&results, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ErrorKind::Validation.code())
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind.code())
        }
    }
}
