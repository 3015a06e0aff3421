use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use semigroup_bounds::experiment::{
    cmd_figure, cmd_iterate, cmd_profile, cmd_update, cmd_wei, ExperimentConfig, FigureName,
    FigureRange, Report,
};
use semigroup_bounds::output::Format;
use semigroup_bounds::Error;

/// Semigroup norm bounds from resolvent bounds.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// Write here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Worker threads for frequency sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// The bound U(1, 0, r) = min(1, e^{π/2 - rt}).
    Wei {
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 0.01)]
        h: f64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
    },
    /// One round of updates (or Gearhart–Prüss bounds) from a config.
    Update {
        #[arg(long)]
        config: PathBuf,
    },
    /// Iterated updates from a config.
    Iterate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Figure data: omegar, jordan3 or diffop_r.
    Figure {
        name: FigureName,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// The resolvent profile r(ω) over the config's frequency set.
    Profile {
        #[arg(long)]
        config: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Invalid { .. } | Error::Json(_) => 2,
        Error::NonConvergent(_) | Error::Domain(_) | Error::Pole { .. } | Error::Precondition(_) => 3,
        Error::Io(_) | Error::Csv(_) => 1,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let mut output = None;
    let report: Report = match &cli.cmd {
        Cmd::Wei { r, h, t_max } => cmd_wei(*r, *h, *t_max)?,
        Cmd::Update { config } | Cmd::Iterate { config } | Cmd::Profile { config } => {
            let cfg = ExperimentConfig::from_path(config)?;
            output = cfg.output.clone();
            match cli.cmd {
                Cmd::Update { .. } => cmd_update(&cfg)?,
                Cmd::Iterate { .. } => cmd_iterate(&cfg)?,
                _ => cmd_profile(&cfg)?,
            }
        }
        Cmd::Figure { name, from, to, step } => cmd_figure(
            *name,
            FigureRange {
                from: *from,
                to: *to,
                step: *step,
            },
        )?,
    };
    let output = output.unwrap_or_default();
    let format = cli.format.or(output.format).unwrap_or(Format::Csv);
    match cli.out.or(output.path) {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(format, &mut w)?;
            w.flush()?;
        }
        None => report.write(format, io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("semibound: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
