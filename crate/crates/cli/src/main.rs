use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinlab::{run, Command, Format, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "spinlab", version, about = "Spin-boson chain spectra, landscapes and phase diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Exact and perturbative spectra with effective-Hamiltonian residuals.
    Spectrum(Common),
    /// Classical energy profile and stationary points.
    Landscape(Common),
    /// Phase-diagram sweep over (J, J~).
    Diagram(Common),
    /// Finite-spin ground energy per spin against the classical minimum.
    Convergence(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.path).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, env = "SPINLAB_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (command, common) = match cli.command {
        Sub::Spectrum(c) => (Command::Spectrum, c),
        Sub::Landscape(c) => (Command::Landscape, c),
        Sub::Diagram(c) => (Command::Diagram, c),
        Sub::Convergence(c) => (Command::Convergence, c),
    };
    let overrides = Overrides {
        out: common.out,
        format: common.format,
        threads: common.threads,
    };
    let result = RunConfig::load(&common.config).and_then(|cfg| run(command, cfg, &overrides));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("spinlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
