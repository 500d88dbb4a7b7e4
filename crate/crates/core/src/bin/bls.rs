use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bls::commands::{cmd_check, cmd_m_curve, cmd_separation, cmd_shear_field};
use bls::config::RunConfig;

#[derive(Parser)]
#[command(name = "bls", version, about = "Wall shear, pressure and separation diagnostics for half-space Stokes flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; falls back to BLS_THREADS, then to the number of cores.
    #[arg(long, env = "BLS_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// M(t) and M'(t) on 200 times with the t0* marker.
    MCurve(Common),
    /// Wall shear, D²wₙ and tangential pressure gradient over radii × times.
    ShearField(Common),
    /// Separation records, loci verdicts and reports.
    Separation(Common),
    /// Assumption and appendix-condition report.
    Check(Common),
}

type Runner = fn(&RunConfig, &std::path::Path) -> bls::Result<Vec<PathBuf>>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, Runner) = match &cli.command {
        Command::MCurve(c) => (c, cmd_m_curve),
        Command::ShearField(c) => (c, cmd_shear_field),
        Command::Separation(c) => (c, cmd_separation),
        Command::Check(c) => (c, cmd_check),
    };
    if let Some(threads) = common.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().expect("thread pool is configured once");
    }
    let result = RunConfig::load(&common.config).and_then(|config| run(&config, &common.out));
    match result {
        Ok(paths) => {
            for path in paths {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
