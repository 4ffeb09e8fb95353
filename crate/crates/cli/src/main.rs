use std::path::PathBuf;
use std::process::ExitCode;

use arn_core::{EngineError, EvolveError, ExperimentError, GenomeError, SiteKind};
use clap::{Parser, Subcommand};

mod commands;
mod config;
mod manifest;

use config::{ConfigError, GaArgs, SimArgs};

#[derive(Debug, Parser)]
#[command(
    name = "arn",
    version,
    about = "Spatial artificial gene regulatory network simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a uniformly random genome.
    Gen {
        #[arg(long, default_value_t = 3000)]
        length: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the gene table of a genome file as JSON.
    Parse { genome: PathBuf },
    /// Run one simulation and write its trace, metadata and plot.
    Simulate {
        genome: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Evolve genomes for one of the benchmark problems.
    Evolve {
        /// 1: hit a target concentration, 2: alternate the two leading proteins.
        #[arg(long)]
        problem: u32,
        #[arg(long)]
        out_dir: PathBuf,
        /// Independent GA runs to aggregate.
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[command(flatten)]
        ga: GaArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Re-run one genome while varying a single parameter.
    Sweep {
        genome: PathBuf,
        /// beta | delta | tf_per_gene | grid_size | initial_concentration_mode
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Mean gene count of random genomes per length.
    Stats {
        /// START..END[:STEP] (inclusive, step defaults to 1000) or a comma list.
        #[arg(long, default_value = "1000..10000:1000")]
        lengths: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Move one regulatory site and compare against the unmoved run.
    Perturb {
        genome: PathBuf,
        #[arg(long)]
        gene: usize,
        #[arg(long)]
        site: SiteKind,
        #[arg(long, allow_negative_numbers = true)]
        dx: i64,
        #[arg(long, allow_negative_numbers = true)]
        dy: i64,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Apply 0..=k cumulative point mutations at regulatory positions.
    Mutstudy {
        genome: PathBuf,
        #[arg(long, default_value_t = 5)]
        max_k: usize,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
    },
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Gen { length, seed, out } => commands::gen(length, seed, out.as_deref()),
        Command::Parse { genome } => commands::parse(&genome),
        Command::Simulate {
            genome,
            out_dir,
            sim,
        } => commands::simulate(&genome, &out_dir, &sim),
        Command::Evolve {
            problem,
            out_dir,
            runs,
            ga,
            sim,
        } => commands::evolve(problem, &out_dir, runs, &ga, &sim),
        Command::Sweep {
            genome,
            param,
            values,
            out_dir,
            sim,
        } => commands::sweep(&genome, &param, &values, &out_dir, &sim),
        Command::Stats {
            lengths,
            trials,
            seed,
            out_dir,
        } => commands::stats(&lengths, trials, seed, out_dir.as_deref()),
        Command::Perturb {
            genome,
            gene,
            site,
            dx,
            dy,
            out_dir,
            sim,
        } => commands::perturb(&genome, gene, site, (dx, dy), &out_dir, &sim),
        Command::Mutstudy {
            genome,
            max_k,
            out_dir,
            sim,
        } => commands::mutstudy(&genome, max_k, &out_dir, &sim),
    }
}

/// Short error class and exit code.
fn classify(err: &anyhow::Error) -> (&'static str, u8) {
    for cause in err.chain() {
        if cause.downcast_ref::<GenomeError>().is_some() {
            return ("invalid-genome", 3);
        }
        let engine = cause.downcast_ref::<EngineError>().or_else(|| {
            match cause.downcast_ref::<ExperimentError>() {
                Some(ExperimentError::Engine(e)) => Some(e),
                _ => None,
            }
        });
        match engine {
            Some(EngineError::NoGenes) => return ("no-genes", 4),
            Some(_) => return ("invalid-config", 2),
            None => {}
        }
        if cause.downcast_ref::<ConfigError>().is_some()
            || cause.downcast_ref::<EvolveError>().is_some()
            || cause.downcast_ref::<ExperimentError>().is_some()
        {
            return ("invalid-config", 2);
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return ("io", 5);
        }
    }
    ("error", 1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (kind, code) = classify(&err);
            let message: Vec<String> = err.chain().map(|c| c.to_string()).collect();
            eprintln!(
                "arn: error[{kind}]: {}",
                message.join(": ").replace('\n', " ")
            );
            ExitCode::from(code)
        }
    }
}
