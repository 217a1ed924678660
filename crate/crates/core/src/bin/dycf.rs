use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dycf::harness::{self, BenchSpec, RunSpec};
use dycf::streamgen::{self, Label, StreamConfig, StreamGenerator};
use dycf::{Error, Result};

#[derive(Parser)]
#[command(
    name = "dycf",
    version,
    about = "Streaming outlier detection with the Christoffel function"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled stream CSV from a stream configuration.
    Generate {
        config: PathBuf,
        /// Number of points of sub-stream 0; all sub-streams, concatenated,
        /// when omitted.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a detector as described by a run specification.
    Run {
        spec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV report path; a text summary is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time DyCF as the dimension grows.
    Bench {
        spec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn generate(config: PathBuf, n: Option<usize>, seed: Option<u64>, out: PathBuf) -> Result<()> {
    let mut cfg = StreamConfig::read(&config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let samples =
        match n {
            Some(n) => streamgen::generate(&cfg, n)?,
            None => {
                if cfg.length == 0 {
                    return Err(Error::config("stream.length", "set it or pass --n"));
                }
                let mut all = Vec::with_capacity(cfg.substreams * cfg.length);
                for k in 0..cfg.substreams {
                    let offset = all.len() as u64;
                    all.extend(StreamGenerator::new(&cfg, k as u64)?.take(cfg.length).map(
                        |mut s| {
                            s.index += offset;
                            s
                        },
                    ));
                }
                all
            }
        };
    let file = File::create(&out).map_err(|source| Error::Write {
        path: out.clone(),
        source,
    })?;
    streamgen::write_csv(BufWriter::new(file), &samples)?;
    let count = |l: Label| samples.iter().filter(|s| s.label == Some(l)).count();
    println!(
        "{}: {} points ({} normal, {} type1, {} type2)",
        out.display(),
        samples.len(),
        count(Label::Normal),
        count(Label::Type1),
        count(Label::Type2)
    );
    Ok(())
}

fn run(spec: PathBuf, seed: Option<u64>, out: Option<PathBuf>) -> Result<()> {
    let mut spec = RunSpec::read(&spec)?;
    if let Some(seed) = seed {
        spec = spec.with_seed(seed);
    }
    let report = harness::run(&spec)?;
    let summary = report.summary();
    print!("{summary}");
    if let Some(path) = out.or(spec.output) {
        harness::write_outputs(&path, |w| report.write_csv(w), &summary)?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn bench(spec: PathBuf, seed: Option<u64>, out: Option<PathBuf>) -> Result<()> {
    let mut spec = BenchSpec::read(&spec)?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let report = harness::run_bench(&spec)?;
    let summary = report.summary();
    print!("{summary}");
    if let Some(path) = out.or(spec.output) {
        harness::write_outputs(&path, |w| report.write_csv(w), &summary)?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate {
            config,
            n,
            seed,
            out,
        } => generate(config, n, seed, out),
        Command::Run { spec, seed, out } => run(spec, seed, out),
        Command::Bench { spec, seed, out } => bench(spec, seed, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            ExitCode::from(e.exit_code())
        }
    }
}
