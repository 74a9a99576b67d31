use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hamsq::harness::{self, CampaignSpec, Corpus, Mode, SubsetPolicy, Summary};

/// Exhaustive certificate campaigns for Hamiltonian cycles in graph squares.
#[derive(Parser)]
#[command(name = "hamsq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// graph6 corpus, one graph per line
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// largest order considered (in `construct`, of the assembled blockchains)
    #[arg(long, global = true)]
    n: Option<usize>,
    /// subset size for h-property / f-property, t for counterexample
    #[arg(long, global = true)]
    k: Option<usize>,
    /// per-instance search budget
    #[arg(long, global = true, default_value_t = 10_000)]
    timeout_ms: u64,
    /// worker threads (defaults to the number of CPUs)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// certificate file to write
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// draw at most this many argument tuples per graph
    #[arg(long, global = true)]
    sample: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a path/cycle property over every admissible tuple of every graph
    Verify {
        #[arg(value_enum)]
        property: Property,
    },
    /// Build the H_5 family over each corpus base and confirm absence
    Counterexample,
    /// Certify G² Hamiltonian for star-structured graphs
    Corollary,
    /// Glue Hamiltonian paths along random blockchains assembled from corpus blocks
    Construct,
    /// Find W-sound cycles for every 5-subset W (and EPS-graphs with --eps)
    Soundness {
        #[arg(long)]
        eps: bool,
    },
    /// Re-validate a certificate file and print its summary
    Check { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    HProperty,
    FProperty,
    StrongF3,
    Thm3,
    Thm4,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let o = &cli.opts;
    let (mode, default_k) = match &cli.command {
        Command::Verify { property } => {
            let mode = match property {
                Property::HProperty => Mode::HProperty,
                Property::FProperty => Mode::FProperty,
                Property::StrongF3 => Mode::StrongF3,
                Property::Thm3 => Mode::Thm3,
                Property::Thm4 => Mode::Thm4,
            };
            (mode, 4)
        }
        Command::Counterexample => (Mode::Counterexample, 3),
        Command::Corollary => (Mode::Corollary, 1),
        Command::Construct => (Mode::Glue, 1),
        Command::Soundness { eps } => (if *eps { Mode::Eps } else { Mode::WSound }, 5),
        Command::Check { file } => {
            let res = harness::read_certificates(file)
                .with_context(|| format!("reading {}", file.display()))?;
            println!("{}", Summary(&res, Default::default()));
            return Ok(res.passed());
        }
    };
    let Some(path) = &o.corpus else { bail!("--corpus is required") };
    let corpus = Corpus::read(path).with_context(|| format!("reading {}", path.display()))?;
    let policy = match (o.sample, mode) {
        (Some(count), _) => SubsetPolicy::Sample { count },
        (None, Mode::Glue) => SubsetPolicy::Sample { count: 100 },
        (None, _) => SubsetPolicy::All,
    };
    let spec = CampaignSpec {
        mode,
        k: o.k.unwrap_or(default_k),
        policy,
        seed: o.seed,
        timeout: Duration::from_millis(o.timeout_ms),
        jobs: o.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        max_n: o.n,
    };
    let (res, timings) = harness::run_campaign(&spec, &corpus)?;
    if let Some(out) = &o.out {
        harness::write_certificates(&res, out).with_context(|| format!("writing {}", out.display()))?;
    }
    println!("{}", Summary(&res, timings));
    Ok(res.passed())
}
