use clap::{Args, Parser, Subcommand};
use polyrellich_cli::experiments::{
    self, EigArgs, HardyArgs, PseudoArgs, ResolventArgs, SharpnessArgs, TraceArgs, WhitneyArgs,
};
use polyrellich_cli::verify::{run_all, VerifyConfig};
use polyrellich_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Pseudodistances, sharp inequality constants, dyadic decompositions and
/// heat-trace bounds for polyharmonic Dirichlet operators on regions of
/// R^1..R^3.
#[derive(Parser)]
#[command(name = "polyrellich", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the pseudodistance a_m against the boundary distance
    Pseudo(PseudoCmd),
    /// Decompose a region into maximal dyadic cubes and verify the partition
    Whitney(WhitneyCmd),
    /// Eigenvalue table of the 1D operator with two-sided bounds
    Eig(EigCmd),
    /// Fuzz the sharp ratio with random compactly supported functions
    Hardy(HardyCmd),
    /// Sweep the boundary-concentrating sharpness sequence
    Sharpness(SharpnessCmd),
    /// Two-sided heat-trace bounds on a region
    Trace(TraceCmd),
    /// Two-sided resolvent-trace bounds on a region
    Resolvent(ResolventCmd),
    /// Run the whole verification suite and print a PASS/FAIL table
    VerifyAll(VerifyCmd),
}

#[derive(Args)]
struct PseudoCmd {
    /// Region description (.region.json)
    #[arg(long)]
    region: PathBuf,
    /// Pseudodistance order (real, >= 1)
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Spherical rule resolution; 0 picks the order-dependent default
    #[arg(long, default_value_t = 0)]
    resolution: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "pseudo.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct WhitneyCmd {
    #[arg(long)]
    region: PathBuf,
    /// Finest dyadic level (side 2^-level)
    #[arg(long, default_value_t = 12)]
    level_cap: i32,
    #[arg(long, default_value_t = 1_000_000)]
    cube_cap: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "whitney.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct EigCmd {
    /// Operator order m (1, 2 or 3)
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 200)]
    basis: usize,
    #[arg(long, default_value = "eig.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct HardyCmd {
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Number of random test functions
    #[arg(long, default_value_t = 100)]
    fuzz: usize,
    /// Grid panels per test function
    #[arg(long, default_value_t = 8192)]
    grid: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "ratios.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SharpnessCmd {
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Largest cutoff index (doubling from 4)
    #[arg(long, default_value_t = 1024)]
    nmax: u32,
    #[arg(long, default_value = "sharp.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct TraceCmd {
    #[arg(long)]
    region: PathBuf,
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Comma-separated times
    #[arg(long, default_value = "0.01,0.1,1")]
    t: String,
    /// Kernel bound constant, or `auto` for the m = 1 default
    #[arg(long, default_value = "auto")]
    kernel_constant: String,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 12)]
    level_cap: i32,
    #[arg(long, default_value = "trace.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct ResolventCmd {
    #[arg(long)]
    region: PathBuf,
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Comma-separated exponents gamma (> N/2m)
    #[arg(long, default_value = "1.0")]
    gamma: String,
    #[arg(long, default_value = "auto")]
    kernel_constant: String,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 12)]
    level_cap: i32,
    #[arg(long, default_value = "resolvent.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyCmd {
    /// Run with the baseline sample budgets
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the report files
    #[arg(long, default_value = "verify-out")]
    out: PathBuf,
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Pseudo(c) => experiments::run_pseudo(&PseudoArgs {
            region: c.region,
            m: c.m,
            resolution: c.resolution,
            samples: c.samples,
            seed: c.seed,
            out: c.out,
        }),
        Command::Whitney(c) => experiments::run_whitney(&WhitneyArgs {
            region: c.region,
            level_cap: c.level_cap,
            cube_cap: c.cube_cap,
            samples: c.samples,
            seed: c.seed,
            out: c.out,
        }),
        Command::Eig(c) => experiments::run_eig(&EigArgs {
            m: c.m,
            count: c.count,
            basis: c.basis,
            out: c.out,
        }),
        Command::Hardy(c) => experiments::run_hardy(&HardyArgs {
            m: c.m,
            fuzz: c.fuzz,
            grid: c.grid,
            seed: c.seed,
            out: c.out,
        }),
        Command::Sharpness(c) => experiments::run_sharpness(&SharpnessArgs {
            m: c.m,
            nmax: c.nmax,
            out: c.out,
        }),
        Command::Trace(c) => {
            let times = experiments::parse_list(&c.t)?;
            let kernel = experiments::parse_kernel_constant(&c.kernel_constant)?;
            experiments::run_trace(&TraceArgs {
                region: c.region,
                m: c.m,
                times,
                kernel_constant: kernel,
                samples: c.samples,
                seed: c.seed,
                level_cap: c.level_cap,
                out: c.out,
            })
        }
        Command::Resolvent(c) => {
            let gammas = experiments::parse_list(&c.gamma)?;
            let kernel = experiments::parse_kernel_constant(&c.kernel_constant)?;
            experiments::run_resolvent(&ResolventArgs {
                region: c.region,
                m: c.m,
                gammas,
                kernel_constant: kernel,
                samples: c.samples,
                seed: c.seed,
                level_cap: c.level_cap,
                out: c.out,
            })
        }
        Command::VerifyAll(c) => {
            let cfg = VerifyConfig {
                quick: c.quick,
                seed: c.seed,
            };
            let outcomes = run_all(&cfg, &c.out).map_err(|e| CliError::Config(e.to_string()))?;
            let mut all_pass = true;
            for o in &outcomes {
                println!(
                    "[{}] criterion {:>2} {:<28} ({:>7.2?})  {}",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.id,
                    o.name,
                    o.elapsed,
                    o.detail
                );
                all_pass &= o.passed;
            }
            println!(
                "verify-all: {}/{} criteria passed; reports in {}",
                outcomes.iter().filter(|o| o.passed).count(),
                outcomes.len(),
                c.out.display()
            );
            if all_pass {
                Ok(())
            } else {
                Err(CliError::Numerical("verification criteria failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
