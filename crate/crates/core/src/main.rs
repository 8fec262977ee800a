use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use medshrink::config::RunConfig;
use medshrink::estimator::{evaluate_on_grid, fit, EstimatorConfig, GridValue, NoiseMode};
use medshrink::io::{rate_summary, read_grid_csv, write_estimate_csv, write_grid_csv, write_grid_values, write_rates_csv};
use medshrink::medians::{NoiseRule, NOISE_FLOOR};
use medshrink::simulation::{coupling_check, generate_dataset, rate_study, replication_rng, ErrorDist};
use medshrink::wavelet::FilterName;
use medshrink::Error;

#[derive(Parser)]
#[command(name = "medshrink", version, about = "Robust median-binning wavelet estimation on grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate f at the bin points from a `u1,...,uq,y` CSV file.
    Estimate(EstimateArgs),
    /// Draw one dataset from a simulation config and write it as CSV.
    Simulate(SimulateArgs),
    /// Monte Carlo MISE study over the configured sample sizes.
    RateStudy(RateStudyArgs),
    /// Compare the spread of sample medians with their normal coupling.
    CouplingCheck(CouplingArgs),
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value = "db4")]
    wavelet: FilterName,
    #[arg(long)]
    j0: Option<u32>,
    #[arg(long)]
    block_cardinality: Option<usize>,
    /// Use this value of h(0)^-2 instead of estimating it.
    #[arg(long)]
    h_inv_sq: Option<f64>,
    /// Aggregate paired median differences by their mean instead of their median.
    #[arg(long)]
    paired_mean: bool,
    #[arg(long)]
    no_shrink: bool,
    #[arg(long)]
    no_bias_correction: bool,
    /// Fail with exit code 3 when the noise estimate is degenerate.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Sample size; defaults to the first configured one.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    replication: usize,
    #[arg(long)]
    output: PathBuf,
    /// Also write f at the bin points (`u1,...,uq,f`).
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct RateStudyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct CouplingArgs {
    #[arg(long, default_value = "gaussian(1.0)")]
    error_dist: ErrorDist,
    #[arg(long, default_value_t = 1001)]
    kappa: usize,
    #[arg(long, default_value_t = 20_000)]
    repetitions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn estimate(args: EstimateArgs) -> Result<(), Error> {
    let data = read_grid_csv(&args.input)?;
    let config = EstimatorConfig {
        filter: args.wavelet,
        j0: args.j0,
        block_cardinality: args.block_cardinality,
        noise_mode: args.h_inv_sq.map_or(NoiseMode::Estimate, NoiseMode::Known),
        noise_rule: if args.paired_mean {
            NoiseRule::PairedMean
        } else {
            NoiseRule::PairedMedian
        },
        shrinkage_enabled: !args.no_shrink,
        bias_correction: !args.no_bias_correction,
    };
    let result = fit(&data.u, &data.y, data.q, &config)?;
    if result.noise.degenerate {
        if args.strict {
            return Err(Error::DegenerateNoise { floor: NOISE_FLOOR });
        }
        eprintln!("warning: noise estimate clamped to {NOISE_FLOOR:e}; every detail block is zeroed");
    }
    let rows = evaluate_on_grid(&result, &result.design)?;
    write_estimate_csv(&args.output, &rows)?;
    let d = &result.design;
    eprintln!(
        "n = {}, q = {}, bins = {}^{} (kappa = {}), j0 = {}, L = {}",
        d.n, d.q, d.bins_per_axis, d.q, d.kappa, result.j0, result.block_cardinality
    );
    eprintln!(
        "b_hat = {:.6e}, h(0)^-2 = {:.6e}, zeroed blocks {}/{}",
        result.b_hat,
        result.noise.h_inv_sq,
        result.diagnostics.zeroed_blocks(),
        result.diagnostics.total_blocks()
    );
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), Error> {
    let run = RunConfig::from_path(&args.config)?;
    let sim = &run.simulation;
    let n = args.n.unwrap_or(sim.sample_sizes[0]);
    let mut rng = replication_rng(sim.seed, n, args.replication);
    let data = generate_dataset(sim, n, &mut rng)?;
    write_grid_csv(&args.output, sim.q, &data.u, &data.y)?;
    if let Some(path) = args.truth {
        let rows: Vec<GridValue> = data
            .truth
            .as_slice()
            .iter()
            .enumerate()
            .map(|(flat, &value)| GridValue {
                point: data.design.bin_point(flat),
                value,
            })
            .collect();
        write_grid_values(&path, &rows, "f")?;
    }
    eprintln!("wrote {} observations (checksum {:016x})", n, data.checksum());
    Ok(())
}

fn run_rate_study(args: RateStudyArgs) -> Result<(), Error> {
    let run = RunConfig::from_path(&args.config)?;
    let report = rate_study(&run.simulation, &run.estimator)?;
    std::fs::create_dir_all(&args.out_dir)?;
    write_rates_csv(&args.out_dir.join("rates.csv"), &report)?;
    let summary = rate_summary(&report);
    std::fs::write(args.out_dir.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn run_coupling(args: CouplingArgs) -> Result<(), Error> {
    let mut rng = replication_rng(args.seed, args.kappa, 0);
    let out = coupling_check(args.error_dist, args.kappa, args.repetitions, &mut rng)?;
    println!(
        "variance {:.6} (target {}), mean {:.6} +/- {:.6}",
        out.variance, out.target, out.mean, out.mean_se
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(a) => estimate(a),
        Command::Simulate(a) => simulate(a),
        Command::RateStudy(a) => run_rate_study(a),
        Command::CouplingCheck(a) => run_coupling(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::DegenerateNoise { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
