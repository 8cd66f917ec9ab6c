//! Command-line front end: `solve`, `metastate`, `scan`, `simulate`, `plotdata`.

pub mod config;
mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::{Family, ModelConfig, PlotConfig, RunConfig, SimulateConfig};
pub use output::{curve_points, CurvePoint};

use crate::error::{Error, Result};
use crate::free_energy::find_minimizers;
use crate::metastate::build_metastate_report;
use crate::scan::scan;
use crate::simulator::empirical_weights;

#[derive(Debug, Parser)]
#[command(name = "metastates", version, about = "Metastates of disordered mean-field models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find the free-energy minimizers.
    Solve(CommonArgs),
    /// Stability vectors, visibility and metastate weights.
    Metastate(CommonArgs),
    /// Locate the coexistence line by bisection.
    Scan(CommonArgs),
    /// Exact finite-volume empirical weights over random disorder draws.
    Simulate(CommonArgs),
    /// Reduced free-energy curve for plotting.
    Plotdata(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(value_name = "CONFIG", required_unless_present = "config")]
    pub config_path: Option<PathBuf>,
    #[arg(long, value_name = "PATH", conflicts_with = "config_path")]
    pub config: Option<PathBuf>,
    /// Master seed for every randomized stage.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    pub dump_config: bool,
    /// Monte Carlo samples for the weights.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Disorder draws per system size.
    #[arg(long)]
    pub draws: Option<usize>,
    /// Random solver starts.
    #[arg(long)]
    pub random_starts: Option<usize>,
}

impl CommonArgs {
    fn load(&self) -> Result<RunConfig> {
        let path = self
            .config
            .as_ref()
            .or(self.config_path.as_ref())
            .ok_or_else(|| Error::Config("no configuration given".into()))?;
        let mut config = RunConfig::load(path)?;
        if let Some(seed) = self.seed {
            config.set_seed(seed);
        }
        if let Some(s) = self.samples {
            config.weights.samples = s;
        }
        if let Some(d) = self.draws {
            config.simulate.samples = d;
        }
        if let Some(r) = self.random_starts {
            config.solver.random_starts = r;
        }
        Ok(config)
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

pub fn cmd_solve(config: &RunConfig, out: &Path) -> Result<String> {
    let model = config.model()?;
    let solution = find_minimizers(&model, &config.solver)?;
    write(out, "minimizers.csv", &output::minimizers_csv(&solution))?;
    Ok(output::minimizers_table(&solution))
}

pub fn cmd_metastate(config: &RunConfig, out: &Path) -> Result<String> {
    let model = config.model()?;
    let solution = find_minimizers(&model, &config.solver)?;
    let report = build_metastate_report(&model, &solution, &config.weights)?;
    write(out, "minimizers.csv", &output::minimizers_csv(&solution))?;
    write(out, "report.json", &(report.to_json() + "\n"))?;
    write(out, "weights.csv", &output::weights_csv(&report))?;
    let summary = report.summary();
    write(out, "summary.txt", &summary)?;
    Ok(summary)
}

pub fn cmd_scan(config: &RunConfig, out: &Path) -> Result<String> {
    let family = config.coexistence_family()?;
    let opts = config
        .scan
        .as_ref()
        .ok_or_else(|| Error::Config("the scan command needs a [scan] section".into()))?;
    let points = scan(family, opts)?;
    let csv = output::scan_csv(&points);
    write(out, "scan.csv", &csv)?;
    Ok(csv)
}

pub fn cmd_simulate(config: &RunConfig, out: &Path) -> Result<String> {
    let model = config.model()?;
    let solution = find_minimizers(&model, &config.solver)?;
    let centers: Vec<_> = solution.global_minimizers().into_iter().map(|m| m.total_measure).collect();
    let opts = config.simulate.options();
    let estimates = config
        .simulate
        .n
        .iter()
        .map(|&n| empirical_weights(&model, &centers, n, &opts))
        .collect::<Result<Vec<_>>>()?;
    let csv = output::simulate_csv(&estimates);
    write(out, "simulate.csv", &csv)?;
    write(out, "draws.csv", &output::draws_csv(&estimates))?;
    Ok(csv)
}

pub fn cmd_plotdata(config: &RunConfig, out: &Path) -> Result<String> {
    let points = curve_points(config)?;
    let csv = output::curve_csv(&points);
    write(out, "phi_curve.csv", &csv)?;
    Ok(format!("{} curve points written\n", points.len()))
}

fn dispatch(cli: Cli) -> Result<String> {
    let (args, run): (&CommonArgs, fn(&RunConfig, &Path) -> Result<String>) = match &cli.command {
        Command::Solve(a) => (a, cmd_solve),
        Command::Metastate(a) => (a, cmd_metastate),
        Command::Scan(a) => (a, cmd_scan),
        Command::Simulate(a) => (a, cmd_simulate),
        Command::Plotdata(a) => (a, cmd_plotdata),
    };
    let config = args.load()?;
    if args.dump_config {
        return Ok(config.to_toml());
    }
    if let Some(w) = args.workers {
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global();
    }
    run(&config, &args.out)
}

/// Parses the process arguments, runs the command and returns the exit status.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
