//! `wflo` command-line driver.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use wflo::bench::{run_bench_observed, Observer};
use wflo::io::{
    format_report, format_summary, read_layout, write_atomic, write_field, write_layout, ConvergenceWriter, RunSettings,
};
use wflo::optimizer::{run_observed, Algorithm};
use wflo::wake::{velocity_field, GridSpec};
use wflo::{CandidateLayout, CaseId, Genome, LayoutKind, TurbineSpec};

#[derive(Parser)]
#[command(name = "wflo", version, about = "Wind farm layout optimization with GA and Q-learning GA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one case and write the best layout, convergence history and manifest.
    Optimize {
        #[command(flatten)]
        run: RunFlags,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a layout CSV in which every row is a turbine.
    Evaluate {
        #[arg(long = "layout-csv")]
        layout_csv: PathBuf,
        #[arg(long)]
        case: String,
        /// Spread rose CSV for the C cases.
        #[arg(long)]
        rose: Option<PathBuf>,
        /// Report file; printed to stdout either way.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run GA and RLGA over paired seeds and summarize generations-to-target.
    Bench {
        #[command(flatten)]
        run: RunFlags,
        /// Comma-separated seeds.
        #[arg(long)]
        seeds: Option<String>,
        /// Target fitness; defaults to the GA median final fitness.
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the hub-height velocity field of a layout for one wind bin.
    Field {
        #[arg(long = "layout-csv")]
        layout_csv: PathBuf,
        #[arg(long)]
        case: String,
        /// Direction the wind blows from, degrees clockwise from north.
        #[arg(long, default_value_t = 0.0)]
        direction: f64,
        /// Free-stream speed, m/s.
        #[arg(long, default_value_t = 12.0)]
        speed: f64,
        /// Cells per axis.
        #[arg(long, default_value_t = 100)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the benchmark cases.
    Cases,
}

/// Settings flags; each overrides the same key of `--config`.
#[derive(Args)]
struct RunFlags {
    /// Settings file (`key = value` lines); a manifest works too.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    layout: Option<String>,
    #[arg(long = "layout-seed")]
    layout_seed: Option<String>,
    #[arg(long = "algo")]
    algorithm: Option<String>,
    #[arg(long)]
    generations: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long = "population-size")]
    population_size: Option<String>,
    #[arg(long = "parents-mating")]
    parents_mating: Option<String>,
    #[arg(long)]
    crossover: Option<String>,
    #[arg(long = "mutation-percent")]
    mutation_percent: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    rose: Option<String>,
}

impl RunFlags {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("case", &self.case),
            ("layout", &self.layout),
            ("layout_seed", &self.layout_seed),
            ("algorithm", &self.algorithm),
            ("generations", &self.generations),
            ("seed", &self.seed),
            ("population_size", &self.population_size),
            ("parents_mating", &self.parents_mating),
            ("crossover", &self.crossover),
            ("mutation_percent", &self.mutation_percent),
            ("alpha", &self.alpha),
            ("gamma", &self.gamma),
            ("epsilon", &self.epsilon),
            ("rose", &self.rose),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }

    /// Defaults, then the config file, then flags.
    fn resolve(&self, extra: &[(&'static str, &str)]) -> Result<RunSettings> {
        let mut settings = match &self.config {
            Some(path) => RunSettings::load(path)?,
            None => RunSettings::default(),
        };
        for (key, value) in self.pairs().into_iter().chain(extra.iter().copied()) {
            settings.apply(key, value).with_context(|| format!("flag for `{key}`"))?;
        }
        settings.validate()?;
        Ok(settings)
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Optimize { run, out } => optimize(&run, &out),
        Command::Evaluate { layout_csv, case, rose, out } => {
            evaluate(&layout_csv, &case, rose.as_deref(), out.as_deref())
        }
        Command::Bench { run, seeds, target, out } => {
            let mut extra = Vec::new();
            if let Some(s) = seeds.as_deref() {
                extra.push(("seeds", s));
            }
            if let Some(t) = target.as_deref() {
                extra.push(("target", t));
            }
            bench(&run.resolve(&extra)?, &out)
        }
        Command::Field { layout_csv, case, direction, speed, resolution, out } => {
            field(&layout_csv, &case, direction, speed, resolution, &out)
        }
        Command::Cases => {
            println!("case  side_m  spacing_m  wind             candidates");
            for case in CaseId::ALL {
                let n = case.layout(LayoutKind::Aligned, 1)?.len();
                println!(
                    "{:<5} {:>6}  {:>9}  {:<16} {n}",
                    case,
                    case.farm_side(),
                    case.spacing(),
                    format!("{:?}", case.wind())
                );
            }
            Ok(())
        }
    }
}

fn create_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))
}

fn optimize(flags: &RunFlags, out: &Path) -> Result<()> {
    let settings = flags.resolve(&[])?;
    let rose = settings.load_rose()?;
    let config = &settings.run;
    let evaluator = config.evaluator(rose.as_ref())?;
    create_dir(out)?;

    let mut writer = ConvergenceWriter::create(&out.join("convergence.csv"), config.algorithm)?;
    let result = run_observed(&evaluator, config, |rec| writer.write(rec))?;

    let layout = evaluator.layout();
    write_layout(&out.join("best_layout.csv"), &layout.active_positions(&result.best)?)?;
    if let Some(table) = &result.q_table {
        write_atomic(&out.join("qtable.csv"), &table.to_csv(&config.rl_actions))?;
    }
    let report = format_report(&result.best_eval);
    write_atomic(&out.join("report.txt"), &report)?;
    write_atomic(&out.join("manifest.txt"), &settings.to_manifest(Some(layout)))?;
    print!("{report}");
    Ok(())
}

fn load_positions(layout_csv: &Path, case: &str) -> Result<(CaseId, Vec<wflo::Point>)> {
    let case: CaseId = case.parse()?;
    Ok((case, read_layout(layout_csv)?))
}

fn evaluate(layout_csv: &Path, case: &str, rose: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let (case, positions) = load_positions(layout_csv, case)?;
    let rose = rose.map(wflo::io::load_rose).transpose()?;
    let result = case
        .evaluate_positions(positions, rose.as_ref())
        .with_context(|| format!("evaluating {}", layout_csv.display()))?;
    let report = format_report(&result);
    if let Some(out) = out {
        write_atomic(out, &report)?;
    }
    print!("{report}");
    Ok(())
}

fn bench(settings: &RunSettings, out: &Path) -> Result<()> {
    let rose = settings.load_rose()?;
    let config = &settings.run;
    let evaluator = config.evaluator(rose.as_ref())?;
    create_dir(out)?;
    let report = run_bench_observed(&evaluator, config, &settings.seeds, settings.target, |algorithm, seed| {
        let path = out.join(format!("{algorithm}_seed{seed}.csv"));
        let mut writer = ConvergenceWriter::create(&path, algorithm)?;
        let observer: Observer = Box::new(move |rec| writer.write(rec));
        Ok(observer)
    })?;
    write_atomic(&out.join("summary.csv"), &format_summary(&report.rows, report.target))?;
    write_atomic(&out.join("manifest.txt"), &settings.to_manifest(Some(evaluator.layout())))?;

    let show = |g: Option<usize>| g.map_or("never".to_string(), |g| g.to_string());
    println!("target_fitness = {}", report.target);
    for algorithm in [Algorithm::Ga, Algorithm::Rlga] {
        println!(
            "{algorithm}: median_final_fitness = {} median_generations_to_target = {}",
            report.median_final_fitness(algorithm),
            show(report.median_generations(algorithm))
        );
    }
    Ok(())
}

fn field(layout_csv: &Path, case: &str, direction: f64, speed: f64, resolution: usize, out: &Path) -> Result<()> {
    if speed.is_nan() || speed <= 0.0 || !direction.is_finite() {
        bail!("speed must be positive and direction finite");
    }
    let (case, positions) = load_positions(layout_csv, case)?;
    let layout = CandidateLayout::custom(case.extent(), positions)?;
    let extent = case.extent();
    let grid = GridSpec::covering(extent.width, extent.height, resolution)?;
    let genome = Genome::ones(layout.len());
    let field = velocity_field(&genome, &layout, direction, speed, &TurbineSpec::default(), grid)?;
    write_field(out, &field)?;
    println!("wrote {} cells to {}", field.values.len(), out.display());
    Ok(())
}
