//! Run settings, manifests and CSV files.
//!
//! Settings are flat `key = value` text. Blank lines and lines starting with
//! `#` are ignored. A manifest is a settings file with every key resolved,
//! so feeding it back as a config reproduces the run.
//!
//! | key | value |
//! |-----|-------|
//! | `case` | IA … IIIC |
//! | `layout` | aligned, staggered, sunflower, unstructured |
//! | `layout_seed` | unstructured generator seed |
//! | `algorithm` | ga, rlga |
//! | `generations` | generation count |
//! | `seed` | master seed |
//! | `population_size` | shared by both algorithms |
//! | `parents_mating`, `crossover`, `mutation_percent` | fixed GA operators |
//! | `rl_parents_mating`, `rl_crossovers`, `rl_mutation_percents` | comma-separated RLGA options |
//! | `alpha`, `gamma`, `epsilon` | Q-learning hyperparameters |
//! | `rose` | spread rose CSV path, or `builtin` |
//! | `seeds` | comma-separated bench seeds |
//! | `target` | bench target fitness, or `auto` |

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::bench::SummaryRow;
use crate::error::{Error, Result};
use crate::ga::CrossoverKind;
use crate::layout::{CandidateLayout, LayoutParams};
use crate::optimizer::{Algorithm, ConvergenceRecord, RunConfig};
use crate::qlearn::{ActionSpace, AgentState};
use crate::wake::{Point, VelocityGrid};
use crate::wind::{parse_rose, WindScenario};
use crate::EvaluationResult;

/// Keys accepted in settings text, in manifest order.
pub const KEYS: [&str; 20] = [
    "case",
    "layout",
    "layout_seed",
    "algorithm",
    "generations",
    "seed",
    "population_size",
    "parents_mating",
    "crossover",
    "mutation_percent",
    "rl_parents_mating",
    "rl_crossovers",
    "rl_mutation_percents",
    "alpha",
    "gamma",
    "epsilon",
    "rose",
    "seeds",
    "target",
    "manifest_version",
];

const MANIFEST_VERSION: &str = "1";

/// Fully resolved settings of an optimize or bench invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub run: RunConfig,
    /// Spread rose file; `None` is the bundled rose.
    pub rose: Option<PathBuf>,
    pub seeds: Vec<u64>,
    /// Bench target; `None` uses the GA median.
    pub target: Option<f64>,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings { run: RunConfig::default(), rose: None, seeds: (1..=10).collect(), target: None }
    }
}

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> Error {
    Error::Config(format!("`{key} = {value}`: {why}"))
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| bad(key, value, e))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value.split(',').map(|v| parse_num(key, v.trim())).collect()
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl RunSettings {
    /// Set one key. Values are validated as a whole by [`RunSettings::validate`].
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let run = &mut self.run;
        let wrap = |e: Error| bad(key, value, e);
        match key {
            "case" => run.case = value.parse().map_err(wrap)?,
            "layout" => run.layout = value.parse().map_err(wrap)?,
            "layout_seed" => run.layout_seed = parse_num(key, value)?,
            "algorithm" => run.algorithm = value.parse().map_err(wrap)?,
            "generations" => run.generations = parse_num(key, value)?,
            "seed" => run.seed = parse_num(key, value)?,
            "population_size" => run.ga.population_size = parse_num(key, value)?,
            "parents_mating" => run.ga.parents_mating = parse_num(key, value)?,
            "crossover" => run.ga.crossover = value.parse().map_err(wrap)?,
            "mutation_percent" => run.ga.mutation_percent = parse_num(key, value)?,
            "rl_parents_mating" | "rl_crossovers" | "rl_mutation_percents" => {
                let mut parents = run.rl_actions.parents_mating().to_vec();
                let mut crossovers = run.rl_actions.crossovers().to_vec();
                let mut mutations = run.rl_actions.mutation_percents().to_vec();
                match key {
                    "rl_parents_mating" => parents = parse_list(key, value)?,
                    "rl_crossovers" => {
                        crossovers = value
                            .split(',')
                            .map(|v| v.trim().parse::<CrossoverKind>())
                            .collect::<Result<_>>()
                            .map_err(wrap)?
                    }
                    _ => mutations = parse_list(key, value)?,
                }
                run.rl_actions = ActionSpace::new(parents, crossovers, mutations).map_err(wrap)?;
            }
            "alpha" => run.hyper.alpha = parse_num(key, value)?,
            "gamma" => run.hyper.gamma = parse_num(key, value)?,
            "epsilon" => run.hyper.epsilon = parse_num(key, value)?,
            "rose" => self.rose = (value != "builtin").then(|| PathBuf::from(value)),
            "seeds" => self.seeds = parse_list(key, value)?,
            "target" => self.target = if value == "auto" { None } else { Some(parse_num(key, value)?) },
            "manifest_version" => {
                if value != MANIFEST_VERSION {
                    return Err(bad(key, value, format!("only version {MANIFEST_VERSION} is understood")));
                }
            }
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Apply every `key = value` line of `text`; a key may appear once.
    pub fn apply_text(&mut self, text: &str, origin: &Path) -> Result<()> {
        let mut seen: Vec<String> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::parse(origin, n + 1, "expected `key = value`"))?;
            let key = key.trim();
            if seen.iter().any(|k| k == key) {
                return Err(Error::parse(origin, n + 1, format!("duplicate key `{key}`")));
            }
            self.apply(key, value).map_err(|e| Error::parse(origin, n + 1, e.to_string()))?;
            seen.push(key.to_string());
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut settings = RunSettings::default();
        settings.apply_text(&read_text(path)?, path)?;
        Ok(settings)
    }

    pub fn validate(&self) -> Result<()> {
        self.run.validate()?;
        if self.seeds.is_empty() {
            return Err(Error::Config("`seeds` must list at least one seed".into()));
        }
        Ok(())
    }

    /// Spread rose from `rose`, if one is configured.
    pub fn load_rose(&self) -> Result<Option<WindScenario>> {
        self.rose.as_deref().map(load_rose).transpose()
    }

    /// Resolved settings as text. `layout` describes the candidate set in a
    /// comment block; comments are ignored when the manifest is read back.
    pub fn to_manifest(&self, layout: Option<&CandidateLayout>) -> String {
        let run = &self.run;
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("manifest_version", MANIFEST_VERSION.into());
        put("case", run.case.to_string());
        put("layout", run.layout.to_string());
        put("layout_seed", run.layout_seed.to_string());
        put("algorithm", run.algorithm.to_string());
        put("generations", run.generations.to_string());
        put("seed", run.seed.to_string());
        put("population_size", run.ga.population_size.to_string());
        put("parents_mating", run.ga.parents_mating.to_string());
        put("crossover", run.ga.crossover.to_string());
        put("mutation_percent", run.ga.mutation_percent.to_string());
        put("rl_parents_mating", join(run.rl_actions.parents_mating()));
        put("rl_crossovers", join(run.rl_actions.crossovers()));
        put("rl_mutation_percents", join(run.rl_actions.mutation_percents()));
        put("alpha", run.hyper.alpha.to_string());
        put("gamma", run.hyper.gamma.to_string());
        put("epsilon", run.hyper.epsilon.to_string());
        put("rose", self.rose.as_ref().map_or("builtin".into(), |p| p.display().to_string()));
        put("seeds", join(&self.seeds));
        put("target", self.target.map_or("auto".into(), |t| t.to_string()));
        if let Some(layout) = layout {
            let _ = writeln!(out, "# layout_candidates = {}", layout.len());
            let _ = writeln!(out, "# layout_extent = {} x {}", layout.extent.width, layout.extent.height);
            let params = match layout.params {
                LayoutParams::Aligned { spacing } | LayoutParams::Staggered { spacing } => format!("spacing={spacing}"),
                LayoutParams::Sunflower { count } => format!("count={count}"),
                LayoutParams::Unstructured { min_dist, seed } => format!("min_dist={min_dist} seed={seed}"),
                LayoutParams::Custom => "custom".into(),
            };
            let _ = writeln!(out, "# layout_params = {params}");
        }
        out
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Write `contents` through a temporary sibling and rename it into place,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Load and validate a spread rose CSV.
pub fn load_rose(path: &Path) -> Result<WindScenario> {
    WindScenario::spread(&parse_rose(&read_text(path)?, path)?)
}

/// Round to six significant digits and print the shortest form.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    rounded.to_string()
}

/// Layout CSV. Coordinates use the shortest round-trip form so that reading
/// the file back gives the same positions bit for bit.
pub fn format_layout(positions: &[Point]) -> String {
    let mut out = String::from("index,x,y\n");
    for (i, p) in positions.iter().enumerate() {
        let _ = writeln!(out, "{i},{},{}", p.x, p.y);
    }
    out
}

pub fn write_layout(path: &Path, positions: &[Point]) -> Result<()> {
    fs::write(path, format_layout(positions)).map_err(|e| Error::io(path, e))
}

/// Parse layout CSV text. Indices must run 0, 1, 2, … in file order.
pub fn parse_layout(text: &str, origin: &Path) -> Result<Vec<Point>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, header)) if header.trim() == "index,x,y" => {}
        Some((n, _)) => return Err(Error::parse(origin, n + 1, "expected header `index,x,y`")),
        None => return Err(Error::parse(origin, 1, "empty layout file")),
    }
    lines
        .enumerate()
        .map(|(expected, (n, line))| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::parse(origin, n + 1, format!("expected 3 fields, found {}", fields.len())));
            }
            let index: usize = fields[0]
                .parse()
                .map_err(|e| Error::parse(origin, n + 1, format!("bad index `{}`: {e}", fields[0])))?;
            if index != expected {
                return Err(Error::parse(origin, n + 1, format!("index {index} out of order, expected {expected}")));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(origin, n + 1, format!("bad coordinate `{s}`")))
            };
            Ok(Point::new(num(fields[1])?, num(fields[2])?))
        })
        .collect()
}

pub fn read_layout(path: &Path) -> Result<Vec<Point>> {
    parse_layout(&read_text(path)?, path)
}

fn state_code(state: AgentState) -> usize {
    state.index()
}

/// Header of the convergence CSV for `algorithm`.
pub fn convergence_header(algorithm: Algorithm) -> &'static str {
    match algorithm {
        Algorithm::Ga => "generation,best_fitness,best_fobj,best_power_kw,n_turbines",
        Algorithm::Rlga => "generation,best_fitness,best_fobj,best_power_kw,n_turbines,action_index,reward,state",
    }
}

/// One convergence row. Fitness, objective and power are printed in
/// shortest round-trip form; RLGA fields are blank for generation 0.
pub fn convergence_row(record: &ConvergenceRecord, algorithm: Algorithm) -> String {
    let mut row = format!(
        "{},{},{},{},{}",
        record.generation, record.best_fitness, record.best_objective, record.best_power, record.turbines
    );
    if algorithm == Algorithm::Rlga {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let _ = write!(
            row,
            ",{},{},{}",
            opt(record.action.map(|a| a.to_string())),
            opt(record.reward.map(|r| r.to_string())),
            opt(record.state.map(|s| state_code(s).to_string())),
        );
    }
    row
}

/// Streams convergence rows to disk, flushing after every row.
pub struct ConvergenceWriter {
    out: BufWriter<File>,
    path: PathBuf,
    algorithm: Algorithm,
}

impl ConvergenceWriter {
    pub fn create(path: &Path, algorithm: Algorithm) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = ConvergenceWriter { out: BufWriter::new(file), path: path.to_path_buf(), algorithm };
        writer.line(convergence_header(algorithm))?;
        Ok(writer)
    }

    fn line(&mut self, line: &str) -> Result<()> {
        writeln!(self.out, "{line}").and_then(|_| self.out.flush()).map_err(|e| Error::io(&self.path, e))
    }

    pub fn write(&mut self, record: &ConvergenceRecord) -> Result<()> {
        let row = convergence_row(record, self.algorithm);
        self.line(&row)
    }
}

/// Velocity field CSV with six significant digits.
pub fn format_field(grid: &VelocityGrid) -> String {
    let mut out = String::from("x,y,u\n");
    for (p, u) in grid.cells() {
        let _ = writeln!(out, "{},{},{}", sig6(p.x), sig6(p.y), sig6(u));
    }
    out
}

pub fn write_field(path: &Path, grid: &VelocityGrid) -> Result<()> {
    fs::write(path, format_field(grid)).map_err(|e| Error::io(path, e))
}

pub const SUMMARY_HEADER: &str =
    "algorithm,seed,final_fitness,final_fobj,final_power_kw,n_turbines,efficiency,target,generations_to_target";

/// Bench summary CSV; an empty last column means the target was never reached.
pub fn format_summary(rows: &[SummaryRow], target: f64) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.algorithm,
            r.seed,
            r.final_fitness,
            r.final_objective,
            r.final_power,
            r.turbines,
            r.efficiency,
            target,
            r.generations_to_target.map(|g| g.to_string()).unwrap_or_default()
        );
    }
    out
}

/// Evaluation report as `key = value` lines.
pub fn format_report(result: &EvaluationResult) -> String {
    format!(
        "n_turbines = {}\ntotal_power_kw = {}\nfobj = {}\nfitness = {}\nefficiency = {}\n",
        result.turbine_count, result.total_power, result.objective, result.fitness, result.efficiency
    )
}
