//! The commands behind the `siphons` binary: analyze a model, generate
//! instance families, sweep the clause density of reduction nets, and
//! summarize a directory of models.

pub mod cli;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::analysis::{
    enumerate_minimal_siphons, enumerate_minimal_traps, filter_containing, siphon_trap_report, Engine,
    MarkingReport,
};
use crate::error::{Error, Result};
use crate::generators::{gen_3sat_reduction, gen_chain, gen_random_3sat, gen_random_net};
use crate::ingest::pnml::export_pnml_named;
use crate::ingest::{read_model, Format};
use crate::net::{Marking, PetriNet, PlaceSet};
use crate::search::{named_order, Budget, EnumerationResult, SearchStats};

pub const DEFAULT_TIMEOUT_MS: u64 = 2000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Target {
    #[default]
    Siphons,
    Traps,
    Both,
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "siphons" => Ok(Target::Siphons),
            "traps" => Ok(Target::Traps),
            "both" => Ok(Target::Both),
            other => Err(Error::usage(format!("unknown target `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::usage(format!("unknown output format `{other}`"))),
        }
    }
}

fn csv_string<S: Serialize>(rows: &[S]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn json_string<S: Serialize>(value: &S) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

/// Minimum, maximum and mean of a list of sizes or counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Spread {
    pub min: usize,
    pub max: usize,
    pub avg: f64,
}

impl Spread {
    pub fn of(values: &[usize]) -> Option<Spread> {
        if values.is_empty() {
            return None;
        }
        Some(Spread {
            min: *values.iter().min().unwrap(),
            max: *values.iter().max().unwrap(),
            avg: values.iter().sum::<usize>() as f64 / values.len() as f64,
        })
    }
}

impl std::fmt::Display for Spread {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{} ({:.2})", self.min, self.max, self.avg)
    }
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

// ---------------------------------------------------------------- analyze

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub input: PathBuf,
    pub format: Option<Format>,
    pub target: Target,
    pub engine: Engine,
    /// Keep only sets containing all of these places.
    pub contains: Vec<String>,
    pub marking_report: bool,
    pub timeout_ms: u64,
}

impl AnalyzeOptions {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        AnalyzeOptions {
            input: input.into(),
            format: None,
            target: Target::Siphons,
            engine: Engine::Sat,
            contains: Vec::new(),
            marking_report: false,
            timeout_ms: DEFAULT_TIMEOUT_MS,
        }
    }
}

/// Minimal siphons or traps of one model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetSummary {
    pub count: usize,
    /// `null` when there are no sets.
    pub sizes: Option<Spread>,
    pub elapsed_ms: f64,
    pub timed_out: bool,
    /// Sorted by size, then by place names; names inside a set are sorted.
    pub sets: Vec<Vec<String>>,
    pub stats: SearchStats,
}

impl SetSummary {
    fn new(net: &PetriNet, result: &EnumerationResult, required: Option<&PlaceSet>) -> Self {
        let kept = match required {
            Some(r) => filter_containing(&result.sets, r),
            None => result.sets.clone(),
        };
        let sizes: Vec<usize> = kept.iter().map(PlaceSet::len).collect();
        SetSummary {
            count: kept.len(),
            sizes: Spread::of(&sizes),
            elapsed_ms: millis(result.stats.elapsed),
            timed_out: result.stats.timed_out,
            sets: named_order(net, &kept),
            stats: result.stats.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub model: String,
    pub places: usize,
    pub transitions: usize,
    pub engine: String,
    pub timeout_ms: u64,
    pub contains: Option<Vec<String>>,
    pub siphons: Option<SetSummary>,
    pub traps: Option<SetSummary>,
    pub marking_report: Option<MarkingReport>,
}

#[derive(Serialize)]
struct AnalyzeCsvRow<'a> {
    model: &'a str,
    places: usize,
    transitions: usize,
    engine: &'a str,
    target: &'a str,
    count: usize,
    size_min: Option<usize>,
    size_max: Option<usize>,
    size_avg: Option<f64>,
    time_ms: f64,
    timed_out: bool,
}

impl AnalyzeReport {
    fn parts(&self) -> Vec<(&'static str, &SetSummary)> {
        let mut v = Vec::new();
        if let Some(s) = &self.siphons {
            v.push(("siphons", s));
        }
        if let Some(t) = &self.traps {
            v.push(("traps", t));
        }
        v
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Text => Ok(self.to_text()),
            OutputFormat::Json => Ok(json_string(self)),
            OutputFormat::Csv => {
                let rows: Vec<AnalyzeCsvRow> = self
                    .parts()
                    .into_iter()
                    .map(|(target, s)| AnalyzeCsvRow {
                        model: &self.model,
                        places: self.places,
                        transitions: self.transitions,
                        engine: &self.engine,
                        target,
                        count: s.count,
                        size_min: s.sizes.map(|z| z.min),
                        size_max: s.sizes.map(|z| z.max),
                        size_avg: s.sizes.map(|z| z.avg),
                        time_ms: s.elapsed_ms,
                        timed_out: s.timed_out,
                    })
                    .collect();
                csv_string(&rows)
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "model {}: {} places, {} transitions, engine {}",
            self.model, self.places, self.transitions, self.engine
        );
        if let Some(c) = &self.contains {
            let _ = writeln!(out, "keeping sets that contain {{{}}}", c.join(", "));
        }
        for (target, s) in self.parts() {
            let sizes = s.sizes.map_or("-".to_string(), |z| z.to_string());
            let _ = write!(out, "minimal {target}: {} (sizes {sizes}), {:.3} ms", s.count, s.elapsed_ms);
            if s.timed_out {
                let _ = write!(out, ", TIMEOUT after {} ms (partial)", self.timeout_ms);
            }
            let _ = writeln!(out);
            for set in &s.sets {
                let _ = writeln!(out, "  {{{}}}", set.join(", "));
            }
        }
        if let Some(r) = &self.marking_report {
            let _ = write!(out, "{r}");
        }
        out
    }
}

fn model_name(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("model").to_string()
}

pub fn cmd_analyze(opts: &AnalyzeOptions) -> Result<AnalyzeReport> {
    let (net, m0) = read_model(&opts.input, opts.format)?;
    analyze_net(&model_name(&opts.input), &net, &m0, opts)
}

/// [`cmd_analyze`] on an already loaded net; `opts.input` is ignored.
pub fn analyze_net(name: &str, net: &PetriNet, m0: &Marking, opts: &AnalyzeOptions) -> Result<AnalyzeReport> {
    let required = if opts.contains.is_empty() {
        None
    } else {
        Some(PlaceSet::from_names(net, &opts.contains).map_err(|_| {
            Error::usage(format!("--contains names a place that is not in the net: {}", opts.contains.join(",")))
        })?)
    };
    let budget = Budget::with_time_limit(Duration::from_millis(opts.timeout_ms));
    let siphons = match opts.target {
        Target::Siphons | Target::Both => {
            let r = enumerate_minimal_siphons(net, opts.engine, budget)?;
            Some(SetSummary::new(net, &r, required.as_ref()))
        }
        Target::Traps => None,
    };
    let traps = match opts.target {
        Target::Traps | Target::Both => {
            let r = enumerate_minimal_traps(net, opts.engine, budget)?;
            Some(SetSummary::new(net, &r, required.as_ref()))
        }
        Target::Siphons => None,
    };
    let marking_report = if opts.marking_report {
        Some(siphon_trap_report(net, m0, opts.engine, budget)?)
    } else {
        None
    };
    Ok(AnalyzeReport {
        model: name.to_string(),
        places: net.num_places(),
        transitions: net.num_transitions(),
        engine: opts.engine.to_string(),
        timeout_ms: opts.timeout_ms,
        contains: required.map(|_| opts.contains.clone()),
        siphons,
        traps,
        marking_report,
    })
}

// -------------------------------------------------------------------- gen

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenFamily {
    Chain { n: usize },
    SatReduction { vars: usize, clauses: usize, seed: u64 },
    RandomNet { places: usize, transitions: usize, degree: usize, seed: u64 },
}

/// Writes the generated net as PNML to `out`. The reduction family also
/// writes its 3-SAT formula as DIMACS next to it (same stem, `.cnf`).
/// Returns the files written.
pub fn cmd_gen(family: GenFamily, out: &Path) -> Result<Vec<PathBuf>> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let id = model_name(out);
    let mut written = vec![out.to_path_buf()];
    let net = match family {
        GenFamily::Chain { n } => gen_chain(n)?,
        GenFamily::SatReduction { vars, clauses, seed } => {
            let inst = gen_random_3sat(vars, clauses, seed)?;
            let cnf = out.with_extension("cnf");
            std::fs::write(&cnf, inst.to_dimacs())?;
            written.push(cnf);
            gen_3sat_reduction(&inst)?
        }
        GenFamily::RandomNet { places, transitions, degree, seed } => {
            gen_random_net(places, transitions, degree, seed)?
        }
    };
    std::fs::write(out, export_pnml_named(&net, &Marking::zero(&net), &id))?;
    Ok(written)
}

// ------------------------------------------------------------------ sweep

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub vars: usize,
    pub alphas: Vec<f64>,
    pub trials: usize,
    pub timeout_ms: u64,
    pub engine: Engine,
    pub seed: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            vars: 50,
            alphas: vec![0.0, 1.0, 2.0, 3.0, 4.0, 4.2, 4.4, 4.6, 5.0, 6.0, 8.0, 10.0],
            trials: 5,
            timeout_ms: DEFAULT_TIMEOUT_MS,
            engine: Engine::Sat,
            seed: 1,
        }
    }
}

/// One generated instance. `siphon_count` is a lower bound when the run
/// timed out, and `time_ms` is then exactly the timeout.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTrial {
    pub alpha: f64,
    pub trial: usize,
    pub seed: u64,
    pub places: usize,
    pub transitions: usize,
    pub density: f64,
    pub vars: usize,
    pub clauses: usize,
    pub time_ms: f64,
    pub timed_out: bool,
    pub siphon_count: usize,
}

/// Aggregate over the trials of one density: median time, fraction of
/// trials that timed out, and the median count over completed trials
/// (empty when none completed).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub places: usize,
    pub transitions: usize,
    pub density: f64,
    pub vars: usize,
    pub clauses: usize,
    pub time_ms: f64,
    pub timed_out: f64,
    pub siphon_count: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub trials: Vec<SweepTrial>,
}

fn median_f64(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn median_usize(mut v: Vec<usize>) -> Option<usize> {
    v.sort_unstable();
    (!v.is_empty()).then(|| v[(v.len() - 1) / 2])
}

impl SweepReport {
    /// `per_trial` selects one row per instance instead of per density.
    pub fn render(&self, format: OutputFormat, per_trial: bool) -> Result<String> {
        match (format, per_trial) {
            (OutputFormat::Json, _) => Ok(json_string(self)),
            (OutputFormat::Csv, false) => csv_string(&self.rows),
            (OutputFormat::Csv, true) => csv_string(&self.trials),
            (OutputFormat::Text, _) => {
                let mut out = String::new();
                let _ = writeln!(
                    out,
                    "{:>6} {:>7} {:>11} {:>7} {:>5} {:>7} {:>10} {:>8} {:>8}",
                    "alpha", "places", "transitions", "density", "vars", "clauses", "median_ms", "timeouts", "siphons"
                );
                for r in &self.rows {
                    let count = r.siphon_count.map_or("-".to_string(), |c| c.to_string());
                    let _ = writeln!(
                        out,
                        "{:>6.2} {:>7} {:>11} {:>7.3} {:>5} {:>7} {:>10.1} {:>8.2} {:>8}",
                        r.alpha, r.places, r.transitions, r.density, r.vars, r.clauses, r.time_ms, r.timed_out, count
                    );
                }
                Ok(out)
            }
        }
    }
}

/// Number of clauses for density `alpha` over `vars` variables.
pub fn clause_count(vars: usize, alpha: f64) -> usize {
    (alpha * vars as f64).round() as usize
}

/// Runs the density sweep. Trial `k` at the `i`-th density uses seed
/// `seed * 1_000_003 + i * 1000 + k`.
pub fn cmd_sweep(opts: &SweepOptions) -> Result<SweepReport> {
    cmd_sweep_with(opts, |_| {})
}

/// [`cmd_sweep`] with a callback after every trial, for progress output.
pub fn cmd_sweep_with(opts: &SweepOptions, mut progress: impl FnMut(&SweepTrial)) -> Result<SweepReport> {
    if opts.vars < 3 {
        return Err(Error::usage("sweep needs at least 3 variables"));
    }
    if opts.trials == 0 {
        return Err(Error::usage("sweep needs at least one trial per density"));
    }
    let budget = Budget::with_time_limit(Duration::from_millis(opts.timeout_ms));
    let mut rows = Vec::new();
    let mut trials = Vec::new();
    for (i, &alpha) in opts.alphas.iter().enumerate() {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::usage(format!("invalid density {alpha}")));
        }
        let clauses = clause_count(opts.vars, alpha);
        let mut point = Vec::new();
        for k in 0..opts.trials {
            let seed = opts
                .seed
                .wrapping_mul(1_000_003)
                .wrapping_add(i as u64 * 1000 + k as u64);
            let inst = gen_random_3sat(opts.vars, clauses, seed)?;
            let net = gen_3sat_reduction(&inst)?;
            let r = enumerate_minimal_siphons(&net, opts.engine, budget)?;
            let trial = SweepTrial {
                alpha,
                trial: k,
                seed,
                places: net.num_places(),
                transitions: net.num_transitions(),
                density: net.num_transitions() as f64 / net.num_places() as f64,
                vars: opts.vars,
                clauses,
                // A timed-out run is censored at the limit.
                time_ms: if r.stats.timed_out { opts.timeout_ms as f64 } else { millis(r.stats.elapsed) },
                timed_out: r.stats.timed_out,
                siphon_count: r.sets.len(),
            };
            progress(&trial);
            point.push(trial);
        }
        let first = &point[0];
        rows.push(SweepRow {
            alpha,
            places: first.places,
            transitions: first.transitions,
            density: first.density,
            vars: opts.vars,
            clauses,
            time_ms: median_f64(point.iter().map(|t| t.time_ms).collect()),
            timed_out: point.iter().filter(|t| t.timed_out).count() as f64 / point.len() as f64,
            siphon_count: median_usize(point.iter().filter(|t| !t.timed_out).map(|t| t.siphon_count).collect()),
        });
        trials.extend(point);
    }
    Ok(SweepReport { rows, trials })
}

// ------------------------------------------------------------------ stats

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelStats {
    pub model: String,
    pub places: usize,
    pub transitions: usize,
    pub siphon_count: usize,
    pub sizes: Option<Spread>,
    pub time_ms: f64,
    pub timed_out: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsFailure {
    pub file: String,
    pub error: String,
}

/// One corpus row: number of models, spread of minimal-siphon counts per
/// model, spread of siphon sizes over all siphons, and total time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsReport {
    pub corpus: String,
    pub engine: String,
    pub models: usize,
    pub siphon_counts: Option<Spread>,
    pub siphon_sizes: Option<Spread>,
    pub total_time_ms: f64,
    /// Some model timed out, so counts and sizes are lower bounds.
    pub partial: bool,
    pub rows: Vec<ModelStats>,
    pub failures: Vec<StatsFailure>,
}

impl StatsReport {
    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => Ok(json_string(self)),
            OutputFormat::Csv => {
                #[derive(Serialize)]
                struct Row<'a> {
                    model: &'a str,
                    places: usize,
                    transitions: usize,
                    siphon_count: usize,
                    size_min: Option<usize>,
                    size_max: Option<usize>,
                    size_avg: Option<f64>,
                    time_ms: f64,
                    timed_out: bool,
                }
                let rows: Vec<Row> = self
                    .rows
                    .iter()
                    .map(|r| Row {
                        model: &r.model,
                        places: r.places,
                        transitions: r.transitions,
                        siphon_count: r.siphon_count,
                        size_min: r.sizes.map(|s| s.min),
                        size_max: r.sizes.map(|s| s.max),
                        size_avg: r.sizes.map(|s| s.avg),
                        time_ms: r.time_ms,
                        timed_out: r.timed_out,
                    })
                    .collect();
                csv_string(&rows)
            }
            OutputFormat::Text => {
                let mut out = String::new();
                for r in &self.rows {
                    let sizes = r.sizes.map_or("-".to_string(), |s| s.to_string());
                    let flag = if r.timed_out { "  TIMEOUT" } else { "" };
                    let _ = writeln!(
                        out,
                        "{}: {} places, {} transitions, {} minimal siphons, sizes {sizes}, {:.3} ms{flag}",
                        r.model, r.places, r.transitions, r.siphon_count, r.time_ms
                    );
                }
                for f in &self.failures {
                    let _ = writeln!(out, "{}: not analyzed: {}", f.file, f.error);
                }
                let dash = |s: Option<Spread>| s.map_or("-".to_string(), |s| s.to_string());
                let _ = writeln!(
                    out,
                    "{:<16} {:>8} {:>22} {:>22} {:>14}",
                    "corpus", "#models", "#siphons min-max (avg)", "size min-max (avg)", "total ms"
                );
                let partial = if self.partial { " (partial)" } else { "" };
                let _ = writeln!(
                    out,
                    "{:<16} {:>8} {:>22} {:>22} {:>14.3}{partial}",
                    self.corpus,
                    self.models,
                    dash(self.siphon_counts),
                    dash(self.siphon_sizes),
                    self.total_time_ms
                );
                Ok(out)
            }
        }
    }
}

/// Analyzes every `.rxn`, `.pnml` and `.xml` file directly inside `dir`,
/// in file-name order. Files that fail to load are listed, not fatal.
pub fn cmd_stats(dir: &Path, engine: Engine, timeout_ms: u64) -> Result<StatsReport> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && matches!(
                    p.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
                    Some("rxn" | "pnml" | "xml")
                )
        })
        .collect();
    files.sort();
    let budget = Budget::with_time_limit(Duration::from_millis(timeout_ms));
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for f in &files {
        let file = f.file_name().and_then(|s| s.to_str()).unwrap_or("?").to_string();
        let loaded = read_model(f, None).and_then(|(net, _)| {
            let r = enumerate_minimal_siphons(&net, engine, budget)?;
            Ok((net, r))
        });
        match loaded {
            Ok((net, r)) => {
                let sizes: Vec<usize> = r.sets.iter().map(PlaceSet::len).collect();
                rows.push(ModelStats {
                    model: model_name(f),
                    places: net.num_places(),
                    transitions: net.num_transitions(),
                    siphon_count: r.sets.len(),
                    sizes: Spread::of(&sizes),
                    time_ms: millis(r.stats.elapsed),
                    timed_out: r.stats.timed_out,
                });
            }
            Err(e) => failures.push(StatsFailure { file, error: e.to_string() }),
        }
    }
    let counts: Vec<usize> = rows.iter().map(|r| r.siphon_count).collect();
    // Size spread over all siphons: combine the per-model spreads.
    let total_sets: usize = counts.iter().sum();
    let siphon_sizes = if total_sets == 0 {
        None
    } else {
        let with_sets = rows.iter().filter_map(|r| r.sizes.map(|s| (s, r.siphon_count)));
        let (mut min, mut max, mut sum) = (usize::MAX, 0, 0.0);
        for (s, n) in with_sets {
            min = min.min(s.min);
            max = max.max(s.max);
            sum += s.avg * n as f64;
        }
        Some(Spread { min, max, avg: sum / total_sets as f64 })
    };
    Ok(StatsReport {
        corpus: dir
            .file_name()
            .and_then(|s| s.to_str())
            .unwrap_or(".")
            .to_string(),
        engine: engine.to_string(),
        models: rows.len(),
        siphon_counts: Spread::of(&counts),
        siphon_sizes,
        total_time_ms: rows.iter().map(|r| r.time_ms).sum(),
        partial: rows.iter().any(|r| r.timed_out),
        rows,
        failures,
    })
}
