//! Batch execution across seeds, aggregation, experiment presets and
//! CSV/SVG export.
//!
//! Output layout for an experiment:
//!
//! ```text
//! <output_dir>/<experiment>/<condition_label>.csv
//! <output_dir>/<experiment>/chart.svg
//! ```

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::simulation::{run, MetricsRecord, SimError, WorldConfig};

pub const DEFAULT_RUNS: usize = 10;

pub const CSV_HEADER: &str =
    "iteration,mean_fitness,fitness_stddev,diversity,diversity_stddev,mean_chain_length,fraction_optimal_base";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Fig3Fitness,
    Fig4Diversity,
    Fig5LearningMatrix,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 3] = [
        ExperimentKind::Fig3Fitness,
        ExperimentKind::Fig4Diversity,
        ExperimentKind::Fig5LearningMatrix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Fig3Fitness => "fig3_fitness",
            ExperimentKind::Fig4Diversity => "fig4_diversity",
            ExperimentKind::Fig5LearningMatrix => "fig5_learning_matrix",
        }
    }

    pub fn short_name(self) -> &'static str {
        &self.name()[..4]
    }

    /// Accepts either the short (`fig3`) or the full (`fig3_fitness`) name.
    pub fn parse(name: &str) -> Result<Self, HarnessError> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name || k.short_name() == name)
            .ok_or_else(|| {
                HarnessError::Usage(format!(
                    "unknown experiment `{name}`; valid names: fig3, fig4, fig5"
                ))
            })
    }

    /// The metric plotted in this experiment's chart.
    pub fn metric(self) -> Metric {
        match self {
            ExperimentKind::Fig4Diversity => Metric::Diversity,
            _ => Metric::MeanFitness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub label: String,
    pub chaining_enabled: bool,
    pub learning_enabled: bool,
}

impl Condition {
    pub fn new(label: &str, chaining_enabled: bool, learning_enabled: bool) -> Self {
        Condition {
            label: label.to_string(),
            chaining_enabled,
            learning_enabled,
        }
    }

    pub fn apply(&self, base: &WorldConfig) -> WorldConfig {
        let mut cfg = base.clone();
        cfg.invention_params.chaining_enabled = self.chaining_enabled;
        cfg.invention_params.learning_enabled = self.learning_enabled;
        cfg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub runs: usize,
    /// Shared by every condition; `base_config.seed` is the first run's seed.
    pub base_config: WorldConfig,
    pub conditions: Vec<Condition>,
}

impl ExperimentSpec {
    pub fn preset(kind: ExperimentKind, runs: usize, base_config: WorldConfig) -> Self {
        let conditions = match kind {
            ExperimentKind::Fig3Fitness | ExperimentKind::Fig4Diversity => vec![
                Condition::new("chaining", true, true),
                Condition::new("no_chaining", false, true),
            ],
            ExperimentKind::Fig5LearningMatrix => vec![
                Condition::new("chaining_learning", true, true),
                Condition::new("chaining_only", true, false),
                Condition::new("learning_only", false, true),
                Condition::new("neither", false, false),
            ],
        };
        ExperimentSpec {
            kind,
            runs,
            base_config,
            conditions,
        }
    }
}

/// Per-iteration values of every metric, as reals so they can be averaged.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SeriesPoint {
    pub iteration: usize,
    pub mean_fitness: f64,
    pub diversity: f64,
    pub mean_chain_length: f64,
    pub fraction_optimal_base: f64,
}

impl SeriesPoint {
    fn values(&self) -> [f64; 4] {
        [
            self.mean_fitness,
            self.diversity,
            self.mean_chain_length,
            self.fraction_optimal_base,
        ]
    }

    fn from_values(iteration: usize, v: [f64; 4]) -> Self {
        SeriesPoint {
            iteration,
            mean_fitness: v[0],
            diversity: v[1],
            mean_chain_length: v[2],
            fraction_optimal_base: v[3],
        }
    }

    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::MeanFitness => self.mean_fitness,
            Metric::Diversity => self.diversity,
            Metric::MeanChainLength => self.mean_chain_length,
            Metric::FractionOptimalBase => self.fraction_optimal_base,
        }
    }
}

impl From<&MetricsRecord> for SeriesPoint {
    fn from(r: &MetricsRecord) -> Self {
        SeriesPoint {
            iteration: r.iteration,
            mean_fitness: r.mean_fitness,
            diversity: r.diversity as f64,
            mean_chain_length: r.mean_chain_length,
            fraction_optimal_base: r.fraction_optimal_base,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    MeanFitness,
    Diversity,
    MeanChainLength,
    FractionOptimalBase,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::MeanFitness => "mean_fitness",
            Metric::Diversity => "diversity",
            Metric::MeanChainLength => "mean_chain_length",
            Metric::FractionOptimalBase => "fraction_optimal_base",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSeries {
    pub condition_label: String,
    pub per_iteration_mean: Vec<SeriesPoint>,
    /// Population standard deviation across runs.
    pub per_iteration_stddev: Vec<SeriesPoint>,
}

impl AggregateSeries {
    pub fn len(&self) -> usize {
        self.per_iteration_mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_iteration_mean.is_empty()
    }

    pub fn final_mean(&self) -> Option<&SeriesPoint> {
        self.per_iteration_mean.last()
    }
}

/// Averages equally long per-run series, iteration by iteration, in the
/// order given.
pub fn aggregate(label: &str, runs: &[Vec<MetricsRecord>]) -> Result<AggregateSeries, HarnessError> {
    let Some(first) = runs.first() else {
        return Err(HarnessError::Usage("cannot aggregate zero runs".into()));
    };
    if runs.iter().any(|r| r.len() != first.len()) {
        return Err(HarnessError::Usage("runs have different lengths".into()));
    }
    let n = runs.len() as f64;
    let mut means = Vec::with_capacity(first.len());
    let mut stddevs = Vec::with_capacity(first.len());
    for (t, record) in first.iter().enumerate() {
        let samples: Vec<[f64; 4]> = runs.iter().map(|r| SeriesPoint::from(&r[t]).values()).collect();
        let mut mean = [0.0; 4];
        for s in &samples {
            for k in 0..4 {
                mean[k] += s[k];
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = [0.0; 4];
        for s in &samples {
            for k in 0..4 {
                var[k] += (s[k] - mean[k]).powi(2);
            }
        }
        let sd = var.map(|v| (v / n).sqrt());
        means.push(SeriesPoint::from_values(record.iteration, mean));
        stddevs.push(SeriesPoint::from_values(record.iteration, sd));
    }
    Ok(AggregateSeries {
        condition_label: label.to_string(),
        per_iteration_mean: means,
        per_iteration_stddev: stddevs,
    })
}

/// Runs seeds `base_seed, base_seed + 1, ...` in parallel, returned in seed order.
pub fn run_seeds(config: &WorldConfig, runs: usize, base_seed: u64) -> Result<Vec<Vec<MetricsRecord>>, HarnessError> {
    if runs == 0 {
        return Err(HarnessError::Usage("runs must be at least 1".into()));
    }
    config.validate()?;
    (0..runs as u64)
        .into_par_iter()
        .map(|i| run(&config.with_seed(base_seed.wrapping_add(i))).map_err(HarnessError::from))
        .collect()
}

pub fn run_batch(config: &WorldConfig, runs: usize, base_seed: u64) -> Result<AggregateSeries, HarnessError> {
    let label = format!("seeds_{base_seed}_x{runs}");
    aggregate(&label, &run_seeds(config, runs, base_seed)?)
}

/// Integral values keep one decimal place; others use the shortest exact form.
fn decimal(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

fn count_like(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

pub fn csv_string(series: &AggregateSeries) -> String {
    let mut out = String::with_capacity(64 * (series.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (m, s) in series.per_iteration_mean.iter().zip(&series.per_iteration_stddev) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            m.iteration,
            decimal(m.mean_fitness),
            decimal(s.mean_fitness),
            count_like(m.diversity),
            decimal(s.diversity),
            decimal(m.mean_chain_length),
            decimal(m.fraction_optimal_base),
        );
    }
    out
}

pub fn write_csv(series: &AggregateSeries, path: &Path) -> Result<(), HarnessError> {
    fs::write(path, csv_string(series)).map_err(io_err(path))
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const DASHES: [&str; 4] = ["", "8 4", "2 3", "8 3 2 3"];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// A line chart of `metric` over iterations with one series per aggregate.
pub fn chart_svg(aggregates: &[AggregateSeries], metric: Metric) -> Result<String, HarnessError> {
    let Some(first) = aggregates.first() else {
        return Err(HarnessError::Usage("render_chart needs at least one series".into()));
    };
    if first.is_empty() {
        return Err(HarnessError::Usage("render_chart needs non-empty series".into()));
    }
    if aggregates.iter().any(|a| a.len() != first.len()) {
        return Err(HarnessError::Usage("render_chart series must have equal lengths".into()));
    }

    let (width, height) = (800.0, 480.0);
    let (left, right, top, bottom) = (70.0, 190.0, 40.0, 60.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;

    let x_max = first.per_iteration_mean.last().unwrap().iteration.max(1) as f64;
    let y_hi = aggregates
        .iter()
        .flat_map(|a| a.per_iteration_mean.iter().map(|p| p.get(metric)))
        .fold(0.0_f64, f64::max);
    let y_max = if y_hi > 0.0 { (y_hi * 1.05).ceil() } else { 1.0 };
    let sx = |x: f64| left + x / x_max * plot_w;
    let sy = |y: f64| top + plot_h - y / y_max * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r##"<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#444"/>"##
    );

    for i in 0..=5 {
        let frac = f64::from(i) / 5.0;
        let (xv, yv) = (frac * x_max, frac * y_max);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            svg,
            r##"<line x1="{left}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/>"##,
            left + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 6.0,
            py + 4.0,
            trim_tick(yv)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            top + plot_h + 18.0,
            trim_tick(xv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text class="x-label" x="{:.2}" y="{:.2}" text-anchor="middle">iteration</text>"#,
        left + plot_w / 2.0,
        height - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text class="y-label" x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0,
        metric.name()
    );

    for (i, agg) in aggregates.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = DASHES[i % DASHES.len()];
        let points: Vec<String> = agg
            .per_iteration_mean
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.iteration as f64), sy(p.get(metric))))
            .collect();
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2"{dash_attr} points="{}"/>"#,
            points.join(" ")
        );
        let ly = top + 10.0 + 20.0 * i as f64;
        let lx = left + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash_attr}/>"#,
            lx + 30.0
        );
        let _ = writeln!(
            svg,
            r#"<text class="legend" x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 36.0,
            ly + 4.0,
            xml_escape(&agg.condition_label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn trim_tick(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn render_chart(aggregates: &[AggregateSeries], metric: Metric, path: &Path) -> Result<(), HarnessError> {
    let svg = chart_svg(aggregates, metric)?;
    fs::write(path, svg).map_err(io_err(path))
}

/// Result of one experiment: per-condition aggregates and the files written.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub aggregates: Vec<AggregateSeries>,
    pub files: Vec<PathBuf>,
}

pub fn run_experiment(spec: &ExperimentSpec, output_dir: &Path) -> Result<ExperimentOutput, HarnessError> {
    let dir = output_dir.join(spec.kind.name());
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let mut aggregates = Vec::with_capacity(spec.conditions.len());
    let mut files = Vec::with_capacity(spec.conditions.len() + 1);
    for cond in &spec.conditions {
        let cfg = cond.apply(&spec.base_config);
        let runs = run_seeds(&cfg, spec.runs, spec.base_config.seed)?;
        let agg = aggregate(&cond.label, &runs)?;
        let path = dir.join(format!("{}.csv", cond.label));
        write_csv(&agg, &path)?;
        files.push(path);
        aggregates.push(agg);
    }
    let chart = dir.join("chart.svg");
    render_chart(&aggregates, spec.kind.metric(), &chart)?;
    files.push(chart);
    Ok(ExperimentOutput { aggregates, files })
}
