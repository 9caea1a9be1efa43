//! Experiment protocols: paired multi-seed accuracy comparison and runtime
//! scaling in the number of objects or clusters.
//!
//! Run `i` of an experiment uses seed `base_seed + i` (wrapping). The initial
//! centers are sampled once from that seed and handed to every schema, so
//! per-run differences between schemas come from the weighting alone.

use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{ClassLabels, EncodedDataset};
use crate::engine::{self, Centers, Preprocessed, RunConfig};
use crate::error::{Error, Result};
use crate::eval::clustering_accuracy;
use crate::weights::WeightingSchema;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentSpec {
    pub schemas: Vec<WeightingSchema>,
    pub run_count: usize,
    pub base_seed: u64,
    /// Defaults to the number of classes.
    pub k: Option<usize>,
    pub max_iterations: usize,
}

impl ExperimentSpec {
    pub const DEFAULT_RUN_COUNT: usize = 100;

    pub fn new(schemas: impl Into<Vec<WeightingSchema>>) -> Self {
        Self {
            schemas: schemas.into(),
            run_count: Self::DEFAULT_RUN_COUNT,
            base_seed: 0,
            k: None,
            max_iterations: RunConfig::DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn with_runs(mut self, run_count: usize) -> Self {
        self.run_count = run_count;
        self
    }

    pub fn with_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }
}

/// Seed of run `run` in an experiment based at `base_seed`.
pub fn run_seed(base_seed: u64, run: usize) -> u64 {
    base_seed.wrapping_add(run as u64)
}

/// Outcome of one schema on one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub accuracy: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub wall_time_secs: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemaSummary {
    pub schema: WeightingSchema,
    /// Over successful runs; `None` when every run failed.
    pub mean_accuracy: Option<f64>,
    /// Sample standard deviation over successful runs.
    pub std_accuracy: Option<f64>,
    pub mean_iterations: Option<f64>,
    pub mean_wall_time_secs: Option<f64>,
    pub failures: usize,
    pub runs: Vec<RunOutcome>,
}

impl SchemaSummary {
    pub fn accuracies(&self) -> impl Iterator<Item = Option<f64>> + '_ {
        self.runs.iter().map(|r| r.accuracy)
    }
}

/// Per-run `accuracy(schema) - accuracy(baseline)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedDelta {
    pub baseline: WeightingSchema,
    pub schema: WeightingSchema,
    pub deltas: Vec<Option<f64>>,
    /// Over runs where both schemas succeeded.
    pub mean_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub k: usize,
    pub n: usize,
    pub run_count: usize,
    pub base_seed: u64,
    pub seeds: Vec<u64>,
    /// Object rows used as initial centers in each run.
    pub initial_rows: Vec<Vec<usize>>,
    pub preprocessing_time_secs: f64,
    pub schemas: Vec<SchemaSummary>,
    /// Every schema after the first against the first.
    pub deltas: Vec<PairedDelta>,
}

impl ExperimentReport {
    pub fn summary(&self, schema: WeightingSchema) -> Option<&SchemaSummary> {
        self.schemas.iter().find(|s| s.schema == schema)
    }

    pub fn delta(&self, schema: WeightingSchema) -> Option<&PairedDelta> {
        self.deltas.iter().find(|d| d.schema == schema)
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn sample_std(values: &[f64]) -> Option<f64> {
    let mu = mean(values)?;
    if values.len() < 2 {
        return Some(0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mu) * (v - mu)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}

/// Runs every schema from identical initial centers on each of `run_count`
/// seeds and scores each partition against `labels`.
pub fn paired_experiment(
    data: &EncodedDataset,
    labels: &ClassLabels,
    spec: &ExperimentSpec,
) -> Result<ExperimentReport> {
    if spec.schemas.is_empty() {
        return Err(Error::Config("no schemas to compare".into()));
    }
    if spec.run_count == 0 {
        return Err(Error::Config("run count must be at least 1".into()));
    }
    if labels.len() != data.n() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: data.n(),
        });
    }
    let k = spec.k.unwrap_or_else(|| labels.class_count());
    let pre = Preprocessed::new(data, spec.schemas.iter().copied())?;
    let seeds: Vec<u64> = (0..spec.run_count)
        .map(|i| run_seed(spec.base_seed, i))
        .collect();
    let initial_rows = seeds
        .iter()
        .map(|&seed| engine::sample_center_rows(data.n(), k, seed))
        .collect::<Result<Vec<_>>>()?;

    let per_run: Vec<Vec<RunOutcome>> = initial_rows
        .par_iter()
        .map(|rows| {
            let centers = Centers::from_rows(data, rows).expect("sampled rows are in range");
            spec.schemas
                .iter()
                .map(|&schema| {
                    let config = RunConfig::new(k, schema)
                        .with_max_iterations(spec.max_iterations)
                        .with_initial_centers(centers.clone());
                    let outcome = engine::run_preprocessed(data, &pre, &config).and_then(|r| {
                        let report = clustering_accuracy(
                            r.membership.as_slice(),
                            labels.ids(),
                            k,
                            labels.class_count(),
                        )?;
                        Ok((r, report.accuracy))
                    });
                    match outcome {
                        Ok((r, accuracy)) => RunOutcome {
                            accuracy: Some(accuracy),
                            iterations: Some(r.iterations),
                            converged: Some(r.converged),
                            wall_time_secs: Some((r.wall_time - r.preprocessing_time).as_secs_f64()),
                            error: None,
                        },
                        Err(e) => RunOutcome {
                            accuracy: None,
                            iterations: None,
                            converged: None,
                            wall_time_secs: None,
                            error: Some(e.to_string()),
                        },
                    }
                })
                .collect()
        })
        .collect();

    let schemas: Vec<SchemaSummary> = spec
        .schemas
        .iter()
        .enumerate()
        .map(|(s, &schema)| {
            let runs: Vec<RunOutcome> = per_run.iter().map(|r| r[s].clone()).collect();
            let acc: Vec<f64> = runs.iter().filter_map(|r| r.accuracy).collect();
            let iters: Vec<f64> = runs.iter().filter_map(|r| r.iterations.map(|i| i as f64)).collect();
            let times: Vec<f64> = runs.iter().filter_map(|r| r.wall_time_secs).collect();
            SchemaSummary {
                schema,
                mean_accuracy: mean(&acc),
                std_accuracy: sample_std(&acc),
                mean_iterations: mean(&iters),
                mean_wall_time_secs: mean(&times),
                failures: runs.len() - acc.len(),
                runs,
            }
        })
        .collect();

    let baseline = &schemas[0];
    let deltas = schemas[1..]
        .iter()
        .map(|other| {
            let deltas: Vec<Option<f64>> = baseline
                .accuracies()
                .zip(other.accuracies())
                .map(|(b, o)| Some(o? - b?))
                .collect();
            let present: Vec<f64> = deltas.iter().flatten().copied().collect();
            PairedDelta {
                baseline: baseline.schema,
                schema: other.schema,
                mean_delta: mean(&present),
                deltas,
            }
        })
        .collect();

    Ok(ExperimentReport {
        k,
        n: data.n(),
        run_count: spec.run_count,
        base_seed: spec.base_seed,
        seeds,
        initial_rows,
        preprocessing_time_secs: pre.elapsed.as_secs_f64(),
        schemas,
        deltas,
    })
}

/// The swept quantity of a scaling experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScaleAxis {
    /// Prefixes of the dataset with the given object counts, at fixed `k`.
    Objects { counts: Vec<usize>, k: usize },
    /// The whole dataset with each cluster count.
    Clusters { counts: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleSpec {
    pub axis: ScaleAxis,
    pub schemas: Vec<WeightingSchema>,
    pub seed: u64,
    /// Runs per point; repeat `r` uses seed `seed + r`. On the object axis
    /// its initial centers are sampled once from the smallest prefix and
    /// shared by every size.
    pub repeats: usize,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub schema: WeightingSchema,
    pub n: usize,
    pub k: usize,
    pub mean_iterations: f64,
    pub mean_wall_time_secs: f64,
    pub mean_preprocessing_secs: f64,
}

impl TimingRow {
    pub fn mean_time_per_iteration_secs(&self) -> f64 {
        self.mean_wall_time_secs / self.mean_iterations
    }
}

/// Times every schema at every point of the axis. Runs execute serially.
pub fn scalability_experiment(data: &EncodedDataset, spec: &ScaleSpec) -> Result<Vec<TimingRow>> {
    if spec.repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    let points: Vec<(usize, usize)> = match &spec.axis {
        ScaleAxis::Objects { counts, k } => counts.iter().map(|&n| (n, *k)).collect(),
        ScaleAxis::Clusters { counts } => counts.iter().map(|&k| (data.n(), k)).collect(),
    };
    // On the object axis every size starts repeat `r` from the same objects,
    // drawn from the smallest prefix, so sizes differ only in the data added.
    let shared_rows = match &spec.axis {
        ScaleAxis::Objects { counts, k } => {
            let smallest = counts.iter().copied().min().unwrap_or(0);
            Some(
                (0..spec.repeats)
                    .map(|r| engine::sample_center_rows(smallest, *k, run_seed(spec.seed, r)))
                    .collect::<Result<Vec<_>>>()?,
            )
        }
        ScaleAxis::Clusters { .. } => None,
    };
    let mut rows = Vec::with_capacity(points.len() * spec.schemas.len());
    for (n, k) in points {
        let subset = if n == data.n() {
            std::borrow::Cow::Borrowed(data)
        } else {
            std::borrow::Cow::Owned(data.prefix(n)?)
        };
        let centers: Vec<Centers> = match &shared_rows {
            Some(shared) => shared
                .iter()
                .map(|r| Centers::from_rows(&subset, r))
                .collect::<Result<_>>()?,
            None => (0..spec.repeats)
                .map(|r| engine::init_centers(&subset, k, run_seed(spec.seed, r)))
                .collect::<Result<_>>()?,
        };
        for &schema in &spec.schemas {
            let mut wall = Duration::ZERO;
            let mut prep = Duration::ZERO;
            let mut iterations = 0usize;
            for c in &centers {
                let config = RunConfig::new(k, schema)
                    .with_max_iterations(spec.max_iterations)
                    .with_initial_centers(c.clone());
                let result = engine::run(&subset, &config)?;
                wall += result.wall_time;
                prep += result.preprocessing_time;
                iterations += result.iterations;
            }
            let r = spec.repeats as f64;
            rows.push(TimingRow {
                schema,
                n,
                k,
                mean_iterations: iterations as f64 / r,
                mean_wall_time_secs: wall.as_secs_f64() / r,
                mean_preprocessing_secs: prep.as_secs_f64() / r,
            });
        }
    }
    Ok(rows)
}

/// Ordinary least squares `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::Precondition("a line needs at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("x values are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Fit of mean wall time against the swept quantity for one schema.
pub fn fit_rows(rows: &[TimingRow], schema: WeightingSchema, by_objects: bool) -> Result<LinearFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.schema == schema)
        .map(|r| {
            let x = if by_objects { r.n } else { r.k } as f64;
            (x, r.mean_wall_time_secs)
        })
        .unzip();
    linear_fit(&xs, &ys)
}
