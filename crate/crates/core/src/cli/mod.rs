//! The `wkmodes` command line.
//!
//! Subcommands: `cluster` (one seeded run), `accuracy` (score a membership
//! file), `table2` (paired multi-seed comparison across schemas and datasets)
//! and `scale` (runtime against object or cluster count). Results are
//! assembled in memory and written only once everything has succeeded.
//! Timing values always live in fields whose names end in `_secs`.

pub mod files;

use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bench::{self, ExperimentReport, ExperimentSpec, LinearFit, ScaleAxis, ScaleSpec, TimingRow};
use crate::dataset::{load_path, ColumnRef, LabeledDataset, MissingValues, TableFormat};
use crate::engine::{self, Centers, RunConfig, StopReason};
use crate::error::Error;
use crate::eval::clustering_accuracy;
use crate::synth::PlantedMixture;
use crate::weights::WeightingSchema;

pub use files::{parse_data_spec, parse_labels, parse_membership, DataSpec};

#[derive(Debug, Parser)]
#[command(name = "wkmodes", version, about = "k-modes clustering with attribute value weighting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one seeded clustering.
    Cluster(ClusterArgs),
    /// Score a membership file against class labels.
    Accuracy(AccuracyArgs),
    /// Paired multi-seed accuracy comparison of schemas over datasets.
    Table2(Table2Args),
    /// Runtime against the number of objects or clusters.
    Scale(ScaleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassColumn(pub Option<ColumnRef>);

fn class_column(s: &str) -> Result<ClassColumn, Error> {
    files::parse_class_column(s).map(ClassColumn)
}

fn delimiter(s: &str) -> Result<char, Error> {
    files::parse_delimiter(s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaList(pub Vec<WeightingSchema>);

fn schema_list(s: &str) -> Result<SchemaList, Error> {
    files::parse_schema_list(s).map(SchemaList)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountList(pub Vec<usize>);

fn count_list(s: &str) -> Result<CountList, Error> {
    files::parse_count_list(s).map(CountList)
}

#[derive(Debug, Clone, Args)]
pub struct FormatArgs {
    /// Field delimiter (`tab` for tabs).
    #[arg(long, default_value = ",", value_parser = delimiter)]
    pub delimiter: char,
    /// Class column: zero-based index, `last`, or `none`.
    #[arg(long = "class-col", default_value = "none", value_parser = class_column)]
    pub class_col: ClassColumn,
    /// Column to ignore, e.g. a record id. Repeatable.
    #[arg(long = "skip-col")]
    pub skip_col: Vec<ColumnRef>,
    /// Missing-value marker.
    #[arg(long, default_value = "?")]
    pub missing: String,
    /// `category` keeps the marker as a value; `drop` discards affected rows.
    #[arg(long = "missing-policy", default_value = "category")]
    pub missing_policy: MissingValues,
}

impl FormatArgs {
    pub fn table_format(&self) -> TableFormat {
        TableFormat {
            delimiter: self.delimiter,
            class_column: self.class_col.0,
            skip_columns: self.skip_col.clone(),
            missing_marker: self.missing.clone(),
            missing: self.missing_policy,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub format: FormatArgs,
    #[arg(long, default_value = "kmodes")]
    pub schema: WeightingSchema,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-iterations", default_value_t = RunConfig::DEFAULT_MAX_ITERATIONS)]
    pub max_iterations: usize,
    /// Directory receiving membership.txt, centers.csv, trace.csv and
    /// summary.json. Without it the membership goes to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Summary document path (overrides the one in --output).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AccuracyArgs {
    #[arg(long)]
    pub membership: PathBuf,
    /// One class token per line.
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    pub labels: Option<PathBuf>,
    /// Take labels from the class column of a dataset instead.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub format: FormatArgs,
    /// Number of clusters; defaults to the largest index plus one.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct Table2Args {
    /// Dataset, optionally with overrides: `PATH#class=last,skip=0`. Repeatable.
    #[arg(long, required = true)]
    pub data: Vec<String>,
    #[command(flatten)]
    pub format: FormatArgs,
    /// Comma-separated schema names, or `all`.
    #[arg(long, default_value = "all", value_parser = schema_list)]
    pub schemas: SchemaList,
    /// Defaults to each dataset's class count.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = ExperimentSpec::DEFAULT_RUN_COUNT)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-iterations", default_value_t = RunConfig::DEFAULT_MAX_ITERATIONS)]
    pub max_iterations: usize,
    /// Table path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Full per-run report as JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScaleArgs {
    #[arg(long, conflicts_with = "generate", required_unless_present = "generate")]
    pub data: Option<PathBuf>,
    /// Built-in synthetic dataset instead of a file; only `nursery`.
    #[arg(long)]
    pub generate: Option<String>,
    #[arg(long = "generate-seed", default_value_t = 0)]
    pub generate_seed: u64,
    #[command(flatten)]
    pub format: FormatArgs,
    #[arg(long, default_value = "all", value_parser = schema_list)]
    pub schemas: SchemaList,
    /// Prefix sizes, comma-separated.
    #[arg(long, value_parser = count_list, conflicts_with = "clusters", required_unless_present = "clusters")]
    pub objects: Option<CountList>,
    /// Cluster counts, comma-separated.
    #[arg(long, value_parser = count_list)]
    pub clusters: Option<CountList>,
    /// Cluster count for the object axis.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-iterations", default_value_t = RunConfig::DEFAULT_MAX_ITERATIONS)]
    pub max_iterations: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

/// A library error with the file or step it came from.
#[derive(Debug)]
pub struct CliError {
    pub context: String,
    pub source: Error,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.context, self.source)
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

trait Context<T> {
    fn context(self, what: impl fmt::Display) -> Result<T, CliError>;
}

impl<T, E: Into<Error>> Context<T> for Result<T, E> {
    fn context(self, what: impl fmt::Display) -> Result<T, CliError> {
        self.map_err(|e| CliError {
            context: what.to_string(),
            source: e.into(),
        })
    }
}

/// Parses the process arguments, runs, and maps failures to exit status 1.
/// Usage errors exit with status 2 inside the parser.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    match execute(&cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wkmodes: {e}");
            ExitCode::FAILURE
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Cluster(args) => cluster(args, out),
        Command::Accuracy(args) => accuracy(args, out),
        Command::Table2(args) => table2(args, out),
        Command::Scale(args) => scale(args, out),
    }
}

fn load(path: &Path, format: &TableFormat) -> Result<LabeledDataset, CliError> {
    load_path(path, format).context(path.display())
}

struct PendingFile {
    path: PathBuf,
    contents: Vec<u8>,
}

fn write_all(files: Vec<PendingFile>) -> Result<(), CliError> {
    for f in files {
        fs::write(&f.path, &f.contents).context(f.path.display())?;
    }
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
    bytes.push(b'\n');
    bytes
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

#[derive(Debug, Serialize)]
struct ClusterSummary {
    dataset: String,
    n: usize,
    m: usize,
    k: usize,
    schema: WeightingSchema,
    seed: u64,
    max_iterations: usize,
    initial_rows: Vec<usize>,
    iterations: usize,
    converged: bool,
    stop_reason: StopReason,
    repairs: usize,
    objective: f64,
    cluster_sizes: Vec<usize>,
    accuracy: Option<f64>,
    wall_time_secs: f64,
    preprocessing_time_secs: f64,
}

fn cluster(args: &ClusterArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ds = load(&args.data, &args.format.table_format())?;
    let data = &ds.data;
    let initial_rows = engine::sample_center_rows(data.n(), args.k, args.seed).context("initialization")?;
    let centers = Centers::from_rows(data, &initial_rows).context("initialization")?;
    let config = RunConfig::new(args.k, args.schema)
        .with_seed(args.seed)
        .with_max_iterations(args.max_iterations)
        .with_initial_centers(centers);
    let result = engine::run(data, &config).context(format!("{} clustering", args.schema))?;
    let accuracy = match &ds.labels {
        Some(labels) => Some(
            clustering_accuracy(result.membership.as_slice(), labels.ids(), args.k, labels.class_count())
                .context("accuracy")?
                .accuracy,
        ),
        None => None,
    };

    let mut membership = String::with_capacity(data.n() * 2);
    for l in result.membership.as_slice() {
        membership.push_str(&l.to_string());
        membership.push('\n');
    }
    let summary = ClusterSummary {
        dataset: args.data.display().to_string(),
        n: data.n(),
        m: data.m(),
        k: args.k,
        schema: args.schema,
        seed: args.seed,
        max_iterations: args.max_iterations,
        initial_rows,
        iterations: result.iterations,
        converged: result.converged,
        stop_reason: result.stop_reason,
        repairs: result.repairs,
        objective: result.objective(),
        cluster_sizes: result.membership.cluster_sizes(args.k),
        accuracy,
        wall_time_secs: result.wall_time.as_secs_f64(),
        preprocessing_time_secs: result.preprocessing_time.as_secs_f64(),
    };

    let mut pending = Vec::new();
    if let Some(dir) = &args.output {
        fs::create_dir_all(dir).context(dir.display())?;
        let mut centers = String::from("cluster");
        for j in 0..data.m() {
            centers.push_str(&format!(",a{j}"));
        }
        centers.push('\n');
        for (l, row) in result.centers.decode(data.schema()).iter().enumerate() {
            centers.push_str(&l.to_string());
            for v in row {
                centers.push(',');
                centers.push_str(&csv_field(v));
            }
            centers.push('\n');
        }
        let mut trace = String::from("iteration,objective\n");
        for (t, p) in result.objective_trace.iter().enumerate() {
            trace.push_str(&format!("{},{p}\n", t + 1));
        }
        pending.push(PendingFile { path: dir.join("membership.txt"), contents: membership.into_bytes() });
        pending.push(PendingFile { path: dir.join("centers.csv"), contents: centers.into_bytes() });
        pending.push(PendingFile { path: dir.join("trace.csv"), contents: trace.into_bytes() });
        if args.summary.is_none() {
            pending.push(PendingFile { path: dir.join("summary.json"), contents: json_bytes(&summary) });
        }
    } else {
        out.write_all(membership.as_bytes()).context("stdout")?;
    }
    if let Some(path) = &args.summary {
        pending.push(PendingFile { path: path.clone(), contents: json_bytes(&summary) });
    }
    write_all(pending)
}

#[derive(Debug, Serialize)]
struct AccuracySummary {
    n: usize,
    k: usize,
    class_count: usize,
    accuracy: f64,
    matched: usize,
    dominant_class: Vec<Option<String>>,
    contingency: Vec<Vec<usize>>,
}

fn accuracy(args: &AccuracyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let path = &args.membership;
    let membership = File::open(path)
        .map_err(Error::from)
        .and_then(|f| parse_membership(BufReader::new(f)))
        .context(path.display())?;
    let labels = match (&args.labels, &args.data) {
        (Some(path), _) => File::open(path)
            .map_err(Error::from)
            .and_then(|f| parse_labels(BufReader::new(f)))
            .context(path.display())?,
        (None, Some(path)) => {
            let mut format = args.format.table_format();
            if format.class_column.is_none() {
                format.class_column = Some(ColumnRef::Last);
            }
            load(path, &format)?
                .labels
                .expect("class column was set")
        }
        (None, None) => unreachable!("clap requires one label source"),
    };
    let k = args
        .k
        .unwrap_or_else(|| membership.iter().max().map_or(0, |&l| l as usize + 1));
    let report = clustering_accuracy(&membership, labels.ids(), k, labels.class_count())
        .context("accuracy")?;
    let summary = AccuracySummary {
        n: membership.len(),
        k,
        class_count: labels.class_count(),
        accuracy: report.accuracy,
        matched: report.matched(),
        dominant_class: report
            .dominant
            .iter()
            .map(|d| d.and_then(|(c, _)| labels.name(c).map(str::to_owned)))
            .collect(),
        contingency: report.contingency,
    };
    out.write_all(&json_bytes(&summary)).context("stdout")
}

#[derive(Debug, Serialize)]
struct DatasetReport {
    dataset: String,
    path: String,
    report: ExperimentReport,
}

const TABLE2_HEADER: &str =
    "dataset,n,k,schema,mean_accuracy,std_accuracy,mean_delta_vs_first,failures,mean_iterations,mean_wall_time_secs\n";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.6}"))
}

fn table2(args: &Table2Args, out: &mut dyn Write) -> Result<(), CliError> {
    let defaults = args.format.table_format();
    let specs = args
        .data
        .iter()
        .map(|s| parse_data_spec(s, &defaults).context(format!("--data {s:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    let mut reports = Vec::with_capacity(specs.len());
    for spec in &specs {
        let ds = load(&spec.path, &spec.format)?;
        let labels = ds.labels.as_ref().ok_or_else(|| CliError {
            context: spec.path.display().to_string(),
            source: Error::Config("table2 needs a class column (--class-col)".into()),
        })?;
        let mut experiment = ExperimentSpec::new(args.schemas.0.clone())
            .with_runs(args.runs)
            .with_seed(args.seed);
        experiment.k = args.k;
        experiment.max_iterations = args.max_iterations;
        let report = bench::paired_experiment(&ds.data, labels, &experiment).context(spec.path.display())?;
        reports.push(DatasetReport {
            dataset: spec.name(),
            path: spec.path.display().to_string(),
            report,
        });
    }

    let mut table = String::from(TABLE2_HEADER);
    for r in &reports {
        for s in &r.report.schemas {
            let delta = r.report.delta(s.schema).and_then(|d| d.mean_delta);
            let delta = if s.schema == r.report.schemas[0].schema { Some(0.0) } else { delta };
            table.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                csv_field(&r.dataset),
                r.report.n,
                r.report.k,
                s.schema,
                opt(s.mean_accuracy),
                opt(s.std_accuracy),
                opt(delta),
                s.failures,
                opt(s.mean_iterations),
                opt(s.mean_wall_time_secs),
            ));
        }
    }
    let mut pending = Vec::new();
    match &args.output {
        Some(path) => pending.push(PendingFile { path: path.clone(), contents: table.into_bytes() }),
        None => out.write_all(table.as_bytes()).context("stdout")?,
    }
    if let Some(path) = &args.summary {
        pending.push(PendingFile { path: path.clone(), contents: json_bytes(&reports) });
    }
    write_all(pending)
}

#[derive(Debug, Serialize)]
struct ScaleFit {
    schema: WeightingSchema,
    axis: &'static str,
    fit: LinearFit,
}

#[derive(Debug, Serialize)]
struct ScaleSummary {
    dataset: String,
    rows: Vec<TimingRow>,
    fits: Vec<ScaleFit>,
}

const SCALE_HEADER: &str =
    "schema,n,k,mean_iterations,mean_wall_time_secs,mean_preprocessing_secs,mean_time_per_iteration_secs\n";

fn scale(args: &ScaleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (name, ds) = match (&args.data, args.generate.as_deref()) {
        (Some(path), _) => (path.display().to_string(), load(path, &args.format.table_format())?),
        (None, Some("nursery")) => (
            format!("nursery-scale mixture (seed {})", args.generate_seed),
            PlantedMixture::nursery_scale(args.generate_seed)
                .generate()
                .context("--generate")?,
        ),
        (None, Some(other)) => {
            return Err(CliError {
                context: "--generate".into(),
                source: Error::Config(format!("unknown generator {other:?} (expected nursery)")),
            })
        }
        (None, None) => unreachable!("clap requires one data source"),
    };
    let (axis, by_objects) = match (&args.objects, &args.clusters) {
        (Some(counts), _) => (ScaleAxis::Objects { counts: counts.0.clone(), k: args.k }, true),
        (None, Some(counts)) => (ScaleAxis::Clusters { counts: counts.0.clone() }, false),
        (None, None) => unreachable!("clap requires one axis"),
    };
    let spec = ScaleSpec {
        axis,
        schemas: args.schemas.0.clone(),
        seed: args.seed,
        repeats: args.repeats,
        max_iterations: args.max_iterations,
    };
    let rows = bench::scalability_experiment(&ds.data, &spec).context(&name)?;

    let mut table = String::from(SCALE_HEADER);
    for r in &rows {
        table.push_str(&format!(
            "{},{},{},{:.3},{:.6},{:.6},{:.6}\n",
            r.schema,
            r.n,
            r.k,
            r.mean_iterations,
            r.mean_wall_time_secs,
            r.mean_preprocessing_secs,
            r.mean_time_per_iteration_secs(),
        ));
    }
    let fits = spec
        .schemas
        .iter()
        .filter_map(|&schema| {
            bench::fit_rows(&rows, schema, by_objects).ok().map(|fit| ScaleFit {
                schema,
                axis: if by_objects { "objects" } else { "clusters" },
                fit,
            })
        })
        .collect();
    let mut pending = Vec::new();
    match &args.output {
        Some(path) => pending.push(PendingFile { path: path.clone(), contents: table.into_bytes() }),
        None => out.write_all(table.as_bytes()).context("stdout")?,
    }
    if let Some(path) = &args.summary {
        let summary = ScaleSummary { dataset: name, rows, fits };
        pending.push(PendingFile { path: path.clone(), contents: json_bytes(&summary) });
    }
    write_all(pending)
}
