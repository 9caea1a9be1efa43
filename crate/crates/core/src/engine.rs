//! Alternating minimization of the weighted k-modes objective.
//!
//! Each iteration assigns every object to its nearest center under a frozen
//! set of weights, then moves every center component to the value that
//! maximizes `f(a|C_l) ω(a, l)`. Dynamic schemas read their weights from the
//! partition that entered the sweep; the very first sweep of a dynamic schema
//! has no partition yet and uses simple matching.
//!
//! The loop stops when a center update cannot lower the objective for the
//! current partition (decided exactly, per component), when two consecutive
//! sweeps produce the same membership, or after `max_iterations` sweeps.

use std::borrow::Cow;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dataset::{AttributeSchema, EncodedDataset, GlobalFrequencyTable};
use crate::error::{Error, Result};
use crate::weights::{ClusterFrequencySnapshot, StaticWeightTable, WeightContext, WeightingSchema};

/// `k x m` matrix of center value ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Centers {
    k: usize,
    m: usize,
    values: Vec<u32>,
}

impl Centers {
    pub fn new(k: usize, m: usize, values: Vec<u32>) -> Result<Self> {
        if values.len() != k * m {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: k * m,
            });
        }
        Ok(Self { k, m, values })
    }

    /// Centers copied from the given object rows, in order.
    pub fn from_rows(data: &EncodedDataset, rows: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(rows.len() * data.m());
        for &i in rows {
            if i >= data.n() {
                return Err(Error::Index(format!("row {i} of {}", data.n())));
            }
            values.extend_from_slice(data.row(i));
        }
        Self::new(rows.len(), data.m(), values)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn row(&self, cluster: usize) -> &[u32] {
        &self.values[cluster * self.m..(cluster + 1) * self.m]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.values.chunks_exact(self.m)
    }

    fn set_row(&mut self, cluster: usize, row: &[u32]) {
        self.values[cluster * self.m..(cluster + 1) * self.m].copy_from_slice(row);
    }

    /// Raw tokens of every center.
    pub fn decode<'a>(&self, schema: &'a AttributeSchema) -> Vec<Vec<&'a str>> {
        self.rows()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, &v)| schema.dictionary(j).decode(v).unwrap_or_default())
                    .collect()
            })
            .collect()
    }

    fn validate(&self, data: &EncodedDataset) -> Result<()> {
        if self.m != data.m() {
            return Err(Error::LengthMismatch {
                left: self.m,
                right: data.m(),
            });
        }
        for row in self.rows() {
            for (j, &v) in row.iter().enumerate() {
                if v as usize >= data.schema().cardinality(j) {
                    return Err(Error::Index(format!("center value {v} of attribute {j}")));
                }
            }
        }
        Ok(())
    }
}

/// Cluster index of every object.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Membership(Vec<u32>);

impl Membership {
    pub fn new(assignments: Vec<u32>) -> Self {
        Self(assignments)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn cluster_of(&self, object: usize) -> usize {
        self.0[object] as usize
    }

    pub fn cluster_sizes(&self, k: usize) -> Vec<usize> {
        let mut sizes = vec![0; k];
        for &l in &self.0 {
            sizes[l as usize] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub k: usize,
    pub schema: WeightingSchema,
    pub max_iterations: usize,
    pub seed: u64,
    /// Overrides random initialization when set.
    pub initial_centers: Option<Centers>,
}

impl RunConfig {
    pub const DEFAULT_MAX_ITERATIONS: usize = 100;

    pub fn new(k: usize, schema: WeightingSchema) -> Self {
        Self {
            k,
            schema,
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
            seed: 0,
            initial_centers: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_initial_centers(mut self, centers: Centers) -> Self {
        self.initial_centers = Some(centers);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Two consecutive sweeps produced the same membership.
    MembershipFixpoint,
    /// The center update left the objective unchanged for the current partition.
    ObjectiveRepeat,
    MaxIterations,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub membership: Membership,
    pub centers: Centers,
    /// Objective after each assignment sweep, under that sweep's weights.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Number of empty clusters re-seeded during the run.
    pub repairs: usize,
    /// Full run time, preprocessing included.
    pub wall_time: Duration,
    pub preprocessing_time: Duration,
}

impl RunResult {
    pub fn objective(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(0.0)
    }
}

/// Global statistics shared by every run over the same dataset.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub freq: GlobalFrequencyTable,
    pub table: Option<StaticWeightTable>,
    pub elapsed: Duration,
}

impl Preprocessed {
    /// One pass over the data; the Goodall table is built only if a schema needs it.
    pub fn new(
        data: &EncodedDataset,
        schemas: impl IntoIterator<Item = WeightingSchema>,
    ) -> Result<Self> {
        let start = Instant::now();
        let freq = GlobalFrequencyTable::from_dataset(data);
        let table = if schemas.into_iter().any(WeightingSchema::uses_goodall) {
            Some(StaticWeightTable::build(&freq)?)
        } else {
            None
        };
        Ok(Self {
            freq,
            table,
            elapsed: start.elapsed(),
        })
    }

    fn context<'a>(
        &'a self,
        schema: WeightingSchema,
        snapshot: Option<&'a ClusterFrequencySnapshot>,
    ) -> WeightContext<'a> {
        WeightContext::new(schema, &self.freq, self.table.as_ref(), snapshot)
    }
}

/// Sample `k` distinct object indices without replacement.
pub fn sample_center_rows(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 0 || k > n {
        return Err(Error::Config(format!("k = {k} must be in 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(rand::seq::index::sample(&mut rng, n, k).into_vec())
}

/// `k` distinct object rows chosen by a seeded generator.
pub fn init_centers(data: &EncodedDataset, k: usize, seed: u64) -> Result<Centers> {
    Centers::from_rows(data, &sample_center_rows(data.n(), k, seed)?)
}

/// `Σ_j d_w(x_j, z_j)` with `d_w = 1 - ω` on a match and 1 otherwise.
pub fn distance(object: &[u32], center: &[u32], cluster: usize, ctx: &WeightContext<'_>) -> Result<f64> {
    let mut total = 0.0;
    for (j, (&x, &z)) in object.iter().zip(center).enumerate() {
        total += if x == z {
            1.0 - ctx.weight(j, x, cluster)?
        } else {
            1.0
        };
    }
    Ok(total)
}

/// Nearest-center assignment, ties (within [`TIE_TOLERANCE`]) to the lowest
/// cluster index.
pub fn assign_all(data: &EncodedDataset, centers: &Centers, ctx: &WeightContext<'_>) -> Result<Membership> {
    let costs = MatchCosts::new(centers, ctx)?;
    let mut membership = vec![0u32; data.n()];
    let mut dists = vec![0.0; data.n()];
    costs.assign(data, centers, &mut membership, &mut dists);
    Ok(Membership(membership))
}

/// For every `(cluster, attribute)` the value maximizing `f(a|C_l) ω(a, l)`,
/// ties to the lowest value id.
pub fn update_centers(
    snapshot: &ClusterFrequencySnapshot,
    schema: WeightingSchema,
    freq: &GlobalFrequencyTable,
    table: Option<&StaticWeightTable>,
) -> Result<Centers> {
    let ctx = WeightContext::new(schema, freq, table, Some(snapshot));
    let m = snapshot.attribute_count();
    let mut values = Vec::with_capacity(snapshot.k() * m);
    for l in 0..snapshot.k() {
        if snapshot.size(l) == 0 {
            return Err(Error::DegenerateCluster { cluster: l });
        }
        for j in 0..m {
            let p = snapshot.values(l, j).len() as u32;
            let mut best = 0;
            let mut best_score = ctx.center_score(j, 0, l)?;
            for t in 1..p {
                let score = ctx.center_score(j, t, l)?;
                if score > best_score {
                    best = t;
                    best_score = score;
                }
            }
            values.push(best);
        }
    }
    Centers::new(snapshot.k(), m, values)
}

/// `P_w(U, Z)`.
pub fn objective(
    data: &EncodedDataset,
    membership: &Membership,
    centers: &Centers,
    ctx: &WeightContext<'_>,
) -> Result<f64> {
    if membership.len() != data.n() {
        return Err(Error::LengthMismatch {
            left: membership.len(),
            right: data.n(),
        });
    }
    let mut total = 0.0;
    for (i, row) in data.rows().enumerate() {
        let l = membership.cluster_of(i);
        if l >= centers.k() {
            return Err(Error::Index(format!("cluster {l} with k = {}", centers.k())));
        }
        total += distance(row, centers.row(l), l, ctx)?;
    }
    Ok(total)
}

/// Distances closer than this count as tied, so that ties still go to the
/// lowest cluster index when two exactly equal sums round differently.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Cost `1 - ω(z_{l,j}, l)` of matching each center component.
struct MatchCosts {
    m: usize,
    costs: Vec<f64>,
}

impl MatchCosts {
    fn new(centers: &Centers, ctx: &WeightContext<'_>) -> Result<Self> {
        let mut costs = Vec::with_capacity(centers.k() * centers.m());
        for (l, row) in centers.rows().enumerate() {
            for (j, &z) in row.iter().enumerate() {
                costs.push(1.0 - ctx.weight(j, z, l)?);
            }
        }
        Ok(Self {
            m: centers.m(),
            costs,
        })
    }

    fn assign(&self, data: &EncodedDataset, centers: &Centers, membership: &mut [u32], dists: &mut [f64]) {
        for (i, row) in data.rows().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (l, center) in centers.rows().enumerate() {
                let costs = &self.costs[l * self.m..(l + 1) * self.m];
                let mut d = 0.0;
                for ((&x, &z), &c) in row.iter().zip(center).zip(costs) {
                    d += if x == z { c } else { 1.0 };
                    if d >= best_d - TIE_TOLERANCE {
                        break;
                    }
                }
                if d < best_d - TIE_TOLERANCE {
                    best = l;
                    best_d = d;
                }
            }
            membership[i] = best as u32;
            dists[i] = best_d;
        }
    }
}

/// State of one assignment sweep: the weights it uses are fixed before it starts.
struct Sweep<'a> {
    pre: &'a Preprocessed,
    schema: WeightingSchema,
    snapshot: Option<Cow<'a, ClusterFrequencySnapshot>>,
}

impl<'a> Sweep<'a> {
    fn context(&self) -> WeightContext<'_> {
        self.pre.context(self.schema, self.snapshot.as_deref())
    }

    /// Assigns all objects, re-seeding empty clusters with the farthest
    /// admissible object and sweeping again. Returns the number of re-seeds.
    fn run(
        &mut self,
        data: &EncodedDataset,
        centers: &mut Centers,
        membership: &mut [u32],
        dists: &mut [f64],
    ) -> Result<usize> {
        let k = centers.k();
        MatchCosts::new(centers, &self.context())?.assign(data, centers, membership, dists);
        let mut repairs = 0;
        for attempt in 0..=k {
            let mut sizes = vec![0usize; k];
            for &l in membership.iter() {
                sizes[l as usize] += 1;
            }
            let empties: Vec<usize> = (0..k).filter(|&l| sizes[l] == 0).collect();
            let Some(&first) = empties.first() else {
                return Ok(repairs);
            };
            if attempt == k {
                return Err(Error::DegenerateCluster { cluster: first });
            }
            for &l in &empties {
                let seed = farthest_admissible(data, centers, membership, dists, &sizes)
                    .ok_or(Error::DegenerateCluster { cluster: l })?;
                sizes[membership[seed] as usize] -= 1;
                sizes[l] += 1;
                centers.set_row(l, data.row(seed));
                if let Some(snapshot) = self.snapshot.as_mut() {
                    snapshot.to_mut().reset_to_singleton(l, data.row(seed));
                }
                repairs += 1;
            }
            MatchCosts::new(centers, &self.context())?.assign(data, centers, membership, dists);
        }
        unreachable!("repair loop returns on its last attempt")
    }
}

/// Object farthest from its center whose cluster keeps at least one other
/// member and whose row is not already a center. Ties to the lowest index.
fn farthest_admissible(
    data: &EncodedDataset,
    centers: &Centers,
    membership: &[u32],
    dists: &[f64],
    sizes: &[usize],
) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, row) in data.rows().enumerate() {
        if sizes[membership[i] as usize] < 2 {
            continue;
        }
        if best.is_some_and(|b| dists[i] <= dists[b]) {
            continue;
        }
        if centers.rows().any(|c| c == row) {
            continue;
        }
        best = Some(i);
    }
    best
}

/// Preprocess the dataset and run one clustering.
pub fn run(data: &EncodedDataset, config: &RunConfig) -> Result<RunResult> {
    let pre = Preprocessed::new(data, [config.schema])?;
    run_preprocessed(data, &pre, config)
}

/// Run one clustering over shared preprocessing.
pub fn run_preprocessed(data: &EncodedDataset, pre: &Preprocessed, config: &RunConfig) -> Result<RunResult> {
    let start = Instant::now();
    let (k, n, schema) = (config.k, data.n(), config.schema);
    if k == 0 || k > n {
        return Err(Error::Config(format!("k = {k} must be in 1..={n}")));
    }
    if config.max_iterations == 0 {
        return Err(Error::Config("max_iterations must be at least 1".into()));
    }
    if schema.uses_goodall() && pre.table.is_none() {
        return Err(Error::Precondition(format!(
            "schema {schema} needs the Goodall table"
        )));
    }
    let distinct = data.distinct_row_count();
    if k > distinct {
        return Err(Error::Config(format!(
            "k = {k} exceeds the {distinct} distinct rows"
        )));
    }

    let mut centers = match &config.initial_centers {
        Some(c) => {
            if c.k() != k {
                return Err(Error::Config(format!(
                    "{} initial centers given for k = {k}",
                    c.k()
                )));
            }
            c.validate(data)?;
            c.clone()
        }
        None => init_centers(data, k, config.seed)?,
    };

    let mut membership = vec![0u32; n];
    let mut dists = vec![0.0; n];
    let first_schema = if schema.is_dynamic() {
        WeightingSchema::Unit
    } else {
        schema
    };
    let mut repairs = Sweep {
        pre,
        schema: first_schema,
        snapshot: None,
    }
    .run(data, &mut centers, &mut membership, &mut dists)?;
    let mut snapshot = ClusterFrequencySnapshot::from_membership(data, &membership, k)?;
    let mut trace = vec![dists.iter().sum::<f64>()];

    let mut next_membership = vec![0u32; n];
    let stop_reason = loop {
        if trace.len() >= config.max_iterations {
            break StopReason::MaxIterations;
        }
        let mut next_centers = update_centers(&snapshot, schema, &pre.freq, pre.table.as_ref())?;
        if !center_step_improves(&snapshot, &centers, &next_centers, pre.context(schema, Some(&snapshot)))? {
            centers = next_centers;
            break StopReason::ObjectiveRepeat;
        }
        repairs += Sweep {
            pre,
            schema,
            snapshot: schema.is_dynamic().then_some(Cow::Borrowed(&snapshot)),
        }
        .run(data, &mut next_centers, &mut next_membership, &mut dists)?;
        centers = next_centers;
        trace.push(dists.iter().sum::<f64>());

        if next_membership == membership {
            break StopReason::MembershipFixpoint;
        }
        for (i, (&old, &new)) in membership.iter().zip(&next_membership).enumerate() {
            if old != new {
                snapshot.move_object(old as usize, new as usize, data.row(i));
            }
        }
        std::mem::swap(&mut membership, &mut next_membership);
    };

    Ok(RunResult {
        membership: Membership(membership),
        centers,
        iterations: trace.len(),
        objective_trace: trace,
        converged: stop_reason != StopReason::MaxIterations,
        stop_reason,
        repairs,
        wall_time: start.elapsed() + pre.elapsed,
        preprocessing_time: pre.elapsed,
    })
}

/// Objective values that differ only by summation rounding.
/// Whether `P(U, new) < P(U, old)` under the weights of the partition `U`
/// held in `snapshot`. For a fixed partition the objective splits into
/// per-component terms `|C_l| - f ω`, and `new` maximizes each of them, so
/// the step is an improvement exactly when some old component scores lower.
fn center_step_improves(
    snapshot: &ClusterFrequencySnapshot,
    old: &Centers,
    new: &Centers,
    ctx: WeightContext<'_>,
) -> Result<bool> {
    for l in 0..old.k() {
        if snapshot.size(l) == 0 {
            return Err(Error::DegenerateCluster { cluster: l });
        }
        for (j, (&a, &b)) in old.row(l).iter().zip(new.row(l)).enumerate() {
            if a != b && ctx.center_score(j, a, l)? < ctx.center_score(j, b, l)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
