//! Attribute value weights `ω(a, l)` for the five matching schemas.
//!
//! A match between an object value and a center value costs `1 - ω`; a
//! mismatch always costs 1. `Unit` recovers plain simple matching.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{EncodedDataset, GlobalFrequencyTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightingSchema {
    /// `ω = 1`: standard k-modes.
    Unit,
    /// `ω = f(a|C)/|C|` (df-k-modes).
    RelativeFrequency,
    /// Goodall weight from global frequencies, fixed for the whole run (sf-k-modes).
    Goodall,
    /// Relative frequency times Goodall weight (hcf-k-modes).
    HybridGoodall,
    /// `ω = f(a|C) / (|C| f(a|D))` (hsf-k-modes).
    HybridInverseFrequency,
}

impl WeightingSchema {
    pub const ALL: [WeightingSchema; 5] = [
        WeightingSchema::Unit,
        WeightingSchema::RelativeFrequency,
        WeightingSchema::Goodall,
        WeightingSchema::HybridGoodall,
        WeightingSchema::HybridInverseFrequency,
    ];

    /// Short command-line name.
    pub fn name(self) -> &'static str {
        match self {
            WeightingSchema::Unit => "kmodes",
            WeightingSchema::RelativeFrequency => "df",
            WeightingSchema::Goodall => "sf",
            WeightingSchema::HybridGoodall => "hcf",
            WeightingSchema::HybridInverseFrequency => "hsf",
        }
    }

    /// Dynamic schemas depend on the current partition.
    pub fn is_dynamic(self) -> bool {
        matches!(
            self,
            WeightingSchema::RelativeFrequency
                | WeightingSchema::HybridGoodall
                | WeightingSchema::HybridInverseFrequency
        )
    }

    pub fn uses_goodall(self) -> bool {
        matches!(self, WeightingSchema::Goodall | WeightingSchema::HybridGoodall)
    }
}

impl fmt::Display for WeightingSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightingSchema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        WeightingSchema::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown schema {s:?} (expected kmodes, df, sf, hcf or hsf)"
                ))
            })
    }
}

/// Precomputed Goodall weights.
///
/// For value `r` of attribute `j` the weight is `1 - mass(r) / (n(n-1))`
/// where `mass(r)` sums `f(f-1)` over every value of `j` at most as frequent
/// as `r`. The integer mass is kept so that center selection can compare
/// scores exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticWeightTable {
    weights: Vec<Vec<f64>>,
    mass: Vec<Vec<u64>>,
    denominator: u64,
}

impl StaticWeightTable {
    pub fn build(freq: &GlobalFrequencyTable) -> Result<Self> {
        let n = freq.n() as u64;
        if n < 2 {
            return Err(Error::Precondition(format!(
                "Goodall weights need at least 2 objects, got {n}"
            )));
        }
        let denominator = n * (n - 1);
        let mut weights = Vec::with_capacity(freq.attribute_count());
        let mut mass = Vec::with_capacity(freq.attribute_count());
        for j in 0..freq.attribute_count() {
            let counts = freq.attribute(j);
            let mut order: Vec<usize> = (0..counts.len()).collect();
            order.sort_by_key(|&t| counts[t]);

            let mut attr_mass = vec![0u64; counts.len()];
            let mut cumulative = 0u64;
            let mut start = 0;
            while start < order.len() {
                let f = counts[order[start]];
                let mut end = start;
                while end < order.len() && counts[order[end]] == f {
                    cumulative += f as u64 * (f as u64 - 1);
                    end += 1;
                }
                for &t in &order[start..end] {
                    attr_mass[t] = cumulative;
                }
                start = end;
            }
            weights.push(
                attr_mass
                    .iter()
                    .map(|&s| 1.0 - s as f64 / denominator as f64)
                    .collect(),
            );
            mass.push(attr_mass);
        }
        Ok(Self {
            weights,
            mass,
            denominator,
        })
    }

    pub fn weight(&self, attribute: usize, value: u32) -> f64 {
        self.weights[attribute][value as usize]
    }

    /// `Σ f(f-1)` over the value's more-similar set.
    pub fn mass(&self, attribute: usize, value: u32) -> u64 {
        self.mass[attribute][value as usize]
    }

    /// `n(n-1)`.
    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn attribute(&self, attribute: usize) -> &[f64] {
        &self.weights[attribute]
    }
}

/// Free-function form of [`StaticWeightTable::build`].
pub fn build_static_weights(freq: &GlobalFrequencyTable) -> Result<StaticWeightTable> {
    StaticWeightTable::build(freq)
}

/// Per-cluster value counts `f(a|C_l)` and sizes `|C_l|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterFrequencySnapshot {
    k: usize,
    offsets: Vec<usize>,
    width: usize,
    counts: Vec<u32>,
    sizes: Vec<u32>,
}

impl ClusterFrequencySnapshot {
    pub fn empty(k: usize, cardinalities: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(cardinalities.len());
        let mut width = 0;
        for &p in cardinalities {
            offsets.push(width);
            width += p;
        }
        Self {
            k,
            offsets,
            width,
            counts: vec![0; k * width],
            sizes: vec![0; k],
        }
    }

    pub fn from_membership(data: &EncodedDataset, membership: &[u32], k: usize) -> Result<Self> {
        if membership.len() != data.n() {
            return Err(Error::LengthMismatch {
                left: membership.len(),
                right: data.n(),
            });
        }
        let mut snapshot = Self::empty(k, &data.schema().cardinalities());
        for (row, &l) in data.rows().zip(membership) {
            if l as usize >= k {
                return Err(Error::Index(format!("cluster {l} with k = {k}")));
            }
            snapshot.add(l as usize, row);
        }
        Ok(snapshot)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn attribute_count(&self) -> usize {
        self.offsets.len()
    }

    pub fn size(&self, cluster: usize) -> u32 {
        self.sizes[cluster]
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn count(&self, cluster: usize, attribute: usize, value: u32) -> u32 {
        self.counts[cluster * self.width + self.offsets[attribute] + value as usize]
    }

    /// Counts of every value of `attribute` inside `cluster`.
    pub fn values(&self, cluster: usize, attribute: usize) -> &[u32] {
        let start = cluster * self.width + self.offsets[attribute];
        let end = if attribute + 1 < self.offsets.len() {
            cluster * self.width + self.offsets[attribute + 1]
        } else {
            (cluster + 1) * self.width
        };
        &self.counts[start..end]
    }

    pub fn add(&mut self, cluster: usize, row: &[u32]) {
        let base = cluster * self.width;
        for (off, &v) in self.offsets.iter().zip(row) {
            self.counts[base + off + v as usize] += 1;
        }
        self.sizes[cluster] += 1;
    }

    pub fn remove(&mut self, cluster: usize, row: &[u32]) {
        let base = cluster * self.width;
        for (off, &v) in self.offsets.iter().zip(row) {
            self.counts[base + off + v as usize] -= 1;
        }
        self.sizes[cluster] -= 1;
    }

    pub fn move_object(&mut self, from: usize, to: usize, row: &[u32]) {
        self.remove(from, row);
        self.add(to, row);
    }

    /// Replaces the contents of `cluster` with a single object.
    pub fn reset_to_singleton(&mut self, cluster: usize, row: &[u32]) {
        let base = cluster * self.width;
        self.counts[base..base + self.width].fill(0);
        self.sizes[cluster] = 0;
        self.add(cluster, row);
    }
}

/// Exact, cluster-and-attribute-local center selection score.
///
/// Within one `(cluster, attribute)` pair the score orders values exactly as
/// `f(a|C) ω(a, l)` does; factors shared by every candidate are dropped so the
/// comparison can be done in integers.
#[derive(Debug, Clone, Copy)]
pub struct CenterScore {
    num: u128,
    den: u128,
}

impl CenterScore {
    fn new(num: u128, den: u128) -> Self {
        Self { num, den }
    }
}

impl PartialEq for CenterScore {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for CenterScore {}

impl PartialOrd for CenterScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CenterScore {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// What a schema needs to evaluate `ω`: global counts, the Goodall table and
/// the partition snapshot, each only when the schema reads it.
#[derive(Debug, Clone, Copy)]
pub struct WeightContext<'a> {
    pub schema: WeightingSchema,
    pub freq: &'a GlobalFrequencyTable,
    pub table: Option<&'a StaticWeightTable>,
    pub snapshot: Option<&'a ClusterFrequencySnapshot>,
}

impl<'a> WeightContext<'a> {
    pub fn new(
        schema: WeightingSchema,
        freq: &'a GlobalFrequencyTable,
        table: Option<&'a StaticWeightTable>,
        snapshot: Option<&'a ClusterFrequencySnapshot>,
    ) -> Self {
        Self {
            schema,
            freq,
            table,
            snapshot,
        }
    }

    fn table(&self) -> Result<&'a StaticWeightTable> {
        self.table.ok_or_else(|| {
            Error::Precondition(format!("schema {} needs the Goodall table", self.schema))
        })
    }

    fn cluster(&self, cluster: usize) -> Result<(&'a ClusterFrequencySnapshot, u32)> {
        let snapshot = self.snapshot.ok_or_else(|| {
            Error::Precondition(format!("schema {} needs a partition snapshot", self.schema))
        })?;
        if cluster >= snapshot.k() {
            return Err(Error::Index(format!("cluster {cluster} with k = {}", snapshot.k())));
        }
        match snapshot.size(cluster) {
            0 => Err(Error::DegenerateCluster { cluster }),
            size => Ok((snapshot, size)),
        }
    }

    fn check_value(&self, attribute: usize, value: u32) -> Result<()> {
        if attribute >= self.freq.attribute_count()
            || value as usize >= self.freq.attribute(attribute).len()
        {
            return Err(Error::Index(format!(
                "value {value} of attribute {attribute}"
            )));
        }
        Ok(())
    }

    /// `ω(a_j^(t), l)`.
    pub fn weight(&self, attribute: usize, value: u32, cluster: usize) -> Result<f64> {
        self.check_value(attribute, value)?;
        Ok(match self.schema {
            WeightingSchema::Unit => 1.0,
            WeightingSchema::Goodall => self.table()?.weight(attribute, value),
            WeightingSchema::RelativeFrequency => {
                let (s, size) = self.cluster(cluster)?;
                s.count(cluster, attribute, value) as f64 / size as f64
            }
            WeightingSchema::HybridGoodall => {
                let (s, size) = self.cluster(cluster)?;
                let relative = s.count(cluster, attribute, value) as f64 / size as f64;
                relative * self.table()?.weight(attribute, value)
            }
            WeightingSchema::HybridInverseFrequency => {
                let (s, size) = self.cluster(cluster)?;
                let global = self.freq.count(attribute, value) as f64;
                s.count(cluster, attribute, value) as f64 / (size as f64 * global)
            }
        })
    }

    /// Center selection criterion `f(a|C_l)/|C_l| · ω(a, l)`.
    pub fn criterion(&self, attribute: usize, value: u32, cluster: usize) -> Result<f64> {
        let (s, size) = self.cluster(cluster)?;
        let relative = s.count(cluster, attribute, value) as f64 / size as f64;
        Ok(relative * self.weight(attribute, value, cluster)?)
    }

    /// Exact score with the ordering of [`Self::criterion`] among the values
    /// of one attribute in one cluster.
    pub fn center_score(&self, attribute: usize, value: u32, cluster: usize) -> Result<CenterScore> {
        self.check_value(attribute, value)?;
        let (s, _) = self.cluster(cluster)?;
        let f = s.count(cluster, attribute, value) as u128;
        Ok(match self.schema {
            WeightingSchema::Unit | WeightingSchema::RelativeFrequency => CenterScore::new(f, 1),
            WeightingSchema::Goodall => {
                let t = self.table()?;
                let keep = (t.denominator() - t.mass(attribute, value)) as u128;
                CenterScore::new(f * keep, 1)
            }
            WeightingSchema::HybridGoodall => {
                let t = self.table()?;
                let keep = (t.denominator() - t.mass(attribute, value)) as u128;
                CenterScore::new(f * f * keep, 1)
            }
            WeightingSchema::HybridInverseFrequency => {
                let global = self.freq.count(attribute, value) as u128;
                CenterScore::new(f * f, global)
            }
        })
    }
}
