//! Delimited categorical tables, integer encoding, and global value statistics.
//!
//! Every attribute gets its own dictionary. Value ids are handed out in
//! first-occurrence order over the rows, so encoding a given file is
//! deterministic and the ids of an attribute are always `0..p` with no gaps.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Bijection between the raw tokens of one attribute and dense value ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValueDictionary {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

impl ValueDictionary {
    fn intern(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(token.to_owned());
        self.ids.insert(token.to_owned(), id);
        id
    }

    pub fn encode(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn decode(&self, id: u32) -> Option<&str> {
        self.names.get(id as usize).map(String::as_str)
    }

    /// Number of distinct values `p` seen for this attribute.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn truncated(&self, len: usize) -> Self {
        let names = self.names[..len].to_vec();
        let ids = names
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), i as u32))
            .collect();
        Self { names, ids }
    }
}

/// Per-attribute value dictionaries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttributeSchema {
    attributes: Vec<ValueDictionary>,
}

impl AttributeSchema {
    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn cardinality(&self, attribute: usize) -> usize {
        self.attributes[attribute].len()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.attributes.iter().map(ValueDictionary::len).collect()
    }

    pub fn dictionary(&self, attribute: usize) -> &ValueDictionary {
        &self.attributes[attribute]
    }
}

/// An `n x m` matrix of value ids together with the dictionaries that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedDataset {
    cells: Vec<u32>,
    n: usize,
    m: usize,
    schema: AttributeSchema,
}

impl EncodedDataset {
    /// Encodes string rows. All rows must have the same, non-zero width.
    pub fn from_tokens<I, R, S>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut builder: Option<Builder> = None;
        for (row_index, row) in rows.into_iter().enumerate() {
            let tokens: Vec<S> = row.into_iter().collect();
            let b = builder.get_or_insert_with(|| Builder::new(tokens.len()));
            if tokens.len() != b.m {
                return Err(Error::Ragged {
                    row: row_index,
                    line: row_index + 1,
                    expected: b.m,
                    found: tokens.len(),
                });
            }
            b.push(tokens.iter().map(AsRef::as_ref));
        }
        builder.ok_or(Error::EmptyInput)?.finish()
    }

    /// Builds a dataset from arbitrary integer codes, re-encoding them densely.
    /// The dictionaries hold the decimal form of the original codes.
    pub fn from_codes(rows: &[Vec<u32>]) -> Result<Self> {
        Self::from_tokens(
            rows.iter()
                .map(|row| row.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.cells[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.cells.chunks_exact(self.m)
    }

    pub fn cell(&self, i: usize, j: usize) -> u32 {
        self.cells[i * self.m + j]
    }

    /// Raw tokens of row `i`.
    pub fn decode_row(&self, i: usize) -> Vec<&str> {
        self.row(i)
            .iter()
            .enumerate()
            .map(|(j, &v)| self.schema.attributes[j].decode(v).unwrap_or_default())
            .collect()
    }

    pub fn distinct_row_count(&self) -> usize {
        let mut seen: std::collections::HashSet<&[u32]> = std::collections::HashSet::new();
        self.rows().filter(|r| seen.insert(r)).count()
    }

    /// The first `len` rows. Because ids follow first occurrence, the ids in a
    /// prefix agree with those of the full dataset and remain gap-free.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.n {
            return Err(Error::Config(format!(
                "prefix length {len} outside 1..={}",
                self.n
            )));
        }
        let cells = self.cells[..len * self.m].to_vec();
        let mut used = vec![0usize; self.m];
        for row in cells.chunks_exact(self.m) {
            for (j, &v) in row.iter().enumerate() {
                used[j] = used[j].max(v as usize + 1);
            }
        }
        let attributes = self
            .schema
            .attributes
            .iter()
            .zip(&used)
            .map(|(d, &p)| d.truncated(p))
            .collect();
        Ok(Self {
            cells,
            n: len,
            m: self.m,
            schema: AttributeSchema { attributes },
        })
    }
}

struct Builder {
    m: usize,
    cells: Vec<u32>,
    attributes: Vec<ValueDictionary>,
}

impl Builder {
    fn new(m: usize) -> Self {
        Self {
            m,
            cells: Vec::new(),
            attributes: vec![ValueDictionary::default(); m],
        }
    }

    fn push<'a>(&mut self, tokens: impl Iterator<Item = &'a str>) {
        for (dict, token) in self.attributes.iter_mut().zip(tokens) {
            self.cells.push(dict.intern(token));
        }
    }

    fn finish(self) -> Result<EncodedDataset> {
        if self.m == 0 {
            return Err(Error::Config("rows have no attribute columns".into()));
        }
        if self.cells.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(EncodedDataset {
            n: self.cells.len() / self.m,
            m: self.m,
            cells: self.cells,
            schema: AttributeSchema {
                attributes: self.attributes,
            },
        })
    }
}

/// Ground-truth class ids, dense in `0..class_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassLabels {
    ids: Vec<u32>,
    names: ValueDictionary,
}

impl ClassLabels {
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut names = ValueDictionary::default();
        let ids = tokens
            .into_iter()
            .map(|t| names.intern(t.as_ref()))
            .collect();
        Self { ids, names }
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.names.decode(id)
    }

    /// Number of objects per class id.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count()];
        for &c in &self.ids {
            sizes[c as usize] += 1;
        }
        sizes
    }

    fn truncated(&self, len: usize) -> Self {
        let ids = self.ids[..len].to_vec();
        let used = ids.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        Self {
            ids,
            names: self.names.truncated(used),
        }
    }
}

/// Feature matrix plus optional class labels kept apart from the features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    pub data: EncodedDataset,
    pub labels: Option<ClassLabels>,
}

impl LabeledDataset {
    pub fn class_count(&self) -> Option<usize> {
        self.labels.as_ref().map(ClassLabels::class_count)
    }

    pub fn prefix(&self, len: usize) -> Result<Self> {
        Ok(Self {
            data: self.data.prefix(len)?,
            labels: self.labels.as_ref().map(|l| l.truncated(len)),
        })
    }
}

/// A column of the raw file, zero-based, or the last one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnRef {
    Index(usize),
    Last,
}

impl ColumnRef {
    fn resolve(self, width: usize) -> Option<usize> {
        match self {
            ColumnRef::Index(i) if i < width => Some(i),
            ColumnRef::Index(_) => None,
            ColumnRef::Last => width.checked_sub(1),
        }
    }
}

impl FromStr for ColumnRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("last") {
            return Ok(ColumnRef::Last);
        }
        s.parse::<usize>()
            .map(ColumnRef::Index)
            .map_err(|_| Error::Config(format!("invalid column reference {s:?}")))
    }
}

/// How the missing-value marker is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingValues {
    /// The marker is an ordinary category value.
    #[default]
    AsCategory,
    /// Rows containing the marker in a feature column are discarded.
    DropRows,
}

impl FromStr for MissingValues {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "category" => Ok(MissingValues::AsCategory),
            "drop" => Ok(MissingValues::DropRows),
            other => Err(Error::Config(format!(
                "unknown missing-value policy {other:?} (expected category or drop)"
            ))),
        }
    }
}

/// Layout of a delimited categorical file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableFormat {
    pub delimiter: char,
    pub class_column: Option<ColumnRef>,
    /// Raw columns ignored entirely, such as record identifiers.
    pub skip_columns: Vec<ColumnRef>,
    pub missing_marker: String,
    pub missing: MissingValues,
}

impl Default for TableFormat {
    fn default() -> Self {
        Self {
            delimiter: ',',
            class_column: None,
            skip_columns: Vec::new(),
            missing_marker: "?".to_owned(),
            missing: MissingValues::AsCategory,
        }
    }
}

impl TableFormat {
    pub fn with_class_column(mut self, column: ColumnRef) -> Self {
        self.class_column = Some(column);
        self
    }

    pub fn with_skip_columns(mut self, columns: impl IntoIterator<Item = ColumnRef>) -> Self {
        self.skip_columns.extend(columns);
        self
    }

    pub fn with_missing(mut self, marker: impl Into<String>, policy: MissingValues) -> Self {
        self.missing_marker = marker.into();
        self.missing = policy;
        self
    }
}

enum ColumnRole {
    Feature,
    Class,
    Skip,
}

/// Reads one object per non-blank line. Tokens are trimmed; no quoting.
pub fn load_table<R: BufRead>(reader: R, format: &TableFormat) -> Result<LabeledDataset> {
    let mut roles: Option<Vec<ColumnRole>> = None;
    let mut width = 0;
    let mut builder: Option<Builder> = None;
    let mut class_tokens: Vec<String> = Vec::new();
    let mut row = 0usize;

    for (line_index, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split(format.delimiter).map(str::trim).collect();

        let roles = match &roles {
            Some(r) => r,
            None => {
                width = tokens.len();
                roles.insert(column_roles(format, width)?)
            }
        };
        if tokens.len() != width {
            return Err(Error::Ragged {
                row,
                line: line_index + 1,
                expected: width,
                found: tokens.len(),
            });
        }
        row += 1;

        let features = || {
            tokens
                .iter()
                .zip(roles.iter())
                .filter(|(_, r)| matches!(r, ColumnRole::Feature))
                .map(|(t, _)| *t)
        };
        if format.missing == MissingValues::DropRows
            && features().any(|t| t == format.missing_marker)
        {
            continue;
        }
        let feature_count = roles
            .iter()
            .filter(|r| matches!(r, ColumnRole::Feature))
            .count();
        builder
            .get_or_insert_with(|| Builder::new(feature_count))
            .push(features());
        if let Some(pos) = roles.iter().position(|r| matches!(r, ColumnRole::Class)) {
            class_tokens.push(tokens[pos].to_owned());
        }
    }

    let data = builder.ok_or(Error::EmptyInput)?.finish()?;
    let labels = format
        .class_column
        .map(|_| ClassLabels::from_tokens(class_tokens));
    Ok(LabeledDataset { data, labels })
}

/// [`load_table`] over a file path.
pub fn load_path(path: impl AsRef<Path>, format: &TableFormat) -> Result<LabeledDataset> {
    let file = File::open(path)?;
    load_table(BufReader::new(file), format)
}

fn column_roles(format: &TableFormat, width: usize) -> Result<Vec<ColumnRole>> {
    let mut roles: Vec<ColumnRole> = (0..width).map(|_| ColumnRole::Feature).collect();
    for &skip in &format.skip_columns {
        let j = skip.resolve(width).ok_or_else(|| {
            Error::Config(format!("skip column {skip:?} outside {width} columns"))
        })?;
        roles[j] = ColumnRole::Skip;
    }
    if let Some(class) = format.class_column {
        let j = class.resolve(width).ok_or_else(|| {
            Error::Config(format!("class column {class:?} outside {width} columns"))
        })?;
        if matches!(roles[j], ColumnRole::Skip) {
            return Err(Error::Config(format!(
                "class column {j} is also listed as skipped"
            )));
        }
        roles[j] = ColumnRole::Class;
    }
    Ok(roles)
}

/// `f(a | D)`: occurrence counts of every value of every attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalFrequencyTable {
    counts: Vec<Vec<u32>>,
    n: usize,
}

impl GlobalFrequencyTable {
    pub fn from_dataset(data: &EncodedDataset) -> Self {
        let mut counts: Vec<Vec<u32>> = data
            .schema()
            .cardinalities()
            .into_iter()
            .map(|p| vec![0; p])
            .collect();
        for row in data.rows() {
            for (col, &v) in counts.iter_mut().zip(row) {
                col[v as usize] += 1;
            }
        }
        Self { counts, n: data.n() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn attribute_count(&self) -> usize {
        self.counts.len()
    }

    pub fn attribute(&self, attribute: usize) -> &[u32] {
        &self.counts[attribute]
    }

    pub fn count(&self, attribute: usize, value: u32) -> u32 {
        self.counts[attribute][value as usize]
    }

    /// Values of `attribute` whose global frequency does not exceed that of `value`.
    pub fn msavs(&self, attribute: usize, value: u32) -> Result<Vec<u32>> {
        let counts = self.counts.get(attribute).ok_or_else(|| {
            Error::Index(format!(
                "attribute {attribute} of {}",
                self.counts.len()
            ))
        })?;
        let &own = counts.get(value as usize).ok_or_else(|| {
            Error::Index(format!(
                "value {value} of attribute {attribute} with {} values",
                counts.len()
            ))
        })?;
        Ok((0..counts.len() as u32)
            .filter(|&t| counts[t as usize] <= own)
            .collect())
    }
}

/// Single pass over the data counting every `(attribute, value)` pair.
pub fn global_frequencies(data: &EncodedDataset) -> GlobalFrequencyTable {
    GlobalFrequencyTable::from_dataset(data)
}
