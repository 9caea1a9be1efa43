//! Small text formats read by the command line: membership files, label
//! files, dataset specs and comma-separated lists.

use std::io::BufRead;
use std::path::PathBuf;

use crate::dataset::{ClassLabels, ColumnRef, TableFormat};
use crate::error::{Error, Result};
use crate::weights::WeightingSchema;

/// One cluster index per non-blank line.
pub fn parse_membership<R: BufRead>(reader: R) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        let id = token.parse::<u32>().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("expected a cluster index, found {token:?}"),
        })?;
        out.push(id);
    }
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

/// One class token per non-blank line.
pub fn parse_labels<R: BufRead>(reader: R) -> Result<ClassLabels> {
    let mut tokens = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let token = line.trim();
        if !token.is_empty() {
            tokens.push(token.to_owned());
        }
    }
    if tokens.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(ClassLabels::from_tokens(tokens))
}

/// `kmodes,hsf` or `all`.
pub fn parse_schema_list(s: &str) -> Result<Vec<WeightingSchema>> {
    if s.trim() == "all" {
        return Ok(WeightingSchema::ALL.to_vec());
    }
    let schemas = s
        .split(',')
        .map(str::parse)
        .collect::<Result<Vec<WeightingSchema>>>()?;
    Ok(schemas)
}

/// `2000,4000,6000`; every entry must be positive.
pub fn parse_count_list(s: &str) -> Result<Vec<usize>> {
    let counts = s
        .split(',')
        .map(|t| {
            let t = t.trim();
            match t.parse::<usize>() {
                Ok(0) | Err(_) => Err(Error::Config(format!("invalid count {t:?}"))),
                Ok(v) => Ok(v),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(counts)
}

/// A dataset path with optional per-file format overrides:
/// `PATH#class=last,skip=0,delimiter=;,missing=?,missing-policy=drop`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataSpec {
    pub path: PathBuf,
    pub format: TableFormat,
}

impl DataSpec {
    /// Name used in report rows: the file stem.
    pub fn name(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.path.display().to_string())
    }
}

pub fn parse_data_spec(s: &str, defaults: &TableFormat) -> Result<DataSpec> {
    let (path, options) = match s.split_once('#') {
        Some((p, o)) => (p, Some(o)),
        None => (s, None),
    };
    if path.is_empty() {
        return Err(Error::Config("empty dataset path".into()));
    }
    let mut format = defaults.clone();
    let mut skip_reset = false;
    for option in options.into_iter().flat_map(|o| o.split(',')) {
        if option.is_empty() {
            continue;
        }
        let (key, value) = option
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("dataset option {option:?} is not key=value")))?;
        match key {
            "class" => format.class_column = parse_class_column(value)?,
            "skip" => {
                if !skip_reset {
                    format.skip_columns.clear();
                    skip_reset = true;
                }
                format.skip_columns.push(value.parse()?);
            }
            "delimiter" => format.delimiter = parse_delimiter(value)?,
            "missing" => format.missing_marker = value.to_owned(),
            "missing-policy" => format.missing = value.parse()?,
            other => return Err(Error::Config(format!("unknown dataset option {other:?}"))),
        }
    }
    Ok(DataSpec {
        path: PathBuf::from(path),
        format,
    })
}

/// `none`, `last` or a zero-based index.
pub fn parse_class_column(s: &str) -> Result<Option<ColumnRef>> {
    if s.trim().eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}

/// A single character, or `tab` / `\t`.
pub fn parse_delimiter(s: &str) -> Result<char> {
    if s == "tab" || s == "\\t" {
        return Ok('\t');
    }
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c != '\n' && c != '\r' => Ok(c),
        _ => Err(Error::Config(format!("delimiter must be one character, got {s:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::MissingValues;

    #[test]
    fn membership_lines() {
        assert_eq!(parse_membership("0\n1\n\n 2 \n".as_bytes()).unwrap(), vec![0, 1, 2]);
        match parse_membership("0\nx\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_membership("\n".as_bytes()), Err(Error::EmptyInput)));
        assert!(parse_membership("-1\n".as_bytes()).is_err());
    }

    #[test]
    fn label_lines() {
        let labels = parse_labels("b\na\nb\n".as_bytes()).unwrap();
        assert_eq!(labels.ids(), &[0, 1, 0]);
        assert_eq!(labels.name(1), Some("a"));
    }

    #[test]
    fn schema_lists() {
        assert_eq!(parse_schema_list("all").unwrap().len(), 5);
        assert_eq!(
            parse_schema_list("kmodes, hsf").unwrap(),
            vec![WeightingSchema::Unit, WeightingSchema::HybridInverseFrequency]
        );
        assert!(parse_schema_list("kmodes,zz").is_err());
    }

    #[test]
    fn count_lists() {
        assert_eq!(parse_count_list("2, 4,6").unwrap(), vec![2, 4, 6]);
        assert!(parse_count_list("2,0").is_err());
        assert!(parse_count_list("").is_err());
    }

    #[test]
    fn data_specs() {
        let defaults = TableFormat::default().with_class_column(ColumnRef::Index(0));
        let plain = parse_data_spec("votes.data", &defaults).unwrap();
        assert_eq!(plain.format, defaults);
        assert_eq!(plain.name(), "votes");

        let spec = parse_data_spec("b.data#class=last,skip=0,missing-policy=drop", &defaults).unwrap();
        assert_eq!(spec.path, PathBuf::from("b.data"));
        assert_eq!(spec.format.class_column, Some(ColumnRef::Last));
        assert_eq!(spec.format.skip_columns, vec![ColumnRef::Index(0)]);
        assert_eq!(spec.format.missing, MissingValues::DropRows);

        let tabbed = parse_data_spec("t.tsv#delimiter=tab,class=none", &defaults).unwrap();
        assert_eq!(tabbed.format.delimiter, '\t');
        assert_eq!(tabbed.format.class_column, None);

        assert!(parse_data_spec("#class=0", &defaults).is_err());
        assert!(parse_data_spec("x#bogus=1", &defaults).is_err());
        assert!(parse_data_spec("x#class", &defaults).is_err());
    }

    #[test]
    fn delimiters() {
        assert_eq!(parse_delimiter(";").unwrap(), ';');
        assert_eq!(parse_delimiter("\\t").unwrap(), '\t');
        assert!(parse_delimiter("ab").is_err());
        assert!(parse_delimiter("").is_err());
    }
}
