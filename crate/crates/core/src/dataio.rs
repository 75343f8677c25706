//! CSV ingestion with categorical expansion, and the plain-text
//! `key = value` format used for schema and experiment files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
/// Keys are returned as written, in file order, with their line numbers.
pub fn parse_kv(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::ConfigSyntax {
                line,
                reason: format!("expected `key = value`, got `{content}`"),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::ConfigSyntax {
                line,
                reason: "missing key".into(),
            });
        }
        out.push((line, key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

fn list(value: &str) -> impl Iterator<Item = String> + '_ {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

/// How to turn a CSV table into a data set. Columns not mentioned are numeric
/// features.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularSchema {
    pub target: String,
    pub categorical: BTreeSet<String>,
    pub drop: BTreeSet<String>,
    /// The loaded response is `target_scale * y + target_offset`.
    pub target_scale: f64,
    pub target_offset: f64,
}

impl TabularSchema {
    pub fn new(target: impl Into<String>) -> Self {
        Self {
            target: target.into(),
            categorical: BTreeSet::new(),
            drop: BTreeSet::new(),
            target_scale: 1.0,
            target_offset: 0.0,
        }
    }

    pub fn with_categorical(mut self, column: impl Into<String>) -> Self {
        self.categorical.insert(column.into());
        self
    }

    pub fn kind(&self, column: &str) -> ColumnKind {
        if self.categorical.contains(column) {
            ColumnKind::Categorical
        } else {
            ColumnKind::Numeric
        }
    }

    /// Keys: `target`, `categorical` and `drop` (comma-separated lists),
    /// `target_scale`, `target_offset`.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut schema = TabularSchema::new("");
        for (line, key, value) in parse_kv(text)? {
            let number = |v: &str| {
                v.parse::<f64>().ok().filter(|f| f.is_finite()).ok_or_else(|| Error::ConfigSyntax {
                    line,
                    reason: format!("`{key}` needs a finite number, got `{v}`"),
                })
            };
            match crate::config::normalize_key(&key).as_str() {
                "target" => schema.target = value,
                "categorical" => schema.categorical.extend(list(&value)),
                "drop" => schema.drop.extend(list(&value)),
                "target_scale" => schema.target_scale = number(&value)?,
                "target_offset" => schema.target_offset = number(&value)?,
                _ => {
                    return Err(Error::ConfigSyntax {
                        line,
                        reason: format!("unknown schema key `{key}`"),
                    })
                }
            }
        }
        if schema.target.is_empty() {
            return Err(Error::config("target", "schema must name the target column"));
        }
        Ok(schema)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_config_str(&std::fs::read_to_string(path)?)
    }

    /// Target = last column; any column with a non-numeric cell is categorical.
    pub fn infer(path: impl AsRef<Path>) -> Result<Self> {
        let table = read_table(path.as_ref())?;
        let target = table.header.last().cloned().ok_or_else(|| Error::EmptyFile {
            path: path.as_ref().to_path_buf(),
        })?;
        let mut schema = TabularSchema::new(target);
        for (j, name) in table.header.iter().enumerate() {
            if table.rows.iter().any(|r| r[j].parse::<f64>().is_err()) {
                schema.categorical.insert(name.clone());
            }
        }
        schema.categorical.remove(&schema.target);
        Ok(schema)
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        rows.push(rec?.iter().map(String::from).collect());
    }
    if header.iter().all(|h| h.is_empty()) || rows.is_empty() {
        return Err(Error::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    Ok(Table { header, rows })
}

fn parse_cell(value: &str, row: usize, column: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::MalformedCell {
            row,
            column: column.to_string(),
            value: value.to_string(),
        })
}

/// Indicator column name for `level` of categorical column `column`.
pub fn indicator_name(column: &str, level: &str) -> String {
    format!("{column}_{level}")
}

/// Reads `path` with `schema`. Data rows are numbered from 1 in errors.
/// Categorical columns become one 0/1 indicator per level, levels sorted, the
/// first level dropped.
pub fn load_csv(path: impl AsRef<Path>, schema: &TabularSchema) -> Result<Dataset> {
    load_inner(path.as_ref(), schema, true)
}

/// Like [`load_csv`] but the target column may be absent (its response is
/// then all zeros). Used for prediction inputs.
pub fn load_features_csv(path: impl AsRef<Path>, schema: &TabularSchema) -> Result<Dataset> {
    load_inner(path.as_ref(), schema, false)
}

fn load_inner(path: &Path, schema: &TabularSchema, require_target: bool) -> Result<Dataset> {
    let table = read_table(path)?;
    let position = |name: &str| table.header.iter().position(|h| h == name);
    for name in schema.categorical.iter().chain(&schema.drop) {
        if position(name).is_none() {
            return Err(Error::MissingColumn(name.clone()));
        }
    }
    let target = position(&schema.target);
    if require_target && target.is_none() {
        return Err(Error::MissingColumn(schema.target.clone()));
    }

    let n = table.rows.len();
    let response = match target {
        Some(t) => table
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r[t].parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .map(|v| schema.target_scale * v + schema.target_offset)
                    .ok_or_else(|| Error::NonNumericTarget {
                        column: schema.target.clone(),
                        row: i + 1,
                        value: r[t].clone(),
                    })
            })
            .collect::<Result<Vec<_>>>()?,
        None => vec![0.0; n],
    };

    let mut columns = Vec::new();
    let mut names = Vec::new();
    for (j, name) in table.header.iter().enumerate() {
        if Some(j) == target || schema.drop.contains(name) {
            continue;
        }
        match schema.kind(name) {
            ColumnKind::Numeric => {
                let col = table
                    .rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| parse_cell(&r[j], i + 1, name))
                    .collect::<Result<Vec<_>>>()?;
                columns.push(col);
                names.push(name.clone());
            }
            ColumnKind::Categorical => {
                let levels: BTreeSet<&str> = table.rows.iter().map(|r| r[j].as_str()).collect();
                for level in levels.into_iter().skip(1) {
                    columns.push(table.rows.iter().map(|r| f64::from(u8::from(r[j] == level))).collect());
                    names.push(indicator_name(name, level));
                }
            }
        }
    }
    if columns.is_empty() {
        return Err(Error::InvalidDataset("no feature columns".into()));
    }
    Dataset::from_columns(columns, response)?.with_feature_names(names)
}

/// Reorders `data`'s columns to `names`. Indicator columns of a categorical
/// that are absent (the level does not occur in `data`) are filled with
/// zeros; any other mismatch is an error.
pub fn align_features(data: &Dataset, names: &[String], schema: &TabularSchema) -> Result<Dataset> {
    let index: BTreeMap<&str, usize> = data
        .feature_names()
        .iter()
        .enumerate()
        .map(|(j, n)| (n.as_str(), j))
        .collect();
    let is_indicator = |name: &str| {
        schema
            .categorical
            .iter()
            .any(|c| name.strip_prefix(c.as_str()).is_some_and(|rest| rest.starts_with('_')))
    };
    let mut used = 0;
    let mut columns = Vec::with_capacity(names.len());
    for name in names {
        match index.get(name.as_str()) {
            Some(&j) => {
                used += 1;
                columns.push(data.column(j).to_vec());
            }
            None if is_indicator(name) => columns.push(vec![0.0; data.n()]),
            None => return Err(Error::MissingColumn(name.clone())),
        }
    }
    let extra: Vec<&String> = data.feature_names().iter().filter(|n| !names.contains(n)).collect();
    if used != data.d() || !extra.is_empty() {
        // a level unseen in training has no indicator in the forest
        return Err(Error::DimensionMismatch {
            expected: names.len(),
            got: data.d(),
        });
    }
    Dataset::from_columns(columns, data.response().to_vec())?.with_feature_names(names.to_vec())
}

/// Writes features and response (header `target`) with 17 significant
/// digits, which reloads bit-for-bit.
pub fn write_csv(path: impl AsRef<Path>, data: &Dataset, target: &str) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = data.feature_names().iter().map(String::as_str).collect();
    header.push(target);
    w.write_record(&header)?;
    for i in 0..data.n() {
        let mut rec: Vec<String> = (0..data.d()).map(|j| format!("{:.16e}", data.x(i, j))).collect();
        rec.push(format!("{:.16e}", data.response()[i]));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
