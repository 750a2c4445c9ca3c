//! Covariance-matrix sources accepted by `report`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use gaussian_hellinger::sweep::Family;
use gaussian_hellinger::symplectic::{CovarianceMatrix, StandardForm};
use serde::Serialize;
use serde_json::Value;

use crate::args::ReportArgs;

/// Echo of the command-line input, stored in the JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputEcho {
    pub source: &'static str,
    pub value: Value,
    pub mean: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ResolvedInput {
    pub cm: CovarianceMatrix,
    pub mean: [f64; 4],
    pub echo: InputEcho,
}

/// `k=v` assignments, later keys overriding earlier ones.
pub fn parse_assignments(items: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in items.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got '{item}'"))?;
        let v: f64 = v.trim().parse().with_context(|| format!("bad number in '{item}'"))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

/// Comma- or whitespace-separated numbers.
pub fn parse_numbers(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().with_context(|| format!("bad number '{s}'")))
        .collect()
}

pub fn parse_std_form(text: &str) -> Result<StandardForm> {
    let v = parse_numbers(text)?;
    let sf = match v.as_slice() {
        [b1, b2, c, d] => StandardForm::new(*b1, *b2, *c, *d),
        [b1, b2, c, d, s1, s2] => StandardForm::scaled(*b1, *b2, *c, *d, *s1, *s2),
        _ => bail!("--std-form takes 4 or 6 numbers, got {}", v.len()),
    };
    Ok(sf)
}

fn parse_mean(text: &str) -> Result<[f64; 4]> {
    let v = parse_numbers(text)?;
    v.as_slice()
        .try_into()
        .map_err(|_| anyhow!("--mean takes 4 numbers, got {}", v.len()))
}

fn rows_to_flat(value: &Value) -> Result<Vec<f64>> {
    let rows = value
        .as_array()
        .ok_or_else(|| anyhow!("matrix must be an array of rows"))?;
    let mut flat = Vec::with_capacity(16);
    for row in rows {
        let row = row.as_array().ok_or_else(|| anyhow!("matrix rows must be arrays"))?;
        if row.len() != rows.len() {
            bail!("matrix is not square");
        }
        for x in row {
            flat.push(x.as_f64().ok_or_else(|| anyhow!("matrix entries must be numbers"))?);
        }
    }
    Ok(flat)
}

fn json_mean(value: &Value) -> Result<[f64; 4]> {
    let v: Vec<f64> = serde_json::from_value(value.clone()).context("bad 'mean' field")?;
    v.as_slice()
        .try_into()
        .map_err(|_| anyhow!("'mean' must have 4 entries, got {}", v.len()))
}

/// Matrix entries and, for a re-ingested report, its mean.
fn parse_matrix_text(text: &str) -> Result<(Vec<f64>, Option<[f64; 4]>)> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let doc: Value = serde_json::from_str(text).context("matrix JSON does not parse")?;
        let cm = doc.get("cm").ok_or_else(|| anyhow!("JSON object has no 'cm' field"))?;
        let mean = doc.get("mean").map(json_mean).transpose()?;
        Ok((rows_to_flat(cm)?, mean))
    } else if trimmed.starts_with('[') {
        let doc: Value = serde_json::from_str(text).context("matrix JSON does not parse")?;
        Ok((rows_to_flat(&doc)?, None))
    } else {
        Ok((parse_numbers(text)?, None))
    }
}

fn load_matrix(arg: &str) -> Result<(Vec<f64>, Option<[f64; 4]>)> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        parse_matrix_text(&text)
    } else {
        parse_matrix_text(arg)
    }
}

/// Resolves the single state source of a `report` invocation.
pub fn resolve(args: &ReportArgs) -> Result<ResolvedInput> {
    let explicit_mean = args.mean.as_deref().map(parse_mean).transpose()?;
    let family_form = |family: Family, items: &[String]| -> Result<StandardForm> {
        Ok(family.standard_form(&parse_assignments(items)?)?)
    };
    let (cm, stored_mean, source, value) = if let Some(items) = &args.sts {
        let sf = family_form(Family::Sts, items)?;
        (sf.to_cm(), None, "sts", Value::from(items.clone()))
    } else if let Some(items) = &args.mts {
        let sf = family_form(Family::Mts, items)?;
        (sf.to_cm(), None, "mts", Value::from(items.clone()))
    } else if let Some(text) = &args.std_form {
        let sf = parse_std_form(text)?;
        sf.validate()?;
        (sf.to_cm(), None, "std-form", Value::from(text.clone()))
    } else if let Some(arg) = &args.matrix {
        let (entries, mean) = load_matrix(arg)?;
        if entries.len() != 16 {
            bail!("--matrix needs a 4×4 matrix (16 entries), got {}", entries.len());
        }
        let cm = CovarianceMatrix::from_row_slice(4, &entries)?;
        (cm, mean, "matrix", Value::from(arg.clone()))
    } else {
        bail!("no input state given");
    };
    Ok(ResolvedInput {
        cm,
        mean: explicit_mean.or(stored_mean).unwrap_or([0.0; 4]),
        echo: InputEcho {
            source,
            value,
            mean: args.mean.clone(),
        },
    })
}
