//! Parsing of command-line inputs.

use std::path::Path;

use lattice_forge::discform::parse_rational;
use lattice_forge::{parse_lattice_expr, Lattice, PrimitiveEmbedding};
use num_rational::BigRational;
use serde_json::Value;

use crate::{CliError, CliResult};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// A lattice from the expression language; nested Gram matrices are part of
/// the language.
pub fn lattice(text: &str) -> CliResult<Lattice> {
    Ok(parse_lattice_expr(text)?)
}

fn lattice_value(v: &Value, what: &str) -> CliResult<Lattice> {
    match v {
        Value::String(s) => lattice(s),
        Value::Array(_) => Ok(Lattice::new(int_matrix_value(v, what)?)?),
        _ => Err(usage(format!("{what}: expected a Gram matrix or a lattice expression"))),
    }
}

fn int_matrix_value(v: &Value, what: &str) -> CliResult<Vec<Vec<i64>>> {
    serde_json::from_value(v.clone()).map_err(|e| usage(format!("{what}: {e}")))
}

/// JSON text given inline or as a path to a file.
pub fn json_arg(arg: &str) -> CliResult<Value> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg)).map_err(|e| usage(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| usage(format!("invalid JSON: {e}")))
}

/// `{"source": ..., "ambient": ..., "images": [[...], ...]}`; a missing
/// ambient defaults to `default_ambient`.
pub fn embedding(arg: &str, default_ambient: Option<Lattice>) -> CliResult<PrimitiveEmbedding> {
    let v = json_arg(arg)?;
    let obj = v.as_object().ok_or_else(|| usage("embedding: expected a JSON object"))?;
    let source = lattice_value(obj.get("source").ok_or_else(|| usage("embedding: missing \"source\""))?, "source")?;
    let ambient = match (obj.get("ambient"), default_ambient) {
        (Some(a), _) => lattice_value(a, "ambient")?,
        (None, Some(d)) => d,
        (None, None) => return Err(usage("embedding: missing \"ambient\"")),
    };
    let images = int_matrix_value(obj.get("images").ok_or_else(|| usage("embedding: missing \"images\""))?, "images")?;
    Ok(PrimitiveEmbedding::new(source, ambient, images)?)
}

/// An integer matrix written as JSON, e.g. `[[1,0],[0,1]]`.
pub fn int_matrix(arg: &str) -> CliResult<Vec<Vec<i64>>> {
    int_matrix_value(&json_arg(arg)?, "matrix")
}

fn split(text: &str) -> impl Iterator<Item = &str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Comma-separated rationals such as `1/2,-3`.
pub fn rational_list(text: &str) -> CliResult<Vec<BigRational>> {
    split(text).map(rational).collect()
}

pub fn rational(text: &str) -> CliResult<BigRational> {
    parse_rational(text.trim()).map_err(|e| usage(e.to_string()))
}
