//! JSON parameter files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "T": 2,
//!   "p": 5.0000000000000000e-1,
//!   "nt": 4,
//!   "nr": 8,
//!   "mod_order": 4,
//!   "gamma": [4.2893218813452478e-2, 4.2893218813452478e-2],
//!   "theta": [1.0000000000000000e0, 1.0000000000000000e0]
//! }
//! ```
//!
//! Reals are written with 17 significant digits, so loading a saved file
//! reproduces every value bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{Map, Value};

use super::DpstParams;
use crate::error::{Error, Result};

pub const PARAMS_VERSION: i64 = 1;

const FIELDS: [&str; 8] = [
    "version",
    "T",
    "p",
    "nt",
    "nr",
    "mod_order",
    "gamma",
    "theta",
];

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn real_list(vs: &[f64]) -> String {
    let items: Vec<String> = vs.iter().map(|&v| real(v)).collect();
    format!("[{}]", items.join(", "))
}

pub fn params_to_json(params: &DpstParams) -> String {
    let mut s = String::new();
    // writing to a String cannot fail
    let _ = write!(
        s,
        "{{\n  \"version\": {PARAMS_VERSION},\n  \"T\": {},\n  \"p\": {},\n  \"nt\": {},\n  \"nr\": {},\n  \"mod_order\": {},\n  \"gamma\": {},\n  \"theta\": {}\n}}\n",
        params.layers,
        real(params.p),
        params.nt,
        params.nr,
        params.mod_order,
        real_list(&params.gamma),
        real_list(&params.theta),
    );
    s
}

fn field_err(field: &'static str, reason: impl Into<String>) -> Error {
    Error::ParamField {
        field,
        reason: reason.into(),
    }
}

fn get<'a>(obj: &'a Map<String, Value>, field: &'static str) -> Result<&'a Value> {
    obj.get(field).ok_or_else(|| field_err(field, "missing"))
}

fn get_count(obj: &Map<String, Value>, field: &'static str) -> Result<usize> {
    get(obj, field)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| field_err(field, "expected a non-negative integer"))
}

fn get_real(obj: &Map<String, Value>, field: &'static str) -> Result<f64> {
    get(obj, field)?
        .as_f64()
        .ok_or_else(|| field_err(field, "expected a number"))
}

fn get_reals(obj: &Map<String, Value>, field: &'static str) -> Result<Vec<f64>> {
    let arr = get(obj, field)?
        .as_array()
        .ok_or_else(|| field_err(field, "expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .ok_or_else(|| field_err(field, format!("entry {i} is not a number")))
        })
        .collect()
}

pub fn params_from_json(text: &str) -> Result<DpstParams> {
    let value: Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| field_err("version", "document is not a JSON object"))?;
    let version = get(obj, "version")?
        .as_i64()
        .ok_or_else(|| field_err("version", "expected an integer"))?;
    if version != PARAMS_VERSION {
        return Err(Error::Version {
            found: version,
            expected: PARAMS_VERSION,
        });
    }
    if let Some(extra) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(field_err(
            "version",
            format!("unknown field `{extra}` for version 1"),
        ));
    }
    let params = DpstParams {
        layers: get_count(obj, "T")?,
        p: get_real(obj, "p")?,
        nt: get_count(obj, "nt")?,
        nr: get_count(obj, "nr")?,
        mod_order: get_count(obj, "mod_order")?,
        gamma: get_reals(obj, "gamma")?,
        theta: get_reals(obj, "theta")?,
    };
    params.validate()?;
    Ok(params)
}

pub fn save_params(params: &DpstParams, path: impl AsRef<Path>) -> Result<()> {
    params.validate()?;
    fs::write(path, params_to_json(params))?;
    Ok(())
}

pub fn load_params(path: impl AsRef<Path>) -> Result<DpstParams> {
    let path = path.as_ref();
    let wrap = |e: Error| Error::ParamsPath {
        path: path.to_path_buf(),
        source: Box::new(e),
    };
    let text = fs::read_to_string(path).map_err(|e| wrap(e.into()))?;
    params_from_json(&text).map_err(wrap)
}
