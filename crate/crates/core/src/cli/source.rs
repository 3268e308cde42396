//! Oracle ingestion: `builtin:<name>` or a JSON file.
//!
//! File forms:
//!
//! ```text
//! {"builtin": "inner_star", "params": {"z": [[...]]}, "n": 3}
//! {"table": [{"in": M, "out": M}, ...], "dims": [1, 2]}
//! {"kind": "perturbed", "z": M, "eps": "1/1000", "shape": "trace_square"}
//! ```
//!
//! A builtin without `z` draws it from the seed.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use super::CliError;
use crate::blockalg::BlockAlgebra;
use crate::derlab::{Adversary, CertifyConfig, MapOracle, Oracle};
use crate::matlin::random::{random_matrix, random_trace_zero_skew};
use crate::matlin::{matrix_to_json, Matrix, Scalar};

pub const BUILTINS: [&str; 3] = ["zero", "inner", "inner_star"];

#[derive(Debug, Clone)]
pub struct Loaded<S: Scalar> {
    pub oracle: MapOracle<S>,
    pub dims: Vec<usize>,
    /// `builtin:<name>` or the file name, for the report.
    pub label: String,
}

impl<S: Scalar> Loaded<S> {
    pub fn n(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Inputs of a table oracle, which are the only points it can answer.
    pub fn table_inputs(&self) -> Option<Vec<Matrix<S>>> {
        match &self.oracle {
            MapOracle::Table(t) => Some(t.entries().iter().map(|(x, _)| x.clone()).collect()),
            _ => None,
        }
    }
}

/// `--n` and `--dims` agree when both are given.
pub fn requested_dims(n: Option<usize>, dims: &[usize]) -> Result<Option<Vec<usize>>, CliError> {
    match (n, dims.is_empty()) {
        (None, true) => Ok(None),
        (Some(n), true) => Ok(Some(vec![n])),
        (None, false) => Ok(Some(dims.to_vec())),
        (Some(n), false) => {
            let total: usize = dims.iter().sum();
            if total != n {
                return Err(CliError::Usage(format!("--n {n} disagrees with --dims summing to {total}")));
            }
            Ok(Some(dims.to_vec()))
        }
    }
}

pub fn load<S: Scalar>(
    spec: &str,
    dims: Option<Vec<usize>>,
    seed: u64,
    config: &CertifyConfig,
) -> Result<Loaded<S>, CliError> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let dims = dims.ok_or_else(|| CliError::Usage(format!("builtin:{name} needs --n or --dims")))?;
        check_dims(&dims)?;
        let oracle = builtin::<S>(name, &dims, None, seed, config)?;
        return Ok(Loaded { oracle, dims, label: spec.to_string() });
    }
    let text = std::fs::read_to_string(spec).map_err(|e| CliError::Io(format!("{spec}: {e}")))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{spec}: malformed JSON: {e}")))?;
    let label = Path::new(spec).file_name().map_or_else(|| spec.to_string(), |f| f.to_string_lossy().into_owned());
    let loaded = from_value::<S>(&value, dims, seed, config, label)?;
    Ok(loaded)
}

fn check_dims(dims: &[usize]) -> Result<(), CliError> {
    BlockAlgebra::new(dims.to_vec()).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(())
}

fn file_dims(value: &Value) -> Result<Option<Vec<usize>>, CliError> {
    if let Some(d) = value.get("dims") {
        let dims: Vec<usize> =
            serde_json::from_value(d.clone()).map_err(|_| CliError::Usage("\"dims\" must be a list of block sizes".into()))?;
        return Ok(Some(dims));
    }
    if let Some(n) = value.get("n") {
        let n = n.as_u64().ok_or_else(|| CliError::Usage("\"n\" must be a positive integer".into()))?;
        return Ok(Some(vec![n as usize]));
    }
    Ok(None)
}

fn from_value<S: Scalar>(
    value: &Value,
    requested: Option<Vec<usize>>,
    seed: u64,
    config: &CertifyConfig,
    label: String,
) -> Result<Loaded<S>, CliError> {
    let declared = file_dims(value)?;
    let dims = match (declared, requested) {
        (Some(a), Some(b)) if a.iter().sum::<usize>() != b.iter().sum::<usize>() => {
            return Err(CliError::Usage(format!("{label} declares dims {a:?}, the command line asks for {b:?}")));
        }
        (Some(a), Some(b)) => {
            if a.len() > 1 && b.len() > 1 && a != b {
                return Err(CliError::Usage(format!("{label} declares dims {a:?}, the command line asks for {b:?}")));
            }
            if b.len() > a.len() { Some(b) } else { Some(a) }
        }
        (a, b) => a.or(b),
    };
    let invalid = |e: crate::derlab::OracleError| CliError::Usage(format!("{label}: {e}"));

    let oracle = if let Some(name) = value.get("builtin") {
        let name = name.as_str().ok_or_else(|| CliError::Usage(format!("{label}: \"builtin\" must be a string")))?;
        let dims = dims.clone().ok_or_else(|| CliError::Usage(format!("{label}: builtin oracles need \"n\" or \"dims\"")))?;
        check_dims(&dims)?;
        let params = match value.get("params") {
            None | Some(Value::Null) => Map::new(),
            Some(Value::Object(m)) => m.clone(),
            Some(_) => return Err(CliError::Usage(format!("{label}: \"params\" must be an object"))),
        };
        builtin::<S>(name, &dims, Some(params), seed, config)?
    } else if let Some(rows) = value.get("table") {
        let rows = rows.as_array().ok_or_else(|| CliError::Usage(format!("{label}: \"table\" must be a list")))?;
        let n: usize = match &dims {
            Some(d) => d.iter().sum(),
            None => infer_n(rows).ok_or_else(|| CliError::Usage(format!("{label}: cannot infer n from an empty table")))?,
        };
        let entries: Vec<Value> = rows
            .iter()
            .map(|r| {
                let input = r.get("in").ok_or_else(|| CliError::Usage(format!("{label}: table row without \"in\"")))?;
                let output = r.get("out").ok_or_else(|| CliError::Usage(format!("{label}: table row without \"out\"")))?;
                Ok(serde_json::json!({"input": input, "output": output}))
            })
            .collect::<Result<_, CliError>>()?;
        MapOracle::from_json(&serde_json::json!({"kind": "table", "n": n, "entries": entries})).map_err(invalid)?
    } else if value.get("kind").is_some() {
        MapOracle::from_json(value).map_err(invalid)?
    } else {
        return Err(CliError::Usage(format!("{label}: expected \"builtin\", \"table\" or \"kind\"")));
    };

    let dims = match dims {
        Some(d) => d,
        None => oracle.block_dims().unwrap_or_else(|| vec![oracle.dim()]),
    };
    check_dims(&dims)?;
    if dims.iter().sum::<usize>() != oracle.dim() {
        return Err(CliError::Usage(format!("{label}: oracle acts on M_{}, expected M_{}", oracle.dim(), dims.iter().sum::<usize>())));
    }
    if let MapOracle::Table(t) = &oracle {
        let alg = BlockAlgebra::new(dims.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
        for (x, _) in t.entries() {
            alg.check_mask(x).map_err(|e| CliError::Usage(format!("{label}: table input {x}: {e}")))?;
        }
    }
    Ok(Loaded { oracle, dims, label })
}

fn infer_n(rows: &[Value]) -> Option<usize> {
    rows.first()?.get("in")?.as_array().map(Vec::len)
}

fn builtin<S: Scalar>(
    name: &str,
    dims: &[usize],
    params: Option<Map<String, Value>>,
    seed: u64,
    config: &CertifyConfig,
) -> Result<MapOracle<S>, CliError> {
    if let Ok(adversary) = name.parse::<Adversary>() {
        if params.as_ref().is_some_and(|p| !p.is_empty()) {
            return Err(CliError::Usage(format!("builtin {name} takes no params")));
        }
        return adversary.build::<S>(dims, seed, config).map_err(|e| CliError::Usage(e.to_string()));
    }
    let mut params = params.unwrap_or_default();
    let known = ["zero", "inner", "inner_star", "perturbed"];
    if !known.contains(&name) {
        let adversaries: Vec<&str> = Adversary::ALL.iter().map(|a| a.name()).collect();
        return Err(CliError::Usage(format!(
            "unknown builtin {name:?} (known: {}, perturbed, {})",
            BUILTINS.join(", "),
            adversaries.join(", ")
        )));
    }
    let n: usize = dims.iter().sum();
    if name == "zero" {
        return Ok(MapOracle::Zero { n });
    }
    if !params.contains_key("z") {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        let star = name == "inner_star" || config.star;
        let blocks: Vec<Matrix<S>> = dims
            .iter()
            .map(|&d| if star { random_trace_zero_skew(d, &mut rng) } else { random_matrix::<S, _>(d, &mut rng).trace_normalized() })
            .collect();
        if dims.len() > 1 && name != "perturbed" {
            let parts = blocks
                .into_iter()
                .map(|z| native::<S>(name, z, &params))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(MapOracle::composite(parts));
        }
        params.insert("z".into(), matrix_to_json(&Matrix::direct_sum(&blocks)));
    }
    let mut v = params;
    v.insert("kind".into(), Value::String(name.into()));
    MapOracle::from_json(&Value::Object(v)).map_err(|e| CliError::Usage(format!("builtin {name}: {e}")))
}

fn native<S: Scalar>(name: &str, z: Matrix<S>, params: &Map<String, Value>) -> Result<MapOracle<S>, CliError> {
    let mut v = params.clone();
    v.insert("kind".into(), Value::String(name.into()));
    v.insert("z".into(), matrix_to_json(&z));
    MapOracle::from_json(&Value::Object(v)).map_err(|e| CliError::Usage(format!("builtin {name}: {e}")))
}
