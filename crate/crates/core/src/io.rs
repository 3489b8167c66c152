//! JSON input files: needs, weights, group matrices and rosters.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouping::{RobotSnapshot, TaskTarget};
use crate::needs::{GroupNeedsMatrix, NeedsVector, WeightVector};

/// Reads and parses a JSON file. Parse errors carry line and column.
pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })
}

fn invalid(path: &Path, e: Error) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

/// `{"labels": [...], "values": [...]}`; labels are optional.
pub fn load_needs(path: impl AsRef<Path>) -> Result<NeedsVector> {
    let path = path.as_ref();
    let v: NeedsVector = read_json(path)?;
    v.validate().map_err(|e| invalid(path, e))?;
    Ok(v)
}

/// `{"weights": [...]}`
pub fn load_weights(path: impl AsRef<Path>) -> Result<WeightVector> {
    let path = path.as_ref();
    let w: WeightVector = read_json(path)?;
    w.validate().map_err(|e| invalid(path, e))?;
    Ok(w)
}

/// `{"rows": [{"values": [...]}, ...]}` or `{"rows": [[...], ...]}`.
pub fn load_group(path: impl AsRef<Path>) -> Result<GroupNeedsMatrix> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Row {
        Plain(Vec<f64>),
        Needs(NeedsVector),
    }
    #[derive(Deserialize)]
    struct Rows {
        rows: Vec<Row>,
    }
    let path = path.as_ref();
    let raw: Rows = read_json(path)?;
    let rows = raw
        .rows
        .into_iter()
        .map(|r| match r {
            Row::Plain(v) => NeedsVector::new(v),
            Row::Needs(n) => n.validate().map(|_| n),
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| invalid(path, e))?;
    GroupNeedsMatrix::new(rows).map_err(|e| invalid(path, e))
}

/// Robots with their current needs plus the two task locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Roster {
    pub robots: Vec<RobotSnapshot>,
    pub tasks: Vec<TaskTarget>,
}

pub fn load_roster(path: impl AsRef<Path>) -> Result<Roster> {
    let path = path.as_ref();
    let roster: Roster = read_json(path)?;
    for r in &roster.robots {
        r.validate().map_err(|e| invalid(path, e))?;
    }
    Ok(roster)
}
