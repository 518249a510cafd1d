//! Run reports: the resolved configuration plus a command's result, as
//! deterministic JSON (no timings, no paths, no thread counts).

use serde::{Deserialize, Serialize};

use crate::domains::DomainSpec;
use crate::maps::{Family, MapSpec};
use crate::tolerance::Tolerances;

/// Everything that determines a run's result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub domain: DomainSpec,
    pub m_out: usize,
    /// Explicit map, when one was given.
    pub map: Option<MapSpec>,
    /// Family for random maps or optimization.
    pub family: Option<Family>,
    pub degree: Option<usize>,
    pub trials: Option<usize>,
    pub cover: Option<String>,
    pub r_thick: Option<f64>,
    pub budget: Option<usize>,
    pub restarts: Option<usize>,
    pub bins: Option<usize>,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub config: RunConfig,
    pub passed: bool,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn to_json(&self) -> crate::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}
