use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl Check {
    /// Passes when `measured ≤ tolerance` (NaN fails).
    pub fn within(name: impl Into<String>, measured: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            status: if measured <= tolerance {
                Status::Pass
            } else {
                Status::Fail
            },
            measured: Some(measured),
            tolerance: Some(tolerance),
            message: None,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool, measured: Option<f64>) -> Check {
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            tolerance: None,
            message: None,
        }
    }

    pub fn error(name: impl Into<String>, err: impl std::fmt::Display) -> Check {
        Check {
            name: name.into(),
            status: Status::Error,
            measured: None,
            tolerance: None,
            message: Some(err.to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config: Value,
    pub checks: Vec<Check>,
    pub data: Value,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }
}
