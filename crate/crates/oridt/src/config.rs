//! The JSON run configuration consumed by the command line tool.
//!
//! A config is a single versioned JSON document holding the quiver with its
//! involution and signs, a set of named stabilities, the truncation bound,
//! and oracle settings. The schema ships in `docs/config-schema.json`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::oracle::Caps;
use crate::quiver::{QuiverDescription, QuiverWithDuality, Stability};

pub const SCHEMA_VERSION: u32 = 1;
/// Documented range for the truncation bound.
pub const MAX_BOUND: u32 = 12;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema_version: u32,
    pub quiver: QuiverDescription,
    #[serde(default)]
    pub stabilities: BTreeMap<String, BTreeMap<String, i64>>,
    #[serde(default = "default_bound")]
    pub bound: u32,
    #[serde(default)]
    pub oracle: OracleSettings,
}

fn default_bound() -> u32 {
    6
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleSettings {
    #[serde(default = "default_primes")]
    pub primes: Vec<u64>,
    #[serde(default = "default_point_cap")]
    pub point_cap: u64,
    #[serde(default = "default_group_cap")]
    pub group_cap: u64,
    #[serde(default = "default_subspace_cap")]
    pub subspace_cap: u64,
    #[serde(default = "default_prime_cap")]
    pub prime_cap: u64,
}

fn default_primes() -> Vec<u64> {
    vec![3, 5]
}
fn default_point_cap() -> u64 {
    10_000_000
}
fn default_group_cap() -> u64 {
    1_000_000
}
fn default_subspace_cap() -> u64 {
    1_000_000
}
fn default_prime_cap() -> u64 {
    13
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            primes: default_primes(),
            point_cap: default_point_cap(),
            group_cap: default_group_cap(),
            subspace_cap: default_subspace_cap(),
            prime_cap: default_prime_cap(),
        }
    }
}

impl OracleSettings {
    pub fn caps(&self) -> Caps {
        Caps {
            point_cap: self.point_cap,
            group_cap: self.group_cap,
            subspace_cap: self.subspace_cap,
            prime_cap: self.prime_cap,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(String),
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("unsupported schema_version {0} (expected 1)")]
    SchemaVersion(u32),
    #[error("bound {0} outside documented range 0..={MAX_BOUND}")]
    BadBound(u32),
    #[error("quiver validation failed: {0}")]
    Quiver(String),
    #[error("stability {name} is missing a weight for node {node}")]
    MissingWeight { name: String, node: String },
    #[error("unknown stability name {0}")]
    UnknownStability(String),
    #[error("oracle prime {0} must be an odd prime within prime_cap")]
    BadPrime(u64),
}

/// A parsed and fully validated configuration.
pub struct ValidatedConfig {
    pub quiver: QuiverWithDuality,
    pub stabilities: BTreeMap<String, Stability>,
    pub bound: u32,
    pub oracle: OracleSettings,
    pub raw: RunConfig,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn validate(self) -> Result<ValidatedConfig, ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::SchemaVersion(self.schema_version));
        }
        if self.bound > MAX_BOUND {
            return Err(ConfigError::BadBound(self.bound));
        }
        let quiver = QuiverWithDuality::validate(&self.quiver).map_err(|errs| {
            ConfigError::Quiver(
                errs.iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            )
        })?;
        let mut stabilities = BTreeMap::new();
        for (name, weights) in &self.stabilities {
            let mut vec = Vec::with_capacity(quiver.node_count());
            for node in quiver.node_ids() {
                match weights.get(node) {
                    Some(&w) => vec.push(w),
                    None => {
                        return Err(ConfigError::MissingWeight {
                            name: name.clone(),
                            node: node.clone(),
                        })
                    }
                }
            }
            stabilities.insert(name.clone(), Stability::new(vec));
        }
        for &p in &self.oracle.primes {
            if p < 3 || p % 2 == 0 || p > self.oracle.prime_cap {
                return Err(ConfigError::BadPrime(p));
            }
        }
        Ok(ValidatedConfig {
            quiver,
            stabilities,
            bound: self.bound,
            oracle: self.oracle.clone(),
            raw: self,
        })
    }
}

impl ValidatedConfig {
    pub fn stability(&self, name: &str) -> Result<Stability, ConfigError> {
        self.stabilities
            .get(name)
            .cloned()
            .ok_or_else(|| ConfigError::UnknownStability(name.to_string()))
    }
}
