//! Machine-readable JSON reports for every command.
//!
//! Output is byte-identical across runs: all maps iterate in key order,
//! scalars render in canonical form, and dimension vectors serialize as
//! arrays ordered by the config's node list. Every scalar-bearing report
//! carries the note `v = q^(1/2)`.

use serde::Serialize;

use crate::engine::OmegaTable;
use crate::quiver::{DimVector, FiniteTypeVerdict};

pub const SCALAR_NOTE: &str = "v = q^(1/2)";

/// Process exit codes, as documented for the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    IdentityFailed = 1,
    ConfigError = 2,
    CapExceeded = 3,
}

#[derive(Serialize)]
pub struct ValidateReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub valid: bool,
    pub nodes: Vec<String>,
    pub partitions: Partitions,
    pub finite_type: FiniteTypeVerdict,
}

#[derive(Serialize)]
pub struct Partitions {
    pub q0_plus: Vec<String>,
    pub q0_sigma: Vec<String>,
    pub q0_minus: Vec<String>,
    pub q1_plus: Vec<String>,
    pub q1_sigma: Vec<String>,
    pub q1_minus: Vec<String>,
}

#[derive(Serialize)]
pub struct SeriesReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub kind: String,
    pub theta: Option<String>,
    pub bound: u32,
    pub note: &'static str,
    pub terms: Vec<SeriesTerm>,
}

#[derive(Serialize)]
pub struct SeriesTerm {
    pub dim: DimVector,
    pub coeff: String,
}

#[derive(Serialize)]
pub struct WallcrossOut {
    pub schema_version: u32,
    pub command: &'static str,
    pub theta_a: String,
    pub theta_b: String,
    pub bound: u32,
    pub note: &'static str,
    pub equal: bool,
    pub first_difference: Option<Difference>,
}

#[derive(Serialize)]
pub struct Difference {
    pub dim: DimVector,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Serialize)]
pub struct FactorizeReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub theta: String,
    pub bound: u32,
    pub orientifold: bool,
    pub finite_type: bool,
    pub sigma_generic: bool,
    pub residual_ok: bool,
    pub omega: Vec<OmegaEntry>,
    pub omega_sigma: Vec<OmegaEntry>,
}

#[derive(Serialize)]
pub struct OmegaEntry {
    pub dim: DimVector,
    pub value: i64,
}

impl FactorizeReport {
    pub fn from_table(
        table: &OmegaTable,
        theta: String,
        bound: u32,
        orientifold: bool,
    ) -> Self {
        FactorizeReport {
            schema_version: crate::config::SCHEMA_VERSION,
            command: "factorize",
            theta,
            bound,
            orientifold,
            finite_type: table.finite_type,
            sigma_generic: table.sigma_generic,
            residual_ok: table.residual_ok,
            omega: table
                .ordinary
                .iter()
                .map(|(d, &v)| OmegaEntry {
                    dim: d.clone(),
                    value: v,
                })
                .collect(),
            omega_sigma: table
                .sigma
                .iter()
                .map(|(d, &v)| OmegaEntry {
                    dim: d.clone(),
                    value: v,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct OracleReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub theta: String,
    pub prime: u64,
    pub dim: DimVector,
    pub note: &'static str,
    pub ordinary: OracleComparison,
    /// Present when `dim` is an admissible sigma-symmetric vector.
    pub selfdual: Option<SelfDualOracle>,
}

#[derive(Serialize)]
pub struct OracleComparison {
    /// The engine coefficient (of `x_d` or `xi_e`) in canonical form.
    pub coefficient: String,
    /// Its normalized specialization at v = sqrt(p): a rational string.
    pub formula: String,
    /// The brute-force stack count.
    pub oracle: String,
    pub matches: bool,
}

#[derive(Serialize)]
pub struct SelfDualOracle {
    #[serde(flatten)]
    pub comparison: OracleComparison,
    pub sectors: Vec<crate::oracle::SectorCount>,
    /// Absent when the census would exceed a cap.
    pub census: Option<CensusSummary>,
}

#[derive(Serialize)]
pub struct CensusSummary {
    pub classes: usize,
    pub semistable_classes: usize,
    /// Automorphism orders of the semistable classes, sorted.
    pub isometry_orders: Vec<u64>,
}

#[derive(Serialize)]
pub struct DilogReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub identity: String,
    pub bound: u32,
    pub note: &'static str,
    pub equal: bool,
    pub first_difference: Option<Difference>,
    pub summary: String,
}

#[derive(Serialize)]
pub struct DeltaReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub theta: String,
    pub d: DimVector,
    pub e: DimVector,
    pub omega_d: i64,
    pub omega_sigma_e: i64,
    pub i_value: i64,
    pub delta: i64,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct ErrorReport {
    pub schema_version: u32,
    pub command: String,
    pub error: ErrorBody,
}

#[derive(Serialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}
