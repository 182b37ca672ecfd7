//! Exact-arithmetic computation of orientifold Donaldson-Thomas series for
//! quivers with involution and duality structure.
//!
//! The crate is organized in five layers:
//!
//! - [`quiver`]: the quiver/involution/duality data model with bilinear and
//!   quadratic forms, slopes and dimension-vector enumeration;
//! - [`scalar`]: exact arithmetic in Q(v) with v^2 = q, q-Pochhammer and
//!   Gaussian-binomial combinatorics, and specialization at odd primes;
//! - [`series`]: the truncated quantum torus, its module, and quantum
//!   dilogarithm series;
//! - [`engine`]: stack generating functions, Harder-Narasimhan recursions and
//!   the closed-form counting sum, wall-crossing verification, and extraction
//!   of (orientifold) DT invariants;
//! - [`oracle`]: brute-force ground truth over small prime fields.
//!
//! The [`config`] and [`report`] modules back the `oridt` command line tool.
//!
//! No floating point is used anywhere; every equality the crate asserts is an
//! exact identity of canonical rational functions in v.

pub mod config;
pub mod engine;
pub mod identities;
pub mod oracle;
pub mod poly;
pub mod presets;
pub mod quiver;
pub mod report;
pub mod scalar;
pub mod series;
