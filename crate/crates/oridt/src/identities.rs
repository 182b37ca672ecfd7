//! Named quantum dilogarithm identities on the A2 quiver.
//!
//! `Pentagon` is the torus identity
//! `E_q(x_sink) E_q(x_source) = E_q(x_source) E_q(x_{(1,1)}) E_q(x_sink)`;
//! the two module identities compare the positive-slope chambers of the
//! orthogonal and symplectic wall-crossing formulas.

use serde::{Deserialize, Serialize};

use crate::presets;
use crate::quiver::DimVector;
use crate::scalar::ScalarV;
use crate::series::{dilog, DilogBase, ModuleSeries, SeriesError, TorusSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DilogIdentity {
    Pentagon,
    A2Orthogonal,
    A2Symplectic,
}

impl std::str::FromStr for DilogIdentity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pentagon" => Ok(DilogIdentity::Pentagon),
            "a2-orthogonal" => Ok(DilogIdentity::A2Orthogonal),
            "a2-symplectic" => Ok(DilogIdentity::A2Symplectic),
            other => Err(format!("unknown identity {other}")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityOutcome {
    pub equal: bool,
    pub first_difference: Option<(DimVector, String, String)>,
}

/// Check a named identity through total dimension `bound`.
pub fn check_identity(which: DilogIdentity, bound: u32) -> Result<IdentityOutcome, SeriesError> {
    match which {
        DilogIdentity::Pentagon => {
            let q = presets::build(&presets::a2_with_flip(1, -1));
            let source = DimVector::from_slice(&[1, 0]);
            let sink = DimVector::from_slice(&[0, 1]);
            let middle = DimVector::from_slice(&[1, 1]);
            let e = |d: &DimVector| dilog(&q, d, DilogBase::Q, 0, bound);
            let lhs = e(&sink)?.mul(&e(&source)?, &q)?;
            let rhs = e(&source)?
                .mul(&e(&middle)?, &q)?
                .mul(&e(&sink)?, &q)?;
            Ok(torus_outcome(&lhs, &rhs))
        }
        DilogIdentity::A2Orthogonal => {
            let q = presets::build(&presets::a2_with_flip(1, -1));
            let source = DimVector::from_slice(&[1, 0]);
            let sink = DimVector::from_slice(&[0, 1]);
            let middle = DimVector::from_slice(&[1, 1]);
            let vacuum = ModuleSeries::vacuum(2, bound);
            let lhs = dilog(&q, &sink, DilogBase::Q, 0, bound)?.act(&vacuum, &q)?;
            let rhs = dilog(&q, &source, DilogBase::Q, 0, bound)?
                .mul(&dilog(&q, &middle, DilogBase::QSquared, -1, bound)?, &q)?
                .act(&vacuum, &q)?;
            Ok(module_outcome(&lhs, &rhs))
        }
        DilogIdentity::A2Symplectic => {
            let q = presets::build(&presets::a2_with_flip(-1, -1));
            let source = DimVector::from_slice(&[1, 0]);
            let sink = DimVector::from_slice(&[0, 1]);
            let middle = DimVector::from_slice(&[1, 1]);
            let vacuum = ModuleSeries::vacuum(2, bound);
            let lhs = dilog(&q, &sink, DilogBase::Q, 0, bound)?.act(&vacuum, &q)?;
            let sigma_part = dilog(&q, &middle, DilogBase::QSquared, 1, bound)?
                .act(&vacuum, &q)?
                .add(
                    &dilog(&q, &middle, DilogBase::QSquared, -1, bound)?
                        .act(&ModuleSeries::basis(&q, middle.clone(), bound)?, &q)?,
                )?;
            let mut rhs = ModuleSeries::zero(bound);
            let left_factor = dilog(&q, &source, DilogBase::Q, 0, bound)?;
            rhs = rhs.add(&left_factor.act(&sigma_part, &q)?)?;
            Ok(module_outcome(&lhs, &rhs))
        }
    }
}

fn torus_outcome(lhs: &TorusSeries, rhs: &TorusSeries) -> IdentityOutcome {
    let mut keys: Vec<DimVector> = lhs
        .terms()
        .map(|(d, _)| d.clone())
        .chain(rhs.terms().map(|(d, _)| d.clone()))
        .collect();
    keys.sort_by_key(|d| (d.total(), d.clone()));
    keys.dedup();
    for d in keys {
        let a = lhs.coeff(&d);
        let b = rhs.coeff(&d);
        if a != b {
            return IdentityOutcome {
                equal: false,
                first_difference: Some((d, render(&a), render(&b))),
            };
        }
    }
    IdentityOutcome {
        equal: true,
        first_difference: None,
    }
}

fn module_outcome(lhs: &ModuleSeries, rhs: &ModuleSeries) -> IdentityOutcome {
    match lhs.first_difference(rhs) {
        None => IdentityOutcome {
            equal: true,
            first_difference: None,
        },
        Some((d, a, b)) => IdentityOutcome {
            equal: false,
            first_difference: Some((d, render(&a), render(&b))),
        },
    }
}

fn render(s: &ScalarV) -> String {
    s.to_string()
}
