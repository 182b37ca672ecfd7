//! Ready-made quivers with involution used by the identity commands, the
//! test suite and the shipped example configurations.

use std::collections::BTreeMap;

use crate::quiver::{ArrowDescription, QuiverDescription, QuiverWithDuality};

fn constant<K: Ord + Clone>(keys: &[K], val: i8) -> BTreeMap<K, i8> {
    keys.iter().map(|k| (k.clone(), val)).collect()
}

/// The A2 quiver `-1 -> 1` with the flip involution fixing the arrow.
/// `s = -1, tau = -1` is the symplectic duality (symmetric middle map),
/// `s = +1, tau = -1` the orthogonal one (skew middle map).
pub fn a2_with_flip(s: i8, tau: i8) -> QuiverDescription {
    QuiverDescription {
        nodes: vec!["-1".into(), "1".into()],
        arrows: vec![ArrowDescription {
            id: "a".into(),
            src: "-1".into(),
            tgt: "1".into(),
        }],
        sigma_nodes: [("-1", "1"), ("1", "-1")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        sigma_arrows: [("a", "a")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        s: constant(&["-1".to_string(), "1".to_string()], s),
        tau: constant(&["a".to_string()], tau),
    }
}

/// The n-Kronecker quiver with the node swap fixing every arrow.
pub fn kronecker_with_swap(n: usize, s: i8, tau: i8) -> QuiverDescription {
    let arrows: Vec<ArrowDescription> = (0..n)
        .map(|k| ArrowDescription {
            id: format!("a{k}"),
            src: "-1".into(),
            tgt: "1".into(),
        })
        .collect();
    QuiverDescription {
        nodes: vec!["-1".into(), "1".into()],
        arrows: arrows.clone(),
        sigma_nodes: [("-1", "1"), ("1", "-1")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        sigma_arrows: arrows.iter().map(|a| (a.id.clone(), a.id.clone())).collect(),
        s: constant(&["-1".to_string(), "1".to_string()], s),
        tau: arrows.iter().map(|a| (a.id.clone(), tau)).collect(),
    }
}

/// The equioriented A4 chain `-2 -> -1 -> 1 -> 2` with the flip involution.
pub fn a4_with_flip(s: i8) -> QuiverDescription {
    QuiverDescription {
        nodes: vec!["-2".into(), "-1".into(), "1".into(), "2".into()],
        arrows: vec![
            ArrowDescription {
                id: "b".into(),
                src: "-2".into(),
                tgt: "-1".into(),
            },
            ArrowDescription {
                id: "a".into(),
                src: "-1".into(),
                tgt: "1".into(),
            },
            ArrowDescription {
                id: "c".into(),
                src: "1".into(),
                tgt: "2".into(),
            },
        ],
        sigma_nodes: [("-2", "2"), ("2", "-2"), ("-1", "1"), ("1", "-1")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        sigma_arrows: [("b", "c"), ("c", "b"), ("a", "a")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        s: constant(
            &[
                "-2".to_string(),
                "-1".to_string(),
                "1".to_string(),
                "2".to_string(),
            ],
            s,
        ),
        tau: constant(
            &["a".to_string(), "b".to_string(), "c".to_string()],
            -1,
        ),
    }
}

/// Validate a preset (presets are valid by construction).
pub fn build(desc: &QuiverDescription) -> QuiverWithDuality {
    QuiverWithDuality::validate(desc).expect("preset quivers are valid")
}
