//! Quivers with involution and duality structure.
//!
//! A validated [`QuiverWithDuality`] carries the node/arrow involution, the
//! sign data `(s, tau)`, the derived partitions of nodes and arrows into
//! fixed/positive/negative parts, and all the bilinear and quadratic forms on
//! dimension vectors used downstream. Values are immutable after validation
//! and safe to share across threads.

use std::collections::BTreeMap;
use std::fmt;

use num::rational::Ratio;
use serde::{Deserialize, Serialize};

pub type Slope = Ratio<i64>;

/// Node-indexed nonnegative integers; components follow the declared node order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DimVector(Vec<u32>);

impl DimVector {
    pub fn zero(n: usize) -> Self {
        DimVector(vec![0; n])
    }

    pub fn new(components: Vec<u32>) -> Self {
        DimVector(components)
    }

    pub fn from_slice(components: &[u32]) -> Self {
        DimVector(components.to_vec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    /// Total dimension, the sum of all components.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        DimVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference; `None` if any component would go negative.
    pub fn checked_sub(&self, rhs: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&rhs.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(DimVector)
    }

    /// True when `self <= rhs` componentwise.
    pub fn le(&self, rhs: &Self) -> bool {
        self.0.iter().zip(&rhs.0).all(|(a, b)| a <= b)
    }

    /// True when the gcd of the components is 1.
    pub fn is_primitive(&self) -> bool {
        self.0.iter().fold(0u32, |g, &c| num::integer::gcd(g, c)) == 1
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// An integral stability parameter, one weight per node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Stability(Vec<i64>);

impl Stability {
    pub fn new(weights: Vec<i64>) -> Self {
        Stability(weights)
    }

    pub fn weights(&self) -> &[i64] {
        &self.0
    }

    pub fn pair(&self, d: &DimVector) -> i64 {
        self.0
            .iter()
            .zip(d.components())
            .map(|(&t, &c)| t * c as i64)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SlopeError {
    #[error("slope of the zero dimension vector is undefined")]
    ZeroDimVector,
}

/// `mu(d) = theta(d) / dim(d)` as an exact rational.
pub fn slope(theta: &Stability, d: &DimVector) -> Result<Slope, SlopeError> {
    if d.is_zero() {
        return Err(SlopeError::ZeroDimVector);
    }
    Ok(Slope::new(theta.pair(d), d.total() as i64))
}

/// Raw, unvalidated description of a quiver with involution and signs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct QuiverDescription {
    pub nodes: Vec<String>,
    pub arrows: Vec<ArrowDescription>,
    pub sigma_nodes: BTreeMap<String, String>,
    pub sigma_arrows: BTreeMap<String, String>,
    pub s: BTreeMap<String, i8>,
    pub tau: BTreeMap<String, i8>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ArrowDescription {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("duplicate identifier {0}")]
    DuplicateId(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("unknown arrow {0}")]
    UnknownArrow(String),
    #[error("sign for {0} must be +1 or -1")]
    BadSign(String),
    #[error("sigma is not involutive at {kind} {id}")]
    NonInvolutive { kind: &'static str, id: String },
    #[error("sigma({arrow}) = {image} does not run sigma(tgt) -> sigma(src)")]
    ArrowOrientationMismatch { arrow: String, image: String },
    #[error("arrow {0} runs i -> sigma(i) but is not fixed by sigma")]
    FixedArrowNotFixed(String),
    #[error("sign condition violated at {0}")]
    SignConditionViolated(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Part {
    Plus,
    Fixed,
    Minus,
}

#[derive(Clone, Debug)]
pub struct Arrow {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
}

/// A validated quiver with involution, duality structure and partitions.
#[derive(Clone, Debug)]
pub struct QuiverWithDuality {
    nodes: Vec<String>,
    arrows: Vec<Arrow>,
    sigma_nodes: Vec<usize>,
    sigma_arrows: Vec<usize>,
    s: Vec<i8>,
    tau: Vec<i8>,
    node_part: Vec<Part>,
    arrow_part: Vec<Part>,
    description: QuiverDescription,
}

impl QuiverWithDuality {
    /// Validate a raw description, reporting every violated condition.
    pub fn validate(desc: &QuiverDescription) -> Result<Self, Vec<ValidationError>> {
        let mut errors = Vec::new();

        let mut node_index = BTreeMap::new();
        for (i, n) in desc.nodes.iter().enumerate() {
            if node_index.insert(n.clone(), i).is_some() {
                errors.push(ValidationError::DuplicateId(n.clone()));
            }
        }
        let mut arrow_index = BTreeMap::new();
        for (i, a) in desc.arrows.iter().enumerate() {
            if arrow_index.insert(a.id.clone(), i).is_some() {
                errors.push(ValidationError::DuplicateId(a.id.clone()));
            }
        }

        let lookup_node = |id: &String, errors: &mut Vec<ValidationError>| -> Option<usize> {
            match node_index.get(id) {
                Some(&i) => Some(i),
                None => {
                    errors.push(ValidationError::UnknownNode(id.clone()));
                    None
                }
            }
        };

        let mut arrows = Vec::new();
        for a in &desc.arrows {
            let src = lookup_node(&a.src, &mut errors);
            let tgt = lookup_node(&a.tgt, &mut errors);
            if let (Some(src), Some(tgt)) = (src, tgt) {
                arrows.push(Arrow {
                    id: a.id.clone(),
                    src,
                    tgt,
                });
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }

        let mut sigma_nodes = vec![usize::MAX; desc.nodes.len()];
        for (i, n) in desc.nodes.iter().enumerate() {
            match desc.sigma_nodes.get(n) {
                Some(img) => {
                    if let Some(j) = lookup_node(img, &mut errors) {
                        sigma_nodes[i] = j;
                    }
                }
                None => errors.push(ValidationError::UnknownNode(format!(
                    "{n} (missing from sigma_nodes)"
                ))),
            }
        }
        let mut sigma_arrows = vec![usize::MAX; arrows.len()];
        for (i, a) in desc.arrows.iter().enumerate() {
            match desc.sigma_arrows.get(&a.id) {
                Some(img) => match arrow_index.get(img) {
                    Some(&j) => sigma_arrows[i] = j,
                    None => errors.push(ValidationError::UnknownArrow(img.clone())),
                },
                None => errors.push(ValidationError::UnknownArrow(format!(
                    "{} (missing from sigma_arrows)",
                    a.id
                ))),
            }
        }

        let mut s = vec![0i8; desc.nodes.len()];
        for (i, n) in desc.nodes.iter().enumerate() {
            match desc.s.get(n) {
                Some(&v) if v == 1 || v == -1 => s[i] = v,
                _ => errors.push(ValidationError::BadSign(format!("node {n}"))),
            }
        }
        let mut tau = vec![0i8; arrows.len()];
        for (i, a) in desc.arrows.iter().enumerate() {
            match desc.tau.get(&a.id) {
                Some(&v) if v == 1 || v == -1 => tau[i] = v,
                _ => errors.push(ValidationError::BadSign(format!("arrow {}", a.id))),
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }

        // Involutivity.
        for (i, n) in desc.nodes.iter().enumerate() {
            if sigma_nodes[sigma_nodes[i]] != i {
                errors.push(ValidationError::NonInvolutive {
                    kind: "node",
                    id: n.clone(),
                });
            }
        }
        for (i, a) in arrows.iter().enumerate() {
            if sigma_arrows[sigma_arrows[i]] != i {
                errors.push(ValidationError::NonInvolutive {
                    kind: "arrow",
                    id: a.id.clone(),
                });
            }
        }

        // An arrow i -> j must map to an arrow sigma(j) -> sigma(i).
        for (i, a) in arrows.iter().enumerate() {
            let img = &arrows[sigma_arrows[i]];
            if img.src != sigma_nodes[a.tgt] || img.tgt != sigma_nodes[a.src] {
                errors.push(ValidationError::ArrowOrientationMismatch {
                    arrow: a.id.clone(),
                    image: img.id.clone(),
                });
            }
        }

        // Arrows of the form i -> sigma(i) are fixed.
        for (i, a) in arrows.iter().enumerate() {
            if a.tgt == sigma_nodes[a.src] && sigma_arrows[i] != i {
                errors.push(ValidationError::FixedArrowNotFixed(a.id.clone()));
            }
        }

        // s is sigma-invariant; tau_a * tau_{sigma(a)} = s_i * s_j.
        for (i, n) in desc.nodes.iter().enumerate() {
            if s[sigma_nodes[i]] != s[i] {
                errors.push(ValidationError::SignConditionViolated(format!(
                    "s is not sigma-invariant at node {n}"
                )));
            }
        }
        for (i, a) in arrows.iter().enumerate() {
            if tau[i] * tau[sigma_arrows[i]] != s[a.src] * s[a.tgt] {
                errors.push(ValidationError::SignConditionViolated(format!(
                    "tau condition fails at arrow {}",
                    a.id
                )));
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }

        // Partitions. The positive member of each swapped pair is the one with
        // the lexicographically smaller identifier.
        let node_part = (0..desc.nodes.len())
            .map(|i| {
                let j = sigma_nodes[i];
                if i == j {
                    Part::Fixed
                } else if desc.nodes[i] < desc.nodes[j] {
                    Part::Plus
                } else {
                    Part::Minus
                }
            })
            .collect();
        let arrow_part = (0..arrows.len())
            .map(|i| {
                let j = sigma_arrows[i];
                if i == j {
                    Part::Fixed
                } else if arrows[i].id < arrows[j].id {
                    Part::Plus
                } else {
                    Part::Minus
                }
            })
            .collect();

        Ok(QuiverWithDuality {
            nodes: desc.nodes.clone(),
            arrows,
            sigma_nodes,
            sigma_arrows,
            s,
            tau,
            node_part,
            arrow_part,
            description: desc.clone(),
        })
    }

    pub fn description(&self) -> &QuiverDescription {
        &self.description
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == id)
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn sigma_node(&self, i: usize) -> usize {
        self.sigma_nodes[i]
    }

    pub fn sigma_arrow(&self, a: usize) -> usize {
        self.sigma_arrows[a]
    }

    pub fn s(&self, i: usize) -> i64 {
        self.s[i] as i64
    }

    pub fn tau(&self, a: usize) -> i64 {
        self.tau[a] as i64
    }

    pub fn node_part(&self, i: usize) -> Part {
        self.node_part[i]
    }

    pub fn arrow_part(&self, a: usize) -> Part {
        self.arrow_part[a]
    }

    pub fn fixed_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.node_part[i] == Part::Fixed)
    }

    pub fn plus_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.node_part[i] == Part::Plus)
    }

    fn fixed_arrows(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(|&a| self.arrow_part[a] == Part::Fixed)
    }

    fn plus_arrows(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(|&a| self.arrow_part[a] == Part::Plus)
    }

    /// The Euler form `chi(d, d') = sum_i d_i d'_i - sum_{i->j} d_i d'_j`.
    pub fn euler_form(&self, d: &DimVector, e: &DimVector) -> i64 {
        let nodes: i64 = d
            .components()
            .iter()
            .zip(e.components())
            .map(|(&a, &b)| a as i64 * b as i64)
            .sum();
        let arrows: i64 = self
            .arrows
            .iter()
            .map(|a| d.get(a.src) as i64 * e.get(a.tgt) as i64)
            .sum();
        nodes - arrows
    }

    /// The skew form `<d, d'> = chi(d, d') - chi(d', d)`.
    pub fn skew_form(&self, d: &DimVector, e: &DimVector) -> i64 {
        self.euler_form(d, e) - self.euler_form(e, d)
    }

    /// The image of `d` under the involution.
    pub fn sigma_dim(&self, d: &DimVector) -> DimVector {
        DimVector(
            (0..d.len())
                .map(|i| d.get(self.sigma_nodes[i]))
                .collect(),
        )
    }

    pub fn is_sigma_symmetric(&self, d: &DimVector) -> bool {
        (0..d.len()).all(|i| d.get(i) == d.get(self.sigma_nodes[i]))
    }

    /// `H(d) = d + sigma(d)`.
    pub fn hyperbolic_sum(&self, d: &DimVector) -> DimVector {
        d.add(&self.sigma_dim(d))
    }

    /// The self-dual Euler form `E(d)`, split as node sums plus arrow sums.
    pub fn sd_euler_parts(&self, d: &DimVector) -> (i64, i64) {
        let mut e0 = 0i64;
        for i in self.fixed_nodes() {
            let di = d.get(i) as i64;
            e0 += di * (di - self.s(i)) / 2;
        }
        for i in self.plus_nodes() {
            e0 += d.get(self.sigma_nodes[i]) as i64 * d.get(i) as i64;
        }
        let mut e1 = 0i64;
        for a in self.fixed_arrows() {
            // a fixed arrow runs sigma(i) -> i; the formula uses the target.
            let t = self.arrows[a].tgt;
            let dt = d.get(t) as i64;
            e1 -= dt * (dt + self.tau(a) * self.s(t)) / 2;
        }
        for a in self.plus_arrows() {
            let arr = &self.arrows[a];
            e1 -= d.get(self.sigma_nodes[arr.src]) as i64 * d.get(arr.tgt) as i64;
        }
        (e0, e1)
    }

    /// `E(d) = E0(d) + E1(d)`.
    pub fn sd_euler(&self, d: &DimVector) -> i64 {
        let (e0, e1) = self.sd_euler_parts(d);
        e0 + e1
    }

    /// `E~(d) = E(d) - E(sigma(d))`.
    pub fn sd_euler_skew(&self, d: &DimVector) -> i64 {
        self.sd_euler(d) - self.sd_euler(&self.sigma_dim(d))
    }

    /// `sigma^* theta = -theta`.
    pub fn is_sigma_compatible(&self, theta: &Stability) -> bool {
        (0..self.nodes.len()).all(|i| theta.weights()[self.sigma_nodes[i]] == -theta.weights()[i])
    }

    /// Sigma-symmetric with even components at symplectic fixed nodes.
    pub fn is_admissible_selfdual(&self, e: &DimVector) -> bool {
        self.is_sigma_symmetric(e)
            && self
                .fixed_nodes()
                .all(|i| self.s(i) == 1 || e.get(i).is_multiple_of(2))
    }

    /// All nonzero dimension vectors with total dimension at most `n`, in
    /// graded lexicographic order.
    pub fn enumerate_dimvectors(&self, n: u32) -> Vec<DimVector> {
        let mut out = Vec::new();
        for total in 1..=n {
            append_with_total(self.nodes.len(), total, &mut out);
        }
        out
    }

    /// All admissible sigma-symmetric vectors with total dimension at most
    /// `n`, including zero, in graded lexicographic order.
    pub fn enumerate_selfdual(&self, n: u32) -> Vec<DimVector> {
        let mut out = vec![DimVector::zero(self.nodes.len())];
        out.extend(
            self.enumerate_dimvectors(n)
                .into_iter()
                .filter(|e| self.is_admissible_selfdual(e)),
        );
        out
    }

    /// Classify the underlying graph and the involution orbits of components.
    pub fn finite_type(&self) -> FiniteTypeVerdict {
        finite_type(self)
    }
}

fn append_with_total(n_nodes: usize, total: u32, out: &mut Vec<DimVector>) {
    let mut current = vec![0u32; n_nodes];
    fn rec(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<DimVector>) {
        if pos + 1 == current.len() {
            current[pos] = remaining;
            out.push(DimVector(current.clone()));
            return;
        }
        for c in 0..=remaining {
            current[pos] = c;
            rec(current, pos + 1, remaining - c, out);
        }
    }
    if n_nodes == 0 {
        return;
    }
    rec(&mut current, 0, total, out);
}

/// Shape of one sigma-orbit of connected components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum OrbitClass {
    /// A single component preserved by sigma; a type-A path with the flip.
    TypeAWithFlip { nodes: Vec<String> },
    /// Two components exchanged by sigma (a quiver next to its opposite).
    OppositePair { nodes: Vec<String> },
    /// A sigma-stable component that is not a path (not one of the two
    /// standard finite-type shapes).
    Other { nodes: Vec<String> },
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteTypeVerdict {
    /// Whether the underlying undirected graph is a disjoint union of ADE
    /// diagrams.
    pub finite_type: bool,
    pub orbit_classes: Vec<OrbitClass>,
}

fn finite_type(q: &QuiverWithDuality) -> FiniteTypeVerdict {
    let n = q.node_count();
    let mut component = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![start];
        let mut members = Vec::new();
        component[start] = id;
        while let Some(i) = stack.pop() {
            members.push(i);
            for a in q.arrows() {
                for (x, y) in [(a.src, a.tgt), (a.tgt, a.src)] {
                    if x == i && component[y] == usize::MAX {
                        component[y] = id;
                        stack.push(y);
                    }
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }

    let mut finite = true;
    let mut is_path = vec![false; comps.len()];
    for (c, members) in comps.iter().enumerate() {
        let mut degree = vec![0usize; n];
        let mut edges = 0usize;
        let mut simple = true;
        let mut seen_pairs = std::collections::BTreeSet::new();
        for a in q.arrows() {
            if component[a.src] != c {
                continue;
            }
            edges += 1;
            degree[a.src] += 1;
            degree[a.tgt] += 1;
            if a.src == a.tgt || !seen_pairs.insert((a.src.min(a.tgt), a.src.max(a.tgt))) {
                simple = false;
            }
        }
        let tree = simple && edges + 1 == members.len();
        let ade = tree && {
            let degs: Vec<usize> = members.iter().map(|&i| degree[i]).collect();
            let branch = degs.iter().filter(|&&d| d >= 3).count();
            let max_deg = degs.iter().copied().max().unwrap_or(0);
            if max_deg <= 2 {
                is_path[c] = true;
                true
            } else if branch == 1 && max_deg == 3 {
                // Arm lengths from the branch node; D_n or E_6/7/8.
                let center = members[degs.iter().position(|&d| d == 3).unwrap()];
                let mut arms = arm_lengths(q, &component, c, center);
                arms.sort_unstable();
                matches!(arms.as_slice(), [1, 1, _] | [1, 2, 2] | [1, 2, 3] | [1, 2, 4])
            } else {
                false
            }
        };
        if !ade {
            finite = false;
        }
    }

    let mut seen = vec![false; comps.len()];
    let mut orbit_classes = Vec::new();
    for (c, members) in comps.iter().enumerate() {
        if seen[c] {
            continue;
        }
        seen[c] = true;
        let partner = component[q.sigma_node(members[0])];
        let names = |m: &[usize]| m.iter().map(|&i| q.node_ids()[i].clone()).collect();
        if partner == c {
            if is_path[c] {
                orbit_classes.push(OrbitClass::TypeAWithFlip {
                    nodes: names(members),
                });
            } else {
                orbit_classes.push(OrbitClass::Other {
                    nodes: names(members),
                });
            }
        } else {
            seen[partner] = true;
            let mut all = members.clone();
            all.extend_from_slice(&comps[partner]);
            orbit_classes.push(OrbitClass::OppositePair { nodes: names(&all) });
        }
    }

    FiniteTypeVerdict {
        finite_type: finite,
        orbit_classes,
    }
}

fn arm_lengths(
    q: &QuiverWithDuality,
    component: &[usize],
    c: usize,
    center: usize,
) -> Vec<usize> {
    let neighbors = |i: usize| -> Vec<usize> {
        let mut out = Vec::new();
        for a in q.arrows() {
            if component[a.src] != c {
                continue;
            }
            if a.src == i {
                out.push(a.tgt);
            }
            if a.tgt == i {
                out.push(a.src);
            }
        }
        out
    };
    let mut arms = Vec::new();
    for first in neighbors(center) {
        let mut len = 1;
        let mut prev = center;
        let mut cur = first;
        loop {
            let next: Vec<usize> = neighbors(cur).into_iter().filter(|&x| x != prev).collect();
            match next.as_slice() {
                [only] => {
                    prev = cur;
                    cur = *only;
                    len += 1;
                }
                [] => break,
                _ => break, // another branch node; not ADE, caller rejects via arm test
            }
        }
        arms.push(len);
    }
    arms
}


#[cfg(test)]
mod tests {
    use super::test_quivers::*;
    use super::*;

    fn dv(c: &[u32]) -> DimVector {
        DimVector::from_slice(c)
    }

    #[test]
    fn a2_validates_with_expected_partitions() {
        let q = a2(1, 1);
        assert!(q.fixed_nodes().next().is_none());
        assert_eq!(q.node_part(0), Part::Plus); // "-1" < "1"
        assert_eq!(q.node_part(1), Part::Minus);
        assert_eq!(q.arrow_part(0), Part::Fixed);
        // Both tau signs are valid since tau^2 = 1 = s_i s_j.
        let _ = a2(1, -1);
        let _ = a2(-1, 1);
        let _ = a2(-1, -1);
    }

    #[test]
    fn identity_involution_on_a2_is_rejected() {
        let mut desc = a2(1, 1).description().clone();
        desc.sigma_nodes = [("-1", "-1"), ("1", "1")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let errs = QuiverWithDuality::validate(&desc).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, ValidationError::ArrowOrientationMismatch { .. })));
    }

    #[test]
    fn euler_and_skew_forms() {
        let q = a2(1, 1);
        assert_eq!(q.euler_form(&dv(&[1, 0]), &dv(&[0, 1])), -1);
        assert_eq!(q.euler_form(&dv(&[2, 3]), &dv(&[0, 0])), 0);
        assert_eq!(q.skew_form(&dv(&[2, 3]), &dv(&[2, 3])), 0);
        let k3 = kronecker(3, -1, -1);
        assert_eq!(k3.euler_form(&dv(&[1, 0]), &dv(&[0, 1])), -3);
    }

    #[test]
    fn sd_euler_values() {
        for n in 1..=4 {
            let k = kronecker_symplectic(n);
            assert_eq!(k.sd_euler(&dv(&[1, 1])), 1 - n as i64);
        }
        let k2 = kronecker_symplectic(2);
        assert_eq!(k2.sd_euler(&dv(&[2, 2])), -2);
        assert_eq!(k2.sd_euler(&dv(&[0, 0])), 0);

        let sp = a2_symplectic();
        assert_eq!(sp.sd_euler(&dv(&[0, 1])), -1);
        assert_eq!(sp.sd_euler(&dv(&[1, 0])), 0);
        assert_eq!(sp.sd_euler_skew(&dv(&[1, 0])), 1);
        assert_eq!(sp.sd_euler_skew(&dv(&[1, 1])), 0);
    }

    #[test]
    fn sd_euler_point_count_split() {
        // -E1 counts the free structure-map parameters.
        let k2 = kronecker_symplectic(2);
        let (_, e1) = k2.sd_euler_parts(&dv(&[1, 1]));
        assert_eq!(e1, -2);
        let (_, e1) = k2.sd_euler_parts(&dv(&[2, 2]));
        assert_eq!(e1, -6);
    }

    #[test]
    fn hyperbolic_sum_values() {
        let q = a2(1, 1);
        assert_eq!(q.hyperbolic_sum(&dv(&[1, 0])), dv(&[1, 1]));
        assert_eq!(q.hyperbolic_sum(&dv(&[0, 0])), dv(&[0, 0]));
        assert_eq!(q.hyperbolic_sum(&dv(&[2, 2])), dv(&[4, 4]));
    }

    #[test]
    fn sigma_compatibility_and_slopes() {
        let q = a2(1, 1);
        let plus = Stability::new(vec![1, -1]);
        let bad = Stability::new(vec![1, 1]);
        assert!(q.is_sigma_compatible(&plus));
        assert!(!q.is_sigma_compatible(&bad));
        assert_eq!(slope(&plus, &dv(&[1, 0])).unwrap(), Slope::new(1, 1));
        assert_eq!(slope(&plus, &dv(&[1, 1])).unwrap(), Slope::new(0, 1));
        assert_eq!(slope(&plus, &dv(&[0, 0])), Err(SlopeError::ZeroDimVector));
        let k2 = kronecker(2, -1, -1);
        let th = Stability::new(vec![2, -2]);
        assert_eq!(slope(&th, &dv(&[1, 0])).unwrap(), Slope::new(2, 1));
        assert_eq!(slope(&th, &dv(&[2, 1])).unwrap(), Slope::new(2, 3));
        let _ = k2;
    }

    #[test]
    fn admissibility() {
        let k = kronecker_symplectic(3);
        assert!(k.is_admissible_selfdual(&dv(&[1, 1])));
        assert!(!k.is_admissible_selfdual(&dv(&[1, 0])));
        let l = loop_quiver(-1, 1);
        assert!(!l.is_admissible_selfdual(&dv(&[3])));
        assert!(l.is_admissible_selfdual(&dv(&[2])));
        let l2 = loop_quiver(1, 1);
        assert!(l2.is_admissible_selfdual(&dv(&[3])));
    }

    #[test]
    fn enumeration_orders() {
        let q = a2(1, 1);
        let all: Vec<DimVector> = q.enumerate_dimvectors(2);
        assert_eq!(
            all,
            vec![dv(&[0, 1]), dv(&[1, 0]), dv(&[0, 2]), dv(&[1, 1]), dv(&[2, 0])]
        );
        let sd = q.enumerate_selfdual(2);
        assert_eq!(sd, vec![dv(&[0, 0]), dv(&[1, 1])]);
        assert!(q.enumerate_dimvectors(0).is_empty());
        assert_eq!(q.enumerate_selfdual(0), vec![dv(&[0, 0])]);
    }

    #[test]
    fn enumeration_complete_against_composition_count() {
        let q = a4(1);
        let all = q.enumerate_dimvectors(5);
        // number of compositions of t into 4 nonnegative parts
        let comp = |t: u32| -> usize {
            let t = t as usize;
            (t + 1) * (t + 2) * (t + 3) / 6
        };
        let expected: usize = (1..=5).map(comp).sum();
        assert_eq!(all.len(), expected);
        let mut sorted = all.clone();
        sorted.sort_by_key(|d| (d.total(), d.clone()));
        sorted.dedup();
        assert_eq!(all, sorted);
    }

    #[test]
    fn finite_type_classification() {
        let v = a2(1, 1).finite_type();
        assert!(v.finite_type);
        assert!(matches!(
            v.orbit_classes.as_slice(),
            [OrbitClass::TypeAWithFlip { .. }]
        ));
        let v = kronecker(3, -1, -1).finite_type();
        assert!(!v.finite_type);
        let v = a4(1).finite_type();
        assert!(v.finite_type);
    }

    #[test]
    fn forms_respect_involution_symmetry() {
        // chi(sigma a, sigma b) = chi(b, a) and the E additivity identity.
        for q in [a2_symplectic(), a2_orthogonal(), kronecker_symplectic(2), a4(-1)] {
            for a in q.enumerate_dimvectors(4) {
                for b in q.enumerate_dimvectors(4) {
                    assert_eq!(
                        q.euler_form(&q.sigma_dim(&a), &q.sigma_dim(&b)),
                        q.euler_form(&b, &a)
                    );
                    assert_eq!(
                        q.sd_euler(&a.add(&b)),
                        q.sd_euler(&a) + q.sd_euler(&b) + q.euler_form(&q.sigma_dim(&a), &b)
                    );
                }
                assert_eq!(q.sd_euler_skew(&q.sigma_dim(&a)), -q.sd_euler_skew(&a));
                if q.is_sigma_symmetric(&a) {
                    assert_eq!(q.sd_euler_skew(&a), 0);
                }
            }
        }
    }

    #[test]
    fn sd_euler_is_independent_of_plus_minus_convention() {
        // Relabel A4 so the lexicographically smaller member of every swapped
        // node and arrow pair lands on the other side. The indexed structure
        // (arrows between indices, sigma on indices) is unchanged, only the
        // Plus/Minus partition flips, so E(d) must agree on raw index vectors.
        let q = a4(-1);
        let rename = |s: &str| -> String {
            match s {
                "-2" => "2",
                "2" => "-2",
                "-1" => "1",
                "1" => "-1",
                "b" => "c",
                "c" => "b",
                other => other,
            }
            .to_string()
        };
        let d0 = q.description();
        let desc = QuiverDescription {
            nodes: d0.nodes.iter().map(|n| rename(n)).collect(),
            arrows: d0
                .arrows
                .iter()
                .map(|a| ArrowDescription {
                    id: rename(&a.id),
                    src: rename(&a.src),
                    tgt: rename(&a.tgt),
                })
                .collect(),
            sigma_nodes: d0
                .sigma_nodes
                .iter()
                .map(|(k, v)| (rename(k), rename(v)))
                .collect(),
            sigma_arrows: d0
                .sigma_arrows
                .iter()
                .map(|(k, v)| (rename(k), rename(v)))
                .collect(),
            s: d0.s.iter().map(|(k, &v)| (rename(k), v)).collect(),
            tau: d0.tau.iter().map(|(k, &v)| (rename(k), v)).collect(),
        };
        let q2 = QuiverWithDuality::validate(&desc).unwrap();
        assert_ne!(q.node_part(0), q2.node_part(0));
        for d in q.enumerate_dimvectors(4) {
            assert_eq!(q.sd_euler(&d), q2.sd_euler(&d));
            assert_eq!(q.sd_euler_skew(&d), q2.sd_euler_skew(&d));
        }
    }

    #[test]
    fn slope_scale_invariance_and_symmetric_kernel() {
        // Positive rescaling of theta preserves every slope comparison, and a
        // sigma-compatible theta vanishes on all hyperbolic sums.
        let q = a4(1);
        let th = Stability::new(vec![2, 1, -1, -2]);
        let th3 = Stability::new(vec![6, 3, -3, -6]);
        let dims = q.enumerate_dimvectors(4);
        for d in &dims {
            for e in &dims {
                let (a, b) = (slope(&th, d).unwrap(), slope(&th, e).unwrap());
                let (a3, b3) = (slope(&th3, d).unwrap(), slope(&th3, e).unwrap());
                assert_eq!(a.cmp(&b), a3.cmp(&b3));
            }
            assert_eq!(th.pair(&q.hyperbolic_sum(d)), 0);
        }
    }
}
