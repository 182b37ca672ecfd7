//! Brute-force ground truth over small prime fields.
//!
//! Enumerates (self-dual) representation points, tests semistability by full
//! graded-subspace search, computes exact stack counts and isometry-class
//! censuses by direct group action, and verifies the integration-map identity
//! by enumerating isotropic subrepresentations.
//!
//! Gram conventions, fixed once: orthogonal fixed nodes use the identity
//! matrix for discriminant label +1 and one diagonal entry replaced by a
//! non-residue for label -1; symplectic fixed nodes use the standard skew
//! form; swapped pairs use the canonical hyperbolic pairing. Any valid choice
//! yields the same counts (asserted in tests for an alternate choice).
//!
//! Every cap is a configuration value; exceeding one is an error, never a
//! silent truncation.

pub mod matrix;

use std::collections::{BTreeMap, HashMap, HashSet};

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quiver::{DimVector, QuiverWithDuality, Slope, Stability};
use matrix::{enumerate_subspaces, mod_pow, subspace_count, FpMat};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("enumeration needs {required} items, cap is {cap}")]
    CapExceeded { required: u128, cap: u64 },
    #[error("symplectic form requires even dimension, got {0}")]
    OddSymplecticDimension(u32),
    #[error("stability is not sigma-compatible")]
    NotSigmaCompatible,
    #[error("{0} is not an odd prime within the configured cap")]
    BadPrime(u64),
    #[error("dimension vector {0} is not an admissible self-dual class")]
    Inadmissible(DimVector),
}

/// Enumeration caps with conservative defaults.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Caps {
    pub point_cap: u64,
    pub group_cap: u64,
    pub subspace_cap: u64,
    pub prime_cap: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            point_cap: 10_000_000,
            group_cap: 1_000_000,
            subspace_cap: 1_000_000,
            prime_cap: 13,
        }
    }
}

/// An odd prime field with a chosen quadratic non-residue.
#[derive(Clone, Debug)]
pub struct PrimeField {
    pub p: u64,
    pub nonresidue: u64,
}

impl PrimeField {
    pub fn new(p: u64, cap: u64) -> Result<Self, OracleError> {
        if p < 3 || p > cap || !is_prime(p) {
            return Err(OracleError::BadPrime(p));
        }
        let nonresidue = (2..p)
            .find(|&x| mod_pow(x, (p - 1) / 2, p) != 1)
            .expect("odd prime has a non-residue");
        Ok(PrimeField { p, nonresidue })
    }

    fn is_square(&self, x: u64) -> bool {
        x.is_multiple_of(self.p) || mod_pow(x, (self.p - 1) / 2, self.p) == 1
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// One representation point: one matrix per arrow.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FqPoint {
    pub mats: Vec<FpMat>,
}

/// Gram data for a fixed dimension vector: discriminant labels at orthogonal
/// fixed nodes plus the pairing block of every node.
#[derive(Clone, Debug)]
pub struct GramChoice {
    /// Discriminant label per orthogonal fixed node with nonzero dimension
    /// (+1 identity, -1 one non-residue diagonal entry).
    pub eps: BTreeMap<usize, i8>,
    /// `blocks[i]` pairs `M_i` with `M_{sigma(i)}`.
    pub blocks: Vec<FpMat>,
}

pub struct OracleCtx<'q> {
    pub quiver: &'q QuiverWithDuality,
    pub field: PrimeField,
    pub caps: Caps,
}

impl<'q> OracleCtx<'q> {
    pub fn new(quiver: &'q QuiverWithDuality, p: u64, caps: Caps) -> Result<Self, OracleError> {
        let field = PrimeField::new(p, caps.prime_cap)?;
        Ok(OracleCtx {
            quiver,
            field,
            caps,
        })
    }

    // ---------------- group orders ----------------

    /// `#GL_d(F_p)` as a product over nodes.
    pub fn gl_order(&self, d: &DimVector) -> BigUint {
        d.components()
            .iter()
            .map(|&n| gl_order(n, self.field.p))
            .product()
    }

    /// `#G^{sigma,eps}_e(F_p)` for the sector described by a Gram choice.
    pub fn selfdual_group_order(
        &self,
        e: &DimVector,
        gram: &GramChoice,
    ) -> Result<BigUint, OracleError> {
        let q = self.quiver;
        let mut order = BigUint::one();
        for i in q.plus_nodes() {
            order *= gl_order(e.get(i), self.field.p);
        }
        for i in q.fixed_nodes() {
            let n = e.get(i);
            if q.s(i) == -1 {
                order *= symplectic_order(n, self.field.p)?;
            } else {
                order *= self.orthogonal_order_of_gram(&gram.blocks[i]);
            }
        }
        Ok(order)
    }

    /// Order of the orthogonal group of a concrete nondegenerate symmetric
    /// Gram matrix, reading off the split type from the discriminant.
    fn orthogonal_order_of_gram(&self, b: &FpMat) -> BigUint {
        let n = b.rows as u32;
        if n == 0 {
            return BigUint::one();
        }
        if n % 2 == 1 {
            return orthogonal_odd_order(n, self.field.p);
        }
        let m = n / 2;
        // split iff (-1)^m det(B) is a square
        let det = det_mod(b);
        let sign = if m % 2 == 1 { self.field.p - 1 } else { 1 };
        let eps = if self.field.is_square(sign * det % self.field.p) {
            1
        } else {
            -1
        };
        orthogonal_even_order(n, eps, self.field.p)
    }

    // ---------------- Gram choices ----------------

    /// All Gram choices for an admissible `e`: one per assignment of
    /// discriminants at orthogonal fixed nodes with nonzero dimension.
    pub fn gram_choices(&self, e: &DimVector) -> Result<Vec<GramChoice>, OracleError> {
        let q = self.quiver;
        if !q.is_admissible_selfdual(e) {
            return Err(OracleError::Inadmissible(e.clone()));
        }
        let p = self.field.p;
        let orth_nodes: Vec<usize> = q
            .fixed_nodes()
            .filter(|&i| q.s(i) == 1 && e.get(i) > 0)
            .collect();
        let mut out = Vec::new();
        for mask in 0..(1u32 << orth_nodes.len()) {
            let mut eps = BTreeMap::new();
            for (k, &i) in orth_nodes.iter().enumerate() {
                eps.insert(i, if mask >> k & 1 == 0 { 1i8 } else { -1 });
            }
            let mut blocks = Vec::new();
            for i in 0..q.node_count() {
                let n = e.get(i) as usize;
                let si = q.sigma_node(i);
                let block = if i == si {
                    if q.s(i) == 1 {
                        let mut b = FpMat::identity(n, p);
                        if eps.get(&i) == Some(&-1) {
                            b.set(0, 0, self.field.nonresidue);
                        }
                        b
                    } else {
                        // standard symplectic form on even dimension
                        let m = n / 2;
                        let mut b = FpMat::zero(n, n, p);
                        for k in 0..m {
                            b.set(k, m + k, 1);
                            b.set(m + k, k, p - 1);
                        }
                        b
                    }
                } else {
                    // hyperbolic pairing: B_i = I on the positive side,
                    // B_{sigma(i)} = s_i * I on the other.
                    match q.node_part(i) {
                        crate::quiver::Part::Plus => FpMat::identity(n, p),
                        _ => {
                            let b = FpMat::identity(n, p);
                            if q.s(i) == 1 {
                                b
                            } else {
                                b.neg()
                            }
                        }
                    }
                };
                blocks.push(block);
            }
            out.push(GramChoice { eps, blocks });
        }
        Ok(out)
    }

    // ---------------- point enumeration ----------------

    fn arrow_shape(&self, a: usize, d: &DimVector) -> (usize, usize) {
        let arr = &self.quiver.arrows()[a];
        (d.get(arr.tgt) as usize, d.get(arr.src) as usize)
    }

    /// Stream every representation point of dimension vector `d`.
    pub fn for_each_point<F: FnMut(&FqPoint)>(
        &self,
        d: &DimVector,
        mut f: F,
    ) -> Result<(), OracleError> {
        let p = self.field.p;
        let shapes: Vec<(usize, usize)> = (0..self.quiver.arrows().len())
            .map(|a| self.arrow_shape(a, d))
            .collect();
        let slots: usize = shapes.iter().map(|(r, c)| r * c).sum();
        self.check_point_cap(slots)?;
        let mut values = vec![0u64; slots];
        loop {
            let mut mats = Vec::with_capacity(shapes.len());
            let mut k = 0;
            for &(r, c) in &shapes {
                let mut m = FpMat::zero(r, c, p);
                for i in 0..r {
                    for j in 0..c {
                        m.set(i, j, values[k]);
                        k += 1;
                    }
                }
                mats.push(m);
            }
            f(&FqPoint { mats });
            if !advance(&mut values, p) {
                break;
            }
        }
        Ok(())
    }

    fn check_point_cap(&self, slots: usize) -> Result<(), OracleError> {
        let required = (self.field.p as u128).checked_pow(slots as u32);
        match required {
            Some(r) if r <= self.caps.point_cap as u128 => Ok(()),
            Some(r) => Err(OracleError::CapExceeded {
                required: r,
                cap: self.caps.point_cap,
            }),
            None => Err(OracleError::CapExceeded {
                required: u128::MAX,
                cap: self.caps.point_cap,
            }),
        }
    }

    /// Free parameter slots of the self-dual point space `R^{sigma,eps}_e`:
    /// full matrices on positive arrows, and the independent entries of an
    /// `s_i tau_a`-symmetric bilinear block on fixed arrows.
    fn selfdual_slots(&self, e: &DimVector) -> Vec<SelfDualSlot> {
        let q = self.quiver;
        let mut out = Vec::new();
        for (a, arr) in q.arrows().iter().enumerate() {
            match q.arrow_part(a) {
                crate::quiver::Part::Plus => {
                    let (r, c) = self.arrow_shape(a, e);
                    for i in 0..r {
                        for j in 0..c {
                            out.push(SelfDualSlot::Full { arrow: a, i, j });
                        }
                    }
                }
                crate::quiver::Part::Fixed => {
                    let n = e.get(arr.src) as usize;
                    let sym = q.s(arr.src) * q.tau(a) == 1;
                    for i in 0..n {
                        for j in 0..n {
                            if (sym && j >= i) || (!sym && j > i) {
                                out.push(SelfDualSlot::Bilinear { arrow: a, i, j, sym });
                            }
                        }
                    }
                }
                crate::quiver::Part::Minus => {}
            }
        }
        out
    }

    /// Materialize the point determined by an assignment of free slots.
    fn selfdual_point(
        &self,
        e: &DimVector,
        gram: &GramChoice,
        slots: &[SelfDualSlot],
        values: &[u64],
        binv: &[Option<FpMat>],
    ) -> FqPoint {
        let q = self.quiver;
        let p = self.field.p;
        let mut mats: Vec<FpMat> = (0..q.arrows().len())
            .map(|a| {
                let (r, c) = self.arrow_shape(a, e);
                FpMat::zero(r, c, p)
            })
            .collect();
        // fill bilinear blocks C first
        let mut bil: HashMap<usize, FpMat> = HashMap::new();
        for (slot, &val) in slots.iter().zip(values) {
            match *slot {
                SelfDualSlot::Full { arrow, i, j } => {
                    mats[arrow].set(i, j, val);
                }
                SelfDualSlot::Bilinear { arrow, i, j, sym } => {
                    let n = e.get(q.arrows()[arrow].src) as usize;
                    let c = bil.entry(arrow).or_insert_with(|| FpMat::zero(n, n, p));
                    c.set(i, j, val);
                    if i != j {
                        let mirror = if sym { val } else { (p - val) % p };
                        c.set(j, i, mirror);
                    }
                }
            }
        }
        // fixed arrows: A = B_u^{-1} C
        for (a, arr) in q.arrows().iter().enumerate() {
            if q.arrow_part(a) == crate::quiver::Part::Fixed {
                let n = e.get(arr.src) as usize;
                let c = bil.remove(&a).unwrap_or_else(|| FpMat::zero(n, n, p));
                let bu = binv[arr.src].as_ref().expect("invertible gram block");
                mats[a] = bu.mul(&c);
            }
        }
        // negative arrows: determined by the positive partner
        for (a, arr) in q.arrows().iter().enumerate() {
            if q.arrow_part(a) == crate::quiver::Part::Plus {
                let sa = q.sigma_arrow(a);
                let bi = binv[arr.src].as_ref().expect("invertible gram block");
                let bj = &gram.blocks[arr.tgt];
                let mut m = bi.mul(&mats[a].transpose()).mul(bj);
                if q.tau(a) == -1 {
                    m = m.neg();
                }
                mats[sa] = m;
            }
        }
        FqPoint { mats }
    }

    fn gram_inverses(&self, gram: &GramChoice) -> Vec<Option<FpMat>> {
        gram.blocks.iter().map(|b| b.inverse()).collect()
    }

    /// Stream every self-dual point of the sector `(e, gram)`.
    pub fn for_each_selfdual_point<F: FnMut(&FqPoint)>(
        &self,
        e: &DimVector,
        gram: &GramChoice,
        mut f: F,
    ) -> Result<(), OracleError> {
        if !self.quiver.is_admissible_selfdual(e) {
            return Err(OracleError::Inadmissible(e.clone()));
        }
        let slots = self.selfdual_slots(e);
        self.check_point_cap(slots.len())?;
        let binv = self.gram_inverses(gram);
        let mut values = vec![0u64; slots.len()];
        loop {
            f(&self.selfdual_point(e, gram, &slots, &values, &binv));
            if !advance(&mut values, self.field.p) {
                break;
            }
        }
        Ok(())
    }

    /// Collect the full self-dual point list of one sector.
    pub fn selfdual_points(
        &self,
        e: &DimVector,
        gram: &GramChoice,
    ) -> Result<Vec<FqPoint>, OracleError> {
        let mut out = Vec::new();
        self.for_each_selfdual_point(e, gram, |pt| out.push(pt.clone()))?;
        Ok(out)
    }

    // ---------------- semistability ----------------

    pub(crate) fn subspace_tables(&self, d: &DimVector) -> Result<Vec<Vec<FpMat>>, OracleError> {
        let mut product: u128 = 1;
        for &n in d.components() {
            product = product.saturating_mul(subspace_count(n as usize, self.field.p) as u128);
        }
        if product > self.caps.subspace_cap as u128 {
            return Err(OracleError::CapExceeded {
                required: product,
                cap: self.caps.subspace_cap,
            });
        }
        Ok(d.components()
            .iter()
            .map(|&n| enumerate_subspaces(n as usize, self.field.p))
            .collect())
    }

    /// King semistability by exhausting graded subrepresentations.
    pub fn is_semistable(
        &self,
        theta: &Stability,
        d: &DimVector,
        point: &FqPoint,
    ) -> Result<bool, OracleError> {
        let tables = self.subspace_tables(d)?;
        Ok(self.semistable_with_tables(theta, d, point, &tables, None))
    }

    /// Semistability testing only isotropic subrepresentations of a self-dual
    /// point (sigma-semistability before reduction).
    pub fn is_sigma_semistable_isotropic(
        &self,
        theta: &Stability,
        e: &DimVector,
        point: &FqPoint,
        gram: &GramChoice,
    ) -> Result<bool, OracleError> {
        let tables = self.subspace_tables(e)?;
        Ok(self.semistable_with_tables(theta, e, point, &tables, Some(gram)))
    }

    pub(crate) fn semistable_with_tables(
        &self,
        theta: &Stability,
        d: &DimVector,
        point: &FqPoint,
        tables: &[Vec<FpMat>],
        isotropic_only: Option<&GramChoice>,
    ) -> bool {
        let q = self.quiver;
        let total_slope = Slope::new(theta.pair(d), d.total().max(1) as i64);
        let n_nodes = q.node_count();
        let mut choice = vec![0usize; n_nodes];
        'outer: loop {
            let dims: Vec<usize> = (0..n_nodes).map(|i| tables[i][choice[i]].rows).collect();
            let total: usize = dims.iter().sum();
            if total > 0 && total < d.total() as usize {
                let weight: i64 = (0..n_nodes)
                    .map(|i| theta.weights()[i] * dims[i] as i64)
                    .sum();
                let sub_slope = Slope::new(weight, total as i64);
                if sub_slope > total_slope
                    && self.is_subrep(point, tables, &choice)
                    && isotropic_only.is_none_or(|g| self.is_isotropic(tables, &choice, g))
                {
                    return false;
                }
            }
            // advance the per-node subspace odometer
            for i in 0..n_nodes {
                choice[i] += 1;
                if choice[i] < tables[i].len() {
                    continue 'outer;
                }
                choice[i] = 0;
            }
            break;
        }
        true
    }

    fn is_subrep(&self, point: &FqPoint, tables: &[Vec<FpMat>], choice: &[usize]) -> bool {
        let q = self.quiver;
        for (a, arr) in q.arrows().iter().enumerate() {
            let usrc = &tables[arr.src][choice[arr.src]];
            let utgt = &tables[arr.tgt][choice[arr.tgt]];
            for r in 0..usrc.rows {
                let v: Vec<u64> = (0..usrc.cols).map(|j| usrc.get(r, j)).collect();
                let image = apply_matrix(&point.mats[a], &v, self.field.p);
                if !utgt.row_space_contains(&image) {
                    return false;
                }
            }
        }
        true
    }

    fn is_isotropic(&self, tables: &[Vec<FpMat>], choice: &[usize], gram: &GramChoice) -> bool {
        let q = self.quiver;
        for u in 0..q.node_count() {
            let su = q.sigma_node(u);
            let a = &tables[u][choice[u]];
            let b = &tables[su][choice[su]];
            if a.rows == 0 || b.rows == 0 {
                continue;
            }
            let pairing = a.mul(&gram.blocks[u]).mul(&b.transpose());
            if !pairing.is_zero() {
                return false;
            }
        }
        true
    }

    // ---------------- stack counts ----------------

    /// Count semistable points; deterministic whether run serially or with
    /// the stream partitioned across threads.
    pub fn count_semistable(
        &self,
        theta: &Stability,
        d: &DimVector,
        parallel: bool,
    ) -> Result<u64, OracleError> {
        let tables = self.subspace_tables(d)?;
        let p = self.field.p;
        let shapes: Vec<(usize, usize)> = (0..self.quiver.arrows().len())
            .map(|a| self.arrow_shape(a, d))
            .collect();
        let slots: usize = shapes.iter().map(|(r, c)| r * c).sum();
        self.check_point_cap(slots)?;
        let count_slice = |first: Option<u64>| -> u64 {
            let mut count = 0u64;
            let mut values = vec![0u64; slots];
            if let (Some(v), Some(f)) = (values.first_mut(), first) {
                *v = f;
            }
            loop {
                let mut mats = Vec::with_capacity(shapes.len());
                let mut k = 0;
                for &(r, c) in &shapes {
                    let mut m = FpMat::zero(r, c, p);
                    for i in 0..r {
                        for j in 0..c {
                            m.set(i, j, values[k]);
                            k += 1;
                        }
                    }
                    mats.push(m);
                }
                let pt = FqPoint { mats };
                if self.semistable_with_tables(theta, d, &pt, &tables, None) {
                    count += 1;
                }
                // advance, keeping the first slot pinned when partitioned
                let lo = usize::from(first.is_some());
                if slots == lo {
                    break;
                }
                let mut i = lo;
                loop {
                    values[i] += 1;
                    if values[i] < p {
                        break;
                    }
                    values[i] = 0;
                    i += 1;
                    if i == slots {
                        return count;
                    }
                }
            }
            count
        };
        if parallel && slots > 0 {
            Ok((0..p).into_par_iter().map(|f| count_slice(Some(f))).sum())
        } else {
            Ok(count_slice(None))
        }
    }

    /// Ordinary stack count: `#semistable / #GL_d`, exact.
    pub fn stack_count(
        &self,
        theta: &Stability,
        d: &DimVector,
        parallel: bool,
    ) -> Result<BigRational, OracleError> {
        let count = self.count_semistable(theta, d, parallel)?;
        Ok(BigRational::new(
            BigInt::from(count),
            BigInt::from(self.gl_order(d)),
        ))
    }

    /// Self-dual stack count, summed over discriminant sectors.
    pub fn stack_count_selfdual(
        &self,
        theta: &Stability,
        e: &DimVector,
    ) -> Result<SelfDualStackCount, OracleError> {
        if !self.quiver.is_sigma_compatible(theta) {
            return Err(OracleError::NotSigmaCompatible);
        }
        let tables = self.subspace_tables(e)?;
        let mut total = BigRational::zero();
        let mut sectors = Vec::new();
        for gram in self.gram_choices(e)? {
            let mut count = 0u64;
            self.for_each_selfdual_point(e, &gram, |pt| {
                if self.semistable_with_tables(theta, e, pt, &tables, None) {
                    count += 1;
                }
            })?;
            let order = self.selfdual_group_order(e, &gram)?;
            total += BigRational::new(BigInt::from(count), BigInt::from(order.clone()));
            sectors.push(SectorCount {
                eps: gram.eps.values().copied().collect(),
                semistable_points: count,
                group_order: order,
            });
        }
        Ok(SelfDualStackCount { total, sectors })
    }

    // ---------------- census ----------------

    fn gl_elements(&self, n: usize) -> Vec<FpMat> {
        let p = self.field.p;
        let mut out = Vec::new();
        let mut values = vec![0u64; n * n];
        loop {
            let mut m = FpMat::zero(n, n, p);
            for i in 0..n {
                for j in 0..n {
                    m.set(i, j, values[i * n + j]);
                }
            }
            if m.inverse().is_some() {
                out.push(m);
            }
            if !advance(&mut values, p) {
                break;
            }
        }
        out
    }

    fn isometry_elements(&self, b: &FpMat) -> Vec<FpMat> {
        self.gl_elements(b.rows)
            .into_iter()
            .filter(|g| g.transpose().mul(b).mul(g) == *b)
            .collect()
    }

    /// Full group element list for `GL_d`, as per-node tuples.
    fn group_tuples_ordinary(&self, d: &DimVector) -> Result<Vec<Vec<FpMat>>, OracleError> {
        let order = self.gl_order(d);
        if order > BigUint::from(self.caps.group_cap) {
            return Err(OracleError::CapExceeded {
                required: u128::try_from(&order).unwrap_or(u128::MAX),
                cap: self.caps.group_cap,
            });
        }
        let lists: Vec<Vec<FpMat>> = d
            .components()
            .iter()
            .map(|&n| self.gl_elements(n as usize))
            .collect();
        Ok(cartesian(&lists))
    }

    /// Full isometry group element list for one self-dual sector; entries at
    /// negative nodes are determined by the positive partner.
    fn group_tuples_selfdual(
        &self,
        e: &DimVector,
        gram: &GramChoice,
    ) -> Result<Vec<Vec<FpMat>>, OracleError> {
        let q = self.quiver;
        let order = self.selfdual_group_order(e, gram)?;
        if order > BigUint::from(self.caps.group_cap) {
            return Err(OracleError::CapExceeded {
                required: u128::try_from(&order).unwrap_or(u128::MAX),
                cap: self.caps.group_cap,
            });
        }
        // independent factors: plus nodes (GL) and fixed nodes (isometries)
        let mut factor_nodes = Vec::new();
        let mut factors: Vec<Vec<FpMat>> = Vec::new();
        for i in 0..q.node_count() {
            match q.node_part(i) {
                crate::quiver::Part::Plus => {
                    factor_nodes.push(i);
                    factors.push(self.gl_elements(e.get(i) as usize));
                }
                crate::quiver::Part::Fixed => {
                    factor_nodes.push(i);
                    factors.push(self.isometry_elements(&gram.blocks[i]));
                }
                crate::quiver::Part::Minus => {}
            }
        }
        let combos = cartesian(&factors);
        let mut out = Vec::with_capacity(combos.len());
        for combo in combos {
            let mut tuple: Vec<FpMat> = (0..q.node_count())
                .map(|i| FpMat::identity(e.get(i) as usize, self.field.p))
                .collect();
            for (&i, g) in factor_nodes.iter().zip(&combo) {
                tuple[i] = g.clone();
            }
            // the isometry condition pins g_{sigma(i)} = B_i^{-1} (g_i^T)^{-1} B_i
            for i in q.plus_nodes() {
                let si = q.sigma_node(i);
                let bi = &gram.blocks[i];
                let binv = bi.inverse().expect("invertible gram block");
                let g = tuple[i]
                    .transpose()
                    .inverse()
                    .expect("invertible group element");
                tuple[si] = binv.mul(&g).mul(bi);
            }
            out.push(tuple);
        }
        Ok(out)
    }

    fn act(&self, tuple: &[FpMat], point: &FqPoint) -> FqPoint {
        let q = self.quiver;
        let mats = q
            .arrows()
            .iter()
            .enumerate()
            .map(|(a, arr)| {
                let gi_inv = tuple[arr.src].inverse().expect("invertible");
                tuple[arr.tgt].mul(&point.mats[a]).mul(&gi_inv)
            })
            .collect();
        FqPoint { mats }
    }

    /// Orbit decomposition of the ordinary point space under `GL_d`.
    pub fn census(
        &self,
        theta: Option<&Stability>,
        d: &DimVector,
    ) -> Result<Vec<CensusEntry>, OracleError> {
        let group = self.group_tuples_ordinary(d)?;
        let mut points = Vec::new();
        self.for_each_point(d, |pt| points.push(pt.clone()))?;
        let tables = theta.map(|_| self.subspace_tables(d)).transpose()?;
        self.orbits(&group, &points, |pt| {
            theta.map(|th| self.semistable_with_tables(th, d, pt, tables.as_ref().unwrap(), None))
        })
    }

    /// Orbit decomposition of every discriminant sector of a self-dual class.
    pub fn census_selfdual(
        &self,
        theta: Option<&Stability>,
        e: &DimVector,
    ) -> Result<Vec<CensusEntry>, OracleError> {
        let tables = theta.map(|_| self.subspace_tables(e)).transpose()?;
        let mut out = Vec::new();
        for gram in self.gram_choices(e)? {
            let group = self.group_tuples_selfdual(e, &gram)?;
            let points = self.selfdual_points(e, &gram)?;
            let mut entries = self.orbits(&group, &points, |pt| {
                theta.map(|th| self.semistable_with_tables(th, e, pt, tables.as_ref().unwrap(), None))
            })?;
            for entry in &mut entries {
                entry.eps = gram.eps.values().copied().collect();
            }
            out.extend(entries);
        }
        Ok(out)
    }

    fn orbits<F: Fn(&FqPoint) -> Option<bool>>(
        &self,
        group: &[Vec<FpMat>],
        points: &[FqPoint],
        semistable: F,
    ) -> Result<Vec<CensusEntry>, OracleError> {
        let mut seen: HashSet<FqPoint> = HashSet::new();
        let mut out = Vec::new();
        for pt in points {
            if seen.contains(pt) {
                continue;
            }
            let mut orbit = HashSet::new();
            for g in group {
                orbit.insert(self.act(g, pt));
            }
            let orbit_size = orbit.len() as u64;
            let group_order = group.len() as u64;
            // orbit-stabilizer integrality is part of the contract
            assert_eq!(
                group_order % orbit_size,
                0,
                "orbit size must divide the group order"
            );
            out.push(CensusEntry {
                rep: pt.clone(),
                eps: Vec::new(),
                orbit_size,
                aut_order: group_order / orbit_size,
                semistable: semistable(pt),
            });
            seen.extend(orbit);
        }
        Ok(out)
    }

    // ---------------- integration-map identity ----------------

    /// Verify `sum_N G^N_{U,M} / #Aut_S(N) = q^{-chi(e,d) - E(d)} /
    /// (#Aut(U) #Aut_S(M))` by full enumeration at dimension `H(d) + e`.
    pub fn verify_integration_identity(
        &self,
        theta: &Stability,
        u_dim: &DimVector,
        u_point: &FqPoint,
        m: Option<(&DimVector, &FqPoint, &GramChoice)>,
    ) -> Result<IntegrationReport, OracleError> {
        if !self.quiver.is_sigma_compatible(theta) {
            return Err(OracleError::NotSigmaCompatible);
        }
        let q = self.quiver;
        let p = self.field.p;
        let e_dim = match m {
            Some((e, _, _)) => e.clone(),
            None => DimVector::zero(q.node_count()),
        };
        let f_dim = q.hyperbolic_sum(u_dim).add(&e_dim);

        // #Aut(U) by orbit-stabilizer, plus U's orbit for isomorphism tests.
        let u_group = self.group_tuples_ordinary(u_dim)?;
        let mut u_orbit = HashSet::new();
        for g in &u_group {
            u_orbit.insert(self.act(g, u_point));
        }
        let aut_u = u_group.len() as u64 / u_orbit.len() as u64;

        // #Aut_S(M) by orbit-stabilizer in its own sector.
        let aut_m: u64 = match m {
            None => 1,
            Some((e, m_point, m_gram)) => {
                let group = self.group_tuples_selfdual(e, m_gram)?;
                let mut orbit = HashSet::new();
                for g in &group {
                    orbit.insert(self.act(g, m_point));
                }
                group.len() as u64 / orbit.len() as u64
            }
        };

        // All self-dual classes N of dimension H(d) + e.
        let classes = self.census_selfdual(None, &f_dim)?;
        let grams = self.gram_choices(&f_dim)?;
        let tables = self.subspace_tables(&f_dim)?;

        let mut lhs = BigRational::zero();
        let mut per_class = Vec::new();
        for entry in &classes {
            let gram = grams
                .iter()
                .find(|g| g.eps.values().copied().collect::<Vec<i8>>() == entry.eps)
                .expect("sector exists");
            let count = self.count_isotropic_subreps(
                &entry.rep, &f_dim, gram, u_dim, &u_orbit, m, &tables,
            )?;
            if count > 0 {
                lhs += BigRational::new(BigInt::from(count), BigInt::from(entry.aut_order));
            }
            per_class.push(count);
        }

        let exponent = -q.euler_form(&e_dim, u_dim) - q.sd_euler(u_dim);
        let q_power = if exponent >= 0 {
            BigRational::from_integer(BigInt::from(p).pow(exponent as u32))
        } else {
            BigRational::new(BigInt::one(), BigInt::from(p).pow((-exponent) as u32))
        };
        let rhs = q_power
            / (BigRational::from_integer(BigInt::from(aut_u))
                * BigRational::from_integer(BigInt::from(aut_m)));
        Ok(IntegrationReport {
            equal: lhs == rhs,
            lhs,
            rhs,
            per_class,
        })
    }

    /// `G^N_{U,M}`: isotropic subrepresentations of `N` isomorphic to `U`
    /// whose self-dual quotient is isometric to `M`.
    #[allow(clippy::too_many_arguments)]
    fn count_isotropic_subreps(
        &self,
        n_point: &FqPoint,
        f_dim: &DimVector,
        gram: &GramChoice,
        u_dim: &DimVector,
        u_orbit: &HashSet<FqPoint>,
        m: Option<(&DimVector, &FqPoint, &GramChoice)>,
        tables: &[Vec<FpMat>],
    ) -> Result<u64, OracleError> {
        let q = self.quiver;
        let n_nodes = q.node_count();
        let mut count = 0u64;
        let mut choice = vec![0usize; n_nodes];
        'outer: loop {
            let dims_ok =
                (0..n_nodes).all(|i| tables[i][choice[i]].rows == u_dim.get(i) as usize);
            if dims_ok
                && self.is_subrep(n_point, tables, &choice)
                && self.is_isotropic(tables, &choice, gram)
            {
                let sub = (0..n_nodes)
                    .map(|i| tables[i][choice[i]].clone())
                    .collect::<Vec<_>>();
                if self.restricted_point_matches(n_point, &sub, u_orbit)
                    && self.quotient_isometric(n_point, f_dim, gram, &sub, m)?
                {
                    count += 1;
                }
            }
            for i in 0..n_nodes {
                choice[i] += 1;
                if choice[i] < tables[i].len() {
                    continue 'outer;
                }
                choice[i] = 0;
            }
            break;
        }
        Ok(count)
    }

    /// Restrict the maps of `N` to a subrepresentation and test membership in
    /// the precomputed `GL`-orbit of `U`.
    fn restricted_point_matches(
        &self,
        n_point: &FqPoint,
        sub: &[FpMat],
        u_orbit: &HashSet<FqPoint>,
    ) -> bool {
        let q = self.quiver;
        let p = self.field.p;
        let mut mats = Vec::with_capacity(q.arrows().len());
        for (a, arr) in q.arrows().iter().enumerate() {
            let basis_src = &sub[arr.src];
            let basis_tgt = &sub[arr.tgt];
            let mut m = FpMat::zero(basis_tgt.rows, basis_src.rows, p);
            for c in 0..basis_src.rows {
                let v: Vec<u64> = (0..basis_src.cols).map(|j| basis_src.get(c, j)).collect();
                let image = apply_matrix(&n_point.mats[a], &v, p);
                let Some(coords) = express_in_rows(basis_tgt, &image) else {
                    return false;
                };
                for (r, &x) in coords.iter().enumerate() {
                    m.set(r, c, x);
                }
            }
            mats.push(m);
        }
        u_orbit.contains(&FqPoint { mats })
    }

    /// Build `U^perp / U` with its induced maps and form, then search for an
    /// isometry with `M` over all graded isomorphisms.
    fn quotient_isometric(
        &self,
        n_point: &FqPoint,
        f_dim: &DimVector,
        gram: &GramChoice,
        sub: &[FpMat],
        m: Option<(&DimVector, &FqPoint, &GramChoice)>,
    ) -> Result<bool, OracleError> {
        let q = self.quiver;
        let p = self.field.p;
        let n_nodes = q.node_count();
        // perp_u = kernel of x -> <x, U_{sigma(u)}>
        let mut perp: Vec<FpMat> = Vec::with_capacity(n_nodes);
        for u in 0..n_nodes {
            let su = q.sigma_node(u);
            let fu = f_dim.get(u) as usize;
            let constraint = sub[su].mul(&gram.blocks[u].transpose());
            let kernel = constraint.kernel_basis();
            let mut k = FpMat::from_rows(kernel, fu, p);
            k.rref_in_place();
            perp.push(k);
        }
        // lifted quotient basis: rows of perp independent from sub
        let mut lifted: Vec<FpMat> = Vec::with_capacity(n_nodes);
        for u in 0..n_nodes {
            let fu = f_dim.get(u) as usize;
            let mut rows: Vec<Vec<u64>> = Vec::new();
            let mut span = sub[u].clone();
            for r in 0..perp[u].rows {
                let v: Vec<u64> = (0..fu).map(|j| perp[u].get(r, j)).collect();
                if !span.row_space_contains(&v) {
                    rows.push(v.clone());
                    let mut stacked: Vec<Vec<u64>> = (0..span.rows)
                        .map(|i| (0..fu).map(|j| span.get(i, j)).collect())
                        .collect();
                    stacked.push(v);
                    span = FpMat::from_rows(stacked, fu, p);
                    span.rref_in_place();
                }
            }
            lifted.push(FpMat::from_rows(rows, fu, p));
        }
        let quot_dims: Vec<usize> = lifted.iter().map(|l| l.rows).collect();
        match m {
            None => Ok(quot_dims.iter().all(|&d| d == 0)),
            Some((e_dim, m_point, m_gram)) => {
                if quot_dims
                    .iter()
                    .zip(e_dim.components())
                    .any(|(&qd, &ed)| qd != ed as usize)
                {
                    return Ok(false);
                }
                // induced arrow maps on the quotient
                let mut induced = Vec::with_capacity(q.arrows().len());
                for (a, arr) in q.arrows().iter().enumerate() {
                    let src = &lifted[arr.src];
                    let tgt_basis = &lifted[arr.tgt];
                    let mut mm = FpMat::zero(tgt_basis.rows, src.rows, p);
                    for c in 0..src.rows {
                        let v: Vec<u64> = (0..src.cols).map(|j| src.get(c, j)).collect();
                        let image = apply_matrix(&n_point.mats[a], &v, p);
                        let coords = express_in_quotient(&sub[arr.tgt], tgt_basis, &image, p)
                            .expect("image lies in U^perp");
                        for (r, &x) in coords.iter().enumerate() {
                            mm.set(r, c, x);
                        }
                    }
                    induced.push(mm);
                }
                // induced pairing blocks
                let mut induced_gram = Vec::with_capacity(n_nodes);
                for u in 0..n_nodes {
                    let su = q.sigma_node(u);
                    induced_gram
                        .push(lifted[u].mul(&gram.blocks[u]).mul(&lifted[su].transpose()));
                }
                self.exists_graded_isometry(e_dim, &induced, &induced_gram, m_point, m_gram)
            }
        }
    }

    /// Search all graded isomorphisms matching structure maps and forms.
    fn exists_graded_isometry(
        &self,
        e_dim: &DimVector,
        maps_a: &[FpMat],
        gram_a: &[FpMat],
        m_point: &FqPoint,
        m_gram: &GramChoice,
    ) -> Result<bool, OracleError> {
        let q = self.quiver;
        let lists: Vec<Vec<FpMat>> = e_dim
            .components()
            .iter()
            .map(|&n| self.gl_elements(n as usize))
            .collect();
        let mut order: u128 = 1;
        for l in &lists {
            order = order.saturating_mul(l.len().max(1) as u128);
        }
        if order > self.caps.group_cap as u128 {
            return Err(OracleError::CapExceeded {
                required: order,
                cap: self.caps.group_cap,
            });
        }
        for phi in cartesian(&lists) {
            // phi_j A_alpha = M_alpha phi_i for every arrow
            let maps_ok = q
                .arrows()
                .iter()
                .enumerate()
                .all(|(a, arr)| phi[arr.tgt].mul(&maps_a[a]) == m_point.mats[a].mul(&phi[arr.src]));
            if !maps_ok {
                continue;
            }
            // phi_u^T B^M_u phi_{sigma(u)} = B^A_u at every node
            let forms_ok = (0..q.node_count()).all(|u| {
                let su = q.sigma_node(u);
                phi[u].transpose().mul(&m_gram.blocks[u]).mul(&phi[su]) == gram_a[u]
            });
            if forms_ok {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

enum SelfDualSlot {
    /// A free entry of a positive-arrow matrix.
    Full { arrow: usize, i: usize, j: usize },
    /// An independent entry of the bilinear block of a fixed arrow.
    Bilinear {
        arrow: usize,
        i: usize,
        j: usize,
        sym: bool,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorCount {
    pub eps: Vec<i8>,
    pub semistable_points: u64,
    #[serde(serialize_with = "serialize_biguint")]
    pub group_order: BigUint,
}

#[derive(Clone, Debug)]
pub struct SelfDualStackCount {
    pub total: BigRational,
    pub sectors: Vec<SectorCount>,
}

#[derive(Clone, Debug)]
pub struct CensusEntry {
    pub rep: FqPoint,
    pub eps: Vec<i8>,
    pub orbit_size: u64,
    pub aut_order: u64,
    pub semistable: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct IntegrationReport {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub equal: bool,
    /// `G^N_{U,M}` per census class, in census order.
    pub per_class: Vec<u64>,
}

fn serialize_biguint<S: serde::Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn advance(values: &mut [u64], p: u64) -> bool {
    for v in values.iter_mut() {
        *v += 1;
        if *v < p {
            return true;
        }
        *v = 0;
    }
    false
}

fn cartesian(lists: &[Vec<FpMat>]) -> Vec<Vec<FpMat>> {
    let mut out: Vec<Vec<FpMat>> = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len().max(1));
        for prefix in &out {
            for item in list {
                let mut tuple = prefix.clone();
                tuple.push(item.clone());
                next.push(tuple);
            }
        }
        out = next;
    }
    out
}

fn apply_matrix(m: &FpMat, v: &[u64], p: u64) -> Vec<u64> {
    (0..m.rows)
        .map(|i| (0..m.cols).map(|j| m.get(i, j) * v[j] % p).sum::<u64>() % p)
        .collect()
}

/// Coordinates of `v` in the row basis of an RREF matrix, if it lies in the
/// row space.
fn express_in_rows(basis: &FpMat, v: &[u64]) -> Option<Vec<u64>> {
    let p = basis.p;
    let mut v = v.to_vec();
    let mut coords = vec![0u64; basis.rows];
    for (r, coord) in coords.iter_mut().enumerate() {
        let c = (0..basis.cols).find(|&j| basis.get(r, j) != 0)?;
        if v[c] != 0 {
            let f = v[c] * matrix::mod_inverse(basis.get(r, c), p) % p;
            *coord = f;
            for (j, x) in v.iter_mut().enumerate() {
                *x = (*x + (p - f) * basis.get(r, j) % p) % p;
            }
        }
    }
    v.iter().all(|&x| x == 0).then_some(coords)
}

/// Coordinates of `v` modulo `sub` in the lifted quotient basis.
fn express_in_quotient(sub: &FpMat, lifted: &FpMat, v: &[u64], p: u64) -> Option<Vec<u64>> {
    // solve [sub; lifted]^T c = v and return the lifted part
    let rows = sub.rows + lifted.rows;
    if rows == 0 {
        return v.iter().all(|&x| x == 0).then_some(Vec::new());
    }
    let cols = sub.cols;
    let mut aug = FpMat::zero(cols, rows + 1, p);
    for (j, &vj) in v.iter().enumerate().take(cols) {
        for r in 0..sub.rows {
            aug.set(j, r, sub.get(r, j));
        }
        for r in 0..lifted.rows {
            aug.set(j, sub.rows + r, lifted.get(r, j));
        }
        aug.set(j, rows, vj);
    }
    let pivots = aug.rref_in_place();
    if pivots.contains(&rows) {
        return None; // inconsistent: v not in the span
    }
    let mut solution = vec![0u64; rows];
    for (r, &c) in pivots.iter().enumerate() {
        solution[c] = aug.get(r, rows);
    }
    Some(solution[sub.rows..].to_vec())
}

/// `#GL_n(F_p)`.
pub fn gl_order(n: u32, p: u64) -> BigUint {
    let pn = BigUint::from(p).pow(n);
    let mut order = BigUint::one();
    for k in 0..n {
        order *= &pn - BigUint::from(p).pow(k);
    }
    order
}

/// `#Sp_{2m}(F_p) = p^{m^2} prod (p^{2i} - 1)`; errors on odd dimensions.
pub fn symplectic_order(n: u32, p: u64) -> Result<BigUint, OracleError> {
    if n % 2 == 1 {
        return Err(OracleError::OddSymplecticDimension(n));
    }
    let m = n / 2;
    let mut order = BigUint::from(p).pow(m * m);
    for i in 1..=m {
        order *= BigUint::from(p).pow(2 * i) - BigUint::one();
    }
    Ok(order)
}

/// `#O^eps_{2m}(F_p) = 2 p^{m(m-1)} (p^m - eps) prod_{i<m} (p^{2i} - 1)`.
pub fn orthogonal_even_order(n: u32, eps: i8, p: u64) -> BigUint {
    assert!(n.is_multiple_of(2));
    let m = n / 2;
    if m == 0 {
        return BigUint::one();
    }
    let pm = BigUint::from(p).pow(m);
    let factor = if eps == 1 {
        &pm - BigUint::one()
    } else {
        &pm + BigUint::one()
    };
    let mut order = BigUint::from(2u8) * BigUint::from(p).pow(m * (m - 1)) * factor;
    for i in 1..m {
        order *= BigUint::from(p).pow(2 * i) - BigUint::one();
    }
    order
}

/// `#O_{2m+1}(F_p) = 2 #Sp_{2m}(F_p)`.
pub fn orthogonal_odd_order(n: u32, p: u64) -> BigUint {
    assert!(n % 2 == 1);
    BigUint::from(2u8) * symplectic_order(n - 1, p).expect("even")
}

fn det_mod(b: &FpMat) -> u64 {
    // determinant by row reduction, tracking swaps
    let p = b.p;
    let n = b.rows;
    let mut m = b.clone();
    let mut det = 1u64;
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| m.get(i, c) != 0) else {
            return 0;
        };
        if pr != c {
            for j in 0..n {
                let tmp = m.get(c, j);
                m.set(c, j, m.get(pr, j));
                m.set(pr, j, tmp);
            }
            det = det * (p - 1) % p;
        }
        det = det * m.get(c, c) % p;
        let inv = matrix::mod_inverse(m.get(c, c), p);
        for i in c + 1..n {
            if m.get(i, c) != 0 {
                let f = m.get(i, c) * inv % p;
                for j in 0..n {
                    let v = (m.get(i, j) + (p - f) * m.get(c, j) % p) % p;
                    m.set(i, j, v);
                }
            }
        }
    }
    det
}
