//! Truncated graded elements of the quantum torus and its module.
//!
//! A [`TorusSeries`] is a finite sum of `coeff * x_d` with all keys of total
//! dimension at most the bound; multiplication twists by `q^(<d,d'>/2)` and
//! drops terms beyond the bound. A [`ModuleSeries`] is the analogous object
//! on the basis `xi_e` indexed by admissible sigma-symmetric vectors, acted
//! on by `x_d ⋆ xi_e = q^((<d,e> - E~(d))/2) xi_{H(d)+e}`. Keys iterate in
//! lexicographic order, so rendering is deterministic.

use std::collections::BTreeMap;

use crate::quiver::{DimVector, QuiverWithDuality};
use crate::scalar::ScalarV;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("series bounds differ: {0} vs {1}")]
    BoundMismatch(u32, u32),
    #[error("the zero dimension vector is not a dilogarithm argument")]
    ZeroVector,
    #[error("module keys must be admissible sigma-symmetric vectors: {0}")]
    InadmissibleKey(DimVector),
    #[error("cannot invert a series with vanishing constant term")]
    NonUnitConstantTerm,
}

/// Base of a quantum dilogarithm series: `q` or `q^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DilogBase {
    Q,
    QSquared,
}

impl DilogBase {
    fn v_step(self) -> i64 {
        match self {
            DilogBase::Q => 2,
            DilogBase::QSquared => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorusSeries {
    bound: u32,
    terms: BTreeMap<DimVector, ScalarV>,
}

impl TorusSeries {
    pub fn zero(bound: u32) -> Self {
        TorusSeries {
            bound,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(n_nodes: usize, bound: u32) -> Self {
        let mut s = TorusSeries::zero(bound);
        s.add_term(DimVector::zero(n_nodes), ScalarV::one());
        s
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DimVector, &ScalarV)> {
        self.terms.iter()
    }

    pub fn coeff(&self, d: &DimVector) -> ScalarV {
        self.terms.get(d).cloned().unwrap_or_else(ScalarV::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `c * x_d`, dropping zero results and keys beyond the bound.
    pub fn add_term(&mut self, d: DimVector, c: ScalarV) {
        if d.total() > self.bound || c.is_zero() {
            return;
        }
        let entry = self.terms.entry(d);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, SeriesError> {
        check_bounds(self.bound, rhs.bound)?;
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(d.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, SeriesError> {
        check_bounds(self.bound, rhs.bound)?;
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(d.clone(), -c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &ScalarV) -> Self {
        let mut out = TorusSeries::zero(self.bound);
        for (d, a) in self.terms() {
            out.add_term(d.clone(), a * c);
        }
        out
    }

    /// The twisted product `x_d x_d' = q^(<d,d'>/2) x_{d+d'}`.
    pub fn mul(&self, rhs: &Self, q: &QuiverWithDuality) -> Result<Self, SeriesError> {
        check_bounds(self.bound, rhs.bound)?;
        let mut out = TorusSeries::zero(self.bound);
        for (d1, c1) in self.terms() {
            if d1.total() > self.bound {
                continue;
            }
            for (d2, c2) in rhs.terms() {
                if d1.total() + d2.total() > self.bound {
                    continue;
                }
                let twist = ScalarV::v_pow(q.skew_form(d1, d2));
                out.add_term(d1.add(d2), &(c1 * c2) * &twist);
            }
        }
        Ok(out)
    }

    /// Inverse of a series with invertible constant term.
    pub fn inverse(&self, q: &QuiverWithDuality) -> Result<Self, SeriesError> {
        let zero_key = DimVector::zero(q.node_count());
        let c0 = self.coeff(&zero_key);
        if c0.is_zero() {
            return Err(SeriesError::NonUnitConstantTerm);
        }
        let c0_inv = c0.inv().expect("nonzero constant term");
        // self = c0 (1 + T) with T of positive total degree; invert by the
        // finite Neumann sum sum_k (-T)^k, which truncates at the bound.
        let mut t = self.scale(&c0_inv);
        t.terms.remove(&zero_key);
        let mut acc = TorusSeries::unit(q.node_count(), self.bound);
        let mut power = TorusSeries::unit(q.node_count(), self.bound);
        let mut sign = ScalarV::one();
        for _ in 0..self.bound {
            power = power.mul(&t, q)?;
            if power.is_zero() {
                break;
            }
            sign = -&sign;
            acc = acc.add(&power.scale(&sign))?;
        }
        Ok(acc.scale(&c0_inv))
    }

    /// Integer power, using the inverse for negative exponents.
    pub fn pow(&self, e: i64, q: &QuiverWithDuality) -> Result<Self, SeriesError> {
        let base = if e < 0 { self.inverse(q)? } else { self.clone() };
        let mut acc = TorusSeries::unit(q.node_count(), self.bound);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base, q)?;
        }
        Ok(acc)
    }

    /// Restrict to a smaller bound.
    pub fn restrict(&self, bound: u32) -> Self {
        let mut out = TorusSeries::zero(bound);
        for (d, c) in self.terms() {
            out.add_term(d.clone(), c.clone());
        }
        out
    }

    /// Act on a module element, term by term.
    pub fn act(&self, xi: &ModuleSeries, q: &QuiverWithDuality) -> Result<ModuleSeries, SeriesError> {
        check_bounds(self.bound, xi.bound)?;
        let mut out = ModuleSeries::zero(self.bound);
        for (d, a) in self.terms() {
            let h = q.hyperbolic_sum(d);
            let e_skew = q.sd_euler_skew(d);
            for (e, b) in xi.terms() {
                let key = h.add(e);
                if key.total() > self.bound {
                    continue;
                }
                let twist = ScalarV::v_pow(q.skew_form(d, e) - e_skew);
                out.add_term_unchecked(key, &(a * b) * &twist);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleSeries {
    bound: u32,
    terms: BTreeMap<DimVector, ScalarV>,
}

impl ModuleSeries {
    pub fn zero(bound: u32) -> Self {
        ModuleSeries {
            bound,
            terms: BTreeMap::new(),
        }
    }

    /// The vacuum `xi_0`.
    pub fn vacuum(n_nodes: usize, bound: u32) -> Self {
        let mut s = ModuleSeries::zero(bound);
        s.add_term_unchecked(DimVector::zero(n_nodes), ScalarV::one());
        s
    }

    /// A single basis vector `xi_e`; the key must be admissible.
    pub fn basis(
        q: &QuiverWithDuality,
        e: DimVector,
        bound: u32,
    ) -> Result<Self, SeriesError> {
        if !q.is_admissible_selfdual(&e) {
            return Err(SeriesError::InadmissibleKey(e));
        }
        let mut s = ModuleSeries::zero(bound);
        s.add_term_unchecked(e, ScalarV::one());
        Ok(s)
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DimVector, &ScalarV)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &DimVector) -> ScalarV {
        self.terms.get(e).cloned().unwrap_or_else(ScalarV::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term_unchecked(&mut self, e: DimVector, c: ScalarV) {
        if e.total() > self.bound || c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Add `c * xi_e` after checking admissibility of the key.
    pub fn add_term(
        &mut self,
        q: &QuiverWithDuality,
        e: DimVector,
        c: ScalarV,
    ) -> Result<(), SeriesError> {
        if !q.is_admissible_selfdual(&e) {
            return Err(SeriesError::InadmissibleKey(e));
        }
        self.add_term_unchecked(e, c);
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, SeriesError> {
        check_bounds(self.bound, rhs.bound)?;
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term_unchecked(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, SeriesError> {
        check_bounds(self.bound, rhs.bound)?;
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term_unchecked(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &ScalarV) -> Self {
        let mut out = ModuleSeries::zero(self.bound);
        for (e, a) in self.terms() {
            out.add_term_unchecked(e.clone(), a * c);
        }
        out
    }

    pub fn restrict(&self, bound: u32) -> Self {
        let mut out = ModuleSeries::zero(bound);
        for (e, c) in self.terms() {
            out.add_term_unchecked(e.clone(), c.clone());
        }
        out
    }

    /// Smallest key (graded lexicographic) on which the two sides differ.
    pub fn first_difference(&self, rhs: &Self) -> Option<(DimVector, ScalarV, ScalarV)> {
        let mut keys: Vec<&DimVector> = self.terms.keys().chain(rhs.terms.keys()).collect();
        keys.sort_by_key(|d| (d.total(), (*d).clone()));
        keys.dedup();
        for d in keys {
            let a = self.coeff(d);
            let b = rhs.coeff(d);
            if a != b {
                return Some((d.clone(), a, b));
            }
        }
        None
    }
}

impl std::fmt::Display for TorusSeries {
    /// Sorted list of `x_d -> coefficient` pairs.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(d, c)| format!("x{d} -> {c}"))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl std::fmt::Display for ModuleSeries {
    /// Sorted list of `xi_e -> coefficient` pairs.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("xi{e} -> {c}"))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

fn check_bounds(a: u32, b: u32) -> Result<(), SeriesError> {
    if a == b {
        Ok(())
    } else {
        Err(SeriesError::BoundMismatch(a, b))
    }
}

/// `E_base(q^(shift/2) x_d)` truncated at total dimension `bound`.
///
/// `shift_v` is the half-integer shift encoded as a v-exponent, so the scaled
/// argument is `v^shift_v x_d`. Term `n` carries
/// `base^(n^2/2) v^(n shift_v) / ((base^n - 1) ... (base^n - base^(n-1)))`
/// on `x_{nd}`; powers of `x_d` need no twist since `<d, d> = 0`.
pub fn dilog(
    q: &QuiverWithDuality,
    d: &DimVector,
    base: DilogBase,
    shift_v: i64,
    bound: u32,
) -> Result<TorusSeries, SeriesError> {
    if d.is_zero() {
        return Err(SeriesError::ZeroVector);
    }
    let step = base.v_step();
    let mut out = TorusSeries::zero(bound);
    let mut key = DimVector::zero(q.node_count());
    let mut n = 0i64;
    loop {
        if key.total() > bound {
            break;
        }
        // base^(n^2/2) = v^(step * n^2 / 2); step is even so this is integral.
        let mut coeff = ScalarV::v_pow(step * n * n / 2 + shift_v * n);
        for k in 0..n {
            let factor = &ScalarV::v_pow(step * n) - &ScalarV::v_pow(step * k);
            coeff = coeff.checked_div(&factor).expect("dilog denominator nonzero");
        }
        out.add_term(key.clone(), coeff);
        key = key.add(d);
        n += 1;
    }
    Ok(out)
}

/// One factor of a dilogarithm product.
#[derive(Clone, Debug)]
pub struct DilogFactor {
    pub d: DimVector,
    pub base: DilogBase,
    pub shift_v: i64,
    pub exponent: i64,
}

/// Expand an ordered product of dilogarithms, each argument additionally
/// rescaled by `q^(rule(d)/2)` (the rule returns a v-exponent).
pub fn rescale_dilog_product(
    q: &QuiverWithDuality,
    factors: &[DilogFactor],
    rule: &dyn Fn(&DimVector) -> i64,
    bound: u32,
) -> Result<TorusSeries, SeriesError> {
    let mut out = TorusSeries::unit(q.node_count(), bound);
    for f in factors {
        let factor = dilog(q, &f.d, f.base, f.shift_v + rule(&f.d), bound)?;
        out = out.mul(&factor.pow(f.exponent, q)?, q)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::test_quivers::*;
    use crate::quiver::Stability;

    fn dv(c: &[u32]) -> DimVector {
        DimVector::from_slice(c)
    }

    fn v(e: i64) -> ScalarV {
        ScalarV::v_pow(e)
    }

    fn x(q: &QuiverWithDuality, d: &[u32], bound: u32) -> TorusSeries {
        let mut s = TorusSeries::zero(bound);
        s.add_term(dv(d), ScalarV::one());
        let _ = q;
        s
    }

    #[test]
    fn series_render_as_sorted_pair_lists() {
        let q = a2_symplectic();
        let mut s = TorusSeries::unit(2, 4);
        s.add_term(dv(&[1, 0]), v(-1));
        assert_eq!(s.to_string(), "x(0,0) -> 1; x(1,0) -> 1/v");
        let m = ModuleSeries::vacuum(2, 4);
        assert_eq!(m.to_string(), "xi(0,0) -> 1");
        let _ = q;
    }

    #[test]
    fn torus_twist() {
        let q = a2(1, 1);
        let a = x(&q, &[1, 0], 4);
        let b = x(&q, &[0, 1], 4);
        let ab = a.mul(&b, &q).unwrap();
        assert_eq!(ab.coeff(&dv(&[1, 1])), v(-1));
        // unit and self-products
        let u = TorusSeries::unit(2, 4);
        assert_eq!(u.mul(&a, &q).unwrap(), a);
        let aa = a.mul(&a, &q).unwrap();
        assert!(aa.coeff(&dv(&[2, 0])).is_one());
    }

    #[test]
    fn bound_mismatch_is_reported() {
        let q = a2(1, 1);
        let a = x(&q, &[1, 0], 4);
        let b = x(&q, &[0, 1], 5);
        assert!(matches!(
            a.mul(&b, &q),
            Err(SeriesError::BoundMismatch(4, 5))
        ));
    }

    #[test]
    fn module_action_examples() {
        let q = a2_symplectic();
        let xi0 = ModuleSeries::vacuum(2, 4);
        // x_0 acts as the identity
        let u = TorusSeries::unit(2, 4);
        assert_eq!(u.act(&xi0, &q).unwrap(), xi0);
        // x_(1,0) * xi_0 = v^{-1} xi_(1,1); x_(0,1) * xi_0 = v xi_(1,1)
        let lhs = x(&q, &[1, 0], 4).act(&xi0, &q).unwrap();
        assert_eq!(lhs.coeff(&dv(&[1, 1])), v(-1));
        let rhs = x(&q, &[0, 1], 4).act(&xi0, &q).unwrap();
        assert_eq!(rhs.coeff(&dv(&[1, 1])), v(1));
    }

    #[test]
    fn dilog_low_order_coefficients() {
        let q = a2(1, 1);
        let d = dv(&[1, 0]);
        let e = dilog(&q, &d, DilogBase::Q, 0, 4).unwrap();
        assert!(e.coeff(&dv(&[0, 0])).is_one());
        // order 1: v/(v^2-1)
        let c1 = ScalarV::v_pow(1)
            .checked_div(&(&v(2) - &ScalarV::one()))
            .unwrap();
        assert_eq!(e.coeff(&dv(&[1, 0])), c1);
        // order 2: v^4/((v^4-1)(v^4-v^2))
        let den = &(&v(4) - &ScalarV::one()) * &(&v(4) - &v(2));
        let c2 = v(4).checked_div(&den).unwrap();
        assert_eq!(e.coeff(&dv(&[2, 0])), c2);
        // E_{q^2}(q^{-1/2} x_d) order 1: q^{1/2}/(q^2-1)
        let e2 = dilog(&q, &d, DilogBase::QSquared, -1, 4).unwrap();
        let c1 = v(1).checked_div(&(&v(4) - &ScalarV::one())).unwrap();
        assert_eq!(e2.coeff(&dv(&[1, 0])), c1);
        assert!(matches!(
            dilog(&q, &dv(&[0, 0]), DilogBase::Q, 0, 4),
            Err(SeriesError::ZeroVector)
        ));
    }

    #[test]
    fn rescale_product_examples() {
        let q = a2_symplectic();
        // empty factor list: the unit series
        let unit = rescale_dilog_product(&q, &[], &|_| 0, 4).unwrap();
        assert_eq!(unit, TorusSeries::unit(2, 4));
        // a single E_q(x_d) with rule d -> q^{1/2} equals E_q(q^{1/2} x_d)
        let f = DilogFactor {
            d: dv(&[1, 0]),
            base: DilogBase::Q,
            shift_v: 0,
            exponent: 1,
        };
        let scaled = rescale_dilog_product(&q, &[f], &|_| 1, 4).unwrap();
        assert_eq!(scaled, dilog(&q, &dv(&[1, 0]), DilogBase::Q, 1, 4).unwrap());
        // slope-zero exponent rule at e = 0 for the symplectic A2:
        // 1/2 - chi(0, d) - E(d) = +1/2 for d = (1,1)
        let d = dv(&[1, 1]);
        let zero = DimVector::zero(2);
        let shift = 1 - 2 * q.euler_form(&zero, &d) - 2 * q.sd_euler(&d);
        assert_eq!(shift, 1);
    }

    #[test]
    fn inverse_and_pow() {
        let q = a2(1, 1);
        let e = dilog(&q, &dv(&[1, 0]), DilogBase::Q, 0, 5).unwrap();
        let inv = e.inverse(&q).unwrap();
        assert_eq!(e.mul(&inv, &q).unwrap(), TorusSeries::unit(2, 5));
        assert_eq!(
            e.pow(-2, &q).unwrap().mul(&e.pow(2, &q).unwrap(), &q).unwrap(),
            TorusSeries::unit(2, 5)
        );
    }

    #[test]
    fn pentagon_identity_bound_six() {
        let q = a2(1, 1);
        let ex = |d: &[u32]| dilog(&q, &dv(d), DilogBase::Q, 0, 6).unwrap();
        let lhs = ex(&[0, 1]).mul(&ex(&[1, 0]), &q).unwrap();
        let rhs = ex(&[1, 0])
            .mul(&ex(&[1, 1]), &q)
            .unwrap()
            .mul(&ex(&[0, 1]), &q)
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn truncation_coherence() {
        let q = a2_symplectic();
        let e5 = dilog(&q, &dv(&[1, 0]), DilogBase::Q, 1, 5).unwrap();
        let e3 = dilog(&q, &dv(&[1, 0]), DilogBase::Q, 1, 3).unwrap();
        assert_eq!(e5.restrict(3), e3);
        let p5 = e5.mul(&e5, &q).unwrap();
        let p3 = e3.mul(&e3, &q).unwrap();
        assert_eq!(p5.restrict(3), p3);
        let m5 = e5.act(&ModuleSeries::vacuum(2, 5), &q).unwrap();
        let m3 = e3.act(&ModuleSeries::vacuum(2, 3), &q).unwrap();
        assert_eq!(m5.restrict(3), m3);
    }

    #[test]
    fn module_axiom_pins_action_exponent() {
        // (A * B) ⋆ Xi = A ⋆ (B ⋆ Xi) exactly; this fails for the exponent
        // printed with +E~(d) in place of -E~(d).
        for q in [a2_symplectic(), a2_orthogonal(), kronecker_symplectic(2)] {
            let bound = 5;
            let dims = q.enumerate_dimvectors(2);
            let mut series = Vec::new();
            for (k, d) in dims.iter().enumerate() {
                let mut s = TorusSeries::unit(2, bound);
                s.add_term(d.clone(), ScalarV::v_pow(k as i64 % 3 - 1));
                series.push(s);
            }
            let xi = {
                let mut m = ModuleSeries::vacuum(2, bound);
                m.add_term(&q, dv(&[1, 1]), ScalarV::v_pow(1)).unwrap();
                m
            };
            for a in &series {
                for b in &series {
                    let lhs = a.mul(b, &q).unwrap().act(&xi, &q).unwrap();
                    let rhs = a.act(&b.act(&xi, &q).unwrap(), &q).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
        let _ = Stability::new(vec![1, -1]);
    }
}
