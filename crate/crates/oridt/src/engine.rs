//! Stack generating functions, Harder-Narasimhan recursions, wall-crossing
//! verification, and extraction of (orientifold) DT invariants.
//!
//! The recursion solver is the source of truth: `a_semistable` solves the HN
//! recursion for ordinary representations and `a_sigma_semistable_rec` solves
//! the isotropic-filtration recursion for self-dual ones. The explicit
//! alternating sum of the counting theorem is implemented independently in
//! `a_sigma_semistable_closed` and cross-checked against the recursion.
//!
//! Memo tables use concurrent insert-if-absent maps; all cached values are
//! pure function results, so eviction or re-computation never changes output.

use std::collections::BTreeMap;

use dashmap::DashMap;
use num::bigint::BigInt;
use num::Zero;
use serde::Serialize;

use crate::quiver::{slope, DimVector, QuiverWithDuality, Slope, Stability};
use crate::scalar::{pochhammer_dim, pochhammer_sigma, ScalarV};
use crate::series::{dilog, DilogBase, DilogFactor, ModuleSeries, SeriesError, TorusSeries};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("the zero dimension vector has no semistable series entry")]
    ZeroDimVector,
    #[error("stability is not sigma-compatible")]
    NotSigmaCompatible,
    #[error("dimension vector {0} is not an admissible self-dual class")]
    Inadmissible(DimVector),
    #[error("extracted invariant at {dim} is not a nonnegative integer: {value}")]
    NonIntegralInvariant { dim: DimVector, value: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Memoized coefficient table entries, exported for the on-disk cache.
pub type MemoEntries = Vec<(DimVector, ScalarV)>;

/// Memoized coefficient engine for one quiver and one stability.
pub struct SeriesCache<'q> {
    quiver: &'q QuiverWithDuality,
    theta: Stability,
    ss: DashMap<DimVector, ScalarV>,
    hn_tail: DashMap<(DimVector, Option<Slope>), ScalarV>,
    sd_ss: DashMap<DimVector, ScalarV>,
    sd_tail: DashMap<(DimVector, Option<Slope>), ScalarV>,
}

impl<'q> SeriesCache<'q> {
    pub fn new(quiver: &'q QuiverWithDuality, theta: Stability) -> Self {
        SeriesCache {
            quiver,
            theta,
            ss: DashMap::new(),
            hn_tail: DashMap::new(),
            sd_ss: DashMap::new(),
            sd_tail: DashMap::new(),
        }
    }

    pub fn quiver(&self) -> &QuiverWithDuality {
        self.quiver
    }

    pub fn theta(&self) -> &Stability {
        &self.theta
    }

    /// Export the memoized semistable coefficients (for the on-disk cache).
    pub fn export_memo(&self) -> (MemoEntries, MemoEntries) {
        let mut ss: Vec<_> = self
            .ss
            .iter()
            .map(|r| (r.key().clone(), r.value().clone()))
            .collect();
        ss.sort_by_key(|(d, _)| d.clone());
        let mut sd: Vec<_> = self
            .sd_ss
            .iter()
            .map(|r| (r.key().clone(), r.value().clone()))
            .collect();
        sd.sort_by_key(|(d, _)| d.clone());
        (ss, sd)
    }

    /// Seed the memo tables from previously exported values.
    pub fn import_memo(&self, ss: MemoEntries, sd: MemoEntries) {
        for (d, v) in ss {
            self.ss.insert(d, v);
        }
        for (e, v) in sd {
            self.sd_ss.insert(e, v);
        }
    }

    /// Coefficient of `x_d` in the total stack series:
    /// `A_d = q^{-chi(d,d)/2} / (q^{-1})_d`.
    pub fn a_total(&self, d: &DimVector) -> ScalarV {
        let chi = self.quiver.euler_form(d, d);
        ScalarV::v_pow(-chi)
            .checked_div(&pochhammer_dim(d))
            .expect("pochhammer is nonzero")
    }

    /// Coefficient of `xi_e` in the total self-dual stack series:
    /// `A^sigma_e = q^{-E(e)/2} / (q^{-1})^sigma_e`, and zero for
    /// inadmissible `e`.
    pub fn a_sigma_total(&self, e: &DimVector) -> ScalarV {
        if !self.quiver.is_admissible_selfdual(e) {
            return ScalarV::zero();
        }
        let en = self.quiver.sd_euler(e);
        ScalarV::v_pow(-en)
            .checked_div(&pochhammer_sigma(self.quiver, e).expect("admissible implies symmetric"))
            .expect("pochhammer is nonzero")
    }

    /// Nonzero vectors componentwise at most `d`.
    fn sub_vectors(d: &DimVector) -> Vec<DimVector> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; d.len()];
        fn rec(d: &DimVector, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<DimVector>) {
            if pos == cur.len() {
                let v = DimVector::new(cur.clone());
                if !v.is_zero() {
                    out.push(v);
                }
                return;
            }
            for c in 0..=d.get(pos) {
                cur[pos] = c;
                rec(d, pos + 1, cur, out);
            }
        }
        rec(d, 0, &mut cur, &mut out);
        out
    }

    /// Semistable coefficient `a^theta_d`, by the HN recursion.
    pub fn a_semistable(&self, d: &DimVector) -> Result<ScalarV, EngineError> {
        if d.is_zero() {
            return Err(EngineError::ZeroDimVector);
        }
        if let Some(v) = self.ss.get(d) {
            return Ok(v.clone());
        }
        let mut value = self.a_total(d);
        for d1 in Self::sub_vectors(d) {
            if &d1 == d {
                continue;
            }
            let rest = d.checked_sub(&d1).expect("d1 <= d");
            let mu = slope(&self.theta, &d1).expect("d1 nonzero");
            let tail = self.hn_tail(&rest, Some(mu))?;
            if tail.is_zero() {
                continue;
            }
            let twist = ScalarV::v_pow(self.quiver.skew_form(&d1, &rest));
            let head = self.a_semistable(&d1)?;
            value = &value - &(&(&head * &tail) * &twist);
        }
        self.ss.insert(d.clone(), value.clone());
        Ok(value)
    }

    /// Sum over HN tuples of weight `d` whose first slope lies below `bound`
    /// (`None` meaning unbounded), of the twisted product of semistable
    /// coefficients.
    fn hn_tail(&self, d: &DimVector, bound: Option<Slope>) -> Result<ScalarV, EngineError> {
        debug_assert!(!d.is_zero());
        let key = (d.clone(), bound);
        if let Some(v) = self.hn_tail.get(&key) {
            return Ok(v.clone());
        }
        let mut value = ScalarV::zero();
        for d1 in Self::sub_vectors(d) {
            let mu = slope(&self.theta, &d1).expect("d1 nonzero");
            if let Some(b) = bound {
                if mu >= b {
                    continue;
                }
            }
            let head = self.a_semistable(&d1)?;
            if head.is_zero() {
                continue;
            }
            if &d1 == d {
                value = &value + &head;
            } else {
                let rest = d.checked_sub(&d1).expect("d1 <= d");
                let tail = self.hn_tail(&rest, Some(mu))?;
                if tail.is_zero() {
                    continue;
                }
                let twist = ScalarV::v_pow(self.quiver.skew_form(&d1, &rest));
                value = &value + &(&(&head * &tail) * &twist);
            }
        }
        self.hn_tail.insert(key, value.clone());
        Ok(value)
    }

    /// Candidate leading parts for the isotropic recursion at sigma-weight
    /// `e`: nonzero `d'` of positive slope with `H(d') <= e`, paired with the
    /// remaining weight and the module-action twist
    /// `v^{<d', e - H(d')> - E~(d')}`.
    fn positive_heads(&self, e: &DimVector) -> Vec<(DimVector, DimVector, Slope, i64)> {
        let mut out = Vec::new();
        for d1 in Self::sub_vectors(e) {
            let h = self.quiver.hyperbolic_sum(&d1);
            let Some(rest) = e.checked_sub(&h) else {
                continue;
            };
            let mu = slope(&self.theta, &d1).expect("d1 nonzero");
            if mu <= Slope::zero() {
                continue;
            }
            let twist = self.quiver.skew_form(&d1, &rest) - self.quiver.sd_euler_skew(&d1);
            out.push((d1, rest, mu, twist));
        }
        out
    }

    /// Self-dual semistable coefficient `a^{sigma,theta}_e`, by the isotropic
    /// HN recursion. Requires a sigma-compatible stability and admissible `e`.
    pub fn a_sigma_semistable_rec(&self, e: &DimVector) -> Result<ScalarV, EngineError> {
        if !self.quiver.is_sigma_compatible(&self.theta) {
            return Err(EngineError::NotSigmaCompatible);
        }
        if !self.quiver.is_admissible_selfdual(e) {
            return Err(EngineError::Inadmissible(e.clone()));
        }
        self.sd_semistable_inner(e)
    }

    fn sd_semistable_inner(&self, e: &DimVector) -> Result<ScalarV, EngineError> {
        if let Some(v) = self.sd_ss.get(e) {
            return Ok(v.clone());
        }
        let mut value = self.a_sigma_total(e);
        for (d1, rest, mu, twist) in self.positive_heads(e) {
            let head = self.a_semistable(&d1)?;
            if head.is_zero() {
                continue;
            }
            let tail = self.sd_tail(&rest, Some(mu))?;
            if tail.is_zero() {
                continue;
            }
            value = &value - &(&(&head * &tail) * &ScalarV::v_pow(twist));
        }
        self.sd_ss.insert(e.clone(), value.clone());
        Ok(value)
    }

    /// Sum over isotropic HN tuples of sigma-weight `e` whose first slope is
    /// below `bound`, including the bare semistable term.
    fn sd_tail(&self, e: &DimVector, bound: Option<Slope>) -> Result<ScalarV, EngineError> {
        let key = (e.clone(), bound);
        if let Some(v) = self.sd_tail.get(&key) {
            return Ok(v.clone());
        }
        let mut value = self.sd_semistable_inner(e)?;
        for (d1, rest, mu, twist) in self.positive_heads(e) {
            if let Some(b) = bound {
                if mu >= b {
                    continue;
                }
            }
            let head = self.a_semistable(&d1)?;
            if head.is_zero() {
                continue;
            }
            let tail = self.sd_tail(&rest, Some(mu))?;
            if tail.is_zero() {
                continue;
            }
            value = &value + &(&(&head * &tail) * &ScalarV::v_pow(twist));
        }
        self.sd_tail.insert(key, value.clone());
        Ok(value)
    }

    /// Independent evaluation of `a^{sigma,theta}_e` by the closed-form
    /// alternating sum over tuples with positive partial-sum slopes.
    pub fn a_sigma_semistable_closed(&self, e: &DimVector) -> Result<ScalarV, EngineError> {
        if !self.quiver.is_sigma_compatible(&self.theta) {
            return Err(EngineError::NotSigmaCompatible);
        }
        if !self.quiver.is_admissible_selfdual(e) {
            return Err(EngineError::Inadmissible(e.clone()));
        }
        let q = self.quiver;
        let mut total = ScalarV::zero();
        // Depth-first over ordered tuples (d^1, ..., d^n). Each frame carries
        // the partial sum D, the accumulated exponent -2 chi(d^bullet) (built
        // by adding -2 chi(d^new, D_prev) on extension), the running product
        // of factors q^{-chi(d^i,d^i)}/(q^{-1})_{d^i}, and the sign (-1)^n.
        struct Frame {
            sum: DimVector,
            parts_exp: i64,
            product: ScalarV,
            negate: bool,
        }
        let mut stack = vec![Frame {
            sum: DimVector::zero(q.node_count()),
            parts_exp: 0,
            product: ScalarV::one(),
            negate: false,
        }];
        while let Some(frame) = stack.pop() {
            // Close the tuple with d_infty = e - H(D).
            let h = q.hyperbolic_sum(&frame.sum);
            if let Some(d_inf) = e.checked_sub(&h) {
                if q.is_admissible_selfdual(&d_inf) {
                    let exp = frame.parts_exp
                        - 2 * q.euler_form(&d_inf, &frame.sum)
                        - 2 * q.sd_euler(&frame.sum)
                        - 2 * q.sd_euler(&d_inf);
                    let tail = ScalarV::v_pow(exp)
                        .checked_div(
                            &pochhammer_sigma(q, &d_inf).expect("admissible implies symmetric"),
                        )
                        .expect("pochhammer nonzero");
                    let term = &frame.product * &tail;
                    total = if frame.negate {
                        &total - &term
                    } else {
                        &total + &term
                    };
                }
            }
            // Extend by one more nonzero part, keeping all partial-sum slopes
            // positive and H(D) within e.
            for d_new in Self::sub_vectors(e) {
                let next_sum = frame.sum.add(&d_new);
                if e.checked_sub(&q.hyperbolic_sum(&next_sum)).is_none() {
                    continue;
                }
                if slope(&self.theta, &next_sum).expect("nonzero") <= Slope::zero() {
                    continue;
                }
                let chi_self = q.euler_form(&d_new, &d_new);
                let factor = ScalarV::v_pow(-2 * chi_self)
                    .checked_div(&pochhammer_dim(&d_new))
                    .expect("pochhammer nonzero");
                stack.push(Frame {
                    parts_exp: frame.parts_exp - 2 * q.euler_form(&d_new, &frame.sum),
                    sum: next_sum,
                    product: &frame.product * &factor,
                    negate: !frame.negate,
                });
            }
        }
        Ok(&ScalarV::v_pow(q.sd_euler(e)) * &total)
    }

    /// All slopes realized by nonzero dimension vectors of total dimension at
    /// most `n`, in strictly decreasing order.
    pub fn realizable_slopes(&self, n: u32) -> Vec<Slope> {
        let mut slopes: Vec<Slope> = self
            .quiver
            .enumerate_dimvectors(n)
            .iter()
            .map(|d| slope(&self.theta, d).expect("nonzero"))
            .collect();
        slopes.sort_unstable();
        slopes.dedup();
        slopes.reverse();
        slopes
    }

    /// The slope-`mu` semistable series `1 + sum a^theta_d x_d`.
    pub fn a_slope(&self, mu: Slope, n: u32) -> Result<TorusSeries, EngineError> {
        let mut out = TorusSeries::unit(self.quiver.node_count(), n);
        for d in self.quiver.enumerate_dimvectors(n) {
            if slope(&self.theta, &d).expect("nonzero") == mu {
                out.add_term(d.clone(), self.a_semistable(&d)?);
            }
        }
        Ok(out)
    }

    /// The ordered product of slope series over all realizable positive
    /// slopes, strictly decreasing left to right.
    pub fn positive_slope_product(&self, n: u32) -> Result<TorusSeries, EngineError> {
        let mut out = TorusSeries::unit(self.quiver.node_count(), n);
        for mu in self.realizable_slopes(n) {
            if mu <= Slope::zero() {
                break;
            }
            out = out.mul(&self.a_slope(mu, n)?, self.quiver)?;
        }
        Ok(out)
    }

    /// The orientifold DT series `sum_e a^{sigma,theta}_e xi_e` at bound `n`.
    pub fn orientifold_series(&self, n: u32) -> Result<ModuleSeries, EngineError> {
        if !self.quiver.is_sigma_compatible(&self.theta) {
            return Err(EngineError::NotSigmaCompatible);
        }
        let mut out = ModuleSeries::zero(n);
        for e in self.quiver.enumerate_selfdual(n) {
            out.add_term_unchecked(e.clone(), self.sd_semistable_inner(&e)?);
        }
        Ok(out)
    }

    /// The total self-dual stack series `sum_e A^sigma_e xi_e` at bound `n`.
    pub fn sigma_total_series(&self, n: u32) -> ModuleSeries {
        let mut out = ModuleSeries::zero(n);
        for e in self.quiver.enumerate_selfdual(n) {
            out.add_term_unchecked(e.clone(), self.a_sigma_total(&e));
        }
        out
    }

    /// Bounded sigma-genericity scan: equal slopes force vanishing skew form,
    /// and slope-zero vectors with a nonzero semistable series are symmetric.
    /// A certificate only up to total dimension `n`.
    pub fn is_sigma_generic(&self, n: u32) -> Result<bool, EngineError> {
        let dims = self.quiver.enumerate_dimvectors(n);
        for a in &dims {
            let mu_a = slope(&self.theta, a).expect("nonzero");
            for b in &dims {
                if mu_a == slope(&self.theta, b).expect("nonzero")
                    && self.quiver.skew_form(a, b) != 0
                {
                    return Ok(false);
                }
            }
            if mu_a == Slope::zero()
                && !self.a_semistable(a)?.is_zero()
                && !self.quiver.is_sigma_symmetric(a)
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Peel `E_q(x_d)^{Omega_d}` factors off every slope series, in
    /// increasing total dimension within each slope.
    pub fn dt_factorize(&self, n: u32) -> Result<OmegaTable, EngineError> {
        let q = self.quiver;
        let mut table = OmegaTable::new(q.finite_type().finite_type, self.is_sigma_generic(n)?);
        // first-order dilog coefficient: q^{1/2}/(q-1)
        let lead = ScalarV::v_pow(1)
            .checked_div(&(&ScalarV::q_pow(1) - &ScalarV::one()))
            .expect("q - 1 != 0");
        for mu in self.realizable_slopes(n) {
            let mut residual = self.a_slope(mu, n)?;
            let mut dims: Vec<DimVector> = q
                .enumerate_dimvectors(n)
                .into_iter()
                .filter(|d| slope(&self.theta, d).expect("nonzero") == mu)
                .collect();
            dims.sort_by_key(|d| (d.total(), d.clone()));
            for d in dims {
                let c = residual.coeff(&d);
                if c.is_zero() {
                    continue;
                }
                let omega = c.checked_div(&lead).expect("lead nonzero");
                let Some(omega) = omega.as_int() else {
                    return Err(EngineError::NonIntegralInvariant {
                        dim: d,
                        value: omega.to_string(),
                    });
                };
                let omega_i64 = i64::try_from(omega.clone()).map_err(|_| {
                    EngineError::NonIntegralInvariant {
                        dim: d.clone(),
                        value: omega.to_string(),
                    }
                })?;
                let factor = dilog(q, &d, DilogBase::Q, 0, n)?;
                residual = residual.mul(&factor.pow(-omega_i64, q)?, q)?;
                table.ordinary.insert(d, omega_i64);
            }
            if !residual
                .sub(&TorusSeries::unit(q.node_count(), n))?
                .is_zero()
            {
                table.residual_ok = false;
            }
        }
        Ok(table)
    }

    /// Dilogarithm factors of the slope-zero series as they contribute
    /// against `xi_e`: base switched to `q^2` and the argument rescaled by
    /// `q^{1/2 - chi(e,d) - E(d)}`.
    fn sigma_dilog_factors(
        &self,
        omega_zero: &BTreeMap<DimVector, i64>,
        e: &DimVector,
    ) -> Vec<DilogFactor> {
        omega_zero
            .iter()
            .map(|(d, &om)| DilogFactor {
                d: d.clone(),
                base: DilogBase::QSquared,
                shift_v: 1 - 2 * self.quiver.euler_form(e, d) - 2 * self.quiver.sd_euler(d),
                exponent: om,
            })
            .collect()
    }

    /// The module series contributed by a unit `Omega^sigma_e`: the rescaled
    /// slope-zero dilog product acting on `xi_e`.
    pub fn sigma_factor_series(
        &self,
        omega_zero: &BTreeMap<DimVector, i64>,
        e: &DimVector,
        n: u32,
    ) -> Result<ModuleSeries, EngineError> {
        let factors = self.sigma_dilog_factors(omega_zero, e);
        let product = crate::series::rescale_dilog_product(self.quiver, &factors, &|_| 0, n)?;
        let xi = ModuleSeries::basis(self.quiver, e.clone(), n)
            .map_err(|_| EngineError::Inadmissible(e.clone()))?;
        Ok(product.act(&xi, self.quiver)?)
    }

    /// Solve the triangular orientifold factorization for `Omega^sigma_e`,
    /// checking integrality and nonnegativity of every extracted invariant.
    pub fn oridt_factorize(&self, n: u32) -> Result<OmegaTable, EngineError> {
        if !self.quiver.is_sigma_compatible(&self.theta) {
            return Err(EngineError::NotSigmaCompatible);
        }
        let q = self.quiver;
        let mut table = self.dt_factorize(n)?;
        let omega_zero = self.slope_zero_omegas(&table);
        let mut residual = self.orientifold_series(n)?;
        let mut keys = q.enumerate_selfdual(n);
        keys.sort_by_key(|e| (e.total(), e.clone()));
        for e in keys {
            let c = residual.coeff(&e);
            if c.is_zero() {
                continue;
            }
            let omega = c.as_int().ok_or_else(|| EngineError::NonIntegralInvariant {
                dim: e.clone(),
                value: c.to_string(),
            })?;
            if omega < BigInt::zero() {
                return Err(EngineError::NonIntegralInvariant {
                    dim: e,
                    value: omega.to_string(),
                });
            }
            let omega_i64 =
                i64::try_from(omega.clone()).map_err(|_| EngineError::NonIntegralInvariant {
                    dim: e.clone(),
                    value: omega.to_string(),
                })?;
            let contribution = self.sigma_factor_series(&omega_zero, &e, n)?;
            residual = residual.sub(&contribution.scale(&ScalarV::from_int(omega_i64)))?;
            table.sigma.insert(e, omega_i64);
        }
        if !residual.is_zero() {
            table.residual_ok = false;
        }
        Ok(table)
    }

    fn slope_zero_omegas(&self, table: &OmegaTable) -> BTreeMap<DimVector, i64> {
        table
            .ordinary
            .iter()
            .filter(|(d, _)| slope(&self.theta, d).expect("nonzero") == Slope::zero())
            .map(|(d, &o)| (d.clone(), o))
            .collect()
    }

    /// Re-expand an `OmegaTable` through the orientifold factorization.
    pub fn oridt_expand(&self, table: &OmegaTable, n: u32) -> Result<ModuleSeries, EngineError> {
        let omega_zero = self.slope_zero_omegas(table);
        let mut out = ModuleSeries::zero(n);
        for (e, &om) in &table.sigma {
            let series = self.sigma_factor_series(&omega_zero, e, n)?;
            out = out.add(&series.scale(&ScalarV::from_int(om)))?;
        }
        Ok(out)
    }

    /// Re-expand the ordinary factorization of the slope-`mu` series.
    pub fn dt_expand_slope(
        &self,
        table: &OmegaTable,
        mu: Slope,
        n: u32,
    ) -> Result<TorusSeries, EngineError> {
        let q = self.quiver;
        let mut out = TorusSeries::unit(q.node_count(), n);
        let mut dims: Vec<(&DimVector, i64)> = table
            .ordinary
            .iter()
            .filter(|(d, _)| slope(&self.theta, d).expect("nonzero") == mu)
            .map(|(d, &o)| (d, o))
            .collect();
        dims.sort_by_key(|(d, _)| (d.total(), (*d).clone()));
        for (d, om) in dims {
            let factor = dilog(q, d, DilogBase::Q, 0, n)?;
            out = out.mul(&factor.pow(om, q)?, q)?;
        }
        Ok(out)
    }
}

/// Extracted DT invariants with the genericity verdict.
#[derive(Clone, Debug, Serialize)]
pub struct OmegaTable {
    /// Ordinary invariants `Omega_d`, nonzero entries only.
    pub ordinary: BTreeMap<DimVector, i64>,
    /// Orientifold invariants `Omega^sigma_e`; the zero class always carries 1.
    pub sigma: BTreeMap<DimVector, i64>,
    pub finite_type: bool,
    pub sigma_generic: bool,
    /// Whether the factorizations reproduced the series exactly up to the bound.
    pub residual_ok: bool,
}

impl OmegaTable {
    fn new(finite_type: bool, sigma_generic: bool) -> Self {
        OmegaTable {
            ordinary: BTreeMap::new(),
            sigma: BTreeMap::new(),
            finite_type,
            sigma_generic,
            residual_ok: true,
        }
    }

    pub fn omega(&self, d: &DimVector) -> i64 {
        self.ordinary.get(d).copied().unwrap_or(0)
    }

    pub fn omega_sigma(&self, e: &DimVector) -> i64 {
        if e.is_zero() {
            return self.sigma.get(e).copied().unwrap_or(1);
        }
        self.sigma.get(e).copied().unwrap_or(0)
    }
}

/// Outcome of a wall-crossing comparison between two stabilities.
#[derive(Clone, Debug, Serialize)]
pub struct WallcrossReport {
    pub equal: bool,
    /// Smallest differing key with both coefficients, when unequal.
    pub first_difference: Option<(DimVector, String, String)>,
}

/// Compare `prod A^theta_mu ⋆ A^{sigma,theta}` across two stabilities.
pub fn wallcross_check(
    quiver: &QuiverWithDuality,
    theta_a: Stability,
    theta_b: Stability,
    n: u32,
) -> Result<WallcrossReport, EngineError> {
    let lhs = invariant_product(quiver, theta_a, n)?;
    let rhs = invariant_product(quiver, theta_b, n)?;
    match lhs.first_difference(&rhs) {
        None => Ok(WallcrossReport {
            equal: true,
            first_difference: None,
        }),
        Some((d, a, b)) => Ok(WallcrossReport {
            equal: false,
            first_difference: Some((d, a.to_string(), b.to_string())),
        }),
    }
}

/// The theta-independent module element `prod A^theta_mu ⋆ A^{sigma,theta}`.
pub fn invariant_product(
    quiver: &QuiverWithDuality,
    theta: Stability,
    n: u32,
) -> Result<ModuleSeries, EngineError> {
    if !quiver.is_sigma_compatible(&theta) {
        return Err(EngineError::NotSigmaCompatible);
    }
    let cache = SeriesCache::new(quiver, theta);
    let product = cache.positive_slope_product(n)?;
    Ok(product.act(&cache.orientifold_series(n)?, quiver)?)
}

/// Primitive wall-crossing data for a single pair `(d, e)`.
#[derive(Clone, Debug, Serialize)]
pub struct PrimitiveWcf {
    /// `I(d, e) = <e, d> + E~(d)`.
    pub i_value: i64,
    /// `(-1)^(I-1) * I * Omega_d * Omega^sigma_e`.
    pub delta: i64,
    pub warnings: Vec<String>,
}

/// Evaluate the primitive wall-crossing formula.
pub fn primitive_wcf(
    quiver: &QuiverWithDuality,
    d: &DimVector,
    e: &DimVector,
    omega_d: i64,
    omega_sigma_e: i64,
) -> PrimitiveWcf {
    let mut warnings = Vec::new();
    if !quiver.is_admissible_selfdual(e) {
        warnings.push(format!("e = {e} is not admissible sigma-symmetric"));
    }
    let sd = quiver.sigma_dim(d);
    if d == &sd || d == e || &sd == e {
        warnings.push("d, sigma(d), e are not pairwise distinct".to_string());
    }
    if !d.is_zero() && !d.is_primitive() {
        warnings.push(format!("d = {d} is not primitive"));
    }
    if !e.is_zero() && !e.is_primitive() {
        warnings.push(format!("e = {e} is not primitive"));
    }
    let i_value = quiver.skew_form(e, d) + quiver.sd_euler_skew(d);
    let sign = if (i_value - 1).rem_euclid(2) == 0 { 1 } else { -1 };
    PrimitiveWcf {
        i_value,
        delta: sign * i_value * omega_d * omega_sigma_e,
        warnings,
    }
}
