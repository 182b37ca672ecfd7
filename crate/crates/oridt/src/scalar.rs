//! Exact scalars in Q(v) with the convention v^2 = q.
//!
//! A [`ScalarV`] is `v^off * num(v) / den(v)` in canonical form: numerator and
//! denominator are coprime integer polynomials with nonzero constant terms,
//! the denominator has a positive leading coefficient, and all powers of `v`
//! are carried by the integer offset. Structural equality of canonical forms
//! is exact equality in Q(v). Half-integer powers of `q` are integer powers
//! of `v`, so no separate parity bookkeeping is needed.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::IntPoly;
use crate::quiver::{DimVector, QuiverWithDuality};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScalarError {
    #[error("division by zero scalar")]
    DivisionByZero,
    #[error("denominator vanishes at v = sqrt({0})")]
    PoleAtPoint(u64),
    #[error("{0} is not an odd prime")]
    EvenPrime(u64),
    #[error("q-combinatorics arguments out of range: n = {n}, k = {k}")]
    OutOfRange { n: i64, k: i64 },
    #[error("dimension vector {0} is not sigma-symmetric")]
    NotSymmetric(DimVector),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarV {
    off: i64,
    num: IntPoly,
    den: IntPoly,
}

impl ScalarV {
    pub fn zero() -> Self {
        ScalarV {
            off: 0,
            num: IntPoly::zero(),
            den: IntPoly::one(),
        }
    }

    pub fn one() -> Self {
        ScalarV::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        ScalarV::from_bigint(BigInt::from(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        ScalarV {
            off: 0,
            num: IntPoly::constant(n),
            den: IntPoly::one(),
        }
        .canonical()
    }

    /// `v^e` for any integer `e`.
    pub fn v_pow(e: i64) -> Self {
        ScalarV {
            off: e,
            num: IntPoly::one(),
            den: IntPoly::one(),
        }
    }

    /// `q^k = v^(2k)` for any integer `k`.
    pub fn q_pow(k: i64) -> Self {
        ScalarV::v_pow(2 * k)
    }

    /// Build `v^off * num / den` and canonicalize.
    pub fn from_parts(off: i64, num: IntPoly, den: IntPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(ScalarV { off, num, den }.canonical())
    }

    fn canonical(mut self) -> Self {
        if self.num.is_zero() {
            return ScalarV::zero();
        }
        let a = self.num.valuation();
        let b = self.den.valuation();
        self.num = self.num.shift_down(a);
        self.den = self.den.shift_down(b);
        self.off += a as i64 - b as i64;
        let g = self.num.gcd(&self.den);
        if !g.is_one() {
            self.num = self.num.divexact(&g).expect("gcd divides numerator");
            self.den = self.den.divexact(&g).expect("gcd divides denominator");
        }
        if self.den.leading().is_negative() {
            self.num = self.num.neg();
            self.den = self.den.neg();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.off == 0 && self.num.is_one() && self.den.is_one()
    }

    /// The constant integer value, if the scalar is one.
    pub fn as_int(&self) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        if self.off == 0 && self.den.is_one() && self.num.degree() == Some(0) {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(ScalarV {
            off: -self.off,
            num: self.den.clone(),
            den: self.num.clone(),
        }
        .canonical())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = ScalarV::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// The scalar `f(-v)`.
    pub fn substitute_neg_v(&self) -> Self {
        let mut num = self.num.substitute_neg();
        let den = self.den.substitute_neg();
        if self.off.rem_euclid(2) == 1 {
            num = num.neg();
        }
        ScalarV {
            off: self.off,
            num,
            den,
        }
        .canonical()
    }

    /// True when the scalar is a rational function of q = v^2 alone.
    pub fn is_even_in_v(&self) -> bool {
        *self == self.substitute_neg_v()
    }

    /// Evaluate at `v = sqrt(p)` for an odd prime `p`, returning `(a, b)` with
    /// value `a + b*sqrt(p)` as exact rationals.
    pub fn specialize(&self, p: u64) -> Result<(BigRational, BigRational), ScalarError> {
        if !is_odd_prime(p) {
            return Err(ScalarError::EvenPrime(p));
        }
        let pb = BigInt::from(p);
        let (na, nb) = self.num.eval_at_sqrt(&pb);
        let (da, db) = self.den.eval_at_sqrt(&pb);
        // 1/(da + db*sqrt(p)) = (da - db*sqrt(p)) / (da^2 - p*db^2)
        let norm = &da * &da - &pb * &db * &db;
        if norm.is_zero() {
            return Err(ScalarError::PoleAtPoint(p));
        }
        let mut a = BigRational::new(&na * &da - &pb * &nb * &db, norm.clone());
        let mut b = BigRational::new(&nb * &da - &na * &db, norm);
        // multiply by v^off = p^(off/2) (even) or p^((off-1)/2) * sqrt(p) (odd)
        let half = self.off.div_euclid(2);
        let ppow = if half >= 0 {
            BigRational::from_integer(pb.pow(half as u32))
        } else {
            BigRational::new(BigInt::one(), pb.pow((-half) as u32))
        };
        a *= &ppow;
        b *= &ppow;
        if self.off.rem_euclid(2) == 1 {
            // an extra factor sqrt(p): (a + b sqrt(p)) sqrt(p) = pb + a sqrt(p)
            let pa = BigRational::from_integer(pb);
            let new_a = &b * &pa;
            let new_b = a;
            a = new_a;
            b = new_b;
        }
        Ok((a, b))
    }
}

impl Add for &ScalarV {
    type Output = ScalarV;
    fn add(self, rhs: &ScalarV) -> ScalarV {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let off = self.off.min(rhs.off);
        let left = self
            .num
            .shift_up((self.off - off) as usize)
            .mul(&rhs.den);
        let right = rhs.num.shift_up((rhs.off - off) as usize).mul(&self.den);
        ScalarV {
            off,
            num: left.add(&right),
            den: self.den.mul(&rhs.den),
        }
        .canonical()
    }
}

impl Sub for &ScalarV {
    type Output = ScalarV;
    fn sub(self, rhs: &ScalarV) -> ScalarV {
        self + &(-rhs)
    }
}

impl Mul for &ScalarV {
    type Output = ScalarV;
    fn mul(self, rhs: &ScalarV) -> ScalarV {
        if self.is_zero() || rhs.is_zero() {
            return ScalarV::zero();
        }
        ScalarV {
            off: self.off + rhs.off,
            num: self.num.mul(&rhs.num),
            den: self.den.mul(&rhs.den),
        }
        .canonical()
    }
}

impl Div for &ScalarV {
    type Output = ScalarV;
    fn div(self, rhs: &ScalarV) -> ScalarV {
        self.checked_div(rhs).expect("scalar division by zero")
    }
}

impl Neg for &ScalarV {
    type Output = ScalarV;
    fn neg(self) -> ScalarV {
        ScalarV {
            off: self.off,
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

fn render_poly(p: &IntPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for k in (0..=p.degree().unwrap()).rev() {
        let c = p.coeff(k);
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push('-');
        } else {
            out.push('+');
        }
        let show_coeff = !mag.is_one() || k == 0;
        if show_coeff {
            out.push_str(&mag.to_string());
        }
        if k >= 1 {
            out.push('v');
            if k >= 2 {
                out.push_str(&format!("^{k}"));
            }
        }
    }
    out
}

fn is_single_term(p: &IntPoly) -> bool {
    p.coeffs().iter().filter(|c| !c.is_zero()).count() <= 1
}

impl fmt::Display for ScalarV {
    /// Canonical text form, e.g. `(v^3+v-1)/v^2`; `v = q^(1/2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let (num, den) = if self.off >= 0 {
            (self.num.shift_up(self.off as usize), self.den.clone())
        } else {
            (self.num.clone(), self.den.shift_up((-self.off) as usize))
        };
        let ns = render_poly(&num);
        if den.is_one() {
            return write!(f, "{ns}");
        }
        let ds = render_poly(&den);
        let ns = if is_single_term(&num) {
            ns
        } else {
            format!("({ns})")
        };
        let ds = if is_single_term(&den) {
            ds
        } else {
            format!("({ds})")
        };
        write!(f, "{ns}/{ds}")
    }
}

/// Stable serialization: coefficient lists as decimal strings plus the offset.
#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    off: i64,
    num: Vec<String>,
    den: Vec<String>,
}

impl Serialize for ScalarV {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ScalarRepr {
            off: self.off,
            num: self.num.coeffs().iter().map(|c| c.to_string()).collect(),
            den: self.den.coeffs().iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ScalarV {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(d)?;
        let parse = |v: &[String]| -> Result<IntPoly, D::Error> {
            let coeffs = v
                .iter()
                .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(IntPoly::from_coeffs(coeffs))
        };
        let num = parse(&repr.num)?;
        let den = parse(&repr.den)?;
        ScalarV::from_parts(repr.off, num, den).map_err(serde::de::Error::custom)
    }
}

fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `(q^{-step})_n = prod_{i=1}^n (1 - q^{-step*i})` as a scalar in v.
fn pochhammer_q_inv(step: u32, n: u32) -> ScalarV {
    let mut acc = ScalarV::one();
    for i in 1..=n {
        let term = &ScalarV::one() - &ScalarV::v_pow(-2 * (step as i64) * (i as i64));
        acc = &acc * &term;
    }
    acc
}

/// `(q^{-1})_n`.
pub fn pochhammer(n: u32) -> ScalarV {
    pochhammer_q_inv(1, n)
}

/// `(q^{-1})_d = prod_i (q^{-1})_{d_i}`.
pub fn pochhammer_dim(d: &DimVector) -> ScalarV {
    let mut acc = ScalarV::one();
    for &c in d.components() {
        acc = &acc * &pochhammer(c);
    }
    acc
}

/// `(q^{-1})^sigma_e`: `(q^{-2})_{floor(e_i/2)}` at fixed nodes and
/// `(q^{-1})_{e_i}` at the positive node of each swapped pair.
pub fn pochhammer_sigma(q: &QuiverWithDuality, e: &DimVector) -> Result<ScalarV, ScalarError> {
    if !q.is_sigma_symmetric(e) {
        return Err(ScalarError::NotSymmetric(e.clone()));
    }
    let mut acc = ScalarV::one();
    for i in q.fixed_nodes() {
        acc = &acc * &pochhammer_q_inv(2, e.get(i) / 2);
    }
    for i in q.plus_nodes() {
        acc = &acc * &pochhammer(e.get(i));
    }
    Ok(acc)
}

/// The q-integer `[n]_q = 1 + q + ... + q^(n-1)` as a polynomial in v^2.
pub fn q_integer(n: i64) -> Result<ScalarV, ScalarError> {
    if n < 0 {
        return Err(ScalarError::OutOfRange { n, k: 0 });
    }
    let mut acc = ScalarV::zero();
    for i in 0..n {
        acc = &acc + &ScalarV::q_pow(i);
    }
    Ok(acc)
}

/// The Gaussian binomial coefficient `binom(n, k)_q`.
pub fn q_binomial(n: i64, k: i64) -> Result<ScalarV, ScalarError> {
    if k < 0 || k > n {
        return Err(ScalarError::OutOfRange { n, k });
    }
    let mut acc = ScalarV::one();
    for i in 1..=k {
        let num = q_integer(n - k + i)?;
        let den = q_integer(i)?;
        acc = &acc * &num.checked_div(&den)?;
    }
    Ok(acc)
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn arb_poly() -> impl Strategy<Value = IntPoly> {
        proptest::collection::vec(-3i64..=3, 0..4).prop_map(|cs| IntPoly::from_i64s(&cs))
    }

    fn arb_scalar() -> impl Strategy<Value = ScalarV> {
        (arb_poly(), arb_poly(), -3i64..=3).prop_filter_map("nonzero denominator", |(n, d, off)| {
            if d.is_zero() {
                None
            } else {
                ScalarV::from_parts(off, n, d).ok()
            }
        })
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            // associativity and commutativity
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            // distributivity
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            // units and inverses
            prop_assert_eq!(&a + &ScalarV::zero(), a.clone());
            prop_assert_eq!(&a * &ScalarV::one(), a.clone());
            prop_assert_eq!(&a - &a, ScalarV::zero());
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn canonical_form_is_idempotent(a in arb_scalar()) {
            let again = a.clone().canonical();
            prop_assert_eq!(a, again);
        }

        #[test]
        fn specialization_is_multiplicative(a in arb_scalar(), b in arb_scalar()) {
            for p in [3u64, 5, 7] {
                let (Ok((a1, b1)), Ok((a2, b2))) = (a.specialize(p), b.specialize(p)) else {
                    continue;
                };
                if let Ok((pa, pb)) = (&a * &b).specialize(p) {
                    let pbig = BigRational::from_integer(BigInt::from(p));
                    prop_assert_eq!(pa, &a1 * &a2 + &pbig * &b1 * &b2);
                    prop_assert_eq!(pb, &a1 * &b2 + &a2 * &b1);
                }
            }
        }
    }

    #[test]
    fn pochhammer_dim_is_product_of_pochhammers() {
        use crate::quiver::DimVector;
        for comps in [[0u32, 1], [2, 3], [4, 0]] {
            let d = DimVector::from_slice(&comps);
            let expected = comps
                .iter()
                .fold(ScalarV::one(), |acc, &n| &acc * &pochhammer(n));
            assert_eq!(pochhammer_dim(&d), expected);
        }
    }
}
