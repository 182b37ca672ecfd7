//! Dense univariate polynomials over arbitrary-precision integers.
//!
//! These are the raw numerators and denominators of [`crate::scalar::ScalarV`].
//! The zero polynomial is the empty coefficient vector; otherwise the leading
//! coefficient is nonzero.

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::from_coeffs(vec![c])
    }

    /// Coefficient `c` times `v^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        IntPoly::from_coeffs(coeffs)
    }

    /// Build from ascending coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        IntPoly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    /// Index of the lowest nonzero coefficient (0 for the zero polynomial).
    pub fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(0)
    }

    /// Multiply by `v^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        IntPoly { coeffs }
    }

    /// Exact division by `v^k`; requires valuation >= k.
    pub fn shift_down(&self, k: usize) -> Self {
        if self.is_zero() {
            return IntPoly::zero();
        }
        assert!(self.valuation() >= k, "shift_down below valuation");
        IntPoly::from_coeffs(self.coeffs[k..].to_vec())
    }

    pub fn neg(&self) -> Self {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + rhs.coeff(k));
        }
        IntPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        IntPoly::from_coeffs(coeffs)
    }

    pub fn mul_scalar(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return IntPoly::zero();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = IntPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact polynomial division; `None` if `d` does not divide `self` in Z[v].
    pub fn divexact(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let dn = self.degree()?;
        let dd = d.degree().expect("nonzero divisor");
        if dn < dd {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); dn - dd + 1];
        let lead = d.leading();
        for k in (0..=dn - dd).rev() {
            let top = rem[k + dd].clone();
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&lead);
            if !r.is_zero() {
                return None;
            }
            for (j, c) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &q * c;
            }
            quot[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(IntPoly::from_coeffs(quot))
    }

    /// Nonnegative gcd of all coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    fn primitive_part(&self) -> Self {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return self.clone();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|a| a / &c).collect(),
        }
    }

    /// Pseudo-remainder of `self` by `d`: remainder of `lc(d)^k * self`.
    fn pseudo_rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("nonzero divisor");
        let lead = d.leading();
        let mut rem = self.clone();
        while let Some(dr) = rem.degree() {
            if dr < dd {
                break;
            }
            // lc(d)*rem - lc(rem)*v^(dr-dd)*d cancels the leading term over Z.
            let top = rem.leading();
            rem = rem
                .mul_scalar(&lead)
                .sub(&d.mul(&IntPoly::monomial(top, dr - dd)));
            debug_assert!(rem.degree().is_none_or(|g| g < dr));
        }
        rem
    }

    /// Gcd in Z[v] with positive leading coefficient, via the primitive
    /// Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.normalized_sign();
        }
        if other.is_zero() {
            return self.normalized_sign();
        }
        let content = self.content().gcd(&other.content());
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a.primitive_part().mul_scalar(&content).normalized_sign()
    }

    fn normalized_sign(&self) -> Self {
        if self.leading().is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Evaluate at `v = sqrt(p)`, returning `(a, b)` with value `a + b*sqrt(p)`.
    pub fn eval_at_sqrt(&self, p: &BigInt) -> (BigInt, BigInt) {
        let mut even = BigInt::zero();
        let mut odd = BigInt::zero();
        let mut ppow = BigInt::one();
        let mut k = 0usize;
        while 2 * k < self.coeffs.len() {
            even += self.coeff(2 * k) * &ppow;
            if 2 * k + 1 < self.coeffs.len() {
                odd += self.coeff(2 * k + 1) * &ppow;
            }
            ppow *= p;
            k += 1;
        }
        (even, odd)
    }

    /// The polynomial `f(-v)`.
    pub fn substitute_neg(&self) -> Self {
        IntPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }
}
