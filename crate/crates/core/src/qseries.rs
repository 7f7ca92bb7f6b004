//! Truncated Laurent series in `q` with exact rational coefficients.
//!
//! A [`TruncatedSeries`] stores a lowest exponent (`shift`), a dense run of
//! coefficients starting there, and an `order`: every coefficient of
//! `q^e` with `e <= order` is known exactly, nothing above it is. Stored
//! coefficients may stop before `order`; the missing tail is known to be
//! zero. Reading above `order` is an error, never a silent zero.
//!
//! Order bookkeeping is pessimistic:
//!
//! * `a * b`: order `min(a.order + b.shift, b.order + a.shift)`
//! * `a / b`: order `min(a.order - b.shift, b.order + a.shift - 2 b.shift)`
//! * `a + b`: order `min(a.order, b.order)`
//!
//! Multiplication is schoolbook. When every coefficient involved is an
//! integer the convolution runs on `BigInt` directly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::{rat_int, BigRational};

#[derive(Debug, Clone)]
pub struct TruncatedSeries {
    shift: i64,
    coeffs: Vec<BigRational>,
    order: i64,
}

/// Equal orders and equal coefficients; trailing zeros are ignored.
impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        fn trimmed(c: &[BigRational]) -> &[BigRational] {
            let end = c.iter().rposition(|x| !x.is_zero()).map_or(0, |i| i + 1);
            &c[..end]
        }
        self.order == other.order
            && (self.is_zero() && other.is_zero()
                || self.shift == other.shift && trimmed(&self.coeffs) == trimmed(&other.coeffs))
    }
}

impl Eq for TruncatedSeries {}

/// Result of comparing two series on their common range of validity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesComparison {
    /// Exponents `<= bound` were compared.
    pub bound: i64,
    pub first_mismatch: Option<i64>,
}

impl SeriesComparison {
    pub fn agrees(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

impl TruncatedSeries {
    /// Builds `sum_i coeffs[i] q^(shift + i) + O(q^(order + 1))`.
    /// Coefficients past `order` are dropped; leading zeros are stripped.
    pub fn new(shift: i64, coeffs: Vec<BigRational>, order: i64) -> Self {
        let mut s = TruncatedSeries { shift, coeffs, order };
        s.normalize();
        s
    }

    pub fn from_integers<I, T>(shift: i64, coeffs: I, order: i64) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        Self::new(shift, coeffs.into_iter().map(|c| rat_int(c.into())).collect(), order)
    }

    pub fn zero(order: i64) -> Self {
        TruncatedSeries { shift: order + 1, coeffs: Vec::new(), order }
    }

    pub fn one(order: i64) -> Self {
        Self::monomial(BigRational::one(), 0, order)
    }

    pub fn monomial(c: BigRational, exponent: i64, order: i64) -> Self {
        Self::new(exponent, vec![c], order)
    }

    fn normalize(&mut self) {
        let span = self.order - self.shift + 1;
        if span <= 0 {
            self.coeffs.clear();
        } else if self.coeffs.len() as i64 > span {
            self.coeffs.truncate(span as usize);
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(0) => {}
            Some(k) => {
                self.coeffs.drain(..k);
                self.shift += k as i64;
            }
            None => {
                self.coeffs.clear();
                self.shift = self.order + 1;
            }
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Lowest exponent with a nonzero coefficient (`order + 1` for zero).
    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coefficient(&self) -> Option<&BigRational> {
        self.coeffs.first()
    }

    /// Coefficient of `q^exponent`.
    pub fn coefficient(&self, exponent: i64) -> Result<BigRational> {
        if exponent > self.order {
            return Err(Error::UntrustedCoefficient { exponent, order: self.order });
        }
        Ok(self.stored(exponent).cloned().unwrap_or_else(BigRational::zero))
    }

    fn stored(&self, exponent: i64) -> Option<&BigRational> {
        let i = exponent - self.shift;
        if i < 0 {
            None
        } else {
            self.coeffs.get(i as usize)
        }
    }

    /// Coefficients of `q^from ..= q^to`.
    pub fn coefficients(&self, from: i64, to: i64) -> Result<Vec<BigRational>> {
        if to > self.order {
            return Err(Error::UntrustedCoefficient { exponent: to, order: self.order });
        }
        Ok((from..=to)
            .map(|e| self.stored(e).cloned().unwrap_or_else(BigRational::zero))
            .collect())
    }

    /// Nonzero-run iterator of `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.shift + i as i64, c))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.numer().clone()))
            .collect()
    }

    pub fn truncate(&self, order: i64) -> Self {
        Self::new(self.shift, self.coeffs.clone(), order.min(self.order))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.shift, self.coeffs.iter().map(|x| x * c).collect(), self.order)
    }

    /// Multiplies by `q^k`.
    pub fn mul_q_power(&self, k: i64) -> Self {
        TruncatedSeries { shift: self.shift + k, coeffs: self.coeffs.clone(), order: self.order + k }
    }

    /// Substitutes `q -> q^t` for a positive integer `t`.
    pub fn substitute_power(&self, t: u64) -> Self {
        assert!(t >= 1);
        let t = t as i64;
        if t == 1 {
            return self.clone();
        }
        let mut coeffs = vec![BigRational::zero(); (self.coeffs.len().max(1) - 1) * t as usize + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * t as usize] = c.clone();
        }
        Self::new(self.shift * t, coeffs, (self.order + 1) * t - 1)
    }

    pub fn product(&self, other: &Self) -> Self {
        let shift = self.shift + other.shift;
        let order = (self.order + other.shift).min(other.order + self.shift);
        if self.is_zero() || other.is_zero() || order < shift {
            return Self::zero(order);
        }
        let len = ((order - shift + 1) as usize).min(self.coeffs.len() + other.coeffs.len() - 1);
        let coeffs = match (self.integer_coeffs(), other.integer_coeffs()) {
            (Some(a), Some(b)) => convolve_int(&a, &b, len).into_iter().map(rat_int).collect(),
            _ => convolve_rat(&self.coeffs, &other.coeffs, len),
        };
        TruncatedSeries::new(shift, coeffs, order)
    }

    /// `self / divisor` by long division normalized on the divisor's leading
    /// coefficient.
    pub fn quotient(&self, divisor: &Self) -> Result<Self> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZeroSeries { order: divisor.order });
        }
        let shift = self.shift - divisor.shift;
        let order = (self.order - divisor.shift).min(divisor.order + self.shift - 2 * divisor.shift);
        Ok(divide(shift, &self.coeffs, self.is_zero(), divisor, order))
    }

    pub fn reciprocal(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZeroSeries { order: self.order });
        }
        let one = [BigRational::one()];
        let order = self.order - 2 * self.shift;
        Ok(divide(-self.shift, &one, false, self, order))
    }

    /// Integer power; negative exponents go through [`Self::reciprocal`].
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.pow(-e)?.reciprocal();
        }
        if e == 0 {
            if self.is_zero() {
                return Err(Error::DivisionByZeroSeries { order: self.order });
            }
            return Ok(Self::one(self.order - self.shift));
        }
        let mut base = self.clone();
        let mut acc: Option<Self> = None;
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.product(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.product(&base);
            }
        }
        Ok(acc.unwrap())
    }

    /// The operator `q d/dq`.
    pub fn q_derivative(&self) -> Self {
        let coeffs = self
            .terms()
            .map(|(e, c)| c * rat_int(e))
            .collect();
        Self::new(self.shift, coeffs, self.order)
    }

    fn combine(&self, other: &Self, negate_other: bool) -> Self {
        let order = self.order.min(other.order);
        let shift = self.shift.min(other.shift);
        if shift > order {
            return Self::zero(order);
        }
        let end = (self.shift + self.coeffs.len() as i64)
            .max(other.shift + other.coeffs.len() as i64)
            .min(order + 1);
        let coeffs = (shift..end)
            .map(|e| {
                let a = self.stored(e);
                let b = other.stored(e);
                match (a, b) {
                    (Some(a), Some(b)) if negate_other => a - b,
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) if negate_other => -b,
                    (None, Some(b)) => b.clone(),
                    (None, None) => BigRational::zero(),
                }
            })
            .collect();
        Self::new(shift, coeffs, order)
    }

    /// Compares coefficients through `min(self.order, other.order)`.
    pub fn compare(&self, other: &Self) -> SeriesComparison {
        let bound = self.order.min(other.order);
        let start = self.shift.min(other.shift);
        let first_mismatch = (start..=bound).find(|&e| {
            let zero = BigRational::zero();
            self.stored(e).unwrap_or(&zero) != other.stored(e).unwrap_or(&zero)
        });
        SeriesComparison { bound, first_mismatch }
    }

    /// `[[exponent, "num/den"], ...]` for every exponent from the shift
    /// through the order.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = (self.shift..=self.order)
            .map(|e| {
                let c = self.stored(e).cloned().unwrap_or_else(BigRational::zero);
                json!([e, format!("{}/{}", c.numer(), c.denom())])
            })
            .collect();
        Value::Array(terms)
    }
}

fn convolve_int(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn convolve_rat(a: &[BigRational], b: &[BigRational], len: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn divide(
    shift: i64,
    numerator: &[BigRational],
    numerator_zero: bool,
    divisor: &TruncatedSeries,
    order: i64,
) -> TruncatedSeries {
    if numerator_zero || order < shift {
        return TruncatedSeries::zero(order);
    }
    let len = (order - shift + 1) as usize;
    let d = &divisor.coeffs;
    let lead = &d[0];
    let all_int = lead.is_integer()
        && lead.numer().abs().is_one()
        && numerator.iter().take(len).all(|c| c.is_integer())
        && d.iter().take(len).all(|c| c.is_integer());
    let coeffs: Vec<BigRational> = if all_int {
        let unit = lead.numer().clone();
        let dn: Vec<BigInt> = d.iter().take(len).map(|c| c.numer().clone()).collect();
        let mut out: Vec<BigInt> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = numerator.get(k).map(|c| c.numer().clone()).unwrap_or_default();
            for j in 1..=k.min(dn.len() - 1) {
                if !dn[j].is_zero() {
                    acc -= &dn[j] * &out[k - j];
                }
            }
            out.push(acc * &unit);
        }
        out.into_iter().map(rat_int).collect()
    } else {
        let inv = lead.recip();
        let mut out: Vec<BigRational> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = numerator.get(k).cloned().unwrap_or_else(BigRational::zero);
            for j in 1..=k.min(d.len() - 1) {
                if !d[j].is_zero() {
                    acc -= &d[j] * &out[k - j];
                }
            }
            out.push(acc * &inv);
        }
        out
    };
    TruncatedSeries::new(shift, coeffs, order)
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        self.combine(rhs, false)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        self.combine(rhs, true)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        self.product(rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { shift: self.shift, coeffs: self.coeffs.iter().map(|c| -c).collect(), order: self.order }
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag = c.abs();
            if first {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            first = false;
            let unit = mag.is_one();
            match e {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !unit {
                        write!(f, "{mag}*")?;
                    }
                    if e == 1 {
                        f.write_str("q")?;
                    } else {
                        write!(f, "q^{e}")?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})", self.order + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn ints(shift: i64, c: &[i64], order: i64) -> TruncatedSeries {
        TruncatedSeries::from_integers(shift, c.iter().copied(), order)
    }

    /// `prod_{n>=1} (1 - q^n)` by direct multiplication of binomials.
    fn euler_product(order: i64) -> TruncatedSeries {
        let mut acc = TruncatedSeries::one(order);
        for n in 1..=order {
            let mut c = vec![0i64; n as usize + 1];
            c[0] = 1;
            c[n as usize] = -1;
            acc = &acc * &ints(0, &c, order);
        }
        acc
    }

    #[test]
    fn product_examples() {
        let p = &ints(0, &[1, 1], 10) * &ints(0, &[1, -1], 10);
        assert_eq!(p.coefficients(0, 10).unwrap(), ints(0, &[1, 0, -1], 10).coefficients(0, 10).unwrap());
        let a = ints(1, &[2, 3], 10);
        let b = ints(-1, &[5, 7], 10);
        let ab = &a * &b;
        assert_eq!(ab.shift(), 0);
        assert_eq!(ab.order(), 9);
        assert_eq!(ab.coefficient(0).unwrap(), rat(10, 1));
    }

    #[test]
    fn geometric_series() {
        let g = ints(0, &[1], 12).quotient(&ints(0, &[1, -1], 12)).unwrap();
        assert_eq!(g.order(), 12);
        for e in 0..=12 {
            assert_eq!(g.coefficient(e).unwrap(), rat(1, 1));
        }
        assert!(g.coefficient(13).is_err());
    }

    #[test]
    fn self_quotient_is_one() {
        let x = TruncatedSeries::new(2, vec![rat(3, 7), rat(-1, 2), rat(5, 1)], 20);
        let one = x.quotient(&x).unwrap();
        assert_eq!(one.shift(), 0);
        assert!(one.compare(&TruncatedSeries::one(100)).agrees());
    }

    #[test]
    fn pentagonal_times_reciprocal() {
        let e = euler_product(40);
        let r = e.reciprocal().unwrap();
        let one = &e * &r;
        assert_eq!(one.order(), 40);
        assert!(one.compare(&TruncatedSeries::one(40)).agrees());
        // 1/(q;q)_inf counts partitions
        assert_eq!(r.coefficient(10).unwrap(), rat(42, 1));
    }

    #[test]
    fn division_by_zero_series() {
        let z = TruncatedSeries::zero(5);
        assert!(matches!(ints(0, &[1], 5).quotient(&z), Err(Error::DivisionByZeroSeries { .. })));
        // zero up to order, even though constructed with explicit zeros
        let z2 = ints(0, &[0, 0, 0], 2);
        assert!(z2.is_zero());
        assert!(z2.reciprocal().is_err());
    }

    #[test]
    fn untrusted_coefficients_are_errors() {
        let s = ints(0, &[1, 2], 3);
        assert_eq!(s.coefficient(3).unwrap(), rat(0, 1));
        assert_eq!(s.coefficient(-4).unwrap(), rat(0, 1));
        assert!(matches!(s.coefficient(4), Err(Error::UntrustedCoefficient { exponent: 4, order: 3 })));
    }

    #[test]
    fn q_derivative_rules() {
        assert!(ints(0, &[7], 10).q_derivative().is_zero());
        let m = ints(5, &[1], 10).q_derivative();
        assert_eq!(m.coefficient(5).unwrap(), rat(5, 1));
        assert_eq!(m.order(), 10);
        let l = ints(-2, &[1, 0, 3], 10).q_derivative();
        assert_eq!(l.coefficient(-2).unwrap(), rat(-2, 1));
        assert_eq!(l.coefficient(0).unwrap(), rat(0, 1));
    }

    #[test]
    fn substitute_power_orders() {
        let s = ints(0, &[1, 2, 3], 2).substitute_power(3);
        assert_eq!(s.order(), 8);
        assert_eq!(s.coefficient(3).unwrap(), rat(2, 1));
        assert_eq!(s.coefficient(4).unwrap(), rat(0, 1));
        assert_eq!(s.coefficient(6).unwrap(), rat(3, 1));
    }

    #[test]
    fn negative_power_roundtrip() {
        let s = ints(1, &[1, -3, 2, 5], 30);
        let back = &s.pow(3).unwrap() * &s.pow(-3).unwrap();
        assert!(back.compare(&TruncatedSeries::one(1000)).agrees());
        assert_eq!(back.shift(), 0);
    }

    #[test]
    fn display_and_json() {
        let s = TruncatedSeries::new(0, vec![rat(1, 1), rat(-2, 1), rat(0, 1), rat(1, 3)], 4);
        assert_eq!(s.to_string(), "1 - 2*q + 1/3*q^3 + O(q^5)");
        assert_eq!(TruncatedSeries::zero(2).to_string(), "0 + O(q^3)");
        let j = s.to_json();
        assert_eq!(j[0], json!([0, "1/1"]));
        assert_eq!(j[3], json!([3, "1/3"]));
        assert_eq!(j.as_array().unwrap().len(), 5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        const ORDER: i64 = 64;

        fn series() -> impl Strategy<Value = TruncatedSeries> {
            (-3i64..4, prop::collection::vec(-9i64..=9, 1..=65))
                .prop_map(|(shift, c)| TruncatedSeries::from_integers(shift, c, ORDER))
        }

        fn unit_series() -> impl Strategy<Value = TruncatedSeries> {
            (prop::sample::select(vec![-1i64, 1, 2, -3]), prop::collection::vec(-9i64..=9, 0..=64)).prop_map(|(lead, mut c)| {
                c.insert(0, lead);
                TruncatedSeries::from_integers(0, c, ORDER)
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn ring_axioms(a in series(), b in series(), c in series()) {
                prop_assert!((&a * &b).compare(&(&b * &a)).agrees());
                prop_assert!((&(&a * &b) * &c).compare(&(&a * &(&b * &c))).agrees());
                prop_assert!((&a * &(&b + &c)).compare(&(&(&a * &b) + &(&a * &c))).agrees());
                prop_assert!((&a + &b).compare(&(&b + &a)).agrees());
                prop_assert!((&a - &a).is_zero());
            }

            #[test]
            fn quotient_roundtrip(a in series(), b in unit_series()) {
                let q = a.quotient(&b).unwrap();
                let back = &q * &b;
                let cmp = back.compare(&a);
                prop_assert!(cmp.agrees());
                prop_assert_eq!(cmp.bound, back.order());
            }

            #[test]
            fn leibniz_rule(a in series(), b in series()) {
                let lhs = (&a * &b).q_derivative();
                let rhs = &(&a.q_derivative() * &b) + &(&a * &b.q_derivative());
                prop_assert!(lhs.compare(&rhs).agrees());
            }

            #[test]
            fn truncation_is_stable(a in series(), b in unit_series(), cut in 10i64..60) {
                let full = a.quotient(&b).unwrap();
                let short = a.truncate(cut).quotient(&b.truncate(cut)).unwrap();
                let cmp = short.compare(&full);
                prop_assert!(cmp.agrees());
                prop_assert!(short.order() <= full.order());
            }
        }
    }
}
