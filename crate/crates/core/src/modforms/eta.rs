use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::qseries::TruncatedSeries;

/// `sign * prod eta(s_i z)^{r_i}`, written like `1^5 3^1 4^5 6^2 12^1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EtaQuotient {
    /// `(scale, exponent)`, sorted by scale, no zero exponents.
    factors: Vec<(u64, i64)>,
    sign: i8,
}

impl EtaQuotient {
    pub fn new(factors: impl IntoIterator<Item = (u64, i64)>, sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::Parse(format!("eta quotient sign must be +-1, got {sign}")));
        }
        let mut merged: BTreeMap<u64, i64> = BTreeMap::new();
        for (s, r) in factors {
            if s == 0 {
                return Err(Error::Parse("eta scale must be positive".into()));
            }
            *merged.entry(s).or_default() += r;
        }
        let factors = merged.into_iter().filter(|&(_, r)| r != 0).collect();
        Ok(EtaQuotient { factors, sign })
    }

    pub fn factors(&self) -> &[(u64, i64)] {
        &self.factors
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// `sum r_i s_i`; divisible by 24 exactly when the q-shift is integral.
    pub fn weight_sum(&self) -> i64 {
        self.factors.iter().map(|&(s, r)| s as i64 * r).sum()
    }

    pub fn shift(&self) -> Result<i64> {
        let sum = self.weight_sum();
        if sum % 24 != 0 {
            return Err(Error::NonIntegralShift { spec: self.to_string(), sum });
        }
        Ok(sum / 24)
    }

    pub fn scales(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(s, _)| s)
    }
}

/// Exponents `k(3k-1)/2` for all integers `k`, with sign `(-1)^k`, up to
/// `bound`, excluding the constant term. Pentagonal number theorem.
fn pentagonal_terms(bound: usize) -> Vec<(usize, bool)> {
    let mut out = Vec::new();
    let mut k: usize = 1;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        if g1 > bound {
            break;
        }
        let negative = k % 2 == 1;
        out.push((g1, negative));
        let g2 = k * (3 * k + 1) / 2;
        if g2 <= bound {
            out.push((g2, negative));
        }
        k += 1;
    }
    out.sort_unstable();
    out
}

/// `q^{shift} prod (q^s; q^s)_inf^r` through `q^order`.
pub fn eta_quotient_series(spec: &EtaQuotient, order: i64) -> Result<TruncatedSeries> {
    let shift = spec.shift()?;
    if order < shift {
        return Ok(TruncatedSeries::zero(order));
    }
    let len = (order - shift + 1) as usize;
    let mut c = vec![BigInt::zero(); len];
    c[0] = BigInt::from(spec.sign);
    for &(s, r) in &spec.factors {
        let s = s as usize;
        let terms: Vec<(usize, bool)> = pentagonal_terms((len - 1) / s)
            .into_iter()
            .map(|(e, neg)| (e * s, neg))
            .collect();
        if r > 0 {
            for _ in 0..r {
                // multiply in place, high to low
                for i in (1..len).rev() {
                    for &(e, neg) in &terms {
                        if e > i {
                            break;
                        }
                        let (lo, hi) = c.split_at_mut(i);
                        if neg {
                            hi[0] -= &lo[i - e];
                        } else {
                            hi[0] += &lo[i - e];
                        }
                    }
                }
            }
        } else {
            for _ in 0..-r {
                // divide in place, low to high
                for i in 1..len {
                    for &(e, neg) in &terms {
                        if e > i {
                            break;
                        }
                        let (lo, hi) = c.split_at_mut(i);
                        if neg {
                            hi[0] += &lo[i - e];
                        } else {
                            hi[0] -= &lo[i - e];
                        }
                    }
                }
            }
        }
    }
    Ok(TruncatedSeries::from_integers(shift, c, order))
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num: Vec<String> = self
            .factors
            .iter()
            .filter(|&&(_, r)| r > 0)
            .map(|(s, r)| format!("{s}^{r}"))
            .collect();
        let den: Vec<String> = self
            .factors
            .iter()
            .filter(|&&(_, r)| r < 0)
            .map(|(s, r)| format!("{s}^{}", -r))
            .collect();
        if self.sign < 0 {
            f.write_str("-")?;
        }
        match (num.is_empty(), den.is_empty()) {
            (true, true) => f.write_str("1^0"),
            (false, true) => f.write_str(&num.join(" ")),
            (true, false) => {
                let neg: Vec<String> = self.factors.iter().map(|(s, r)| format!("{s}^{r}")).collect();
                f.write_str(&neg.join(" "))
            }
            (false, false) => write!(f, "{} / {}", num.join(" "), den.join(" ")),
        }
    }
}

impl FromStr for EtaQuotient {
    type Err = Error;

    /// Accepts `1^5 3^1`, `-9^3 / 1^3`, `5^6 1^-6` and bare scales (`5` is `5^1`).
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad eta quotient '{text}'"));
        let mut rest = text.trim();
        let mut sign = 1;
        if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r.trim_start();
        }
        let mut parts = rest.split('/');
        let num = parts.next().ok_or_else(bad)?;
        let den = parts.next();
        if parts.next().is_some() {
            return Err(bad());
        }
        let mut factors = Vec::new();
        for (chunk, polarity) in [(Some(num), 1i64), (den, -1)] {
            let Some(chunk) = chunk else { continue };
            for tok in chunk.split_whitespace() {
                let (s, r) = match tok.split_once('^') {
                    Some((s, r)) => (s, r),
                    None => (tok, "1"),
                };
                let s: u64 = s.parse().map_err(|_| bad())?;
                let r: i64 = r.parse().map_err(|_| bad())?;
                factors.push((s, polarity * r));
            }
        }
        if factors.is_empty() && den.is_some() {
            return Err(bad());
        }
        EtaQuotient::new(factors, sign)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    /// `prod_{n>=1}(1 - q^{s n})` by multiplying binomials one at a time.
    fn naive_euler(scale: usize, len: usize) -> Vec<i64> {
        let mut c = vec![0i64; len];
        c[0] = 1;
        let mut n = scale;
        while n < len {
            for i in (n..len).rev() {
                c[i] -= c[i - n];
            }
            n += scale;
        }
        c
    }

    fn naive_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; a.len()];
        for i in 0..a.len() {
            for j in 0..a.len() - i {
                out[i + j] += a[i] * b[j];
            }
        }
        out
    }

    #[test]
    fn parse_and_display() {
        let e: EtaQuotient = "1^5 3^1 4^5 6^2 12^1 / 2^14".parse().unwrap();
        assert_eq!(e.weight_sum(), 24);
        assert_eq!(e.to_string(), "1^5 3^1 4^5 6^2 12^1 / 2^14");
        let v: EtaQuotient = "-9^3 / 1^3".parse().unwrap();
        assert_eq!(v.sign(), -1);
        assert_eq!(v.to_string(), "-9^3 / 1^3");
        let w: EtaQuotient = "5^6 1^-6".parse().unwrap();
        assert_eq!(w, "5^6 / 1^6".parse().unwrap());
        let x: EtaQuotient = "1 23".parse().unwrap();
        assert_eq!(x, "1^1 23^1".parse().unwrap());
        assert!("1^x".parse::<EtaQuotient>().is_err());
        assert!("0^1".parse::<EtaQuotient>().is_err());
        let only_den = EtaQuotient::new([(5, -1)], 1).unwrap();
        assert_eq!(only_den.to_string().parse::<EtaQuotient>().unwrap(), only_den);
    }

    #[test]
    fn eta_1_23_first_terms() {
        let s = eta_quotient_series(&"1^1 23^1".parse().unwrap(), 6).unwrap();
        assert_eq!(s.shift(), 1);
        let got = s.coefficients(1, 6).unwrap();
        let expect: Vec<_> = [1, -1, -1, 0, 0, 1].iter().map(|&c| rat(c, 1)).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn eta_1_23_matches_naive_product_to_500() {
        let s = eta_quotient_series(&"1^1 23^1".parse().unwrap(), 500).unwrap();
        let a = naive_euler(1, 500);
        let b = naive_euler(23, 500);
        let p = naive_mul(&a, &b);
        for e in 1..=500i64 {
            assert_eq!(s.coefficient(e).unwrap(), rat(p[(e - 1) as usize], 1), "q^{e}");
        }
    }

    #[test]
    fn delta_shift_and_tau() {
        let d = eta_quotient_series(&"1^24".parse().unwrap(), 5).unwrap();
        assert_eq!(d.shift(), 1);
        // Ramanujan tau: 1, -24, 252, -1472, 4830
        let tau: Vec<_> = [1, -24, 252, -1472, 4830].iter().map(|&c| rat(c, 1)).collect();
        assert_eq!(d.coefficients(1, 5).unwrap(), tau);
    }

    #[test]
    fn non_integral_shift() {
        let e: EtaQuotient = "1^1".parse().unwrap();
        assert!(matches!(eta_quotient_series(&e, 10), Err(Error::NonIntegralShift { sum: 1, .. })));
    }

    #[test]
    fn negative_exponents_invert() {
        let e: EtaQuotient = "1^5 / 5^1".parse().unwrap();
        let s = eta_quotient_series(&e, 60).unwrap();
        let up = eta_quotient_series(&"5^1 / 1^5".parse().unwrap(), 60).unwrap();
        assert!((&s * &up).compare(&TruncatedSeries::one(60)).agrees());
    }
}
