use std::fmt;

use num_integer::Roots;

use crate::error::{Error, Result};
use crate::qseries::TruncatedSeries;

/// The binary quadratic form `a m^2 + b m n + c n^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl ThetaForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let form = ThetaForm { a, b, c };
        form.check()?;
        Ok(form)
    }

    fn check(&self) -> Result<()> {
        if self.a > 0 && self.discriminant_abs() > 0 {
            Ok(())
        } else {
            Err(Error::NotPositiveDefinite { a: self.a, b: self.b, c: self.c })
        }
    }

    /// `4ac - b^2`.
    pub fn discriminant_abs(&self) -> i64 {
        4 * self.a * self.c - self.b * self.b
    }

    pub fn value(&self, m: i64, n: i64) -> i128 {
        let (a, b, c, m, n) = (self.a as i128, self.b as i128, self.c as i128, m as i128, n as i128);
        a * m * m + b * m * n + c * n * n
    }
}

impl fmt::Display for ThetaForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

/// `sum_{m,n in Z} q^{Q(m,n)}` through `q^order`.
///
/// Completing the square, `4c Q(m,n) = (2cn + bm)^2 + D m^2` with
/// `D = 4ac - b^2`, so `Q(m,n) <= N` forces `|m| <= sqrt(4cN/D)` and
/// symmetrically `|n| <= sqrt(4aN/D)`.
pub fn theta_series(form: &ThetaForm, order: i64) -> Result<TruncatedSeries> {
    form.check()?;
    if order < 0 {
        return Ok(TruncatedSeries::zero(order));
    }
    let d = form.discriminant_abs() as i128;
    let big_n = order as i128;
    let bound_m = (4 * form.c as i128 * big_n / d).sqrt() as i64;
    let bound_n = (4 * form.a as i128 * big_n / d).sqrt() as i64;
    assert!(d * (bound_m as i128 + 1).pow(2) > 4 * form.c as i128 * big_n);
    assert!(d * (bound_n as i128 + 1).pow(2) > 4 * form.a as i128 * big_n);

    let mut counts = vec![0u64; order as usize + 1];
    for m in -bound_m..=bound_m {
        for n in -bound_n..=bound_n {
            let v = form.value(m, n);
            if v <= big_n {
                counts[v as usize] += 1;
            }
        }
    }
    Ok(TruncatedSeries::from_integers(0, counts, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn brute(a: i64, b: i64, c: i64, order: usize, box_size: i64) -> Vec<i64> {
        let mut out = vec![0i64; order + 1];
        for m in -box_size..=box_size {
            for n in -box_size..=box_size {
                let v = a * m * m + b * m * n + c * n * n;
                if (0..=order as i64).contains(&v) {
                    out[v as usize] += 1;
                }
            }
        }
        out
    }

    fn coeffs(s: &TruncatedSeries, order: i64) -> Vec<i64> {
        s.coefficients(0, order)
            .unwrap()
            .iter()
            .map(|c| c.to_integer().try_into().unwrap())
            .collect()
    }

    #[test]
    fn small_examples() {
        let f = theta_series(&ThetaForm::new(1, 1, 6).unwrap(), 1).unwrap();
        assert_eq!(coeffs(&f, 1), vec![1, 2]);
        let g = theta_series(&ThetaForm::new(2, 1, 3).unwrap(), 4).unwrap();
        assert_eq!(g.coefficient(1).unwrap(), rat(0, 1));
        let h = theta_series(&ThetaForm::new(1, 0, 1).unwrap(), 2).unwrap();
        assert_eq!(coeffs(&h, 2), vec![1, 4, 4]);
    }

    #[test]
    fn matches_brute_force_in_a_large_box() {
        for (a, b, c) in [(1, 1, 6), (2, 1, 3), (1, 0, 1), (1, 1, 1), (1, 1, 2), (1, 1, 3), (3, 2, 5)] {
            let s = theta_series(&ThetaForm::new(a, b, c).unwrap(), 120).unwrap();
            assert_eq!(coeffs(&s, 120), brute(a, b, c, 120, 40), "({a},{b},{c})");
        }
    }

    #[test]
    fn symmetric_and_nonnegative() {
        for (a, b, c) in [(1, 1, 6), (2, 1, 3), (1, 1, 2), (3, 1, 5)] {
            let x = theta_series(&ThetaForm::new(a, b, c).unwrap(), 100).unwrap();
            let y = theta_series(&ThetaForm::new(c, b, a).unwrap(), 100).unwrap();
            assert!(x.compare(&y).agrees());
            assert!(x.terms().all(|(_, v)| v.is_integer() && *v.numer() >= 0.into()));
            assert_eq!(x.coefficient(0).unwrap(), rat(1, 1));
        }
    }

    #[test]
    fn rejects_indefinite_forms() {
        assert!(matches!(ThetaForm::new(1, 3, 1), Err(Error::NotPositiveDefinite { .. })));
        assert!(ThetaForm::new(-1, 0, -1).is_err());
        assert!(ThetaForm::new(1, 2, 1).is_err());
    }
}
