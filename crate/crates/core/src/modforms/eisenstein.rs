use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::characters::{generalized_bernoulli, Character, DirichletCharacter};
use crate::error::{Error, Result};
use crate::numeric::{rat_int, BigRational};
use crate::qseries::TruncatedSeries;

/// `E_{k, chi, psi}(q^t)`: constant term `-B_{k,psi}/2k` when `chi` is
/// trivial (else 0), and `sum_{d|n} psi(d) chi(n/d) d^{k-1}` at `q^{tn}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EisensteinSpec {
    pub weight: u32,
    pub chi: DirichletCharacter,
    pub psi: DirichletCharacter,
    pub scale: u64,
}

impl EisensteinSpec {
    pub fn new(weight: u32, chi: DirichletCharacter, psi: DirichletCharacter, scale: u64) -> Result<Self> {
        let spec = EisensteinSpec { weight, chi, psi, scale };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        if self.scale == 0 {
            return Err(Error::Parse("Eisenstein scale must be positive".into()));
        }
        let sign = if self.weight.is_multiple_of(2) { 1 } else { -1 };
        if self.chi.parity() * self.psi.parity() != sign {
            return Err(Error::ParityViolation { weight: self.weight });
        }
        Ok(())
    }

    /// Level `R L t`.
    pub fn level(&self) -> u64 {
        self.chi.modulus() * self.psi.modulus() * self.scale
    }

    pub fn constant_term(&self) -> BigRational {
        if self.chi.modulus() == 1 {
            -generalized_bernoulli(self.weight, &self.psi) / rat_int(2 * self.weight as i64)
        } else {
            BigRational::zero()
        }
    }

    /// Coefficient of `q^{t n}` for `n >= 1`.
    pub fn coefficient(&self, n: u64) -> BigInt {
        assert!(n >= 1);
        let mut acc = BigInt::zero();
        for d in divisors(n) {
            let v = self.psi.eval(d as i64) * self.chi.eval((n / d) as i64);
            if v != 0 {
                let term = BigInt::from(d).pow(self.weight - 1);
                if v > 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
        }
        acc
    }

    /// Exponent of the first nonzero term. The `q^t` coefficient is
    /// `psi(1) chi(1) = 1`, so this is 0 or `t`.
    pub fn valuation(&self) -> i64 {
        if self.constant_term().is_zero() {
            self.scale as i64
        } else {
            0
        }
    }
}

impl fmt::Display for EisensteinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E({},{},{}", self.weight, self.chi, self.psi)?;
        if self.scale != 1 {
            write!(f, ",{}", self.scale)?;
        }
        f.write_str(")")
    }
}

/// Ascending divisors of `n`.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn eisenstein_series(spec: &EisensteinSpec, order: i64) -> Result<TruncatedSeries> {
    spec.check()?;
    if order < 0 {
        return Ok(TruncatedSeries::zero(order));
    }
    let t = spec.scale as i64;
    let mut coeffs = vec![BigRational::zero(); order as usize + 1];
    coeffs[0] = spec.constant_term();
    let mut n = 1u64;
    while (n as i64) * t <= order {
        coeffs[(n as i64 * t) as usize] = rat_int(spec.coefficient(n));
        n += 1;
    }
    Ok(TruncatedSeries::new(0, coeffs, order))
}

/// `E_4(q^t) = 1 + 240 sum sigma_3(n) q^{tn}`, built as `240 E_{4,1,1}(q^t)`.
pub fn e4_series(scale: u64, order: i64) -> Result<TruncatedSeries> {
    let spec = EisensteinSpec::new(4, DirichletCharacter::TRIVIAL, DirichletCharacter::TRIVIAL, scale)?;
    Ok(eisenstein_series(&spec, order)?.scale(&rat_int(240)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    const ONE: DirichletCharacter = DirichletCharacter::TRIVIAL;
    const CHI23: DirichletCharacter = DirichletCharacter::CHI23;

    fn direct(n: u64, chi: DirichletCharacter, psi: DirichletCharacter, k: u32) -> i64 {
        (1..=n)
            .filter(|d| n.is_multiple_of(*d))
            .map(|d| psi.eval(d as i64) as i64 * chi.eval((n / d) as i64) as i64 * (d as i64).pow(k - 1))
            .sum()
    }

    #[test]
    fn chi23_pair() {
        let a = eisenstein_series(&EisensteinSpec::new(3, CHI23, ONE, 1).unwrap(), 60).unwrap();
        assert_eq!(a.coefficient(0).unwrap(), rat(0, 1));
        assert_eq!(a.coefficient(1).unwrap(), rat(1, 1));
        assert_eq!(a.coefficient(5).unwrap(), rat(24, 1));
        let e = eisenstein_series(&EisensteinSpec::new(3, ONE, CHI23, 1).unwrap(), 60).unwrap();
        assert_eq!(e.coefficient(5).unwrap(), rat(-24, 1));
        assert_eq!(e.coefficient(0).unwrap(), rat(-24, 1));
        for n in 1..=60u64 {
            assert_eq!(a.coefficient(n as i64).unwrap(), rat(direct(n, CHI23, ONE, 3), 1));
            assert_eq!(e.coefficient(n as i64).unwrap(), rat(direct(n, ONE, CHI23, 3), 1));
        }
    }

    #[test]
    fn scaled_series_spreads_coefficients() {
        let spec = EisensteinSpec::new(3, CHI23, ONE, 2).unwrap();
        let s = eisenstein_series(&spec, 10).unwrap();
        assert_eq!(s.shift(), 2);
        assert_eq!(spec.valuation(), 2);
        assert_eq!(s.coefficient(3).unwrap(), rat(0, 1));
        assert_eq!(s.coefficient(10).unwrap(), rat(24, 1));
        assert_eq!(spec.level(), 46);
    }

    #[test]
    fn parity_is_enforced() {
        assert!(matches!(
            EisensteinSpec::new(4, CHI23, ONE, 1),
            Err(Error::ParityViolation { weight: 4 })
        ));
        assert!(EisensteinSpec::new(4, ONE, DirichletCharacter::CHI5, 1).is_ok());
    }

    #[test]
    fn e4_normalization() {
        let s = e4_series(1, 5).unwrap();
        let expect: Vec<_> = [1, 240, 2160, 6720, 17520, 30240].iter().map(|&c| rat(c, 1)).collect();
        assert_eq!(s.coefficients(0, 5).unwrap(), expect);
        let s2 = e4_series(2, 4).unwrap();
        assert_eq!(s2.coefficient(2).unwrap(), rat(240, 1));
        assert_eq!(s2.coefficient(1).unwrap(), rat(0, 1));
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(36), vec![1, 2, 3, 4, 6, 9, 12, 18, 36]);
        assert_eq!(divisors(23), vec![1, 23]);
    }
}
