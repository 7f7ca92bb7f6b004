//! The Dirichlet characters that occur in the registry: the trivial
//! character, the quadratic symbols `(·/s)` for s = 3, 5, 7, 11, 23 and
//! `chi_{-4} = (-4/·)`, together with generalized Bernoulli numbers.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::numeric::{bernoulli_polynomial, rat, rat_int, BigRational};

/// Anything that behaves like a Dirichlet character.
pub trait Character {
    fn modulus(&self) -> u64;
    /// Value at -1.
    fn parity(&self) -> i8;
    fn eval(&self, n: i64) -> i8;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Kind {
    Trivial,
    Quadratic(u64),
    MinusFour,
}

/// One of the seven characters used by the registry. There is deliberately
/// no constructor for arbitrary moduli.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DirichletCharacter(Kind);

impl DirichletCharacter {
    pub const TRIVIAL: Self = DirichletCharacter(Kind::Trivial);
    pub const CHI3: Self = DirichletCharacter(Kind::Quadratic(3));
    pub const CHI5: Self = DirichletCharacter(Kind::Quadratic(5));
    pub const CHI7: Self = DirichletCharacter(Kind::Quadratic(7));
    pub const CHI11: Self = DirichletCharacter(Kind::Quadratic(11));
    pub const CHI23: Self = DirichletCharacter(Kind::Quadratic(23));
    pub const CHI_MINUS4: Self = DirichletCharacter(Kind::MinusFour);

    pub const ALL: [Self; 7] = [
        Self::TRIVIAL,
        Self::CHI3,
        Self::CHI5,
        Self::CHI7,
        Self::CHI11,
        Self::CHI23,
        Self::CHI_MINUS4,
    ];

    pub fn is_trivial(&self) -> bool {
        self.0 == Kind::Trivial
    }

    pub fn token(&self) -> &'static str {
        match self.0 {
            Kind::Trivial => "1",
            Kind::Quadratic(3) => "chi3",
            Kind::Quadratic(5) => "chi5",
            Kind::Quadratic(7) => "chi7",
            Kind::Quadratic(11) => "chi11",
            Kind::Quadratic(23) => "chi23",
            Kind::Quadratic(_) => unreachable!("closed character set"),
            Kind::MinusFour => "chi-4",
        }
    }

    /// Same as [`Character::eval`], inherent for convenience.
    pub fn eval(&self, n: i64) -> i8 {
        char_eval(self, n)
    }
}

impl Character for DirichletCharacter {
    fn modulus(&self) -> u64 {
        match self.0 {
            Kind::Trivial => 1,
            Kind::Quadratic(s) => s,
            Kind::MinusFour => 4,
        }
    }

    fn parity(&self) -> i8 {
        match self.0 {
            Kind::Trivial => 1,
            Kind::Quadratic(s) if s % 4 == 1 => 1,
            Kind::Quadratic(_) => -1,
            Kind::MinusFour => -1,
        }
    }

    fn eval(&self, n: i64) -> i8 {
        char_eval(self, n)
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for DirichletCharacter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.token() == s.trim())
            .ok_or_else(|| Error::UnknownCharacter(s.to_string()))
    }
}

impl TryFrom<String> for DirichletCharacter {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<DirichletCharacter> for String {
    fn from(c: DirichletCharacter) -> String {
        c.token().to_string()
    }
}

/// Jacobi symbol `(a/n)` for odd positive `n`, by quadratic reciprocity.
pub fn jacobi(a: i64, n: u64) -> i8 {
    assert!(n % 2 == 1, "Jacobi symbol needs an odd modulus");
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

pub fn char_eval(chi: &DirichletCharacter, n: i64) -> i8 {
    if n < 0 {
        return chi.parity() * char_eval(chi, n.checked_neg().expect("i64::MIN"));
    }
    match chi.0 {
        Kind::Trivial => 1,
        Kind::Quadratic(s) => jacobi(n, s),
        Kind::MinusFour => match n % 4 {
            1 => 1,
            3 => -1,
            _ => 0,
        },
    }
}

/// `B_{k,psi} = f^{k-1} sum_{a=1}^{f} psi(a) B_k(a/f)` with `f` the modulus.
pub fn generalized_bernoulli(k: u32, psi: &DirichletCharacter) -> BigRational {
    assert!(k >= 1, "generalized Bernoulli numbers start at k = 1");
    let f = psi.modulus() as i64;
    let mut acc = BigRational::zero();
    for a in 1..=f {
        let v = psi.eval(a);
        if v == 0 {
            continue;
        }
        let term = bernoulli_polynomial(k as usize, &rat(a, f));
        if v > 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc * rat_int(f.pow(k - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squares_mod(p: i64) -> Vec<i64> {
        let mut v: Vec<i64> = (1..p).map(|x| x * x % p).collect();
        v.sort();
        v.dedup();
        v
    }

    #[test]
    fn chi23_matches_square_enumeration() {
        let squares = squares_mod(23);
        assert_eq!(squares, vec![1, 2, 3, 4, 6, 8, 9, 12, 13, 16, 18]);
        for n in 0..200i64 {
            let expected = if n % 23 == 0 {
                0
            } else if squares.contains(&(n % 23)) {
                1
            } else {
                -1
            };
            assert_eq!(DirichletCharacter::CHI23.eval(n), expected, "n = {n}");
        }
        assert_eq!(DirichletCharacter::CHI23.eval(23), 0);
        assert_eq!(DirichletCharacter::CHI23.eval(2), 1);
        assert_eq!(DirichletCharacter::CHI23.eval(5), -1);
    }

    #[test]
    fn chi_minus4_values() {
        let c = DirichletCharacter::CHI_MINUS4;
        assert_eq!(c.eval(3), -1);
        assert_eq!(c.eval(1), 1);
        assert_eq!(c.eval(6), 0);
        assert_eq!(c.eval(-1), -1);
    }

    #[test]
    fn tokens_roundtrip() {
        for c in DirichletCharacter::ALL {
            assert_eq!(c.token().parse::<DirichletCharacter>().unwrap(), c);
        }
        assert!("chi13".parse::<DirichletCharacter>().is_err());
    }

    #[test]
    fn character_laws() {
        for c in DirichletCharacter::ALL {
            let m = c.modulus() as i64;
            assert_eq!(c.eval(-1), c.parity(), "{c}");
            for a in -200i64..=200 {
                assert_eq!(c.eval(a + m), c.eval(a), "{c} periodicity at {a}");
                let g = num_integer::gcd(a, m);
                assert_eq!(c.eval(a) == 0, g != 1, "{c} support at {a}");
                for b in -200i64..=200 {
                    assert_eq!(c.eval(a * b), c.eval(a) * c.eval(b), "{c} at {a}, {b}");
                }
            }
        }
    }

    #[test]
    fn jacobi_reciprocity_against_euler_criterion() {
        fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
            let mut r = 1;
            b %= m;
            while e > 0 {
                if e & 1 == 1 {
                    r = r * b % m;
                }
                b = b * b % m;
                e >>= 1;
            }
            r
        }
        for p in [3u64, 5, 7, 11, 13, 23, 101, 997] {
            for a in 0..2 * p as i64 {
                let e = pow_mod(a as u64, (p - 1) / 2, p);
                let expected = if e == 0 { 0 } else if e == 1 { 1 } else { -1 };
                assert_eq!(jacobi(a, p), expected, "({a}/{p})");
            }
        }
    }

    #[test]
    fn generalized_bernoulli_values() {
        assert_eq!(generalized_bernoulli(3, &DirichletCharacter::TRIVIAL), rat(0, 1));
        assert_eq!(generalized_bernoulli(2, &DirichletCharacter::TRIVIAL), rat(1, 6));
        assert_eq!(generalized_bernoulli(3, &DirichletCharacter::CHI_MINUS4), rat(3, 2));
        assert_eq!(generalized_bernoulli(3, &DirichletCharacter::CHI3), rat(2, 3));
        assert_eq!(generalized_bernoulli(3, &DirichletCharacter::CHI7), rat(48, 7));
        assert_eq!(generalized_bernoulli(3, &DirichletCharacter::CHI11), rat(18, 1));
        assert_eq!(generalized_bernoulli(3, &DirichletCharacter::CHI23), rat(144, 1));
        assert_eq!(generalized_bernoulli(4, &DirichletCharacter::CHI5), rat(-8, 1));
    }

    #[test]
    fn generalized_bernoulli_vanishes_off_parity() {
        for c in DirichletCharacter::ALL {
            for k in 1..=6u32 {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                if c.parity() != sign && !(c.is_trivial() && k == 1) {
                    assert!(generalized_bernoulli(k, &c).is_zero(), "{c}, k = {k}");
                }
            }
        }
    }
}
