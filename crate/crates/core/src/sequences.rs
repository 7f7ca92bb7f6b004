//! Closed forms for the sequences that have one. They are independent of
//! the q-series machinery and serve as its oracle.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modforms::EntryId;
use crate::numeric::{binomial, factorial, pochhammer, rat, rat_int, BigRational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ClosedFormId {
    F2,
    F3,
    Vi,
    Vii,
    Viii,
    Ix,
    X,
    Xi,
    Xii,
    Xiii,
}

impl ClosedFormId {
    pub const ALL: [ClosedFormId; 10] = [
        ClosedFormId::F2,
        ClosedFormId::F3,
        ClosedFormId::Vi,
        ClosedFormId::Vii,
        ClosedFormId::Viii,
        ClosedFormId::Ix,
        ClosedFormId::X,
        ClosedFormId::Xi,
        ClosedFormId::Xii,
        ClosedFormId::Xiii,
    ];

    pub fn token(&self) -> &'static str {
        match self {
            ClosedFormId::F2 => "f2",
            ClosedFormId::F3 => "f3",
            ClosedFormId::Vi => "vi",
            ClosedFormId::Vii => "vii",
            ClosedFormId::Viii => "viii",
            ClosedFormId::Ix => "ix",
            ClosedFormId::X => "x",
            ClosedFormId::Xi => "xi",
            ClosedFormId::Xii => "xii",
            ClosedFormId::Xiii => "xiii",
        }
    }

    /// The registry row whose `t`-expansion this formula describes.
    pub fn entry(&self) -> EntryId {
        match self {
            ClosedFormId::F2 => EntryId::I,
            ClosedFormId::F3 => EntryId::Ii,
            ClosedFormId::Vi => EntryId::Vi,
            ClosedFormId::Vii => EntryId::Vii,
            ClosedFormId::Viii => EntryId::Viii,
            ClosedFormId::Ix => EntryId::Ix,
            ClosedFormId::X => EntryId::X,
            ClosedFormId::Xi => EntryId::Xi,
            ClosedFormId::Xii => EntryId::Xii,
            ClosedFormId::Xiii => EntryId::Xiii,
        }
    }
}

impl fmt::Display for ClosedFormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for ClosedFormId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ClosedFormId::ALL
            .into_iter()
            .find(|c| c.token() == s)
            .ok_or_else(|| Error::UnknownClosedForm(s.to_string()))
    }
}

impl TryFrom<String> for ClosedFormId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ClosedFormId> for String {
    fn from(c: ClosedFormId) -> String {
        c.token().to_string()
    }
}

fn c(n: u64, k: u64) -> BigInt {
    binomial(n, k as i64)
}

fn pow(base: i64, e: u64) -> BigInt {
    BigInt::from(base).pow(e as u32)
}

fn sign(k: u64) -> BigInt {
    if k.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

fn integral(id: ClosedFormId, n: u64, x: BigRational) -> Result<BigInt> {
    if x.is_integer() {
        Ok(x.to_integer())
    } else {
        Err(Error::NonIntegralClosedForm { id: id.to_string(), n, value: x.to_string() })
    }
}

pub fn closed_form(id: ClosedFormId, n: u64) -> Result<BigInt> {
    let value = match id {
        ClosedFormId::F2 => {
            let base = rat_int(pow(8, n)) * pochhammer(&rat(1, 4), n) / rat_int(factorial(n));
            return integral(id, n, &base * &base);
        }
        ClosedFormId::F3 => {
            let x = rat_int(pow(108, n)) * pochhammer(&rat(1, 6), n) * pochhammer(&rat(1, 3), n)
                / rat_int(factorial(n).pow(2));
            return integral(id, n, x);
        }
        ClosedFormId::Vi => (0..=n).map(|k| c(n, k).pow(3)).sum(),
        ClosedFormId::Vii => (0..=n / 3)
            .map(|k| sign(k) * pow(3, n - 3 * k) * c(n, 3 * k) * c(3 * k, k) * c(2 * k, k))
            .sum(),
        ClosedFormId::Viii => (0..=n).map(|k| c(n, k).pow(2) * c(2 * k, k)).sum(),
        ClosedFormId::Ix => (0..=n / 2)
            .map(|k| pow(4, n - 2 * k) * c(n, 2 * k) * c(2 * k, k).pow(2))
            .sum(),
        ClosedFormId::X => {
            let mut acc = BigInt::zero();
            for k in 0..=n {
                let inner: BigInt = (0..=k).map(|l| c(k, l).pow(3)).sum();
                acc += sign(k) * pow(8, n - k) * c(n, k) * inner;
            }
            acc
        }
        ClosedFormId::Xi => (0..=n).map(|k| c(n + k, k).pow(2) * c(n, k).pow(2)).sum(),
        ClosedFormId::Xii => sign(n) * xii_inner(n),
        ClosedFormId::Xiii => sign(n) * xiii_inner(n),
    };
    Ok(value)
}

/// `sum C(n,k)^2 C(2k,k) C(2(n-k), n-k)`, the (xii) sum without its sign.
pub fn xii_inner(n: u64) -> BigInt {
    (0..=n).map(|k| c(n, k).pow(2) * c(2 * k, k) * c(2 * (n - k), n - k)).sum()
}

/// The (xiii) sum without its `(-1)^n`.
pub fn xiii_inner(n: u64) -> BigInt {
    (0..=n / 3)
        .map(|k| {
            let multinomial = factorial(3 * k) / factorial(k).pow(3);
            sign(k) * pow(3, n - 3 * k) * multinomial * c(n, 3 * k) * c(n + k, k)
        })
        .sum()
}

pub fn closed_form_range(id: ClosedFormId, max_n: u64) -> Result<Vec<BigInt>> {
    (0..=max_n).map(|n| closed_form(id, n)).collect()
}
