//! Exact integer and rational kernels: Bernoulli polynomials, Pochhammer
//! symbols, factorials and binomial coefficients, plus the small prime
//! utilities the scanners need.
//!
//! All values are exact. `BigRational` normalizes on every operation, so
//! equality is equality of canonical forms.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational;

/// Default highest Bernoulli index kept in the shared table.
pub const DEFAULT_BERNOULLI_DEGREE: usize = 64;

/// Default highest `n` for which `n!` is memoized.
pub const DEFAULT_FACTORIAL_BOUND: usize = 512;

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Bernoulli numbers `B_0, …, B_max` with the `B_1 = -1/2` convention.
#[derive(Debug, Clone)]
pub struct BernoulliTable {
    numbers: Vec<BigRational>,
}

impl BernoulliTable {
    pub fn new(max_degree: usize) -> Self {
        let mut numbers: Vec<BigRational> = Vec::with_capacity(max_degree + 1);
        numbers.push(BigRational::one());
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        for m in 1..=max_degree {
            let mut acc = BigRational::zero();
            let mut c = BigInt::one(); // C(m+1, 0)
            for (j, b) in numbers.iter().enumerate() {
                acc += b * BigRational::from_integer(c.clone());
                c = c * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
            }
            numbers.push(-acc / rat_int(m as i64 + 1));
        }
        BernoulliTable { numbers }
    }

    pub fn max_degree(&self) -> usize {
        self.numbers.len() - 1
    }

    pub fn number(&self, k: usize) -> &BigRational {
        &self.numbers[k]
    }

    /// `B_k(x) = sum_j C(k, j) B_j x^{k-j}`, evaluated by Horner in `x`.
    pub fn polynomial(&self, k: usize, x: &BigRational) -> BigRational {
        assert!(k <= self.max_degree(), "Bernoulli degree {k} beyond table");
        let mut acc = BigRational::zero();
        for j in 0..=k {
            acc = acc * x + &self.numbers[j] * rat_int(binomial(k as u64, j as i64));
        }
        acc
    }
}

fn shared_bernoulli() -> &'static BernoulliTable {
    static TABLE: OnceLock<BernoulliTable> = OnceLock::new();
    TABLE.get_or_init(|| BernoulliTable::new(DEFAULT_BERNOULLI_DEGREE))
}

/// The `k`-th Bernoulli number, `B_1 = -1/2`.
pub fn bernoulli_number(k: usize) -> BigRational {
    let table = shared_bernoulli();
    if k <= table.max_degree() {
        table.number(k).clone()
    } else {
        BernoulliTable::new(k).number(k).clone()
    }
}

/// `B_k(x)`.
pub fn bernoulli_polynomial(k: usize, x: &BigRational) -> BigRational {
    let table = shared_bernoulli();
    if k <= table.max_degree() {
        table.polynomial(k, x)
    } else {
        BernoulliTable::new(k).polynomial(k, x)
    }
}

/// Rising factorial `a (a+1) ... (a+n-1)`.
pub fn pochhammer(a: &BigRational, n: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut term = a.clone();
    for _ in 0..n {
        acc *= &term;
        term += BigRational::one();
    }
    acc
}

#[derive(Debug)]
struct FactorialTable {
    values: Vec<BigInt>,
}

impl FactorialTable {
    fn new(bound: usize) -> Self {
        let mut values = Vec::with_capacity(bound + 1);
        values.push(BigInt::one());
        for n in 1..=bound {
            let next = &values[n - 1] * BigInt::from(n);
            values.push(next);
        }
        FactorialTable { values }
    }
}

fn shared_factorials() -> &'static FactorialTable {
    static TABLE: OnceLock<FactorialTable> = OnceLock::new();
    TABLE.get_or_init(|| FactorialTable::new(DEFAULT_FACTORIAL_BOUND))
}

pub fn factorial(n: u64) -> BigInt {
    let table = shared_factorials();
    match table.values.get(n as usize) {
        Some(v) => v.clone(),
        None => {
            let mut acc = table.values.last().unwrap().clone();
            for m in table.values.len() as u64..=n {
                acc *= m;
            }
            acc
        }
    }
}

/// `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = k as u64;
    let table = shared_factorials();
    if (n as usize) < table.values.len() {
        return &table.values[n as usize]
            / (&table.values[k as usize] * &table.values[(n - k) as usize]);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes `<= bound`, ascending (sieve of Eratosthenes).
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Least nonnegative residue of `a` modulo `m`.
pub fn residue(a: &BigInt, m: &BigInt) -> BigInt {
    let r = a % m;
    if r.is_negative() {
        r + m
    } else {
        r
    }
}

/// Returns the integer value of `x` if it has denominator one.
pub fn as_integer(x: &BigRational) -> Option<BigInt> {
    x.is_integer().then(|| x.numer().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli_polynomial(0, &rat(7, 3)), rat(1, 1));
        assert_eq!(bernoulli_polynomial(1, &rat(0, 1)), rat(-1, 2));
        assert_eq!(bernoulli_polynomial(3, &rat(1, 2)), rat(0, 1));
        assert_eq!(bernoulli_number(2), rat(1, 6));
        assert_eq!(bernoulli_number(4), rat(-1, 30));
        assert_eq!(bernoulli_number(12), rat(-691, 2730));
    }

    #[test]
    fn bernoulli_cubic_matches_expanded_form() {
        // B_3(x) = x^3 - 3/2 x^2 + 1/2 x
        for num in -6..=6 {
            let x = rat(num, 5);
            let expected = &x * &x * &x - rat(3, 2) * &x * &x + rat(1, 2) * &x;
            assert_eq!(bernoulli_polynomial(3, &x), expected);
        }
    }

    #[test]
    fn bernoulli_recurrence_up_to_30() {
        for k in 1..=30u64 {
            let mut acc = BigRational::zero();
            for j in 0..=k {
                acc += rat_int(binomial(k + 1, j as i64)) * bernoulli_number(j as usize);
            }
            assert!(acc.is_zero(), "recurrence fails at k = {k}");
        }
    }

    #[test]
    fn bernoulli_beyond_shared_table() {
        let big = BernoulliTable::new(70);
        assert_eq!(bernoulli_number(70), big.number(70).clone());
        assert_eq!(bernoulli_number(67), BigRational::zero());
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&rat(1, 4), 0), rat(1, 1));
        assert_eq!(pochhammer(&rat(1, 4), 2), rat(5, 16));
        let direct = rat(1, 6) * rat(7, 6) * rat(13, 6);
        assert_eq!(pochhammer(&rat(1, 6), 3), direct);
        assert_eq!(direct, rat(91, 216));
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(5, -1), BigInt::zero());
        assert_eq!(binomial(5, 6), BigInt::zero());
        // Pascal's triangle row 30, built independently.
        let mut row = vec![BigInt::one()];
        for _ in 0..30 {
            let mut next = vec![BigInt::one(); row.len() + 1];
            for i in 1..row.len() {
                next[i] = &row[i - 1] + &row[i];
            }
            row = next;
        }
        assert_eq!(row[15], BigInt::from(155_117_520u64));
        assert_eq!(binomial(30, 15), row[15]);
    }

    #[test]
    fn pascal_rule_up_to_60() {
        for n in 2..=60u64 {
            for k in 1..n as i64 {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
        }
    }

    #[test]
    fn binomial_beyond_memo_bound() {
        let n = DEFAULT_FACTORIAL_BOUND as u64 + 10;
        assert_eq!(binomial(n, 3), BigInt::from(n * (n - 1) * (n - 2) / 6));
        assert_eq!(factorial(n) / factorial(n - 1), BigInt::from(n));
    }

    #[test]
    fn primes() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(2) && is_prime(13) && !is_prime(1) && !is_prime(91));
    }

    #[test]
    fn residue_is_least_nonnegative() {
        assert_eq!(residue(&BigInt::from(-7), &BigInt::from(5)), BigInt::from(3));
        assert_eq!(residue(&BigInt::from(10), &BigInt::from(5)), BigInt::zero());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn pochhammer_splits(num in -20i64..20, den in 1i64..12, m in 0u64..8, n in 0u64..8) {
                let a = rat(num, den);
                let am = &a + rat_int(m as i64);
                prop_assert_eq!(pochhammer(&a, m + n), pochhammer(&a, m) * pochhammer(&am, n));
            }
        }
    }
}
