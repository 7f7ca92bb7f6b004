//! Re-expansion of a form `f` in powers of a modular function `t`, the
//! differential identity `f * (q dt/dq) / t = M`, and numerical checks of
//! the coefficient congruences that identity transfers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::json;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::modforms::{divisors, EisensteinSpec, EntryId, RegistryEntry};
use crate::numeric::{as_integer, is_prime, rat_int, BigRational};
use crate::qseries::TruncatedSeries;

/// Extra coefficients solved for (and then discarded) past `max_n`.
pub const GUARD_BAND: usize = 8;

/// `f = sum_{n <= max_n} A(n) t^n + O(q^{max_n + 1})`.
#[derive(Debug, Clone)]
pub struct TExpansion {
    pub entry: Option<EntryId>,
    pub max_n: usize,
    pub coefficients: Vec<BigRational>,
    pub q_order_used: i64,
}

impl TExpansion {
    pub fn integers(&self) -> Result<Vec<BigInt>> {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(index, c)| {
                as_integer(c).ok_or_else(|| Error::NonIntegralCoefficient { index, value: c.to_string() })
            })
            .collect()
    }

    /// `{entry, maxN, coefficients}` with coefficients as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let coefficients: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        json!({
            "entry": self.entry.map(|e| e.token()),
            "maxN": self.max_n,
            "coefficients": coefficients,
        })
    }

    /// `sum_{n <= max_n} A(n) t^n`, for checking reconstructions.
    pub fn resum(&self, t: &TruncatedSeries) -> TruncatedSeries {
        let order = t.order();
        let mut acc = TruncatedSeries::zero(order);
        let mut power = TruncatedSeries::one(order);
        for a in &self.coefficients {
            acc = &acc + &power.scale(a);
            power = (&power * t).truncate(order);
        }
        acc
    }
}

/// Triangular solve for `A(0..=max_n)`: keep a residual `R = f`, and for
/// each `n` take `A(n) = [q^n] R / [q^n] t^n` and subtract `A(n) t^n`.
pub fn t_expand(f: &TruncatedSeries, t: &TruncatedSeries, max_n: usize) -> Result<TExpansion> {
    let lead = t.leading_coefficient().cloned().unwrap_or_else(BigRational::zero);
    if t.shift() != 1 || !(lead.is_integer() && lead.numer().abs().is_one()) {
        return Err(Error::ShiftMismatch(format!("t must be +-q + O(q^2), got {t}")));
    }
    if f.shift() < 0 {
        return Err(Error::ShiftMismatch(format!("f has a pole: {f}")));
    }
    let top = (max_n + GUARD_BAND) as i64;
    let available = f.order().min(t.order());
    if available < top {
        return Err(Error::InsufficientOrder { needed: top, available });
    }

    let t = t.truncate(top);
    let mut residual = f.truncate(top);
    let mut power = TruncatedSeries::one(top);
    let mut lead_power = BigRational::one();
    let mut coefficients = Vec::with_capacity(max_n + 1);
    for n in 0..=top {
        let a = residual.coefficient(n)? / &lead_power;
        if !a.is_zero() {
            residual = &residual - &power.scale(&a);
        }
        if n as usize <= max_n {
            coefficients.push(a);
        }
        if n < top {
            power = (&power * &t).truncate(top);
            lead_power *= &lead;
        }
    }
    if !residual.is_zero() {
        return Err(Error::ResidualNonzero { exponent: residual.shift() });
    }
    Ok(TExpansion { entry: None, max_n, coefficients, q_order_used: top })
}

/// Expands a registry entry's `f` in its `t`, asserting integrality.
pub fn expand_entry(entry: &RegistryEntry, max_n: usize) -> Result<TExpansion> {
    let order = (max_n + GUARD_BAND) as i64;
    let s = entry.eval(order)?;
    let mut e = t_expand(&s.f, &s.t, max_n)?;
    e.entry = Some(entry.id);
    e.integers()?;
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IdentityVerdict {
    Pass { order: i64 },
    Mismatch { exponent: i64, lhs: String, rhs: String },
}

impl IdentityVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, IdentityVerdict::Pass { .. })
    }
}

/// `f * (q dt/dq) / t` through `q^order`.
pub fn identity_lhs(entry: &RegistryEntry, order: i64) -> Result<TruncatedSeries> {
    let f = crate::modforms::eval_form_expr(&entry.f_expr, order)?;
    let t = crate::modforms::eval_form_expr(&entry.t_expr, order + 1)?;
    let log_derivative = t.q_derivative().quotient(&t)?;
    Ok((&f * &log_derivative).truncate(order))
}

/// Compares `f * (q dt/dq) / t` with `M` coefficient by coefficient.
pub fn verify_differential_identity(entry: &RegistryEntry, order: i64) -> Result<IdentityVerdict> {
    if order < 1 {
        return Err(Error::Config("identity order must be at least 1".into()));
    }
    let lhs = identity_lhs(entry, order)?;
    let rhs = crate::modforms::eval_form_expr(&entry.m_expr, order)?;
    if lhs.order() < order || rhs.order() < order {
        return Err(Error::InsufficientOrder { needed: order, available: lhs.order().min(rhs.order()) });
    }
    for e in 0..=order {
        let (l, r) = (lhs.coefficient(e)?, rhs.coefficient(e)?);
        if l != r {
            return Ok(IdentityVerdict::Mismatch { exponent: e, lhs: l.to_string(), rhs: r.to_string() });
        }
    }
    Ok(IdentityVerdict::Pass { order })
}

/// `c_0, ..., c_order` with `c_n = [q^n] M`.
pub fn m_coefficients(entry: &RegistryEntry, order: i64) -> Result<Vec<BigInt>> {
    let m = crate::modforms::eval_form_expr(&entry.m_expr, order)?;
    m.coefficients(0, order)?
        .iter()
        .enumerate()
        .map(|(index, c)| as_integer(c).ok_or_else(|| Error::NonIntegralCoefficient { index, value: c.to_string() }))
        .collect()
}

fn congruent(x: &BigInt, y: &BigInt, modulus: &BigInt) -> bool {
    ((x - y) % modulus).is_zero()
}

fn checked_index(n: u64, p: u64, r: u32) -> Option<u64> {
    p.checked_pow(r).and_then(|q| q.checked_mul(n))
}

#[derive(Debug, Clone, Serialize)]
pub struct JvCell {
    pub n: u64,
    pub r: u32,
    pub b_holds: bool,
    pub c_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct JvReport {
    pub p: u64,
    pub rmax: u32,
    pub nmax: u64,
    pub cells: Vec<JvCell>,
    /// `(n, r)` where exactly one side of the equivalence holds.
    pub one_sided: Vec<(u64, u32)>,
}

impl JvReport {
    pub fn equivalence_holds(&self) -> bool {
        self.one_sided.is_empty()
    }

    pub fn both_hold_everywhere(&self) -> bool {
        self.cells.iter().all(|c| c.b_holds && c.c_holds)
    }
}

/// For every `n <= nmax`, `1 <= r <= rmax`, compares
/// `b_{np^r} = b_{np^{r-1}} (mod p^r)` with the same statement for `c`.
/// With `m = v = 1` no prime is excluded.
pub fn jv_transfer_check(b: &[BigInt], c: &[BigInt], p: u64, rmax: u32, nmax: u64) -> Result<JvReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let available = b.len().min(c.len());
    let needed = checked_index(nmax, p, rmax).ok_or(Error::RangeExceeded { needed: u64::MAX, available })?;
    if needed as usize >= available {
        return Err(Error::RangeExceeded { needed, available });
    }
    let mut cells = Vec::new();
    let mut one_sided = Vec::new();
    for n in 0..=nmax {
        for r in 1..=rmax {
            let modulus = BigInt::from(p).pow(r);
            let hi = (n * p.pow(r)) as usize;
            let lo = (n * p.pow(r - 1)) as usize;
            let b_holds = congruent(&b[hi], &b[lo], &modulus);
            let c_holds = congruent(&c[hi], &c[lo], &modulus);
            if b_holds != c_holds {
                one_sided.push((n, r));
            }
            cells.push(JvCell { n, r, b_holds, c_holds });
        }
    }
    Ok(JvReport { p, rmax, nmax, cells, one_sided })
}

/// The pair `a_n` (from `E_{3,chi23,1}`) and `e_n` (from `E_{3,1,chi23}`).
#[derive(Debug, Clone)]
pub struct Chi23Pair {
    a: EisensteinSpec,
    e: EisensteinSpec,
}

impl Default for Chi23Pair {
    fn default() -> Self {
        let one = DirichletCharacter::TRIVIAL;
        let chi = DirichletCharacter::CHI23;
        Chi23Pair {
            a: EisensteinSpec::new(3, chi, one, 1).expect("odd weight, odd character"),
            e: EisensteinSpec::new(3, one, chi, 1).expect("odd weight, odd character"),
        }
    }
}

impl Chi23Pair {
    pub fn a(&self, n: u64) -> BigInt {
        if n == 0 {
            self.a.constant_term().to_integer()
        } else {
            self.a.coefficient(n)
        }
    }

    pub fn e(&self, n: u64) -> BigInt {
        if n == 0 {
            self.e.constant_term().to_integer()
        } else {
            self.e.coefficient(n)
        }
    }

    /// `c_n = -e_n/24 - 23 a_n/24`.
    pub fn c(&self, n: u64) -> BigRational {
        -(rat_int(self.e(n)) + rat_int(self.a(n) * 23)) / rat_int(24)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EisensteinCell {
    pub n: u64,
    pub r: u32,
    /// The divisor-sum identities exactly as displayed (sum over all `d | n`).
    pub co1_displayed: bool,
    pub co2_displayed: bool,
    /// The same identities with the sum restricted to `d | n`, `p` not dividing `n/d`.
    pub co1_exact: bool,
    pub co2_exact: bool,
    /// `c_{np^r} = c_{np^{r-1}} (mod p^r)`.
    pub congruence: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EisensteinReport {
    pub p: u64,
    pub rmax: u32,
    pub nmax: u64,
    pub cells: Vec<EisensteinCell>,
    /// `m` with `gcd(m, 23) = 1` and `e_m != chi23(m) a_m`, for `m <= nmax p^rmax`.
    pub sign_failures: Vec<u64>,
    /// `m <= nmax` with `a_{23m} != 529 a_m` or `e_{23m} != e_m`.
    pub scaling_failures: Vec<u64>,
    /// `m` where `c_m` is not an integer.
    pub non_integral: Vec<u64>,
}

impl EisensteinReport {
    pub fn displayed_failures(&self) -> Vec<(u64, u32)> {
        self.cells
            .iter()
            .filter(|c| !(c.co1_displayed && c.co2_displayed))
            .map(|c| (c.n, c.r))
            .collect()
    }

    pub fn exact_identities_hold(&self) -> bool {
        self.cells.iter().all(|c| c.co1_exact && c.co2_exact)
    }

    pub fn congruences_hold(&self) -> bool {
        self.cells.iter().all(|c| c.congruence) && self.non_integral.is_empty()
    }

    pub fn relations_hold(&self) -> bool {
        self.sign_failures.is_empty() && self.scaling_failures.is_empty()
    }
}

/// Checks the divisor-sum identities for `a_{np^r} - chi23(p) a_{np^{r-1}}`
/// and `e_{np^r} - e_{np^{r-1}}`, the congruence for `c_n`, and the
/// relations `e_m = chi23(m) a_m`, `a_{23m} = 529 a_m`, `e_{23m} = e_m`.
pub fn eisenstein_relations_check(p: u64, rmax: u32, nmax: u64) -> Result<EisensteinReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let chi = DirichletCharacter::CHI23;
    if chi.eval(p as i64) != 1 {
        return Err(Error::FilterViolation { p });
    }
    let pair = Chi23Pair::default();
    let chi_p = BigInt::from(chi.eval(p as i64));
    let mut cells = Vec::new();
    for n in 1..=nmax {
        for r in 1..=rmax {
            let pr = p.pow(r);
            let hi = n * pr;
            let lo = hi / p;
            let pr2 = BigInt::from(pr).pow(2);
            let lhs1 = pair.a(hi) - &chi_p * pair.a(lo);
            let lhs2 = pair.e(hi) - pair.e(lo);
            let (mut rhs1, mut rhs2) = (BigInt::zero(), BigInt::zero());
            let (mut ex1, mut ex2) = (BigInt::zero(), BigInt::zero());
            for d in divisors(n) {
                let t1 = BigInt::from(chi.eval((n / d) as i64)) * BigInt::from(d).pow(2) * &pr2;
                let t2 = BigInt::from(chi.eval((d * pr) as i64)) * BigInt::from(d).pow(2) * &pr2;
                if (n / d) % p != 0 {
                    ex1 += &t1;
                    ex2 += &t2;
                }
                rhs1 += t1;
                rhs2 += t2;
            }
            let modulus = BigInt::from(pr);
            let diff = pair.c(hi) - pair.c(lo);
            let congruence = diff.is_integer() && diff.numer().is_multiple_of(&modulus);
            cells.push(EisensteinCell {
                n,
                r,
                co1_displayed: lhs1 == rhs1,
                co2_displayed: lhs2 == rhs2,
                co1_exact: lhs1 == ex1,
                co2_exact: lhs2 == ex2,
                congruence,
            });
        }
    }
    let top = nmax * p.pow(rmax);
    let sign_failures = (1..=top)
        .filter(|m| m % 23 != 0)
        .filter(|&m| pair.e(m) != BigInt::from(chi.eval(m as i64)) * pair.a(m))
        .collect();
    let scaling_failures = (1..=nmax)
        .filter(|&m| pair.a(23 * m) != pair.a(m) * 529 || pair.e(23 * m) != pair.e(m))
        .collect();
    let non_integral = (0..=top).filter(|&m| !pair.c(m).is_integer()).collect();
    Ok(EisensteinReport { p, rmax, nmax, cells, sign_failures, scaling_failures, non_integral })
}
