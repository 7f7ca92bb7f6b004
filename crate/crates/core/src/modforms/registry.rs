//! The fifteen built-in table rows, and the TOML override format.
//!
//! An override file replaces fields of existing entries:
//!
//! ```toml
//! [[entry]]
//! id = "vi"
//! m = "eta(1^1 2^4 3^5 / 6^4) + q^3"   # any field may be omitted
//! filter = "coprime"                   # "all", "coprime" or a character token
//! super_exponent = 3
//! super_min_prime = 5
//! closed_form = "vi"                   # or "none"
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::expr::{eval_form_expr, FormExpr};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::qseries::TruncatedSeries;
use crate::sequences::ClosedFormId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum EntryId {
    F23,
    BigF23,
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
    Vii,
    Viii,
    Ix,
    X,
    Xi,
    Xii,
    Xiii,
}

impl EntryId {
    pub const ALL: [EntryId; 15] = [
        EntryId::F23,
        EntryId::BigF23,
        EntryId::I,
        EntryId::Ii,
        EntryId::Iii,
        EntryId::Iv,
        EntryId::V,
        EntryId::Vi,
        EntryId::Vii,
        EntryId::Viii,
        EntryId::Ix,
        EntryId::X,
        EntryId::Xi,
        EntryId::Xii,
        EntryId::Xiii,
    ];

    pub fn token(&self) -> &'static str {
        match self {
            EntryId::F23 => "f23",
            EntryId::BigF23 => "F23",
            EntryId::I => "i",
            EntryId::Ii => "ii",
            EntryId::Iii => "iii",
            EntryId::Iv => "iv",
            EntryId::V => "v",
            EntryId::Vi => "vi",
            EntryId::Vii => "vii",
            EntryId::Viii => "viii",
            EntryId::Ix => "ix",
            EntryId::X => "x",
            EntryId::Xi => "xi",
            EntryId::Xii => "xii",
            EntryId::Xiii => "xiii",
        }
    }
}

impl fmt::Display for EntryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for EntryId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        EntryId::ALL
            .into_iter()
            .find(|e| e.token() == s)
            .ok_or_else(|| Error::UnknownEntry(s.to_string()))
    }
}

impl TryFrom<String> for EntryId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<EntryId> for String {
    fn from(e: EntryId) -> String {
        e.token().to_string()
    }
}

/// Which primes the proven congruence is claimed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PrimeFilter {
    /// `chi(p) = 1`.
    Character(DirichletCharacter),
    All,
    /// `p` divides none of the entry's eta/Eisenstein scales.
    CoprimeToScales,
}

impl fmt::Display for PrimeFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeFilter::Character(c) => write!(f, "{c}"),
            PrimeFilter::All => f.write_str("all"),
            PrimeFilter::CoprimeToScales => f.write_str("coprime"),
        }
    }
}

impl FromStr for PrimeFilter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(PrimeFilter::All),
            "coprime" => Ok(PrimeFilter::CoprimeToScales),
            other => Ok(PrimeFilter::Character(other.parse()?)),
        }
    }
}

impl TryFrom<String> for PrimeFilter {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PrimeFilter> for String {
    fn from(p: PrimeFilter) -> String {
        p.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistryEntry {
    pub id: EntryId,
    pub t_expr: FormExpr,
    pub f_expr: FormExpr,
    pub m_expr: FormExpr,
    pub prime_filter: PrimeFilter,
    /// `s` in the observed modulus `p^{s r}`.
    pub super_exponent: u32,
    /// Smallest prime the supercongruence is claimed for.
    pub super_min_prime: u64,
    pub closed_form: Option<ClosedFormId>,
}

/// Values of `t`, `f` and `M` at a common order.
#[derive(Debug, Clone)]
pub struct EntrySeries {
    pub t: TruncatedSeries,
    pub f: TruncatedSeries,
    pub m: TruncatedSeries,
}

impl RegistryEntry {
    /// Every eta/Eisenstein scale in `t`, `f` and `M`.
    pub fn scales(&self) -> Vec<u64> {
        let mut v: Vec<u64> = [&self.t_expr, &self.f_expr, &self.m_expr]
            .iter()
            .flat_map(|e| e.scales())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn eval(&self, order: i64) -> Result<EntrySeries> {
        Ok(EntrySeries {
            t: eval_form_expr(&self.t_expr, order)?,
            f: eval_form_expr(&self.f_expr, order)?,
            m: eval_form_expr(&self.m_expr, order)?,
        })
    }

    /// Checks the shape every entry must have: `t = +-q + ...`,
    /// `f = 1 + ...`, `M = 1 + ...`.
    pub fn check_shape(&self) -> Result<()> {
        let s = self.eval(2)?;
        let lead = s.t.leading_coefficient().map(|c| c.numer().clone());
        let unit = s.t.shift() == 1 && s.t.leading_coefficient().is_some_and(|c| c.is_integer())
            && lead.is_some_and(|c| c == 1.into() || c == (-1).into());
        if !unit {
            return Err(Error::ShiftMismatch(format!("{}: t must start with +-q, got {}", self.id, s.t)));
        }
        for (name, series) in [("f", &s.f), ("M", &s.m)] {
            if series.coefficient(0)? != num_traits::One::one() {
                return Err(Error::ShiftMismatch(format!("{}: {name} must start with 1, got {series}", self.id)));
            }
        }
        Ok(())
    }
}

struct Row {
    id: EntryId,
    t: &'static str,
    f: &'static str,
    m: &'static str,
    filter: PrimeFilter,
    super_exponent: u32,
    super_min_prime: u64,
    closed_form: Option<ClosedFormId>,
}

const L1: &str = "-7/240*E4(1) + 1/60*E4(2) - 3/80*E4(3) + 21/20*E4(6)";
const L2: &str = "1/120*E4(1) - 2/15*E4(2) - 3/40*E4(3) + 6/5*E4(6)";
const L3: &str = "1/240*E4(1) - 1/60*E4(2) - 27/80*E4(3) + 27/20*E4(6)";

fn builtin_rows() -> Vec<Row> {
    use DirichletCharacter as C;
    use PrimeFilter::*;
    let row = |id, t, f, m, filter, super_exponent, super_min_prime, closed_form| Row {
        id,
        t,
        f,
        m,
        filter,
        super_exponent,
        super_min_prime,
        closed_form,
    };
    let m23 = "-1/24*E(3,1,chi23) - 23/24*E(3,chi23,1)";
    vec![
        row(EntryId::F23, "eta(1^1 23^1) / theta(1,1,6)", "theta(1,1,6)", m23, Character(C::CHI23), 1, 2, None),
        row(EntryId::BigF23, "eta(1^1 23^1) / theta(2,1,3)", "theta(2,1,3)", m23, Character(C::CHI23), 1, 2, None),
        row(
            EntryId::I,
            "eta(2^12) / theta(1,0,1)^6",
            "theta(1,0,1)",
            "-4*E(3,1,chi-4) - 16*E(3,chi-4,1)",
            Character(C::CHI_MINUS4),
            2,
            3,
            Some(ClosedFormId::F2),
        ),
        row(
            EntryId::Ii,
            "eta(1^6 3^6) / theta(1,1,1)^6",
            "theta(1,1,1)",
            "-9*E(3,1,chi3) - 27*E(3,chi3,1)",
            Character(C::CHI3),
            2,
            3,
            Some(ClosedFormId::F3),
        ),
        row(EntryId::Iii, "eta(5^6 / 1^6)", "eta(1^5 / 5^1)", "E(4,1,chi5)", All, 3, 2, None),
        row(
            EntryId::Iv,
            "eta(1^3 7^3) / theta(1,1,2)^3",
            "theta(1,1,2)",
            "-7/8*E(3,1,chi7) - 49/8*E(3,chi7,1)",
            Character(C::CHI7),
            2,
            3,
            None,
        ),
        row(
            EntryId::V,
            "eta(1^2 11^2) / theta(1,1,3)^2",
            "theta(1,1,3)",
            "-1/3*E(3,1,chi11) - 11/3*E(3,chi11,1)",
            Character(C::CHI11),
            2,
            3,
            None,
        ),
        row(
            EntryId::Vi,
            "eta(1^3 6^9 / 2^3 3^9)",
            "eta(2^1 3^6 / 1^2 6^3)",
            "eta(1^1 2^4 3^5 / 6^4)",
            CoprimeToScales,
            3,
            5,
            Some(ClosedFormId::Vi),
        ),
        row(
            EntryId::Vii,
            "eta(-9^3 / 1^3)",
            "eta(1^3 / 3^1)",
            "eta(3^9 / 9^3)",
            CoprimeToScales,
            2,
            3,
            Some(ClosedFormId::Vii),
        ),
        row(
            EntryId::Viii,
            "eta(1^4 6^8 / 2^8 3^4)",
            "eta(2^6 3^1 / 1^3 6^2)",
            "eta(1^1 2^4 3^5 / 6^4)",
            CoprimeToScales,
            2,
            3,
            Some(ClosedFormId::Viii),
        ),
        row(
            EntryId::Ix,
            "eta(1^4 4^2 8^4 / 2^10)",
            "eta(2^10 / 1^4 4^4)",
            "eta(2^4 4^6 / 8^4)",
            CoprimeToScales,
            2,
            3,
            Some(ClosedFormId::Ix),
        ),
        row(
            EntryId::X,
            "eta(1^5 3^1 4^5 6^2 12^1 / 2^14)",
            "eta(2^15 3^2 12^2 / 1^6 4^6 6^5)",
            "eta(2^7 6^11 / 1^1 3^5 4^1 12^5)",
            CoprimeToScales,
            2,
            3,
            Some(ClosedFormId::X),
        ),
        row(
            EntryId::Xi,
            "eta(1^12 6^12 / 2^12 3^12)",
            "eta(2^7 3^7 / 1^5 6^5)",
            L1,
            CoprimeToScales,
            3,
            5,
            Some(ClosedFormId::Xi),
        ),
        row(
            EntryId::Xii,
            "eta(2^6 6^6 / 1^6 3^6)",
            "eta(1^4 3^4 / 2^2 6^2)",
            L2,
            CoprimeToScales,
            3,
            5,
            Some(ClosedFormId::Xii),
        ),
        row(
            EntryId::Xiii,
            "eta(3^4 6^4 / 1^4 2^4)",
            "eta(1^3 2^3 / 3^1 6^1)",
            L3,
            CoprimeToScales,
            3,
            2,
            Some(ClosedFormId::Xiii),
        ),
    ]
}

#[derive(Debug, Clone)]
pub struct Registry {
    entries: Vec<RegistryEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OverrideFile {
    #[serde(default)]
    entry: Vec<OverrideEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OverrideEntry {
    id: EntryId,
    t: Option<String>,
    f: Option<String>,
    m: Option<String>,
    filter: Option<PrimeFilter>,
    super_exponent: Option<u32>,
    super_min_prime: Option<u64>,
    closed_form: Option<String>,
}

impl Registry {
    pub fn builtin() -> Self {
        let entries = builtin_rows()
            .into_iter()
            .map(|r| RegistryEntry {
                id: r.id,
                t_expr: r.t.parse().expect("builtin t parses"),
                f_expr: r.f.parse().expect("builtin f parses"),
                m_expr: r.m.parse().expect("builtin M parses"),
                prime_filter: r.filter,
                super_exponent: r.super_exponent,
                super_min_prime: r.super_min_prime,
                closed_form: r.closed_form,
            })
            .collect();
        Registry { entries }
    }

    pub fn entries(&self) -> &[RegistryEntry] {
        &self.entries
    }

    pub fn get(&self, id: EntryId) -> &RegistryEntry {
        self.entries.iter().find(|e| e.id == id).expect("every id is present")
    }

    /// Looks an entry up by its text id.
    pub fn lookup(&self, id: &str) -> Result<&RegistryEntry> {
        Ok(self.get(id.parse()?))
    }

    /// Applies an override document on top of this registry.
    pub fn apply_override(&mut self, text: &str) -> Result<()> {
        let doc: OverrideFile = toml::from_str(text).map_err(|e| Error::Parse(format!("registry override: {e}")))?;
        for o in doc.entry {
            let e = self.entries.iter_mut().find(|e| e.id == o.id).expect("every id is present");
            if let Some(t) = o.t {
                e.t_expr = t.parse()?;
            }
            if let Some(f) = o.f {
                e.f_expr = f.parse()?;
            }
            if let Some(m) = o.m {
                e.m_expr = m.parse()?;
            }
            if let Some(p) = o.filter {
                e.prime_filter = p;
            }
            if let Some(s) = o.super_exponent {
                e.super_exponent = s;
            }
            if let Some(p) = o.super_min_prime {
                e.super_min_prime = p;
            }
            if let Some(c) = o.closed_form {
                e.closed_form = if c == "none" { None } else { Some(c.parse()?) };
            }
        }
        Ok(())
    }

    pub fn with_override_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut r = Registry::builtin();
        r.apply_override(&text)?;
        Ok(r)
    }
}

/// The built-in entry for `id`.
pub fn registry_entry(id: &str) -> Result<RegistryEntry> {
    Ok(Registry::builtin().lookup(id)?.clone())
}
