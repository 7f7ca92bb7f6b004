//! q-expansion generators: eta quotients, theta series of binary quadratic
//! forms, Eisenstein series with characters and `E_4`, plus the expression
//! language and the built-in registry of table rows.

mod eisenstein;
mod eta;
mod expr;
mod registry;
mod theta;

pub use eisenstein::{divisors, e4_series, eisenstein_series, EisensteinSpec};
pub use eta::{eta_quotient_series, EtaQuotient};
pub use expr::{eval_form_expr, FormExpr, Generator, ProductTerm};
pub use registry::{registry_entry, EntryId, EntrySeries, PrimeFilter, Registry, RegistryEntry};
pub use theta::{theta_series, ThetaForm};
