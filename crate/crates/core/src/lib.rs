//! Exact q-series arithmetic for eta quotients, theta series and Eisenstein
//! series with characters; re-expansion of modular forms in a modular
//! function `t`; and scanners for the congruences the resulting integer
//! sequences satisfy.

pub mod characters;
pub mod congruence;
pub mod error;
pub mod expansion;
pub mod modforms;
pub mod numeric;
pub mod qseries;
pub mod selftest;
pub mod sequences;

pub use error::{Error, Result};
