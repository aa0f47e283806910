//! Exact arithmetic for Drinfeld modules over F_q(t).
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: F_q, F_q[t], F_q(t) and factorization;
//! * [`places`]: places of F_q(t), valuations and log-absolute values with
//!   `log|t|_inf = 1`;
//! * [`twisted`] and [`drinfeld`]: the twisted polynomial ring and Drinfeld modules;
//! * [`newton`]: Newton polygons and root-valuation profiles of packet polynomials;
//! * [`heights`]: naive, local and global canonical heights;
//! * [`integrality`]: S-integrality verdicts for torsion and backward-orbit packets;
//! * [`equidist`]: the Haar log-integral, lattice counts and shell statistics.
//!
//! Everything is exact: valuations are integers and log-values are rationals.

pub mod drinfeld;
pub mod equidist;
mod error;
pub mod field;
pub mod heights;
pub mod integrality;
pub mod newton;
pub mod places;
pub mod twisted;

pub use drinfeld::{DrinfeldModule, ModuleDef, TorsionCertificate};
pub use error::{Error, Result};

/// Exact rational numbers used for log-values and heights.
pub type Rational = num::BigRational;

#[cfg(test)]
pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub(crate) fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}
