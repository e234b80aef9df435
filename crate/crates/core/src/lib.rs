//! Exact Fourier expansions of degree-2 Siegel modular forms, Witt operators,
//! mod-p diagonal vanishing orders and Sturm-bound verification.
//!
//! All arithmetic is exact. Coefficient containers are generic over a
//! [`Ring`] context; the usual instantiations are re-exported below.

pub mod arith;
pub mod error;
pub mod format;
pub mod generators;
pub mod jacobi;
pub mod linalg;
pub mod qexp1;
pub mod ring;
pub mod siegel;
pub mod verify;

pub use arith::{PrimePower, Rational, Valuation};
pub use error::{Error, Result};
pub use generators::{GeneratorName, GeneratorRegistry, MonomialSpec};
pub use qexp1::{DiagSeries, QSeries1};
pub use ring::{Field, Numeric, PrimeField, Ring};
pub use siegel::{Expansion, ExpansionFp, IntExpansion, LeadingTerm, SiegelExpansion, VanishingOrder};

/// The rational numbers as a ring context.
pub type QQ = Numeric<Rational>;
/// The integers as a ring context.
pub type ZZ = Numeric<num_bigint::BigInt>;
