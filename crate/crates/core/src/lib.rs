//! Exact diagram calculus for colored Jacobi diagrams over Blanchfield modules.
//!
//! Everything here is computed over exact big-integer rationals: Laurent
//! polynomial arithmetic, hermitian pairings on Blanchfield modules presented
//! by structure-theorem blocks, uni-trivalent diagrams with canonical forms,
//! relation-span membership by sparse elimination, and the pairing / edge
//! opening maps between diagram spaces. No floating point anywhere.

pub mod blanchfield;
pub mod diagram;
pub mod error;
pub mod formal;
pub mod fraction;
pub mod laurent;
pub mod maps;
pub mod relations;
pub mod series;

pub use blanchfield::{BlanchfieldModule, BlockSpec, ModuleAutomorphism, ModuleElement};

pub use diagram::{Diagram, DiagramKind, VertexKind};
pub use error::Error;
pub use formal::FormalSum;

pub use fraction::LaurentFraction;
pub use laurent::LaurentPoly;

/// Exact rational scalar used throughout.
pub type Rat = num::BigRational;

/// Convenience constructor for small rationals.
pub fn rat(n: i64, d: i64) -> Rat {
    use num::BigInt;
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Convenience constructor for integer rationals.
pub fn rat_int(n: i64) -> Rat {
    use num::BigInt;
    Rat::from(BigInt::from(n))
}
