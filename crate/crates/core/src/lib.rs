//! Inverse-limit presentations of finitely generated abelian groups, computed
//! with exact arithmetic.
//!
//! The building blocks are the groups ℤ, ℤ/d, ℚ, ℚ/ℤ and ℤ(p^∞)
//! ([`atoms`]), finite-support direct sums of them ([`sums`]) and a small
//! closed language of homomorphisms between such sums ([`homs`]). On top of
//! these, [`hull`] embeds a group `A` in a divisible group with divisible
//! cokernel, [`systems`] builds the inverse systems whose limits recover `A`,
//! and [`ladder`] factors maps through countable chains of divisible groups.

pub mod arith;
pub mod atoms;
pub mod error;
pub mod homs;
pub mod hull;
pub mod ladder;
pub mod report;
pub mod rng;
pub mod suites;
pub mod sums;
pub mod systems;

pub use arith::{IntMatrix, Integer, Rational, SnfResult};
pub use atoms::{Atom, AtomElement};
pub use error::{Error, Result};
pub use homs::Hom;
pub use hull::{Decomposition, InjectivePresentation};
pub use report::{Check, CheckStatus, Report};
pub use sums::{Element, Extent, Family, ModuleShape};
