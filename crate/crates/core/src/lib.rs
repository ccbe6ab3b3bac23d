//! Computational toolkit for Dirichlet characters and their partial sums.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`]: factorization, unit-group generators, orders, coprime
//!   counting and prime reciprocal sums;
//! - [`characters`]: exact character algebra over a fixed generator basis;
//! - [`sums`]: Cesàro, logarithmic and twisted sums, Gauss sums, the Pólya
//!   expansion, the Granville–Soundararajan twist identity and the savings
//!   metrics used by the scanner;
//! - [`pretentious`]: pretentious distances, minimisation over `n^{it}`,
//!   the Halász–Montgomery–Tenenbaum bound and twist repulsion reports;
//! - [`convolution`]: the non-negative convolution `1∗1∗f∗f̄`, the Fejér
//!   kernel, the Dickman function and the mean-value reporters built on them.
//!
//! The guide under `book/` walks through each layer; its code listings are
//! compiled as doc-tests of this crate.

pub mod arith;
pub mod characters;
pub mod convolution;
pub mod cyclotomic;
mod error;
pub mod numeric;
pub mod pretentious;
pub mod sums;

pub use characters::{CharacterFilter, DirichletCharacter, Parity, UnitValue};
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/characters.md")]
    mod characters {}
    #[doc = include_str!("../../../book/src/sums.md")]
    mod sums {}
    #[doc = include_str!("../../../book/src/pretentious.md")]
    mod pretentious {}
    #[doc = include_str!("../../../book/src/convolution.md")]
    mod convolution {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
