//! Compiles every Rust listing in the guide as a doc-test.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/numbers.md")]
pub mod numbers {}

#[doc = include_str!("../../../book/src/expressions.md")]
pub mod expressions {}

#[doc = include_str!("../../../book/src/control.md")]
pub mod control {}

#[doc = include_str!("../../../book/src/lipschitz.md")]
pub mod lipschitz {}

#[doc = include_str!("../../../book/src/integrals.md")]
pub mod integrals {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
