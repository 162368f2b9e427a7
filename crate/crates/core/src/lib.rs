//! Constant p-mean curvature surfaces in the Heisenberg group H₁.
//!
//! The crate covers the Liénard equation satisfied by `α` along
//! characteristic lines ([`lienard`]), the metric and normal-form theory of
//! α-models ([`fundamental`], [`models`]), ruled constructions and the
//! standard examples ([`construct`]), and first-principles numerical checks
//! on arbitrary charts ([`verify`]). The `heismin` binary wraps these in a
//! command-line interface ([`cli`]).
//!
//! The book under `book/` walks through each topic with runnable examples.

pub mod chart;
pub mod cli;
pub mod construct;
pub mod error;
pub mod export;
pub mod expr;
pub mod func;
pub mod fundamental;
pub mod heisenberg;
pub mod lienard;
pub mod models;
pub mod quad;
pub mod verify;

// Book chapters are compiled as doc-tests so their snippets cannot rot.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lienard.md")]
    mod lienard {}
    #[doc = include_str!("../../../book/src/normal-forms.md")]
    mod normal_forms {}
    #[doc = include_str!("../../../book/src/ruled.md")]
    mod ruled {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
