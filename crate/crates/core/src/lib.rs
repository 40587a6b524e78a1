//! Grammars, logical-framework theories and views, and tableau analysis for
//! natural-language fragments.

// Module errors carry source locations and terms; results are not hot.
#![allow(clippy::result_large_err)]

pub mod bridge;
pub mod grammar;
pub mod kernel;
pub mod shell;
pub mod syntax;
pub mod tableau;
pub mod theory;
