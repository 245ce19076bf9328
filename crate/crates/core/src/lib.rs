//! Exact computer algebra for twisted Zhu algebras `A_{g,n}(V)`, the
//! bimodules `A_{g,n,m}(V)` and the filtered enveloping algebra `U(V[g])`
//! of a vertex operator algebra with a finite-order automorphism.

#![allow(clippy::too_many_arguments)]

pub mod error;
pub mod linalg;
pub mod lincomb;
pub mod modules;
mod rational;
pub mod scalars;
pub mod suite;
pub mod text;
pub mod ueva;
pub mod voa;
pub mod zhu;

pub use error::{Error, Result};
pub use lincomb::{LinComb, Partition};
pub use scalars::{Mode, Scalar};
pub use voa::{BasisKey, Element, VoaBackend};
