//! Multifiltrations of finite-dimensional rational vector spaces indexed by
//! preordered lattices, with exact decision procedures for their properties,
//! the grading extraction theorem, the Ind/Res calculus, and the toric and
//! solvable-group applications.

pub mod error;
pub mod exactlin;
mod intlattice;
pub mod multifilt;
pub mod oracle;
pub mod ordered_group;
pub mod solvable;
pub mod toric;
pub mod wire;

pub use error::{Error, Result};
