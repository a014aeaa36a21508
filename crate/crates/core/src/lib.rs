//! Distinguishing families of unitary representations and two-way automata with
//! quantum and classical states for word problems of finitely generated groups.

pub mod analysis;
pub mod cli;
pub mod dfr;
pub mod error;
pub mod group;
pub mod io;
pub mod linalg;
pub mod machine;
pub mod repr;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
