//! Exact characteristic classes pushed forward from coadjoint-orbit bundles
//! into the Borel model of `H*(BG)`, with graded subalgebra analysis and an
//! independent Monte Carlo Haar oracle.

pub mod error;
pub mod exec;
pub mod haar;
pub mod linalg;
pub mod poly;
pub mod pushforward;
pub mod rational;
pub mod rootsys;
pub mod subalgebra;

pub use error::{Error, Result};
pub use exec::Exec;
pub use poly::{GradedSubspaceBasis, RationalPoly};
pub use rootsys::{OrbitPoint, RootSystem, WeylElement};
