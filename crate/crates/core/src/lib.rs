//! Operator systems inside M_d, UCP maps and semigroups on them, and their
//! extensions to the full matrix algebra.
//!
//! Maps act in the Heisenberg picture and are stored by Choi matrix; see
//! [`cpmaps`] for the convention.

pub mod catalog;
pub mod cpmaps;
pub mod densela;
pub mod dynamics;
pub mod error;
pub mod extension;
pub mod io;
pub mod opsys;
pub mod sampling;
pub mod tol;

pub use cpmaps::{CpReport, SuperOp, CHOI_CONVENTION};
pub use densela::{CMatrix, HermMatrix, C64};
pub use dynamics::{Certificates, Generator, SubsystemGenerator};
pub use error::{Error, Result};
pub use extension::{ExtensionOptions, ExtensionProblem, ExtensionReport, StartStrategy};
pub use opsys::{LevelElement, MatricialSystem};
