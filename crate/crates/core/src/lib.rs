//! Exact arithmetic in small number fields, S-unit machinery, explicit
//! counting constants and desk-scale exhaustive solvers for Thue–Mahler
//! family equations
//!
//! ```text
//! (X - a1 E1 Y)(X - a2 E2 Y)(X - a3 E3 Y) Z = mu E
//! ```
//!
//! over the S-integers of a number field, together with the dependence
//! relations, canonical representatives and equivalence tests that organize
//! their solutions into finitely many classes.
//!
//! Every search in this crate is exhaustive over an explicit, user-supplied
//! box. Nothing here claims completeness beyond the box.

pub mod constants;
pub mod decomposition;
pub mod error;
pub mod forms;
pub mod interval;
pub mod linalg;
pub mod number_field;
pub mod places;
pub mod poly;
pub mod poly_fp;
pub mod rational;
pub mod report;
pub mod roots;
pub mod s_arith;
pub mod sunit;
pub mod thue_mahler;
pub mod cli;

pub use error::{Error, Result};

pub use number_field::{FieldElement, NumberField};
