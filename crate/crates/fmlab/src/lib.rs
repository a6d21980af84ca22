//! Structure and formula files, JSON and CSV reports, and the `fmlab`
//! command line on top of `fmlab-core`.

pub mod cli;
mod diag;
pub mod fm;
pub mod fml;
pub mod mc;
pub mod report;

pub use diag::Diagnostic;
pub use fm::{parse_structure, StructureDocument};
pub use fml::{parse_formula, parse_formulas};
pub use report::emit_report;
