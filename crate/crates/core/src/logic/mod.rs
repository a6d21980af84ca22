//! Structures, formulas, evaluation and types.

mod eval;
mod formula;
mod structure;
mod types;

pub use eval::{evaluate, evaluate_formula, Evaluator, PhiMatrix, MATRIX_LIMIT};
pub use formula::{Formula, PartitionedFormula, Var};
pub use structure::{Elem, Relation, Signature, Structure, Tuple, TupleSequence};
pub use types::{close_under_negation, realized_types, tp, PhiType, TypeEntry};
