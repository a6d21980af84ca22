//! Finite relational structures, first-order formulas and the local
//! stability machinery built on them: independence, order and cover
//! properties, type counting, indiscernible extraction, Ramsey-type bounds
//! for random graphs and hypergraphs, and the good-class relation.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bits;
pub mod budget;
pub mod classify;
pub mod counting;
pub mod detect;
mod error;
pub mod indiscernible;
pub mod logic;
pub mod ramsey;
pub mod tuples;

pub use budget::{Budget, Search};
pub use error::{Error, Result};
pub use logic::{
    evaluate, Elem, Formula, PartitionedFormula, PhiMatrix, PhiType, Signature, Structure, Tuple,
    TupleSequence, TypeEntry, Var,
};
