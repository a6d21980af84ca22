use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::eval::Evaluator;
use super::formula::PartitionedFormula;
use super::structure::{Elem, Structure, Tuple};
use crate::error::{Error, Result};
use crate::tuples::TupleSpace;

/// `φ_i(x̄; b̄)` when `positive`, otherwise its negation. `formula` indexes
/// the formula list the type was computed for.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeEntry {
    pub formula: usize,
    pub params: Tuple,
    pub positive: bool,
}

/// A set of signed formula instances in the object variables. Types built by
/// [`tp`] are complete and consistent over their domain; averages of short
/// sequences need not be.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhiType {
    object_arity: usize,
    entries: BTreeSet<TypeEntry>,
}

impl PhiType {
    pub fn new(object_arity: usize, entries: impl IntoIterator<Item = TypeEntry>) -> Self {
        PhiType { object_arity, entries: entries.into_iter().collect() }
    }

    pub fn object_arity(&self) -> usize {
        self.object_arity
    }

    pub fn entries(&self) -> &BTreeSet<TypeEntry> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, e: TypeEntry) {
        self.entries.insert(e);
    }

    pub fn contains(&self, formula: usize, params: &[Elem], positive: bool) -> bool {
        self.entries.contains(&TypeEntry { formula, params: params.to_vec(), positive })
    }

    /// Sign of `φ_formula(x̄; params)` in the type, if exactly one sign occurs.
    pub fn sign_of(&self, formula: usize, params: &[Elem]) -> Option<bool> {
        match (self.contains(formula, params, true), self.contains(formula, params, false)) {
            (true, false) => Some(true),
            (false, true) => Some(false),
            _ => None,
        }
    }

    /// Parameter tuples occurring in the type.
    pub fn domain(&self) -> BTreeSet<Tuple> {
        self.entries.iter().map(|e| e.params.clone()).collect()
    }

    pub fn is_consistent(&self) -> bool {
        !self.entries.iter().any(|e| e.positive && self.contains(e.formula, &e.params, false))
    }

    /// Restriction to entries whose parameters lie in `params`.
    pub fn restrict(&self, params: &BTreeSet<Tuple>) -> PhiType {
        PhiType {
            object_arity: self.object_arity,
            entries: self.entries.iter().filter(|e| params.contains(&e.params)).cloned().collect(),
        }
    }

    /// Restriction to parameters built from the given elements.
    pub fn restrict_to_elements(&self, elems: &BTreeSet<Elem>) -> PhiType {
        PhiType {
            object_arity: self.object_arity,
            entries: self.entries.iter().filter(|e| e.params.iter().all(|x| elems.contains(x))).cloned().collect(),
        }
    }
}

fn check_params(delta: &[PartitionedFormula], a: &[Elem], params: &[Tuple], m: &Structure) -> Result<()> {
    for phi in delta {
        if phi.r() != a.len() {
            return Err(Error::ArityMismatch(format!("{} has {} object variables, tuple has length {}", phi.name, phi.r(), a.len())));
        }
        if let Some(p) = params.iter().find(|p| p.len() != phi.s()) {
            return Err(Error::ArityMismatch(format!("{} has {} parameter variables, got tuple of length {}", phi.name, phi.s(), p.len())));
        }
    }
    for &e in a.iter().chain(params.iter().flatten()) {
        if e as usize >= m.size() {
            return Err(Error::ElementOutOfRange { elem: e as u64, size: m.size() });
        }
    }
    Ok(())
}

/// `tp_Δ(a, B)`: for every formula of `delta` and parameter tuple in
/// `params`, the instance or its negation that `a` satisfies.
pub fn tp(delta: &[PartitionedFormula], a: &[Elem], params: &[Tuple], m: &Structure) -> Result<PhiType> {
    check_params(delta, a, params, m)?;
    let mut out = PhiType::new(a.len(), []);
    for (i, phi) in delta.iter().enumerate() {
        let ev = Evaluator::new(m, phi)?;
        for p in params {
            out.insert(TypeEntry { formula: i, params: p.clone(), positive: ev.holds(a, p) });
        }
    }
    Ok(out)
}

/// All types over `params` realized by `object_arity`-tuples of `m`.
pub fn realized_types(delta: &[PartitionedFormula], params: &[Tuple], m: &Structure, object_arity: usize) -> Result<BTreeSet<PhiType>> {
    let space = TupleSpace::new(m.size(), object_arity);
    if space.checked_len().is_none_or(|l| l > crate::logic::MATRIX_LIMIT) {
        return Err(Error::TooLarge("object tuple space".into()));
    }
    let mut out = BTreeSet::new();
    for a in space.iter() {
        out.insert(tp(delta, &a, params, m)?);
    }
    Ok(out)
}

/// `delta` followed by the negations of its members that are not already
/// present syntactically.
pub fn close_under_negation(delta: &[PartitionedFormula]) -> Vec<PartitionedFormula> {
    let mut out: Vec<PartitionedFormula> = delta.to_vec();
    for phi in delta {
        let n = phi.negate();
        if !out.iter().any(|f| f.body == n.body && f.object_vars == n.object_vars && f.param_vars == n.param_vars) {
            out.push(n);
        }
    }
    out
}
