use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Variables come in three sorts: `x` for object positions, `y` for
/// parameter positions and `z` for bound helpers. The sort is only a naming
/// convention; any variable may be bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X(u32),
    Y(u32),
    Z(u32),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{i}"),
            Var::Y(i) => write!(f, "y{i}"),
            Var::Z(i) => write!(f, "z{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom { rel: String, args: Vec<Var> },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    pub fn atom(rel: &str, args: &[Var]) -> Formula {
        Formula::Atom { rel: rel.into(), args: args.to_vec() }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, o: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(o))
    }

    pub fn or(self, o: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(o))
    }

    pub fn implies(self, o: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(o))
    }

    pub fn iff(self, o: Formula) -> Formula {
        Formula::Iff(Box::new(self), Box::new(o))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    /// Conjunction of a nonempty list, associated to the left.
    pub fn conj(parts: Vec<Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Atom { args, .. } => {
                for v in args {
                    if !bound.contains(v) {
                        out.insert(*v);
                    }
                }
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                bound.push(*v);
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    fn all_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Atom { args, .. } => out.extend(args.iter().copied()),
            Formula::Not(a) => a.all_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                out.insert(*v);
                a.all_vars(out);
            }
        }
    }

    /// Simultaneous capture-avoiding substitution of free variables.
    pub fn rename_free(&self, map: &BTreeMap<Var, Var>) -> Formula {
        let mut used = BTreeSet::new();
        self.all_vars(&mut used);
        used.extend(map.values().copied());
        used.extend(map.keys().copied());
        let mut next_z = used.iter().filter_map(|v| if let Var::Z(i) = v { Some(*i + 1) } else { None }).max().unwrap_or(0);
        self.rename_inner(map, &mut next_z)
    }

    fn rename_inner(&self, map: &BTreeMap<Var, Var>, next_z: &mut u32) -> Formula {
        let bin = |a: &Formula, b: &Formula, nz: &mut u32| (Box::new(a.rename_inner(map, nz)), Box::new(b.rename_inner(map, nz)));
        match self {
            Formula::Atom { rel, args } => Formula::Atom {
                rel: rel.clone(),
                args: args.iter().map(|v| *map.get(v).unwrap_or(v)).collect(),
            },
            Formula::Not(a) => Formula::Not(Box::new(a.rename_inner(map, next_z))),
            Formula::And(a, b) => {
                let (a, b) = bin(a, b, next_z);
                Formula::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(a, b, next_z);
                Formula::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(a, b, next_z);
                Formula::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(a, b, next_z);
                Formula::Iff(a, b)
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                let mut inner = map.clone();
                inner.remove(v);
                let body_free = a.free_vars();
                let captures = inner.iter().any(|(k, t)| t == v && body_free.contains(k));
                let nv = if captures {
                    let z = Var::Z(*next_z);
                    *next_z += 1;
                    inner.insert(*v, z);
                    z
                } else {
                    *v
                };
                let body = Box::new(a.rename_inner(&inner, next_z));
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(nv, body)
                } else {
                    Formula::Forall(nv, body)
                }
            }
        }
    }

    /// All subformula occurrences, root first.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = alloc::vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            match f {
                Formula::Atom { .. } => {}
                Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => stack.push(a),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        out
    }

    pub fn relations(&self) -> BTreeSet<(&str, usize)> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::Atom { rel, args } => Some((rel.as_str(), args.len())),
                _ => None,
            })
            .collect()
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(..) | Formula::Atom { .. } => 5,
            Formula::Exists(..) | Formula::Forall(..) => 0,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let p = self.prec();
        let paren = if p == 0 { ctx > 0 } else { p < ctx };
        if paren {
            f.write_str("(")?;
        }
        match self {
            Formula::Atom { rel, args } => {
                write!(f, "{rel}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")?;
            }
            Formula::Not(a) => {
                f.write_str("~")?;
                a.write_prec(f, 5)?;
            }
            Formula::And(a, b) => {
                a.write_prec(f, 4)?;
                f.write_str(" & ")?;
                b.write_prec(f, 5)?;
            }
            Formula::Or(a, b) => {
                a.write_prec(f, 3)?;
                f.write_str(" | ")?;
                b.write_prec(f, 4)?;
            }
            Formula::Implies(a, b) => {
                a.write_prec(f, 3)?;
                f.write_str(" -> ")?;
                b.write_prec(f, 2)?;
            }
            Formula::Iff(a, b) => {
                a.write_prec(f, 2)?;
                f.write_str(" <-> ")?;
                b.write_prec(f, 2)?;
            }
            Formula::Exists(v, a) => {
                write!(f, "exists {v}. ")?;
                a.write_prec(f, 0)?;
            }
            Formula::Forall(v, a) => {
                write!(f, "forall {v}. ")?;
                a.write_prec(f, 0)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

/// A formula with its free variables split into an object block and a
/// parameter block, written `φ(x̄; ȳ)`. Either block may be empty.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartitionedFormula {
    pub name: String,
    pub object_vars: Vec<Var>,
    pub param_vars: Vec<Var>,
    pub body: Formula,
}

impl PartitionedFormula {
    pub fn new(name: &str, object_vars: Vec<Var>, param_vars: Vec<Var>, body: Formula) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in object_vars.iter().chain(&param_vars) {
            if !seen.insert(*v) {
                return Err(Error::InvalidArgument(format!("variable {v} declared twice in {name}")));
            }
        }
        for v in body.free_vars() {
            if !seen.contains(&v) {
                return Err(Error::UnboundVariable(format!("{v} in {name}")));
            }
        }
        Ok(PartitionedFormula { name: name.into(), object_vars, param_vars, body })
    }

    /// `R(x0, y0)` with object `x0` and parameter `y0`.
    pub fn binary(name: &str, rel: &str) -> Self {
        PartitionedFormula::new(name, alloc::vec![Var::X(0)], alloc::vec![Var::Y(0)], Formula::atom(rel, &[Var::X(0), Var::Y(0)]))
            .expect("well formed")
    }

    pub fn r(&self) -> usize {
        self.object_vars.len()
    }

    pub fn s(&self) -> usize {
        self.param_vars.len()
    }

    /// Number of relation atoms, counted with repetition.
    pub fn atom_count(&self) -> usize {
        self.body.subformulas().iter().filter(|f| matches!(f, Formula::Atom { .. })).count()
    }

    /// Same formula with the two blocks exchanged, renamed so that objects
    /// are again `x0..` and parameters `y0..`.
    pub fn swap_blocks(&self) -> PartitionedFormula {
        let mut map = BTreeMap::new();
        let new_obj: Vec<Var> = (0..self.s() as u32).map(Var::X).collect();
        let new_par: Vec<Var> = (0..self.r() as u32).map(Var::Y).collect();
        for (old, new) in self.param_vars.iter().zip(&new_obj) {
            map.insert(*old, *new);
        }
        for (old, new) in self.object_vars.iter().zip(&new_par) {
            map.insert(*old, *new);
        }
        PartitionedFormula {
            name: format!("{}^swap", self.name),
            object_vars: new_obj,
            param_vars: new_par,
            body: self.body.rename_free(&map),
        }
    }

    pub fn negate(&self) -> PartitionedFormula {
        let body = match &self.body {
            Formula::Not(inner) => (**inner).clone(),
            b => b.clone().not(),
        };
        let name = match self.name.strip_prefix("not_") {
            Some(rest) => rest.into(),
            None => format!("not_{}", self.name),
        };
        PartitionedFormula { name, object_vars: self.object_vars.clone(), param_vars: self.param_vars.clone(), body }
    }

    /// Checks that every atom names a relation of the signature with the
    /// right arity.
    pub fn check_signature(&self, sig: &crate::logic::Signature) -> Result<()> {
        for (rel, arity) in self.body.relations() {
            match sig.arity(rel) {
                None => return Err(Error::UnknownRelation(rel.into())),
                Some(a) if a != arity => {
                    return Err(Error::ArityMismatch(format!("{rel} has arity {a}, used with {arity}")))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

impl fmt::Display for PartitionedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, v) in self.object_vars.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("; ")?;
        for (i, v) in self.param_vars.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ") := {}", self.body)
    }
}
