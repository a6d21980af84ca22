use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::formula::{Formula, PartitionedFormula, Var};
use super::structure::{Elem, Structure, Tuple};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::tuples::TupleSpace;

#[derive(Clone, Debug)]
enum Node {
    Atom { rel: usize, args: Vec<usize> },
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Exists(usize, Box<Node>),
    Forall(usize, Box<Node>),
}

struct Compiler<'a> {
    m: &'a Structure,
    scope: Vec<(Var, usize)>,
    slots: usize,
}

impl Compiler<'_> {
    fn lookup(&self, v: Var) -> Result<usize> {
        self.scope
            .iter()
            .rev()
            .find(|(w, _)| *w == v)
            .map(|&(_, s)| s)
            .ok_or_else(|| Error::UnboundVariable(v.to_string()))
    }

    fn compile(&mut self, f: &Formula) -> Result<Node> {
        Ok(match f {
            Formula::Atom { rel, args } => {
                let idx = self.m.signature().index_of(rel).ok_or_else(|| Error::UnknownRelation(rel.clone()))?;
                let arity = self.m.signature().relations()[idx].1;
                if arity != args.len() {
                    return Err(Error::ArityMismatch(format!("{rel} has arity {arity}, used with {}", args.len())));
                }
                let args = args.iter().map(|v| self.lookup(*v)).collect::<Result<Vec<_>>>()?;
                Node::Atom { rel: idx, args }
            }
            Formula::Not(a) => Node::Not(Box::new(self.compile(a)?)),
            Formula::And(a, b) => Node::And(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Formula::Or(a, b) => Node::Or(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Formula::Implies(a, b) => Node::Implies(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Formula::Iff(a, b) => Node::Iff(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                let slot = self.slots;
                self.slots += 1;
                self.scope.push((*v, slot));
                let body = Box::new(self.compile(a)?);
                self.scope.pop();
                if matches!(f, Formula::Exists(..)) {
                    Node::Exists(slot, body)
                } else {
                    Node::Forall(slot, body)
                }
            }
        })
    }
}

fn eval_node(n: &Node, m: &Structure, env: &mut [Elem], buf: &mut Vec<Elem>) -> bool {
    match n {
        Node::Atom { rel, args } => {
            buf.clear();
            buf.extend(args.iter().map(|&s| env[s]));
            m.holds(*rel, buf)
        }
        Node::Not(a) => !eval_node(a, m, env, buf),
        Node::And(a, b) => eval_node(a, m, env, buf) && eval_node(b, m, env, buf),
        Node::Or(a, b) => eval_node(a, m, env, buf) || eval_node(b, m, env, buf),
        Node::Implies(a, b) => !eval_node(a, m, env, buf) || eval_node(b, m, env, buf),
        Node::Iff(a, b) => eval_node(a, m, env, buf) == eval_node(b, m, env, buf),
        Node::Exists(s, a) => (0..m.size() as Elem).any(|e| {
            env[*s] = e;
            eval_node(a, m, env, buf)
        }),
        Node::Forall(s, a) => (0..m.size() as Elem).all(|e| {
            env[*s] = e;
            eval_node(a, m, env, buf)
        }),
    }
}

/// A partitioned formula compiled against a structure.
#[derive(Clone, Debug)]
pub struct Evaluator<'a> {
    m: &'a Structure,
    root: Node,
    r: usize,
    s: usize,
    slots: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(m: &'a Structure, phi: &PartitionedFormula) -> Result<Self> {
        let mut c = Compiler { m, scope: Vec::new(), slots: 0 };
        for v in phi.object_vars.iter().chain(&phi.param_vars) {
            c.scope.push((*v, c.slots));
            c.slots += 1;
        }
        let root = c.compile(&phi.body)?;
        Ok(Evaluator { m, root, r: phi.r(), s: phi.s(), slots: c.slots })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn structure(&self) -> &'a Structure {
        self.m
    }

    /// `M ⊨ φ[obj; par]`. Lengths and ranges are the caller's responsibility.
    pub fn holds(&self, obj: &[Elem], par: &[Elem]) -> bool {
        let mut env = vec![0; self.slots];
        env[..self.r].copy_from_slice(obj);
        env[self.r..self.r + self.s].copy_from_slice(par);
        eval_node(&self.root, self.m, &mut env, &mut Vec::new())
    }

    /// Checked variant of [`Evaluator::holds`].
    pub fn holds_checked(&self, obj: &[Elem], par: &[Elem]) -> Result<bool> {
        if obj.len() != self.r || par.len() != self.s {
            return Err(Error::ArityMismatch(format!(
                "expected {}+{} elements, got {}+{}",
                self.r,
                self.s,
                obj.len(),
                par.len()
            )));
        }
        for &e in obj.iter().chain(par) {
            if e as usize >= self.m.size() {
                return Err(Error::ElementOutOfRange { elem: e as u64, size: self.m.size() });
            }
        }
        Ok(self.holds(obj, par))
    }
}

/// Truth value of a formula under an assignment covering its free variables.
pub fn evaluate_formula(m: &Structure, f: &Formula, assignment: &BTreeMap<Var, Elem>) -> Result<bool> {
    let free: Vec<Var> = f.free_vars().into_iter().collect();
    let mut vals = Vec::with_capacity(free.len());
    for v in &free {
        let e = *assignment.get(v).ok_or_else(|| Error::UnboundVariable(v.to_string()))?;
        if e as usize >= m.size() {
            return Err(Error::ElementOutOfRange { elem: e as u64, size: m.size() });
        }
        vals.push(e);
    }
    let phi = PartitionedFormula { name: "f".into(), object_vars: free, param_vars: Vec::new(), body: f.clone() };
    Ok(Evaluator::new(m, &phi)?.holds(&vals, &[]))
}

/// Truth value of `phi` under an assignment of its free variables.
pub fn evaluate(m: &Structure, phi: &PartitionedFormula, assignment: &BTreeMap<Var, Elem>) -> Result<bool> {
    evaluate_formula(m, &phi.body, assignment)
}

/// Largest number of cells a [`PhiMatrix`] may have.
pub const MATRIX_LIMIT: usize = 1 << 28;

/// Truth table of `φ(x̄; ȳ)` over all object tuples (rows) and parameter
/// tuples (columns), both in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiMatrix {
    objs: TupleSpace,
    pars: TupleSpace,
    rows: Vec<Bits>,
    cols: Vec<Bits>,
}

impl PhiMatrix {
    pub fn new(m: &Structure, phi: &PartitionedFormula) -> Result<Self> {
        let ev = Evaluator::new(m, phi)?;
        let objs = TupleSpace::new(m.size(), phi.r());
        let pars = TupleSpace::new(m.size(), phi.s());
        let mut env = vec![0; ev.slots];
        let mut buf = Vec::new();
        let r = phi.r();
        PhiMatrix::from_fn(objs, pars, |o, p| {
            env[..r].copy_from_slice(o);
            env[r..r + p.len()].copy_from_slice(p);
            eval_node(&ev.root, m, &mut env, &mut buf)
        })
    }

    pub fn from_fn(objs: TupleSpace, pars: TupleSpace, mut f: impl FnMut(&[Elem], &[Elem]) -> bool) -> Result<Self> {
        let (no, np) = match (objs.checked_len(), pars.checked_len()) {
            (Some(a), Some(b)) if a.checked_mul(b).is_some_and(|c| c <= MATRIX_LIMIT) => (a, b),
            _ => return Err(Error::TooLarge("truth table of the formula".into())),
        };
        let mut rows = vec![Bits::new(np); no];
        let mut cols = vec![Bits::new(no); np];
        let ptuples: Vec<Tuple> = pars.iter().collect();
        for (oi, row) in rows.iter_mut().enumerate() {
            let o = objs.tuple(oi);
            for (pi, p) in ptuples.iter().enumerate() {
                if f(&o, p) {
                    row.set(pi, true);
                    cols[pi].set(oi, true);
                }
            }
        }
        Ok(PhiMatrix { objs, pars, rows, cols })
    }

    pub fn objs(&self) -> TupleSpace {
        self.objs
    }

    pub fn pars(&self) -> TupleSpace {
        self.pars
    }

    pub fn n_objs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_pars(&self) -> usize {
        self.cols.len()
    }

    #[inline]
    pub fn get(&self, o: usize, p: usize) -> bool {
        self.rows[o].get(p)
    }

    /// Parameters satisfied by object `o`.
    pub fn row(&self, o: usize) -> &Bits {
        &self.rows[o]
    }

    /// Objects satisfying parameter `p`.
    pub fn col(&self, p: usize) -> &Bits {
        &self.cols[p]
    }

    pub fn transpose(&self) -> PhiMatrix {
        PhiMatrix { objs: self.pars, pars: self.objs, rows: self.cols.clone(), cols: self.rows.clone() }
    }

    pub fn negate(&self) -> PhiMatrix {
        PhiMatrix {
            objs: self.objs,
            pars: self.pars,
            rows: self.rows.iter().map(Bits::not).collect(),
            cols: self.cols.iter().map(Bits::not).collect(),
        }
    }

    pub fn obj_tuple(&self, o: usize) -> Tuple {
        self.objs.tuple(o)
    }

    pub fn par_tuple(&self, p: usize) -> Tuple {
        self.pars.tuple(p)
    }

    pub fn obj_index(&self, t: &[Elem]) -> Result<usize> {
        check_tuple(t, self.objs)?;
        Ok(self.objs.index(t))
    }

    pub fn par_index(&self, t: &[Elem]) -> Result<usize> {
        check_tuple(t, self.pars)?;
        Ok(self.pars.index(t))
    }
}

fn check_tuple(t: &[Elem], space: TupleSpace) -> Result<()> {
    if t.len() != space.arity {
        return Err(Error::ArityMismatch(format!("expected tuple of length {}, got {}", space.arity, t.len())));
    }
    if let Some(&e) = t.iter().find(|&&e| e as usize >= space.n) {
        return Err(Error::ElementOutOfRange { elem: e as u64, size: space.n });
    }
    Ok(())
}
