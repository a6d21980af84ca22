use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::tuples::TupleSpace;

pub type Elem = u32;
pub type Tuple = Vec<Elem>;

/// Relation symbols with arities, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    relations: Vec<(String, usize)>,
}

impl Signature {
    pub fn new<S: Into<String>>(relations: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for (name, arity) in relations {
            let name = name.into();
            if arity == 0 {
                return Err(Error::InvalidSignature(format!("relation {name} has arity 0")));
            }
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::InvalidSignature(format!("bad relation name {name:?}")));
            }
            if out.iter().any(|(n, _)| *n == name) {
                return Err(Error::InvalidSignature(format!("duplicate relation {name}")));
            }
            out.push((name, arity));
        }
        Ok(Signature { relations: out })
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|(n, _)| n == name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.index_of(name).map(|i| self.relations[i].1)
    }
}

/// Relations store up to this many bits densely for constant-time lookup.
const DENSE_LIMIT: usize = 1 << 22;

#[derive(Clone, Debug)]
pub struct Relation {
    arity: usize,
    space: TupleSpace,
    tuples: BTreeSet<Tuple>,
    dense: Option<Bits>,
}

impl Relation {
    fn new(n: usize, arity: usize) -> Self {
        let space = TupleSpace::new(n, arity);
        let dense = space.checked_len().filter(|&l| l <= DENSE_LIMIT).map(Bits::new);
        Relation { arity, space, tuples: BTreeSet::new(), dense }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &BTreeSet<Tuple> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    #[inline]
    pub fn contains(&self, t: &[Elem]) -> bool {
        match &self.dense {
            Some(b) => b.get(self.space.index(t)),
            None => self.tuples.contains(t),
        }
    }

    fn insert(&mut self, t: Tuple) -> bool {
        if let Some(b) = &mut self.dense {
            b.set(self.space.index(&t), true);
        }
        self.tuples.insert(t)
    }
}

/// A finite structure with universe `{0, ..., size-1}`.
#[derive(Clone, Debug)]
pub struct Structure {
    signature: Signature,
    size: usize,
    relations: Vec<Relation>,
}

impl PartialEq for Structure {
    fn eq(&self, o: &Self) -> bool {
        self.signature == o.signature
            && self.size == o.size
            && self.relations.iter().zip(&o.relations).all(|(a, b)| a.tuples == b.tuples)
    }
}

impl Eq for Structure {}

impl Structure {
    pub fn new(signature: Signature, size: usize) -> Self {
        let relations = signature.relations().iter().map(|&(_, a)| Relation::new(size, a)).collect();
        Structure { signature, size, relations }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.signature.index_of(name).map(|i| &self.relations[i])
    }

    pub fn relation_at(&self, idx: usize) -> &Relation {
        &self.relations[idx]
    }

    /// Adds a tuple; returns `false` if it was already present.
    pub fn insert(&mut self, name: &str, t: &[Elem]) -> Result<bool> {
        let idx =
            self.signature.index_of(name).ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
        let rel = &mut self.relations[idx];
        if t.len() != rel.arity {
            return Err(Error::ArityMismatch(format!(
                "{name} has arity {} but tuple has length {}",
                rel.arity,
                t.len()
            )));
        }
        for &e in t {
            if e as usize >= self.size {
                return Err(Error::ElementOutOfRange { elem: e as u64, size: self.size });
            }
        }
        Ok(rel.insert(t.to_vec()))
    }

    #[inline]
    pub fn holds(&self, rel: usize, t: &[Elem]) -> bool {
        self.relations[rel].contains(t)
    }

    pub fn elements(&self) -> Vec<Elem> {
        (0..self.size as Elem).collect()
    }

    /// Induced substructure on `subset`; element `subset[i]` becomes `i`.
    pub fn induced(&self, subset: &[Elem]) -> Result<Structure> {
        let mut pos = alloc::vec![usize::MAX; self.size];
        for (i, &e) in subset.iter().enumerate() {
            if e as usize >= self.size {
                return Err(Error::ElementOutOfRange { elem: e as u64, size: self.size });
            }
            if pos[e as usize] != usize::MAX {
                return Err(Error::InvalidArgument(format!("element {e} repeated in subset")));
            }
            pos[e as usize] = i;
        }
        let mut out = Structure::new(self.signature.clone(), subset.len());
        for (ri, rel) in self.relations.iter().enumerate() {
            for t in &rel.tuples {
                if t.iter().all(|&e| pos[e as usize] != usize::MAX) {
                    let nt: Tuple = t.iter().map(|&e| pos[e as usize] as Elem).collect();
                    out.relations[ri].insert(nt);
                }
            }
        }
        Ok(out)
    }

    /// Undirected loopless graph with relation `R`.
    pub fn graph(size: usize, edges: &[(Elem, Elem)]) -> Result<Structure> {
        let mut m = Structure::new(Signature::new([("R", 2)])?, size);
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidArgument(format!("loop at {u}")));
            }
            m.insert("R", &[u, v])?;
            m.insert("R", &[v, u])?;
        }
        Ok(m)
    }

    /// Graph from an adjacency bitmask over pairs `(i, j)`, `i < j`, in
    /// lexicographic order.
    pub fn graph_from_mask(size: usize, mask: u64) -> Structure {
        let mut edges = Vec::new();
        let mut bit = 0;
        for i in 0..size as Elem {
            for j in i + 1..size as Elem {
                if mask >> bit & 1 == 1 {
                    edges.push((i, j));
                }
                bit += 1;
            }
        }
        Structure::graph(size, &edges).expect("valid graph")
    }

    /// Strict linear order `Lt` on `{0..size}`.
    pub fn linear_order(size: usize) -> Structure {
        let mut m = Structure::new(Signature::new([("Lt", 2)]).expect("valid"), size);
        for i in 0..size as Elem {
            for j in i + 1..size as Elem {
                m.insert("Lt", &[i, j]).expect("in range");
            }
        }
        m
    }
}

/// A finite sequence of equal-length tuples.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TupleSequence {
    arity: usize,
    tuples: Vec<Tuple>,
}

impl TupleSequence {
    pub fn new(arity: usize, tuples: Vec<Tuple>) -> Result<Self> {
        if let Some(t) = tuples.iter().find(|t| t.len() != arity) {
            return Err(Error::ArityMismatch(format!(
                "sequence of arity {arity} contains tuple of length {}",
                t.len()
            )));
        }
        Ok(TupleSequence { arity, tuples })
    }

    /// Sequence of single elements.
    pub fn of_elements(elems: &[Elem]) -> Self {
        TupleSequence { arity: 1, tuples: elems.iter().map(|&e| alloc::vec![e]).collect() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn get(&self, i: usize) -> &Tuple {
        &self.tuples[i]
    }

    /// Concatenation of the tuples at the given positions.
    pub fn concat(&self, positions: &[usize]) -> Tuple {
        positions.iter().flat_map(|&p| self.tuples[p].iter().copied()).collect()
    }

    pub fn select(&self, positions: &[usize]) -> TupleSequence {
        TupleSequence { arity: self.arity, tuples: positions.iter().map(|&p| self.tuples[p].clone()).collect() }
    }

    pub fn check_range(&self, size: usize) -> Result<()> {
        for t in &self.tuples {
            for &e in t {
                if e as usize >= size {
                    return Err(Error::ElementOutOfRange { elem: e as u64, size });
                }
            }
        }
        Ok(())
    }
}
