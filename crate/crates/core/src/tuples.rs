//! Tuple spaces in lexicographic order and combination helpers.

use alloc::vec;
use alloc::vec::Vec;

use crate::logic::{Elem, Tuple};

/// All `arity`-tuples over `{0..n}`, indexed in lexicographic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TupleSpace {
    pub n: usize,
    pub arity: usize,
}

impl TupleSpace {
    pub fn new(n: usize, arity: usize) -> Self {
        TupleSpace { n, arity }
    }

    /// Number of tuples, or `None` on overflow.
    pub fn checked_len(&self) -> Option<usize> {
        let mut l: usize = 1;
        for _ in 0..self.arity {
            l = l.checked_mul(self.n)?;
        }
        Some(l)
    }

    pub fn len(&self) -> usize {
        self.checked_len().expect("tuple space overflow")
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, t: &[Elem]) -> usize {
        debug_assert_eq!(t.len(), self.arity);
        t.iter().fold(0, |acc, &e| acc * self.n + e as usize)
    }

    pub fn tuple(&self, mut idx: usize) -> Tuple {
        let mut t = vec![0; self.arity];
        for slot in t.iter_mut().rev() {
            *slot = (idx % self.n) as Elem;
            idx /= self.n;
        }
        t
    }

    pub fn iter(&self) -> impl Iterator<Item = Tuple> + '_ {
        (0..self.len()).map(move |i| self.tuple(i))
    }
}

/// All tuples of the given arity over `elems`, in lexicographic order of
/// positions in `elems`.
pub fn tuples_over(elems: &[Elem], arity: usize) -> Vec<Tuple> {
    let space = TupleSpace::new(elems.len(), arity);
    (0..space.len())
        .map(|i| space.tuple(i).into_iter().map(|p| elems[p as usize]).collect())
        .collect()
}

/// Calls `f` on every increasing `k`-subset of `0..n` in lexicographic order;
/// stops early when `f` returns `false`.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        if !f(&c) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_combination(n, k, |c| {
        out.push(c.to_vec());
        true
    });
    out
}

pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(r)
}
