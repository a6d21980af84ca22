//! Witness searches for the independence, order, weak order and cover
//! properties, type splitting, and the constructive order witness built from
//! a splitting chain.
//!
//! Every search enumerates candidates in lexicographic order and returns the
//! first witness found. Certificates carry a `verify` method that re-checks
//! them by direct evaluation, independently of the truth tables used here.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_rational::BigRational;

use crate::bits::Bits;
use crate::budget::{Budget, OutOfBudget, Search};
use crate::error::{Error, Result};
use crate::logic::{tp, Elem, Evaluator, Formula, PartitionedFormula, PhiMatrix, PhiType, Structure, Tuple, Var};
use crate::tuples::{binomial_u128, combinations, tuples_over};

/// `a_i` for `i < k` and `b_w` for every `w ⊆ {0..k-1}`. Subsets are bit
/// masks: bit `i` of `w` is set iff `i ∈ w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceWitness {
    pub a: Vec<Tuple>,
    pub b: BTreeMap<u64, Tuple>,
}

impl IndependenceWitness {
    pub fn k(&self) -> usize {
        self.a.len()
    }

    /// Re-checks `M ⊨ φ[a_i; b_w] ⟺ i ∈ w` by evaluation.
    pub fn verify(&self, m: &Structure, phi: &PartitionedFormula) -> Result<bool> {
        let ev = Evaluator::new(m, phi)?;
        let k = self.a.len();
        if self.b.len() != 1 << k {
            return Ok(false);
        }
        for (&w, b) in &self.b {
            for (i, a) in self.a.iter().enumerate() {
                if ev.holds_checked(a, b)? != (w >> i & 1 == 1) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// `a_0, ..., a_{n-1}` with `M ⊨ φ[a_i; a_j] ⟺ i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderWitness {
    pub a: Vec<Tuple>,
}

impl OrderWitness {
    pub fn verify(&self, m: &Structure, phi: &PartitionedFormula) -> Result<bool> {
        let ev = Evaluator::new(m, phi)?;
        for (i, ai) in self.a.iter().enumerate() {
            for (j, aj) in self.a.iter().enumerate() {
                if ev.holds_checked(ai, aj)? != (i < j) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Parameters `d_i` and realizers `x_j` with `M ⊨ φ[x_j; d_i] ⟺ i ≥ j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakOrderWitness {
    pub d: Vec<Tuple>,
    pub realizers: Vec<Tuple>,
}

impl WeakOrderWitness {
    pub fn verify(&self, m: &Structure, phi: &PartitionedFormula) -> Result<bool> {
        if self.d.len() != self.realizers.len() {
            return Ok(false);
        }
        let ev = Evaluator::new(m, phi)?;
        for (j, x) in self.realizers.iter().enumerate() {
            for (i, d) in self.d.iter().enumerate() {
                if ev.holds_checked(x, d)? != (i >= j) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Parameters `b_0..b_{n-1}`, `n ≥ d`, such that every fewer-than-`d` of the
/// instances `φ(x; b_i)` have a common realizer but all `n` together do not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverViolation {
    pub d: usize,
    pub b: Vec<Tuple>,
}

impl CoverViolation {
    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// The unsatisfiable instance set; here always the whole family.
    pub fn unsat_core(&self) -> &[Tuple] {
        &self.b
    }

    pub fn verify(&self, m: &Structure, phi: &PartitionedFormula) -> Result<bool> {
        let ev = Evaluator::new(m, phi)?;
        let objs = tuples_over(&m.elements(), phi.r());
        let realizable = |idx: &[usize]| -> Result<bool> {
            for x in &objs {
                let mut all = true;
                for &i in idx {
                    if !ev.holds_checked(x, &self.b[i])? {
                        all = false;
                        break;
                    }
                }
                if all {
                    return Ok(true);
                }
            }
            Ok(false)
        };
        let n = self.b.len();
        if n < self.d {
            return Ok(false);
        }
        for size in 1..self.d {
            for w in combinations(n, size) {
                if !realizable(&w)? {
                    return Ok(false);
                }
            }
        }
        let all: Vec<usize> = (0..n).collect();
        Ok(!realizable(&all)?)
    }
}

fn require_square(phi: &PartitionedFormula) -> Result<()> {
    if phi.r() != phi.s() {
        return Err(Error::ArityMismatch(format!(
            "order property needs equal blocks, {} has {} and {}",
            phi.name,
            phi.r(),
            phi.s()
        )));
    }
    Ok(())
}

/// Lexicographically first `k`-independence witness.
pub fn find_k_independence(m: &Structure, phi: &PartitionedFormula, k: usize, budget: &mut Budget) -> Result<Search<IndependenceWitness>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let mat = PhiMatrix::new(m, phi)?;
    Ok(independence_in(&mat, k, budget).map(|(a, b)| IndependenceWitness {
        a: a.iter().map(|&o| mat.obj_tuple(o)).collect(),
        b: b.iter().enumerate().map(|(w, &p)| (w as u64, mat.par_tuple(p))).collect(),
    }))
}

/// Independence search on a truth table. Returns object indices `a` (strictly
/// increasing) and, for every mask `w`, the least parameter index `b[w]`.
///
/// A partial choice `a_0 < ... < a_{t-1}` splits the parameters into `2^t`
/// classes by their pattern; it extends to a witness only if every class
/// keeps at least `2^{k-t}` members. Candidates failing the split test at
/// one level fail it at every deeper level, so candidate lists are filtered
/// once per level.
pub fn independence_in(mat: &PhiMatrix, k: usize, budget: &mut Budget) -> Search<(Vec<usize>, Vec<usize>)> {
    if k > 63 {
        return Search::Exhausted;
    }
    let cands: Vec<usize> = (0..mat.n_objs()).collect();
    let classes = vec![Bits::full(mat.n_pars())];
    let mut chosen = Vec::new();
    match indep_dfs(mat, k, &cands, &classes, &mut chosen, budget) {
        Ok(Some(b)) => Search::Found((chosen, b)),
        Ok(None) => Search::Exhausted,
        Err(OutOfBudget) => Search::OutOfBudget,
    }
}

fn indep_dfs(
    mat: &PhiMatrix,
    k: usize,
    cands: &[usize],
    classes: &[Bits],
    chosen: &mut Vec<usize>,
    budget: &mut Budget,
) -> core::result::Result<Option<Vec<usize>>, OutOfBudget> {
    let t = chosen.len();
    if t == k {
        return Ok(Some(classes.iter().map(|c| c.first().expect("nonempty class")).collect()));
    }
    let need = 1usize << (k - t - 1);
    let filtered: Vec<usize> = cands
        .iter()
        .copied()
        .filter(|&o| {
            let row = mat.row(o);
            classes.iter().all(|c| c.and_count(row) >= need && c.and_not_count(row) >= need)
        })
        .collect();
    for (idx, &o) in filtered.iter().enumerate() {
        if filtered.len() - idx < k - t {
            break;
        }
        budget.tick()?;
        let row = mat.row(o);
        let mut next = vec![Bits::new(0); classes.len() * 2];
        for (w, c) in classes.iter().enumerate() {
            next[w | (1 << t)] = c.and(row);
            next[w] = c.and_not(row);
        }
        chosen.push(o);
        if let Some(b) = indep_dfs(mat, k, &filtered[idx + 1..], &next, chosen, budget)? {
            return Ok(Some(b));
        }
        chosen.pop();
    }
    Ok(None)
}

/// First `n`-order witness in lexicographic order of the sequence.
pub fn find_n_order(m: &Structure, phi: &PartitionedFormula, n: usize, budget: &mut Budget) -> Result<Search<OrderWitness>> {
    require_square(phi)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mat = PhiMatrix::new(m, phi)?;
    Ok(order_in(&mat, n, budget).map(|a| OrderWitness { a: a.iter().map(|&o| mat.obj_tuple(o)).collect() }))
}

/// Order search on a square truth table; indices are shared between objects
/// and parameters.
pub fn order_in(mat: &PhiMatrix, n: usize, budget: &mut Budget) -> Search<Vec<usize>> {
    assert_eq!(mat.n_objs(), mat.n_pars(), "square truth table");
    let mut start = Bits::new(mat.n_objs());
    for o in 0..mat.n_objs() {
        if !mat.get(o, o) {
            start.set(o, true);
        }
    }
    let mut chosen = Vec::new();
    match order_dfs(mat, n, &start, &mut chosen, budget) {
        Ok(true) => Search::Found(chosen),
        Ok(false) => Search::Exhausted,
        Err(OutOfBudget) => Search::OutOfBudget,
    }
}

fn order_dfs(mat: &PhiMatrix, n: usize, cands: &Bits, chosen: &mut Vec<usize>, budget: &mut Budget) -> core::result::Result<bool, OutOfBudget> {
    if chosen.len() == n {
        return Ok(true);
    }
    for o in cands.iter() {
        budget.tick()?;
        // later elements b need φ[o; b] and ¬φ[b; o]
        let next = mat.row(o).and_not(mat.col(o)).and(cands);
        chosen.push(o);
        if order_dfs(mat, n, &next, chosen, budget)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// First weak `m`-order witness; realizers are the least objects satisfying
/// their pattern.
pub fn find_weak_m_order(m: &Structure, phi: &PartitionedFormula, mm: usize, budget: &mut Budget) -> Result<Search<WeakOrderWitness>> {
    if mm == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let mat = PhiMatrix::new(m, phi)?;
    Ok(weak_order_in(&mat, mm, budget).map(|(d, x)| WeakOrderWitness {
        d: d.iter().map(|&p| mat.par_tuple(p)).collect(),
        realizers: x.iter().map(|&o| mat.obj_tuple(o)).collect(),
    }))
}

/// Weak order search on a truth table: parameter indices `d` and realizer
/// object indices.
pub fn weak_order_in(mat: &PhiMatrix, mm: usize, budget: &mut Budget) -> Search<(Vec<usize>, Vec<usize>)> {
    let mut d = Vec::new();
    let sets: Vec<Bits> = Vec::new();
    let none_yet = Bits::full(mat.n_objs());
    match weak_dfs(mat, mm, &sets, &none_yet, &mut d, budget) {
        Ok(Some(x)) => Search::Found((d, x)),
        Ok(None) => Search::Exhausted,
        Err(OutOfBudget) => Search::OutOfBudget,
    }
}

/// `sets[j]` holds the objects still eligible as `x_j`; `rest` the objects
/// negative on every parameter chosen so far (candidates for later `x_j`).
fn weak_dfs(
    mat: &PhiMatrix,
    mm: usize,
    sets: &[Bits],
    rest: &Bits,
    d: &mut Vec<usize>,
    budget: &mut Budget,
) -> core::result::Result<Option<Vec<usize>>, OutOfBudget> {
    let t = d.len();
    if t == mm {
        return Ok(Some(sets.iter().map(|s| s.first().expect("nonempty")).collect()));
    }
    for p in 0..mat.n_pars() {
        budget.tick()?;
        let col = mat.col(p);
        let mut next: Vec<Bits> = Vec::with_capacity(t + 1);
        let mut ok = true;
        for s in sets {
            let ns = s.and(col);
            if ns.none() {
                ok = false;
                break;
            }
            next.push(ns);
        }
        if !ok {
            continue;
        }
        let new_set = rest.and(col);
        if new_set.none() {
            continue;
        }
        next.push(new_set);
        let new_rest = rest.and_not(col);
        if t + 1 < mm && new_rest.none() {
            continue;
        }
        d.push(p);
        if let Some(x) = weak_dfs(mat, mm, &next, &new_rest, d, budget)? {
            return Ok(Some(x));
        }
        d.pop();
    }
    Ok(None)
}

/// First cover violation with `d ≤ n ≤ n_max`, smallest `n` first, then
/// lexicographic over increasing parameter sets drawn from `pool` (all
/// parameter tuples when `None`).
pub fn find_cover_violation(
    m: &Structure,
    phi: &PartitionedFormula,
    d: usize,
    n_max: usize,
    pool: Option<&[Tuple]>,
    budget: &mut Budget,
) -> Result<Search<CoverViolation>> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if n_max < d {
        return Err(Error::InvalidArgument("n_max must be at least d".into()));
    }
    let mat = PhiMatrix::new(m, phi)?;
    let pool_idx: Vec<usize> = match pool {
        None => (0..mat.n_pars()).collect(),
        Some(p) => {
            let mut v = p.iter().map(|t| mat.par_index(t)).collect::<Result<Vec<_>>>()?;
            v.sort_unstable();
            v.dedup();
            v
        }
    };
    Ok(cover_in(&mat, d, n_max, &pool_idx, budget).map(|b| CoverViolation { d, b: b.iter().map(|&p| mat.par_tuple(p)).collect() }))
}

/// Cover violation search on a truth table over a sorted parameter pool.
pub fn cover_in(mat: &PhiMatrix, d: usize, n_max: usize, pool: &[usize], budget: &mut Budget) -> Search<Vec<usize>> {
    for n in d..=n_max.min(pool.len()) {
        let mut chosen = Vec::new();
        match cover_dfs(mat, d, n, pool, 0, &mut chosen, &Bits::full(mat.n_objs()), budget) {
            Ok(true) => return Search::Found(chosen.iter().map(|&i| pool[i]).collect()),
            Ok(false) => {}
            Err(OutOfBudget) => return Search::OutOfBudget,
        }
    }
    Search::Exhausted
}

#[allow(clippy::too_many_arguments)]
fn cover_dfs(
    mat: &PhiMatrix,
    d: usize,
    n: usize,
    pool: &[usize],
    from: usize,
    chosen: &mut Vec<usize>,
    common: &Bits,
    budget: &mut Budget,
) -> core::result::Result<bool, OutOfBudget> {
    if chosen.len() == n {
        return Ok(common.none());
    }
    let remaining = n - chosen.len();
    for i in from..pool.len() {
        if pool.len() - i < remaining {
            break;
        }
        budget.tick()?;
        if !small_subsets_realizable(mat, d, pool, chosen, i) {
            continue;
        }
        let next = common.and(mat.col(pool[i]));
        chosen.push(i);
        if cover_dfs(mat, d, n, pool, i + 1, chosen, &next, budget)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// Every subset of `chosen ∪ {new}` containing `new` with fewer than `d`
/// members has a common realizer.
fn small_subsets_realizable(mat: &PhiMatrix, d: usize, pool: &[usize], chosen: &[usize], new: usize) -> bool {
    if d <= 1 {
        return true;
    }
    let base = mat.col(pool[new]);
    if base.none() {
        return false;
    }
    for extra in 1..=(d - 2).min(chosen.len()) {
        let mut ok = true;
        crate::tuples::for_each_combination(chosen.len(), extra, |c| {
            let mut s = base.clone();
            for &j in c {
                s.and_assign(mat.col(pool[chosen[j]]));
            }
            ok = !s.none();
            ok
        });
        if !ok {
            return false;
        }
    }
    true
}

/// `(formula, b, c)` with equal `Δ1`-types of `b` and `c` over `B` and
/// `φ(x; b), ¬φ(x; c) ∈ p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitWitness {
    pub formula: usize,
    pub b: Tuple,
    pub c: Tuple,
}

/// Whether `p` `(Δ0, Δ1)`-splits over `B`. `delta0` lists formula indices of
/// `p`; the parameter tuples of `p` serve as objects of `delta1`, whose
/// parameters range over `b_set`.
pub fn splits(p: &PhiType, b_set: &[Tuple], delta0: &[usize], delta1: &[PartitionedFormula], m: &Structure) -> Result<Option<SplitWitness>> {
    let mut cache: BTreeMap<Tuple, PhiType> = BTreeMap::new();
    let mut type_of = |t: &Tuple| -> Result<PhiType> {
        if let Some(ty) = cache.get(t) {
            return Ok(ty.clone());
        }
        let ty = tp(delta1, t, b_set, m)?;
        cache.insert(t.clone(), ty.clone());
        Ok(ty)
    };
    for &f in delta0 {
        let pos: Vec<&Tuple> = p.entries().iter().filter(|e| e.formula == f && e.positive).map(|e| &e.params).collect();
        let neg: Vec<&Tuple> = p.entries().iter().filter(|e| e.formula == f && !e.positive).map(|e| &e.params).collect();
        for b in &pos {
            let tb = type_of(b)?;
            for c in &neg {
                if type_of(c)? == tb {
                    return Ok(Some(SplitWitness { formula: f, b: (*b).clone(), c: (*c).clone() }));
                }
            }
        }
    }
    Ok(None)
}

/// `ρ(x̄0 x̄1 x̄2; ȳ0 ȳ1 ȳ2) := φ(x̄0; ȳ1) ↔ φ(x̄0; ȳ2)`. Blocks `x̄1`, `x̄2`
/// (length `s`) and `ȳ0` (length `r`) are dummies so that both sides have
/// length `r + 2s` and `d = c⌢a⌢b` fits either side.
pub fn build_rho(phi: &PartitionedFormula) -> PartitionedFormula {
    let (r, s) = (phi.r() as u32, phi.s() as u32);
    let len = r + 2 * s;
    let rename = |off: u32| {
        let mut map = BTreeMap::new();
        for (i, v) in phi.object_vars.iter().enumerate() {
            map.insert(*v, Var::X(i as u32));
        }
        for (j, v) in phi.param_vars.iter().enumerate() {
            map.insert(*v, Var::Y(off + j as u32));
        }
        phi.body.rename_free(&map)
    };
    let body = Formula::iff(rename(r), rename(r + s));
    PartitionedFormula {
        name: format!("rho_{}", phi.name),
        object_vars: (0..len).map(Var::X).collect(),
        param_vars: (0..len).map(Var::Y).collect(),
        body,
    }
}

/// Which hypothesis of the chain construction failed, and where.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lemma1Failure {
    /// The chain does not have `2n + 1` increasing members.
    BadChain(String),
    /// The type is not a complete type over `A_{2n}` realized in `M`.
    BadType(String),
    /// A type over `B ⊆ A_i` is not realized in `A_{i+1}`.
    NotRealized { i: usize, b: Vec<Elem> },
    /// `p | A_{i+1}` does not split over `B ⊆ A_i`.
    NoSplit { i: usize, b: Vec<Elem> },
    /// The construction produced a sequence that is not an order witness.
    Verification,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma1Construction {
    pub rho: PartitionedFormula,
    pub witness: OrderWitness,
    pub a: Vec<Tuple>,
    pub b: Vec<Tuple>,
    pub c: Vec<Tuple>,
    /// Realization of `p`.
    pub d: Tuple,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lemma1Outcome {
    Constructed(Lemma1Construction),
    Failed(Lemma1Failure),
}

fn sub_tuples(elems: &BTreeSet<Elem>, arity: usize) -> Vec<Tuple> {
    tuples_over(&elems.iter().copied().collect::<Vec<_>>(), arity)
}

/// Builds an order witness for `ρ` from a chain `A_0 ⊆ ... ⊆ A_{2n}` and a
/// `φ`-type `p` over `A_{2n}` (formula index 0, parameters `A_{2n}^s`), after
/// checking both hypotheses over every subset of size at most `3sn`.
pub fn lemma1_order_witness(m: &Structure, phi: &PartitionedFormula, chain: &[Vec<Elem>], p: &PhiType, n: usize, budget: &mut Budget) -> Result<Lemma1Outcome> {
    use Lemma1Failure::*;
    let (r, s) = (phi.r(), phi.s());
    if n == 0 || chain.len() != 2 * n + 1 {
        return Ok(Lemma1Outcome::Failed(BadChain(format!("need {} sets, got {}", 2 * n + 1, chain.len()))));
    }
    let sets: Vec<BTreeSet<Elem>> = chain.iter().map(|a| a.iter().copied().collect()).collect();
    for (i, w) in sets.windows(2).enumerate() {
        if !w[0].is_subset(&w[1]) {
            return Ok(Lemma1Outcome::Failed(BadChain(format!("A_{i} is not contained in A_{}", i + 1))));
        }
    }
    for &e in sets.last().expect("nonempty") {
        if e as usize >= m.size() {
            return Err(Error::ElementOutOfRange { elem: e as u64, size: m.size() });
        }
    }
    let mat = PhiMatrix::new(m, phi)?;
    let top = &sets[2 * n];
    let top_params = sub_tuples(top, s);
    for t in &top_params {
        if p.sign_of(0, t).is_none() {
            return Ok(Lemma1Outcome::Failed(BadType(format!("no unique sign for parameter {t:?}"))));
        }
    }
    let top_idx: Vec<usize> = top_params.iter().map(|t| mat.par_index(t)).collect::<Result<_>>()?;
    let want: Bits = {
        let mut b = Bits::new(top_idx.len());
        for (j, t) in top_params.iter().enumerate() {
            b.set(j, p.sign_of(0, t) == Some(true));
        }
        b
    };
    let d_idx = match (0..mat.n_objs()).find(|&o| mat.row(o).project(&top_idx) == want) {
        Some(o) => o,
        None => return Ok(Lemma1Outcome::Failed(BadType("type is not realized".into()))),
    };
    let bound = 3 * s * n;
    for i in 0..2 * n {
        let elems: Vec<Elem> = sets[i].iter().copied().collect();
        let next = &sets[i + 1];
        let next_objs: Vec<usize> = sub_tuples(next, r).iter().map(|t| mat.objs().index(t)).collect();
        let next_pars = sub_tuples(next, s);
        let p_next: BTreeMap<usize, bool> = next_pars.iter().map(|t| (mat.pars().index(t), p.sign_of(0, t) == Some(true))).collect();
        for size in 0..=bound.min(elems.len()) {
            for sub in combinations(elems.len(), size) {
                budget.tick().map_err(|_| Error::BudgetExhausted)?;
                let bset: BTreeSet<Elem> = sub.iter().map(|&j| elems[j]).collect();
                let bpars: Vec<usize> = sub_tuples(&bset, s).iter().map(|t| mat.pars().index(t)).collect();
                let all: BTreeSet<Bits> = (0..mat.n_objs()).map(|o| mat.row(o).project(&bpars)).collect();
                let inside: BTreeSet<Bits> = next_objs.iter().map(|&o| mat.row(o).project(&bpars)).collect();
                if all != inside {
                    return Ok(Lemma1Outcome::Failed(NotRealized { i, b: bset.into_iter().collect() }));
                }
                // ψ-types of parameters over B^r are columns restricted to B^r objects
                let bobjs: Vec<usize> = sub_tuples(&bset, r).iter().map(|t| mat.objs().index(t)).collect();
                let split = p_next.iter().filter(|(_, &pos)| pos).any(|(&a, _)| {
                    let ta = mat.col(a).project(&bobjs);
                    p_next.iter().any(|(&b, &pos)| !pos && mat.col(b).project(&bobjs) == ta)
                });
                if !split {
                    return Ok(Lemma1Outcome::Failed(NoSplit { i, b: bset.into_iter().collect() }));
                }
            }
        }
    }
    let (mut av, mut bv, mut cv) = (Vec::new(), Vec::new(), Vec::new());
    let mut bj: BTreeSet<Elem> = BTreeSet::new();
    for j in 0..n {
        let pool = sub_tuples(&sets[2 * j + 1], s);
        let bobjs: Vec<usize> = sub_tuples(&bj, r).iter().map(|t| mat.objs().index(t)).collect();
        let mut pick = None;
        'outer: for a in &pool {
            let ai = mat.pars().index(a);
            if !mat.get(d_idx, ai) {
                continue;
            }
            for b in &pool {
                let bi = mat.pars().index(b);
                if !mat.get(d_idx, bi) && mat.col(ai).project(&bobjs) == mat.col(bi).project(&bobjs) {
                    pick = Some((a.clone(), b.clone()));
                    break 'outer;
                }
            }
        }
        let Some((a, b)) = pick else {
            return Ok(Lemma1Outcome::Failed(NoSplit { i: 2 * j, b: bj.into_iter().collect() }));
        };
        let mut over = bj.clone();
        over.extend(a.iter().chain(&b).copied());
        let opars: Vec<usize> = sub_tuples(&over, s).iter().map(|t| mat.pars().index(t)).collect();
        let target = mat.row(d_idx).project(&opars);
        let c = sub_tuples(&sets[2 * j + 2], r).into_iter().find(|c| mat.row(mat.objs().index(c)).project(&opars) == target);
        let Some(c) = c else {
            return Ok(Lemma1Outcome::Failed(NotRealized { i: 2 * j + 1, b: over.into_iter().collect() }));
        };
        bj.extend(c.iter().copied());
        bj.extend(a.iter().chain(&b).copied());
        av.push(a);
        bv.push(b);
        cv.push(c);
    }
    let rho = build_rho(phi);
    let seq: Vec<Tuple> = (0..n).map(|i| cv[i].iter().chain(&av[i]).chain(&bv[i]).copied().collect()).collect();
    let witness = OrderWitness { a: seq };
    if !witness.verify(m, &rho)? {
        return Ok(Lemma1Outcome::Failed(Verification));
    }
    Ok(Lemma1Outcome::Constructed(Lemma1Construction { rho, witness, a: av, b: bv, c: cv, d: mat.obj_tuple(d_idx) }))
}

/// `x → (y)^a_b`: every `b`-colouring of the `a`-subsets of an `x`-set has a
/// monochromatic `y`-subset. Decided by backtracking over all colourings.
pub fn arrow_check(x: usize, y: usize, a: usize, b: usize) -> Result<bool> {
    if b == 0 {
        return Err(Error::InvalidArgument("need at least one colour".into()));
    }
    if y > x {
        return Ok(false);
    }
    if y < a {
        return Ok(true);
    }
    let na = binomial_u128(x as u64, a as u64).ok_or_else(|| Error::TooLarge("subset count".into()))?;
    let log_b = usize::BITS - (b - 1).leading_zeros();
    if na.saturating_mul(log_b as u128) > 24 && b > 1 {
        return Err(Error::TooLarge(format!("{b}^C({x},{a}) colourings exceed 2^24")));
    }
    let asubs = combinations(x, a);
    let index: BTreeMap<Vec<usize>, usize> = asubs.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    // y-subsets grouped by the largest index among their a-subsets
    let mut closing: Vec<Vec<Vec<usize>>> = vec![Vec::new(); asubs.len()];
    for ys in combinations(x, y) {
        let ids: Vec<usize> = combinations(y, a).iter().map(|c| index[&c.iter().map(|&i| ys[i]).collect::<Vec<_>>()]).collect();
        let last = *ids.iter().max().expect("y >= a");
        closing[last].push(ids);
    }
    let mut colour = vec![0usize; asubs.len()];
    Ok(!colouring_exists(0, b, &closing, &mut colour))
}

/// Whether the colouring can be completed without a monochromatic y-subset.
fn colouring_exists(i: usize, b: usize, closing: &[Vec<Vec<usize>>], colour: &mut [usize]) -> bool {
    if i == colour.len() {
        return true;
    }
    for c in 0..b {
        colour[i] = c;
        let mono = closing[i].iter().any(|ids| ids.iter().all(|&j| colour[j] == c));
        if !mono && colouring_exists(i + 1, b, closing, colour) {
            return true;
        }
    }
    false
}

/// π rounded up at 30 significant digits.
const PI_UP: &str = "314159265358979323846264338328";

/// The Stirling-type threshold `n ≥ 2^{2m-1} / (π m)`, decided in rational
/// arithmetic with π rounded up.
pub fn stirling_threshold(n: u64, m: u64) -> bool {
    if m == 0 {
        return true;
    }
    let pi = BigRational::new(PI_UP.parse::<num_bigint::BigInt>().expect("digits"), num_bigint::BigInt::from(10u32).pow(29));
    let lhs = pi * BigRational::from_integer((n as u128 * m as u128).into());
    let rhs = BigRational::from_integer(num_bigint::BigInt::from(BigUint::from(1u32) << (2 * m - 1) as usize));
    lhs >= rhs
}
