//! Brute-force oracles. They evaluate formulas tuple by tuple and share no
//! search code with the library.

#![allow(dead_code)]

use std::collections::BTreeSet;

use fmlab_core::logic::Evaluator;
use fmlab_core::{Elem, PartitionedFormula, Signature, Structure, Tuple};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn coin(rng: &mut ChaCha8Rng) -> bool {
    rng.next_u32() & 1 == 1
}

pub fn all_tuples(n: usize, arity: usize) -> Vec<Tuple> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out.into_iter().flat_map(|t| (0..n as Elem).map(move |e| [t.clone(), vec![e]].concat())).collect();
    }
    out
}

pub fn holds(m: &Structure, phi: &PartitionedFormula, a: &[Elem], b: &[Elem]) -> bool {
    Evaluator::new(m, phi).unwrap().holds(a, b)
}

/// Undirected simple graph on `n` vertices from the bits of `mask` over
/// the pairs `i < j` in lexicographic order.
pub fn graph(n: usize, mask: u64) -> Structure {
    let mut e = Vec::new();
    let mut bit = 0;
    for i in 0..n as Elem {
        for j in i + 1..n as Elem {
            if mask >> bit & 1 == 1 {
                e.push((i, j));
            }
            bit += 1;
        }
    }
    Structure::graph(n, &e).unwrap()
}

pub fn pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Binary relation `R` on `n` elements from the bits of `mask` over all
/// ordered pairs (loops included) when `loops`, else over pairs `i != j`.
pub fn digraph(n: usize, mask: u64, loops: bool) -> Structure {
    let mut st = Structure::new(Signature::new([("R", 2)]).unwrap(), n);
    let mut bit = 0;
    for i in 0..n as Elem {
        for j in 0..n as Elem {
            if i == j && !loops {
                continue;
            }
            if mask >> bit & 1 == 1 {
                st.insert("R", &[i, j]).unwrap();
            }
            bit += 1;
        }
    }
    st
}

pub fn random_graph(n: usize, rng: &mut ChaCha8Rng) -> Structure {
    let mut e = Vec::new();
    for i in 0..n as Elem {
        for j in i + 1..n as Elem {
            if coin(rng) {
                e.push((i, j));
            }
        }
    }
    Structure::graph(n, &e).unwrap()
}

pub fn random_digraph(n: usize, loops: bool, rng: &mut ChaCha8Rng) -> Structure {
    let mut st = Structure::new(Signature::new([("R", 2)]).unwrap(), n);
    for i in 0..n as Elem {
        for j in 0..n as Elem {
            if (i != j || loops) && coin(rng) {
                st.insert("R", &[i, j]).unwrap();
            }
        }
    }
    st
}

/// Is there a `k`-independence witness? Tries every `k`-set of objects
/// and every subset pattern.
pub fn has_independence(m: &Structure, phi: &PartitionedFormula, k: usize) -> bool {
    let ev = Evaluator::new(m, phi).unwrap();
    let objs = all_tuples(m.size(), phi.r());
    let pars = all_tuples(m.size(), phi.s());
    let rows: Vec<Vec<bool>> = objs.iter().map(|a| pars.iter().map(|b| ev.holds(a, b)).collect()).collect();
    subsets(objs.len(), k).into_iter().any(|sel| {
        let patterns: BTreeSet<Vec<bool>> = (0..pars.len()).map(|p| sel.iter().map(|&o| rows[o][p]).collect()).collect();
        patterns.len() == 1 << k
    })
}

/// Is there an `n`-order witness (`φ[a_i; a_j] ⟺ i < j`, diagonal included)?
pub fn has_order(m: &Structure, phi: &PartitionedFormula, n: usize) -> bool {
    assert_eq!(phi.r(), phi.s());
    let ev = Evaluator::new(m, phi).unwrap();
    let objs = all_tuples(m.size(), phi.r());
    fn go(ev: &Evaluator, objs: &[Tuple], chosen: &mut Vec<usize>, n: usize) -> bool {
        if chosen.len() == n {
            return true;
        }
        for o in 0..objs.len() {
            let ok = !ev.holds(&objs[o], &objs[o])
                && chosen.iter().all(|&p| ev.holds(&objs[p], &objs[o]) && !ev.holds(&objs[o], &objs[p]));
            if ok {
                chosen.push(o);
                if go(ev, objs, chosen, n) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    go(&ev, &objs, &mut Vec::new(), n)
}

/// `|S_φ(params)|`: distinct truth patterns of objects over `params`.
pub fn type_count(m: &Structure, phi: &PartitionedFormula, params: &[Tuple]) -> usize {
    let ev = Evaluator::new(m, phi).unwrap();
    all_tuples(m.size(), phi.r())
        .iter()
        .map(|a| params.iter().map(|b| ev.holds(a, b)).collect::<Vec<_>>())
        .collect::<BTreeSet<_>>()
        .len()
}

/// Increasing `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// All injective selections of `k` positions out of `0..n`, in any order.
pub fn arrangements(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for v in &out {
            for i in (0..n).filter(|i| !v.contains(i)) {
                next.push([v.clone(), vec![i]].concat());
            }
        }
        out = next;
    }
    out
}

/// Truth pattern of the concatenation of the selected tuples over `A^s`.
pub fn selection_type(m: &Structure, phi: &PartitionedFormula, seq: &[Tuple], sel: &[usize], a: &[Elem]) -> Vec<bool> {
    let ev = Evaluator::new(m, phi).unwrap();
    let obj: Tuple = sel.iter().flat_map(|&i| seq[i].iter().copied()).collect();
    let mut params = vec![Vec::new()];
    for _ in 0..phi.s() {
        params = params.into_iter().flat_map(|t: Tuple| a.iter().map(move |&e| [t.clone(), vec![e]].concat())).collect();
    }
    params.iter().map(|b| ev.holds(&obj, b)).collect()
}

pub fn is_indiscernible_seq(m: &Structure, phi: &PartitionedFormula, seq: &[Tuple], k: usize, a: &[Elem]) -> bool {
    let sels = subsets(seq.len(), k);
    sels.iter().map(|s| selection_type(m, phi, seq, s, a)).collect::<BTreeSet<_>>().len() <= 1
}

pub fn is_indiscernible_set(m: &Structure, phi: &PartitionedFormula, seq: &[Tuple], k: usize, a: &[Elem]) -> bool {
    let sels = arrangements(seq.len(), k);
    sels.iter().map(|s| selection_type(m, phi, seq, s, a)).collect::<BTreeSet<_>>().len() <= 1
}

/// Is there a parameter family of size `d..=n_max` whose fewer-than-`d`
/// subfamilies are realized while the whole is not?
pub fn has_cover_violation(m: &Structure, phi: &PartitionedFormula, d: usize, n_max: usize) -> bool {
    let ev = Evaluator::new(m, phi).unwrap();
    let objs = all_tuples(m.size(), phi.r());
    let pars = all_tuples(m.size(), phi.s());
    let realized = |fam: &[usize]| objs.iter().any(|x| fam.iter().all(|&p| ev.holds(x, &pars[p])));
    (d..=n_max.min(pars.len())).any(|n| {
        subsets(pars.len(), n).into_iter().any(|fam| {
            !realized(&fam) && (0..d).all(|sz| subsets(n, sz).iter().all(|sub| realized(&sub.iter().map(|&i| fam[i]).collect::<Vec<_>>())))
        })
    })
}

/// `({θ}*_n, n)`-indiscernibility of a sequence of `θ`-parameters over `∅`,
/// by evaluating every formula of `{θ}*_n` on every increasing selection.
pub fn star_indiscernible(m: &Structure, theta: &PartitionedFormula, seq: &[Tuple], n: usize) -> bool {
    let star = fmlab_core::classify::delta_star(std::slice::from_ref(theta), n).unwrap();
    let s = theta.s();
    let profile = |sel: &[usize]| -> Vec<bool> {
        let mut out = Vec::new();
        for f in &star.top {
            let k = f.free_vars().len() / s.max(1);
            for sub in subsets(n, k) {
                let mut asg = std::collections::BTreeMap::new();
                for (i, &p) in sub.iter().enumerate() {
                    for (j, &e) in seq[sel[p]].iter().enumerate() {
                        asg.insert(fmlab_core::Var::Y((i * s + j) as u32), e);
                    }
                }
                out.push(fmlab_core::logic::evaluate_formula(m, f, &asg).unwrap());
            }
        }
        out
    };
    subsets(seq.len(), n).iter().map(|sel| profile(sel)).collect::<BTreeSet<_>>().len() <= 1
}

/// Smallest mask among the relabellings of the graph with pair mask `mask`.
pub fn canonical_graph(n: usize, mask: u64) -> u64 {
    let idx = |i: usize, j: usize| {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        (0..a).map(|r| n - 1 - r).sum::<usize>() + (b - a - 1)
    };
    let mut best = u64::MAX;
    for perm in arrangements(n, n) {
        let mut m2 = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                if mask >> idx(i, j) & 1 == 1 {
                    m2 |= 1 << idx(perm[i], perm[j]);
                }
            }
        }
        best = best.min(m2);
    }
    best
}

/// Masks of one graph per isomorphism class on `n` vertices.
pub fn graph_classes(n: usize) -> Vec<u64> {
    (0..(1u64 << pairs(n))).filter(|&m| canonical_graph(n, m) == m).collect()
}

/// Equivalence relation (`same`) or its complement on random classes, without loops.
pub fn partition_graph(n: usize, classes: u32, same: bool, rng: &mut ChaCha8Rng) -> Structure {
    let cls: Vec<u32> = (0..n).map(|_| rng.next_u32() % classes).collect();
    let mut m = Structure::new(Signature::new([("R", 2)]).unwrap(), n);
    for i in 0..n {
        for j in 0..n {
            if i != j && (cls[i] == cls[j]) == same {
                m.insert("R", &[i as Elem, j as Elem]).unwrap();
            }
        }
    }
    m
}

/// A seeded structure and formula from a mix of families: linear orders,
/// partitions and their complements, random graphs and digraphs.
pub fn seeded_structure(seed: u64, min: usize, spread: u32) -> (Structure, PartitionedFormula, ChaCha8Rng) {
    let mut r = rng(seed);
    let n = min + (r.next_u32() % spread) as usize;
    let edge = PartitionedFormula::binary("phi", "R");
    let (m, phi) = match seed % 5 {
        0 => {
            let lt = PartitionedFormula::binary("lt", "Lt");
            let lt = if coin(&mut r) { lt.swap_blocks() } else { lt };
            (Structure::linear_order(n), lt)
        }
        1 => {
            let c = 1 + r.next_u32() % 3;
            (partition_graph(n, c, true, &mut r), edge)
        }
        2 => (random_graph(n, &mut r), edge),
        3 => {
            let loops = coin(&mut r);
            (random_digraph(n, loops, &mut r), edge)
        }
        _ => {
            let c = 2 + r.next_u32() % 3;
            (partition_graph(n, c, false, &mut r), edge)
        }
    };
    (m, phi, r)
}

/// A sequence of length `len` all of whose prefixes pass `ok`, found by
/// backtracking over a shuffled universe; members repeat when `repeat`.
pub fn find_sequence(m: &Structure, len: usize, repeat: bool, r: &mut ChaCha8Rng, ok: &dyn Fn(&[Elem]) -> bool) -> Option<Vec<Elem>> {
    let mut order = m.elements();
    for i in (1..order.len()).rev() {
        let j = r.next_u32() as usize % (i + 1);
        order.swap(i, j);
    }
    fn rec(order: &[Elem], len: usize, repeat: bool, cur: &mut Vec<Elem>, ok: &dyn Fn(&[Elem]) -> bool, steps: &mut usize) -> bool {
        if cur.len() == len {
            return true;
        }
        for &e in order {
            if !repeat && cur.contains(&e) {
                continue;
            }
            *steps += 1;
            if *steps > 20_000 {
                return false;
            }
            cur.push(e);
            if ok(cur) && rec(order, len, repeat, cur, ok, steps) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::new();
    rec(&order, len, repeat, &mut cur, ok, &mut 0).then_some(cur)
}

/// Random superset of `base` inside `all`.
pub fn random_superset(r: &mut ChaCha8Rng, all: &[Elem], base: &[Elem]) -> Vec<Elem> {
    all.iter().copied().filter(|e| base.contains(e) || coin(r)).collect()
}

/// A good structure with indiscernible sequences `I_0` of objects and `I_1`
/// of parameters longer than the exchange threshold, for `n = 2`.
pub fn exchange_config(seed: u64) -> Option<(Structure, fmlab_core::classify::GoodnessContext, fmlab_core::TupleSequence, fmlab_core::TupleSequence)> {
    use fmlab_core::classify::{check_object_sequence, check_param_sequence, is_good, GoodOptions, Goodness};
    use fmlab_core::TupleSequence;
    let (m, phi, mut r) = seeded_structure(seed, 5, 5);
    let d = 2 + (r.next_u32() % 2) as usize;
    let Ok(Goodness::Good(g)) = is_good(&m, &phi, 2, d, &GoodOptions::default()) else { return None };
    let len = g.lambda_phi.max(g.kappa_phi + g.kappa_psi + g.kappa_phi * g.kappa_psi) + 1;
    let repeat = len > m.size() || r.next_u32() % 3 == 0;
    let ts = |s: &[Elem]| TupleSequence::of_elements(s);
    let i0 = find_sequence(&m, len, repeat, &mut r, &|s| check_object_sequence(&m, &phi, &ts(s), 2).unwrap().is_none())?;
    let i1 = find_sequence(&m, len, repeat, &mut r, &|s| check_param_sequence(&m, &phi, &ts(s), 2).unwrap().is_none())?;
    Some((m, g, ts(&i0), ts(&i1)))
}

/// Random `M_0 ⊆ M_1, M_2` inside a seeded structure. `A` is a random set
/// of at most one element, or `M_0` itself when `a_is_m0`.
pub fn amalgam_config(seed: u64, a_is_m0: bool) -> fmlab_core::classify::AmalgamConfig {
    let (m, phi, mut r) = seeded_structure(seed, 4, 4);
    let all = m.elements();
    let a: Vec<Elem> = all.iter().copied().filter(|_| r.next_u32() % 4 == 0).take(1).collect();
    let m0 = random_superset(&mut r, &all, &a);
    let m1 = random_superset(&mut r, &all, &m0);
    let m2 = random_superset(&mut r, &all, &m0);
    let d = 2 + (r.next_u32() % 2) as usize;
    let a_set = if a_is_m0 { m0.clone() } else { a };
    fmlab_core::classify::AmalgamConfig { ambient: m, m0, m1, m2, phi, a_set, k: 2, n: 2, d, delta: false, options: Default::default() }
}

/// `≺_K` over the good induced substructures of `m` that contain `a`, as a
/// matrix, with the substructures.
pub fn prec_matrix(m: &Structure, a: &[Elem], n: usize, d: usize, delta: bool) -> (Vec<Vec<Elem>>, Vec<Vec<bool>>) {
    use fmlab_core::classify::{is_good, prec_k_trusted, ClassContext, GoodOptions, Goodness};
    let phi = PartitionedFormula::binary("phi", "R");
    let opts = GoodOptions::default();
    let size = m.size();
    let subs: Vec<Vec<Elem>> = (1u32..(1 << size))
        .map(|s| (0..size as Elem).filter(|i| s >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|v: &Vec<Elem>| a.iter().all(|x| v.contains(x)))
        .filter(|v| matches!(is_good(&m.induced(v).unwrap(), &phi, n, d, &opts).unwrap(), Goodness::Good(_)))
        .collect();
    if subs.is_empty() {
        return (subs, Vec::new());
    }
    let members: Vec<(&str, &[Elem])> = subs.iter().map(|v| ("S", v.as_slice())).collect();
    let ctx = ClassContext::for_class(m, &members, &phi, a, 2, n, d, delta, &opts).unwrap();
    let rel = subs.iter().map(|x| subs.iter().map(|y| prec_k_trusted(m, x, y, &ctx).unwrap().holds).collect()).collect();
    (subs, rel)
}

/// First violation of reflexivity, (I), transitivity or (V) in a `≺_K` matrix.
pub fn prec_axiom_violation(subs: &[Vec<Elem>], rel: &[Vec<bool>]) -> Option<String> {
    let sub = |i: usize, j: usize| subs[i].iter().all(|x| subs[j].contains(x));
    let k = subs.len();
    for i in 0..k {
        if !rel[i][i] {
            return Some(format!("reflexivity at {:?}", subs[i]));
        }
        for j in 0..k {
            if rel[i][j] && !sub(i, j) {
                return Some(format!("(I) at {:?} {:?}", subs[i], subs[j]));
            }
            for l in 0..k {
                if rel[i][j] && rel[j][l] && !rel[i][l] {
                    return Some(format!("transitivity at {:?} {:?} {:?}", subs[i], subs[j], subs[l]));
                }
                if sub(i, j) && rel[j][l] && rel[i][l] && !rel[i][j] {
                    return Some(format!("(V) at {:?} {:?} {:?}", subs[i], subs[j], subs[l]));
                }
            }
        }
    }
    None
}
