//! Random graphs, the coupon-collector probabilities behind them, and
//! Ramsey extraction for hypergraphs.
//!
//! # Random model
//!
//! `G(n, p)` is sampled from a ChaCha8 stream. Trial `t` of an experiment
//! with seed `s` uses the stream seeded by `splitmix64(s ^ t)` (as a
//! little-endian 32-byte key: the 64-bit value repeated four times). Pairs
//! `i < j` are visited in lexicographic order and `{i, j}` is an edge when
//! the next `u64` is below `p · 2^64`; for `p = 1/2` that is "top bit clear".

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bits::Bits;
use crate::budget::{Budget, Search, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::indiscernible::{end_indiscernible_positions, f_star, BoundParams, GrowthFn};
use crate::logic::{Elem, Formula, PartitionedFormula, Signature, Structure, Tuple, Var};
use crate::tuples::{binomial_u128, for_each_combination};

/// `q(n, m)`: probability that `n` balls thrown into `m` boxes leave no box
/// empty, by inclusion–exclusion. `q(0, 0) = 1` and `q(n, 0) = 0` for
/// `n > 0`.
pub fn coupon_q(n: u64, m: u64) -> BigRational {
    if m == 0 {
        return if n == 0 { BigRational::one() } else { BigRational::zero() };
    }
    let mut num = BigInt::zero();
    let mut binom = BigInt::one();
    for i in 0..=m {
        let term = &binom * BigInt::from(m - i).pow(n as u32);
        if i % 2 == 0 {
            num += term;
        } else {
            num -= term;
        }
        binom = binom * BigInt::from(m - i) / BigInt::from(i + 1);
    }
    BigRational::new(num, BigInt::from(m).pow(n as u32))
}

/// `q(n, m) = m! S(n, m) / m^n`.
pub fn coupon_q_stirling(n: u64, m: u64) -> BigRational {
    if m == 0 {
        return if n == 0 { BigRational::one() } else { BigRational::zero() };
    }
    let fact: BigUint = (1..=m).map(BigUint::from).product();
    let num = BigInt::from(fact * stirling2(n, m));
    BigRational::new(num, BigInt::from(m).pow(n as u32))
}

/// Stirling number of the second kind `S(n, k)`, by
/// `S(n, k) = k S(n-1, k) + S(n-1, k-1)`.
pub fn stirling2(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k as usize;
    let mut row = vec![BigUint::zero(); k + 1];
    row[0] = BigUint::one();
    for i in 1..=n as usize {
        for j in (1..=k.min(i)).rev() {
            row[j] = &row[j] * BigUint::from(j) + &row[j - 1];
        }
        row[0] = BigUint::zero();
    }
    row[k].clone()
}

/// `λ(n, k) = 2^k exp(-(n-k)/2^k)`.
pub fn lambda_nk(n: u64, k: u64) -> f64 {
    let m = libm::exp2(k as f64);
    m * libm::exp(-((n as f64) - (k as f64)) / m)
}

/// `n = k + ⌈2^k ln k⌉`.
pub fn thmg1_n(k: u64) -> u64 {
    k + libm::ceil(libm::exp2(k as f64) * libm::log(k as f64)) as u64
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let s = splitmix64(seed ^ trial).to_le_bytes();
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&s);
    }
    ChaCha8Rng::from_seed(key)
}

/// Edge threshold for probability `p`, in units of `2^-64`.
fn threshold(p: f64) -> Result<u128> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("edge probability {p} outside [0, 1]")));
    }
    Ok((p * 18_446_744_073_709_551_616.0) as u128)
}

/// Adjacency rows of a `G(n, p)` sample.
pub fn sample_graph(n: usize, p: f64, rng: &mut impl RngCore) -> Result<Vec<Bits>> {
    let t = threshold(p)?;
    let mut adj = vec![Bits::new(n); n];
    for i in 0..n {
        for j in i + 1..n {
            if (rng.next_u64() as u128) < t {
                adj[i].set(j, true);
                adj[j].set(i, true);
            }
        }
    }
    Ok(adj)
}

pub fn adjacency_structure(adj: &[Bits]) -> Structure {
    let mut edges = Vec::new();
    for (i, row) in adj.iter().enumerate() {
        for j in row.iter().filter(|&j| j > i) {
            edges.push((i as Elem, j as Elem));
        }
    }
    Structure::graph(adj.len(), &edges).expect("valid graph")
}

/// `k`-independence for `R(x; y)` in a loopless undirected graph. The
/// relation is symmetric, so adjacency rows serve as both the object rows
/// and the parameter columns of the truth table; otherwise the search is
/// the general one: increasing `a_0 < … < a_{k-1}`, parameter classes by
/// pattern, and a class-size bound. Returns the `a_i` and, for each mask
/// `w`, the least `b_w`.
pub fn graph_independence(adj: &[Bits], k: usize, budget: &mut Budget) -> Search<(Vec<usize>, Vec<usize>)> {
    if k == 0 || k > 63 {
        return Search::Exhausted;
    }
    let cands: Vec<usize> = (0..adj.len()).collect();
    let mut chosen = Vec::new();
    match graph_dfs(adj, k, &cands, &[Bits::full(adj.len())], &mut chosen, budget) {
        Ok(Some(b)) => Search::Found((chosen, b)),
        Ok(None) => Search::Exhausted,
        Err(()) => Search::OutOfBudget,
    }
}

fn graph_dfs(adj: &[Bits], k: usize, cands: &[usize], classes: &[Bits], chosen: &mut Vec<usize>, budget: &mut Budget) -> core::result::Result<Option<Vec<usize>>, ()> {
    let t = chosen.len();
    if t == k {
        return Ok(Some(classes.iter().map(|c| c.first().expect("nonempty")).collect()));
    }
    let need = 1usize << (k - t - 1);
    let filtered: Vec<usize> = cands
        .iter()
        .copied()
        .filter(|&o| classes.iter().all(|c| c.and_count(&adj[o]) >= need && c.and_not_count(&adj[o]) >= need))
        .collect();
    for (idx, &o) in filtered.iter().enumerate() {
        if filtered.len() - idx < k - t {
            break;
        }
        budget.tick().map_err(|_| ())?;
        let mut next = vec![Bits::new(0); classes.len() * 2];
        for (w, c) in classes.iter().enumerate() {
            next[w | (1 << t)] = c.and(&adj[o]);
            next[w] = c.and_not(&adj[o]);
        }
        chosen.push(o);
        if let Some(b) = graph_dfs(adj, k, &filtered[idx + 1..], &next, chosen, budget)? {
            return Ok(Some(b));
        }
        chosen.pop();
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    pub p: f64,
    /// Search budget per trial.
    pub budget: u64,
}

impl ExperimentConfig {
    pub fn new(n: usize, k: usize, trials: u64, seed: u64) -> Self {
        ExperimentConfig { n, k, trials, seed, p: 0.5, budget: DEFAULT_BUDGET }
    }

    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.k == 0 || self.n <= self.k {
            return Err(Error::InvalidArgument(format!("need n > k >= 1, got n = {}, k = {}", self.n, self.k)));
        }
        threshold(self.p).map(|_| ())
    }
}

/// Does trial `t` produce a graph with the `k`-independence property?
pub fn mc_trial(cfg: &ExperimentConfig, t: u64) -> Result<bool> {
    let mut rng = trial_rng(cfg.seed, t);
    let adj = sample_graph(cfg.n, cfg.p, &mut rng)?;
    let mut budget = Budget::new(cfg.budget);
    Ok(graph_independence(&adj, cfg.k, &mut budget).decided()?.is_some())
}

/// Monte Carlo estimate with the exact per-tuple value and union bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct McRecord {
    pub k: usize,
    pub n: usize,
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    pub stderr: f64,
    /// `q(n-k, 2^k)`.
    pub exact_per_tuple: BigRational,
    /// `C(n, k) e^{-λ}`.
    pub union_bound: f64,
    /// `n^k e^{-λ}`.
    pub union_bound_nk: f64,
}

/// Builds the record from a hit count.
pub fn mc_record(cfg: &ExperimentConfig, hits: u64) -> Result<McRecord> {
    cfg.check()?;
    let (n, k) = (cfg.n as u64, cfg.k as u64);
    let est = hits as f64 / cfg.trials as f64;
    let stderr = libm::sqrt(est * (1.0 - est) / cfg.trials as f64);
    let el = libm::exp(-lambda_nk(n, k));
    let binom = binomial_u128(n, k).map_or(f64::INFINITY, |b| b as f64);
    Ok(McRecord {
        k: cfg.k,
        n: cfg.n,
        trials: cfg.trials,
        hits,
        estimate: est,
        stderr,
        exact_per_tuple: coupon_q(n - k, 1 << k),
        union_bound: binom * el,
        union_bound_nk: libm::pow(n as f64, k as f64) * el,
    })
}

/// Sequential Monte Carlo run; trial outcomes do not depend on the order in
/// which trials are evaluated.
pub fn independence_probability_mc(cfg: &ExperimentConfig) -> Result<McRecord> {
    cfg.check()?;
    let mut hits = 0;
    for t in 0..cfg.trials {
        if mc_trial(cfg, t)? {
            hits += 1;
        }
    }
    mc_record(cfg, hits)
}

/// Exact probability that `G(n, 1/2)` has the `k`-independence property,
/// over all `2^{C(n,2)}` graphs.
pub fn exact_independence_probability(n: usize, k: usize) -> Result<BigRational> {
    let pairs = n * n.saturating_sub(1) / 2;
    if pairs > 24 {
        return Err(Error::TooLarge(format!("2^{pairs} graphs")));
    }
    let mut hits = 0u64;
    for mask in 0..1u64 << pairs {
        let adj = adjacency_of_mask(n, mask);
        if graph_independence(&adj, k, &mut Budget::unlimited()).is_found() {
            hits += 1;
        }
    }
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(1u64 << pairs)))
}

/// Graph whose pair `i` in lexicographic order is an edge iff bit `i` is set.
pub fn adjacency_of_mask(n: usize, mask: u64) -> Vec<Bits> {
    let mut adj = vec![Bits::new(n); n];
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> bit & 1 == 1 {
                adj[i].set(j, true);
                adj[j].set(i, true);
            }
            bit += 1;
        }
    }
    adj
}

/// Configuration of row `k` of the trend table: `n = k + ⌈2^k ln k⌉` and
/// seed `splitmix64(seed + k)`.
pub fn thmg1_config(k: usize, trials: u64, seed: u64) -> Result<ExperimentConfig> {
    if k < 2 {
        return Err(Error::InvalidArgument("k must be at least 2".into()));
    }
    let n = thmg1_n(k as u64);
    if n > 3000 {
        return Err(Error::TooLarge(format!("n = {n} for k = {k}")));
    }
    Ok(ExperimentConfig::new(n as usize, k, trials, splitmix64(seed.wrapping_add(k as u64))))
}

pub fn thmg1_trend(ks: &[usize], trials: u64, seed: u64) -> Result<Vec<McRecord>> {
    ks.iter().map(|&k| independence_probability_mc(&thmg1_config(k, trials, seed)?)).collect()
}

/// Consecutive estimates never rise by more than `sigmas` combined standard
/// errors.
pub fn nonincreasing_within(records: &[McRecord], sigmas: f64) -> bool {
    records.windows(2).all(|w| w[1].estimate <= w[0].estimate + sigmas * libm::sqrt(w[0].stderr * w[0].stderr + w[1].stderr * w[1].stderr))
}

/// An `r`-uniform hypergraph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RGraph {
    n: usize,
    r: usize,
    edges: BTreeSet<Tuple>,
}

impl RGraph {
    pub fn new(n: usize, r: usize, edges: impl IntoIterator<Item = Tuple>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("r must be at least 1".into()));
        }
        let mut set = BTreeSet::new();
        for mut e in edges {
            e.sort_unstable();
            if e.len() != r || e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!("{e:?} is not an {r}-element set")));
            }
            if let Some(&x) = e.iter().find(|&&x| x as usize >= n) {
                return Err(Error::ElementOutOfRange { elem: x as u64, size: n });
            }
            set.insert(e);
        }
        Ok(RGraph { n, r, edges: set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn edges(&self) -> &BTreeSet<Tuple> {
        &self.edges
    }

    /// Is the set (any order) an edge?
    pub fn has_edge(&self, set: &[Elem]) -> bool {
        let mut s = set.to_vec();
        s.sort_unstable();
        self.edges.contains(&s)
    }

    /// One `r`-ary relation `R` holding of every ordering of every edge.
    pub fn to_structure(&self) -> Structure {
        let mut st = Structure::new(Signature::new([("R", self.r)]).expect("valid"), self.n);
        for e in &self.edges {
            let mut p = e.clone();
            loop {
                st.insert("R", &p).expect("in range");
                if !next_perm(&mut p) {
                    break;
                }
            }
        }
        st
    }

    /// Inverse of [`RGraph::to_structure`]; fails unless `R` is symmetric and
    /// holds only of tuples without repetition.
    pub fn from_structure(st: &Structure) -> Result<Self> {
        let rel = st.relation("R").ok_or_else(|| Error::UnknownRelation("R".into()))?;
        let r = rel.arity();
        let mut edges = BTreeSet::new();
        for t in rel.tuples() {
            let mut s = t.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!("R{t:?} repeats an element")));
            }
            edges.insert(s);
        }
        let g = RGraph { n: st.size(), r, edges };
        let count: usize = g.edges.len() * (1..=r).product::<usize>();
        if count != rel.len() {
            return Err(Error::InvalidArgument("R is not symmetric".into()));
        }
        Ok(g)
    }

    /// Each `r`-set is an edge with probability `p`, in lexicographic order
    /// of the sets, using the experiment stream for `(seed, 0)`.
    pub fn random(n: usize, r: usize, p: f64, seed: u64) -> Result<Self> {
        let t = threshold(p)?;
        let mut rng = trial_rng(seed, 0);
        let mut edges = Vec::new();
        for_each_combination(n, r, |c| {
            if (rng.next_u64() as u128) < t {
                edges.push(c.iter().map(|&i| i as Elem).collect());
            }
            true
        });
        RGraph::new(n, r, edges)
    }

    /// `R(x0, y0, …, y_{r-2})`: the partition used for the independence
    /// property of an `r`-graph.
    pub fn formula(&self) -> PartitionedFormula {
        let mut args = vec![Var::X(0)];
        args.extend((0..self.r as u32 - 1).map(Var::Y));
        PartitionedFormula::new("R", vec![Var::X(0)], args[1..].to_vec(), Formula::atom("R", &args)).expect("well formed")
    }
}

fn next_perm(v: &mut [Elem]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Which of the two hypergraph growth functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypergraphCase {
    /// `F(i) = 2^{C(i, r-1)}`.
    Worst,
    /// `F(i) = 1` for `i < r`, else `i^{(r-1)(n-1)}`.
    NoIndependence { n: u32 },
}

impl HypergraphCase {
    pub fn growth(&self, r: u32) -> GrowthFn {
        match *self {
            HypergraphCase::Worst => GrowthFn::HypergraphWorst { r },
            HypergraphCase::NoIndependence { n } => GrowthFn::HypergraphNoIndependence { r, n },
        }
    }
}

pub fn hypergraph_f(r: u32, case: HypergraphCase, i: u64) -> Result<BigUint> {
    if r < 2 {
        return Err(Error::InvalidArgument("r must be at least 2".into()));
    }
    case.growth(r).eval(i)
}

/// `F*(k)` for a sequence of vertices over `∅` (`α = 0`, single vertices,
/// one new vertex per step), every step multiplicative.
pub fn hypergraph_f_star(r: u32, case: HypergraphCase, k: u64) -> Result<BigUint> {
    if r < 2 {
        return Err(Error::InvalidArgument("r must be at least 2".into()));
    }
    f_star(&BoundParams { growth: case.growth(r), alpha: 0, r: 1, m: 1, k: k + 3 }, k)
}

/// The stated envelope: `2^{k^r}` in the worst case, `k^{(r-1)(n-1)k}`
/// without `n`-independence.
pub fn hypergraph_envelope(r: u32, case: HypergraphCase, k: u64) -> Result<BigUint> {
    let guard = |bits: u64| if bits > 1 << 24 { Err(Error::TooLarge("envelope".into())) } else { Ok(()) };
    match case {
        HypergraphCase::Worst => {
            let e = k.checked_pow(r).ok_or_else(|| Error::TooLarge("k^r".into()))?;
            guard(e)?;
            Ok(BigUint::one() << e as usize)
        }
        HypergraphCase::NoIndependence { n } => {
            let e = (r as u64 - 1) * (n as u64).saturating_sub(1) * k;
            guard(e.saturating_mul(64 - k.leading_zeros() as u64))?;
            Ok(BigUint::from(k).pow(e as u32))
        }
    }
}

/// `E^{(j)}(x)` with `E(α) = (α+1)^{p(α+1)}`.
pub fn e_bound(p: u64, j: u32, x: u64) -> Result<BigUint> {
    if p == 0 || j == 0 {
        return Err(Error::InvalidArgument("p and j must be at least 1".into()));
    }
    let mut v = BigUint::from(x);
    for _ in 0..j {
        let base = v + 1u32;
        let exp = (&base * p).to_u64().ok_or_else(|| Error::TooLarge("E exponent".into()))?;
        if base.bits().saturating_mul(exp) > 1 << 24 {
            return Err(Error::TooLarge(format!("E_{p}^({j})({x}) is too large")));
        }
        v = base.pow(exp as u32);
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Homogeneous {
    /// `complete` is false for empty sets; sets smaller than `r` are tagged
    /// empty.
    Found { vertices: Vec<Elem>, complete: bool },
    /// The recursion came up short; `level` is the uniformity at which the
    /// set first fell below what was needed.
    Failure { level: usize, achieved: usize },
}

/// Every `r`-subset an edge (`Some(true)`), none (`Some(false)`), or mixed.
/// Sets with fewer than `r` vertices count as empty.
pub fn homogeneity(g: &RGraph, set: &[Elem]) -> Option<bool> {
    let mut seen = [false, false];
    for_each_combination(set.len(), g.r, |c| {
        let s: Vec<Elem> = c.iter().map(|&i| set[i]).collect();
        seen[g.has_edge(&s) as usize] = true;
        !(seen[0] && seen[1])
    });
    match seen {
        [true, true] => None,
        [false, true] => Some(true),
        _ => Some(false),
    }
}

/// Does `g` have the `n`-independence property for `R(x0; y0 … y_{r-2})`?
pub fn has_independence(g: &RGraph, n: usize, budget: &mut Budget) -> Result<bool> {
    Ok(crate::detect::find_k_independence(&g.to_structure(), &g.formula(), n, budget)?.decided()?.is_some())
}

/// A homogeneous set of size `k`. For `r ≥ 3`: extract an end-indiscernible
/// sequence for `R` with one new vertex per step, let `v` be its last
/// vertex, recurse on `R'(X) ⇔ R(X ∪ {v})` for `k - 1` and add `v`. For
/// `r = 2`: a greedy chain where each vertex keeps the larger of its
/// neighbourhood and non-neighbourhood, then the majority colour plus the
/// last vertex. With `certify = Some(n)` the graph must lack the
/// `n`-independence property. The output is verified before returning.
pub fn extract_homogeneous(g: &RGraph, k: usize, certify: Option<usize>) -> Result<Homogeneous> {
    if let Some(n) = certify {
        if has_independence(g, n, &mut Budget::new(DEFAULT_BUDGET))? {
            return Err(Error::Precondition(format!("the graph has the {n}-independence property")));
        }
    }
    let verts: Vec<Elem> = (0..g.n as Elem).collect();
    let mut shortfall = None;
    let mut set = homog_rec(g, &verts, g.r, &[], k, &mut shortfall);
    if set.len() < k {
        let level = shortfall.unwrap_or(g.r);
        return Ok(Homogeneous::Failure { level, achieved: set.len() });
    }
    set.truncate(k);
    set.sort_unstable();
    match homogeneity(g, &set) {
        Some(complete) => Ok(Homogeneous::Found { vertices: set, complete }),
        None => Err(Error::Precondition("extracted set failed verification".into())),
    }
}

fn homog_rec(g: &RGraph, items: &[Elem], level: usize, suffix: &[Elem], k: usize, shortfall: &mut Option<usize>) -> Vec<Elem> {
    let edge = |xs: &[Elem]| {
        let mut s = xs.to_vec();
        s.extend_from_slice(suffix);
        g.has_edge(&s)
    };
    let out = match level {
        0 => items.to_vec(),
        1 => {
            let (yes, no): (Vec<Elem>, Vec<Elem>) = items.iter().partition(|&&v| edge(&[v]));
            if yes.len() >= no.len() {
                yes
            } else {
                no
            }
        }
        2 => {
            let mut pool = items.to_vec();
            let mut chain = Vec::new();
            while let Some((&v, rest)) = pool.split_first() {
                let (adj, non): (Vec<Elem>, Vec<Elem>) = rest.iter().partition(|&&u| edge(&[v, u]));
                if rest.is_empty() {
                    chain.push((v, None));
                    break;
                }
                let colour = adj.len() >= non.len();
                chain.push((v, Some(colour)));
                pool = if colour { adj } else { non };
            }
            let ones = chain.iter().filter(|(_, c)| *c == Some(true)).count();
            let zeros = chain.iter().filter(|(_, c)| *c == Some(false)).count();
            let keep = ones >= zeros;
            chain.iter().filter(|(_, c)| c.is_none_or(|c| c == keep)).map(|&(v, _)| v).collect()
        }
        _ => {
            let typer = |idx: &[usize], suf: &[usize]| {
                let xs: Vec<Elem> = idx.iter().chain(suf).map(|&p| p as Elem).collect();
                vec![edge(&xs)]
            };
            let positions: Vec<usize> = items.iter().map(|&v| v as usize).collect();
            let chain = end_indiscernible_positions(&positions, level, &[], &typer).chosen;
            match chain.split_last() {
                None => Vec::new(),
                Some((&v, rest)) => {
                    let rest: Vec<Elem> = rest.iter().map(|&p| p as Elem).collect();
                    let mut suf = vec![v as Elem];
                    suf.extend_from_slice(suffix);
                    let mut inner = homog_rec(g, &rest, level - 1, &suf, k.saturating_sub(1), shortfall);
                    inner.push(v as Elem);
                    inner
                }
            }
        }
    };
    if out.len() < k && shortfall.is_none_or(|l| l > level) {
        *shortfall = Some(level);
    }
    out
}

/// `log^{(j)}(c + 2↑↑…(x))`: `j` logarithms of `c` plus a `j`-fold power of
/// two of `x`, evaluated without forming the tower.
pub fn log_tower(j: u32, x: f64, c: f64) -> f64 {
    if j == 0 {
        return x + c;
    }
    let e = exp2_iter(j - 1, x);
    let delta = if e.is_finite() { libm::log2(1.0 + c * libm::exp2(-e)) } else { 0.0 };
    log_tower(j - 1, x, delta)
}

fn exp2_iter(j: u32, x: f64) -> f64 {
    (0..j).fold(x, |v, _| libm::exp2(v))
}

/// Iterated logarithms of the two hypergraph Ramsey upper bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundComparison {
    pub r: u32,
    pub n: u64,
    pub k: u64,
    /// `log^{(r-1)}` of the classical bound; `4k` for `r = 3`.
    pub a_level: f64,
    /// `log^{(r-1)}` of the bound without `n`-independence.
    pub b_level: f64,
    /// For `r = 3`: `c` with `E_p^{(2)}(k-1) ≈ 2^{c(n-1)}`, i.e.
    /// `2(2^{2k}+1) log2(2^{2k}+1)`.
    pub b_coefficient: Option<f64>,
    /// For `r = 3` the stated condition `n < 2^{2k-2}/k`; otherwise
    /// `b_level < a_level`.
    pub b_smaller: bool,
}

/// For `r = 3`: `log log a_3 = 4k` and
/// `log log b_3 = log2(p (2^{2k}+1) log2(2^{2k}+1))` with `p = 2(n-1)`.
/// Above `r = 3` the recurrences
/// `log^{(r)} a_{r+1} = log^{(r-3)}(log r + log log a_r)` and
/// `log^{(r)} b_{r+1} = log^{(r-2)}(log(r-1) + log(n-1) + log b_r + log log b_r)`
/// are applied from the `r = 3` values.
pub fn bound_compare(r: u32, n: u64, k: u64) -> Result<BoundComparison> {
    if r < 3 {
        return Err(Error::InvalidArgument("r must be at least 3".into()));
    }
    if n < 2 || k < 1 {
        return Err(Error::InvalidArgument("need n >= 2 and k >= 1".into()));
    }
    let big = libm::exp2(2.0 * k as f64) + 1.0;
    let coeff = 2.0 * big * libm::log2(big);
    let p = 2.0 * (n - 1) as f64;
    let mut a = 4.0 * k as f64;
    let mut b = libm::log2(p * big * libm::log2(big));
    for rr in 3..r {
        a = log_tower(rr - 3, a, libm::log2(rr as f64));
        let c = libm::log2((rr - 1) as f64) + libm::log2((n - 1) as f64);
        let e = exp2_iter(rr - 3, b);
        let delta = if e.is_finite() { libm::log2(1.0 + (c + e) * libm::exp2(-exp2_iter(rr - 2, b).min(1e308))) } else { 0.0 };
        b = log_tower(rr - 3, b, delta);
    }
    let b_smaller = if r == 3 {
        let lhs = (n as u128).checked_mul(k as u128);
        let shift = 2 * k as u32 - 2;
        match lhs {
            Some(l) if shift < 127 => l < 1u128 << shift,
            _ => return Err(Error::TooLarge("crossover arithmetic".into())),
        }
    } else {
        b < a
    };
    Ok(BoundComparison { r, n, k, a_level: a, b_level: b, b_coefficient: (r == 3).then_some(coeff), b_smaller })
}

/// `|x| < tol` for an exact rational.
pub fn rational_abs_below(x: &BigRational, tol: &BigRational) -> bool {
    x.abs() < *tol
}
