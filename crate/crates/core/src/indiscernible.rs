//! Indiscernible and end-indiscernible sequences, their extraction, and the
//! bound functions that control how long an input must be.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::logic::{Elem, Evaluator, PartitionedFormula, Structure, Tuple, TupleSequence};
use crate::tuples::{binomial_u128, for_each_combination, tuples_over};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// Increasing selections agree.
    Sequence,
    /// Selections in any order agree.
    Set,
    /// Extensions of a common prefix by later elements agree.
    End,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndiscernibilityCertificate {
    pub mode: Mode,
    pub m: usize,
    pub verified: bool,
    /// Two index selections with different types.
    pub counterexample: Option<(Vec<usize>, Vec<usize>)>,
}

/// Types of concatenated selections of a sequence: one bit per formula
/// instance `φ(x̄; b̄)` with `b̄` ranging over `A^s`.
struct FormulaTyper<'a> {
    evs: Vec<(Evaluator<'a>, Vec<Tuple>)>,
    seq: &'a TupleSequence,
}

impl<'a> FormulaTyper<'a> {
    fn new(seq: &'a TupleSequence, delta: &[PartitionedFormula], m: usize, a: &[Elem], st: &'a Structure) -> Result<Self> {
        seq.check_range(st.size())?;
        let mut evs = Vec::new();
        for phi in delta {
            if phi.r() != m * seq.arity() {
                return Err(Error::ArityMismatch(format!(
                    "{} has {} object variables, selections have {} elements",
                    phi.name,
                    phi.r(),
                    m * seq.arity()
                )));
            }
            evs.push((Evaluator::new(st, phi)?, tuples_over(a, phi.s())));
        }
        Ok(FormulaTyper { evs, seq })
    }
}

/// Source of types for selections of sequence positions. `suffix` positions
/// are appended after `idx`.
pub trait SelectionTyper {
    fn key(&self, idx: &[usize], suffix: &[usize]) -> Vec<bool>;
}

impl SelectionTyper for FormulaTyper<'_> {
    fn key(&self, idx: &[usize], suffix: &[usize]) -> Vec<bool> {
        let obj: Tuple = idx.iter().chain(suffix).flat_map(|&p| self.seq.get(p).iter().copied()).collect();
        self.evs.iter().flat_map(|(ev, ps)| ps.iter().map(|p| ev.holds(&obj, p)).collect::<Vec<_>>()).collect()
    }
}

impl<F: Fn(&[usize], &[usize]) -> Vec<bool>> SelectionTyper for F {
    fn key(&self, idx: &[usize], suffix: &[usize]) -> Vec<bool> {
        self(idx, suffix)
    }
}

/// Checks `(Δ, m)`-indiscernibility of `seq` over `A` (parameters `A^s` for
/// each formula; a formula with `s = 0` has the single empty parameter).
pub fn check_indiscernible(
    seq: &TupleSequence,
    delta: &[PartitionedFormula],
    m: usize,
    a: &[Elem],
    st: &Structure,
    mode: Mode,
) -> Result<IndiscernibilityCertificate> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if seq.len() < m {
        return Err(Error::InvalidArgument(format!("sequence of length {} is shorter than m = {m}", seq.len())));
    }
    let typer = FormulaTyper::new(seq, delta, m, a, st)?;
    let counterexample = match mode {
        Mode::Sequence => first_sequence_violation(&typer, seq.len(), m),
        Mode::Set => first_set_violation(&typer, seq.len(), m),
        Mode::End => first_end_violation(&typer, seq.len(), m),
    };
    Ok(IndiscernibilityCertificate { mode, m, verified: counterexample.is_none(), counterexample })
}

fn first_sequence_violation(t: &impl SelectionTyper, len: usize, m: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let reference: Vec<usize> = (0..m).collect();
    let want = t.key(&reference, &[]);
    let mut bad = None;
    for_each_combination(len, m, |c| {
        if t.key(c, &[]) != want {
            bad = Some((reference.clone(), c.to_vec()));
            false
        } else {
            true
        }
    });
    bad
}

fn first_set_violation(t: &impl SelectionTyper, len: usize, m: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let reference: Vec<usize> = (0..m).collect();
    let want = t.key(&reference, &[]);
    let mut bad = None;
    for_each_combination(len, m, |c| {
        let mut perm = c.to_vec();
        loop {
            if t.key(&perm, &[]) != want {
                bad = Some((reference.clone(), perm));
                return false;
            }
            if !next_permutation(&mut perm) {
                return true;
            }
        }
    });
    bad
}

fn next_permutation(v: &mut [usize]) -> bool {
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

fn first_end_violation(t: &impl SelectionTyper, len: usize, m: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut bad = None;
    for_each_combination(len, m - 1, |prefix| {
        let start = prefix.last().map_or(0, |&x| x + 1);
        if start + 1 >= len {
            return true;
        }
        let mut first = prefix.to_vec();
        first.push(start);
        let want = t.key(&first, &[]);
        for j in start + 1..len {
            let mut other = prefix.to_vec();
            other.push(j);
            if t.key(&other, &[]) != want {
                bad = Some((first.clone(), other));
                return false;
            }
        }
        true
    });
    bad
}

/// Record of one extraction run: the chosen positions `a_j`, and per step
/// the size of the surviving set `S_j` and the number of classes it was
/// picked from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtractionTrace {
    pub chosen: Vec<usize>,
    pub set_sizes: Vec<usize>,
    pub class_counts: Vec<usize>,
}

/// End-indiscernible extraction on positions `items` (increasing). The first
/// `m - 1` positions are taken as they are; afterwards the remaining
/// candidates are split by the types of their extensions of every
/// `(m-1)`-subset of the chosen positions, a largest class survives (ties go
/// to the class with the least position) and its least position is chosen.
pub fn end_indiscernible_positions(items: &[usize], m: usize, suffix: &[usize], typer: &impl SelectionTyper) -> ExtractionTrace {
    let mut trace = ExtractionTrace::default();
    let free = (m.saturating_sub(1)).min(items.len());
    for j in 0..free {
        trace.chosen.push(items[j]);
        trace.set_sizes.push(items.len() - j);
        trace.class_counts.push(1);
    }
    let mut pool: Vec<usize> = items[free..].to_vec();
    while !pool.is_empty() {
        let prefixes = if m <= 1 {
            vec![Vec::new()]
        } else {
            let mut v = Vec::new();
            for_each_combination(trace.chosen.len(), m - 1, |c| {
                v.push(c.iter().map(|&i| trace.chosen[i]).collect::<Vec<_>>());
                true
            });
            v
        };
        let mut classes: Vec<(Vec<bool>, Vec<usize>)> = Vec::new();
        for &c in &pool {
            let mut key = Vec::new();
            for p in &prefixes {
                let mut sel = p.clone();
                sel.push(c);
                key.extend(typer.key(&sel, suffix));
            }
            match classes.iter_mut().find(|(k, _)| *k == key) {
                Some((_, members)) => members.push(c),
                None => classes.push((key, vec![c])),
            }
        }
        // classes appear in order of their least member, so the first
        // maximal one contains the least position among maximal classes
        let best = classes.iter().map(|(_, v)| v.len()).max().expect("nonempty pool");
        let class_count = classes.len();
        let (_, chosen_class) = classes.into_iter().find(|(_, v)| v.len() == best).expect("max exists");
        trace.set_sizes.push(chosen_class.len());
        trace.class_counts.push(class_count);
        trace.chosen.push(chosen_class[0]);
        pool = chosen_class[1..].to_vec();
    }
    trace
}

/// Result of an extraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extraction {
    Success { sequence: TupleSequence, positions: Vec<usize>, trace: ExtractionTrace },
    /// The output was shorter than requested; `level` is the recursion level
    /// (value of `m`) where the length first fell short.
    Failure { level: usize, achieved: usize, trace: ExtractionTrace },
}

impl Extraction {
    pub fn sequence(&self) -> Option<&TupleSequence> {
        match self {
            Extraction::Success { sequence, .. } => Some(sequence),
            Extraction::Failure { .. } => None,
        }
    }
}

/// Extracts a `(φ, m)`-end-indiscernible subsequence over `A` of length at
/// least `k`.
pub fn extract_end_indiscernible(seq: &TupleSequence, phi: &PartitionedFormula, m: usize, a: &[Elem], st: &Structure, k: usize) -> Result<Extraction> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let typer = FormulaTyper::new(seq, core::slice::from_ref(phi), m, a, st)?;
    let items: Vec<usize> = (0..seq.len()).collect();
    let trace = end_indiscernible_positions(&items, m, &[], &typer);
    if trace.chosen.len() < k {
        return Ok(Extraction::Failure { level: m, achieved: trace.chosen.len(), trace });
    }
    let positions = trace.chosen.clone();
    Ok(Extraction::Success { sequence: seq.select(&positions), positions, trace })
}

/// Turns a `(φ, level)`-end-indiscernible list of positions into an
/// indiscernible one: fix the last position `c`, extract end-indiscernibles
/// for `φ(x̄⌢c)` one level down, recurse, and append `c`. Records the length
/// reached at each level in `lengths`.
pub fn indiscernible_from_end(items: &[usize], level: usize, suffix: &[usize], typer: &impl SelectionTyper, lengths: &mut Vec<(usize, usize)>) -> Vec<usize> {
    if level <= 1 || items.is_empty() {
        return items.to_vec();
    }
    let (&c, rest) = items.split_last().expect("nonempty");
    let mut suffix2 = vec![c];
    suffix2.extend_from_slice(suffix);
    let inner = end_indiscernible_positions(rest, level - 1, &suffix2, typer).chosen;
    lengths.push((level - 1, inner.len()));
    let mut out = indiscernible_from_end(&inner, level - 1, &suffix2, typer, lengths);
    out.push(c);
    out
}

/// Extracts a `(φ, m)`-indiscernible subsequence over `A` of length at least
/// `k`; the output is re-verified with [`check_indiscernible`].
pub fn extract_indiscernible(seq: &TupleSequence, phi: &PartitionedFormula, m: usize, a: &[Elem], st: &Structure, k: usize) -> Result<Extraction> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let typer = FormulaTyper::new(seq, core::slice::from_ref(phi), m, a, st)?;
    let items: Vec<usize> = (0..seq.len()).collect();
    let trace = end_indiscernible_positions(&items, m, &[], &typer);
    let mut lengths = vec![(m, trace.chosen.len())];
    let positions = indiscernible_from_end(&trace.chosen, m, &[], &typer, &mut lengths);
    if positions.len() < k {
        // at level l the inner sequence must still reach k - (m - l)
        let level = lengths.iter().find(|&&(l, len)| len + (m - l) < k).map_or(1, |&(l, _)| l);
        return Ok(Extraction::Failure { level, achieved: positions.len(), trace });
    }
    let sequence = seq.select(&positions);
    if positions.len() >= m {
        let cert = check_indiscernible(&sequence, core::slice::from_ref(phi), m, a, st, Mode::Sequence)?;
        if !cert.verified {
            return Err(Error::Precondition("extracted sequence failed verification".into()));
        }
    }
    Ok(Extraction::Success { sequence, positions, trace })
}

/// Number of `φ`-types over a set of a given size, bounded by a named
/// function `F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthFn {
    /// `F(i) = 2^{i^m}`.
    WorstCase { m: u32 },
    /// `F(i) = i^p`.
    Polynomial { p: u32 },
    /// `F(i) = 2^{C(i, r-1)}`: edges of an `r`-graph through a new vertex.
    HypergraphWorst { r: u32 },
    /// `F(i) = 1` for `i < r`, otherwise `i^{(r-1)(n-1)}`: `r`-graphs without
    /// the `n`-independence property.
    HypergraphNoIndependence { r: u32, n: u32 },
}

const EXP_LIMIT: u64 = 1 << 24;

fn pow2(e: &BigUint) -> Result<BigUint> {
    let e = e.to_u64().filter(|&e| e <= EXP_LIMIT).ok_or_else(|| Error::TooLarge(format!("2^{e}")))?;
    Ok(BigUint::one() << e as usize)
}

fn checked_pow(b: &BigUint, e: u64) -> Result<BigUint> {
    if b.is_zero() || b.is_one() {
        return Ok(if e == 0 { BigUint::one() } else { b.clone() });
    }
    if e.saturating_mul(b.bits()) > EXP_LIMIT {
        return Err(Error::TooLarge(format!("{b}^{e}")));
    }
    Ok(b.pow(e as u32))
}

impl GrowthFn {
    pub fn eval(&self, i: u64) -> Result<BigUint> {
        let bi = BigUint::from(i);
        match *self {
            GrowthFn::WorstCase { m } => pow2(&checked_pow(&bi, m as u64)?),
            GrowthFn::Polynomial { p } => checked_pow(&bi, p as u64),
            GrowthFn::HypergraphWorst { r } => {
                let q = binomial_u128(i, r.saturating_sub(1) as u64).ok_or_else(|| Error::TooLarge("binomial".into()))?;
                pow2(&BigUint::from(q))
            }
            GrowthFn::HypergraphNoIndependence { r, n } => {
                if i < r as u64 {
                    Ok(BigUint::one())
                } else {
                    checked_pow(&bi, (r as u64 - 1) * (n as u64).saturating_sub(1))
                }
            }
        }
    }
}

/// Parameters of the extraction bound: the growth function, `α = |A|`, the
/// tuple length `r`, the arity `m` and the target length `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundParams {
    pub growth: GrowthFn,
    pub alpha: u64,
    pub r: u64,
    pub m: u64,
    pub k: u64,
}

/// `F*(j)` for `0 ≤ j ≤ k-2`: `F*(0) = 1`,
/// `F*(j+1) = 1 + F*(j) F(α + m r j)` for `j < k-2-m`, and
/// `F*(j+1) = 1 + F*(j)` for `k-2-m ≤ j < k-2`.
pub fn f_star(params: &BoundParams, j: u64) -> Result<BigUint> {
    if params.k < 2 || j > params.k - 2 {
        return Err(Error::InvalidArgument(format!("F* is defined for 0 <= j <= k-2, got j = {j}, k = {}", params.k)));
    }
    let split = (params.k - 2).saturating_sub(params.m);
    let mut v = BigUint::one();
    for i in 0..j {
        v = if i < split {
            let f = params.growth.eval(params.alpha + params.m * params.r * i)?;
            let next = v * f + 1u32;
            if next.bits() > EXP_LIMIT {
                return Err(Error::TooLarge("F*".into()));
            }
            next
        } else {
            v + 1u32
        };
    }
    Ok(v)
}

/// `g_0(x) = x`, `g_i(x) = f_{i-1}(g_{i-1}(x) - 2)`, where `f_j(y)` is
/// `F*(y)` with `m = j` and `k = y + 2` (the largest index `F*` is defined
/// at); `params.k` is not used.
pub fn g_func(params: &BoundParams, i: u64, x: u64) -> Result<BigUint> {
    let mut v = BigUint::from(x);
    for level in 0..i {
        if v < BigUint::from(2u32) {
            return Err(Error::Underflow(format!("g_{level}({x}) - 2 is negative")));
        }
        let arg = (v - 2u32).to_u64().ok_or_else(|| Error::TooLarge("g argument".into()))?;
        v = f_star(&BoundParams { m: level, k: arg + 2, ..*params }, arg)?;
    }
    Ok(v)
}

/// `beth(0, x) = x`, `beth(i, x) = 2^{beth(i-1, x)}`.
pub fn beth(i: u32, x: u64) -> Result<BigUint> {
    let mut v = BigUint::from(x);
    for _ in 0..i {
        v = pow2(&v)?;
    }
    Ok(v)
}

/// `⌈log2 x⌉` for `x ≥ 1`, via bit length.
pub fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// `beth(level, arg)`, kept symbolic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BethValue {
    pub level: u32,
    pub arg: u64,
}

impl BethValue {
    pub fn value(&self) -> Result<BigUint> {
        beth(self.level, self.arg)
    }
}

/// Closed forms bounding the input length needed for extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cor9Estimates {
    /// Bound on `log^(m) g_m(k-1)` when `F(i) = 2^{i^m}`: `4k`.
    pub worst_case_log: u64,
    /// Bound on `log^(m) g_m(k-1)` when `F(i) = i^p`:
    /// `2mk + ⌈log2 k⌉ + ⌈log2 p⌉`.
    pub polynomial_log: u64,
    /// Input length sufficient without the `n`-independence property:
    /// `beth(m, 2k + ⌈log2 k⌉ + ⌈log2 n⌉ + ⌈log2 m⌉)`.
    pub no_independence: BethValue,
    /// Input length sufficient without the `n`-order property:
    /// `beth(m, 2k + ⌈log2 k⌉ + (3ns)^{t+1})`.
    pub no_order: BethValue,
}

pub fn cor9_estimates(m: u64, k: u64, p: u64, n: u64, s: u64, t: u64) -> Result<Cor9Estimates> {
    if m == 0 || k == 0 || p == 0 || n == 0 || s == 0 || t == 0 {
        return Err(Error::InvalidArgument("parameters must be positive".into()));
    }
    let level = u32::try_from(m).map_err(|_| Error::TooLarge("m".into()))?;
    let order_term = (3 * n * s).checked_pow(t as u32 + 1).ok_or_else(|| Error::TooLarge("(3ns)^(t+1)".into()))?;
    Ok(Cor9Estimates {
        worst_case_log: 4 * k,
        polynomial_log: 2 * m * k + ceil_log2(k) + ceil_log2(p),
        no_independence: BethValue { level, arg: 2 * k + ceil_log2(k) + ceil_log2(n) + ceil_log2(m) },
        no_order: BethValue { level, arg: 2 * k + ceil_log2(k) + order_term },
    })
}
