//! Average types over indiscernible sequences, goodness, the submodel
//! relation `≺_K` and stable amalgamation.
//!
//! Throughout, `ψ(ȳ; x̄) = φ(x̄; ȳ)`. A sequence of `φ`-objects is averaged
//! with `φ` and must be indiscernible for `{ψ}*_n`; a sequence of
//! `φ`-parameters is indiscernible for `{φ}*_n`.
//!
//! Indiscernibility for `{θ}*_n` is decided without building formulas: an
//! increasing `n`-selection `c_0 < … < c_{n-1}` determines which of the `2^n`
//! sign cells `⋀ ±θ(x̄; c_i)` are inhabited, and two selections satisfy the
//! same formulas of `{θ}*_n` exactly when they inhabit the same cells.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bits::Bits;
use crate::budget::Budget;
use crate::detect::{find_cover_violation, find_k_independence, CoverViolation, IndependenceWitness};
use crate::error::{Error, Result};
use crate::logic::{close_under_negation, Elem, Formula, PartitionedFormula, PhiMatrix, PhiType, Structure, Tuple, TupleSequence, TypeEntry, Var};
use crate::tuples::{for_each_combination, tuples_over, TupleSpace};

/// Cap on the number of sequences a single search may visit.
pub const SEQUENCE_CAP: u64 = 1_000_000;

/// Largest `n` for which sign cells fit a 64-bit key.
pub const MAX_STAR_N: usize = 6;

/// The closure `Δ*_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaStar {
    pub base: Vec<PartitionedFormula>,
    pub n: usize,
    /// `∃x̄ [⋀_{i∈w} θ(x̄; ȳ_i) ∧ ⋀_{i∈k∖w} ¬θ(x̄; ȳ_i)]` for `θ ∈ Δ`,
    /// `1 ≤ k ≤ n`, `w ⊆ k`; block `ȳ_i` is `y_{i·s} … y_{i·s+s-1}`.
    pub top: Vec<Formula>,
    /// `top` and all subformulas, without repetition, in discovery order.
    pub formulas: Vec<Formula>,
}

pub fn delta_star(delta: &[PartitionedFormula], n: usize) -> Result<DeltaStar> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n > 16 {
        return Err(Error::TooLarge(format!("Δ*_n with n = {n}")));
    }
    let mut top = Vec::new();
    for theta in delta {
        let (r, s) = (theta.r(), theta.s());
        for k in 1..=n {
            for w in 0u32..(1 << k) {
                let mut lits = Vec::with_capacity(k);
                for i in 0..k {
                    let mut map = BTreeMap::new();
                    for (j, v) in theta.object_vars.iter().enumerate() {
                        map.insert(*v, Var::X(j as u32));
                    }
                    for (j, v) in theta.param_vars.iter().enumerate() {
                        map.insert(*v, Var::Y((i * s + j) as u32));
                    }
                    let lit = theta.body.rename_free(&map);
                    lits.push(if w >> i & 1 == 1 { lit } else { lit.not() });
                }
                let mut f = Formula::conj(lits).expect("k >= 1");
                for j in (0..r).rev() {
                    f = Formula::exists(Var::X(j as u32), f);
                }
                top.push(f);
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut formulas = Vec::new();
    for f in &top {
        for g in f.subformulas() {
            if seen.insert(g.clone()) {
                formulas.push(g.clone());
            }
        }
    }
    Ok(DeltaStar { base: delta.to_vec(), n, top, formulas })
}

/// Inhabited sign cells of the rows of `mat` over the selected columns, one
/// bit per cell; bit `w` stands for the cell positive exactly at `i ∈ w`.
pub fn star_key(mat: &PhiMatrix, cols: &[usize]) -> u64 {
    debug_assert!(cols.len() <= MAX_STAR_N);
    let full = if cols.len() == MAX_STAR_N { u64::MAX } else { (1u64 << (1 << cols.len())) - 1 };
    let mut key = 0u64;
    for row in 0..mat.n_objs() {
        key |= 1 << row_pattern(mat, row, cols);
        if key == full {
            break;
        }
    }
    key
}

fn row_pattern(mat: &PhiMatrix, row: usize, cols: &[usize]) -> u64 {
    cols.iter().enumerate().fold(0, |acc, (j, &c)| acc | (mat.get(row, c) as u64) << j)
}

/// Indiscernibility test for sequences of column indices, shared by several
/// matrices over the same columns. `extra` rows add the parameters of
/// indiscernibility over a set.
struct StarIndex<'a> {
    mats: Vec<&'a PhiMatrix>,
    extra: Vec<(usize, usize)>,
    n: usize,
}

impl<'a> StarIndex<'a> {
    fn new(mats: Vec<&'a PhiMatrix>, extra: Vec<(usize, usize)>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if n > MAX_STAR_N {
            return Err(Error::TooLarge(format!("indiscernibility for n = {n} (at most {MAX_STAR_N})")));
        }
        Ok(StarIndex { mats, extra, n })
    }

    fn key(&self, cols: &[usize]) -> Vec<u64> {
        let mut k: Vec<u64> = self.mats.iter().map(|m| star_key(m, cols)).collect();
        k.extend(self.extra.iter().map(|&(mi, row)| row_pattern(self.mats[mi], row, cols)));
        k
    }

    /// First pair of increasing selections with different keys.
    fn violation(&self, seq: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
        if seq.len() < self.n {
            return None;
        }
        let first: Vec<usize> = (0..self.n).collect();
        let want = self.key(&first.iter().map(|&i| seq[i]).collect::<Vec<_>>());
        let mut bad = None;
        for_each_combination(seq.len(), self.n, |c| {
            let cols: Vec<usize> = c.iter().map(|&i| seq[i]).collect();
            if self.key(&cols) != want {
                bad = Some((first.clone(), c.to_vec()));
                false
            } else {
                true
            }
        });
        bad
    }

    /// Does appending position `seq.len() - 1` keep every selection on the
    /// reference key?
    fn extends(&self, seq: &[usize], reference: &[u64]) -> bool {
        let last = seq.len() - 1;
        let mut ok = true;
        for_each_combination(last, self.n - 1, |c| {
            let mut cols: Vec<usize> = c.iter().map(|&i| seq[i]).collect();
            cols.push(seq[last]);
            ok = self.key(&cols) == reference;
            ok
        });
        ok
    }

    /// Visits every indiscernible sequence of distinct columns with length in
    /// `min_len..=max_len`, in lexicographic order.
    fn for_each_sequence(&self, n_cols: usize, min_len: usize, max_len: usize, budget: &mut Budget, visit: &mut dyn FnMut(&[usize])) -> Result<()> {
        let mut seq = Vec::new();
        let mut used = vec![false; n_cols];
        let mut reference = Vec::new();
        self.dfs(n_cols, min_len, max_len.min(n_cols), &mut seq, &mut used, &mut reference, budget, visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        n_cols: usize,
        min_len: usize,
        max_len: usize,
        seq: &mut Vec<usize>,
        used: &mut [bool],
        reference: &mut Vec<u64>,
        budget: &mut Budget,
        visit: &mut dyn FnMut(&[usize]),
    ) -> Result<()> {
        if seq.len() >= min_len {
            visit(seq);
        }
        if seq.len() == max_len {
            return Ok(());
        }
        for c in 0..n_cols {
            if used[c] {
                continue;
            }
            budget.tick().map_err(|_| Error::BudgetExhausted)?;
            seq.push(c);
            let ok = match seq.len().cmp(&self.n) {
                core::cmp::Ordering::Less => true,
                core::cmp::Ordering::Equal => {
                    *reference = self.key(seq);
                    true
                }
                core::cmp::Ordering::Greater => self.extends(seq, reference),
            };
            if ok {
                used[c] = true;
                self.dfs(n_cols, min_len, max_len, seq, used, reference, budget, visit)?;
                used[c] = false;
            }
            seq.pop();
        }
        Ok(())
    }
}

/// A sequence and instance attaining the largest minority count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaWitness {
    pub sequence: Vec<Tuple>,
    /// Index into `Δ` closed under negation.
    pub formula: usize,
    pub c: Tuple,
    pub minority: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaReport {
    pub kappa: usize,
    pub witness: Option<KappaWitness>,
}

/// `κ_{Δ,n}(M)` restricted to sequences of distinct tuples of length
/// `2..=max_len`: one more than the largest `min(#{i: θ[c; a_i]},
/// #{i: ¬θ[c; a_i]})` over `θ ∈ Δ`, objects `c` and `(Δ*_n, n)`-indiscernible
/// sequences `⟨a_i⟩` of `θ`-parameters. Formulas of `Δ` whose parameter
/// blocks have other lengths do not constrain the sequence.
pub fn kappa(m: &Structure, delta: &[PartitionedFormula], n: usize, max_len: usize) -> Result<KappaReport> {
    if max_len < 2 {
        return Err(Error::InvalidArgument("max_len must be at least 2".into()));
    }
    let closed = close_under_negation(delta);
    let mats = closed.iter().map(|t| PhiMatrix::new(m, t)).collect::<Result<Vec<_>>>()?;
    let arities: BTreeSet<usize> = closed.iter().map(|t| t.s()).collect();
    let mut best = 0usize;
    let mut witness = None;
    let mut budget = Budget::new(SEQUENCE_CAP);
    for s in arities {
        let group: Vec<usize> = (0..closed.len()).filter(|&i| closed[i].s() == s).collect();
        let index = StarIndex::new(group.iter().map(|&i| &mats[i]).collect(), Vec::new(), n)?;
        let n_cols = mats[group[0]].n_pars();
        index.for_each_sequence(n_cols, 2, max_len, &mut budget, &mut |seq| {
            for &fi in &group {
                let mat = &mats[fi];
                for row in 0..mat.n_objs() {
                    let pos = seq.iter().filter(|&&c| mat.get(row, c)).count();
                    let minority = pos.min(seq.len() - pos);
                    if minority > best {
                        best = minority;
                        witness = Some(KappaWitness {
                            sequence: seq.iter().map(|&c| mat.par_tuple(c)).collect(),
                            formula: fi,
                            c: mat.obj_tuple(row),
                            minority,
                        });
                    }
                }
            }
        })?;
    }
    Ok(KappaReport { kappa: best + 1, witness })
}

/// Checks that `seq` (tuples of `φ`-objects) is `({ψ}*_n, n)`-indiscernible
/// over `∅` in `m`.
pub fn check_object_sequence(m: &Structure, phi: &PartitionedFormula, seq: &TupleSequence, n: usize) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    if seq.arity() != phi.r() {
        return Err(Error::ArityMismatch(format!("sequence arity {} but {} has {} object variables", seq.arity(), phi.name, phi.r())));
    }
    let mat = PhiMatrix::new(m, phi)?.transpose();
    let cols = seq.tuples().iter().map(|t| mat.par_index(t)).collect::<Result<Vec<_>>>()?;
    Ok(StarIndex::new(vec![&mat], Vec::new(), n)?.violation(&cols))
}

/// Checks that `seq` (tuples of `φ`-parameters) is `({φ}*_n, n)`-indiscernible
/// over `∅` in `m`.
pub fn check_param_sequence(m: &Structure, phi: &PartitionedFormula, seq: &TupleSequence, n: usize) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    check_object_sequence(m, &phi.swap_blocks(), seq, n)
}

/// `Av_φ(I, A, M)`: `φ(x̄; a)` when at least `κ` members of `I` satisfy it,
/// `¬φ(x̄; a)` when at least `κ` members do not, for `a ∈ A^s`. The result
/// may contain both or neither.
pub fn average_type(m: &Structure, phi: &PartitionedFormula, seq: &TupleSequence, a_set: &[Elem], kappa: usize, n: usize) -> Result<PhiType> {
    if let Some((a, b)) = check_object_sequence(m, phi, seq, n)? {
        return Err(Error::Precondition(format!("sequence is not indiscernible: selections {a:?} and {b:?} differ")));
    }
    average_unchecked(m, phi, seq, &tuples_over(a_set, phi.s()), kappa)
}

fn average_unchecked(m: &Structure, phi: &PartitionedFormula, seq: &TupleSequence, params: &[Tuple], kappa: usize) -> Result<PhiType> {
    let ev = crate::logic::Evaluator::new(m, phi)?;
    let mut out = PhiType::new(phi.r(), []);
    for p in params {
        let mut pos = 0;
        for c in seq.tuples() {
            if ev.holds_checked(c, p)? {
                pos += 1;
            }
        }
        if pos >= kappa {
            out.insert(TypeEntry { formula: 0, params: p.clone(), positive: true });
        }
        if seq.len() - pos >= kappa {
            out.insert(TypeEntry { formula: 0, params: p.clone(), positive: false });
        }
    }
    Ok(out)
}

/// Whether `ty` has exactly one of `φ(x̄; a)`, `¬φ(x̄; a)` for each listed `a`.
pub fn is_complete_over(ty: &PhiType, formula: usize, params: &[Tuple]) -> bool {
    params.iter().all(|p| ty.contains(formula, p, true) != ty.contains(formula, p, false))
}

/// `φ`, `ψ`, `¬φ`, `¬ψ`.
pub fn delta_of(phi: &PartitionedFormula) -> Vec<PartitionedFormula> {
    let psi = phi.swap_blocks();
    vec![phi.clone(), psi.clone(), phi.negate(), psi.negate()]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodOptions {
    /// Longest sequence enumerated when computing `κ`.
    pub max_len: usize,
    /// Largest family tried by the cover search; `None` tries all sizes.
    pub cover_n_max: Option<usize>,
    pub budget: u64,
}

impl Default for GoodOptions {
    fn default() -> Self {
        GoodOptions { max_len: 6, cover_n_max: None, budget: crate::budget::DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodnessContext {
    pub phi: PartitionedFormula,
    pub n: usize,
    pub d: usize,
    /// `κ_{φ,n}(M)`.
    pub kappa_phi: usize,
    /// `κ_{ψ,n}(M)`.
    pub kappa_psi: usize,
    /// `κ_{Δ,n}(M)`, taken as `max(κ_φ, κ_ψ)`.
    pub kappa: usize,
    /// `max{d·κ, 2n}`.
    pub lambda_phi: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefutationKind {
    Independence(IndependenceWitness),
    Cover(CoverViolation),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub formula: PartitionedFormula,
    pub kind: RefutationKind,
}

impl fmt::Display for Refutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            RefutationKind::Independence(w) => write!(f, "{} has the {}-independence property", self.formula.name, w.k()),
            RefutationKind::Cover(c) => write!(f, "{} has the {}-cover property (family of {})", self.formula.name, c.d, c.n()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Goodness {
    Good(GoodnessContext),
    Refuted(Refutation),
}

/// Is `M` `(φ, n, d)`-good? Checks independence and cover for `φ, ψ, ¬φ, ¬ψ`,
/// then computes `κ` and `λ_φ(M)`.
pub fn is_good(m: &Structure, phi: &PartitionedFormula, n: usize, d: usize, opts: &GoodOptions) -> Result<Goodness> {
    let mut budget = Budget::new(opts.budget);
    for theta in delta_of(phi) {
        if let Some(w) = find_k_independence(m, &theta, n, &mut budget)?.decided()? {
            return Ok(Goodness::Refuted(Refutation { formula: theta, kind: RefutationKind::Independence(w) }));
        }
        let n_pars = TupleSpace::new(m.size(), theta.s()).len();
        let n_max = opts.cover_n_max.unwrap_or(n_pars).min(n_pars);
        if n_max >= d {
            if let Some(c) = find_cover_violation(m, &theta, d, n_max, None, &mut budget)?.decided()? {
                return Ok(Goodness::Refuted(Refutation { formula: theta, kind: RefutationKind::Cover(c) }));
            }
        }
    }
    let kappa_phi = kappa(m, core::slice::from_ref(phi), n, opts.max_len)?.kappa;
    let kappa_psi = kappa(m, &[phi.swap_blocks()], n, opts.max_len)?.kappa;
    let kappa = kappa_phi.max(kappa_psi);
    Ok(Goodness::Good(GoodnessContext { phi: phi.clone(), n, d, kappa_phi, kappa_psi, kappa, lambda_phi: (d * kappa).max(2 * n) }))
}

/// A universe subset of an ambient structure with its induced structure.
#[derive(Clone, Debug)]
pub struct Submodel {
    verts: Vec<Elem>,
    st: Structure,
}

impl Submodel {
    pub fn new(ambient: &Structure, verts: &[Elem]) -> Result<Self> {
        let mut v = verts.to_vec();
        v.sort_unstable();
        v.dedup();
        let st = ambient.induced(&v)?;
        Ok(Submodel { verts: v, st })
    }

    pub fn verts(&self) -> &[Elem] {
        &self.verts
    }

    pub fn structure(&self) -> &Structure {
        &self.st
    }

    fn local(&self, t: &[Elem]) -> Option<Tuple> {
        t.iter().map(|e| self.verts.binary_search(e).ok().map(|i| i as Elem)).collect()
    }

    fn ambient(&self, t: &[Elem]) -> Tuple {
        t.iter().map(|&i| self.verts[i as usize]).collect()
    }

    fn contains(&self, elems: &[Elem]) -> bool {
        elems.iter().all(|e| self.verts.binary_search(e).is_ok())
    }
}

/// Parameters shared by a class `K`: the formula, the common set `A`, the
/// saturation width `k`, `n`, `d` and the class `κ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassContext {
    pub phi: PartitionedFormula,
    pub a_set: Vec<Elem>,
    pub k: usize,
    pub n: usize,
    pub d: usize,
    pub kappa: usize,
    /// Require indiscernibility over `A` instead of `∅` in condition (3).
    pub strict: bool,
    /// Check the conditions for all of `φ, ψ, ¬φ, ¬ψ` instead of `φ` alone.
    pub delta: bool,
    pub max_len: usize,
}

impl ClassContext {
    pub fn formulas(&self) -> Vec<PartitionedFormula> {
        if self.delta {
            delta_of(&self.phi)
        } else {
            vec![self.phi.clone()]
        }
    }

    /// Longest parameter block among the formulas.
    pub fn s(&self) -> usize {
        self.formulas().iter().map(|f| f.s()).max().unwrap_or(0)
    }

    /// `λ(K) = κ · |A|^s`.
    pub fn lambda(&self) -> Result<usize> {
        (self.a_set.len())
            .checked_pow(self.s() as u32)
            .and_then(|p| p.checked_mul(self.kappa))
            .ok_or_else(|| Error::TooLarge("λ(K)".into()))
    }

    /// Context for the class of the given members: checks that each is good
    /// and contains `A`, and takes `κ` as the largest member value.
    #[allow(clippy::too_many_arguments)]
    pub fn for_class(
        ambient: &Structure,
        members: &[(&str, &[Elem])],
        phi: &PartitionedFormula,
        a_set: &[Elem],
        k: usize,
        n: usize,
        d: usize,
        delta: bool,
        opts: &GoodOptions,
    ) -> Result<ClassContext> {
        let mut kappa = 1;
        for (name, verts) in members {
            let sub = Submodel::new(ambient, verts)?;
            if !sub.contains(a_set) {
                return Err(Error::Precondition(format!("{name} does not contain A")));
            }
            match is_good(sub.structure(), phi, n, d, opts)? {
                Goodness::Good(g) => kappa = kappa.max(g.kappa),
                Goodness::Refuted(r) => return Err(Error::Precondition(format!("{name} is not good: {r}"))),
            }
        }
        let mut a = a_set.to_vec();
        a.sort_unstable();
        a.dedup();
        Ok(ClassContext { phi: phi.clone(), a_set: a, k, n, d, kappa, strict: false, delta, max_len: opts.max_len })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PrecCondition {
    Subset,
    Agreement,
    Saturation,
    Averages,
}

impl fmt::Display for PrecCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrecCondition::Subset => "subset",
            PrecCondition::Agreement => "(1) agreement",
            PrecCondition::Saturation => "(2) saturation",
            PrecCondition::Averages => "(3) averages",
        })
    }
}

/// The first failure of a condition: the formula (index into
/// [`ClassContext::formulas`]) and the tuples involved, in ambient labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecFailure {
    pub condition: PrecCondition,
    pub formula: usize,
    pub tuples: Vec<Tuple>,
}

/// A sequence in `N` whose average is the type of `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AverageWitness {
    pub formula: usize,
    pub a: Tuple,
    pub sequence: Vec<Tuple>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecReport {
    pub holds: bool,
    pub subset: bool,
    pub agreement: bool,
    pub saturation: bool,
    pub averages: bool,
    pub lambda: usize,
    pub failures: Vec<PrecFailure>,
    pub witnesses: Vec<AverageWitness>,
}

/// `N ≺_K M` for universe subsets of `ambient`, checking goodness of both.
pub fn prec_k(ambient: &Structure, n_verts: &[Elem], m_verts: &[Elem], ctx: &ClassContext) -> Result<PrecReport> {
    let opts = GoodOptions { max_len: ctx.max_len, ..GoodOptions::default() };
    for (name, verts) in [("N", n_verts), ("M", m_verts)] {
        let sub = Submodel::new(ambient, verts)?;
        match is_good(sub.structure(), &ctx.phi, ctx.n, ctx.d, &opts)? {
            Goodness::Good(g) if g.kappa > ctx.kappa => {
                return Err(Error::Precondition(format!("κ of {name} is {} but the class κ is {}", g.kappa, ctx.kappa)))
            }
            Goodness::Good(_) => {}
            Goodness::Refuted(r) => return Err(Error::Precondition(format!("{name} is not good: {r}"))),
        }
    }
    prec_k_trusted(ambient, n_verts, m_verts, ctx)
}

/// [`prec_k`] without the goodness checks; the caller vouches that both
/// structures are good with `κ` at most the class value.
pub fn prec_k_trusted(ambient: &Structure, n_verts: &[Elem], m_verts: &[Elem], ctx: &ClassContext) -> Result<PrecReport> {
    let nm = Submodel::new(ambient, n_verts)?;
    let mm = Submodel::new(ambient, m_verts)?;
    let lambda = ctx.lambda()?;
    let mut rep = PrecReport {
        holds: false,
        subset: mm.contains(nm.verts()),
        agreement: true,
        saturation: true,
        averages: true,
        lambda,
        failures: Vec::new(),
        witnesses: Vec::new(),
    };
    if !rep.subset {
        let extra: Vec<Elem> = nm.verts().iter().copied().filter(|e| !mm.contains(&[*e])).collect();
        rep.agreement = false;
        rep.saturation = false;
        rep.averages = false;
        rep.failures.push(PrecFailure { condition: PrecCondition::Subset, formula: 0, tuples: vec![extra] });
        return Ok(rep);
    }
    if !nm.contains(&ctx.a_set) {
        return Err(Error::Precondition("A is not contained in N".into()));
    }
    let mut budget = Budget::new(SEQUENCE_CAP);
    for (fi, theta) in ctx.formulas().iter().enumerate() {
        let params = tuples_over(&ctx.a_set, theta.s());
        let mat_n = PhiMatrix::new(nm.structure(), theta)?;
        let mat_m = PhiMatrix::new(mm.structure(), theta)?;
        let pars_n: Vec<usize> = params.iter().map(|p| mat_n.par_index(&nm.local(p).expect("A ⊆ N"))).collect::<Result<_>>()?;
        let pars_m: Vec<usize> = params.iter().map(|p| mat_m.par_index(&mm.local(p).expect("A ⊆ M"))).collect::<Result<_>>()?;
        // rows of M that lie in N
        let n_rows: Vec<usize> = (0..mat_n.n_objs())
            .map(|o| mat_m.obj_index(&mm.local(&nm.ambient(&mat_n.obj_tuple(o))).expect("N ⊆ M")))
            .collect::<Result<_>>()?;

        // (1)
        'agree: for (o, &om) in n_rows.iter().enumerate() {
            for (j, (&pn, &pm)) in pars_n.iter().zip(&pars_m).enumerate() {
                if mat_n.get(o, pn) != mat_m.get(om, pm) {
                    rep.agreement = false;
                    rep.failures.push(PrecFailure { condition: PrecCondition::Agreement, formula: fi, tuples: vec![nm.ambient(&mat_n.obj_tuple(o)), params[j].clone()] });
                    break 'agree;
                }
            }
        }

        // (2): sets of fewer than k parameters are covered by repetition
        let mut in_n = Bits::new(mat_m.n_objs());
        for &om in &n_rows {
            in_n.set(om, true);
        }
        let mut sat_fail = None;
        for size in 0..=ctx.k.min(params.len()) {
            for_each_combination(params.len(), size, |c| {
                let mut common = Bits::full(mat_m.n_objs());
                for &j in c {
                    common.and_assign(mat_m.col(pars_m[j]));
                }
                if !common.none() && !common.intersects(&in_n) {
                    sat_fail = Some(c.iter().map(|&j| params[j].clone()).collect::<Vec<_>>());
                    return false;
                }
                true
            });
            if sat_fail.is_some() {
                break;
            }
        }
        if let Some(t) = sat_fail {
            rep.saturation = false;
            rep.failures.push(PrecFailure { condition: PrecCondition::Saturation, formula: fi, tuples: t });
        }

        // (3)
        let avs = achievable_averages(&nm, &mm, theta, &params, ctx.kappa, ctx.n, lambda, ctx.strict, &mut budget)?;
        for om in 0..mat_m.n_objs() {
            let pattern: Vec<bool> = pars_m.iter().map(|&p| mat_m.get(om, p)).collect();
            let a = mm.ambient(&mat_m.obj_tuple(om));
            match avs.get(&pattern) {
                Some(seq) => rep.witnesses.push(AverageWitness { formula: fi, a, sequence: seq.clone() }),
                None => {
                    if rep.averages {
                        rep.failures.push(PrecFailure { condition: PrecCondition::Averages, formula: fi, tuples: vec![a] });
                    }
                    rep.averages = false;
                }
            }
        }
    }
    rep.holds = rep.agreement && rep.saturation && rep.averages;
    Ok(rep)
}

/// Complete average patterns over `params` of sequences of `θ`-objects in
/// `seq_in`, counted in `count_in`, each with a witnessing sequence. The
/// sequences are `({θ^swap}*_n, n)`-indiscernible in `seq_in` (over the
/// parameters when `strict`), of distinct tuples with length in
/// `λ..=λ+2`, or constant of length `max(λ, 1)`.
#[allow(clippy::too_many_arguments)]
fn achievable_averages(
    seq_in: &Submodel,
    count_in: &Submodel,
    theta: &PartitionedFormula,
    params: &[Tuple],
    kappa: usize,
    n: usize,
    lambda: usize,
    strict: bool,
    budget: &mut Budget,
) -> Result<BTreeMap<Vec<bool>, Vec<Tuple>>> {
    let seq_mat = PhiMatrix::new(seq_in.structure(), theta)?.transpose();
    let cnt = PhiMatrix::new(count_in.structure(), theta)?;
    let extra: Vec<(usize, usize)> = if strict {
        params.iter().map(|p| Ok((0, seq_mat.obj_index(&seq_in.local(p).ok_or_else(|| Error::Precondition("A ⊄ N".into()))?)?))).collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let pcols: Vec<usize> = params
        .iter()
        .map(|p| cnt.par_index(&count_in.local(p).ok_or_else(|| Error::Precondition("parameters outside the counting structure".into()))?))
        .collect::<Result<_>>()?;
    let n_cols = seq_mat.n_pars();
    let to_cnt: Vec<usize> = (0..n_cols)
        .map(|c| {
            let t = count_in.local(&seq_in.ambient(&seq_mat.par_tuple(c))).ok_or_else(|| Error::Precondition("sequence structure not inside the counting structure".into()))?;
            cnt.obj_index(&t)
        })
        .collect::<Result<_>>()?;
    let mut out: BTreeMap<Vec<bool>, Vec<Tuple>> = BTreeMap::new();
    let min_len = lambda.max(1);
    if min_len >= kappa {
        for (c, &row) in to_cnt.iter().enumerate() {
            let pattern: Vec<bool> = pcols.iter().map(|&p| cnt.get(row, p)).collect();
            out.entry(pattern).or_insert_with(|| vec![seq_in.ambient(&seq_mat.par_tuple(c)); min_len]);
        }
    }
    let index = StarIndex::new(vec![&seq_mat], extra, n)?;
    index.for_each_sequence(n_cols, min_len, lambda + 2, budget, &mut |seq| {
        let mut pattern = Vec::with_capacity(pcols.len());
        for &p in &pcols {
            let pos = seq.iter().filter(|&&c| cnt.get(to_cnt[c], p)).count();
            let (yes, no) = (pos >= kappa, seq.len() - pos >= kappa);
            if yes == no {
                return;
            }
            pattern.push(yes);
        }
        out.entry(pattern).or_insert_with(|| seq.iter().map(|&c| seq_in.ambient(&seq_mat.par_tuple(c))).collect());
    })?;
    Ok(out)
}

/// `M_0, M_1, M_2` inside the ambient structure `M`, with the class
/// parameters.
#[derive(Clone, Debug)]
pub struct AmalgamConfig {
    pub ambient: Structure,
    pub m0: Vec<Elem>,
    pub m1: Vec<Elem>,
    pub m2: Vec<Elem>,
    pub phi: PartitionedFormula,
    pub a_set: Vec<Elem>,
    pub k: usize,
    pub n: usize,
    pub d: usize,
    /// Require the property for `ψ` as well as `φ`.
    pub delta: bool,
    pub options: GoodOptions,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamWitness {
    /// 0 for `φ`, 1 for `ψ`.
    pub formula: usize,
    pub c: Tuple,
    pub sequence: Vec<Tuple>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamReport {
    pub holds: bool,
    pub kappa: usize,
    pub lambda: usize,
    pub witnesses: Vec<AmalgamWitness>,
    /// Formula index and the element with no matching average.
    pub failure: Option<(usize, Tuple)>,
}

/// Is `(M_0, M_1, M_2)` in stable amalgamation inside `M`? Every `c ∈ M_2`
/// must have `tp(c, M_1, M)` equal to the average over `M_1` of an
/// indiscernible sequence in `M_0`. With `delta` the same is required for
/// `ψ`; the negations add nothing since averages are closed under negation.
pub fn stable_amalgam(cfg: &AmalgamConfig) -> Result<AmalgamReport> {
    let whole = cfg.ambient.elements();
    let members: [(&str, &[Elem]); 4] = [("M", &whole), ("M0", &cfg.m0), ("M1", &cfg.m1), ("M2", &cfg.m2)];
    let ctx = ClassContext::for_class(&cfg.ambient, &members, &cfg.phi, &cfg.a_set, cfg.k, cfg.n, cfg.d, cfg.delta, &cfg.options)?;
    let pairs: [(&str, &[Elem], &str, &[Elem]); 5] = [
        ("M0", &cfg.m0, "M", &whole),
        ("M1", &cfg.m1, "M", &whole),
        ("M2", &cfg.m2, "M", &whole),
        ("M0", &cfg.m0, "M1", &cfg.m1),
        ("M0", &cfg.m0, "M2", &cfg.m2),
    ];
    for (a, av, b, bv) in pairs {
        let rep = prec_k_trusted(&cfg.ambient, av, bv, &ctx)?;
        if !rep.holds {
            let why = rep.failures.first().map(|f| format!("{}", f.condition)).unwrap_or_default();
            return Err(Error::Precondition(format!("{a} ≺_K {b} fails at {why}")));
        }
    }
    let lambda = ctx.lambda()?;
    let m = Submodel::new(&cfg.ambient, &whole)?;
    let m0 = Submodel::new(&cfg.ambient, &cfg.m0)?;
    let m1 = Submodel::new(&cfg.ambient, &cfg.m1)?;
    let m2 = Submodel::new(&cfg.ambient, &cfg.m2)?;
    let thetas = if cfg.delta { vec![cfg.phi.clone(), cfg.phi.swap_blocks()] } else { vec![cfg.phi.clone()] };
    let mut budget = Budget::new(SEQUENCE_CAP);
    let mut rep = AmalgamReport { holds: true, kappa: ctx.kappa, lambda, witnesses: Vec::new(), failure: None };
    for (fi, theta) in thetas.iter().enumerate() {
        let params = tuples_over(m1.verts(), theta.s());
        let avs = achievable_averages(&m0, &m, theta, &params, ctx.kappa, ctx.n, lambda, false, &mut budget)?;
        let ev = crate::logic::Evaluator::new(m.structure(), theta)?;
        let local_params: Vec<Tuple> = params.iter().map(|p| m.local(p).expect("inside M")).collect();
        for c in tuples_over(m2.verts(), theta.r()) {
            let cl = m.local(&c).expect("inside M");
            let pattern: Vec<bool> = local_params.iter().map(|p| ev.holds(&cl, p)).collect();
            match avs.get(&pattern) {
                Some(seq) => rep.witnesses.push(AmalgamWitness { formula: fi, c, sequence: seq.clone() }),
                None => {
                    rep.holds = false;
                    rep.failure = Some((fi, c));
                    return Ok(rep);
                }
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymmetryReport {
    pub forward: bool,
    pub backward: bool,
    pub symmetric: bool,
}

/// Stable amalgamation for `φ` and `ψ` of `(M_0, M_1, M_2)` and of
/// `(M_0, M_2, M_1)`.
pub fn symmetry_test(cfg: &AmalgamConfig) -> Result<SymmetryReport> {
    let mut fwd = cfg.clone();
    fwd.delta = true;
    let mut bwd = fwd.clone();
    core::mem::swap(&mut bwd.m1, &mut bwd.m2);
    let forward = stable_amalgam(&fwd)?.holds;
    let backward = stable_amalgam(&bwd)?.holds;
    Ok(SymmetryReport { forward, backward, symmetric: forward == backward })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeReport {
    pub lambda: usize,
    pub kappa: usize,
    /// `#{i : #{c ∈ I_1 : φ[a^0_i; c]} ≥ κ}`.
    pub count_i: usize,
    /// `#{l : #{c ∈ I_0 : φ[c; a^1_l]} ≥ κ}`.
    pub count_ii: usize,
    pub i_holds: bool,
    pub ii_holds: bool,
    pub equivalent: bool,
}

/// The exchange of averages between a sequence `I_0` of `φ`-objects and a
/// sequence `I_1` of `φ`-parameters in a good structure: (i) all but fewer
/// than `κ_φ` members of `I_0` lie in the average of `I_1`, (ii) all but
/// fewer than `κ_ψ` members of `I_1` lie in the average of `I_0`. Both
/// averages use the threshold `κ = max(κ_φ, κ_ψ)`.
pub fn exchange_check(m: &Structure, good: &GoodnessContext, i0: &TupleSequence, i1: &TupleSequence) -> Result<ExchangeReport> {
    let phi = &good.phi;
    if i1.arity() != phi.s() {
        return Err(Error::ArityMismatch(format!("I1 has arity {} but {} has {} parameters", i1.arity(), phi.name, phi.s())));
    }
    let (kp, ks) = (good.kappa_phi, good.kappa_psi);
    let lambda = good.lambda_phi.max(kp + ks + kp * ks);
    if i0.len() <= lambda || i1.len() <= lambda {
        return Err(Error::Precondition(format!("sequences of lengths {} and {} must both exceed λ = {lambda}", i0.len(), i1.len())));
    }
    if let Some((a, b)) = check_object_sequence(m, phi, i0, good.n)? {
        return Err(Error::Precondition(format!("I0 is not indiscernible: selections {a:?} and {b:?} differ")));
    }
    if let Some((a, b)) = check_param_sequence(m, phi, i1, good.n)? {
        return Err(Error::Precondition(format!("I1 is not indiscernible: selections {a:?} and {b:?} differ")));
    }
    let ev = crate::logic::Evaluator::new(m, phi)?;
    let kappa = good.kappa;
    let count_i = i0.tuples().iter().filter(|a| i1.tuples().iter().filter(|c| ev.holds(a, c)).count() >= kappa).count();
    let count_ii = i1.tuples().iter().filter(|b| i0.tuples().iter().filter(|c| ev.holds(c, b)).count() >= kappa).count();
    let i_holds = count_i + kp >= i0.len();
    let ii_holds = count_ii + ks >= i1.len();
    Ok(ExchangeReport { lambda, kappa, count_i, count_ii, i_holds, ii_holds, equivalent: i_holds == ii_holds })
}

/// `true` when `ty` equals `tp_φ(a, params)` for some `a` in `m`.
pub fn is_realized(m: &Structure, phi: &PartitionedFormula, ty: &PhiType, params: &[Tuple]) -> Result<bool> {
    let ev = crate::logic::Evaluator::new(m, phi)?;
    for a in TupleSpace::new(m.size(), phi.r()).iter() {
        if params.iter().all(|p| {
            let v = ev.holds(&a, p);
            ty.contains(0, p, v) && !ty.contains(0, p, !v)
        }) {
            return Ok(true);
        }
    }
    Ok(false)
}
