//! Counting realized types, the polynomial bounds on type counts, their
//! supporting arithmetic, and the shattered-set finder.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::bits::Bits;
use crate::budget::{Budget, Search};
use crate::detect::{build_rho, independence_in, order_in};
use crate::error::{Error, Result};
use crate::logic::{Elem, PartitionedFormula, PhiMatrix, Structure, Tuple};
use crate::tuples::tuples_over;

/// Numbers with this many bits or fewer are materialized.
pub const MATERIALIZE_BITS: u64 = 1 << 20;

/// `|S_φ(A, M)|`: distinct sign patterns of object tuples over `params`.
pub fn count_phi_types(m: &Structure, phi: &PartitionedFormula, params: &[Tuple]) -> Result<usize> {
    let mat = PhiMatrix::new(m, phi)?;
    let idx: Vec<usize> = params.iter().map(|t| mat.par_index(t)).collect::<Result<_>>()?;
    Ok(type_patterns(&mat, &idx).len())
}

fn type_patterns(mat: &PhiMatrix, params: &[usize]) -> BTreeSet<Bits> {
    (0..mat.n_objs()).map(|o| mat.row(o).project(params)).collect()
}

/// An exact natural number, kept as `coefficient · base^exponent` when it is
/// too large to write out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundValue {
    Exact(BigUint),
    Power { coefficient: BigUint, base: BigUint, exponent: BigUint },
}

impl BoundValue {
    /// `coefficient · base^exponent`, materialized when small enough.
    pub fn power(coefficient: BigUint, base: BigUint, exponent: BigUint) -> BoundValue {
        if base.is_zero() || base.is_one() || exponent.is_zero() || coefficient.is_zero() {
            let v = if base.is_zero() && !exponent.is_zero() { BigUint::zero() } else { coefficient };
            return BoundValue::Exact(v);
        }
        let bits = base.bits();
        match exponent.to_u64() {
            Some(e) if e.saturating_mul(bits) <= MATERIALIZE_BITS => {
                BoundValue::Exact(coefficient * base.pow(e as u32))
            }
            _ => BoundValue::Power { coefficient, base, exponent },
        }
    }

    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            BoundValue::Exact(v) => Some(v),
            BoundValue::Power { .. } => None,
        }
    }

    /// Whether `value ≤ self`.
    pub fn at_least(&self, value: u128) -> bool {
        match self {
            BoundValue::Exact(v) => BigUint::from(value) <= *v,
            // symbolic values have more than 2^20 bits
            BoundValue::Power { .. } => true,
        }
    }

    /// Number of bits of the value, as an upper bound for symbolic values.
    pub fn bits_upper(&self) -> BigUint {
        match self {
            BoundValue::Exact(v) => BigUint::from(v.bits()),
            BoundValue::Power { coefficient, base, exponent } => {
                BigUint::from(coefficient.bits()) + BigUint::from(base.bits()) * exponent
            }
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Exact(v) => write!(f, "{v}"),
            BoundValue::Power { coefficient, base, exponent } => {
                if exponent.bits() > 64 {
                    write!(f, "{coefficient}*{base}^(2^{})", exponent.bits() - 1)?;
                    if !exponent.is_zero() && (exponent & (exponent - 1u32)).is_zero() {
                        Ok(())
                    } else {
                        write!(f, "+...")
                    }
                } else {
                    write!(f, "{coefficient}*{base}^{exponent}")
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    /// Number of realized types.
    pub lhs: usize,
    pub rhs: BoundValue,
    /// The `n` of the order bound or the `k` of the independence bound.
    pub n_or_k: usize,
    pub r: usize,
    pub s: usize,
    pub t: usize,
    pub a_size: usize,
    pub holds: bool,
    /// Whether the hypothesis of the bound was confirmed on the input.
    pub hypothesis_holds: bool,
    pub note: Option<String>,
}

fn params_over(a: &[Elem], s: usize) -> Result<Vec<Tuple>> {
    let set: BTreeSet<Elem> = a.iter().copied().collect();
    if set.len() < 2 {
        return Err(Error::InvalidArgument("requires |A| >= 2".into()));
    }
    Ok(tuples_over(&set.into_iter().collect::<Vec<_>>(), s))
}

/// `(3ns)^{t+1}`, the exponent of the order bound's `k = 2^{(3ns)^{t+1}}`.
pub fn order_bound_k_exponent(n: u64, s: u64, t: u64) -> BigUint {
    BigUint::from(3 * n * s).pow(t as u32 + 1)
}

/// `k = 2^{(3ns)^{t+1}}`.
pub fn order_bound_k(n: u64, s: u64, t: u64) -> Result<BigUint> {
    let e = order_bound_k_exponent(n, s, t);
    let e = e.to_u64().filter(|&e| e <= 1 << 26).ok_or_else(|| Error::TooLarge("exponent of k".into()))?;
    Ok(BigUint::one() << e as usize)
}

/// Checks the type-count bound for formulas whose `ρ` lacks the `n`-order
/// property: `|S_φ(A, M)| ≤ 2n |A|^k` with parameters `A^s`.
pub fn verify_order_bound(m: &Structure, phi: &PartitionedFormula, a: &[Elem], n: usize, budget: &mut Budget) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let (r, s) = (phi.r(), phi.s());
    let t = r.max(s);
    let params = params_over(a, s)?;
    let a_size = params_over(a, 1)?.len();
    let lhs = count_phi_types(m, phi, &params)?;
    let rho = build_rho(phi);
    let rmat = PhiMatrix::new(m, &rho)?;
    let (hypothesis_holds, note) = match order_in(&rmat, n, budget) {
        Search::Found(_) => (false, Some(format!("hypothesis fails: rho has the {n}-order property"))),
        Search::Exhausted => (true, None),
        Search::OutOfBudget => return Err(Error::BudgetExhausted),
    };
    let k = order_bound_k(n as u64, s as u64, t as u64)?;
    let rhs = BoundValue::power(BigUint::from(2 * n), BigUint::from(a_size), k);
    let holds = rhs.at_least(lhs as u128);
    Ok(BoundReport { lhs, rhs, n_or_k: n, r, s, t, a_size, holds, hypothesis_holds, note })
}

/// Checks `|S_φ(A, M)| ≤ |A|^{s(k-1)}` for formulas without the
/// `k`-independence property.
pub fn verify_independence_bound(m: &Structure, phi: &PartitionedFormula, a: &[Elem], k: usize, budget: &mut Budget) -> Result<BoundReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let (r, s) = (phi.r(), phi.s());
    let params = params_over(a, s)?;
    let a_size = params_over(a, 1)?.len();
    let mat = PhiMatrix::new(m, phi)?;
    let idx: Vec<usize> = params.iter().map(|t| mat.par_index(t)).collect::<Result<_>>()?;
    let lhs = type_patterns(&mat, &idx).len();
    let (hypothesis_holds, note) = match independence_in(&mat, k, budget) {
        Search::Found(_) => (false, Some(format!("hypothesis fails: {k}-independence present"))),
        Search::Exhausted => (true, None),
        Search::OutOfBudget => return Err(Error::BudgetExhausted),
    };
    let rhs = BoundValue::power(BigUint::one(), BigUint::from(a_size), BigUint::from(s * (k - 1)));
    let holds = rhs.at_least(lhs as u128);
    Ok(BoundReport { lhs, rhs, n_or_k: k, r, s, t: r.max(s), a_size, holds, hypothesis_holds, note })
}

/// Bounds `q/P ≤ log2(a) < (q+1)/P` with `q = bits(a^P) - 1`.
fn log2_floor_scaled(a: &BigUint, p: u32) -> BigUint {
    BigUint::from(a.pow(p).bits() - 1)
}

/// Exact comparison of `a^x` and `b^y` for `a, b ≥ 1`.
pub fn compare_powers(a: &BigUint, x: &BigUint, b: &BigUint, y: &BigUint) -> Result<Ordering> {
    let small = |base: &BigUint, e: &BigUint| e.to_u64().is_some_and(|e| e.saturating_mul(base.bits()) <= 1 << 16);
    if small(a, x) && small(b, y) {
        let l = a.pow(x.to_u32().expect("small"));
        let r = b.pow(y.to_u32().expect("small"));
        return Ok(l.cmp(&r));
    }
    if a.is_one() || x.is_zero() {
        return Ok(if b.is_one() || y.is_zero() { Ordering::Equal } else { Ordering::Less });
    }
    if b.is_one() || y.is_zero() {
        return Ok(Ordering::Greater);
    }
    let mut p = 1u32;
    while p <= 1 << 14 {
        let (qa, qb) = (log2_floor_scaled(a, p), log2_floor_scaled(b, p));
        // a^x ≥ 2^{x qa / p} and b^y < 2^{y (qb + 1) / p}
        if x * &qa >= y * (&qb + 1u32) {
            return Ok(Ordering::Greater);
        }
        if y * &qb >= x * (&qa + 1u32) {
            return Ok(Ordering::Less);
        }
        p *= 4;
    }
    Err(Error::TooLarge("powers too close to compare".into()))
}

/// `c = 2^{2 + (3ns)^t}` from the chain construction.
pub fn chain_constant_exponent(n: u64, s: u64, t: u64) -> BigUint {
    BigUint::from(3 * n * s).pow(t as u32) + 2u32
}

/// `e(i) = ((3ns)^i - 1) / (3ns - 1)`, the exponent of `c` in the chain size
/// bound `|A_i| ≤ c^{e(i)} m^{(3ns)^i}`.
pub fn chain_exponent(n: u64, s: u64, i: u32) -> BigUint {
    let b = BigUint::from(3 * n * s);
    (b.pow(i) - 1u32) / (b - 1u32)
}

/// The chain size bound `c^{e(i)} m^{(3ns)^i}` as `(log2 of the c part,
/// exponent of m)`.
pub fn chain_bound(n: u64, s: u64, t: u64, i: u32) -> (BigUint, BigUint) {
    (chain_exponent(n, s, i) * chain_constant_exponent(n, s, t), BigUint::from(3 * n * s).pow(i))
}

/// One step of the chain bound: from `|A_i| ≤ X` and
/// `|A_{i+1}| ≤ |A_i| + 2^{1+(3ns)^t} |A_i|^{3ns} ≤ c |A_i|^{3ns}`, the next
/// bound is `c · X^{3ns}`, i.e. `e(i+1) = 1 + 3ns · e(i)`.
pub fn chain_step_consistent(n: u64, s: u64, t: u64, i: u32) -> bool {
    let (c_i, m_i) = chain_bound(n, s, t, i);
    let (c_n, m_n) = chain_bound(n, s, t, i + 1);
    let step = BigUint::from(3 * n * s);
    let ce = chain_constant_exponent(n, s, t);
    // c ≥ 1 + 2^{1 + (3ns)^t}: log2 c exceeds 1 + (3ns)^t
    let c_dominates = ce > BigUint::from(3 * n * s).pow(t as u32) + 1u32;
    c_dominates && c_n == &ce + &c_i * &step && m_n == m_i * step
}

/// Both sides of the final counting inequality of the chain argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claim2Report {
    pub n: u64,
    pub s: u64,
    pub t: u64,
    pub m: u64,
    /// `k - (3ns)^{2n}`, the exponent of `m` on the left.
    pub lhs_exponent: BigUint,
    /// `c^s + (3ns)^{2n} (2 + (3ns)^t)`, the base-2 logarithm of the right.
    pub rhs_log2: BigUint,
    /// `m^{k-(3ns)^{2n}} > 2^{c^s} c^{(3ns)^{2n}}`.
    pub holds: bool,
    /// `k > (c^s + (3ns)^{2n}(2+(3ns)^t)) + (3ns)^{2n}`.
    pub reading_closed: bool,
    /// `k > (c^s + (3ns)^{2n})(2+(3ns)^t) + (3ns)^{2n}`.
    pub reading_product: bool,
}

pub fn claim2(n: u64, s: u64, t: u64, m: u64) -> Result<Claim2Report> {
    if n == 0 || s == 0 || t == 0 || m < 2 {
        return Err(Error::InvalidArgument("need n, s, t >= 1 and m >= 2".into()));
    }
    let k = order_bound_k(n, s, t)?;
    let base = BigUint::from(3 * n * s);
    let q = base.pow(2 * n as u32);
    let ce = chain_constant_exponent(n, s, t);
    let c_s_log = &ce * s;
    let c_s = BigUint::one() << c_s_log.to_usize().ok_or_else(|| Error::TooLarge("c^s".into()))?;
    let lhs_exponent = if k >= q { &k - &q } else { BigUint::zero() };
    let rhs_log2 = &c_s + &q * &ce;
    let holds = compare_powers(&BigUint::from(m), &lhs_exponent, &BigUint::from(2u32), &rhs_log2)? == Ordering::Greater;
    let reading_closed = k > &rhs_log2 + &q;
    let reading_product = k > (&c_s + &q) * &ce + &q;
    Ok(Claim2Report { n, s, t, m, lhs_exponent, rhs_log2, holds, reading_closed, reading_product })
}

/// A family of subsets of `{0..ground}`, stored as bit masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    ground: usize,
    members: Vec<u64>,
}

impl SetFamily {
    pub fn new(ground: usize, members: Vec<u64>) -> Result<Self> {
        if ground > 64 {
            return Err(Error::TooLarge("ground sets beyond 64 elements".into()));
        }
        let mask = if ground == 64 { !0 } else { (1u64 << ground) - 1 };
        if members.iter().any(|&m| m & !mask != 0) {
            return Err(Error::ElementOutOfRange { elem: ground as u64, size: ground });
        }
        Ok(SetFamily { ground, members })
    }

    pub fn from_sets(ground: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let mut members = Vec::new();
        for s in sets {
            let mut m = 0u64;
            for &e in s {
                if e >= ground {
                    return Err(Error::ElementOutOfRange { elem: e as u64, size: ground });
                }
                m |= 1 << e;
            }
            members.push(m);
        }
        SetFamily::new(ground, members)
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    /// Number of distinct members.
    pub fn distinct(&self) -> usize {
        self.members.iter().collect::<BTreeSet<_>>().len()
    }
}

/// `α_0 < ... < α_{k-1}` and, for each `w` (bit mask over positions), the
/// index of the first member `A_w` with `α_i ∈ A_w ⟺ i ∈ w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShatterWitness {
    pub alphas: Vec<usize>,
    pub selectors: BTreeMap<u64, usize>,
}

impl ShatterWitness {
    pub fn verify(&self, family: &SetFamily) -> bool {
        let k = self.alphas.len();
        self.selectors.len() == 1 << k
            && self.selectors.iter().all(|(&w, &j)| {
                j < family.members.len()
                    && self.alphas.iter().enumerate().all(|(i, &a)| (family.members[j] >> a & 1 == 1) == (w >> i & 1 == 1))
            })
    }
}

/// First shattered `k`-subset in lexicographic order. Subsets of shattered
/// sets are shattered, so prefixes whose traces do not fill `2^t` patterns are
/// cut.
pub fn find_shattered(family: &SetFamily, k: usize) -> Result<Option<ShatterWitness>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if k > 24 || (family.distinct() as u128) < 1u128 << k {
        return Ok(None);
    }
    let mut alphas = Vec::new();
    Ok(shatter_dfs(family, k, 0, &mut alphas).then(|| {
        let mut selectors = BTreeMap::new();
        for (j, &m) in family.members.iter().enumerate() {
            selectors.entry(trace(m, &alphas)).or_insert(j);
        }
        ShatterWitness { alphas, selectors }
    }))
}

fn trace(m: u64, alphas: &[usize]) -> u64 {
    alphas.iter().enumerate().fold(0, |acc, (i, &a)| acc | (m >> a & 1) << i)
}

fn shatter_dfs(family: &SetFamily, k: usize, from: usize, alphas: &mut Vec<usize>) -> bool {
    if alphas.len() == k {
        return true;
    }
    for a in from..family.ground {
        if family.ground - a < k - alphas.len() {
            break;
        }
        alphas.push(a);
        let mut seen = vec![false; 1 << alphas.len()];
        let mut count = 0;
        for &m in &family.members {
            let t = trace(m, alphas) as usize;
            if !seen[t] {
                seen[t] = true;
                count += 1;
            }
        }
        if count == seen.len() && shatter_dfs(family, k, a + 1, alphas) {
            return true;
        }
        alphas.pop();
    }
    false
}

/// The family of parameter sets satisfied by the realized types over
/// `params`, as subsets of positions in `params`.
pub fn type_family(m: &Structure, phi: &PartitionedFormula, params: &[Tuple]) -> Result<SetFamily> {
    let mat = PhiMatrix::new(m, phi)?;
    let idx: Vec<usize> = params.iter().map(|t| mat.par_index(t)).collect::<Result<_>>()?;
    let pats = type_patterns(&mat, &idx);
    let members = pats.iter().map(|b| b.iter().fold(0u64, |acc, i| acc | 1 << i)).collect();
    SetFamily::new(idx.len(), members)
}
