//! One line per acceptance criterion. Criteria in `EXPECTED_RED` are
//! implemented as stated and fail; the target checks that every criterion
//! lands where expected, so a red criterion turning green is flagged too.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use fmlab::cli::run;
use fmlab_core::classify::{average_type, check_object_sequence, exchange_check, is_complete_over, is_good, is_realized, kappa, symmetry_test, GoodOptions, Goodness};
use fmlab_core::counting::{find_shattered, verify_independence_bound, SetFamily};
use fmlab_core::detect::{find_k_independence, find_n_order};
use fmlab_core::indiscernible::{check_indiscernible, extract_end_indiscernible, extract_indiscernible, g_func, BoundParams, Extraction, GrowthFn, Mode};
use fmlab_core::ramsey::{
    bound_compare, coupon_q, coupon_q_stirling, exact_independence_probability, extract_homogeneous, has_independence, homogeneity, lambda_nk, thmg1_n,
    Homogeneous, RGraph,
};
use fmlab_core::{Budget, Elem, Formula, PartitionedFormula, Structure, Tuple, TupleSequence, Var};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand_core::RngCore;

const EXPECTED_RED: &[u32] = &[3, 5, 6, 7, 10];

/// Writes past the test harness's output capture, so the lines show up in
/// a plain `cargo test` run.
fn say(line: String) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn edge() -> PartitionedFormula {
    PartitionedFormula::binary("phi", "R")
}

/// `R(x0, x1)` with no parameters.
fn pair() -> PartitionedFormula {
    PartitionedFormula::new("pair", vec![Var::X(0), Var::X(1)], vec![], Formula::atom("R", &[Var::X(0), Var::X(1)])).unwrap()
}

/// `R(x0, x1) & R(x1, y0)`.
fn pair_over() -> PartitionedFormula {
    let (x0, x1, y0) = (Var::X(0), Var::X(1), Var::Y(0));
    PartitionedFormula::new("pair_over", vec![x0, x1], vec![y0], Formula::atom("R", &[x0, x1]).and(Formula::atom("R", &[x1, y0]))).unwrap()
}

fn singletons(e: &[Elem]) -> Vec<Tuple> {
    e.iter().map(|&x| vec![x]).collect()
}

fn binom_sum(n: usize, k: usize) -> usize {
    (0..k).map(|i| common::subsets(n, i).len()).sum()
}

fn c1() -> Verdict {
    let mut bad = Vec::new();
    for n in 0..=30u64 {
        for m in 1..=10u64 {
            if coupon_q(n, m) != coupon_q_stirling(n, m) {
                bad.push((n, m));
            }
        }
    }
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let three_q = BigRational::new(BigInt::from(3), BigInt::from(4));
    // enumeration oracle: 2 of 4 and 6 of 8 placements fill both boxes
    let ok = bad.is_empty() && coupon_q(2, 2) == half && coupon_q(3, 2) == three_q;
    verdict(ok, format!("330 (n,m) pairs, {} disagreements; q(2,2)={}, q(3,2)={}", bad.len(), coupon_q(2, 2), coupon_q(3, 2)))
}

fn c2() -> Verdict {
    let mut worst: (f64, u64, u64) = (0.0, 0, 0);
    for k in 1..=5u64 {
        let m = 1u64 << k;
        for mult in 4..=8 {
            let n = k + mult * m;
            let q = coupon_q(n - k, m).to_f64().unwrap();
            let gap = (q - (-lambda_nk(n, k)).exp()).abs();
            if gap > worst.0 {
                worst = (gap, n, k);
            }
        }
    }
    verdict(worst.0 < 0.05, format!("max |q(n-k,2^k) - e^-λ| = {:.4} at n={}, k={}", worst.0, worst.1, worst.2))
}

fn c3() -> Verdict {
    let ks = [2, 3, 4, 5, 6];
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let recs = fmlab::mc::thmg1_trend(&ks, 2000, 1, threads).unwrap();
    let trend = fmlab_core::ramsey::nonincreasing_within(&recs, 3.0);
    let exact = exact_independence_probability(thmg1_n(2) as usize, 2).unwrap().to_f64().unwrap();
    let r2 = &recs[0];
    let matches = (r2.estimate - exact).abs() <= 3.0 * r2.stderr;
    let row: Vec<String> = recs.iter().map(|r| format!("k={} n={} p̂={:.3}±{:.3}", r.k, r.n, r.estimate, r.stderr)).collect();
    verdict(trend && matches, format!("{}; k=2 exact {exact:.4} ({}); trend {}", row.join(", "), if matches { "agrees" } else { "disagrees" }, if trend { "nonincreasing" } else { "rises" }))
}

fn shatter_ok(family: &SetFamily, k: usize) -> bool {
    if family.distinct() <= binom_sum(family.ground(), k) {
        return true;
    }
    find_shattered(family, k).unwrap().is_some_and(|w| w.verify(family))
}

fn c4() -> Verdict {
    let mut fails = 0;
    let mut checked = 0;
    for ground in 1..=4usize {
        let subsets = 1u64 << ground;
        for fam in 1..(1u64 << subsets) {
            let members: Vec<u64> = (0..subsets).filter(|s| fam >> s & 1 == 1).collect();
            let family = SetFamily::new(ground, members).unwrap();
            for k in 1..=ground {
                checked += 1;
                fails += usize::from(!shatter_ok(&family, k));
            }
        }
    }
    let mut rng = common::rng(4);
    for _ in 0..1000 {
        let ground = 1 + (rng.next_u32() % 12) as usize;
        let k = 1 + (rng.next_u32() as usize % ground.min(5));
        let want = (binom_sum(ground, k) + 1 + (rng.next_u32() % 40) as usize).min(1 << ground);
        let mut members = BTreeSet::new();
        while members.len() < want {
            members.insert(rng.next_u64() & ((1u64 << ground) - 1));
        }
        let family = SetFamily::new(ground, members.into_iter().collect()).unwrap();
        checked += 1;
        fails += usize::from(!shatter_ok(&family, k));
    }
    verdict(fails == 0, format!("{checked} (family, k) cases, {fails} failures"))
}

fn c5() -> Verdict {
    let mut checked = 0;
    let mut violations = 0;
    let mut first = None;
    let mut check = |m: &Structure, label: &str| {
        let all = m.elements();
        for k in 1..=3 {
            if find_k_independence(m, &edge(), k, &mut Budget::default()).unwrap().is_found() {
                continue;
            }
            for size in 2..=all.len() {
                for sub in common::subsets(all.len(), size) {
                    let a: Vec<Elem> = sub.iter().map(|&i| all[i]).collect();
                    let rep = verify_independence_bound(m, &edge(), &a, k, &mut Budget::default()).unwrap();
                    checked += 1;
                    if rep.hypothesis_holds && !rep.holds {
                        violations += 1;
                        first.get_or_insert_with(|| format!("{label}, k={k}, A={a:?}: {} types > {}", rep.lhs, rep.rhs));
                    }
                }
            }
        }
    };
    for n in 2..=5 {
        for mask in 0..(1u64 << common::pairs(n)) {
            check(&common::graph(n, mask), &format!("graph {mask} on {n}"));
        }
    }
    let mut rng = common::rng(5);
    for i in 0..100 {
        check(&common::random_graph(8, &mut rng), &format!("seeded 8-vertex graph {i}"));
    }
    verdict(violations == 0, format!("{checked} (graph, k, A) cases, {violations} violations; first: {}", first.unwrap_or_else(|| "none".into())))
}

fn c6() -> Verdict {
    let mut rng = common::rng(6);
    let (mut unsound, mut insufficient, mut applicable, mut skipped, mut extracted) = (0, 0, 0, 0, 0);
    let mut first = None;
    for seed in 0..200u64 {
        let m = 1 + (seed % 2) as usize;
        let k = 2 + (seed / 2 % 3) as usize;
        let alpha = (seed / 6 % 3) as usize;
        let params = BoundParams { growth: GrowthFn::WorstCase { m: 1 }, alpha: alpha as u64, r: 1, m: m as u64, k: k as u64 };
        let g = g_func(&params, m as u64, k as u64 - 1).ok().and_then(|v| v.to_usize()).filter(|&v| v <= 10_000);
        let size = g.unwrap_or(8).clamp(alpha.max(3), 48);
        let st = common::random_digraph(size, true, &mut rng);
        let a: Vec<Elem> = (0..alpha as Elem).collect();
        let phi = if m == 1 { edge() } else { pair_over() };
        let len = g.unwrap_or(8 + (seed % 5) as usize);
        let elems: Vec<Elem> = if len <= size {
            let mut v: Vec<Elem> = (0..size as Elem).collect();
            for i in (1..v.len()).rev() {
                v.swap(i, (rng.next_u32() as usize) % (i + 1));
            }
            v.truncate(len);
            v
        } else {
            (0..len).map(|_| rng.next_u32() % size as Elem).collect()
        };
        let seq = TupleSequence::of_elements(&elems);
        if let Extraction::Success { sequence, .. } = extract_end_indiscernible(&seq, &phi, m, &a, &st, k).unwrap() {
            if sequence.len() >= m && !check_indiscernible(&sequence, std::slice::from_ref(&phi), m, &a, &st, Mode::End).unwrap().verified {
                unsound += 1;
            }
        }
        let out = if len >= m { Some(extract_indiscernible(&seq, &phi, m, &a, &st, k).unwrap()) } else { None };
        if let Some(Extraction::Success { sequence, .. }) = &out {
            extracted += 1;
            if sequence.len() < k || !common::is_indiscernible_seq(&st, &phi, sequence.tuples(), m, &a) {
                unsound += 1;
            }
        }
        match g {
            None => skipped += 1,
            Some(g) => {
                applicable += 1;
                if !matches!(out, Some(Extraction::Success { .. })) {
                    insufficient += 1;
                    first.get_or_insert(format!("m={m}, k={k}, |A|={alpha}: g_m(k-1)={g}"));
                }
            }
        }
    }
    verdict(
        unsound == 0 && insufficient == 0,
        format!(
            "{extracted} extractions, {unsound} unsound; sufficiency: {applicable} runs at length g_m(k-1), {insufficient} failures (first: {}), {skipped} with g undefined or > 10^4",
            first.unwrap_or_else(|| "none".into())
        ),
    )
}

/// Counterexamples to: no `n`-order ⇒ every `(φ,2)`-indiscernible sequence
/// of length `n+1` is a set.
fn thm6_counterexamples(m: &Structure, n: usize) -> usize {
    if find_n_order(m, &edge(), n, &mut Budget::default()).unwrap().is_found() {
        return 0;
    }
    let mut bad = 0;
    for arr in common::arrangements(m.size(), n + 1) {
        let seq = TupleSequence::of_elements(&arr.iter().map(|&i| i as Elem).collect::<Vec<_>>());
        let check = |mode| check_indiscernible(&seq, &[pair()], 2, &[], m, mode).unwrap().verified;
        if check(Mode::Sequence) && !check(Mode::Set) {
            bad += 1;
        }
    }
    bad
}

fn c7() -> Verdict {
    let mut by_n = [0usize; 2];
    let mut structures = 0;
    for size in 1..=4 {
        for mask in 0..(1u64 << (size * size)) {
            let m = common::digraph(size, mask, true);
            structures += 1;
            for n in [2, 3] {
                by_n[n - 2] += thm6_counterexamples(&m, n);
            }
        }
    }
    let mut rng = common::rng(7);
    for i in 0..400 {
        let m = common::random_digraph(5 + i % 2, common::coin(&mut rng), &mut rng);
        structures += 1;
        for n in [2, 3] {
            by_n[n - 2] += thm6_counterexamples(&m, n);
        }
    }
    verdict(
        by_n == [0, 0],
        format!(
            "{structures} structures (all binary relations on ≤ 4 elements, 400 seeded on 5-6; exhaustive 6-element enumeration is 2^36 relations); counterexamples n=2: {}, n=3: {}",
            by_n[0], by_n[1]
        ),
    )
}

/// Random linear 3-graph: no two edges share a pair, which is exactly
/// the absence of the 2-independence property for `R(x0; y0, y1)`.
fn c8_graph(seed: u64) -> RGraph {
    let mut rng = common::rng(800 + seed);
    let n = 30 + (rng.next_u32() % 11) as usize;
    let target = n / 2 + (rng.next_u32() as usize % (n * (n - 1) / 6 - n / 2));
    let mut pairs = BTreeSet::new();
    let mut edges: Vec<Tuple> = Vec::new();
    for _ in 0..50 * target {
        if edges.len() >= target {
            break;
        }
        let mut t: Vec<Elem> = (0..3).map(|_| rng.next_u32() % n as Elem).collect();
        t.sort_unstable();
        if t[0] == t[1] || t[1] == t[2] {
            continue;
        }
        let ps = [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])];
        if ps.iter().all(|p| !pairs.contains(p)) {
            pairs.extend(ps);
            edges.push(t);
        }
    }
    RGraph::new(n, 3, edges).unwrap()
}

fn c8() -> Verdict {
    let (mut kept, mut verified, mut wrong) = (0, 0, 0);
    for seed in 0..100 {
        let g = c8_graph(seed);
        if has_independence(&g, 2, &mut Budget::unlimited()).unwrap() {
            continue;
        }
        kept += 1;
        // any three vertices form a homogeneous triple
        let exists = g.n() >= 3;
        match extract_homogeneous(&g, 3, Some(2)).unwrap() {
            Homogeneous::Found { vertices, complete } if vertices.len() >= 3 && homogeneity(&g, &vertices) == Some(complete) => verified += 1,
            Homogeneous::Found { .. } => wrong += 1,
            Homogeneous::Failure { .. } => wrong += usize::from(exists),
        }
    }
    verdict(kept == 100 && wrong == 0, format!("{kept} of 100 seeded 3-graphs lack 2-independence, {verified} verified triples, {wrong} failures"))
}

fn c9() -> Verdict {
    let c = bound_compare(3, 2, 10).unwrap();
    let coeff = c.b_coefficient.unwrap_or(f64::NAN);
    let a_ok = c.a_level == 40.0;
    let b_ok = (coeff / 4e7).log10().abs() < 1.0;
    let mut mismatches = 0;
    for k in 2..=16u64 {
        let edge = (1u64 << (2 * k - 2)) / k;
        for n in [2, edge.saturating_sub(1).max(2), edge, edge + 1, edge + 2] {
            let c = bound_compare(3, n, k).unwrap();
            mismatches += usize::from(c.b_smaller != ((n as u128) * (k as u128) < 1u128 << (2 * k - 2)));
        }
    }
    verdict(a_ok && b_ok && mismatches == 0, format!("a-level {}, b coefficient {coeff:.3e}, crossover mismatches {mismatches}", c.a_level))
}

fn good(m: &Structure, phi: &PartitionedFormula, n: usize, d: usize) -> Option<fmlab_core::classify::GoodnessContext> {
    match is_good(m, phi, n, d, &GoodOptions::default()) {
        Ok(Goodness::Good(g)) => Some(g),
        _ => None,
    }
}

struct Part {
    name: &'static str,
    failures: usize,
    detail: String,
}

fn kappa_part() -> Part {
    let phi = edge();
    let (mut checked, mut fails) = (0, 0);
    let mut first = None;
    let mut check = |m: &Structure, n: usize| {
        if find_k_independence(m, &phi.swap_blocks(), n, &mut Budget::default()).unwrap().is_found() {
            return;
        }
        let k = kappa(m, std::slice::from_ref(&phi), n, m.size()).unwrap();
        checked += 1;
        if k.kappa > n {
            fails += 1;
            first.get_or_insert_with(|| format!("κ={} > n={n}", k.kappa));
        }
    };
    for size in 2..=4 {
        for mask in 0..(1u64 << (size * size)) {
            for n in 1..=2 {
                check(&common::digraph(size, mask, true), n);
            }
        }
    }
    for mask in 0..(1u64 << common::pairs(5)) {
        for n in 1..=2 {
            check(&common::graph(5, mask), n);
        }
    }
    let mut rng = common::rng(10);
    for _ in 0..3000 {
        let m = common::random_digraph(5, common::coin(&mut rng), &mut rng);
        for n in 1..=2 {
            check(&m, n);
        }
    }
    Part {
        name: "κ ≤ n",
        failures: fails,
        detail: format!("{checked} cases (all relations ≤ 4, graphs on 5, 3000 seeded 5-element digraphs), first: {}", first.unwrap_or_else(|| "none".into())),
    }
}

fn averages_complete(m: &Structure, n: usize, d: usize) -> (usize, usize) {
    let phi = edge();
    let Some(g) = good(m, &phi, n, d) else { return (0, 0) };
    let len = (d * g.kappa_psi).max(2 * n) + 1;
    let all = m.elements();
    let params = singletons(&all);
    let (mut checked, mut fails) = (0, 0);
    for arr in common::arrangements(m.size(), len) {
        let ts = TupleSequence::new(1, arr.iter().map(|&i| vec![i as Elem]).collect()).unwrap();
        if check_object_sequence(m, &phi, &ts, n).unwrap().is_some() {
            continue;
        }
        let av = average_type(m, &phi, &ts, &all, g.kappa, n).unwrap();
        checked += 1;
        if !is_complete_over(&av, 0, &params) || !is_realized(m, &phi, &av, &params).unwrap() {
            fails += 1;
        }
    }
    (checked, fails)
}

fn average_part() -> Part {
    let (mut checked, mut fails) = (0, 0);
    let mut add = |(c, f): (usize, usize)| {
        checked += c;
        fails += f;
    };
    for size in 3..=5 {
        for mask in 0..(1u64 << common::pairs(size)) {
            for (n, d) in [(1, 2), (2, 2), (2, 3)] {
                add(averages_complete(&common::graph(size, mask), n, d));
            }
        }
    }
    for mask in common::graph_classes(6) {
        add(averages_complete(&common::graph(6, mask), 2, 3));
    }
    Part { name: "Av completeness", failures: fails, detail: format!("{checked} indiscernible sequences in good graphs on ≤ 6 vertices") }
}

fn axiom_part() -> Part {
    let (mut checked, mut fails) = (0, 0);
    for size in 1..=5 {
        for mask in common::graph_classes(size) {
            let m = common::graph(size, mask);
            let mut a_sets = vec![vec![]];
            a_sets.extend((0..size as Elem).map(|v| vec![v]));
            for a in &a_sets {
                for (n, d, delta) in [(2, 2, false), (2, 3, false), (2, 3, true)] {
                    let (subs, rel) = common::prec_matrix(&m, a, n, d, delta);
                    checked += subs.len() * subs.len();
                    fails += usize::from(common::prec_axiom_violation(&subs, &rel).is_some());
                }
            }
        }
    }
    let mut rng = common::rng(11);
    for _ in 0..40 {
        let m = common::random_digraph(4, common::coin(&mut rng), &mut rng);
        for a in [vec![], vec![0]] {
            let (subs, rel) = common::prec_matrix(&m, &a, 2, 3, false);
            checked += subs.len() * subs.len();
            fails += usize::from(common::prec_axiom_violation(&subs, &rel).is_some());
        }
    }
    Part { name: "≺_K axioms", failures: fails, detail: format!("{checked} pairs of good substructures, graphs on ≤ 5 and 40 digraphs on 4") }
}

fn exchange_part() -> Part {
    let (mut run, mut fails, mut seed) = (0, 0, 0);
    while run < 500 && seed < 20_000 {
        if let Some((m, g, i0, i1)) = common::exchange_config(seed) {
            let rep = exchange_check(&m, &g, &i0, &i1).unwrap();
            run += 1;
            fails += usize::from(!rep.equivalent);
        }
        seed += 1;
    }
    Part { name: "exchange", failures: fails + usize::from(run < 500), detail: format!("{run} configurations from {seed} seeds") }
}

fn symmetry_part(a_is_m0: bool) -> Part {
    let (mut run, mut fails, mut seed) = (0, 0, 0);
    let mut first = None;
    while run < 500 && seed < 20_000 {
        if let Ok(rep) = symmetry_test(&common::amalgam_config(seed, a_is_m0)) {
            run += 1;
            if !rep.symmetric {
                fails += 1;
                first.get_or_insert(seed);
            }
        }
        seed += 1;
    }
    Part {
        name: if a_is_m0 { "symmetry, A = M0 (informational)" } else { "symmetry" },
        failures: fails + usize::from(run < 500),
        detail: format!("{run} configurations, {fails} asymmetric (first seed {first:?})"),
    }
}

fn c10() -> Verdict {
    let mut parts = Vec::new();
    for f in [kappa_part, average_part, axiom_part, exchange_part] {
        let t = Instant::now();
        let p = f();
        parts.push((p, t.elapsed()));
    }
    let t = Instant::now();
    let sym = symmetry_part(false);
    parts.push((sym, t.elapsed()));
    let t = Instant::now();
    let info = symmetry_part(true);
    let pass = parts.iter().all(|(p, _)| p.failures == 0);
    for (p, d) in parts.iter().chain(std::iter::once(&(info, t.elapsed()))) {
        say(format!("    {}: {} ({}) [{:.1}s]", p.name, if p.failures == 0 { "ok" } else { "FAIL" }, p.detail, d.as_secs_f64()));
    }
    let red: Vec<&str> = parts.iter().filter(|(p, _)| p.failures > 0).map(|(p, _)| p.name).collect();
    verdict(pass, if red.is_empty() { "all parts hold".to_string() } else { format!("failing parts: {}", red.join(", ")) })
}

fn c11() -> Verdict {
    let data = |n: &str| format!("{}/tests/data/{n}", env!("CARGO_MANIFEST_DIR"));
    let commands: Vec<Vec<String>> = vec![
        vec!["experiment", "independence-mc", "--n", "10", "--k", "2", "--trials", "400", "--seed", "3"],
        vec!["experiment", "thmg1", "--ks", "2,3,4", "--trials", "200", "--seed", "9"],
        vec!["--format", "csv", "experiment", "thmg1", "--ks", "2,3", "--trials", "100", "--seed", "2"],
        vec!["detect", "--structure", &data("c8.fm"), "--formula", &data("edge.fml"), "--property", "independence", "--k", "2"],
        vec!["classify", "symmetry", "--structure", &data("empty4.fm"), "--formula", &data("edge.fml"), "--set", "A", "--k", "2", "--n", "2", "--d", "2"],
    ]
    .into_iter()
    .map(|c| c.into_iter().map(String::from).collect())
    .collect();
    let mut diffs = 0;
    for cmd in &commands {
        let go = |threads: &str| {
            let args: Vec<String> = ["fmlab", "--threads", threads].iter().map(|s| s.to_string()).chain(cmd.iter().cloned()).collect();
            run(args)
        };
        let base = go("1");
        for t in ["1", "2", "3", "8"] {
            diffs += usize::from(go(t) != base);
        }
    }
    verdict(diffs == 0, format!("{} invocations, each rerun with --threads 1, 2, 3, 8 against a --threads 1 base run, {diffs} differences", commands.len()))
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, fn() -> Verdict); 11] = [
        (1, "coupon-collector exactness", c1),
        (2, "coupon asymptotics", c2),
        (3, "k-independence trend in G(n,1/2)", c3),
        (4, "Sauer-Shelah completeness", c4),
        (5, "type bound without k-independence", c5),
        (6, "extraction soundness and sufficiency", c6),
        (7, "no order implies indiscernible set", c7),
        (8, "homogeneous triples in 3-graphs", c8),
        (9, "bound reproduction", c9),
        (10, "classification property suite", c10),
        (11, "determinism", c11),
    ];
    let mut surprises = Vec::new();
    let mut total = Duration::ZERO;
    for (id, name, f) in criteria {
        let t = Instant::now();
        let v = f();
        let dt = t.elapsed();
        total += dt;
        say(format!("criterion {id:>2} {}: {name}: {} [{:.1}s]", if v.pass { "PASS" } else { "FAIL" }, v.detail, dt.as_secs_f64()));
        if v.pass == EXPECTED_RED.contains(&id) {
            surprises.push(id);
        }
    }
    say(format!("total {:.1}s; expected red: {EXPECTED_RED:?}", total.as_secs_f64()));
    assert!(surprises.is_empty(), "criteria off their expected status: {surprises:?}");
}
