mod common;

use std::collections::BTreeMap;

use fmlab_core::logic::{close_under_negation, realized_types, tp};
use fmlab_core::{evaluate, Elem, Error, Formula, PartitionedFormula, Structure, Var};
use proptest::prelude::*;

fn edge() -> PartitionedFormula {
    PartitionedFormula::binary("phi", "R")
}

fn p3() -> Structure {
    Structure::graph(3, &[(0, 1), (1, 2)]).unwrap()
}

fn k(n: usize) -> Structure {
    common::graph(n, u64::MAX)
}

fn assign(pairs: &[(Var, Elem)]) -> BTreeMap<Var, Elem> {
    pairs.iter().copied().collect()
}

#[test]
fn evaluate_examples() {
    let (x, y0, y1) = (Var::X(0), Var::Y(0), Var::Y(1));
    assert!(evaluate(&k(3), &edge(), &assign(&[(x, 0), (y0, 1)])).unwrap());

    let ex = PartitionedFormula::new("e", vec![], vec![y0], Formula::exists(x, Formula::atom("R", &[x, y0]))).unwrap();
    assert!(!evaluate(&Structure::graph(3, &[]).unwrap(), &ex, &assign(&[(y0, 0)])).unwrap());

    let body = Formula::exists(x, Formula::atom("R", &[x, y0]).and(Formula::atom("R", &[x, y1])));
    let common_nb = PartitionedFormula::new("c", vec![], vec![y0, y1], body).unwrap();
    assert!(evaluate(&p3(), &common_nb, &assign(&[(y0, 0), (y1, 2)])).unwrap());
    assert!(!evaluate(&p3(), &common_nb, &assign(&[(y0, 0), (y1, 1)])).unwrap());
}

#[test]
fn evaluate_errors() {
    let unbound = evaluate(&p3(), &edge(), &assign(&[(Var::X(0), 0)]));
    assert!(matches!(unbound, Err(Error::UnboundVariable(_))));
    let bad = PartitionedFormula::new("b", vec![Var::X(0)], vec![], Formula::atom("R", &[Var::X(0)])).unwrap();
    assert!(matches!(evaluate(&p3(), &bad, &assign(&[(Var::X(0), 0)])), Err(Error::ArityMismatch(_))));
}

#[test]
fn tp_examples() {
    let show = |m: &Structure, a: Elem, params: &[Elem]| {
        let ps: Vec<Vec<Elem>> = params.iter().map(|&p| vec![p]).collect();
        let ty = tp(&[edge()], &[a], &ps, m).unwrap();
        ty.entries().iter().map(|e| (e.params[0], e.positive)).collect::<Vec<_>>()
    };
    assert_eq!(show(&Structure::graph(3, &[]).unwrap(), 0, &[1, 2]), vec![(1, false), (2, false)]);
    assert_eq!(show(&k(3), 0, &[1]), vec![(1, true)]);
    assert_eq!(show(&p3(), 0, &[1, 2]), vec![(1, true), (2, false)]);
}

#[test]
fn realized_type_counts() {
    let one = |m: &Structure, ps: &[Elem]| {
        let ps: Vec<Vec<Elem>> = ps.iter().map(|&p| vec![p]).collect();
        realized_types(&[edge()], &ps, m, 1).unwrap().len()
    };
    assert_eq!(one(&p3(), &[1]), 2);
    assert_eq!(one(&Structure::graph(4, &[]).unwrap(), &[0, 2, 3]), 1);
    assert_eq!(one(&k(4), &[0, 1]), 3);
}

fn structure_and_params() -> impl Strategy<Value = (Structure, Vec<Elem>, Vec<Elem>)> {
    (2usize..=6).prop_flat_map(|n| {
        (any::<u64>(), proptest::collection::vec(0..n as Elem, 0..4), proptest::collection::vec(0..n as Elem, 0..4))
            .prop_map(move |(mask, a, extra)| (common::digraph(n, mask, true), a, extra))
    })
}

proptest! {
    #[test]
    fn evaluation_is_deterministic((m, a, _) in structure_and_params()) {
        let phi = edge();
        for x in 0..m.size() as Elem {
            for &y in &a {
                let asg = assign(&[(Var::X(0), x), (Var::Y(0), y)]);
                prop_assert_eq!(evaluate(&m, &phi, &asg).unwrap(), evaluate(&m, &phi, &asg).unwrap());
                prop_assert_eq!(evaluate(&m, &phi, &asg).unwrap(), m.relation("R").unwrap().contains(&[x, y]));
            }
        }
    }

    #[test]
    fn realized_types_are_bounded((m, a, _) in structure_and_params()) {
        let ps: Vec<Vec<Elem>> = a.iter().map(|&p| vec![p]).collect();
        let delta = close_under_negation(&[edge()]);
        let got = realized_types(&delta, &ps, &m, 1).unwrap().len();
        let cap = m.size().min(1 << (delta.len() * ps.len()).min(20));
        prop_assert!(got <= cap);
    }

    #[test]
    fn types_grow_with_the_parameter_set((m, a, extra) in structure_and_params()) {
        let small: Vec<Vec<Elem>> = a.iter().map(|&p| vec![p]).collect();
        let big: Vec<Vec<Elem>> = a.iter().chain(&extra).map(|&p| vec![p]).collect();
        for x in 0..m.size() as Elem {
            let t0 = tp(&[edge()], &[x], &small, &m).unwrap();
            let t1 = tp(&[edge()], &[x], &big, &m).unwrap();
            prop_assert!(t0.entries().is_subset(t1.entries()));
        }
    }

    #[test]
    fn equal_types_iff_no_instance_separates((m, a, _) in structure_and_params()) {
        let delta = close_under_negation(&[edge()]);
        let ps: Vec<Vec<Elem>> = a.iter().map(|&p| vec![p]).collect();
        for x in 0..m.size() as Elem {
            for y in 0..m.size() as Elem {
                let same = tp(&delta, &[x], &ps, &m).unwrap() == tp(&delta, &[y], &ps, &m).unwrap();
                let separated = delta.iter().any(|f| ps.iter().any(|p| common::holds(&m, f, &[x], p) != common::holds(&m, f, &[y], p)));
                prop_assert_eq!(same, !separated);
            }
        }
    }
}
