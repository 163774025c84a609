use netrig::lpcore::{solve_feasibility, verify_certificate, FeasibilityProblem, FeasibilityResult, Row};
use proptest::prelude::*;

fn system(m: usize, n: usize, entries: &[f64], x: &[f64], shift: f64) -> FeasibilityProblem {
    let rows = (0..m)
        .map(|i| {
            let coeffs: Vec<(usize, f64)> = (0..n).map(|k| (k, entries[i * n + k])).filter(|&(_, a)| a != 0.0).collect();
            let rhs = coeffs.iter().map(|&(k, a)| a * x[k]).sum::<f64>() + if i == 0 { shift } else { 0.0 };
            Row { coeffs, rhs, tag: format!("r{i}") }
        })
        .collect();
    FeasibilityProblem::new((0..n).map(|k| format!("x{k}")).collect(), rows).unwrap()
}

fn coefficient() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), -1.0f64..1.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn systems_with_a_witness_are_feasible(
        (m, n, entries, x) in (1usize..8, 1usize..10).prop_flat_map(|(m, n)| {
            (Just(m), Just(n), prop::collection::vec(coefficient(), m * n), prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..2.0], n))
        })
    ) {
        let p = system(m, n, &entries, &x, 0.0);
        let r = solve_feasibility(&p).unwrap();
        prop_assert!(r.is_feasible());
        prop_assert!(verify_certificate(&p, &r));
    }

    #[test]
    fn positive_row_scaling_keeps_the_branch(
        (m, n, entries, x) in (1usize..6, 1usize..8).prop_flat_map(|(m, n)| {
            (Just(m), Just(n), prop::collection::vec(coefficient(), m * n), prop::collection::vec(0.0f64..1.0, n))
        }),
        shift in -2.0f64..2.0,
        scale in prop::collection::vec(0.01f64..100.0, 6),
    ) {
        let p = system(m, n, &entries, &x, shift);
        let mut q = p.clone();
        for (row, s) in q.rows.iter_mut().zip(&scale) {
            row.rhs *= s;
            for c in &mut row.coeffs {
                c.1 *= s;
            }
        }
        match (solve_feasibility(&p), solve_feasibility(&q)) {
            (Ok(a), Ok(b)) => {
                prop_assert!(verify_certificate(&p, &a));
                prop_assert!(verify_certificate(&q, &b));
                prop_assert_eq!(a.is_feasible(), b.is_feasible());
            }
            // A near-degenerate draw may be indeterminate, which is not a flip.
            _ => {}
        }
    }
}

#[test]
fn certificates_survive_serialization() {
    let p = FeasibilityProblem::new(
        vec!["a".into(), "b".into()],
        vec![
            Row { coeffs: vec![(0, 1.0), (1, 1.0)], rhs: 1.0, tag: "mass".into() },
            Row { coeffs: vec![(0, 1.0)], rhs: 2.0, tag: "a".into() },
        ],
    )
    .unwrap();
    let r = solve_feasibility(&p).unwrap();
    assert!(!r.is_feasible());
    let p2: FeasibilityProblem = serde_json::from_str(&p.to_json()).unwrap();
    let r2: FeasibilityResult = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert!(verify_certificate(&p2, &r2));
}

#[test]
fn forged_results_are_rejected() {
    let p = FeasibilityProblem::new(
        vec!["a".into()],
        vec![Row { coeffs: vec![(0, 1.0)], rhs: 0.5, tag: "r".into() }],
    )
    .unwrap();
    assert!(!verify_certificate(&p, &FeasibilityResult::Feasible { witness: vec![0.4] }));
    assert!(!verify_certificate(&p, &FeasibilityResult::Infeasible { multipliers: vec![1.0], margin: 0.5 }));
    assert!(verify_certificate(&p, &FeasibilityResult::Feasible { witness: vec![0.5] }));
}
