//! Direct use of the feasibility solver: a witness for a solvable system
//! and a Farkas certificate for an unsolvable one.

use netrig::lpcore::{solve_feasibility, verify_certificate, FeasibilityProblem, FeasibilityResult, Row};

fn row(coeffs: &[(usize, f64)], rhs: f64, tag: &str) -> Row {
    Row {
        coeffs: coeffs.to_vec(),
        rhs,
        tag: tag.into(),
    }
}

fn report(p: &FeasibilityProblem) {
    let r = solve_feasibility(p).unwrap();
    println!("verified: {}", verify_certificate(p, &r));
    match &r {
        FeasibilityResult::Feasible { .. } => {
            for (name, x) in r.named_witness(p) {
                println!("  {name} = {x:.6}");
            }
        }
        FeasibilityResult::Infeasible { margin, .. } => {
            println!("  margin {margin:.6}");
            for (tag, y) in r.named_multipliers(p) {
                println!("  y[{tag}] = {y:+.6}");
            }
        }
    }
}

fn main() {
    let names = || vec!["x".to_string(), "y".to_string(), "z".to_string()];

    // x + y + z = 1, x - y = 0.2
    let ok = FeasibilityProblem::new(
        names(),
        vec![row(&[(0, 1.0), (1, 1.0), (2, 1.0)], 1.0, "mass"), row(&[(0, 1.0), (1, -1.0)], 0.2, "skew")],
    )
    .unwrap();
    report(&ok);

    // x + y + z = 1 together with x + y = 1.5 has no nonnegative solution.
    let bad = FeasibilityProblem::new(
        names(),
        vec![row(&[(0, 1.0), (1, 1.0), (2, 1.0)], 1.0, "mass"), row(&[(0, 1.0), (1, 1.0)], 1.5, "too much")],
    )
    .unwrap();
    report(&bad);
    println!("\n{}", bad.to_json());
}
