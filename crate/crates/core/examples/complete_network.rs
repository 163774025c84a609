//! Color matching on the complete network K_4: two hidden color patterns
//! survive, and the LP coincides with the one for the 4-ring.

use netrig::catalog::{lambda_omega, make_complete_cm, make_ring_tc};
use netrig::rigidity::{certify_with_problem, Event, QOptions};

fn main() {
    let lambda = 0.1;
    let (net, strat) = make_complete_cm(4, &vec![lambda_omega(lambda); 4]).unwrap();
    let (spec, problem, result) =
        certify_with_problem(&net, &strat, Event::AllAmbiguous, &QOptions::default()).unwrap();

    println!("Pr(all ambiguous) = {} (2^-5 = {})", spec.event_prob, 2f64.powi(-5));
    for doc in &spec.pattern_docs {
        println!("pattern t={} colors {:?}", doc.index, doc.coloring.as_ref().unwrap());
    }
    println!("K4 LP: {} x {}, feasible = {}", problem.num_rows(), problem.num_vars(), result.is_feasible());

    let (rnet, rstrat) = make_ring_tc(4, &vec![lambda_omega(lambda); 4]).unwrap();
    let (_, rproblem, rresult) =
        certify_with_problem(&rnet, &rstrat, Event::AllAmbiguous, &QOptions::default()).unwrap();
    println!("ring LP: {} x {}, feasible = {}", rproblem.num_rows(), rproblem.num_vars(), rresult.is_feasible());

    if let (Some(a), Some(b)) = (margin(&result), margin(&rresult)) {
        println!("margins: K4 {a:.6e}, ring {b:.6e}");
    }
}

fn margin(r: &netrig::lpcore::FeasibilityResult) -> Option<f64> {
    match r {
        netrig::lpcore::FeasibilityResult::Infeasible { margin, .. } => Some(*margin),
        _ => None,
    }
}
