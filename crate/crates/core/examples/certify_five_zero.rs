//! Certification on the 5-0 network: an infeasibility certificate at
//! θ = π/8, a classical-compatible witness at θ = 0.

use std::f64::consts::PI;

use netrig::catalog::{make_5_0_tc, FiveZeroParams};
use netrig::lpcore::verify_certificate;
use netrig::rigidity::{certify_with_problem, Event, QOptions};

fn main() {
    for theta in [PI / 8.0, 0.0] {
        let (net, strat) = make_5_0_tc(&FiveZeroParams::rotation(theta)).unwrap();
        let (spec, problem, result) =
            certify_with_problem(&net, &strat, Event::AllAmbiguous, &QOptions::default()).unwrap();

        println!("theta = {theta:.4}");
        println!("  Pr(ambiguous) = {:.6}", spec.event_prob);
        for (doc, p) in spec.pattern_docs.iter().zip(&spec.pattern_probs) {
            println!("  pattern t={} p={p:.6} {:?}", doc.index, doc.routing.as_ref().unwrap());
        }
        println!(
            "  LP: {} variables, {} rows, feasible = {}, verified = {}",
            problem.num_vars(),
            problem.num_rows(),
            result.is_feasible(),
            verify_certificate(&problem, &result)
        );

        let mut weights = result.named_multipliers(&problem);
        if !weights.is_empty() {
            weights.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
            println!("  largest Farkas multipliers:");
            for (tag, y) in weights.iter().take(5) {
                println!("    {y:+.4}  {tag}");
            }
        }
    }
}
