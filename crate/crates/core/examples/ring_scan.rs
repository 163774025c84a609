//! Ring networks: equal small λ certifies for odd n and n = 4k but not for
//! n = 4k + 2, where putting λ = 1/√2 at one party restores infeasibility.

use netrig::catalog::{asymmetric_omegas, lambda_omega, make_ring_tc, Omega2};
use netrig::rigidity::{certify_nonlocality, Event, QOptions};

fn verdict(n: usize, omegas: &[Omega2]) -> String {
    let (net, strat) = make_ring_tc(n, omegas).unwrap();
    match certify_nonlocality(&net, &strat, Event::AllAmbiguous, &QOptions::default()) {
        Ok(r) => match r.margin {
            Some(m) => format!("{} (margin {m:.2e})", r.verdict),
            None => r.verdict.to_string(),
        },
        Err(e) => format!("error: {e}"),
    }
}

fn main() {
    for n in 3..=7 {
        println!("ring {n}, equal lambda:");
        for lambda in [0.05, 0.1, 0.2, 0.4] {
            println!("  {lambda:<5} {}", verdict(n, &vec![lambda_omega(lambda); n]));
        }
    }
    println!("ring 6, asymmetric:");
    for k in 0..=8 {
        let eps = 1e-3 * (200f64).powf(k as f64 / 8.0);
        println!("  {eps:<8.5} {}", verdict(6, &asymmetric_omegas(6, eps)));
    }
}
