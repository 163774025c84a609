//! The graph-coloring family for n = 5: sources are the vertices of K_5,
//! parties its edges. An edge party sees no match exactly when its two
//! endpoints differ, so the unrevealed patterns are proper colorings.

use netrig::catalog::{asymmetric_omegas, make_graph_coloring_cm};
use netrig::classical::{enumerate_color_patterns, ColorConstraint};
use netrig::netgraph::build_edge_network;
use netrig::rigidity::{certify_nonlocality, Event, QOptions};

fn main() {
    let n = 5;
    let net = build_edge_network(n).unwrap();
    let proper = enumerate_color_patterns(&net, n as u32, &vec![ColorConstraint::Ambiguous { revealed: vec![] }; net.num_parties()]);
    println!("proper {n}-colorings of K_{n}: {}", proper.len());

    for eps in [0.05, 0.1, 0.15, 0.2, 0.25] {
        let (net, strat) = make_graph_coloring_cm(n, &asymmetric_omegas(n * (n - 1) / 2, eps)).unwrap();
        match certify_nonlocality(&net, &strat, Event::AllAmbiguous, &QOptions::default()) {
            Ok(r) => println!(
                "eps {eps:<5} patterns {} Pr {:.3e} LP {}x{} -> {} {:?}",
                r.patterns.len(),
                r.event_prob.unwrap_or(0.0),
                r.lp_rows,
                r.lp_vars,
                r.verdict,
                r.margin
            ),
            Err(e) => println!("eps {eps:<5} {e}"),
        }
    }
}
