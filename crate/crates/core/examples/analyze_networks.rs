//! Structural properties of the networks used throughout the crate.

use netrig::catalog::{five_zero_network, one_two_network};
use netrig::netgraph::{build_complete, build_edge_network, build_ring, Network};

fn show(name: &str, net: &Network) {
    let pfis = match net.find_pfis() {
        Some(w) => format!("{:?}", w.weights),
        None => "none".into(),
    };
    println!(
        "{name:<12} parties={:<3} sources={:<3} NDCS={:<5} ECS={:<5} PFIS={pfis}",
        net.num_parties(),
        net.num_sources(),
        net.check_ndcs(),
        net.check_ecs(),
    );
}

fn main() {
    show("5-0", &five_zero_network());
    show("1-2", &one_two_network());
    for n in [3, 4, 6] {
        show(&format!("ring:{n}"), &build_ring(n).unwrap());
    }
    for n in [4, 5] {
        show(&format!("kn:{n}"), &build_complete(n).unwrap());
    }
    show("edges:5", &build_edge_network(5).unwrap());

    // B and C share both sources here, so neither property holds. The
    // builder refuses such a network unless asked not to.
    let redundant = Network::builder()
        .parties(["A", "B", "C"])
        .source("S1", ["A", "B", "C"])
        .source("S2", ["B", "C"])
        .allow_redundant_sources()
        .build()
        .unwrap();
    show("redundant", &redundant);

    println!("\n{}", one_two_network().to_json());
}
