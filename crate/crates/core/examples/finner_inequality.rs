//! Finner's inequality on classical network distributions: random
//! strategies never violate it, and the indicator of a match on one fixed
//! color saturates it under uniform color matching.

use netrig::classical::{ClassicalSource, ClassicalStrategy, Response};
use netrig::netgraph::build_ring;
use netrig::quantum::{all_tuples, OutcomeLabel};
use netrig::rigidity::finner_check_classical;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let net = build_ring(4).unwrap();
    let weights = net.find_pfis().unwrap();
    println!("PFIS weights {:?}", weights.weights);
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // Binary sources and random binary responses.
    for trial in 0..5 {
        let sources = net
            .sources()
            .iter()
            .map(|s| {
                let p: f64 = rng.gen();
                ClassicalSource {
                    id: s.id.clone(),
                    values: vec![(vec![0, 0], p), (vec![1, 1], 1.0 - p)],
                }
            })
            .collect();
        let responses = (0..net.num_parties())
            .map(|_| {
                all_tuples(&[2, 2])
                    .into_iter()
                    .map(|t| {
                        let p: f64 = rng.gen();
                        (t, vec![(OutcomeLabel::token(1), p), (OutcomeLabel::token(0), 1.0 - p)])
                    })
                    .collect::<Response>()
            })
            .collect();
        let strat = ClassicalStrategy::new(&net, sources, responses).unwrap();
        let r = finner_check_classical(&net, &strat, &weights, |_, l| {
            f64::from(u8::from(*l == OutcomeLabel::token(1)))
        })
        .unwrap();
        println!("random {trial}: lhs {:.6} rhs {:.6} gap {:.3e}", r.lhs, r.rhs, r.gap);
    }

    // Each source picks one of three colors uniformly; parties flag a match.
    let sources = net
        .sources()
        .iter()
        .map(|s| ClassicalSource {
            id: s.id.clone(),
            values: (0..3).map(|c| (vec![c, c], 1.0 / 3.0)).collect(),
        })
        .collect();
    let responses = (0..net.num_parties())
        .map(|_| {
            all_tuples(&[3, 3])
                .into_iter()
                .map(|t| {
                    let l = if t[0] == t[1] {
                        OutcomeLabel::ColorMatch(t[0])
                    } else {
                        OutcomeLabel::Ambiguous(0)
                    };
                    (t, vec![(l, 1.0)])
                })
                .collect::<Response>()
        })
        .collect();
    let strat = ClassicalStrategy::new(&net, sources, responses).unwrap();
    let r = finner_check_classical(&net, &strat, &weights, |_, l| {
        f64::from(u8::from(*l == OutcomeLabel::ColorMatch(0)))
    })
    .unwrap();
    println!("match on color 0: lhs {:.12} rhs {:.12} gap {:.3e}", r.lhs, r.rhs, r.gap);
}
