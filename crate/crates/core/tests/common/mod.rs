#![allow(dead_code)]

use netrig::catalog::Omega2;
use netrig::classical::{ClassicalSource, ClassicalStrategy, Response};
use netrig::netgraph::{build_complete, build_edge_network, build_ring, Network};
use netrig::quantum::{all_tuples, OutcomeLabel, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// Haar-random 2x2 unitary (complex Ginibre matrix orthonormalised row by row).
pub fn random_unitary2(rng: &mut ChaCha8Rng) -> Omega2 {
    let mut g = || C64::new(gaussian(rng), gaussian(rng));
    let a = [g(), g()];
    let b = [g(), g()];
    let na = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
    let a = [a[0] / na, a[1] / na];
    let ip = a[0].conj() * b[0] + a[1].conj() * b[1];
    let b = [b[0] - a[0] * ip, b[1] - a[1] * ip];
    let nb = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
    [a, [b[0] / nb, b[1] / nb]]
}

pub fn random_unitaries2(rng: &mut ChaCha8Rng, n: usize) -> Vec<Omega2> {
    (0..n).map(|_| random_unitary2(rng)).collect()
}

fn random_pmf(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let s: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|x| x / s).collect();
    let head: f64 = p[..k - 1].iter().sum();
    p[k - 1] = 1.0 - head;
    p
}

/// Networks used for classical sampling: every one admits a PFIS.
pub fn pfis_networks() -> Vec<Network> {
    let mut v: Vec<Network> = (3..=6).map(|n| build_ring(n).unwrap()).collect();
    v.push(build_complete(4).unwrap());
    v.push(build_edge_network(4).unwrap());
    v.push(
        Network::builder()
            .parties(["A", "B", "C", "D"])
            .source("lambda", ["A", "D"])
            .source("mu", ["A", "B", "C"])
            .source("nu", ["B", "C", "D"])
            .build()
            .unwrap(),
    );
    v
}

/// Each source emits one of `k` random tuples over `{0, 1}`; each party
/// answers `n1` or `n0` with a random probability per received tuple.
pub fn random_classical(net: &Network, rng: &mut ChaCha8Rng, k: usize) -> ClassicalStrategy {
    let sources = net
        .sources()
        .iter()
        .map(|s| {
            let pmf = random_pmf(rng, k);
            ClassicalSource {
                id: s.id.clone(),
                values: pmf
                    .into_iter()
                    .map(|p| ((0..s.parties.len()).map(|_| rng.gen_range(0..2)).collect(), p))
                    .collect(),
            }
        })
        .collect();
    let responses = (0..net.num_parties())
        .map(|j| {
            all_tuples(&vec![2; net.party_sources(j).len()])
                .into_iter()
                .map(|t| {
                    let p: f64 = rng.gen();
                    (t, vec![(OutcomeLabel::token(1), p), (OutcomeLabel::token(0), 1.0 - p)])
                })
                .collect::<Response>()
        })
        .collect();
    ClassicalStrategy::new(net, sources, responses).unwrap()
}

/// Sources pick one of `colors` colors uniformly and send it to every
/// neighbour; parties report a match or nothing.
pub fn uniform_color_match(net: &Network, colors: u32) -> ClassicalStrategy {
    let sources = net
        .sources()
        .iter()
        .map(|s| ClassicalSource {
            id: s.id.clone(),
            values: (0..colors)
                .map(|c| (vec![c; s.parties.len()], 1.0 / colors as f64))
                .collect(),
        })
        .collect();
    let responses = (0..net.num_parties())
        .map(|j| {
            all_tuples(&vec![colors; net.party_sources(j).len()])
                .into_iter()
                .map(|t| {
                    let l = if t.iter().all(|&c| c == t[0]) {
                        OutcomeLabel::ColorMatch(t[0])
                    } else {
                        OutcomeLabel::Ambiguous(0)
                    };
                    (t, vec![(l, 1.0)])
                })
                .collect::<Response>()
        })
        .collect();
    ClassicalStrategy::new(net, sources, responses).unwrap()
}

pub fn indicator(l: &OutcomeLabel, target: &OutcomeLabel) -> f64 {
    f64::from(u8::from(l == target))
}
