//! Constructors for the network/strategy families with known rigidity
//! arguments: the 5-0 network, rings, the 1-2 network, complete networks
//! and complete-graph coloring networks.
//!
//! Coefficient matrices `ω` are indexed `ω[r][t]`: row `r` is the
//! ambiguous outcome, column `t` the hidden pattern (equivalently the
//! computational tuple that pattern delivers).

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgraph::{build_complete, build_edge_network, build_ring, Network};
use crate::quantum::{
    all_tuples, BasisVector, MeasurementBasis, OutcomeLabel, QuantumStrategy, SourceState,
    StrategyKind, Tuple, C64,
};

pub type Omega2 = [[C64; 2]; 2];
pub type Omega3 = [[C64; 3]; 3];

const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    FiveZero,
    Ring,
    OneTwo,
    Complete,
    GraphColoring,
}

/// Rotation angle with its `R³_x(θ)` and `R²(θ)` matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationParams {
    pub theta: f64,
    pub r3: [[f64; 3]; 3],
    pub r2: [[f64; 2]; 2],
}

impl RotationParams {
    pub fn new(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            theta,
            r3: [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
            r2: [[c, -s], [s, c]],
        }
    }

    pub fn omega3(&self) -> Omega3 {
        self.r3.map(|row| row.map(|x| C64::new(x, 0.0)))
    }

    pub fn omega2(&self) -> Omega2 {
        self.r2.map(|row| row.map(|x| C64::new(x, 0.0)))
    }
}

fn real2(m: [[f64; 2]; 2]) -> Omega2 {
    m.map(|row| row.map(|x| C64::new(x, 0.0)))
}

/// `[[λ, μ], [μ, −λ]]` with `μ = √(1−λ²)`.
pub fn lambda_omega(lambda: f64) -> Omega2 {
    let mu = (1.0 - lambda * lambda).max(0.0).sqrt();
    real2([[lambda, mu], [mu, -lambda]])
}

/// [`lambda_omega`] with `λ = sin θ`.
pub fn ring_omega(theta: f64) -> Omega2 {
    let (s, c) = theta.sin_cos();
    real2([[s, c], [c, -s]])
}

/// Per-party coefficients: `λ` everywhere except the last party, which
/// gets `λ = μ = 1/√2`.
pub fn asymmetric_omegas(parties: usize, lambda: f64) -> Vec<Omega2> {
    let mut v = vec![lambda_omega(lambda); parties];
    if let Some(last) = v.last_mut() {
        *last = lambda_omega(FRAC_1_SQRT_2);
    }
    v
}

fn rows_orthonormal<const N: usize>(w: &[[C64; N]; N]) -> bool {
    (0..N).all(|a| {
        (0..N).all(|b| {
            let ip: C64 = (0..N).map(|k| w[a][k].conj() * w[b][k]).sum();
            let want = if a == b { 1.0 } else { 0.0 };
            (ip - C64::new(want, 0.0)).norm() <= UNITARY_TOL
        })
    })
}

fn check_omega<const N: usize>(w: &[[C64; N]; N], what: &str) -> Result<()> {
    if rows_orthonormal(w) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{what}: coefficient rows are not orthonormal")))
    }
}

fn tc(count: u32) -> OutcomeLabel {
    OutcomeLabel::token(count)
}

fn comp(label: OutcomeLabel, t: &[u32]) -> BasisVector {
    BasisVector::computational(label, t.to_vec())
}

fn mix<const N: usize>(label: OutcomeLabel, coeffs: &[C64; N], tuples: [&[u32]; N]) -> BasisVector {
    let terms: Vec<(Tuple, C64)> = tuples
        .iter()
        .zip(coeffs)
        .map(|(t, &c)| (t.to_vec(), c))
        .collect();
    BasisVector::superposition(label, &terms)
}

fn basis(party: &str, vectors: Vec<BasisVector>) -> MeasurementBasis {
    MeasurementBasis {
        party: party.to_string(),
        vectors,
    }
}

fn single_token(id: &str) -> SourceState {
    SourceState::uniform(id, vec![2, 2], &[vec![0, 1], vec![1, 0]])
}

/// Uniform superposition of `colors` constant tuples over `degree` subsystems.
fn color_source(id: &str, colors: u32, degree: usize) -> SourceState {
    let tuples: Vec<Tuple> = (0..colors).map(|c| vec![c; degree]).collect();
    SourceState::uniform(id, vec![colors; degree], &tuples)
}

/// Parameters of the 5-0 strategy. `b` and `d` carry the two independent
/// columns of the parties with two ambiguous outcomes: for B the pattern
/// columns are (1, 1, 3) → (b[·][0], b[·][0], b[·][1]); for D they are
/// (1, 3, 3) → (d[·][0], d[·][1], d[·][1]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveZeroParams {
    pub a: Omega3,
    pub b: Omega2,
    pub c: Omega3,
    pub d: Omega2,
}

impl FiveZeroParams {
    /// A and C share `R³_x(θ)`, B and D share `R²(θ)`.
    pub fn rotation(theta: f64) -> Self {
        let r = RotationParams::new(theta);
        Self {
            a: r.omega3(),
            b: r.omega2(),
            c: r.omega3(),
            d: r.omega2(),
        }
    }
}

/// The 5-0 network: parties A, B, C, D and bipartite sources on the pairs
/// AB, AC, AD, BC, CD.
pub fn five_zero_network() -> Network {
    Network::builder()
        .parties(["A", "B", "C", "D"])
        .source("S_AB", ["A", "B"])
        .source("S_AC", ["A", "C"])
        .source("S_AD", ["A", "D"])
        .source("S_BC", ["B", "C"])
        .source("S_CD", ["C", "D"])
        .order("A", ["S_AD", "S_AC", "S_AB"])
        .order("B", ["S_AB", "S_BC"])
        .order("C", ["S_BC", "S_AC", "S_CD"])
        .order("D", ["S_CD", "S_AD"])
        .build()
        .expect("5-0 network is well formed")
}

pub fn make_5_0_tc(p: &FiveZeroParams) -> Result<(Network, QuantumStrategy)> {
    check_omega(&p.a, "A")?;
    check_omega(&p.b, "B")?;
    check_omega(&p.c, "C")?;
    check_omega(&p.d, "D")?;
    let net = five_zero_network();
    let sources = net.sources().iter().map(|s| single_token(&s.id)).collect();

    let mut a = vec![comp(tc(0), &[0, 0, 0])];
    for (i, w) in p.a.iter().enumerate() {
        a.push(mix(
            OutcomeLabel::token_extra(1, i as u32 + 1),
            w,
            [&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]],
        ));
    }
    for t in [[1, 1, 0], [1, 0, 1], [0, 1, 1]] {
        a.push(comp(OutcomeLabel::RevealedTuple(t.to_vec()), &t));
    }
    a.push(comp(tc(3), &[1, 1, 1]));

    let mut c = vec![comp(tc(0), &[0, 0, 0])];
    for t in [[0, 0, 1], [0, 1, 0], [1, 0, 0]] {
        c.push(comp(OutcomeLabel::RevealedTuple(t.to_vec()), &t));
    }
    for (k, w) in p.c.iter().enumerate() {
        c.push(mix(
            OutcomeLabel::token_extra(2, k as u32 + 1),
            w,
            [&[1, 1, 0], &[1, 0, 1], &[0, 1, 1]],
        ));
    }
    c.push(comp(tc(3), &[1, 1, 1]));

    let two = |w: &Omega2| {
        let mut v = vec![comp(tc(0), &[0, 0])];
        for (r, row) in w.iter().enumerate() {
            v.push(mix(
                OutcomeLabel::token_extra(1, r as u32 + 1),
                row,
                [&[1, 0], &[0, 1]],
            ));
        }
        v.push(comp(tc(2), &[1, 1]));
        v
    };

    let strat = QuantumStrategy {
        kind: StrategyKind::TokenCounting,
        family: Some(Family::FiveZero),
        sources,
        bases: vec![
            basis("A", a),
            basis("B", two(&p.b)),
            basis("C", c),
            basis("D", two(&p.d)),
        ],
    };
    Ok((net, strat))
}

fn check_count(omegas: &[Omega2], n: usize) -> Result<()> {
    if omegas.len() != n {
        return Err(Error::OutOfRange(format!(
            "expected {n} coefficient blocks, got {}",
            omegas.len()
        )));
    }
    for (j, w) in omegas.iter().enumerate() {
        check_omega(w, &format!("party {}", j + 1))?;
    }
    Ok(())
}

/// Ring `R_n` with one token per source; party `A_j` measures
/// `{|00⟩, v_{j,1}, v_{j,2}, |11⟩}` with `v_{j,r} = ω[r][0]|01⟩ + ω[r][1]|10⟩`.
pub fn make_ring_tc(n: usize, omegas: &[Omega2]) -> Result<(Network, QuantumStrategy)> {
    let net = build_ring(n)?;
    check_count(omegas, n)?;
    let sources = net.sources().iter().map(|s| single_token(&s.id)).collect();
    let bases = net
        .parties()
        .iter()
        .zip(omegas)
        .map(|(id, w)| {
            let mut v = vec![comp(tc(0), &[0, 0])];
            for (r, row) in w.iter().enumerate() {
                v.push(mix(
                    OutcomeLabel::token_extra(1, r as u32 + 1),
                    row,
                    [&[0, 1], &[1, 0]],
                ));
            }
            v.push(comp(tc(2), &[1, 1]));
            basis(id, v)
        })
        .collect();
    Ok((
        net,
        QuantumStrategy {
            kind: StrategyKind::TokenCounting,
            family: Some(Family::Ring),
            sources,
            bases,
        },
    ))
}

/// Two-color CM version of the even ring: sources emit `(|00⟩+|11⟩)/√2`
/// and parties `A_2, A_4, …` measure the bit-flipped TC basis.
pub fn make_ring_cm(n: usize, omegas: &[Omega2]) -> Result<(Network, QuantumStrategy)> {
    if n % 2 != 0 {
        return Err(Error::OutOfRange(format!("CM ring needs even n, got {n}")));
    }
    let net = build_ring(n)?;
    check_count(omegas, n)?;
    let sources = net.sources().iter().map(|s| color_source(&s.id, 2, 2)).collect();
    let bases = net
        .parties()
        .iter()
        .zip(omegas)
        .enumerate()
        .map(|(j, (id, w))| {
            let flipped = j % 2 == 1;
            let (lo, hi): (&[u32], &[u32]) = if flipped {
                (&[1, 0], &[0, 1])
            } else {
                (&[0, 1], &[1, 0])
            };
            let mut v = vec![
                comp(OutcomeLabel::ColorMatch(0), &[0, 0]),
                comp(OutcomeLabel::ColorMatch(1), &[1, 1]),
            ];
            for (r, row) in w.iter().enumerate() {
                v.push(mix(OutcomeLabel::Ambiguous(r as u32 + 1), row, [lo, hi]));
            }
            basis(id, v)
        })
        .collect();
    Ok((
        net,
        QuantumStrategy {
            kind: StrategyKind::ColorMatching,
            family: Some(Family::Ring),
            sources,
            bases,
        },
    ))
}

/// Relabels a TC ring outcome of party `j` (0-based) into the matching
/// outcome of [`make_ring_cm`].
pub fn ring_tc_to_cm_label(j: usize, l: &OutcomeLabel) -> OutcomeLabel {
    let flipped = j % 2 == 1;
    match l {
        OutcomeLabel::TokenCount { extra: Some(r), .. } => OutcomeLabel::Ambiguous(*r),
        OutcomeLabel::TokenCount { count: 0, .. } => OutcomeLabel::ColorMatch(u32::from(flipped)),
        OutcomeLabel::TokenCount { count: 2, .. } => OutcomeLabel::ColorMatch(u32::from(!flipped)),
        other => other.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneTwoParams {
    pub a: Omega3,
    pub b: Omega3,
    pub c: Omega3,
    pub d: Omega3,
}

impl OneTwoParams {
    /// Equal `R³_x(θ)` coefficients for every party.
    pub fn rotation(theta: f64) -> Self {
        let w = RotationParams::new(theta).omega3();
        Self {
            a: w,
            b: w,
            c: w,
            d: w,
        }
    }
}

/// The 1-2 network: bipartite source λ on {A, D}, tripartite μ on
/// {A, B, C} and ν on {B, C, D}.
pub fn one_two_network() -> Network {
    Network::builder()
        .parties(["A", "B", "C", "D"])
        .source("lambda", ["A", "D"])
        .source("mu", ["A", "B", "C"])
        .source("nu", ["B", "C", "D"])
        .order("A", ["lambda", "mu"])
        .order("B", ["mu", "nu"])
        .order("C", ["mu", "nu"])
        .order("D", ["nu", "lambda"])
        .build()
        .expect("1-2 network is well formed")
}

pub fn make_1_2_cm(p: &OneTwoParams) -> Result<(Network, QuantumStrategy)> {
    for (w, name) in [(&p.a, "A"), (&p.b, "B"), (&p.c, "C"), (&p.d, "D")] {
        check_omega(w, name)?;
    }
    let net = one_two_network();
    let sources = net
        .sources()
        .iter()
        .map(|s| color_source(&s.id, 3, s.parties.len()))
        .collect();
    // (ambiguous tuples in pattern order, revealed tuples) per party
    let layout: [([[u32; 2]; 3], [[u32; 2]; 3], &Omega3); 4] = [
        ([[0, 1], [1, 2], [2, 0]], [[2, 1], [1, 0], [0, 2]], &p.a),
        ([[1, 2], [2, 0], [0, 1]], [[1, 0], [0, 2], [2, 1]], &p.b),
        ([[1, 2], [2, 0], [0, 1]], [[1, 0], [0, 2], [2, 1]], &p.c),
        ([[2, 0], [0, 1], [1, 2]], [[0, 2], [2, 1], [1, 0]], &p.d),
    ];
    let bases = net
        .parties()
        .iter()
        .zip(layout)
        .map(|(id, (amb, rev, w))| {
            let mut v: Vec<BasisVector> = (0..3)
                .map(|c| comp(OutcomeLabel::ColorMatch(c), &[c, c]))
                .collect();
            for t in rev {
                v.push(comp(OutcomeLabel::RevealedTuple(t.to_vec()), &t));
            }
            for (i, row) in w.iter().enumerate() {
                v.push(mix(
                    OutcomeLabel::Ambiguous(i as u32 + 1),
                    row,
                    [&amb[0], &amb[1], &amb[2]],
                ));
            }
            basis(id, v)
        })
        .collect();
    Ok((
        net,
        QuantumStrategy {
            kind: StrategyKind::ColorMatching,
            family: Some(Family::OneTwo),
            sources,
            bases,
        },
    ))
}

/// Complete network `K_n` with two colors. Party `A_j` measures the
/// computational basis of its `n−1` qubits except on `|01…10⟩` and
/// `|10…01⟩`, where it uses `v_r = ω[r][0]|01…10⟩ + ω[r][1]|10…01⟩`.
pub fn make_complete_cm(n: usize, omegas: &[Omega2]) -> Result<(Network, QuantumStrategy)> {
    if n < 4 {
        return Err(Error::OutOfRange(format!("complete network needs n >= 4, got {n}")));
    }
    let net = build_complete(n)?;
    check_count(omegas, n)?;
    let sources = net.sources().iter().map(|s| color_source(&s.id, 2, 2)).collect();
    let k = n - 1;
    let mut p0 = vec![1u32; k];
    p0[0] = 0;
    p0[k - 1] = 0;
    let p1: Tuple = p0.iter().map(|b| 1 - b).collect();
    let bases = net
        .parties()
        .iter()
        .zip(omegas)
        .map(|(id, w)| {
            let mut v = Vec::with_capacity(1 << k);
            for t in all_tuples(&vec![2; k]) {
                if t == p0 || t == p1 {
                    continue;
                }
                let label = if t.iter().all(|&b| b == 0) {
                    OutcomeLabel::ColorMatch(0)
                } else if t.iter().all(|&b| b == 1) {
                    OutcomeLabel::ColorMatch(1)
                } else {
                    OutcomeLabel::RevealedTuple(t.clone())
                };
                v.push(comp(label, &t));
            }
            for (r, row) in w.iter().enumerate() {
                v.push(mix(OutcomeLabel::Ambiguous(r as u32 + 1), row, [&p0, &p1]));
            }
            basis(id, v)
        })
        .collect();
    Ok((
        net,
        QuantumStrategy {
            kind: StrategyKind::ColorMatching,
            family: Some(Family::Complete),
            sources,
            bases,
        },
    ))
}

/// Color pairs `(a, b)`, 1-based, that party `A_ij` cannot resolve.
pub fn coloring_ambiguous_pairs(n: usize, i: usize, j: usize) -> Vec<(u32, u32)> {
    let s = (i + j) as u32;
    let s2 = 2 * (n as u32 + 1) - s;
    let n = n as u32;
    (1..=n)
        .flat_map(|a| (1..=n).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && (a + b == s || a + b == s2))
        .collect()
}

/// Complete-graph coloring network with `n` colors. Colors `1..=n` are
/// carried as symbols `0..n`. Each party `A_ij` (parties in
/// lexicographic order of `(i, j)`) uses its 2×2 block `ω` on the pair
/// of tuples `(i, j)` and `(n+1−i, n+1−j)`; the remaining unresolvable
/// pairs are measured individually and still labelled ambiguous.
pub fn make_graph_coloring_cm(n: usize, omegas: &[Omega2]) -> Result<(Network, QuantumStrategy)> {
    if n < 5 {
        return Err(Error::OutOfRange(format!("coloring family needs n >= 5, got {n}")));
    }
    let net = build_edge_network(n)?;
    check_count(omegas, net.num_parties())?;
    let sources = net
        .sources()
        .iter()
        .map(|s| color_source(&s.id, n as u32, s.parties.len()))
        .collect();
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect();
    let m = n as u32;
    let bases = net
        .parties()
        .iter()
        .zip(&pairs)
        .zip(omegas)
        .map(|((id, &(i, j)), w)| {
            let amb = coloring_ambiguous_pairs(n, i, j);
            let sym = |(a, b): (u32, u32)| vec![a - 1, b - 1];
            let first = sym((i as u32, j as u32));
            let second = sym((m + 1 - i as u32, m + 1 - j as u32));
            let mut v = Vec::with_capacity(n * n);
            for a in 1..=m {
                for b in 1..=m {
                    if a == b {
                        v.push(comp(OutcomeLabel::ColorMatch(a), &sym((a, b))));
                    } else if !amb.contains(&(a, b)) {
                        v.push(comp(OutcomeLabel::RevealedTuple(sym((a, b))), &sym((a, b))));
                    }
                }
            }
            for (r, row) in w.iter().enumerate() {
                v.push(mix(
                    OutcomeLabel::Ambiguous(r as u32 + 1),
                    row,
                    [&first, &second],
                ));
            }
            let mut r = 3;
            for &pair in &amb {
                let t = sym(pair);
                if t != first && t != second {
                    v.push(comp(OutcomeLabel::Ambiguous(r), &t));
                    r += 1;
                }
            }
            basis(id, v)
        })
        .collect();
    Ok((
        net,
        QuantumStrategy {
            kind: StrategyKind::ColorMatching,
            family: Some(Family::GraphColoring),
            sources,
            bases,
        },
    ))
}

/// A catalog family addressed by name: `5-0`, `ring:n`, `1-2`, `kn:n`,
/// `coloring:n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogEntry {
    FiveZero,
    Ring(usize),
    OneTwo,
    Complete(usize),
    Coloring(usize),
}

impl FromStr for CatalogEntry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let size = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad size in catalog name {s:?}")))
        };
        match s.split_once(':') {
            None if s == "5-0" => Ok(Self::FiveZero),
            None if s == "1-2" => Ok(Self::OneTwo),
            Some(("ring", n)) => Ok(Self::Ring(size(n)?)),
            Some(("kn", n)) => Ok(Self::Complete(size(n)?)),
            Some(("coloring", n)) => Ok(Self::Coloring(size(n)?)),
            _ => Err(Error::Parse(format!(
                "unknown catalog name {s:?} (expected 5-0, ring:n, 1-2, kn:n, coloring:n)"
            ))),
        }
    }
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FiveZero => write!(f, "5-0"),
            Self::Ring(n) => write!(f, "ring:{n}"),
            Self::OneTwo => write!(f, "1-2"),
            Self::Complete(n) => write!(f, "kn:{n}"),
            Self::Coloring(n) => write!(f, "coloring:{n}"),
        }
    }
}

impl CatalogEntry {
    /// Builds the family member at angle `θ`. The 5-0 and 1-2 networks use
    /// rotation coefficients; the two-outcome families use
    /// `[[sin θ, cos θ], [cos θ, −sin θ]]` at every party.
    pub fn build(self, theta: f64) -> Result<(Network, QuantumStrategy)> {
        match self {
            Self::FiveZero => make_5_0_tc(&FiveZeroParams::rotation(theta)),
            Self::OneTwo => make_1_2_cm(&OneTwoParams::rotation(theta)),
            Self::Ring(n) => make_ring_tc(n, &vec![ring_omega(theta); n]),
            Self::Complete(n) => make_complete_cm(n, &vec![ring_omega(theta); n]),
            Self::Coloring(n) => make_graph_coloring_cm(n, &vec![ring_omega(theta); n * (n - 1) / 2]),
        }
    }

    /// Like [`build`](Self::build), but the two-outcome families use
    /// `λ = sin θ` everywhere except the last party, which gets `λ = 1/√2`.
    /// The 5-0 and 1-2 families are unaffected.
    pub fn build_asymmetric(self, theta: f64) -> Result<(Network, QuantumStrategy)> {
        let eps = theta.sin();
        match self {
            Self::Ring(n) => make_ring_tc(n, &asymmetric_omegas(n, eps)),
            Self::Complete(n) => make_complete_cm(n, &asymmetric_omegas(n, eps)),
            Self::Coloring(n) => make_graph_coloring_cm(n, &asymmetric_omegas(n * (n - 1) / 2, eps)),
            other => other.build(theta),
        }
    }
}
