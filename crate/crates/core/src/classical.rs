//! Classical network strategies and the hidden patterns (token routings,
//! source colorings) that the rigidity arguments range over.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgraph::Network;
use crate::quantum::{advance, JointDistribution, OutcomeLabel, Tuple};

pub const PMF_TOL: f64 = 1e-12;

/// A source's finite alphabet with its pmf. Each value is a tuple with one
/// entry per connected party (in the source's party order); a party only
/// sees its own entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSource {
    pub id: String,
    pub values: Vec<(Tuple, f64)>,
}

/// Response map of one party: received tuple to pmf over labels.
pub type Response = BTreeMap<Tuple, Vec<(OutcomeLabel, f64)>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalStrategy {
    pub sources: Vec<ClassicalSource>,
    pub responses: Vec<Response>,
}

fn check_pmf(at: &str, ps: impl Iterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    for p in ps {
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::InvalidClassical(format!("{at}: bad probability {p}")));
        }
        total += p;
    }
    if (total - 1.0).abs() > PMF_TOL {
        return Err(Error::InvalidClassical(format!("{at}: mass {total}")));
    }
    Ok(())
}

impl ClassicalStrategy {
    pub fn new(net: &Network, sources: Vec<ClassicalSource>, responses: Vec<Response>) -> Result<Self> {
        if sources.len() != net.num_sources() || responses.len() != net.num_parties() {
            return Err(Error::InvalidClassical(
                "source or party count does not match the network".into(),
            ));
        }
        for (src, s) in net.sources().iter().zip(&sources) {
            if s.values.iter().any(|(t, _)| t.len() != src.parties.len()) {
                return Err(Error::InvalidClassical(format!(
                    "{}: value arity differs from degree",
                    s.id
                )));
            }
            check_pmf(&s.id, s.values.iter().map(|v| v.1))?;
        }
        for (j, resp) in responses.iter().enumerate() {
            for (t, pmf) in resp {
                let at = format!("{} on {t:?}", net.parties()[j]);
                check_pmf(&at, pmf.iter().map(|v| v.1))?;
            }
        }
        Ok(Self { sources, responses })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("classical strategy serializes")
    }
}

/// Exact joint distribution of a classical strategy, summing over every
/// combination of source values.
pub fn classical_joint(net: &Network, strat: &ClassicalStrategy) -> Result<JointDistribution> {
    classical_joint_capped(net, strat, 1 << 24)
}

pub fn classical_joint_capped(
    net: &Network,
    strat: &ClassicalStrategy,
    cap: u128,
) -> Result<JointDistribution> {
    let size: u128 = strat.sources.iter().map(|s| s.values.len() as u128).product();
    if size > cap {
        return Err(Error::DimensionOverflow { size, cap });
    }
    let nparties = net.num_parties();
    let mut atoms: BTreeMap<Vec<OutcomeLabel>, f64> = BTreeMap::new();
    let mut cursor = vec![0usize; strat.sources.len()];
    if strat.sources.iter().any(|s| s.values.is_empty()) {
        return Err(Error::InvalidClassical("empty source alphabet".into()));
    }
    loop {
        let p: f64 = cursor
            .iter()
            .enumerate()
            .map(|(i, &c)| strat.sources[i].values[c].1)
            .product();
        if p > 0.0 {
            let mut lists = Vec::with_capacity(nparties);
            for j in 0..nparties {
                let t: Tuple = net
                    .incoming(j)
                    .iter()
                    .map(|&(s, slot)| strat.sources[s].values[cursor[s]].0[slot])
                    .collect();
                let pmf = strat.responses[j].get(&t).ok_or_else(|| {
                    Error::InvalidClassical(format!(
                        "{} has no response to {t:?}",
                        net.parties()[j]
                    ))
                })?;
                lists.push(pmf);
            }
            if lists.iter().all(|l| !l.is_empty()) {
                let mut idx = vec![0usize; nparties];
                loop {
                    let mut q = p;
                    let mut key = Vec::with_capacity(nparties);
                    for (j, l) in lists.iter().enumerate() {
                        q *= l[idx[j]].1;
                        key.push(l[idx[j]].0.clone());
                    }
                    if q > 0.0 {
                        *atoms.entry(key).or_insert(0.0) += q;
                    }
                    if !advance(&mut idx, |j| lists[j].len()) {
                        break;
                    }
                }
            }
        }
        if !advance(&mut cursor, |i| strat.sources[i].values.len()) {
            break;
        }
    }
    Ok(JointDistribution {
        parties: net.parties().to_vec(),
        atoms,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    /// Tokens sent by each source to each of its parties (source slot order).
    TokenRouting(Vec<Tuple>),
    /// One color per source.
    Coloring(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HiddenPattern {
    /// 1-based, in lexicographic order of the pattern map.
    pub index: usize,
    pub kind: PatternKind,
}

/// Explicit, id-keyed form of a pattern for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternDoc {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub routing: Option<BTreeMap<String, BTreeMap<String, u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coloring: Option<BTreeMap<String, u32>>,
}

impl HiddenPattern {
    /// The value source `i` emits under this pattern, one symbol per slot.
    pub fn source_tuple(&self, net: &Network, i: usize) -> Tuple {
        match &self.kind {
            PatternKind::TokenRouting(r) => r[i].clone(),
            PatternKind::Coloring(c) => vec![c[i]; net.sources()[i].parties.len()],
        }
    }

    /// The tuple party `j` receives, in its subsystem order.
    pub fn delivered(&self, net: &Network, j: usize) -> Tuple {
        net.incoming(j)
            .iter()
            .map(|&(s, slot)| match &self.kind {
                PatternKind::TokenRouting(r) => r[s][slot],
                PatternKind::Coloring(c) => c[s],
            })
            .collect()
    }

    pub fn to_doc(&self, net: &Network) -> PatternDoc {
        match &self.kind {
            PatternKind::TokenRouting(r) => PatternDoc {
                index: self.index,
                routing: Some(
                    net.sources()
                        .iter()
                        .zip(r)
                        .map(|(s, t)| {
                            let m = s
                                .parties
                                .iter()
                                .zip(t)
                                .map(|(&j, &k)| (net.parties()[j].clone(), k))
                                .collect();
                            (s.id.clone(), m)
                        })
                        .collect(),
                ),
                coloring: None,
            },
            PatternKind::Coloring(c) => PatternDoc {
                index: self.index,
                routing: None,
                coloring: Some(
                    net.sources()
                        .iter()
                        .zip(c)
                        .map(|(s, &k)| (s.id.clone(), k))
                        .collect(),
                ),
            },
        }
    }
}

/// Compositions of `total` into `parts` nonnegative parts, lexicographically.
fn compositions(total: u32, parts: usize) -> Vec<Tuple> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All routings of `eta[i]` tokens from each source over its parties whose
/// per-party totals equal `target`.
pub fn enumerate_token_patterns(net: &Network, eta: &[u32], target: &[u32]) -> Vec<HiddenPattern> {
    if eta.len() != net.num_sources()
        || target.len() != net.num_parties()
        || eta.iter().sum::<u32>() != target.iter().sum::<u32>()
    {
        return Vec::new();
    }
    let options: Vec<Vec<Tuple>> = net
        .sources()
        .iter()
        .zip(eta)
        .map(|(s, &e)| compositions(e, s.parties.len()))
        .collect();
    let mut out = Vec::new();
    let mut load = vec![0u32; net.num_parties()];
    let mut chosen: Vec<Tuple> = Vec::new();
    route(net, &options, target, &mut load, &mut chosen, &mut out);
    out.into_iter()
        .enumerate()
        .map(|(k, r)| HiddenPattern {
            index: k + 1,
            kind: PatternKind::TokenRouting(r),
        })
        .collect()
}

fn route(
    net: &Network,
    options: &[Vec<Tuple>],
    target: &[u32],
    load: &mut [u32],
    chosen: &mut Vec<Tuple>,
    out: &mut Vec<Vec<Tuple>>,
) {
    let i = chosen.len();
    if i == options.len() {
        if load == target {
            out.push(chosen.clone());
        }
        return;
    }
    let parties = &net.sources()[i].parties;
    for opt in &options[i] {
        let fits = parties
            .iter()
            .zip(opt)
            .all(|(&j, &k)| load[j] + k <= target[j]);
        if !fits {
            continue;
        }
        for (&j, &k) in parties.iter().zip(opt) {
            load[j] += k;
        }
        chosen.push(opt.clone());
        route(net, options, target, load, chosen, out);
        chosen.pop();
        for (&j, &k) in parties.iter().zip(opt) {
            load[j] -= k;
        }
    }
}

/// What a party's observed label says about the colors it received.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorConstraint {
    Any,
    /// All incident sources carry this color.
    Match(u32),
    /// Incident sources carry exactly this tuple.
    Revealed(Tuple),
    /// Not all equal, and not one of the party's revealed tuples.
    Ambiguous { revealed: Vec<Tuple> },
}

impl ColorConstraint {
    pub fn admits(&self, received: &[u32]) -> bool {
        match self {
            Self::Any => true,
            Self::Match(c) => received.iter().all(|x| x == c),
            Self::Revealed(t) => received == t.as_slice(),
            Self::Ambiguous { revealed } => {
                let all_equal = received.windows(2).all(|w| w[0] == w[1]);
                !all_equal && !revealed.iter().any(|t| t.as_slice() == received)
            }
        }
    }
}

/// All source colorings with `colors` colors consistent with every party's
/// constraint, in lexicographic order.
pub fn enumerate_color_patterns(
    net: &Network,
    colors: u32,
    constraints: &[ColorConstraint],
) -> Vec<HiddenPattern> {
    if constraints.len() != net.num_parties() {
        return Vec::new();
    }
    // a party can be checked once its last incident source is colored
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); net.num_sources()];
    for j in 0..net.num_parties() {
        if let Some(&last) = net.party_sources(j).iter().max() {
            ready[last].push(j);
        }
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(net.num_sources());
    color(net, colors, constraints, &ready, &mut chosen, &mut out);
    out.into_iter()
        .enumerate()
        .map(|(k, c)| HiddenPattern {
            index: k + 1,
            kind: PatternKind::Coloring(c),
        })
        .collect()
}

fn color(
    net: &Network,
    colors: u32,
    constraints: &[ColorConstraint],
    ready: &[Vec<usize>],
    chosen: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    let i = chosen.len();
    if i == net.num_sources() {
        out.push(chosen.clone());
        return;
    }
    for c in 0..colors {
        chosen.push(c);
        let ok = ready[i].iter().all(|&j| {
            let got: Tuple = net.party_sources(j).iter().map(|&s| chosen[s]).collect();
            constraints[j].admits(&got)
        });
        if ok {
            color(net, colors, constraints, ready, chosen, out);
        }
        chosen.pop();
    }
}
