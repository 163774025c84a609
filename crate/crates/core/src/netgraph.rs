//! Bipartite source/party networks and the structural properties that gate
//! token-counting and color-matching rigidity.
//!
//! A [`Network`] stores, besides the source → party incidence, an explicit
//! per-party ordering of incident sources. Measurement bases are written
//! over tuples in that order, so it is data and not something derived from
//! identifiers.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lpcore::{self, FeasibilityProblem, FeasibilityResult, Row};

/// Tolerance used for the PFIS strictness test and its equality rows.
pub const PFIS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Source {
    pub id: String,
    /// Indices of connected parties, in the source's own subsystem order.
    pub parties: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    parties: Vec<String>,
    sources: Vec<Source>,
    /// For each party, incident source indices in subsystem order.
    party_order: Vec<Vec<usize>>,
    /// For each party, `(source, position of this party inside the source)`
    /// in subsystem order.
    incoming: Vec<Vec<(usize, usize)>>,
}

/// Incremental constructor for [`Network`].
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    parties: Vec<String>,
    sources: Vec<(String, Vec<String>)>,
    order: BTreeMap<String, Vec<String>>,
    allow_redundant: bool,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn party(mut self, id: impl Into<String>) -> Self {
        self.parties.push(id.into());
        self
    }

    pub fn parties<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.parties.extend(ids.into_iter().map(Into::into));
        self
    }

    pub fn source<I, S>(mut self, id: impl Into<String>, parties: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.sources
            .push((id.into(), parties.into_iter().map(Into::into).collect()));
        self
    }

    /// Fixes the subsystem order of `party`. Parties without an explicit
    /// order take their sources in source declaration order.
    pub fn order<I, S>(mut self, party: impl Into<String>, sources: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.order
            .insert(party.into(), sources.into_iter().map(Into::into).collect());
        self
    }

    /// Accept networks where one source's party set contains another's.
    /// Such networks are outside the standing assumptions of the rigidity
    /// results but are useful as counterexamples.
    pub fn allow_redundant_sources(mut self) -> Self {
        self.allow_redundant = true;
        self
    }

    pub fn build(self) -> Result<Network> {
        let bad = |m: String| Error::InvalidNetwork(m);
        if self.parties.is_empty() {
            return Err(bad("network has no parties".into()));
        }
        if self.sources.is_empty() {
            return Err(bad("network has no sources".into()));
        }
        let mut party_idx = HashMap::new();
        for (j, p) in self.parties.iter().enumerate() {
            if party_idx.insert(p.as_str(), j).is_some() {
                return Err(bad(format!("duplicate party id {p:?}")));
            }
        }
        let mut source_idx = HashMap::new();
        let mut sources = Vec::with_capacity(self.sources.len());
        for (i, (id, ps)) in self.sources.iter().enumerate() {
            if party_idx.contains_key(id.as_str()) {
                return Err(bad(format!("id {id:?} used for both a party and a source")));
            }
            if source_idx.insert(id.as_str(), i).is_some() {
                return Err(bad(format!("duplicate source id {id:?}")));
            }
            if ps.is_empty() {
                return Err(bad(format!("source {id:?} connects to no party")));
            }
            let mut idxs = Vec::with_capacity(ps.len());
            for p in ps {
                let j = *party_idx
                    .get(p.as_str())
                    .ok_or_else(|| bad(format!("source {id:?} names unknown party {p:?}")))?;
                if idxs.contains(&j) {
                    return Err(bad(format!("source {id:?} lists party {p:?} twice")));
                }
                idxs.push(j);
            }
            sources.push(Source { id: id.clone(), parties: idxs });
        }

        let mut default_order: Vec<Vec<usize>> = vec![Vec::new(); self.parties.len()];
        for (i, s) in sources.iter().enumerate() {
            for &j in &s.parties {
                default_order[j].push(i);
            }
        }
        for (p, _) in &self.order {
            if !party_idx.contains_key(p.as_str()) {
                return Err(bad(format!("subsystem order given for unknown party {p:?}")));
            }
        }
        let mut party_order = Vec::with_capacity(self.parties.len());
        for (j, p) in self.parties.iter().enumerate() {
            if default_order[j].is_empty() {
                return Err(bad(format!("party {p:?} has no source")));
            }
            let order = match self.order.get(p) {
                None => default_order[j].clone(),
                Some(names) => {
                    let mut v = Vec::with_capacity(names.len());
                    for n in names {
                        let i = *source_idx.get(n.as_str()).ok_or_else(|| {
                            bad(format!("order of {p:?} names unknown source {n:?}"))
                        })?;
                        v.push(i);
                    }
                    let mut a: Vec<usize> = v.clone();
                    a.sort_unstable();
                    let mut b = default_order[j].clone();
                    b.sort_unstable();
                    if a != b {
                        return Err(bad(format!(
                            "order of {p:?} is not a permutation of its incident sources"
                        )));
                    }
                    v
                }
            };
            party_order.push(order);
        }

        let incoming = party_order
            .iter()
            .enumerate()
            .map(|(j, order)| {
                order
                    .iter()
                    .map(|&i| {
                        let pos = sources[i].parties.iter().position(|&q| q == j).unwrap();
                        (i, pos)
                    })
                    .collect()
            })
            .collect();

        let net = Network {
            parties: self.parties,
            sources,
            party_order,
            incoming,
        };
        if !self.allow_redundant {
            if let Some((a, b)) = net.redundant_pair() {
                return Err(bad(format!(
                    "source {:?} is redundant: its parties are all connected to {:?}",
                    net.sources[b].id, net.sources[a].id
                )));
            }
        }
        Ok(net)
    }
}

impl Network {
    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::new()
    }

    pub fn parties(&self) -> &[String] {
        &self.parties
    }

    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn num_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn party_index(&self, id: &str) -> Option<usize> {
        self.parties.iter().position(|p| p == id)
    }

    pub fn source_index(&self, id: &str) -> Option<usize> {
        self.sources.iter().position(|s| s.id == id)
    }

    /// Incident sources of party `j` in subsystem order.
    pub fn party_sources(&self, j: usize) -> &[usize] {
        &self.party_order[j]
    }

    /// `(source, slot inside that source)` for each subsystem party `j` receives.
    pub fn incoming(&self, j: usize) -> &[(usize, usize)] {
        &self.incoming[j]
    }

    pub fn connected(&self, i: usize, j: usize) -> bool {
        self.sources[i].parties.contains(&j)
    }

    fn party_sets(&self) -> Vec<BTreeSet<usize>> {
        self.sources
            .iter()
            .map(|s| s.parties.iter().copied().collect())
            .collect()
    }

    /// First pair `(a, b)` of distinct sources with parties(b) ⊆ parties(a).
    pub fn redundant_pair(&self) -> Option<(usize, usize)> {
        let sets = self.party_sets();
        for a in 0..sets.len() {
            for b in 0..sets.len() {
                if a != b && sets[b].is_subset(&sets[a]) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn common_sources(&self, j: usize, k: usize) -> Vec<usize> {
        self.party_order[j]
            .iter()
            .copied()
            .filter(|i| self.party_order[k].contains(i))
            .collect()
    }

    /// No pair of distinct parties shares two or more common sources.
    pub fn check_ndcs(&self) -> bool {
        let n = self.num_parties();
        (0..n).all(|j| (j + 1..n).all(|k| self.common_sources(j, k).len() < 2))
    }

    /// Every source is the only common source of some pair of its parties.
    pub fn check_ecs(&self) -> bool {
        self.sources.iter().enumerate().all(|(i, s)| {
            s.parties.iter().enumerate().any(|(a, &j)| {
                s.parties[a + 1..]
                    .iter()
                    .any(|&k| self.common_sources(j, k) == [i])
            })
        })
    }

    /// Bi-adjacency matrix `B[i][j] = 1` iff source `i` feeds party `j`.
    pub fn biadjacency(&self) -> Vec<Vec<u8>> {
        self.sources
            .iter()
            .map(|s| {
                let mut row = vec![0; self.num_parties()];
                for &j in &s.parties {
                    row[j] = 1;
                }
                row
            })
            .collect()
    }

    /// Perfect fractional independent set: weights in (0,1) summing to one
    /// over every source neighbourhood. The returned weights maximise the
    /// distance of the smallest weight from {0, 1}; absence means the best
    /// such distance does not exceed [`PFIS_TOL`].
    pub fn find_pfis(&self) -> Option<PfisWeights> {
        let lo = 2.0 * PFIS_TOL;
        let mut best = self.pfis_at_slack(lo)?;
        let (mut lo, mut hi) = (lo, 0.5 + 1e-12);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            match self.pfis_at_slack(mid) {
                Some(w) => {
                    best = w;
                    lo = mid;
                }
                None => hi = mid,
            }
            if hi - lo < 1e-13 {
                break;
            }
        }
        Some(self.snap_pfis(&best).unwrap_or(best))
    }

    /// Rounds near-rational weights (denominator up to 64) when the rounded
    /// vector solves `B x = 1` to machine precision and keeps its slack.
    fn snap_pfis(&self, w: &PfisWeights) -> Option<PfisWeights> {
        let snapped: Vec<f64> = w
            .weights
            .iter()
            .map(|&x| {
                (1..=64u32).find_map(|q| {
                    let p = (x * q as f64).round();
                    ((x - p / q as f64).abs() < 1e-7).then(|| p / q as f64)
                })
            })
            .collect::<Option<_>>()?;
        let exact = self.sources.iter().all(|src| {
            let sum: f64 = src.parties.iter().map(|&j| snapped[j]).sum();
            (sum - 1.0).abs() < 1e-12
        });
        let slack = |v: &[f64]| v.iter().map(|&x| x.min(1.0 - x)).fold(f64::INFINITY, f64::min);
        let out = PfisWeights { weights: snapped };
        (exact && out.is_valid_for(self) && slack(&out.weights) >= slack(&w.weights) - 1e-7).then_some(out)
    }

    /// Weights with `s <= x_j <= 1 - s` and `B x = 1`, if any.
    ///
    /// Written with `x_j = s + u_j`, `u_j + w_j = 1 - 2s`, `u, w >= 0`.
    fn pfis_at_slack(&self, s: f64) -> Option<PfisWeights> {
        let n = self.num_parties();
        if 1.0 - 2.0 * s < 0.0 {
            return None;
        }
        let mut rows = Vec::new();
        for src in &self.sources {
            rows.push(Row {
                coeffs: src.parties.iter().map(|&j| (j, 1.0)).collect(),
                rhs: 1.0 - s * src.parties.len() as f64,
                tag: format!("source {}", src.id),
            });
        }
        for j in 0..n {
            rows.push(Row {
                coeffs: vec![(j, 1.0), (n + j, 1.0)],
                rhs: 1.0 - 2.0 * s,
                tag: format!("bound {}", self.parties[j]),
            });
        }
        let names = (0..n)
            .map(|j| format!("u_{}", self.parties[j]))
            .chain((0..n).map(|j| format!("w_{}", self.parties[j])))
            .collect();
        let problem = FeasibilityProblem::new(names, rows).ok()?;
        match lpcore::solve_feasibility(&problem) {
            Ok(FeasibilityResult::Feasible { witness }) => {
                let weights: Vec<f64> = witness[..n].iter().map(|u| s + u).collect();
                let w = PfisWeights { weights };
                w.is_valid_for(self).then_some(w)
            }
            _ => None,
        }
    }

    pub fn to_doc(&self) -> NetworkDoc {
        NetworkDoc {
            parties: self.parties.clone(),
            sources: self
                .sources
                .iter()
                .map(|s| SourceDoc {
                    id: s.id.clone(),
                    parties: s.parties.iter().map(|&j| self.parties[j].clone()).collect(),
                })
                .collect(),
            party_order: self
                .party_order
                .iter()
                .enumerate()
                .map(|(j, o)| {
                    (
                        self.parties[j].clone(),
                        o.iter().map(|&i| self.sources[i].id.clone()).collect(),
                    )
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("network serializes")
    }

    /// Parses a network document, rejecting redundant sources.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NetworkDoc = serde_json::from_str(text)?;
        doc.into_network(false)
    }

    /// Parses a network document, accepting redundant sources.
    pub fn from_json_permissive(text: &str) -> Result<Self> {
        let doc: NetworkDoc = serde_json::from_str(text)?;
        doc.into_network(true)
    }
}

/// On-disk form of a [`Network`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct NetworkDoc {
    pub parties: Vec<String>,
    pub sources: Vec<SourceDoc>,
    #[serde(default)]
    pub party_order: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SourceDoc {
    pub id: String,
    pub parties: Vec<String>,
}

impl NetworkDoc {
    pub fn into_network(self, allow_redundant: bool) -> Result<Network> {
        let mut b = NetworkBuilder::new().parties(self.parties);
        for s in self.sources {
            b = b.source(s.id, s.parties);
        }
        for (p, o) in self.party_order {
            b = b.order(p, o);
        }
        if allow_redundant {
            b = b.allow_redundant_sources();
        }
        b.build()
    }
}

/// PFIS weights, one per party in network order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfisWeights {
    pub weights: Vec<f64>,
}

impl PfisWeights {
    pub fn uniform(net: &Network, x: f64) -> Self {
        Self {
            weights: vec![x; net.num_parties()],
        }
    }

    pub fn get(&self, j: usize) -> f64 {
        self.weights[j]
    }

    pub fn is_valid_for(&self, net: &Network) -> bool {
        self.weights.len() == net.num_parties()
            && self
                .weights
                .iter()
                .all(|&x| x > PFIS_TOL && x < 1.0 - PFIS_TOL)
            && net.sources().iter().all(|s| {
                let sum: f64 = s.parties.iter().map(|&j| self.weights[j]).sum();
                (sum - 1.0).abs() <= PFIS_TOL
            })
    }

    pub fn by_party<'a>(&'a self, net: &'a Network) -> BTreeMap<&'a str, f64> {
        net.parties()
            .iter()
            .map(String::as_str)
            .zip(self.weights.iter().copied())
            .collect()
    }
}

fn check_size(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::OutOfRange(format!("network size must be >= 3, got {n}")));
    }
    Ok(())
}

/// Ring `R_n`: `S_i` feeds `A_i` and `A_{i+1}` (indices mod n); party `A_j`
/// orders its subsystems as `(S_{j-1}, S_j)`.
pub fn build_ring(n: usize) -> Result<Network> {
    check_size(n)?;
    let party = |j: usize| format!("A{}", (j + n - 1) % n + 1);
    let source = |i: usize| format!("S{}", (i + n - 1) % n + 1);
    let mut b = NetworkBuilder::new().parties((1..=n).map(party));
    for i in 1..=n {
        b = b.source(source(i), [party(i), party(i + 1)]);
    }
    for j in 1..=n {
        b = b.order(party(j), [source(j + n - 1), source(j)]);
    }
    b.build()
}

/// Complete network `K_n`: one bipartite source `S_{jk}` per party pair.
/// Party `A_j` orders its sources clockwise, starting with the source shared
/// with `A_{j+1}` and ending with the one shared with `A_{j-1}`.
pub fn build_complete(n: usize) -> Result<Network> {
    check_size(n)?;
    let party = |j: usize| format!("A{j}");
    let source = |a: usize, b: usize| {
        let (a, b) = (a.min(b), a.max(b));
        format!("S{a}_{b}")
    };
    let mut b = NetworkBuilder::new().parties((1..=n).map(party));
    for j in 1..=n {
        for k in j + 1..=n {
            b = b.source(source(j, k), [party(j), party(k)]);
        }
    }
    for j in 1..=n {
        let order = (1..n).map(|d| source(j, (j - 1 + d) % n + 1));
        b = b.order(party(j), order);
    }
    b.build()
}

/// Network of a complete graph's edges: sources are the vertices
/// `S_1..S_n`, parties are the edges `A_{ij}` (i < j) fed by `S_i`, `S_j` in
/// that order.
pub fn build_edge_network(n: usize) -> Result<Network> {
    check_size(n)?;
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect();
    let party = |i: usize, j: usize| format!("A{i}_{j}");
    let mut b = NetworkBuilder::new().parties(pairs.iter().map(|&(i, j)| party(i, j)));
    for v in 1..=n {
        let ps = pairs
            .iter()
            .filter(|&&(i, j)| i == v || j == v)
            .map(|&(i, j)| party(i, j));
        b = b.source(format!("S{v}"), ps);
    }
    for &(i, j) in &pairs {
        b = b.order(party(i, j), [format!("S{i}"), format!("S{j}")]);
    }
    b.build()
}
