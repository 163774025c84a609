//! Pure-state network strategies: per-source amplitude maps, per-party
//! projective bases with semantic outcome labels, and exact simulation of
//! the joint output distribution.
//!
//! Simulation enumerates the product of the sources' amplitude supports
//! instead of materialising the global state vector, so families whose
//! global space is astronomically large but whose sources are sparse
//! (coherent superpositions of a few color tuples) stay cheap.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::Family;
use crate::classical::{ClassicalSource, ClassicalStrategy};
use crate::error::{Error, Result};
use crate::netgraph::{Network, NetworkDoc};

pub type C64 = Complex64;
/// One symbol per subsystem, in the owning source's or party's order.
pub type Tuple = Vec<u32>;

pub const NORM_TOL: f64 = 1e-12;
pub const ORTHO_TOL: f64 = 1e-10;
/// Atoms below this are dropped from simulated distributions.
pub const ATOM_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeLabel {
    /// Received token count, with an optional index for the ambiguous
    /// refinement (which `|χ⟩` fired).
    TokenCount { count: u32, extra: Option<u32> },
    ColorMatch(u32),
    RevealedTuple(Tuple),
    Ambiguous(u32),
}

impl OutcomeLabel {
    pub fn token(count: u32) -> Self {
        Self::TokenCount { count, extra: None }
    }

    pub fn token_extra(count: u32, extra: u32) -> Self {
        Self::TokenCount {
            count,
            extra: Some(extra),
        }
    }

    /// Outputs that hide the provenance of what was received.
    pub fn is_ambiguous(&self) -> bool {
        matches!(
            self,
            Self::TokenCount { extra: Some(_), .. } | Self::Ambiguous(_)
        )
    }
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TokenCount { count, extra: None } => write!(f, "n{count}"),
            Self::TokenCount {
                count,
                extra: Some(e),
            } => write!(f, "n{count}.{e}"),
            Self::ColorMatch(c) => write!(f, "m{c}"),
            Self::RevealedTuple(t) => {
                write!(f, "|")?;
                for s in t {
                    write!(f, "{s}")?;
                }
                write!(f, ">")
            }
            Self::Ambiguous(r) => write!(f, "chi{r}"),
        }
    }
}

impl FromStr for OutcomeLabel {
    type Err = Error;

    /// Parses the display forms `n1`, `n1.2`, `m0`, `|01>`, `chi1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("cannot parse outcome label {s:?}"));
        let num = |v: &str| v.parse::<u32>().map_err(|_| bad());
        if let Some(r) = s.strip_prefix("chi") {
            return Ok(Self::Ambiguous(num(r)?));
        }
        if let Some(r) = s.strip_prefix('m') {
            return Ok(Self::ColorMatch(num(r)?));
        }
        if let Some(r) = s.strip_prefix('n') {
            return match r.split_once('.') {
                Some((c, e)) => Ok(Self::token_extra(num(c)?, num(e)?)),
                None => Ok(Self::token(num(r)?)),
            };
        }
        if let Some(r) = s.strip_prefix('|').and_then(|r| r.strip_suffix('>')) {
            if r.is_empty() {
                return Err(bad());
            }
            return r
                .chars()
                .map(|c| c.to_digit(10).ok_or_else(bad))
                .collect::<Result<Vec<_>>>()
                .map(Self::RevealedTuple);
        }
        Err(bad())
    }
}

/// Drops the ambiguous refinement index: `n1.2 -> n1`, `chi3 -> chi0`.
pub fn rigid_projection(l: &OutcomeLabel) -> OutcomeLabel {
    match l {
        OutcomeLabel::TokenCount { count, .. } => OutcomeLabel::token(*count),
        OutcomeLabel::Ambiguous(_) => OutcomeLabel::Ambiguous(0),
        other => other.clone(),
    }
}

/// Token-count marginal: like [`rigid_projection`], and revealed tuples
/// become the number of tokens they reveal.
pub fn count_projection(l: &OutcomeLabel) -> OutcomeLabel {
    match l {
        OutcomeLabel::RevealedTuple(t) => OutcomeLabel::token(t.iter().sum()),
        other => rigid_projection(other),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    TokenCounting,
    ColorMatching,
    Generic,
}

impl StrategyKind {
    /// The coarse-graining under which decoherence is invisible.
    pub fn projection(self) -> fn(&OutcomeLabel) -> OutcomeLabel {
        match self {
            Self::TokenCounting => count_projection,
            _ => rigid_projection,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceState {
    pub id: String,
    /// Local dimension of each emitted subsystem, in the source's party order.
    pub dims: Vec<u32>,
    pub amplitudes: BTreeMap<Tuple, C64>,
}

impl SourceState {
    pub fn new(id: impl Into<String>, dims: Vec<u32>) -> Self {
        Self {
            id: id.into(),
            dims,
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn with(mut self, tuple: Tuple, amp: C64) -> Self {
        *self.amplitudes.entry(tuple).or_default() += amp;
        self
    }

    /// Equal-weight superposition of the given tuples.
    pub fn uniform(id: impl Into<String>, dims: Vec<u32>, tuples: &[Tuple]) -> Self {
        let a = C64::new(1.0 / (tuples.len() as f64).sqrt(), 0.0);
        tuples
            .iter()
            .fold(Self::new(id, dims), |s, t| s.with(t.clone(), a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Nonzero support with amplitudes, in tuple order.
    pub fn support(&self) -> Vec<(&Tuple, C64)> {
        self.amplitudes
            .iter()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(t, a)| (t, *a))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisVector {
    pub label: OutcomeLabel,
    pub amplitudes: BTreeMap<Tuple, C64>,
}

impl BasisVector {
    pub fn computational(label: OutcomeLabel, tuple: Tuple) -> Self {
        Self {
            label,
            amplitudes: [(tuple, C64::new(1.0, 0.0))].into(),
        }
    }

    pub fn superposition(label: OutcomeLabel, terms: &[(Tuple, C64)]) -> Self {
        let mut amplitudes = BTreeMap::new();
        for (t, a) in terms {
            *amplitudes.entry(t.clone()).or_insert(C64::new(0.0, 0.0)) += a;
        }
        Self { label, amplitudes }
    }

    /// `⟨self|t⟩`.
    pub fn overlap(&self, t: &[u32]) -> C64 {
        self.amplitudes
            .get(t)
            .map(|a| a.conj())
            .unwrap_or_default()
    }

    fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .filter_map(|(t, a)| other.amplitudes.get(t).map(|b| a.conj() * b))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    pub party: String,
    pub vectors: Vec<BasisVector>,
}

impl MeasurementBasis {
    pub fn labels(&self) -> impl Iterator<Item = &OutcomeLabel> {
        self.vectors.iter().map(|v| &v.label)
    }

    pub fn vector(&self, label: &OutcomeLabel) -> Option<&BasisVector> {
        self.vectors.iter().find(|v| &v.label == label)
    }
}

/// Sources in network source order, bases in network party order.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    pub kind: StrategyKind,
    pub family: Option<Family>,
    pub sources: Vec<SourceState>,
    pub bases: Vec<MeasurementBasis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Structure,
    Normalization,
    Orthonormality,
    Completeness,
    TokenSupport,
    DuplicateLabel,
    SymbolRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Source or party id.
    pub at: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, at: &str, detail: String) {
        self.violations.push(Violation {
            kind,
            at: at.to_string(),
            detail,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "  {:?} at {}: {}", v.kind, v.at, v.detail)?;
        }
        Ok(())
    }
}

fn fmt_tuple(t: &[u32]) -> String {
    let s: Vec<String> = t.iter().map(u32::to_string).collect();
    format!("|{}>", s.join(","))
}

/// Local dimensions of party `j`'s received subsystems.
pub fn party_dims(net: &Network, strat: &QuantumStrategy, j: usize) -> Vec<u32> {
    net.incoming(j)
        .iter()
        .map(|&(s, slot)| strat.sources[s].dims.get(slot).copied().unwrap_or(0))
        .collect()
}

/// All tuples over the given local dimensions, lexicographically.
pub fn all_tuples(dims: &[u32]) -> Vec<Tuple> {
    let mut out = vec![Vec::new()];
    for &d in dims {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..d).map(move |s| {
                    let mut t = t.clone();
                    t.push(s);
                    t
                })
            })
            .collect();
    }
    out
}

fn in_range(t: &[u32], dims: &[u32]) -> bool {
    t.len() == dims.len() && t.iter().zip(dims).all(|(s, d)| s < d)
}

pub fn validate_strategy(net: &Network, strat: &QuantumStrategy) -> ValidationReport {
    use ViolationKind::*;
    let mut r = ValidationReport::default();

    if strat.sources.len() != net.num_sources() {
        r.push(
            Structure,
            "strategy",
            format!(
                "{} source states for {} sources",
                strat.sources.len(),
                net.num_sources()
            ),
        );
    }
    if strat.bases.len() != net.num_parties() {
        r.push(
            Structure,
            "strategy",
            format!(
                "{} bases for {} parties",
                strat.bases.len(),
                net.num_parties()
            ),
        );
    }
    if !r.is_valid() {
        return r;
    }

    for (src, st) in net.sources().iter().zip(&strat.sources) {
        if st.id != src.id {
            r.push(Structure, &st.id, format!("expected source {}", src.id));
        }
        if st.dims.len() != src.parties.len() {
            r.push(
                Structure,
                &st.id,
                format!(
                    "{} subsystems for {} connected parties",
                    st.dims.len(),
                    src.parties.len()
                ),
            );
            continue;
        }
        for t in st.amplitudes.keys() {
            if !in_range(t, &st.dims) {
                r.push(SymbolRange, &st.id, format!("tuple {} outside local dims", fmt_tuple(t)));
            }
        }
        let n = st.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            r.push(Normalization, &st.id, format!("squared norm {n}"));
        }
        if strat.kind == StrategyKind::TokenCounting {
            let sums: BTreeSet<u32> = st.support().iter().map(|(t, _)| t.iter().sum()).collect();
            if sums.len() > 1 {
                r.push(
                    TokenSupport,
                    &st.id,
                    format!("support mixes token numbers {sums:?}"),
                );
            }
        }
    }
    if !r.is_valid() {
        return r;
    }

    for (j, basis) in strat.bases.iter().enumerate() {
        let id = &net.parties()[j];
        if &basis.party != id {
            r.push(Structure, &basis.party, format!("expected party {id}"));
        }
        let dims = party_dims(net, strat, j);
        let dim: u64 = dims.iter().map(|&d| d as u64).product();
        if basis.vectors.len() as u64 != dim {
            r.push(
                Completeness,
                id,
                format!("{} vectors in dimension {dim}", basis.vectors.len()),
            );
        }
        let mut seen = BTreeSet::new();
        for v in &basis.vectors {
            if !seen.insert(&v.label) {
                r.push(DuplicateLabel, id, format!("label {} repeated", v.label));
            }
            for t in v.amplitudes.keys() {
                if !in_range(t, &dims) {
                    r.push(
                        SymbolRange,
                        id,
                        format!("vector {} has tuple {} outside local dims", v.label, fmt_tuple(t)),
                    );
                }
            }
        }
        for (a, va) in basis.vectors.iter().enumerate() {
            for vb in &basis.vectors[a..] {
                let ip = va.inner(vb);
                let want = if std::ptr::eq(va, vb) { 1.0 } else { 0.0 };
                if (ip - C64::new(want, 0.0)).norm() > ORTHO_TOL {
                    r.push(
                        Orthonormality,
                        id,
                        format!("<{}|{}> = {ip}", va.label, vb.label),
                    );
                }
            }
        }
    }
    r
}

/// Caps on simulation work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    /// Maximum number of joint source-support configurations.
    pub max_support: u128,
    /// Maximum number of (configuration, outcome) amplitude terms.
    pub max_terms: u128,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            max_support: 1 << 24,
            max_terms: 1 << 28,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub parties: Vec<String>,
    pub atoms: BTreeMap<Vec<OutcomeLabel>, f64>,
}

#[derive(Serialize, Deserialize)]
struct AtomDoc {
    outputs: Vec<OutcomeLabel>,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct DistributionDoc {
    parties: Vec<String>,
    atoms: Vec<AtomDoc>,
}

impl JointDistribution {
    pub fn total(&self) -> f64 {
        self.atoms.values().sum()
    }

    pub fn prob(&self, outputs: &[OutcomeLabel]) -> f64 {
        self.atoms.get(outputs).copied().unwrap_or(0.0)
    }

    /// Total mass of atoms satisfying `pred`.
    pub fn mass<F: Fn(&[OutcomeLabel]) -> bool>(&self, pred: F) -> f64 {
        self.atoms
            .iter()
            .filter(|(o, _)| pred(o))
            .fold(0.0, |acc, (_, p)| acc + p)
    }

    /// Largest per-atom difference over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let keys: BTreeSet<&Vec<OutcomeLabel>> =
            self.atoms.keys().chain(other.atoms.keys()).collect();
        keys.into_iter()
            .map(|k| (self.prob(k) - other.prob(k)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        let doc = DistributionDoc {
            parties: self.parties.clone(),
            atoms: self
                .atoms
                .iter()
                .map(|(o, &p)| AtomDoc {
                    outputs: o.clone(),
                    p,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("distribution serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DistributionDoc = serde_json::from_str(text)?;
        let mut atoms = BTreeMap::new();
        for a in doc.atoms {
            if a.outputs.len() != doc.parties.len() {
                return Err(Error::Parse("atom arity differs from party count".into()));
            }
            *atoms.entry(a.outputs).or_insert(0.0) += a.p;
        }
        Ok(Self {
            parties: doc.parties,
            atoms,
        })
    }
}

/// Pushforward of `dist` under a per-label map applied to every party.
pub fn coarse_grain<F: Fn(&OutcomeLabel) -> OutcomeLabel>(
    dist: &JointDistribution,
    projection: F,
) -> JointDistribution {
    let mut atoms = BTreeMap::new();
    for (o, &p) in &dist.atoms {
        let key: Vec<OutcomeLabel> = o.iter().map(&projection).collect();
        *atoms.entry(key).or_insert(0.0) += p;
    }
    JointDistribution {
        parties: dist.parties.clone(),
        atoms,
    }
}

pub fn joint_distribution(net: &Network, strat: &QuantumStrategy) -> Result<JointDistribution> {
    joint_distribution_with(net, strat, SimConfig::default())
}

pub fn joint_distribution_with(
    net: &Network,
    strat: &QuantumStrategy,
    cfg: SimConfig,
) -> Result<JointDistribution> {
    let report = validate_strategy(net, strat);
    if !report.is_valid() {
        return Err(Error::InvalidStrategy(report));
    }
    let supports: Vec<Vec<(&Tuple, C64)>> = strat.sources.iter().map(|s| s.support()).collect();
    let size: u128 = supports.iter().map(|s| s.len() as u128).product();
    if size > cfg.max_support {
        return Err(Error::DimensionOverflow {
            size,
            cap: cfg.max_support,
        });
    }

    // per party: received tuple -> [(vector index, <v|tuple>)]
    let lookups: Vec<HashMap<Tuple, Vec<(usize, C64)>>> = strat
        .bases
        .iter()
        .map(|b| {
            let mut m: HashMap<Tuple, Vec<(usize, C64)>> = HashMap::new();
            for (k, v) in b.vectors.iter().enumerate() {
                for (t, a) in &v.amplitudes {
                    if a.norm_sqr() > 0.0 {
                        m.entry(t.clone()).or_default().push((k, a.conj()));
                    }
                }
            }
            m
        })
        .collect();

    let nparties = net.num_parties();
    let mut amps: HashMap<Vec<u16>, C64> = HashMap::new();
    let mut order: Vec<Vec<u16>> = Vec::new();
    let mut terms: u128 = 0;
    let mut cursor = vec![0usize; supports.len()];
    let mut local: Vec<Tuple> = vec![Vec::new(); nparties];

    'configs: loop {
        let mut amp = C64::new(1.0, 0.0);
        for (i, &c) in cursor.iter().enumerate() {
            amp *= supports[i][c].1;
        }
        let mut lists: Vec<&[(usize, C64)]> = Vec::with_capacity(nparties);
        let mut zero = false;
        for j in 0..nparties {
            let t = &mut local[j];
            t.clear();
            t.extend(
                net.incoming(j)
                    .iter()
                    .map(|&(s, slot)| supports[s][cursor[s]].0[slot]),
            );
            match lookups[j].get(t.as_slice()) {
                Some(l) => lists.push(l),
                None => {
                    zero = true;
                    break;
                }
            }
        }
        if !zero {
            let count: u128 = lists.iter().map(|l| l.len() as u128).product();
            terms += count;
            if terms > cfg.max_terms {
                return Err(Error::DimensionOverflow {
                    size: terms,
                    cap: cfg.max_terms,
                });
            }
            let mut idx = vec![0usize; nparties];
            loop {
                let mut a = amp;
                let mut key = Vec::with_capacity(nparties);
                for (j, l) in lists.iter().enumerate() {
                    let (k, c) = l[idx[j]];
                    a *= c;
                    key.push(k as u16);
                }
                match amps.get_mut(&key) {
                    Some(v) => *v += a,
                    None => {
                        order.push(key.clone());
                        amps.insert(key, a);
                    }
                }
                if !advance(&mut idx, |j| lists[j].len()) {
                    break;
                }
            }
        }
        if !advance(&mut cursor, |i| supports[i].len()) {
            break 'configs;
        }
    }

    let mut atoms = BTreeMap::new();
    for key in order {
        let p = amps[&key].norm_sqr();
        if p < ATOM_FLOOR {
            continue;
        }
        let labels: Vec<OutcomeLabel> = key
            .iter()
            .enumerate()
            .map(|(j, &k)| strat.bases[j].vectors[k as usize].label.clone())
            .collect();
        *atoms.entry(labels).or_insert(0.0) += p;
    }
    Ok(JointDistribution {
        parties: net.parties().to_vec(),
        atoms,
    })
}

/// Mixed-radix increment; false once every digit has wrapped.
pub(crate) fn advance(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < radix(k) {
            return true;
        }
        digits[k] = 0;
    }
    false
}

/// Measure every source in the computational basis before sending: each
/// source becomes its `|amplitude|²` pmf and each party answers a tuple
/// with the Born-rule pmf over its labels.
pub fn decohere(net: &Network, strat: &QuantumStrategy) -> Result<ClassicalStrategy> {
    let report = validate_strategy(net, strat);
    if !report.is_valid() {
        return Err(Error::InvalidStrategy(report));
    }
    let sources = strat
        .sources
        .iter()
        .map(|s| ClassicalSource {
            id: s.id.clone(),
            values: s
                .support()
                .into_iter()
                .map(|(t, a)| (t.clone(), a.norm_sqr()))
                .collect(),
        })
        .collect();
    let responses = strat
        .bases
        .iter()
        .enumerate()
        .map(|(j, b)| {
            all_tuples(&party_dims(net, strat, j))
                .into_iter()
                .map(|t| {
                    let pmf: Vec<(OutcomeLabel, f64)> = b
                        .vectors
                        .iter()
                        .map(|v| (v.label.clone(), v.overlap(&t).norm_sqr()))
                        .filter(|(_, p)| *p > 0.0)
                        .collect();
                    (t, pmf)
                })
                .collect()
        })
        .collect();
    ClassicalStrategy::new(net, sources, responses)
}

#[derive(Serialize, Deserialize)]
struct AmpDoc {
    tuple: Tuple,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SourceDoc {
    id: String,
    dims: Vec<u32>,
    amplitudes: Vec<AmpDoc>,
}

#[derive(Serialize, Deserialize)]
struct VectorDoc {
    label: OutcomeLabel,
    amplitudes: Vec<AmpDoc>,
}

#[derive(Serialize, Deserialize)]
struct PartyDoc {
    id: String,
    basis: Vec<VectorDoc>,
}

/// Strategy file: the network plus the strategy on it.
#[derive(Serialize, Deserialize)]
struct StrategyDoc {
    kind: StrategyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<Family>,
    network: NetworkDoc,
    sources: Vec<SourceDoc>,
    parties: Vec<PartyDoc>,
}

fn amp_docs(m: &BTreeMap<Tuple, C64>) -> Vec<AmpDoc> {
    m.iter()
        .map(|(t, a)| AmpDoc {
            tuple: t.clone(),
            re: a.re,
            im: a.im,
        })
        .collect()
}

fn amp_map(v: Vec<AmpDoc>) -> BTreeMap<Tuple, C64> {
    let mut m = BTreeMap::new();
    for a in v {
        *m.entry(a.tuple).or_insert(C64::new(0.0, 0.0)) += C64::new(a.re, a.im);
    }
    m
}

impl QuantumStrategy {
    pub fn to_json(&self, net: &Network) -> String {
        let doc = StrategyDoc {
            kind: self.kind,
            family: self.family,
            network: net.to_doc(),
            sources: self
                .sources
                .iter()
                .map(|s| SourceDoc {
                    id: s.id.clone(),
                    dims: s.dims.clone(),
                    amplitudes: amp_docs(&s.amplitudes),
                })
                .collect(),
            parties: self
                .bases
                .iter()
                .map(|b| PartyDoc {
                    id: b.party.clone(),
                    basis: b
                        .vectors
                        .iter()
                        .map(|v| VectorDoc {
                            label: v.label.clone(),
                            amplitudes: amp_docs(&v.amplitudes),
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("strategy serializes")
    }

    /// Parses a strategy file. Sources and parties may appear in any order;
    /// they are matched to the embedded network by id.
    pub fn from_json(text: &str) -> Result<(Network, Self)> {
        let doc: StrategyDoc = serde_json::from_str(text)?;
        let net = doc.network.into_network(true)?;
        let mut sources: Vec<Option<SourceState>> = vec![None; net.num_sources()];
        for s in doc.sources {
            let i = net
                .source_index(&s.id)
                .ok_or_else(|| Error::Parse(format!("unknown source {:?}", s.id)))?;
            sources[i] = Some(SourceState {
                id: s.id,
                dims: s.dims,
                amplitudes: amp_map(s.amplitudes),
            });
        }
        let mut bases: Vec<Option<MeasurementBasis>> = vec![None; net.num_parties()];
        for p in doc.parties {
            let j = net
                .party_index(&p.id)
                .ok_or_else(|| Error::Parse(format!("unknown party {:?}", p.id)))?;
            bases[j] = Some(MeasurementBasis {
                party: p.id,
                vectors: p
                    .basis
                    .into_iter()
                    .map(|v| BasisVector {
                        label: v.label,
                        amplitudes: amp_map(v.amplitudes),
                    })
                    .collect(),
            });
        }
        let sources = sources
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                s.ok_or_else(|| Error::Parse(format!("missing state for {}", net.sources()[i].id)))
            })
            .collect::<Result<Vec<_>>>()?;
        let bases = bases
            .into_iter()
            .enumerate()
            .map(|(j, b)| b.ok_or_else(|| Error::Parse(format!("missing basis for {}", net.parties()[j]))))
            .collect::<Result<Vec<_>>>()?;
        Ok((
            net,
            Self {
                kind: doc.kind,
                family: doc.family,
                sources,
                bases,
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::netgraph::build_ring;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn ring3() -> (Network, QuantumStrategy) {
        catalog::make_ring_tc(3, &vec![catalog::ring_omega(0.3); 3]).unwrap()
    }

    #[test]
    fn label_display_parses_back() {
        let labels = [
            OutcomeLabel::token(0),
            OutcomeLabel::token_extra(2, 3),
            OutcomeLabel::ColorMatch(4),
            OutcomeLabel::RevealedTuple(vec![0, 1, 1]),
            OutcomeLabel::Ambiguous(12),
        ];
        for l in labels {
            assert_eq!(l.to_string().parse::<OutcomeLabel>().unwrap(), l);
        }
        for bad in ["", "n", "n1.", "|>", "|0a>", "x1", "chi"] {
            assert!(bad.parse::<OutcomeLabel>().is_err(), "{bad}");
        }
    }

    #[test]
    fn ring_strategy_is_valid() {
        let (net, s) = ring3();
        assert!(validate_strategy(&net, &s).is_valid());
    }

    #[test]
    fn unnormalised_source_flagged() {
        let (net, mut s) = ring3();
        s.sources[0] = SourceState::new("S1", vec![2, 2])
            .with(vec![0, 1], r(1.0))
            .with(vec![1, 0], r(1.0));
        let rep = validate_strategy(&net, &s);
        assert!(rep.has(ViolationKind::Normalization));
    }

    #[test]
    fn duplicated_vector_flagged() {
        let (net, mut s) = ring3();
        let mut v = s.bases[0].vectors[0].clone();
        v.label = OutcomeLabel::token(7);
        s.bases[0].vectors[3] = v;
        let rep = validate_strategy(&net, &s);
        assert!(rep.has(ViolationKind::Orthonormality));
    }

    #[test]
    fn missing_party_is_structural() {
        let (net, mut s) = ring3();
        s.bases.pop();
        assert!(validate_strategy(&net, &s).has(ViolationKind::Structure));
    }

    #[test]
    fn ring_all_single_token_quarter() {
        let (net, s) = ring3();
        let p = joint_distribution(&net, &s).unwrap();
        assert!((p.total() - 1.0).abs() < 1e-12);
        let tok = coarse_grain(&p, count_projection);
        let one = vec![OutcomeLabel::token(1); 3];
        assert!((tok.prob(&one) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn identity_projection_is_noop() {
        let (net, s) = ring3();
        let p = joint_distribution(&net, &s).unwrap();
        assert_eq!(coarse_grain(&p, |l| l.clone()), p);
    }

    #[test]
    fn decohered_cm_source_pmf() {
        let net = Network::builder()
            .parties(["A", "B", "C"])
            .source("S", ["A", "B", "C"])
            .build()
            .unwrap();
        let s5 = 5f64.sqrt();
        let src = SourceState::new("S", vec![2, 2, 2])
            .with(vec![0, 0, 0], r(2.0 / s5))
            .with(vec![1, 1, 1], r(1.0 / s5));
        let basis = |p: &str| MeasurementBasis {
            party: p.into(),
            vectors: vec![
                BasisVector::computational(OutcomeLabel::ColorMatch(0), vec![0]),
                BasisVector::computational(OutcomeLabel::ColorMatch(1), vec![1]),
            ],
        };
        let s = QuantumStrategy {
            kind: StrategyKind::ColorMatching,
            family: None,
            sources: vec![src],
            bases: vec![basis("A"), basis("B"), basis("C")],
        };
        let c = decohere(&net, &s).unwrap();
        let vals = &c.sources[0].values;
        assert!((vals[0].1 - 0.8).abs() < 1e-12);
        assert!((vals[1].1 - 0.2).abs() < 1e-12);
        // diagonal measurement: decoherence is invisible
        let q = joint_distribution(&net, &s).unwrap();
        let d = crate::classical::classical_joint(&net, &c).unwrap();
        assert!(q.max_abs_diff(&d) < 1e-12);
    }

    #[test]
    fn strategy_json_round_trip() {
        let (net, s) = ring3();
        let text = s.to_json(&net);
        let (net2, s2) = QuantumStrategy::from_json(&text).unwrap();
        assert_eq!(net, net2);
        assert_eq!(s.to_json(&net), s2.to_json(&net2));
    }

    #[test]
    fn distribution_json_round_trip() {
        let (net, s) = ring3();
        let p = joint_distribution(&net, &s).unwrap();
        let back = JointDistribution::from_json(&p.to_json()).unwrap();
        assert_eq!(p.atoms.len(), back.atoms.len());
        assert!(p.max_abs_diff(&back) == 0.0);
    }

    #[test]
    fn support_cap_enforced() {
        let (net, s) = ring3();
        let cfg = SimConfig {
            max_support: 4,
            max_terms: 1 << 20,
        };
        assert!(matches!(
            joint_distribution_with(&net, &s, cfg),
            Err(Error::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn party_relabelling_permutes_coordinates() {
        // swap the roles of A1 and A2 by rebuilding the ring with relabelled parties
        let (net, s) = ring3();
        let p = joint_distribution(&net, &s).unwrap();
        let swapped = Network::builder()
            .parties(["A2", "A1", "A3"])
            .source("S1", ["A1", "A2"])
            .source("S2", ["A2", "A3"])
            .source("S3", ["A3", "A1"])
            .order("A1", ["S3", "S1"])
            .order("A2", ["S1", "S2"])
            .order("A3", ["S2", "S3"])
            .build()
            .unwrap();
        let mut s2 = s.clone();
        s2.bases.swap(0, 1);
        let q = joint_distribution(&swapped, &s2).unwrap();
        for (o, &pr) in &p.atoms {
            let mut o2 = o.clone();
            o2.swap(0, 1);
            assert!((q.prob(&o2) - pr).abs() < 1e-14);
        }
        assert_eq!(build_ring(3).unwrap().num_parties(), 3);
    }
}
