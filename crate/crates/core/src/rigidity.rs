//! From a TC/CM quantum strategy to the linear system on `q(outputs, t)`,
//! Finner's inequality, and the end-to-end nonlocality certificate.
//!
//! Conditioned on every party giving an ambiguous output, a classical
//! simulation must realise one of a few hidden patterns `t` (token routings
//! or source colorings). The joint law `q(outputs, t)` then has known
//! marginals: the observed `q(outputs)` and, per party and pattern,
//! `q(a_j, t) = p_dec(t)·|⟨a_j|tuple_t⟩|² / Pr(event)`. If no nonnegative
//! `q` has these marginals, no classical strategy exists.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::catalog::Family;
use crate::classical::{
    classical_joint, enumerate_color_patterns, enumerate_token_patterns, ClassicalStrategy,
    ColorConstraint, HiddenPattern, PatternDoc, PatternKind,
};
use crate::error::{Error, Result};
use crate::lpcore::{self, FeasibilityProblem, FeasibilityResult, Row};
use crate::netgraph::{Network, PfisWeights};
use crate::quantum::{
    advance, joint_distribution, validate_strategy, BasisVector, JointDistribution, OutcomeLabel,
    QuantumStrategy, StrategyKind, Tuple,
};

/// Tolerance on the decohered-vs-quantum event probability and on target sums.
pub const TARGET_TOL: f64 = 1e-10;
const SPAN_TOL: f64 = 1e-9;
const OVERLAP_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    /// Every party's output is ambiguous.
    #[default]
    AllAmbiguous,
}

impl Event {
    pub fn holds(&self, outputs: &[OutcomeLabel]) -> bool {
        match self {
            Self::AllAmbiguous => outputs.iter().all(OutcomeLabel::is_ambiguous),
        }
    }

    pub fn admits(&self, label: &OutcomeLabel) -> bool {
        match self {
            Self::AllAmbiguous => label.is_ambiguous(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QOptions {
    /// Party subsets (network indices) whose joint marginal with `t` is
    /// also constrained, via the product of the per-party overlaps.
    pub subset_marginals: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalTarget {
    pub party: usize,
    pub label: OutcomeLabel,
    /// Position in [`QSystemSpec::patterns`].
    pub pattern: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetTarget {
    pub parties: Vec<usize>,
    pub labels: Vec<OutcomeLabel>,
    pub pattern: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QSystemSpec {
    pub parties: Vec<String>,
    pub event: Event,
    pub event_prob: f64,
    pub patterns: Vec<HiddenPattern>,
    pub pattern_docs: Vec<PatternDoc>,
    /// Decohered probability of each pattern.
    pub pattern_probs: Vec<f64>,
    /// Event labels per party that carry any weight.
    pub labels: Vec<Vec<OutcomeLabel>>,
    /// `q(outputs)` over the product of `labels`, zeros included.
    pub joint: BTreeMap<Vec<OutcomeLabel>, f64>,
    pub marginals: Vec<MarginalTarget>,
    pub subsets: Vec<SubsetTarget>,
}

impl QSystemSpec {
    pub fn marginal(&self, party: usize, label: &OutcomeLabel, pattern: usize) -> Option<f64> {
        self.marginals
            .iter()
            .find(|m| m.party == party && &m.label == label && m.pattern == pattern)
            .map(|m| m.value)
    }

    pub fn num_outputs(&self) -> usize {
        self.labels.iter().map(Vec::len).product()
    }
}

fn ambiguous_vectors<'a>(strat: &'a QuantumStrategy, j: usize, event: Event) -> Vec<&'a BasisVector> {
    strat.bases[j]
        .vectors
        .iter()
        .filter(|v| event.admits(&v.label))
        .collect()
}

fn constant_sum<'a>(tuples: impl Iterator<Item = &'a Tuple>) -> Option<u32> {
    let sums: BTreeSet<u32> = tuples.map(|t| t.iter().sum()).collect();
    (sums.len() == 1).then(|| *sums.iter().next().unwrap())
}

/// Candidate patterns before the span filter.
fn candidate_patterns(net: &Network, strat: &QuantumStrategy, event: Event) -> Result<Vec<HiddenPattern>> {
    match strat.kind {
        StrategyKind::TokenCounting => {
            let eta = strat
                .sources
                .iter()
                .map(|s| {
                    constant_sum(s.support().into_iter().map(|(t, _)| t)).ok_or_else(|| {
                        Error::InconsistentSystem(format!("{} mixes token numbers", s.id))
                    })
                })
                .collect::<Result<Vec<u32>>>()?;
            let mut counts: Vec<Vec<u32>> = Vec::new();
            for j in 0..net.num_parties() {
                let mut cs = BTreeSet::new();
                for v in ambiguous_vectors(strat, j, event) {
                    let c = constant_sum(v.amplitudes.keys()).ok_or_else(|| {
                        Error::InconsistentSystem(format!(
                            "{}: vector {} mixes token counts",
                            net.parties()[j],
                            v.label
                        ))
                    })?;
                    cs.insert(c);
                }
                counts.push(cs.into_iter().collect());
            }
            if counts.iter().any(Vec::is_empty) {
                return Ok(Vec::new());
            }
            let mut out = Vec::new();
            let mut idx = vec![0usize; counts.len()];
            loop {
                let target: Vec<u32> = idx.iter().enumerate().map(|(j, &k)| counts[j][k]).collect();
                out.extend(enumerate_token_patterns(net, &eta, &target));
                if !advance(&mut idx, |j| counts[j].len()) {
                    break;
                }
            }
            Ok(out)
        }
        StrategyKind::ColorMatching => {
            let colors = strat
                .sources
                .iter()
                .flat_map(|s| s.dims.iter().copied())
                .max()
                .unwrap_or(0);
            let constraints = (0..net.num_parties())
                .map(|j| ColorConstraint::Ambiguous {
                    revealed: strat.bases[j]
                        .vectors
                        .iter()
                        .filter(|v| !event.admits(&v.label) && v.amplitudes.len() == 1)
                        .map(|v| v.amplitudes.keys().next().unwrap().clone())
                        .collect(),
                })
                .collect::<Vec<_>>();
            Ok(enumerate_color_patterns(net, colors, &constraints))
        }
        StrategyKind::Generic => {
            // every combination of computational source values
            let supports: Vec<Vec<Tuple>> = strat
                .sources
                .iter()
                .map(|s| s.support().into_iter().map(|(t, _)| t.clone()).collect())
                .collect();
            if supports.iter().any(Vec::is_empty) {
                return Ok(Vec::new());
            }
            let mut out = Vec::new();
            let mut idx = vec![0usize; supports.len()];
            loop {
                let r = idx.iter().enumerate().map(|(i, &k)| supports[i][k].clone()).collect();
                out.push(HiddenPattern {
                    index: out.len() + 1,
                    kind: PatternKind::TokenRouting(r),
                });
                if !advance(&mut idx, |i| supports[i].len()) {
                    break;
                }
            }
            Ok(out)
        }
    }
}

fn span_weight(vectors: &[&BasisVector], t: &[u32]) -> f64 {
    vectors.iter().map(|v| v.overlap(t).norm_sqr()).sum()
}

pub fn build_q_system(
    net: &Network,
    strat: &QuantumStrategy,
    event: Event,
    opts: &QOptions,
) -> Result<QSystemSpec> {
    let dist = joint_distribution(net, strat)?;
    build_q_system_from(net, strat, &dist, event, opts)
}

/// As [`build_q_system`], reusing an already simulated distribution.
pub fn build_q_system_from(
    net: &Network,
    strat: &QuantumStrategy,
    dist: &JointDistribution,
    event: Event,
    opts: &QOptions,
) -> Result<QSystemSpec> {
    let nparties = net.num_parties();
    let event_prob = dist.mass(|o| event.holds(o));
    if event_prob <= 0.0 {
        return Err(Error::ZeroProbabilityEvent);
    }
    let amb: Vec<Vec<&BasisVector>> = (0..nparties)
        .map(|j| ambiguous_vectors(strat, j, event))
        .collect();

    let mut patterns = Vec::new();
    let mut pattern_probs = Vec::new();
    'cand: for pat in candidate_patterns(net, strat, event)? {
        for (j, vs) in amb.iter().enumerate() {
            let w = span_weight(vs, &pat.delivered(net, j));
            if w < SPAN_TOL {
                continue 'cand;
            }
            if w < 1.0 - SPAN_TOL {
                return Err(Error::InconsistentSystem(format!(
                    "{}: ambiguous outcomes neither contain nor exclude the tuple of pattern {} (weight {w})",
                    net.parties()[j],
                    pat.index
                )));
            }
        }
        let p: f64 = (0..net.num_sources())
            .map(|i| {
                strat.sources[i]
                    .amplitudes
                    .get(&pat.source_tuple(net, i))
                    .map_or(0.0, |a| a.norm_sqr())
            })
            .product();
        if p > 0.0 {
            patterns.push(HiddenPattern {
                index: patterns.len() + 1,
                kind: pat.kind,
            });
            pattern_probs.push(p);
        }
    }
    if patterns.is_empty() {
        return Err(Error::EmptyPatternSet);
    }
    let dec_total: f64 = pattern_probs.iter().sum();
    if (dec_total - event_prob).abs() > TARGET_TOL {
        return Err(Error::InconsistentSystem(format!(
            "patterns carry probability {dec_total} but the event has {event_prob}"
        )));
    }

    let delivered: Vec<Vec<Tuple>> = patterns
        .iter()
        .map(|p| (0..nparties).map(|j| p.delivered(net, j)).collect())
        .collect();

    let mut used: Vec<BTreeSet<&OutcomeLabel>> = vec![BTreeSet::new(); nparties];
    for (o, &p) in &dist.atoms {
        if p > 0.0 && event.holds(o) {
            for (j, l) in o.iter().enumerate() {
                used[j].insert(l);
            }
        }
    }
    let labels: Vec<Vec<OutcomeLabel>> = (0..nparties)
        .map(|j| {
            amb[j]
                .iter()
                .filter(|v| {
                    used[j].contains(&v.label)
                        || delivered
                            .iter()
                            .any(|d| v.overlap(&d[j]).norm_sqr() > OVERLAP_FLOOR)
                })
                .map(|v| v.label.clone())
                .collect()
        })
        .collect();

    let mut joint = BTreeMap::new();
    let mut idx = vec![0usize; nparties];
    if labels.iter().all(|l| !l.is_empty()) {
        loop {
            let o: Vec<OutcomeLabel> = idx.iter().enumerate().map(|(j, &k)| labels[j][k].clone()).collect();
            let q = dist.prob(&o) / event_prob;
            joint.insert(o, q);
            if !advance(&mut idx, |j| labels[j].len()) {
                break;
            }
        }
    }

    let overlap = |j: usize, l: &OutcomeLabel, t: usize| -> f64 {
        strat.bases[j]
            .vector(l)
            .map_or(0.0, |v| v.overlap(&delivered[t][j]).norm_sqr())
    };

    let mut marginals = Vec::new();
    for j in 0..nparties {
        for l in &labels[j] {
            for t in 0..patterns.len() {
                marginals.push(MarginalTarget {
                    party: j,
                    label: l.clone(),
                    pattern: t,
                    value: pattern_probs[t] * overlap(j, l, t) / event_prob,
                });
            }
        }
    }
    for t in 0..patterns.len() {
        let want = pattern_probs[t] / event_prob;
        for j in 0..nparties {
            let s: f64 = marginals
                .iter()
                .filter(|m| m.party == j && m.pattern == t)
                .map(|m| m.value)
                .sum();
            if (s - want).abs() > TARGET_TOL {
                return Err(Error::InconsistentSystem(format!(
                    "marginals of {} under pattern {} sum to {s}, expected {want}",
                    net.parties()[j],
                    t + 1
                )));
            }
        }
    }

    let mut subsets = Vec::new();
    for set in &opts.subset_marginals {
        if set.is_empty() || set.iter().any(|&j| j >= nparties) {
            return Err(Error::OutOfRange(format!("bad party subset {set:?}")));
        }
        let mut k = vec![0usize; set.len()];
        loop {
            let ls: Vec<OutcomeLabel> = set.iter().zip(&k).map(|(&j, &i)| labels[j][i].clone()).collect();
            for t in 0..patterns.len() {
                let prod: f64 = set.iter().zip(&ls).map(|(&j, l)| overlap(j, l, t)).product();
                subsets.push(SubsetTarget {
                    parties: set.clone(),
                    labels: ls.clone(),
                    pattern: t,
                    value: pattern_probs[t] * prod / event_prob,
                });
            }
            if !advance(&mut k, |i| labels[set[i]].len()) {
                break;
            }
        }
    }

    Ok(QSystemSpec {
        parties: net.parties().to_vec(),
        event,
        event_prob,
        pattern_docs: patterns.iter().map(|p| p.to_doc(net)).collect(),
        patterns,
        pattern_probs,
        labels,
        joint,
        marginals,
        subsets,
    })
}

fn label_list(ls: &[OutcomeLabel]) -> String {
    ls.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Variables `q(outputs, t) >= 0`, one equality row per joint target, per
/// marginal target and per subset target, plus total mass.
pub fn to_feasibility_problem(spec: &QSystemSpec) -> FeasibilityProblem {
    let outputs: Vec<&Vec<OutcomeLabel>> = spec.joint.keys().collect();
    let npat = spec.patterns.len();
    let var = |o: usize, t: usize| o * npat + t;

    let mut names = Vec::with_capacity(outputs.len() * npat);
    for o in &outputs {
        for p in &spec.patterns {
            names.push(format!("q[{}|t={}]", label_list(o), p.index));
        }
    }

    let mut rows = Vec::new();
    for (k, (o, &q)) in spec.joint.iter().enumerate() {
        rows.push(Row {
            coeffs: (0..npat).map(|t| (var(k, t), 1.0)).collect(),
            rhs: q,
            tag: format!("joint[{}]", label_list(o)),
        });
    }
    for m in &spec.marginals {
        let coeffs = outputs
            .iter()
            .enumerate()
            .filter(|(_, o)| o[m.party] == m.label)
            .map(|(k, _)| (var(k, m.pattern), 1.0))
            .collect();
        rows.push(Row {
            coeffs,
            rhs: m.value,
            tag: format!(
                "marginal[{}={},t={}]",
                spec.parties[m.party], m.label, spec.patterns[m.pattern].index
            ),
        });
    }
    for s in &spec.subsets {
        let coeffs = outputs
            .iter()
            .enumerate()
            .filter(|(_, o)| s.parties.iter().zip(&s.labels).all(|(&j, l)| &o[j] == l))
            .map(|(k, _)| (var(k, s.pattern), 1.0))
            .collect();
        let who: Vec<String> = s
            .parties
            .iter()
            .zip(&s.labels)
            .map(|(&j, l)| format!("{}={l}", spec.parties[j]))
            .collect();
        rows.push(Row {
            coeffs,
            rhs: s.value,
            tag: format!("subset[{},t={}]", who.join(","), spec.patterns[s.pattern].index),
        });
    }
    rows.push(Row {
        coeffs: (0..names.len()).map(|v| (v, 1.0)).collect(),
        rhs: 1.0,
        tag: "mass".into(),
    });
    FeasibilityProblem::new(names, rows).expect("generated system is well formed")
}

/// Both sides of Finner's inequality `E[∏ g_j] <= ∏ E[g_j^{1/x_j}]^{x_j}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinnerResult {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Evaluates Finner's inequality on `dist` for nonnegative per-party
/// functions `g(j, a_j)`.
pub fn finner_check<G>(dist: &JointDistribution, weights: &PfisWeights, g: G) -> FinnerResult
where
    G: Fn(usize, &OutcomeLabel) -> f64,
{
    let n = dist.parties.len();
    let mut lhs = 0.0;
    let mut moments = vec![0.0; n];
    for (o, &p) in &dist.atoms {
        let vals: Vec<f64> = o.iter().enumerate().map(|(j, l)| g(j, l)).collect();
        lhs += p * vals.iter().product::<f64>();
        for j in 0..n {
            moments[j] += p * vals[j].powf(1.0 / weights.get(j));
        }
    }
    let rhs: f64 = moments
        .iter()
        .enumerate()
        .map(|(j, m)| m.powf(weights.get(j)))
        .product();
    FinnerResult {
        lhs,
        rhs,
        gap: rhs - lhs,
    }
}

/// [`finner_check`] on the distribution a classical strategy produces.
pub fn finner_check_classical<G>(
    net: &Network,
    strat: &ClassicalStrategy,
    weights: &PfisWeights,
    g: G,
) -> Result<FinnerResult>
where
    G: Fn(usize, &OutcomeLabel) -> f64,
{
    Ok(finner_check(&classical_joint(net, strat)?, weights, g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Nonlocal,
    Inconclusive,
    Refused,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Nonlocal => "NONLOCAL",
            Self::Inconclusive => "INCONCLUSIVE",
            Self::Refused => "REFUSED",
            Self::Indeterminate => "INDETERMINATE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rigidity {
    TokenCounting,
    ColorMatching,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub rigidity: Option<Rigidity>,
    pub ndcs: bool,
    pub ecs: bool,
    pub pfis: Option<Vec<f64>>,
    /// The strategy has the TC/CM form its kind claims.
    pub strategy_form: bool,
    pub holds: bool,
    pub notes: Vec<String>,
}

pub fn check_hypotheses(net: &Network, strat: &QuantumStrategy) -> HypothesisReport {
    let ndcs = net.check_ndcs();
    let ecs = net.check_ecs();
    let pfis = net.find_pfis().map(|w| w.weights);
    let mut notes = Vec::new();
    let valid = validate_strategy(net, strat);
    if !valid.is_valid() {
        notes.push(format!("strategy invalid: {valid}"));
    }
    let (rigidity, network_ok, form) = match strat.kind {
        StrategyKind::TokenCounting => {
            if !ndcs {
                notes.push("network is not NDCS".into());
            }
            let form = valid.is_valid() && tc_form(strat, &mut notes);
            (Some(Rigidity::TokenCounting), ndcs, form)
        }
        StrategyKind::ColorMatching => {
            if !ecs {
                notes.push("network is not ECS".into());
            }
            if pfis.is_none() {
                notes.push("no PFIS: color-matching rigidity unproven".into());
            }
            let form = valid.is_valid() && cm_form(strat, &mut notes);
            (Some(Rigidity::ColorMatching), ecs && pfis.is_some(), form)
        }
        StrategyKind::Generic => {
            notes.push("strategy is neither token-counting nor color-matching".into());
            (None, false, false)
        }
    };
    HypothesisReport {
        rigidity,
        ndcs,
        ecs,
        pfis,
        strategy_form: form,
        holds: network_ok && form,
        notes,
    }
}

fn tc_form(strat: &QuantumStrategy, notes: &mut Vec<String>) -> bool {
    let mut ok = true;
    for s in &strat.sources {
        if constant_sum(s.support().into_iter().map(|(t, _)| t)).is_none() {
            notes.push(format!("{}: token number not fixed", s.id));
            ok = false;
        }
    }
    for b in &strat.bases {
        for v in &b.vectors {
            if constant_sum(v.amplitudes.keys()).is_none() {
                notes.push(format!("{}: {} does not count tokens", b.party, v.label));
                ok = false;
            }
        }
    }
    ok
}

fn cm_form(strat: &QuantumStrategy, notes: &mut Vec<String>) -> bool {
    let mut ok = true;
    let mut pmf: Option<BTreeMap<u32, u64>> = None;
    for s in &strat.sources {
        let mut this = BTreeMap::new();
        for (t, a) in s.support() {
            if t.windows(2).any(|w| w[0] != w[1]) {
                notes.push(format!("{}: emits a non-constant color tuple", s.id));
                ok = false;
            }
            // compare pmfs to ~1e-12 by rounding
            this.insert(t[0], (a.norm_sqr() * 1e12).round() as u64);
        }
        match &pmf {
            None => pmf = Some(this),
            Some(p) if *p != this => {
                notes.push(format!("{}: color distribution differs from other sources", s.id));
                ok = false;
            }
            _ => {}
        }
    }
    let palette: Vec<u32> = pmf.map(|p| p.into_keys().collect()).unwrap_or_default();
    for b in &strat.bases {
        let width = b
            .vectors
            .first()
            .and_then(|v| v.amplitudes.keys().next())
            .map_or(0, Vec::len);
        for &c in &palette {
            let has = b.vectors.iter().any(|v| {
                matches!(v.label, OutcomeLabel::ColorMatch(_))
                    && v.amplitudes.len() == 1
                    && v.amplitudes.contains_key(&vec![c; width])
            });
            if !has {
                notes.push(format!("{}: no color-match outcome for color {c}", b.party));
                ok = false;
            }
        }
        for v in &b.vectors {
            if matches!(v.label, OutcomeLabel::ColorMatch(_)) {
                continue;
            }
            let touches_match = v
                .amplitudes
                .iter()
                .any(|(t, a)| a.norm_sqr() > 0.0 && t.windows(2).all(|w| w[0] == w[1]));
            if touches_match {
                notes.push(format!("{}: {} overlaps a color match", b.party, v.label));
                ok = false;
            }
        }
    }
    ok
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSummary {
    #[serde(flatten)]
    pub pattern: PatternDoc,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub family: Option<Family>,
    /// Set when the strategy is outside the published families: the
    /// marginal generator is then unproven for it.
    pub heuristic: bool,
    pub hypothesis: HypothesisReport,
    pub event: Event,
    pub event_prob: Option<f64>,
    pub patterns: Vec<PatternSummary>,
    pub lp_vars: usize,
    pub lp_rows: usize,
    pub verdict: Verdict,
    /// Farkas margin `-yᵀb` for a NONLOCAL verdict.
    pub margin: Option<f64>,
    /// Largest row residual of the witness for an INCONCLUSIVE verdict.
    pub max_residual: Option<f64>,
    pub certificate: Option<Vec<(String, f64)>>,
    pub witness: Option<Vec<(String, f64)>>,
    pub verified: bool,
}

impl CertificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs hypothesis checks, builds the `q` system, solves it, and
/// re-verifies the answer. Numerical indeterminacy is an error.
pub fn certify_nonlocality(
    net: &Network,
    strat: &QuantumStrategy,
    event: Event,
    opts: &QOptions,
) -> Result<CertificationReport> {
    let hypothesis = check_hypotheses(net, strat);
    let mut report = CertificationReport {
        family: strat.family,
        heuristic: strat.family.is_none(),
        hypothesis,
        event,
        event_prob: None,
        patterns: Vec::new(),
        lp_vars: 0,
        lp_rows: 0,
        verdict: Verdict::Refused,
        margin: None,
        max_residual: None,
        certificate: None,
        witness: None,
        verified: false,
    };
    if !report.hypothesis.holds {
        return Ok(report);
    }
    let spec = build_q_system(net, strat, event, opts)?;
    let problem = to_feasibility_problem(&spec);
    let result = lpcore::solve_feasibility(&problem)?;
    report.event_prob = Some(spec.event_prob);
    report.patterns = spec
        .pattern_docs
        .iter()
        .zip(&spec.pattern_probs)
        .map(|(d, &p)| PatternSummary {
            pattern: d.clone(),
            probability: p,
        })
        .collect();
    report.lp_vars = problem.num_vars();
    report.lp_rows = problem.num_rows();
    report.verified = lpcore::verify_certificate(&problem, &result);
    let named = |v: Vec<(&str, f64)>| v.into_iter().map(|(n, x)| (n.to_string(), x)).collect();
    match &result {
        FeasibilityResult::Infeasible { margin, .. } => {
            report.verdict = Verdict::Nonlocal;
            report.margin = Some(*margin);
            report.certificate = Some(named(result.named_multipliers(&problem)));
        }
        FeasibilityResult::Feasible { .. } => {
            report.verdict = Verdict::Inconclusive;
            report.max_residual = result.max_residual(&problem);
            report.witness = Some(named(result.named_witness(&problem)));
        }
    }
    Ok(report)
}

/// Certification plus the raw problem and result, for callers that want
/// to inspect or re-verify the LP themselves.
pub fn certify_with_problem(
    net: &Network,
    strat: &QuantumStrategy,
    event: Event,
    opts: &QOptions,
) -> Result<(QSystemSpec, FeasibilityProblem, FeasibilityResult)> {
    let spec = build_q_system(net, strat, event, opts)?;
    let problem = to_feasibility_problem(&spec);
    let result = lpcore::solve_feasibility(&problem)?;
    Ok((spec, problem, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, FiveZeroParams, OneTwoParams};
    use std::f64::consts::PI;

    #[test]
    fn five_zero_system_shape() {
        let (net, s) = catalog::make_5_0_tc(&FiveZeroParams::rotation(PI / 8.0)).unwrap();
        let spec = build_q_system(&net, &s, Event::AllAmbiguous, &QOptions::default()).unwrap();
        assert_eq!(spec.patterns.len(), 3);
        assert!((spec.event_prob - 3.0 / 32.0).abs() < 1e-12);
        let p = to_feasibility_problem(&spec);
        assert_eq!(p.num_vars(), 3 * 2 * 3 * 2 * 3);
    }

    #[test]
    fn ring3_has_sixteen_variables() {
        let (net, s) = catalog::make_ring_tc(3, &vec![catalog::ring_omega(0.4); 3]).unwrap();
        let spec = build_q_system(&net, &s, Event::AllAmbiguous, &QOptions::default()).unwrap();
        assert_eq!(to_feasibility_problem(&spec).num_vars(), 16);
    }

    #[test]
    fn one_two_has_243_variables() {
        let (net, s) = catalog::make_1_2_cm(&OneTwoParams::rotation(PI / 8.0)).unwrap();
        let spec = build_q_system(&net, &s, Event::AllAmbiguous, &QOptions::default()).unwrap();
        assert_eq!(to_feasibility_problem(&spec).num_vars(), 243);
    }

    #[test]
    fn marginals_sum_to_pattern_weight() {
        let (net, s) = catalog::make_1_2_cm(&OneTwoParams::rotation(0.7)).unwrap();
        let spec = build_q_system(&net, &s, Event::AllAmbiguous, &QOptions::default()).unwrap();
        for t in 0..spec.patterns.len() {
            let want = spec.pattern_probs[t] / spec.event_prob;
            for j in 0..4 {
                let got: f64 = spec
                    .marginals
                    .iter()
                    .filter(|m| m.party == j && m.pattern == t)
                    .map(|m| m.value)
                    .sum();
                assert!((got - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn generic_strategy_refused() {
        let (net, mut s) = catalog::make_ring_tc(3, &vec![catalog::ring_omega(0.4); 3]).unwrap();
        s.kind = StrategyKind::Generic;
        let r = certify_nonlocality(&net, &s, Event::AllAmbiguous, &QOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Refused);
    }

    #[test]
    fn finner_constant_indicator() {
        let (net, s) = catalog::make_ring_tc(4, &vec![catalog::ring_omega(0.4); 4]).unwrap();
        let d = joint_distribution(&net, &s).unwrap();
        let w = net.find_pfis().unwrap();
        let f = finner_check(&d, &w, |_, _| 1.0);
        assert!((f.lhs - 1.0).abs() < 1e-12 && (f.rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subset_marginals_are_extra_rows() {
        let (net, s) = catalog::make_ring_tc(4, &vec![catalog::ring_omega(0.4); 4]).unwrap();
        let base = build_q_system(&net, &s, Event::AllAmbiguous, &QOptions::default()).unwrap();
        let opts = QOptions {
            subset_marginals: vec![vec![0, 1]],
        };
        let more = build_q_system(&net, &s, Event::AllAmbiguous, &opts).unwrap();
        let rows = |sp: &QSystemSpec| to_feasibility_problem(sp).num_rows();
        assert_eq!(rows(&more), rows(&base) + 4 * 2);
    }
}
