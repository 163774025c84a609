mod common;

use std::f64::consts::PI;

use netrig::catalog::{make_5_0_tc, make_complete_cm, make_ring_tc, CatalogEntry, FiveZeroParams, Omega2};
use netrig::lpcore::solve_feasibility;
use netrig::netgraph::Network;
use netrig::quantum::{OutcomeLabel, QuantumStrategy};
use netrig::rigidity::{
    build_q_system, certify_nonlocality, check_hypotheses, finner_check_classical, to_feasibility_problem, Event,
    QOptions, QSystemSpec, Verdict,
};
use proptest::prelude::*;

use common::{indicator, pfis_networks, random_classical, random_unitaries2, rng};

fn spec_of(net: &Network, s: &QuantumStrategy) -> QSystemSpec {
    build_q_system(net, s, Event::AllAmbiguous, &QOptions::default()).unwrap()
}

/// Two-pattern families: the marginal of `(a_j = r, t)` is `|ω_j[r][k]|²/2`,
/// where `k` says which superposed tuple pattern `t` hands to every party.
fn two_pattern_deviation(net: &Network, spec: &QSystemSpec, w: &[Omega2], first: &[u32], label: impl Fn(u32) -> OutcomeLabel) -> f64 {
    let mut worst: f64 = 0.0;
    for (t, pat) in spec.patterns.iter().enumerate() {
        let k = usize::from(pat.delivered(net, 0) != first);
        for (j, wj) in w.iter().enumerate() {
            assert_eq!(usize::from(pat.delivered(net, j) != first), k);
            for r in 0..2 {
                let got = spec.marginal(j, &label(r as u32 + 1), t).unwrap();
                worst = worst.max((got - wj[r][k].norm_sqr() / 2.0).abs());
            }
        }
    }
    worst
}

fn marginal_sums_agree(spec: &QSystemSpec) -> bool {
    let pr = spec.event_prob;
    (0..spec.patterns.len()).all(|t| {
        let want = spec.pattern_probs[t] / pr;
        (0..spec.parties.len()).all(|j| {
            let sum: f64 = spec.labels[j].iter().map(|l| spec.marginal(j, l, t).unwrap()).sum();
            (sum - want).abs() <= 1e-10
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ring_marginals_follow_the_closed_form(seed in any::<u64>(), n in 3usize..8) {
        let w = random_unitaries2(&mut rng(seed), n);
        let (net, s) = make_ring_tc(n, &w).unwrap();
        let spec = spec_of(&net, &s);
        prop_assert!(two_pattern_deviation(&net, &spec, &w, &[0, 1], |r| OutcomeLabel::token_extra(1, r)) <= 1e-10);
        prop_assert!(marginal_sums_agree(&spec));
    }

    #[test]
    fn complete_marginals_follow_the_closed_form(seed in any::<u64>(), n in 4usize..6) {
        let w = random_unitaries2(&mut rng(seed), n);
        let (net, s) = make_complete_cm(n, &w).unwrap();
        let spec = spec_of(&net, &s);
        let mut first = vec![1u32; n - 1];
        first[0] = 0;
        first[n - 2] = 0;
        prop_assert!(two_pattern_deviation(&net, &spec, &w, &first, OutcomeLabel::Ambiguous) <= 1e-10);
        prop_assert!(marginal_sums_agree(&spec));
        prop_assert!((spec.event_prob - 2f64.powi(1 - (n * (n - 1) / 2) as i32)).abs() <= 1e-12);
    }

    #[test]
    fn finner_holds_for_classical_strategies(seed in any::<u64>(), k in 1usize..4, which in 0usize..7) {
        let net = &pfis_networks()[which];
        let w = net.find_pfis().unwrap();
        let s = random_classical(net, &mut rng(seed), k);
        let r = finner_check_classical(net, &s, &w, |_, l| indicator(l, &OutcomeLabel::token(1))).unwrap();
        prop_assert!(r.gap >= -1e-10, "gap {}", r.gap);
    }

    #[test]
    fn five_zero_marginals_follow_the_closed_form(theta in -3.2f64..3.2) {
        let p = FiveZeroParams::rotation(theta);
        let (net, s) = make_5_0_tc(&p).unwrap();
        let spec = spec_of(&net, &s);
        prop_assert!(marginal_sums_agree(&spec));
        // A's i-th ambiguous vector in pattern t: |ω_i^{(t)}|²/3, with t read
        // off the slot through which A's single token arrives.
        for (t, pat) in spec.patterns.iter().enumerate() {
            let slot = pat.delivered(&net, 0).iter().position(|&x| x == 1).unwrap();
            for i in 0..3 {
                let got = spec.marginal(0, &OutcomeLabel::token_extra(1, i as u32 + 1), t).unwrap();
                prop_assert!((got - p.a[i][slot].norm_sqr() / 3.0).abs() <= 1e-10);
            }
        }
    }
}

/// At θ = 0 every basis is computational, so the classical q built from the
/// decohered strategy must satisfy the generated system.
#[test]
fn coherence_free_strategies_are_feasible_points() {
    for name in ["5-0", "1-2", "ring:3", "ring:6", "kn:4", "kn:5"] {
        let e: CatalogEntry = name.parse().unwrap();
        let (net, s) = e.build(0.0).unwrap();
        let spec = spec_of(&net, &s);
        let p = to_feasibility_problem(&spec);
        let npat = spec.patterns.len();
        let mut x = vec![0.0; p.num_vars()];
        for (o, labels) in spec.joint.keys().enumerate() {
            for (t, pat) in spec.patterns.iter().enumerate() {
                let weight: f64 = labels
                    .iter()
                    .enumerate()
                    .map(|(j, l)| s.bases[j].vector(l).unwrap().overlap(&pat.delivered(&net, j)).norm_sqr())
                    .product();
                x[o * npat + t] = weight * spec.pattern_probs[t] / spec.event_prob;
            }
        }
        let worst = p.residuals(&x).iter().fold(0.0f64, |a, r| a.max(r.abs()));
        assert!(worst <= 1e-10, "{name}: residual {worst:e}");
        assert!(solve_feasibility(&p).unwrap().is_feasible(), "{name}");
    }
}

#[test]
fn published_parameters_certify() {
    for name in ["5-0", "1-2"] {
        let (net, s) = name.parse::<CatalogEntry>().unwrap().build(PI / 8.0).unwrap();
        let r = certify_nonlocality(&net, &s, Event::AllAmbiguous, &QOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Nonlocal, "{name}");
        assert!(r.verified && r.margin.unwrap() >= 1e-7);
        assert!(!r.heuristic);
    }
}

#[test]
fn hypotheses_hold_for_every_family() {
    for name in ["5-0", "1-2", "ring:3", "ring:4", "kn:4", "coloring:5"] {
        let (net, s) = name.parse::<CatalogEntry>().unwrap().build(0.3).unwrap();
        let h = check_hypotheses(&net, &s);
        assert!(h.holds, "{name}: {:?}", h.notes);
    }
}

#[test]
fn reports_are_reproducible() {
    let (net, s) = CatalogEntry::Ring(5).build(0.1).unwrap();
    let a = certify_nonlocality(&net, &s, Event::AllAmbiguous, &QOptions::default()).unwrap();
    let b = certify_nonlocality(&net, &s, Event::AllAmbiguous, &QOptions::default()).unwrap();
    assert_eq!(a.to_json(), b.to_json());
}
