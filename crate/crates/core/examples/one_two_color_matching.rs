//! Color matching on the 1-2 network with equal rotation bases.

use std::f64::consts::PI;

use netrig::catalog::{make_1_2_cm, OneTwoParams};
use netrig::quantum::{coarse_grain, joint_distribution, OutcomeLabel, StrategyKind};
use netrig::rigidity::{build_q_system, certify_nonlocality, check_hypotheses, Event, QOptions};

fn main() {
    let (net, strat) = make_1_2_cm(&OneTwoParams::rotation(PI / 8.0)).unwrap();

    let hyp = check_hypotheses(&net, &strat);
    println!("ECS={} PFIS={:?} CM form={}", hyp.ecs, hyp.pfis, hyp.strategy_form);

    let dist = joint_distribution(&net, &strat).unwrap();
    let colors = coarse_grain(&dist, StrategyKind::ColorMatching.projection());
    let chi = OutcomeLabel::Ambiguous(0);
    println!("P(chi,chi,chi,chi) = {:.12}", colors.prob(&[chi.clone(), chi.clone(), chi.clone(), chi]));

    let spec = build_q_system(&net, &strat, Event::AllAmbiguous, &QOptions::default()).unwrap();
    println!("{} hidden color patterns", spec.patterns.len());
    for (j, party) in spec.parties.iter().enumerate() {
        let row: Vec<String> = (0..spec.patterns.len())
            .map(|t| format!("{:.4}", spec.marginal(j, &OutcomeLabel::Ambiguous(1), t).unwrap()))
            .collect();
        println!("  q({party}=chi1, t) = {}", row.join(" "));
    }

    let report = certify_nonlocality(&net, &strat, Event::AllAmbiguous, &QOptions::default()).unwrap();
    println!("verdict {} margin {:?}", report.verdict, report.margin);
}
