//! Exact output distribution of the token-counting strategy on the 5-0
//! network, and its token-count marginal.

use netrig::catalog::{make_5_0_tc, FiveZeroParams};
use netrig::quantum::{coarse_grain, count_projection, joint_distribution, OutcomeLabel};
use netrig::rigidity::Event;

fn main() {
    let theta = std::f64::consts::PI / 8.0;
    let (net, strat) = make_5_0_tc(&FiveZeroParams::rotation(theta)).unwrap();
    let dist = joint_distribution(&net, &strat).unwrap();
    println!("{} atoms, total {:.15}", dist.atoms.len(), dist.total());

    let tokens = coarse_grain(&dist, count_projection);
    println!("\ntoken-count marginal ({}):", tokens.parties.join(", "));
    for (o, p) in &tokens.atoms {
        let o: Vec<String> = o.iter().map(ToString::to_string).collect();
        println!("  {:<16} {p:.6}", o.join(" "));
    }

    let n = OutcomeLabel::token;
    println!("\nP(n = 1,1,2,1) = {}", tokens.prob(&[n(1), n(1), n(2), n(1)]));

    // The refined ambiguous outputs: which |chi> fired at each party.
    println!("\nambiguous atoms:");
    for (o, p) in dist.atoms.iter().filter(|(o, _)| Event::AllAmbiguous.holds(o)) {
        let o: Vec<String> = o.iter().map(ToString::to_string).collect();
        println!("  {:<20} {p:.6}", o.join(" "));
    }
}
