use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use netrig::catalog::CatalogEntry;
use netrig::classical::classical_joint;
use netrig::netgraph::Network;
use netrig::quantum::{
    coarse_grain, decohere, joint_distribution, JointDistribution, OutcomeLabel, QuantumStrategy,
    StrategyKind,
};
use netrig::rigidity::{certify_nonlocality, finner_check, Event, QOptions, Verdict};
use netrig::sweep::{grid, parse_angle, run_scan_with, to_csv};
use netrig::{Error, Result};

#[derive(Parser)]
#[command(name = "netrig", version, about = "Network nonlocality via token-counting and color-matching rigidity")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Report NDCS, ECS and PFIS for a network JSON file.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Compute the exact joint output distribution.
    Simulate {
        #[command(flatten)]
        target: Target,
        /// Coarse-grain to the token-count / color marginal.
        #[arg(long)]
        coarse: bool,
        /// Write the distribution JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run the nonlocality certification pipeline.
    Certify {
        #[command(flatten)]
        target: Target,
        /// Write the report JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Certify a catalog family over an angle grid and emit CSV.
    Scan {
        name: CatalogEntry,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        asymmetric: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Leave the timing column empty for byte-reproducible output.
        #[arg(long)]
        omit_timing: bool,
    },
    /// Evaluate Finner's inequality on the decohered and quantum distributions.
    Finner {
        #[command(flatten)]
        target: Target,
        /// Outcome labels counted by the indicator (repeatable). Defaults to
        /// a match on the lowest color for CM strategies and `n1` otherwise.
        #[arg(long = "label")]
        labels: Vec<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct Target {
    /// Catalog name (`5-0`, `ring:n`, `1-2`, `kn:n`, `coloring:n`) or a strategy JSON file.
    target: String,
    /// Angle in radians, or a multiple of pi such as `pi/8`.
    #[arg(long, default_value = "pi/8", allow_hyphen_values = true)]
    theta: String,
    /// Two-outcome families: put 1/sqrt(2) at the last party.
    #[arg(long)]
    asymmetric: bool,
}

impl Target {
    fn load(&self) -> Result<(Network, QuantumStrategy)> {
        let path = Path::new(&self.target);
        if path.is_file() {
            return QuantumStrategy::from_json(&fs::read_to_string(path)?);
        }
        let entry: CatalogEntry = self.target.parse()?;
        let theta = parse_angle(&self.theta)?;
        if self.asymmetric {
            entry.build_asymmetric(theta)
        } else {
            entry.build(theta)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Indeterminate(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Analyze { file, json } => analyze(&file, json),
        Cmd::Simulate {
            target,
            coarse,
            out,
            json,
        } => simulate(&target, coarse, out.as_deref(), json),
        Cmd::Certify { target, out, json } => certify(&target, out.as_deref(), json),
        Cmd::Scan {
            name,
            from,
            to,
            steps,
            asymmetric,
            out,
            omit_timing,
        } => {
            let thetas = grid(parse_angle(&from)?, parse_angle(&to)?, steps);
            let rows = if asymmetric {
                run_scan_with(|t| name.build_asymmetric(t), &thetas)?
            } else {
                run_scan_with(|t| name.build(t), &thetas)?
            };
            emit(&to_csv(&rows, omit_timing), out.as_deref())
        }
        Cmd::Finner {
            target,
            labels,
            json,
        } => finner(&target, &labels, json),
    }
}

fn analyze(file: &Path, json: bool) -> Result<()> {
    let net = Network::from_json_permissive(&fs::read_to_string(file)?)?;
    let pfis = net.find_pfis().map(|w| w.weights);
    if json {
        let doc = json!({
            "parties": net.parties(),
            "ndcs": net.check_ndcs(),
            "ecs": net.check_ecs(),
            "pfis": pfis,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        let pfis = match pfis {
            Some(w) => serde_json::to_string(&w)?,
            None => "none".into(),
        };
        println!("NDCS:{} ECS:{} PFIS:{pfis}", net.check_ndcs(), net.check_ecs());
    }
    Ok(())
}

fn simulate(target: &Target, coarse: bool, out: Option<&Path>, json: bool) -> Result<()> {
    let (net, strat) = target.load()?;
    let mut dist = joint_distribution(&net, &strat)?;
    if coarse {
        dist = coarse_grain(&dist, strat.kind.projection());
    }
    if let Some(p) = out {
        fs::write(p, dist.to_json())?;
    }
    if json {
        println!("{}", dist.to_json());
    } else if out.is_none() {
        println!("{}", dist.parties.join(" "));
        for (o, p) in &dist.atoms {
            let cells: Vec<String> = o.iter().map(ToString::to_string).collect();
            println!("{}  {p:.12}", cells.join(" "));
        }
        let amb = dist.mass(|o| Event::AllAmbiguous.holds(o));
        println!("total {:.12}  all-ambiguous {amb:.12}", dist.total());
    }
    Ok(())
}

fn certify(target: &Target, out: Option<&Path>, json: bool) -> Result<()> {
    let (net, strat) = target.load()?;
    let report = certify_nonlocality(&net, &strat, Event::AllAmbiguous, &QOptions::default())?;
    if let Some(p) = out {
        fs::write(p, report.to_json())?;
    }
    if json {
        println!("{}", report.to_json());
        return Ok(());
    }
    println!("verdict: {}", report.verdict);
    if report.heuristic {
        println!("note: strategy outside the catalog families; marginals are heuristic");
    }
    for n in &report.hypothesis.notes {
        println!("hypothesis: {n}");
    }
    if report.verdict == Verdict::Refused {
        return Ok(());
    }
    if let Some(p) = report.event_prob {
        println!("event probability: {p:.12}");
    }
    println!("hidden patterns: {}", report.patterns.len());
    println!("lp: {} variables, {} rows", report.lp_vars, report.lp_rows);
    if let Some(m) = report.margin {
        println!("farkas margin: {m:.6e}");
    }
    if let Some(r) = report.max_residual {
        println!("witness residual: {r:.3e}");
    }
    println!("verified: {}", report.verified);
    Ok(())
}

fn default_label(strat: &QuantumStrategy) -> OutcomeLabel {
    let lowest = strat
        .bases
        .iter()
        .flat_map(|b| b.labels())
        .filter_map(|l| match l {
            OutcomeLabel::ColorMatch(c) => Some(*c),
            _ => None,
        })
        .min();
    match (strat.kind, lowest) {
        (StrategyKind::ColorMatching, Some(c)) => OutcomeLabel::ColorMatch(c),
        _ => OutcomeLabel::token(1),
    }
}

fn finner(target: &Target, labels: &[String], json: bool) -> Result<()> {
    let (net, strat) = target.load()?;
    let weights = net
        .find_pfis()
        .ok_or_else(|| Error::InvalidNetwork("network admits no PFIS".into()))?;
    let proj = strat.kind.projection();
    let wanted = labels
        .iter()
        .map(|s| s.parse::<OutcomeLabel>().map(|l| proj(&l)))
        .collect::<Result<BTreeSet<_>>>()?;
    let wanted = if wanted.is_empty() {
        BTreeSet::from([default_label(&strat)])
    } else {
        wanted
    };
    let g = |_: usize, l: &OutcomeLabel| f64::from(u8::from(wanted.contains(&proj(l))));
    let quantum: JointDistribution = joint_distribution(&net, &strat)?;
    let classical = classical_joint(&net, &decohere(&net, &strat)?)?;
    let c = finner_check(&classical, &weights, g);
    let q = finner_check(&quantum, &weights, g);
    if json {
        let doc = json!({
            "weights": weights.weights,
            "decohered": { "lhs": c.lhs, "rhs": c.rhs, "gap": c.gap },
            "quantum": { "lhs": q.lhs, "rhs": q.rhs, "gap": q.gap },
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("weights: {:?}", weights.weights);
        println!("decohered: lhs {:.12} rhs {:.12} gap {:+.3e}", c.lhs, c.rhs, c.gap);
        println!("quantum:   lhs {:.12} rhs {:.12} gap {:+.3e}", q.lhs, q.rhs, q.gap);
    }
    Ok(())
}
