//! Angle parsing and parallel certification sweeps.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::CatalogEntry;
use crate::error::{Error, Result};
use crate::netgraph::Network;
use crate::quantum::QuantumStrategy;
use crate::rigidity::{certify_nonlocality, Event, QOptions, Verdict};

/// Parses radians given as a decimal (`0.3927`) or a multiple of π
/// (`pi`, `pi/8`, `3pi/8`, `3*pi/8`, `-pi/4`).
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || Error::Parse(format!("cannot parse angle {s:?}"));
    let Some(pos) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad()).and_then(|x| {
            if x.is_finite() {
                Ok(x)
            } else {
                Err(bad())
            }
        });
    };
    let (head, tail) = (&t[..pos], &t[pos + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let denom = match tail {
        "" => 1.0,
        d => d
            .strip_prefix('/')
            .ok_or_else(bad)?
            .parse::<f64>()
            .map_err(|_| bad())?,
    };
    if denom == 0.0 || !coef.is_finite() {
        return Err(bad());
    }
    Ok(coef * PI / denom)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub verdict: Verdict,
    pub margin: Option<f64>,
    pub event_prob: Option<f64>,
    pub ms: f64,
}

/// `steps` evenly spaced angles from `from` to `to` inclusive.
pub fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        n => (0..n)
            .map(|k| from + (to - from) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Certifies `entry` at each angle in parallel; rows come back sorted by angle.
/// Input errors abort the scan; numerical indeterminacy becomes a row.
pub fn run_scan(entry: CatalogEntry, thetas: &[f64]) -> Result<Vec<SweepRow>> {
    run_scan_with(|t| entry.build(t), thetas)
}

/// [`run_scan`] over an arbitrary family `θ ↦ (network, strategy)`.
pub fn run_scan_with<F>(build: F, thetas: &[f64]) -> Result<Vec<SweepRow>>
where
    F: Fn(f64) -> Result<(Network, QuantumStrategy)> + Sync,
{
    let mut rows = thetas
        .par_iter()
        .map(|&theta| {
            let start = Instant::now();
            let (net, strat) = build(theta)?;
            let row = match certify_nonlocality(&net, &strat, Event::AllAmbiguous, &QOptions::default()) {
                Ok(r) => SweepRow {
                    theta,
                    verdict: r.verdict,
                    margin: r.margin,
                    event_prob: r.event_prob,
                    ms: 0.0,
                },
                Err(Error::Indeterminate(_)) => SweepRow {
                    theta,
                    verdict: Verdict::Indeterminate,
                    margin: None,
                    event_prob: None,
                    ms: 0.0,
                },
                Err(e) => return Err(e),
            };
            Ok(SweepRow {
                ms: start.elapsed().as_secs_f64() * 1e3,
                ..row
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    Ok(rows)
}

pub const CSV_HEADER: &str = "theta,verdict,margin,event_prob,ms";

/// CSV with the fixed header. With `omit_timing` the `ms` column is left
/// empty so identical scans give identical bytes.
pub fn to_csv(rows: &[SweepRow], omit_timing: bool) -> String {
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let ms = if omit_timing {
            String::new()
        } else {
            format!("{:.3}", r.ms)
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.theta,
            r.verdict,
            opt(r.margin),
            opt(r.event_prob),
            ms
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_forms() {
        assert_eq!(parse_angle("pi/8").unwrap(), PI / 8.0);
        assert_eq!(parse_angle("3pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_angle("3*pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_angle("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_angle("PI").unwrap(), PI);
        assert_eq!(parse_angle("0.3927").unwrap(), 0.3927);
        for bad in ["", "pi/0", "x", "pi8", "2pi/y", "nan"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grid_endpoints() {
        let g = grid(0.0, 1.0, 5);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[4], 1.0);
        assert_eq!(grid(0.5, 1.0, 1), vec![0.5]);
    }

    #[test]
    fn csv_is_sorted_and_stable() {
        let thetas = grid(0.0, PI / 8.0, 3);
        let a = run_scan(CatalogEntry::Ring(3), &thetas).unwrap();
        let b = run_scan(CatalogEntry::Ring(3), &thetas).unwrap();
        assert!(a.windows(2).all(|w| w[0].theta <= w[1].theta));
        assert_eq!(to_csv(&a, true), to_csv(&b, true));
        assert!(to_csv(&a, true).starts_with(CSV_HEADER));
    }
}
