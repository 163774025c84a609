//! Feasibility of `A x = b, x >= 0` with certificates either way.
//!
//! The solver runs phase one of the simplex method on a dense tableau,
//! pricing by most negative reduced cost and falling back to Bland's rule
//! when it stalls on degenerate pivots. A feasible answer carries a witness `x`; an
//! infeasible one carries Farkas multipliers `y` with `yᵀA >= 0` and
//! `yᵀb < 0`. Every answer is re-verified from the problem data alone
//! before it is returned.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row residual allowed for a feasible witness.
pub const FEAS_TOL: f64 = 1e-9;
/// Smallest acceptable Farkas margin (`-yᵀb` with `max |y| = 1`).
pub const MARGIN_MIN: f64 = 1e-7;
/// Slack allowed on sign conditions (`x >= 0`, `yᵀA >= 0`).
pub const SIGN_TOL: f64 = 1e-12;

const PIVOT_TOL: f64 = 1e-11;
const REDUCED_COST_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// Sparse `(variable, coefficient)` pairs.
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
    /// Which identity generated this row.
    pub tag: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityProblem {
    pub var_names: Vec<String>,
    pub rows: Vec<Row>,
}

impl FeasibilityProblem {
    pub fn new(var_names: Vec<String>, rows: Vec<Row>) -> Result<Self> {
        let p = Self { var_names, rows };
        p.check()?;
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn check(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::MalformedProblem("no constraint rows".into()));
        }
        for r in &self.rows {
            if !r.rhs.is_finite() {
                return Err(Error::MalformedProblem(format!("row {:?}: rhs not finite", r.tag)));
            }
            for &(v, c) in &r.coeffs {
                if v >= self.num_vars() {
                    return Err(Error::MalformedProblem(format!(
                        "row {:?}: variable {v} out of range",
                        r.tag
                    )));
                }
                if !c.is_finite() {
                    return Err(Error::MalformedProblem(format!(
                        "row {:?}: coefficient not finite",
                        r.tag
                    )));
                }
            }
        }
        Ok(())
    }

    /// `A x - b` per row.
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.coeffs.iter().map(|&(v, c)| c * x[v]).sum::<f64>() - r.rhs)
            .collect()
    }

    /// `yᵀA` per variable.
    pub fn combine(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_vars()];
        for (r, &yi) in self.rows.iter().zip(y) {
            if yi != 0.0 {
                for &(v, c) in &r.coeffs {
                    out[v] += yi * c;
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum FeasibilityResult {
    Feasible {
        witness: Vec<f64>,
    },
    Infeasible {
        /// One multiplier per row, normalised so the largest magnitude is 1.
        multipliers: Vec<f64>,
        margin: f64,
    },
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }

    /// Largest `|A x - b|` for a witness.
    pub fn max_residual(&self, p: &FeasibilityProblem) -> Option<f64> {
        match self {
            Self::Feasible { witness } => Some(
                p.residuals(witness)
                    .into_iter()
                    .fold(0.0, |m, r| m.max(r.abs())),
            ),
            Self::Infeasible { .. } => None,
        }
    }

    /// Nonzero multipliers keyed by row tag, for reports.
    pub fn named_multipliers<'a>(&'a self, p: &'a FeasibilityProblem) -> Vec<(&'a str, f64)> {
        match self {
            Self::Infeasible { multipliers, .. } => p
                .rows
                .iter()
                .zip(multipliers)
                .filter(|(_, &y)| y.abs() > 1e-15)
                .map(|(r, &y)| (r.tag.as_str(), y))
                .collect(),
            Self::Feasible { .. } => Vec::new(),
        }
    }

    pub fn named_witness<'a>(&'a self, p: &'a FeasibilityProblem) -> Vec<(&'a str, f64)> {
        match self {
            Self::Feasible { witness } => p
                .var_names
                .iter()
                .zip(witness)
                .filter(|(_, &x)| x > 1e-15)
                .map(|(n, &x)| (n.as_str(), x))
                .collect(),
            Self::Infeasible { .. } => Vec::new(),
        }
    }
}

/// Independent re-check of a result using only the problem data.
pub fn verify_certificate(p: &FeasibilityProblem, r: &FeasibilityResult) -> bool {
    match r {
        FeasibilityResult::Feasible { witness } => {
            witness.len() == p.num_vars()
                && witness.iter().all(|&x| x.is_finite() && x >= -SIGN_TOL)
                && p.residuals(witness).iter().all(|r| r.abs() <= FEAS_TOL)
        }
        FeasibilityResult::Infeasible {
            multipliers,
            margin,
        } => {
            if multipliers.len() != p.num_rows() || !multipliers.iter().all(|y| y.is_finite()) {
                return false;
            }
            let scale = multipliers.iter().fold(0.0f64, |m, y| m.max(y.abs()));
            if scale == 0.0 {
                return false;
            }
            let y: Vec<f64> = multipliers.iter().map(|v| v / scale).collect();
            let yb: f64 = p.rows.iter().zip(&y).map(|(r, yi)| r.rhs * yi).sum();
            *margin >= MARGIN_MIN
                && -yb >= MARGIN_MIN
                && p.combine(&y).iter().all(|&c| c >= -SIGN_TOL)
        }
    }
}

/// Decide feasibility of `p`. Returns [`Error::Indeterminate`] if neither a
/// witness nor a certificate survives re-verification.
pub fn solve_feasibility(p: &FeasibilityProblem) -> Result<FeasibilityResult> {
    p.check()?;
    let mut t = Tableau::phase_one(p);
    t.run()?;
    let w = t.objective();

    let witness = t.primal();
    let feasible = FeasibilityResult::Feasible { witness };
    let certificate = farkas_from_duals(p, &t.duals());

    let candidates: [Option<FeasibilityResult>; 2] = if w <= FEAS_TOL {
        [Some(feasible), certificate]
    } else {
        [certificate, Some(feasible)]
    };
    for c in candidates.into_iter().flatten() {
        if verify_certificate(p, &c) {
            return Ok(c);
        }
    }
    Err(Error::Indeterminate(format!(
        "phase-one optimum {w:.3e}: neither a witness within {FEAS_TOL:e} nor a Farkas margin above {MARGIN_MIN:e}"
    )))
}

/// Turns phase-one duals into a normalised Farkas certificate, repairing
/// small negative entries of `yᵀA` with a row whose coefficients are all
/// positive when one exists.
fn farkas_from_duals(p: &FeasibilityProblem, u: &[f64]) -> Option<FeasibilityResult> {
    let mut y: Vec<f64> = u.iter().map(|v| -v).collect();
    normalise(&mut y)?;
    let mut ya = p.combine(&y);
    let worst = ya.iter().fold(0.0f64, |m, &c| m.min(c));
    if worst < 0.0 {
        let (k, cmin) = covering_row(p)?;
        let delta = -worst / cmin;
        y[k] += delta;
        normalise(&mut y)?;
        ya = p.combine(&y);
        if ya.iter().any(|&c| c < -SIGN_TOL) {
            // one more pass absorbs rounding from the first
            let worst = ya.iter().fold(0.0f64, |m, &c| m.min(c));
            y[k] += -worst / cmin;
            normalise(&mut y)?;
        }
    }
    let yb: f64 = p.rows.iter().zip(&y).map(|(r, yi)| r.rhs * yi).sum();
    Some(FeasibilityResult::Infeasible {
        multipliers: y,
        margin: -yb,
    })
}

fn normalise(y: &mut [f64]) -> Option<()> {
    let s = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if s == 0.0 || !s.is_finite() {
        return None;
    }
    y.iter_mut().for_each(|v| *v /= s);
    Some(())
}

/// A row touching every variable with a positive coefficient, and that
/// row's smallest coefficient.
fn covering_row(p: &FeasibilityProblem) -> Option<(usize, f64)> {
    let n = p.num_vars();
    p.rows.iter().enumerate().find_map(|(k, r)| {
        let mut seen = vec![false; n];
        let mut cmin = f64::INFINITY;
        for &(v, c) in &r.coeffs {
            if c <= 0.0 {
                return None;
            }
            seen[v] = true;
            cmin = cmin.min(c);
        }
        seen.iter().all(|&s| s).then_some((k, cmin))
    })
}

/// Phase-one tableau for `A x + a = b` (rows sign-flipped so `b >= 0`),
/// minimising the sum of artificials `a`.
struct Tableau {
    m: usize,
    n: usize,
    width: usize,
    /// Row-major `m x width`; columns: `n` structural, `m` artificial, rhs.
    cells: Vec<f64>,
    /// Reduced costs, same layout as a row; the rhs entry is `-objective`.
    cost: Vec<f64>,
    basis: Vec<usize>,
    /// `-1` where the row was negated to make its rhs nonnegative.
    signs: Vec<f64>,
}

impl Tableau {
    fn phase_one(p: &FeasibilityProblem) -> Self {
        let m = p.num_rows();
        let n = p.num_vars();
        let width = n + m + 1;
        let mut cells = vec![0.0; m * width];
        let mut signs = vec![1.0; m];
        for (i, r) in p.rows.iter().enumerate() {
            let sign = if r.rhs < 0.0 { -1.0 } else { 1.0 };
            signs[i] = sign;
            let row = &mut cells[i * width..(i + 1) * width];
            for &(v, c) in &r.coeffs {
                row[v] += sign * c;
            }
            row[n + i] = 1.0;
            row[width - 1] = sign * r.rhs;
        }
        let mut cost = vec![0.0; width];
        for i in 0..m {
            let row = &cells[i * width..(i + 1) * width];
            for j in 0..n {
                cost[j] -= row[j];
            }
            cost[width - 1] -= row[width - 1];
        }
        Self {
            m,
            n,
            width,
            cells,
            cost,
            basis: (n..n + m).collect(),
            signs,
        }
    }

    fn objective(&self) -> f64 {
        -self.cost[self.width - 1]
    }

    fn run(&mut self) -> Result<()> {
        let max_iter = 50 * (self.m + self.n) + 1000;
        let mut degenerate_run = 0usize;
        let mut bland = false;
        for _ in 0..max_iter {
            // artificials never re-enter
            let entering = if bland {
                (0..self.n).find(|&j| self.cost[j] < -REDUCED_COST_TOL)
            } else {
                (0..self.n)
                    .filter(|&j| self.cost[j] < -REDUCED_COST_TOL)
                    .min_by(|&a, &b| self.cost[a].total_cmp(&self.cost[b]))
            };
            let Some(e) = entering else {
                return Ok(());
            };
            let rhs = self.width - 1;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.cells[i * self.width + e];
                if a > PIVOT_TOL {
                    let ratio = self.cells[i * self.width + rhs] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - 1e-14
                                || (ratio <= best + 1e-14 && self.basis[i] < self.basis[k])
                            {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((r, step)) = leave else {
                // phase one is bounded below; a missing pivot means the
                // column is numerically zero
                self.cost[e] = 0.0;
                continue;
            };
            if step <= 1e-14 {
                degenerate_run += 1;
                // a long degenerate stretch may be a cycle; Bland's rule ends it
                if degenerate_run > 50 {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, e);
        }
        Err(Error::Indeterminate("simplex iteration limit reached".into()))
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width;
        let piv = self.cells[r * w + e];
        {
            let row = &mut self.cells[r * w..(r + 1) * w];
            row.iter_mut().for_each(|v| *v /= piv);
            row[e] = 1.0;
        }
        let pivot_row: Vec<f64> = self.cells[r * w..(r + 1) * w].to_vec();
        let nz: Vec<usize> = (0..w).filter(|&k| pivot_row[k] != 0.0).collect();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.cells[i * w + e];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.cells[i * w..(i + 1) * w];
            for &k in &nz {
                row[k] -= f * pivot_row[k];
            }
            row[e] = 0.0;
            if row[w - 1] < 0.0 && row[w - 1] > -1e-13 {
                row[w - 1] = 0.0;
            }
        }
        let f = self.cost[e];
        if f != 0.0 {
            for &k in &nz {
                self.cost[k] -= f * pivot_row[k];
            }
            self.cost[e] = 0.0;
        }
        self.basis[r] = e;
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.cells[i * self.width + self.width - 1].max(0.0);
            }
        }
        x
    }

    /// Duals of the original (unflipped) rows: reduced cost of artificial
    /// `i` is `1 - u_i` in the flipped system.
    fn duals(&self) -> Vec<f64> {
        (0..self.m)
            .map(|i| {
                self.signs[i] * (1.0 - self.cost[self.n + i])
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(coeffs: &[(usize, f64)], rhs: f64) -> Row {
        Row {
            coeffs: coeffs.to_vec(),
            rhs,
            tag: String::new(),
        }
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn simplex_mass_is_feasible() {
        let p = FeasibilityProblem::new(names(3), vec![row(&[(0, 1.0), (1, 1.0), (2, 1.0)], 1.0)])
            .unwrap();
        let r = solve_feasibility(&p).unwrap();
        assert!(r.is_feasible());
        assert!(verify_certificate(&p, &r));
    }

    #[test]
    fn negative_value_is_infeasible_with_unit_margin() {
        let p = FeasibilityProblem::new(names(1), vec![row(&[(0, 1.0)], -1.0)]).unwrap();
        match solve_feasibility(&p).unwrap() {
            r @ FeasibilityResult::Infeasible { margin, .. } => {
                assert!((margin - 1.0).abs() < 1e-12);
                assert!(verify_certificate(&p, &r));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn perturbed_witness_fails() {
        let p = FeasibilityProblem::new(
            names(2),
            vec![row(&[(0, 1.0), (1, 1.0)], 1.0), row(&[(0, 1.0)], 0.25)],
        )
        .unwrap();
        let r = solve_feasibility(&p).unwrap();
        let FeasibilityResult::Feasible { mut witness } = r.clone() else {
            panic!()
        };
        assert!(verify_certificate(&p, &r));
        witness[0] += 1e-3;
        assert!(!verify_certificate(&p, &FeasibilityResult::Feasible { witness }));
    }

    #[test]
    fn conflicting_rows_infeasible() {
        // x0 + x1 = 1 and x0 + x1 = 2
        let p = FeasibilityProblem::new(
            names(2),
            vec![row(&[(0, 1.0), (1, 1.0)], 1.0), row(&[(0, 1.0), (1, 1.0)], 2.0)],
        )
        .unwrap();
        let r = solve_feasibility(&p).unwrap();
        assert!(!r.is_feasible());
        assert!(verify_certificate(&p, &r));
    }

    #[test]
    fn empty_row_with_positive_rhs() {
        let p = FeasibilityProblem::new(names(1), vec![row(&[], 0.5), row(&[(0, 1.0)], 1.0)])
            .unwrap();
        let r = solve_feasibility(&p).unwrap();
        assert!(!r.is_feasible());
        assert!(verify_certificate(&p, &r));
    }

    #[test]
    fn malformed_rejected() {
        assert!(FeasibilityProblem::new(names(1), vec![]).is_err());
        assert!(FeasibilityProblem::new(names(1), vec![row(&[(3, 1.0)], 1.0)]).is_err());
        assert!(FeasibilityProblem::new(names(1), vec![row(&[(0, f64::NAN)], 1.0)]).is_err());
    }

    #[test]
    fn forged_certificate_rejected() {
        let p = FeasibilityProblem::new(names(2), vec![row(&[(0, 1.0), (1, 1.0)], 1.0)]).unwrap();
        let fake = FeasibilityResult::Infeasible {
            multipliers: vec![-1.0],
            margin: 1.0,
        };
        assert!(!verify_certificate(&p, &fake));
    }
}
