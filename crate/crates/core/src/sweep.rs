//! Equilibrium solves over a grid of coordinator parameters.

use std::io::Write;

use rayon::prelude::*;

use crate::bell::{bell_report, nparty_cereceda_lhs};
use crate::equilibrium::{find_equilibria, Classification, SolveOutcome, SolverConfig};
use crate::error::{Error, Result};
use crate::game::{CoordinatorParams, GameSpec};
use crate::probability::joint_for;

pub const CSV_HEADER: [&str; 6] = [
    "gamma",
    "phi",
    "payoff_p1_best",
    "payoff_p2_best",
    "max_cereceda_lhs",
    "equilibrium_count",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma: f64,
    pub phi: f64,
    /// Payoffs of the equilibrium with the largest payoff sum.
    pub best_payoffs: Vec<f64>,
    /// Largest Cereceda left-hand side over all returned equilibria.
    pub max_cereceda_lhs: f64,
    pub equilibrium_count: usize,
    /// Counts per classification, e.g. `edge=0 interior=0 family=16`.
    pub family_flags: String,
}

fn summarize(
    spec: &GameSpec,
    coord: &CoordinatorParams,
    outcome: &SolveOutcome,
) -> Result<SweepRow> {
    let n = spec.n_players();
    let mut best: Option<&[f64]> = None;
    let mut max_lhs = f64::NEG_INFINITY;
    for rep in &outcome.reports {
        let total = &rep.payoffs.total;
        if best.is_none_or(|b| total.iter().sum::<f64>() > b.iter().sum::<f64>()) {
            best = Some(total);
        }
        let probs = joint_for(&rep.profile, coord)?;
        let lhs = if n == 2 {
            bell_report(&probs)?.max_lhs
        } else {
            nparty_cereceda_lhs(&probs, n, false)?.max(nparty_cereceda_lhs(&probs, n, true)?)
        };
        max_lhs = max_lhs.max(lhs);
    }
    let count = |c: Classification| {
        outcome
            .reports
            .iter()
            .filter(|r| r.classification == c)
            .count()
    };
    Ok(SweepRow {
        gamma: coord.gamma(),
        phi: coord.phi(),
        best_payoffs: best.map_or_else(|| vec![f64::NAN; n], <[f64]>::to_vec),
        max_cereceda_lhs: max_lhs,
        equilibrium_count: outcome.reports.len(),
        family_flags: format!(
            "edge={} interior={} family={}",
            count(Classification::Edge),
            count(Classification::Interior),
            count(Classification::Family)
        ),
    })
}

/// Solves at every `(γ, φ)` pair, γ outer. Grid points run in parallel; the
/// rows come back in grid order.
pub fn sweep(
    spec: &GameSpec,
    gammas: &[f64],
    phis: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<SweepRow>> {
    if gammas.is_empty() || phis.is_empty() {
        return Err(Error::Parse("sweep grids must be nonempty".into()));
    }
    let points: Vec<CoordinatorParams> = gammas
        .iter()
        .flat_map(|&g| phis.iter().map(move |&p| CoordinatorParams::new(g, p)))
        .collect::<Result<_>>()?;
    points
        .par_iter()
        .map(|coord| {
            let outcome = find_equilibria(spec, coord, cfg)?;
            summarize(spec, coord, &outcome)
        })
        .collect()
}

/// Writes rows as CSV with the fixed header. Numbers are written with the
/// shortest representation that reads back exactly (exponent form for very
/// small or large magnitudes).
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let p = |k: usize| format!("{:?}", r.best_payoffs.get(k).copied().unwrap_or(f64::NAN));
        w.write_record([
            format!("{:?}", r.gamma),
            format!("{:?}", r.phi),
            p(0),
            p(1),
            format!("{:?}", r.max_cereceda_lhs),
            r.equilibrium_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(g: f64) -> SweepRow {
        SweepRow {
            gamma: g,
            phi: 0.0,
            best_payoffs: vec![0.1, 0.2],
            max_cereceda_lhs: -0.5,
            equilibrium_count: 3,
            family_flags: String::new(),
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&[row(0.0), row(1.5)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "gamma,phi,payoff_p1_best,payoff_p2_best,max_cereceda_lhs,equilibrium_count\n\
             0.0,0.0,0.1,0.2,-0.5,3\n1.5,0.0,0.1,0.2,-0.5,3\n"
        );
    }

    #[test]
    fn empty_grid_rejected() {
        let spec = crate::game::builtin_extended_bos();
        assert!(sweep(&spec, &[], &[0.0], &SolverConfig::default()).is_err());
    }
}
