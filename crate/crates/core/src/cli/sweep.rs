use super::report::{LineSweepRow, PresetRow, StarSweepRow};
use crate::analysis::{self, NetworkParams, ObjectiveKind};
use crate::error::{Error, Result};
use crate::graph;
use crate::optimizer::{self, SolveOptions};

/// For each line length, the objective at the uniform closed form for degree
/// 2 against the solver optimum.
pub fn line_sweep(
    from: usize,
    to: usize,
    p: f64,
    kind: ObjectiveKind,
    opts: &SolveOptions,
) -> Result<Vec<LineSweepRow>> {
    check_range(from, to, 2)?;
    let q_closed_form = optimizer::d_regular_closed_form(2, p)?;
    (from..=to)
        .map(|n| {
            let t = graph::make_line(n)?;
            let scale = match kind {
                ObjectiveKind::Total => n as f64,
                ObjectiveKind::NeighborNormalized => 1.0,
            };
            let params = NetworkParams::uniform(n, p, q_closed_form)?;
            let closed = analysis::objective(&t, &params, kind)? / scale;
            let best = optimizer::solve_projected_gradient(&t, &vec![p; n], kind, opts)?;
            let optimal = best.objective_value / scale;
            Ok(LineSweepRow {
                n,
                q_closed_form,
                aoi_closed_form: closed,
                aoi_optimal: optimal,
                relative_gap: (closed - optimal) / optimal,
            })
        })
        .collect()
}

/// Hub and leaf probabilities of the optimal star (`p = 1`) under the total
/// objective (closed form) and the neighbor-normalized one (general solver,
/// reading the hub and the first leaf).
pub fn star_sweep(from: usize, to: usize, opts: &SolveOptions) -> Result<Vec<StarSweepRow>> {
    check_range(from, to, 2)?;
    (from..=to)
        .map(|n| {
            let (q1_total, q2_total) = optimizer::star_solve(n)?;
            let t = graph::make_star(n)?;
            let r = optimizer::solve_projected_gradient(
                &t,
                &vec![1.0; n],
                ObjectiveKind::NeighborNormalized,
                opts,
            )?;
            Ok(StarSweepRow {
                n,
                q1_total,
                q2_total,
                q1_normalized: r.q_star[0],
                q2_normalized: r.q_star[1],
            })
        })
        .collect()
}

/// Optimal neighbor-normalized age for the four six-node presets.
pub fn preset_sweep(p: f64, opts: &SolveOptions) -> Result<Vec<PresetRow>> {
    graph::asymmetric_presets()
        .into_iter()
        .map(|(name, t)| {
            let r = optimizer::solve_projected_gradient(
                &t,
                &vec![p; t.n()],
                ObjectiveKind::NeighborNormalized,
                opts,
            )?;
            Ok(PresetRow {
                topology: name.to_string(),
                n: t.n(),
                edges: t.edge_count(),
                avg_degree: t.average_degree(),
                normalized_aoi: r.objective_value,
            })
        })
        .collect()
}

fn check_range(from: usize, to: usize, min: usize) -> Result<()> {
    if from < min || from > to {
        return Err(Error::InvalidSize(format!(
            "sweep range {from}..={to} is invalid (need {min} <= from <= to)"
        )));
    }
    Ok(())
}
