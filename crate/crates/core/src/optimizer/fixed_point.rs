use super::{Problem, SolveOptions, SolveResult};
use crate::analysis::ObjectiveKind;
use crate::error::Result;
use crate::graph::Topology;

/// Damped iteration of the interior stationarity condition:
///
/// ```text
/// q_l <- (1 - damping) q_l + damping * clamp(A_l / (p_l (A_l + B_l)), lo, 1)
/// ```
///
/// Converges when the fixed-point residual drops to `tol_fp`. A coordinate
/// pinned at a clamp bound has zero residual exactly when the derivative has
/// the sign the bound requires (non-positive at 1, non-negative at `lo`).
pub fn solve_fixed_point(
    t: &Topology,
    p: &[f64],
    kind: ObjectiveKind,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    opts.validate()?;
    let problem = Problem::new(t, p, kind)?;
    if !problem.has_links() {
        return Ok(problem.trivial_result());
    }
    let lo = opts.epsilon_lo;
    let mut q = problem.initial_point(opts)?;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while let Some(aggs) = problem.aggregates(&q) {
        let targets = problem.fixed_point_targets(&aggs);
        if problem.fixed_point_residual(&q, &targets, lo) <= opts.tol_fp {
            converged = true;
            break;
        }
        if iterations == opts.max_iters {
            break;
        }
        iterations += 1;
        for k in 0..q.len() {
            if problem.active[k] {
                let target = targets[k].clamp(lo, 1.0);
                q[k] = ((1.0 - opts.damping) * q[k] + opts.damping * target).clamp(lo, 1.0);
            }
        }
        trace.push(problem.objective(&q));
    }

    let (grad_residual, fp_residual) = problem.residuals(&q, lo);
    Ok(SolveResult {
        objective_value: problem.objective(&q),
        q_star: q,
        grad_residual,
        fp_residual,
        iterations,
        converged,
        trace,
    })
}
