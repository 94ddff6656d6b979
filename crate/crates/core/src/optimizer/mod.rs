//! Minimization of the age objective over transmit probabilities in
//! `[0, 1]^n`.
//!
//! Two general solvers are provided: projected gradient descent and a
//! damped iteration of the interior stationarity condition
//! `q_l = A_l / (p_l (A_l + B_l))`. Both are cross-checked against the
//! closed forms for regular graphs and stars, and against an exhaustive
//! grid search for small graphs.
//!
//! Isolated nodes own no links, so any `q` is optimal for them; solvers
//! report `q = 0` there.

mod closed_form;
mod fixed_point;
mod grid;
mod projected;

pub use closed_form::{
    d_regular_closed_form, star_equation_residuals, star_polynomial_check, star_solve,
};
pub use fixed_point::solve_fixed_point;
pub use grid::{brute_force_grid, brute_force_grid_with_budget, GridResult, DEFAULT_CELL_BUDGET};
pub use projected::solve_projected_gradient;

use serde::{Deserialize, Serialize};

use crate::analysis::{self, check_unit_interval, NetworkParams, ObjectiveKind};
use crate::error::{Error, Result};
use crate::graph::Topology;

/// Solver configuration shared by the general solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Stop threshold on the infinity norm of the projected gradient.
    pub tol_grad: f64,
    /// Stop threshold on the fixed-point residual.
    pub tol_fp: f64,
    /// Mixing weight of the fixed-point update, in `(0, 1]`.
    pub damping: f64,
    /// Lower clamp applied to every non-isolated `q`.
    pub epsilon_lo: f64,
    pub initial_q: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            tol_grad: 1e-9,
            tol_fp: 1e-10,
            damping: 0.5,
            epsilon_lo: 1e-9,
            initial_q: None,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if self.max_iters < 1 {
            return bad("max_iters must be at least 1");
        }
        if !(self.tol_grad > 0.0 && self.tol_fp > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad("damping must lie in (0, 1]");
        }
        if !(self.epsilon_lo > 0.0 && self.epsilon_lo < 0.5) {
            return bad("epsilon_lo must lie in (0, 0.5)");
        }
        Ok(())
    }
}

/// Outcome of a solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub q_star: Vec<f64>,
    pub objective_value: f64,
    /// Infinity norm of the projected gradient at `q_star`.
    pub grad_residual: f64,
    /// Largest `|q_l - clamp(A_l / (p_l (A_l + B_l)))|` over non-isolated
    /// nodes. At interior coordinates this is the stationarity residual; at
    /// clamped ones it is zero exactly when the KKT sign condition holds.
    pub fp_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value after each iteration.
    pub trace: Vec<f64>,
}

/// Validated problem data shared by the solvers.
pub(crate) struct Problem<'a> {
    pub t: &'a Topology,
    pub p: &'a [f64],
    pub kind: ObjectiveKind,
    /// Nodes with at least one neighbor.
    pub active: Vec<bool>,
}

impl<'a> Problem<'a> {
    pub fn new(t: &'a Topology, p: &'a [f64], kind: ObjectiveKind) -> Result<Self> {
        if p.len() != t.n() {
            return Err(Error::InvalidParams(format!(
                "p has {} entries but the topology has {} nodes",
                p.len(),
                t.n()
            )));
        }
        check_unit_interval("p", p)?;
        let active: Vec<bool> = (0..t.n()).map(|i| t.degree(i) > 0).collect();
        if let Some(k) = (0..t.n()).find(|&k| active[k] && p[k] == 0.0) {
            return Err(Error::Infeasible(format!(
                "node {k} never generates updates (p = 0), so every q gives infinite age"
            )));
        }
        Ok(Self { t, p, kind, active })
    }

    pub fn params(&self, q: &[f64]) -> NetworkParams {
        NetworkParams::new(self.p.to_vec(), q.to_vec()).expect("iterates stay in [0, 1]")
    }

    pub fn objective(&self, q: &[f64]) -> f64 {
        analysis::objective_unchecked(self.t, &self.params(q), self.kind)
    }

    pub fn gradient(&self, q: &[f64]) -> Option<Vec<f64>> {
        analysis::gradient(self.t, &self.params(q), self.kind).ok()
    }

    pub fn aggregates(&self, q: &[f64]) -> Option<Vec<(f64, f64)>> {
        analysis::all_aggregates(self.t, &self.params(q), self.kind).ok()
    }

    pub fn has_links(&self) -> bool {
        self.t.edge_count() > 0
    }

    /// Starting point: the regular-graph closed form applied per node, or
    /// the caller's point, clamped to `[lo, 1]` with isolated nodes at 0.
    pub fn initial_point(&self, opts: &SolveOptions) -> Result<Vec<f64>> {
        let q = match &opts.initial_q {
            Some(q0) => {
                if q0.len() != self.t.n() {
                    return Err(Error::InvalidParams(format!(
                        "initial_q has {} entries but the topology has {} nodes",
                        q0.len(),
                        self.t.n()
                    )));
                }
                check_unit_interval("initial_q", q0)?;
                q0.clone()
            }
            None => default_initial_q(self.t, self.p),
        };
        Ok(self.project(q, opts.epsilon_lo))
    }

    pub fn project(&self, mut q: Vec<f64>, lo: f64) -> Vec<f64> {
        for (k, v) in q.iter_mut().enumerate() {
            *v = if self.active[k] {
                v.clamp(lo, 1.0)
            } else {
                0.0
            };
        }
        q
    }

    /// `max_l |q_l - clamp(q_l - g_l, lo, 1)|` over active nodes.
    pub fn projected_gradient_norm(&self, q: &[f64], grad: &[f64], lo: f64) -> f64 {
        (0..q.len())
            .filter(|&k| self.active[k])
            .map(|k| (q[k] - (q[k] - grad[k]).clamp(lo, 1.0)).abs())
            .fold(0.0, f64::max)
    }

    /// Unclamped stationarity targets `A_l / (p_l (A_l + B_l))`.
    pub fn fixed_point_targets(&self, aggs: &[(f64, f64)]) -> Vec<f64> {
        aggs.iter()
            .zip(self.p)
            .zip(&self.active)
            .map(|((&(a, b), &p), &active)| if active { a / (p * (a + b)) } else { 0.0 })
            .collect()
    }

    pub fn fixed_point_residual(&self, q: &[f64], targets: &[f64], lo: f64) -> f64 {
        (0..q.len())
            .filter(|&k| self.active[k])
            .map(|k| (q[k] - targets[k].clamp(lo, 1.0)).abs())
            .fold(0.0, f64::max)
    }

    /// Residuals at `q`; infinite when `q` is not an interior point.
    pub fn residuals(&self, q: &[f64], lo: f64) -> (f64, f64) {
        let grad = match self.gradient(q) {
            Some(g) => self.projected_gradient_norm(q, &g, lo),
            None => f64::INFINITY,
        };
        let fp = match self.aggregates(q) {
            Some(aggs) => self.fixed_point_residual(q, &self.fixed_point_targets(&aggs), lo),
            None => f64::INFINITY,
        };
        (grad, fp)
    }

    /// Result for a topology without links.
    pub fn trivial_result(&self) -> SolveResult {
        SolveResult {
            q_star: vec![0.0; self.t.n()],
            objective_value: 0.0,
            grad_residual: 0.0,
            fp_residual: 0.0,
            iterations: 0,
            converged: true,
            trace: Vec::new(),
        }
    }

    /// Result record for an externally computed point.
    pub fn evaluate(&self, q: Vec<f64>, lo: f64) -> SolveResult {
        let (grad_residual, fp_residual) = self.residuals(&q, lo);
        SolveResult {
            objective_value: self.objective(&q),
            q_star: q,
            grad_residual,
            fp_residual,
            iterations: 0,
            converged: true,
            trace: Vec::new(),
        }
    }
}

/// Per-node closed form `min(1 / (p_i (deg_i + 1)), 1 - 1e-6)`; isolated
/// nodes and nodes with `p_i = 0` get 0.
pub fn default_initial_q(t: &Topology, p: &[f64]) -> Vec<f64> {
    (0..t.n())
        .map(|i| {
            let d = t.degree(i);
            if d == 0 || p[i] == 0.0 {
                0.0
            } else {
                (1.0 / (p[i] * (d as f64 + 1.0))).min(1.0 - 1e-6)
            }
        })
        .collect()
}

/// Result record (objective and residuals) for a given `q`, e.g. one produced
/// by a closed form.
pub fn evaluate_point(
    t: &Topology,
    p: &[f64],
    kind: ObjectiveKind,
    q: Vec<f64>,
    epsilon_lo: f64,
) -> Result<SolveResult> {
    let problem = Problem::new(t, p, kind)?;
    if q.len() != t.n() {
        return Err(Error::InvalidParams("q has the wrong length".into()));
    }
    check_unit_interval("q", &q)?;
    Ok(problem.evaluate(q, epsilon_lo))
}
