//! Serializable report records emitted by the CLI, and the functions that
//! build them.

use serde::{Deserialize, Serialize};

use crate::analysis::{self, NetworkParams, ObjectiveKind};
use crate::error::Result;
use crate::graph::Topology;
use crate::optimizer::SolveResult;
use crate::simulator::{self, SimConfig, SimResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkRecord {
    pub receiver: usize,
    pub sender: usize,
    pub mu: f64,
    /// `null` when the link never delivers.
    pub aoi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub grad: f64,
    pub fixed_point: f64,
}

/// Output of `solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub topology: Topology,
    pub objective_kind: ObjectiveKind,
    pub solver: String,
    pub p: Vec<f64>,
    pub q_star: Vec<f64>,
    pub objective: f64,
    /// `objective / n`.
    pub objective_per_node: f64,
    pub per_link: Vec<LinkRecord>,
    pub residuals: Residuals,
    pub iterations: usize,
    pub converged: bool,
}

impl SolveReport {
    pub fn new(
        topology: &Topology,
        p: &[f64],
        kind: ObjectiveKind,
        solver: &str,
        result: &SolveResult,
    ) -> Result<Self> {
        let params = NetworkParams::new(p.to_vec(), result.q_star.clone())?;
        let metrics = analysis::link_metrics(topology, &params)?;
        let per_link = metrics
            .iter()
            .map(|(link, m)| LinkRecord {
                receiver: link.receiver,
                sender: link.sender,
                mu: m.mu,
                aoi: m.aoi.is_finite().then_some(m.aoi),
            })
            .collect();
        Ok(Self {
            topology: topology.clone(),
            objective_kind: kind,
            solver: solver.to_string(),
            p: p.to_vec(),
            q_star: result.q_star.clone(),
            objective: result.objective_value,
            objective_per_node: result.objective_value / topology.n() as f64,
            per_link,
            residuals: Residuals {
                grad: result.grad_residual,
                fixed_point: result.fp_residual,
            },
            iterations: result.iterations,
            converged: result.converged,
        })
    }
}

/// One row of the per-node solve table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRow {
    pub node: usize,
    pub degree: usize,
    pub q_star: f64,
}

pub fn node_rows(report: &SolveReport) -> Vec<NodeRow> {
    report
        .q_star
        .iter()
        .enumerate()
        .map(|(node, &q_star)| NodeRow {
            node,
            degree: report.topology.degree(node),
            q_star,
        })
        .collect()
}

/// Analytic and empirical figures for one directed link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimLinkRow {
    pub receiver: usize,
    pub sender: usize,
    pub deliveries: u64,
    pub mu_analytic: f64,
    pub mu_empirical: f64,
    pub aoi_analytic: Option<f64>,
    pub aoi_empirical: Option<f64>,
    pub rel_err_mu: Option<f64>,
    pub rel_err_aoi: Option<f64>,
}

impl SimLinkRow {
    /// True when both relative errors exist and are within `tol`.
    pub fn within(&self, tol: f64) -> bool {
        matches!((self.rel_err_mu, self.rel_err_aoi), (Some(a), Some(b)) if a <= tol && b <= tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSettings {
    pub slots: u64,
    pub warmup: u64,
    pub replications: u32,
    pub seed: u64,
    pub slots_measured: u64,
}

/// Output of `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub topology: Topology,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub sim: SimSettings,
    pub per_link: Vec<SimLinkRow>,
}

fn relative_error(got: f64, want: f64) -> Option<f64> {
    (want > 0.0 && want.is_finite()).then(|| (got - want).abs() / want)
}

/// Runs the simulator and joins its output with the analytic values.
pub fn simulate_report(
    t: &Topology,
    params: &NetworkParams,
    cfg: &SimConfig,
) -> Result<SimulationReport> {
    let result: SimResult = simulator::run(t, params, cfg)?;
    let metrics = analysis::link_metrics(t, params)?;
    let mut per_link = Vec::with_capacity(metrics.len());
    for (&link, m) in metrics.iter() {
        let mu_empirical = simulator::estimate_mu(&result, link)?;
        let aoi_empirical = result.per_link_aoi.get(&link).copied().flatten();
        let aoi_analytic = m.aoi.is_finite().then_some(m.aoi);
        per_link.push(SimLinkRow {
            receiver: link.receiver,
            sender: link.sender,
            deliveries: result.per_link_deliveries[&link],
            mu_analytic: m.mu,
            mu_empirical,
            aoi_analytic,
            aoi_empirical,
            rel_err_mu: relative_error(mu_empirical, m.mu),
            rel_err_aoi: match (aoi_empirical, aoi_analytic) {
                (Some(got), Some(want)) => relative_error(got, want),
                _ => None,
            },
        });
    }
    Ok(SimulationReport {
        topology: t.clone(),
        p: params.p().to_vec(),
        q: params.q().to_vec(),
        sim: SimSettings {
            slots: cfg.slots,
            warmup: cfg.warmup,
            replications: cfg.replications,
            seed: cfg.seed,
            slots_measured: result.slots_measured,
        },
        per_link,
    })
}

/// Output of `compare`: a solve followed by a simulation at the solved point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub solve: SolveReport,
    pub simulation: SimulationReport,
    pub tolerance: f64,
    pub pass: bool,
}

impl CompareReport {
    pub fn new(solve: SolveReport, simulation: SimulationReport, tolerance: f64) -> Self {
        let pass = !simulation.per_link.is_empty()
            && simulation.per_link.iter().all(|row| row.within(tolerance));
        Self {
            solve,
            simulation,
            tolerance,
            pass,
        }
    }
}

/// CSV row of `compare`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub receiver: usize,
    pub sender: usize,
    pub q_receiver: f64,
    pub q_sender: f64,
    pub mu_analytic: f64,
    pub mu_empirical: f64,
    pub aoi_analytic: Option<f64>,
    pub aoi_empirical: Option<f64>,
    pub rel_err_mu: Option<f64>,
    pub rel_err_aoi: Option<f64>,
    pub pass: bool,
}

pub fn compare_rows(report: &CompareReport) -> Vec<CompareRow> {
    let q = &report.simulation.q;
    report
        .simulation
        .per_link
        .iter()
        .map(|row| CompareRow {
            receiver: row.receiver,
            sender: row.sender,
            q_receiver: q[row.receiver],
            q_sender: q[row.sender],
            mu_analytic: row.mu_analytic,
            mu_empirical: row.mu_empirical,
            aoi_analytic: row.aoi_analytic,
            aoi_empirical: row.aoi_empirical,
            rel_err_mu: row.rel_err_mu,
            rel_err_aoi: row.rel_err_aoi,
            pass: row.within(report.tolerance),
        })
        .collect()
}

/// Line sweep row: the regular-graph closed form against the optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSweepRow {
    pub n: usize,
    pub q_closed_form: f64,
    /// Objective at the closed-form point (divided by `n` for the total
    /// objective).
    pub aoi_closed_form: f64,
    pub aoi_optimal: f64,
    pub relative_gap: f64,
}

/// Star sweep row: hub and leaf probabilities under both objectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarSweepRow {
    pub n: usize,
    pub q1_total: f64,
    pub q2_total: f64,
    pub q1_normalized: f64,
    pub q2_normalized: f64,
}

/// Preset comparison row: optimal neighbor-normalized age per topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetRow {
    pub topology: String,
    pub n: usize,
    pub edges: usize,
    pub avg_degree: f64,
    pub normalized_aoi: f64,
}
