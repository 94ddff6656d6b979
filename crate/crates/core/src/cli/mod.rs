//! Command-line front-end: `gen`, `solve`, `simulate`, `sweep` and `compare`.
//!
//! Every command writes its report to stdout and, with `--out`, to a file.
//! Output is a pure function of the flags; randomness comes only from
//! `--seed` (default 0).

pub mod report;
pub mod sweep;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{NetworkParams, ObjectiveKind};
use crate::graph::{self, Topology};
use crate::optimizer::{self, SolveOptions, SolveResult};
use crate::simulator::SimConfig;
use report::{CompareReport, SolveReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] crate::error::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) | CliError::Io(_) => 1,
        }
    }
}

fn usage(err: impl std::fmt::Display) -> CliError {
    CliError::Usage(err.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "aloha-aoi",
    version,
    about = "Age of Information in half-duplex slotted ALOHA networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a topology (edge-list text by default).
    Gen(GenArgs),
    /// Compute optimal transmit probabilities.
    Solve(SolveArgs),
    /// Simulate the protocol at given transmit probabilities.
    Simulate(SimulateArgs),
    /// Sweep the network size and tabulate optima.
    Sweep(SweepArgs),
    /// Solve, then simulate at the solution and check agreement.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Total,
    #[value(alias = "normalized")]
    NeighborNormalized,
}

impl From<ObjectiveArg> for ObjectiveKind {
    fn from(arg: ObjectiveArg) -> Self {
        match arg {
            ObjectiveArg::Total => ObjectiveKind::Total,
            ObjectiveArg::NeighborNormalized => ObjectiveKind::NeighborNormalized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Pgd,
    FixedPoint,
    DRegular,
    Star,
    GridOracle,
}

impl SolverKind {
    fn name(self) -> &'static str {
        match self {
            SolverKind::Pgd => "pgd",
            SolverKind::FixedPoint => "fixed-point",
            SolverKind::DRegular => "d-regular",
            SolverKind::Star => "star",
            SolverKind::GridOracle => "grid-oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    /// Line topologies: closed form vs optimum.
    Line,
    /// Stars: hub and leaf probabilities under both objectives.
    Star,
    /// The four six-node asymmetric presets.
    Presets,
}

#[derive(Debug, Args)]
pub struct TopologyArgs {
    /// Preset: line:N, ring:N, star:N, grid:RxC, complete:N, tree6, astar6, acircle6.
    #[arg(long, conflicts_with = "edges", required_unless_present = "edges")]
    pub topology: Option<String>,
    /// Edge-list file.
    #[arg(long)]
    pub edges: Option<PathBuf>,
}

impl TopologyArgs {
    fn load(&self) -> Result<Topology, CliError> {
        match (&self.topology, &self.edges) {
            (Some(preset), None) => graph::from_preset(preset).map_err(usage),
            (None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
                graph::parse_edge_list(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
            }
            _ => Err(usage("give exactly one of --topology and --edges")),
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Generation probability: one value for every node, or a comma list.
    #[arg(long, default_value = "1")]
    pub p: String,
    #[arg(long, value_enum, default_value = "total")]
    pub objective: ObjectiveArg,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "pgd")]
    pub solver: SolverKind,
    /// Gradient and fixed-point tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0.5)]
    pub damping: f64,
    /// Grid resolution for `--solver grid-oracle`.
    #[arg(long, default_value_t = 200)]
    pub resolution: usize,
}

impl SolverArgs {
    fn options(&self) -> Result<SolveOptions, CliError> {
        let mut opts = SolveOptions {
            max_iters: self.max_iters,
            damping: self.damping,
            ..SolveOptions::default()
        };
        if let Some(tol) = self.tol {
            opts.tol_grad = tol;
            opts.tol_fp = tol;
        }
        opts.validate().map_err(usage)?;
        Ok(opts)
    }
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub slots: u64,
    #[arg(long, default_value_t = 1_000)]
    pub warmup: u64,
    #[arg(long, default_value_t = 1)]
    pub reps: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SimArgs {
    fn config(&self) -> Result<SimConfig, CliError> {
        let cfg = SimConfig {
            slots: self.slots,
            seed: self.seed,
            warmup: self.warmup,
            replications: self.reps,
        };
        cfg.validate().map_err(usage)?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub topology: TopologyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub topology: TopologyArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub topology: TopologyArgs,
    /// Generation probability: one value or a comma list.
    #[arg(long, default_value = "1")]
    pub p: String,
    /// Transmit probability: one value or a comma list.
    #[arg(long, conflicts_with = "q_from")]
    pub q: Option<String>,
    /// Read `q_star` from a JSON report written by `solve`.
    #[arg(long)]
    pub q_from: Option<PathBuf>,
    #[command(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub kind: SweepKind,
    #[arg(long, default_value_t = 3)]
    pub from: usize,
    #[arg(long, default_value_t = 20)]
    pub to: usize,
    /// Generation probability (line and preset sweeps).
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Objective for the line sweep.
    #[arg(long, value_enum, default_value = "total")]
    pub objective: ObjectiveArg,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub topology: TopologyArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Relative tolerance on per-link age and success probability.
    #[arg(long, default_value_t = 0.02)]
    pub sim_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    /// False when a check of `compare` failed.
    pub success: bool,
}

/// Runs a parsed command, writing `--out` if requested.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let (outcome, out) = match &cli.command {
        Command::Gen(args) => (cmd_gen(args)?, &args.output.out),
        Command::Solve(args) => (cmd_solve(args)?, &args.output.out),
        Command::Simulate(args) => (cmd_simulate(args)?, &args.output.out),
        Command::Sweep(args) => (cmd_sweep(args)?, &args.output.out),
        Command::Compare(args) => (cmd_compare(args)?, &args.output.out),
    };
    if let Some(path) = out {
        fs::write(path, &outcome.text)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    }
    Ok(outcome)
}

fn ok(text: String) -> Outcome {
    Outcome {
        text,
        success: true,
    }
}

pub fn cmd_gen(args: &GenArgs) -> Result<Outcome, CliError> {
    let t = args.topology.load()?;
    let text = match args.output.format {
        None => t.to_edge_list(),
        Some(Format::Json) => to_json(&t)?,
        Some(Format::Csv) => {
            #[derive(Serialize)]
            struct EdgeRow {
                u: usize,
                v: usize,
            }
            to_csv(t.edges().iter().map(|&(u, v)| EdgeRow { u, v }))?
        }
    };
    Ok(ok(text))
}

pub fn cmd_solve(args: &SolveArgs) -> Result<Outcome, CliError> {
    let t = args.topology.load()?;
    let report = solve_report(&t, &args.model, &args.solver)?;
    let text = match args.output.format {
        Some(Format::Csv) => to_csv(report::node_rows(&report))?,
        _ => to_json(&report)?,
    };
    Ok(ok(text))
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome, CliError> {
    let t = args.topology.load()?;
    let p = parse_probabilities("p", &args.p, t.n())?;
    let q = match (&args.q, &args.q_from) {
        (Some(q), None) => parse_probabilities("q", q, t.n())?,
        (None, Some(path)) => read_q_star(path, t.n())?,
        _ => {
            return Err(usage(
                "simulate needs transmit probabilities: give --q or --q-from",
            ))
        }
    };
    let params = NetworkParams::new(p, q).map_err(usage)?;
    let cfg = args.sim.config()?;
    let report = report::simulate_report(&t, &params, &cfg)?;
    let text = match args.output.format {
        Some(Format::Csv) => to_csv(report.per_link.iter())?,
        _ => to_json(&report)?,
    };
    Ok(ok(text))
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Outcome, CliError> {
    let mut opts = SolveOptions::default();
    if let Some(tol) = args.tol {
        opts.tol_grad = tol;
        opts.tol_fp = tol;
    }
    opts.validate().map_err(usage)?;
    if !(args.p > 0.0 && args.p <= 1.0) {
        return Err(usage(format!("--p must lie in (0, 1], got {}", args.p)));
    }
    if args.kind != SweepKind::Presets && (args.from < 2 || args.from > args.to) {
        return Err(usage(format!(
            "invalid range --from {} --to {}",
            args.from, args.to
        )));
    }
    let json = args.output.format == Some(Format::Json);
    let text = match args.kind {
        SweepKind::Line => {
            let rows = sweep::line_sweep(args.from, args.to, args.p, args.objective.into(), &opts)?;
            if json {
                to_json(&rows)?
            } else {
                to_csv(rows)?
            }
        }
        SweepKind::Star => {
            if args.p != 1.0 {
                return Err(usage("the star sweep assumes --p 1"));
            }
            let rows = sweep::star_sweep(args.from, args.to, &opts)?;
            if json {
                to_json(&rows)?
            } else {
                to_csv(rows)?
            }
        }
        SweepKind::Presets => {
            let rows = sweep::preset_sweep(args.p, &opts)?;
            if json {
                to_json(&rows)?
            } else {
                to_csv(rows)?
            }
        }
    };
    Ok(ok(text))
}

pub fn cmd_compare(args: &CompareArgs) -> Result<Outcome, CliError> {
    let t = args.topology.load()?;
    if args.sim_tol.is_nan() || args.sim_tol <= 0.0 {
        return Err(usage("--sim-tol must be positive"));
    }
    let cfg = args.sim.config()?;
    let solved = solve_report(&t, &args.model, &args.solver)?;
    let params = NetworkParams::new(solved.p.clone(), solved.q_star.clone())?;
    let simulation = report::simulate_report(&t, &params, &cfg)?;
    let report = CompareReport::new(solved, simulation, args.sim_tol);
    let text = match args.output.format {
        Some(Format::Csv) => to_csv(report::compare_rows(&report))?,
        _ => to_json(&report)?,
    };
    Ok(Outcome {
        text,
        success: report.pass,
    })
}

/// Runs the selected solver and assembles the `solve` report.
pub fn solve_report(
    t: &Topology,
    model: &ModelArgs,
    solver: &SolverArgs,
) -> Result<SolveReport, CliError> {
    let p = parse_probabilities("p", &model.p, t.n())?;
    let kind: ObjectiveKind = model.objective.into();
    let opts = solver.options()?;
    let result: SolveResult = match solver.solver {
        SolverKind::Pgd => {
            optimizer::solve_projected_gradient(t, &p, kind, &opts).map_err(usage)?
        }
        SolverKind::FixedPoint => {
            optimizer::solve_fixed_point(t, &p, kind, &opts).map_err(usage)?
        }
        SolverKind::DRegular => {
            let d = t
                .regular_degree()
                .ok_or_else(|| usage("solver d-regular needs a regular topology"))?;
            let p0 = p[0];
            if p.iter().any(|&x| x != p0) {
                return Err(usage("solver d-regular needs a common --p"));
            }
            let q = optimizer::d_regular_closed_form(d, p0).map_err(usage)?;
            optimizer::evaluate_point(t, &p, kind, vec![q; t.n()], opts.epsilon_lo)?
        }
        SolverKind::Star => {
            let hub = t
                .star_hub()
                .ok_or_else(|| usage("solver star needs a star topology"))?;
            if p.iter().any(|&x| x != 1.0) {
                return Err(usage("solver star assumes --p 1"));
            }
            if kind != ObjectiveKind::Total {
                return Err(usage("solver star applies to the total objective only"));
            }
            let (q1, q2) = optimizer::star_solve(t.n())?;
            let q = (0..t.n()).map(|k| if k == hub { q1 } else { q2 }).collect();
            optimizer::evaluate_point(t, &p, kind, q, opts.epsilon_lo)?
        }
        SolverKind::GridOracle => {
            let grid =
                optimizer::brute_force_grid(t, &p, kind, solver.resolution).map_err(usage)?;
            optimizer::evaluate_point(t, &p, kind, grid.q_best, opts.epsilon_lo)?
        }
    };
    Ok(SolveReport::new(
        t,
        &p,
        kind,
        solver.solver.name(),
        &result,
    )?)
}

/// A single value broadcast to `n` nodes, or exactly `n` comma-separated values.
pub fn parse_probabilities(name: &str, text: &str, n: usize) -> Result<Vec<f64>, CliError> {
    let values = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("--{name}: bad number `{}`", s.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let values = match values.len() {
        1 => vec![values[0]; n],
        len if len == n => values,
        len => {
            return Err(usage(format!(
                "--{name} has {len} values but the topology has {n} nodes"
            )))
        }
    };
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(usage(format!("--{name}: {v} is outside [0, 1]")));
    }
    Ok(values)
}

fn read_q_star(path: &PathBuf, n: usize) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let q: Vec<f64> = value
        .get("q_star")
        .cloned()
        .ok_or_else(|| usage(format!("{} has no `q_star` field", path.display())))
        .and_then(|v| serde_json::from_value(v).map_err(usage))?;
    if q.len() != n {
        return Err(usage(format!(
            "{} holds {} q values for {n} nodes",
            path.display(),
            q.len()
        )));
    }
    Ok(q)
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("aloha-aoi").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn probabilities_broadcast_and_lists() {
        assert_eq!(parse_probabilities("p", "0.5", 3).unwrap(), vec![0.5; 3]);
        assert_eq!(
            parse_probabilities("p", "0.1, 0.2", 2).unwrap(),
            vec![0.1, 0.2]
        );
        assert!(matches!(
            parse_probabilities("p", "0.1,0.2", 3),
            Err(CliError::Usage(_))
        ));
        assert!(parse_probabilities("p", "1.5", 3).is_err());
        assert!(parse_probabilities("p", "abc", 3).is_err());
    }

    #[test]
    fn solver_topology_mismatch_is_usage_error() {
        let cli = parse(&["solve", "--topology", "line:5", "--solver", "d-regular"]);
        let err = run(&cli).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let cli = parse(&["solve", "--topology", "ring:5", "--solver", "star"]);
        assert_eq!(run(&cli).unwrap_err().exit_code(), 2);
        let cli = parse(&[
            "solve",
            "--topology",
            "star:5",
            "--solver",
            "star",
            "--p",
            "0.5",
        ]);
        assert_eq!(run(&cli).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn simulate_requires_q() {
        let cli = parse(&[
            "simulate",
            "--topology",
            "line:2",
            "--slots",
            "100",
            "--warmup",
            "0",
        ]);
        assert_eq!(run(&cli).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn invalid_sweep_range() {
        let cli = parse(&["sweep", "--kind", "line", "--from", "10", "--to", "3"]);
        assert_eq!(run(&cli).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn topology_source_is_exclusive() {
        assert!(Cli::try_parse_from(["aloha-aoi", "gen"]).is_err());
        assert!(
            Cli::try_parse_from(["aloha-aoi", "gen", "--topology", "line:3", "--edges", "x"])
                .is_err()
        );
    }

    #[test]
    fn gen_formats() {
        let out = run(&parse(&["gen", "--topology", "line:3"])).unwrap();
        assert_eq!(out.text, "3\n0 1\n1 2\n");
        let out = run(&parse(&["gen", "--topology", "line:3", "--format", "csv"])).unwrap();
        assert_eq!(out.text, "u,v\n0,1\n1,2\n");
        let out = run(&parse(&["gen", "--topology", "line:3", "--format", "json"])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v["n"], 3);
    }
}
