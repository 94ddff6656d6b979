//! Exhaustive grid search, used as an oracle for the continuous solvers.

use serde::{Deserialize, Serialize};

use super::Problem;
use crate::analysis::{self, ObjectiveKind};
use crate::error::{Error, Result};
use crate::graph::Topology;

/// Largest number of grid cells [`brute_force_grid`] will evaluate.
pub const DEFAULT_CELL_BUDGET: u128 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub q_best: Vec<f64>,
    pub f_best: f64,
    pub cells: u128,
}

/// Role a node plays in one link's age `1 / mu`.
#[derive(Clone, Copy, PartialEq)]
enum Role {
    Sender,
    Silent,
    Absent,
}

/// Evaluates the objective on every point of
/// `{1/r, ..., (r-1)/r}^n` (plus `q = 1` for nodes with `p < 1`) and returns
/// the first minimizer in lexicographic grid order. Isolated nodes are held
/// at `q = 0`.
pub fn brute_force_grid(
    t: &Topology,
    p: &[f64],
    kind: ObjectiveKind,
    resolution: usize,
) -> Result<GridResult> {
    brute_force_grid_with_budget(t, p, kind, resolution, DEFAULT_CELL_BUDGET)
}

pub fn brute_force_grid_with_budget(
    t: &Topology,
    p: &[f64],
    kind: ObjectiveKind,
    resolution: usize,
    budget: u128,
) -> Result<GridResult> {
    if resolution < 3 {
        return Err(Error::InvalidSize(format!(
            "grid resolution must be at least 3, got {resolution}"
        )));
    }
    let problem = Problem::new(t, p, kind)?;
    let nodes: Vec<usize> = (0..t.n()).filter(|&k| problem.active[k]).collect();
    if nodes.is_empty() {
        return Ok(GridResult {
            q_best: vec![0.0; t.n()],
            f_best: 0.0,
            cells: 0,
        });
    }

    let axes: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&k| {
            let mut axis: Vec<f64> = (1..resolution)
                .map(|g| g as f64 / resolution as f64)
                .collect();
            if p[k] < 1.0 {
                axis.push(1.0);
            }
            axis
        })
        .collect();
    let cells = axes.iter().map(|a| a.len() as u128).product::<u128>();
    if cells > budget {
        return Err(Error::GridTooLarge { cells, budget });
    }

    // Each link age factors as a product of per-node terms:
    // 1/(p_j q_j) for the sender, 1/(1 - p_k q_k) for the receiver and its
    // other neighbors. The last node's factor is applied in a vectorizable
    // inner loop over its axis.
    let inv_send: Vec<Vec<f64>> = nodes
        .iter()
        .zip(&axes)
        .map(|(&k, axis)| axis.iter().map(|&x| 1.0 / (p[k] * x)).collect())
        .collect();
    let inv_silent: Vec<Vec<f64>> = nodes
        .iter()
        .zip(&axes)
        .map(|(&k, axis)| axis.iter().map(|&x| 1.0 / (1.0 - p[k] * x)).collect())
        .collect();

    let position = |k: usize| nodes.binary_search(&k).expect("neighbors are active");
    let n_links = 2 * t.edge_count();
    let mut roles = vec![vec![Role::Absent; nodes.len()]; n_links];
    let mut link_weights = Vec::with_capacity(n_links);
    for (l, link) in t.directed_links().into_iter().enumerate() {
        roles[l][position(link.sender)] = Role::Sender;
        roles[l][position(link.receiver)] = Role::Silent;
        for &k in t.adj(link.receiver) {
            if k != link.sender {
                roles[l][position(k)] = Role::Silent;
            }
        }
        link_weights.push(match kind {
            ObjectiveKind::Total => 1.0,
            ObjectiveKind::NeighborNormalized => {
                1.0 / (t.n() as f64 * t.degree(link.receiver) as f64)
            }
        });
    }

    let last = nodes.len() - 1;
    let outer_dims: Vec<usize> = axes[..last].iter().map(Vec::len).collect();
    let mut index = vec![0usize; last];
    let mut best = (f64::INFINITY, Vec::new());
    loop {
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for l in 0..n_links {
            let mut prod = link_weights[l];
            for (pos, &g) in index.iter().enumerate() {
                match roles[l][pos] {
                    Role::Sender => prod *= inv_send[pos][g],
                    Role::Silent => prod *= inv_silent[pos][g],
                    Role::Absent => {}
                }
            }
            match roles[l][last] {
                Role::Sender => a += prod,
                Role::Silent => b += prod,
                Role::Absent => c += prod,
            }
        }
        for (g, (&s, &z)) in inv_send[last].iter().zip(&inv_silent[last]).enumerate() {
            let value = a * s + b * z + c;
            if value < best.0 {
                let mut full = index.clone();
                full.push(g);
                best = (value, full);
            }
        }
        if !advance(&mut index, &outer_dims) {
            break;
        }
    }

    let mut q_best = vec![0.0; t.n()];
    for (pos, &k) in nodes.iter().enumerate() {
        q_best[k] = axes[pos][best.1[pos]];
    }
    let params = problem.params(&q_best);
    let f_best = analysis::objective(t, &params, kind)?;
    Ok(GridResult {
        q_best,
        f_best,
        cells,
    })
}

/// Odometer increment; returns false after the last index.
fn advance(index: &mut [usize], dims: &[usize]) -> bool {
    for pos in (0..index.len()).rev() {
        index[pos] += 1;
        if index[pos] < dims[pos] {
            return true;
        }
        index[pos] = 0;
    }
    false
}
