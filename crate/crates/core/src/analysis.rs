//! Closed-form link success probabilities, average ages and the objective
//! with its gradient.
//!
//! For a directed link `j -> i` the per-slot delivery probability is
//!
//! ```text
//! mu(i, j) = p_j q_j (1 - p_i q_i) * prod_{k in B_i, k != j} (1 - p_k q_k)
//! ```
//!
//! and the long-run average age on that link is `1 / mu(i, j)`. A zero
//! probability maps to an `f64::INFINITY` age rather than an error, so
//! callers evaluating the boundary of the box `[0, 1]^n` see a divergent
//! objective.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedLink, Topology};

/// Above this degree the leave-one-out products are accumulated in log space.
const LOG_SPACE_DEGREE: usize = 64;

/// Per-node generation probabilities `p` and transmit probabilities `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    p: Vec<f64>,
    q: Vec<f64>,
}

impl NetworkParams {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::InvalidParams(format!(
                "p has {} entries but q has {}",
                p.len(),
                q.len()
            )));
        }
        check_unit_interval("p", &p)?;
        check_unit_interval("q", &q)?;
        Ok(Self { p, q })
    }

    /// Same `p` and `q` at every node.
    pub fn uniform(n: usize, p: f64, q: f64) -> Result<Self> {
        Self::new(vec![p; n], vec![q; n])
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Probability that node `k` transmits in a slot, `p_k q_k`.
    pub fn activity(&self, k: usize) -> f64 {
        self.p[k] * self.q[k]
    }

    pub(crate) fn check_for(&self, t: &Topology) -> Result<()> {
        if self.len() != t.n() {
            return Err(Error::InvalidParams(format!(
                "parameter vectors have length {} but the topology has {} nodes",
                self.len(),
                t.n()
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_unit_interval(name: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(k) => Err(Error::InvalidParams(format!(
            "{name}[{k}] = {} is outside [0, 1]",
            values[k]
        ))),
        None => Ok(()),
    }
}

/// Which aggregate of the per-link ages is minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// Sum of the average age over every directed link.
    #[default]
    Total,
    /// Each receiver's incoming ages averaged over its degree, then averaged
    /// over all nodes. Isolated nodes contribute zero.
    NeighborNormalized,
}

impl ObjectiveKind {
    /// Weight applied to every incoming link of `receiver`.
    fn receiver_weight(self, t: &Topology, receiver: usize) -> f64 {
        match self {
            ObjectiveKind::Total => 1.0,
            ObjectiveKind::NeighborNormalized => {
                let deg = t.degree(receiver);
                if deg == 0 {
                    0.0
                } else {
                    1.0 / (t.n() as f64 * deg as f64)
                }
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveKind::Total => "total",
            ObjectiveKind::NeighborNormalized => "neighbor_normalized",
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "total" => Ok(ObjectiveKind::Total),
            "neighbor_normalized" | "normalized" => Ok(ObjectiveKind::NeighborNormalized),
            _ => Err(Error::InvalidParams(format!("unknown objective `{s}`"))),
        }
    }
}

/// Delivery probability and average age of one directed link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkMetric {
    pub mu: f64,
    /// `1 / mu`, or `f64::INFINITY` when `mu == 0`.
    pub aoi: f64,
}

/// One entry per directed link of a topology.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinkMetrics {
    pub entries: BTreeMap<DirectedLink, LinkMetric>,
}

impl LinkMetrics {
    pub fn get(&self, link: DirectedLink) -> Option<&LinkMetric> {
        self.entries.get(&link)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DirectedLink, &LinkMetric)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Success probabilities of every link, indexed `[receiver][position of the
/// sender within the receiver's neighbor list]`.
pub(crate) fn success_table(t: &Topology, params: &NetworkParams) -> Vec<Vec<f64>> {
    (0..t.n())
        .map(|i| receiver_success_probs(t, params, i))
        .collect()
}

fn receiver_success_probs(t: &Topology, params: &NetworkParams, i: usize) -> Vec<f64> {
    let nbrs = t.adj(i);
    let d = nbrs.len();
    if d == 0 {
        return Vec::new();
    }
    let silent_self = 1.0 - params.activity(i);
    let silent: Vec<f64> = nbrs.iter().map(|&k| 1.0 - params.activity(k)).collect();
    // others[m] = prod over neighbors except nbrs[m]
    let others: Vec<f64> = if d <= LOG_SPACE_DEGREE {
        leave_one_out(&silent, 1.0, |acc, x| acc * x)
    } else {
        let logs: Vec<f64> = silent.iter().map(|&x| x.ln()).collect();
        leave_one_out(&logs, 0.0, |acc, x| acc + x)
            .into_iter()
            .map(f64::exp)
            .collect()
    };
    nbrs.iter()
        .zip(others)
        .map(|(&j, rest)| params.activity(j) * silent_self * rest)
        .collect()
}

/// `out[m]` folds every element except `xs[m]`, via prefix and suffix scans.
fn leave_one_out(xs: &[f64], identity: f64, op: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let d = xs.len();
    let mut out = vec![identity; d];
    let mut acc = identity;
    for m in 0..d {
        out[m] = acc;
        acc = op(acc, xs[m]);
    }
    acc = identity;
    for m in (0..d).rev() {
        out[m] = op(out[m], acc);
        acc = op(acc, xs[m]);
    }
    out
}

/// `mu(i, j)` for the link `link.sender -> link.receiver`.
pub fn link_success_prob(t: &Topology, params: &NetworkParams, link: DirectedLink) -> Result<f64> {
    params.check_for(t)?;
    let DirectedLink { receiver, sender } = link;
    let nbrs = t
        .neighbors(receiver)
        .map_err(|_| Error::InvalidLink { receiver, sender })?;
    let pos = nbrs
        .binary_search(&sender)
        .map_err(|_| Error::InvalidLink { receiver, sender })?;
    Ok(receiver_success_probs(t, params, receiver)[pos])
}

/// Average age of a link delivering with per-slot probability `mu`.
pub fn avg_aoi_link(mu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(mu));
    }
    Ok(aoi_of(mu))
}

#[inline]
fn aoi_of(mu: f64) -> f64 {
    if mu > 0.0 {
        1.0 / mu
    } else {
        f64::INFINITY
    }
}

/// Success probability and average age for every directed link.
pub fn link_metrics(t: &Topology, params: &NetworkParams) -> Result<LinkMetrics> {
    params.check_for(t)?;
    let table = success_table(t, params);
    let mut entries = BTreeMap::new();
    for (i, row) in table.iter().enumerate() {
        for (&j, &mu) in t.adj(i).iter().zip(row) {
            entries.insert(
                DirectedLink::new(i, j),
                LinkMetric {
                    mu,
                    aoi: aoi_of(mu),
                },
            );
        }
    }
    Ok(LinkMetrics { entries })
}

/// Objective value; `f64::INFINITY` if any contributing link never delivers.
pub fn objective(t: &Topology, params: &NetworkParams, kind: ObjectiveKind) -> Result<f64> {
    params.check_for(t)?;
    Ok(objective_unchecked(t, params, kind))
}

pub(crate) fn objective_unchecked(
    t: &Topology,
    params: &NetworkParams,
    kind: ObjectiveKind,
) -> f64 {
    let mut total = 0.0;
    for i in 0..t.n() {
        if t.degree(i) == 0 {
            continue;
        }
        let row: f64 = receiver_success_probs(t, params, i)
            .into_iter()
            .map(aoi_of)
            .sum();
        total += kind.receiver_weight(t, i) * row;
    }
    total
}

/// Ages `g(i, j) = 1 / mu(i, j)` for every link, in the layout of
/// [`success_table`]. Fails if any link has zero success probability.
fn age_table(t: &Topology, params: &NetworkParams) -> Result<Vec<Vec<f64>>> {
    let table = success_table(t, params);
    for (i, row) in table.iter().enumerate() {
        if let Some(m) = row.iter().position(|&mu| mu <= 0.0) {
            return Err(Error::Infeasible(format!(
                "link {} has zero success probability",
                DirectedLink::new(i, t.adj(i)[m])
            )));
        }
    }
    Ok(table
        .into_iter()
        .map(|row| row.into_iter().map(|mu| 1.0 / mu).collect())
        .collect())
}

fn weighted_aggregates(t: &Topology, ages: &[Vec<f64>], weights: &[f64], ell: usize) -> (f64, f64) {
    let mut a = 0.0;
    let mut b: f64 = weights[ell] * ages[ell].iter().sum::<f64>();
    for &i in t.adj(ell) {
        for (&j, &g) in t.adj(i).iter().zip(&ages[i]) {
            if j == ell {
                a += weights[i] * g;
            } else {
                b += weights[i] * g;
            }
        }
    }
    (a, b)
}

fn weights(t: &Topology, kind: ObjectiveKind) -> Vec<f64> {
    (0..t.n()).map(|i| kind.receiver_weight(t, i)).collect()
}

/// Aggregates `(A_l, B_l)` of the total objective: `A_l` sums the ages of the
/// links `l` sends on, `B_l` sums the ages of the links `l` can block, either
/// as a receiver or as a silent neighbor of another receiver.
pub fn aggregates(t: &Topology, params: &NetworkParams, ell: usize) -> Result<(f64, f64)> {
    aggregates_for(t, params, ObjectiveKind::Total, ell)
}

/// As [`aggregates`], with each link age weighted as in `kind`.
pub fn aggregates_for(
    t: &Topology,
    params: &NetworkParams,
    kind: ObjectiveKind,
    ell: usize,
) -> Result<(f64, f64)> {
    params.check_for(t)?;
    t.neighbors(ell)?;
    let ages = age_table(t, params)?;
    Ok(weighted_aggregates(t, &ages, &weights(t, kind), ell))
}

/// Aggregates for every node at once.
pub fn all_aggregates(
    t: &Topology,
    params: &NetworkParams,
    kind: ObjectiveKind,
) -> Result<Vec<(f64, f64)>> {
    params.check_for(t)?;
    let ages = age_table(t, params)?;
    let w = weights(t, kind);
    Ok((0..t.n())
        .map(|ell| weighted_aggregates(t, &ages, &w, ell))
        .collect())
}

/// Gradient of the objective: `-A_l / q_l + p_l B_l / (1 - p_l q_l)`.
/// Isolated nodes get zero.
pub fn gradient(t: &Topology, params: &NetworkParams, kind: ObjectiveKind) -> Result<Vec<f64>> {
    let aggs = all_aggregates(t, params, kind)?;
    Ok(aggs
        .into_iter()
        .enumerate()
        .map(|(ell, (a, b))| {
            if t.degree(ell) == 0 {
                0.0
            } else {
                let (p, q) = (params.p[ell], params.q[ell]);
                -a / q + p * b / (1.0 - p * q)
            }
        })
        .collect())
}
