//! Slot-by-slot Monte Carlo simulation of the half-duplex ALOHA protocol.
//!
//! Every slot runs, in order:
//!
//! 1. each node generates a fresh update with probability `p_i`
//!    (draws in node order);
//! 2. each node holding an update transmits it with probability `q_i`,
//!    otherwise it drops the update and listens (draws in node order; nodes
//!    without an update consume no draw);
//! 3. a listening node `i` receives from neighbor `j` iff `j` is the only
//!    neighbor of `i` that transmits;
//! 4. at the end of the slot, each link's age resets to 1 on delivery and
//!    grows by 1 otherwise.
//!
//! Ages are sampled at slot ends, so a gap of `X` slots between deliveries
//! contributes ages `1..=X`, which makes the long-run mean exactly `1 / mu`.
//!
//! Replication `r` draws from `ChaCha8Rng::seed_from_u64(seed)` switched to
//! stream `r`, so replications are independent and reproducible from the
//! single seed.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::NetworkParams;
use crate::error::{Error, Result};
use crate::graph::{DirectedLink, Topology};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Horizon `T` per replication.
    pub slots: u64,
    pub seed: u64,
    /// Leading slots excluded from the averages.
    pub warmup: u64,
    pub replications: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            slots: 1_000_000,
            seed: 0,
            warmup: 1_000,
            replications: 1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.slots == 0 {
            return Err(Error::InvalidParams("slots must be at least 1".into()));
        }
        if self.warmup >= self.slots {
            return Err(Error::InvalidParams(format!(
                "warmup ({}) must be smaller than slots ({})",
                self.warmup, self.slots
            )));
        }
        if self.replications == 0 {
            return Err(Error::InvalidParams(
                "replications must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn measured_per_replication(&self) -> u64 {
        self.slots - self.warmup
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// Empirical time-average age per link; `None` if the link never
    /// delivered during the measured slots.
    #[serde(with = "crate::graph::link_map")]
    pub per_link_aoi: BTreeMap<DirectedLink, Option<f64>>,
    #[serde(with = "crate::graph::link_map")]
    pub per_link_deliveries: BTreeMap<DirectedLink, u64>,
    /// Measured slots summed over replications.
    pub slots_measured: u64,
    pub seed: u64,
}

/// What happened in one slot; handed to the observer of [`run_observed`].
#[derive(Debug)]
pub struct SlotRecord<'a> {
    pub replication: u32,
    /// 1-based slot index within the replication.
    pub slot: u64,
    pub generated: &'a [bool],
    pub transmitting: &'a [bool],
    pub deliveries: &'a [DirectedLink],
}

pub fn run(t: &Topology, params: &NetworkParams, cfg: &SimConfig) -> Result<SimResult> {
    run_observed(t, params, cfg, |_| {})
}

/// As [`run`], calling `observer` after every slot of every replication.
pub fn run_observed(
    t: &Topology,
    params: &NetworkParams,
    cfg: &SimConfig,
    mut observer: impl FnMut(&SlotRecord<'_>),
) -> Result<SimResult> {
    cfg.validate()?;
    if params.len() != t.n() {
        return Err(Error::InvalidParams(format!(
            "parameter vectors have length {} but the topology has {} nodes",
            params.len(),
            t.n()
        )));
    }
    let links = t.directed_links();
    let mut age_sums = vec![0u64; links.len()];
    let mut deliveries = vec![0u64; links.len()];
    for r in 0..cfg.replications {
        let tally = run_replication(t, params, cfg, r, &links, &mut observer);
        for (l, (sum, count)) in tally.into_iter().enumerate() {
            age_sums[l] += sum;
            deliveries[l] += count;
        }
    }
    let slots_measured = cfg.measured_per_replication() * u64::from(cfg.replications);
    let per_link_aoi = links
        .iter()
        .enumerate()
        .map(|(l, &link)| {
            let mean = (deliveries[l] > 0).then(|| age_sums[l] as f64 / slots_measured as f64);
            (link, mean)
        })
        .collect();
    let per_link_deliveries = links.iter().copied().zip(deliveries).collect();
    Ok(SimResult {
        per_link_aoi,
        per_link_deliveries,
        slots_measured,
        seed: cfg.seed,
    })
}

/// Returns `(sum of measured ages, measured deliveries)` per link, in the
/// order of `links`.
fn run_replication(
    t: &Topology,
    params: &NetworkParams,
    cfg: &SimConfig,
    replication: u32,
    links: &[DirectedLink],
    observer: &mut impl FnMut(&SlotRecord<'_>),
) -> Vec<(u64, u64)> {
    let n = t.n();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(u64::from(replication));

    // link_index[i][m] = position in `links` of (i, adj(i)[m])
    let mut offsets = Vec::with_capacity(n);
    let mut acc = 0;
    for i in 0..n {
        offsets.push(acc);
        acc += t.degree(i);
    }

    let mut ages = vec![1u64; links.len()];
    let mut tally = vec![(0u64, 0u64); links.len()];
    let mut generated = vec![false; n];
    let mut transmitting = vec![false; n];
    let mut delivered_now = vec![false; links.len()];
    let mut delivery_list = Vec::new();

    for slot in 1..=cfg.slots {
        for (k, g) in generated.iter_mut().enumerate() {
            *g = rng.random_bool(params.p()[k]);
        }
        for (k, tx) in transmitting.iter_mut().enumerate() {
            *tx = generated[k] && rng.random_bool(params.q()[k]);
        }

        delivered_now.fill(false);
        delivery_list.clear();
        for i in 0..n {
            if transmitting[i] {
                continue;
            }
            let mut sole = None;
            let mut active = 0;
            for (m, &j) in t.adj(i).iter().enumerate() {
                if transmitting[j] {
                    active += 1;
                    sole = Some(m);
                }
            }
            if active == 1 {
                let m = sole.expect("one transmitter");
                delivered_now[offsets[i] + m] = true;
                delivery_list.push(DirectedLink::new(i, t.adj(i)[m]));
            }
        }

        let measured = slot > cfg.warmup;
        for l in 0..links.len() {
            ages[l] = if delivered_now[l] { 1 } else { ages[l] + 1 };
            if measured {
                tally[l].0 += ages[l];
                tally[l].1 += u64::from(delivered_now[l]);
            }
        }

        observer(&SlotRecord {
            replication,
            slot,
            generated: &generated,
            transmitting: &transmitting,
            deliveries: &delivery_list,
        });
    }
    tally
}

/// Empirical delivery probability `deliveries / slots_measured` of a link.
pub fn estimate_mu(result: &SimResult, link: DirectedLink) -> Result<f64> {
    let count = result
        .per_link_deliveries
        .get(&link)
        .ok_or(Error::InvalidLink {
            receiver: link.receiver,
            sender: link.sender,
        })?;
    Ok(*count as f64 / result.slots_measured as f64)
}
