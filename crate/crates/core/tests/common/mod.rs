//! Helpers shared by the integration tests: independent oracles and random
//! inputs.

#![allow(dead_code)]

use aloha_aoi::graph::Topology;
use rand::seq::SliceRandom;
use rand::Rng;

/// Success probability of `sender -> receiver` by summing over every
/// transmit pattern of the network, independently of the product formula.
/// Node `k` transmits with probability `p_k q_k`.
pub fn enumerate_mu(t: &Topology, p: &[f64], q: &[f64], receiver: usize, sender: usize) -> f64 {
    let n = t.n();
    assert!(n <= 16);
    let a: Vec<f64> = (0..n).map(|k| p[k] * q[k]).collect();
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        let on = |k: usize| mask >> k & 1 == 1;
        let weight: f64 = (0..n)
            .map(|k| if on(k) { a[k] } else { 1.0 - a[k] })
            .product();
        let talking: Vec<usize> = t
            .neighbors(receiver)
            .unwrap()
            .iter()
            .copied()
            .filter(|&k| on(k))
            .collect();
        if !on(receiver) && talking == [sender] {
            total += weight;
        }
    }
    total
}

/// Total objective built from [`enumerate_mu`].
pub fn enumerate_total(t: &Topology, p: &[f64], q: &[f64]) -> f64 {
    t.directed_links()
        .iter()
        .map(|l| 1.0 / enumerate_mu(t, p, q, l.receiver, l.sender))
        .sum()
}

/// A random connected graph on `n` nodes: a random spanning tree plus each
/// remaining pair with probability `extra`.
pub fn random_connected(rng: &mut impl Rng, n: usize, extra: f64) -> Topology {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for k in 1..n {
        let parent = order[rng.random_range(0..k)];
        edges.push((parent.min(order[k]), parent.max(order[k])));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !edges.contains(&(u, v)) && rng.random_bool(extra) {
                edges.push((u, v));
            }
        }
    }
    Topology::new(n, edges).unwrap()
}

/// Every graph on `n` labelled nodes, one per isomorphism class.
pub fn graphs_up_to_isomorphism(n: usize) -> Vec<Topology> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let perms = permutations(n);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let canonical = perms
            .iter()
            .map(|perm| {
                let mut mapped: Vec<(usize, usize)> = edges
                    .iter()
                    .map(|&(u, v)| (perm[u].min(perm[v]), perm[u].max(perm[v])))
                    .collect();
                mapped.sort();
                mapped
            })
            .min()
            .unwrap();
        if seen.insert(canonical) {
            out.push(Topology::new(n, edges).unwrap());
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for perm in permutations(n - 1) {
        for pos in 0..n {
            let mut p = perm.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

/// Central finite-difference gradient of `f` with step `h`.
pub fn finite_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|k| {
            let mut up = x.to_vec();
            let mut down = x.to_vec();
            up[k] += h;
            down[k] -= h;
            (f(&up) - f(&down)) / (2.0 * h)
        })
        .collect()
}
