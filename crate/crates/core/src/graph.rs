//! Network topology model, named generators and the edge-list text format.
//!
//! A [`Topology`] is an undirected simple graph over nodes `0..n`. Each
//! undirected edge `{i, j}` carries two [`DirectedLink`]s: `j -> i` and
//! `i -> j`. Isolated nodes are allowed and simply own no links.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Information flow from `sender` to `receiver`, where the two are neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DirectedLink {
    pub receiver: usize,
    pub sender: usize,
}

impl DirectedLink {
    pub fn new(receiver: usize, sender: usize) -> Self {
        Self { receiver, sender }
    }
}

impl fmt::Display for DirectedLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<-{}", self.receiver, self.sender)
    }
}

/// Serde adapter for maps keyed by [`DirectedLink`]: written as a list of
/// `[link, value]` pairs so that formats with string-only keys (JSON) work.
pub(crate) mod link_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::DirectedLink;

    pub fn serialize<V: Serialize, S: Serializer>(
        map: &BTreeMap<DirectedLink, V>,
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(map.iter())
    }

    pub fn deserialize<'de, V: Deserialize<'de>, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<BTreeMap<DirectedLink, V>, D::Error> {
        let pairs = Vec::<(DirectedLink, V)>::deserialize(deserializer)?;
        Ok(pairs.into_iter().collect())
    }
}

/// Immutable undirected simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    n: usize,
    /// Normalized `(min, max)` pairs in ascending order.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Topology {
    /// Builds a topology, rejecting self-loops, out-of-range endpoints and
    /// duplicate (unordered) edges.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize(
                "topology needs at least one node".into(),
            ));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            check_edge(n, u, v)?;
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateEdge(u, v));
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            edges,
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Undirected edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted neighbor set of node `i`.
    pub fn neighbors(&self, i: usize) -> Result<&[usize]> {
        self.adjacency
            .get(i)
            .map(Vec::as_slice)
            .ok_or(Error::NodeOutOfRange {
                index: i,
                n: self.n,
            })
    }

    /// Neighbor set without the range check. Panics on a bad index.
    pub(crate) fn adj(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency.get(i).map_or(0, Vec::len)
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency
            .get(u)
            .is_some_and(|list| list.binary_search(&v).is_ok())
    }

    pub fn is_valid_link(&self, link: DirectedLink) -> bool {
        self.has_edge(link.receiver, link.sender)
    }

    /// All directed links, ordered by receiver then sender.
    pub fn directed_links(&self) -> Vec<DirectedLink> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, nbrs)| nbrs.iter().map(move |&j| DirectedLink::new(i, j)))
            .collect()
    }

    pub fn is_regular(&self, d: usize) -> bool {
        self.adjacency.iter().all(|nbrs| nbrs.len() == d)
    }

    /// The common degree if the graph is regular with degree ≥ 1.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        (d > 0 && self.is_regular(d)).then_some(d)
    }

    /// Hub index if the graph is a star: one node adjacent to every other
    /// node and no other edges. For `n = 2` the hub is node 0.
    pub fn star_hub(&self) -> Option<usize> {
        if self.n < 2 || self.edges.len() != self.n - 1 {
            return None;
        }
        (0..self.n).find(|&h| self.degree(h) == self.n - 1)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn average_degree(&self) -> f64 {
        2.0 * self.edges.len() as f64 / self.n as f64
    }

    /// Serializes to the edge-list text format accepted by [`parse_edge_list`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

impl Serialize for Topology {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: usize,
            edges: &'a [(usize, usize)],
        }
        Repr {
            n: self.n,
            edges: &self.edges,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Topology {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n: usize,
            edges: Vec<(usize, usize)>,
        }
        let repr = Repr::deserialize(deserializer)?;
        Topology::new(repr.n, repr.edges).map_err(serde::de::Error::custom)
    }
}

fn check_edge(n: usize, u: usize, v: usize) -> Result<()> {
    for index in [u, v] {
        if index >= n {
            return Err(Error::NodeOutOfRange { index, n });
        }
    }
    if u == v {
        return Err(Error::SelfLoop(u));
    }
    Ok(())
}

/// Path `0 - 1 - ... - (n-1)`.
pub fn make_line(n: usize) -> Result<Topology> {
    if n == 0 {
        return Err(Error::InvalidSize("line needs n >= 1".into()));
    }
    Topology::new(n, (1..n).map(|k| (k - 1, k)))
}

/// Cycle over `n >= 3` nodes.
pub fn make_ring(n: usize) -> Result<Topology> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("ring needs n >= 3, got {n}")));
    }
    Topology::new(n, (0..n).map(|k| (k, (k + 1) % n)))
}

/// Star with hub 0 and leaves `1..n`.
pub fn make_star(n: usize) -> Result<Topology> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("star needs n >= 2, got {n}")));
    }
    Topology::new(n, (1..n).map(|leaf| (0, leaf)))
}

/// 4-neighbor lattice; node `(r, c)` has index `r * cols + c`.
pub fn make_grid(rows: usize, cols: usize) -> Result<Topology> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidSize(format!(
            "grid needs nonzero dimensions, got {rows}x{cols}"
        )));
    }
    let idx = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((idx(r, c), idx(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((idx(r, c), idx(r + 1, c)));
            }
        }
    }
    Topology::new(rows * cols, edges)
}

pub fn make_complete(n: usize) -> Result<Topology> {
    if n < 2 {
        return Err(Error::InvalidSize(format!(
            "complete graph needs n >= 2, got {n}"
        )));
    }
    Topology::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// Six-node tree: root 0 with children 1 and 2; node 1 has child 3, node 2
/// has children 4 and 5.
pub fn make_tree6() -> Topology {
    Topology::new(6, [(0, 1), (0, 2), (1, 3), (2, 4), (2, 5)]).expect("static preset")
}

/// Star over nodes 0..5 (hub 0) plus node 5 hanging off leaf 1.
pub fn make_asymmetric_star6() -> Topology {
    Topology::new(6, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 5)]).expect("static preset")
}

/// Five-node ring plus node 5 hanging off node 0.
pub fn make_asymmetric_circle6() -> Topology {
    Topology::new(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5)]).expect("static preset")
}

/// The four six-node asymmetric presets with their names.
pub fn asymmetric_presets() -> Vec<(&'static str, Topology)> {
    vec![
        ("tree6", make_tree6()),
        ("grid2x3", make_grid(2, 3).expect("static preset")),
        ("astar6", make_asymmetric_star6()),
        ("acircle6", make_asymmetric_circle6()),
    ]
}

/// Builds a topology from a `name:params` preset such as `line:7`,
/// `grid:2x3` or `tree6`.
pub fn from_preset(spec: &str) -> Result<Topology> {
    let (name, arg) = match spec.split_once(':') {
        Some((name, arg)) => (name.trim(), Some(arg.trim())),
        None => (spec.trim(), None),
    };
    let size = |arg: Option<&str>| -> Result<usize> {
        let arg = arg.ok_or_else(|| {
            Error::InvalidSize(format!("preset `{name}` needs a size, e.g. {name}:6"))
        })?;
        arg.parse()
            .map_err(|_| Error::InvalidSize(format!("bad size `{arg}` in preset `{spec}`")))
    };
    match name {
        "line" => make_line(size(arg)?),
        "ring" => make_ring(size(arg)?),
        "star" => make_star(size(arg)?),
        "complete" => make_complete(size(arg)?),
        "grid" => {
            let arg = arg
                .ok_or_else(|| Error::InvalidSize("grid preset needs RxC, e.g. grid:2x3".into()))?;
            let (r, c) = arg
                .split_once(['x', 'X'])
                .ok_or_else(|| Error::InvalidSize(format!("bad grid size `{arg}`")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidSize(format!("bad grid size `{arg}`")))
            };
            make_grid(parse(r)?, parse(c)?)
        }
        "tree6" => Ok(make_tree6()),
        "grid2x3" => make_grid(2, 3),
        "astar6" => Ok(make_asymmetric_star6()),
        "acircle6" => Ok(make_asymmetric_circle6()),
        _ => Err(Error::InvalidSize(format!(
            "unknown topology preset `{spec}`"
        ))),
    }
}

/// Parses the edge-list text format: the first non-comment line holds the
/// node count, each following non-empty line holds `u v`. Lines starting
/// with `#` are ignored. Errors name the 1-based line number.
pub fn parse_edge_list(text: &str) -> Result<Topology> {
    let mut n: Option<usize> = None;
    let mut edges = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some(n) = n else {
            if fields.len() != 1 {
                return Err(err(format!("expected node count, found `{line}`")));
            }
            let count: usize = fields[0]
                .parse()
                .map_err(|_| err(format!("bad node count `{}`", fields[0])))?;
            if count == 0 {
                return Err(err("node count must be at least 1".into()));
            }
            n = Some(count);
            continue;
        };
        if fields.len() != 2 {
            return Err(err(format!("expected `u v`, found `{line}`")));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(format!("bad node id `{s}`")))
        };
        let (u, v) = (parse(fields[0])?, parse(fields[1])?);
        check_edge(n, u, v).map_err(|e| err(e.to_string()))?;
        if !edges.insert((u.min(v), u.max(v))) {
            return Err(err(Error::DuplicateEdge(u, v).to_string()));
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 1,
        message: "missing node count".into(),
    })?;
    Topology::new(n, edges)
}
