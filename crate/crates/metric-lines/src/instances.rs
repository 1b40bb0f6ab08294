//! Instance builders: graph metrics, random metric closures, L1 point sets,
//! and exhaustive enumeration of small connected graphs.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::metric::{FiniteMetricSpace, MetricError};
use crate::Space;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid edge ({i},{j}): {reason}")]
    InvalidEdge { i: usize, j: usize, reason: String },
    #[error("duplicate point at index {0}")]
    DuplicatePoint(usize),
    #[error("vertex count {0} out of supported range {1}..={2}")]
    NOutOfRange(usize, usize, usize),
    #[error("bad edge list: {0}")]
    BadEdgeList(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A simple undirected graph with positive integer edge weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSpec {
    pub n: usize,
    pub edges: Vec<(usize, usize, i64)>,
}

impl GraphSpec {
    pub fn unit(n: usize, edges: &[(usize, usize)]) -> Self {
        GraphSpec {
            n,
            edges: edges.iter().map(|&(i, j)| (i, j, 1)).collect(),
        }
    }

    pub fn path(n: usize) -> Self {
        Self::unit(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>())
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges.push((n - 1, 0));
        Self::unit(n, &edges)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).tuple_combinations().collect();
        Self::unit(n, &edges)
    }

    /// Parses the edge-list format: first line `n m`, then `m` lines `i j [w]`.
    pub fn from_edge_list(text: &str) -> Result<Self, InstanceError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| InstanceError::BadEdgeList("empty input".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| InstanceError::BadEdgeList("bad vertex count".into()))?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| InstanceError::BadEdgeList("bad edge count".into()))?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 && toks.len() != 3 {
                return Err(InstanceError::BadEdgeList(format!("bad edge line: {line}")));
            }
            let i: usize = toks[0]
                .parse()
                .map_err(|_| InstanceError::BadEdgeList(format!("bad endpoint: {}", toks[0])))?;
            let j: usize = toks[1]
                .parse()
                .map_err(|_| InstanceError::BadEdgeList(format!("bad endpoint: {}", toks[1])))?;
            let w: i64 = if toks.len() == 3 {
                toks[2]
                    .parse()
                    .map_err(|_| InstanceError::BadEdgeList(format!("bad weight: {}", toks[2])))?
            } else {
                1
            };
            edges.push((i, j, w));
        }
        if edges.len() != m {
            return Err(InstanceError::BadEdgeList(format!(
                "expected {m} edges, found {}",
                edges.len()
            )));
        }
        Ok(GraphSpec { n, edges })
    }

    fn check(&self) -> Result<(), InstanceError> {
        let mut seen = std::collections::HashSet::new();
        for &(i, j, w) in &self.edges {
            if i >= self.n || j >= self.n {
                return Err(InstanceError::InvalidEdge {
                    i,
                    j,
                    reason: "endpoint out of range".into(),
                });
            }
            if i == j {
                return Err(InstanceError::InvalidEdge {
                    i,
                    j,
                    reason: "loop".into(),
                });
            }
            if w <= 0 {
                return Err(InstanceError::InvalidEdge {
                    i,
                    j,
                    reason: "non-positive weight".into(),
                });
            }
            let key = (i.min(j), i.max(j));
            if !seen.insert(key) {
                return Err(InstanceError::InvalidEdge {
                    i,
                    j,
                    reason: "multi-edge".into(),
                });
            }
        }
        Ok(())
    }
}

const UNREACHED: i64 = i64::MAX / 4;

/// Shortest-path metric of a connected graph.
pub fn graph_metric(spec: &GraphSpec) -> Result<Space, InstanceError> {
    spec.check()?;
    let n = spec.n;
    if n < 2 {
        return Err(InstanceError::NOutOfRange(n, 2, usize::MAX));
    }
    let mut d = vec![vec![UNREACHED; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(i, j, w) in &spec.edges {
        d[i][j] = d[i][j].min(w);
        d[j][i] = d[j][i].min(w);
    }
    floyd_warshall(&mut d);
    if d.iter().flatten().any(|&x| x >= UNREACHED) {
        return Err(InstanceError::Disconnected);
    }
    Ok(FiniteMetricSpace::from_matrix(d)?)
}

fn floyd_warshall(d: &mut [Vec<i64>]) {
    let n = d.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
}

/// Random symmetric integer matrix with entries in `[1, max_entry]`, made
/// metric by shortest-path closure. Deterministic per seed.
#[allow(clippy::needless_range_loop)]
pub fn random_metric(n: usize, seed: u64, max_entry: i64) -> Space {
    assert!(n >= 2 && max_entry >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.gen_range(1..=max_entry);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    floyd_warshall(&mut d);
    FiniteMetricSpace::from_matrix(d).expect("closed matrix is a metric")
}

/// L1 (taxicab) metric over integer plane points.
pub fn l1_metric(points: &[(i64, i64)]) -> Result<Space, InstanceError> {
    for (idx, p) in points.iter().enumerate() {
        if points[..idx].contains(p) {
            return Err(InstanceError::DuplicatePoint(idx));
        }
    }
    let n = points.len();
    if n < 2 {
        return Err(InstanceError::NOutOfRange(n, 2, usize::MAX));
    }
    let mut d = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] =
                (points[i].0 - points[j].0).abs() + (points[i].1 - points[j].1).abs();
        }
    }
    Ok(FiniteMetricSpace::from_matrix(d)?)
}

/// Reference instances by name: `P<n>` paths, `C<n>` cycles, `K<n>` complete
/// graphs, all with unit edge weights.
pub fn builtin(name: &str) -> Option<Space> {
    if name.len() < 2 || !name.is_char_boundary(1) {
        return None;
    }
    let (kind, num) = name.split_at(1);
    let n: usize = num.parse().ok()?;
    let spec = match kind {
        "P" | "p" if n >= 2 => GraphSpec::path(n),
        "C" | "c" if n >= 3 => GraphSpec::cycle(n),
        "K" | "k" if n >= 2 => GraphSpec::complete(n),
        _ => return None,
    };
    graph_metric(&spec).ok()
}

pub const ENUM_MIN_N: usize = 2;
pub const ENUM_MAX_N: usize = 7;

/// All labeled simple connected graphs on `n` vertices, in lexicographic
/// edge-mask order. With `dedup`, one representative per isomorphism class
/// (the first encountered, i.e. the one with the smallest mask).
pub fn enumerate_connected_graphs(
    n: usize,
    dedup: bool,
) -> Result<ConnectedGraphs, InstanceError> {
    if !(ENUM_MIN_N..=ENUM_MAX_N).contains(&n) {
        return Err(InstanceError::NOutOfRange(n, ENUM_MIN_N, ENUM_MAX_N));
    }
    let edge_slots: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    Ok(ConnectedGraphs {
        n,
        mask: 0,
        end: 1u32 << edge_slots.len(),
        edge_slots,
        dedup,
        seen: std::collections::HashSet::new(),
    })
}

#[derive(Debug)]
pub struct ConnectedGraphs {
    n: usize,
    mask: u32,
    end: u32,
    edge_slots: Vec<(usize, usize)>,
    dedup: bool,
    seen: std::collections::HashSet<u32>,
}

impl ConnectedGraphs {
    fn mask_connected(&self, mask: u32) -> bool {
        let mut adj = vec![0u32; self.n];
        for (b, &(i, j)) in self.edge_slots.iter().enumerate() {
            if mask & (1 << b) != 0 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
        let mut reached = 1u32;
        loop {
            let mut next = reached;
            let mut m = reached;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                next |= adj[v];
            }
            if next == reached {
                break;
            }
            reached = next;
        }
        reached == (1u32 << self.n) - 1
    }

    fn permute_mask(&self, mask: u32, perm: &[usize]) -> u32 {
        let mut out = 0u32;
        for (b, &(i, j)) in self.edge_slots.iter().enumerate() {
            if mask & (1 << b) != 0 {
                let (pi, pj) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                let nb = self
                    .edge_slots
                    .iter()
                    .position(|&(a, b2)| (a, b2) == (pi, pj))
                    .unwrap();
                out |= 1 << nb;
            }
        }
        out
    }

    fn to_spec(&self, mask: u32) -> GraphSpec {
        let edges: Vec<(usize, usize)> = self
            .edge_slots
            .iter()
            .enumerate()
            .filter(|(b, _)| mask & (1 << b) != 0)
            .map(|(_, &e)| e)
            .collect();
        GraphSpec::unit(self.n, &edges)
    }
}

impl Iterator for ConnectedGraphs {
    type Item = GraphSpec;

    fn next(&mut self) -> Option<GraphSpec> {
        while self.mask < self.end {
            let mask = self.mask;
            self.mask += 1;
            if !self.mask_connected(mask) {
                continue;
            }
            if self.dedup {
                if self.seen.contains(&mask) {
                    continue;
                }
                // Mark the whole isomorphism orbit as seen.
                for perm in (0..self.n).permutations(self.n) {
                    self.seen.insert(self.permute_mask(mask, &perm));
                }
            }
            return Some(self.to_spec(mask));
        }
        None
    }
}

/// Hex digest identifying a space by its distance matrix.
pub fn matrix_hash(space: &Space) -> String {
    let mut hasher = Sha256::new();
    hasher.update((space.n() as u64).to_le_bytes());
    for a in space.points() {
        for b in space.points() {
            hasher.update(space.dist(a, b).to_le_bytes());
        }
    }
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}
