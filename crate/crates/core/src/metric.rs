//! Liouville first-passage percolation on the lattice.
//!
//! Each vertex carries the weight `δ·exp(ξ·h_v)`; an edge costs the mean of
//! its endpoint weights times `(1 + jitter)`. The jitter is tiny (default
//! `1e-9` relative) and exists only to make shortest paths unique.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::GridField;
use crate::lattice::Lattice;
use crate::rng::{keyed_rng, JITTER_DOMAIN};

pub const DEFAULT_TIE_EPS: f64 = 1e-9;
/// Jitter amplitudes at or above this would visibly change distances.
pub const MAX_TIE_EPS: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("vertex {0} is not on the lattice")]
    Index(usize),
    #[error("geodesic endpoints coincide (vertex {0})")]
    DegeneratePath(usize),
    #[error(
        "shortest path to vertex {vertex} is not unique (tie_eps = {tie_eps}); \
         use a positive tie_eps to break ties"
    )]
    Ambiguous { vertex: usize, tie_eps: f64 },
    #[error("malformed metric data: {0}")]
    Parse(String),
}

/// Predicted LQG dimension `d_γ = 1 + γ²/4 + √((1 + γ²/4)² + γ²)`.
///
/// This is Watabiki's prediction. It is exact at `γ = √(8/3)` (`d = 4`) and is
/// used only to pick a default weight exponent.
pub fn watabiki_dimension(gamma: f64) -> f64 {
    let a = 1.0 + gamma * gamma / 4.0;
    a + (a * a + gamma * gamma).sqrt()
}

/// Default weight exponent `ξ = γ / d_γ`.
pub fn default_xi(gamma: f64) -> f64 {
    gamma / watabiki_dimension(gamma)
}

#[derive(Clone, Debug)]
pub struct MetricGrid {
    lattice: Lattice,
    xi: f64,
    tie_eps: f64,
    seed: u64,
    vertex_weight: Vec<f64>,
    jitter: Vec<f64>,
    edge_weight: Vec<f64>,
}

/// Build the LFPP weights; the jitter is keyed by the field's seed (0 for explicit fields).
pub fn build_metric(field: &GridField, xi: f64, tie_eps: f64) -> Result<MetricGrid, MetricError> {
    build_metric_seeded(field, xi, tie_eps, field.seed().unwrap_or(0))
}

pub fn build_metric_seeded(
    field: &GridField,
    xi: f64,
    tie_eps: f64,
    jitter_seed: u64,
) -> Result<MetricGrid, MetricError> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(MetricError::Parameter(format!("xi must be positive, got {xi}")));
    }
    if !(0.0..MAX_TIE_EPS).contains(&tie_eps) {
        return Err(MetricError::Parameter(format!(
            "tie_eps must lie in [0, {MAX_TIE_EPS}), got {tie_eps}"
        )));
    }
    let lattice = field.lattice();
    let delta = lattice.spacing();
    let vertex_weight: Vec<f64> = (0..lattice.num_vertices())
        .map(|v| {
            let (r, c) = lattice.coords(v);
            delta * (xi * field.vertex_value(r, c)).exp()
        })
        .collect();
    if vertex_weight.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(MetricError::Parameter("vertex weights overflow".into()));
    }
    let jitter = stratified_jitter(lattice.num_edges(), tie_eps, jitter_seed, lattice.n());
    let edge_weight = (0..lattice.num_edges())
        .map(|e| {
            let (u, v) = lattice.edge_endpoints(e);
            (vertex_weight[u] + vertex_weight[v]) / 2.0 * (1.0 + jitter[e])
        })
        .collect();
    Ok(MetricGrid {
        lattice,
        xi,
        tie_eps,
        seed: jitter_seed,
        vertex_weight,
        jitter,
        edge_weight,
    })
}

/// `jitter(e) = ε·(π(e) + u_e)/E` for a seeded permutation `π` and uniform `u_e`.
///
/// Stratification keeps every `1 + jitter` value distinct in `f64` for up to
/// ~4·10⁶ edges at `ε = 1e-9`, which independent uniform draws cannot.
fn stratified_jitter(edges: usize, eps: f64, seed: u64, n: usize) -> Vec<f64> {
    if eps == 0.0 {
        return vec![0.0; edges];
    }
    let mut rng = keyed_rng(seed, JITTER_DOMAIN, n as u64, edges as u64, 0);
    let mut rank: Vec<usize> = (0..edges).collect();
    rank.shuffle(&mut rng);
    let count = edges as f64;
    rank.into_iter()
        .map(|r| {
            let u: f64 = rng.random();
            eps * (r as f64 + u) / count
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
struct HeapItem {
    dist: f64,
    vertex: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    // min-heap on (dist, vertex)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Output of a (multi-source) Dijkstra run.
#[derive(Clone, Debug)]
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    /// Predecessor on the chosen shortest path; `None` for sources and unreached vertices.
    pub pred: Vec<Option<usize>>,
    /// Set when two different predecessors achieve the same minimal distance.
    pub tied: Vec<bool>,
    /// Vertices in the order they were settled.
    pub settled: Vec<usize>,
}

impl ShortestPaths {
    pub fn reached(&self, v: usize) -> bool {
        self.dist[v].is_finite()
    }

    /// Source-to-`v` path, source first.
    pub fn path_to(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.pred[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// First vertex along the chosen path to `v` whose shortest path is not unique.
    pub fn ambiguity_on_path(&self, v: usize) -> Option<usize> {
        self.path_to(v).into_iter().find(|&x| self.tied[x])
    }
}

impl MetricGrid {
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn tie_eps(&self) -> f64 {
        self.tie_eps
    }

    pub fn jitter_seed(&self) -> u64 {
        self.seed
    }

    pub fn vertex_weight(&self, v: usize) -> f64 {
        self.vertex_weight[v]
    }

    pub fn tie_jitter(&self, e: usize) -> f64 {
        self.jitter[e]
    }

    pub fn edge_weight(&self, e: usize) -> f64 {
        self.edge_weight[e]
    }

    pub fn edge_weights(&self) -> &[f64] {
        &self.edge_weight
    }

    /// Weight of the edge between two axis-adjacent vertices.
    pub fn weight_between(&self, u: usize, v: usize) -> Option<f64> {
        self.lattice.edge_between(u, v).map(|e| self.edge_weight[e])
    }

    fn check_vertex(&self, v: usize) -> Result<(), MetricError> {
        if self.lattice.contains_vertex(v) {
            Ok(())
        } else {
            Err(MetricError::Index(v))
        }
    }

    /// Dijkstra from a set of zero-distance sources.
    ///
    /// Stops early once `target` is settled, and never settles vertices at
    /// distance `>= cutoff`.
    pub fn shortest_paths(
        &self,
        sources: &[usize],
        target: Option<usize>,
        cutoff: Option<f64>,
    ) -> ShortestPaths {
        let nv = self.lattice.num_vertices();
        let mut dist = vec![f64::INFINITY; nv];
        let mut pred: Vec<Option<usize>> = vec![None; nv];
        let mut tied = vec![false; nv];
        let mut done = vec![false; nv];
        let mut settled = Vec::new();
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0.0;
            heap.push(HeapItem { dist: 0.0, vertex: s });
        }
        while let Some(HeapItem { dist: d, vertex: v }) = heap.pop() {
            if done[v] || d > dist[v] {
                continue;
            }
            if let Some(c) = cutoff {
                if d >= c {
                    break;
                }
            }
            done[v] = true;
            settled.push(v);
            if Some(v) == target {
                break;
            }
            for (_, u) in self.lattice.axis_neighbors(v) {
                if done[u] {
                    continue;
                }
                let e = self.lattice.edge_between(v, u).expect("axis neighbours share an edge");
                let nd = d + self.edge_weight[e];
                if nd < dist[u] {
                    dist[u] = nd;
                    pred[u] = Some(v);
                    tied[u] = false;
                    heap.push(HeapItem { dist: nd, vertex: u });
                } else if nd == dist[u] && pred[u] != Some(v) {
                    tied[u] = true;
                }
            }
        }
        ShortestPaths {
            dist,
            pred,
            tied,
            settled,
        }
    }

    /// Distance between two vertices.
    ///
    /// The search always starts from the smaller vertex id, so the result is
    /// exactly symmetric (summation order would otherwise depend on the direction).
    pub fn distance(&self, z: usize, w: usize) -> Result<f64, MetricError> {
        self.check_vertex(z)?;
        self.check_vertex(w)?;
        if z == w {
            return Ok(0.0);
        }
        let (a, b) = (z.min(w), z.max(w));
        Ok(self.shortest_paths(&[a], Some(b), None).dist[b])
    }

    /// Distances from `z` to every vertex.
    pub fn distances_from(&self, z: usize) -> Result<Vec<f64>, MetricError> {
        self.check_vertex(z)?;
        Ok(self.shortest_paths(&[z], None, None).dist)
    }

    /// The open metric ball `{w : D(z, w) < t}`, sorted by vertex id.
    pub fn metric_ball(&self, z: usize, t: f64) -> Result<Vec<usize>, MetricError> {
        self.check_vertex(z)?;
        if !(t >= 0.0) {
            return Err(MetricError::Parameter(format!("ball radius must be >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(Vec::new());
        }
        let mut ball = self.shortest_paths(&[z], None, Some(t)).settled;
        ball.sort_unstable();
        Ok(ball)
    }

    pub fn geodesic(&self, z: usize, w: usize) -> Result<GeodesicPath, MetricError> {
        self.check_vertex(z)?;
        self.check_vertex(w)?;
        if z == w {
            return Err(MetricError::DegeneratePath(z));
        }
        // same search direction as `distance`, so the lengths agree bit for bit
        let (a, b) = (z.min(w), z.max(w));
        let sp = self.shortest_paths(&[a], Some(b), None);
        if let Some(vertex) = sp.ambiguity_on_path(b) {
            return Err(MetricError::Ambiguous {
                vertex,
                tie_eps: self.tie_eps,
            });
        }
        let mut vertices = sp.path_to(b);
        if a != z {
            vertices.reverse();
        }
        Ok(GeodesicPath {
            vertices,
            length: sp.dist[b],
        })
    }

    /// Sum of edge weights along a vertex sequence, accumulated from the start.
    pub fn path_length(&self, path: &[usize]) -> Option<f64> {
        let mut total = 0.0;
        for pair in path.windows(2) {
            total += self.weight_between(pair[0], pair[1])?;
        }
        Some(total)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub vertices: Vec<usize>,
    pub length: f64,
}

impl GeodesicPath {
    /// `[[row, col], ...]` JSON for export.
    pub fn to_json(&self, lattice: &Lattice) -> String {
        let coords: Vec<(usize, usize)> = self.vertices.iter().map(|&v| lattice.coords(v)).collect();
        serde_json::to_string(&coords).expect("coordinates serialize")
    }
}

/// Parse a geodesic export; checks the coordinates form a lattice path.
pub fn parse_geodesic_json(json: &str, lattice: &Lattice) -> Result<Vec<usize>, MetricError> {
    let coords: Vec<(usize, usize)> =
        serde_json::from_str(json).map_err(|e| MetricError::Parse(e.to_string()))?;
    let n = lattice.n();
    let mut out = Vec::with_capacity(coords.len());
    for (r, c) in coords {
        if r > n || c > n {
            return Err(MetricError::Parse(format!("({r}, {c}) is off the lattice")));
        }
        out.push(lattice.vertex(r, c));
    }
    if out.windows(2).any(|p| lattice.edge_between(p[0], p[1]).is_none()) {
        return Err(MetricError::Parse("consecutive vertices are not adjacent".into()));
    }
    Ok(out)
}

/// JSON header for a binary distance-field export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceHeader {
    pub n: usize,
    pub source: (usize, usize),
    pub xi: f64,
    pub tie_eps: f64,
}

pub fn distance_field_binary(dist: &[f64]) -> Vec<u8> {
    dist.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn read_distance_field(header: &DistanceHeader, bytes: &[u8]) -> Result<Vec<f64>, MetricError> {
    let side = header
        .n
        .checked_add(1)
        .filter(|s| *s <= 1 << 14)
        .ok_or_else(|| MetricError::Parse("unsupported n".into()))?;
    if bytes.len() != side * side * 8 {
        return Err(MetricError::Parse(format!(
            "expected {} bytes, found {}",
            side * side * 8,
            bytes.len()
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    if values.iter().any(|v| v.is_nan() || *v < 0.0) {
        return Err(MetricError::Parse("distances must be nonnegative".into()));
    }
    Ok(values)
}
