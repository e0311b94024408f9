//! Field -> metric -> tree -> wheel, followed by the check blocks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{canonical_json, ReportError, RunConfig};
use crate::field::{area_measure, covariance_report, sample_field, AreaMeasure, GridField};
use crate::lattice::Point;
use crate::metric::{build_metric, MetricGrid};
use crate::rng::{keyed_rng, label_tag, CHECK_DOMAIN};
use crate::tree::{
    build_geodesic_tree, compare_root_modes, confluence_radius, crossing_set, hairy_check,
    short_hair_subtree, verify_half_zipper, PlanarTree, RootMode,
};
use crate::wheel::{
    contour_exploration, disk_check, dual_tree, parse_curve_binary, parse_curve_json,
    recover_trees, visit_order_predicate, zipper_check, WheelCurve, WheelError,
};

/// Check blocks in report order.
pub const BLOCK_NAMES: [&str; 9] = [
    "field_covariance",
    "metric_axioms",
    "tree_axioms",
    "confluence",
    "short_hair",
    "wheel_invariants",
    "disk_checks",
    "order_theorem",
    "area_quantization",
];

/// Results of the construction stages. Stages that were not run are `None`.
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub config: RunConfig,
    pub field: Option<GridField>,
    pub measure: Option<AreaMeasure>,
    pub metric: Option<MetricGrid>,
    pub tree: Option<PlanarTree>,
    pub curve: Option<WheelCurve>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub passed: bool,
    /// Set when the block could not finish; the block then counts as failed.
    pub error: Option<String>,
    pub details: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: bool,
    pub enabled: Vec<String>,
    pub disabled: Vec<String>,
    pub failed: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub xi_effective: f64,
    pub blocks: Vec<Block>,
    pub summary: Summary,
}

impl RunReport {
    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn to_canonical_json(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("report serializes"))
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        serde_json::from_str(text).map_err(|e| ReportError::Config(format!("bad report: {e}")))
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub artifacts: Artifacts,
    /// Wall-clock seconds per stage and block; kept out of the report.
    pub timings: BTreeMap<String, f64>,
}

fn timed<T>(timings: &mut BTreeMap<String, f64>, key: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.insert(key.to_string(), start.elapsed().as_secs_f64());
    out
}

/// Build field, measure, metric, tree and curve.
pub fn run_stages(config: &RunConfig) -> Result<(Artifacts, BTreeMap<String, f64>), ReportError> {
    config.validate()?;
    let mut timings = BTreeMap::new();
    let field = timed(&mut timings, "stage.field", || {
        sample_field(config.n, config.seed, config.field_mode)
    })?;
    stages_from_field(config, field, timings)
}

/// Run the later stages on a given field (fixtures, imported fields).
pub fn stages_from_field(
    config: &RunConfig,
    field: GridField,
    mut timings: BTreeMap<String, f64>,
) -> Result<(Artifacts, BTreeMap<String, f64>), ReportError> {
    let measure = timed(&mut timings, "stage.measure", || area_measure(&field, config.gamma))?;
    let metric = timed(&mut timings, "stage.metric", || {
        build_metric(&field, config.effective_xi(), config.tie_eps)
    })?;
    let tree = timed(&mut timings, "stage.tree", || {
        build_geodesic_tree(&metric, config.root_mode)
    })?;
    let curve = timed(&mut timings, "stage.wheel", || contour_exploration(&tree, Some(&measure)))?;
    let mut config = config.clone();
    config.n = field.n();
    Ok((
        Artifacts {
            config,
            field: Some(field),
            measure: Some(measure),
            metric: Some(metric),
            tree: Some(tree),
            curve: Some(curve),
        },
        timings,
    ))
}

/// Run every stage and every enabled check block.
///
/// Construction errors abort the run; a block that errors or panics is
/// marked failed and the other blocks still run.
pub fn run_pipeline(config: &RunConfig) -> Result<RunOutcome, ReportError> {
    let (artifacts, mut timings) = run_stages(config)?;
    let enabled: Vec<&str> = BLOCK_NAMES
        .iter()
        .copied()
        .filter(|name| config.checks.get(name) == Some(true))
        .collect();
    let results: Vec<(Block, f64)> = enabled
        .par_iter()
        .map(|&name| {
            let start = Instant::now();
            let block = run_block(name, &artifacts);
            (block, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut blocks = Vec::with_capacity(results.len());
    for (block, secs) in results {
        timings.insert(format!("block.{}", block.name), secs);
        blocks.push(block);
    }
    let failed: Vec<String> = blocks.iter().filter(|b| !b.passed).map(|b| b.name.clone()).collect();
    let summary = Summary {
        passed: failed.is_empty(),
        enabled: enabled.iter().map(|s| s.to_string()).collect(),
        disabled: BLOCK_NAMES
            .iter()
            .filter(|n| !enabled.contains(n))
            .map(|s| s.to_string())
            .collect(),
        failed,
    };
    let report = RunReport {
        config: config.clone(),
        xi_effective: config.effective_xi(),
        blocks,
        summary,
    };
    Ok(RunOutcome {
        report,
        artifacts,
        timings,
    })
}

type BlockResult = Result<(bool, Value), String>;

fn run_block(name: &str, art: &Artifacts) -> Block {
    let run = || -> BlockResult {
        match name {
            "field_covariance" => field_covariance(art),
            "metric_axioms" => metric_axioms(art),
            "tree_axioms" => tree_axioms(art),
            "confluence" => confluence(art),
            "short_hair" => short_hair(art),
            "wheel_invariants" => wheel_invariants(art),
            "disk_checks" => disk_checks(art),
            "order_theorem" => order_theorem(art),
            "area_quantization" => area_quantization(art),
            other => Err(format!("unknown block `{other}`")),
        }
    };
    let outcome = match catch_unwind(AssertUnwindSafe(run)) {
        Ok(r) => r,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        }
    };
    match outcome {
        Ok((passed, details)) => Block {
            name: name.into(),
            passed,
            error: None,
            details,
        },
        Err(e) => Block {
            name: name.into(),
            passed: false,
            error: Some(e),
            details: Value::Null,
        },
    }
}

fn check_rng(art: &Artifacts, name: &str) -> ChaCha20Rng {
    keyed_rng(art.config.seed, CHECK_DOMAIN, label_tag(name), art.config.n as u64, 0)
}

fn need<'a, T>(x: &'a Option<T>, stage: &str) -> Result<&'a T, String> {
    x.as_ref().ok_or_else(|| format!("{stage} stage missing"))
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn field_covariance(art: &Artifacts) -> BlockResult {
    let c = &art.config;
    let rep = covariance_report(c.field_mode, c.samples.covariance_n, c.samples.covariance_samples, c.seed)
        .map_err(s)?;
    let threshold = 4.0;
    let passed = rep.max_abs_z < threshold;
    Ok((passed, json!({ "report": rep, "z_threshold": threshold })))
}

fn metric_axioms(art: &Artifacts) -> BlockResult {
    let m = need(&art.metric, "metric")?;
    let nv = m.lattice().num_vertices();
    let mut rng = check_rng(art, "metric_axioms");
    let k = art.config.samples.metric_triples;
    let triples: Vec<[usize; 3]> = (0..k)
        .map(|_| [rng.random_range(0..nv), rng.random_range(0..nv), rng.random_range(0..nv)])
        .collect();
    let triple_results: Vec<Result<(bool, bool, f64), String>> = triples
        .par_iter()
        .map(|&[x, y, z]| {
            let dxy = m.distance(x, y).map_err(s)?;
            let dyx = m.distance(y, x).map_err(s)?;
            let dyz = m.distance(y, z).map_err(s)?;
            let dxz = m.distance(x, z).map_err(s)?;
            let dxx = m.distance(x, x).map_err(s)?;
            let slack = if dxz > 0.0 { (dxz - dxy - dyz) / dxz } else { 0.0 };
            Ok((dxy == dyx, dxx == 0.0 && dxy >= 0.0, slack))
        })
        .collect();
    let mut symmetric = 0;
    let mut identity = 0;
    let mut worst_slack: f64 = f64::NEG_INFINITY;
    for r in triple_results {
        let (sym, id, slack) = r?;
        symmetric += sym as usize;
        identity += id as usize;
        worst_slack = worst_slack.max(slack);
    }
    let triangle_ok = k == 0 || worst_slack <= 1e-9;

    let pairs: Vec<(usize, usize)> = (0..k)
        .map(|_| loop {
            let (a, b) = (rng.random_range(0..nv), rng.random_range(0..nv));
            if a != b {
                break (a, b);
            }
        })
        .collect();
    let subpath_count = k / 2;
    let cuts: Vec<(f64, f64)> = (0..subpath_count).map(|_| (rng.random(), rng.random())).collect();
    let geo: Vec<Result<(bool, Vec<usize>), String>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let g = m.geodesic(a, b).map_err(s)?;
            let d = m.distance(a, b).map_err(s)?;
            let v = &g.vertices;
            let simple = v.iter().collect::<BTreeSet<_>>().len() == v.len();
            let ok = g.length == d
                && v.first() == Some(&a)
                && v.last() == Some(&b)
                && simple
                && m.path_length(v).is_some();
            Ok((ok, g.vertices))
        })
        .collect();
    let mut consistent = 0;
    let mut paths = Vec::with_capacity(geo.len());
    for r in geo {
        let (ok, p) = r?;
        consistent += ok as usize;
        paths.push(p);
    }
    let sub: Vec<Result<bool, String>> = cuts
        .par_iter()
        .enumerate()
        .map(|(i, &(u, w))| {
            let p = &paths[i % paths.len().max(1)];
            if p.len() < 2 {
                return Ok(true);
            }
            let mut i0 = (u * p.len() as f64) as usize % p.len();
            let mut j0 = (w * p.len() as f64) as usize % p.len();
            if i0 == j0 {
                j0 = if j0 + 1 < p.len() { j0 + 1 } else { j0 - 1 };
            }
            if i0 > j0 {
                std::mem::swap(&mut i0, &mut j0);
            }
            let piece = &p[i0..=j0];
            let g = m.geodesic(piece[0], piece[piece.len() - 1]).map_err(s)?;
            let d = m.distance(piece[0], piece[piece.len() - 1]).map_err(s)?;
            let len = m.path_length(piece).ok_or("subpath is not a lattice path")?;
            Ok(g.vertices == piece && (len - d).abs() <= 1e-12 * d.max(f64::MIN_POSITIVE))
        })
        .collect();
    let mut subpaths_ok = 0;
    for r in &sub {
        subpaths_ok += *r.as_ref().map_err(|e| e.clone())? as usize;
    }
    let passed = symmetric == k
        && identity == k
        && triangle_ok
        && consistent == pairs.len()
        && subpaths_ok == sub.len();
    Ok((
        passed,
        json!({
            "triples": k,
            "symmetric_exact": symmetric,
            "identity": identity,
            "max_triangle_slack": if k == 0 { Value::Null } else { json!(worst_slack) },
            "triangle_tolerance": 1e-9,
            "geodesic_pairs": pairs.len(),
            "geodesic_length_equals_distance": consistent,
            "subpaths": sub.len(),
            "subpaths_geodesic": subpaths_ok,
        }),
    ))
}

fn undirected_adjacency(tree: &PlanarTree) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); tree.len()];
    for v in 0..tree.len() {
        if let Some(p) = tree.parent(v) {
            adj[v].push(p);
            adj[p].push(v);
        }
    }
    adj
}

/// Component labels of the tree with `removed` deleted (`usize::MAX` for removed vertices).
fn component_labels(adj: &[Vec<usize>], removed: &dyn Fn(usize) -> bool) -> Vec<usize> {
    let mut label = vec![usize::MAX; adj.len()];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for s in 0..adj.len() {
        if removed(s) || label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if !removed(u) && label[u] == usize::MAX {
                    label[u] = next;
                    queue.push_back(u);
                }
            }
        }
        next += 1;
    }
    label
}

fn tree_metric_gap(tree: &PlanarTree, m: &MetricGrid) -> Result<f64, String> {
    let lat = m.lattice();
    let reference = match tree.root_mode() {
        Some(RootMode::Point(z)) => m.distances_from(z).map_err(s)?,
        _ => {
            let boundary: Vec<usize> = (0..lat.num_vertices()).filter(|&v| lat.is_boundary(v)).collect();
            m.shortest_paths(&boundary, None, None).dist
        }
    };
    Ok((0..lat.num_vertices())
        .map(|v| (tree.dist(v) - reference[v]).abs())
        .fold(0.0, f64::max))
}

fn tree_axioms(art: &Artifacts) -> BlockResult {
    let tree = need(&art.tree, "tree")?;
    let m = need(&art.metric, "metric")?;
    let zipper = verify_half_zipper(tree);
    let gap = tree_metric_gap(tree, m)?;
    let rotation_violations = tree.rotation_violations().len();

    let internal: Vec<usize> = (0..tree.len())
        .filter(|&v| v != tree.root() && !tree.is_leaf(v))
        .collect();
    let mut rng = check_rng(art, "tree_axioms");
    let picks: Vec<usize> = if internal.is_empty() {
        Vec::new()
    } else {
        (0..art.config.samples.cut_point_removals)
            .map(|_| internal[rng.random_range(0..internal.len())])
            .collect()
    };
    let adj = undirected_adjacency(tree);
    let cut_ok: Vec<bool> = picks
        .par_iter()
        .map(|&v| {
            let label = component_labels(&adj, &|u| u == v);
            let root_side = label[tree.root()];
            let kids = tree.children(v);
            let distinct: BTreeSet<usize> = kids.iter().map(|&c| label[c]).collect();
            let separated = distinct.len() == kids.len() && !distinct.contains(&root_side);
            // descendants stay with their branch, everything else with the root
            let consistent = (0..tree.len()).filter(|&u| u != v).all(|u| {
                (label[u] == root_side) != tree.is_ancestor(v, u)
            });
            separated && consistent
        })
        .collect();
    let cut_verified = cut_ok.iter().filter(|&&b| b).count();

    // root-ward paths from deep vertices, stopping short of the super-root
    let lattice_vertices = m.lattice().num_vertices();
    let climbs: Vec<Vec<usize>> = (0..lattice_vertices)
        .map(|v| tree.path_to_root(v).into_iter().filter(|&x| x < lattice_vertices).collect())
        .collect();
    let longest = climbs.iter().map(Vec::len).max().unwrap_or(0);
    let min_len = (art.config.n / 2).max(2).min(longest);
    let deep: Vec<usize> = (0..lattice_vertices)
        .filter(|&v| climbs[v].len() >= min_len.max(3))
        .collect();
    let mut hairy_total = 0;
    let mut both_sides = 0;
    for _ in 0..art.config.samples.hairy_paths {
        if deep.is_empty() {
            break;
        }
        let path = &climbs[deep[rng.random_range(0..deep.len())]];
        let (l, r) = hairy_check(tree, path).map_err(s)?;
        hairy_total += 1;
        both_sides += (l && r) as usize;
    }

    let passed = zipper.passed()
        && gap == 0.0
        && rotation_violations == 0
        && cut_verified == picks.len();
    Ok((
        passed,
        json!({
            "half_zipper": zipper,
            "tree_metric_max_gap": gap,
            "rotation_violations": rotation_violations,
            "cut_point_removals": picks.len(),
            "cut_point_verified": cut_verified,
            "hairy_paths": hairy_total,
            "hairy_both_sides": both_sides,
            "hairy_fraction": if hairy_total == 0 { Value::Null } else { json!(both_sides as f64 / hairy_total as f64) },
            "hairy_min_path_vertices": min_len,
        }),
    ))
}

fn confluence(art: &Artifacts) -> BlockResult {
    let m = need(&art.metric, "metric")?;
    let tree = need(&art.tree, "tree")?;
    let lat = m.lattice();
    let n = lat.n();
    let center = lat.vertex(n / 2, n / 2);
    let (point_tree, wired_tree) = match tree.root_mode() {
        Some(RootMode::Point(z)) if z == center => {
            (tree.clone(), build_geodesic_tree(m, RootMode::Wired).map_err(s)?)
        }
        Some(RootMode::Wired) => (build_geodesic_tree(m, RootMode::Point(center)).map_err(s)?, tree.clone()),
        _ => (
            build_geodesic_tree(m, RootMode::Point(center)).map_err(s)?,
            build_geodesic_tree(m, RootMode::Wired).map_err(s)?,
        ),
    };
    let max_dist = (0..lat.num_vertices()).map(|v| point_tree.dist(v)).fold(0.0, f64::max);

    let mut ok = true;
    let mut sets = Vec::new();
    for &(tf, sf) in &art.config.radius_pairs {
        let (t, s_) = (tf * max_dist, sf * max_dist);
        let set = crossing_set(&point_tree, center, t, s_).map_err(s)?;
        let members: BTreeSet<usize> = set.points.iter().copied().collect();
        let on_layer = set.points.iter().all(|&x| {
            point_tree.dist(x) >= t && point_tree.parent(x).is_some_and(|p| point_tree.dist(p) < t)
        });
        let exactly_once = (0..point_tree.len())
            .filter(|&v| point_tree.dist(v) >= s_)
            .all(|v| point_tree.path_to_root(v).iter().filter(|x| members.contains(x)).count() == 1);
        let s_wider = (sf + 1.0) / 2.0 * max_dist;
        let wider = crossing_set(&point_tree, center, t, s_wider).map_err(s)?;
        let monotone = wider.points.len() <= set.points.len();
        ok &= on_layer && exactly_once && monotone;
        sets.push(json!({
            "t_fraction": tf,
            "s_fraction": sf,
            "t": t,
            "s": s_,
            "size": set.points.len(),
            "points": set.points,
            "on_layer": on_layer,
            "every_outer_path_crosses_once": exactly_once,
            "size_at_wider_s": wider.points.len(),
            "monotone_in_s": monotone,
        }));
    }

    let center_pt = Point::new(0.5, 0.5);
    let mut radii = Vec::new();
    for r in [0.05, 0.1] {
        let found = confluence_radius(&wired_tree, r).map_err(s)?;
        let reverified = match found {
            Some(big_r) => {
                let sources: Vec<usize> = (0..lat.num_vertices())
                    .filter(|&v| lat.position(v).dist(center_pt) <= r)
                    .collect();
                let tails: BTreeSet<Vec<usize>> = sources
                    .iter()
                    .map(|&v| {
                        let mut tail: Vec<usize> = wired_tree
                            .path_to_root(v)
                            .into_iter()
                            .filter(|&x| wired_tree.position(x).is_none_or(|p| p.dist(center_pt) >= big_r))
                            .collect();
                        tail.sort_unstable();
                        tail
                    })
                    .collect();
                tails.len() <= 1
            }
            None => true,
        };
        ok &= reverified;
        radii.push(json!({ "r": r, "radius": found, "reverified": reverified }));
    }

    let ball = 0.125;
    let far = lat.vertex(0, 0);
    let agreement = compare_root_modes(m, ball, far).map_err(s)?;
    Ok((
        ok,
        json!({
            "center": center,
            "max_dist": max_dist,
            "crossing_sets": sets,
            "confluence_radii": radii,
            "root_mode_agreement": {
                "radius": agreement.radius,
                "z_far": far,
                "compared": agreement.compared,
                "agreeing": agreement.agreeing,
                "fraction": agreement.fraction,
            },
        }),
    ))
}

/// Largest pairwise Euclidean distance, by brute force.
fn brute_diameter(points: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(p.dist(*q));
        }
    }
    d
}

fn short_hair(art: &Artifacts) -> BlockResult {
    let tree = need(&art.tree, "tree")?;
    let adj = undirected_adjacency(tree);
    let mut eps = art.config.eps.clone();
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();
    let mut ok = true;
    let mut rows = Vec::new();
    let mut subtrees = Vec::new();
    for &e in &eps {
        let t = short_hair_subtree(tree, e).map_err(s)?;
        let label = component_labels(&adj, &|u| t.contains(u));
        let mut groups: BTreeMap<usize, Vec<Point>> = BTreeMap::new();
        for v in 0..tree.len() {
            if label[v] != usize::MAX {
                let entry = groups.entry(label[v]).or_default();
                if let Some(p) = tree.position(v) {
                    entry.push(p);
                }
            }
        }
        let diameters: Vec<f64> = groups.values().collect::<Vec<_>>().par_iter().map(|g| brute_diameter(g)).collect();
        let max_component = diameters.iter().copied().fold(0.0, f64::max);
        let bounded = diameters.iter().all(|&d| d < e);
        ok &= bounded;
        rows.push(json!({
            "eps": e,
            "subtree_vertices": t.len(),
            "components": groups.len(),
            "max_component_diameter": max_component,
            "components_below_eps": bounded,
        }));
        subtrees.push(t);
    }
    let nested = subtrees.windows(2).all(|w| w[0].is_subset_of(&w[1]));
    ok &= nested;
    Ok((
        ok,
        json!({ "scales": rows, "nested": nested, "diameter": "euclidean, unit square" }),
    ))
}

fn wheel_invariants(art: &Artifacts) -> BlockResult {
    let tree = need(&art.tree, "tree")?;
    let curve = need(&art.curve, "wheel")?;
    let lat = curve.lattice().ok_or("curve has no grid")?;
    let valid = curve.validate().map_err(s);
    let corner_count = curve.len() == 2 * tree.num_edges();
    let cell_count = curve.cells().len() == lat.num_cells();
    let mut appearances = vec![0usize; tree.len()];
    for c in curve.corners() {
        appearances[c.vertex] += 1;
    }
    let degree_matches = (0..tree.len()).all(|v| appearances[v] == tree.degree(v));

    let dual = dual_tree(tree).map_err(s)?;
    let zipper = zipper_check(curve, tree, &dual).map_err(s)?;
    let (primal_back, dual_back) = recover_trees(curve).map_err(s)?;
    let primal_roundtrip = &primal_back == tree;
    let dual_roundtrip = dual_back.as_ref() == Some(&dual);
    let json_roundtrip = parse_curve_json(&curve.to_json()).map_err(s)? == *curve;
    let binary_roundtrip = parse_curve_binary(&curve.to_binary()).map_err(s)? == *curve;

    let total = curve.len();
    let mut rng = check_rng(art, "wheel_invariants");
    let nested: Vec<(usize, usize, usize, usize)> = (0..50)
        .map(|_| {
            let len = rng.random_range(1..=total);
            let start = rng.random_range(0..total);
            let extra = rng.random_range(0..=total - len);
            let before = rng.random_range(0..=extra);
            ((start + total - before) % total, len + extra, start, len)
        })
        .collect();
    let monotone: Vec<Result<bool, WheelError>> = nested
        .par_iter()
        .map(|&(outer_start, outer_len, start, len)| {
            let inner = disk_check(curve, start, len)?;
            let outer = disk_check(curve, outer_start, outer_len)?;
            let outer_cells: BTreeSet<usize> = outer.cells.iter().copied().collect();
            Ok(inner.cells.iter().all(|c| outer_cells.contains(c)))
        })
        .collect();
    let mut monotone_ok = 0;
    for r in monotone {
        monotone_ok += r.map_err(s)? as usize;
    }
    let passed = valid.is_ok()
        && corner_count
        && cell_count
        && degree_matches
        && zipper.passed()
        && primal_roundtrip
        && dual_roundtrip
        && json_roundtrip
        && binary_roundtrip
        && monotone_ok == nested.len();
    Ok((
        passed,
        json!({
            "validate": valid.err(),
            "corners": curve.len(),
            "tree_edges": tree.num_edges(),
            "corners_twice_edges": corner_count,
            "cells": curve.cells().len(),
            "every_cell_once": cell_count,
            "corner_count_equals_degree": degree_matches,
            "zipper": zipper,
            "dual_edges": dual.num_edges(),
            "recovered_primal_equal": primal_roundtrip,
            "recovered_dual_equal": dual_roundtrip,
            "json_roundtrip": json_roundtrip,
            "binary_roundtrip": binary_roundtrip,
            "nested_intervals": nested.len(),
            "nested_regions_monotone": monotone_ok,
        }),
    ))
}

fn disk_checks(art: &Artifacts) -> BlockResult {
    let curve = need(&art.curve, "wheel")?;
    let total = curve.len();
    let mut rng = check_rng(art, "disk_checks");
    let intervals: Vec<(usize, usize)> = (0..art.config.samples.disk_intervals)
        .map(|_| (rng.random_range(0..total), rng.random_range(1..=total)))
        .collect();
    let reports: Vec<_> = intervals
        .par_iter()
        .map(|&(start, len)| disk_check(curve, start, len))
        .collect();
    let mut passed = 0;
    let mut simply = 0;
    let mut boundary = 0;
    let mut full = 0;
    let mut failures = Vec::new();
    for r in reports {
        let r = r.map_err(s)?;
        passed += r.passed() as usize;
        simply += r.simply_connected() as usize;
        boundary += r.endpoints_on_boundary() as usize;
        full += r.full_circle as usize;
        if !r.passed() && failures.len() < 16 {
            failures.push(json!({ "start": r.start, "len": r.len, "euler": r.euler, "components": r.components }));
        }
    }
    Ok((
        passed == intervals.len(),
        json!({
            "intervals": intervals.len(),
            "passed": passed,
            "simply_connected": simply,
            "endpoints_on_boundary": boundary,
            "full_circle": full,
            "failures": failures,
        }),
    ))
}

fn order_theorem(art: &Artifacts) -> BlockResult {
    let tree = need(&art.tree, "tree")?;
    let curve = need(&art.curve, "wheel")?;
    let nv = curve.lattice().map(|l| l.num_vertices()).unwrap_or(tree.len());
    let want = art.config.samples.order_pairs;
    let mut rng = check_rng(art, "order_theorem");
    let mut pairs = Vec::with_capacity(want);
    let mut attempts = 0;
    while pairs.len() < want && attempts < 100 * want.max(1) {
        attempts += 1;
        let (z, w) = (rng.random_range(0..nv), rng.random_range(0..nv));
        if z != w && !tree.is_ancestor(z, w) && !tree.is_ancestor(w, z) {
            pairs.push((z, w));
        }
    }
    let results: Vec<_> = pairs
        .par_iter()
        .map(|&(z, w)| visit_order_predicate(curve, tree, z, w))
        .collect();
    let mut agree = 0;
    let mut failures = Vec::new();
    for (r, &(z, w)) in results.into_iter().zip(&pairs) {
        let r = r.map_err(s)?;
        if r.agrees() {
            agree += 1;
        } else if failures.len() < 16 {
            failures.push(json!([z, w]));
        }
    }
    Ok((
        agree == pairs.len() && pairs.len() == want,
        json!({
            "requested": want,
            "admissible_pairs": pairs.len(),
            "agreeing": agree,
            "failures": failures,
        }),
    ))
}

fn area_quantization(art: &Artifacts) -> BlockResult {
    let curve = need(&art.curve, "wheel")?;
    let mu = need(&art.measure, "measure")?;
    let times = curve.times();
    let cells = curve.cells();
    let final_time = *times.last().ok_or("curve has no cells")?;
    let bound = mu.max_mass();
    let mut rng = check_rng(art, "area_quantization");
    let mut worst: f64 = 0.0;
    let mut lookup_consistent = true;
    for _ in 0..art.config.samples.area_pairs {
        let (x, y): (f64, f64) = (rng.random(), rng.random());
        let (a, b) = (x.min(y), x.max(y));
        let direct: f64 = cells
            .iter()
            .zip(times)
            .filter(|&(_, &t)| a <= t && t <= b)
            .map(|(&c, _)| mu.mass(c))
            .sum();
        let via_lookup: f64 = curve.cells_in_time(a, b).iter().map(|&c| mu.mass(c)).sum();
        lookup_consistent &= (direct - via_lookup).abs() <= 1e-12;
        worst = worst.max((direct - (b - a)).abs());
    }
    let anchored = curve.anchored_times();
    let anchor_zero = curve
        .anchor()
        .map(|k| anchored[k] == 0.0)
        .unwrap_or(false);
    let total_ok = (final_time - 1.0).abs() <= 1e-12;
    Ok((
        worst <= bound && total_ok && lookup_consistent && anchor_zero,
        json!({
            "pairs": art.config.samples.area_pairs,
            "max_defect": worst,
            "max_cell_mass": bound,
            "final_time": final_time,
            "final_time_is_one": total_ok,
            "lookup_matches_direct_sum": lookup_consistent,
            "anchor_time_zero": anchor_zero,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::CheckToggles;

    fn small(n: usize) -> RunConfig {
        let mut c = RunConfig {
            n,
            ..RunConfig::default()
        };
        c.samples.covariance_samples = 2000;
        c.samples.disk_intervals = 20;
        c.samples.order_pairs = 50;
        c
    }

    #[test]
    fn small_run_passes_every_block() {
        let out = run_pipeline(&small(12)).unwrap();
        for b in &out.report.blocks {
            assert!(b.passed, "{}: {:?} {}", b.name, b.error, b.details);
        }
        assert_eq!(out.report.blocks.len(), BLOCK_NAMES.len());
        assert!(out.report.summary.passed);
    }

    #[test]
    fn disabled_blocks_are_absent_and_noted() {
        let mut c = small(8);
        c.checks = CheckToggles::only("area_quantization").unwrap();
        let out = run_pipeline(&c).unwrap();
        assert_eq!(out.report.blocks.len(), 1);
        assert_eq!(out.report.summary.disabled.len(), BLOCK_NAMES.len() - 1);
    }

    #[test]
    fn invalid_size_propagates() {
        let c = RunConfig {
            n: 1,
            ..RunConfig::default()
        };
        assert!(matches!(run_pipeline(&c), Err(ReportError::Field(_))));
    }

    #[test]
    fn failing_block_is_isolated() {
        let mut c = small(8);
        c.checks = CheckToggles::all(false);
        c.checks.field_covariance = true;
        c.checks.disk_checks = true;
        c.samples.covariance_n = 40; // beyond the dense oracle
        let out = run_pipeline(&c).unwrap();
        let cov = out.report.block("field_covariance").unwrap();
        assert!(!cov.passed && cov.error.is_some());
        assert!(out.report.block("disk_checks").unwrap().passed);
        assert_eq!(out.report.summary.failed, vec!["field_covariance".to_string()]);
    }
}
