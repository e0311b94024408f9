//! Figures: a display list built from the artifacts, written as SVG and as a PNG raster.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use image::{Rgb, RgbImage};

use super::pipeline::Artifacts;
use super::{io_err, ReportError};
use crate::lattice::{Lattice, Point};
use crate::tree::{short_hair_subtree, RootMode};
use crate::wheel::dual_tree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    BallHeatmap,
    Geodesics,
    Tree,
    DualTree,
    WheelPath,
    ShortHairSubtree,
}

impl Layer {
    pub const ALL: [Layer; 6] = [
        Layer::BallHeatmap,
        Layer::Geodesics,
        Layer::Tree,
        Layer::DualTree,
        Layer::WheelPath,
        Layer::ShortHairSubtree,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::BallHeatmap => "ball-heatmap",
            Layer::Geodesics => "geodesics",
            Layer::Tree => "tree",
            Layer::DualTree => "dual-tree",
            Layer::WheelPath => "wheel-path",
            Layer::ShortHairSubtree => "short-hair-subtree",
        }
    }
}

impl FromStr for Layer {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Layer::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| ReportError::Config(format!("unknown layer `{s}`")))
    }
}

const SIZE: u32 = 800;
const MARGIN: f64 = 24.0;

type Rgb8 = [u8; 3];

#[derive(Clone, Debug)]
enum Shape {
    Rect { x: f64, y: f64, w: f64, h: f64, fill: Rgb8 },
    Line { a: (f64, f64), b: (f64, f64), stroke: Rgb8, width: f64, class: &'static str },
    Polyline { points: Vec<(f64, f64)>, stroke: Rgb8, width: f64, class: &'static str },
    Circle { c: (f64, f64), r: f64, fill: Rgb8, class: &'static str },
}

struct Group {
    layer: Layer,
    shapes: Vec<Shape>,
}

fn to_px(p: Point) -> (f64, f64) {
    let span = SIZE as f64 - 2.0 * MARGIN;
    (MARGIN + p.x * span, MARGIN + (1.0 - p.y) * span)
}

/// Palette index in `0..=255` per distance; nondecreasing in the distance.
pub fn heatmap_indices(dist: &[f64]) -> Vec<u8> {
    let finite = dist.iter().copied().filter(|d| d.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    dist.iter()
        .map(|&d| {
            if !d.is_finite() {
                255
            } else if range > 0.0 {
                (((d - lo) / range) * 255.0).floor().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        })
        .collect()
}

/// Dark blue through teal to yellow, linear between five anchors.
fn palette(i: u8) -> Rgb8 {
    const ANCHORS: [Rgb8; 5] = [
        [68, 1, 84],
        [59, 82, 139],
        [33, 145, 140],
        [94, 201, 98],
        [253, 231, 37],
    ];
    let t = i as f64 / 255.0 * 4.0;
    let k = (t.floor() as usize).min(3);
    let f = t - k as f64;
    let (a, b) = (ANCHORS[k], ANCHORS[k + 1]);
    let mix = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * f).round() as u8;
    [mix(a[0], b[0]), mix(a[1], b[1]), mix(a[2], b[2])]
}

fn missing(layer: Layer, stage: &str) -> ReportError {
    ReportError::Dependency {
        layer: layer.as_str().into(),
        stage: stage.into(),
    }
}

fn offset_point(p: Point, dir: (i64, i64), len: f64) -> Point {
    Point::new(p.x + dir.1 as f64 * len, p.y + dir.0 as f64 * len)
}

fn build_layer(art: &Artifacts, layer: Layer) -> Result<Group, ReportError> {
    let mut shapes = Vec::new();
    match layer {
        Layer::BallHeatmap => {
            let m = art.metric.as_ref().ok_or_else(|| missing(layer, "metric"))?;
            let lat = m.lattice();
            let center = lat.vertex(lat.n() / 2, lat.n() / 2);
            let dist = m.distances_from(center)?;
            let idx = heatmap_indices(&dist);
            let cell = (SIZE as f64 - 2.0 * MARGIN) / lat.n() as f64;
            for v in 0..lat.num_vertices() {
                let (x, y) = to_px(lat.position(v));
                shapes.push(Shape::Rect {
                    x: x - cell / 2.0,
                    y: y - cell / 2.0,
                    w: cell,
                    h: cell,
                    fill: palette(idx[v]),
                });
            }
        }
        Layer::Geodesics => {
            let m = art.metric.as_ref().ok_or_else(|| missing(layer, "metric"))?;
            let lat = m.lattice();
            let n = lat.n();
            let center = lat.vertex(n / 2, n / 2);
            let mut targets = Vec::new();
            for r in [0, n / 2, n] {
                for c in [0, n / 2, n] {
                    let t = lat.vertex(r, c);
                    if t != center {
                        targets.push(t);
                    }
                }
            }
            for t in targets {
                let g = m.geodesic(center, t)?;
                shapes.push(Shape::Polyline {
                    points: g.vertices.iter().map(|&v| to_px(lat.position(v))).collect(),
                    stroke: [255, 255, 255],
                    width: 2.0,
                    class: "geodesic",
                });
            }
        }
        Layer::Tree => {
            let tree = art.tree.as_ref().ok_or_else(|| missing(layer, "tree"))?;
            let lat = tree.lattice().ok_or_else(|| missing(layer, "tree"))?;
            let tick = 0.35 / lat.n() as f64;
            for v in 0..lat.num_vertices() {
                let Some(p) = tree.parent(v) else { continue };
                let pv = lat.position(v);
                match tree.position(p) {
                    Some(pp) => shapes.push(Shape::Line {
                        a: to_px(pv),
                        b: to_px(pp),
                        stroke: [20, 20, 20],
                        width: 1.5,
                        class: "tree-edge",
                    }),
                    None => {
                        let dir = lat.outward(v).map(|d| d.offset()).unwrap_or((0, 0));
                        shapes.push(Shape::Line {
                            a: to_px(pv),
                            b: to_px(offset_point(pv, dir, tick)),
                            stroke: [20, 20, 20],
                            width: 1.5,
                            class: "root-mark",
                        });
                    }
                }
            }
            if let Some(RootMode::Point(z)) = tree.root_mode() {
                shapes.push(Shape::Circle {
                    c: to_px(lat.position(z)),
                    r: 4.0,
                    fill: [200, 30, 30],
                    class: "root",
                });
            }
        }
        Layer::DualTree => {
            let tree = art.tree.as_ref().ok_or_else(|| missing(layer, "tree"))?;
            let lat = tree.lattice().ok_or_else(|| missing(layer, "tree"))?;
            let dual = dual_tree(tree)?;
            for e in &dual.edges {
                let inner = |f: usize| f < lat.num_cells();
                if inner(e.a) && inner(e.b) {
                    shapes.push(Shape::Line {
                        a: to_px(lat.cell_center(e.a)),
                        b: to_px(lat.cell_center(e.b)),
                        stroke: [200, 40, 40],
                        width: 1.0,
                        class: "dual-edge",
                    });
                } else {
                    let cell = if inner(e.a) { e.a } else { e.b };
                    shapes.push(outer_tick(&lat, cell, e.primal));
                }
            }
        }
        Layer::WheelPath => {
            let curve = art.curve.as_ref().ok_or_else(|| missing(layer, "wheel"))?;
            let lat = curve.lattice().ok_or_else(|| missing(layer, "wheel"))?;
            shapes.push(Shape::Polyline {
                points: curve.cells().iter().map(|&c| to_px(lat.cell_center(c))).collect(),
                stroke: [30, 90, 220],
                width: 1.2,
                class: "wheel-path",
            });
        }
        Layer::ShortHairSubtree => {
            let tree = art.tree.as_ref().ok_or_else(|| missing(layer, "tree"))?;
            let eps = art
                .config
                .eps
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            if !eps.is_finite() {
                return Err(ReportError::Config("short-hair layer needs an eps".into()));
            }
            let sub = short_hair_subtree(tree, eps)?;
            for v in sub.vertices() {
                let (Some(p), Some(pv)) = (tree.parent(v), tree.position(v)) else { continue };
                if let Some(pp) = tree.position(p) {
                    shapes.push(Shape::Line {
                        a: to_px(pv),
                        b: to_px(pp),
                        stroke: [230, 120, 0],
                        width: 2.5,
                        class: "short-hair",
                    });
                }
            }
        }
    }
    Ok(Group { layer, shapes })
}

/// Short stroke from a boundary cell out across its boundary edge.
fn outer_tick(lat: &Lattice, cell: usize, primal: usize) -> Shape {
    let (u, v) = lat.edge_endpoints(primal);
    let (pu, pv) = (lat.position(u), lat.position(v));
    let mid = Point::new((pu.x + pv.x) / 2.0, (pu.y + pv.y) / 2.0);
    let c = lat.cell_center(cell);
    let end = Point::new(mid.x + (mid.x - c.x) * 0.5, mid.y + (mid.y - c.y) * 0.5);
    Shape::Line {
        a: to_px(c),
        b: to_px(end),
        stroke: [200, 40, 40],
        width: 1.0,
        class: "outer-mark",
    }
}

fn build(art: &Artifacts, layers: &[Layer]) -> Result<Vec<Group>, ReportError> {
    if layers.is_empty() {
        return Err(ReportError::Config("no layers requested".into()));
    }
    let mut wanted = layers.to_vec();
    wanted.sort();
    wanted.dedup();
    wanted.into_iter().map(|l| build_layer(art, l)).collect()
}

fn hex(c: Rgb8) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn svg_of(groups: &[Group]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(out, "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"#ffffff\"/>");
    for g in groups {
        let _ = writeln!(out, "<g class=\"layer-{}\">", g.layer.as_str());
        for s in &g.shapes {
            match s {
                Shape::Rect { x, y, w, h, fill } => {
                    let _ = writeln!(
                        out,
                        "<rect x=\"{x:.3}\" y=\"{y:.3}\" width=\"{w:.3}\" height=\"{h:.3}\" fill=\"{}\"/>",
                        hex(*fill)
                    );
                }
                Shape::Line { a, b, stroke, width, class } => {
                    let _ = writeln!(
                        out,
                        "<line class=\"{class}\" x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"{}\" stroke-width=\"{width:.3}\"/>",
                        a.0, a.1, b.0, b.1, hex(*stroke)
                    );
                }
                Shape::Polyline { points, stroke, width, class } => {
                    let pts: Vec<String> = points.iter().map(|p| format!("{:.3},{:.3}", p.0, p.1)).collect();
                    let _ = writeln!(
                        out,
                        "<polyline class=\"{class}\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{width:.3}\"/>",
                        pts.join(" "),
                        hex(*stroke)
                    );
                }
                Shape::Circle { c, r, fill, class } => {
                    let _ = writeln!(
                        out,
                        "<circle class=\"{class}\" cx=\"{:.3}\" cy=\"{:.3}\" r=\"{r:.3}\" fill=\"{}\"/>",
                        c.0, c.1, hex(*fill)
                    );
                }
            }
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

fn put(img: &mut RgbImage, x: i64, y: i64, c: Rgb8) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, Rgb(c));
    }
}

fn stamp(img: &mut RgbImage, x: f64, y: f64, width: f64, c: Rgb8) {
    let r = (width / 2.0).max(0.5);
    for yy in (y - r).floor() as i64..=(y + r).ceil() as i64 {
        for xx in (x - r).floor() as i64..=(x + r).ceil() as i64 {
            let (dx, dy) = (xx as f64 + 0.5 - x, yy as f64 + 0.5 - y);
            if dx.abs() <= r && dy.abs() <= r {
                put(img, xx, yy, c);
            }
        }
    }
}

fn segment(img: &mut RgbImage, a: (f64, f64), b: (f64, f64), width: f64, c: Rgb8) {
    let steps = ((b.0 - a.0).abs().max((b.1 - a.1).abs()) * 2.0).ceil().max(1.0) as usize;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        stamp(img, a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t, width, c);
    }
}

fn raster_of(groups: &[Group]) -> RgbImage {
    let mut img = RgbImage::from_pixel(SIZE, SIZE, Rgb([255, 255, 255]));
    for g in groups {
        for s in &g.shapes {
            match s {
                Shape::Rect { x, y, w, h, fill } => {
                    for yy in y.round() as i64..(y + h).round() as i64 {
                        for xx in x.round() as i64..(x + w).round() as i64 {
                            put(&mut img, xx, yy, *fill);
                        }
                    }
                }
                Shape::Line { a, b, stroke, width, .. } => segment(&mut img, *a, *b, *width, *stroke),
                Shape::Polyline { points, stroke, width, .. } => {
                    for w in points.windows(2) {
                        segment(&mut img, w[0], w[1], *width, *stroke);
                    }
                }
                Shape::Circle { c, r, fill, .. } => {
                    for yy in (c.1 - r).floor() as i64..=(c.1 + r).ceil() as i64 {
                        for xx in (c.0 - r).floor() as i64..=(c.0 + r).ceil() as i64 {
                            let (dx, dy) = (xx as f64 + 0.5 - c.0, yy as f64 + 0.5 - c.1);
                            if dx * dx + dy * dy <= r * r {
                                put(&mut img, xx, yy, *fill);
                            }
                        }
                    }
                }
            }
        }
    }
    img
}

/// SVG text for the requested layers, drawn in a fixed order.
pub fn render_svg(art: &Artifacts, layers: &[Layer]) -> Result<String, ReportError> {
    Ok(svg_of(&build(art, layers)?))
}

/// Write `figure.svg` and `figure.png` into `dir`.
pub fn render(art: &Artifacts, layers: &[Layer], dir: &Path) -> Result<(PathBuf, PathBuf), ReportError> {
    let groups = build(art, layers)?;
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let svg = dir.join("figure.svg");
    std::fs::write(&svg, svg_of(&groups)).map_err(io_err(&svg))?;
    let png = dir.join("figure.png");
    raster_of(&groups)
        .save(&png)
        .map_err(|e| ReportError::Io {
            path: png.clone(),
            source: std::io::Error::other(e.to_string()),
        })?;
    Ok((svg, png))
}
