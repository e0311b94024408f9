//! Curve export: JSON, and a compact little-endian binary layout.
//!
//! Binary layout (all integers `u64` unless noted, all little-endian):
//!
//! ```text
//! magic        8 bytes  "WLCURVE1"
//! flags        u8       bit 0: grid present, bit 1: point-rooted
//! n, root      grid size and point root (0 when unused)
//! vertices     tree vertex count
//! corners      count, then per corner: vertex, incoming, outgoing,
//!              side (u8: 0 left, 1 right), length (f64)
//! piece_start  corners + 1 offsets
//! pieces       count, then per piece: tag (u8: 0 quarter, 1 outer,
//!              2 infinity), a, b
//! cells        count, then per cell: cell, corner, time (f64)
//! positions    only without a grid: count, then per vertex:
//!              present (u8), x (f64), y (f64)
//! ```

use serde::{Deserialize, Serialize};

use super::{Corner, Piece, Side, WheelCurve, WheelError};
use crate::lattice::{Lattice, Point};
use crate::tree::RootMode;

const MAGIC: &[u8; 8] = b"WLCURVE1";
const MAX_GRID: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveGrid {
    pub n: usize,
    pub root_mode: RootMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<CurveGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<Option<Point>>>,
    pub num_vertices: usize,
    pub corners: Vec<Corner>,
    pub piece_start: Vec<usize>,
    pub pieces: Vec<Piece>,
    pub cells: Vec<usize>,
    pub cell_corners: Vec<usize>,
    pub times: Vec<f64>,
}

fn grid_of(g: &CurveGrid) -> Result<Lattice, WheelError> {
    if g.n == 0 || g.n > MAX_GRID {
        return Err(WheelError::Decode(format!("unsupported grid size {}", g.n)));
    }
    Ok(Lattice::new(g.n))
}

impl WheelCurve {
    pub fn to_curve_json(&self) -> CurveJson {
        CurveJson {
            grid: self
                .lattice
                .zip(self.root_mode)
                .map(|(l, m)| CurveGrid { n: l.n(), root_mode: m }),
            positions: self.positions.clone(),
            num_vertices: self.num_vertices,
            corners: self.corners.clone(),
            piece_start: self.piece_start.clone(),
            pieces: self.pieces.clone(),
            cells: self.cells.clone(),
            cell_corners: self.cell_corner.clone(),
            times: self.times.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_curve_json()).expect("curve serializes")
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let put = |out: &mut Vec<u8>, x: usize| out.extend_from_slice(&(x as u64).to_le_bytes());
        out.extend_from_slice(MAGIC);
        let (flags, n, root) = match (self.lattice, self.root_mode) {
            (Some(l), Some(RootMode::Point(z))) => (3u8, l.n(), z),
            (Some(l), _) => (1u8, l.n(), 0),
            _ => (0u8, 0, 0),
        };
        out.push(flags);
        put(&mut out, n);
        put(&mut out, root);
        put(&mut out, self.num_vertices);
        put(&mut out, self.corners.len());
        for c in &self.corners {
            put(&mut out, c.vertex);
            put(&mut out, c.incoming);
            put(&mut out, c.outgoing);
            out.push(match c.side {
                Side::Left => 0,
                Side::Right => 1,
            });
            out.extend_from_slice(&c.length.to_le_bytes());
        }
        for &s in &self.piece_start {
            put(&mut out, s);
        }
        put(&mut out, self.pieces.len());
        for p in &self.pieces {
            let (tag, a, b) = match *p {
                Piece::Quarter { vertex, cell } => (0u8, vertex, cell),
                Piece::Outer { vertex } => (1, vertex, 0),
                Piece::Infinity { from, to } => (2, from, to),
            };
            out.push(tag);
            put(&mut out, a);
            put(&mut out, b);
        }
        put(&mut out, self.cells.len());
        for i in 0..self.cells.len() {
            put(&mut out, self.cells[i]);
            put(&mut out, self.cell_corner[i]);
            out.extend_from_slice(&self.times[i].to_le_bytes());
        }
        if let Some(pos) = &self.positions {
            put(&mut out, pos.len());
            for p in pos {
                out.push(u8::from(p.is_some()));
                let q = p.unwrap_or(Point::new(0.0, 0.0));
                out.extend_from_slice(&q.x.to_le_bytes());
                out.extend_from_slice(&q.y.to_le_bytes());
            }
        }
        out
    }
}

impl TryFrom<CurveJson> for WheelCurve {
    type Error = WheelError;

    fn try_from(j: CurveJson) -> Result<Self, WheelError> {
        let (lattice, root_mode) = match &j.grid {
            Some(g) => (Some(grid_of(g)?), Some(g.root_mode)),
            None => (None, None),
        };
        if let Some(lat) = lattice {
            let expected = lat.num_vertices() + usize::from(root_mode == Some(RootMode::Wired));
            if j.num_vertices != expected {
                return Err(WheelError::Decode("vertex count does not match the grid".into()));
            }
            if j.positions.is_some() {
                return Err(WheelError::Decode("grid curves carry no positions".into()));
            }
        }
        let curve = WheelCurve {
            lattice,
            root_mode,
            positions: j.positions,
            num_vertices: j.num_vertices,
            corners: j.corners,
            piece_start: j.piece_start,
            pieces: j.pieces,
            cells: j.cells,
            cell_corner: j.cell_corners,
            times: j.times,
        };
        curve.validate()?;
        Ok(curve)
    }
}

/// Parse and validate a curve from JSON. Never panics on malformed input.
pub fn parse_curve_json(text: &str) -> Result<WheelCurve, WheelError> {
    let j: CurveJson = serde_json::from_str(text).map_err(|e| WheelError::Decode(e.to_string()))?;
    WheelCurve::try_from(j)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8], WheelError> {
        let end = self
            .pos
            .checked_add(k)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| WheelError::Decode("truncated curve data".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, WheelError> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<usize, WheelError> {
        let b: [u8; 8] = self.take(8)?.try_into().expect("8 bytes");
        usize::try_from(u64::from_le_bytes(b)).map_err(|_| WheelError::Decode("value overflows".into()))
    }

    fn f64(&mut self) -> Result<f64, WheelError> {
        let b: [u8; 8] = self.take(8)?.try_into().expect("8 bytes");
        Ok(f64::from_le_bytes(b))
    }

    /// A record count, bounded by the bytes left so corrupt counts cannot
    /// trigger huge allocations.
    fn count(&mut self, record: usize) -> Result<usize, WheelError> {
        let k = self.u64()?;
        if k.saturating_mul(record) > self.buf.len() - self.pos {
            return Err(WheelError::Decode(format!("count {k} exceeds the data")));
        }
        Ok(k)
    }
}

/// Parse and validate a curve from the binary layout. Never panics on malformed input.
pub fn parse_curve_binary(bytes: &[u8]) -> Result<WheelCurve, WheelError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(WheelError::Decode("bad magic".into()));
    }
    let flags = r.u8()?;
    let n = r.u64()?;
    let root = r.u64()?;
    let num_vertices = r.u64()?;
    let grid = match flags {
        0 => None,
        1 => Some(CurveGrid { n, root_mode: RootMode::Wired }),
        3 => Some(CurveGrid { n, root_mode: RootMode::Point(root) }),
        f => return Err(WheelError::Decode(format!("unknown flags {f}"))),
    };
    let k = r.count(33)?;
    let mut corners = Vec::with_capacity(k);
    for _ in 0..k {
        let vertex = r.u64()?;
        let incoming = r.u64()?;
        let outgoing = r.u64()?;
        let side = match r.u8()? {
            0 => Side::Left,
            1 => Side::Right,
            s => return Err(WheelError::Decode(format!("unknown side {s}"))),
        };
        let length = r.f64()?;
        corners.push(Corner {
            vertex,
            incoming,
            outgoing,
            side,
            length,
        });
    }
    let mut piece_start = Vec::with_capacity(k + 1);
    for _ in 0..=k {
        piece_start.push(r.u64()?);
    }
    let np = r.count(17)?;
    let mut pieces = Vec::with_capacity(np);
    for _ in 0..np {
        let tag = r.u8()?;
        let a = r.u64()?;
        let b = r.u64()?;
        pieces.push(match tag {
            0 => Piece::Quarter { vertex: a, cell: b },
            1 => Piece::Outer { vertex: a },
            2 => Piece::Infinity { from: a, to: b },
            t => return Err(WheelError::Decode(format!("unknown piece tag {t}"))),
        });
    }
    let nc = r.count(24)?;
    let mut cells = Vec::with_capacity(nc);
    let mut cell_corners = Vec::with_capacity(nc);
    let mut times = Vec::with_capacity(nc);
    for _ in 0..nc {
        cells.push(r.u64()?);
        cell_corners.push(r.u64()?);
        times.push(r.f64()?);
    }
    let positions = if grid.is_none() {
        let m = r.count(17)?;
        let mut pos = Vec::with_capacity(m);
        for _ in 0..m {
            let present = r.u8()?;
            let (x, y) = (r.f64()?, r.f64()?);
            pos.push(match present {
                0 => None,
                1 => Some(Point::new(x, y)),
                _ => return Err(WheelError::Decode("bad position flag".into())),
            });
        }
        Some(pos)
    } else {
        None
    };
    if r.pos != bytes.len() {
        return Err(WheelError::Decode("trailing bytes".into()));
    }
    WheelCurve::try_from(CurveJson {
        grid,
        positions,
        num_vertices,
        corners,
        piece_start,
        pieces,
        cells,
        cell_corners,
        times,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridField;
    use crate::metric::build_metric;
    use crate::tree::{build_geodesic_tree, plane_trees};
    use crate::wheel::contour_exploration;

    #[test]
    fn round_trips() {
        let m = build_metric(&GridField::zeros(4).unwrap(), 0.5, 1e-9).unwrap();
        for mode in [RootMode::Wired, RootMode::Point(6)] {
            let t = build_geodesic_tree(&m, mode).unwrap();
            let c = contour_exploration(&t, None).unwrap();
            assert_eq!(parse_curve_json(&c.to_json()).unwrap(), c);
            assert_eq!(parse_curve_binary(&c.to_binary()).unwrap(), c);
        }
        let c = contour_exploration(&plane_trees(4)[3], None).unwrap();
        assert_eq!(parse_curve_json(&c.to_json()).unwrap(), c);
        assert_eq!(parse_curve_binary(&c.to_binary()).unwrap(), c);
    }

    #[test]
    fn rejects_corruption() {
        let m = build_metric(&GridField::zeros(3).unwrap(), 0.5, 1e-9).unwrap();
        let t = build_geodesic_tree(&m, RootMode::Wired).unwrap();
        let c = contour_exploration(&t, None).unwrap();
        let bytes = c.to_binary();
        assert!(parse_curve_binary(&bytes[..bytes.len() - 1]).is_err());
        let mut flipped = bytes.clone();
        flipped[10] ^= 0xff;
        assert!(parse_curve_binary(&flipped).is_err());
        assert!(parse_curve_binary(b"").is_err());
        assert!(parse_curve_json("{\"num_vertices\":3}").is_err());
    }
}
