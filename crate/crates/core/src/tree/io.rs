//! JSON form of a planar tree.

use serde::{Deserialize, Serialize};

use super::{PlanarTree, RootMode, TreeError};
use crate::lattice::{Lattice, Point};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeLatticeJson {
    pub n: usize,
    pub root_mode: RootMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeJson {
    pub root: usize,
    pub parents: Vec<Option<usize>>,
    /// Children of each vertex, in clockwise order.
    pub children_cw: Vec<Vec<usize>>,
    pub dist: Vec<f64>,
    pub edge_len: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<TreeLatticeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<Option<Point>>>,
}

impl PlanarTree {
    pub fn to_tree_json(&self) -> TreeJson {
        let (positions, root, parent, children, dist, edge_len) = self.raw_parts();
        let lattice = self.lattice().zip(self.root_mode()).map(|(l, m)| TreeLatticeJson {
            n: l.n(),
            root_mode: m,
        });
        TreeJson {
            root,
            parents: parent.to_vec(),
            children_cw: children.to_vec(),
            dist: dist.to_vec(),
            edge_len: edge_len.to_vec(),
            positions: if lattice.is_some() {
                None
            } else {
                Some(positions.to_vec())
            },
            lattice,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_tree_json()).expect("tree serializes")
    }
}

impl TryFrom<TreeJson> for PlanarTree {
    type Error = TreeError;

    fn try_from(j: TreeJson) -> Result<Self, TreeError> {
        let len = j.parents.len();
        let positions = match (&j.lattice, j.positions) {
            (Some(l), _) => {
                if l.n == 0 || l.n > 4096 {
                    return Err(TreeError::Input(format!("unsupported lattice size {}", l.n)));
                }
                let lat = Lattice::new(l.n);
                let mut p: Vec<Option<Point>> =
                    (0..lat.num_vertices()).map(|v| Some(lat.position(v))).collect();
                if l.root_mode == RootMode::Wired {
                    p.push(None);
                }
                if p.len() != len {
                    return Err(TreeError::Input(format!(
                        "lattice n={} needs {} vertices, got {len}",
                        l.n,
                        p.len()
                    )));
                }
                p
            }
            (None, Some(p)) => p,
            (None, None) => vec![None; len],
        };
        let tree =
            PlanarTree::from_parts(positions, j.root, j.parents, j.children_cw, j.dist, j.edge_len)?;
        match j.lattice {
            Some(l) => tree.with_lattice(Lattice::new(l.n), l.root_mode),
            None => Ok(tree),
        }
    }
}

/// Parse and validate a tree from JSON. Never panics on malformed input.
pub fn parse_tree_json(text: &str) -> Result<PlanarTree, TreeError> {
    let j: TreeJson = serde_json::from_str(text).map_err(|e| TreeError::Input(e.to_string()))?;
    PlanarTree::try_from(j)
}
