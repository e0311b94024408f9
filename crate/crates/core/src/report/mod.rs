//! Run configuration, the end-to-end pipeline, canonical JSON reports and figures.

mod canonical;
mod pipeline;
mod render;

pub use canonical::{canonical_json, parse_report};
pub use pipeline::{
    run_pipeline, run_stages, stages_from_field, Artifacts, Block, RunOutcome, RunReport, Summary,
    BLOCK_NAMES,
};
pub use render::{heatmap_indices, render, render_svg, Layer};

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, FieldMode};
use crate::metric::{default_xi, MetricError, MAX_TIE_EPS};
use crate::tree::{RootMode, TreeError};
use crate::wheel::WheelError;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("field: {0}")]
    Field(#[from] FieldError),
    #[error("metric: {0}")]
    Metric(#[from] MetricError),
    #[error("tree: {0}")]
    Tree(#[from] TreeError),
    #[error("wheel: {0}")]
    Wheel(#[from] WheelError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("layer `{layer}` needs the {stage} stage, which was not computed")]
    Dependency { layer: String, stage: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Which check blocks to run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckToggles {
    pub field_covariance: bool,
    pub metric_axioms: bool,
    pub tree_axioms: bool,
    pub confluence: bool,
    pub short_hair: bool,
    pub wheel_invariants: bool,
    pub disk_checks: bool,
    pub order_theorem: bool,
    pub area_quantization: bool,
}

impl Default for CheckToggles {
    fn default() -> Self {
        Self::all(true)
    }
}

impl CheckToggles {
    pub fn all(on: bool) -> Self {
        Self {
            field_covariance: on,
            metric_axioms: on,
            tree_axioms: on,
            confluence: on,
            short_hair: on,
            wheel_invariants: on,
            disk_checks: on,
            order_theorem: on,
            area_quantization: on,
        }
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        Some(match name {
            "field_covariance" => self.field_covariance,
            "metric_axioms" => self.metric_axioms,
            "tree_axioms" => self.tree_axioms,
            "confluence" => self.confluence,
            "short_hair" => self.short_hair,
            "wheel_invariants" => self.wheel_invariants,
            "disk_checks" => self.disk_checks,
            "order_theorem" => self.order_theorem,
            "area_quantization" => self.area_quantization,
            _ => return None,
        })
    }

    /// Enable exactly one block.
    pub fn only(name: &str) -> Option<Self> {
        let mut t = Self::all(false);
        let slot = match name {
            "field_covariance" => &mut t.field_covariance,
            "metric_axioms" => &mut t.metric_axioms,
            "tree_axioms" => &mut t.tree_axioms,
            "confluence" => &mut t.confluence,
            "short_hair" => &mut t.short_hair,
            "wheel_invariants" => &mut t.wheel_invariants,
            "disk_checks" => &mut t.disk_checks,
            "order_theorem" => &mut t.order_theorem,
            "area_quantization" => &mut t.area_quantization,
            _ => return None,
        };
        *slot = true;
        Some(t)
    }
}

/// Sample sizes for the randomized checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleSizes {
    pub covariance_n: usize,
    pub covariance_samples: usize,
    pub metric_triples: usize,
    pub cut_point_removals: usize,
    pub hairy_paths: usize,
    pub disk_intervals: usize,
    pub order_pairs: usize,
    pub area_pairs: usize,
}

impl Default for SampleSizes {
    fn default() -> Self {
        Self {
            covariance_n: 4,
            covariance_samples: 100_000,
            metric_triples: 100,
            cut_point_removals: 100,
            hairy_paths: 50,
            disk_intervals: 200,
            order_pairs: 1000,
            area_pairs: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Cells per side.
    pub n: usize,
    pub seed: u64,
    pub gamma: f64,
    /// LFPP exponent; `None` means `gamma / d_gamma`.
    pub xi: Option<f64>,
    pub tie_eps: f64,
    pub field_mode: FieldMode,
    pub root_mode: RootMode,
    /// Short-hair scales (Euclidean, unit square).
    pub eps: Vec<f64>,
    /// Crossing-set radii `(t, s)` as fractions of the largest distance from the center.
    pub radius_pairs: Vec<(f64, f64)>,
    pub checks: CheckToggles,
    pub samples: SampleSizes,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 64,
            seed: 1,
            gamma: 1.0,
            xi: None,
            tie_eps: 1e-9,
            field_mode: FieldMode::ZeroBoundary,
            root_mode: RootMode::Wired,
            eps: vec![0.4, 0.2, 0.1],
            radius_pairs: vec![(0.3, 0.6), (0.2, 0.5)],
            checks: CheckToggles::default(),
            samples: SampleSizes::default(),
            out: PathBuf::from("wheel-lab-out"),
        }
    }
}

impl RunConfig {
    pub fn effective_xi(&self) -> f64 {
        self.xi.unwrap_or_else(|| default_xi(self.gamma))
    }

    /// Range checks that do not need the pipeline; grid-size errors come from the field module.
    pub fn validate(&self) -> Result<(), ReportError> {
        let bad = |m: String| Err(ReportError::Config(m));
        if !(self.gamma > 0.0 && self.gamma < 2.0) {
            return bad(format!("gamma must lie in (0, 2), got {}", self.gamma));
        }
        if let Some(xi) = self.xi {
            if !(xi > 0.0 && xi.is_finite()) {
                return bad(format!("xi must be positive, got {xi}"));
            }
        }
        if !(self.tie_eps >= 0.0 && self.tie_eps < MAX_TIE_EPS) {
            return bad(format!("tie_eps must lie in [0, {MAX_TIE_EPS}), got {}", self.tie_eps));
        }
        if self.eps.iter().any(|&e| !(e > 0.0 && e <= std::f64::consts::SQRT_2)) {
            return bad("every eps must lie in (0, sqrt 2]".into());
        }
        if self
            .radius_pairs
            .iter()
            .any(|&(t, s)| !(t > 0.0 && s > t && s <= 1.0))
        {
            return bad("radius pairs need 0 < t < s <= 1".into());
        }
        if let RootMode::Point(z) = self.root_mode {
            let side = self.n + 1;
            if z >= side * side {
                return bad(format!("point root {z} is off the {side}x{side} lattice"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("config serializes");
        canonical_json(&v)
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        serde_json::from_str(text).map_err(|e| ReportError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ReportError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text)
    }
}

/// Write the canonical report and, separately, the wall-clock timings.
pub fn emit_report(outcome: &RunOutcome, dir: &Path) -> Result<PathBuf, ReportError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join("report.json");
    std::fs::write(&path, outcome.report.to_canonical_json()).map_err(io_err(&path))?;
    let tpath = dir.join("timings.json");
    let timings = serde_json::to_value(&outcome.timings).expect("timings serialize");
    std::fs::write(&tpath, canonical_json(&timings)).map_err(io_err(&tpath))?;
    Ok(path)
}

/// Write the report plus the field, tree and curve exports produced by a run.
pub fn write_artifacts(outcome: &RunOutcome, dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    let mut written = vec![emit_report(outcome, dir)?, dir.join("timings.json")];
    let art = &outcome.artifacts;
    let mut put = |name: &str, body: String| -> Result<(), ReportError> {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(io_err(&path))?;
        written.push(path);
        Ok(())
    };
    if let Some(f) = &art.field {
        put("field.json", serde_json::to_string_pretty(&f.header()).expect("header serializes"))?;
        put("field.csv", f.to_csv())?;
    }
    if let Some(t) = &art.tree {
        put("tree.json", t.to_json())?;
    }
    if let Some(c) = &art.curve {
        put("curve.json", c.to_json())?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_defaults() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
        let partial = RunConfig::from_json(r#"{"n": 16, "root_mode": {"point": 5}}"#).unwrap();
        assert_eq!(partial.n, 16);
        assert_eq!(partial.root_mode, RootMode::Point(5));
        assert_eq!(partial.seed, 1);
        assert!(RunConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn validation() {
        let mut c = RunConfig::default();
        c.validate().unwrap();
        c.gamma = 2.0;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.eps = vec![0.0];
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.radius_pairs = vec![(0.5, 0.5)];
        assert!(c.validate().is_err());
    }

    #[test]
    fn toggles_only() {
        let t = CheckToggles::only("disk_checks").unwrap();
        for name in BLOCK_NAMES {
            assert_eq!(t.get(name), Some(name == "disk_checks"));
        }
        assert!(CheckToggles::only("nope").is_none());
    }
}
