//! Discrete Gaussian free field samples and the LQG area measure.
//!
//! Two finite regularizations are supported:
//!
//! * [`FieldMode::ZeroBoundary`]: field on the `(n+1)²` lattice vertices,
//!   exactly zero on the boundary, sampled in the Dirichlet eigenbasis with a
//!   2-D type-I discrete sine transform.
//! * [`FieldMode::Torus`]: field on the `n²` vertices of the discrete torus,
//!   sampled by Fourier synthesis with the constant mode removed.
//!
//! In both modes the covariance is `2π · L⁻¹` where `L = 4I − A` is the grid
//! Laplacian (pseudo-inverse on the torus). The `2π` makes the variance grow
//! like `log n`, the normalization under which `γ ∈ (0, 2)` is the
//! subcritical range.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::Lattice;
use crate::rng::{keyed_rng, FIELD_DOMAIN};

/// Largest side length for which the dense covariance oracle is built.
pub const MAX_ORACLE_N: usize = 32;
/// Smallest sample count accepted by [`covariance_report`].
pub const MIN_COVARIANCE_SAMPLES: usize = 1000;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("invalid grid size n={n}: need n >= {min}")]
    InvalidSize { n: usize, min: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("dense covariance oracle infeasible for n={n} (max {MAX_ORACLE_N})")]
    OracleInfeasible { n: usize },
    #[error("malformed field data: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldMode {
    ZeroBoundary,
    Torus,
}

impl FieldMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldMode::ZeroBoundary => "zero-boundary",
            FieldMode::Torus => "torus",
        }
    }

    fn tag(self) -> u64 {
        match self {
            FieldMode::ZeroBoundary => 1,
            FieldMode::Torus => 2,
        }
    }
}

impl fmt::Display for FieldMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldMode {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero-boundary" => Ok(FieldMode::ZeroBoundary),
            "torus" => Ok(FieldMode::Torus),
            other => Err(FieldError::Config(format!("unknown field mode `{other}`"))),
        }
    }
}

/// Where a field's values came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldSource {
    Sampled { seed: u64, mode: FieldMode },
    /// Hand-built values on the `(n+1)²` lattice (fixtures, oracles).
    Explicit,
}

/// A field height per lattice vertex. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    n: usize,
    spacing: f64,
    source: FieldSource,
    values: Vec<f64>,
}

impl GridField {
    /// A hand-built field on the `(n+1) × (n+1)` vertex lattice, row-major.
    pub fn explicit(n: usize, values: Vec<f64>) -> Result<Self, FieldError> {
        if n < 1 {
            return Err(FieldError::InvalidSize { n, min: 1 });
        }
        let expected = (n + 1) * (n + 1);
        if values.len() != expected {
            return Err(FieldError::Parameter(format!(
                "expected {expected} vertex values for n={n}, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FieldError::Parameter("field values must be finite".into()));
        }
        Ok(Self {
            n,
            spacing: 1.0 / n as f64,
            source: FieldSource::Explicit,
            values,
        })
    }

    pub fn zeros(n: usize) -> Result<Self, FieldError> {
        Self::explicit(n, vec![0.0; (n + 1) * (n + 1)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn source(&self) -> FieldSource {
        self.source
    }

    pub fn seed(&self) -> Option<u64> {
        match self.source {
            FieldSource::Sampled { seed, .. } => Some(seed),
            FieldSource::Explicit => None,
        }
    }

    pub fn mode(&self) -> Option<FieldMode> {
        match self.source {
            FieldSource::Sampled { mode, .. } => Some(mode),
            FieldSource::Explicit => None,
        }
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.n)
    }

    /// Stored values, row-major; `value_side()` per row.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of stored values per row: `n` on the torus, `n + 1` otherwise.
    pub fn value_side(&self) -> usize {
        match self.mode() {
            Some(FieldMode::Torus) => self.n,
            _ => self.n + 1,
        }
    }

    /// Height at lattice vertex `(row, col)`, `0 ≤ row, col ≤ n`. The torus
    /// field is extended periodically to the planar lattice.
    pub fn vertex_value(&self, row: usize, col: usize) -> f64 {
        let side = self.value_side();
        self.values[(row % side) * side + (col % side)]
    }

    /// Mean of the four corner heights of a cell.
    pub fn cell_height(&self, cell: usize) -> f64 {
        let (r, c) = (cell / self.n, cell % self.n);
        (self.vertex_value(r, c)
            + self.vertex_value(r, c + 1)
            + self.vertex_value(r + 1, c)
            + self.vertex_value(r + 1, c + 1))
            / 4.0
    }
}

/// Reusable sampler for one `(n, mode)` pair; holds FFT plans and spectral weights.
pub struct FieldSampler {
    n: usize,
    mode: FieldMode,
    fft: Arc<dyn Fft<f64>>,
    inverse: Option<Arc<dyn Fft<f64>>>,
    /// Per-mode standard deviation, row-major over the spectral index grid.
    weights: Vec<f64>,
}

impl FieldSampler {
    pub fn new(n: usize, mode: FieldMode) -> Result<Self, FieldError> {
        if n < 2 {
            return Err(FieldError::InvalidSize { n, min: 2 });
        }
        let mut planner = FftPlanner::<f64>::new();
        match mode {
            FieldMode::ZeroBoundary => {
                let m = n - 1;
                let mut weights = Vec::with_capacity(m * m);
                for k in 1..=m {
                    for l in 1..=m {
                        let lambda = 4.0
                            - 2.0 * (PI * k as f64 / n as f64).cos()
                            - 2.0 * (PI * l as f64 / n as f64).cos();
                        // eigenvectors are (2/n) sin(πki/n) sin(πlj/n)
                        weights.push((2.0 * PI / lambda).sqrt() * 2.0 / n as f64);
                    }
                }
                Ok(Self {
                    n,
                    mode,
                    fft: planner.plan_fft_forward(2 * n),
                    inverse: None,
                    weights,
                })
            }
            FieldMode::Torus => {
                let mut weights = Vec::with_capacity(n * n);
                for k in 0..n {
                    for l in 0..n {
                        let lambda = 4.0
                            - 2.0 * (2.0 * PI * k as f64 / n as f64).cos()
                            - 2.0 * (2.0 * PI * l as f64 / n as f64).cos();
                        let w = if k == 0 && l == 0 {
                            0.0
                        } else {
                            (2.0 * PI / lambda).sqrt()
                        };
                        weights.push(w);
                    }
                }
                Ok(Self {
                    n,
                    mode,
                    fft: planner.plan_fft_forward(n),
                    inverse: Some(planner.plan_fft_inverse(n)),
                    weights,
                })
            }
        }
    }

    /// Sample number `stream` of the ensemble keyed by `seed`.
    pub fn sample(&self, seed: u64, stream: u64) -> GridField {
        let mut rng = keyed_rng(seed, FIELD_DOMAIN, self.mode.tag(), self.n as u64, stream);
        let values = match self.mode {
            FieldMode::ZeroBoundary => self.sample_dirichlet(&mut rng),
            FieldMode::Torus => self.sample_torus(&mut rng),
        };
        GridField {
            n: self.n,
            spacing: 1.0 / self.n as f64,
            source: FieldSource::Sampled {
                seed,
                mode: self.mode,
            },
            values,
        }
    }

    fn sample_dirichlet(&self, rng: &mut ChaCha20Rng) -> Vec<f64> {
        let n = self.n;
        let m = n - 1;
        let mut coef: Vec<f64> = self
            .weights
            .iter()
            .map(|w| {
                let z: f64 = StandardNormal.sample(rng);
                w * z
            })
            .collect();
        let mut scratch = vec![Complex64::new(0.0, 0.0); 2 * n];
        // transform along l (columns of the coefficient grid) ...
        for k in 0..m {
            self.dst1(&mut coef[k * m..(k + 1) * m], &mut scratch);
        }
        // ... then along k
        let mut column = vec![0.0; m];
        for j in 0..m {
            for k in 0..m {
                column[k] = coef[k * m + j];
            }
            self.dst1(&mut column, &mut scratch);
            for k in 0..m {
                coef[k * m + j] = column[k];
            }
        }
        let side = n + 1;
        let mut values = vec![0.0; side * side];
        for i in 0..m {
            for j in 0..m {
                values[(i + 1) * side + (j + 1)] = coef[i * m + j];
            }
        }
        values
    }

    /// In-place type-I DST: `y_k = Σ_{j=1}^{n-1} x_j sin(π j k / n)`, via the
    /// odd extension of length `2n`.
    fn dst1(&self, x: &mut [f64], buf: &mut [Complex64]) {
        let n = self.n;
        buf.fill(Complex64::new(0.0, 0.0));
        for (j, &v) in x.iter().enumerate() {
            buf[j + 1] = Complex64::new(v, 0.0);
            buf[2 * n - (j + 1)] = Complex64::new(-v, 0.0);
        }
        self.fft.process(buf);
        for (k, out) in x.iter_mut().enumerate() {
            *out = -buf[k + 1].im / 2.0;
        }
    }

    fn sample_torus(&self, rng: &mut ChaCha20Rng) -> Vec<f64> {
        let n = self.n;
        let mut grid: Vec<Complex64> = (0..n * n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                Complex64::new(z, 0.0)
            })
            .collect();
        fft2(&mut grid, n, &self.fft);
        for (g, w) in grid.iter_mut().zip(&self.weights) {
            *g *= *w;
        }
        let inverse = self.inverse.as_ref().expect("torus sampler has an inverse plan");
        fft2(&mut grid, n, inverse);
        let scale = 1.0 / (n * n) as f64;
        let mut values: Vec<f64> = grid.iter().map(|c| c.re * scale).collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        for v in values.iter_mut() {
            *v -= mean;
        }
        // pin the row-major sequential sum to exactly zero
        let last = values.len() - 1;
        let head: f64 = values[..last].iter().sum();
        values[last] = -head;
        values
    }
}

fn fft2(grid: &mut [Complex64], n: usize, plan: &Arc<dyn Fft<f64>>) {
    for row in grid.chunks_mut(n) {
        plan.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = grid[i * n + j];
        }
        plan.process(&mut col);
        for i in 0..n {
            grid[i * n + j] = col[i];
        }
    }
}

/// Sample a discrete GFF on an `n × n`-cell lattice. Deterministic in `(n, seed, mode)`.
pub fn sample_field(n: usize, seed: u64, mode: FieldMode) -> Result<GridField, FieldError> {
    Ok(FieldSampler::new(n, mode)?.sample(seed, 0))
}

/// Normalized LQG mass per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct AreaMeasure {
    n: usize,
    gamma: f64,
    cell_mass: Vec<f64>,
}

impl AreaMeasure {
    /// Mass proportional to `exp(γ·h_c)` for the given cell heights, normalized to one.
    pub fn from_cell_heights(n: usize, heights: &[f64], gamma: f64) -> Result<Self, FieldError> {
        if !(gamma > 0.0 && gamma < 2.0) {
            return Err(FieldError::Parameter(format!(
                "gamma must lie in (0, 2), got {gamma}"
            )));
        }
        if n < 1 || heights.len() != n * n {
            return Err(FieldError::Parameter(format!(
                "expected {} cell heights, got {}",
                n * n,
                heights.len()
            )));
        }
        // The δ² factor cancels in the normalization; subtracting the maximum
        // keeps the exponentials in range.
        let top = heights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = heights.iter().map(|h| (gamma * (h - top)).exp()).collect();
        let total: f64 = raw.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(FieldError::Parameter("degenerate area measure".into()));
        }
        let cell_mass = raw.into_iter().map(|m| m / total).collect();
        Ok(Self {
            n,
            gamma,
            cell_mass,
        })
    }

    pub fn uniform(n: usize) -> Self {
        let count = n * n;
        Self {
            n,
            gamma: 0.0,
            cell_mass: vec![1.0 / count as f64; count],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn cell_mass(&self) -> &[f64] {
        &self.cell_mass
    }

    pub fn mass(&self, cell: usize) -> f64 {
        self.cell_mass[cell]
    }

    pub fn max_mass(&self) -> f64 {
        self.cell_mass.iter().cloned().fold(0.0, f64::max)
    }
}

/// LQG area measure of a field: `μ(c) ∝ exp(γ·h_c)·δ²`, `h_c` the cell-center height.
pub fn area_measure(field: &GridField, gamma: f64) -> Result<AreaMeasure, FieldError> {
    let n = field.n();
    let heights: Vec<f64> = (0..n * n).map(|c| field.cell_height(c)).collect();
    AreaMeasure::from_cell_heights(n, &heights, gamma)
}

/// Dense covariance oracle: `2π · L⁻¹` assembled by direct matrix inversion.
pub struct GreenOracle {
    n: usize,
    mode: FieldMode,
    matrix: DMatrix<f64>,
}

impl GreenOracle {
    pub fn new(mode: FieldMode, n: usize) -> Result<Self, FieldError> {
        if n < 2 {
            return Err(FieldError::InvalidSize { n, min: 2 });
        }
        if n > MAX_ORACLE_N {
            return Err(FieldError::OracleInfeasible { n });
        }
        let matrix = match mode {
            FieldMode::ZeroBoundary => {
                let m = n - 1;
                let size = m * m;
                let mut lap = DMatrix::<f64>::zeros(size, size);
                for r in 0..m {
                    for c in 0..m {
                        let i = r * m + c;
                        lap[(i, i)] = 4.0;
                        if r > 0 {
                            lap[(i, i - m)] = -1.0;
                        }
                        if r + 1 < m {
                            lap[(i, i + m)] = -1.0;
                        }
                        if c > 0 {
                            lap[(i, i - 1)] = -1.0;
                        }
                        if c + 1 < m {
                            lap[(i, i + 1)] = -1.0;
                        }
                    }
                }
                let inv = lap
                    .try_inverse()
                    .ok_or_else(|| FieldError::Parameter("singular Dirichlet Laplacian".into()))?;
                inv * (2.0 * PI)
            }
            FieldMode::Torus => {
                let size = n * n;
                let shift = 1.0 / size as f64;
                let mut lap = DMatrix::<f64>::from_element(size, size, shift);
                for r in 0..n {
                    for c in 0..n {
                        let i = r * n + c;
                        lap[(i, i)] += 4.0;
                        for (dr, dc) in [(1, 0), (n - 1, 0), (0, 1), (0, n - 1)] {
                            let j = ((r + dr) % n) * n + (c + dc) % n;
                            lap[(i, j)] -= 1.0;
                        }
                    }
                }
                let inv = lap
                    .try_inverse()
                    .ok_or_else(|| FieldError::Parameter("singular torus Laplacian".into()))?;
                // (L + J/N)⁻¹ − J/N is the pseudo-inverse on mean-zero functions
                inv.add_scalar(-shift) * (2.0 * PI)
            }
        };
        Ok(Self { n, mode, matrix })
    }

    fn index(&self, (r, c): (usize, usize)) -> Option<usize> {
        match self.mode {
            FieldMode::ZeroBoundary => {
                if r == 0 || c == 0 || r >= self.n || c >= self.n {
                    None
                } else {
                    Some((r - 1) * (self.n - 1) + (c - 1))
                }
            }
            FieldMode::Torus => Some((r % self.n) * self.n + (c % self.n)),
        }
    }

    /// Covariance between two lattice vertices (zero if either is a Dirichlet boundary vertex).
    pub fn covariance(&self, a: (usize, usize), b: (usize, usize)) -> f64 {
        match (self.index(a), self.index(b)) {
            (Some(i), Some(j)) => self.matrix[(i, j)],
            _ => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovariancePair {
    pub a: (usize, usize),
    pub b: (usize, usize),
    pub empirical: f64,
    pub oracle: f64,
    pub std_error: f64,
    pub z_score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub mode: FieldMode,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub pairs: Vec<CovariancePair>,
    pub max_abs_z: f64,
}

/// The fixed panel of vertex pairs checked by [`covariance_report`].
///
/// For `n = 4` these are the six pairs `(1,1)-(1,1)`, `(1,1)-(1,2)`,
/// `(1,1)-(2,2)`, `(2,2)-(2,2)`, `(1,1)-(3,3)`, `(1,2)-(2,1)`; for other `n`
/// the same pattern is anchored at the lower-left interior vertex and the center.
pub fn covariance_panel(mode: FieldMode, n: usize) -> Vec<((usize, usize), (usize, usize))> {
    let (lo, hi) = match mode {
        FieldMode::ZeroBoundary => (1, n.saturating_sub(1).max(1)),
        FieldMode::Torus => (0, n - 1),
    };
    let clamp = |x: usize| x.clamp(lo, hi);
    let p = |r: usize, c: usize| (clamp(r), clamp(c));
    let mid = n / 2;
    let far = n - 1;
    vec![
        (p(1, 1), p(1, 1)),
        (p(1, 1), p(1, 2)),
        (p(1, 1), p(2, 2)),
        (p(mid, mid), p(mid, mid)),
        (p(1, 1), p(far, far)),
        (p(1, 2), p(2, 1)),
    ]
}

const COVARIANCE_BLOCK: usize = 1000;

/// Empirical covariances on a fixed panel against the dense oracle.
///
/// Samples are evaluated in parallel blocks; sample `k` always uses ChaCha
/// stream `k`, and block sums are combined in block order, so the result
/// does not depend on the thread count.
pub fn covariance_report(
    mode: FieldMode,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<CovarianceReport, FieldError> {
    if n > MAX_ORACLE_N {
        return Err(FieldError::OracleInfeasible { n });
    }
    if samples < MIN_COVARIANCE_SAMPLES {
        return Err(FieldError::Parameter(format!(
            "need at least {MIN_COVARIANCE_SAMPLES} samples, got {samples}"
        )));
    }
    let oracle = GreenOracle::new(mode, n)?;
    let sampler = FieldSampler::new(n, mode)?;
    let panel = covariance_panel(mode, n);
    let blocks = samples.div_ceil(COVARIANCE_BLOCK);
    let partial: Vec<Vec<(f64, f64)>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![(0.0, 0.0); panel.len()];
            let start = b * COVARIANCE_BLOCK;
            let end = (start + COVARIANCE_BLOCK).min(samples);
            for k in start..end {
                let f = sampler.sample(seed, k as u64);
                for (slot, &(a, bb)) in acc.iter_mut().zip(&panel) {
                    let prod = f.vertex_value(a.0, a.1) * f.vertex_value(bb.0, bb.1);
                    slot.0 += prod;
                    slot.1 += prod * prod;
                }
            }
            acc
        })
        .collect();
    let mut sums = vec![(0.0, 0.0); panel.len()];
    for block in &partial {
        for (s, p) in sums.iter_mut().zip(block) {
            s.0 += p.0;
            s.1 += p.1;
        }
    }
    let count = samples as f64;
    let mut pairs = Vec::with_capacity(panel.len());
    let mut max_abs_z: f64 = 0.0;
    for (&(a, b), &(s1, s2)) in panel.iter().zip(&sums) {
        let empirical = s1 / count;
        let var = (s2 / count - empirical * empirical).max(0.0) * count / (count - 1.0);
        let std_error = (var / count).sqrt();
        let oracle_cov = oracle.covariance(a, b);
        let z_score = if std_error > 0.0 {
            (empirical - oracle_cov) / std_error
        } else {
            0.0
        };
        max_abs_z = max_abs_z.max(z_score.abs());
        pairs.push(CovariancePair {
            a,
            b,
            empirical,
            oracle: oracle_cov,
            std_error,
            z_score,
        });
    }
    Ok(CovarianceReport {
        mode,
        n,
        samples,
        seed,
        pairs,
        max_abs_z,
    })
}

/// JSON header accompanying a CSV or binary field export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub n: usize,
    pub seed: Option<u64>,
    pub mode: Option<FieldMode>,
    pub spacing: f64,
}

impl GridField {
    pub fn header(&self) -> FieldHeader {
        FieldHeader {
            n: self.n,
            seed: self.seed(),
            mode: self.mode(),
            spacing: self.spacing,
        }
    }

    /// One line per stored row, comma-separated, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let side = self.value_side();
        let mut out = String::with_capacity(self.values.len() * 25);
        for row in self.values.chunks(side) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Row-major little-endian `f64` values.
    pub fn to_binary(&self) -> Vec<u8> {
        self.values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    fn from_parts(header: &FieldHeader, values: Vec<f64>) -> Result<Self, FieldError> {
        let n = header.n;
        let source = match (header.seed, header.mode) {
            (Some(seed), Some(mode)) => FieldSource::Sampled { seed, mode },
            (None, None) => FieldSource::Explicit,
            _ => {
                return Err(FieldError::Parse(
                    "header must give both seed and mode, or neither".into(),
                ))
            }
        };
        let min = if matches!(source, FieldSource::Sampled { .. }) { 2 } else { 1 };
        if n < min || n > 1 << 14 {
            return Err(FieldError::Parse(format!("unsupported n={n}")));
        }
        if header.spacing != 1.0 / n as f64 {
            return Err(FieldError::Parse("spacing must equal 1/n".into()));
        }
        let side = match source {
            FieldSource::Sampled {
                mode: FieldMode::Torus,
                ..
            } => n,
            _ => n + 1,
        };
        if values.len() != side * side {
            return Err(FieldError::Parse(format!(
                "expected {} values, found {}",
                side * side,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FieldError::Parse("non-finite value".into()));
        }
        let field = Self {
            n,
            spacing: header.spacing,
            source,
            values,
        };
        match field.mode() {
            Some(FieldMode::ZeroBoundary) => {
                let lat = field.lattice();
                let nonzero_boundary = (0..lat.num_vertices())
                    .any(|v| lat.is_boundary(v) && field.values[v] != 0.0);
                if nonzero_boundary {
                    return Err(FieldError::Parse("zero-boundary field has nonzero boundary".into()));
                }
            }
            Some(FieldMode::Torus) => {
                if field.values.iter().sum::<f64>() != 0.0 {
                    return Err(FieldError::Parse("torus field does not sum to zero".into()));
                }
            }
            None => {}
        }
        Ok(field)
    }
}

pub fn parse_field_header(json: &str) -> Result<FieldHeader, FieldError> {
    serde_json::from_str(json).map_err(|e| FieldError::Parse(e.to_string()))
}

/// Parse a CSV export (see [`GridField::to_csv`]) given its header.
pub fn read_field_csv(header: &FieldHeader, csv: &str) -> Result<GridField, FieldError> {
    let mut values = Vec::new();
    let mut width = None;
    for (i, line) in csv.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut count = 0;
        for tok in line.split(',') {
            let v: f64 = tok
                .trim()
                .parse()
                .map_err(|_| FieldError::Parse(format!("line {}: bad number `{tok}`", i + 1)))?;
            values.push(v);
            count += 1;
        }
        match width {
            None => width = Some(count),
            Some(w) if w != count => {
                return Err(FieldError::Parse(format!("line {}: ragged row", i + 1)))
            }
            _ => {}
        }
    }
    GridField::from_parts(header, values)
}

/// Parse a binary export (see [`GridField::to_binary`]) given its header.
pub fn read_field_binary(header: &FieldHeader, bytes: &[u8]) -> Result<GridField, FieldError> {
    if bytes.len() % 8 != 0 {
        return Err(FieldError::Parse("binary length is not a multiple of 8".into()));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    GridField::from_parts(header, values)
}
