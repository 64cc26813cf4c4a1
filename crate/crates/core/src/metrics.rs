//! Beam patterns, EIRP, sidelobe level, SINR and spectral efficiency.

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::beamforming::Precoder;
use crate::channel::ChannelMetadata;
use crate::error::{invalid, Error, Result};
use crate::geometry::{ClusterLayout, ElementPattern};
use crate::linalg::{cis, CMatrix, C64};

/// Floor used when exporting `10·log10` of a zero pattern value.
pub const DB_FLOOR: f64 = -200.0;

#[derive(Debug)]
struct GridData {
    step: f64,
    axis: Vec<f64>,
    /// Per `v` index: the contiguous range of `u` indices inside the disk
    /// and the offset of its first point.
    rows: Vec<(usize, usize, usize)>,
    points: Vec<(f64, f64)>,
}

/// Lattice `(i·Δ, j·Δ)` restricted to the closed unit disk, listed with
/// `v` outermost. Cheap to clone.
#[derive(Debug, Clone)]
pub struct AngularGrid {
    inner: Arc<GridData>,
}

impl AngularGrid {
    pub fn new(step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || step > 1.0 {
            return invalid("angular grid step must be in (0, 1]");
        }
        let n = (1.0 / step + 1e-9).floor() as i64;
        let axis: Vec<f64> = (-n..=n).map(|i| i as f64 * step).collect();
        let mut rows = Vec::with_capacity(axis.len());
        let mut points = Vec::new();
        for &v in &axis {
            let inside: Vec<usize> = (0..axis.len()).filter(|&i| axis[i] * axis[i] + v * v <= 1.0 + 1e-12).collect();
            let (lo, hi) = (inside[0], inside[inside.len() - 1] + 1);
            rows.push((lo, hi, points.len()));
            points.extend(axis[lo..hi].iter().map(|&u| (u, v)));
        }
        Ok(AngularGrid { inner: Arc::new(GridData { step, axis, rows, points }) })
    }

    pub fn step(&self) -> f64 {
        self.inner.step
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.inner.points
    }

    pub fn len(&self) -> usize {
        self.inner.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.points.is_empty()
    }

    pub fn axis(&self) -> &[f64] {
        &self.inner.axis
    }
}

/// `|B(u, v)|²` sampled on an [`AngularGrid`].
#[derive(Debug, Clone)]
pub struct BeamPatternGrid {
    pub grid: AngularGrid,
    pub values: Vec<f64>,
    pub excitation: Vec<C64>,
}

impl BeamPatternGrid {
    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Value at the grid point nearest to `(u, v)`.
    pub fn at(&self, u: f64, v: f64) -> Option<f64> {
        let g = &self.grid;
        let step = g.step();
        let n = (g.axis().len() - 1) / 2;
        let iu = (u / step).round() as i64 + n as i64;
        let iv = (v / step).round() as i64 + n as i64;
        if iu < 0 || iv < 0 || iv as usize >= g.axis().len() {
            return None;
        }
        let (lo, hi, off) = g.inner.rows[iv as usize];
        let iu = iu as usize;
        (lo..hi).contains(&iu).then(|| self.values[off + iu - lo])
    }
}

/// Precomputed phase tables for evaluating many excitations of one layout.
///
/// Phase centers sharing an `x` coordinate are summed first, so each grid
/// point costs one multiply-add per distinct column position.
#[derive(Debug, Clone)]
pub struct PatternEngine {
    grid: AngularGrid,
    feeds: usize,
    /// Distinct-column index of each feed.
    column_of: Vec<usize>,
    /// `exp(i2π u x_c)`, indexed `[u_index * columns + c]`.
    ex: Vec<C64>,
    columns: usize,
    /// `exp(i2π v y_j)`, indexed `[v_index * feeds + j]`.
    ey: Vec<C64>,
    /// Element power gain per point when all feeds share a pattern,
    /// otherwise per point and feed amplitudes.
    elements: Elements,
}

#[derive(Debug, Clone)]
enum Elements {
    Shared(Vec<f64>),
    PerFeed(Vec<f64>),
}

impl PatternEngine {
    pub fn new(layout: &ClusterLayout, patterns: &[ElementPattern], grid: &AngularGrid) -> Result<Self> {
        let centers = layout.phase_centers();
        if patterns.len() != centers.len() {
            return invalid(format!("{} patterns for {} feeds", patterns.len(), centers.len()));
        }
        let tau = 2.0 * std::f64::consts::PI;
        let mut xs: Vec<f64> = centers.iter().map(|c| c.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let column_of: Vec<usize> = centers
            .iter()
            .map(|c| xs.iter().position(|x| (x - c.0).abs() < 1e-9).expect("column present"))
            .collect();
        let axis = grid.axis();
        let mut ex = Vec::with_capacity(axis.len() * xs.len());
        for &u in axis {
            ex.extend(xs.iter().map(|&x| cis(tau * u * x)));
        }
        let mut ey = Vec::with_capacity(axis.len() * centers.len());
        for &v in axis {
            ey.extend(centers.iter().map(|c| cis(tau * v * c.1)));
        }
        let shared = patterns.first().is_some_and(|p0| {
            patterns.iter().all(|p| p.boresight_gain_dbi == p0.boresight_gain_dbi && p.rolloff == p0.rolloff)
        });
        let elements = if shared {
            Elements::Shared(grid.points().iter().map(|&(u, v)| patterns[0].amplitude(u, v).powi(2)).collect())
        } else {
            let mut amp = Vec::with_capacity(grid.len() * patterns.len());
            for &(u, v) in grid.points() {
                amp.extend(patterns.iter().map(|p| p.amplitude(u, v)));
            }
            Elements::PerFeed(amp)
        };
        Ok(PatternEngine { grid: grid.clone(), feeds: centers.len(), column_of, ex, columns: xs.len(), ey, elements })
    }

    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    /// `|B|²` for excitation `a` (one weight per feed).
    pub fn power(&self, a: &[C64]) -> Result<Vec<f64>> {
        if a.len() != self.feeds {
            return invalid(format!("excitation has {} entries for {} feeds", a.len(), self.feeds));
        }
        let mut out = vec![0.0; self.grid.len()];
        let mut col = vec![C64::new(0.0, 0.0); self.columns];
        for (iv, &(lo, hi, off)) in self.grid.inner.rows.iter().enumerate() {
            let ey = &self.ey[iv * self.feeds..(iv + 1) * self.feeds];
            match &self.elements {
                Elements::Shared(gain) => {
                    col.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                    for j in 0..self.feeds {
                        col[self.column_of[j]] += a[j] * ey[j];
                    }
                    for iu in lo..hi {
                        let ex = &self.ex[iu * self.columns..(iu + 1) * self.columns];
                        let b: C64 = col.iter().zip(ex).map(|(c, e)| c * e).sum();
                        let p = off + iu - lo;
                        out[p] = gain[p] * b.norm_sqr();
                    }
                }
                Elements::PerFeed(amp) => {
                    for iu in lo..hi {
                        let p = off + iu - lo;
                        let amp = &amp[p * self.feeds..(p + 1) * self.feeds];
                        let ex = &self.ex[iu * self.columns..(iu + 1) * self.columns];
                        let b: C64 = (0..self.feeds).map(|j| a[j] * ey[j] * ex[self.column_of[j]] * amp[j]).sum();
                        out[p] = b.norm_sqr();
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pattern(&self, a: &[C64]) -> Result<BeamPatternGrid> {
        Ok(BeamPatternGrid { grid: self.grid.clone(), values: self.power(a)?, excitation: a.to_vec() })
    }
}

/// `|B(u,v)|² = |Σ_j g_j(u,v) a_j e^{i2π(u x_j + v y_j)}|²` on `grid`.
pub fn beam_pattern(layout: &ClusterLayout, patterns: &[ElementPattern], a: &[C64], grid: &AngularGrid) -> Result<BeamPatternGrid> {
    PatternEngine::new(layout, patterns, grid)?.pattern(a)
}

/// `10·log10(S·P_out/(K·P_L)) + 10·log10|B|²` in dBm per grid point.
/// Points with a zero pattern give `-∞`.
pub fn eirp(s: usize, k: usize, p_out_dbm: f64, p_l_db: f64, bp: &BeamPatternGrid) -> Vec<f64> {
    let prefactor = 10.0 * (s as f64 / k as f64).log10() + p_out_dbm - p_l_db;
    bp.values.iter().map(|&b| prefactor + 10.0 * b.log10()).collect()
}

/// Main-beam exclusion rectangles `|u − u_k| < ū` and `|v − v_k| < v̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SllMask {
    pub centers: Vec<(f64, f64)>,
    pub u_half: f64,
    pub v_half: f64,
}

impl SllMask {
    pub fn new(centers: Vec<(f64, f64)>, u_half: f64, v_half: f64) -> Result<Self> {
        if !(u_half > 0.0 && v_half > 0.0) {
            return invalid("mask half-widths must be positive");
        }
        if let Some(c) = centers.iter().find(|(u, v)| !(u * u + v * v <= 1.0 + 1e-12)) {
            return invalid(format!("main beam ({}, {}) is outside the visible region", c.0, c.1));
        }
        Ok(SllMask { centers, u_half, v_half })
    }

    /// True when `(u, v)` lies outside every main-beam rectangle.
    pub fn in_sidelobe_region(&self, u: f64, v: f64) -> bool {
        const EPS: f64 = 1e-12;
        self.centers
            .iter()
            .all(|&(uk, vk)| (u - uk).abs() >= self.u_half - EPS || (v - vk).abs() >= self.v_half - EPS)
    }

    pub fn region(&self, grid: &AngularGrid) -> Vec<bool> {
        grid.points().iter().map(|&(u, v)| self.in_sidelobe_region(u, v)).collect()
    }
}

/// SLL in dB from a pattern and a precomputed sidelobe-region flag per point.
pub fn sidelobe_level_in(values: &[f64], region: &[bool]) -> Result<f64> {
    let peak = values.iter().copied().fold(0.0, f64::max);
    let mut side: Option<f64> = None;
    for (&b, &inside) in values.iter().zip(region) {
        if inside {
            side = Some(side.map_or(b, |s: f64| s.max(b)));
        }
    }
    let side = side.ok_or_else(|| Error::DegenerateMask("the mask excludes every grid point".into()))?;
    if !(peak > 0.0) {
        return Err(Error::Evaluation("beam pattern is identically zero".into()));
    }
    Ok(10.0 * (side / peak).log10())
}

/// `10·log10(max_𝒟 |B|² / max |B|²)`.
pub fn sidelobe_level(bp: &BeamPatternGrid, mask: &SllMask) -> Result<f64> {
    sidelobe_level_in(&bp.values, &mask.region(&bp.grid))
}

/// Linear SNR after subtracting the feed loss, both in dB.
pub fn eta_linear(eta_db: f64, feed_loss_db: f64) -> f64 {
    10f64.powf((eta_db - feed_loss_db) / 10.0)
}

/// `γ_k = η|w_kᴴ G_k f_k|² / (η Σ_{j≠k} |w_kᴴ G_k f_j|² + 1)` with
/// `G_k = H_k P` and `η` linear.
pub fn sinr(g: &[CMatrix], precoder: &Precoder, eta: f64) -> Vec<f64> {
    g.iter()
        .enumerate()
        .map(|(k, gk)| {
            let row = precoder.combiners[k].adjoint() * gk * &precoder.f;
            let signal = row[(0, k)].norm_sqr();
            let leak: f64 = (0..row.ncols()).filter(|&j| j != k).map(|j| row[(0, j)].norm_sqr()).sum();
            eta * signal / (eta * leak + 1.0)
        })
        .collect()
}

/// `R_k = log2(1 + γ_k)` and their sum.
pub fn spectral_efficiency(gamma: &[f64]) -> (Vec<f64>, f64) {
    let r: Vec<f64> = gamma.iter().map(|&g| (1.0 + g.max(0.0)).log2()).collect();
    let sum = r.iter().sum();
    (r, sum)
}

/// Receiver boresights, used as main-beam centers of the SLL mask.
pub fn main_beam_centers(metadata: &ChannelMetadata) -> Vec<(f64, f64)> {
    metadata.boresights()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationMetrics {
    pub seed: u64,
    pub sinr: Vec<f64>,
    pub rates: Vec<f64>,
    pub sum_se: f64,
    /// Per-stream SLL in dB, when computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sll_db: Option<Vec<f64>>,
}

/// Monte-Carlo summary for one configuration and architecture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub kind: String,
    pub rows: usize,
    pub cols: usize,
    pub feeds: usize,
    pub driven: usize,
    pub config_index: Option<u64>,
    pub architecture: String,
    pub eta_db: f64,
    pub feed_loss_db: f64,
    pub realizations: usize,
    pub skipped: usize,
    /// `R̄`.
    pub mean_sum_se: f64,
    pub std_sum_se: f64,
    pub mean_rates: Vec<f64>,
    /// `Φ`: per-realization maximum of the per-stream SLL, averaged.
    pub mean_sll_db: Option<f64>,
    /// Per-stream SLL averaged over streams and realizations.
    pub mean_stream_sll_db: Option<f64>,
    pub per_realization: Vec<RealizationMetrics>,
}

impl MetricReport {
    pub fn skipped_fraction(&self) -> f64 {
        let total = self.realizations + self.skipped;
        if total == 0 {
            0.0
        } else {
            self.skipped as f64 / total as f64
        }
    }
}

fn db_or_floor(x: f64) -> f64 {
    let db = 10.0 * x.log10();
    if db.is_finite() {
        db.max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

/// Writes `u,v,value_db` rows, normalized to the pattern peak when
/// `normalize` is set.
pub fn write_pattern_csv<W: Write>(mut w: W, bp: &BeamPatternGrid, normalize: bool) -> Result<()> {
    let peak = bp.peak();
    let scale = if normalize && peak > 0.0 { peak } else { 1.0 };
    writeln!(w, "u,v,value_db")?;
    for (&(u, v), &b) in bp.grid.points().iter().zip(&bp.values) {
        writeln!(w, "{u:.4},{v:.4},{:.6}", db_or_floor(b / scale))?;
    }
    Ok(())
}
