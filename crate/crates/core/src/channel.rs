//! Sparse clustered multipath channels.
//!
//! Each receiver sees `L` paths of `κ` subpaths. The first path departs and
//! arrives around the receiver's boresight direction; further paths are
//! centered on random grid directions. Subpath gains are complex Gaussian
//! weighted by a per-path power profile and renormalized to unit total
//! power, so array and element gains enter only through steering vectors:
//!
//! `H_k = Σ_{ℓ,i} α_{ℓ,i} · a_RX(u_RX, v_RX) · a_TX(u_TX, v_TX)ᵀ`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::array::{RxArray, TxArray};
use crate::error::{invalid, Result};
use crate::linalg::{CMatrix, C64};

/// Number of paths per receiver: fixed, or uniform over an inclusive range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathCount {
    Fixed(usize),
    Uniform { min: usize, max: usize },
}

impl PathCount {
    fn max(self) -> usize {
        match self {
            PathCount::Fixed(n) => n,
            PathCount::Uniform { max, .. } => max,
        }
    }

    fn min(self) -> usize {
        match self {
            PathCount::Fixed(n) => n,
            PathCount::Uniform { min, .. } => min,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelParams {
    pub num_paths: PathCount,
    pub subpaths_per_path: usize,
    /// Relative power of the ℓ-th path in dB; the last entry is reused for
    /// any further paths.
    pub path_power_db: Vec<f64>,
    /// Per-axis standard deviation of subpath directions around their path
    /// center, in direction cosines.
    pub angle_spread: f64,
    pub receivers: usize,
    /// Candidate receiver and path-center directions.
    pub grid: Vec<(f64, f64)>,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            num_paths: PathCount::Fixed(3),
            subpaths_per_path: 4,
            path_power_db: vec![0.0, -10.0, -15.0],
            angle_spread: 0.05,
            receivers: 2,
            grid: default_angular_grid(),
        }
    }
}

/// Lattice `u, v ∈ {−0.8, −0.7, …, 0.8}` restricted to `u² + v² ≤ 0.9`.
pub fn default_angular_grid() -> Vec<(f64, f64)> {
    let mut g = Vec::new();
    for i in -8i32..=8 {
        for j in -8i32..=8 {
            if i * i + j * j <= 90 {
                g.push((f64::from(i) / 10.0, f64::from(j) / 10.0));
            }
        }
    }
    g
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_paths.min() == 0 || self.num_paths.min() > self.num_paths.max() {
            return invalid("path count must be at least 1 (and min <= max)");
        }
        if self.subpaths_per_path == 0 {
            return invalid("at least one subpath per path is required");
        }
        if self.path_power_db.is_empty() || self.path_power_db.iter().any(|p| !p.is_finite()) {
            return invalid("path power profile must be non-empty and finite");
        }
        if !(self.angle_spread >= 0.0) || !self.angle_spread.is_finite() {
            return invalid("angle spread must be a finite non-negative number");
        }
        if self.receivers == 0 {
            return invalid("at least one receiver is required");
        }
        if let Some(p) = self.grid.iter().find(|(u, v)| !(u * u + v * v <= 1.0)) {
            return invalid(format!("grid point ({}, {}) is outside the unit disk", p.0, p.1));
        }
        if self.grid.len() < self.receivers {
            return invalid(format!("angular grid has {} points for {} receivers", self.grid.len(), self.receivers));
        }
        Ok(())
    }

    fn path_power(&self, path: usize) -> f64 {
        let db = self.path_power_db[path.min(self.path_power_db.len() - 1)];
        10f64.powf(db / 10.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subpath {
    pub path: usize,
    pub gain: C64,
    pub departure: (f64, f64),
    pub arrival: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverPaths {
    pub boresight: (f64, f64),
    pub subpaths: Vec<Subpath>,
}

/// Everything needed to rebuild one realization on any array pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelMetadata {
    pub seed: u64,
    pub receivers: Vec<ReceiverPaths>,
}

impl ChannelMetadata {
    pub fn boresights(&self) -> Vec<(f64, f64)> {
        self.receivers.iter().map(|r| r.boresight).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub metadata: ChannelMetadata,
    /// One `N_RX × N_TX` matrix per receiver.
    pub h: Vec<CMatrix>,
}

fn clip_to_disk((u, v): (f64, f64)) -> (f64, f64) {
    let r = (u * u + v * v).sqrt();
    if r > 1.0 {
        // rounding can leave u² + v² a few ulps above one
        let r = r * (1.0 + 2.0 * f64::EPSILON);
        (u / r, v / r)
    } else {
        (u, v)
    }
}

fn jitter(rng: &mut ChaCha8Rng, (u, v): (f64, f64), sigma: f64) -> (f64, f64) {
    let du: f64 = rng.sample(StandardNormal);
    let dv: f64 = rng.sample(StandardNormal);
    clip_to_disk((u + sigma * du, v + sigma * dv))
}

/// Draws path directions and gains. Depends only on `(params, seed)`, so
/// every array evaluated with the same seed sees the same propagation.
pub fn draw_metadata(params: &ChannelParams, seed: u64) -> Result<ChannelMetadata> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = index::sample(&mut rng, params.grid.len(), params.receivers).into_vec();
    let mut receivers = Vec::with_capacity(params.receivers);
    for pick in picks {
        let boresight = params.grid[pick];
        let paths = match params.num_paths {
            PathCount::Fixed(n) => n,
            PathCount::Uniform { min, max } => rng.gen_range(min..=max),
        };
        let mut subpaths = Vec::with_capacity(paths * params.subpaths_per_path);
        for path in 0..paths {
            let (dep_center, arr_center) = if path == 0 {
                (boresight, boresight)
            } else {
                let a = params.grid[rng.gen_range(0..params.grid.len())];
                let b = params.grid[rng.gen_range(0..params.grid.len())];
                (a, b)
            };
            let amp = (params.path_power(path) / params.subpaths_per_path as f64).sqrt();
            for _ in 0..params.subpaths_per_path {
                let departure = jitter(&mut rng, dep_center, params.angle_spread);
                let arrival = jitter(&mut rng, arr_center, params.angle_spread);
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let gain = C64::new(re, im) * (amp / std::f64::consts::SQRT_2);
                subpaths.push(Subpath { path, gain, departure, arrival });
            }
        }
        let total: f64 = subpaths.iter().map(|s| s.gain.norm_sqr()).sum();
        if total > 0.0 {
            let scale = total.sqrt().recip();
            for s in &mut subpaths {
                s.gain *= scale;
            }
        }
        receivers.push(ReceiverPaths { boresight, subpaths });
    }
    Ok(ChannelMetadata { seed, receivers })
}

/// Assembles `H_k` from one receiver's subpaths.
pub fn reconstruct_h(paths: &ReceiverPaths, tx: &TxArray, rx: &RxArray) -> CMatrix {
    let mut h = CMatrix::zeros(rx.len(), tx.antennas());
    for sp in &paths.subpaths {
        let at = tx.antenna_steering(sp.departure.0, sp.departure.1);
        let ar = rx.steering(sp.arrival.0, sp.arrival.1);
        for (r, &a_r) in ar.iter().enumerate() {
            let w = sp.gain * a_r;
            for (c, &a_t) in at.iter().enumerate() {
                h[(r, c)] += w * a_t;
            }
        }
    }
    h
}

pub fn assemble(metadata: ChannelMetadata, tx: &TxArray, rx: &RxArray) -> ChannelRealization {
    let h = metadata.receivers.iter().map(|p| reconstruct_h(p, tx, rx)).collect();
    ChannelRealization { metadata, h }
}

pub fn draw_channel(params: &ChannelParams, tx: &TxArray, rx: &RxArray, seed: u64) -> Result<ChannelRealization> {
    Ok(assemble(draw_metadata(params, seed)?, tx, rx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius;
    use crate::tiling::ArrayConfig;

    fn arrays() -> (TxArray, RxArray) {
        let tx = TxArray::new(ArrayConfig::fpra(4, 4).unwrap(), 0.5, 0.5, 4.07).unwrap();
        let rx = RxArray::new(2, 2, 4.07).unwrap();
        (tx, rx)
    }

    #[test]
    fn default_grid_shape() {
        let g = default_angular_grid();
        assert!(g.contains(&(0.0, 0.0)));
        assert!(g.contains(&(0.3, 0.8)));
        assert!(!g.contains(&(0.8, 0.8)));
        assert!(g.iter().all(|(u, v)| u * u + v * v <= 0.9 + 1e-12));
    }

    #[test]
    fn gains_are_normalized() {
        let m = draw_metadata(&ChannelParams::default(), 9).unwrap();
        assert_eq!(m.receivers.len(), 2);
        for r in &m.receivers {
            assert_eq!(r.subpaths.len(), 12);
            let p: f64 = r.subpaths.iter().map(|s| s.gain.norm_sqr()).sum();
            assert!((p - 1.0).abs() < 1e-12);
        }
        assert_ne!(m.receivers[0].boresight, m.receivers[1].boresight);
    }

    #[test]
    fn seeds_are_deterministic() {
        let p = ChannelParams::default();
        assert_eq!(draw_metadata(&p, 3).unwrap(), draw_metadata(&p, 3).unwrap());
        assert_ne!(draw_metadata(&p, 3).unwrap(), draw_metadata(&p, 4).unwrap());
    }

    #[test]
    fn too_small_grid_is_rejected() {
        let p = ChannelParams { grid: vec![(0.0, 0.0)], ..Default::default() };
        assert!(draw_metadata(&p, 0).is_err());
    }

    #[test]
    fn single_path_is_rank_one() {
        let (tx, rx) = arrays();
        let p = ChannelParams {
            num_paths: PathCount::Fixed(1),
            subpaths_per_path: 1,
            angle_spread: 0.0,
            receivers: 1,
            ..Default::default()
        };
        let real = draw_channel(&p, &tx, &rx, 5).unwrap();
        let sp = &real.metadata.receivers[0].subpaths[0];
        assert!((sp.gain.norm() - 1.0).abs() < 1e-12);
        let s = crate::linalg::singular_values(&real.h[0]);
        assert!(s[1] < 1e-9 * s[0]);
    }

    #[test]
    fn reconstruction_matches() {
        let (tx, rx) = arrays();
        let real = draw_channel(&ChannelParams::default(), &tx, &rx, 1).unwrap();
        let again = reconstruct_h(&real.metadata.receivers[1], &tx, &rx);
        assert!(frobenius(&(again - &real.h[1])) <= 1e-10 * frobenius(&real.h[1]));
    }

    #[test]
    fn uniform_path_count_in_json() {
        let p: PathCount = serde_json::from_str(r#"{"min":1,"max":4}"#).unwrap();
        assert_eq!(p, PathCount::Uniform { min: 1, max: 4 });
        let p: PathCount = serde_json::from_str("3").unwrap();
        assert_eq!(p, PathCount::Fixed(3));
    }
}
