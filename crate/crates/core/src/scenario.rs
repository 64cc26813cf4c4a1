//! Experiment configuration, read from TOML.
//!
//! Every field has a default, so a scenario file only needs the values it
//! changes. `scenarios/default.toml` spells out the full default set.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::array::{RxArray, TxArray};
use crate::beamforming::Architecture;
use crate::channel::{default_angular_grid, ChannelParams, PathCount};
use crate::error::{Error, Result};
use crate::metrics::SllMask;
use crate::tiling::{ArrayConfig, ArrayKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TxSection {
    pub rows: usize,
    pub cols: usize,
    pub dx: f64,
    pub dy: f64,
}

impl Default for TxSection {
    fn default() -> Self {
        TxSection { rows: 8, cols: 10, dx: 0.5, dy: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RxSection {
    pub rows: usize,
    pub cols: usize,
    pub gain_dbi: f64,
}

impl Default for RxSection {
    fn default() -> Self {
        RxSection { rows: 4, cols: 4, gain_dbi: 4.07 }
    }
}

/// A value per array kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerKind {
    pub fpra: f64,
    pub thinned: f64,
    pub domino: f64,
    pub tetromino: f64,
}

impl PerKind {
    pub fn get(&self, kind: ArrayKind) -> f64 {
        match kind {
            ArrayKind::Fpra => self.fpra,
            ArrayKind::Thinned => self.thinned,
            ArrayKind::Domino => self.domino,
            ArrayKind::Tetromino => self.tetromino,
        }
    }

    fn values(&self) -> [f64; 4] {
        [self.fpra, self.thinned, self.domino, self.tetromino]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelSection {
    pub num_paths: PathCount,
    pub subpaths_per_path: usize,
    pub path_power_db: Vec<f64>,
    pub angle_spread: f64,
    /// Explicit receiver/path-center directions; the built-in lattice is
    /// used when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<(f64, f64)>>,
}

impl Default for ChannelSection {
    fn default() -> Self {
        let p = ChannelParams::default();
        ChannelSection {
            num_paths: p.num_paths,
            subpaths_per_path: p.subpaths_per_path,
            path_power_db: p.path_power_db,
            angle_spread: p.angle_spread,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaskSection {
    pub u_half: f64,
    pub v_half: f64,
}

impl Default for MaskSection {
    fn default() -> Self {
        MaskSection { u_half: 0.21, v_half: 0.28 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaSection {
    pub population: usize,
    pub crossover: f64,
    pub mutation: f64,
    pub generations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub seed: u64,
}

impl Default for GaSection {
    fn default() -> Self {
        GaSection { population: 20, crossover: 0.9, mutation: 0.1, generations: 300, threshold: None, seed: 1 }
    }
}

/// How candidate layouts are generated for the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpaceSection {
    /// Maximum number of tilings enumerated for domino/tetromino searches.
    pub enumeration_cap: usize,
    pub enumeration_seed: u64,
    /// Fill factor of thinned layouts, `S / (N·M)`.
    pub thinned_fill: f64,
    pub thinned_seed: u64,
}

impl Default for SpaceSection {
    fn default() -> Self {
        SpaceSection { enumeration_cap: 4096, enumeration_seed: 0, thinned_fill: 0.5, thinned_seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Number of receivers / streams `K`.
    pub users: usize,
    pub architectures: Vec<Architecture>,
    pub kinds: Vec<ArrayKind>,
    /// SNR used by `evaluate` and `optimize`.
    pub eta_db: f64,
    /// SNR list used by `sweep`.
    pub eta_sweep_db: Vec<f64>,
    pub realizations: usize,
    pub optimize_realizations: usize,
    pub sweep_realizations: usize,
    /// First channel seed; realization `i` uses `seed + i`.
    pub seed: u64,
    pub betas: Vec<f64>,
    pub sll_step: f64,
    pub codebook_step: f64,
    pub output_dir: PathBuf,
    pub tx: TxSection,
    pub rx: RxSection,
    pub gains_dbi: PerKind,
    pub feed_loss_db: PerKind,
    pub channel: ChannelSection,
    pub mask: MaskSection,
    pub ga: GaSection,
    pub space: SpaceSection,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            users: 2,
            architectures: Architecture::ALL.to_vec(),
            kinds: vec![ArrayKind::Fpra, ArrayKind::Domino, ArrayKind::Tetromino, ArrayKind::Thinned],
            eta_db: 5.0,
            eta_sweep_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
            realizations: 500,
            optimize_realizations: 25,
            sweep_realizations: 500,
            seed: 1,
            betas: (0..=10).map(|i| f64::from(i) / 10.0).collect(),
            sll_step: 0.01,
            codebook_step: 0.1,
            output_dir: PathBuf::from("results"),
            tx: TxSection::default(),
            rx: RxSection::default(),
            gains_dbi: PerKind { fpra: 4.07, thinned: 5.68, domino: 6.5, tetromino: 7.9 },
            feed_loss_db: PerKind { fpra: 0.0, thinned: 0.0, domino: 0.3, tetromino: 0.6 },
            channel: ChannelSection::default(),
            mask: MaskSection::default(),
            ga: GaSection::default(),
            space: SpaceSection::default(),
        }
    }
}

fn bad<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Scenario(msg.into()))
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Scenario(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serialization")
    }

    pub fn validate(&self) -> Result<()> {
        if self.users == 0 {
            return bad("users must be at least 1");
        }
        if self.tx.rows == 0 || self.tx.cols == 0 || self.rx.rows == 0 || self.rx.cols == 0 {
            return bad("array grids must be non-empty");
        }
        if !(self.tx.dx > 0.0 && self.tx.dy > 0.0) {
            return bad("element spacing must be positive");
        }
        let all_finite = self.gains_dbi.values().iter().chain(&self.feed_loss_db.values()).all(|x| x.is_finite());
        if !all_finite || !self.rx.gain_dbi.is_finite() {
            return bad("gains and feed losses must be finite");
        }
        if !self.eta_db.is_finite() || self.eta_sweep_db.iter().any(|x| !x.is_finite()) {
            return bad("SNR values must be finite");
        }
        if self.realizations == 0 || self.optimize_realizations == 0 || self.sweep_realizations == 0 {
            return bad("realization counts must be at least 1");
        }
        if self.betas.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return bad("every beta must lie in [0, 1]");
        }
        if !(self.sll_step > 0.0 && self.sll_step <= 1.0) || !(self.codebook_step > 0.0 && self.codebook_step <= 1.0) {
            return bad("grid steps must lie in (0, 1]");
        }
        if !(self.mask.u_half > 0.0 && self.mask.v_half > 0.0) {
            return bad("mask half-widths must be positive");
        }
        let g = &self.ga;
        if g.population < 2 || !(0.0..=1.0).contains(&g.crossover) || !(0.0..=1.0).contains(&g.mutation) {
            return bad("GA needs population >= 2 and probabilities in [0, 1]");
        }
        if !(self.space.thinned_fill > 0.0 && self.space.thinned_fill <= 1.0) {
            return bad("thinned fill factor must lie in (0, 1]");
        }
        if self.architectures.contains(&Architecture::Hpc) && self.users > self.tx.rows * self.tx.cols {
            return bad("more users than transmit elements");
        }
        self.channel_params().validate().map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn channel_params(&self) -> ChannelParams {
        let c = &self.channel;
        ChannelParams {
            num_paths: c.num_paths,
            subpaths_per_path: c.subpaths_per_path,
            path_power_db: c.path_power_db.clone(),
            angle_spread: c.angle_spread,
            receivers: self.users,
            grid: c.grid.clone().unwrap_or_else(default_angular_grid),
        }
    }

    pub fn gain_dbi(&self, kind: ArrayKind) -> f64 {
        self.gains_dbi.get(kind)
    }

    pub fn feed_loss(&self, kind: ArrayKind) -> f64 {
        self.feed_loss_db.get(kind)
    }

    /// Thinned element count implied by the fill factor.
    pub fn thinned_elements(&self) -> usize {
        ((self.tx.rows * self.tx.cols) as f64 * self.space.thinned_fill).round().max(1.0) as usize
    }

    pub fn tx_array(&self, config: &ArrayConfig) -> Result<TxArray> {
        if (config.rows, config.cols) != (self.tx.rows, self.tx.cols) {
            return Err(Error::InvalidArgument(format!(
                "configuration is {}x{} but the scenario transmit grid is {}x{}",
                config.rows, config.cols, self.tx.rows, self.tx.cols
            )));
        }
        TxArray::new(config.clone(), self.tx.dx, self.tx.dy, self.gain_dbi(config.kind))
    }

    pub fn rx_array(&self) -> Result<RxArray> {
        RxArray::new(self.rx.rows, self.rx.cols, self.rx.gain_dbi)
    }

    pub fn mask_for(&self, centers: Vec<(f64, f64)>) -> Result<SllMask> {
        SllMask::new(centers, self.mask.u_half, self.mask.v_half)
    }
}
