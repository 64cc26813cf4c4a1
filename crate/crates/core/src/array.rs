//! Transmit and receive array models assembled from a configuration.

use crate::error::Result;
use crate::geometry::{phase_centers, rx_steering_vector, steering, ClusterLayout, ElementPattern, Grid, PatternKind};
use crate::linalg::C64;
use crate::tiling::{connection_matrix, ArrayConfig, ConnectionMatrix};

/// A transmit aperture: board grid, feed clusters with their phase centers
/// and patterns, and the feed-to-antenna connection matrix.
#[derive(Debug, Clone)]
pub struct TxArray {
    config: ArrayConfig,
    grid: Grid,
    layout: ClusterLayout,
    patterns: Vec<ElementPattern>,
    connection: ConnectionMatrix,
}

impl TxArray {
    /// Every feed radiates with the same boresight gain `gain_dbi`.
    pub fn new(config: ArrayConfig, dx: f64, dy: f64, gain_dbi: f64) -> Result<Self> {
        config.validate()?;
        let grid = Grid::new(config.rows, config.cols, dx, dy)?;
        let layout = phase_centers(&grid, &config.clusters)?;
        let patterns = config
            .pattern_kinds(config.cols)
            .into_iter()
            .map(|k| ElementPattern::from_gain(k, gain_dbi))
            .collect();
        let connection = connection_matrix(&config);
        Ok(TxArray { config, grid, layout, patterns, connection })
    }

    pub fn with_patterns(config: ArrayConfig, dx: f64, dy: f64, patterns: Vec<ElementPattern>) -> Result<Self> {
        let mut tx = Self::new(config, dx, dy, 0.0)?;
        if patterns.len() != tx.feeds() {
            return crate::error::invalid(format!("{} patterns for {} feeds", patterns.len(), tx.feeds()));
        }
        tx.patterns = patterns;
        Ok(tx)
    }

    pub fn config(&self) -> &ArrayConfig {
        &self.config
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn layout(&self) -> &ClusterLayout {
        &self.layout
    }

    pub fn patterns(&self) -> &[ElementPattern] {
        &self.patterns
    }

    pub fn connection(&self) -> &ConnectionMatrix {
        &self.connection
    }

    pub fn feeds(&self) -> usize {
        self.layout.len()
    }

    pub fn antennas(&self) -> usize {
        self.grid.len()
    }

    pub fn driven(&self) -> usize {
        self.connection.driven()
    }

    /// Feed-level steering vector (length `S`), phase referenced to each
    /// cluster's phase center. Caller guarantees `(u, v)` is visible.
    pub fn steering(&self, u: f64, v: f64) -> Vec<C64> {
        steering(self.layout.phase_centers(), &self.patterns, u, v)
    }

    /// Antenna-level steering vector (length `N_TX`).
    ///
    /// Each antenna carries `1/|cluster|` of its cluster's feed-level entry,
    /// so that `a_antennaᵀ · P` equals the feed-level vector exactly. Empty
    /// cells (thinned layouts) are zero.
    pub fn antenna_steering(&self, u: f64, v: f64) -> Vec<C64> {
        let feed = self.steering(u, v);
        let mut out = vec![C64::new(0.0, 0.0); self.antennas()];
        for (cluster, a) in self.layout.clusters().iter().zip(feed) {
            let share = a / cluster.len() as f64;
            for &i in cluster {
                out[i] = share;
            }
        }
        out
    }
}

/// Fully populated receive grid with one element pattern.
#[derive(Debug, Clone)]
pub struct RxArray {
    grid: Grid,
    pattern: ElementPattern,
}

impl RxArray {
    pub fn new(rows: usize, cols: usize, gain_dbi: f64) -> Result<Self> {
        Ok(RxArray {
            grid: Grid::half_wavelength(rows, cols)?,
            pattern: ElementPattern::from_gain(PatternKind::Single, gain_dbi),
        })
    }

    pub fn with_pattern(grid: Grid, pattern: ElementPattern) -> Self {
        RxArray { grid, pattern }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn pattern(&self) -> &ElementPattern {
        &self.pattern
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn steering(&self, u: f64, v: f64) -> Vec<C64> {
        rx_steering_vector(&self.grid, &self.pattern, u, v).expect("direction inside the visible region")
    }
}
