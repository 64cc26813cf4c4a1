use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Grid, PatternKind};
use crate::linalg::{CMatrix, C64};

use super::shapes::ShapeFamily;
use super::thinned::spans_full_aperture;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrayKind {
    Fpra,
    Thinned,
    Domino,
    Tetromino,
}

impl ArrayKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArrayKind::Fpra => "fpra",
            ArrayKind::Thinned => "thinned",
            ArrayKind::Domino => "domino",
            ArrayKind::Tetromino => "tetromino",
        }
    }

    pub fn shape_family(self) -> Option<ShapeFamily> {
        match self {
            ArrayKind::Domino => Some(ShapeFamily::Domino),
            ArrayKind::Tetromino => Some(ShapeFamily::Tetromino),
            _ => None,
        }
    }
}

impl fmt::Display for ArrayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArrayKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fpra" => Ok(ArrayKind::Fpra),
            "thinned" => Ok(ArrayKind::Thinned),
            "domino" | "dtpa" => Ok(ArrayKind::Domino),
            "tetromino" | "ttpa" => Ok(ArrayKind::Tetromino),
            other => Err(Error::InvalidArgument(format!("unknown array kind '{other}'"))),
        }
    }
}

/// A concrete irregular layout on an `N × M` board.
///
/// Cells are row-major indices. Clusters are kept sorted internally and
/// ordered by their smallest cell, which fixes the feed (column) order of
/// the connection matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub kind: ArrayKind,
    #[serde(rename = "N")]
    pub rows: usize,
    #[serde(rename = "M")]
    pub cols: usize,
    pub clusters: Vec<Vec<usize>>,
    pub config_index: Option<u64>,
}

impl ArrayConfig {
    /// Validates and canonicalizes a layout.
    pub fn new(
        kind: ArrayKind,
        rows: usize,
        cols: usize,
        clusters: Vec<Vec<usize>>,
        config_index: Option<u64>,
    ) -> Result<Self> {
        let mut cfg = ArrayConfig { kind, rows, cols, clusters, config_index };
        cfg.canonicalize();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn fpra(rows: usize, cols: usize) -> Result<Self> {
        Self::new(ArrayKind::Fpra, rows, cols, (0..rows * cols).map(|c| vec![c]).collect(), None)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: ArrayConfig = serde_json::from_str(s)?;
        Self::new(raw.kind, raw.rows, raw.cols, raw.clusters, raw.config_index)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serialization")
    }

    fn canonicalize(&mut self) {
        for c in &mut self.clusters {
            c.sort_unstable();
        }
        self.clusters.sort_by_key(|c| c.first().copied().unwrap_or(usize::MAX));
    }

    /// Number of feeds `S`.
    pub fn feeds(&self) -> usize {
        self.clusters.len()
    }

    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }

    /// Antennas actually driven (occupied cells).
    pub fn driven_elements(&self) -> usize {
        self.clusters.iter().map(Vec::len).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidLayout(m));
        if self.rows == 0 || self.cols == 0 {
            return bad("board must have at least one cell".into());
        }
        let total = self.cells();
        let mut seen = HashSet::new();
        for c in self.clusters.iter().flatten() {
            if *c >= total {
                return bad(format!("cell {c} outside the {}x{} board", self.rows, self.cols));
            }
            if !seen.insert(*c) {
                return bad(format!("cell {c} used twice"));
            }
        }
        let grid = Grid::half_wavelength(self.rows, self.cols)?;
        let expected = match self.kind {
            ArrayKind::Fpra | ArrayKind::Thinned => 1,
            ArrayKind::Domino => 2,
            ArrayKind::Tetromino => 4,
        };
        if let Some(c) = self.clusters.iter().find(|c| c.len() != expected) {
            return bad(format!("{} layout has a cluster of size {}", self.kind, c.len()));
        }
        // Reuses the connectivity check of the phase-center builder.
        crate::geometry::phase_centers(&grid, &self.clusters)?;
        match self.kind {
            ArrayKind::Thinned => {
                if self.clusters.is_empty() {
                    return bad("thinned layout has no elements".into());
                }
                let occupied: Vec<usize> = self.clusters.iter().map(|c| c[0]).collect();
                if !spans_full_aperture(&occupied, self.rows, self.cols) {
                    return bad("thinned layout does not span the full aperture".into());
                }
            }
            ArrayKind::Fpra | ArrayKind::Domino | ArrayKind::Tetromino => {
                if seen.len() != total {
                    return bad(format!("{} layout covers {} of {} cells", self.kind, seen.len(), total));
                }
            }
        }
        Ok(())
    }

    /// Pattern kind of each feed, in feed order.
    pub fn pattern_kinds(&self, cols: usize) -> Vec<PatternKind> {
        self.clusters
            .iter()
            .map(|c| match self.kind {
                ArrayKind::Fpra => PatternKind::Single,
                ArrayKind::Thinned => PatternKind::Thinned,
                ArrayKind::Tetromino => PatternKind::Tetromino,
                ArrayKind::Domino => {
                    if c[1] / cols == c[0] / cols {
                        PatternKind::DominoH
                    } else {
                        PatternKind::DominoV
                    }
                }
            })
            .collect()
    }
}

pub fn fill_factor(config: &ArrayConfig) -> f64 {
    config.feeds() as f64 / config.cells() as f64
}

/// Sparse 0/1 map from `S` feeds to `N_TX` antennas; column `j` lists the
/// antennas of feed `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionMatrix {
    antennas: usize,
    columns: Vec<Vec<usize>>,
}

impl ConnectionMatrix {
    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn feeds(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    pub fn get(&self, antenna: usize, feed: usize) -> u8 {
        u8::from(self.columns[feed].contains(&antenna))
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.feeds()]; self.antennas];
        for (j, col) in self.columns.iter().enumerate() {
            for &i in col {
                m[i][j] = 1;
            }
        }
        m
    }

    pub fn column_sums(&self) -> Vec<usize> {
        self.columns.iter().map(Vec::len).collect()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        let mut r = vec![0; self.antennas];
        for &i in self.columns.iter().flatten() {
            r[i] += 1;
        }
        r
    }

    /// Total driven antennas.
    pub fn driven(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// `H · P` for an `N_RX × N_TX` matrix `H`.
    pub fn project(&self, h: &CMatrix) -> CMatrix {
        assert_eq!(h.ncols(), self.antennas, "channel width must equal the antenna count");
        CMatrix::from_fn(h.nrows(), self.feeds(), |r, j| self.columns[j].iter().map(|&i| h[(r, i)]).sum())
    }

    /// Antenna excitation `P · f`.
    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.antennas];
        for (col, &x) in self.columns.iter().zip(f) {
            for &i in col {
                out[i] += x;
            }
        }
        out
    }

    /// `‖P·f‖²`.
    pub fn excitation_power(&self, f: &[C64]) -> f64 {
        self.columns.iter().zip(f).map(|(c, x)| c.len() as f64 * x.norm_sqr()).sum()
    }
}

pub fn connection_matrix(config: &ArrayConfig) -> ConnectionMatrix {
    ConnectionMatrix { antennas: config.cells(), columns: config.clusters.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fpra_is_identity() {
        let cfg = ArrayConfig::fpra(4, 6).unwrap();
        let p = connection_matrix(&cfg).to_dense();
        assert_eq!(p.len(), 24);
        for (i, row) in p.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert_eq!(x, u8::from(i == j));
            }
        }
        assert_eq!(fill_factor(&cfg), 1.0);
    }

    #[test]
    fn single_domino_column() {
        let cfg = ArrayConfig::new(ArrayKind::Domino, 1, 2, vec![vec![1, 0]], None).unwrap();
        assert_eq!(connection_matrix(&cfg).to_dense(), vec![vec![1], vec![1]]);
        assert_eq!(cfg.pattern_kinds(2), vec![PatternKind::DominoH]);
    }

    #[test]
    fn canonical_cluster_order() {
        let cfg = ArrayConfig::new(ArrayKind::Domino, 2, 2, vec![vec![3, 1], vec![2, 0]], Some(4)).unwrap();
        assert_eq!(cfg.clusters, vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(cfg.pattern_kinds(2), vec![PatternKind::DominoV; 2]);
    }

    #[test]
    fn fill_factors() {
        let cfg = ArrayConfig::new(ArrayKind::Thinned, 2, 2, vec![vec![0], vec![3]], None).unwrap();
        assert_eq!(fill_factor(&cfg), 0.5);
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(ArrayConfig::new(ArrayKind::Domino, 2, 2, vec![vec![0, 1]], None).is_err());
        assert!(ArrayConfig::new(ArrayKind::Domino, 2, 2, vec![vec![0, 3], vec![1, 2]], None).is_err());
        assert!(ArrayConfig::new(ArrayKind::Thinned, 2, 2, vec![vec![0], vec![1]], None).is_err());
        assert!(ArrayConfig::new(ArrayKind::Fpra, 1, 2, vec![vec![0], vec![0]], None).is_err());
        assert!(ArrayConfig::new(ArrayKind::Tetromino, 2, 2, vec![vec![0, 1, 2, 3]], None).is_ok());
    }

    #[test]
    fn json_schema() {
        let cfg = ArrayConfig::new(ArrayKind::Domino, 1, 2, vec![vec![0, 1]], Some(7)).unwrap();
        assert_eq!(cfg.to_json(), r#"{"kind":"domino","N":1,"M":2,"clusters":[[0,1]],"config_index":7}"#);
        assert_eq!(ArrayConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        assert!(ArrayConfig::from_json(r#"{"kind":"domino","N":1,"M":3,"clusters":[[0,1]],"config_index":null}"#).is_err());
    }

    #[test]
    fn projection_sums_member_columns() {
        let cfg = ArrayConfig::new(ArrayKind::Domino, 1, 4, vec![vec![0, 1], vec![2, 3]], None).unwrap();
        let p = connection_matrix(&cfg);
        let h = CMatrix::from_fn(2, 4, |r, c| C64::new((r * 4 + c) as f64, 1.0));
        let g = p.project(&h);
        assert_eq!(g[(0, 0)], C64::new(1.0, 2.0));
        assert_eq!(g[(1, 1)], C64::new(13.0, 2.0));
        let f = [C64::new(1.0, 0.0), C64::new(0.0, 2.0)];
        assert_eq!(p.excitation_power(&f), 2.0 + 8.0);
        assert_eq!(p.apply(&f)[3], C64::new(0.0, 2.0));
    }
}
