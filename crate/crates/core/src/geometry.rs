//! Aperture geometry, analytic element patterns and steering vectors.
//!
//! All coordinates are in wavelengths and centered on the aperture centroid.
//! Directions are direction cosines `(u, v)` with the visible region
//! `u² + v² ≤ 1`.

use std::collections::HashSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{cis, C64};

/// Slack used when testing whether a direction lies in the visible region.
const VISIBLE_EPS: f64 = 1e-12;

/// Rectangular `rows × cols` lattice, row-major, centered at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    dx: f64,
    dy: f64,
    positions: Vec<(f64, f64)>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, dx: f64, dy: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid(format!("grid dimensions must be positive, got {rows}x{cols}"));
        }
        if !(dx > 0.0 && dy > 0.0) || !dx.is_finite() || !dy.is_finite() {
            return invalid(format!("grid spacing must be positive, got dx={dx}, dy={dy}"));
        }
        let x0 = (cols - 1) as f64 * dx / 2.0;
        let y0 = (rows - 1) as f64 * dy / 2.0;
        let positions = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (c as f64 * dx - x0, r as f64 * dy - y0)))
            .collect();
        Ok(Grid { rows, cols, dx, dy, positions })
    }

    /// Fully populated half-wavelength grid.
    pub fn half_wavelength(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, 0.5, 0.5)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    pub fn position(&self, cell: usize) -> (f64, f64) {
        self.positions[cell]
    }

    pub fn cell(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn row_col(&self, cell: usize) -> (usize, usize) {
        (cell / self.cols, cell % self.cols)
    }
}

/// Convenience wrapper matching the operation name used throughout the docs.
pub fn build_grid(rows: usize, cols: usize, dx: f64, dy: f64) -> Result<Grid> {
    Grid::new(rows, cols, dx, dy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Single,
    Thinned,
    DominoH,
    DominoV,
    Tetromino,
}

/// Embedded element pattern `√G0 · cos(θ)^(q/2)`.
///
/// The rolloff exponent defaults to the value whose hemispherical
/// directivity `2(q + 1)` equals the boresight gain, clamped at zero for
/// gains below 3 dBi (an isotropic element keeps `q = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementPattern {
    pub boresight_gain_dbi: f64,
    pub rolloff: f64,
    pub kind: PatternKind,
}

impl ElementPattern {
    pub fn from_gain(kind: PatternKind, boresight_gain_dbi: f64) -> Self {
        let lin = db_to_lin(boresight_gain_dbi);
        ElementPattern { boresight_gain_dbi, rolloff: (lin / 2.0 - 1.0).max(0.0), kind }
    }

    pub fn with_rolloff(kind: PatternKind, boresight_gain_dbi: f64, rolloff: f64) -> Result<Self> {
        if !(rolloff >= 0.0) || !rolloff.is_finite() {
            return invalid(format!("rolloff exponent must be finite and non-negative, got {rolloff}"));
        }
        Ok(ElementPattern { boresight_gain_dbi, rolloff, kind })
    }

    pub fn isotropic() -> Self {
        ElementPattern { boresight_gain_dbi: 0.0, rolloff: 0.0, kind: PatternKind::Single }
    }

    /// Real, non-negative field amplitude towards `(u, v)`.
    ///
    /// The horizon `u² + v² = 1` and everything beyond it is a null.
    #[inline]
    pub fn amplitude(&self, u: f64, v: f64) -> f64 {
        let s2 = u * u + v * v;
        if s2 >= 1.0 {
            return 0.0;
        }
        let peak = db_to_lin(self.boresight_gain_dbi).sqrt();
        if self.rolloff == 0.0 {
            return peak;
        }
        // cos(θ)^(q/2) = (1 - sin²θ)^(q/4)
        peak * (1.0 - s2).powf(self.rolloff / 4.0)
    }
}

pub fn eval_element(pattern: &ElementPattern, u: f64, v: f64) -> f64 {
    pattern.amplitude(u, v)
}

pub(crate) fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Clusters of grid cells fed by one port each, with their phase centers.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterLayout {
    clusters: Vec<Vec<usize>>,
    phase_centers: Vec<(f64, f64)>,
}

impl ClusterLayout {
    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn phase_centers(&self) -> &[(f64, f64)] {
        &self.phase_centers
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Same clusters with every phase center translated by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> ClusterLayout {
        ClusterLayout {
            clusters: self.clusters.clone(),
            phase_centers: self.phase_centers.iter().map(|&(x, y)| (x + dx, y + dy)).collect(),
        }
    }
}

/// Builds a [`ClusterLayout`], placing each feed at the mean of its cells.
pub fn phase_centers(grid: &Grid, clusters: &[Vec<usize>]) -> Result<ClusterLayout> {
    let mut seen = HashSet::new();
    let mut centers = Vec::with_capacity(clusters.len());
    for (j, cluster) in clusters.iter().enumerate() {
        if !matches!(cluster.len(), 1 | 2 | 4) {
            return Err(Error::InvalidLayout(format!(
                "cluster {j} has {} cells; expected 1, 2 or 4",
                cluster.len()
            )));
        }
        for &cell in cluster {
            if cell >= grid.len() {
                return Err(Error::InvalidLayout(format!("cell {cell} outside the {}-cell grid", grid.len())));
            }
            if !seen.insert(cell) {
                return Err(Error::InvalidLayout(format!("cell {cell} belongs to more than one cluster")));
            }
        }
        if !edge_connected(grid, cluster) {
            return Err(Error::InvalidLayout(format!("cluster {j} is not edge-connected")));
        }
        let n = cluster.len() as f64;
        let (sx, sy) = cluster.iter().fold((0.0, 0.0), |(sx, sy), &c| {
            let (x, y) = grid.position(c);
            (sx + x, sy + y)
        });
        centers.push((sx / n, sy / n));
    }
    Ok(ClusterLayout { clusters: clusters.to_vec(), phase_centers: centers })
}

fn edge_connected(grid: &Grid, cells: &[usize]) -> bool {
    if cells.len() <= 1 {
        return true;
    }
    let set: HashSet<usize> = cells.iter().copied().collect();
    let mut stack = vec![cells[0]];
    let mut reached = HashSet::from([cells[0]]);
    while let Some(c) = stack.pop() {
        let (r, col) = grid.row_col(c);
        let mut nbrs = Vec::with_capacity(4);
        if r > 0 {
            nbrs.push(grid.cell(r - 1, col));
        }
        if r + 1 < grid.rows() {
            nbrs.push(grid.cell(r + 1, col));
        }
        if col > 0 {
            nbrs.push(grid.cell(r, col - 1));
        }
        if col + 1 < grid.cols() {
            nbrs.push(grid.cell(r, col + 1));
        }
        for n in nbrs {
            if set.contains(&n) && reached.insert(n) {
                stack.push(n);
            }
        }
    }
    reached.len() == set.len()
}

fn check_visible(u: f64, v: f64) -> Result<()> {
    if !(u.is_finite() && v.is_finite()) || u * u + v * v > 1.0 + VISIBLE_EPS {
        return invalid(format!("direction ({u}, {v}) lies outside the visible region"));
    }
    Ok(())
}

/// Transmit steering vector over the feeds of `layout`.
///
/// Entry `j` is `g_j(u, v) · exp(i2π(u·x̄_j + v·ȳ_j))`.
pub fn tx_steering_vector(
    layout: &ClusterLayout,
    patterns: &[ElementPattern],
    u: f64,
    v: f64,
) -> Result<Vec<C64>> {
    if patterns.len() != layout.len() {
        return invalid(format!("{} patterns for {} clusters", patterns.len(), layout.len()));
    }
    check_visible(u, v)?;
    Ok(steering(layout.phase_centers(), patterns, u, v))
}

/// Receive steering vector of a fully populated grid sharing one pattern.
pub fn rx_steering_vector(grid: &Grid, pattern: &ElementPattern, u: f64, v: f64) -> Result<Vec<C64>> {
    check_visible(u, v)?;
    let g = pattern.amplitude(u, v);
    Ok(grid
        .positions()
        .iter()
        .map(|&(x, y)| cis(2.0 * PI * (u * x + v * y)) * g)
        .collect())
}

pub(crate) fn steering(centers: &[(f64, f64)], patterns: &[ElementPattern], u: f64, v: f64) -> Vec<C64> {
    centers
        .iter()
        .zip(patterns)
        .map(|(&(x, y), p)| cis(2.0 * PI * (u * x + v * y)) * p.amplitude(u, v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn grid_8x10_spans_aperture() {
        let g = build_grid(8, 10, 0.5, 0.5).unwrap();
        assert_eq!(g.len(), 80);
        let (xmin, xmax) = g.positions().iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
        let (ymin, ymax) = g.positions().iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.1), b.max(p.1)));
        assert!(close(xmax - xmin, 4.5, 1e-12));
        assert!(close(ymax - ymin, 3.5, 1e-12));
        // row-major: (n, m) -> (m dx, n dy) up to the centering offset
        let p0 = g.position(0);
        for r in 0..8 {
            for c in 0..10 {
                let p = g.position(g.cell(r, c));
                assert!(close(p.0 - p0.0, c as f64 * 0.5, 1e-12));
                assert!(close(p.1 - p0.1, r as f64 * 0.5, 1e-12));
            }
        }
    }

    #[test]
    fn degenerate_and_symmetric_grids() {
        let g = build_grid(1, 1, 0.5, 0.5).unwrap();
        assert_eq!(g.positions(), &[(0.0, 0.0)]);
        let g = build_grid(2, 2, 0.5, 0.5).unwrap();
        let mut p: Vec<_> = g.positions().to_vec();
        p.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(p, vec![(-0.25, -0.25), (-0.25, 0.25), (0.25, -0.25), (0.25, 0.25)]);
    }

    #[test]
    fn grid_rejects_bad_arguments() {
        assert!(matches!(build_grid(0, 3, 0.5, 0.5), Err(Error::InvalidArgument(_))));
        assert!(matches!(build_grid(3, 3, 0.0, 0.5), Err(Error::InvalidArgument(_))));
        assert!(matches!(build_grid(3, 3, 0.5, -1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn boresight_gains_match() {
        for (g, kind) in [(4.07, PatternKind::Single), (7.9, PatternKind::Tetromino), (5.68, PatternKind::Thinned)] {
            let p = ElementPattern::from_gain(kind, g);
            let a = eval_element(&p, 0.0, 0.0);
            assert!(close(10.0 * (a * a).log10(), g, 1e-9));
        }
    }

    #[test]
    fn horizon_is_a_null() {
        for p in [ElementPattern::isotropic(), ElementPattern::from_gain(PatternKind::DominoH, 6.5)] {
            assert_eq!(eval_element(&p, 1.0, 0.0), 0.0);
            assert_eq!(eval_element(&p, 0.8, 0.8), 0.0);
        }
    }

    #[test]
    fn rolloff_from_directivity() {
        let p = ElementPattern::from_gain(PatternKind::Tetromino, 7.9);
        let lin = 10f64.powf(0.79);
        assert!(close(p.rolloff, lin / 2.0 - 1.0, 1e-12));
        assert_eq!(ElementPattern::from_gain(PatternKind::Single, 0.0).rolloff, 0.0);
        assert!(ElementPattern::with_rolloff(PatternKind::Single, 0.0, -1.0).is_err());
    }

    #[test]
    fn domino_and_square_centers() {
        let g = build_grid(2, 2, 0.5, 0.5).unwrap();
        let lay = phase_centers(&g, &[vec![0, 1], vec![2], vec![3]]).unwrap();
        let (x, y) = lay.phase_centers()[0];
        assert!(close(x, (g.position(0).0 + g.position(1).0) / 2.0, 1e-15));
        assert!(close(y, g.position(0).1, 1e-15));
        assert_eq!(lay.phase_centers()[1], g.position(2));

        let lay = phase_centers(&g, &[vec![0, 1, 2, 3]]).unwrap();
        let corner = g.position(0);
        let (x, y) = lay.phase_centers()[0];
        assert!(close(x - corner.0, 0.25, 1e-15));
        assert!(close(y - corner.1, 0.25, 1e-15));
    }

    #[test]
    fn invalid_layouts_are_rejected() {
        let g = build_grid(2, 3, 0.5, 0.5).unwrap();
        assert!(matches!(phase_centers(&g, &[vec![0, 1], vec![1, 2]]), Err(Error::InvalidLayout(_))));
        assert!(matches!(phase_centers(&g, &[vec![0, 2]]), Err(Error::InvalidLayout(_))));
        assert!(matches!(phase_centers(&g, &[vec![0, 4]]), Err(Error::InvalidLayout(_))));
        assert!(matches!(phase_centers(&g, &[vec![0, 1, 2]]), Err(Error::InvalidLayout(_))));
        assert!(matches!(phase_centers(&g, &[vec![9]]), Err(Error::InvalidLayout(_))));
    }

    #[test]
    fn broadside_vector_is_real() {
        let g = build_grid(4, 6, 0.5, 0.5).unwrap();
        let clusters: Vec<Vec<usize>> = (0..12).map(|i| vec![2 * i, 2 * i + 1]).collect();
        let lay = phase_centers(&g, &clusters).unwrap();
        let pats = vec![ElementPattern::from_gain(PatternKind::DominoH, 6.5); 12];
        let a = tx_steering_vector(&lay, &pats, 0.0, 0.0).unwrap();
        for z in a {
            assert!(z.im.abs() < 1e-15);
            assert!(close(z.re, 10f64.powf(0.65).sqrt(), 1e-12));
        }
    }

    #[test]
    fn isotropic_fpra_has_unit_ratios() {
        let g = build_grid(8, 10, 0.5, 0.5).unwrap();
        let lay = phase_centers(&g, &(0..80).map(|i| vec![i]).collect::<Vec<_>>()).unwrap();
        let a = tx_steering_vector(&lay, &[ElementPattern::isotropic(); 80], 0.3, -0.4).unwrap();
        assert_eq!(a.len(), 80);
        for z in &a {
            assert!(close((*z / a[0]).norm(), 1.0, 1e-12));
        }
    }

    #[test]
    fn translation_multiplies_by_phase() {
        let g = build_grid(3, 4, 0.5, 0.5).unwrap();
        let lay = phase_centers(&g, &[vec![0, 1], vec![2, 6], vec![3, 7], vec![4, 8], vec![5, 9], vec![10, 11]]).unwrap();
        let pats = vec![ElementPattern::from_gain(PatternKind::DominoV, 6.5); 6];
        let (du, dv) = (0.31, -0.22);
        let (tx, ty) = (0.37, -1.1);
        let a = tx_steering_vector(&lay, &pats, du, dv).unwrap();
        let b = tx_steering_vector(&lay.translated(tx, ty), &pats, du, dv).unwrap();
        let shift = cis(2.0 * PI * (du * tx + dv * ty));
        for (x, y) in a.iter().zip(&b) {
            assert!((x * shift - y).norm() < 1e-12);
        }
    }

    #[test]
    fn rx_phase_progression() {
        let g = Grid::half_wavelength(4, 4).unwrap();
        let p = ElementPattern::isotropic();
        let a = rx_steering_vector(&g, &p, 0.0, 0.0).unwrap();
        assert!(a.iter().all(|z| (z - a[0]).norm() < 1e-15));
        let a = rx_steering_vector(&g, &p, 0.25, 0.25).unwrap();
        for r in 0..4 {
            for c in 0..3 {
                let step = a[g.cell(r, c + 1)] / a[g.cell(r, c)];
                assert!(close(step.arg(), PI / 4.0, 1e-12));
            }
        }
        for r in 0..3 {
            for c in 0..4 {
                let step = a[g.cell(r + 1, c)] / a[g.cell(r, c)];
                assert!(close(step.arg(), PI / 4.0, 1e-12));
            }
        }
        let b = rx_steering_vector(&g, &p, -0.25, -0.25).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.conj() - y).norm() < 1e-12);
        }
    }

    #[test]
    fn outside_visible_region_is_an_error() {
        let g = Grid::half_wavelength(2, 2).unwrap();
        assert!(rx_steering_vector(&g, &ElementPattern::isotropic(), 0.9, 0.9).is_err());
    }
}
