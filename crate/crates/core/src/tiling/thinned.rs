use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};

use super::config::{ArrayConfig, ArrayKind};
use super::count::count_thinned;

const MAX_DRAWS: usize = 10_000_000;

/// True when the occupied cells touch the first and last row and the first
/// and last column, so the layout keeps the full `n × m` aperture.
pub fn spans_full_aperture(cells: &[usize], rows: usize, cols: usize) -> bool {
    let (mut top, mut bottom, mut left, mut right) = (false, false, false, false);
    for &c in cells {
        let (r, col) = (c / cols, c % cols);
        top |= r == 0;
        bottom |= r + 1 == rows;
        left |= col == 0;
        right |= col + 1 == cols;
    }
    top && bottom && left && right
}

/// Uniform draw over full-aperture thinned layouts with `s` elements.
///
/// Uniform `s`-subsets are drawn and rejected until one spans the aperture,
/// which conditions the uniform law on that constraint.
pub fn sample_thinned(rows: usize, cols: usize, s: usize, seed: u64) -> Result<ArrayConfig> {
    if rows == 0 || cols == 0 {
        return invalid("board must have at least one cell");
    }
    if count_thinned(rows, cols, s).bits() == 0 {
        return invalid(format!("no {s}-element thinned layout spans a {rows}x{cols} aperture"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let cells = index::sample(&mut rng, rows * cols, s).into_vec();
        if spans_full_aperture(&cells, rows, cols) {
            return ArrayConfig::new(ArrayKind::Thinned, rows, cols, cells.into_iter().map(|c| vec![c]).collect(), None);
        }
    }
    Err(Error::InvalidArgument(format!(
        "rejection sampling of {s} elements on {rows}x{cols} did not succeed in {MAX_DRAWS} draws"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_thinned_8x10() {
        let cfg = sample_thinned(8, 10, 40, 11).unwrap();
        assert_eq!(cfg.feeds(), 40);
        assert!((crate::tiling::fill_factor(&cfg) - 0.5).abs() < 1e-15);
        let cells: Vec<usize> = cfg.clusters.iter().map(|c| c[0]).collect();
        assert!(spans_full_aperture(&cells, 8, 10));
    }

    #[test]
    fn full_2x2_is_unique() {
        let cfg = sample_thinned(2, 2, 4, 99).unwrap();
        assert_eq!(cfg.clusters, vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn infeasible_is_rejected() {
        assert!(sample_thinned(3, 3, 1, 0).is_err());
        assert!(sample_thinned(3, 3, 10, 0).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(sample_thinned(6, 6, 9, 5).unwrap(), sample_thinned(6, 6, 9, 5).unwrap());
    }
}
