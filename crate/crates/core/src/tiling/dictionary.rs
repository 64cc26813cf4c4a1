use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

use super::config::{ArrayConfig, ArrayKind};
use super::dlx::ExactCover;
use super::shapes::{ShapeFamily, ShapeSet};

/// One tile placement: the covered board cells (sorted) and the shape id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub cells: Vec<usize>,
    pub shape: usize,
}

/// Every placement of every fixed shape inside an `N × M` board.
#[derive(Debug, Clone)]
pub struct DictionaryMatrix {
    rows: usize,
    cols: usize,
    family: ShapeFamily,
    placements: Vec<Placement>,
}

impl DictionaryMatrix {
    pub fn board(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn family(&self) -> ShapeFamily {
        self.family
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    /// Dense 0/1 view, one row per placement and one column per cell.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.placements
            .iter()
            .map(|p| {
                let mut row = vec![0u8; self.rows * self.cols];
                for &c in &p.cells {
                    row[c] = 1;
                }
                row
            })
            .collect()
    }
}

/// Placements are listed by anchor cell (top-left of the bounding box,
/// row-major), then by shape id.
pub fn build_dictionary(rows: usize, cols: usize, shapes: &ShapeSet) -> Result<DictionaryMatrix> {
    if rows == 0 || cols == 0 {
        return invalid(format!("board {rows}x{cols} has no cells"));
    }
    let size = shapes.tile_size();
    if (rows * cols) % size != 0 {
        return invalid(format!("{rows}x{cols} board cannot be split into tiles of {size} cells"));
    }
    let mut seen = HashSet::new();
    let mut placements = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            for (id, shape) in shapes.shapes().iter().enumerate() {
                if r + shape.height() > rows || c + shape.width() > cols {
                    continue;
                }
                let mut cells: Vec<usize> = shape.cells().iter().map(|&(dr, dc)| (r + dr) * cols + c + dc).collect();
                cells.sort_unstable();
                if seen.insert(cells.clone()) {
                    placements.push(Placement { cells, shape: id });
                }
            }
        }
    }
    Ok(DictionaryMatrix { rows, cols, family: shapes.family(), placements })
}

fn kind_of(family: ShapeFamily) -> ArrayKind {
    match family {
        ShapeFamily::Domino => ArrayKind::Domino,
        ShapeFamily::Tetromino => ArrayKind::Tetromino,
    }
}

/// Enumerates distinct tilings depth-first with Algorithm X, stopping after
/// `cap` covers.
///
/// `seed` fixes the order in which placements are tried within each cell,
/// so a capped run returns a reproducible but seed-dependent subset.
/// `config_index` is the discovery order.
pub fn enumerate_exact_covers(q: &DictionaryMatrix, cap: usize, seed: u64) -> Vec<ArrayConfig> {
    let mut order: Vec<usize> = (0..q.placements.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut x = ExactCover::new(q.rows * q.cols);
    for &p in &order {
        x.add_option(&q.placements[p].cells);
    }
    let kind = kind_of(q.family);
    x.solutions(cap)
        .into_iter()
        .enumerate()
        .map(|(i, sol)| {
            let clusters = sol.iter().map(|&opt| q.placements[order[opt]].cells.clone()).collect();
            ArrayConfig::new(kind, q.rows, q.cols, clusters, Some(i as u64)).expect("exact cover is a valid tiling")
        })
        .collect()
}

/// First tiling found under the placement order drawn from `seed`.
pub fn random_tiling(q: &DictionaryMatrix, seed: u64) -> Option<ArrayConfig> {
    enumerate_exact_covers(q, 1, seed).pop().map(|mut c| {
        c.config_index = None;
        c
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domino_2x2_dictionary() {
        let q = build_dictionary(2, 2, &ShapeSet::domino()).unwrap();
        assert_eq!(q.len(), 4);
        assert!(q.to_dense().iter().all(|r| r.iter().map(|&x| x as usize).sum::<usize>() == 2));
    }

    #[test]
    fn indivisible_board_is_rejected() {
        assert!(build_dictionary(1, 1, &ShapeSet::domino()).is_err());
        assert!(build_dictionary(3, 3, &ShapeSet::tetromino()).is_err());
    }

    #[test]
    fn small_enumerations() {
        let q = build_dictionary(2, 2, &ShapeSet::domino()).unwrap();
        assert_eq!(enumerate_exact_covers(&q, 10, 0).len(), 2);
        let q = build_dictionary(2, 3, &ShapeSet::domino()).unwrap();
        let all = enumerate_exact_covers(&q, 10, 0);
        assert_eq!(all.len(), 3);
        assert_eq!(all.iter().map(|c| c.config_index).collect::<Vec<_>>(), vec![Some(0), Some(1), Some(2)]);
        assert_eq!(enumerate_exact_covers(&q, 2, 0).len(), 2);
    }

    #[test]
    fn single_square_tetromino() {
        let q = build_dictionary(2, 2, &ShapeSet::tetromino()).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(enumerate_exact_covers(&q, 10, 3).len(), 1);
    }

    #[test]
    fn seed_changes_order_not_set() {
        let q = build_dictionary(4, 4, &ShapeSet::domino()).unwrap();
        let mut a: Vec<_> = enumerate_exact_covers(&q, usize::MAX, 1).into_iter().map(|c| c.clusters).collect();
        let mut b: Vec<_> = enumerate_exact_covers(&q, usize::MAX, 2).into_iter().map(|c| c.clusters).collect();
        assert_eq!(a.len(), 36);
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
