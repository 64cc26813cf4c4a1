use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// A fixed polyomino as `(row, col)` offsets, normalized so the minimum row
/// and column are zero and the cells are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    cells: Vec<(usize, usize)>,
}

impl Shape {
    fn from_signed(cells: &[(i32, i32)]) -> Shape {
        let r0 = cells.iter().map(|c| c.0).min().unwrap_or(0);
        let c0 = cells.iter().map(|c| c.1).min().unwrap_or(0);
        let mut cells: Vec<(usize, usize)> =
            cells.iter().map(|&(r, c)| ((r - r0) as usize, (c - c0) as usize)).collect();
        cells.sort_unstable();
        Shape { cells }
    }

    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    pub fn size(&self) -> usize {
        self.cells.len()
    }

    pub fn height(&self) -> usize {
        self.cells.iter().map(|c| c.0).max().map_or(0, |r| r + 1)
    }

    pub fn width(&self) -> usize {
        self.cells.iter().map(|c| c.1).max().map_or(0, |c| c + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeFamily {
    Domino,
    Tetromino,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSet {
    family: ShapeFamily,
    shapes: Vec<Shape>,
}

impl ShapeSet {
    /// Horizontal then vertical domino.
    pub fn domino() -> Self {
        ShapeSet {
            family: ShapeFamily::Domino,
            shapes: vec![Shape::from_signed(&[(0, 0), (0, 1)]), Shape::from_signed(&[(0, 0), (1, 0)])],
        }
    }

    /// The 19 fixed tetrominoes: every distinct rotation and reflection of
    /// the five free ones.
    pub fn tetromino() -> Self {
        let free: [[(i32, i32); 4]; 5] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)], // I
            [(0, 0), (0, 1), (1, 0), (1, 1)], // O
            [(0, 0), (0, 1), (0, 2), (1, 1)], // T
            [(0, 1), (0, 2), (1, 0), (1, 1)], // S
            [(0, 0), (1, 0), (2, 0), (2, 1)], // L
        ];
        let mut fixed = BTreeSet::new();
        for base in free {
            for mirror in [false, true] {
                let mut cells: Vec<(i32, i32)> =
                    base.iter().map(|&(r, c)| if mirror { (r, -c) } else { (r, c) }).collect();
                for _ in 0..4 {
                    fixed.insert(Shape::from_signed(&cells));
                    cells = cells.iter().map(|&(r, c)| (c, -r)).collect();
                }
            }
        }
        ShapeSet { family: ShapeFamily::Tetromino, shapes: fixed.into_iter().collect() }
    }

    pub fn for_family(family: ShapeFamily) -> Self {
        match family {
            ShapeFamily::Domino => Self::domino(),
            ShapeFamily::Tetromino => Self::tetromino(),
        }
    }

    pub fn family(&self) -> ShapeFamily {
        self.family
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    /// Cells per tile.
    pub fn tile_size(&self) -> usize {
        match self.family {
            ShapeFamily::Domino => 2,
            ShapeFamily::Tetromino => 4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_counts() {
        assert_eq!(ShapeSet::domino().shapes().len(), 2);
        let t = ShapeSet::tetromino();
        assert_eq!(t.shapes().len(), 19);
        assert!(t.shapes().iter().all(|s| s.size() == 4));
    }

    #[test]
    fn tetromino_bounding_boxes() {
        let t = ShapeSet::tetromino();
        let straight = t.shapes().iter().filter(|s| (s.height(), s.width()) == (1, 4) || (s.height(), s.width()) == (4, 1));
        assert_eq!(straight.count(), 2);
        let square = t.shapes().iter().filter(|s| (s.height(), s.width()) == (2, 2));
        assert_eq!(square.count(), 1);
    }
}
