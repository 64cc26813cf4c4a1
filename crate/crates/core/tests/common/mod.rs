// Brute-force references shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

/// All fixed polyominoes of `size` cells, as translation-normalized cell sets.
pub fn fixed_polyominoes(size: usize) -> Vec<Vec<(usize, usize)>> {
    let mut found = BTreeSet::new();
    let cells: Vec<(usize, usize)> = (0..size).flat_map(|r| (0..size).map(move |c| (r, c))).collect();
    let n = cells.len();
    for mask in 0u64..(1 << n) {
        if mask.count_ones() as usize != size {
            continue;
        }
        let set: Vec<(usize, usize)> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| cells[i]).collect();
        // connectivity by flood fill
        let mut seen = vec![set[0]];
        let mut i = 0;
        while i < seen.len() {
            let (r, c) = seen[i];
            for &q in &set {
                if !seen.contains(&q) && r.abs_diff(q.0) + c.abs_diff(q.1) == 1 {
                    seen.push(q);
                }
            }
            i += 1;
        }
        if seen.len() != size {
            continue;
        }
        let r0 = set.iter().map(|p| p.0).min().unwrap();
        let c0 = set.iter().map(|p| p.1).min().unwrap();
        let mut norm: Vec<(usize, usize)> = set.iter().map(|&(r, c)| (r - r0, c - c0)).collect();
        norm.sort_unstable();
        found.insert(norm);
    }
    found.into_iter().collect()
}

/// Tilings of a `rows × cols` board by first-empty-cell recursion.
pub fn brute_tilings(rows: usize, cols: usize, shapes: &[Vec<(usize, usize)>]) -> u64 {
    fn go(filled: &mut Vec<bool>, rows: usize, cols: usize, shapes: &[Vec<(usize, usize)>]) -> u64 {
        let Some(first) = filled.iter().position(|f| !f) else { return 1 };
        let (r, c) = (first / cols, first % cols);
        let mut total = 0;
        for shape in shapes {
            // anchor the shape's first cell (row-major minimum) at the empty cell
            let (ar, ac) = shape[0];
            let placed: Option<Vec<usize>> = shape
                .iter()
                .map(|&(sr, sc)| {
                    let rr = (r + sr).checked_sub(ar)?;
                    let cc = (c + sc).checked_sub(ac)?;
                    (rr < rows && cc < cols && !filled[rr * cols + cc]).then_some(rr * cols + cc)
                })
                .collect();
            if let Some(p) = placed {
                p.iter().for_each(|&i| filled[i] = true);
                total += go(filled, rows, cols, shapes);
                p.iter().for_each(|&i| filled[i] = false);
            }
        }
        total
    }
    go(&mut vec![false; rows * cols], rows, cols, shapes)
}

pub fn brute_thinned(n: usize, m: usize) -> HashMap<usize, u64> {
    let mut counts = HashMap::new();
    for mask in 0u32..(1 << (n * m)) {
        let cells: Vec<usize> = (0..n * m).filter(|&i| mask >> i & 1 == 1).collect();
        let (mut top, mut bottom, mut left, mut right) = (false, false, false, false);
        for &c in &cells {
            top |= c / m == 0;
            bottom |= c / m == n - 1;
            left |= c % m == 0;
            right |= c % m == m - 1;
        }
        if top && bottom && left && right {
            *counts.entry(cells.len()).or_insert(0) += 1;
        }
    }
    counts
}
