//! Independent reference computations checked against the library.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;

use irrarray::array::{RxArray, TxArray};
use irrarray::beamforming::{build_codebooks, build_precoder, select_rf, Architecture};
use irrarray::channel::{draw_channel, reconstruct_h, ChannelParams, ReceiverPaths, Subpath};
use irrarray::geometry::{phase_centers, tx_steering_vector, ElementPattern, Grid, PatternKind};
use irrarray::linalg::{cis, C64};
use irrarray::metrics::{beam_pattern, eta_linear, sidelobe_level, sinr, AngularGrid, SllMask};
use irrarray::tiling::{
    build_dictionary, count_domino, count_thinned, enumerate_exact_covers, sample_thinned, spans_full_aperture,
    ArrayConfig, ShapeSet,
};
use num_bigint::BigUint;

mod common;
use common::{brute_thinned, brute_tilings, fixed_polyominoes};

fn boards(max_cells: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=max_cells).flat_map(move |n| (1..=max_cells / n).map(move |m| (n, m)))
}

/// Uncapped exact-cover count; boards whose area the tile size does not
/// divide are rejected up front and have no tilings.
fn exact_covers(n: usize, m: usize, shapes: &ShapeSet) -> u64 {
    match build_dictionary(n, m, shapes) {
        Ok(q) => enumerate_exact_covers(&q, usize::MAX, 0).len() as u64,
        Err(_) => {
            assert_ne!((n * m) % shapes.tile_size(), 0, "{n}x{m} rejected");
            0
        }
    }
}

#[test]
fn polyomino_families() {
    assert_eq!(fixed_polyominoes(2).len(), 2);
    assert_eq!(fixed_polyominoes(4).len(), 19);
    assert_eq!(ShapeSet::tetromino().shapes().len(), 19);
}

#[test]
fn domino_counts_match_brute_force() {
    let dominoes = fixed_polyominoes(2);
    for (n, m) in boards(24) {
        let brute = brute_tilings(n, m, &dominoes);
        assert_eq!(count_domino(n, m), BigUint::from(brute), "{n}x{m}");
        assert_eq!(exact_covers(n, m, &ShapeSet::domino()), brute, "{n}x{m} exact cover");
    }
}

#[test]
fn tetromino_tilings_match_brute_force() {
    let tetrominoes = fixed_polyominoes(4);
    for (n, m) in boards(24) {
        let brute = brute_tilings(n, m, &tetrominoes);
        assert_eq!(exact_covers(n, m, &ShapeSet::tetromino()), brute, "{n}x{m}");
    }
}

#[test]
fn tetromino_placements_are_connected_subsets() {
    // every connected 4-cell subset of a 4x5 board is exactly one placement
    let (rows, cols) = (4, 5);
    let q = build_dictionary(rows, cols, &ShapeSet::tetromino()).unwrap();
    let placed: BTreeSet<Vec<usize>> = q.placements().iter().map(|p| p.cells.clone()).collect();
    assert_eq!(placed.len(), q.len());
    let mut expected = BTreeSet::new();
    for shape in fixed_polyominoes(4) {
        let h = shape.iter().map(|p| p.0).max().unwrap() + 1;
        let w = shape.iter().map(|p| p.1).max().unwrap() + 1;
        for r in 0..rows {
            for c in 0..cols {
                if r + h <= rows && c + w <= cols {
                    let mut cells: Vec<usize> = shape.iter().map(|&(sr, sc)| (r + sr) * cols + c + sc).collect();
                    cells.sort_unstable();
                    expected.insert(cells);
                }
            }
        }
    }
    assert_eq!(placed, expected);
}

#[test]
fn thinned_counts_match_brute_force() {
    for n in 1..=4 {
        for m in 1..=4 {
            let brute = brute_thinned(n, m);
            for s in 0..=n * m {
                let expected = brute.get(&s).copied().unwrap_or(0);
                assert_eq!(count_thinned(n, m, s), BigUint::from(expected), "{n}x{m} s={s}");
            }
        }
    }
}

#[test]
fn thinned_sampling_is_uniform() {
    // 3x3 boards with 4 elements: 70 layouts, chi-square against uniform
    let draws = 14_000u64;
    let mut hist: HashMap<Vec<usize>, u64> = HashMap::new();
    for seed in 0..draws {
        let cfg = sample_thinned(3, 3, 4, seed).unwrap();
        let cells: Vec<usize> = cfg.clusters.iter().map(|c| c[0]).collect();
        assert!(spans_full_aperture(&cells, 3, 3));
        *hist.entry(cells).or_insert(0) += 1;
    }
    assert_eq!(hist.len(), 70);
    let expected = draws as f64 / 70.0;
    let chi2: f64 = hist.values().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    // 69 degrees of freedom, upper 0.1% point
    assert!(chi2 < 111.1, "chi-square {chi2}");
}

fn fpra_layout(rows: usize, cols: usize) -> irrarray::geometry::ClusterLayout {
    let grid = Grid::half_wavelength(rows, cols).unwrap();
    let clusters: Vec<Vec<usize>> = (0..rows * cols).map(|c| vec![c]).collect();
    phase_centers(&grid, &clusters).unwrap()
}

#[test]
fn broadside_principal_cut_first_sidelobe() {
    let layout = fpra_layout(8, 10);
    let patterns = vec![ElementPattern::isotropic(); 80];
    let ones = vec![C64::new(1.0, 0.0); 80];
    let cut = |u: f64| -> f64 {
        let s = tx_steering_vector(&layout, &patterns, u, 0.0).unwrap();
        s.iter().zip(&ones).map(|(a, b)| a * b).sum::<C64>().norm_sqr()
    };
    // closed form along x: 8 rows times a 10-element uniform line
    let analytic = |u: f64| -> f64 {
        if u.abs() < 1e-15 {
            return 6400.0;
        }
        64.0 * ((5.0 * PI * u).sin() / (PI * u / 2.0).sin()).powi(2)
    };
    let peak = cut(0.0);
    assert!((peak - 6400.0).abs() < 1e-8);
    let mut side: f64 = 0.0;
    for i in 0..=20_000 {
        let u = 0.2 + 0.2 * f64::from(i) / 20_000.0;
        let (b, a) = (cut(u), analytic(u));
        assert!((b - a).abs() <= 1e-9 * peak, "u={u}: {b} vs {a}");
        side = side.max(b);
    }
    let db = 10.0 * (side / peak).log10();
    assert!((db - -13.1).abs() < 0.2, "first sidelobe {db} dB");

    // the same cut through the library grid evaluator
    let grid = AngularGrid::new(0.002).unwrap();
    let bp = beam_pattern(&layout, &patterns, &ones, &grid).unwrap();
    for i in 0..=200 {
        let u = -0.4 + 0.004 * f64::from(i);
        let want = analytic(u);
        let got = bp.at(u, 0.0).unwrap();
        assert!((got - want).abs() <= 1e-9 * peak, "u={u}: {got} vs {want}");
    }
}

#[test]
fn two_element_pattern_matches_closed_form() {
    let layout = fpra_layout(1, 2);
    let patterns = vec![ElementPattern::isotropic(); 2];
    let a = vec![C64::new(1.0, 0.0); 2];
    let grid = AngularGrid::new(0.01).unwrap();
    let bp = beam_pattern(&layout, &patterns, &a, &grid).unwrap();
    for (&(u, v), &b) in grid.points().iter().zip(&bp.values) {
        // the element pattern has a null on the horizon
        let want = if u * u + v * v >= 1.0 { 0.0 } else { 4.0 * (PI * u / 2.0).cos().powi(2) };
        assert!((b - want).abs() < 1e-12, "({u}, {v}): {b} vs {want}");
    }
    // sidelobe region |u| >= 0.5: maximum at the region edge, cos²(π/4)
    let mask = SllMask::new(vec![(0.0, 0.0)], 0.5, 10.0).unwrap();
    let sll = sidelobe_level(&bp, &mask).unwrap();
    assert!((sll - 10.0 * 0.5f64.log10()).abs() < 1e-9, "{sll}");
}

fn single_path(departure: (f64, f64), arrival: (f64, f64)) -> ReceiverPaths {
    ReceiverPaths {
        boresight: arrival,
        subpaths: vec![Subpath { path: 0, gain: C64::new(1.0, 0.0), departure, arrival }],
    }
}

#[test]
fn rank_one_channel_recovers_codebook_direction() {
    let cfg = ArrayConfig::fpra(4, 4).unwrap();
    let tx = TxArray::new(cfg, 0.5, 0.5, 4.07).unwrap();
    let rx = RxArray::new(4, 4, 4.07).unwrap();
    let (tx_cb, rx_cb) = build_codebooks(&tx, &rx, 0.1).unwrap();
    for &(dep, arr) in &[((0.3, -0.2), (-0.1, 0.4)), ((0.0, 0.0), (0.5, 0.5)), ((-0.6, 0.1), (0.2, -0.7))] {
        let h = reconstruct_h(&single_path(dep, arr), &tx, &rx);
        let sel = select_rf(&h, tx.connection(), &tx_cb, &rx_cb);
        let (tu, tv) = tx_cb.labels()[sel.tx_index];
        let (ru, rv) = rx_cb.labels()[sel.rx_index];
        assert!((tu - dep.0).abs() < 1e-9 && (tv - dep.1).abs() < 1e-9, "tx {tu},{tv} vs {dep:?}");
        assert!((ru - arr.0).abs() < 1e-9 && (rv - arr.1).abs() < 1e-9, "rx {ru},{rv} vs {arr:?}");
    }
}

#[test]
fn channel_energy_matches_array_gains() {
    // isotropic elements: E‖H‖² = N_RX · N_TX
    let cfg = ArrayConfig::fpra(2, 3).unwrap();
    let tx = TxArray::with_patterns(cfg, 0.5, 0.5, vec![ElementPattern::isotropic(); 6]).unwrap();
    let rx = RxArray::with_pattern(Grid::half_wavelength(2, 2).unwrap(), ElementPattern::isotropic());
    let params = ChannelParams { receivers: 1, ..ChannelParams::default() };
    let draws = 10_000u64;
    let mut total = 0.0;
    for seed in 0..draws {
        let ch = draw_channel(&params, &tx, &rx, seed).unwrap();
        total += ch.h[0].norm_squared();
    }
    let mean = total / draws as f64;
    assert!((mean - 24.0).abs() < 0.05 * 24.0, "mean energy {mean}");
}

#[test]
fn single_user_full_digital_is_matched_filter() {
    // K = 1: γ = η · σ_max² · N_active
    let cfg = ArrayConfig::fpra(4, 4).unwrap();
    let tx = TxArray::new(cfg, 0.5, 0.5, 4.07).unwrap();
    let rx = RxArray::new(2, 2, 4.07).unwrap();
    let params = ChannelParams { receivers: 1, ..ChannelParams::default() };
    for seed in 0..10 {
        let ch = draw_channel(&params, &tx, &rx, seed).unwrap();
        let g = vec![tx.connection().project(&ch.h[0])];
        let pre = build_precoder(Architecture::Fd, &g, tx.connection(), None).unwrap();
        let eta = eta_linear(5.0, 0.0);
        let gamma = sinr(&g, &pre, eta)[0];
        let smax = g[0].singular_values().max();
        let want = eta * smax * smax * 16.0;
        assert!((gamma - want).abs() < 1e-9 * want, "{gamma} vs {want}");
    }
}

#[test]
fn steering_phase_progression() {
    // adjacent half-wavelength elements differ by π·u in phase
    let layout = fpra_layout(1, 4);
    let patterns = vec![ElementPattern::from_gain(PatternKind::Single, 4.07); 4];
    let s = tx_steering_vector(&layout, &patterns, 0.3, 0.0).unwrap();
    for w in s.windows(2) {
        let ratio = w[1] / w[0];
        assert!((ratio - cis(PI * 0.3)).norm() < 1e-12);
    }
}
