//! Multi-user precoders: full digital (FD), hybrid fully connected (HFC)
//! and hybrid partially connected (HPC).
//!
//! Hybrid designs follow the two-step recipe: per user, an exhaustive
//! search over RF codebooks maximizes `|w_RFᴴ H_k P f_RF|²`, then a
//! zero-forcing baseband stage inverts the resulting `K × K` effective
//! channel. The FD design combines each user with the dominant left
//! singular vector of `H_k P` and zero-forces the combined rows directly.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::array::{RxArray, TxArray};
use crate::error::{invalid, Error, Result};
use crate::linalg::{cis, dominant_left_singular_vector, singular_values, CMatrix, CVector, C64};
use crate::tiling::ConnectionMatrix;

/// `H̄ H̄ᴴ` is treated as singular at or above this condition number.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    Fd,
    Hfc,
    Hpc,
}

impl Architecture {
    pub const ALL: [Architecture; 3] = [Architecture::Fd, Architecture::Hfc, Architecture::Hpc];

    pub fn as_str(self) -> &'static str {
        match self {
            Architecture::Fd => "fd",
            Architecture::Hfc => "hfc",
            Architecture::Hpc => "hpc",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fd" => Ok(Architecture::Fd),
            "hfc" => Ok(Architecture::Hfc),
            "hpc" => Ok(Architecture::Hpc),
            other => Err(Error::InvalidArgument(format!("unknown architecture '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodebookSide {
    Tx,
    Rx,
}

/// Unit-norm, phase-only beams labelled by their pointing direction.
///
/// Entries are stored as matrix columns. Transmit entries are conjugated
/// steering phases, so `a_TXᵀ f` is coherent in the labelled direction;
/// receive entries are plain steering phases, used through `wᴴ`.
#[derive(Debug, Clone)]
pub struct Codebook {
    side: CodebookSide,
    labels: Vec<(f64, f64)>,
    entries: CMatrix,
}

impl Codebook {
    pub fn side(&self) -> CodebookSide {
        self.side
    }

    pub fn labels(&self) -> &[(f64, f64)] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Vector length.
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> CVector {
        self.entries.column(i).into_owned()
    }

    fn from_points(side: CodebookSide, points: &[(f64, f64)], labels: Vec<(f64, f64)>) -> Self {
        let n = points.len();
        let scale = 1.0 / (n as f64).sqrt();
        let sign = match side {
            CodebookSide::Tx => -1.0,
            CodebookSide::Rx => 1.0,
        };
        let tau = 2.0 * std::f64::consts::PI;
        let entries = CMatrix::from_fn(n, labels.len(), |i, c| {
            let (u, v) = labels[c];
            let (x, y) = points[i];
            cis(sign * tau * (u * x + v * y)) * scale
        });
        Codebook { side, labels, entries }
    }
}

/// Lattice directions `(i·step, j·step)` inside the closed unit disk,
/// `u` index outermost.
pub fn codebook_directions(step: f64) -> Result<Vec<(f64, f64)>> {
    if !(step > 0.0) || !step.is_finite() {
        return invalid("codebook step must be positive");
    }
    let n = (1.0 / step + 1e-9).floor() as i64;
    let mut out = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            let (u, v) = (i as f64 * step, j as f64 * step);
            if u * u + v * v <= 1.0 + 1e-12 {
                out.push((u, v));
            }
        }
    }
    Ok(out)
}

/// Transmit codebook over the feed phase centers.
pub fn tx_codebook(tx: &TxArray, step: f64) -> Result<Codebook> {
    Ok(Codebook::from_points(CodebookSide::Tx, tx.layout().phase_centers(), codebook_directions(step)?))
}

pub fn rx_codebook(rx: &RxArray, step: f64) -> Result<Codebook> {
    Ok(Codebook::from_points(CodebookSide::Rx, rx.grid().positions(), codebook_directions(step)?))
}

pub fn build_codebooks(tx: &TxArray, rx: &RxArray, step: f64) -> Result<(Codebook, Codebook)> {
    Ok((tx_codebook(tx, step)?, rx_codebook(rx, step)?))
}

/// Outcome of the RF codebook search for one user.
#[derive(Debug, Clone)]
pub struct RfSelection {
    pub rx_index: usize,
    pub tx_index: usize,
    pub w: CVector,
    /// Length-`S` RF beam (zero outside the feed block, if restricted).
    pub f: CVector,
    /// `|wᴴ H P f|²` at the optimum.
    pub gain: f64,
}

/// Codebook search against `H_k` through the connection matrix.
pub fn select_rf(h: &CMatrix, p: &ConnectionMatrix, tx_cb: &Codebook, rx_cb: &Codebook) -> RfSelection {
    select_rf_effective(&p.project(h), tx_cb, rx_cb, None)
}

/// Exhaustive search over `rx × tx` entries for an effective channel
/// `g = H_k P`. With `block`, transmit entries are restricted to those
/// feeds and renormalized to unit norm. Ties go to the lowest
/// `(rx_index, tx_index)`.
pub fn select_rf_effective(g: &CMatrix, tx_cb: &Codebook, rx_cb: &Codebook, block: Option<Range<usize>>) -> RfSelection {
    let s = g.ncols();
    assert_eq!(tx_cb.dim(), s, "transmit codebook length must equal the feed count");
    assert_eq!(rx_cb.dim(), g.nrows(), "receive codebook length must equal the receive array size");
    let block = block.unwrap_or(0..s);
    let renorm = (s as f64 / block.len() as f64).sqrt();

    // a[r][s] = (w_r^H g)[s] for s in the block.
    let a = rx_cb.entries().adjoint() * g.columns(block.start, block.len());
    let n_tx = tx_cb.len();
    // Row-major copy of the block rows of the transmit codebook.
    let mut rows = Vec::with_capacity(block.len() * n_tx);
    for si in block.clone() {
        rows.extend(tx_cb.entries().row(si).iter().copied());
    }

    let mut acc = vec![C64::new(0.0, 0.0); n_tx];
    let (mut best, mut best_r, mut best_t) = (-1.0f64, 0, 0);
    for r in 0..rx_cb.len() {
        acc.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (bi, row) in rows.chunks_exact(n_tx).enumerate() {
            let x = a[(r, bi)];
            for (z, &f) in acc.iter_mut().zip(row) {
                *z += x * f;
            }
        }
        for (t, z) in acc.iter().enumerate() {
            let val = z.norm_sqr();
            if val > best {
                best = val;
                best_r = r;
                best_t = t;
            }
        }
    }

    let mut f = CVector::zeros(s);
    for si in block {
        f[si] = tx_cb.entries()[(si, best_t)] * renorm;
    }
    RfSelection {
        rx_index: best_r,
        tx_index: best_t,
        w: rx_cb.entry(best_r),
        f,
        gain: best * renorm * renorm,
    }
}

/// `w_RF,kᴴ H_k P f_RF,j`.
pub fn effective_channel(h: &CMatrix, p: &ConnectionMatrix, w: &CVector, f: &CVector) -> C64 {
    (w.adjoint() * p.project(h) * f)[(0, 0)]
}

/// `K × K` matrix `H̄[k][j] = w_kᴴ G_k f_j` from effective channels `G_k = H_k P`.
pub fn effective_matrix(g: &[CMatrix], combiners: &[CVector], f: &CMatrix) -> CMatrix {
    let k = g.len();
    CMatrix::from_fn(k, f.ncols(), |row, col| (combiners[row].adjoint() * &g[row] * f.column(col))[(0, 0)])
}

/// Right pseudo-inverse `H̄ᴴ (H̄ H̄ᴴ)⁻¹`; fails when `H̄ H̄ᴴ` is
/// numerically singular.
pub fn zero_forcing(hbar: &CMatrix) -> Result<CMatrix> {
    let sv = singular_values(hbar);
    let (max, min) = (sv.first().copied().unwrap_or(0.0), sv.iter().copied().fold(f64::INFINITY, f64::min));
    if sv.len() < hbar.nrows() || !(min > 0.0) || (max / min).powi(2) >= MAX_CONDITION {
        return Err(Error::DegenerateChannel(format!("effective channel condition number too large (smax {max:e}, smin {min:e})")));
    }
    let gram = hbar * hbar.adjoint();
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::DegenerateChannel("effective channel Gram matrix is singular".into()))?;
    Ok(hbar.adjoint() * inv)
}

/// ZF baseband stage for a square effective channel.
pub fn zf_baseband(hbar: &CMatrix) -> Result<CMatrix> {
    if hbar.nrows() != hbar.ncols() {
        return invalid("baseband zero forcing expects a square effective channel");
    }
    zero_forcing(hbar)
}

/// Contiguous feed blocks for `k` RF chains; the last block takes any
/// remainder.
pub fn hpc_blocks(s: usize, k: usize) -> Result<Vec<Range<usize>>> {
    if k == 0 || s < k {
        return invalid(format!("cannot split {s} feeds among {k} RF chains"));
    }
    let size = s / k;
    Ok((0..k).map(|i| i * size..if i + 1 == k { s } else { (i + 1) * size }).collect())
}

#[derive(Debug, Clone)]
pub struct Precoder {
    pub architecture: Architecture,
    /// `S × K`. For FD this is the full digital precoder.
    pub f_rf: CMatrix,
    /// `K × K`, already carrying the per-stream power scaling.
    pub f_bb: CMatrix,
    /// `F = F_RF F_BB`.
    pub f: CMatrix,
    /// Unit-norm receive combiners, one per user.
    pub combiners: Vec<CVector>,
    /// Factor applied to each stream by the power normalization.
    pub power_scale: Vec<f64>,
    /// Chosen codebook directions `(tx, rx)` per user (hybrid only).
    pub rf_directions: Vec<((f64, f64), (f64, f64))>,
}

impl Precoder {
    pub fn streams(&self) -> usize {
        self.f.ncols()
    }

    pub fn stream(&self, k: usize) -> Vec<C64> {
        self.f.column(k).iter().copied().collect()
    }
}

/// Scales columns of `f` so that `‖P f_k‖² = N_active / K`.
fn normalize_streams(f: &CMatrix, p: &ConnectionMatrix) -> Result<(CMatrix, Vec<f64>)> {
    let k = f.ncols();
    let target = p.driven() as f64 / k as f64;
    let mut out = f.clone();
    let mut scales = Vec::with_capacity(k);
    for c in 0..k {
        let col: Vec<C64> = f.column(c).iter().copied().collect();
        let power = p.excitation_power(&col);
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::DegenerateChannel(format!("stream {c} has no radiated power")));
        }
        let scale = (target / power).sqrt();
        out.column_mut(c).scale_mut(scale);
        scales.push(scale);
    }
    Ok((out, scales))
}

/// Shared read-only inputs of the hybrid designs.
#[derive(Debug, Clone)]
pub struct Codebooks {
    pub tx: Codebook,
    pub rx: Codebook,
}

/// Builds a precoder from effective channels `G_k = H_k P` (one
/// `N_RX × S` matrix per user). Codebooks are required for the hybrid
/// architectures only.
pub fn build_precoder(arch: Architecture, g: &[CMatrix], p: &ConnectionMatrix, codebooks: Option<&Codebooks>) -> Result<Precoder> {
    let k = g.len();
    if k == 0 {
        return invalid("at least one user is required");
    }
    let s = p.feeds();
    if let Some(bad) = g.iter().find(|m| m.ncols() != s) {
        return invalid(format!("effective channel has {} columns for {s} feeds", bad.ncols()));
    }
    match arch {
        Architecture::Fd => {
            let combiners: Vec<CVector> = g.iter().map(|m| dominant_left_singular_vector(m).0).collect();
            let rows = CMatrix::from_fn(k, s, |r, c| (combiners[r].adjoint() * g[r].column(c))[(0, 0)]);
            let f = zero_forcing(&rows)?;
            let (f, power_scale) = normalize_streams(&f, p)?;
            Ok(Precoder {
                architecture: arch,
                f_rf: f.clone(),
                f_bb: CMatrix::identity(k, k),
                f,
                combiners,
                power_scale,
                rf_directions: Vec::new(),
            })
        }
        Architecture::Hfc | Architecture::Hpc => {
            let cb = codebooks.ok_or_else(|| Error::InvalidArgument(format!("{arch} needs RF codebooks")))?;
            let blocks: Vec<Option<Range<usize>>> = if arch == Architecture::Hpc {
                hpc_blocks(s, k)?.into_iter().map(Some).collect()
            } else {
                vec![None; k]
            };
            let picks: Vec<RfSelection> = g
                .iter()
                .zip(blocks)
                .map(|(m, b)| select_rf_effective(m, &cb.tx, &cb.rx, b))
                .collect();
            let f_rf = CMatrix::from_fn(s, k, |r, c| picks[c].f[r]);
            let combiners: Vec<CVector> = picks.iter().map(|p| p.w.clone()).collect();
            let hbar = effective_matrix(g, &combiners, &f_rf);
            let f_bb = zf_baseband(&hbar)?;
            let (f, power_scale) = normalize_streams(&(&f_rf * &f_bb), p)?;
            let mut f_bb = f_bb;
            for (c, sc) in power_scale.iter().enumerate() {
                f_bb.column_mut(c).scale_mut(*sc);
            }
            let rf_directions = picks.iter().map(|p| (cb.tx.labels()[p.tx_index], cb.rx.labels()[p.rx_index])).collect();
            Ok(Precoder { architecture: arch, f_rf, f_bb, f, combiners, power_scale, rf_directions })
        }
    }
}
