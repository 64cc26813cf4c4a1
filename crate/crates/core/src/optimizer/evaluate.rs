use rayon::prelude::*;

use crate::array::{RxArray, TxArray};
use crate::beamforming::{build_precoder, rx_codebook, tx_codebook, Architecture, Codebook, Codebooks};
use crate::channel::{draw_metadata, reconstruct_h, ChannelMetadata, ChannelParams};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::metrics::{
    eta_linear, sidelobe_level_in, sinr, spectral_efficiency, AngularGrid, MetricReport, PatternEngine, RealizationMetrics,
};
use crate::scenario::ScenarioConfig;
use crate::tiling::ArrayConfig;

/// A fixed batch of channel draws shared by every configuration evaluated
/// against it. Realization `i` is drawn from seed `seed_base + i`.
#[derive(Debug, Clone)]
pub struct RealizationSet {
    pub seed_base: u64,
    pub metadata: Vec<ChannelMetadata>,
}

impl RealizationSet {
    pub fn draw(params: &ChannelParams, seed_base: u64, n: usize) -> Result<Self> {
        params.validate()?;
        let metadata = (0..n as u64)
            .into_par_iter()
            .map(|i| draw_metadata(params, seed_base.wrapping_add(i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(RealizationSet { seed_base, metadata })
    }

    pub fn len(&self) -> usize {
        self.metadata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.metadata.is_empty()
    }
}

/// Per-configuration state reused across realizations.
struct Prepared {
    tx: TxArray,
    codebooks: Option<Codebooks>,
    engine: Option<PatternEngine>,
}

/// Evaluates configurations under one scenario.
///
/// The receive array, its codebook and the SLL grid are built once and
/// shared read-only.
pub struct Evaluator {
    scenario: ScenarioConfig,
    rx: RxArray,
    rx_codebook: Codebook,
    sll_grid: AngularGrid,
}

/// Outcome of one realization, before averaging.
enum Outcome {
    Ok { gamma_per_eta: Vec<Vec<f64>>, sll: Option<Vec<f64>> },
    Skipped,
}

impl Evaluator {
    pub fn new(scenario: &ScenarioConfig) -> Result<Self> {
        scenario.validate()?;
        let rx = scenario.rx_array()?;
        let rx_codebook = rx_codebook(&rx, scenario.codebook_step)?;
        let sll_grid = AngularGrid::new(scenario.sll_step)?;
        Ok(Evaluator { scenario: scenario.clone(), rx, rx_codebook, sll_grid })
    }

    pub fn scenario(&self) -> &ScenarioConfig {
        &self.scenario
    }

    pub fn rx(&self) -> &RxArray {
        &self.rx
    }

    pub fn sll_grid(&self) -> &AngularGrid {
        &self.sll_grid
    }

    /// Same evaluator with a different SLL grid step.
    pub fn with_sll_step(&self, step: f64) -> Result<Self> {
        let mut scenario = self.scenario.clone();
        scenario.sll_step = step;
        Ok(Evaluator {
            sll_grid: AngularGrid::new(step)?,
            scenario,
            rx: self.rx.clone(),
            rx_codebook: self.rx_codebook.clone(),
        })
    }

    pub fn realizations(&self, n: usize) -> Result<RealizationSet> {
        RealizationSet::draw(&self.scenario.channel_params(), self.scenario.seed, n)
    }

    fn prepare(&self, config: &ArrayConfig, arch: Architecture, with_sll: bool) -> Result<Prepared> {
        let tx = self.scenario.tx_array(config)?;
        let codebooks = match arch {
            Architecture::Fd => None,
            _ => Some(Codebooks { tx: tx_codebook(&tx, self.scenario.codebook_step)?, rx: self.rx_codebook.clone() }),
        };
        let engine = if with_sll { Some(PatternEngine::new(tx.layout(), tx.patterns(), &self.sll_grid)?) } else { None };
        Ok(Prepared { tx, codebooks, engine })
    }

    /// Effective channels `H_k P` of one realization.
    pub fn effective_channels(&self, tx: &TxArray, metadata: &ChannelMetadata) -> Vec<CMatrix> {
        metadata
            .receivers
            .iter()
            .map(|r| tx.connection().project(&reconstruct_h(r, tx, &self.rx)))
            .collect()
    }

    fn run_one(&self, prep: &Prepared, arch: Architecture, etas: &[f64], meta: &ChannelMetadata) -> Result<Outcome> {
        let g = self.effective_channels(&prep.tx, meta);
        let precoder = match build_precoder(arch, &g, prep.tx.connection(), prep.codebooks.as_ref()) {
            Ok(p) => p,
            Err(Error::DegenerateChannel(_)) => return Ok(Outcome::Skipped),
            Err(e) => return Err(e),
        };
        let gamma_per_eta = etas.iter().map(|&eta| sinr(&g, &precoder, eta)).collect();
        let sll = match &prep.engine {
            None => None,
            Some(engine) => {
                let mask = self.scenario.mask_for(meta.boresights())?;
                let region = mask.region(engine.grid());
                let mut out = Vec::with_capacity(precoder.streams());
                for k in 0..precoder.streams() {
                    let values = engine.power(&precoder.stream(k))?;
                    out.push(sidelobe_level_in(&values, &region)?);
                }
                Some(out)
            }
        };
        Ok(Outcome::Ok { gamma_per_eta, sll })
    }

    /// Monte-Carlo evaluation at several SNRs with one precoder per
    /// realization (precoders do not depend on the SNR). SLL statistics are
    /// computed when `with_sll` is set.
    pub fn evaluate_multi(
        &self,
        config: &ArrayConfig,
        arch: Architecture,
        eta_db: &[f64],
        set: &RealizationSet,
        with_sll: bool,
    ) -> Result<Vec<MetricReport>> {
        let prep = self.prepare(config, arch, with_sll)?;
        let loss = self.scenario.feed_loss(config.kind);
        let etas: Vec<f64> = eta_db.iter().map(|&e| eta_linear(e, loss)).collect();
        let outcomes: Vec<Outcome> = set
            .metadata
            .par_iter()
            .map(|m| self.run_one(&prep, arch, &etas, m))
            .collect::<Result<Vec<_>>>()?;

        let used = outcomes.iter().filter(|o| matches!(o, Outcome::Ok { .. })).count();
        if used == 0 && !set.is_empty() {
            return Err(Error::Evaluation(format!(
                "all {} realizations were degenerate for {} with {arch}",
                set.len(),
                config.kind
            )));
        }
        let skipped = set.len() - used;

        let mut reports = Vec::with_capacity(eta_db.len());
        for (ei, &eta) in eta_db.iter().enumerate() {
            let mut per = Vec::with_capacity(used);
            for (o, meta) in outcomes.iter().zip(&set.metadata) {
                if let Outcome::Ok { gamma_per_eta, sll } = o {
                    let (rates, sum_se) = spectral_efficiency(&gamma_per_eta[ei]);
                    per.push(RealizationMetrics { seed: meta.seed, sinr: gamma_per_eta[ei].clone(), rates, sum_se, sll_db: sll.clone() });
                }
            }
            reports.push(summarize(config, arch, eta, loss, skipped, per));
        }
        Ok(reports)
    }

    pub fn evaluate(
        &self,
        config: &ArrayConfig,
        arch: Architecture,
        eta_db: f64,
        set: &RealizationSet,
        with_sll: bool,
    ) -> Result<MetricReport> {
        Ok(self.evaluate_multi(config, arch, &[eta_db], set, with_sll)?.remove(0))
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut s, mut n) = (0.0, 0usize);
    for x in xs {
        s += x;
        n += 1;
    }
    (n > 0).then(|| s / n as f64)
}

fn summarize(
    config: &ArrayConfig,
    arch: Architecture,
    eta_db: f64,
    loss: f64,
    skipped: usize,
    per: Vec<RealizationMetrics>,
) -> MetricReport {
    let n = per.len();
    let mean_sum_se = mean(per.iter().map(|r| r.sum_se)).unwrap_or(0.0);
    let var = if n > 1 {
        per.iter().map(|r| (r.sum_se - mean_sum_se).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let users = per.first().map_or(0, |r| r.rates.len());
    let mean_rates = (0..users).map(|k| mean(per.iter().map(|r| r.rates[k])).unwrap_or(0.0)).collect();
    let mean_sll_db = mean(per.iter().filter_map(|r| r.sll_db.as_ref()).map(|s| s.iter().copied().fold(f64::NEG_INFINITY, f64::max)));
    let mean_stream_sll_db = mean(per.iter().filter_map(|r| r.sll_db.as_ref()).flat_map(|s| s.iter().copied()));
    MetricReport {
        kind: config.kind.to_string(),
        rows: config.rows,
        cols: config.cols,
        feeds: config.feeds(),
        driven: config.driven_elements(),
        config_index: config.config_index,
        architecture: arch.to_string(),
        eta_db,
        feed_loss_db: loss,
        realizations: n,
        skipped,
        mean_sum_se,
        std_sum_se: var.sqrt(),
        mean_rates,
        mean_sll_db,
        mean_stream_sll_db,
        per_realization: per,
    }
}

/// `(R̄, Φ)` of a configuration over `n` realizations starting at `seed`.
pub fn evaluate_config(
    config: &ArrayConfig,
    arch: Architecture,
    scenario: &ScenarioConfig,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidArgument("at least one realization is required".into()));
    }
    let ev = Evaluator::new(scenario)?;
    let set = RealizationSet::draw(&scenario.channel_params(), seed, n)?;
    let r = ev.evaluate(config, arch, scenario.eta_db, &set, true)?;
    Ok((r.mean_sum_se, r.mean_sll_db.expect("SLL requested")))
}
