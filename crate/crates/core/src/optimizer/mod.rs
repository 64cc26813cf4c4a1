//! Scalarized SE/SLL objective, configuration spaces, genetic search and
//! Pareto sweeps.

mod evaluate;
mod ga;
mod pareto;

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beamforming::Architecture;
use crate::error::{invalid, Error, Result};
use crate::scenario::{GaSection, ScenarioConfig};
use crate::tiling::{build_dictionary, count_thinned, enumerate_exact_covers, sample_thinned, ArrayConfig, ArrayKind, ShapeSet};

pub use evaluate::{evaluate_config, Evaluator, RealizationSet};
pub use ga::{chromosome_bits, ga_search, GaConfig, GaResult};
pub use pareto::{dominates, pareto_sweep, ParetoPoint, ParetoSample, ParetoSweep};

/// Weights of the scalarized objective and the reference it is measured
/// against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub beta: f64,
    /// Reference mean sum SE `R̄_ref`.
    pub r_ref: f64,
    /// Reference SLL `Φ_ref` in dB.
    pub phi_ref_db: f64,
}

impl ObjectiveSpec {
    pub fn new(beta: f64, r_ref: f64, phi_ref_db: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return invalid(format!("beta {beta} is outside [0, 1]"));
        }
        if !(r_ref > 0.0) || !r_ref.is_finite() {
            return invalid("reference sum SE must be positive");
        }
        if !(phi_ref_db < 0.0) || !phi_ref_db.is_finite() {
            return invalid("reference SLL must be negative (dB)");
        }
        Ok(ObjectiveSpec { beta, r_ref, phi_ref_db })
    }
}

/// `β·R̄/R̄_ref + (1 − β)·Φ/Φ_ref`, SLLs in dB.
pub fn objective(mean_se: f64, sll_db: f64, spec: &ObjectiveSpec) -> f64 {
    spec.beta * mean_se / spec.r_ref + (1.0 - spec.beta) * sll_db / spec.phi_ref_db
}

impl From<&GaSection> for GaConfig {
    fn from(g: &GaSection) -> Self {
        GaConfig {
            population: g.population,
            crossover: g.crossover,
            mutation: g.mutation,
            generations: g.generations,
            threshold: g.threshold,
            seed: g.seed,
        }
    }
}

/// Candidate layouts addressed by index.
#[derive(Debug, Clone)]
pub enum ConfigSpace {
    /// An explicit list (tilings found by exact-cover search, or a single
    /// reference layout).
    Enumerated(Vec<ArrayConfig>),
    /// Index `i` maps to a full-aperture thinned layout drawn from a seed
    /// derived from `(seed, i)`. The space size is the exact layout count.
    Thinned { rows: usize, cols: usize, elements: usize, seed: u64, size: u128 },
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn to_u128(x: &BigUint) -> Option<u128> {
    let digits = x.to_u64_digits();
    match digits.len() {
        0 => Some(0),
        1 => Some(u128::from(digits[0])),
        2 => Some(u128::from(digits[0]) | (u128::from(digits[1]) << 64)),
        _ => None,
    }
}

impl ConfigSpace {
    pub fn enumerated(kind: ArrayKind, rows: usize, cols: usize, cap: usize, seed: u64) -> Result<Self> {
        let family = kind
            .shape_family()
            .ok_or_else(|| Error::InvalidArgument(format!("{kind} layouts are not tilings")))?;
        let q = build_dictionary(rows, cols, &ShapeSet::for_family(family))?;
        let configs = enumerate_exact_covers(&q, cap, seed);
        if configs.is_empty() {
            return invalid(format!("{rows}x{cols} board has no {kind} tiling"));
        }
        Ok(ConfigSpace::Enumerated(configs))
    }

    pub fn thinned(rows: usize, cols: usize, elements: usize, seed: u64) -> Result<Self> {
        let count = count_thinned(rows, cols, elements);
        let size = to_u128(&count).ok_or_else(|| Error::InvalidArgument("thinned space exceeds 128-bit indexing".into()))?;
        if size == 0 {
            return invalid(format!("no {elements}-element thinned layout spans a {rows}x{cols} aperture"));
        }
        Ok(ConfigSpace::Thinned { rows, cols, elements, seed, size })
    }

    /// The search space of `kind` under a scenario.
    pub fn for_scenario(scenario: &ScenarioConfig, kind: ArrayKind) -> Result<Self> {
        let (rows, cols) = (scenario.tx.rows, scenario.tx.cols);
        match kind {
            ArrayKind::Fpra => Ok(ConfigSpace::Enumerated(vec![ArrayConfig::fpra(rows, cols)?])),
            ArrayKind::Thinned => Self::thinned(rows, cols, scenario.thinned_elements(), scenario.space.thinned_seed),
            _ => Self::enumerated(kind, rows, cols, scenario.space.enumeration_cap, scenario.space.enumeration_seed),
        }
    }

    pub fn len(&self) -> u128 {
        match self {
            ConfigSpace::Enumerated(v) => v.len() as u128,
            ConfigSpace::Thinned { size, .. } => *size,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, index: u128) -> Result<ArrayConfig> {
        if index >= self.len() {
            return invalid(format!("index {index} outside a space of {}", self.len()));
        }
        match self {
            ConfigSpace::Enumerated(v) => Ok(v[index as usize].clone()),
            ConfigSpace::Thinned { rows, cols, elements, seed, .. } => {
                let mixed = splitmix64(seed ^ splitmix64(index as u64) ^ splitmix64((index >> 64) as u64).rotate_left(17));
                let mut cfg = sample_thinned(*rows, *cols, *elements, mixed)?;
                cfg.config_index = u64::try_from(index).ok();
                Ok(cfg)
            }
        }
    }
}

/// Reference `(R̄_ref, Φ_ref)`: the fully populated array with full digital
/// precoding on the given realizations.
pub fn reference_point(ev: &Evaluator, set: &RealizationSet) -> Result<(f64, f64)> {
    let s = ev.scenario();
    let fpra = ArrayConfig::fpra(s.tx.rows, s.tx.cols)?;
    let r = ev.evaluate(&fpra, Architecture::Fd, s.eta_db, set, true)?;
    Ok((r.mean_sum_se, r.mean_sll_db.expect("SLL requested")))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizeOutcome {
    pub kind: ArrayKind,
    pub architecture: Architecture,
    pub spec: ObjectiveSpec,
    pub best: ArrayConfig,
    pub best_index: u128,
    pub mean_se: f64,
    pub sll_db: f64,
    pub objective: f64,
    pub space_size: u128,
    pub ga: GaResult,
    /// Every configuration evaluated during the search.
    pub samples: Vec<ParetoSample>,
}

/// GA search of `space` with fitness from Monte-Carlo evaluation on `set`.
pub fn optimize(
    ev: &Evaluator,
    space: &ConfigSpace,
    arch: Architecture,
    spec: ObjectiveSpec,
    ga: &GaConfig,
    set: &RealizationSet,
) -> Result<OptimizeOutcome> {
    let eta = ev.scenario().eta_db;
    let seen: Mutex<HashMap<u128, (f64, f64)>> = Mutex::new(HashMap::new());
    let fitness = |i: u128| -> Result<f64> {
        let cfg = space.get(i)?;
        let r = ev.evaluate(&cfg, arch, eta, set, true)?;
        let (se, sll) = (r.mean_sum_se, r.mean_sll_db.expect("SLL requested"));
        seen.lock().expect("sample table").insert(i, (se, sll));
        Ok(objective(se, sll, &spec))
    };
    let res = ga_search(space.len(), ga, fitness)?;
    let seen = seen.into_inner().expect("sample table");
    let mut samples: Vec<ParetoSample> =
        seen.iter().map(|(&id, &(mean_se, sll_db))| ParetoSample { id, mean_se, sll_db }).collect();
    samples.sort_by_key(|s| s.id);
    let (mean_se, sll_db) = seen[&res.best_index];
    let kind = match space {
        ConfigSpace::Enumerated(v) => v[0].kind,
        ConfigSpace::Thinned { .. } => ArrayKind::Thinned,
    };
    Ok(OptimizeOutcome {
        kind,
        architecture: arch,
        spec,
        best: space.get(res.best_index)?,
        best_index: res.best_index,
        mean_se,
        sll_db,
        objective: res.best_fitness,
        space_size: space.len(),
        ga: res,
        samples,
    })
}

/// Evaluates every index of a small space; returns `(index, fitness)` of
/// the maximizer (lowest index on ties) and all fitness values.
pub fn exhaustive<F>(size: u128, fitness: F) -> Result<(u128, f64, Vec<f64>)>
where
    F: Fn(u128) -> Result<f64> + Sync,
{
    if size == 0 {
        return invalid("the configuration space is empty");
    }
    if size > 1 << 20 {
        return invalid(format!("space of {size} is too large for exhaustive search"));
    }
    let all: Vec<f64> = (0..size as u64).into_par_iter().map(|i| fitness(u128::from(i))).collect::<Result<_>>()?;
    let mut best = 0;
    for i in 1..all.len() {
        if all[i] > all[best] {
            best = i;
        }
    }
    Ok((best as u128, all[best], all))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_scores_one() {
        for beta in [0.0, 0.3, 1.0] {
            let spec = ObjectiveSpec::new(beta, 4.2, -16.0).unwrap();
            assert!((objective(4.2, -16.0, &spec) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn objective_extremes() {
        let spec = ObjectiveSpec::new(1.0, 4.0, -16.0).unwrap();
        assert_eq!(objective(2.0, -3.0, &spec), 0.5);
        let spec = ObjectiveSpec::new(0.0, 4.0, -16.0).unwrap();
        assert_eq!(objective(9.0, -32.0, &spec), 2.0);
        assert!(ObjectiveSpec::new(0.5, 0.0, -1.0).is_err());
        assert!(ObjectiveSpec::new(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn thinned_space_indexing() {
        let space = ConfigSpace::thinned(3, 3, 4, 7).unwrap();
        assert_eq!(space.len(), 70);
        let a = space.get(5).unwrap();
        assert_eq!(a, space.get(5).unwrap());
        assert_eq!(a.config_index, Some(5));
        assert!(space.get(70).is_err());
    }

    #[test]
    fn huge_thinned_space_fits() {
        let space = ConfigSpace::thinned(8, 10, 40, 0).unwrap();
        assert!(space.len() > u128::from(u64::MAX));
        let cfg = space.get(space.len() - 1).unwrap();
        assert_eq!(cfg.config_index, None);
        assert_eq!(cfg.feeds(), 40);
    }

    #[test]
    fn enumerated_space() {
        let space = ConfigSpace::enumerated(ArrayKind::Domino, 4, 4, usize::MAX, 0).unwrap();
        assert_eq!(space.len(), 36);
        assert!(ConfigSpace::enumerated(ArrayKind::Thinned, 4, 4, 10, 0).is_err());
    }

    #[test]
    fn exhaustive_picks_lowest_tie() {
        let (i, f, all) = exhaustive(10, |i| Ok(if i == 3 || i == 7 { 5.0 } else { 0.0 })).unwrap();
        assert_eq!((i, f, all.len()), (3, 5.0, 10));
    }
}
