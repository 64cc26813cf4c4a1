//! Genetic search over an indexed configuration space.
//!
//! A chromosome is the binary form of a configuration index. Parents are
//! drawn by roulette wheel on shifted fitness, recombined by single-point
//! crossover and mutated by flipping one bit. Indices beyond the space are
//! folded back by modulo. The best chromosome seen so far always survives.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const SHIFT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population: usize,
    pub crossover: f64,
    pub mutation: f64,
    pub generations: usize,
    /// Stop as soon as the best fitness reaches this value.
    pub threshold: Option<f64>,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig { population: 20, crossover: 0.9, mutation: 0.1, generations: 300, threshold: None, seed: 1 }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return invalid("population must hold at least two chromosomes");
        }
        if !(0.0..=1.0).contains(&self.crossover) || !(0.0..=1.0).contains(&self.mutation) {
            return invalid("crossover and mutation probabilities must lie in [0, 1]");
        }
        Ok(())
    }
}

/// `⌈log2 n⌉`, at least one bit.
pub fn chromosome_bits(size: u128) -> u32 {
    if size <= 2 {
        1
    } else {
        128 - (size - 1).leading_zeros()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaResult {
    pub best_index: u128,
    pub best_fitness: f64,
    /// Best-so-far fitness after the initial population and after each
    /// generation.
    pub trace: Vec<f64>,
    pub generations: usize,
    /// Distinct indices evaluated.
    pub evaluations: usize,
    /// Every evaluated `(index, fitness)`, sorted by index.
    pub evaluated: Vec<(u128, f64)>,
}

struct Search<'a, F> {
    size: u128,
    bits: u32,
    cache: HashMap<u128, f64>,
    fitness: &'a F,
}

impl<F: Fn(u128) -> Result<f64> + Sync> Search<'_, F> {
    fn evaluate(&mut self, pop: &[u128]) -> Result<Vec<f64>> {
        let mut todo: Vec<u128> = pop.iter().copied().filter(|i| !self.cache.contains_key(i)).collect();
        todo.sort_unstable();
        todo.dedup();
        let f = self.fitness;
        let fresh: Vec<(u128, f64)> = todo.into_par_iter().map(|i| f(i).map(|v| (i, v))).collect::<Result<_>>()?;
        self.cache.extend(fresh);
        Ok(pop.iter().map(|i| self.cache[i]).collect())
    }

    fn repair(&self, x: u128) -> u128 {
        x % self.size
    }

    fn mask(&self) -> u128 {
        if self.bits == 128 {
            u128::MAX
        } else {
            (1u128 << self.bits) - 1
        }
    }
}

fn roulette(rng: &mut ChaCha8Rng, weights: &[f64], total: f64) -> usize {
    let mut x = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return i;
        }
        x -= w;
    }
    weights.len() - 1
}

fn best_of(pop: &[u128], fit: &[f64]) -> (u128, f64) {
    let mut b = 0;
    for i in 1..pop.len() {
        if fit[i] > fit[b] {
            b = i;
        }
    }
    (pop[b], fit[b])
}

/// Maximizes `fitness` over indices `0..size`.
pub fn ga_search<F>(size: u128, cfg: &GaConfig, fitness: F) -> Result<GaResult>
where
    F: Fn(u128) -> Result<f64> + Sync,
{
    cfg.validate()?;
    if size == 0 {
        return invalid("the configuration space is empty");
    }
    let mut s = Search { size, bits: chromosome_bits(size), cache: HashMap::new(), fitness: &fitness };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let a = cfg.population;

    let mut pop: Vec<u128> = Vec::with_capacity(a);
    if size == 1 {
        pop.push(0);
    } else if size >= a as u128 {
        let mut seen = std::collections::HashSet::new();
        while pop.len() < a {
            let x = rng.gen_range(0..size);
            if seen.insert(x) {
                pop.push(x);
            }
        }
    } else {
        pop.extend(0..size);
        while pop.len() < a {
            pop.push(rng.gen_range(0..size));
        }
    }
    let mut fit = s.evaluate(&pop)?;
    let (mut best, mut best_fit) = best_of(&pop, &fit);
    let mut trace = vec![best_fit];
    let reached = |f: f64| cfg.threshold.is_some_and(|t| f >= t);

    let mut generation = 0;
    while generation < cfg.generations && size > 1 && !reached(best_fit) {
        generation += 1;
        let low = fit.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = fit.iter().map(|f| f - (low - SHIFT_EPS)).collect();
        let total: f64 = weights.iter().sum();

        let mut next = Vec::with_capacity(a + 1);
        while next.len() < a {
            let p1 = pop[roulette(&mut rng, &weights, total)];
            let p2 = pop[roulette(&mut rng, &weights, total)];
            let (mut c1, mut c2) = (p1, p2);
            if s.bits > 1 && rng.gen::<f64>() < cfg.crossover {
                // Keep the top `bits - cut` bits of one parent and the low
                // `cut` bits of the other.
                let cut = rng.gen_range(1..s.bits);
                let low_mask = (1u128 << cut) - 1;
                let high_mask = s.mask() & !low_mask;
                c1 = (p1 & high_mask) | (p2 & low_mask);
                c2 = (p2 & high_mask) | (p1 & low_mask);
            }
            for c in [&mut c1, &mut c2] {
                if rng.gen::<f64>() < cfg.mutation {
                    *c ^= 1u128 << rng.gen_range(0..s.bits);
                }
                *c = s.repair(*c);
            }
            next.push(c1);
            next.push(c2);
        }
        next.truncate(a);
        let mut next_fit = s.evaluate(&next)?;
        if !next.contains(&best) {
            let worst = (0..a).fold(0, |w, i| if next_fit[i] < next_fit[w] { i } else { w });
            next[worst] = best;
            next_fit[worst] = best_fit;
        }
        pop = next;
        fit = next_fit;
        let (b, bf) = best_of(&pop, &fit);
        if bf > best_fit {
            best = b;
            best_fit = bf;
        }
        trace.push(best_fit);
    }

    let mut evaluated: Vec<(u128, f64)> = s.cache.into_iter().collect();
    evaluated.sort_by_key(|e| e.0);
    Ok(GaResult { best_index: best, best_fitness: best_fit, trace, generations: generation, evaluations: evaluated.len(), evaluated })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_counts() {
        assert_eq!(chromosome_bits(1), 1);
        assert_eq!(chromosome_bits(2), 1);
        assert_eq!(chromosome_bits(3), 2);
        assert_eq!(chromosome_bits(36), 6);
        assert_eq!(chromosome_bits(64), 6);
        assert_eq!(chromosome_bits(65), 7);
    }

    #[test]
    fn single_member_space() {
        let r = ga_search(1, &GaConfig::default(), |_| Ok(3.0)).unwrap();
        assert_eq!((r.best_index, r.generations, r.trace.clone()), (0, 0, vec![3.0]));
    }

    #[test]
    fn finds_peak_of_small_space() {
        let cfg = GaConfig { generations: 60, ..Default::default() };
        let r = ga_search(36, &cfg, |i| Ok(-((i as f64) - 23.0).powi(2))).unwrap();
        assert_eq!(r.best_index, 23);
        assert!(r.trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn zero_generations_returns_initial_best() {
        let cfg = GaConfig { generations: 0, ..Default::default() };
        let r = ga_search(1000, &cfg, |i| Ok(i as f64)).unwrap();
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.best_fitness, r.best_index as f64);
        assert_eq!(r.evaluations, 20);
    }

    #[test]
    fn threshold_stops_early() {
        let cfg = GaConfig { threshold: Some(0.0), ..Default::default() };
        let r = ga_search(100, &cfg, |_| Ok(1.0)).unwrap();
        assert_eq!(r.generations, 0);
    }

    #[test]
    fn huge_spaces_stay_in_range() {
        let size = 10u128.pow(23) + 7;
        let cfg = GaConfig { generations: 5, ..Default::default() };
        let r = ga_search(size, &cfg, |i| Ok((i % 1000) as f64)).unwrap();
        assert!(r.evaluated.iter().all(|(i, _)| *i < size));
    }
}
