use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

use super::{objective, ObjectiveSpec};

/// One evaluated configuration: mean sum SE and SLL in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoSample {
    pub id: u128,
    pub mean_se: f64,
    pub sll_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub id: u128,
    pub mean_se: f64,
    pub sll_db: f64,
    pub dominated: bool,
    /// Objective value at each β of the sweep.
    pub objective: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoSweep {
    pub betas: Vec<f64>,
    /// Points in ascending id order.
    pub points: Vec<ParetoPoint>,
    /// For each β, position in `points` of the winning sample.
    pub winners: Vec<usize>,
}

impl ParetoSweep {
    pub fn front(&self) -> impl Iterator<Item = &ParetoPoint> {
        self.points.iter().filter(|p| !p.dominated)
    }
}

/// `a` dominates `b` under (maximize SE, minimize SLL).
pub fn dominates(a: &ParetoSample, b: &ParetoSample) -> bool {
    a.mean_se >= b.mean_se && a.sll_db <= b.sll_db && (a.mean_se > b.mean_se || a.sll_db < b.sll_db)
}

/// Non-dominated set and the per-β maximizer of the scalarized objective.
///
/// Winners are chosen among non-dominated samples, ties going to the
/// lowest id.
pub fn pareto_sweep(samples: &[ParetoSample], betas: &[f64], r_ref: f64, phi_ref_db: f64) -> Result<ParetoSweep> {
    if samples.is_empty() {
        return invalid("no samples to sweep");
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by_key(|s| s.id);
    let specs: Vec<ObjectiveSpec> =
        betas.iter().map(|&b| ObjectiveSpec::new(b, r_ref, phi_ref_db)).collect::<Result<_>>()?;
    let points: Vec<ParetoPoint> = sorted
        .iter()
        .map(|s| ParetoPoint {
            id: s.id,
            mean_se: s.mean_se,
            sll_db: s.sll_db,
            dominated: sorted.iter().any(|o| dominates(o, s)),
            objective: specs.iter().map(|spec| objective(s.mean_se, s.sll_db, spec)).collect(),
        })
        .collect();
    let winners = (0..betas.len())
        .map(|bi| {
            let mut best: Option<usize> = None;
            for (i, p) in points.iter().enumerate() {
                if p.dominated {
                    continue;
                }
                if best.map_or(true, |b| p.objective[bi] > points[b].objective[bi]) {
                    best = Some(i);
                }
            }
            best.expect("a finite sample set has a non-dominated member")
        })
        .collect();
    Ok(ParetoSweep { betas: betas.to_vec(), points, winners })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(id: u128, se: f64, sll: f64) -> ParetoSample {
        ParetoSample { id, mean_se: se, sll_db: sll }
    }

    #[test]
    fn single_sample_wins_everything() {
        let r = pareto_sweep(&[s(4, 3.0, -12.0)], &[0.0, 0.5, 1.0], 5.0, -16.0).unwrap();
        assert_eq!(r.winners, vec![0, 0, 0]);
        assert_eq!(r.front().count(), 1);
    }

    #[test]
    fn extremes_pick_opposite_corners() {
        let r = pareto_sweep(&[s(0, 5.0, -8.0), s(1, 3.0, -15.0)], &[0.0, 1.0], 5.0, -16.0).unwrap();
        assert_eq!(r.winners, vec![1, 0]);
    }

    #[test]
    fn dominated_points_are_flagged() {
        let r = pareto_sweep(&[s(0, 5.0, -10.0), s(1, 4.0, -9.0), s(2, 5.0, -10.0)], &[0.5], 5.0, -16.0).unwrap();
        assert!(!r.points[0].dominated);
        assert!(r.points[1].dominated);
        assert!(!r.points[2].dominated);
        assert_eq!(r.winners, vec![0]);
    }

    #[test]
    fn empty_is_rejected() {
        assert!(pareto_sweep(&[], &[0.5], 1.0, -10.0).is_err());
    }
}
