//! Two-phase learner for the bucket taxonomy. It starts by trusting the
//! baseline. The first mistake happens on a trajectory through some
//! flipped special point, whose leading zeros pin the scale; from then on
//! the learner runs halving over the bucket members at that scale that
//! are consistent with the mistaken round. When the horizon is short
//! relative to the scale, that round already determines the bucket index
//! and the candidate set collapses to a singleton on the spot.

use crate::classes::taxonomy::{taxonomy_baseline, taxonomy_member, TaxonomyParams};
use crate::game::{Feedback, OnlineLearner};
use crate::gen::{e2e, Generator};
use crate::token::TokenString;

enum Phase {
    Baseline,
    Bucket { candidates: Vec<(u64, Generator)> },
}

pub struct TaxonomyLearner {
    params: TaxonomyParams,
    baseline: Generator,
    m: u64,
    phase: Phase,
}

impl TaxonomyLearner {
    pub fn new(params: TaxonomyParams, m: u64) -> Result<Self, crate::classes::ClassError> {
        let baseline = taxonomy_baseline(&params)?;
        Ok(TaxonomyLearner { params, baseline, m, phase: Phase::Baseline })
    }

    /// How many bucket members are still candidates; `None` while the
    /// baseline is still trusted.
    pub fn candidates_left(&self) -> Option<usize> {
        match &self.phase {
            Phase::Baseline => None,
            Phase::Bucket { candidates } => Some(candidates.len()),
        }
    }
}

impl OnlineLearner for TaxonomyLearner {
    fn name(&self) -> &str {
        "taxonomy"
    }

    fn predict(&mut self, x: &TokenString) -> u8 {
        match &self.phase {
            Phase::Baseline => e2e(&self.baseline, x, self.m),
            Phase::Bucket { candidates } => {
                assert!(!candidates.is_empty(), "every candidate has been eliminated");
                let ones = candidates
                    .iter()
                    .filter(|(_, g)| e2e(g, x, self.m) == 1)
                    .count();
                u8::from(2 * ones >= candidates.len())
            }
        }
    }

    fn observe(&mut self, x: &TokenString, feedback: &Feedback) {
        match &mut self.phase {
            Phase::Baseline => {
                if feedback.consistent_with(&self.baseline, x, self.m) {
                    return;
                }
                // The baseline just died. Every member disagrees with it
                // only along its own special point, so the instance's
                // leading zeros name the scale to search.
                let s = x.leading_zeros();
                let mut candidates = Vec::new();
                if self.params.contains_s(s) {
                    let (lo, hi) = self.params.k_range(s);
                    for k in lo..=hi {
                        let g = taxonomy_member(&self.params, s, k)
                            .expect("scale was validated by contains_s");
                        if feedback.consistent_with(&g, x, self.m) {
                            candidates.push((k, g));
                        }
                    }
                }
                self.phase = Phase::Bucket { candidates };
            }
            Phase::Bucket { candidates } => {
                candidates.retain(|(_, g)| feedback.consistent_with(g, x, self.m));
            }
        }
    }

    fn clone_box(&self) -> Box<dyn OnlineLearner> {
        let phase = match &self.phase {
            Phase::Baseline => Phase::Baseline,
            Phase::Bucket { candidates } => Phase::Bucket { candidates: candidates.clone() },
        };
        Box::new(TaxonomyLearner {
            params: self.params.clone(),
            baseline: self.baseline.clone(),
            m: self.m,
            phase,
        })
    }
}
