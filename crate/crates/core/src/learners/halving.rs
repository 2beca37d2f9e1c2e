//! Version-space majority learner for the full game.

use crate::game::{Feedback, OnlineLearner};
use crate::gen::{e2e, Generator};
use crate::token::TokenString;

/// Keeps every member consistent with all feedback so far and predicts
/// the majority final token among them, ties going to 1. Each mistaken
/// round with final-token feedback removes at least half the survivors;
/// trajectory feedback can only remove more.
pub struct HalvingLearner {
    class: Vec<Generator>,
    alive: Vec<bool>,
    m: u64,
}

impl HalvingLearner {
    pub fn new(class: &[Generator], m: u64) -> Self {
        assert!(!class.is_empty(), "halving needs at least one member");
        HalvingLearner { class: class.to_vec(), alive: vec![true; class.len()], m }
    }

    pub fn alive_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn mistake_bound(&self) -> usize {
        (usize::BITS - (self.class.len() - 1).leading_zeros()) as usize
    }
}

impl OnlineLearner for HalvingLearner {
    fn name(&self) -> &str {
        "halving"
    }

    fn predict(&mut self, x: &TokenString) -> u8 {
        let mut ones = 0usize;
        let mut total = 0usize;
        for (g, &alive) in self.class.iter().zip(&self.alive) {
            if alive {
                total += 1;
                ones += usize::from(e2e(g, x, self.m) == 1);
            }
        }
        assert!(total > 0, "every member has been eliminated");
        u8::from(2 * ones >= total)
    }

    fn observe(&mut self, x: &TokenString, feedback: &Feedback) {
        for (g, alive) in self.class.iter().zip(&mut self.alive) {
            *alive = *alive && feedback.consistent_with(g, x, self.m);
        }
    }

    fn clone_box(&self) -> Box<dyn OnlineLearner> {
        Box::new(HalvingLearner { class: self.class.clone(), alive: self.alive.clone(), m: self.m })
    }
}
