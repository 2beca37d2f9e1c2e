//! Single-token base learners: predictors of one bit from one instance,
//! with no generation loop involved. The trajectory reduction drives one
//! of these through the full game.

use std::collections::HashSet;

use crate::classes::LinearGen;
use crate::gen::{all_bit_strings, Generator};
use crate::token::TokenString;

/// An online predictor in the plain mistake-bound model.
pub trait BaseLearner: Send {
    fn name(&self) -> &str;
    /// `&mut` allows caching; behavior must not depend on past predicts.
    fn predict(&mut self, x: &TokenString) -> u8;
    fn update(&mut self, x: &TokenString, label: u8);
    /// Snapshot with identical future behavior, if the implementation
    /// supports branching search.
    fn try_fork(&self) -> Option<Box<dyn BaseLearner>> {
        None
    }
}

/// Majority vote over the still-consistent base rules.
pub struct BaseHalving {
    rules: Vec<Generator>,
    alive: Vec<bool>,
    name: String,
}

impl BaseHalving {
    pub fn new(name: impl Into<String>, rules: Vec<Generator>) -> Self {
        assert!(!rules.is_empty(), "halving needs at least one rule");
        let alive = vec![true; rules.len()];
        BaseHalving { rules, alive, name: name.into() }
    }

    pub fn alive_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    /// Mistakes can never exceed this.
    pub fn mistake_bound(&self) -> usize {
        (usize::BITS - (self.rules.len() - 1).leading_zeros()) as usize
    }
}

impl BaseLearner for BaseHalving {
    fn name(&self) -> &str {
        &self.name
    }

    fn predict(&mut self, x: &TokenString) -> u8 {
        let mut ones = 0usize;
        let mut total = 0usize;
        for (rule, &alive) in self.rules.iter().zip(&self.alive) {
            if alive {
                total += 1;
                ones += usize::from(rule.next(x) == 1);
            }
        }
        assert!(total > 0, "every base rule has been eliminated");
        u8::from(2 * ones >= total)
    }

    fn update(&mut self, x: &TokenString, label: u8) {
        for (rule, alive) in self.rules.iter().zip(&mut self.alive) {
            *alive = *alive && rule.next(x) == label;
        }
    }

    fn try_fork(&self) -> Option<Box<dyn BaseLearner>> {
        Some(Box::new(BaseHalving {
            rules: self.rules.clone(),
            alive: self.alive.clone(),
            name: self.name.clone(),
        }))
    }
}

/// Last `d` tokens of `x`, left-padded with zeros to length exactly `d`.
/// Padding is invisible to a linear threshold rule because absent
/// positions contribute nothing to the window sum.
pub fn suffix_projection(x: &TokenString, d: u64) -> TokenString {
    if x.len() >= d {
        x.suffix(d)
    } else {
        TokenString::zeros(d - x.len()).concat(x)
    }
}

/// Every distinct linear threshold rule on `d` binary inputs, one
/// representative per truth table, found by sweeping a small integer
/// grid of weights and biases.
pub fn ltf_rules(d: usize) -> Vec<LinearGen> {
    assert!((1..=4).contains(&d), "rule enumeration is sized for d in 1..=4");
    let domain = all_bit_strings(d as u64);
    let points: Vec<Vec<i64>> =
        domain.iter().map(|x| x.to_vec().iter().map(|&b| i64::from(b)).collect()).collect();
    let mut seen = HashSet::new();
    let mut rules = Vec::new();
    let mut w = vec![-6i64; d];
    loop {
        for b in -12..=12i64 {
            let mut table = 0u16;
            for (j, p) in points.iter().enumerate() {
                let sum: i64 = w.iter().zip(p).map(|(wi, xi)| wi * xi).sum();
                if sum + b >= 0 {
                    table |= 1 << j;
                }
            }
            if seen.insert(table) {
                rules.push(LinearGen::from_ints(&w, b));
            }
        }
        let mut i = 0;
        while i < d && w[i] == 6 {
            w[i] = -6;
            i += 1;
        }
        if i == d {
            break;
        }
        w[i] += 1;
    }
    rules
}

/// Halving over all linear threshold rules on the last `d` tokens.
pub fn ltf_halving_base(d: usize) -> BaseHalving {
    let rules = ltf_rules(d).into_iter().map(|r| r.into_generator()).collect();
    BaseHalving::new(format!("halving_ltf{d}"), rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::ts;

    #[test]
    fn threshold_rule_counts_match_the_known_sequence() {
        assert_eq!(ltf_rules(1).len(), 4);
        assert_eq!(ltf_rules(2).len(), 14);
        assert_eq!(ltf_rules(3).len(), 104);
        assert_eq!(ltf_rules(4).len(), 1882);
    }

    #[test]
    fn enumerated_rules_have_distinct_truth_tables() {
        let rules = ltf_rules(2);
        let domain = all_bit_strings(2);
        let mut tables = HashSet::new();
        for rule in &rules {
            let table: Vec<u8> = domain.iter().map(|x| rule.eval(x)).collect();
            assert!(tables.insert(table), "duplicate truth table survived dedup");
        }
    }

    #[test]
    fn suffix_projection_pads_and_truncates() {
        assert_eq!(suffix_projection(&ts("10110"), 3), ts("110"));
        assert_eq!(suffix_projection(&ts("1"), 3), ts("001"));
        assert_eq!(suffix_projection(&ts("11"), 2), ts("11"));
        assert_eq!(suffix_projection(&TokenString::empty(), 2), ts("00"));
    }

    #[test]
    fn projection_is_invisible_to_threshold_rules() {
        for rule in ltf_rules(3) {
            for x in all_bit_strings(2) {
                assert_eq!(rule.eval(&x), rule.eval(&suffix_projection(&x, 3)));
            }
            for x in all_bit_strings(5) {
                assert_eq!(rule.eval(&x), rule.eval(&suffix_projection(&x, 3)));
            }
        }
    }

    #[test]
    fn halving_eliminates_and_respects_its_bound() {
        let mut learner = ltf_halving_base(2);
        let bound = learner.mistake_bound();
        assert_eq!(bound, 4);
        // Play the AND rule against it exhaustively a few epochs.
        let target = LinearGen::from_ints(&[1, 1], -2);
        let mut mistakes = 0;
        for _ in 0..4 {
            for x in all_bit_strings(2) {
                let want = target.eval(&x);
                if learner.predict(&x) != want {
                    mistakes += 1;
                }
                learner.update(&x, want);
            }
        }
        assert!(mistakes <= bound, "{mistakes} mistakes exceeds halving bound {bound}");
        assert!(learner.alive_count() >= 1);
        // After one full epoch the learner is exact on the whole domain.
        for x in all_bit_strings(2) {
            assert_eq!(learner.predict(&x), target.eval(&x));
        }
    }

    #[test]
    fn fork_preserves_behavior() {
        let mut learner = ltf_halving_base(1);
        learner.update(&ts("0"), 1);
        let mut fork = learner.try_fork().unwrap();
        for x in all_bit_strings(1) {
            assert_eq!(learner.predict(&x), fork.predict(&x));
        }
        // Diverge the fork; the original must not move. The survivors of
        // the first update are the rules mapping 0 to 1, which split on
        // input 1, and the tie-break predicts 1 until the fork's update
        // forces 0.
        fork.update(&ts("1"), 0);
        assert_eq!(learner.predict(&ts("1")), 1);
        assert_eq!(fork.predict(&ts("1")), 0);
    }
}
