//! Adversary strategies for the online game.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dims::LittlestoneTree;
use crate::game::run::Adversary;
use crate::game::transcript::{Feedback, FeedbackMode};
use crate::gen::Generator;
use crate::rng::stream_rng;
use crate::token::TokenString;

/// Plays a fixed instance sequence and answers truthfully for one target
/// generator.
pub struct FixedTargetAdversary {
    target: Generator,
    instances: Vec<TokenString>,
    cursor: usize,
    mode: FeedbackMode,
    m: u64,
    name: String,
}

impl FixedTargetAdversary {
    pub fn new(
        target: Generator,
        instances: Vec<TokenString>,
        mode: FeedbackMode,
        m: u64,
    ) -> Self {
        let name = format!("target({})", target.id());
        FixedTargetAdversary { target, instances, cursor: 0, mode, m, name }
    }
}

impl Adversary for FixedTargetAdversary {
    fn name(&self) -> &str {
        &self.name
    }

    fn choose_instance(&mut self, _round: usize) -> Option<TokenString> {
        let x = self.instances.get(self.cursor)?.clone();
        self.cursor += 1;
        Some(x)
    }

    fn feedback(&mut self, x: &TokenString, _prediction: u8) -> Feedback {
        Feedback::from_generator(&self.target, x, self.m, self.mode)
    }
}

/// Walks a mistake tree: asks the current node's instance, answers the
/// opposite of the prediction, and descends the matching edge. Sound only
/// against a class that realizes every branch of the tree end to end, in
/// which case it forces a mistake per internal node.
pub struct TreeAdversary {
    current: LittlestoneTree,
}

impl TreeAdversary {
    pub fn new(tree: LittlestoneTree) -> Self {
        TreeAdversary { current: tree }
    }
}

impl Adversary for TreeAdversary {
    fn name(&self) -> &str {
        "tree"
    }

    fn choose_instance(&mut self, _round: usize) -> Option<TokenString> {
        match &self.current {
            LittlestoneTree::Leaf => None,
            LittlestoneTree::Node { instance, .. } => Some(instance.clone()),
        }
    }

    fn feedback(&mut self, _x: &TokenString, prediction: u8) -> Feedback {
        let bit = 1 - prediction;
        let next = match std::mem::replace(&mut self.current, LittlestoneTree::Leaf) {
            LittlestoneTree::Leaf => LittlestoneTree::Leaf,
            LittlestoneTree::Node { zero, one, .. } => {
                if bit == 0 {
                    *zero
                } else {
                    *one
                }
            }
        };
        self.current = next;
        Feedback::E2e { bit }
    }
}

/// Seeded adversary that keeps playing instances on which the still-alive
/// members disagree, answering with a random consistent feedback value and
/// preferring ones that contradict the prediction. Stops once no instance
/// splits the alive set.
pub struct RandomConsistentAdversary {
    class: Vec<Generator>,
    pool: Vec<TokenString>,
    alive: Vec<bool>,
    m: u64,
    mode: FeedbackMode,
    rng: rand_chacha::ChaCha12Rng,
}

impl RandomConsistentAdversary {
    pub fn new(
        seed: u64,
        class: Vec<Generator>,
        pool: Vec<TokenString>,
        m: u64,
        mode: FeedbackMode,
    ) -> Self {
        let alive = vec![true; class.len()];
        RandomConsistentAdversary { class, pool, alive, m, mode, rng: stream_rng(seed, 0) }
    }

    fn options_at(&self, x: &TokenString) -> BTreeMap<Feedback, Vec<usize>> {
        let mut options: BTreeMap<Feedback, Vec<usize>> = BTreeMap::new();
        for (i, member) in self.class.iter().enumerate() {
            if self.alive[i] {
                let fb = Feedback::from_generator(member, x, self.m, self.mode);
                options.entry(fb).or_default().push(i);
            }
        }
        options
    }
}

impl Adversary for RandomConsistentAdversary {
    fn name(&self) -> &str {
        "random_consistent"
    }

    fn choose_instance(&mut self, _round: usize) -> Option<TokenString> {
        let splitting: Vec<&TokenString> =
            self.pool.iter().filter(|x| self.options_at(x).len() >= 2).collect();
        splitting.choose(&mut self.rng).map(|x| (*x).clone())
    }

    fn feedback(&mut self, x: &TokenString, prediction: u8) -> Feedback {
        let options = self.options_at(x);
        assert!(!options.is_empty(), "adversary asked about an instance with no alive member");
        let contradicting: Vec<&Feedback> =
            options.keys().filter(|fb| fb.final_bit() != prediction).collect();
        let chosen = if contradicting.is_empty() {
            let all: Vec<&Feedback> = options.keys().collect();
            (*all.choose(&mut self.rng).expect("nonempty")).clone()
        } else {
            (*contradicting.choose(&mut self.rng).expect("nonempty")).clone()
        };
        let keep = &options[&chosen];
        for (i, slot) in self.alive.iter_mut().enumerate() {
            *slot = *slot && keep.contains(&i);
        }
        chosen
    }
}

/// Lifts a final-token adversary over base inputs `z` into the latched
/// game: instances become `z` followed by `10`, and a base answer `y`
/// becomes the trajectory that repeats `y` for the whole horizon.
pub struct LatchAdversary {
    inner: Box<dyn Adversary>,
    m: u64,
    mode: FeedbackMode,
    name: String,
}

impl LatchAdversary {
    pub fn new(inner: Box<dyn Adversary>, m: u64, mode: FeedbackMode) -> Self {
        let name = format!("latched({})", inner.name());
        LatchAdversary { inner, m, mode, name }
    }
}

impl Adversary for LatchAdversary {
    fn name(&self) -> &str {
        &self.name
    }

    fn choose_instance(&mut self, round: usize) -> Option<TokenString> {
        let z = self.inner.choose_instance(round)?;
        Some(z.concat(&crate::token::ts("10")))
    }

    fn feedback(&mut self, x: &TokenString, prediction: u8) -> Feedback {
        assert!(x.len() >= 2 && x.suffix(2) == crate::token::ts("10"));
        let z = x.prefix(x.len() - 2);
        let y = self.inner.feedback(&z, prediction).final_bit();
        match self.mode {
            FeedbackMode::E2e => Feedback::E2e { bit: y },
            FeedbackMode::Cot => Feedback::Cot {
                tokens: if y == 0 {
                    TokenString::zeros(self.m)
                } else {
                    TokenString::ones(self.m)
                },
            },
        }
    }
}

/// Ask for a uniformly random instance regardless of history; answer like
/// `RandomConsistentAdversary`. Useful as a smoke-test opponent.
pub struct UniformAdversary {
    consistent: RandomConsistentAdversary,
    rounds_left: usize,
}

impl UniformAdversary {
    pub fn new(
        seed: u64,
        class: Vec<Generator>,
        pool: Vec<TokenString>,
        m: u64,
        mode: FeedbackMode,
        rounds: usize,
    ) -> Self {
        UniformAdversary {
            consistent: RandomConsistentAdversary::new(seed, class, pool, m, mode),
            rounds_left: rounds,
        }
    }
}

impl Adversary for UniformAdversary {
    fn name(&self) -> &str {
        "uniform"
    }

    fn choose_instance(&mut self, _round: usize) -> Option<TokenString> {
        if self.rounds_left == 0 {
            return None;
        }
        self.rounds_left -= 1;
        let j = self.consistent.rng.gen_range(0..self.consistent.pool.len());
        Some(self.consistent.pool[j].clone())
    }

    fn feedback(&mut self, x: &TokenString, prediction: u8) -> Feedback {
        self.consistent.feedback(x, prediction)
    }
}
