//! Reduction from the trajectory game to the plain mistake-bound model.
//! Each round the learner rolls the base predictor forward through its
//! own guesses to produce the final token, then replays the revealed true
//! trajectory into the base as labeled prefix pairs. A final-token
//! mistake always contains a first divergence from the truth, and at that
//! index the base predictor erred on a true prefix it was later taught,
//! so every game mistake charges to a distinct base mistake.

use std::sync::Arc;

use serde::Serialize;

use crate::game::{Feedback, OnlineLearner};
use crate::learners::base::BaseLearner;
use crate::token::TokenString;

/// How the base predictor's state is maintained between rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionMode {
    /// Rebuild the base from its factory and replay the full transcript
    /// of labeled pairs before every prediction.
    FromScratch,
    /// Keep one live base and feed it updates as they arrive. Requires a
    /// base that can fork, so the learner itself stays forkable.
    Incremental,
}

/// One game mistake charged to the base learner: at `divergence` steps
/// into the trajectory, the base mispredicted on this projected true
/// prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChargeRecord {
    pub round: usize,
    pub divergence: u64,
    pub base_instance: TokenString,
    pub true_bit: u8,
}

type Factory = Arc<dyn Fn() -> Box<dyn BaseLearner> + Send + Sync>;
type Projection = Arc<dyn Fn(&TokenString) -> TokenString + Send + Sync>;

pub struct CotReductionLearner {
    factory: Factory,
    projection: Projection,
    m: u64,
    mode: ReductionMode,
    /// Projected (prefix, token) pairs from every observed trajectory.
    transcript: Vec<(TokenString, u8)>,
    live: Option<Box<dyn BaseLearner>>,
    last_rollout: Option<(TokenString, Vec<u8>)>,
    charges: Vec<ChargeRecord>,
    round: usize,
    name: String,
}

impl CotReductionLearner {
    /// `projection` maps a game prefix (instance plus generated tokens so
    /// far) to the base instance the base learner predicts from.
    pub fn new(
        factory: impl Fn() -> Box<dyn BaseLearner> + Send + Sync + 'static,
        projection: impl Fn(&TokenString) -> TokenString + Send + Sync + 'static,
        m: u64,
        mode: ReductionMode,
    ) -> Self {
        assert!(m >= 1);
        let factory: Factory = Arc::new(factory);
        let base = factory();
        let name = format!("reduction({})", base.name());
        let live = match mode {
            ReductionMode::FromScratch => None,
            ReductionMode::Incremental => {
                base.try_fork().expect("incremental mode needs a forkable base");
                Some(base)
            }
        };
        CotReductionLearner {
            factory,
            projection: Arc::new(projection),
            m,
            mode,
            transcript: Vec::new(),
            live,
            last_rollout: None,
            charges: Vec::new(),
            round: 0,
            name,
        }
    }

    /// Identity projection: the base sees whole prefixes.
    pub fn with_identity_projection(
        factory: impl Fn() -> Box<dyn BaseLearner> + Send + Sync + 'static,
        m: u64,
        mode: ReductionMode,
    ) -> Self {
        CotReductionLearner::new(factory, TokenString::clone, m, mode)
    }

    pub fn charges(&self) -> &[ChargeRecord] {
        &self.charges
    }

    /// Base ready to predict under the current transcript.
    fn base_for_prediction(&mut self) -> Box<dyn BaseLearner> {
        match (&self.mode, &self.live) {
            (ReductionMode::Incremental, Some(live)) => {
                live.try_fork().expect("incremental base forks")
            }
            _ => {
                let mut base = (self.factory)();
                for (p, y) in &self.transcript {
                    base.update(p, *y);
                }
                base
            }
        }
    }

    /// The m tokens the learner would generate from `x`, each fed from
    /// its own previous guesses.
    fn rollout(&mut self, x: &TokenString) -> Vec<u8> {
        let mut base = self.base_for_prediction();
        let mut prefix = x.clone();
        let mut guesses = Vec::with_capacity(self.m as usize);
        for _ in 0..self.m {
            let guess = base.predict(&(self.projection)(&prefix));
            guesses.push(guess);
            prefix.push(guess);
        }
        guesses
    }
}

impl OnlineLearner for CotReductionLearner {
    fn name(&self) -> &str {
        &self.name
    }

    fn predict(&mut self, x: &TokenString) -> u8 {
        let guesses = self.rollout(x);
        let last = *guesses.last().expect("horizon is at least one");
        self.last_rollout = Some((x.clone(), guesses));
        last
    }

    fn observe(&mut self, x: &TokenString, feedback: &Feedback) {
        self.round += 1;
        let Feedback::Cot { tokens } = feedback else {
            // Without the trajectory there are no labeled prefixes to
            // teach the base, so a final-bit-only round is ignored.
            return;
        };
        assert_eq!(tokens.len(), self.m, "trajectory length must match the horizon");
        let guesses = match self.last_rollout.take() {
            Some((px, g)) if &px == x => g,
            _ => self.rollout(x),
        };
        let truth = tokens.to_vec();
        // Charge a final-token mistake to the first divergence: there the
        // guessed and true prefixes still agree, so the base predicted on
        // a true prefix and got it wrong.
        if guesses.last() != truth.last() {
            let t = guesses
                .iter()
                .zip(&truth)
                .position(|(g, y)| g != y)
                .expect("final tokens differ, so some token differs");
            let prefix = x.concat(&tokens.prefix(t as u64));
            self.charges.push(ChargeRecord {
                round: self.round,
                divergence: t as u64 + 1,
                base_instance: (self.projection)(&prefix),
                true_bit: truth[t],
            });
        }
        // Teach the base every true prefix of this trajectory.
        let mut prefix = x.clone();
        for &y in &truth {
            let p = (self.projection)(&prefix);
            if let Some(live) = &mut self.live {
                live.update(&p, y);
            }
            self.transcript.push((p, y));
            prefix.push(y);
        }
    }

    fn clone_box(&self) -> Box<dyn OnlineLearner> {
        Box::new(CotReductionLearner {
            factory: Arc::clone(&self.factory),
            projection: Arc::clone(&self.projection),
            m: self.m,
            mode: self.mode,
            transcript: self.transcript.clone(),
            live: self.live.as_ref().map(|b| b.try_fork().expect("incremental base forks")),
            last_rollout: self.last_rollout.clone(),
            charges: self.charges.clone(),
            round: self.round,
            name: self.name.clone(),
        })
    }
}
