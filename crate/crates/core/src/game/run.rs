//! The interactive game loop.

use crate::game::transcript::{Feedback, GameRound, GameTranscript};
use crate::game::GameError;
use crate::gen::Generator;
use crate::token::TokenString;

/// An online predictor of final tokens. `predict` may cache work, hence
/// `&mut`, but must not change predictive behavior; only `observe` learns.
pub trait OnlineLearner: Send {
    fn name(&self) -> &str;
    fn predict(&mut self, x: &TokenString) -> u8;
    fn observe(&mut self, x: &TokenString, feedback: &Feedback);
    /// Snapshot with identical future behavior. Exhaustive search forks
    /// learners at every branch point through this.
    fn clone_box(&self) -> Box<dyn OnlineLearner>;
}

impl Clone for Box<dyn OnlineLearner> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// The instance-choosing, feedback-revealing side of the game.
pub trait Adversary: Send {
    fn name(&self) -> &str;
    /// `None` ends the game early.
    fn choose_instance(&mut self, round: usize) -> Option<TokenString>;
    fn feedback(&mut self, x: &TokenString, prediction: u8) -> Feedback;
}

/// Play up to `max_rounds` rounds and score mistakes. Every feedback is
/// audited against `class`: the set of members consistent with all
/// feedback so far must stay nonempty, otherwise the adversary has cheated
/// and the game aborts.
pub fn run_game(
    learner: &mut dyn OnlineLearner,
    adversary: &mut dyn Adversary,
    class: &[Generator],
    m: u64,
    max_rounds: usize,
) -> Result<GameTranscript, GameError> {
    if class.is_empty() {
        return Err(GameError::EmptyClass);
    }
    let mut alive: Vec<bool> = vec![true; class.len()];
    let mut rounds = Vec::new();
    let mut mistakes = 0;
    for round in 1..=max_rounds {
        let Some(x) = adversary.choose_instance(round) else {
            break;
        };
        let prediction = learner.predict(&x);
        let feedback = adversary.feedback(&x, prediction);
        for (slot, member) in alive.iter_mut().zip(class) {
            *slot = *slot && feedback.consistent_with(member, &x, m);
        }
        if !alive.contains(&true) {
            return Err(GameError::UnrealizableFeedback { round });
        }
        let mistake = prediction != feedback.final_bit();
        mistakes += usize::from(mistake);
        learner.observe(&x, &feedback);
        rounds.push(GameRound { round, instance: x, prediction, feedback, mistake });
    }
    Ok(GameTranscript {
        learner: learner.name().to_string(),
        adversary: adversary.name().to_string(),
        m,
        rounds,
        mistakes,
    })
}
