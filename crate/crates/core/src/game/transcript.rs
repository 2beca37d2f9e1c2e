//! Feedback values and game records.

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::gen::{cot, e2e, Generator};
use crate::token::TokenString;

/// What the adversary reveals after a prediction: either just the final
/// token, or the whole generated trajectory.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Feedback {
    E2e { bit: u8 },
    Cot { tokens: TokenString },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackMode {
    E2e,
    Cot,
}

impl Feedback {
    /// The token the learner's prediction is scored against.
    pub fn final_bit(&self) -> u8 {
        match self {
            Feedback::E2e { bit } => *bit,
            Feedback::Cot { tokens } => {
                tokens.last().expect("trajectory feedback is never empty")
            }
        }
    }

    /// The feedback a particular generator would produce.
    pub fn from_generator(g: &Generator, x: &TokenString, m: u64, mode: FeedbackMode) -> Feedback {
        match mode {
            FeedbackMode::E2e => Feedback::E2e { bit: e2e(g, x, m) },
            FeedbackMode::Cot => Feedback::Cot { tokens: cot(g, x, m) },
        }
    }

    /// Whether `g` running on `x` would produce exactly this feedback.
    pub fn consistent_with(&self, g: &Generator, x: &TokenString, m: u64) -> bool {
        match self {
            Feedback::E2e { bit } => e2e(g, x, m) == *bit,
            Feedback::Cot { tokens } => cot(g, x, m) == *tokens,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRound {
    pub round: usize,
    pub instance: TokenString,
    pub prediction: u8,
    pub feedback: Feedback,
    pub mistake: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub learner: String,
    pub adversary: String,
    pub m: u64,
    pub rounds: Vec<GameRound>,
    pub mistakes: usize,
}

impl GameTranscript {
    /// One JSON object per line: a header record, then each round.
    pub fn write_jsonl(&self, out: &mut impl Write) -> std::io::Result<()> {
        let header = serde_json::json!({
            "learner": self.learner,
            "adversary": self.adversary,
            "m": self.m,
            "mistakes": self.mistakes,
            "rounds": self.rounds.len(),
        });
        writeln!(out, "{header}")?;
        for round in &self.rounds {
            let line = serde_json::to_string(round).expect("round serializes");
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}
