//! Stochastic generation with a hidden sign. A noisy chain generator
//! carries a parameter sigma in {+1, -1}: each generated token flips a
//! coin whose bias away from 1/2 depends on the previous token, with
//! P(1 | prev 0) = 1/2 + sigma/4 and P(1 | prev 1) = 1/2 - sigma/4. The
//! bias of the m-th generated token decays geometrically, so reading only
//! the final token turns a constant per-step signal into one of strength
//! 2^-(m+1), and at odd m its sign still identifies sigma. Everything
//! downstream quantifies how fast that weak signal can be learned and
//! what per-round regret any learner must pay before it is.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::stream_rng;
use crate::token::TokenString;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The hidden sign of a noisy chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sigma {
    Plus,
    Minus,
}

impl Sigma {
    pub fn all() -> [Sigma; 2] {
        [Sigma::Plus, Sigma::Minus]
    }

    fn as_i64(self) -> i64 {
        match self {
            Sigma::Plus => 1,
            Sigma::Minus => -1,
        }
    }
}

/// P(next token = 1) given the previous token, as an exact fraction
/// over 4.
pub fn step_one_prob(sigma: Sigma, prev: u8) -> (u32, u32) {
    let s = sigma.as_i64();
    let num = if prev == 0 { 2 + s } else { 2 - s };
    (num as u32, 4)
}

/// P(m-th generated token = 1) starting from previous token `start`, in
/// closed form: 1/2 - (-sigma/2)^m / 2 from a zero start, mirrored from
/// a one start.
pub fn final_one_prob(sigma: Sigma, start: u8, m: u64) -> BigRational {
    assert!(m >= 1);
    let half = rat(1, 2);
    let base = rat(-sigma.as_i64(), 2);
    let mut decay = BigRational::one();
    for _ in 0..m {
        decay *= &base;
    }
    let drift = decay * rat(1, 2);
    if start == 0 {
        &half - &drift
    } else {
        &half + &drift
    }
}

/// Same probability computed by stepping the chain's one-token
/// recursion, as an independent check on the closed form.
pub fn final_one_prob_by_recursion(sigma: Sigma, start: u8, m: u64) -> BigRational {
    assert!(m >= 1);
    let p0 = {
        let (n, d) = step_one_prob(sigma, 0);
        rat(n as i64, d as i64)
    };
    let p1 = {
        let (n, d) = step_one_prob(sigma, 1);
        rat(n as i64, d as i64)
    };
    let mut q = if start == 0 { BigRational::zero() } else { BigRational::one() };
    for _ in 0..m {
        q = &p1 * &q + &p0 * (BigRational::one() - &q);
    }
    q
}

/// Signal strength of the final token: |P(1) - 1/2| = 2^-(m+1). At odd
/// m its sign tracks sigma; at even m the sign is the same for both, so
/// the final token carries no information about the hidden sign at all.
pub fn final_token_bias(m: u64) -> BigRational {
    assert!(m >= 1);
    let mut d = rat(1, 2);
    for _ in 0..m {
        d *= rat(1, 2);
    }
    d
}

/// KL divergence between the two normalized final-token laws,
/// Bernoulli(1/2 + d) against Bernoulli(1/2 - d).
pub fn kl_between_signs(delta: f64) -> f64 {
    assert!(delta > 0.0 && delta < 0.5);
    2.0 * delta * ((1.0 + 2.0 * delta) / (1.0 - 2.0 * delta)).ln()
}

/// Indistinguishability floor for round t: before round t the learner
/// has seen t - 1 tokens, and whichever way it leans, some sign makes it
/// wrong with probability at least (1/4) exp(-(t-1) kl). Each wrong
/// lean costs 2 delta of conditional regret.
pub fn round_regret_floor(t: u64, delta: f64) -> f64 {
    assert!(t >= 1);
    let kl = kl_between_signs(delta);
    2.0 * delta * 0.25 * (-((t - 1) as f64) * kl).exp()
}

/// Sum of the per-round floors: no learner's max-over-sign expected
/// regret over `rounds` rounds can fall below this.
pub fn aggregate_regret_floor(rounds: u64, delta: f64) -> f64 {
    (1..=rounds).map(|t| round_regret_floor(t, delta)).sum()
}

/// Default round count for floor experiments: the scale on which the
/// per-round floor has decayed, clamped to at least one round.
pub fn default_floor_rounds(delta: f64) -> u64 {
    let raw = (1.0 / (32.0 * delta * delta)).floor() as u64;
    raw.max(1)
}

/// Samples one trajectory of the chain from a prompt's last token.
pub fn sample_trajectory(
    sigma: Sigma,
    start: u8,
    m: u64,
    rng: &mut impl Rng,
) -> Vec<u8> {
    let mut prev = start;
    let mut out = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let (num, den) = step_one_prob(sigma, prev);
        let token = u8::from(rng.gen_ratio(num, den));
        out.push(token);
        prev = token;
    }
    out
}

/// Predicts the normalized final token each round from the history of
/// normalized final tokens.
pub trait SignLearner: Send {
    fn name(&self) -> &str;
    fn predict(&mut self) -> u8;
    fn observe(&mut self, z: u8);
}

/// Majority vote over all normalized tokens seen so far; an empty
/// history predicts 0.
pub struct EmpiricalMajority {
    ones: u64,
    total: u64,
}

impl EmpiricalMajority {
    pub fn new() -> Self {
        EmpiricalMajority { ones: 0, total: 0 }
    }
}

impl Default for EmpiricalMajority {
    fn default() -> Self {
        Self::new()
    }
}

impl SignLearner for EmpiricalMajority {
    fn name(&self) -> &str {
        "empirical_majority"
    }

    fn predict(&mut self) -> u8 {
        if self.total == 0 {
            return 0;
        }
        u8::from(2 * self.ones >= self.total)
    }

    fn observe(&mut self, z: u8) {
        self.ones += u64::from(z);
        self.total += 1;
    }
}

/// Ignores the data entirely.
pub struct ConstantSign(pub u8);

impl SignLearner for ConstantSign {
    fn name(&self) -> &str {
        if self.0 == 0 {
            "constant_zero"
        } else {
            "constant_one"
        }
    }

    fn predict(&mut self) -> u8 {
        self.0
    }

    fn observe(&mut self, _z: u8) {}
}

/// The learners the floor is checked against. A learner hardwired to the
/// true sign would have zero regret, which is why the floor is a
/// statement about max-over-sign regret rather than per-sign regret.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignLearnerKind {
    EmpiricalMajority,
    ConstantZero,
    ConstantOne,
}

impl SignLearnerKind {
    pub fn all() -> [SignLearnerKind; 3] {
        [SignLearnerKind::EmpiricalMajority, SignLearnerKind::ConstantZero, SignLearnerKind::ConstantOne]
    }

    pub fn build(&self) -> Box<dyn SignLearner> {
        match self {
            SignLearnerKind::EmpiricalMajority => Box::new(EmpiricalMajority::new()),
            SignLearnerKind::ConstantZero => Box::new(ConstantSign(0)),
            SignLearnerKind::ConstantOne => Box::new(ConstantSign(1)),
        }
    }
}

/// One simulated run of the final-token game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrial {
    pub learner: String,
    pub sigma: Sigma,
    pub m: u64,
    pub rounds: u64,
    pub seed: u64,
    /// Sum over rounds of the conditional extra mistake probability the
    /// learner's prediction carried versus the best fixed prediction.
    pub regret: f64,
    /// Rounds on which the learner leaned against the true sign.
    pub wrong_rounds: u64,
}

/// Plays `rounds` rounds of the odd-horizon final-token game. Prompts
/// vary (their last bits are pseudorandom), trajectories are sampled
/// from the true chain, and the learner sees only normalized final
/// tokens. Regret is accumulated in conditional expectation: a round
/// predicting the less likely normalized value costs exactly twice the
/// final-token bias, independent of the coin flips inside that round.
pub fn run_regret_trial(
    kind: SignLearnerKind,
    sigma: Sigma,
    m: u64,
    rounds: u64,
    seed: u64,
) -> RegretTrial {
    assert!(m % 2 == 1, "the final token identifies the sign only at odd horizons");
    let mut learner = kind.build();
    let mut rng = stream_rng(seed, 17);
    let delta = final_token_bias(m).to_f64().expect("small dyadic fits f64");
    // At odd m the likelier normalized value is 1 exactly for the plus
    // sign.
    let favored = match sigma {
        Sigma::Plus => 1u8,
        Sigma::Minus => 0u8,
    };
    let mut regret = 0.0;
    let mut wrong_rounds = 0;
    for _ in 0..rounds {
        let prompt_last = u8::from(rng.gen_bool(0.5));
        let guess_z = learner.predict();
        if guess_z != favored {
            regret += 2.0 * delta;
            wrong_rounds += 1;
        }
        let trajectory = sample_trajectory(sigma, prompt_last, m, &mut rng);
        let y = *trajectory.last().expect("m >= 1");
        learner.observe(y ^ prompt_last);
    }
    RegretTrial {
        learner: kind.build().name().to_string(),
        sigma,
        m,
        rounds,
        seed,
        regret,
        wrong_rounds,
    }
}

/// Mean and standard error of the per-sign regret over repeated trials,
/// and the max-over-sign mean the floor bounds from below.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstSignRegret {
    pub learner: String,
    pub m: u64,
    pub rounds: u64,
    pub trials: u64,
    pub mean_plus: f64,
    pub mean_minus: f64,
    pub se_plus: f64,
    pub se_minus: f64,
    pub worst_mean: f64,
    pub worst_se: f64,
}

pub fn worst_sign_regret(
    kind: SignLearnerKind,
    m: u64,
    rounds: u64,
    trials: u64,
    seed: u64,
) -> WorstSignRegret {
    assert!(trials >= 2);
    let mut stats = Vec::new();
    for sigma in Sigma::all() {
        let samples: Vec<f64> = (0..trials)
            .map(|i| {
                let trial_seed = seed ^ (0x9e3779b97f4a7c15u64.wrapping_mul(i + 1))
                    ^ match sigma {
                        Sigma::Plus => 0,
                        Sigma::Minus => 0x5555_5555_5555_5555,
                    };
                run_regret_trial(kind, sigma, m, rounds, trial_seed).regret
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / trials as f64;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
            / (trials - 1) as f64;
        stats.push((mean, (var / trials as f64).sqrt()));
    }
    let (mean_plus, se_plus) = stats[0];
    let (mean_minus, se_minus) = stats[1];
    let (worst_mean, worst_se) = if mean_plus >= mean_minus {
        (mean_plus, se_plus)
    } else {
        (mean_minus, se_minus)
    };
    WorstSignRegret {
        learner: kind.build().name().to_string(),
        m,
        rounds,
        trials,
        mean_plus,
        mean_minus,
        se_plus,
        se_minus,
        worst_mean,
        worst_se,
    }
}

/// Exact distribution facts used by the direct one-step game.
pub fn direct_game_one_probs() -> [(Sigma, BigRational); 2] {
    [
        (Sigma::Plus, final_one_prob(Sigma::Plus, 0, 1)),
        (Sigma::Minus, final_one_prob(Sigma::Minus, 0, 1)),
    ]
}

/// Last token of a prompt, with an empty prompt reading as zero.
pub fn prompt_start_bit(x: &TokenString) -> u8 {
    x.last().unwrap_or(0)
}
