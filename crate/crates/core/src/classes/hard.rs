//! The seeded hard class: random generators over the all-zeros ladder
//! Z = {0^i : i in [1, M^2]}, labeled 1 with probability 1 - 1/M on the
//! checkpoint rungs Z_1 = {0^(jM) : j in [M]} and probability 1/M elsewhere
//! on the ladder, 0 off it. Labels derive from a counter-based stream per
//! (member, instance), so any slice of the class can be sampled in any
//! order with identical results.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::classes::ClassError;
use crate::gen::Generator;
use crate::rng::indexed_bernoulli;
use crate::token::TokenString;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardClassParams {
    /// Exponent scale: the full-size member count would be M^(10 d).
    pub d: u32,
    /// Generation length M >= 2; the ladder has M^2 rungs.
    pub m: u64,
    /// Actual member count (the full-size count capped by a budget).
    pub n_members: u64,
    /// Probability of the minority label, as minority_num / minority_den.
    pub minority_num: u64,
    pub minority_den: u64,
    pub seed: u64,
}

impl HardClassParams {
    /// Standard parameters: minority probability 1/M and member count
    /// min(M^(10 d), budget).
    pub fn standard(d: u32, m: u64, budget: u64, seed: u64) -> Self {
        let full = (1..=10 * d).try_fold(1u64, |acc, _| acc.checked_mul(m));
        let n_members = full.map_or(budget, |f| f.min(budget));
        HardClassParams { d, m, n_members, minority_num: 1, minority_den: m, seed }
    }

    pub fn z_size(&self) -> u64 {
        self.m * self.m
    }

    /// Probability that a member labels rung `index` with 1, as an exact
    /// (numerator, denominator) pair.
    pub fn one_prob(&self, index: u64) -> (u64, u64) {
        assert!(index >= 1 && index <= self.z_size(), "index off the ladder");
        if index % self.m == 0 {
            (self.minority_den - self.minority_num, self.minority_den)
        } else {
            (self.minority_num, self.minority_den)
        }
    }
}

/// The ladder Z in index order: 0^1, 0^2, ..., 0^(M^2).
pub fn hard_instances(m: u64) -> Vec<TokenString> {
    (1..=m * m).map(TokenString::zeros).collect()
}

/// The walk prompt x^(j) = 0^((j-1)M + 1) for j in [1, M].
pub fn walk_prompt(j: u64, m: u64) -> TokenString {
    assert!(j >= 1 && j <= m, "walk index out of range");
    TokenString::zeros((j - 1) * m + 1)
}

/// The decisive trajectories out of a walk prompt: the green branch
/// 0^(M-1) 1 whose last token is 1, and the red branches 0^(q-1) 1 0^(M-q)
/// for q in [M-1], each ending in 0.
pub fn green_red_branches(m: u64) -> (TokenString, Vec<TokenString>) {
    assert!(m >= 2, "branches need m >= 2");
    let mut green = TokenString::zeros(m - 1);
    green.push(1);
    let reds = (1..m)
        .map(|q| {
            let mut r = TokenString::zeros(q - 1);
            r.push(1);
            r.extend(&TokenString::zeros(m - q));
            r
        })
        .collect();
    (green, reds)
}

/// A sampled class: one label word block per member over the ladder.
#[derive(Debug, Clone)]
pub struct HardClassSample {
    params: HardClassParams,
    words_per_member: usize,
    labels: Vec<u64>,
}

/// Samples the class, refusing when members * ladder size exceeds `budget`.
pub fn hard_class_sample(
    params: &HardClassParams,
    budget: u128,
) -> Result<HardClassSample, ClassError> {
    assert!(params.m >= 2, "hard class needs m >= 2");
    assert!(
        params.minority_num * 2 <= params.minority_den,
        "minority probability must be at most 1/2"
    );
    let z = params.z_size();
    let need = u128::from(params.n_members) * u128::from(z);
    if need > budget {
        return Err(ClassError::BudgetExceeded { need, budget });
    }
    let words_per_member = (z as usize).div_ceil(64);
    let mut labels = vec![0u64; words_per_member * params.n_members as usize];
    for member in 0..params.n_members {
        let base = member as usize * words_per_member;
        for index in 1..=z {
            let (num, den) = params.one_prob(index);
            if indexed_bernoulli(params.seed, member, index - 1, num, den) {
                let bit = (index - 1) as usize;
                labels[base + bit / 64] |= 1u64 << (bit % 64);
            }
        }
    }
    Ok(HardClassSample { params: *params, words_per_member, labels })
}

impl HardClassSample {
    pub fn params(&self) -> &HardClassParams {
        &self.params
    }

    pub fn n_members(&self) -> u64 {
        self.params.n_members
    }

    /// Label of `member` on rung 0^index.
    pub fn label(&self, member: u64, index: u64) -> u8 {
        assert!(index >= 1 && index <= self.params.z_size(), "index off the ladder");
        let base = member as usize * self.words_per_member;
        let bit = (index - 1) as usize;
        ((self.labels[base + bit / 64] >> (bit % 64)) & 1) as u8
    }

    /// The member's full label block, one bit per rung.
    pub fn member_words(&self, member: u64) -> &[u64] {
        let base = member as usize * self.words_per_member;
        &self.labels[base..base + self.words_per_member]
    }

    /// How many members label rung 0^index with 1.
    pub fn count_ones_at(&self, index: u64) -> u64 {
        (0..self.n_members()).map(|a| u64::from(self.label(a, index))).sum()
    }

    /// Total generator for one member: the sampled labels on the ladder and
    /// 0 everywhere else (including all-zero strings past the top rung).
    pub fn generator(&self, member: u64) -> Generator {
        let words: Box<[u64]> = self.member_words(member).into();
        let z = self.params.z_size();
        Generator::new(
            format!("hard[seed={},a={member}]", self.params.seed),
            move |x: &TokenString| {
                let n = x.len();
                if n == 0 || n > z || x.leading_zeros() != n {
                    return 0;
                }
                let bit = (n - 1) as usize;
                ((words[bit / 64] >> (bit % 64)) & 1) as u8
            },
        )
    }

    /// Generators for members [0, limit), for table-sized experiments.
    pub fn generators(&self, limit: u64) -> Vec<Generator> {
        (0..limit.min(self.n_members())).map(|a| self.generator(a)).collect()
    }

    /// CSV rows (member, instance, label) over the whole sample.
    pub fn export_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "member,instance,label")?;
        for a in 0..self.n_members() {
            for i in 1..=self.params.z_size() {
                writeln!(out, "{a},{},{}", TokenString::zeros(i), self.label(a, i))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{cot, e2e};
    use crate::token::ts;

    fn sample(m: u64, n: u64, seed: u64) -> HardClassSample {
        let p = HardClassParams { d: 1, m, n_members: n, minority_num: 1, minority_den: m, seed };
        hard_class_sample(&p, 1 << 30).unwrap()
    }

    #[test]
    fn standard_params_cap_member_count() {
        let p = HardClassParams::standard(1, 8, 100_000, 7);
        assert_eq!(p.n_members, 100_000); // 8^10 exceeds the budget
        let p = HardClassParams::standard(1, 2, 100_000, 7);
        assert_eq!(p.n_members, 1024); // 2^10 fits
        assert_eq!(p.minority_den, 2);
    }

    #[test]
    fn budget_is_enforced() {
        let p = HardClassParams { d: 1, m: 4, n_members: 100, minority_num: 1, minority_den: 4, seed: 0 };
        assert!(matches!(
            hard_class_sample(&p, 100),
            Err(ClassError::BudgetExceeded { need: 1600, budget: 100 })
        ));
    }

    #[test]
    fn sampling_is_reproducible_and_off_ladder_is_zero() {
        let s1 = sample(4, 50, 123);
        let s2 = sample(4, 50, 123);
        for a in 0..50 {
            for i in 1..=16 {
                assert_eq!(s1.label(a, i), s2.label(a, i));
            }
        }
        let g = s1.generator(3);
        assert_eq!(g.next(&ts("01")), 0);
        assert_eq!(g.next(&ts("1")), 0);
        assert_eq!(g.next(&TokenString::zeros(17)), 0); // past the top rung
        assert_eq!(g.next(&TokenString::empty()), 0);
        assert_eq!(g.next(&TokenString::zeros(5)), s1.label(3, 5));
    }

    #[test]
    fn checkpoint_frequency_concentrates() {
        // At M = 4, rung 0^4 is a checkpoint: p = 3/4 across members.
        let n = 4000u64;
        let s = sample(4, n, 99);
        let ones = s.count_ones_at(4) as f64;
        let p = 0.75;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((ones / n as f64 - p).abs() < 4.0 * se, "got {}", ones / n as f64);
        // And an off-checkpoint rung sits near 1/4.
        let ones = s.count_ones_at(5) as f64;
        assert!((ones / n as f64 - 0.25).abs() < 4.0 * se);
    }

    #[test]
    fn branch_shapes() {
        let (green, reds) = green_red_branches(4);
        assert_eq!(green, ts("0001"));
        assert_eq!(reds, vec![ts("1000"), ts("0100"), ts("0010")]);
        assert_eq!(walk_prompt(1, 4), ts("0"));
        assert_eq!(walk_prompt(4, 4), TokenString::zeros(13));
    }

    #[test]
    fn branch_endings_decide_e2e() {
        // A member whose trajectory from a walk prompt follows the green
        // branch ends at 1; any red branch ends at 0 because the generated
        // 1 knocks the string off the ladder for good.
        let m = 4u64;
        let s = sample(m, 400, 7);
        let (green, reds) = green_red_branches(m);
        let mut seen_green = 0;
        let mut seen_red = 0;
        for j in 1..=m {
            let prompt = walk_prompt(j, m);
            for a in 0..s.n_members() {
                let g = s.generator(a);
                let traj = cot(&g, &prompt, m);
                if traj == green {
                    assert_eq!(e2e(&g, &prompt, m), 1);
                    seen_green += 1;
                } else if reds.contains(&traj) {
                    assert_eq!(e2e(&g, &prompt, m), 0);
                    seen_red += 1;
                }
            }
        }
        assert!(seen_green > 50, "green branch too rare: {seen_green}");
        assert!(seen_red > 50, "red branches too rare: {seen_red}");
    }

    #[test]
    fn red_tail_is_forced() {
        // After a generated 1, every subsequent token is 0 regardless of
        // the member's ladder labels.
        let s = sample(3, 30, 5);
        for a in 0..30 {
            let g = s.generator(a);
            let x = ts("001"); // off the ladder already
            assert_eq!(cot(&g, &x, 5), TokenString::zeros(5));
        }
    }

    #[test]
    fn csv_export_shape() {
        let s = sample(2, 3, 1);
        let mut buf = Vec::new();
        s.export_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 3 * 4);
        assert_eq!(lines[0], "member,instance,label");
        assert!(lines[1].starts_with("0,0,"));
    }
}
