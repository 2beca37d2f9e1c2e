//! Propositional rules over generator labels: atoms (instance, bit) with
//! conjunction and disjunction, evaluation against generators, prefix-path
//! rules describing partial trajectories, filtering, resolution against the
//! hard-class ladder, and exact rule probabilities for conjunctions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

use crate::classes::{ClassError, HardClassParams, HardClassSample};
use crate::gen::Generator;
use crate::token::TokenString;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// True under f when f(instance) = label.
    Atom { instance: TokenString, label: u8 },
    /// Empty conjunction is true.
    And(Vec<Rule>),
    /// Empty disjunction is false.
    Or(Vec<Rule>),
}

impl Rule {
    pub fn atom(instance: TokenString, label: u8) -> Self {
        assert!(label <= 1);
        Rule::Atom { instance, label }
    }

    pub fn eval_with(&self, f: &mut impl FnMut(&TokenString) -> u8) -> bool {
        match self {
            Rule::Atom { instance, label } => f(instance) == *label,
            Rule::And(parts) => parts.iter().all(|r| r.eval_with(f)),
            Rule::Or(parts) => parts.iter().any(|r| r.eval_with(f)),
        }
    }

    pub fn satisfied_by(&self, g: &Generator) -> bool {
        self.eval_with(&mut |x| g.next(x))
    }

    /// Syntactic test that `x` appears in no atom.
    pub fn independent_of(&self, x: &TokenString) -> bool {
        match self {
            Rule::Atom { instance, .. } => instance != x,
            Rule::And(parts) | Rule::Or(parts) => parts.iter().all(|r| r.independent_of(x)),
        }
    }

    /// All atoms, in syntactic order.
    pub fn atoms(&self) -> Vec<(&TokenString, u8)> {
        let mut out = Vec::new();
        fn walk<'a>(r: &'a Rule, out: &mut Vec<(&'a TokenString, u8)>) {
            match r {
                Rule::Atom { instance, label } => out.push((instance, *label)),
                Rule::And(parts) | Rule::Or(parts) => {
                    parts.iter().for_each(|p| walk(p, out));
                }
            }
        }
        walk(self, &mut out);
        out
    }
}

/// The rule "the first t generated tokens from x follow y": a conjunction
/// of atoms (x ∘ y_<s, y_s) for s in [1, t]. t = 0 is the empty (true)
/// conjunction.
pub fn prefix_path_rule(x: &TokenString, y: &TokenString, t: u64) -> Rule {
    assert!(t <= y.len(), "path length exceeds the trajectory");
    let mut atoms = Vec::with_capacity(t as usize);
    for s in 1..=t {
        let prefix = x.concat(&y.prefix(s - 1));
        atoms.push(Rule::atom(prefix, y.get(s - 1).unwrap()));
    }
    Rule::And(atoms)
}

/// Members of `class` satisfying `rule`.
pub fn rule_filter(class: &[Generator], rule: &Rule) -> Vec<Generator> {
    class.iter().filter(|g| rule.satisfied_by(g)).cloned().collect()
}

/// A rule compiled against hard-class semantics: every atom either tests a
/// ladder bit or is constant (off-ladder instances are always labeled 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResolvedRule {
    Const(bool),
    /// Member satisfies the atom when ladder bit `index - 1` equals `want`.
    Bit { index: u64, want: bool },
    And(Vec<ResolvedRule>),
    Or(Vec<ResolvedRule>),
}

/// Compiles `rule` for a ladder of M^2 rungs. Errors only if an atom names
/// an all-zero instance past the top rung, where a walk would have left the
/// sampled region.
pub fn resolve_for_hard(rule: &Rule, m: u64) -> Result<ResolvedRule, ClassError> {
    let z = m * m;
    Ok(match rule {
        Rule::Atom { instance, label } => {
            let n = instance.len();
            if n >= 1 && instance.leading_zeros() == n {
                if n > z {
                    return Err(ClassError::OutOfZ { index: n, max: z });
                }
                ResolvedRule::Bit { index: n, want: *label == 1 }
            } else {
                // Off-ladder label is 0, so the atom's truth is fixed.
                ResolvedRule::Const(*label == 0)
            }
        }
        Rule::And(parts) => ResolvedRule::And(
            parts.iter().map(|r| resolve_for_hard(r, m)).collect::<Result<_, _>>()?,
        ),
        Rule::Or(parts) => ResolvedRule::Or(
            parts.iter().map(|r| resolve_for_hard(r, m)).collect::<Result<_, _>>()?,
        ),
    })
}

impl ResolvedRule {
    pub fn eval_words(&self, words: &[u64]) -> bool {
        match self {
            ResolvedRule::Const(v) => *v,
            ResolvedRule::Bit { index, want } => {
                let bit = (index - 1) as usize;
                ((words[bit / 64] >> (bit % 64)) & 1 == 1) == *want
            }
            ResolvedRule::And(parts) => parts.iter().all(|r| r.eval_words(words)),
            ResolvedRule::Or(parts) => parts.iter().any(|r| r.eval_words(words)),
        }
    }
}

/// Members of the sample satisfying a compiled rule.
pub fn hard_filter_members(sample: &HardClassSample, rule: &ResolvedRule) -> Vec<u64> {
    (0..sample.n_members()).filter(|&a| rule.eval_words(sample.member_words(a))).collect()
}

pub fn hard_filter_count(sample: &HardClassSample, rule: &ResolvedRule) -> u64 {
    (0..sample.n_members()).filter(|&a| rule.eval_words(sample.member_words(a))).count() as u64
}

/// Exact probability that a fresh member satisfies a conjunction of atoms,
/// using the ladder's independent per-rung label distribution.
///
/// Off-ladder atoms are constants; duplicate rung atoms that conflict give
/// probability 0; otherwise the answer is the product over distinct rungs
/// of that rung's label probability. Disjunctions are rejected.
pub fn conjunction_probability(
    params: &HardClassParams,
    rule: &Rule,
) -> Result<BigRational, ClassError> {
    let mut wants: BTreeMap<u64, bool> = BTreeMap::new();
    if !collect_conjuncts(rule, params, &mut wants)? {
        return Ok(BigRational::zero());
    }
    let mut p = BigRational::one();
    for (&index, &want) in &wants {
        let (num, den) = params.one_prob(index);
        let num = if want { num } else { den - num };
        p *= BigRational::new(BigInt::from(num), BigInt::from(den));
    }
    Ok(p)
}

/// Flattens nested conjunctions into per-rung requirements. Returns false
/// when the conjunction is unsatisfiable.
fn collect_conjuncts(
    rule: &Rule,
    params: &HardClassParams,
    wants: &mut BTreeMap<u64, bool>,
) -> Result<bool, ClassError> {
    match resolve_atom_or_recurse(rule, params, wants)? {
        Some(ok) => Ok(ok),
        None => Err(ClassError::NotConjunctive),
    }
}

fn resolve_atom_or_recurse(
    rule: &Rule,
    params: &HardClassParams,
    wants: &mut BTreeMap<u64, bool>,
) -> Result<Option<bool>, ClassError> {
    match rule {
        Rule::Atom { .. } => match resolve_for_hard(rule, params.m)? {
            ResolvedRule::Const(v) => Ok(Some(v)),
            ResolvedRule::Bit { index, want } => {
                if let Some(&prev) = wants.get(&index) {
                    Ok(Some(prev == want))
                } else {
                    wants.insert(index, want);
                    Ok(Some(true))
                }
            }
            _ => unreachable!("atom resolves to a leaf"),
        },
        Rule::And(parts) => {
            for part in parts {
                match resolve_atom_or_recurse(part, params, wants)? {
                    Some(true) => continue,
                    Some(false) => return Ok(Some(false)),
                    None => return Ok(None),
                }
            }
            Ok(Some(true))
        }
        Rule::Or(_) => Ok(None),
    }
}

/// Probability that a fresh member's length-|traj| walk from 0^from follows
/// `traj` exactly, as the product of per-step label probabilities.
pub fn trajectory_probability(
    params: &HardClassParams,
    from: u64,
    traj: &TokenString,
) -> Result<BigRational, ClassError> {
    let prompt = TokenString::zeros(from);
    conjunction_probability(params, &prefix_path_rule(&prompt, traj, traj.len()))
}
