//! Next-token generators and the generation semantics.
//!
//! A generator `g` is a total deterministic map from token strings to a
//! single token. Applying it and appending the output gives one generation
//! step; iterating M times from a prompt x yields the chain-of-thought
//! trajectory `cot(g, x, M)` (the M generated tokens, in order), whose last
//! token is the end-to-end answer `e2e(g, x, M)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::token::TokenString;

type Rule = dyn Fn(&TokenString) -> u8 + Send + Sync;

/// A total deterministic next-token map with a stable identifier.
///
/// Cloning is cheap (shared rule). The optional memo cache is keyed by the
/// full input and internally synchronized; it may only change evaluation
/// cost, never outputs, because the rule itself must be pure.
#[derive(Clone)]
pub struct Generator {
    id: Arc<str>,
    rule: Arc<Rule>,
    memo: Option<Arc<Mutex<HashMap<TokenString, u8>>>>,
}

impl Generator {
    pub fn new(id: impl Into<String>, rule: impl Fn(&TokenString) -> u8 + Send + Sync + 'static) -> Self {
        Generator { id: id.into().into(), rule: Arc::new(rule), memo: None }
    }

    /// Same generator, with evaluations cached.
    pub fn with_memo(mut self) -> Self {
        self.memo = Some(Arc::new(Mutex::new(HashMap::new())));
        self
    }

    /// The constant map `x -> bit`.
    pub fn constant(bit: u8) -> Self {
        assert!(bit <= 1);
        Generator::new(format!("const{bit}"), move |_| bit)
    }

    /// Table-backed generator: 1 exactly on `support`, 0 elsewhere.
    pub fn from_support(id: impl Into<String>, support: std::collections::BTreeSet<TokenString>) -> Self {
        Generator::new(id, move |x| u8::from(support.contains(x)))
    }

    /// Table-backed generator with an explicit label map and default 0.
    pub fn from_table(id: impl Into<String>, table: HashMap<TokenString, u8>) -> Self {
        Generator::new(id, move |x| table.get(x).copied().unwrap_or(0))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Evaluates the next token for `x`.
    pub fn next(&self, x: &TokenString) -> u8 {
        if let Some(memo) = &self.memo {
            if let Some(&hit) = memo.lock().unwrap().get(x) {
                return hit;
            }
            let v = (self.rule)(x);
            memo.lock().unwrap().insert(x.clone(), v);
            return v;
        }
        (self.rule)(x)
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Generator({})", self.id)
    }
}

/// One generation step: `x ∘ g(x)`.
pub fn apply_and_append(g: &Generator, x: &TokenString) -> TokenString {
    let mut out = x.clone();
    out.push(g.next(x));
    out
}

/// The chain-of-thought trajectory: the M tokens generated from `x`.
///
/// `cot(g, x, 0)` is the empty string, and `cot(g, x, m)` is a prefix of
/// `cot(g, x, M)` for every `m <= M`.
pub fn cot(g: &Generator, x: &TokenString, m: u64) -> TokenString {
    let mut current = x.clone();
    let mut out = TokenString::empty();
    for _ in 0..m {
        let bit = g.next(&current);
        current.push(bit);
        out.push(bit);
    }
    out
}

/// The end-to-end answer: the last token of the length-M trajectory.
///
/// Requires `m >= 1` (an empty trajectory has no final token).
pub fn e2e(g: &Generator, x: &TokenString, m: u64) -> u8 {
    assert!(m >= 1, "e2e needs at least one generation step");
    cot(g, x, m).last().expect("m >= 1")
}

/// The trajectory read as a root-to-leaf edge-label sequence of
/// `GenerationTree::new(x, M)`. Identical tokens to [`cot`]; the name marks
/// intent where branches of the tree are being addressed.
pub fn trajectory_branch(g: &Generator, x: &TokenString, m: u64) -> TokenString {
    cot(g, x, m)
}

/// The complete binary tree of all length-`<= M` continuations of a prompt.
///
/// The node addressed by `u ∈ {0,1}^{<=M}` is labeled `x ∘ u`; its two
/// children append 0 and 1. The tree is implicit: nodes are computed from
/// the address, so depth-M trees cost O(1) to build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationTree {
    root: TokenString,
    depth: u64,
}

impl GenerationTree {
    pub fn new(root: TokenString, depth: u64) -> Self {
        GenerationTree { root, depth }
    }

    pub fn root(&self) -> &TokenString {
        &self.root
    }

    pub fn depth(&self) -> u64 {
        self.depth
    }

    /// The instance labeling the node addressed by `u`. Panics if `u` is
    /// longer than the depth.
    pub fn node(&self, u: &TokenString) -> TokenString {
        assert!(u.len() <= self.depth, "address longer than tree depth");
        self.root.concat(u)
    }

    /// All node labels in breadth-first order; 2^(M+1) - 1 of them.
    /// Intended for small depths.
    pub fn nodes(&self) -> Vec<TokenString> {
        let mut out = vec![self.root.clone()];
        let mut level = vec![self.root.clone()];
        for _ in 0..self.depth {
            let mut next = Vec::with_capacity(level.len() * 2);
            for node in &level {
                for bit in [0, 1] {
                    let mut child = node.clone();
                    child.push(bit);
                    out.push(child.clone());
                    next.push(child);
                }
            }
            level = next;
        }
        out
    }

    /// All 2^M branches as edge-label sequences, in lexicographic order.
    pub fn branches(&self) -> Vec<TokenString> {
        all_bit_strings(self.depth)
    }
}

/// Every prompt an M-step generation from `pool` can query a member on:
/// each pool instance extended by each member's own generated prefixes of
/// fewer than `m` tokens, deduplicated and sorted.
///
/// Chain-of-thought behavior over `pool` at horizon `m` is a function of
/// base behavior on exactly this set, so dimension and mistake bounds that
/// compare trajectory games against the base class must measure the base
/// class here, not on `pool` alone.
pub fn trajectory_closure(class: &[Generator], pool: &[TokenString], m: u64) -> Vec<TokenString> {
    let mut seen = std::collections::BTreeSet::new();
    for x in pool {
        for g in class {
            let mut current = x.clone();
            seen.insert(current.clone());
            for _ in 1..m {
                current = apply_and_append(g, &current);
                seen.insert(current.clone());
            }
        }
    }
    seen.into_iter().collect()
}

/// All elements of {0,1}^n in lexicographic order. Intended for small n.
pub fn all_bit_strings(n: u64) -> Vec<TokenString> {
    assert!(n < 63, "2^n branches would not fit in memory");
    let count = 1u64 << n;
    (0..count)
        .map(|v| TokenString::from_bits((0..n).map(|i| ((v >> (n - 1 - i)) & 1) as u8)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::ts;
    use proptest::prelude::*;

    /// Copy-last generator: repeats the final token (0 on the empty string).
    fn copy_last() -> Generator {
        Generator::new("copy_last", |x| x.last().unwrap_or(0))
    }

    #[test]
    fn apply_and_append_examples() {
        assert_eq!(apply_and_append(&Generator::constant(0), &ts("1")), ts("10"));
        // Latch-embedded threshold generator w=(1,1,6), b=-2 on "110":
        // window sum 1*1 + 1*1 + 6*0 - 2 = 0 >= 0, so append 1.
        let g = crate::classes::linear::LinearGen::from_ints(&[1, 1, 6], -2).into_generator();
        assert_eq!(apply_and_append(&g, &ts("110")), ts("1101"));
    }

    #[test]
    fn cot_examples() {
        assert_eq!(cot(&Generator::constant(1), &TokenString::empty(), 3), ts("111"));
        assert_eq!(cot(&copy_last(), &ts("0"), 4), ts("0000"));
        assert_eq!(cot(&copy_last(), &ts("1"), 4), ts("1111"));
        assert_eq!(cot(&copy_last(), &ts("1"), 0), TokenString::empty());
    }

    #[test]
    fn e2e_is_last_token_of_cot() {
        let g = copy_last();
        for x in ["", "0", "1", "0110"] {
            let x = ts(x);
            for m in 1..=5 {
                assert_eq!(e2e(&g, &x, m), cot(&g, &x, m).last().unwrap());
            }
        }
    }

    #[test]
    fn generation_tree_example() {
        // Root "0", depth 2: seven nodes.
        let t = GenerationTree::new(ts("0"), 2);
        let nodes = t.nodes();
        let want: Vec<_> = ["0", "00", "01", "000", "001", "010", "011"].iter().map(|s| ts(s)).collect();
        assert_eq!(nodes, want);
        assert_eq!(t.branches().len(), 4);
        assert_eq!(t.node(&ts("10")), ts("010"));
    }

    #[test]
    fn closure_collects_exactly_the_reachable_prompts() {
        let class = vec![copy_last(), Generator::constant(1)];
        let pool = vec![ts("0")];
        // copy_last walks 0 -> 00 -> 000; const1 walks 0 -> 01 -> 011.
        let want: Vec<_> = ["0", "00", "000", "01", "011"].iter().map(|s| ts(s)).collect();
        let mut sorted = want.clone();
        sorted.sort();
        assert_eq!(trajectory_closure(&class, &pool, 3), sorted);
        // Horizon 1 queries nothing beyond the pool itself.
        assert_eq!(trajectory_closure(&class, &pool, 1), pool);
    }

    #[test]
    fn branches_are_lexicographic_and_complete() {
        let t = GenerationTree::new(TokenString::empty(), 3);
        let b = t.branches();
        assert_eq!(b.len(), 8);
        let mut sorted = b.clone();
        sorted.sort();
        assert_eq!(b, sorted);
        assert_eq!(b[0], ts("000"));
        assert_eq!(b[7], ts("111"));
    }

    #[test]
    fn memo_does_not_change_outputs() {
        let plain = Generator::new("parity", |x| (x.bits().filter(|&b| b == 1).count() % 2) as u8);
        let memoized = Generator::new("parity", |x| (x.bits().filter(|&b| b == 1).count() % 2) as u8)
            .with_memo();
        for x in ["", "1", "011", "110110"] {
            let x = ts(x);
            for m in 1..=6 {
                assert_eq!(cot(&plain, &x, m), cot(&memoized, &x, m));
            }
            // Repeat to exercise cache hits.
            assert_eq!(cot(&plain, &x, 6), cot(&memoized, &x, 6));
        }
    }

    fn table_gen_strategy() -> impl Strategy<Value = Generator> {
        // Random table over all strings of length <= 6 extending "", plus
        // default 0: enough to exercise arbitrary small trajectories.
        proptest::collection::vec(0u8..=1, 127).prop_map(|labels| {
            let mut table = HashMap::new();
            let mut idx = 0;
            for n in 0..=6u64 {
                for s in all_bit_strings(n) {
                    table.insert(s, labels[idx]);
                    idx += 1;
                }
            }
            Generator::from_table("random_table", table)
        })
    }

    proptest! {
        #[test]
        fn cot_prefix_property(g in table_gen_strategy(), m1 in 0u64..5, m2 in 0u64..5, x in "[01]{0,3}") {
            let (lo, hi) = (m1.min(m2), m1.max(m2));
            let x = ts(&x);
            let short = cot(&g, &x, lo);
            let long = cot(&g, &x, hi);
            prop_assert!(long.starts_with(&short));
            prop_assert_eq!(short.len(), lo);
            prop_assert_eq!(long.len(), hi);
        }

        #[test]
        fn cot_agrees_with_step_resimulation(g in table_gen_strategy(), m in 1u64..6, x in "[01]{0,3}") {
            // Independent oracle: iterate apply_and_append on the full
            // string and read off the suffix.
            let x = ts(&x);
            let mut full = x.clone();
            for _ in 0..m {
                full = apply_and_append(&g, &full);
            }
            prop_assert_eq!(full.prefix(x.len()), x.clone());
            prop_assert_eq!(cot(&g, &x, m), full.suffix(m));
            prop_assert_eq!(e2e(&g, &x, m), full.last().unwrap());
            prop_assert_eq!(trajectory_branch(&g, &x, m), cot(&g, &x, m));
        }
    }
}
