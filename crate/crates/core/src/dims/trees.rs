//! Instance-labeled binary trees, realized branches, the sequential
//! shattering bound, and tree inflation.

use std::collections::BTreeSet;

use crate::dims::DimsError;
use crate::gen::Generator;
use crate::token::TokenString;

/// A binary instance-labeled tree. Each internal node carries an instance;
/// its outgoing edges are labeled 0 (`zero` child) and 1 (`one` child).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LittlestoneTree {
    Leaf,
    Node {
        instance: TokenString,
        zero: Box<LittlestoneTree>,
        one: Box<LittlestoneTree>,
    },
}

impl LittlestoneTree {
    /// A perfect depth-`levels.len()` tree whose every node at level `i`
    /// carries `levels[i]`.
    pub fn uniform(levels: &[TokenString]) -> Self {
        match levels.split_first() {
            None => LittlestoneTree::Leaf,
            Some((first, rest)) => LittlestoneTree::Node {
                instance: first.clone(),
                zero: Box::new(Self::uniform(rest)),
                one: Box::new(Self::uniform(rest)),
            },
        }
    }

    /// A perfect depth-`depth` tree with node instances chosen by address:
    /// `pick(path)` labels the node reached along edge string `path`.
    pub fn perfect(depth: u64, pick: &mut impl FnMut(&TokenString) -> TokenString) -> Self {
        fn build(
            depth: u64,
            path: &mut TokenString,
            pick: &mut impl FnMut(&TokenString) -> TokenString,
        ) -> LittlestoneTree {
            if depth == 0 {
                return LittlestoneTree::Leaf;
            }
            let instance = pick(path);
            let mut zero_path = path.clone();
            zero_path.push(0);
            let mut one_path = path.clone();
            one_path.push(1);
            LittlestoneTree::Node {
                instance,
                zero: Box::new(build(depth - 1, &mut zero_path, pick)),
                one: Box::new(build(depth - 1, &mut one_path, pick)),
            }
        }
        build(depth, &mut TokenString::empty(), pick)
    }

    pub fn max_depth(&self) -> usize {
        match self {
            LittlestoneTree::Leaf => 0,
            LittlestoneTree::Node { zero, one, .. } => 1 + zero.max_depth().max(one.max_depth()),
        }
    }

    /// Depth if the tree is perfect (all leaves equally deep).
    pub fn perfect_depth(&self) -> Option<usize> {
        match self {
            LittlestoneTree::Leaf => Some(0),
            LittlestoneTree::Node { zero, one, .. } => {
                let (a, b) = (zero.perfect_depth()?, one.perfect_depth()?);
                (a == b).then_some(a + 1)
            }
        }
    }

    /// All root-to-leaf edge strings.
    pub fn branches(&self) -> Vec<TokenString> {
        let mut out = Vec::new();
        let mut path = TokenString::empty();
        collect_branches(self, &mut path, &mut out);
        out
    }

    /// Distinct instances labeling the tree's nodes.
    pub fn instances(&self) -> BTreeSet<TokenString> {
        let mut out = BTreeSet::new();
        fn walk(t: &LittlestoneTree, out: &mut BTreeSet<TokenString>) {
            if let LittlestoneTree::Node { instance, zero, one } = t {
                out.insert(instance.clone());
                walk(zero, out);
                walk(one, out);
            }
        }
        walk(self, &mut out);
        out
    }
}

fn collect_branches(t: &LittlestoneTree, path: &mut TokenString, out: &mut Vec<TokenString>) {
    match t {
        LittlestoneTree::Leaf => out.push(path.clone()),
        LittlestoneTree::Node { zero, one, .. } => {
            let mut p0 = path.clone();
            p0.push(0);
            collect_branches(zero, &mut p0, out);
            let mut p1 = path.clone();
            p1.push(1);
            collect_branches(one, &mut p1, out);
        }
    }
}

/// Branches of `tree` realized by at least one of `n_members` members,
/// where `label(member, instance)` is the token the member assigns.
///
/// A member realizes a branch when it agrees with every (instance, edge)
/// pair along it. Survivor sets are propagated down the tree, so the cost
/// is linear in tree size times surviving members.
pub fn realized_branches_with(
    tree: &LittlestoneTree,
    n_members: usize,
    label: &mut impl FnMut(usize, &TokenString) -> u8,
) -> BTreeSet<TokenString> {
    let mut out = BTreeSet::new();
    let survivors: Vec<usize> = (0..n_members).collect();
    let mut path = TokenString::empty();
    realize_rec(tree, &survivors, &mut path, label, &mut out);
    out
}

fn realize_rec(
    tree: &LittlestoneTree,
    survivors: &[usize],
    path: &mut TokenString,
    label: &mut impl FnMut(usize, &TokenString) -> u8,
    out: &mut BTreeSet<TokenString>,
) {
    if survivors.is_empty() {
        return;
    }
    match tree {
        LittlestoneTree::Leaf => {
            out.insert(path.clone());
        }
        LittlestoneTree::Node { instance, zero, one } => {
            let mut go_zero = Vec::new();
            let mut go_one = Vec::new();
            for &m in survivors {
                if label(m, instance) == 0 {
                    go_zero.push(m);
                } else {
                    go_one.push(m);
                }
            }
            let mut p0 = path.clone();
            p0.push(0);
            realize_rec(zero, &go_zero, &mut p0, label, out);
            let mut p1 = path.clone();
            p1.push(1);
            realize_rec(one, &go_one, &mut p1, label, out);
        }
    }
}

/// Branches realized by a class of generators evaluated as plain next-token
/// maps on the tree's node instances.
pub fn realized_branches(class: &[Generator], tree: &LittlestoneTree) -> BTreeSet<TokenString> {
    realized_branches_with(tree, class.len(), &mut |m, x| class[m].next(x))
}

/// The sequential shattering bound: `sum_{i=0}^{min(d,n)} C(n, i)`.
///
/// A class of Littlestone dimension d realizes at most this many branches
/// in any depth-n tree. Exact integer arithmetic; errors if the sum would
/// not fit in u128 (n up to 127 is always safe).
pub fn ssp_bound(n: u64, d: u64) -> Result<u128, DimsError> {
    fn gcd(mut a: u128, mut b: u128) -> u128 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    let overflow = DimsError::BinomialOverflow { n, d };
    let mut total: u128 = 0;
    let mut binom: u128 = 1; // C(n, 0)
    for i in 0..=d.min(n) {
        if i > 0 {
            // C(n, i) = C(n, i-1) * (n - i + 1) / i. Cancel the gcd before
            // multiplying so intermediates never exceed C(n, i) itself;
            // the reduced denominator divides C(n, i-1) exactly.
            let g = gcd(u128::from(n - i + 1), u128::from(i));
            let num = u128::from(n - i + 1) / g;
            let den = u128::from(i) / g;
            binom = (binom / den).checked_mul(num).ok_or(overflow.clone())?;
        }
        total = total.checked_add(binom).ok_or(overflow.clone())?;
    }
    Ok(total)
}

/// Replaces every node/edge pair of `base` with the depth-`m` generation
/// tree of its instance.
///
/// Walking the inflated tree performs the chain-of-thought: inside a pasted
/// generation tree of instance x, the node at address u is labeled `x ∘ u`;
/// at its leaves, the final generated token selects which base child's
/// generation tree is pasted next (0-leaf continues to the base 0-child).
/// Leaves of `base` stay leaves, so a perfect depth-`k` base inflates to a
/// perfect depth-`k*m` tree.
pub fn inflate_tree(base: &LittlestoneTree, m: u64) -> LittlestoneTree {
    assert!(m >= 1, "generation length must be at least 1");
    match base {
        LittlestoneTree::Leaf => LittlestoneTree::Leaf,
        LittlestoneTree::Node { instance, zero, one } => grow(instance.clone(), m, zero, one, m),
    }
}

fn grow(
    prompt: TokenString,
    left: u64,
    base_zero: &LittlestoneTree,
    base_one: &LittlestoneTree,
    m: u64,
) -> LittlestoneTree {
    if left == 0 {
        unreachable!("grow is called with left >= 1");
    }
    let mut zero_prompt = prompt.clone();
    zero_prompt.push(0);
    let mut one_prompt = prompt.clone();
    one_prompt.push(1);
    let (zero, one) = if left == 1 {
        // Generation finished: the last token routes into the base child.
        (inflate_tree(base_zero, m), inflate_tree(base_one, m))
    } else {
        (
            grow(zero_prompt, left - 1, base_zero, base_one, m),
            grow(one_prompt, left - 1, base_zero, base_one, m),
        )
    };
    LittlestoneTree::Node { instance: prompt, zero: Box::new(zero), one: Box::new(one) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::ts;

    #[test]
    fn ssp_bound_examples() {
        assert_eq!(ssp_bound(5, 0).unwrap(), 1);
        assert_eq!(ssp_bound(4, 2).unwrap(), 1 + 4 + 6);
        assert_eq!(ssp_bound(3, 5).unwrap(), 8); // d >= n gives 2^n
        assert_eq!(ssp_bound(0, 0).unwrap(), 1);
        assert_eq!(ssp_bound(127, 127).unwrap(), 1u128 << 127);
    }

    #[test]
    fn ssp_bound_is_monotone_in_d() {
        for n in 0..20u64 {
            for d in 0..n {
                assert!(ssp_bound(n, d).unwrap() <= ssp_bound(n, d + 1).unwrap());
            }
        }
    }

    #[test]
    fn branches_of_uniform_tree() {
        let t = LittlestoneTree::uniform(&[ts("0"), ts("1")]);
        assert_eq!(t.max_depth(), 2);
        assert_eq!(t.perfect_depth(), Some(2));
        let b = t.branches();
        assert_eq!(b, vec![ts("00"), ts("01"), ts("10"), ts("11")]);
        assert_eq!(t.instances().len(), 2);
    }

    #[test]
    fn single_constant_realizes_one_branch() {
        let t = LittlestoneTree::uniform(&[ts("0"), ts("1"), ts("00")]);
        let class = [Generator::constant(0)];
        let realized = realized_branches(&class, &t);
        assert_eq!(realized.into_iter().collect::<Vec<_>>(), vec![ts("000")]);
    }

    #[test]
    fn two_constants_realize_two_branches() {
        let t = LittlestoneTree::uniform(&[ts("0"), ts("1")]);
        let class = [Generator::constant(0), Generator::constant(1)];
        let realized = realized_branches(&class, &t);
        assert_eq!(realized.into_iter().collect::<Vec<_>>(), vec![ts("00"), ts("11")]);
    }

    #[test]
    fn inflation_of_depth_one_base_is_a_generation_tree() {
        // Depth-1 base with instance "0", m = 2: the inflated tree is the
        // depth-2 generation tree of "0": root "0", children "00"/"01".
        let base = LittlestoneTree::Node {
            instance: ts("0"),
            zero: Box::new(LittlestoneTree::Leaf),
            one: Box::new(LittlestoneTree::Leaf),
        };
        let inflated = inflate_tree(&base, 2);
        assert_eq!(inflated.perfect_depth(), Some(2));
        let want = LittlestoneTree::Node {
            instance: ts("0"),
            zero: Box::new(LittlestoneTree::Node {
                instance: ts("00"),
                zero: Box::new(LittlestoneTree::Leaf),
                one: Box::new(LittlestoneTree::Leaf),
            }),
            one: Box::new(LittlestoneTree::Node {
                instance: ts("01"),
                zero: Box::new(LittlestoneTree::Leaf),
                one: Box::new(LittlestoneTree::Leaf),
            }),
        };
        assert_eq!(inflated, want);
        // m = 1 leaves the base unchanged.
        assert_eq!(inflate_tree(&base, 1), base);
    }

    #[test]
    fn inflation_depth_multiplies() {
        let base = LittlestoneTree::uniform(&[ts("0"), ts("1"), ts("01")]);
        for m in 1..=3u64 {
            let inflated = inflate_tree(&base, m);
            assert_eq!(inflated.perfect_depth(), Some(3 * m as usize));
        }
    }

    #[test]
    fn inflation_routes_on_final_generated_token() {
        // Base: root "1" with distinct children instances; m = 2. In the
        // inflated tree, the child pasted under trajectory "ab" must be the
        // base child selected by b, rooted at its own instance.
        let base = LittlestoneTree::Node {
            instance: ts("1"),
            zero: Box::new(LittlestoneTree::Node {
                instance: ts("000"),
                zero: Box::new(LittlestoneTree::Leaf),
                one: Box::new(LittlestoneTree::Leaf),
            }),
            one: Box::new(LittlestoneTree::Node {
                instance: ts("111"),
                zero: Box::new(LittlestoneTree::Leaf),
                one: Box::new(LittlestoneTree::Leaf),
            }),
        };
        let inflated = inflate_tree(&base, 2);
        // Trajectory "10" ends in 0, so the 0-side base child ("000") is
        // pasted there; "01" ends in 1 and reaches "111".
        assert_eq!(instances_along(&inflated, &ts("10")), vec![ts("1"), ts("11"), ts("000")]);
        assert_eq!(instances_along(&inflated, &ts("01")), vec![ts("1"), ts("10"), ts("111")]);
    }

    /// Instances at the nodes visited while descending along `edges`.
    fn instances_along(tree: &LittlestoneTree, edges: &TokenString) -> Vec<TokenString> {
        let mut node = tree;
        let mut seen = Vec::new();
        for i in 0..=edges.len() {
            let LittlestoneTree::Node { instance, zero, one } = node else {
                panic!("descent hit a leaf early");
            };
            seen.push(instance.clone());
            if i < edges.len() {
                node = if edges.get(i).unwrap() == 0 { zero } else { one };
            }
        }
        seen
    }
}
