//! Finite class tables and member subsets.

use std::collections::BTreeMap;
use std::hash::Hash;

use crate::dims::DimsError;
use crate::gen::{cot, e2e, Generator};
use crate::token::TokenString;

/// Label spaces the dimension recursions run over: single tokens for base
/// and end-to-end tables, trajectories for chain-of-thought tables.
pub trait Label: Clone + Eq + Ord + Hash + std::fmt::Debug {
    /// The token an online prediction is scored against: the label itself
    /// for token labels, the final token for trajectory labels.
    fn final_token(&self) -> u8;
}

impl Label for u8 {
    fn final_token(&self) -> u8 {
        *self
    }
}

impl Label for TokenString {
    fn final_token(&self) -> u8 {
        self.last().expect("trajectory labels are nonempty")
    }
}

/// A finite class presented extensionally: `rows[member][i]` is the label
/// member `member` assigns to `pool[i]`.
///
/// Pool instances are unique. Duplicate label rows are permitted (the
/// dimensions ignore them) but can be inspected via
/// [`FiniteClassTable::duplicate_row_groups`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteClassTable<L> {
    pool: Vec<TokenString>,
    member_ids: Vec<String>,
    rows: Vec<Vec<L>>,
}

impl<L: Label> FiniteClassTable<L> {
    pub fn new(
        pool: Vec<TokenString>,
        member_ids: Vec<String>,
        rows: Vec<Vec<L>>,
    ) -> Result<Self, DimsError> {
        if rows.is_empty() {
            return Err(DimsError::EmptyClass);
        }
        if pool.is_empty() {
            return Err(DimsError::EmptyPool);
        }
        for (member, row) in rows.iter().enumerate() {
            if row.len() != pool.len() {
                return Err(DimsError::RaggedRow { member, got: row.len(), want: pool.len() });
            }
        }
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                if pool[i] == pool[j] {
                    return Err(DimsError::DuplicateInstance { first: i, second: j });
                }
            }
        }
        debug_assert_eq!(member_ids.len(), rows.len());
        Ok(FiniteClassTable { pool, member_ids, rows })
    }

    pub fn pool(&self) -> &[TokenString] {
        &self.pool
    }

    pub fn member_ids(&self) -> &[String] {
        &self.member_ids
    }

    pub fn n_members(&self) -> usize {
        self.rows.len()
    }

    pub fn n_pool(&self) -> usize {
        self.pool.len()
    }

    pub fn label(&self, member: usize, instance: usize) -> &L {
        &self.rows[member][instance]
    }

    pub fn row(&self, member: usize) -> &[L] {
        &self.rows[member]
    }

    /// Every member of the universe, as a subset.
    pub fn full_set(&self) -> MemberSet {
        MemberSet::full(self.n_members())
    }

    /// Groups of members (by index) sharing an identical label row; only
    /// groups of two or more are reported.
    pub fn duplicate_row_groups(&self) -> Vec<Vec<usize>> {
        let mut groups: BTreeMap<&[L], Vec<usize>> = BTreeMap::new();
        for (i, row) in self.rows.iter().enumerate() {
            groups.entry(row.as_slice()).or_default().push(i);
        }
        groups.into_values().filter(|g| g.len() > 1).collect()
    }

    /// A table with one representative per distinct label row, preserving
    /// first-occurrence order.
    pub fn dedup_rows(&self) -> Self {
        let mut seen: BTreeMap<&[L], ()> = BTreeMap::new();
        let mut pool_rows = Vec::new();
        let mut ids = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            if seen.insert(row.as_slice(), ()).is_none() {
                pool_rows.push(row.clone());
                ids.push(self.member_ids[i].clone());
            }
        }
        FiniteClassTable { pool: self.pool.clone(), member_ids: ids, rows: pool_rows }
    }

    /// Number of distinct label rows.
    pub fn distinct_rows(&self) -> usize {
        let mut rows: Vec<&[L]> = self.rows.iter().map(|r| r.as_slice()).collect();
        rows.sort();
        rows.dedup();
        rows.len()
    }

    /// Members in `set` whose label on instance `x_idx` equals `want`.
    pub fn restrict(&self, set: &MemberSet, x_idx: usize, want: &L) -> MemberSet {
        let mut out = MemberSet::empty(self.n_members());
        for m in set.iter() {
            if &self.rows[m][x_idx] == want {
                out.insert(m);
            }
        }
        out
    }

    /// Realized labels on instance `x_idx` among `set`, each with the
    /// members inducing it, in label order.
    pub fn groups(&self, set: &MemberSet, x_idx: usize) -> BTreeMap<&L, MemberSet> {
        let mut out: BTreeMap<&L, MemberSet> = BTreeMap::new();
        for m in set.iter() {
            out.entry(&self.rows[m][x_idx])
                .or_insert_with(|| MemberSet::empty(self.n_members()))
                .insert(m);
        }
        out
    }
}

/// Table whose labels are the raw next tokens `g(x)`.
pub fn base_table(
    class: &[Generator],
    pool: &[TokenString],
) -> Result<FiniteClassTable<u8>, DimsError> {
    let rows = class.iter().map(|g| pool.iter().map(|x| g.next(x)).collect()).collect();
    FiniteClassTable::new(pool.to_vec(), class.iter().map(|g| g.id().to_string()).collect(), rows)
}

/// Table whose labels are end-to-end answers at generation length `m`.
pub fn e2e_table(
    class: &[Generator],
    pool: &[TokenString],
    m: u64,
) -> Result<FiniteClassTable<u8>, DimsError> {
    let rows = class.iter().map(|g| pool.iter().map(|x| e2e(g, x, m)).collect()).collect();
    FiniteClassTable::new(pool.to_vec(), class.iter().map(|g| g.id().to_string()).collect(), rows)
}

/// Table whose labels are whole length-`m` trajectories.
pub fn cot_table(
    class: &[Generator],
    pool: &[TokenString],
    m: u64,
) -> Result<FiniteClassTable<TokenString>, DimsError> {
    let rows = class.iter().map(|g| pool.iter().map(|x| cot(g, x, m)).collect()).collect();
    FiniteClassTable::new(pool.to_vec(), class.iter().map(|g| g.id().to_string()).collect(), rows)
}

/// A subset of class members, packed into 64-bit words.
///
/// The word count is fixed by the universe size and trailing bits are kept
/// zero, so equal subsets are bitwise equal: the type doubles as the memo
/// key for every dimension and game-value recursion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemberSet {
    words: Box<[u64]>,
}

impl MemberSet {
    pub fn empty(universe: usize) -> Self {
        MemberSet { words: vec![0; universe.div_ceil(64)].into_boxed_slice() }
    }

    pub fn full(universe: usize) -> Self {
        let mut words = vec![u64::MAX; universe.div_ceil(64)];
        let tail = universe % 64;
        if tail != 0 {
            *words.last_mut().expect("universe > 0") = (1u64 << tail) - 1;
        }
        if universe == 0 {
            words.clear();
        }
        MemberSet { words: words.into_boxed_slice() }
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(universe);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Member indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::ts;

    #[test]
    fn member_set_round_trip() {
        let mut s = MemberSet::empty(130);
        for i in [0, 63, 64, 128, 129] {
            assert!(!s.contains(i));
            s.insert(i);
            assert!(s.contains(i));
        }
        assert_eq!(s.len(), 5);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 63, 64, 128, 129]);
        s.remove(64);
        assert_eq!(s.len(), 4);
        assert!(!s.contains(64));
        assert_eq!(MemberSet::full(130).len(), 130);
        assert!(MemberSet::empty(0).is_empty());
    }

    #[test]
    fn full_set_is_canonical() {
        let full = MemberSet::full(7);
        let built = MemberSet::from_indices(7, 0..7);
        assert_eq!(full, built);
    }

    #[test]
    fn table_validation() {
        let pool = vec![ts("0"), ts("1")];
        assert_eq!(
            FiniteClassTable::<u8>::new(pool.clone(), vec![], vec![]),
            Err(DimsError::EmptyClass)
        );
        assert_eq!(
            FiniteClassTable::new(vec![], vec!["a".into()], vec![vec![0u8]]),
            Err(DimsError::EmptyPool)
        );
        assert_eq!(
            FiniteClassTable::new(pool.clone(), vec!["a".into()], vec![vec![0u8]]),
            Err(DimsError::RaggedRow { member: 0, got: 1, want: 2 })
        );
        assert_eq!(
            FiniteClassTable::new(
                vec![ts("0"), ts("0")],
                vec!["a".into()],
                vec![vec![0u8, 1]]
            ),
            Err(DimsError::DuplicateInstance { first: 0, second: 1 })
        );
    }

    #[test]
    fn duplicate_rows_are_flagged_and_dedupable() {
        let pool = vec![ts("0"), ts("1")];
        let t = FiniteClassTable::new(
            pool,
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0u8, 1], vec![0, 1], vec![1, 1]],
        )
        .unwrap();
        assert_eq!(t.duplicate_row_groups(), vec![vec![0, 1]]);
        let d = t.dedup_rows();
        assert_eq!(d.n_members(), 2);
        assert_eq!(d.member_ids(), &["a".to_string(), "c".to_string()]);
        assert_eq!(t.distinct_rows(), 2);
    }

    #[test]
    fn groups_partition_the_set() {
        let pool = vec![ts("0")];
        let t = FiniteClassTable::new(
            pool,
            (0..4).map(|i| format!("g{i}")).collect(),
            vec![vec![0u8], vec![1], vec![0], vec![1]],
        )
        .unwrap();
        let groups = t.groups(&t.full_set(), 0);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[&0].iter().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(groups[&1].iter().collect::<Vec<_>>(), vec![1, 3]);
    }
}
