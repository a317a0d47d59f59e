//! Index sets `Q(k, n)`: strictly increasing k-sequences drawn from `{1, ..., n}`,
//! ordered lexicographically.
//!
//! Entries are 1-based throughout this module. Callers that index matrices use
//! [`IndexSeq::zero_based`].

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{domain, Result};

/// Largest universe size accepted by the public API.
pub const MAX_N: usize = 30;

/// Largest table materialized by [`generate_sequences`].
pub const MAX_TABLE_LEN: usize = 1_000_000;

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

fn check_kn(k: usize, n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(domain(format!("n = {n} outside 1..={MAX_N}")));
    }
    if k == 0 || k > n {
        return Err(domain(format!("k = {k} outside 1..={n}")));
    }
    Ok(())
}

/// A strictly increasing sequence of `k` integers from `{1, ..., n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSeq {
    entries: Vec<usize>,
    n: usize,
}

impl IndexSeq {
    pub fn new(entries: Vec<usize>, n: usize) -> Result<Self> {
        check_kn(entries.len().max(1), n)?;
        if entries.is_empty() {
            return Err(domain("index sequence must be nonempty"));
        }
        if entries[0] == 0 || entries[entries.len() - 1] > n {
            return Err(domain(format!("entries {entries:?} not within 1..={n}")));
        }
        if entries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(domain(format!("entries {entries:?} not strictly increasing")));
        }
        Ok(Self { entries, n })
    }

    /// Caller guarantees the invariants.
    pub(crate) fn from_raw(entries: Vec<usize>, n: usize) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0] < w[1]));
        Self { entries, n }
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// 0-based positions, for indexing into matrices.
    pub fn zero_based(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&e| e - 1)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.entries.binary_search(&i).is_ok()
    }

    /// Lexicographic rank within `Q(k, n)`, starting at 1.
    pub fn rank(&self) -> usize {
        rank_entries(&self.entries, self.n)
    }

    /// `(-1)^(a_1 + ... + a_k)`.
    pub fn signature(&self) -> i8 {
        signature_of(&self.entries)
    }

    /// `{1..n} \ self`, increasing. Fails when `k = n`.
    pub fn complement(&self) -> Result<IndexSeq> {
        if self.k() == self.n {
            return Err(domain("complement of the full sequence is empty"));
        }
        let entries = (1..=self.n).filter(|i| !self.contains(*i)).collect();
        Ok(IndexSeq::from_raw(entries, self.n))
    }
}

impl fmt::Display for IndexSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn signature_of(entries: &[usize]) -> i8 {
    if entries.iter().sum::<usize>() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// 1-based lexicographic rank of a valid increasing sequence.
pub(crate) fn rank_entries(entries: &[usize], n: usize) -> usize {
    let k = entries.len();
    let mut skipped: u64 = 0;
    let mut prev = 0;
    for (i, &a) in entries.iter().enumerate() {
        for v in (prev + 1)..a {
            skipped += binomial(n - v, k - i - 1);
        }
        prev = a;
    }
    skipped as usize + 1
}

/// Position of `seq` in `Q(k, n)`, 1-based.
pub fn rank(seq: &IndexSeq) -> usize {
    seq.rank()
}

/// Inverse of [`rank`]: the `i`-th (1-based) element of `Q(k, n)`.
pub fn unrank(i: usize, k: usize, n: usize) -> Result<IndexSeq> {
    check_kn(k, n)?;
    let total = binomial(n, k);
    if i == 0 || i as u64 > total {
        return Err(domain(format!("rank {i} outside 1..={total}")));
    }
    let mut rest = (i - 1) as u64;
    let mut entries = Vec::with_capacity(k);
    let mut v = 1;
    for slot in 0..k {
        loop {
            let count = binomial(n - v, k - slot - 1);
            if rest < count {
                break;
            }
            rest -= count;
            v += 1;
        }
        entries.push(v);
        v += 1;
    }
    Ok(IndexSeq::from_raw(entries, n))
}

/// `(-1)^(sum of entries)`.
pub fn signature(seq: &IndexSeq) -> i8 {
    seq.signature()
}

/// `{1..n} \ seq` in increasing order.
pub fn complement(seq: &IndexSeq) -> Result<IndexSeq> {
    seq.complement()
}

/// Streams `Q(k, n)` in lexicographic order without materializing it.
#[derive(Clone, Debug)]
pub struct Sequences {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Sequences {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        check_kn(k, n)?;
        Ok(Self::unchecked(k, n))
    }

    pub(crate) fn unchecked(k: usize, n: usize) -> Self {
        Self {
            n,
            current: Some((1..=k).collect()),
        }
    }
}

impl Iterator for Sequences {
    type Item = IndexSeq;

    fn next(&mut self) -> Option<IndexSeq> {
        let cur = self.current.take()?;
        let k = cur.len();
        let mut next = cur.clone();
        // rightmost entry that can still grow
        let pivot = (0..k).rev().find(|&i| next[i] < self.n - (k - 1 - i));
        if let Some(i) = pivot {
            next[i] += 1;
            for j in (i + 1)..k {
                next[j] = next[j - 1] + 1;
            }
            self.current = Some(next);
        }
        Some(IndexSeq::from_raw(cur, self.n))
    }
}

/// All of `Q(k, n)` in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexTable {
    k: usize,
    n: usize,
    seqs: Vec<IndexSeq>,
}

impl LexTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `C(n, k)`.
    pub fn len(&self) -> usize {
        self.seqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seqs.is_empty()
    }

    pub fn seqs(&self) -> &[IndexSeq] {
        &self.seqs
    }

    /// 1-based access, matching [`rank`].
    pub fn get(&self, rank: usize) -> Option<&IndexSeq> {
        rank.checked_sub(1).and_then(|i| self.seqs.get(i))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, IndexSeq> {
        self.seqs.iter()
    }
}

impl<'a> IntoIterator for &'a LexTable {
    type Item = &'a IndexSeq;
    type IntoIter = std::slice::Iter<'a, IndexSeq>;

    fn into_iter(self) -> Self::IntoIter {
        self.seqs.iter()
    }
}

type TableCache = Mutex<HashMap<(usize, usize), Arc<LexTable>>>;

fn cache() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `Q(k, n)` in lexicographic order. Tables are memoized per `(k, n)`.
pub fn generate_sequences(k: usize, n: usize) -> Result<Arc<LexTable>> {
    check_kn(k, n)?;
    let len = binomial(n, k);
    if len > MAX_TABLE_LEN as u64 {
        return Err(domain(format!(
            "C({n},{k}) = {len} exceeds the table limit {MAX_TABLE_LEN}"
        )));
    }
    if let Some(t) = cache().lock().expect("table cache poisoned").get(&(k, n)) {
        return Ok(Arc::clone(t));
    }
    let table = Arc::new(LexTable {
        k,
        n,
        seqs: Sequences::unchecked(k, n).collect(),
    });
    cache()
        .lock()
        .expect("table cache poisoned")
        .entry((k, n))
        .or_insert_with(|| Arc::clone(&table));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(e: &[usize], n: usize) -> IndexSeq {
        IndexSeq::new(e.to_vec(), n).unwrap()
    }

    fn entries(t: &LexTable) -> Vec<Vec<usize>> {
        t.iter().map(|s| s.entries().to_vec()).collect()
    }

    #[test]
    fn q34_and_q24_orders() {
        let t = generate_sequences(3, 4).unwrap();
        assert_eq!(
            entries(&t),
            vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]]
        );
        let t = generate_sequences(1, 3).unwrap();
        assert_eq!(entries(&t), vec![vec![1], vec![2], vec![3]]);
        let t = generate_sequences(2, 4).unwrap();
        assert_eq!(
            entries(&t),
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
    }

    #[test]
    fn out_of_range_arguments() {
        assert!(generate_sequences(0, 3).is_err());
        assert!(generate_sequences(4, 3).is_err());
        assert!(generate_sequences(1, 31).is_err());
        assert!(generate_sequences(15, 30).is_err()); // table too large
        assert!(Sequences::new(15, 30).is_ok());
        assert!(IndexSeq::new(vec![2, 2], 3).is_err());
        assert!(IndexSeq::new(vec![0, 2], 3).is_err());
        assert!(IndexSeq::new(vec![1, 4], 3).is_err());
        assert!(IndexSeq::new(vec![], 3).is_err());
        assert!(unrank(0, 2, 4).is_err());
        assert!(unrank(7, 2, 4).is_err());
    }

    #[test]
    fn rank_and_unrank_examples() {
        assert_eq!(rank(&seq(&[1, 2, 3], 4)), 1);
        assert_eq!(unrank(6, 2, 4).unwrap().entries(), &[3, 4]);
        let t = generate_sequences(3, 6).unwrap();
        assert_eq!(t.len(), 20);
        for i in 1..=20 {
            let s = unrank(i, 3, 6).unwrap();
            assert_eq!(rank(&s), i);
            assert_eq!(t.get(i).unwrap(), &s);
        }
    }

    #[test]
    fn signatures() {
        assert_eq!(signature(&seq(&[1, 2], 4)), -1);
        assert_eq!(signature(&seq(&[1, 3], 4)), 1);
        assert_eq!(signature(&seq(&[1], 4)), -1);
        assert_eq!(signature(&seq(&[2, 3, 4], 4)), -1);
    }

    #[test]
    fn complements() {
        assert_eq!(complement(&seq(&[1, 2], 4)).unwrap().entries(), &[3, 4]);
        assert_eq!(complement(&seq(&[2, 4], 5)).unwrap().entries(), &[1, 3, 5]);
        assert!(complement(&seq(&[1, 2, 3], 3)).is_err());
    }

    #[test]
    fn table_sizes_and_complement_reversal() {
        for n in 1..=8 {
            for k in 1..=n {
                let t = generate_sequences(k, n).unwrap();
                assert_eq!(t.len() as u64, binomial(n, k));
                assert!(t.seqs().windows(2).all(|w| w[0] < w[1]));
                for (i, s) in t.iter().enumerate() {
                    assert_eq!(s.rank(), i + 1);
                }
                if k < n {
                    let dual = generate_sequences(n - k, n).unwrap();
                    let r = t.len();
                    for (i, s) in t.iter().enumerate() {
                        assert_eq!(&s.complement().unwrap(), dual.get(r - i).unwrap());
                        let parity = if (n * (n + 1) / 2) % 2 == 0 { 1 } else { -1 };
                        assert_eq!(s.signature() * s.complement().unwrap().signature(), parity);
                    }
                }
            }
        }
    }

    #[test]
    fn memoized_tables_are_shared() {
        let a = generate_sequences(2, 7).unwrap();
        let b = generate_sequences(2, 7).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    proptest! {
        #[test]
        fn unrank_inverts_rank(n in 1usize..=20, k_frac in 0.0f64..1.0, pos in 0.0f64..1.0) {
            let k = 1 + ((n - 1) as f64 * k_frac) as usize;
            let total = binomial(n, k);
            let i = 1 + ((total - 1) as f64 * pos) as usize;
            let s = unrank(i, k, n).unwrap();
            prop_assert_eq!(s.k(), k);
            prop_assert_eq!(rank(&s), i);
        }
    }
}
