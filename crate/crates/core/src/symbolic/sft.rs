//! Subshifts of finite type over a small digit alphabet.

use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftDescriptor {
    pub alphabet_size: usize,
    /// Minimal forbidden words, sorted by length then lexicographically.
    pub forbidden_words: Vec<String>,
    /// Length of the blocks labelling `states` (1 unless a forbidden word is longer than 2).
    pub block: usize,
    pub states: Vec<String>,
    /// `transition_matrix[i][j] = 1` iff state `j` may follow state `i`.
    pub transition_matrix: Vec<Vec<u8>>,
}

pub(crate) fn symbol(i: usize) -> char {
    char::from_digit(i as u32, 10).expect("alphabet of at most 10 symbols")
}

impl SftDescriptor {
    pub fn new(alphabet_size: usize, forbidden: &[&str]) -> Self {
        assert!((1..=10).contains(&alphabet_size), "alphabet of 1..=10 symbols");
        let mut forbidden_words: Vec<String> = forbidden.iter().map(|s| s.to_string()).collect();
        forbidden_words.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        forbidden_words.dedup();
        let longest = forbidden_words.iter().map(String::len).max().unwrap_or(0);
        let block = longest.saturating_sub(1).max(1);
        let mut sft = SftDescriptor { alphabet_size, forbidden_words, block, states: vec![], transition_matrix: vec![] };
        sft.states = sft.admissible_words(block);
        let n = sft.states.len();
        let mut a = vec![vec![0u8; n]; n];
        for (i, u) in sft.states.iter().enumerate() {
            for (j, v) in sft.states.iter().enumerate() {
                if u[1..] == v[..block - 1] && sft.is_admissible(&format!("{u}{}", &v[block - 1..])) {
                    a[i][j] = 1;
                }
            }
        }
        sft.transition_matrix = a;
        sft
    }

    pub fn full(alphabet_size: usize) -> Self {
        Self::new(alphabet_size, &[])
    }

    /// Binary shift without the word `00`.
    pub fn golden_mean() -> Self {
        Self::new(2, &["00"])
    }

    pub fn is_admissible(&self, w: &str) -> bool {
        w.chars().all(|ch| ch.to_digit(10).is_some_and(|d| (d as usize) < self.alphabet_size))
            && !self.forbidden_words.iter().any(|f| w.contains(f.as_str()))
    }

    /// All admissible words of length `n`, in lexicographic order.
    pub fn admissible_words(&self, n: usize) -> Vec<String> {
        let mut out = vec![String::new()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * self.alphabet_size);
            for w in &out {
                for s in 0..self.alphabet_size {
                    let mut v = w.clone();
                    v.push(symbol(s));
                    if self.is_admissible(&v) {
                        next.push(v);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Number of admissible words of length `n`, from powers of the transition matrix.
    pub fn count_words(&self, n: usize) -> u128 {
        if n < self.block {
            return self.admissible_words(n).len() as u128;
        }
        let k = self.states.len();
        let mut v = vec![1u128; k];
        for _ in 0..(n - self.block) {
            v = (0..k)
                .map(|i| (0..k).map(|j| self.transition_matrix[i][j] as u128 * v[j]).sum())
                .collect();
        }
        v.iter().sum()
    }

    /// Every state reaches every other.
    pub fn is_irreducible(&self) -> bool {
        let k = self.states.len();
        if k == 0 {
            return false;
        }
        let reach = |from: usize, rev: bool| {
            let mut seen = vec![false; k];
            let mut q = VecDeque::from([from]);
            seen[from] = true;
            while let Some(i) = q.pop_front() {
                for j in 0..k {
                    let e = if rev { self.transition_matrix[j][i] } else { self.transition_matrix[i][j] };
                    if e == 1 && !seen[j] {
                        seen[j] = true;
                        q.push_back(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(0, false) && reach(0, true)
    }

    /// Shortest `u` with `left + u + right` admissible (breadth-first over states).
    pub fn connecting_word(&self, left: &str, right: &str) -> Option<String> {
        if !self.is_admissible(left) || !self.is_admissible(right) {
            return None;
        }
        let fits = |s: &str| self.is_admissible(&format!("{s}{right}"));
        let tail = |s: &str| s[s.len().saturating_sub(self.block)..].to_string();
        let start = tail(left);
        if fits(&start) {
            return Some(String::new());
        }
        let mut q = VecDeque::from([(start.clone(), String::new())]);
        let mut seen = HashSet::from([start]);
        while let Some((st, path)) = q.pop_front() {
            for s in 0..self.alphabet_size {
                let ext = format!("{st}{}", symbol(s));
                if !self.is_admissible(&ext) {
                    continue;
                }
                let p = format!("{path}{}", symbol(s));
                if fits(&ext) {
                    return Some(p);
                }
                let nt = tail(&ext);
                if seen.insert(nt.clone()) {
                    q.push_back((nt, p));
                }
            }
        }
        None
    }
}

/// A finite window of a bi-infinite sequence: `tail . head`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiSequence {
    pub tail: String,
    pub head: String,
}

impl BiSequence {
    pub fn full(&self) -> String {
        format!("{}{}", self.tail, self.head)
    }
}

impl fmt::Display for BiSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "…{}.{}…", self.tail, self.head)
    }
}

/// Backward extension of `x` whose tail contains every admissible word of
/// length `depth_words` (hence every shorter one) as a factor.
///
/// The tail grows greedily: from its current end, a breadth-first search over
/// the last `depth_words - 1` symbols finds the shortest extension ending in a
/// word not yet covered. The tail is finally joined to `x` by a shortest
/// connecting word.
pub fn backward_dense_tail(sft: &SftDescriptor, x: &str, depth_words: usize) -> Result<BiSequence> {
    if !sft.is_admissible(x) {
        return Err(Error::Inadmissible(x.to_string()));
    }
    if !sft.is_irreducible() {
        return Err(Error::Reducible);
    }
    let words = sft.admissible_words(depth_words.max(1));
    let mut tail = covering_word(sft, &words).ok_or(Error::Reducible)?;
    let u = sft.connecting_word(&tail, x).ok_or(Error::Reducible)?;
    tail.push_str(&u);
    Ok(BiSequence { tail, head: x.to_string() })
}

/// Admissible word containing every word of `words` as a factor, grown
/// greedily by shortest extensions. `None` if some word is unreachable.
pub fn covering_word(sft: &SftDescriptor, words: &[String]) -> Option<String> {
    let mut missing: HashSet<&str> = words.iter().map(String::as_str).collect();
    let mut lens: Vec<usize> = missing.iter().map(|w| w.len()).collect();
    lens.sort_unstable();
    lens.dedup();
    let longest = lens.last().copied().unwrap_or(1);
    let first = words.first()?;
    let mut tail = first.clone();
    let drop_suffixes = |t: &str, missing: &mut HashSet<&str>| {
        for &l in &lens {
            if t.len() >= l {
                missing.remove(&t[t.len() - l..]);
            }
        }
    };
    for k in 1..=tail.len() {
        drop_suffixes(&tail[..k], &mut missing);
    }
    let keep = (longest - 1).max(sft.block);
    let cut = |s: &str| s[s.len().saturating_sub(keep)..].to_string();
    while !missing.is_empty() {
        // Breadth-first search for the shortest extension ending in a missing word.
        let start = cut(&tail);
        let mut seen = HashSet::from([start.clone()]);
        let mut q = VecDeque::from([(start, String::new())]);
        let mut found = None;
        'bfs: while let Some((st, path)) = q.pop_front() {
            for s in 0..sft.alphabet_size {
                let ext = format!("{st}{}", symbol(s));
                if !sft.is_admissible(&ext) {
                    continue;
                }
                let p = format!("{path}{}", symbol(s));
                if lens.iter().any(|&l| ext.len() >= l && missing.contains(&ext[ext.len() - l..])) {
                    found = Some(p);
                    break 'bfs;
                }
                let nt = cut(&ext);
                if seen.insert(nt.clone()) {
                    q.push_back((nt, p));
                }
            }
        }
        for ch in found?.chars() {
            tail.push(ch);
            drop_suffixes(&tail, &mut missing);
        }
    }
    Some(tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fib(n: usize) -> u128 {
        let (mut a, mut b) = (1u128, 2u128);
        for _ in 1..n {
            (a, b) = (b, a + b);
        }
        b
    }

    #[test]
    fn golden_mean_counts() {
        let g = SftDescriptor::golden_mean();
        assert_eq!(g.admissible_words(3), vec!["010", "011", "101", "110", "111"]);
        assert_eq!(g.transition_matrix, vec![vec![0, 1], vec![1, 1]]);
        for n in 1..15 {
            assert_eq!(g.count_words(n), g.admissible_words(n).len() as u128);
            assert_eq!(g.count_words(n), fib(n));
        }
        assert_eq!(g.count_words(6), 21);
    }

    #[test]
    fn full_shift_matrix() {
        let f = SftDescriptor::full(3);
        assert!(f.transition_matrix.iter().flatten().all(|&e| e == 1));
        assert_eq!(f.count_words(4), 81);
    }

    #[test]
    fn reducible_rejected() {
        let r = SftDescriptor::new(2, &["01", "10"]);
        assert!(!r.is_irreducible());
        assert_eq!(backward_dense_tail(&r, "00", 3), Err(Error::Reducible));
    }

    #[test]
    fn longer_forbidden_words_use_blocks() {
        let s = SftDescriptor::new(2, &["000", "11"]);
        assert_eq!(s.block, 2);
        for n in 2..10 {
            assert_eq!(s.count_words(n), s.admissible_words(n).len() as u128);
        }
        assert!(s.is_irreducible());
        let t = backward_dense_tail(&s, "01", 4).unwrap();
        assert!(s.is_admissible(&t.full()));
    }

    #[test]
    fn dense_tail_golden_mean() {
        let g = SftDescriptor::golden_mean();
        let t = backward_dense_tail(&g, "111", 3).unwrap();
        for w in ["010", "011", "101", "110", "111"] {
            assert!(t.tail.contains(w));
        }
        let t = backward_dense_tail(&g, "101", 3).unwrap();
        assert!(g.is_admissible(&t.full()));
        let one = SftDescriptor::full(1);
        assert!(backward_dense_tail(&one, "0", 4).unwrap().tail.chars().all(|c| c == '0'));
        assert!(backward_dense_tail(&g, "1001", 3).is_err());
    }

    #[test]
    fn greedy_tail_is_short() {
        // Close to the de Bruijn bound: one new word per symbol most of the time.
        let g = SftDescriptor::golden_mean();
        let t = backward_dense_tail(&g, "1", 8).unwrap();
        assert!(t.tail.len() < 2 * g.count_words(8) as usize + 8, "{}", t.tail.len());
    }

    proptest! {
        #[test]
        fn tails_are_admissible_and_complete(x in "[01]{1,8}", d in 1usize..7) {
            let g = SftDescriptor::golden_mean();
            prop_assume!(g.is_admissible(&x));
            let t = backward_dense_tail(&g, &x, d).unwrap();
            prop_assert!(g.is_admissible(&t.full()));
            for w in g.admissible_words(d) {
                prop_assert!(t.tail.contains(&w));
            }
        }
    }
}
