//! Finite unions of intervals with exact open/closed endpoint bookkeeping.
//!
//! Internally every endpoint becomes a key `(v, s)` with `s` in {-1, 0, 1},
//! meaning "just below v", "at v", "just above v". A piece is then a closed
//! range of keys, and union, intersection and difference reduce to merging
//! sorted key ranges. `[x,p) ∪ (p,y]` stays two pieces because the keys
//! `(p,-1)` and `(p,1)` are not adjacent.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Piece {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Piece { lo, hi, lo_closed: true, hi_closed: true }
    }
    pub fn open(lo: f64, hi: f64) -> Self {
        Piece { lo, hi, lo_closed: false, hi_closed: false }
    }
    pub fn point(x: f64) -> Self {
        Self::closed(x, x)
    }
    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Self {
        Piece { lo, hi, lo_closed, hi_closed }
    }
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
    pub fn contains(&self, x: f64) -> bool {
        (x > self.lo || (self.lo_closed && x == self.lo)) && (x < self.hi || (self.hi_closed && x == self.hi))
    }
    fn keys(&self) -> (Key, Key) {
        (Key(self.lo, if self.lo_closed { 0 } else { 1 }), Key(self.hi, if self.hi_closed { 0 } else { -1 }))
    }
    fn from_keys(lo: Key, hi: Key) -> Self {
        // An upper key "just above v" cannot occur for finite pieces built here,
        // but normalise defensively.
        Piece { lo: lo.0, hi: hi.0, lo_closed: lo.1 <= 0, hi_closed: hi.1 >= 0 }
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() && self.lo_closed && self.hi_closed {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64, i8);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0).then(self.1.cmp(&o.1))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Key {
    fn succ(self) -> Key {
        match self.1 {
            -1 => Key(self.0, 0),
            0 => Key(self.0, 1),
            _ => Key(self.0, 2), // never equal to a real key
        }
    }
    fn pred(self) -> Key {
        match self.1 {
            1 => Key(self.0, 0),
            0 => Key(self.0, -1),
            _ => Key(self.0, -2),
        }
    }
}

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }
    /// Smallest interval containing both points.
    pub fn hull(x: f64, y: f64) -> Self {
        Interval { lo: x.min(y), hi: x.max(y) }
    }
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
    pub fn contains_tol(&self, x: f64, tol: f64) -> bool {
        self.lo - tol <= x && x <= self.hi + tol
    }
    pub fn interior_contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
    pub fn subset_tol(&self, other: &Interval, tol: f64) -> bool {
        self.lo >= other.lo - tol && self.hi <= other.hi + tol
    }
    /// Overlap of the interiors, shrunk by `tol` so touching intervals do not count.
    pub fn interiors_overlap(&self, other: &Interval, tol: f64) -> bool {
        self.lo.max(other.lo) < self.hi.min(other.hi) - tol
    }
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
    pub fn to_set(&self) -> IntervalSet {
        IntervalSet::closed(self.lo, self.hi)
    }
    pub fn interior_set(&self) -> IntervalSet {
        IntervalSet::from_pieces(vec![Piece::open(self.lo, self.hi)])
    }
}

/// Sorted, disjoint, non-adjacent pieces.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalSet {
    pieces: Vec<Piece>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { pieces: vec![] }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::from_pieces(vec![Piece::closed(lo.min(hi), lo.max(hi))])
    }

    pub fn point(x: f64) -> Self {
        Self::from_pieces(vec![Piece::point(x)])
    }

    pub fn points<I: IntoIterator<Item = f64>>(xs: I) -> Self {
        Self::from_pieces(xs.into_iter().map(Piece::point).collect())
    }

    /// Normalises arbitrary pieces; empty ones are dropped.
    pub fn from_pieces(pieces: Vec<Piece>) -> Self {
        let ranges: Vec<(Key, Key)> = pieces.iter().map(Piece::keys).collect();
        Self::from_ranges(ranges)
    }

    fn from_ranges(mut ranges: Vec<(Key, Key)>) -> Self {
        ranges.retain(|(lo, hi)| lo <= hi);
        ranges.sort();
        let mut out: Vec<(Key, Key)> = Vec::with_capacity(ranges.len());
        for (lo, hi) in ranges {
            if let Some(last) = out.last_mut() {
                if lo <= last.1.succ() {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                    continue;
                }
            }
            out.push((lo, hi));
        }
        IntervalSet { pieces: out.into_iter().map(|(l, h)| Piece::from_keys(l, h)).collect() }
    }

    fn ranges(&self) -> Vec<(Key, Key)> {
        self.pieces.iter().map(Piece::keys).collect()
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut r = self.ranges();
        r.extend(other.ranges());
        Self::from_ranges(r)
    }

    pub fn union_all<'a, I: IntoIterator<Item = &'a IntervalSet>>(sets: I) -> IntervalSet {
        let r: Vec<(Key, Key)> = sets.into_iter().flat_map(|s| s.ranges()).collect();
        Self::from_ranges(r)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (self.ranges(), other.ranges());
        let (mut i, mut j) = (0, 0);
        let mut out = vec![];
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_ranges(out)
    }

    /// Complement in the whole real line.
    fn complement_ranges(&self) -> Vec<(Key, Key)> {
        let mut out = vec![];
        let mut start = Key(f64::NEG_INFINITY, 0);
        for (lo, hi) in self.ranges() {
            out.push((start, lo.pred()));
            start = hi.succ();
        }
        out.push((start, Key(f64::INFINITY, 0)));
        out
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let c = other.complement_ranges();
        let a = self.ranges();
        let (mut i, mut j) = (0, 0);
        let mut out = vec![];
        while i < a.len() && j < c.len() {
            let lo = a[i].0.max(c[j].0);
            let hi = a[i].1.min(c[j].1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a[i].1 < c[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_ranges(out)
    }

    pub fn contains(&self, x: f64) -> bool {
        // Pieces are sorted: binary search on the lower endpoint.
        let idx = self.pieces.partition_point(|p| p.lo <= x);
        idx > 0 && self.pieces[idx - 1].contains(x)
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Total length (Lebesgue measure).
    pub fn measure(&self) -> f64 {
        self.pieces.iter().map(Piece::len).sum()
    }

    pub fn is_closed(&self) -> bool {
        self.pieces.iter().all(|p| p.lo_closed && p.hi_closed)
    }

    pub fn closure(&self) -> IntervalSet {
        Self::from_pieces(self.pieces.iter().map(|p| Piece::closed(p.lo, p.hi)).collect())
    }

    pub fn min(&self) -> Option<f64> {
        self.pieces.first().map(|p| p.lo)
    }

    pub fn max(&self) -> Option<f64> {
        self.pieces.last().map(|p| p.hi)
    }

    /// Distance from `x` to the closure of the set.
    pub fn distance(&self, x: f64) -> f64 {
        if self.pieces.is_empty() {
            return f64::INFINITY;
        }
        let idx = self.pieces.partition_point(|p| p.lo <= x);
        let mut d = f64::INFINITY;
        if idx > 0 {
            let p = &self.pieces[idx - 1];
            d = if x <= p.hi { 0.0 } else { x - p.hi };
        }
        if idx < self.pieces.len() {
            d = d.min(self.pieces[idx].lo - x);
        }
        d
    }

    /// One-sided Hausdorff distance `sup_{x in self} dist(x, other)` over closures.
    pub fn directed_hausdorff(&self, other: &IntervalSet) -> f64 {
        if self.pieces.is_empty() {
            return 0.0;
        }
        if other.pieces.is_empty() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for p in &self.pieces {
            worst = worst.max(other.distance(p.lo)).max(other.distance(p.hi));
        }
        // Inside a piece of `self` the distance peaks at midpoints of gaps of `other`.
        for g in other.pieces.windows(2) {
            let mid = 0.5 * (g[0].hi + g[1].lo);
            if self.closure().contains(mid) {
                worst = worst.max(0.5 * (g[1].lo - g[0].hi));
            }
        }
        worst
    }

    pub fn hausdorff(&self, other: &IntervalSet) -> f64 {
        self.directed_hausdorff(other).max(other.directed_hausdorff(self))
    }

    /// Hausdorff distance between a point cloud and this set.
    pub fn hausdorff_points(&self, pts: &[f64]) -> f64 {
        let cloud = IntervalSet::points(pts.iter().copied());
        self.hausdorff(&cloud)
    }

    /// Expands every piece to a closed interval widened by `r` on both sides.
    pub fn inflate(&self, r: f64) -> IntervalSet {
        Self::from_pieces(self.pieces.iter().map(|p| Piece::closed(p.lo - r, p.hi + r)).collect())
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "∅");
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn open_gaps_are_not_merged() {
        let s = IntervalSet::from_pieces(vec![
            Piece::new(0.0, true, 0.5, false),
            Piece::new(0.5, false, 1.0, true),
        ]);
        assert_eq!(s.len(), 2);
        assert!(!s.contains(0.5));
        let t = IntervalSet::from_pieces(vec![
            Piece::new(0.0, true, 0.5, false),
            Piece::new(0.5, true, 1.0, true),
        ]);
        assert_eq!(t.len(), 1);
        assert!(t.contains(0.5));
    }

    #[test]
    fn difference_punches_points() {
        let s = IntervalSet::closed(0.2, 0.8).difference(&IntervalSet::points([0.3, 0.6]));
        assert_eq!(s.len(), 3);
        assert_eq!(s.pieces()[0], Piece::new(0.2, true, 0.3, false));
        assert_eq!(s.pieces()[1], Piece::open(0.3, 0.6));
        assert_eq!(s.pieces()[2], Piece::new(0.6, false, 0.8, true));
        assert!((s.measure() - 0.6).abs() < 1e-15);
        assert!(!s.is_closed());
    }

    #[test]
    fn difference_of_interval_leaves_closed_ends() {
        let s = IntervalSet::closed(0.0, 1.0).difference(&IntervalSet::from_pieces(vec![Piece::open(0.25, 0.5)]));
        assert_eq!(s.pieces(), &[Piece::closed(0.0, 0.25), Piece::closed(0.5, 1.0)]);
        let s = IntervalSet::closed(0.0, 1.0).difference(&IntervalSet::closed(0.25, 0.5));
        assert_eq!(s.pieces()[0], Piece::new(0.0, true, 0.25, false));
    }

    #[test]
    fn closedness_examples() {
        assert!(IntervalSet::point(0.0).is_closed());
        assert!(!IntervalSet::from_pieces(vec![Piece::new(0.512, true, 0.513, false)]).is_closed());
        assert!(IntervalSet::empty().is_closed());
    }

    #[test]
    fn hausdorff_examples() {
        let a = IntervalSet::closed(0.0, 1.0);
        let b = IntervalSet::points([0.0, 1.0]);
        assert!((a.hausdorff(&b) - 0.5).abs() < 1e-15);
        assert_eq!(b.directed_hausdorff(&a), 0.0);
        assert!((IntervalSet::point(0.2).hausdorff(&IntervalSet::point(0.5)) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn contains_respects_flags() {
        let s = IntervalSet::from_pieces(vec![Piece::new(0.0, false, 1.0, true), Piece::point(2.0)]);
        assert!(!s.contains(0.0));
        assert!(s.contains(1.0));
        assert!(s.contains(2.0));
        assert!(!s.contains(1.5));
    }

    fn arb_set() -> impl Strategy<Value = IntervalSet> {
        prop::collection::vec((0.0f64..1.0, 0.0f64..0.3, any::<bool>(), any::<bool>()), 0..6).prop_map(|v| {
            IntervalSet::from_pieces(
                v.into_iter().map(|(lo, w, lc, hc)| Piece::new(lo, lc, lo + w, hc)).collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn set_algebra(a in arb_set(), b in arb_set(), x in -0.1f64..1.4) {
            prop_assert_eq!(a.union(&b).contains(x), a.contains(x) || b.contains(x));
            prop_assert_eq!(a.intersection(&b).contains(x), a.contains(x) && b.contains(x));
            prop_assert_eq!(a.difference(&b).contains(x), a.contains(x) && !b.contains(x));
        }

        #[test]
        fn endpoints_decided_exactly(a in arb_set(), b in arb_set()) {
            for p in a.pieces().iter().chain(b.pieces()) {
                for x in [p.lo, p.hi] {
                    prop_assert_eq!(a.difference(&b).contains(x), a.contains(x) && !b.contains(x));
                    prop_assert_eq!(a.union(&b).contains(x), a.contains(x) || b.contains(x));
                }
            }
        }

        #[test]
        fn disjoint_split_preserves_measure(a in arb_set(), b in arb_set()) {
            let m = a.difference(&b).measure() + a.intersection(&b).measure();
            prop_assert!((m - a.measure()).abs() < 1e-12);
        }

        #[test]
        fn normal_form_is_sorted_and_separated(a in arb_set()) {
            for w in a.pieces().windows(2) {
                prop_assert!(w[0].hi < w[1].lo || (w[0].hi == w[1].lo && !w[0].hi_closed && !w[1].lo_closed));
            }
        }
    }
}
