//! Monte-Carlo backward trajectories and empirical backward limit sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::interval_set::{Interval, IntervalSet, Piece};
use crate::map::UnimodalMap;

/// Depth cap for exhaustive enumeration of the preimage tree.
pub const EXHAUSTIVE_MAX_DEPTH: usize = 24;

/// Default clustering radius for limit-set estimates.
pub const TOL_CLUSTER: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    UniformBranch,
    ExhaustiveTree,
}

/// Backward trails of `base`: `trails[t][i]` is the `(i+1)`-th preimage along
/// trail `t`. Trails that could not take a single step are dropped and counted
/// in `empty`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackwardSample {
    pub base: f64,
    pub strategy: Strategy,
    pub trails: Vec<Vec<f64>>,
    pub empty: usize,
}

/// Preimages that themselves have preimages, falling back to all of them.
fn available(m: &UnimodalMap, y: f64) -> Vec<f64> {
    let all = m.preimages(y);
    let c1 = m.critical_value();
    let ok: Vec<f64> = all.iter().copied().filter(|&z| z <= c1).collect();
    if ok.is_empty() {
        all
    } else {
        ok
    }
}

/// Random backward trails, one preimage drawn uniformly at each step among
/// those that can be continued. Trail `t` uses its own ChaCha stream, so the
/// output depends only on `seed`, not on the thread count.
pub fn sample_backward(m: &UnimodalMap, x: f64, depth: usize, trails: usize, seed: u64) -> BackwardSample {
    let runs: Vec<Vec<f64>> = (0..trails)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let mut out = Vec::with_capacity(depth);
            let mut y = x;
            for _ in 0..depth {
                let pre = available(m, y);
                if pre.is_empty() {
                    break;
                }
                y = pre[rng.gen_range(0..pre.len())];
                out.push(y);
            }
            out
        })
        .collect();
    let empty = runs.iter().filter(|r| r.is_empty()).count();
    BackwardSample {
        base: x,
        strategy: Strategy::UniformBranch,
        trails: runs.into_iter().filter(|r| !r.is_empty()).collect(),
        empty,
    }
}

/// Every continuable branch of the preimage tree up to
/// `min(depth, EXHAUSTIVE_MAX_DEPTH)`, stopping after `max_trails` leaves.
pub fn sample_exhaustive(m: &UnimodalMap, x: f64, depth: usize, max_trails: usize) -> BackwardSample {
    let depth = depth.min(EXHAUSTIVE_MAX_DEPTH);
    let mut trails = Vec::new();
    let mut stack = vec![Vec::new()];
    while let Some(path) = stack.pop() {
        if trails.len() >= max_trails {
            break;
        }
        let y = path.last().copied().unwrap_or(x);
        let pre = if path.len() < depth { available(m, y) } else { Vec::new() };
        if pre.is_empty() {
            if !path.is_empty() {
                trails.push(path);
            }
            continue;
        }
        for z in pre.into_iter().rev() {
            let mut p = path.clone();
            p.push(z);
            stack.push(p);
        }
    }
    let empty = usize::from(trails.is_empty());
    BackwardSample { base: x, strategy: Strategy::ExhaustiveTree, trails, empty }
}

/// Clusters of deep trail points: the empirical union of backward limit sets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub clusters: Vec<Interval>,
}

impl AlphaEstimate {
    pub fn representatives(&self) -> Vec<f64> {
        self.clusters.iter().map(Interval::mid).collect()
    }

    pub fn set(&self) -> IntervalSet {
        IntervalSet::from_pieces(self.clusters.iter().map(|i| Piece::closed(i.lo, i.hi)).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

/// Deepest `tail_frac` of every trail, clustered with radius `TOL_CLUSTER`.
pub fn alpha_limit_estimate(sample: &BackwardSample, tail_frac: f64) -> AlphaEstimate {
    alpha_limit_estimate_tol(sample, tail_frac, TOL_CLUSTER)
}

pub fn alpha_limit_estimate_tol(sample: &BackwardSample, tail_frac: f64, tol: f64) -> AlphaEstimate {
    let frac = tail_frac.clamp(f64::MIN_POSITIVE, 1.0);
    let mut pts: Vec<f64> = sample
        .trails
        .iter()
        .flat_map(|t| {
            let keep = ((t.len() as f64 * frac).ceil() as usize).clamp(1, t.len());
            t[t.len() - keep..].iter().copied()
        })
        .collect();
    pts.sort_by(f64::total_cmp);
    let mut clusters: Vec<Interval> = Vec::new();
    for p in pts {
        match clusters.last_mut() {
            Some(c) if p - c.hi <= tol => c.hi = p,
            _ => clusters.push(Interval::new(p, p)),
        }
    }
    AlphaEstimate { clusters }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(mu: f64) -> UnimodalMap {
        UnimodalMap::logistic(mu).unwrap()
    }

    #[test]
    fn trails_are_genuine_preimages() {
        let m = m(3.84);
        let s = sample_backward(&m, 0.3, 300, 20, 1);
        for t in &s.trails {
            let mut y = s.base;
            for &z in t {
                assert!((m.eval(z) - y).abs() < 1e-11);
                y = z;
            }
        }
    }

    #[test]
    fn unique_backward_orbit_to_zero() {
        let m = m(3.2);
        for seed in [0, 7, 99] {
            let s = sample_backward(&m, 0.3, 200, 10, seed);
            assert_eq!(s.trails.len(), 10);
            for t in &s.trails {
                assert_eq!(t, &s.trails[0]);
                assert!(t.windows(2).all(|w| w[1] < w[0]));
                assert!(*t.last().unwrap() < 1e-12);
            }
            let a = alpha_limit_estimate(&s, 0.5);
            assert_eq!(a.clusters.len(), 1);
            assert!(a.representatives()[0].abs() < 1e-4);
        }
    }

    #[test]
    fn no_preimage_no_trails() {
        let s = sample_backward(&m(3.2), 0.9, 50, 30, 3);
        assert!(s.trails.is_empty());
        assert_eq!(s.empty, 30);
        assert!(alpha_limit_estimate(&s, 0.2).is_empty());
    }

    #[test]
    fn backward_limits_at_3_2() {
        let s = sample_backward(&m(3.2), 0.6, 500, 200, 7);
        let a = alpha_limit_estimate(&s, 0.2);
        let r = a.representatives();
        assert!(r.iter().all(|x| x.abs() < 1e-4 || (x - 0.6875).abs() < 1e-4), "{r:?}");
        assert!(r.iter().any(|x| x.abs() < 1e-4));
        // Only the all-right-branch bitrajectory tends to the fixed point, a
        // null event for uniform sampling; the exhaustive tree does find it.
        let e = sample_exhaustive(&m(3.2), 0.6, 24, usize::MAX);
        assert!(e.trails.iter().any(|t| (t.last().unwrap() - 0.6875).abs() < 1e-2));
    }

    #[test]
    fn reproducible_per_seed() {
        let m = m(3.7);
        let a = sample_backward(&m, 0.5, 100, 16, 42);
        let b = sample_backward(&m, 0.5, 100, 16, 42);
        let c = sample_backward(&m, 0.5, 100, 16, 43);
        assert_eq!(a.trails, b.trails);
        assert_ne!(a.trails, c.trails);
    }

    #[test]
    fn exhaustive_tree_enumerates_branches() {
        let m = m(3.9);
        let s = sample_exhaustive(&m, 0.5, 6, usize::MAX);
        assert_eq!(s.strategy, Strategy::ExhaustiveTree);
        assert!(s.trails.len() > 1 && s.trails.len() <= 64);
        let mut firsts: Vec<Vec<u64>> = s.trails.iter().map(|t| t.iter().map(|x| x.to_bits()).collect()).collect();
        firsts.sort();
        firsts.dedup();
        assert_eq!(firsts.len(), s.trails.len());
        assert!(sample_exhaustive(&m, 0.5, 100, 10).trails.len() <= 10);
        assert!(sample_exhaustive(&m, 0.5, 100, 1).trails[0].len() <= EXHAUSTIVE_MAX_DEPTH);
    }

    #[test]
    fn more_trails_never_shrink_coverage() {
        let m = m(3.84);
        let small = alpha_limit_estimate(&sample_backward(&m, 0.5, 300, 20, 5), 0.3).set();
        let big = alpha_limit_estimate(&sample_backward(&m, 0.5, 300, 80, 5), 0.3).set();
        assert!(small.directed_hausdorff(&big) <= TOL_CLUSTER);
    }
}
