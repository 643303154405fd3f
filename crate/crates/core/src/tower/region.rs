//! Trapping regions: construction from a boundary cycle and validation.

use serde::{Deserialize, Serialize};

use crate::interval_set::{Interval, IntervalSet};
use crate::map::{Branch, UnimodalMap};
use crate::orbit::{closest_periodic_point, Cycle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Flip,
    Regular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrappingRegion {
    /// `J_1, ..., J_r`; `J_1` contains the critical point.
    pub intervals: Vec<Interval>,
    pub period: usize,
    pub kind: RegionKind,
    pub gamma: Cycle,
    pub cyclic: bool,
}

impl TrappingRegion {
    pub fn j1(&self) -> Interval {
        self.intervals[0]
    }

    /// Union of the interval interiors.
    pub fn interior(&self) -> IntervalSet {
        IntervalSet::union_all(self.intervals.iter().map(|j| j.interior_set()).collect::<Vec<_>>().iter())
    }

    pub fn closure(&self) -> IntervalSet {
        IntervalSet::union_all(self.intervals.iter().map(|j| j.to_set()).collect::<Vec<_>>().iter())
    }

    /// The whole domain as the period-1 region of the fixed endpoint.
    pub fn whole(m: &UnimodalMap, gamma: Cycle) -> Self {
        TrappingRegion {
            intervals: vec![Interval::new(m.a, m.b)],
            period: 1,
            kind: RegionKind::Regular,
            gamma,
            cyclic: true,
        }
    }
}

/// Image of a closed interval.
pub fn image(m: &UnimodalMap, j: Interval) -> Interval {
    let (u, v) = (m.eval(j.lo), m.eval(j.hi));
    if j.contains(m.c) {
        Interval::new(u.min(v), m.critical_value())
    } else {
        Interval::hull(u, v)
    }
}

/// Component of `f^{-1}(k)` containing `y` (which must satisfy `f(y) ∈ k`, up to `tol`).
pub fn preimage_component(m: &UnimodalMap, k: Interval, y: f64, tol: f64) -> Option<Interval> {
    let c1 = m.critical_value();
    if k.lo > c1 + tol {
        return None;
    }
    if k.hi >= c1 - tol {
        // The two branch preimages join through c.
        return Some(Interval::new(m.inverse(k.lo, Branch::Left), m.inverse(k.lo, Branch::Right)));
    }
    Some(if y <= m.c {
        Interval::new(m.inverse(k.lo, Branch::Left), m.inverse(k.hi, Branch::Left))
    } else {
        Interval::new(m.inverse(k.hi, Branch::Right), m.inverse(k.lo, Branch::Right))
    })
}

/// Component of `f^{-steps}(k)` containing `y`, or `None` when `f^steps(y) ∉ k`.
pub fn pullback(m: &UnimodalMap, k: Interval, y: f64, steps: usize, tol: f64) -> Option<Interval> {
    let mut orbit = Vec::with_capacity(steps + 1);
    let mut z = y;
    for _ in 0..=steps {
        orbit.push(z);
        z = m.eval(z);
    }
    if !k.contains_tol(orbit[steps], tol) {
        return None;
    }
    let mut cur = k;
    for i in (0..steps).rev() {
        cur = preimage_component(m, cur, orbit[i], tol)?;
        if !cur.contains_tol(orbit[i], tol) {
            return None;
        }
    }
    Some(cur)
}

/// Builds the candidate region bounded by `gamma`: `J_1 = hull(p_1, p̂_1)` and
/// `J_i` the pullback of `J_1` through `c_{i-1}`. Returns `None` if a pullback fails.
pub fn build_region(m: &UnimodalMap, gamma: &Cycle, period: usize, tol: f64) -> Option<TrappingRegion> {
    let p1 = closest_periodic_point(gamma, m);
    if (p1 - m.c).abs() <= tol {
        return None;
    }
    let j1 = Interval::hull(p1, m.hat(p1));
    let mut intervals = vec![j1];
    let crit = m.critical_orbit(period.max(1));
    for i in 2..=period {
        intervals.push(pullback(m, j1, crit.get(i - 1), period + 1 - i, tol)?);
    }
    // Pulled-back endpoints land on gamma up to rounding; put them there exactly.
    for j in &mut intervals {
        for &g in &gamma.points {
            if (j.lo - g).abs() <= tol {
                j.lo = g;
            }
            if (j.hi - g).abs() <= tol {
                j.hi = g;
            }
        }
    }
    let kind = if period == 2 * gamma.period { RegionKind::Flip } else { RegionKind::Regular };
    let mut r = TrappingRegion { intervals, period, kind, gamma: gamma.clone(), cyclic: false };
    r.cyclic = is_cyclic(m, &r, tol.max(1e-7));
    Some(r)
}

/// `f(∂J_i) ⊂ ∂J_{i+1}` within `tol`.
pub fn is_cyclic(m: &UnimodalMap, r: &TrappingRegion, tol: f64) -> bool {
    let n = r.intervals.len();
    (0..n).all(|i| {
        let next = r.intervals[(i + 1) % n];
        let j = r.intervals[i];
        [j.lo, j.hi].iter().all(|&e| {
            let y = m.eval(e);
            (y - next.lo).abs() <= tol || (y - next.hi).abs() <= tol
        })
    })
}

/// Why a candidate region fails, if it does.
pub fn validate(m: &UnimodalMap, r: &TrappingRegion, tol: f64) -> Result<(), String> {
    let js = &r.intervals;
    if !js[0].interior_contains(m.c) {
        return Err("c not interior to J_1".into());
    }
    for (i, j) in js.iter().enumerate().skip(1) {
        if j.contains_tol(m.c, -tol) {
            return Err(format!("c lies in J_{}", i + 1));
        }
    }
    for i in 0..js.len() {
        let img = image(m, js[i]);
        let next = js[(i + 1) % js.len()];
        if !img.subset_tol(&next, tol) {
            return Err(format!("f(J_{}) not inside J_{}", i + 1, (i + 1) % js.len() + 1));
        }
        for j in (i + 1)..js.len() {
            if js[i].interiors_overlap(&js[j], tol) {
                return Err(format!("J_{} and J_{} overlap", i + 1, j + 1));
            }
        }
    }
    let shares = (0..js.len()).any(|i| {
        ((i + 1)..js.len()).any(|j| {
            (js[i].hi - js[j].lo).abs() <= tol || (js[j].hi - js[i].lo).abs() <= tol
        })
    });
    if shares != (r.kind == RegionKind::Flip) {
        return Err("flip/shared-endpoint mismatch".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Settings;
    use crate::orbit::{find_cycles, find_fixed_points};

    #[test]
    fn flip_region_at_3_2() {
        let m = UnimodalMap::logistic(3.2).unwrap();
        let cfg = Settings::default();
        let xbar = find_fixed_points(&m, &cfg).pop().unwrap();
        let r = build_region(&m, &xbar, 2, 1e-9).unwrap();
        assert_eq!(r.kind, RegionKind::Flip);
        assert!(validate(&m, &r, 1e-9).is_ok());
        assert!(r.cyclic);
        assert!((r.intervals[0].lo - 0.3125).abs() < 1e-12);
        assert!((r.intervals[0].hi - 0.6875).abs() < 1e-12);
        let q2 = (1.0 + (1.0 - 4.0 * 0.3125 / 3.2f64).sqrt()) / 2.0;
        assert!((r.intervals[1].hi - q2).abs() < 1e-12);
        assert!((m.eval(q2) - 0.3125).abs() < 1e-12);
        assert!((q2 - 0.890312).abs() < 1e-6);
    }

    #[test]
    fn flip_region_fails_past_crisis() {
        let m = UnimodalMap::logistic(3.7).unwrap();
        let cfg = Settings::default();
        let xbar = find_fixed_points(&m, &cfg).pop().unwrap();
        let ok = build_region(&m, &xbar, 2, 1e-9).map(|r| validate(&m, &r, 1e-9).is_ok());
        assert_ne!(ok, Some(true));
    }

    #[test]
    fn period_three_region() {
        let m = UnimodalMap::logistic(3.84).unwrap();
        let cfg = Settings::default();
        let rep = find_cycles(&m, 3, &cfg).unwrap().into_iter().find(|c| c.is_repelling()).unwrap();
        let r = build_region(&m, &rep, 3, 1e-9).unwrap();
        assert_eq!(r.kind, RegionKind::Regular);
        validate(&m, &r, 1e-9).unwrap();
        assert!(r.cyclic);
        // J_2 = [p_2, q_2] sits to the right, J_3 = [q_3, p_3] to the left.
        assert!(r.intervals[1].lo > r.intervals[0].hi);
        assert!(r.intervals[2].hi < r.intervals[0].lo);
    }

    #[test]
    fn pullback_requires_landing() {
        let m = UnimodalMap::logistic(3.2).unwrap();
        assert!(pullback(&m, Interval::new(0.9, 0.95), 0.3, 1, 1e-9).is_none());
        let k = pullback(&m, Interval::new(0.6, 0.7), 0.25, 1, 1e-9).unwrap();
        assert!(k.contains(0.25));
        assert!((m.eval(k.lo) - 0.6).abs() < 1e-12 && (m.eval(k.hi) - 0.7).abs() < 1e-12);
    }
}
