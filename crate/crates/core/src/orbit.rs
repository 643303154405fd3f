//! Periodic orbits: detection by sign-change scan, Newton refinement,
//! deduplication and stability classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Settings;
use crate::error::{Error, Result};
use crate::map::UnimodalMap;
use crate::roots;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Attracting,
    Repelling,
    Neutral,
    OneSided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    /// Orbit points in ascending order.
    pub points: Vec<f64>,
    /// Orbit points in dynamical order, starting at `points[0]`.
    pub orbit: Vec<f64>,
    pub period: usize,
    pub multiplier: f64,
    pub stability: Stability,
}

impl Cycle {
    /// Builds the cycle through `x`, refining each orbit point by Newton steps on `f^period(y) - y`.
    pub fn from_point(m: &UnimodalMap, x: f64, period: usize, cfg: &Settings) -> Cycle {
        let mut orbit = Vec::with_capacity(period);
        let mut y = x;
        for _ in 0..period {
            orbit.push(y);
            y = m.eval(y);
        }
        let multiplier = orbit.iter().map(|&p| m.deriv(p)).product::<f64>();
        if (multiplier - 1.0).abs() > 1e-3 {
            for p in orbit.iter_mut() {
                for _ in 0..3 {
                    let r = m.iter_n(*p, period) - *p;
                    if r.abs() <= cfg.tol_root * 0.01 {
                        break;
                    }
                    let d = m.deriv_n(*p, period) - 1.0;
                    let step = r / d;
                    if step.is_finite() && step.abs() < 1e-6 {
                        *p = (*p - step).clamp(m.a, m.b);
                    }
                }
            }
        }
        let start = orbit
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        orbit.rotate_left(start);
        let mut points = orbit.clone();
        points.sort_by(f64::total_cmp);
        let stability = classify(multiplier, cfg.tol_stab);
        Cycle { points, orbit, period, multiplier, stability }
    }

    pub fn contains_point(&self, x: f64, tol: f64) -> bool {
        self.points.iter().any(|p| (p - x).abs() <= tol)
    }

    pub fn is_attracting(&self) -> bool {
        self.stability == Stability::Attracting
    }

    pub fn is_repelling(&self) -> bool {
        self.stability == Stability::Repelling
    }

    /// Largest residual `|f^period(p) - p|` over the orbit.
    pub fn residual(&self, m: &UnimodalMap) -> f64 {
        self.points.iter().map(|&p| (m.iter_n(p, self.period) - p).abs()).fold(0.0, f64::max)
    }
}

/// Stability from the multiplier alone; one-sidedness needs [`mark_one_sided`].
pub fn classify(multiplier: f64, tol_stab: f64) -> Stability {
    let a = multiplier.abs();
    if a < 1.0 - tol_stab {
        Stability::Attracting
    } else if a > 1.0 + tol_stab {
        Stability::Repelling
    } else {
        Stability::Neutral
    }
}

/// Starts orbits at `p ± delta` under `f^period` and reports whether exactly one
/// side converges back to `p`.
pub fn is_one_sided(m: &UnimodalMap, p: f64, period: usize, delta: f64) -> bool {
    let converges = |start: f64| {
        let mut y = start;
        let d0 = (start - p).abs();
        for _ in 0..4000 {
            y = m.iter_n(y, period);
            if (y - p).abs() > 10.0 * d0 {
                return false;
            }
        }
        (y - p).abs() < 0.5 * d0 && (y - p).signum() == (start - p).signum()
    };
    converges(p - delta) != converges(p + delta)
}

/// Upgrades a neutral cycle with multiplier near +1 to one-sided when the
/// empirical test agrees.
pub fn mark_one_sided(m: &UnimodalMap, cycle: &mut Cycle, cfg: &Settings, tol_mult: f64) {
    if (cycle.multiplier - 1.0).abs() <= tol_mult {
        let p = closest_periodic_point(cycle, m);
        if is_one_sided(m, p, cycle.period, 1e-5) {
            cycle.stability = Stability::OneSided;
        } else if cycle.stability != Stability::Neutral && (cycle.multiplier - 1.0).abs() <= cfg.tol_stab {
            cycle.stability = Stability::Neutral;
        }
    }
}

/// Orbit point nearest `c`, ties toward the left.
pub fn closest_periodic_point(cycle: &Cycle, m: &UnimodalMap) -> f64 {
    let mut best = cycle.points[0];
    for &p in &cycle.points[1..] {
        if (p - m.c).abs() < (best - m.c).abs() {
            best = p;
        }
    }
    best
}

pub fn find_fixed_points(m: &UnimodalMap, cfg: &Settings) -> Vec<Cycle> {
    find_cycles_in(m, 1, m.a, m.b, cfg)
}

pub fn find_cycles(m: &UnimodalMap, period: usize, cfg: &Settings) -> Result<Vec<Cycle>> {
    if period == 0 {
        return Err(Error::Degenerate("period 0".into()));
    }
    if period > cfg.max_period {
        return Err(Error::PeriodLimit { period, max: cfg.max_period });
    }
    Ok(find_cycles_in(m, period, m.a, m.b, cfg))
}

/// Roots of `f^n(x) - x` in `[lo, hi]`, as raw points (not deduplicated).
/// Near-tangent double roots are caught by refining discrete extrema of the scan.
pub fn periodic_roots(m: &UnimodalMap, n: usize, lo: f64, hi: f64, cfg: &Settings) -> Vec<f64> {
    let h = |x: f64| m.iter_n(x, n) - x;
    let steps = (cfg.scan_n * n).clamp(64, 1 << 21);
    let dx = (hi - lo) / steps as f64;
    let xs: Vec<f64> = (0..=steps).map(|i| if i == steps { hi } else { lo + dx * i as f64 }).collect();
    let hs: Vec<f64> = if steps > 20_000 {
        xs.par_iter().map(|&x| h(x)).collect()
    } else {
        xs.iter().map(|&x| h(x)).collect()
    };
    let dh = |x: f64| m.deriv_n(x, n) - 1.0;
    let refine = |a: f64, b: f64| roots::newton_bracketed(h, dh, a, b, cfg.tol_root);
    let mut out = vec![];
    for i in 0..steps {
        if hs[i] == 0.0 {
            out.push(xs[i]);
        } else if hs[i].signum() != hs[i + 1].signum() && hs[i + 1] != 0.0 {
            if let Some(r) = refine(xs[i], xs[i + 1]) {
                out.push(r);
            }
        }
    }
    if hs[steps] == 0.0 {
        out.push(xs[steps]);
    }
    // Discrete extrema that stay on one side of zero may hide a close root pair.
    for i in 1..steps {
        let (l, c, r) = (hs[i - 1], hs[i], hs[i + 1]);
        if c == 0.0 || l.signum() != c.signum() || r.signum() != c.signum() {
            continue;
        }
        let is_min = c > 0.0 && c <= l && c <= r;
        let is_max = c < 0.0 && c >= l && c >= r;
        if !(is_min || is_max) {
            continue;
        }
        let slope = (l - c).abs().max((r - c).abs());
        if c.abs() > 4.0 * slope + 1e-10 {
            continue;
        }
        let xe = if is_min {
            roots::golden_min(h, xs[i - 1], xs[i + 1], 1e-15)
        } else {
            roots::golden_max(h, xs[i - 1], xs[i + 1], 1e-15)
        };
        let he = h(xe);
        if he.signum() != c.signum() || he == 0.0 {
            if let Some(r1) = refine(xs[i - 1], xe) {
                out.push(r1);
            }
            if let Some(r2) = refine(xe, xs[i + 1]) {
                out.push(r2);
            }
        } else if he.abs() <= 10.0 * cfg.tol_root {
            out.push(xe);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Primitive period-`n` cycles with at least one point in `[lo, hi]`.
pub fn find_cycles_in(m: &UnimodalMap, n: usize, lo: f64, hi: f64, cfg: &Settings) -> Vec<Cycle> {
    cycles_from_roots(m, n, periodic_roots(m, n, lo, hi, cfg), cfg)
}

/// Like [`find_cycles_in`], but `None` when the scan cannot resolve `f^n`:
/// once roots occupy more than one scan cell in `ALIASING`, sign changes are
/// dominated by aliasing rather than by genuine roots.
pub fn find_cycles_resolved(m: &UnimodalMap, n: usize, lo: f64, hi: f64, cfg: &Settings) -> Option<Vec<Cycle>> {
    const ALIASING: usize = 16;
    let roots = periodic_roots(m, n, lo, hi, cfg);
    let steps = (cfg.scan_n * n).clamp(64, 1 << 21);
    (roots.len() * ALIASING <= steps).then(|| cycles_from_roots(m, n, roots, cfg))
}

fn cycles_from_roots(m: &UnimodalMap, n: usize, roots: Vec<f64>, cfg: &Settings) -> Vec<Cycle> {
    let tol = cfg.tol_geom;
    // Sorted points of the cycles found so far.
    let mut known: Vec<f64> = vec![];
    let seen = |known: &[f64], x: f64| {
        let i = known.partition_point(|&p| p < x - tol);
        i < known.len() && known[i] <= x + tol
    };
    let mut cycles: Vec<Cycle> = vec![];
    for r in roots {
        if seen(&known, r) {
            continue;
        }
        let mut y = r;
        let mut primitive = true;
        for _ in 1..n {
            y = m.eval(y);
            if (y - r).abs() < tol {
                primitive = false;
                break;
            }
        }
        if !primitive {
            continue;
        }
        let cyc = Cycle::from_point(m, r, n, cfg);
        if cyc.points.iter().any(|&p| seen(&known, p)) {
            continue;
        }
        for &p in &cyc.points {
            let i = known.partition_point(|&q| q < p);
            known.insert(i, p);
        }
        cycles.push(cyc);
    }
    cycles.sort_by(|a, b| a.points[0].total_cmp(&b.points[0]));
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg() -> Settings {
        Settings::default()
    }

    #[test]
    fn fixed_points_examples() {
        let m = UnimodalMap::logistic(3.2).unwrap();
        let f = find_fixed_points(&m, &cfg());
        assert_eq!(f.len(), 2);
        assert_abs_diff_eq!(f[0].points[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f[0].multiplier, 3.2, epsilon = 1e-9);
        assert_abs_diff_eq!(f[1].points[0], 0.6875, epsilon = 1e-12);
        assert_abs_diff_eq!(f[1].multiplier, -1.2, epsilon = 1e-9);
        assert!(f.iter().all(Cycle::is_repelling));

        let f = find_fixed_points(&UnimodalMap::logistic(2.5).unwrap(), &cfg());
        assert_eq!(f.len(), 2);
        assert!(f[0].is_repelling());
        assert_abs_diff_eq!(f[1].points[0], 0.6, epsilon = 1e-12);
        assert!(f[1].is_attracting());

        let f = find_fixed_points(&UnimodalMap::logistic(0.5).unwrap(), &cfg());
        assert_eq!(f.len(), 1);
        assert!(f[0].is_attracting());
    }

    #[test]
    fn two_cycle_closed_form() {
        let mu: f64 = 3.2;
        let m = UnimodalMap::logistic(mu).unwrap();
        let c = find_cycles(&m, 2, &cfg()).unwrap();
        assert_eq!(c.len(), 1);
        let s = ((mu - 3.0) * (mu + 1.0)).sqrt();
        assert_abs_diff_eq!(c[0].points[0], (mu + 1.0 - s) / (2.0 * mu), epsilon = 1e-12);
        assert_abs_diff_eq!(c[0].points[1], (mu + 1.0 + s) / (2.0 * mu), epsilon = 1e-12);
        assert_abs_diff_eq!(c[0].multiplier, 4.0 + 2.0 * mu - mu * mu, epsilon = 1e-9);
        assert!(c[0].is_attracting());
        assert_abs_diff_eq!(closest_periodic_point(&c[0], &m), c[0].points[0], epsilon = 0.0);
    }

    #[test]
    fn three_cycles_in_window() {
        let m = UnimodalMap::logistic(3.84).unwrap();
        let c = find_cycles(&m, 3, &cfg()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.iter().filter(|c| c.is_attracting()).count(), 1);
        assert_eq!(c.iter().filter(|c| c.is_repelling()).count(), 1);
        for cy in &c {
            assert!(cy.residual(&m) < 10.0 * 1e-12);
            let p = closest_periodic_point(cy, &m);
            assert!(cy.points.iter().all(|q| (q - 0.5).abs() >= (p - 0.5).abs()));
        }
    }

    #[test]
    fn no_two_cycle_before_doubling() {
        assert!(find_cycles(&UnimodalMap::logistic(2.9).unwrap(), 2, &cfg()).unwrap().is_empty());
        assert!(find_cycles(&UnimodalMap::logistic(2.99).unwrap(), 2, &cfg()).unwrap().is_empty());
        assert_eq!(find_cycles(&UnimodalMap::logistic(3.01).unwrap(), 2, &cfg()).unwrap().len(), 1);
    }

    #[test]
    fn period_limit() {
        let m = UnimodalMap::logistic(3.5).unwrap();
        assert!(matches!(find_cycles(&m, 65, &cfg()), Err(Error::PeriodLimit { .. })));
    }

    #[test]
    fn multiplier_independent_of_start() {
        let m = UnimodalMap::logistic(3.55).unwrap();
        for c in find_cycles(&m, 8, &cfg()).unwrap() {
            for &p in &c.points {
                let alt = m.deriv_n(p, 8);
                assert!((alt - c.multiplier).abs() <= 1e-8 * c.multiplier.abs().max(1.0));
            }
        }
    }

    #[test]
    fn tangent_cycle_is_one_sided() {
        let mu = 1.0 + 8f64.sqrt();
        let m = UnimodalMap::logistic(mu).unwrap();
        let mut c = find_cycles(&m, 3, &cfg()).unwrap();
        assert!(!c.is_empty(), "double root missed");
        let cy = &mut c[0];
        assert!((cy.multiplier - 1.0).abs() < 1e-5, "multiplier {}", cy.multiplier);
        mark_one_sided(&m, cy, &cfg(), 1e-5);
        assert_eq!(cy.stability, Stability::OneSided);
    }
}
