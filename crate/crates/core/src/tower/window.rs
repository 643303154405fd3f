//! Parameter windows: tangent start and crisis end, both by bisection in `mu`.

use crate::config::Settings;
use crate::error::{Error, Result};
use crate::map::UnimodalMap;
use crate::orbit::{self, Cycle};
use crate::tower::region;

const MU_TOL: f64 = 1e-12;

fn count_cycles(m: &UnimodalMap, period: usize, cfg: &Settings) -> usize {
    orbit::find_cycles_in(m, period, m.a, m.b, cfg).len()
}

/// Does the region bounded by some period-`period` cycle still trap?
/// Period 1 means the flip region of the interior fixed point.
fn region_valid(m: &UnimodalMap, period: usize, cfg: &Settings) -> bool {
    let tol = cfg.tol_geom;
    let cycles: Vec<Cycle> = orbit::find_cycles_in(m, period, m.a, m.b, cfg)
        .into_iter()
        .filter(|c| period > 1 || c.points[0] > m.a + 1e-9)
        .collect();
    cycles.iter().any(|c| {
        let rp = if period == 1 { 2 } else { period };
        region::build_region(m, c, rp, tol).is_some_and(|r| region::validate(m, &r, tol).is_ok())
    })
}

fn bisect_mu<F: Fn(f64) -> bool>(pred: F, mut lo: f64, mut hi: f64) -> f64 {
    // pred(lo) != pred(hi); returns the switching parameter.
    let plo = pred(lo);
    while hi - lo > MU_TOL {
        let mid = 0.5 * (lo + hi);
        if pred(mid) == plo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Start and end of the period-`period` window of `family`'s family inside `[mu_lo, mu_hi]`.
///
/// The start is where period-`period` cycles first exist (for period 1: where
/// the interior fixed point turns repelling); the end is the crisis after
/// which the region bounded by the repelling cycle stops trapping.
pub fn locate_window(family: &UnimodalMap, period: usize, mu_lo: f64, mu_hi: f64, cfg: &Settings) -> Result<(f64, f64)> {
    if !(mu_lo < mu_hi) || period == 0 {
        return Err(Error::Degenerate(format!("bad window search [{mu_lo}, {mu_hi}] period {period}")));
    }
    let not_found = || Error::WindowNotFound { period, lo: mu_lo, hi: mu_hi };
    let at = |mu: f64| family.with_mu(mu);
    let exists = |mu: f64| -> bool {
        let Ok(m) = at(mu) else { return false };
        if period == 1 {
            orbit::find_fixed_points(&m, cfg).iter().any(|c| c.points[0] > m.a + 1e-9 && c.is_repelling())
        } else {
            count_cycles(&m, period, cfg) > 0
        }
    };
    if exists(mu_lo) {
        // Already inside: the start lies at or before mu_lo.
        let valid = |mu: f64| at(mu).is_ok_and(|m| region_valid(&m, period, cfg));
        if !valid(mu_lo) {
            return Err(not_found());
        }
        let end = if valid(mu_hi) { mu_hi } else { bisect_mu(valid, mu_lo, mu_hi) };
        return Ok((mu_lo, end));
    }
    if !exists(mu_hi) {
        return Err(not_found());
    }
    let start = bisect_mu(exists, mu_lo, mu_hi);
    let valid = |mu: f64| at(mu).is_ok_and(|m| region_valid(&m, period, cfg));
    // Step inside the window until the region is established.
    let mut inside = None;
    let mut d = 1e-9;
    while start + d < mu_hi {
        if valid(start + d) {
            inside = Some(start + d);
            break;
        }
        d *= 4.0;
    }
    let inside = inside.ok_or_else(not_found)?;
    let end = if valid(mu_hi) { mu_hi } else { bisect_mu(valid, inside, mu_hi) };
    Ok((start, end))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_three_window() {
        let m = UnimodalMap::logistic(3.8).unwrap();
        let (s, e) = locate_window(&m, 3, 3.8, 3.87, &Settings::default()).unwrap();
        assert!((s - (1.0 + 8f64.sqrt())).abs() < 1e-6, "start {s}");
        assert!((e - 3.857).abs() < 1e-3, "end {e}");
    }

    #[test]
    fn no_period_three_below_tangency() {
        let m = UnimodalMap::logistic(3.0).unwrap();
        assert!(matches!(
            locate_window(&m, 3, 3.0, 3.5, &Settings::default()),
            Err(Error::WindowNotFound { .. })
        ));
    }

    #[test]
    fn band_merging_crisis() {
        let m = UnimodalMap::logistic(3.0).unwrap();
        let (s, e) = locate_window(&m, 1, 2.9, 3.8, &Settings::default()).unwrap();
        // The start sits at the edge of the neutral multiplier band.
        assert!((s - 3.0).abs() < 1e-5);
        let cr = |x: f64| x.cbrt();
        let exact = 2.0 * (1.0 + cr(19.0 - 3.0 * 33f64.sqrt()) + cr(19.0 + 3.0 * 33f64.sqrt())) / 3.0;
        assert!((e - exact).abs() < 1e-6, "{e} vs {exact}");
    }
}
