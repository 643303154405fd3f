//! Attractor detection from the forward orbit of the critical point.

use serde::{Deserialize, Serialize};

use crate::config::Settings;
use crate::interval_set::{Interval, IntervalSet, Piece};
use crate::map::UnimodalMap;
use crate::orbit::{self, Cycle, Stability};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttractorType {
    A1,
    A2,
    A3,
    A4,
    A5,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Detected {
    Periodic(Cycle),
    Bands { set: IntervalSet, period: usize },
}

/// `⋃_{i<q} hull(c_{2q-i}, c_{q-i})`.
pub fn bands_for_period(m: &UnimodalMap, q: usize) -> IntervalSet {
    let crit = m.critical_orbit(2 * q);
    IntervalSet::from_pieces(
        (0..q)
            .map(|i| {
                let j = Interval::hull(crit.get(2 * q - i), crit.get(q - i));
                Piece::closed(j.lo, j.hi)
            })
            .collect(),
    )
}

/// Iterates `c` for `transient` steps and inspects the next `samples` iterates.
pub fn detect(m: &UnimodalMap, transient: usize, samples: usize, cfg: &Settings) -> Option<Detected> {
    let samples = samples.max(2 * cfg.max_period + 2);
    let mut xs = orbit_from(m, m.c, transient, samples);
    if let Some(cyc) = periodic_tail(m, &xs, cfg) {
        if !cyc.is_repelling() {
            return Some(Detected::Periodic(cyc));
        }
        // c is preperiodic onto a repelling cycle; a nearby orbit shows the attractor.
        xs = orbit_from(m, m.c + 1e-7 * (m.b - m.a), transient, samples);
        if let Some(cyc) = periodic_tail(m, &xs, cfg).filter(|c| !c.is_repelling()) {
            return Some(Detected::Periodic(cyc));
        }
    }
    // Largest residue period whose class hulls have disjoint interiors.
    let mut best = None;
    for q in 1..=cfg.max_period {
        let mut hulls: Vec<Interval> = (0..q)
            .map(|r| {
                let it = xs.iter().skip(r).step_by(q);
                let lo = it.clone().copied().fold(f64::INFINITY, f64::min);
                let hi = it.copied().fold(f64::NEG_INFINITY, f64::max);
                Interval::new(lo, hi)
            })
            .collect();
        hulls.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        if hulls.windows(2).all(|w| w[0].hi <= w[1].lo) && hulls.iter().all(|h| h.len() > 0.0) {
            best = Some(q);
        }
    }
    best.map(|q| Detected::Bands { set: bands_for_period(m, q), period: q })
}

fn orbit_from(m: &UnimodalMap, start: f64, transient: usize, samples: usize) -> Vec<f64> {
    let mut x = m.iter_n(start, transient);
    let mut xs = Vec::with_capacity(samples);
    for _ in 0..samples {
        xs.push(x);
        x = m.eval(x);
    }
    xs
}

/// Smallest period the sampled orbit has settled into, as a refined cycle.
fn periodic_tail(m: &UnimodalMap, xs: &[f64], cfg: &Settings) -> Option<Cycle> {
    let last = xs.len() - 1 - cfg.max_period;
    (1..=cfg.max_period)
        .find(|&q| (0..=cfg.max_period.min(8)).all(|k| (xs[last - k + q] - xs[last - k]).abs() < 1e-7))
        .map(|q| {
            let mut cyc = Cycle::from_point(m, xs[last], q, cfg);
            orbit::mark_one_sided(m, &mut cyc, cfg, 1e-3);
            cyc
        })
}

/// Attracting type of a detected periodic attractor.
pub fn periodic_type(c: &Cycle) -> AttractorType {
    if c.stability == Stability::OneSided {
        AttractorType::A4
    } else {
        AttractorType::A1
    }
}
