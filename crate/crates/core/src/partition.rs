//! The level partition `U_{-1}, ..., U_p` and special alpha-limits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_set::{IntervalSet, Piece};
use crate::map::UnimodalMap;
use crate::tower::{bands_for_period, Tower};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSet {
    pub level: i64,
    pub set: IntervalSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub tower: Tower,
    /// `U_{-1}, U_0, ..., U_p` in order.
    pub u: Vec<LevelSet>,
    /// `V_0, ..., V_{p-2}`.
    pub v: Vec<IntervalSet>,
    pub domain: (f64, f64),
    pub truncated: bool,
}

/// `V_k = ⋃_{i<r_k} [c_{2r_k-i}, c_{r_k-i}]`, for `0 <= k <= p-2`.
pub fn compute_v(tower: &Tower, m: &UnimodalMap, k: usize) -> Result<IntervalSet> {
    let p = tower.p();
    if p < 2 || k > p - 2 {
        return Err(Error::OutOfRange { index: k as i64, max: p as i64 - 2 });
    }
    let r = tower.region_period(k).ok_or(Error::NoRegion(k))?;
    Ok(bands_for_period(m, r))
}

pub fn compute_partition(tower: &Tower, m: &UnimodalMap) -> Result<Partition> {
    let p = tower.p();
    let whole = IntervalSet::closed(m.a, m.b);
    let crit = m.critical_orbit(2);
    let (c1, c2) = (crit.get(1), crit.get(2));
    let top = IntervalSet::from_pieces(vec![Piece::new(c1, false, m.b, true)]);
    let node = |k: usize| tower.nodes[k].set();
    let mut v = vec![];
    if p >= 2 {
        for k in 0..=p - 2 {
            v.push(compute_v(tower, m, k)?);
        }
    }
    let mut u: Vec<IntervalSet> = vec![IntervalSet::empty(); p + 2];
    match p {
        0 => {
            u[1] = node(0);
            u[0] = whole.difference(&u[1]);
        }
        1 => {
            u[2] = node(1);
            u[0] = top;
            u[1] = IntervalSet::closed(m.a, c1).difference(&u[2]);
        }
        _ => {
            u[p + 1] = node(p);
            let mut above = u[p + 1].clone();
            for k in (1..p).rev() {
                u[k + 1] = v[k - 1].difference(&above);
                above = above.union(&u[k + 1]);
            }
            u[1] = IntervalSet::from_pieces(vec![Piece::new(m.a, true, c2, false)]);
            u[0] = top;
        }
    }
    let u = u.into_iter().enumerate().map(|(i, set)| LevelSet { level: i as i64 - 1, set }).collect();
    Ok(Partition { tower: tower.clone(), u, v, domain: (m.a, m.b), truncated: tower.truncated })
}

impl Partition {
    pub fn p(&self) -> usize {
        self.tower.p()
    }

    /// `U_k` for `-1 <= k <= p`.
    pub fn u(&self, k: i64) -> &IntervalSet {
        &self.u[(k + 1) as usize].set
    }

    pub fn level(&self, x: f64) -> Result<i64> {
        let (a, b) = self.domain;
        if !(a..=b).contains(&x) {
            return Err(Error::Domain { x, a, b });
        }
        self.u
            .iter()
            .find(|l| l.set.contains(x))
            .map(|l| l.level)
            .ok_or_else(|| Error::Degenerate(format!("{x} not covered by the partition")))
    }

    /// Union of node supports `N_0, ..., N_k`.
    pub fn nodes_up_to(&self, k: usize) -> IntervalSet {
        let sets: Vec<IntervalSet> = self.tower.nodes[..=k].iter().map(|n| n.set()).collect();
        IntervalSet::union_all(sets.iter())
    }

    /// Non-wandering set: every node, with the wandering gaps of a merged node removed.
    pub fn omega(&self) -> IntervalSet {
        let mut sets: Vec<IntervalSet> = self.tower.nodes.iter().map(|n| n.support.omega_part()).collect();
        sets.retain(|s| !s.is_empty());
        IntervalSet::union_all(sets.iter())
    }

    pub fn salpha(&self, x: f64) -> Result<IntervalSet> {
        let k = self.level(x)?;
        Ok(if k < 0 {
            IntervalSet::empty()
        } else if (k as usize) < self.p() {
            self.nodes_up_to(k as usize)
        } else {
            self.omega()
        })
    }

    /// Node indices that may contain `ω(x)`.
    pub fn omega_candidates(&self, x: f64) -> Result<Vec<usize>> {
        let k = self.level(x)?.max(0) as usize;
        Ok((k..=self.p()).collect())
    }

    /// Sum of the lengths of all `U_k`.
    pub fn total_length(&self) -> f64 {
        self.u.iter().map(|l| l.set.measure()).sum()
    }

    /// Pieces shorter than `tol` that are not isolated points.
    pub fn near_degenerate(&self, tol: f64) -> Vec<(i64, Piece)> {
        self.u
            .iter()
            .flat_map(|l| l.set.pieces().iter().filter(|p| !p.is_point() && p.len() < tol).map(move |p| (l.level, *p)))
            .collect()
    }

    /// One line per level, e.g. `U_1 = [0.512, 0.513) ∪ ...`.
    pub fn diagram(&self) -> String {
        self.u.iter().map(|l| format!("U_{} = {}", l.level, l.set)).collect::<Vec<_>>().join("\n")
    }
}

pub fn is_closed(s: &IntervalSet) -> bool {
    s.is_closed()
}
