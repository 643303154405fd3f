//! Itinerary cells of a window and depth-limited approximations of the
//! repelling Cantor node they carve out.

use serde::{Deserialize, Serialize};

use super::region::{image, TrappingRegion};
use crate::interval_set::{Interval, IntervalSet, Piece};
use crate::map::{Branch, UnimodalMap};
use crate::roots;

/// Cells `A_0, ..., A_{m-1}` (left to right) for the return map `g = f^r`
/// on `domain`, the first interval of the enclosing region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItineraryPartition {
    pub cells: Vec<Interval>,
    pub r: usize,
    pub domain: Interval,
}

impl ItineraryPartition {
    /// Components of `hull(g²(c), g(c))` minus the interiors of the window
    /// intervals lying in `domain`.
    pub fn new(m: &UnimodalMap, domain: Interval, r: usize, window: &TrappingRegion, tol: f64) -> Self {
        let gc = m.iter_n(m.c, r);
        let ggc = m.iter_n(gc, r);
        let mut rest = Interval::hull(gc, ggc).to_set();
        for j in &window.intervals {
            if j.subset_tol(&domain, tol) {
                rest = rest.difference(&j.interior_set());
            }
        }
        let cells = rest
            .closure()
            .pieces()
            .iter()
            .filter(|p| p.len() > tol)
            .map(|p| Interval::new(p.lo, p.hi))
            .collect();
        ItineraryPartition { cells, r, domain }
    }

    pub fn g(&self, m: &UnimodalMap, x: f64) -> f64 {
        m.iter_n(x, self.r)
    }

    pub fn cell_of(&self, x: f64, tol: f64) -> Option<usize> {
        self.cells.iter().position(|c| c.contains_tol(x, tol))
    }

    pub fn image_of_cell(&self, m: &UnimodalMap, i: usize) -> Interval {
        let c = self.cells[i];
        Interval::hull(self.g(m, c.lo), self.g(m, c.hi))
    }

    /// The point of cell `i` mapped by `g` to `y`, if any.
    pub fn inverse_on_cell(&self, m: &UnimodalMap, i: usize, y: f64, tol: f64) -> Option<f64> {
        let cell = self.cells[i];
        if !self.image_of_cell(m, i).contains_tol(y, tol) {
            return None;
        }
        if self.r == 1 {
            let b = if cell.lo >= m.c { Branch::Right } else { Branch::Left };
            return Some(m.inverse(y, b).clamp(cell.lo, cell.hi));
        }
        let h = |x: f64| self.g(m, x) - y;
        let (hl, hh) = (h(cell.lo), h(cell.hi));
        if hl == 0.0 {
            return Some(cell.lo);
        }
        if hh == 0.0 || hl.signum() == hh.signum() {
            // Within tolerance of an endpoint image.
            return Some(if hl.abs() < hh.abs() { cell.lo } else { cell.hi });
        }
        roots::bisect(h, cell.lo, cell.hi, 1e-14)
    }

    /// `A_i ∩ g^{-1}(target)`.
    pub fn pull_into_cell(&self, m: &UnimodalMap, i: usize, target: Interval, tol: f64) -> Option<Interval> {
        let img = self.image_of_cell(m, i);
        let t = img.intersect(&target)?;
        let x1 = self.inverse_on_cell(m, i, t.lo, tol)?;
        let x2 = self.inverse_on_cell(m, i, t.hi, tol)?;
        Some(Interval::hull(x1, x2))
    }
}

/// Depth-limited approximation of a Cantor node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantorSupport {
    pub partition: ItineraryPartition,
    /// Word length of the cylinders actually built.
    pub depth: usize,
    /// Cylinders inside the cells of `g`.
    pub base: Vec<Interval>,
    /// Union of the cylinders and their first `r - 1` images under `f`.
    pub set: IntervalSet,
    /// Widest approximating piece: an upper bound on the Hausdorff error.
    pub error: f64,
}

const MAX_PIECES: usize = 40_000;

impl CantorSupport {
    pub fn build(m: &UnimodalMap, partition: ItineraryPartition, depth: usize, tol: f64) -> Self {
        let mut level: Vec<Interval> = partition.cells.clone();
        let mut reached = 1;
        while reached < depth.max(1) {
            let mut next = Vec::with_capacity(level.len() * 2);
            for i in 0..partition.cells.len() {
                for t in &level {
                    if let Some(k) = partition.pull_into_cell(m, i, *t, tol) {
                        next.push(k);
                    }
                }
            }
            if next.len() > MAX_PIECES || next.is_empty() {
                break;
            }
            next.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            level = next;
            reached += 1;
        }
        let mut pieces: Vec<Piece> = level.iter().map(|j| Piece::closed(j.lo, j.hi)).collect();
        let mut cur = level.clone();
        for _ in 1..partition.r {
            cur = cur.iter().map(|j| image(m, *j)).collect();
            pieces.extend(cur.iter().map(|j| Piece::closed(j.lo, j.hi)));
        }
        let set = IntervalSet::from_pieces(pieces);
        let error = set.pieces().iter().map(Piece::len).fold(0.0, f64::max);
        CantorSupport { partition, depth: reached, base: level, set, error }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Settings;
    use crate::orbit::find_cycles;
    use crate::tower::region::build_region;

    fn setup() -> (UnimodalMap, ItineraryPartition) {
        let m = UnimodalMap::logistic(3.84).unwrap();
        let rep = find_cycles(&m, 3, &Settings::default())
            .unwrap()
            .into_iter()
            .find(|c| c.is_repelling())
            .unwrap();
        let reg = build_region(&m, &rep, 3, 1e-9).unwrap();
        let p = ItineraryPartition::new(&m, Interval::new(0.0, 1.0), 1, &reg, 1e-9);
        (m, p)
    }

    #[test]
    fn two_cells_in_period_three_window() {
        let (m, p) = setup();
        assert_eq!(p.cells.len(), 2);
        // A_0 = [p_3, 1 - p_1] left of c, A_1 = [p_1, p_2] right of c.
        assert!(p.cells[0].hi < m.c && p.cells[1].lo > m.c);
        assert!((p.cells[0].hi - (1.0 - p.cells[1].lo)).abs() < 1e-12);
        let xbar = 1.0 - 1.0 / 3.84;
        assert_eq!(p.cell_of(xbar, 0.0), Some(1));
    }

    #[test]
    fn approximation_contains_cycles_and_shrinks() {
        let (m, p) = setup();
        let s6 = CantorSupport::build(&m, p.clone(), 6, 1e-9);
        let s12 = CantorSupport::build(&m, p, 12, 1e-9);
        assert_eq!(s12.depth, 12);
        assert!(s12.error < s6.error);
        assert!(s12.set.is_subset(&s6.set));
        let xbar = 1.0 - 1.0 / 3.84;
        assert!(s12.set.contains(xbar));
        // golden-mean count of length-12 words
        assert_eq!(s12.base.len(), 377);
    }
}
