//! Grid ε-chain recurrence: the map discretized as a digraph on grid points.

use petgraph::algo::{has_path_connecting, tarjan_scc};
use petgraph::graph::{DiGraph, NodeIndex};

use crate::config::Settings;
use crate::error::{Error, Result};
use crate::interval_set::{IntervalSet, Piece};
use crate::map::UnimodalMap;

/// Grid points `x_i = a + i h`, `i < n`, with an edge `i -> j` whenever
/// `|f(x_i) - x_j| <= eps_eff`. The closed inequality links neighbours at
/// exactly one cell, so a fixed endpoint can still leak into the interior.
#[derive(Debug, Clone)]
pub struct GridSystem {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub eps_eff: f64,
    /// SCCs closer than this many cells are fragments of one class.
    pub merge_cells: f64,
    graph: DiGraph<(), ()>,
}

/// A chain class of the grid digraph.
#[derive(Debug, Clone)]
pub struct NodeClass {
    pub cells: Vec<usize>,
    pub set: IntervalSet,
}

impl NodeClass {
    /// The grid points of the class.
    pub fn points(&self, grid: &GridSystem) -> IntervalSet {
        IntervalSet::points(self.cells.iter().map(|&i| grid.point(i)))
    }
}

impl GridSystem {
    /// `eps_eff = eps + slack * h`; `slack = 1` is the textbook Conley graph.
    pub fn new(m: &UnimodalMap, n: usize, eps: f64, slack: f64, merge_cells: f64) -> Result<Self> {
        if n < 64 {
            return Err(Error::Config(format!("grid needs at least 64 cells, got {n}")));
        }
        let (a, b) = (m.a, m.b);
        let h = (b - a) / (n - 1) as f64;
        let eps_eff = eps + slack * h;
        let mut graph = DiGraph::with_capacity(n, 3 * n);
        for _ in 0..n {
            graph.add_node(());
        }
        for i in 0..n {
            let y = m.eval(a + i as f64 * h);
            let lo = ((y - eps_eff - a) / h).ceil().max(0.0) as usize;
            let hi = (((y + eps_eff - a) / h).floor() as usize).min(n - 1);
            for j in lo..=hi {
                if (y - (a + j as f64 * h)).abs() <= eps_eff {
                    graph.add_edge(NodeIndex::new(i), NodeIndex::new(j), ());
                }
            }
        }
        Ok(Self { n, a, b, h, eps_eff, merge_cells, graph })
    }

    pub fn build(m: &UnimodalMap, n: usize, eps: f64, cfg: &Settings) -> Result<Self> {
        Self::new(m, n, eps, cfg.grid_slack, cfg.grid_merge)
    }

    pub fn point(&self, i: usize) -> f64 {
        self.a + i as f64 * self.h
    }

    pub fn cell_of(&self, x: f64) -> usize {
        (((x - self.a) / self.h).round().max(0.0) as usize).min(self.n - 1)
    }

    /// Closed cell around grid point `i`, clipped to the domain.
    pub fn cell(&self, i: usize) -> Piece {
        let x = self.point(i);
        Piece::closed((x - self.h / 2.0).max(self.a), (x + self.h / 2.0).min(self.b))
    }

    pub fn cells_to_set(&self, cells: &[usize]) -> IntervalSet {
        IntervalSet::from_pieces(cells.iter().map(|&i| self.cell(i)).collect())
    }

    pub fn successors(&self, i: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.graph.neighbors(NodeIndex::new(i)).map(|j| j.index()).collect();
        v.sort_unstable();
        v
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Strongly connected components that carry a cycle, in topological
    /// order of the condensation (upstream first).
    fn recurrent_components(&self) -> Vec<Vec<usize>> {
        let mut sccs = tarjan_scc(&self.graph);
        // tarjan_scc yields reverse topological order
        sccs.reverse();
        sccs.into_iter()
            .filter(|c| c.len() > 1 || self.graph.contains_edge(c[0], c[0]))
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|i| i.index()).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }

    /// Cells lying on directed cycles.
    pub fn recurrent_cells(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.recurrent_components().into_iter().flatten().collect();
        v.sort_unstable();
        v
    }

    /// Whether cell(y) is reachable from cell(x).
    pub fn upstream(&self, x: f64, y: f64) -> bool {
        let (i, j) = (self.cell_of(x), self.cell_of(y));
        has_path_connecting(&self.graph, NodeIndex::new(i), NodeIndex::new(j), None)
    }
}

/// Grid approximation of the chain-recurrent set.
pub fn chain_recurrent_cells(m: &UnimodalMap, n: usize, eps: f64, cfg: &Settings) -> Result<IntervalSet> {
    let g = GridSystem::build(m, n, eps, cfg)?;
    Ok(g.cells_to_set(&g.recurrent_cells()))
}

/// Reachability of cell(y) from cell(x) in the grid digraph.
pub fn upstream(grid: &GridSystem, x: f64, y: f64) -> bool {
    grid.upstream(x, y)
}

/// Chain classes of the grid, upstream first.
///
/// A finite grid map has spurious short cycles next to every genuine one,
/// so one node shows up as several nearby SCCs; those within `merge_cells`
/// cells (directed Hausdorff, either way) are merged. Classes are ordered by
/// the number of classes that reach them, a linear extension of the chain
/// order.
pub fn node_classes(grid: &GridSystem) -> Vec<NodeClass> {
    let comps = grid.recurrent_components();
    let sets: Vec<IntervalSet> = comps.iter().map(|c| grid.cells_to_set(c)).collect();
    let tol = grid.merge_cells * grid.h;
    let k = comps.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..k {
        for j in i + 1..k {
            let d = sets[i].directed_hausdorff(&sets[j]).min(sets[j].directed_hausdorff(&sets[i]));
            if d <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; k];
    for i in 0..k {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].extend(&comps[i]);
    }
    let owner: Vec<Option<usize>> = {
        let mut o = vec![None; grid.n];
        for (g, cells) in groups.iter().enumerate() {
            for &c in cells {
                o[c] = Some(g);
            }
        }
        o
    };
    // reach[g] = classes reachable from class g
    let reach: Vec<Vec<bool>> = groups
        .iter()
        .map(|cells| {
            let mut seen = vec![false; grid.n];
            let mut stack: Vec<usize> = cells.clone();
            for &c in cells {
                seen[c] = true;
            }
            let mut hit = vec![false; groups.len()];
            while let Some(i) = stack.pop() {
                if let Some(g) = owner[i] {
                    hit[g] = true;
                }
                for j in grid.graph.neighbors(NodeIndex::new(i)) {
                    if !seen[j.index()] {
                        seen[j.index()] = true;
                        stack.push(j.index());
                    }
                }
            }
            hit
        })
        .collect();
    let ancestors = |g: usize| (0..groups.len()).filter(|&h| h != g && reach[h][g]).count();
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by_key(|&g| (ancestors(g), groups[g].iter().min().copied()));
    order
        .into_iter()
        .map(|g| {
            let mut cells = std::mem::take(&mut groups[g]);
            cells.sort_unstable();
            NodeClass { set: grid.cells_to_set(&cells), cells }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::build_tower;
    use proptest::prelude::*;

    fn grid(mu: f64, n: usize) -> (UnimodalMap, GridSystem) {
        let m = UnimodalMap::logistic(mu).unwrap();
        let g = GridSystem::build(&m, n, 0.0, &Settings::default()).unwrap();
        (m, g)
    }

    #[test]
    fn small_grid_rejected() {
        let m = UnimodalMap::logistic(3.2).unwrap();
        assert!(GridSystem::build(&m, 32, 0.0, &Settings::default()).is_err());
    }

    #[test]
    fn recurrent_cells_at_3_2() {
        let (_, g) = grid(3.2, 8192);
        let pts = IntervalSet::points(g.recurrent_cells().into_iter().map(|i| g.point(i)));
        let q = (4.2 + (4.2f64 * 4.2 - 4.0 * 4.2).sqrt()) / (2.0 * 3.2);
        let p = (4.2 - (4.2f64 * 4.2 - 4.0 * 4.2).sqrt()) / (2.0 * 3.2);
        let truth = IntervalSet::points([0.0, 0.6875, p, q]);
        assert!(pts.hausdorff(&truth) <= 3.0 * g.h, "{}", pts.hausdorff(&truth) / g.h);
    }

    #[test]
    fn recurrent_cells_at_2_5_and_3_7() {
        let (_, g) = grid(2.5, 8192);
        let pts = IntervalSet::points(g.recurrent_cells().into_iter().map(|i| g.point(i)));
        assert!(pts.hausdorff(&IntervalSet::points([0.0, 0.6])) <= 3.0 * g.h);

        let (m, g) = grid(3.7, 8192);
        let cells = g.cells_to_set(&g.recurrent_cells());
        let band = IntervalSet::closed(m.critical_orbit(2).get(2), m.critical_value());
        let truth = band.union(&IntervalSet::point(0.0));
        assert!(cells.directed_hausdorff(&truth) <= 3.0 * g.h);
        assert!(cells.contains(0.0));
        assert!((cells.pieces()[1].lo - band.min().unwrap()).abs() <= 3.0 * g.h);
        assert!((cells.max().unwrap() - m.critical_value()).abs() <= 3.0 * g.h);
    }

    #[test]
    fn upstream_follows_tower_order() {
        let (_, g) = grid(3.2, 8192);
        let xbar = 0.6875;
        let attractor = (4.2 - (4.2f64 * 4.2 - 4.0 * 4.2).sqrt()) / (2.0 * 3.2);
        assert!(upstream(&g, xbar, attractor));
        assert!(!upstream(&g, attractor, xbar));
        assert!(upstream(&g, 0.0, xbar));
        assert!(!upstream(&g, xbar, 0.0));
    }

    #[test]
    fn class_counts_match_towers() {
        let cfg = Settings::default();
        for (mu, n) in [(2.5, 8192), (3.2, 8192), (3.55, 16384), (3.7, 8192), (3.84, 8192)] {
            let (m, g) = grid(mu, n);
            let t = build_tower(&m, &cfg).unwrap();
            assert_eq!(node_classes(&g).len(), t.nodes.len(), "mu {mu}");
        }
    }

    #[test]
    fn classes_track_supports_at_3_2() {
        let (m, g) = grid(3.2, 8192);
        let t = build_tower(&m, &Settings::default()).unwrap();
        for (c, node) in node_classes(&g).iter().zip(&t.nodes) {
            let d = c.points(&g).hausdorff(&node.set());
            assert!(d <= 3.0 * g.h, "{} cells", d / g.h);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn one_exact_step_is_upstream(x in 0.0f64..1.0, mu in 2.8f64..4.0) {
            let m = UnimodalMap::logistic(mu).unwrap();
            let g = GridSystem::build(&m, 256, 0.0, &Settings::default()).unwrap();
            let x = g.point(g.cell_of(x));
            prop_assert!(upstream(&g, x, m.eval(x)));
        }
    }
}
