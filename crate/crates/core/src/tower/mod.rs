//! The tower of chain-recurrent nodes, built by renormalisation: at each level
//! the return map `g = f^r` on the current `J_1` is inspected for a flip
//! region around its internal fixed point, then for a window, and otherwise
//! the level holds the attractor.

pub mod attractor;
pub mod cantor;
pub mod region;
pub mod window;

use serde::{Deserialize, Serialize};

use crate::config::Settings;
use crate::error::{Error, Result};
use crate::interval_set::{Interval, IntervalSet};
use crate::map::UnimodalMap;
use crate::orbit::{self, Cycle, Stability};

pub use attractor::{bands_for_period, AttractorType, Detected};
pub use cantor::{CantorSupport, ItineraryPartition};
pub use region::{RegionKind, TrappingRegion};
pub use window::locate_window;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    FixedEndpoint,
    RepellingCycle,
    Cantor,
    Attracting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Support {
    Cycle(Cycle),
    Cantor(CantorSupport),
    Bands {
        set: IntervalSet,
        period: usize,
    },
    /// An attractor glued to a Cantor node through a shared one-sided cycle.
    Merged {
        nonwandering: IntervalSet,
        wandering: IntervalSet,
    },
    /// Outer approximation of an unresolved limit (truncated tower).
    Approx {
        set: IntervalSet,
    },
}

impl Support {
    /// The node as a closed point set.
    pub fn set(&self) -> IntervalSet {
        match self {
            Support::Cycle(c) => IntervalSet::points(c.points.iter().copied()),
            Support::Cantor(s) => s.set.clone(),
            Support::Bands { set, .. } | Support::Approx { set } => set.clone(),
            Support::Merged { nonwandering, wandering } => nonwandering.union(wandering).closure(),
        }
    }

    /// Non-wandering part of the node.
    pub fn omega_part(&self) -> IntervalSet {
        match self {
            Support::Merged { nonwandering, .. } => nonwandering.clone(),
            other => other.set(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub index: usize,
    pub kind: NodeKind,
    pub attracting_type: Option<AttractorType>,
    pub support: Support,
    pub region: Option<TrappingRegion>,
    pub diagnostics: Vec<String>,
}

impl Node {
    pub fn is_attracting(&self) -> bool {
        self.kind == NodeKind::Attracting
    }

    pub fn set(&self) -> IntervalSet {
        self.support.set()
    }

    pub fn cantor(&self) -> Option<&CantorSupport> {
        match &self.support {
            Support::Cantor(c) => Some(c),
            _ => None,
        }
    }

    pub fn cycle(&self) -> Option<&Cycle> {
        match &self.support {
            Support::Cycle(c) => Some(c),
            _ => None,
        }
    }
}

/// Stored region of a repelling node.
pub fn trapping_region_of(node: &Node) -> Result<&TrappingRegion> {
    match (&node.region, node.kind) {
        (Some(r), NodeKind::FixedEndpoint | NodeKind::RepellingCycle | NodeKind::Cantor) => Ok(r),
        _ => Err(Error::NoRegion(node.index)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tower {
    pub schema_version: u32,
    pub map: crate::map::MapSpec,
    pub nodes: Vec<Node>,
    pub truncated: bool,
}

impl Tower {
    /// Index of the attracting node.
    pub fn p(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn attractor(&self) -> &Node {
        self.nodes.last().expect("towers are never empty")
    }

    /// Period `r_k` of the region of node `k`.
    pub fn region_period(&self, k: usize) -> Option<usize> {
        self.nodes.get(k)?.region.as_ref().map(|r| r.period)
    }

    /// One-word summary per node, e.g. `fixed_endpoint, repelling_cycle(1), A1(2)`.
    pub fn summary(&self) -> Vec<String> {
        self.nodes
            .iter()
            .map(|n| match (&n.kind, &n.attracting_type, &n.support) {
                (NodeKind::Attracting, Some(t), Support::Cycle(c)) => format!("{t:?}({})", c.period),
                (NodeKind::Attracting, Some(t), Support::Bands { period, .. }) => format!("{t:?}[{period}]"),
                (NodeKind::Attracting, Some(t), _) => format!("{t:?}"),
                (NodeKind::RepellingCycle, _, Support::Cycle(c)) => format!("repelling_cycle({})", c.period),
                (NodeKind::Cantor, _, _) => {
                    format!("cantor({})", n.region.as_ref().map_or(0, |r| r.period))
                }
                (NodeKind::FixedEndpoint, _, _) => "fixed_endpoint".into(),
                (k, _, _) => format!("{k:?}").to_lowercase(),
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tower serialises")
    }
}

struct Builder<'a> {
    m: &'a UnimodalMap,
    cfg: &'a Settings,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn push(&mut self, kind: NodeKind, t: Option<AttractorType>, support: Support, region: Option<TrappingRegion>) {
        let index = self.nodes.len();
        self.nodes.push(Node { index, kind, attracting_type: t, support, region, diagnostics: vec![] });
    }

    fn nested(&self, inner: Interval, outer: Interval) -> bool {
        let t = self.cfg.tol_geom;
        inner.lo > outer.lo + t && inner.hi < outer.hi - t
    }

    fn valid_region(&self, gamma: &Cycle, period: usize, parent: Interval) -> Option<TrappingRegion> {
        let tol = self.cfg.tol_geom;
        let reg = region::build_region(self.m, gamma, period, tol)?;
        (region::validate(self.m, &reg, tol).is_ok() && self.nested(reg.j1(), parent)).then_some(reg)
    }

    /// Interior fixed point of `f^r` on `parent`.
    fn internal_fixed_point(&self, parent: Interval, r: usize) -> Option<Cycle> {
        let m = self.m;
        let edge = 1e-7 * (m.b - m.a);
        let roots = orbit::periodic_roots(m, r, parent.lo, parent.hi, self.cfg);
        roots
            .into_iter()
            .filter(|&x| x - parent.lo > edge && parent.hi - x > edge)
            .filter(|&x| (1..r).all(|k| (m.iter_n(x, k) - x).abs() > self.cfg.tol_geom))
            .max_by(|x, y| {
                let dx = (x - parent.lo).min(parent.hi - x);
                let dy = (y - parent.lo).min(parent.hi - y);
                dx.total_cmp(&dy)
            })
            .map(|x| Cycle::from_point(m, x, r, self.cfg))
    }

    /// Widest valid regular region whose boundary cycle has period `s * r`.
    fn find_window(&self, parent: Interval, r: usize, extra: &[usize], notes: &mut Vec<String>) -> Option<TrappingRegion> {
        let mut ss: Vec<usize> =
            (3..=self.cfg.window_max).filter(|s| s * r <= self.cfg.max_period).collect();
        for &s in extra {
            if s >= 3 && s * r <= self.cfg.max_period && !ss.contains(&s) {
                ss.push(s);
            }
        }
        let mut best: Option<TrappingRegion> = None;
        for s in ss {
            let Some(cycles) = orbit::find_cycles_resolved(self.m, s * r, parent.lo, parent.hi, self.cfg) else {
                notes.push(format!("period {} unresolved by the root scan; skipped in window search", s * r));
                continue;
            };
            for cyc in cycles {
                if cyc.multiplier < 1.0 - 1e-4 {
                    continue;
                }
                if let Some(reg) = self.valid_region(&cyc, s * r, parent) {
                    if best.as_ref().map_or(true, |b| reg.j1().len() > b.j1().len()) {
                        best = Some(reg);
                    }
                }
            }
        }
        best
    }

    fn cantor_support(&self, parent: Interval, r: usize, reg: &TrappingRegion) -> CantorSupport {
        let part = ItineraryPartition::new(self.m, parent, r, reg, self.cfg.tol_geom);
        CantorSupport::build(self.m, part, self.cfg.cantor_depth, self.cfg.tol_geom)
    }

    fn run(mut self, max_depth: usize) -> Result<Tower> {
        let m = self.m;
        let cfg = self.cfg;
        let mut endpoint = Cycle::from_point(m, m.a, 1, cfg);
        endpoint.points = vec![m.a];
        endpoint.orbit = vec![m.a];
        if !endpoint.is_repelling() {
            self.push(NodeKind::Attracting, Some(AttractorType::A1), Support::Cycle(endpoint), None);
            return Ok(self.finish(false));
        }
        let whole = TrappingRegion::whole(m, endpoint.clone());
        self.push(NodeKind::FixedEndpoint, None, Support::Cycle(endpoint), Some(whole));

        let mut parent = Interval::new(m.a, m.b);
        let mut r = 1usize;
        loop {
            if self.nodes.len() >= max_depth {
                let set = bands_for_period(m, r);
                self.push(NodeKind::Attracting, Some(AttractorType::A3), Support::Approx { set }, None);
                let last = self.nodes.last_mut().unwrap();
                last.diagnostics.push(format!("truncated at depth {max_depth}; support is an outer bound"));
                return Ok(self.finish(true));
            }
            let Some(mut xbar) = self.internal_fixed_point(parent, r) else {
                return Err(Error::Classification {
                    depth: self.nodes.len(),
                    reason: format!("no interior fixed point of f^{r} on [{}, {}]", parent.lo, parent.hi),
                });
            };
            if xbar.multiplier.abs() <= 1.0 + cfg.tol_stab {
                orbit::mark_one_sided(m, &mut xbar, cfg, cfg.tol_stab);
                let t = attractor::periodic_type(&xbar);
                self.push(NodeKind::Attracting, Some(t), Support::Cycle(xbar), None);
                return Ok(self.finish(false));
            }
            if let Some(reg) = self.valid_region(&xbar, 2 * r, parent) {
                let j1 = reg.j1();
                self.push(NodeKind::RepellingCycle, None, Support::Cycle(xbar), Some(reg));
                parent = j1;
                r *= 2;
                continue;
            }
            let detected = attractor::detect(m, cfg.transient, cfg.samples, cfg);
            let extra: Vec<usize> = match &detected {
                Some(Detected::Periodic(c)) if c.period % r == 0 => vec![c.period / r],
                Some(Detected::Bands { period, .. }) if period % r == 0 => vec![period / r],
                _ => vec![],
            };
            let mut notes = vec![];
            let window = self.find_window(parent, r, &extra, &mut notes);
            if let Some(reg) = window {
                let neutral = (reg.gamma.multiplier - 1.0).abs() <= 1e-4;
                let support = self.cantor_support(parent, r, &reg);
                if neutral {
                    let mut g = reg.gamma.clone();
                    orbit::mark_one_sided(m, &mut g, cfg, 1e-4);
                    if g.stability == Stability::OneSided {
                        self.push(NodeKind::Attracting, Some(AttractorType::A4), Support::Cantor(support), Some(reg));
                        self.nodes.last_mut().unwrap().diagnostics.extend(notes);
                        self.nodes.last_mut().unwrap().diagnostics.push(format!(
                            "one-sided cycle of period {} with multiplier {}",
                            g.period, g.multiplier
                        ));
                        return Ok(self.finish(false));
                    }
                }
                let j1 = reg.j1();
                r = reg.period;
                self.push(NodeKind::Cantor, None, Support::Cantor(support), Some(reg));
                self.nodes.last_mut().unwrap().diagnostics.extend(notes);
                parent = j1;
                continue;
            }
            match detected {
                Some(Detected::Periodic(c)) => {
                    let t = attractor::periodic_type(&c);
                    let note = format!("attracting cycle of period {} found without its window", c.period);
                    self.push(NodeKind::Attracting, Some(t), Support::Cycle(c), None);
                    if t == AttractorType::A1 {
                        self.nodes.last_mut().unwrap().diagnostics.push(note);
                    }
                }
                Some(Detected::Bands { period, .. }) => {
                    let q = if period % r == 0 { r } else { period };
                    let set = bands_for_period(m, q);
                    self.push_bands(set, q);
                }
                None => {
                    return Err(Error::Classification {
                        depth: self.nodes.len(),
                        reason: "attractor neither periodic nor banded".into(),
                    })
                }
            }
            self.nodes.last_mut().unwrap().diagnostics.extend(notes);
            return Ok(self.finish(false));
        }
    }

    /// Band attractor, merged with the preceding Cantor node when they share a cycle point.
    fn push_bands(&mut self, set: IntervalSet, q: usize) {
        let tol = self.cfg.tol_geom.max(1e-8);
        let touching = self.nodes.last().and_then(|prev| {
            let reg = prev.region.as_ref()?;
            (prev.kind == NodeKind::Cantor).then_some(())?;
            let hit = set
                .pieces()
                .iter()
                .any(|p| reg.gamma.points.iter().any(|&g| (g - p.lo).abs() <= tol || (g - p.hi).abs() <= tol));
            hit.then(|| prev.set())
        });
        match touching {
            Some(cantor_set) => {
                let prev = self.nodes.pop().unwrap();
                let nonwandering = set.union(&cantor_set);
                let hull = IntervalSet::closed(nonwandering.min().unwrap(), nonwandering.max().unwrap());
                let wandering = hull.difference(&nonwandering);
                self.nodes.push(Node {
                    index: prev.index,
                    kind: NodeKind::Attracting,
                    attracting_type: Some(AttractorType::A5),
                    support: Support::Merged { nonwandering, wandering },
                    region: prev.region,
                    diagnostics: vec![format!("bands of period {q} touch the Cantor node's cycle")],
                });
            }
            None => self.push(NodeKind::Attracting, Some(AttractorType::A2), Support::Bands { set, period: q }, None),
        }
    }

    fn finish(self, truncated: bool) -> Tower {
        Tower { schema_version: SCHEMA_VERSION, map: self.m.spec(), nodes: self.nodes, truncated }
    }
}

/// Builds the tower with `cfg.max_depth`.
pub fn build_tower(m: &UnimodalMap, cfg: &Settings) -> Result<Tower> {
    build_tower_depth(m, cfg.max_depth, cfg)
}

pub fn build_tower_depth(m: &UnimodalMap, max_depth: usize, cfg: &Settings) -> Result<Tower> {
    if max_depth == 0 {
        return Err(Error::Degenerate("max_depth must be at least 1".into()));
    }
    Builder { m, cfg, nodes: vec![] }.run(max_depth)
}

/// Standalone attractor search from the critical orbit.
pub fn find_attractor(m: &UnimodalMap, transient: usize, samples: usize, cfg: &Settings) -> Result<Node> {
    let (t, support) = match attractor::detect(m, transient.max(1), samples.max(1), cfg) {
        Some(Detected::Periodic(c)) => (attractor::periodic_type(&c), Support::Cycle(c)),
        Some(Detected::Bands { set, period }) => (AttractorType::A2, Support::Bands { set, period }),
        None => {
            return Err(Error::Classification { depth: 0, reason: "no cycle or band structure detected".into() })
        }
    };
    Ok(Node { index: 0, kind: NodeKind::Attracting, attracting_type: Some(t), support, region: None, diagnostics: vec![] })
}
