//! S-unimodal maps: evaluation, critical orbit, preimages and the hat involution.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::roots;

pub const TOL_ROOT: f64 = 1e-12;

/// A parameterised family of interval maps.
pub trait Family: Send + Sync {
    fn id(&self) -> &str;
    fn eval(&self, mu: f64, x: f64) -> f64;
    fn domain(&self, _mu: f64) -> (f64, f64) {
        (0.0, 1.0)
    }
    /// Analytic derivative, when known.
    fn deriv(&self, _mu: f64, _x: f64) -> Option<f64> {
        None
    }
    /// Analytic critical point, when known.
    fn critical_point(&self, _mu: f64) -> Option<f64> {
        None
    }
    /// Closed-form inverse of the left (`right == false`) or right branch at a
    /// value `y` strictly inside the branch range.
    fn branch_inverse(&self, _mu: f64, _y: f64, _right: bool) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Logistic;

impl Family for Logistic {
    fn id(&self) -> &str {
        "logistic"
    }
    fn eval(&self, mu: f64, x: f64) -> f64 {
        mu * x * (1.0 - x)
    }
    fn deriv(&self, mu: f64, x: f64) -> Option<f64> {
        Some(mu * (1.0 - 2.0 * x))
    }
    fn critical_point(&self, _mu: f64) -> Option<f64> {
        Some(0.5)
    }
    fn branch_inverse(&self, mu: f64, y: f64, right: bool) -> Option<f64> {
        let disc = (1.0 - 4.0 * y / mu).max(0.0);
        // Cancellation-free form of (1 - sqrt(disc)) / 2.
        let left = 2.0 * y / mu / (1.0 + disc.sqrt());
        Some(if right { 1.0 - left } else { left })
    }
}

/// `mu * sin(pi x)` on [0, 1], S-unimodal for 0 < mu <= 1.
#[derive(Debug, Clone, Copy)]
pub struct Sine;

impl Family for Sine {
    fn id(&self) -> &str {
        "sine"
    }
    fn eval(&self, mu: f64, x: f64) -> f64 {
        mu * (std::f64::consts::PI * x).sin()
    }
    fn deriv(&self, mu: f64, x: f64) -> Option<f64> {
        let pi = std::f64::consts::PI;
        Some(mu * pi * (pi * x).cos())
    }
    fn critical_point(&self, _mu: f64) -> Option<f64> {
        Some(0.5)
    }
}

/// Tent map `mu * min(x, 1 - x)`: unimodal but not smooth at the turning point.
#[derive(Debug, Clone, Copy)]
pub struct Tent;

impl Family for Tent {
    fn id(&self) -> &str {
        "tent"
    }
    fn eval(&self, mu: f64, x: f64) -> f64 {
        mu * x.min(1.0 - x)
    }
}

/// Map families keyed by id.
#[derive(Clone)]
pub struct Registry {
    families: BTreeMap<String, Arc<dyn Family>>,
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry { families: BTreeMap::new() };
        r.register(Arc::new(Logistic));
        r.register(Arc::new(Sine));
        r.register(Arc::new(Tent));
        r
    }
}

impl Registry {
    pub fn register(&mut self, f: Arc<dyn Family>) {
        self.families.insert(f.id().to_string(), f);
    }
    pub fn get(&self, id: &str) -> Result<Arc<dyn Family>> {
        self.families.get(id).cloned().ok_or_else(|| Error::UnknownFamily(id.to_string()))
    }
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.families.keys().map(String::as_str)
    }
}

/// Which monotone branch of the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Left,
    Right,
}

/// A unimodal map `f` on `[a, b]` with turning point `c` (a maximum).
#[derive(Clone)]
pub struct UnimodalMap {
    family: Arc<dyn Family>,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    c1: f64,
}

impl fmt::Debug for UnimodalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnimodalMap")
            .field("family", &self.family.id())
            .field("mu", &self.mu)
            .field("domain", &(self.a, self.b))
            .field("c", &self.c)
            .finish()
    }
}

/// Serializable description of a map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub family: String,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalOrbit {
    /// `values[k - 1] = c_k = f^k(c)`.
    pub values: Vec<f64>,
}

impl CriticalOrbit {
    /// `c_k`, with `c_0 = c` not stored; `k >= 1`.
    pub fn get(&self, k: usize) -> f64 {
        self.values[k - 1]
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SUnimodalReport {
    pub pass: bool,
    pub violation: Option<String>,
    pub at: Option<f64>,
}

impl UnimodalMap {
    pub fn new(family: Arc<dyn Family>, mu: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidMap(format!("parameter {mu} is not finite")));
        }
        let (a, b) = family.domain(mu);
        if !(a < b) {
            return Err(Error::InvalidMap(format!("empty domain [{a}, {b}]")));
        }
        let c = match family.critical_point(mu) {
            Some(c) => c,
            None => roots::golden_max(|x| family.eval(mu, x), a, b, 1e-13),
        };
        if !(a < c && c < b) {
            return Err(Error::InvalidMap(format!("critical point {c} not interior")));
        }
        let c1 = family.eval(mu, c);
        if c1 > b + 1e-12 || family.eval(mu, a) < a - 1e-12 {
            return Err(Error::InvalidMap(format!(
                "parameter {mu} does not map [{a}, {b}] into itself"
            )));
        }
        Ok(UnimodalMap { family, mu, a, b, c, c1 })
    }

    pub fn logistic(mu: f64) -> Result<Self> {
        Self::new(Arc::new(Logistic), mu)
    }

    pub fn from_spec(reg: &Registry, spec: &MapSpec) -> Result<Self> {
        Self::new(reg.get(&spec.family)?, spec.mu)
    }

    pub fn spec(&self) -> MapSpec {
        MapSpec { family: self.family.id().to_string(), mu: self.mu }
    }

    pub fn family_id(&self) -> &str {
        self.family.id()
    }

    /// Same family at another parameter.
    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.family.clone(), mu)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        // Clamp rounding spill so orbits never leave the domain.
        self.family.eval(self.mu, x).clamp(self.a, self.b)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        if let Some(d) = self.family.deriv(self.mu, x) {
            return d;
        }
        let h = 1e-6 * (self.b - self.a);
        let lo = (x - h).max(self.a);
        let hi = (x + h).min(self.b);
        (self.family.eval(self.mu, hi) - self.family.eval(self.mu, lo)) / (hi - lo)
    }

    pub fn has_analytic_deriv(&self) -> bool {
        self.family.deriv(self.mu, self.c).is_some()
    }

    /// `f(c)`, the maximum of the map.
    pub fn critical_value(&self) -> f64 {
        self.c1
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain { x, a: self.a, b: self.b })
        }
    }

    /// `f^n(x)`.
    pub fn iterate(&self, x: f64, n: usize) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.iter_n(x, n))
    }

    /// `f^n(x)` without the domain check.
    #[inline]
    pub fn iter_n(&self, mut x: f64, n: usize) -> f64 {
        for _ in 0..n {
            x = self.eval(x);
        }
        x
    }

    /// `(f^n)'(x)` by the chain rule.
    pub fn deriv_n(&self, mut x: f64, n: usize) -> f64 {
        let mut d = 1.0;
        for _ in 0..n {
            d *= self.deriv(x);
            x = self.eval(x);
        }
        d
    }

    pub fn critical_orbit(&self, n: usize) -> CriticalOrbit {
        let mut values = Vec::with_capacity(n);
        let mut x = self.c;
        for _ in 0..n {
            x = self.eval(x);
            values.push(x);
        }
        CriticalOrbit { values }
    }

    /// The other solution of `f(x) = f(p)`.
    pub fn hat_point(&self, p: f64) -> Result<f64> {
        self.check_domain(p)?;
        if p == self.c {
            return Err(Error::Degenerate("hat point of the critical point".into()));
        }
        let y = self.eval(p);
        Ok(if p < self.c {
            self.inverse(y, Branch::Right)
        } else {
            self.inverse(y, Branch::Left)
        })
    }

    /// Hat involution that maps `c` to itself instead of failing.
    pub fn hat(&self, p: f64) -> f64 {
        if p == self.c {
            p
        } else {
            self.hat_point(p.clamp(self.a, self.b)).unwrap_or(p)
        }
    }

    /// Inverse of one monotone branch, clipped: values above `f(c)` map to `c`,
    /// values below the branch's endpoint image map to that endpoint.
    pub fn inverse(&self, y: f64, branch: Branch) -> f64 {
        let (end, right) = match branch {
            Branch::Left => (self.a, false),
            Branch::Right => (self.b, true),
        };
        if y >= self.c1 {
            return self.c;
        }
        let fend = self.family.eval(self.mu, end);
        if y <= fend {
            return end;
        }
        if let Some(x) = self.family.branch_inverse(self.mu, y, right) {
            return if right { x.clamp(self.c, self.b) } else { x.clamp(self.a, self.c) };
        }
        let (lo, hi) = if right { (self.c, self.b) } else { (self.a, self.c) };
        let g = |x: f64| self.family.eval(self.mu, x) - y;
        let r = if self.has_analytic_deriv() {
            roots::newton_bracketed(g, |x| self.deriv(x), lo, hi, TOL_ROOT)
        } else {
            roots::bisect(g, lo, hi, TOL_ROOT)
        };
        r.unwrap_or(if right { hi } else { lo })
    }

    /// All `x` with `f(x) = y`, ascending.
    pub fn preimages(&self, y: f64) -> Vec<f64> {
        if !self.contains(y) || y > self.c1 + TOL_ROOT {
            return vec![];
        }
        if (y - self.c1).abs() <= TOL_ROOT {
            return vec![self.c];
        }
        let mut out = Vec::with_capacity(2);
        if y >= self.family.eval(self.mu, self.a) {
            out.push(self.inverse(y, Branch::Left));
        }
        if y >= self.family.eval(self.mu, self.b) {
            out.push(self.inverse(y, Branch::Right));
        }
        out
    }

    /// Schwarzian derivative from the first derivative by central differences.
    pub fn schwarzian(&self, x: f64) -> f64 {
        let h = 1e-4 * (self.b - self.a);
        let d0 = self.deriv(x);
        let dp = self.deriv(x + h);
        let dm = self.deriv(x - h);
        let d2 = (dp - dm) / (2.0 * h);
        let d3 = (dp - 2.0 * d0 + dm) / (h * h);
        d3 / d0 - 1.5 * (d2 / d0).powi(2)
    }

    /// Samples monotonicity, endpoint conditions and the Schwarzian sign.
    pub fn check_sunimodal(&self, grid_n: usize) -> SUnimodalReport {
        let fail = |msg: &str, at: f64| SUnimodalReport {
            pass: false,
            violation: Some(msg.to_string()),
            at: Some(at),
        };
        let grid_n = grid_n.max(3);
        let fa = self.family.eval(self.mu, self.a);
        let fb = self.family.eval(self.mu, self.b);
        let scale = self.b - self.a;
        if (fa - fb).abs() > 1e-9 * scale {
            return fail("f(a) != f(b)", self.a);
        }
        if (fa - self.a).abs() > 1e-9 * scale && (fb - self.b).abs() > 1e-9 * scale {
            return fail("neither endpoint is fixed", self.a);
        }
        let h = 1e-4 * scale;
        let xs: Vec<f64> =
            (0..grid_n).map(|i| self.a + scale * i as f64 / (grid_n - 1) as f64).collect();
        for w in xs.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            let (y0, y1) = (self.family.eval(self.mu, x0), self.family.eval(self.mu, x1));
            if x1 <= self.c && y1 <= y0 {
                return fail("not increasing left of c", x0);
            }
            if x0 >= self.c && y1 >= y0 {
                return fail("not decreasing right of c", x0);
            }
        }
        for &x in &xs {
            if (x - self.c).abs() < 4.0 * h || x - self.a < 2.0 * h || self.b - x < 2.0 * h {
                continue;
            }
            let s = self.schwarzian(x);
            if !(s < 0.0) {
                return fail("Schwarzian derivative not negative", x);
            }
        }
        SUnimodalReport { pass: true, violation: None, at: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn lg(mu: f64) -> UnimodalMap {
        UnimodalMap::logistic(mu).unwrap()
    }

    #[test]
    fn iterate_examples() {
        let m = lg(3.2);
        assert_abs_diff_eq!(m.iterate(0.5, 1).unwrap(), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(m.iterate(0.5, 2).unwrap(), 0.512, epsilon = 1e-15);
        assert_eq!(m.iterate(0.37, 0).unwrap(), 0.37);
        assert!(matches!(m.iterate(1.5, 1), Err(Error::Domain { .. })));
    }

    #[test]
    fn critical_orbit_examples() {
        let o = lg(3.2).critical_orbit(2);
        assert_abs_diff_eq!(o.get(1), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(o.get(2), 0.512, epsilon = 1e-15);
        assert_eq!(lg(4.0).critical_orbit(3).values, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn hat_point_logistic() {
        let m = lg(3.5);
        assert_abs_diff_eq!(m.hat_point(0.2).unwrap(), 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(m.hat_point(0.8).unwrap(), 0.2, epsilon = 1e-12);
        assert!(m.hat_point(0.5).is_err());
        assert!((m.hat_point(0.5 - 1e-9).unwrap() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn preimage_examples() {
        let m = lg(3.2);
        assert!(m.preimages(0.9).is_empty());
        assert_eq!(m.preimages(0.8), vec![0.5]);
        let p = m.preimages(0.0);
        assert_eq!(p.len(), 2);
        assert_abs_diff_eq!(p[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn numeric_family_matches_closed_form() {
        // The sine family has no closed-form inverse, exercising the root search.
        let m = UnimodalMap::new(Arc::new(Sine), 0.9).unwrap();
        for &y in &[0.05, 0.3, 0.7, 0.89] {
            for x in m.preimages(y) {
                assert!((m.eval(x) - y).abs() < 1e-11);
            }
        }
        let reg = Registry::default();
        let m2 = UnimodalMap::from_spec(&reg, &MapSpec { family: "sine".into(), mu: 0.9 }).unwrap();
        assert_eq!(m2.family_id(), "sine");
        assert!(reg.get("nope").is_err());
    }

    #[test]
    fn golden_section_finds_turning_point() {
        struct Shifted;
        impl Family for Shifted {
            fn id(&self) -> &str {
                "shifted"
            }
            fn eval(&self, mu: f64, x: f64) -> f64 {
                mu * x * (1.0 - x) * (1.0 + 0.0 * x)
            }
        }
        let m = UnimodalMap::new(Arc::new(Shifted), 3.0).unwrap();
        assert!((m.c - 0.5).abs() < 1e-7);
        // finite-difference derivative
        assert!((m.deriv(0.25) - 1.5).abs() < 1e-6);
    }

    #[test]
    fn sunimodal_checks() {
        assert!(lg(3.5).check_sunimodal(1001).pass);
        assert!(lg(3.2).check_sunimodal(101).pass);
        assert!(UnimodalMap::new(Arc::new(Sine), 0.8).unwrap().check_sunimodal(501).pass);
        let tent = UnimodalMap::new(Arc::new(Tent), 1.8).unwrap();
        let r = tent.check_sunimodal(1001);
        assert!(!r.pass);
        assert!(r.violation.is_some());
    }

    #[test]
    fn schwarzian_logistic_closed_form() {
        let m = lg(3.5);
        for &x in &[0.1, 0.3, 0.7, 0.9] {
            let exact = -6.0 / (1.0 - 2.0 * x) * 1.0 / (1.0 - 2.0 * x);
            assert!((m.schwarzian(x) - exact).abs() < 1e-4 * exact.abs());
        }
    }

    proptest! {
        #[test]
        fn hat_is_involution(mu in 2.5f64..4.0, p in 0.0f64..1.0) {
            prop_assume!((p - 0.5).abs() > 1e-6);
            let m = lg(mu);
            let back = m.hat_point(m.hat_point(p).unwrap()).unwrap();
            prop_assert!((back - p).abs() < 2e-12 + 1e-10 * (1.0 / (p - 0.5).abs()).min(1.0));
        }

        #[test]
        fn preimage_consistency(mu in 2.5f64..4.0, x in 0.0f64..1.0) {
            let m = lg(mu);
            let pre = m.preimages(m.eval(x));
            prop_assert!(pre.iter().any(|&p| (p - x).abs() < 1e-7 || (m.eval(p) - m.eval(x)).abs() < 1e-12));
        }

        #[test]
        fn iterate_composes(mu in 2.5f64..4.0, x in 0.0f64..1.0, n in 0usize..20, k in 0usize..20) {
            let m = lg(mu);
            prop_assert_eq!(m.iterate(x, n + k).unwrap(), m.iterate(m.iterate(x, n).unwrap(), k).unwrap());
        }
    }
}
