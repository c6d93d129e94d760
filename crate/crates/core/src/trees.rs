//! Tree bases: `S(T,t)` is again a tree, and its distances, extreme-vertex
//! eccentricities, diameter and radius have closed forms in terms of `T`.
//!
//! The eccentricity, diameter and radius formulas assume order at least 3.
//! `S(K2,t)` is the path on `2^t` vertices; [`two_vertex_metrics`] covers it.

use crate::error::{Error, Result};
use crate::graph::{BaseGraph, Metric, Vertex};
use crate::recursive::ExtremeDistances;
use crate::word::{common_prefix_len, Word, MAX_LEVEL};

/// A base graph known to be a tree, with its eccentricities cached.
#[derive(Debug, Clone)]
pub struct TreeBase<'g> {
    graph: &'g BaseGraph,
    eccentricity: Vec<u64>,
    diameter: u64,
}

/// Diameter, radius and extreme-vertex eccentricity of one `S(T,t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelMetrics {
    pub diameter: u64,
    pub radius: u64,
    pub extreme_eccentricity: u64,
}

fn check_level(t: usize) -> Result<()> {
    if t == 0 || t > MAX_LEVEL {
        return Err(Error::InvalidWord(format!(
            "level {t} outside 1..={MAX_LEVEL}"
        )));
    }
    Ok(())
}

fn narrow(value: i128, level: usize) -> Result<u64> {
    u64::try_from(value).map_err(|_| Error::Overflow { level })
}

/// `S(K2,t)` is the path `P_{2^t}`.
pub fn two_vertex_metrics(t: usize) -> Result<LevelMetrics> {
    check_level(t)?;
    let order = 1u64 << t;
    Ok(LevelMetrics {
        diameter: order - 1,
        radius: order / 2,
        extreme_eccentricity: order - 1,
    })
}

/// `d(x xs, y ys)` on a tree with `|xs| = |ys| = rest >= 1`. The path is
/// unique, so only the neighbor of `x` toward `y` and of `y` toward `x`
/// matter; everything but `d(y'^L, ys)` is fixed by the first word.
pub(crate) struct TreePathPlan {
    fixed: u128,
    y_next: Vertex,
}

impl TreePathPlan {
    /// `from_x(u)` must return `d(u^L, xs)` with `L = rest`.
    pub(crate) fn new(
        metric: &Metric,
        x: Vertex,
        y: Vertex,
        rest: usize,
        mut from_x: impl FnMut(Vertex) -> u128,
    ) -> Self {
        let d = metric.dist(x, y) as u128;
        let x_next = metric.nu(y, x)[0];
        let y_next = metric.nu(x, y)[0];
        let fixed = from_x(x_next) + ((1u128 << (rest + 1)) - 1) * d - 2 * ((1u128 << rest) - 1);
        Self { fixed, y_next }
    }

    /// `from_y(v)` must return `d(v^L, ys)`.
    #[inline]
    pub(crate) fn eval(&self, mut from_y: impl FnMut(Vertex) -> u128) -> u128 {
        self.fixed + from_y(self.y_next)
    }
}

impl<'g> TreeBase<'g> {
    pub fn new(graph: &'g BaseGraph) -> Result<Self> {
        if !graph.is_tree() {
            return Err(Error::not_applicable("base graph is not a tree"));
        }
        let eccentricity: Vec<u64> = (0..graph.order())
            .map(|v| graph.eccentricity(v).expect("trees are connected"))
            .collect();
        let diameter = eccentricity.iter().copied().max().unwrap_or(0);
        Ok(Self {
            graph,
            eccentricity,
            diameter,
        })
    }

    pub fn graph(&self) -> &'g BaseGraph {
        self.graph
    }

    pub fn eccentricity(&self, u: Vertex) -> u64 {
        self.eccentricity[u]
    }

    /// `D(T)`.
    pub fn diameter(&self) -> u64 {
        self.diameter
    }

    /// `r(T) = ceil(D(T) / 2)`.
    pub fn radius(&self) -> u64 {
        self.diameter.div_ceil(2)
    }

    fn require_order_three(&self) -> Result<()> {
        if self.graph.order() < 3 {
            return Err(Error::not_applicable(
                "closed forms need a tree of order at least 3; S(K2,t) is a path",
            ));
        }
        Ok(())
    }

    /// Distance in `S(T,t)` along the unique path: after the common prefix,
    /// only the neighbors `x'`, `y'` of the first differing letters toward
    /// each other matter.
    pub fn dist(&self, a: &Word, b: &Word) -> Result<u64> {
        if self.graph.order() < 2 {
            return Err(Error::not_applicable(
                "tree must have at least two vertices",
            ));
        }
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        a.check_alphabet(self.graph.order())?;
        b.check_alphabet(self.graph.order())?;
        let (la, lb) = (a.letters(), b.letters());
        let k = common_prefix_len(la, lb);
        if k == la.len() {
            return Ok(0);
        }
        let (x, y) = (la[k], lb[k]);
        let metric = self.graph.metric();
        if k + 1 == la.len() {
            return Ok(metric.dist(x, y) as u64);
        }
        let (xs, ys) = (&la[k + 1..], &lb[k + 1..]);
        let mut from_x = ExtremeDistances::new(metric, xs);
        let mut from_y = ExtremeDistances::new(metric, ys);
        let plan = TreePathPlan::new(metric, x, y, xs.len(), |u| from_x.dist_to_suffix(u));
        let value = plan.eval(|v| from_y.dist_to_suffix(v));
        u64::try_from(value).map_err(|_| Error::Overflow { level: la.len() })
    }

    /// `eps(u^t) = (2^t - 1) eps(u) + (2^t - t - 1)(D(T) - 2)`.
    pub fn extreme_eccentricity(&self, u: Vertex, t: usize) -> Result<u64> {
        self.require_order_three()?;
        self.graph.check_vertex(u)?;
        check_level(t)?;
        let p = 1i128 << t;
        let t = t as i128;
        let value =
            (p - 1) * self.eccentricity[u] as i128 + (p - t - 1) * (self.diameter as i128 - 2);
        narrow(value, t as usize)
    }

    /// `D(S(T,t)) = (3 * 2^t - 2t - 3) D(T) - 4(2^t - t - 1)`.
    pub fn sierpinski_diameter(&self, t: usize) -> Result<u64> {
        self.require_order_three()?;
        check_level(t)?;
        narrow(self.diameter_numerator(t), t)
    }

    fn diameter_numerator(&self, t: usize) -> i128 {
        let p = 1i128 << t;
        let ti = t as i128;
        (3 * p - 2 * ti - 3) * self.diameter as i128 - 4 * (p - ti - 1)
    }

    /// Radius of `S(T,t)`: half the diameter, rounded up. Both parity
    /// branches are checked for integrality before halving.
    pub fn sierpinski_radius(&self, t: usize) -> Result<u64> {
        self.require_order_three()?;
        check_level(t)?;
        let p = 1i128 << t;
        let ti = t as i128;
        let coefficient = (3 * p - 2 * ti - 3) * self.diameter as i128;
        let doubled = if self.diameter.is_multiple_of(2) {
            coefficient - 4 * (p - ti - 1)
        } else {
            coefficient - 4 * p + 4 * ti + 5
        };
        assert!(doubled % 2 == 0, "radius numerator {doubled} is odd");
        narrow(doubled / 2, t)
    }

    /// All three closed forms at once, routing order-2 trees to the path case.
    pub fn level_metrics(&self, extreme: Vertex, t: usize) -> Result<LevelMetrics> {
        if self.graph.order() == 2 {
            self.graph.check_vertex(extreme)?;
            return two_vertex_metrics(t);
        }
        Ok(LevelMetrics {
            diameter: self.sierpinski_diameter(t)?,
            radius: self.sierpinski_radius(t)?,
            extreme_eccentricity: self.extreme_eccentricity(extreme, t)?,
        })
    }
}
