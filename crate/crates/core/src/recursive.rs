//! Distances in `S(G,t)` computed from the base graph alone.
//!
//! Every routine here splits the two words at their first differing letter
//! (a common prefix never changes the distance), then combines base-graph
//! distances with distances from extreme vertices of lower levels. Nothing is
//! ever materialized, so levels far beyond the oracle's reach are fine.
//!
//! Internal arithmetic is done in `u128`; results that do not fit in `u64`
//! come back as [`Error::Overflow`].

use std::fmt;

use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};
use crate::graph::{BaseGraph, Metric, PairPaths, Vertex};
use crate::oracle::{build_sierpinski, DEFAULT_BUDGET};
use crate::trees::TreeBase;
use crate::word::{common_prefix_len, Word, MAX_LEVEL};

/// Which formula produced a distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ExtremeExtreme,
    Algorithm1,
    CompleteClosedForm,
    Algorithm2,
    Bipartite,
    Conditional,
    TreePath,
    PrefixReduction,
    OracleFallback,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::ExtremeExtreme => "extreme-extreme",
            Method::Algorithm1 => "algorithm-1",
            Method::CompleteClosedForm => "complete-closed-form",
            Method::Algorithm2 => "algorithm-2",
            Method::Bipartite => "bipartite",
            Method::Conditional => "conditional",
            Method::TreePath => "tree-path",
            Method::PrefixReduction => "lemma-1-reduction",
            Method::OracleFallback => "oracle-fallback",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A distance and how it was obtained.
///
/// `lambda`/`theta` are filled whenever the shortest-path branch was
/// evaluated; `lambda_prime`/`theta_prime` only by the triangle-free
/// recursion, and stay `None` when there is no path of length `d + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub distance: u64,
    pub method: Method,
    pub lambda: Option<u64>,
    pub lambda_prime: Option<u64>,
    pub theta: Option<u64>,
    pub theta_prime: Option<u64>,
}

impl QueryResult {
    fn plain(distance: u64, method: Method) -> Self {
        Self {
            distance,
            method,
            lambda: None,
            lambda_prime: None,
            theta: None,
            theta_prime: None,
        }
    }
}

/// Knobs for [`best_dist`].
#[derive(Debug, Clone, Copy)]
pub struct DistOptions {
    /// Materialize `S(G,t)` when no formula applies.
    pub allow_oracle_fallback: bool,
    /// Caller vouches for the long-path premiss of the conditional formula.
    pub assert_premiss_b: bool,
    /// Vertex budget for the fallback.
    pub budget: u64,
}

impl Default for DistOptions {
    fn default() -> Self {
        Self {
            allow_oracle_fallback: false,
            assert_premiss_b: false,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[inline]
fn pow2(k: usize) -> u128 {
    1u128 << k
}

fn narrow(value: u128, level: usize) -> Result<u64> {
    u64::try_from(value).map_err(|_| Error::Overflow { level })
}

/// Distances `d(v^L, z)` for one fixed word `z` of level `L`, memoized on
/// `(v, start of the remaining suffix)` so the branching over geodesic
/// neighbors never re-expands a suffix.
pub(crate) struct ExtremeDistances<'a> {
    metric: &'a Metric,
    z: &'a [Vertex],
    memo: SmallVec<[u128; 64]>,
}

const UNKNOWN: u128 = u128::MAX;

impl<'a> ExtremeDistances<'a> {
    pub(crate) fn new(metric: &'a Metric, z: &'a [Vertex]) -> Self {
        Self {
            metric,
            z,
            memo: smallvec![UNKNOWN; metric.order() * z.len()],
        }
    }

    /// `d(x^L, z)`.
    pub(crate) fn dist_to_suffix(&mut self, x: Vertex) -> u128 {
        self.solve(x, 0)
    }

    fn solve(&mut self, x: Vertex, start: usize) -> u128 {
        let metric = self.metric;
        let key = start * metric.order() + x;
        if self.memo[key] != UNKNOWN {
            return self.memo[key];
        }
        let last = self.z.len() - 1;
        let mut j = start;
        while j < last && self.z[j] == x {
            j += 1;
        }
        let zj = self.z[j];
        let d = metric.dist(x, zj) as u128;
        let value = if j == last {
            d
        } else {
            let rest = last - j;
            let mut best = UNKNOWN;
            for &v in metric.nu(x, zj) {
                best = best.min(self.solve(v, j + 1));
            }
            // (2^(rest+1) - 1) d - (2^rest - 1) >= 0 since d >= 1
            best + (pow2(rest + 1) - 1) * d - (pow2(rest) - 1)
        };
        self.memo[key] = value;
        value
    }
}

pub(crate) fn extreme_to_suffix(metric: &Metric, x: Vertex, z: &[Vertex]) -> u128 {
    ExtremeDistances::new(metric, z).dist_to_suffix(x)
}

fn require_connected(g: &BaseGraph) -> Result<()> {
    if g.order() < 2 {
        return Err(Error::not_applicable(
            "base graph must have at least two vertices",
        ));
    }
    if !g.is_connected() {
        return Err(Error::Validation("base graph is disconnected".into()));
    }
    Ok(())
}

fn check_pair(g: &BaseGraph, a: &Word, b: &Word) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    a.check_alphabet(g.order())?;
    b.check_alphabet(g.order())
}

/// `d(x^t, y^t) = (2^t - 1) d_G(x, y)`.
pub fn extreme_extreme_dist(g: &BaseGraph, x: Vertex, y: Vertex, t: usize) -> Result<u64> {
    require_connected(g)?;
    if t == 0 || t > MAX_LEVEL {
        return Err(Error::InvalidWord(format!(
            "level {t} outside 1..={MAX_LEVEL}"
        )));
    }
    let d = g.dist(x, y)? as u128;
    narrow((pow2(t) - 1) * d, t)
}

/// `d(x^t, w)` by the extreme-vertex recursion.
pub fn extreme_to_word(g: &BaseGraph, x: Vertex, w: &Word) -> Result<u64> {
    require_connected(g)?;
    g.check_vertex(x)?;
    w.check_alphabet(g.order())?;
    narrow(extreme_to_suffix(g.metric(), x, w.letters()), w.len())
}

/// Closed form on complete bases: `d(x^t, w) = sum over z_i != x of 2^(t-i)`.
pub fn complete_extreme_to_word(n: usize, x: Vertex, w: &Word) -> Result<u64> {
    if n < 2 {
        return Err(Error::not_applicable(
            "complete base needs at least two vertices",
        ));
    }
    if x >= n {
        return Err(Error::VertexOutOfRange { vertex: x, n });
    }
    w.check_alphabet(n)?;
    let t = w.len();
    let total: u128 = w
        .letters()
        .iter()
        .enumerate()
        .filter(|(_, &z)| z != x)
        .map(|(i, _)| pow2(t - 1 - i))
        .sum();
    narrow(total, t)
}

/// The two words after dropping their common prefix.
enum Split<'a> {
    Equal,
    /// Only the last letters differ.
    Last(Vertex, Vertex),
    /// `x`, `y` are the first differing letters and `xs`, `ys` what follows them.
    Inner {
        x: Vertex,
        y: Vertex,
        xs: &'a [Vertex],
        ys: &'a [Vertex],
    },
}

fn split<'a>(a: &'a [Vertex], b: &'a [Vertex]) -> Split<'a> {
    let k = common_prefix_len(a, b);
    if k == a.len() {
        Split::Equal
    } else if k + 1 == a.len() {
        Split::Last(a[k], b[k])
    } else {
        Split::Inner {
            x: a[k],
            y: b[k],
            xs: &a[k + 1..],
            ys: &b[k + 1..],
        }
    }
}

/// The intermediates of the two-word recursion for one split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct TwoWordTerms {
    pub(crate) lambda: u128,
    pub(crate) lambda_prime: Option<u128>,
    pub(crate) theta: u128,
    pub(crate) theta_prime: Option<u128>,
}

impl TwoWordTerms {
    pub(crate) fn distance(&self) -> u128 {
        self.theta_prime.map_or(self.theta, |tp| self.theta.min(tp))
    }
}

/// The part of the two-word recursion fixed by `x`, `y` and the suffix of
/// the first word: `from_x(u)` is folded into each neighbor pair up front,
/// leaving one lookup per pair for each second word.
pub(crate) struct TwoWordPlan {
    phi: SmallVec<[(u128, Vertex); 8]>,
    phi_prime: SmallVec<[(u128, Vertex); 8]>,
    with_longer_paths: bool,
    scaled: u128,
    repunit_rest: u128,
}

impl TwoWordPlan {
    /// `from_x(u)` must return `d(u^L, xs)` with `L = rest`.
    pub(crate) fn new(
        d: u128,
        rest: usize,
        paths: &PairPaths,
        with_longer_paths: bool,
        mut from_x: impl FnMut(Vertex) -> u128,
    ) -> Self {
        let mut fold = |pairs: &[(Vertex, Vertex)]| -> SmallVec<[(u128, Vertex); 8]> {
            pairs.iter().map(|&(u, v)| (from_x(u), v)).collect()
        };
        let phi = fold(&paths.phi);
        let phi_prime = if with_longer_paths {
            fold(&paths.phi_prime)
        } else {
            SmallVec::new()
        };
        Self {
            phi,
            phi_prime,
            with_longer_paths,
            scaled: (pow2(rest + 1) - 1) * d,
            repunit_rest: pow2(rest) - 1,
        }
    }

    /// `from_y(v)` must return `d(v^L, ys)`.
    #[inline]
    pub(crate) fn eval(&self, mut from_y: impl FnMut(Vertex) -> u128) -> TwoWordTerms {
        let mut pair_minimum =
            |pairs: &[(u128, Vertex)]| pairs.iter().map(|&(fx, v)| fx + from_y(v)).min();
        let lambda = pair_minimum(&self.phi)
            .expect("a shortest path always exists between connected vertices");
        let theta = lambda + self.scaled - 2 * self.repunit_rest;
        let lambda_prime = if self.with_longer_paths {
            pair_minimum(&self.phi_prime)
        } else {
            None
        };
        TwoWordTerms {
            lambda,
            lambda_prime,
            theta,
            theta_prime: lambda_prime.map(|lp| lp + self.scaled + 1),
        }
    }
}

/// Every `d(v^(t-s), z_(s+1)..z_t)` for one word `z`, laid out as
/// `out[s * n + v]`: the fully expanded extreme-vertex memo.
pub(crate) fn fill_suffix_table(metric: &Metric, z: &[Vertex], out: &mut [u32]) {
    let n = metric.order();
    let mut memo = ExtremeDistances::new(metric, z);
    for start in (0..z.len()).rev() {
        for v in 0..n {
            let value = memo.solve(v, start);
            out[start * n + v] = u32::try_from(value).expect("suffix table entries fit in u32");
        }
    }
}

/// Evaluates the shortest-path branch and, if asked, the one-longer branch.
fn recursive_two_word(
    g: &BaseGraph,
    a: &[Vertex],
    b: &[Vertex],
    method: Method,
    with_longer_paths: bool,
) -> Result<QueryResult> {
    let t = a.len();
    let (x, y, xs, ys) = match split(a, b) {
        Split::Equal => return Ok(QueryResult::plain(0, method)),
        Split::Last(x, y) => return Ok(QueryResult::plain(g.dist(x, y)?, method)),
        Split::Inner { x, y, xs, ys } => (x, y, xs, ys),
    };
    let metric = g.metric();
    let paths = g.pair_paths(x, y)?;
    let mut from_x = ExtremeDistances::new(metric, xs);
    let mut from_y = ExtremeDistances::new(metric, ys);
    let plan = TwoWordPlan::new(
        metric.dist(x, y) as u128,
        xs.len(),
        paths,
        with_longer_paths,
        |u| from_x.dist_to_suffix(u),
    );
    let terms = plan.eval(|v| from_y.dist_to_suffix(v));
    Ok(QueryResult {
        distance: narrow(terms.distance(), t)?,
        method,
        lambda: Some(narrow(terms.lambda, t)?),
        lambda_prime: terms.lambda_prime.map(|v| narrow(v, t)).transpose()?,
        theta: Some(narrow(terms.theta, t)?),
        theta_prime: terms.theta_prime.map(|v| narrow(v, t)).transpose()?,
    })
}

/// Exact distance for any pair of words over a connected triangle-free base:
/// the smaller of the shortest-path and one-longer-path candidates.
pub fn triangle_free_dist(g: &BaseGraph, a: &Word, b: &Word) -> Result<QueryResult> {
    require_connected(g)?;
    check_pair(g, a, b)?;
    if !g.is_triangle_free() {
        return Err(Error::not_applicable("base graph contains a triangle"));
    }
    recursive_two_word(g, a.letters(), b.letters(), Method::Algorithm2, true)
}

/// Exact distance over a connected bipartite base (shortest-path branch only).
pub fn bipartite_dist(g: &BaseGraph, a: &Word, b: &Word) -> Result<QueryResult> {
    require_connected(g)?;
    check_pair(g, a, b)?;
    if !g.is_bipartite() {
        return Err(Error::not_applicable("base graph is not bipartite"));
    }
    recursive_two_word(g, a.letters(), b.letters(), Method::Bipartite, false)
}

/// Shortest-path-branch formula for bases where the first differing letter
/// lies on no cycle (checked here), or where the caller asserts that no
/// longer base path can shortcut near its ends (not checkable).
///
/// The formula is symmetric in the two letters, so either one lying on no
/// cycle is enough.
pub fn conditional_dist(
    g: &BaseGraph,
    a: &Word,
    b: &Word,
    assert_premiss_b: bool,
) -> Result<QueryResult> {
    require_connected(g)?;
    check_pair(g, a, b)?;
    if let Split::Inner { x, y, .. } = split(a.letters(), b.letters()) {
        if !assert_premiss_b && !g.lies_on_no_cycle(x) && !g.lies_on_no_cycle(y) {
            return Err(Error::not_applicable(format!(
                "vertices {x} and {y} both lie on cycles and the long-path premiss was not asserted"
            )));
        }
    }
    recursive_two_word(g, a.letters(), b.letters(), Method::Conditional, false)
}

/// Routes a query to the strongest formula that applies, falling back to
/// the explicit construction only when allowed.
pub fn best_dist(g: &BaseGraph, a: &Word, b: &Word, options: &DistOptions) -> Result<QueryResult> {
    require_connected(g)?;
    check_pair(g, a, b)?;
    let (la, lb) = (a.letters(), b.letters());
    let k = common_prefix_len(la, lb);
    if k == la.len() {
        return Ok(QueryResult::plain(0, Method::PrefixReduction));
    }
    if k + 1 == la.len() {
        return Ok(QueryResult::plain(
            g.dist(la[k], lb[k])?,
            Method::PrefixReduction,
        ));
    }

    let (sa, sb) = (&la[k..], &lb[k..]);
    let level = sa.len();
    let extreme = |s: &[Vertex]| s.iter().all(|&u| u == s[0]);
    match (extreme(sa), extreme(sb)) {
        (true, true) => {
            let d = g.dist(sa[0], sb[0])? as u128;
            let value = narrow((pow2(level) - 1) * d, level)?;
            return Ok(QueryResult::plain(value, Method::ExtremeExtreme));
        }
        (true, false) | (false, true) => {
            let (x, other) = if extreme(sa) {
                (sa[0], sb)
            } else {
                (sb[0], sa)
            };
            if g.is_complete() {
                let w = Word::new(other.to_vec())?;
                let value = complete_extreme_to_word(g.order(), x, &w)?;
                return Ok(QueryResult::plain(value, Method::CompleteClosedForm));
            }
            let value = narrow(extreme_to_suffix(g.metric(), x, other), level)?;
            return Ok(QueryResult::plain(value, Method::Algorithm1));
        }
        (false, false) => {}
    }

    if g.is_tree() {
        let tree = TreeBase::new(g)?;
        return Ok(QueryResult::plain(tree.dist(a, b)?, Method::TreePath));
    }
    if g.is_bipartite() {
        return recursive_two_word(g, la, lb, Method::Bipartite, false);
    }
    if g.is_triangle_free() {
        return recursive_two_word(g, la, lb, Method::Algorithm2, true);
    }
    let (x, y) = (la[k], lb[k]);
    if options.assert_premiss_b || g.lies_on_no_cycle(x) || g.lies_on_no_cycle(y) {
        return recursive_two_word(g, la, lb, Method::Conditional, false);
    }
    if options.allow_oracle_fallback {
        let s = build_sierpinski(g, a.len(), options.budget)?;
        return Ok(QueryResult::plain(s.dist(a, b)?, Method::OracleFallback));
    }
    Err(Error::not_applicable(
        "base graph has triangles and no premiss holds; enable the oracle fallback",
    ))
}
