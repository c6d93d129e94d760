//! Exhaustive oracle-equivalence sweeps: every recursive method is compared
//! with BFS in the explicit graph over all vertex pairs in its scope.
//!
//! Scopes depend on the base graph. Extreme-vertex formulas apply to every
//! connected base; the two-word formulas only to trees, bipartite or
//! triangle-free bases, or to pairs whose first differing letters satisfy the
//! no-cycle premiss.

use std::fmt;

use crate::error::Result;
use crate::graph::{BaseGraph, Metric, PairPaths, Vertex};
use crate::oracle::{build_sierpinski, sierpinski_order, ExplicitSierpinski};
use crate::recursive::{
    complete_extreme_to_word, extreme_extreme_dist, extreme_to_word, fill_suffix_table,
    TwoWordPlan, TwoWordTerms,
};
use crate::trees::{TreeBase, TreePathPlan};
use crate::word::Word;

const KEPT_MISMATCHES: usize = 8;

/// One family of comparisons against the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    ExtremeExtreme,
    Algorithm1,
    CompleteClosedForm,
    TreePath,
    Bipartite,
    Algorithm2,
    Conditional,
    TreeClosedForm,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::ExtremeExtreme,
        Check::Algorithm1,
        Check::CompleteClosedForm,
        Check::TreePath,
        Check::Bipartite,
        Check::Algorithm2,
        Check::Conditional,
        Check::TreeClosedForm,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Check::ExtremeExtreme => "extreme-extreme",
            Check::Algorithm1 => "algorithm-1",
            Check::CompleteClosedForm => "complete-closed-form",
            Check::TreePath => "tree-path",
            Check::Bipartite => "bipartite",
            Check::Algorithm2 => "algorithm-2",
            Check::Conditional => "conditional",
            Check::TreeClosedForm => "tree-closed-form",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A disagreement between a formula and the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub check: Check,
    /// Free-form description of the query, e.g. the two words.
    pub query: String,
    pub oracle: u64,
    pub formula: u64,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mismatch check={} query={} oracle={} formula={}",
            self.check, self.query, self.oracle, self.formula
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub compared: u64,
    pub mismatches: u64,
}

/// Result of sweeping one level.
#[derive(Debug, Clone)]
pub struct LevelReport {
    pub level: usize,
    /// `n^t`.
    pub order: usize,
    /// Unordered pairs of distinct words visited.
    pub pairs: u64,
    tallies: [Tally; Check::ALL.len()],
    /// Pairs where the one-longer branch beat the shortest-path branch.
    pub longer_branch_wins: u64,
    /// Oracle diameter and radius of `S(G,t)`.
    pub diameter: u64,
    pub radius: u64,
    /// Oracle eccentricity of each extreme vertex `x^t`, indexed by `x`.
    pub extreme_eccentricities: Vec<u64>,
    /// The first few mismatches, in sweep order.
    pub mismatch_samples: Vec<Mismatch>,
}

impl LevelReport {
    pub fn tally(&self, check: Check) -> Tally {
        self.tallies[check as usize]
    }

    /// Checks that ran at least once on this level.
    pub fn checks(&self) -> impl Iterator<Item = (Check, Tally)> + '_ {
        Check::ALL
            .into_iter()
            .map(|c| (c, self.tally(c)))
            .filter(|(_, t)| t.compared > 0)
    }

    pub fn mismatches(&self) -> u64 {
        self.tallies.iter().map(|t| t.mismatches).sum()
    }

    fn record(&mut self, check: Check, oracle: u64, formula: u64, query: impl FnOnce() -> String) {
        let tally = &mut self.tallies[check as usize];
        tally.compared += 1;
        if oracle != formula {
            tally.mismatches += 1;
            if self.mismatch_samples.len() < KEPT_MISMATCHES {
                self.mismatch_samples.push(Mismatch {
                    check,
                    query: query(),
                    oracle,
                    formula,
                });
            }
        }
    }
}

impl fmt::Display for LevelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "level={} pairs={} mismatches={}",
            self.level,
            self.pairs,
            self.mismatches()
        )
    }
}

/// Largest `t` with `n^t <= budget`, capped at `cap`.
pub fn max_level_within(n: usize, budget: u64, cap: usize) -> usize {
    (1..=cap)
        .take_while(|&t| sierpinski_order(n, t).is_some_and(|o| o <= budget as u128))
        .last()
        .unwrap_or(0)
}

/// Sweeps levels `1..=t_max`.
pub fn verify_levels(g: &BaseGraph, t_max: usize, budget: u64) -> Result<Vec<LevelReport>> {
    (1..=t_max).map(|t| verify_level(g, t, budget)).collect()
}

/// Compares every applicable formula with BFS on `S(g,t)`.
pub fn verify_level(g: &BaseGraph, t: usize, budget: u64) -> Result<LevelReport> {
    verify_level_with(g, t, budget, |_, _| {})
}

/// [`verify_level`], also handing each extreme vertex's BFS row
/// (`row[i]` = distance from `x^t` to word index `i`) to `extreme_rows`,
/// in vertex order.
///
/// BFS sources are split across the available cores; the report does not
/// depend on the split.
pub fn verify_level_with(
    g: &BaseGraph,
    t: usize,
    budget: u64,
    extreme_rows: impl FnMut(Vertex, &[u32]),
) -> Result<LevelReport> {
    let workers = std::thread::available_parallelism().map_or(1, |p| p.get());
    sweep_level(g, t, budget, workers, extreme_rows)
}

fn sweep_level(
    g: &BaseGraph,
    t: usize,
    budget: u64,
    workers: usize,
    mut extreme_rows: impl FnMut(Vertex, &[u32]),
) -> Result<LevelReport> {
    let s = build_sierpinski(g, t, budget)?;
    let sweep = Sweep::new(g, &s)?;
    let order = s.order();
    let workers = workers.clamp(1, order);

    let parts: Vec<Result<Partial>> = if workers == 1 {
        vec![sweep.run(0, 1)]
    } else {
        std::thread::scope(|scope| {
            let sweep = &sweep;
            let handles: Vec<_> = (0..workers)
                .map(|w| scope.spawn(move || sweep.run(w, workers)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sweep worker panicked"))
                .collect()
        })
    };

    let n = g.order();
    let mut report = LevelReport {
        level: t,
        order,
        pairs: (order as u64) * (order as u64 - 1) / 2,
        tallies: [Tally::default(); Check::ALL.len()],
        longer_branch_wins: 0,
        diameter: 0,
        radius: u64::MAX,
        extreme_eccentricities: vec![0; n],
        mismatch_samples: Vec::new(),
    };
    let mut samples = Vec::new();
    let mut rows = Vec::new();
    for part in parts {
        let part = part?;
        for (total, tally) in report.tallies.iter_mut().zip(part.tallies) {
            total.compared += tally.compared;
            total.mismatches += tally.mismatches;
        }
        report.longer_branch_wins += part.longer_branch_wins;
        report.diameter = report.diameter.max(part.diameter);
        report.radius = report.radius.min(part.radius);
        samples.extend(part.samples);
        rows.extend(part.rows);
    }
    samples.sort_by_key(|&(src, _)| src);
    report.mismatch_samples = samples
        .into_iter()
        .take(KEPT_MISMATCHES)
        .map(|(_, m)| m)
        .collect();
    rows.sort_by_key(|&(x, _)| x);
    for (x, row) in &rows {
        report.extreme_eccentricities[*x] = row.iter().copied().max().unwrap_or(0) as u64;
        extreme_rows(*x, row);
    }

    if sweep.tree {
        check_tree_closed_forms(g, t, &mut report)?;
    }
    Ok(report)
}

/// Per-worker share of a level sweep.
struct Partial {
    tallies: [Tally; Check::ALL.len()],
    longer_branch_wins: u64,
    diameter: u64,
    radius: u64,
    /// Mismatches keyed by BFS source, so merging restores sweep order.
    samples: Vec<(usize, Mismatch)>,
    /// BFS rows of the extreme sources this worker handled.
    rows: Vec<(Vertex, Vec<u32>)>,
}

impl Partial {
    fn record(
        &mut self,
        src: usize,
        check: Check,
        oracle: u64,
        formula: u64,
        query: impl FnOnce() -> String,
    ) {
        let tally = &mut self.tallies[check as usize];
        tally.compared += 1;
        if oracle != formula {
            self.mismatch(src, check, oracle, formula, query);
        }
    }

    #[cold]
    fn mismatch(
        &mut self,
        src: usize,
        check: Check,
        oracle: u64,
        formula: u64,
        query: impl FnOnce() -> String,
    ) {
        self.tallies[check as usize].mismatches += 1;
        if self.samples.len() < KEPT_MISMATCHES {
            let mismatch = Mismatch {
                check,
                query: query(),
                oracle,
                formula,
            };
            self.samples.push((src, mismatch));
        }
    }
}

/// Read-only state shared by the sweep workers.
struct Sweep<'a> {
    g: &'a BaseGraph,
    s: &'a ExplicitSierpinski<'a>,
    metric: &'a Metric,
    n: usize,
    t: usize,
    tree: bool,
    bipartite: bool,
    triangle_free: bool,
    complete: bool,
    acyclic: Vec<bool>,
    two_word: bool,
    paths: Vec<Option<&'a PairPaths>>,
    letters: Vec<Vertex>,
    /// `suffix[i * stride + s * n + v]` = `d(v^(t-s-1), suffix of word i after s letters)`.
    suffix: Vec<u32>,
    stride: usize,
    powers: Vec<usize>,
    repunit: usize,
}

impl<'a> Sweep<'a> {
    fn new(g: &'a BaseGraph, s: &'a ExplicitSierpinski<'a>) -> Result<Self> {
        let n = g.order();
        let t = s.level();
        let order = s.order();
        let metric = g.metric();
        let triangle_free = g.is_triangle_free();
        let acyclic: Vec<bool> = (0..n).map(|x| g.lies_on_no_cycle(x)).collect();
        let two_word = triangle_free || acyclic.iter().any(|&b| b);

        let mut paths = vec![None; n * n];
        if two_word {
            for x in 0..n {
                for y in 0..n {
                    if x != y {
                        paths[x * n + y] = Some(g.pair_paths(x, y)?);
                    }
                }
            }
        }

        let letters: Vec<Vertex> = (0..order)
            .flat_map(|i| Word::from_index(i, n, t).letters().to_vec())
            .collect();
        let stride = t * n;
        let mut suffix = Vec::new();
        if two_word && t >= 2 {
            suffix = vec![0u32; order * stride];
            for (i, out) in suffix.chunks_exact_mut(stride).enumerate() {
                fill_suffix_table(metric, &letters[i * t..(i + 1) * t], out);
            }
        }
        let powers: Vec<usize> = (0..=t).map(|i| n.pow(i as u32)).collect();
        let repunit = (powers[t] - 1) / (n - 1);

        Ok(Self {
            g,
            s,
            metric,
            n,
            t,
            tree: g.is_tree(),
            bipartite: g.is_bipartite(),
            triangle_free,
            complete: g.is_complete(),
            acyclic,
            two_word,
            paths,
            letters,
            suffix,
            stride,
            powers,
            repunit,
        })
    }

    fn word(&self, i: usize) -> Word {
        Word::new(self.letters[i * self.t..(i + 1) * self.t].to_vec()).expect("level checked")
    }

    /// Sweeps sources `worker, worker + workers, ...`.
    fn run(&self, worker: usize, workers: usize) -> Result<Partial> {
        let (n, t) = (self.n, self.t);
        let order = self.s.order();
        let mut part = Partial {
            tallies: [Tally::default(); Check::ALL.len()],
            longer_branch_wins: 0,
            diameter: 0,
            radius: u64::MAX,
            samples: Vec::new(),
            rows: Vec::new(),
        };
        let mut row = Vec::with_capacity(order);
        let mut queue = Vec::with_capacity(order);
        for src in (worker..order).step_by(workers) {
            self.s.bfs_into(src, &mut row, &mut queue);
            let eccentricity = row.iter().copied().max().unwrap_or(0) as u64;
            part.diameter = part.diameter.max(eccentricity);
            part.radius = part.radius.min(eccentricity);
            if src % self.repunit == 0 {
                let x = src / self.repunit;
                self.check_extreme_source(src, x, &row, &mut part)?;
                part.rows.push((x, row.clone()));
            }
            if !self.two_word && !self.tree {
                continue;
            }
            let a = &self.letters[src * t..(src + 1) * t];
            for (k, &x) in a.iter().enumerate() {
                let block = self.powers[t - k - 1];
                let base = src / self.powers[t - k] * self.powers[t - k];
                for y in x + 1..n {
                    let targets = base + y * block..base + (y + 1) * block;
                    self.check_block(src, k, x, y, targets, &row, &mut part);
                }
            }
        }
        Ok(part)
    }

    /// Pairs `(src, b)` whose first difference is at position `k`, with
    /// letters `x` and `y`.
    #[allow(clippy::too_many_arguments)]
    fn check_block(
        &self,
        src: usize,
        k: usize,
        x: Vertex,
        y: Vertex,
        targets: std::ops::Range<usize>,
        row: &[u32],
        part: &mut Partial,
    ) {
        let (n, t) = (self.n, self.t);
        let (tree, bipartite, triangle_free) = (self.tree, self.bipartite, self.triangle_free);
        let d = self.metric.dist(x, y) as u64;
        let conditional = self.acyclic[x] || self.acyclic[y];
        let rest = t - k - 1;
        if rest == 0 {
            let b = targets.start;
            let oracle = row[b] as u64;
            let query = || format!("{} {}", self.word(src), self.word(b));
            if tree {
                part.record(src, Check::TreePath, oracle, d, query);
            }
            if bipartite {
                part.record(src, Check::Bipartite, oracle, d, query);
            }
            if triangle_free {
                part.record(src, Check::Algorithm2, oracle, d, query);
            }
            if conditional {
                part.record(src, Check::Conditional, oracle, d, query);
            }
            return;
        }
        if !(triangle_free || conditional) {
            return;
        }
        let pair = self.paths[x * n + y].expect("pair paths computed");
        let stride = self.stride;
        let from_x = &self.suffix[src * stride + (k + 1) * n..][..n];
        let plan = TwoWordPlan::new(d as u128, rest, pair, triangle_free, |u| from_x[u] as u128);
        let tree_plan =
            tree.then(|| TreePathPlan::new(self.metric, x, y, rest, |u| from_x[u] as u128));
        let mut pairs = 0u64;
        let mut longer_wins = 0u64;
        for b in targets {
            let from_y = &self.suffix[b * stride + (k + 1) * n..][..n];
            let lookup = |v: Vertex| from_y[v] as u128;
            let oracle = row[b] as u128;
            let terms = plan.eval(lookup);
            let tree_value = tree_plan.as_ref().map(|p| p.eval(lookup));
            let mut ok = tree_value.is_none_or(|v| v == oracle);
            if triangle_free {
                ok &= terms.distance() == oracle;
                if terms.theta_prime.is_some_and(|tp| tp < terms.theta) {
                    longer_wins += 1;
                }
            }
            if bipartite || conditional {
                ok &= terms.theta == oracle;
            }
            pairs += 1;
            if !ok {
                let scope = PairScope {
                    bipartite,
                    triangle_free,
                    conditional,
                };
                let query = || format!("{} {}", self.word(src), self.word(b));
                record_pair_mismatches(part, src, scope, &terms, tree_value, oracle, query);
            }
        }
        for (check, applies) in [
            (Check::TreePath, tree),
            (Check::Bipartite, bipartite),
            (Check::Algorithm2, triangle_free),
            (Check::Conditional, conditional),
        ] {
            if applies {
                part.tallies[check as usize].compared += pairs;
            }
        }
        part.longer_branch_wins += longer_wins;
    }

    fn check_extreme_source(
        &self,
        src: usize,
        x: Vertex,
        row: &[u32],
        part: &mut Partial,
    ) -> Result<()> {
        let (g, t) = (self.g, self.t);
        for y in 0..self.n {
            let formula = extreme_extreme_dist(g, x, y, t)?;
            let oracle = row[y * self.repunit] as u64;
            part.record(src, Check::ExtremeExtreme, oracle, formula, || {
                format!("{x}^{t} {y}^{t}")
            });
        }
        for (b, &oracle) in row.iter().enumerate() {
            let w = self.word(b);
            let formula = extreme_to_word(g, x, &w)?;
            part.record(src, Check::Algorithm1, oracle as u64, formula, || {
                format!("{x}^{t} {w}")
            });
            if self.complete {
                let formula = complete_extreme_to_word(self.n, x, &w)?;
                part.record(
                    src,
                    Check::CompleteClosedForm,
                    oracle as u64,
                    formula,
                    || format!("{x}^{t} {w}"),
                );
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct PairScope {
    bipartite: bool,
    triangle_free: bool,
    conditional: bool,
}

/// Slow path: files a mismatch for each failing check of one pair.
/// Comparisons are counted by the caller.
#[cold]
fn record_pair_mismatches(
    part: &mut Partial,
    src: usize,
    scope: PairScope,
    terms: &TwoWordTerms,
    tree_value: Option<u128>,
    oracle: u128,
    query: impl Fn() -> String,
) {
    let candidates = [
        (Check::TreePath, tree_value),
        (Check::Bipartite, scope.bipartite.then_some(terms.theta)),
        (
            Check::Algorithm2,
            scope.triangle_free.then(|| terms.distance()),
        ),
        (Check::Conditional, scope.conditional.then_some(terms.theta)),
    ];
    for (check, formula) in candidates {
        let Some(formula) = formula else { continue };
        if formula != oracle {
            let formula = u64::try_from(formula).unwrap_or(u64::MAX);
            part.mismatch(src, check, oracle as u64, formula, &query);
        }
    }
}

fn check_tree_closed_forms(g: &BaseGraph, t: usize, report: &mut LevelReport) -> Result<()> {
    let tree = TreeBase::new(g)?;
    for x in 0..g.order() {
        let metrics = tree.level_metrics(x, t)?;
        let oracle = report.extreme_eccentricities[x];
        report.record(
            Check::TreeClosedForm,
            oracle,
            metrics.extreme_eccentricity,
            || format!("eccentricity {x}^{t}"),
        );
        if x == 0 {
            let (diameter, radius) = (report.diameter, report.radius);
            report.record(Check::TreeClosedForm, diameter, metrics.diameter, || {
                "diameter".into()
            });
            report.record(Check::TreeClosedForm, radius, metrics.radius, || {
                "radius".into()
            });
        }
    }
    Ok(())
}
