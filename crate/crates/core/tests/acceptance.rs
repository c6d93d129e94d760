//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sierpdist::oracle::g_path;
use sierpdist::recursive::{extreme_extreme_dist, extreme_to_word, triangle_free_dist};
use sierpdist::verify::{max_level_within, verify_level_with, Check, LevelReport};
use sierpdist::{best_dist, build_sierpinski, BaseGraph, DistOptions, Method, TreeBase, Word};

use common::{corpus, fixture, random_connected, Named, SWEEP_BUDGET};

const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
const SWEEP_LIMIT: Duration = Duration::from_secs(300);
const SCALE_QUERY_LIMIT: Duration = Duration::from_millis(100);

type Outcome = Result<String, String>;

fn w(letters: &[usize]) -> Word {
    Word::new(letters.to_vec()).unwrap()
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

fn within(limit: Duration, elapsed: Duration) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn diamond_golden() -> Outcome {
    let start = Instant::now();
    let g = fixture("fig1.el");
    // 121 and 344 with labels 1..4 -> 0..3
    let (a, b) = (w(&[0, 1, 0]), w(&[2, 3, 3]));
    let s = build_sierpinski(&g, 3, SWEEP_BUDGET).map_err(|e| e.to_string())?;
    let oracle = s.dist(&a, &b).map_err(|e| e.to_string())?;
    expect("oracle d(121,344)", oracle, 10)?;
    let options = DistOptions {
        allow_oracle_fallback: true,
        ..DistOptions::default()
    };
    let r = best_dist(&g, &a, &b, &options).map_err(|e| e.to_string())?;
    expect(
        "best_dist",
        (r.distance, r.method),
        (10, Method::OracleFallback),
    )?;
    let elapsed = start.elapsed();
    within(GOLDEN_LIMIT, elapsed)?;
    Ok(format!(
        "oracle=10 best_dist=10 method={} ({elapsed:.2?})",
        r.method
    ))
}

fn four_cycle_goldens() -> Outcome {
    let start = Instant::now();
    let g = fixture("c4.el");
    let (a, b, c, d) = (0, 1, 2, 3);
    let r = triangle_free_dist(&g, &w(&[d, a, b]), &w(&[b, d, c])).map_err(|e| e.to_string())?;
    expect(
        "d(dab,bdc), lambda(d,b)",
        (r.distance, r.lambda),
        (13, Some(5)),
    )?;
    let r = triangle_free_dist(&g, &w(&[d, a, b]), &w(&[c, a, d])).map_err(|e| e.to_string())?;
    expect(
        "d(dab,cad), lambda(d,c)",
        (r.distance, r.lambda),
        (8, Some(7)),
    )?;
    let sub = [
        extreme_to_word(&g, a, &w(&[a, b])),
        extreme_to_word(&g, a, &w(&[d, c])),
        extreme_to_word(&g, c, &w(&[a, b])),
        extreme_to_word(&g, c, &w(&[d, c])),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(|e| e.to_string())?;
    expect("sub-distances", sub, vec![1, 4, 5, 2])?;
    let elapsed = start.elapsed();
    within(GOLDEN_LIMIT, elapsed)?;
    Ok(format!(
        "13 (lambda 5), 8 (lambda 7), sub-distances 1,4,5,2 ({elapsed:.2?})"
    ))
}

fn pendant_pentagon_golden() -> Outcome {
    let start = Instant::now();
    let g = fixture("fig2.el");
    let s = build_sierpinski(&g, 2, SWEEP_BUDGET).map_err(|e| e.to_string())?;
    // labels 1..7 -> 0..6: 16 = (0,5), 14 = (0,3), 47 = (3,6)
    let (w16, w14, w47) = (w(&[0, 5]), w(&[0, 3]), w(&[3, 6]));
    let r = triangle_free_dist(&g, &w16, &w47).map_err(|e| e.to_string())?;
    expect(
        "d(16,47) terms (dist, lambda, lambda', theta, theta')",
        (r.distance, r.lambda, r.lambda_prime, r.theta, r.theta_prime),
        (9, Some(6), Some(2), Some(10), Some(9)),
    )?;
    let oracle16 = s.dist(&w16, &w47).map_err(|e| e.to_string())?;
    expect("oracle d(16,47)", oracle16, 9)?;
    let r14 = triangle_free_dist(&g, &w14, &w47).map_err(|e| e.to_string())?;
    let oracle14 = s.dist(&w14, &w47).map_err(|e| e.to_string())?;
    expect("formula vs oracle d(14,47)", r14.distance, oracle14)?;
    let elapsed = start.elapsed();
    within(GOLDEN_LIMIT, elapsed)?;
    Ok(format!(
        "d(16,47)=9 via theta'=9 < theta=10 (lambda'=2, lambda=6), oracle 9; \
         d(14,47)={oracle14} by oracle and formula, so the value 9 belongs to the pair 16,47 ({elapsed:.2?})"
    ))
}

/// Prefix reduction and G-path checks fed by the sweep's extreme BFS rows.
#[derive(Default)]
struct PathChecks {
    /// Row from `x^(t-1)` at the previous level, per `x`.
    previous: HashMap<usize, Vec<u32>>,
    prefix_checked: u64,
    paths_checked: u64,
    explicit_paths_checked: u64,
    failures: Vec<String>,
}

/// Explicit `g_path` extraction is also run on levels up to this order.
const EXPLICIT_PATH_ORDER: usize = 2_000;

impl PathChecks {
    fn start_graph(&mut self) {
        self.previous.clear();
    }

    fn fail(&mut self, message: String) {
        if self.failures.len() < 8 {
            self.failures.push(message);
        }
    }

    /// `row` holds BFS distances from `x^t` in `S(g,t)`.
    fn observe(&mut self, g: &BaseGraph, name: &str, t: usize, x: usize, row: &[u32]) {
        let n = g.order();
        let block = row.len() / n;
        // d(x x w', x^t) = d(w', x^(t-1)) one level down
        if let Some(prev) = self.previous.get(&x) {
            let copy = &row[x * block..(x + 1) * block];
            self.prefix_checked += copy.len() as u64;
            if let Some(j) = (0..block).find(|&j| copy[j] != prev[j]) {
                let message =
                    format!("{name} t={t}: prefix reduction fails from {x}^{t} at index {j}");
                self.fail(message);
            }
        }
        self.check_bfs_tree_paths(g, name, t, x, row);
        self.previous.insert(x, row.to_vec());
    }

    /// Follows the lowest-index BFS parent of every word back to `x^t` and
    /// checks that the collapsed first-letter sequence is a triangle-free path in `g`.
    fn check_bfs_tree_paths(&mut self, g: &BaseGraph, name: &str, t: usize, x: usize, row: &[u32]) {
        let s = build_sierpinski(g, t, SWEEP_BUDGET).expect("level within budget");
        let n = g.order();
        let block = row.len() / n;
        let mut order: Vec<usize> = (0..row.len()).collect();
        order.sort_by_key(|&i| row[i]);
        // (letters seen as a bit set, previous letter or n, last letter)
        let mut state = vec![(0u64, n, n); row.len()];
        let source = order[0];
        state[source] = (1 << x, n, x);
        let mut broken = None;
        for &v in &order[1..] {
            let parent = s
                .neighbors(v)
                .iter()
                .map(|&u| u as usize)
                .filter(|&u| row[u] + 1 == row[v])
                .min()
                .expect("BFS parent exists");
            let (seen, prev, last) = state[parent];
            let c = v / block;
            state[v] = if c == last {
                (seen, prev, last)
            } else {
                let ok = g.has_edge(last, c)
                    && seen & (1 << c) == 0
                    && (prev == n || !g.has_edge(prev, c));
                if !ok && broken.is_none() {
                    broken = Some(v);
                }
                (seen | 1 << c, last, c)
            };
        }
        self.paths_checked += row.len() as u64;
        if let Some(v) = broken {
            let message = format!(
                "{name} t={t}: G-path from {x}^{t} to {} is not a triangle-free path",
                s.word_at(v)
            );
            self.fail(message);
        }
        if row.len() <= EXPLICIT_PATH_ORDER {
            let from = Word::extreme(x, t).unwrap();
            for (v, &d) in row.iter().enumerate() {
                let to = s.word_at(v);
                let path = s.shortest_path(&from, &to).expect("connected");
                let gp = g_path(g, &path).expect("oracle paths are paths");
                let valid = gp.windows(2).all(|p| g.has_edge(p[0], p[1]))
                    && gp.windows(3).all(|p| !g.has_edge(p[0], p[2]))
                    && (1..gp.len()).all(|i| !gp[..i].contains(&gp[i]))
                    && path.len() as u32 == d + 1;
                if !valid {
                    self.fail(format!(
                        "{name} t={t}: explicit G-path {gp:?} from {from} to {to}"
                    ));
                }
                self.explicit_paths_checked += 1;
            }
        }
    }
}

/// Structural facts of one constructed level.
fn check_structure(named: &Named, t: usize, report: &LevelReport) -> Result<(), String> {
    let g = &named.graph;
    let (n, m) = (g.order(), g.edge_count());
    let s = build_sierpinski(g, t, SWEEP_BUDGET).map_err(|e| e.to_string())?;
    let order = n.pow(t as u32);
    let ctx = |what: &str| format!("{} t={t}: {what}", named.name);
    expect(&ctx("order"), s.order(), order)?;
    expect(
        &ctx("edge count"),
        s.edge_count(),
        m * (order - 1) / (n - 1),
    )?;
    for x in 0..n {
        let extreme = Word::extreme(x, t).unwrap();
        let idx = s.index_of(&extreme).unwrap();
        expect(&ctx("extreme degree"), s.degree(idx), g.degree(x))?;
    }
    if t >= 2 {
        for (x, y) in g.edges() {
            for (u, v) in [(x, y), (y, x)] {
                // u v^(t-1) links copy u to copy v; inside its copy it is
                // the extreme vertex v^(t-1)
                let mut letters = vec![v; t];
                letters[0] = u;
                let idx = s.index_of(&Word::new(letters).unwrap()).unwrap();
                expect(&ctx("linking degree"), s.degree(idx), g.degree(v) + 1)?;
            }
        }
    }
    if n == 2 {
        expect(&ctx("path diameter"), report.diameter, (1u64 << t) - 1)?;
    }
    if g.is_tree() {
        expect(&ctx("tree edge count"), s.edge_count(), order - 1)?;
        if report.diameter >= u32::MAX as u64 {
            return Err(ctx("tree is disconnected"));
        }
    }
    Ok(())
}

struct SweepSummary {
    reports: Vec<(String, bool, usize, LevelReport)>,
    path_checks: PathChecks,
    structure_failures: Vec<String>,
    structures_checked: usize,
    elapsed: Duration,
    error: Option<String>,
}

fn run_sweep() -> SweepSummary {
    let start = Instant::now();
    let mut summary = SweepSummary {
        reports: Vec::new(),
        path_checks: PathChecks::default(),
        structure_failures: Vec::new(),
        structures_checked: 0,
        elapsed: Duration::ZERO,
        error: None,
    };
    'graphs: for named in corpus() {
        let g = &named.graph;
        let t_max = max_level_within(g.order(), SWEEP_BUDGET, 62);
        summary.path_checks.start_graph();
        let graph_start = Instant::now();
        for t in 1..=t_max {
            let checks = &mut summary.path_checks;
            let result = verify_level_with(g, t, SWEEP_BUDGET, |x, row| {
                checks.observe(g, &named.name, t, x, row);
            });
            let report = match result {
                Ok(report) => report,
                Err(e) => {
                    summary.error = Some(format!("{} t={t}: {e}", named.name));
                    break 'graphs;
                }
            };
            if let Err(e) = check_structure(&named, t, &report) {
                summary.structure_failures.push(e);
            }
            summary.structures_checked += 1;
            summary
                .reports
                .push((named.name.clone(), g.is_tree(), g.order(), report));
        }
        eprintln!(
            "sweep {} n={} levels=1..={t_max} {:.1?}",
            named.name,
            g.order(),
            graph_start.elapsed()
        );
    }
    summary.elapsed = start.elapsed();
    summary
}

fn sweep_criterion(summary: &SweepSummary) -> Outcome {
    if let Some(e) = &summary.error {
        return Err(e.clone());
    }
    let mut compared = 0u64;
    let mut mismatches = 0u64;
    let mut pairs = 0u64;
    let mut by_check: HashMap<Check, u64> = HashMap::new();
    let mut samples = Vec::new();
    for (name, _, _, report) in &summary.reports {
        pairs += report.pairs;
        mismatches += report.mismatches();
        for (check, tally) in report.checks() {
            compared += tally.compared;
            *by_check.entry(check).or_default() += tally.compared;
        }
        samples.extend(
            report
                .mismatch_samples
                .iter()
                .map(|m| format!("{name} t={}: {m}", report.level)),
        );
    }
    let graphs = summary
        .reports
        .iter()
        .map(|r| &r.0)
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    let mut scopes: Vec<_> = by_check.into_iter().collect();
    scopes.sort();
    let scopes = scopes
        .iter()
        .map(|(c, k)| format!("{c}={k}"))
        .collect::<Vec<_>>()
        .join(" ");
    let detail = format!(
        "graphs={graphs} levels={} pairs={pairs} comparisons={compared} mismatches={mismatches} [{scopes}] runtime={:.1?} threads={}",
        summary.reports.len(),
        summary.elapsed,
        std::thread::available_parallelism().map_or(1, |p| p.get())
    );
    if mismatches > 0 {
        return Err(format!("{detail}; first: {}", samples.join(" | ")));
    }
    within(SWEEP_LIMIT, summary.elapsed).map_err(|e| format!("{detail}; {e}"))?;
    Ok(detail)
}

fn tree_criterion(summary: &SweepSummary) -> Outcome {
    if let Some(e) = &summary.error {
        return Err(e.clone());
    }
    let mut trees = std::collections::BTreeSet::new();
    let mut compared = 0;
    for (name, is_tree, n, report) in &summary.reports {
        if !is_tree {
            continue;
        }
        trees.insert(name.clone());
        let tally = report.tally(Check::TreeClosedForm);
        // every extreme eccentricity plus diameter and radius
        expect(
            &format!("{name} t={} closed-form checks", report.level),
            tally.compared,
            *n as u64 + 2,
        )?;
        if tally.mismatches > 0 {
            return Err(format!(
                "{name} t={}: {}",
                report.level,
                report
                    .mismatch_samples
                    .iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(" | ")
            ));
        }
        compared += tally.compared;
    }
    // both radius branches halve an even number
    let mut parity_cases = 0;
    for t in 1..=60i128 {
        let p = 1i128 << t;
        let c = 3 * p - 2 * t - 3;
        for diameter in 1..=64i128 {
            let doubled = if diameter % 2 == 0 {
                c * diameter - 4 * (p - t - 1)
            } else {
                c * diameter - 4 * p + 4 * t + 5
            };
            if doubled % 2 != 0 {
                return Err(format!("odd radius numerator at t={t}, D={diameter}"));
            }
            parity_cases += 1;
        }
    }
    let g = common::path(5);
    let tree = TreeBase::new(&g).map_err(|e| e.to_string())?;
    tree.sierpinski_radius(62).map_err(|e| e.to_string())?;
    Ok(format!(
        "trees={} closed-form comparisons={compared} mismatches=0; radius numerators even in {parity_cases} (t, D) cases",
        trees.len()
    ))
}

fn structure_criterion(summary: &SweepSummary) -> Outcome {
    if let Some(e) = &summary.error {
        return Err(e.clone());
    }
    if let Some(first) = summary.structure_failures.first() {
        return Err(format!(
            "{} failures; first: {first}",
            summary.structure_failures.len()
        ));
    }
    Ok(format!(
        "{} constructed levels: order, edge count, extreme and linking degrees, path diameters, tree edge counts",
        summary.structures_checked
    ))
}

fn path_criterion(summary: &SweepSummary) -> Outcome {
    if let Some(e) = &summary.error {
        return Err(e.clone());
    }
    let c = &summary.path_checks;
    if !c.failures.is_empty() {
        return Err(c.failures.join(" | "));
    }
    Ok(format!(
        "prefix-reduction comparisons={} BFS-tree paths={} explicit g_path extractions={}, no violations",
        c.prefix_checked, c.paths_checked, c.explicit_paths_checked
    ))
}

fn scale_criterion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let g = random_connected(20, 0.15, &mut rng);
    let t = 20;
    let mut latencies = Vec::new();
    for _ in 0..200 {
        let x = rng.gen_range(0..20);
        let letters: Vec<usize> = (0..t).map(|_| rng.gen_range(0..20)).collect();
        let word = Word::new(letters).unwrap();
        let start = Instant::now();
        let d = extreme_to_word(&g, x, &word).map_err(|e| e.to_string())?;
        latencies.push(start.elapsed());
        let bound = extreme_extreme_dist(&g, 0, 1, t).map_err(|e| e.to_string())?;
        let _ = (d, bound);
    }
    // consistency anchors at full scale
    for x in 0..3 {
        for y in 0..20 {
            let via_word =
                extreme_to_word(&g, x, &Word::extreme(y, t).unwrap()).map_err(|e| e.to_string())?;
            let closed = extreme_extreme_dist(&g, x, y, t).map_err(|e| e.to_string())?;
            expect("d(x^t, y^t) two ways", via_word, closed)?;
        }
    }
    latencies.sort();
    let worst = *latencies.last().unwrap();
    let median = latencies[latencies.len() / 2];
    within(SCALE_QUERY_LIMIT, worst)?;
    Ok(format!(
        "n=20 t=20 (20^20 vertices): {} queries, median {median:.1?}, worst {worst:.1?}",
        latencies.len()
    ))
}

fn report(id: usize, name: &str, outcome: &Outcome) -> bool {
    match outcome {
        Ok(detail) => {
            println!("criterion {id} {name}: PASS {detail}");
            true
        }
        Err(detail) => {
            println!("criterion {id} {name}: FAIL {detail}");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= report(1, "diamond-base golden", &diamond_golden());
    ok &= report(2, "four-cycle goldens", &four_cycle_goldens());
    ok &= report(3, "pendant-pentagon golden", &pendant_pentagon_golden());
    let summary = run_sweep();
    ok &= report(4, "oracle-equivalence sweep", &sweep_criterion(&summary));
    ok &= report(5, "tree closed forms", &tree_criterion(&summary));
    ok &= report(6, "structural invariants", &structure_criterion(&summary));
    ok &= report(
        7,
        "prefix reduction and G-path properties",
        &path_criterion(&summary),
    );
    ok &= report(8, "scale check", &scale_criterion());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
