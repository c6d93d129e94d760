use std::collections::BTreeMap;
use std::hint::black_box;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sierpdist::oracle::sierpinski_order;
use sierpdist::recursive::{extreme_to_word, triangle_free_dist};
use sierpdist::verify::verify_level;
use sierpdist::{
    best_dist, build_sierpinski, BaseGraph, DistOptions, Error, Method, QueryResult, TreeBase, Word,
};

use crate::{Cli, Command, Failure, Format};

type Outcome = Result<(), Failure>;

pub fn run(cli: &Cli, out: &mut impl Write) -> Outcome {
    let g = load_graph(cli)?;
    if cli.budget < g.order() as u64 {
        return Err(Failure::usage(format!(
            "budget {} is below the base order {}",
            cli.budget,
            g.order()
        )));
    }
    match &cli.command {
        Command::Dist { a, b } => dist(cli, &g, a, b, out),
        Command::Diameter => level_metric(cli, &g, Metric::Diameter, out),
        Command::Radius => level_metric(cli, &g, Metric::Radius, out),
        Command::Ecc { extreme, word } => ecc(cli, &g, *extreme, word.as_deref(), out),
        Command::Verify { t_max, probe } => verify(cli, &g, *t_max, probe, out),
        Command::Bench { samples, seed } => bench(cli, &g, *samples, *seed, out),
        Command::ExportDot { out: path } => export_dot(cli, &g, path.as_deref(), out),
    }
}

fn load_graph(cli: &Cli) -> Result<BaseGraph, Failure> {
    let path = cli
        .graph
        .as_ref()
        .ok_or_else(|| Failure::usage("--graph is required"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(BaseGraph::parse(&text)?)
}

fn level(cli: &Cli) -> Result<usize, Failure> {
    match cli.level {
        None => Err(Failure::usage("-t LEVEL is required")),
        Some(0) => Err(Failure::usage("level must be at least 1")),
        Some(t) => Ok(t),
    }
}

fn write_failed(e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        message: format!("write failed: {e}"),
    }
}

macro_rules! emit {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(write_failed)?
    };
}

/// Distance routing shared by `dist`, `verify --probe` and `bench`:
/// triangle-free bases always go through the two-candidate recursion, which
/// is exact there and reports both totals; anything else goes through the
/// general dispatcher.
fn query(
    g: &BaseGraph,
    a: &Word,
    b: &Word,
    options: &DistOptions,
) -> sierpdist::Result<QueryResult> {
    if g.is_connected() && g.is_triangle_free() {
        triangle_free_dist(g, a, b)
    } else {
        best_dist(g, a, b, options)
    }
}

fn options(cli: &Cli) -> DistOptions {
    DistOptions {
        allow_oracle_fallback: cli.fallback,
        assert_premiss_b: cli.assert_premiss_b,
        budget: cli.budget,
    }
}

fn opt(value: Option<u64>) -> String {
    value.map_or_else(|| "none".into(), |v| v.to_string())
}

fn dist(cli: &Cli, g: &BaseGraph, a: &str, b: &str, out: &mut impl Write) -> Outcome {
    let t = level(cli)?;
    let a = Word::parse(a, g.order(), t)?;
    let b = Word::parse(b, g.order(), t)?;
    let r = query(g, &a, &b, &options(cli))?;
    match cli.format {
        Format::Machine => emit!(out, "dist={} method={}", r.distance, r.method),
        Format::Human => {
            emit!(
                out,
                "distance from {a} to {b} = {} via {}",
                r.distance,
                r.method
            );
            if r.method == Method::Algorithm2 && r.theta.is_some() {
                emit!(out, "  lambda  = {}", opt(r.lambda));
                emit!(out, "  lambda' = {}", opt(r.lambda_prime));
                emit!(out, "  theta   = {}", opt(r.theta));
                emit!(out, "  theta'  = {}", opt(r.theta_prime));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Metric {
    Diameter,
    Radius,
}

fn closed_forms_apply(g: &BaseGraph) -> bool {
    g.is_tree() && g.order() >= 2
}

fn level_metric(cli: &Cli, g: &BaseGraph, which: Metric, out: &mut impl Write) -> Outcome {
    let t = level(cli)?;
    let name = match which {
        Metric::Diameter => "diameter",
        Metric::Radius => "radius",
    };
    let (value, method) = if closed_forms_apply(g) {
        let m = TreeBase::new(g)?.level_metrics(0, t)?;
        let value = match which {
            Metric::Diameter => m.diameter,
            Metric::Radius => m.radius,
        };
        (value, "tree-closed-form")
    } else {
        let s = build_sierpinski(g, t, cli.budget)?;
        let value = match which {
            Metric::Diameter => s.diameter(),
            Metric::Radius => s.radius(),
        };
        (value, "oracle")
    };
    match cli.format {
        Format::Machine => emit!(out, "{name}={value} method={method}"),
        Format::Human => emit!(out, "{name} of S(G,{t}) = {value} via {method}"),
    }
    Ok(())
}

fn ecc(
    cli: &Cli,
    g: &BaseGraph,
    extreme: Option<usize>,
    word: Option<&str>,
    out: &mut impl Write,
) -> Outcome {
    let t = level(cli)?;
    let w = match (extreme, word) {
        (Some(x), _) => {
            if x >= g.order() {
                return Err(Error::VertexOutOfRange {
                    vertex: x,
                    n: g.order(),
                }
                .into());
            }
            Word::extreme(x, t)?
        }
        (None, Some(text)) => Word::parse(text, g.order(), t)?,
        (None, None) => return Err(Failure::usage("give --extreme VERTEX or a word")),
    };
    let (value, method) = if closed_forms_apply(g) && w.is_extreme() {
        let m = TreeBase::new(g)?.level_metrics(w.letter(1), t)?;
        (m.extreme_eccentricity, "tree-closed-form")
    } else {
        let s = build_sierpinski(g, t, cli.budget)?;
        (s.eccentricity(&w)?, "oracle")
    };
    match cli.format {
        Format::Machine => emit!(out, "ecc={value} method={method}"),
        Format::Human => emit!(out, "eccentricity of {w} = {value} via {method}"),
    }
    Ok(())
}

fn parse_probe(g: &BaseGraph, text: &str) -> Result<(Word, Word), Failure> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| Failure::usage(format!("probe {text:?} is not of the form A:B")))?;
    let t = a.split(',').count();
    Ok((Word::parse(a, g.order(), t)?, Word::parse(b, g.order(), t)?))
}

fn verify(
    cli: &Cli,
    g: &BaseGraph,
    t_max: usize,
    probes: &[String],
    out: &mut impl Write,
) -> Outcome {
    if t_max == 0 {
        return Err(Failure::usage("--t-max must be at least 1"));
    }
    let needed = sierpinski_order(g.order(), t_max).unwrap_or(u128::MAX);
    if needed > cli.budget as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: cli.budget,
        }
        .into());
    }
    let probes = probes
        .iter()
        .map(|p| parse_probe(g, p))
        .collect::<Result<Vec<_>, _>>()?;

    let mut total = 0u64;
    for t in 1..=t_max {
        let report = verify_level(g, t, cli.budget)?;
        total += report.mismatches();
        match cli.format {
            Format::Machine => {
                emit!(out, "{report}");
                for (check, tally) in report.checks() {
                    emit!(
                        out,
                        "level={t} check={check} compared={} mismatches={}",
                        tally.compared,
                        tally.mismatches
                    );
                }
                if g.is_triangle_free() {
                    emit!(
                        out,
                        "level={t} longer_branch_wins={}",
                        report.longer_branch_wins
                    );
                }
                emit!(
                    out,
                    "level={t} diameter={} radius={}",
                    report.diameter,
                    report.radius
                );
                for m in &report.mismatch_samples {
                    emit!(out, "level={t} {m}");
                }
            }
            Format::Human => {
                emit!(
                    out,
                    "level {t}: {} pairs, {} mismatches, diameter {}, radius {}",
                    report.pairs,
                    report.mismatches(),
                    report.diameter,
                    report.radius
                );
                for (check, tally) in report.checks() {
                    emit!(
                        out,
                        "  {check:<22} {:>12} compared {:>6} mismatches",
                        tally.compared,
                        tally.mismatches
                    );
                }
                for m in &report.mismatch_samples {
                    emit!(out, "  {m}");
                }
            }
        }
    }

    let plain = DistOptions {
        allow_oracle_fallback: false,
        ..options(cli)
    };
    for (a, b) in &probes {
        let s = build_sierpinski(g, a.len(), cli.budget)?;
        let oracle = s.dist(a, b)?;
        let (formula, method) = match query(g, a, b, &plain) {
            Ok(r) => (Some(r.distance), r.method.tag().to_string()),
            Err(Error::NotApplicable(_)) => (None, "not-applicable".to_string()),
            Err(e) => return Err(e.into()),
        };
        if formula.is_some_and(|f| f != oracle) {
            total += 1;
        }
        match cli.format {
            Format::Machine => emit!(
                out,
                "probe a={a} b={b} oracle={oracle} formula={} method={method}",
                opt(formula)
            ),
            Format::Human => emit!(
                out,
                "probe {a} to {b}: oracle {oracle}, formula {} via {method}",
                opt(formula)
            ),
        }
    }

    match cli.format {
        Format::Machine => emit!(out, "total levels={t_max} mismatches={total}"),
        Format::Human => emit!(out, "{total} mismatches over levels 1..={t_max}"),
    }
    if total > 0 {
        return Err(Failure::mismatch(format!("{total} mismatches")));
    }
    Ok(())
}

fn random_word(rng: &mut ChaCha8Rng, n: usize, t: usize) -> Word {
    Word::new((0..t).map(|_| rng.gen_range(0..n)).collect()).expect("t >= 1")
}

struct Latencies(Vec<Duration>);

impl Latencies {
    fn summary(&mut self) -> String {
        self.0.sort();
        let median = self.0[self.0.len() / 2];
        let max = self.0[self.0.len() - 1];
        format!(
            "queries={} median_ns={} max_ns={}",
            self.0.len(),
            median.as_nanos(),
            max.as_nanos()
        )
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let value = black_box(f());
    (value, start.elapsed())
}

fn bench(cli: &Cli, g: &BaseGraph, samples: usize, seed: u64, out: &mut impl Write) -> Outcome {
    let t = level(cli)?;
    if samples == 0 {
        return Err(Failure::usage("--samples must be at least 1"));
    }
    let n = g.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = sierpinski_order(n, t).map_or_else(|| "overflow".into(), |o| o.to_string());
    emit!(
        out,
        "bench level={t} order={order} samples={samples} seed={seed}"
    );

    let mut extreme = Latencies(Vec::with_capacity(samples));
    let mut extreme_queries = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = rng.gen_range(0..n);
        let w = random_word(&mut rng, n, t);
        let (value, took) = timed(|| extreme_to_word(g, x, &w));
        extreme.0.push(took);
        extreme_queries.push((Word::extreme(x, t)?, w, value?));
    }
    emit!(out, "bench method=algorithm-1 {}", extreme.summary());

    let plain = DistOptions {
        allow_oracle_fallback: false,
        ..options(cli)
    };
    let mut by_method: BTreeMap<&'static str, Latencies> = BTreeMap::new();
    let mut not_applicable = 0usize;
    let mut pair_queries = Vec::with_capacity(samples);
    for _ in 0..samples {
        let a = random_word(&mut rng, n, t);
        let b = random_word(&mut rng, n, t);
        let (result, took) = timed(|| query(g, &a, &b, &plain));
        match result {
            Ok(r) => {
                by_method
                    .entry(r.method.tag())
                    .or_insert_with(|| Latencies(Vec::new()))
                    .0
                    .push(took);
                pair_queries.push((a, b, r.distance));
            }
            Err(Error::NotApplicable(_)) => not_applicable += 1,
            Err(e) => return Err(e.into()),
        }
    }
    for (method, latencies) in &mut by_method {
        emit!(out, "bench method={method} {}", latencies.summary());
    }
    if not_applicable > 0 {
        emit!(out, "bench two_word not_applicable={not_applicable}");
    }

    let s = match build_sierpinski(g, t, cli.budget) {
        Ok(s) => s,
        Err(Error::BudgetExceeded { needed, budget }) => {
            emit!(out, "bench oracle=skipped needed={needed} budget={budget}");
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let build = {
        let start = Instant::now();
        black_box(build_sierpinski(g, t, cli.budget)?);
        start.elapsed()
    };
    let mut oracle = Latencies(Vec::new());
    let mut disagree = 0usize;
    for (a, b, formula) in extreme_queries.iter().chain(&pair_queries) {
        let (value, took) = timed(|| s.dist(a, b));
        oracle.0.push(took);
        if value? != *formula {
            disagree += 1;
        }
    }
    emit!(
        out,
        "bench oracle build_ns={} {} disagree={disagree}",
        build.as_nanos(),
        oracle.summary()
    );
    if disagree > 0 {
        return Err(Failure::mismatch(format!(
            "{disagree} recursive answers disagree with the oracle"
        )));
    }
    Ok(())
}

fn export_dot(
    cli: &Cli,
    g: &BaseGraph,
    path: Option<&std::path::Path>,
    out: &mut impl Write,
) -> Outcome {
    let t = level(cli)?;
    let dot = build_sierpinski(g, t, cli.budget)?.to_dot();
    match path {
        Some(path) => std::fs::write(path, dot).map_err(|e| Failure {
            code: 1,
            message: format!("cannot write {}: {e}", path.display()),
        })?,
        None => out.write_all(dot.as_bytes()).map_err(write_failed)?,
    }
    Ok(())
}
