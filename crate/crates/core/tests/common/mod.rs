//! Base graphs shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sierpdist::BaseGraph;

/// Largest `n^t` swept exhaustively.
pub const SWEEP_BUDGET: u64 = 50_000;

pub struct Named {
    pub name: String,
    pub graph: BaseGraph,
}

pub fn graph(n: usize, edges: &[(usize, usize)]) -> BaseGraph {
    BaseGraph::from_edges(n, edges).expect("valid test graph")
}

pub fn path(n: usize) -> BaseGraph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    graph(n, &edges)
}

pub fn cycle(n: usize) -> BaseGraph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    graph(n, &edges)
}

pub fn complete(n: usize) -> BaseGraph {
    let edges: Vec<_> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    graph(n, &edges)
}

/// `K_{1,leaves}` with the center at 0.
pub fn star(leaves: usize) -> BaseGraph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    graph(leaves + 1, &edges)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> BaseGraph {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    BaseGraph::parse(&text).expect("fixture parses")
}

fn relabel(n: usize, edges: &[(usize, usize)], rng: &mut ChaCha8Rng) -> BaseGraph {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let edges: Vec<_> = edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
    graph(n, &edges)
}

fn random_tree_edges(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    (1..n).map(|i| (rng.gen_range(0..i), i)).collect()
}

/// Uniform attachment, then a random relabelling.
pub fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> BaseGraph {
    let edges = random_tree_edges(n, rng);
    relabel(n, &edges, rng)
}

/// A random spanning tree plus each remaining pair, in random order, with
/// probability 1/2 unless it would close a triangle.
pub fn random_triangle_free(n: usize, rng: &mut ChaCha8Rng) -> BaseGraph {
    let mut edges = random_tree_edges(n, rng);
    let mut adjacent = vec![vec![false; n]; n];
    for &(u, v) in &edges {
        adjacent[u][v] = true;
        adjacent[v][u] = true;
    }
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !adjacent[i][j])
        .collect();
    candidates.shuffle(rng);
    for (u, v) in candidates {
        let closes_triangle = (0..n).any(|w| adjacent[u][w] && adjacent[v][w]);
        if !closes_triangle && rng.gen_bool(0.5) {
            adjacent[u][v] = true;
            adjacent[v][u] = true;
            edges.push((u, v));
        }
    }
    relabel(n, &edges, rng)
}

/// A random connected graph: spanning tree plus each other pair with probability `p`.
pub fn random_connected(n: usize, p: f64, rng: &mut ChaCha8Rng) -> BaseGraph {
    let mut edges = random_tree_edges(n, rng);
    let present: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
    for i in 0..n {
        for j in i + 1..n {
            if !present.contains(&(i, j)) && rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    relabel(n, &edges, rng)
}

fn edge_key(g: &BaseGraph) -> (usize, Vec<(usize, usize)>) {
    let mut edges: Vec<_> = g.edges().collect();
    edges.sort_unstable();
    (g.order(), edges)
}

/// The sweep corpus. Identical edge lists are swept once under a joined
/// name; `K2` and `P2`, for instance, are the same graph.
pub fn corpus() -> Vec<Named> {
    let mut list: Vec<Named> = Vec::new();
    let mut push = |name: String, graph: BaseGraph| {
        let key = edge_key(&graph);
        if let Some(existing) = list.iter_mut().find(|e| edge_key(&e.graph) == key) {
            existing.name = format!("{}={}", existing.name, name);
        } else {
            list.push(Named { name, graph });
        }
    };
    for n in 2..=6 {
        push(format!("P{n}"), path(n));
    }
    for n in 4..=7 {
        push(format!("C{n}"), cycle(n));
    }
    for leaves in [3, 4] {
        push(format!("K1,{leaves}"), star(leaves));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e7a_11ce);
    for i in 0..20 {
        let n = rng.gen_range(3..=8);
        push(format!("tree{i}(n={n})"), random_tree(n, &mut rng));
    }
    for i in 0..20 {
        let n = rng.gen_range(4..=8);
        push(
            format!("trifree{i}(n={n})"),
            random_triangle_free(n, &mut rng),
        );
    }
    for n in 2..=5 {
        push(format!("K{n}"), complete(n));
    }
    push("fig1".into(), fixture("fig1.el"));
    push("fig2".into(), fixture("fig2.el"));
    list
}
