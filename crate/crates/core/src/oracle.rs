//! Explicit construction of `S(G,t)` and brute-force BFS answers.
//!
//! This is the ground truth for every recursive formula in the crate. It is
//! exponential in `t` by nature, so construction is guarded by a vertex budget.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{BaseGraph, Vertex};
use crate::word::Word;

/// Default cap on the number of vertices of a materialized `S(G,t)`.
pub const DEFAULT_BUDGET: u64 = 2_000_000;

/// A materialized `S(G,t)` in compressed adjacency form. Vertex `i` is the
/// word whose mixed-radix value (first letter most significant) is `i`.
#[derive(Debug, Clone)]
pub struct ExplicitSierpinski<'g> {
    base: &'g BaseGraph,
    level: usize,
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

/// `n^t`, or `None` if it does not fit in 128 bits.
pub fn sierpinski_order(n: usize, t: usize) -> Option<u128> {
    (n as u128).checked_pow(u32::try_from(t).ok()?)
}

/// Builds `S(G,t)` by the copy construction: `n` shifted copies of
/// `S(G,t-1)` plus one edge `x y^(t-1)` -- `y x^(t-1)` per base edge `{x,y}`.
pub fn build_sierpinski(g: &BaseGraph, t: usize, budget: u64) -> Result<ExplicitSierpinski<'_>> {
    let n = g.order();
    if n < 2 {
        return Err(Error::not_applicable(
            "base graph must have at least two vertices",
        ));
    }
    if t == 0 {
        return Err(Error::InvalidWord("level must be at least 1".into()));
    }
    if !g.is_connected() {
        return Err(Error::Validation("base graph is disconnected".into()));
    }
    let needed = sierpinski_order(n, t).unwrap_or(u128::MAX);
    if needed > budget as u128 || needed > u32::MAX as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }

    let mut edges: Vec<(u32, u32)> = g.edges().map(|(u, v)| (u as u32, v as u32)).collect();
    // At level k: block = n^(k-1) and repunit = index of 1^(k-1) = (n^(k-1) - 1) / (n - 1).
    let (mut block, mut repunit) = (n as u32, 1u32);
    for _ in 2..=t {
        let prev = edges.len();
        edges.reserve(prev * (n - 1) + g.edge_count());
        for x in 1..n as u32 {
            let shift = x * block;
            for i in 0..prev {
                let (a, b) = edges[i];
                edges.push((a + shift, b + shift));
            }
        }
        for (x, y) in g.edges() {
            let (x, y) = (x as u32, y as u32);
            edges.push((x * block + y * repunit, y * block + x * repunit));
        }
        repunit = repunit * n as u32 + 1;
        block *= n as u32;
    }
    let order = block as usize;

    let mut offsets = vec![0u32; order + 1];
    for &(a, b) in &edges {
        offsets[a as usize + 1] += 1;
        offsets[b as usize + 1] += 1;
    }
    for i in 0..order {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut targets = vec![0u32; edges.len() * 2];
    for &(a, b) in &edges {
        targets[fill[a as usize] as usize] = b;
        fill[a as usize] += 1;
        targets[fill[b as usize] as usize] = a;
        fill[b as usize] += 1;
    }
    for i in 0..order {
        targets[offsets[i] as usize..offsets[i + 1] as usize].sort_unstable();
    }
    Ok(ExplicitSierpinski {
        base: g,
        level: t,
        offsets,
        targets,
    })
}

impl<'g> ExplicitSierpinski<'g> {
    pub fn base(&self) -> &'g BaseGraph {
        self.base
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn order(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    pub fn index_of(&self, w: &Word) -> Result<usize> {
        if w.len() != self.level {
            return Err(Error::LengthMismatch {
                left: w.len(),
                right: self.level,
            });
        }
        w.check_alphabet(self.base.order())?;
        Ok(w.index(self.base.order()))
    }

    pub fn word_at(&self, index: usize) -> Word {
        Word::from_index(index, self.base.order(), self.level)
    }

    /// BFS from `src` into caller-owned buffers; `dist` is resized and filled.
    /// Every vertex enters the queue once, so a flat array serves as the FIFO.
    pub fn bfs_into(&self, src: usize, dist: &mut Vec<u32>, queue: &mut Vec<u32>) {
        dist.clear();
        dist.resize(self.order(), u32::MAX);
        queue.clear();
        dist[src] = 0;
        queue.push(src as u32);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            let du = dist[u] + 1;
            let (lo, hi) = (self.offsets[u] as usize, self.offsets[u + 1] as usize);
            for &v in &self.targets[lo..hi] {
                let slot = &mut dist[v as usize];
                if *slot == u32::MAX {
                    *slot = du;
                    queue.push(v);
                }
            }
        }
    }

    pub fn bfs(&self, src: usize) -> Vec<u32> {
        let mut dist = Vec::new();
        self.bfs_into(src, &mut dist, &mut Vec::new());
        dist
    }

    /// Ground-truth distance between two words.
    pub fn dist(&self, a: &Word, b: &Word) -> Result<u64> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        Ok(self.bfs(ia)[ib] as u64)
    }

    /// One BFS shortest path, endpoints included.
    pub fn shortest_path(&self, a: &Word, b: &Word) -> Result<Vec<Word>> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        let mut parent = vec![u32::MAX; self.order()];
        let mut queue = VecDeque::new();
        parent[ia] = ia as u32;
        queue.push_back(ia as u32);
        while let Some(u) = queue.pop_front() {
            if u as usize == ib {
                break;
            }
            for &v in self.neighbors(u as usize) {
                if parent[v as usize] == u32::MAX {
                    parent[v as usize] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![ib];
        let mut cur = ib;
        while cur != ia {
            cur = parent[cur] as usize;
            path.push(cur);
        }
        path.reverse();
        Ok(path.into_iter().map(|i| self.word_at(i)).collect())
    }

    pub fn eccentricity(&self, w: &Word) -> Result<u64> {
        let i = self.index_of(w)?;
        Ok(self.bfs(i).into_iter().max().unwrap_or(0) as u64)
    }

    /// Eccentricity of every vertex, by BFS from each one.
    pub fn eccentricities(&self) -> Vec<u64> {
        let mut dist = Vec::new();
        let mut queue = Vec::new();
        (0..self.order())
            .map(|s| {
                self.bfs_into(s, &mut dist, &mut queue);
                dist.iter().copied().max().unwrap_or(0) as u64
            })
            .collect()
    }

    pub fn diameter(&self) -> u64 {
        self.eccentricities().into_iter().max().unwrap_or(0)
    }

    pub fn radius(&self) -> u64 {
        self.eccentricities().into_iter().min().unwrap_or(0)
    }

    /// Graphviz rendering: nodes by index, labelled with their words; edges
    /// as `u -- v` with `u < v`, sorted. Byte-stable for a given input.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph sierpinski {{");
        for i in 0..self.order() {
            let _ = writeln!(out, "  {i} [label=\"{}\"];", self.word_at(i));
        }
        for u in 0..self.order() {
            for &v in self.neighbors(u) {
                if (u as u32) < v {
                    let _ = writeln!(out, "  {u} -- {v};");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Adjacency straight from the defining edge set
/// `{ w u_i u_j^(d-1), w u_j u_i^(d-1) }` with `{u_i, u_j}` an edge of `G`.
pub fn adjacent_by_definition(g: &BaseGraph, a: &Word, b: &Word) -> bool {
    let (a, b) = (a.letters(), b.letters());
    if a.len() != b.len() {
        return false;
    }
    let Some(i) = a.iter().zip(b).position(|(x, y)| x != y) else {
        return false;
    };
    let (x, y) = (a[i], b[i]);
    g.has_edge(x, y) && a[i + 1..].iter().all(|&u| u == y) && b[i + 1..].iter().all(|&u| u == x)
}

/// The base-graph path traced by the first letters along a path of
/// `S(G,t)`, with consecutive repeats collapsed.
pub fn g_path(g: &BaseGraph, path: &[Word]) -> Result<Vec<Vertex>> {
    let Some(first) = path.first() else {
        return Err(Error::NotAPath("empty sequence".into()));
    };
    first.check_alphabet(g.order())?;
    let mut out = vec![first.letter(1)];
    for pair in path.windows(2) {
        if !adjacent_by_definition(g, &pair[0], &pair[1]) {
            return Err(Error::NotAPath(format!(
                "{} and {} are not adjacent",
                pair[0], pair[1]
            )));
        }
        let lead = pair[1].letter(1);
        if *out.last().unwrap() != lead {
            out.push(lead);
        }
    }
    Ok(out)
}
