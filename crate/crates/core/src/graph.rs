//! Base graphs and the shortest-path metadata the distance recursions consume.
//!
//! A [`BaseGraph`] is immutable once loaded. Everything derived from it
//! (all-pairs distances, neighbor sets on geodesics, structural predicates)
//! is computed on first use and cached inside the graph, so repeated queries
//! against the same base never redo a BFS.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub type Vertex = usize;

/// Default bound on DFS node expansions when enumerating paths of length `d + 1`.
pub const DEFAULT_SEARCH_CAP: u64 = 10_000_000;

const UNREACHABLE: u32 = u32::MAX;

/// A simple undirected graph on the vertices `0..n`.
#[derive(Debug, Clone)]
pub struct BaseGraph {
    adjacency: Vec<Vec<Vertex>>,
    edge_count: usize,
    search_cap: u64,
    cache: Cache,
}

#[derive(Debug, Clone, Default)]
struct Cache {
    metric: OnceLock<Metric>,
    classes: OnceLock<Classes>,
    on_cycle: OnceLock<Vec<bool>>,
    pair_paths: OnceLock<Vec<OnceLock<PairPaths>>>,
}

#[derive(Debug, Clone, Copy)]
struct Classes {
    connected: bool,
    bipartite: bool,
    triangle_free: bool,
}

/// All-pairs distances plus, for every ordered pair `(x, y)`, the neighbors
/// of `y` that lie on a shortest `x`-`y` path.
#[derive(Debug, Clone)]
pub(crate) struct Metric {
    n: usize,
    dist: Vec<u32>,
    nu_start: Vec<u32>,
    nu: Vec<Vertex>,
    diameter: Option<u32>,
}

impl Metric {
    #[inline]
    pub(crate) fn dist(&self, x: Vertex, y: Vertex) -> u32 {
        self.dist[x * self.n + y]
    }

    #[inline]
    pub(crate) fn nu(&self, x: Vertex, y: Vertex) -> &[Vertex] {
        let k = x * self.n + y;
        &self.nu[self.nu_start[k] as usize..self.nu_start[k + 1] as usize]
    }

    pub(crate) fn order(&self) -> usize {
        self.n
    }

    /// `None` when the graph is disconnected.
    pub(crate) fn diameter(&self) -> Option<u32> {
        self.diameter
    }
}

/// Endpoint-neighbor pairs of the shortest paths and of the simple paths one
/// edge longer, for one ordered pair of distinct vertices.
#[derive(Debug, Clone, Default)]
pub(crate) struct PairPaths {
    pub(crate) phi: Vec<(Vertex, Vertex)>,
    pub(crate) phi_prime: Vec<(Vertex, Vertex)>,
}

/// Distance between two base vertices together with the neighbor sets used
/// by the extreme-vertex recursion (`nu`) and the two-word recursion
/// (`phi`, `phi_prime`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathMeta {
    /// `d_G(x, y)`.
    pub d: u64,
    /// Neighbors of `y` on some shortest `x`-`y` path, sorted.
    pub nu: Vec<Vertex>,
    /// Pairs `(x', y')` of neighbors of `x` and `y` on a common shortest path, sorted.
    pub phi: Vec<(Vertex, Vertex)>,
    /// Pairs `(x'', y'')` taken from simple `x`-`y` paths of length `d + 1`, sorted.
    pub phi_prime: Vec<(Vertex, Vertex)>,
}

impl BaseGraph {
    /// Builds a graph from an explicit edge list, rejecting self-loops,
    /// duplicate edges and out-of-range ids.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation(
                "graph must have at least one vertex".into(),
            ));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Validation(format!(
                    "edge {u} {v}: vertex id out of range for n={n}"
                )));
            }
            if u == v {
                return Err(Error::Validation(format!("self-loop at vertex {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (u.min(w[0]), u.max(w[0]));
                return Err(Error::Validation(format!("duplicate edge {a} {b}")));
            }
        }
        Ok(Self {
            adjacency,
            edge_count: edges.len(),
            search_cap: DEFAULT_SEARCH_CAP,
            cache: Cache::default(),
        })
    }

    /// Parses the edge-list format: a header line `n m`, then `m` lines
    /// `u v`. Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (header_line, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing header line \"n m\""))?;
        let (n, m) = parse_pair(header_line, header)?;

        let mut edges = Vec::with_capacity(m);
        for (line_no, line) in lines {
            if edges.len() == m {
                return Err(Error::parse(line_no, format!("more than {m} edge lines")));
            }
            edges.push(parse_pair(line_no, line)?);
        }
        if edges.len() != m {
            return Err(Error::parse(
                text.lines().count().max(1),
                format!("expected {m} edge lines, found {}", edges.len()),
            ));
        }
        Self::from_edges(n, &edges)
    }

    /// Sets the node-expansion bound used when enumerating paths of length
    /// `d + 1`. Clears nothing: previously cached metadata stays valid.
    pub fn with_search_cap(mut self, cap: u64) -> Self {
        self.search_cap = cap;
        self
    }

    pub fn order(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub(crate) fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.order() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.order(),
            })
        }
    }

    /// BFS distances from `src`; `None` marks unreachable vertices.
    pub fn bfs(&self, src: Vertex) -> Vec<Option<u64>> {
        bfs_raw(&self.adjacency, src)
            .into_iter()
            .map(|d| (d != UNREACHABLE).then_some(d as u64))
            .collect()
    }

    pub(crate) fn metric(&self) -> &Metric {
        self.cache
            .metric
            .get_or_init(|| build_metric(&self.adjacency))
    }

    /// `d_G(x, y)`.
    pub fn dist(&self, x: Vertex, y: Vertex) -> Result<u64> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        match self.metric().dist(x, y) {
            UNREACHABLE => Err(Error::Unreachable { x, y }),
            d => Ok(d as u64),
        }
    }

    /// Distance plus the neighbors of `y` lying on shortest `x`-`y` paths.
    pub fn dist_star(&self, x: Vertex, y: Vertex) -> Result<PathMeta> {
        let d = self.dist_distinct(x, y)?;
        Ok(PathMeta {
            d,
            nu: self.metric().nu(x, y).to_vec(),
            ..PathMeta::default()
        })
    }

    /// Distance plus the endpoint-neighbor pairs of all shortest `x`-`y`
    /// paths and of all simple `x`-`y` paths of length `d + 1`.
    pub fn dist_double_star(&self, x: Vertex, y: Vertex) -> Result<PathMeta> {
        let d = self.dist_distinct(x, y)?;
        let paths = self.pair_paths(x, y)?;
        Ok(PathMeta {
            d,
            nu: self.metric().nu(x, y).to_vec(),
            phi: paths.phi.clone(),
            phi_prime: paths.phi_prime.clone(),
        })
    }

    fn dist_distinct(&self, x: Vertex, y: Vertex) -> Result<u64> {
        let d = self.dist(x, y)?;
        if x == y {
            return Err(Error::IdenticalEndpoints(x));
        }
        Ok(d)
    }

    /// Cached `phi` / `phi_prime` for a pair of distinct, mutually reachable vertices.
    pub(crate) fn pair_paths(&self, x: Vertex, y: Vertex) -> Result<&PairPaths> {
        let n = self.order();
        let cells = self
            .cache
            .pair_paths
            .get_or_init(|| (0..n * n).map(|_| OnceLock::new()).collect());
        let cell = &cells[x * n + y];
        if let Some(paths) = cell.get() {
            return Ok(paths);
        }
        let computed = self.compute_pair_paths(x, y)?;
        // A concurrent writer computes the same value; either copy is fine.
        let _ = cell.set(computed);
        Ok(cell.get().expect("cell was just filled"))
    }

    fn compute_pair_paths(&self, x: Vertex, y: Vertex) -> Result<PairPaths> {
        let metric = self.metric();
        let d = metric.dist(x, y);
        debug_assert!(d != UNREACHABLE && x != y);

        let phi = if d == 1 {
            vec![(y, x)]
        } else {
            let mut phi = Vec::new();
            for &a in self.neighbors(x) {
                if metric.dist(a, y) != d - 1 {
                    continue;
                }
                for &b in self.neighbors(y) {
                    if metric.dist(x, b) == d - 1 && metric.dist(a, b) == d - 2 {
                        phi.push((a, b));
                    }
                }
            }
            phi
        };

        let mut search = ExactLengthSearch {
            graph: self,
            metric,
            visited: vec![false; self.order()],
            expansions: 0,
            cap: self.search_cap,
        };
        search.visited[x] = true;
        search.visited[y] = true;
        let mut phi_prime = Vec::new();
        // The interior of an x-y path of length d + 1 runs from a to b in d - 1 steps.
        let inner = d - 1;
        for &a in self.neighbors(x) {
            if a == y {
                continue;
            }
            for &b in self.neighbors(y) {
                if b == x || metric.dist(a, b) > inner {
                    continue;
                }
                if search.exists(a, b, inner)? {
                    phi_prime.push((a, b));
                }
            }
        }
        Ok(PairPaths { phi, phi_prime })
    }

    fn classes(&self) -> Classes {
        *self.cache.classes.get_or_init(|| Classes {
            connected: self.metric().diameter().is_some(),
            bipartite: two_colorable(&self.adjacency),
            triangle_free: self
                .edges()
                .all(|(u, v)| !sorted_intersect(&self.adjacency[u], &self.adjacency[v])),
        })
    }

    pub fn is_connected(&self) -> bool {
        self.classes().connected
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edge_count + 1 == self.order()
    }

    pub fn is_bipartite(&self) -> bool {
        self.classes().bipartite
    }

    pub fn is_triangle_free(&self) -> bool {
        self.classes().triangle_free
    }

    /// True when every edge at `x` is a bridge, i.e. `x` is on no cycle.
    pub fn lies_on_no_cycle(&self, x: Vertex) -> bool {
        !self
            .cache
            .on_cycle
            .get_or_init(|| cycle_vertices(&self.adjacency))[x]
    }

    /// `true` when every pair of vertices is adjacent.
    pub fn is_complete(&self) -> bool {
        let n = self.order();
        self.edge_count == n * (n - 1) / 2
    }

    /// `D(G)`, or `None` if the graph is disconnected.
    pub fn diameter(&self) -> Option<u64> {
        self.metric().diameter().map(u64::from)
    }

    /// Eccentricity of `v`, or `None` if the graph is disconnected.
    pub fn eccentricity(&self, v: Vertex) -> Option<u64> {
        let metric = self.metric();
        metric.diameter()?;
        (0..self.order()).map(|u| metric.dist(v, u) as u64).max()
    }
}

impl FromStr for BaseGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for BaseGraph {
    /// Writes the graph back out in edge-list format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.order(), self.edge_count)?;
        for (u, v) in self.edges() {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

fn parse_pair(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let mut fields = line.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        let tok = fields
            .next()
            .ok_or_else(|| Error::parse(line_no, format!("missing {what}")))?;
        tok.parse().map_err(|_| {
            Error::parse(
                line_no,
                format!("{what} is not a non-negative integer: {tok:?}"),
            )
        })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if fields.next().is_some() {
        return Err(Error::parse(line_no, "expected exactly two fields"));
    }
    Ok((a, b))
}

fn bfs_raw(adjacency: &[Vec<Vertex>], src: Vertex) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; adjacency.len()];
    let mut queue = VecDeque::new();
    dist[src] = 0;
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if dist[v] == UNREACHABLE {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn build_metric(adjacency: &[Vec<Vertex>]) -> Metric {
    let n = adjacency.len();
    let mut dist = Vec::with_capacity(n * n);
    for x in 0..n {
        dist.extend(bfs_raw(adjacency, x));
    }
    let mut nu_start = Vec::with_capacity(n * n + 1);
    let mut nu = Vec::new();
    nu_start.push(0);
    for x in 0..n {
        for y in 0..n {
            let d = dist[x * n + y];
            if x != y && d != UNREACHABLE {
                nu.extend(
                    adjacency[y]
                        .iter()
                        .copied()
                        .filter(|&v| dist[x * n + v] + 1 == d),
                );
            }
            nu_start.push(nu.len() as u32);
        }
    }
    let diameter = if dist.contains(&UNREACHABLE) {
        None
    } else {
        dist.iter().copied().max()
    };
    Metric {
        n,
        dist,
        nu_start,
        nu,
        diameter,
    }
}

/// Depth-bounded DFS for a simple path of an exact length whose interior
/// avoids the vertices already marked as visited.
struct ExactLengthSearch<'a> {
    graph: &'a BaseGraph,
    metric: &'a Metric,
    visited: Vec<bool>,
    expansions: u64,
    cap: u64,
}

impl ExactLengthSearch<'_> {
    fn exists(&mut self, from: Vertex, to: Vertex, steps: u32) -> Result<bool> {
        if self.visited[from] {
            return Ok(false);
        }
        if steps == 0 {
            return Ok(from == to);
        }
        if from == to || self.metric.dist(from, to) > steps {
            return Ok(false);
        }
        self.expansions += 1;
        if self.expansions > self.cap {
            return Err(Error::SearchLimit { cap: self.cap });
        }
        self.visited[from] = true;
        let mut found = false;
        for &next in self.graph.neighbors(from) {
            if self.exists(next, to, steps - 1)? {
                found = true;
                break;
            }
        }
        self.visited[from] = false;
        Ok(found)
    }
}

fn two_colorable(adjacency: &[Vec<Vertex>]) -> bool {
    let n = adjacency.len();
    let mut color = vec![u8::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if color[v] == u8::MAX {
                    color[v] = 1 - color[u];
                    queue.push_back(v);
                } else if color[v] == color[u] {
                    return false;
                }
            }
        }
    }
    true
}

fn sorted_intersect(a: &[Vertex], b: &[Vertex]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Marks every vertex incident to a non-bridge edge (low-link DFS, iterative).
fn cycle_vertices(adjacency: &[Vec<Vertex>]) -> Vec<bool> {
    let n = adjacency.len();
    let mut on_cycle = vec![false; n];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    // (vertex, parent, next neighbor index)
    let mut stack: Vec<(Vertex, Vertex, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(top) = stack.last_mut() {
            let (u, parent, next) = *top;
            if let Some(&v) = adjacency[u].get(next) {
                top.2 += 1;
                if v == parent {
                    continue;
                }
                if disc[v] == usize::MAX {
                    disc[v] = time;
                    low[v] = time;
                    time += 1;
                    stack.push((v, u, 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[u]);
                    if low[u] <= disc[parent] {
                        // tree edge parent-u is not a bridge
                        on_cycle[u] = true;
                        on_cycle[parent] = true;
                    }
                }
            }
        }
    }
    // A back edge u-v puts the whole tree path v..u on a cycle, so both of
    // its endpoints were already marked through non-bridge tree edges.
    on_cycle
}
