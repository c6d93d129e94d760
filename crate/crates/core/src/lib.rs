//! Exact distances, eccentricities, diameter and radius in generalized
//! Sierpiński graphs `S(G,t)`.
//!
//! Vertices of `S(G,t)` are words of length `t` over the vertices of a base
//! graph `G`. The [`recursive`] module evaluates distances without building
//! the `n^t`-vertex graph; [`oracle`] builds it explicitly and runs BFS, for
//! small instances and cross-checks.

pub mod error;
pub mod graph;
pub mod oracle;
pub mod recursive;
pub mod trees;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use graph::{BaseGraph, PathMeta, Vertex};
pub use oracle::{build_sierpinski, ExplicitSierpinski, DEFAULT_BUDGET};
pub use recursive::{best_dist, DistOptions, Method, QueryResult};
pub use trees::{LevelMetrics, TreeBase};
pub use word::{split_common_prefix, PrefixSplit, Word, MAX_LEVEL};
