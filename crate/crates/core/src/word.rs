//! Vertices of `S(G,t)` as length-`t` words over the base vertex ids.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::Vertex;

/// Largest supported level; closed forms scale like `2^t`.
pub const MAX_LEVEL: usize = 62;

/// A vertex `u_1 u_2 ... u_t` of `S(G,t)`, with `u_1` the most significant letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Vertex>);

/// Where two words of equal length first differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrefixSplit<'a> {
    /// 1-based index of the first differing letter, `t + 1` when the words are equal.
    pub j: usize,
    pub shared_prefix: &'a [Vertex],
}

impl Word {
    pub fn new(letters: Vec<Vertex>) -> Result<Self> {
        check_level(letters.len())?;
        Ok(Word(letters))
    }

    /// `x^t`.
    pub fn extreme(x: Vertex, t: usize) -> Result<Self> {
        Self::new(vec![x; t])
    }

    /// Parses `"u1,u2,...,ut"` and checks the arity and that every letter is below `n`.
    pub fn parse(text: &str, n: usize, t: usize) -> Result<Self> {
        let letters = text
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<Vertex>()
                    .map_err(|_| Error::InvalidWord(format!("{tok:?} is not a vertex id")))
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.len() != t {
            return Err(Error::InvalidWord(format!(
                "{text:?} has {} letters, expected {t}",
                letters.len()
            )));
        }
        if let Some(&bad) = letters.iter().find(|&&u| u >= n) {
            return Err(Error::InvalidWord(format!(
                "letter {bad} out of range for a base graph of order {n}"
            )));
        }
        Self::new(letters)
    }

    pub fn letters(&self) -> &[Vertex] {
        &self.0
    }

    /// The level `t`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based letter access, mirroring `u_i`.
    pub fn letter(&self, i: usize) -> Vertex {
        self.0[i - 1]
    }

    pub fn is_extreme(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// The word with letter `x` prepended; one level up.
    pub fn prepend(&self, x: Vertex) -> Result<Self> {
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.push(x);
        letters.extend_from_slice(&self.0);
        Self::new(letters)
    }

    /// Letters `u_{i}..u_t` (1-based `i`) as a word one or more levels down.
    pub fn suffix(&self, i: usize) -> Result<Self> {
        Self::new(self.0[i - 1..].to_vec())
    }

    /// Dense mixed-radix index `sum u_i * n^(t-i)`.
    pub fn index(&self, n: usize) -> usize {
        self.0.iter().fold(0, |acc, &u| acc * n + u)
    }

    /// Inverse of [`Word::index`].
    pub fn from_index(mut index: usize, n: usize, t: usize) -> Self {
        let mut letters = vec![0; t];
        for slot in letters.iter_mut().rev() {
            *slot = index % n;
            index /= n;
        }
        Word(letters)
    }

    pub(crate) fn check_alphabet(&self, n: usize) -> Result<()> {
        match self.0.iter().find(|&&u| u >= n) {
            Some(&bad) => Err(Error::InvalidWord(format!(
                "letter {bad} out of range for a base graph of order {n}"
            ))),
            None => Ok(()),
        }
    }
}

fn check_level(t: usize) -> Result<()> {
    if t == 0 || t > MAX_LEVEL {
        return Err(Error::InvalidWord(format!(
            "level {t} outside 1..={MAX_LEVEL}"
        )));
    }
    Ok(())
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, u) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{u}")?;
        }
        Ok(())
    }
}

impl AsRef<[Vertex]> for Word {
    fn as_ref(&self) -> &[Vertex] {
        &self.0
    }
}

/// Locates the first letter where `a` and `b` differ.
pub fn split_common_prefix<'a>(a: &'a Word, b: &Word) -> Result<PrefixSplit<'a>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let k = common_prefix_len(&a.0, &b.0);
    Ok(PrefixSplit {
        j: k + 1,
        shared_prefix: &a.0[..k],
    })
}

#[inline]
pub(crate) fn common_prefix_len(a: &[Vertex], b: &[Vertex]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}
