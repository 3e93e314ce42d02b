//! Properly ordered state spaces.
//!
//! A full space lists all `2^n` colorings. The collapsed spaces for the
//! complete graph, the star and the complete bipartite graph are described by
//! a partition of the vertices into *cells* whose members are interchangeable
//! under a graph automorphism; a collapsed state records how many vertices of
//! each cell are blue.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Family, Graph};

/// Default vertex cap for full enumeration (16384 states).
pub const DEFAULT_FULL_CAP: usize = 14;
/// Hard limit regardless of configuration; the index table has `2^n` slots.
pub const MAX_FULL_CAP: usize = 26;

/// Set of blue vertices.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ColoringState {
    n: usize,
    words: Vec<u64>,
}

impl ColoringState {
    pub fn empty(n: usize) -> Self {
        ColoringState {
            n,
            words: vec![0; n.div_ceil(64).max(1)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut c = Self::empty(n);
        for v in 0..n {
            c.insert(v);
        }
        c
    }

    pub fn from_vertices(n: usize, vs: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut c = Self::empty(n);
        for v in vs {
            if v >= n {
                return Err(Error::domain(format!("vertex {v} outside [0, {n})")));
            }
            c.insert(v);
        }
        Ok(c)
    }

    /// Coloring whose blue set is the bits of `mask`; `n` must be at most 64.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n <= 64 && (n == 64 || mask >> n == 0));
        let mut c = Self::empty(n);
        c.words[0] = mask;
        c
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.words[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.words[v / 64] |= 1 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        self.words[v / 64] &= !(1 << (v % 64));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.n
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&v| self.contains(v))
    }

    /// The blue set as a bitmask, when `n <= 64`.
    pub fn as_mask(&self) -> Option<u64> {
        (self.n <= 64).then(|| self.words[0])
    }
}

impl fmt::Debug for ColoringState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Full,
    CollapsedComplete,
    CollapsedStar,
    CollapsedBipartite,
}

#[derive(Debug, Clone)]
enum Repr {
    Full {
        masks: Vec<u64>,
        index_of: Vec<u32>,
    },
    Cells {
        cells: Vec<Vec<usize>>,
        counts: Vec<Vec<usize>>,
        /// Mixed-radix code of a count vector to state index.
        index_of: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
pub struct StateSpace {
    n: usize,
    kind: SpaceKind,
    repr: Repr,
    blue_count: Vec<usize>,
}

impl StateSpace {
    pub fn enumerate_full(g: &Graph) -> Result<Self> {
        Self::enumerate_full_with_cap(g, DEFAULT_FULL_CAP)
    }

    /// All `2^n` colorings ordered by blue count, ties broken by mask value.
    pub fn enumerate_full_with_cap(g: &Graph, cap: usize) -> Result<Self> {
        let n = g.vertex_count();
        let cap = cap.min(MAX_FULL_CAP);
        if n > cap {
            return Err(Error::Size(format!(
                "full enumeration of {n} vertices exceeds the cap of {cap}"
            )));
        }
        let mut masks: Vec<u64> = (0..1u64 << n).collect();
        masks.sort_by_key(|&m| (m.count_ones(), m));
        let mut index_of = vec![0u32; masks.len()];
        for (i, &m) in masks.iter().enumerate() {
            index_of[m as usize] = i as u32;
        }
        let blue_count = masks.iter().map(|m| m.count_ones() as usize).collect();
        Ok(StateSpace {
            n,
            kind: SpaceKind::Full,
            repr: Repr::Full { masks, index_of },
            blue_count,
        })
    }

    /// `n + 1` states indexed by blue count.
    pub fn collapsed_complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("collapsed complete space needs n >= 2"));
        }
        Ok(Self::from_cells(
            n,
            SpaceKind::CollapsedComplete,
            vec![(0..n).collect()],
        ))
    }

    /// `(m+1)(n+1)` states indexed by `(b_U, b_V)`.
    pub fn collapsed_bipartite(m: usize, n: usize) -> Result<Self> {
        if m < 1 || n < 1 {
            return Err(Error::domain("collapsed bipartite space needs m, n >= 1"));
        }
        Ok(Self::from_cells(
            m + n,
            SpaceKind::CollapsedBipartite,
            vec![(0..m).collect(), (m..m + n).collect()],
        ))
    }

    /// `2n` states indexed by (universal vertex blue, number of blue leaves).
    pub fn collapsed_star(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain("collapsed star space needs n >= 3"));
        }
        Ok(Self::from_cells(
            n,
            SpaceKind::CollapsedStar,
            vec![vec![0], (1..n).collect()],
        ))
    }

    /// The collapsed space matching a family, if one exists.
    pub fn collapsed_for(f: Family) -> Option<Result<Self>> {
        match f {
            Family::Complete { n } => Some(Self::collapsed_complete(n)),
            Family::Star { n } if n >= 3 => Some(Self::collapsed_star(n)),
            Family::CompleteBipartite { m, n } => Some(Self::collapsed_bipartite(m, n)),
            _ => None,
        }
    }

    fn from_cells(n: usize, kind: SpaceKind, cells: Vec<Vec<usize>>) -> Self {
        let sizes: Vec<usize> = cells.iter().map(Vec::len).collect();
        let mut counts: Vec<Vec<usize>> = vec![vec![]];
        for &size in &sizes {
            counts = counts
                .into_iter()
                .flat_map(|prefix| {
                    (0..=size).map(move |k| {
                        let mut c = prefix.clone();
                        c.push(k);
                        c
                    })
                })
                .collect();
        }
        // total count first, then lexicographic
        counts.sort_by(|a, b| {
            let sa: usize = a.iter().sum();
            let sb: usize = b.iter().sum();
            sa.cmp(&sb).then_with(|| a.cmp(b))
        });
        let radix_len: usize = sizes.iter().map(|s| s + 1).product();
        let mut index_of = vec![0; radix_len];
        for (i, c) in counts.iter().enumerate() {
            index_of[radix_code(&sizes, c)] = i;
        }
        let blue_count = counts.iter().map(|c| c.iter().sum()).collect();
        StateSpace {
            n,
            kind,
            repr: Repr::Cells {
                cells,
                counts,
                index_of,
            },
            blue_count,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    /// Number of states, `s + 1`.
    pub fn len(&self) -> usize {
        self.blue_count.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blue_count.is_empty()
    }

    /// Index `s` of the all-blue state.
    pub fn last(&self) -> usize {
        self.len() - 1
    }

    pub fn blue_count(&self, i: usize) -> usize {
        self.blue_count[i]
    }

    pub fn blue_counts(&self) -> &[usize] {
        &self.blue_count
    }

    pub fn classify(&self, c: &ColoringState) -> Result<usize> {
        if c.vertex_count() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: c.vertex_count(),
            });
        }
        Ok(match &self.repr {
            Repr::Full { index_of, .. } => index_of[c.words[0] as usize] as usize,
            Repr::Cells {
                cells, index_of, ..
            } => {
                let counts: Vec<usize> = cells
                    .iter()
                    .map(|cell| cell.iter().filter(|&&v| c.contains(v)).count())
                    .collect();
                self.index_of_counts_inner(cells, index_of, &counts)
            }
        })
    }

    fn index_of_counts_inner(
        &self,
        cells: &[Vec<usize>],
        index_of: &[usize],
        counts: &[usize],
    ) -> usize {
        let sizes: Vec<usize> = cells.iter().map(Vec::len).collect();
        index_of[radix_code(&sizes, counts)]
    }

    /// State index of a per-cell count vector (collapsed spaces only).
    pub fn index_of_counts(&self, counts: &[usize]) -> Option<usize> {
        match &self.repr {
            Repr::Cells {
                cells, index_of, ..
            } if counts.len() == cells.len()
                && counts.iter().zip(cells).all(|(&k, c)| k <= c.len()) =>
            {
                Some(self.index_of_counts_inner(cells, index_of, counts))
            }
            _ => None,
        }
    }

    /// A coloring in state `i`: the mask itself for full spaces, the first
    /// `k` vertices of each cell for collapsed ones.
    pub fn representative(&self, i: usize) -> ColoringState {
        match &self.repr {
            Repr::Full { masks, .. } => ColoringState::from_mask(self.n, masks[i]),
            Repr::Cells { cells, counts, .. } => {
                let mut c = ColoringState::empty(self.n);
                for (cell, &k) in cells.iter().zip(&counts[i]) {
                    for &v in &cell[..k] {
                        c.insert(v);
                    }
                }
                c
            }
        }
    }

    pub fn mask(&self, i: usize) -> Option<u64> {
        match &self.repr {
            Repr::Full { masks, .. } => Some(masks[i]),
            Repr::Cells { .. } => None,
        }
    }

    /// Cells of a collapsed space.
    pub fn cells(&self) -> Option<&[Vec<usize>]> {
        match &self.repr {
            Repr::Cells { cells, .. } => Some(cells),
            Repr::Full { .. } => None,
        }
    }

    pub fn cell_counts(&self, i: usize) -> Option<&[usize]> {
        match &self.repr {
            Repr::Cells { counts, .. } => Some(&counts[i]),
            Repr::Full { .. } => None,
        }
    }

    /// Short human readable label used in exports.
    pub fn label(&self, i: usize) -> String {
        match &self.repr {
            Repr::Full { masks, .. } => {
                let vs: Vec<String> = (0..self.n)
                    .filter(|v| masks[i] >> v & 1 == 1)
                    .map(|v| v.to_string())
                    .collect();
                format!("{{{}}}", vs.join(" "))
            }
            Repr::Cells { counts, .. } => match self.kind {
                SpaceKind::CollapsedComplete => counts[i][0].to_string(),
                SpaceKind::CollapsedStar => {
                    format!("({}|{})", counts[i][0] == 1, counts[i][1])
                }
                _ => {
                    let parts: Vec<String> = counts[i].iter().map(|k| k.to_string()).collect();
                    format!("({})", parts.join("|"))
                }
            },
        }
    }

    /// Checks that `g` is a graph this space can describe.
    pub fn check_compatible(&self, g: &Graph) -> Result<()> {
        if g.vertex_count() != self.n {
            return Err(Error::Incompatible(format!(
                "state space has {} vertices, graph has {}",
                self.n,
                g.vertex_count()
            )));
        }
        let expected = match self.kind {
            SpaceKind::Full => return Ok(()),
            SpaceKind::CollapsedComplete => Family::Complete { n: self.n },
            SpaceKind::CollapsedStar => Family::Star { n: self.n },
            SpaceKind::CollapsedBipartite => {
                let m = self.cells().map_or(0, |c| c[0].len());
                Family::CompleteBipartite { m, n: self.n - m }
            }
        };
        if Graph::family(expected)? != *g {
            return Err(Error::Incompatible(format!(
                "{:?} space requires the graph {expected}",
                self.kind
            )));
        }
        Ok(())
    }
}

fn radix_code(sizes: &[usize], counts: &[usize]) -> usize {
    sizes
        .iter()
        .zip(counts)
        .fold(0, |acc, (&s, &k)| acc * (s + 1) + k)
}
