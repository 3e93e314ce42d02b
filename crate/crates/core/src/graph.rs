//! Simple connected undirected graphs, the standard families, and the
//! edge-list text format.
//!
//! Edge-list format: the first non-comment line holds the vertex count `n`;
//! every later non-empty line holds two whitespace separated 0-based vertex
//! labels. Lines starting with `#` are ignored.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
}

/// Standard graph families with their parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Complete { n: usize },
    Path { n: usize },
    Cycle { n: usize },
    /// Vertex 0 is the universal vertex.
    Star { n: usize },
    /// Part U is `[0, m)`, part V is `[m, m + n)`.
    CompleteBipartite { m: usize, n: usize },
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges, out-of-range labels and disconnected inputs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("graph must have at least one vertex"));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::domain(format!(
                    "edge ({u}, {v}) has a vertex outside [0, {n})"
                )));
            }
            if u == v {
                return Err(Error::domain(format!("self-loop at vertex {u}")));
            }
            if adj[u].contains(&v) {
                return Err(Error::domain(format!("duplicate edge ({u}, {v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let g = Graph { n, adj };
        if !g.is_connected() {
            return Err(Error::domain("graph is disconnected"));
        }
        Ok(g)
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse = |tok: &str| {
                tok.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("expected a non-negative integer, found {tok:?}"),
                })
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            match n {
                None => {
                    if toks.len() != 1 {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: "first line must hold only the vertex count".into(),
                        });
                    }
                    n = Some(parse(toks[0])?);
                }
                Some(_) => {
                    if toks.len() != 2 {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("expected two vertex labels, found {}", toks.len()),
                        });
                    }
                    edges.push((parse(toks[0])?, parse(toks[1])?));
                }
            }
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            msg: "missing vertex count".into(),
        })?;
        Graph::from_edges(n, &edges)
    }

    pub fn family(f: Family) -> Result<Self> {
        match f {
            Family::Complete { n } => {
                need(n >= 2, "complete graph needs n >= 2")?;
                let edges: Vec<_> = (0..n)
                    .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                    .collect();
                Graph::from_edges(n, &edges)
            }
            Family::Path { n } => {
                need(n >= 2, "path needs n >= 2")?;
                let edges: Vec<_> = (0..n - 1).map(|u| (u, u + 1)).collect();
                Graph::from_edges(n, &edges)
            }
            Family::Cycle { n } => {
                need(n >= 3, "cycle needs n >= 3")?;
                let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
                Graph::from_edges(n, &edges)
            }
            Family::Star { n } => {
                need(n >= 2, "star needs n >= 2")?;
                let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
                Graph::from_edges(n, &edges)
            }
            Family::CompleteBipartite { m, n } => {
                need(m >= 1 && n >= 1, "complete bipartite needs m, n >= 1")?;
                let edges: Vec<_> = (0..m)
                    .flat_map(|u| (m..m + n).map(move |v| (u, v)))
                    .collect();
                Graph::from_edges(m + n, &edges)
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Serializes back to the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

fn need(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::domain(msg))
    }
}

impl Family {
    pub fn vertex_count(&self) -> usize {
        match *self {
            Family::Complete { n }
            | Family::Path { n }
            | Family::Cycle { n }
            | Family::Star { n } => n,
            Family::CompleteBipartite { m, n } => m + n,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Complete { n } => write!(f, "complete:{n}"),
            Family::Path { n } => write!(f, "path:{n}"),
            Family::Cycle { n } => write!(f, "cycle:{n}"),
            Family::Star { n } => write!(f, "star:{n}"),
            Family::CompleteBipartite { m, n } => write!(f, "complete_bipartite:{m},{n}"),
        }
    }
}

/// Parses `name:params`, e.g. `complete:32`, `star:5`,
/// `complete_bipartite:16,16`.
impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse { line: 0, msg };
        let (name, params) = s
            .split_once(':')
            .ok_or_else(|| bad(format!("family {s:?} must look like name:params")))?;
        let nums = params
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| bad(format!("bad family parameter {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let one = |nums: &[usize]| -> Result<usize> {
            match nums {
                [n] => Ok(*n),
                _ => Err(bad(format!("family {name} takes one parameter"))),
            }
        };
        match name {
            "complete" | "K" => Ok(Family::Complete { n: one(&nums)? }),
            "path" => Ok(Family::Path { n: one(&nums)? }),
            "cycle" => Ok(Family::Cycle { n: one(&nums)? }),
            "star" => Ok(Family::Star { n: one(&nums)? }),
            "complete_bipartite" | "bipartite" => match nums[..] {
                [m, n] => Ok(Family::CompleteBipartite { m, n }),
                _ => Err(bad("complete_bipartite takes two parameters m,n".into())),
            },
            other => Err(bad(format!("unknown family {other:?}"))),
        }
    }
}
