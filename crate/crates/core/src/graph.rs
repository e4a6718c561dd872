//! Undirected edge-weighted graphs and the edge-list text format.
//!
//! Vertices are 0-based in memory. The text format uses 1-based ids, and the
//! conversion happens only in [`parse_graph`] and [`Graph::to_edge_list`].

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { line: usize, vertex: i64, n: usize },
    #[error("line {line}: negative weight {weight}")]
    NegativeWeight { line: usize, weight: f64 },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge ({u}, {v})")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("expected {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("graph has no edges")]
    NoEdges,
}

/// An undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Simple undirected graph with non-negative edge weights.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    // dense n*n lookup; None = no edge
    matrix: Vec<Option<f64>>,
}

impl Graph {
    /// Builds a graph from 0-based `(u, v, weight)` triples.
    ///
    /// Errors carry `line: 0` since there is no source text.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut g = Graph {
            n,
            edges: Vec::new(),
            matrix: vec![None; n * n],
        };
        for (u, v, w) in edges {
            g.insert(0, u, v, w)?;
        }
        Ok(g)
    }

    fn insert(&mut self, line: usize, u: usize, v: usize, weight: f64) -> Result<(), GraphError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(GraphError::VertexOutOfRange {
                    line,
                    vertex: x as i64 + 1,
                    n: self.n,
                });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop { line, vertex: u + 1 });
        }
        if !weight.is_finite() {
            return Err(GraphError::Malformed {
                line,
                message: format!("non-finite weight {weight}"),
            });
        }
        if weight < 0.0 {
            return Err(GraphError::NegativeWeight { line, weight });
        }
        if self.matrix[u * self.n + v].is_some() {
            return Err(GraphError::DuplicateEdge {
                line,
                u: u.min(v) + 1,
                v: u.max(v) + 1,
            });
        }
        self.matrix[u * self.n + v] = Some(weight);
        self.matrix[v * self.n + u] = Some(weight);
        self.edges.push(Edge {
            u: u.min(v),
            v: u.max(v),
            weight,
        });
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        if u >= self.n || v >= self.n {
            return None;
        }
        self.matrix[u * self.n + v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.weight(u, v).is_some()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.matrix[u * self.n + v].is_some())
    }

    pub fn degree(&self, u: usize) -> usize {
        self.neighbors(u).count()
    }

    /// True iff every vertex is reachable from vertex 0. Vacuously true for
    /// `n <= 1`.
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    pub fn max_weight(&self) -> Result<f64, GraphError> {
        self.edges
            .iter()
            .map(|e| e.weight)
            .reduce(f64::max)
            .ok_or(GraphError::NoEdges)
    }

    /// True when every edge has weight exactly 1.
    pub fn is_unit_weighted(&self) -> bool {
        self.edges.iter().all(|e| e.weight == 1.0)
    }

    /// Serializes to the edge-list format (1-based ids).
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.u + 1, e.v + 1, e.weight).unwrap();
        }
        out
    }

    /// Same vertex set, every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Graph, GraphError> {
        Graph::new(self.n, self.edges.iter().map(|e| (e.u, e.v, e.weight * factor)))
    }
}

/// Parses the edge-list format: a header `n m`, then `m` lines `u v w` with
/// 1-based vertex ids. Lines starting with `#` and blank lines are skipped.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(GraphError::Malformed {
        line: 1,
        message: "missing header \"n m\"".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(GraphError::Malformed {
            line: header_line,
            message: format!("expected \"n m\", got {header:?}"),
        });
    }
    let n = parse_count(header_line, fields[0])?;
    let m = parse_count(header_line, fields[1])?;

    let mut g = Graph {
        n,
        edges: Vec::with_capacity(m),
        matrix: vec![None; n * n],
    };
    for (line, text) in lines {
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(GraphError::Malformed {
                line,
                message: format!("expected \"u v w\", got {text:?}"),
            });
        }
        let u = parse_vertex(line, fields[0], n)?;
        let v = parse_vertex(line, fields[1], n)?;
        let w: f64 = fields[2].parse().map_err(|_| GraphError::Malformed {
            line,
            message: format!("bad weight {:?}", fields[2]),
        })?;
        g.insert(line, u, v, w)?;
    }
    if g.edges.len() != m {
        return Err(GraphError::EdgeCount {
            expected: m,
            found: g.edges.len(),
        });
    }
    Ok(g)
}

fn parse_count(line: usize, s: &str) -> Result<usize, GraphError> {
    s.parse().map_err(|_| GraphError::Malformed {
        line,
        message: format!("bad count {s:?}"),
    })
}

fn parse_vertex(line: usize, s: &str, n: usize) -> Result<usize, GraphError> {
    let id: i64 = s.parse().map_err(|_| GraphError::Malformed {
        line,
        message: format!("bad vertex id {s:?}"),
    })?;
    if id < 1 || id as u64 > n as u64 {
        return Err(GraphError::VertexOutOfRange { line, vertex: id, n });
    }
    Ok(id as usize - 1)
}
