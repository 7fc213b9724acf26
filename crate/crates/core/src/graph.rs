//! Vertex-colored simple graphs, their rainbows, and a few named graphs.

use crate::coloring::{PairColoring, Tokens};
use crate::error::{parse_err, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<bool>,
    vertex_colors: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum PairLabel {
    Vertex(u32),
    Edge,
    NonEdge,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![false; n * n],
            vertex_colors: vec![0; n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n, "bad edge {u}-{v}");
        self.adj[u * self.n + v] = true;
        self.adj[v * self.n + u] = true;
    }

    pub fn set_color(&mut self, v: usize, k: u32) {
        self.vertex_colors[v] = k;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    pub fn vertex_colors(&self) -> &[u32] {
        &self.vertex_colors
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.adjacent(u, v) {
                    e.push((u, v));
                }
            }
        }
        e
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..self.n).filter(|&u| self.adjacent(v, u)).count()
    }

    /// The rainbow of the graph: vertex-color classes on the diagonal (in
    /// increasing color order), then edges, then non-edges; empty classes
    /// are dropped.
    pub fn rainbow(&self) -> PairColoring {
        PairColoring::from_fn(self.n, |a, b| {
            if a == b {
                PairLabel::Vertex(self.vertex_colors[a])
            } else if self.adjacent(a, b) {
                PairLabel::Edge
            } else {
                PairLabel::NonEdge
            }
        })
    }

    /// Image under the point bijection `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut g = Graph::empty(self.n);
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        for v in 0..self.n {
            g.vertex_colors[perm[v]] = self.vertex_colors[v];
        }
        g
    }

    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let n = self.n + other.n;
        let mut g = Graph::empty(n);
        for (u, v) in self.edges() {
            g.add_edge(u, v);
        }
        for (u, v) in other.edges() {
            g.add_edge(self.n + u, self.n + v);
        }
        g.vertex_colors[..self.n].copy_from_slice(&self.vertex_colors);
        g.vertex_colors[self.n..].copy_from_slice(&other.vertex_colors);
        g
    }

    /// Checks the standard similarity of two graph rainbows: same size, the
    /// same vertex colors, and edges/non-edges present on both sides alike.
    pub fn standard_similarity(&self, other: &Graph) -> Result<()> {
        if self.n != other.n {
            return Err(Error::NoStandardSimilarity(format!(
                "ground sets of size {} and {}",
                self.n, other.n
            )));
        }
        let mut a = self.vertex_colors.clone();
        let mut b = other.vertex_colors.clone();
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        if a != b {
            return Err(Error::NoStandardSimilarity("vertex color sets differ".into()));
        }
        let full = self.n * (self.n - 1) / 2;
        let (ea, eb) = (self.edge_count(), other.edge_count());
        if (ea == 0) != (eb == 0) || (ea == full) != (eb == full) {
            return Err(Error::NoStandardSimilarity("edge relation present on one side only".into()));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut g: Option<Graph> = None;
        for (li, raw) in text.lines().enumerate() {
            let line_no = li + 1;
            let mut toks = Tokens::new(raw);
            let Some((_, col, head)) = toks.next_token() else {
                continue;
            };
            let mut arg = |what: &str| -> Result<(usize, usize)> {
                let (_, c, v) = toks.number_at(what).map_err(|e| relocate(e, line_no))?;
                Ok((c, v))
            };
            match head {
                "n" => {
                    if g.is_some() {
                        return Err(parse_err(line_no, col, "duplicate `n` line"));
                    }
                    let (c, n) = arg("vertex count")?;
                    if n == 0 {
                        return Err(parse_err(line_no, c, "vertex count must be positive"));
                    }
                    g = Some(Graph::empty(n));
                }
                "c" | "e" => {
                    let graph = g
                        .as_mut()
                        .ok_or_else(|| parse_err(line_no, col, "`n` line must come first"))?;
                    let (c1, x) = arg("vertex")?;
                    let (c2, y) = arg(if head == "c" { "color" } else { "vertex" })?;
                    if x >= graph.n {
                        return Err(parse_err(line_no, c1, format!("vertex {x} out of range")));
                    }
                    if head == "c" {
                        graph.vertex_colors[x] = y as u32;
                    } else {
                        if y >= graph.n {
                            return Err(parse_err(line_no, c2, format!("vertex {y} out of range")));
                        }
                        if x == y {
                            return Err(parse_err(line_no, c2, "loops are not allowed"));
                        }
                        graph.add_edge(x, y);
                    }
                }
                other => {
                    return Err(parse_err(line_no, col, format!("unknown directive `{other}`")));
                }
            }
            if let Some((_, c, t)) = toks.next_token() {
                return Err(parse_err(line_no, c, format!("trailing token `{t}`")));
            }
        }
        g.ok_or_else(|| parse_err(1, 1, "missing `n` line"))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for (v, &c) in self.vertex_colors.iter().enumerate() {
            if c != 0 {
                s.push_str(&format!("c {v} {c}\n"));
            }
        }
        for (u, v) in self.edges() {
            s.push_str(&format!("e {u} {v}\n"));
        }
        s
    }
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { column, message, .. } => Error::Parse { line, column, message },
        other => other,
    }
}

pub fn complete(n: usize) -> Graph {
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            g.add_edge(u, v);
        }
    }
    g
}

pub fn cycle(n: usize) -> Graph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges)
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    Graph::from_edges(n, &edges)
}

pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::from_edges(10, &edges)
}

/// Incidence graph of the Fano plane: points 0..6, lines 7..13.
pub fn heawood() -> Graph {
    let lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
    let mut g = Graph::empty(14);
    for (l, pts) in lines.iter().enumerate() {
        for &p in pts {
            g.add_edge(p, 7 + l);
        }
    }
    g
}

/// Cayley graph on Z4×Z4 with connection set ±(1,0), ±(0,1), ±(1,1).
pub fn shrikhande() -> Graph {
    let idx = |a: usize, b: usize| (a % 4) * 4 + (b % 4);
    let mut g = Graph::empty(16);
    for a in 0..4 {
        for b in 0..4 {
            for (da, db) in [(1, 0), (0, 1), (1, 1)] {
                g.add_edge(idx(a, b), idx(a + da, b + db));
            }
        }
    }
    g
}

/// The k×k rook graph (lattice graph).
pub fn rook(k: usize) -> Graph {
    let mut g = Graph::empty(k * k);
    for u in 0..k * k {
        for v in u + 1..k * k {
            if u / k == v / k || u % k == v % k {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// An asymmetric graph on 6 vertices.
pub fn smallest_asymmetric() -> Graph {
    Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (3, 5)])
}
