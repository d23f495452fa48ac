//! Collinearity graphs of line sets and small-graph tools.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lineset::LineSet;
use crate::projgeom::GeometryTables;

mod perm;
mod refine;

pub use perm::{closure_order, compose, invert, is_automorphism, PERM_CLOSURE_CAP};
pub use refine::{automorphism_group, canonical_form, isomorphic, AutGroup, CanonicalForm, DEFAULT_VERTEX_CAP};

/// A simple undirected graph whose vertices carry distinct labels (line
/// indices for collinearity graphs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<u32>,
    adj: Vec<FixedBitSet>,
}

impl Graph {
    pub fn new(labels: Vec<u32>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = labels.len();
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("vertex labels are not distinct".into()));
        }
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Invalid(format!("edge ({u}, {v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::Invalid(format!("loop at vertex {u}")));
            }
            adj[u].insert(v);
            adj[v].insert(u);
        }
        Ok(Graph { labels, adj })
    }

    /// Vertices labelled `0..n`.
    pub fn unlabeled(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new((0..n as u32).collect(), edges)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> u32 {
        self.labels[v]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbourhood(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].ones()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |i| self.adj[i].ones().filter(move |&j| j > i).map(move |j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// The common degree, if the graph is regular and non-empty.
    pub fn regular_degree(&self) -> Option<usize> {
        if self.n() == 0 {
            return None;
        }
        let k = self.degree(0);
        (0..self.n()).all(|v| self.degree(v) == k).then_some(k)
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        let mut seen = FixedBitSet::with_capacity(self.n());
        let mut stack = vec![0];
        seen.insert(0);
        while let Some(v) = stack.pop() {
            for u in self.adj[v].ones() {
                if !seen.put(u) {
                    stack.push(u);
                }
            }
        }
        seen.count_ones(..) == self.n()
    }

    /// Induced subgraph on `vertices`, in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let labels = vertices.iter().map(|&v| self.labels[v]).collect();
        let mut adj = vec![FixedBitSet::with_capacity(vertices.len()); vertices.len()];
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate() {
                if self.adj[u].contains(v) {
                    adj[i].insert(j);
                }
            }
        }
        Graph { labels, adj }
    }

    /// The graph with vertex `v` moved to position `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let n = self.n();
        let mut labels = vec![0; n];
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        for v in 0..n {
            labels[perm[v]] = self.labels[v];
            for u in self.adj[v].ones() {
                adj[perm[v]].insert(perm[u]);
            }
        }
        Graph { labels, adj }
    }

    pub(crate) fn adjacency_lists(&self) -> Vec<Vec<u32>> {
        self.adj.iter().map(|a| a.ones().map(|u| u as u32).collect()).collect()
    }
}

/// Vertices are the members of `set` in ascending order; two are adjacent
/// when the lines meet.
pub fn collinearity_graph(t: &GeometryTables, set: &LineSet) -> Graph {
    let lines = set.lines();
    let edges: Vec<(usize, usize)> = (0..lines.len())
        .flat_map(|i| (i + 1..lines.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| t.lines_meet(lines[i], lines[j]))
        .collect();
    Graph::new(lines.to_vec(), edges).expect("line sets are duplicate-free")
}

/// Induced subgraph on the neighbours of `v`, in ascending order.
pub fn local_graph(g: &Graph, v: usize) -> Result<Graph> {
    if v >= g.n() {
        return Err(Error::Invalid(format!("vertex {v} out of range for {} vertices", g.n())));
    }
    let nbrs: Vec<usize> = g.neighbours(v).collect();
    Ok(g.induced(&nbrs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SrgParams {
    pub v: usize,
    pub k: usize,
    pub lambda: usize,
    pub mu: usize,
}

impl SrgParams {
    pub fn feasible(&self) -> bool {
        self.k * (self.k.wrapping_sub(self.lambda + 1)) == (self.v - self.k - 1) * self.mu
    }
}

/// Parameters of a strongly regular graph, or `None`. Graphs on fewer than
/// three vertices, complete graphs and edgeless graphs are rejected.
pub fn srg_check(g: &Graph) -> Option<SrgParams> {
    let n = g.n();
    if n < 3 {
        return None;
    }
    let k = g.regular_degree()?;
    let (mut lambda, mut mu) = (None, None);
    for u in 0..n {
        for v in u + 1..n {
            let mut common = g.adj[u].clone();
            common.intersect_with(&g.adj[v]);
            let c = common.count_ones(..);
            let slot = if g.adjacent(u, v) { &mut lambda } else { &mut mu };
            match *slot {
                None => *slot = Some(c),
                Some(x) if x != c => return None,
                _ => {}
            }
        }
    }
    Some(SrgParams { v: n, k, lambda: lambda?, mu: mu? })
}

/// The n×n rook's graph: cells adjacent when they share a row or a column.
pub fn rook_graph(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::Invalid(format!("rook graph needs n >= 2, got {n}")));
    }
    let cell = |r: usize, c: usize| r * n + c;
    let mut edges = Vec::new();
    for r in 0..n {
        for c in 0..n {
            for c2 in c + 1..n {
                edges.push((cell(r, c), cell(r, c2)));
            }
            for r2 in r + 1..n {
                edges.push((cell(r, c), cell(r2, c)));
            }
        }
    }
    Graph::unlabeled(n * n, edges)
}

pub fn complete_graph(n: usize) -> Graph {
    Graph::unlabeled(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).expect("valid edges")
}

/// Header-less graph6 encoding.
pub fn to_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out = Vec::new();
    if n < 63 {
        out.push(n as u8 + 63);
    } else {
        out.push(b'~');
        out.extend([(n >> 12) & 63, (n >> 6) & 63, n & 63].map(|x| x as u8 + 63));
    }
    let (mut acc, mut bits) = (0u8, 0);
    for j in 1..n {
        for i in 0..j {
            acc = acc << 1 | g.adjacent(i, j) as u8;
            bits += 1;
            if bits == 6 {
                out.push(acc + 63);
                (acc, bits) = (0, 0);
            }
        }
    }
    if bits > 0 {
        out.push((acc << (6 - bits)) + 63);
    }
    String::from_utf8(out).expect("graph6 is printable ASCII")
}

pub fn from_graph6(s: &str) -> Result<Graph> {
    let bad = || Error::Invalid(format!("malformed graph6 string {s:?}"));
    let bytes = s.trim_end().as_bytes();
    if bytes.iter().any(|&b| !(63..=126).contains(&b)) || bytes.is_empty() {
        return Err(bad());
    }
    let (n, body) = if bytes[0] == b'~' {
        if bytes.len() < 4 || bytes[1] == b'~' {
            return Err(bad());
        }
        let n = bytes[1..4].iter().fold(0usize, |a, &b| a << 6 | (b - 63) as usize);
        (n, &bytes[4..])
    } else {
        ((bytes[0] - 63) as usize, &bytes[1..])
    };
    let pairs = n * n.saturating_sub(1) / 2;
    if body.len() != pairs.div_ceil(6) {
        return Err(bad());
    }
    let bit = |k: usize| (body[k / 6] - 63) >> (5 - k % 6) & 1 == 1;
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Graph::unlabeled(n, edges)
}

/// JSON edge-list form of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub labels: Vec<u32>,
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        GraphJson { n: g.n(), edges: g.edges().map(|(i, j)| [i, j]).collect(), labels: g.labels.clone() }
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Self> {
        if j.labels.len() != j.n {
            return Err(Error::Invalid(format!("{} labels for {} vertices", j.labels.len(), j.n)));
        }
        Graph::new(j.labels, j.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

/// Maximal cliques of size six in the collinearity graph of a hyperoval,
/// split by their geometric type. Each clique is listed by line index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SixCliqueCensus {
    /// (common point, lines)
    pub point_cliques: Vec<(u32, Vec<u32>)>,
    /// (common plane, lines)
    pub plane_cliques: Vec<(u32, Vec<u32>)>,
    /// Maximal cliques of any other size.
    pub other_maximal: usize,
}

impl SixCliqueCensus {
    pub fn counts(&self) -> (usize, usize) {
        (self.point_cliques.len(), self.plane_cliques.len())
    }
}

fn common<'a>(mut lists: impl Iterator<Item = &'a [u32]>) -> Option<u32> {
    let first = lists.next()?.to_vec();
    let rest: Vec<&[u32]> = lists.collect();
    first.into_iter().find(|x| rest.iter().all(|l| l.contains(x)))
}

pub fn six_clique_census(t: &GeometryTables, g: &Graph) -> Result<SixCliqueCensus> {
    for &l in g.labels() {
        t.check_line(l)?;
    }
    let mut census = SixCliqueCensus { point_cliques: Vec::new(), plane_cliques: Vec::new(), other_maximal: 0 };
    for clique in maximal_cliques(g) {
        if clique.len() != 6 {
            census.other_maximal += 1;
            continue;
        }
        let mut lines: Vec<u32> = clique.iter().map(|&v| g.label(v)).collect();
        lines.sort_unstable();
        if let Some(p) = common(lines.iter().map(|&l| t.line_points(l))) {
            census.point_cliques.push((p, lines));
        } else if let Some(pl) = common(lines.iter().map(|&l| t.line_planes(l))) {
            census.plane_cliques.push((pl, lines));
        } else {
            return Err(Error::StrayClique(lines));
        }
    }
    census.point_cliques.sort();
    census.plane_cliques.sort();
    Ok(census)
}

/// Bron–Kerbosch with pivoting.
pub fn maximal_cliques(g: &Graph) -> Vec<Vec<usize>> {
    fn expand(g: &Graph, r: &mut Vec<usize>, mut p: FixedBitSet, mut x: FixedBitSet, out: &mut Vec<Vec<usize>>) {
        if p.is_clear() {
            if x.is_clear() {
                out.push(r.clone());
            }
            return;
        }
        let pivot = p
            .ones()
            .chain(x.ones())
            .max_by_key(|&u| g.adj[u].intersection(&p).count())
            .expect("p is non-empty");
        let candidates: Vec<usize> = p.difference(&g.adj[pivot]).collect();
        for v in candidates {
            r.push(v);
            let mut p2 = p.clone();
            p2.intersect_with(&g.adj[v]);
            let mut x2 = x.clone();
            x2.intersect_with(&g.adj[v]);
            expand(g, r, p2, x2, out);
            r.pop();
            p.remove(v);
            x.insert(v);
        }
    }
    let n = g.n();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut p = FixedBitSet::with_capacity(n);
    p.insert_range(..);
    expand(g, &mut Vec::new(), p, FixedBitSet::with_capacity(n), &mut out);
    out
}
