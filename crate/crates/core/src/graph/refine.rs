//! Individualization and refinement: equitable partitions, automorphism
//! groups and canonical labelling of small graphs.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{to_graph6, Graph};

pub const DEFAULT_VERTEX_CAP: usize = 200;

/// Ordered partition of the vertex set. Cells occupy contiguous ranges of
/// `lab`; `end` is meaningful at cell starts only.
#[derive(Debug, Clone)]
struct Partition {
    lab: Vec<u32>,
    cell: Vec<u32>,
    end: Vec<u32>,
    cells: usize,
}

impl Partition {
    fn unit(n: usize) -> Self {
        let mut end = vec![0; n];
        if n > 0 {
            end[0] = n as u32;
        }
        Partition { lab: (0..n as u32).collect(), cell: vec![0; n], end, cells: n.min(1) }
    }

    fn n(&self) -> usize {
        self.lab.len()
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.n()
    }

    fn target(&self) -> Option<(usize, usize)> {
        let mut s = 0;
        while s < self.n() {
            let e = self.end[s] as usize;
            if e - s > 1 {
                return Some((s, e));
            }
            s = e;
        }
        None
    }

    /// Splits `v` off the front of its cell; returns the singleton's start.
    fn individualize(&mut self, v: u32) -> usize {
        let s = self.cell[v as usize] as usize;
        let e = self.end[s];
        let at = self.lab[s..e as usize].iter().position(|&x| x == v).expect("v is in its cell") + s;
        self.lab.swap(s, at);
        self.end[s] = s as u32 + 1;
        self.end[s + 1] = e;
        for k in s + 1..e as usize {
            self.cell[self.lab[k] as usize] = s as u32 + 1;
        }
        self.cells += 1;
        s
    }
}

/// Appends trace entries, failing as soon as they diverge from a reference.
struct Trace<'r> {
    entries: Vec<u64>,
    reference: Option<&'r [u64]>,
}

impl Trace<'_> {
    fn push(&mut self, x: u64) -> bool {
        if let Some(r) = self.reference {
            if r.get(self.entries.len()) != Some(&x) {
                return false;
            }
        }
        self.entries.push(x);
        true
    }
}

struct Engine<'g> {
    g: &'g Graph,
    nbrs: Vec<Vec<u32>>,
}

/// One node of the first path: the partition before individualizing, its
/// target cell, and the trace produced by individualizing the first vertex.
struct PathNode {
    part: Partition,
    target: (usize, usize),
    vertex: u32,
    trace: Vec<u64>,
}

impl<'g> Engine<'g> {
    fn new(g: &'g Graph) -> Result<Self> {
        if g.n() > DEFAULT_VERTEX_CAP {
            return Err(Error::GraphTooLarge { n: g.n(), cap: DEFAULT_VERTEX_CAP });
        }
        Ok(Engine { g, nbrs: g.adjacency_lists() })
    }

    /// Refines to the coarsest equitable partition below `p`, starting from
    /// the splitter cells in `queue`. Returns the trace, or `None` on
    /// divergence from `reference`.
    fn refine(&self, p: &mut Partition, init: &[usize], reference: Option<&[u64]>) -> Option<Vec<u64>> {
        let n = p.n();
        let mut trace = Trace { entries: Vec::new(), reference };
        let mut queue: VecDeque<usize> = init.iter().copied().collect();
        let mut queued = vec![false; n];
        for &s in init {
            queued[s] = true;
        }
        let mut count = vec![0u32; n];
        while let Some(w) = queue.pop_front() {
            queued[w] = false;
            if p.is_discrete() {
                break;
            }
            let we = p.end[w] as usize;
            for k in w..we {
                for &u in &self.nbrs[p.lab[k] as usize] {
                    count[u as usize] += 1;
                }
            }
            if !trace.push(1 << 62 | w as u64) {
                return None;
            }
            let mut s = 0;
            while s < n {
                let e = p.end[s] as usize;
                if e - s > 1 {
                    let cell = &mut p.lab[s..e];
                    cell.sort_unstable_by_key(|&v| (count[v as usize], v));
                    let (lo, hi) = (count[cell[0] as usize], count[cell[e - s - 1] as usize]);
                    if lo != hi {
                        let mut pieces = Vec::new();
                        let mut a = s;
                        while a < e {
                            let c = count[p.lab[a] as usize];
                            let mut b = a + 1;
                            while b < e && count[p.lab[b] as usize] == c {
                                b += 1;
                            }
                            p.end[a] = b as u32;
                            for k in a..b {
                                p.cell[p.lab[k] as usize] = a as u32;
                            }
                            if !trace.push((s as u64) << 40 | (c as u64) << 20 | (b - a) as u64) {
                                return None;
                            }
                            pieces.push((a, b - a));
                            a = b;
                        }
                        p.cells += pieces.len() - 1;
                        if queued[s] {
                            for &(a, _) in &pieces[1..] {
                                queued[a] = true;
                                queue.push_back(a);
                            }
                        } else {
                            let largest = (0..pieces.len()).max_by_key(|&i| (pieces[i].1, std::cmp::Reverse(i))).expect("non-empty");
                            for (i, &(a, _)) in pieces.iter().enumerate() {
                                if i != largest {
                                    queued[a] = true;
                                    queue.push_back(a);
                                }
                            }
                        }
                    }
                }
                s = e;
            }
            for k in w..we {
                for &u in &self.nbrs[p.lab[k] as usize] {
                    count[u as usize] = 0;
                }
            }
        }
        if !trace.push(2 << 62 | p.cells as u64) {
            return None;
        }
        if reference.is_some_and(|r| r.len() != trace.entries.len()) {
            return None;
        }
        Some(trace.entries)
    }

    fn root(&self) -> (Partition, Vec<u64>) {
        let mut p = Partition::unit(self.g.n());
        let trace = if p.n() > 0 { self.refine(&mut p, &[0], None).expect("no reference") } else { Vec::new() };
        (p, trace)
    }

    fn child(&self, p: &Partition, v: u32, reference: Option<&[u64]>) -> Option<(Partition, Vec<u64>)> {
        let mut c = p.clone();
        let s = c.individualize(v);
        let trace = self.refine(&mut c, &[s], reference)?;
        Some((c, trace))
    }

    fn first_path(&self, root: &Partition) -> (Vec<PathNode>, Vec<u32>) {
        let mut path = Vec::new();
        let mut p = root.clone();
        while let Some(target) = p.target() {
            let vertex = p.lab[target.0];
            let (next, trace) = self.child(&p, vertex, None).expect("no reference");
            path.push(PathNode { part: p, target, vertex, trace });
            p = next;
        }
        (path, p.lab)
    }

    /// `leaf1[k] ↦ leaf[k]`, if that is an automorphism.
    fn leaf_automorphism(&self, leaf1: &[u32], leaf: &[u32]) -> Option<Vec<u32>> {
        let mut g = vec![0; leaf.len()];
        for (&a, &b) in leaf1.iter().zip(leaf) {
            g[a as usize] = b;
        }
        let ok = (0..g.len()).all(|v| {
            self.nbrs[v].len() == self.nbrs[g[v] as usize].len()
                && self.nbrs[v].iter().all(|&u| self.g.adjacent(g[v] as usize, g[u as usize] as usize))
        });
        ok.then_some(g)
    }

    /// Depth-first search below `p` (at depth `level` of the first path) for a
    /// leaf equivalent to the first leaf.
    fn find_equivalent(&self, path: &[PathNode], leaf1: &[u32], p: &Partition, level: usize) -> Option<Vec<u32>> {
        let Some(target) = p.target() else {
            return self.leaf_automorphism(leaf1, &p.lab);
        };
        let node = path.get(level)?;
        if target != node.target {
            return None;
        }
        for k in target.0..target.1 {
            if let Some((c, _)) = self.child(p, p.lab[k], Some(&node.trace)) {
                if let Some(g) = self.find_equivalent(path, leaf1, &c, level + 1) {
                    return Some(g);
                }
            }
        }
        None
    }

    fn automorphisms(&self, root: &Partition) -> Result<AutGroup> {
        let n = root.n();
        let (path, leaf1) = self.first_path(root);
        let mut gens: Vec<Vec<u32>> = Vec::new();
        let mut orbits = UnionFind::new(n);
        let mut order: u128 = 1;
        for (i, node) in path.iter().enumerate().rev() {
            let cell: Vec<u32> = node.part.lab[node.target.0..node.target.1].to_vec();
            let mut failed: Vec<u32> = Vec::new();
            for &w in &cell {
                if orbits.same(w, node.vertex) || failed.iter().any(|&f| orbits.same(f, w)) {
                    continue;
                }
                let found = self
                    .child(&node.part, w, Some(&node.trace))
                    .and_then(|(c, _)| self.find_equivalent(&path, &leaf1, &c, i + 1));
                match found {
                    Some(g) => {
                        for v in 0..n as u32 {
                            orbits.union(v, g[v as usize]);
                        }
                        gens.push(g);
                    }
                    None => failed.push(w),
                }
            }
            let size = cell.iter().filter(|&&x| orbits.same(x, node.vertex)).count();
            order = order.checked_mul(size as u128).ok_or(Error::OrderOverflow)?;
        }
        Ok(AutGroup { order, generators: gens, orbits: orbits.classes() })
    }

    /// Upper triangle of the adjacency matrix in leaf order, packed by rows.
    fn leaf_code(&self, lab: &[u32]) -> Vec<u64> {
        let n = lab.len();
        let mut code = vec![0u64; (n * n.saturating_sub(1) / 2).div_ceil(64)];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.g.adjacent(lab[i] as usize, lab[j] as usize) {
                    code[k / 64] |= 1 << (63 - k % 64);
                }
                k += 1;
            }
        }
        code
    }

    /// Largest (traces, adjacency code) over the leaves below `p`, exploring
    /// only maximal-trace children and one child per automorphism orbit.
    fn best_leaf(&self, p: &Partition) -> Result<Best> {
        let Some((s, e)) = p.target() else {
            return Ok(Best { traces: Vec::new(), code: self.leaf_code(&p.lab), lab: p.lab.clone() });
        };
        let children: Vec<(u32, Partition, Vec<u64>)> = p.lab[s..e]
            .iter()
            .map(|&v| {
                let (c, t) = self.child(p, v, None).expect("no reference");
                (v, c, t)
            })
            .collect();
        let top = children.iter().map(|c| &c.2).max().expect("non-empty cell").clone();
        let aut = self.automorphisms(p)?;
        let mut orbits = UnionFind::new(p.n());
        for g in &aut.generators {
            for v in 0..g.len() as u32 {
                orbits.union(v, g[v as usize]);
            }
        }
        let mut reps: Vec<u32> = Vec::new();
        let mut best: Option<Best> = None;
        for (v, c, t) in &children {
            if *t != top || reps.iter().any(|&r| orbits.same(r, *v)) {
                continue;
            }
            reps.push(*v);
            let mut b = self.best_leaf(c)?;
            b.traces.insert(0, top.clone());
            if best.as_ref().is_none_or(|x| b.key() > x.key()) {
                best = Some(b);
            }
        }
        Ok(best.expect("some child has the top trace"))
    }
}

struct Best {
    traces: Vec<Vec<u64>>,
    code: Vec<u64>,
    lab: Vec<u32>,
}

impl Best {
    fn key(&self) -> (&[Vec<u64>], &[u64]) {
        (&self.traces, &self.code)
    }
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n as u32).collect())
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let up = self.0[self.0[x as usize] as usize];
            self.0[x as usize] = up;
            x = up;
        }
        x
    }

    fn same(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi as usize] = lo;
        }
    }

    fn classes(&mut self) -> Vec<Vec<u32>> {
        let n = self.0.len();
        let mut by_root: Vec<Vec<u32>> = vec![Vec::new(); n];
        for v in 0..n as u32 {
            let r = self.find(v);
            by_root[r as usize].push(v);
        }
        by_root.into_iter().filter(|c| !c.is_empty()).collect()
    }
}

/// Automorphism group as a generating set with its exact order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutGroup {
    pub order: u128,
    /// Each generator maps vertex `v` to `g[v]`.
    pub generators: Vec<Vec<u32>>,
    /// Vertex orbits, each ascending, ordered by least element.
    pub orbits: Vec<Vec<u32>>,
}

pub fn automorphism_group(g: &Graph) -> Result<AutGroup> {
    let engine = Engine::new(g)?;
    let (root, _) = engine.root();
    engine.automorphisms(&root)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalForm {
    /// Vertex `v` of the input becomes vertex `labeling[v]`.
    pub labeling: Vec<u32>,
    /// graph6 string of the relabelled graph; equal exactly for isomorphic
    /// graphs.
    pub graph6: String,
}

pub fn canonical_form(g: &Graph) -> Result<CanonicalForm> {
    let engine = Engine::new(g)?;
    let (root, _) = engine.root();
    let best = engine.best_leaf(&root)?;
    let mut labeling = vec![0u32; g.n()];
    for (k, &v) in best.lab.iter().enumerate() {
        labeling[v as usize] = k as u32;
    }
    let perm: Vec<usize> = labeling.iter().map(|&x| x as usize).collect();
    let graph6 = to_graph6(&g.permuted(&perm));
    Ok(CanonicalForm { labeling, graph6 })
}

pub fn isomorphic(a: &Graph, b: &Graph) -> Result<bool> {
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        Engine::new(a)?;
        Engine::new(b)?;
        return Ok(false);
    }
    Ok(canonical_form(a)?.graph6 == canonical_form(b)?.graph6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, from_graph6, is_automorphism, rook_graph};

    fn cycle(n: usize) -> Graph {
        Graph::unlabeled(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn shuffled(g: &Graph, seed: u64) -> Graph {
        let n = g.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut x = seed | 1;
        for i in (1..n).rev() {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            perm.swap(i, (x % (i as u64 + 1)) as usize);
        }
        g.permuted(&perm)
    }

    #[test]
    fn small_group_orders() {
        let cases: Vec<(Graph, u128)> = vec![
            (Graph::unlabeled(0, []).unwrap(), 1),
            (Graph::unlabeled(1, []).unwrap(), 1),
            (Graph::unlabeled(4, []).unwrap(), 24),
            (complete_graph(5), 120),
            (cycle(7), 14),
            (cycle(6), 12),
            (Graph::unlabeled(3, [(0, 1), (1, 2)]).unwrap(), 2),
            (from_graph6("IheA@GUAo").unwrap(), 120),
            (rook_graph(2).unwrap(), 8),
            (rook_graph(3).unwrap(), 72),
            (rook_graph(5).unwrap(), 28_800),
        ];
        for (g, order) in cases {
            let a = automorphism_group(&g).unwrap();
            assert_eq!(a.order, order, "{}", to_graph6(&g));
            for gen in &a.generators {
                assert!(is_automorphism(&g, gen));
            }
        }
    }

    #[test]
    fn disjoint_union_orbits() {
        // triangle plus a path on three vertices
        let g = Graph::unlabeled(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5)]).unwrap();
        let a = automorphism_group(&g).unwrap();
        assert_eq!(a.order, 12);
        assert_eq!(a.orbits, vec![vec![0, 1, 2], vec![3, 5], vec![4]]);
    }

    #[test]
    fn canonical_form_is_invariant() {
        let graphs = [rook_graph(4).unwrap(), from_graph6("IheA@GUAo").unwrap(), cycle(9), complete_graph(3)];
        for g in &graphs {
            let c = canonical_form(g).unwrap();
            for seed in 1..6 {
                let h = shuffled(g, seed);
                assert_eq!(canonical_form(&h).unwrap().graph6, c.graph6);
                assert!(isomorphic(g, &h).unwrap());
            }
        }
        // C6 and two triangles: same degrees, not isomorphic
        let two_triangles = Graph::unlabeled(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!(!isomorphic(&cycle(6), &two_triangles).unwrap());
        assert!(!isomorphic(&rook_graph(4).unwrap(), &cycle(16)).unwrap());
    }

    #[test]
    fn shrikhande_is_not_the_rook_graph() {
        // Same parameters SRG(16, 6, 2, 2) as the 4×4 rook graph
        let mut edges = Vec::new();
        let id = |a: usize, b: usize| (a % 4) * 4 + b % 4;
        for a in 0..4 {
            for b in 0..4 {
                for (da, db) in [(1, 0), (0, 1), (1, 1)] {
                    edges.push((id(a, b), id(a + da, b + db)));
                }
            }
        }
        let shrikhande = Graph::unlabeled(16, edges).unwrap();
        let rook = rook_graph(4).unwrap();
        assert_eq!(super::super::srg_check(&shrikhande), super::super::srg_check(&rook));
        assert!(!isomorphic(&shrikhande, &rook).unwrap());
        assert_eq!(automorphism_group(&shrikhande).unwrap().order, 192);
        assert_eq!(automorphism_group(&rook).unwrap().order, 1152);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::unlabeled(201, []).unwrap();
        assert_eq!(automorphism_group(&g), Err(Error::GraphTooLarge { n: 201, cap: 200 }));
        assert!(isomorphic(&g, &complete_graph(3)).is_err());
    }
}
