//! Budgeted backtracking enumeration of hyperovals.
//!
//! The search tree is cut at a fixed depth into work items. Items are run in
//! parallel waves, each capped by the budget left at the start of its wave,
//! and merged in tree order so that the report equals a serial run for any
//! thread count.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{canonical_form as graph_canonical_form, collinearity_graph, six_clique_census};
use crate::hyperoval::verify_hyperoval;
use crate::lineset::LineSet;
use crate::projgeom::GeometryTables;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "lines")]
pub enum SeedMode {
    None,
    /// Forces one line into every set.
    FirstLine(u32),
    /// Forces two lines of a common pencil.
    PencilPair(u32, u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchOrder {
    /// Include or exclude the least open line.
    #[default]
    Index,
    /// Branch over the lines of the most constrained pencil holding one
    /// chosen line.
    Pencil,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub node_budget: u64,
    pub min_size: usize,
    pub max_size: usize,
    pub seed: SeedMode,
    pub order: BranchOrder,
    /// Stop after this many sets.
    pub max_found: Option<usize>,
    /// Worker threads; `None` uses the ambient pool. Does not affect results.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            node_budget: 10_000_000,
            min_size: 1,
            max_size: usize::MAX,
            seed: SeedMode::None,
            order: BranchOrder::Index,
            max_found: None,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub config: SearchConfig,
    /// Sorted by line indices.
    pub found: Vec<LineSet>,
    pub nodes: u64,
    /// True when the budget ran out before the tree was exhausted.
    pub exhausted: bool,
    pub size_histogram: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Choose(u32),
    Exclude(u32),
}

/// Incremental search state with an undo trail.
struct State<'t> {
    t: &'t GeometryTables,
    chosen: Vec<bool>,
    excluded: Vec<bool>,
    size: usize,
    count: Vec<u8>,
    avail: Vec<u8>,
    open: FixedBitSet,
    trail: Vec<Op>,
}

impl<'t> State<'t> {
    fn new(t: &'t GeometryTables) -> Self {
        State {
            t,
            chosen: vec![false; t.num_lines()],
            excluded: vec![false; t.num_lines()],
            size: 0,
            count: vec![0; t.num_pencils()],
            avail: vec![t.q() as u8 + 1; t.num_pencils()],
            open: FixedBitSet::with_capacity(t.num_pencils()),
            trail: Vec::new(),
        }
    }

    fn free(&self, l: u32) -> bool {
        !self.chosen[l as usize] && !self.excluded[l as usize]
    }

    fn choose(&mut self, l: u32) {
        debug_assert!(self.free(l));
        self.chosen[l as usize] = true;
        self.size += 1;
        self.trail.push(Op::Choose(l));
        let t = self.t;
        for &p in t.line_pencils(l).iter() {
            let p = p as usize;
            self.count[p] += 1;
            self.avail[p] -= 1;
            match self.count[p] {
                1 => self.open.insert(p),
                2 => {
                    self.open.remove(p);
                    for &m in t.pencil_lines_at(p as u32).iter() {
                        if self.free(m) {
                            self.exclude(m);
                        }
                    }
                }
                _ => unreachable!("free lines never complete a pencil twice"),
            }
        }
    }

    fn exclude(&mut self, l: u32) {
        self.excluded[l as usize] = true;
        self.trail.push(Op::Exclude(l));
        for &p in self.t.line_pencils(l).iter() {
            self.avail[p as usize] -= 1;
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail above mark") {
                Op::Choose(l) => {
                    self.chosen[l as usize] = false;
                    self.size -= 1;
                    for &p in self.t.line_pencils(l).iter() {
                        let p = p as usize;
                        self.count[p] -= 1;
                        self.avail[p] += 1;
                        self.open.set(p, self.count[p] == 1);
                    }
                }
                Op::Exclude(l) => {
                    self.excluded[l as usize] = false;
                    for &p in self.t.line_pencils(l).iter() {
                        self.avail[p as usize] += 1;
                    }
                }
            }
        }
    }

    fn replay(&mut self, ops: &[Op]) {
        for &op in ops {
            match op {
                Op::Choose(l) => self.choose(l),
                Op::Exclude(l) => {
                    if self.free(l) {
                        self.exclude(l)
                    }
                }
            }
        }
    }

    /// The open pencil with fewest free lines (least index on ties), or
    /// `None` when no pencil is open. `Some((p, 0))` marks a dead end.
    fn tightest(&self) -> Option<(usize, u8)> {
        let mut best: Option<(usize, u8)> = None;
        for p in self.open.ones() {
            let a = self.avail[p];
            if best.is_none_or(|(_, b)| a < b) {
                best = Some((p, a));
                if a <= 1 {
                    break;
                }
            }
        }
        best
    }

    fn dead(&self) -> bool {
        self.open.ones().any(|p| self.avail[p] == 0)
    }

    fn chosen_lines(&self) -> Vec<u32> {
        (0..self.chosen.len() as u32).filter(|&l| self.chosen[l as usize]).collect()
    }
}

/// Where a sub-search stops: after `budget` nodes or `found_cap` sets.
#[derive(Clone, Copy)]
struct Caps {
    budget: u64,
    found_cap: usize,
}

/// A run over part of the tree. `found` holds each set with the node count
/// at which it was emitted.
#[derive(Default)]
struct Run {
    nodes: u64,
    found: Vec<(u64, Vec<u32>)>,
    cut: bool,
}

struct Walker<'c> {
    cfg: &'c SearchConfig,
    caps: Caps,
    run: Run,
    /// Depth at which nodes are handed out as work items instead of visited.
    split: Option<usize>,
    items: Vec<(Vec<Op>, bool)>,
}

impl Walker<'_> {
    /// Visits a node; `fresh` is false when its chosen set equals its
    /// parent's. Returns false once a cap is hit.
    fn visit(&mut self, s: &mut State, depth: usize, fresh: bool) -> bool {
        if self.split == Some(depth) {
            self.items.push((s.trail.clone(), fresh));
            return true;
        }
        if self.run.nodes == self.caps.budget {
            self.run.cut = true;
            return false;
        }
        self.run.nodes += 1;
        match self.cfg.order {
            BranchOrder::Index => self.visit_index(s, depth, fresh),
            BranchOrder::Pencil => self.visit_pencil(s, depth, fresh),
        }
    }

    fn emit(&mut self, s: &State) -> bool {
        if s.size < self.cfg.min_size.max(1) || s.size > self.cfg.max_size {
            return true;
        }
        self.run.found.push((self.run.nodes, s.chosen_lines()));
        if self.run.found.len() == self.caps.found_cap {
            self.run.cut = true;
            return false;
        }
        true
    }

    fn visit_index(&mut self, s: &mut State, depth: usize, fresh: bool) -> bool {
        if s.dead() {
            return true;
        }
        if fresh && s.open.is_clear() && !self.emit(s) {
            return false;
        }
        if s.size >= self.cfg.max_size {
            return true;
        }
        let Some(j) = (0..s.chosen.len() as u32).find(|&l| s.free(l)) else {
            return true;
        };
        let mark = s.trail.len();
        s.choose(j);
        let go = self.visit(s, depth + 1, true);
        s.undo_to(mark);
        if !go {
            return false;
        }
        s.exclude(j);
        let go = self.visit(s, depth + 1, false);
        s.undo_to(mark);
        go
    }

    fn visit_pencil(&mut self, s: &mut State, depth: usize, fresh: bool) -> bool {
        let candidates: Vec<u32> = match s.tightest() {
            Some((_, 0)) => return true,
            Some((p, _)) => {
                if s.size >= self.cfg.max_size {
                    return true;
                }
                s.t.pencil_lines_at(p as u32).iter().copied().filter(|&l| s.free(l)).collect()
            }
            None => {
                if fresh && !self.emit(s) {
                    return false;
                }
                if s.size >= self.cfg.max_size {
                    return true;
                }
                (0..s.chosen.len() as u32).filter(|&l| s.free(l)).collect()
            }
        };
        let mark = s.trail.len();
        for l in candidates {
            let inner = s.trail.len();
            s.choose(l);
            let go = self.visit(s, depth + 1, true);
            s.undo_to(inner);
            if !go {
                s.undo_to(mark);
                return false;
            }
            s.exclude(l);
        }
        s.undo_to(mark);
        true
    }
}

fn split_depth(order: BranchOrder) -> usize {
    match order {
        BranchOrder::Index => 8,
        BranchOrder::Pencil => 3,
    }
}

fn seed_lines(t: &GeometryTables, seed: &SeedMode) -> Result<Vec<u32>> {
    let lines = match *seed {
        SeedMode::None => vec![],
        SeedMode::FirstLine(l) => vec![t.check_line(l)?],
        SeedMode::PencilPair(a, b) => {
            t.check_line(a)?;
            t.check_line(b)?;
            if a == b || !t.lines_meet(a, b) {
                return Err(Error::Invalid(format!("seed lines {a} and {b} do not span a pencil")));
            }
            vec![a, b]
        }
    };
    Ok(lines)
}

/// Two seed lines for `set`: its least line and the least member meeting it.
pub fn pencil_pair_of(t: &GeometryTables, set: &LineSet) -> Option<(u32, u32)> {
    let a = set.iter().next()?;
    let b = set.iter().find(|&m| m != a && t.lines_meet(a, m))?;
    Some((a, b))
}

/// Runs the search described by `cfg` on the Grassmannian of PG(3,4).
pub fn enumerate_hyperovals(t: &GeometryTables, cfg: &SearchConfig) -> Result<SearchReport> {
    if t.q() != 4 {
        return Err(Error::UnsupportedOrder(t.q()));
    }
    if cfg.node_budget == 0 {
        return Err(Error::Invalid("node budget must be positive".into()));
    }
    if cfg.max_found == Some(0) {
        return Err(Error::Invalid("max_found must be positive".into()));
    }
    let seeds = seed_lines(t, &cfg.seed)?;
    let run = |t: &GeometryTables| -> Result<Run> {
        let mut root = State::new(t);
        for &l in &seeds {
            if !root.free(l) {
                return Err(Error::Invalid(format!("seed line {l} conflicts with the other seeds")));
            }
            root.choose(l);
        }
        let found_cap = cfg.max_found.unwrap_or(usize::MAX);
        let mut top = Walker {
            cfg,
            caps: Caps { budget: cfg.node_budget, found_cap },
            run: Run::default(),
            split: Some(split_depth(cfg.order)),
            items: Vec::new(),
        };
        if !top.visit(&mut root, 0, true) {
            return Ok(top.run);
        }
        let mut total = top.run;
        let items = top.items;
        let wave = rayon::current_num_threads().max(1) * 2;
        for chunk in items.chunks(wave) {
            let caps = Caps { budget: cfg.node_budget - total.nodes, found_cap: found_cap - total.found.len() };
            let runs: Vec<Run> = chunk
                .par_iter()
                .map(|(ops, fresh)| {
                    let mut s = State::new(t);
                    s.replay(ops);
                    let mut w = Walker { cfg, caps, run: Run::default(), split: None, items: Vec::new() };
                    w.visit(&mut s, 0, *fresh);
                    w.run
                })
                .collect();
            for r in runs {
                let budget = cfg.node_budget - total.nodes;
                let need = found_cap - total.found.len();
                let kept: Vec<(u64, Vec<u32>)> =
                    r.found.into_iter().filter(|(at, _)| *at <= budget).take(need).collect();
                let base = total.nodes;
                if kept.len() == need {
                    total.nodes += kept.last().expect("need is positive").0;
                    total.found.extend(kept.into_iter().map(|(at, f)| (base + at, f)));
                    total.cut = true;
                    return Ok(total);
                }
                total.found.extend(kept.into_iter().map(|(at, f)| (base + at, f)));
                if r.cut || r.nodes > budget {
                    total.nodes += budget;
                    total.cut = true;
                    return Ok(total);
                }
                total.nodes += r.nodes;
            }
        }
        Ok(total)
    };
    let total = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Invalid(e.to_string()))?
            .install(|| run(t))?,
        None => run(t)?,
    };
    let budget_hit = total.cut && total.nodes == cfg.node_budget && cfg.max_found.is_none_or(|m| total.found.len() < m);
    let mut found = Vec::with_capacity(total.found.len());
    for (_, lines) in total.found {
        let set = LineSet::new(t, lines)?;
        if let Err(v) = verify_hyperoval(t, &set) {
            return Err(Error::Invalid(format!("search emitted a non-hyperoval: {v}")));
        }
        found.push(set);
    }
    found.sort();
    let mut size_histogram = BTreeMap::new();
    for f in &found {
        *size_histogram.entry(f.len()).or_insert(0) += 1;
    }
    Ok(SearchReport { config: cfg.clone(), found, nodes: total.nodes, exhausted: budget_hit, size_histogram })
}

/// Invariants of a hyperoval that agree on equivalent sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SetSignature {
    pub size: usize,
    /// Canonical graph6 string of the collinearity graph.
    pub graph6: String,
    pub point_cliques: usize,
    pub plane_cliques: usize,
}

/// The sorted set together with its signature.
pub fn canonical_form(t: &GeometryTables, set: &LineSet) -> Result<(LineSet, SetSignature)> {
    let g = collinearity_graph(t, set);
    let canon = graph_canonical_form(&g)?;
    let (point_cliques, plane_cliques) = six_clique_census(t, &g)?.counts();
    let sig = SetSignature { size: set.len(), graph6: canon.graph6, point_cliques, plane_cliques };
    Ok((LineSet::new(t, set.iter())?, sig))
}
