//! Hyperovals of the line Grassmannian: sets of lines meeting every pencil
//! in 0 or 2 lines.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lineset::LineSet;
use crate::projgeom::{GeometryTables, Pencil};
use crate::quadric::{scan_forms, QForm, Quadric, QuadricKind};

/// A pencil meeting the set in neither 0 nor 2 lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub pencil: Pencil,
    pub pencil_index: u32,
    pub hits: Vec<u32>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pencil {} (point {}, plane {}) meets the set in {} lines {:?}",
            self.pencil_index,
            self.pencil.point,
            self.pencil.plane,
            self.hits.len(),
            self.hits
        )
    }
}

impl std::error::Error for Violation {}

/// Number of set lines in every pencil, by pencil index.
pub fn pencil_hit_counts(t: &GeometryTables, set: &LineSet) -> Vec<u32> {
    let mut counts = vec![0u32; t.num_pencils()];
    for l in set.iter() {
        for &p in t.line_pencils(l).iter() {
            counts[p as usize] += 1;
        }
    }
    counts
}

/// Checks the hyperoval property; the witness is the first bad pencil in
/// table order.
pub fn verify_hyperoval(t: &GeometryTables, set: &LineSet) -> Result<(), Violation> {
    let counts = pencil_hit_counts(t, set);
    match counts.iter().position(|&c| c != 0 && c != 2) {
        None => Ok(()),
        Some(idx) => {
            let idx = idx as u32;
            let hits = t.pencil_lines_at(idx).iter().copied().filter(|&l| set.contains(l)).collect();
            Err(Violation { pencil: t.pencil(idx), pencil_index: idx, hits })
        }
    }
}

/// Lines of the set through each point and inside each plane.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCensus {
    pub point_degrees: Vec<u32>,
    pub plane_degrees: Vec<u32>,
}

impl DegreeCensus {
    pub fn point_histogram(&self) -> BTreeMap<u32, usize> {
        histogram(&self.point_degrees)
    }

    pub fn plane_histogram(&self) -> BTreeMap<u32, usize> {
        histogram(&self.plane_degrees)
    }
}

fn histogram(values: &[u32]) -> BTreeMap<u32, usize> {
    let mut h = BTreeMap::new();
    for &v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

pub fn degree_census(t: &GeometryTables, set: &LineSet) -> DegreeCensus {
    let mut point_degrees = vec![0; t.num_points()];
    let mut plane_degrees = vec![0; t.num_planes()];
    for l in set.iter() {
        for &p in t.line_points(l) {
            point_degrees[p as usize] += 1;
        }
        for &p in t.line_planes(l) {
            plane_degrees[p as usize] += 1;
        }
    }
    DegreeCensus { point_degrees, plane_degrees }
}

/// Whether distinct lines of a plane form a dual hyperoval there: every
/// point of the plane lies on 0 or 2 of them.
pub fn dual_hyperoval_check(t: &GeometryTables, plane: u32, lines: &[u32]) -> Result<bool> {
    let set = LineSet::new_distinct(t, lines.iter().copied())?;
    if let Some(l) = set.iter().find(|&l| !t.line_in_plane(l, plane)) {
        return Err(Error::LineNotInPlane { line: l, plane });
    }
    Ok(t.plane_points(plane).iter().all(|&p| {
        let k = t.point_lines(p).iter().filter(|&&l| set.contains(l)).count();
        k == 0 || k == 2
    }))
}

/// `ℓ` together with the members of the set meeting it, ascending.
pub fn neighbourhood(t: &GeometryTables, set: &LineSet, line: u32) -> Result<Vec<u32>> {
    if !set.contains(line) {
        return Err(Error::LineNotInSet(line));
    }
    Ok(set.iter().filter(|&m| m == line || t.lines_meet(m, line)).collect())
}

/// The hyperbolic quadrics of PG(3,4), one form per quadric, with point
/// masks for fast line tests.
#[derive(Debug, Clone)]
pub struct HyperbolicForms {
    forms: Vec<QForm>,
    zero_masks: Vec<u128>,
    line_masks: Vec<u128>,
}

impl HyperbolicForms {
    /// Scans all 4¹⁰ coefficient vectors up to scalars.
    pub fn scan(t: &GeometryTables) -> Result<Self> {
        if t.q() != 4 {
            return Err(Error::UnsupportedOrder(t.q()));
        }
        let forms = scan_forms(t, |_, c| c.kind == QuadricKind::Hyperbolic)?;
        let zero_masks = forms
            .par_iter()
            .map(|form| {
                let f = t.field();
                t.points()
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| form.evaluate(f, p.coords()).is_zero())
                    .fold(0u128, |m, (i, _)| m | 1 << i)
            })
            .collect();
        let line_masks = (0..t.num_lines() as u32)
            .map(|l| t.line_points(l).iter().fold(0u128, |m, &p| m | 1 << p))
            .collect();
        Ok(HyperbolicForms { forms, zero_masks, line_masks })
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn forms(&self) -> &[QForm] {
        &self.forms
    }

    fn external(&self, form: usize, line: u32) -> bool {
        self.zero_masks[form] & self.line_masks[line as usize] == 0
    }

    /// Index of the form whose external lines are exactly `set`, if any.
    pub fn find_external_set(&self, t: &GeometryTables, set: &LineSet) -> Option<usize> {
        let member = set.membership(t);
        self.forms.par_iter().enumerate().position_first(|(i, _)| {
            set.iter().all(|l| self.external(i, l))
                && (0..t.num_lines() as u32).filter(|&l| self.external(i, l)).all(|l| member.contains(l as usize))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop3Witness {
    pub line: u32,
    pub form: QForm,
    /// Position of the form in scan order.
    pub scan_index: usize,
    pub neighbourhood: Vec<u32>,
}

/// Whether the neighbourhood of `line` in `set` equals its neighbourhood in
/// the set of lines external to `form`.
pub fn is_local_quadric(t: &GeometryTables, set: &LineSet, line: u32, form: &QForm) -> Result<bool> {
    let n = neighbourhood(t, set, line)?;
    let ext = Quadric::new(t, *form).external_lines()?;
    if !ext.contains(line) {
        return Ok(false);
    }
    Ok(neighbourhood(t, &ext, line)? == n)
}

/// Searches the hyperbolic forms for one whose external-line neighbourhood
/// of `line` coincides with that in `set`. Returns the first such form in
/// scan order, or `None`.
pub fn prop3_check(
    t: &GeometryTables,
    forms: &HyperbolicForms,
    set: &LineSet,
    line: u32,
) -> Result<Option<Prop3Witness>> {
    let n = neighbourhood(t, set, line)?;
    let candidates: Vec<u32> = std::iter::once(line)
        .chain((0..t.num_lines() as u32).filter(|&m| m != line && t.lines_meet(m, line)))
        .collect();
    debug_assert!(candidates.len() <= 128);
    let target = candidates.iter().enumerate().filter(|(_, &m)| set.contains(m)).fold(0u128, |a, (i, _)| a | 1 << i);
    let hit = forms.forms.par_iter().enumerate().position_first(|(i, _)| {
        if !forms.external(i, line) {
            return false;
        }
        let mask = candidates
            .iter()
            .enumerate()
            .filter(|(_, &m)| forms.external(i, m))
            .fold(0u128, |a, (k, _)| a | 1 << k);
        mask == target
    });
    Ok(hit.map(|scan_index| Prop3Witness { line, form: forms.forms[scan_index], scan_index, neighbourhood: n }))
}

/// External lines of the standard hyperbolic quadric in PG(3,q) and the
/// distribution of their pencil intersection sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkewGeometry {
    pub q: u32,
    pub lines: LineSet,
    /// Pencil intersection size → number of pencils.
    pub histogram: BTreeMap<u32, usize>,
}

pub fn skew_geometry(t: &GeometryTables) -> Result<SkewGeometry> {
    if t.q() < 4 {
        return Err(Error::UnsupportedOrder(t.q()));
    }
    let lines = Quadric::new(t, QForm::standard_hyperbolic()).external_lines()?;
    let histogram = histogram(&pencil_hit_counts(t, &lines));
    Ok(SkewGeometry { q: t.q(), lines, histogram })
}

/// Builds the tables and runs [`skew_geometry`]; q = 16 is refused unless
/// `long_running` is set.
pub fn skew_geometry_for(q: u32, long_running: bool) -> Result<SkewGeometry> {
    check_skew_order(q, long_running)?;
    skew_geometry(&GeometryTables::build(q)?)
}

/// Orders accepted by [`skew_geometry_for`].
pub fn check_skew_order(q: u32, long_running: bool) -> Result<()> {
    match q {
        4 | 8 => Ok(()),
        16 if long_running => Ok(()),
        16 => Err(Error::LongRunning(q)),
        _ => Err(Error::UnsupportedOrder(q)),
    }
}
