//! Indexed model of PG(3,q) for q = 2^k.
//!
//! Points and planes are normalized 4-vectors (first nonzero coordinate 1);
//! a plane with dual vector `u` contains the point `x` iff `x·u = 0`. Lines
//! are 2×4 matrices in reduced row-echelon form. Every object gets a global
//! index equal to the rank of its coordinate encoding in lexicographic
//! order, so indices are stable across runs and platforms.
//!
//! A pencil `(p, P)` is a flag (point `p` on plane `P`) together with the
//! `q + 1` lines through `p` inside `P`. Pencils are numbered by point, then
//! by plane: pencil `p·(q²+q+1) + k` has the `k`-th plane through `p`.

use std::borrow::Cow;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};
use crate::linalg::{self, Vec4, ZERO4};

/// A point of PG(3,q) with normalized coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PPoint {
    coords: Vec4,
}

impl PPoint {
    pub fn new(f: &Field, v: Vec4) -> Result<Self> {
        linalg::normalize(f, &v).map(|coords| PPoint { coords }).ok_or(Error::Rank(1))
    }

    pub fn from_codes(f: &Field, codes: [u32; 4]) -> Result<Self> {
        let mut v = ZERO4;
        for (x, c) in v.iter_mut().zip(codes) {
            *x = f.elem(c)?;
        }
        Self::new(f, v)
    }

    pub fn coords(&self) -> &Vec4 {
        &self.coords
    }
}

/// A line of PG(3,q), stored as its RREF basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PLine {
    rows: [Vec4; 2],
}

impl PLine {
    /// Canonical line spanned by two vectors; errors unless they have rank 2.
    pub fn from_rows(f: &Field, a: Vec4, b: Vec4) -> Result<Self> {
        let mut rows = [a, b];
        if linalg::rref(f, &mut rows) != 2 {
            return Err(Error::Rank(2));
        }
        Ok(PLine { rows })
    }

    pub fn from_codes(f: &Field, codes: [[u32; 4]; 2]) -> Result<Self> {
        let a = PPoint::from_codes(f, codes[0]).map(|p| p.coords).unwrap_or(ZERO4);
        let b = PPoint::from_codes(f, codes[1]).map(|p| p.coords).unwrap_or(ZERO4);
        Self::from_rows(f, a, b)
    }

    pub fn rows(&self) -> &[Vec4; 2] {
        &self.rows
    }

    /// The `q + 1` points, unsorted.
    pub fn points(&self, f: &Field) -> Vec<PPoint> {
        let mut out: Vec<PPoint> = f
            .elements()
            .map(|b| PPoint { coords: linalg::add(f, &self.rows[0], &linalg::scale(f, b, &self.rows[1])) })
            .collect();
        out.push(PPoint { coords: self.rows[1] });
        out
    }

    pub fn contains(&self, f: &Field, p: &PPoint) -> bool {
        linalg::rank(f, &[self.rows[0], self.rows[1], p.coords]) == 2
    }
}

/// A plane of PG(3,q), stored as its normalized dual vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PPlane {
    dual: Vec4,
}

impl PPlane {
    pub fn new(f: &Field, v: Vec4) -> Result<Self> {
        linalg::normalize(f, &v).map(|dual| PPlane { dual }).ok_or(Error::Rank(1))
    }

    pub fn dual(&self) -> &Vec4 {
        &self.dual
    }

    pub fn contains(&self, f: &Field, p: &PPoint) -> bool {
        linalg::dot(f, &self.dual, &p.coords).is_zero()
    }
}

/// A flag `(point, plane)` with the point on the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pencil {
    pub point: u32,
    pub plane: u32,
}

/// Line through two distinct points.
pub fn line_through(f: &Field, p1: &PPoint, p2: &PPoint) -> Result<PLine> {
    if p1 == p2 {
        return Err(Error::EqualPoints);
    }
    PLine::from_rows(f, p1.coords, p2.coords)
}

/// Common point of two distinct lines, `None` when they are skew.
pub fn meet(f: &Field, l1: &PLine, l2: &PLine) -> Result<Option<PPoint>> {
    if l1 == l2 {
        return Err(Error::IdenticalLines);
    }
    let stacked = [l1.rows[0], l1.rows[1], l2.rows[0], l2.rows[1]];
    if linalg::rank(f, &stacked) == 4 {
        return Ok(None);
    }
    Ok(l1.points(f).into_iter().find(|p| l2.contains(f, p)))
}

/// Plücker coordinates `(p01, p02, p03, p12, p13, p23)`, normalized.
pub fn plucker(f: &Field, l: &PLine) -> [FieldElem; 6] {
    let [a, b] = &l.rows;
    let p = |i: usize, j: usize| f.add(f.mul(a[i], b[j]), f.mul(a[j], b[i]));
    let raw = [p(0, 1), p(0, 2), p(0, 3), p(1, 2), p(1, 3), p(2, 3)];
    let lead = raw.iter().copied().find(|x| !x.is_zero()).expect("rank-2 line");
    let s = f.inv(lead).unwrap();
    raw.map(|x| f.mul(s, x))
}

/// `p01·p23 + p02·p13 + p03·p12`, zero on every line.
pub fn klein_form(f: &Field, p: &[FieldElem; 6]) -> FieldElem {
    f.add(f.add(f.mul(p[0], p[5]), f.mul(p[1], p[4])), f.mul(p[2], p[3]))
}

/// Polar bilinear form of the Klein quadric; vanishes iff the lines meet.
pub fn klein_pairing(f: &Field, p: &[FieldElem; 6], r: &[FieldElem; 6]) -> FieldElem {
    let t = |i: usize, j: usize| f.add(f.mul(p[i], r[j]), f.mul(p[j], r[i]));
    f.add(f.add(t(0, 5), t(1, 4)), t(2, 3))
}

fn vec_key(v: &Vec4) -> u32 {
    v.iter().fold(0u32, |acc, x| (acc << 4) | x.code() as u32)
}

fn line_key(l: &PLine) -> u32 {
    (vec_key(&l.rows[0]) << 16) | vec_key(&l.rows[1])
}

/// All normalized nonzero vectors in lexicographic order.
fn normalized_vectors(f: &Field) -> Vec<Vec4> {
    let q = f.order();
    let mut out = Vec::new();
    for code in 0..q.pow(4) {
        let v: Vec4 = [3, 2, 1, 0].map(|s| FieldElem::from_code(((code / q.pow(s)) % q) as u8));
        if v.iter().find(|x| !x.is_zero()) == Some(&FieldElem::ONE) {
            out.push(v);
        }
    }
    out
}

/// All RREF 2×4 matrices of rank 2, sorted by encoding.
fn rref_lines(f: &Field) -> Vec<PLine> {
    let q = f.order();
    let mut out = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let free: Vec<(usize, usize)> = (i + 1..4)
                .filter(|&c| c != j)
                .map(|c| (0, c))
                .chain((j + 1..4).map(|c| (1, c)))
                .collect();
            for code in 0..q.pow(free.len() as u32) {
                let mut rows = [ZERO4; 2];
                rows[0][i] = FieldElem::ONE;
                rows[1][j] = FieldElem::ONE;
                let mut c = code;
                for &(r, col) in &free {
                    rows[r][col] = FieldElem::from_code((c % q) as u8);
                    c /= q;
                }
                out.push(PLine { rows });
            }
        }
    }
    out.sort_by_key(line_key);
    out
}

fn invert(n: usize, table: &[u32], stride: usize, out_stride: usize) -> Vec<u32> {
    let mut out = vec![Vec::with_capacity(out_stride); n];
    for (i, chunk) in table.chunks(stride).enumerate() {
        for &x in chunk {
            out[x as usize].push(i as u32);
        }
    }
    out.into_iter()
        .flat_map(|v| {
            debug_assert_eq!(v.len(), out_stride);
            v
        })
        .collect()
}

fn sorted_intersection(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Points, lines, planes and pencils of PG(3,q) with incidence lists.
///
/// All incidence lists are sorted by index. The pencil → lines table is
/// stored for q ≤ 4 and computed on demand otherwise.
#[derive(Clone)]
pub struct GeometryTables {
    q: u32,
    field: Field,
    points: Vec<PPoint>,
    lines: Vec<PLine>,
    planes: Vec<PPlane>,
    point_index: HashMap<u32, u32>,
    line_index: HashMap<u32, u32>,
    line_points: Vec<u32>,
    line_planes: Vec<u32>,
    point_lines: Vec<u32>,
    plane_lines: Vec<u32>,
    point_planes: Vec<u32>,
    plane_points: Vec<u32>,
    pencil_lines: Option<Vec<u32>>,
    line_pencils: Option<Vec<u32>>,
}

impl std::fmt::Debug for GeometryTables {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeometryTables")
            .field("q", &self.q)
            .field("points", &self.points.len())
            .field("lines", &self.lines.len())
            .finish()
    }
}

impl GeometryTables {
    pub fn build(q: u32) -> Result<Self> {
        let field = Field::with_order(q)?;
        let f = &field;
        let vectors = normalized_vectors(f);
        let points: Vec<PPoint> = vectors.iter().map(|&coords| PPoint { coords }).collect();
        let planes: Vec<PPlane> = vectors.iter().map(|&dual| PPlane { dual }).collect();
        let point_index: HashMap<u32, u32> =
            vectors.iter().enumerate().map(|(i, v)| (vec_key(v), i as u32)).collect();
        let lines = rref_lines(f);
        let line_index: HashMap<u32, u32> =
            lines.iter().enumerate().map(|(i, l)| (line_key(l), i as u32)).collect();

        let lookup = |v: &Vec4| point_index[&vec_key(&linalg::normalize(f, v).unwrap())];
        let mut line_points = Vec::with_capacity(lines.len() * (q as usize + 1));
        let mut line_planes = Vec::with_capacity(lines.len() * (q as usize + 1));
        for l in &lines {
            let mut pts: Vec<u32> = l.points(f).iter().map(|p| lookup(&p.coords)).collect();
            pts.sort_unstable();
            line_points.extend(pts);
            let ann = linalg::annihilator(f, &l.rows);
            let ann = PLine { rows: [ann[0], ann[1]] };
            let mut pls: Vec<u32> = ann.points(f).iter().map(|p| lookup(&p.coords)).collect();
            pls.sort_unstable();
            line_planes.extend(pls);
        }
        let star = (q * q + q + 1) as usize;
        let stride = q as usize + 1;
        let point_lines = invert(points.len(), &line_points, stride, star);
        let plane_lines = invert(planes.len(), &line_planes, stride, star);
        let mut plane_points = Vec::with_capacity(planes.len() * star);
        for pl in &planes {
            plane_points.extend(
                points.iter().enumerate().filter(|(_, p)| pl.contains(f, p)).map(|(i, _)| i as u32),
            );
        }
        let point_planes = invert(points.len(), &plane_points, star, star);

        let mut t = GeometryTables {
            q,
            field,
            points,
            lines,
            planes,
            point_index,
            line_index,
            line_points,
            line_planes,
            point_lines,
            plane_lines,
            point_planes,
            plane_points,
            pencil_lines: None,
            line_pencils: None,
        };
        if q <= 4 {
            let mut pl = Vec::with_capacity(t.num_pencils() * stride);
            for idx in 0..t.num_pencils() as u32 {
                let Pencil { point, plane } = t.pencil(idx);
                pl.extend(sorted_intersection(t.point_lines(point), t.plane_lines(plane)));
            }
            t.pencil_lines = Some(pl);
            let lp: Vec<u32> = (0..t.num_lines() as u32).flat_map(|l| t.compute_line_pencils(l)).collect();
            t.line_pencils = Some(lp);
        }
        Ok(t)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn num_planes(&self) -> usize {
        self.planes.len()
    }

    pub fn num_pencils(&self) -> usize {
        self.points.len() * self.star()
    }

    /// q² + q + 1: lines through a point, lines in a plane, planes through a point.
    pub fn star(&self) -> usize {
        (self.q * self.q + self.q + 1) as usize
    }

    pub fn points(&self) -> &[PPoint] {
        &self.points
    }

    pub fn lines(&self) -> &[PLine] {
        &self.lines
    }

    pub fn planes(&self) -> &[PPlane] {
        &self.planes
    }

    pub fn point(&self, i: u32) -> &PPoint {
        &self.points[i as usize]
    }

    pub fn line(&self, i: u32) -> &PLine {
        &self.lines[i as usize]
    }

    pub fn plane(&self, i: u32) -> &PPlane {
        &self.planes[i as usize]
    }

    pub fn point_id(&self, p: &PPoint) -> Option<u32> {
        self.point_index.get(&vec_key(&p.coords)).copied()
    }

    pub fn plane_id(&self, p: &PPlane) -> Option<u32> {
        self.point_index.get(&vec_key(&p.dual)).copied()
    }

    pub fn line_id(&self, l: &PLine) -> Option<u32> {
        self.line_index.get(&line_key(l)).copied()
    }

    /// Index of the line spanned by two vectors.
    pub fn line_id_of_rows(&self, a: Vec4, b: Vec4) -> Result<u32> {
        let l = PLine::from_rows(&self.field, a, b)?;
        Ok(self.line_id(&l).expect("every RREF line is tabulated"))
    }

    pub fn check_line(&self, l: u32) -> Result<u32> {
        if (l as usize) < self.lines.len() {
            Ok(l)
        } else {
            Err(Error::InvalidLine(l))
        }
    }

    fn stride(&self) -> usize {
        self.q as usize + 1
    }

    pub fn line_points(&self, l: u32) -> &[u32] {
        let s = self.stride();
        &self.line_points[l as usize * s..(l as usize + 1) * s]
    }

    pub fn line_planes(&self, l: u32) -> &[u32] {
        let s = self.stride();
        &self.line_planes[l as usize * s..(l as usize + 1) * s]
    }

    pub fn point_lines(&self, p: u32) -> &[u32] {
        let s = self.star();
        &self.point_lines[p as usize * s..(p as usize + 1) * s]
    }

    pub fn plane_lines(&self, p: u32) -> &[u32] {
        let s = self.star();
        &self.plane_lines[p as usize * s..(p as usize + 1) * s]
    }

    pub fn point_planes(&self, p: u32) -> &[u32] {
        let s = self.star();
        &self.point_planes[p as usize * s..(p as usize + 1) * s]
    }

    pub fn plane_points(&self, p: u32) -> &[u32] {
        let s = self.star();
        &self.plane_points[p as usize * s..(p as usize + 1) * s]
    }

    pub fn point_on_plane(&self, point: u32, plane: u32) -> bool {
        self.plane(plane).contains(&self.field, self.point(point))
    }

    pub fn line_in_plane(&self, line: u32, plane: u32) -> bool {
        self.line_planes(line).binary_search(&plane).is_ok()
    }

    pub fn point_on_line(&self, point: u32, line: u32) -> bool {
        self.line_points(line).binary_search(&point).is_ok()
    }

    /// Shared point of two distinct lines.
    pub fn common_point(&self, a: u32, b: u32) -> Option<u32> {
        sorted_intersection(self.line_points(a), self.line_points(b)).first().copied()
    }

    pub fn lines_meet(&self, a: u32, b: u32) -> bool {
        let (x, y) = (self.line_points(a), self.line_points(b));
        let (mut i, mut j) = (0, 0);
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn pencil(&self, idx: u32) -> Pencil {
        let s = self.star() as u32;
        let point = idx / s;
        Pencil { point, plane: self.point_planes(point)[(idx % s) as usize] }
    }

    pub fn pencils(&self) -> impl Iterator<Item = Pencil> + '_ {
        (0..self.num_pencils() as u32).map(|i| self.pencil(i))
    }

    pub fn pencil_index(&self, f: Pencil) -> Result<u32> {
        let k = self
            .point_planes(f.point)
            .binary_search(&f.plane)
            .map_err(|_| Error::NotAFlag { point: f.point, plane: f.plane })?;
        Ok(f.point * self.star() as u32 + k as u32)
    }

    /// The q + 1 lines of a pencil, by pencil index.
    pub fn pencil_lines_at(&self, idx: u32) -> Cow<'_, [u32]> {
        match &self.pencil_lines {
            Some(t) => {
                let s = self.stride();
                Cow::Borrowed(&t[idx as usize * s..(idx as usize + 1) * s])
            }
            None => {
                let Pencil { point, plane } = self.pencil(idx);
                Cow::Owned(sorted_intersection(self.point_lines(point), self.plane_lines(plane)))
            }
        }
    }

    pub fn pencil_lines(&self, f: Pencil) -> Result<Cow<'_, [u32]>> {
        Ok(self.pencil_lines_at(self.pencil_index(f)?))
    }

    /// The (q + 1)² pencils containing a line, ascending.
    pub fn line_pencils(&self, l: u32) -> Cow<'_, [u32]> {
        match &self.line_pencils {
            Some(t) => {
                let s = self.stride() * self.stride();
                Cow::Borrowed(&t[l as usize * s..(l as usize + 1) * s])
            }
            None => Cow::Owned(self.compute_line_pencils(l)),
        }
    }

    fn compute_line_pencils(&self, l: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.stride() * self.stride());
        for &p in self.line_points(l) {
            for &pl in self.line_planes(l) {
                out.push(self.pencil_index(Pencil { point: p, plane: pl }).expect("flag"));
            }
        }
        out
    }

    /// Stable digest of q, the modulus and the ordered line encodings.
    pub fn table_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.q.to_le_bytes());
        h.update(self.field.spec().modulus.to_le_bytes());
        for l in &self.lines {
            h.update(line_key(l).to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}
