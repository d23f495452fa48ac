//! The regular spread of PG(3,4), its line partition, and the group G*.
//!
//! GF(16)² is read as GF(4)⁴ through the basis `{1, ζ}` of GF(16) over the
//! embedded copy of GF(4) (`ω ↦ ζ⁵`): the vector `(x, y)` with
//! `x = a + bζ`, `y = c + dζ` becomes `(a, b, c, d)`. Each point `(x : y)` of
//! PG(1,16) becomes the line of PG(3,4) spanned by `(x, y)` and `ζ(x, y)`;
//! the 17 lines obtained this way form the regular spread.
//!
//! Maps act on row vectors: a point `x` goes to `x·M`. A 2×2 matrix over
//! GF(16) is turned into a 4×4 matrix over GF(4) by [`blowup`], which is
//! multiplicative.
//!
//! The distinguished spread line `s` comes from `(1 : 0)`. The group G* is
//! generated by the blow-ups of `diag(ζ³, 1)`, `diag(1, ζ³)` and
//! `[[1, 0], [1, 1]]`; it fixes `s` and has order 400.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{embed_gf4_gf16, Field, FieldElem};
use crate::lineset::LineSet;
use crate::linalg::{self, Mat4, Vec4, ZERO4};
use crate::projgeom::GeometryTables;

/// Default cap on the size of a generated group.
pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

/// An invertible 4×4 matrix up to scalars, acting on row vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearMap4 {
    matrix: Mat4,
}

impl LinearMap4 {
    /// Normalizes so the first nonzero entry in row-major order is 1.
    pub fn new(f: &Field, matrix: Mat4) -> Result<Self> {
        linalg::inverse(f, &matrix)?;
        let lead = matrix.iter().flatten().copied().find(|x| !x.is_zero()).ok_or(Error::SingularMatrix)?;
        let s = f.inv(lead)?;
        Ok(LinearMap4 { matrix: matrix.map(|row| linalg::scale(f, s, &row)) })
    }

    pub fn identity() -> Self {
        LinearMap4 { matrix: linalg::identity4() }
    }

    /// The map whose `i`-th row is the image of the `i`-th unit vector.
    pub fn from_fn(f: &Field, image: impl Fn(Vec4) -> Vec4) -> Result<Self> {
        let m: Mat4 = std::array::from_fn(|i| {
            let mut e = ZERO4;
            e[i] = FieldElem::ONE;
            image(e)
        });
        Self::new(f, m)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    /// `self` followed by `other`.
    pub fn then(&self, f: &Field, other: &LinearMap4) -> LinearMap4 {
        LinearMap4::new(f, linalg::mat_mul(f, &self.matrix, &other.matrix)).expect("product of invertible maps")
    }

    pub fn inverse(&self, f: &Field) -> LinearMap4 {
        LinearMap4::new(f, linalg::inverse(f, &self.matrix).expect("invertible")).unwrap()
    }

    pub fn apply(&self, f: &Field, v: &Vec4) -> Vec4 {
        linalg::vec_mat(f, v, &self.matrix)
    }

    pub fn point_image(&self, t: &GeometryTables, p: u32) -> u32 {
        let f = t.field();
        let v = linalg::normalize(f, &self.apply(f, t.point(p).coords())).unwrap();
        t.point_id(&crate::projgeom::PPoint::new(f, v).unwrap()).unwrap()
    }

    pub fn line_image(&self, t: &GeometryTables, l: u32) -> u32 {
        let f = t.field();
        let [a, b] = t.line(l).rows();
        t.line_id_of_rows(self.apply(f, a), self.apply(f, b)).expect("invertible map")
    }

    /// Permutation of all line indices.
    pub fn line_perm(&self, t: &GeometryTables) -> Vec<u32> {
        (0..t.num_lines() as u32).map(|l| self.line_image(t, l)).collect()
    }

    pub fn point_perm(&self, t: &GeometryTables) -> Vec<u32> {
        (0..t.num_points() as u32).map(|p| self.point_image(t, p)).collect()
    }
}

/// A 2×2 matrix over GF(16), acting on row vectors of GF(16)².
pub type Mat2 = [[FieldElem; 2]; 2];

/// GF(16) with coordinates in the basis `{1, ζ}` over the embedded GF(4).
#[derive(Debug, Clone)]
pub struct FieldReduction {
    gf4: Field,
    gf16: Field,
    coords: [[FieldElem; 2]; 16],
}

impl Default for FieldReduction {
    fn default() -> Self {
        Self::new()
    }
}

impl FieldReduction {
    pub fn new() -> Self {
        let gf4 = Field::gf4();
        let gf16 = Field::gf16();
        let zeta = gf16.generator();
        let mut coords = [[FieldElem::ZERO; 2]; 16];
        for a in gf4.elements() {
            for b in gf4.elements() {
                let x = gf16.add(embed_gf4_gf16(a).unwrap(), gf16.mul(embed_gf4_gf16(b).unwrap(), zeta));
                coords[x.code() as usize] = [a, b];
            }
        }
        FieldReduction { gf4, gf16, coords }
    }

    pub fn gf4(&self) -> &Field {
        &self.gf4
    }

    pub fn gf16(&self) -> &Field {
        &self.gf16
    }

    /// `(x, y) ∈ GF(16)²` as a vector of GF(4)⁴.
    pub fn reduce(&self, v: [FieldElem; 2]) -> Vec4 {
        let [a, b] = self.coords[v[0].code() as usize];
        let [c, d] = self.coords[v[1].code() as usize];
        [a, b, c, d]
    }

    fn mul_vec(&self, v: [FieldElem; 2], m: &Mat2) -> [FieldElem; 2] {
        let f = &self.gf16;
        std::array::from_fn(|j| f.add(f.mul(v[0], m[0][j]), f.mul(v[1], m[1][j])))
    }

    /// The GF(4)-matrix of `v ↦ v·m`, before scalar normalization.
    pub fn blowup_matrix(&self, m: &Mat2) -> Result<Mat4> {
        let f = &self.gf16;
        if f.add(f.mul(m[0][0], m[1][1]), f.mul(m[0][1], m[1][0])).is_zero() {
            return Err(Error::SingularMatrix);
        }
        let zeta = f.generator();
        let basis = [[FieldElem::ONE, FieldElem::ZERO], [zeta, FieldElem::ZERO], [FieldElem::ZERO, FieldElem::ONE], [
            FieldElem::ZERO,
            zeta,
        ]];
        Ok(basis.map(|e| self.reduce(self.mul_vec(e, m))))
    }

    /// The spread line coming from the point `(x : y)` of PG(1,16).
    pub fn spread_line(&self, t: &GeometryTables, v: [FieldElem; 2]) -> Result<u32> {
        let zeta = self.gf16.generator();
        let w = [self.gf16.mul(zeta, v[0]), self.gf16.mul(zeta, v[1])];
        t.line_id_of_rows(self.reduce(v), self.reduce(w))
    }
}

/// Blow-up of an invertible 2×2 matrix over GF(16) to a map of PG(3,4).
pub fn blowup(m: &Mat2) -> Result<LinearMap4> {
    let fr = FieldReduction::new();
    LinearMap4::new(fr.gf4(), fr.blowup_matrix(m)?)
}

fn require_q4(t: &GeometryTables) -> Result<()> {
    if t.q() == 4 {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder(t.q()))
    }
}

/// The regular spread: line `i` comes from `(1 : 0)` for `i = 0` and from
/// `(x : 1)` with `x` of code `i - 1` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadModel {
    pub lines: Vec<u32>,
    pub s: u32,
    /// Codes in GF(16) of the blow-up basis.
    pub basis: [FieldElem; 2],
}

impl SpreadModel {
    pub fn line_set(&self, t: &GeometryTables) -> LineSet {
        LineSet::new(t, self.lines.iter().copied()).unwrap()
    }

    /// The unique spread line lying in a plane.
    pub fn line_in_plane(&self, t: &GeometryTables, plane: u32) -> Option<u32> {
        self.lines.iter().copied().find(|&l| t.line_in_plane(l, plane))
    }
}

pub fn build_spread(t: &GeometryTables) -> Result<SpreadModel> {
    require_q4(t)?;
    let fr = FieldReduction::new();
    let mut lines = vec![fr.spread_line(t, [FieldElem::ONE, FieldElem::ZERO])?];
    for x in fr.gf16().elements() {
        lines.push(fr.spread_line(t, [x, FieldElem::ONE])?);
    }
    Ok(SpreadModel { lines: lines.clone(), s: lines[0], basis: [FieldElem::ONE, fr.gf16().generator()] })
}

/// The lines split as S (spread minus s), s⊥ (s and the lines meeting it)
/// and A (everything else).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinePartition {
    pub spread_rest: LineSet,
    pub s_perp: LineSet,
    pub rest: LineSet,
}

pub fn partition_lines(t: &GeometryTables, sp: &SpreadModel) -> Result<LinePartition> {
    let spread_rest = LineSet::new(t, sp.lines.iter().copied().filter(|&l| l != sp.s))?;
    let s_perp = LineSet::new(t, (0..t.num_lines() as u32).filter(|&l| l == sp.s || t.lines_meet(l, sp.s)))?;
    let rest = LineSet::new(
        t,
        (0..t.num_lines() as u32).filter(|&l| !spread_rest.contains(l) && !s_perp.contains(l)),
    )?;
    Ok(LinePartition { spread_rest, s_perp, rest })
}

/// A finite group of collineations, fully enumerated.
#[derive(Debug, Clone)]
pub struct GroupAction {
    pub generators: Vec<LinearMap4>,
    /// Elements in breadth-first order from the identity.
    pub elements: Vec<LinearMap4>,
    pub line_perms: Vec<Vec<u32>>,
    pub point_perms: Vec<Vec<u32>>,
    generator_line_perms: Vec<Vec<u32>>,
}

impl GroupAction {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generator_line_perms(&self) -> &[Vec<u32>] {
        &self.generator_line_perms
    }

    /// Elements mapping the plane onto itself.
    pub fn plane_stabilizer(&self, t: &GeometryTables, plane: u32) -> Vec<usize> {
        let pts = t.plane_points(plane);
        (0..self.order())
            .filter(|&g| pts.iter().all(|&p| t.point_on_plane(self.point_perms[g][p as usize], plane)))
            .collect()
    }

    /// Orbits on an invariant domain, ordered by smallest member.
    pub fn orbits(&self, t: &GeometryTables, domain: &LineSet) -> Result<Vec<LineSet>> {
        for perm in &self.generator_line_perms {
            if let Some(l) = domain.iter().find(|&l| !domain.contains(perm[l as usize])) {
                return Err(Error::NotInvariant(l));
            }
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for start in domain.iter() {
            if !seen.insert(start) {
                continue;
            }
            let mut orbit = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(l) = queue.pop_front() {
                for perm in &self.generator_line_perms {
                    let m = perm[l as usize];
                    if seen.insert(m) {
                        orbit.push(m);
                        queue.push_back(m);
                    }
                }
            }
            out.push(LineSet::new(t, orbit)?);
        }
        Ok(out)
    }
}

/// Closure of the generators under composition.
pub fn generate_group(t: &GeometryTables, generators: &[LinearMap4], cap: usize) -> Result<GroupAction> {
    let f = t.field();
    let id = LinearMap4::identity();
    let mut seen = HashSet::from([id]);
    let mut elements = vec![id];
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for h in generators {
            let gh = g.then(f, h);
            if seen.insert(gh) {
                if elements.len() == cap {
                    return Err(Error::GroupTooLarge(cap));
                }
                elements.push(gh);
                queue.push_back(gh);
            }
        }
    }
    let line_perms = elements.iter().map(|g| g.line_perm(t)).collect();
    let point_perms = elements.iter().map(|g| g.point_perm(t)).collect();
    let generator_line_perms = generators.iter().map(|g| g.line_perm(t)).collect();
    Ok(GroupAction { generators: generators.to_vec(), elements, line_perms, point_perms, generator_line_perms })
}

/// The three generators of G* as 2×2 matrices over GF(16).
pub fn g_star_generators_gf16() -> [Mat2; 3] {
    let gf16 = Field::gf16();
    let z3 = gf16.pow(gf16.generator(), 3);
    let (o, i) = (FieldElem::ZERO, FieldElem::ONE);
    [[[z3, o], [o, i]], [[i, o], [o, z3]], [[i, o], [i, i]]]
}

pub fn g_star_generators() -> Vec<LinearMap4> {
    g_star_generators_gf16().iter().map(|m| blowup(m).unwrap()).collect()
}

/// Correlation sending a line to its annihilator under the standard dot
/// product; an involution that maps pencils to pencils.
pub fn duality(t: &GeometryTables, l: u32) -> u32 {
    let ann = linalg::annihilator(t.field(), t.line(l).rows());
    t.line_id_of_rows(ann[0], ann[1]).unwrap()
}

/// Applies `x ↦ x²` to every coordinate.
pub fn frobenius_line(t: &GeometryTables, l: u32) -> u32 {
    let f = t.field();
    let [a, b] = t.line(l).rows();
    t.line_id_of_rows(a.map(|x| f.frobenius(x)), b.map(|x| f.frobenius(x))).unwrap()
}

pub fn duality_perm(t: &GeometryTables) -> Vec<u32> {
    (0..t.num_lines() as u32).map(|l| duality(t, l)).collect()
}

pub fn frobenius_perm(t: &GeometryTables) -> Vec<u32> {
    (0..t.num_lines() as u32).map(|l| frobenius_line(t, l)).collect()
}

/// Everything needed for the 96-line sets: spread, partition, G* and its
/// three orbits on A.
#[derive(Debug, Clone)]
pub struct SpreadConstruction {
    pub spread: SpreadModel,
    pub partition: LinePartition,
    pub group: GroupAction,
    /// Orbits A1, A2, A3, ordered by smallest line index.
    pub orbits: Vec<LineSet>,
}

impl SpreadConstruction {
    pub fn new(t: &GeometryTables) -> Result<Self> {
        let spread = build_spread(t)?;
        let partition = partition_lines(t, &spread)?;
        let group = generate_group(t, &g_star_generators(), DEFAULT_GROUP_CAP)?;
        let orbits = group.orbits(t, &partition.rest)?;
        Ok(SpreadConstruction { spread, partition, group, orbits })
    }

    /// `S ∪ A_i` for `i` in 1..=3.
    pub fn build_96(&self, i: usize) -> Result<LineSet> {
        let orbit = i
            .checked_sub(1)
            .and_then(|k| self.orbits.get(k))
            .ok_or_else(|| Error::Invalid(format!("orbit index {i} not in 1..={}", self.orbits.len())))?;
        Ok(self.partition.spread_rest.union(orbit))
    }

    /// For a plane not containing s: its spread line ℓ and, for each point
    /// of ℓ in order, the unique line of `A_i` through it inside the plane.
    pub fn dual_hyperoval_lines(&self, t: &GeometryTables, plane: u32, i: usize) -> Result<Vec<u32>> {
        if t.line_in_plane(self.spread.s, plane) {
            return Err(Error::Invalid(format!("plane {plane} contains s")));
        }
        let orbit = &self.orbits[i - 1];
        let ell = self.spread.line_in_plane(t, plane).expect("every plane holds a spread line");
        let mut out = vec![ell];
        for &p in t.line_points(ell) {
            let hits: Vec<u32> = t
                .point_lines(p)
                .iter()
                .copied()
                .filter(|&l| orbit.contains(l) && t.line_in_plane(l, plane))
                .collect();
            if hits.len() != 1 {
                return Err(Error::Invalid(format!("point {p} has {} orbit lines in plane {plane}", hits.len())));
            }
            out.push(hits[0]);
        }
        Ok(out)
    }
}
