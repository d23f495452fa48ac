//! Quadratic forms on the 4-dimensional space over GF(q).
//!
//! A form is `Q(x) = Σ c_ij x_i x_j` over `0 ≤ i ≤ j ≤ 3`, with the ten
//! coefficients stored in lexicographic `(i, j)` order. In characteristic 2
//! the polar form `b(x, y) = Q(x + y) + Q(x) + Q(y)` is alternating and its
//! Gram matrix has `c_ij` off the diagonal and zeros on it.
//!
//! Classification uses the rank of the polar form and the number of
//! projective zeros: rank 4 with `(q+1)²` zeros is hyperbolic, rank 4 with
//! `q²+1` zeros is elliptic, anything of lower rank is degenerate.

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};
use crate::lineset::LineSet;
use crate::linalg::{self, Mat4, Vec4, ZERO4};
use crate::projgeom::{GeometryTables, PLine, PPoint};

/// Exponent pairs `(i, j)` in coefficient order.
pub const MONOMIALS: [(usize, usize); 10] =
    [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QForm {
    coeffs: [FieldElem; 10],
}

impl QForm {
    pub const fn new(coeffs: [FieldElem; 10]) -> Self {
        QForm { coeffs }
    }

    pub fn from_codes(f: &Field, codes: [u32; 10]) -> Result<Self> {
        let mut coeffs = [FieldElem::ZERO; 10];
        for (c, code) in coeffs.iter_mut().zip(codes) {
            *c = f.elem(code)?;
        }
        Ok(QForm { coeffs })
    }

    /// `x0·x1 + x2·x3`.
    pub fn standard_hyperbolic() -> Self {
        let mut coeffs = [FieldElem::ZERO; 10];
        coeffs[1] = FieldElem::ONE;
        coeffs[8] = FieldElem::ONE;
        QForm { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElem; 10] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> FieldElem {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.coeffs[MONOMIALS.iter().position(|&m| m == (i, j)).unwrap()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn evaluate(&self, f: &Field, x: &Vec4) -> FieldElem {
        MONOMIALS.iter().zip(&self.coeffs).fold(FieldElem::ZERO, |acc, (&(i, j), &c)| {
            if c.is_zero() {
                acc
            } else {
                f.add(acc, f.mul(c, f.mul(x[i], x[j])))
            }
        })
    }

    pub fn polar(&self, f: &Field, x: &Vec4, y: &Vec4) -> FieldElem {
        let s = linalg::add(f, x, y);
        f.add(f.add(self.evaluate(f, &s), self.evaluate(f, x)), self.evaluate(f, y))
    }

    /// Gram matrix of the polar form.
    pub fn polar_matrix(&self) -> Mat4 {
        let mut m = [ZERO4; 4];
        for (&(i, j), &c) in MONOMIALS.iter().zip(&self.coeffs) {
            if i != j {
                m[i][j] = c;
                m[j][i] = c;
            }
        }
        m
    }

    pub fn polar_rank(&self, f: &Field) -> usize {
        linalg::rank(f, &self.polar_matrix())
    }

    pub fn scaled(&self, f: &Field, s: FieldElem) -> Self {
        QForm { coeffs: self.coeffs.map(|c| f.mul(s, c)) }
    }

    /// The form `x ↦ Q(x·m)`, whose zero set is the preimage of ours under `m`.
    pub fn pullback(&self, f: &Field, m: &Mat4) -> Self {
        // Q(xM) is quadratic in x; recover coefficients by polarization.
        let e = |i: usize| {
            let mut v = ZERO4;
            v[i] = FieldElem::ONE;
            v
        };
        let image = |v: &Vec4| linalg::vec_mat(f, v, m);
        let coeffs = MONOMIALS.map(|(i, j)| {
            if i == j {
                self.evaluate(f, &image(&e(i)))
            } else {
                self.polar(f, &image(&e(i)), &image(&e(j)))
            }
        });
        QForm { coeffs }
    }
}

pub fn evaluate(f: &Field, form: &QForm, p: &PPoint) -> FieldElem {
    form.evaluate(f, p.coords())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadricKind {
    Hyperbolic,
    Elliptic,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadricClass {
    pub kind: QuadricKind,
    pub zero_count: usize,
    pub polar_rank: usize,
}

fn kind_of(q: u32, polar_rank: usize, zero_count: usize) -> QuadricKind {
    let q = q as usize;
    match polar_rank {
        4 if zero_count == (q + 1) * (q + 1) => QuadricKind::Hyperbolic,
        4 if zero_count == q * q + 1 => QuadricKind::Elliptic,
        _ => QuadricKind::Degenerate,
    }
}

/// Points of the geometry on which the form vanishes.
pub fn zero_points(form: &QForm, t: &GeometryTables) -> FixedBitSet {
    let f = t.field();
    let mut zeros = FixedBitSet::with_capacity(t.num_points());
    for (i, p) in t.points().iter().enumerate() {
        if form.evaluate(f, p.coords()).is_zero() {
            zeros.insert(i);
        }
    }
    zeros
}

pub fn classify(form: &QForm, t: &GeometryTables) -> QuadricClass {
    let zero_count = zero_points(form, t).count_ones(..);
    let polar_rank = form.polar_rank(t.field());
    QuadricClass { kind: kind_of(t.q(), polar_rank, zero_count), zero_count, polar_rank }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineClass {
    Contained,
    Secant,
    Tangent,
    External,
}

fn line_class(zeros_on_line: usize, q: u32) -> LineClass {
    match zeros_on_line {
        0 => LineClass::External,
        1 => LineClass::Tangent,
        n if n == q as usize + 1 => LineClass::Contained,
        _ => LineClass::Secant,
    }
}

/// Position of a line relative to the quadric, from its zero count.
pub fn classify_line(f: &Field, form: &QForm, l: &PLine) -> LineClass {
    let zeros = l.points(f).iter().filter(|p| form.evaluate(f, p.coords()).is_zero()).count();
    line_class(zeros, f.order())
}

/// Zero set of a form together with per-line classification over a table.
#[derive(Debug, Clone)]
pub struct Quadric<'t> {
    tables: &'t GeometryTables,
    form: QForm,
    zeros: FixedBitSet,
}

impl<'t> Quadric<'t> {
    pub fn new(t: &'t GeometryTables, form: QForm) -> Self {
        Quadric { tables: t, form, zeros: zero_points(&form, t) }
    }

    pub fn form(&self) -> &QForm {
        &self.form
    }

    pub fn zeros(&self) -> &FixedBitSet {
        &self.zeros
    }

    pub fn contains_point(&self, p: u32) -> bool {
        self.zeros.contains(p as usize)
    }

    pub fn class(&self) -> QuadricClass {
        let zero_count = self.zeros.count_ones(..);
        let polar_rank = self.form.polar_rank(self.tables.field());
        QuadricClass { kind: kind_of(self.tables.q(), polar_rank, zero_count), zero_count, polar_rank }
    }

    fn require_hyperbolic(&self) -> Result<()> {
        if self.class().kind == QuadricKind::Hyperbolic {
            Ok(())
        } else {
            Err(Error::NotHyperbolic)
        }
    }

    pub fn line_zero_count(&self, l: u32) -> usize {
        self.tables.line_points(l).iter().filter(|&&p| self.contains_point(p)).count()
    }

    pub fn classify_line(&self, l: u32) -> LineClass {
        line_class(self.line_zero_count(l), self.tables.q())
    }

    pub fn lines_of_class(&self, class: LineClass) -> Vec<u32> {
        (0..self.tables.num_lines() as u32).filter(|&l| self.classify_line(l) == class).collect()
    }

    /// The two families of pairwise skew contained lines. The first family
    /// holds the contained line of smallest index.
    pub fn reguli(&self) -> Result<[Vec<u32>; 2]> {
        self.require_hyperbolic()?;
        let contained = self.lines_of_class(LineClass::Contained);
        let first = contained[0];
        let (skew, meeting): (Vec<u32>, Vec<u32>) = contained
            .iter()
            .partition(|&&l| l == first || !self.tables.lines_meet(first, l));
        debug_assert_eq!(skew.len(), meeting.len());
        Ok([skew, meeting])
    }

    pub fn plane_section(&self, plane: u32) -> Result<PlaneSection> {
        self.require_hyperbolic()?;
        let pts: Vec<u32> =
            self.tables.plane_points(plane).iter().copied().filter(|&p| self.contains_point(p)).collect();
        let q = self.tables.q() as usize;
        match pts.len() {
            n if n == q + 1 => Ok(PlaneSection::Conic(pts)),
            n if n == 2 * q + 1 => Ok(PlaneSection::LinePair(pts)),
            _ => Err(Error::NotHyperbolic),
        }
    }

    /// Lines skew to the quadric.
    pub fn external_lines(&self) -> Result<LineSet> {
        self.require_hyperbolic()?;
        LineSet::new(self.tables, self.lines_of_class(LineClass::External))
    }

    /// Number of lines in each class, in the order contained, secant,
    /// tangent, external.
    pub fn line_census(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for l in 0..self.tables.num_lines() as u32 {
            c[self.classify_line(l) as usize] += 1;
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneSection {
    /// q + 1 points, no three collinear.
    Conic(Vec<u32>),
    /// 2q + 1 points on two intersecting contained lines.
    LinePair(Vec<u32>),
}

impl PlaneSection {
    pub fn points(&self) -> &[u32] {
        match self {
            PlaneSection::Conic(p) | PlaneSection::LinePair(p) => p,
        }
    }
}

pub fn reguli(form: &QForm, t: &GeometryTables) -> Result<[Vec<u32>; 2]> {
    Quadric::new(t, *form).reguli()
}

pub fn plane_section(form: &QForm, t: &GeometryTables, plane: u32) -> Result<PlaneSection> {
    Quadric::new(t, *form).plane_section(plane)
}

pub fn external_lines(form: &QForm, t: &GeometryTables) -> Result<LineSet> {
    Quadric::new(t, *form).external_lines()
}

/// Evaluates many forms quickly over the point table of a small geometry.
struct FormEvaluator {
    field: Field,
    monomials: Vec<[FieldElem; 10]>,
}

impl FormEvaluator {
    fn new(t: &GeometryTables) -> Self {
        let f = t.field();
        let monomials =
            t.points().iter().map(|p| MONOMIALS.map(|(i, j)| f.mul(p.coords()[i], p.coords()[j]))).collect();
        FormEvaluator { field: f.clone(), monomials }
    }

    fn zero_count(&self, form: &QForm) -> usize {
        let f = &self.field;
        self.monomials
            .iter()
            .filter(|m| {
                m.iter().zip(&form.coeffs).fold(0u8, |acc, (&x, &c)| acc ^ f.mul(x, c).code()) == 0
            })
            .count()
    }
}

/// All forms up to scalars (first nonzero coefficient 1) that satisfy the
/// predicate, in lexicographic coefficient order.
///
/// Only q ≤ 4 is supported; q = 4 visits 349,525 scalar classes. Work is
/// split across the current rayon pool and merged in order.
pub fn scan_forms<P>(t: &GeometryTables, predicate: P) -> Result<Vec<QForm>>
where
    P: Fn(&QForm, &QuadricClass) -> bool + Sync,
{
    let q = t.q();
    if q > 4 {
        return Err(Error::UnsupportedOrder(q));
    }
    let eval = FormEvaluator::new(t);
    let total = q.pow(10);
    let out = (1..total)
        .into_par_iter()
        .with_min_len(4096)
        .filter_map(|code| {
            let coeffs: [FieldElem; 10] = std::array::from_fn(|m| {
                FieldElem::from_code(((code / q.pow(9 - m as u32)) % q) as u8)
            });
            if coeffs.iter().find(|c| !c.is_zero()) != Some(&FieldElem::ONE) {
                return None;
            }
            let form = QForm { coeffs };
            let zero_count = eval.zero_count(&form);
            let polar_rank = form.polar_rank(t.field());
            let class = QuadricClass { kind: kind_of(q, polar_rank, zero_count), zero_count, polar_rank };
            predicate(&form, &class).then_some(form)
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t4() -> GeometryTables {
        GeometryTables::build(4).unwrap()
    }

    fn elliptic_example(f: &Field) -> QForm {
        // x0x1 + x2² + x2x3 + ωx3²
        QForm::from_codes(f, [0, 1, 0, 0, 0, 0, 0, 1, 1, 2]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let t = t4();
        let f = t.field();
        let h = QForm::standard_hyperbolic();
        let p = |c| PPoint::from_codes(f, c).unwrap();
        assert_eq!(evaluate(f, &h, &p([1, 0, 0, 0])), FieldElem::ZERO);
        assert_eq!(evaluate(f, &h, &p([1, 1, 1, 1])), FieldElem::ZERO);
        assert_eq!(evaluate(f, &h, &p([1, 1, 0, 0])), FieldElem::ONE);
    }

    #[test]
    fn polar_form_is_alternating() {
        let t = t4();
        let f = t.field();
        for form in [QForm::standard_hyperbolic(), elliptic_example(f)] {
            for p in t.points() {
                assert!(form.polar(f, p.coords(), p.coords()).is_zero());
                for r in t.points().iter().step_by(7) {
                    let direct = linalg::dot(f, &linalg::vec_mat(f, p.coords(), &form.polar_matrix()), r.coords());
                    assert_eq!(form.polar(f, p.coords(), r.coords()), direct);
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        let t = t4();
        let f = t.field();
        let c = classify(&QForm::standard_hyperbolic(), &t);
        assert_eq!((c.kind, c.zero_count, c.polar_rank), (QuadricKind::Hyperbolic, 25, 4));
        let c = classify(&elliptic_example(f), &t);
        assert_eq!((c.kind, c.zero_count), (QuadricKind::Elliptic, 17));
        let x0x1 = QForm::from_codes(f, [0, 1, 0, 0, 0, 0, 0, 0, 0, 0]).unwrap();
        let c = classify(&x0x1, &t);
        assert_eq!((c.kind, c.polar_rank), (QuadricKind::Degenerate, 2));
    }

    #[test]
    fn line_census_q4() {
        let t = t4();
        let h = Quadric::new(&t, QForm::standard_hyperbolic());
        assert_eq!(h.line_census(), [10, 200, 75, 72]);
        let f = t.field();
        for l in (0..357).step_by(5) {
            assert_eq!(classify_line(f, h.form(), t.line(l)), h.classify_line(l));
        }
    }

    #[test]
    fn reguli_q4() {
        let t = t4();
        let h = Quadric::new(&t, QForm::standard_hyperbolic());
        let [a, b] = h.reguli().unwrap();
        assert_eq!((a.len(), b.len()), (5, 5));
        for class in [&a, &b] {
            let mut covered: Vec<u32> = class.iter().flat_map(|&l| t.line_points(l).to_vec()).collect();
            covered.sort_unstable();
            covered.dedup();
            assert_eq!(covered.len(), 25);
            for (i, &x) in class.iter().enumerate() {
                for &y in &class[i + 1..] {
                    assert!(!t.lines_meet(x, y));
                }
            }
        }
        for &x in &a {
            for &y in &b {
                assert!(t.lines_meet(x, y));
            }
        }
        let f = t.field();
        assert_eq!(Quadric::new(&t, elliptic_example(f)).reguli(), Err(Error::NotHyperbolic));
    }

    #[test]
    fn plane_sections_q4() {
        let t = t4();
        let h = Quadric::new(&t, QForm::standard_hyperbolic());
        let contained = h.lines_of_class(LineClass::Contained);
        let (mut conics, mut pairs) = (0, 0);
        for pl in 0..85 {
            match h.plane_section(pl).unwrap() {
                PlaneSection::Conic(p) => {
                    assert_eq!(p.len(), 5);
                    conics += 1;
                }
                PlaneSection::LinePair(p) => {
                    assert_eq!(p.len(), 9);
                    pairs += 1;
                    let in_plane: Vec<u32> =
                        contained.iter().copied().filter(|&l| t.line_in_plane(l, pl)).collect();
                    assert_eq!(in_plane.len(), 2);
                    assert!(t.lines_meet(in_plane[0], in_plane[1]));
                    let mut union: Vec<u32> =
                        in_plane.iter().flat_map(|&l| t.line_points(l).to_vec()).collect();
                    union.sort_unstable();
                    union.dedup();
                    assert_eq!(union, p);
                }
            }
        }
        assert_eq!((pairs, conics), (25, 60));
    }

    #[test]
    fn external_lines_q4() {
        let t = t4();
        let h = Quadric::new(&t, QForm::standard_hyperbolic());
        let ext = h.external_lines().unwrap();
        assert_eq!(ext.len(), 72);
        for pl in 0..85 {
            if let PlaneSection::Conic(_) = h.plane_section(pl).unwrap() {
                assert_eq!(t.plane_lines(pl).iter().filter(|&&l| ext.contains(l)).count(), 6);
            }
        }
        for p in 0..85 {
            let deg = t.point_lines(p).iter().filter(|&&l| ext.contains(l)).count();
            assert_eq!(deg, if h.contains_point(p) { 0 } else { 6 });
        }
    }

    #[test]
    fn q8_census() {
        let t = GeometryTables::build(8).unwrap();
        let h = Quadric::new(&t, QForm::standard_hyperbolic());
        assert_eq!(h.class().zero_count, 81);
        let [a, b] = h.reguli().unwrap();
        assert_eq!((a.len(), b.len()), (9, 9));
        assert_eq!(h.line_census(), [18, 2592, 567, 1568]);
        let mut sizes = [0usize; 2];
        for pl in 0..585 {
            match h.plane_section(pl).unwrap() {
                PlaneSection::LinePair(_) => sizes[0] += 1,
                PlaneSection::Conic(_) => sizes[1] += 1,
            }
        }
        assert_eq!(sizes, [81, 504]);
    }

    #[test]
    fn scan_trivial_predicates() {
        let t = t4();
        assert!(scan_forms(&t, |_, _| false).unwrap().is_empty());
        let t2 = GeometryTables::build(2).unwrap();
        // all 2^10 - 1 nonzero forms over GF(2) are their own scalar class
        assert_eq!(scan_forms(&t2, |_, _| true).unwrap().len(), 1023);
        let t8 = GeometryTables::build(8).unwrap();
        assert_eq!(scan_forms(&t8, |_, _| true), Err(Error::UnsupportedOrder(8)));
    }

    #[test]
    fn pullback_moves_zero_set() {
        let t = t4();
        let f = t.field();
        let m = [
            [1, 2, 0, 0].map(FieldElem::from_code),
            [0, 1, 3, 0].map(FieldElem::from_code),
            [2, 0, 1, 1].map(FieldElem::from_code),
            [0, 0, 2, 1].map(FieldElem::from_code),
        ];
        let h = QForm::standard_hyperbolic();
        let g = h.pullback(f, &m);
        for p in t.points() {
            let image = linalg::vec_mat(f, p.coords(), &m);
            assert_eq!(g.evaluate(f, p.coords()), h.evaluate(f, &image));
        }
        assert_eq!(classify(&g, &t).kind, QuadricKind::Hyperbolic);
    }

    /// |PGL₄(q)| = |GL₄(q)| / (q - 1).
    fn pgl4_order(q: u64) -> u64 {
        let q4 = q.pow(4);
        (0..4).map(|i| q4 - q.pow(i)).product::<u64>() / (q - 1)
    }

    #[test]
    fn scan_counts_match_orbit_stabilizer() {
        let t = t4();
        let pgl = pgl4_order(4);
        assert_eq!(pgl, 987_033_600);
        // |PGO+(4,4)| = 2 q^2 (q^2 - 1)^2, |PGO-(4,4)| = 2 q^2 (q^4 - 1)
        let (plus, minus) = (2 * 16 * 15 * 15, 2 * 16 * 255);
        let hyp = scan_forms(&t, |_, c| c.kind == QuadricKind::Hyperbolic).unwrap();
        assert_eq!(hyp.len() as u64, pgl / plus);
        assert_eq!(hyp.len(), 137_088);
        let ell = scan_forms(&t, |_, c| c.kind == QuadricKind::Elliptic).unwrap();
        assert_eq!(ell.len() as u64, pgl / minus);
        assert!(hyp.windows(2).all(|w| w[0] < w[1]));
    }
}
