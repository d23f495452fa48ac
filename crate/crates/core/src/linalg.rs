//! Dense linear algebra on 4-dimensional row vectors over a [`Field`].

use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};

pub type Vec4 = [FieldElem; 4];
pub type Mat4 = [Vec4; 4];

pub const ZERO4: Vec4 = [FieldElem::ZERO; 4];

pub fn identity4() -> Mat4 {
    let mut m = [ZERO4; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = FieldElem::ONE;
    }
    m
}

pub fn dot(f: &Field, a: &Vec4, b: &Vec4) -> FieldElem {
    a.iter().zip(b).fold(FieldElem::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

pub fn scale(f: &Field, s: FieldElem, v: &Vec4) -> Vec4 {
    v.map(|x| f.mul(s, x))
}

pub fn add(f: &Field, a: &Vec4, b: &Vec4) -> Vec4 {
    [f.add(a[0], b[0]), f.add(a[1], b[1]), f.add(a[2], b[2]), f.add(a[3], b[3])]
}

/// Scales so the first nonzero coordinate is 1; `None` for the zero vector.
pub fn normalize(f: &Field, v: &Vec4) -> Option<Vec4> {
    let lead = v.iter().copied().find(|x| !x.is_zero())?;
    let s = f.inv(lead).ok()?;
    Some(scale(f, s, v))
}

/// Row vector times matrix.
pub fn vec_mat(f: &Field, v: &Vec4, m: &Mat4) -> Vec4 {
    let mut out = ZERO4;
    for (i, &vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for j in 0..4 {
            out[j] = f.add(out[j], f.mul(vi, m[i][j]));
        }
    }
    out
}

pub fn mat_mul(f: &Field, a: &Mat4, b: &Mat4) -> Mat4 {
    [vec_mat(f, &a[0], b), vec_mat(f, &a[1], b), vec_mat(f, &a[2], b), vec_mat(f, &a[3], b)]
}

pub fn transpose(m: &Mat4) -> Mat4 {
    let mut t = [ZERO4; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[j][i] = m[i][j];
        }
    }
    t
}

/// Reduced row-echelon form in place; returns the rank. Nonzero rows come
/// first, zero rows are left at the end.
pub fn rref(f: &Field, rows: &mut [Vec4]) -> usize {
    let mut rank = 0;
    for col in 0..4 {
        if rank == rows.len() {
            break;
        }
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let s = f.inv(rows[rank][col]).expect("nonzero pivot");
        rows[rank] = scale(f, s, &rows[rank]);
        let pivot_row = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let c = row[col];
                *row = add(f, row, &scale(f, c, &pivot_row));
            }
        }
        rank += 1;
    }
    rank
}

pub fn rank(f: &Field, rows: &[Vec4]) -> usize {
    let mut tmp = rows.to_vec();
    rref(f, &mut tmp)
}

/// Basis (in RREF) of the annihilator `{x : r·x = 0 for every row r}`.
pub fn annihilator(f: &Field, rows: &[Vec4]) -> Vec<Vec4> {
    let mut m = rows.to_vec();
    let r = rref(f, &mut m);
    m.truncate(r);
    let pivots: Vec<usize> = m
        .iter()
        .map(|row| row.iter().position(|x| !x.is_zero()).unwrap())
        .collect();
    let mut basis: Vec<Vec4> = (0..4)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = ZERO4;
            v[free] = FieldElem::ONE;
            // characteristic 2: x_pivot = sum of row entries at free columns
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = row[free];
            }
            v
        })
        .collect();
    rref(f, &mut basis);
    basis
}

pub fn inverse(f: &Field, m: &Mat4) -> Result<Mat4> {
    let mut a = *m;
    let mut inv = identity4();
    for col in 0..4 {
        let piv = (col..4).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let s = f.inv(a[col][col])?;
        a[col] = scale(f, s, &a[col]);
        inv[col] = scale(f, s, &inv[col]);
        for r in 0..4 {
            if r != col && !a[r][col].is_zero() {
                let c = a[r][col];
                a[r] = add(f, &a[r], &scale(f, c, &a[col]));
                inv[r] = add(f, &inv[r], &scale(f, c, &inv[col]));
            }
        }
    }
    Ok(inv)
}
