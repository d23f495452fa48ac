//! JSON interchange for line sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::lineset::LineSet;
use crate::projgeom::GeometryTables;

/// A line set as stored on disk. `encodings` holds the reduced row echelon
/// rows of each line as field element codes, so a file stays meaningful if
/// the line numbering ever changes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSetFile {
    pub q: u32,
    pub modulus: u32,
    pub table_hash: String,
    pub name: String,
    pub size: usize,
    pub lines: Vec<u32>,
    #[serde(default)]
    pub encodings: Vec<[[u8; 4]; 2]>,
}

impl LineSetFile {
    pub fn new(t: &GeometryTables, name: &str, set: &LineSet) -> Self {
        let encodings = set
            .iter()
            .map(|l| t.line(l).rows().map(|row| row.map(|x| x.code())))
            .collect();
        LineSetFile {
            q: t.q(),
            modulus: t.field().spec().modulus,
            table_hash: t.table_hash(),
            name: name.to_string(),
            size: set.len(),
            lines: set.lines().to_vec(),
            encodings,
        }
    }

    /// Rebuilds the set against `t`. Encodings take precedence over indices
    /// when present; both must agree.
    pub fn to_line_set(&self, t: &GeometryTables) -> Result<LineSet> {
        if self.q != t.q() || self.modulus != t.field().spec().modulus {
            return Err(Error::Invalid(format!(
                "file is for q = {} (modulus {:#b}), tables are for q = {}",
                self.q,
                self.modulus,
                t.q()
            )));
        }
        let lines = if self.encodings.is_empty() {
            if self.table_hash != t.table_hash() {
                return Err(Error::Invalid(format!(
                    "table hash {} differs from {} and the file has no encodings",
                    self.table_hash,
                    t.table_hash()
                )));
            }
            self.lines.clone()
        } else {
            if self.encodings.len() != self.lines.len() {
                return Err(Error::Invalid(format!(
                    "{} encodings for {} lines",
                    self.encodings.len(),
                    self.lines.len()
                )));
            }
            let mut out = Vec::with_capacity(self.encodings.len());
            for (enc, &idx) in self.encodings.iter().zip(&self.lines) {
                let f = t.field();
                let row = |r: [u8; 4]| -> Result<[FieldElem; 4]> {
                    let mut v = [FieldElem::ZERO; 4];
                    for (x, c) in v.iter_mut().zip(r) {
                        *x = f.elem(c as u32)?;
                    }
                    Ok(v)
                };
                let l = t.line_id_of_rows(row(enc[0])?, row(enc[1])?)?;
                if l != idx {
                    return Err(Error::Invalid(format!("encoding of line {idx} names line {l}")));
                }
                out.push(l);
            }
            out
        };
        let set = LineSet::new_distinct(t, lines)?;
        if set.len() != self.size {
            return Err(Error::Invalid(format!("size field {} but {} lines", self.size, set.len())));
        }
        Ok(set)
    }
}
