//! Arithmetic in GF(2^k) for small k.
//!
//! Elements are bit-coded polynomials in `x`: bit `i` of the code is the
//! coefficient of `x^i`, so addition is XOR. Multiplication goes through a
//! table built once per field. The moduli are fixed so that `x` itself is a
//! primitive element:
//!
//! | k | modulus       |
//! |---|---------------|
//! | 1 | x + 1         |
//! | 2 | x² + x + 1    |
//! | 3 | x³ + x + 1    |
//! | 4 | x⁴ + x + 1    |

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Extension degree and reduction polynomial of a binary field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub k: u32,
    pub modulus: u32,
}

impl FieldSpec {
    /// The fixed modulus for GF(2^k).
    pub fn standard(k: u32) -> Result<Self> {
        let modulus = match k {
            1 => 0b11,
            2 => 0b111,
            3 => 0b1011,
            4 => 0b10011,
            _ => return Err(Error::UnsupportedDegree(k)),
        };
        Self::new(k, modulus)
    }

    /// Field for `q = 2^k`.
    pub fn for_order(q: u32) -> Result<Self> {
        match q {
            2 => Self::standard(1),
            4 => Self::standard(2),
            8 => Self::standard(3),
            16 => Self::standard(4),
            _ => Err(Error::UnsupportedOrder(q)),
        }
    }

    /// Checks degree and irreducibility by trial division.
    pub fn new(k: u32, modulus: u32) -> Result<Self> {
        if !(1..=4).contains(&k) {
            return Err(Error::UnsupportedDegree(k));
        }
        if poly_degree(modulus) != Some(k) || !is_irreducible(modulus) {
            return Err(Error::Reducible { k, modulus });
        }
        Ok(FieldSpec { k, modulus })
    }

    pub fn order(&self) -> u32 {
        1 << self.k
    }
}

fn poly_degree(p: u32) -> Option<u32> {
    (p != 0).then(|| 31 - p.leading_zeros())
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b).expect("nonzero divisor");
    while let Some(da) = poly_degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Irreducible over GF(2) iff no polynomial of degree in `1..deg` divides it.
fn is_irreducible(p: u32) -> bool {
    let Some(deg) = poly_degree(p) else {
        return false;
    };
    if deg == 0 {
        return false;
    }
    (2u32..(1 << deg)).all(|d| poly_rem(p, d) != 0)
}

/// An element of GF(2^k), stored as its code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElem(u8);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    /// Unchecked constructor; prefer [`Field::elem`] for untrusted codes.
    pub const fn from_code(code: u8) -> Self {
        FieldElem(code)
    }

    pub const fn code(self) -> u8 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Div,
}

/// GF(2^k) with precomputed multiplication and inverse tables.
#[derive(Clone)]
pub struct Field {
    spec: FieldSpec,
    size: usize,
    mul: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field").field("spec", &self.spec).finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Self {
        let size = spec.order() as usize;
        let mut mul = vec![0u8; size * size];
        for a in 0..size {
            for b in 0..size {
                mul[a * size + b] = slow_mul(a as u32, b as u32, spec) as u8;
            }
        }
        let mut inv = vec![0u8; size];
        for a in 1..size {
            inv[a] = (1..size).find(|&b| mul[a * size + b] == 1).expect("field inverse") as u8;
        }
        Field { spec, size, mul, inv }
    }

    /// GF(q) with the standard modulus.
    pub fn with_order(q: u32) -> Result<Self> {
        Ok(Self::new(FieldSpec::for_order(q)?))
    }

    pub fn gf4() -> Self {
        Self::new(FieldSpec::standard(2).unwrap())
    }

    pub fn gf16() -> Self {
        Self::new(FieldSpec::standard(4).unwrap())
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn order(&self) -> u32 {
        self.size as u32
    }

    pub fn elem(&self, code: u32) -> Result<FieldElem> {
        if (code as usize) < self.size {
            Ok(FieldElem(code as u8))
        } else {
            Err(Error::InvalidElement { code, size: self.size as u32 })
        }
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (0..self.size as u8).map(FieldElem)
    }

    /// The class of `x`, a primitive element for the standard moduli.
    pub fn generator(&self) -> FieldElem {
        if self.size == 2 {
            FieldElem::ONE
        } else {
            FieldElem(2)
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(a.0 ^ b.0)
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.mul[a.0 as usize * self.size + b.0 as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(FieldElem(self.inv[a.0 as usize]))
        }
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn arith(&self, a: FieldElem, b: FieldElem, op: ArithOp) -> Result<FieldElem> {
        match op {
            ArithOp::Add => Ok(self.add(a, b)),
            ArithOp::Mul => Ok(self.mul(a, b)),
            ArithOp::Div => self.div(a, b),
        }
    }

    pub fn pow(&self, a: FieldElem, mut e: u32) -> FieldElem {
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: FieldElem) -> Result<u32> {
        if a.is_zero() {
            return Err(Error::ZeroHasNoOrder);
        }
        let mut x = a;
        let mut n = 1;
        while x != FieldElem::ONE {
            x = self.mul(x, a);
            n += 1;
        }
        Ok(n)
    }

    #[inline]
    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    /// Square root; squaring is a bijection in characteristic 2.
    pub fn sqrt(&self, a: FieldElem) -> FieldElem {
        self.pow(a, (self.size / 2) as u32)
    }
}

fn slow_mul(mut a: u32, mut b: u32, spec: FieldSpec) -> u32 {
    let mut acc = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << spec.k) != 0 {
            a ^= spec.modulus;
        }
    }
    acc
}

/// The embedding GF(4) → GF(16) sending ω to ζ⁵.
pub fn embed_gf4_gf16(a: FieldElem) -> Result<FieldElem> {
    // ζ⁵ = y² + y for the modulus y⁴ + y + 1
    const ZETA5: u8 = 0b0110;
    match a.code() {
        0 | 1 => Ok(a),
        2 => Ok(FieldElem(ZETA5)),
        3 => Ok(FieldElem(ZETA5 ^ 1)),
        c => Err(Error::InvalidElement { code: c as u32, size: 4 }),
    }
}
