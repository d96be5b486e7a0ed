//! Arithmetic in GF(2^m), 1 <= m <= 16.
//!
//! Elements are residue polynomials over GF(2) stored as bit masks; a
//! [`FieldCtx`] fixes the extension degree and the irreducible modulus.
//! Elements themselves carry no context: every operation takes the
//! context as a parameter, and file headers carry it for serialized data.

use std::fmt;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 16;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("extension degree {0} out of range 1..=16")]
    DegreeOutOfRange(u32),
    #[error("modulus {0} is reducible over GF(2)")]
    ReducibleModulus(Poly2),
    #[error("modulus {modulus} has degree {found}, context needs degree {m}")]
    ModulusDegreeMismatch { modulus: Poly2, found: u32, m: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("{d} does not divide the multiplicative group order {group}")]
    OrderNotDividing { d: u32, group: u32 },
    #[error("malformed field header `{0}`, expected `field m=<int> mod=<hex>`")]
    BadHeader(String),
    #[error("element literal `{literal}` out of range for GF(2^{m})")]
    ElementOutOfRange { literal: String, m: u32 },
    #[error("bad element literal `{0}`")]
    BadElement(String),
}

/// A polynomial over GF(2) stored as a coefficient bit mask (bit i is the
/// coefficient of x^i). Supports degrees up to 31; contexts only use
/// degrees up to [`MAX_DEGREE`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly2(u32);

impl Poly2 {
    pub const ZERO: Poly2 = Poly2(0);
    pub const ONE: Poly2 = Poly2(1);
    pub const X: Poly2 = Poly2(2);

    pub fn from_mask(mask: u32) -> Poly2 {
        Poly2(mask)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            Some(31 - self.0.leading_zeros())
        }
    }

    pub fn coeff(self, i: u32) -> bool {
        i < 32 && self.0 >> i & 1 == 1
    }

    /// Carry-less product; panics if the result would overflow 32 bits.
    pub fn mul(self, other: Poly2) -> Poly2 {
        let mut acc = 0u64;
        let a = self.0 as u64;
        for i in 0..32 {
            if other.0 >> i & 1 == 1 {
                acc ^= a << i;
            }
        }
        assert!(acc <= u32::MAX as u64, "polynomial product overflows mask");
        Poly2(acc as u32)
    }

    /// Remainder of long division by `divisor`.
    pub fn rem(self, divisor: Poly2) -> Poly2 {
        let dd = divisor.degree().expect("division by zero polynomial");
        let mut r = self.0;
        while let Some(rd) = Poly2(r).degree() {
            if rd < dd {
                break;
            }
            r ^= divisor.0 << (rd - dd);
        }
        Poly2(r)
    }

    /// True iff the polynomial has no nontrivial factorization over GF(2).
    ///
    /// Trial division by every polynomial of degree up to deg/2; at the
    /// degrees this crate supports (<= 16) that is at most 511 divisions.
    pub fn is_irreducible(self) -> bool {
        let d = match self.degree() {
            Some(d) => d,
            None => return false,
        };
        if d == 0 {
            return false;
        }
        for fd in 1..=d / 2 {
            for mask in (1u32 << fd)..(1u32 << (fd + 1)) {
                if self.rem(Poly2(mask)).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..32).rev() {
            if self.coeff(i) {
                if !first {
                    write!(f, " + ")?;
                }
                match i {
                    0 => write!(f, "1")?,
                    1 => write!(f, "x")?,
                    _ => write!(f, "x^{i}")?,
                }
                first = false;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly2({:#x} = {})", self.0, self)
    }
}

/// An element of GF(2^m): the coefficient mask of its residue polynomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElem(u16);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Lowercase-hex literal used in all file formats.
    pub fn to_hex(self) -> String {
        format!("{:x}", self.0)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

/// The field GF(2^m) with a fixed irreducible modulus.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FieldCtx {
    m: u32,
    modulus: u32,
}

impl FieldCtx {
    /// Context with an explicit modulus.
    pub fn with_modulus(m: u32, modulus: Poly2) -> Result<FieldCtx, FieldError> {
        if m == 0 || m > MAX_DEGREE {
            return Err(FieldError::DegreeOutOfRange(m));
        }
        match modulus.degree() {
            Some(d) if d == m => {}
            d => {
                return Err(FieldError::ModulusDegreeMismatch {
                    modulus,
                    found: d.unwrap_or(0),
                    m,
                })
            }
        }
        if !modulus.is_irreducible() {
            return Err(FieldError::ReducibleModulus(modulus));
        }
        Ok(FieldCtx {
            m,
            modulus: modulus.mask(),
        })
    }

    /// Context with the default modulus: the lexicographically smallest
    /// (smallest bit mask) irreducible polynomial of degree m.
    pub fn new(m: u32) -> Result<FieldCtx, FieldError> {
        if m == 0 || m > MAX_DEGREE {
            return Err(FieldError::DegreeOutOfRange(m));
        }
        Ok(FieldCtx {
            m,
            modulus: default_modulus(m).mask(),
        })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> Poly2 {
        Poly2(self.modulus)
    }

    /// Field order q = 2^m.
    pub fn order(&self) -> u32 {
        1 << self.m
    }

    /// Element from a raw bit mask; panics when out of range.
    pub fn elem(&self, bits: u16) -> FieldElem {
        assert!(
            (bits as u32) < self.order(),
            "element mask {bits:#x} out of range for GF(2^{})",
            self.m
        );
        FieldElem(bits)
    }

    pub fn contains(&self, a: FieldElem) -> bool {
        (a.0 as u32) < self.order()
    }

    /// All q elements in mask order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.order() as u16).map(FieldElem)
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(a.0 ^ b.0)
    }

    /// Shift-and-reduce carry-less multiplication.
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let mut acc = 0u32;
        let mut aa = a.0 as u32;
        let mut bb = b.0 as u32;
        while bb != 0 {
            if bb & 1 == 1 {
                acc ^= aa;
            }
            bb >>= 1;
            aa <<= 1;
            if aa >> self.m & 1 == 1 {
                aa ^= self.modulus;
            }
        }
        FieldElem(acc as u16)
    }

    pub fn square(&self, a: FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: FieldElem, mut e: u64) -> FieldElem {
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

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(a, self.order() as u64 - 2))
    }

    /// Absolute trace a + a^2 + a^4 + ... + a^(2^(m-1)), always 0 or 1.
    pub fn trace(&self, a: FieldElem) -> u8 {
        let mut acc = FieldElem::ZERO;
        let mut t = a;
        for _ in 0..self.m {
            acc = self.add(acc, t);
            t = self.mul(t, t);
        }
        debug_assert!(acc.0 <= 1);
        acc.0 as u8
    }

    /// Evaluate a GF(2)-coefficient polynomial at a field element.
    pub fn eval(&self, p: Poly2, x: FieldElem) -> FieldElem {
        let deg = match p.degree() {
            Some(d) => d,
            None => return FieldElem::ZERO,
        };
        let mut acc = FieldElem::ZERO;
        for i in (0..=deg).rev() {
            acc = self.mul(acc, x);
            if p.coeff(i) {
                acc = self.add(acc, FieldElem::ONE);
            }
        }
        acc
    }

    /// All roots of `p` in this field, by exhaustive evaluation.
    pub fn roots(&self, p: Poly2) -> Vec<FieldElem> {
        self.elements()
            .filter(|&x| self.eval(p, x).is_zero())
            .collect()
    }

    /// Minimal polynomial of `a` over GF(2): the product of (x + c) over
    /// the distinct Frobenius conjugates c of a.
    pub fn min_poly(&self, a: FieldElem) -> Poly2 {
        let mut conjugates = vec![a];
        let mut t = self.mul(a, a);
        while t != a {
            conjugates.push(t);
            t = self.mul(t, t);
        }
        // product over GF(2^m)[x]; the result is Frobenius-invariant, so
        // every coefficient lands in the prime field
        let mut coeffs: Vec<FieldElem> = vec![FieldElem::ONE];
        for &c in &conjugates {
            let mut next = vec![FieldElem::ZERO; coeffs.len() + 1];
            for (i, &co) in coeffs.iter().enumerate() {
                next[i + 1] = self.add(next[i + 1], co);
                next[i] = self.add(next[i], self.mul(c, co));
            }
            coeffs = next;
        }
        let mut mask = 0u32;
        for (i, &co) in coeffs.iter().enumerate() {
            assert!(co.0 <= 1, "minimal polynomial coefficient outside GF(2)");
            if co == FieldElem::ONE {
                mask |= 1 << i;
            }
        }
        Poly2(mask)
    }

    /// The unique multiplicative subgroup of order d, i.e. {x : x^d = 1}.
    pub fn mult_subgroup(&self, d: u32) -> Result<Vec<FieldElem>, FieldError> {
        let group = self.order() - 1;
        if d == 0 || group % d != 0 {
            return Err(FieldError::OrderNotDividing { d, group });
        }
        let sub: Vec<FieldElem> = self
            .elements()
            .filter(|&x| !x.is_zero() && self.pow(x, d as u64) == FieldElem::ONE)
            .collect();
        debug_assert_eq!(
            sub.len(),
            d as usize,
            "cyclic group has one subgroup per order"
        );
        Ok(sub)
    }

    /// Header line carried by every geometry file: `field m=<int> mod=<hex>`.
    pub fn header_line(&self) -> String {
        format!("field m={} mod={:x}", self.m, self.modulus)
    }

    pub fn parse_header(line: &str) -> Result<FieldCtx, FieldError> {
        let bad = || FieldError::BadHeader(line.to_string());
        let rest = line.trim().strip_prefix("field ").ok_or_else(bad)?;
        let mut m = None;
        let mut modulus = None;
        for tok in rest.split_whitespace() {
            if let Some(v) = tok.strip_prefix("m=") {
                m = Some(v.parse::<u32>().map_err(|_| bad())?);
            } else if let Some(v) = tok.strip_prefix("mod=") {
                modulus = Some(u32::from_str_radix(v, 16).map_err(|_| bad())?);
            } else {
                return Err(bad());
            }
        }
        match (m, modulus) {
            (Some(m), Some(mask)) => FieldCtx::with_modulus(m, Poly2(mask)),
            _ => Err(bad()),
        }
    }

    /// Parse a lowercase-hex element literal, range-checked.
    pub fn parse_elem(&self, literal: &str) -> Result<FieldElem, FieldError> {
        let bits = u32::from_str_radix(literal, 16)
            .map_err(|_| FieldError::BadElement(literal.to_string()))?;
        if bits >= self.order() {
            return Err(FieldError::ElementOutOfRange {
                literal: literal.to_string(),
                m: self.m,
            });
        }
        Ok(FieldElem(bits as u16))
    }
}

/// Lexicographically smallest irreducible polynomial of degree m.
fn default_modulus(m: u32) -> Poly2 {
    let lo = 1u32 << m;
    for mask in lo..lo << 1 {
        if mask & 1 == 0 {
            continue;
        }
        let p = Poly2(mask);
        if p.is_irreducible() {
            return p;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
