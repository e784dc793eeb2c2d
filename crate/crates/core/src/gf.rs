//! Finite field arithmetic for GF(p) with p prime and GF(2^m) with m <= 16.
//!
//! Elements use a canonical integer encoding: residues for prime fields,
//! polynomial bit patterns for binary extension fields (bit i = coefficient
//! of x^i). All arithmetic is exact; there are no floating point paths.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u32),
    #[error("extension fields are only supported for characteristic 2, got p={p}, m={m}")]
    UnsupportedExtension { p: u32, m: u32 },
    #[error("extension degree {0} out of range (1..=16)")]
    DegreeTooLarge(u32),
    #[error("characteristic {0} out of range (must be < 2^16)")]
    CharacteristicTooLarge(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("value {value} is not a canonical element of a field of order {q}")]
    InvalidElement { value: u64, q: u32 },
    #[error("polynomial {0:#x} is not irreducible of the requested degree")]
    ReduciblePolynomial(u32),
    #[error("cannot parse field spec {0:?}")]
    BadFieldSpec(String),
    #[error("operands belong to different fields")]
    FieldMismatch,
}

/// A field element in canonical integer encoding. The value is always < q
/// for the field it was produced by; elements carry no field pointer, so
/// containers (vectors, matrices) are responsible for field agreement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn val(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Crate-internal constructor for values already known to be canonical
    /// (e.g. produced by reduction modulo q). Public code goes through
    /// `Field::elem`, which validates the range.
    pub(crate) fn from_raw(v: u32) -> Fe {
        Fe(v)
    }
}

impl std::fmt::Display for Fe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Field descriptor. Cheap to copy and compare; two `Field` values describe
/// the same field iff they are equal (reduction polynomial included).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    p: u32,
    m: u32,
    q: u32,
    /// Reduction polynomial bit pattern for m > 1 (bit m is always set); 0 for m = 1.
    poly: u32,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

/// Remainder of binary polynomial division.
fn poly_mod(mut a: u64, b: u32) -> u64 {
    let db = poly_degree(b);
    debug_assert!(b != 0);
    loop {
        let da = if a == 0 { -1 } else { 63 - a.leading_zeros() as i32 };
        if da < db {
            return a;
        }
        a ^= (b as u64) << (da - db);
    }
}

/// True iff `poly` is irreducible over GF(2) of exact degree `m`.
/// Trial division by every polynomial of degree 1..=m/2 is exact at these sizes.
fn is_irreducible(poly: u32, m: u32) -> bool {
    if poly_degree(poly) != m as i32 {
        return false;
    }
    if m == 1 {
        return true;
    }
    for d in 2u32..(1u32 << (m / 2 + 1)) {
        if poly_degree(d) >= 1 && poly_mod(poly as u64, d) == 0 {
            return false;
        }
    }
    true
}

/// Lexicographically smallest irreducible bit pattern of degree m.
fn default_poly(m: u32) -> u32 {
    debug_assert!((2..=16).contains(&m));
    for low in 1..(1u32 << m) {
        let cand = (1u32 << m) | low;
        if is_irreducible(cand, m) {
            return cand;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists");
}

impl Field {
    /// GF(p^m). Prime fields take m = 1; extensions are binary only (p = 2, m <= 16),
    /// with the lexicographically smallest irreducible reduction polynomial.
    pub fn new(p: u32, m: u32) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NonPrimeCharacteristic(p));
        }
        if p >= 1 << 16 {
            return Err(FieldError::CharacteristicTooLarge(p));
        }
        if m == 0 || m > 16 {
            return Err(FieldError::DegreeTooLarge(m));
        }
        if m == 1 {
            return Ok(Field { p, m, q: p, poly: 0 });
        }
        if p != 2 {
            return Err(FieldError::UnsupportedExtension { p, m });
        }
        Ok(Field { p, m, q: 1 << m, poly: default_poly(m) })
    }

    /// GF(2^m) with an explicit reduction polynomial (bit pattern, degree m).
    pub fn binary_with_poly(m: u32, poly: u32) -> Result<Field, FieldError> {
        if m < 2 || m > 16 {
            return Err(FieldError::DegreeTooLarge(m));
        }
        if !is_irreducible(poly, m) {
            return Err(FieldError::ReduciblePolynomial(poly));
        }
        Ok(Field { p: 2, m, q: 1 << m, poly })
    }

    /// Parse a field spec string: "gf(q)" with q a prime or a power of two,
    /// or "gf(2^m)" / "gf(2^m,poly=0x..)" for explicit binary extensions.
    pub fn parse_spec(s: &str) -> Result<Field, FieldError> {
        let bad = || FieldError::BadFieldSpec(s.to_string());
        let t = s.trim().to_ascii_lowercase();
        let inner = t
            .strip_prefix("gf(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (head, poly_part) = match inner.split_once(',') {
            Some((h, rest)) => (h.trim(), Some(rest.trim())),
            None => (inner.trim(), None),
        };
        let (p, m) = if let Some((base, exp)) = head.split_once('^') {
            let p: u32 = base.trim().parse().map_err(|_| bad())?;
            let m: u32 = exp.trim().parse().map_err(|_| bad())?;
            (p, m)
        } else {
            let q: u64 = head.parse().map_err(|_| bad())?;
            if q == 0 || q > u32::MAX as u64 {
                return Err(bad());
            }
            let q = q as u32;
            if q.is_power_of_two() {
                (2, q.trailing_zeros())
            } else {
                (q, 1)
            }
        };
        match poly_part {
            None => Field::new(p, m),
            Some(pp) => {
                let hex = pp
                    .strip_prefix("poly=0x")
                    .or_else(|| pp.strip_prefix("poly=0X"))
                    .ok_or_else(bad)?;
                let poly = u32::from_str_radix(hex, 16).map_err(|_| bad())?;
                if p != 2 {
                    return Err(FieldError::UnsupportedExtension { p, m });
                }
                Field::binary_with_poly(m, poly)
            }
        }
    }

    /// Canonical spec string; round-trips through `parse_spec`.
    /// Default-polynomial fields print as "gf(q)".
    pub fn spec_string(&self) -> String {
        if self.m == 1 || self.poly == default_poly(self.m) {
            format!("gf({})", self.q)
        } else {
            format!("gf(2^{},poly={:#x})", self.m, self.poly)
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn reduction_poly(&self) -> u32 {
        self.poly
    }

    pub fn zero(&self) -> Fe {
        Fe(0)
    }

    pub fn one(&self) -> Fe {
        Fe(1)
    }

    /// Canonical element from an integer; rejects values >= q.
    pub fn elem(&self, v: u64) -> Result<Fe, FieldError> {
        if v < self.q as u64 {
            Ok(Fe(v as u32))
        } else {
            Err(FieldError::InvalidElement { value: v, q: self.q })
        }
    }

    /// All q elements in canonical order (0, 1, 2, ...).
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(Fe)
    }

    /// The q-1 nonzero elements in canonical order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fe> {
        (1..self.q).map(Fe)
    }

    fn is_binary_ext(&self) -> bool {
        self.m > 1
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        debug_assert!(a.0 < self.q && b.0 < self.q);
        if self.p == 2 {
            Fe(a.0 ^ b.0)
        } else {
            Fe((a.0 + b.0) % self.p)
        }
    }

    pub fn neg(&self, a: Fe) -> Fe {
        debug_assert!(a.0 < self.q);
        if self.p == 2 {
            a
        } else {
            Fe((self.p - a.0) % self.p)
        }
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        debug_assert!(a.0 < self.q && b.0 < self.q);
        if self.is_binary_ext() {
            // Carryless schoolbook product, then reduce; degrees stay < 32.
            let mut prod: u64 = 0;
            let mut x = a.0 as u64;
            let mut y = b.0;
            while y != 0 {
                if y & 1 == 1 {
                    prod ^= x;
                }
                x <<= 1;
                y >>= 1;
            }
            Fe(poly_mod(prod, self.poly) as u32)
        } else {
            Fe(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32)
        }
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fe) -> Result<Fe, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        // The multiplicative group has order q-1, so a^(q-2) inverts a.
        Ok(self.pow(a, (self.q - 2) as u64))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.spec_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf2_addition_is_xor() {
        let f = Field::new(2, 1).unwrap();
        assert_eq!(f.add(Fe::ONE, Fe::ONE), Fe::ZERO);
        assert_eq!(f.add(Fe::ZERO, Fe::ONE), Fe::ONE);
    }

    #[test]
    fn gf5_inverse_of_two_is_three() {
        let f = Field::new(5, 1).unwrap();
        assert_eq!(f.inv(f.elem(2).unwrap()).unwrap(), f.elem(3).unwrap());
    }

    #[test]
    fn zero_has_no_inverse() {
        let f = Field::new(7, 1).unwrap();
        assert_eq!(f.inv(Fe::ZERO), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn gf8_every_nonzero_element_inverts() {
        let f = Field::new(2, 3).unwrap();
        for a in f.nonzero_elements() {
            let b = f.inv(a).unwrap();
            assert_eq!(f.mul(a, b), Fe::ONE, "a={a}");
        }
    }

    #[test]
    fn gf8_default_poly_is_x3_x_1() {
        // x^3+1 and x^3+x factor; x^3+x+1 (0b1011) is the smallest irreducible.
        let f = Field::new(2, 3).unwrap();
        assert_eq!(f.reduction_poly(), 0b1011);
        assert!(is_irreducible(0b1011, 3));
        assert!(!is_irreducible(0b1001, 3));
        assert!(!is_irreducible(0b1010, 3));
    }

    #[test]
    fn gf16_default_poly_is_x4_x_1() {
        let f = Field::new(2, 4).unwrap();
        assert_eq!(f.reduction_poly(), 0x13);
    }

    #[test]
    fn non_prime_characteristic_rejected() {
        assert_eq!(Field::new(4, 1), Err(FieldError::NonPrimeCharacteristic(4)));
        assert_eq!(Field::new(1, 1), Err(FieldError::NonPrimeCharacteristic(1)));
        assert_eq!(
            Field::new(3, 2),
            Err(FieldError::UnsupportedExtension { p: 3, m: 2 })
        );
    }

    #[test]
    fn element_range_enforced() {
        let f = Field::new(5, 1).unwrap();
        assert!(f.elem(4).is_ok());
        assert_eq!(f.elem(5), Err(FieldError::InvalidElement { value: 5, q: 5 }));
    }

    fn axioms_exhaustive(f: &Field) {
        let els: Vec<Fe> = f.elements().collect();
        assert_eq!(els.len(), f.q() as usize);
        for &a in &els {
            assert_eq!(f.add(a, Fe::ZERO), a);
            assert_eq!(f.mul(a, Fe::ONE), a);
            assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
            for &b in &els {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in &els {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn field_axioms_hold_exhaustively_on_small_fields() {
        for (p, m) in [(2, 1), (3, 1), (5, 1), (7, 1), (11, 1), (2, 2), (2, 3), (2, 4)] {
            axioms_exhaustive(&Field::new(p, m).unwrap());
        }
    }

    #[test]
    fn multiplicative_group_has_order_q_minus_one() {
        for (p, m) in [(2, 1), (3, 1), (5, 1), (13, 1), (251, 1), (2, 4), (2, 8)] {
            let f = Field::new(p, m).unwrap();
            for a in f.nonzero_elements() {
                assert_eq!(f.pow(a, (f.q() - 1) as u64), Fe::ONE);
            }
        }
    }

    #[test]
    fn large_binary_field_arithmetic_is_consistent() {
        // Spot-check GF(2^16): inverses and distributivity on a fixed sample.
        let f = Field::new(2, 16).unwrap();
        let sample: Vec<Fe> = (1u32..200).map(|v| f.elem(v as u64 * 317 % 65536).unwrap()).collect();
        for &a in &sample {
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
            }
            for &b in &sample {
                let lhs = f.mul(a, f.add(b, Fe::ONE));
                let rhs = f.add(f.mul(a, b), a);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["gf(2)", "gf(3)", "gf(5)", "gf(8)", "gf(16)", "gf(65521)"] {
            let f = Field::parse_spec(s).unwrap();
            assert_eq!(f.spec_string(), s);
            assert_eq!(Field::parse_spec(&f.spec_string()).unwrap(), f);
        }
        let f = Field::parse_spec("gf(2^4,poly=0x19)").unwrap();
        assert_eq!(f.reduction_poly(), 0x19);
        assert_eq!(Field::parse_spec(&f.spec_string()).unwrap(), f);
        let g = Field::parse_spec("gf(2^4)").unwrap();
        assert_eq!(g, Field::new(2, 4).unwrap());
    }

    #[test]
    fn bad_specs_rejected() {
        for s in ["gf(6)", "gf(9)", "gf(0)", "gf()", "field(2)", "gf(2", "gf(2^3,poly=0x9)"] {
            assert!(Field::parse_spec(s).is_err(), "{s}");
        }
        // 0x9 = x^3+1 is reducible, hence the rejection above checks irreducibility too.
        assert_eq!(
            Field::binary_with_poly(3, 0b1001),
            Err(FieldError::ReduciblePolynomial(0b1001))
        );
    }

    #[test]
    fn explicit_poly_changes_multiplication_but_not_axioms() {
        // Two distinct degree-4 irreducibles give different products.
        let a = Field::binary_with_poly(4, 0x13).unwrap();
        let b = Field::binary_with_poly(4, 0x19).unwrap();
        axioms_exhaustive(&a);
        axioms_exhaustive(&b);
        let x = Fe(0b1000);
        assert_ne!(a.mul(x, Fe(0b0010)), b.mul(x, Fe(0b0010)));
        assert_ne!(a, b);
    }
}
