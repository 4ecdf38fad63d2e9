//! Arithmetic in the binary field `k = GF(2^n)`, polynomial basis.
//!
//! Elements are bitmasks: bit `i` is the coefficient of `x^i` in the residue
//! polynomial. A [`Field`] carries the modulus, `q = 2^n`, the fixed
//! trace-one element `r0`, and (for `n <= 16`) log/antilog tables that speed
//! up the dense point-counting scans.
//!
//! Besides the ring operations this module owns the Artin-Schreier
//! machinery: the absolute trace, membership in `AS(k) = {x + x^2}` and
//! solving `x^2 + x = c`.

use std::fmt;
use std::ops::{Add, AddAssign};

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported extension degree; O(q) scans stay tractable up to here.
pub const MAX_DEGREE: u32 = 30;

/// Fields up to this degree get log/antilog tables.
const TABLE_MAX_DEGREE: u32 = 16;

/// An element of `GF(2^n)` as a coefficient bitmask.
///
/// The type does not know its field; use [`Field::element`] to build one
/// with a degree check.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fe(u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    /// Wraps a raw bitmask without checking it against any field.
    pub const fn from_bits(bits: u32) -> Fe {
        Fe(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Lowercase hex of the bitmask, no prefix.
    pub fn to_hex(self) -> String {
        format!("{:x}", self.0)
    }

    /// Parses lowercase or uppercase hex, with or without a `0x` prefix.
    pub fn parse_hex(s: &str) -> Result<Fe> {
        let t = s.trim();
        let t = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .unwrap_or(t);
        if t.is_empty() {
            return Err(Error::Parse(format!("empty hex field element {s:?}")));
        }
        u32::from_str_radix(t, 16)
            .map(Fe)
            .map_err(|_| Error::Parse(format!("invalid hex field element {s:?}")))
    }
}

impl Add for Fe {
    type Output = Fe;

    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Fe) -> Fe {
        Fe(self.0 ^ rhs.0)
    }
}

impl AddAssign for Fe {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: Fe) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe(0x{:x})", self.0)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

impl Serialize for Fe {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Fe {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Fe, D::Error> {
        let s = String::deserialize(d)?;
        Fe::parse_hex(&s).map_err(serde::de::Error::custom)
    }
}

fn degree(p: u64) -> u32 {
    debug_assert!(p != 0);
    63 - p.leading_zeros()
}

/// Remainder of `a` modulo `b` in `F_2[x]`.
fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = degree(b);
    while a != 0 && degree(a) >= db {
        a ^= b << (degree(a) - db);
    }
    a
}

/// Smallest nontrivial factor of `p` found by trial division over all
/// polynomials of degree at most `deg(p) / 2`, or `None` if `p` is
/// irreducible.
pub fn trial_division_factor(p: u64) -> Option<u64> {
    let n = degree(p);
    for d in 1..=n / 2 {
        for f in (1u64 << d)..(1u64 << (d + 1)) {
            if poly_rem(p, f) == 0 {
                return Some(f);
            }
        }
    }
    None
}

/// The irreducible polynomial of degree `n` with the numerically smallest
/// bitmask.
pub fn smallest_irreducible(n: u32) -> u64 {
    ((1u64 << n)..(1u64 << (n + 1)))
        .find(|&p| trial_division_factor(p).is_none())
        .expect("irreducible polynomials exist in every degree")
}

struct LogTables {
    log: Vec<u32>,
    // Doubled so that log[a] + log[b] never needs a reduction.
    exp: Vec<u32>,
}

/// The field `k = GF(2^n)`. Immutable after construction.
pub struct Field {
    n: u32,
    modulus: u64,
    q: u64,
    r0: Fe,
    trace_mask: u32,
    // Row-reduced basis of the image of x -> x^2 + x, indexed by leading bit,
    // each paired with the preimage combination.
    as_basis: [(u32, u32); 32],
    tables: Option<LogTables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("n", &self.n)
            .field("modulus", &format_args!("0x{:x}", self.modulus))
            .field("r0", &self.r0)
            .finish()
    }
}

impl Field {
    /// Builds `GF(2^n)`. Without an explicit modulus the smallest irreducible
    /// bitmask of degree `n` is used.
    pub fn new(n: u32, modulus: Option<u64>) -> Result<Field> {
        if n == 0 || n > MAX_DEGREE {
            return Err(Error::DegreeOutOfRange { n, max: MAX_DEGREE });
        }
        let modulus = match modulus {
            None => smallest_irreducible(n),
            Some(p) => {
                if p == 0 || degree(p) != n {
                    return Err(Error::ModulusDegree { modulus: p, n });
                }
                if let Some(factor) = trial_division_factor(p) {
                    return Err(Error::ReducibleModulus { modulus: p, factor });
                }
                p
            }
        };
        let mut k = Field {
            n,
            modulus,
            q: 1u64 << n,
            r0: Fe::ONE,
            trace_mask: 0,
            as_basis: [(0, 0); 32],
            tables: None,
        };
        k.trace_mask = (0..n)
            .filter(|&i| k.trace_by_powers(Fe(1 << i)))
            .fold(0, |m, i| m | (1 << i));
        k.r0 = if n % 2 == 1 {
            Fe::ONE
        } else {
            k.elements()
                .find(|&a| k.trace(a))
                .expect("trace is surjective")
        };
        k.as_basis = k.build_as_basis();
        if n <= TABLE_MAX_DEGREE {
            k.tables = Some(k.build_tables());
        }
        Ok(k)
    }

    /// Shorthand for `Field::new(n, None)`.
    pub fn with_degree(n: u32) -> Result<Field> {
        Field::new(n, None)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The fixed element of trace one; `1` when `n` is odd.
    pub fn r0(&self) -> Fe {
        self.r0
    }

    /// Checked constructor from a raw bitmask.
    pub fn element(&self, bits: u32) -> Result<Fe> {
        if (bits as u64) >= self.q {
            return Err(Error::ElementOutOfRange { bits, n: self.n });
        }
        Ok(Fe(bits))
    }

    /// Parses hex and checks the degree bound.
    pub fn parse(&self, s: &str) -> Result<Fe> {
        let a = Fe::parse_hex(s)?;
        self.element(a.0)
    }

    pub fn contains(&self, a: Fe) -> bool {
        (a.0 as u64) < self.q
    }

    /// All elements in increasing bitmask order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.q as u32).map(Fe)
    }

    /// All nonzero elements in increasing bitmask order.
    pub fn nonzero(&self) -> impl Iterator<Item = Fe> + Clone {
        (1..self.q as u32).map(Fe)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.q as u32))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.q as u32))
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        a + b
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        match &self.tables {
            Some(t) => {
                if a.0 == 0 || b.0 == 0 {
                    Fe::ZERO
                } else {
                    Fe(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
                }
            }
            None => self.mul_polynomial(a, b),
        }
    }

    /// Shift-and-add multiplication followed by reduction modulo the field
    /// polynomial. Never touches the lookup tables.
    pub fn mul_polynomial(&self, a: Fe, b: Fe) -> Fe {
        let mut acc = 0u64;
        let mut x = a.0 as u64;
        let mut y = b.0;
        while y != 0 {
            if y & 1 == 1 {
                acc ^= x;
            }
            x <<= 1;
            y >>= 1;
        }
        Fe(poly_rem(acc, self.modulus) as u32)
    }

    #[inline]
    pub fn square(&self, a: Fe) -> Fe {
        self.mul(a, a)
    }

    /// The absolute Frobenius `a -> a^2`.
    #[inline]
    pub fn frobenius(&self, a: Fe) -> Fe {
        self.square(a)
    }

    pub fn pow(&self, mut a: Fe, mut e: u64) -> Fe {
        let mut acc = Fe::ONE;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.square(a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.tables {
            Some(t) => {
                let order = (self.q - 1) as u32;
                Fe(t.exp[((order - t.log[a.0 as usize]) % order) as usize])
            }
            None => self.inv_euclid(a),
        })
    }

    /// `a / b`.
    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Extended Euclid in `F_2[x]`; `a` must be nonzero.
    fn inv_euclid(&self, a: Fe) -> Fe {
        // Invariant: r0 = s0 * a and r1 = s1 * a modulo the field polynomial.
        let (mut r0, mut r1) = (self.modulus, a.0 as u64);
        let (mut s0, mut s1) = (0u64, 1u64);
        while r1 != 0 {
            while r0 != 0 && degree(r0) >= degree(r1) {
                let shift = degree(r0) - degree(r1);
                r0 ^= r1 << shift;
                s0 ^= s1 << shift;
            }
            std::mem::swap(&mut r0, &mut r1);
            std::mem::swap(&mut s0, &mut s1);
        }
        debug_assert_eq!(r0, 1);
        Fe(poly_rem(s0, self.modulus) as u32)
    }

    /// Unique square root, `a^(2^(n-1))`.
    pub fn sqrt(&self, a: Fe) -> Fe {
        (1..self.n).fold(a, |acc, _| self.square(acc))
    }

    pub fn root4(&self, a: Fe) -> Fe {
        self.sqrt(self.sqrt(a))
    }

    pub fn root8(&self, a: Fe) -> Fe {
        self.sqrt(self.root4(a))
    }

    fn trace_by_powers(&self, a: Fe) -> bool {
        let mut t = Fe::ZERO;
        let mut x = a;
        for _ in 0..self.n {
            t += x;
            x = self.mul_polynomial(x, x);
        }
        debug_assert!(t.0 <= 1);
        t.0 == 1
    }

    /// Absolute trace to `F_2`, returned as a bit (`true` = 1).
    #[inline]
    pub fn trace(&self, a: Fe) -> bool {
        (a.0 & self.trace_mask).count_ones() & 1 == 1
    }

    /// Membership in `AS(k) = {x + x^2}`, the kernel of the trace.
    #[inline]
    pub fn in_as(&self, a: Fe) -> bool {
        !self.trace(a)
    }

    /// A root of `x^2 + x = c` (the other one is `x + 1`), or `None` when
    /// `c` has trace one.
    pub fn solve_as(&self, c: Fe) -> Option<Fe> {
        if self.trace(c) {
            return None;
        }
        let x = if self.n % 2 == 1 {
            self.half_trace(c)
        } else {
            self.solve_as_linear(c)
        };
        debug_assert_eq!(self.square(x) + x, c);
        Some(x)
    }

    fn half_trace(&self, c: Fe) -> Fe {
        let mut acc = Fe::ZERO;
        let mut p = c;
        for _ in 0..=(self.n - 1) / 2 {
            acc += p;
            p = self.square(self.square(p));
        }
        acc
    }

    fn build_as_basis(&self) -> [(u32, u32); 32] {
        let mut basis = [(0u32, 0u32); 32];
        for i in 0..self.n {
            let e = Fe(1 << i);
            let mut v = (self.mul_polynomial(e, e) + e).0;
            let mut combo = 1u32 << i;
            while v != 0 {
                let lead = 31 - v.leading_zeros();
                let (bv, bc) = basis[lead as usize];
                if bv == 0 {
                    basis[lead as usize] = (v, combo);
                    break;
                }
                v ^= bv;
                combo ^= bc;
            }
        }
        basis
    }

    fn solve_as_linear(&self, c: Fe) -> Fe {
        let mut v = c.0;
        let mut combo = 0u32;
        while v != 0 {
            let lead = 31 - v.leading_zeros();
            let (bv, bc) = self.as_basis[lead as usize];
            debug_assert!(bv != 0, "trace-zero element outside the image");
            v ^= bv;
            combo ^= bc;
        }
        Fe(combo)
    }

    /// All roots of `y^3 + f y + g` in `k`, repeated by multiplicity, in
    /// increasing bitmask order. Exhaustive scan.
    pub fn cubic_roots(&self, f: Fe, g: Fe) -> Vec<Fe> {
        let mut roots = Vec::new();
        for v in self.elements() {
            // Horner on y^3 + f y + g, then deflate while v stays a root.
            let mut coeffs = vec![g, f, Fe::ZERO, Fe::ONE];
            loop {
                let (rem, quot) = self.deflate(&coeffs, v);
                if !rem.is_zero() {
                    break;
                }
                roots.push(v);
                coeffs = quot;
                if coeffs.len() == 1 {
                    break;
                }
            }
        }
        roots
    }

    /// Synthetic division of a low-to-high coefficient vector by `(y + v)`.
    fn deflate(&self, coeffs: &[Fe], v: Fe) -> (Fe, Vec<Fe>) {
        let deg = coeffs.len() - 1;
        let mut quot = vec![Fe::ZERO; deg];
        let mut carry = Fe::ZERO;
        for i in (0..=deg).rev() {
            let c = coeffs[i] + self.mul(carry, v);
            if i == 0 {
                return (c, quot);
            }
            quot[i - 1] = c;
            carry = c;
        }
        unreachable!()
    }

    fn build_tables(&self) -> LogTables {
        let order = self.q - 1;
        let primes = prime_factors(order);
        let generator = self
            .nonzero()
            .find(|&g| {
                primes
                    .iter()
                    .all(|&p| self.pow_polynomial(g, order / p) != Fe::ONE)
            })
            .expect("multiplicative group is cyclic");
        let mut log = vec![0u32; self.q as usize];
        let mut exp = vec![0u32; 2 * order as usize];
        let mut x = Fe::ONE;
        for i in 0..order as usize {
            exp[i] = x.0;
            exp[i + order as usize] = x.0;
            log[x.0 as usize] = i as u32;
            x = self.mul_polynomial(x, generator);
        }
        LogTables { log, exp }
    }

    fn pow_polynomial(&self, mut a: Fe, mut e: u64) -> Fe {
        let mut acc = Fe::ONE;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul_polynomial(acc, a);
            }
            a = self.mul_polynomial(a, a);
            e >>= 1;
        }
        acc
    }

    /// Embedding of `self` into a larger field `ext` whose degree is a
    /// multiple of `n`: sends `x` to the smallest root of the modulus in `ext`.
    pub fn embedding_into<'a>(&self, ext: &'a Field) -> Result<Embedding<'a>> {
        if !ext.n.is_multiple_of(self.n) {
            return Err(Error::Precondition(format!(
                "GF(2^{}) does not embed in GF(2^{})",
                self.n, ext.n
            )));
        }
        let eval = |beta: Fe| {
            (0..=self.n).rev().fold(Fe::ZERO, |acc, i| {
                let c = if (self.modulus >> i) & 1 == 1 { Fe::ONE } else { Fe::ZERO };
                ext.mul(acc, beta) + c
            })
        };
        let beta = ext
            .elements()
            .find(|&b| eval(b).is_zero())
            .ok_or_else(|| Error::Inconsistency("modulus has no root in the extension".into()))?;
        let mut images = Vec::with_capacity(self.n as usize);
        let mut p = Fe::ONE;
        for _ in 0..self.n {
            images.push(p);
            p = ext.mul(p, beta);
        }
        Ok(Embedding { ext, images })
    }
}

/// A field homomorphism `k -> ext` given by the images of the basis powers.
pub struct Embedding<'a> {
    ext: &'a Field,
    images: Vec<Fe>,
}

impl Embedding<'_> {
    pub fn target(&self) -> &Field {
        self.ext
    }

    pub fn apply(&self, a: Fe) -> Fe {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, _)| (a.0 >> i) & 1 == 1)
            .fold(Fe::ZERO, |acc, (_, &b)| acc + b)
    }
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// `(n, modulus)` summary used by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldInfo {
    pub n: u32,
    pub q: u64,
    pub modulus: String,
    pub r0: Fe,
}

impl From<&Field> for FieldInfo {
    fn from(k: &Field) -> FieldInfo {
        FieldInfo {
            n: k.n,
            q: k.q,
            modulus: format!("{:x}", k.modulus),
            r0: k.r0,
        }
    }
}
