//! Elliptic curves over `GF(2^n)`.
//!
//! Two model shapes are used throughout:
//!
//! * ordinary: `y^2 + xy = x^3 + r x^2 + a` with `a != 0`, so `j = 1/a`;
//! * supersingular: `y^2 + λ y = x^3 + d x^2 + e` with `λ != 0`.
//!
//! Point counts are exact O(q) scans: over each `x` the equation becomes an
//! Artin-Schreier equation `z^2 + z = c`, solvable iff `tr(c) = 0`.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::codec::Tagged;
use crate::error::{Error, Result};
use crate::gf2::{Fe, Field};

/// `y^2 + xy = x^3 + r x^2 + a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrdinaryCurve {
    pub r: Fe,
    pub a: Fe,
}

/// `y^2 + λ y = x^3 + d x^2 + e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupersingularCurve {
    pub lambda: Fe,
    pub d: Fe,
    pub e: Fe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Infinity,
    Affine { x: Fe, y: Fe },
}

impl Point {
    pub fn affine(x: Fe, y: Fe) -> Point {
        Point::Affine { x, y }
    }
}

/// `(j, sgn, tr)` of an ordinary curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrdinaryInvariants {
    pub j: Fe,
    pub sgn: Fe,
    pub trace: i64,
}

/// Coefficients of `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a6`; both model
/// shapes are special cases and share the chord-tangent law below.
#[derive(Clone, Copy)]
struct Weierstrass {
    a1: Fe,
    a2: Fe,
    a3: Fe,
    a6: Fe,
}

impl Weierstrass {
    fn contains(&self, k: &Field, p: Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine { x, y } => {
                let lhs = k.square(y) + k.mul(self.a1, k.mul(x, y)) + k.mul(self.a3, y);
                let x2 = k.square(x);
                let rhs = k.mul(x2, x) + k.mul(self.a2, x2) + self.a6;
                k.contains(x) && k.contains(y) && lhs == rhs
            }
        }
    }

    fn neg(&self, k: &Field, p: Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::affine(x, y + k.mul(self.a1, x) + self.a3),
        }
    }

    fn add(&self, k: &Field, p: Point, q: Point) -> Point {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q,
            (_, Point::Infinity) => return p,
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let slope = if x1 != x2 {
            k.mul(y1 + y2, k.inv(x1 + x2).expect("distinct x"))
        } else if y1 != y2 {
            // Q = -P: the only other point over x1.
            return Point::Infinity;
        } else {
            let den = k.mul(self.a1, x1) + self.a3;
            if den.is_zero() {
                return Point::Infinity;
            }
            k.mul(k.square(x1) + k.mul(self.a1, y1), k.inv(den).expect("nonzero"))
        };
        let x3 = k.square(slope) + k.mul(self.a1, slope) + self.a2 + x1 + x2;
        let y3 = k.mul(slope + self.a1, x3) + y1 + k.mul(slope, x1) + self.a3;
        Point::affine(x3, y3)
    }

    fn scalar_mul(&self, k: &Field, p: Point, mut n: u64) -> Point {
        let mut acc = Point::Infinity;
        let mut base = p;
        while n != 0 {
            if n & 1 == 1 {
                acc = self.add(k, acc, base);
            }
            base = self.add(k, base, base);
            n >>= 1;
        }
        acc
    }
}

/// Operations shared by both model shapes.
pub trait EllipticModel {
    #[doc(hidden)]
    fn weierstrass(&self) -> WeierstrassCoeffs;

    /// `#E(k)`, including the point at infinity.
    fn count_points(&self, k: &Field) -> u64;

    /// All rational points, `Infinity` first, then affine points by `(x, y)`.
    fn points(&self, k: &Field) -> Vec<Point>;

    /// Frobenius trace `q + 1 - #E(k)`.
    fn trace(&self, k: &Field) -> i64 {
        k.q() as i64 + 1 - self.count_points(k) as i64
    }

    fn contains(&self, k: &Field, p: Point) -> bool {
        self.weierstrass().0.contains(k, p)
    }

    fn neg(&self, k: &Field, p: Point) -> Result<Point> {
        let w = self.weierstrass().0;
        check_on(k, &w, p)?;
        Ok(w.neg(k, p))
    }

    fn add_points(&self, k: &Field, p: Point, q: Point) -> Result<Point> {
        let w = self.weierstrass().0;
        check_on(k, &w, p)?;
        check_on(k, &w, q)?;
        Ok(w.add(k, p, q))
    }

    fn mul_point(&self, k: &Field, p: Point, n: u64) -> Result<Point> {
        let w = self.weierstrass().0;
        check_on(k, &w, p)?;
        Ok(w.scalar_mul(k, p, n))
    }

    /// Order of a rational point, found among the divisors of `#E(k)`.
    fn order_of(&self, k: &Field, p: Point) -> Result<u64> {
        let w = self.weierstrass().0;
        check_on(k, &w, p)?;
        let mut order = self.count_points(k);
        for prime in prime_divisors(order) {
            while order.is_multiple_of(prime) && w.scalar_mul(k, p, order / prime) == Point::Infinity {
                order /= prime;
            }
        }
        Ok(order)
    }
}

#[doc(hidden)]
#[derive(Clone, Copy)]
pub struct WeierstrassCoeffs(Weierstrass);

fn check_on(k: &Field, w: &Weierstrass, p: Point) -> Result<()> {
    if w.contains(k, p) {
        Ok(())
    } else {
        Err(Error::NotOnCurve)
    }
}

fn prime_divisors(mut m: u64) -> Vec<u64> {
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

impl OrdinaryCurve {
    pub fn new(k: &Field, r: Fe, a: Fe) -> Result<OrdinaryCurve> {
        if !k.contains(r) || !k.contains(a) {
            return Err(Error::Precondition("coefficient outside the field".into()));
        }
        if a.is_zero() {
            return Err(Error::Precondition("ordinary model needs a != 0".into()));
        }
        Ok(OrdinaryCurve { r, a })
    }

    /// The normalized model `y^2 + xy = x^3 + sgn x^2 + 1/j`.
    pub fn from_invariants(k: &Field, j: Fe, sgn: Fe) -> Result<OrdinaryCurve> {
        OrdinaryCurve::new(k, sgn, k.inv(j)?)
    }

    pub fn j_invariant(&self, k: &Field) -> Fe {
        k.inv(self.a).expect("ordinary model has a != 0")
    }

    /// `0` when `tr(r) = 0`, else `r0`.
    pub fn signature(&self, k: &Field) -> Fe {
        if k.trace(self.r) {
            k.r0()
        } else {
            Fe::ZERO
        }
    }

    /// Same curve with the `x^2` coefficient moved into `{0, r0}` via
    /// `y <- y + w x`, `w^2 + w = r + sgn`.
    pub fn normalized(&self, k: &Field) -> OrdinaryCurve {
        OrdinaryCurve { r: self.signature(k), a: self.a }
    }

    pub fn quadratic_twist(&self, k: &Field) -> OrdinaryCurve {
        OrdinaryCurve { r: self.r + k.r0(), a: self.a }
    }

    pub fn invariants(&self, k: &Field) -> OrdinaryInvariants {
        OrdinaryInvariants {
            j: self.j_invariant(k),
            sgn: self.signature(k),
            trace: self.trace(k),
        }
    }

    /// The nontrivial rational 2-torsion point `N = (0, a^(1/2))`.
    pub fn two_torsion(&self, k: &Field) -> Point {
        Point::affine(Fe::ZERO, k.sqrt(self.a))
    }

    /// Translation by `N`, via the closed form for `x != 0`.
    pub fn tau_n(&self, k: &Field, p: Point) -> Result<Point> {
        if !self.contains(k, p) {
            return Err(Error::NotOnCurve);
        }
        match p {
            Point::Infinity => Ok(self.two_torsion(k)),
            Point::Affine { x, .. } if x.is_zero() => Ok(Point::Infinity),
            Point::Affine { x, y } => {
                let s = k.sqrt(self.a);
                let xi = k.inv(x)?;
                let xi2 = k.square(xi);
                Ok(Point::affine(
                    k.mul(s, xi),
                    k.mul(k.mul(s, y), xi2) + s + k.mul(s, xi) + k.mul(self.a, xi2),
                ))
            }
        }
    }

    /// Whether `E(k)` has a point of exact order `target` (4 or 8).
    /// Decided by enumerating the group; requires `sgn(E) = 0`.
    pub fn torsion_probe(&self, k: &Field, target: u64) -> Result<bool> {
        if target != 4 && target != 8 {
            return Err(Error::Precondition(format!("torsion target {target} not in {{4, 8}}")));
        }
        if !self.signature(k).is_zero() {
            return Err(Error::Precondition("torsion probe needs sgn(E) = 0".into()));
        }
        let n = self.count_points(k);
        if !n.is_multiple_of(target) {
            return Ok(false);
        }
        for p in self.points(k) {
            if self.order_of(k, p)? == target {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

impl EllipticModel for OrdinaryCurve {
    fn weierstrass(&self) -> WeierstrassCoeffs {
        WeierstrassCoeffs(Weierstrass { a1: Fe::ONE, a2: self.r, a3: Fe::ZERO, a6: self.a })
    }

    fn count_points(&self, k: &Field) -> u64 {
        // Infinity and (0, sqrt a); over x != 0 put y = xz: z^2 + z = x + r + a/x^2.
        let mut count = 2;
        for x in k.nonzero() {
            let xi = k.inv(x).expect("nonzero");
            if !k.trace(x + self.r + k.mul(self.a, k.square(xi))) {
                count += 2;
            }
        }
        count
    }

    fn points(&self, k: &Field) -> Vec<Point> {
        let mut pts = vec![Point::Infinity, self.two_torsion(k)];
        for x in k.nonzero() {
            let xi = k.inv(x).expect("nonzero");
            if let Some(z) = k.solve_as(x + self.r + k.mul(self.a, k.square(xi))) {
                let (y0, y1) = (k.mul(x, z), k.mul(x, z + Fe::ONE));
                pts.push(Point::affine(x, y0.min(y1)));
                pts.push(Point::affine(x, y0.max(y1)));
            }
        }
        pts
    }
}

impl SupersingularCurve {
    pub fn new(k: &Field, lambda: Fe, d: Fe, e: Fe) -> Result<SupersingularCurve> {
        if ![lambda, d, e].iter().all(|&c| k.contains(c)) {
            return Err(Error::Precondition("coefficient outside the field".into()));
        }
        if lambda.is_zero() {
            return Err(Error::Precondition("supersingular model needs λ != 0".into()));
        }
        Ok(SupersingularCurve { lambda, d, e })
    }

    fn rhs(&self, k: &Field, x: Fe) -> Fe {
        let x2 = k.square(x);
        k.mul(x2, x) + k.mul(self.d, x2) + self.e
    }
}

impl EllipticModel for SupersingularCurve {
    fn weierstrass(&self) -> WeierstrassCoeffs {
        WeierstrassCoeffs(Weierstrass { a1: Fe::ZERO, a2: self.d, a3: self.lambda, a6: self.e })
    }

    fn count_points(&self, k: &Field) -> u64 {
        // y = λz: z^2 + z = (x^3 + d x^2 + e) / λ^2.
        let scale = k.square(k.inv(self.lambda).expect("λ != 0"));
        let mut count = 1;
        for x in k.elements() {
            if !k.trace(k.mul(self.rhs(k, x), scale)) {
                count += 2;
            }
        }
        count
    }

    fn points(&self, k: &Field) -> Vec<Point> {
        let scale = k.square(k.inv(self.lambda).expect("λ != 0"));
        let mut pts = vec![Point::Infinity];
        for x in k.elements() {
            if let Some(z) = k.solve_as(k.mul(self.rhs(k, x), scale)) {
                let (y0, y1) = (k.mul(self.lambda, z), k.mul(self.lambda, z + Fe::ONE));
                pts.push(Point::affine(x, y0.min(y1)));
                pts.push(Point::affine(x, y0.max(y1)));
            }
        }
        pts
    }
}

/// Either model shape; the unit of serialization for elliptic curves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EllipticCurve {
    Ordinary(OrdinaryCurve),
    Supersingular(SupersingularCurve),
}

impl EllipticCurve {
    pub fn count_points(&self, k: &Field) -> u64 {
        match self {
            EllipticCurve::Ordinary(e) => e.count_points(k),
            EllipticCurve::Supersingular(e) => e.count_points(k),
        }
    }

    pub fn trace(&self, k: &Field) -> i64 {
        match self {
            EllipticCurve::Ordinary(e) => e.trace(k),
            EllipticCurve::Supersingular(e) => e.trace(k),
        }
    }

    /// Parses `ord:r=<hex>,a=<hex>` or `ss:l=<hex>,d=<hex>,e=<hex>`.
    pub fn parse(k: &Field, s: &str) -> Result<EllipticCurve> {
        let t = Tagged::parse(s)?;
        match t.tag {
            "ord" => {
                let [r, a] = t.elements(k, ["r", "a"])?;
                Ok(EllipticCurve::Ordinary(OrdinaryCurve::new(k, r, a)?))
            }
            "ss" => {
                let [l, d, e] = t.elements(k, ["l", "d", "e"])?;
                Ok(EllipticCurve::Supersingular(SupersingularCurve::new(k, l, d, e)?))
            }
            other => Err(Error::Parse(format!("unknown elliptic curve tag {other:?}"))),
        }
    }
}

impl fmt::Display for OrdinaryCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ord:r={},a={}", self.r, self.a)
    }
}

impl fmt::Display for SupersingularCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ss:l={},d={},e={}", self.lambda, self.d, self.e)
    }
}

impl fmt::Display for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EllipticCurve::Ordinary(e) => e.fmt(f),
            EllipticCurve::Supersingular(e) => e.fmt(f),
        }
    }
}

impl Serialize for EllipticCurve {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
