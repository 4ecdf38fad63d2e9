//! The five families of genus-3 curves with a `C2 x C2` group of involutions.
//!
//! Hyperelliptic families are Artin-Schreier models `y^2 + y = f(x)`:
//!
//! * `HypA`: `f = a(x + t/x) + a(t+1)(1/(x+1) + t/(x+t)) + r`
//! * `HypB`: `f = b(1/(x^2+x+s) + 1/(x^2+x+t)) + r`
//!
//! The non-hyperelliptic families are plane quartics:
//!
//! * `SS`:    `y^4 + f y^2 z^2 + g y z^3 = x^3 z + d x^2 z^2 + e z^4`
//! * `NHypA`: `(a(x^2+y^2) + c z^2 + xy + e z(x+y))^2 = (r(x^2+y^2) + xy) z(x+y+z)`
//! * `NHypB`: `(a(x^2+y^2) + c z(x+y+z) + d xy)^2 = (r(x^2+y^2) + xy) z(x+y+z)`
//!
//! Counting on the hyperelliptic models works place by place on `P^1`:
//! every pole of the `HypA` right-hand side is simple, hence totally
//! ramified and carries exactly one rational point; `HypB` has no rational
//! poles and its two points at infinity are rational iff `tr(r) = 0`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::codec::Tagged;
use crate::error::{Error, Result};
use crate::gf2::{Fe, Field};
use crate::quartic::{self, Form};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    HypA,
    HypB,
    Ss,
    NHypA,
    NHypB,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::HypA, Family::HypB, Family::Ss, Family::NHypA, Family::NHypB];

    pub fn tag(self) -> &'static str {
        match self {
            Family::HypA => "hypa",
            Family::HypB => "hypb",
            Family::Ss => "ss",
            Family::NHypA => "nhypa",
            Family::NHypB => "nhypb",
        }
    }

    pub fn is_hyperelliptic(self) -> bool {
        matches!(self, Family::HypA | Family::HypB)
    }

    /// Every valid parameter tuple over `k`, in lexicographic order of the
    /// serialized keys.
    pub fn enumerate(self, k: &Field) -> Vec<Genus3Curve> {
        let r_values = [Fe::ZERO, k.r0()];
        let mut out = Vec::new();
        match self {
            Family::HypA => {
                for a in k.nonzero() {
                    for r in r_values {
                        for t in k.nonzero().filter(|&t| t != Fe::ONE) {
                            out.push(Genus3Curve::HypA { a, r, t });
                        }
                    }
                }
            }
            Family::HypB => {
                let non_as: Vec<Fe> = k.elements().filter(|&s| k.trace(s)).collect();
                for b in k.nonzero() {
                    for r in r_values {
                        for &s in &non_as {
                            for &t in non_as.iter().filter(|&&t| t != s) {
                                out.push(Genus3Curve::HypB { b, r, s, t });
                            }
                        }
                    }
                }
            }
            Family::Ss => {
                let split: Vec<(Fe, Fe)> = k
                    .elements()
                    .flat_map(|f| k.nonzero().map(move |g| (f, g)))
                    .filter(|&(f, g)| k.cubic_roots(f, g).len() == 3)
                    .collect();
                for d in k.elements() {
                    for e in k.elements() {
                        for &(f, g) in &split {
                            out.push(Genus3Curve::Ss { d, e, f, g });
                        }
                    }
                }
            }
            Family::NHypA => {
                for a in k.elements() {
                    for c in k.nonzero() {
                        for e in k.elements() {
                            for r in r_values {
                                let curve = Genus3Curve::NHypA { a, c, e, r };
                                if curve.validate(k).is_empty() {
                                    out.push(curve);
                                }
                            }
                        }
                    }
                }
            }
            Family::NHypB => {
                for a in k.elements() {
                    for c in k.nonzero() {
                        for d in k.nonzero() {
                            for r in r_values {
                                let curve = Genus3Curve::NHypB { a, c, d, r };
                                if curve.validate(k).is_empty() {
                                    out.push(curve);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// A uniformly random valid tuple (rejection sampling).
    pub fn random<R: Rng + ?Sized>(self, k: &Field, rng: &mut R) -> Result<Genus3Curve> {
        if k.q() < 4 && self == Family::HypB {
            // Needs two distinct trace-one elements.
            return Err(Error::Precondition("HypB needs q >= 4".into()));
        }
        let r_values = [Fe::ZERO, k.r0()];
        for _ in 0..100_000 {
            let r = r_values[rng.gen_range(0..2)];
            let curve = match self {
                Family::HypA => Genus3Curve::HypA { a: k.random(rng), r, t: k.random(rng) },
                Family::HypB => Genus3Curve::HypB {
                    b: k.random(rng),
                    r,
                    s: k.random(rng),
                    t: k.random(rng),
                },
                Family::Ss => Genus3Curve::Ss {
                    d: k.random(rng),
                    e: k.random(rng),
                    f: k.random(rng),
                    g: k.random(rng),
                },
                Family::NHypA => Genus3Curve::NHypA {
                    a: k.random(rng),
                    c: k.random(rng),
                    e: k.random(rng),
                    r,
                },
                Family::NHypB => Genus3Curve::NHypB {
                    a: k.random(rng),
                    c: k.random(rng),
                    d: k.random(rng),
                    r,
                },
            };
            if curve.validate(k).is_empty() {
                return Ok(curve);
            }
        }
        Err(Error::Precondition(format!("no valid {} tuple found over GF({})", self.tag(), k.q())))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.tag() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

/// A named parameter constraint that a tuple fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Violation(pub &'static str);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Genus3Curve {
    HypA { a: Fe, r: Fe, t: Fe },
    HypB { b: Fe, r: Fe, s: Fe, t: Fe },
    Ss { d: Fe, e: Fe, f: Fe, g: Fe },
    NHypA { a: Fe, c: Fe, e: Fe, r: Fe },
    NHypB { a: Fe, c: Fe, d: Fe, r: Fe },
}

/// A rational point on the smooth model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurvePoint {
    /// Hyperelliptic model: `x` on `P^1` (`None` is infinity) and `y`, which
    /// is `None` for the single point over a ramified pole.
    Hyp { x: Option<Fe>, y: Option<Fe> },
    /// Plane quartic, normalized projective coordinates.
    Plane([Fe; 3]),
}

/// One of the three nontrivial involutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Involution {
    /// `(x, y) -> ((αx + β)/(γx + δ), y)` on the hyperelliptic model.
    Mobius([[Fe; 2]; 2]),
    /// A linear map of `P^2` (rows act on the column `(x, y, z)`).
    Linear([[Fe; 3]; 3]),
}

impl Involution {
    pub fn apply(&self, k: &Field, p: CurvePoint) -> CurvePoint {
        match (self, p) {
            (Involution::Mobius(m), CurvePoint::Hyp { x, y }) => {
                let [[al, be], [ga, de]] = *m;
                let x2 = match x {
                    None => {
                        if ga.is_zero() {
                            None
                        } else {
                            Some(k.div(al, ga).expect("nonzero"))
                        }
                    }
                    Some(x) => {
                        let den = k.mul(ga, x) + de;
                        if den.is_zero() {
                            None
                        } else {
                            Some(k.div(k.mul(al, x) + be, den).expect("nonzero"))
                        }
                    }
                };
                CurvePoint::Hyp { x: x2, y }
            }
            (Involution::Linear(m), CurvePoint::Plane(v)) => {
                let img = [0, 1, 2].map(|i| {
                    (0..3).fold(Fe::ZERO, |acc, j| acc + k.mul(m[i][j], v[j]))
                });
                CurvePoint::Plane(quartic::normalize(k, img))
            }
            _ => p,
        }
    }
}

/// The three involutions of a curve and their rational fixed points.
#[derive(Clone, Debug)]
pub struct InvolutionReport {
    pub maps: [Involution; 3],
    pub fixed: [Vec<CurvePoint>; 3],
}

fn mono(e: [u8; 3], c: Fe) -> ([u8; 3], Fe) {
    (e, c)
}

impl Genus3Curve {
    pub fn family(&self) -> Family {
        match self {
            Genus3Curve::HypA { .. } => Family::HypA,
            Genus3Curve::HypB { .. } => Family::HypB,
            Genus3Curve::Ss { .. } => Family::Ss,
            Genus3Curve::NHypA { .. } => Family::NHypA,
            Genus3Curve::NHypB { .. } => Family::NHypB,
        }
    }

    fn params(&self) -> Vec<Fe> {
        match *self {
            Genus3Curve::HypA { a, r, t } => vec![a, r, t],
            Genus3Curve::HypB { b, r, s, t } => vec![b, r, s, t],
            Genus3Curve::Ss { d, e, f, g } => vec![d, e, f, g],
            Genus3Curve::NHypA { a, c, e, r } => vec![a, c, e, r],
            Genus3Curve::NHypB { a, c, d, r } => vec![a, c, d, r],
        }
    }

    /// Every violated parameter constraint; empty means valid.
    pub fn validate(&self, k: &Field) -> Vec<Violation> {
        let mut v = Vec::new();
        if !self.params().iter().all(|&p| k.contains(p)) {
            v.push(Violation("parameters in k"));
            return v;
        }
        let r_ok = |r: Fe| r.is_zero() || r == k.r0();
        match *self {
            Genus3Curve::HypA { a, r, t } => {
                if a.is_zero() {
                    v.push(Violation("a ≠ 0"));
                }
                if t.is_zero() {
                    v.push(Violation("t ≠ 0"));
                }
                if t == Fe::ONE {
                    v.push(Violation("t ≠ 1"));
                }
                if !r_ok(r) {
                    v.push(Violation("r ∈ {0, r0}"));
                }
            }
            Genus3Curve::HypB { b, r, s, t } => {
                if b.is_zero() {
                    v.push(Violation("b ≠ 0"));
                }
                if k.in_as(s) {
                    v.push(Violation("s ∉ AS(k)"));
                }
                if k.in_as(t) {
                    v.push(Violation("t ∉ AS(k)"));
                }
                if s == t {
                    v.push(Violation("s ≠ t"));
                }
                if !r_ok(r) {
                    v.push(Violation("r ∈ {0, r0}"));
                }
            }
            Genus3Curve::Ss { f, g, .. } => {
                if g.is_zero() {
                    v.push(Violation("g ≠ 0"));
                } else if k.cubic_roots(f, g).len() != 3 {
                    v.push(Violation("y³ + fy + g splits in k"));
                }
            }
            Genus3Curve::NHypA { a, c, e, r } => {
                if c.is_zero() {
                    v.push(Violation("c ≠ 0"));
                }
                if a == r {
                    v.push(Violation("a ≠ r"));
                }
                if (r + a + e + c).is_zero() {
                    v.push(Violation("r+a+e+c ≠ 0"));
                }
                if !r_ok(r) {
                    v.push(Violation("r ∈ {0, r0}"));
                }
            }
            Genus3Curve::NHypB { a, c, d, r } => {
                if k.mul(c, d).is_zero() {
                    v.push(Violation("cd ≠ 0"));
                }
                if c + d == Fe::ONE {
                    v.push(Violation("c+d ≠ 1"));
                }
                if (a + k.mul(d, r)).is_zero() {
                    v.push(Violation("a+dr ≠ 0"));
                }
                if !r_ok(r) {
                    v.push(Violation("r ∈ {0, r0}"));
                }
            }
        }
        v
    }

    /// `Ok(self)` if valid, else every violation.
    pub fn checked(self, k: &Field) -> Result<Genus3Curve> {
        let v = self.validate(k);
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidParameters(v))
        }
    }

    /// Right-hand side of the Artin-Schreier model at a finite `x` that is
    /// not a pole. `None` at poles and for quartic families.
    pub fn as_rhs(&self, k: &Field, x: Fe) -> Option<Fe> {
        match *self {
            Genus3Curve::HypA { a, r, t } => {
                if x.is_zero() || x == Fe::ONE || x == t {
                    return None;
                }
                let inv = |v: Fe| k.inv(v).expect("not a pole");
                let first = k.mul(a, x + k.mul(t, inv(x)));
                let second = k.mul(
                    k.mul(a, t + Fe::ONE),
                    inv(x + Fe::ONE) + k.mul(t, inv(x + t)),
                );
                Some(first + second + r)
            }
            Genus3Curve::HypB { b, r, s, t } => {
                let base = k.square(x) + x;
                let (ds, dt) = (base + s, base + t);
                if ds.is_zero() || dt.is_zero() {
                    return None;
                }
                Some(k.mul(b, k.inv(ds).ok()? + k.inv(dt).ok()?) + r)
            }
            _ => None,
        }
    }

    /// The defining quartic form `F(x, y, z) = 0` for the plane families.
    pub fn quartic(&self, k: &Field) -> Option<Form> {
        let one = Fe::ONE;
        match *self {
            Genus3Curve::Ss { d, e, f, g } => Some(Form::new(
                4,
                [
                    mono([0, 4, 0], one),
                    mono([0, 2, 2], f),
                    mono([0, 1, 3], g),
                    mono([3, 0, 1], one),
                    mono([2, 0, 2], d),
                    mono([0, 0, 4], e),
                ],
            )),
            Genus3Curve::NHypA { a, c, e, r } => {
                let lhs = Form::new(
                    2,
                    [
                        mono([2, 0, 0], a),
                        mono([0, 2, 0], a),
                        mono([0, 0, 2], c),
                        mono([1, 1, 0], one),
                        mono([1, 0, 1], e),
                        mono([0, 1, 1], e),
                    ],
                );
                Some(lhs.square(k).add(&nonhyp_rhs(k, r)))
            }
            Genus3Curve::NHypB { a, c, d, r } => {
                let lhs = Form::new(
                    2,
                    [
                        mono([2, 0, 0], a),
                        mono([0, 2, 0], a),
                        mono([1, 0, 1], c),
                        mono([0, 1, 1], c),
                        mono([0, 0, 2], c),
                        mono([1, 1, 0], d),
                    ],
                );
                Some(lhs.square(k).add(&nonhyp_rhs(k, r)))
            }
            _ => None,
        }
    }

    /// Exact `#C(k)` on the smooth model.
    pub fn count_points(&self, k: &Field) -> u64 {
        match *self {
            Genus3Curve::HypA { .. } => {
                // Four ramified poles: 0, 1, t and infinity.
                4 + 2 * k
                    .elements()
                    .filter_map(|x| self.as_rhs(k, x))
                    .filter(|&v| k.in_as(v))
                    .count() as u64
            }
            Genus3Curve::HypB { r, .. } => {
                let at_infinity = if k.in_as(r) { 2 } else { 0 };
                at_infinity
                    + 2 * k
                        .elements()
                        .map(|x| self.as_rhs(k, x).expect("no rational poles"))
                        .filter(|&v| k.in_as(v))
                        .count() as u64
            }
            _ => quartic::count_zeros(k, &self.quartic(k).expect("plane family")),
        }
    }

    /// All rational points of the smooth model, sorted.
    pub fn rational_points(&self, k: &Field) -> Vec<CurvePoint> {
        let mut pts = Vec::new();
        match *self {
            Genus3Curve::HypA { t, .. } => {
                for pole in [Some(Fe::ZERO), Some(Fe::ONE), Some(t), None] {
                    pts.push(CurvePoint::Hyp { x: pole, y: None });
                }
                for x in k.elements() {
                    if let Some(y) = self.as_rhs(k, x).and_then(|c| k.solve_as(c)) {
                        pts.push(CurvePoint::Hyp { x: Some(x), y: Some(y) });
                        pts.push(CurvePoint::Hyp { x: Some(x), y: Some(y + Fe::ONE) });
                    }
                }
            }
            Genus3Curve::HypB { r, .. } => {
                if let Some(y) = k.solve_as(r) {
                    pts.push(CurvePoint::Hyp { x: None, y: Some(y) });
                    pts.push(CurvePoint::Hyp { x: None, y: Some(y + Fe::ONE) });
                }
                for x in k.elements() {
                    if let Some(y) = self.as_rhs(k, x).and_then(|c| k.solve_as(c)) {
                        pts.push(CurvePoint::Hyp { x: Some(x), y: Some(y) });
                        pts.push(CurvePoint::Hyp { x: Some(x), y: Some(y + Fe::ONE) });
                    }
                }
            }
            _ => {
                let form = self.quartic(k).expect("plane family");
                pts.extend(
                    quartic::projective_points(k)
                        .filter(|&p| form.eval(k, p).is_zero())
                        .map(CurvePoint::Plane),
                );
            }
        }
        pts.sort();
        pts
    }

    /// Whether a point lies on the smooth model.
    pub fn contains(&self, k: &Field, p: CurvePoint) -> bool {
        match (self, p) {
            (Genus3Curve::HypA { t, .. }, CurvePoint::Hyp { x, y: None }) => {
                x.is_none() || x == Some(Fe::ZERO) || x == Some(Fe::ONE) || x == Some(*t)
            }
            (Genus3Curve::HypB { r, .. }, CurvePoint::Hyp { x: None, y: Some(y) }) => {
                k.square(y) + y == *r
            }
            (_, CurvePoint::Hyp { x: Some(x), y: Some(y) }) => {
                self.as_rhs(k, x).is_some_and(|c| k.square(y) + y == c)
            }
            (_, CurvePoint::Plane(v)) => self
                .quartic(k)
                .is_some_and(|f| v.iter().any(|c| !c.is_zero()) && f.eval(k, v).is_zero()),
            _ => false,
        }
    }

    /// The three involutions `i1, i2, i3` and their rational fixed points.
    pub fn involutions(&self, k: &Field) -> Result<InvolutionReport> {
        self.checked(k)?;
        let (o, z) = (Fe::ONE, Fe::ZERO);
        let maps = match *self {
            Genus3Curve::HypA { t, .. } => [
                Involution::Mobius([[z, t], [o, z]]),
                Involution::Mobius([[o, t], [o, o]]),
                Involution::Mobius([[t, t], [o, t]]),
            ],
            Genus3Curve::HypB { s, t, .. } => {
                let u = k
                    .solve_as(s + t)
                    .ok_or_else(|| Error::Inconsistency("s + t has trace one".into()))?;
                [
                    Involution::Mobius([[o, o], [z, o]]),
                    Involution::Mobius([[o, u], [z, o]]),
                    Involution::Mobius([[o, u + o], [z, o]]),
                ]
            }
            Genus3Curve::Ss { f, g, .. } => {
                let v = k.cubic_roots(f, g);
                let shift = |v: Fe| Involution::Linear([[o, z, z], [z, o, v], [z, z, o]]);
                [shift(v[0]), shift(v[1]), shift(v[2])]
            }
            Genus3Curve::NHypA { .. } => [
                Involution::Linear([[z, o, z], [o, z, z], [z, z, o]]),
                Involution::Linear([[o, z, o], [z, o, o], [z, z, o]]),
                Involution::Linear([[z, o, o], [o, z, o], [z, z, o]]),
            ],
            Genus3Curve::NHypB { .. } => [
                Involution::Linear([[z, o, z], [o, z, z], [z, z, o]]),
                Involution::Linear([[o, z, z], [z, o, z], [o, o, o]]),
                Involution::Linear([[z, o, z], [o, z, z], [o, o, o]]),
            ],
        };
        let pts = self.rational_points(k);
        let fixed = maps.map(|m| pts.iter().copied().filter(|&p| m.apply(k, p) == p).collect());
        Ok(InvolutionReport { maps, fixed })
    }

    /// Looks for a singular point of the quartic over `k` (`degree` 1) or its
    /// quadratic extension (`degree` 2).
    pub fn smoothness_spotcheck(&self, k: &Field, degree: u32) -> Result<Option<[Fe; 3]>> {
        self.checked(k)?;
        let form = self
            .quartic(k)
            .ok_or_else(|| Error::Precondition("smoothness check applies to plane quartics".into()))?;
        if degree != 1 && degree != 2 {
            return Err(Error::Precondition(format!("extension degree {degree} not in {{1, 2}}")));
        }
        let ext_n = k.n() * degree;
        if 2 * ext_n > 26 {
            return Err(Error::Precondition(format!(
                "smoothness scan over GF(2^{ext_n}) exceeds the 2^26 point budget"
            )));
        }
        if degree == 1 {
            return Ok(quartic::find_singular_point(k, &form));
        }
        let ext = Field::with_degree(ext_n)?;
        let emb = k.embedding_into(&ext)?;
        Ok(quartic::find_singular_point(&ext, &form.map_coefficients(&emb)))
    }

    /// Parses the `family:key=hex,...` form and validates the tuple.
    pub fn parse(k: &Field, s: &str) -> Result<Genus3Curve> {
        Genus3Curve::parse_unchecked(k, s)?.checked(k)
    }

    /// Parses without validating the parameter constraints.
    pub fn parse_unchecked(k: &Field, s: &str) -> Result<Genus3Curve> {
        let t = Tagged::parse(s)?;
        let family: Family = t.tag.parse()?;
        Ok(match family {
            Family::HypA => {
                let [a, r, t] = t.elements(k, ["a", "r", "t"])?;
                Genus3Curve::HypA { a, r, t }
            }
            Family::HypB => {
                let [b, r, s, t] = t.elements(k, ["b", "r", "s", "t"])?;
                Genus3Curve::HypB { b, r, s, t }
            }
            Family::Ss => {
                let [d, e, f, g] = t.elements(k, ["d", "e", "f", "g"])?;
                Genus3Curve::Ss { d, e, f, g }
            }
            Family::NHypA => {
                let [a, c, e, r] = t.elements(k, ["a", "c", "e", "r"])?;
                Genus3Curve::NHypA { a, c, e, r }
            }
            Family::NHypB => {
                let [a, c, d, r] = t.elements(k, ["a", "c", "d", "r"])?;
                Genus3Curve::NHypB { a, c, d, r }
            }
        })
    }
}

/// `(r(x^2 + y^2) + xy) z(x + y + z)`.
fn nonhyp_rhs(k: &Field, r: Fe) -> Form {
    let quad = Form::new(2, [mono([2, 0, 0], r), mono([0, 2, 0], r), mono([1, 1, 0], Fe::ONE)]);
    let lin = Form::new(
        2,
        [mono([1, 0, 1], Fe::ONE), mono([0, 1, 1], Fe::ONE), mono([0, 0, 2], Fe::ONE)],
    );
    quad.mul(k, &lin)
}

impl fmt::Display for Genus3Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Genus3Curve::HypA { a, r, t } => write!(f, "hypa:a={a},r={r},t={t}"),
            Genus3Curve::HypB { b, r, s, t } => write!(f, "hypb:b={b},r={r},s={s},t={t}"),
            Genus3Curve::Ss { d, e, f: ff, g } => write!(f, "ss:d={d},e={e},f={ff},g={g}"),
            Genus3Curve::NHypA { a, c, e, r } => write!(f, "nhypa:a={a},c={c},e={e},r={r}"),
            Genus3Curve::NHypB { a, c, d, r } => write!(f, "nhypb:a={a},c={c},d={d},r={r}"),
        }
    }
}

impl Serialize for Genus3Curve {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Genus3Curve {
    /// Field-free: hex is read as-is; call [`Genus3Curve::checked`] against
    /// the intended field afterwards.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let t = Tagged::parse(&s).map_err(serde::de::Error::custom)?;
        let family: Family = t.tag.parse().map_err(serde::de::Error::custom)?;
        let keys: Vec<(String, Fe)> = s
            .split_once(':')
            .map(|(_, rest)| rest)
            .unwrap_or("")
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|item| {
                let (key, value) = item.split_once('=').unwrap_or((item, ""));
                Ok((key.trim().to_string(), Fe::parse_hex(value)?))
            })
            .collect::<Result<_>>()
            .map_err(serde::de::Error::custom)?;
        let get = |name: &str| {
            keys.iter()
                .find(|(k, _)| k == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| serde::de::Error::custom(format!("missing key {name}")))
        };
        Ok(match family {
            Family::HypA => Genus3Curve::HypA { a: get("a")?, r: get("r")?, t: get("t")? },
            Family::HypB => Genus3Curve::HypB { b: get("b")?, r: get("r")?, s: get("s")?, t: get("t")? },
            Family::Ss => Genus3Curve::Ss { d: get("d")?, e: get("e")?, f: get("f")?, g: get("g")? },
            Family::NHypA => Genus3Curve::NHypA { a: get("a")?, c: get("c")?, e: get("e")?, r: get("r")? },
            Family::NHypB => Genus3Curve::NHypB { a: get("a")?, c: get("c")?, d: get("d")?, r: get("r")? },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(bits: u32) -> Fe {
        Fe::from_bits(bits)
    }

    /// Serre-Weil: |#C - (q+1)| <= 3m.
    fn within_serre_weil(k: &Field, count: u64) -> bool {
        let m = crate::maximal::m_of(k.n()) as i64;
        (count as i64 - (k.q() as i64 + 1)).abs() <= 3 * m
    }

    #[test]
    fn validation_messages() {
        let k = Field::with_degree(3).unwrap();
        let c = Genus3Curve::HypA { a: Fe::ONE, r: Fe::ZERO, t: Fe::ONE };
        assert_eq!(c.validate(&k), vec![Violation("t ≠ 1")]);
        let c = Genus3Curve::NHypB { a: Fe::ONE, c: Fe::ONE, d: Fe::ONE, r: Fe::ZERO };
        assert!(c.validate(&k).is_empty());
        let c = Genus3Curve::NHypB { a: Fe::ONE, c: f(2), d: Fe::ZERO, r: Fe::ZERO };
        assert_eq!(c.validate(&k), vec![Violation("cd ≠ 0")]);
        let c = Genus3Curve::NHypB { a: Fe::ONE, c: Fe::ONE, d: Fe::ZERO, r: Fe::ZERO };
        assert_eq!(c.validate(&k), vec![Violation("cd ≠ 0"), Violation("c+d ≠ 1")]);
        let c = Genus3Curve::HypB { b: Fe::ONE, r: Fe::ZERO, s: k.r0(), t: k.r0() };
        assert_eq!(c.validate(&k), vec![Violation("s ≠ t")]);
        let c = Genus3Curve::NHypA { a: Fe::ONE, c: Fe::ONE, e: Fe::ZERO, r: Fe::ONE };
        assert_eq!(c.validate(&k), vec![Violation("a ≠ r")]);
        let c = Genus3Curve::Ss { d: Fe::ZERO, e: Fe::ZERO, f: Fe::ZERO, g: Fe::ONE };
        assert_eq!(c.validate(&k), vec![Violation("y³ + fy + g splits in k")]);
        let c = Genus3Curve::HypA { a: f(9), r: Fe::ZERO, t: f(2) };
        assert_eq!(c.validate(&k), vec![Violation("parameters in k")]);
        assert!(matches!(c.checked(&k), Err(Error::InvalidParameters(_))));
    }

    #[test]
    fn hypa_tuple_count_q8() {
        let k = Field::with_degree(3).unwrap();
        assert_eq!(Family::HypA.enumerate(&k).len(), 84);
    }

    #[test]
    fn counts_are_within_serre_weil_and_match_point_lists() {
        for n in [2, 3] {
            let k = Field::with_degree(n).unwrap();
            for fam in Family::ALL {
                for c in fam.enumerate(&k) {
                    let count = c.count_points(&k);
                    assert!(within_serre_weil(&k, count), "{c} has {count} points");
                    let pts = c.rational_points(&k);
                    assert_eq!(pts.len() as u64, count, "{c}");
                    assert!(pts.iter().all(|&p| c.contains(&k, p)));
                }
            }
        }
    }

    #[test]
    fn hyperelliptic_count_against_pair_scan() {
        // Affine pairs (x, y) with y^2 + y = f(x), plus the points over poles
        // and infinity counted by their local type.
        let k = Field::with_degree(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for fam in [Family::HypA, Family::HypB] {
            for _ in 0..50 {
                let c = fam.random(&k, &mut rng).unwrap();
                let mut affine = 0;
                for x in k.elements() {
                    if let Some(v) = c.as_rhs(&k, x) {
                        affine += k.elements().filter(|&y| k.square(y) + y == v).count() as u64;
                    }
                }
                let extra = match c {
                    Genus3Curve::HypA { .. } => 4,
                    Genus3Curve::HypB { r, .. } => {
                        k.elements().filter(|&y| k.square(y) + y == r).count() as u64
                    }
                    _ => unreachable!(),
                };
                assert_eq!(c.count_points(&k), affine + extra);
            }
        }
    }

    #[test]
    fn hypb_denominators_have_no_rational_roots() {
        for n in 1..=6 {
            let k = Field::with_degree(n).unwrap();
            for s in k.elements().filter(|&s| !k.in_as(s)) {
                assert!(k.elements().all(|x| !(k.square(x) + x + s).is_zero()));
            }
        }
    }

    #[test]
    fn involutions_preserve_points_and_square_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [2, 3, 4, 5] {
            let k = Field::with_degree(n).unwrap();
            for fam in Family::ALL {
                let curves: Vec<Genus3Curve> = if n <= 3 {
                    fam.enumerate(&k)
                } else {
                    (0..40).map(|_| fam.random(&k, &mut rng).unwrap()).collect()
                };
                for c in curves {
                    let rep = c.involutions(&k).unwrap();
                    let pts = c.rational_points(&k);
                    for m in &rep.maps {
                        let mut image: Vec<CurvePoint> = pts.iter().map(|&p| m.apply(&k, p)).collect();
                        for &p in &pts {
                            assert_eq!(m.apply(&k, m.apply(&k, p)), p, "{c}");
                        }
                        image.sort();
                        assert_eq!(image, pts, "{c}: involution does not permute C(k)");
                    }
                }
            }
        }
    }

    #[test]
    fn hypa_fixed_points_sit_over_sqrt_t() {
        let k = Field::with_degree(3).unwrap();
        for c in Family::HypA.enumerate(&k) {
            let Genus3Curve::HypA { a, r, t } = c else { unreachable!() };
            let rep = c.involutions(&k).unwrap();
            let root = k.sqrt(t);
            for fixed in &rep.fixed {
                assert_eq!(fixed, &rep.fixed[0], "fixed points coincide");
                for p in fixed {
                    assert_eq!(*p, CurvePoint::Hyp { x: Some(root), y: p_y(p) });
                }
            }
            // y^2 + y = a(t+1) + r over sqrt(t).
            let expected = k.solve_as(k.mul(a, t + Fe::ONE) + r).map_or(0, |_| 2);
            assert_eq!(rep.fixed[0].len(), expected);
        }
    }

    fn p_y(p: &CurvePoint) -> Option<Fe> {
        match p {
            CurvePoint::Hyp { y, .. } => *y,
            _ => None,
        }
    }

    #[test]
    fn hypb_fixed_points_are_at_infinity() {
        let k = Field::with_degree(3).unwrap();
        for c in Family::HypB.enumerate(&k) {
            let rep = c.involutions(&k).unwrap();
            for fixed in &rep.fixed {
                assert!(fixed.iter().all(|p| matches!(p, CurvePoint::Hyp { x: None, .. })));
                assert_eq!(fixed, &rep.fixed[0]);
            }
        }
    }

    #[test]
    fn nhypb_fixed_points_on_the_diagonal() {
        for n in [3, 4] {
            let k = Field::with_degree(n).unwrap();
            for c in Family::NHypB.enumerate(&k) {
                let Genus3Curve::NHypB { c: cc, d, .. } = c else { unreachable!() };
                let rep = c.involutions(&k).unwrap();
                let cd = k.mul(cc, d);
                let expected = if k.in_as(cd) { 2 } else { 0 };
                for fixed in &rep.fixed {
                    assert_eq!(fixed, &rep.fixed[0], "{c}");
                    assert_eq!(fixed.len(), expected, "{c}");
                    for p in fixed {
                        let CurvePoint::Plane([x, y, z]) = *p else { unreachable!() };
                        assert_eq!((x, z), (y, Fe::ONE));
                        // In the d-scaled coordinate X = d x: X^2 + X = cd.
                        let big = k.mul(d, x);
                        assert_eq!(k.square(big) + big, cd);
                    }
                }
            }
        }
    }

    #[test]
    fn nhypa_fixed_point_sets_are_disjoint() {
        let k = Field::with_degree(3).unwrap();
        for c in Family::NHypA.enumerate(&k) {
            let rep = c.involutions(&k).unwrap();
            for i in 0..3 {
                assert!(rep.fixed[i].len() <= 2);
                for j in 0..i {
                    assert!(rep.fixed[i].iter().all(|p| !rep.fixed[j].contains(p)), "{c}");
                }
            }
        }
    }

    #[test]
    fn overlap_family_counts_agree() {
        // NHypB with d = 1 is NHypA with e = c.
        for n in [2, 3, 4] {
            let k = Field::with_degree(n).unwrap();
            for c in Family::NHypB.enumerate(&k) {
                let Genus3Curve::NHypB { a, c: cc, d, r } = c else { unreachable!() };
                if d != Fe::ONE {
                    continue;
                }
                let other = Genus3Curve::NHypA { a, c: cc, e: cc, r }.checked(&k).unwrap();
                assert_eq!(c.quartic(&k), other.quartic(&k));
                assert_eq!(c.count_points(&k), other.count_points(&k));
            }
        }
    }

    #[test]
    fn klein_quartic_is_smooth() {
        let k = Field::with_degree(3).unwrap();
        let klein = Genus3Curve::NHypA { a: Fe::ONE, c: Fe::ONE, e: Fe::ONE, r: Fe::ZERO };
        assert_eq!(klein.smoothness_spotcheck(&k, 1).unwrap(), None);
        assert_eq!(klein.smoothness_spotcheck(&k, 2).unwrap(), None);
        // Klein's quartic has 24 points over GF(8).
        assert_eq!(klein.count_points(&k), 24);
    }

    #[test]
    fn smoothness_gating_and_random_checks() {
        let k = Field::with_degree(2).unwrap();
        let bad = Genus3Curve::NHypA { a: Fe::ONE, c: Fe::ONE, e: Fe::ZERO, r: Fe::ONE };
        assert!(matches!(bad.smoothness_spotcheck(&k, 1), Err(Error::InvalidParameters(_))));
        let hyp = Genus3Curve::HypA { a: Fe::ONE, r: Fe::ZERO, t: f(2) };
        assert!(hyp.smoothness_spotcheck(&k, 1).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for fam in [Family::Ss, Family::NHypA, Family::NHypB] {
            for _ in 0..10 {
                let c = fam.random(&k, &mut rng).unwrap();
                assert_eq!(c.smoothness_spotcheck(&k, 2).unwrap(), None, "{c}");
            }
        }
        let k8 = Field::with_degree(3).unwrap();
        for fam in [Family::Ss, Family::NHypA, Family::NHypB] {
            for c in fam.enumerate(&k8) {
                assert_eq!(c.smoothness_spotcheck(&k8, 1).unwrap(), None, "{c}");
            }
        }
        let big = Field::with_degree(7).unwrap();
        let c = Family::NHypB.random(&big, &mut rng).unwrap();
        assert!(c.smoothness_spotcheck(&big, 2).is_err());
    }

    #[test]
    fn serialization_round_trip() {
        let k = Field::with_degree(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for fam in Family::ALL {
            for _ in 0..20 {
                let c = fam.random(&k, &mut rng).unwrap();
                let s = c.to_string();
                assert!(s.starts_with(fam.tag()));
                assert_eq!(Genus3Curve::parse(&k, &s).unwrap(), c);
                let json = serde_json::to_string(&c).unwrap();
                assert_eq!(serde_json::from_str::<Genus3Curve>(&json).unwrap(), c);
            }
        }
        assert_eq!(
            Genus3Curve::HypA { a: f(1), r: f(0), t: f(0xa) }.to_string(),
            "hypa:a=1,r=0,t=a"
        );
        assert!(Genus3Curve::parse(&k, "hypa:a=1,r=0,t=1").is_err());
        assert!(Genus3Curve::parse(&k, "foo:a=1").is_err());
    }
}
