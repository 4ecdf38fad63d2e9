//! Elliptic quotients `E_i = C / <i_i>` of the five families, and the point
//! count identity `#C(k) = q + 1 - (tr E_1 + tr E_2 + tr E_3)`.

use serde::Serialize;

use crate::ec::{EllipticCurve, OrdinaryCurve, SupersingularCurve};
use crate::error::{Error, Result};
use crate::genus3::Genus3Curve;
use crate::gf2::{Fe, Field};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EllipticTriple {
    pub e1: EllipticCurve,
    pub e2: EllipticCurve,
    pub e3: EllipticCurve,
}

impl EllipticTriple {
    pub fn curves(&self) -> [EllipticCurve; 3] {
        [self.e1, self.e2, self.e3]
    }

    /// The three curves as ordinary models, if they are.
    pub fn ordinary(&self) -> Option<[OrdinaryCurve; 3]> {
        let pick = |e: EllipticCurve| match e {
            EllipticCurve::Ordinary(o) => Some(o),
            EllipticCurve::Supersingular(_) => None,
        };
        Some([pick(self.e1)?, pick(self.e2)?, pick(self.e3)?])
    }

    pub fn traces(&self, k: &Field) -> [i64; 3] {
        self.curves().map(|e| e.trace(k))
    }

    pub fn trace_sum(&self, k: &Field) -> i64 {
        self.traces(k).iter().sum()
    }
}

fn ord(r: Fe, a: Fe) -> EllipticCurve {
    EllipticCurve::Ordinary(OrdinaryCurve { r, a })
}

/// The quotient triple `(E_1, E_2, E_3)` of a valid curve.
pub fn quotients_of(k: &Field, c: &Genus3Curve) -> Result<EllipticTriple> {
    c.checked(k)?;
    let p4 = |x: Fe| k.pow(x, 4);
    let div = |x: Fe, y: Fe| k.div(x, y);
    let (e1, e2, e3) = match *c {
        Genus3Curve::HypA { a, r, t } => {
            let at1 = k.mul(a, t + Fe::ONE);
            let x2 = r + at1;
            (ord(x2, p4(at1)), ord(x2, p4(k.mul(a, t))), ord(x2, p4(a)))
        }
        Genus3Curve::HypB { b, r, s, t } => {
            let u = k
                .solve_as(s + t)
                .ok_or_else(|| Error::Inconsistency("u(u+1) = s+t has no solution".into()))?;
            let (u4, u14, b4) = (p4(u), p4(u + Fe::ONE), p4(b));
            let r1 = r + k.r0();
            (
                ord(r, div(b4, k.mul(u4, u14))?),
                ord(r1, div(k.mul(b4, u4), u14)?),
                ord(r1, div(k.mul(b4, u14), u4)?),
            )
        }
        Genus3Curve::Ss { d, e, f, g } => {
            let v = k.cubic_roots(f, g);
            let ss = |vi: Fe| -> Result<EllipticCurve> {
                Ok(EllipticCurve::Supersingular(SupersingularCurve { lambda: div(g, vi)?, d, e }))
            };
            (ss(v[0])?, ss(v[1])?, ss(v[2])?)
        }
        Genus3Curve::NHypA { a, c, e, r } => {
            let aa = k.square(a + r);
            let bb = k.square(a + c + e + r);
            let cc = k.square(c);
            (ord(e, k.mul(aa, bb)), ord(e + r, k.mul(cc, bb)), ord(e + r, k.mul(cc, aa)))
        }
        Genus3Curve::NHypB { a, c, d, r } => {
            let p = p4(a + k.mul(d, r));
            let x2 = k.square(k.mul(c, d));
            (
                ord(x2, k.mul(p4(d), p)),
                ord(x2 + r, k.mul(p4(c), p)),
                ord(x2 + r, k.mul(p4(c + d + Fe::ONE), p)),
            )
        }
    };
    Ok(EllipticTriple { e1, e2, e3 })
}

/// Outcome of checking the point count identity on one curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsogenyReport {
    pub curve: Genus3Curve,
    pub triple: EllipticTriple,
    pub count: u64,
    pub trace_sum: i64,
    pub ok: bool,
}

pub fn verify_isogeny(k: &Field, c: &Genus3Curve) -> Result<IsogenyReport> {
    let triple = quotients_of(k, c)?;
    let count = c.count_points(k);
    let trace_sum = triple.trace_sum(k);
    Ok(IsogenyReport {
        curve: *c,
        triple,
        count,
        trace_sum,
        ok: count as i64 == k.q() as i64 + 1 - trace_sum,
    })
}
