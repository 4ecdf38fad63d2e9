//! Deciding whether a triple of elliptic curves is covered by one of the five
//! families, and building the covering curve when it is.

use rayon::prelude::*;
use serde::Serialize;

use crate::ec::OrdinaryCurve;
use crate::error::{Error, Result};
use crate::genus3::{Family, Genus3Curve};
use crate::gf2::{Fe, Field};
use crate::quotients::quotients_of;

/// Largest field for the supersingular cover search.
pub const SS_SEARCH_MAX_Q: u64 = 1 << 13;

/// `(j, sgn)` of three ordinary curves and the derived obstruction elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TripleInvariants {
    pub j: [Fe; 3],
    pub sgn: [Fe; 3],
    pub sgn_sum: Fe,
    /// `(j1 + j2 + j3)^2 / (j1 j2 j3)`.
    pub ta: Fe,
    /// `j1 j2 j3^2 / (j1 j2 + j1 j3 + j2 j3)^2`, absent when the
    /// denominator vanishes.
    pub tb: Option<Fe>,
}

impl TripleInvariants {
    pub fn from_pairs(k: &Field, pairs: [(Fe, Fe); 3]) -> Result<TripleInvariants> {
        for (j, sgn) in pairs {
            if !k.contains(j) || !k.contains(sgn) {
                return Err(Error::Precondition("invariant outside the field".into()));
            }
            if j.is_zero() {
                return Err(Error::Precondition("ordinary triple needs j != 0".into()));
            }
            if !(sgn.is_zero() || sgn == k.r0()) {
                return Err(Error::Precondition(format!("signature {sgn} not in {{0, r0}}")));
            }
        }
        let j = pairs.map(|p| p.0);
        let sgn = pairs.map(|p| p.1);
        let prod = k.mul(k.mul(j[0], j[1]), j[2]);
        let ta = k.div(k.square(j[0] + j[1] + j[2]), prod)?;
        let e2 = k.mul(j[0], j[1]) + k.mul(j[0], j[2]) + k.mul(j[1], j[2]);
        let tb = k
            .div(k.mul(k.mul(j[0], j[1]), k.square(j[2])), k.square(e2))
            .ok();
        Ok(TripleInvariants { j, sgn, sgn_sum: sgn[0] + sgn[1] + sgn[2], ta, tb })
    }

    /// `1/j1 + 1/j2 + 1/j3 = 0`.
    pub fn hyp_condition(&self, k: &Field) -> bool {
        self.j
            .iter()
            .fold(Fe::ZERO, |acc, &j| acc + k.inv(j).expect("j != 0"))
            .is_zero()
    }

    /// `Ta ∈ sgn + AS(k)`.
    pub fn ta_condition(&self, k: &Field) -> bool {
        k.in_as(self.ta + self.sgn_sum)
    }

    /// `Tb ∈ sgn + AS(k)`; false when `Tb` is undefined.
    pub fn tb_condition(&self, k: &Field) -> bool {
        self.tb.is_some_and(|tb| k.in_as(tb + self.sgn_sum))
    }

    pub fn nonhyp_condition(&self, k: &Field) -> bool {
        self.ta_condition(k) || self.tb_condition(k)
    }

    /// The same triple with input `perm[i]` in position `i`.
    pub fn permuted(&self, k: &Field, perm: [usize; 3]) -> TripleInvariants {
        TripleInvariants::from_pairs(k, perm.map(|i| (self.j[i], self.sgn[i])))
            .expect("permutation of a valid triple")
    }

    fn pairs(&self) -> [(Fe, Fe); 3] {
        [0, 1, 2].map(|i| (self.j[i], self.sgn[i]))
    }
}

pub fn triple_invariants(k: &Field, curves: &[OrdinaryCurve; 3]) -> Result<TripleInvariants> {
    TripleInvariants::from_pairs(k, curves.map(|e| (e.j_invariant(k), e.signature(k))))
}

/// A covering curve; quotient `E_i` of `curve` matches input `permutation[i]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CoverWitness {
    pub curve: Genus3Curve,
    pub family: Family,
    pub permutation: [usize; 3],
}

/// A permutation placing two inputs with equal signature last.
fn odd_one_first(sgn: [Fe; 3]) -> [usize; 3] {
    if sgn[1] == sgn[2] {
        [0, 1, 2]
    } else if sgn[0] == sgn[2] {
        [1, 0, 2]
    } else {
        [2, 0, 1]
    }
}

/// Matches each quotient to an unused input with the same key.
fn match_keys<T: PartialEq + Copy>(found: [T; 3], wanted: [T; 3]) -> Option<[usize; 3]> {
    let mut used = [false; 3];
    let mut perm = [0; 3];
    for (i, f) in found.iter().enumerate() {
        let idx = (0..3).find(|&j| !used[j] && wanted[j] == *f)?;
        used[idx] = true;
        perm[i] = idx;
    }
    Some(perm)
}

fn ordinary_witness(k: &Field, curve: Genus3Curve, t: &TripleInvariants) -> Result<CoverWitness> {
    let es = quotients_of(k, &curve)?
        .ordinary()
        .ok_or_else(|| Error::Inconsistency(format!("{curve} has supersingular quotients")))?;
    let found = es.map(|e| (e.j_invariant(k), e.signature(k)));
    let permutation = match_keys(found, t.pairs()).ok_or_else(|| {
        Error::Inconsistency(format!("quotients of {curve} do not reproduce the input triple"))
    })?;
    Ok(CoverWitness { curve, family: curve.family(), permutation })
}

/// A hyperelliptic cover, which exists iff `1/j1 + 1/j2 + 1/j3 = 0`.
pub fn exists_hyp_cover(k: &Field, t: &TripleInvariants) -> Result<Option<CoverWitness>> {
    if !t.hyp_condition(k) {
        return Ok(None);
    }
    if k.q() <= 2 {
        return Err(Error::FieldTooSmall);
    }
    let p = odd_one_first(t.sgn);
    let [(j1, sgn1), (j2, _), (j3, _)] = p.map(|i| (t.j[i], t.sgn[i]));
    let curve = if t.sgn[0] == t.sgn[1] && t.sgn[1] == t.sgn[2] {
        let a = k.root4(k.inv(j3)?);
        let tt = k.root4(k.div(j3, j2)?);
        let x2 = k.mul(a, tt + Fe::ONE);
        let r = if k.trace(x2) == k.trace(sgn1) { Fe::ZERO } else { k.r0() };
        Genus3Curve::HypA { a, r, t: tt }
    } else {
        let b = k.root8(k.inv(k.mul(j2, j3))?);
        let u = k.root8(k.div(j1, j2)?);
        let s = smallest_non_as(k);
        Genus3Curve::HypB { b, r: sgn1, s, t: s + u + k.square(u) }
    };
    ordinary_witness(k, curve.checked(k)?, t).map(Some)
}

fn smallest_non_as(k: &Field) -> Fe {
    k.elements().find(|&s| k.trace(s)).expect("trace is onto")
}

/// A non-hyperelliptic cover, which exists iff `Ta` or `Tb` lies in
/// `sgn + AS(k)`. The `NHypA` construction is tried first.
pub fn exists_nonhyp_cover(k: &Field, t: &TripleInvariants) -> Result<Option<CoverWitness>> {
    if !t.nonhyp_condition(k) {
        return Ok(None);
    }
    if k.q() <= 2 {
        return Err(Error::FieldTooSmall);
    }
    let p = odd_one_first(t.sgn);
    let s = p.map(|i| k.root4(k.inv(t.j[i]).expect("j != 0")));
    let [s1, s2, s3] = s;
    let all_equal = t.sgn.iter().all(|&x| x == t.sgn[0]);
    let r = if all_equal { Fe::ZERO } else { k.r0() };
    let q = |x: Fe, y: Fe, z: Fe| k.div(k.mul(x, y), z).expect("s_i != 0");
    let curve = if t.ta_condition(k) {
        let e = q(s1, s2, s3) + q(s2, s3, s1) + q(s1, s3, s2);
        Genus3Curve::NHypA { a: q(s1, s3, s2) + r, c: q(s3, s2, s1), e, r }
    } else {
        let sum = s1 + s2 + s3;
        let c = k.div(s2, sum)?;
        let d = k.div(s1, sum)?;
        Genus3Curve::NHypB { a: sum + k.mul(d, r), c, d, r }
    };
    ordinary_witness(k, curve.checked(k)?, t).map(Some)
}

/// Sum over `x` of `(-1)^tr((x^3 + d x^2) / λ^2)`. The supersingular curve
/// `y^2 + λy = x^3 + dx^2 + e` has trace `-(-1)^tr(e/λ^2) S(λ, d)`.
fn character_sum(k: &Field, lambda: Fe, d: Fe) -> i64 {
    let l2 = k.inv(k.square(lambda)).expect("λ != 0");
    k.elements()
        .map(|x| {
            let v = k.mul(k.mul(k.square(x), x + d), l2);
            if k.trace(v) {
                -1
            } else {
                1
            }
        })
        .sum()
}

fn sorted3(mut v: [i64; 3]) -> [i64; 3] {
    v.sort_unstable();
    v
}

/// Searches the `SS` family for a curve whose quotients have the given
/// multiset of traces. Parameters are scanned in lexicographic order of
/// `(f, g, d, e)`; the first match is returned.
pub fn exists_ss_cover(k: &Field, traces: [i64; 3]) -> Result<Option<CoverWitness>> {
    if k.q() > SS_SEARCH_MAX_Q {
        return Err(Error::SearchBudget { q: k.q(), max: SS_SEARCH_MAX_Q });
    }
    if traces.iter().any(|t| t % 2 != 0) {
        return Ok(None);
    }
    let target = sorted3(traces);
    let abs_target = sorted3(traces.map(i64::abs));
    let pairs: Vec<(Fe, Fe)> = k
        .elements()
        .flat_map(|f| k.nonzero().map(move |g| (f, g)))
        .collect();
    let rows: Vec<std::sync::OnceLock<Vec<i64>>> =
        (0..k.q()).map(|_| std::sync::OnceLock::new()).collect();
    let row = |lambda: Fe| -> &Vec<i64> {
        rows[lambda.bits() as usize]
            .get_or_init(|| k.elements().map(|d| character_sum(k, lambda, d)).collect())
    };
    let found = pairs.par_iter().find_map_first(|&(f, g)| {
        let v = k.cubic_roots(f, g);
        if v.len() != 3 {
            return None;
        }
        let lambdas = [0, 1, 2].map(|i| k.div(g, v[i]).expect("roots of y^3+fy+g are nonzero"));
        let inv_l2 = lambdas.map(|l| k.inv(k.square(l)).expect("λ != 0"));
        let sums = lambdas.map(row);
        for d in k.elements() {
            let s = [0, 1, 2].map(|i| sums[i][d.bits() as usize]);
            if sorted3(s.map(i64::abs)) != abs_target {
                continue;
            }
            for e in k.elements() {
                let tr = [0, 1, 2].map(|i| if k.trace(k.mul(e, inv_l2[i])) { s[i] } else { -s[i] });
                if sorted3(tr) == target {
                    return Some((Genus3Curve::Ss { d, e, f, g }, tr));
                }
            }
        }
        None
    });
    let Some((curve, tr)) = found else {
        return Ok(None);
    };
    let actual = quotients_of(k, &curve)?.traces(k);
    if actual != tr {
        return Err(Error::Inconsistency(format!("character sums disagree with counts on {curve}")));
    }
    let permutation = match_keys(actual, traces)
        .ok_or_else(|| Error::Inconsistency(format!("{curve} does not reproduce {traces:?}")))?;
    Ok(Some(CoverWitness { curve, family: Family::Ss, permutation }))
}
