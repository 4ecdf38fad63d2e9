//! Genus-3 curves with many points over nonsquare `q = 2^n`.
//!
//! With `m = floor(2 sqrt q)`, a genus-3 curve has at most `q + 1 + 3m`
//! points; the defect of `C` is `q + 1 + 3m - #C(k)`. Curves of defect 0
//! or 3 are built as non-hyperelliptic covers of `(E, E, E)` for an
//! ordinary `E` of trace `-m` or `-m + 1`.

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::covers::{exists_nonhyp_cover, triple_invariants};
use crate::ec::{EllipticModel, OrdinaryCurve};
use crate::error::{Error, Result};
use crate::genus3::Genus3Curve;
use crate::gf2::{Fe, Field};

/// Largest `n` for which reports carry a counted witness curve.
pub const WITNESS_MAX_N: u32 = 13;

/// Longest supported `m_n` sequence.
pub const M_SEQUENCE_MAX: u32 = 200;

/// `floor(2 sqrt(2^n))`, the integer square root of `4q`.
pub fn m_of(n: u32) -> u64 {
    u64::try_from(isqrt_pow2(n + 2)).expect("n <= 60")
}

fn isqrt_pow2(e: u32) -> BigUint {
    (BigUint::from(1u8) << e as usize).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    #[serde(rename = "exact-defect-0")]
    ExactDefect0,
    #[serde(rename = "exact-defect-3")]
    ExactDefect3,
    LowerBoundOnly,
    NotCovered,
    KnownSmallCase,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::ExactDefect0 => "exact-defect-0",
            Status::ExactDefect3 => "exact-defect-3",
            Status::LowerBoundOnly => "lower-bound-only",
            Status::NotCovered => "not-covered",
            Status::KnownSmallCase => "known-small-case",
        }
    }
}

/// `N_q(3)`, exactly or as an interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Nq3 {
    Exact(u64),
    Interval([u64; 2]),
}

impl Nq3 {
    pub fn bounds(self) -> (u64, u64) {
        match self {
            Nq3::Exact(v) => (v, v),
            Nq3::Interval([lo, hi]) => (lo, hi),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaximalReport {
    pub n: u32,
    pub q: u64,
    pub m: u64,
    pub m_mod8: u64,
    pub frac_below_threshold: Option<bool>,
    pub status: Status,
    pub nq3: Option<Nq3>,
    pub witness: Option<Genus3Curve>,
    pub count: Option<u64>,
}

impl MaximalReport {
    pub const CSV_HEADER: &'static str = "n,q,m,class,status,nq3_lo,nq3_hi,witness";

    pub fn csv_row(&self) -> String {
        let (lo, hi) = self
            .nq3
            .map(|v| v.bounds())
            .map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
        let witness = self.witness.map(|w| format!("\"{w}\"")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.q,
            self.m,
            self.m_mod8,
            self.status.as_str(),
            lo,
            hi,
            witness
        )
    }

    fn base(n: u32, status: Status) -> MaximalReport {
        let m = m_of(n);
        MaximalReport {
            n,
            q: 1 << n,
            m,
            m_mod8: m % 8,
            frac_below_threshold: None,
            status,
            nq3: None,
            witness: None,
            count: None,
        }
    }
}

/// The first ordinary curve `y^2 + xy = x^3 + sgn x^2 + 1/j` with the given
/// trace, scanning `j` upward. `sgn` is fixed by the trace modulo 4.
pub fn find_curve_with_trace(k: &Field, target: i64) -> Result<OrdinaryCurve> {
    if target.rem_euclid(2) == 0 {
        return Err(Error::Precondition(format!("ordinary traces are odd, got {target}")));
    }
    let m = m_of(k.n()) as i64;
    if target.abs() > m {
        return Err(Error::Precondition(format!("|{target}| exceeds floor(2 sqrt q) = {m}")));
    }
    if k.q() <= 2 {
        return Err(Error::FieldTooSmall);
    }
    let sgn = if target.rem_euclid(4) == 1 { Fe::ZERO } else { k.r0() };
    let js: Vec<Fe> = k.nonzero().collect();
    js.par_iter()
        .find_map_first(|&j| {
            let e = OrdinaryCurve::from_invariants(k, j, sgn).expect("j != 0");
            (e.trace(k) == target).then_some(e)
        })
        .ok_or(Error::NoCurveWithTrace { target, q: k.q() })
}

/// A counted witness of defect 0 or 3.
struct Construction {
    curve: Genus3Curve,
    count: u64,
}

fn check_nonsquare(n: u32) -> Result<()> {
    if n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("q = 2^{n} is a square")));
    }
    if n == 1 {
        return Err(Error::FieldTooSmall);
    }
    if n > 30 {
        return Err(Error::DegreeOutOfRange { n, max: 30 });
    }
    Ok(())
}

/// The explicit quartic over `E^3`, cross-checked against the general cover
/// construction.
fn construct(n: u32, defect: u64) -> Result<Construction> {
    let k = Field::with_degree(n)?;
    let m = m_of(n);
    let target = -(m as i64) + if defect == 0 { 0 } else { 1 };
    let e = find_curve_with_trace(&k, target)?;
    let s = k.root4(e.a);
    let curve = match m % 8 {
        1 | 2 | 5 | 6 => Genus3Curve::NHypB { a: s, c: Fe::ONE, d: Fe::ONE, r: Fe::ZERO },
        0 | 7 => Genus3Curve::NHypA { a: s, c: s, e: s, r: Fe::ZERO },
        _ => unreachable!("residue checked by caller"),
    }
    .checked(&k)?;
    let expected = k.q() + 1 + 3 * m - defect;
    let count = curve.count_points(&k);
    let t = triple_invariants(&k, &[e, e, e])?;
    let general = exists_nonhyp_cover(&k, &t)?
        .ok_or_else(|| Error::Inconsistency(format!("no cover of {e}^3")))?;
    let general_count = general.curve.count_points(&k);
    if count != expected || general_count != expected {
        return Err(Error::Inconsistency(format!(
            "{curve} has {count} points and {} has {general_count}, expected {expected}",
            general.curve
        )));
    }
    Ok(Construction { curve, count })
}

fn construct_report(n: u32, defect: u64, classes: &[u64]) -> Result<MaximalReport> {
    check_nonsquare(n)?;
    let m = m_of(n);
    if matches!(m % 8, 3 | 4) {
        return Ok(MaximalReport::base(n, Status::NotCovered));
    }
    if !classes.contains(&(m % 8)) {
        return Err(Error::Precondition(format!(
            "m = {m} ≡ {} (mod 8) is not in {classes:?}",
            m % 8
        )));
    }
    let c = construct(n, defect)?;
    let status = if defect == 0 { Status::ExactDefect0 } else { Status::ExactDefect3 };
    let mut report = MaximalReport::base(n, status);
    if defect == 3 {
        report.frac_below_threshold = Some(frac_below_threshold(n));
    }
    report.nq3 = Some(Nq3::Exact(c.count));
    report.witness = Some(c.curve);
    report.count = Some(c.count);
    Ok(report)
}

/// A defect-0 curve for `m ≡ 1, 5, 7 (mod 8)`.
pub fn construct_defect0(n: u32) -> Result<MaximalReport> {
    construct_report(n, 0, &[1, 5, 7])
}

/// A defect-3 curve for `m ≡ 0, 2, 6 (mod 8)`. The report's `nq3` is the
/// count of the witness.
pub fn construct_defect3(n: u32) -> Result<MaximalReport> {
    construct_report(n, 3, &[0, 2, 6])
}

/// A curve with `q + 1 - 3m` points, covering `E^3` for `E` of trace `m`.
/// Exists for `m ≡ 1, 3, 7 (mod 8)`.
pub fn construct_minimal(n: u32) -> Result<Option<(Genus3Curve, u64)>> {
    check_nonsquare(n)?;
    let k = Field::with_degree(n)?;
    let m = m_of(n);
    if m.is_multiple_of(2) {
        return Ok(None);
    }
    let e = find_curve_with_trace(&k, m as i64)?;
    let t = triple_invariants(&k, &[e, e, e])?;
    Ok(exists_nonhyp_cover(&k, &t)?.map(|w| (w.curve, w.curve.count_points(&k))))
}

/// `N_q(3)` for nonsquare `q = 2^n`.
pub fn nq3(n: u32) -> Result<MaximalReport> {
    if n == 1 {
        let mut r = MaximalReport::base(1, Status::KnownSmallCase);
        r.nq3 = Some(Nq3::Exact(7));
        return Ok(r);
    }
    check_nonsquare(n)?;
    let m = m_of(n);
    let q = 1u64 << n;
    let with_witness = n <= WITNESS_MAX_N;
    match m % 8 {
        1 | 5 | 7 => {
            if with_witness {
                return construct_defect0(n);
            }
            let mut r = MaximalReport::base(n, Status::ExactDefect0);
            r.nq3 = Some(Nq3::Exact(q + 1 + 3 * m));
            Ok(r)
        }
        0 | 2 | 6 => {
            let below = frac_below_threshold(n);
            let mut r = if with_witness {
                construct_defect3(n)?
            } else {
                MaximalReport::base(n, Status::ExactDefect3)
            };
            r.frac_below_threshold = Some(below);
            let lo = q + 1 + 3 * m - 3;
            if below {
                r.nq3 = Some(Nq3::Exact(lo));
            } else {
                r.status = Status::LowerBoundOnly;
                r.nq3 = Some(Nq3::Interval([lo, q + 1 + 3 * m]));
            }
            Ok(r)
        }
        _ => Ok(MaximalReport::base(n, Status::NotCovered)),
    }
}

/// `8 f(p / 2^k) 2^(3k)` for `f = x^3 + x^2 - 2x - 1`.
fn scaled_cubic(p: &BigInt, k: usize) -> BigInt {
    let one = BigInt::from(1) << k;
    p * p * p + p * p * &one - BigInt::from(2) * p * &one * &one - &one * &one * &one
}

/// Dyadic bracket `[lo, hi] / 2^k` of the root of `x^3 + x^2 - 2x - 1` in
/// `[-2, -3/2]`, which is `2 cos(6π/7)`.
#[derive(Clone, Debug)]
struct RootBracket {
    lo: BigInt,
    hi: BigInt,
    k: usize,
}

impl RootBracket {
    fn new() -> RootBracket {
        RootBracket { lo: BigInt::from(-4), hi: BigInt::from(-3), k: 1 }
    }

    /// Halves the bracket; `f` is negative at `lo` and positive at `hi`.
    fn refine(&mut self) {
        self.lo <<= 1;
        self.hi <<= 1;
        self.k += 1;
        let mid = (&self.lo + &self.hi) / 2;
        if scaled_cubic(&mid, self.k) < BigInt::from(0) {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }
}

/// Whether `{2 sqrt q} < 1 - 4 cos^2(3π/7)`.
///
/// The threshold is `-1 - ρ` with `ρ = 2 cos(6π/7)`, so the test reads
/// `sqrt(4q) < m - 1 - ρ`, decided by squaring against a shrinking bracket
/// of `ρ`. Both sides are irrational, so the loop terminates.
pub fn frac_below_threshold(n: u32) -> bool {
    let m = BigInt::from(isqrt_pow2(n + 2));
    let mut b = RootBracket::new();
    for _ in 0..20 {
        b.refine();
    }
    loop {
        let scale = BigInt::from(1) << b.k;
        let four_q = BigInt::from(1) << (n as usize + 2 + 2 * b.k);
        let m1 = &m - 1;
        let small = &m1 * &scale - &b.hi;
        let large = &m1 * &scale - &b.lo;
        if four_q < &small * &small {
            return true;
        }
        if four_q >= &large * &large {
            return false;
        }
        b.refine();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MSeqEntry {
    pub n: u32,
    #[serde(serialize_with = "as_decimal")]
    pub m_n: BigUint,
    pub eps_half: bool,
    pub residue4: u8,
}

fn as_decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MSequence {
    pub entries: Vec<MSeqEntry>,
    pub residue1: usize,
    pub residue2: usize,
}

/// `m_n = floor(2 sqrt(2^(2n-1)))` for `n = 1..=count`, checked against
/// `m_(n+1) = 2 m_n + [eps_n > 1/2]`.
pub fn m_sequence(count: u32) -> Result<MSequence> {
    if count == 0 || count > M_SEQUENCE_MAX {
        return Err(Error::Precondition(format!("count {count} outside 1..={M_SEQUENCE_MAX}")));
    }
    let mut entries: Vec<MSeqEntry> = Vec::with_capacity(count as usize);
    for n in 1..=count {
        let square = BigUint::from(1u8) << (2 * n as usize + 1);
        let m_n = isqrt_pow2(2 * n + 1);
        if &m_n * &m_n == square {
            return Err(Error::Inconsistency(format!("2^{} is a perfect square", 2 * n + 1)));
        }
        let twice = &m_n * 2u8 + 1u8;
        let eps_half = (square << 2) > &twice * &twice;
        let residue4 = u8::try_from(&m_n % 4u8).expect("< 4");
        if let Some(prev) = entries.last() {
            let expected = &prev.m_n * 2u8 + u8::from(prev.eps_half);
            if expected != m_n {
                return Err(Error::Inconsistency(format!("recurrence fails at n = {n}")));
            }
        }
        entries.push(MSeqEntry { n, m_n, eps_half, residue4 });
    }
    let residue1 = entries.iter().filter(|e| e.residue4 == 1).count();
    let residue2 = entries.iter().filter(|e| e.residue4 == 2).count();
    Ok(MSequence { entries, residue1, residue2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_shapes_cover_cubes() {
        let mut hits = [0; 2];
        for n in [3, 5, 7] {
            let k = Field::with_degree(n).unwrap();
            for r in [Fe::ZERO, k.r0()] {
                for a in k.nonzero() {
                    let e = OrdinaryCurve::new(&k, r, a).unwrap();
                    let want = (k.q() as i64 + 1 - 3 * e.trace(&k)) as u64;
                    let s = k.root4(a);
                    if k.trace(s) == k.trace(r) {
                        let c = Genus3Curve::NHypA { a: s, c: s, e: s, r: Fe::ZERO };
                        assert_eq!(c.checked(&k).unwrap().count_points(&k), want, "{c} over {e}");
                        hits[0] += 1;
                    }
                    if k.trace(Fe::ONE) == k.trace(r) {
                        let c = Genus3Curve::NHypB { a: s, c: Fe::ONE, d: Fe::ONE, r: Fe::ZERO };
                        assert_eq!(c.checked(&k).unwrap().count_points(&k), want, "{c} over {e}");
                        hits[1] += 1;
                    }
                }
            }
        }
        assert!(hits[0] > 0 && hits[1] > 0);
    }

    #[test]
    fn m_values() {
        assert_eq!(m_of(1), 2);
        assert_eq!(m_of(3), 5);
        assert_eq!(m_of(7), 22);
        for n in 1..40 {
            let m = m_of(n);
            assert!(m * m <= 4 << n && (m + 1) * (m + 1) > 4 << n);
        }
    }

    #[test]
    fn threshold_bracket() {
        let mut b = RootBracket::new();
        for _ in 0..40 {
            b.refine();
        }
        let scale = (b.k as f64).exp2();
        let lo = -1.0 - b.hi.to_string().parse::<f64>().unwrap() / scale;
        let hi = -1.0 - b.lo.to_string().parse::<f64>().unwrap() / scale;
        let theta = 1.0 - 4.0 * (3.0 * std::f64::consts::PI / 7.0).cos().powi(2);
        assert!(lo <= theta + 1e-12 && theta - 1e-12 <= hi);
        assert!(0.801937 < lo && hi < 0.801938);
    }

    #[test]
    fn threshold_test_matches_floating_point_away_from_the_edge() {
        let theta = 1.0 - 4.0 * (3.0 * std::f64::consts::PI / 7.0).cos().powi(2);
        for n in (1..=41).step_by(2) {
            let x = 2.0 * (n as f64 / 2.0).exp2();
            let frac = x - x.floor();
            if (frac - theta).abs() > 1e-6 {
                assert_eq!(frac_below_threshold(n), frac < theta, "n = {n}");
            }
        }
        assert!(frac_below_threshold(7));
    }

    #[test]
    fn trace_search() {
        let k = Field::with_degree(3).unwrap();
        let e = find_curve_with_trace(&k, -5).unwrap();
        assert_eq!(e.trace(&k), -5);
        assert_eq!(e.signature(&k), k.r0());
        assert!(matches!(find_curve_with_trace(&k, 4), Err(Error::Precondition(_))));
        assert!(matches!(find_curve_with_trace(&k, 7), Err(Error::Precondition(_))));
        let k2 = Field::with_degree(1).unwrap();
        assert!(matches!(find_curve_with_trace(&k2, -1), Err(Error::FieldTooSmall)));
    }

    #[test]
    fn small_nq3_values() {
        let r = nq3(3).unwrap();
        assert_eq!((r.m, r.status, r.nq3, r.count), (5, Status::ExactDefect0, Some(Nq3::Exact(24)), Some(24)));
        assert_eq!(nq3(1).unwrap().nq3, Some(Nq3::Exact(7)));
        assert_eq!(nq3(5).unwrap().status, Status::NotCovered);
        assert!(nq3(4).is_err());
        assert!(construct_defect3(3).is_err());
        assert_eq!(construct_defect0(5).unwrap().status, Status::NotCovered);
    }

    #[test]
    fn minimal_curves() {
        // m = 11 ≡ 3 (mod 8): a pointless curve over GF(32).
        assert_eq!(m_of(5), 11);
        let (c, count) = construct_minimal(5).unwrap().unwrap();
        assert_eq!(count, 0);
        assert!(c.rational_points(&Field::with_degree(5).unwrap()).is_empty());
        // m = 5 ≡ 5 (mod 8) is not reached.
        assert_eq!(construct_minimal(3).unwrap(), None);
    }

    #[test]
    fn sequence_head_and_recurrence() {
        let s = m_sequence(64).unwrap();
        let head: Vec<String> = s.entries[..5].iter().map(|e| e.m_n.to_string()).collect();
        assert_eq!(head, ["2", "5", "11", "22", "45"]);
        assert!(s.entries[0].eps_half);
        assert!(s.residue1 >= 10 && s.residue2 >= 10);
        assert!(m_sequence(M_SEQUENCE_MAX).is_ok());
        assert!(m_sequence(M_SEQUENCE_MAX + 1).is_err());
    }

    #[test]
    fn csv_and_json() {
        let r = nq3(3).unwrap();
        let w = r.witness.unwrap();
        assert!(matches!(w, Genus3Curve::NHypB { c: Fe::ONE, d: Fe::ONE, r: Fe::ZERO, .. }));
        assert_eq!(r.csv_row(), format!("3,8,5,5,exact-defect-0,24,24,\"{w}\""));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains(r#""status":"exact-defect-0""#));
        assert!(json.contains(r#""nq3":24"#));
    }
}
