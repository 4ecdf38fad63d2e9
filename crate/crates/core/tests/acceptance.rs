//! The seven acceptance criteria. Each prints one PASS/FAIL line; the test
//! fails if any criterion does.

use std::time::Instant;

use g3as::covers::{exists_hyp_cover, exists_nonhyp_cover, exists_ss_cover, TripleInvariants};
use g3as::ec::{EllipticModel, OrdinaryCurve, SupersingularCurve};
use g3as::genus3::{Family, Genus3Curve};
use g3as::gf2::{Fe, Field};
use g3as::maximal::{m_sequence, nq3, Nq3, Status};
use g3as::quotients::{quotients_of, verify_isogeny};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn field(n: u32) -> Field {
    Field::with_degree(n).expect("small field")
}

fn identity_holds(k: &Field, c: &Genus3Curve) -> Result<(), String> {
    let rep = verify_isogeny(k, c).map_err(|e| format!("{c}: {e}"))?;
    ensure!(
        rep.ok,
        "{c}: {} points but q+1-Σtr = {}",
        rep.count,
        k.q() as i64 + 1 - rep.trace_sum
    );
    Ok(())
}

fn isogeny_identity() -> Outcome {
    let mut total = 0;
    for n in [2, 3] {
        let k = field(n);
        for fam in Family::ALL {
            for c in fam.enumerate(&k) {
                identity_holds(&k, &c)?;
                total += 1;
            }
        }
    }
    Ok(format!("{total} curves over GF(4) and GF(8)"))
}

fn nq3_values() -> Outcome {
    for (n, expected) in [(3, 24), (7, 192)] {
        let r = nq3(n).map_err(|e| e.to_string())?;
        ensure!(r.nq3 == Some(Nq3::Exact(expected)), "n = {n}: {:?}", r.nq3);
        let w = r.witness.ok_or(format!("n = {n}: no witness"))?;
        let k = field(n);
        let scanned = w.rational_points(&k).len() as u64;
        ensure!(scanned == expected, "n = {n}: witness {w} has {scanned} points");
    }
    let r = nq3(1).map_err(|e| e.to_string())?;
    ensure!(
        r.status == Status::KnownSmallCase && r.nq3 == Some(Nq3::Exact(7)),
        "n = 1: {r:?}"
    );
    let r = nq3(5).map_err(|e| e.to_string())?;
    ensure!(r.status == Status::NotCovered, "n = 5: {:?}", r.status);
    Ok("N(8)=24, N(128)=192, N(2)=7, n=5 not covered".into())
}

/// Every ordered triple of `(j, sgn)` over GF(8), with the hyperelliptic and
/// non-hyperelliptic conditions recomputed from their definitions.
fn gf8_triples(k: &Field) -> Vec<[(Fe, Fe); 3]> {
    let pairs: Vec<(Fe, Fe)> = k
        .nonzero()
        .flat_map(|j| [(j, Fe::ZERO), (j, k.r0())])
        .collect();
    let mut out = Vec::new();
    for &a in &pairs {
        for &b in &pairs {
            for &c in &pairs {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn hyp_expected(k: &Field, p: [(Fe, Fe); 3]) -> bool {
    let inv = |x: Fe| k.inv(x).unwrap();
    (inv(p[0].0) + inv(p[1].0) + inv(p[2].0)).is_zero()
}

fn nonhyp_expected(k: &Field, p: [(Fe, Fe); 3]) -> bool {
    let [j1, j2, j3] = p.map(|x| x.0);
    let sgn = p[0].1 + p[1].1 + p[2].1;
    let ta = k.div(k.square(j1 + j2 + j3), k.mul(k.mul(j1, j2), j3)).unwrap();
    let den = k.mul(j1, j2) + k.mul(j1, j3) + k.mul(j2, j3);
    let tb = (!den.is_zero())
        .then(|| k.div(k.mul(k.mul(j1, j2), k.square(j3)), k.square(den)).unwrap());
    !k.trace(ta + sgn) || tb.is_some_and(|tb| !k.trace(tb + sgn))
}

fn cover_completeness() -> Outcome {
    let k = field(3);
    let (mut hyp, mut nonhyp) = (0, 0);
    let triples = gf8_triples(&k);
    for p in &triples {
        let t = TripleInvariants::from_pairs(&k, *p).map_err(|e| e.to_string())?;
        let h = exists_hyp_cover(&k, &t).map_err(|e| format!("{p:?}: {e}"))?;
        ensure!(h.is_some() == hyp_expected(&k, *p), "hyperelliptic decision wrong on {p:?}");
        let nh = exists_nonhyp_cover(&k, &t).map_err(|e| format!("{p:?}: {e}"))?;
        ensure!(nh.is_some() == nonhyp_expected(&k, *p), "non-hyperelliptic decision wrong on {p:?}");
        for w in h.iter().chain(nh.iter()) {
            identity_holds(&k, &w.curve)?;
            let es = quotients_of(&k, &w.curve)
                .map_err(|e| e.to_string())?
                .ordinary()
                .ok_or("supersingular quotient")?;
            let mut got: Vec<(Fe, Fe)> = es.iter().map(|e| (e.j_invariant(&k), e.signature(&k))).collect();
            let mut want = p.to_vec();
            got.sort();
            want.sort();
            ensure!(got == want, "{} does not cover {p:?}", w.curve);
        }
        hyp += h.is_some() as usize;
        nonhyp += nh.is_some() as usize;
    }
    Ok(format!(
        "{} triples, {hyp} hyperelliptic and {nonhyp} non-hyperelliptic witnesses",
        triples.len()
    ))
}

fn torsion_and_trace() -> Outcome {
    for n in [3, 4, 5] {
        let k = field(n);
        for a in k.nonzero() {
            let e = OrdinaryCurve::new(&k, Fe::ZERO, a).unwrap();
            let tr = e.trace(&k);
            ensure!(tr.rem_euclid(4) == 1, "q = {}: {e} has trace {tr}", k.q());
            if n >= 4 {
                // 1/j = a.
                ensure!(
                    (tr.rem_euclid(8) == 1) == !k.trace(a),
                    "q = {}: {e} trace {tr} vs tr(1/j)",
                    k.q()
                );
            }
            if n == 4 {
                let has8 = e.torsion_probe(&k, 8).map_err(|x| x.to_string())?;
                ensure!(has8 == !k.trace(a), "q = 16: 8-torsion on {e}");
            }
        }
    }
    Ok("sgn-0 curves over GF(8), GF(16), GF(32)".into())
}

fn construction_identities() -> Outcome {
    let k = field(3);
    let (mut na, mut nb) = (0, 0);
    for p in gf8_triples(&k) {
        let t = TripleInvariants::from_pairs(&k, p).unwrap();
        let Some(w) = exists_nonhyp_cover(&k, &t).map_err(|e| e.to_string())? else {
            continue;
        };
        match w.curve {
            Genus3Curve::NHypA { e, .. } => {
                ensure!(k.trace(e) == k.trace(t.ta), "tr(e) != tr(Ta) for {}", w.curve);
                na += 1;
            }
            Genus3Curve::NHypB { c, d, .. } => {
                let tb = t.tb.ok_or(format!("Tb undefined for {}", w.curve))?;
                ensure!(k.trace(k.mul(c, d)) == k.trace(tb), "tr(cd) != tr(Tb) for {}", w.curve);
                nb += 1;
            }
            other => return Err(format!("unexpected witness {other}")),
        }
    }
    let mut points = 0;
    for r in [Fe::ZERO, Fe::ONE] {
        for a in k.nonzero() {
            let e = OrdinaryCurve::new(&k, r, a).unwrap();
            let big_n = e.two_torsion(&k);
            for p in e.points(&k) {
                let lhs = e.tau_n(&k, p).map_err(|x| x.to_string())?;
                let rhs = e.add_points(&k, p, big_n).map_err(|x| x.to_string())?;
                ensure!(lhs == rhs, "tau_N({p:?}) on {e}");
                points += 1;
            }
        }
    }
    Ok(format!("{na} NHypA and {nb} NHypB witnesses; tau_N on {points} points of 14 curves"))
}

fn m_sequence_checks() -> Outcome {
    let s = m_sequence(200).map_err(|e| e.to_string())?;
    let head: Vec<String> = s.entries[..5].iter().map(|e| e.m_n.to_string()).collect();
    ensure!(head == ["2", "5", "11", "22", "45"], "head {head:?}");
    let s64 = m_sequence(64).map_err(|e| e.to_string())?;
    ensure!(
        s64.residue1 >= 10 && s64.residue2 >= 10,
        "residues 1, 2 mod 4 occur {} and {} times",
        s64.residue1,
        s64.residue2
    );
    Ok(format!(
        "recurrence through n = 200; n <= 64 has {} ≡ 1 and {} ≡ 2 (mod 4)",
        s64.residue1, s64.residue2
    ))
}

fn ss_cover_search() -> Outcome {
    let k = field(7);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut found = Vec::new();
    for _ in 0..10 {
        let traces = [0; 3].map(|_| {
            let e = SupersingularCurve::new(&k, k.random_nonzero(&mut rng), k.random(&mut rng), k.random(&mut rng))
                .unwrap();
            e.trace(&k)
        });
        let w = exists_ss_cover(&k, traces)
            .map_err(|e| e.to_string())?
            .ok_or(format!("no witness for {traces:?}"))?;
        identity_holds(&k, &w.curve)?;
        let mut got = quotients_of(&k, &w.curve).unwrap().traces(&k);
        let mut want = traces;
        got.sort();
        want.sort();
        ensure!(got == want, "{} has quotient traces {got:?}, wanted {want:?}", w.curve);
        found.push(want);
    }
    Ok(format!("10 multisets over GF(128), e.g. {:?}", found[0]))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("isogeny identity sweep", isogeny_identity),
        ("N_q(3) values", nq3_values),
        ("cover criteria completeness", cover_completeness),
        ("torsion and trace lemmas", torsion_and_trace),
        ("construction identities", construction_identities),
        ("m-sequence", m_sequence_checks),
        ("supersingular cover search", ss_cover_search),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}; {secs:.2}s)", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name} ({why}; {secs:.2}s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
