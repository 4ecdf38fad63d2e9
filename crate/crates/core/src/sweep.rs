//! Bulk verification of the point count identity over a family.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::genus3::{Family, Genus3Curve};
use crate::gf2::Field;
use crate::quotients::{verify_isogeny, IsogenyReport};

/// Work budget, in field operations, under which a sweep is exhaustive.
pub const EXHAUSTIVE_BUDGET: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plan {
    /// Exhaustive if within [`EXHAUSTIVE_BUDGET`], else this many samples.
    Auto { samples: usize },
    Exhaustive,
    Sampled { samples: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub family: Family,
    pub n: u32,
    pub q: u64,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    /// Estimated number of valid tuples.
    pub space: f64,
    pub checked: usize,
    pub passed: usize,
    pub coverage: f64,
    pub failures: Vec<IsogenyReport>,
}

impl SweepSummary {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Rough size of the valid parameter space.
pub fn space_estimate(family: Family, k: &Field) -> f64 {
    let q = k.q() as f64;
    match family {
        Family::HypA => (q - 1.0) * 2.0 * (q - 2.0),
        Family::HypB => (q - 1.0) * 2.0 * (q / 2.0) * (q / 2.0 - 1.0),
        Family::Ss => q * q * q * q / 6.0,
        Family::NHypA => q * (q - 1.0) * q * 2.0,
        Family::NHypB => q * (q - 1.0) * (q - 1.0) * 2.0,
    }
}

/// Field operations to count one curve and its three quotients.
pub fn cost_estimate(family: Family, k: &Field) -> f64 {
    let q = k.q() as f64;
    if family.is_hyperelliptic() {
        20.0 * q
    } else {
        5.0 * q * q + 20.0 * q
    }
}

pub fn exhaustive_feasible(family: Family, k: &Field) -> bool {
    space_estimate(family, k) * cost_estimate(family, k) <= EXHAUSTIVE_BUDGET
}

/// Checks every curve in parallel; reports come back in input order.
pub fn verify_all(k: &Field, curves: &[Genus3Curve]) -> Result<Vec<IsogenyReport>> {
    curves.par_iter().map(|c| verify_isogeny(k, c)).collect()
}

/// `samples` valid tuples drawn from a ChaCha8 stream seeded with `seed`.
pub fn sample(family: Family, k: &Field, samples: usize, seed: u64) -> Result<Vec<Genus3Curve>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| family.random(k, &mut rng)).collect()
}

pub fn sweep(k: &Field, family: Family, plan: Plan, seed: u64) -> Result<SweepSummary> {
    let exhaustive = match plan {
        Plan::Exhaustive => true,
        Plan::Sampled { .. } => false,
        Plan::Auto { .. } => exhaustive_feasible(family, k),
    };
    let (curves, space, seed) = if exhaustive {
        let all = family.enumerate(k);
        let len = all.len() as f64;
        (all, len, None)
    } else {
        let samples = match plan {
            Plan::Auto { samples } | Plan::Sampled { samples } => samples,
            Plan::Exhaustive => unreachable!(),
        };
        (sample(family, k, samples, seed)?, space_estimate(family, k), Some(seed))
    };
    let reports = verify_all(k, &curves)?;
    let checked = reports.len();
    let failures: Vec<IsogenyReport> = reports.into_iter().filter(|r| !r.ok).collect();
    Ok(SweepSummary {
        family,
        n: k.n(),
        q: k.q(),
        exhaustive,
        seed,
        space,
        checked,
        passed: checked - failures.len(),
        coverage: if space > 0.0 { (checked as f64 / space).min(1.0) } else { 1.0 },
        failures,
    })
}
