#![allow(dead_code)]

use dirac_bounds_core::bounds::{self, Family};
use dirac_bounds_core::invariants::CurvatureInvariants;
use rand::Rng;

/// Relative agreement with an absolute floor for values near zero.
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-9)
}

fn base_record<R: Rng>(rng: &mut R) -> CurvatureInvariants {
    let n = rng.random_range(3..=8);
    let nf = n as f64;
    let s0 = rng.random_range(-6.0..12.0);
    let s1 = s0 + rng.random_range(0.0..5.0);
    let kappa0 = (s0 / nf).min(0.0) + rng.random_range(-2.0..0.0) + (s0 / nf).max(0.0) * rng.random::<f64>();
    let kappa = s1 / nf + rng.random_range(0.0..2.0);
    let mut inv = CurvatureInvariants::synthetic(n, s0, s1, kappa0, kappa);
    inv.ric0 = (s0.abs() / nf.sqrt()) + rng.random_range(0.0..4.0);
    inv.ric_tr0 = rng.random_range(0.0..2.0);
    inv.ric_tr1 = rng.random_range(0.0..3.0);
    inv.nu0 = rng.random_range(0.01..3.0);
    inv.mu = rng.random_range(0.05..2.0);
    inv.zeta = inv.mu + rng.random_range(0.0..1.0);
    inv.theta = rng.random_range(0.0..2.0);
    inv.eta = rng.random_range(0.0..2.0);
    inv.refresh_switches();
    inv
}

/// Random record on which the closed-form Ricci optimum exists.
pub fn ricci_record<R: Rng>(rng: &mut R) -> CurvatureInvariants {
    loop {
        let inv = base_record(rng);
        if bounds::derived_constants(&inv).big_a > 0.0 && bounds::cor35_closed_form(&inv).applicable {
            return inv;
        }
    }
}

/// Random record with harmonic Weyl tensor, `nu0 > 0`, `mu > 0`.
pub fn weyl_record<R: Rng>(rng: &mut R) -> CurvatureInvariants {
    let mut inv = base_record(rng);
    inv.hypotheses.harmonic_weyl = true;
    inv
}

pub struct Agreement {
    pub cases: usize,
    pub worst: f64,
}

/// Worst relative disagreement between a closed form and the optimized
/// family it comes from, over `cases` records.
pub fn agreement<R: Rng>(
    rng: &mut R,
    cases: usize,
    record: fn(&mut R) -> CurvatureInvariants,
    closed: Family,
    optimized: Family,
) -> Agreement {
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let inv = record(rng);
        let c = bounds::evaluate(&inv, closed, None);
        let o = bounds::evaluate(&inv, optimized, None);
        assert!(c.applicable && o.applicable, "{c:?} {o:?}");
        let scale = c.value.abs().max(o.value.abs()).max(1e-9);
        worst = worst.max((c.value - o.value).abs() / scale);
    }
    Agreement { cases, worst }
}
