//! Lower bounds for the squared Dirac eigenvalues in terms of the global
//! curvature invariants, and the harmonic-spinor vanishing criteria.
//!
//! Every family has the shape `lambda^2 >= k * beta(t) / alpha(t)` with
//! `k = n / (4(n-1))`, optimized over a parameter `t >= 0`; at `t = 0` each
//! reduces to the Friedrich bound `k S0`. Closed forms give the optimum
//! analytically where it is known.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::CurvatureInvariants;
use crate::optimize::optimize_t;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "friedrich")]
    Friedrich,
    #[serde(rename = "kahler")]
    Kahler,
    #[serde(rename = "ricci_thm32")]
    RicciThm32,
    #[serde(rename = "ricci_cor35")]
    RicciCor35,
    #[serde(rename = "ricci_cor36")]
    RicciCor36,
    #[serde(rename = "weyl_thm41")]
    WeylThm41,
    #[serde(rename = "weyl_cor42")]
    WeylCor42,
    #[serde(rename = "weyl_thm45")]
    WeylThm45,
    #[serde(rename = "weyl_cor46")]
    WeylCor46,
    #[serde(rename = "weyl_cor47")]
    WeylCor47,
    #[serde(rename = "full_thm52_p1")]
    FullThm52P1,
    #[serde(rename = "full_thm52_p2")]
    FullThm52P2,
    #[serde(rename = "full_thm55_p3")]
    FullThm55P3,
    #[serde(rename = "full_thm55_p4")]
    FullThm55P4,
}

impl Family {
    pub const ALL: [Family; 14] = [
        Family::Friedrich,
        Family::Kahler,
        Family::RicciThm32,
        Family::RicciCor35,
        Family::RicciCor36,
        Family::WeylThm41,
        Family::WeylCor42,
        Family::WeylThm45,
        Family::WeylCor46,
        Family::WeylCor47,
        Family::FullThm52P1,
        Family::FullThm52P2,
        Family::FullThm55P3,
        Family::FullThm55P4,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Family::Friedrich => "friedrich",
            Family::Kahler => "kahler",
            Family::RicciThm32 => "ricci_thm32",
            Family::RicciCor35 => "ricci_cor35",
            Family::RicciCor36 => "ricci_cor36",
            Family::WeylThm41 => "weyl_thm41",
            Family::WeylCor42 => "weyl_cor42",
            Family::WeylThm45 => "weyl_thm45",
            Family::WeylCor46 => "weyl_cor46",
            Family::WeylCor47 => "weyl_cor47",
            Family::FullThm52P1 => "full_thm52_p1",
            Family::FullThm52P2 => "full_thm52_p2",
            Family::FullThm55P3 => "full_thm55_p3",
            Family::FullThm55P4 => "full_thm55_p4",
        }
    }

    pub fn from_id(id: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.id() == id)
    }

    /// Families that are a closed-form optimum rather than a `t` search.
    pub fn is_closed_form(self) -> bool {
        matches!(
            self,
            Family::RicciCor35 | Family::RicciCor36 | Family::WeylCor42 | Family::WeylCor46 | Family::WeylCor47
        )
    }
}

/// A vanishing or improvement predicate, evaluated at face value, together
/// with whether its hypotheses hold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub holds: bool,
    pub hypothesis: bool,
}

impl Criterion {
    /// Hypotheses met and inequality satisfied.
    pub fn active(&self) -> bool {
        self.holds && self.hypothesis
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub family: Family,
    pub t_star: Option<f64>,
    /// Signed lower bound for `lambda^2`. For inapplicable families this is
    /// the Friedrich value, which always holds.
    pub value: f64,
    /// `max(value, 0)`.
    pub effective: f64,
    pub applicable: bool,
    pub reason: Option<String>,
    /// `value` minus the Friedrich value.
    pub improvement: f64,
    pub conditions: BTreeMap<String, Criterion>,
    pub note: Option<String>,
}

/// Constants of the closed-form Ricci bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    #[serde(rename = "A")]
    pub big_a: f64,
    /// `None` when `A = 0`.
    pub a: Option<f64>,
    pub b: f64,
    pub c: f64,
}

/// `alpha, beta, gamma` of one family at one `t`, with the bound
/// `k beta / alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyPoint {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub value: f64,
}

impl FamilyPoint {
    fn new(n: usize, t: f64, alpha: f64, beta: f64, gamma: f64) -> Self {
        Self {
            t,
            alpha,
            beta,
            gamma,
            value: prefactor(n) * beta / alpha,
        }
    }

    /// `|k beta/alpha - k (S0 + t gamma/alpha)|`, given `S0`.
    pub fn form_residual(&self, n: usize, s0: f64) -> f64 {
        (self.value - prefactor(n) * (s0 + self.t * self.gamma / self.alpha)).abs()
    }
}

/// `n / (4(n-1))`.
pub fn prefactor(n: usize) -> f64 {
    let nf = n as f64;
    nf / (4.0 * (nf - 1.0))
}

fn binom2(n: usize) -> f64 {
    let nf = n as f64;
    nf * (nf - 1.0) / 2.0
}

/// `num / (n-2)`, read as 0 in dimension two where the traceless Ricci
/// tensor it multiplies vanishes identically.
fn over_n_minus_2(n: usize, num: f64) -> f64 {
    if n == 2 {
        0.0
    } else {
        num / (n as f64 - 2.0)
    }
}

/// Characteristic curvature scale of a record; `0` for flat data.
fn curvature_scale(inv: &CurvatureInvariants) -> f64 {
    [
        inv.s0.abs(),
        inv.s1.abs(),
        inv.kappa0.abs(),
        inv.kappa.abs(),
        inv.ric0,
        inv.ric_tr1,
        inv.nu0.abs().sqrt(),
        inv.mu,
        inv.zeta,
        inv.theta.abs().sqrt(),
        inv.eta.abs().sqrt(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn t_hint(inv: &CurvatureInvariants) -> f64 {
    let s = curvature_scale(inv);
    if s > 0.0 {
        1.0 / s
    } else {
        1.0
    }
}

/// Numerical zero relative to the record's curvature scale.
fn is_zero(x: f64, inv: &CurvatureInvariants) -> bool {
    x.abs() <= 1e-12 * (1.0 + curvature_scale(inv))
}

// ---------------------------------------------------------------- baselines

pub fn friedrich_value(inv: &CurvatureInvariants) -> f64 {
    prefactor(inv.n) * inv.s0
}

pub fn friedrich(inv: &CurvatureInvariants) -> BoundResult {
    let v = friedrich_value(inv);
    result(Family::Friedrich, None, v, v, true, None)
}

/// Kähler baseline for complex dimension `m` (the caller asserts the
/// metric is Kähler).
pub fn kahler_baseline(m: usize, s0: f64) -> Result<BoundResult> {
    if m == 0 {
        return Err(Error::InvalidParameter("Kähler complex dimension must be >= 1".into()));
    }
    let mf = m as f64;
    let v = if m % 2 == 1 {
        (mf + 1.0) / (4.0 * mf) * s0
    } else {
        mf / (4.0 * (mf - 1.0)) * s0
    };
    let friedrich = prefactor(2 * m) * s0;
    Ok(result(Family::Kahler, None, v, friedrich, true, None))
}

fn result(family: Family, t_star: Option<f64>, value: f64, friedrich: f64, applicable: bool, reason: Option<String>) -> BoundResult {
    BoundResult {
        family,
        t_star,
        value,
        effective: value.max(0.0),
        applicable,
        reason,
        improvement: value - friedrich,
        conditions: BTreeMap::new(),
        note: None,
    }
}

fn not_applicable(family: Family, inv: &CurvatureInvariants, reason: impl Into<String>) -> BoundResult {
    let f = friedrich_value(inv);
    result(family, None, f, f, false, Some(reason.into()))
}

/// Placeholder for a family the caller chose not to evaluate.
pub fn not_requested(inv: &CurvatureInvariants, family: Family) -> BoundResult {
    not_applicable(family, inv, "not requested")
}

fn optimized(family: Family, inv: &CurvatureInvariants, f: impl Fn(f64) -> Option<f64>, empty_reason: &str) -> BoundResult {
    let friedrich = friedrich_value(inv);
    match optimize_t(f, t_hint(inv)) {
        Some(o) => result(family, Some(o.t_star), o.value, friedrich, true, None),
        None => not_applicable(family, inv, empty_reason),
    }
}

// ------------------------------------------------------------ Ricci family

pub fn derived_constants(inv: &CurvatureInvariants) -> DerivedConstants {
    let nf = inv.n as f64;
    let spread = (inv.s1 - inv.s0) / 4.0;
    let big_a = inv.ric0 * inv.ric0
        - inv.s0 / (nf - 1.0) * (inv.s1 - inv.kappa0 + spread)
        - inv.kappa0 * (inv.s_star - inv.s0);
    let tail = nf * inv.s0 / (4.0 * (nf - 1.0)) * inv.ric_tr1 * inv.ric_tr1 + inv.theta;
    DerivedConstants {
        big_a,
        a: (big_a != 0.0).then(|| 4.0 / big_a * tail),
        b: nf / (nf - 1.0) * (inv.s1 / nf - inv.kappa0 + spread),
        c: inv.ric_tr1 * (2.0 * nf / (nf - 1.0)).sqrt(),
    }
}

/// `alpha, beta, gamma` of the Ricci family at `t`. `None` where
/// `alpha <= 0`.
/// Sum of `terms`, flushed to zero when it is round-off of their cancellation;
/// otherwise the optimizer would chase that noise out to large `t`.
fn cancelled(terms: &[f64]) -> f64 {
    let sum: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|x| x.abs()).sum();
    if sum.abs() <= 16.0 * f64::EPSILON * scale {
        0.0
    } else {
        sum
    }
}

pub fn ricci_family(inv: &CurvatureInvariants, t: f64) -> Option<FamilyPoint> {
    let nf = inv.n as f64;
    let spread = (inv.s1 - inv.s0) / 4.0;
    let tr1_sq = inv.ric_tr1 * inv.ric_tr1;
    let a1 = cancelled(&[inv.s1 / nf, -inv.kappa0, spread]);
    let b1 = cancelled(&[inv.ric0 * inv.ric0, -inv.s_star * inv.kappa0, inv.s0 * spread]);
    let alpha = 1.0 + nf * t / (nf - 1.0) * a1 + nf * t * t / (2.0 * (nf - 1.0)) * tr1_sq;
    let beta = inv.s0 + t * b1 - 2.0 * inv.theta * t * t;
    let big_a = derived_constants(inv).big_a;
    let gamma = big_a - 2.0 * t * (nf * inv.s0 / (4.0 * (nf - 1.0)) * tr1_sq + inv.theta);
    (alpha > 0.0).then(|| FamilyPoint::new(inv.n, t, alpha, beta, gamma))
}

pub fn ricci_thm32(inv: &CurvatureInvariants) -> BoundResult {
    optimized(Family::RicciThm32, inv, |t| ricci_family(inv, t).map(|p| p.value), "alpha <= 0 for all t")
}

/// `A / (a + b + sqrt(a^2 + 2ab + c^2))` with the `t` at which it is
/// attained, or `None` when the interior optimum does not exist.
fn cor35_optimum(big_a: f64, a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let disc = a * a + 2.0 * a * b + c * c;
    if disc < 0.0 {
        return None;
    }
    let denom = a + b + disc.sqrt();
    if denom <= 0.0 {
        return None;
    }
    let m = big_a / denom;
    // tangency of t -> A t (1 - a t / 2) / (1 + b t + c^2 t^2 / 4) with level m
    let t = (big_a - m * b) / (m * c * c / 2.0 + big_a * a);
    (t.is_finite() && t > 0.0).then_some((m, t))
}

pub fn cor35_closed_form(inv: &CurvatureInvariants) -> BoundResult {
    let k = prefactor(inv.n);
    let dc = derived_constants(inv);
    let friedrich = friedrich_value(inv);
    if dc.big_a < 0.0 {
        return not_applicable(Family::RicciCor35, inv, "requires A >= 0");
    }
    let Some(a) = dc.a else {
        let mut r = result(Family::RicciCor35, Some(0.0), friedrich, friedrich, true, None);
        r.note = Some("A = 0: reduces to the Friedrich bound".into());
        return r;
    };
    match cor35_optimum(dc.big_a, a, dc.b, dc.c) {
        Some((m, t)) if ricci_family(inv, t).is_some() => {
            let mut r = result(Family::RicciCor35, Some(t), k * (inv.s0 + m), friedrich, true, None);
            r.note = Some("never an equality when A > 0".into());
            r
        }
        _ => not_applicable(Family::RicciCor35, inv, "no interior optimum for t > 0"),
    }
}

pub fn ricci_cor36(inv: &CurvatureInvariants) -> BoundResult {
    if !is_zero(inv.s0, inv) {
        return not_applicable(Family::RicciCor36, inv, "requires S0 = 0");
    }
    if inv.ric0 <= 0.0 {
        return not_applicable(Family::RicciCor36, inv, "requires |Ric|_0 > 0");
    }
    let nf = inv.n as f64;
    let r2 = inv.ric0 * inv.ric0;
    let a = 4.0 * inv.theta / r2;
    let b = nf / (nf - 1.0) * ((nf + 4.0) / (4.0 * nf) * inv.s1 - inv.kappa0);
    let c = inv.ric_tr1 * (2.0 * nf / (nf - 1.0)).sqrt();
    match cor35_optimum(r2, a, b, c) {
        Some((m, t)) => {
            let mut r = result(Family::RicciCor36, Some(t), prefactor(inv.n) * m, 0.0, true, None);
            r.note = Some("strict inequality".into());
            r
        }
        None => not_applicable(Family::RicciCor36, inv, "no interior optimum for t > 0"),
    }
}

// ------------------------------------------------------------- Weyl family

/// Right-hand side of the Weyl-tensor bounds at `t`: the harmonic-Weyl form
/// when `harmonic_weyl`, otherwise the general form with `eta`.
pub fn weyl_family(inv: &CurvatureInvariants, t: f64, harmonic_weyl: bool) -> f64 {
    let nf = inv.n as f64;
    let mu2 = inv.mu * inv.mu;
    let bracket = if harmonic_weyl {
        (4.0 * inv.nu0 * t - (nf - 1.0) * mu2 * inv.s0 * t * t) / (1.0 + nf * (nf - 1.0) * mu2 * t * t)
    } else {
        (4.0 * inv.nu0 * t - 2.0 * ((nf - 1.0) * mu2 * inv.s0 + 4.0 * inv.eta) * t * t)
            / (1.0 + 2.0 * nf * (nf - 1.0) * mu2 * t * t)
    };
    prefactor(inv.n) * (inv.s0 + bracket)
}

pub fn weyl_thm41(inv: &CurvatureInvariants) -> BoundResult {
    if !inv.hypotheses.harmonic_weyl {
        return not_applicable(Family::WeylThm41, inv, "requires harmonic Weyl tensor");
    }
    optimized(Family::WeylThm41, inv, |t| Some(weyl_family(inv, t, true)), "")
}

pub fn weyl_thm45(inv: &CurvatureInvariants) -> BoundResult {
    optimized(Family::WeylThm45, inv, |t| Some(weyl_family(inv, t, false)), "")
}

pub fn weyl_cor42(inv: &CurvatureInvariants) -> BoundResult {
    if !inv.hypotheses.harmonic_weyl {
        return not_applicable(Family::WeylCor42, inv, "requires harmonic Weyl tensor");
    }
    if inv.mu <= 0.0 {
        return not_applicable(Family::WeylCor42, inv, "requires mu > 0");
    }
    let nf = inv.n as f64;
    let q = 4.0 * inv.nu0 / inv.mu;
    let v = ((2.0 * nf - 1.0) * inv.s0 + (inv.s0 * inv.s0 + nf / (nf - 1.0) * q * q).sqrt()) / (8.0 * (nf - 1.0));
    result(Family::WeylCor42, None, v, friedrich_value(inv), true, None)
}

pub fn weyl_cor46(inv: &CurvatureInvariants) -> BoundResult {
    if inv.mu <= 0.0 {
        return not_applicable(Family::WeylCor46, inv, "requires mu > 0");
    }
    let nf = inv.n as f64;
    let shift = 4.0 * inv.eta / ((nf - 1.0) * inv.mu * inv.mu);
    let ratio = inv.nu0 / inv.mu;
    let root = ((inv.s0 + shift).powi(2) + 8.0 * nf / (nf - 1.0) * ratio * ratio).sqrt();
    let v = ((2.0 * nf - 1.0) * inv.s0 - shift + root) / (8.0 * (nf - 1.0));
    result(Family::WeylCor46, None, v, friedrich_value(inv), true, None)
}

pub fn weyl_cor47(inv: &CurvatureInvariants) -> BoundResult {
    if !is_zero(inv.s0, inv) {
        return not_applicable(Family::WeylCor47, inv, "requires S0 = 0");
    }
    if inv.nu0 <= 0.0 {
        return not_applicable(Family::WeylCor47, inv, "requires nu0 > 0");
    }
    let denom = inv.eta + (inv.eta * inv.eta + binom2(inv.n) * inv.mu * inv.mu * inv.nu0 * inv.nu0).sqrt();
    if denom <= 0.0 {
        return not_applicable(Family::WeylCor47, inv, "requires mu > 0 or eta > 0");
    }
    let v = prefactor(inv.n) * inv.nu0 * inv.nu0 / denom;
    result(Family::WeylCor47, None, v, 0.0, true, None)
}

// ------------------------------------------------------------- full family

/// `alpha_p, beta_p, gamma_p` at `t` for `p` in `1..=4`. `None` for an
/// invalid `p` or where `beta_p <= 0` or `alpha_p <= 0` (the bounds only
/// hold where `beta_p > 0`).
pub fn full_family(inv: &CurvatureInvariants, t: f64, p: u8) -> Option<FamilyPoint> {
    let n = inv.n;
    let nf = n as f64;
    let s0 = inv.s0;
    let zeta2 = inv.zeta * inv.zeta;
    let tr0_sq = inv.ric_tr0 * inv.ric_tr0;
    let abs_sq = inv.abs_s0 * inv.abs_s0 / (nf * (nf - 1.0));
    let pf = p as f64;
    let (alpha, beta) = match p {
        1 | 2 => {
            let spread = (inv.s1 - s0) / 4.0;
            let alpha = 1.0 + t / (nf - 1.0) * (inv.kappa + spread) + pf * nf * (nf - 1.0) * zeta2 * t * t;
            let lin = 4.0 * inv.nu0
                + (over_n_minus_2(n, nf + 2.0) * tr0_sq + abs_sq + s0 * spread + inv.s_star5 * inv.kappa) / nf;
            let quad = (nf - 1.0).powi(2) * s0 * zeta2 - ((2.0 * nf - 1.0) / nf).powi(2) * inv.theta;
            (alpha, s0 + t * lin + pf * t * t * quad)
        }
        3 | 4 => {
            let tr1_sq = inv.ric_tr1 * inv.ric_tr1;
            let alpha = 1.0
                + t * inv.s1 / (nf * (nf - 1.0))
                + (pf - 1.0) * t * t * (tr1_sq / (4.0 * nf * (nf - 1.0)) + nf * (nf - 1.0) * zeta2);
            let lin = 4.0 * inv.nu0 + over_n_minus_2(n, 2.0) * tr0_sq + abs_sq;
            let quad = (nf - 1.0).powi(2) * s0 * zeta2 - 4.0 * inv.theta;
            (alpha, s0 + t * lin + (pf - 1.0) * t * t * quad)
        }
        _ => return None,
    };
    // gamma from beta = S0 alpha + t gamma
    let gamma = if t > 0.0 {
        (beta - s0 * alpha) / t
    } else {
        full_gamma0(inv, p)
    };
    (beta > 0.0 && alpha > 0.0).then(|| FamilyPoint::new(n, t, alpha, beta, gamma))
}

/// `gamma_p(0)`; its sign decides whether the family improves on
/// Friedrich for small `t`.
fn full_gamma0(inv: &CurvatureInvariants, p: u8) -> f64 {
    let n = inv.n;
    let nf = n as f64;
    let s0 = inv.s0;
    let tr0_sq = inv.ric_tr0 * inv.ric_tr0;
    let abs_sq = inv.abs_s0 * inv.abs_s0 / (nf * (nf - 1.0));
    if p <= 2 {
        let spread = (inv.s1 - s0) / 4.0;
        4.0 * inv.nu0
            + (over_n_minus_2(n, nf + 2.0) * tr0_sq + abs_sq - s0 / (nf - 1.0) * (inv.kappa + spread)
                + inv.kappa * (inv.s_star5 - s0))
                / nf
    } else {
        4.0 * inv.nu0 + over_n_minus_2(n, 2.0) * tr0_sq + abs_sq - s0 * inv.s1 / (nf * (nf - 1.0))
    }
}

fn full_family_id(p: u8) -> Family {
    match p {
        1 => Family::FullThm52P1,
        2 => Family::FullThm52P2,
        3 => Family::FullThm55P3,
        _ => Family::FullThm55P4,
    }
}

pub fn full_thm(inv: &CurvatureInvariants, p: u8) -> BoundResult {
    let family = full_family_id(p);
    if matches!(p, 1 | 3) && !inv.hypotheses.harmonic_curvature {
        return not_applicable(family, inv, "requires harmonic curvature tensor");
    }
    optimized(family, inv, |t| full_family(inv, t, p).map(|q| q.value), "beta_p <= 0 for all t >= 0")
}

// ---------------------------------------------------------------- criteria

/// Vanishing and improvement predicates keyed by name.
pub fn vanishing_report(inv: &CurvatureInvariants) -> BTreeMap<String, Criterion> {
    let n = inv.n;
    let nf = n as f64;
    let s0 = inv.s0;
    let abs0 = s0.abs();
    let (nu0, mu, zeta, theta, eta) = (inv.nu0, inv.mu, inv.zeta, inv.theta, inv.eta);
    let tr0_sq = inv.ric_tr0 * inv.ric_tr0;
    let r2 = inv.ric0 * inv.ric0;
    let nonpositive = s0 <= 0.0;
    let zero_scalar = is_zero(s0, inv);
    let harmonic_r = inv.hypotheses.harmonic_curvature;
    let harmonic_w = inv.hypotheses.harmonic_weyl;
    let c2 = binom2(n);
    let abs_s_sq = inv.abs_s0 * inv.abs_s0;

    let mut m = BTreeMap::new();
    let mut put = |name: &str, holds: bool, hypothesis: bool| {
        m.insert(name.to_string(), Criterion { holds, hypothesis });
    };

    put(
        "ricci_vanishing",
        r2 > s0 * (inv.kappa0 - (inv.s1 - s0) / 4.0) + (8.0 * abs0 * theta).sqrt(),
        nonpositive,
    );
    put("ricci_zero_scalar_vanishing", inv.ric0 > 0.0, zero_scalar);
    put("ricci_improvement", derived_constants(inv).big_a > 0.0, s0 > 0.0);
    put(
        "ricci_constant_scalar_improvement",
        r2 > s0 / (nf - 1.0) * (s0 - inv.kappa0),
        inv.hypotheses.constant_scalar && s0 > 0.0,
    );

    put("weyl_harmonic_vanishing", nu0 > (nf - 1.0) / 2.0 * abs0 * mu, nonpositive && harmonic_w && mu > 0.0);
    put(
        "weyl_vanishing",
        nu0 > (abs0 * (2.0 * eta + 0.5 * (nf - 1.0).powi(2) * mu * mu * abs0)).sqrt(),
        nonpositive && mu > 0.0,
    );
    put("weyl_zero_scalar_vanishing", nu0 > 0.0, zero_scalar);

    let lhs_full = 4.0 * nf * nu0 + over_n_minus_2(n, nf + 2.0) * tr0_sq + abs_s_sq / (nf * (nf - 1.0));
    put(
        "full_vanishing",
        lhs_full + inv.s_star5 * inv.kappa
            > abs0 * (inv.s1 - s0) / 4.0
                + 4.0 * (2.0 * abs0 * (c2 * c2 * abs0 * zeta * zeta + ((2.0 * nf - 1.0) / 2.0).powi(2) * theta)).sqrt(),
        nonpositive,
    );
    put(
        "full_harmonic_vanishing",
        4.0 * nf * nu0 + over_n_minus_2(n, nf + 2.0) * tr0_sq + s0 * s0 / (nf * (nf - 1.0))
            > abs0 * (inv.kappa + 4.0 * c2 * zeta),
        nonpositive && harmonic_r,
    );
    put(
        "full_improvement",
        lhs_full > s0 / (nf - 1.0) * (inv.kappa + (inv.s1 - s0) / 4.0),
        s0 > 0.0,
    );
    put(
        "full_harmonic_improvement",
        4.0 * nf * nu0 + over_n_minus_2(n, nf + 2.0) * tr0_sq > s0 / (nf - 1.0) * (inv.kappa - s0 / nf),
        harmonic_r && s0 > 0.0,
    );

    let lhs_alt = 4.0 * nf * nu0 + over_n_minus_2(n, 2.0 * nf) * tr0_sq;
    put(
        "full_alt_vanishing",
        lhs_alt + abs_s_sq / (nf - 1.0) > 4.0 * (3.0 * abs0 * (c2 * c2 * abs0 * zeta * zeta + nf * nf * theta)).sqrt(),
        nonpositive,
    );
    put(
        "full_alt_harmonic_vanishing",
        lhs_alt + s0 * s0 / (nf - 1.0) > 4.0 * c2 * zeta * abs0 * 2f64.sqrt(),
        nonpositive && harmonic_r,
    );
    put("full_alt_improvement", lhs_alt > s0 / (nf - 1.0) * (inv.s1 - s0), s0 > 0.0);
    m
}

/// Names of the criteria whose truth excludes harmonic spinors.
pub const VANISHING_CRITERIA: [&str; 9] = [
    "ricci_vanishing",
    "ricci_zero_scalar_vanishing",
    "weyl_harmonic_vanishing",
    "weyl_vanishing",
    "weyl_zero_scalar_vanishing",
    "full_vanishing",
    "full_harmonic_vanishing",
    "full_alt_vanishing",
    "full_alt_harmonic_vanishing",
];

/// Criteria attached to each family's result.
fn family_criteria(family: Family) -> &'static [&'static str] {
    match family {
        Family::RicciThm32 => &["ricci_vanishing", "ricci_improvement", "ricci_constant_scalar_improvement"],
        Family::RicciCor36 => &["ricci_zero_scalar_vanishing"],
        Family::WeylCor42 => &["weyl_harmonic_vanishing"],
        Family::WeylCor46 => &["weyl_vanishing"],
        Family::WeylCor47 => &["weyl_zero_scalar_vanishing"],
        Family::FullThm52P1 => &["full_harmonic_vanishing", "full_harmonic_improvement"],
        Family::FullThm52P2 => &["full_vanishing", "full_improvement"],
        Family::FullThm55P3 => &["full_alt_harmonic_vanishing"],
        Family::FullThm55P4 => &["full_alt_vanishing", "full_alt_improvement"],
        _ => &[],
    }
}

pub fn evaluate(inv: &CurvatureInvariants, family: Family, kahler_m: Option<usize>) -> BoundResult {
    let mut r = match family {
        Family::Friedrich => friedrich(inv),
        Family::Kahler => match kahler_m {
            Some(m) if 2 * m == inv.n => {
                kahler_baseline(m, inv.s0).unwrap_or_else(|e| not_applicable(Family::Kahler, inv, e.to_string()))
            }
            Some(m) => not_applicable(Family::Kahler, inv, format!("complex dimension {m} does not match n = {}", inv.n)),
            None => not_applicable(Family::Kahler, inv, "Kähler structure not asserted"),
        },
        Family::RicciThm32 => ricci_thm32(inv),
        Family::RicciCor35 => cor35_closed_form(inv),
        Family::RicciCor36 => ricci_cor36(inv),
        Family::WeylThm41 => weyl_thm41(inv),
        Family::WeylCor42 => weyl_cor42(inv),
        Family::WeylThm45 => weyl_thm45(inv),
        Family::WeylCor46 => weyl_cor46(inv),
        Family::WeylCor47 => weyl_cor47(inv),
        Family::FullThm52P1 => full_thm(inv, 1),
        Family::FullThm52P2 => full_thm(inv, 2),
        Family::FullThm55P3 => full_thm(inv, 3),
        Family::FullThm55P4 => full_thm(inv, 4),
    };
    let names = family_criteria(family);
    if !names.is_empty() {
        let all = vanishing_report(inv);
        r.conditions = names.iter().filter_map(|k| all.get(*k).map(|c| (k.to_string(), *c))).collect();
    }
    r
}

/// All fourteen families, in [`Family::ALL`] order.
pub fn evaluate_all(inv: &CurvatureInvariants, kahler_m: Option<usize>) -> Vec<BoundResult> {
    Family::ALL.iter().map(|&f| evaluate(inv, f, kahler_m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_inv(n: usize, r: f64) -> CurvatureInvariants {
        let nf = n as f64;
        let k = 1.0 / (r * r);
        let s = nf * (nf - 1.0) * k;
        let mut inv = CurvatureInvariants::synthetic(n, s, s, (nf - 1.0) * k, (nf - 1.0) * k);
        inv.ric0 = (nf).sqrt() * (nf - 1.0) * k;
        inv.zeta = 0.5 * k;
        inv
    }

    #[test]
    fn friedrich_examples() {
        assert!((friedrich(&sphere_inv(4, 1.0)).value - 4.0).abs() < 1e-12);
        assert!((friedrich(&sphere_inv(2, 1.0)).value - 1.0).abs() < 1e-12);
        let flat = CurvatureInvariants::synthetic(4, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(friedrich(&flat).value, 0.0);
    }

    #[test]
    fn kahler_examples() {
        assert!((kahler_baseline(3, 12.0).unwrap().value - 4.0).abs() < 1e-12);
        assert!((kahler_baseline(2, 8.0).unwrap().value - 4.0).abs() < 1e-12);
        assert_eq!(kahler_baseline(3, 0.0).unwrap().value, 0.0);
        assert!(kahler_baseline(0, 1.0).is_err());
    }

    #[test]
    fn sphere_families_collapse_to_friedrich() {
        for n in 2..=6 {
            let inv = sphere_inv(n, 1.0);
            let f = friedrich_value(&inv);
            assert!(derived_constants(&inv).big_a.abs() < 1e-10);
            for r in evaluate_all(&inv, None) {
                if r.applicable {
                    assert!((r.value - f).abs() < 1e-9 * f, "{n} {:?}", r);
                }
            }
        }
    }

    #[test]
    fn all_families_at_zero_are_friedrich() {
        let mut inv = CurvatureInvariants::synthetic(5, 3.0, 4.0, 0.5, 1.2);
        inv.ric0 = 2.0;
        inv.ric_tr0 = 0.3;
        inv.ric_tr1 = 0.7;
        inv.nu0 = 0.2;
        inv.mu = 0.4;
        inv.zeta = 0.9;
        inv.theta = 0.1;
        inv.eta = 0.05;
        let f = friedrich_value(&inv);
        assert!((ricci_family(&inv, 0.0).unwrap().value - f).abs() < 1e-14);
        assert!((weyl_family(&inv, 0.0, true) - f).abs() < 1e-14);
        assert!((weyl_family(&inv, 0.0, false) - f).abs() < 1e-14);
        for p in 1..=4 {
            assert!((full_family(&inv, 0.0, p).unwrap().value - f).abs() < 1e-14);
        }
        for t in [0.01, 0.3, 2.0] {
            let q = ricci_family(&inv, t).unwrap();
            assert!(q.form_residual(5, inv.s0) < 1e-12);
            for p in 1..=4 {
                if let Some(q) = full_family(&inv, t, p) {
                    assert!(q.form_residual(5, inv.s0) < 1e-12, "p={p} t={t}");
                }
            }
        }
    }

    #[test]
    fn cor47_arithmetic() {
        let mut inv = CurvatureInvariants::synthetic(4, 0.0, 0.0, 0.0, 0.0);
        inv.nu0 = 1.0;
        inv.mu = 1.0;
        let r = weyl_cor47(&inv);
        assert!(r.applicable);
        assert!((r.value - (4.0 / 12.0) / 6f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn cor42_without_nu_is_friedrich() {
        let mut inv = CurvatureInvariants::synthetic(4, 6.0, 6.0, 1.5, 1.5);
        inv.mu = 0.3;
        assert!((weyl_cor42(&inv).value - friedrich_value(&inv)).abs() < 1e-12);
    }

    #[test]
    fn ricci_vanishing_arithmetic() {
        let mut inv = CurvatureInvariants::synthetic(4, -1.0, -1.0, -1.0, -0.1);
        inv.ric0 = 10f64.sqrt();
        let v = vanishing_report(&inv);
        assert!(v["ricci_vanishing"].active());
    }

    #[test]
    fn flat_torus_criteria_false() {
        let inv = CurvatureInvariants::synthetic(4, 0.0, 0.0, 0.0, 0.0);
        for (k, c) in vanishing_report(&inv) {
            assert!(!c.holds, "{k}");
        }
        for r in evaluate_all(&inv, None) {
            assert!(r.value.abs() < 1e-15, "{:?}", r);
        }
    }

    #[test]
    fn ricci_flat_with_nu_vanishes() {
        let mut inv = CurvatureInvariants::synthetic(4, 0.0, 0.0, 0.0, 0.0);
        inv.nu0 = 0.5;
        inv.mu = 0.7;
        inv.zeta = 0.7;
        let v = vanishing_report(&inv);
        assert!(v["weyl_harmonic_vanishing"].active());
        assert!(v["weyl_zero_scalar_vanishing"].active());
        assert!(v["weyl_vanishing"].active());
        assert!(weyl_cor47(&inv).value > 0.0);
    }

    #[test]
    fn family_ids_roundtrip() {
        for f in Family::ALL {
            assert_eq!(Family::from_id(f.id()), Some(f));
            let json = serde_json::to_string(&f).unwrap();
            assert_eq!(json, format!("\"{}\"", f.id()));
        }
    }
}
