//! End-to-end analysis of one manifold: sampling, invariants, every bound
//! family, the spectrum oracle and the identity checks, collected into a
//! serializable [`Report`].

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundResult, Criterion, Family, VANISHING_CRITERIA};
use crate::clifford::build_clifford_rep;
use crate::curvature::{catalog_samples, conformal_torus_scalar, grid_differentiate, parse_grid, ManifoldSpec, PointSample};
use crate::error::{Error, Result};
use crate::invariants::{scan_invariants, CurvatureInvariants, PairSearch, GRID_HYPOTHESIS_FACTOR};
use crate::spectra::{spectrum_for, SpectrumOracle};
use crate::spincurv::{SpinCurvature, SpinResiduals};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Slack for comparing bounds with the oracle's `lambda_1^2`.
pub const ORACLE_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    pub pair: PairSearch,
    /// Relative tolerance of the Hermitian eigen solves.
    pub eig_tolerance: f64,
    /// Also run at half the lattice spacing and report convergence ratios.
    pub grid_refine: bool,
    /// Families to evaluate; the rest are reported as not requested.
    pub families: Option<Vec<Family>>,
    /// Complex dimension, when the caller asserts a Kähler metric.
    pub kahler_m: Option<usize>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            pair: PairSearch::default(),
            eig_tolerance: 1e-10,
            grid_refine: false,
            families: None,
            kahler_m: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub pair: f64,
    pub eig: f64,
    pub seed: u64,
    pub hypothesis: f64,
    pub identity_algebraic: f64,
    pub identity_differential: f64,
    pub oracle_slack: f64,
}

/// Largest residual of every pointwise identity over the distinct samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentitySummary {
    pub residuals: BTreeMap<String, f64>,
    /// Names whose residual exceeds its tolerance.
    pub failures: Vec<String>,
}

/// Identities involving derivatives of the curvature; on lattices they hold
/// only to the order of the stencils.
pub const DIFFERENTIAL_IDENTITIES: [&str; 6] = [
    "contracted_bianchi",
    "ds_trace",
    "delta_c_trace",
    "delta_b_trace",
    "e_f_shift",
    "e_formula",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub spectrum: SpectrumOracle,
    pub best_family: Family,
    pub best_bound: f64,
    /// `lambda_1^2 - best_bound`
    pub margin: f64,
    /// Applicable families whose value exceeds `lambda_1^2`.
    pub exceeding: Vec<Family>,
    /// Active vanishing criteria on a manifold with harmonic spinors.
    pub vanishing_conflicts: Vec<String>,
}

/// Lattice convergence between spacing `h` and `h/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub spacing: [f64; 2],
    /// Max scalar-curvature error against the closed form, when known.
    pub scalar_error: Option<[f64; 2]>,
    pub scalar_ratio: Option<f64>,
    /// Max residual of the differential identities.
    pub residual: [f64; 2],
    pub residual_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub spec: ManifoldSpec,
    pub invariants: CurvatureInvariants,
    pub bounds: Vec<BoundResult>,
    pub vanishing: BTreeMap<String, Criterion>,
    pub oracle: Option<OracleComparison>,
    pub identities: IdentitySummary,
    pub refinement: Option<Refinement>,
    pub tolerances: Tolerances,
}

impl Report {
    pub fn bound(&self, family: Family) -> &BoundResult {
        self.bounds
            .iter()
            .find(|b| b.family == family)
            .expect("every family is present")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Samples for any spec. Grid paths are resolved against `base_dir`.
pub fn load_samples(spec: &ManifoldSpec, base_dir: Option<&Path>) -> Result<Vec<PointSample>> {
    match spec {
        ManifoldSpec::Grid { path } => {
            let full = match base_dir {
                Some(dir) if Path::new(path).is_relative() => dir.join(path),
                _ => Path::new(path).to_path_buf(),
            };
            let text = std::fs::read_to_string(&full).map_err(|e| Error::Io {
                path: full.display().to_string(),
                message: e.to_string(),
            })?;
            grid_differentiate(&parse_grid(&text)?)
        }
        other => catalog_samples(other),
    }
}

fn distinct(samples: &[PointSample]) -> Vec<&PointSample> {
    let mut seen = BTreeMap::new();
    for s in samples {
        seen.entry(s.content_hash()).or_insert(s);
    }
    seen.into_values().collect()
}

fn residual_map(samples: &[PointSample]) -> Result<BTreeMap<String, f64>> {
    let n = samples.first().ok_or(Error::EmptySamples)?.n;
    let rep = build_clifford_rep(n)?;
    let mut spin = SpinResiduals::default();
    let mut out = BTreeMap::new();
    for s in distinct(samples) {
        spin = spin.merge(&SpinCurvature::build(&rep, s)?.residuals(&rep, s)?);
        let r = s.identity_residuals();
        for (k, v) in [
            ("antisymmetry", r.antisymmetry),
            ("pair_symmetry", r.pair_symmetry),
            ("first_bianchi", r.first_bianchi),
            ("ricci_symmetry", r.ricci_symmetry),
            ("weyl_tensor_trace", r.weyl_trace),
            ("decomposition", r.decomposition),
            ("contracted_bianchi", r.contracted_bianchi),
            ("ds_trace", r.ds_trace),
            ("delta_r_antisymmetry", r.delta_r_antisymmetry),
        ] {
            let e = out.entry(k.to_string()).or_insert(0.0f64);
            *e = e.max(v);
        }
    }
    for (k, v) in spin.as_pairs() {
        out.insert(k.to_string(), v);
    }
    Ok(out)
}

/// `(algebraic, differential)` identity tolerances for a sample set.
fn identity_tolerances(samples: &[PointSample]) -> (f64, f64) {
    let curv = samples.iter().map(|s| s.norms.riemann_sq.sqrt()).fold(0.0, f64::max);
    let nabla = samples.iter().map(|s| s.nabla_ric.norm_sq().sqrt()).fold(0.0, f64::max);
    let scale = (1.0 + curv + nabla).powi(2);
    let algebraic = 1e-9 * scale;
    let spacing = samples.iter().filter_map(|s| s.spacing).fold(0.0, f64::max);
    let differential = if samples.iter().all(|s| s.exact) {
        algebraic
    } else {
        algebraic + GRID_HYPOTHESIS_FACTOR * spacing * spacing * scale
    };
    (algebraic, differential)
}

fn summarize_identities(residuals: BTreeMap<String, f64>, algebraic: f64, differential: f64) -> IdentitySummary {
    let failures = residuals
        .iter()
        .filter(|(k, v)| {
            let tol = if DIFFERENTIAL_IDENTITIES.contains(&k.as_str()) { differential } else { algebraic };
            v.is_nan() || **v > tol
        })
        .map(|(k, _)| k.clone())
        .collect();
    IdentitySummary { residuals, failures }
}

fn compare_with_oracle(
    spectrum: SpectrumOracle,
    bounds: &[BoundResult],
    vanishing: &BTreeMap<String, Criterion>,
) -> OracleComparison {
    let applicable = bounds.iter().filter(|b| b.applicable);
    let best = applicable
        .clone()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .expect("the Friedrich bound always applies");
    let exceeding = applicable
        .filter(|b| b.value > spectrum.lambda1_sq + ORACLE_SLACK)
        .map(|b| b.family)
        .collect();
    let vanishing_conflicts = if spectrum.kernel_dim > 0 {
        VANISHING_CRITERIA
            .iter()
            .filter(|k| vanishing.get(**k).is_some_and(Criterion::active))
            .map(|k| k.to_string())
            .collect()
    } else {
        Vec::new()
    };
    OracleComparison {
        best_family: best.family,
        best_bound: best.value,
        margin: spectrum.lambda1_sq - best.value,
        exceeding,
        vanishing_conflicts,
        spectrum,
    }
}

fn refined(spec: &ManifoldSpec) -> Option<ManifoldSpec> {
    match spec {
        ManifoldSpec::ConformalTorus {
            n,
            amplitude,
            nodes,
            transverse,
        } => Some(ManifoldSpec::ConformalTorus {
            n: *n,
            amplitude: *amplitude,
            nodes: 2 * nodes,
            transverse: *transverse,
        }),
        _ => None,
    }
}

fn max_differential(residuals: &BTreeMap<String, f64>) -> f64 {
    DIFFERENTIAL_IDENTITIES
        .iter()
        .filter_map(|k| residuals.get(*k))
        .fold(0.0, |a, &b| a.max(b))
}

fn scalar_error(spec: &ManifoldSpec, samples: &[PointSample]) -> Option<f64> {
    let ManifoldSpec::ConformalTorus { n, amplitude, nodes, .. } = spec else {
        return None;
    };
    let grid = spec.conformal_grid()?;
    let h = 2.0 * std::f64::consts::PI / *nodes as f64;
    Some(
        samples
            .iter()
            .map(|s| (s.scalar - conformal_torus_scalar(*n, *amplitude, grid.coords(s.id)[0] as f64 * h)).abs())
            .fold(0.0, f64::max),
    )
}

/// Convergence between a lattice spec and its refinement. `None` for
/// specs that cannot be refined (closed-form entries, grid files).
pub fn refine(spec: &ManifoldSpec, coarse: &[PointSample]) -> Result<Option<Refinement>> {
    let Some(fine_spec) = refined(spec) else {
        return Ok(None);
    };
    let fine = catalog_samples(&fine_spec)?;
    let spacing = |s: &[PointSample]| s.iter().filter_map(|p| p.spacing).fold(0.0, f64::max);
    let r0 = max_differential(&residual_map(coarse)?);
    let r1 = max_differential(&residual_map(&fine)?);
    let scalar = scalar_error(spec, coarse).zip(scalar_error(&fine_spec, &fine));
    Ok(Some(Refinement {
        spacing: [spacing(coarse), spacing(&fine)],
        scalar_error: scalar.map(|(a, b)| [a, b]),
        scalar_ratio: scalar.map(|(a, b)| a / b),
        residual: [r0, r1],
        residual_ratio: r0 / r1,
    }))
}

/// Runs the whole pipeline on `spec`.
pub fn analyze(spec: &ManifoldSpec, opts: &AnalyzeOptions, base_dir: Option<&Path>) -> Result<Report> {
    let samples = load_samples(spec, base_dir)?;
    analyze_samples(spec, &samples, opts)
}

/// [`analyze`] on samples the caller already has.
pub fn analyze_samples(spec: &ManifoldSpec, samples: &[PointSample], opts: &AnalyzeOptions) -> Result<Report> {
    let n = samples.first().ok_or(Error::EmptySamples)?.n;
    let rep = build_clifford_rep(n)?;
    let invariants = scan_invariants(samples, &rep, &opts.pair, opts.eig_tolerance)?;
    let bounds: Vec<BoundResult> = Family::ALL
        .iter()
        .map(|&f| match &opts.families {
            Some(list) if !list.contains(&f) => bounds::not_requested(&invariants, f),
            _ => bounds::evaluate(&invariants, f, opts.kahler_m),
        })
        .collect();
    let vanishing = bounds::vanishing_report(&invariants);
    let oracle = spectrum_for(spec)?.map(|s| compare_with_oracle(s, &bounds, &vanishing));
    let (algebraic, differential) = identity_tolerances(samples);
    let identities = summarize_identities(residual_map(samples)?, algebraic, differential);
    let refinement = if opts.grid_refine { refine(spec, samples)? } else { None };
    Ok(Report {
        tool_version: TOOL_VERSION.to_string(),
        spec: spec.clone(),
        tolerances: Tolerances {
            pair: opts.pair.tolerance,
            eig: opts.eig_tolerance,
            seed: opts.pair.seed,
            hypothesis: invariants.hypotheses.tolerance,
            identity_algebraic: algebraic,
            identity_differential: differential,
            oracle_slack: ORACLE_SLACK,
        },
        invariants,
        bounds,
        vanishing,
        oracle,
        identities,
        refinement,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Property checks on a finished report.
pub fn verify(report: &Report) -> Verification {
    let mut checks = Vec::new();
    let mut check = |name: &str, passed: bool, detail: String| {
        checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        })
    };

    let once = Family::ALL
        .iter()
        .all(|f| report.bounds.iter().filter(|b| b.family == *f).count() == 1);
    check("families_complete", once && report.bounds.len() == Family::ALL.len(), format!("{} results", report.bounds.len()));

    let ids = &report.identities;
    check(
        "identities",
        ids.failures.is_empty(),
        if ids.failures.is_empty() {
            format!("max residual {:.3e}", ids.residuals.values().fold(0.0f64, |a, &b| a.max(b)))
        } else {
            format!("above tolerance: {}", ids.failures.join(", "))
        },
    );

    let violations = report.invariants.violations();
    check("invariant_consistency", violations.is_empty(), violations.join(", "));

    let friedrich = bounds::friedrich_value(&report.invariants);
    let below: Vec<&str> = report
        .bounds
        .iter()
        .filter(|b| b.applicable && !b.family.is_closed_form() && b.family != Family::Kahler)
        .filter(|b| b.value < friedrich - 1e-12 * (1.0 + friedrich.abs()))
        .map(|b| b.family.id())
        .collect();
    check("dominates_friedrich", below.is_empty(), below.join(", "));

    if let Some(o) = &report.oracle {
        check(
            "bounds_below_spectrum",
            o.exceeding.is_empty(),
            if o.exceeding.is_empty() {
                format!(
                    "lambda_1^2 = {:.12}, best bound {:.12} ({}), margin {:.3e}",
                    o.spectrum.lambda1_sq,
                    o.best_bound,
                    o.best_family.id(),
                    o.margin
                )
            } else {
                let ids: Vec<&str> = o.exceeding.iter().map(|f| f.id()).collect();
                format!("exceed lambda_1^2 = {}: {}", o.spectrum.lambda1_sq, ids.join(", "))
            },
        );
        check(
            "vanishing_sound",
            o.vanishing_conflicts.is_empty(),
            format!("kernel dimension {}; {}", o.spectrum.kernel_dim, o.vanishing_conflicts.join(", ")),
        );
    }
    Verification { checks }
}

/// Bounds table as CSV rows (header first).
pub fn bounds_csv_rows(report: &Report) -> Vec<[String; 7]> {
    let mut rows = vec![[
        "family", "applicable", "t_star", "value", "effective", "improvement", "reason",
    ]
    .map(String::from)];
    for b in &report.bounds {
        rows.push([
            b.family.id().to_string(),
            b.applicable.to_string(),
            b.t_star.map(|t| t.to_string()).unwrap_or_default(),
            b.value.to_string(),
            b.effective.to_string(),
            b.improvement.to_string(),
            b.reason.clone().unwrap_or_default(),
        ]);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_report() {
        let spec = ManifoldSpec::Sphere { n: 4, r: 1.0 };
        let r = analyze(&spec, &AnalyzeOptions::default(), None).unwrap();
        assert!((r.bound(Family::Friedrich).value - 4.0).abs() < 1e-12);
        for f in [Family::WeylThm41, Family::WeylThm45, Family::WeylCor42, Family::WeylCor46] {
            assert!((r.bound(f).value - 4.0).abs() < 1e-9, "{:?}", r.bound(f));
        }
        assert_eq!(r.oracle.as_ref().unwrap().spectrum.lambda1_sq, 4.0);
        assert!(verify(&r).passed(), "{:?}", verify(&r));
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn family_filter() {
        let spec = ManifoldSpec::Sphere { n: 3, r: 1.0 };
        let opts = AnalyzeOptions {
            families: Some(vec![Family::Friedrich]),
            ..Default::default()
        };
        let r = analyze(&spec, &opts, None).unwrap();
        assert_eq!(r.bounds.len(), 14);
        assert!(!r.bound(Family::WeylThm45).applicable);
        assert_eq!(bounds_csv_rows(&r).len(), 15);
    }
}
