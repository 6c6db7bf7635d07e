//! Closed-form Dirac spectra of the catalog manifolds, used as ground truth
//! for the bounds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curvature::{Factor, ManifoldSpec};
use crate::error::{Error, Result};

/// Levels listed for spheres and products.
pub const DEFAULT_LEVELS: usize = 8;

/// One nonzero eigenvalue magnitude. The spectrum is symmetric, so
/// `+abs` and `-abs` each occur with half of `multiplicity`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub abs: f64,
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOracle {
    pub manifold: String,
    pub dim: usize,
    /// Nonzero levels, increasing in `abs`.
    pub levels: Vec<Level>,
    pub lambda1_sq: f64,
    pub kernel_dim: u64,
}

impl SpectrumOracle {
    fn new(manifold: String, dim: usize, mut levels: Vec<Level>, kernel_dim: u64) -> Self {
        levels.sort_by(|a, b| a.abs.total_cmp(&b.abs));
        let lambda1_sq = if kernel_dim > 0 {
            0.0
        } else {
            levels.first().map_or(f64::INFINITY, |l| l.abs * l.abs)
        };
        Self {
            manifold,
            dim,
            levels,
            lambda1_sq,
            kernel_dim,
        }
    }

    /// Signed eigenvalues with multiplicities, ordered by `|lambda|`.
    pub fn signed(&self) -> Vec<(f64, u64)> {
        let mut out = Vec::with_capacity(2 * self.levels.len() + 1);
        if self.kernel_dim > 0 {
            out.push((0.0, self.kernel_dim));
        }
        for l in &self.levels {
            out.push((-l.abs, l.multiplicity / 2));
            out.push((l.abs, l.multiplicity / 2));
        }
        out
    }
}

fn spinor_rank(n: usize) -> u64 {
    1 << (n / 2)
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `S^n(r)`: `lambda = +-(n/2 + k)/r`, each sign with multiplicity
/// `2^floor(n/2) * C(k+n-1, k)`.
pub fn sphere_spectrum(n: usize, r: f64, count: usize) -> Result<SpectrumOracle> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("sphere dimension {n} < 2")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("sphere radius {r} must be positive")));
    }
    let levels = (0..count as u64)
        .map(|k| Level {
            abs: (n as f64 / 2.0 + k as f64) / r,
            multiplicity: 2 * spinor_rank(n) * binomial(k + n as u64 - 1, k),
        })
        .collect();
    Ok(SpectrumOracle::new(format!("S^{n}({r})"), n, levels, 0))
}

/// Flat torus `R^n / (period Z)^n` with spin structure given by per-axis
/// shifts in `{0, 1/2}`: `|lambda| = (2 pi / period) |v + delta|` over
/// integer vectors `v`, each contributing `2^floor(n/2)`. Levels up to
/// `cutoff` are listed; the kernel is always reported.
pub fn torus_spectrum(n: usize, period: f64, shifts: &[f64], cutoff: f64) -> Result<SpectrumOracle> {
    if n < 1 || shifts.len() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            got: shifts.len(),
        });
    }
    if shifts.iter().any(|&d| d != 0.0 && d != 0.5) {
        return Err(Error::InvalidParameter("torus spin shifts must be 0 or 0.5".into()));
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidParameter(format!("torus period {period} must be positive")));
    }
    let scale = 2.0 * PI / period;
    // |v + delta|^2 is a quarter-integer; count lattice points per 4|v+delta|^2
    let radius = (cutoff / scale).max(0.0);
    let max_key = (4.0 * radius * radius + 1e-9).floor() as u64;
    let twice: Vec<i64> = shifts.iter().map(|&d| (2.0 * d) as i64).collect();
    let mut counts = std::collections::BTreeMap::<u64, u64>::new();
    let bound = radius.ceil() as i64 + 1;
    enumerate(&twice, 0, 0, max_key, bound, &mut counts);
    let rank = spinor_rank(n);
    let kernel_dim = counts.remove(&0).unwrap_or(0) * rank;
    let levels = counts
        .into_iter()
        .map(|(key, c)| Level {
            abs: scale * (key as f64).sqrt() / 2.0,
            multiplicity: c * rank,
        })
        .collect();
    Ok(SpectrumOracle::new(format!("T^{n}({period})"), n, levels, kernel_dim))
}

/// Counts integer vectors by `sum (2 v_i + s_i)^2` (which equals
/// `4 |v + delta|^2`), pruned at `max_key`.
fn enumerate(twice: &[i64], axis: usize, partial: u64, max_key: u64, bound: i64, out: &mut std::collections::BTreeMap<u64, u64>) {
    if axis == twice.len() {
        *out.entry(partial).or_default() += 1;
        return;
    }
    for v in -bound..=bound {
        let c = (2 * v + twice[axis]).unsigned_abs();
        let key = partial + c * c;
        if key <= max_key {
            enumerate(twice, axis + 1, key, max_key, bound, out);
        }
    }
}

/// Riemannian product: `lambda^2 = lambda_a^2 + lambda_b^2` with
/// multiplicities multiplying. At least one factor must be
/// even-dimensional. Only levels below the smaller of the two inputs'
/// largest listed level are complete, so the result stops there.
pub fn product_spectrum(a: &SpectrumOracle, b: &SpectrumOracle, count: usize) -> Result<SpectrumOracle> {
    if a.dim % 2 == 1 && b.dim % 2 == 1 {
        return Err(Error::OddProduct(a.dim, b.dim));
    }
    let with_zero = |o: &SpectrumOracle| {
        let mut v: Vec<(f64, u64)> = Vec::new();
        if o.kernel_dim > 0 {
            v.push((0.0, o.kernel_dim));
        }
        v.extend(o.levels.iter().map(|l| (l.abs * l.abs, l.multiplicity)));
        v
    };
    let (la, lb) = (with_zero(a), with_zero(b));
    let top = |v: &[(f64, u64)]| v.last().map_or(0.0, |l| l.0);
    let complete = top(&la).min(top(&lb));
    let mut sums: Vec<(f64, u64)> = Vec::new();
    for &(xa, ma) in &la {
        for &(xb, mb) in &lb {
            let s = xa + xb;
            if s <= complete * (1.0 + 1e-12) {
                sums.push((s, ma * mb));
            }
        }
    }
    sums.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, u64)> = Vec::new();
    for (s, m) in sums {
        match merged.last_mut() {
            Some(last) if (s - last.0).abs() <= 1e-12 * s.max(1.0) => last.1 += m,
            _ => merged.push((s, m)),
        }
    }
    let mut kernel_dim = 0;
    let mut levels = Vec::new();
    let lowest_sq = merged.iter().map(|l| l.0).find(|&s| s > 0.0);
    for (s, m) in merged {
        if s == 0.0 {
            kernel_dim = m;
        } else if levels.len() < count {
            levels.push(Level { abs: s.sqrt(), multiplicity: m });
        }
    }
    let mut out = SpectrumOracle::new(format!("{} x {}", a.manifold, b.manifold), a.dim + b.dim, levels, kernel_dim);
    if let (0, Some(s)) = (kernel_dim, lowest_sq) {
        // avoid the sqrt round trip
        out.lambda1_sq = s;
    }
    Ok(out)
}

fn torus_cutoff(n: usize, period: f64) -> f64 {
    // a few shells; fewer in high dimension where shells are crowded
    let shells = if n <= 5 { 3.0 } else { 2.0 };
    shells * 2.0 * PI / period
}

fn factor_spectrum(f: &Factor) -> Result<SpectrumOracle> {
    match f {
        Factor::Sphere { n, r } => sphere_spectrum(*n, *r, 2 * DEFAULT_LEVELS),
        Factor::Torus { n, period, spin } => torus_spectrum(*n, *period, &spin.shifts(*n)?, torus_cutoff(*n, *period)),
    }
}

/// Oracle for a catalog spec; `None` for lattice geometries.
pub fn spectrum_for(spec: &ManifoldSpec) -> Result<Option<SpectrumOracle>> {
    Ok(Some(match spec {
        ManifoldSpec::Sphere { n, r } => sphere_spectrum(*n, *r, DEFAULT_LEVELS)?,
        ManifoldSpec::Torus { n, period, spin } => {
            torus_spectrum(*n, *period, &spin.shifts(*n)?, torus_cutoff(*n, *period))?
        }
        ManifoldSpec::Product { factors } => {
            // fold even-dimensional factors first so every step has one
            let mut ordered: Vec<&Factor> = factors.iter().filter(|f| f.dim() % 2 == 0).collect();
            ordered.extend(factors.iter().filter(|f| f.dim() % 2 == 1));
            let Some((first, rest)) = ordered.split_first() else {
                return Err(Error::InvalidParameter("a product needs at least one factor".into()));
            };
            let mut acc = factor_spectrum(first)?;
            for f in rest {
                acc = product_spectrum(&acc, &factor_spectrum(f)?, 2 * DEFAULT_LEVELS)?;
            }
            acc.levels.truncate(DEFAULT_LEVELS);
            acc
        }
        ManifoldSpec::ConformalTorus { .. } | ManifoldSpec::Grid { .. } => return Ok(None),
    }))
}
