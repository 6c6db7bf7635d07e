use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::{grid_differentiate, MetricGrid};
use super::{constant_curvature, PointSample};
use crate::error::{Error, Result};
use crate::tensor::Tensor4;
#[cfg(test)]
use crate::tensor::RMat;

/// Spin structure of a flat torus, as a per-axis shift of the dual lattice.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusSpin {
    /// Constant spinors are parallel; `D` has a kernel.
    #[default]
    Trivial,
    /// Every axis antiperiodic (shift 1/2).
    Antiperiodic,
    /// Explicit shifts, each 0 or 1/2.
    Shifts(Vec<f64>),
}

impl TorusSpin {
    pub fn shifts(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            TorusSpin::Trivial => Ok(vec![0.0; n]),
            TorusSpin::Antiperiodic => Ok(vec![0.5; n]),
            TorusSpin::Shifts(s) => {
                if s.len() != n {
                    return Err(Error::ShapeMismatch {
                        expected: n,
                        got: s.len(),
                    });
                }
                if s.iter().any(|&d| d != 0.0 && d != 0.5) {
                    return Err(Error::InvalidParameter(
                        "torus spin shifts must be 0 or 0.5".into(),
                    ));
                }
                Ok(s.clone())
            }
        }
    }
}

fn default_period() -> f64 {
    2.0 * PI
}

fn default_amplitude() -> f64 {
    0.05
}

fn default_nodes() -> usize {
    16
}

fn default_transverse() -> usize {
    5
}

/// Factor of a Riemannian product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Factor {
    Sphere {
        n: usize,
        #[serde(default = "one")]
        r: f64,
    },
    Torus {
        n: usize,
        #[serde(default = "default_period")]
        period: f64,
        #[serde(default)]
        spin: TorusSpin,
    },
}

fn one() -> f64 {
    1.0
}

/// Input geometry: a closed-form catalog entry or a metric sampled on a
/// periodic lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifoldSpec {
    /// Round sphere of radius `r`.
    Sphere {
        n: usize,
        #[serde(default = "one")]
        r: f64,
    },
    /// Flat torus `R^n / (period Z)^n`.
    Torus {
        n: usize,
        #[serde(default = "default_period")]
        period: f64,
        #[serde(default)]
        spin: TorusSpin,
    },
    /// Riemannian product of spheres and flat tori.
    Product { factors: Vec<Factor> },
    /// `g = exp(2 a sin x_1) delta` on a lattice with `nodes` points along
    /// `x_1` (period `2 pi`) and `transverse` points along the other axes.
    ConformalTorus {
        n: usize,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default = "default_nodes")]
        nodes: usize,
        #[serde(default = "default_transverse")]
        transverse: usize,
    },
    /// Metric samples read from a grid file.
    Grid { path: String },
}

impl Factor {
    pub fn dim(&self) -> usize {
        match self {
            Factor::Sphere { n, .. } | Factor::Torus { n, .. } => *n,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Factor::Sphere { n, r } => {
                if *n < 2 {
                    return Err(Error::InvalidParameter(format!("sphere dimension {n} < 2")));
                }
                if !(*r > 0.0 && r.is_finite()) {
                    return Err(Error::InvalidParameter(format!("sphere radius {r} must be positive")));
                }
            }
            Factor::Torus { n, period, spin } => {
                if *n < 1 {
                    return Err(Error::InvalidParameter("torus dimension must be >= 1".into()));
                }
                if !(*period > 0.0 && period.is_finite()) {
                    return Err(Error::InvalidParameter(format!("torus period {period} must be positive")));
                }
                spin.shifts(*n)?;
            }
        }
        Ok(())
    }

    fn riemann(&self) -> Tensor4 {
        match self {
            Factor::Sphere { n, r } => constant_curvature(*n, 1.0 / (r * r)),
            Factor::Torus { n, .. } => Tensor4::zeros(*n),
        }
    }
}

impl ManifoldSpec {
    /// Total dimension, when known without reading external data.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ManifoldSpec::Sphere { n, .. }
            | ManifoldSpec::Torus { n, .. }
            | ManifoldSpec::ConformalTorus { n, .. } => Some(*n),
            ManifoldSpec::Product { factors } => Some(factors.iter().map(Factor::dim).sum()),
            ManifoldSpec::Grid { .. } => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ManifoldSpec::Sphere { .. } => "sphere",
            ManifoldSpec::Torus { .. } => "torus",
            ManifoldSpec::Product { .. } => "product",
            ManifoldSpec::ConformalTorus { .. } => "conformal_torus",
            ManifoldSpec::Grid { .. } => "grid",
        }
    }

    /// Lattice for the conformally perturbed torus; `None` for other kinds.
    pub fn conformal_grid(&self) -> Option<MetricGrid> {
        match self {
            ManifoldSpec::ConformalTorus {
                n,
                amplitude,
                nodes,
                transverse,
            } => Some(MetricGrid::conformal_torus(*n, *amplitude, *nodes, *transverse)),
            _ => None,
        }
    }
}

/// Closed-form scalar curvature of the conformal torus
/// `exp(2 a sin x_1) delta` at coordinate `x_1`.
pub fn conformal_torus_scalar(n: usize, amplitude: f64, x1: f64) -> f64 {
    let nf = n as f64;
    let phi = amplitude * x1.sin();
    let lap = -amplitude * x1.sin();
    let grad_sq = (amplitude * x1.cos()).powi(2);
    -(-2.0 * phi).exp() * (2.0 * (nf - 1.0) * lap + (nf - 2.0) * (nf - 1.0) * grad_sq)
}

/// Point samples for a catalog entry. Homogeneous entries produce a single
/// exact sample; the conformal torus is differentiated on its lattice.
/// `Grid` specs must be loaded by the caller (see [`super::parse_grid`]).
pub fn catalog_samples(spec: &ManifoldSpec) -> Result<Vec<PointSample>> {
    match spec {
        ManifoldSpec::Sphere { n, r } => {
            let f = Factor::Sphere { n: *n, r: *r };
            f.validate()?;
            Ok(vec![PointSample::orthonormal(0, f.riemann(), None, true)])
        }
        ManifoldSpec::Torus { n, period, spin } => {
            let f = Factor::Torus {
                n: *n,
                period: *period,
                spin: spin.clone(),
            };
            f.validate()?;
            if *n < 2 {
                return Err(Error::InvalidParameter("torus dimension must be >= 2".into()));
            }
            Ok(vec![PointSample::orthonormal(0, f.riemann(), None, true)])
        }
        ManifoldSpec::Product { factors } => {
            if factors.len() < 2 {
                return Err(Error::InvalidParameter("a product needs at least two factors".into()));
            }
            for f in factors {
                f.validate()?;
            }
            let n: usize = factors.iter().map(Factor::dim).sum();
            let mut r = Tensor4::zeros(n);
            let mut offset = 0;
            for f in factors {
                f.riemann().embed(n, offset, &mut r);
                offset += f.dim();
            }
            Ok(vec![PointSample::orthonormal(0, r, None, true)])
        }
        ManifoldSpec::ConformalTorus {
            n,
            amplitude,
            nodes,
            transverse,
        } => {
            if *n < 2 {
                return Err(Error::InvalidParameter("conformal torus dimension must be >= 2".into()));
            }
            if !amplitude.is_finite() {
                return Err(Error::InvalidParameter("amplitude must be finite".into()));
            }
            let grid = MetricGrid::conformal_torus(*n, *amplitude, *nodes, *transverse);
            grid_differentiate(&grid)
        }
        ManifoldSpec::Grid { path } => Err(Error::InvalidParameter(format!(
            "grid spec `{path}` must be loaded before sampling"
        ))),
    }
}
