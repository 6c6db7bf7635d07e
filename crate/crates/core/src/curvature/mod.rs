//! Pointwise curvature data.
//!
//! Sign conventions: `R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]` and
//! `R_ijkl = g(R(e_i, e_j) e_k, e_l)`, so the unit round sphere has
//! `R_ijkl = d_jk d_il - d_ik d_jl` and `Ric_ij = sum_k R_ikkj = (n-1) d_ij`.
//!
//! Every [`PointSample`] stores its tensors in an orthonormal frame. Norms
//! are full contractions: `|R|^2 = R_ijkl R^ijkl`, `|Ric|^2 = Ric_ij Ric^ij`.

mod catalog;
mod grid;

pub use catalog::{catalog_samples, conformal_torus_scalar, Factor, ManifoldSpec, TorusSpin};
pub use grid::{
    grid_differentiate, parse_grid, point_sample_from_field, render_grid, MetricField, MetricGrid,
};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{kulkarni_nomizu, mat_norm_sq, RMat, Tensor3, Tensor4};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CurvatureNorms {
    pub riemann_sq: f64,
    pub weyl_sq: f64,
    pub ricci_sq: f64,
    /// `|Ric - (S/n) g|^2`
    pub traceless_ricci_sq: f64,
}

#[derive(Clone, Debug)]
pub struct PointSample {
    pub id: usize,
    pub n: usize,
    /// Coordinate metric at the point.
    pub metric: RMat,
    /// Columns are the orthonormal frame vectors in coordinates.
    pub frame: RMat,
    pub riemann: Tensor4,
    pub ricci: RMat,
    pub scalar: f64,
    pub weyl: Tensor4,
    /// `(nabla_{e_a} Ric)(e_b, e_c)`
    pub nabla_ric: Tensor3,
    /// `dS(e_a)`
    pub ds: Vec<f64>,
    /// `g(deltaR(e_i) e_j, e_k)`
    pub delta_r: Tensor3,
    pub norms: CurvatureNorms,
    /// Closed-form (catalog) sample rather than a finite-difference one.
    pub exact: bool,
    /// Grid spacing for finite-difference samples.
    pub spacing: Option<f64>,
}

/// `g(deltaR(e_i) e_j, e_k) = (nabla_j Ric)_{ki} - (nabla_k Ric)_{ji}`.
pub fn delta_r_from_nabla_ric(nabla_ric: &Tensor3) -> Tensor3 {
    Tensor3::from_fn(nabla_ric.n(), |i, j, k| {
        nabla_ric.get(j, k, i) - nabla_ric.get(k, j, i)
    })
}

pub fn ricci_from_riemann(riemann: &Tensor4) -> RMat {
    let n = riemann.n();
    RMat::from_fn(n, n, |i, j| (0..n).map(|k| riemann.get(i, k, k, j)).sum())
}

/// Weyl part of an algebraic curvature tensor in an orthonormal frame,
/// `W = R - (Ric - S/n g) o g / (n-2) - S/(2n(n-1)) g o g`.
fn weyl_part(riemann: &Tensor4, ricci: &RMat, scalar: f64) -> Tensor4 {
    let n = riemann.n();
    if n <= 3 {
        return Tensor4::zeros(n);
    }
    let nf = n as f64;
    let g = RMat::identity(n, n);
    let traceless = ricci - &g * (scalar / nf);
    let mut w = riemann.clone();
    w.add_scaled(&kulkarni_nomizu(&traceless, &g), -1.0 / (nf - 2.0));
    w.add_scaled(&kulkarni_nomizu(&g, &g), -scalar / (2.0 * nf * (nf - 1.0)));
    w
}

fn norms_of(riemann: &Tensor4, weyl: &Tensor4, ricci: &RMat, scalar: f64) -> CurvatureNorms {
    let n = ricci.nrows();
    let traceless = ricci - RMat::identity(n, n) * (scalar / n as f64);
    CurvatureNorms {
        riemann_sq: riemann.norm_sq(),
        weyl_sq: weyl.norm_sq(),
        ricci_sq: mat_norm_sq(ricci),
        traceless_ricci_sq: mat_norm_sq(&traceless),
    }
}

impl PointSample {
    /// Assembles a sample from orthonormal-frame Riemann components and
    /// (optionally) first derivatives of the Ricci tensor.
    pub fn from_frame_data(
        id: usize,
        metric: RMat,
        frame: RMat,
        riemann: Tensor4,
        derivatives: Option<(Tensor3, Vec<f64>)>,
        exact: bool,
    ) -> Self {
        let n = riemann.n();
        let ricci = ricci_from_riemann(&riemann);
        let scalar = ricci.trace();
        let weyl = weyl_part(&riemann, &ricci, scalar);
        let (nabla_ric, ds) = derivatives.unwrap_or_else(|| (Tensor3::zeros(n), vec![0.0; n]));
        let delta_r = delta_r_from_nabla_ric(&nabla_ric);
        let norms = norms_of(&riemann, &weyl, &ricci, scalar);
        Self {
            id,
            n,
            metric,
            frame,
            riemann,
            ricci,
            scalar,
            weyl,
            nabla_ric,
            ds,
            delta_r,
            norms,
            exact,
            spacing: None,
        }
    }

    /// Sample expressed directly in an orthonormal coordinate frame.
    pub fn orthonormal(id: usize, riemann: Tensor4, derivatives: Option<(Tensor3, Vec<f64>)>, exact: bool) -> Self {
        let n = riemann.n();
        Self::from_frame_data(id, RMat::identity(n, n), RMat::identity(n, n), riemann, derivatives, exact)
    }

    pub fn traceless_ricci(&self) -> RMat {
        &self.ricci - RMat::identity(self.n, self.n) * (self.scalar / self.n as f64)
    }

    pub fn ds_norm_sq(&self) -> f64 {
        self.ds.iter().map(|x| x * x).sum()
    }

    /// Ascending eigenvalues of the Ricci endomorphism.
    pub fn ricci_eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.ricci.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    /// `|R|^2 - |W|^2 - 4/(n-2)|Ric - S/n g|^2 - 2 S^2/(n(n-1))`.
    pub fn decomposition_residual(&self) -> f64 {
        let nf = self.n as f64;
        if self.n < 3 {
            // only the scalar part survives
            return self.norms.riemann_sq - 2.0 * self.scalar * self.scalar / (nf * (nf - 1.0));
        }
        self.norms.riemann_sq
            - self.norms.weyl_sq
            - 4.0 / (nf - 2.0) * self.norms.traceless_ricci_sq
            - 2.0 * self.scalar * self.scalar / (nf * (nf - 1.0))
    }

    /// Worst violation of the algebraic and differential identities a
    /// sample must satisfy.
    pub fn identity_residuals(&self) -> SampleResiduals {
        let n = self.n;
        let r = &self.riemann;
        let mut antisym = 0.0f64;
        let mut pair = 0.0f64;
        let mut bianchi = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = r.get(i, j, k, l);
                        antisym = antisym.max((v + r.get(j, i, k, l)).abs());
                        antisym = antisym.max((v + r.get(i, j, l, k)).abs());
                        pair = pair.max((v - r.get(k, l, i, j)).abs());
                        bianchi = bianchi.max((v + r.get(i, k, l, j) + r.get(i, l, j, k)).abs());
                    }
                }
            }
        }
        let mut weyl_trace = 0.0f64;
        for j in 0..n {
            for l in 0..n {
                let t: f64 = (0..n).map(|i| self.weyl.get(i, j, i, l)).sum();
                weyl_trace = weyl_trace.max(t.abs());
            }
        }
        let ricci_symmetry = (&self.ricci - self.ricci.transpose()).abs().max();
        // contracted second Bianchi: sum_a (nabla_a Ric)_{ac} = dS_c / 2
        let mut contracted = 0.0f64;
        let mut trace_ds = 0.0f64;
        for c in 0..n {
            let div: f64 = (0..n).map(|a| self.nabla_ric.get(a, a, c)).sum();
            contracted = contracted.max((div - 0.5 * self.ds[c]).abs());
            let tr: f64 = (0..n).map(|b| self.nabla_ric.get(c, b, b)).sum();
            trace_ds = trace_ds.max((tr - self.ds[c]).abs());
        }
        let mut delta_r_antisym = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    delta_r_antisym = delta_r_antisym
                        .max((self.delta_r.get(i, j, k) + self.delta_r.get(i, k, j)).abs());
                }
            }
        }
        SampleResiduals {
            antisymmetry: antisym,
            pair_symmetry: pair,
            first_bianchi: bianchi,
            ricci_symmetry,
            weyl_trace,
            decomposition: self.decomposition_residual().abs(),
            contracted_bianchi: contracted,
            ds_trace: trace_ds,
            delta_r_antisymmetry: delta_r_antisym,
        }
    }

    /// Content hash over the curvature data; bitwise-identical samples (as
    /// produced along translation-invariant grid directions) collide.
    pub fn content_hash(&self) -> u64 {
        use std::hash::Hasher;
        let mut h = std::collections::hash_map::DefaultHasher::new();
        h.write_usize(self.n);
        self.riemann.bits_hash(&mut h);
        self.nabla_ric.bits_hash(&mut h);
        for x in &self.ds {
            h.write_u64(x.to_bits());
        }
        h.finish()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleResiduals {
    pub antisymmetry: f64,
    pub pair_symmetry: f64,
    pub first_bianchi: f64,
    pub ricci_symmetry: f64,
    pub weyl_trace: f64,
    pub decomposition: f64,
    pub contracted_bianchi: f64,
    pub ds_trace: f64,
    pub delta_r_antisymmetry: f64,
}

impl SampleResiduals {
    pub fn algebraic_max(&self) -> f64 {
        [
            self.antisymmetry,
            self.pair_symmetry,
            self.first_bianchi,
            self.ricci_symmetry,
            self.weyl_trace,
            self.decomposition,
            self.delta_r_antisymmetry,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Recomputes the Weyl tensor and the norm record of `sample`.
///
/// In dimension three the Weyl tensor vanishes identically and is set to
/// zero; below three it is undefined.
pub fn ricci_weyl_split(sample: &PointSample) -> Result<PointSample> {
    if sample.n < 3 {
        return Err(Error::WeylUndefined(sample.n));
    }
    let mut out = sample.clone();
    out.ricci = ricci_from_riemann(&sample.riemann);
    out.scalar = out.ricci.trace();
    out.weyl = weyl_part(&out.riemann, &out.ricci, out.scalar);
    out.norms = norms_of(&out.riemann, &out.weyl, &out.ricci, out.scalar);
    Ok(out)
}

/// Constant-curvature tensor `K (d_jk d_il - d_ik d_jl)`.
pub fn constant_curvature(n: usize, k: f64) -> Tensor4 {
    let g = DMatrix::<f64>::identity(n, n);
    let mut t = Tensor4::zeros(n);
    t.add_scaled(&kulkarni_nomizu(&g, &g), 0.5 * k);
    t
}
