//! Curvature endomorphisms of the spinor bundle at a single point.
//!
//! With an orthonormal frame `e_1..e_n` and the Clifford generators `g_k`:
//!
//! * `C(e_i, e_j) = 1/4 sum_kl R_ijkl g_k g_l`, and `B` the same with `W`;
//! * `C2(X, Y) = sum_j C(Y, e_j) C(e_j, X)`, `G = sum_k C2(e_k, e_k)`,
//!   `H` likewise from `B`;
//! * `dC(X) = 1/4 sum_kl dR(X)_kl g_k g_l`,
//!   `dB(X) = dC(X) + (X.dS - dS.X) / (8(n-1))`;
//! * `E = -sum_k dC(e_k)^2`, `F = -sum_k dB(e_k)^2`, `Es = E - |dS|^2/(16n)`.

use serde::{Deserialize, Serialize};

use crate::clifford::CliffordRep;
use crate::curvature::PointSample;
use crate::error::{Error, Result};
use crate::linalg::{
    anti_hermitian_residual, c, frobenius, hermitian_eigenvalues, hermitian_residual,
    identity_coefficient, off_identity_residual, CMat, CVec, ZERO,
};
use crate::tensor::{Tensor3, Tensor4};

/// Relative tolerance for the symmetry verified on construction.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    AntiSelfadjoint,
    Selfadjoint,
    SelfadjointNonnegative,
    None,
}

impl Symmetry {
    fn name(self) -> &'static str {
        match self {
            Symmetry::AntiSelfadjoint => "anti-selfadjoint",
            Symmetry::Selfadjoint => "selfadjoint",
            Symmetry::SelfadjointNonnegative => "selfadjoint nonnegative",
            Symmetry::None => "none",
        }
    }
}

/// An endomorphism of the spinor space at a point, with a verified
/// symmetry claim.
#[derive(Clone, Debug)]
pub struct SpinorEndo {
    pub matrix: CMat,
    pub symmetry: Symmetry,
}

impl SpinorEndo {
    /// Wraps `matrix`, checking the claimed symmetry to
    /// [`SYMMETRY_TOL`]` * max(1, ||M||_F)`.
    pub fn new(matrix: CMat, symmetry: Symmetry, what: &'static str) -> Result<Self> {
        let scale = frobenius(&matrix).max(1.0);
        let residual = match symmetry {
            Symmetry::AntiSelfadjoint => anti_hermitian_residual(&matrix),
            Symmetry::Selfadjoint => hermitian_residual(&matrix),
            Symmetry::SelfadjointNonnegative => {
                let h = hermitian_residual(&matrix);
                if h > SYMMETRY_TOL * scale {
                    h
                } else {
                    let lo = hermitian_eigenvalues(&hermitianize(&matrix))
                        .first()
                        .copied()
                        .unwrap_or(0.0);
                    (-lo).max(0.0)
                }
            }
            Symmetry::None => 0.0,
        };
        if residual > SYMMETRY_TOL * scale {
            return Err(Error::Symmetry {
                what,
                claim: symmetry.name(),
                residual,
            });
        }
        Ok(Self { matrix, symmetry })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&hermitianize(&self.matrix))
    }
}

fn hermitianize(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5)
}

fn check_dims(rep: &CliffordRep, sample: &PointSample) -> Result<()> {
    if rep.n() != sample.n {
        return Err(Error::ShapeMismatch {
            expected: rep.n(),
            got: sample.n,
        });
    }
    Ok(())
}

fn check_index(index: usize, n: usize) -> Result<()> {
    if index >= n {
        return Err(Error::FrameIndex { index, n });
    }
    Ok(())
}

/// Products `g_k g_l`, row-major in `(k, l)`.
fn bivectors(rep: &CliffordRep) -> Vec<CMat> {
    let n = rep.n();
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            out.push(rep.gamma(k) * rep.gamma(l));
        }
    }
    out
}

/// `1/4 sum_kl t(k, l) g_k g_l`.
fn quarter_bivector(rep: &CliffordRep, biv: &[CMat], t: impl Fn(usize, usize) -> f64) -> CMat {
    let n = rep.n();
    let mut m = rep.zeros();
    for k in 0..n {
        for l in 0..n {
            let v = t(k, l);
            if v != 0.0 {
                m += &biv[k * n + l] * c(0.25 * v);
            }
        }
    }
    m
}

/// Pair table `T(e_i, e_j)` of a curvature-type tensor, row-major in `(i, j)`.
fn pair_table(rep: &CliffordRep, biv: &[CMat], r: &Tensor4) -> Vec<CMat> {
    let n = rep.n();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(quarter_bivector(rep, biv, |k, l| r.get(i, j, k, l)));
        }
    }
    out
}

/// `sum_j T(Y, e_j) T(e_j, X)`: the `C2`/`B2` construction.
fn square(table: &[CMat], n: usize, x: usize, y: usize) -> CMat {
    let dim = table[0].nrows();
    let mut m = CMat::zeros(dim, dim);
    for j in 0..n {
        m += &table[y * n + j] * &table[j * n + x];
    }
    m
}

fn contracted_square(table: &[CMat], n: usize) -> CMat {
    let dim = table[0].nrows();
    let mut m = CMat::zeros(dim, dim);
    for k in 0..n {
        m += square(table, n, k, k);
    }
    m
}

/// `T(X, Y) = sum_ij X_i Y_j T(e_i, e_j)` for frame components `x`, `y`.
pub fn pair_endo(table: &[CMat], n: usize, x: &[f64], y: &[f64]) -> CMat {
    let dim = table[0].nrows();
    let mut m = CMat::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            let w = x[i] * y[j] - x[j] * y[i];
            if i < j && w != 0.0 {
                m += &table[i * n + j] * c(w);
            }
        }
    }
    m
}

fn delta_table(rep: &CliffordRep, biv: &[CMat], delta_r: &Tensor3) -> Vec<CMat> {
    (0..rep.n())
        .map(|i| quarter_bivector(rep, biv, |k, l| delta_r.get(i, k, l)))
        .collect()
}

/// `dC(e_i) = 1/4 sum_k (g_k . v_k - v_k . g_k)` with the vectors
/// `v_k = (nabla_k Ric)(e_i)`, evaluated without forming `dR`.
fn delta_c_direct(rep: &CliffordRep, sample: &PointSample) -> Vec<CMat> {
    let n = rep.n();
    (0..n)
        .map(|i| {
            let mut m = rep.zeros();
            for k in 0..n {
                let v: Vec<f64> = (0..n).map(|l| sample.nabla_ric.get(k, i, l)).collect();
                let vm = rep.vector(&v).expect("frame dimension");
                m += (rep.gamma(k) * &vm - &vm * rep.gamma(k)) * c(0.25);
            }
            m
        })
        .collect()
}

fn delta_b_from_c(rep: &CliffordRep, delta_c: &[CMat], ds: &[f64]) -> Vec<CMat> {
    let n = rep.n();
    let dsm = rep.vector(ds).expect("frame dimension");
    let w = 1.0 / (8.0 * (n as f64 - 1.0));
    (0..n)
        .map(|i| &delta_c[i] + (rep.gamma(i) * &dsm - &dsm * rep.gamma(i)) * c(w))
        .collect()
}

fn negative_square_sum(ms: &[CMat]) -> CMat {
    let dim = ms[0].nrows();
    let mut m = CMat::zeros(dim, dim);
    for a in ms {
        m -= a * a;
    }
    m
}

fn check_derivatives(sample: &PointSample) -> Result<()> {
    if sample.ds.len() != sample.n || sample.nabla_ric.n() != sample.n || sample.delta_r.n() != sample.n {
        return Err(Error::MissingDerivatives);
    }
    Ok(())
}

/// `C(e_x, e_y)` at `sample`.
pub fn curvature_endo_c(rep: &CliffordRep, sample: &PointSample, x: usize, y: usize) -> Result<SpinorEndo> {
    check_dims(rep, sample)?;
    check_index(x, sample.n)?;
    check_index(y, sample.n)?;
    let biv = bivectors(rep);
    let m = quarter_bivector(rep, &biv, |k, l| sample.riemann.get(x, y, k, l));
    SpinorEndo::new(m, Symmetry::AntiSelfadjoint, "C")
}

/// `B(e_x, e_y)` at `sample`.
pub fn weyl_endo_b(rep: &CliffordRep, sample: &PointSample, x: usize, y: usize) -> Result<SpinorEndo> {
    check_dims(rep, sample)?;
    check_index(x, sample.n)?;
    check_index(y, sample.n)?;
    let biv = bivectors(rep);
    let m = quarter_bivector(rep, &biv, |k, l| sample.weyl.get(x, y, k, l));
    SpinorEndo::new(m, Symmetry::AntiSelfadjoint, "B")
}

/// `(G, H)` at `sample`.
pub fn build_g_h(rep: &CliffordRep, sample: &PointSample) -> Result<(SpinorEndo, SpinorEndo)> {
    let s = SpinCurvature::build(rep, sample)?;
    Ok((s.g, s.h))
}

/// `(dC(e_k), dB(e_k))_k` at `sample`.
pub fn build_delta_c_delta_b(
    rep: &CliffordRep,
    sample: &PointSample,
) -> Result<(Vec<SpinorEndo>, Vec<SpinorEndo>)> {
    let s = SpinCurvature::build(rep, sample)?;
    Ok((s.delta_c, s.delta_b))
}

/// `(E, F, Es)` at `sample`.
pub fn build_e_f_script(rep: &CliffordRep, sample: &PointSample) -> Result<(SpinorEndo, SpinorEndo, SpinorEndo)> {
    let s = SpinCurvature::build(rep, sample)?;
    Ok((s.e, s.f, s.script_e))
}

/// Every spinor endomorphism derived from one point sample.
#[derive(Clone, Debug)]
pub struct SpinCurvature {
    pub n: usize,
    c_table: Vec<CMat>,
    b_table: Vec<CMat>,
    pub g: SpinorEndo,
    pub h: SpinorEndo,
    pub delta_c: Vec<SpinorEndo>,
    pub delta_b: Vec<SpinorEndo>,
    pub e: SpinorEndo,
    pub f: SpinorEndo,
    pub script_e: SpinorEndo,
}

impl SpinCurvature {
    pub fn build(rep: &CliffordRep, sample: &PointSample) -> Result<Self> {
        check_dims(rep, sample)?;
        check_derivatives(sample)?;
        let n = sample.n;
        let biv = bivectors(rep);
        let c_table = pair_table(rep, &biv, &sample.riemann);
        let b_table = pair_table(rep, &biv, &sample.weyl);
        for m in &c_table {
            SpinorEndo::new(m.clone(), Symmetry::AntiSelfadjoint, "C")?;
        }
        for m in &b_table {
            SpinorEndo::new(m.clone(), Symmetry::AntiSelfadjoint, "B")?;
        }
        let g = SpinorEndo::new(contracted_square(&c_table, n), Symmetry::SelfadjointNonnegative, "G")?;
        let h = SpinorEndo::new(contracted_square(&b_table, n), Symmetry::SelfadjointNonnegative, "H")?;

        let dc = delta_table(rep, &biv, &sample.delta_r);
        let db = delta_b_from_c(rep, &dc, &sample.ds);
        let e_mat = negative_square_sum(&dc);
        let f_mat = negative_square_sum(&db);
        let script = &e_mat - rep.identity() * c(sample.ds_norm_sq() / (16.0 * n as f64));
        let delta_c = dc
            .into_iter()
            .map(|m| SpinorEndo::new(m, Symmetry::AntiSelfadjoint, "dC"))
            .collect::<Result<Vec<_>>>()?;
        let delta_b = db
            .into_iter()
            .map(|m| SpinorEndo::new(m, Symmetry::AntiSelfadjoint, "dB"))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            g,
            h,
            delta_c,
            delta_b,
            e: SpinorEndo::new(e_mat, Symmetry::SelfadjointNonnegative, "E")?,
            f: SpinorEndo::new(f_mat, Symmetry::SelfadjointNonnegative, "F")?,
            script_e: SpinorEndo::new(script, Symmetry::Selfadjoint, "script E")?,
            c_table,
            b_table,
        })
    }

    /// `C(e_i, e_j)`.
    pub fn c(&self, i: usize, j: usize) -> &CMat {
        &self.c_table[i * self.n + j]
    }

    /// `B(e_i, e_j)`.
    pub fn b(&self, i: usize, j: usize) -> &CMat {
        &self.b_table[i * self.n + j]
    }

    pub fn c_table(&self) -> &[CMat] {
        &self.c_table
    }

    pub fn b_table(&self) -> &[CMat] {
        &self.b_table
    }

    /// `C2(e_x, e_y)`.
    pub fn c_square(&self, x: usize, y: usize) -> CMat {
        square(&self.c_table, self.n, x, y)
    }

    /// `B2(e_x, e_y)`.
    pub fn b_square(&self, x: usize, y: usize) -> CMat {
        square(&self.b_table, self.n, x, y)
    }

    /// Residuals of the pointwise identities satisfied by the spinor
    /// endomorphisms at `sample` (which must be the sample `self` was built
    /// from).
    pub fn residuals(&self, rep: &CliffordRep, sample: &PointSample) -> Result<SpinResiduals> {
        check_dims(rep, sample)?;
        let n = self.n;
        let nf = n as f64;
        let mut ricci_trace = 0.0f64;
        let mut weyl_trace = 0.0f64;
        for j in 0..n {
            let ric_j: Vec<f64> = (0..n).map(|l| sample.ricci[(j, l)]).collect();
            let half_ric = rep.vector(&ric_j)? * c(0.5);
            let mut left_c = rep.zeros();
            let mut right_c = rep.zeros();
            let mut left_b = rep.zeros();
            let mut right_b = rep.zeros();
            for k in 0..n {
                left_c += rep.gamma(k) * self.c(k, j);
                right_c += self.c(k, j) * rep.gamma(k);
                left_b += rep.gamma(k) * self.b(k, j);
                right_b += self.b(k, j) * rep.gamma(k);
            }
            ricci_trace = ricci_trace
                .max(frobenius(&(&left_c - &half_ric)))
                .max(frobenius(&(&right_c + &half_ric)));
            weyl_trace = weyl_trace.max(frobenius(&left_b)).max(frobenius(&right_b));
        }

        // G - H is the scalar (|R|^2 - |W|^2)/8
        let diff = &self.g.matrix - &self.h.matrix;
        let expected = (sample.norms.riemann_sq - sample.norms.weyl_sq) / 8.0;
        let g_minus_h_off_identity = off_identity_residual(&diff);
        let g_minus_h_coefficient = (identity_coefficient(&diff) - expected).abs();

        let parts = rep.degree_decompose(&self.h.matrix)?;
        let h0_coefficient = (identity_coefficient(&parts[0]) - sample.norms.weyl_sq / 8.0).abs();
        let h2_norm = frobenius(&parts[2]);

        let dsm = rep.vector(&sample.ds)?;
        let mut tr_c = rep.zeros();
        let mut tr_b = rep.zeros();
        for k in 0..n {
            tr_c += rep.gamma(k) * &self.delta_c[k].matrix;
            tr_b += rep.gamma(k) * &self.delta_b[k].matrix;
        }
        let delta_c_trace = frobenius(&(tr_c - &dsm * c(0.25)));
        let delta_b_trace = frobenius(&tr_b);

        let direct = delta_c_direct(rep, sample);
        let delta_c_routes = direct
            .iter()
            .zip(&self.delta_c)
            .map(|(a, b)| frobenius(&(a - &b.matrix)))
            .fold(0.0, f64::max);

        let ds_sq = sample.ds_norm_sq();
        let e_minus_f = &self.e.matrix - &self.f.matrix - rep.identity() * c(ds_sq / (16.0 * (nf - 1.0)));
        let e_f_shift = frobenius(&e_minus_f);

        let e_formula = frobenius(&(&self.e.matrix - e_commutator_form(rep, &sample.nabla_ric, &sample.ds)));

        Ok(SpinResiduals {
            ricci_trace,
            weyl_trace,
            g_minus_h_off_identity,
            g_minus_h_coefficient,
            h0_coefficient,
            h2_norm,
            delta_c_trace,
            delta_b_trace,
            delta_c_routes,
            e_f_shift,
            e_formula,
        })
    }
}

/// `E` rebuilt from the Ricci derivative alone:
/// `1/4 |nabla Ric|^2 - 1/16 |dS|^2 + 1/8 sum_jkl [N_j, N_k](e_l) . g_j g_k g_l`
/// with `N_a = nabla_{e_a} Ric`.
pub fn e_commutator_form(rep: &CliffordRep, nabla_ric: &Tensor3, ds: &[f64]) -> CMat {
    let n = rep.n();
    let ds_sq: f64 = ds.iter().map(|x| x * x).sum();
    let mut m = rep.identity() * c(0.25 * nabla_ric.norm_sq() - ds_sq / 16.0);
    let slices: Vec<_> = (0..n).map(|a| nabla_ric.slice(a)).collect();
    for j in 0..n {
        for k in (j + 1)..n {
            let comm = &slices[j] * &slices[k] - &slices[k] * &slices[j];
            if comm.amax() == 0.0 {
                continue;
            }
            // the (j, k) and (k, j) terms are equal, so each pair counts twice
            let jk = rep.gamma(j) * rep.gamma(k);
            for l in 0..n {
                let v: Vec<f64> = (0..n).map(|a| comm[(a, l)]).collect();
                let vm = rep.vector(&v).expect("frame dimension");
                m += vm * &jk * rep.gamma(l) * c(0.25);
            }
        }
    }
    m
}

/// Residuals of the pointwise spinor identities. All are Frobenius norms
/// or absolute scalar differences.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpinResiduals {
    /// `sum_k g_k C(e_k, X) = Ric(X)/2 = -sum_k C(e_k, X) g_k`; the two
    /// sides have opposite signs since `{g_k, C(e_k, X)}` is pure degree 3
    /// and vanishes by the first Bianchi identity.
    pub ricci_trace: f64,
    /// `sum_k g_k B(e_k, X) = 0 = sum_k B(e_k, X) g_k`
    pub weyl_trace: f64,
    /// `G - H` is a multiple of the identity ...
    pub g_minus_h_off_identity: f64,
    /// ... namely `(|R|^2 - |W|^2)/8`
    pub g_minus_h_coefficient: f64,
    /// degree-0 part of `H` is `|W|^2/8`
    pub h0_coefficient: f64,
    /// degree-2 part of `H` vanishes
    pub h2_norm: f64,
    /// `sum_k g_k dC(e_k) = dS/4`
    pub delta_c_trace: f64,
    /// `sum_k g_k dB(e_k) = 0`
    pub delta_b_trace: f64,
    /// `dC` from `dR` versus from `nabla Ric` directly
    pub delta_c_routes: f64,
    /// `E - F = |dS|^2 / (16(n-1))`
    pub e_f_shift: f64,
    /// `E` versus its commutator expression in `nabla Ric`
    pub e_formula: f64,
}

impl SpinResiduals {
    pub fn max(&self) -> f64 {
        self.as_pairs().iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }

    pub fn as_pairs(&self) -> [(&'static str, f64); 11] {
        [
            ("ricci_trace", self.ricci_trace),
            ("weyl_trace", self.weyl_trace),
            ("g_minus_h_off_identity", self.g_minus_h_off_identity),
            ("g_minus_h_coefficient", self.g_minus_h_coefficient),
            ("h0_coefficient", self.h0_coefficient),
            ("h2_norm", self.h2_norm),
            ("delta_c_trace", self.delta_c_trace),
            ("delta_b_trace", self.delta_b_trace),
            ("delta_c_routes", self.delta_c_routes),
            ("e_f_shift", self.e_f_shift),
            ("e_formula", self.e_formula),
        ]
    }

    pub fn merge(&self, other: &SpinResiduals) -> SpinResiduals {
        SpinResiduals {
            ricci_trace: self.ricci_trace.max(other.ricci_trace),
            weyl_trace: self.weyl_trace.max(other.weyl_trace),
            g_minus_h_off_identity: self.g_minus_h_off_identity.max(other.g_minus_h_off_identity),
            g_minus_h_coefficient: self.g_minus_h_coefficient.max(other.g_minus_h_coefficient),
            h0_coefficient: self.h0_coefficient.max(other.h0_coefficient),
            h2_norm: self.h2_norm.max(other.h2_norm),
            delta_c_trace: self.delta_c_trace.max(other.delta_c_trace),
            delta_b_trace: self.delta_b_trace.max(other.delta_b_trace),
            delta_c_routes: self.delta_c_routes.max(other.delta_c_routes),
            e_f_shift: self.e_f_shift.max(other.e_f_shift),
            e_formula: self.e_formula.max(other.e_formula),
        }
    }
}

/// `|sum_kl <T2(e_k, e_l) psi_k, psi_l>|` for a pair table `T` and a spinor
/// tuple `psi_1..psi_n`.
pub fn square_form(table: &[CMat], n: usize, psis: &[CVec]) -> f64 {
    let mut acc = ZERO;
    for k in 0..n {
        for l in 0..n {
            let v = square(table, n, k, l) * &psis[k];
            acc += psis[l].dotc(&v);
        }
    }
    acc.norm()
}
