//! Curvature of a metric sampled on a periodic lattice, by central finite
//! differences: fourth-order stencils for first derivatives, second-order
//! stencils for second derivatives. All derived fields are therefore
//! accurate to `O(h^2)`.
//!
//! Grid file format (whitespace separated, `#` starts a comment line):
//!
//! ```text
//! n d_1 ... d_n h p_1 ... p_n
//! <one row per node: the n(n+1)/2 upper-triangle components g_11 g_12 ... g_nn>
//! ```
//!
//! Nodes are listed in row-major order (last axis fastest). A row may also
//! hold all `n^2` components; those are checked for symmetry. Periodic
//! flags are `1`/`0` (or `true`/`false`); only periodic axes are supported.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::PointSample;
use crate::error::{Error, Result};
use crate::tensor::{RMat, Tensor3, Tensor4};

/// A metric given as a function of coordinates.
pub trait MetricField: Sync {
    fn dim(&self) -> usize;
    fn metric(&self, x: &[f64]) -> RMat;
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricGrid {
    pub n: usize,
    pub dims: Vec<usize>,
    pub h: f64,
    pub periodic: Vec<bool>,
    /// Metric at each node, row-major node order.
    pub values: Vec<RMat>,
}

impl MetricGrid {
    pub fn node_count(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut c = vec![0; self.n];
        for axis in (0..self.n).rev() {
            c[axis] = index % self.dims[axis];
            index /= self.dims[axis];
        }
        c
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (c, d)| acc * d + c)
    }

    /// Node reached from `base` by integer steps along each axis, wrapping.
    fn shifted(&self, base: &[usize], steps: &[i32]) -> usize {
        let mut idx = 0;
        for axis in 0..self.n {
            let d = self.dims[axis] as i64;
            let c = (base[axis] as i64 + steps[axis] as i64).rem_euclid(d);
            idx = idx * self.dims[axis] + c as usize;
        }
        idx
    }

    /// Samples `field` on a lattice of the given shape and spacing.
    pub fn from_field(field: &dyn MetricField, dims: Vec<usize>, h: f64) -> Self {
        let n = field.dim();
        let mut grid = Self {
            n,
            periodic: vec![true; n],
            h,
            values: Vec::new(),
            dims,
        };
        grid.values = (0..grid.node_count())
            .map(|i| {
                let x: Vec<f64> = grid.coords(i).iter().map(|&c| c as f64 * h).collect();
                field.metric(&x)
            })
            .collect();
        grid
    }

    /// `exp(2 a sin x_1) delta` with `nodes` points over one period of `x_1`.
    pub fn conformal_torus(n: usize, amplitude: f64, nodes: usize, transverse: usize) -> Self {
        let field = ConformalSine { n, amplitude };
        let mut dims = vec![transverse; n];
        dims[0] = nodes;
        Self::from_field(&field, dims, 2.0 * PI / nodes as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.len() != self.n || self.periodic.len() != self.n {
            return Err(Error::GridFormat("header does not match the dimension".into()));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::GridFormat(format!("spacing {} must be positive", self.h)));
        }
        for (axis, &p) in self.periodic.iter().enumerate() {
            if !p {
                return Err(Error::InvalidParameter(format!(
                    "axis {axis} is not periodic; only periodic lattices are supported"
                )));
            }
        }
        for (axis, &d) in self.dims.iter().enumerate() {
            if d < 5 {
                return Err(Error::InsufficientResolution { axis, nodes: d });
            }
        }
        if self.values.len() != self.node_count() {
            return Err(Error::GridFormat(format!(
                "expected {} nodes, found {}",
                self.node_count(),
                self.values.len()
            )));
        }
        for (node, g) in self.values.iter().enumerate() {
            let scale = g.abs().max().max(1.0);
            let asym = (g - g.transpose()).abs().max();
            if asym > 1e-12 * scale {
                return Err(Error::NotSymmetric {
                    node,
                    asymmetry: asym,
                });
            }
            if g.clone().cholesky().is_none() {
                return Err(Error::NotPositiveDefinite { node });
            }
        }
        Ok(())
    }
}

struct ConformalSine {
    n: usize,
    amplitude: f64,
}

impl MetricField for ConformalSine {
    fn dim(&self) -> usize {
        self.n
    }

    fn metric(&self, x: &[f64]) -> RMat {
        let phi = self.amplitude * x[0].sin();
        RMat::identity(self.n, self.n) * (2.0 * phi).exp()
    }
}

/// Coordinate-frame geometry at one point.
struct LocalGeometry {
    g: RMat,
    /// `Gamma^m_{ij}` stored as `[m][i][j]`
    christoffel: Tensor3,
    /// `g(R(d_i, d_j) d_k, d_l)`
    riemann: Tensor4,
    ricci: RMat,
    scalar: f64,
}

fn unit(n: usize, axis: usize, s: i32) -> Vec<i32> {
    let mut v = vec![0; n];
    v[axis] = s;
    v
}

fn unit2(n: usize, a: usize, sa: i32, b: usize, sb: i32) -> Vec<i32> {
    let mut v = vec![0; n];
    v[a] += sa;
    v[b] += sb;
    v
}

fn first_derivative<T, F>(n: usize, h: f64, axis: usize, f: &F) -> T
where
    F: Fn(&[i32]) -> T,
    T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let p2 = f(&unit(n, axis, 2));
    let p1 = f(&unit(n, axis, 1));
    let m1 = f(&unit(n, axis, -1));
    let m2 = f(&unit(n, axis, -2));
    (p1 * 8.0 - m1 * 8.0 - p2 + m2) * (1.0 / (12.0 * h))
}

/// `g`, `d_a g_ij` and `d_a d_b g_ij` from metric values around a point.
fn metric_jet(n: usize, h: f64, f: &dyn Fn(&[i32]) -> RMat) -> (RMat, Tensor3, Tensor4) {
    let g0 = f(&vec![0; n]);
    let mut dg = Tensor3::zeros(n);
    for a in 0..n {
        let d = first_derivative(n, h, a, &|s: &[i32]| f(s));
        for i in 0..n {
            for j in 0..n {
                dg.set(a, i, j, d[(i, j)]);
            }
        }
    }
    let mut ddg = Tensor4::zeros(n);
    let inv_h2 = 1.0 / (h * h);
    for a in 0..n {
        for b in a..n {
            let d = if a == b {
                (f(&unit(n, a, 1)) - &g0 * 2.0 + f(&unit(n, a, -1))) * inv_h2
            } else {
                (f(&unit2(n, a, 1, b, 1)) - f(&unit2(n, a, 1, b, -1)) - f(&unit2(n, a, -1, b, 1))
                    + f(&unit2(n, a, -1, b, -1)))
                    * (0.25 * inv_h2)
            };
            for i in 0..n {
                for j in 0..n {
                    ddg.set(a, b, i, j, d[(i, j)]);
                    ddg.set(b, a, i, j, d[(i, j)]);
                }
            }
        }
    }
    (g0, dg, ddg)
}

fn inverse(g: &RMat) -> Option<RMat> {
    g.clone().cholesky().map(|c| c.inverse())
}

fn geometry(g: RMat, dg: &Tensor3, ddg: &Tensor4) -> Option<LocalGeometry> {
    let n = g.nrows();
    let ginv = inverse(&g)?;
    // first kind: [k][i][j] = (d_i g_jk + d_j g_ik - d_k g_ij) / 2
    let first = Tensor3::from_fn(n, |k, i, j| 0.5 * (dg.get(i, j, k) + dg.get(j, i, k) - dg.get(k, i, j)));
    let christoffel = Tensor3::from_fn(n, |m, i, j| (0..n).map(|k| ginv[(m, k)] * first.get(k, i, j)).sum());
    // a, b, c, d in the classical all-lower form
    //   R_abcd = (g_ad,bc + g_bc,ad - g_ac,bd - g_bd,ac) / 2
    //          + g_ef (G^e_bc G^f_ad - G^e_bd G^f_ac)
    // with R(d_c, d_d) d_b = R^a_bcd d_a
    let classical = |a: usize, b: usize, c: usize, d: usize| -> f64 {
        let second = 0.5 * (ddg.get(b, c, a, d) + ddg.get(a, d, b, c) - ddg.get(b, d, a, c) - ddg.get(a, c, b, d));
        let mut quad = 0.0;
        for e in 0..n {
            for f in 0..n {
                quad += g[(e, f)]
                    * (christoffel.get(e, b, c) * christoffel.get(f, a, d)
                        - christoffel.get(e, b, d) * christoffel.get(f, a, c));
            }
        }
        second + quad
    };
    let riemann = Tensor4::from_fn(n, |i, j, k, l| classical(l, k, i, j));
    let ricci = RMat::from_fn(n, n, |i, j| {
        let mut acc = 0.0;
        for k in 0..n {
            for l in 0..n {
                acc += ginv[(k, l)] * riemann.get(i, k, l, j);
            }
        }
        acc
    });
    let ricci = (&ricci + ricci.transpose()) * 0.5;
    let scalar = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| ginv[(i, j)] * ricci[(i, j)])
        .sum();
    Some(LocalGeometry {
        g,
        christoffel,
        riemann,
        ricci,
        scalar,
    })
}

/// Orthonormal frame by Gram–Schmidt on the coordinate basis: `E = L^{-T}`
/// for `g = L L^T`.
fn orthonormal_frame(g: &RMat) -> Option<RMat> {
    let l = g.clone().cholesky()?.l();
    l.try_inverse().map(|li| li.transpose())
}

/// `(nabla_a Ric)_{bc} = d_a Ric_bc - G^m_ab Ric_mc - G^m_ac Ric_bm`.
fn covariant_ricci(geo: &LocalGeometry, d_ricci: &[RMat]) -> Tensor3 {
    let n = geo.g.nrows();
    Tensor3::from_fn(n, |a, b, c| {
        let mut v = d_ricci[a][(b, c)];
        for m in 0..n {
            v -= geo.christoffel.get(m, a, b) * geo.ricci[(m, c)];
            v -= geo.christoffel.get(m, a, c) * geo.ricci[(b, m)];
        }
        v
    })
}

fn assemble(id: usize, geo: &LocalGeometry, d_ricci: &[RMat], d_scalar: &[f64], h: f64) -> Option<PointSample> {
    let n = geo.g.nrows();
    let frame = orthonormal_frame(&geo.g)?;
    let riemann = geo.riemann.transform(&frame);
    let nabla = covariant_ricci(geo, d_ricci).transform(&frame);
    let ds: Vec<f64> = (0..n)
        .map(|a| (0..n).map(|i| frame[(i, a)] * d_scalar[i]).sum())
        .collect();
    let mut s = PointSample::from_frame_data(id, geo.g.clone(), frame, riemann, Some((nabla, ds)), false);
    s.spacing = Some(h);
    Some(s)
}

/// Curvature samples at every node of a periodic metric lattice.
pub fn grid_differentiate(grid: &MetricGrid) -> Result<Vec<PointSample>> {
    grid.validate()?;
    let n = grid.n;
    let h = grid.h;
    let count = grid.node_count();

    let geos: Vec<LocalGeometry> = (0..count)
        .into_par_iter()
        .map(|node| {
            let base = grid.coords(node);
            let f = |s: &[i32]| grid.values[grid.shifted(&base, s)].clone();
            let (g, dg, ddg) = metric_jet(n, h, &f);
            geometry(g, &dg, &ddg).ok_or(Error::NotPositiveDefinite { node })
        })
        .collect::<Result<_>>()?;

    (0..count)
        .into_par_iter()
        .map(|node| {
            let base = grid.coords(node);
            let d_ricci: Vec<RMat> = (0..n)
                .map(|a| first_derivative(n, h, a, &|s: &[i32]| geos[grid.shifted(&base, s)].ricci.clone()))
                .collect();
            let d_scalar: Vec<f64> = (0..n)
                .map(|a| first_derivative(n, h, a, &|s: &[i32]| geos[grid.shifted(&base, s)].scalar))
                .collect();
            assemble(node, &geos[node], &d_ricci, &d_scalar, h).ok_or(Error::NotPositiveDefinite { node })
        })
        .collect()
}

/// Finite-difference sample of an analytic metric at the point `x`, with
/// the same stencils as the lattice version.
pub fn point_sample_from_field(field: &dyn MetricField, x: &[f64], h: f64) -> Result<PointSample> {
    let n = field.dim();
    let at = |s: &[i32]| -> Vec<f64> { x.iter().zip(s).map(|(xi, &si)| xi + si as f64 * h).collect() };
    let geo_at = |s: &[i32]| -> Result<LocalGeometry> {
        let centre = at(s);
        let f = |t: &[i32]| {
            let y: Vec<f64> = centre.iter().zip(t).map(|(c, &ti)| c + ti as f64 * h).collect();
            field.metric(&y)
        };
        let (g, dg, ddg) = metric_jet(n, h, &f);
        geometry(g, &dg, &ddg).ok_or(Error::NotPositiveDefinite { node: 0 })
    };
    let geo = geo_at(&vec![0; n])?;
    let mut d_ricci = Vec::with_capacity(n);
    let mut d_scalar = Vec::with_capacity(n);
    for a in 0..n {
        let pts: Vec<LocalGeometry> = [2, 1, -1, -2]
            .iter()
            .map(|&s| geo_at(&unit(n, a, s)))
            .collect::<Result<_>>()?;
        let c = 1.0 / (12.0 * h);
        d_ricci.push((&pts[1].ricci * 8.0 - &pts[2].ricci * 8.0 - &pts[0].ricci + &pts[3].ricci) * c);
        d_scalar.push((8.0 * pts[1].scalar - 8.0 * pts[2].scalar - pts[0].scalar + pts[3].scalar) * c);
    }
    assemble(0, &geo, &d_ricci, &d_scalar, h).ok_or(Error::NotPositiveDefinite { node: 0 })
}

fn parse_flag(tok: &str) -> Result<bool> {
    match tok {
        "1" | "true" | "p" | "periodic" => Ok(true),
        "0" | "false" | "n" | "open" => Ok(false),
        other => Err(Error::GridFormat(format!("bad periodic flag `{other}`"))),
    }
}

/// Parses the grid file format described in the module docs.
pub fn parse_grid(text: &str) -> Result<MetricGrid> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::GridFormat("empty file".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let n: usize = toks
        .first()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::GridFormat("missing dimension".into()))?;
    if toks.len() != 2 * n + 2 {
        return Err(Error::GridFormat(format!(
            "header needs {} fields (n, {n} dims, h, {n} flags), found {}",
            2 * n + 2,
            toks.len()
        )));
    }
    let dims = toks[1..=n]
        .iter()
        .map(|t| t.parse::<usize>().map_err(|_| Error::GridFormat(format!("bad lattice size `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    let h: f64 = toks[n + 1]
        .parse()
        .map_err(|_| Error::GridFormat(format!("bad spacing `{}`", toks[n + 1])))?;
    let periodic = toks[n + 2..]
        .iter()
        .map(|t| parse_flag(t))
        .collect::<Result<Vec<_>>>()?;

    let upper = n * (n + 1) / 2;
    let mut values = Vec::new();
    for (row, line) in lines.enumerate() {
        let nums = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::GridFormat(format!("row {row}: bad number `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        let g = if nums.len() == upper {
            let mut g = RMat::zeros(n, n);
            let mut it = nums.into_iter();
            for i in 0..n {
                for j in i..n {
                    let v = it.next().unwrap_or_default();
                    g[(i, j)] = v;
                    g[(j, i)] = v;
                }
            }
            g
        } else if nums.len() == n * n {
            RMat::from_row_slice(n, n, &nums)
        } else {
            return Err(Error::GridFormat(format!(
                "row {row}: expected {upper} or {} components, found {}",
                n * n,
                nums.len()
            )));
        };
        values.push(g);
    }
    let grid = MetricGrid {
        n,
        dims,
        h,
        periodic,
        values,
    };
    grid.validate()?;
    Ok(grid)
}

pub fn render_grid(grid: &MetricGrid) -> String {
    let mut out = String::new();
    out.push_str(&grid.n.to_string());
    for d in &grid.dims {
        out.push_str(&format!(" {d}"));
    }
    out.push_str(&format!(" {}", grid.h));
    for p in &grid.periodic {
        out.push_str(if *p { " 1" } else { " 0" });
    }
    out.push('\n');
    for g in &grid.values {
        let mut row = Vec::with_capacity(grid.n * (grid.n + 1) / 2);
        for i in 0..grid.n {
            for j in i..grid.n {
                row.push(g[(i, j)].to_string());
            }
        }
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
