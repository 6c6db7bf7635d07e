//! Dense multi-index arrays for curvature data.
//!
//! All tensors here carry lower indices only. Components are either in a
//! coordinate frame or in an orthonormal frame; the owner decides which.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub type RMat = DMatrix<f64>;

/// Rank-3 array, row-major in `(a, b, c)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

/// Rank-4 array, row-major in `(i, j, k, l)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    t.data[(a * n + b) * n + c] = f(a, b, c);
                }
            }
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.n + b) * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        let n = self.n;
        self.data[(a * n + b) * n + c] = v;
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Slice `(b, c) -> T[a][b][c]` for fixed `a`.
    pub fn slice(&self, a: usize) -> RMat {
        RMat::from_fn(self.n, self.n, |b, c| self.get(a, b, c))
    }

    /// `T'_{abc} = E^i_a E^j_b E^k_c T_{ijk}` where the columns of `e` are
    /// the new frame vectors.
    pub fn transform(&self, e: &RMat) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for axis in 0..3 {
            let src = out.clone();
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let mut acc = 0.0;
                        for m in 0..n {
                            let (ia, ib, ic) = match axis {
                                0 => (m, b, c),
                                1 => (a, m, c),
                                _ => (a, b, m),
                            };
                            let col = [a, b, c][axis];
                            acc += e[(m, col)] * src.get(ia, ib, ic);
                        }
                        out.set(a, b, c, acc);
                    }
                }
            }
        }
        out
    }

    pub fn bits_hash(&self, h: &mut impl std::hash::Hasher) {
        for x in &self.data {
            h.write_u64(x.to_bits());
        }
    }
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        t.data[((i * n + j) * n + k) * n + l] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[((i * self.n + j) * self.n + k) * self.n + l]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let n = self.n;
        self.data[((i * n + j) * n + k) * n + l] = v;
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn add_scaled(&mut self, other: &Tensor4, s: f64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn sub(&self, other: &Tensor4) -> Tensor4 {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    /// Embeds `self` into a larger tensor of dimension `n_total` at index
    /// offset `offset`.
    pub fn embed(&self, n_total: usize, offset: usize, into: &mut Tensor4) {
        debug_assert_eq!(into.n, n_total);
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        into.set(i + offset, j + offset, k + offset, l + offset, self.get(i, j, k, l));
                    }
                }
            }
        }
    }

    /// Orthonormal-frame components from coordinate components; see
    /// [`Tensor3::transform`].
    pub fn transform(&self, e: &RMat) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for axis in 0..4 {
            let src = out.clone();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let idx = [i, j, k, l];
                            let col = idx[axis];
                            let mut acc = 0.0;
                            for m in 0..n {
                                let mut s = idx;
                                s[axis] = m;
                                acc += e[(m, col)] * src.get(s[0], s[1], s[2], s[3]);
                            }
                            out.set(i, j, k, l, acc);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn bits_hash(&self, h: &mut impl std::hash::Hasher) {
        for x in &self.data {
            h.write_u64(x.to_bits());
        }
    }
}

/// Kulkarni–Nomizu type product in the curvature sign convention used across
/// the crate:
/// `(h o k)_{ijkl} = h_jk k_il + h_il k_jk - h_ik k_jl - h_jl k_ik`.
///
/// `g o g = 2 (d_jk d_il - d_ik d_jl)`, so the unit round sphere has
/// `R = (g o g) / 2`.
pub fn kulkarni_nomizu(h: &RMat, k: &RMat) -> Tensor4 {
    let n = h.nrows();
    Tensor4::from_fn(n, |i, j, a, b| {
        h[(j, a)] * k[(i, b)] + h[(i, b)] * k[(j, a)] - h[(i, a)] * k[(j, b)] - h[(j, b)] * k[(i, a)]
    })
}

pub fn mat_norm_sq(m: &RMat) -> f64 {
    m.iter().map(|x| x * x).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kn_of_identity() {
        let g = RMat::identity(3, 3);
        let t = kulkarni_nomizu(&g, &g);
        assert_eq!(t.get(0, 1, 1, 0), 2.0);
        assert_eq!(t.get(0, 1, 0, 1), -2.0);
        assert_eq!(t.get(0, 0, 1, 1), 0.0);
    }

    #[test]
    fn transform_by_rotation_preserves_norm() {
        let (c, s) = (0.6f64, 0.8f64);
        let e = RMat::from_row_slice(2, 2, &[c, -s, s, c]);
        let t = Tensor3::from_fn(2, |a, b, cc| (a + 2 * b + 3 * cc) as f64);
        let u = t.transform(&e);
        assert!((t.norm_sq() - u.norm_sq()).abs() < 1e-12);
        let r = Tensor4::from_fn(2, |i, j, k, l| (i as f64 - j as f64) * (k as f64 - l as f64));
        assert!((r.norm_sq() - r.transform(&e).norm_sq()).abs() < 1e-12);
    }
}
