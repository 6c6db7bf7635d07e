//! Irreducible complex representation of the Clifford algebra of Euclidean
//! `R^n`, with the convention `v.w + w.v = -2 <v, w>`.
//!
//! Generators are built as `i * e_k` where the `e_k` are Hermitian, pairwise
//! anticommuting involutions obtained from the Pauli matrices by the usual
//! tensor-product recursion:
//!
//! ```text
//! n = 2:      e_1 = s_1, e_2 = s_2
//! n -> n + 2: e_k (x) s_3 (k <= n), 1 (x) s_1, 1 (x) s_2
//! n odd:      append the chirality element i^m e_1 ... e_{2m}
//! ```
//!
//! Every generator is therefore anti-Hermitian, unitary and squares to `-1`.
//! The spinor dimension is `2^(n/2)` (integer division).
//!
//! In odd dimension the top monomial `g_1 ... g_n` is a multiple of the
//! identity, so the monomials of degree `d` and `n - d` coincide up to a
//! phase. [`CliffordRep::degree_decompose`] always books such mass under the
//! lower degree `min(d, n - d)`.

use crate::error::{Error, Result};
use crate::linalg::{c, kron, trace_inner, CMat, I, ONE, ZERO};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;

/// Ordered product `g_{i1} ... g_{ik}` with `i1 < ... < ik`, indexed by the
/// bitmask of its factors.
#[derive(Clone, Debug)]
pub struct Monomial {
    pub mask: u32,
    pub degree: usize,
    pub matrix: CMat,
}

#[derive(Clone, Debug)]
pub struct CliffordRep {
    n: usize,
    dim: usize,
    generators: Vec<CMat>,
    /// Orthonormal (normalized trace) monomial basis: all `2^n` monomials
    /// for even `n`, those of degree `<= n/2` for odd `n`.
    basis: Vec<Monomial>,
}

fn pauli() -> [CMat; 3] {
    let s1 = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let s2 = CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
    let s3 = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    [s1, s2, s3]
}

/// Hermitian anticommuting involutions for even `n`.
fn hermitian_even(n: usize) -> Vec<CMat> {
    let [s1, s2, s3] = pauli();
    let mut gens = vec![s1.clone(), s2.clone()];
    let mut m = 2;
    while m < n {
        let dim = gens[0].nrows();
        let id = CMat::identity(dim, dim);
        let mut next: Vec<CMat> = gens.iter().map(|e| kron(e, &s3)).collect();
        next.push(kron(&id, &s1));
        next.push(kron(&id, &s2));
        gens = next;
        m += 2;
    }
    gens
}

/// Builds the representation for `2 <= n <= 8`.
pub fn build_clifford_rep(n: usize) -> Result<CliffordRep> {
    CliffordRep::new(n)
}

impl CliffordRep {
    pub fn new(n: usize) -> Result<Self> {
        if !(MIN_DIM..=MAX_DIM).contains(&n) {
            return Err(Error::DimensionOutOfRange(n));
        }
        let even = n - n % 2;
        let mut herm = hermitian_even(even);
        if n % 2 == 1 {
            // chirality element: (i^m e_1 ... e_{2m})^2 = 1, Hermitian
            let m = even / 2;
            let mut omega = CMat::identity(herm[0].nrows(), herm[0].nrows());
            for e in &herm {
                omega *= e;
            }
            let phase = (0..m).fold(ONE, |acc, _| acc * I);
            herm.push(omega * phase);
        }
        let generators: Vec<CMat> = herm.into_iter().map(|e| e * I).collect();
        let dim = generators[0].nrows();

        let mut basis = Vec::new();
        for mask in 0u32..(1u32 << n) {
            let degree = mask.count_ones() as usize;
            if n % 2 == 1 && degree > n / 2 {
                continue;
            }
            let mut matrix = CMat::identity(dim, dim);
            for (k, g) in generators.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    matrix *= g;
                }
            }
            basis.push(Monomial {
                mask,
                degree,
                matrix,
            });
        }
        Ok(Self {
            n,
            dim,
            generators,
            basis,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Spinor dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    pub fn gamma(&self, k: usize) -> &CMat {
        &self.generators[k]
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn identity(&self) -> CMat {
        CMat::identity(self.dim, self.dim)
    }

    pub fn zeros(&self) -> CMat {
        CMat::zeros(self.dim, self.dim)
    }

    /// Ordered product for an arbitrary (possibly repeated) index list.
    pub fn product(&self, indices: &[usize]) -> CMat {
        indices
            .iter()
            .fold(self.identity(), |acc, &k| acc * &self.generators[k])
    }

    /// The endomorphism `v. = sum_k v^k g_k` for components in an orthonormal frame.
    pub fn vector(&self, v: &[f64]) -> Result<CMat> {
        if v.len() != self.n {
            return Err(Error::ShapeMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        let mut m = self.zeros();
        for (vk, g) in v.iter().zip(&self.generators) {
            if *vk != 0.0 {
                m += g * c(*vk);
            }
        }
        Ok(m)
    }

    /// Left Clifford multiplication `v . target`; `target` is an endomorphism
    /// or a spinor (an `N x 1` matrix).
    pub fn clifford_action(&self, v: &[f64], target: &CMat) -> Result<CMat> {
        if target.nrows() != self.dim {
            return Err(Error::ShapeMismatch {
                expected: self.dim,
                got: target.nrows(),
            });
        }
        Ok(self.vector(v)? * target)
    }

    /// Clifford action of a covector: components are raised with the inverse
    /// metric `g_inv` first.
    pub fn covector_action(&self, w: &[f64], g_inv: &[Vec<f64>], target: &CMat) -> Result<CMat> {
        if w.len() != self.n || g_inv.len() != self.n {
            return Err(Error::ShapeMismatch {
                expected: self.n,
                got: w.len(),
            });
        }
        let raised: Vec<f64> = (0..self.n)
            .map(|i| (0..self.n).map(|j| g_inv[i][j] * w[j]).sum())
            .collect();
        self.clifford_action(&raised, target)
    }

    /// Splits `m` into its degree components `[M_0, ..., M_n]`.
    pub fn degree_decompose(&self, m: &CMat) -> Result<Vec<CMat>> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::ShapeMismatch {
                expected: self.dim,
                got: m.nrows(),
            });
        }
        let mut parts = vec![self.zeros(); self.n + 1];
        for mono in &self.basis {
            let coeff = trace_inner(&mono.matrix, m);
            if coeff != ZERO {
                parts[mono.degree] += &mono.matrix * coeff;
            }
        }
        Ok(parts)
    }

    /// Largest deviation from `g_i g_j + g_j g_i = -2 d_ij` and from
    /// anti-Hermiticity over all generator pairs.
    pub fn relation_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            let gi = &self.generators[i];
            worst = worst.max(crate::linalg::frobenius(&(gi + gi.adjoint())));
            for j in 0..self.n {
                let gj = &self.generators[j];
                let mut anti = gi * gj + gj * gi;
                if i == j {
                    anti += self.identity() * c(2.0);
                }
                worst = worst.max(crate::linalg::frobenius(&anti));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius;

    #[test]
    fn dimensions() {
        for n in 2..=8 {
            let rep = CliffordRep::new(n).unwrap();
            assert_eq!(rep.dim(), 1 << (n / 2));
            assert_eq!(rep.generators().len(), n);
        }
        assert!(matches!(
            CliffordRep::new(1),
            Err(Error::DimensionOutOfRange(1))
        ));
        assert!(CliffordRep::new(9).is_err());
    }

    #[test]
    fn n4_exact_relations() {
        let rep = CliffordRep::new(4).unwrap();
        let (g1, g2, g3) = (rep.gamma(0), rep.gamma(1), rep.gamma(2));
        assert_eq!(frobenius(&(g1 * g2 + g2 * g1)), 0.0);
        assert_eq!(frobenius(&(g3 * g3 + rep.identity())), 0.0);
    }

    #[test]
    fn n6_all_relations() {
        let rep = CliffordRep::new(6).unwrap();
        assert_eq!(rep.dim(), 8);
        assert!(rep.relation_residual() < 1e-12);
    }

    #[test]
    fn basis_is_orthonormal_and_complete() {
        for n in 2..=6 {
            let rep = CliffordRep::new(n).unwrap();
            let basis = rep.basis();
            assert_eq!(basis.len(), rep.dim() * rep.dim());
            for a in basis {
                for b in basis {
                    let ip = trace_inner(&a.matrix, &b.matrix);
                    let want = if a.mask == b.mask { 1.0 } else { 0.0 };
                    assert!((ip - c(want)).norm() < 1e-12, "n={n} {} {}", a.mask, b.mask);
                }
            }
        }
    }

    #[test]
    fn odd_top_monomial_is_scalar() {
        for n in [3, 5, 7] {
            let rep = CliffordRep::new(n).unwrap();
            let all: Vec<usize> = (0..n).collect();
            let top = rep.product(&all);
            assert!(crate::linalg::off_identity_residual(&top) < 1e-12);
        }
    }

    #[test]
    fn vector_action() {
        let rep = CliffordRep::new(4).unwrap();
        let psi = CMat::from_fn(4, 1, |i, _| c(i as f64 + 1.0) + I * 0.5);
        let e1 = [1.0, 0.0, 0.0, 0.0];
        let twice = rep
            .clifford_action(&e1, &rep.clifford_action(&e1, &psi).unwrap())
            .unwrap();
        assert!(frobenius(&(twice + &psi)) < 1e-14);

        let v = rep.vector(&[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(frobenius(&(&v * &v + rep.identity() * c(2.0))) < 1e-14);

        assert!(rep.vector(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn covector_with_identity_metric_matches_vector() {
        let rep = CliffordRep::new(3).unwrap();
        let g_inv = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let w = [0.3, -1.0, 2.0];
        let id = rep.identity();
        let a = rep.covector_action(&w, &g_inv, &id).unwrap();
        let b = rep.vector(&w).unwrap();
        assert!(frobenius(&(a - b)) < 1e-15);
    }

    #[test]
    fn decompose_identity_and_bivector() {
        let rep = CliffordRep::new(4).unwrap();
        let parts = rep.degree_decompose(&rep.identity()).unwrap();
        assert!(frobenius(&(&parts[0] - rep.identity())) < 1e-14);
        for p in &parts[1..] {
            assert!(frobenius(p) < 1e-14);
        }
        let biv = rep.product(&[0, 1]);
        let parts = rep.degree_decompose(&biv).unwrap();
        assert!(frobenius(&(&parts[2] - &biv)) < 1e-14);
        assert!(frobenius(&parts[0]) + frobenius(&parts[4]) < 1e-14);
    }

    #[test]
    fn odd_dimension_books_lower_degree() {
        let rep = CliffordRep::new(5).unwrap();
        let quad = rep.product(&[0, 1, 2, 3]);
        let parts = rep.degree_decompose(&quad).unwrap();
        assert!(frobenius(&(&parts[1] - &quad)) < 1e-12);
        assert!(frobenius(&parts[4]) < 1e-14);
    }
}
