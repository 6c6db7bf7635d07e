//! Random test data with prescribed algebraic structure: curvature-type
//! tensors, Ricci derivative data obeying the contracted Bianchi identity,
//! and spinors. Used by the test suites and the benchmarks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMat, C64};
use crate::tensor::{kulkarni_nomizu, RMat, Tensor3, Tensor4};

pub fn random_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RMat {
    let a = RMat::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    (&a + a.transpose()) * 0.5
}

pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RMat {
    let a = RMat::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    a.qr().q()
}

/// Algebraic curvature tensor: a signed sum of `h o h` products, which
/// carries every symmetry of a Riemann tensor including the first Bianchi
/// identity.
pub fn random_curvature_tensor<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Tensor4 {
    let mut r = Tensor4::zeros(n);
    for _ in 0..(n + 2) {
        let h = random_symmetric(n, rng);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        r.add_scaled(&kulkarni_nomizu(&h, &h), 0.25 * sign);
    }
    r
}

/// Random `(nabla_a Ric)_{bc}` (symmetric in `b, c`) together with
/// `dS_c = sum_b (nabla_c Ric)_{bb}`, corrected so that
/// `sum_a (nabla_a Ric)_{ac} = dS_c / 2`.
pub fn bianchi_nabla_ric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Tensor3, Vec<f64>) {
    let mut t = Tensor3::zeros(n);
    for a in 0..n {
        let s = random_symmetric(n, rng);
        for b in 0..n {
            for c in 0..n {
                t.set(a, b, c, s[(b, c)]);
            }
        }
    }
    // adding p_b d_ac + p_c d_ab shifts div by (n+1)p and trace by 2p,
    // so (div - trace/2) moves by n p.
    let defect: Vec<f64> = (0..n)
        .map(|c| {
            let div: f64 = (0..n).map(|a| t.get(a, a, c)).sum();
            let tr: f64 = (0..n).map(|b| t.get(c, b, b)).sum();
            div - 0.5 * tr
        })
        .collect();
    let p: Vec<f64> = defect.iter().map(|v| -v / n as f64).collect();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut v = t.get(a, b, c);
                if a == c {
                    v += p[b];
                }
                if a == b {
                    v += p[c];
                }
                t.set(a, b, c, v);
            }
        }
    }
    let ds = (0..n)
        .map(|c| (0..n).map(|b| t.get(c, b, b)).sum())
        .collect();
    (t, ds)
}

/// Bianchi-constrained derivative data whose slices `nabla_a Ric` commute
/// pairwise: simultaneously diagonal in a random orthonormal basis.
pub fn commuting_nabla_ric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Tensor3, Vec<f64>) {
    // diagonal model: (nabla_a Ric)_{bc} = d[a][b] delta_bc with
    // d[c][c] = sum_{b != c} d[c][b]
    let mut d = vec![vec![0.0; n]; n];
    for (c, row) in d.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            if b != c {
                *x = rng.sample::<f64, _>(StandardNormal);
            }
        }
        row[c] = (0..n).filter(|&b| b != c).map(|b| row[b]).sum();
    }
    let diag = Tensor3::from_fn(n, |a, b, c| if b == c { d[a][b] } else { 0.0 });
    let q = random_orthogonal(n, rng);
    let t = diag.transform(&q.transpose());
    let ds = (0..n)
        .map(|c| (0..n).map(|b| t.get(c, b, b)).sum())
        .collect();
    (t, ds)
}

pub fn random_spinor<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    CMat::from_fn(dim, 1, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    CMat::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}
