//! One- and many-dimensional maximization used by the bound families and the
//! pair-norm search.

use argmin::core::{CostFunction, Error as ArgminError, Executor};
use argmin::solver::goldensectionsearch::GoldenSectionSearch;
use argmin::solver::neldermead::NelderMead;
use serde::{Deserialize, Serialize};

/// Log-spaced scan points per decade around the scale hint.
const SCAN_PER_DECADE: usize = 20;
/// Decades scanned on either side of the hint.
const SCAN_DECADES: i32 = 6;
/// Relative gain over `f(0)` below which `t = 0` is kept.
const ROUNDOFF: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub t_star: f64,
    pub value: f64,
}

struct Negated<'a, F>(&'a F);

impl<F: Fn(f64) -> Option<f64>> CostFunction for Negated<'_, F> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, t: &f64) -> Result<f64, ArgminError> {
        Ok(match (self.0)(*t) {
            Some(v) if v.is_finite() => -v,
            _ => f64::INFINITY,
        })
    }
}

/// Maximizes `f` over `t >= 0`. `f` returns `None` where it is not
/// applicable.
///
/// A log-spaced scan over `[1e-6, 1e6] * t_hint` locates the best cell,
/// which golden-section search then refines. The result is never below
/// `f(0)`; when `f` is nowhere applicable the result is `None`.
pub fn optimize_t<F: Fn(f64) -> Option<f64>>(f: F, t_hint: f64) -> Option<Optimum> {
    let hint = if t_hint.is_finite() && t_hint > 0.0 { t_hint } else { 1.0 };
    let count = SCAN_PER_DECADE * (2 * SCAN_DECADES as usize) + 1;
    let mut grid = Vec::with_capacity(count + 1);
    grid.push(0.0);
    for k in 0..count {
        let e = -(SCAN_DECADES as f64) + k as f64 / SCAN_PER_DECADE as f64;
        grid.push(hint * 10f64.powf(e));
    }
    let values: Vec<Option<f64>> = grid.iter().map(|&t| f(t).filter(|v| v.is_finite())).collect();
    let (best, best_value) = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .fold(None, |acc: Option<(usize, f64)>, (i, v)| match acc {
            Some((_, bv)) if bv >= v => acc,
            _ => Some((i, v)),
        })?;
    let mut result = Optimum {
        t_star: grid[best],
        value: best_value,
    };
    let lo = if best == 0 { 0.0 } else { grid[best - 1] };
    let hi = grid[(best + 1).min(grid.len() - 1)];
    if hi > lo {
        if let Some((t, v)) = golden(&f, lo, hi, grid[best]) {
            if v > result.value {
                result = Optimum { t_star: t, value: v };
            }
        }
    }
    if let Some(v0) = values[0] {
        // gains at the level of round-off are not improvements
        if result.value - v0 <= ROUNDOFF * v0.abs().max(1.0) {
            result = Optimum { t_star: 0.0, value: v0 };
        }
    }
    Some(result)
}

fn golden<F: Fn(f64) -> Option<f64>>(f: &F, lo: f64, hi: f64, start: f64) -> Option<(f64, f64)> {
    let solver = GoldenSectionSearch::new(lo, hi).ok()?.with_tolerance(1e-12).ok()?;
    let res = Executor::new(Negated(f), solver)
        .configure(|s| s.param(start.clamp(lo, hi)).max_iters(400))
        .run()
        .ok()?;
    let t = res.state().best_param?;
    let v = f(t)?;
    v.is_finite().then_some((t, v))
}

struct Minimize<'a, F>(&'a F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Minimize<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> Result<f64, ArgminError> {
        Ok((self.0)(p))
    }
}

/// Nelder–Mead minimization of `f` from `start` with an axis-aligned initial
/// simplex of edge `step`. Returns the best point and value found.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], step: f64, sd_tol: f64, max_iters: u64) -> (Vec<f64>, f64) {
    let mut simplex = vec![start.to_vec()];
    for i in 0..start.len() {
        let mut v = start.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let fallback = (start.to_vec(), f(start));
    let Ok(solver) = NelderMead::new(simplex).with_sd_tolerance(sd_tol) else {
        return fallback;
    };
    match Executor::new(Minimize(f), solver).configure(|s| s.max_iters(max_iters)).run() {
        Ok(res) => {
            let state = res.state();
            match &state.best_param {
                Some(p) if state.best_cost <= fallback.1 => (p.clone(), state.best_cost),
                _ => fallback,
            }
        }
        Err(_) => fallback,
    }
}
