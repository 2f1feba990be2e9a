//! Newton's method and pseudo-arclength continuation for polynomial systems.
//!
//! Systems are given as [`MPoly`] equations over a shared variable vector; a subset of
//! the variables is designated as unknowns and the rest are held fixed.

use crate::poly::{MPoly, MAX_VARS};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("Newton iteration did not converge (residual {residual:.3e} after {iterations} steps)")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("singular Jacobian")]
    Singular,
    #[error("continuation step fell below {0:.1e}")]
    StepTooSmall(f64),
    #[error("continuation exceeded {0} steps")]
    TooManySteps(usize),
}

/// Iteration controls for [`PolySystem::newton`].
#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    /// Required `max |F_i|` at the solution.
    pub tol: f64,
    /// Relative update size below which the iteration is considered settled.
    pub step_tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-12, step_tol: 1e-14, max_iter: 60 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonReport {
    pub iterations: usize,
    pub residual: f64,
}

/// Equations with precomputed partial derivatives in the chosen unknowns.
#[derive(Clone, Debug)]
pub struct PolySystem {
    eqs: Vec<MPoly>,
    jac: Vec<Vec<MPoly>>,
    unknowns: Vec<usize>,
}

impl PolySystem {
    pub fn new(eqs: Vec<MPoly>, unknowns: Vec<usize>) -> Self {
        assert!(unknowns.iter().all(|&k| k < MAX_VARS));
        let jac = eqs.iter().map(|e| unknowns.iter().map(|&k| e.partial(k)).collect()).collect();
        Self { eqs, jac, unknowns }
    }

    pub fn equations(&self) -> &[MPoly] {
        &self.eqs
    }

    pub fn unknowns(&self) -> &[usize] {
        &self.unknowns
    }

    pub fn residual(&self, pt: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.eqs.len(), self.eqs.iter().map(|e| e.eval_f64(pt)))
    }

    pub fn jacobian(&self, pt: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.eqs.len(), self.unknowns.len(), |i, j| self.jac[i][j].eval_f64(pt))
    }

    pub fn residual_norm(&self, pt: &[f64]) -> f64 {
        self.residual(pt).amax()
    }

    /// Newton's method on a square system, updating the unknown entries of `pt` in place.
    pub fn newton(&self, pt: &mut [f64], opts: NewtonOptions) -> Result<NewtonReport, NumericError> {
        assert_eq!(self.eqs.len(), self.unknowns.len(), "Newton needs a square system");
        let mut settled = 0;
        for it in 0..opts.max_iter {
            let r = self.residual(pt);
            let j = self.jacobian(pt);
            let delta = solve(j, r)?;
            let mut rel = 0.0f64;
            for (d, &k) in delta.iter().zip(&self.unknowns) {
                pt[k] -= d;
                rel = rel.max(d.abs() / (1.0 + pt[k].abs()));
            }
            if !rel.is_finite() {
                break;
            }
            if rel <= opts.step_tol {
                settled += 1;
                if settled >= 2 || self.residual_norm(pt) <= opts.tol {
                    let residual = self.residual_norm(pt);
                    if residual <= opts.tol {
                        return Ok(NewtonReport { iterations: it + 1, residual });
                    }
                }
            }
        }
        let residual = self.residual_norm(pt);
        if residual <= opts.tol {
            Ok(NewtonReport { iterations: opts.max_iter, residual })
        } else {
            Err(NumericError::NoConvergence { residual, iterations: opts.max_iter })
        }
    }
}

fn solve(j: DMatrix<f64>, r: DVector<f64>) -> Result<DVector<f64>, NumericError> {
    let scale = j.amax();
    if !(scale.is_finite() && scale > 0.0) {
        return Err(NumericError::Singular);
    }
    j.lu().solve(&r).ok_or(NumericError::Singular)
}

/// Settings for [`trace_branch`].
#[derive(Clone, Copy, Debug)]
pub struct ContinuationOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
    pub corrector: NewtonOptions,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            initial_step: 1e-3,
            min_step: 1e-9,
            max_step: 2e-2,
            max_steps: 20_000,
            corrector: NewtonOptions { tol: 1e-12, step_tol: 1e-13, max_iter: 8 },
        }
    }
}

/// Traces the curve `F = 0` of an `n × (n+1)` system by pseudo-arclength continuation.
///
/// `start` must already lie on the curve; `direction` orients the initial tangent
/// (its sign against the tangent decides which way to go). Tracing stops once `stop`
/// returns true for an accepted point, which is included in the output.
pub fn trace_branch(
    sys: &PolySystem,
    start: &[f64],
    direction: &[f64],
    opts: ContinuationOptions,
    mut stop: impl FnMut(&[f64]) -> bool,
) -> Result<Vec<Vec<f64>>, NumericError> {
    let n = sys.eqs.len();
    assert_eq!(sys.unknowns.len(), n + 1, "continuation needs one free unknown");
    let mut pts = vec![start.to_vec()];
    let mut tangent = DVector::from_iterator(n + 1, direction.iter().copied());
    tangent = tangent_at(sys, start, &tangent)?;
    let mut h = opts.initial_step;
    for _ in 0..opts.max_steps {
        let cur = pts.last().expect("nonempty").clone();
        let mut pred = cur.clone();
        for (i, &k) in sys.unknowns.iter().enumerate() {
            pred[k] += h * tangent[i];
        }
        match correct(sys, &pred, &tangent, opts.corrector) {
            Ok((next, iters)) => {
                let new_tangent = tangent_at(sys, &next, &tangent)?;
                if new_tangent.dot(&tangent) < 0.5 {
                    h *= 0.5;
                } else {
                    tangent = new_tangent;
                    let done = stop(&next);
                    pts.push(next);
                    if done {
                        return Ok(pts);
                    }
                    if iters <= 3 {
                        h = (h * 1.5).min(opts.max_step);
                    }
                    continue;
                }
            }
            Err(_) => h *= 0.5,
        }
        if h < opts.min_step {
            return Err(NumericError::StepTooSmall(opts.min_step));
        }
    }
    Err(NumericError::TooManySteps(opts.max_steps))
}

/// Unit null vector of the Jacobian, oriented along `prev`.
fn tangent_at(sys: &PolySystem, pt: &[f64], prev: &DVector<f64>) -> Result<DVector<f64>, NumericError> {
    let n = sys.eqs.len();
    let j = sys.jacobian(pt);
    let mut aug = DMatrix::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n + 1)).copy_from(&j);
    aug.row_mut(n).copy_from(&prev.transpose());
    let mut rhs = DVector::zeros(n + 1);
    rhs[n] = 1.0;
    let t = solve(aug, rhs)?;
    let norm = t.norm();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(NumericError::Singular);
    }
    Ok(t / norm)
}

/// Newton on `F = 0` together with `t · (v - pred) = 0`.
fn correct(
    sys: &PolySystem,
    pred: &[f64],
    tangent: &DVector<f64>,
    opts: NewtonOptions,
) -> Result<(Vec<f64>, usize), NumericError> {
    let n = sys.eqs.len();
    let mut v = pred.to_vec();
    for it in 0..opts.max_iter {
        let r = sys.residual(&v);
        let j = sys.jacobian(&v);
        let mut aug = DMatrix::zeros(n + 1, n + 1);
        aug.view_mut((0, 0), (n, n + 1)).copy_from(&j);
        aug.row_mut(n).copy_from(&tangent.transpose());
        let mut rhs = DVector::zeros(n + 1);
        rhs.rows_mut(0, n).copy_from(&r);
        rhs[n] = sys.unknowns.iter().enumerate().map(|(i, &k)| tangent[i] * (v[k] - pred[k])).sum();
        let d = solve(aug, rhs)?;
        let mut rel = 0.0f64;
        for (i, &k) in sys.unknowns.iter().enumerate() {
            v[k] -= d[i];
            rel = rel.max(d[i].abs() / (1.0 + v[k].abs()));
        }
        if rel <= opts.step_tol && sys.residual_norm(&v) <= opts.tol {
            return Ok((v, it + 1));
        }
    }
    let residual = sys.residual_norm(&v);
    Err(NumericError::NoConvergence { residual, iterations: opts.max_iter })
}

/// A point vector with the given variables set.
pub fn point(assign: &[(usize, f64)]) -> Vec<f64> {
    let mut p = vec![0.0; MAX_VARS];
    for &(k, v) in assign {
        p[k] = v;
    }
    p
}
