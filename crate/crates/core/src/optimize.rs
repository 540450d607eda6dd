//! First-order descent with a doubling/halving line search, the blended
//! search direction of the multi-feature tracker, and the coarse-to-fine
//! driver.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::{Error, Result};

/// Parameters of [`descend`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentConfig {
    /// Outer iterations always performed before a stop test may end descent.
    pub min_steps: usize,
    /// `min_steps` used on the coarsest pyramid level.
    pub coarsest_min_steps: usize,
    pub max_steps: usize,
    /// Length of the first trial step along the search direction, in pixels
    /// of the level being solved.
    pub step_size: f64,
    pub max_refinements: usize,
    /// Gradient magnitude treated as zero.
    pub grad_eps: f64,
    /// Stop once `|g| > decay_ratio * |g_prev|`.
    pub decay_ratio: f64,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            min_steps: 3,
            coarsest_min_steps: 40,
            max_steps: 40,
            step_size: 2.0,
            max_refinements: 10,
            grad_eps: 1e-5,
            decay_ratio: 0.9999,
        }
    }
}

impl DescentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_steps == 0 || self.coarsest_min_steps == 0 || self.max_steps == 0 {
            return Err(Error::Config("descent step counts must be positive"));
        }
        if self.min_steps > self.max_steps || self.coarsest_min_steps > self.max_steps {
            return Err(Error::Config("min_steps must not exceed max_steps"));
        }
        if self.max_refinements == 0 {
            return Err(Error::Config("max_refinements must be positive"));
        }
        if !(self.step_size > 0.0 && self.grad_eps > 0.0 && self.decay_ratio > 0.0) {
            return Err(Error::Config("step size and stop thresholds must be positive"));
        }
        Ok(())
    }

    /// Configuration for pyramid `level` out of `levels`: the coarsest level
    /// uses `coarsest_min_steps`.
    pub fn at_level(&self, level: usize, levels: usize) -> Self {
        let mut c = *self;
        if level + 1 == levels {
            c.min_steps = self.coarsest_min_steps;
        }
        c
    }
}

/// Energy with gradient over `R^D`.
pub trait Objective {
    fn energy(&mut self, p: &[f64]) -> Result<f64>;
    fn gradient(&mut self, p: &[f64], grad: &mut [f64]) -> Result<()>;

    /// Search direction for gradient `grad`. Returns `false` when no descent
    /// direction exists. Defaults to steepest descent.
    fn direction(&self, grad: &[f64], dir: &mut [f64]) -> bool {
        for (d, g) in dir.iter_mut().zip(grad) {
            *d = -g;
        }
        norm(dir) > 0.0
    }
}

/// An energy or gradient evaluation failed during [`descend`].
#[derive(Debug, Clone, PartialEq)]
pub struct DescentFailure {
    /// Outer iteration (1-based) in which the failure happened.
    pub iteration: usize,
    /// Current point of that iteration.
    pub point: Vec<f64>,
    pub error: Error,
}

impl fmt::Display for DescentFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "descent iteration {} at {:?}: {}", self.iteration, self.point, self.error)
    }
}

impl core::error::Error for DescentFailure {}

impl From<DescentFailure> for Error {
    fn from(f: DescentFailure) -> Self {
        f.error
    }
}

/// Gradient descent with fast line search.
///
/// Each outer iteration takes the search direction at `p`, scales it to
/// `step_size`, and brackets a decrease along it: while the energies at
/// `x1, x2, x3` strictly decrease the bracket moves forward by one step,
/// otherwise the step is halved towards `x1`. After `max_refinements` halvings
/// `p` moves to `x1`, the best point found. Forward moves per iteration are
/// capped at `max_refinements` as well, so the work per call is bounded.
///
/// After `min_steps` iterations, descent stops once the gradient is nearly
/// zero or no longer shrinks by at least `decay_ratio`. The returned point
/// never has higher energy than `p0`.
pub fn descend(
    objective: &mut impl Objective,
    p0: &[f64],
    cfg: &DescentConfig,
) -> Result<Vec<f64>, DescentFailure> {
    let dim = p0.len();
    let mut p = p0.to_vec();
    let mut grad = vec![0.0; dim];
    let mut v = vec![0.0; dim];
    let mut g_prev: Option<f64> = None;
    let mut x1 = vec![0.0; dim];
    let mut x2 = vec![0.0; dim];
    let mut x3 = vec![0.0; dim];

    for n in 1..=cfg.max_steps {
        let fail = |p: &[f64], error| DescentFailure { iteration: n, point: p.to_vec(), error };
        objective.gradient(&p, &mut grad).map_err(|e| fail(&p, e))?;
        let g = norm(&grad);
        let flat = g < cfg.grad_eps;
        if n > cfg.min_steps && (flat || g_prev.is_some_and(|gp| g > cfg.decay_ratio * gp)) {
            break;
        }
        g_prev = Some(g);
        if flat || !objective.direction(&grad, &mut v) {
            continue;
        }
        let scale = cfg.step_size / norm(&v);
        v.iter_mut().for_each(|c| *c *= scale);

        x1.copy_from_slice(&p);
        axpy(&p, 1.0, &v, &mut x2);
        axpy(&p, 2.0, &v, &mut x3);
        let mut a = objective.energy(&x1).map_err(|e| fail(&p, e))?;
        let mut b = objective.energy(&x2).map_err(|e| fail(&p, e))?;
        let mut c = objective.energy(&x3).map_err(|e| fail(&p, e))?;
        let mut refinements = 1;
        let mut forwards = 0;
        while refinements < cfg.max_refinements {
            if a > b && b > c && forwards < cfg.max_refinements {
                core::mem::swap(&mut x1, &mut x2);
                core::mem::swap(&mut x2, &mut x3);
                a = b;
                b = c;
                for (k, xk) in x3.iter_mut().enumerate() {
                    *xk = x2[k] + v[k];
                }
                c = objective.energy(&x3).map_err(|e| fail(&p, e))?;
                forwards += 1;
            } else {
                v.iter_mut().for_each(|c| *c *= 0.5);
                x3.copy_from_slice(&x2);
                c = b;
                axpy(&x1, 1.0, &v, &mut x2);
                b = objective.energy(&x2).map_err(|e| fail(&p, e))?;
                refinements += 1;
            }
        }
        p.copy_from_slice(&x1);
    }
    Ok(p)
}

/// Search direction of the multi-feature tracker.
///
/// `a = -g / |g|`; each feature's 2-block of `a` is normalized on its own to
/// form `b`; the result is `0.5 a + 0.5 b`. A feature whose block is zero
/// gets a zero block in `b`. Returns `None` when `g` is entirely zero.
pub fn multi_search_direction(grad: &[f64], feature_count: usize) -> Option<Vec<f64>> {
    assert_eq!(grad.len(), 2 * feature_count, "gradient must hold 2F values");
    let mut v = vec![0.0; grad.len()];
    multi_direction_into(grad, &mut v).then_some(v)
}

pub(crate) fn multi_direction_into(grad: &[f64], v: &mut [f64]) -> bool {
    let g = norm(grad);
    if g == 0.0 || !g.is_finite() {
        return false;
    }
    for (block, out) in grad.chunks_exact(2).zip(v.chunks_exact_mut(2)) {
        let a = [-block[0] / g, -block[1] / g];
        let n = math::hypot(a[0], a[1]);
        let b = if n > 0.0 { [a[0] / n, a[1] / n] } else { [0.0, 0.0] };
        out[0] = 0.5 * a[0] + 0.5 * b[0];
        out[1] = 0.5 * a[1] + 0.5 * b[1];
    }
    true
}

/// Runs `solve(level, positions)` from the coarsest of `levels` pyramid
/// levels down to level 0.
///
/// `x0` is in full-resolution pixels and is divided by `2^(levels-1)` before
/// the coarsest solve; each result is doubled to seed the next finer level.
pub fn coarse_to_fine<E>(
    x0: &[f64],
    levels: usize,
    mut solve: impl FnMut(usize, Vec<f64>) -> core::result::Result<Vec<f64>, E>,
) -> core::result::Result<Vec<f64>, E> {
    assert!(levels > 0);
    let down = (1u64 << (levels - 1)) as f64;
    let mut p: Vec<f64> = x0.iter().map(|v| v / down).collect();
    for level in (0..levels).rev() {
        p = solve(level, p)?;
        if level > 0 {
            p.iter_mut().for_each(|v| *v *= 2.0);
        }
    }
    Ok(p)
}

fn norm(v: &[f64]) -> f64 {
    math::sqrt(v.iter().map(|x| x * x).sum())
}

fn axpy(x: &[f64], alpha: f64, y: &[f64], out: &mut [f64]) {
    for k in 0..x.len() {
        out[k] = x[k] + alpha * y[k];
    }
}
