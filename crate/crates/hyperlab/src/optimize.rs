//! Deterministic quasi-Newton minimization (BFGS with Armijo backtracking).
//!
//! The disc-based distance solver needs an unconstrained smooth minimizer
//! with user-supplied analytic gradients, deterministic behavior for
//! reproducible reports, and curvature-guarded updates so penalty-stage
//! objectives with rapidly changing stiffness cannot corrupt the inverse
//! Hessian. The implementation is the standard two-loop-free dense form:
//! problem dimensions here are tens of variables, so the O(d²) update is
//! cheap and simpler than limited-memory variants.

use nalgebra::DMatrix;

use crate::linalg::RVector;

/// Options controlling a BFGS run.
#[derive(Clone, Debug)]
pub struct BfgsOptions {
    pub max_iterations: usize,
    /// Stop when the infinity norm of the gradient drops below this.
    pub gradient_tol: f64,
    /// Stop when the accepted step is shorter than this.
    pub step_tol: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_tol: 1e-8,
            step_tol: 1e-14,
        }
    }
}

/// Result of a BFGS run. `converged` means the gradient tolerance was met;
/// otherwise the best iterate found is still returned.
#[derive(Clone, Debug)]
pub struct BfgsResult {
    pub x: RVector,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

const ARMIJO_C1: f64 = 1e-4;
const BACKTRACK_FACTOR: f64 = 0.5;
const MAX_BACKTRACKS: usize = 40;
/// Skip the BFGS update when sᵀy is below this fraction of ‖s‖‖y‖ (loss of
/// positive curvature along the step).
const CURVATURE_GUARD: f64 = 1e-12;

/// Minimize a smooth function. `value` is queried during line searches;
/// `value_grad` only at accepted iterates (callers typically share work
/// between the two).
pub fn minimize<F, G>(value: F, value_grad: G, x0: RVector, opts: &BfgsOptions) -> BfgsResult
where
    F: Fn(&RVector) -> f64,
    G: Fn(&RVector) -> (f64, RVector),
{
    let dim = x0.len();
    let mut x = x0;
    let (mut fx, mut grad) = value_grad(&x);
    let mut h = DMatrix::<f64>::identity(dim, dim);
    let mut first_step = true;

    for iteration in 0..opts.max_iterations {
        let grad_norm = grad.amax();
        if !grad_norm.is_finite() {
            return BfgsResult {
                x,
                value: fx,
                gradient_norm: grad_norm,
                iterations: iteration,
                converged: false,
            };
        }
        if grad_norm <= opts.gradient_tol {
            return BfgsResult {
                x,
                value: fx,
                gradient_norm: grad_norm,
                iterations: iteration,
                converged: true,
            };
        }

        // Compute a descent direction and line-search it; if the quasi-Newton
        // direction stalls (stale curvature in stiff penalty valleys), reset
        // the inverse Hessian and retry once with steepest descent before
        // declaring the iterate numerically stationary.
        let mut reset_used = false;
        let accepted = loop {
            let mut direction = -(&h * &grad);
            let mut slope = direction.dot(&grad);
            if slope >= 0.0 || slope.is_nan() {
                h = DMatrix::identity(dim, dim);
                reset_used = true;
                direction = -grad.clone();
                slope = -grad.dot(&grad);
            }

            // Armijo backtracking line search.
            let mut step = 1.0_f64;
            let mut found = None;
            for _ in 0..MAX_BACKTRACKS {
                let candidate = &x + &direction * step;
                let f_candidate = value(&candidate);
                if f_candidate.is_finite() && f_candidate <= fx + ARMIJO_C1 * step * slope {
                    found = Some(candidate);
                    break;
                }
                step *= BACKTRACK_FACTOR;
            }
            match found {
                Some(candidate) => break Some(candidate),
                None if !reset_used => {
                    h = DMatrix::identity(dim, dim);
                    reset_used = true;
                }
                None => break None,
            }
        };
        let Some(x_new) = accepted else {
            return BfgsResult {
                x,
                value: fx,
                gradient_norm: grad_norm,
                iterations: iteration,
                converged: grad_norm <= opts.gradient_tol,
            };
        };

        let (f_new, grad_new) = value_grad(&x_new);
        let s = &x_new - &x;
        let y = &grad_new - &grad;
        let step_len = s.norm();

        if first_step {
            // Scale the initial inverse Hessian to the local curvature
            // before the first update (standard warm scaling).
            let sy = s.dot(&y);
            let yy = y.dot(&y);
            if sy > 0.0 && yy > 0.0 {
                h = DMatrix::identity(dim, dim) * (sy / yy);
            }
            first_step = false;
        }

        let sy = s.dot(&y);
        if sy > CURVATURE_GUARD * s.norm() * y.norm() {
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ with ρ = 1/(sᵀy).
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            // Expanded form avoids building the rank-one projector matrices.
            let s_col = &s;
            let hy_s = &hy * s_col.transpose();
            h -= &hy_s * rho;
            h -= (&hy_s * rho).transpose();
            h += s_col * s_col.transpose() * (rho * rho * yhy + rho);
        }

        x = x_new;
        fx = f_new;
        grad = grad_new;
        if step_len < opts.step_tol {
            let gn = grad.amax();
            return BfgsResult {
                x,
                value: fx,
                gradient_norm: gn,
                iterations: iteration + 1,
                converged: gn <= opts.gradient_tol,
            };
        }
    }

    let gn = grad.amax();
    BfgsResult {
        x,
        value: fx,
        gradient_norm: gn,
        iterations: opts.max_iterations,
        converged: gn <= opts.gradient_tol,
    }
}

/// Central-difference gradient, used in tests to validate analytic
/// gradients of solver objectives.
pub fn numerical_gradient<F>(value: F, x: &RVector, step: f64) -> RVector
where
    F: Fn(&RVector) -> f64,
{
    let mut grad = RVector::zeros(x.len());
    for i in 0..x.len() {
        let mut plus = x.clone();
        let mut minus = x.clone();
        plus[i] += step;
        minus[i] -= step;
        grad[i] = (value(&plus) - value(&minus)) / (2.0 * step);
    }
    grad
}
