//! Minimum density power divergence estimation.
//!
//! Fits θ̂_β by quasi-Newton descent on the empirical objective from
//! [`crate::divergence::mdpde_objective`], then evaluates the sandwich
//! matrices J_β = ∫ u u^T f^{1+β}, V_β = ∫ u u^T f^{1+2β} − ξ ξ^T with
//! ξ = ∫ u f^{1+β}, and Σ_β = J⁻¹ V J⁻¹ at the fit.

use crate::divergence::{mdpde_objective, mdpde_objective_gradient};
use crate::error::{Result, SdtError};
use crate::linalg::{norm2, Mat};
use crate::model::ParametricModel;

const GRAD_TOL: f64 = 1e-8;
const MAX_ITER: usize = 200;

/// A fitted MDPDE with its asymptotic covariance pieces.
#[derive(Debug, Clone)]
pub struct MdpdeFit {
    pub theta_hat: Vec<f64>,
    pub beta: f64,
    pub j: Mat,
    pub v: Mat,
    pub sigma: Mat,
    pub converged: bool,
    pub objective_value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

/// J_β, V_β and Σ_β = J⁻¹ V J⁻¹ for the model at θ.
pub fn model_matrices<M: ParametricModel>(
    model: &M,
    theta: &[f64],
    beta: f64,
    tol: f64,
) -> Result<(Mat, Mat, Mat)> {
    let j = model.int_score_outer(theta, beta, tol)?;
    let xi = model.int_score(theta, beta, tol)?;
    let mut v = model.int_score_outer(theta, 2.0 * beta, tol)?;
    let p = model.param_dim();
    for i in 0..p {
        for k in 0..p {
            v[(i, k)] -= xi[i] * xi[k];
        }
    }
    let j_inv = j.inverse_sym()?;
    let sigma = j_inv.matmul(&v).matmul(&j_inv).symmetrized();
    Ok((j, v, sigma))
}

/// Influence function of the MDPDE functional at the model:
/// IF(y) = J_β(θ0)⁻¹ [u_θ0(y) f_θ0^β(y) − ∫ u f^{1+β}].
pub fn if_mdpde<M: ParametricModel>(
    y: f64,
    model: &M,
    theta0: &[f64],
    beta: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    let j = model.int_score_outer(theta0, beta, tol)?;
    let j_inv = j.inverse_sym()?;
    let xi = model.int_score(theta0, beta, tol)?;
    let w = (beta * model.log_density(theta0, y)).exp();
    let u = model.score(theta0, y);
    let psi: Vec<f64> = u.iter().zip(&xi).map(|(ui, xii)| ui * w - xii).collect();
    Ok(j_inv.matvec(&psi))
}

/// Fit the MDPDE for `sample` at tuning parameter `beta`.
///
/// Starts from `init` (default: the model's method-of-moments value), runs
/// a BFGS line search on the objective, and falls back to golden-section
/// bracketing for one-dimensional parameters when the gradient test fails.
pub fn fit_mdpde<M: ParametricModel>(
    sample: &[f64],
    model: &M,
    beta: f64,
    init: Option<&[f64]>,
    tol: f64,
) -> Result<MdpdeFit> {
    if sample.is_empty() {
        return Err(SdtError::InvalidParameter("sample must be nonempty".into()));
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(SdtError::InvalidParameter("sample contains non-finite values".into()));
    }
    if beta < 0.0 {
        return Err(SdtError::InvalidParameter(format!("beta must be >= 0, got {beta}")));
    }

    let degenerate = sample.windows(2).all(|w| w[0] == w[1]);
    if degenerate {
        if let Some(theta) = model.degenerate_fit(sample[0]) {
            let (j, v, sigma) = model_matrices(model, &theta, beta, tol)?;
            let objective_value = mdpde_objective(sample, model, &theta, beta, tol)?;
            return Ok(MdpdeFit {
                theta_hat: theta,
                beta,
                j,
                v,
                sigma,
                converged: true,
                objective_value,
                grad_norm: 0.0,
                iterations: 0,
            });
        }
    }

    let start = match init {
        Some(t) => t.to_vec(),
        None => model.default_init(sample),
    };

    let obj = |theta: &[f64]| mdpde_objective(sample, model, theta, beta, tol);
    let grad = |theta: &[f64]| mdpde_objective_gradient(sample, model, theta, beta, tol);

    let (mut theta, mut iterations) = bfgs(&obj, &grad, &start)?;
    let mut g = grad(&theta)?;
    let mut converged = norm2(&g) < GRAD_TOL && !degenerate;

    if !converged && model.param_dim() == 1 && !degenerate {
        if let Some(better) = golden_section_1d(&obj, theta[0])? {
            let g2 = grad(&[better])?;
            if norm2(&g2) < norm2(&g) {
                theta = vec![better];
                g = g2;
            }
            iterations += 1;
            converged = norm2(&g) < 1e-6;
        }
    }

    let (j, v, sigma) = model_matrices(model, &theta, beta, tol)?;
    let objective_value = obj(&theta)?;
    Ok(MdpdeFit {
        theta_hat: theta,
        beta,
        j,
        v,
        sigma,
        converged,
        objective_value,
        grad_norm: norm2(&g),
        iterations,
    })
}

fn bfgs(
    obj: &dyn Fn(&[f64]) -> Result<f64>,
    grad: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    start: &[f64],
) -> Result<(Vec<f64>, usize)> {
    let p = start.len();
    let mut x = start.to_vec();
    let mut fx = obj(&x)?;
    let mut g = grad(&x)?;
    let mut h = Mat::identity(p);

    for iter in 0..MAX_ITER {
        if norm2(&g) < GRAD_TOL {
            return Ok((x, iter));
        }
        let mut dir: Vec<f64> = h.matvec(&g).iter().map(|v| -v).collect();
        let mut slope = crate::linalg::dot(&dir, &g);
        if slope >= 0.0 {
            // Reset on a non-descent direction.
            h = Mat::identity(p);
            dir = g.iter().map(|v| -v).collect();
            slope = -crate::linalg::dot(&g, &g);
        }

        // Backtracking Armijo line search.
        let mut alpha = 1.0;
        let mut x_new = x.clone();
        let mut f_new = fx;
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..p {
                x_new[i] = x[i] + alpha * dir[i];
            }
            match obj(&x_new) {
                Ok(v) if v.is_finite() && v <= fx + 1e-4 * alpha * slope => {
                    f_new = v;
                    accepted = true;
                    break;
                }
                _ => alpha *= 0.5,
            }
        }
        if !accepted {
            return Ok((x, iter));
        }

        let g_new = grad(&x_new)?;
        let s: Vec<f64> = (0..p).map(|i| x_new[i] - x[i]).collect();
        let yv: Vec<f64> = (0..p).map(|i| g_new[i] - g[i]).collect();
        let sy = crate::linalg::dot(&s, &yv);
        if sy > 1e-12 * norm2(&s) * norm2(&yv) {
            // BFGS inverse-Hessian update.
            let hy = h.matvec(&yv);
            let yhy = crate::linalg::dot(&yv, &hy);
            let rho = 1.0 / sy;
            let mut h_next = h.clone();
            for i in 0..p {
                for j2 in 0..p {
                    h_next[(i, j2)] += (1.0 + rho * yhy) * rho * s[i] * s[j2]
                        - rho * (hy[i] * s[j2] + s[i] * hy[j2]);
                }
            }
            h = h_next;
        }
        x = x_new;
        fx = f_new;
        g = g_new;
    }
    Ok((x, MAX_ITER))
}

// Bracket a univariate minimum around `center` by expansion, then shrink
// by golden-section to f64 resolution.
fn golden_section_1d(
    obj: &dyn Fn(&[f64]) -> Result<f64>,
    center: f64,
) -> Result<Option<f64>> {
    let eval = |t: f64| obj(&[t]);
    let mut step = 0.5_f64.max(1e-3 * center.abs());
    let (mut a, mut c) = (center - step, center + step);
    let mut fb = eval(center)?;
    // Expand until the center beats both ends.
    for _ in 0..80 {
        let fa = eval(a)?;
        let fc = eval(c)?;
        if fb <= fa && fb <= fc {
            break;
        }
        if fa < fb {
            fb = fa;
            a -= step;
        }
        if fc < fb {
            fb = fc;
            c += step;
        }
        step *= 1.6;
        if !a.is_finite() || !c.is_finite() {
            return Ok(None);
        }
    }
    let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
    let (mut lo, mut hi) = (a, c);
    let mut x1 = lo + phi * (hi - lo);
    let mut x2 = hi - phi * (hi - lo);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    for _ in 0..200 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + phi * (hi - lo);
            f1 = eval(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - phi * (hi - lo);
            f2 = eval(x2)?;
        }
        if (hi - lo).abs() < 1e-13 * (hi.abs() + lo.abs()).max(1.0) {
            break;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
