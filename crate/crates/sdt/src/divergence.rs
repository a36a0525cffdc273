//! The S-divergence family and its derivatives in the model parameter.
//!
//! The family is indexed by (gamma, lambda) through the exponents
//! `A = 1 + lambda(1-gamma)` and `B = gamma - lambda(1-gamma)`, with
//! `A + B = 1 + gamma`. The generic three-integral form degenerates as A or
//! B approaches zero, so evaluation is split three ways:
//!
//! * `|A|` (or `|B|`) below 1e-10: the analytic limit expression;
//! * below 1e-6: the generic value, but with the 1/A (or 1/B) factor folded
//!   into the integrand as `expm1(A log(g/f))/A`, which is cancellation-free;
//! * otherwise: the plain three-integral form.
//!
//! Powers `f^B g^A` with negative exponents are evaluated through logs with
//! a floor of -745, and regions where either density underflows 1e-300 are
//! dropped.

use crate::error::{Result, SdtError};
use crate::linalg::Mat;
use crate::model::ParametricModel;
use crate::quad::{integrate_support, Support};

/// Exact-limit switch on |A| or |B|.
pub const BRANCH_SWITCH: f64 = 1e-10;
/// Below this the generic branch runs in its cancellation-safe arrangement.
pub const SAFE_ARRANGEMENT: f64 = 1e-6;

const LOG_MIN: f64 = -690.0;
const EXP_FLOOR: f64 = -745.0;

/// Evaluation branch selected by the exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Generic,
    AZero,
    BZero,
}

/// Divergence parameter pair (gamma, lambda) with derived exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SParams {
    gamma: f64,
    lambda: f64,
}

impl SParams {
    pub fn new(gamma: f64, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) || !gamma.is_finite() {
            return Err(SdtError::InvalidParameter(format!(
                "gamma must lie in [0,1], got {gamma}"
            )));
        }
        if !lambda.is_finite() {
            return Err(SdtError::InvalidParameter("lambda must be finite".into()));
        }
        Ok(SParams { gamma, lambda })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// A = 1 + lambda (1 - gamma).
    pub fn a(&self) -> f64 {
        1.0 + self.lambda * (1.0 - self.gamma)
    }

    /// B = gamma - lambda (1 - gamma).
    pub fn b(&self) -> f64 {
        self.gamma - self.lambda * (1.0 - self.gamma)
    }

    pub fn branch(&self) -> Branch {
        if self.a().abs() < BRANCH_SWITCH {
            Branch::AZero
        } else if self.b().abs() < BRANCH_SWITCH {
            Branch::BZero
        } else {
            Branch::Generic
        }
    }
}

/// S-divergence between two densities given as callables on a common
/// support. Unbounded supports are probed from a window around the origin;
/// supply densities centered within ~16 units of zero or a bounded support.
pub fn s_divergence<G, F>(
    g: G,
    f: F,
    params: &SParams,
    support: Support,
    tol: f64,
) -> Result<f64>
where
    G: Fn(f64) -> f64,
    F: Fn(f64) -> f64,
{
    let log_g = |x: f64| g(x).ln();
    let log_f = |x: f64| f(x).ln();
    let window = default_window(support);
    let value = s_divergence_logs(&log_g, &log_f, params, support, window, tol)?;
    check_nonnegative(value, tol)
}

/// S-divergence S(f_theta_g, f_theta_f) between two members of a model,
/// exact when the model carries closed forms.
pub fn s_divergence_model<M: ParametricModel>(
    model: &M,
    theta_g: &[f64],
    theta_f: &[f64],
    params: &SParams,
    tol: f64,
) -> Result<f64> {
    let value = model.s_div_pair(theta_g, theta_f, params, tol)?;
    check_nonnegative(value, tol)
}

fn check_nonnegative(value: f64, tol: f64) -> Result<f64> {
    if value < -10.0 * tol {
        Err(SdtError::InvalidDensity { value })
    } else {
        Ok(value)
    }
}

fn default_window(support: Support) -> (f64, f64) {
    if support.is_bounded() {
        (support.lo, support.hi)
    } else {
        (support.lo.max(-16.0), support.hi.min(16.0))
    }
}

/// Shared branch logic on log-density callables.
pub(crate) fn s_divergence_logs(
    log_g: &dyn Fn(f64) -> f64,
    log_f: &dyn Fn(f64) -> f64,
    params: &SParams,
    support: Support,
    window: (f64, f64),
    tol: f64,
) -> Result<f64> {
    let gamma = params.gamma();
    let a = params.a();
    let b = params.b();
    let itol = (0.1 * tol).min(1e-10);

    let int_pow = |lh: &dyn Fn(f64) -> f64| -> Result<f64> {
        integrate_support(
            &|x| safe_exp((1.0 + gamma) * lh(x)),
            support,
            window,
            itol,
        )
    };

    match params.branch() {
        Branch::AZero => {
            // ∫ f^{1+γ} log(f/g) − (∫f^{1+γ} − ∫g^{1+γ})/(1+γ)
            let i_f = int_pow(log_f)?;
            let i_g = int_pow(log_g)?;
            let kl_like = integrate_support(
                &|x| pow_log_term(log_f(x), log_g(x), gamma),
                support,
                window,
                itol,
            )?;
            Ok(kl_like - (i_f - i_g) / (1.0 + gamma))
        }
        Branch::BZero => {
            let i_f = int_pow(log_f)?;
            let i_g = int_pow(log_g)?;
            let kl_like = integrate_support(
                &|x| pow_log_term(log_g(x), log_f(x), gamma),
                support,
                window,
                itol,
            )?;
            Ok(kl_like - (i_g - i_f) / (1.0 + gamma))
        }
        Branch::Generic => {
            let abs_a = a.abs();
            let abs_b = b.abs();
            if abs_a.min(abs_b) < SAFE_ARRANGEMENT {
                let i_fg = integrate_support(
                    &|x| dual_pow(log_f(x), b, log_g(x), a),
                    support,
                    window,
                    itol,
                )?;
                if abs_a <= abs_b {
                    // S = −(1/A) ∫ f^{1+γ} expm1(A log(g/f)) + (I_g − I_fg)/B
                    let i_g = int_pow(log_g)?;
                    let core = integrate_support(
                        &|x| expm1_term(log_f(x), log_g(x), gamma, a),
                        support,
                        window,
                        itol,
                    )?;
                    Ok(-core / a + (i_g - i_fg) / b)
                } else {
                    let i_f = int_pow(log_f)?;
                    let core = integrate_support(
                        &|x| expm1_term(log_g(x), log_f(x), gamma, b),
                        support,
                        window,
                        itol,
                    )?;
                    Ok(-core / b + (i_f - i_fg) / a)
                }
            } else {
                let i_f = int_pow(log_f)?;
                let i_g = int_pow(log_g)?;
                let i_fg = integrate_support(
                    &|x| dual_pow(log_f(x), b, log_g(x), a),
                    support,
                    window,
                    itol,
                )?;
                Ok(i_f / a - (1.0 + gamma) / (a * b) * i_fg + i_g / b)
            }
        }
    }
}

fn safe_exp(e: f64) -> f64 {
    e.max(EXP_FLOOR).exp()
}

fn dual_pow(log_f: f64, b: f64, log_g: f64, a: f64) -> f64 {
    if log_f < LOG_MIN || log_g < LOG_MIN {
        return 0.0;
    }
    safe_exp(b * log_f + a * log_g)
}

// h^{1+γ} log(h/other), dropped where either density underflows.
fn pow_log_term(log_h: f64, log_other: f64, gamma: f64) -> f64 {
    if log_h < LOG_MIN {
        return 0.0;
    }
    safe_exp((1.0 + gamma) * log_h) * (log_h - log_other.max(LOG_MIN))
}

// f^{1+γ} expm1(a log(g/f)), the cancellation-free kernel near a = 0.
fn expm1_term(log_f: f64, log_g: f64, gamma: f64, a: f64) -> f64 {
    if log_f < LOG_MIN || log_g < LOG_MIN {
        return 0.0;
    }
    safe_exp((1.0 + gamma) * log_f) * libm::expm1(a * (log_g - log_f))
}

/// Density power divergence d_beta(g, f): Kullback-Leibler at beta = 0.
pub fn dpd<G, F>(g: G, f: F, beta: f64, support: Support, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
    F: Fn(f64) -> f64,
{
    assert!(beta >= 0.0, "dpd needs beta >= 0");
    let window = default_window(support);
    let itol = (0.1 * tol).min(1e-10);
    let log_g = |x: f64| g(x).ln();
    let log_f = |x: f64| f(x).ln();
    let value = if beta == 0.0 {
        integrate_support(&|x| pow_log_term(log_g(x), log_f(x), 0.0), support, window, itol)?
    } else {
        let i_f = integrate_support(&|x| safe_exp((1.0 + beta) * log_f(x)), support, window, itol)?;
        let i_g = integrate_support(&|x| safe_exp((1.0 + beta) * log_g(x)), support, window, itol)?;
        let i_fg = integrate_support(&|x| dual_pow(log_f(x), beta, log_g(x), 1.0), support, window, itol)?;
        i_f - (1.0 + beta) / beta * i_fg + i_g / beta
    };
    check_nonnegative(value, tol)
}

/// DPD between two members of a model through its integral primitives.
pub fn dpd_model<M: ParametricModel>(
    model: &M,
    theta_g: &[f64],
    theta_f: &[f64],
    beta: f64,
    tol: f64,
) -> Result<f64> {
    assert!(beta >= 0.0);
    let value = if beta == 0.0 {
        model.int_pow_log(theta_g, 0.0, theta_f, tol)?
    } else {
        let i_f = model.int_pow(theta_f, beta, tol)?;
        let i_g = model.int_pow(theta_g, beta, tol)?;
        let i_fg = model.int_cross(theta_g, 1.0, theta_f, beta, tol)?;
        i_f - (1.0 + beta) / beta * i_fg + i_g / beta
    };
    check_nonnegative(value, tol)
}

/// Empirical objective whose minimizer over theta is the MDPDE:
/// ∫ f_theta^{1+β} − (1+β)/β · n⁻¹ Σ f_theta^β(x_i) for β > 0, and the
/// negative mean log-likelihood at β = 0.
pub fn mdpde_objective<M: ParametricModel>(
    sample: &[f64],
    model: &M,
    theta: &[f64],
    beta: f64,
    tol: f64,
) -> Result<f64> {
    assert!(!sample.is_empty(), "sample must be nonempty");
    assert!(beta >= 0.0);
    let n = sample.len() as f64;
    if beta == 0.0 {
        Ok(-sample.iter().map(|&x| model.log_density(theta, x)).sum::<f64>() / n)
    } else {
        let pow_term = model.int_pow(theta, beta, tol)?;
        let emp: f64 = sample
            .iter()
            .map(|&x| safe_exp(beta * model.log_density(theta, x)))
            .sum::<f64>()
            / n;
        Ok(pow_term - (1.0 + beta) / beta * emp)
    }
}

/// Gradient of [`mdpde_objective`] in theta.
pub(crate) fn mdpde_objective_gradient<M: ParametricModel>(
    sample: &[f64],
    model: &M,
    theta: &[f64],
    beta: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    let p = model.param_dim();
    let n = sample.len() as f64;
    let mut mean_term = vec![0.0; p];
    for &x in sample {
        let w = if beta == 0.0 {
            1.0
        } else {
            safe_exp(beta * model.log_density(theta, x))
        };
        let u = model.score(theta, x);
        for i in 0..p {
            mean_term[i] += w * u[i];
        }
    }
    for v in &mut mean_term {
        *v /= n;
    }
    if beta == 0.0 {
        Ok(mean_term.iter().map(|v| -v).collect())
    } else {
        let model_term = model.int_score(theta, beta, tol)?;
        Ok((0..p)
            .map(|i| (1.0 + beta) * (model_term[i] - mean_term[i]))
            .collect())
    }
}

/// Gradient M_{γ,λ}(θ) of θ ↦ S_{(γ,λ)}(f_θ, f_{θ0}).
pub fn s_gradient<M: ParametricModel>(
    model: &M,
    theta: &[f64],
    theta0: &[f64],
    params: &SParams,
    tol: f64,
) -> Result<Vec<f64>> {
    model.s_grad_pair(theta, theta0, params, tol)
}

/// Hessian A_γ(θ0) of θ ↦ S_{(γ,λ)}(f_θ, f_{θ0}) at θ = θ0:
/// (1+γ) ∫ u u^T f^{1+γ}. Independent of lambda.
pub fn s_hessian_at_null<M: ParametricModel>(
    model: &M,
    theta0: &[f64],
    gamma: f64,
    tol: f64,
) -> Result<Mat> {
    Ok(model.int_score_outer(theta0, gamma, tol)?.scale(1.0 + gamma))
}
