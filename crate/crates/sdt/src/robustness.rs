//! Robustness diagnostics of the divergence test: the second-order
//! influence function of the statistic, level/power influence functions,
//! and the chi-square inflation factor under fixed contamination with its
//! slope at zero contamination mass.
//!
//! The first-order influence function of the statistic vanishes at the
//! null, so IF2(y) = IF(y)ᵀ A_γ(θ0) IF(y) is the leading diagnostic; it is
//! free of lambda by construction (lambda never appears in A_γ or in the
//! MDPDE influence function), as are all functions in this module.

use crate::chi2mix::{build_mixture, quantile, series_coefficients};
use crate::divergence::s_hessian_at_null;
use crate::error::{Result, SdtError};
use crate::estimation::{if_mdpde, model_matrices};
use crate::model::{normal_kappa, ParametricModel};
use crate::quad::integrate_support;
use crate::special;
use crate::testing::{INT_TOL, SERIES_TOL};

/// Point-mass contamination g_ε = (1−ε) f_θ0 + ε ∧_y of a model density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContaminatedDensity {
    pub epsilon: f64,
    pub y: f64,
}

impl ContaminatedDensity {
    pub fn new(epsilon: f64, y: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(SdtError::InvalidParameter(format!(
                "contamination proportion must lie in [0,1), got {epsilon}"
            )));
        }
        Ok(ContaminatedDensity { epsilon, y })
    }

    /// ∫ h dg_ε = (1−ε) ∫ h f_θ0 + ε h(y); the atom is never smoothed.
    pub fn integrate_against<M: ParametricModel>(
        &self,
        model: &M,
        theta0: &[f64],
        h: &dyn Fn(f64) -> f64,
        tol: f64,
    ) -> Result<f64> {
        let w = model.quad_window(&[theta0]);
        let ac = integrate_support(
            &|x| h(x) * model.density(theta0, x),
            model.support(),
            w,
            tol,
        )?;
        Ok((1.0 - self.epsilon) * ac + self.epsilon * h(self.y))
    }
}

/// Second-order influence function of the test statistic at the null:
/// IF(y)ᵀ A_γ(θ0) IF(y). Nonnegative, zero at y = θ0.
pub fn if2_test<M: ParametricModel>(
    y: f64,
    model: &M,
    theta0: &[f64],
    gamma: f64,
    beta: f64,
) -> Result<f64> {
    let iff = if_mdpde(y, model, theta0, beta, INT_TOL)?;
    let a = s_hessian_at_null(model, theta0, gamma, INT_TOL)?;
    Ok(crate::linalg::dot(&iff, &a.matvec(&iff)))
}

/// Alternative normal-model closed form of IF2, kept as a labelled
/// reference. It disagrees with [`if2_test`] for β > 0 (its constant keeps
/// a single (1+β)^{3/2} factor where squaring the MDPDE influence function
/// yields (1+β)³); the general path is the authoritative one.
pub fn if2_normal_closed(y: f64, sigma: f64, theta0: f64, gamma: f64, beta: f64) -> f64 {
    let d = y - theta0;
    let root_2pi_sigma = (2.0 * std::f64::consts::PI).sqrt() * sigma;
    (1.0 + beta).powf(1.5) / (root_2pi_sigma.powf(beta + gamma) * sigma.powi(4) * (1.0 + gamma).sqrt())
        * d
        * d
        * (-beta * d * d / (sigma * sigma)).exp()
}

// Scalar model moments entering the misspecified sandwich.
struct ScalarMoments {
    m_beta: f64,   // ∫ u² f^{1+β}
    n_beta: f64,   // ∫ u f^{1+β}
    m_2beta: f64,  // ∫ u² f^{1+2β}
    i_beta: f64,   // ∫ i f^{1+β}
    a_gamma: f64,  // (1+γ) ∫ u² f^{1+γ}
}

fn scalar_moments<M: ParametricModel>(
    model: &M,
    theta0: &[f64],
    gamma: f64,
    beta: f64,
) -> Result<ScalarMoments> {
    if model.param_dim() != 1 {
        return Err(SdtError::InvalidParameter(
            "inflation diagnostics need a scalar parameter".into(),
        ));
    }
    Ok(ScalarMoments {
        m_beta: model.int_score_outer(theta0, beta, INT_TOL)?.as_scalar(),
        n_beta: model.int_score(theta0, beta, INT_TOL)?[0],
        m_2beta: model.int_score_outer(theta0, 2.0 * beta, INT_TOL)?.as_scalar(),
        i_beta: model.int_curv(theta0, beta, INT_TOL)?.as_scalar(),
        a_gamma: (1.0 + gamma) * model.int_score_outer(theta0, gamma, INT_TOL)?.as_scalar(),
    })
}

/// Chi-square inflation factor c(g) = A_γ(θ0) V_β(g) / J_β(g)² for the
/// point-mass contaminated density g_ε, honoring the atomic part exactly.
pub fn inflation_factor<M: ParametricModel>(
    model: &M,
    theta0: &[f64],
    g: &ContaminatedDensity,
    gamma: f64,
    beta: f64,
) -> Result<f64> {
    let mo = scalar_moments(model, theta0, gamma, beta)?;
    let eps = g.epsilon;
    let u_y = model.score(theta0, g.y)[0];
    let i_y = model.curvature(theta0, g.y).as_scalar();
    let f_beta_y = (beta * model.log_density(theta0, g.y)).exp();
    let f_2beta_y = (2.0 * beta * model.log_density(theta0, g.y)).exp();

    let j = mo.m_beta + eps * ((i_y - beta * u_y * u_y) * f_beta_y - (mo.i_beta - beta * mo.m_beta));
    let lin = (1.0 - eps) * mo.n_beta + eps * u_y * f_beta_y;
    let v = (1.0 - eps) * mo.m_2beta + eps * u_y * u_y * f_2beta_y - lin * lin;

    if !(j > 0.0) {
        return Err(SdtError::EstimationFailure(format!(
            "J_beta(g) = {j:.6e} is not positive; inflation factor undefined"
        )));
    }
    Ok(mo.a_gamma * v / (j * j))
}

/// Inflation factor for an arbitrary (absolutely continuous) true density,
/// evaluated by quadrature over the model's support.
pub fn inflation_factor_density<M: ParametricModel, G: Fn(f64) -> f64>(
    model: &M,
    theta0: &[f64],
    g: G,
    gamma: f64,
    beta: f64,
) -> Result<f64> {
    let mo = scalar_moments(model, theta0, gamma, beta)?;
    let w = model.quad_window(&[theta0]);
    let sup = model.support();
    let u = |x: f64| model.score(theta0, x)[0];
    let f_pow = |x: f64, c: f64| (c * model.log_density(theta0, x)).exp();

    let j_corr = integrate_support(
        &|x| {
            (model.curvature(theta0, x).as_scalar() - beta * u(x) * u(x))
                * (g(x) - model.density(theta0, x))
                * f_pow(x, beta)
        },
        sup,
        w,
        INT_TOL,
    )?;
    let j = mo.m_beta + j_corr;
    let v_quad = integrate_support(&|x| u(x) * u(x) * f_pow(x, 2.0 * beta) * g(x), sup, w, INT_TOL)?;
    let v_lin = integrate_support(&|x| u(x) * f_pow(x, beta) * g(x), sup, w, INT_TOL)?;
    let v = v_quad - v_lin * v_lin;
    if !(j > 0.0) {
        return Err(SdtError::EstimationFailure(format!(
            "J_beta(g) = {j:.6e} is not positive; inflation factor undefined"
        )));
    }
    Ok(mo.a_gamma * v / (j * j))
}

/// Ratio c(g_ε) / c(f_θ0); equals 1 at ε = 0 and is free of gamma.
pub fn inflation_ratio<M: ParametricModel>(
    model: &M,
    theta0: &[f64],
    g: &ContaminatedDensity,
    gamma: f64,
    beta: f64,
) -> Result<f64> {
    let c_g = inflation_factor(model, theta0, g, gamma, beta)?;
    let c_f = inflation_factor(model, theta0, &ContaminatedDensity::new(0.0, g.y)?, gamma, beta)?;
    Ok(c_g / c_f)
}

/// Slope ∂c(g_ε)/∂ε at ε = 0, i.e. the exact derivative of
/// [`inflation_factor`] in the contamination mass:
///
/// ```text
/// c'(0) = A_γ [ V'(0) M_β − 2 J'(0) (M_{2β} − N_β²) ] / M_β³
/// J'(0) = (i(y) − β u²(y)) f^β(y) − (∫ i f^{1+β} − β M_β)
/// V'(0) = u²(y) f^{2β}(y) − M_{2β} + 2 N_β² − 2 N_β u(y) f^β(y)
/// ```
///
/// Bounded in y for β > 0 and unbounded at β = 0.
pub fn inflation_slope<M: ParametricModel>(
    y: f64,
    model: &M,
    theta0: &[f64],
    gamma: f64,
    beta: f64,
) -> Result<f64> {
    let mo = scalar_moments(model, theta0, gamma, beta)?;
    let u_y = model.score(theta0, y)[0];
    let i_y = model.curvature(theta0, y).as_scalar();
    let f_beta_y = (beta * model.log_density(theta0, y)).exp();
    let f_2beta_y = (2.0 * beta * model.log_density(theta0, y)).exp();

    let j_prime = (i_y - beta * u_y * u_y) * f_beta_y - (mo.i_beta - beta * mo.m_beta);
    let v_prime = u_y * u_y * f_2beta_y - mo.m_2beta + 2.0 * mo.n_beta * mo.n_beta
        - 2.0 * mo.n_beta * u_y * f_beta_y;
    let v0 = mo.m_2beta - mo.n_beta * mo.n_beta;
    Ok(mo.a_gamma * (v_prime * mo.m_beta - 2.0 * j_prime * v0) / mo.m_beta.powi(3))
}

/// Inflation ratio under the reference-table convention for the normal
/// model: all integrated moments use the model's σ, but the density
/// powers at the contamination atom are evaluated under a unit-variance
/// normal. This is the computation behind the tabulated values; it agrees
/// with [`inflation_ratio`] exactly at σ = 1 and for β = 0 at every σ, and
/// unlike the dimensionally consistent ratio it is monotone decreasing in
/// σ at fixed (ε, y) for every β.
pub fn inflation_ratio_reference(sigma: f64, theta0: f64, y: f64, epsilon: f64, beta: f64) -> f64 {
    assert!(sigma > 0.0);
    assert!((0.0..1.0).contains(&epsilon));
    let sig2 = sigma * sigma;
    let kb = normal_kappa(beta, sigma);
    let k2b = normal_kappa(2.0 * beta, sigma);
    let m_beta = kb / (sig2 * (1.0 + beta));
    let m_2beta = k2b / (sig2 * (1.0 + 2.0 * beta));
    let i_beta = kb / sig2; // ∫ i f^{1+β} for the normal
    let d = y - theta0;
    let u_y = d / sig2;
    let i_y = 1.0 / sig2;
    // Atom density factors under unit variance: φ(y-θ0)^β.
    let log_phi = -0.5 * d * d - 0.5 * (2.0 * std::f64::consts::PI).ln();
    let f_beta_y = (beta * log_phi).exp();
    let f_2beta_y = (2.0 * beta * log_phi).exp();

    let j = m_beta
        + epsilon * ((i_y - beta * u_y * u_y) * f_beta_y - (i_beta - beta * m_beta));
    let lin = epsilon * u_y * f_beta_y; // N_β = 0 for the normal
    let v = (1.0 - epsilon) * m_2beta + epsilon * u_y * u_y * f_2beta_y - lin * lin;
    let c_g = v / (j * j);
    let c_f = m_2beta / (m_beta * m_beta);
    c_g / c_f
}

/// Alternative normal-model closed form of the inflation slope, kept as
/// a labelled reference: κ_γ (1+β)² √(1+2β) / (κ_β² κ_{2β}) · (y−θ0)
/// e^{−β(y−θ0)²/σ²}. It is odd in y − θ0 while c(g_ε) itself is even, so
/// it cannot be the derivative of [`inflation_factor`]; [`inflation_slope`]
/// is the authoritative value.
pub fn inflation_slope_normal_closed(y: f64, sigma: f64, theta0: f64, gamma: f64, beta: f64) -> f64 {
    let d = y - theta0;
    let kg = normal_kappa(gamma, sigma);
    let kb = normal_kappa(beta, sigma);
    let k2b = normal_kappa(2.0 * beta, sigma);
    kg * (1.0 + beta).powi(2) * (1.0 + 2.0 * beta).sqrt() / (kb * kb * k2b)
        * d
        * (-beta * d * d / (sigma * sigma)).exp()
}

/// Power influence function at contiguous drift Δ:
/// IF(y)ᵀ Σ_v [∂C_v(θ0,t)/∂t at t=Δ] P(χ²_{r+2v} > t_α/ζ_min).
///
/// The scalar-parameter case uses the analytic coefficient derivative
/// ∂C_v/∂t = e^{−t²/(2Σ)} (2v t^{2v−1} − t^{2v+1}/Σ) / (v! 2^v Σ^v);
/// higher dimensions differentiate the coefficient map by Richardson-refined
/// central differences.
pub fn pif<M: ParametricModel>(
    y: f64,
    model: &M,
    theta0: &[f64],
    delta: &[f64],
    gamma: f64,
    beta: f64,
    alpha: f64,
    tol: f64,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SdtError::InvalidParameter(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let iff = if_mdpde(y, model, theta0, beta, INT_TOL)?;
    if iff.iter().any(|v| !v.is_finite()) {
        return Err(SdtError::InvalidParameter(
            "influence function not finite at the contamination point".into(),
        ));
    }
    let a = s_hessian_at_null(model, theta0, gamma, INT_TOL)?;
    let (_, _, sigma) = model_matrices(model, theta0, beta, INT_TOL)?;
    let null = build_mixture(&a, &sigma, &vec![0.0; model.param_dim()])?;
    let t_alpha = quantile(&null, 1.0 - alpha, SERIES_TOL)?;
    let x0 = t_alpha / null.min_zeta();
    let r = null.rank() as f64;

    if model.param_dim() == 1 {
        let sig = sigma.as_scalar();
        let t = delta[0];
        if t == 0.0 {
            return Ok(0.0);
        }
        let mean = t * t / (2.0 * sig);
        let envelope = (-mean).exp();
        let mut acc = 0.0;
        let mut poisson = 1.0; // t^{2v} / (v! 2^v Σ^v)
        let mut v = 0usize;
        loop {
            let tail = special::chi2_sf(r + 2.0 * v as f64, x0);
            let deriv = if v == 0 {
                -t / sig
            } else {
                poisson * (2.0 * v as f64 / t - t / sig)
            };
            acc += envelope * deriv * tail;
            v += 1;
            poisson *= mean / v as f64;
            if v as f64 > mean + 10.0 && envelope * poisson * (2.0 * v as f64 / t.abs() + t.abs() / sig) < tol * 1e-3
            {
                break;
            }
            if v > 10_000 {
                return Err(SdtError::SeriesNotConverged {
                    achieved: envelope * poisson,
                    requested: tol,
                    terms: v,
                });
            }
        }
        return Ok(iff[0] * acc);
    }

    // Central differences of the coefficient map along each coordinate,
    // refined once by Richardson extrapolation.
    let p = model.param_dim();
    let order = {
        let base = series_coefficients(&build_mixture(&a, &sigma, delta)?, 64);
        let mut n = 64;
        let mut bound = base.error_bound();
        while bound > 1e-12 && n < 4096 {
            n *= 2;
            bound = series_coefficients(&build_mixture(&a, &sigma, delta)?, n).error_bound();
        }
        n
    };
    let tails: Vec<f64> = (0..=order)
        .map(|v| special::chi2_sf(r + 2.0 * v as f64, x0))
        .collect();
    let weighted_sum = |t: &[f64]| -> Result<f64> {
        let series = series_coefficients(&build_mixture(&a, &sigma, t)?, order);
        Ok(series
            .coefficients()
            .iter()
            .zip(&tails)
            .map(|(c, p)| c * p)
            .sum())
    };
    let mut acc = 0.0;
    for i in 0..p {
        let diff_at = |h: f64| -> Result<f64> {
            let mut tp = delta.to_vec();
            let mut tm = delta.to_vec();
            tp[i] += h;
            tm[i] -= h;
            Ok((weighted_sum(&tp)? - weighted_sum(&tm)?) / (2.0 * h))
        };
        let h = 1e-4;
        let d1 = diff_at(h)?;
        let d2 = diff_at(0.5 * h)?;
        acc += iff[i] * (4.0 * d2 - d1) / 3.0;
    }
    Ok(acc)
}

/// Level influence function: [`pif`] at Δ = 0. Identically zero for scalar
/// parameters whenever the MDPDE influence function is bounded.
pub fn lif<M: ParametricModel>(
    y: f64,
    model: &M,
    theta0: &[f64],
    gamma: f64,
    beta: f64,
    alpha: f64,
    tol: f64,
) -> Result<f64> {
    pif(y, model, theta0, &vec![0.0; model.param_dim()], gamma, beta, alpha, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NormalKnownVar;

    #[test]
    fn contaminated_density_splits_atom() {
        let model = NormalKnownVar::new(1.0);
        let g = ContaminatedDensity::new(0.2, 3.0).unwrap();
        let h = |x: f64| x * x;
        let v = g.integrate_against(&model, &[0.0], &h, 1e-10).unwrap();
        assert!((v - (0.8 * 1.0 + 0.2 * 9.0)).abs() < 1e-8, "{v}");
        assert!(ContaminatedDensity::new(1.0, 0.0).is_err());
    }

    #[test]
    fn if2_reference_values() {
        let model = NormalKnownVar::new(1.0);
        assert_eq!(if2_test(0.0, &model, &[0.0], 0.5, 0.5).unwrap(), 0.0);
        // beta = gamma = 0: IF2(y) = y² (unbounded).
        for &y in &[0.5, 2.0, -7.0] {
            let v = if2_test(y, &model, &[0.0], 0.0, 0.0).unwrap();
            assert!((v - y * y).abs() < 1e-12, "y={y}: {v}");
            // The reference closed form coincides with the general path at
            // beta = gamma = 0, sigma = 1.
            let closed = if2_normal_closed(y, 1.0, 0.0, 0.0, 0.0);
            assert!((closed - v).abs() < 1e-12);
        }
    }

    #[test]
    fn if2_closed_form_discrepancy_factor() {
        // For beta > 0 the reference form differs from the general path by
        // exactly (1+β)^{-3/2} (√(2π) σ)^{-β} σ^{-2}.
        let model = NormalKnownVar::new(1.0);
        let (y, gamma, beta) = (2.0, 0.5, 0.5);
        let general = if2_test(y, &model, &[0.0], gamma, beta).unwrap();
        let reference = if2_normal_closed(y, 1.0, 0.0, gamma, beta);
        let factor = (1.0 + beta).powf(-1.5)
            * ((2.0 * std::f64::consts::PI).sqrt()).powf(-beta);
        assert!((reference - general * factor).abs() < 1e-12 * general.max(1.0));
    }

    #[test]
    fn if2_lambda_free_and_monotone_in_tuning() {
        let model = NormalKnownVar::new(1.0);
        // Max over a grid is nonincreasing as gamma=beta grows.
        let sup = |gb: f64| -> f64 {
            let mut best = 0.0_f64;
            let mut y = -100.0;
            while y <= 100.0 {
                best = best.max(if2_test(y, &model, &[0.0], gb, gb).unwrap());
                y += 0.25;
            }
            best
        };
        let (s01, s05, s10) = (sup(0.1), sup(0.5), sup(1.0));
        assert!(s01 >= s05 && s05 >= s10, "{s01} {s05} {s10}");
    }

    #[test]
    fn inflation_factor_table_values() {
        let model = NormalKnownVar::new(1.0);
        // beta = 0, sigma = 1, y = 4, eps = 0.1: ratio = 0.9 + 1.6 - 0.16.
        let g = ContaminatedDensity::new(0.1, 4.0).unwrap();
        let ratio = inflation_ratio(&model, &[0.0], &g, 0.0, 0.0).unwrap();
        assert!((ratio - 2.34).abs() < 1e-10, "{ratio}");
        // eps = 0 is exactly one.
        let g0 = ContaminatedDensity::new(0.0, 4.0).unwrap();
        let r0 = inflation_ratio(&model, &[0.0], &g0, 0.3, 0.3).unwrap();
        assert!((r0 - 1.0).abs() < 1e-12);
        // Gamma cancels in the ratio.
        let a = inflation_ratio(&model, &[0.0], &g, 0.0, 0.5).unwrap();
        let b = inflation_ratio(&model, &[0.0], &g, 0.9, 0.5).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn inflation_ratio_shrinks_with_sigma() {
        // Tabulated convention: monotone in sigma for every beta.
        for &beta in &[0.0, 0.3, 1.0] {
            let mut last = f64::INFINITY;
            for &sigma in &[0.5, 1.0, 2.0] {
                let r = inflation_ratio_reference(sigma, 0.0, 4.0, 0.05, beta);
                assert!(r < last, "beta={beta} sigma={sigma}: {r} !< {last}");
                last = r;
            }
        }
        // The dimensionally consistent ratio shares the property at beta=0,
        // where the atom carries no density factor.
        let mut last = f64::INFINITY;
        for &sigma in &[0.5, 1.0, 2.0] {
            let model = NormalKnownVar::new(sigma);
            let g = ContaminatedDensity::new(0.05, 4.0).unwrap();
            let r = inflation_ratio(&model, &[0.0], &g, 0.0, 0.0).unwrap();
            assert!(r < last, "sigma={sigma}: {r} !< {last}");
            last = r;
        }
    }

    #[test]
    fn reference_ratio_agrees_with_consistent_ratio_where_conventions_meet() {
        // Exact agreement at sigma = 1 for any beta, and at beta = 0 for any sigma.
        for &(sigma, beta) in &[(1.0, 0.0), (1.0, 0.3), (1.0, 1.0), (0.5, 0.0), (2.0, 0.0)] {
            let model = NormalKnownVar::new(sigma);
            for &eps in &[0.01, 0.05, 0.1] {
                let g = ContaminatedDensity::new(eps, 4.0).unwrap();
                let honest = inflation_ratio(&model, &[0.0], &g, beta, beta).unwrap();
                let reference = inflation_ratio_reference(sigma, 0.0, 4.0, eps, beta);
                assert!(
                    (honest - reference).abs() < 1e-12 * honest,
                    "sigma={sigma} beta={beta} eps={eps}: {honest} vs {reference}"
                );
            }
        }
    }

    #[test]
    fn inflation_factor_density_path_matches_point_mass_limit() {
        // A narrow normal contaminant approximates the atom; the smoothing
        // bias is O(width²).
        let model = NormalKnownVar::new(1.0);
        let eps = 0.05;
        let y = 2.0;
        let width = 0.05;
        let g = move |x: f64| {
            let base = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let z = (x - y) / width;
            let spike = (-0.5 * z * z).exp() / (width * (2.0 * std::f64::consts::PI).sqrt());
            (1.0 - eps) * base + eps * spike
        };
        let via_density = inflation_factor_density(&model, &[0.0], g, 0.3, 0.3).unwrap();
        let via_atom =
            inflation_factor(&model, &[0.0], &ContaminatedDensity::new(eps, y).unwrap(), 0.3, 0.3)
                .unwrap();
        assert!(
            (via_density - via_atom).abs() < 5e-3 * via_atom,
            "{via_density} vs {via_atom}"
        );
    }

    #[test]
    fn inflation_slope_matches_finite_difference() {
        let model = NormalKnownVar::new(1.0);
        for &(y, beta) in &[(2.0, 0.3), (4.0, 0.5), (-1.0, 0.0), (0.7, 1.0)] {
            let slope = inflation_slope(y, &model, &[0.0], beta, beta).unwrap();
            let h = 1e-4;
            let cp = inflation_factor(&model, &[0.0], &ContaminatedDensity::new(h, y).unwrap(), beta, beta)
                .unwrap();
            // Negative mass is meaningful as a formal derivative probe.
            let g_minus = ContaminatedDensity { epsilon: -h, y };
            let cm = inflation_factor(&model, &[0.0], &g_minus, beta, beta).unwrap();
            let fd = (cp - cm) / (2.0 * h);
            assert!(
                (slope - fd).abs() <= 1e-4 * fd.abs().max(1.0),
                "y={y} beta={beta}: {slope} vs {fd}"
            );
        }
    }

    #[test]
    fn slope_zero_at_theta0_and_bounded_for_positive_beta() {
        let model = NormalKnownVar::new(1.0);
        // The reference form is odd, so it vanishes at y = theta0
        // and decays to zero in the tails.
        assert_eq!(inflation_slope_normal_closed(0.0, 1.0, 0.0, 0.5, 0.5), 0.0);
        assert!(inflation_slope_normal_closed(50.0, 1.0, 0.0, 0.5, 0.5).abs() < 1e-200);
        // The general slope stays bounded for beta > 0: by |y| = 50 it has
        // flattened onto its tail asymptote.
        let far = inflation_slope(50.0, &model, &[0.0], 0.5, 0.5).unwrap();
        let farther = inflation_slope(500.0, &model, &[0.0], 0.5, 0.5).unwrap();
        assert!(far.is_finite() && (far - farther).abs() < 1e-12);
        // At beta = 0 it grows without bound.
        let near = inflation_slope(10.0, &model, &[0.0], 0.0, 0.0).unwrap();
        let far0 = inflation_slope(100.0, &model, &[0.0], 0.0, 0.0).unwrap();
        assert!(far0 > 50.0 * near.abs().min(far0));
    }

    #[test]
    fn lif_vanishes_for_scalar_parameter() {
        let model = NormalKnownVar::new(1.0);
        for &y in &[-3.0, 0.5, 8.0] {
            for &beta in &[0.0, 0.3, 1.0] {
                let v = lif(y, &model, &[0.0], beta, beta, 0.05, 1e-10).unwrap();
                assert_eq!(v, 0.0, "y={y} beta={beta}");
                let p = pif(y, &model, &[0.0], &[0.0], beta, beta, 0.05, 1e-10).unwrap();
                assert_eq!(v, p);
            }
        }
    }

    #[test]
    fn pif_decays_in_the_tails_for_positive_beta() {
        let model = NormalKnownVar::new(1.0);
        for &y in &[-50.0, 50.0] {
            let v = pif(y, &model, &[0.0], &[1.0], 0.5, 0.5, 0.05, 1e-10).unwrap();
            assert!(v.abs() < 1e-6, "y={y}: {v}");
        }
    }

    #[test]
    fn pif_matches_power_derivative() {
        // PIF is the epsilon-derivative of the contaminated power at 0.
        let model = NormalKnownVar::new(1.0);
        let delta = [1.0];
        for &y in &[-2.0, 0.8, 3.0] {
            let v = pif(y, &model, &[0.0], &delta, 0.5, 0.5, 0.05, 1e-10).unwrap();
            let eps = 1e-3;
            let cont = crate::testing::ContaminationSpec::new(eps, y, delta.to_vec()).unwrap();
            let p_eps =
                crate::testing::contaminated_power(&model, &[0.0], &cont, 0.5, 0.5, 0.05).unwrap();
            let cont0 = crate::testing::ContaminationSpec::new(0.0, y, delta.to_vec()).unwrap();
            let p_0 =
                crate::testing::contaminated_power(&model, &[0.0], &cont0, 0.5, 0.5, 0.05).unwrap();
            let fd = (p_eps - p_0) / eps;
            assert!((v - fd).abs() < 1e-3, "y={y}: {v} vs {fd}");
        }
    }

    #[test]
    fn first_order_influence_of_test_is_zero_at_null() {
        // Mᵀ(θ0) IF(y) with M(θ0) = 0: check the gradient factor directly.
        let model = NormalKnownVar::new(1.0);
        let params = crate::divergence::SParams::new(0.5, 0.3).unwrap();
        let m = crate::divergence::s_gradient(&model, &[0.0], &[0.0], &params, 1e-9).unwrap();
        let mut y = -10.0;
        while y <= 10.0 {
            let iff = if_mdpde(y, &model, &[0.0], 0.5, 1e-9).unwrap();
            assert!((m[0] * iff[0]).abs() < 1e-10);
            y += 2.5;
        }
    }
}
