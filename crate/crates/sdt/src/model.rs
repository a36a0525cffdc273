//! Parametric model abstraction.
//!
//! [`ParametricModel`] exposes the density, score `u_theta = grad log f`,
//! curvature `i_theta = -grad u_theta`, and a family of integral primitives
//! that the divergence, estimation and testing layers are written against.
//! The integral primitives have quadrature-backed default implementations;
//! a model with analytic integrals (the normal mean family here) overrides
//! them, so the generic code transparently runs on closed forms when they
//! exist and on adaptive quadrature when they do not.

use crate::divergence::{s_divergence_logs, SParams, BRANCH_SWITCH, SAFE_ARRANGEMENT};
use crate::error::{Result, SdtError};
use crate::linalg::Mat;
use crate::quad::{integrate_support, Support};

pub trait ParametricModel: Sync {
    fn param_dim(&self) -> usize;

    fn support(&self) -> Support;

    fn density(&self, theta: &[f64], x: f64) -> f64 {
        self.log_density(theta, x).exp()
    }

    fn log_density(&self, theta: &[f64], x: f64) -> f64;

    /// Score u_theta(x), the gradient of log density in theta.
    fn score(&self, theta: &[f64], x: f64) -> Vec<f64>;

    /// Curvature i_theta(x), the negative theta-Jacobian of the score.
    fn curvature(&self, theta: &[f64], x: f64) -> Mat;

    /// True when the integral primitives below are backed by closed forms.
    fn has_closed_forms(&self) -> bool {
        false
    }

    /// Finite window expected to contain the bulk of any integrand built
    /// from the densities at the given parameter points.
    fn quad_window(&self, thetas: &[&[f64]]) -> (f64, f64);

    /// Default optimizer start for a sample (method of moments).
    fn default_init(&self, sample: &[f64]) -> Vec<f64> {
        let mean = sample.iter().sum::<f64>() / sample.len() as f64;
        vec![mean; self.param_dim()]
    }

    /// Exact fit for a degenerate sample with all observations at `x`,
    /// when the model admits one.
    fn degenerate_fit(&self, _x: f64) -> Option<Vec<f64>> {
        None
    }

    /// Integrate an arbitrary integrand over the support.
    fn integrate(&self, integrand: &dyn Fn(f64) -> f64, tol: f64) -> Result<f64> {
        integrate_support(&integrand, self.support(), self.quad_window(&[]), tol)
    }

    /// ∫ f_theta^{1+c} dx.
    fn int_pow(&self, theta: &[f64], c: f64, tol: f64) -> Result<f64> {
        let w = self.quad_window(&[theta]);
        integrate_support(
            &|x| clamped_exp((1.0 + c) * self.log_density(theta, x)),
            self.support(),
            w,
            tol,
        )
    }

    /// ∫ f_{theta_f}^b f_{theta_g}^a dx, exponents possibly negative.
    fn int_cross(&self, theta_g: &[f64], a: f64, theta_f: &[f64], b: f64, tol: f64) -> Result<f64> {
        let w = self.quad_window(&[theta_g, theta_f]);
        integrate_support(
            &|x| cross_pow(self.log_density(theta_f, x), b, self.log_density(theta_g, x), a),
            self.support(),
            w,
            tol,
        )
    }

    /// ∫ u_theta u_theta^T f_theta^{1+c} dx.
    fn int_score_outer(&self, theta: &[f64], c: f64, tol: f64) -> Result<Mat> {
        let p = self.param_dim();
        let w = self.quad_window(&[theta]);
        let mut m = Mat::zeros(p);
        for i in 0..p {
            for j in i..p {
                let v = integrate_support(
                    &|x| {
                        let u = self.score(theta, x);
                        u[i] * u[j] * clamped_exp((1.0 + c) * self.log_density(theta, x))
                    },
                    self.support(),
                    w,
                    tol,
                )?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// ∫ u_theta f_theta^{1+c} dx.
    fn int_score(&self, theta: &[f64], c: f64, tol: f64) -> Result<Vec<f64>> {
        let p = self.param_dim();
        let w = self.quad_window(&[theta]);
        (0..p)
            .map(|i| {
                integrate_support(
                    &|x| self.score(theta, x)[i] * clamped_exp((1.0 + c) * self.log_density(theta, x)),
                    self.support(),
                    w,
                    tol,
                )
            })
            .collect()
    }

    /// ∫ f_{theta_f}^b f_{theta_g}^a u_{theta_g} dx.
    fn int_cross_score(
        &self,
        theta_g: &[f64],
        a: f64,
        theta_f: &[f64],
        b: f64,
        tol: f64,
    ) -> Result<Vec<f64>> {
        let p = self.param_dim();
        let w = self.quad_window(&[theta_g, theta_f]);
        (0..p)
            .map(|i| {
                integrate_support(
                    &|x| {
                        self.score(theta_g, x)[i]
                            * cross_pow(self.log_density(theta_f, x), b, self.log_density(theta_g, x), a)
                    },
                    self.support(),
                    w,
                    tol,
                )
            })
            .collect()
    }

    /// ∫ i_theta f_theta^{1+c} dx.
    fn int_curv(&self, theta: &[f64], c: f64, tol: f64) -> Result<Mat> {
        let p = self.param_dim();
        let w = self.quad_window(&[theta]);
        let mut m = Mat::zeros(p);
        for i in 0..p {
            for j in i..p {
                let v = integrate_support(
                    &|x| {
                        self.curvature(theta, x)[(i, j)]
                            * clamped_exp((1.0 + c) * self.log_density(theta, x))
                    },
                    self.support(),
                    w,
                    tol,
                )?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// ∫ f_theta^{1+c} u_theta log(f_theta / f_theta0) dx.
    fn int_score_log(&self, theta: &[f64], c: f64, theta0: &[f64], tol: f64) -> Result<Vec<f64>> {
        let p = self.param_dim();
        let w = self.quad_window(&[theta, theta0]);
        (0..p)
            .map(|i| {
                integrate_support(
                    &|x| {
                        let lf = self.log_density(theta, x);
                        self.score(theta, x)[i]
                            * clamped_exp((1.0 + c) * lf)
                            * (lf - self.log_density(theta0, x))
                    },
                    self.support(),
                    w,
                    tol,
                )
            })
            .collect()
    }

    /// ∫ f_theta^{1+c} log(f_theta / f_theta0) dx.
    fn int_pow_log(&self, theta: &[f64], c: f64, theta0: &[f64], tol: f64) -> Result<f64> {
        let w = self.quad_window(&[theta, theta0]);
        integrate_support(
            &|x| {
                let lf = self.log_density(theta, x);
                let lg = self.log_density(theta0, x);
                if lf < LOG_DENSITY_MIN {
                    return 0.0;
                }
                clamped_exp((1.0 + c) * lf) * (lf - lg.max(LOG_DENSITY_MIN))
            },
            self.support(),
            w,
            tol,
        )
    }

    /// S_{(γ,λ)}(f_theta_g, f_theta_f), branch dispatch included.
    fn s_div_pair(&self, theta_g: &[f64], theta_f: &[f64], params: &SParams, tol: f64) -> Result<f64> {
        let window = self.quad_window(&[theta_g, theta_f]);
        s_divergence_logs(
            &|x| self.log_density(theta_g, x),
            &|x| self.log_density(theta_f, x),
            params,
            self.support(),
            window,
            tol,
        )
    }

    /// Gradient M_{γ,λ}(θ) of θ ↦ S_{(γ,λ)}(f_θ, f_θ0):
    /// ((1+γ)/B)[∫ f_θ^{1+γ} u_θ − ∫ f_θ0^B f_θ^A u_θ], with the analytic
    /// B → 0 limit (1+γ) ∫ f_θ^{1+γ} u_θ log(f_θ/f_θ0) and a
    /// cancellation-safe arrangement in between.
    fn s_grad_pair(&self, theta: &[f64], theta0: &[f64], params: &SParams, tol: f64) -> Result<Vec<f64>> {
        let gamma = params.gamma();
        let a = params.a();
        let b = params.b();
        if b.abs() < BRANCH_SWITCH {
            Ok(self
                .int_score_log(theta, gamma, theta0, tol)?
                .iter()
                .map(|v| (1.0 + gamma) * v)
                .collect())
        } else if b.abs() < SAFE_ARRANGEMENT {
            // −((1+γ)/B) ∫ f_θ^{1+γ} u expm1(B log(f_θ0/f_θ))
            let p = self.param_dim();
            let w = self.quad_window(&[theta, theta0]);
            (0..p)
                .map(|i| {
                    let core = integrate_support(
                        &|x| {
                            let lf = self.log_density(theta, x);
                            let l0 = self.log_density(theta0, x);
                            if lf < LOG_DENSITY_MIN || l0 < LOG_DENSITY_MIN {
                                return 0.0;
                            }
                            self.score(theta, x)[i]
                                * clamped_exp((1.0 + gamma) * lf)
                                * libm::expm1(b * (l0 - lf))
                        },
                        self.support(),
                        w,
                        tol,
                    )?;
                    Ok(-core * (1.0 + gamma) / b)
                })
                .collect()
        } else {
            let own = self.int_score(theta, gamma, tol)?;
            let cross = self.int_cross_score(theta, a, theta0, b, tol)?;
            Ok(own
                .iter()
                .zip(&cross)
                .map(|(o, c)| (1.0 + gamma) / b * (o - c))
                .collect())
        }
    }
}

const LOG_DENSITY_MIN: f64 = -690.0; // ln(1e-300), below which contributions are dropped
const EXP_FLOOR: f64 = -745.0;

fn clamped_exp(e: f64) -> f64 {
    e.max(EXP_FLOOR).exp()
}

// f^b g^a through logs; regions where either density underflows are dropped
// so that negative exponents cannot manufacture spurious tail mass.
fn cross_pow(log_f: f64, b: f64, log_g: f64, a: f64) -> f64 {
    if log_f < LOG_DENSITY_MIN || log_g < LOG_DENSITY_MIN {
        return 0.0;
    }
    clamped_exp(b * log_f + a * log_g)
}

/// κ_c = (2π)^{-c/2} σ^{-c} (1+c)^{-1/2}, the normal power integral
/// ∫ N(θ,σ²)^{1+c} dx. κ_0 = 1.
pub fn normal_kappa(c: f64, sigma: f64) -> f64 {
    assert!(c > -1.0, "normal_kappa needs exponent above -1");
    assert!(sigma > 0.0);
    (2.0 * std::f64::consts::PI).powf(-0.5 * c) * sigma.powf(-c) / (1.0 + c).sqrt()
}

/// υ_β = (1+β)³ (1+2β)^{-3/2} σ², the asymptotic variance of the
/// minimum density power divergence estimator of a normal mean. υ_0 = σ².
pub fn normal_upsilon(beta: f64, sigma: f64) -> f64 {
    assert!(beta >= 0.0);
    assert!(sigma > 0.0);
    (1.0 + beta).powi(3) / (1.0 + 2.0 * beta).powf(1.5) * sigma * sigma
}

/// Normal location family with known standard deviation; the parameter is
/// the mean. Every integral primitive is overridden with its Gaussian
/// closed form, so nothing downstream pays quadrature cost.
#[derive(Debug, Clone, Copy)]
pub struct NormalKnownVar {
    sigma: f64,
}

impl NormalKnownVar {
    pub fn new(sigma: f64) -> Self {
        assert!(sigma > 0.0 && sigma.is_finite(), "sigma must be positive");
        NormalKnownVar { sigma }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn kappa(&self, c: f64) -> f64 {
        normal_kappa(c, self.sigma)
    }

    pub fn upsilon(&self, beta: f64) -> f64 {
        normal_upsilon(beta, self.sigma)
    }
}

impl ParametricModel for NormalKnownVar {
    fn param_dim(&self) -> usize {
        1
    }

    fn support(&self) -> Support {
        Support::real_line()
    }

    fn log_density(&self, theta: &[f64], x: f64) -> f64 {
        let z = (x - theta[0]) / self.sigma;
        -0.5 * z * z - (self.sigma * (2.0 * std::f64::consts::PI).sqrt()).ln()
    }

    fn score(&self, theta: &[f64], x: f64) -> Vec<f64> {
        vec![(x - theta[0]) / (self.sigma * self.sigma)]
    }

    fn curvature(&self, _theta: &[f64], _x: f64) -> Mat {
        Mat::scalar(1.0 / (self.sigma * self.sigma))
    }

    fn has_closed_forms(&self) -> bool {
        true
    }

    fn quad_window(&self, thetas: &[&[f64]]) -> (f64, f64) {
        let mut lo = 0.0_f64;
        let mut hi = 0.0_f64;
        for t in thetas {
            lo = lo.min(t[0]);
            hi = hi.max(t[0]);
        }
        (lo - 12.0 * self.sigma, hi + 12.0 * self.sigma)
    }

    fn degenerate_fit(&self, x: f64) -> Option<Vec<f64>> {
        Some(vec![x])
    }

    fn int_pow(&self, _theta: &[f64], c: f64, _tol: f64) -> Result<f64> {
        Ok(self.kappa(c))
    }

    fn int_cross(&self, theta_g: &[f64], a: f64, theta_f: &[f64], b: f64, _tol: f64) -> Result<f64> {
        let s = a + b;
        if s <= 0.0 {
            return Err(SdtError::InvalidParameter(format!(
                "normal cross integral needs positive total exponent, got {s}"
            )));
        }
        let d = theta_g[0] - theta_f[0];
        let sig2 = self.sigma * self.sigma;
        Ok(self.kappa(s - 1.0) * (-a * b * d * d / (2.0 * s * sig2)).exp())
    }

    fn int_score_outer(&self, _theta: &[f64], c: f64, _tol: f64) -> Result<Mat> {
        Ok(Mat::scalar(self.kappa(c) / (self.sigma * self.sigma * (1.0 + c))))
    }

    fn int_score(&self, _theta: &[f64], _c: f64, _tol: f64) -> Result<Vec<f64>> {
        Ok(vec![0.0])
    }

    fn int_cross_score(
        &self,
        theta_g: &[f64],
        a: f64,
        theta_f: &[f64],
        b: f64,
        tol: f64,
    ) -> Result<Vec<f64>> {
        let s = a + b;
        let cross = self.int_cross(theta_g, a, theta_f, b, tol)?;
        let sig2 = self.sigma * self.sigma;
        Ok(vec![cross * b * (theta_f[0] - theta_g[0]) / (s * sig2)])
    }

    fn int_curv(&self, _theta: &[f64], c: f64, _tol: f64) -> Result<Mat> {
        Ok(Mat::scalar(self.kappa(c) / (self.sigma * self.sigma)))
    }

    fn int_score_log(&self, theta: &[f64], c: f64, theta0: &[f64], _tol: f64) -> Result<Vec<f64>> {
        let sig2 = self.sigma * self.sigma;
        Ok(vec![self.kappa(c) * (theta[0] - theta0[0]) / (sig2 * (1.0 + c))])
    }

    fn int_pow_log(&self, theta: &[f64], c: f64, theta0: &[f64], _tol: f64) -> Result<f64> {
        let d = theta[0] - theta0[0];
        Ok(self.kappa(c) * d * d / (2.0 * self.sigma * self.sigma))
    }

    fn s_div_pair(&self, theta_g: &[f64], theta_f: &[f64], params: &SParams, _tol: f64) -> Result<f64> {
        let gamma = params.gamma();
        let kappa = self.kappa(gamma);
        let d = theta_g[0] - theta_f[0];
        let q = d * d / (2.0 * (1.0 + gamma) * self.sigma * self.sigma);
        let ab = params.a() * params.b();
        let z = ab * q;
        // S = κ_γ (1+γ)/(AB) [1 − e^{−ABq}] = κ_γ (1+γ) q (1 − e^{−z})/z
        if z.abs() < 1e-12 {
            Ok(kappa * (1.0 + gamma) * q * (1.0 - 0.5 * z + z * z / 6.0))
        } else {
            Ok(-kappa * (1.0 + gamma) * libm::expm1(-z) / ab)
        }
    }

    fn s_grad_pair(&self, theta: &[f64], theta0: &[f64], params: &SParams, tol: f64) -> Result<Vec<f64>> {
        let cross = self.int_cross(theta, params.a(), theta0, params.b(), tol)?;
        Ok(vec![cross * (theta[0] - theta0[0]) / (self.sigma * self.sigma)])
    }
}

/// Wrapper that keeps a model's pointwise functions but discards its
/// closed-form integral overrides, forcing every derived quantity through
/// adaptive quadrature. Used to cross-check closed forms against the
/// generic path.
#[derive(Debug, Clone, Copy)]
pub struct NumericOnly<M: ParametricModel>(pub M);

impl<M: ParametricModel> ParametricModel for NumericOnly<M> {
    fn param_dim(&self) -> usize {
        self.0.param_dim()
    }
    fn support(&self) -> Support {
        self.0.support()
    }
    fn log_density(&self, theta: &[f64], x: f64) -> f64 {
        self.0.log_density(theta, x)
    }
    fn score(&self, theta: &[f64], x: f64) -> Vec<f64> {
        self.0.score(theta, x)
    }
    fn curvature(&self, theta: &[f64], x: f64) -> Mat {
        self.0.curvature(theta, x)
    }
    fn quad_window(&self, thetas: &[&[f64]]) -> (f64, f64) {
        self.0.quad_window(thetas)
    }
    fn degenerate_fit(&self, _x: f64) -> Option<Vec<f64>> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-10;

    #[test]
    fn kappa_reference_values() {
        assert_eq!(normal_kappa(0.0, 1.0), 1.0);
        assert_eq!(normal_kappa(0.0, 2.0), 1.0);
        let k1 = normal_kappa(1.0, 1.0);
        assert!((k1 - 0.28209479177387814).abs() < 1e-15, "got {k1}");
    }

    #[test]
    fn upsilon_reference_values() {
        assert_eq!(normal_upsilon(0.0, 1.0), 1.0);
        assert!((normal_upsilon(0.5, 1.0) - 1.1932426932522915).abs() < 1e-12);
        assert!((normal_upsilon(1.0, 1.0) - 1.5396007178390021).abs() < 1e-12);
    }

    #[test]
    fn density_normalizes_for_random_theta() {
        let model = NormalKnownVar::new(1.3);
        let mut state = 0x9e3779b97f4a7c15_u64;
        for _ in 0..20 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let theta = [((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 8.0];
            let v = model
                .integrate(&|x| model.density(&theta, x), TOL)
                .unwrap();
            assert!((v - 1.0).abs() < 1e-8, "theta={}: {v}", theta[0]);
        }
    }

    #[test]
    fn second_moment_of_standard_normal() {
        let model = NormalKnownVar::new(1.0);
        let v = model
            .integrate(&|x| x * x * model.density(&[0.0], x), TOL)
            .unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn score_matches_log_density_finite_difference() {
        let model = NormalKnownVar::new(0.7);
        let h = 1e-6;
        for &theta in &[-1.5, 0.0, 2.0] {
            for &x in &[-3.0, -0.2, 0.9, 4.0] {
                let fd = (model.log_density(&[theta + h], x) - model.log_density(&[theta - h], x))
                    / (2.0 * h);
                let u = model.score(&[theta], x)[0];
                assert!((fd - u).abs() <= 1e-5 * u.abs().max(1.0), "{fd} vs {u}");
            }
        }
    }

    #[test]
    fn curvature_matches_score_finite_difference() {
        let model = NormalKnownVar::new(0.7);
        let h = 1e-6;
        for &theta in &[-1.0, 0.5] {
            for &x in &[-2.0, 1.2] {
                let fd = -(model.score(&[theta + h], x)[0] - model.score(&[theta - h], x)[0])
                    / (2.0 * h);
                let i = model.curvature(&[theta], x).as_scalar();
                assert!((fd - i).abs() <= 1e-4 * i.abs().max(1.0));
            }
        }
    }

    #[test]
    fn score_has_zero_mean() {
        // Lehmann condition (B): ∫ u_theta f_theta = 0.
        let model = NormalKnownVar::new(1.0);
        let numeric = NumericOnly(model);
        for &theta in &[-2.0, 0.0, 1.3] {
            let v = numeric.int_score(&[theta], 0.0, 1e-9).unwrap()[0];
            assert!(v.abs() < 1e-6, "theta={theta}: {v}");
        }
    }

    #[test]
    fn quadrature_defaults_agree_with_closed_forms() {
        let model = NormalKnownVar::new(1.4);
        let numeric = NumericOnly(model);
        let theta = [0.6];
        let theta0 = [-0.2];
        for &c in &[0.0, 0.3, 1.0] {
            let a = model.int_pow(&theta, c, TOL).unwrap();
            let b = numeric.int_pow(&theta, c, TOL).unwrap();
            assert!((a - b).abs() < 1e-9, "int_pow c={c}: {a} vs {b}");

            let a = model.int_score_outer(&theta, c, TOL).unwrap().as_scalar();
            let b = numeric.int_score_outer(&theta, c, TOL).unwrap().as_scalar();
            assert!((a - b).abs() < 1e-9, "int_score_outer c={c}: {a} vs {b}");

            let a = model.int_curv(&theta, c, TOL).unwrap().as_scalar();
            let b = numeric.int_curv(&theta, c, TOL).unwrap().as_scalar();
            assert!((a - b).abs() < 1e-9, "int_curv c={c}: {a} vs {b}");
        }
        // Cross integrals, including a negative exponent.
        for &(a_exp, b_exp) in &[(0.5, 1.0), (1.5, -0.25), (-0.5, 2.0)] {
            let a = model.int_cross(&theta, a_exp, &theta0, b_exp, TOL).unwrap();
            let b = numeric.int_cross(&theta, a_exp, &theta0, b_exp, TOL).unwrap();
            assert!((a - b).abs() < 1e-8, "int_cross ({a_exp},{b_exp}): {a} vs {b}");

            let a = model.int_cross_score(&theta, a_exp, &theta0, b_exp, TOL).unwrap()[0];
            let b = numeric.int_cross_score(&theta, a_exp, &theta0, b_exp, TOL).unwrap()[0];
            assert!((a - b).abs() < 1e-8, "int_cross_score ({a_exp},{b_exp}): {a} vs {b}");
        }
        let a = model.int_score_log(&theta, 0.5, &theta0, TOL).unwrap()[0];
        let b = numeric.int_score_log(&theta, 0.5, &theta0, TOL).unwrap()[0];
        assert!((a - b).abs() < 1e-8, "int_score_log: {a} vs {b}");
        let a = model.int_pow_log(&theta, 0.5, &theta0, TOL).unwrap();
        let b = numeric.int_pow_log(&theta, 0.5, &theta0, TOL).unwrap();
        assert!((a - b).abs() < 1e-8, "int_pow_log: {a} vs {b}");
    }

    #[test]
    fn simpson_oracle_for_power_integral() {
        // Independent fixed-grid Simpson check of ∫ φ^{3/2} over [-10, 10].
        let model = NormalKnownVar::new(1.0);
        let f = |x: f64| model.density(&[0.0], x).powf(1.5);
        let n = 1_000_000;
        let (a, b) = (-10.0, 10.0);
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + k as f64 * h);
        }
        let simpson = acc * h / 3.0;
        let quadrature = model.integrate(&f, 1e-12).unwrap();
        assert!((quadrature - simpson).abs() < 1e-10, "{quadrature} vs {simpson}");
        // Also the closed form: ∫ φ^{1.5} = κ_{0.5}.
        assert!((quadrature - normal_kappa(0.5, 1.0)).abs() < 1e-10);
    }
}
