//! Distribution of Σ ζ_i · χ²_1(δ_i): positive weighted sums of independent
//! noncentral chi-squares with one degree of freedom.
//!
//! The CDF and survival function are expanded in central chi-square terms,
//!
//! ```text
//! P(Q ≤ x) = Σ_v C_v · P(χ²_{r+2v} ≤ x / ζ_min),    C_v ≥ 0,  Σ_v C_v = 1,
//! ```
//!
//! with the scale pinned to the smallest weight so every coefficient is
//! nonnegative and the dropped tail after N terms is bounded by
//! `e_N = 1 − Σ_{v≤N} C_v`. The coefficients come from the cumulant-based
//! recursion for moments of the Gaussian quadratic form behind the series:
//! writing a_j² = 1 − ζ_min/ζ_j and c_j² = δ_j ζ_min/ζ_j,
//!
//! ```text
//! g_k  = Σ_j [ a_j^{2k} + k c_j² a_j^{2(k-1)} ]
//! c_0  = 1,   c_v = (1/2v) Σ_{k=1}^{v} g_k c_{v-k}
//! C_v  = c_v · Π_j (ζ_min/ζ_j)^{1/2} · e^{-δ/2}
//! ```
//!
//! For r = 1 the series collapses to the Poisson mixture of the noncentral
//! chi-square, and quantiles take the exact one-degree-of-freedom path.

use crate::error::{Result, SdtError};
use crate::linalg::Mat;
use crate::special;

/// Rank cut: eigenvalues below this multiple of the largest are dropped.
pub const RANK_TOLERANCE: f64 = 1e-10;

const N_MAX: usize = 8192;

/// The law of Σ ζ_i χ²_1(δ_i) with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSqMixture {
    zeta: Vec<f64>,
    delta: Vec<f64>,
}

impl ChiSqMixture {
    /// Build directly from weights and noncentralities.
    pub fn new(zeta: Vec<f64>, delta: Vec<f64>) -> Result<Self> {
        if zeta.is_empty() || zeta.len() != delta.len() {
            return Err(SdtError::InvalidParameter(
                "mixture needs matching, nonempty weight and noncentrality lists".into(),
            ));
        }
        if zeta.iter().any(|&z| !(z > 0.0) || !z.is_finite()) {
            return Err(SdtError::InvalidParameter("mixture weights must be positive".into()));
        }
        if delta.iter().any(|&d| d < 0.0 || !d.is_finite()) {
            return Err(SdtError::InvalidParameter("noncentralities must be nonnegative".into()));
        }
        Ok(ChiSqMixture { zeta, delta })
    }

    pub fn rank(&self) -> usize {
        self.zeta.len()
    }

    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    /// Total noncentrality Σ δ_i.
    pub fn total_noncentrality(&self) -> f64 {
        self.delta.iter().sum()
    }

    pub fn min_zeta(&self) -> f64 {
        self.zeta.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_zeta(&self) -> f64 {
        self.zeta.iter().cloned().fold(0.0, f64::max)
    }
}

/// Series coefficients C_0..C_n with the Remark-style truncation bound.
#[derive(Debug, Clone)]
pub struct KotzSeries {
    coefficients: Vec<f64>,
    error_bound: f64,
}

impl KotzSeries {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// e_N = 1 − Σ_{v≤N} C_v, an upper bound on the dropped series tail.
    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }
}

/// Upper bound on the truncation error of `series`.
pub fn truncation_bound(series: &KotzSeries) -> f64 {
    series.error_bound()
}

/// Map the quadratic-form data (A, Σ, shift) to mixture weights and
/// noncentralities: eigen-decompose Σ^{1/2} A Σ^{1/2} = Pᵀ Γ P, keep the
/// nonzero eigenvalues, and set δ_i = (P Σ^{-1/2} shift)_i² on the kept
/// directions.
pub fn build_mixture(a: &Mat, sigma: &Mat, delta_shift: &[f64]) -> Result<ChiSqMixture> {
    let p = a.dim();
    assert_eq!(sigma.dim(), p);
    assert_eq!(delta_shift.len(), p);
    let (_, inv_sqrt) = sigma.sqrt_invsqrt_sym()?;
    let sqrt = sigma.sqrt_invsqrt_sym()?.0;
    let t = sqrt.matmul(a).matmul(&sqrt).symmetrized();
    let (w, q) = t.eigen_sym();
    let w_max = w[0];
    if !(w_max > 0.0) {
        return Err(SdtError::InvalidParameter(
            "quadratic form has no positive eigenvalue".into(),
        ));
    }
    let mu = q.matvec(&inv_sqrt.matvec(delta_shift));
    let mut zeta = Vec::new();
    let mut delta = Vec::new();
    for i in 0..p {
        if w[i] > RANK_TOLERANCE * w_max {
            zeta.push(w[i]);
            delta.push(mu[i] * mu[i]);
        }
    }
    ChiSqMixture::new(zeta, delta)
}

/// Coefficients up to a fixed order `n`.
pub fn series_coefficients(mixture: &ChiSqMixture, n: usize) -> KotzSeries {
    let state = CoefficientState::new(mixture);
    state.run_to(n)
}

struct CoefficientState<'a> {
    mixture: &'a ChiSqMixture,
    a2: Vec<f64>,
    c2: Vec<f64>,
    c0: f64,
}

impl<'a> CoefficientState<'a> {
    fn new(mixture: &'a ChiSqMixture) -> Self {
        let zmin = mixture.min_zeta();
        let a2: Vec<f64> = mixture.zeta.iter().map(|&z| 1.0 - zmin / z).collect();
        let c2: Vec<f64> = mixture
            .zeta
            .iter()
            .zip(&mixture.delta)
            .map(|(&z, &d)| d * zmin / z)
            .collect();
        let log_c0: f64 = mixture.zeta.iter().map(|&z| 0.5 * (zmin / z).ln()).sum::<f64>()
            - 0.5 * mixture.total_noncentrality();
        CoefficientState { mixture, a2, c2, c0: log_c0.exp() }
    }

    fn run_to(&self, n: usize) -> KotzSeries {
        let r = self.mixture.rank();
        let mut g = Vec::with_capacity(n + 1); // g[k-1] = g_k
        let mut pow = vec![1.0_f64; r]; // a_j^{2(k-1)} while computing g_k
        let mut c = vec![1.0_f64];
        for k in 1..=n {
            let mut gk = 0.0;
            for j in 0..r {
                gk += self.a2[j] * pow[j] + k as f64 * self.c2[j] * pow[j];
            }
            for j in 0..r {
                pow[j] *= self.a2[j];
            }
            g.push(gk);
            let mut acc = 0.0;
            for i in 1..=k {
                acc += g[i - 1] * c[k - i];
            }
            c.push(acc / (2.0 * k as f64));
        }
        let coefficients: Vec<f64> = c.iter().map(|ci| self.c0 * ci).collect();
        let sum: f64 = coefficients.iter().sum();
        KotzSeries { coefficients, error_bound: (1.0 - sum).max(0.0) }
    }
}

fn coefficients_to_tol(mixture: &ChiSqMixture, tol: f64) -> Result<KotzSeries> {
    let state = CoefficientState::new(mixture);
    let mut n = 32;
    loop {
        let series = state.run_to(n);
        if series.error_bound <= tol {
            return Ok(series);
        }
        if n >= N_MAX {
            return Err(SdtError::SeriesNotConverged {
                achieved: series.error_bound,
                requested: tol,
                terms: n,
            });
        }
        n = (n * 2).min(N_MAX);
    }
}

#[derive(Clone, Copy)]
enum Tail {
    Lower,
    Upper,
}

fn evaluate(mixture: &ChiSqMixture, x: f64, tol: f64, tail: Tail) -> Result<f64> {
    assert!(tol > 0.0);
    if x <= 0.0 {
        return Ok(match tail {
            Tail::Lower => 0.0,
            Tail::Upper => 1.0,
        });
    }
    let series = coefficients_to_tol(mixture, tol)?;
    let r = mixture.rank() as f64;
    let scaled = x / mixture.min_zeta();
    let mut acc = 0.0;
    for (v, &cv) in series.coefficients.iter().enumerate() {
        if cv == 0.0 {
            continue;
        }
        let df = r + 2.0 * v as f64;
        acc += cv
            * match tail {
                Tail::Lower => special::chi2_cdf(df, scaled),
                Tail::Upper => special::chi2_sf(df, scaled),
            };
    }
    Ok(acc.clamp(0.0, 1.0))
}

/// CDF of the mixture at `x`, truncation error at most `tol`.
pub fn cdf(mixture: &ChiSqMixture, x: f64, tol: f64) -> Result<f64> {
    evaluate(mixture, x, tol, Tail::Lower)
}

/// Survival function of the mixture at `x`, truncation error at most `tol`.
pub fn survival(mixture: &ChiSqMixture, x: f64, tol: f64) -> Result<f64> {
    evaluate(mixture, x, tol, Tail::Upper)
}

/// Quantile: an x with |cdf(x) − q| ≤ tol.
///
/// Rank-one mixtures use the exact (non)central chi-square quantile; higher
/// ranks bracket from `[0, r ζ_max (r + δ + 40)]`, doubling on failure, and
/// bisect on the series CDF.
pub fn quantile(mixture: &ChiSqMixture, q: f64, tol: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(SdtError::InvalidParameter(format!("quantile needs q in (0,1), got {q}")));
    }
    if mixture.rank() == 1 {
        return Ok(mixture.zeta[0] * special::chi1_noncentral_quantile(mixture.delta[0], q));
    }
    let series_tol = (0.01 * tol).min(1e-12);
    let r = mixture.rank() as f64;
    let mut hi = r * mixture.max_zeta() * (r + mixture.total_noncentrality() + 40.0);
    let mut tries = 0;
    while cdf(mixture, hi, series_tol)? < q {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(SdtError::InvalidParameter("quantile bracket diverged".into()));
        }
    }
    let mut lo = 0.0;
    let mut mid = 0.5 * hi;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let c = cdf(mixture, mid, series_tol)?;
        if (c - q).abs() <= tol && hi - lo <= 1e-8 * hi.max(1.0) {
            return Ok(mid);
        }
        if c < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
    }
    Ok(mid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_chi1() -> ChiSqMixture {
        ChiSqMixture::new(vec![1.0], vec![0.0]).unwrap()
    }

    #[test]
    fn single_central_term_is_exact() {
        let mix = central_chi1();
        let series = series_coefficients(&mix, 10);
        assert!((series.coefficients()[0] - 1.0).abs() < 1e-15);
        assert!(series.coefficients()[1..].iter().all(|&c| c == 0.0));
        assert!(series.error_bound() == 0.0);
        let v = cdf(&mix, 3.841458820694124, 1e-12).unwrap();
        assert!((v - 0.95).abs() < 1e-12, "{v}");
    }

    #[test]
    fn rank_one_noncentral_matches_poisson_weights() {
        let mix = ChiSqMixture::new(vec![1.0], vec![10.0]).unwrap();
        let series = series_coefficients(&mix, 40);
        let mut w = (-5.0_f64).exp();
        for v in 0..=40 {
            let c = series.coefficients()[v];
            assert!((c - w).abs() < 1e-14, "v={v}: {c} vs poisson {w}");
            w *= 5.0 / (v as f64 + 1.0);
        }
        // Survival at the 0.95 central quantile: the contiguous power cell.
        let s = survival(&mix, 3.841458820694124, 1e-12).unwrap();
        assert!((s - 0.8853).abs() < 1e-3, "{s}");
        let c = cdf(&mix, 3.841458820694124, 1e-12).unwrap();
        assert!((c + s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn truncation_bound_matches_poisson_tail() {
        let mix = ChiSqMixture::new(vec![1.0], vec![10.0]).unwrap();
        let series = series_coefficients(&mix, 30);
        let bound = truncation_bound(&series);
        // 1 − Poisson(5) CDF at 30, around 1e-14.
        assert!(bound > 0.0 && bound < 1e-12, "{bound}");
        // Monotone in the order.
        let mut last = f64::INFINITY;
        for n in [5, 10, 20, 30] {
            let b = truncation_bound(&series_coefficients(&mix, n));
            assert!(b <= last + 1e-18);
            last = b;
        }
    }

    #[test]
    fn coefficients_nonnegative_with_partial_sums_below_one() {
        let mix = ChiSqMixture::new(vec![1.7, 0.6, 1.1], vec![2.5, 0.0, 4.0]).unwrap();
        let series = series_coefficients(&mix, 200);
        let mut partial = 0.0;
        for &c in series.coefficients() {
            assert!(c >= 0.0);
            partial += c;
            assert!(partial <= 1.0 + 1e-12, "partial sum {partial}");
        }
        assert!((partial + series.error_bound() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn build_mixture_scalar_identity() {
        let mix = build_mixture(&Mat::scalar(1.0), &Mat::scalar(1.0), &[0.0]).unwrap();
        assert_eq!(mix.rank(), 1);
        assert!((mix.zeta()[0] - 1.0).abs() < 1e-14);
        assert_eq!(mix.delta()[0], 0.0);
    }

    #[test]
    fn build_mixture_drops_null_directions() {
        let a = Mat::from_rows(&[&[2.0, 0.0], &[0.0, 0.0]]);
        let sigma = Mat::identity(2);
        let mix = build_mixture(&a, &sigma, &[1.0, 1.0]).unwrap();
        assert_eq!(mix.rank(), 1);
        assert!((mix.zeta()[0] - 2.0).abs() < 1e-13);
        assert!((mix.delta()[0] - 1.0).abs() < 1e-13);
        assert!((mix.total_noncentrality() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn build_mixture_rejects_indefinite_sigma() {
        let a = Mat::identity(2);
        let sigma = Mat::from_rows(&[&[1.0, 0.0], &[0.0, -0.5]]);
        assert!(matches!(
            build_mixture(&a, &sigma, &[0.0, 0.0]),
            Err(SdtError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn quantile_reference_values() {
        let mix = central_chi1();
        let q = quantile(&mix, 0.95, 1e-10).unwrap();
        assert!((q - 3.841458820694124).abs() < 1e-4, "{q}");
        let scaled = ChiSqMixture::new(vec![2.0], vec![0.0]).unwrap();
        let q2 = quantile(&scaled, 0.95, 1e-10).unwrap();
        assert!((q2 - 7.682917641388248).abs() < 2e-4, "{q2}");
    }

    #[test]
    fn quantile_round_trips_on_rank_two_mixture() {
        let mix = ChiSqMixture::new(vec![1.0, 0.5], vec![1.0, 2.0]).unwrap();
        let x = quantile(&mix, 0.9, 1e-8).unwrap();
        let c = cdf(&mix, x, 1e-12).unwrap();
        assert!((c - 0.9).abs() < 1e-6, "{c}");
    }

    #[test]
    fn scaling_covariance() {
        let mix = ChiSqMixture::new(vec![1.3, 0.4, 0.9], vec![0.5, 2.0, 0.0]).unwrap();
        let scaled = ChiSqMixture::new(
            mix.zeta().iter().map(|z| 7.0 * z).collect(),
            mix.delta().to_vec(),
        )
        .unwrap();
        for &x in &[0.5, 2.0, 5.0, 11.0] {
            let a = cdf(&mix, x, 1e-12).unwrap();
            let b = cdf(&scaled, 7.0 * x, 1e-12).unwrap();
            assert!((a - b).abs() < 1e-12, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn cdf_monotone_and_bounded() {
        let mix = ChiSqMixture::new(vec![2.0, 1.0, 0.25], vec![3.0, 0.0, 1.0]).unwrap();
        let mut last = 0.0;
        let mut x = 0.0;
        while x <= 60.0 {
            let c = cdf(&mix, x, 1e-11).unwrap();
            assert!((0.0..=1.0).contains(&c));
            assert!(c + 1e-12 >= last, "x={x}");
            last = c;
            x += 0.5;
        }
        assert!(cdf(&mix, 1e-9, 1e-11).unwrap() < 1e-3);
        assert!(cdf(&mix, 500.0, 1e-11).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn pathological_spread_reports_nonconvergence() {
        let mix = ChiSqMixture::new(vec![1.0, 1e-7], vec![0.0, 0.0]).unwrap();
        match cdf(&mix, 1.0, 1e-12) {
            Err(SdtError::SeriesNotConverged { achieved, .. }) => assert!(achieved > 0.0),
            other => panic!("expected series failure, got {other:?}"),
        }
    }
}
