//! Scalar special functions backing the distribution code: normal CDF and
//! quantile, regularized incomplete gamma, and central / noncentral (one
//! degree of freedom) chi-square CDFs and quantiles.
//!
//! The incomplete gamma follows the classic series / continued-fraction
//! split, switching at `x = a + 1`. The noncentral chi-square with one
//! degree of freedom is evaluated through the normal CDF identity
//! `P(chi2_1(delta) <= x) = Phi(sqrt(x) - sqrt(delta)) - Phi(-sqrt(x) - sqrt(delta))`,
//! which is exact and avoids series truncation entirely.

const GAMMA_EPS: f64 = 1e-16;
const GAMMA_ITMAX: usize = 500;
const BIG: f64 = 1e300;
const BIG_INV: f64 = 1e-300;

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse standard normal CDF.
///
/// Acklam's rational approximation polished with one Halley step against
/// `erfc`, giving close to full double precision over (0, 1).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "normal_quantile needs p in (0,1)");

    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let mut x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    // One Halley refinement.
    let e = normal_cdf(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    x -= u / (1.0 + 0.5 * x * u);
    x
}

/// Regularized lower incomplete gamma function P(a, x).
pub fn gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0, "gamma_p needs a > 0");
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma function Q(a, x) = 1 - P(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0, "gamma_q needs a > 0");
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let ax = a * x.ln() - x - libm::lgamma(a);
    if ax < -700.0 {
        return if x < a { 0.0 } else { 1.0 };
    }
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..GAMMA_ITMAX {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    (sum * ax.exp()).min(1.0)
}

// Lentz continued fraction for Q(a, x), valid for x >= a + 1.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let ax = a * x.ln() - x - libm::lgamma(a);
    if ax < -700.0 {
        return 0.0;
    }
    let mut b = x + 1.0 - a;
    let mut c = BIG;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_ITMAX {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < BIG_INV {
            d = BIG_INV;
        }
        c = b + an / c;
        if c.abs() < BIG_INV {
            c = BIG_INV;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    (ax.exp() * h).min(1.0)
}

/// CDF of a central chi-square with `df` degrees of freedom.
pub fn chi2_cdf(df: f64, x: f64) -> f64 {
    assert!(df > 0.0);
    if x <= 0.0 {
        0.0
    } else {
        gamma_p(0.5 * df, 0.5 * x)
    }
}

/// Survival function of a central chi-square with `df` degrees of freedom.
pub fn chi2_sf(df: f64, x: f64) -> f64 {
    assert!(df > 0.0);
    if x <= 0.0 {
        1.0
    } else {
        gamma_q(0.5 * df, 0.5 * x)
    }
}

fn chi2_pdf(df: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let h = 0.5 * df;
    ((h - 1.0) * x.ln() - 0.5 * x - h * std::f64::consts::LN_2 - libm::lgamma(h)).exp()
}

/// Quantile of a central chi-square: smallest x with CDF(x) = p.
///
/// Wilson-Hilferty start, then safeguarded Newton on the regularized gamma.
pub fn chi2_quantile(df: f64, p: f64) -> f64 {
    assert!(df > 0.0);
    assert!(p > 0.0 && p < 1.0, "chi2_quantile needs p in (0,1)");

    let z = normal_quantile(p);
    let t = 1.0 - 2.0 / (9.0 * df) + z * (2.0 / (9.0 * df)).sqrt();
    let mut x = (df * t * t * t).max(1e-12);

    let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);
    for _ in 0..100 {
        let f = chi2_cdf(df, x) - p;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let d = chi2_pdf(df, x);
        let mut next = if d > 0.0 { x - f / d } else { x };
        if !(next > lo && (next < hi || hi.is_infinite())) {
            next = if hi.is_infinite() { 2.0 * x.max(1.0) } else { 0.5 * (lo + hi) };
        }
        if (next - x).abs() <= 1e-14 * x.abs().max(1.0) {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// CDF of a noncentral chi-square with one degree of freedom and
/// noncentrality `delta`.
pub fn chi1_noncentral_cdf(delta: f64, x: f64) -> f64 {
    assert!(delta >= 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    let s = x.sqrt();
    let m = delta.sqrt();
    normal_cdf(s - m) - normal_cdf(-s - m)
}

/// Survival function of a noncentral chi-square with one degree of freedom.
pub fn chi1_noncentral_sf(delta: f64, x: f64) -> f64 {
    assert!(delta >= 0.0);
    if x <= 0.0 {
        return 1.0;
    }
    let s = x.sqrt();
    let m = delta.sqrt();
    normal_sf(s - m) + normal_cdf(-s - m)
}

/// Quantile of a noncentral chi-square with one degree of freedom.
pub fn chi1_noncentral_quantile(delta: f64, p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    if delta == 0.0 {
        return chi2_quantile(1.0, p);
    }
    let mut lo = 0.0_f64;
    let mut hi = (delta.sqrt() + 10.0).powi(2);
    while chi1_noncentral_cdf(delta, hi) < p {
        hi *= 2.0;
        assert!(hi.is_finite(), "noncentral quantile bracket diverged");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi1_noncentral_cdf(delta, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}
