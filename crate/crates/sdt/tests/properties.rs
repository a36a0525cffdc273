//! Property-style invariants over randomized inputs.

use proptest::prelude::*;
use sdt::{ChiSqMixture, HypothesisSpec, NormalKnownVar, SParams};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // S-divergence between model members is nonnegative and vanishes only
    // at equal parameters.
    #[test]
    fn s_divergence_nonnegative(
        t1 in -3.0f64..3.0,
        t2 in -3.0f64..3.0,
        gamma in 0.0f64..=1.0,
        lambda in -3.0f64..3.0,
    ) {
        let model = NormalKnownVar::new(1.0);
        let params = SParams::new(gamma, lambda).unwrap();
        let v = sdt::s_divergence_model(&model, &[t1], &[t2], &params, 1e-9).unwrap();
        prop_assert!(v >= -1e-9);
        if (t1 - t2).abs() > 1e-3 {
            prop_assert!(v > 0.0);
        }
    }

    // Mixture CDF is monotone, bounded, and complements its survival.
    #[test]
    fn mixture_cdf_monotone_bounded(
        z1 in 0.2f64..3.0,
        z2 in 0.2f64..3.0,
        z3 in 0.2f64..3.0,
        d1 in 0.0f64..5.0,
        d2 in 0.0f64..5.0,
        x1 in 0.0f64..40.0,
        x2 in 0.0f64..40.0,
    ) {
        let mix = ChiSqMixture::new(vec![z1, z2, z3], vec![d1, d2, 0.0]).unwrap();
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        let c_lo = sdt::cdf(&mix, lo, 1e-10).unwrap();
        let c_hi = sdt::cdf(&mix, hi, 1e-10).unwrap();
        prop_assert!((0.0..=1.0).contains(&c_lo) && (0.0..=1.0).contains(&c_hi));
        prop_assert!(c_lo <= c_hi + 1e-10);
        let s_hi = sdt::survival(&mix, hi, 1e-10).unwrap();
        prop_assert!((c_hi + s_hi - 1.0).abs() < 1e-9);
    }

    // Scaling covariance: weights c*zeta at c*x give the same CDF.
    #[test]
    fn mixture_scaling_covariance(
        z1 in 0.2f64..3.0,
        z2 in 0.2f64..3.0,
        d in 0.0f64..6.0,
        c in 0.1f64..20.0,
        x in 0.01f64..30.0,
    ) {
        let mix = ChiSqMixture::new(vec![z1, z2], vec![d, 0.0]).unwrap();
        let scaled = ChiSqMixture::new(vec![c * z1, c * z2], vec![d, 0.0]).unwrap();
        let a = sdt::cdf(&mix, x, 1e-11).unwrap();
        let b = sdt::cdf(&scaled, c * x, 1e-11).unwrap();
        prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    // Quantile round trip at moderate probabilities.
    #[test]
    fn mixture_quantile_round_trip(
        z1 in 0.3f64..2.0,
        z2 in 0.3f64..2.0,
        d in 0.0f64..4.0,
        q in 0.05f64..0.95,
    ) {
        let mix = ChiSqMixture::new(vec![z1, z2], vec![0.0, d]).unwrap();
        let x = sdt::quantile(&mix, q, 1e-8).unwrap();
        let c = sdt::cdf(&mix, x, 1e-11).unwrap();
        prop_assert!((c - q).abs() < 1e-6, "q={q}: cdf(quantile)={c}");
    }
}

// statistic / p-value / reject stay mutually consistent over randomized runs.
#[test]
fn outcome_consistency_over_randomized_runs() {
    let model = NormalKnownVar::new(1.0);
    for rep in 0..100u64 {
        let mut rng = sdt::replication_rng(0xC0FFEE, rep);
        let dist = sdt::MixtureDistribution::pure(((rep % 5) as f64) * 0.15, 1.0);
        let sample = sdt::sample_mixture(&dist, 25 + (rep as usize % 40), &mut rng);
        let gamma = (rep % 6) as f64 / 5.0;
        let lambda = ((rep % 7) as f64 - 3.0) / 2.0;
        let beta = (rep % 4) as f64 / 3.0;
        let params = SParams::new(gamma, lambda).unwrap();
        let spec = HypothesisSpec::new(vec![0.0], 0.05).unwrap();
        let out = sdt::run_test(&sample, &model, &spec, &params, beta).unwrap();
        assert_eq!(out.reject, out.statistic > out.critical_value, "rep {rep}");
        assert_eq!(out.reject, out.p_value < out.alpha, "rep {rep}");
        assert!(out.statistic >= 0.0);
        assert!((0.0..=1.0).contains(&out.p_value));
    }
}

// The null mixture's level is exact: survival at the critical value is alpha.
#[test]
fn level_correctness_of_critical_values() {
    let model = NormalKnownVar::new(1.0);
    for &(gamma, beta) in &[(0.0, 0.0), (0.3, 0.3), (0.5, 1.0), (1.0, 0.5)] {
        let mix = sdt::null_mixture(&model, &[0.0], gamma, beta).unwrap();
        for &alpha in &[0.01, 0.05, 0.2] {
            let crit = sdt::quantile(&mix, 1.0 - alpha, 1e-10).unwrap();
            let level = sdt::survival(&mix, crit, 1e-12).unwrap();
            assert!(
                (level - alpha).abs() < 1e-6,
                "gamma={gamma} beta={beta} alpha={alpha}: {level}"
            );
        }
    }
}
