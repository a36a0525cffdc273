//! Monte Carlo harness for empirical size and power under contaminated
//! normal data, plus the deterministic table generators.
//!
//! Reproducibility contract: every replication draws from its own
//! counter-derived ChaCha stream keyed by (seed, replication index), so
//! grids are bit-identical for a fixed seed regardless of the worker count
//! or whether the `parallel` feature is enabled. Replication results are
//! merged in index order.

use crate::chi2mix;
use crate::divergence::SParams;
use crate::error::{Result, SdtError};
use crate::estimation::fit_mdpde;
use crate::exec;
use crate::model::NormalKnownVar;
use crate::report;
use crate::robustness::inflation_ratio_reference;
use crate::testing::{self, statistic_from_theta};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Per-replication random stream: fixed key, stream = replication index.
pub fn replication_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Finite mixture of normal components; the data-generating law.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureDistribution {
    components: Vec<(f64, f64, f64)>, // (weight, mean, sd)
}

impl MixtureDistribution {
    pub fn new(components: Vec<(f64, f64, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(SdtError::InvalidParameter("mixture needs components".into()));
        }
        let total: f64 = components.iter().map(|c| c.0).sum();
        if components.iter().any(|c| c.0 < 0.0 || c.2 <= 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(SdtError::InvalidParameter(
                "mixture weights must be nonnegative and sum to one, sds positive".into(),
            ));
        }
        Ok(MixtureDistribution { components })
    }

    pub fn pure(mean: f64, sd: f64) -> Self {
        MixtureDistribution { components: vec![(1.0, mean, sd)] }
    }

    /// (1−ε) N(mean, sd²) + ε N(c_mean, c_sd²).
    pub fn contaminated(mean: f64, sd: f64, epsilon: f64, c_mean: f64, c_sd: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(SdtError::InvalidParameter(format!(
                "contamination proportion must lie in [0,1), got {epsilon}"
            )));
        }
        if epsilon == 0.0 {
            return Ok(Self::pure(mean, sd));
        }
        MixtureDistribution::new(vec![(1.0 - epsilon, mean, sd), (epsilon, c_mean, c_sd)])
    }

    pub fn mean(&self) -> f64 {
        self.components.iter().map(|(w, m, _)| w * m).sum()
    }
}

/// n i.i.d. draws: component chosen by weight, then a normal draw.
pub fn sample_mixture<R: Rng>(dist: &MixtureDistribution, n: usize, rng: &mut R) -> Vec<f64> {
    let normals: Vec<(f64, Normal<f64>)> = dist
        .components
        .iter()
        .map(|&(w, m, s)| (w, Normal::new(m, s).unwrap()))
        .collect();
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (w, d) in &normals {
                acc += w;
                if u < acc {
                    return d.sample(rng);
                }
            }
            normals.last().unwrap().1.sample(rng)
        })
        .collect()
}

/// What the data mean is doing relative to the null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alternative {
    Null,
    /// θ_n = θ0 + Δ/√n.
    Contiguous { delta: f64 },
    /// Fixed mean θ1.
    Fixed { theta1: f64 },
}

/// Contaminating normal component at fixed proportion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contaminant {
    pub epsilon: f64,
    pub mean: f64,
    pub sd: f64,
}

/// One simulation campaign over a (γ=β, λ) grid.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub alpha: f64,
    pub theta0: f64,
    pub sigma: f64,
    pub gamma_beta: Vec<f64>,
    pub lambda: Vec<f64>,
    pub alternative: Alternative,
    pub contaminant: Option<Contaminant>,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 || self.n == 0 {
            return Err(SdtError::InvalidParameter("need n >= 1 and reps >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(SdtError::InvalidParameter("alpha must lie in (0,1)".into()));
        }
        if self.gamma_beta.is_empty() || self.lambda.is_empty() {
            return Err(SdtError::InvalidParameter("empty tuning grid".into()));
        }
        Ok(())
    }

    /// Data-generating mixture implied by the alternative and contaminant.
    pub fn data_distribution(&self) -> Result<MixtureDistribution> {
        let mean = match self.alternative {
            Alternative::Null => self.theta0,
            Alternative::Contiguous { delta } => self.theta0 + delta / (self.n as f64).sqrt(),
            Alternative::Fixed { theta1 } => theta1,
        };
        match self.contaminant {
            None => Ok(MixtureDistribution::pure(mean, self.sigma)),
            Some(c) => MixtureDistribution::contaminated(mean, self.sigma, c.epsilon, c.mean, c.sd),
        }
    }
}

/// Rejection-rate grid with binomial standard errors.
#[derive(Debug, Clone)]
pub struct SimGrid {
    pub gamma_beta: Vec<f64>,
    pub lambda: Vec<f64>,
    /// rates[i][j]: rejection rate at gamma_beta[i], lambda[j].
    pub rates: Vec<Vec<f64>>,
    pub std_errors: Vec<Vec<f64>>,
    pub reps: usize,
    pub failures: usize,
}

/// Empirical size: rejection rates with the data mean at the null.
pub fn empirical_size(config: &SimulationConfig) -> Result<SimGrid> {
    if config.alternative != Alternative::Null {
        return Err(SdtError::InvalidParameter(
            "empirical_size needs the null alternative".into(),
        ));
    }
    run_grid(config)
}

/// Empirical power under a contiguous or fixed alternative.
pub fn empirical_power(config: &SimulationConfig) -> Result<SimGrid> {
    if config.alternative == Alternative::Null {
        return Err(SdtError::InvalidParameter(
            "empirical_power needs a non-null alternative".into(),
        ));
    }
    run_grid(config)
}

fn run_grid(config: &SimulationConfig) -> Result<SimGrid> {
    config.validate()?;
    let model = NormalKnownVar::new(config.sigma);
    let theta0 = [config.theta0];
    let dist = config.data_distribution()?;
    let n_gb = config.gamma_beta.len();
    let n_l = config.lambda.len();

    // Asymptotic critical values, one per gamma = beta.
    let mut crits = Vec::with_capacity(n_gb);
    let mut param_grid = Vec::with_capacity(n_gb);
    for &gb in &config.gamma_beta {
        let mixture = testing::null_mixture(&model, &theta0, gb, gb)?;
        crits.push(chi2mix::quantile(&mixture, 1.0 - config.alpha, testing::SERIES_TOL)?);
        let row: Result<Vec<SParams>> =
            config.lambda.iter().map(|&l| SParams::new(gb, l)).collect();
        param_grid.push(row?);
    }

    // One work item per replication; all randomness keyed by the index.
    struct RepOutcome {
        rejects: Vec<Vec<bool>>, // [gb][lambda]
        failed: Vec<bool>,       // [gb]
    }
    let outcomes: Vec<RepOutcome> = exec::map_indexed(config.reps, |rep| {
        let mut rng = replication_rng(config.seed, rep as u64);
        let sample = sample_mixture(&dist, config.n, &mut rng);
        let mut rejects = vec![vec![false; n_l]; n_gb];
        let mut failed = vec![false; n_gb];
        for (i, &gb) in config.gamma_beta.iter().enumerate() {
            match fit_with_retry(&sample, &model, gb) {
                Some(theta_hat) => {
                    for (j, params) in param_grid[i].iter().enumerate() {
                        let stat =
                            statistic_from_theta(&model, &theta_hat, &theta0, params, config.n)
                                .unwrap_or(f64::NAN);
                        rejects[i][j] = stat > crits[i];
                    }
                }
                None => failed[i] = true,
            }
        }
        RepOutcome { rejects, failed }
    });

    let mut reject_counts = vec![vec![0usize; n_l]; n_gb];
    let mut success_counts = vec![0usize; n_gb];
    let mut failures = 0usize;
    for o in &outcomes {
        for i in 0..n_gb {
            if o.failed[i] {
                failures += 1;
                continue;
            }
            success_counts[i] += 1;
            for j in 0..n_l {
                if o.rejects[i][j] {
                    reject_counts[i][j] += 1;
                }
            }
        }
    }
    // Failed replications are excluded from the rates only while they stay
    // below 1% of the replication count.
    for (i, &ok) in success_counts.iter().enumerate() {
        let failed = config.reps - ok;
        if failed > 0 && failed * 100 >= config.reps {
            return Err(SdtError::EstimationFailure(format!(
                "{failed} of {} replications failed to fit at gamma=beta={}",
                config.reps, config.gamma_beta[i]
            )));
        }
    }

    let mut rates = vec![vec![0.0; n_l]; n_gb];
    let mut std_errors = vec![vec![0.0; n_l]; n_gb];
    for i in 0..n_gb {
        let m = success_counts[i] as f64;
        for j in 0..n_l {
            let p = reject_counts[i][j] as f64 / m;
            rates[i][j] = p;
            std_errors[i][j] = (p * (1.0 - p) / m).sqrt();
        }
    }
    Ok(SimGrid {
        gamma_beta: config.gamma_beta.clone(),
        lambda: config.lambda.clone(),
        rates,
        std_errors,
        reps: config.reps,
        failures,
    })
}

// Fit, retrying once from a coarse grid scan of the objective before
// declaring the replication failed.
fn fit_with_retry(sample: &[f64], model: &NormalKnownVar, beta: f64) -> Option<Vec<f64>> {
    if let Ok(fit) = fit_mdpde(sample, model, beta, None, testing::INT_TOL) {
        if fit.converged {
            return Some(fit.theta_hat);
        }
    }
    let lo = sample.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut best = (f64::INFINITY, 0.5 * (lo + hi));
    for k in 0..=40 {
        let t = lo + (hi - lo) * k as f64 / 40.0;
        if let Ok(v) = crate::divergence::mdpde_objective(sample, model, &[t], beta, testing::INT_TOL)
        {
            if v < best.0 {
                best = (v, t);
            }
        }
    }
    match fit_mdpde(sample, model, beta, Some(&[best.1]), testing::INT_TOL) {
        Ok(fit) if fit.converged => Some(fit.theta_hat),
        _ => None,
    }
}

/// Which artifact [`table_generator`] emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    /// Asymptotic power against the contiguous alternative Δ = √10 over
    /// γ = β; deterministic.
    ContiguousPower,
    /// Empirical sizes at n = 50 over (γ=β, λ) and contamination levels
    /// 0, 5%, 10% with contaminant N(1, 1); stochastic, seeded.
    EmpiricalSize,
    /// Inflation-factor ratios c(g_ε)/c(f) at y = 4 over (σ, ε, β);
    /// deterministic.
    InflationRatios,
}

/// A flat numeric table with named columns, CSV/JSON-serializable.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String> {
        report::to_csv(&self.columns, &self.rows)
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Result<Vec<report::Json>> = self
            .rows
            .iter()
            .map(|row| {
                Ok(report::Json::Obj(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, &v)| (c.clone(), report::Json::Num(v)))
                        .collect(),
                ))
            })
            .collect();
        report::Json::Obj(vec![
            ("table".into(), report::Json::Str(self.name.clone())),
            ("rows".into(), report::Json::Arr(rows?)),
        ])
        .render()
    }
}

/// Standard tuning grid for the size table.
pub const SIZE_TABLE_GAMMA_BETA: [f64; 5] = [0.0, 0.1, 0.3, 0.5, 1.0];
pub const SIZE_TABLE_LAMBDA: [f64; 7] = [-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0];
pub const SIZE_TABLE_EPSILON: [f64; 3] = [0.0, 0.05, 0.10];

/// Emit one of the reference tables at its canonical parameter grid.
pub fn table_generator(kind: TableKind, seed: u64, reps: usize) -> Result<Table> {
    match kind {
        TableKind::ContiguousPower => {
            let model = NormalKnownVar::new(1.0);
            let delta = 10.0_f64.sqrt();
            let mut rows = Vec::new();
            for &gb in &[0.0, 0.1, 0.3, 0.5, 0.7, 1.0] {
                let p = testing::contiguous_power(&model, &[0.0], &[delta], gb, gb, 0.05)?;
                rows.push(vec![gb, p]);
            }
            Ok(Table {
                name: "contiguous_power".into(),
                columns: vec!["gamma_beta".into(), "power".into()],
                rows,
            })
        }
        TableKind::EmpiricalSize => {
            let mut rows = Vec::new();
            for &eps in &SIZE_TABLE_EPSILON {
                let config = SimulationConfig {
                    n: 50,
                    reps,
                    seed,
                    alpha: 0.05,
                    theta0: 0.0,
                    sigma: 1.0,
                    gamma_beta: SIZE_TABLE_GAMMA_BETA.to_vec(),
                    lambda: SIZE_TABLE_LAMBDA.to_vec(),
                    alternative: Alternative::Null,
                    contaminant: if eps == 0.0 {
                        None
                    } else {
                        Some(Contaminant { epsilon: eps, mean: 1.0, sd: 1.0 })
                    },
                };
                let grid = empirical_size(&config)?;
                for (i, &gb) in grid.gamma_beta.iter().enumerate() {
                    for (j, &l) in grid.lambda.iter().enumerate() {
                        rows.push(vec![gb, eps, l, grid.rates[i][j], grid.std_errors[i][j]]);
                    }
                }
            }
            Ok(Table {
                name: "empirical_size".into(),
                columns: vec![
                    "gamma_beta".into(),
                    "epsilon".into(),
                    "lambda".into(),
                    "size".into(),
                    "std_error".into(),
                ],
                rows,
            })
        }
        TableKind::InflationRatios => {
            let mut rows = Vec::new();
            for &sigma in &[0.5, 1.0, 2.0] {
                for &eps in &[0.0005, 0.001, 0.005, 0.01, 0.02, 0.05, 0.1] {
                    for &beta in &[0.0, 0.1, 0.3, 0.5, 0.7, 1.0] {
                        let ratio = inflation_ratio_reference(sigma, 0.0, 4.0, eps, beta);
                        rows.push(vec![sigma, eps, beta, ratio]);
                    }
                }
            }
            Ok(Table {
                name: "inflation_ratios".into(),
                columns: vec!["sigma".into(), "epsilon".into(), "beta".into(), "ratio".into()],
                rows,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixture_sampling_moments() {
        let mut rng = replication_rng(7, 0);
        let single = MixtureDistribution::pure(0.0, 1.0);
        let n = 100_000;
        let xs = sample_mixture(&single, n, &mut rng);
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "{mean}");

        let shifted = MixtureDistribution::contaminated(0.0, 1.0, 0.1, 10.0, 1.0).unwrap();
        assert!((shifted.mean() - 1.0).abs() < 1e-12);
        let xs = sample_mixture(&shifted, n, &mut rng);
        let mean = xs.iter().sum::<f64>() / n as f64;
        // Mixture sd is sqrt(1 + 0.1*0.9*100) ≈ 3.2.
        assert!((mean - 1.0).abs() < 4.0 * 3.2 / (n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn sampling_is_deterministic_per_stream() {
        let dist = MixtureDistribution::contaminated(0.0, 1.0, 0.2, -2.0, 1.0).unwrap();
        let a = sample_mixture(&dist, 64, &mut replication_rng(99, 5));
        let b = sample_mixture(&dist, 64, &mut replication_rng(99, 5));
        assert_eq!(a, b);
        let c = sample_mixture(&dist, 64, &mut replication_rng(99, 6));
        assert_ne!(a, c);
    }

    #[test]
    fn grids_reproduce_for_fixed_seed() {
        let config = SimulationConfig {
            n: 20,
            reps: 60,
            seed: 1234,
            alpha: 0.05,
            theta0: 0.0,
            sigma: 1.0,
            gamma_beta: vec![0.0, 0.5],
            lambda: vec![-1.0, 0.0, 1.0],
            alternative: Alternative::Null,
            contaminant: None,
        };
        let a = empirical_size(&config).unwrap();
        let b = empirical_size(&config).unwrap();
        assert_eq!(a.rates, b.rates);
        assert_eq!(a.failures, 0);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn grids_independent_of_worker_count() {
        let config = SimulationConfig {
            n: 25,
            reps: 80,
            seed: 4321,
            alpha: 0.05,
            theta0: 0.0,
            sigma: 1.0,
            gamma_beta: vec![0.3, 1.0],
            lambda: vec![-0.5, 0.0],
            alternative: Alternative::Null,
            contaminant: Some(Contaminant { epsilon: 0.1, mean: 1.0, sd: 1.0 }),
        };
        let mut grids = Vec::new();
        for threads in [1usize, 2, 5] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let grid = pool.install(|| empirical_size(&config)).unwrap();
            grids.push(grid);
        }
        assert_eq!(grids[0].rates, grids[1].rates);
        assert_eq!(grids[1].rates, grids[2].rates);
        assert_eq!(grids[0].std_errors, grids[2].std_errors);
    }

    #[test]
    fn sizes_track_asymptotic_level_at_n300() {
        // Clean data at n = 300: every grid cell within 3 binomial SEs of 5%.
        let config = SimulationConfig {
            n: 300,
            reps: 1000,
            seed: 31415,
            alpha: 0.05,
            theta0: 0.0,
            sigma: 1.0,
            gamma_beta: vec![0.0, 0.3, 1.0],
            lambda: vec![-1.0, 0.0, 1.0],
            alternative: Alternative::Null,
            contaminant: None,
        };
        let grid = empirical_size(&config).unwrap();
        let band = 3.0 * (0.05_f64 * 0.95 / 1000.0).sqrt();
        for (i, &gb) in grid.gamma_beta.iter().enumerate() {
            for (j, &l) in grid.lambda.iter().enumerate() {
                let p = grid.rates[i][j];
                assert!(
                    (p - 0.05).abs() <= band + 1e-12,
                    "gb={gb} lambda={l}: size {p} outside 0.05 ± {band:.4}"
                );
            }
        }
    }

    #[test]
    fn one_rep_smoke_returns_zero_or_one() {
        let config = SimulationConfig {
            n: 10,
            reps: 1,
            seed: 3,
            alpha: 0.05,
            theta0: 0.0,
            sigma: 1.0,
            gamma_beta: vec![0.3],
            lambda: vec![0.0],
            alternative: Alternative::Fixed { theta1: 0.5 },
            contaminant: None,
        };
        let grid = empirical_power(&config).unwrap();
        let r = grid.rates[0][0];
        assert!(r == 0.0 || r == 1.0);
    }

    #[test]
    fn extreme_level_rejects_almost_always() {
        let config = SimulationConfig {
            n: 30,
            reps: 100,
            seed: 11,
            alpha: 0.999,
            theta0: 0.0,
            sigma: 1.0,
            gamma_beta: vec![0.3],
            lambda: vec![0.0],
            alternative: Alternative::Null,
            contaminant: None,
        };
        let grid = empirical_size(&config).unwrap();
        assert!(grid.rates[0][0] > 0.95, "{}", grid.rates[0][0]);
    }

    #[test]
    fn deterministic_tables_are_pure() {
        let a = table_generator(TableKind::ContiguousPower, 0, 1).unwrap();
        let b = table_generator(TableKind::ContiguousPower, 0, 1).unwrap();
        assert_eq!(a, b);
        let a = table_generator(TableKind::InflationRatios, 0, 1).unwrap();
        let b = table_generator(TableKind::InflationRatios, 0, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 126);
    }

    #[test]
    fn size_grid_matches_alpha_for_plain_lrt() {
        // gamma = beta = lambda = 0 with clean data at n = 300: the size
        // must sit within Monte Carlo error of 5%.
        let config = SimulationConfig {
            n: 300,
            reps: 400,
            seed: 2024,
            alpha: 0.05,
            theta0: 0.0,
            sigma: 1.0,
            gamma_beta: vec![0.0],
            lambda: vec![0.0],
            alternative: Alternative::Null,
            contaminant: None,
        };
        let grid = empirical_size(&config).unwrap();
        let p = grid.rates[0][0];
        assert!((p - 0.05).abs() < 3.0 * (0.05 * 0.95 / 400.0_f64).sqrt() + 1e-9, "{p}");
    }
}
