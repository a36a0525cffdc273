//! `sdt` — divergence-based testing of a normal mean with known variance.
//!
//! Subcommands: `test` (run the test on a data file), `power` (power
//! approximation and sample-size planning), `robust` (influence and
//! inflation diagnostics on a contamination grid), `mixture-cdf` (weighted
//! chi-square mixture evaluation), `simulate` (Monte Carlo size/power) and
//! `tables` (reference table regeneration).
//!
//! Exit codes follow sysexits conventions: 64 usage, 65 bad data, 70
//! internal numeric failure; `--exit-on-reject` maps a rejection to 2.
//! Output is a pure function of flags, input file, and seed.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use sdt::report::Json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EX_USAGE: u8 = 64;
const EX_DATA: u8 = 65;
const EX_SOFTWARE: u8 = 70;

#[derive(Parser)]
#[command(name = "sdt", version, about = "S-divergence tests of simple hypotheses for the normal mean")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

// Recommended defaults: gamma = beta = 0.3, lambda = 0, alpha = 0.05.
#[derive(Args, Clone)]
struct TuningArgs {
    /// Divergence parameter gamma in [0, 1]
    #[arg(long, default_value_t = 0.3)]
    gamma: f64,
    /// Divergence parameter lambda
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda: f64,
    /// Estimation tuning parameter beta >= 0
    #[arg(long, default_value_t = 0.3)]
    beta: f64,
    /// Significance level in (0, 1)
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Null mean theta0
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta0: f64,
    /// Known standard deviation sigma > 0
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Diagnostic {
    If2,
    Pif,
    Lif,
    Inflation,
    Slope,
    /// Reference normal closed form of IF2 (see library docs)
    If2Reference,
    /// Reference normal closed form of the inflation slope
    SlopeReference,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimMode {
    Size,
    Power,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WhichTable {
    ContiguousPower,
    EmpiricalSize,
    InflationRatios,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Test H0: theta = theta0 on a single-column CSV of observations
    Test {
        /// Data file; header auto-detected from a non-numeric first row
        data: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        /// Exit with code 2 when the null is rejected
        #[arg(long)]
        exit_on_reject: bool,
        /// Output format
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
        /// Write output here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Power approximation at a fixed alternative, or minimum n for a target power
    Power {
        /// Alternative mean theta*
        #[arg(long, allow_negative_numbers = true)]
        theta_star: f64,
        /// Sample size for a power evaluation
        #[arg(long)]
        n: Option<u64>,
        /// Target power for sample-size planning
        #[arg(long)]
        target_power: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Robustness diagnostic on a grid of contamination points y
    Robust {
        #[arg(long, value_enum)]
        diagnostic: Diagnostic,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        /// Contiguous drift for the power influence function
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        delta: f64,
        /// Contamination proportion for the inflation factor ratio
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
        y_min: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        y_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CDF / survival / quantile of a weighted chi-square mixture
    MixtureCdf {
        /// Comma-separated positive weights
        #[arg(long)]
        zeta: String,
        /// Comma-separated noncentralities (defaults to all zero)
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<String>,
        /// Evaluation point for CDF and survival
        #[arg(long)]
        x: Option<f64>,
        /// Probability for a quantile lookup
        #[arg(long)]
        quantile: Option<f64>,
        /// Truncation tolerance of the series
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo empirical size or power over a tuning grid
    Simulate {
        #[arg(long, value_enum)]
        mode: SimMode,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        /// RNG seed; the SDT_SEED environment variable overrides this
        #[arg(long, default_value_t = 20240808)]
        seed: u64,
        #[command(flatten)]
        model: ModelArgs,
        /// Significance level
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Comma-separated gamma = beta grid
        #[arg(long, default_value = "0,0.1,0.3,0.5,1", allow_hyphen_values = true)]
        gamma_beta: String,
        /// Comma-separated lambda grid
        #[arg(long, default_value = "-3,-1,-0.5,0,0.5,1,3", allow_hyphen_values = true)]
        lambda: String,
        /// Contiguous drift Delta (power mode): mean theta0 + Delta/sqrt(n)
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        /// Fixed alternative mean (power mode)
        #[arg(long, allow_negative_numbers = true)]
        theta1: Option<f64>,
        /// Contamination proportion of the data-generating mixture
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        /// Contaminating component mean
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        cont_mean: f64,
        /// Contaminating component standard deviation
        #[arg(long, default_value_t = 1.0)]
        cont_sd: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        output: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the reference tables as CSV + JSON files
    Tables {
        #[arg(long, value_enum, default_value_t = WhichTable::All)]
        which: WhichTable,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// RNG seed for the stochastic table; SDT_SEED overrides
        #[arg(long, default_value_t = 20240808)]
        seed: u64,
        /// Replications for the stochastic table
        #[arg(long, default_value_t = 1000)]
        reps: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EX_USAGE);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sdt: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

fn usage_err(msg: impl Into<String>) -> CliError {
    CliError { code: EX_USAGE, message: msg.into() }
}

fn data_err(msg: impl Into<String>) -> CliError {
    CliError { code: EX_DATA, message: msg.into() }
}

fn internal(e: sdt::SdtError) -> CliError {
    CliError { code: EX_SOFTWARE, message: e.to_string() }
}

fn validate_model(m: &ModelArgs) -> Result<(), CliError> {
    if !(m.sigma > 0.0) || !m.sigma.is_finite() {
        return Err(usage_err(format!("--sigma must be positive, got {}", m.sigma)));
    }
    if !m.theta0.is_finite() {
        return Err(usage_err("--theta0 must be finite"));
    }
    Ok(())
}

fn validate_tuning(t: &TuningArgs) -> Result<sdt::SParams, CliError> {
    if !(0.0..=1.0).contains(&t.gamma) {
        return Err(usage_err(format!("--gamma must lie in [0,1], got {}", t.gamma)));
    }
    if t.beta < 0.0 || !t.beta.is_finite() {
        return Err(usage_err(format!("--beta must be >= 0, got {}", t.beta)));
    }
    if !(t.alpha > 0.0 && t.alpha < 1.0) {
        return Err(usage_err(format!("--alpha must lie in (0,1), got {}", t.alpha)));
    }
    sdt::SParams::new(t.gamma, t.lambda).map_err(|e| usage_err(e.to_string()))
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), CliError> {
    match out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| CliError { code: EX_SOFTWARE, message: format!("cannot write {}: {e}", path.display()) }),
    }
}

fn read_observations(path: &Path) -> Result<Vec<f64>, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| usage_err(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let field = line.trim().trim_matches('"');
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            _ if idx == 0 => continue, // header row
            _ => {
                return Err(data_err(format!(
                    "{}:{}: not a numeric observation: {field:?}",
                    path.display(),
                    idx + 1
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(data_err(format!("{}: no observations", path.display())));
    }
    Ok(values)
}

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let vals: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match vals {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(usage_err(format!("cannot parse {what} list {s:?}"))),
    }
}

fn seed_from_env(cli_seed: u64) -> Result<u64, CliError> {
    match std::env::var("SDT_SEED") {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map_err(|_| usage_err(format!("SDT_SEED must be a 64-bit integer, got {s:?}"))),
        Err(_) => Ok(cli_seed),
    }
}

fn outcome_json(out: &sdt::TestOutcome, model: &ModelArgs) -> Json {
    Json::Obj(vec![
        ("statistic".into(), Json::Num(out.statistic)),
        ("critical_value".into(), Json::Num(out.critical_value)),
        ("p_value".into(), Json::Num(out.p_value)),
        ("reject".into(), Json::Bool(out.reject)),
        ("theta_hat".into(), Json::Num(out.theta_hat[0])),
        ("n".into(), Json::Int(out.n as i64)),
        (
            "params".into(),
            Json::Obj(vec![
                ("gamma".into(), Json::Num(out.gamma)),
                ("lambda".into(), Json::Num(out.lambda)),
                ("beta".into(), Json::Num(out.beta)),
                ("alpha".into(), Json::Num(out.alpha)),
                ("theta0".into(), Json::Num(model.theta0)),
                ("sigma".into(), Json::Num(model.sigma)),
            ]),
        ),
    ])
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Test { data, model, tuning, exit_on_reject, output, out } => {
            validate_model(&model)?;
            let params = validate_tuning(&tuning)?;
            let sample = read_observations(&data)?;
            let m = sdt::NormalKnownVar::new(model.sigma);
            let spec = sdt::HypothesisSpec::new(vec![model.theta0], tuning.alpha)
                .map_err(|e| usage_err(e.to_string()))?;
            let outcome = sdt::run_test(&sample, &m, &spec, &params, tuning.beta).map_err(internal)?;
            let text = match output {
                OutputFormat::Json => outcome_json(&outcome, &model).render().map_err(internal)?,
                OutputFormat::Csv => {
                    let cols: Vec<String> = ["statistic", "critical_value", "p_value", "reject", "theta_hat", "n"]
                        .iter()
                        .map(|s| s.to_string())
                        .collect();
                    let row = vec![
                        outcome.statistic,
                        outcome.critical_value,
                        outcome.p_value,
                        if outcome.reject { 1.0 } else { 0.0 },
                        outcome.theta_hat[0],
                        outcome.n as f64,
                    ];
                    sdt::report::to_csv(&cols, &[row]).map_err(internal)?
                }
            };
            emit(text.trim_end(), &out)?;
            if exit_on_reject && outcome.reject {
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Power { theta_star, n, target_power, model, tuning, out } => {
            validate_model(&model)?;
            let params = validate_tuning(&tuning)?;
            let m = sdt::NormalKnownVar::new(model.sigma);
            let spec = sdt::HypothesisSpec::new(vec![model.theta0], tuning.alpha)
                .map_err(|e| usage_err(e.to_string()))?;
            let mut pairs: Vec<(String, Json)> = vec![
                ("theta_star".into(), Json::Num(theta_star)),
                ("theta0".into(), Json::Num(model.theta0)),
                ("gamma".into(), Json::Num(tuning.gamma)),
                ("lambda".into(), Json::Num(tuning.lambda)),
                ("beta".into(), Json::Num(tuning.beta)),
                ("alpha".into(), Json::Num(tuning.alpha)),
            ];
            match (n, target_power) {
                (Some(n), None) => {
                    let p = sdt::power_approx(&m, &[theta_star], &spec, &params, tuning.beta, n as usize)
                        .map_err(internal)?;
                    pairs.push(("n".into(), Json::Int(n as i64)));
                    pairs.push(("power".into(), Json::Num(p)));
                }
                (None, Some(target)) => {
                    if !(target > 0.0 && target < 1.0) {
                        return Err(usage_err("--target-power must lie in (0,1)"));
                    }
                    let n_min =
                        sdt::sample_size_for_power(&m, &[theta_star], &spec, &params, tuning.beta, target)
                            .map_err(internal)?;
                    let achieved =
                        sdt::power_approx(&m, &[theta_star], &spec, &params, tuning.beta, n_min as usize)
                            .map_err(internal)?;
                    pairs.push(("target_power".into(), Json::Num(target)));
                    pairs.push(("n_required".into(), Json::Int(n_min as i64)));
                    pairs.push(("power_at_n".into(), Json::Num(achieved)));
                }
                _ => return Err(usage_err("pass exactly one of --n or --target-power")),
            }
            emit(&Json::Obj(pairs).render().map_err(internal)?, &out)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Robust { diagnostic, model, tuning, delta, epsilon, y_min, y_max, points, out } => {
            validate_model(&model)?;
            validate_tuning(&tuning)?; // diagnostics are lambda-free but flags must be sane
            if points < 2 || !(y_max > y_min) {
                return Err(usage_err("need --points >= 2 and --y-max > --y-min"));
            }
            let m = sdt::NormalKnownVar::new(model.sigma);
            let theta0 = [model.theta0];
            let mut rows = Vec::with_capacity(points);
            for k in 0..points {
                let y = y_min + (y_max - y_min) * k as f64 / (points - 1) as f64;
                let value = match diagnostic {
                    Diagnostic::If2 => sdt::if2_test(y, &m, &theta0, tuning.gamma, tuning.beta),
                    Diagnostic::Pif => sdt::pif(
                        y, &m, &theta0, &[delta], tuning.gamma, tuning.beta, tuning.alpha, 1e-10,
                    ),
                    Diagnostic::Lif => {
                        sdt::lif(y, &m, &theta0, tuning.gamma, tuning.beta, tuning.alpha, 1e-10)
                    }
                    Diagnostic::Inflation => {
                        let g = sdt::ContaminatedDensity::new(epsilon, y)
                            .map_err(|e| usage_err(e.to_string()))?;
                        sdt::inflation_ratio(&m, &theta0, &g, tuning.gamma, tuning.beta)
                    }
                    Diagnostic::Slope => {
                        sdt::inflation_slope(y, &m, &theta0, tuning.gamma, tuning.beta)
                    }
                    Diagnostic::If2Reference => Ok(sdt::if2_normal_closed(
                        y,
                        model.sigma,
                        model.theta0,
                        tuning.gamma,
                        tuning.beta,
                    )),
                    Diagnostic::SlopeReference => Ok(sdt::inflation_slope_normal_closed(
                        y,
                        model.sigma,
                        model.theta0,
                        tuning.gamma,
                        tuning.beta,
                    )),
                }
                .map_err(internal)?;
                rows.push(vec![y, value]);
            }
            let csv = sdt::report::to_csv(&["y".into(), "value".into()], &rows).map_err(internal)?;
            emit(csv.trim_end(), &out)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::MixtureCdf { zeta, delta, x, quantile, tol, out } => {
            let zeta = parse_f64_list(&zeta, "--zeta")?;
            let delta = match delta {
                Some(d) => parse_f64_list(&d, "--delta")?,
                None => vec![0.0; zeta.len()],
            };
            if !(tol > 0.0) {
                return Err(usage_err("--tol must be positive"));
            }
            let mix = sdt::ChiSqMixture::new(zeta.clone(), delta.clone())
                .map_err(|e| usage_err(e.to_string()))?;
            let mut pairs: Vec<(String, Json)> = vec![
                ("zeta".into(), Json::Arr(zeta.iter().map(|&z| Json::Num(z)).collect())),
                ("delta".into(), Json::Arr(delta.iter().map(|&d| Json::Num(d)).collect())),
                ("rank".into(), Json::Int(mix.rank() as i64)),
            ];
            match (x, quantile) {
                (Some(x), None) => {
                    let c = sdt::cdf(&mix, x, tol).map_err(internal)?;
                    let s = sdt::survival(&mix, x, tol).map_err(internal)?;
                    pairs.push(("x".into(), Json::Num(x)));
                    pairs.push(("cdf".into(), Json::Num(c)));
                    pairs.push(("survival".into(), Json::Num(s)));
                }
                (None, Some(q)) => {
                    if !(q > 0.0 && q < 1.0) {
                        return Err(usage_err("--quantile must lie in (0,1)"));
                    }
                    let v = sdt::quantile(&mix, q, tol).map_err(internal)?;
                    pairs.push(("probability".into(), Json::Num(q)));
                    pairs.push(("quantile".into(), Json::Num(v)));
                }
                _ => return Err(usage_err("pass exactly one of --x or --quantile")),
            }
            emit(&Json::Obj(pairs).render().map_err(internal)?, &out)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Simulate {
            mode,
            n,
            reps,
            seed,
            model,
            alpha,
            gamma_beta,
            lambda,
            delta,
            theta1,
            epsilon,
            cont_mean,
            cont_sd,
            output,
            out,
        } => {
            validate_model(&model)?;
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(usage_err("--alpha must lie in (0,1)"));
            }
            let seed = seed_from_env(seed)?;
            let alternative = match (mode, delta, theta1) {
                (SimMode::Size, None, None) => sdt::Alternative::Null,
                (SimMode::Size, _, _) => {
                    return Err(usage_err("size mode takes neither --delta nor --theta1"))
                }
                (SimMode::Power, Some(d), None) => sdt::Alternative::Contiguous { delta: d },
                (SimMode::Power, None, Some(t)) => sdt::Alternative::Fixed { theta1: t },
                (SimMode::Power, _, _) => {
                    return Err(usage_err("power mode needs exactly one of --delta or --theta1"))
                }
            };
            let contaminant = if epsilon == 0.0 {
                None
            } else if (0.0..1.0).contains(&epsilon) && cont_sd > 0.0 {
                Some(sdt::Contaminant { epsilon, mean: cont_mean, sd: cont_sd })
            } else {
                return Err(usage_err("--epsilon must lie in [0,1) and --cont-sd must be positive"));
            };
            let config = sdt::SimulationConfig {
                n,
                reps,
                seed,
                alpha,
                theta0: model.theta0,
                sigma: model.sigma,
                gamma_beta: parse_f64_list(&gamma_beta, "--gamma-beta")?,
                lambda: parse_f64_list(&lambda, "--lambda")?,
                alternative,
                contaminant,
            };
            let grid = match mode {
                SimMode::Size => sdt::empirical_size(&config),
                SimMode::Power => sdt::empirical_power(&config),
            }
            .map_err(internal)?;

            let mut rows = Vec::new();
            for (i, &gb) in grid.gamma_beta.iter().enumerate() {
                for (j, &l) in grid.lambda.iter().enumerate() {
                    rows.push(vec![gb, l, grid.rates[i][j], grid.std_errors[i][j]]);
                }
            }
            let text = match output {
                OutputFormat::Csv => {
                    let cols: Vec<String> = ["gamma_beta", "lambda", "rate", "std_error"]
                        .iter()
                        .map(|s| s.to_string())
                        .collect();
                    sdt::report::to_csv(&cols, &rows).map_err(internal)?
                }
                OutputFormat::Json => {
                    let items: Vec<Json> = rows
                        .iter()
                        .map(|r| {
                            Json::Obj(vec![
                                ("gamma_beta".into(), Json::Num(r[0])),
                                ("lambda".into(), Json::Num(r[1])),
                                ("rate".into(), Json::Num(r[2])),
                                ("std_error".into(), Json::Num(r[3])),
                            ])
                        })
                        .collect();
                    Json::Obj(vec![
                        ("n".into(), Json::Int(n as i64)),
                        ("reps".into(), Json::Int(reps as i64)),
                        ("seed".into(), Json::Int(seed as i64)),
                        ("failures".into(), Json::Int(grid.failures as i64)),
                        ("cells".into(), Json::Arr(items)),
                    ])
                    .render()
                    .map_err(internal)?
                }
            };
            emit(text.trim_end(), &out)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Tables { which, out_dir, seed, reps } => {
            let seed = seed_from_env(seed)?;
            let kinds: Vec<sdt::TableKind> = match which {
                WhichTable::ContiguousPower => vec![sdt::TableKind::ContiguousPower],
                WhichTable::EmpiricalSize => vec![sdt::TableKind::EmpiricalSize],
                WhichTable::InflationRatios => vec![sdt::TableKind::InflationRatios],
                WhichTable::All => vec![
                    sdt::TableKind::ContiguousPower,
                    sdt::TableKind::EmpiricalSize,
                    sdt::TableKind::InflationRatios,
                ],
            };
            std::fs::create_dir_all(&out_dir).map_err(|e| CliError {
                code: EX_SOFTWARE,
                message: format!("cannot create {}: {e}", out_dir.display()),
            })?;
            for kind in kinds {
                let table = sdt::table_generator(kind, seed, reps).map_err(internal)?;
                let csv_path = out_dir.join(format!("{}.csv", table.name));
                let json_path = out_dir.join(format!("{}.json", table.name));
                std::fs::write(&csv_path, table.to_csv().map_err(internal)?).map_err(|e| {
                    CliError { code: EX_SOFTWARE, message: format!("cannot write {}: {e}", csv_path.display()) }
                })?;
                std::fs::write(&json_path, table.to_json().map_err(internal)?).map_err(|e| {
                    CliError { code: EX_SOFTWARE, message: format!("cannot write {}: {e}", json_path.display()) }
                })?;
                println!("{}", csv_path.display());
                println!("{}", json_path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
