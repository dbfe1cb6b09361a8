// SPDX-License-Identifier: MIT OR Apache-2.0

//! `cpi`: changepoint detection and selective inference on univariate series.

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpi_core::detect::{binseg, l0_lambda_for_k, l0_segment};
use cpi_core::infer::{bs_observed_interval, bs_s, l0_s, BsMode, L0Mode};
use cpi_core::pvalue::{estimate_sigma, naive_p, selective_p, Conditioning, Method};
use cpi_core::sim::{
    power_and_detection, simulate, timing_sweep, Approach, DetectorParams, SimConfig, TimingMode,
    TruncPolicy,
};
use cpi_core::{
    spanning_contrast, window_contrast, ChangepointFit, Contrast, Error as CoreError,
    IntervalUnion, TimeSeries,
};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cpi",
    version,
    about = "Changepoint detection and selective p-values for the Gaussian change-in-mean model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate changepoints in a series read from a CSV file.
    Detect(DetectArgs),
    /// Test for a change in mean near one estimated changepoint.
    Test(TestArgs),
    /// Run a simulation cell and write per-replicate results to CSV.
    Simulate(SimulateArgs),
    /// Report the median-absolute-deviation noise estimate.
    EstimateSigma(EstimateSigmaArgs),
    /// Run a timing sweep and write grid results to CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DetectMethod {
    Binseg,
    L0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ContrastArg {
    Spanning,
    Window,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConditionArg {
    /// Locations, orders, and signs of the whole segmentation run.
    StepSign,
    /// All estimated changepoint locations.
    Locations,
    /// Only the tested changepoint's presence.
    Fixed,
}

#[derive(Args)]
struct DetectorArgs {
    /// Number of binary segmentation steps (method: binseg).
    #[arg(long)]
    k: Option<usize>,
    /// Fixed ℓ0 penalty (method: l0).
    #[arg(long)]
    lambda: Option<f64>,
    /// Search for an ℓ0 penalty giving this many changepoints (method: l0).
    #[arg(long)]
    k_target: Option<usize>,
}

#[derive(Args)]
struct DetectArgs {
    /// CSV file with one value per line (an optional non-numeric first line
    /// is skipped).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: DetectMethod,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Emit JSON instead of plain text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: DetectMethod,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Index (1-based) of the estimated changepoint to test.
    #[arg(long)]
    j: usize,
    #[arg(long, value_enum)]
    contrast: ContrastArg,
    /// Window half-width for the window contrast.
    #[arg(long)]
    h: Option<usize>,
    #[arg(long, value_enum)]
    condition: ConditionArg,
    /// Known noise standard deviation.
    #[arg(long)]
    sigma: Option<f64>,
    /// Estimate the noise standard deviation from first differences.
    #[arg(long, conflicts_with = "sigma")]
    estimate_sigma: bool,
    /// Truncation bound for the regime walk: a number, "none", or "auto"
    /// (default) for max(10σ‖ν‖, |ν⊤y|). Ignored by ℓ0 conditioning.
    #[arg(long, default_value = "auto")]
    trunc: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Series length.
    #[arg(long)]
    t: usize,
    /// Number of true changepoints.
    #[arg(long)]
    k: usize,
    /// Mean gap at each changepoint.
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    sigma: f64,
    #[arg(long)]
    reps: usize,
    /// Inference approach 1..=8.
    #[arg(long)]
    approach: u8,
    #[arg(long)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Window half-width for window-contrast approaches.
    #[arg(long, default_value_t = 10)]
    h: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Proximity radius for power and detection.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Detector steps / target count when it differs from --k (e.g. under a
    /// global null).
    #[arg(long)]
    detect_k: Option<usize>,
    /// Fixed ℓ0 penalty instead of the per-replicate count-matching search.
    #[arg(long)]
    lambda: Option<f64>,
    /// Plug the estimated noise scale into inference.
    #[arg(long)]
    estimate_sigma: bool,
}

#[derive(Args)]
struct EstimateSigmaArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchMode {
    WindowH,
    Approaches,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    mode: BenchMode,
    #[arg(long)]
    out: PathBuf,
    /// Timing runs per grid point (the median is reported).
    #[arg(long, default_value_t = 5)]
    runs: usize,
}

/// Errors carrying the process exit code: 2 argument, 3 data, 4 numerical.
struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn arg(msg: impl Into<String>) -> Self {
        CliError {
            code: 2,
            msg: msg.into(),
        }
    }

    fn data(msg: impl Into<String>) -> Self {
        CliError {
            code: 3,
            msg: msg.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::InvalidArgument(_) | CoreError::SegmentationExhausted { .. } => 2,
            CoreError::Data(_) => 3,
            CoreError::Domain(_)
            | CoreError::InvariantViolation(_)
            | CoreError::DegenerateBoundary { .. } => 4,
        };
        CliError {
            code,
            msg: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Detect(args) => cmd_detect(args),
        Command::Test(args) => cmd_test(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::EstimateSigma(args) => cmd_estimate_sigma(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

/// Reads a single-column CSV; a non-numeric first line is treated as a
/// header and skipped.
fn read_series(path: &Path) -> Result<TimeSeries, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => continue, // header
            Err(_) => {
                return Err(CliError::data(format!(
                    "line {} of {} is not numeric: {line:?}",
                    i + 1,
                    path.display()
                )));
            }
        }
    }
    Ok(TimeSeries::new(values)?)
}

enum FittedDetector {
    Binseg { k: usize, fit: ChangepointFit },
    L0 { lambda: f64, fit: ChangepointFit },
}

impl FittedDetector {
    fn fit(&self) -> &ChangepointFit {
        match self {
            FittedDetector::Binseg { fit, .. } | FittedDetector::L0 { fit, .. } => fit,
        }
    }
}

fn run_detector(
    y: &TimeSeries,
    method: DetectMethod,
    det: &DetectorArgs,
) -> Result<FittedDetector, CliError> {
    match method {
        DetectMethod::Binseg => {
            if det.lambda.is_some() || det.k_target.is_some() {
                return Err(CliError::arg("binseg takes --k, not --lambda/--k-target"));
            }
            let k = det
                .k
                .ok_or_else(|| CliError::arg("binseg requires --k"))?;
            Ok(FittedDetector::Binseg {
                k,
                fit: binseg(y, k)?,
            })
        }
        DetectMethod::L0 => {
            if det.k.is_some() {
                return Err(CliError::arg("l0 takes --lambda or --k-target, not --k"));
            }
            match (det.lambda, det.k_target) {
                (Some(lambda), None) => Ok(FittedDetector::L0 {
                    lambda,
                    fit: l0_segment(y, lambda)?,
                }),
                (None, Some(target)) => {
                    let mean = y.values().iter().sum::<f64>() / y.len() as f64;
                    let hi = 0.5
                        * y.values()
                            .iter()
                            .map(|v| (v - mean) * (v - mean))
                            .sum::<f64>()
                        + 1.0;
                    let res = l0_lambda_for_k(y, target, (1e-6 * hi.max(1e-3), hi))?;
                    Ok(FittedDetector::L0 {
                        lambda: res.lambda,
                        fit: res.fit,
                    })
                }
                (Some(_), Some(_)) => {
                    Err(CliError::arg("--lambda and --k-target are mutually exclusive"))
                }
                (None, None) => Err(CliError::arg("l0 requires --lambda or --k-target")),
            }
        }
    }
}

fn cmd_detect(args: DetectArgs) -> Result<(), CliError> {
    let y = read_series(&args.input)?;
    let fitted = run_detector(&y, args.method, &args.detector)?;
    let fit = fitted.fit();
    if args.json {
        let mut obj = serde_json::json!({
            "method": match args.method { DetectMethod::Binseg => "binseg", DetectMethod::L0 => "l0" },
            "locations": fit.locations(),
            "means": fit.means(),
            "objective": fit.objective(),
        });
        match &fitted {
            FittedDetector::Binseg { k, fit } => {
                obj["k"] = (*k).into();
                obj["orders"] = serde_json::json!(fit.orders());
                obj["signs"] = serde_json::json!(fit.signs());
            }
            FittedDetector::L0 { lambda, .. } => {
                obj["lambda"] = (*lambda).into();
            }
        }
        println!("{}", serde_json::to_string(&obj).expect("serializable"));
    } else {
        let locs: Vec<String> = fit.locations().iter().map(|l| l.to_string()).collect();
        println!("locations: {}", locs.join(" "));
        println!("objective: {}", fit.objective());
        if let FittedDetector::L0 { lambda, .. } = &fitted {
            println!("lambda: {lambda}");
        }
    }
    Ok(())
}

fn format_endpoint(v: f64) -> serde_json::Value {
    if v == f64::INFINITY {
        serde_json::Value::String("inf".to_string())
    } else if v == f64::NEG_INFINITY {
        serde_json::Value::String("-inf".to_string())
    } else {
        serde_json::json!(v)
    }
}

fn union_to_json(s: &IntervalUnion) -> serde_json::Value {
    serde_json::Value::Array(
        s.intervals()
            .iter()
            .map(|&(lo, hi)| {
                serde_json::Value::Array(vec![format_endpoint(lo), format_endpoint(hi)])
            })
            .collect(),
    )
}

fn union_to_text(s: &IntervalUnion) -> String {
    let mut out = String::new();
    for (i, &(lo, hi)) in s.intervals().iter().enumerate() {
        if i > 0 {
            out.push_str(" U ");
        }
        let _ = write!(out, "[{lo}, {hi}]");
    }
    out
}

fn cmd_test(args: TestArgs) -> Result<(), CliError> {
    let y = read_series(&args.input)?;
    let sigma = if args.estimate_sigma {
        let est = estimate_sigma(&y)?;
        if est.degenerate {
            return Err(CliError::data(
                "estimated noise scale is zero; supply --sigma",
            ));
        }
        est.sigma
    } else {
        args.sigma
            .ok_or_else(|| CliError::arg("supply --sigma or --estimate-sigma"))?
    };
    let y = y.with_sigma(sigma)?;
    let fitted = run_detector(&y, args.method, &args.detector)?;
    let fit = fitted.fit();
    if args.j < 1 || args.j > fit.num_changepoints() {
        return Err(CliError::arg(format!(
            "--j {} out of range: the fit has {} changepoints",
            args.j,
            fit.num_changepoints()
        )));
    }
    let tau = fit.locations()[args.j - 1];
    let nu: Contrast = match args.contrast {
        ContrastArg::Spanning => spanning_contrast(fit, args.j, &y)?,
        ContrastArg::Window => {
            let h = args
                .h
                .ok_or_else(|| CliError::arg("window contrast requires --h"))?;
            window_contrast(tau, h, &y)?
        }
    };
    let trunc = match args.trunc.as_str() {
        "none" => None,
        "auto" => Some((10.0 * sigma * nu.norm()).max(nu.dot().abs())),
        other => {
            let m: f64 = other
                .parse()
                .map_err(|_| CliError::arg(format!("--trunc must be a number, 'none', or 'auto'; got {other:?}")))?;
            Some(m)
        }
    };
    let (s, conditioning, method): (IntervalUnion, Conditioning, Method) =
        match (&fitted, args.condition) {
            (FittedDetector::Binseg { k, .. }, ConditionArg::StepSign) => (
                bs_observed_interval(&y, *k, &nu)?,
                Conditioning::StepSign,
                Method::Selective,
            ),
            (FittedDetector::Binseg { k, .. }, ConditionArg::Locations) => (
                bs_s(&y, *k, args.j, &nu, BsMode::Full, trunc)?,
                Conditioning::Locations,
                Method::Selective,
            ),
            (FittedDetector::Binseg { k, .. }, ConditionArg::Fixed) => (
                bs_s(&y, *k, args.j, &nu, BsMode::Fixed, trunc)?,
                Conditioning::FixedTau,
                Method::Selective,
            ),
            (FittedDetector::L0 { lambda, .. }, ConditionArg::Locations) => (
                l0_s(&y, *lambda, args.j, &nu, L0Mode::Full)?,
                Conditioning::Locations,
                Method::Selective,
            ),
            (FittedDetector::L0 { lambda, .. }, ConditionArg::Fixed) => (
                l0_s(&y, *lambda, args.j, &nu, L0Mode::Window)?,
                Conditioning::FixedTau,
                Method::Selective,
            ),
            (FittedDetector::L0 { .. }, ConditionArg::StepSign) => {
                return Err(CliError::arg(
                    "step-sign conditioning applies to binary segmentation only",
                ));
            }
        };
    let scale = sigma * nu.norm();
    let sp = selective_p(&s, nu.dot().abs(), scale)?;
    if sp.clamp_warning {
        eprintln!("warning: p-value required clamping beyond 1e-12; treat with suspicion");
    }
    let naive = naive_p(nu.dot().abs(), scale);
    if args.json {
        let obj = serde_json::json!({
            "tau": tau,
            "j": args.j,
            "nu_dot_y": nu.dot(),
            "norm_sq": nu.norm_sq(),
            "scale": scale,
            "S": union_to_json(&s),
            "truncated": s.truncated(),
            "p": sp.p,
            "method": method.as_str(),
            "conditioning": conditioning.as_str(),
        });
        println!("{}", serde_json::to_string(&obj).expect("serializable"));
    } else {
        println!("tau: {tau} (j = {})", args.j);
        println!("nu_dot_y: {}", nu.dot());
        println!("scale: {scale}");
        println!("S: {}{}", union_to_text(&s), if s.truncated() { " (truncated)" } else { "" });
        println!("p: {}", sp.p);
        println!("naive z p: {naive}");
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let approach = Approach::from_number(args.approach)?;
    let detect_k = args.detect_k.unwrap_or(args.k.max(1));
    let detector = match (approach, args.lambda) {
        (Approach::A4 | Approach::A6 | Approach::A8, Some(lambda)) => {
            DetectorParams::L0Penalty(lambda)
        }
        (Approach::A4 | Approach::A6 | Approach::A8, None) => {
            DetectorParams::L0TargetCount(detect_k)
        }
        (_, Some(_)) => return Err(CliError::arg("--lambda applies to ℓ0 approaches only")),
        (_, None) => DetectorParams::BsSteps(detect_k),
    };
    let cfg = SimConfig {
        t_len: args.t,
        k_true: args.k,
        delta: args.delta,
        sigma: args.sigma,
        reps: args.reps,
        seed: args.seed,
        approach,
        detector,
        h: args.h,
        alpha: args.alpha,
        m: args.m,
        trunc: TruncPolicy::Auto,
        estimate_sigma: args.estimate_sigma,
    };
    let records = simulate(&cfg)?;
    let mut csv = String::from("rep,approach,delta,tau_hat,p,nearest_truth,dist\n");
    let mut power_sum = 0.0;
    let mut detect_sum = 0.0;
    for rec in &records {
        for t in &rec.output.tests {
            let (nearest, dist) = rec
                .truth
                .locations
                .iter()
                .map(|&tr| (tr, tr.abs_diff(t.tau)))
                .min_by_key(|&(_, d)| d)
                .map(|(tr, d)| (tr.to_string(), d.to_string()))
                .unwrap_or_else(|| (String::new(), String::new()));
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                rec.rep, args.approach, args.delta, t.tau, t.p, nearest, dist
            );
        }
        let metrics = power_and_detection(
            &rec.output.tests,
            &rec.output.locations,
            &rec.truth.locations,
            cfg.alpha,
            cfg.m,
        );
        power_sum += metrics.power;
        detect_sum += metrics.detection;
    }
    let n = records.len() as f64;
    csv.push_str("delta,approach,power,detection\n");
    let _ = writeln!(
        csv,
        "{},{},{},{}",
        args.delta,
        args.approach,
        power_sum / n,
        detect_sum / n
    );
    std::fs::write(&args.out, csv)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", args.out.display())))?;
    println!(
        "wrote {} replicates to {} (power {:.4}, detection {:.4})",
        records.len(),
        args.out.display(),
        power_sum / n,
        detect_sum / n
    );
    Ok(())
}

fn cmd_estimate_sigma(args: EstimateSigmaArgs) -> Result<(), CliError> {
    let y = read_series(&args.input)?;
    let est = estimate_sigma(&y)?;
    if est.degenerate {
        println!("sigma: 0 (degenerate; inference would be invalid)");
    } else {
        println!("sigma: {}", est.sigma);
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let mode = match args.mode {
        BenchMode::WindowH => TimingMode::WindowH,
        BenchMode::Approaches => TimingMode::Approaches,
    };
    let rows = timing_sweep(mode, args.runs)?;
    let mut csv = String::from("param,seconds\n");
    for row in &rows {
        let _ = writeln!(csv, "{},{}", row.label, row.seconds);
    }
    std::fs::write(&args.out, csv)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", args.out.display())))?;
    println!("wrote {} grid points to {}", rows.len(), args.out.display());
    Ok(())
}
