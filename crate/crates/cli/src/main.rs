mod format;
mod svg;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use talbot_core::{
    coefficient_c, conjecture_scan, detect_plateaux, fragmentation_layout, gauss_abs,
    gauss_sum_direct, has_fragmentation, nonfrag_prediction, panel_by_name, peak_count,
    phase_alpha, two_n_lambda_odd, DensitySamples, FragmentationLayout, GaussCoefficient,
    GaussMagnitude, NonFragPrediction, PlateauInterval, PlateauReport, Rational, ScanRecord,
    WellParams, PANELS,
};

use crate::format::{sig, to_json};

#[derive(Parser)]
#[command(name = "talbot", version, about = "Density and plateaux of the expanded infinite well at rational times")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the normalized density on [0, 1/2]
    Density {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 4000, value_parser = clap::value_parser!(u32).range(2..))]
        samples: u32,
        #[arg(long, value_enum, default_value_t = DensityFormat::Csv)]
        out: DensityFormat,
        /// Write to this file instead of stdout
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Report the exact plateau intervals
    Plateaux {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the closed-form prediction for a configuration
    Predict {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Compare the detector with the predicted plateau over a grid
    Scan {
        #[arg(long = "lambda-den", default_value_t = 8)]
        lambda_den: u64,
        #[arg(long = "lambda-max", default_value = "6", value_parser = parse_rational)]
        lambda_max: Rational,
        #[arg(long, default_value_t = 20)]
        qmax: u64,
        #[arg(long, default_value_t = 3)]
        nmax: u32,
        /// Result file
        #[arg(long, default_value = "scan.json")]
        out: PathBuf,
        /// Include consistent records in the result file
        #[arg(long)]
        all: bool,
        /// Exit with status 1 if any record is inconsistent
        #[arg(long)]
        strict: bool,
    },
    /// Evaluate G(a, k, q) and its normalized factors
    Gauss {
        #[arg(allow_hyphen_values = true)]
        a: i64,
        #[arg(allow_hyphen_values = true)]
        k: i64,
        q: u64,
    },
    /// Write CSV and SVG files for the reference panels
    Figures {
        /// Only this panel (e.g. frag-a, nonfrag-1)
        #[arg(long)]
        panel: Option<String>,
        #[arg(long, default_value = "figures")]
        dir: PathBuf,
        #[arg(long, default_value_t = 4000, value_parser = clap::value_parser!(u32).range(2..))]
        samples: u32,
    },
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// Expansion factor, e.g. 5/2 or 10.7
    #[arg(long, value_parser = parse_rational)]
    lambda: Rational,
    /// Index of the initial eigenstate
    #[arg(long = "N", value_name = "N")]
    n: u32,
    /// Time as a fraction of the revival time, e.g. 1/3
    #[arg(long, value_parser = parse_rational)]
    tau: Rational,
}

impl ParamArgs {
    fn build(&self) -> Result<WellParams, CliError> {
        WellParams::new(self.lambda.clone(), self.n, self.tau.clone()).map_err(CliError::from)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DensityFormat {
    Csv,
    Svg,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

enum CliError {
    /// Invalid input; exit status 2.
    Usage(String),
    /// Anything else; exit status 1.
    Runtime(String),
}

impl From<talbot_core::Error> for CliError {
    fn from(e: talbot_core::Error) -> Self {
        use talbot_core::Error::*;
        match e {
            InvalidParams(_) | ParseRational(_) | Precondition(_) | NotInvertible { .. }
            | ZeroDenominator => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

fn emit(output: Option<&Path>, content: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, content).map_err(|e| io_error(path, e)),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Runtime(e.to_string())),
    }
}

fn density_csv(s: &DensitySamples) -> String {
    let mut out = String::from("x,p\n");
    for (x, p) in s.xs.iter().zip(&s.ps) {
        out.push_str(&sig(*x));
        out.push(',');
        out.push_str(&sig(*p));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct DensityPoint {
    x: f64,
    p: f64,
}

#[derive(Serialize)]
struct DensityJson<'a> {
    params: &'a WellParams,
    samples: Vec<DensityPoint>,
}

fn render_density(
    params: &WellParams,
    samples: usize,
    format: DensityFormat,
) -> Result<String, CliError> {
    let s = DensitySamples::midpoint_grid(params, samples)?;
    Ok(match format {
        DensityFormat::Csv => density_csv(&s),
        DensityFormat::Json => to_json(&DensityJson {
            params,
            samples: s
                .xs
                .iter()
                .zip(&s.ps)
                .map(|(&x, &p)| DensityPoint { x, p })
                .collect(),
        }),
        DensityFormat::Svg => {
            let report = detect_plateaux(params)?;
            svg::density_plot(&params.to_string(), &s.xs, &s.ps, &report.intervals)
        }
    })
}

fn plateaux_csv(report: &PlateauReport) -> String {
    let mut out = String::from("lo,hi,kind,level,vanishing_side\n");
    for i in &report.intervals {
        out.push_str(&format!(
            "{},{},{:?},{},{:?}\n",
            i.lo,
            i.hi,
            i.kind,
            sig(i.level),
            i.vanishing_side
        ));
    }
    out
}

#[derive(Serialize)]
struct Prediction {
    params: WellParams,
    fragmentation: bool,
    threshold: Rational,
    two_n_lambda_odd: bool,
    layout: Option<FragmentationLayout>,
    layout_intervals: Option<Vec<(Rational, Rational)>>,
    peak_count: Option<u64>,
    plateau: Option<NonFragPrediction>,
    plateau_interval: Option<(Rational, Rational)>,
}

fn predict(params: &WellParams) -> Result<Prediction, CliError> {
    let fragmentation = has_fragmentation(params);
    let odd = two_n_lambda_odd(params);
    let layout = fragmentation.then(|| fragmentation_layout(params)).transpose()?;
    let plateau = (!fragmentation && odd)
        .then(|| nonfrag_prediction(params))
        .transpose()?;
    Ok(Prediction {
        params: params.clone(),
        fragmentation,
        threshold: params.threshold(),
        two_n_lambda_odd: odd,
        layout_intervals: layout.as_ref().map(FragmentationLayout::intervals),
        peak_count: fragmentation.then(|| peak_count(params)).transpose()?,
        plateau_interval: plateau.as_ref().map(NonFragPrediction::interval),
        layout,
        plateau,
    })
}

#[derive(Serialize)]
struct ScanRow<'a> {
    params: &'a WellParams,
    predicted_exists: bool,
    consistent: bool,
    issues: &'a [String],
    predicted: Option<(Rational, Rational)>,
    detected: &'a [PlateauInterval],
}

impl<'a> From<&'a ScanRecord> for ScanRow<'a> {
    fn from(r: &'a ScanRecord) -> Self {
        ScanRow {
            params: &r.params,
            predicted_exists: r.predicted_exists,
            consistent: r.consistent,
            issues: &r.issues,
            predicted: r.prediction.as_ref().map(NonFragPrediction::interval),
            detected: &r.detected.intervals,
        }
    }
}

#[derive(Serialize)]
struct ScanGrid {
    lambda_den: u64,
    lambda_max: Rational,
    qmax: u64,
    nmax: u32,
}

#[derive(Serialize)]
struct ScanOutput<'a> {
    grid: ScanGrid,
    records: usize,
    inconsistent: usize,
    sums_checked: usize,
    zero_test_disagreements: usize,
    galois_checks: usize,
    galois_failures: usize,
    max_shadow_residual: f64,
    rows: Vec<ScanRow<'a>>,
}

#[derive(Serialize)]
struct Complex {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct GaussOutput {
    a: i64,
    k: i64,
    q: u64,
    value: Complex,
    magnitude: GaussMagnitude,
    magnitude_value: f64,
    /// `c(k)` and the phase `α`, present when `a` is invertible modulo `q`.
    coefficient: Option<GaussCoefficient>,
    alpha: Option<f64>,
}

fn gauss(a: i64, k: i64, q: u64) -> Result<GaussOutput, CliError> {
    if q == 0 {
        return Err(CliError::Usage("q must be positive".into()));
    }
    let g = gauss_sum_direct(a, k, q)?;
    let magnitude = gauss_abs(a, k, q);
    let coefficient = coefficient_c(a, q, k).ok();
    let alpha = phase_alpha(a, q).ok().map(|p| p.alpha);
    Ok(GaussOutput {
        a,
        k,
        q,
        value: Complex {
            re: clean(g.re),
            im: clean(g.im),
        },
        magnitude,
        magnitude_value: magnitude.to_f64(),
        coefficient,
        alpha,
    })
}

/// Maps round-off residue of an exact zero to zero.
fn clean(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        0.0
    } else {
        x
    }
}

fn figures(panel: Option<&str>, dir: &Path, samples: usize) -> Result<(), CliError> {
    let panels: Vec<_> = match panel {
        Some(name) => vec![panel_by_name(name).ok_or_else(|| {
            let known: Vec<_> = PANELS.iter().map(|p| p.name).collect();
            CliError::Usage(format!("unknown panel {name:?}; known: {}", known.join(", ")))
        })?],
        None => PANELS.iter().collect(),
    };
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    for panel in panels {
        let params = panel.params()?;
        let s = DensitySamples::midpoint_grid(&params, samples)?;
        let report = detect_plateaux(&params)?;
        let csv_path = dir.join(format!("{}.csv", panel.name));
        let svg_path = dir.join(format!("{}.svg", panel.name));
        fs::write(&csv_path, density_csv(&s)).map_err(|e| io_error(&csv_path, e))?;
        let title = format!("{} {}", panel.name, params);
        fs::write(&svg_path, svg::density_plot(&title, &s.xs, &s.ps, &report.intervals))
            .map_err(|e| io_error(&svg_path, e))?;
        println!(
            "{}: {} plateau interval(s) -> {}, {}",
            panel.name,
            report.intervals.len(),
            csv_path.display(),
            svg_path.display()
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Density {
            params,
            samples,
            out,
            output,
        } => {
            let params = params.build()?;
            emit(output.as_deref(), &render_density(&params, samples as usize, out)?)?;
        }
        Command::Plateaux {
            params,
            format,
            output,
        } => {
            let report = detect_plateaux(&params.build()?)?;
            let text = match format {
                TableFormat::Json => to_json(&report),
                TableFormat::Csv => plateaux_csv(&report),
            };
            emit(output.as_deref(), &text)?;
        }
        Command::Predict { params } => {
            emit(None, &to_json(&predict(&params.build()?)?))?;
        }
        Command::Scan {
            lambda_den,
            lambda_max,
            qmax,
            nmax,
            out,
            all,
            strict,
        } => {
            let records = conjecture_scan(lambda_den, &lambda_max, qmax, nmax)?;
            let bad = records.iter().filter(|r| !r.consistent).count();
            let summary = ScanOutput {
                grid: ScanGrid {
                    lambda_den,
                    lambda_max,
                    qmax,
                    nmax,
                },
                records: records.len(),
                inconsistent: bad,
                sums_checked: records.iter().map(|r| r.sums_checked).sum(),
                zero_test_disagreements: records.iter().map(|r| r.zero_test_disagreements).sum(),
                galois_checks: records.iter().map(|r| r.galois_checks).sum(),
                galois_failures: records.iter().map(|r| r.galois_failures).sum(),
                max_shadow_residual: records
                    .iter()
                    .map(|r| r.max_shadow_residual)
                    .fold(0.0, f64::max),
                rows: records
                    .iter()
                    .filter(|r| all || !r.consistent)
                    .map(ScanRow::from)
                    .collect(),
            };
            fs::write(&out, to_json(&summary)).map_err(|e| io_error(&out, e))?;
            println!(
                "{} records, {} inconsistent, {} zero-test disagreements -> {}",
                summary.records,
                bad,
                summary.zero_test_disagreements,
                out.display()
            );
            if strict && bad > 0 {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Gauss { a, k, q } => emit(None, &to_json(&gauss(a, k, q)?))?,
        Command::Figures {
            panel,
            dir,
            samples,
        } => figures(panel.as_deref(), &dir, samples as usize)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("TALBOT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("TALBOT_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
