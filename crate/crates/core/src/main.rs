use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crossvar::datasets::{dataset, CATALOG};
use crossvar::general::{general_cdf_quadrature, general_cdf_series, general_pdf_quadrature, GeneralModel, SeriesCaps};
use crossvar::hypothesis::{crossvar_test, f_variance_test, pooled_t_test, Alpha, Decision};
use crossvar::report::{
    fmt_p, to_json, DistReport, DistRow, GroupSummary, PowerReport, RunManifest, TestReport, Type1Report,
};
use crossvar::simulation::{
    default_delta_grid, mu_grid, power_preset, run_power_study, run_type1_study, run_type1_table, QuantileMode,
    StudyConfig, PAPER_MU, PAPER_REPS,
};
use crossvar::stats::{MomentSummary, NPolicy, Sample};
use crossvar::tstar::{tstar_cdf, tstar_pdf, tstar_quantile, TstarModel};

const THREADS_ENV: &str = "CROSSVAR_THREADS";
const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(name = "crossvar", version, about = "Cross-variance two-sample test toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the F, pooled t and cross-variance tests on two samples
    Test(TestArgs),
    /// Evaluate T* or general-T distribution functions
    Dist(DistArgs),
    /// Monte Carlo power study
    Power(PowerArgs),
    /// Monte Carlo type-I error study
    Type1(Type1Args),
    /// List the bundled datasets with their moments
    Datasets(DatasetsArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Min,
    Max,
    Avg,
}

impl From<PolicyArg> for NPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Min => NPolicy::Min,
            PolicyArg::Max => NPolicy::Max,
            PolicyArg::Avg => NPolicy::Average,
        }
    }
}

#[derive(Args)]
struct TestArgs {
    /// Bundled dataset id (ds1..ds14)
    #[arg(long, conflicts_with_all = ["input", "x", "y"])]
    dataset: Option<String>,
    /// Two-column CSV: group label, value
    #[arg(long, conflicts_with_all = ["x", "y"])]
    input: Option<PathBuf>,
    /// First group, one value per line
    #[arg(long, requires = "y")]
    x: Option<PathBuf>,
    /// Second group, one value per line
    #[arg(long, requires = "x")]
    y: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Level of the variance-equality F-test
    #[arg(long, default_value_t = 0.05)]
    f_alpha: f64,
    /// Group size used by the cross-variance test when sizes differ
    #[arg(long, value_enum)]
    n_policy: Option<PolicyArg>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Which {
    TstarPdf,
    TstarCdf,
    TstarQuantile,
    GeneralCdf,
    GeneralPdf,
    GeneralCdfSeries,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long, value_enum)]
    which: Which,
    /// Group size (fractional values allowed for T*)
    #[arg(long)]
    n: f64,
    /// Evaluation points, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    t: Vec<f64>,
    /// Probabilities for quantiles, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    p: Vec<f64>,
    /// Evaluate on k equally spaced interior points of (0, 1)
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    sigma_x2: Option<f64>,
    #[arg(long)]
    sigma_y2: Option<f64>,
    #[arg(long, default_value_t = 6)]
    digits: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Empirical,
    Analytic,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum PowerPreset {
    #[value(name = "paper-fig1")]
    Fig1,
    #[value(name = "paper-fig2")]
    Fig2,
    #[value(name = "paper-fig3")]
    Fig3,
    #[value(name = "paper-fig4")]
    Fig4,
}

#[derive(Args)]
struct PowerArgs {
    #[arg(long, value_enum, conflicts_with_all = ["n", "sigma", "mu_grid", "delta_grid", "mu_x", "alpha"])]
    preset: Option<PowerPreset>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    mu_x: Option<f64>,
    /// Second-group means, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "delta_grid")]
    mu_grid: Vec<f64>,
    /// Standardised shifts Δμ/(σ√(2/n)), comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    delta_grid: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Empirical)]
    quantile_mode: ModeArg,
    /// Write report.json, table.csv and plot.csv here
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Type1Preset {
    #[value(name = "paper-table1")]
    Table1,
}

#[derive(Args)]
struct Type1Args {
    #[arg(long, value_enum, conflicts_with_all = ["n", "sigma", "mu_x", "alpha"])]
    preset: Option<Type1Preset>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    /// Extra level tabulated next to 0.05 and 0.01
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    mu_x: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write report.json, table.csv and pvalues.csv here
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct DatasetsArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: line {line}: {msg}")]
    Input { path: String, line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("writing output: {0}")]
    Write(#[from] std::io::Error),
    #[error("rendering output: {0}")]
    Json(#[from] serde_json::Error),
    #[error("rendering output: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] crossvar::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use crossvar::Error as E;
        match self {
            CliError::Input { .. } | CliError::Usage(_) | CliError::Read { .. } => 2,
            CliError::Core(E::Degenerate(_)) => 3,
            CliError::Core(E::Domain { .. } | E::InvalidConfig(_) | E::EmptyInput) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    let result = match cli.command {
        Command::Test(a) => cmd_test(a),
        Command::Dist(a) => cmd_dist(a),
        Command::Power(a) => cmd_power(a),
        Command::Type1(a) => cmd_type1(a),
        Command::Datasets(a) => cmd_datasets(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    if n == 0 {
        return Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer")));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn parse_number(field: &str, path: &Path, line: usize) -> CliResult<f64> {
    let v: f64 = field.trim().parse().map_err(|_| CliError::Input {
        path: path.display().to_string(),
        line,
        msg: format!("cannot parse '{}' as a number", field.trim()),
    })?;
    if !v.is_finite() {
        return Err(CliError::Input {
            path: path.display().to_string(),
            line,
            msg: format!("value '{}' is not finite", field.trim()),
        });
    }
    Ok(v)
}

/// One value per line; blank lines are skipped and a non-numeric first line
/// is taken as a header.
fn parse_column(bytes: &[u8], path: &Path) -> CliResult<Vec<f64>> {
    let text = String::from_utf8_lossy(bytes);
    let mut out = Vec::new();
    let mut seen_content = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim().trim_end_matches(',');
        if line.is_empty() {
            continue;
        }
        if !seen_content && line.parse::<f64>().is_err() {
            seen_content = true;
            continue;
        }
        seen_content = true;
        out.push(parse_number(line, path, i + 1)?);
    }
    Ok(out)
}

/// Rows of `label, value`; the first label seen is the x group. A first row
/// whose value is not numeric is treated as a header.
fn parse_grouped(bytes: &[u8], path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(bytes);
    let mut labels: Vec<String> = Vec::new();
    let mut groups: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (i, rec) in reader.records().enumerate() {
        let line = i + 1;
        let rec = rec.map_err(|e| CliError::Input {
            path: path.display().to_string(),
            line,
            msg: e.to_string(),
        })?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if rec.len() != 2 {
            return Err(CliError::Input {
                path: path.display().to_string(),
                line,
                msg: format!("expected 2 fields (group, value), found {}", rec.len()),
            });
        }
        if i == 0 && rec[1].parse::<f64>().is_err() {
            continue;
        }
        let value = parse_number(&rec[1], path, line)?;
        let label = rec[0].to_string();
        let idx = match labels.iter().position(|l| *l == label) {
            Some(k) => k,
            None if labels.len() < 2 => {
                labels.push(label);
                labels.len() - 1
            }
            None => {
                return Err(CliError::Input {
                    path: path.display().to_string(),
                    line,
                    msg: format!("third group label '{label}'; exactly two groups are expected"),
                })
            }
        };
        groups[idx].push(value);
    }
    if labels.len() < 2 {
        return Err(CliError::Input {
            path: path.display().to_string(),
            line: 0,
            msg: "input must contain two groups".into(),
        });
    }
    let [x, y] = groups;
    Ok((x, y))
}

fn to_sample(values: Vec<f64>, name: &str) -> CliResult<Sample> {
    Sample::new(values).map_err(|e| match e {
        crossvar::Error::Degenerate(msg) => crossvar::Error::Degenerate(format!("group {name}: {msg}")).into(),
        other => other.into(),
    })
}

fn summary(m: &MomentSummary) -> GroupSummary {
    GroupSummary {
        n: m.n,
        mean: m.mean,
        variance: m.variance,
    }
}

fn emit(s: &str) -> CliResult<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    out.write_all(s.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn cmd_test(a: TestArgs) -> CliResult<()> {
    let alpha = Alpha::new(a.alpha)?;
    let f_alpha = Alpha::new(a.f_alpha)?;
    let mut manifest = RunManifest::new("test").flag("alpha", a.alpha).flag("f_alpha", a.f_alpha);
    let (xs, ys) = if let Some(name) = &a.dataset {
        let ds = dataset(name)?;
        let canon = format!("{:?}\n{:?}\n", ds.x, ds.y);
        manifest = manifest.flag("dataset", ds.id).digest(&format!("dataset:{}", ds.id), canon.as_bytes());
        (ds.x.to_vec(), ds.y.to_vec())
    } else if let Some(path) = &a.input {
        let bytes = read_file(path)?;
        manifest = manifest.digest("input", &bytes);
        parse_grouped(&bytes, path)?
    } else if let (Some(px), Some(py)) = (&a.x, &a.y) {
        let bx = read_file(px)?;
        let by = read_file(py)?;
        manifest = manifest.digest("x", &bx).digest("y", &by);
        (parse_column(&bx, px)?, parse_column(&by, py)?)
    } else {
        return Err(CliError::Usage("give --dataset, --input, or both --x and --y".into()));
    };
    let x = to_sample(xs, "x")?;
    let y = to_sample(ys, "y")?;
    let policy = match (a.n_policy, x.len() == y.len()) {
        (Some(p), _) => NPolicy::from(p),
        (None, true) => NPolicy::Max,
        (None, false) => {
            return Err(CliError::Usage(format!(
                "group sizes differ ({} vs {}); choose --n-policy min, max or avg",
                x.len(),
                y.len()
            )))
        }
    };
    if let Some(p) = a.n_policy {
        manifest = manifest.flag("n_policy", NPolicy::from(p).as_str());
    }

    let f = f_variance_test(&x, &y, f_alpha)?;
    let t = pooled_t_test(&x, &y, alpha)?;
    let c = crossvar_test(&x, &y, alpha, policy)?;
    let mut warnings = Vec::new();
    if f.decision == Decision::Reject {
        warnings.push(format!(
            "F-test rejects equal variances (p = {}); the equal-variance tests may be unreliable",
            fmt_p(f.p_value)
        ));
    }
    let report = TestReport {
        manifest,
        x: summary(x.moments()),
        y: summary(y.moments()),
        results: vec![f, t, c],
        warnings,
    };
    for w in &report.warnings {
        if a.format != Format::Text {
            eprintln!("warning: {w}");
        }
    }
    match a.format {
        Format::Text => emit(&report.to_text()),
        Format::Json => emit(&to_json(&report)?),
        Format::Csv => emit(&report.to_csv()?),
    }
}

fn eval_points(explicit: &[f64], grid: Option<usize>, what: &str) -> CliResult<Vec<f64>> {
    match (explicit.is_empty(), grid) {
        (false, None) => Ok(explicit.to_vec()),
        (true, Some(k)) if k > 0 => Ok((1..=k).map(|i| i as f64 / (k + 1) as f64).collect()),
        (true, Some(_)) => Err(CliError::Usage("--grid must be positive".into())),
        (true, None) => Err(CliError::Usage(format!("give --{what} or --grid"))),
        (false, Some(_)) => Err(CliError::Usage(format!("--{what} and --grid are mutually exclusive"))),
    }
}

fn cmd_dist(a: DistArgs) -> CliResult<()> {
    let mut manifest = RunManifest::new("dist").flag("n", a.n);
    let general_model = || -> CliResult<GeneralModel> {
        let (Some(sx), Some(sy)) = (a.sigma_x2, a.sigma_y2) else {
            return Err(CliError::Usage("general distributions need --sigma-x2 and --sigma-y2".into()));
        };
        if a.n.fract() != 0.0 || a.n < 2.0 {
            return Err(CliError::Usage(format!("general distributions need an integer n ≥ 2, got {}", a.n)));
        }
        Ok(GeneralModel::new(a.n as usize, sx, sy)?)
    };
    let mut rows = Vec::new();
    match a.which {
        Which::TstarPdf | Which::TstarCdf | Which::TstarQuantile => {
            if a.sigma_x2.is_some() || a.sigma_y2.is_some() {
                return Err(CliError::Usage("--sigma-x2/--sigma-y2 apply to general distributions only".into()));
            }
            let model = TstarModel::new(a.n)?;
            if a.which == Which::TstarQuantile {
                if !a.t.is_empty() {
                    return Err(CliError::Usage("tstar-quantile takes --p, not --t".into()));
                }
                for p in eval_points(&a.p, a.grid, "p")? {
                    rows.push(DistRow {
                        input: p,
                        output: tstar_quantile(p, &model)?,
                        method: "bisection".into(),
                        error_estimate: None,
                    });
                }
            } else {
                if !a.p.is_empty() {
                    return Err(CliError::Usage("--p applies to tstar-quantile only".into()));
                }
                for t in eval_points(&a.t, a.grid, "t")? {
                    let output = if a.which == Which::TstarPdf {
                        tstar_pdf(t, &model)?
                    } else {
                        tstar_cdf(t, &model)?
                    };
                    rows.push(DistRow {
                        input: t,
                        output,
                        method: "closed-form".into(),
                        error_estimate: None,
                    });
                }
            }
        }
        Which::GeneralCdf | Which::GeneralPdf | Which::GeneralCdfSeries => {
            if !a.p.is_empty() {
                return Err(CliError::Usage("--p applies to tstar-quantile only".into()));
            }
            let model = general_model()?;
            manifest = manifest
                .flag("sigma_x2", model.sigma_x2())
                .flag("sigma_y2", model.sigma_y2());
            for t in eval_points(&a.t, a.grid, "t")? {
                let row = match a.which {
                    Which::GeneralCdf => {
                        let q = general_cdf_quadrature(t, &model)?;
                        DistRow {
                            input: t,
                            output: q.value,
                            method: "quadrature".into(),
                            error_estimate: Some(q.error_estimate),
                        }
                    }
                    Which::GeneralPdf => {
                        let q = general_pdf_quadrature(t, &model)?;
                        DistRow {
                            input: t,
                            output: q.value,
                            method: "quadrature".into(),
                            error_estimate: Some(q.error_estimate),
                        }
                    }
                    _ => {
                        let s = general_cdf_series(t, &model, SeriesCaps::default())?;
                        DistRow {
                            input: t,
                            output: s.value,
                            method: if s.converged { "series" } else { "series-unconverged" }.into(),
                            error_estimate: None,
                        }
                    }
                };
                rows.push(row);
            }
        }
    }
    let which = a.which.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let report = DistReport {
        manifest: manifest.flag("which", which),
        rows,
    };
    match a.format {
        Format::Json => emit(&to_json(&report)?),
        Format::Csv | Format::Text => emit(&report.to_csv(a.digits)?),
    }
}

fn write_out(dir: &Path, files: &[(&str, String)]) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    for (name, body) in files {
        fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn cmd_power(a: PowerArgs) -> CliResult<()> {
    let reps = a.reps.unwrap_or(PAPER_REPS);
    let mode = match a.quantile_mode {
        ModeArg::Empirical => QuantileMode::Empirical,
        ModeArg::Analytic => QuantileMode::Analytic,
    };
    let mut manifest = RunManifest::new("power")
        .with_seed(a.seed)
        .flag("reps", reps)
        .flag("quantile_mode", format!("{mode:?}").to_lowercase());
    let configs: Vec<StudyConfig> = if let Some(p) = a.preset {
        let (fig, name) = match p {
            PowerPreset::Fig1 => (1, "paper-fig1"),
            PowerPreset::Fig2 => (2, "paper-fig2"),
            PowerPreset::Fig3 => (3, "paper-fig3"),
            PowerPreset::Fig4 => (4, "paper-fig4"),
        };
        manifest = manifest.flag("preset", name);
        power_preset(fig, a.seed, reps)?
            .into_iter()
            .map(|c| StudyConfig { quantile_mode: mode, ..c })
            .collect()
    } else {
        let (Some(n), Some(sigma)) = (a.n, a.sigma) else {
            return Err(CliError::Usage("give --preset, or --n and --sigma".into()));
        };
        let mu_x = a.mu_x.unwrap_or(PAPER_MU);
        let alpha = a.alpha.unwrap_or(0.01);
        let grid = if !a.mu_grid.is_empty() {
            manifest = manifest.flag("mu_grid", join(&a.mu_grid));
            a.mu_grid.clone()
        } else {
            let deltas = if a.delta_grid.is_empty() {
                default_delta_grid()
            } else {
                a.delta_grid.clone()
            };
            manifest = manifest.flag("delta_grid", join(&deltas));
            if n < 1 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            mu_grid(mu_x, sigma, n, &deltas)
        };
        manifest = manifest
            .flag("n", n)
            .flag("sigma", sigma)
            .flag("mu_x", mu_x)
            .flag("alpha", alpha);
        vec![StudyConfig {
            n,
            reps,
            alpha: Alpha::new(alpha)?,
            mu_x,
            mu_y_grid: grid,
            sigma,
            seed: a.seed,
            quantile_mode: mode,
        }]
    };
    let curves = configs.iter().map(run_power_study).collect::<Result<Vec<_>, _>>()?;
    let report = PowerReport { manifest, curves };
    let json = to_json(&report)?;
    if let Some(dir) = &a.out {
        write_out(
            dir,
            &[
                ("report.json", json.clone()),
                ("table.csv", report.to_csv()?),
                ("plot.csv", report.plot_csv()?),
            ],
        )?;
    }
    match a.format {
        Format::Text => emit(&report.to_text()),
        Format::Json => emit(&json),
        Format::Csv => emit(&report.to_csv()?),
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_type1(a: Type1Args) -> CliResult<()> {
    let reps = a.reps.unwrap_or(PAPER_REPS);
    let mut manifest = RunManifest::new("type1").with_seed(a.seed).flag("reps", reps);
    let table = if a.preset.is_some() {
        manifest = manifest.flag("preset", "paper-table1");
        run_type1_table(a.seed, reps)?
    } else {
        let (Some(n), Some(sigma)) = (a.n, a.sigma) else {
            return Err(CliError::Usage("give --preset paper-table1, or --n and --sigma".into()));
        };
        let mu_x = a.mu_x.unwrap_or(PAPER_MU);
        let alpha = a.alpha.unwrap_or(0.05);
        manifest = manifest
            .flag("n", n)
            .flag("sigma", sigma)
            .flag("mu_x", mu_x)
            .flag("alpha", alpha);
        run_type1_study(&StudyConfig {
            n,
            reps,
            alpha: Alpha::new(alpha)?,
            mu_x,
            mu_y_grid: Vec::new(),
            sigma,
            seed: a.seed,
            quantile_mode: QuantileMode::Empirical,
        })?
    };
    let report = Type1Report { manifest, table };
    let json = to_json(&report)?;
    if let Some(dir) = &a.out {
        write_out(
            dir,
            &[
                ("report.json", json.clone()),
                ("table.csv", report.to_csv()?),
                ("pvalues.csv", report.pvalues_csv()?),
            ],
        )?;
    }
    match a.format {
        Format::Text => emit(&report.to_text()),
        Format::Json => emit(&json),
        Format::Csv => emit(&report.to_csv()?),
    }
}

#[derive(serde::Serialize)]
struct DatasetRow {
    id: &'static str,
    group: &'static str,
    n: usize,
    mean: f64,
    variance: f64,
    printed_mean: f64,
    printed_variance: f64,
    values: &'static [f64],
}

fn cmd_datasets(a: DatasetsArgs) -> CliResult<()> {
    let mut rows = Vec::new();
    for d in &CATALOG {
        for (group, values, printed) in [("x", d.x, d.printed_x), ("y", d.y, d.printed_y)] {
            let m = MomentSummary::of(values);
            rows.push(DatasetRow {
                id: d.id,
                group,
                n: m.n,
                mean: m.mean,
                variance: m.variance,
                printed_mean: printed.0,
                printed_variance: printed.1,
                values,
            });
        }
    }
    match a.format {
        Format::Json => emit(&to_json(&rows)?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["id", "group", "n", "mean", "variance", "printed_mean", "printed_variance"])?;
            for r in &rows {
                w.write_record([
                    r.id.to_string(),
                    r.group.to_string(),
                    r.n.to_string(),
                    format!("{:.3}", r.mean),
                    format!("{:.3}", r.variance),
                    format!("{:.3}", r.printed_mean),
                    format!("{:.3}", r.printed_variance),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Write(e.into_error()))?;
            emit(&String::from_utf8_lossy(&bytes))
        }
        Format::Text => {
            let mut out = format!("{:<5} {:<5} {:>3} {:>10} {:>10}  values\n", "id", "group", "n", "mean", "variance");
            for r in &rows {
                let vals = r.values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ");
                out.push_str(&format!(
                    "{:<5} {:<5} {:>3} {:>10.3} {:>10.3}  {vals}\n",
                    r.id, r.group, r.n, r.mean, r.variance
                ));
            }
            emit(&out)
        }
    }
}
