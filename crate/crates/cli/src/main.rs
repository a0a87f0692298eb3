//! Batch runner: sweep approximation orders for one corpus function, verify
//! each result, and persist rows plus a convergence-rate summary.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Parser;
use serde::{Deserialize, Serialize};

use comonotone::corpus::{self, CorpusEntry};
use comonotone::operators::{assemble_tau, resolve_constants, Mode, DEFAULT_KERNEL_RANGE};
use comonotone::partition::{
    breakpoint_neighborhoods, PartitionDumpRow, PartitionState, UniformGrid,
};
use comonotone::verify::{fit_rate, RateFit};
use comonotone::BreakpointSet64;

#[derive(Parser, Debug)]
#[command(
    name = "comonotone",
    about = "Comonotone trigonometric approximation sweeps"
)]
struct Cli {
    /// JSON config file mirroring the flags (flags win)
    #[arg(long)]
    config: Option<PathBuf>,
    /// corpus function id (const | neg_sin | neg_sin_warped | two_pair)
    #[arg(long)]
    function: Option<String>,
    /// comma-separated breakpoints overriding the corpus entry
    #[arg(long)]
    breakpoints: Option<String>,
    /// smoothness order (>= 2)
    #[arg(long)]
    r: Option<usize>,
    /// comma-separated approximation orders, strictly increasing
    #[arg(long)]
    n: Option<String>,
    /// constants mode: strict | practical
    #[arg(long)]
    mode: Option<String>,
    /// verification grid density
    #[arg(long)]
    grid_density: Option<usize>,
    /// ledger override KEY=VALUE (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// output file (stdout when omitted; plot series are written next to it)
    #[arg(long)]
    out: Option<PathBuf>,
    /// output format: json | csv
    #[arg(long)]
    format: Option<String>,
    /// include the per-interval partition diagnostic in each row
    #[arg(long)]
    dump_partition: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    #[serde(default = "default_function")]
    function_id: String,
    /// empty means: use the corpus entry's breakpoints
    #[serde(default)]
    breakpoints: Vec<f64>,
    #[serde(default = "default_r")]
    r: usize,
    #[serde(default = "default_n_list")]
    n_list: Vec<usize>,
    #[serde(default = "default_mode")]
    mode: String,
    #[serde(default = "default_grid_density")]
    grid_density: usize,
    #[serde(default)]
    overrides: BTreeMap<String, f64>,
    #[serde(default)]
    output_path: Option<PathBuf>,
    #[serde(default = "default_format")]
    output_format: String,
    #[serde(default)]
    dump_partition: bool,
}

fn default_function() -> String {
    "neg_sin".to_string()
}
fn default_r() -> usize {
    2
}
fn default_n_list() -> Vec<usize> {
    vec![16, 32, 64]
}
fn default_mode() -> String {
    "practical".to_string()
}
fn default_grid_density() -> usize {
    1024
}
fn default_format() -> String {
    "json".to_string()
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            function_id: default_function(),
            breakpoints: Vec::new(),
            r: default_r(),
            n_list: default_n_list(),
            mode: default_mode(),
            grid_density: default_grid_density(),
            overrides: BTreeMap::new(),
            output_path: None,
            output_format: default_format(),
            dump_partition: false,
        }
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<T>()
                .map_err(|e| anyhow::anyhow!("invalid {what} entry `{part}`: {e}"))
        })
        .collect()
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> Result<Self> {
        let mut config = match &cli.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(function) = &cli.function {
            config.function_id = function.clone();
        }
        if let Some(list) = &cli.breakpoints {
            config.breakpoints = parse_list(list, "breakpoint")?;
        }
        if let Some(r) = cli.r {
            config.r = r;
        }
        if let Some(list) = &cli.n {
            config.n_list = parse_list(list, "order")?;
        }
        if let Some(mode) = &cli.mode {
            config.mode = mode.clone();
        }
        if let Some(density) = cli.grid_density {
            config.grid_density = density;
        }
        for pair in &cli.set {
            let (key, value) = pair
                .split_once('=')
                .with_context(|| format!("--set expects KEY=VALUE, got `{pair}`"))?;
            let value: f64 = value
                .parse()
                .with_context(|| format!("--set {key}: invalid value `{value}`"))?;
            config.overrides.insert(key.trim().to_string(), value);
        }
        if let Some(out) = &cli.out {
            config.output_path = Some(out.clone());
        }
        if let Some(format) = &cli.format {
            config.output_format = format.clone();
        }
        if cli.dump_partition {
            config.dump_partition = true;
        }
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.r < 2 {
            bail!("r must be at least 2 (got {})", self.r);
        }
        if self.n_list.is_empty() {
            bail!("n_list empty");
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            bail!("n_list must be strictly increasing: {:?}", self.n_list);
        }
        match self.output_format.as_str() {
            "json" | "csv" => {}
            other => bail!("unknown output format `{other}` (json|csv)"),
        }
        self.mode.parse::<Mode>().map_err(anyhow::Error::msg)?;
        Ok(())
    }
}

/// One sweep row; the column set {n, degree, sup_error, margin, mode,
/// wall_ms} is stable, `error` is null on success.
#[derive(Debug, Serialize)]
struct Row {
    n: usize,
    degree: usize,
    sup_error: f64,
    margin: f64,
    mode: String,
    wall_ms: f64,
    fallback: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<comonotone::operators::StageTimings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<Vec<PartitionDumpRow>>,
}

#[derive(Debug, Serialize)]
struct Report {
    config: RunConfig,
    rows: Vec<Row>,
    rate: Option<RateFit>,
}

fn run_one(entry: &CorpusEntry, y: &BreakpointSet64, config: &RunConfig, n: usize) -> Row {
    let mode: Mode = config.mode.parse().expect("mode validated");
    let overrides: Vec<(String, f64)> = config
        .overrides
        .iter()
        .map(|(k, v)| (k.clone(), *v))
        .collect();
    let start = Instant::now();
    let outcome = resolve_constants::<f64>(
        y.pairs(),
        config.r,
        mode,
        &DEFAULT_KERNEL_RANGE,
        &overrides,
    )
    .and_then(|mut ledger| {
        assemble_tau(
            entry.f.clone(),
            entry.fprime.clone(),
            y,
            config.r,
            n,
            &mut ledger,
            config.grid_density,
        )
    });
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let partition = config.dump_partition.then(|| dump_partition(entry, config, n));
    match outcome {
        Ok(result) => Row {
            n,
            degree: result.degree,
            sup_error: result.sup_error,
            margin: result.margin,
            mode: config.mode.clone(),
            wall_ms,
            fallback: result.fallback,
            error: None,
            timings: Some(result.timings),
            partition: partition.and_then(Result::ok),
        },
        Err(err) => Row {
            n,
            degree: 0,
            sup_error: f64::NAN,
            margin: f64::NAN,
            mode: config.mode.clone(),
            wall_ms,
            fallback: false,
            error: Some(err.to_string()),
            timings: None,
            partition: partition.and_then(Result::ok),
        },
    }
}

fn dump_partition(
    entry: &CorpusEntry,
    config: &RunConfig,
    n: usize,
) -> Result<Vec<PartitionDumpRow>> {
    let y = entry.breakpoint_set();
    let fprime = entry.fprime.clone();
    let state = PartitionState::build(move |x| fprime(x), config.r, UniformGrid::new(n), 32)?;
    let layout = breakpoint_neighborhoods(&y, &state.grid, state.window_start)?;
    Ok(state.dump(&layout))
}

fn render_csv(report: &Report) -> String {
    let mut out = String::from("n,degree,sup_error,margin,mode,wall_ms\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.n, row.degree, row.sup_error, row.margin, row.mode, row.wall_ms
        ));
    }
    if let Some(rate) = &report.rate {
        out.push_str(&format!(
            "# rate slope={} intercept={} r_squared={}\n",
            rate.slope, rate.intercept, rate.r_squared
        ));
    }
    out
}

/// Plot series next to the main output: `<stem>.rate.csv` holds (n, error)
/// and `<stem>.curve.csv` holds (x, tau(x), f(x)) for the largest order.
fn write_series(
    path: &Path,
    report: &Report,
    entry: &CorpusEntry,
    y: &BreakpointSet64,
    config: &RunConfig,
) -> Result<()> {
    let stem = path.with_extension("");
    let stem = stem.to_string_lossy();
    let mut rate = String::from("n,sup_error\n");
    for row in report.rows.iter().filter(|r| r.error.is_none()) {
        rate.push_str(&format!("{},{}\n", row.n, row.sup_error));
    }
    fs::write(format!("{stem}.rate.csv"), rate)?;

    if let Some(row) = report.rows.iter().rev().find(|r| r.error.is_none()) {
        let mode: Mode = config.mode.parse().expect("mode validated");
        let overrides: Vec<(String, f64)> = config
            .overrides
            .iter()
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        let mut ledger = resolve_constants::<f64>(
            y.pairs(),
            config.r,
            mode,
            &DEFAULT_KERNEL_RANGE,
            &overrides,
        )?;
        let result = assemble_tau(
            entry.f.clone(),
            entry.fprime.clone(),
            y,
            config.r,
            row.n,
            &mut ledger,
            config.grid_density,
        )?;
        let mut curve = String::from("x,tau,f\n");
        let points = 1024usize;
        for i in 0..points {
            let x = -std::f64::consts::PI
                + 2.0 * std::f64::consts::PI * i as f64 / points as f64;
            curve.push_str(&format!("{},{},{}\n", x, result.tau.eval(x), (entry.f)(x)));
        }
        fs::write(format!("{stem}.curve.csv"), curve)?;
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let config = RunConfig::from_cli(&cli)?;

    let mut entry = corpus::entry(&config.function_id)
        .with_context(|| format!("unknown corpus function `{}`", config.function_id))?;
    if !config.breakpoints.is_empty() {
        entry.breakpoints = config.breakpoints.clone();
    }
    let y = entry.breakpoint_set();
    let residual = entry.comonotone_residual(10_000);
    if residual < -1e-12 {
        bail!(
            "`{}` is not comonotone with the requested breakpoints (residual {residual:e})",
            config.function_id
        );
    }

    // the sweep is embarrassingly parallel; rows are re-sorted by n
    let (entry_ref, y_ref, config_ref) = (&entry, &y, &config);
    let mut rows: Vec<Row> = std::thread::scope(|scope| {
        let handles: Vec<_> = config_ref
            .n_list
            .iter()
            .map(|&n| scope.spawn(move || run_one(entry_ref, y_ref, config_ref, n)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    rows.sort_by_key(|row| row.n);

    let passed: Vec<&Row> = rows.iter().filter(|r| r.error.is_none()).collect();
    let rate = if passed.len() >= 3 {
        let ns: Vec<usize> = passed.iter().map(|r| r.n).collect();
        let errs: Vec<f64> = passed.iter().map(|r| r.sup_error).collect();
        fit_rate(&ns, &errs).ok()
    } else {
        None
    };
    let any_failed = rows.iter().any(|r| r.error.is_some());
    let report = Report {
        config: config.clone(),
        rows,
        rate,
    };

    let rendered = match config.output_format.as_str() {
        "csv" => render_csv(&report),
        _ => serde_json::to_string_pretty(&report)? + "\n",
    };
    match &config.output_path {
        Some(path) => {
            fs::write(path, rendered)
                .with_context(|| format!("writing {}", path.display()))?;
            write_series(path, &report, &entry, &y, &config)?;
        }
        None => print!("{rendered}"),
    }

    if any_failed {
        for row in report.rows.iter().filter(|r| r.error.is_some()) {
            eprintln!(
                "n={}: {}",
                row.n,
                row.error.as_deref().unwrap_or("unknown failure")
            );
        }
        std::process::exit(2);
    }
    Ok(())
}
