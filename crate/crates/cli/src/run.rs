//! Subcommand argument structs and implementations.

use crate::csvio::{opt_cell, parse_csv, write_dataset_csv};
use crate::{CliError, CliResult};
use clap::{Args, Subcommand};
use evfront::select::{
    select_k_frontier, select_k_known_rho_star, select_k_moment_endpoint, select_k_moment_rho,
    select_k_pickands_rho, select_k_pickands_star, KSelection,
};
use evfront::{
    emit_report_table, evaluate_spec, pickands_plot, robust_frontier, run_experiment, Dataset,
    EstimatorSpec, ExperimentConfig, KPolicy, ReportFormat, ScenarioKind, SpecStatus,
    TailEstimatorKind, TransformedSample,
};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate frontier values with confidence intervals on a CSV dataset
    Estimate(EstimateArgs),
    /// Threshold sweep diagnostics: grid estimates, rolling deviations and
    /// the chosen threshold per query point
    SelectK(SelectKArgs),
    /// Tail-index stability plot data per query point
    PickandsPlot(PickandsPlotArgs),
    /// Monte Carlo experiment on a synthetic scenario
    Simulate(SimulateArgs),
    /// Generate a synthetic dataset as CSV
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Input CSV with header x1,...,xp,y
    #[arg(long)]
    pub input: PathBuf,
    /// Query points: comma-separated values (univariate inputs), or
    /// semicolon-separated points "a,b;c,d" for p > 1. Defaults to the
    /// empirical input quantiles 0.05, 0.10, ..., 0.95 when p = 1.
    #[arg(long)]
    pub x: Option<String>,
    /// Comma-separated estimators: fdh, robust, pickands, knownrho[:rho],
    /// moment, knownell, rho-pickands, rho-moment, quantile-pickands:<p>,
    /// quantile-moment:<p>
    #[arg(long, default_value = "fdh,robust,moment")]
    pub estimators: String,
    /// Threshold policy: auto, an integer, or grid:<j>
    #[arg(long, default_value = "auto")]
    pub k: String,
    /// Tail index policy: known:<value>, pickands, or moment
    #[arg(long)]
    pub rho: Option<String>,
    /// Known tail constant (requires --rho known:<value>)
    #[arg(long)]
    pub ell: Option<f64>,
    /// Confidence level for intervals
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Results CSV path
    #[arg(long)]
    pub out: PathBuf,
    /// Optional frontier-curve CSV for external plotting
    #[arg(long)]
    pub plot_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectKArgs {
    /// Input CSV with header x1,...,xp,y
    #[arg(long)]
    pub input: PathBuf,
    /// Query points (see estimate)
    #[arg(long)]
    pub x: Option<String>,
    /// Sweep targets: rho-pickands, rho-moment, or a frontier estimator
    /// token (pickands, knownrho:<rho>, moment)
    #[arg(long, default_value = "rho-moment")]
    pub estimators: String,
    /// Tail index policy for frontier sweeps needing one
    #[arg(long)]
    pub rho: Option<String>,
    /// Confidence level used when the swept estimator needs one
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Diagnostics CSV path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PickandsPlotArgs {
    /// Input CSV with header x1,...,xp,y
    #[arg(long)]
    pub input: PathBuf,
    /// Query points (see estimate)
    #[arg(long)]
    pub x: Option<String>,
    /// Plot CSV path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario: triangle or cobb-douglas
    #[arg(long)]
    pub scenario: String,
    /// Sample size per replication
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    /// Number of replications
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    /// Comma-separated query points
    #[arg(long, default_value = "0.25,0.5,1")]
    pub x: String,
    /// Comma-separated estimators (see estimate)
    #[arg(long, default_value = "fdh,knownrho:2")]
    pub estimators: String,
    /// Threshold policy: auto, an integer, or grid:<j>
    #[arg(long, default_value = "auto")]
    pub k: String,
    /// Tail index policy: known:<value>, pickands, or moment
    #[arg(long)]
    pub rho: Option<String>,
    /// Known tail constant (requires --rho known:<value>)
    #[arg(long)]
    pub ell: Option<f64>,
    /// Confidence level
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Base seed; replication r uses a seed derived from (seed, r)
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Report CSV path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Scenario: triangle or cobb-douglas
    #[arg(long)]
    pub scenario: String,
    /// Sample size
    #[arg(long)]
    pub n: usize,
    /// Seed
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RhoPolicy {
    Known(f64),
    Pickands,
    Moment,
}

fn parse_rho_policy(s: Option<&str>) -> CliResult<Option<RhoPolicy>> {
    let Some(s) = s else { return Ok(None) };
    let s = s.trim();
    if let Some(v) = s.strip_prefix("known:") {
        let v: f64 = v
            .parse()
            .map_err(|_| CliError::Config(format!("bad tail index in --rho {s:?}")))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Config(format!(
                "--rho known value must be positive, got {v}"
            )));
        }
        return Ok(Some(RhoPolicy::Known(v)));
    }
    match s {
        "pickands" => Ok(Some(RhoPolicy::Pickands)),
        "moment" => Ok(Some(RhoPolicy::Moment)),
        other => Err(CliError::Config(format!(
            "--rho must be known:<value>, pickands or moment, got {other:?}"
        ))),
    }
}

fn parse_scenario(s: &str) -> CliResult<ScenarioKind> {
    match s.trim() {
        "triangle" | "uniform-triangle" => Ok(ScenarioKind::UniformTriangle),
        "cobb-douglas" | "cobbdouglas" => Ok(ScenarioKind::CobbDouglas),
        other => Err(CliError::Config(format!(
            "unknown scenario {other:?}; expected triangle or cobb-douglas"
        ))),
    }
}

fn parse_k_policy(s: &str) -> CliResult<KPolicy> {
    KPolicy::parse(s).map_err(|e| CliError::Config(e.to_string()))
}

fn check_level(level: f64) -> CliResult<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(CliError::Config(format!(
            "--level must be in (0, 1), got {level}"
        )));
    }
    Ok(level)
}

/// Expands estimator tokens into specs, resolving the bare `knownrho` and
/// `knownell` forms through --rho/--ell. `knownrho` with an estimated tail
/// index policy becomes the two-step estimator.
fn resolve_specs(
    tokens: &str,
    default_k: KPolicy,
    rho: Option<RhoPolicy>,
    ell: Option<f64>,
) -> CliResult<Vec<EstimatorSpec>> {
    let mut specs = Vec::new();
    for token in tokens.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let spec = match token {
            "knownrho" => match rho {
                Some(RhoPolicy::Known(v)) => EstimatorSpec::KnownRhoStar {
                    rho: v,
                    k: default_k,
                },
                Some(RhoPolicy::Pickands) => EstimatorSpec::TwoStepKnownRho {
                    source: TailEstimatorKind::Pickands,
                    k_rho: KPolicy::Auto,
                    k_front: default_k,
                },
                Some(RhoPolicy::Moment) => EstimatorSpec::TwoStepKnownRho {
                    source: TailEstimatorKind::Moment,
                    k_rho: KPolicy::Auto,
                    k_front: default_k,
                },
                None => {
                    return Err(CliError::Config(
                        "estimator knownrho needs --rho known:<value>, pickands or moment".into(),
                    ))
                }
            },
            "knownell" => match (rho, ell) {
                (Some(RhoPolicy::Known(r)), Some(e)) => EstimatorSpec::KnownEll {
                    rho: r,
                    ell: e,
                    k: default_k,
                },
                _ => {
                    return Err(CliError::Config(
                        "estimator knownell needs both --ell and --rho known:<value> \
                         (a known tail constant presumes a known tail index)"
                            .into(),
                    ))
                }
            },
            other => EstimatorSpec::parse(other, default_k)
                .map_err(|e| CliError::Config(e.to_string()))?,
        };
        specs.push(spec);
    }
    if specs.is_empty() {
        return Err(CliError::Config("no estimators requested".into()));
    }
    Ok(specs)
}

/// Parses --x into query points; derives the default quantile grid from
/// the data when absent (univariate inputs only).
fn resolve_query_points(spec: Option<&str>, ds: &Dataset) -> CliResult<Vec<Vec<f64>>> {
    let p = ds.input_dim();
    match spec {
        Some(s) => {
            let points: Vec<Vec<f64>> = if p == 1 {
                s.split(',')
                    .map(|tok| {
                        tok.trim()
                            .parse::<f64>()
                            .map(|v| vec![v])
                            .map_err(|_| CliError::Config(format!("bad query value {tok:?}")))
                    })
                    .collect::<CliResult<_>>()?
            } else {
                s.split(';')
                    .map(|point| {
                        let comps: Vec<f64> = point
                            .split(',')
                            .map(|tok| {
                                tok.trim().parse::<f64>().map_err(|_| {
                                    CliError::Config(format!("bad query component {tok:?}"))
                                })
                            })
                            .collect::<CliResult<_>>()?;
                        if comps.len() != p {
                            return Err(CliError::Config(format!(
                                "query point {point:?} has {} components, need {p}",
                                comps.len()
                            )));
                        }
                        Ok(comps)
                    })
                    .collect::<CliResult<_>>()?
            };
            if points.is_empty() {
                return Err(CliError::Config("empty --x grid".into()));
            }
            Ok(points)
        }
        None => {
            if p != 1 {
                return Err(CliError::Config(
                    "--x is required for multivariate inputs (no canonical default grid)".into(),
                ));
            }
            let mut grid = Vec::new();
            for i in 1..=19 {
                let q = i as f64 * 0.05;
                let v = ds
                    .input_quantile(q)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                if grid.last() != Some(&vec![v]) {
                    grid.push(vec![v]);
                }
            }
            Ok(grid)
        }
    }
}

fn open_out(path: &Path) -> CliResult<BufWriter<std::fs::File>> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn x_header(p: usize) -> String {
    (1..=p)
        .map(|i| format!("x{i}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn x_cells(x: &[f64]) -> String {
    x.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn status_and_reason(status: &SpecStatus) -> (&'static str, String) {
    match status {
        SpecStatus::Ok => ("ok", String::new()),
        SpecStatus::Degenerate(f) => ("degenerate", f.to_string()),
        SpecStatus::Failed(e) => ("failed", e.to_string()),
    }
}

/// Estimation over a grid of query points. Per-point insufficiencies are
/// reported in the status/reason columns; only global input or
/// configuration problems abort the run.
pub fn cmd_estimate(args: &EstimateArgs) -> CliResult<()> {
    let level = check_level(args.level)?;
    let default_k = parse_k_policy(&args.k)?;
    let rho = parse_rho_policy(args.rho.as_deref())?;
    if args.ell.is_some() && !matches!(rho, Some(RhoPolicy::Known(_))) {
        return Err(CliError::Config(
            "--ell requires --rho known:<value> (a known tail constant presumes a known tail index)"
                .into(),
        ));
    }
    let specs = resolve_specs(&args.estimators, default_k, rho, args.ell)?;
    let ds = parse_csv(&args.input)?;
    let points = resolve_query_points(args.x.as_deref(), &ds)?;
    let p = ds.input_dim();

    let mut results = open_out(&args.out)?;
    writeln!(
        results,
        "{},estimator,k,value,ci_lo,ci_hi,level,status,reason",
        x_header(p)
    )?;

    // plot rows: (curve_id, x, y, band)
    type PlotRow = (String, Vec<f64>, f64, Option<(f64, f64)>);
    let mut plot_rows: Vec<PlotRow> = Vec::new();

    for x in &points {
        let ts = ds
            .transform(x)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let mut fdh_done = false;
        for spec in &specs {
            let out = evaluate_spec(spec, &ts, level);
            let (status, reason) = status_and_reason(&out.status);
            writeln!(
                results,
                "{},{},{},{},{},{},{},{},{}",
                x_cells(x),
                spec.label(),
                out.k.map(|k| k.to_string()).unwrap_or_default(),
                opt_cell(out.value),
                opt_cell(out.ci.map(|c| c.0)),
                opt_cell(out.ci.map(|c| c.1)),
                level,
                status,
                reason
            )?;
            if matches!(spec, EstimatorSpec::Fdh) {
                fdh_done = true;
            }
            if !matches!(
                spec,
                EstimatorSpec::PickandsRho { .. } | EstimatorSpec::MomentRho { .. }
            ) {
                if let Some(v) = out.value {
                    plot_rows.push((spec.label(), x.clone(), v, out.ci));
                }
            }
        }
        if args.plot_out.is_some() {
            // baseline curves for every plot: the FDH envelope and the
            // first robust order statistic
            if !fdh_done {
                if let Ok(v) = ts.fdh() {
                    plot_rows.push(("fdh".into(), x.clone(), v, None));
                }
            }
            if let Ok(est) = robust_frontier(&ts, 1) {
                if let Some(v) = est.value {
                    plot_rows.push(("robust[k=1]".into(), x.clone(), v, None));
                }
            }
        }
    }
    results.flush()?;

    if let Some(plot_path) = &args.plot_out {
        let mut plot = open_out(plot_path)?;
        writeln!(plot, "{},curve_id,y,band_lo,band_hi", x_header(p))?;
        // group rows by curve in first-appearance order
        let mut order: Vec<String> = Vec::new();
        for (curve, ..) in &plot_rows {
            if !order.contains(curve) {
                order.push(curve.clone());
            }
        }
        for curve in &order {
            for (c, x, y, band) in &plot_rows {
                if c == curve {
                    writeln!(
                        plot,
                        "{},{},{},{},{}",
                        x_cells(x),
                        c,
                        y,
                        opt_cell(band.map(|b| b.0)),
                        opt_cell(band.map(|b| b.1)),
                    )?;
                }
            }
        }
        plot.flush()?;
    }
    Ok(())
}

/// Runs the requested threshold sweeps and writes the full diagnostics:
/// one row per grid entry with the estimate, the rolling deviation of the
/// window centred there, and a marker on the chosen threshold.
pub fn cmd_select_k(args: &SelectKArgs) -> CliResult<()> {
    let level = check_level(args.level)?;
    let rho = parse_rho_policy(args.rho.as_deref())?;
    let ds = parse_csv(&args.input)?;
    let points = resolve_query_points(args.x.as_deref(), &ds)?;
    let p = ds.input_dim();

    let mut out = open_out(&args.out)?;
    writeln!(
        out,
        "{},target,k,estimate,status,rolling_sd,chosen",
        x_header(p)
    )?;

    for x in &points {
        let ts = ds
            .transform(x)
            .map_err(|e| CliError::Config(e.to_string()))?;
        for token in args
            .estimators
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
        {
            let selection = run_sweep(token, &ts, rho, level)?;
            match selection {
                Ok(sel) => write_selection_rows(&mut out, x, token, &sel)?,
                Err(e) => writeln!(out, "{},{},,,error: {},,", x_cells(x), token, e)?,
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Maps a sweep token onto the matching selection rule.
fn run_sweep(
    token: &str,
    ts: &TransformedSample,
    rho: Option<RhoPolicy>,
    level: f64,
) -> CliResult<Result<KSelection, evfront::Error>> {
    let sel = match token {
        "rho-pickands" => select_k_pickands_rho(ts),
        "rho-moment" => select_k_moment_rho(ts),
        "pickands" => select_k_pickands_star(ts, level),
        "moment" => select_k_moment_endpoint(ts, level),
        "robust" => select_k_frontier(ts, |k| robust_frontier(ts, k).ok().and_then(|e| e.value)),
        tok => {
            if let Some(r) = tok.strip_prefix("knownrho:") {
                let r: f64 = r.parse().map_err(|_| {
                    CliError::Config(format!("bad tail index in sweep target {tok:?}"))
                })?;
                select_k_known_rho_star(ts, r, level)
            } else if tok == "knownrho" {
                match rho {
                    Some(RhoPolicy::Known(r)) => select_k_known_rho_star(ts, r, level),
                    _ => {
                        return Err(CliError::Config(
                            "sweep target knownrho needs --rho known:<value>".into(),
                        ))
                    }
                }
            } else {
                return Err(CliError::Config(format!(
                    "unknown sweep target {tok:?}; expected rho-pickands, rho-moment, \
                     pickands, moment, robust or knownrho[:<value>]"
                )));
            }
        }
    };
    Ok(sel)
}

fn write_selection_rows<W: Write>(
    w: &mut W,
    x: &[f64],
    token: &str,
    sel: &KSelection,
) -> CliResult<()> {
    let m = sel.window_halfwidth;
    for (i, gp) in sel.grid.iter().enumerate() {
        // attach each window's deviation to its centre entry (the one
        // whose threshold is reported when the window wins)
        let sd = i
            .checked_sub(m)
            .and_then(|s| sel.rolling_sd.get(s))
            .copied();
        let sd_cell = match sd {
            Some(v) if v.is_finite() => v.to_string(),
            _ => String::new(),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            x_cells(x),
            token,
            gp.k,
            opt_cell(gp.estimate),
            if gp.estimate.is_some() {
                "ok"
            } else {
                "failed"
            },
            sd_cell,
            if gp.k == sel.chosen_k { 1 } else { 0 },
        )?;
    }
    Ok(())
}

/// Writes the tail-index stability plot: one row per admissible threshold
/// and query point.
pub fn cmd_pickands_plot(args: &PickandsPlotArgs) -> CliResult<()> {
    let ds = parse_csv(&args.input)?;
    let points = resolve_query_points(args.x.as_deref(), &ds)?;
    let p = ds.input_dim();
    let mut out = open_out(&args.out)?;
    writeln!(out, "{},k,rho,status", x_header(p))?;
    for x in &points {
        let ts = ds
            .transform(x)
            .map_err(|e| CliError::Config(e.to_string()))?;
        match pickands_plot(&ts) {
            Ok(plot) => {
                for point in plot {
                    match point.outcome {
                        Ok(rho) => writeln!(out, "{},{},{},ok", x_cells(x), point.k, rho)?,
                        Err(f) => writeln!(out, "{},{},,{}", x_cells(x), point.k, f)?,
                    }
                }
            }
            Err(e) => writeln!(out, "{},,,error: {e}", x_cells(x))?,
        }
    }
    out.flush()?;
    Ok(())
}

/// Runs the Monte Carlo experiment and writes the report CSV; the aligned
/// table goes to stdout.
pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let level = check_level(args.level)?;
    let default_k = parse_k_policy(&args.k)?;
    let rho = parse_rho_policy(args.rho.as_deref())?;
    if args.ell.is_some() && !matches!(rho, Some(RhoPolicy::Known(_))) {
        return Err(CliError::Config(
            "--ell requires --rho known:<value>".into(),
        ));
    }
    let scenario = parse_scenario(&args.scenario)?;
    let estimators = resolve_specs(&args.estimators, default_k, rho, args.ell)?;
    let query_points: Vec<f64> = args
        .x
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad query value {tok:?}")))
        })
        .collect::<CliResult<_>>()?;

    let cfg = ExperimentConfig {
        scenario,
        sample_size: args.n,
        replications: args.reps,
        query_points,
        estimators,
        ci_level: level,
        base_seed: args.seed,
    };
    let report = run_experiment(&cfg).map_err(|e| CliError::Config(e.to_string()))?;

    let mut out = open_out(&args.out)?;
    out.write_all(emit_report_table(&report, ReportFormat::Csv).as_bytes())?;
    out.flush()?;
    print!("{}", emit_report_table(&report, ReportFormat::AlignedText));
    Ok(())
}

/// Generates a scenario sample and writes it as CSV.
pub fn cmd_gen(args: &GenArgs) -> CliResult<()> {
    let scenario = parse_scenario(&args.scenario)?;
    if args.n < 1 {
        return Err(CliError::Config("--n must be at least 1".into()));
    }
    let ds = evfront::Scenario {
        kind: scenario,
        n: args.n,
        seed: args.seed,
    }
    .generate();
    let mut out = open_out(&args.out)?;
    write_dataset_csv(&mut out, &ds)?;
    out.flush()?;
    Ok(())
}
