//! `ak4`: run identity reports over charts, execute single checks, classify
//! structures and list the built-in catalog.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ak4::report::{
    aggregate, analyze_chart, check_names, classify_points, is_known_check, run_report, run_sandbox_check, tool_info,
    Status, SANDBOX_MIN_TENSORS, SCHEMA,
};
use ak4::{resolve_chart, ChartSpec, RunConfig, Tolerances};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "ak4",
    version,
    about = "Curvature identity checks for almost Hermitian 4-manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every identity at seeded sample points of one chart.
    Report {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run one named identity across charts (or sandbox tensors).
    Check {
        name: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Place each chart on the Kähler / almost Kähler ladder.
    Classify {
        #[command(flatten)]
        run: RunArgs,
    },
    /// List the built-in charts.
    Catalog {
        /// Write the catalog as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Catalog name or chart file; `check` and `classify` default to the whole catalog.
    #[arg(long)]
    chart: Option<String>,
    #[arg(long, default_value_t = 32)]
    points: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Jet order; 2 and 3 skip the checks that need more derivatives.
    #[arg(long, default_value_t = 4)]
    order: usize,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
    /// Write JSON output to this path (atomically).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Lagrangian planes sampled per point.
    #[arg(long, default_value_t = 64)]
    planes: usize,
}

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;

/// Bad arguments, unreadable charts or points the chart cannot evaluate.
#[derive(Debug)]
struct InputError(String);

impl RunArgs {
    fn config(&self, chart: &str, checks: Vec<String>) -> Result<RunConfig, InputError> {
        if !(self.tol_scale.is_finite() && self.tol_scale > 0.0) {
            return Err(InputError(format!(
                "--tol-scale must be positive, got {}",
                self.tol_scale
            )));
        }
        let cfg = RunConfig {
            chart: chart.to_string(),
            points: self.points,
            seed: self.seed,
            order: self.order,
            tolerances: Tolerances::scaled(self.tol_scale),
            planes: self.planes,
            output: self.json.clone(),
            checks,
        };
        cfg.validate().map_err(|e| InputError(e.to_string()))?;
        Ok(cfg)
    }

    fn charts(&self) -> Result<Vec<ChartSpec>, InputError> {
        match &self.chart {
            Some(c) => Ok(vec![load(c)?]),
            None => Ok(ak4::catalog()),
        }
    }
}

fn load(chart: &str) -> Result<ChartSpec, InputError> {
    resolve_chart(chart).map_err(|e| InputError(format!("chart {chart}: {e}")))
}

/// Temp file in the target directory, then rename over the destination.
fn write_atomic(path: &Path, text: &str) -> Result<(), InputError> {
    let io = |e: std::io::Error| InputError(format!("writing {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.write_all(b"\n").map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn fmt_residual(r: Option<f64>) -> String {
    r.map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"))
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skipped => "SKIP",
    }
}

fn cmd_report(run: &RunArgs) -> Result<bool, InputError> {
    let chart = run
        .chart
        .as_deref()
        .ok_or_else(|| InputError("report needs --chart".to_string()))?;
    let spec = load(chart)?;
    let cfg = run.config(chart, Vec::new())?;
    let doc = run_report(&spec, &cfg).map_err(|e| InputError(e.to_string()))?;
    match &run.json {
        Some(path) => {
            write_atomic(path, &doc.to_json())?;
            let c = &doc.aggregate.classification;
            println!(
                "{}: verdict {}{}, {} points, seed {}",
                spec.name,
                c.verdict.as_str(),
                if c.einstein { " (Einstein)" } else { "" },
                cfg.points,
                cfg.seed
            );
            for (name, a) in &doc.aggregate.checks {
                println!(
                    "  {:<15} {}  worst {}",
                    name,
                    status_word(a.status),
                    fmt_residual(a.worst_residual)
                );
            }
        }
        None => println!("{}", doc.to_json()),
    }
    Ok(doc.passed())
}

fn cmd_check(name: &str, run: &RunArgs) -> Result<bool, InputError> {
    if !is_known_check(name) {
        return Err(InputError(format!(
            "unknown check {name:?}; available: {}",
            check_names().join(", ")
        )));
    }
    if name.starts_with("sandbox-") {
        let n = run.points.max(SANDBOX_MIN_TENSORS);
        let s = run_sandbox_check(name, n, run.seed).expect("known sandbox check");
        let a = &s.aggregate;
        println!(
            "{name}: {} over {n} sandbox tensors (seed {}), worst {} at tensor {}, {} on the vanishing side",
            status_word(a.status),
            run.seed,
            fmt_residual(a.worst_residual),
            a.worst_at.map_or("-".to_string(), |i| i.to_string()),
            s.vanishing_side
        );
        if let Some(path) = &run.json {
            let doc = json!({ "schema": SCHEMA, "tool": tool_info(), "sandbox": s });
            write_atomic(path, &serde_json::to_string_pretty(&doc).expect("serializes"))?;
        }
        return Ok(a.status != Status::Fail);
    }

    let mut ok = true;
    let mut rows = Vec::new();
    println!(
        "{:<20} {:<6} {:>11} {:>6}  location",
        "chart", "status", "worst", "point"
    );
    for spec in run.charts()? {
        let cfg = run.config(&spec.name, vec![name.to_string()])?;
        let points = analyze_chart(&spec, &cfg).map_err(|e| InputError(format!("{}: {e}", spec.name)))?;
        let agg = aggregate(points.iter().map(|p| &p.checks[name]));
        let location = agg.worst_at.map(|i| points[i].point);
        let reason = points
            .iter()
            .find_map(|p| p.checks[name].reason.clone())
            .filter(|_| agg.status == Status::Skipped);
        println!(
            "{:<20} {:<6} {:>11} {:>6}  {}",
            spec.name,
            status_word(agg.status),
            fmt_residual(agg.worst_residual),
            agg.worst_at.map_or("-".to_string(), |i| i.to_string()),
            match (location, &reason) {
                (Some(p), _) => format!("({:.4}, {:.4}, {:.4}, {:.4})", p[0], p[1], p[2], p[3]),
                (None, Some(r)) => r.clone(),
                (None, None) => String::new(),
            }
        );
        ok &= agg.status != Status::Fail;
        rows.push(json!({ "chart": spec.name, "aggregate": agg, "location": location, "reason": reason }));
    }
    if let Some(path) = &run.json {
        let doc = json!({ "schema": SCHEMA, "tool": tool_info(), "check": name, "seed": run.seed, "charts": rows });
        write_atomic(path, &serde_json::to_string_pretty(&doc).expect("serializes"))?;
    }
    Ok(ok)
}

fn cmd_classify(run: &RunArgs) -> Result<bool, InputError> {
    let mut rows = Vec::new();
    for spec in run.charts()? {
        let cfg = run.config(&spec.name, vec!["structure".to_string()])?;
        let points = analyze_chart(&spec, &cfg).map_err(|e| InputError(format!("{}: {e}", spec.name)))?;
        let c = classify_points(&points);
        let l = &c.ladder;
        println!(
            "{:<20} {:<17} |∇Ω| {:.2e}  N {:.2e}  dΩ {:.2e}  G1 {:.2e}  G2 {:.2e}  G3 {:.2e}  Einstein {} (|Ric₀| {:.2e})",
            spec.name,
            c.verdict.as_str(),
            l.nabla_omega,
            l.nijenhuis,
            l.d_omega,
            l.g1,
            l.g2,
            l.g3,
            if c.einstein { "yes" } else { "no" },
            l.ricci0
        );
        rows.push(json!({ "chart": spec.name, "classification": c }));
    }
    if let Some(path) = &run.json {
        let doc = json!({ "schema": SCHEMA, "tool": tool_info(), "seed": run.seed, "charts": rows });
        write_atomic(path, &serde_json::to_string_pretty(&doc).expect("serializes"))?;
    }
    Ok(true)
}

fn cmd_catalog(json_path: Option<&Path>) -> Result<bool, InputError> {
    let charts = ak4::catalog();
    for spec in &charts {
        let d = &spec.domain;
        println!(
            "{:<20} [{}]  domain {}",
            spec.name,
            spec.tags.join(", "),
            d.iter()
                .map(|[lo, hi]| format!("[{lo}, {hi}]"))
                .collect::<Vec<_>>()
                .join("×")
        );
    }
    if let Some(path) = json_path {
        let list: Vec<_> = charts.iter().map(ak4::report::ChartInfo::from).collect();
        let doc = json!({ "schema": SCHEMA, "tool": tool_info(), "charts": list });
        write_atomic(path, &serde_json::to_string_pretty(&doc).expect("serializes"))?;
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Report { run } => cmd_report(run),
        Command::Check { name, run } => cmd_check(name, run),
        Command::Classify { run } => cmd_classify(run),
        Command::Catalog { json } => cmd_catalog(json.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(InputError(msg)) => {
            eprintln!("ak4: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
