//! Command-line front end: parse workspace files, print computed geometric
//! objects, and run the verification suite.
//!
//! Exit codes: 0 success / all checks pass; 1 check failures; 2 usage,
//! file, or parse errors.

use std::collections::BTreeSet;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hlift_core::{
    adapted_frame, curvature, horizontal_lift_connection, horizontal_lift_metric,
    lie_derivative_connection, run_suite, Anchor, EquivConfig, Faults, ManifoldEntry,
    Mutation, Section, SuiteConfig, TangentBundle, Tensor, VectorField, Workspace,
};
use hlift::parser::parse_workspace;
use hlift::report::{describe, render_text, to_json_report};

#[derive(Parser)]
#[command(name = "hlift", version, about = "Horizontal lifts of affine connections on the tangent bundle: compute and verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite over a workspace file
    Check {
        /// Workspace file
        file: String,
        #[command(flatten)]
        common: Common,
        /// Inject a named fault (repeatable); the suite is expected to fail
        #[arg(long, value_name = "MUTATION")]
        fault: Vec<String>,
        /// Run only these anchors (repeatable)
        #[arg(long, value_name = "ANCHOR")]
        only: Vec<String>,
    },
    /// Compute one geometric object and print its components
    Compute {
        /// What to compute
        selector: String,
        /// Workspace file
        file: String,
        /// Manifold name (defaults to the only manifold)
        #[arg(long)]
        manifold: Option<String>,
        /// Vector field name (required for section-level objects)
        #[arg(long)]
        field: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Describe each check and report its residual for a workspace
    Explain {
        /// Workspace file
        file: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Sampling seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample points per check
    #[arg(long, default_value_t = 20)]
    points: usize,
    /// Relative tolerance
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Failure that maps to exit code 2: bad usage, missing files, parse
/// errors, invalid names.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn load_workspace(path: &str) -> Result<Workspace, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("{path}: {e}")))?;
    let mut w = parse_workspace(&text).map_err(|e| UsageError(format!("{path}:{e}")))?;
    w.name = std::path::Path::new(path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string());
    Ok(w)
}

fn suite_config(common: &Common, faults: &[String], only: &[String]) -> Result<SuiteConfig, UsageError> {
    let mut f = Faults::none();
    for name in faults {
        let m = Mutation::from_name(name)
            .ok_or_else(|| UsageError(format!("unknown mutation `{name}`")))?;
        f = f.with(m);
    }
    let mask = if only.is_empty() {
        None
    } else {
        let mut set = BTreeSet::new();
        for name in only {
            let a = Anchor::from_name(name)
                .ok_or_else(|| UsageError(format!("unknown anchor `{name}`")))?;
            set.insert(a);
        }
        Some(set)
    };
    if common.tol <= 0.0 {
        return Err(UsageError("tolerance must be positive".into()));
    }
    if common.points == 0 {
        return Err(UsageError("points must be at least 1".into()));
    }
    Ok(SuiteConfig {
        seed: common.seed,
        points: common.points,
        tol: common.tol,
        fibre_halfwidth: 2.0,
        mask,
        faults: f,
    })
}

fn equiv_config(common: &Common) -> EquivConfig {
    EquivConfig {
        points: common.points,
        tol: common.tol,
        seed: common.seed,
    }
}

fn run_check(
    file: &str,
    common: &Common,
    faults: &[String],
    only: &[String],
    explain: bool,
) -> Result<ExitCode, UsageError> {
    let w = load_workspace(file)?;
    let cfg = suite_config(common, faults, only)?;
    let report = run_suite(&w, &cfg)?;
    match common.format {
        Format::Json => {
            let json = to_json_report(&report);
            println!("{}", serde_json::to_string_pretty(&json)?);
        }
        Format::Text => {
            if explain {
                let mut seen = BTreeSet::new();
                for c in &report.checks {
                    if seen.insert(c.anchor) {
                        println!("{}:", c.anchor.name());
                        println!("  {}", describe(c.anchor));
                    }
                }
                println!();
            }
            print!("{}", render_text(&report));
        }
    }
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn tensor_json(t: &Tensor) -> serde_json::Value {
    fn build(t: &Tensor, prefix: &mut Vec<usize>, depth: usize) -> serde_json::Value {
        if depth == t.rank() {
            return serde_json::Value::String(t.get(prefix).to_string());
        }
        let items = (0..t.dim())
            .map(|i| {
                prefix.push(i);
                let v = build(t, prefix, depth + 1);
                prefix.pop();
                v
            })
            .collect();
        serde_json::Value::Array(items)
    }
    build(t, &mut Vec::new(), 0)
}

fn matrix_json(rows: usize, cols: usize, f: impl Fn(usize, usize) -> String) -> serde_json::Value {
    serde_json::Value::Array(
        (0..rows)
            .map(|r| {
                serde_json::Value::Array(
                    (0..cols)
                        .map(|c| serde_json::Value::String(f(r, c)))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn pick_manifold<'w>(
    w: &'w Workspace,
    name: &Option<String>,
) -> Result<(&'w String, &'w ManifoldEntry), UsageError> {
    match name {
        Some(n) => w
            .manifolds
            .get_key_value(n)
            .ok_or_else(|| UsageError(format!("unknown manifold `{n}`"))),
        None => {
            if w.manifolds.len() == 1 {
                Ok(w.manifolds.iter().next().unwrap())
            } else {
                Err(UsageError(
                    "workspace has several manifolds; pass --manifold".into(),
                ))
            }
        }
    }
}

fn pick_field<'e>(
    entry: &'e ManifoldEntry,
    name: &Option<String>,
) -> Result<&'e VectorField, UsageError> {
    let n = name
        .as_ref()
        .ok_or_else(|| UsageError("this selector needs --field".into()))?;
    entry
        .fields
        .get(n)
        .ok_or_else(|| UsageError(format!("unknown vector field `{n}`")))
}

fn run_compute(
    selector: &str,
    file: &str,
    manifold: &Option<String>,
    field: &Option<String>,
    common: &Common,
) -> Result<ExitCode, UsageError> {
    let w = load_workspace(file)?;
    let cfg = equiv_config(common);
    let (mname, entry) = pick_manifold(&w, manifold)?;
    let conn = entry.connection(&cfg)?;
    let dom = &entry.manifold.domain;
    let n = conn.dim();

    let object = match selector {
        "christoffel" => tensor_json(&conn.as_tensor()),
        "curvature" => tensor_json(&curvature(&conn)),
        "lie-connection" => {
            let v = pick_field(entry, field)?;
            tensor_json(&lie_derivative_connection(v, &conn)?)
        }
        "lift-connection" => {
            let bundle = TangentBundle::new(conn.chart().clone())?;
            let lifted = horizontal_lift_connection(&bundle, &conn, &curvature(&conn));
            tensor_json(&lifted.as_connection().as_tensor())
        }
        "lift-metric" => {
            let g = entry
                .metric()
                .ok_or_else(|| UsageError(format!(
                    "manifold `{mname}` has an explicit connection; lift-metric needs a metric"
                )))?;
            let bundle = TangentBundle::new(conn.chart().clone())?;
            tensor_json(&horizontal_lift_metric(&bundle, g, &conn))
        }
        "frame" => {
            let v = pick_field(entry, field)?;
            let frame = adapted_frame(v);
            serde_json::Value::Array(vec![
                matrix_json(2 * n, n, |a, j| frame.b(a, j).to_string()),
                matrix_json(2 * n, n, |a, j| frame.c(a, j).to_string()),
                matrix_json(n, 2 * n, |h, a| frame.b_inv(h, a).to_string()),
                matrix_json(n, 2 * n, |h, a| frame.c_inv(h, a).to_string()),
            ])
        }
        "induced" => {
            let v = pick_field(entry, field)?;
            let section = Section::new(v, &conn)?;
            tensor_json(&section.induced_connection(dom, &cfg)?.as_tensor())
        }
        "H" | "h" => {
            let v = pick_field(entry, field)?;
            let section = Section::new(v, &conn)?;
            tensor_json(&section.second_fundamental(dom, &cfg)?)
        }
        "gauss" => {
            let v = pick_field(entry, field)?;
            let section = Section::new(v, &conn)?;
            let g = section.gauss_decomposition(dom, &cfg)?;
            serde_json::Value::Array(vec![
                tensor_json(&g.tangential.as_tensor()),
                tensor_json(&g.normal),
            ])
        }
        "curvature-split" => {
            let v = pick_field(entry, field)?;
            let section = Section::new(v, &conn)?;
            // one more differentiation level than the other identities
            let split_cfg = EquivConfig {
                tol: cfg.tol * 10.0,
                ..cfg
            };
            let d = section.curvature_decomposition(dom, &split_cfg)?;
            serde_json::Value::Array(vec![
                tensor_json(&d.tangential),
                tensor_json(&d.vertical),
            ])
        }
        other => {
            return Err(UsageError(format!(
                "unknown selector `{other}` (expected christoffel, curvature, lie-connection, \
                 lift-connection, lift-metric, frame, induced, H, gauss, curvature-split)"
            )))
        }
    };

    match common.format {
        Format::Json => {
            let mut objects = serde_json::Map::new();
            objects.insert(selector.to_string(), object);
            let doc = serde_json::json!({
                "workspace": w.name,
                "seed": common.seed,
                "checks": [],
                "objects": objects,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Format::Text => {
            println!("{selector} on {mname}:");
            println!("{}", render_value(&object, 0));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn render_value(v: &serde_json::Value, indent: usize) -> String {
    match v {
        serde_json::Value::String(s) => format!("{}{s}", "  ".repeat(indent)),
        serde_json::Value::Array(items) => items
            .iter()
            .map(|item| render_value(item, indent + 1))
            .collect::<Vec<_>>()
            .join("\n"),
        other => format!("{}{other}", "  ".repeat(indent)),
    }
}

fn main() -> ExitCode {
    // die quietly when a downstream pager/head closes the pipe
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check {
            file,
            common,
            fault,
            only,
        } => run_check(file, common, fault, only, false),
        Command::Explain { file, common } => run_check(file, common, &[], &[], true),
        Command::Compute {
            selector,
            file,
            manifold,
            field,
            common,
        } => run_compute(selector, file, manifold, field, common),
    };
    match outcome {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
