//! Command-line front end. [`run_command`] is the whole program; `main`
//! only forwards `std::env::args` and the exit code.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use powerfpp::acceptance;
use powerfpp::critical::{critical_time, solve_alpha_star, solve_theta};
use powerfpp::criterion::{not_sharp_margin, sup_f_classify, ClassifyOptions, DEFAULT_ALPHA_GRID};
use powerfpp::fpp::{run_ensemble, EnsembleConfig, WeightModel, DEFAULT_BUDGET};
use powerfpp::graph::complete;
use powerfpp::report::{emit_report, grid_table, summary_table, Format, Report, Table};
use powerfpp::walk::{mc_f_estimate, success_lower_bound, ConditionedSampler};
use powerfpp::{BaseGraph, Error, Execution, GraphSpec, Result, VertexId};
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
/// `verify` found a failing criterion.
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "powerfpp", version, about = "First-passage percolation on Cartesian powers of graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: Format,
}

#[derive(Args, Debug, Clone)]
struct Endpoints {
    /// Graph JSON file, or inline JSON starting with `{`.
    #[arg(long)]
    graph: String,
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical time and the sign of the criterion function.
    Analyze {
        #[command(flatten)]
        ends: Endpoints,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        /// Skip the margin certificate for POSITIVE verdicts.
        #[arg(long)]
        no_margin: bool,
        #[command(flatten)]
        output: Output,
    },
    /// α*, the diagonal constant, ϑ and complete-graph critical times.
    Constants {
        /// Report only the diagonal constant.
        #[arg(long)]
        diagonal: bool,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
        /// Largest q in the K_q table.
        #[arg(long, default_value_t = 10)]
        kq: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Conditioned-walk diagnostics and Monte Carlo estimates.
    Walk {
        #[command(flatten)]
        ends: Endpoints,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Point `(s, t)` for the Monte Carlo estimate of f.
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        /// Power for the success lower bound.
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// First-passage ensembles on `G^n`.
    Simulate {
        #[command(flatten)]
        ends: Endpoints,
        /// Powers, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        replicas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// exp:λ | uniform:a,b | table:path
        #[arg(long, default_value = "exp:1")]
        weights: String,
        /// Hamming distances, comma separated.
        #[arg(long, value_delimiter = ',')]
        hamming: Option<Vec<usize>>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Runs the acceptance suite.
    Verify {
        #[command(flatten)]
        output: Output,
    },
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load_graph(token: &str) -> Result<BaseGraph> {
    let text = if token.trim_start().starts_with('{') { token.to_string() } else { std::fs::read_to_string(token)? };
    GraphSpec::from_json(&text)?.build()
}

fn endpoints(e: &Endpoints) -> Result<(BaseGraph, VertexId, VertexId)> {
    let g = load_graph(&e.graph)?;
    let (v, w) = (g.resolve(&e.from)?, g.resolve(&e.to)?);
    Ok((g, v, w))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

fn analyze(ends: &Endpoints, tol: f64, grid: usize, depth: usize, no_margin: bool) -> Result<Report> {
    let (g, v, w) = endpoints(ends)?;
    let config = json!({"graph": to_value(&GraphSpec::describe(&g)?), "from": v, "to": w, "tol": tol, "grid": grid, "depth": depth});
    if v == w {
        let c = critical_time(&g, &v, &w, tol)?;
        return Ok(Report::new("analyze", None, config, json!({"t_star": c.t_star, "t_star_err": c.abs_err, "criterion": null}), grid_table(&[])));
    }
    let opts = ClassifyOptions { grid, max_depth: depth, tol, ..ClassifyOptions::default() };
    let mut report = sup_f_classify(&g, &v, &w, &opts)?;
    let mut margin_note = Value::Null;
    if !no_margin && report.classification == powerfpp::criterion::Classification::Positive {
        match not_sharp_margin(&g, &v, &w, &report, &DEFAULT_ALPHA_GRID, tol) {
            Ok(m) => report.margin = Some(m),
            Err(Error::NoMargin) => margin_note = json!("no exponent in the grid certifies a margin"),
            Err(e) => return Err(e),
        }
    }
    let table = grid_table(&report.grid);
    let results = json!({
        "t_star": report.t_star,
        "t_star_err": report.t_star_err,
        "classification": report.classification,
        "criterion": to_value(&report),
        "margin_note": margin_note,
    });
    Ok(Report::new("analyze", None, config, results, table))
}

fn constants(diagonal: bool, rho: f64, tol: f64, kq: usize) -> Result<Report> {
    let a = solve_alpha_star(tol, rho)?;
    let config = json!({"rho": rho, "tol": tol, "diagonal": diagonal, "kq": kq});
    let mut table = Table::new(&["name", "argument", "value"]);
    table.rows.push(vec!["diagonal_constant".into(), rho.to_string(), format!("{:?}", a.diagonal_constant)]);
    if diagonal {
        let results = json!({"alpha_star": a.alpha_star, "diagonal_constant": a.diagonal_constant, "rho": rho});
        return Ok(Report::new("constants", None, config, results, table));
    }
    table.rows.push(vec!["alpha_star".into(), String::new(), format!("{:?}", a.alpha_star)]);
    let mut theta = Vec::new();
    for i in 0..=10 {
        let x = i as f64 / 10.0;
        let th = solve_theta(x, tol)?;
        table.rows.push(vec!["theta".into(), x.to_string(), format!("{th:?}")]);
        theta.push(json!({"x": x, "theta": th, "time": th / rho}));
    }
    let mut kq_rows = Vec::new();
    for q in 2..=kq.max(2) {
        let c = critical_time(&complete(q), &0.into(), &1.into(), tol.max(1e-13))?;
        table.rows.push(vec!["t_star_Kq".into(), q.to_string(), format!("{:?}", c.t_star)]);
        kq_rows.push(json!({"q": q, "t_star": c.t_star, "t_star_err": c.abs_err}));
    }
    let results = json!({
        "alpha_star": a.alpha_star,
        "diagonal_constant": a.diagonal_constant,
        "rho": rho,
        "theta": theta,
        "complete_graphs": kq_rows,
    });
    Ok(Report::new("constants", None, config, results, table))
}

#[allow(clippy::too_many_arguments)]
fn walk(ends: &Endpoints, samples: u64, seed: u64, s: Option<f64>, t: Option<f64>, n: Option<usize>) -> Result<Report> {
    let (g, v, w) = endpoints(ends)?;
    let c = critical_time(&g, &v, &w, 1e-12)?;
    let config = json!({"graph": to_value(&GraphSpec::describe(&g)?), "from": v, "to": w, "samples": samples, "s": s, "t": t, "n": n});
    let mut table = Table::new(&["quantity", "estimate", "stderr"]);
    let mut results = json!({"t_star": c.t_star});
    if c.t_star > 0.0 {
        let sampler = ConditionedSampler::new(&g, &v, &w, c.t_star)?;
        results["jump_length_law"] = to_value(sampler.law());
    }
    match (s, t) {
        (Some(s), Some(t)) => {
            let e = mc_f_estimate(&g, &v, &w, c.t_star, s, t, samples, seed, Execution::Parallel)?;
            table.rows.push(vec!["mc_f".into(), format!("{:?}", e.estimate), format!("{:?}", e.stderr)]);
            results["mc_f"] = to_value(&e);
        }
        (None, None) => {}
        _ => return Err(Error::InvalidArgument("--s and --t go together".into())),
    }
    if let Some(n) = n {
        let e = success_lower_bound(&g, &v, &w, n, c.t_star, samples, seed, Execution::Parallel)?;
        table.rows.push(vec!["success_lower_bound".into(), format!("{:?}", e.estimate), format!("{:?}", e.stderr)]);
        results["success_lower_bound"] = to_value(&e);
    }
    Ok(Report::new("walk", Some(seed), config, results, table))
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    ends: &Endpoints,
    n: &[usize],
    replicas: usize,
    seed: u64,
    weights: &str,
    hamming: Option<Vec<usize>>,
    budget: u64,
) -> Result<Report> {
    let (g, v, w) = endpoints(ends)?;
    let model = WeightModel::parse(weights)?;
    let mut cfg = EnsembleConfig::new(n.to_vec(), v.clone(), w.clone(), model.clone(), replicas, seed);
    cfg.hamming = hamming.clone();
    cfg.budget = budget;
    let summaries = run_ensemble(&g, &cfg)?;
    let config = json!({
        "graph": to_value(&GraphSpec::describe(&g)?), "from": v, "to": w, "n": n, "replicas": replicas,
        "weights": to_value(&model), "hamming": hamming, "budget": budget,
    });
    Ok(Report::new("simulate", Some(seed), config, json!({"summaries": to_value(&summaries)}), summary_table(&summaries)))
}

fn verify() -> (Report, bool) {
    let outcomes = acceptance::run_all();
    for o in &outcomes {
        eprintln!("{}", o.line());
    }
    let all = outcomes.iter().all(|o| o.passed);
    let mut table = Table::new(&["criterion", "name", "passed", "elapsed_secs"]);
    table.rows = outcomes
        .iter()
        .map(|o| vec![o.id.to_string(), o.name.clone(), o.passed.to_string(), format!("{:.3}", o.elapsed_secs)])
        .collect();
    (Report::new("verify", None, Value::Null, json!({"all_passed": all, "outcomes": to_value(&outcomes)}), table), all)
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    }
}

/// Parses `argv` (program name first), runs one subcommand and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let mut passed = true;
    let outcome = match &cli.command {
        Command::Analyze { ends, tol, grid, depth, no_margin, output } => {
            analyze(ends, *tol, *grid, *depth, *no_margin).map(|r| (r, output))
        }
        Command::Constants { diagonal, rho, tol, kq, output } => constants(*diagonal, *rho, *tol, *kq).map(|r| (r, output)),
        Command::Walk { ends, samples, seed, s, t, n, output } => walk(ends, *samples, *seed, *s, *t, *n).map(|r| (r, output)),
        Command::Simulate { ends, n, replicas, seed, weights, hamming, budget, output } => {
            simulate(ends, n, *replicas, *seed, weights, hamming.clone(), *budget).map(|r| (r, output))
        }
        Command::Verify { output } => {
            let (r, ok) = verify();
            passed = ok;
            Ok((r, output))
        }
    };
    let result = outcome.and_then(|(report, output)| emit_report(&report, output.format, output.out.as_deref()));
    match result {
        Ok(()) if passed => EXIT_OK,
        Ok(()) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
