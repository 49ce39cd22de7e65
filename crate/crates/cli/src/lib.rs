//! The `starmax` command line.
//!
//! Every command prints one report: `{"command", "inputs", "result",
//! "checks"}` as JSON (default), CSV or plain text. Exit status is 0 on
//! success, 1 on a domain error or a failed check, 2 on a usage error.

use std::io::{Read, Write};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use starmax_core::classc::{
    c1_check, c1_free_value, c2_check, j_boundary_check, j_eval, membership_scan,
    weighted_power_sum,
};
use starmax_core::graphons::random_step_graphon;
use starmax_core::scalar::parse_rational;
use starmax_core::search::brute_force_max_capped;
use starmax_core::thresholds::{asymptote_check, crossover, AsymptoteRow, ASYMPTOTE_CSV_HEADER};
use starmax_core::{
    alpha_constant, extremal_witness, f_bound, is_good, max_over_threshold, quasi_complete,
    quasi_star, star_bound, CornerKind, CountReport, ExtremalKind, FunctionOracle, Objective,
    Rational, Scalar, StepGraphon, ThresholdGraph,
};

mod render;
mod reproduce;

pub use render::{Check, Report};

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "STARMAX_THREADS";

type Res<T> = Result<T, Box<dyn std::error::Error + Send + Sync>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    Float,
    Rational,
}

#[derive(Debug, Parser)]
#[command(
    name = "starmax",
    version,
    about = "Star counts, star densities and their extremal bounds"
)]
struct Cli {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Seed for randomized commands.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Worker threads for searches and scans (default: all cores, or $STARMAX_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Arithmetic for graphon and bound commands.
    #[arg(long, value_enum, default_value_t = Precision::Float, global = true)]
    precision: Precision,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Star bound max(γ^((k+1)/2), η + (1-η)η^k).
    Bound { k: u32, gamma: String },
    /// Clique/anticlique bound for a function: power:k, pwl:x,y;..., smooth:w:x,y;... or counterexample.
    Fbound { function: String, gamma: String },
    /// Star count and degree moment of quasi-complete, quasi-star, witness or creation:<i/d string>.
    Count {
        construction: String,
        n: usize,
        m: usize,
        k: usize,
    },
    /// Maximize over threshold graphs with n vertices and m edges.
    Search {
        n: usize,
        m: usize,
        k: usize,
        #[arg(long, default_value = "star-count")]
        objective: Objective,
        /// Enumerate every labeled graph instead (tiny n only).
        #[arg(long)]
        brute_force: bool,
        /// Vertex cap for --brute-force (at most 8).
        #[arg(long, default_value_t = 7)]
        cap: usize,
        /// Include wall-clock time in the result.
        #[arg(long)]
        timing: bool,
    },
    /// Step graphon operations; graphons are JSON {"alpha": [...], "beta": [[...]]} (or a report
    /// holding one), given inline, as `@file`, or as `-` for stdin.
    Graphon {
        #[command(subcommand)]
        action: GraphonAction,
    },
    /// Checks of the constrained-triple conditions and related inequalities.
    Classc {
        #[command(subcommand)]
        action: ClasscAction,
    },
    /// Crossover densities: a single k, a range a..b (inclusive) or a list a,b,c.
    GammaK {
        ks: String,
        #[arg(long, default_value_t = 1e-15)]
        tol: f64,
    },
    /// The constant α with α/2 + e^(-α) = 1.
    Alpha {
        #[arg(long, default_value_t = 1e-15)]
        tol: f64,
    },
    /// Recompute the reference values and compare with the expected ones.
    Reproduce,
}

#[derive(Debug, Subcommand)]
enum GraphonAction {
    /// Degrees, densities and optionally a functional.
    Eval {
        graphon: String,
        /// Star densities for k = 1..=max-k.
        #[arg(long, default_value_t = 4)]
        max_k: u32,
        #[arg(long)]
        function: Option<String>,
    },
    /// Whether the function is good for the graphon.
    Good {
        graphon: String,
        function: String,
    },
    Complement {
        graphon: String,
    },
    Corner {
        graphon: String,
        lambda: String,
        #[arg(long, value_enum, default_value_t = Kind::Zero)]
        kind: Kind,
    },
    Extremal {
        #[arg(value_enum)]
        kind: Extremal,
        gamma: String,
    },
    LShaped {
        y: String,
        z: String,
    },
    /// Random graphon with the given number of parts and density (uses --seed; float only).
    Random {
        parts: usize,
        gamma: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Zero,
    One,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Extremal {
    Clique,
    Anticlique,
}

#[derive(Debug, Subcommand)]
enum ClasscAction {
    /// Grid scan of both conditions.
    Scan {
        function: String,
        #[arg(long, default_value_t = 100)]
        grid: usize,
    },
    C1 {
        function: String,
        y: f64,
        b: f64,
    },
    C2 {
        function: String,
        a: f64,
        y: f64,
    },
    /// The first condition's expression at an unconstrained triple.
    C1Free {
        function: String,
        a: f64,
        y: f64,
        b: f64,
    },
    /// Σ (m+1-i)(3i-m) x^i, exactly.
    PowerSum {
        m: u32,
        x: String,
        #[arg(long)]
        force: bool,
    },
    /// J(t) = t F(t + z) + z F(t), z = (γ - t²)/(2t).
    Jeval {
        function: String,
        gamma: String,
        t: String,
    },
    /// Whether J on [η, √γ] peaks at an endpoint.
    Jcheck {
        function: String,
        gamma: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

/// Parse `argv` (including the program name), run the command, and write
/// the report to `out`. Returns the process exit status.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let threads = cli
        .threads
        .or_else(|| std::env::var(THREADS_ENV).ok()?.parse().ok());
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    let outcome = pool
        .install(|| execute(&cli).map_err(|e| e.to_string()))
        .and_then(|r| {
            Ok((
                r.render(cli.format).map_err(|e| e.to_string())?,
                r.all_pass(),
            ))
        });
    match outcome {
        Ok((text, pass)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return 1;
            }
            if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn execute(cli: &Cli) -> Res<Report> {
    let precision = match cli.precision {
        Precision::Float => "float",
        Precision::Rational => "rational",
    };
    let with_mode = |mut v: Value| {
        v["precision"] = json!(precision);
        v
    };
    match &cli.command {
        Command::Bound { k, gamma } => {
            let result = match cli.precision {
                Precision::Float => star_bound(*k, f64::parse(gamma)?)?.to_json(),
                Precision::Rational => star_bound(*k, Rational::parse(gamma)?)?.to_json(),
            };
            Ok(Report::new(
                "bound",
                with_mode(json!({"k": k, "gamma": gamma})),
                result,
            ))
        }
        Command::Fbound { function, gamma } => {
            let f = parse_function(function)?;
            let result = match cli.precision {
                Precision::Float => f_bound(&f, f64::parse(gamma)?)?.to_json(),
                Precision::Rational => f_bound(&f, Rational::parse(gamma)?)?.to_json(),
            };
            Ok(Report::new(
                "fbound",
                with_mode(json!({"function": function, "gamma": gamma})),
                result,
            ))
        }
        Command::Count {
            construction,
            n,
            m,
            k,
        } => {
            let g = build_graph(construction, *n, *m)?;
            let mut result = serde_json::to_value(CountReport::new(&g, *k))?;
            result["creation"] = json!(g.to_string());
            result["degrees"] = json!(g.degree_slice());
            Ok(Report::new(
                "count",
                json!({"construction": construction, "n": n, "m": m, "k": k}),
                result,
            ))
        }
        Command::Search {
            n,
            m,
            k,
            objective,
            brute_force,
            cap,
            timing,
        } => {
            let inputs = json!({
                "n": n, "m": m, "k": k, "objective": objective.to_string(), "brute_force": brute_force,
            });
            let result = if *brute_force {
                serde_json::to_value(brute_force_max_capped(*n, *m, *k, *objective, *cap)?)?
            } else {
                let mut v = serde_json::to_value(max_over_threshold(*n, *m, *k, *objective)?)?;
                if !timing {
                    if let Some(o) = v.as_object_mut() {
                        o.remove("elapsed_ms");
                    }
                }
                v
            };
            Ok(Report::new("search", inputs, result))
        }
        Command::Graphon { action } => match cli.precision {
            Precision::Float => graphon::<f64>(action, cli.seed),
            Precision::Rational => graphon::<Rational>(action, cli.seed),
        }
        .map(|mut r| {
            r.inputs = with_mode(r.inputs);
            r
        }),
        Command::Classc { action } => classc(action, cli.precision).map(|mut r| {
            r.inputs = with_mode(r.inputs);
            r
        }),
        Command::GammaK { ks, tol } => gamma_k(ks, *tol),
        Command::Alpha { tol } => {
            let a = alpha_constant(*tol)?;
            Ok(Report::new(
                "alpha",
                json!({"tol": tol}),
                json!({"alpha": a, "alpha_sq": a * a, "residual": a / 2.0 + (-a).exp() - 1.0}),
            ))
        }
        Command::Reproduce => Ok(reproduce::reproduce()),
    }
}

fn parse_function(s: &str) -> Res<FunctionOracle> {
    Ok(FunctionOracle::from_str(s)?)
}

fn build_graph(construction: &str, n: usize, m: usize) -> Res<ThresholdGraph> {
    let g = match construction {
        "quasi-complete" => quasi_complete(n, m)?,
        "quasi-star" => quasi_star(n, m)?,
        "witness" => extremal_witness(),
        other => match other.strip_prefix("creation:") {
            Some(code) => ThresholdGraph::parse(n, code)?,
            None => {
                return Err(format!(
                    "unknown construction {other:?}; expected quasi-complete, quasi-star, witness or creation:<i/d string>"
                )
                .into())
            }
        },
    };
    if g.n() != n || g.m() != m {
        return Err(format!(
            "{construction} has n = {}, m = {}, not n = {n}, m = {m}",
            g.n(),
            g.m()
        )
        .into());
    }
    Ok(g)
}

fn read_graphon<T: Scalar>(arg: &str) -> Res<StepGraphon<T>> {
    let text = if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path)?
    } else {
        arg.to_string()
    };
    let v: Value = serde_json::from_str(&text)?;
    // A whole report from another graphon command is accepted too.
    let v = match v.get("result") {
        Some(r) if v.get("command").is_some() => r.clone(),
        _ => v,
    };
    Ok(StepGraphon::from_json(&v)?)
}

fn graphon<T: Scalar>(action: &GraphonAction, seed: u64) -> Res<Report> {
    let report = match action {
        GraphonAction::Eval {
            graphon,
            max_k,
            function,
        } => {
            let w = read_graphon::<T>(graphon)?;
            let stars: Vec<Value> = (1..=*max_k).map(|k| w.star_density(k).to_json()).collect();
            let mut result = json!({
                "graphon": w.to_json(),
                "degrees": w.degrees().iter().map(Scalar::to_json).collect::<Vec<_>>(),
                "edge_density": w.edge_density().to_json(),
                "star_densities": stars,
            });
            if let Some(f) = function {
                result["f_functional"] = w.f_functional(&parse_function(f)?)?.to_json();
            }
            Report::new(
                "graphon eval",
                json!({"graphon": graphon, "max_k": max_k, "function": function}),
                result,
            )
        }
        GraphonAction::Good { graphon, function } => {
            let w = read_graphon::<T>(graphon)?;
            let f = parse_function(function)?;
            let g = is_good(&f, &w)?;
            let bound = f_bound(&f, w.edge_density())?;
            Report::new(
                "graphon good",
                json!({"graphon": graphon, "function": function}),
                json!({
                    "holds": g.holds,
                    "slack": g.slack.to_json(),
                    "bound": bound.to_json(),
                    "functional": w.f_functional(&f)?.to_json(),
                }),
            )
        }
        GraphonAction::Complement { graphon } => {
            let w = read_graphon::<T>(graphon)?;
            Report::new(
                "graphon complement",
                json!({"graphon": graphon}),
                w.complement().to_json(),
            )
        }
        GraphonAction::Corner {
            graphon,
            lambda,
            kind,
        } => {
            let w = read_graphon::<T>(graphon)?;
            let k = match kind {
                Kind::Zero => CornerKind::Zero,
                Kind::One => CornerKind::One,
            };
            let c = w.corner(T::parse(lambda)?, k)?;
            Report::new(
                "graphon corner",
                json!({"graphon": graphon, "lambda": lambda, "kind": format!("{kind:?}").to_lowercase()}),
                c.to_json(),
            )
        }
        GraphonAction::Extremal { kind, gamma } => {
            let k = match kind {
                Extremal::Clique => ExtremalKind::Clique,
                Extremal::Anticlique => ExtremalKind::Anticlique,
            };
            let w = StepGraphon::extremal(k, T::parse(gamma)?)?;
            Report::new(
                "graphon extremal",
                json!({"kind": format!("{kind:?}").to_lowercase(), "gamma": gamma}),
                w.to_json(),
            )
        }
        GraphonAction::LShaped { y, z } => {
            let w = StepGraphon::l_shaped(T::parse(y)?, T::parse(z)?)?;
            Report::new("graphon l-shaped", json!({"y": y, "z": z}), w.to_json())
        }
        GraphonAction::Random { parts, gamma } => {
            let w = random_step_graphon(*parts, *gamma, seed)?;
            Report::new(
                "graphon random",
                json!({"parts": parts, "gamma": gamma, "seed": seed}),
                w.to_json(),
            )
        }
    };
    Ok(report)
}

fn classc(action: &ClasscAction, precision: Precision) -> Res<Report> {
    let report = match action {
        ClasscAction::Scan { function, grid } => {
            let r = membership_scan(&parse_function(function)?, *grid)?;
            let mut v = serde_json::to_value(&r)?;
            v["verdict_text"] = json!(r.verdict.to_string());
            Report::new(
                "classc scan",
                json!({"function": function, "grid": grid}),
                v,
            )
        }
        ClasscAction::C1 { function, y, b } => Report::new(
            "classc c1",
            json!({"function": function, "y": y, "b": b}),
            serde_json::to_value(c1_check(&parse_function(function)?, *y, *b)?)?,
        ),
        ClasscAction::C2 { function, a, y } => Report::new(
            "classc c2",
            json!({"function": function, "a": a, "y": y}),
            serde_json::to_value(c2_check(&parse_function(function)?, *a, *y)?)?,
        ),
        ClasscAction::C1Free { function, a, y, b } => Report::new(
            "classc c1-free",
            json!({"function": function, "a": a, "y": y, "b": b}),
            json!({"value": c1_free_value(&parse_function(function)?, *a, *y, *b)?}),
        ),
        ClasscAction::PowerSum { m, x, force } => {
            let v = weighted_power_sum(*m, &parse_rational(x)?, *force)?;
            Report::new(
                "classc power-sum",
                json!({"m": m, "x": x, "force": force}),
                json!({"value": v.to_json(), "nonnegative": v >= Rational::from_i64(0)}),
            )
        }
        ClasscAction::Jeval { function, gamma, t } => {
            let f = parse_function(function)?;
            let value = match precision {
                Precision::Float => j_eval(&f, f64::parse(gamma)?, f64::parse(t)?)?.to_json(),
                Precision::Rational => {
                    j_eval(&f, Rational::parse(gamma)?, Rational::parse(t)?)?.to_json()
                }
            };
            Report::new(
                "classc jeval",
                json!({"function": function, "gamma": gamma, "t": t}),
                json!({"value": value}),
            )
        }
        ClasscAction::Jcheck {
            function,
            gamma,
            samples,
        } => Report::new(
            "classc jcheck",
            json!({"function": function, "gamma": gamma, "samples": samples}),
            serde_json::to_value(j_boundary_check(
                &parse_function(function)?,
                *gamma,
                *samples,
            )?)?,
        ),
    };
    Ok(report)
}

/// `"7"`, `"2..12"` (inclusive) or `"50,100,200"`.
fn parse_k_list(s: &str) -> Res<Vec<u32>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u32, u32) = (a.trim().parse()?, b.trim().parse()?);
        if a > b {
            return Err(format!("empty range {s:?}").into());
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| Ok(p.trim().parse()?))
        .collect()
}

fn gamma_k(ks: &str, tol: f64) -> Res<Report> {
    let list = parse_k_list(ks)?;
    let rows: Vec<AsymptoteRow> = asymptote_check(&list)?;
    let mut full = Vec::with_capacity(list.len());
    for r in &rows {
        let c = crossover(r.k, tol)?;
        let mut v = serde_json::to_value(c)?;
        v["k2_one_minus_gamma"] = json!(r.k2_one_minus_gamma);
        v["deviation_from_alpha_sq"] = json!(r.deviation_from_alpha_sq);
        full.push(v);
    }
    let result = if full.len() == 1 {
        full.pop().unwrap_or(Value::Null)
    } else {
        json!({ "rows": full })
    };
    let mut report = Report::new("gamma-k", json!({"ks": ks, "tol": tol}), result);
    report.table = Some((
        ASYMPTOTE_CSV_HEADER.iter().map(|h| h.to_string()).collect(),
        rows.iter().map(|r| r.csv_record().to_vec()).collect(),
    ));
    Ok(report)
}
