//! `renyi-lab`: batch front-end for the Rényi-type continued fraction
//! toolkit. One subcommand per module operation family; CSV for tables,
//! JSON for nested reports; every artifact embeds the resolved config and
//! its hash. Exit codes: 0 success, 1 domain violation or failed check,
//! 2 malformed input.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use renyi_lab::cylinders::{bbl_conditional, cylinder};
use renyi_lab::expansion::{convergents, error_bound, expand, expand_f64};
use renyi_lab::interp::{DensityForm, GridDensity};
use renyi_lab::measures::rho_density;
use renyi_lab::natural_ext::{
    ext_invariance_check, ext_inverse, ext_iterate, ext_map, ext_measure_rect, ExtPoint,
};
use renyi_lab::rational::{parse_unit_rational, to_f64};
use renyi_lab::rscc::{
    chain_endpoints, gauss_kuzmin_experiment, simulate_chain, GkOptions, McOptions,
};
use renyi_lab::stats::ks_statistic;
use renyi_lab::suite::{run_panel, SuiteConfig};
use renyi_lab::transfer::{
    apply_l, apply_u, default_truncation, iterate_u, rate_estimate, u_infinity, DEFAULT_NODES,
    DEFAULT_QUAD_POINTS,
};
use renyi_lab::{Params, Rational};

use config::{parse_grid, resolve, resolve_opt, FileConfig};
use output::{write_csv, write_json, Meta};

#[derive(Parser)]
#[command(
    name = "renyi-lab",
    version,
    about = "Exact and numerical toolkit for Rényi-type backward continued fractions"
)]
struct Cli {
    /// TOML or JSON file with default option values; flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads (falls back to RENYI_LAB_THREADS, then all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the report to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Digits, convergents, and error bounds of one expansion
    Expand(ExpandArgs),
    /// Exact cylinder endpoints and Lebesgue measures
    Cylinder(CylinderArgs),
    /// Conditional probability of the tail given the past (exact)
    Bbl(BblArgs),
    /// Natural-extension tools: map, inverse, iterate, rectangle mass,
    /// Monte Carlo invariance
    Next(NextArgs),
    /// Transfer-operator tools: pointwise application, grid iteration,
    /// limit functional, geometric-rate fit
    Pf(PfArgs),
    /// The digit Markov chain: trajectories and endpoint ensembles
    Chain(ChainArgs),
    /// Gauss–Kuzmin experiment: operator route, Monte Carlo route, limit law
    Gk(GkArgs),
    /// Invariant verification panel; exit 0 iff every check passes
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Args)]
struct ExpandArgs {
    /// Parameter N ≥ 2
    #[arg(long)]
    n: Option<u32>,
    /// Point in [0,1]: "p/q", decimal, or integer
    #[arg(long)]
    x: String,
    /// Number of digits
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// exact: arbitrary-precision orbit; float: f64 orbit
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Args)]
struct CylinderArgs {
    #[arg(long)]
    n: Option<u32>,
    /// Comma-separated digit block, e.g. "4,2"
    #[arg(long, conflicts_with = "enumerate_len")]
    block: Option<String>,
    /// Enumerate all blocks of this length with digits ≤ --max-digit
    #[arg(long)]
    enumerate_len: Option<usize>,
    #[arg(long)]
    max_digit: Option<u64>,
}

#[derive(Args)]
struct BblArgs {
    #[arg(long)]
    n: Option<u32>,
    /// Reversed-expansion state s in [0,1] (rational or decimal)
    #[arg(long)]
    s: String,
    /// Threshold x in [0,1] (rational or decimal)
    #[arg(long)]
    x: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum NextOp {
    Map,
    Inverse,
    Iterate,
    Rect,
    Invariance,
}

#[derive(Args)]
struct NextArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_enum)]
    op: NextOp,
    #[arg(long, default_value_t = 0.0)]
    x: f64,
    #[arg(long, default_value_t = 0.0)]
    y: f64,
    /// Signed iterate count for --op iterate
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    steps: i64,
    /// Rectangle corner for --op rect / invariance
    #[arg(long, default_value_t = 1.0)]
    rect_x: f64,
    #[arg(long, default_value_t = 1.0)]
    rect_y: f64,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PfOp {
    ApplyU,
    ApplyL,
    Iterate,
    Limit,
    Rate,
}

#[derive(Args)]
struct PfArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_enum)]
    op: PfOp,
    /// "uniform", "rho", or a CSV file of (x, h) samples
    #[arg(long)]
    density: Option<String>,
    #[arg(long)]
    nodes: Option<usize>,
    /// Branch-sum truncation M
    #[arg(long)]
    trunc: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Evaluation point for apply-u / apply-l
    #[arg(long, default_value_t = 0.5)]
    x: f64,
    #[arg(long)]
    quad_points: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ChainArgs {
    #[arg(long)]
    n: Option<u32>,
    /// Start state t in [0,1]
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long)]
    steps: Option<usize>,
    /// 1 = single trajectory; > 1 = ensemble of endpoints
    #[arg(long)]
    paths: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct GkArgs {
    #[arg(long)]
    n: Option<u32>,
    /// "uniform", "rho", or a CSV file of (x, h) samples
    #[arg(long)]
    density: Option<String>,
    #[arg(long)]
    n_max: Option<usize>,
    /// start:end:count, e.g. 0.1:0.9:9
    #[arg(long)]
    x_grid: Option<String>,
    /// Monte Carlo orbits per step; 0 disables the second route
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    trunc: Option<u64>,
    /// Flag a route-mismatch fault beyond this many standard errors
    #[arg(long)]
    route_sigmas: Option<f64>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Comma-separated list of N values
    #[arg(long, default_value = "2,3,5,10")]
    n_list: String,
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Self-test hook: force every check to fail
    #[arg(long, default_value_t = false)]
    inject_fault: bool,
}

/// Exit 2 for unparseable input, exit 1 for everything else that fails.
enum Failure {
    Malformed(anyhow::Error),
    Runtime(anyhow::Error),
}

type CmdResult = std::result::Result<ExitCode, Failure>;

fn malformed(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Malformed(e.into())
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn lib_err(e: renyi_lab::Error) -> Failure {
    match e {
        renyi_lab::Error::ParseNumber(_) => Failure::Malformed(e.into()),
        _ => Failure::Runtime(e.into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Malformed(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    let file_config = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(malformed)?,
        None => FileConfig::default(),
    };

    let threads = cli
        .threads
        .or(file_config.threads)
        .or_else(|| std::env::var("RENYI_LAB_THREADS").ok()?.parse().ok());
    if let Some(t) = threads {
        // ignore the error when a pool already exists (tests call run twice)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }

    let output = cli.output.clone().or(file_config.output.clone());
    match cli.command {
        Command::Expand(args) => cmd_expand(args, &file_config, output),
        Command::Cylinder(args) => cmd_cylinder(args, &file_config, output),
        Command::Bbl(args) => cmd_bbl(args, &file_config, output),
        Command::Next(args) => cmd_next(args, &file_config, output),
        Command::Pf(args) => cmd_pf(args, &file_config, output),
        Command::Chain(args) => cmd_chain(args, &file_config, output),
        Command::Gk(args) => cmd_gk(args, &file_config, output),
        Command::Suite(args) => cmd_suite(args, &file_config, output),
    }
}

fn params_from(n_flag: Option<u32>, cfg: &FileConfig) -> std::result::Result<Params, Failure> {
    let n = resolve(n_flag, cfg.n, 2);
    Params::new(n).map_err(lib_err)
}

fn cmd_expand(args: ExpandArgs, cfg: &FileConfig, output: Option<PathBuf>) -> CmdResult {
    let params = params_from(args.n, cfg)?;
    let mode = args
        .mode
        .map(|m| matches!(m, Mode::Exact))
        .unwrap_or_else(|| !matches!(cfg.mode.as_deref(), Some("float")));

    #[derive(Serialize)]
    struct Resolved<'a> {
        command: &'static str,
        n: u32,
        x: &'a str,
        count: usize,
        mode: &'static str,
    }
    let meta = Meta::new(&Resolved {
        command: "expand",
        n: params.n(),
        x: &args.x,
        count: args.count,
        mode: if mode { "exact" } else { "float" },
    })
    .map_err(runtime)?;

    let expansion = if mode {
        let x = parse_unit_rational(&args.x).map_err(lib_err)?;
        expand(&params, &x, args.count).map_err(lib_err)?
    } else {
        let x: f64 = args
            .x
            .parse()
            .or_else(|_| parse_unit_rational(&args.x).map(|r| to_f64(&r)))
            .map_err(|_| malformed(anyhow!("cannot parse --x {:?}", args.x)))?;
        expand_f64(&params, x, args.count).map_err(lib_err)?
    };
    if expansion.truncated {
        eprintln!(
            "note: orbit reached 1; expansion truncated at {} digits",
            expansion.digits.len()
        );
    }

    let convs = convergents(&params, &expansion.digits).map_err(lib_err)?;
    let rows = (1..convs.len()).map(|k| {
        let bound = error_bound(&params, &convs[k], &convs[k - 1]).unwrap();
        vec![
            k.to_string(),
            expansion.digits[k - 1].to_string(),
            convs[k].p.to_string(),
            convs[k].q.to_string(),
            format!("{}/{}", convs[k].p, convs[k].q),
            bound.to_string(),
        ]
    });
    write_csv(
        output.as_ref(),
        &meta,
        &["k", "digit", "p", "q", "convergent", "error_bound"],
        rows,
    )
    .map_err(runtime)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_block(spec: &str) -> std::result::Result<Vec<u64>, Failure> {
    spec.split(',')
        .map(|d| d.trim().parse::<u64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| malformed(anyhow!("cannot parse --block {spec:?}")))
}

fn cmd_cylinder(args: CylinderArgs, cfg: &FileConfig, output: Option<PathBuf>) -> CmdResult {
    let params = params_from(args.n, cfg)?;

    let blocks: Vec<Vec<u64>> = if let Some(spec) = &args.block {
        vec![parse_block(spec)?]
    } else if let Some(len) = args.enumerate_len {
        let max_digit = args.max_digit.unwrap_or(params.n_u64() + 3);
        if max_digit < params.n_u64() || len == 0 || len > 6 {
            return Err(runtime(anyhow!(
                "--enumerate-len must be 1..=6 with --max-digit ≥ N"
            )));
        }
        let digits: Vec<u64> = (params.n_u64()..=max_digit).collect();
        let mut blocks: Vec<Vec<u64>> = digits.iter().map(|&d| vec![d]).collect();
        for _ in 1..len {
            blocks = blocks
                .into_iter()
                .flat_map(|b| {
                    digits.iter().map(move |&d| {
                        let mut child = b.clone();
                        child.push(d);
                        child
                    })
                })
                .collect();
        }
        blocks
    } else {
        return Err(malformed(anyhow!("need --block or --enumerate-len")));
    };

    #[derive(Serialize)]
    struct Resolved {
        command: &'static str,
        n: u32,
        blocks: usize,
    }
    let meta = Meta::new(&Resolved {
        command: "cylinder",
        n: params.n(),
        blocks: blocks.len(),
    })
    .map_err(runtime)?;

    let mut rows = Vec::with_capacity(blocks.len());
    for block in &blocks {
        let c = cylinder(&params, block).map_err(lib_err)?;
        let label = block
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        rows.push(vec![
            label,
            c.left.to_string(),
            c.right.to_string(),
            c.measure().to_string(),
        ]);
    }
    write_csv(
        output.as_ref(),
        &meta,
        &["block", "left", "right", "measure"],
        rows.into_iter(),
    )
    .map_err(runtime)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bbl(args: BblArgs, cfg: &FileConfig, output: Option<PathBuf>) -> CmdResult {
    let params = params_from(args.n, cfg)?;
    let s = parse_unit_rational(&args.s).map_err(lib_err)?;
    let x = parse_unit_rational(&args.x).map_err(lib_err)?;
    let exact: Rational = bbl_conditional(&params, &s, &x);

    #[derive(Serialize)]
    struct Resolved<'a> {
        command: &'static str,
        n: u32,
        s: &'a str,
        x: &'a str,
    }
    let meta = Meta::new(&Resolved {
        command: "bbl",
        n: params.n(),
        s: &args.s,
        x: &args.x,
    })
    .map_err(runtime)?;

    write_csv(
        output.as_ref(),
        &meta,
        &["s", "x", "probability", "probability_f64"],
        std::iter::once(vec![
            s.to_string(),
            x.to_string(),
            exact.to_string(),
            format!("{}", to_f64(&exact)),
        ]),
    )
    .map_err(runtime)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_next(args: NextArgs, cfg: &FileConfig, output: Option<PathBuf>) -> CmdResult {
    let params = params_from(args.n, cfg)?;
    let seed = resolve(args.seed, cfg.seed, 1);
    let samples = resolve(args.samples, cfg.samples, 1_000_000);

    #[derive(Serialize)]
    struct Resolved {
        command: &'static str,
        n: u32,
        op: &'static str,
        x: f64,
        y: f64,
        steps: i64,
        rect: (f64, f64),
        samples: u64,
        seed: u64,
    }
    let op_name = match args.op {
        NextOp::Map => "map",
        NextOp::Inverse => "inverse",
        NextOp::Iterate => "iterate",
        NextOp::Rect => "rect",
        NextOp::Invariance => "invariance",
    };
    let meta = Meta::new(&Resolved {
        command: "next",
        n: params.n(),
        op: op_name,
        x: args.x,
        y: args.y,
        steps: args.steps,
        rect: (args.rect_x, args.rect_y),
        samples,
        seed,
    })
    .map_err(runtime)?;

    match args.op {
        NextOp::Map | NextOp::Inverse | NextOp::Iterate => {
            let pt = ExtPoint::new(args.x, args.y).map_err(lib_err)?;
            let result = match args.op {
                NextOp::Map => ext_map(&params, pt),
                NextOp::Inverse => ext_inverse(&params, pt),
                _ => ext_iterate(&params, pt, args.steps),
            }
            .map_err(lib_err)?;
            write_json(output.as_ref(), &meta, &result).map_err(runtime)?;
        }
        NextOp::Rect => {
            #[derive(Serialize)]
            struct RectMass {
                rect: (f64, f64),
                mass: f64,
            }
            let result = RectMass {
                rect: (args.rect_x, args.rect_y),
                mass: ext_measure_rect(&params, args.rect_x, args.rect_y),
            };
            write_json(output.as_ref(), &meta, &result).map_err(runtime)?;
        }
        NextOp::Invariance => {
            let report = ext_invariance_check(&params, (args.rect_x, args.rect_y), samples, seed)
                .map_err(lib_err)?;
            write_json(output.as_ref(), &meta, &report).map_err(runtime)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// "uniform", "rho", or a CSV/(x,h) table; always normalized h-form.
fn load_density(
    spec: &str,
    params: &Params,
    nodes: usize,
) -> std::result::Result<GridDensity, Failure> {
    match spec {
        "uniform" => Ok(GridDensity::uniform()),
        "rho" => Ok(GridDensity::chebyshev(nodes, DensityForm::Lebesgue, |x| {
            rho_density(params, x)
        })),
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read density table {path}"))
                .map_err(malformed)?;
            let mut xs = Vec::new();
            let mut hs = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let mut cols = line.split(',');
                let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
                    continue;
                };
                let (Ok(x), Ok(h)) = (a.trim().parse::<f64>(), b.trim().parse::<f64>()) else {
                    continue; // header row
                };
                xs.push(x);
                hs.push(h);
            }
            let g =
                GridDensity::piecewise_linear(xs, hs, DensityForm::Lebesgue).map_err(lib_err)?;
            g.normalized().map_err(lib_err)
        }
    }
}

fn cmd_pf(args: PfArgs, cfg: &FileConfig, output: Option<PathBuf>) -> CmdResult {
    let params = params_from(args.n, cfg)?;
    let nodes = resolve(args.nodes, cfg.nodes, DEFAULT_NODES);
    let trunc = resolve(args.trunc, cfg.truncation, default_truncation(&params));
    let steps = resolve(args.steps, cfg.steps, 10);
    let quad = resolve(args.quad_points, cfg.quad_points, DEFAULT_QUAD_POINTS);
    let density_spec = resolve_opt(args.density.clone(), cfg.density.clone())
        .unwrap_or_else(|| "uniform".to_string());
    let h = load_density(&density_spec, &params, nodes)?;
    // operator-grid resample of the h-form input
    let h_grid = GridDensity::chebyshev(nodes, DensityForm::Lebesgue, |x| h.eval(x));
    let f_grid = h_grid.to_invariant_form(&params).map_err(lib_err)?;

    #[derive(Serialize)]
    struct Resolved<'a> {
        command: &'static str,
        n: u32,
        op: &'static str,
        density: &'a str,
        nodes: usize,
        truncation: u64,
        steps: usize,
        quad_points: usize,
        x: f64,
    }
    let op_name = match args.op {
        PfOp::ApplyU => "apply-u",
        PfOp::ApplyL => "apply-l",
        PfOp::Iterate => "iterate",
        PfOp::Limit => "limit",
        PfOp::Rate => "rate",
    };
    let meta = Meta::new(&Resolved {
        command: "pf",
        n: params.n(),
        op: op_name,
        density: &density_spec,
        nodes,
        truncation: trunc,
        steps,
        quad_points: quad,
        x: args.x,
    })
    .map_err(runtime)?;

    match args.op {
        PfOp::ApplyU | PfOp::ApplyL => {
            #[derive(Serialize)]
            struct Pointwise {
                x: f64,
                value: f64,
            }
            let value = match args.op {
                PfOp::ApplyU => apply_u(&params, &f_grid, args.x, trunc),
                _ => apply_l(&params, &h_grid, args.x, trunc),
            }
            .map_err(lib_err)?;
            write_json(output.as_ref(), &meta, &Pointwise { x: args.x, value }).map_err(runtime)?;
        }
        PfOp::Iterate => {
            let result = iterate_u(&params, &f_grid, steps, trunc).map_err(lib_err)?;
            let snapshot: Vec<(f64, f64)> = result
                .nodes()
                .iter()
                .copied()
                .zip(result.values().iter().copied())
                .collect();
            write_json(output.as_ref(), &meta, &snapshot).map_err(runtime)?;
        }
        PfOp::Limit => {
            #[derive(Serialize)]
            struct Limit {
                value: f64,
            }
            let value = u_infinity(&params, &f_grid, quad).map_err(lib_err)?;
            write_json(output.as_ref(), &meta, &Limit { value }).map_err(runtime)?;
        }
        PfOp::Rate => {
            let report = rate_estimate(&params, &f_grid, steps.max(5), trunc).map_err(lib_err)?;
            eprintln!(
                "rate fit: q_hat = {:.6}, k_hat = {:.6}, window = {:?}{}",
                report.q_hat,
                report.k_hat,
                report.fit_window,
                if report.exact_convergence {
                    " (exact convergence)"
                } else {
                    ""
                }
            );
            let rows = report
                .norms
                .iter()
                .enumerate()
                .map(|(i, e)| vec![(i + 1).to_string(), format!("{e:e}")]);
            write_csv(output.as_ref(), &meta, &["n", "norm"], rows).map_err(runtime)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_chain(args: ChainArgs, cfg: &FileConfig, output: Option<PathBuf>) -> CmdResult {
    let params = params_from(args.n, cfg)?;
    let steps = resolve(args.steps, cfg.steps, 50);
    let paths = resolve(args.paths, cfg.paths, 1);
    let seed = resolve(args.seed, cfg.seed, 1);

    #[derive(Serialize)]
    struct Resolved {
        command: &'static str,
        n: u32,
        t: f64,
        steps: usize,
        paths: u64,
        seed: u64,
    }
    let meta = Meta::new(&Resolved {
        command: "chain",
        n: params.n(),
        t: args.t,
        steps,
        paths,
        seed,
    })
    .map_err(runtime)?;

    if paths <= 1 {
        let trajectory = simulate_chain(&params, args.t, steps, seed).map_err(lib_err)?;
        match args.format {
            Format::Json => write_json(output.as_ref(), &meta, &trajectory).map_err(runtime)?,
            Format::Csv => {
                let rows = trajectory
                    .iter()
                    .map(|st| vec![st.step.to_string(), format!("{}", st.s)]);
                write_csv(output.as_ref(), &meta, &["step", "s"], rows).map_err(runtime)?;
            }
        }
    } else {
        let endpoints = chain_endpoints(&params, args.t, steps, paths, seed).map_err(lib_err)?;
        let ks = ks_statistic(&endpoints, |x| renyi_lab::measures::rho_cdf(&params, x));
        eprintln!("KS distance of s_{steps} ensemble to the invariant CDF: {ks:.5}");
        let rows = endpoints
            .iter()
            .enumerate()
            .map(|(i, s)| vec![i.to_string(), format!("{s}")]);
        write_csv(output.as_ref(), &meta, &["path", "s_final"], rows).map_err(runtime)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gk(args: GkArgs, cfg: &FileConfig, output: Option<PathBuf>) -> CmdResult {
    let params = params_from(args.n, cfg)?;
    let n_max = resolve(args.n_max, cfg.n_max, 12);
    let nodes = resolve(args.nodes, cfg.nodes, DEFAULT_NODES);
    let seed = resolve(args.seed, cfg.seed, 1);
    let mc_samples = resolve(args.mc_samples, cfg.samples, 0);
    let grid_spec = resolve_opt(args.x_grid.clone(), cfg.x_grid.clone())
        .unwrap_or_else(|| "0.1:0.9:9".to_string());
    let x_grid = parse_grid(&grid_spec).map_err(malformed)?;
    let route_sigmas = resolve(args.route_sigmas, cfg.route_sigmas, 4.0);
    let density_spec = resolve_opt(args.density.clone(), cfg.density.clone())
        .unwrap_or_else(|| "uniform".to_string());
    let h = load_density(&density_spec, &params, nodes)?;

    let options = GkOptions {
        nodes,
        truncation: resolve_opt(args.trunc, cfg.truncation),
        mc: (mc_samples > 0).then_some(McOptions {
            samples: mc_samples,
            seed,
        }),
        ..GkOptions::default()
    };

    #[derive(Serialize)]
    struct Resolved<'a> {
        command: &'static str,
        n: u32,
        density: &'a str,
        n_max: usize,
        x_grid: &'a str,
        mc_samples: u64,
        seed: u64,
        nodes: usize,
        truncation: Option<u64>,
        route_sigmas: f64,
    }
    let meta = Meta::new(&Resolved {
        command: "gk",
        n: params.n(),
        density: &density_spec,
        n_max,
        x_grid: &grid_spec,
        mc_samples,
        seed,
        nodes,
        truncation: options.truncation,
        route_sigmas,
    })
    .map_err(runtime)?;

    let run = gauss_kuzmin_experiment(&params, &h, n_max, &x_grid, &options).map_err(lib_err)?;

    let fmt_opt = |v: Option<f64>| v.map(|v| format!("{v}")).unwrap_or_default();
    let rows = run.reports.iter().flat_map(|report| {
        report.rows.iter().map(|row| {
            vec![
                report.n.to_string(),
                format!("{}", row.x),
                format!("{}", row.mu_operator),
                fmt_opt(row.mu_monte_carlo),
                format!("{}", row.limit),
                format!("{:e}", row.abs_err_operator),
                fmt_opt(row.abs_err_monte_carlo),
            ]
        })
    });
    write_csv(
        output.as_ref(),
        &meta,
        &[
            "n",
            "x",
            "mu_operator",
            "mu_montecarlo",
            "limit",
            "abs_err_op",
            "abs_err_mc",
        ],
        rows,
    )
    .map_err(runtime)?;

    match run.fit_rate() {
        Some((q, k)) => eprintln!("sup-error geometric fit: q_hat = {q:.6}, k_hat = {k:.6}"),
        None => eprintln!("sup-error already at the accuracy floor; no rate fit"),
    }
    if let Some(fault) = run.route_fault(route_sigmas) {
        return Err(runtime(anyhow!(fault)));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_suite(args: SuiteArgs, cfg: &FileConfig, output: Option<PathBuf>) -> CmdResult {
    let n_list: Vec<u32> = args
        .n_list
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| malformed(anyhow!("cannot parse --n-list {:?}", args.n_list)))?;
    let config = SuiteConfig {
        blocks: resolve(args.blocks, None, 100),
        max_block_len: resolve(args.max_len, None, 20),
        seed: resolve(args.seed, cfg.seed, SuiteConfig::default().seed),
        inject_fault: args.inject_fault,
    };

    #[derive(Serialize)]
    struct Resolved<'a> {
        command: &'static str,
        n_list: &'a [u32],
        #[serde(flatten)]
        config: SuiteConfig,
    }
    let meta = Meta::new(&Resolved {
        command: "suite",
        n_list: &n_list,
        config,
    })
    .map_err(runtime)?;

    let mut rows = Vec::new();
    let mut failures = 0usize;
    for &n in &n_list {
        let params = Params::new(n).map_err(lib_err)?;
        let results = run_panel(&params, &config).map_err(lib_err)?;
        for r in results {
            if !r.passed {
                failures += 1;
            }
            rows.push(vec![
                r.name.to_string(),
                r.n.to_string(),
                if r.passed { "pass" } else { "FAIL" }.to_string(),
                format!("{:e}", r.measured),
                format!("{:e}", r.tolerance),
                r.cases.to_string(),
            ]);
        }
    }
    let total = rows.len();
    write_csv(
        output.as_ref(),
        &meta,
        &["check", "n", "status", "measured", "tolerance", "cases"],
        rows.into_iter(),
    )
    .map_err(runtime)?;
    eprintln!("suite: {}/{} checks passed", total - failures, total);
    if failures > 0 {
        return Err(runtime(anyhow!("{failures} of {total} checks failed")));
    }
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
