use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use scoreng::constraints::{assemble, ConstraintSet};
use scoreng::data::{generate_synthetic, load_dataset, write_dataset, Dataset, SynthOptions};
use scoreng::layout::build_index_map;
use scoreng::moments::{divergence, MomentSet};
use scoreng::problems::{
    solve_classic, solve_inweight, solve_penalized, solve_range, solve_regression, verify_weights,
    ProblemKind, ScorecardSolution,
};
use scoreng::report::{load_solution, write_report, write_solution};
use scoreng::RunConfig;

#[derive(Parser)]
#[command(name = "scoreng", version, about = "Scorecard development by divergence maximization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolveArgs {
    /// Run configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Applicant sample (CSV)
    #[arg(long)]
    data: PathBuf,
    /// Output directory for the report and solution file
    #[arg(long)]
    out: PathBuf,
    /// Override the configured problem kind
    #[arg(long)]
    problem: Option<String>,
    /// Override the classic/penalized scale target
    #[arg(long)]
    delta: Option<f64>,
    /// Override the ridge penalty
    #[arg(long)]
    lambda: Option<f64>,
    /// Override the range-engineering divergence floor
    #[arg(long)]
    div_floor: Option<f64>,
    /// Override the validation split keys (comma-separated)
    #[arg(long, value_delimiter = ',')]
    split_keys: Option<Vec<u32>>,
}

#[derive(Args)]
struct SynthArgs {
    /// Run configuration providing the layout (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of rows
    #[arg(long, default_value_t = 2000)]
    rows: usize,
    /// Class separation strength
    #[arg(long, default_value_t = 0.8)]
    separation: f64,
}

#[derive(Args)]
struct CheckArgs {
    /// Run configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Optional applicant sample to validate against the layout
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Args)]
struct KktArgs {
    /// Run configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Applicant sample the solution was developed on (CSV)
    #[arg(long)]
    data: PathBuf,
    /// Stored solution file to re-verify
    solution: PathBuf,
    /// Override the validation split keys (comma-separated)
    #[arg(long, value_delimiter = ',')]
    split_keys: Option<Vec<u32>>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured problem and write a report + solution file
    Solve(SolveArgs),
    /// Generate a synthetic applicant sample
    Synth(SynthArgs),
    /// Validate config (and optionally data); print constraint shapes
    Check(CheckArgs),
    /// Re-verify a stored solution's feasibility and scale identity
    Kkt(KktArgs),
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Check(args) => cmd_check(args),
        Command::Kkt(args) => cmd_kkt(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

struct Prepared {
    cfg: RunConfig,
    layout: scoreng::ScorecardLayout,
    dev: Dataset,
    val: Dataset,
    m_dev: MomentSet,
    cs: ConstraintSet,
}

fn prepare(cfg: RunConfig, data: &Path, split_override: Option<Vec<u32>>) -> Result<Prepared> {
    let layout = cfg.scorecard_layout()?;
    let ds = load_dataset(data, &layout)
        .with_context(|| format!("loading {}", data.display()))?;
    let keys = split_override.unwrap_or_else(|| cfg.split.validation_keys.clone());
    let (dev, val) = ds.split(&keys);
    let m_dev = dev.moments().context("development-sample moments")?;
    let cs = assemble(&cfg.engineering, &m_dev, &build_index_map(&layout))?;
    for w in &cs.warnings {
        log::warn!("{w}");
    }
    Ok(Prepared { cfg, layout, dev, val, m_dev, cs })
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let mut cfg = RunConfig::load(&args.config)
        .with_context(|| format!("loading {}", args.config.display()))?;
    if let Some(k) = &args.problem {
        cfg.problem.kind = k.clone();
        let _: ProblemKind = k.parse()?;
    }
    if let Some(v) = args.delta {
        cfg.problem.delta = Some(v);
    }
    if let Some(v) = args.lambda {
        cfg.problem.lambda = Some(v);
    }
    if let Some(v) = args.div_floor {
        cfg.problem.div_floor = Some(v);
    }

    let prep = prepare(cfg, &args.data, args.split_keys)?;
    let kind = prep.cfg.problem_kind()?;

    let mut sol = run_problem(kind, &prep)?;
    if !prep.val.split_keys.is_empty() {
        match prep.val.moments() {
            Ok(m_val) => sol.set_validation(&m_val)?,
            Err(e) => log::warn!("validation divergence unavailable: {e}"),
        }
    }

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let report_path = args.out.join("report.tsv");
    let sol_path = args.out.join(format!("solution_{kind}.txt"));
    write_report(&[&sol], &prep.layout, &report_path)?;
    write_solution(&sol, &sol_path)?;
    println!("problem {kind}");
    println!("development divergence {:.3}", sol.div_dev);
    if let Some(v) = sol.div_val {
        println!("validation divergence {v:.3}");
    }
    println!("report {}", report_path.display());
    println!("solution {}", sol_path.display());
    Ok(())
}

fn run_problem(kind: ProblemKind, prep: &Prepared) -> Result<ScorecardSolution> {
    let cfg = &prep.cfg;
    let m = &prep.m_dev;
    let sol = match kind {
        ProblemKind::Classic => {
            solve_classic(m, &prep.cs.without_inweights(), cfg.delta())?
        }
        ProblemKind::Penalized => {
            solve_penalized(m, &prep.cs.without_inweights(), cfg.delta(), cfg.lambda())?
        }
        ProblemKind::Inweight => {
            solve_inweight(m, &prep.cs, cfg.lambda(), Some(cfg.phi_bracket()))?
        }
        ProblemKind::Range => {
            let targets = cfg.range_targets(prep.layout.p())?;
            let floor = cfg
                .problem
                .div_floor
                .context("range problem requires div_floor")?;
            solve_range(m, &prep.cs, cfg.lambda(), &targets, floor, Some(cfg.phi_bracket()))?
        }
        ProblemKind::Regression => {
            let y = prep.dev.regression_response();
            solve_regression(&prep.dev.x.view(), &y, &prep.cs, cfg.lambda(), Some(m))?
        }
    };
    Ok(sol)
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let cfg = RunConfig::load(&args.config)?;
    let layout = cfg.scorecard_layout()?;
    let ds = generate_synthetic(
        &layout,
        &SynthOptions {
            n: args.rows,
            seed: args.seed,
            separation: args.separation,
            ..Default::default()
        },
    )?;
    write_dataset(&args.out, &ds, &layout)?;
    println!("wrote {} rows to {}", ds.n(), args.out.display());
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<()> {
    let cfg = RunConfig::load(&args.config)?;
    let layout = cfg.scorecard_layout()?;
    println!("config ok: schema_version {}, p = {}", cfg.schema_version, layout.p());

    // Constraint shapes do not depend on the sample, so a unit centering
    // vector stands in when no data is supplied.
    let m = match &args.data {
        Some(path) => {
            let ds = load_dataset(path, &layout)?;
            println!("data ok: {} rows", ds.n());
            ds.moments()?
        }
        None => placeholder_moments(layout.p()),
    };
    let cs = assemble(&cfg.engineering, &m, &build_index_map(&layout))?;
    for w in &cs.warnings {
        println!("warning: {w}");
    }
    println!("Ac {}x{}", cs.ac.nrows(), cs.ac.ncols());
    println!("Ap {}x{}", cs.ap.nrows(), cs.ap.ncols());
    println!("Ai {}x{}", cs.ai.nrows(), cs.ai.ncols());
    if cs.iw.len() > 0 {
        let vals: Vec<String> = cs.iw.iter().map(|v| format!("{v}")).collect();
        println!("IW ({})", vals.join(", "));
    }
    Ok(())
}

fn placeholder_moments(p: usize) -> MomentSet {
    use ndarray::{Array1, Array2};
    MomentSet {
        mg: Array1::from_elem(p, 0.5),
        mb: Array1::from_elem(p, 0.5),
        cg: Array2::eye(p),
        cb: Array2::eye(p),
        c: Array2::eye(p),
        d: Array1::zeros(p),
        e: Array1::ones(p),
        n_g: 0.0,
        n_b: 0.0,
    }
}

fn cmd_kkt(args: KktArgs) -> Result<()> {
    let cfg = RunConfig::load(&args.config)?;
    let stored = load_solution(&args.solution)?;
    let prep = prepare(cfg, &args.data, args.split_keys)?;
    if stored.s.len() != prep.layout.p() {
        bail!(
            "solution has {} weights, layout has {}",
            stored.s.len(),
            prep.layout.p()
        );
    }

    let mut failures = verify_weights(stored.kind, &stored.s, &prep.m_dev, &prep.cs);
    if stored.kind != ProblemKind::Regression || stored.div_dev != 0.0 {
        match divergence(&stored.s.view(), &prep.m_dev) {
            Ok(dv) => {
                if (dv - stored.div_dev).abs() > 1e-6 * stored.div_dev.abs().max(1.0) {
                    failures.push(format!(
                        "stored development divergence {} != recomputed {dv}",
                        stored.div_dev
                    ));
                }
            }
            Err(e) => failures.push(format!("divergence recomputation failed: {e}")),
        }
    }

    if failures.is_empty() {
        println!("ok: {} solution passes re-verification", stored.kind);
        Ok(())
    } else {
        for f in &failures {
            eprintln!("fail: {f}");
        }
        bail!("{} check(s) failed", failures.len())
    }
}
