//! Command-line front door for relaxed projection experiments: instance
//! generation, iteration runs with CSV traces, SVG figures, boundedness
//! certificates, regularity reports, Kaczmarz solves, and fixed-point
//! analysis of cyclic compositions.

use clap::{Parser, Subcommand, ValueEnum};
use relaxproj::{
    blocks_to_affine, bound_certificate_with_guard, compose, fixed_points, gaussian_instance,
    iterate, kappa_star_with_guard, linear_rate, project_onto_fix, solve, tol, AffineSubspace,
    BlockSystem, BoundCertificate, KappaMethod, LambdaRule, LinearSubspace, RelaxedProjector,
    Schedule, ScheduleKind, SubcollectionKappa, Vector,
};
use relaxproj_cli::{figure, instance, output, CliError, Result};
use std::fmt;
use std::path::PathBuf;
use std::thread;

#[derive(Parser)]
#[command(
    name = "relaxproj",
    version,
    about = "Relaxed projections onto finite collections of affine subspaces",
    long_about = "Generate instances, run relaxed projection iterations with deterministic \
                  schedules, render trajectory figures, and compute boundedness certificates \
                  and regularity constants.\n\nExit codes: 0 success, 2 configuration or input \
                  error, 3 numerical anomaly (non-finite values), 4 subcollection guard exceeded."
)]
struct Cli {
    /// Seed for instance generation and randomized schedules
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    seed: u64,
    /// Output directory (default: $RELAXPROJ_OUT or the working directory)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Write every iterate coordinate to trace CSVs instead of the first two
    #[arg(long, global = true)]
    full_vectors: bool,
    /// Raise the subcollection enumeration guard (default 8); lattice reports
    /// cost roughly four times more per extra subspace, so large overrides can
    /// run for hours
    #[arg(long, global = true, value_name = "N")]
    guard_override: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance: unit-norm Gaussian rows, Gaussian right-hand side
    Gen {
        /// Number of equations (hyperplanes)
        #[arg(long, value_name = "P")]
        rows: usize,
        /// Number of unknowns (ambient dimension)
        #[arg(long, value_name = "Q")]
        cols: usize,
        /// File name inside the output directory
        #[arg(long, default_value = "instance.txt", value_name = "NAME")]
        name: String,
    },
    /// Run projection iterations over a (lambda, schedule) grid, one CSV per run
    Run {
        /// Instance file to load
        #[arg(long, value_name = "FILE")]
        instance: Option<PathBuf>,
        /// Generate a Gaussian instance with this many equations instead
        #[arg(long, value_name = "P", requires = "cols", conflicts_with = "instance")]
        rows: Option<usize>,
        /// Ambient dimension of the generated instance
        #[arg(long, value_name = "Q", requires = "rows", conflicts_with = "instance")]
        cols: Option<usize>,
        /// Relaxation parameters, repeatable or comma-separated
        #[arg(
            long = "lambda",
            value_name = "L",
            value_delimiter = ',',
            default_values_t = [0.5, 1.0, 1.5]
        )]
        lambdas: Vec<f64>,
        /// Index schedules to run; "varying" redraws the parameter uniformly
        /// from [0, L] at every step
        #[arg(
            long = "schedule",
            value_name = "KIND",
            value_delimiter = ',',
            default_values_t = [SchedKind::Random, SchedKind::Cyclic]
        )]
        schedules: Vec<SchedKind>,
        /// Number of iteration steps
        #[arg(long, default_value_t = 3000, value_name = "N")]
        steps: usize,
        /// Starting point as comma-separated coordinates (default: the origin)
        #[arg(long, value_name = "COORDS")]
        x0: Option<String>,
        /// For cyclic runs, also write the orbit of the full composition to
        /// <trace>_cycle.csv
        #[arg(long)]
        highlight: bool,
        /// Compute a boundedness certificate per lambda after the runs
        #[arg(long)]
        bound: bool,
        /// Sample count per regularity estimate when --bound is set
        #[arg(long, default_value_t = 200, value_name = "N")]
        samples: usize,
    },
    /// Render trace CSVs as a multi-panel SVG of the first two coordinates
    Figure {
        /// Trace files, one panel each; a sibling <stem>_cycle.csv overlays
        /// its points as markers
        #[arg(required = true, value_name = "TRACE_CSV")]
        traces: Vec<PathBuf>,
        /// File name inside the output directory
        #[arg(long, default_value = "figure.svg", value_name = "NAME")]
        name: String,
    },
    /// Compute the boundedness certificate C for an instance and parameter
    Bound {
        /// Instance file
        #[arg(value_name = "FILE")]
        instance: PathBuf,
        /// Relaxation parameter in (0, 2)
        #[arg(long, value_name = "L")]
        lambda: f64,
        /// Sample count per regularity estimate
        #[arg(long, default_value_t = 200, value_name = "N")]
        samples: usize,
    },
    /// Estimate regularity constants for an instance, with a per-pair ledger
    Kappa {
        /// Instance file (omit with --sweep)
        #[arg(value_name = "FILE", required_unless_present = "sweep")]
        instance: Option<PathBuf>,
        /// Ignore the instance and sweep two plane lines over closing angles
        #[arg(long)]
        sweep: bool,
        /// Sample count per estimate
        #[arg(long, default_value_t = 200, value_name = "N")]
        samples: usize,
    },
    /// Solve a linear system by block Kaczmarz projections
    Kaczmarz {
        /// Instance file holding the system M x = b
        #[arg(value_name = "FILE")]
        instance: PathBuf,
        /// Rows per block, consecutive (1 = one hyperplane per equation)
        #[arg(long, default_value_t = 1, value_name = "S")]
        block_size: usize,
        /// Relaxation parameter
        #[arg(long, default_value_t = 1.0, value_name = "L")]
        lambda: f64,
        /// Block selection schedule
        #[arg(long, default_value_t = SchedKind::Cyclic, value_name = "KIND")]
        schedule: SchedKind,
        /// Number of iteration steps
        #[arg(long, default_value_t = 10_000, value_name = "N")]
        steps: usize,
        /// Starting point as comma-separated coordinates (default: the origin)
        #[arg(long, value_name = "COORDS")]
        x0: Option<String>,
        /// Sample count per regularity estimate for the certificate
        #[arg(long, default_value_t = 200, value_name = "N")]
        samples: usize,
    },
    /// Analyze the cyclic composition: fixed-point set and convergence rate
    Fixpoint {
        /// Instance file
        #[arg(value_name = "FILE")]
        instance: PathBuf,
        /// Relaxation parameter in (0, 2)
        #[arg(long, default_value_t = 1.0, value_name = "L")]
        lambda: f64,
        /// Number of full compositions for rate measurement
        #[arg(long, default_value_t = 200, value_name = "N")]
        steps: usize,
        /// Starting point as comma-separated coordinates (default: the origin)
        #[arg(long, value_name = "COORDS")]
        x0: Option<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
enum SchedKind {
    Random,
    Cyclic,
    Varying,
}

impl fmt::Display for SchedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SchedKind::Random => "random",
            SchedKind::Cyclic => "cyclic",
            SchedKind::Varying => "varying",
        };
        f.write_str(name)
    }
}

/// Global settings shared by every subcommand.
struct Ctx {
    seed: u64,
    out_dir: PathBuf,
    full_vectors: bool,
    guard: usize,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let out_dir = cli
        .out
        .or_else(|| std::env::var_os("RELAXPROJ_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out_dir.display())))?;
    let ctx = Ctx {
        seed: cli.seed,
        out_dir,
        full_vectors: cli.full_vectors,
        guard: cli.guard_override.unwrap_or(tol::SUBCOLLECTION_GUARD),
    };
    match cli.command {
        Cmd::Gen { rows, cols, name } => cmd_gen(&ctx, rows, cols, &name),
        Cmd::Run {
            instance,
            rows,
            cols,
            lambdas,
            schedules,
            steps,
            x0,
            highlight,
            bound,
            samples,
        } => cmd_run(
            &ctx, instance, rows, cols, &lambdas, &schedules, steps, x0.as_deref(), highlight,
            bound, samples,
        ),
        Cmd::Figure { traces, name } => cmd_figure(&ctx, &traces, &name),
        Cmd::Bound { instance, lambda, samples } => cmd_bound(&ctx, &instance, lambda, samples),
        Cmd::Kappa { instance, sweep, samples } => cmd_kappa(&ctx, instance, sweep, samples),
        Cmd::Kaczmarz { instance, block_size, lambda, schedule, steps, x0, samples } => {
            cmd_kaczmarz(
                &ctx, &instance, block_size, lambda, schedule, steps, x0.as_deref(), samples,
            )
        }
        Cmd::Fixpoint { instance, lambda, steps, x0 } => {
            cmd_fixpoint(&ctx, &instance, lambda, steps, x0.as_deref())
        }
    }
}

fn parse_x0(spec: Option<&str>, d: usize) -> Result<Vector> {
    let Some(s) = spec else {
        return Ok(Vector::zeros(d));
    };
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .map_err(|_| CliError::Config(format!("--x0: '{t}' is not a number")))
        })
        .collect::<Result<_>>()?;
    if vals.len() != d {
        return Err(CliError::Config(format!(
            "--x0 has {} coordinates, the instance lives in dimension {d}",
            vals.len()
        )));
    }
    Ok(Vector::from_vec(vals))
}

fn directions_of(collection: &[AffineSubspace]) -> Vec<LinearSubspace> {
    collection.iter().map(|a| a.direction().clone()).collect()
}

fn cmd_gen(ctx: &Ctx, rows: usize, cols: usize, name: &str) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(CliError::Config(
            "gen needs at least one row and one column".to_string(),
        ));
    }
    let (m, b) = gaussian_instance(rows, cols, ctx.seed);
    let comments = vec![
        "normalized gaussian instance".to_string(),
        format!("rows: {rows}  cols: {cols}  seed: {}", ctx.seed),
        "format: one equation per line, \"coefficients | rhs\"".to_string(),
    ];
    let path = ctx.out_dir.join(name);
    output::write_file(&path, &instance::render(&m, &b, &comments))?;
    println!("wrote {} ({rows} equations, dimension {cols})", path.display());
    Ok(())
}

struct RunSpec {
    run_idx: usize,
    lambda: f64,
    kind: SchedKind,
}

fn build_schedule(
    kind: SchedKind,
    lambda: f64,
    seed: u64,
    run_idx: usize,
    steps: usize,
) -> Result<Schedule> {
    let schedule_seed = seed.wrapping_add(1 + run_idx as u64);
    Ok(match kind {
        SchedKind::Random => Schedule::random(schedule_seed, lambda)?,
        SchedKind::Cyclic => Schedule::cyclic(lambda)?,
        SchedKind::Varying => Schedule::new(
            ScheduleKind::RandomUniform { seed: schedule_seed },
            LambdaRule::varying_uniform(lambda, steps, schedule_seed)?,
        ),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    ctx: &Ctx,
    inst_path: Option<PathBuf>,
    rows: Option<usize>,
    cols: Option<usize>,
    lambdas: &[f64],
    schedules: &[SchedKind],
    steps: usize,
    x0_spec: Option<&str>,
    highlight: bool,
    bound: bool,
    samples: usize,
) -> Result<()> {
    let (inst, label) = match (inst_path, rows, cols) {
        (Some(p), _, _) => {
            let inst = instance::read(&p)?;
            (inst, p.display().to_string())
        }
        (None, Some(p), Some(q)) => {
            if p == 0 || q == 0 {
                return Err(CliError::Config("--rows and --cols must be positive".to_string()));
            }
            let (m, b) = gaussian_instance(p, q, ctx.seed);
            (instance::Instance { matrix: m, rhs: b }, format!("gaussian {p}x{q} seed {}", ctx.seed))
        }
        _ => {
            return Err(CliError::Config(
                "run needs either --instance FILE or --rows P --cols Q".to_string(),
            ))
        }
    };
    let collection = inst.hyperplanes()?;
    let (ell, d) = (collection.len(), inst.cols());
    let x0 = parse_x0(x0_spec, d)?;
    if lambdas.is_empty() || schedules.is_empty() {
        return Err(CliError::Config("run needs at least one lambda and one schedule".to_string()));
    }
    println!("instance: {label} ({ell} equations, dimension {d})");

    let specs: Vec<RunSpec> = lambdas
        .iter()
        .flat_map(|&lambda| schedules.iter().map(move |&kind| (lambda, kind)))
        .enumerate()
        .map(|(run_idx, (lambda, kind))| RunSpec { run_idx, lambda, kind })
        .collect();

    let summaries: Vec<Result<String>> = thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .map(|spec| {
                let collection = &collection;
                let x0 = &x0;
                scope.spawn(move || run_one(ctx, collection, x0, spec, steps, highlight))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join().unwrap_or_else(|_| {
                    Err(CliError::Anomaly("iteration worker panicked".to_string()))
                })
            })
            .collect()
    });
    for summary in summaries {
        println!("{}", summary?);
    }

    if bound {
        let mut oracle = SubcollectionKappa::new(directions_of(&collection), samples, ctx.seed)?;
        for &lambda in lambdas {
            let cert = bound_certificate_with_guard(
                &collection,
                lambda,
                |idx| oracle.kappa_star(idx),
                ctx.guard,
            )?;
            println!(
                "certificate lambda={lambda}: C = {:.6e}, guarantee sup|x_n| <= |x_0| + {:.6e}",
                cert.constant,
                lambda * cert.constant
            );
        }
    }
    Ok(())
}

fn run_one(
    ctx: &Ctx,
    collection: &[AffineSubspace],
    x0: &Vector,
    spec: &RunSpec,
    steps: usize,
    highlight: bool,
) -> Result<String> {
    let schedule = build_schedule(spec.kind, spec.lambda, ctx.seed, spec.run_idx, steps)?;
    let trace = iterate(collection, &schedule, x0, steps)?;
    let stem = format!("trace_{}_{}", spec.kind, spec.lambda);
    let path = ctx.out_dir.join(format!("{stem}.csv"));
    output::write_file(&path, &output::trace_csv(&trace, ctx.full_vectors)?)?;
    let mut note = String::new();
    if highlight && spec.kind == SchedKind::Cyclic {
        let cycle_path = ctx.out_dir.join(format!("{stem}_cycle.csv"));
        let csv = output::cycle_csv(&trace, collection.len(), ctx.full_vectors)?;
        output::write_file(&cycle_path, &csv)?;
        note = format!(" (+ {stem}_cycle.csv)");
    }
    Ok(format!(
        "run {}: schedule={} lambda={} steps={steps} sup|x_n|={:.4e} final|x|={:.4e} -> {}{note}",
        spec.run_idx,
        spec.kind,
        spec.lambda,
        trace.sup_norm,
        trace.norms[trace.norms.len() - 1],
        path.display()
    ))
}

fn cmd_figure(ctx: &Ctx, traces: &[PathBuf], name: &str) -> Result<()> {
    let mut panels = Vec::with_capacity(traces.len());
    for t in traces {
        let path_points = figure::read_points(t)?;
        let stem = t.file_stem().and_then(|s| s.to_str()).unwrap_or("trace").to_string();
        let sibling = t.with_file_name(format!("{stem}_cycle.csv"));
        let overlay = if sibling.is_file() { figure::read_points(&sibling)? } else { Vec::new() };
        panels.push(figure::Panel { title: stem, path: path_points, overlay });
    }
    let path = ctx.out_dir.join(name);
    output::write_file(&path, &figure::render(&panels))?;
    println!("wrote {} ({} panels)", path.display(), panels.len());
    Ok(())
}

fn print_certificate(cert: &BoundCertificate) {
    println!("  subspaces   {}", cert.ell);
    println!("  lambda      {}", cert.lambda);
    println!("  tau         {:.6e}   (largest translation norm)", cert.tau);
    println!("  D           {:.6e}   (largest proper-subcollection constant)", cert.d_const);
    match cert.kappa_star {
        Some(k) => println!("  kappa_star  {k:.6e}"),
        None => println!("  kappa_star  -              (single subspace)"),
    }
    println!("  C           {:.6e}", cert.constant);
    println!(
        "  guarantee   sup|x_n| <= |x_0| + {:.6e} for every schedule with parameters in (0, {}]",
        cert.lambda * cert.constant,
        cert.lambda
    );
    println!("subcollection ledger:");
    println!("  {:<16} {:>14} {:>14}", "indices", "kappa_star", "constant");
    for entry in &cert.ledger {
        let ks = entry
            .kappa_star
            .map_or_else(|| "-".to_string(), |k| format!("{k:.6e}"));
        println!("  {:<16} {ks:>14} {:>14.6e}", format!("{:?}", entry.indices), entry.constant);
    }
}

fn cmd_bound(ctx: &Ctx, inst_path: &PathBuf, lambda: f64, samples: usize) -> Result<()> {
    let inst = instance::read(inst_path)?;
    let collection = inst.hyperplanes()?;
    let mut oracle = SubcollectionKappa::new(directions_of(&collection), samples, ctx.seed)?;
    let cert = bound_certificate_with_guard(
        &collection,
        lambda,
        |idx| oracle.kappa_star(idx),
        ctx.guard,
    )?;
    println!("boundedness certificate for {}", inst_path.display());
    print_certificate(&cert);
    let json = serde_json::to_string_pretty(&cert)
        .map_err(|e| CliError::Config(format!("cannot serialize certificate: {e}")))?;
    let path = ctx.out_dir.join("bound.json");
    output::write_file(&path, &json)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_kappa(ctx: &Ctx, inst_path: Option<PathBuf>, sweep: bool, samples: usize) -> Result<()> {
    if sweep {
        println!("two lines in the plane, closing angle theta:");
        println!("  {:<8} {:>14}", "theta", "kappa");
        for (label, theta) in [
            ("pi/2", std::f64::consts::FRAC_PI_2),
            ("pi/4", std::f64::consts::FRAC_PI_4),
            ("pi/8", std::f64::consts::PI / 8.0),
            ("pi/16", std::f64::consts::PI / 16.0),
        ] {
            let e1 = Vector::from_vec(vec![1.0, 0.0]);
            let dir = Vector::from_vec(vec![theta.cos(), theta.sin()]);
            let lines = vec![
                LinearSubspace::span(2, &[e1], tol::RANK_REL)?,
                LinearSubspace::span(2, &[dir], tol::RANK_REL)?,
            ];
            let report = relaxproj::estimate_kappa(&lines, samples, ctx.seed)?;
            println!("  {label:<8} {:>14.6e}", report.kappa);
        }
        return Ok(());
    }
    let inst_path = inst_path
        .ok_or_else(|| CliError::Config("kappa needs an instance file or --sweep".to_string()))?;
    let inst = instance::read(&inst_path)?;
    let collection = inst.hyperplanes()?;
    let directions = directions_of(&collection);
    let report = kappa_star_with_guard(&directions, samples, ctx.seed, ctx.guard)?;
    let method = match report.method {
        KappaMethod::Empirical => "empirical",
        KappaMethod::PairClosedForm => "pair closed form",
    };
    println!("regularity report for {} ({} subspaces)", inst_path.display(), directions.len());
    println!("  kappa          {:.6e}", report.kappa);
    println!("  kappa_star     {:.6e}", report.kappa_star);
    println!("  method         {method}");
    println!("  samples        {}", report.samples_checked);
    println!("  max violation  {:.3e}  (nonpositive means the constant held)", report.max_violation);

    let mut oracle = SubcollectionKappa::new(directions.clone(), samples, ctx.seed)?;
    let mut pairs = Vec::new();
    println!("pair ledger:");
    for i in 0..directions.len() {
        for j in (i + 1)..directions.len() {
            let k = oracle.kappa_star(&[i, j])?;
            println!("  ({i},{j})  {k:.6e}");
            pairs.push(serde_json::json!({ "indices": [i, j], "kappa_star": k }));
        }
    }
    let report_json = serde_json::to_value(&report)
        .map_err(|e| CliError::Config(format!("cannot serialize report: {e}")))?;
    let doc = serde_json::json!({ "report": report_json, "pairs": pairs });
    let path = ctx.out_dir.join("kappa.json");
    output::write_file(&path, &serde_json::to_string_pretty(&doc).unwrap_or_default())?;
    println!("wrote {}", path.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_kaczmarz(
    ctx: &Ctx,
    inst_path: &PathBuf,
    block_size: usize,
    lambda: f64,
    kind: SchedKind,
    steps: usize,
    x0_spec: Option<&str>,
    samples: usize,
) -> Result<()> {
    if block_size == 0 {
        return Err(CliError::Config("--block-size must be positive".to_string()));
    }
    let inst = instance::read(inst_path)?;
    let (p, q) = (inst.rows(), inst.cols());
    let system = if block_size == 1 {
        BlockSystem::singleton_blocks(inst.matrix.clone(), inst.rhs.clone())?
    } else {
        let blocks: Vec<Vec<usize>> =
            (0..p).collect::<Vec<_>>().chunks(block_size).map(<[usize]>::to_vec).collect();
        BlockSystem::new(inst.matrix.clone(), inst.rhs.clone(), blocks)?
    };
    let n_blocks = system.blocks().len();
    let x0 = parse_x0(x0_spec, q)?;
    let schedule = build_schedule(kind, lambda, ctx.seed, 0, steps)?;
    let report = solve(&system, &schedule, &x0, steps)?;

    let trace_path = ctx.out_dir.join("kaczmarz.csv");
    output::write_file(&trace_path, &output::trace_csv(&report.trace, ctx.full_vectors)?)?;
    let residual_path = ctx.out_dir.join("kaczmarz_residuals.csv");
    output::write_file(
        &residual_path,
        &output::residuals_csv(&report.residuals, &report.lsq_distance)?,
    )?;

    let final_residual = *report.residuals.last().unwrap_or(&f64::NAN);
    let final_distance = *report.lsq_distance.last().unwrap_or(&f64::NAN);
    println!("system: {p} equations, {q} unknowns, {n_blocks} blocks (size <= {block_size})");
    println!(
        "consistent: {} (least-squares residual {:.6e})",
        report.consistent, report.lsq_residual
    );
    println!("final residual |Mx - b| = {final_residual:.6e}");
    println!("sup |x_n| = {:.6e}", report.trace.sup_norm);
    println!("final distance to the least-squares solution = {final_distance:.6e}");
    println!("wrote {} and {}", trace_path.display(), residual_path.display());

    if n_blocks <= ctx.guard {
        let collection = blocks_to_affine(&system)?;
        let mut oracle = SubcollectionKappa::new(directions_of(&collection), samples, ctx.seed)?;
        match bound_certificate_with_guard(&collection, lambda, |idx| oracle.kappa_star(idx), ctx.guard)
        {
            Ok(cert) => println!(
                "certificate: C = {:.6e}, guarantee sup|x_n| <= |x_0| + {:.6e}",
                cert.constant,
                lambda * cert.constant
            ),
            Err(e) => println!("certificate unavailable: {e}"),
        }
    } else {
        println!(
            "certificate: skipped ({n_blocks} blocks exceed the subcollection guard of {}; \
             raise with --guard-override)",
            ctx.guard
        );
    }
    Ok(())
}

fn cmd_fixpoint(
    ctx: &Ctx,
    inst_path: &PathBuf,
    lambda: f64,
    steps: usize,
    x0_spec: Option<&str>,
) -> Result<()> {
    let inst = instance::read(inst_path)?;
    let collection = inst.hyperplanes()?;
    let d = inst.cols();
    let x0 = parse_x0(x0_spec, d)?;
    let projectors: Vec<RelaxedProjector> = collection
        .iter()
        .map(|a| RelaxedProjector::new(a.clone(), lambda))
        .collect::<relaxproj::Result<_>>()?;
    let q_map = compose(&projectors)?;
    let fps = fixed_points(&q_map, tol::CONSISTENCY_REL)?;
    println!(
        "cyclic composition over {} hyperplanes, lambda = {lambda}",
        collection.len()
    );
    println!(
        "fixed-point set: dimension {}, consistent: {} (solve residual {:.3e})",
        fps.directions.dim(),
        fps.consistent,
        fps.residual
    );
    if !fps.consistent {
        println!(
            "warning: the fixed-point system is inconsistent at tolerance; reporting the \
             least-squares point without a rate"
        );
    }
    let x_star = if fps.consistent { project_onto_fix(&fps, &x0)? } else { fps.particular.clone() };
    let shown = if ctx.full_vectors { d } else { d.min(4) };
    let coords: Vec<String> = (0..shown).map(|j| format!("{:.6e}", x_star[j])).collect();
    let suffix = if shown < d { ", ..." } else { "" };
    println!("nearest fixed point to x0: [{}{suffix}]", coords.join(", "));

    let mut rate_json = serde_json::Value::Null;
    let mut final_residual_json = serde_json::Value::Null;
    if fps.consistent {
        let (rate, residuals) = linear_rate(&q_map, &x0, &x_star, steps)?;
        let final_residual = *residuals.last().unwrap_or(&f64::NAN);
        println!(
            "measured rate over {steps} compositions: {rate:.6} (final residual {final_residual:.3e})"
        );
        rate_json = serde_json::json!(rate);
        final_residual_json = serde_json::json!(final_residual);
    }
    let doc = serde_json::json!({
        "subspaces": collection.len(),
        "lambda": lambda,
        "consistent": fps.consistent,
        "solve_residual": fps.residual,
        "fix_dimension": fps.directions.dim(),
        "x_star": x_star.iter().cloned().collect::<Vec<f64>>(),
        "rate": rate_json,
        "final_residual": final_residual_json,
    });
    let path = ctx.out_dir.join("fixpoint.json");
    output::write_file(&path, &serde_json::to_string_pretty(&doc).unwrap_or_default())?;
    println!("wrote {}", path.display());
    Ok(())
}
