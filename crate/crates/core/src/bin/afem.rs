use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use afem::driver::{
    adapt_loop_with, format_summary, uniform_baseline_with, verify_lower_bound, write_final, AdaptConfig,
    IterationRecord, LowerBoundConfig, LOG_HEADER,
};
use afem::marking::{MarkConfig, Strategy};
use afem::mesh::read_mesh;
use afem::problem::{builtin, load_problem, ProblemDef};
use afem::Result;

/// Adaptive finite elements for elliptic eigenvalue problems.
#[derive(Parser)]
#[command(name = "afem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Adaptive loop.
    Run(RunArgs),
    /// Uniform refinement baseline.
    Uniform(RunArgs),
    /// Local lower-bound and oscillation diagnostics over adaptive levels.
    VerifyLowerBound(LowerArgs),
    /// Geometry summary of a problem's initial mesh or a mesh file.
    MeshInfo(InfoArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem file or builtin name (square, lshape, interface, interface:<alpha>).
    #[arg(long, default_value = "square")]
    problem: String,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    eig_index: Option<usize>,
    /// maximum, doerfler or equidistribution.
    #[arg(long)]
    mark: Option<Strategy>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 50_000)]
    max_dofs: usize,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long, default_value_t = 0.0)]
    tol: f64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Fill the wall_ms column (makes logs differ between runs).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct LowerArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Refine the whole mesh instead of the element patch.
    #[arg(long)]
    global: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InfoArgs {
    #[arg(long, default_value = "square")]
    problem: String,
    /// Mesh file in the ASCII mesh format; overrides --problem.
    #[arg(long)]
    mesh: Option<PathBuf>,
}

fn load(name: &str) -> Result<ProblemDef> {
    let path = Path::new(name);
    if path.is_file() {
        load_problem(path)
    } else {
        builtin(name)
    }
}

fn problem_and_marking(a: &ProblemArgs) -> Result<(ProblemDef, MarkConfig)> {
    let mut p = load(&a.problem)?;
    if let Some(d) = a.degree {
        p.degree = d;
    }
    if let Some(j) = a.eig_index {
        p.eig_index = j;
    }
    p.validate()?;
    let base = p.marking.unwrap_or_default();
    let marking = MarkConfig::new(a.mark.unwrap_or(base.strategy), a.theta.unwrap_or(base.theta))?;
    Ok((p, marking))
}

fn run(args: &RunArgs, uniform: bool) -> Result<()> {
    let (problem, marking) = problem_and_marking(&args.problem)?;
    let mut cfg = AdaptConfig::new(problem);
    cfg.marking = marking;
    cfg.stop.max_dofs = Some(args.max_dofs);
    cfg.stop.max_iters = Some(args.max_iters);
    cfg.stop.tol = Some(args.tol);
    cfg.solver.seed = args.problem.seed;
    cfg.record_timing = args.timing;
    cfg.validate()?;

    std::fs::create_dir_all(&args.out)?;
    let mut log = csv::WriterBuilder::new().has_headers(false).from_writer(File::create(args.out.join("log.csv"))?);
    log.write_record(LOG_HEADER.split(','))?;
    log.flush()?;
    let mut write_error = None;
    let mut stream = |r: &IterationRecord| {
        let res = log.serialize(r).and_then(|_| log.flush().map_err(csv::Error::from));
        if let Err(e) = res {
            write_error.get_or_insert(e);
        }
        eprintln!("k={:<3} dofs={:<7} lambda={:.10} eta={:.4e}", r.k, r.dofs, r.lambda, r.eta);
    };
    let result = if uniform { uniform_baseline_with(&cfg, &mut stream) } else { adapt_loop_with(&cfg, &mut stream) };
    drop(stream);
    if let Some(e) = write_error {
        return Err(e.into());
    }
    let run = result?;
    write_final(&run, &args.out)?;
    print!("{}", format_summary(&run));
    Ok(())
}

fn lower_bound(args: &LowerArgs) -> Result<()> {
    let (problem, marking) = problem_and_marking(&args.problem)?;
    let mut cfg = LowerBoundConfig::new(problem);
    cfg.marking = marking;
    cfg.levels = args.levels;
    cfg.top = args.top;
    cfg.global = args.global;
    cfg.solver.seed = args.problem.seed;
    let report = verify_lower_bound(&cfg)?;
    let mut text = String::from("level,dofs,lambda,element,eta,rhs,ratio,osc_ratio,mu\n");
    for l in &report.levels {
        for e in &l.elements {
            text.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                l.level, l.dofs, l.lambda, e.element, e.eta, e.rhs, e.ratio, e.osc_ratio, e.mu
            ));
        }
        println!(
            "level {} dofs {:>6}  ratio min {:.4} max {:.4}  osc ratio max {:.4}",
            l.level,
            l.dofs,
            l.min_ratio(),
            l.max_ratio(),
            l.max_osc_ratio()
        );
    }
    println!("max level-to-level growth {:.4}", report.max_growth());
    println!("oscillation ratio growth {:.4}", report.osc_growth());
    println!("all ratios finite {}", report.all_finite());
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("lower_bound.csv"), text)?;
    }
    Ok(())
}

fn mesh_info(args: &InfoArgs) -> Result<()> {
    let mesh = match &args.mesh {
        Some(path) => read_mesh(std::io::BufReader::new(File::open(path)?))?.0,
        None => load(&args.problem)?.mesh,
    };
    mesh.audit()?;
    let interior = mesh.sides().iter().filter(|s| !s.boundary).count();
    println!("vertices        {}", mesh.num_vertices());
    println!("elements        {}", mesh.num_elements());
    println!("sides           {} ({} interior)", mesh.sides().len(), interior);
    println!("area            {}", mesh.total_area());
    println!("hmax            {}", mesh.meshsize_max());
    println!("regularity      {}", mesh.regularity());
    println!("min angle (deg) {}", mesh.min_angle().to_degrees());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run(a) => run(a, false),
        Command::Uniform(a) => run(a, true),
        Command::VerifyLowerBound(a) => lower_bound(a),
        Command::MeshInfo(a) => mesh_info(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_solver_failure() { 2 } else { 1 })
        }
    }
}
