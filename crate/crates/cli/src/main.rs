use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use spantree_qubo::encoding::PenaltyWeights;
use spantree_qubo::oracle::{oracle_dcmst, oracle_kmst, oracle_leaves};
use spantree_qubo::solvers::MAX_STRUCTURED_VERTICES;
use spantree_qubo::{
    decode, export_qubo, parse_graph, solve_anneal, solve_exhaustive, solve_structured, AnnealSchedule, DcmstSpec,
    Graph, KmstSpec, LeafObjective, MlstSpec, Problem, QuboModel, Solution, TreeSolution, VariableLayout,
};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

/// Auto selection runs exhaustive search up to this many variables.
const AUTO_EXHAUSTIVE_VARS: usize = 22;

#[derive(Parser)]
#[command(
    name = "spantree-qubo",
    version,
    about = "QUBO models for constrained spanning tree problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the model in qbsolv format plus a JSON layout sidecar.
    Formulate {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Output file; the sidecar goes next to it as <stem>.layout.json.
        /// Without it the model is printed to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Minimize the model and decode the result.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve, then compare against a brute-force oracle.
    Verify {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Print variable and term counts.
    Stats {
        #[command(flatten)]
        problem: ProblemArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemKind {
    Kmst,
    Dcmst,
    Minleaf,
    Maxleaf,
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(value_enum)]
    kind: ProblemKind,
    /// Graph file: "n m" header, then "u v w" lines with 1-based vertices.
    graph: PathBuf,
    /// Tree size for kmst.
    #[arg(short)]
    k: Option<usize>,
    /// Degree bound for dcmst.
    #[arg(long)]
    delta: Option<usize>,
    /// Constraint penalty weight; defaults to a value large enough to make
    /// every violation cost more than any tree.
    #[arg(long)]
    lambda_a: Option<f64>,
    /// Objective weight.
    #[arg(long, default_value_t = 1.0)]
    lambda_b: f64,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum SolverKind {
    Auto,
    Exhaustive,
    Anneal,
    Structured,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = SolverKind::Auto)]
    solver: SolverKind,
    #[arg(long, default_value_t = AnnealSchedule::default().sweeps)]
    sweeps: usize,
    #[arg(long, default_value_t = AnnealSchedule::default().restarts)]
    restarts: usize,
    #[arg(long, default_value_t = AnnealSchedule::default().beta_initial)]
    beta_initial: f64,
    #[arg(long, default_value_t = AnnealSchedule::default().beta_final)]
    beta_final: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ProblemArgs {
    fn load(&self) -> Result<Problem> {
        let text = fs::read_to_string(&self.graph).with_context(|| format!("reading {}", self.graph.display()))?;
        let g = parse_graph(&text).with_context(|| format!("parsing {}", self.graph.display()))?;
        let weighted = matches!(self.kind, ProblemKind::Kmst | ProblemKind::Dcmst);
        let weights = match self.lambda_a {
            Some(a) => PenaltyWeights::new(a, self.lambda_b)?,
            None => PenaltyWeights::with_default_a(&g, self.lambda_b, weighted)?,
        };
        let problem = match self.kind {
            ProblemKind::Kmst => {
                let k = self.k.context("kmst needs -k")?;
                KmstSpec::with_weights(g, k, weights)?.into()
            }
            ProblemKind::Dcmst => {
                let delta = self.delta.context("dcmst needs --delta")?;
                DcmstSpec::with_weights(g, delta, weights)?.into()
            }
            ProblemKind::Minleaf => MlstSpec::with_weights(g, LeafObjective::Minimize, weights)?.into(),
            ProblemKind::Maxleaf => MlstSpec::with_weights(g, LeafObjective::Maximize, weights)?.into(),
        };
        Ok(problem)
    }
}

impl SolverArgs {
    fn schedule(&self) -> AnnealSchedule {
        AnnealSchedule {
            sweeps: self.sweeps,
            beta_initial: self.beta_initial,
            beta_final: self.beta_final,
            restarts: self.restarts,
            seed: self.seed,
        }
    }

    fn pick(&self, problem: &Problem, model: &QuboModel) -> SolverKind {
        match self.solver {
            SolverKind::Auto if model.num_vars() <= AUTO_EXHAUSTIVE_VARS => SolverKind::Exhaustive,
            SolverKind::Auto if problem.graph().n() <= MAX_STRUCTURED_VERTICES => SolverKind::Structured,
            SolverKind::Auto => SolverKind::Anneal,
            s => s,
        }
    }
}

fn sidecar_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    output.with_file_name(format!("{stem}.layout.json"))
}

fn formulate(args: &ProblemArgs, output: Option<&Path>) -> Result<ExitCode> {
    let problem = args.load()?;
    let (model, layout) = problem.build();
    let text = export_qubo(&model);
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            let sidecar = sidecar_path(path);
            fs::write(&sidecar, layout.to_sidecar_json(problem.name()))
                .with_context(|| format!("writing {}", sidecar.display()))?;
            println!(
                "wrote {} ({} variables) and {}",
                path.display(),
                model.num_vars(),
                sidecar.display()
            );
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

/// Runs the chosen solver. `None` means no feasible encoding exists.
fn run_solver(
    args: &SolverArgs,
    problem: &Problem,
    model: &QuboModel,
    layout: &VariableLayout,
) -> Result<(Option<(Solution, TreeSolution)>, &'static str)> {
    let kind = args.pick(problem, model);
    let (solution, name) = match kind {
        SolverKind::Exhaustive => (Some(solve_exhaustive(model)?), "exhaustive"),
        SolverKind::Anneal => (Some(solve_anneal(model, &args.schedule())?), "anneal"),
        SolverKind::Structured => (solve_structured(problem, layout, model)?, "structured"),
        SolverKind::Auto => unreachable!("resolved by pick"),
    };
    log::info!("solved with {name}");
    let decoded = match solution {
        Some(s) => {
            let tree = decode(problem, layout, &s.assignment)?;
            Some((s, tree))
        }
        None => None,
    };
    Ok((decoded, name))
}

/// Objective of a valid, slack-consistent solution.
fn feasible_objective(found: &Option<(Solution, TreeSolution)>) -> Option<f64> {
    match found {
        Some((_, tree)) if tree.valid && tree.slacks_consistent => tree.objective,
        _ => None,
    }
}

fn solve(problem_args: &ProblemArgs, solver_args: &SolverArgs) -> Result<ExitCode> {
    let problem = problem_args.load()?;
    let (model, layout) = problem.build();
    let (found, name) = run_solver(solver_args, &problem, &model, &layout)?;
    println!("solver {name}");
    let Some((solution, tree)) = &found else {
        println!("infeasible: no encoding of a feasible tree exists");
        return Ok(ExitCode::from(EXIT_INFEASIBLE));
    };
    println!("energy {}", solution.energy);
    print!("{tree}");
    if feasible_objective(&found).is_some() {
        return Ok(ExitCode::SUCCESS);
    }
    for v in &tree.violations {
        println!("violation {v}");
    }
    if name == "anneal" {
        println!("no valid tree found");
    } else {
        // with the default penalty every tree beats every invalid state
        println!("infeasible: ground state is not a valid tree");
    }
    Ok(ExitCode::from(EXIT_INFEASIBLE))
}

fn oracle_objective(problem: &Problem) -> Result<Option<f64>> {
    let g: &Graph = problem.graph();
    Ok(match problem {
        Problem::Kmst(s) => oracle_kmst(g, s.k())?,
        Problem::Dcmst(s) => oracle_dcmst(g, s.delta())?,
        Problem::Leaves(s) => Some(oracle_leaves(g, s.objective())? as f64),
    })
}

fn show(objective: Option<f64>) -> String {
    objective.map_or_else(|| "infeasible".to_string(), |o| o.to_string())
}

fn verify(problem_args: &ProblemArgs, solver_args: &SolverArgs) -> Result<ExitCode> {
    let problem = problem_args.load()?;
    let expected = oracle_objective(&problem)?;
    let (model, layout) = problem.build();
    let (found, name) = run_solver(solver_args, &problem, &model, &layout)?;
    let got = feasible_objective(&found);
    println!("solver {name}: {}", show(got));
    println!("oracle: {}", show(expected));
    let agree = match (got, expected) {
        (Some(a), Some(b)) => (a - b).abs() <= 1e-9 * b.abs().max(1.0),
        (None, None) => true,
        _ => false,
    };
    if agree {
        println!("PASS ({} = {})", show(got), show(expected));
        Ok(ExitCode::SUCCESS)
    } else {
        println!("FAIL ({} != {})", show(got), show(expected));
        Ok(ExitCode::from(EXIT_MISMATCH))
    }
}

fn stats(args: &ProblemArgs) -> Result<ExitCode> {
    let problem = args.load()?;
    let (model, _) = problem.build();
    let formula = problem.formula_variable_count();
    println!("variables {} (formula {formula})", model.num_vars());
    println!("linear terms {}", model.num_linear());
    println!("quadratic terms {}", model.num_quadratic());
    if model.num_vars() != formula {
        eprintln!("error: constructed variable count differs from the closed form");
        return Ok(ExitCode::from(EXIT_MISMATCH));
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Formulate { problem, output } => formulate(problem, output.as_deref()),
        Command::Solve { problem, solver } => solve(problem, solver),
        Command::Verify { problem, solver } => verify(problem, solver),
        Command::Stats { problem } => stats(problem),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with 2 on usage errors, which is reserved here for
    // infeasible results
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
