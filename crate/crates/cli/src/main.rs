use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use genplan::encoding::{decode, pairs_to_text, parse_pairs, validate_solution, ClauseTag};
use genplan::features::{generate_pool, FeaturePool, Vocabulary};
use genplan::pipeline::{
    check_policy, expand_all, ground_instance, learn, load_domain, load_instance, prepare_with_pool, Backend, Prepared,
    RunConfig, Task,
};
use genplan::policy::{extract_policy, greedy_execute, verify_exhaustive, Execution, Policy, TieBreak, Verdict};
use genplan::statespace::{expand, SampleSet, StateSpace};
use genplan::strips::{DomainModel, InstanceModel};
use genplan_maxsat::{format_model, parse_verified_model, ExternalSolver, SolveOptions, SolveStatus, WcnfProblem};

/// Learn general policies for classical planning domains.
///
/// Exit codes: 0 success, 1 negative result (no policy, policy fails,
/// execution fails), 2 error, 3 `extract` found violated class pairs.
#[derive(Parser)]
#[command(name = "genplan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the whole pipeline on training instances and test the policy.
    Learn(LearnArgs),
    /// Expand the state space of one instance and dump it.
    Expand(ExpandArgs),
    /// Generate the feature pool of a sample and dump it.
    Features(FeaturesArgs),
    /// Build the Max-SAT theory for a stored pool and write it as WCNF.
    Encode(EncodeArgs),
    /// Solve a WCNF file and write the model.
    Solve(SolveArgs),
    /// Decode a model into a policy, or report violated class pairs.
    Extract(ExtractArgs),
    /// Check a policy exhaustively on the state spaces of instances.
    Verify(VerifyArgs),
    /// Execute a policy greedily on one instance and print the trajectory.
    Run(RunArgs),
}

fn parse_goal_param(s: &str) -> Result<(String, String), String> {
    let (name, object) = s.split_once('=').ok_or("expected NAME=OBJECT")?;
    Ok((name.trim().to_lowercase(), object.trim().to_lowercase()))
}

#[derive(Args)]
struct DomainArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Bind a goal parameter in every instance, e.g. `x=b3`.
    #[arg(long = "goal-param", value_parser = parse_goal_param)]
    goal_params: Vec<(String, String)>,
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = 1_000_000)]
    max_states: usize,
    #[arg(long, default_value_t = 10_000_000)]
    max_transitions: usize,
    #[arg(long, default_value_t = 5_000_000)]
    max_actions: usize,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long = "instance", required = true)]
    instances: Vec<PathBuf>,
    /// State space dumps, one per instance, used instead of expanding.
    #[arg(long = "space")]
    spaces: Vec<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Args)]
struct PoolArgs {
    #[arg(long, default_value_t = 8)]
    max_complexity: u32,
    #[arg(long, default_value_t = 200_000)]
    max_concepts: usize,
    #[arg(long, default_value_t = 50_000)]
    max_features: usize,
    /// Leave distance features out of the pool.
    #[arg(long)]
    no_distances: bool,
    /// Do not turn types into primitive concepts.
    #[arg(long)]
    no_types: bool,
    /// Skip predicates of arity above two instead of failing.
    #[arg(long)]
    ignore_high_arity: bool,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long, default_value_t = 2)]
    slack: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random class pairs in the initial pair set (default: ten per class).
    #[arg(long)]
    extra_pairs: Option<usize>,
    /// One Good variable per transition instead of per class.
    #[arg(long)]
    no_merge_classes: bool,
    /// Enforce every class pair from the start.
    #[arg(long)]
    no_incremental: bool,
}

#[derive(Args)]
struct SolverArgs {
    /// Time limit per solver call, in seconds.
    #[arg(long)]
    solver_time: Option<f64>,
    /// External Max-SAT solver binary; the embedded solver is used otherwise.
    #[arg(long)]
    solver: Option<PathBuf>,
    /// Extra argument for the external solver (repeatable).
    #[arg(long = "solver-arg", allow_hyphen_values = true)]
    solver_args: Vec<String>,
    /// Directory for external solver files.
    #[arg(long, default_value = "genplan-solver")]
    workdir: PathBuf,
}

#[derive(Args)]
struct LearnArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long = "train", required = true)]
    train: Vec<PathBuf>,
    #[arg(long = "test")]
    test: Vec<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
    #[command(flatten)]
    pool: PoolArgs,
    #[command(flatten)]
    theory: TheoryArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Step limit for test executions (default 10 m² for m objects).
    #[arg(long)]
    test_max_steps: Option<usize>,
    /// Break ties among compatible successors randomly with this seed.
    #[arg(long)]
    random_ties: Option<u64>,
    #[arg(long)]
    policy_out: Option<PathBuf>,
    /// Write the machine-readable report here.
    #[arg(long)]
    report_out: Option<PathBuf>,
}

#[derive(Args)]
struct ExpandArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FeaturesArgs {
    #[command(flatten)]
    sample: SampleArgs,
    #[command(flatten)]
    pool: PoolArgs,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    sample: SampleArgs,
    #[arg(long)]
    pool: PathBuf,
    #[command(flatten)]
    theory: TheoryArgs,
    /// Class pairs to enforce (default: the seeded initial set).
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// WCNF output; the clause tags go to `<output>.tags`, the pairs to `<output>.pairs`.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    wcnf: PathBuf,
    /// Known lower bound on the optimum cost.
    #[arg(long, default_value_t = 0)]
    lower_bound: u64,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    sample: SampleArgs,
    #[arg(long)]
    pool: PathBuf,
    #[command(flatten)]
    theory: TheoryArgs,
    /// The pair set the model was solved with.
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Where the enlarged pair set goes if the model violates some pair
    /// (default: overwrite `--pairs`).
    #[arg(long)]
    pairs_out: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    sample: SampleArgs,
    #[arg(long)]
    policy: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    policy: PathBuf,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    random_ties: Option<u64>,
    #[arg(long)]
    max_actions: Option<usize>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn config(limits: &LimitArgs, pool: Option<&PoolArgs>, theory: Option<&TheoryArgs>) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.expand_limits.max_states = limits.max_states;
    cfg.expand_limits.max_transitions = limits.max_transitions;
    cfg.grounding_limits.max_actions = limits.max_actions;
    if let Some(p) = pool {
        cfg.max_complexity = p.max_complexity;
        cfg.max_concepts = p.max_concepts;
        cfg.max_features = p.max_features;
        cfg.distances = !p.no_distances;
        cfg.vocabulary.types = !p.no_types;
        cfg.vocabulary.ignore_high_arity = p.ignore_high_arity;
    }
    if let Some(t) = theory {
        cfg.slack = t.slack;
        cfg.seed = t.seed;
        cfg.extra_pairs = t.extra_pairs;
        cfg.merge_classes = !t.no_merge_classes;
        cfg.incremental = !t.no_incremental;
    }
    cfg
}

fn apply_solver(cfg: &mut RunConfig, s: &SolverArgs) {
    cfg.solver_time = s.solver_time.map(Duration::from_secs_f64);
    if let Some(program) = &s.solver {
        let solver = ExternalSolver { program: program.clone(), args: s.solver_args.clone() };
        cfg.backend = Backend::External { solver, workdir: s.workdir.clone() };
    }
}

fn load_instances(d: &DomainArgs, paths: &[PathBuf]) -> Result<(DomainModel, Vec<InstanceModel>)> {
    let domain = load_domain(&d.domain)?;
    let instances = paths.iter().map(|p| load_instance(&domain, p, &d.goal_params)).collect::<Result<Vec<_>, _>>()?;
    Ok((domain, instances))
}

fn load_sample(a: &SampleArgs, cfg: &RunConfig) -> Result<SampleSet> {
    let (domain, instances) = load_instances(&a.domain, &a.instances)?;
    if a.spaces.is_empty() {
        return Ok(expand_all(&domain, &instances, cfg)?);
    }
    if a.spaces.len() != instances.len() {
        bail!("{} state space dumps given for {} instances", a.spaces.len(), instances.len());
    }
    let mut spaces = Vec::new();
    for (inst, path) in instances.iter().zip(&a.spaces) {
        let gp = ground_instance(&domain, inst, cfg.grounding_limits)?;
        let space = StateSpace::read_dump(&read(path)?, gp).with_context(|| format!("loading {}", path.display()))?;
        spaces.push(space);
    }
    Ok(SampleSet::new(spaces))
}

fn load_prepared(a: &SampleArgs, pool: &Path, cfg: &RunConfig) -> Result<Prepared> {
    let sample = load_sample(a, cfg)?;
    let pool = FeaturePool::parse_dump(&read(pool)?).with_context(|| format!("loading {}", pool.display()))?;
    Ok(prepare_with_pool(sample, pool, cfg)?)
}

fn load_policy(path: &Path) -> Result<Policy> {
    Policy::parse(&read(path)?).with_context(|| format!("loading {}", path.display()))
}

fn cmd_learn(a: &LearnArgs) -> Result<u8> {
    let mut cfg = config(&a.limits, Some(&a.pool), Some(&a.theory));
    apply_solver(&mut cfg, &a.solver);
    cfg.test_max_steps = a.test_max_steps;
    cfg.tie_break = a.random_ties.map_or(TieBreak::First, TieBreak::Random);
    let task = Task::load(&a.domain.domain, &a.train, &a.test, &a.domain.goal_params)?;
    let out = learn(&task, &cfg)?;
    print!("{}", out.report.table());
    if let Some(path) = &a.report_out {
        write(path, &out.report.key_values())?;
    }
    match &out.policy {
        Some(p) => {
            print!("{p}");
            if let Some(path) = &a.policy_out {
                write(path, &p.to_text())?;
            }
        }
        None => println!("{}", out.report.unsat_reason.as_deref().unwrap_or("no policy")),
    }
    for v in out.verification.iter().filter(|v| !v.solves()) {
        eprintln!("policy fails on {}: {:?}", v.instance, v.verdict());
    }
    Ok(out.exit_code() as u8)
}

fn cmd_expand(a: &ExpandArgs) -> Result<u8> {
    let cfg = config(&a.limits, None, None);
    let (domain, instances) = load_instances(&a.domain, std::slice::from_ref(&a.instance))?;
    let gp = ground_instance(&domain, &instances[0], cfg.grounding_limits)?;
    let space = expand(gp, cfg.expand_limits)?;
    println!(
        "{} states {} transitions {} non-goal transitions {} alive {} d_max {}",
        space.name(),
        space.num_states(),
        space.num_transitions(),
        space.num_nongoal_transitions(),
        space.num_alive(),
        space.diameter()
    );
    if let Some(path) = &a.output {
        write(path, &space.write_dump())?;
    }
    Ok(0)
}

fn cmd_features(a: &FeaturesArgs) -> Result<u8> {
    let cfg = config(&a.sample.limits, Some(&a.pool), None);
    let sample = load_sample(&a.sample, &cfg)?;
    let vocabulary = Vocabulary::new(sample.spaces.iter().map(|s| &*s.problem), cfg.vocabulary)?;
    let (pool, _) = generate_pool(&sample, &vocabulary, cfg.pool_config())?;
    println!("{} features over {} states", pool.len(), sample.num_states());
    write(&a.output, &pool.dump())?;
    Ok(0)
}

fn cmd_encode(a: &EncodeArgs) -> Result<u8> {
    let cfg = config(&a.sample.limits, None, Some(&a.theory));
    let prepared = load_prepared(&a.sample, &a.pool, &cfg)?;
    let pairs = match &a.pairs {
        Some(path) => parse_pairs(&read(path)?, prepared.classes.len())?,
        None => prepared.initial_pairs(&cfg),
    };
    let theory = prepared.theory(&pairs, &cfg);
    if let Some((g, n)) = theory.indistinguishable {
        println!("goal state {g} and non-goal state {n} agree on every feature");
    }
    println!(
        "classes {} pairs {} vars {} clauses {} separation {}",
        prepared.classes.len(),
        theory.pairs.len(),
        theory.problem.num_vars(),
        theory.problem.num_clauses(),
        theory.count(ClauseTag::Separation)
    );
    write(&a.output, &theory.problem.to_wcnf_string())?;
    write(&with_suffix(&a.output, ".tags"), &theory.sidecar())?;
    write(&with_suffix(&a.output, ".pairs"), &pairs_to_text(&theory.pairs))?;
    Ok(0)
}

fn cmd_solve(a: &SolveArgs) -> Result<u8> {
    let problem = WcnfProblem::parse_wcnf(&read(&a.wcnf)?).with_context(|| format!("loading {}", a.wcnf.display()))?;
    let result = match &a.solver.solver {
        Some(program) => {
            fs::create_dir_all(&a.solver.workdir)?;
            ExternalSolver { program: program.clone(), args: a.solver.solver_args.clone() }
                .solve(&problem, &a.solver.workdir)?
        }
        None => {
            let opts = SolveOptions {
                time_limit: a.solver.solver_time.map(Duration::from_secs_f64),
                lower_bound: a.lower_bound,
                ..Default::default()
            };
            genplan_maxsat::solve(&problem, &opts)
        }
    };
    match result.status {
        SolveStatus::Optimum { cost, model } => {
            println!("optimum {cost}");
            write(&a.output, &format!("s OPTIMUM FOUND\no {cost}\n{}", format_model(&model)))?;
            Ok(0)
        }
        SolveStatus::UnsatisfiableHard => {
            println!("unsatisfiable");
            write(&a.output, "s UNSATISFIABLE\n")?;
            Ok(1)
        }
        SolveStatus::TimedOut { .. } => bail!("time limit reached before the optimum was proved"),
    }
}

fn cmd_extract(a: &ExtractArgs) -> Result<u8> {
    let cfg = config(&a.sample.limits, None, Some(&a.theory));
    let prepared = load_prepared(&a.sample, &a.pool, &cfg)?;
    let pairs = parse_pairs(&read(&a.pairs)?, prepared.classes.len())?;
    let mut theory = prepared.theory(&pairs, &cfg);
    let model = parse_verified_model(&read(&a.model)?, &theory.problem)
        .with_context(|| format!("model {} does not fit the theory", a.model.display()))?;
    let solution = decode(&theory, &model, &prepared.weights);
    let violations = validate_solution(&prepared.classes, &solution.selected, &solution.good);
    if !violations.is_empty() {
        let added = theory.add_pairs(&prepared.classes, violations);
        let out = a.pairs_out.as_ref().unwrap_or(&a.pairs);
        write(out, &pairs_to_text(&theory.pairs))?;
        println!("{added} violated pairs added to {}; encode and solve again", out.display());
        return Ok(3);
    }
    let policy = extract_policy(&prepared.pool.features, &solution.selected, &prepared.classes, &solution.good)?;
    println!("cost {} features {} rules {}", solution.cost, policy.features.len(), policy.rules.len());
    write(&a.output, &policy.to_text())?;
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8> {
    let cfg = config(&a.sample.limits, None, None);
    let policy = load_policy(&a.policy)?;
    let sample = load_sample(&a.sample, &cfg)?;
    let mut ok = true;
    for space in &sample.spaces {
        check_policy(&policy, &space.problem, cfg.vocabulary)?;
        let r = verify_exhaustive(space, &policy);
        let detail = match r.verdict() {
            Verdict::Solves => String::new(),
            Verdict::Incomplete => format!(" ({} states without a compatible transition)", r.incomplete.len()),
            Verdict::ReachesDeadEnd => format!(" ({} transitions into dead-ends)", r.into_deadends.len()),
            Verdict::Cyclic => format!(" (cycle through states {:?})", r.cycle.as_deref().unwrap_or_default()),
        };
        println!("{} {:?}{detail}", r.instance, r.verdict());
        ok &= r.solves();
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_run(a: &RunArgs) -> Result<u8> {
    let mut cfg = RunConfig::default();
    if let Some(m) = a.max_actions {
        cfg.grounding_limits.max_actions = m;
    }
    let policy = load_policy(&a.policy)?;
    let (domain, instances) = load_instances(&a.domain, std::slice::from_ref(&a.instance))?;
    let gp = ground_instance(&domain, &instances[0], cfg.grounding_limits)?;
    check_policy(&policy, &gp, cfg.vocabulary)?;
    let tie = a.random_ties.map_or(TieBreak::First, TieBreak::Random);
    match greedy_execute(&gp, &policy, a.max_steps, tie) {
        Execution::Reached(plan) => {
            for &action in &plan {
                println!("{}", gp.action_name(action));
            }
            println!("; goal reached in {} steps", plan.len());
            Ok(0)
        }
        Execution::Failed { reason, steps } => {
            println!("; failed after {steps} steps: {reason}");
            Ok(1)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Learn(a) => cmd_learn(a),
        Command::Expand(a) => cmd_expand(a),
        Command::Features(a) => cmd_features(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Extract(a) => cmd_extract(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Run(a) => cmd_run(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let mut parts: Vec<String> = Vec::new();
            for cause in e.chain().map(|c| c.to_string()) {
                if !parts.last().is_some_and(|p| p.contains(&cause)) {
                    parts.push(cause);
                }
            }
            eprintln!("error: {}", parts.join(": "));
            ExitCode::from(2)
        }
    }
}
