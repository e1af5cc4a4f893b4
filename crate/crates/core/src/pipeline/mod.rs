//! End-to-end learning: ground, expand, build the pool, solve the theory with
//! constraint generation, extract and verify the policy, and test it.

mod report;

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use genplan_maxsat::{solve, ExternalSolver, MaxSatError, SolveOptions, SolveResult, SolveStatus};

pub use report::RunReport;

use crate::encoding::{
    build_theory, compute_classes, decode, initial_pairs, validate_solution, Classes, ClauseTag, PairSet, Solution,
    Theory,
};
use crate::features::{
    generate_pool, FeatureError, FeatureMatrix, FeaturePool, PoolConfig, Vocabulary, VocabularyOptions,
};
use crate::policy::{
    extract_policy, greedy_execute, verify_exhaustive, Execution, ExtractError, Policy, TieBreak, VerificationReport,
};
use crate::statespace::{expand, ExpandLimits, SampleSet, StateSpaceError};
use crate::strips::{
    ground_with_limits, parse_domain, parse_instance, DomainModel, GroundProblem, GroundingLimits, InstanceModel,
    PddlError,
};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parsing {path}: {source}")]
    Parse { path: PathBuf, source: PddlError },
    #[error("grounding {instance}: {source}")]
    Ground { instance: String, source: PddlError },
    #[error("expansion: {0}")]
    Expand(#[from] StateSpaceError),
    #[error("features: {0}")]
    Features(#[from] FeatureError),
    #[error("solver: {0}")]
    Solver(#[from] MaxSatError),
    #[error("solver: time limit reached in iteration {iteration}")]
    Timeout { iteration: usize },
    #[error("extraction: {0}")]
    Extract(#[from] ExtractError),
}

#[derive(Debug, Clone)]
pub enum Backend {
    Embedded,
    /// An external Max-SAT binary; problem and model files go to `workdir`.
    External {
        solver: ExternalSolver,
        workdir: PathBuf,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub max_complexity: u32,
    pub slack: u32,
    pub seed: u64,
    /// Random class pairs added to the initial pair set; by default ten per class.
    pub extra_pairs: Option<usize>,
    pub grounding_limits: GroundingLimits,
    pub expand_limits: ExpandLimits,
    pub max_concepts: usize,
    pub max_features: usize,
    pub distances: bool,
    pub vocabulary: VocabularyOptions,
    pub solver_time: Option<Duration>,
    pub backend: Backend,
    /// Share one Good variable among indistinguishable transitions.
    pub merge_classes: bool,
    /// Add separation constraints lazily; otherwise all class pairs up front.
    pub incremental: bool,
    pub test_max_steps: Option<usize>,
    pub tie_break: TieBreak,
}

impl Default for RunConfig {
    fn default() -> Self {
        let pool = PoolConfig::default();
        RunConfig {
            max_complexity: 8,
            slack: 2,
            seed: 0,
            extra_pairs: None,
            grounding_limits: GroundingLimits::default(),
            expand_limits: ExpandLimits::default(),
            max_concepts: pool.max_concepts,
            max_features: pool.max_features,
            distances: true,
            vocabulary: VocabularyOptions::default(),
            solver_time: None,
            backend: Backend::Embedded,
            merge_classes: true,
            incremental: true,
            test_max_steps: None,
            tie_break: TieBreak::First,
        }
    }
}

impl RunConfig {
    pub fn pool_config(&self) -> PoolConfig {
        PoolConfig {
            max_complexity: self.max_complexity,
            max_concepts: self.max_concepts,
            max_features: self.max_features,
            distances: self.distances,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.max_complexity < 1 {
            return Err(PipelineError::Config("the complexity bound must be at least 1".into()));
        }
        if self.slack < 1 {
            return Err(PipelineError::Config("the slack must be at least 1".into()));
        }
        Ok(())
    }
}

/// A domain with training and test instances.
#[derive(Debug, Clone)]
pub struct Task {
    pub domain: DomainModel,
    pub train: Vec<InstanceModel>,
    pub test: Vec<InstanceModel>,
}

fn read(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })
}

pub fn load_domain(path: &Path) -> Result<DomainModel, PipelineError> {
    parse_domain(&read(path)?).map_err(|source| PipelineError::Parse { path: path.to_path_buf(), source })
}

/// Parses an instance file and adds the given goal parameters to those
/// declared in the file.
pub fn load_instance(
    domain: &DomainModel,
    path: &Path,
    goal_parameters: &[(String, String)],
) -> Result<InstanceModel, PipelineError> {
    let mut inst = parse_instance(&read(path)?, domain)
        .map_err(|source| PipelineError::Parse { path: path.to_path_buf(), source })?;
    for (name, object) in goal_parameters {
        inst = inst.with_goal_parameter(name, object);
    }
    crate::strips::validate_instance(&inst, domain)
        .map_err(|source| PipelineError::Parse { path: path.to_path_buf(), source })?;
    Ok(inst)
}

impl Task {
    pub fn load(
        domain: &Path,
        train: &[PathBuf],
        test: &[PathBuf],
        goal_parameters: &[(String, String)],
    ) -> Result<Self, PipelineError> {
        let dom = load_domain(domain)?;
        let load =
            |ps: &[PathBuf]| ps.iter().map(|p| load_instance(&dom, p, goal_parameters)).collect::<Result<Vec<_>, _>>();
        Ok(Task { train: load(train)?, test: load(test)?, domain: dom })
    }
}

pub fn ground_instance(
    domain: &DomainModel,
    inst: &InstanceModel,
    limits: GroundingLimits,
) -> Result<Arc<GroundProblem>, PipelineError> {
    ground_with_limits(domain, inst, limits)
        .map(Arc::new)
        .map_err(|source| PipelineError::Ground { instance: inst.name.clone(), source })
}

/// Everything computed before the first solver call.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub sample: SampleSet,
    pub vocabulary: Vocabulary,
    pub pool: FeaturePool,
    pub matrix: FeatureMatrix,
    pub weights: Vec<u32>,
    pub classes: Classes,
}

impl Prepared {
    pub fn initial_pairs(&self, cfg: &RunConfig) -> PairSet {
        if !cfg.incremental {
            return all_pairs(self.classes.len());
        }
        let extra = cfg.extra_pairs.unwrap_or(10 * self.classes.len());
        initial_pairs(&self.sample, &self.classes, cfg.seed, extra)
    }

    pub fn theory(&self, pairs: &PairSet, cfg: &RunConfig) -> Theory {
        build_theory(&self.sample, &self.matrix, &self.weights, &self.classes, pairs, cfg.slack)
    }
}

pub fn all_pairs(n: usize) -> PairSet {
    let n = n as u32;
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

pub fn prepare(task: &Task, cfg: &RunConfig) -> Result<Prepared, PipelineError> {
    cfg.validate()?;
    if task.train.is_empty() {
        return Err(PipelineError::Config("at least one training instance is needed".into()));
    }
    let sample = expand_all(&task.domain, &task.train, cfg)?;
    Ok(prepare_sample(sample, cfg)?)
}

/// Grounds and expands every instance.
pub fn expand_all(
    domain: &DomainModel,
    instances: &[InstanceModel],
    cfg: &RunConfig,
) -> Result<SampleSet, PipelineError> {
    let mut spaces = Vec::new();
    for inst in instances {
        let gp = ground_instance(domain, inst, cfg.grounding_limits)?;
        spaces.push(expand(gp, cfg.expand_limits)?);
    }
    Ok(SampleSet::new(spaces))
}

/// Pool, matrix and classes for an already expanded sample.
pub fn prepare_sample(sample: SampleSet, cfg: &RunConfig) -> Result<Prepared, FeatureError> {
    let vocabulary = Vocabulary::new(sample.spaces.iter().map(|s| &*s.problem), cfg.vocabulary)?;
    let (pool, matrix) = generate_pool(&sample, &vocabulary, cfg.pool_config())?;
    let weights = pool.features.iter().map(|f| f.weight()).collect();
    let classes = compute_classes(&sample, &matrix, cfg.merge_classes);
    Ok(Prepared { sample, vocabulary, pool, matrix, weights, classes })
}

/// Matrix and classes for a stored pool. The features are re-evaluated on
/// the sample, so the pool may come from a different run.
pub fn prepare_with_pool(sample: SampleSet, pool: FeaturePool, cfg: &RunConfig) -> Result<Prepared, FeatureError> {
    let vocabulary = Vocabulary::new(sample.spaces.iter().map(|s| &*s.problem), cfg.vocabulary)?;
    for f in &pool.features {
        vocabulary.check_feature(f)?;
    }
    let matrix = FeatureMatrix::evaluate(&sample, &pool.features);
    let weights = pool.features.iter().map(|f| f.weight()).collect();
    let classes = compute_classes(&sample, &matrix, cfg.merge_classes);
    Ok(Prepared { sample, vocabulary, pool, matrix, weights, classes })
}

/// Fails if a policy feature mentions a symbol unknown to the instance.
pub fn check_policy(policy: &Policy, problem: &GroundProblem, opts: VocabularyOptions) -> Result<(), FeatureError> {
    let vocabulary = Vocabulary::new([problem], opts)?;
    policy.features.iter().try_for_each(|f| vocabulary.check_feature(f))
}

#[derive(Debug, Clone)]
pub struct TestOutcome {
    pub instance: String,
    pub objects: usize,
    pub execution: Execution,
}

/// Result of [`learn`]. `policy` is `None` when no policy exists over the pool.
#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub prepared: Prepared,
    pub theory: Theory,
    pub model: Option<Vec<bool>>,
    pub solution: Option<Solution>,
    pub policy: Option<Policy>,
    pub verification: Vec<VerificationReport>,
    pub tests: Vec<TestOutcome>,
    pub report: RunReport,
}

impl LearnOutcome {
    /// 0 when a policy was learned and verified, 1 when none exists, 2 when a
    /// learned policy fails verification.
    pub fn exit_code(&self) -> i32 {
        match &self.policy {
            None => 1,
            Some(_) if self.verification.iter().all(VerificationReport::solves) => 0,
            Some(_) => 2,
        }
    }
}

fn run_solver(
    problem: &genplan_maxsat::WcnfProblem,
    cfg: &RunConfig,
    lower_bound: u64,
) -> Result<SolveResult, PipelineError> {
    match &cfg.backend {
        Backend::Embedded => {
            let opts = SolveOptions { time_limit: cfg.solver_time, lower_bound, ..Default::default() };
            Ok(solve(problem, &opts))
        }
        Backend::External { solver, workdir } => {
            std::fs::create_dir_all(workdir).map_err(|source| PipelineError::Io { path: workdir.clone(), source })?;
            Ok(solver.solve(problem, workdir)?)
        }
    }
}

pub struct SolveLoop {
    pub theory: Theory,
    pub model: Option<Vec<bool>>,
    pub solution: Option<Solution>,
    pub iterations: usize,
    pub sat_time: Duration,
}

/// Solves the theory, adding separation constraints for violated class
/// pairs until the optimum needs none. Each optimum bounds the next from below.
pub fn solve_loop(prepared: &Prepared, cfg: &RunConfig) -> Result<SolveLoop, PipelineError> {
    let mut theory = prepared.theory(&prepared.initial_pairs(cfg), cfg);
    let mut out =
        SolveLoop { theory: theory.clone(), model: None, solution: None, iterations: 0, sat_time: Duration::ZERO };
    if theory.indistinguishable.is_some() {
        out.theory = theory;
        return Ok(out);
    }
    let mut lower_bound = 0;
    loop {
        out.iterations += 1;
        let start = Instant::now();
        let result = run_solver(&theory.problem, cfg, lower_bound)?;
        out.sat_time += start.elapsed();
        let model = match result.status {
            SolveStatus::Optimum { model, .. } => model,
            SolveStatus::UnsatisfiableHard => break,
            SolveStatus::TimedOut { .. } => return Err(PipelineError::Timeout { iteration: out.iterations }),
        };
        let solution = decode(&theory, &model, &prepared.weights);
        lower_bound = solution.cost;
        let violations = validate_solution(&prepared.classes, &solution.selected, &solution.good);
        log::info!(
            "iteration {}: cost {}, {} features, {} violated pairs",
            out.iterations,
            solution.cost,
            solution.selected.len(),
            violations.len()
        );
        out.model = Some(model);
        out.solution = Some(solution);
        if violations.is_empty() {
            break;
        }
        theory.add_pairs(&prepared.classes, violations);
        out.model = None;
        out.solution = None;
    }
    out.theory = theory;
    Ok(out)
}

/// Runs the whole pipeline on a task.
pub fn learn(task: &Task, cfg: &RunConfig) -> Result<LearnOutcome, PipelineError> {
    let start = Instant::now();
    let prepared = prepare(task, cfg)?;
    let lp = solve_loop(&prepared, cfg)?;
    let policy = match &lp.solution {
        Some(sol) => Some(extract_policy(&prepared.pool.features, &sol.selected, &prepared.classes, &sol.good)?),
        None => None,
    };
    let verification: Vec<VerificationReport> = match &policy {
        Some(p) => prepared.sample.spaces.iter().map(|s| verify_exhaustive(s, p)).collect(),
        None => Vec::new(),
    };
    let mut tests = Vec::new();
    if let Some(p) = &policy {
        for inst in &task.test {
            let gp = ground_instance(&task.domain, inst, cfg.grounding_limits)?;
            let execution = greedy_execute(&gp, p, cfg.test_max_steps, cfg.tie_break);
            tests.push(TestOutcome { instance: inst.name.clone(), objects: gp.objects.len(), execution });
        }
    }
    let full_clauses = lp.theory.problem.num_clauses() - 2 * lp.theory.pairs.len()
        + prepared.classes.len() * prepared.classes.len().saturating_sub(1);
    let report = RunReport {
        transitions: prepared.sample.num_nongoal_transitions(),
        states: prepared.sample.num_states(),
        classes: prepared.classes.len(),
        diameter: prepared.sample.diameter(),
        pool: prepared.pool.len(),
        vars: lp.theory.problem.num_vars(),
        clauses: lp.theory.problem.num_clauses(),
        full_clauses,
        separation_clauses: lp.theory.count(ClauseTag::Separation),
        iterations: lp.iterations,
        unsat_reason: match (&lp.solution, lp.theory.indistinguishable) {
            (Some(_), _) => None,
            (None, Some((g, n))) => Some(format!("goal state {g} and non-goal state {n} agree on every feature")),
            (None, None) => Some("no policy in this feature space".to_string()),
        },
        cost: lp.solution.as_ref().map(|s| s.cost),
        features: policy.as_ref().map(|p| p.features.iter().map(|f| f.to_string()).collect()).unwrap_or_default(),
        max_weight: policy.as_ref().and_then(|p| p.features.iter().map(|f| f.weight()).max()),
        rules: policy.as_ref().map(|p| p.rules.len()),
        verified: policy.as_ref().map(|_| verification.iter().filter(|v| v.solves()).count()),
        tests: tests.iter().map(|t| (t.instance.clone(), t.execution.clone())).collect(),
        total_time: start.elapsed(),
        sat_time: lp.sat_time,
    };
    Ok(LearnOutcome {
        prepared,
        theory: lp.theory,
        model: lp.model,
        solution: lp.solution,
        policy,
        verification,
        tests,
        report,
    })
}
