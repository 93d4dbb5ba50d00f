//! Main search loop: propagate, learn and backjump, decide or complete,
//! check, record models and block them.

use std::collections::{BTreeSet, HashSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::assignment::{Assignment, Reason, DEFAULT_DEPS_WORDS};
use crate::completion::{compile_completion, AuxMap, Nogood, Origin};
use crate::computation::DerivationCheck;
use crate::decide::{complete_assignment, decide, Decision, Heuristic, HeuristicConfig};
use crate::error::{Error, Result};
use crate::learn::{analyze, Analysis, LearnMode, Learned};
use crate::lit::{AtomId, Lit};
use crate::oracle;
use crate::pool::WorkerPool;
use crate::program::GroundProgram;
use crate::propagate::{fixpoint_violations, initial_propagation, mk_dl_bitmap, Propagator, DEFAULT_PAR_THRESHOLD};
use crate::store::{NogoodId, NogoodStore, DEFAULT_LEARNED_CAPACITY};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum RestartPolicy {
    #[default]
    Off,
    /// Restart after `base`, `base * factor`, `base * factor^2`, ... conflicts.
    Geometric { base: u64, factor: f64 },
}

impl RestartPolicy {
    pub const DEFAULT_GEOMETRIC: RestartPolicy = RestartPolicy::Geometric { base: 100, factor: 1.5 };
}

impl fmt::Display for RestartPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RestartPolicy::Off => f.write_str("off"),
            RestartPolicy::Geometric { base, factor } => write!(f, "geometric:{base}:{factor}"),
        }
    }
}

impl FromStr for RestartPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad restart policy '{s}' (expected off or geometric:BASE:FACTOR)"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["off"] => Ok(RestartPolicy::Off),
            ["geometric"] => Ok(RestartPolicy::DEFAULT_GEOMETRIC),
            ["geometric", base, factor] => Ok(RestartPolicy::Geometric {
                base: base.parse().map_err(|_| bad())?,
                factor: factor.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub mode: LearnMode,
    pub heuristic: HeuristicConfig,
    pub workers: usize,
    pub restarts: RestartPolicy,
    /// 0 enumerates all models.
    pub max_models: usize,
    pub deps_words: usize,
    pub fanout: usize,
    pub seed: u64,
    pub verify: bool,
    pub trace: bool,
    /// Passes with fewer work items than this run on the calling thread.
    pub par_threshold: usize,
    pub learned_capacity: usize,
    /// Full-scan audits after every propagation fixpoint (slow).
    pub audit: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: LearnMode::Fwd,
            heuristic: HeuristicConfig::default(),
            workers: 1,
            restarts: RestartPolicy::Off,
            max_models: 1,
            deps_words: DEFAULT_DEPS_WORDS,
            fanout: 1,
            seed: 0,
            verify: false,
            trace: false,
            par_threshold: DEFAULT_PAR_THRESHOLD,
            learned_capacity: DEFAULT_LEARNED_CAPACITY,
            audit: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.deps_words == 0 {
            return Err(Error::Config("deps words must be at least 1".into()));
        }
        if self.fanout == 0 {
            return Err(Error::Config("fanout must be at least 1".into()));
        }
        let d = self.heuristic.activity_decay;
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::Config(format!("activity decay {d} outside (0, 1)")));
        }
        if let RestartPolicy::Geometric { base, factor } = self.restarts {
            if base < 1 || factor.partial_cmp(&1.0) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::Config(format!("restart base {base} must be >= 1 and factor {factor} > 1")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
        })
    }
}

/// Structural checks on learned nogoods.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LearnAudit {
    pub res_learned: u64,
    /// Res nogoods with exactly one literal at their highest level.
    pub res_single_top: u64,
    pub fwd_learned: u64,
    /// Fwd nogoods made of decision literals only.
    pub fwd_decisions_only: u64,
    pub asserting_checked: u64,
    /// Learned nogoods that were unit right after the backjump.
    pub asserting: u64,
}

impl LearnAudit {
    pub fn all_ok(&self) -> bool {
        self.res_single_top == self.res_learned
            && self.fwd_decisions_only == self.fwd_learned
            && self.asserting == self.asserting_checked
    }

    pub fn merge(&mut self, o: &LearnAudit) {
        self.res_learned += o.res_learned;
        self.res_single_top += o.res_single_top;
        self.fwd_learned += o.fwd_learned;
        self.fwd_decisions_only += o.fwd_decisions_only;
        self.asserting_checked += o.asserting_checked;
        self.asserting += o.asserting;
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub learned_count: u64,
    pub learned_length_sum: u64,
    pub restarts: u64,
    pub passes: u64,
    pub watch_replacements: u64,
    pub duplicate_learned: u64,
    /// Total assignments rejected by the convergence check.
    pub rejected_candidates: u64,
    pub completions: u64,
    pub audit: LearnAudit,
    pub wall_time: Duration,
}

impl SolveStats {
    pub fn avg_learned_len(&self) -> f64 {
        if self.learned_count == 0 {
            0.0
        } else {
            self.learned_length_sum as f64 / self.learned_count as f64
        }
    }

    fn rate(&self, count: u64) -> f64 {
        let s = self.wall_time.as_secs_f64();
        if s > 0.0 {
            count as f64 / s
        } else {
            0.0
        }
    }

    pub fn propagations_per_sec(&self) -> f64 {
        self.rate(self.propagations)
    }

    pub fn decisions_per_sec(&self) -> f64 {
        self.rate(self.decisions)
    }

    pub fn learned_per_sec(&self) -> f64 {
        self.rate(self.learned_count)
    }

    pub fn conflicts_per_sec(&self) -> f64 {
        self.rate(self.conflicts)
    }

    /// Everything except timing.
    pub fn without_timing(&self) -> SolveStats {
        SolveStats { wall_time: Duration::ZERO, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub mode: LearnMode,
    pub conflict: NogoodId,
    pub learned_len: usize,
    pub backjump: u32,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "conflict mode={} nogood={} len={} backjump={}",
            self.mode, self.conflict.0, self.learned_len, self.backjump
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Model {
    pub atoms: BTreeSet<AtomId>,
}

impl Model {
    /// Atom names sorted lexicographically.
    pub fn names(&self, program: &GroundProgram) -> Vec<String> {
        let mut v: Vec<String> = self.atoms.iter().map(|&a| program.atoms().name(a).to_owned()).collect();
        v.sort();
        v
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutput {
    pub status: Status,
    pub models: Vec<Model>,
    pub stats: SolveStats,
    pub trace: Vec<TraceEvent>,
}

pub fn verify_model(program: &GroundProgram, model: &Model) -> bool {
    oracle::is_answer_set(program, &model.atoms) && program.tp_step(&model.atoms) == model.atoms
}

pub fn solve(program: &GroundProgram, config: &SolverConfig) -> Result<SolveOutput> {
    config.validate()?;
    let mut s = Solver::new(program, config.clone())?;
    s.run()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Reconcile {
    Satisfied,
    Asserted,
    Open,
    Violated,
}

struct Solver<'p> {
    program: &'p GroundProgram,
    config: SolverConfig,
    aux: AuxMap,
    store: NogoodStore,
    a: Assignment,
    prop: Propagator,
    pool: WorkerPool,
    heur: Heuristic,
    check: DerivationCheck,
    stats: SolveStats,
    trace: Vec<TraceEvent>,
    models: Vec<Model>,
    pending: Vec<NogoodId>,
    seen_learned: HashSet<Vec<Lit>>,
    restart_limit: f64,
    since_restart: u64,
    scratch: Vec<u64>,
}

impl<'p> Solver<'p> {
    fn new(program: &'p GroundProgram, config: SolverConfig) -> Result<Solver<'p>> {
        let completion = compile_completion(program);
        let n = completion.aux.total_atoms();
        let mut store = NogoodStore::build(&completion.nogoods, n);
        store.set_learned_capacity(config.learned_capacity);
        let track = config.mode == LearnMode::Fwd;
        let a = Assignment::new(n, config.deps_words, track);
        let heur = Heuristic::new(config.heuristic, &store);
        let restart_limit = match config.restarts {
            RestartPolicy::Off => f64::INFINITY,
            RestartPolicy::Geometric { base, .. } => base as f64,
        };
        Ok(Solver {
            program,
            aux: completion.aux,
            store,
            a,
            prop: Propagator::new(config.par_threshold, config.seed),
            pool: WorkerPool::new(config.workers)?,
            heur,
            check: DerivationCheck::new(program),
            stats: SolveStats::default(),
            trace: Vec::new(),
            models: Vec::new(),
            pending: Vec::new(),
            seen_learned: HashSet::new(),
            restart_limit,
            since_restart: 0,
            scratch: vec![0; config.deps_words],
            config,
        })
    }

    fn run(&mut self) -> Result<SolveOutput> {
        let start = Instant::now();
        self.search()?;
        self.stats.wall_time = start.elapsed();
        if self.config.verify {
            for m in &self.models {
                if !verify_model(self.program, m) {
                    return Err(Error::Verification(format!(
                        "{{{}}} is not an answer set",
                        m.names(self.program).join(", ")
                    )));
                }
            }
        }
        Ok(SolveOutput {
            status: if self.models.is_empty() { Status::Unsat } else { Status::Sat },
            models: std::mem::take(&mut self.models),
            stats: self.stats.clone(),
            trace: std::mem::take(&mut self.trace),
        })
    }

    /// Runs until the search space is exhausted or enough models are found.
    fn search(&mut self) -> Result<()> {
        if !self.start_from_level_one() {
            return Ok(());
        }
        loop {
            let conflicts = if self.pending.is_empty() {
                let out = self.prop.propagate(&mut self.store, &mut self.a, &self.pool);
                self.stats.propagations += out.propagations;
                self.stats.passes += out.passes;
                self.stats.watch_replacements += out.watch_replacements;
                out.conflicts
            } else {
                std::mem::take(&mut self.pending)
            };

            if !conflicts.is_empty() {
                if self.a.level() == 1 {
                    return Ok(());
                }
                self.stats.conflicts += 1;
                self.since_restart += 1;
                if !self.resolve_conflict(&conflicts)? {
                    return Ok(());
                }
                if self.since_restart as f64 >= self.restart_limit && !self.restart() {
                    return Ok(());
                }
                continue;
            }

            if self.config.audit {
                self.audit_fixpoint()?;
            }

            if !self.a.is_total() {
                match decide(self.program, &self.aux, &mut self.a, &self.heur) {
                    Decision::Decided { .. } => self.stats.decisions += 1,
                    Decision::NoApplicable => {
                        self.stats.completions += 1;
                        if complete_assignment(self.program, &mut self.a).is_empty() {
                            return Err(Error::Internal("assignment not total after completion".into()));
                        }
                    }
                }
                continue;
            }

            if !self.check.converges(self.program, &self.aux, &self.a) {
                self.stats.rejected_candidates += 1;
                let target = self.a.level().saturating_sub(1).max(1);
                if !self.block(target)? {
                    return Ok(());
                }
                continue;
            }

            let atoms = self.program.atoms().ids().filter(|&p| self.a.holds(Lit::pos(p))).collect();
            self.models.push(Model { atoms });
            if self.config.max_models != 0 && self.models.len() >= self.config.max_models {
                return Ok(());
            }
            if !self.block(1)? {
                return Ok(());
            }
        }
    }

    /// Clears the assignment and applies every unit; false on a unit clash.
    fn start_from_level_one(&mut self) -> bool {
        self.a.reset();
        self.pending.clear();
        let out = initial_propagation(&self.store, &mut self.a);
        self.stats.propagations += out.propagations;
        !out.violated()
    }

    fn restart(&mut self) -> bool {
        self.stats.restarts += 1;
        self.since_restart = 0;
        if let RestartPolicy::Geometric { factor, .. } = self.config.restarts {
            self.restart_limit *= factor;
        }
        self.start_from_level_one()
    }

    /// Learns from the conflict and backjumps; false when the conflict
    /// proves that no further model exists.
    fn resolve_conflict(&mut self, conflicts: &[NogoodId]) -> Result<bool> {
        let analysis = analyze(conflicts, self.config.mode, self.config.fanout, &self.store, &self.a, &self.pool)?;
        let (learned, target) = match analysis {
            Analysis::Unsat => return Ok(false),
            Analysis::Learned { nogoods, backjump } => (nogoods, backjump),
        };
        let target = target.min(self.a.level() - 1).max(1);
        let mut ids = Vec::with_capacity(learned.len());
        for l in &learned {
            self.audit_learned(l);
            let lits = l.nogood.lits();
            if !self.seen_learned.insert(lits.to_vec()) {
                self.stats.duplicate_learned += 1;
            }
            self.stats.learned_count += 1;
            self.stats.learned_length_sum += lits.len() as u64;
            self.heur.on_learned(lits, self.program, &self.aux);
            if self.config.trace {
                self.trace.push(TraceEvent {
                    mode: l.mode,
                    conflict: l.conflict,
                    learned_len: lits.len(),
                    backjump: l.backjump,
                });
            }
            ids.push(self.store.add_learned_watched(l.nogood.clone(), l.watches)?);
        }
        self.heur.on_conflict();
        self.a.backjump(target);
        for (l, id) in learned.iter().zip(ids) {
            let r = self.reconcile(id);
            if l.backjump == target {
                self.stats.audit.asserting_checked += 1;
                if r == Reconcile::Asserted {
                    self.stats.audit.asserting += 1;
                }
            }
        }
        Ok(true)
    }

    fn audit_learned(&mut self, l: &Learned) {
        let lits = l.nogood.lits();
        match l.mode {
            LearnMode::Res => {
                self.stats.audit.res_learned += 1;
                let top = lits.iter().map(|x| self.a.level_of(x.atom())).max().unwrap_or(0);
                if lits.iter().filter(|x| self.a.level_of(x.atom()) == top).count() == 1 {
                    self.stats.audit.res_single_top += 1;
                }
            }
            LearnMode::Fwd => {
                self.stats.audit.fwd_learned += 1;
                if lits.iter().all(|x| self.a.decisions().contains(x)) {
                    self.stats.audit.fwd_decisions_only += 1;
                }
            }
        }
    }

    /// Adds a nogood over the current decisions and backjumps to `target`;
    /// false when there are no decisions left to block.
    fn block(&mut self, target: u32) -> Result<bool> {
        let decisions = self.a.decisions().to_vec();
        let Some(nogood) = Nogood::new(decisions.iter().copied(), Origin::Blocking) else {
            return Ok(false);
        };
        let n = decisions.len();
        let watches = if n >= 2 { [decisions[n - 1], decisions[n - 2]] } else { [decisions[0], decisions[0]] };
        let id = self.store.add_learned_watched(nogood, watches)?;
        self.a.backjump(target);
        self.reconcile(id);
        Ok(true)
    }

    /// Brings a freshly added nogood in line with the current assignment.
    fn reconcile(&mut self, id: NogoodId) -> Reconcile {
        let lits = self.store.lits(id).to_vec();
        if lits.iter().any(|&l| self.a.value(l) == Some(false)) {
            return Reconcile::Satisfied;
        }
        let free: Vec<Lit> = lits.iter().copied().filter(|&l| !self.a.holds(l)).collect();
        match free.as_slice() {
            [] => {
                self.pending.push(id);
                Reconcile::Violated
            }
            [w] => {
                let w = *w;
                if self.a.tracks_deps() {
                    mk_dl_bitmap(&lits, w, &self.a, &mut self.scratch);
                }
                let level = self.a.level();
                self.a.assign(w.complement(), level, Reason::Nogood(id), &self.scratch);
                self.stats.propagations += 1;
                if lits.len() >= 2 {
                    let other = lits.iter().copied().find(|&l| l != w).unwrap();
                    self.store.set_watches(id, [w, other]);
                }
                Reconcile::Asserted
            }
            _ => {
                if lits.len() >= 2 {
                    self.store.set_watches(id, [free[0], free[1]]);
                }
                Reconcile::Open
            }
        }
    }

    fn audit_fixpoint(&self) -> Result<()> {
        let bad = fixpoint_violations(&self.store, &self.a);
        if !bad.is_empty() {
            return Err(Error::Internal(format!("nogoods {bad:?} unit or violated at a fixpoint")));
        }
        self.a.check_coherence().map_err(Error::Internal)
    }
}

pub const CSV_HEADER: &str = "instance,mode,heuristic,workers,status,models,decisions,propagations,conflicts,learned,avg_learned_len,restarts,wall_ms,props_per_sec,decisions_per_sec,learned_per_sec,conflicts_per_sec";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatsFormat {
    Human,
    Csv,
}

impl FromStr for StatsFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "human" => Ok(StatsFormat::Human),
            "csv" => Ok(StatsFormat::Csv),
            _ => Err(Error::Config(format!("unknown stats format '{s}' (expected human or csv)"))),
        }
    }
}

pub fn csv_row(instance: &str, config: &SolverConfig, out: &SolveOutput) -> String {
    let s = &out.stats;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{:.3},{},{:.3},{:.1},{:.1},{:.1},{:.1}",
        instance,
        config.mode,
        config.heuristic.kind,
        config.workers,
        out.status,
        out.models.len(),
        s.decisions,
        s.propagations,
        s.conflicts,
        s.learned_count,
        s.avg_learned_len(),
        s.restarts,
        s.wall_time.as_secs_f64() * 1000.0,
        s.propagations_per_sec(),
        s.decisions_per_sec(),
        s.learned_per_sec(),
        s.conflicts_per_sec(),
    )
}

pub fn emit_stats(instance: &str, config: &SolverConfig, out: &SolveOutput, format: StatsFormat) -> String {
    match format {
        StatsFormat::Csv => format!("{CSV_HEADER}\n{}\n", csv_row(instance, config, out)),
        StatsFormat::Human => {
            let s = &out.stats;
            let mut t = String::new();
            let _ = writeln!(t, "instance      : {instance}");
            let _ = writeln!(
                t,
                "mode          : {} / {} / {} worker(s)",
                config.mode, config.heuristic.kind, config.workers
            );
            let _ = writeln!(t, "status        : {} ({} model(s))", out.status, out.models.len());
            let _ = writeln!(t, "decisions     : {} ({:.1}/s)", s.decisions, s.decisions_per_sec());
            let _ = writeln!(t, "propagations  : {} ({:.1}/s)", s.propagations, s.propagations_per_sec());
            let _ = writeln!(t, "conflicts     : {} ({:.1}/s)", s.conflicts, s.conflicts_per_sec());
            let _ = writeln!(
                t,
                "learned       : {} ({:.1}/s, avg length {:.3})",
                s.learned_count,
                s.learned_per_sec(),
                s.avg_learned_len()
            );
            let _ = writeln!(t, "restarts      : {}", s.restarts);
            let _ = writeln!(t, "wall time     : {:.3} ms", s.wall_time.as_secs_f64() * 1000.0);
            t
        }
    }
}
