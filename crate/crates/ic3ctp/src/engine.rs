//! The IC3 loop: relative-inductiveness queries, recursive blocking,
//! drop-variable generalization with the prediction fast path, lemma pushing,
//! propagation, and verdict certification.

use crate::certify::{self, InvariantCheck, ReplayResult, Trace, TraceStep};
use crate::frames::{FrameSequence, LemmaOrigin};
use crate::logic::{Clause, Cube, Lit};
use crate::prediction::{self, CandidateCheck, FailurePushTable, PredictPath, PredictionStats};
use crate::sat::{SatOutcome, SolverSession};
use crate::transys::{BadSignal, TransitionSystem};
use std::path::PathBuf;
use std::rc::Rc;
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub struct EngineOptions {
    /// Lemma prediction before variable dropping (on by default).
    pub prediction: bool,
    /// Stop with Unknown once the frame sequence exceeds this many levels.
    pub max_frames: Option<usize>,
    /// Wall-clock budget for the whole check.
    pub timeout: Option<Duration>,
    /// Recursion cap for the blocking phase; unbounded by default.
    pub max_depth: Option<usize>,
    /// Audit the frame invariants after every phase (debug).
    pub audit: bool,
    /// Per-query conflict budget for the SAT backend.
    pub conflict_budget: Option<u64>,
    /// Dump every frame session as DIMACS into this directory at exit.
    pub dimacs_dump: Option<PathBuf>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            prediction: true,
            max_frames: None,
            timeout: None,
            max_depth: None,
            audit: false,
            conflict_budget: None,
            dimacs_dump: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Safe { invariant: Vec<Clause> },
    Unsafe { trace: Trace },
    Unknown { reason: String },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Safe { .. } => "SAFE",
            Verdict::Unsafe { .. } => "UNSAFE",
            Verdict::Unknown { .. } => "UNKNOWN",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("solver returned unknown (budget exceeded)")]
    SolverUnknown,
    #[error("timeout")]
    Timeout,
    #[error("blocking recursion depth limit reached")]
    DepthLimit,
    #[error("internal error: {0}")]
    Internal(String),
}

/// SAT query counters split by phase.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct QueryCounters {
    pub blocking: u64,
    pub generalization: u64,
    pub prediction: u64,
    pub propagation: u64,
}

impl QueryCounters {
    pub fn total(&self) -> u64 {
        self.blocking + self.generalization + self.prediction + self.propagation
    }

    fn bump(&mut self, phase: QueryPhase) {
        match phase {
            QueryPhase::Blocking => self.blocking += 1,
            QueryPhase::Generalization => self.generalization += 1,
            QueryPhase::Prediction => self.prediction += 1,
            QueryPhase::Propagation => self.propagation += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum QueryPhase {
    Blocking,
    Generalization,
    Prediction,
    Propagation,
}

#[derive(Debug, Default, Clone)]
pub struct RunStats {
    /// Top frame level reached.
    pub frames: usize,
    pub lemmas_generalized: u64,
    pub lemmas_predicted: u64,
    pub lemmas_pushed: u64,
    pub prediction: PredictionStats,
    pub queries: QueryCounters,
    /// Prediction successes through the parent-push branch.
    pub pred_parent_push_successes: u64,
    /// Prediction successes through the extended-candidate branch.
    pub pred_extended_successes: u64,
    /// Diff-set shrink events during candidate refinement.
    pub pred_refinement_shrinks: u64,
    /// Predicted-lemma contract violations (must stay 0).
    pub pred_contract_violations: u64,
}

pub struct CheckResult {
    pub verdict: Verdict,
    pub stats: RunStats,
}

enum Consecution {
    Inductive,
    Cti {
        predecessor: Cube,
        inputs: Vec<bool>,
        successor: Cube,
    },
}

struct Obligation {
    state: Cube,
    /// Inputs taking this state to its parent (for the root: the inputs
    /// exhibiting the bad signal).
    inputs: Vec<bool>,
    parent: Option<Rc<Obligation>>,
    depth: usize,
}

enum BlockOutcome {
    Blocked,
    CexReached(Rc<Obligation>),
}

pub struct Engine<'a> {
    ts: &'a TransitionSystem,
    opts: EngineOptions,
    frames: FrameSequence,
    table: FailurePushTable,
    stats: RunStats,
    deadline: Option<Instant>,
}

impl<'a> Engine<'a> {
    pub fn new(ts: &'a TransitionSystem, opts: EngineOptions) -> Self {
        let frames = FrameSequence::with_budget(ts, opts.conflict_budget);
        Engine {
            ts,
            opts,
            frames,
            table: FailurePushTable::new(),
            stats: RunStats::default(),
            deadline: None,
        }
    }

    pub fn run(mut self) -> CheckResult {
        self.deadline = self.opts.timeout.map(|t| Instant::now() + t);
        let verdict = match self.run_inner() {
            Ok(v) => v,
            Err(e) => Verdict::Unknown {
                reason: e.to_string(),
            },
        };
        if let Some(dir) = self.opts.dimacs_dump.clone() {
            let _ = self.dump_dimacs(&dir);
        }
        CheckResult {
            verdict,
            stats: self.stats,
        }
    }

    fn run_inner(&mut self) -> Result<Verdict, EngineError> {
        let bad = match self.ts.bad {
            BadSignal::Const(false) => {
                // Nothing to block; the empty invariant certifies safety.
                return self.certified_safe(Vec::new());
            }
            BadSignal::Const(true) => {
                let trace = Trace {
                    steps: vec![self.default_initial_step()],
                };
                return self.certified_unsafe(trace);
            }
            BadSignal::Lit(l) => l,
        };
        // Level-0 check: sat(I ∧ ¬P)?
        {
            let mut session = SolverSession::new();
            session.set_conflict_budget(self.opts.conflict_budget);
            self.ts.load_trans(&mut session);
            self.ts.load_init(&mut session);
            self.stats.queries.blocking += 1;
            match session.solve(&[bad]) {
                Ok(SatOutcome::Sat) => {
                    let m = session.model().unwrap();
                    let trace = Trace {
                        steps: vec![TraceStep {
                            latches: self.ts.state_values(&self.ts.state_from_model(m)),
                            inputs: self.ts.inputs_from_model(m),
                        }],
                    };
                    return self.certified_unsafe(trace);
                }
                Ok(SatOutcome::Unsat) => {}
                Err(_) => return Err(EngineError::SolverUnknown),
            }
        }
        self.push_frame();
        loop {
            self.check_deadline()?;
            // Blocking phase: make F_k exclude the bad states.
            loop {
                let k = self.frames.top();
                let Some((state, inputs)) = self.get_bad(bad)? else {
                    break;
                };
                let root = Rc::new(Obligation {
                    state,
                    inputs,
                    parent: None,
                    depth: 0,
                });
                match self.block_rec(&root, k, k)? {
                    BlockOutcome::Blocked => {}
                    BlockOutcome::CexReached(chain) => {
                        let trace = self.assemble_trace(chain);
                        return self.certified_unsafe(trace);
                    }
                }
            }
            self.audit_if_enabled()?;
            if let Some(max) = self.opts.max_frames {
                if self.frames.top() >= max {
                    return Ok(Verdict::Unknown {
                        reason: format!("frame limit {max} reached"),
                    });
                }
            }
            self.push_frame();
            if let Some(fixpoint) = self.propagate()? {
                let invariant = self.frames.frame_clauses(fixpoint);
                return self.certified_safe(invariant);
            }
            self.audit_if_enabled()?;
            self.frames.compact(self.ts);
        }
    }

    fn push_frame(&mut self) {
        self.frames.push_frame(self.ts);
        self.stats.frames = self.frames.top();
    }

    fn check_deadline(&self) -> Result<(), EngineError> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(EngineError::Timeout),
            _ => Ok(()),
        }
    }

    fn audit_if_enabled(&mut self) -> Result<(), EngineError> {
        if !self.opts.audit {
            return Ok(());
        }
        let violations = self.frames.audit(self.ts);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(EngineError::Internal(format!(
                "frame audit found {} violation(s): {:?}",
                violations.len(),
                violations[0]
            )))
        }
    }

    /// sat(F_k ∧ ¬P): a bad state within the top frame, with the inputs that
    /// exhibit the bad signal.
    fn get_bad(&mut self, bad: Lit) -> Result<Option<(Cube, Vec<bool>)>, EngineError> {
        self.stats.queries.bump(QueryPhase::Blocking);
        let k = self.frames.top();
        let session = self.frames.solver_mut(k);
        match session.solve(&[bad]) {
            Ok(SatOutcome::Sat) => {
                let m = session.model().unwrap();
                Ok(Some((
                    self.ts.state_from_model(m),
                    self.ts.inputs_from_model(m),
                )))
            }
            Ok(SatOutcome::Unsat) => Ok(None),
            Err(_) => Err(EngineError::SolverUnknown),
        }
    }

    fn consecution(
        &mut self,
        c: &Clause,
        level: usize,
        phase: QueryPhase,
    ) -> Result<Consecution, EngineError> {
        Self::consecution_raw(
            &mut self.frames,
            self.ts,
            &mut self.stats.queries,
            c,
            level,
            phase,
        )
    }

    /// The core query sat(F_level ∧ c ∧ T ∧ ¬c'): the clause joins under a
    /// one-shot activation literal, the cube ¬c' rides as assumptions. On SAT
    /// the model yields the predecessor state, its inputs, and the successor.
    fn consecution_raw(
        frames: &mut FrameSequence,
        ts: &TransitionSystem,
        queries: &mut QueryCounters,
        c: &Clause,
        level: usize,
        phase: QueryPhase,
    ) -> Result<Consecution, EngineError> {
        queries.bump(phase);
        let session = frames.solver_mut(level);
        let act = session.new_activation();
        session.add_clause_tagged(c.lits(), act);
        let mut assumptions = Vec::with_capacity(c.len() + 1);
        assumptions.push(act);
        for &l in c.lits() {
            assumptions.push(ts.prime_lit(!l).expect("consecution clause over latches"));
        }
        let outcome = session.solve(&assumptions);
        let result = match outcome {
            Ok(SatOutcome::Unsat) => Ok(Consecution::Inductive),
            Ok(SatOutcome::Sat) => {
                let m = session.model().unwrap();
                Ok(Consecution::Cti {
                    predecessor: ts.state_from_model(m),
                    inputs: ts.inputs_from_model(m),
                    successor: ts.successor_from_model(m),
                })
            }
            Err(_) => Err(EngineError::SolverUnknown),
        };
        session.release(act);
        result
    }

    /// Recursive blocking of an obligation at `level` (Alg.-style: reaching
    /// level 0 means the chain starts in an initial state).
    fn block_rec(
        &mut self,
        obl: &Rc<Obligation>,
        level: usize,
        k: usize,
    ) -> Result<BlockOutcome, EngineError> {
        self.check_deadline()?;
        if let Some(cap) = self.opts.max_depth {
            if obl.depth > cap {
                return Err(EngineError::DepthLimit);
            }
        }
        if level == 0 {
            return Ok(BlockOutcome::CexReached(obl.clone()));
        }
        let not_c = obl.state.negate();
        loop {
            match self.consecution(&not_c, level - 1, QueryPhase::Blocking)? {
                Consecution::Inductive => break,
                Consecution::Cti {
                    predecessor,
                    inputs,
                    ..
                } => {
                    let child = Rc::new(Obligation {
                        state: predecessor,
                        inputs,
                        parent: Some(obl.clone()),
                        depth: obl.depth + 1,
                    });
                    if let BlockOutcome::CexReached(chain) = self.block_rec(&child, level - 1, k)? {
                        return Ok(BlockOutcome::CexReached(chain));
                    }
                }
            }
        }
        let (mic_cube, origin) = self.generalize(obl.state.clone(), level)?;
        let mic = mic_cube.negate();
        // Push the lemma as far as consecution holds; a failed push records
        // the counterexample-to-propagation successor.
        let mut i = level;
        while i < k {
            match self.consecution(&mic, i, QueryPhase::Blocking)? {
                Consecution::Inductive => i += 1,
                Consecution::Cti { successor, .. } => {
                    if self.opts.prediction {
                        self.table.record(mic.clone(), i, successor);
                    }
                    break;
                }
            }
        }
        self.frames
            .add_lemma(mic, i, origin)
            .map_err(|e| EngineError::Internal(e.to_string()))?;
        match origin {
            LemmaOrigin::Generalized => self.stats.lemmas_generalized += 1,
            LemmaOrigin::Predicted => self.stats.lemmas_predicted += 1,
            LemmaOrigin::Pushed => {}
        }
        Ok(BlockOutcome::Blocked)
    }

    /// Expands the blocked cube `b`: first the prediction fast path, then the
    /// drop-variable loop over a snapshot of b's literals in descending
    /// variable order, each drop attempted once.
    fn generalize(&mut self, b: Cube, level: usize) -> Result<(Cube, LemmaOrigin), EngineError> {
        self.stats.prediction.n_g += 1;
        if self.opts.prediction && level >= 1 {
            let not_b = b.negate();
            let parents = prediction::parent_lemmas(&self.frames, &not_b, level - 1);
            if !parents.is_empty() {
                let Engine {
                    frames,
                    ts,
                    table,
                    stats,
                    ..
                } = self;
                let RunStats {
                    prediction: pstats,
                    queries,
                    ..
                } = stats;
                let report = prediction::predict(
                    &b,
                    &parents,
                    level - 1,
                    table,
                    pstats,
                    &ts.init,
                    |cand| match Self::consecution_raw(
                        frames,
                        ts,
                        queries,
                        cand,
                        level - 1,
                        QueryPhase::Prediction,
                    )? {
                        Consecution::Inductive => Ok(CandidateCheck::Accepted),
                        Consecution::Cti { successor, .. } => {
                            Ok(CandidateCheck::Rejected { successor })
                        }
                    },
                )?;
                self.stats.pred_refinement_shrinks += report.refinement_shrinks;
                self.stats.pred_contract_violations += report.contract_violations;
                if let Some(predicted) = report.predicted {
                    match predicted.path {
                        PredictPath::ParentPush => self.stats.pred_parent_push_successes += 1,
                        PredictPath::ExtendedCandidate => self.stats.pred_extended_successes += 1,
                    }
                    return Ok((predicted.cube, LemmaOrigin::Predicted));
                }
            }
        }
        let snapshot: Vec<Lit> = b.lits().to_vec();
        let mut cur = b;
        for &l in snapshot.iter().rev() {
            let cand = cur.without(l);
            if !self.frames.initiation_holds(&cand.negate()) {
                continue;
            }
            match self.consecution(&cand.negate(), level - 1, QueryPhase::Generalization)? {
                Consecution::Inductive => cur = cand,
                Consecution::Cti { .. } => {}
            }
        }
        Ok((cur, LemmaOrigin::Generalized))
    }

    /// Propagation phase: clears the failure-push table, then tries to move
    /// every lemma of F_i \ F_{i+1} one level up. Returns the fixpoint level
    /// when some delta empties out.
    fn propagate(&mut self) -> Result<Option<usize>, EngineError> {
        self.table.clear();
        let k = self.frames.top();
        for i in 1..k {
            for lemma in self.frames.lemmas_at_exactly(i) {
                self.check_deadline()?;
                if !self.frames.delta_contains(i, &lemma.clause) {
                    continue; // displaced by subsumption meanwhile
                }
                match self.consecution(&lemma.clause, i, QueryPhase::Propagation)? {
                    Consecution::Inductive => {
                        if self.frames.promote(i, &lemma.clause) {
                            self.stats.lemmas_pushed += 1;
                        }
                    }
                    Consecution::Cti { successor, .. } => {
                        if self.opts.prediction {
                            self.table.record(lemma.clause.clone(), i, successor);
                        }
                    }
                }
            }
            if self.frames.delta_is_empty(i) {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn default_initial_step(&self) -> TraceStep {
        let latches = self
            .ts
            .model
            .latches
            .iter()
            .map(|l| matches!(l.reset, crate::aiger::LatchReset::One))
            .collect();
        TraceStep {
            latches,
            inputs: vec![false; self.ts.num_inputs()],
        }
    }

    fn assemble_trace(&self, chain: Rc<Obligation>) -> Trace {
        let mut steps = Vec::new();
        let mut cur = Some(chain);
        while let Some(o) = cur {
            steps.push(TraceStep {
                latches: self.ts.state_values(&o.state),
                inputs: o.inputs.clone(),
            });
            cur = o.parent.clone();
        }
        Trace { steps }
    }

    fn certified_safe(&mut self, invariant: Vec<Clause>) -> Result<Verdict, EngineError> {
        match certify::check_invariant(self.ts, &invariant) {
            InvariantCheck::Valid => Ok(Verdict::Safe { invariant }),
            v => Err(EngineError::Internal(format!(
                "invariant certification failed: {v:?}"
            ))),
        }
    }

    fn certified_unsafe(&mut self, trace: Trace) -> Result<Verdict, EngineError> {
        match certify::replay(self.ts, &trace) {
            ReplayResult::Confirmed => Ok(Verdict::Unsafe { trace }),
            broken => Err(EngineError::Internal(format!(
                "trace replay failed: {broken:?}"
            ))),
        }
    }

    fn dump_dimacs(&self, dir: &std::path::Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for level in 0..=self.frames.top() {
            let path = dir.join(format!("frame_{level}.cnf"));
            let file = std::fs::File::create(path)?;
            self.frames.solver(level).write_dimacs(file)?;
        }
        Ok(())
    }
}

/// Convenience wrapper: encode-and-check with the given options.
pub fn check(ts: &TransitionSystem, opts: EngineOptions) -> CheckResult {
    Engine::new(ts, opts).run()
}
