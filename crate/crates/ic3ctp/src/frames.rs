//! The monotone frame sequence F_0..F_k. Monotonicity is structural: frames
//! are stored as deltas, where delta[i] holds the lemmas in F_i but not in
//! F_{i+1}, so F_i is the union of all deltas at levels >= i. Level 0 is the
//! initial cube itself, not lemma objects.
//!
//! Each level owns a solver session loaded with T and the frame's lemmas
//! (level 0 additionally carries the initial cube). Sessions never drop
//! clauses; when subsumption leaves too many dead clauses behind, the
//! session is rebuilt lazily.

use crate::logic::{diff, Clause, Cube};
use crate::sat::SolverSession;
use crate::transys::TransitionSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaOrigin {
    Generalized,
    Predicted,
    Pushed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma {
    pub clause: Clause,
    pub birth_level: usize,
    pub origin: LemmaOrigin,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("initiation violated: initial states intersect the blocked cube {0:?}")]
    InitiationViolation(Cube),
    #[error("lemma level {level} outside 1..={top}")]
    LevelOutOfRange { level: usize, top: usize },
}

/// Result of inserting a lemma.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddOutcome {
    Inserted,
    /// An equal or stronger lemma already covers every target level.
    Subsumed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditViolation {
    pub level: usize,
    pub kind: AuditKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuditKind {
    /// F_{level-1} ∧ T ∧ ¬c' was satisfiable for a lemma c of F_level.
    ConsecutionLeak(Clause),
    /// F_level ∧ ¬P was satisfiable although level < k.
    PropertyLeak,
}

pub struct FrameSequence {
    deltas: Vec<Vec<Lemma>>,
    solvers: Vec<SolverSession>,
    dead_clauses: Vec<usize>,
    live_clauses: Vec<usize>,
    init: Cube,
    conflict_budget: Option<u64>,
}

impl FrameSequence {
    /// Builds level 0: exactly the initial cube (plus T in its session).
    pub fn new(ts: &TransitionSystem) -> Self {
        Self::with_budget(ts, None)
    }

    /// Like `new`, but every session created by the sequence carries the
    /// given per-query conflict budget.
    pub fn with_budget(ts: &TransitionSystem, conflict_budget: Option<u64>) -> Self {
        let mut fs = FrameSequence {
            deltas: Vec::new(),
            solvers: Vec::new(),
            dead_clauses: Vec::new(),
            live_clauses: Vec::new(),
            init: ts.init.clone(),
            conflict_budget,
        };
        let mut s0 = fs.fresh_session(ts);
        ts.load_init(&mut s0);
        fs.deltas.push(Vec::new());
        fs.solvers.push(s0);
        fs.dead_clauses.push(0);
        fs.live_clauses.push(0);
        fs
    }

    fn fresh_session(&self, ts: &TransitionSystem) -> SolverSession {
        let mut s = SolverSession::new();
        s.set_conflict_budget(self.conflict_budget);
        ts.load_trans(&mut s);
        s
    }

    /// Top level k.
    pub fn top(&self) -> usize {
        self.deltas.len() - 1
    }

    /// Extends the sequence with a fresh top frame F_{k+1} = ⊤.
    pub fn push_frame(&mut self, ts: &TransitionSystem) {
        let s = self.fresh_session(ts);
        self.deltas.push(Vec::new());
        self.solvers.push(s);
        self.dead_clauses.push(0);
        self.live_clauses.push(0);
    }

    pub fn init(&self) -> &Cube {
        &self.init
    }

    /// Syntactic initiation check: `I ⇒ c` iff `I ∧ ¬c` has a complementary
    /// pair, i.e. `diff(¬c, I) ≠ ∅`. Exact for any cube I, including partial
    /// ones from uninitialized latches.
    pub fn initiation_holds(&self, c: &Clause) -> bool {
        !diff(&c.negate(), &self.init).is_empty()
    }

    /// Adds lemma `c` to F_1..F_level. Removes weaker (superset) lemmas at
    /// levels <= level; refuses when an equal or stronger lemma already sits
    /// at level >= level.
    pub fn add_lemma(
        &mut self,
        c: Clause,
        level: usize,
        origin: LemmaOrigin,
    ) -> Result<AddOutcome, FrameError> {
        if level == 0 || level > self.top() {
            return Err(FrameError::LevelOutOfRange {
                level,
                top: self.top(),
            });
        }
        if !self.initiation_holds(&c) {
            return Err(FrameError::InitiationViolation(c.negate()));
        }
        for j in level..=self.top() {
            if self.deltas[j].iter().any(|l| l.clause.subsumes(&c)) {
                return Ok(AddOutcome::Subsumed);
            }
        }
        for j in 1..=level {
            let before = self.deltas[j].len();
            self.deltas[j].retain(|l| !c.subsumes(&l.clause));
            self.dead_clauses[j] += before - self.deltas[j].len();
        }
        for j in 1..=level {
            self.solvers[j].add_clause(c.lits());
            self.live_clauses[j] += 1;
        }
        self.deltas[level].push(Lemma {
            clause: c,
            birth_level: level,
            origin,
        });
        Ok(AddOutcome::Inserted)
    }

    /// Moves a lemma from delta[level] up to delta[level+1] after a
    /// successful consecution push. Returns false if the lemma is gone
    /// (subsumed meanwhile).
    pub fn promote(&mut self, level: usize, clause: &Clause) -> bool {
        let Some(pos) = self.deltas[level].iter().position(|l| &l.clause == clause) else {
            return false;
        };
        let mut lemma = self.deltas[level].remove(pos);
        lemma.origin = LemmaOrigin::Pushed;
        // Already loaded in sessions 1..=level; only level+1 is new.
        self.solvers[level + 1].add_clause(lemma.clause.lits());
        self.live_clauses[level + 1] += 1;
        let target = level + 1;
        for j in 1..=target {
            let before = self.deltas[j].len();
            self.deltas[j]
                .retain(|l| !(lemma.clause.subsumes(&l.clause) && l.clause != lemma.clause));
            self.dead_clauses[j] += before - self.deltas[j].len();
        }
        self.deltas[target].push(lemma);
        true
    }

    /// Snapshot of delta[level] (the lemmas in F_level \ F_{level+1}).
    pub fn lemmas_at_exactly(&self, level: usize) -> Vec<Lemma> {
        self.deltas[level].clone()
    }

    pub fn delta_is_empty(&self, level: usize) -> bool {
        self.deltas[level].is_empty()
    }

    pub fn delta_contains(&self, level: usize, clause: &Clause) -> bool {
        self.deltas[level].iter().any(|l| &l.clause == clause)
    }

    /// All clauses of F_level as a set: the union of deltas at >= level.
    pub fn frame_clauses(&self, level: usize) -> Vec<Clause> {
        let mut out = Vec::new();
        for j in level.max(1)..=self.top() {
            out.extend(self.deltas[j].iter().map(|l| l.clause.clone()));
        }
        out
    }

    /// Lemma counts per level, for reporting.
    pub fn level_sizes(&self) -> Vec<usize> {
        self.deltas.iter().map(|d| d.len()).collect()
    }

    pub fn solver_mut(&mut self, level: usize) -> &mut SolverSession {
        &mut self.solvers[level]
    }

    pub fn solver(&self, level: usize) -> &SolverSession {
        &self.solvers[level]
    }

    /// Rebuilds sessions buried in subsumed clauses; called between phases.
    pub fn compact(&mut self, ts: &TransitionSystem) {
        for level in 1..=self.top() {
            if self.dead_clauses[level] > 50 && self.dead_clauses[level] > self.live_clauses[level]
            {
                let clauses = self.frame_clauses(level);
                let mut s = self.fresh_session(ts);
                for c in &clauses {
                    s.add_clause(c.lits());
                }
                self.solvers[level] = s;
                self.live_clauses[level] = clauses.len();
                self.dead_clauses[level] = 0;
            }
        }
    }

    /// Checks the semantic frame invariants by SAT: consecution of every
    /// lemma of F_{i+1} against F_i ∧ T, and F_i ⇒ P for i < k. Returns all
    /// violations; empty on a healthy sequence.
    pub fn audit(&mut self, ts: &TransitionSystem) -> Vec<AuditViolation> {
        let mut violations = Vec::new();
        for i in 0..self.top() {
            for c in self.frame_clauses(i + 1) {
                let primed = ts.prime(&c.negate()).expect("lemma over latch variables");
                let outcome = self.solvers[i].solve(primed.lits());
                if outcome == Ok(crate::sat::SatOutcome::Sat) {
                    violations.push(AuditViolation {
                        level: i + 1,
                        kind: AuditKind::ConsecutionLeak(c),
                    });
                }
            }
            if let crate::transys::BadSignal::Lit(bad) = ts.bad {
                if self.solvers[i].solve(&[bad]) == Ok(crate::sat::SatOutcome::Sat) {
                    violations.push(AuditViolation {
                        level: i,
                        kind: AuditKind::PropertyLeak,
                    });
                }
            }
        }
        violations
    }
}
