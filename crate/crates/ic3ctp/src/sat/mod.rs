//! Incremental, assumption-based SAT solving behind a solver-agnostic
//! contract. Clauses are never removed, only deactivated through activation
//! literals; verdicts are deterministic given an identical call history.

mod cdcl;

use crate::logic::{Lit, Var};
use std::io::{self, Write};

pub use cdcl::SatOutcome;

/// The solver could not decide within its resource budget. Callers must treat
/// this as "unknown", never as UNSAT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("solver budget exceeded, verdict unknown")]
pub struct SolverUnknown;

/// Total assignment from the most recent satisfiable call.
pub struct Model {
    values: Vec<bool>, // indexed by variable, slot 0 unused
}

impl Model {
    /// Variables registered after the call read as `false`, matching the
    /// backend's default polarity for unconstrained variables.
    pub fn value(&self, v: Var) -> bool {
        self.values
            .get(v.index() as usize)
            .copied()
            .unwrap_or(false)
    }

    pub fn lit_value(&self, l: Lit) -> bool {
        l.eval(self.value(l.var()))
    }

    /// The literal of `v` that holds in this model.
    pub fn lit_of(&self, v: Var) -> Lit {
        Lit::new(v, !self.value(v))
    }
}

/// One incremental solving session. Distinct sessions share nothing.
pub struct SolverSession {
    solver: cdcl::Cdcl,
    db: Vec<Vec<Lit>>, // every clause as added, for the DIMACS dump
    budget: Option<u64>,
    model: Option<Model>,
    solves: u64,
}

impl Default for SolverSession {
    fn default() -> Self {
        Self::new()
    }
}

impl SolverSession {
    pub fn new() -> Self {
        SolverSession {
            solver: cdcl::Cdcl::new(),
            db: Vec::new(),
            budget: None,
            model: None,
            solves: 0,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.solver.num_vars()
    }

    /// Registers variables up to and including `v`.
    pub fn ensure_var(&mut self, v: Var) {
        self.solver.ensure_var(v);
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var::new(self.solver.num_vars() + 1);
        self.solver.ensure_var(v);
        v
    }

    /// Adds a permanently active clause.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        self.db.push(lits.to_vec());
        self.solver.add_clause(lits);
    }

    /// Adds a clause that is active only while `tag` is assumed.
    pub fn add_clause_tagged(&mut self, lits: &[Lit], tag: Lit) {
        let mut c = Vec::with_capacity(lits.len() + 1);
        c.push(!tag);
        c.extend_from_slice(lits);
        self.add_clause(&c);
    }

    /// Fresh activation literal for temporary query clauses.
    pub fn new_activation(&mut self) -> Lit {
        Lit::positive(self.new_var())
    }

    /// Permanently deactivates every clause tagged with `tag`.
    pub fn release(&mut self, tag: Lit) {
        self.add_clause(&[!tag]);
    }

    /// Per-call conflict budget; exceeding it yields `SolverUnknown`.
    pub fn set_conflict_budget(&mut self, budget: Option<u64>) {
        self.budget = budget;
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<SatOutcome, SolverUnknown> {
        self.solves += 1;
        self.model = None;
        match self.solver.solve(assumptions, self.budget) {
            Ok(SatOutcome::Sat) => {
                self.model = Some(Model {
                    values: self.solver.model().expect("model after SAT").to_vec(),
                });
                Ok(SatOutcome::Sat)
            }
            Ok(SatOutcome::Unsat) => Ok(SatOutcome::Unsat),
            Err(cdcl::BudgetExceeded) => Err(SolverUnknown),
        }
    }

    /// Model of the most recent call; `None` if it was not satisfiable.
    pub fn model(&self) -> Option<&Model> {
        self.model.as_ref()
    }

    pub fn num_solves(&self) -> u64 {
        self.solves
    }

    /// Dumps the clause database in DIMACS CNF, activation literals included
    /// as plain variables.
    pub fn write_dimacs<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "p cnf {} {}", self.solver.num_vars(), self.db.len())?;
        for c in &self.db {
            for l in c {
                write!(w, "{} ", l)?;
            }
            writeln!(w, "0")?;
        }
        Ok(())
    }
}
