//! Reference CDCL solver: two-watched-literal propagation, first-UIP clause
//! learning, VSIDS branching with deterministic tie-breaking. No restarts.
//!
//! Decisions always assign `false` first, so unconstrained variables come out
//! `false` in every model and extracted states are reproducible across runs.

use crate::logic::{Lit, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatOutcome {
    Sat,
    Unsat,
}

/// Conflict budget exhausted; the verdict is unknown. The session stays usable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExceeded;

struct DbClause {
    lits: Vec<Lit>,
}

/// Deterministic max-heap over variables ordered by (activity, lower index).
struct VarOrder {
    heap: Vec<u32>,
    pos: Vec<usize>, // usize::MAX when absent
    act: Vec<f64>,
}

const ABSENT: usize = usize::MAX;

impl VarOrder {
    fn new() -> Self {
        VarOrder {
            heap: Vec::new(),
            pos: vec![ABSENT],
            act: vec![0.0],
        }
    }

    fn grow(&mut self, n_vars: usize) {
        while self.pos.len() <= n_vars {
            let v = self.pos.len() as u32;
            self.pos.push(ABSENT);
            self.act.push(0.0);
            self.insert(v);
        }
    }

    fn before(&self, a: u32, b: u32) -> bool {
        let (aa, ab) = (self.act[a as usize], self.act[b as usize]);
        aa > ab || (aa == ab && a < b)
    }

    fn insert(&mut self, v: u32) {
        if self.pos[v as usize] != ABSENT {
            return;
        }
        self.pos[v as usize] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1);
    }

    fn pop(&mut self) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.before(self.heap[i], self.heap[parent]) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && self.before(self.heap[l], self.heap[best]) {
                best = l;
            }
            if r < self.heap.len() && self.before(self.heap[r], self.heap[best]) {
                best = r;
            }
            if best == i {
                return;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i] as usize] = i;
        self.pos[self.heap[j] as usize] = j;
    }

    fn bump(&mut self, v: u32, inc: f64) {
        self.act[v as usize] += inc;
        let p = self.pos[v as usize];
        if p != ABSENT {
            self.sift_up(p);
        }
    }

    fn rescale(&mut self) {
        for a in self.act.iter_mut() {
            *a *= 1e-100;
        }
    }
}

pub struct Cdcl {
    clauses: Vec<DbClause>,
    watches: Vec<Vec<u32>>, // indexed by literal code
    assign: Vec<Option<bool>>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    order: VarOrder,
    var_inc: f64,
    seen: Vec<bool>,
    unsat: bool,
    model: Option<Vec<bool>>,
    num_conflicts: u64,
}

impl Cdcl {
    pub fn new() -> Self {
        Cdcl {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 4],
            assign: vec![None],
            level: vec![0],
            reason: vec![None],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            order: VarOrder::new(),
            var_inc: 1.0,
            seen: vec![false],
            unsat: false,
            model: None,
            num_conflicts: 0,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.assign.len() as u32 - 1
    }

    pub fn ensure_var(&mut self, v: Var) {
        while self.num_vars() < v.index() {
            self.assign.push(None);
            self.level.push(0);
            self.reason.push(None);
            self.seen.push(false);
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
        }
        self.order.grow(self.num_vars() as usize);
    }

    #[inline]
    fn value_lit(&self, l: Lit) -> Option<bool> {
        self.assign[l.var().index() as usize].map(|b| b ^ l.is_negated())
    }

    #[inline]
    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: Option<u32>) {
        let v = l.var().index() as usize;
        debug_assert!(self.assign[v].is_none());
        self.assign[v] = Some(!l.is_negated());
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn new_level(&mut self) {
        self.trail_lim.push(self.trail.len());
    }

    fn backtrack(&mut self, target: usize) {
        if self.decision_level() <= target {
            return;
        }
        let bound = self.trail_lim[target];
        while self.trail.len() > bound {
            let l = self.trail.pop().unwrap();
            let v = l.var().index() as usize;
            self.assign[v] = None;
            self.reason[v] = None;
            self.order.insert(v as u32);
        }
        self.trail_lim.truncate(target);
        self.qhead = self.trail.len();
    }

    /// Adds a clause, simplified against the permanent (level-0) assignment.
    /// Must be called with the trail at level 0.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        debug_assert_eq!(self.decision_level(), 0);
        if self.unsat {
            return;
        }
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return; // tautology
        }
        for &l in &c {
            self.ensure_var(l.var());
        }
        c.retain(|&l| self.value_lit(l) != Some(false));
        if c.iter().any(|&l| self.value_lit(l) == Some(true)) {
            return;
        }
        match c.len() {
            0 => self.unsat = true,
            1 => {
                self.enqueue(c[0], None);
                if self.propagate().is_some() {
                    self.unsat = true;
                }
            }
            _ => {
                self.attach(c);
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>) -> u32 {
        let idx = self.clauses.len() as u32;
        self.watches[lits[0].code() as usize].push(idx);
        self.watches[lits[1].code() as usize].push(idx);
        self.clauses.push(DbClause { lits });
        idx
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let fidx = false_lit.code() as usize;
            let mut ws = std::mem::take(&mut self.watches[fidx]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let first = {
                    let c = &mut self.clauses[ci as usize].lits;
                    if c[0] == false_lit {
                        c.swap(0, 1);
                    }
                    c[0]
                };
                if self.value_lit(first) == Some(true) {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                let len = self.clauses[ci as usize].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let lk = self.clauses[ci as usize].lits[k];
                    if self.value_lit(lk) != Some(false) {
                        self.clauses[ci as usize].lits.swap(1, k);
                        self.watches[lk.code() as usize].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                // unit or conflicting
                ws[j] = ci;
                j += 1;
                if self.value_lit(first) == Some(false) {
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                    ws.truncate(j);
                    self.watches[fidx] = ws;
                    self.qhead = self.trail.len();
                    return Some(ci);
                }
                self.enqueue(first, Some(ci));
            }
            ws.truncate(j);
            self.watches[fidx] = ws;
        }
        None
    }

    fn bump_var(&mut self, v: u32) {
        self.order.bump(v, self.var_inc);
        if self.order.act[v as usize] > 1e100 {
            self.order.rescale();
            self.var_inc *= 1e-100;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, usize) {
        let current = self.decision_level() as u32;
        let mut learnt: Vec<Lit> = vec![Lit::positive(Var::new(1))]; // placeholder
        let mut counter = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            let start = usize::from(p.is_some());
            let clen = self.clauses[confl as usize].lits.len();
            for k in start..clen {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var().index() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v as u32);
                    if self.level[v] >= current {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().index() as usize] {
                    break;
                }
            }
            let pl = self.trail[idx];
            self.seen[pl.var().index() as usize] = false;
            counter -= 1;
            if counter == 0 {
                learnt[0] = !pl;
                break;
            }
            p = Some(pl);
            confl = self.reason[pl.var().index() as usize].expect("propagated literal has reason");
        }
        for &l in &learnt[1..] {
            self.seen[l.var().index() as usize] = false;
        }
        // Backjump to the highest level among the remaining literals.
        let mut bj = 0usize;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var().index() as usize]
                    > self.level[learnt[max_i].var().index() as usize]
                {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            bj = self.level[learnt[1].var().index() as usize] as usize;
        }
        (learnt, bj)
    }

    /// Solves under the given assumptions. `budget` caps the number of
    /// conflicts for this call; `None` means unbounded.
    pub fn solve(
        &mut self,
        assumptions: &[Lit],
        budget: Option<u64>,
    ) -> Result<SatOutcome, BudgetExceeded> {
        self.model = None;
        if self.unsat {
            return Ok(SatOutcome::Unsat);
        }
        for &l in assumptions {
            self.ensure_var(l.var());
        }
        self.backtrack(0);
        let mut conflicts_here = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.num_conflicts += 1;
                conflicts_here += 1;
                if self.decision_level() == 0 {
                    self.unsat = true;
                    return Ok(SatOutcome::Unsat);
                }
                let (learnt, bj) = self.analyze(confl);
                self.backtrack(bj);
                if learnt.len() == 1 {
                    debug_assert_eq!(self.decision_level(), 0);
                    if self.value_lit(learnt[0]) == Some(false) {
                        self.unsat = true;
                        return Ok(SatOutcome::Unsat);
                    }
                    if self.value_lit(learnt[0]).is_none() {
                        self.enqueue(learnt[0], None);
                    }
                } else {
                    let asserting = learnt[0];
                    let ci = self.attach(learnt);
                    self.enqueue(asserting, Some(ci));
                }
                self.var_inc /= 0.95;
                if let Some(max) = budget {
                    if conflicts_here >= max {
                        self.backtrack(0);
                        return Err(BudgetExceeded);
                    }
                }
            } else if self.decision_level() < assumptions.len() {
                let p = assumptions[self.decision_level()];
                match self.value_lit(p) {
                    Some(true) => self.new_level(),
                    Some(false) => {
                        self.backtrack(0);
                        return Ok(SatOutcome::Unsat);
                    }
                    None => {
                        self.new_level();
                        self.enqueue(p, None);
                    }
                }
            } else if let Some(v) = self.pick_branch() {
                self.new_level();
                // default polarity: false
                self.enqueue(Lit::negative(Var::new(v)), None);
            } else {
                let model = self
                    .assign
                    .iter()
                    .map(|a| a.unwrap_or(false))
                    .collect::<Vec<bool>>();
                self.model = Some(model);
                self.backtrack(0);
                return Ok(SatOutcome::Sat);
            }
        }
    }

    fn pick_branch(&mut self) -> Option<u32> {
        while let Some(v) = self.order.pop() {
            if self.assign[v as usize].is_none() {
                return Some(v);
            }
        }
        None
    }

    /// Total assignment of the most recent satisfiable call, indexed by
    /// variable; `None` if the last call was not SAT.
    pub fn model(&self) -> Option<&[bool]> {
        self.model.as_deref()
    }
}
