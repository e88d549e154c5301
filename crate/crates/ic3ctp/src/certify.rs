//! Independent validation of verdicts: inductive-invariant checking with
//! fresh solver sessions, counterexample replay by AIG simulation, and an
//! explicit-state reachability oracle for small models.

use crate::logic::{Clause, Cube};
use crate::sat::{SatOutcome, SolverSession};
use crate::transys::{BadSignal, TransitionSystem};
use std::fmt;
use std::io::{self, Write};

/// A counterexample: one (latch assignment, input assignment) pair per step,
/// both total and in AIG declaration order. The first step satisfies the
/// initial states, consecutive steps are linked by simulation, and the final
/// step's inputs exhibit the bad signal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub latches: Vec<bool>,
    pub inputs: Vec<bool>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantCondition {
    /// `I(X) ⇒ INV(X)` failed.
    Initiation,
    /// `INV(X) ∧ T(X,Y,X') ⇒ INV(X')` failed.
    Consecution,
    /// `INV(X) ⇒ P(X)` failed.
    Property,
}

impl fmt::Display for InvariantCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantCondition::Initiation => write!(f, "initiation"),
            InvariantCondition::Consecution => write!(f, "consecution"),
            InvariantCondition::Property => write!(f, "property"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantCheck {
    Valid,
    Violation {
        condition: InvariantCondition,
        /// Witness state (and for consecution its successor).
        state: Cube,
        successor: Option<Cube>,
    },
}

/// Checks the three inductive-invariant conditions with fresh solver
/// sessions, independent of any engine state.
pub fn check_invariant(ts: &TransitionSystem, inv: &[Clause]) -> InvariantCheck {
    // Initiation: I ∧ ¬c satisfiable for some c ∈ INV?
    let mut init_session = SolverSession::new();
    ts.load_trans(&mut init_session);
    ts.load_init(&mut init_session);
    for c in inv {
        let cube = c.negate();
        if init_session.solve(cube.lits()).expect("no budget set") == SatOutcome::Sat {
            let m = init_session.model().unwrap();
            return InvariantCheck::Violation {
                condition: InvariantCondition::Initiation,
                state: ts.state_from_model(m),
                successor: None,
            };
        }
    }
    // Consecution and property share one session: T plus all of INV.
    let mut session = SolverSession::new();
    ts.load_trans(&mut session);
    for c in inv {
        session.add_clause(c.lits());
    }
    for c in inv {
        let primed = ts
            .prime(&c.negate())
            .expect("invariant clause over latch variables");
        if session.solve(primed.lits()).expect("no budget set") == SatOutcome::Sat {
            let m = session.model().unwrap();
            return InvariantCheck::Violation {
                condition: InvariantCondition::Consecution,
                state: ts.state_from_model(m),
                successor: Some(ts.successor_from_model(m)),
            };
        }
    }
    match ts.bad {
        BadSignal::Const(false) => {}
        BadSignal::Const(true) => {
            // Any INV state violates the property; report one if INV is
            // satisfiable at all.
            if session.solve(&[]).expect("no budget set") == SatOutcome::Sat {
                let m = session.model().unwrap();
                return InvariantCheck::Violation {
                    condition: InvariantCondition::Property,
                    state: ts.state_from_model(m),
                    successor: None,
                };
            }
        }
        BadSignal::Lit(bad) => {
            if session.solve(&[bad]).expect("no budget set") == SatOutcome::Sat {
                let m = session.model().unwrap();
                return InvariantCheck::Violation {
                    condition: InvariantCondition::Property,
                    state: ts.state_from_model(m),
                    successor: None,
                };
            }
        }
    }
    InvariantCheck::Valid
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayResult {
    Confirmed,
    Broken { step: usize, reason: ReplayBreak },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayBreak {
    EmptyTrace,
    InitViolated,
    WrongArity,
    TransitionMismatch,
    PropertyNotViolated,
}

impl fmt::Display for ReplayBreak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayBreak::EmptyTrace => write!(f, "empty trace"),
            ReplayBreak::InitViolated => write!(f, "initial state violated"),
            ReplayBreak::WrongArity => write!(f, "wrong latch or input arity"),
            ReplayBreak::TransitionMismatch => write!(f, "transition mismatch"),
            ReplayBreak::PropertyNotViolated => write!(f, "property not violated at final state"),
        }
    }
}

/// Replays a trace on the AIG, step by step.
pub fn replay(ts: &TransitionSystem, trace: &Trace) -> ReplayResult {
    let model = &ts.model;
    let Some(first) = trace.steps.first() else {
        return ReplayResult::Broken {
            step: 0,
            reason: ReplayBreak::EmptyTrace,
        };
    };
    for (i, step) in trace.steps.iter().enumerate() {
        if step.latches.len() != model.latches.len() || step.inputs.len() != model.inputs.len() {
            return ReplayResult::Broken {
                step: i,
                reason: ReplayBreak::WrongArity,
            };
        }
    }
    let init_ok = model
        .latches
        .iter()
        .enumerate()
        .all(|(i, latch)| match latch.reset {
            crate::aiger::LatchReset::Zero => !first.latches[i],
            crate::aiger::LatchReset::One => first.latches[i],
            crate::aiger::LatchReset::Uninitialized => true,
        });
    if !init_ok {
        return ReplayResult::Broken {
            step: 0,
            reason: ReplayBreak::InitViolated,
        };
    }
    let last = trace.steps.len() - 1;
    for i in 0..last {
        let (next, _) = model.simulate_step(&trace.steps[i].latches, &trace.steps[i].inputs);
        if next != trace.steps[i + 1].latches {
            return ReplayResult::Broken {
                step: i + 1,
                reason: ReplayBreak::TransitionMismatch,
            };
        }
    }
    let (_, bad) = model.simulate_step(&trace.steps[last].latches, &trace.steps[last].inputs);
    if !bad {
        return ReplayResult::Broken {
            step: last,
            reason: ReplayBreak::PropertyNotViolated,
        };
    }
    ReplayResult::Confirmed
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReachResult {
    Safe,
    Unsafe { depth: usize },
    TooLarge,
}

pub const DEFAULT_LATCH_BUDGET: usize = 16;

/// Breadth-first search over the full state space, enumerating every input
/// vector at every state. Ground truth for small models: reports the minimal
/// depth at which some reachable state can raise the bad signal.
pub fn explicit_reach(ts: &TransitionSystem, latch_budget: usize) -> ReachResult {
    let model = &ts.model;
    let nl = model.latches.len();
    let ni = model.inputs.len();
    if nl > latch_budget {
        return ReachResult::TooLarge;
    }
    // Input count has no budget of its own, but 2^ni per state must stay
    // tractable alongside 2^nl states.
    if nl + ni > 2 * latch_budget.max(16) {
        return ReachResult::TooLarge;
    }
    let pack = |bits: &[bool]| -> u64 {
        bits.iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i))
    };
    let unpack =
        |mask: u64, n: usize| -> Vec<bool> { (0..n).map(|i| mask >> i & 1 == 1).collect() };

    let mut initial = Vec::new();
    let fixed: Vec<Option<bool>> = model
        .latches
        .iter()
        .map(|l| match l.reset {
            crate::aiger::LatchReset::Zero => Some(false),
            crate::aiger::LatchReset::One => Some(true),
            crate::aiger::LatchReset::Uninitialized => None,
        })
        .collect();
    let free_idx: Vec<usize> = fixed
        .iter()
        .enumerate()
        .filter_map(|(i, f)| f.is_none().then_some(i))
        .collect();
    for combo in 0u64..(1 << free_idx.len()) {
        let mut state = vec![false; nl];
        for (i, f) in fixed.iter().enumerate() {
            if let Some(b) = f {
                state[i] = *b;
            }
        }
        for (k, &i) in free_idx.iter().enumerate() {
            state[i] = combo >> k & 1 == 1;
        }
        initial.push(pack(&state));
    }

    let mut visited = vec![false; 1usize << nl];
    let mut frontier: Vec<u64> = Vec::new();
    for s in initial {
        if !std::mem::replace(&mut visited[s as usize], true) {
            frontier.push(s);
        }
    }
    let mut depth = 0usize;
    while !frontier.is_empty() {
        let mut next_frontier = Vec::new();
        for &s in &frontier {
            let latches = unpack(s, nl);
            for im in 0u64..(1 << ni) {
                let inputs = unpack(im, ni);
                let (next, bad) = model.simulate_step(&latches, &inputs);
                if bad {
                    return ReachResult::Unsafe { depth };
                }
                let np = pack(&next) as usize;
                if !std::mem::replace(&mut visited[np], true) {
                    next_frontier.push(np as u64);
                }
            }
        }
        frontier = next_frontier;
        depth += 1;
    }
    ReachResult::Safe
}

/// Writes an unsafe witness as a stimulus: `1`, the property line `b0`, one
/// line of input bits per step, and a terminating `.`.
pub fn write_witness<W: Write>(mut w: W, trace: &Trace) -> io::Result<()> {
    writeln!(w, "1")?;
    writeln!(w, "b0")?;
    for step in &trace.steps {
        let bits: String = step
            .inputs
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        writeln!(w, "{}", bits)?;
    }
    writeln!(w, ".")?;
    Ok(())
}

/// Writes an invariant dump: header `inv <n>`, then one clause per line as
/// signed latch-variable indices with a `0` terminator.
pub fn write_invariant<W: Write>(mut w: W, inv: &[Clause]) -> io::Result<()> {
    writeln!(w, "inv {}", inv.len())?;
    for c in inv {
        for l in c.lits() {
            write!(w, "{} ", l)?;
        }
        writeln!(w, "0")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::parse_aag;
    use crate::logic::{Lit, Var};
    use crate::transys::TransitionSystem;

    fn encode(text: &str) -> TransitionSystem {
        TransitionSystem::encode(parse_aag(text).unwrap())
    }

    fn hold_latch() -> TransitionSystem {
        encode("aag 1 0 1 1 0\n2 2\n2\n")
    }

    fn toggle_latch() -> TransitionSystem {
        encode("aag 1 0 1 1 0\n2 3\n2\n")
    }

    // 2-bit counter, bad = b1 & b0, init 00
    fn two_bit_counter() -> TransitionSystem {
        encode("aag 6 0 2 1 4\n2 3\n4 11\n12\n6 4 3\n8 5 2\n10 7 9\n12 4 2\n")
    }

    #[test]
    fn hold_latch_invariant_valid() {
        let ts = hold_latch();
        let inv = vec![Clause::new(vec![Lit::negative(Var::new(1))])];
        assert_eq!(check_invariant(&ts, &inv), InvariantCheck::Valid);
    }

    #[test]
    fn toggle_latch_invariant_breaks_consecution() {
        let ts = toggle_latch();
        let inv = vec![Clause::new(vec![Lit::negative(Var::new(1))])];
        match check_invariant(&ts, &inv) {
            InvariantCheck::Violation {
                condition: InvariantCondition::Consecution,
                state,
                successor: Some(succ),
            } => {
                assert_eq!(state, Cube::new(vec![Lit::negative(Var::new(1))]));
                assert_eq!(succ, Cube::new(vec![Lit::positive(Var::new(1))]));
            }
            other => panic!("expected consecution violation, got {other:?}"),
        }
    }

    #[test]
    fn empty_invariant_fails_property_when_bad_reachable() {
        let ts = toggle_latch();
        match check_invariant(&ts, &[]) {
            InvariantCheck::Violation {
                condition: InvariantCondition::Property,
                ..
            } => {}
            other => panic!("expected property violation, got {other:?}"),
        }
    }

    #[test]
    fn replay_confirms_toggle_counterexample() {
        let ts = toggle_latch();
        let trace = Trace {
            steps: vec![
                TraceStep {
                    latches: vec![false],
                    inputs: vec![],
                },
                TraceStep {
                    latches: vec![true],
                    inputs: vec![],
                },
            ],
        };
        assert_eq!(replay(&ts, &trace), ReplayResult::Confirmed);
    }

    #[test]
    fn replay_rejects_swapped_steps() {
        let ts = toggle_latch();
        let trace = Trace {
            steps: vec![
                TraceStep {
                    latches: vec![true],
                    inputs: vec![],
                },
                TraceStep {
                    latches: vec![false],
                    inputs: vec![],
                },
            ],
        };
        assert_eq!(
            replay(&ts, &trace),
            ReplayResult::Broken {
                step: 0,
                reason: ReplayBreak::InitViolated
            }
        );
    }

    #[test]
    fn replay_rejects_non_violating_final_state() {
        let ts = toggle_latch();
        let trace = Trace {
            steps: vec![TraceStep {
                latches: vec![false],
                inputs: vec![],
            }],
        };
        assert_eq!(
            replay(&ts, &trace),
            ReplayResult::Broken {
                step: 0,
                reason: ReplayBreak::PropertyNotViolated
            }
        );
    }

    #[test]
    fn counter_reaches_bad_at_depth_three() {
        let ts = two_bit_counter();
        assert_eq!(
            explicit_reach(&ts, DEFAULT_LATCH_BUDGET),
            ReachResult::Unsafe { depth: 3 }
        );
    }

    #[test]
    fn hold_latch_is_safe() {
        let ts = hold_latch();
        assert_eq!(explicit_reach(&ts, DEFAULT_LATCH_BUDGET), ReachResult::Safe);
    }

    #[test]
    fn budget_guard_reports_too_large() {
        // 20 latches in a ring, budget 16
        let mut text = String::from("aag 20 0 20 1 0\n");
        for i in 0..20u32 {
            let current = 2 * (i + 1);
            let next = 2 * ((i + 1) % 20 + 1);
            text.push_str(&format!("{current} {next}\n"));
        }
        text.push_str("2\n");
        let ts = encode(&text);
        assert_eq!(explicit_reach(&ts, 16), ReachResult::TooLarge);
    }

    #[test]
    fn uninitialized_latches_widen_initial_set() {
        // one uninitialized latch that holds; bad = latch
        let ts = encode("aag 1 0 1 1 0\n2 2 2\n2\n");
        assert_eq!(
            explicit_reach(&ts, DEFAULT_LATCH_BUDGET),
            ReachResult::Unsafe { depth: 0 }
        );
    }

    #[test]
    fn witness_format_matches_contract() {
        let trace = Trace {
            steps: vec![
                TraceStep {
                    latches: vec![false],
                    inputs: vec![true, false],
                },
                TraceStep {
                    latches: vec![true],
                    inputs: vec![false, false],
                },
            ],
        };
        let mut out = Vec::new();
        write_witness(&mut out, &trace).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "1\nb0\n10\n00\n.\n");
    }

    #[test]
    fn invariant_dump_format() {
        let inv = vec![
            Clause::new(vec![Lit::negative(Var::new(1)), Lit::positive(Var::new(2))]),
            Clause::new(vec![Lit::negative(Var::new(3))]),
        ];
        let mut out = Vec::new();
        write_invariant(&mut out, &inv).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "inv 2\n-1 2 0\n-3 0\n");
    }
}
