//! Encoding of an and-inverter graph into the checker's transition system:
//! latch variables X, input variables Y, initial cube I, a CNF transition
//! relation T over X ∪ Y ∪ X' ∪ gate variables, and the bad literal.
//!
//! Variable layout: latches take 1..=|X|, inputs the next |Y| indices, primed
//! latches the |X| after that, and gate variables everything beyond. Priming
//! is a fixed offset on the latch block.

use crate::aiger::{AigerModel, LatchReset};
use crate::logic::{Clause, Cube, Lit, Var};

/// The property signal after constant folding: either a literal of the
/// encoded CNF or a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BadSignal {
    Const(bool),
    Lit(Lit),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransysError {
    #[error("variable x{0} is not a latch variable")]
    NotALatchVar(u32),
    #[error("variable x{0} is not a primed latch variable")]
    NotAPrimedVar(u32),
}

#[derive(Debug, Clone, Copy)]
enum Folded {
    Const(bool),
    Lit(Lit),
}

impl Folded {
    fn invert_if(self, negate: bool) -> Folded {
        if !negate {
            return self;
        }
        match self {
            Folded::Const(b) => Folded::Const(!b),
            Folded::Lit(l) => Folded::Lit(!l),
        }
    }
}

pub struct TransitionSystem {
    /// Latch variables in AIG declaration order.
    pub latch_vars: Vec<Var>,
    /// Input variables in AIG declaration order.
    pub input_vars: Vec<Var>,
    /// Initial cube over the initialized latches.
    pub init: Cube,
    /// CNF transition relation.
    pub trans: Vec<Clause>,
    pub bad: BadSignal,
    /// The source circuit, kept for simulation-based certification.
    pub model: AigerModel,
    num_latches: u32,
    num_inputs: u32,
    num_vars: u32,
}

impl TransitionSystem {
    pub fn encode(model: AigerModel) -> TransitionSystem {
        let nl = model.latches.len() as u32;
        let ni = model.inputs.len() as u32;
        let latch_vars: Vec<Var> = (1..=nl).map(Var::new).collect();
        let input_vars: Vec<Var> = (nl + 1..=nl + ni).map(Var::new).collect();
        let mut num_vars = 2 * nl + ni; // gates go after X, Y, X'

        // Fold every AIG variable to a constant or a CNF literal.
        let mut folded: Vec<Folded> = vec![Folded::Const(false); model.max_var + 1];
        for (i, &inp) in model.inputs.iter().enumerate() {
            folded[inp / 2] = Folded::Lit(input_vars[i].lit());
        }
        for (i, latch) in model.latches.iter().enumerate() {
            folded[latch.current / 2] = Folded::Lit(latch_vars[i].lit());
        }
        let fold = |folded: &[Folded], aig_lit: usize| -> Folded {
            folded[aig_lit / 2].invert_if(aig_lit % 2 == 1)
        };
        let mut trans: Vec<Clause> = Vec::new();
        for and in &model.ands {
            let a = fold(&folded, and.rhs0);
            let b = fold(&folded, and.rhs1);
            folded[and.lhs / 2] = match (a, b) {
                (Folded::Const(false), _) | (_, Folded::Const(false)) => Folded::Const(false),
                (Folded::Const(true), other) | (other, Folded::Const(true)) => other,
                (Folded::Lit(la), Folded::Lit(lb)) if la == lb => Folded::Lit(la),
                (Folded::Lit(la), Folded::Lit(lb)) if la == !lb => Folded::Const(false),
                (Folded::Lit(la), Folded::Lit(lb)) => {
                    num_vars += 1;
                    let g = Var::new(num_vars).lit();
                    trans.push(Clause::new(vec![!g, la]));
                    trans.push(Clause::new(vec![!g, lb]));
                    trans.push(Clause::new(vec![g, !la, !lb]));
                    Folded::Lit(g)
                }
            };
        }
        // Latch update: x' is equivalent to the folded next-state literal.
        for (i, latch) in model.latches.iter().enumerate() {
            let primed = Var::new(latch_vars[i].index() + nl + ni).lit();
            match fold(&folded, latch.next) {
                Folded::Const(true) => trans.push(Clause::new(vec![primed])),
                Folded::Const(false) => trans.push(Clause::new(vec![!primed])),
                Folded::Lit(l) => {
                    trans.push(Clause::new(vec![!primed, l]));
                    trans.push(Clause::new(vec![primed, !l]));
                }
            }
        }
        let bad = match fold(&folded, model.bad_literal()) {
            Folded::Const(b) => BadSignal::Const(b),
            Folded::Lit(l) => BadSignal::Lit(l),
        };
        let init = Cube::new(
            model
                .latches
                .iter()
                .enumerate()
                .filter_map(|(i, latch)| match latch.reset {
                    LatchReset::Zero => Some(!latch_vars[i].lit()),
                    LatchReset::One => Some(latch_vars[i].lit()),
                    LatchReset::Uninitialized => None,
                })
                .collect(),
        );
        TransitionSystem {
            latch_vars,
            input_vars,
            init,
            trans,
            bad,
            model,
            num_latches: nl,
            num_inputs: ni,
            num_vars,
        }
    }

    pub fn num_latches(&self) -> usize {
        self.num_latches as usize
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs as usize
    }

    /// Total variables in the CNF universe (X, Y, X' and gates).
    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    #[inline]
    pub fn is_latch_var(&self, v: Var) -> bool {
        v.index() >= 1 && v.index() <= self.num_latches
    }

    /// Index of `v` in latch declaration order.
    pub fn latch_index(&self, v: Var) -> Option<usize> {
        self.is_latch_var(v).then(|| v.index() as usize - 1)
    }

    pub fn prime_var(&self, v: Var) -> Result<Var, TransysError> {
        if self.is_latch_var(v) {
            Ok(Var::new(v.index() + self.num_latches + self.num_inputs))
        } else {
            Err(TransysError::NotALatchVar(v.index()))
        }
    }

    pub fn unprime_var(&self, v: Var) -> Result<Var, TransysError> {
        let lo = self.num_latches + self.num_inputs + 1;
        let hi = 2 * self.num_latches + self.num_inputs;
        if v.index() >= lo && v.index() <= hi {
            Ok(Var::new(v.index() - self.num_latches - self.num_inputs))
        } else {
            Err(TransysError::NotAPrimedVar(v.index()))
        }
    }

    pub fn prime_lit(&self, l: Lit) -> Result<Lit, TransysError> {
        Ok(Lit::new(self.prime_var(l.var())?, l.is_negated()))
    }

    pub fn unprime_lit(&self, l: Lit) -> Result<Lit, TransysError> {
        Ok(Lit::new(self.unprime_var(l.var())?, l.is_negated()))
    }

    /// Variable-wise substitution X → X'; polarities preserved.
    pub fn prime(&self, c: &Cube) -> Result<Cube, TransysError> {
        Ok(Cube::new(
            c.iter()
                .map(|&l| self.prime_lit(l))
                .collect::<Result<_, _>>()?,
        ))
    }

    pub fn unprime(&self, c: &Cube) -> Result<Cube, TransysError> {
        Ok(Cube::new(
            c.iter()
                .map(|&l| self.unprime_lit(l))
                .collect::<Result<_, _>>()?,
        ))
    }

    /// Loads T into a solver session (and registers the whole variable
    /// universe).
    pub fn load_trans(&self, session: &mut crate::sat::SolverSession) {
        session.ensure_var(Var::new(self.num_vars.max(1)));
        for c in &self.trans {
            session.add_clause(c.lits());
        }
    }

    /// Loads the initial cube as unit clauses.
    pub fn load_init(&self, session: &mut crate::sat::SolverSession) {
        for &l in self.init.iter() {
            session.add_clause(&[l]);
        }
    }

    /// Full latch-state cube read from a model.
    pub fn state_from_model(&self, m: &crate::sat::Model) -> Cube {
        Cube::new(self.latch_vars.iter().map(|&v| m.lit_of(v)).collect())
    }

    /// Successor state: primed-variable values mapped back through unprime.
    pub fn successor_from_model(&self, m: &crate::sat::Model) -> Cube {
        Cube::new(
            self.latch_vars
                .iter()
                .map(|&v| {
                    let primed = self.prime_var(v).expect("latch var");
                    Lit::new(v, !m.value(primed))
                })
                .collect(),
        )
    }

    /// Input values read from a model, in declaration order.
    pub fn inputs_from_model(&self, m: &crate::sat::Model) -> Vec<bool> {
        self.input_vars.iter().map(|&v| m.value(v)).collect()
    }

    /// Latch values of a full state cube, in declaration order.
    pub fn state_values(&self, state: &Cube) -> Vec<bool> {
        debug_assert_eq!(state.len(), self.num_latches());
        state.iter().map(|l| !l.is_negated()).collect()
    }
}
