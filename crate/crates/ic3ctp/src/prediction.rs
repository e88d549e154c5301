//! Lemma prediction from counterexamples to propagation.
//!
//! When pushing a lemma ¬c2 from F_{i-1} to F_i fails, the failed consecution
//! query exhibits a successor state t with t ⊨ c2. If a later bad cube b is
//! blocked at level i and ¬c2 is a parent lemma of ¬b, the diff set of b and
//! t pinpoints literals separating b from t: extending the parent clause by
//! one such negated literal yields a candidate lemma that blocks b, implies
//! ¬c2, and excludes t. Validating the candidate with a single consecution
//! query replaces the whole drop-variable loop when it succeeds.

use crate::frames::{FrameSequence, Lemma};
use crate::logic::{diff, lits_subset, Clause, Cube, Lit};

/// Map from (lemma, level) to the successor state of its most recent failed
/// push at that level. Cleared at the start of every propagation phase.
#[derive(Debug, Default)]
pub struct FailurePushTable {
    map: std::collections::HashMap<(Clause, usize), Cube>,
}

impl FailurePushTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.map.clear();
    }

    /// Records the successor extracted from a failed consecution query of
    /// `(c, level)`; the newest entry wins.
    pub fn record(&mut self, c: Clause, level: usize, successor: Cube) {
        self.map.insert((c, level), successor);
    }

    pub fn get(&self, c: &Clause, level: usize) -> Option<&Cube> {
        self.map.get(&(c.clone(), level))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Prediction counters: successful predictions, prediction SAT queries,
/// generalize calls that found a failed-push parent, and generalize calls.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct PredictionStats {
    pub n_sp: u64,
    pub n_p: u64,
    pub n_fp: u64,
    pub n_g: u64,
}

impl PredictionStats {
    pub fn check_invariants(&self) -> bool {
        self.n_sp <= self.n_p && self.n_fp <= self.n_g && self.n_sp <= self.n_g
    }
}

/// Parent lemmas of clause `c` at `level`: lemmas in F_level \ F_{level+1}
/// whose clause is a subset of `c` (hence implies it). Level 0 has no lemma
/// objects, so the answer there is empty.
pub fn parent_lemmas(frames: &FrameSequence, c: &Clause, level: usize) -> Vec<Lemma> {
    if level == 0 {
        return Vec::new();
    }
    frames
        .lemmas_at_exactly(level)
        .into_iter()
        .filter(|p| p.clause.is_subset_of(c))
        .collect()
}

/// Outcome of one candidate consecution query, as seen by `predict`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateCheck {
    /// The candidate clause is inductive relative to the frame below.
    Accepted,
    /// Rejected; `successor` is the CTI successor state from the model.
    Rejected { successor: Cube },
}

/// Which branch produced a successful prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictPath {
    /// Empty diff set: the parent lemma itself pushed.
    ParentPush,
    /// Parent clause extended by one negated diff literal.
    ExtendedCandidate,
}

#[derive(Debug, Clone)]
pub struct PredictedLemma {
    /// The generalization result: the cube whose negation is the new lemma.
    pub cube: Cube,
    pub path: PredictPath,
    /// The parent clause the prediction grew from.
    pub parent: Clause,
}

#[derive(Debug, Default)]
pub struct PredictReport {
    pub predicted: Option<PredictedLemma>,
    /// Diff-set shrink events during candidate refinement.
    pub refinement_shrinks: u64,
    /// Contract violations detected on a successful prediction (must be 0).
    pub contract_violations: u64,
}

/// Attempts to predict the generalization of bad cube `b`, blocked at the
/// level above `level_below`, before any variable dropping. `query` runs a
/// consecution check of a candidate clause against F_{level_below}.
///
/// Per parent lemma p of ¬b at `level_below` with a recorded push failure t:
/// if diff(b, t) is empty the parent itself is re-tried as the lemma (a
/// failure overwrites the table entry and moves on); otherwise candidates
/// p ∪ {¬d} are tried per surviving diff literal d in ascending variable
/// order, shrinking the diff set with each new counterexample's successor.
/// The first accepted candidate wins and skips variable dropping entirely.
pub fn predict<Q>(
    b: &Cube,
    parents: &[Lemma],
    level_below: usize,
    table: &mut FailurePushTable,
    stats: &mut PredictionStats,
    init: &Cube,
    mut query: Q,
) -> Result<PredictReport, crate::engine::EngineError>
where
    Q: FnMut(&Clause) -> Result<CandidateCheck, crate::engine::EngineError>,
{
    let mut report = PredictReport::default();
    let mut found_failed_parent = false;
    'parents: for parent in parents {
        let p = &parent.clause;
        let Some(t) = table.get(p, level_below).cloned() else {
            continue; // no CTP recorded for this parent
        };
        found_failed_parent = true;
        let mut ds: Vec<Lit> = diff(b, &t);
        if ds.is_empty() {
            // b and t intersect: blocking b may have blocked t, so the
            // parent itself could push now.
            stats.n_p += 1;
            match query(p)? {
                CandidateCheck::Accepted => {
                    stats.n_sp += 1;
                    report.predicted = Some(PredictedLemma {
                        cube: p.negate(),
                        path: PredictPath::ParentPush,
                        parent: p.clone(),
                    });
                    break 'parents;
                }
                CandidateCheck::Rejected { successor } => {
                    table.record(p.clone(), level_below, successor);
                    continue 'parents;
                }
            }
        }
        // Candidate loop: one extension per surviving diff literal.
        while let Some(d) = ds.first().copied() {
            ds.remove(0);
            debug_assert!(!p.contains(!d), "diff literal cannot negate into parent");
            let cand = p.with(!d);
            stats.n_p += 1;
            match query(&cand)? {
                CandidateCheck::Accepted => {
                    stats.n_sp += 1;
                    let c3 = cand.negate();
                    report.contract_violations += contract_violations(&c3, b, p, &t, init) as u64;
                    report.predicted = Some(PredictedLemma {
                        cube: c3,
                        path: PredictPath::ExtendedCandidate,
                        parent: p.clone(),
                    });
                    break 'parents;
                }
                CandidateCheck::Rejected { successor } => {
                    // Likely another CTP for the same parent: keep only
                    // candidates that also separate b from it.
                    let nd = diff(b, &successor);
                    let before = ds.len();
                    ds.retain(|l| nd.contains(l));
                    if ds.len() < before {
                        report.refinement_shrinks += 1;
                    }
                }
            }
        }
    }
    if found_failed_parent {
        stats.n_fp += 1;
    }
    debug_assert!(stats.check_invariants());
    Ok(report)
}

/// Checks the predicted-lemma contract for an extended candidate c3 = ¬cand:
/// the parent cube is contained in it, it is contained in b, it excludes the
/// recorded successor t, and the initial states imply its negation. Returns
/// the number of violated conditions.
fn contract_violations(c3: &Cube, b: &Cube, parent: &Clause, t: &Cube, init: &Cube) -> u32 {
    let c2 = parent.negate();
    let mut violations = 0;
    if !lits_subset(c2.lits(), c3.lits()) {
        debug_assert!(false, "parent cube not contained in predicted cube");
        violations += 1;
    }
    if !lits_subset(c3.lits(), b.lits()) {
        debug_assert!(false, "predicted cube not contained in bad cube");
        violations += 1;
    }
    if diff(c3, t).is_empty() {
        debug_assert!(false, "predicted cube does not exclude the CTP successor");
        violations += 1;
    }
    if diff(c3, init).is_empty() {
        debug_assert!(false, "predicted cube intersects the initial states");
        violations += 1;
    }
    violations
}
