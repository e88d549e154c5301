//! Propositional building blocks: literals, cubes, clauses and the diff-set
//! primitive used by lemma prediction.
//!
//! Literals use the AIGER-style pairing: variable `v` is represented by the
//! positive literal `2v` and the negated literal `2v + 1`. Cubes and clauses
//! are canonical literal sets, sorted by `(var, sign)` and duplicate-free.

use std::fmt;
use std::ops::Not;

/// A Boolean variable, indexed from 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn new(index: u32) -> Self {
        debug_assert!(index >= 1, "variable indices start at 1");
        Var(index)
    }

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn lit(self) -> Lit {
        Lit::positive(self)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A literal: a variable with a polarity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, negated: bool) -> Self {
        Lit(var.0 * 2 + negated as u32)
    }

    #[inline]
    pub fn positive(var: Var) -> Self {
        Lit::new(var, false)
    }

    #[inline]
    pub fn negative(var: Var) -> Self {
        Lit::new(var, true)
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    /// Raw pairing code (`2v` or `2v + 1`); used for dense indexing.
    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn from_code(code: u32) -> Self {
        debug_assert!(code >= 2, "literal codes start at 2 (variable 1)");
        Lit(code)
    }

    /// Truth value of this literal when its variable is assigned `value`.
    #[inline]
    pub fn eval(self, value: bool) -> bool {
        value ^ self.is_negated()
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_negated() {
            write!(f, "!x{}", self.var().index())
        } else {
            write!(f, "x{}", self.var().index())
        }
    }
}

impl fmt::Display for Lit {
    /// Signed-integer rendering (DIMACS style): `3` / `-3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_negated() {
            write!(f, "-{}", self.var().index())
        } else {
            write!(f, "{}", self.var().index())
        }
    }
}

fn canonicalize(mut lits: Vec<Lit>) -> Vec<Lit> {
    lits.sort_unstable();
    lits.dedup();
    lits
}

fn has_complementary_pair(sorted: &[Lit]) -> bool {
    sorted.windows(2).any(|w| w[0] == !w[1])
}

/// `a ⊆ b` on sorted duplicate-free literal slices.
pub fn lits_subset(a: &[Lit], b: &[Lit]) -> bool {
    let mut ib = b.iter();
    'outer: for la in a {
        for lb in ib.by_ref() {
            match lb.cmp(la) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// A conjunction of literals. Never contains a variable with both polarities,
/// so a cube is never `⊥` by construction. The empty cube is `⊤`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cube(Vec<Lit>);

/// A disjunction of literals. The empty clause is `⊥`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Clause(Vec<Lit>);

impl Cube {
    /// Canonicalizes (sorts, dedups). Panics if the literals contain a
    /// complementary pair: a cube is never `⊥` by construction.
    pub fn new(lits: Vec<Lit>) -> Self {
        let lits = canonicalize(lits);
        assert!(
            !has_complementary_pair(&lits),
            "cube contains complementary literals"
        );
        Cube(lits)
    }

    pub fn empty() -> Self {
        Cube(Vec::new())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Lit> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.0.binary_search(&lit).is_ok()
    }

    /// Polarity-flips every literal: `¬(l1 ∧ … ∧ ln) = (¬l1 ∨ … ∨ ¬ln)`.
    pub fn negate(&self) -> Clause {
        let mut lits: Vec<Lit> = self.0.iter().map(|&l| !l).collect();
        lits.sort_unstable();
        Clause(lits)
    }

    #[inline]
    pub fn is_subset_of(&self, other: &Cube) -> bool {
        lits_subset(&self.0, &other.0)
    }

    /// Cube implication via Theorem-style containment: `self ⇒ other` iff
    /// `other ⊆ self`.
    pub fn implies(&self, other: &Cube) -> bool {
        other.is_subset_of(self)
    }

    /// Cube with one literal removed (used by drop-variable generalization).
    pub fn without(&self, lit: Lit) -> Cube {
        Cube(self.0.iter().copied().filter(|&l| l != lit).collect())
    }
}

impl Clause {
    /// Canonicalizes (sorts, dedups). Tautological clauses never arise from
    /// cube negation; constructing one is a caller bug.
    pub fn new(lits: Vec<Lit>) -> Self {
        let lits = canonicalize(lits);
        debug_assert!(
            !has_complementary_pair(&lits),
            "tautological clause constructed"
        );
        Clause(lits)
    }

    pub fn empty() -> Self {
        Clause(Vec::new())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Lit> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.0.binary_search(&lit).is_ok()
    }

    pub fn negate(&self) -> Cube {
        let mut lits: Vec<Lit> = self.0.iter().map(|&l| !l).collect();
        lits.sort_unstable();
        Cube(lits)
    }

    #[inline]
    pub fn is_subset_of(&self, other: &Clause) -> bool {
        lits_subset(&self.0, &other.0)
    }

    /// Clause subsumption: `self ⊆ other` means `self ⇒ other`.
    pub fn subsumes(&self, other: &Clause) -> bool {
        self.is_subset_of(other)
    }

    /// Clause extended by one literal (prediction candidates).
    pub fn with(&self, lit: Lit) -> Clause {
        let mut lits = self.0.clone();
        lits.push(lit);
        Clause::new(lits)
    }
}

impl FromIterator<Lit> for Cube {
    fn from_iter<T: IntoIterator<Item = Lit>>(iter: T) -> Self {
        Cube::new(iter.into_iter().collect())
    }
}

impl FromIterator<Lit> for Clause {
    fn from_iter<T: IntoIterator<Item = Lit>>(iter: T) -> Self {
        Clause::new(iter.into_iter().collect())
    }
}

impl fmt::Debug for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cube{:?}", self.0)
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "clause{:?}", self.0)
    }
}

/// The diff set of two cubes: literals of `a` whose negation occurs in `b`.
/// Note the asymmetry: `diff(a, b) ≠ diff(b, a)` in general.
///
/// For non-empty cubes, `a ∧ b` is unsatisfiable iff `diff(a, b) ≠ ∅`, and
/// `diff(c, b)` stays non-empty for any cube `c` intersecting `diff(a, b)`.
pub fn diff(a: &Cube, b: &Cube) -> Vec<Lit> {
    a.iter().copied().filter(|&l| b.contains(!l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lit(v: u32, neg: bool) -> Lit {
        Lit::new(Var::new(v), neg)
    }

    fn pos(v: u32) -> Lit {
        lit(v, false)
    }

    fn neg(v: u32) -> Lit {
        lit(v, true)
    }

    // Brute-force oracle: does the assignment (bit i of `assign` = value of
    // variable i+1) satisfy the cube?
    fn cube_sat_under(c: &Cube, assign: u32) -> bool {
        c.iter()
            .all(|l| l.eval(assign >> (l.var().index() - 1) & 1 == 1))
    }

    // Brute-force conjunction satisfiability over variables 1..=n.
    fn conj_satisfiable(a: &Cube, b: &Cube, n: u32) -> bool {
        (0..1u32 << n).any(|m| cube_sat_under(a, m) && cube_sat_under(b, m))
    }

    // Brute-force implication a ⇒ b over variables 1..=n.
    fn implies_bf(a: &Cube, b: &Cube, n: u32) -> bool {
        (0..1u32 << n).all(|m| !cube_sat_under(a, m) || cube_sat_under(b, m))
    }

    fn arb_cube(max_var: u32) -> impl Strategy<Value = Cube> {
        // One polarity choice per variable: Some(negated) or absent.
        proptest::collection::vec(proptest::option::of(any::<bool>()), max_var as usize).prop_map(
            |slots| {
                Cube::new(
                    slots
                        .into_iter()
                        .enumerate()
                        .filter_map(|(i, s)| s.map(|negated| lit(i as u32 + 1, negated)))
                        .collect(),
                )
            },
        )
    }

    fn arb_nonempty_cube(max_var: u32) -> impl Strategy<Value = Cube> {
        arb_cube(max_var).prop_filter("non-empty", |c| !c.is_empty())
    }

    #[test]
    fn negation_flips_polarities() {
        let c = Cube::new(vec![pos(1), neg(2)]);
        assert_eq!(c.negate(), Clause::new(vec![neg(1), pos(2)]));
    }

    #[test]
    fn negation_is_involution() {
        let c = Cube::new(vec![pos(1), pos(3)]);
        assert_eq!(c.negate().negate(), c);
        let empty = Cube::empty();
        assert_eq!(empty.negate(), Clause::empty());
        assert_eq!(empty.negate().negate(), empty);
    }

    #[test]
    fn lit_negation_is_involution() {
        let l = neg(7);
        assert_eq!(!!l, l);
        assert_eq!((!l).var(), l.var());
    }

    #[test]
    fn subset_examples() {
        assert!(lits_subset(&[pos(1)], &[pos(1), pos(2)]));
        assert!(!lits_subset(&[pos(1), neg(2)], &[pos(1), pos(2)]));
        assert!(lits_subset(&[], &[pos(1)]));
    }

    #[test]
    fn diff_examples() {
        // diff({x1, !x3}, {!x1, x2}) = {x1}
        let a = Cube::new(vec![pos(1), neg(3)]);
        let b = Cube::new(vec![neg(1), pos(2)]);
        assert_eq!(diff(&a, &b), vec![pos(1)]);

        // diff(c, c) = ∅
        assert!(diff(&a, &a).is_empty());

        // two flipped variables
        let a = Cube::new(vec![pos(1), pos(2), pos(3)]);
        let b = Cube::new(vec![neg(1), neg(2), pos(3)]);
        assert_eq!(diff(&a, &b), vec![pos(1), pos(2)]);
    }

    #[test]
    fn diff_is_asymmetric() {
        let a = Cube::new(vec![pos(1), pos(2)]);
        let b = Cube::new(vec![neg(1)]);
        assert_eq!(diff(&a, &b), vec![pos(1)]);
        assert_eq!(diff(&b, &a), vec![neg(1)]);
        // A witness with genuinely different sets.
        let a = Cube::new(vec![pos(1)]);
        let b = Cube::new(vec![neg(1), pos(2)]);
        assert_ne!(diff(&a, &b), diff(&b, &a));
    }

    #[test]
    fn canonical_order_is_var_then_sign() {
        let c = Cube::new(vec![neg(3), pos(1), pos(2)]);
        assert_eq!(c.lits(), &[pos(1), pos(2), neg(3)]);
        // Dedup keeps set semantics order-independent.
        let d = Cube::new(vec![pos(2), pos(1), neg(3), pos(1)]);
        assert_eq!(c, d);
    }

    #[test]
    #[should_panic(expected = "complementary")]
    fn cube_rejects_complementary_pair() {
        let _ = Cube::new(vec![pos(1), neg(1)]);
    }

    proptest! {
        // Theorem: a ∧ b = ⊥ iff diff(a, b) ≠ ∅, for non-empty cubes
        // (checked both directions against assignment enumeration).
        #[test]
        fn diff_empty_iff_conjunction_sat(a in arb_nonempty_cube(8), b in arb_nonempty_cube(8)) {
            let unsat = !conj_satisfiable(&a, &b, 8);
            prop_assert_eq!(unsat, !diff(&a, &b).is_empty());
        }

        // Theorem: diff(a,b) ≠ ∅ and c ∩ diff(a,b) ≠ ∅ imply diff(c,b) ≠ ∅.
        #[test]
        fn diff_propagates_through_intersection(
            a in arb_nonempty_cube(8),
            b in arb_nonempty_cube(8),
            c in arb_nonempty_cube(8),
        ) {
            let ds = diff(&a, &b);
            if !ds.is_empty() && c.iter().any(|l| ds.contains(l)) {
                prop_assert!(!diff(&c, &b).is_empty());
            }
        }

        // Theorem: a ⇒ b iff b ⊆ a, for non-empty cubes.
        #[test]
        fn cube_implication_is_containment(a in arb_nonempty_cube(8), b in arb_nonempty_cube(8)) {
            prop_assert_eq!(implies_bf(&a, &b, 8), b.is_subset_of(&a));
        }

        #[test]
        fn negate_involution_holds(c in arb_cube(8)) {
            prop_assert_eq!(c.negate().negate(), c.clone());
            // same variables, flipped polarities
            let n = c.negate();
            prop_assert_eq!(c.len(), n.len());
            for (l, m) in c.iter().zip(n.iter()) {
                prop_assert_eq!(l.var(), m.var());
                prop_assert_ne!(l.is_negated(), m.is_negated());
            }
        }

        #[test]
        fn subset_matches_naive(a in arb_cube(6), b in arb_cube(6)) {
            let naive = a.iter().all(|l| b.lits().contains(l));
            prop_assert_eq!(lits_subset(a.lits(), b.lits()), naive);
        }
    }
}
