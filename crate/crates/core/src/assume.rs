//! Substitution search and assumption generation.
//!
//! An action is never simply inapplicable. [`find_substitutions`] lists the
//! ways its preconditions can be matched against a state, letting a
//! precondition go unmatched when needed, and [`generate_assumptions`]
//! reports which instantiated preconditions would then have to be assumed.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::domain::Domain;
use crate::logic::{
    unify_literals, Apply, CmpOp, Condition, KnowledgeState, Literal, Substitution, Term, Truth,
    Var,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AssumptionKind {
    /// The literal is unknown in the state and is added as a hypothesis.
    Hypothesis,
    /// The state holds the negation; it is withdrawn and replaced.
    FactNegation,
    /// A numeric constraint that is violated or cannot be decided yet.
    ConstraintViolation,
}

impl AssumptionKind {
    pub fn label(self) -> &'static str {
        match self {
            AssumptionKind::Hypothesis => "hypothesis",
            AssumptionKind::FactNegation => "fact-negation",
            AssumptionKind::ConstraintViolation => "constraint-violation",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Some(match s {
            "hypothesis" => AssumptionKind::Hypothesis,
            "fact-negation" => AssumptionKind::FactNegation,
            "constraint-violation" => AssumptionKind::ConstraintViolation,
            _ => return None,
        })
    }
}

/// An instantiated precondition that must hold for an action but is not
/// entailed by the state it was generated against.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assumption {
    pub content: Condition,
    pub kind: AssumptionKind,
}

impl Assumption {
    pub fn literal(&self) -> Option<&Literal> {
        self.content.as_literal()
    }

    /// The predicate name, or the comparison symbol for constraints.
    pub fn symbol(&self) -> &str {
        match &self.content {
            Condition::Lit(l) => &l.predicate,
            Condition::Cmp(c) => c.op.symbol(),
        }
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.content.fmt(f)
    }
}

struct Branch {
    subst: Substitution,
    matched: Vec<bool>,
}

impl Branch {
    fn matches_strictly_fewer_than(&self, other: &Branch) -> bool {
        let mut strict = false;
        for (a, b) in self.matched.iter().zip(&other.matched) {
            match (a, b) {
                (true, false) => return false,
                (false, true) => strict = true,
                _ => {}
            }
        }
        strict
    }
}

fn enumerate(
    pre: &[Condition],
    idx: usize,
    state: &KnowledgeState,
    sigma: &Substitution,
    matched: &mut Vec<bool>,
    out: &mut Vec<Branch>,
) {
    let Some(p) = pre.get(idx) else {
        out.push(Branch {
            subst: sigma.clone(),
            matched: matched.clone(),
        });
        return;
    };
    if let Condition::Lit(p) = p {
        for e in state {
            if let Some(theta) = match_fact(p, e, sigma) {
                matched[idx] = true;
                enumerate(pre, idx + 1, state, &theta, matched, out);
                matched[idx] = false;
            }
        }
    }
    enumerate(pre, idx + 1, state, sigma, matched, out);
}

/// Unifies a precondition with a state fact without instantiating the
/// fact: variables inside a state stand for unknown but fixed objects.
///
/// Neither the fact's variables nor those already reached through `sigma`
/// (state variables bound by earlier matches, task arguments) may become
/// bound, or two distinct unknowns could be identified with each other or
/// with a constant.
pub fn match_fact(p: &Literal, e: &Literal, sigma: &Substitution) -> Option<Substitution> {
    let theta = unify_literals(p, e, sigma)?;
    let mut rigid = BTreeSet::new();
    e.collect_vars(&mut rigid);
    for (_, t) in sigma.iter() {
        t.collect_vars(&mut rigid);
    }
    rigid.iter().all(|v| theta.get(v).is_none()).then_some(theta)
}

/// Every maximal substitution extending `sigma` obtained by processing the
/// preconditions in order, each literal either unifying with a fact of
/// `state` or being skipped.
///
/// A branch is dropped when another branch matches a strict superset of its
/// preconditions with a substitution that is an instance of its own. The
/// result is duplicate-free, in depth-first order (facts in state order,
/// matching before skipping), and never empty.
///
/// Variables of `pre` must be disjoint from those occurring in `state`.
pub fn find_substitutions(
    pre: &[Condition],
    state: &KnowledgeState,
    sigma: &Substitution,
) -> Vec<Substitution> {
    let mut branches = Vec::new();
    let mut matched = alloc::vec![false; pre.len()];
    enumerate(pre, 0, state, sigma, &mut matched, &mut branches);

    let mut out: Vec<Substitution> = Vec::new();
    for (i, b) in branches.iter().enumerate() {
        let dominated = branches.iter().enumerate().any(|(j, other)| {
            i != j
                && b.matches_strictly_fewer_than(other)
                && b.subst.is_generalisation_of(&other.subst)
        });
        if !dominated && !out.contains(&b.subst) {
            out.push(b.subst.clone());
        }
    }
    out
}

/// Every substitution reachable by matching or skipping each literal
/// precondition in turn, without the maximality filter of
/// [`find_substitutions`]. Duplicate-free, in the same depth-first order.
///
/// The search expands all of these: a branch that matches fewer facts can
/// still lead to a cheaper conjecture, e.g. when the hypothesis it makes is
/// reused by a later step.
pub fn match_branches(pre: &[Condition], state: &KnowledgeState, sigma: &Substitution) -> Vec<Substitution> {
    let mut branches = Vec::new();
    let mut matched = alloc::vec![false; pre.len()];
    enumerate(pre, 0, state, sigma, &mut matched, &mut branches);
    let mut out: Vec<Substitution> = Vec::new();
    for b in branches {
        if !out.contains(&b.subst) {
            out.push(b.subst);
        }
    }
    out
}

/// Kind of an instantiated precondition that is not entailed by `state`.
pub fn classify(p: &Condition, state: &KnowledgeState) -> AssumptionKind {
    match p {
        Condition::Cmp(_) => AssumptionKind::ConstraintViolation,
        Condition::Lit(l) if state.contradicts(l) => AssumptionKind::FactNegation,
        Condition::Lit(_) => AssumptionKind::Hypothesis,
    }
}

/// The assumptions needed to apply an action with preconditions `pre`
/// under `sigma` in `state`, in precondition order and without duplicates.
pub fn generate_assumptions(
    pre: &[Condition],
    sigma: &Substitution,
    state: &KnowledgeState,
) -> Vec<Assumption> {
    let mut out: Vec<Assumption> = Vec::new();
    for p in pre {
        let p = p.apply(sigma);
        let entailed = match &p {
            Condition::Lit(l) => state.contains(l),
            Condition::Cmp(c) => c.eval() == Truth::Satisfied,
        };
        if entailed {
            continue;
        }
        let h = Assumption {
            kind: classify(&p, state),
            content: p,
        };
        if !out.contains(&h) {
            out.push(h);
        }
    }
    out
}

/// Legal iff the predicate (or comparison symbol) is declared hypothetical.
pub fn is_legal(h: &Assumption, domain: &Domain) -> bool {
    domain.is_hypothetical(h.symbol())
}

/// True when an assumption negates one of the instantiated literal
/// preconditions it was generated for. This covers a literal assumed
/// together with its negation, and an assumption that would delete a
/// precondition the substitution matched in the state.
pub fn is_contradictory(pre: &[Condition], sigma: &Substitution, hs: &[Assumption]) -> bool {
    let lits: BTreeSet<Literal> = pre
        .iter()
        .filter_map(|c| match c {
            Condition::Lit(l) => Some(l.apply(sigma)),
            Condition::Cmp(_) => None,
        })
        .collect();
    hs.iter()
        .filter_map(Assumption::literal)
        .any(|h| lits.contains(&h.complement()))
}

/// Instantiates unknown quantities from the constraints that bound them.
///
/// For each undecided constraint of the form `(op ?v n)` or `(op n ?v)`
/// with `op` one of `>=`, `<=`, `=`, where `?v` is `bindable` and occurs in
/// a literal precondition that will be assumed, `?v` is bound to `n`, the
/// boundary value that satisfies the constraint. This turns the pair
/// `(hasfuel c ?q), (>= ?q 10)` into the single hypothesis
/// `(hasfuel c 10)`. Returns `None` when nothing was bound.
pub fn refine_with_constraints(
    pre: &[Condition],
    sigma: &Substitution,
    state: &KnowledgeState,
    mut bindable: impl FnMut(&Var) -> bool,
) -> Option<Substitution> {
    let mut open_vars = BTreeSet::new();
    for p in pre {
        if let Condition::Lit(l) = p {
            let l = l.apply(sigma);
            if !state.contains(&l) {
                l.collect_vars(&mut open_vars);
            }
        }
    }
    let mut s = sigma.clone();
    let mut changed = false;
    for p in pre {
        let Condition::Cmp(c) = p else { continue };
        let c = c.apply(&s);
        if c.eval() != Truth::Undetermined {
            continue;
        }
        let boundary = matches!(c.op, CmpOp::Ge | CmpOp::Le | CmpOp::Eq);
        let target = match (&c.left, &c.right) {
            (Term::Var(v), Term::Num(n)) | (Term::Num(n), Term::Var(v)) if boundary => {
                Some((v.clone(), *n))
            }
            _ => None,
        };
        if let Some((v, n)) = target {
            if open_vars.contains(&v) && bindable(&v) && s.bind(v, Term::Num(n)) {
                changed = true;
            }
        }
    }
    changed.then_some(s)
}
