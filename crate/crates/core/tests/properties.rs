use std::collections::BTreeSet;

use abp_core::assume::{classify, find_substitutions, generate_assumptions, match_fact};
use abp_core::logic::{unify_literals, Apply, Truth};
use abp_core::{
    AssumptionKind, CmpOp, Condition, Constraint, KnowledgeState, Literal, Substitution, Term, Var,
};
use proptest::prelude::*;

const CONSTS: [&str; 2] = ["a", "b"];
const VARS: [&str; 3] = ["x", "y", "z"];

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        (0..CONSTS.len()).prop_map(|i| Term::constant(CONSTS[i])),
        (0..VARS.len()).prop_map(|i| Term::var(VARS[i])),
    ]
}

fn literal(preds: &'static [&'static str]) -> impl Strategy<Value = Literal> {
    (0..preds.len(), prop::collection::vec(term(), 0..=3), prop::bool::weighted(0.85))
        .prop_map(move |(p, args, pos)| {
            let l = Literal::new(preds[p], args);
            if pos {
                l
            } else {
                l.complement()
            }
        })
}

/// Every assignment of the variables in `vars` to constants drawn from
/// `pool`.
fn assignments(vars: &[Var], pool: &[Term]) -> Vec<Substitution> {
    let mut out = vec![Substitution::new()];
    for v in vars {
        let mut next = Vec::new();
        for s in &out {
            for t in pool {
                let pairs: Vec<(Var, Term)> = s
                    .iter()
                    .map(|(a, b)| (a.clone(), b.clone()))
                    .chain([(v.clone(), t.clone())])
                    .collect();
                next.push(Substitution::try_from_pairs(pairs).unwrap());
            }
        }
        out = next;
    }
    out
}

fn vars_of(ls: &[&Literal]) -> Vec<Var> {
    let mut vs = BTreeSet::new();
    for l in ls {
        l.collect_vars(&mut vs);
    }
    vs.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    /// The unifier is sound, and every ground unifier (over the constants
    /// used plus one fresh constant) is an instance of it; no unifier is
    /// returned only when none exists.
    #[test]
    fn unify_is_most_general(a in literal(&["p"]), b in literal(&["p"])) {
        let vars = vars_of(&[&a, &b]);
        let pool: Vec<Term> = CONSTS.iter().chain(&["fresh"]).map(|c| Term::constant(c)).collect();
        let ground: Vec<Substitution> = assignments(&vars, &pool)
            .into_iter()
            .filter(|t| a.apply(t) == b.apply(t))
            .collect();
        match unify_literals(&a, &b, &Substitution::new()) {
            Some(s) => {
                prop_assert_eq!(a.apply(&s), b.apply(&s));
                prop_assert!(s.is_idempotent());
                prop_assert!(!ground.is_empty());
                for t in &ground {
                    for v in &vars {
                        let x = Term::Var(v.clone());
                        prop_assert_eq!(x.apply(&s).apply(t), x.apply(t));
                    }
                }
            }
            None => prop_assert!(ground.is_empty()),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn apply_is_idempotent(a in literal(&["p", "q"]), b in literal(&["p", "q"])) {
        if let Some(s) = unify_literals(&a, &b, &Substitution::new()) {
            let once = a.apply(&s);
            prop_assert_eq!(once.apply(&s), once);
        }
    }

    #[test]
    fn consistent_union_is_consistent(
        facts in prop::collection::vec(literal(&["p", "q"]), 0..6),
        hyps in prop::collection::vec(literal(&["p", "q"]), 0..4),
    ) {
        let mut state = KnowledgeState::new();
        for f in facts {
            state.insert(f);
        }
        prop_assert!(state.is_consistent());
        let u = state.consistent_union(hyps.iter());
        prop_assert!(u.is_consistent());
        // The last word on each atom is the latest hypothesis about it.
        for h in &hyps {
            let last = hyps
                .iter()
                .rev()
                .find(|g| *g == h || **g == h.complement())
                .unwrap();
            prop_assert_eq!(u.contains(h), last == h);
        }
        for f in &state {
            if !hyps.iter().any(|h| *h == f.complement()) {
                prop_assert!(u.contains(f));
            }
        }
    }
}

fn ground_literal(preds: &'static [&'static str]) -> impl Strategy<Value = Literal> {
    (0..preds.len(), prop::collection::vec(0..CONSTS.len(), 1..=2), prop::bool::weighted(0.8))
        .prop_map(move |(p, args, pos)| {
            let l = Literal::new(preds[p], args.into_iter().map(|i| Term::constant(CONSTS[i])).collect());
            if pos {
                l
            } else {
                l.complement()
            }
        })
}

fn precondition() -> impl Strategy<Value = Condition> {
    prop_oneof![
        4 => literal(&["p", "q"]).prop_map(Condition::Lit),
        1 => (0..VARS.len(), 0i64..4).prop_map(|(v, n)| {
            Condition::Cmp(Constraint::new(CmpOp::Ge, Term::var(VARS[v]), Term::int(n)))
        }),
    ]
}

/// Every leaf of the unfiltered match/skip tree.
fn raw(pre: &[Condition], state: &KnowledgeState, s: &Substitution, out: &mut Vec<Substitution>) {
    let Some((first, rest)) = pre.split_first() else {
        out.push(s.clone());
        return;
    };
    if let Condition::Lit(p) = first {
        for e in state {
            if let Some(t) = match_fact(p, e, s) {
                raw(rest, state, &t, out);
            }
        }
    }
    raw(rest, state, s, out);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    /// Filtering the match/skip tree keeps a branch with the fewest
    /// assumptions, and only returns leaves of that tree.
    #[test]
    fn substitutions_keep_the_cheapest_branch(
        facts in prop::collection::vec(ground_literal(&["p", "q"]), 0..6),
        pre in prop::collection::vec(precondition(), 0..4),
    ) {
        let state: KnowledgeState = facts.into_iter().collect();
        prop_assume!(state.is_consistent());
        let found = find_substitutions(&pre, &state, &Substitution::new());
        let mut all = Vec::new();
        raw(&pre, &state, &Substitution::new(), &mut all);
        prop_assert!(!found.is_empty());
        for s in &found {
            prop_assert!(all.contains(s));
        }
        let cost = |s: &Substitution| generate_assumptions(&pre, s, &state).len();
        let best_raw = all.iter().map(cost).min().unwrap();
        let best_found = found.iter().map(cost).min().unwrap();
        prop_assert_eq!(best_found, best_raw);
        let distinct: BTreeSet<String> = found.iter().map(|s| s.to_string()).collect();
        prop_assert_eq!(distinct.len(), found.len());
    }

    /// Each assumption is not entailed and gets exactly the kind its form
    /// and the state dictate.
    #[test]
    fn assumptions_are_classified_exclusively(
        facts in prop::collection::vec(ground_literal(&["p", "q"]), 0..6),
        pre in prop::collection::vec(precondition(), 0..4),
    ) {
        let state: KnowledgeState = facts.into_iter().collect();
        prop_assume!(state.is_consistent());
        for s in find_substitutions(&pre, &state, &Substitution::new()) {
            for h in generate_assumptions(&pre, &s, &state) {
                let expected = match &h.content {
                    Condition::Cmp(c) => {
                        prop_assert_ne!(c.eval(), Truth::Satisfied);
                        AssumptionKind::ConstraintViolation
                    }
                    Condition::Lit(l) => {
                        prop_assert!(!state.contains(l));
                        if state.contains(&l.complement()) {
                            AssumptionKind::FactNegation
                        } else {
                            AssumptionKind::Hypothesis
                        }
                    }
                };
                prop_assert_eq!(h.kind, expected);
                prop_assert_eq!(classify(&h.content, &state), expected);
            }
        }
    }
}
