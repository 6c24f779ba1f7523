//! Robinson unification with occurs check.

use alloc::vec::Vec;

use super::subst::{Apply, Substitution};
use super::term::{Condition, Literal, Term};

/// Unifies `p` with the fact `e` under `sigma`.
///
/// Returns the most general `theta` extending `sigma` with
/// `p theta == e theta`, or `None` on a predicate, polarity or arity clash
/// or an occurs-check failure. A constraint never unifies with a literal.
/// `sigma` must be idempotent (every substitution built by this module is).
pub fn unify(p: &Condition, e: &Literal, sigma: &Substitution) -> Option<Substitution> {
    match p {
        Condition::Lit(l) => unify_literals(l, e, sigma),
        Condition::Cmp(_) => None,
    }
}

pub fn unify_literals(a: &Literal, b: &Literal, sigma: &Substitution) -> Option<Substitution> {
    if a.positive != b.positive || a.predicate != b.predicate || a.arity() != b.arity() {
        return None;
    }
    unify_term_lists(&a.args, &b.args, sigma)
}

pub fn unify_terms(a: &Term, b: &Term, sigma: &Substitution) -> Option<Substitution> {
    unify_term_lists(core::slice::from_ref(a), core::slice::from_ref(b), sigma)
}

pub fn unify_term_lists(a: &[Term], b: &[Term], sigma: &Substitution) -> Option<Substitution> {
    if a.len() != b.len() {
        return None;
    }
    let mut s = sigma.clone();
    let mut work: Vec<(Term, Term)> = a.iter().cloned().zip(b.iter().cloned()).rev().collect();
    // Non-ground arithmetic against a number cannot be solved here, but a
    // later binding may make both sides identical, so it is retried last.
    let mut deferred: Vec<(Term, Term)> = Vec::new();
    while let Some((x, y)) = work.pop() {
        let x = x.apply(&s);
        let y = y.apply(&s);
        if x == y {
            continue;
        }
        match (x, y) {
            (Term::Var(v), t) | (t, Term::Var(v)) => {
                if !s.bind(v, t) {
                    return None;
                }
            }
            (Term::Arith(o1, l1, r1), Term::Arith(o2, l2, r2)) if o1 == o2 => {
                work.push((*r1, *r2));
                work.push((*l1, *l2));
            }
            (x @ Term::Arith(..), y) | (y, x @ Term::Arith(..)) if !x.is_ground() => {
                deferred.push((x, y));
            }
            _ => return None,
        }
    }
    for (x, y) in deferred {
        if x.apply(&s) != y.apply(&s) {
            return None;
        }
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::term::{ArithOp, Var};
    use alloc::vec;

    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn binds_taxi_location() {
        let p = Literal::new("at", vec![v("t"), v("x")]);
        let e = Literal::new("at", vec![c("cab38"), c("downtown")]);
        let s = unify_literals(&p, &e, &Substitution::new()).unwrap();
        assert_eq!(s.get(&Var::new("t")), Some(&c("cab38")));
        assert_eq!(s.get(&Var::new("x")), Some(&c("downtown")));
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn identical_ground_atoms_need_nothing() {
        let e = Literal::new("at", vec![c("cab38"), c("downtown")]);
        assert_eq!(unify_literals(&e, &e, &Substitution::new()), Some(Substitution::new()));
    }

    #[test]
    fn clashes_fail() {
        let at = Literal::new("at", vec![v("t"), v("x")]);
        let inn = Literal::new("in", vec![v("p"), v("t")]);
        assert!(unify_literals(&at, &inn, &Substitution::new()).is_none());
        let neg = at.complement();
        assert!(unify_literals(&at, &neg, &Substitution::new()).is_none());
        let short = Literal::new("at", vec![v("t")]);
        assert!(unify_literals(&at, &short, &Substitution::new()).is_none());
    }

    #[test]
    fn occurs_check() {
        let x = v("x");
        let fx = Term::Arith(ArithOp::Add, alloc::boxed::Box::new(v("x")), alloc::boxed::Box::new(Term::int(1)));
        assert!(unify_terms(&x, &fx, &Substitution::new()).is_none());
    }

    #[test]
    fn constraint_never_unifies_with_literal() {
        let cmp = Condition::Cmp(crate::logic::Constraint::new(
            crate::logic::CmpOp::Ge,
            v("q"),
            Term::int(10),
        ));
        let e = Literal::new("hasfuel", vec![c("cab38"), Term::int(10)]);
        assert!(unify(&cmp, &e, &Substitution::new()).is_none());
    }

    #[test]
    fn deferred_arithmetic_resolves_after_binding() {
        let sum = Term::Arith(ArithOp::Add, alloc::boxed::Box::new(v("x")), alloc::boxed::Box::new(Term::int(1)));
        let s = unify_term_lists(&[sum, v("x")], &[Term::int(5), Term::int(4)], &Substitution::new());
        assert!(s.is_some());
        let sum = Term::Arith(ArithOp::Add, alloc::boxed::Box::new(v("x")), alloc::boxed::Box::new(Term::int(1)));
        let s = unify_term_lists(&[sum, v("x")], &[Term::int(5), Term::int(3)], &Substitution::new());
        assert!(s.is_none());
    }

    #[test]
    fn respects_existing_bindings() {
        let sigma = Substitution::try_from_pairs([(Var::new("t"), c("cab74"))]).unwrap();
        let p = Literal::new("at", vec![v("t"), v("x")]);
        let e = Literal::new("at", vec![c("cab38"), c("downtown")]);
        assert!(unify_literals(&p, &e, &sigma).is_none());
    }
}
