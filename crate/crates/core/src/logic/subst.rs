use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use super::term::{Condition, Constraint, Literal, Term, Var};

/// A finite map from variables to terms.
///
/// Bindings are never trivial (`?x -> ?x`) and the map is acyclic. The
/// unifier maintains the stronger idempotent form, where no bound variable
/// occurs in any range term.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    bindings: BTreeMap<Var, Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubstitutionError {
    /// The pairs bind the same variable twice.
    DuplicateVariable(Var),
    /// Repeated application would never reach a fixed point.
    Cyclic(Var),
}

impl fmt::Display for SubstitutionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubstitutionError::DuplicateVariable(v) => write!(f, "variable {} bound twice", v),
            SubstitutionError::Cyclic(v) => write!(f, "cyclic binding through {}", v),
        }
    }
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a substitution from explicit pairs, dropping trivial
    /// bindings and rejecting duplicates and cycles.
    pub fn try_from_pairs(
        pairs: impl IntoIterator<Item = (Var, Term)>,
    ) -> Result<Self, SubstitutionError> {
        let mut bindings = BTreeMap::new();
        for (v, t) in pairs {
            if t == Term::Var(v.clone()) {
                continue;
            }
            if bindings.insert(v.clone(), t).is_some() {
                return Err(SubstitutionError::DuplicateVariable(v));
            }
        }
        let s = Substitution { bindings };
        s.check_acyclic()?;
        Ok(s)
    }

    fn check_acyclic(&self) -> Result<(), SubstitutionError> {
        // Colours: absent = unvisited, false = on stack, true = done.
        fn visit(
            s: &Substitution,
            v: &Var,
            colour: &mut BTreeMap<Var, bool>,
        ) -> Result<(), SubstitutionError> {
            match colour.get(v) {
                Some(true) => return Ok(()),
                Some(false) => return Err(SubstitutionError::Cyclic(v.clone())),
                None => {}
            }
            if let Some(t) = s.bindings.get(v) {
                colour.insert(v.clone(), false);
                let mut vars = BTreeSet::new();
                t.collect_vars(&mut vars);
                for w in &vars {
                    visit(s, w, colour)?;
                }
            }
            colour.insert(v.clone(), true);
            Ok(())
        }
        let mut colour = BTreeMap::new();
        for v in self.bindings.keys() {
            visit(self, v, &mut colour)?;
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.bindings.contains_key(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.bindings.keys()
    }

    /// True when no bound variable occurs in a range term, so one
    /// application already reaches the fixed point.
    pub fn is_idempotent(&self) -> bool {
        self.bindings
            .values()
            .all(|t| self.bindings.keys().all(|v| !t.occurs(v)))
    }

    /// Adds `v -> t` to an idempotent substitution, keeping it idempotent.
    /// Fails the occurs check when `v` appears in `t` after resolution.
    pub(crate) fn bind(&mut self, v: Var, t: Term) -> bool {
        let t = t.apply(self);
        if t == Term::Var(v.clone()) {
            return true;
        }
        if t.occurs(&v) {
            return false;
        }
        let single = Substitution {
            bindings: BTreeMap::from([(v.clone(), t.clone())]),
        };
        for range in self.bindings.values_mut() {
            if range.occurs(&v) {
                *range = range.apply(&single);
            }
        }
        self.bindings.insert(v, t);
        true
    }

    /// Composition `self . theta`: apply `theta` to every range term of
    /// `self`, then add the bindings of `theta` for variables outside the
    /// domain of `self`.
    pub fn compose(&self, theta: &Substitution) -> Substitution {
        let mut bindings: BTreeMap<Var, Term> = self
            .bindings
            .iter()
            .map(|(v, t)| (v.clone(), t.apply(theta)))
            .filter(|(v, t)| *t != Term::Var(v.clone()))
            .collect();
        for (v, t) in &theta.bindings {
            if !self.bindings.contains_key(v) {
                bindings.insert(v.clone(), t.clone());
            }
        }
        Substitution { bindings }
    }

    /// True when `other` is an instance of `self`: some `rho` makes
    /// `self . rho` agree with `other` on every variable either one binds.
    pub fn is_generalisation_of(&self, other: &Substitution) -> bool {
        self.bindings
            .iter()
            .all(|(v, t)| t.apply(other) == Term::Var(v.clone()).apply(other))
    }

    /// Removes every binding for variables not accepted by `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&Var) -> bool) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(v, _)| keep(v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} -> {}", v, t)?;
        }
        f.write_str("}")
    }
}

/// Simultaneous substitution: every variable of the substitution's domain
/// is replaced once, and ground arithmetic is folded afterwards.
pub trait Apply: Sized {
    fn apply(&self, s: &Substitution) -> Self;
}

fn replace(t: &Term, s: &Substitution) -> Term {
    match t {
        Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Arith(op, l, r) => Term::Arith(
            *op,
            alloc::boxed::Box::new(replace(l, s)),
            alloc::boxed::Box::new(replace(r, s)),
        ),
        _ => t.clone(),
    }
}

impl Apply for Term {
    fn apply(&self, s: &Substitution) -> Term {
        replace(self, s).folded()
    }
}

impl Apply for Literal {
    fn apply(&self, s: &Substitution) -> Literal {
        Literal {
            positive: self.positive,
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| a.apply(s)).collect(),
        }
    }
}

impl Apply for Constraint {
    fn apply(&self, s: &Substitution) -> Constraint {
        Constraint {
            op: self.op,
            left: self.left.apply(s),
            right: self.right.apply(s),
        }
    }
}

impl Apply for Condition {
    fn apply(&self, s: &Substitution) -> Condition {
        match self {
            Condition::Lit(l) => Condition::Lit(l.apply(s)),
            Condition::Cmp(c) => Condition::Cmp(c.apply(s)),
        }
    }
}

impl<T: Apply> Apply for Vec<T> {
    fn apply(&self, s: &Substitution) -> Vec<T> {
        self.iter().map(|x| x.apply(s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn v(n: &str) -> Var {
        Var::new(n)
    }

    #[test]
    fn application_is_simultaneous() {
        let s = Substitution::try_from_pairs([(v("x"), Term::var("y")), (v("y"), Term::constant("a"))])
            .unwrap();
        let l = Literal::new("p", vec![Term::var("x"), Term::var("y")]);
        assert_eq!(
            l.apply(&s),
            Literal::new("p", vec![Term::var("y"), Term::constant("a")])
        );
    }

    #[test]
    fn cycles_and_duplicates_rejected() {
        let cyc = Substitution::try_from_pairs([(v("x"), Term::var("y")), (v("y"), Term::var("x"))]);
        assert!(matches!(cyc, Err(SubstitutionError::Cyclic(_))));
        let dup = Substitution::try_from_pairs([(v("x"), Term::int(1)), (v("x"), Term::int(2))]);
        assert!(matches!(dup, Err(SubstitutionError::DuplicateVariable(_))));
        let triv = Substitution::try_from_pairs([(v("x"), Term::var("x"))]).unwrap();
        assert!(triv.is_empty());
    }

    #[test]
    fn compose_applies_theta_to_ranges() {
        let s = Substitution::try_from_pairs([(v("x"), Term::var("y"))]).unwrap();
        let t = Substitution::try_from_pairs([(v("y"), Term::constant("a")), (v("x"), Term::int(3))])
            .unwrap();
        let c = s.compose(&t);
        assert_eq!(c.get(&v("x")), Some(&Term::constant("a")));
        assert_eq!(c.get(&v("y")), Some(&Term::constant("a")));
    }

    #[test]
    fn generalisation_order() {
        let general = Substitution::try_from_pairs([(v("t"), Term::constant("c"))]).unwrap();
        let specific = Substitution::try_from_pairs([
            (v("t"), Term::constant("c")),
            (v("q"), Term::int(10)),
        ])
        .unwrap();
        assert!(general.is_generalisation_of(&specific));
        assert!(!specific.is_generalisation_of(&general));
        assert!(Substitution::new().is_generalisation_of(&general));
    }
}
