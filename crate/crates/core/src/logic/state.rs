use alloc::collections::btree_set::{self, BTreeSet};
use core::fmt;

use super::term::{Literal, Var};

/// A partial description of the world: a consistent set of literals.
///
/// Inserting a literal withdraws its complement, so the state never holds
/// both `p` and `(not p)`. Literals are stored with ground arithmetic
/// folded.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KnowledgeState {
    facts: BTreeSet<Literal>,
}

impl KnowledgeState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `lit`, withdrawing its complement. Returns `false` if the
    /// literal was already present.
    pub fn insert(&mut self, lit: Literal) -> bool {
        let lit = lit.folded();
        self.facts.remove(&lit.complement());
        self.facts.insert(lit)
    }

    pub fn remove(&mut self, lit: &Literal) -> bool {
        self.facts.remove(lit)
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.facts.contains(lit)
    }

    /// True when the complement of `lit` is known.
    pub fn contradicts(&self, lit: &Literal) -> bool {
        self.facts.contains(&lit.complement())
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn iter(&self) -> btree_set::Iter<'_, Literal> {
        self.facts.iter()
    }

    pub fn is_consistent(&self) -> bool {
        self.facts.iter().all(|l| !self.contradicts(l))
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for l in &self.facts {
            l.collect_vars(&mut out);
        }
        out
    }

    /// `(E - {not h | h in H}) + H`. `hypotheses` must not contain a
    /// literal together with its complement.
    pub fn consistent_union<'a>(&self, hypotheses: impl IntoIterator<Item = &'a Literal>) -> Self {
        let mut out = self.clone();
        for h in hypotheses {
            out.insert(h.clone());
        }
        out
    }
}

impl FromIterator<Literal> for KnowledgeState {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        let mut s = KnowledgeState::new();
        for l in iter {
            s.insert(l);
        }
        s
    }
}

impl<'a> IntoIterator for &'a KnowledgeState {
    type Item = &'a Literal;
    type IntoIter = btree_set::Iter<'a, Literal>;

    fn into_iter(self) -> Self::IntoIter {
        self.facts.iter()
    }
}

impl fmt::Display for KnowledgeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, l) in self.facts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", l)?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Term;
    use alloc::vec;

    fn lit(p: &str, args: &[&str]) -> Literal {
        Literal::new(p, args.iter().map(|a| Term::constant(a)).collect())
    }

    #[test]
    fn fact_negation_replaces_complement() {
        let e: KnowledgeState = [
            lit("isloaded", &["cab74"]).complement(),
            lit("at", &["cab74", "downtown"]),
        ]
        .into_iter()
        .collect();
        let h = vec![lit("isloaded", &["cab74"])];
        let out = e.consistent_union(&h);
        let expected: KnowledgeState = [lit("isloaded", &["cab74"]), lit("at", &["cab74", "downtown"])]
            .into_iter()
            .collect();
        assert_eq!(out, expected);
        assert!(out.is_consistent());
    }

    #[test]
    fn union_edge_cases() {
        let e: KnowledgeState = [lit("at", &["fred", "park"])].into_iter().collect();
        assert_eq!(e.consistent_union(&[]), e);
        assert_eq!(KnowledgeState::new().consistent_union(&[lit("at", &["fred", "park"])]), e);
    }

    #[test]
    fn duplicate_insert_is_noop() {
        let mut e = KnowledgeState::new();
        assert!(e.insert(lit("p", &["a"])));
        assert!(!e.insert(lit("p", &["a"])));
        assert_eq!(e.len(), 1);
    }
}
