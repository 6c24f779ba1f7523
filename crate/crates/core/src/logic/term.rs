//! First-order syntax: terms, literals and numeric constraints.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Zero};

/// Interned-ish identifier. Cloning is a reference count bump.
pub type Name = Arc<str>;

/// Exact rational number. `10.00` and `10` are the same value.
pub type Number = Ratio<i64>;

/// A logic variable.
///
/// `generation` distinguishes renamed copies of the same schema variable:
/// domain files always produce generation 0, and every expansion of the
/// search renames the schema it instantiates into a fresh generation so
/// that variables never clash with those already living in a state.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: Name,
    pub generation: u32,
}

impl Var {
    pub fn new(name: impl Into<Name>) -> Self {
        Var {
            name: name.into(),
            generation: 0,
        }
    }

    pub fn with_generation(name: impl Into<Name>, generation: u32) -> Self {
        Var {
            name: name.into(),
            generation,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generation == 0 {
            write!(f, "?{}", self.name)
        } else {
            write!(f, "?{}#{}", self.name, self.generation)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "+" => ArithOp::Add,
            "-" => ArithOp::Sub,
            "*" => ArithOp::Mul,
            "/" => ArithOp::Div,
            _ => return None,
        })
    }

    /// `None` on overflow or division by zero.
    pub fn eval(self, a: &Number, b: &Number) -> Option<Number> {
        match self {
            ArithOp::Add => a.checked_add(b),
            ArithOp::Sub => a.checked_sub(b),
            ArithOp::Mul => a.checked_mul(b),
            ArithOp::Div => {
                if b.is_zero() {
                    None
                } else {
                    a.checked_div(b)
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Const(Name),
    Num(Number),
    Arith(ArithOp, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.into())
    }

    pub fn int(n: i64) -> Term {
        Term::Num(Number::from_integer(n))
    }

    /// Builds an arithmetic term, folding it when both sides are numbers.
    pub fn arith(op: ArithOp, left: Term, right: Term) -> Term {
        Term::Arith(op, Box::new(left), Box::new(right)).folded()
    }

    /// Evaluates every ground arithmetic subterm. A subterm whose
    /// evaluation fails (division by zero, overflow) is left in place.
    pub fn folded(self) -> Term {
        match self {
            Term::Arith(op, l, r) => {
                let l = l.folded();
                let r = r.folded();
                if let (Term::Num(a), Term::Num(b)) = (&l, &r) {
                    if let Some(v) = op.eval(a, b) {
                        return Term::Num(v);
                    }
                }
                Term::Arith(op, Box::new(l), Box::new(r))
            }
            t => t,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) | Term::Num(_) => true,
            Term::Arith(_, l, r) => l.is_ground() && r.is_ground(),
        }
    }

    pub fn occurs(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Const(_) | Term::Num(_) => false,
            Term::Arith(_, l, r) => l.occurs(v) || r.occurs(v),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) | Term::Num(_) => {}
            Term::Arith(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Rewrites every variable through `f`. Used for renaming apart.
    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Var) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::Arith(op, l, r) => {
                Term::Arith(*op, Box::new(l.map_vars(f)), Box::new(r.map_vars(f)))
            }
            t => t.clone(),
        }
    }
}

fn fmt_number(n: &Number, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if n.is_integer() {
        write!(f, "{}", n.numer())
    } else {
        write!(f, "(/ {} {})", n.numer(), n.denom())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => v.fmt(f),
            Term::Const(c) => f.write_str(c),
            Term::Num(n) => fmt_number(n, f),
            Term::Arith(op, l, r) => write!(f, "({} {} {})", op.symbol(), l, r),
        }
    }
}

/// A signed atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub positive: bool,
    pub predicate: Name,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        Literal {
            positive: true,
            predicate: predicate.into(),
            args,
        }
    }

    pub fn negated(predicate: &str, args: Vec<Term>) -> Self {
        Literal {
            positive: false,
            predicate: predicate.into(),
            args,
        }
    }

    pub fn complement(&self) -> Literal {
        Literal {
            positive: !self.positive,
            predicate: self.predicate.clone(),
            args: self.args.clone(),
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn folded(self) -> Literal {
        Literal {
            args: self.args.into_iter().map(Term::folded).collect(),
            ..self
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        for a in &self.args {
            a.collect_vars(out);
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Var) -> Literal {
        Literal {
            positive: self.positive,
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| a.map_vars(f)).collect(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("(not ")?;
        }
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {}", a)?;
        }
        f.write_str(")")?;
        if !self.positive {
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
            CmpOp::Ne => "!=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            "=" => CmpOp::Eq,
            ">=" => CmpOp::Ge,
            ">" => CmpOp::Gt,
            "!=" => CmpOp::Ne,
            _ => return None,
        })
    }

    pub fn holds(self, a: &Number, b: &Number) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Eq => a == b,
            CmpOp::Ge => a >= b,
            CmpOp::Gt => a > b,
            CmpOp::Ne => a != b,
        }
    }
}

/// A numeric comparison such as `(>= ?q 10)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub op: CmpOp,
    pub left: Term,
    pub right: Term,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    Satisfied,
    Violated,
    Undetermined,
}

impl Constraint {
    pub fn new(op: CmpOp, left: Term, right: Term) -> Self {
        Constraint { op, left, right }
    }

    pub fn folded(self) -> Constraint {
        Constraint {
            op: self.op,
            left: self.left.folded(),
            right: self.right.folded(),
        }
    }

    /// Satisfied or violated once both sides fold to numbers, undetermined
    /// while a variable remains. A ground side that cannot be folded
    /// (division by zero, overflow) makes the constraint violated.
    pub fn eval(&self) -> Truth {
        let l = self.left.clone().folded();
        let r = self.right.clone().folded();
        match (&l, &r) {
            (Term::Num(a), Term::Num(b)) => {
                if self.op.holds(a, b) {
                    Truth::Satisfied
                } else {
                    Truth::Violated
                }
            }
            _ if l.is_ground() && r.is_ground() => Truth::Violated,
            _ => Truth::Undetermined,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        self.left.collect_vars(out);
        self.right.collect_vars(out);
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Var) -> Constraint {
        Constraint {
            op: self.op,
            left: self.left.map_vars(f),
            right: self.right.map_vars(f),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.op.symbol(), self.left, self.right)
    }
}

/// A precondition: either a literal to find in the state or a constraint to
/// evaluate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Lit(Literal),
    Cmp(Constraint),
}

impl Condition {
    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Condition::Lit(l) => Some(l),
            Condition::Cmp(_) => None,
        }
    }

    pub fn as_constraint(&self) -> Option<&Constraint> {
        match self {
            Condition::Cmp(c) => Some(c),
            Condition::Lit(_) => None,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Condition::Lit(l) => l.collect_vars(out),
            Condition::Cmp(c) => c.collect_vars(out),
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Var) -> Condition {
        match self {
            Condition::Lit(l) => Condition::Lit(l.map_vars(f)),
            Condition::Cmp(c) => Condition::Cmp(c.map_vars(f)),
        }
    }
}

impl From<Literal> for Condition {
    fn from(l: Literal) -> Self {
        Condition::Lit(l)
    }
}

impl From<Constraint> for Condition {
    fn from(c: Constraint) -> Self {
        Condition::Cmp(c)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Lit(l) => l.fmt(f),
            Condition::Cmp(c) => c.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn arithmetic_folds_exactly() {
        let t = Term::arith(ArithOp::Sub, Term::int(10), Term::int(10));
        assert_eq!(t, Term::int(0));
        let t = Term::arith(ArithOp::Div, Term::int(1), Term::int(3));
        assert_eq!(t, Term::Num(Number::new(1, 3)));
        assert_eq!(t.to_string(), "(/ 1 3)");
    }

    #[test]
    fn division_by_zero_stays_unfolded() {
        let t = Term::arith(ArithOp::Div, Term::int(1), Term::int(0));
        assert!(matches!(t, Term::Arith(..)));
        let c = Constraint::new(CmpOp::Ge, t, Term::int(0));
        assert_eq!(c.eval(), Truth::Violated);
    }

    #[test]
    fn constraint_evaluation() {
        let c = |l: Term, r: Term| Constraint::new(CmpOp::Ge, l, r).eval();
        assert_eq!(c(Term::int(10), Term::int(10)), Truth::Satisfied);
        assert_eq!(c(Term::int(5), Term::int(10)), Truth::Violated);
        assert_eq!(c(Term::var("q"), Term::int(10)), Truth::Undetermined);
    }

    #[test]
    fn display_forms() {
        let l = Literal::negated("isloaded", alloc::vec![Term::constant("cab74")]);
        assert_eq!(l.to_string(), "(not (isloaded cab74))");
        let v = Var::with_generation("q", 3);
        assert_eq!(v.to_string(), "?q#3");
    }
}
