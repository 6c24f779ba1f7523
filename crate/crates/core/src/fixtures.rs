//! The taxi domain, built in code for unit tests.

use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{Domain, Method, Operator, Task};
use crate::logic::{ArithOp, CmpOp, Constraint, KnowledgeState, Literal, Term, Var};

fn v(n: &str) -> Term {
    Term::var(n)
}

/// A constant, or a number when `n` reads as one.
pub fn c(n: &str) -> Term {
    n.parse().map_or_else(|_| Term::constant(n), Term::int)
}

pub fn lit(p: &str, args: &[&str]) -> Literal {
    Literal::new(p, args.iter().map(|a| c(a)).collect())
}

pub fn taxi() -> Domain {
    let params = |ns: &[&str]| ns.iter().map(|n| Var::new(*n)).collect::<Vec<_>>();
    let load = Operator {
        name: "!load".into(),
        params: params(&["p", "t", "x"]),
        pre: vec![
            Literal::new("at", vec![v("p"), v("x")]).into(),
            Literal::new("at", vec![v("t"), v("x")]).into(),
        ],
        del: vec![Literal::new("at", vec![v("p"), v("x")])],
        add: vec![Literal::new("in", vec![v("p"), v("t")])],
    };
    let mv = Operator {
        name: "!move".into(),
        params: params(&["t", "x", "y"]),
        pre: vec![
            Literal::new("at", vec![v("t"), v("x")]).into(),
            Literal::new("hasfuel", vec![v("t"), v("q")]).into(),
            Constraint::new(CmpOp::Ge, v("q"), Term::int(10)).into(),
        ],
        del: vec![
            Literal::new("at", vec![v("t"), v("x")]),
            Literal::new("hasfuel", vec![v("t"), v("q")]),
        ],
        add: vec![
            Literal::new("at", vec![v("t"), v("y")]),
            Literal::new("hasfuel", vec![v("t"), Term::arith(ArithOp::Sub, v("q"), Term::int(10))]),
        ],
    };
    let unload = Operator {
        name: "!unload".into(),
        params: params(&["p", "t", "x"]),
        pre: vec![
            Literal::new("in", vec![v("p"), v("t")]).into(),
            Literal::new("at", vec![v("t"), v("x")]).into(),
        ],
        del: vec![Literal::new("in", vec![v("p"), v("t")])],
        add: vec![Literal::new("at", vec![v("p"), v("x")])],
    };
    let carry = Method {
        name: "move-passenger".into(),
        params: params(&["p", "x", "y"]),
        pre: vec![
            Literal::new("at", vec![v("p"), v("x")]).into(),
            Literal::new("at", vec![v("t"), v("x")]).into(),
        ],
        act: vec![
            Task::new("!load", vec![v("p"), v("t"), v("x")]),
            Task::new("!move", vec![v("t"), v("x"), v("y")]),
            Task::new("!unload", vec![v("p"), v("t"), v("y")]),
        ],
    };
    Domain::new(
        "taxi",
        vec![load, mv, unload],
        vec![carry],
        ["hasfuel".into(), "isloaded".into(), ">=".into()],
    )
    .unwrap()
}

/// Cab and passenger downtown, no fuel known.
pub fn downtown() -> KnowledgeState {
    [lit("at", &["cab38", "downtown"]), lit("at", &["fred", "downtown"])]
        .into_iter()
        .collect()
}

pub fn goal() -> Vec<Task> {
    vec![Task::new("move-passenger", vec![c("fred"), c("downtown"), c("park")])]
}
