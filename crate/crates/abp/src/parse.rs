//! Domain and problem files.
//!
//! ```text
//! (defdomain <name>
//!   (:operator (!<name> ?v ...) :pre (<cond> ...) :del (<atom> ...) :add (<atom> ...))
//!   (:method (<name> ?v ...) :pre (<cond> ...) :act ((<task> <term> ...) ...))
//!   (:hypothetical <pred-or-comparison> ...))
//!
//! (defproblem <name> <domain-name>
//!   (:init (<atom> ...))
//!   (:goal ((<task> <term> ...) ...)))
//! ```

use std::str::FromStr;

use abp_core::domain::DomainError;
use abp_core::logic::{ArithOp, Number};
use abp_core::{CmpOp, Condition, Constraint, Domain, Literal, Method, Name, Operator, Problem, Task, Term, Var};
use num_rational::Ratio;

use crate::sexp::{parse_all, parse_one, Pos, Sexp, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("{pos}: {msg}")]
    Malformed { pos: Pos, msg: String },
    #[error("{0}")]
    Invalid(DomainError),
}

impl From<DomainError> for ParseError {
    fn from(e: DomainError) -> Self {
        ParseError::Invalid(e)
    }
}

pub(crate) fn malformed<T>(at: &Sexp, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Malformed {
        pos: at.pos(),
        msg: msg.into(),
    })
}

fn list<'a>(x: &'a Sexp, what: &str) -> Result<&'a [Sexp], ParseError> {
    x.as_list().map_or_else(|| malformed(x, format!("expected {}", what)), Ok)
}

fn symbol<'a>(x: &'a Sexp, what: &str) -> Result<&'a str, ParseError> {
    match x.as_atom() {
        Some(s) if !s.starts_with('?') && !s.starts_with(':') && parse_number(s).is_none() => Ok(s),
        _ => malformed(x, format!("expected {}, found {}", what, x)),
    }
}

/// Integers, decimals (`10.00` is `10`) and fractions `n/d`.
pub fn parse_number(s: &str) -> Option<Number> {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    if !body.starts_with(|c: char| c.is_ascii_digit()) {
        return None;
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int: i64 = int.parse().ok()?;
        let scale = 10i64.checked_pow(frac.len() as u32)?;
        let frac: i64 = frac.parse().ok()?;
        let mag = int.checked_abs()?.checked_mul(scale)?.checked_add(frac)?;
        let numer = if negative { -mag } else { mag };
        return Some(Ratio::new(numer, scale));
    }
    if s.contains('/') {
        let r = Ratio::<i64>::from_str(s).ok()?;
        return Some(r);
    }
    s.parse::<i64>().ok().map(Ratio::from_integer)
}

fn parse_var(s: &str) -> Option<Var> {
    let body = s.strip_prefix('?')?;
    let (name, generation) = match body.split_once('#') {
        Some((n, g)) => (n, g.parse().ok()?),
        None => (body, 0),
    };
    let ok = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '-' | '_' | '.' | '\''));
    ok.then(|| Var::with_generation(name, generation))
}

pub fn parse_term(x: &Sexp) -> Result<Term, ParseError> {
    match x {
        Sexp::Atom(s, _) => {
            if s.starts_with('?') {
                return parse_var(s).map_or_else(|| malformed(x, format!("bad variable {}", s)), |v| Ok(Term::Var(v)));
            }
            if let Some(n) = parse_number(s) {
                return Ok(Term::Num(n));
            }
            if s.starts_with(|c: char| c.is_ascii_digit()) {
                return malformed(x, format!("bad number {}", s));
            }
            Ok(Term::constant(symbol(x, "a term")?))
        }
        Sexp::List(items, _) => {
            let op = items.first().and_then(Sexp::as_atom).and_then(ArithOp::from_symbol);
            match (op, items.len()) {
                (Some(op), 3) => Ok(Term::arith(op, parse_term(&items[1])?, parse_term(&items[2])?)),
                _ => malformed(x, format!("expected a term, found {}", x)),
            }
        }
    }
}

fn parse_terms(xs: &[Sexp]) -> Result<Vec<Term>, ParseError> {
    xs.iter().map(parse_term).collect()
}

pub fn parse_literal(x: &Sexp) -> Result<Literal, ParseError> {
    let items = list(x, "an atom")?;
    if items.first().is_some_and(|h| h.is_atom("not")) {
        if items.len() != 2 {
            return malformed(x, "expected (not (<pred> <term> ...))");
        }
        let inner = parse_literal(&items[1])?;
        if !inner.positive {
            return malformed(x, "double negation");
        }
        return Ok(inner.complement());
    }
    let Some(head) = items.first() else {
        return malformed(x, "empty atom");
    };
    let pred = symbol(head, "a predicate")?;
    if CmpOp::from_symbol(pred).is_some() || ArithOp::from_symbol(pred).is_some() || pred == "not" {
        return malformed(head, format!("{} cannot be used as a predicate", pred));
    }
    Ok(Literal::new(pred, parse_terms(&items[1..])?).folded())
}

pub fn parse_condition(x: &Sexp) -> Result<Condition, ParseError> {
    let items = list(x, "an atom or a constraint")?;
    if let Some(op) = items.first().and_then(Sexp::as_atom).and_then(CmpOp::from_symbol) {
        if items.len() != 3 {
            return malformed(x, format!("comparison {} takes two terms", op.symbol()));
        }
        let c = Constraint::new(op, parse_term(&items[1])?, parse_term(&items[2])?);
        return Ok(Condition::Cmp(c.folded()));
    }
    Ok(Condition::Lit(parse_literal(x)?))
}

pub fn parse_task(x: &Sexp) -> Result<Task, ParseError> {
    let items = list(x, "a task")?;
    let Some(head) = items.first() else {
        return malformed(x, "empty task");
    };
    Ok(Task::new(symbol(head, "a task name")?, parse_terms(&items[1..])?))
}

fn parse_head(x: &Sexp) -> Result<(Name, Vec<Var>), ParseError> {
    let items = list(x, "a head (<name> ?v ...)")?;
    let Some(head) = items.first() else {
        return malformed(x, "empty head");
    };
    let name: Name = symbol(head, "an action name")?.into();
    let mut params = Vec::new();
    for p in &items[1..] {
        match p.as_atom().and_then(parse_var) {
            Some(v) => params.push(v),
            None => return malformed(p, format!("expected a parameter variable, found {}", p)),
        }
    }
    Ok((name, params))
}

/// Reads `:key value` pairs, rejecting unknown and repeated keys.
fn keyed<'a>(x: &Sexp, items: &'a [Sexp], allowed: &[&str]) -> Result<Vec<(&'a str, &'a Sexp)>, ParseError> {
    let mut out: Vec<(&str, &Sexp)> = Vec::new();
    let mut it = items.iter();
    while let Some(k) = it.next() {
        let Some(key) = k.as_atom().filter(|k| allowed.contains(k)) else {
            return malformed(k, format!("expected one of {}, found {}", allowed.join(" "), k));
        };
        if out.iter().any(|(seen, _)| *seen == key) {
            return malformed(k, format!("repeated {}", key));
        }
        let Some(v) = it.next() else {
            return malformed(x, format!("{} has no value", key));
        };
        out.push((key, v));
    }
    Ok(out)
}

fn each<T>(x: &Sexp, what: &str, f: impl Fn(&Sexp) -> Result<T, ParseError>) -> Result<Vec<T>, ParseError> {
    list(x, what)?.iter().map(f).collect()
}

fn parse_operator(x: &Sexp, items: &[Sexp]) -> Result<Operator, ParseError> {
    let Some(head) = items.first() else {
        return malformed(x, "operator without a head");
    };
    let (name, params) = parse_head(head)?;
    let mut op = Operator {
        name,
        params,
        pre: Vec::new(),
        del: Vec::new(),
        add: Vec::new(),
    };
    for (k, v) in keyed(x, &items[1..], &[":pre", ":del", ":add"])? {
        match k {
            ":pre" => op.pre = each(v, "a precondition list", parse_condition)?,
            ":del" => op.del = each(v, "a list of atoms", parse_literal)?,
            _ => op.add = each(v, "a list of atoms", parse_literal)?,
        }
    }
    Ok(op)
}

fn parse_method(x: &Sexp, items: &[Sexp]) -> Result<Method, ParseError> {
    let Some(head) = items.first() else {
        return malformed(x, "method without a head");
    };
    let (name, params) = parse_head(head)?;
    let mut m = Method {
        name,
        params,
        pre: Vec::new(),
        act: Vec::new(),
    };
    for (k, v) in keyed(x, &items[1..], &[":pre", ":act"])? {
        match k {
            ":pre" => m.pre = each(v, "a precondition list", parse_condition)?,
            _ => m.act = each(v, "a task list", parse_task)?,
        }
    }
    Ok(m)
}

pub fn domain_from_sexp(x: &Sexp) -> Result<Domain, ParseError> {
    let items = list(x, "(defdomain <name> ...)")?;
    if !items.first().is_some_and(|h| h.is_atom("defdomain")) || items.len() < 2 {
        return malformed(x, "expected (defdomain <name> ...)");
    }
    let name = symbol(&items[1], "a domain name")?;
    let mut operators = Vec::new();
    let mut methods = Vec::new();
    let mut hypothetical: Vec<Name> = Vec::new();
    for item in &items[2..] {
        let parts = list(item, "(:operator ...), (:method ...) or (:hypothetical ...)")?;
        match parts.first().and_then(Sexp::as_atom) {
            Some(":operator") => operators.push(parse_operator(item, &parts[1..])?),
            Some(":method") => methods.push(parse_method(item, &parts[1..])?),
            Some(":hypothetical") => {
                for h in &parts[1..] {
                    match h.as_atom() {
                        Some(s) if !s.starts_with('?') && !s.starts_with(':') => hypothetical.push(s.into()),
                        _ => return malformed(h, format!("expected a predicate or comparison, found {}", h)),
                    }
                }
            }
            _ => return malformed(item, "expected (:operator ...), (:method ...) or (:hypothetical ...)"),
        }
    }
    Ok(Domain::new(name, operators, methods, hypothetical)?)
}

pub fn problem_from_sexp(x: &Sexp, domain: &Domain) -> Result<Problem, ParseError> {
    let items = list(x, "(defproblem <name> <domain> ...)")?;
    if !items.first().is_some_and(|h| h.is_atom("defproblem")) || items.len() < 3 {
        return malformed(x, "expected (defproblem <name> <domain-name> ...)");
    }
    let name = symbol(&items[1], "a problem name")?;
    let domain_name = symbol(&items[2], "a domain name")?;
    let mut init = None;
    let mut goals = None;
    for item in &items[3..] {
        let parts = list(item, "(:init ...) or (:goal ...)")?;
        let slot = match parts.first().and_then(Sexp::as_atom) {
            Some(":init") => &mut init,
            Some(":goal") => &mut goals,
            _ => return malformed(item, "expected (:init (...)) or (:goal (...))"),
        };
        if slot.is_some() || parts.len() != 2 {
            return malformed(item, "each of :init and :goal takes one list and appears once");
        }
        *slot = Some(&parts[1]);
    }
    let init = match init {
        Some(x) => each(x, "a list of atoms", parse_literal)?,
        None => Vec::new(),
    };
    let goals = match goals {
        Some(x) => each(x, "a task list", parse_task)?,
        None => Vec::new(),
    };
    Ok(Problem::new(name, domain_name, init, goals, domain)?)
}

pub fn parse_domain(text: &str) -> Result<Domain, ParseError> {
    domain_from_sexp(&parse_one(text)?)
}

pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem, ParseError> {
    problem_from_sexp(&parse_one(text)?, domain)
}

/// Reads a parenthesised list of atoms as a state.
pub fn parse_state(text: &str) -> Result<Vec<Literal>, ParseError> {
    let forms = parse_all(text)?;
    forms.iter().map(parse_literal).collect()
}
