//! Pretty-printers producing text the parser reads back.

use std::fmt::Write;

use abp_core::{Domain, Method, Operator, Problem};

fn joined<T: std::fmt::Display>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(" "))
}

fn head(name: &str, params: &[abp_core::Var]) -> String {
    let mut s = format!("({}", name);
    for p in params {
        write!(s, " {}", p).unwrap();
    }
    s.push(')');
    s
}

fn operator(out: &mut String, op: &Operator) {
    writeln!(out, "  (:operator {}", head(&op.name, &op.params)).unwrap();
    writeln!(out, "    :pre {}", joined(&op.pre)).unwrap();
    writeln!(out, "    :del {}", joined(&op.del)).unwrap();
    writeln!(out, "    :add {})", joined(&op.add)).unwrap();
}

fn method(out: &mut String, m: &Method) {
    writeln!(out, "  (:method {}", head(&m.name, &m.params)).unwrap();
    writeln!(out, "    :pre {}", joined(&m.pre)).unwrap();
    writeln!(out, "    :act {})", joined(&m.act)).unwrap();
}

pub fn domain_to_string(d: &Domain) -> String {
    let mut out = format!("(defdomain {}\n", d.name);
    for op in d.operators() {
        operator(&mut out, op);
    }
    for m in d.methods() {
        method(&mut out, m);
    }
    let hyps: Vec<&str> = d.hypothetical().iter().map(|h| &**h).collect();
    writeln!(out, "  (:hypothetical {}))", hyps.join(" ")).unwrap();
    out
}

pub fn problem_to_string(p: &Problem) -> String {
    let init: Vec<String> = p.init.iter().map(|l| l.to_string()).collect();
    format!(
        "(defproblem {} {}\n  (:init ({}))\n  (:goal {}))\n",
        p.name,
        p.domain_name,
        init.join("\n          "),
        joined(&p.goals)
    )
}
