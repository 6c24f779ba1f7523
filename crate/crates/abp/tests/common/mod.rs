//! Seeded random small planning instances.
//!
//! Every instance has at most 3 operators, 2 methods, 6 initial facts and
//! 4 preconditions per operator or method. Seeds are plain integers so a
//! failing instance can be regenerated from its number.

#![allow(dead_code)]

use std::collections::BTreeSet;

use abp_core::logic::ArithOp;
use abp_core::{
    CmpOp, Condition, Constraint, Domain, KnowledgeState, Literal, Method, Operator, Problem, Task,
    Term, Var,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// First seed of the randomized suite; instance `i` uses `SUITE_SEED + i`.
pub const SUITE_SEED: u64 = 0x5eed_0000;
pub const SUITE_SIZE: u64 = 500;
/// Depth bound shared by the planner and the oracles on the suite.
pub const SUITE_DEPTH: u32 = 8;

const PREDICATES: [(&str, usize); 4] = [("p", 1), ("q", 2), ("r", 0), ("lvl", 2)];
const CONSTANTS: [&str; 3] = ["c0", "c1", "c2"];
const PARAMS: [&str; 2] = ["a", "b"];

pub struct Instance {
    pub seed: u64,
    pub domain: Domain,
    pub problem: Problem,
}

impl Instance {
    pub fn constants(&self) -> Vec<Term> {
        let mut out: Vec<Term> = CONSTANTS.iter().map(|c| Term::constant(c)).collect();
        out.extend((0..4).map(Term::int));
        out
    }
}

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn constant(&mut self) -> Term {
        Term::constant(CONSTANTS.choose(&mut self.rng).unwrap())
    }

    fn number(&mut self) -> Term {
        Term::int(self.rng.gen_range(0..4))
    }

    /// A term drawn from `vars` or, sometimes, a constant.
    fn arg(&mut self, vars: &[Var]) -> Term {
        if !vars.is_empty() && self.rng.gen_bool(0.75) {
            Term::Var(vars.choose(&mut self.rng).unwrap().clone())
        } else {
            self.constant()
        }
    }

    fn literal(&mut self, vars: &[Var], level_var: Option<&Var>) -> Literal {
        let (pred, arity) = *PREDICATES.choose(&mut self.rng).unwrap();
        let args = if pred == "lvl" {
            let amount = match level_var {
                Some(v) => Term::Var(v.clone()),
                None => self.number(),
            };
            vec![self.arg(vars), amount]
        } else {
            (0..arity).map(|_| self.arg(vars)).collect()
        };
        let l = Literal::new(pred, args);
        if self.rng.gen_bool(0.15) {
            l.complement()
        } else {
            l
        }
    }

    /// Up to `max` preconditions over `params` plus the extra variables
    /// `?e` and `?n`; `?n` only occurs as a level, optionally compared.
    fn preconditions(&mut self, params: &[Var], max: usize) -> Vec<Condition> {
        let n = self.rng.gen_range(0..=max);
        let mut vars = params.to_vec();
        if self.rng.gen_bool(0.4) {
            vars.push(Var::new("e"));
        }
        let level = Var::new("n");
        let mut out: Vec<Condition> = Vec::new();
        let mut level_used = false;
        while out.len() < n {
            let use_level = !level_used && self.rng.gen_bool(0.25);
            let l = self.literal(&vars, use_level.then_some(&level));
            if l.predicate.as_ref() == "lvl" && use_level {
                // Only a positive level binds ?n for the constraint.
                let l = if l.positive { l } else { l.complement() };
                level_used = true;
                out.push(l.into());
                if out.len() < n && self.rng.gen_bool(0.7) {
                    let k = Term::int(self.rng.gen_range(0..4));
                    let op = *[CmpOp::Ge, CmpOp::Ge, CmpOp::Le, CmpOp::Gt].choose(&mut self.rng).unwrap();
                    out.push(Constraint::new(op, Term::Var(level.clone()), k).into());
                }
            } else {
                out.push(l.into());
            }
        }
        out
    }

    fn bound_vars(params: &[Var], pre: &[Condition]) -> Vec<Var> {
        let mut vs: BTreeSet<Var> = params.iter().cloned().collect();
        for c in pre {
            c.collect_vars(&mut vs);
        }
        vs.into_iter().collect()
    }

    fn operator(&mut self, i: usize) -> Operator {
        let params: Vec<Var> = PARAMS[..self.rng.gen_range(0..=2)].iter().map(|p| Var::new(*p)).collect();
        let pre = self.preconditions(&params, 4);
        let bound = Self::bound_vars(&params, &pre);
        let symbolic: Vec<Var> = bound.iter().filter(|v| &*v.name != "n").cloned().collect();
        let has_level = bound.iter().any(|v| &*v.name == "n");
        let mut del = Vec::new();
        let mut add = Vec::new();
        for c in &pre {
            if let Condition::Lit(l) = c {
                if l.positive && self.rng.gen_bool(0.35) {
                    del.push(l.clone());
                }
            }
        }
        for _ in 0..self.rng.gen_range(0..=2) {
            let mut l = self.literal(&symbolic, None);
            if l.predicate.as_ref() == "lvl" && has_level && self.rng.gen_bool(0.6) {
                let n = Term::Var(Var::new("n"));
                let delta = Term::int(self.rng.gen_range(1..3));
                let op = *[ArithOp::Add, ArithOp::Sub].choose(&mut self.rng).unwrap();
                l.args[1] = Term::arith(op, n, delta);
            }
            add.push(l);
        }
        Operator {
            name: format!("!o{}", i).as_str().into(),
            params,
            pre,
            del,
            add,
        }
    }

    fn task(&mut self, name: &str, arity: usize, vars: &[Var]) -> Task {
        Task::new(name, (0..arity).map(|_| self.arg(vars)).collect())
    }

    fn instance(&mut self, seed: u64) -> Option<Instance> {
        let n_ops = self.rng.gen_range(1..=3);
        let ops: Vec<Operator> = (0..n_ops).map(|i| self.operator(i)).collect();
        let n_methods = self.rng.gen_range(0..=2);
        // Method heads first so bodies can refer to any method.
        let mut heads: Vec<(String, usize)> = Vec::new();
        for i in 0..n_methods {
            if i == 1 && self.rng.gen_bool(0.35) {
                let h = heads[0].clone();
                heads.push(h);
            } else {
                heads.push((format!("m{}", i), self.rng.gen_range(0..=2)));
            }
        }
        let mut methods = Vec::new();
        for (name, arity) in &heads {
            let params: Vec<Var> = PARAMS[..*arity].iter().map(|p| Var::new(*p)).collect();
            let pre = self.preconditions(&params, 4);
            let bound: Vec<Var> = Self::bound_vars(&params, &pre)
                .into_iter()
                .filter(|v| &*v.name != "n")
                .collect();
            let mut act = Vec::new();
            for _ in 0..self.rng.gen_range(1..=3) {
                let recurse = self.rng.gen_bool(0.2);
                let t = if recurse && !heads.is_empty() {
                    let (n, a) = heads.choose(&mut self.rng).unwrap().clone();
                    self.task(&n, a, &bound)
                } else {
                    let op = ops.choose(&mut self.rng).unwrap();
                    let arity = op.params.len();
                    self.task(&op.name.clone(), arity, &bound)
                };
                act.push(t);
            }
            methods.push(Method {
                name: name.as_str().into(),
                params,
                pre,
                act,
            });
        }
        let mut hypothetical: Vec<abp_core::Name> = Vec::new();
        for (p, _) in PREDICATES {
            if self.rng.gen_bool(0.75) {
                hypothetical.push(p.into());
            }
        }
        for op in [">=", "<=", ">"] {
            if self.rng.gen_bool(0.4) {
                hypothetical.push(op.into());
            }
        }
        let domain = Domain::new("random", ops, methods, hypothetical).ok()?;

        let mut init = KnowledgeState::new();
        for _ in 0..self.rng.gen_range(2..=6) {
            let l = self.literal(&[], None);
            if !init.contradicts(&l) {
                init.insert(l);
            }
        }
        let mut goals = Vec::new();
        for _ in 0..self.rng.gen_range(1..=2) {
            let use_method = !heads.is_empty() && self.rng.gen_bool(0.7);
            let t = if use_method {
                let (n, a) = heads.choose(&mut self.rng).unwrap().clone();
                self.task(&n, a, &[])
            } else {
                let op = domain.operators().choose(&mut self.rng).unwrap();
                self.task(&op.name.clone(), op.params.len(), &[])
            };
            goals.push(t);
        }
        let problem = Problem::new("random", "random", init.iter().cloned(), goals, &domain).ok()?;
        Some(Instance {
            seed,
            domain,
            problem,
        })
    }
}

/// The instance for `seed`; generation is retried with derived streams
/// until the domain validates.
pub fn instance(seed: u64) -> Instance {
    let mut gen = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    loop {
        if let Some(i) = gen.instance(seed) {
            return i;
        }
    }
}

pub fn suite() -> impl Iterator<Item = Instance> {
    (0..SUITE_SIZE).map(|i| instance(SUITE_SEED + i))
}
