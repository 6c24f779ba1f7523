//! Slow reference procedures for testing the planner.
//!
//! Nothing here is clever: [`brute_force`] walks every branch of the raw
//! match/skip tree, [`plain_htn`] is a depth-first decomposer that never
//! assumes anything, and [`replay_exhaustive`] checks a conjecture by
//! trying every instantiation of each operator. All three refuse bounds
//! large enough to make them run for ages.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::assume::{refine_with_constraints, Assumption, AssumptionKind};
use crate::domain::{Domain, Task, TaskKind};
use crate::logic::{
    unify_literals, unify_term_lists, Apply, Condition, KnowledgeState, Literal, Substitution,
    Term, Truth, Var,
};
use crate::search::{Conjecture, Step};

pub const MAX_DEPTH_BOUND: u32 = 12;
pub const MAX_WEIGHT_BOUND: u32 = 6;
/// Node limit of a single oracle run.
pub const MAX_EXPLORED: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    DepthBoundTooLarge(u32),
    WeightBoundTooLarge(u32),
    TooManyNodes,
    UnknownTask(Task),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::DepthBoundTooLarge(d) => {
                write!(f, "depth bound {} exceeds the oracle limit {}", d, MAX_DEPTH_BOUND)
            }
            OracleError::WeightBoundTooLarge(w) => {
                write!(f, "weight bound {} exceeds the oracle limit {}", w, MAX_WEIGHT_BOUND)
            }
            OracleError::TooManyNodes => {
                write!(f, "oracle gave up after {} nodes", MAX_EXPLORED)
            }
            OracleError::UnknownTask(t) => write!(f, "no operator or method for {}", t),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleResult {
    /// Present iff `witnesses` is non-empty.
    pub min_weight: Option<u32>,
    /// Minimal conjectures, variables renamed canonically.
    pub witnesses: BTreeSet<Conjecture>,
    pub explored: u64,
}

fn check_bounds(depth: u32, weight: Option<u32>) -> Result<(), OracleError> {
    if depth > MAX_DEPTH_BOUND {
        return Err(OracleError::DepthBoundTooLarge(depth));
    }
    match weight {
        Some(w) if w > MAX_WEIGHT_BOUND => Err(OracleError::WeightBoundTooLarge(w)),
        _ => Ok(()),
    }
}

/// Unifies without binding any variable of the fact or of the terms `s`
/// already maps to.
fn match_rigid(p: &Literal, e: &Literal, s: &Substitution) -> Option<Substitution> {
    let t = unify_literals(p, e, s)?;
    let mut fixed = BTreeSet::new();
    e.collect_vars(&mut fixed);
    for (_, x) in s.iter() {
        x.collect_vars(&mut fixed);
    }
    let ok = t.iter().all(|(v, _)| s.get(v).is_some() || !fixed.contains(v));
    ok.then_some(t)
}

/// Binds a schema head to a task without instantiating the task.
fn bind_head(head: &Task, task: &Task) -> Option<Substitution> {
    let s = unify_term_lists(&head.args, &task.args, &Substitution::new())?;
    (task.args.apply(&s) == task.args).then_some(s)
}

/// Every leaf of the match/skip tree over the literal preconditions.
fn raw_branches(pre: &[Condition], state: &KnowledgeState, s: &Substitution, out: &mut Vec<Substitution>) {
    let Some((first, rest)) = pre.split_first() else {
        out.push(s.clone());
        return;
    };
    if let Condition::Lit(p) = first {
        for e in state {
            if let Some(t) = match_rigid(p, e, s) {
                raw_branches(rest, state, &t, out);
            }
        }
    }
    raw_branches(rest, state, s, out);
}

fn open_preconditions(pre: &[Condition], s: &Substitution, state: &KnowledgeState) -> Vec<Assumption> {
    let mut out: Vec<Assumption> = Vec::new();
    for p in pre {
        let p = p.apply(s);
        let kind = match &p {
            Condition::Lit(l) if state.contains(l) => continue,
            Condition::Lit(l) if state.contradicts(l) => AssumptionKind::FactNegation,
            Condition::Lit(_) => AssumptionKind::Hypothesis,
            Condition::Cmp(c) if c.eval() == Truth::Satisfied => continue,
            Condition::Cmp(_) => AssumptionKind::ConstraintViolation,
        };
        let h = Assumption { content: p, kind };
        if !out.contains(&h) {
            out.push(h);
        }
    }
    out
}

/// Some assumption negates a literal precondition under `s`.
fn undermines(pre: &[Condition], s: &Substitution, hs: &[Assumption]) -> bool {
    hs.iter().filter_map(Assumption::literal).any(|h| {
        pre.iter().any(|p| matches!(p, Condition::Lit(l) if l.apply(s).complement() == *h))
    })
}

struct Edge {
    kind: TaskKind,
    action: Task,
    assumptions: Vec<Assumption>,
}

struct Exhaustive<'d> {
    domain: &'d Domain,
    depth_bound: u32,
    weight_bound: Option<u32>,
    explored: u64,
    best: Option<u32>,
    witnesses: BTreeSet<Conjecture>,
    path: Vec<Edge>,
}

impl Exhaustive<'_> {
    fn leaf(&mut self, weight: u32) {
        if self.best.is_some_and(|b| weight > b) {
            return;
        }
        if self.best != Some(weight) {
            self.witnesses.clear();
            self.best = Some(weight);
        }
        let mut steps = Vec::new();
        let mut pending = Vec::new();
        for e in &self.path {
            pending.extend(e.assumptions.iter().cloned());
            if e.kind == TaskKind::Primitive {
                steps.push(Step {
                    assumptions: core::mem::take(&mut pending),
                    action: e.action.clone(),
                });
            }
        }
        let chi = Conjecture {
            steps,
            trailing: pending,
            total_weight: weight,
        };
        self.witnesses.insert(canonical(&chi));
    }

    fn visit(
        &mut self,
        state: &KnowledgeState,
        tasks: &[Task],
        weight: u32,
        depth: u32,
    ) -> Result<(), OracleError> {
        self.explored += 1;
        if self.explored > MAX_EXPLORED {
            return Err(OracleError::TooManyNodes);
        }
        let Some((task, rest)) = tasks.split_first() else {
            self.leaf(weight);
            return Ok(());
        };
        if depth >= self.depth_bound {
            return Ok(());
        }
        let g = depth + 1;
        let domain = self.domain;
        match task.kind() {
            TaskKind::Primitive => {
                let op = domain
                    .operator(&task.name)
                    .ok_or_else(|| OracleError::UnknownTask(task.clone()))?
                    .renamed(g);
                let Some(s0) = bind_head(&op.head(), task) else { return Ok(()) };
                for s in self.candidates(&op.pre, state, &s0, g) {
                    let Some((hs, w)) = self.admissible(&op.pre, &s, state, weight) else { continue };
                    let mut next = state.consistent_union(hs.iter().filter_map(Assumption::literal));
                    for d in &op.del {
                        next.remove(&d.apply(&s));
                    }
                    for a in &op.add {
                        next.insert(a.apply(&s));
                    }
                    self.path.push(Edge {
                        kind: TaskKind::Primitive,
                        action: op.head().apply(&s),
                        assumptions: hs,
                    });
                    let r = self.visit(&next, rest, w, g);
                    self.path.pop();
                    r?;
                }
            }
            TaskKind::Compound => {
                let methods: Vec<_> = domain.methods_for(&task.name).map(|m| m.renamed(g)).collect();
                if methods.is_empty() {
                    return Err(OracleError::UnknownTask(task.clone()));
                }
                for m in &methods {
                    let Some(s0) = bind_head(&m.head(), task) else { continue };
                    for s in self.candidates(&m.pre, state, &s0, g) {
                        let Some((hs, w)) = self.admissible(&m.pre, &s, state, weight) else { continue };
                        let next = state.consistent_union(hs.iter().filter_map(Assumption::literal));
                        let mut tasks = m.act.apply(&s);
                        tasks.extend(rest.iter().cloned());
                        self.path.push(Edge {
                            kind: TaskKind::Compound,
                            action: m.head().apply(&s),
                            assumptions: hs,
                        });
                        let r = self.visit(&next, &tasks, w, g);
                        self.path.pop();
                        r?;
                    }
                }
            }
        }
        Ok(())
    }

    fn candidates(
        &self,
        pre: &[Condition],
        state: &KnowledgeState,
        s0: &Substitution,
        g: u32,
    ) -> Vec<Substitution> {
        let mut raw = Vec::new();
        raw_branches(pre, state, s0, &mut raw);
        let mut out: Vec<Substitution> = Vec::new();
        for s in raw {
            let refined = refine_with_constraints(pre, &s, state, |v| v.generation == g);
            for c in core::iter::once(s).chain(refined) {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        out
    }

    fn admissible(
        &self,
        pre: &[Condition],
        s: &Substitution,
        state: &KnowledgeState,
        weight: u32,
    ) -> Option<(Vec<Assumption>, u32)> {
        let hs = open_preconditions(pre, s, state);
        if hs.iter().any(|h| !self.domain.is_hypothetical(h.symbol())) || undermines(pre, s, &hs) {
            return None;
        }
        let w = weight + hs.len() as u32;
        let cap = match (self.weight_bound, self.best) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if cap.is_some_and(|c| w > c) {
            return None;
        }
        Some((hs, w))
    }
}

/// Exact minimum weight of a conjecture for `goals`, and every minimal
/// conjecture, by exhaustive enumeration of the unfiltered match/skip
/// tree.
///
/// `depth_bound` limits the number of expansions along a branch, exactly
/// like the planner's `max_depth`. `weight_bound` of `None` means no bound
/// on the weight, which is only safe when the depth bound keeps the tree
/// small.
pub fn brute_force(
    init: &KnowledgeState,
    domain: &Domain,
    goals: &[Task],
    depth_bound: u32,
    weight_bound: Option<u32>,
) -> Result<OracleResult, OracleError> {
    check_bounds(depth_bound, weight_bound)?;
    let mut ex = Exhaustive {
        domain,
        depth_bound,
        weight_bound,
        explored: 0,
        best: None,
        witnesses: BTreeSet::new(),
        path: Vec::new(),
    };
    ex.visit(init, goals, 0, 0)?;
    Ok(OracleResult {
        min_weight: ex.best,
        witnesses: ex.witnesses,
        explored: ex.explored,
    })
}

/// Every way to match all literal preconditions against facts with all
/// constraints satisfied, in state order.
fn strict_matches(pre: &[Condition], state: &KnowledgeState, s: &Substitution, out: &mut Vec<Substitution>) {
    let Some((first, rest)) = pre.split_first() else {
        out.push(s.clone());
        return;
    };
    match first {
        Condition::Lit(p) => {
            for e in state {
                if let Some(t) = match_rigid(p, e, s) {
                    strict_matches(rest, state, &t, out);
                }
            }
        }
        Condition::Cmp(_) => strict_matches(rest, state, s, out),
    }
}

fn strict_candidates(pre: &[Condition], state: &KnowledgeState, s0: &Substitution) -> Vec<Substitution> {
    let mut raw = Vec::new();
    strict_matches(pre, state, s0, &mut raw);
    let mut out: Vec<Substitution> = Vec::new();
    for s in raw {
        let ok = pre.iter().all(|c| match c.apply(&s) {
            Condition::Lit(l) => state.contains(&l),
            Condition::Cmp(c) => c.eval() == Truth::Satisfied,
        });
        if ok && !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

fn decompose(
    state: &KnowledgeState,
    tasks: &[Task],
    depth: u32,
    bound: u32,
    domain: &Domain,
    plan: &mut Vec<Task>,
) -> Result<bool, OracleError> {
    let Some((task, rest)) = tasks.split_first() else {
        return Ok(true);
    };
    if depth >= bound {
        return Ok(false);
    }
    let g = depth + 1;
    match task.kind() {
        TaskKind::Primitive => {
            let op = domain
                .operator(&task.name)
                .ok_or_else(|| OracleError::UnknownTask(task.clone()))?
                .renamed(g);
            let Some(s0) = bind_head(&op.head(), task) else { return Ok(false) };
            for s in strict_candidates(&op.pre, state, &s0) {
                let mut next = state.clone();
                for d in &op.del {
                    next.remove(&d.apply(&s));
                }
                for a in &op.add {
                    next.insert(a.apply(&s));
                }
                plan.push(op.head().apply(&s));
                if decompose(&next, rest, g, bound, domain, plan)? {
                    return Ok(true);
                }
                plan.pop();
            }
        }
        TaskKind::Compound => {
            let methods: Vec<_> = domain.methods_for(&task.name).map(|m| m.renamed(g)).collect();
            if methods.is_empty() {
                return Err(OracleError::UnknownTask(task.clone()));
            }
            for m in &methods {
                let Some(s0) = bind_head(&m.head(), task) else { continue };
                for s in strict_candidates(&m.pre, state, &s0) {
                    let mut next_tasks = m.act.apply(&s);
                    next_tasks.extend(rest.iter().cloned());
                    if decompose(state, &next_tasks, g, bound, domain, plan)? {
                        return Ok(true);
                    }
                }
            }
        }
    }
    Ok(false)
}

/// First plan found by depth-first decomposition that requires every
/// precondition to hold. Methods are tried in declaration order and
/// matches in state order.
pub fn plain_htn(
    init: &KnowledgeState,
    domain: &Domain,
    goals: &[Task],
    depth_bound: u32,
) -> Result<Option<Vec<Task>>, OracleError> {
    check_bounds(depth_bound, None)?;
    let mut plan = Vec::new();
    Ok(decompose(init, goals, 0, depth_bound, domain, &mut plan)?.then_some(plan))
}

/// Renames the variables of `chi` to `?v0`, `?v1`, ... in order of first
/// occurrence, so conjectures equal up to renaming become equal.
pub fn canonical(chi: &Conjecture) -> Conjecture {
    let mut names: BTreeMap<Var, Var> = BTreeMap::new();
    let mut f = |v: &Var| {
        let k = names.len();
        names
            .entry(v.clone())
            .or_insert_with(|| Var::new(format!("v{}", k).as_str()))
            .clone()
    };
    let mut steps = Vec::new();
    for s in &chi.steps {
        let assumptions = s
            .assumptions
            .iter()
            .map(|h| Assumption {
                content: h.content.map_vars(&mut f),
                kind: h.kind,
            })
            .collect();
        steps.push(Step {
            assumptions,
            action: s.action.map_vars(&mut f),
        });
    }
    let trailing = chi
        .trailing
        .iter()
        .map(|h| Assumption {
            content: h.content.map_vars(&mut f),
            kind: h.kind,
        })
        .collect();
    Conjecture {
        steps,
        trailing,
        total_weight: chi.total_weight,
    }
}

fn terms_of(state: &KnowledgeState, extra: &[Term]) -> Vec<Term> {
    let mut out: BTreeSet<Term> = extra.iter().cloned().collect();
    for l in state {
        out.extend(l.args.iter().cloned());
    }
    out.into_iter().collect()
}

/// Checks `chi` by trying, for every step, every assignment of the
/// operator's non-parameter variables to terms occurring in the state.
///
/// Shares no code with the planner's validator beyond the data types; used
/// to decide whether a mutated conjecture happens to still be valid.
pub fn replay_exhaustive(chi: &Conjecture, init: &KnowledgeState, domain: &Domain) -> bool {
    if chi.assumption_count() as u32 != chi.total_weight {
        return false;
    }
    replay_from(chi, 0, init, domain)
}

fn inject_all(state: &KnowledgeState, hs: &[Assumption], domain: &Domain) -> Option<KnowledgeState> {
    let mut s = state.clone();
    for h in hs {
        if !domain.is_hypothetical(h.symbol()) {
            return None;
        }
        match &h.content {
            Condition::Lit(l) => {
                if s.iter().any(|e| e == l) {
                    return None;
                }
                let c = l.complement();
                let mut next: KnowledgeState = s.iter().filter(|e| **e != c).cloned().collect();
                next.insert(l.clone());
                s = next;
            }
            Condition::Cmp(c) => {
                if c.eval() == Truth::Satisfied {
                    return None;
                }
            }
        }
    }
    Some(s)
}

fn replay_from(chi: &Conjecture, i: usize, state: &KnowledgeState, domain: &Domain) -> bool {
    let Some(step) = chi.steps.get(i) else {
        return inject_all(state, &chi.trailing, domain).is_some();
    };
    let Some(state) = inject_all(state, &step.assumptions, domain) else {
        return false;
    };
    let Some(op) = domain.operator(&step.action.name) else {
        return false;
    };
    if op.params.len() != step.action.args.len() {
        return false;
    }
    let op = op.renamed(u32::MAX - 1);
    let fixed: Vec<(Var, Term)> = op.params.iter().cloned().zip(step.action.args.iter().cloned()).collect();
    let mut extra: BTreeSet<Var> = BTreeSet::new();
    for c in &op.pre {
        c.collect_vars(&mut extra);
    }
    let extra: Vec<Var> = extra.into_iter().filter(|v| !op.params.contains(v)).collect();
    let pool = terms_of(&state, &step.action.args);
    let assumed: Vec<_> = step
        .assumptions
        .iter()
        .filter_map(|h| h.content.as_constraint())
        .collect();

    let mut choice = alloc::vec![0usize; extra.len()];
    loop {
        if extra.is_empty() || !pool.is_empty() {
            let pairs = extra.iter().zip(&choice).map(|(v, &k)| (v.clone(), pool[k].clone()));
            let s = Substitution::try_from_pairs(fixed.iter().cloned().chain(pairs))
                .expect("schema variables are fresh and pairwise distinct");
            let holds = op.pre.iter().all(|c| match c.apply(&s) {
                Condition::Lit(l) => state.iter().any(|e| *e == l),
                Condition::Cmp(c) => c.eval() == Truth::Satisfied || assumed.contains(&&c),
            });
            if holds {
                let mut next = state.clone();
                for d in &op.del {
                    next.remove(&d.apply(&s));
                }
                for a in &op.add {
                    next.insert(a.apply(&s));
                }
                if replay_from(chi, i + 1, &next, domain) {
                    return true;
                }
            }
        }
        // Advance the odometer over all assignments.
        let mut k = 0;
        loop {
            if k == choice.len() || pool.is_empty() {
                return false;
            }
            choice[k] += 1;
            if choice[k] < pool.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Method, Operator};
    use crate::logic::{CmpOp, Constraint};
    use alloc::vec;

    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    fn loop_domain() -> Domain {
        let m = Method {
            name: "spin".into(),
            params: vec![],
            pre: vec![],
            act: vec![Task::new("spin", vec![])],
        };
        Domain::new("loop", vec![], vec![m], []).unwrap()
    }

    #[test]
    fn self_recursive_method_has_no_plan() {
        let d = loop_domain();
        let goals = vec![Task::new("spin", vec![])];
        let s = KnowledgeState::new();
        assert_eq!(plain_htn(&s, &d, &goals, 12), Ok(None));
        assert_eq!(
            plain_htn(&s, &d, &goals, 13),
            Err(OracleError::DepthBoundTooLarge(13))
        );
        assert_eq!(
            brute_force(&s, &d, &goals, 4, Some(7)),
            Err(OracleError::WeightBoundTooLarge(7))
        );
    }

    #[test]
    fn empty_goal_list() {
        let d = loop_domain();
        let r = brute_force(&KnowledgeState::new(), &d, &[], 3, Some(2)).unwrap();
        assert_eq!(r.min_weight, Some(0));
        assert_eq!(r.witnesses.len(), 1);
        assert!(r.witnesses.iter().next().unwrap().steps.is_empty());
    }

    fn fuel_domain() -> Domain {
        let op = Operator {
            name: "!go".into(),
            params: vec![Var::new("t")],
            pre: vec![
                Literal::new("fuel", vec![v("t"), v("q")]).into(),
                Constraint::new(CmpOp::Ge, v("q"), Term::int(10)).into(),
            ],
            del: vec![],
            add: vec![Literal::new("gone", vec![v("t")])],
        };
        Domain::new("fuel", vec![op], vec![], ["fuel".into(), ">=".into()]).unwrap()
    }

    #[test]
    fn refined_hypothesis_is_minimal() {
        let d = fuel_domain();
        let goals = vec![Task::new("!go", vec![c("t1")])];
        let r = brute_force(&KnowledgeState::new(), &d, &goals, 3, Some(3)).unwrap();
        assert_eq!(r.min_weight, Some(1));
        let w = r.witnesses.iter().next().unwrap();
        assert_eq!(
            w.steps[0].assumptions[0].literal(),
            Some(&Literal::new("fuel", vec![c("t1"), Term::int(10)]))
        );
    }

    #[test]
    fn exhaustive_replay_accepts_and_rejects() {
        let d = fuel_domain();
        let init: KnowledgeState = [Literal::new("fuel", vec![c("t1"), Term::int(12)])]
            .into_iter()
            .collect();
        let good = Conjecture {
            steps: vec![Step {
                assumptions: vec![],
                action: Task::new("!go", vec![c("t1")]),
            }],
            trailing: vec![],
            total_weight: 0,
        };
        assert!(replay_exhaustive(&good, &init, &d));
        let mut bad = good.clone();
        bad.steps[0].action = Task::new("!go", vec![c("t2")]);
        assert!(!replay_exhaustive(&bad, &init, &d));
        let mut heavy = good.clone();
        heavy.total_weight = 1;
        assert!(!replay_exhaustive(&heavy, &init, &d));
    }

    #[test]
    fn canonical_renaming() {
        let h = |n: &str, g: u32| Assumption {
            content: Literal::new("p", vec![Term::Var(Var::with_generation(n, g))]).into(),
            kind: AssumptionKind::Hypothesis,
        };
        let mk = |a: Assumption| Conjecture {
            steps: vec![Step {
                assumptions: vec![a],
                action: Task::new("!go", vec![c("t1")]),
            }],
            trailing: vec![],
            total_weight: 1,
        };
        assert_eq!(canonical(&mk(h("q", 3))), canonical(&mk(h("z", 1))));
    }
}
