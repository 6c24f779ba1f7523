//! Planning facade and the replay validator.
//!
//! [`validate`] does not reuse the search code. It replays a conjecture
//! step by step, injecting each step's assumptions right before the step
//! and checking that every precondition of the step's operator is then
//! entailed, so it can catch bugs in the search.

use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use crate::assume::{match_fact, refine_with_constraints, Assumption, AssumptionKind};
use crate::domain::{Domain, Operator, Problem, Task};
use crate::logic::{
    unify_term_lists, Apply, Condition, Constraint, KnowledgeState, Literal, Name,
    Substitution, Truth,
};
use crate::search::{find_conjecture, Conjecture, SearchConfig, SearchError, SearchStats, SearchStatus};

/// Variables of operators instantiated during replay live in this
/// generation, which the search never reaches.
pub const REPLAY_GENERATION: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanStatus {
    Solved,
    NoSolutionWithinBounds,
    BudgetExhausted,
}

impl PlanStatus {
    pub fn label(self) -> &'static str {
        match self {
            PlanStatus::Solved => "solved",
            PlanStatus::NoSolutionWithinBounds => "no-solution-within-bounds",
            PlanStatus::BudgetExhausted => "budget-exhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanReport {
    /// Present iff `status` is [`PlanStatus::Solved`].
    pub conjecture: Option<Conjecture>,
    pub status: PlanStatus,
    pub stats: SearchStats,
    /// Wall-clock time; the core has no clock, so callers fill it in.
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanError {
    DomainMismatch { problem: Name, domain: Name },
    Search(SearchError),
    /// The search returned a conjecture that does not replay. This is a bug.
    InvalidResult(Failure),
    Validation(ValidationError),
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::DomainMismatch { problem, domain } => write!(
                f,
                "problem is defined for domain {} but the domain is {}",
                problem, domain
            ),
            PlanError::Search(e) => e.fmt(f),
            PlanError::InvalidResult(fail) => {
                write!(f, "internal error: planner produced an invalid conjecture ({})", fail)
            }
            PlanError::Validation(e) => e.fmt(f),
        }
    }
}

impl From<SearchError> for PlanError {
    fn from(e: SearchError) -> Self {
        PlanError::Search(e)
    }
}

/// Finds the conjecture with the fewest assumptions for `problem` and
/// checks it by replay before returning it.
pub fn plan(domain: &Domain, problem: &Problem, config: &SearchConfig) -> Result<PlanReport, PlanError> {
    if problem.domain_name != domain.name {
        return Err(PlanError::DomainMismatch {
            problem: problem.domain_name.clone(),
            domain: domain.name.clone(),
        });
    }
    let outcome = find_conjecture(&problem.init, domain, &problem.goals, config)?;
    if let Some(chi) = &outcome.conjecture {
        let report = validate(chi, &problem.init, domain).map_err(PlanError::Validation)?;
        if let Some(fail) = report.first_failure {
            return Err(PlanError::InvalidResult(fail));
        }
    }
    let status = match outcome.status {
        SearchStatus::Solved => PlanStatus::Solved,
        SearchStatus::NoSolutionWithinBounds => PlanStatus::NoSolutionWithinBounds,
        SearchStatus::BudgetExhausted => PlanStatus::BudgetExhausted,
    };
    Ok(PlanReport {
        conjecture: outcome.conjecture,
        status,
        stats: outcome.stats,
        elapsed: Duration::ZERO,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationError {
    /// A step names no operator of the domain.
    UnknownAction(Name),
    ActionArity { action: Name, expected: usize, found: usize },
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::UnknownAction(n) => write!(f, "unknown action {}", n),
            ValidationError::ActionArity { action, expected, found } => write!(
                f,
                "action {} takes {} arguments, found {}",
                action, expected, found
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureReason {
    /// No way to satisfy this precondition (shown as instantiated as far
    /// as the replay got).
    MissingPrecondition(Condition),
    /// The assumption already holds when it is injected.
    RedundantAssumption(Condition),
    /// The assumption's symbol is not declared hypothetical.
    IllegalAssumption(Condition),
    WeightMismatch { declared: u32, actual: u32 },
}

/// Where a replay went wrong. `step` is 1-based; `steps + 1` designates the
/// end of the conjecture (trailing assumptions and the weight).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub step: usize,
    pub reason: FailureReason,
}

impl Failure {
    /// The precondition the failing step could not satisfy, if that is why
    /// it failed.
    pub fn missing_precondition(&self) -> Option<&Condition> {
        match &self.reason {
            FailureReason::MissingPrecondition(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: ", self.step)?;
        match &self.reason {
            FailureReason::MissingPrecondition(c) => write!(f, "missing precondition {}", c),
            FailureReason::RedundantAssumption(c) => write!(f, "assumption {} already holds", c),
            FailureReason::IllegalAssumption(c) => write!(f, "assumption {} is not hypothetical", c),
            FailureReason::WeightMismatch { declared, actual } => write!(
                f,
                "declared weight {} but the conjecture has {} assumptions",
                declared, actual
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    /// `trajectory[i]` is the state step `i + 1` is checked against, i.e.
    /// the state after step `i` with the next step's assumptions injected;
    /// the last entry is the final state with trailing assumptions added.
    pub trajectory: Vec<KnowledgeState>,
    pub first_failure: Option<Failure>,
    /// Kinds of each step's assumptions, recomputed during the replay.
    pub kinds: Vec<Vec<AssumptionKind>>,
    pub trailing_kinds: Vec<AssumptionKind>,
}

impl ValidationReport {
    pub fn final_state(&self) -> Option<&KnowledgeState> {
        self.trajectory.last()
    }
}

struct Replay<'a> {
    domain: &'a Domain,
    chi: &'a Conjecture,
    ops: Vec<Operator>,
    trajectory: Vec<KnowledgeState>,
    kinds: Vec<Vec<AssumptionKind>>,
    best: Option<Deepest>,
    done: Option<Completed>,
}

/// The failure that got furthest, as (step, progress within the step).
struct Deepest {
    at: (usize, usize),
    failure: Failure,
    trajectory: Vec<KnowledgeState>,
    kinds: Vec<Vec<AssumptionKind>>,
}

struct Completed {
    trajectory: Vec<KnowledgeState>,
    kinds: Vec<Vec<AssumptionKind>>,
    trailing_kinds: Vec<AssumptionKind>,
}

/// Injects `hs` into `state` one by one, failing on assumptions that are
/// illegal or already hold.
fn inject(
    state: &KnowledgeState,
    hs: &[Assumption],
    domain: &Domain,
    step: usize,
) -> Result<(KnowledgeState, Vec<AssumptionKind>), Failure> {
    let mut s = state.clone();
    let mut kinds = Vec::with_capacity(hs.len());
    for h in hs {
        let fail = |reason| Failure { step, reason };
        if !domain.is_hypothetical(h.symbol()) {
            return Err(fail(FailureReason::IllegalAssumption(h.content.clone())));
        }
        match &h.content {
            Condition::Lit(l) => {
                if s.contains(l) {
                    return Err(fail(FailureReason::RedundantAssumption(h.content.clone())));
                }
                kinds.push(if s.contradicts(l) {
                    AssumptionKind::FactNegation
                } else {
                    AssumptionKind::Hypothesis
                });
                s = s.consistent_union([l]);
            }
            Condition::Cmp(c) => {
                if c.eval() == Truth::Satisfied {
                    return Err(fail(FailureReason::RedundantAssumption(h.content.clone())));
                }
                kinds.push(AssumptionKind::ConstraintViolation);
            }
        }
    }
    Ok((s, kinds))
}

impl<'a> Replay<'a> {
    fn record_failure(&mut self, step: usize, progress: usize, reason: FailureReason) {
        if self.best.as_ref().is_none_or(|b| (step, progress) > b.at) {
            self.best = Some(Deepest {
                at: (step, progress),
                failure: Failure { step, reason },
                trajectory: self.trajectory.clone(),
                kinds: self.kinds.clone(),
            });
        }
    }

    /// Replays steps `i..` from `state`; returns true once a complete
    /// replay succeeded.
    fn run(&mut self, i: usize, state: KnowledgeState) -> bool {
        let n = self.chi.steps.len();
        if i == n {
            return match inject(&state, &self.chi.trailing, self.domain, n + 1) {
                Ok((s, tk)) => {
                    let mut traj = self.trajectory.clone();
                    traj.push(s);
                    self.done = Some(Completed {
                        trajectory: traj,
                        kinds: self.kinds.clone(),
                        trailing_kinds: tk,
                    });
                    true
                }
                Err(fail) => {
                    self.trajectory.push(state);
                    self.record_failure(n + 1, 0, fail.reason);
                    self.trajectory.pop();
                    false
                }
            };
        }
        let step = &self.chi.steps[i];
        let (injected, kinds) = match inject(&state, &step.assumptions, self.domain, i + 1) {
            Ok(x) => x,
            Err(fail) => {
                self.trajectory.push(state);
                self.record_failure(i + 1, 0, fail.reason);
                self.trajectory.pop();
                return false;
            }
        };
        let op = self.ops[i].clone();
        let theta0 = unify_term_lists(&op.head().args, &step.action.args, &Substitution::new())
            .expect("fresh parameters unify with any arguments of the right arity");
        let lits: Vec<&Literal> = op.pre.iter().filter_map(Condition::as_literal).collect();
        let cmps: Vec<&Constraint> = op.pre.iter().filter_map(Condition::as_constraint).collect();
        let assumed: Vec<&Constraint> = step
            .assumptions
            .iter()
            .filter_map(|h| h.content.as_constraint())
            .collect();

        self.trajectory.push(injected.clone());
        self.kinds.push(kinds);
        let mut matches = Vec::new();
        let mut deepest: Option<(usize, FailureReason)> = None;
        collect_matches(&lits, &cmps, &assumed, &op.pre, &injected, theta0, 0, &mut matches, &mut deepest);
        for theta in matches {
            let mut next = injected.clone();
            for d in &op.del {
                next.remove(&d.apply(&theta));
            }
            for a in &op.add {
                next.insert(a.apply(&theta));
            }
            if self.run(i + 1, next) {
                return true;
            }
        }
        if let Some((progress, reason)) = deepest {
            self.record_failure(i + 1, progress, reason);
        }
        self.trajectory.pop();
        self.kinds.pop();
        false
    }
}

/// Every substitution under which the literal preconditions match facts
/// of `state` and every constraint is satisfied or assumed.
#[allow(clippy::too_many_arguments)]
fn collect_matches(
    lits: &[&Literal],
    cmps: &[&Constraint],
    assumed: &[&Constraint],
    pre: &[Condition],
    state: &KnowledgeState,
    theta: Substitution,
    idx: usize,
    out: &mut Vec<Substitution>,
    deepest: &mut Option<(usize, FailureReason)>,
) {
    fn note(deepest: &mut Option<(usize, FailureReason)>, progress: usize, reason: FailureReason) {
        if deepest.as_ref().is_none_or(|(p, _)| progress > *p) {
            *deepest = Some((progress, reason));
        }
    }
    if let Some(p) = lits.get(idx) {
        let mut any = false;
        for e in state {
            if let Some(t) = match_fact(p, e, &theta) {
                any = true;
                collect_matches(lits, cmps, assumed, pre, state, t, idx + 1, out, deepest);
            }
        }
        if !any {
            // Show the missing literal as specific as the step's
            // constraints make it.
            let shown = refine_with_constraints(pre, &theta, state, |v| v.generation == REPLAY_GENERATION)
                .unwrap_or_else(|| theta.clone());
            note(deepest, idx, FailureReason::MissingPrecondition(Condition::Lit(p.apply(&shown))));
        }
        return;
    }
    for (k, c) in cmps.iter().enumerate() {
        let c = c.apply(&theta);
        if c.eval() != Truth::Satisfied && !assumed.contains(&&c) {
            note(deepest, lits.len() + k, FailureReason::MissingPrecondition(Condition::Cmp(c)));
            return;
        }
    }
    out.push(theta);
}

/// Replays `chi` from `init`.
///
/// Each step's assumptions are injected right before the step: literals by
/// consistent union (withdrawing a contradicted fact), constraints by being
/// recorded as covered. The step is then valid iff some instantiation of
/// its operator's remaining variables makes every literal precondition a
/// fact of the state and every constraint satisfied or assumed. Choices
/// between several instantiations are backtracked over.
pub fn validate(
    chi: &Conjecture,
    init: &KnowledgeState,
    domain: &Domain,
) -> Result<ValidationReport, ValidationError> {
    let mut ops = Vec::with_capacity(chi.steps.len());
    for step in &chi.steps {
        ops.push(resolve(&step.action, domain)?.renamed(REPLAY_GENERATION));
    }
    let mut replay = Replay {
        domain,
        chi,
        ops,
        trajectory: Vec::new(),
        kinds: Vec::new(),
        best: None,
        done: None,
    };
    replay.run(0, init.clone());
    if let Some(Completed { trajectory, kinds, trailing_kinds }) = replay.done {
        let actual = chi.assumption_count() as u32;
        let first_failure = (actual != chi.total_weight).then(|| Failure {
            step: chi.steps.len() + 1,
            reason: FailureReason::WeightMismatch {
                declared: chi.total_weight,
                actual,
            },
        });
        return Ok(ValidationReport {
            valid: first_failure.is_none(),
            trajectory,
            first_failure,
            kinds,
            trailing_kinds,
        });
    }
    let Deepest { failure, trajectory, kinds, .. } = replay.best.expect("a failed replay records a failure");
    Ok(ValidationReport {
        valid: false,
        trajectory,
        first_failure: Some(failure),
        kinds,
        trailing_kinds: Vec::new(),
    })
}

fn resolve<'d>(action: &Task, domain: &'d Domain) -> Result<&'d Operator, ValidationError> {
    let op = domain
        .operator(&action.name)
        .ok_or_else(|| ValidationError::UnknownAction(action.name.clone()))?;
    if op.params.len() != action.args.len() {
        return Err(ValidationError::ActionArity {
            action: action.name.clone(),
            expected: op.params.len(),
            found: action.args.len(),
        });
    }
    Ok(op)
}

/// Copies the kinds recomputed by a replay into `chi`, e.g. after reading
/// a conjecture from a format that does not store them.
pub fn assign_kinds(chi: &mut Conjecture, report: &ValidationReport) {
    for (step, kinds) in chi.steps.iter_mut().zip(&report.kinds) {
        for (h, k) in step.assumptions.iter_mut().zip(kinds) {
            h.kind = *k;
        }
    }
    for (h, k) in chi.trailing.iter_mut().zip(&report.trailing_kinds) {
        h.kind = *k;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{c, downtown, goal, lit, taxi};
    use crate::search::Step;
    use alloc::vec;

    fn hyp(l: Literal) -> Assumption {
        Assumption {
            content: Condition::Lit(l),
            kind: AssumptionKind::Hypothesis,
        }
    }

    fn step(name: &str, args: &[&str], assume: Vec<Assumption>) -> Step {
        Step {
            assumptions: assume,
            action: Task::new(name, args.iter().map(|a| c(a)).collect()),
        }
    }

    fn fuelled_trip(fuel: Vec<Assumption>) -> Conjecture {
        let total_weight = fuel.len() as u32;
        Conjecture {
            steps: vec![
                step("!load", &["fred", "cab38", "downtown"], vec![]),
                step("!move", &["cab38", "downtown", "park"], fuel),
                step("!unload", &["fred", "cab38", "park"], vec![]),
            ],
            trailing: vec![],
            total_weight,
        }
    }

    #[test]
    fn conjecture_replays_with_its_assumption() {
        let chi = fuelled_trip(vec![hyp(lit("hasfuel", &["cab38", "10"]))]);
        let r = validate(&chi, &downtown(), &taxi()).unwrap();
        assert!(r.valid, "{:?}", r.first_failure);
        assert_eq!(r.trajectory.len(), 4);
        assert!(r.trajectory[1].contains(&lit("in", &["fred", "cab38"])));
        assert!(r.trajectory[1].contains(&lit("hasfuel", &["cab38", "10"])));
        assert!(r.trajectory[3].contains(&lit("at", &["fred", "park"])));
        assert_eq!(r.kinds[1], vec![AssumptionKind::Hypothesis]);
    }

    #[test]
    fn empty_conjecture_keeps_the_state() {
        let r = validate(&Conjecture::default(), &downtown(), &taxi()).unwrap();
        assert!(r.valid);
        assert_eq!(r.trajectory, vec![downtown()]);
    }

    #[test]
    fn dropped_assumption_is_reported() {
        let r = validate(&fuelled_trip(vec![]), &downtown(), &taxi()).unwrap();
        assert!(!r.valid);
        let f = r.first_failure.unwrap();
        assert_eq!(f.step, 2);
        assert_eq!(f.missing_precondition(), Some(&Condition::Lit(lit("hasfuel", &["cab38", "10"]))));
        // The trajectory stops at the state the failing step saw.
        assert_eq!(r.trajectory.len(), 2);
    }

    #[test]
    fn assumption_that_already_holds_is_rejected() {
        let fuel = hyp(lit("hasfuel", &["cab38", "10"]));
        let chi = fuelled_trip(vec![fuel.clone(), fuel]);
        let d = taxi();
        let f = validate(&chi, &downtown(), &d).unwrap().first_failure.unwrap();
        assert_eq!(f.step, 2);
        assert!(matches!(f.reason, FailureReason::RedundantAssumption(_)));

        let mut chi = fuelled_trip(vec![hyp(lit("hasfuel", &["cab38", "10"]))]);
        chi.steps[0].assumptions.push(hyp(lit("at", &["fred", "park"])));
        chi.total_weight += 1;
        let f = validate(&chi, &downtown(), &d).unwrap().first_failure.unwrap();
        assert!(matches!(f.reason, FailureReason::IllegalAssumption(_)));
    }

    #[test]
    fn weight_is_checked_last() {
        let mut chi = fuelled_trip(vec![hyp(lit("hasfuel", &["cab38", "10"]))]);
        chi.total_weight = 0;
        let r = validate(&chi, &downtown(), &taxi()).unwrap();
        assert!(!r.valid);
        assert_eq!(r.trajectory.len(), 4);
        assert_eq!(
            r.first_failure.unwrap(),
            Failure {
                step: 4,
                reason: FailureReason::WeightMismatch { declared: 0, actual: 1 }
            }
        );
    }

    #[test]
    fn unknown_action_is_an_error() {
        let chi = Conjecture {
            steps: vec![step("!fly", &["fred"], vec![])],
            trailing: vec![],
            total_weight: 0,
        };
        assert_eq!(
            validate(&chi, &downtown(), &taxi()),
            Err(ValidationError::UnknownAction("!fly".into()))
        );
    }

    #[test]
    fn plan_checks_the_domain_name() {
        let d = taxi();
        let p = Problem::new("trip", "other", downtown().iter().cloned(), goal(), &d).unwrap();
        assert!(matches!(
            plan(&d, &p, &SearchConfig::default()),
            Err(PlanError::DomainMismatch { .. })
        ));
        let p = Problem::new("trip", "taxi", downtown().iter().cloned(), goal(), &d).unwrap();
        let r = plan(&d, &p, &SearchConfig::default()).unwrap();
        assert_eq!(r.status, PlanStatus::Solved);
        assert_eq!(r.conjecture.unwrap(), fuelled_trip(vec![hyp(lit("hasfuel", &["cab38", "10"]))]));
    }
}
