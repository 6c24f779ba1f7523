//! Serialized forms of conjectures and reports, as s-expressions and as
//! JSON lines.
//!
//! A conjecture in s-expression form reads
//!
//! ```text
//! (:conjecture :weight 1
//!   (:step (:assume ()) (:action (!load fred cab38 downtown)))
//!   (:step (:assume ((hasfuel cab38 10))) (:action (!move cab38 downtown park)))
//!   (:step (:assume ()) (:action (!unload fred cab38 park))))
//! ```
//!
//! optionally followed by `(:trailing (<cond> ...))` for assumptions made
//! by decompositions after the last action. Assumption kinds are not
//! written; [`read_conjecture`] recomputes them by replaying the
//! conjecture.

use std::fmt::Write;

use abp_core::oracle::OracleResult;
use abp_core::planner::{assign_kinds, FailureReason};
use abp_core::search::SearchStats;
use abp_core::{
    validate, Assumption, AssumptionKind, Condition, Conjecture, Domain, KnowledgeState, PlanReport,
    Step, ValidationReport,
};
use serde::{Deserialize, Serialize};

use crate::parse::{malformed, parse_condition, parse_task, ParseError};
use crate::sexp::{parse_all, parse_one, Sexp};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Sexp,
    Json,
}

fn conds(hs: &[Assumption]) -> String {
    let parts: Vec<String> = hs.iter().map(|h| h.content.to_string()).collect();
    format!("({})", parts.join(" "))
}

pub fn conjecture_to_sexp(chi: &Conjecture) -> String {
    let mut out = format!("(:conjecture :weight {}", chi.total_weight);
    for s in &chi.steps {
        write!(out, "\n  (:step (:assume {}) (:action {}))", conds(&s.assumptions), s.action).unwrap();
    }
    if !chi.trailing.is_empty() {
        write!(out, "\n  (:trailing {})", conds(&chi.trailing)).unwrap();
    }
    out.push(')');
    out
}

fn provisional(content: Condition) -> Assumption {
    let kind = match content {
        Condition::Lit(_) => AssumptionKind::Hypothesis,
        Condition::Cmp(_) => AssumptionKind::ConstraintViolation,
    };
    Assumption { content, kind }
}

fn assumption_list(x: &Sexp, key: &str) -> Result<Vec<Assumption>, ParseError> {
    let items = match x.as_list() {
        Some([k, body]) if k.is_atom(key) => body,
        _ => return malformed(x, format!("expected ({} (<condition> ...))", key)),
    };
    let Some(conds) = items.as_list() else {
        return malformed(items, "expected a list of conditions");
    };
    conds.iter().map(|c| parse_condition(c).map(provisional)).collect()
}

fn step_from_sexp(x: &Sexp) -> Result<Step, ParseError> {
    let Some([k, assume, action]) = x.as_list() else {
        return malformed(x, "expected (:step (:assume (...)) (:action (...)))");
    };
    if !k.is_atom(":step") {
        return malformed(k, "expected :step");
    }
    let assumptions = assumption_list(assume, ":assume")?;
    let action = match action.as_list() {
        Some([k, t]) if k.is_atom(":action") => parse_task(t)?,
        _ => return malformed(action, "expected (:action (<name> <term> ...))"),
    };
    Ok(Step { assumptions, action })
}

/// Reads a `(:conjecture ...)` form. Literal assumptions come back as
/// hypotheses; use [`read_conjecture`] to get their actual kinds.
pub fn conjecture_from_sexp(x: &Sexp) -> Result<Conjecture, ParseError> {
    let items = match x.as_list() {
        Some(items) if items.first().is_some_and(|h| h.is_atom(":conjecture")) => items,
        _ => return malformed(x, "expected (:conjecture :weight <n> ...)"),
    };
    let total_weight = match items.get(1..3) {
        Some([k, w]) if k.is_atom(":weight") => match w.as_atom().and_then(|w| w.parse().ok()) {
            Some(w) => w,
            None => return malformed(w, "expected a non-negative weight"),
        },
        _ => return malformed(x, "expected :weight after :conjecture"),
    };
    let mut chi = Conjecture {
        steps: Vec::new(),
        trailing: Vec::new(),
        total_weight,
    };
    let rest = &items[3..];
    for (i, s) in rest.iter().enumerate() {
        let is_trailing = s.as_list().and_then(|l| l.first()).is_some_and(|h| h.is_atom(":trailing"));
        if is_trailing {
            if i + 1 != rest.len() {
                return malformed(s, ":trailing must come last");
            }
            chi.trailing = assumption_list(s, ":trailing")?;
        } else {
            chi.steps.push(step_from_sexp(s)?);
        }
    }
    Ok(chi)
}

/// Finds the conjecture among the top-level forms of `text` (a plan output
/// file holds a report form before it).
pub fn parse_conjecture(text: &str) -> Result<Conjecture, ParseError> {
    if text.trim_start().starts_with('{') {
        // Either a plan report or a bare conjecture object.
        let first = text.trim_start().lines().next().unwrap_or("");
        if let Ok(c) = serde_json::from_str::<ConjectureJson>(first) {
            return c.to_conjecture();
        }
        return match serde_json::from_str::<PlanReportJson>(first) {
            Ok(PlanReportJson { conjecture: Some(c), .. }) => c.to_conjecture(),
            Ok(_) => Err(ParseError::Malformed {
                pos: crate::sexp::Pos { line: 1, col: 1 },
                msg: "the report holds no conjecture".into(),
            }),
            Err(e) => Err(ParseError::Malformed {
                pos: crate::sexp::Pos { line: e.line(), col: e.column() },
                msg: format!("bad JSON report: {}", e),
            }),
        };
    }
    for form in parse_all(text)? {
        let head = form.as_list().and_then(|l| l.first()).and_then(Sexp::as_atom);
        if head == Some(":conjecture") {
            return conjecture_from_sexp(&form);
        }
    }
    Err(ParseError::Malformed {
        pos: crate::sexp::Pos { line: 1, col: 1 },
        msg: "no (:conjecture ...) form found".into(),
    })
}

/// Reads a conjecture and recomputes its assumption kinds against `init`.
pub fn read_conjecture(text: &str, init: &KnowledgeState, domain: &Domain) -> Result<Conjecture, ParseError> {
    let mut chi = parse_conjecture(text)?;
    if let Ok(report) = validate(&chi, init, domain) {
        assign_kinds(&mut chi, &report);
    }
    Ok(chi)
}

fn stats_sexp(s: &SearchStats) -> String {
    format!(
        ":expansions {} :max-frontier {} :tree-size {} :pruned-illegal {} :pruned-by-bound {} :pruned-by-depth {}",
        s.expansions, s.max_frontier, s.tree_size, s.pruned_illegal, s.pruned_by_bound, s.pruned_by_depth
    )
}

/// The report form, then the conjecture when there is one. Elapsed time
/// is left out so the output only depends on the inputs.
pub fn plan_report_to_sexp(r: &PlanReport) -> String {
    let mut out = format!("(:plan :status {} {})\n", r.status.label(), stats_sexp(&r.stats));
    if let Some(chi) = &r.conjecture {
        out.push_str(&conjecture_to_sexp(chi));
        out.push('\n');
    }
    out
}

fn state_sexp(s: &KnowledgeState) -> String {
    let parts: Vec<String> = s.iter().map(|l| l.to_string()).collect();
    format!("({})", parts.join(" "))
}

fn failure_parts(reason: &FailureReason) -> (&'static str, String) {
    match reason {
        FailureReason::MissingPrecondition(c) => ("missing-precondition", c.to_string()),
        FailureReason::RedundantAssumption(c) => ("redundant-assumption", c.to_string()),
        FailureReason::IllegalAssumption(c) => ("illegal-assumption", c.to_string()),
        FailureReason::WeightMismatch { declared, actual } => {
            ("weight-mismatch", format!("(:declared {} :actual {})", declared, actual))
        }
    }
}

pub fn validation_to_sexp(r: &ValidationReport) -> String {
    let mut out = format!("(:validation :valid {}", r.valid);
    if let Some(f) = &r.first_failure {
        let (reason, what) = failure_parts(&f.reason);
        write!(out, "\n  :failure (:step {} :reason {} :condition {})", f.step, reason, what).unwrap();
    }
    out.push_str("\n  :trajectory (");
    for (i, s) in r.trajectory.iter().enumerate() {
        if i > 0 {
            out.push_str("\n    ");
        }
        out.push_str(&state_sexp(s));
    }
    out.push_str("))\n");
    out
}

pub fn oracle_to_sexp(r: &OracleResult) -> String {
    let w = r.min_weight.map_or("none".to_string(), |w| w.to_string());
    let mut out = format!(
        "(:oracle :min-weight {} :witnesses {} :explored {})\n",
        w,
        r.witnesses.len(),
        r.explored
    );
    for chi in &r.witnesses {
        out.push_str(&conjecture_to_sexp(chi));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionJson {
    pub content: String,
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub assume: Vec<AssumptionJson>,
    pub action: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureJson {
    pub weight: u32,
    pub steps: Vec<StepJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trailing: Vec<AssumptionJson>,
}

fn assumption_json(h: &Assumption) -> AssumptionJson {
    AssumptionJson {
        content: h.content.to_string(),
        kind: h.kind.label().to_string(),
    }
}

fn assumption_from_json(a: &AssumptionJson) -> Result<Assumption, ParseError> {
    let x = parse_one(&a.content)?;
    let content = parse_condition(&x)?;
    let Some(kind) = AssumptionKind::from_label(&a.kind) else {
        return malformed(&x, format!("unknown assumption kind {}", a.kind));
    };
    Ok(Assumption { content, kind })
}

impl ConjectureJson {
    pub fn from_conjecture(chi: &Conjecture) -> Self {
        ConjectureJson {
            weight: chi.total_weight,
            steps: chi
                .steps
                .iter()
                .map(|s| StepJson {
                    assume: s.assumptions.iter().map(assumption_json).collect(),
                    action: s.action.to_string(),
                })
                .collect(),
            trailing: chi.trailing.iter().map(assumption_json).collect(),
        }
    }

    pub fn to_conjecture(&self) -> Result<Conjecture, ParseError> {
        let mut steps = Vec::new();
        for s in &self.steps {
            steps.push(Step {
                assumptions: s.assume.iter().map(assumption_from_json).collect::<Result<_, _>>()?,
                action: parse_task(&parse_one(&s.action)?)?,
            });
        }
        Ok(Conjecture {
            steps,
            trailing: self.trailing.iter().map(assumption_from_json).collect::<Result<_, _>>()?,
            total_weight: self.weight,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsJson {
    pub expansions: u64,
    pub max_frontier: u64,
    pub tree_size: u64,
    pub pruned_illegal: u64,
    pub pruned_by_bound: u64,
    pub pruned_by_depth: u64,
}

impl From<&SearchStats> for StatsJson {
    fn from(s: &SearchStats) -> Self {
        StatsJson {
            expansions: s.expansions,
            max_frontier: s.max_frontier,
            tree_size: s.tree_size,
            pruned_illegal: s.pruned_illegal,
            pruned_by_bound: s.pruned_by_bound,
            pruned_by_depth: s.pruned_by_depth,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanReportJson {
    pub status: String,
    pub conjecture: Option<ConjectureJson>,
    pub stats: StatsJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub fn plan_report_to_json(r: &PlanReport, seed: Option<u64>) -> String {
    let dto = PlanReportJson {
        status: r.status.label().to_string(),
        conjecture: r.conjecture.as_ref().map(ConjectureJson::from_conjecture),
        stats: StatsJson::from(&r.stats),
        seed,
    };
    serde_json::to_string(&dto).expect("report serializes") + "\n"
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureJson {
    pub step: usize,
    pub reason: String,
    pub condition: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationJson {
    pub valid: bool,
    pub failure: Option<FailureJson>,
    pub trajectory: Vec<Vec<String>>,
    pub kinds: Vec<Vec<String>>,
}

pub fn validation_to_json(r: &ValidationReport) -> String {
    let dto = ValidationJson {
        valid: r.valid,
        failure: r.first_failure.as_ref().map(|f| {
            let (reason, condition) = failure_parts(&f.reason);
            FailureJson {
                step: f.step,
                reason: reason.to_string(),
                condition,
            }
        }),
        trajectory: r
            .trajectory
            .iter()
            .map(|s| s.iter().map(|l| l.to_string()).collect())
            .collect(),
        kinds: r
            .kinds
            .iter()
            .map(|ks| ks.iter().map(|k| k.label().to_string()).collect())
            .collect(),
    };
    serde_json::to_string(&dto).expect("report serializes") + "\n"
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleJson {
    pub min_weight: Option<u32>,
    pub witnesses: Vec<ConjectureJson>,
    pub explored: u64,
}

pub fn oracle_to_json(r: &OracleResult) -> String {
    let dto = OracleJson {
        min_weight: r.min_weight,
        witnesses: r.witnesses.iter().map(ConjectureJson::from_conjecture).collect(),
        explored: r.explored,
    };
    serde_json::to_string(&dto).expect("report serializes") + "\n"
}
