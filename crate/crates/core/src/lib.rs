//! Assumption-based HTN planning.
//!
//! A classical HTN planner fails as soon as an operator or method
//! precondition does not hold. This crate instead computes the missing
//! facts as explicit *assumptions* and searches, branch-and-bound style,
//! for the plan (a *conjecture*) that needs the fewest of them.
//!
//! The crate is `no_std` and only needs `alloc`. Parsing, file formats and
//! the command line live in the `abp` companion crate.
//!
//! Module map:
//!
//! * [`logic`]: terms, literals, constraints, substitutions, unification
//!   and knowledge states.
//! * [`domain`]: operators, methods, tasks, domains and problems.
//! * [`assume`]: substitution search and assumption generation.
//! * [`search`]: the conjecture tree and conjecture extraction.
//! * [`planner`]: the planning facade and the independent replay validator.
//! * [`oracle`]: brute-force reference procedures used to test the search.
#![no_std]

extern crate alloc;

pub mod assume;
pub mod domain;
#[cfg(test)]
mod fixtures;
pub mod logic;
pub mod oracle;
pub mod planner;
pub mod search;

pub use assume::{Assumption, AssumptionKind};
pub use domain::{Domain, DomainError, Method, Operator, Problem, Task};
pub use logic::{
    CmpOp, Condition, Constraint, KnowledgeState, Literal, Name, Number, Substitution, Term, Var,
};
pub use planner::{plan, validate, PlanError, PlanReport, PlanStatus, ValidationReport};
pub use search::{Conjecture, ConjectureTree, SearchConfig, Step};
