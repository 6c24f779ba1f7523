//! First-order terms, literals, numeric constraints, substitutions,
//! unification and knowledge states.
//!
//! Every value here is immutable once built and `Send + Sync`.

mod state;
mod subst;
mod term;
mod unify;

pub use state::KnowledgeState;
pub use subst::{Apply, Substitution, SubstitutionError};
pub use term::{
    ArithOp, CmpOp, Condition, Constraint, Literal, Name, Number, Term, Truth, Var,
};
pub use unify::{unify, unify_literals, unify_term_lists, unify_terms};

/// Evaluates a constraint; see [`Constraint::eval`].
pub fn eval_constraint(c: &Constraint) -> Truth {
    c.eval()
}
