//! Planning domains and problems.
//!
//! Primitive tasks are named with a leading `!` and are carried out by an
//! [`Operator`]; every other task is compound and is decomposed by one of
//! the [`Method`]s sharing its name. Constructors validate every structural
//! invariant, so a `Domain` or `Problem` value is always well formed.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::logic::{Apply, Condition, KnowledgeState, Literal, Name, Substitution, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TaskKind {
    Primitive,
    Compound,
}

/// A task invocation such as `(!move cab38 downtown park)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Task {
    pub name: Name,
    pub args: Vec<Term>,
}

impl Task {
    pub fn new(name: &str, args: Vec<Term>) -> Self {
        Task {
            name: name.into(),
            args,
        }
    }

    pub fn kind(&self) -> TaskKind {
        task_kind(&self.name)
    }

    pub fn is_primitive(&self) -> bool {
        self.kind() == TaskKind::Primitive
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        for a in &self.args {
            a.collect_vars(out);
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Var) -> Task {
        Task {
            name: self.name.clone(),
            args: self.args.iter().map(|a| a.map_vars(f)).collect(),
        }
    }
}

pub fn task_kind(name: &str) -> TaskKind {
    if name.starts_with('!') {
        TaskKind::Primitive
    } else {
        TaskKind::Compound
    }
}

impl Apply for Task {
    fn apply(&self, s: &Substitution) -> Task {
        Task {
            name: self.name.clone(),
            args: self.args.apply(s),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {}", a)?;
        }
        f.write_str(")")
    }
}

/// A primitive action schema `<name, Pre, Del, Add>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operator {
    pub name: Name,
    pub params: Vec<Var>,
    pub pre: Vec<Condition>,
    pub del: Vec<Literal>,
    pub add: Vec<Literal>,
}

/// A decomposition rule `<name, Pre, Act>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Method {
    pub name: Name,
    pub params: Vec<Var>,
    pub pre: Vec<Condition>,
    pub act: Vec<Task>,
}

fn rename(v: &Var, generation: u32) -> Var {
    Var::with_generation(v.name.clone(), generation)
}

impl Operator {
    /// A copy whose variables all live in `generation`.
    pub fn renamed(&self, generation: u32) -> Operator {
        let mut f = |v: &Var| rename(v, generation);
        Operator {
            name: self.name.clone(),
            params: self.params.iter().map(&f).collect(),
            pre: self.pre.iter().map(|c| c.map_vars(&mut f)).collect(),
            del: self.del.iter().map(|l| l.map_vars(&mut f)).collect(),
            add: self.add.iter().map(|l| l.map_vars(&mut f)).collect(),
        }
    }

    pub fn head(&self) -> Task {
        Task {
            name: self.name.clone(),
            args: self.params.iter().cloned().map(Term::Var).collect(),
        }
    }

    fn check(&self) -> Result<(), DomainError> {
        if task_kind(&self.name) != TaskKind::Primitive {
            return Err(DomainError::OperatorNameWithoutBang(self.name.clone()));
        }
        check_params(&self.name, &self.params)?;
        let bound = bound_vars(&self.params, &self.pre);
        for l in self.del.iter().chain(&self.add) {
            let mut vs = BTreeSet::new();
            l.collect_vars(&mut vs);
            if let Some(v) = vs.into_iter().find(|v| !bound.contains(v)) {
                return Err(DomainError::FreeEffectVariable {
                    action: self.name.clone(),
                    var: v,
                });
            }
        }
        Ok(())
    }
}

impl Method {
    pub fn renamed(&self, generation: u32) -> Method {
        let mut f = |v: &Var| rename(v, generation);
        Method {
            name: self.name.clone(),
            params: self.params.iter().map(&f).collect(),
            pre: self.pre.iter().map(|c| c.map_vars(&mut f)).collect(),
            act: self.act.iter().map(|t| t.map_vars(&mut f)).collect(),
        }
    }

    pub fn head(&self) -> Task {
        Task {
            name: self.name.clone(),
            args: self.params.iter().cloned().map(Term::Var).collect(),
        }
    }

    fn check(&self) -> Result<(), DomainError> {
        if task_kind(&self.name) != TaskKind::Compound {
            return Err(DomainError::MethodNameWithBang(self.name.clone()));
        }
        check_params(&self.name, &self.params)?;
        let bound = bound_vars(&self.params, &self.pre);
        for t in &self.act {
            let mut vs = BTreeSet::new();
            t.collect_vars(&mut vs);
            if let Some(v) = vs.into_iter().find(|v| !bound.contains(v)) {
                return Err(DomainError::FreeTaskVariable {
                    method: self.name.clone(),
                    var: v,
                });
            }
        }
        Ok(())
    }
}

fn check_params(action: &Name, params: &[Var]) -> Result<(), DomainError> {
    let mut seen = BTreeSet::new();
    for p in params {
        if p.generation != 0 {
            return Err(DomainError::RenamedSchemaVariable {
                action: action.clone(),
                var: p.clone(),
            });
        }
        if !seen.insert(p) {
            return Err(DomainError::DuplicateParameter {
                action: action.clone(),
                var: p.clone(),
            });
        }
    }
    Ok(())
}

fn bound_vars(params: &[Var], pre: &[Condition]) -> BTreeSet<Var> {
    let mut out: BTreeSet<Var> = params.iter().cloned().collect();
    for c in pre {
        c.collect_vars(&mut out);
    }
    out
}

/// Something an expansion can instantiate: it has preconditions.
pub trait Action {
    fn name(&self) -> &Name;
    fn preconditions(&self) -> &[Condition];
}

impl Action for Operator {
    fn name(&self) -> &Name {
        &self.name
    }
    fn preconditions(&self) -> &[Condition] {
        &self.pre
    }
}

impl Action for Method {
    fn name(&self) -> &Name {
        &self.name
    }
    fn preconditions(&self) -> &[Condition] {
        &self.pre
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainError {
    OperatorNameWithoutBang(Name),
    MethodNameWithBang(Name),
    DuplicateOperator(Name),
    MethodShadowsOperator(Name),
    DuplicateParameter { action: Name, var: Var },
    RenamedSchemaVariable { action: Name, var: Var },
    FreeEffectVariable { action: Name, var: Var },
    FreeTaskVariable { method: Name, var: Var },
    /// A predicate is used with two different arities.
    PredicateArity { predicate: Name, expected: usize, found: usize },
    /// Methods decomposing the same task disagree on its arity.
    MethodArity { method: Name, expected: usize, found: usize },
    UnknownTask(Name),
    TaskArity { task: Name, expected: usize, found: usize },
    InconsistentInit(Literal),
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DomainError::*;
        match self {
            OperatorNameWithoutBang(n) => write!(f, "operator name {} must start with '!'", n),
            MethodNameWithBang(n) => write!(f, "method name {} must not start with '!'", n),
            DuplicateOperator(n) => write!(f, "duplicate operator {}", n),
            MethodShadowsOperator(n) => write!(f, "method {} has the name of an operator", n),
            DuplicateParameter { action, var } => {
                write!(f, "duplicate parameter {} in {}", var, action)
            }
            RenamedSchemaVariable { action, var } => {
                write!(f, "schema variable {} in {} carries a generation suffix", var, action)
            }
            FreeEffectVariable { action, var } => {
                write!(f, "free effect variable {} in {}", var, action)
            }
            FreeTaskVariable { method, var } => {
                write!(f, "free task variable {} in method {}", var, method)
            }
            PredicateArity {
                predicate,
                expected,
                found,
            } => write!(
                f,
                "predicate {} used with arity {} but previously with arity {}",
                predicate, found, expected
            ),
            MethodArity {
                method,
                expected,
                found,
            } => write!(
                f,
                "method {} declared with {} parameters but another method of that name has {}",
                method, found, expected
            ),
            UnknownTask(n) => write!(f, "unknown task {}", n),
            TaskArity {
                task,
                expected,
                found,
            } => write!(f, "task {} expects {} arguments, got {}", task, expected, found),
            InconsistentInit(l) => write!(f, "initial state contains both {} and its negation", l),
        }
    }
}

/// A validated planning domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub name: Name,
    operators: Vec<Operator>,
    methods: Vec<Method>,
    hypothetical: BTreeSet<Name>,
    operator_index: BTreeMap<Name, usize>,
    method_index: BTreeMap<Name, Vec<usize>>,
}

impl Domain {
    pub fn new(
        name: &str,
        operators: Vec<Operator>,
        methods: Vec<Method>,
        hypothetical: impl IntoIterator<Item = Name>,
    ) -> Result<Domain, DomainError> {
        let mut operator_index = BTreeMap::new();
        for (i, op) in operators.iter().enumerate() {
            op.check()?;
            if operator_index.insert(op.name.clone(), i).is_some() {
                return Err(DomainError::DuplicateOperator(op.name.clone()));
            }
        }
        let mut method_index: BTreeMap<Name, Vec<usize>> = BTreeMap::new();
        for (i, m) in methods.iter().enumerate() {
            m.check()?;
            if operator_index.contains_key(&m.name) {
                return Err(DomainError::MethodShadowsOperator(m.name.clone()));
            }
            let slot = method_index.entry(m.name.clone()).or_default();
            if let Some(&first) = slot.first() {
                let expected = methods[first].params.len();
                if expected != m.params.len() {
                    return Err(DomainError::MethodArity {
                        method: m.name.clone(),
                        expected,
                        found: m.params.len(),
                    });
                }
            }
            slot.push(i);
        }
        let domain = Domain {
            name: name.into(),
            operators,
            methods,
            hypothetical: hypothetical.into_iter().collect(),
            operator_index,
            method_index,
        };
        domain.check_predicate_arities()?;
        for m in &domain.methods {
            for t in &m.act {
                domain.check_task(t)?;
            }
        }
        Ok(domain)
    }

    fn literals(&self) -> impl Iterator<Item = &Literal> {
        let ops = self.operators.iter().flat_map(|o| {
            o.pre
                .iter()
                .filter_map(Condition::as_literal)
                .chain(o.del.iter())
                .chain(o.add.iter())
        });
        let ms = self
            .methods
            .iter()
            .flat_map(|m| m.pre.iter().filter_map(Condition::as_literal));
        ops.chain(ms)
    }

    fn check_predicate_arities(&self) -> Result<(), DomainError> {
        let mut arity: BTreeMap<&Name, usize> = BTreeMap::new();
        for l in self.literals() {
            match arity.get(&l.predicate) {
                Some(&a) if a != l.arity() => {
                    return Err(DomainError::PredicateArity {
                        predicate: l.predicate.clone(),
                        expected: a,
                        found: l.arity(),
                    })
                }
                Some(_) => {}
                None => {
                    arity.insert(&l.predicate, l.arity());
                }
            }
        }
        Ok(())
    }

    /// Arity of a predicate as used somewhere in the domain.
    pub fn predicate_arity(&self, predicate: &str) -> Option<usize> {
        self.literals()
            .find(|l| &*l.predicate == predicate)
            .map(Literal::arity)
    }

    /// Checks that `t` names a known operator or method with matching arity.
    pub fn check_task(&self, t: &Task) -> Result<(), DomainError> {
        let expected = match t.kind() {
            TaskKind::Primitive => self.operator(&t.name).map(|o| o.params.len()),
            TaskKind::Compound => self.methods_for(&t.name).next().map(|m| m.params.len()),
        };
        match expected {
            None => Err(DomainError::UnknownTask(t.name.clone())),
            Some(n) if n != t.args.len() => Err(DomainError::TaskArity {
                task: t.name.clone(),
                expected: n,
                found: t.args.len(),
            }),
            Some(_) => Ok(()),
        }
    }

    pub fn operators(&self) -> &[Operator] {
        &self.operators
    }

    pub fn methods(&self) -> &[Method] {
        &self.methods
    }

    pub fn hypothetical(&self) -> &BTreeSet<Name> {
        &self.hypothetical
    }

    pub fn is_hypothetical(&self, symbol: &str) -> bool {
        self.hypothetical.contains(symbol)
    }

    pub fn operator(&self, name: &str) -> Option<&Operator> {
        self.operator_index.get(name).map(|&i| &self.operators[i])
    }

    /// Methods decomposing the task `name`, in declaration order.
    pub fn methods_for<'a>(&'a self, name: &str) -> impl Iterator<Item = &'a Method> + 'a {
        self.method_index
            .get(name)
            .into_iter()
            .flatten()
            .map(move |&i| &self.methods[i])
    }

    /// Non-fatal findings: hypothetical symbols the domain never mentions.
    pub fn lint(&self) -> Vec<String> {
        let mut mentioned: BTreeSet<&str> = self.literals().map(|l| &*l.predicate).collect();
        let cmp_ops = self
            .operators
            .iter()
            .flat_map(|o| o.pre.iter())
            .chain(self.methods.iter().flat_map(|m| m.pre.iter()))
            .filter_map(Condition::as_constraint)
            .map(|c| c.op.symbol());
        mentioned.extend(cmp_ops);
        self.hypothetical
            .iter()
            .filter(|h| !mentioned.contains(&***h))
            .map(|h| alloc::format!("hypothetical symbol {} is never used in the domain", h))
            .collect()
    }
}

/// A planning problem: an initial state and an ordered goal task list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub name: Name,
    pub domain_name: Name,
    pub init: KnowledgeState,
    pub goals: Vec<Task>,
}

impl Problem {
    /// Validates the goals against `domain` and folds the initial literals.
    pub fn new(
        name: &str,
        domain_name: &str,
        init: impl IntoIterator<Item = Literal>,
        goals: Vec<Task>,
        domain: &Domain,
    ) -> Result<Problem, DomainError> {
        let mut state = KnowledgeState::new();
        for l in init {
            let l = l.folded();
            if state.contradicts(&l) {
                return Err(DomainError::InconsistentInit(l));
            }
            state.insert(l);
        }
        for g in &goals {
            domain.check_task(g)?;
        }
        Ok(Problem {
            name: name.into(),
            domain_name: domain_name.into(),
            init: state,
            goals,
        })
    }
}
