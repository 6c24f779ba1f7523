use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::frontier::Frontier;
use super::{Conjecture, SearchConfig, SearchError, SearchStats, Step};
use crate::assume::{
    generate_assumptions, is_contradictory, is_legal, match_branches, refine_with_constraints,
    Assumption,
};
use crate::domain::{Domain, Method, Operator, Task, TaskKind};
use crate::logic::{unify_term_lists, Apply, Condition, KnowledgeState, Substitution};

pub type NodeId = usize;

/// The transition into a node: which task was applied or decomposed, and
/// what had to be assumed for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub action: Task,
    pub kind: TaskKind,
    pub assumptions: Vec<Assumption>,
    pub substitution: Substitution,
}

/// A node `<state, remaining tasks, weight>` of the conjecture tree.
#[derive(Clone, Debug)]
pub struct ConjectureNode {
    pub state: Arc<KnowledgeState>,
    pub remaining: Vec<Task>,
    pub weight: u32,
    pub depth: u32,
    pub parent: Option<NodeId>,
    pub edge: Option<Edge>,
}

impl ConjectureNode {
    pub fn is_leaf(&self) -> bool {
        self.remaining.is_empty()
    }
}

/// Outcome of advancing the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStep {
    /// A solution node with no remaining tasks.
    Leaf(NodeId),
    /// The frontier ran dry.
    Exhausted,
    /// The expansion budget was spent first.
    BudgetExhausted,
}

enum Schema {
    Op(Operator),
    Method(Method),
}

impl Schema {
    fn head(&self) -> Task {
        match self {
            Schema::Op(o) => o.head(),
            Schema::Method(m) => m.head(),
        }
    }

    fn pre(&self) -> &[Condition] {
        match self {
            Schema::Op(o) => &o.pre,
            Schema::Method(m) => &m.pre,
        }
    }
}

/// Branch-and-bound search tree over reachable states.
///
/// Nodes are stored in an arena and never removed, so the tree can be
/// inspected after a search and the search can be resumed to obtain the
/// next-best conjecture.
pub struct ConjectureTree<'d> {
    domain: &'d Domain,
    config: SearchConfig,
    nodes: Vec<ConjectureNode>,
    expanded: Vec<bool>,
    frontier: Frontier,
    stats: SearchStats,
    budget: u64,
    seen: BTreeMap<(Arc<KnowledgeState>, Vec<Task>), u32>,
}

impl<'d> ConjectureTree<'d> {
    pub fn new(
        domain: &'d Domain,
        init: KnowledgeState,
        goals: Vec<Task>,
        config: SearchConfig,
    ) -> Self {
        let budget = config.node_budget;
        let mut tree = ConjectureTree {
            domain,
            config,
            nodes: Vec::new(),
            expanded: Vec::new(),
            frontier: Frontier::new(),
            stats: SearchStats::default(),
            budget,
            seen: BTreeMap::new(),
        };
        tree.add_node(ConjectureNode {
            state: Arc::new(init),
            remaining: goals,
            weight: 0,
            depth: 0,
            parent: None,
            edge: None,
        });
        tree
    }

    /// Caps the number of expansions below the configured budget.
    pub(crate) fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget.min(self.config.node_budget);
        self
    }

    fn add_node(&mut self, node: ConjectureNode) -> NodeId {
        let id = self.nodes.len();
        self.frontier.push(id, node.weight, node.depth);
        self.nodes.push(node);
        self.expanded.push(false);
        self.stats.max_frontier = self.stats.max_frontier.max(self.frontier.len() as u64);
        id
    }

    pub fn root(&self) -> &ConjectureNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &ConjectureNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[ConjectureNode] {
        &self.nodes
    }

    pub fn is_expanded(&self, id: NodeId) -> bool {
        self.expanded[id]
    }

    pub fn frontier(&self) -> &Frontier {
        &self.frontier
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn stats(&self) -> SearchStats {
        SearchStats {
            tree_size: self.nodes.len() as u64,
            ..self.stats
        }
    }

    /// Removes and returns the open node with the fewest assumptions,
    /// preferring deeper nodes and then earlier insertion.
    pub fn select_best(&mut self) -> Option<NodeId> {
        self.frontier.pop()
    }

    /// Creates the children of `id`: one per method (or the operator), per
    /// match/skip branch and its constraint refinement, whose assumptions
    /// are legal, consistent with the step's preconditions and within the
    /// bound.
    pub fn expand(&mut self, id: NodeId) -> Result<Vec<NodeId>, SearchError> {
        assert!(!self.expanded[id], "node {} expanded twice", id);
        let node = &self.nodes[id];
        let Some((task, rest)) = node.remaining.split_first() else {
            return Ok(Vec::new());
        };
        let task = task.clone();
        let rest = rest.to_vec();
        let state = node.state.clone();
        let weight = node.weight;
        let generation = node.depth + 1;

        let schemas: Vec<Schema> = match task.kind() {
            TaskKind::Primitive => self
                .domain
                .operator(&task.name)
                .map(|o| Schema::Op(o.renamed(generation)))
                .into_iter()
                .collect(),
            TaskKind::Compound => self
                .domain
                .methods_for(&task.name)
                .map(|m| Schema::Method(m.renamed(generation)))
                .collect(),
        };
        if schemas.is_empty() {
            return Err(SearchError::UnknownTask(task.name.clone()));
        }

        self.expanded[id] = true;
        self.stats.expansions += 1;
        let mut children = Vec::new();
        for schema in &schemas {
            let head = schema.head();
            let Some(sigma0) = unify_term_lists(&head.args, &task.args, &Substitution::new()) else {
                continue;
            };
            // Task arguments are fixed; only schema variables may be bound.
            if task.args.apply(&sigma0) != task.args {
                continue;
            }
            let pre = schema.pre();
            let mut candidates: Vec<Substitution> = Vec::new();
            for sigma in match_branches(pre, &state, &sigma0) {
                let refined = refine_with_constraints(pre, &sigma, &state, |v| {
                    v.generation == generation
                });
                for s in core::iter::once(sigma).chain(refined) {
                    if !candidates.contains(&s) {
                        candidates.push(s);
                    }
                }
            }
            for sigma in candidates {
                let hs = generate_assumptions(pre, &sigma, &state);
                if hs.iter().any(|h| !is_legal(h, self.domain)) {
                    self.stats.pruned_illegal += 1;
                    continue;
                }
                if is_contradictory(pre, &sigma, &hs) {
                    self.stats.pruned_illegal += 1;
                    continue;
                }
                let child_weight = weight + hs.len() as u32;
                if self.config.max_assumptions.is_some_and(|m| child_weight > m) {
                    self.stats.pruned_by_bound += 1;
                    continue;
                }
                if generation > self.config.max_depth {
                    self.stats.pruned_by_depth += 1;
                    continue;
                }
                let hyps = hs.iter().filter_map(Assumption::literal);
                let (child_state, remaining) = match schema {
                    Schema::Op(op) => {
                        let mut s = state.consistent_union(hyps);
                        for d in &op.del {
                            s.remove(&d.apply(&sigma));
                        }
                        for a in &op.add {
                            s.insert(a.apply(&sigma));
                        }
                        (Arc::new(s), rest.clone())
                    }
                    Schema::Method(m) => {
                        let s = if hs.iter().any(|h| h.literal().is_some()) {
                            Arc::new(state.consistent_union(hyps))
                        } else {
                            state.clone()
                        };
                        let mut remaining = m.act.apply(&sigma);
                        remaining.extend(rest.iter().cloned());
                        (s, remaining)
                    }
                };
                if self.config.prune_dominated {
                    let key = (child_state.clone(), remaining.clone());
                    match self.seen.get(&key) {
                        Some(&w) if w <= child_weight => {
                            self.stats.pruned_dominated += 1;
                            continue;
                        }
                        _ => {
                            self.seen.insert(key, child_weight);
                        }
                    }
                }
                let edge = Edge {
                    action: head.apply(&sigma),
                    kind: task.kind(),
                    assumptions: hs,
                    substitution: sigma,
                };
                children.push(self.add_node(ConjectureNode {
                    state: child_state,
                    remaining,
                    weight: child_weight,
                    depth: generation,
                    parent: Some(id),
                    edge: Some(edge),
                }));
            }
        }
        Ok(children)
    }

    /// Runs the branch-and-bound loop until a leaf is selected. Can be
    /// called again to continue with the next-best leaf.
    pub fn next_leaf(&mut self) -> Result<SearchStep, SearchError> {
        loop {
            let Some(id) = self.frontier.peek() else {
                return Ok(SearchStep::Exhausted);
            };
            if self.nodes[id].is_leaf() {
                self.frontier.pop();
                return Ok(SearchStep::Leaf(id));
            }
            if self.stats.expansions >= self.budget {
                return Ok(SearchStep::BudgetExhausted);
            }
            self.frontier.pop();
            self.expand(id)?;
        }
    }

    /// Reads the conjecture off the branch ending in `leaf`.
    ///
    /// Primitive edges become steps. Assumptions made while decomposing a
    /// compound task are attached to the first primitive step executed
    /// after the decomposition, or to the conjecture's trailing assumptions
    /// when no primitive step follows.
    pub fn extract_conjecture(&self, leaf: NodeId) -> Conjecture {
        let mut edges = Vec::new();
        let mut cur = leaf;
        while let Some(parent) = self.nodes[cur].parent {
            edges.push(self.nodes[cur].edge.as_ref().expect("non-root node has an edge"));
            cur = parent;
        }
        edges.reverse();

        let mut steps = Vec::new();
        let mut pending: Vec<Assumption> = Vec::new();
        for e in edges {
            match e.kind {
                TaskKind::Compound => pending.extend(e.assumptions.iter().cloned()),
                TaskKind::Primitive => {
                    let mut assumptions = core::mem::take(&mut pending);
                    assumptions.extend(e.assumptions.iter().cloned());
                    steps.push(Step {
                        assumptions,
                        action: e.action.clone(),
                    });
                }
            }
        }
        Conjecture {
            steps,
            trailing: pending,
            total_weight: self.nodes[leaf].weight,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assume::AssumptionKind;
    use crate::fixtures::{c, downtown, goal, lit, taxi};
    use alloc::vec;

    #[test]
    fn method_expands_into_its_body() {
        let d = taxi();
        let mut tree = ConjectureTree::new(&d, downtown(), goal(), SearchConfig::default());
        let children = tree.expand(0).unwrap();
        // ?t can be the cab or, as far as the preconditions go, fred.
        assert_eq!(children.len(), 2);
        let body = vec![
            Task::new("!load", vec![c("fred"), c("cab38"), c("downtown")]),
            Task::new("!move", vec![c("cab38"), c("downtown"), c("park")]),
            Task::new("!unload", vec![c("fred"), c("cab38"), c("park")]),
        ];
        let cab = children.iter().map(|&id| tree.node(id)).find(|n| n.remaining == body).unwrap();
        assert_eq!(cab.weight, 0);
        assert_eq!(cab.depth, 1);
        assert_eq!(*cab.state, downtown());
        assert_eq!(cab.edge.as_ref().unwrap().kind, TaskKind::Compound);
    }

    #[test]
    fn missing_fuel_is_assumed() {
        let d = taxi();
        let task = Task::new("!move", vec![c("cab38"), c("downtown"), c("park")]);
        let mut tree = ConjectureTree::new(&d, downtown(), vec![task], SearchConfig::default());
        let children = tree.expand(0).unwrap();
        let best = children.iter().map(|&id| tree.node(id)).min_by_key(|n| n.weight).unwrap();
        assert_eq!(best.weight, 1);
        let hs = &best.edge.as_ref().unwrap().assumptions;
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].kind, AssumptionKind::Hypothesis);
        assert_eq!(hs[0].literal(), Some(&lit("hasfuel", &["cab38", "10"])));
        assert!(best.state.contains(&lit("at", &["cab38", "park"])));
        assert!(best.state.contains(&lit("hasfuel", &["cab38", "0"])));
    }

    #[test]
    fn zero_bound_admits_no_assumption() {
        let d = taxi();
        let task = Task::new("!move", vec![c("cab38"), c("downtown"), c("park")]);
        let config = SearchConfig {
            max_assumptions: Some(0),
            ..SearchConfig::default()
        };
        let mut tree = ConjectureTree::new(&d, downtown(), vec![task], config);
        assert!(tree.expand(0).unwrap().is_empty());
        assert!(tree.stats().pruned_by_bound > 0);
    }

    #[test]
    fn depth_bound_stops_children() {
        let d = taxi();
        let config = SearchConfig {
            max_depth: 0,
            ..SearchConfig::default()
        };
        let mut tree = ConjectureTree::new(&d, downtown(), goal(), config);
        assert!(tree.expand(0).unwrap().is_empty());
        assert!(tree.stats().pruned_by_depth > 0);
    }

    #[test]
    fn unknown_task_is_an_error() {
        let d = taxi();
        let mut tree = ConjectureTree::new(&d, downtown(), vec![Task::new("!fly", vec![])], SearchConfig::default());
        assert_eq!(tree.expand(0), Err(SearchError::UnknownTask("!fly".into())));
    }
}
