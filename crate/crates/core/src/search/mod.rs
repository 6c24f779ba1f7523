//! Conjecture-tree search.
//!
//! The tree is grown best-first: the open node with the fewest assumptions
//! is always expanded next, so the first solution node selected carries the
//! minimum number of assumptions among all solutions within the depth
//! bound.

mod frontier;
mod tree;

use alloc::vec::Vec;
use core::fmt;

pub use frontier::Frontier;
pub use tree::{ConjectureNode, ConjectureTree, Edge, NodeId, SearchStep};

use crate::assume::Assumption;
use crate::domain::{Domain, Task};
use crate::logic::{KnowledgeState, Name};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Upper bound on the assumptions of a conjecture; `Some(0)` makes the
    /// planner a classical HTN planner.
    pub max_assumptions: Option<u32>,
    pub max_depth: u32,
    /// Re-run the search with depth bounds 1, 2, ... up to `max_depth`.
    pub iterative_deepening: bool,
    /// Re-run the search with assumption bounds 0, 1, ... up to
    /// `max_assumptions` (unbounded when `None`).
    pub widen_assumptions: bool,
    /// Maximum number of expansions over the whole search.
    pub node_budget: u64,
    /// Skip a child whose state and remaining tasks were already reached
    /// with no more assumptions.
    pub prune_dominated: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_assumptions: None,
            max_depth: 64,
            iterative_deepening: false,
            widen_assumptions: false,
            node_budget: 1_000_000,
            prune_dominated: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expansions: u64,
    pub max_frontier: u64,
    pub tree_size: u64,
    pub pruned_illegal: u64,
    pub pruned_by_bound: u64,
    pub pruned_by_depth: u64,
    pub pruned_dominated: u64,
}

impl SearchStats {
    fn accumulate(&mut self, other: &SearchStats) {
        self.expansions += other.expansions;
        self.max_frontier = self.max_frontier.max(other.max_frontier);
        self.tree_size += other.tree_size;
        self.pruned_illegal += other.pruned_illegal;
        self.pruned_by_bound += other.pruned_by_bound;
        self.pruned_by_depth += other.pruned_by_depth;
        self.pruned_dominated += other.pruned_dominated;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchError {
    /// A task names no operator or method; validated problems never hit this.
    UnknownTask(Name),
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::UnknownTask(n) => write!(f, "unknown task {} during search", n),
        }
    }
}

/// One couple `<assumptions, action>` of a conjecture.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub assumptions: Vec<Assumption>,
    pub action: Task,
}

/// A plan whose steps carry the assumptions they need.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Conjecture {
    pub steps: Vec<Step>,
    /// Assumptions of decompositions after the last primitive step.
    pub trailing: Vec<Assumption>,
    pub total_weight: u32,
}

impl Conjecture {
    pub fn assumption_count(&self) -> usize {
        self.steps.iter().map(|s| s.assumptions.len()).sum::<usize>() + self.trailing.len()
    }

    pub fn assumptions(&self) -> impl Iterator<Item = &Assumption> {
        self.steps
            .iter()
            .flat_map(|s| s.assumptions.iter())
            .chain(self.trailing.iter())
    }

    pub fn actions(&self) -> impl Iterator<Item = &Task> {
        self.steps.iter().map(|s| &s.action)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    Solved,
    NoSolutionWithinBounds,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub conjecture: Option<Conjecture>,
    pub status: SearchStatus,
    pub stats: SearchStats,
}

/// Finds the conjecture with the fewest assumptions for `goals`.
///
/// With `iterative_deepening` or `widen_assumptions` the search is re-run
/// under growing bounds; a run that ends without pruning anything on the
/// widened bound proves that larger bounds cannot help, which stops the
/// iteration early.
pub fn find_conjecture(
    init: &KnowledgeState,
    domain: &Domain,
    goals: &[Task],
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    let cap = config.max_assumptions.unwrap_or(u32::MAX);
    let mut bound = if config.widen_assumptions {
        Some(0)
    } else {
        config.max_assumptions
    };
    let depths: Vec<u32> = if config.iterative_deepening {
        (1..=config.max_depth.max(1)).collect()
    } else {
        alloc::vec![config.max_depth]
    };

    let mut total = SearchStats::default();
    loop {
        let mut bound_pruned = false;
        for &depth in &depths {
            let run_config = SearchConfig {
                max_assumptions: bound,
                max_depth: depth,
                ..config.clone()
            };
            let remaining = config.node_budget.saturating_sub(total.expansions);
            let mut tree = ConjectureTree::new(domain, init.clone(), goals.to_vec(), run_config)
                .with_budget(remaining);
            let step = tree.next_leaf()?;
            let stats = tree.stats();
            total.accumulate(&stats);
            match step {
                SearchStep::Leaf(id) => {
                    return Ok(SearchOutcome {
                        conjecture: Some(tree.extract_conjecture(id)),
                        status: SearchStatus::Solved,
                        stats: total,
                    })
                }
                SearchStep::BudgetExhausted => {
                    return Ok(SearchOutcome {
                        conjecture: None,
                        status: SearchStatus::BudgetExhausted,
                        stats: total,
                    })
                }
                SearchStep::Exhausted => {
                    bound_pruned |= stats.pruned_by_bound > 0;
                    if stats.pruned_by_depth == 0 {
                        break;
                    }
                }
            }
        }
        match bound {
            Some(b) if config.widen_assumptions && bound_pruned && b < cap => bound = Some(b + 1),
            _ => break,
        }
    }
    Ok(SearchOutcome {
        conjecture: None,
        status: SearchStatus::NoSolutionWithinBounds,
        stats: total,
    })
}
