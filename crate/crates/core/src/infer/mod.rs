//! Path inference: find the simplest expressions that lead from one node
//! set to another, cheapest first.

mod constraint;
mod cost;
mod search;
mod table;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::eval::{EvalError, NodeSet};
use crate::xpath::{Axis, Expr};

pub use constraint::{apply_constraint, drop_prefix, is_within};
pub use cost::{axis_rank, cost_of, step_cost, Cost};
pub use search::{all_paths, sample_paths, search, PathStream, SearchStats, StreamEnd};
pub use table::{assemble_table, Column, Table};

/// The axes tried by default, in preference order.
pub const STRUCTURAL_AXES: [Axis; 5] = [Axis::Child, Axis::FollowingSibling, Axis::PrecedingSibling, Axis::Descendant, Axis::Parent];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchMode {
    /// The answer set must equal the target.
    Exact,
    /// The answer set must contain the target.
    Sample,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Prefix {
    /// Paths start with this expression.
    Expr(Expr),
    /// Paths start from these nodes instead of the source.
    Nodes(NodeSet),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Constraint {
    WithPrefix(Prefix),
    /// The first step must use one of these axes. Axes outside the
    /// structural set become available to the search.
    ByAxis(BTreeSet<Axis>),
    /// Emitted paths lose their longest leading segment whose answer set
    /// equals this expression's.
    DropPrefix(Expr),
    /// Every step must stay inside the subtrees of this expression's answers.
    WithinPrefix(Expr),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of location steps after any prefix.
    pub depth: usize,
    /// Maximum number of predicates in one path. Each step takes at most one.
    pub predicate_budget: usize,
    /// Largest `k` tried for positional predicates.
    pub max_position: usize,
    /// States expanded before the stream gives up.
    pub max_expansions: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { depth: 6, predicate_budget: 2, max_position: 20, max_expansions: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathQuery {
    pub source: NodeSet,
    pub target: NodeSet,
    pub mode: MatchMode,
    pub constraints: Vec<Constraint>,
    pub limit: usize,
    pub options: SearchOptions,
}

impl PathQuery {
    pub fn new(source: NodeSet, target: NodeSet, mode: MatchMode) -> Self {
        PathQuery { source, target, mode, constraints: Vec::new(), limit: 10, options: SearchOptions::default() }
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn with_options(mut self, options: SearchOptions) -> Self {
        self.options = options;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankedPath {
    pub expr: Expr,
    pub cost: Cost,
    pub verified: bool,
    /// Leading segment removed by a `DropPrefix` constraint. `expr` is then
    /// meant to be evaluated from that segment's answer set.
    pub dropped: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InferError {
    #[error("source set is empty")]
    EmptySource,
    #[error("target set is empty")]
    EmptyTarget,
    #[error("withinPrefix scope evaluates to the empty set")]
    EmptyScope,
    #[error("limit must be at least 1")]
    ZeroLimit,
    #[error("constraint expression does not yield a node-set")]
    NotANodeSet,
    #[error(transparent)]
    Eval(#[from] EvalError),
}
