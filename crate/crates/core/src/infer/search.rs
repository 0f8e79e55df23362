//! Best-first enumeration of paths between node sets.
//!
//! States are answer sets reached by a partial path. The queue is ordered by
//! `cost so far + lower bound`, then by the printed path. The lower bound
//! walks backwards from each target: upwards to an ancestor shared with the
//! current set, then one step down or sideways. It is only used when all
//! admitted axes are structural or `attribute`.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Reverse;

use super::constraint::{drop_prefix, inside};
use super::cost::{cost_of, step_cost, Cost};
use super::{Constraint, InferError, MatchMode, PathQuery, Prefix, RankedPath, SearchOptions, STRUCTURAL_AXES};
use crate::corpus::Page;
use crate::dom::{Document, NodeId, NodeKind};
use crate::eval::{matches_test, EvalError, Evaluator, NodeSet};
use crate::xpath::{pretty_print, Axis, CmpOp, Expr, NodeTest, Step};

const UNREACHABLE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expansions: usize,
    pub states_pushed: usize,
    /// Candidates re-evaluated before emission.
    pub verifications: usize,
    /// Candidates whose re-evaluation disagreed with the search.
    pub rejected: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamEnd {
    /// `limit` paths were emitted.
    Limit,
    /// Every path within the depth bound was considered.
    Exhausted,
    /// `max_expansions` was reached first.
    ExpansionBudget,
    Error,
}

struct State {
    set: NodeSet,
    steps: Vec<Step>,
    g: Cost,
    preds: usize,
}

struct Goal {
    expr: Expr,
    cost: Cost,
}

/// Lazily produced paths in non-decreasing cost order.
pub struct PathStream<'e, 'a> {
    ev: &'e Evaluator<'a>,
    origin: NodeSet,
    target: NodeSet,
    mode: MatchMode,
    options: SearchOptions,
    limit: usize,
    prefix_items: Vec<Expr>,
    first_axes: Vec<Axis>,
    later_axes: Vec<Axis>,
    use_bound: bool,
    links: bool,
    /// `ByAxis` names the first step's axis, so the empty path never qualifies.
    needs_step: bool,
    scope: Option<NodeSet>,
    drop: Option<NodeSet>,
    queue: BinaryHeap<Reverse<(Cost, String, usize)>>,
    slots: Vec<Option<State>>,
    expanded: BTreeMap<NodeSet, Vec<(usize, usize)>>,
    bounds: BTreeMap<NodeSet, u32>,
    ready: BTreeMap<(Cost, String), Goal>,
    draining: bool,
    emitted: usize,
    end: Option<StreamEnd>,
    stats: SearchStats,
}

/// Exact-mode stream; see [`search`].
pub fn all_paths<'e, 'a>(q: &PathQuery, ev: &'e Evaluator<'a>) -> Result<PathStream<'e, 'a>, InferError> {
    let mut q = q.clone();
    q.mode = MatchMode::Exact;
    search(&q, ev)
}

/// Sample-mode stream; see [`search`].
pub fn sample_paths<'e, 'a>(q: &PathQuery, ev: &'e Evaluator<'a>) -> Result<PathStream<'e, 'a>, InferError> {
    let mut q = q.clone();
    q.mode = MatchMode::Sample;
    search(&q, ev)
}

/// Starts a search. Nothing beyond the constraint expressions is evaluated
/// until the stream is polled.
pub fn search<'e, 'a>(q: &PathQuery, ev: &'e Evaluator<'a>) -> Result<PathStream<'e, 'a>, InferError> {
    if q.source.is_empty() {
        return Err(InferError::EmptySource);
    }
    if q.target.is_empty() {
        return Err(InferError::EmptyTarget);
    }
    if q.limit == 0 {
        return Err(InferError::ZeroLimit);
    }
    let to_set =
        |e: &Expr, ctx: &NodeSet| -> Result<NodeSet, InferError> { ev.evaluate(e, ctx)?.into_node_set().ok_or(InferError::NotANodeSet) };
    let mut origin = q.source.clone();
    let mut prefix_items = Vec::new();
    let mut prefix_cost = Cost::ZERO;
    let mut start = q.source.clone();
    let mut by_axis: Option<BTreeSet<Axis>> = None;
    let mut scope = None;
    let mut drop = None;
    for c in &q.constraints {
        match c {
            Constraint::WithPrefix(Prefix::Nodes(ns)) => {
                origin = ns.clone();
                start = ns.clone();
            }
            Constraint::WithPrefix(Prefix::Expr(e)) => {
                start = to_set(e, &origin)?;
                prefix_items = e.path_items().into_iter().cloned().collect();
                prefix_cost = cost_of(e);
            }
            Constraint::ByAxis(axes) => {
                by_axis = Some(match by_axis {
                    Some(prev) => prev.intersection(axes).copied().collect(),
                    None => axes.clone(),
                })
            }
            Constraint::WithinPrefix(e) => {
                let s = to_set(e, &origin)?;
                if s.is_empty() {
                    return Err(InferError::EmptyScope);
                }
                scope = Some(s);
            }
            Constraint::DropPrefix(e) => drop = Some(to_set(e, &origin)?),
        }
    }
    let mut later_axes: Vec<Axis> = STRUCTURAL_AXES.to_vec();
    if let Some(extra) = &by_axis {
        later_axes.extend(extra.iter().filter(|a| !STRUCTURAL_AXES.contains(a)));
    }
    let first_axes = match &by_axis {
        Some(set) => later_axes.iter().copied().filter(|a| set.contains(a)).collect(),
        None => later_axes.clone(),
    };
    let use_bound = later_axes.iter().all(|a| STRUCTURAL_AXES.contains(a) || *a == Axis::Attribute);
    let links = later_axes.contains(&Axis::Link);
    let needs_step = by_axis.is_some();
    let mut stream = PathStream {
        ev,
        origin,
        target: q.target.clone(),
        mode: q.mode,
        options: q.options,
        limit: q.limit,
        prefix_items,
        first_axes,
        later_axes,
        use_bound,
        links,
        needs_step,
        scope,
        drop,
        queue: BinaryHeap::new(),
        slots: Vec::new(),
        expanded: BTreeMap::new(),
        bounds: BTreeMap::new(),
        ready: BTreeMap::new(),
        draining: false,
        emitted: 0,
        end: None,
        stats: SearchStats::default(),
    };
    if !start.is_empty() {
        stream.push(State { set: start, steps: Vec::new(), g: prefix_cost, preds: 0 })?;
    }
    Ok(stream)
}

impl<'e, 'a> PathStream<'e, 'a> {
    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    /// Why the stream stopped, once it has.
    pub fn end(&self) -> Option<StreamEnd> {
        self.end
    }

    /// The set emitted paths are evaluated from.
    pub fn origin(&self) -> &NodeSet {
        &self.origin
    }

    fn expr_of(&self, steps: &[Step]) -> Expr {
        let items = self.prefix_items.iter().cloned().chain(steps.iter().cloned().map(Expr::Step));
        let items: Vec<Expr> = items.collect();
        Expr::path(items).unwrap_or_else(|| Expr::step(Axis::SelfAxis, NodeTest::AnyNode))
    }

    fn is_goal(&self, set: &NodeSet) -> bool {
        match self.mode {
            MatchMode::Exact => *set == self.target,
            MatchMode::Sample => self.target.is_subset(set),
        }
    }

    /// Lower bound on the number of further steps, or `UNREACHABLE`.
    fn bound(&mut self, set: &NodeSet) -> Result<u32, EvalError> {
        if !self.links {
            let pages: BTreeSet<_> = set.iter().map(|n| &n.page).collect();
            if self.target.iter().any(|t| !pages.contains(&t.page)) {
                return Ok(UNREACHABLE);
            }
        }
        if !self.use_bound {
            return Ok(0);
        }
        if let Some(&r) = self.bounds.get(set) {
            return Ok(r);
        }
        let mut worst = 0;
        let mut page: Option<Arc<Page>> = None;
        for t in &self.target {
            if set.contains(t) {
                continue;
            }
            let p = match &page {
                Some(p) if *p.url() == t.page => p.clone(),
                _ => {
                    let p = self.ev.page(&t.page)?;
                    page = Some(p.clone());
                    p
                }
            };
            let best =
                set.iter().filter(|s| s.page == t.page).map(|s| distance(&p.document, s.index, t.index)).min().unwrap_or(UNREACHABLE);
            worst = worst.max(best);
            if worst == UNREACHABLE {
                break;
            }
        }
        self.bounds.insert(set.clone(), worst);
        Ok(worst)
    }

    fn push(&mut self, st: State) -> Result<(), EvalError> {
        let r = self.bound(&st.set)?;
        if r == UNREACHABLE || st.steps.len() + r as usize > self.options.depth {
            return Ok(());
        }
        let f = st.g + Cost::new(0, r, r);
        let key = pretty_print(&self.expr_of(&st.steps));
        self.slots.push(Some(st));
        self.queue.push(Reverse((f, key, self.slots.len() - 1)));
        self.stats.states_pushed += 1;
        Ok(())
    }

    fn dominated(&mut self, st: &State) -> bool {
        let seen = self.expanded.entry(st.set.clone()).or_default();
        if seen.iter().any(|&(s, p)| s <= st.steps.len() && p <= st.preds) {
            return true;
        }
        seen.push((st.steps.len(), st.preds));
        false
    }

    fn within(&self, set: &NodeSet) -> Result<bool, EvalError> {
        match &self.scope {
            None => Ok(true),
            Some(scope) => {
                for n in set {
                    if !inside(self.ev, n, scope)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    fn expand(&mut self, st: &State) -> Result<(), EvalError> {
        let axes = if st.steps.is_empty() { self.first_axes.clone() } else { self.later_axes.clone() };
        for axis in axes {
            let mut groups: Vec<Vec<NodeId>> = Vec::with_capacity(st.set.len());
            for n in &st.set {
                groups.push(self.ev.axis_nodes(axis, n)?);
            }
            let tests = self.observed_tests(axis, &groups)?;
            for test in tests {
                let filtered = self.filter_groups(axis, &test, &groups)?;
                let base: NodeSet = filtered.iter().flatten().cloned().collect();
                if base.is_empty() {
                    continue;
                }
                let step = Step::new(axis, test);
                let g = st.g + step_cost(axis);
                if st.preds < self.options.predicate_budget {
                    self.positional(st, &step, g, &filtered, &base)?;
                    self.attribute_filters(st, &step, g, &base)?;
                }
                if !self.within(&base)? {
                    continue;
                }
                let mut steps = st.steps.clone();
                steps.push(step);
                self.push(State { set: base, steps, g, preds: st.preds })?;
            }
        }
        Ok(())
    }

    fn positional(&mut self, st: &State, step: &Step, g: Cost, groups: &[Vec<NodeId>], base: &NodeSet) -> Result<(), EvalError> {
        let longest = groups.iter().map(Vec::len).max().unwrap_or(0).min(self.options.max_position);
        for k in 1..=longest {
            let picked: NodeSet = groups
                .iter()
                .filter(|g| g.len() >= k)
                .map(|g| if step.axis.is_reverse() { g[g.len() - k].clone() } else { g[k - 1].clone() })
                .collect();
            if picked.is_empty() || picked == *base || !self.within(&picked)? {
                continue;
            }
            let mut steps = st.steps.clone();
            steps.push(step.clone().with_predicate(Expr::number(k as f64)));
            self.push(State { set: picked, steps, g, preds: st.preds + 1 })?;
        }
        Ok(())
    }

    fn attribute_filters(&mut self, st: &State, step: &Step, g: Cost, base: &NodeSet) -> Result<(), EvalError> {
        let mut values: BTreeMap<(String, String), Vec<NodeId>> = BTreeMap::new();
        let mut page: Option<Arc<Page>> = None;
        for n in base {
            let p = self.page_cached(&mut page, n)?;
            let doc = &p.document;
            if doc.node(n.index).kind != NodeKind::Element {
                continue;
            }
            let mut names = BTreeSet::new();
            for &a in &doc.node(n.index).attributes {
                let attr = doc.node(a);
                let name = attr.name.to_ascii_lowercase();
                // only the first attribute of a name is visible to `@name='v'`
                if names.insert(name.clone()) && !(attr.value.contains('\'') && attr.value.contains('"')) {
                    values.entry((name, attr.value.clone())).or_default().push(n.clone());
                }
            }
        }
        let cost = g + step_cost(Axis::Attribute);
        for ((name, value), nodes) in values {
            let picked = NodeSet::from_unsorted(nodes);
            if picked == *base || !self.within(&picked)? {
                continue;
            }
            let pred = Expr::compare(CmpOp::Eq, Expr::Step(Step::named(Axis::Attribute, &name)), Expr::string(&value));
            let mut steps = st.steps.clone();
            steps.push(step.clone().with_predicate(pred));
            self.push(State { set: picked, steps, g: cost, preds: st.preds + 1 })?;
        }
        Ok(())
    }

    fn page_cached(&self, slot: &mut Option<Arc<Page>>, n: &NodeId) -> Result<Arc<Page>, EvalError> {
        if let Some(p) = slot {
            if *p.url() == n.page {
                return Ok(p.clone());
            }
        }
        let p = self.ev.page(&n.page)?;
        *slot = Some(p.clone());
        Ok(p)
    }

    /// Name tests for the names present in the axis results, plus `text()`.
    fn observed_tests(&self, axis: Axis, groups: &[Vec<NodeId>]) -> Result<Vec<NodeTest>, EvalError> {
        let mut names = BTreeSet::new();
        let mut text = false;
        let mut page = None;
        for n in groups.iter().flatten() {
            let p = self.page_cached(&mut page, n)?;
            let node = p.document.node(n.index);
            match node.kind {
                NodeKind::Attribute if axis == Axis::Attribute => {
                    names.insert(node.name.to_ascii_lowercase());
                }
                NodeKind::Element if axis != Axis::Attribute => {
                    names.insert(node.name.to_ascii_lowercase());
                }
                NodeKind::Text if axis != Axis::Attribute => text = true,
                _ => {}
            }
        }
        let mut tests: Vec<NodeTest> = names.into_iter().map(NodeTest::Name).collect();
        if text {
            tests.push(NodeTest::Text);
        }
        Ok(tests)
    }

    fn filter_groups(&self, axis: Axis, test: &NodeTest, groups: &[Vec<NodeId>]) -> Result<Vec<Vec<NodeId>>, EvalError> {
        let mut page = None;
        let mut out = Vec::with_capacity(groups.len());
        for g in groups {
            let mut kept = Vec::new();
            for n in g {
                let p = self.page_cached(&mut page, n)?;
                if matches_test(&p.document, n.index, axis, test) {
                    kept.push(n.clone());
                }
            }
            out.push(kept);
        }
        Ok(out)
    }

    /// Re-evaluates a found path and applies `DropPrefix`.
    fn finish(&mut self, goal: Goal) -> Result<Option<RankedPath>, InferError> {
        self.stats.verifications += 1;
        let answer = self.ev.evaluate(&goal.expr, &self.origin)?.into_node_set();
        let ok = match answer {
            Some(set) => self.is_goal(&set),
            None => false,
        };
        if !ok {
            self.stats.rejected += 1;
            return Ok(None);
        }
        let mut path = RankedPath { expr: goal.expr, cost: goal.cost, verified: true, dropped: None };
        if let Some(answer) = &self.drop {
            if let Some((dropped, rest)) = drop_prefix(self.ev, &path.expr, answer, &self.origin)? {
                path.expr = rest;
                path.dropped = Some(dropped);
            }
        }
        Ok(Some(path))
    }

    fn step(&mut self) -> Result<Option<RankedPath>, InferError> {
        loop {
            if self.emitted >= self.limit {
                self.end = Some(StreamEnd::Limit);
                return Ok(None);
            }
            let frontier = if self.draining { None } else { self.queue.peek().map(|Reverse((f, _, _))| *f) };
            if let Some((cost, _)) = self.ready.keys().next() {
                if frontier.is_none_or(|f| f > *cost) {
                    let (_, goal) = self.ready.pop_first().expect("non-empty");
                    if let Some(p) = self.finish(goal)? {
                        self.emitted += 1;
                        return Ok(Some(p));
                    }
                    continue;
                }
            }
            if frontier.is_none() {
                if self.end.is_none() {
                    self.end = Some(StreamEnd::Exhausted);
                }
                return Ok(None);
            }
            let Reverse((_, key, slot)) = self.queue.pop().expect("peeked");
            let st = self.slots[slot].take().expect("each slot is popped once");
            self.stats.expansions += 1;
            if self.stats.expansions > self.options.max_expansions {
                self.draining = true;
                self.end = Some(StreamEnd::ExpansionBudget);
            }
            if self.is_goal(&st.set) && !(self.needs_step && st.steps.is_empty()) {
                let expr = self.expr_of(&st.steps);
                self.ready.insert((st.g, key), Goal { expr, cost: st.g });
            }
            if self.draining || st.steps.len() >= self.options.depth || self.dominated(&st) {
                continue;
            }
            self.expand(&st)?;
        }
    }
}

impl Iterator for PathStream<'_, '_> {
    type Item = Result<RankedPath, InferError>;

    fn next(&mut self) -> Option<Self::Item> {
        if matches!(self.end, Some(StreamEnd::Limit | StreamEnd::Error | StreamEnd::Exhausted)) {
            return None;
        }
        match self.step() {
            Ok(p) => p.map(Ok),
            Err(e) => {
                self.end = Some(StreamEnd::Error);
                Some(Err(e))
            }
        }
    }
}

/// Fewest structural steps from `s` to `t` on one page.
///
/// A path must climb from `s` to an ancestor whose subtree holds `t`; from
/// there one `descendant` step reaches `t`, or one sibling step when `t`
/// is a child of that ancestor.
pub(crate) fn distance(doc: &Document, s: u32, t: u32) -> u32 {
    if s == t {
        return 0;
    }
    let sn = doc.node(s);
    if sn.kind == NodeKind::Attribute {
        return match sn.parent {
            Some(owner) => distance(doc, owner, t).saturating_add(1),
            None => UNREACHABLE,
        };
    }
    let tn = doc.node(t);
    if tn.kind == NodeKind::Attribute {
        return match tn.parent {
            Some(owner) => distance(doc, s, owner).saturating_add(1),
            None => UNREACHABLE,
        };
    }
    let mut a = s;
    let mut j = 0;
    loop {
        if a == t {
            return j;
        }
        if doc.is_ancestor_or_self(a, t) {
            return if j >= 1 && tn.parent == Some(a) { j } else { j + 1 };
        }
        match doc.node(a).parent {
            Some(p) => {
                a = p;
                j += 1;
            }
            None => return UNREACHABLE,
        }
    }
}
