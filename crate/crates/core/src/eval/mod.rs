//! Expression evaluation over pages supplied by a [`PageSource`].
//!
//! An [`Evaluator`] carries the per-run state: the fetch budget, resolved
//! pages, and lazily built geometry indexes. Create one per query (or per
//! inference run); it is not shared across threads.

mod axes;
mod functions;
mod value;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::{Cell, RefCell};

use crate::corpus::{FetchError, Lookup, Page, PageSource};
use crate::dom::{NodeId, NodeKind, PageUrl};
use crate::geometry::{GeometryIndex, VisualRelation};
use crate::xpath::{Axis, CmpOp, Expr, Literal, NodeTest, Step};

pub(crate) use axes::{matches_test, tree_axis};
pub(crate) use value::{format_number, parse_number};
pub use value::{NodeSet, Value};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unknown variable ${0}")]
    UnknownVariable(String),
    #[error("fetch budget exhausted")]
    FetchBudgetExhausted,
    #[error("type error: {0}")]
    TypeError(String),
    #[error("node {0} is not in the corpus")]
    UnknownNode(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    /// Tolerance in CSS pixels for the directional visual axes.
    pub epsilon: f64,
    /// Minimum confidence for `imagetag()` to report a tag as present.
    pub image_tag_threshold: f64,
    /// Fresh page loads allowed over the evaluator's lifetime.
    pub max_fetch: u32,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { epsilon: 0.5, image_tag_threshold: 0.5, max_fetch: 100 }
    }
}

#[derive(Clone, Copy)]
struct Ctx<'c> {
    node: &'c NodeId,
    position: usize,
    size: usize,
}

pub struct Evaluator<'a> {
    source: &'a dyn PageSource,
    variables: BTreeMap<String, String>,
    options: EvalOptions,
    budget: Cell<u32>,
    fetches: Cell<u32>,
    pages: RefCell<BTreeMap<PageUrl, Arc<Page>>>,
    geometry: RefCell<BTreeMap<PageUrl, Rc<GeometryIndex>>>,
    /// URLs whose load failed; not retried.
    dead: RefCell<BTreeSet<String>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(source: &'a dyn PageSource) -> Self {
        Evaluator::with_options(source, EvalOptions::default())
    }

    pub fn with_options(source: &'a dyn PageSource, options: EvalOptions) -> Self {
        Evaluator {
            source,
            variables: BTreeMap::new(),
            options,
            budget: Cell::new(options.max_fetch),
            fetches: Cell::new(0),
            pages: RefCell::new(BTreeMap::new()),
            geometry: RefCell::new(BTreeMap::new()),
            dead: RefCell::new(BTreeSet::new()),
        }
    }

    pub fn set_variable(&mut self, name: &str, value: &str) {
        self.variables.insert(name.into(), value.into());
    }

    pub fn options(&self) -> &EvalOptions {
        &self.options
    }

    pub fn source(&self) -> &'a dyn PageSource {
        self.source
    }

    /// Fresh loads this evaluator asked its source for.
    pub fn fetch_count(&self) -> u32 {
        self.fetches.get()
    }

    pub fn remaining_budget(&self) -> u32 {
        self.budget.get()
    }

    /// Evaluates `e` once per context node.
    ///
    /// Node-set results are merged into one canonical set. A scalar result is
    /// the value computed for the first context node. An empty context yields
    /// the empty node-set.
    pub fn evaluate(&self, e: &Expr, context: &NodeSet) -> Result<Value, EvalError> {
        let size = context.len();
        let mut acc: Vec<NodeId> = Vec::new();
        for (i, node) in context.iter().enumerate() {
            match self.eval(e, Ctx { node, position: i + 1, size })? {
                Value::NodeSet(ns) => acc.extend(ns.into_vec()),
                scalar if i == 0 => return Ok(scalar),
                scalar => {
                    return Err(EvalError::TypeError(alloc::format!(
                        "expression yields a {} for some context nodes and a node-set for others",
                        scalar.kind()
                    )))
                }
            }
        }
        Ok(Value::NodeSet(NodeSet::from_unsorted(acc)))
    }

    pub fn evaluate_node_set(&self, e: &Expr, context: &NodeSet) -> Result<NodeSet, EvalError> {
        match self.evaluate(e, context)? {
            Value::NodeSet(ns) => Ok(ns),
            other => Err(EvalError::TypeError(alloc::format!("expected a node-set, got a {}", other.kind()))),
        }
    }

    /// One step from one node, without predicates.
    pub fn axis_step(&self, axis: Axis, test: &NodeTest, from: &NodeId) -> Result<NodeSet, EvalError> {
        let nodes = self.axis_nodes(axis, from)?;
        self.filter_test(nodes, axis, test)
    }

    pub fn page(&self, url: &PageUrl) -> Result<Arc<Page>, EvalError> {
        if let Some(p) = self.pages.borrow().get(url) {
            return Ok(p.clone());
        }
        match self.source.resident(url.as_str()) {
            Lookup::Resident(p) => {
                self.pages.borrow_mut().insert(url.clone(), p.clone());
                Ok(p)
            }
            _ => Err(EvalError::UnknownNode(url.as_str().into())),
        }
    }

    /// Whitespace-normalized string value of a node.
    pub fn string_value(&self, id: &NodeId) -> Result<String, EvalError> {
        let page = self.page(&id.page)?;
        check_index(&page, id)?;
        Ok(page.document.text_content(id.index))
    }

    fn eval(&self, e: &Expr, ctx: Ctx<'_>) -> Result<Value, EvalError> {
        match e {
            Expr::Step(step) => Ok(Value::NodeSet(self.eval_step(step, ctx.node)?)),
            Expr::Seq(a, b) => {
                let left = self.expect_nodes(self.eval(a, ctx)?)?;
                let size = left.len();
                let mut acc = Vec::new();
                for (i, node) in left.iter().enumerate() {
                    let right = self.expect_nodes(self.eval(b, Ctx { node, position: i + 1, size })?)?;
                    acc.extend(right.into_vec());
                }
                Ok(Value::NodeSet(NodeSet::from_unsorted(acc)))
            }
            Expr::Union(a, b) => {
                let left = self.expect_nodes(self.eval(a, ctx)?)?;
                let right = self.expect_nodes(self.eval(b, ctx)?)?;
                Ok(Value::NodeSet(left.union(&right)))
            }
            Expr::Root => {
                let page = self.page(&ctx.node.page)?;
                Ok(Value::NodeSet(NodeSet::single(page.document.root())))
            }
            Expr::FnCall(name, args) => self.call(*name, args, ctx),
            Expr::Literal(Literal::Str(s)) => Ok(Value::String(s.clone())),
            Expr::Literal(Literal::Num(n)) => Ok(Value::Number(*n)),
            Expr::Comparison(op, a, b) => {
                let left = self.eval(a, ctx)?;
                let right = self.eval(b, ctx)?;
                Ok(Value::Boolean(self.compare(*op, &left, &right)?))
            }
            Expr::VarRef(name) => {
                self.variables.get(name).map(|v| Value::String(v.clone())).ok_or_else(|| EvalError::UnknownVariable(name.clone()))
            }
        }
    }

    fn expect_nodes(&self, v: Value) -> Result<NodeSet, EvalError> {
        match v {
            Value::NodeSet(ns) => Ok(ns),
            other => Err(EvalError::TypeError(alloc::format!("path step applied to a {}", other.kind()))),
        }
    }

    fn eval_step(&self, step: &Step, from: &NodeId) -> Result<NodeSet, EvalError> {
        let nodes = self.axis_nodes(step.axis, from)?;
        let mut nodes = self.filter_test(nodes, step.axis, &step.test)?.into_vec();
        if step.predicates.is_empty() {
            return Ok(NodeSet::from_unsorted(nodes));
        }
        let reverse = step.axis.is_reverse();
        if reverse {
            nodes.reverse();
        }
        for pred in &step.predicates {
            let size = nodes.len();
            let mut kept = Vec::with_capacity(size);
            for (i, node) in nodes.iter().enumerate() {
                let position = i + 1;
                let keep = match self.eval(pred, Ctx { node, position, size })? {
                    Value::Number(n) => n == position as f64,
                    other => self.truthy(&other),
                };
                if keep {
                    kept.push(node.clone());
                }
            }
            nodes = kept;
        }
        Ok(NodeSet::from_unsorted(nodes))
    }

    fn filter_test(&self, nodes: Vec<NodeId>, axis: Axis, test: &NodeTest) -> Result<NodeSet, EvalError> {
        let mut out = Vec::with_capacity(nodes.len());
        let mut current: Option<Arc<Page>> = None;
        for id in nodes {
            let page = match &current {
                Some(p) if *p.url() == id.page => p.clone(),
                _ => {
                    let p = self.page(&id.page)?;
                    current = Some(p.clone());
                    p
                }
            };
            if matches_test(&page.document, id.index, axis, test) {
                out.push(id);
            }
        }
        Ok(NodeSet::from_unsorted(out))
    }

    /// Raw axis result in canonical order, before node tests.
    pub(crate) fn axis_nodes(&self, axis: Axis, from: &NodeId) -> Result<Vec<NodeId>, EvalError> {
        let page = self.page(&from.page)?;
        check_index(&page, from)?;
        let doc = &page.document;
        if let Some(idx) = tree_axis(doc, axis, from.index) {
            return Ok(idx.into_iter().map(|i| doc.id(i)).collect());
        }
        match axis {
            Axis::Link => {
                let node = doc.node(from.index);
                if !matches!(node.kind, NodeKind::Attribute | NodeKind::Text) {
                    return Ok(Vec::new());
                }
                let value = String::from(node.value.trim());
                Ok(self.follow_link(doc.url(), &value)?.into_iter().collect())
            }
            visual => {
                let relation = match visual {
                    Axis::ContainedIn => VisualRelation::ContainedIn,
                    Axis::Overlaps => VisualRelation::Overlaps,
                    Axis::Right => VisualRelation::Right,
                    Axis::Left => VisualRelation::Left,
                    Axis::Up => VisualRelation::Up,
                    Axis::Down => VisualRelation::Down,
                    other => unreachable!("{other:?} is a tree axis"),
                };
                let Some(bbox) = page.annotations.bounding_box(from.index) else {
                    return Ok(Vec::new());
                };
                let index = self.geometry_index(&page);
                Ok(index.query(relation, bbox, self.options.epsilon, Some(from.index)).into_iter().map(|i| doc.id(i)).collect())
            }
        }
    }

    fn geometry_index(&self, page: &Page) -> Rc<GeometryIndex> {
        if let Some(ix) = self.geometry.borrow().get(page.url()) {
            return ix.clone();
        }
        let ix = Rc::new(GeometryIndex::build(page.annotations.boxes().map(|(n, b)| (n, *b))));
        self.geometry.borrow_mut().insert(page.url().clone(), ix.clone());
        ix
    }

    /// Root element of the page a URL-bearing value points to, loading it if needed.
    pub(crate) fn follow_link(&self, base: &PageUrl, raw: &str) -> Result<Option<NodeId>, EvalError> {
        let Some(url) = self.source.resolve(base.as_str(), raw) else {
            return Ok(None);
        };
        if let Some(p) = self.pages.borrow().get(url.as_str()) {
            return Ok(Some(p.document.root()));
        }
        if self.dead.borrow().contains(&url) {
            return Ok(None);
        }
        let page = match self.source.resident(&url) {
            Lookup::Resident(p) => p,
            Lookup::Failed => return Ok(None),
            Lookup::Absent => {
                let left = self.budget.get();
                if left == 0 {
                    return Err(EvalError::FetchBudgetExhausted);
                }
                self.budget.set(left - 1);
                self.fetches.set(self.fetches.get() + 1);
                match self.source.fetch(&url) {
                    Ok(p) => p,
                    Err(FetchError::BudgetExhausted) => return Err(EvalError::FetchBudgetExhausted),
                    Err(_) => {
                        self.dead.borrow_mut().insert(url);
                        return Ok(None);
                    }
                }
            }
        };
        let root = page.document.root();
        self.pages.borrow_mut().insert(page.url().clone(), page);
        Ok(Some(root))
    }

    fn truthy(&self, v: &Value) -> bool {
        match v {
            Value::NodeSet(ns) => !ns.is_empty(),
            Value::String(s) => !s.is_empty(),
            Value::Number(n) => *n != 0.0 && !n.is_nan(),
            Value::Boolean(b) => *b,
        }
    }

    pub(crate) fn to_string(&self, v: &Value) -> Result<String, EvalError> {
        Ok(match v {
            Value::NodeSet(ns) => match ns.first() {
                Some(id) => self.string_value(id)?,
                None => String::new(),
            },
            Value::String(s) => s.clone(),
            Value::Number(n) => format_number(*n),
            Value::Boolean(b) => String::from(if *b { "true" } else { "false" }),
        })
    }

    fn to_number(&self, v: &Value) -> Result<f64, EvalError> {
        Ok(match v {
            Value::Number(n) => *n,
            Value::Boolean(b) => f64::from(u8::from(*b)),
            other => parse_number(&self.to_string(other)?),
        })
    }

    fn compare(&self, op: CmpOp, a: &Value, b: &Value) -> Result<bool, EvalError> {
        let is = |v: &Value, k: &str| v.kind() == k;
        match op {
            CmpOp::Eq | CmpOp::EqEq | CmpOp::Ne => {
                let equal = if is(a, "boolean") || is(b, "boolean") {
                    self.truthy(a) == self.truthy(b)
                } else if is(a, "number") || is(b, "number") {
                    self.to_number(a)? == self.to_number(b)?
                } else {
                    self.to_string(a)? == self.to_string(b)?
                };
                Ok(if op == CmpOp::Ne { !equal } else { equal })
            }
            _ => {
                let (x, y) = (self.to_number(a)?, self.to_number(b)?);
                Ok(match op {
                    CmpOp::Lt => x < y,
                    CmpOp::Le => x <= y,
                    CmpOp::Gt => x > y,
                    _ => x >= y,
                })
            }
        }
    }
}

fn check_index(page: &Page, id: &NodeId) -> Result<(), EvalError> {
    if (id.index as usize) < page.document.len() {
        Ok(())
    } else {
        Err(EvalError::UnknownNode(alloc::format!("{id:?}")))
    }
}
