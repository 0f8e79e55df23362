use super::{Constraint, InferError, Prefix};
use crate::dom::NodeId;
use crate::eval::{EvalError, Evaluator, NodeSet};
use crate::xpath::Expr;

/// True when every node lies in the subtree of some scope node.
pub fn is_within(evaluator: &Evaluator<'_>, nodes: &NodeSet, scope: &NodeSet) -> Result<bool, EvalError> {
    for n in nodes {
        if !inside(evaluator, n, scope)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn inside(evaluator: &Evaluator<'_>, n: &NodeId, scope: &NodeSet) -> Result<bool, EvalError> {
    let page = evaluator.page(&n.page)?;
    Ok(scope.iter().any(|w| w.page == n.page && page.document.is_ancestor_or_self(w.index, n.index)))
}

fn eval_items(evaluator: &Evaluator<'_>, items: &[&Expr], origin: &NodeSet) -> Result<NodeSet, InferError> {
    let e = Expr::path(items.iter().map(|&i| i.clone())).expect("non-empty prefix");
    evaluator.evaluate(&e, origin)?.into_node_set().ok_or(InferError::NotANodeSet)
}

/// Splits `candidate` after its longest leading segment (shorter than the
/// whole path) whose answer set from `origin` equals `answer`.
///
/// Returns `(dropped, rest)`, or `None` when no such segment exists.
pub fn drop_prefix(
    evaluator: &Evaluator<'_>,
    candidate: &Expr,
    answer: &NodeSet,
    origin: &NodeSet,
) -> Result<Option<(Expr, Expr)>, InferError> {
    let items = candidate.path_items();
    for k in (1..items.len()).rev() {
        if eval_items(evaluator, &items[..k], origin)? == *answer {
            let dropped = Expr::path(items[..k].iter().map(|&i| i.clone())).expect("k >= 1");
            let rest = Expr::path(items[k..].iter().map(|&i| i.clone())).expect("k < len");
            return Ok(Some((dropped, rest)));
        }
    }
    Ok(None)
}

/// Checks a single candidate against one constraint, evaluating from `source`.
///
/// Filtering constraints return the candidate unchanged or `None`;
/// `DropPrefix` returns the rewritten candidate.
pub fn apply_constraint(c: &Constraint, candidate: &Expr, evaluator: &Evaluator<'_>, source: &NodeSet) -> Result<Option<Expr>, InferError> {
    let items = candidate.path_items();
    match c {
        Constraint::WithPrefix(Prefix::Expr(p)) => {
            let want = p.path_items();
            let ok = want.len() <= items.len() && want.iter().zip(&items).all(|(a, b)| a == b);
            Ok(ok.then(|| candidate.clone()))
        }
        Constraint::WithPrefix(Prefix::Nodes(_)) => Ok(Some(candidate.clone())),
        Constraint::ByAxis(axes) => {
            let ok = match items[0] {
                Expr::Step(s) => axes.contains(&s.axis),
                _ => false,
            };
            Ok(ok.then(|| candidate.clone()))
        }
        Constraint::WithinPrefix(scope) => {
            let scope = evaluator.evaluate(scope, source)?.into_node_set().ok_or(InferError::NotANodeSet)?;
            for k in 1..=items.len() {
                let set = eval_items(evaluator, &items[..k], source)?;
                if !is_within(evaluator, &set, &scope)? {
                    return Ok(None);
                }
            }
            Ok(Some(candidate.clone()))
        }
        Constraint::DropPrefix(p) => {
            let answer = evaluator.evaluate(p, source)?.into_node_set().ok_or(InferError::NotANodeSet)?;
            Ok(Some(match drop_prefix(evaluator, candidate, &answer, source)? {
                Some((_, rest)) => rest,
                None => candidate.clone(),
            }))
        }
    }
}
