//! Inference request files and the set specifications shared with `schema`.

use std::collections::BTreeSet;

use inferxpath_core::corpus::Page;
use inferxpath_core::eval::{Evaluator, NodeSet};
use inferxpath_core::infer::{Constraint, MatchMode, PathQuery, Prefix};
use inferxpath_core::semantic::{recognize, Provenance, Registry, SemanticSet};
use inferxpath_core::xpath::{parse, pretty_print, Axis, Expr};
use inferxpath_core::EvalError;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum RequestError {
    #[error("request format: {0}")]
    Format(#[from] serde_json::Error),
    #[error("syntax error in {context}: {message}")]
    Syntax { context: String, message: String },
    #[error("unknown recognizer {0:?}")]
    UnknownRecognizer(String),
    #[error("unknown axis {0:?}")]
    UnknownAxis(String),
    #[error("{0} does not yield a node-set")]
    NotANodeSet(String),
    #[error("bad set specification {0:?}: expected [name=]xpath:EXPR or [name=]recognizer:NAME")]
    SetSpec(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl RequestError {
    /// Evaluation failures as opposed to malformed input.
    pub fn is_evaluation(&self) -> bool {
        matches!(self, RequestError::Eval(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum SetSpec {
    Recognizer(String),
    Xpath(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum ConstraintSpec {
    WithPrefix(String),
    ByAxis(Vec<String>),
    DropPrefix(String),
    WithinPrefix(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModeSpec {
    #[default]
    Exact,
    Sample,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub source: SetSpec,
    pub target: SetSpec,
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default = "default_limit")]
    pub limit: usize,
    #[serde(default)]
    pub constraints: Vec<ConstraintSpec>,
    pub depth: Option<usize>,
}

fn default_limit() -> usize {
    10
}

impl Request {
    pub fn from_json(bytes: &[u8]) -> Result<Request, RequestError> {
        Ok(serde_json::from_slice(bytes)?)
    }
}

pub fn parse_expr(src: &str, context: &str) -> Result<Expr, RequestError> {
    parse(src).map_err(|e| RequestError::Syntax { context: context.into(), message: e.to_string() })
}

/// A named set for `schema`: `[name=]xpath:EXPR` or `[name=]recognizer:NAME`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedSetSpec {
    pub name: Option<String>,
    pub spec: SetSpec,
}

impl std::str::FromStr for NamedSetSpec {
    type Err = RequestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bare = |t: &str| {
            if let Some(x) = t.strip_prefix("xpath:") {
                Some(SetSpec::Xpath(x.to_owned()))
            } else {
                t.strip_prefix("recognizer:").map(|r| SetSpec::Recognizer(r.to_owned()))
            }
        };
        if let Some(spec) = bare(s) {
            return Ok(NamedSetSpec { name: None, spec });
        }
        let (name, rest) = s.split_once('=').ok_or_else(|| RequestError::SetSpec(s.into()))?;
        match bare(rest) {
            Some(spec) if !name.is_empty() => Ok(NamedSetSpec { name: Some(name.to_owned()), spec }),
            _ => Err(RequestError::SetSpec(s.into())),
        }
    }
}

/// Everything needed to turn specifications into node sets.
pub struct Resolver<'r, 'e, 'a> {
    pub registry: &'r Registry,
    pub evaluator: &'e Evaluator<'a>,
    /// Pages recognizers scan.
    pub pages: Vec<&'r Page>,
    /// Context for `xpath` specifications.
    pub roots: NodeSet,
}

impl Resolver<'_, '_, '_> {
    pub fn set(&self, spec: &SetSpec) -> Result<SemanticSet, RequestError> {
        match spec {
            SetSpec::Recognizer(name) => {
                let r = self.registry.get(name).ok_or_else(|| RequestError::UnknownRecognizer(name.clone()))?;
                Ok(recognize(r, self.pages.iter().copied(), None))
            }
            SetSpec::Xpath(src) => {
                let e = parse_expr(src, src)?;
                let members =
                    self.evaluator.evaluate(&e, &self.roots)?.into_node_set().ok_or_else(|| RequestError::NotANodeSet(src.clone()))?;
                Ok(SemanticSet { name: pretty_print(&e), members, provenance: Provenance::XPath(e) })
            }
        }
    }

    pub fn named(&self, spec: &NamedSetSpec) -> Result<SemanticSet, RequestError> {
        let mut s = self.set(&spec.spec)?;
        if let Some(name) = &spec.name {
            s.name = name.clone();
        }
        Ok(s)
    }

    pub fn query(&self, req: &Request, default_depth: usize) -> Result<PathQuery, RequestError> {
        let constraints = constraints(&req.constraints)?;
        let source = self.set(&req.source)?.members;
        let target = self.set(&req.target)?.members;
        let mode = match req.mode {
            ModeSpec::Exact => MatchMode::Exact,
            ModeSpec::Sample => MatchMode::Sample,
        };
        let mut q = PathQuery::new(source, target, mode).with_limit(req.limit);
        q.options.depth = req.depth.unwrap_or(default_depth);
        q.constraints = constraints;
        Ok(q)
    }
}

pub fn constraints(specs: &[ConstraintSpec]) -> Result<Vec<Constraint>, RequestError> {
    specs
        .iter()
        .map(|c| {
            Ok(match c {
                ConstraintSpec::WithPrefix(s) => Constraint::WithPrefix(Prefix::Expr(parse_expr(s, "withPrefix")?)),
                ConstraintSpec::DropPrefix(s) => Constraint::DropPrefix(parse_expr(s, "dropPrefix")?),
                ConstraintSpec::WithinPrefix(s) => Constraint::WithinPrefix(parse_expr(s, "withinPrefix")?),
                ConstraintSpec::ByAxis(names) => Constraint::ByAxis(
                    names
                        .iter()
                        .map(|n| Axis::from_name(n).ok_or_else(|| RequestError::UnknownAxis(n.clone())))
                        .collect::<Result<BTreeSet<_>, _>>()?,
                ),
            })
        })
        .collect()
}
