use alloc::string::String;
use alloc::vec::Vec;

use super::{Ctx, EvalError, Evaluator, NodeSet, Value};
use crate::annotations::ImageTag;
use crate::dom::{NodeId, NodeKind};
use crate::xpath::{Expr, FnName};

impl Evaluator<'_> {
    pub(super) fn call(&self, name: FnName, args: &[Expr], ctx: Ctx<'_>) -> Result<Value, EvalError> {
        let arg = |i: usize| self.eval(&args[i], ctx);
        match name {
            FnName::Text => Ok(Value::String(self.string_value(ctx.node)?)),
            FnName::Position => Ok(Value::Number(ctx.position as f64)),
            FnName::Last => Ok(Value::Number(ctx.size as f64)),
            FnName::Contains | FnName::StartsWith => {
                let hay = self.to_string(&arg(0)?)?;
                let needle = self.to_string(&arg(1)?)?;
                Ok(Value::Boolean(if name == FnName::Contains { hay.contains(needle.as_str()) } else { hay.starts_with(needle.as_str()) }))
            }
            FnName::Concat => {
                let mut out = String::new();
                for a in args {
                    match self.eval(a, ctx)? {
                        Value::NodeSet(ns) => {
                            for id in &ns {
                                out.push_str(&self.string_value(id)?);
                            }
                        }
                        other => out.push_str(&self.to_string(&other)?),
                    }
                }
                Ok(Value::String(out))
            }
            FnName::Count => Ok(Value::Number(self.node_arg(name, arg(0)?)?.len() as f64)),
            FnName::Name => {
                let target = self.optional_target(name, args, ctx)?;
                Ok(Value::String(match target {
                    Some(id) => self.page(&id.page)?.document.node(id.index).name.clone(),
                    None => String::new(),
                }))
            }
            FnName::FontFamily | FnName::FontStyle => {
                let Some(id) = self.optional_target(name, args, ctx)? else {
                    return Ok(Value::String(String::new()));
                };
                let page = self.page(&id.page)?;
                let lookup = |i: u32| {
                    if name == FnName::FontFamily {
                        page.annotations.font_family(i)
                    } else {
                        page.annotations.font_style(i)
                    }
                };
                let found = core::iter::once(id.index).chain(page.document.ancestors(id.index)).find_map(lookup);
                Ok(Value::String(found.map(String::from).unwrap_or_default()))
            }
            FnName::Link => {
                let ns = self.node_arg(name, arg(0)?)?;
                let mut roots = Vec::new();
                for id in &ns {
                    let page = self.page(&id.page)?;
                    let node = page.document.node(id.index);
                    if !matches!(node.kind, NodeKind::Attribute | NodeKind::Text) {
                        continue;
                    }
                    if let Some(root) = self.follow_link(page.url(), node.value.trim())? {
                        roots.push(root);
                    }
                }
                Ok(Value::NodeSet(NodeSet::from_unsorted(roots)))
            }
            FnName::ImageTags => {
                let model = self.to_string(&arg(0)?)?;
                let ns = self.node_arg(name, arg(1)?)?;
                let mut words: Vec<String> = Vec::new();
                for id in &ns {
                    words.extend(self.tags_of(&model, id)?.into_iter().map(|t| t.tag));
                }
                Ok(Value::String(words.join(" ")))
            }
            FnName::ImageTag => {
                let model = self.to_string(&arg(0)?)?;
                let ns = self.node_arg(name, arg(1)?)?;
                let wanted = self.to_string(&arg(2)?)?;
                for id in &ns {
                    let hit = self.tags_of(&model, id)?.iter().any(|t| t.tag == wanted && t.confidence >= self.options.image_tag_threshold);
                    if hit {
                        return Ok(Value::Boolean(true));
                    }
                }
                Ok(Value::Boolean(false))
            }
        }
    }

    fn node_arg(&self, name: FnName, v: Value) -> Result<NodeSet, EvalError> {
        match v {
            Value::NodeSet(ns) => Ok(ns),
            other => Err(EvalError::TypeError(alloc::format!("{name}() expects a node-set, got a {}", other.kind()))),
        }
    }

    /// The context node, or the first node of the optional node-set argument.
    fn optional_target(&self, name: FnName, args: &[Expr], ctx: Ctx<'_>) -> Result<Option<NodeId>, EvalError> {
        match args.first() {
            None => Ok(Some(ctx.node.clone())),
            Some(a) => Ok(self.node_arg(name, self.eval(a, ctx)?)?.first().cloned()),
        }
    }

    /// Tags of an `img` node, most confident first.
    fn tags_of(&self, model: &str, id: &NodeId) -> Result<Vec<ImageTag>, EvalError> {
        let page = self.page(&id.page)?;
        if !page.document.node(id.index).is_element_named("img") {
            return Ok(Vec::new());
        }
        let mut tags = page.annotations.image_tags(model, id.index).to_vec();
        tags.sort_by(|a, b| b.confidence.total_cmp(&a.confidence).then_with(|| a.tag.cmp(&b.tag)));
        Ok(tags)
    }
}
