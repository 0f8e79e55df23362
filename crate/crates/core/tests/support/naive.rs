//! Set-at-a-time evaluator over [`Tree`], written from the XPath 1.0 axis
//! definitions and sharing no code with the crate.

use std::collections::BTreeSet;

use super::gen::{GExpr, GStep, Kind, Pred, Test, Tree};

pub fn is_reverse(axis: &str) -> bool {
    matches!(axis, "parent" | "ancestor" | "ancestor-or-self" | "preceding" | "preceding-sibling")
}

fn on_axis(t: &Tree, i: usize) -> bool {
    matches!(t.nodes[i].kind, Kind::Element | Kind::Text)
}

fn children(t: &Tree, i: usize) -> Vec<usize> {
    t.nodes[i].children.iter().copied().filter(|&c| t.nodes[c].kind != Kind::Comment).collect()
}

fn descendants(t: &Tree, i: usize, out: &mut Vec<usize>) {
    for c in children(t, i) {
        out.push(c);
        descendants(t, c, out);
    }
}

fn ancestors(t: &Tree, i: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut cur = t.nodes[i].parent;
    while let Some(p) = cur {
        out.push(p);
        cur = t.nodes[p].parent;
    }
    out
}

/// Nodes on `axis` from `i`, in document order.
pub fn axis(t: &Tree, axis: &str, i: usize) -> Vec<usize> {
    let n = &t.nodes[i];
    let mut out = match axis {
        "self" => vec![i],
        "child" => children(t, i),
        "attribute" => n.attrs.clone(),
        "parent" => n.parent.into_iter().collect(),
        "ancestor" => ancestors(t, i),
        "ancestor-or-self" => {
            let mut v = ancestors(t, i);
            v.push(i);
            v
        }
        "descendant" | "descendant-or-self" => {
            let mut v = Vec::new();
            if axis == "descendant-or-self" {
                v.push(i);
            }
            descendants(t, i, &mut v);
            v
        }
        "following-sibling" | "preceding-sibling" => match n.parent {
            Some(p) if on_axis(t, i) => {
                let sibs = children(t, p);
                let at = sibs.iter().position(|&s| s == i).unwrap();
                if axis == "following-sibling" {
                    sibs[at + 1..].to_vec()
                } else {
                    sibs[..at].to_vec()
                }
            }
            _ => Vec::new(),
        },
        "following" => {
            let mut inside = Vec::new();
            descendants(t, i, &mut inside);
            (i + 1..t.len()).filter(|j| on_axis(t, *j) && !inside.contains(j)).collect()
        }
        "preceding" => {
            let anc = ancestors(t, i);
            (0..i).filter(|j| on_axis(t, *j) && !anc.contains(j)).collect()
        }
        other => panic!("axis {other} is not modelled"),
    };
    out.sort_unstable();
    out
}

pub fn matches(t: &Tree, axis: &str, test: &Test, i: usize) -> bool {
    let n = &t.nodes[i];
    let principal = if axis == "attribute" { Kind::Attribute } else { Kind::Element };
    match test {
        Test::Name(name) => n.kind == principal && n.name == *name,
        Test::Star => n.kind == principal,
        Test::Text => n.kind == Kind::Text,
        Test::Node => n.kind != Kind::Comment,
    }
}

/// Whitespace-normalized string value.
pub fn string_value(t: &Tree, i: usize) -> String {
    let n = &t.nodes[i];
    let raw = match n.kind {
        Kind::Attribute => return n.value.clone(),
        Kind::Text | Kind::Comment => n.value.clone(),
        Kind::Element => {
            let mut s = String::new();
            collect_text(t, i, &mut s);
            s
        }
    };
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn collect_text(t: &Tree, i: usize, out: &mut String) {
    for &c in &t.nodes[i].children {
        match t.nodes[c].kind {
            Kind::Text => out.push_str(&t.nodes[c].value),
            Kind::Element => collect_text(t, c, out),
            _ => {}
        }
    }
}

fn attr_value<'t>(t: &'t Tree, i: usize, name: &str) -> Option<&'t str> {
    t.nodes[i].attrs.iter().map(|&a| &t.nodes[a]).find(|a| a.name == name).map(|a| a.value.as_str())
}

fn holds(t: &Tree, p: &Pred, node: usize, position: usize, size: usize) -> bool {
    match p {
        Pred::Pos(k) => position == *k,
        Pred::Last => position == size,
        Pred::HasAttr(a) => attr_value(t, node, a).is_some(),
        Pred::AttrEq(a, v) => attr_value(t, node, a) == Some(v.as_str()),
        Pred::HasChild(name) => children(t, node).iter().any(|&c| t.nodes[c].kind == Kind::Element && t.nodes[c].name == *name),
        Pred::TextEq(v) => string_value(t, node) == *v,
    }
}

/// Step results from one context node, in proximity order, before predicates.
pub fn candidates(t: &Tree, s: &GStep, from: usize) -> Vec<usize> {
    let mut list: Vec<usize> = axis(t, s.axis, from).into_iter().filter(|&n| matches(t, s.axis, &s.test, n)).collect();
    if is_reverse(s.axis) {
        list.reverse();
    }
    list
}

pub fn step(t: &Tree, s: &GStep, from: usize) -> Vec<usize> {
    let mut list = candidates(t, s, from);
    for p in &s.preds {
        let size = list.len();
        list = list.iter().enumerate().filter(|(k, &n)| holds(t, p, n, k + 1, size)).map(|(_, &n)| n).collect();
    }
    list
}

pub fn eval(t: &Tree, e: &GExpr, context: &BTreeSet<usize>) -> BTreeSet<usize> {
    match e {
        GExpr::Union(a, b) => {
            let mut out = eval(t, a, context);
            out.extend(eval(t, b, context));
            out
        }
        GExpr::Path { absolute, steps } => {
            let mut cur: BTreeSet<usize> = if *absolute && !context.is_empty() { [0].into() } else { context.clone() };
            for s in steps {
                cur = cur.iter().flat_map(|&c| step(t, s, c)).collect();
            }
            cur
        }
    }
}
