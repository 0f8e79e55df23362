//! Random documents, expressions and box layouts built without the crate
//! under test.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const ELEMENT_NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];
pub const ATTRIBUTE_NAMES: [&str; 2] = ["id", "k"];
pub const VALUES: [&str; 3] = ["x", "y", "z"];
pub const WORDS: [&str; 4] = ["x", "t1", "t2", "t3"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Element,
    Attribute,
    Text,
    Comment,
}

#[derive(Clone, Debug)]
pub struct TNode {
    pub kind: Kind,
    pub name: String,
    pub value: String,
    pub parent: Option<usize>,
    pub attrs: Vec<usize>,
    pub children: Vec<usize>,
}

/// A tree numbered in pre-order: an element, its attributes, then its children.
#[derive(Clone, Debug)]
pub struct Tree {
    pub nodes: Vec<TNode>,
}

impl Tree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn to_markup(&self) -> String {
        let mut out = String::new();
        self.write(0, &mut out);
        out
    }

    fn write(&self, i: usize, out: &mut String) {
        let n = &self.nodes[i];
        match n.kind {
            Kind::Element => {
                out.push('<');
                out.push_str(&n.name);
                for &a in &n.attrs {
                    let a = &self.nodes[a];
                    out.push_str(&format!(" {}=\"{}\"", a.name, a.value));
                }
                out.push('>');
                for &c in &n.children {
                    self.write(c, out);
                }
                out.push_str(&format!("</{}>", n.name));
            }
            Kind::Text => out.push_str(&n.value),
            Kind::Comment => out.push_str(&format!("<!--{}-->", n.value)),
            Kind::Attribute => unreachable!("written with the element"),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.nodes[i].kind == Kind::Element)
    }
}

/// Shape of a random tree before numbering.
struct Proto {
    kind: Kind,
    name: String,
    value: String,
    attrs: Vec<(String, String)>,
    children: Vec<Proto>,
}

/// A random tree with at most `max_nodes` nodes of all kinds. Adjacent text
/// siblings are avoided because markup readers merge them.
pub fn tree(rng: &mut StdRng, max_nodes: usize, comments: bool) -> Tree {
    let mut budget = max_nodes.max(1) - 1;
    let mut root = element(rng, &mut budget);
    grow(rng, &mut root, &mut budget, 0, comments);
    let mut t = Tree { nodes: Vec::new() };
    number(&root, None, &mut t);
    t
}

fn element(rng: &mut StdRng, budget: &mut usize) -> Proto {
    let mut attrs = Vec::new();
    for name in ATTRIBUTE_NAMES {
        if *budget > 0 && rng.gen_bool(0.3) {
            attrs.push((name.to_owned(), VALUES.choose(rng).unwrap().to_string()));
            *budget -= 1;
        }
    }
    Proto { kind: Kind::Element, name: ELEMENT_NAMES.choose(rng).unwrap().to_string(), value: String::new(), attrs, children: Vec::new() }
}

fn grow(rng: &mut StdRng, p: &mut Proto, budget: &mut usize, depth: usize, comments: bool) {
    let wanted = if depth < 2 { rng.gen_range(2..=4usize) } else { rng.gen_range(0..=3usize) };
    for _ in 0..wanted {
        if *budget == 0 {
            return;
        }
        let last_is_text = p.children.last().is_some_and(|c| c.kind == Kind::Text);
        let roll: f64 = rng.gen();
        if roll < 0.25 && !last_is_text {
            *budget -= 1;
            let w = WORDS.choose(rng).unwrap();
            let value = if rng.gen_bool(0.2) { format!(" {w} ") } else { w.to_string() };
            p.children.push(Proto { kind: Kind::Text, name: String::new(), value, attrs: Vec::new(), children: Vec::new() });
        } else if comments && roll < 0.3 {
            *budget -= 1;
            p.children.push(Proto {
                kind: Kind::Comment,
                name: String::new(),
                value: "note".into(),
                attrs: Vec::new(),
                children: Vec::new(),
            });
        } else {
            *budget -= 1;
            let mut child = element(rng, budget);
            if depth < 5 {
                grow(rng, &mut child, budget, depth + 1, comments);
            }
            p.children.push(child);
        }
    }
}

fn number(p: &Proto, parent: Option<usize>, t: &mut Tree) -> usize {
    let idx = t.nodes.len();
    t.nodes.push(TNode { kind: p.kind, name: p.name.clone(), value: p.value.clone(), parent, attrs: Vec::new(), children: Vec::new() });
    for (k, v) in &p.attrs {
        let a = t.nodes.len();
        t.nodes.push(TNode {
            kind: Kind::Attribute,
            name: k.clone(),
            value: v.clone(),
            parent: Some(idx),
            attrs: Vec::new(),
            children: Vec::new(),
        });
        t.nodes[idx].attrs.push(a);
    }
    for c in &p.children {
        let ci = number(c, Some(idx), t);
        t.nodes[idx].children.push(ci);
    }
    idx
}

pub const TREE_AXES: [&str; 12] = [
    "child",
    "descendant",
    "parent",
    "ancestor",
    "following-sibling",
    "preceding-sibling",
    "following",
    "preceding",
    "attribute",
    "self",
    "descendant-or-self",
    "ancestor-or-self",
];

#[derive(Clone, Debug, PartialEq)]
pub enum Test {
    Name(String),
    Star,
    Text,
    Node,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Pred {
    Pos(usize),
    Last,
    HasAttr(String),
    AttrEq(String, String),
    HasChild(String),
    TextEq(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GStep {
    pub axis: &'static str,
    pub test: Test,
    pub preds: Vec<Pred>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GExpr {
    Path { absolute: bool, steps: Vec<GStep> },
    Union(Box<GExpr>, Box<GExpr>),
}

impl GExpr {
    /// Unabbreviated source text.
    pub fn to_source(&self) -> String {
        match self {
            GExpr::Union(a, b) => format!("{} | {}", a.to_source(), b.to_source()),
            GExpr::Path { absolute, steps } => {
                let body: Vec<String> = steps.iter().map(step_source).collect();
                format!("{}{}", if *absolute { "/" } else { "" }, body.join("/"))
            }
        }
    }
}

fn step_source(s: &GStep) -> String {
    let test = match &s.test {
        Test::Name(n) => n.clone(),
        Test::Star => "*".into(),
        Test::Text => "text()".into(),
        Test::Node => "node()".into(),
    };
    let mut out = format!("{}::{}", s.axis, test);
    for p in &s.preds {
        out.push_str(&match p {
            Pred::Pos(k) => format!("[{k}]"),
            Pred::Last => "[last()]".into(),
            Pred::HasAttr(a) => format!("[@{a}]"),
            Pred::AttrEq(a, v) => format!("[@{a}='{v}']"),
            Pred::HasChild(n) => format!("[child::{n}]"),
            Pred::TextEq(v) => format!("[text()='{v}']"),
        });
    }
    out
}

/// A random path (sometimes a union of two) with at most `max_steps` location steps.
pub fn expr(rng: &mut StdRng, max_steps: usize) -> GExpr {
    let path = |rng: &mut StdRng| {
        let upper = rng.gen_range(1..=max_steps.max(1));
        let n = rng.gen_range(1..=upper);
        GExpr::Path { absolute: rng.gen_bool(0.3), steps: (0..n).map(|_| step(rng)).collect() }
    };
    if rng.gen_bool(0.15) {
        GExpr::Union(Box::new(path(rng)), Box::new(path(rng)))
    } else {
        path(rng)
    }
}

fn step(rng: &mut StdRng) -> GStep {
    // productive axes are drawn more often so that answers are rarely empty
    let axis = if rng.gen_bool(0.4) {
        *["child", "descendant", "descendant-or-self", "self"].choose(rng).unwrap()
    } else {
        *TREE_AXES.choose(rng).unwrap()
    };
    let test = match rng.gen_range(0..10) {
        0..=3 if axis == "attribute" => Test::Name(ATTRIBUTE_NAMES.choose(rng).unwrap().to_string()),
        0..=3 => Test::Name(ELEMENT_NAMES.choose(rng).unwrap().to_string()),
        4..=6 => Test::Star,
        7 => Test::Text,
        _ => Test::Node,
    };
    let mut preds = Vec::new();
    while preds.len() < 2 && rng.gen_bool(0.25) {
        preds.push(match rng.gen_range(0..6) {
            0 => Pred::Pos(rng.gen_range(1..=3)),
            1 => Pred::Last,
            2 => Pred::HasAttr(ATTRIBUTE_NAMES.choose(rng).unwrap().to_string()),
            3 => Pred::AttrEq(ATTRIBUTE_NAMES.choose(rng).unwrap().to_string(), VALUES.choose(rng).unwrap().to_string()),
            4 => Pred::HasChild(ELEMENT_NAMES.choose(rng).unwrap().to_string()),
            _ => Pred::TextEq(WORDS.choose(rng).unwrap().to_string()),
        });
    }
    GStep { axis, test, preds }
}

/// Axis-aligned box as `(x0, y0, x1, y1)`.
pub type Rect = (f64, f64, f64, f64);

/// Boxes on a coarse grid so that shared edges and exact containment occur often.
pub fn boxes(rng: &mut StdRng, max: usize) -> Vec<Rect> {
    let n = rng.gen_range(1..=max);
    (0..n)
        .map(|_| {
            let x0 = rng.gen_range(0..20) as f64 * 5.0 + if rng.gen_bool(0.2) { 0.25 } else { 0.0 };
            let y0 = rng.gen_range(0..20) as f64 * 5.0;
            let w = rng.gen_range(0..8) as f64 * 5.0;
            let h = rng.gen_range(0..8) as f64 * 5.0 + if rng.gen_bool(0.2) { 0.5 } else { 0.0 };
            (x0, y0, x0 + w, y0 + h)
        })
        .collect()
}
