use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    Child,
    Parent,
    SelfAxis,
    Attribute,
    Descendant,
    DescendantOrSelf,
    Ancestor,
    AncestorOrSelf,
    FollowingSibling,
    PrecedingSibling,
    Following,
    Preceding,
    Row,
    Column,
    ContainedIn,
    Overlaps,
    Right,
    Left,
    Up,
    Down,
    Link,
}

impl Axis {
    pub const ALL: [Axis; 21] = [
        Axis::Child,
        Axis::Parent,
        Axis::SelfAxis,
        Axis::Attribute,
        Axis::Descendant,
        Axis::DescendantOrSelf,
        Axis::Ancestor,
        Axis::AncestorOrSelf,
        Axis::FollowingSibling,
        Axis::PrecedingSibling,
        Axis::Following,
        Axis::Preceding,
        Axis::Row,
        Axis::Column,
        Axis::ContainedIn,
        Axis::Overlaps,
        Axis::Right,
        Axis::Left,
        Axis::Up,
        Axis::Down,
        Axis::Link,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Child => "child",
            Axis::Parent => "parent",
            Axis::SelfAxis => "self",
            Axis::Attribute => "attribute",
            Axis::Descendant => "descendant",
            Axis::DescendantOrSelf => "descendant-or-self",
            Axis::Ancestor => "ancestor",
            Axis::AncestorOrSelf => "ancestor-or-self",
            Axis::FollowingSibling => "following-sibling",
            Axis::PrecedingSibling => "preceding-sibling",
            Axis::Following => "following",
            Axis::Preceding => "preceding",
            Axis::Row => "row",
            Axis::Column => "column",
            Axis::ContainedIn => "contained-in",
            Axis::Overlaps => "overlaps",
            Axis::Right => "right",
            Axis::Left => "left",
            Axis::Up => "up",
            Axis::Down => "down",
            Axis::Link => "link",
        }
    }

    pub fn from_name(name: &str) -> Option<Axis> {
        Axis::ALL.iter().copied().find(|a| a.name() == name)
    }

    /// Reverse axes count proximity positions backwards from the context node.
    pub fn is_reverse(self) -> bool {
        matches!(self, Axis::Parent | Axis::Ancestor | Axis::AncestorOrSelf | Axis::Preceding | Axis::PrecedingSibling)
    }

    /// Axes that can move more than one tree level in a single step.
    pub fn is_multi_level(self) -> bool {
        matches!(
            self,
            Axis::Descendant | Axis::DescendantOrSelf | Axis::Ancestor | Axis::AncestorOrSelf | Axis::Following | Axis::Preceding
        )
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodeTest {
    /// `*`: any node of the axis' principal type.
    AnyElement,
    /// A tag name, or an attribute name on the attribute axis.
    Name(String),
    /// `text()`
    Text,
    /// `node()`
    AnyNode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FnName {
    Text,
    Contains,
    StartsWith,
    Concat,
    Count,
    Position,
    Last,
    Name,
    Link,
    FontFamily,
    FontStyle,
    ImageTags,
    ImageTag,
}

impl FnName {
    pub const ALL: [FnName; 13] = [
        FnName::Text,
        FnName::Contains,
        FnName::StartsWith,
        FnName::Concat,
        FnName::Count,
        FnName::Position,
        FnName::Last,
        FnName::Name,
        FnName::Link,
        FnName::FontFamily,
        FnName::FontStyle,
        FnName::ImageTags,
        FnName::ImageTag,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FnName::Text => "text",
            FnName::Contains => "contains",
            FnName::StartsWith => "starts-with",
            FnName::Concat => "concat",
            FnName::Count => "count",
            FnName::Position => "position",
            FnName::Last => "last",
            FnName::Name => "name",
            FnName::Link => "link",
            FnName::FontFamily => "font-family",
            FnName::FontStyle => "font-style",
            FnName::ImageTags => "imagetags",
            FnName::ImageTag => "imagetag",
        }
    }

    pub fn from_name(name: &str) -> Option<FnName> {
        FnName::ALL.iter().copied().find(|f| f.name() == name)
    }

    /// Accepted argument counts, inclusive; `None` upper bound is unbounded.
    pub fn arity(self) -> (usize, Option<usize>) {
        match self {
            FnName::Text | FnName::Position | FnName::Last => (0, Some(0)),
            FnName::Name | FnName::FontFamily | FnName::FontStyle => (0, Some(1)),
            FnName::Contains | FnName::StartsWith => (2, Some(2)),
            FnName::Concat => (1, None),
            FnName::Count | FnName::Link => (1, Some(1)),
            FnName::ImageTags => (2, Some(2)),
            FnName::ImageTag => (3, Some(3)),
        }
    }
}

impl fmt::Display for FnName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    /// `=`
    Eq,
    /// `==`, same meaning as `=`
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::EqEq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    Str(String),
    Num(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub axis: Axis,
    pub test: NodeTest,
    pub predicates: Vec<Expr>,
}

impl Step {
    pub fn new(axis: Axis, test: NodeTest) -> Self {
        Step { axis, test, predicates: Vec::new() }
    }

    pub fn named(axis: Axis, name: &str) -> Self {
        Step::new(axis, NodeTest::Name(name.into()))
    }

    pub fn with_predicate(mut self, predicate: Expr) -> Self {
        self.predicates.push(predicate);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Step(Step),
    /// `a/b`
    Seq(Box<Expr>, Box<Expr>),
    /// `a|b`
    Union(Box<Expr>, Box<Expr>),
    /// Leading `/`: the root element of the context node's page.
    Root,
    FnCall(FnName, Vec<Expr>),
    Literal(Literal),
    Comparison(CmpOp, Box<Expr>, Box<Expr>),
    VarRef(String),
}

impl Expr {
    pub fn step(axis: Axis, test: NodeTest) -> Expr {
        Expr::Step(Step::new(axis, test))
    }

    pub fn seq(a: Expr, b: Expr) -> Expr {
        Expr::Seq(Box::new(a), Box::new(b))
    }

    pub fn union(a: Expr, b: Expr) -> Expr {
        Expr::Union(Box::new(a), Box::new(b))
    }

    pub fn compare(op: CmpOp, a: Expr, b: Expr) -> Expr {
        Expr::Comparison(op, Box::new(a), Box::new(b))
    }

    pub fn string(s: &str) -> Expr {
        Expr::Literal(Literal::Str(s.into()))
    }

    pub fn number(n: f64) -> Expr {
        Expr::Literal(Literal::Num(n))
    }

    /// Right-nested `Seq` chain from path items; `None` for an empty list.
    pub fn path<I>(items: I) -> Option<Expr>
    where
        I: IntoIterator<Item = Expr>,
        I::IntoIter: DoubleEndedIterator,
    {
        let mut it = items.into_iter().rev();
        let last = it.next()?;
        Some(it.fold(last, |acc, item| Expr::seq(item, acc)))
    }

    /// Items of the right spine of a `Seq` chain.
    pub fn path_items(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Expr::Seq(a, b) = cur {
            out.push(&**a);
            cur = b;
        }
        out.push(cur);
        out
    }

    /// Number of `Step` nodes, including those inside predicates and arguments.
    pub fn size(&self) -> usize {
        match self {
            Expr::Step(s) => 1 + s.predicates.iter().map(Expr::size).sum::<usize>(),
            Expr::Seq(a, b) | Expr::Union(a, b) | Expr::Comparison(_, a, b) => a.size() + b.size(),
            Expr::FnCall(_, args) => args.iter().map(Expr::size).sum(),
            Expr::Root | Expr::Literal(_) | Expr::VarRef(_) => 0,
        }
    }

    /// Calls `f` on every step, predicates and arguments included.
    pub fn for_each_step<F: FnMut(&Step)>(&self, f: &mut F) {
        match self {
            Expr::Step(s) => {
                f(s);
                for p in &s.predicates {
                    p.for_each_step(f);
                }
            }
            Expr::Seq(a, b) | Expr::Union(a, b) | Expr::Comparison(_, a, b) => {
                a.for_each_step(f);
                b.for_each_step(f);
            }
            Expr::FnCall(_, args) => {
                for a in args {
                    a.for_each_step(f);
                }
            }
            Expr::Root | Expr::Literal(_) | Expr::VarRef(_) => {}
        }
    }

    pub fn uses_links(&self) -> bool {
        match self {
            Expr::Step(s) => s.axis == Axis::Link || s.predicates.iter().any(Expr::uses_links),
            Expr::Seq(a, b) | Expr::Union(a, b) | Expr::Comparison(_, a, b) => a.uses_links() || b.uses_links(),
            Expr::FnCall(name, args) => *name == FnName::Link || args.iter().any(Expr::uses_links),
            Expr::Root | Expr::Literal(_) | Expr::VarRef(_) => false,
        }
    }
}

/// `exprSize`: the step count of an expression.
pub fn expr_size(e: &Expr) -> usize {
    e.size()
}
