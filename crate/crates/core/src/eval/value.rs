use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::dom::NodeId;

/// Ordered, duplicate-free set of nodes: pages by URL, then document order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeSet(Vec<NodeId>);

impl NodeSet {
    pub fn new() -> Self {
        NodeSet(Vec::new())
    }

    pub fn single(id: NodeId) -> Self {
        NodeSet(alloc::vec![id])
    }

    pub fn from_unsorted(mut items: Vec<NodeId>) -> Self {
        items.sort_unstable();
        items.dedup();
        NodeSet(items)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, NodeId> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<NodeId> {
        self.0
    }

    pub fn first(&self) -> Option<&NodeId> {
        self.0.first()
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.0.binary_search(id).is_ok()
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().all(|n| other.contains(n))
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                core::cmp::Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    out.push(self.0[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        NodeSet(out)
    }

    /// True when the items are strictly increasing.
    pub fn is_canonical(items: &[NodeId]) -> bool {
        items.windows(2).all(|w| w[0] < w[1])
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        NodeSet::from_unsorted(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a NodeSet {
    type Item = &'a NodeId;
    type IntoIter = core::slice::Iter<'a, NodeId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    NodeSet(NodeSet),
    String(String),
    Number(f64),
    Boolean(bool),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::NodeSet(_) => "node-set",
            Value::String(_) => "string",
            Value::Number(_) => "number",
            Value::Boolean(_) => "boolean",
        }
    }

    pub fn as_node_set(&self) -> Option<&NodeSet> {
        match self {
            Value::NodeSet(ns) => Some(ns),
            _ => None,
        }
    }

    pub fn into_node_set(self) -> Option<NodeSet> {
        match self {
            Value::NodeSet(ns) => Some(ns),
            _ => None,
        }
    }
}

pub(crate) fn format_number(n: f64) -> String {
    let mut s = String::new();
    if n.is_nan() {
        s.push_str("NaN");
    } else if (-1e15..=1e15).contains(&n) && n == (n as i64) as f64 {
        let _ = write!(s, "{}", n as i64);
    } else {
        let _ = write!(s, "{n}");
    }
    s
}

pub(crate) fn parse_number(s: &str) -> f64 {
    let t = s.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit() || b == b'.' || b == b'-' || b == b'+') {
        return f64::NAN;
    }
    t.parse().unwrap_or(f64::NAN)
}
