//! Tree and table axes over a single document. Results are in document order.

use alloc::vec::Vec;

use crate::dom::{Document, NodeKind};
use crate::xpath::{Axis, NodeTest};

fn on_axis(doc: &Document, idx: u32) -> bool {
    !matches!(doc.node(idx).kind, NodeKind::Attribute | NodeKind::Comment)
}

/// Nodes on a tree axis from `from`. Returns `None` for non-tree axes.
pub(crate) fn tree_axis(doc: &Document, axis: Axis, from: u32) -> Option<Vec<u32>> {
    let node = doc.node(from);
    let out = match axis {
        Axis::Child => doc.visible_children(from).collect(),
        Axis::Attribute => node.attributes.clone(),
        Axis::SelfAxis => alloc::vec![from],
        Axis::Parent => node.parent.into_iter().collect(),
        Axis::Ancestor | Axis::AncestorOrSelf => {
            let mut v: Vec<u32> = doc.ancestors(from).collect();
            v.reverse();
            if axis == Axis::AncestorOrSelf {
                v.push(from);
            }
            v
        }
        Axis::Descendant | Axis::DescendantOrSelf => {
            let mut v = Vec::new();
            if axis == Axis::DescendantOrSelf {
                v.push(from);
            }
            v.extend(doc.descendant_range(from).filter(|&j| on_axis(doc, j)));
            v
        }
        Axis::FollowingSibling | Axis::PrecedingSibling => match node.parent {
            Some(p) if on_axis(doc, from) => {
                doc.visible_children(p).filter(|&s| if axis == Axis::FollowingSibling { s > from } else { s < from }).collect()
            }
            _ => Vec::new(),
        },
        Axis::Following => {
            let start = doc.descendant_range(from).end;
            (start..doc.len() as u32).filter(|&j| on_axis(doc, j)).collect()
        }
        Axis::Preceding => (0..from).filter(|&j| on_axis(doc, j) && !doc.is_ancestor_or_self(j, from)).collect(),
        Axis::Row => row(doc, from),
        Axis::Column => column(doc, from),
        _ => return None,
    };
    Some(out)
}

pub(crate) fn matches_test(doc: &Document, idx: u32, axis: Axis, test: &NodeTest) -> bool {
    let node = doc.node(idx);
    let principal = if axis == Axis::Attribute { NodeKind::Attribute } else { NodeKind::Element };
    match test {
        NodeTest::AnyElement => node.kind == principal,
        NodeTest::Name(n) => node.kind == principal && node.name.eq_ignore_ascii_case(n),
        NodeTest::Text => node.kind == NodeKind::Text,
        NodeTest::AnyNode => node.kind != NodeKind::Comment,
    }
}

fn is_cell(doc: &Document, idx: u32) -> bool {
    let n = doc.node(idx);
    n.is_element_named("td") || n.is_element_named("th")
}

fn nearest_table(doc: &Document, idx: u32) -> Option<u32> {
    doc.ancestors(idx).find(|&a| doc.node(a).is_element_named("table"))
}

/// Cells of a row container, not descending into nested tables.
fn cells_of_row(doc: &Document, row: u32) -> Vec<u32> {
    doc.visible_children(row).filter(|&c| is_cell(doc, c)).collect()
}

fn row(doc: &Document, from: u32) -> Vec<u32> {
    if is_cell(doc, from) {
        match doc.node(from).parent {
            Some(p) => cells_of_row(doc, p),
            None => alloc::vec![from],
        }
    } else if doc.node(from).is_element_named("tr") {
        cells_of_row(doc, from)
    } else {
        Vec::new()
    }
}

fn colspan(doc: &Document, cell: u32) -> u32 {
    doc.attribute(cell, "colspan").and_then(|v| v.trim().parse::<u32>().ok()).filter(|&n| n >= 1).map_or(1, |n| n.min(1000))
}

/// Half-open grid column interval of a cell.
pub(crate) fn column_interval(doc: &Document, cell: u32) -> (u32, u32) {
    let start = match doc.node(cell).parent {
        Some(p) => doc.visible_children(p).take_while(|&s| s != cell).filter(|&s| is_cell(doc, s)).map(|s| colspan(doc, s)).sum(),
        None => 0,
    };
    (start, start + colspan(doc, cell))
}

fn column(doc: &Document, from: u32) -> Vec<u32> {
    if !is_cell(doc, from) {
        return Vec::new();
    }
    let table = nearest_table(doc, from);
    let (a0, a1) = column_interval(doc, from);
    let scope = match table {
        Some(t) => doc.descendant_range(t),
        None => 0..doc.len() as u32,
    };
    scope
        .filter(|&c| is_cell(doc, c) && nearest_table(doc, c) == table)
        .filter(|&c| {
            let (b0, b1) = column_interval(doc, c);
            a0 < b1 && b0 < a1
        })
        .collect()
}
