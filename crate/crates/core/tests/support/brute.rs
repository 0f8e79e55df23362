//! Cheapest path cost by uniform-cost search over every path in the
//! inference space, with steps evaluated by the naive evaluator.
//!
//! The space: up to `depth` steps on the five structural axes, node tests
//! drawn from the document's names plus `text()`, and at most one
//! predicate per step (`[k]` for k up to `max_position`, or `[@a='v']`
//! for an attribute pair present in the document), `predicates` in total.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use super::gen::{GStep, Kind, Pred, Test, Tree};
use super::naive;

/// `(multi-level steps, rank sum, length)`.
pub type Cost = (u32, u32, u32);

pub const AXES: [(&str, Cost); 5] = [
    ("child", (0, 1, 1)),
    ("following-sibling", (0, 2, 1)),
    ("preceding-sibling", (0, 2, 1)),
    ("descendant", (1, 3, 1)),
    ("parent", (0, 4, 1)),
];

/// The `@a` step inside `[@a='v']`.
pub const ATTRIBUTE_PREDICATE: Cost = (0, 1, 1);

fn add(a: Cost, b: Cost) -> Cost {
    (a.0 + b.0, a.1 + b.1, a.2 + b.2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Sample,
}

#[derive(Clone, Copy, Debug)]
pub struct Space {
    pub depth: usize,
    pub predicates: usize,
    pub max_position: usize,
}

impl Default for Space {
    fn default() -> Self {
        Space { depth: 6, predicates: 2, max_position: 20 }
    }
}

fn satisfied(mode: Mode, set: &BTreeSet<usize>, target: &BTreeSet<usize>) -> bool {
    match mode {
        Mode::Exact => set == target,
        Mode::Sample => target.is_subset(set),
    }
}

/// Successor sets of `set` with the cost of the step and the predicates used.
fn moves(t: &Tree, set: &BTreeSet<usize>, preds_left: usize, space: Space) -> Vec<(BTreeSet<usize>, Cost, usize)> {
    let element_names: BTreeSet<&str> = t.nodes.iter().filter(|n| n.kind == Kind::Element).map(|n| n.name.as_str()).collect();
    let pairs: BTreeSet<(&str, &str)> =
        t.nodes.iter().filter(|n| n.kind == Kind::Attribute).map(|n| (n.name.as_str(), n.value.as_str())).collect();
    let mut out = Vec::new();
    for (axis, cost) in AXES {
        let tests = element_names.iter().map(|n| Test::Name(n.to_string())).chain([Test::Text]);
        for test in tests {
            let plain = GStep { axis, test, preds: Vec::new() };
            let groups: Vec<Vec<usize>> = set.iter().map(|&c| naive::candidates(t, &plain, c)).collect();
            let base: BTreeSet<usize> = groups.iter().flatten().copied().collect();
            if base.is_empty() {
                continue;
            }
            if preds_left > 0 {
                let longest = groups.iter().map(Vec::len).max().unwrap_or(0).min(space.max_position);
                for k in 1..=longest {
                    let picked: BTreeSet<usize> = groups.iter().filter_map(|g| g.get(k - 1)).copied().collect();
                    if !picked.is_empty() && picked != base {
                        out.push((picked, cost, 1));
                    }
                }
                for &(a, v) in &pairs {
                    let s = GStep { axis, test: plain.test.clone(), preds: vec![Pred::AttrEq(a.into(), v.into())] };
                    let picked: BTreeSet<usize> = set.iter().flat_map(|&c| naive::step(t, &s, c)).collect();
                    if !picked.is_empty() && picked != base {
                        out.push((picked, add(cost, ATTRIBUTE_PREDICATE), 1));
                    }
                }
            }
            out.push((base, cost, 0));
        }
    }
    out
}

/// Cost of the cheapest satisfying path from `source`, or `None`.
pub fn min_cost(t: &Tree, source: &BTreeSet<usize>, target: &BTreeSet<usize>, mode: Mode, space: Space) -> Option<Cost> {
    type Entry = Reverse<(Cost, usize, usize, BTreeSet<usize>)>;
    let mut heap: BinaryHeap<Entry> = BinaryHeap::new();
    let mut settled: BTreeMap<BTreeSet<usize>, Vec<(usize, usize)>> = BTreeMap::new();
    heap.push(Reverse(((0, 0, 0), 0, 0, source.clone())));
    while let Some(Reverse((cost, steps, preds, set))) = heap.pop() {
        if satisfied(mode, &set, target) {
            return Some(cost);
        }
        let seen = settled.entry(set.clone()).or_default();
        if seen.iter().any(|&(s, p)| s <= steps && p <= preds) {
            continue;
        }
        seen.push((steps, preds));
        if steps == space.depth {
            continue;
        }
        for (next, c, p) in moves(t, &set, space.predicates - preds, space) {
            heap.push(Reverse((add(cost, c), steps + 1, preds + p, next)));
        }
    }
    None
}
