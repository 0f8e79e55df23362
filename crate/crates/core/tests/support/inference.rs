//! Random inference queries checked against the brute-force minimum.

use std::collections::BTreeSet;

use inferxpath_core::infer::{search, Cost, MatchMode, PathQuery};
use inferxpath_core::markup::parse_markup;
use inferxpath_core::xpath::{Axis, Expr, NodeTest};
use inferxpath_core::{parse, pretty_print, Corpus, Evaluator, NodeSet, Page};
use rand::rngs::StdRng;
use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};

use super::brute::{self, Mode, Space};
use super::gen::{self, GStep, Kind, Pred, Test, Tree};
use super::naive;

pub struct Case {
    pub tree: Tree,
    pub source: BTreeSet<usize>,
    pub target: BTreeSet<usize>,
    pub mode: Mode,
}

/// A tree of at most 25 nodes with a source and a target. Two thirds of the
/// targets are answers of random walks from the source; the rest are
/// arbitrary nodes.
pub fn case(seed: u64) -> Case {
    let mut rng = StdRng::seed_from_u64(seed);
    let tree = gen::tree(&mut rng, 25, false);
    let pickable: Vec<usize> = (0..tree.len()).filter(|&i| matches!(tree.nodes[i].kind, Kind::Element | Kind::Text)).collect();
    let k = rng.gen_range(1..=2);
    let source: BTreeSet<usize> = pickable.iter().copied().choose_multiple(&mut rng, k).into_iter().collect();
    let mode = if rng.gen_bool(0.5) { Mode::Exact } else { Mode::Sample };
    let mut target = BTreeSet::new();
    if rng.gen_range(0..3) < 2 {
        for _ in 0..20 {
            target = walk(&mut rng, &tree, &source);
            if !target.is_empty() {
                break;
            }
        }
    }
    if target.is_empty() {
        let k = rng.gen_range(1..=2);
        target = (0..tree.len()).filter(|&i| tree.nodes[i].kind != Kind::Comment).choose_multiple(&mut rng, k).into_iter().collect();
    }
    Case { tree, source, target, mode }
}

/// Answer of one to four random steps from the inference space.
fn walk(rng: &mut StdRng, tree: &Tree, source: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut cur = source.clone();
    for _ in 0..rng.gen_range(1..=4) {
        let (axis, _) = brute::AXES[rng.gen_range(0..brute::AXES.len())];
        let test = if rng.gen_bool(0.15) { Test::Text } else { Test::Name(gen::ELEMENT_NAMES[rng.gen_range(0..5)].into()) };
        let preds = match rng.gen_range(0..6) {
            0 => vec![Pred::Pos(rng.gen_range(1..=3))],
            1 => vec![Pred::AttrEq(gen::ATTRIBUTE_NAMES[rng.gen_range(0..2)].into(), gen::VALUES[rng.gen_range(0..3)].into())],
            _ => Vec::new(),
        };
        let step = GStep { axis, test, preds };
        cur = cur.iter().flat_map(|&c| naive::step(tree, &step, c)).collect();
    }
    cur
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub brute: Option<brute::Cost>,
    pub first: Option<brute::Cost>,
    pub emitted: usize,
    /// Problems other than a minimality mismatch.
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn minimal(&self) -> bool {
        self.brute == self.first
    }
}

/// Cost of a path made of single steps, each with at most one predicate,
/// recomputed from the axis table of the brute-force search.
pub fn independent_cost(e: &Expr) -> Option<brute::Cost> {
    let mut total = (0, 0, 0);
    for item in e.path_items() {
        let Expr::Step(s) = item else { return None };
        if s.axis == Axis::SelfAxis && s.test == NodeTest::AnyNode && s.predicates.is_empty() {
            continue;
        }
        let (_, c) = brute::AXES.iter().find(|(name, _)| *name == s.axis.name())?;
        total = (total.0 + c.0, total.1 + c.1, total.2 + c.2);
        for p in &s.predicates {
            if let Expr::Comparison(..) = p {
                let a = brute::ATTRIBUTE_PREDICATE;
                total = (total.0 + a.0, total.1 + a.1, total.2 + a.2);
            }
        }
    }
    Some(total)
}

fn as_tuple(c: Cost) -> brute::Cost {
    let [a, b, l] = c.as_array();
    (a, b, l)
}

/// Runs the search for up to `limit` paths and checks every emitted path.
pub fn run(c: &Case, limit: usize) -> Result<Outcome, String> {
    let url = "http://t.test/q.html";
    let markup = c.tree.to_markup();
    let doc = parse_markup(url, &markup).map_err(|e| e.to_string())?;
    let mut corpus = Corpus::new();
    let page = corpus.insert(Page::new(doc));
    let ids = |s: &BTreeSet<usize>| NodeSet::from_unsorted(s.iter().map(|&i| page.document.id(i as u32)).collect());
    let (source, target) = (ids(&c.source), ids(&c.target));
    let mode = match c.mode {
        Mode::Exact => MatchMode::Exact,
        Mode::Sample => MatchMode::Sample,
    };
    let ev = Evaluator::new(&corpus);
    let q = PathQuery::new(source.clone(), target.clone(), mode).with_limit(limit);
    let stream = search(&q, &ev).map_err(|e| e.to_string())?;
    let mut out = Outcome { brute: brute::min_cost(&c.tree, &c.source, &c.target, c.mode, Space::default()), ..Outcome::default() };
    let fresh = Evaluator::new(&corpus);
    let mut previous: Option<brute::Cost> = None;
    for item in stream {
        let p = item.map_err(|e| e.to_string())?;
        let printed = pretty_print(&p.expr);
        let cost = as_tuple(p.cost);
        out.emitted += 1;
        if out.first.is_none() {
            out.first = Some(cost);
        }
        let context = format!("{markup} {:?}->{:?} {:?}: {printed}", c.source, c.target, c.mode);
        if previous.is_some_and(|prev| prev > cost) {
            out.violations.push(format!("cost order: {context} {previous:?} then {cost:?}"));
        }
        previous = Some(cost);
        if independent_cost(&p.expr) != Some(cost) {
            out.violations.push(format!("reported cost {cost:?} but {:?}: {context}", independent_cost(&p.expr)));
        }
        let reparsed = parse(&printed).map_err(|e| format!("{printed}: {e}"))?;
        let answer = fresh.evaluate_node_set(&reparsed, &source).map_err(|e| e.to_string())?;
        let ok = match mode {
            MatchMode::Exact => answer == target,
            MatchMode::Sample => target.is_subset(&answer),
        };
        if !ok || !p.verified {
            out.violations.push(format!("unsound: {context}"));
        }
    }
    Ok(out)
}
