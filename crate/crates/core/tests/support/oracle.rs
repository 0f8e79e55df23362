//! Single randomized cases comparing the crate against the independent oracles.

use std::collections::BTreeSet;

use inferxpath_core::annotations::{Annotations, BoundingBox, NodeAddress};
use inferxpath_core::geometry::{GeometryIndex, VisualRelation};
use inferxpath_core::markup::parse_markup;
use inferxpath_core::xpath::{Axis, NodeTest};
use inferxpath_core::{parse, Corpus, EvalOptions, Evaluator, NodeSet, Page};
use rand::rngs::StdRng;
use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};

use super::gen::{self, Rect};
use super::naive;

const URL: &str = "http://t.test/p.html";

/// Expressions compared per evaluator case.
pub const EXPRESSIONS_PER_CASE: usize = 4;

/// A random tree of at most 40 nodes and four random expressions of at most
/// five steps, evaluated by the crate and by the naive evaluator. Returns how
/// many answers were non-empty.
pub fn evaluator_case(seed: u64) -> Result<usize, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let tree = gen::tree(&mut rng, 40, true);
    let markup = tree.to_markup();
    let doc = parse_markup(URL, &markup).map_err(|e| format!("{markup}: {e}"))?;
    if doc.len() != tree.len() {
        return Err(format!("{markup}: {} nodes parsed, {} generated", doc.len(), tree.len()));
    }
    let mut c = Corpus::new();
    let page = c.insert(Page::new(doc));
    let ev = Evaluator::new(&c);
    let context: BTreeSet<usize> = if rng.gen_bool(0.5) {
        [0].into()
    } else {
        let k = rng.gen_range(1..=3);
        (0..tree.len()).filter(|&i| tree.nodes[i].kind != gen::Kind::Comment).choose_multiple(&mut rng, k).into_iter().collect()
    };
    let ctx = NodeSet::from_unsorted(context.iter().map(|&i| page.document.id(i as u32)).collect());
    let mut non_empty = 0;
    for _ in 0..EXPRESSIONS_PER_CASE {
        let e = gen::expr(&mut rng, 5);
        let src = e.to_source();
        let parsed = parse(&src).map_err(|err| format!("{src}: {err}"))?;
        let answer = ev.evaluate_node_set(&parsed, &ctx).map_err(|err| format!("{src}: {err}"))?;
        if !NodeSet::is_canonical(answer.as_slice()) {
            return Err(format!("{src}: answer not in canonical order"));
        }
        let got: BTreeSet<usize> = answer.iter().map(|id| id.index as usize).collect();
        let want = naive::eval(&tree, &e, &context);
        if got != want {
            return Err(format!("{markup}\n  {src} from {context:?}\n  evaluator {got:?}\n  naive     {want:?}"));
        }
        non_empty += usize::from(!want.is_empty());
    }
    Ok(non_empty)
}

pub const VISUAL_AXES: [(Axis, VisualRelation); 6] = [
    (Axis::ContainedIn, VisualRelation::ContainedIn),
    (Axis::Overlaps, VisualRelation::Overlaps),
    (Axis::Right, VisualRelation::Right),
    (Axis::Left, VisualRelation::Left),
    (Axis::Up, VisualRelation::Up),
    (Axis::Down, VisualRelation::Down),
];

/// Candidate `b` stands in relation `axis` to query box `a`.
pub fn related(axis: Axis, a: &Rect, b: &Rect, eps: f64) -> bool {
    let (ax0, ay0, ax1, ay1) = *a;
    let (bx0, by0, bx1, by1) = *b;
    match axis {
        Axis::ContainedIn => bx0 <= ax0 && by0 <= ay0 && bx1 >= ax1 && by1 >= ay1,
        Axis::Overlaps => ax1.min(bx1) > ax0.max(bx0) && ay1.min(by1) > ay0.max(by0),
        Axis::Right => bx0 >= ax1 - eps,
        Axis::Left => bx1 <= ax0 + eps,
        Axis::Down => by0 >= ay1 - eps,
        Axis::Up => by1 <= ay0 + eps,
        other => unreachable!("{other:?} is not visual"),
    }
}

/// A flat page `<r><b/>...</r>` where node `i + 1` carries box `i`, followed
/// by `unboxed` elements without a box.
pub fn boxed_page(rects: &[Rect], unboxed: usize) -> Corpus {
    let markup = format!("<r>{}</r>", "<b></b>".repeat(rects.len() + unboxed));
    let doc = parse_markup(URL, &markup).expect("flat page parses");
    let mut builder = Annotations::builder(&doc);
    for (i, &(x0, y0, x1, y1)) in rects.iter().enumerate() {
        builder.add_box(&NodeAddress::index(i as u32 + 1), BoundingBox::new(x0, y0, x1, y1).unwrap()).unwrap();
    }
    let ann = builder.finish();
    let mut c = Corpus::new();
    c.insert(Page::with_annotations(doc, ann));
    c
}

/// One random layout of at most 50 boxes: every visual axis from every box,
/// through the index directly and through the evaluator, at ε 0 and 0.5,
/// against the pairwise scan.
pub fn visual_case(seed: u64) -> Result<usize, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let rects = gen::boxes(&mut rng, 50);
    let c = boxed_page(&rects, 1);
    let page = c.get(URL).expect("inserted");
    let bbox = |r: &Rect| BoundingBox::new(r.0, r.1, r.2, r.3).unwrap();
    let index = GeometryIndex::build(rects.iter().enumerate().map(|(i, r)| (i as u32 + 1, bbox(r))));
    for eps in [0.0, 0.5] {
        let ev = Evaluator::with_options(&c, EvalOptions { epsilon: eps, ..EvalOptions::default() });
        for (axis, relation) in VISUAL_AXES {
            for (i, a) in rects.iter().enumerate() {
                let want: Vec<u32> =
                    (0..rects.len()).filter(|&j| j != i && related(axis, a, &rects[j], eps)).map(|j| j as u32 + 1).collect();
                let direct = index.query(relation, &bbox(a), eps, Some(i as u32 + 1));
                let through = ev.axis_step(axis, &NodeTest::AnyNode, &page.document.id(i as u32 + 1)).map_err(|e| e.to_string())?;
                let through: Vec<u32> = through.iter().map(|id| id.index).collect();
                if direct != want || through != want {
                    return Err(format!("{axis:?} of {a:?} at ε={eps}: index {direct:?}, evaluator {through:?}, scan {want:?}"));
                }
            }
            let unboxed = page.document.id(rects.len() as u32 + 1);
            if !ev.axis_step(axis, &NodeTest::AnyNode, &unboxed).map_err(|e| e.to_string())?.is_empty() {
                return Err(format!("{axis:?} from a node without a box is not empty"));
            }
        }
    }
    Ok(rects.len())
}
