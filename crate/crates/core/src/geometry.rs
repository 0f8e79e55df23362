//! Static packed R-tree over node bounding boxes.
//!
//! Every visual axis is a range query: the per-leaf predicate decides
//! membership and a weaker predicate on a subtree's bounding rectangle
//! prunes whole subtrees.

use alloc::vec::Vec;

use crate::annotations::BoundingBox;

const FANOUT: usize = 8;

/// Visual relation of a candidate box `b` to the query box `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VisualRelation {
    /// `a` lies inside `b`.
    ContainedIn,
    Overlaps,
    Right,
    Left,
    Up,
    Down,
}

impl VisualRelation {
    pub const ALL: [VisualRelation; 6] = [
        VisualRelation::ContainedIn,
        VisualRelation::Overlaps,
        VisualRelation::Right,
        VisualRelation::Left,
        VisualRelation::Up,
        VisualRelation::Down,
    ];

    /// Pairwise predicate: does candidate `b` stand in this relation to `a`?
    pub fn holds(self, a: &BoundingBox, b: &BoundingBox, epsilon: f64) -> bool {
        match self {
            VisualRelation::ContainedIn => b.contains(a),
            VisualRelation::Overlaps => a.overlaps(b),
            VisualRelation::Right => b.x0 >= a.x1 - epsilon,
            VisualRelation::Left => b.x1 <= a.x0 + epsilon,
            VisualRelation::Down => b.y0 >= a.y1 - epsilon,
            VisualRelation::Up => b.y1 <= a.y0 + epsilon,
        }
    }

    /// Necessary condition on the bounding rectangle of a group of boxes.
    fn may_hold(self, a: &BoundingBox, mbr: &BoundingBox, epsilon: f64) -> bool {
        match self {
            VisualRelation::ContainedIn => mbr.contains(a),
            VisualRelation::Overlaps => a.overlaps(mbr),
            VisualRelation::Right => mbr.x1 >= a.x1 - epsilon,
            VisualRelation::Left => mbr.x0 <= a.x0 + epsilon,
            VisualRelation::Down => mbr.y1 >= a.y1 - epsilon,
            VisualRelation::Up => mbr.y0 <= a.y0 + epsilon,
        }
    }
}

#[derive(Clone, Debug)]
struct TreeNode {
    mbr: BoundingBox,
    // children are entries when leaf, otherwise nodes of the level below
    start: usize,
    end: usize,
}

#[derive(Clone, Debug, Default)]
pub struct GeometryIndex {
    entries: Vec<(BoundingBox, u32)>,
    /// levels[0] groups entries; levels[k] groups nodes of levels[k - 1].
    levels: Vec<Vec<TreeNode>>,
}

fn centre_x(b: &BoundingBox) -> f64 {
    b.x0 + (b.x1 - b.x0) / 2.0
}

fn centre_y(b: &BoundingBox) -> f64 {
    b.y0 + (b.y1 - b.y0) / 2.0
}

fn isqrt_ceil(n: usize) -> usize {
    let mut r = 1;
    while r * r < n {
        r += 1;
    }
    r
}

fn cmp_f64(a: f64, b: f64) -> core::cmp::Ordering {
    a.partial_cmp(&b).unwrap_or(core::cmp::Ordering::Equal)
}

impl GeometryIndex {
    /// Sort-tile-recursive bulk load.
    pub fn build<I>(boxes: I) -> Self
    where
        I: IntoIterator<Item = (u32, BoundingBox)>,
    {
        let mut entries: Vec<(BoundingBox, u32)> = boxes.into_iter().map(|(n, b)| (b, n)).collect();
        if entries.is_empty() {
            return GeometryIndex::default();
        }
        entries.sort_by(|a, b| cmp_f64(centre_x(&a.0), centre_x(&b.0)).then(a.1.cmp(&b.1)));
        let leaves = entries.len().div_ceil(FANOUT);
        let strip = isqrt_ceil(leaves) * FANOUT;
        for chunk in entries.chunks_mut(strip) {
            chunk.sort_by(|a, b| cmp_f64(centre_y(&a.0), centre_y(&b.0)).then(a.1.cmp(&b.1)));
        }
        let mut levels = Vec::new();
        let mut level: Vec<TreeNode> = (0..entries.len())
            .step_by(FANOUT)
            .map(|start| {
                let end = (start + FANOUT).min(entries.len());
                let mbr = entries[start + 1..end].iter().fold(entries[start].0, |m, e| m.union(&e.0));
                TreeNode { mbr, start, end }
            })
            .collect();
        loop {
            let done = level.len() == 1;
            let next: Vec<TreeNode> = if done {
                Vec::new()
            } else {
                (0..level.len())
                    .step_by(FANOUT)
                    .map(|start| {
                        let end = (start + FANOUT).min(level.len());
                        let mbr = level[start + 1..end].iter().fold(level[start].mbr, |m, n| m.union(&n.mbr));
                        TreeNode { mbr, start, end }
                    })
                    .collect()
            };
            levels.push(level);
            if done {
                break;
            }
            level = next;
        }
        GeometryIndex { entries, levels }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nodes whose box stands in `relation` to `query`, excluding `exclude`,
    /// sorted by node index.
    pub fn query(&self, relation: VisualRelation, query: &BoundingBox, epsilon: f64, exclude: Option<u32>) -> Vec<u32> {
        let mut out = Vec::new();
        if let Some(top) = self.levels.len().checked_sub(1) {
            for i in 0..self.levels[top].len() {
                self.visit(top, i, relation, query, epsilon, &mut out);
            }
        }
        if let Some(x) = exclude {
            out.retain(|&n| n != x);
        }
        out.sort_unstable();
        out
    }

    fn visit(&self, level: usize, idx: usize, relation: VisualRelation, query: &BoundingBox, epsilon: f64, out: &mut Vec<u32>) {
        let node = &self.levels[level][idx];
        if !relation.may_hold(query, &node.mbr, epsilon) {
            return;
        }
        if level == 0 {
            for (b, n) in &self.entries[node.start..node.end] {
                if relation.holds(query, b, epsilon) {
                    out.push(*n);
                }
            }
        } else {
            for child in node.start..node.end {
                self.visit(level - 1, child, relation, query, epsilon, out);
            }
        }
    }
}
