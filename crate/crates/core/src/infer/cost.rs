use core::fmt;
use core::ops::Add;

use crate::xpath::{Axis, Expr, Step};

/// Path complexity, compared lexicographically field by field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cost {
    /// Steps on axes that can jump several tree levels.
    pub multi_level: u32,
    pub rank_sum: u32,
    /// Steps other than `self`.
    pub length: u32,
}

impl Cost {
    pub const ZERO: Cost = Cost { multi_level: 0, rank_sum: 0, length: 0 };

    pub fn new(multi_level: u32, rank_sum: u32, length: u32) -> Self {
        Cost { multi_level, rank_sum, length }
    }

    pub fn as_array(&self) -> [u32; 3] {
        [self.multi_level, self.rank_sum, self.length]
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, o: Cost) -> Cost {
        Cost { multi_level: self.multi_level + o.multi_level, rank_sum: self.rank_sum + o.rank_sum, length: self.length + o.length }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.multi_level, self.rank_sum, self.length)
    }
}

/// Preference rank of an axis; lower is preferred.
pub fn axis_rank(axis: Axis) -> u32 {
    match axis {
        Axis::SelfAxis => 0,
        Axis::Child | Axis::Attribute => 1,
        Axis::FollowingSibling | Axis::PrecedingSibling => 2,
        Axis::Descendant | Axis::DescendantOrSelf => 3,
        Axis::Parent | Axis::Ancestor | Axis::AncestorOrSelf => 4,
        _ => 5,
    }
}

/// Cost of one step, not counting its predicates.
pub fn step_cost(axis: Axis) -> Cost {
    Cost { multi_level: u32::from(axis.is_multi_level()), rank_sum: axis_rank(axis), length: u32::from(axis != Axis::SelfAxis) }
}

/// Sum of [`step_cost`] over every step in `e`, predicate steps included.
pub fn cost_of(e: &Expr) -> Cost {
    let mut total = Cost::ZERO;
    e.for_each_step(&mut |s: &Step| total = total + step_cost(s.axis));
    total
}
