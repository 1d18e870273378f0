//! Integer rectilinear geometry.
//!
//! Every coordinate is an integer number of nanometres. Distances are
//! Euclidean between boundaries and are always reported squared, so all
//! comparisons against design-rule thresholds stay exact.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest accepted absolute coordinate value (exclusive).
pub const COORD_LIMIT: i64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("degenerate rectangle [{0}, {1}, {2}, {3}]: lower corner must be strictly below and left of upper corner")]
    Degenerate(i64, i64, i64, i64),
    #[error("coordinate {0} is outside the supported range (|c| < 2^31)")]
    OutOfRange(i64),
    #[error("polygon has no rectangles")]
    EmptyPolygon,
    #[error("polygon rectangles {0} and {1} overlap")]
    OverlappingParts(usize, usize),
    #[error("polygon is not edge-connected (rectangle {0} is detached)")]
    Disconnected(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

/// Projection axis. `Horizontal` compares x-extents, `Vertical` y-extents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::Horizontal => Axis::Vertical,
            Axis::Vertical => Axis::Horizontal,
        }
    }
}

/// Closed integer interval with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn len(&self) -> i64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }
}

/// Axis-aligned rectangle with positive area.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rect {
    pub lo: Point,
    pub hi: Point,
}

impl fmt::Debug for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}]", self.lo.x, self.lo.y, self.hi.x, self.hi.y)
    }
}

impl Rect {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Result<Self, GeometryError> {
        for c in [x0, y0, x1, y1] {
            if c.abs() >= COORD_LIMIT {
                return Err(GeometryError::OutOfRange(c));
            }
        }
        if x0 >= x1 || y0 >= y1 {
            return Err(GeometryError::Degenerate(x0, y0, x1, y1));
        }
        Ok(Self {
            lo: Point::new(x0, y0),
            hi: Point::new(x1, y1),
        })
    }

    /// Construct from coordinates already known to be valid.
    ///
    /// Panics on a degenerate rectangle.
    pub fn from_coords(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        Self::new(x0, y0, x1, y1).expect("invalid rectangle literal")
    }

    pub fn coords(&self) -> [i64; 4] {
        [self.lo.x, self.lo.y, self.hi.x, self.hi.y]
    }

    pub fn width(&self) -> i64 {
        self.hi.x - self.lo.x
    }

    pub fn height(&self) -> i64 {
        self.hi.y - self.lo.y
    }

    pub fn area(&self) -> i128 {
        self.width() as i128 * self.height() as i128
    }

    pub fn extent(&self, axis: Axis) -> Interval {
        match axis {
            Axis::Horizontal => Interval {
                lo: self.lo.x,
                hi: self.hi.x,
            },
            Axis::Vertical => Interval {
                lo: self.lo.y,
                hi: self.hi.y,
            },
        }
    }

    pub fn union_bbox(&self, other: &Rect) -> Rect {
        Rect {
            lo: Point::new(self.lo.x.min(other.lo.x), self.lo.y.min(other.lo.y)),
            hi: Point::new(self.hi.x.max(other.hi.x), self.hi.y.max(other.hi.y)),
        }
    }

    pub fn translate(&self, dx: i64, dy: i64) -> Rect {
        Rect {
            lo: Point::new(self.lo.x + dx, self.lo.y + dy),
            hi: Point::new(self.hi.x + dx, self.hi.y + dy),
        }
    }

    /// True when the open interiors intersect.
    pub fn interiors_overlap(&self, other: &Rect) -> bool {
        self.lo.x < other.hi.x
            && other.lo.x < self.hi.x
            && self.lo.y < other.hi.y
            && other.lo.y < self.hi.y
    }

    /// True when the rectangles share a boundary segment of positive length
    /// without overlapping.
    pub fn shares_edge(&self, other: &Rect) -> bool {
        let x_touch = self.hi.x == other.lo.x || other.hi.x == self.lo.x;
        let y_touch = self.hi.y == other.lo.y || other.hi.y == self.lo.y;
        (x_touch && projection_interval(self, other, Axis::Vertical).is_some())
            || (y_touch && projection_interval(self, other, Axis::Horizontal).is_some())
    }
}

/// Gap between two intervals along one axis; zero when they touch or overlap.
fn axis_gap(a: Interval, b: Interval) -> i64 {
    (a.lo - b.hi).max(b.lo - a.hi).max(0)
}

/// Squared Euclidean distance between the closest boundary points of two
/// rectangles; zero iff they touch or overlap.
pub fn rect_distance(a: &Rect, b: &Rect) -> i128 {
    let dx = axis_gap(a.extent(Axis::Horizontal), b.extent(Axis::Horizontal)) as i128;
    let dy = axis_gap(a.extent(Axis::Vertical), b.extent(Axis::Vertical)) as i128;
    dx * dx + dy * dy
}

/// Overlap of the two extents along `axis`, or `None` when the extents are
/// disjoint or meet in a single point.
pub fn projection_interval(a: &Rect, b: &Rect, axis: Axis) -> Option<Interval> {
    let (ea, eb) = (a.extent(axis), b.extent(axis));
    let lo = ea.lo.max(eb.lo);
    let hi = ea.hi.min(eb.hi);
    (lo < hi).then_some(Interval { lo, hi })
}

/// A connected rectilinear shape stored as interior-disjoint rectangles.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polygon {
    rects: Vec<Rect>,
}

impl Polygon {
    pub fn new(rects: Vec<Rect>) -> Result<Self, GeometryError> {
        if rects.is_empty() {
            return Err(GeometryError::EmptyPolygon);
        }
        for i in 0..rects.len() {
            for j in i + 1..rects.len() {
                if rects[i].interiors_overlap(&rects[j]) {
                    return Err(GeometryError::OverlappingParts(i, j));
                }
            }
        }
        // Edge connectivity by flood fill from the first rectangle.
        let mut seen = vec![false; rects.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..rects.len() {
                if !seen[j] && rects[i].shares_edge(&rects[j]) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        if let Some(detached) = seen.iter().position(|s| !s) {
            return Err(GeometryError::Disconnected(detached));
        }
        Ok(Self { rects })
    }

    pub fn from_rect(rect: Rect) -> Self {
        Self { rects: vec![rect] }
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn area(&self) -> i128 {
        self.rects.iter().map(Rect::area).sum()
    }

    pub fn bbox(&self) -> Rect {
        self.rects[1..]
            .iter()
            .fold(self.rects[0], |acc, r| acc.union_bbox(r))
    }

    pub fn translate(&self, dx: i64, dy: i64) -> Polygon {
        Polygon {
            rects: self.rects.iter().map(|r| r.translate(dx, dy)).collect(),
        }
    }

    pub fn overlaps_rect(&self, r: &Rect) -> bool {
        rect_overlaps_polygon(r, self)
    }
}

/// Minimum squared distance over all rectangle pairs of the two polygons.
pub fn polygon_distance(a: &Polygon, b: &Polygon) -> i128 {
    let mut best = i128::MAX;
    for ra in a.rects() {
        for rb in b.rects() {
            best = best.min(rect_distance(ra, rb));
            if best == 0 {
                return 0;
            }
        }
    }
    best
}

/// True iff the interior of `r` meets the interior of some rectangle of `p`.
pub fn rect_overlaps_polygon(r: &Rect, p: &Polygon) -> bool {
    p.rects().iter().any(|q| r.interiors_overlap(q))
}
