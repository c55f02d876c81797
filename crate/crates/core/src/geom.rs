//! Exact rational planar geometry used by the curve and pairing engines.
//!
//! Everything here is over `Ratio<i64>`; there are no epsilons. Inputs that
//! would require a tolerance (tangencies, collinear overlaps, endpoint hits)
//! are reported as degeneracies instead of being resolved approximately.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

pub type Rat = Ratio<i64>;

/// Shorthand for an exact rational from a numerator/denominator pair.
pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(n, d)
}

pub fn rati(n: i64) -> Rat {
    Ratio::from_integer(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rat,
    pub y: Rat,
}

impl Point {
    pub fn new(x: Rat, y: Rat) -> Self {
        Point { x, y }
    }

    pub fn translate(&self, dx: Rat, dy: Rat) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }

    /// Point reflection through the origin.
    pub fn negate(&self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

pub fn pt(x: Rat, y: Rat) -> Point {
    Point::new(x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
    Collinear,
}

/// Sign of the cross product (q - p) x (r - p).
pub fn orient(p: Point, q: Point, r: Point) -> Orientation {
    let v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    if v.is_zero() {
        Orientation::Collinear
    } else if v.is_positive() {
        Orientation::CounterClockwise
    } else {
        Orientation::Clockwise
    }
}

pub fn cross(o: Point, a: Point, b: Point) -> Rat {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Result of intersecting two closed segments exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegInt {
    /// Disjoint.
    None,
    /// A single transverse interior-interior crossing.
    Proper(Point),
    /// Anything else: endpoint touches, tangencies, collinear overlap.
    Degenerate,
}

fn on_segment(s: &Segment, p: Point) -> bool {
    // Assumes p collinear with s.
    let (minx, maxx) = if s.a.x <= s.b.x { (s.a.x, s.b.x) } else { (s.b.x, s.a.x) };
    let (miny, maxy) = if s.a.y <= s.b.y { (s.a.y, s.b.y) } else { (s.b.y, s.a.y) };
    minx <= p.x && p.x <= maxx && miny <= p.y && p.y <= maxy
}

/// Exact closed-segment intersection, classifying proper crossings apart
/// from every degenerate contact.
pub fn segment_intersection(s1: &Segment, s2: &Segment) -> SegInt {
    let o1 = orient(s1.a, s1.b, s2.a);
    let o2 = orient(s1.a, s1.b, s2.b);
    let o3 = orient(s2.a, s2.b, s1.a);
    let o4 = orient(s2.a, s2.b, s1.b);

    use Orientation::Collinear as C;
    if o1 != C && o2 != C && o3 != C && o4 != C {
        if o1 != o2 && o3 != o4 {
            // Proper crossing; solve for the point.
            let d1 = s1.b.x - s1.a.x;
            let e1 = s1.b.y - s1.a.y;
            let d2 = s2.b.x - s2.a.x;
            let e2 = s2.b.y - s2.a.y;
            let den = d1 * e2 - e1 * d2;
            debug_assert!(!den.is_zero());
            let t = ((s2.a.x - s1.a.x) * e2 - (s2.a.y - s1.a.y) * d2) / den;
            let x = s1.a.x + t * d1;
            let y = s1.a.y + t * e1;
            return SegInt::Proper(Point::new(x, y));
        }
        return SegInt::None;
    }
    // Some collinearity: either a true contact (degenerate) or far apart.
    if o1 == C && on_segment(s1, s2.a) {
        return SegInt::Degenerate;
    }
    if o2 == C && on_segment(s1, s2.b) {
        return SegInt::Degenerate;
    }
    if o3 == C && on_segment(s2, s1.a) {
        return SegInt::Degenerate;
    }
    if o4 == C && on_segment(s2, s1.b) {
        return SegInt::Degenerate;
    }
    SegInt::None
}

/// An open PL path (or closed polygon when used as such): consecutive
/// vertices joined by straight segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polyline {
    pub verts: Vec<Point>,
}

impl Polyline {
    pub fn new(verts: Vec<Point>) -> Self {
        Polyline { verts }
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.verts.windows(2).map(|w| Segment::new(w[0], w[1]))
    }

    pub fn translate(&self, dx: Rat, dy: Rat) -> Polyline {
        Polyline::new(self.verts.iter().map(|p| p.translate(dx, dy)).collect())
    }

    pub fn negate(&self) -> Polyline {
        Polyline::new(self.verts.iter().map(|p| p.negate()).collect())
    }

    pub fn first(&self) -> Point {
        self.verts[0]
    }

    pub fn last(&self) -> Point {
        *self.verts.last().unwrap()
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut minx = self.verts[0].x;
        let mut maxx = minx;
        let mut miny = self.verts[0].y;
        let mut maxy = miny;
        for p in &self.verts {
            if p.x < minx {
                minx = p.x;
            }
            if p.x > maxx {
                maxx = p.x;
            }
            if p.y < miny {
                miny = p.y;
            }
            if p.y > maxy {
                maxy = p.y;
            }
        }
        (Point::new(minx, miny), Point::new(maxx, maxy))
    }

    /// Drops interior vertices that are collinear with their neighbours.
    pub fn simplified(&self) -> Polyline {
        if self.verts.len() <= 2 {
            return self.clone();
        }
        let mut out = vec![self.verts[0]];
        for i in 1..self.verts.len() - 1 {
            if orient(*out.last().unwrap(), self.verts[i], self.verts[i + 1])
                != Orientation::Collinear
            {
                out.push(self.verts[i]);
            }
        }
        out.push(*self.verts.last().unwrap());
        Polyline::new(out)
    }
}

/// Location of a point relative to a closed polygon boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointLoc {
    Inside,
    Outside,
    OnBoundary,
}

/// Exact even-odd point-in-polygon test for a simple closed PL curve given
/// by `verts` (implicitly closed back to the first vertex).
pub fn point_in_polygon(verts: &[Point], p: Point) -> PointLoc {
    let n = verts.len();
    let mut crossings = 0u32;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        // On-edge check first.
        if orient(a, b, p) == Orientation::Collinear
            && on_segment(&Segment::new(a, b), p)
        {
            return PointLoc::OnBoundary;
        }
        // Count crossings of the horizontal ray to +infinity, half-open in y
        // so shared vertices are not double counted.
        let (lo, hi) = if a.y <= b.y { (a, b) } else { (b, a) };
        if lo.y <= p.y && p.y < hi.y {
            // x of the edge at height p.y is > p.x ?
            let v = cross(lo, hi, p);
            if (hi.y > lo.y) && v.is_negative() {
                crossings += 1;
            }
        }
    }
    if crossings % 2 == 1 {
        PointLoc::Inside
    } else {
        PointLoc::Outside
    }
}

/// Twice the signed area of the closed polygon through `verts`.
pub fn signed_area2(verts: &[Point]) -> Rat {
    let n = verts.len();
    let mut s = Rat::zero();
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    s
}

/// True if the closed polygon through `verts` has no self-contacts at all
/// (adjacent edges may share only their single common vertex).
pub fn is_simple_polygon(verts: &[Point]) -> bool {
    let n = verts.len();
    if n < 3 {
        return false;
    }
    // Reject repeated vertices.
    for i in 0..n {
        for j in i + 1..n {
            if verts[i] == verts[j] {
                return false;
            }
        }
    }
    for i in 0..n {
        let si = Segment::new(verts[i], verts[(i + 1) % n]);
        for j in i + 1..n {
            let sj = Segment::new(verts[j], verts[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            match segment_intersection(&si, &sj) {
                SegInt::None => {}
                SegInt::Proper(_) => return false,
                SegInt::Degenerate => {
                    if !adjacent {
                        return false;
                    }
                    // Adjacent edges must meet exactly at the shared vertex;
                    // a collinear overlap shows up as a degenerate contact
                    // with more than one common point. Check by midpoint.
                    let shared = if j == i + 1 { verts[j] } else { verts[0] };
                    let other_i = if j == i + 1 { verts[i] } else { verts[n - 1] };
                    let other_j = if j == i + 1 { verts[(j + 1) % n] } else { verts[1] };
                    if orient(shared, other_i, other_j) == Orientation::Collinear {
                        // Straight-through vertex is fine unless the edges
                        // double back onto each other.
                        let back_i = Point::new(
                            shared.x + (other_i.x - shared.x),
                            shared.y + (other_i.y - shared.y),
                        );
                        let back_j = Point::new(
                            shared.x + (other_j.x - shared.x),
                            shared.y + (other_j.y - shared.y),
                        );
                        // Doubling back means both lie on the same side ray.
                        let dot = (back_i.x - shared.x) * (back_j.x - shared.x)
                            + (back_i.y - shared.y) * (back_j.y - shared.y);
                        if dot.is_positive() {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point {
        Point::new(rati(x), rati(y))
    }

    #[test]
    fn proper_crossing() {
        let s1 = Segment::new(p(0, 0), p(2, 2));
        let s2 = Segment::new(p(0, 2), p(2, 0));
        assert_eq!(
            segment_intersection(&s1, &s2),
            SegInt::Proper(Point::new(rati(1), rati(1)))
        );
    }

    #[test]
    fn endpoint_touch_is_degenerate() {
        let s1 = Segment::new(p(0, 0), p(1, 1));
        let s2 = Segment::new(p(1, 1), p(2, 0));
        assert_eq!(segment_intersection(&s1, &s2), SegInt::Degenerate);
    }

    #[test]
    fn collinear_overlap_is_degenerate() {
        let s1 = Segment::new(p(0, 0), p(2, 0));
        let s2 = Segment::new(p(1, 0), p(3, 0));
        assert_eq!(segment_intersection(&s1, &s2), SegInt::Degenerate);
    }

    #[test]
    fn disjoint() {
        let s1 = Segment::new(p(0, 0), p(1, 0));
        let s2 = Segment::new(p(0, 1), p(1, 1));
        assert_eq!(segment_intersection(&s1, &s2), SegInt::None);
    }

    #[test]
    fn point_in_square() {
        let sq = vec![p(0, 0), p(2, 0), p(2, 2), p(0, 2)];
        assert_eq!(point_in_polygon(&sq, Point::new(rati(1), rati(1))), PointLoc::Inside);
        assert_eq!(point_in_polygon(&sq, Point::new(rati(3), rati(1))), PointLoc::Outside);
        assert_eq!(point_in_polygon(&sq, Point::new(rati(0), rati(1))), PointLoc::OnBoundary);
        // Ray through a vertex must not double count.
        assert_eq!(
            point_in_polygon(&sq, Point::new(rat(-1, 1), rati(2))),
            PointLoc::Outside
        );
    }

    #[test]
    fn simple_polygon_detects_crossing() {
        let bow = vec![p(0, 0), p(2, 2), p(2, 0), p(0, 2)];
        assert!(!is_simple_polygon(&bow));
        let sq = vec![p(0, 0), p(2, 0), p(2, 2), p(0, 2)];
        assert!(is_simple_polygon(&sq));
    }
}
