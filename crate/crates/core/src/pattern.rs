//! (1,1)-pattern beta curves: built-in families and the pattern file
//! format.
//!
//! A pattern is stored as one vertical period of its planar lift, running
//! from `lift[0]` down to `lift[0] + (0, -1)`. The documented templates:
//! - `core`: a straight vertical line through the delta arcs (winding 1);
//! - `cable(p)`: a spiral that dips through p consecutive delta arcs on an
//!   eastward leg above the puncture row and returns west just below its
//!   dips (winding p);
//! - `ppat(p)`: the cable with one extra finger after the first dip that
//!   crosses the longitude twice and wraps the adjacent z puncture, adding
//!   one positive delta crossing (winding p + 1). Pairing ppat(p) with the
//!   unknot gives three intersection points with gradings {1, 0, -1}, the
//!   right-handed trefoil.
//!
//! All coordinates are rationals with denominator 256; x offsets are chosen
//! off the /64 grid used by the knot-side curves, so pairings are
//! automatically transverse.

use num_rational::Ratio;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::geom::{rat, rati, Point, Polyline, Rat, Segment, SegInt};

#[derive(Debug, Clone)]
pub struct PatternCurve {
    pub name: String,
    /// One vertical period; last vertex = first + (0, -1).
    pub lift: Polyline,
    pub winding: i64,
    pub lambda_hits: usize,
    pub mu_hits: usize,
}

fn q(n: i64) -> Rat {
    Ratio::new(n, 256)
}

/// Signed delta-arc crossings of one period: crossings of y in Z + 1/2 with
/// fractional x in (1/4, 3/4), counted +1 downward.
fn count_winding(lift: &Polyline) -> i64 {
    let mut w = 0;
    for seg in lift.segments() {
        if seg.a.y == seg.b.y {
            continue;
        }
        let down = seg.b.y < seg.a.y;
        let (lo, hi) = if down { (seg.b.y, seg.a.y) } else { (seg.a.y, seg.b.y) };
        let mut level = (lo - rat(1, 2)).floor() + rat(1, 2) + rati(1);
        while level < hi {
            if level > lo {
                let t = (level - seg.a.y) / (seg.b.y - seg.a.y);
                let x = seg.a.x + t * (seg.b.x - seg.a.x);
                let frac = x - x.floor();
                if frac > rat(1, 4) && frac < rat(3, 4) {
                    w += if down { 1 } else { -1 };
                }
            }
            level += rati(1);
        }
    }
    w
}

/// Transverse crossings with horizontal integer lines (lambda lifts) per
/// period. The period seam is half-open so the closing vertex is not
/// counted twice.
fn count_lambda_hits(lift: &Polyline) -> usize {
    let mut n = 0;
    for seg in lift.segments() {
        if seg.a.y == seg.b.y {
            continue;
        }
        let (lo, hi) = if seg.a.y < seg.b.y { (seg.a.y, seg.b.y) } else { (seg.b.y, seg.a.y) };
        let mut level = lo.ceil();
        while level <= hi {
            // count interior crossings and the segment's start point, so
            // a vertex exactly on a line is counted once
            if (level > lo && level < hi) || level == seg.a.y {
                n += 1;
            }
            level += rati(1);
        }
    }
    n
}

/// Transverse crossings with vertical integer lines (mu lifts) per period.
fn count_mu_hits(lift: &Polyline) -> usize {
    let mut n = 0;
    for seg in lift.segments() {
        if seg.a.x == seg.b.x {
            continue;
        }
        let (lo, hi) = if seg.a.x < seg.b.x { (seg.a.x, seg.b.x) } else { (seg.b.x, seg.a.x) };
        let mut line = lo.ceil();
        while line <= hi {
            if (line > lo && line < hi) || line == seg.a.x {
                n += 1;
            }
            line += rati(1);
        }
    }
    n
}

fn validate_lift(name: &str, lift: &Polyline) -> Result<()> {
    if lift.verts.len() < 2 {
        return Err(Error::Invariant(format!("{name}: empty pattern lift")));
    }
    let first = lift.first();
    let last = lift.last();
    if last.x != first.x || last.y != first.y - rati(1) {
        return Err(Error::Invariant(format!(
            "{name}: open path; endpoints must differ by (0, -1)"
        )));
    }
    // No vertex on a puncture and no segment through one.
    for seg in lift.segments() {
        for pt in puncture_candidates(&seg) {
            if on_closed_segment(&seg, pt) {
                return Err(Error::Invariant(format!(
                    "{name}: path meets a puncture at ({}, {})",
                    pt.x, pt.y
                )));
            }
        }
    }
    // Embedded on the torus: all (m, k) deck translates of the period are
    // pairwise disjoint. It suffices to check the period against every
    // nearby translate of itself.
    let (bl, tr) = lift.bbox();
    let xspan = (tr.x - bl.x).ceil().to_integer() + 1;
    let yspan = (tr.y - bl.y).ceil().to_integer() + 1;
    for m in -xspan..=xspan {
        for k in -yspan..=yspan {
            if m == 0 && k == 0 {
                continue;
            }
            let shifted = lift.translate(rati(m), rati(k));
            for (i, s1) in lift.segments().enumerate() {
                for (j, s2) in shifted.segments().enumerate() {
                    match crate::geom::segment_intersection(&s1, &s2) {
                        SegInt::None => {}
                        SegInt::Proper(p) => {
                            return Err(Error::Invariant(format!(
                                "{name}: translate ({m},{k}) crosses the period at ({}, {})",
                                p.x, p.y
                            )));
                        }
                        SegInt::Degenerate => {
                            // The period seam: the last vertex of the lift
                            // equals the first vertex of the (0,-1)
                            // translate; that single contact is the curve
                            // continuing itself.
                            let seam_ok = m == 0
                                && k == -1
                                && i == lift.verts.len() - 2
                                && j == 0;
                            let seam_ok2 = m == 0
                                && k == 1
                                && i == 0
                                && j == shifted.verts.len() - 2;
                            if !(seam_ok || seam_ok2) {
                                return Err(Error::Invariant(format!(
                                    "{name}: degenerate contact with translate ({m},{k})"
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn puncture_candidates(seg: &Segment) -> Vec<Point> {
    let mut pts = Vec::new();
    let (lo, hi) = if seg.a.y <= seg.b.y { (seg.a.y, seg.b.y) } else { (seg.b.y, seg.a.y) };
    let (lx, hx) = if seg.a.x <= seg.b.x { (seg.a.x, seg.b.x) } else { (seg.b.x, seg.a.x) };
    let mut level = (lo - rat(1, 2)).floor() + rat(1, 2);
    while level <= hi {
        if level >= lo {
            let mut x = (lx - rat(1, 4)).floor() + rat(1, 4);
            while x <= hx {
                if x >= lx {
                    let frac = x - x.floor();
                    if frac == rat(1, 4) || frac == rat(3, 4) {
                        pts.push(Point::new(x, level));
                    }
                }
                x += rat(1, 2);
            }
        }
        level += rati(1);
    }
    pts
}

fn on_closed_segment(seg: &Segment, p: Point) -> bool {
    use crate::geom::{orient, Orientation};
    if orient(seg.a, seg.b, p) != Orientation::Collinear {
        return false;
    }
    let (lx, hx) = if seg.a.x <= seg.b.x { (seg.a.x, seg.b.x) } else { (seg.b.x, seg.a.x) };
    let (ly, hy) = if seg.a.y <= seg.b.y { (seg.a.y, seg.b.y) } else { (seg.b.y, seg.a.y) };
    lx <= p.x && p.x <= hx && ly <= p.y && p.y <= hy
}

fn finish(name: &str, verts: Vec<Point>) -> Result<PatternCurve> {
    let lift = Polyline::new(verts).simplified();
    validate_lift(name, &lift)?;
    let winding = count_winding(&lift);
    let lambda_hits = count_lambda_hits(&lift);
    let mu_hits = count_mu_hits(&lift);
    Ok(PatternCurve { name: name.to_string(), lift, winding, lambda_hits, mu_hits })
}

/// The core of the solid torus: a straight vertical line between w and z.
pub fn core() -> PatternCurve {
    let x = rat(1, 2);
    finish(
        "core",
        vec![Point::new(x, q(260)), Point::new(x, q(4))],
    )
    .expect("core template is valid")
}

// Template coordinates shared by cable and ppat, in 1/256 units.
// Eastward leg tiers ascend so earlier dip columns never block later leg
// segments; dips drift east and risers drift west for the same reason.
fn tier_h(k: i64) -> Rat {
    q(176 + 12 * (k - 1))
}
fn dip_x(k: i64) -> Rat {
    rati(k) - rat(1, 2) + Ratio::new(k - 1, 256)
}
fn rise_x(k: i64) -> Rat {
    rati(k) - rat(13, 64) - Ratio::new(k - 1, 256)
}
fn dip_bottom(k: i64) -> Rat {
    q(126 - (k - 1))
}
fn spine_x() -> Rat {
    q(-40)
}

/// Shared spiral: seam, east leg with `p` delta dips, west leg threaded
/// below the dips, closing seam. `finger` inserts the ppat finger after the
/// first dip.
fn spiral(name: &str, p: i64, finger: bool) -> Result<PatternCurve> {
    let s = spine_x();
    let mut v: Vec<Point> = Vec::new();
    // Seam column, crossing y = 1.
    v.push(Point::new(s, q(260)));
    v.push(Point::new(s, q(252)));
    // First leg segment descends to the first dip.
    v.push(Point::new(dip_x(1), tier_h(1)));
    v.push(Point::new(dip_x(1), dip_bottom(1)));
    if finger {
        // West jog under the first dip, then the finger: down across the
        // longitude, through the delta arc of the cell west of the line,
        // under its z puncture, and back up east of it.
        let f_dn = q(-115);
        let f_up = q(-61);
        v.push(Point::new(f_dn, dip_bottom(1)));
        v.push(Point::new(f_dn, q(-132)));
        v.push(Point::new(f_up, q(-132)));
        v.push(Point::new(f_up, q(104)));
        v.push(Point::new(rise_x(1), q(104)));
    } else {
        v.push(Point::new(rise_x(1), dip_bottom(1)));
    }
    // Remaining dips.
    for k in 2..=p {
        v.push(Point::new(rise_x(k - 1), tier_h(k)));
        v.push(Point::new(dip_x(k), tier_h(k)));
        v.push(Point::new(dip_x(k), dip_bottom(k)));
        if k < p {
            v.push(Point::new(rise_x(k), dip_bottom(k)));
        }
    }
    // Exit into the west leg, threaded between the dip bottoms above and
    // the finger gaps below.
    let exit_x = rati(p) - rat(9, 64);
    v.push(Point::new(exit_x, q(123)));
    // West leg slants down to its dive column.
    let dive_x = q(-120);
    v.push(Point::new(dive_x, q(118)));
    v.push(Point::new(dive_x, q(6)));
    v.push(Point::new(s, q(4)));
    finish(name, v)
}

/// Built-in patterns: the solid-torus core, the (p,1)-cable, and the
/// trefoil pattern family.
pub fn builtin_pattern(kind: &crate::homology::PatternKind) -> Result<PatternCurve> {
    use crate::homology::PatternKind::*;
    match *kind {
        Core => Ok(core()),
        Cable(p) => {
            if p < 2 {
                return Err(Error::Unsupported(format!("cable requires p >= 2, got {p}")));
            }
            spiral(&format!("cable:{p}"), p, false)
        }
        Ppat(p) => {
            if p < 2 {
                return Err(Error::Unsupported(format!("ppat requires p >= 2, got {p}")));
            }
            spiral(&format!("ppat:{p}"), p, true)
        }
    }
}

/// Signed winding number of a pattern (delta-arc crossings per period).
pub fn winding_number(pc: &PatternCurve) -> i64 {
    pc.winding
}

/// Parse the pattern file format: `vertex <x> <y>` per line with rationals
/// written as `a/b` or integers, one vertical period in order.
pub fn parse_pattern(text: &str) -> Result<PatternCurve> {
    let mut verts = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "vertex" {
            return Err(Error::Parse {
                line: lineno,
                msg: "expected `vertex <x-rational> <y-rational>`".into(),
            });
        }
        let parse_rat = |s: &str| -> Result<Rat> {
            let mk_err = || Error::Parse {
                line: lineno,
                msg: format!("bad rational `{s}`"),
            };
            if let Some((n, d)) = s.split_once('/') {
                let n: i64 = n.parse().map_err(|_| mk_err())?;
                let d: i64 = d.parse().map_err(|_| mk_err())?;
                if d == 0 {
                    return Err(mk_err());
                }
                Ok(Ratio::new(n, d))
            } else {
                let n: i64 = s.parse().map_err(|_| mk_err())?;
                Ok(rati(n))
            }
        };
        verts.push(Point::new(parse_rat(parts[1])?, parse_rat(parts[2])?));
    }
    finish("custom", verts)
}

/// Render a pattern lift back into the file format (used by docs and the
/// round-trip tests).
pub fn to_pattern_file(pc: &PatternCurve) -> String {
    let mut out = String::new();
    for v in &pc.lift.verts {
        out.push_str(&format!("vertex {} {}\n", v.x, v.y));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::PatternKind;

    #[test]
    fn core_counts() {
        let c = core();
        assert_eq!(c.winding, 1);
        assert_eq!(c.lambda_hits, 1);
        assert_eq!(c.mu_hits, 0);
    }

    #[test]
    fn cable_counts() {
        for p in 2..=6 {
            let c = builtin_pattern(&PatternKind::Cable(p)).unwrap();
            assert_eq!(c.winding, p, "winding of cable({p},1)");
            assert_eq!(c.lambda_hits, 1, "lambda hits of cable({p},1)");
            assert_eq!(c.mu_hits as i64, 2 * p, "mu hits of cable({p},1)");
        }
    }

    #[test]
    fn ppat_counts() {
        for p in 2..=6 {
            let c = builtin_pattern(&PatternKind::Ppat(p)).unwrap();
            assert_eq!(c.winding, p + 1, "winding of P_({p},1)");
            assert_eq!(c.lambda_hits, 3, "lambda hits of P_({p},1)");
            assert_eq!(c.mu_hits as i64, 2 * p + 2, "mu hits of P_({p},1)");
        }
    }

    #[test]
    fn ppat3_matches_paper_generator_labels() {
        // Three x generators and eight y generators.
        let c = builtin_pattern(&PatternKind::Ppat(3)).unwrap();
        assert_eq!((c.lambda_hits, c.mu_hits), (3, 8));
    }

    #[test]
    fn round_trip_through_file_format() {
        for kind in [PatternKind::Core, PatternKind::Cable(3), PatternKind::Ppat(3)] {
            let c = builtin_pattern(&kind).unwrap();
            let text = to_pattern_file(&c);
            let back = parse_pattern(&text).unwrap();
            assert_eq!(back.lift, c.lift);
            assert_eq!(back.winding, c.winding);
            assert_eq!(back.lambda_hits, c.lambda_hits);
            assert_eq!(back.mu_hits, c.mu_hits);
        }
    }

    #[test]
    fn open_path_is_rejected() {
        let text = "vertex 1/2 1\nvertex 1/2 -1\n";
        match parse_pattern(text) {
            Err(Error::Invariant(msg)) => assert!(msg.contains("open path")),
            other => panic!("expected open-path error, got {other:?}"),
        }
    }

    #[test]
    fn puncture_collision_is_rejected() {
        let text = "vertex 1/4 1\nvertex 1/4 0\n";
        match parse_pattern(text) {
            Err(Error::Invariant(msg)) => assert!(msg.contains("puncture")),
            other => panic!("expected puncture error, got {other:?}"),
        }
    }

    #[test]
    fn self_crossing_translates_rejected() {
        // A period that drifts one cell east while descending collides with
        // its own horizontal translates on the torus.
        let text = "vertex 1/2 9/8\nvertex 5/2 7/8\nvertex 5/2 -1/8\nvertex 1/2 1/8\n";
        assert!(parse_pattern(text).is_err());
    }

    #[test]
    fn winding_is_signed() {
        let c = builtin_pattern(&PatternKind::Ppat(2)).unwrap();
        assert!(c.winding.is_positive());
    }
}
