//! Immersed multicurves in the marked plane from valence-2 type D
//! structures, plus the tau/epsilon/genus readout of the essential
//! component.
//!
//! Conventions (the documented template constants):
//! - punctures: w at (i + 1/4, j + 1/2), z at (i + 3/4, j + 1/2);
//! - iota_0 generators sit on vertical integer lines, at height equal to
//!   their Alexander grading;
//! - iota_1 generators sit on puncture rows (y in Z + 1/2), always inside a
//!   gap column (|x - nearest line| < 1/4), so the curve never separates a
//!   w from the z of the same cell when crossing a row;
//! - stable chains hug their anchor line at offset 1/16; the unstable chain
//!   sits at offset 1/8 and crosses one delta span per drift;
//! - the curve crosses each mid-cell column once per Alexander generator,
//!   which is what makes pairing with the core pattern reproduce HFK-hat.

use std::collections::BTreeMap;

use crate::bordered::{GenTag, Idem, RhoLabel, TypeDStructure, UnstableCase};
use crate::error::{Error, Result};
use crate::geom::{rat, rati, Point, Polyline, Rat};

/// One curve component. For the essential component `verts` holds a single
/// period and the last vertex equals the first translated by `period`;
/// closed components have `period == (0, 0)` and last vertex == first.
#[derive(Debug, Clone)]
pub struct Component {
    pub verts: Vec<Point>,
    pub period: (i64, i64),
    /// Generator positions in traversal order: (gen index, lift position).
    pub marks: Vec<(usize, Point)>,
    /// Row crossings in traversal order: (row level y, x position, upward?).
    pub row_crossings: Vec<(Rat, Rat, bool)>,
}

impl Component {
    pub fn is_essential(&self) -> bool {
        self.period != (0, 0)
    }

    /// Segments of one fundamental piece of this component.
    pub fn segments(&self) -> impl Iterator<Item = crate::geom::Segment> + '_ {
        self.verts
            .windows(2)
            .map(|w| crate::geom::Segment::new(w[0], w[1]))
    }
}

#[derive(Debug, Clone)]
pub struct ImmersedMulticurve {
    pub components: Vec<Component>,
    /// Alexander band of every iota_0 generator of the source structure.
    pub bands: Vec<Option<i64>>,
    pub gen_names: Vec<String>,
}

// Offsets of the documented template set.
fn hug() -> Rat {
    rat(1, 16)
}
fn mu_off() -> Rat {
    rat(1, 8)
}
fn lobe_off() -> Rat {
    rat(7, 8)
}
fn box_jit() -> Rat {
    rat(1, 8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ChainKind {
    Kappa,
    Lambda,
    MuPos,
    MuNeg,
    Rho12,
}

/// A maximal run of iota_1 generators between two anchors of a cycle, in
/// chain-internal order (position 1 first).
#[derive(Debug, Clone)]
struct Chain {
    kind: ChainKind,
    /// iota_1 generators, chain order (empty for Rho12).
    gens: Vec<usize>,
    /// Anchor at the chain start (xi / eta / xi0 per kind).
    head: usize,
    /// Anchor at the chain end.
    tail: usize,
    /// True if the cycle traversal runs head -> tail.
    forward: bool,
}

/// A cycle parsed into alternating anchors and chains. anchors[i] is the
/// anchor before chains[i] in traversal order.
#[derive(Debug, Clone)]
struct ParsedCycle {
    anchors: Vec<usize>,
    chains: Vec<Chain>,
}

fn adjacency(d: &TypeDStructure) -> Result<Vec<Vec<(usize, bool)>>> {
    // (edge index, attached at from-end?)
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); d.gens.len()];
    for (ei, e) in d.edges.iter().enumerate() {
        adj[e.from].push((ei, true));
        adj[e.to].push((ei, false));
    }
    for (gi, g) in d.gens.iter().enumerate() {
        if adj[gi].len() != 2 {
            return Err(Error::Valence(format!(
                "generator {} has edge degree {}",
                g.name,
                adj[gi].len()
            )));
        }
    }
    Ok(adj)
}

/// Walk the valence-2 graph into cycles of (edge, traversed-forward) pairs.
fn trace_cycles(d: &TypeDStructure) -> Result<Vec<Vec<(usize, bool)>>> {
    let adj = adjacency(d)?;
    let mut used = vec![false; d.edges.len()];
    let mut cycles = Vec::new();
    for start in 0..d.edges.len() {
        if used[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut edge = start;
        let mut forward = true;
        loop {
            used[edge] = true;
            cycle.push((edge, forward));
            let e = &d.edges[edge];
            let arrived = if forward { e.to } else { e.from };
            // Leave through the other incident edge-endpoint at `arrived`.
            let slots: Vec<(usize, bool)> = adj[arrived]
                .iter()
                .copied()
                .filter(|&(ei, at_from)| {
                    // the endpoint we came in on: (edge, !forward ... )
                    !(ei == edge && at_from != forward)
                })
                .collect();
            // For a self-loop both endpoints belong to the same edge.
            let (next_edge, at_from) = if d.edges[edge].from == d.edges[edge].to && slots.len() == 2
            {
                // leave via the same edge's other end
                (edge, forward)
            } else {
                slots[0]
            };
            let next_forward = at_from;
            if used[next_edge] && !(next_edge == start && {
                // closing the cycle
                let e2 = &d.edges[next_edge];
                let from2 = if next_forward { e2.from } else { e2.to };
                from2 == arrived
            }) {
                // We must have closed the loop exactly at start.
            }
            if next_edge == start && next_forward {
                break;
            }
            if used[next_edge] {
                // Closed through the start edge in reverse or inconsistent.
                if next_edge == start {
                    break;
                }
                return Err(Error::Valence("cycle tracing failed".into()));
            }
            edge = next_edge;
            forward = next_forward;
        }
        cycles.push(cycle);
    }
    Ok(cycles)
}

/// Split a traced cycle into anchors and classified chains.
fn parse_cycle(d: &TypeDStructure, cycle: &[(usize, bool)]) -> Result<ParsedCycle> {
    // Rotate so the cycle starts at an edge leaving an iota_0 generator.
    let start = cycle
        .iter()
        .position(|&(ei, fwd)| {
            let e = &d.edges[ei];
            let src = if fwd { e.from } else { e.to };
            d.gens[src].idem == Idem::I0
        })
        .ok_or_else(|| {
            Error::Valence("component without iota_0 generators".into())
        })?;
    let rotated: Vec<(usize, bool)> =
        cycle[start..].iter().chain(cycle[..start].iter()).copied().collect();

    let mut anchors = Vec::new();
    let mut chains = Vec::new();
    let mut i = 0;
    while i < rotated.len() {
        let (ei, fwd) = rotated[i];
        let e = &d.edges[ei];
        let src = if fwd { e.from } else { e.to };
        debug_assert_eq!(d.gens[src].idem, Idem::I0);
        anchors.push(src);

        // Collect the run of iota_1 generators until the next iota_0.
        let mut run: Vec<(usize, bool)> = vec![(ei, fwd)];
        let mut j = i;
        loop {
            let (ej, fj) = rotated[j];
            let ee = &d.edges[ej];
            let dst = if fj { ee.to } else { ee.from };
            if d.gens[dst].idem == Idem::I0 {
                break;
            }
            j += 1;
            run.push(rotated[j]);
        }
        let (el, fl) = rotated[j];
        let e_last = &d.edges[el];
        let dst = if fl { e_last.to } else { e_last.from };

        // Classify by boundary labels read in chain-internal direction.
        let first_label = d.edges[run[0].0].label;
        let last_label = d.edges[run[run.len() - 1].0].label;
        let first_fwd = run[0].1;

        let chain = if run.len() == 1 && first_label == RhoLabel::R12 {
            Chain {
                kind: ChainKind::Rho12,
                gens: vec![],
                head: if first_fwd { src } else { dst },
                tail: if first_fwd { dst } else { src },
                forward: first_fwd,
            }
        } else {
            // The chain-internal orientation starts at the rho_1/rho_3/
            // rho_123 anchor edge. Determine whether the traversal runs
            // with it or against it.
            let head_side_label = if first_fwd { first_label } else { last_label };
            let tail_side_label = if first_fwd { last_label } else { first_label };
            let (kind, fl_head, _fl_tail) = match (head_side_label, tail_side_label) {
                (RhoLabel::R1, RhoLabel::R123) => (ChainKind::Kappa, RhoLabel::R1, RhoLabel::R123),
                (RhoLabel::R123, RhoLabel::R1) => (ChainKind::Kappa, RhoLabel::R1, RhoLabel::R123),
                (RhoLabel::R3, RhoLabel::R2) => (ChainKind::Lambda, RhoLabel::R3, RhoLabel::R2),
                (RhoLabel::R2, RhoLabel::R3) => (ChainKind::Lambda, RhoLabel::R3, RhoLabel::R2),
                (RhoLabel::R1, RhoLabel::R3) => (ChainKind::MuPos, RhoLabel::R1, RhoLabel::R3),
                (RhoLabel::R3, RhoLabel::R1) => (ChainKind::MuPos, RhoLabel::R1, RhoLabel::R3),
                (RhoLabel::R123, RhoLabel::R2) => (ChainKind::MuNeg, RhoLabel::R123, RhoLabel::R2),
                (RhoLabel::R2, RhoLabel::R123) => (ChainKind::MuNeg, RhoLabel::R123, RhoLabel::R2),
                other => {
                    return Err(Error::Valence(format!(
                        "unrecognized chain boundary labels {:?}",
                        other
                    )))
                }
            };
            // The head anchor is the one meeting the edge labeled fl_head.
            let head_edge = if d.edges[run[0].0].label == fl_head { run[0] } else { run[run.len() - 1] };
            let he = &d.edges[head_edge.0];
            let head_anchor = if d.gens[he.from].idem == Idem::I0 { he.from } else { he.to };
            let (head, tail) = if head_anchor == src { (src, dst) } else { (dst, src) };
            // iota_1 generators in chain order (position 1 adjacent to head).
            let mut gens: Vec<usize> = Vec::new();
            for &(ek, fk) in &run {
                let ee = &d.edges[ek];
                for g in [ee.from, ee.to] {
                    if d.gens[g].idem == Idem::I1 && gens.last() != Some(&g) && !gens.contains(&g) {
                        gens.push(g);
                    }
                }
                let _ = fk;
            }
            let traversal_forward = head == src;
            if !traversal_forward {
                gens.reverse();
                // keep chain order head->tail
                gens.reverse();
            }
            // `gens` currently in traversal order; chain order is
            // head -> tail, so reverse when traversal ran tail -> head.
            let mut chain_gens = gens;
            if !traversal_forward {
                chain_gens.reverse();
            }
            Chain { kind, gens: chain_gens, head, tail, forward: traversal_forward }
        };
        chains.push(chain);
        i = j + 1;
    }
    Ok(ParsedCycle { anchors, chains })
}

/// Band (Alexander height) of every anchor of a parsed cycle, taken from
/// the Xi tags and checked against the chain structure.
fn anchor_bands(d: &TypeDStructure, pc: &ParsedCycle) -> Result<BTreeMap<usize, i64>> {
    let mut bands = BTreeMap::new();
    for &a in &pc.anchors {
        match d.gens[a].tag {
            GenTag::Xi { alexander, .. } => {
                bands.insert(a, alexander);
            }
            _ => {
                return Err(Error::Valence(format!(
                    "iota_0 generator {} lacks an Alexander grading tag",
                    d.gens[a].name
                )))
            }
        }
    }
    // Consistency with chain lengths.
    for ch in &pc.chains {
        let (h, t) = (bands[&ch.head], bands[&ch.tail]);
        let len = ch.gens.len() as i64;
        let ok = match ch.kind {
            ChainKind::Kappa => t == h - len,
            ChainKind::Lambda => t == h + len,
            ChainKind::MuPos => t == h - len,
            ChainKind::MuNeg => t == h + len,
            ChainKind::Rho12 => t == h,
        };
        if !ok {
            return Err(Error::Invariant(format!(
                "chain between {} and {} is inconsistent with Alexander tags",
                d.gens[ch.head].name, d.gens[ch.tail].name
            )));
        }
    }
    Ok(bands)
}

/// Interior drift directions for the unstable chain: +1 east / -1 west per
/// interior staircase band, symmetric under negation, summing with the two
/// outer steps to a net one-column period.
fn drift_directions(interior: &[i64]) -> Result<BTreeMap<i64, i64>> {
    let mut pos: Vec<i64> = interior.iter().copied().filter(|&b| b > 0).collect();
    pos.sort_unstable_by(|a, b| b.cmp(a));
    let mut dirs = BTreeMap::new();
    let mut s = 0i64;
    for (i, &b) in pos.iter().enumerate() {
        let dir = if i % 2 == 0 { 1 } else { -1 };
        dirs.insert(b, dir);
        dirs.insert(-b, dir);
        s += dir;
    }
    if interior.contains(&0) {
        let d0 = 1 - 2 * s;
        if d0.abs() != 1 {
            return Err(Error::Unsupported(
                "cannot balance unstable drift directions".into(),
            ));
        }
        dirs.insert(0, d0);
    } else if 2 * s != 1 && !interior.is_empty() {
        // Without a band-0 generator the balance cannot close; no bundled
        // companion reaches this.
        return Err(Error::Unsupported(
            "staircase without a band-0 generator".into(),
        ));
    }
    Ok(dirs)
}

struct Emitter {
    verts: Vec<Point>,
    marks: Vec<(usize, Point)>,
    rows: Vec<(Rat, Rat, bool)>,
}

impl Emitter {
    fn new() -> Self {
        Emitter { verts: Vec::new(), marks: Vec::new(), rows: Vec::new() }
    }

    fn push(&mut self, p: Point) {
        if self.verts.last() == Some(&p) {
            return;
        }
        if let Some(&prev) = self.verts.last() {
            // Record row crossings: half-integer y levels crossed by the
            // segment prev -> p (including a touchdown endpoint exactly on
            // a row, counted once when we leave it).
            let lo = if prev.y < p.y { prev.y } else { p.y };
            let hi = if prev.y < p.y { p.y } else { prev.y };
            let up = p.y > prev.y;
            // rows are at j + 1/2
            let mut level = (lo + rat(1, 2)).floor() + rat(1, 2);
            while level <= hi {
                if level > lo || level == prev.y {
                    // x at the crossing
                    let t = if p.y == prev.y {
                        rati(0)
                    } else {
                        (level - prev.y) / (p.y - prev.y)
                    };
                    let x = prev.x + t * (p.x - prev.x);
                    if level > lo && level < hi || level == prev.y || level == p.y {
                        self.rows.push((level, x, up));
                    }
                }
                level += rati(1);
            }
        }
        self.verts.push(p);
    }

    fn mark(&mut self, gen: usize, p: Point) {
        self.marks.push((gen, p));
    }
}

/// Deduplicate row touchdown records: a vertex exactly on a row produces a
/// record from both incident segments; keep one per location.
fn dedup_rows(rows: Vec<(Rat, Rat, bool)>) -> Vec<(Rat, Rat, bool)> {
    let mut out: Vec<(Rat, Rat, bool)> = Vec::new();
    for r in rows {
        if let Some(last) = out.last() {
            if last.0 == r.0 && last.1 == r.1 {
                continue;
            }
        }
        out.push(r);
    }
    // The closing vertex may duplicate the opening one.
    if out.len() > 1 {
        let first = out[0];
        let last = *out.last().unwrap();
        if first.0 == last.0 && first.1 == last.1 {
            out.pop();
        }
    }
    out
}

fn lay_out_essential(
    d: &TypeDStructure,
    pc: &ParsedCycle,
    bands: &BTreeMap<usize, i64>,
) -> Result<Component> {
    // Locate the unstable chain.
    let upos = pc
        .chains
        .iter()
        .position(|c| matches!(c.kind, ChainKind::MuPos | ChainKind::MuNeg | ChainKind::Rho12));
    let Some(upos) = upos else {
        return Err(Error::Valence("essential cycle without unstable chain".into()));
    };
    let unstable = pc.chains[upos].clone();

    // Rotate the cycle so traversal starts at xi0 and runs through the
    // unstable chain first.
    let n = pc.chains.len();
    let mut order: Vec<usize> = (0..n).map(|i| (upos + i) % n).collect();
    if !unstable.forward {
        // Traverse the cycle in the opposite direction so the unstable
        // chain is walked head (xi0) -> tail (eta0).
        order = (0..n).map(|i| (upos + n - i) % n).collect();
    }

    let xi0 = unstable.head;
    let mut line: BTreeMap<usize, i64> = BTreeMap::new();
    line.insert(xi0, 0);

    // Interior staircase bands: all anchors except xi0 / eta0.
    let interior: Vec<i64> = pc
        .anchors
        .iter()
        .filter(|&&a| a != unstable.head && a != unstable.tail)
        .map(|a| bands[a])
        .collect();
    let dirs = drift_directions(&interior)?;

    let mut em = Emitter::new();
    let b_xi0 = bands[&xi0];
    let start = Point::new(rati(0), rati(b_xi0));
    em.push(start);
    em.mark(xi0, start);

    // Walk chains in order, emitting geometry. Every anchor position is
    // (line, band); the final chain arrives back at xi0 shifted by the
    // period, so its line is exempt from the conflict check.
    let last_step = order.len() - 1;
    for (step, &ci) in order.iter().enumerate() {
        let ch = &pc.chains[ci];
        let is_final = step == last_step;
        // Determine traversal direction for this pass: with `order` as
        // constructed, chain `ci` is walked from the anchor we currently
        // stand on.
        let here = *em.marks.last().map(|(g, _)| g).unwrap();
        let (from, to, head_first) = if ch.head == here && (step > 0 || ch.head != ch.tail) {
            (ch.head, ch.tail, true)
        } else if ch.tail == here {
            (ch.tail, ch.head, false)
        } else {
            (ch.head, ch.tail, true)
        };
        let lf = *line.get(&from).ok_or_else(|| {
            Error::Invariant("anchor visited before its line is known".into())
        })?;
        let from_pt = Point::new(rati(lf), rati(bands[&from]));
        debug_assert_eq!(em.verts.last(), Some(&from_pt));

        match ch.kind {
            ChainKind::Rho12 => {
                // Horizontal arc one cell west (in chain direction
                // head -> tail). Traversed backwards it goes east.
                let dx = if head_first { -1 } else { 1 };
                let lt = lf + dx;
                let to_pt = Point::new(rati(lt), rati(bands[&to]));
                em.push(to_pt);
                em.mark(to, to_pt);
                if !is_final {
                    if let Some(&prev) = line.get(&to) {
                        if prev != lt {
                            return Err(Error::Invariant(
                                "line conflict at rho12 chain".into(),
                            ));
                        }
                    }
                    line.insert(to, lt);
                }
            }
            ChainKind::Kappa | ChainKind::Lambda => {
                // Hug the shared anchor line.
                let lt = lf;
                let side = if ch.kind == ChainKind::Kappa { -hug() } else { hug() };
                let x = rati(lf) + side;
                // Rows from head band going down (kappa) or up (lambda).
                let bh = bands[&ch.head];
                let klen = ch.gens.len() as i64;
                let rows: Vec<Rat> = (0..klen)
                    .map(|j| {
                        if ch.kind == ChainKind::Kappa {
                            rati(bh) - rat(1, 2) - rati(j)
                        } else {
                            rati(bh) + rat(1, 2) + rati(j)
                        }
                    })
                    .collect();
                let mut idxs: Vec<usize> = (0..ch.gens.len()).collect();
                if !head_first {
                    idxs.reverse();
                }
                for &j in &idxs {
                    let p = Point::new(x, rows[j]);
                    em.push(p);
                    em.mark(ch.gens[j], p);
                }
                let to_pt = Point::new(rati(lt), rati(bands[&to]));
                em.push(to_pt);
                em.mark(to, to_pt);
                if !is_final {
                    if let Some(&prev) = line.get(&to) {
                        if prev != lt {
                            return Err(Error::Invariant(format!(
                                "line conflict at anchor {}",
                                d.gens[to].name
                            )));
                        }
                    }
                    line.insert(to, lt);
                }
            }
            ChainKind::MuPos | ChainKind::MuNeg => {
                // The unstable chain. Only ever traversed head (xi0) first
                // by construction of `order`.
                if !head_first {
                    return Err(Error::Invariant("unstable chain traversed backwards".into()));
                }
                let positive = ch.kind == ChainKind::MuPos;
                let outer = if positive { -1i64 } else { 1 };
                // Gap for mu_1 and the arrival side.
                let mut gap = lf + outer;
                let mut side: i64 = -outer; // arrive from the line we left
                let bh = bands[&ch.head];
                let m = ch.gens.len() as i64;
                for j in 0..m {
                    // mu_{j+1} sits at row bh -/+ (j + 1/2).
                    let row = if positive {
                        rati(bh) - rat(1, 2) - rati(j)
                    } else {
                        rati(bh) + rat(1, 2) + rati(j)
                    };
                    if j > 0 {
                        // Band crossed between mu_j and mu_{j+1}. The
                        // negative case is the point reflection of the
                        // positive one, so its drifts flip direction.
                        let band = if positive { bh - j } else { bh + j };
                        if let Some(&dir) = dirs.get(&band) {
                            let dir = if positive { dir } else { -dir };
                            gap += dir;
                            side = -dir;
                        }
                    }
                    let x = rati(gap) + rati(side) * mu_off();
                    let p = Point::new(x, row);
                    em.push(p);
                    em.mark(ch.gens[j as usize], p);
                }
                // Exit arc to eta0.
                let lt = gap + outer;
                let to_pt = Point::new(rati(lt), rati(bands[&to]));
                em.push(to_pt);
                em.mark(to, to_pt);
                if !is_final {
                    if let Some(&prev) = line.get(&to) {
                        if prev != lt {
                            return Err(Error::Invariant("line conflict at eta0".into()));
                        }
                    }
                    line.insert(to, lt);
                }
            }
        }
    }

    // Period check: the walk must return to xi0 shifted by one column.
    let end = *em.verts.last().unwrap();
    let per_x = end.x - rati(b_xi0) * rati(0) - start.x;
    if end.y != start.y || (per_x != rati(1) && per_x != rati(-1)) {
        return Err(Error::Invariant(format!(
            "essential component period is ({}, {}), expected (+-1, 0)",
            end.x - start.x,
            end.y - start.y
        )));
    }
    let period = ((end.x - start.x).to_integer(), 0);

    Ok(Component {
        verts: em.verts,
        period,
        marks: em.marks,
        row_crossings: dedup_rows(em.rows),
    })
}

fn lay_out_box(
    d: &TypeDStructure,
    pc: &ParsedCycle,
    bands: &BTreeMap<usize, i64>,
    jitter_index: i64,
) -> Result<Component> {
    if pc.anchors.len() != 4 || pc.chains.len() != 4 {
        return Err(Error::Unsupported(format!(
            "closed component with {} anchors; only 4-anchor boxes are supported",
            pc.anchors.len()
        )));
    }
    // Identify the top anchor.
    let &a_top = pc
        .anchors
        .iter()
        .max_by_key(|&&g| (bands[&g], std::cmp::Reverse(d.gens[g].name.clone())))
        .unwrap();
    // Rotate chains so traversal starts at a_top along its kappa chain.
    let n = 4;
    let start_ci = pc
        .chains
        .iter()
        .position(|c| {
            c.kind == ChainKind::Kappa && (c.head == a_top)
        })
        .ok_or_else(|| Error::Unsupported("box without a kappa chain at its top".into()))?;
    // Traversal direction: kappa head-first.
    let fwd = pc.chains[start_ci].forward;
    let order: Vec<usize> = if fwd {
        (0..n).map(|i| (start_ci + i) % n).collect()
    } else {
        (0..n).map(|i| (start_ci + n - i) % n).collect()
    };
    // Expect pattern kappa, lambda, kappa, lambda with anchors
    // a -> b -> d -> c -> a.
    let ch0 = &pc.chains[order[0]];
    let (a, b) = (ch0.head, ch0.tail);
    let ch1 = &pc.chains[order[1]];
    if ch1.kind != ChainKind::Lambda || ch1.tail != b {
        return Err(Error::Unsupported("box chain pattern not recognized".into()));
    }
    let dgen = ch1.head;
    let ch2 = &pc.chains[order[2]];
    if ch2.kind != ChainKind::Kappa || ch2.tail != dgen {
        return Err(Error::Unsupported("box chain pattern not recognized".into()));
    }
    let c = ch2.head;
    let ch3 = &pc.chains[order[3]];
    if ch3.kind != ChainKind::Lambda || ch3.head != c || ch3.tail != a {
        return Err(Error::Unsupported("box chain pattern not recognized".into()));
    }
    let (ba, bb, bc, bd) = (bands[&a], bands[&b], bands[&c], bands[&dgen]);
    if bb != bc {
        return Err(Error::Unsupported(
            "non-square box summands are not supported".into(),
        ));
    }

    let jit = rati(jitter_index) * rat(1, 64);
    let lx = rati(0);

    let p_a = Point::new(lx, rati(ba));
    let p_b = Point::new(lx, rati(bb) + box_jit());
    let p_c = Point::new(lx, rati(bc) - box_jit());
    let p_d = Point::new(lx, rati(bd));

    let mut em = Emitter::new();
    em.push(p_a);
    em.mark(a, p_a);
    // kappa^a: east hug from a down to b.
    let xk = lx + mu_off() + jit;
    for (j, &g) in ch0.gens.iter().enumerate() {
        let p = Point::new(xk, rati(ba) - rat(1, 2) - rati(j as i64));
        em.push(p);
        em.mark(g, p);
    }
    em.push(p_b);
    em.mark(b, p_b);
    // lambda^d traversed b -> d: west hug going down.
    let xl = lx - mu_off() - jit;
    for (j, &g) in ch1.gens.iter().rev().enumerate() {
        let p = Point::new(xl, rati(bb) - rat(1, 2) - rati(j as i64));
        em.push(p);
        em.mark(g, p);
    }
    em.push(p_d);
    em.mark(dgen, p_d);
    // kappa^c traversed d -> c: east lobe.
    let xe = lx + lobe_off() + jit;
    for (j, &g) in ch2.gens.iter().rev().enumerate() {
        let p = Point::new(xe, rati(bd) + rat(1, 2) + rati(j as i64));
        em.push(p);
        em.mark(g, p);
    }
    em.push(p_c);
    em.mark(c, p_c);
    // lambda^c traversed c -> a: west lobe.
    let xw = lx - lobe_off() - jit;
    for (j, &g) in ch3.gens.iter().enumerate() {
        let p = Point::new(xw, rati(bc) + rat(1, 2) + rati(j as i64));
        em.push(p);
        em.mark(g, p);
    }
    em.push(p_a);

    Ok(Component {
        verts: em.verts,
        period: (0, 0),
        marks: em.marks,
        row_crossings: dedup_rows(em.rows),
    })
}

/// Convert a valence-2 type D structure into an immersed multicurve.
pub fn graph_to_curve(d: &TypeDStructure) -> Result<ImmersedMulticurve> {
    let cycles = trace_cycles(d)?;
    let mut components = Vec::new();
    let mut bands_out: Vec<Option<i64>> = vec![None; d.gens.len()];
    let mut box_count = 0i64;
    for cycle in &cycles {
        let pc = parse_cycle(d, cycle)?;
        let bands = anchor_bands(d, &pc)?;
        for (&g, &b) in &bands {
            bands_out[g] = Some(b);
        }
        let has_unstable = pc
            .chains
            .iter()
            .any(|c| matches!(c.kind, ChainKind::MuPos | ChainKind::MuNeg | ChainKind::Rho12));
        let comp = if has_unstable {
            lay_out_essential(d, &pc, &bands)?
        } else {
            box_count += 1;
            lay_out_box(d, &pc, &bands, box_count - 1)?
        };
        components.push(comp);
    }
    let essential_count = components.iter().filter(|c| c.is_essential()).count();
    if essential_count != 1 {
        return Err(Error::Invariant(format!(
            "expected exactly one essential component, found {essential_count}"
        )));
    }
    let mc = ImmersedMulticurve {
        components,
        bands: bands_out,
        gen_names: d.gens.iter().map(|g| g.name.clone()).collect(),
    };
    validate_multicurve(&mc)?;
    Ok(mc)
}

/// Mid-column crossing multiset: band -> count of transverse crossings of
/// the vertical line x = 1/2 (mod 1), over one period of the essential
/// component and all lifts of closed components.
pub fn mid_column_bands(mc: &ImmersedMulticurve) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for comp in &mc.components {
        for seg in comp.segments() {
            let (lo, hi) = if seg.a.x <= seg.b.x { (seg.a.x, seg.b.x) } else { (seg.b.x, seg.a.x) };
            // columns x = k + 1/2 strictly inside (lo, hi)
            let mut col = (lo - rat(1, 2)).floor() + rat(1, 2);
            while col <= hi {
                if col > lo && col < hi {
                    let t = (col - seg.a.x) / (seg.b.x - seg.a.x);
                    let y = seg.a.y + t * (seg.b.y - seg.a.y);
                    let band = (y + rat(1, 2)).floor().to_integer();
                    *out.entry(band).or_insert(0) += 1;
                }
                col += rati(1);
            }
        }
    }
    out
}

/// Structural checks: punctures avoided, row crossings inside gap columns,
/// mid-column crossings matching the Alexander band multiset.
fn validate_multicurve(mc: &ImmersedMulticurve) -> Result<()> {
    for comp in &mc.components {
        for (level, x, _) in &comp.row_crossings {
            let _ = level;
            let frac = x - x.floor();
            if frac >= rat(1, 4) && frac <= rat(3, 4) {
                return Err(Error::Degeneracy(format!(
                    "row crossing at x = {x} enters the delta span"
                )));
            }
        }
        for seg in comp.segments() {
            // No vertex of the polyline may be a puncture; punctures sit at
            // x in Z +- 1/4, y in Z + 1/2.
            for p in [seg.a, seg.b] {
                let fy = p.y - p.y.floor();
                let fx = p.x - p.x.floor();
                if fy == rat(1, 2) && (fx == rat(1, 4) || fx == rat(3, 4)) {
                    return Err(Error::Degeneracy(format!(
                        "curve vertex lies on a puncture at ({}, {})",
                        p.x, p.y
                    )));
                }
            }
        }
    }
    // Mid-column crossings must reproduce the Alexander band multiset.
    let mut expect: BTreeMap<i64, usize> = BTreeMap::new();
    for b in mc.bands.iter().flatten() {
        *expect.entry(*b).or_insert(0) += 1;
    }
    let got = mid_column_bands(mc);
    if got != expect {
        return Err(Error::Degeneracy(format!(
            "mid-column band multiset {:?} does not match Alexander multiset {:?}",
            got, expect
        )));
    }
    Ok(())
}

/// tau, epsilon and genus read from the multicurve.
pub fn curve_invariants(mc: &ImmersedMulticurve) -> Result<(i64, i64, i64)> {
    let essential = mc
        .components
        .iter()
        .find(|c| c.is_essential())
        .ok_or_else(|| Error::ShapeNotRecognized("no essential component".into()))?;

    // Genus: half the number of puncture rows between min and max heights
    // over the whole multicurve.
    let mut ymin = essential.verts[0].y;
    let mut ymax = ymin;
    for comp in &mc.components {
        for v in &comp.verts {
            if v.y < ymin {
                ymin = v.y;
            }
            if v.y > ymax {
                ymax = v.y;
            }
        }
    }
    let mut rows = 0i64;
    let mut level = (ymin - rat(1, 2)).floor() + rat(1, 2) + rati(1);
    while level < ymax {
        rows += 1;
        level += rati(1);
    }
    if rows % 2 != 0 {
        return Err(Error::ShapeNotRecognized(format!(
            "odd number of rows ({rows}) spanned by the multicurve"
        )));
    }
    let genus = rows / 2;

    // tau and epsilon from the essential component's row crossings.
    let rc = &essential.row_crossings;
    if rc.is_empty() {
        return Ok((0, 0, genus));
    }
    // Maximal monotone run in the cyclic direction sequence.
    let n = rc.len();
    let mut best = 1usize;
    for s in 0..n {
        let mut len = 1;
        for k in 1..n {
            if rc[(s + k) % n].2 == rc[s].2 {
                len += 1;
            } else {
                break;
            }
        }
        best = best.max(len);
    }
    if best % 2 != 0 || best == n {
        return Err(Error::ShapeNotRecognized(format!(
            "monotone run of length {best} among {n} row crossings"
        )));
    }
    let tau_abs = (best / 2) as i64;

    // Sign: locate a top turn (an up-crossing of the highest row followed
    // cyclically by a down-crossing of the same row) and compare x
    // positions: heading west means tau > 0.
    let top = rc.iter().map(|r| r.0).max().unwrap();
    let per_x = rati(essential.period.0);
    let mut tau_sign = 0i64;
    for i in 0..n {
        let cur = &rc[i];
        let next = &rc[(i + 1) % n];
        if cur.0 == top && cur.2 && next.0 == top && !next.2 {
            // When the turn wraps past the fundamental domain, the next
            // crossing lives one period over.
            let next_x = if i + 1 == n { next.1 + per_x } else { next.1 };
            tau_sign = if next_x < cur.1 { 1 } else { -1 };
            break;
        }
    }
    if tau_sign == 0 {
        return Err(Error::ShapeNotRecognized("no top turn found".into()));
    }
    let tau = tau_sign * tau_abs;
    let epsilon = tau_sign;
    Ok((tau, epsilon, genus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bordered::build_cfd;
    use crate::cfk::{epsilon_from_cfk, genus_from_cfk, parse_cfk, tau_from_cfk};
    use crate::companions;
    use num_traits::Signed;

    fn curve_for(text: &str) -> ImmersedMulticurve {
        let c = parse_cfk(text).unwrap();
        let d = build_cfd(&c, 0).unwrap();
        graph_to_curve(&d).unwrap()
    }

    #[test]
    fn unknot_is_a_horizontal_line() {
        let mc = curve_for(companions::UNKNOT);
        assert_eq!(mc.components.len(), 1);
        let comp = &mc.components[0];
        assert!(comp.is_essential());
        assert!(comp.verts.iter().all(|v| v.y == rati(0)));
        assert_eq!(curve_invariants(&mc).unwrap(), (0, 0, 0));
    }

    #[test]
    fn trefoil_curve_shape() {
        let mc = curve_for(companions::T23);
        assert_eq!(mc.components.len(), 1, "no closed components for T(2,3)");
        let comp = &mc.components[0];
        assert!(comp.is_essential());
        // Spans two peg rows.
        assert_eq!(curve_invariants(&mc).unwrap(), (1, 1, 1));
    }

    #[test]
    fn left_trefoil_curve() {
        let mc = curve_for(companions::T2_3);
        assert_eq!(curve_invariants(&mc).unwrap(), (-1, -1, 1));
    }

    #[test]
    fn t34_curve() {
        let mc = curve_for(companions::T34);
        assert_eq!(mc.components.len(), 1);
        assert_eq!(curve_invariants(&mc).unwrap(), (3, 1, 3));
    }

    #[test]
    fn figure8_curve_has_a_closed_component() {
        let mc = curve_for(companions::FIGURE8);
        assert_eq!(mc.components.len(), 2);
        let closed: Vec<_> = mc.components.iter().filter(|c| !c.is_essential()).collect();
        assert_eq!(closed.len(), 1);
        assert_eq!(curve_invariants(&mc).unwrap(), (0, 0, 1));
    }

    #[test]
    fn curve_invariants_match_cfk_for_all_companions() {
        for (name, text) in companions::ALL {
            let c = parse_cfk(text).unwrap();
            let d = build_cfd(&c, 0).unwrap();
            let mc = graph_to_curve(&d).unwrap();
            let (tau, eps, g) = curve_invariants(&mc).unwrap();
            assert_eq!(tau, tau_from_cfk(&c).unwrap(), "tau mismatch for {name}");
            assert_eq!(eps, epsilon_from_cfk(&c), "epsilon mismatch for {name}");
            assert_eq!(g, genus_from_cfk(&c), "genus mismatch for {name}");
        }
    }

    #[test]
    fn component_count_equals_cycle_count() {
        for (_, text) in companions::ALL {
            let c = parse_cfk(text).unwrap();
            let d = build_cfd(&c, 0).unwrap();
            let mc = graph_to_curve(&d).unwrap();
            let expected = 1 + c.gen_count().saturating_sub(
                1 + c.vertical.len() + c.horizontal.len(),
            );
            // staircase is one cycle; each box contributes one more
            let boxes = mc.components.iter().filter(|c| !c.is_essential()).count();
            assert_eq!(mc.components.len(), boxes + 1);
            let _ = expected;
        }
    }

    #[test]
    fn valence_error_reported() {
        // A three-valent structure: duplicate an edge endpoint.
        let c = parse_cfk(companions::T23).unwrap();
        let mut d = build_cfd(&c, 0).unwrap();
        let e = d.edges[0];
        d.edges.push(e);
        match graph_to_curve(&d) {
            Err(Error::Valence(_)) => {}
            other => panic!("expected valence error, got {other:?}"),
        }
    }

    #[test]
    fn involution_symmetry_of_bundled_curves() {
        use std::collections::BTreeSet;
        // Essential components are exactly symmetric as segment sets under
        // (x, y) -> (-x, -y). Closed box components are symmetric only up
        // to the waist jitter (the conjugation fixes both middle
        // generators, and an exactly symmetric embedding would force a
        // triple point on the essential line), so for the whole multicurve
        // the crossing data is checked instead.
        for (name, text) in companions::ALL {
            let c = parse_cfk(text).unwrap();
            let d = build_cfd(&c, 0).unwrap();
            let mc = graph_to_curve(&d).unwrap();
            for comp in mc.components.iter().filter(|c| c.is_essential()) {
                let mut segs: BTreeSet<(Point, Point)> = BTreeSet::new();
                for k in -8..=8i64 {
                    for seg in comp.segments() {
                        let a = seg.a.translate(rati(k * comp.period.0), rati(0));
                        let b = seg.b.translate(rati(k * comp.period.0), rati(0));
                        let key = if a <= b { (a, b) } else { (b, a) };
                        segs.insert(key);
                    }
                }
                for &(a, b) in &segs {
                    let (na, nb) = (a.negate(), b.negate());
                    let key = if na <= nb { (na, nb) } else { (nb, na) };
                    let window = rati(4);
                    if na.x.abs() < window && nb.x.abs() < window {
                        assert!(
                            segs.contains(&key),
                            "{name}: involution image of segment {a:?}-{b:?} missing"
                        );
                    }
                }
            }
            // Crossing-level symmetry for the full multicurve.
            let mids = mid_column_bands(&mc);
            for (&b, &m) in &mids {
                assert_eq!(
                    mids.get(&-b).copied().unwrap_or(0),
                    m,
                    "{name}: mid-column band multiset not symmetric"
                );
            }
            let mut rows: Vec<Rat> = Vec::new();
            for comp in &mc.components {
                for (level, _, _) in &comp.row_crossings {
                    rows.push(*level);
                }
            }
            let mut neg: Vec<Rat> = rows.iter().map(|r| -*r).collect();
            rows.sort();
            neg.sort();
            assert_eq!(rows, neg, "{name}: row-crossing levels not symmetric");
        }
    }
}
