//! Bit-revealing explorations: the chordal interface and box-crossing
//! algorithm, the truncated radial interface and annulus algorithm, and the
//! separation statistic of annulus interfaces.

use crate::error::{Error, Result};
use crate::interfaces;
use crate::lattice::{
    chordal_side, hex_inside_open_disk, hex_meets_disk, segment_meets_disk, third, Arc, Domain,
    DomainKind, HexVertex, LatticeKind, Site,
};
use crate::rng;
use crate::sampler::cell_bit;

/// Colors of individual sites, `true` = white.
pub trait BitSource {
    fn white(&self, s: Site) -> bool;
}

/// The counter-based bits used by `sampler::sample`.
#[derive(Clone, Copy, Debug)]
pub struct HashedBits {
    pub seed: u64,
    pub trial: u64,
    thr: u128,
}

impl HashedBits {
    pub fn new(seed: u64, trial: u64, p: f64) -> HashedBits {
        HashedBits { seed, trial, thr: rng::threshold(p) }
    }
}

impl BitSource for HashedBits {
    #[inline]
    fn white(&self, s: Site) -> bool {
        cell_bit(self.seed, self.trial, s.key(), self.thr)
    }
}

impl<F: Fn(Site) -> bool> BitSource for F {
    fn white(&self, s: Site) -> bool {
        self(s)
    }
}

/// Wraps a bit source and records which sites were examined, in order.
pub struct Revealer<'a> {
    source: &'a dyn BitSource,
    seen: std::collections::HashMap<Site, bool>,
    order: Vec<Site>,
}

impl<'a> Revealer<'a> {
    pub fn new(source: &'a dyn BitSource) -> Revealer<'a> {
        Revealer { source, seen: Default::default(), order: Vec::new() }
    }

    #[inline]
    pub fn query(&mut self, s: Site) -> bool {
        if let Some(&b) = self.seen.get(&s) {
            return b;
        }
        let b = self.source.white(s);
        self.seen.insert(s, b);
        self.order.push(s);
        b
    }

    pub fn revealed(&self) -> &[Site] {
        &self.order
    }

    pub fn into_revealed(self) -> Vec<Site> {
        self.order
    }
}

/// An edge of the hexagonal lattice on the domain boundary, given by the
/// interior site and the exterior site it separates. The starting point is
/// its midpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub inside: Site,
    pub outside: Site,
}

impl BoundaryEdge {
    pub fn endpoints(&self) -> (HexVertex, HexVertex) {
        (
            HexVertex::head(self.inside, self.outside),
            HexVertex::tail(self.inside, self.outside),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminal {
    /// Chordal interface reached this arc.
    Arc(Arc),
    /// Radial interface reached `q0`.
    Target,
    /// Radial interface completed a counterclockwise loop around 0.
    Loop,
    /// The annulus algorithm touched the inner disk.
    InnerDisk,
}

#[derive(Clone, Debug)]
pub struct ExplorationRun {
    pub start: BoundaryEdge,
    /// Hex vertices after the starting midpoint, in order.
    pub path: Vec<HexVertex>,
    /// Examined sites, in order of first examination.
    pub revealed: Vec<Site>,
    pub terminal: Terminal,
    pub outcome: bool,
}

impl ExplorationRun {
    /// Directed edges between consecutive path vertices.
    pub fn edges(&self) -> impl Iterator<Item = (HexVertex, HexVertex)> + '_ {
        self.path.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn is_simple(&self) -> bool {
        let mut v = self.path.clone();
        v.sort();
        v.windows(2).all(|w| w[0] != w[1])
    }
}

// ---------------------------------------------------------------------------
// Chordal interface

/// Boundary edges of a box or rhombus on one arc, in a fixed order.
pub fn chordal_boundary_edges(domain: &Domain, arc: Arc) -> Result<Vec<BoundaryEdge>> {
    chordal_check(domain)?;
    let mut out = Vec::new();
    for &s in domain.sites() {
        for n in s.neighbors() {
            if domain.index_of(n).is_none() && chordal_side(domain.kind(), n) == arc {
                out.push(BoundaryEdge { inside: s, outside: n });
            }
        }
    }
    Ok(out)
}

fn chordal_check(domain: &Domain) -> Result<()> {
    let ok = domain.lattice() == LatticeKind::TriangularSite
        && matches!(domain.kind(), DomainKind::Box { .. } | DomainKind::Rhombus { .. });
    if ok {
        Ok(())
    } else {
        Err(Error::DomainMismatch("chordal exploration needs a triangular box or rhombus".into()))
    }
}

const CCW_ARCS: [Arc; 4] = [Arc::Right, Arc::Top, Arc::Left, Arc::Bottom];

/// Coordinate that increases when moving counterclockwise along `arc`.
fn along(arc: Arc, v: HexVertex) -> i64 {
    let (x, y) = v.scaled();
    match arc {
        Arc::Right => y,
        Arc::Top => -x,
        Arc::Left => -y,
        _ => x,
    }
}

enum Ext {
    White,
    Black,
    Stop(Arc),
}

/// The interface from the midpoint of `start` to the target arcs `zeta`.
///
/// The boundary arc running counterclockwise from the start to `zeta` is
/// treated as white and the clockwise one as black; with `flip` the colors of
/// the interior are exchanged, which turns the same walk into the interface
/// of the complementary configuration.
pub fn chordal_interface(
    domain: &Domain,
    start: BoundaryEdge,
    zeta: &[Arc],
    flip: bool,
    oracle: &mut Revealer<'_>,
) -> Result<ExplorationRun> {
    chordal_check(domain)?;
    let kind = domain.kind();
    if domain.index_of(start.inside).is_none() || domain.index_of(start.outside).is_some() {
        return Err(Error::InvalidParameter("start edge is not on the boundary".into()));
    }
    let a0 = chordal_side(kind, start.outside);
    if zeta.is_empty() || zeta.contains(&a0) {
        return Err(Error::InvalidParameter("target arcs must be nonempty and avoid the start".into()));
    }
    // Position of each arc counterclockwise from the start arc.
    let rank = |a: Arc| {
        let i0 = CCW_ARCS.iter().position(|&x| x == a0).unwrap();
        let i = CCW_ARCS.iter().position(|&x| x == a).unwrap();
        (i + 4 - i0) % 4
    };
    let zr: Vec<usize> = zeta.iter().map(|&a| rank(a)).collect();
    let (zmin, zmax) = (*zr.iter().min().unwrap(), *zr.iter().max().unwrap());
    if zmax - zmin + 1 != zr.len() {
        return Err(Error::InvalidParameter("target arcs must be contiguous".into()));
    }
    let (h, t) = start.endpoints();
    let mid2 = along(a0, h) + along(a0, t);
    let classify = |x: Site, v: HexVertex| -> Ext {
        let a = chordal_side(kind, x);
        let r = rank(a);
        if (zmin..=zmax).contains(&r) {
            Ext::Stop(a)
        } else if r == 0 {
            if 2 * along(a0, v) > mid2 {
                Ext::White
            } else {
                Ext::Black
            }
        } else if r < zmin {
            Ext::White
        } else {
            Ext::Black
        }
    };
    let eff = |s: Site, oracle: &mut Revealer<'_>| oracle.query(s) ^ flip;
    let c = start.inside;
    let (mut l, mut r) = if eff(c, oracle) { (start.outside, c) } else { (c, start.outside) };
    let mut path = Vec::new();
    let cap = 8 * domain.len() + 16;
    loop {
        let x = third(l, r);
        let v = HexVertex::of_triangle(l, r, x);
        path.push(v);
        if path.len() > cap {
            return Err(Error::Oracle("chordal walk did not terminate".into()));
        }
        let white = if domain.index_of(x).is_some() {
            eff(x, oracle)
        } else {
            match classify(x, v) {
                Ext::White => true,
                Ext::Black => false,
                Ext::Stop(a) => {
                    return Ok(ExplorationRun {
                        start,
                        path,
                        revealed: oracle.revealed().to_vec(),
                        terminal: Terminal::Arc(a),
                        outcome: a == Arc::Left,
                    })
                }
            }
        };
        if white {
            r = x;
        } else {
            l = x;
        }
    }
}

/// Result of the box-crossing algorithm.
#[derive(Clone, Debug)]
pub struct BoxCrossingRun {
    pub crossing: bool,
    pub first: ExplorationRun,
    pub second: ExplorationRun,
    /// All sites examined by either interface.
    pub revealed: Vec<Site>,
}

/// The box-crossing algorithm with its starting edge given by index into
/// `chordal_boundary_edges(domain, Arc::Right)`.
pub fn box_crossing_from(
    domain: &Domain,
    edge_index: usize,
    source: &dyn BitSource,
) -> Result<BoxCrossingRun> {
    let edges = chordal_boundary_edges(domain, Arc::Right)?;
    let start = *edges
        .get(edge_index)
        .ok_or_else(|| Error::InvalidParameter(format!("edge index {edge_index} out of range")))?;
    let mut oracle = Revealer::new(source);
    let first = chordal_interface(domain, start, &[Arc::Top, Arc::Left], false, &mut oracle)?;
    let second = chordal_interface(domain, start, &[Arc::Left, Arc::Bottom], true, &mut oracle)?;
    Ok(BoxCrossingRun {
        crossing: first.outcome || second.outcome,
        first,
        second,
        revealed: oracle.into_revealed(),
    })
}

/// Number of possible starting edges of the box-crossing algorithm.
pub fn box_crossing_choices(domain: &Domain) -> Result<usize> {
    Ok(chordal_boundary_edges(domain, Arc::Right)?.len())
}

/// The box-crossing algorithm on the hashed configuration of `(seed, trial)`,
/// with the starting edge drawn from the algorithm's own stream.
pub fn box_crossing_algorithm(domain: &Domain, seed: u64, trial: u64) -> Result<BoxCrossingRun> {
    let n = box_crossing_choices(domain)?;
    let k = rng::index(rng::hash(seed, trial, 0, rng::STREAM_ALGORITHM), n);
    box_crossing_from(domain, k, &HashedBits::new(seed, trial, 0.5))
}

// ---------------------------------------------------------------------------
// Radial interface

/// Ray crossing of the segment `p -> q` (doubled scaled coordinates) with
/// the ray `y = 0, X > x0`, using the half-open rule `y >= 0` as "above".
/// Returns +1 for an upward crossing, -1 for a downward one.
#[inline]
fn ray_cross(p: (i64, i64), q: (i64, i64), x0: i64) -> i32 {
    let (pa, qa) = (p.1 >= 0, q.1 >= 0);
    if pa == qa {
        return 0;
    }
    // crossing abscissa X = (p.x q.y - q.x p.y) / (q.y - p.y)
    let num = p.0 as i128 * q.1 as i128 - q.0 as i128 * p.1 as i128;
    let den = (q.1 - p.1) as i128;
    let beyond = if den > 0 { num > x0 as i128 * den } else { num < x0 as i128 * den };
    if !beyond {
        0
    } else if qa {
        1
    } else {
        -1
    }
}

#[inline]
fn cross(p: (i64, i64), q: (i64, i64)) -> i128 {
    p.0 as i128 * q.1 as i128 - p.1 as i128 * q.0 as i128
}

#[inline]
fn dbl(v: HexVertex) -> (i64, i64) {
    let (x, y) = v.scaled();
    (2 * x, 2 * y)
}

/// Doubled scaled coordinates of the threshold `x = 1/2` (the point `q0`).
const Q0_X: i64 = 6;

/// The disk-like region of hexagons meeting the closed disk of radius `R`,
/// with precomputed boundary data for the radial exploration.
#[derive(Clone, Debug)]
pub struct DiskRegion {
    pub big_r: u32,
    u0: i32,
    v0: i32,
    w: i32,
    h: i32,
    inside: Vec<bool>,
    edges: Vec<BoundaryEdge>,
    /// Counterclockwise boundary loop and per-vertex position.
    loop_vertices: Vec<HexVertex>,
    loop_pos: std::collections::HashMap<HexVertex, usize>,
    /// Prefix crossings of the `q0` ray along the loop.
    loop_cross: Vec<i32>,
}

impl DiskRegion {
    pub fn new(big_r: u32) -> Result<DiskRegion> {
        if big_r < 2 {
            return Err(Error::InvalidDomain("radial exploration needs R >= 2".into()));
        }
        let m = big_r as i32 + 3;
        let (u0, v0, w, h) = (-3 * m, -2 * m, 6 * m + 1, 4 * m + 1);
        let mut inside = vec![false; (w * h) as usize];
        for v in v0..v0 + h {
            for u in u0..u0 + w {
                let s = Site::new(u, v);
                if hex_meets_disk(s, big_r) {
                    inside[((v - v0) * w + (u - u0)) as usize] = true;
                }
            }
        }
        let mut d = DiskRegion {
            big_r,
            u0,
            v0,
            w,
            h,
            inside,
            edges: vec![],
            loop_vertices: vec![],
            loop_pos: Default::default(),
            loop_cross: vec![],
        };
        for v in v0..v0 + h {
            for u in u0..u0 + w {
                let s = Site::new(u, v);
                if d.contains(s) {
                    for n in s.neighbors() {
                        if !d.contains(n) {
                            d.edges.push(BoundaryEdge { inside: s, outside: n });
                        }
                    }
                }
            }
        }
        // Walk the boundary with the region on the left, starting where the
        // positive real axis leaves the region.
        let mut k = 0;
        while d.contains(Site::new(k + 1, 0)) {
            k += 1;
        }
        let (l0, r0) = (Site::new(k, 0), Site::new(k + 1, 0));
        let (mut l, mut r) = (l0, r0);
        loop {
            let x = third(l, r);
            d.loop_vertices.push(HexVertex::of_triangle(l, r, x));
            if d.contains(x) {
                l = x;
            } else {
                r = x;
            }
            if (l, r) == (l0, r0) {
                break;
            }
            if d.loop_vertices.len() > 4 * d.edges.len() + 8 {
                return Err(Error::Oracle("boundary loop did not close".into()));
            }
        }
        let n = d.loop_vertices.len();
        d.loop_cross = vec![0; n + 1];
        for i in 0..n {
            let (p, q) = (dbl(d.loop_vertices[i]), dbl(d.loop_vertices[(i + 1) % n]));
            d.loop_cross[i + 1] = d.loop_cross[i] + ray_cross(p, q, Q0_X);
            d.loop_pos.insert(d.loop_vertices[i], i);
        }
        if d.loop_pos.len() != n || d.loop_cross[n] != 1 {
            return Err(Error::Oracle("boundary loop is not a simple loop around q0".into()));
        }
        Ok(d)
    }

    #[inline]
    pub fn contains(&self, s: Site) -> bool {
        let (du, dv) = (s.u - self.u0, s.v - self.v0);
        du >= 0 && dv >= 0 && du < self.w && dv < self.h && self.inside[(dv * self.w + du) as usize]
    }

    /// Boundary edges, uniformly weighted choices for the start.
    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.edges
    }

    #[inline]
    fn vertex_slot(&self, v: HexVertex) -> usize {
        let [c, ..] = v.cells();
        let (u, vv) = if v.is_up() { (c.u, c.v) } else { (c.u - 1, c.v) };
        let (du, dv) = ((u - self.u0 + 1) as usize, (vv - self.v0 + 1) as usize);
        ((dv * (self.w as usize + 2) + du) << 1) | (!v.is_up()) as usize
    }

    fn slots(&self) -> usize {
        ((self.w as usize + 2) * (self.h as usize + 2)) << 1
    }

    /// Crossings of the `q0` ray along the counterclockwise boundary from
    /// vertex `v` to the midpoint of `e`.
    fn arc_crossings(&self, v: HexVertex, e: BoundaryEdge) -> Option<i32> {
        let n = self.loop_vertices.len();
        let i = *self.loop_pos.get(&v)?;
        let (a, b) = e.endpoints();
        let (pa, pb) = (*self.loop_pos.get(&a)?, *self.loop_pos.get(&b)?);
        let j = if (pa + 1) % n == pb { pa } else { pb };
        let bj = self.loop_vertices[j];
        let mid = (dbl(a).0 / 2 + dbl(b).0 / 2, dbl(a).1 / 2 + dbl(b).1 / 2);
        let along = if i <= j {
            self.loop_cross[j] - self.loop_cross[i]
        } else {
            self.loop_cross[n] - self.loop_cross[i] + self.loop_cross[j]
        };
        Some(along + ray_cross(dbl(bj), mid, Q0_X))
    }
}

/// The fixed target: midpoint of the edge between the origin and `(1, 0)`.
pub const Q0_EDGE: (Site, Site) = (Site::ORIGIN, Site::new(1, 0));

fn is_q0_edge(p: Site, q: Site) -> bool {
    (p, q) == Q0_EDGE || (q, p) == Q0_EDGE
}

/// Reusable buffers for radial explorations on one region.
pub struct RadialExplorer {
    region: DiskRegion,
    stamp: Vec<u32>,
    index: Vec<u32>,
    generation: u32,
    path0: HexVertex,
}

/// What the radial walk should stop on besides `q0` and truncation.
#[derive(Clone, Copy, Debug)]
pub struct RadialOptions {
    /// Stop as soon as the path meets the closed disk of this radius.
    pub stop_radius: Option<u32>,
    /// Disable truncation at counterclockwise loops (for diagnostics).
    pub truncate: bool,
}

impl RadialExplorer {
    pub fn new(big_r: u32) -> Result<RadialExplorer> {
        let region = DiskRegion::new(big_r)?;
        let n = region.slots();
        Ok(RadialExplorer {
            region,
            stamp: vec![0; n],
            index: vec![0; n],
            generation: 0,
            path0: HexVertex::new(0, 0),
        })
    }

    pub fn region(&self) -> &DiskRegion {
        &self.region
    }

    #[inline]
    fn visited(&self, v: HexVertex) -> Option<usize> {
        let k = self.region.vertex_slot(v);
        (self.stamp[k] == self.generation).then(|| self.index[k] as usize)
    }

    #[inline]
    fn visit(&mut self, v: HexVertex, i: usize) {
        let k = self.region.vertex_slot(v);
        self.stamp[k] = self.generation;
        self.index[k] = i as u32;
    }

    /// The radial interface from `start` towards `q0`, truncated at the
    /// first counterclockwise loop around the origin.
    pub fn run(
        &mut self,
        start: BoundaryEdge,
        opts: RadialOptions,
        oracle: &mut Revealer<'_>,
    ) -> Result<ExplorationRun> {
        let reg = &self.region;
        if !reg.contains(start.inside) || reg.contains(start.outside) {
            return Err(Error::InvalidParameter("start edge is not on the region boundary".into()));
        }
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        let inside = |s: Site, reg: &DiskRegion| reg.contains(s);
        let (h, t) = start.endpoints();
        let p0 = (dbl(h).0 / 2 + dbl(t).0 / 2, dbl(h).1 / 2 + dbl(t).1 / 2);

        let c = start.inside;
        let (mut l, mut r) = if oracle.query(c) { (start.outside, c) } else { (c, start.outside) };
        let mut path: Vec<HexVertex> = Vec::new();
        // prefix sums indexed by path position
        let mut cum0: Vec<i32> = Vec::new();
        let mut cumq: Vec<i32> = Vec::new();
        let mut area: Vec<i128> = Vec::new();

        let v = HexVertex::of_triangle(l, r, third(l, r));
        path.push(v);
        self.path0 = v;
        cum0.push(0);
        cumq.push(ray_cross(p0, dbl(v), Q0_X));
        area.push(cross(p0, dbl(v)));
        self.visit(v, 0);
        let finish = |path: Vec<HexVertex>, terminal: Terminal, oracle: &Revealer<'_>, outcome: bool| {
            ExplorationRun { start, path, revealed: oracle.revealed().to_vec(), terminal, outcome }
        };
        let cap = self.stamp.len();
        loop {
            if path.len() > cap {
                return Err(Error::Oracle("radial walk did not terminate".into()));
            }
            let reg = &self.region;
            let vi = path.len() - 1;
            let v = path[vi];
            let x = third(l, r);
            let xin = inside(x, reg);
            // candidate A keeps l on the left (left turn), B keeps r on the right
            let a_exists = inside(l, reg) || xin;
            let b_exists = inside(r, reg) || xin;
            let (va, vb) = (HexVertex::head(l, x), HexVertex::head(x, r));
            let a_q = is_q0_edge(l, x);
            let b_q = is_q0_edge(x, r);
            let a_ok = a_exists && (a_q || self.visited(va).is_none());
            let b_ok = b_exists && (b_q || self.visited(vb).is_none());
            let take_a = match (a_ok, b_ok) {
                (false, false) => {
                    return Err(Error::Oracle(format!("radial walk stuck at {v:?}")));
                }
                (true, false) => true,
                (false, true) => false,
                (true, true) => {
                    let separated = !xin
                        || x.hexagon().iter().any(|&w| w != v && self.visited(w).is_some());
                    if !separated {
                        oracle.query(x)
                    } else if a_q || b_q {
                        a_q
                    } else if !xin {
                        // Left part is bounded by the path and the
                        // counterclockwise boundary arc back to the start.
                        let arc = reg
                            .arc_crossings(v, start)
                            .ok_or_else(|| Error::Oracle("vertex not on boundary loop".into()))?;
                        cumq[vi] + arc == 1
                    } else {
                        let (wi, w) = x
                            .hexagon()
                            .iter()
                            .filter(|&&w| w != v)
                            .find_map(|&w| self.visited(w).map(|i| (i, w)))
                            .unwrap();
                        let (pv, pw) = (dbl(v), dbl(w));
                        let wind = cumq[vi] - cumq[wi] + ray_cross(pv, pw, Q0_X);
                        let signed = area[vi] - area[wi] + cross(pv, pw);
                        (wind != 0) == (signed > 0)
                    }
                }
            };
            let (nl, nr, next, is_q) = if take_a { (l, x, va, a_q) } else { (x, r, vb, b_q) };
            if is_q {
                let outcome = opts.stop_radius.is_some();
                return Ok(finish(path, Terminal::Target, oracle, outcome));
            }
            l = nl;
            r = nr;
            let (pv, pn) = (dbl(v), dbl(next));
            path.push(next);
            let ni = path.len() - 1;
            cum0.push(cum0[ni - 1] + ray_cross(pv, pn, 0));
            cumq.push(cumq[ni - 1] + ray_cross(pv, pn, Q0_X));
            area.push(area[ni - 1] + cross(pv, pn));
            self.visit(next, ni);
            if let Some(rad) = opts.stop_radius {
                if segment_meets_disk(v.scaled(), next.scaled(), rad) {
                    return Ok(finish(path, Terminal::InnerDisk, oracle, true));
                }
            }
            if opts.truncate && self.closes_ccw_loop(next, ni, &cum0, start, p0) {
                return Ok(finish(path, Terminal::Loop, oracle, false));
            }
        }
    }

    /// Whether arriving at `v` completes a counterclockwise loop around 0
    /// through one of the three hexagons at `v`.
    fn closes_ccw_loop(
        &self,
        v: HexVertex,
        vi: usize,
        cum0: &[i32],
        start: BoundaryEdge,
        p0: (i64, i64),
    ) -> bool {
        let pv = dbl(v);
        let through_origin = |p: (i64, i64), q: (i64, i64)| {
            cross(p, q) == 0 && p.0 as i128 * q.0 as i128 + p.1 as i128 * q.1 as i128 <= 0
        };
        for hx in v.cells() {
            // a loop closed through an outside hexagon is not a circuit of cells
            if !self.region.contains(hx) {
                continue;
            }
            // the start point lies on the boundary of both start hexagons
            if (hx == start.inside || hx == start.outside) && !through_origin(pv, p0) {
                let first = dbl(self.path0);
                let wind = cum0[vi] + ray_cross(p0, first, 0) + ray_cross(pv, p0, 0);
                if wind == 1 {
                    return true;
                }
            }
            for u in hx.hexagon() {
                if u == v {
                    continue;
                }
                let Some(ui) = self.visited(u) else { continue };
                if ui >= vi {
                    continue;
                }
                let pu = dbl(u);
                // a chord through the origin does not define a loop around it
                if through_origin(pv, pu) {
                    continue;
                }
                let wind = cum0[vi] - cum0[ui] + ray_cross(pv, pu, 0);
                if wind == 1 {
                    return true;
                }
            }
        }
        false
    }
}

/// The full truncated radial interface on `D̄_R` from a given start edge.
pub fn radial_interface(
    explorer: &mut RadialExplorer,
    start: BoundaryEdge,
    source: &dyn BitSource,
) -> Result<ExplorationRun> {
    let mut oracle = Revealer::new(source);
    explorer.run(start, RadialOptions { stop_radius: None, truncate: true }, &mut oracle)
}

/// Whether any edge of the path (including the half edge from the start)
/// meets the closed disk of radius `r`.
pub fn path_meets_disk(run: &ExplorationRun, r: u32) -> bool {
    let (h, _) = run.start.endpoints();
    run.edges().any(|(a, b)| segment_meets_disk(a.scaled(), b.scaled(), r))
        || run.path.first().is_some_and(|&f| segment_meets_disk(h.scaled(), f.scaled(), r))
        || (run.terminal == Terminal::Target && r >= 1)
}

/// The annulus algorithm: radial interface from a uniform boundary point,
/// stopped when it meets the disk of radius `r`.
pub fn annulus_algorithm(
    explorer: &mut RadialExplorer,
    r: u32,
    seed: u64,
    trial: u64,
) -> Result<ExplorationRun> {
    let big_r = explorer.region.big_r;
    if r < 1 || r >= big_r {
        return Err(Error::InvalidParameter(format!("annulus algorithm needs 1 <= r < R, got r = {r}, R = {big_r}")));
    }
    let edges = explorer.region.boundary_edges();
    let k = rng::index(rng::hash(seed, trial, 0, rng::STREAM_ALGORITHM), edges.len());
    let start = edges[k];
    let bits = HashedBits::new(seed, trial, 0.5);
    let mut oracle = Revealer::new(&bits);
    explorer.run(start, RadialOptions { stop_radius: Some(r), truncate: true }, &mut oracle)
}

// ---------------------------------------------------------------------------
// Revealment

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RevealAlgorithm {
    Box { side: u32 },
    Annulus { r: u32, big_r: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RevealmentRecord {
    pub counts: Vec<u64>,
    pub trials: u64,
}

impl RevealmentRecord {
    pub fn empty(cells: usize) -> RevealmentRecord {
        RevealmentRecord { counts: vec![0; cells], trials: 0 }
    }

    pub fn merge(&mut self, other: &RevealmentRecord) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.trials += other.trials;
    }

    pub fn delta_hat(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        *self.counts.iter().max().unwrap_or(&0) as f64 / self.trials as f64
    }

    pub fn argmax(&self) -> usize {
        let m = *self.counts.iter().max().unwrap_or(&0);
        self.counts.iter().position(|&c| c == m).unwrap_or(0)
    }
}

/// The domain whose cells a revealment record is indexed by.
pub fn reveal_domain(alg: RevealAlgorithm) -> Result<Domain> {
    match alg {
        RevealAlgorithm::Box { side } => Domain::triangular_box(side),
        RevealAlgorithm::Annulus { r, big_r } => Domain::annulus(r, big_r),
    }
}

/// Examination counts over the trial range, with per-trial outcomes.
pub fn measure_revealment_range(
    alg: RevealAlgorithm,
    domain: &Domain,
    seed: u64,
    trials: std::ops::Range<u64>,
) -> Result<(RevealmentRecord, u64)> {
    let mut rec = RevealmentRecord::empty(domain.len());
    let mut positives = 0u64;
    let mut explorer = match alg {
        RevealAlgorithm::Annulus { big_r, .. } => Some(RadialExplorer::new(big_r)?),
        _ => None,
    };
    for t in trials {
        let (revealed, outcome) = match alg {
            RevealAlgorithm::Box { .. } => {
                let run = box_crossing_algorithm(domain, seed, t)?;
                (run.revealed, run.crossing)
            }
            RevealAlgorithm::Annulus { r, .. } => {
                let run = annulus_algorithm(explorer.as_mut().unwrap(), r, seed, t)?;
                (run.revealed, run.outcome)
            }
        };
        for s in revealed {
            if let Some(i) = domain.index_of(s) {
                rec.counts[i] += 1;
            }
        }
        rec.trials += 1;
        positives += outcome as u64;
    }
    Ok((rec, positives))
}

pub fn measure_revealment(alg: RevealAlgorithm, trials: u64, seed: u64) -> Result<RevealmentRecord> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let d = reveal_domain(alg)?;
    Ok(measure_revealment_range(alg, &d, seed, 0..trials)?.0)
}

// ---------------------------------------------------------------------------
// Separation statistic

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparationSample {
    /// Least distance between outer endpoints of two crossing interfaces;
    /// infinite with fewer than two.
    pub s_value: f64,
    pub interface_count: usize,
}

pub fn separation_statistic(config: &crate::sampler::Configuration<'_>) -> Result<SeparationSample> {
    let d = config.domain;
    if d.lattice() != LatticeKind::TriangularSite || !matches!(d.kind(), DomainKind::Annulus { .. }) {
        return Err(Error::DomainMismatch("separation statistic needs a triangular annulus".into()));
    }
    let ends: Vec<(f64, f64)> = interfaces::boundary_arcs(d, &config.bits)
        .iter()
        .filter_map(|a| a.outer_end())
        .map(|v| v.position())
        .collect();
    let mut s = f64::INFINITY;
    for i in 0..ends.len() {
        for j in i + 1..ends.len() {
            let (a, b) = (ends[i], ends[j]);
            s = s.min(((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt());
        }
    }
    Ok(SeparationSample { s_value: s, interface_count: ends.len() })
}

/// Sites whose hexagon touches a path vertex (or the start edge).
pub fn sites_near_path(run: &ExplorationRun) -> std::collections::HashSet<Site> {
    let mut out: std::collections::HashSet<Site> = run.path.iter().flat_map(|v| v.cells()).collect();
    out.insert(run.start.inside);
    out.insert(run.start.outside);
    out
}

/// Helper for tests and tools: the site is strictly inside the inner disk.
pub fn in_hole(s: Site, r: u32) -> bool {
    hex_inside_open_disk(s, r)
}
