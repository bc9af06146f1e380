//! Triangular site lattice with its hexagonal dual, the square bond lattice,
//! and the finite domains built on them.
//!
//! Hexagon geometry is never stored. Hex-lattice vertices live in tripled
//! axial coordinates: the vertex shared by three mutually adjacent sites is
//! the sum of their axial coordinates, so every interface computation is
//! integer arithmetic.

use std::fmt;

use crate::error::{Error, Result};

/// Axial coordinates. Position is `(u + v/2, √3 v/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub u: i32,
    pub v: i32,
}

/// Neighbor offsets in counterclockwise order starting east.
pub const DIRECTIONS: [Site; 6] = [
    Site { u: 1, v: 0 },
    Site { u: 0, v: 1 },
    Site { u: -1, v: 1 },
    Site { u: -1, v: 0 },
    Site { u: 0, v: -1 },
    Site { u: 1, v: -1 },
];

impl Site {
    pub const ORIGIN: Site = Site { u: 0, v: 0 };

    pub const fn new(u: i32, v: i32) -> Site {
        Site { u, v }
    }

    #[inline]
    pub fn add(self, o: Site) -> Site {
        Site::new(self.u + o.u, self.v + o.v)
    }

    #[inline]
    pub fn sub(self, o: Site) -> Site {
        Site::new(self.u - o.u, self.v - o.v)
    }

    /// Rotation by 60° counterclockwise, as a lattice vector.
    #[inline]
    pub fn rot60(self) -> Site {
        Site::new(-self.v, self.u + self.v)
    }

    pub fn neighbors(self) -> [Site; 6] {
        DIRECTIONS.map(|d| self.add(d))
    }

    pub fn position(self) -> (f64, f64) {
        (
            self.u as f64 + 0.5 * self.v as f64,
            0.5 * 3f64.sqrt() * self.v as f64,
        )
    }

    /// Squared Euclidean distance to the origin.
    pub fn norm2(self) -> i64 {
        let (u, v) = (self.u as i64, self.v as i64);
        u * u + u * v + v * v
    }

    /// The six corners of the dual hexagon, counterclockwise from the
    /// corner between the east and north-east neighbors.
    pub fn hexagon(self) -> [HexVertex; 6] {
        std::array::from_fn(|i| {
            let d = DIRECTIONS[i].add(DIRECTIONS[(i + 1) % 6]);
            HexVertex::new(3 * self.u + d.u, 3 * self.v + d.v)
        })
    }

    /// Key for the counter-based generator.
    #[inline]
    pub fn key(self) -> u64 {
        ((self.u as u32 as u64) << 32) | self.v as u32 as u64
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

/// The third site of the triangle ahead of the oriented pair `(l, r)`:
/// walking along the edge between them with `l` on the left, the head of
/// the edge is the triangle `{l, r, third(l, r)}`.
#[inline]
pub fn third(l: Site, r: Site) -> Site {
    l.add(r.sub(l).rot60())
}

/// A vertex of the hexagonal lattice, i.e. a triangle of sites, stored as
/// the sum of the three sites' axial coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HexVertex {
    pub a: i32,
    pub b: i32,
}

impl HexVertex {
    pub const fn new(a: i32, b: i32) -> HexVertex {
        HexVertex { a, b }
    }

    pub fn of_triangle(p: Site, q: Site, s: Site) -> HexVertex {
        HexVertex::new(p.u + q.u + s.u, p.v + q.v + s.v)
    }

    /// Head vertex of the oriented pair `(l, r)`.
    #[inline]
    pub fn head(l: Site, r: Site) -> HexVertex {
        HexVertex::of_triangle(l, r, third(l, r))
    }

    /// Tail vertex of the oriented pair `(l, r)`.
    #[inline]
    pub fn tail(l: Site, r: Site) -> HexVertex {
        let t = third(l, r);
        HexVertex::of_triangle(l, r, l.add(r).sub(t))
    }

    /// Upward triangles are `{(u,v), (u+1,v), (u,v+1)}`.
    #[inline]
    pub fn is_up(self) -> bool {
        self.a.rem_euclid(3) == 1
    }

    pub fn cells(self) -> [Site; 3] {
        if self.is_up() {
            let (u, v) = ((self.a - 1).div_euclid(3), (self.b - 1).div_euclid(3));
            [Site::new(u, v), Site::new(u + 1, v), Site::new(u, v + 1)]
        } else {
            let (u, v) = ((self.a - 2).div_euclid(3), (self.b - 2).div_euclid(3));
            [Site::new(u + 1, v), Site::new(u, v + 1), Site::new(u + 1, v + 1)]
        }
    }

    /// The neighboring vertex across the edge opposite to the cell `s`.
    #[inline]
    pub fn across(self, s: Site) -> HexVertex {
        HexVertex::new(2 * self.a - 3 * s.u, 2 * self.b - 3 * s.v)
    }

    /// Scaled Cartesian coordinates `(X, Y)` with `x = X/6`, `y = √3·Y/6`.
    #[inline]
    pub fn scaled(self) -> (i64, i64) {
        (2 * self.a as i64 + self.b as i64, self.b as i64)
    }

    pub fn position(self) -> (f64, f64) {
        let (x, y) = self.scaled();
        (x as f64 / 6.0, 3f64.sqrt() * y as f64 / 6.0)
    }
}

/// Scaled coordinates of a site center, on the same scale as
/// [`HexVertex::scaled`].
#[inline]
pub fn site_scaled(s: Site) -> (i64, i64) {
    (6 * s.u as i64 + 3 * s.v as i64, 3 * s.v as i64)
}

/// `36 (x1 x2 + y1 y2)` for points in scaled coordinates.
#[inline]
pub fn qdot(p: (i64, i64), q: (i64, i64)) -> i128 {
    p.0 as i128 * q.0 as i128 + 3 * p.1 as i128 * q.1 as i128
}

/// Whether the closed segment `[p, q]` meets the closed disk of radius
/// `radius` around the origin.
pub fn segment_meets_disk(p: (i64, i64), q: (i64, i64), radius: u32) -> bool {
    let lim = 36 * (radius as i128) * (radius as i128);
    let d = (q.0 - p.0, q.1 - p.1);
    let pd = qdot(p, d);
    let dd = qdot(d, d);
    if pd >= 0 || dd == 0 {
        qdot(p, p) <= lim
    } else if -pd >= dd {
        qdot(q, q) <= lim
    } else {
        qdot(p, p) * dd - pd * pd <= lim * dd
    }
}

/// Whether the hexagon of `s` meets the closed disk of radius `radius`.
pub fn hex_meets_disk(s: Site, radius: u32) -> bool {
    if s == Site::ORIGIN {
        return true;
    }
    let h = s.hexagon();
    (0..6).any(|i| segment_meets_disk(h[i].scaled(), h[(i + 1) % 6].scaled(), radius))
}

/// Whether the hexagon of `s` lies in the open disk of radius `radius`.
pub fn hex_inside_open_disk(s: Site, radius: u32) -> bool {
    let lim = 36 * (radius as i128) * (radius as i128);
    s.hexagon().iter().all(|v| {
        let p = v.scaled();
        qdot(p, p) < lim
    })
}

/// Smallest integer radius whose closed disk meets the hexagon of `s`.
pub fn hex_level(s: Site) -> u32 {
    if s == Site::ORIGIN {
        return 0;
    }
    let approx = (s.norm2() as f64).sqrt() - 1.0;
    let mut r = approx.max(0.0).floor() as u32;
    while r > 0 && hex_meets_disk(s, r - 1) {
        r -= 1;
    }
    while !hex_meets_disk(s, r) {
        r += 1;
    }
    r
}

/// A bond of the square lattice with lexicographically ordered endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bond {
    pub a: (i32, i32),
    pub b: (i32, i32),
}

impl Bond {
    pub fn new(p: (i32, i32), q: (i32, i32)) -> Result<Bond> {
        let d = (p.0 - q.0).abs() + (p.1 - q.1).abs();
        if d != 1 {
            return Err(Error::InvalidParameter(format!(
                "bond endpoints {p:?} and {q:?} are not adjacent"
            )));
        }
        Ok(if p < q { Bond { a: p, b: q } } else { Bond { a: q, b: p } })
    }

    /// Position of the bond's square in the medial grid.
    pub fn medial(self) -> (i32, i32) {
        (self.a.0 + self.b.0, self.a.1 + self.b.1)
    }

    pub fn key(self) -> u64 {
        let (x, y) = self.medial();
        (1 << 63) | ((x as u32 as u64 & 0x7fff_ffff) << 32) | y as u32 as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    Site(Site),
    Bond(Bond),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    TriangularSite,
    SquareBond,
}

/// Radii are in lattice units. `Box` on the square lattice is the
/// `(side+1) × side` bond box, which is self-dual.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainKind {
    Box { side: u32 },
    /// Sites `0 ≤ u, v < width`; left/right are `u = 0` and `u = width-1`.
    Rhombus { width: u32 },
    Annulus { r: u32, big_r: u32 },
    HalfPlaneAnnulus { r: u32, big_r: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arc {
    Left,
    Right,
    Top,
    Bottom,
    Inner,
    Outer,
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Arc::Left => "left",
            Arc::Right => "right",
            Arc::Top => "top",
            Arc::Bottom => "bottom",
            Arc::Inner => "inner",
            Arc::Outer => "outer",
        };
        f.write_str(s)
    }
}

pub mod marks {
    pub const INNER: u8 = 1;
    pub const OUTER: u8 = 2;
    pub const LEFT: u8 = 4;
    pub const RIGHT: u8 = 8;
    pub const TOP: u8 = 16;
    pub const BOTTOM: u8 = 32;
    /// Adjacent to a cell strictly inside the inner radius. Always a subset
    /// of `INNER`, which is "hexagon meets the closed inner disk".
    pub const HOLE: u8 = 64;
}

pub fn arc_mark(arc: Arc) -> u8 {
    match arc {
        Arc::Inner => marks::INNER,
        Arc::Outer => marks::OUTER,
        Arc::Left => marks::LEFT,
        Arc::Right => marks::RIGHT,
        Arc::Top => marks::TOP,
        Arc::Bottom => marks::BOTTOM,
    }
}

/// Node of the connectivity graph: a variable bit or a fixed color.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeState {
    Bit(u32),
    White,
    Black,
}

/// Connectivity graph shared by all events. On the triangular lattice the
/// nodes are the sites. On the square lattice the nodes are the squares of
/// the medial grid: vertex squares are white, face squares black, bond
/// squares carry the bond's bit, and 4-adjacency gives primal connectivity
/// for white and dual connectivity for black.
#[derive(Clone, Debug)]
pub struct CellGraph {
    offsets: Vec<u32>,
    targets: Vec<u32>,
    state: Vec<NodeState>,
    marks: Vec<u8>,
}

impl CellGraph {
    pub fn len(&self) -> usize {
        self.state.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.is_empty()
    }

    #[inline]
    pub fn neighbors(&self, n: usize) -> &[u32] {
        &self.targets[self.offsets[n] as usize..self.offsets[n + 1] as usize]
    }

    #[inline]
    pub fn state(&self, n: usize) -> NodeState {
        self.state[n]
    }

    #[inline]
    pub fn marks(&self, n: usize) -> u8 {
        self.marks[n]
    }

    /// Node color under `bits` (true = white/open).
    #[inline]
    pub fn white(&self, bits: &[bool], n: usize) -> bool {
        match self.state[n] {
            NodeState::Bit(i) => bits[i as usize],
            NodeState::White => true,
            NodeState::Black => false,
        }
    }

    /// Node colors as a dense vector.
    pub fn colors(&self, bits: &[bool]) -> Vec<bool> {
        (0..self.len()).map(|n| self.white(bits, n)).collect()
    }

    /// Node carrying bit `i`, if any.
    pub fn node_of_bit(&self, i: usize) -> Option<usize> {
        self.state
            .iter()
            .position(|s| *s == NodeState::Bit(i as u32))
    }

    fn build(adj: Vec<Vec<u32>>, state: Vec<NodeState>, marks: Vec<u8>) -> CellGraph {
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for a in adj {
            targets.extend(a);
            offsets.push(targets.len() as u32);
        }
        CellGraph { offsets, targets, state, marks }
    }
}

/// Dense lookup over a bounding box of integer pairs.
#[derive(Clone, Debug)]
struct Grid {
    x0: i32,
    y0: i32,
    w: i32,
    h: i32,
    slot: Vec<u32>,
}

impl Grid {
    fn new(points: impl Iterator<Item = (i32, i32)> + Clone) -> Grid {
        let (mut x0, mut y0, mut x1, mut y1) = (i32::MAX, i32::MAX, i32::MIN, i32::MIN);
        for (x, y) in points.clone() {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            return Grid { x0: 0, y0: 0, w: 0, h: 0, slot: vec![] };
        }
        let (w, h) = (x1 - x0 + 1, y1 - y0 + 1);
        let mut g = Grid { x0, y0, w, h, slot: vec![u32::MAX; (w * h) as usize] };
        for (i, (x, y)) in points.enumerate() {
            let k = g.pos(x, y).unwrap();
            g.slot[k] = i as u32;
        }
        g
    }

    #[inline]
    fn pos(&self, x: i32, y: i32) -> Option<usize> {
        let (dx, dy) = (x - self.x0, y - self.y0);
        if dx < 0 || dy < 0 || dx >= self.w || dy >= self.h {
            None
        } else {
            Some((dy * self.w + dx) as usize)
        }
    }

    #[inline]
    fn get(&self, x: i32, y: i32) -> Option<usize> {
        self.pos(x, y).and_then(|k| {
            let s = self.slot[k];
            (s != u32::MAX).then_some(s as usize)
        })
    }
}

/// Side of the box (or rhombus) that an exterior site belongs to.
pub fn chordal_side(kind: DomainKind, s: Site) -> Arc {
    match kind {
        DomainKind::Box { side } => {
            let x2 = 2 * s.u + s.v;
            if x2 <= 0 {
                Arc::Left
            } else if x2 >= 2 * side as i32 {
                Arc::Right
            } else if s.v <= 0 {
                Arc::Bottom
            } else {
                Arc::Top
            }
        }
        DomainKind::Rhombus { width } => {
            let w = width as i32;
            if s.u < 0 {
                Arc::Left
            } else if s.u >= w {
                Arc::Right
            } else if s.v < 0 {
                Arc::Bottom
            } else {
                Arc::Top
            }
        }
        _ => Arc::Outer,
    }
}

fn box_contains(side: u32, s: Site) -> bool {
    let x_max = 6 * side as i64;
    let y2_max = 12 * (side as i64) * (side as i64);
    s.hexagon().iter().all(|v| {
        let (x, y) = v.scaled();
        (0..=x_max).contains(&x) && y >= 0 && y * y <= y2_max
    })
}

/// Whether `s` belongs to the disk-like region used by the radial
/// exploration (hexagons meeting the closed disk of radius `big_r`).
#[inline]
pub fn in_disk_region(s: Site, big_r: u32) -> bool {
    hex_meets_disk(s, big_r)
}

#[derive(Clone, Debug)]
pub struct Domain {
    kind: DomainKind,
    lattice: LatticeKind,
    sites: Vec<Site>,
    bonds: Vec<Bond>,
    keys: Vec<u64>,
    graph: CellGraph,
    grid: Grid,
}

impl Domain {
    pub fn new(kind: DomainKind, lattice: LatticeKind) -> Result<Domain> {
        match (kind, lattice) {
            (DomainKind::Annulus { r, big_r } | DomainKind::HalfPlaneAnnulus { r, big_r }, _) => {
                if r == 0 || big_r == 0 {
                    return Err(Error::InvalidDomain("annulus radii must be positive".into()));
                }
                if r >= big_r {
                    return Err(Error::InvalidDomain(format!(
                        "annulus needs r < R, got r = {r}, R = {big_r}"
                    )));
                }
            }
            (DomainKind::Box { side }, LatticeKind::TriangularSite) if side < 2 => {
                return Err(Error::InvalidDomain(format!(
                    "a triangular box of side {side} contains no hexagon; the minimum side is 2"
                )));
            }
            (DomainKind::Box { side }, LatticeKind::SquareBond) if side < 1 => {
                return Err(Error::InvalidDomain("bond box side must be at least 1".into()));
            }
            (DomainKind::Rhombus { width }, _) if width < 1 => {
                return Err(Error::InvalidDomain("rhombus width must be at least 1".into()));
            }
            _ => {}
        }
        match lattice {
            LatticeKind::TriangularSite => Domain::triangular(kind),
            LatticeKind::SquareBond => Domain::square(kind),
        }
    }

    pub fn triangular_box(side: u32) -> Result<Domain> {
        Domain::new(DomainKind::Box { side }, LatticeKind::TriangularSite)
    }

    pub fn annulus(r: u32, big_r: u32) -> Result<Domain> {
        Domain::new(DomainKind::Annulus { r, big_r }, LatticeKind::TriangularSite)
    }

    fn triangular(kind: DomainKind) -> Result<Domain> {
        let mut sites = Vec::new();
        match kind {
            DomainKind::Box { side } => {
                let vmax = (2.0 * side as f64 / 3f64.sqrt()).ceil() as i32 + 1;
                for v in 0..=vmax {
                    for u in (-v / 2 - 1)..=(side as i32 + 1) {
                        let s = Site::new(u, v);
                        if box_contains(side, s) {
                            sites.push(s);
                        }
                    }
                }
            }
            DomainKind::Rhombus { width } => {
                for v in 0..width as i32 {
                    for u in 0..width as i32 {
                        sites.push(Site::new(u, v));
                    }
                }
            }
            DomainKind::Annulus { r, big_r } | DomainKind::HalfPlaneAnnulus { r, big_r } => {
                let half = matches!(kind, DomainKind::HalfPlaneAnnulus { .. });
                let m = 2 * big_r as i32 + 2;
                let vmin = if half { 0 } else { -m };
                for v in vmin..=m {
                    for u in -m..=m {
                        let s = Site::new(u, v);
                        if in_disk_region(s, big_r) && !hex_inside_open_disk(s, r) {
                            sites.push(s);
                        }
                    }
                }
            }
        }
        if sites.is_empty() {
            return Err(Error::InvalidDomain(format!("{kind:?} contains no cells")));
        }
        let grid = Grid::new(sites.iter().map(|s| (s.u, s.v)));
        let mut adj = Vec::with_capacity(sites.len());
        let mut mk = Vec::with_capacity(sites.len());
        for &s in &sites {
            let mut a = Vec::with_capacity(6);
            let mut m = 0u8;
            for n in s.neighbors() {
                match grid.get(n.u, n.v) {
                    Some(j) => a.push(j as u32),
                    None => m |= exterior_mark(kind, s, n),
                }
            }
            if let DomainKind::Annulus { r, .. } | DomainKind::HalfPlaneAnnulus { r, .. } = kind {
                if hex_meets_disk(s, r) {
                    m |= marks::INNER;
                }
                if matches!(kind, DomainKind::HalfPlaneAnnulus { .. }) && s.v == 0 {
                    m |= if s.u > 0 { marks::RIGHT } else { marks::LEFT };
                }
            }
            adj.push(a);
            mk.push(m);
        }
        let state = (0..sites.len()).map(|i| NodeState::Bit(i as u32)).collect();
        let keys = sites.iter().map(|s| s.key()).collect();
        Ok(Domain {
            kind,
            lattice: LatticeKind::TriangularSite,
            graph: CellGraph::build(adj, state, mk),
            sites,
            bonds: vec![],
            keys,
            grid,
        })
    }

    fn square(kind: DomainKind) -> Result<Domain> {
        // Medial squares: (even, even) vertex, (odd, odd) face, mixed bond.
        let mut nodes: Vec<(i32, i32)> = Vec::new();
        let in_domain: Box<dyn Fn(i32, i32) -> bool> = match kind {
            DomainKind::Box { side } => {
                let m = side as i32;
                Box::new(move |x: i32, y: i32| {
                    let (ex, ey) = (x.rem_euclid(2) == 0, y.rem_euclid(2) == 0);
                    let in_x = (0..=2 * m).contains(&x);
                    let in_y = (0..=2 * m - 2).contains(&y);
                    if !(in_x && in_y) {
                        return false;
                    }
                    // vertical bonds on the two side columns are absent
                    !(ex && !ey && (x == 0 || x == 2 * m))
                })
            }
            DomainKind::Annulus { r, big_r } => {
                let (r2, big2) = ((r as i64).pow(2), (big_r as i64).pow(2));
                Box::new(move |x: i32, y: i32| {
                    let corners = medial_corners(x, y);
                    let outer_ok = corners.iter().all(|&(cx, cy)| {
                        (cx as i64).pow(2) + (cy as i64).pow(2) <= big2
                    });
                    let all_hole = corners.iter().all(|&(cx, cy)| {
                        (cx as i64).pow(2) + (cy as i64).pow(2) < r2
                    });
                    outer_ok && !all_hole
                })
            }
            _ => {
                return Err(Error::InvalidDomain(format!(
                    "{kind:?} is not available on the square lattice"
                )))
            }
        };
        let ext = match kind {
            DomainKind::Box { side } => 2 * side as i32 + 1,
            DomainKind::Annulus { big_r, .. } => 2 * big_r as i32 + 1,
            _ => unreachable!(),
        };
        for y in -ext..=ext {
            for x in -ext..=ext {
                if in_domain(x, y) {
                    nodes.push((x, y));
                }
            }
        }
        let grid = Grid::new(nodes.iter().copied());
        let mut bonds = Vec::new();
        let mut state = Vec::with_capacity(nodes.len());
        for &(x, y) in &nodes {
            let (ex, ey) = (x.rem_euclid(2) == 0, y.rem_euclid(2) == 0);
            state.push(match (ex, ey) {
                (true, true) => NodeState::White,
                (false, false) => NodeState::Black,
                _ => {
                    let (p, q) = if ex {
                        ((x / 2, (y - 1).div_euclid(2)), (x / 2, (y + 1).div_euclid(2)))
                    } else {
                        (((x - 1).div_euclid(2), y / 2), ((x + 1).div_euclid(2), y / 2))
                    };
                    bonds.push(Bond::new(p, q)?);
                    NodeState::Bit(bonds.len() as u32 - 1)
                }
            });
        }
        let mut adj = Vec::with_capacity(nodes.len());
        let mut mk = Vec::with_capacity(nodes.len());
        for &(x, y) in &nodes {
            let mut a = Vec::with_capacity(4);
            let mut m = 0u8;
            for (dx, dy) in [(1, 0), (0, 1), (-1, 0), (0, -1)] {
                let (nx, ny) = (x + dx, y + dy);
                match grid.get(nx, ny) {
                    Some(j) => a.push(j as u32),
                    None => {
                        m |= match kind {
                            DomainKind::Box { side } => {
                                if ny < 0 {
                                    marks::BOTTOM
                                } else if ny > 2 * side as i32 - 2 {
                                    marks::TOP
                                } else {
                                    0
                                }
                            }
                            DomainKind::Annulus { r, big_r } => {
                                let d2 = (nx as i64).pow(2) + (ny as i64).pow(2);
                                if d2 < ((r + big_r) as i64).pow(2) {
                                    marks::INNER | marks::HOLE
                                } else {
                                    marks::OUTER
                                }
                            }
                            _ => 0,
                        }
                    }
                }
            }
            // On the bond box the side arcs are the two vertex columns.
            if let DomainKind::Box { side } = kind {
                if x == 0 && y % 2 == 0 {
                    m |= marks::LEFT;
                }
                if x == 2 * side as i32 && y % 2 == 0 {
                    m |= marks::RIGHT;
                }
            }
            adj.push(a);
            mk.push(m);
        }
        let keys = bonds.iter().map(|b| b.key()).collect();
        Ok(Domain {
            kind,
            lattice: LatticeKind::SquareBond,
            graph: CellGraph::build(adj, state, mk),
            sites: vec![],
            bonds,
            keys,
            grid,
        })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn lattice(&self) -> LatticeKind {
        self.lattice
    }

    /// Number of cells, i.e. bits of a configuration.
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn cells(&self) -> Vec<Cell> {
        match self.lattice {
            LatticeKind::TriangularSite => self.sites.iter().map(|&s| Cell::Site(s)).collect(),
            LatticeKind::SquareBond => self.bonds.iter().map(|&b| Cell::Bond(b)).collect(),
        }
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    #[inline]
    pub fn key(&self, i: usize) -> u64 {
        self.keys[i]
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn graph(&self) -> &CellGraph {
        &self.graph
    }

    /// Index of a triangular site in this domain.
    #[inline]
    pub fn index_of(&self, s: Site) -> Option<usize> {
        match self.lattice {
            LatticeKind::TriangularSite => self.grid.get(s.u, s.v),
            LatticeKind::SquareBond => None,
        }
    }

    /// Index of a bond in this domain.
    pub fn index_of_bond(&self, b: Bond) -> Option<usize> {
        match self.graph.state(self.grid.get(b.medial().0, b.medial().1)?) {
            NodeState::Bit(i) => Some(i as usize),
            _ => None,
        }
    }

    pub fn is_annulus(&self) -> bool {
        matches!(
            self.kind,
            DomainKind::Annulus { .. } | DomainKind::HalfPlaneAnnulus { .. }
        )
    }

    /// Arc labels that make sense for this domain, in priority order.
    pub fn arcs(&self) -> &'static [Arc] {
        match self.kind {
            DomainKind::Box { .. } | DomainKind::Rhombus { .. } => {
                &[Arc::Left, Arc::Right, Arc::Bottom, Arc::Top]
            }
            DomainKind::Annulus { .. } => &[Arc::Inner, Arc::Outer],
            DomainKind::HalfPlaneAnnulus { .. } => &[Arc::Inner, Arc::Outer, Arc::Right, Arc::Left],
        }
    }

    /// Boundary nodes of the connectivity graph on the given arc. Arcs of a
    /// decomposition are disjoint: a corner node goes to the first arc of
    /// [`Domain::arcs`] that it touches. On the triangular lattice nodes are
    /// cell indices.
    pub fn boundary_arc(&self, arc: Arc) -> Result<Vec<usize>> {
        let arcs = self.arcs();
        let pos = arcs
            .iter()
            .position(|&a| a == arc)
            .ok_or_else(|| Error::InvalidArc(arc.to_string()))?;
        let want = arc_mark(arc);
        let before: u8 = arcs[..pos].iter().map(|&a| arc_mark(a)).fold(0, |x, y| x | y);
        Ok((0..self.graph.len())
            .filter(|&n| {
                let m = self.graph.marks(n);
                m & want != 0 && m & before == 0
            })
            .collect())
    }
}

fn exterior_mark(kind: DomainKind, _s: Site, n: Site) -> u8 {
    match kind {
        DomainKind::Box { .. } | DomainKind::Rhombus { .. } => arc_mark(chordal_side(kind, n)),
        DomainKind::Annulus { r, big_r } | DomainKind::HalfPlaneAnnulus { r, big_r } => {
            if hex_inside_open_disk(n, r) {
                marks::HOLE
            } else if !in_disk_region(n, big_r) {
                marks::OUTER
            } else {
                // below the half-plane base
                0
            }
        }
    }
}

fn medial_corners(x: i32, y: i32) -> Vec<(i32, i32)> {
    let xs: Vec<i32> = if x.rem_euclid(2) == 0 { vec![x / 2] } else { vec![(x - 1).div_euclid(2), (x + 1).div_euclid(2)] };
    let ys: Vec<i32> = if y.rem_euclid(2) == 0 { vec![y / 2] } else { vec![(y - 1).div_euclid(2), (y + 1).div_euclid(2)] };
    let mut out = Vec::with_capacity(4);
    for &cx in &xs {
        for &cy in &ys {
            out.push((cx, cy));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_is_counterclockwise_ahead() {
        let l = Site::new(0, 0);
        let r = Site::new(1, 0);
        assert_eq!(third(l, r), Site::new(0, 1));
        assert_eq!(HexVertex::head(l, r), HexVertex::new(1, 1));
        assert_eq!(HexVertex::tail(l, r), HexVertex::new(2, -1));
    }

    #[test]
    fn vertex_cells_roundtrip() {
        for u in -4..4 {
            for v in -4..4 {
                let s = Site::new(u, v);
                for h in s.hexagon() {
                    let c = h.cells();
                    assert!(c.contains(&s), "{s} not in cells of {h:?}");
                    assert_eq!(HexVertex::of_triangle(c[0], c[1], c[2]), h);
                }
            }
        }
    }

    #[test]
    fn across_is_neighbor_vertex() {
        let h = HexVertex::new(1, 1);
        let [p, q, s] = h.cells();
        let n = h.across(s);
        let nc = n.cells();
        assert!(nc.contains(&p) && nc.contains(&q) && !nc.contains(&s));
    }

    #[test]
    fn edges_have_unit_length() {
        for d in DIRECTIONS {
            let (x, y) = d.position();
            assert!(((x * x + y * y).sqrt() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn hexagon_vertices_at_circumradius() {
        let s = Site::new(2, -1);
        let (cx, cy) = s.position();
        for h in s.hexagon() {
            let (x, y) = h.position();
            let d = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
            assert!((d - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn hex_level_matches_disk_test() {
        for u in -6..6 {
            for v in -6..6 {
                let s = Site::new(u, v);
                let l = hex_level(s);
                assert!(hex_meets_disk(s, l));
                assert!(l == 0 || !hex_meets_disk(s, l - 1));
            }
        }
    }

    #[test]
    fn box_side_one_is_rejected() {
        assert!(Domain::triangular_box(1).is_err());
        assert_eq!(Domain::triangular_box(2).unwrap().len(), 2);
    }

    #[test]
    fn square_box_counts() {
        for m in [1u32, 2, 5, 8] {
            let d = Domain::new(DomainKind::Box { side: m }, LatticeKind::SquareBond).unwrap();
            let (m, n) = (m as usize, d.len());
            assert_eq!(n, m * m + (m - 1) * (m - 1));
        }
    }
}
