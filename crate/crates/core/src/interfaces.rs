//! Boundary-to-boundary interfaces of a configuration on a triangular annulus.
//!
//! An interface is a maximal path in the hexagonal 1-skeleton with black
//! hexagons on its left and white ones on its right. Inside the annulus every
//! such path either closes up or runs between two boundary vertices, where a
//! boundary vertex is a triangle with exactly one site outside the domain.

use crate::lattice::{hex_inside_open_disk, third, Domain, DomainKind, HexVertex, Site};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InterfaceArc {
    pub start: HexVertex,
    pub end: HexVertex,
    /// Whether the endpoint is on the inner boundary.
    pub start_inner: bool,
    pub end_inner: bool,
    pub steps: usize,
}

impl InterfaceArc {
    pub fn crosses(&self) -> bool {
        self.start_inner != self.end_inner
    }

    /// The endpoint on the outer boundary, when the arc crosses.
    pub fn outer_end(&self) -> Option<HexVertex> {
        match (self.start_inner, self.end_inner) {
            (true, false) => Some(self.end),
            (false, true) => Some(self.start),
            _ => None,
        }
    }
}

/// All interface arcs between boundary points of an annulus, each listed once
/// from its tail.
pub fn boundary_arcs(domain: &Domain, bits: &[bool]) -> Vec<InterfaceArc> {
    let r = match domain.kind() {
        DomainKind::Annulus { r, .. } | DomainKind::HalfPlaneAnnulus { r, .. } => r,
        _ => 0,
    };
    let inner = |s: Site| hex_inside_open_disk(s, r);
    let white = |s: Site| domain.index_of(s).map(|i| bits[i]);
    let mut out = Vec::new();
    for (i, &p) in domain.sites().iter().enumerate() {
        if bits[i] {
            continue;
        }
        for q in p.neighbors() {
            if white(q) != Some(true) {
                continue;
            }
            let t = third(p, q);
            let back = p.add(q).sub(t);
            if white(back).is_some() {
                continue;
            }
            let start = HexVertex::of_triangle(p, q, back);
            let (mut l, mut rr) = (p, q);
            let mut steps = 0usize;
            loop {
                let x = third(l, rr);
                steps += 1;
                match white(x) {
                    Some(true) => rr = x,
                    Some(false) => l = x,
                    None => {
                        out.push(InterfaceArc {
                            start,
                            end: HexVertex::of_triangle(l, rr, x),
                            start_inner: inner(back),
                            end_inner: inner(x),
                            steps,
                        });
                        break;
                    }
                }
            }
        }
    }
    out
}

/// Number of interfaces joining the inner to the outer boundary.
///
/// Every crossing arc has exactly one end on the inner boundary, so only
/// walks from there are needed: forward from arcs that start there, and
/// through the color-inverted configuration for arcs that end there.
pub fn crossing_count(domain: &Domain, bits: &[bool]) -> usize {
    let r = match domain.kind() {
        DomainKind::Annulus { r, .. } | DomainKind::HalfPlaneAnnulus { r, .. } => r,
        _ => return 0,
    };
    let inner = |s: Site| hex_inside_open_disk(s, r);
    let m = r as i32 + 2;
    let mut near = Vec::new();
    for u in -m..=m {
        for v in -m..=m {
            let h = Site::new(u, v);
            if domain.index_of(h).is_some() || !inner(h) {
                continue;
            }
            near.extend(h.neighbors().into_iter().filter_map(|p| domain.index_of(p)));
        }
    }
    near.sort_unstable();
    near.dedup();
    let sites = domain.sites();
    let mut count = 0;
    for invert in [false, true] {
        let white = |s: Site| domain.index_of(s).map(|i| bits[i] != invert);
        for &i in &near {
            let p = sites[i];
            if bits[i] != invert {
                continue;
            }
            for q in p.neighbors() {
                if white(q) != Some(true) {
                    continue;
                }
                let back = p.add(q).sub(third(p, q));
                if white(back).is_some() || !inner(back) {
                    continue;
                }
                let (mut l, mut rr) = (p, q);
                loop {
                    let x = third(l, rr);
                    match white(x) {
                        Some(true) => rr = x,
                        Some(false) => l = x,
                        None => {
                            count += usize::from(!inner(x));
                            break;
                        }
                    }
                }
            }
        }
    }
    count
}
