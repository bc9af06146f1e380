//! Static configurations and brute-force event decisions.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::interfaces;
use crate::lattice::{marks, CellGraph, Domain, DomainKind, LatticeKind};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn is_white(self) -> bool {
        self == Color::White
    }

    pub fn flip(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    BoxLeftRight,
    AnnulusOneArm(Color),
    /// `k` disjoint crossings whose colors alternate around the annulus.
    AlternatingKArm(u32),
    /// Disjoint crossings of the half-annulus, listed from the right base
    /// to the left base.
    HalfPlaneKArm(Vec<Color>),
    JClusters(u32, Color),
    /// Five disjoint crossings colored open, open, closed, open, closed in
    /// cyclic order (closed meaning a dual crossing on the bond lattice).
    PolychromaticFiveArm,
    /// The bit of a single cell.
    CellOpen(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EventSpec {
    pub kind: EventKind,
    pub domain: DomainKind,
    pub lattice: LatticeKind,
}

impl EventSpec {
    pub fn new(kind: EventKind, domain: DomainKind, lattice: LatticeKind) -> Result<EventSpec> {
        let annulus = matches!(domain, DomainKind::Annulus { .. });
        let half = matches!(domain, DomainKind::HalfPlaneAnnulus { .. });
        let chordal = matches!(domain, DomainKind::Box { .. } | DomainKind::Rhombus { .. });
        let ok = match &kind {
            EventKind::BoxLeftRight => chordal,
            EventKind::AnnulusOneArm(_) => annulus || half,
            EventKind::AlternatingKArm(k) => {
                if *k < 2 || k % 2 != 0 {
                    return Err(Error::InvalidParameter(format!(
                        "alternating arm count must be even and at least 2, got {k}"
                    )));
                }
                annulus
            }
            EventKind::HalfPlaneKArm(seq) => {
                if seq.is_empty() {
                    return Err(Error::InvalidParameter("empty color sequence".into()));
                }
                half && lattice == LatticeKind::TriangularSite
            }
            EventKind::JClusters(j, _) => {
                if *j < 1 {
                    return Err(Error::InvalidParameter("cluster count must be at least 1".into()));
                }
                annulus
            }
            EventKind::PolychromaticFiveArm => annulus,
            EventKind::CellOpen(_) => true,
        };
        if !ok {
            return Err(Error::DomainMismatch(format!("{kind:?} on {domain:?} ({lattice:?})")));
        }
        Ok(EventSpec { kind, domain, lattice })
    }

    /// Opening a cell can only help the event.
    pub fn is_increasing(&self) -> bool {
        matches!(
            self.kind,
            EventKind::BoxLeftRight
                | EventKind::AnnulusOneArm(Color::White)
                | EventKind::HalfPlaneKArm(_)
                | EventKind::CellOpen(_)
        ) && match &self.kind {
            EventKind::HalfPlaneKArm(seq) => seq.iter().all(|c| c.is_white()),
            _ => true,
        }
    }

    pub fn is_decreasing(&self) -> bool {
        match &self.kind {
            EventKind::AnnulusOneArm(Color::Black) => true,
            EventKind::HalfPlaneKArm(seq) => seq.iter().all(|c| !c.is_white()),
            _ => false,
        }
    }
}

/// One bit per cell, `true` = open/white.
#[derive(Clone, Debug)]
pub struct Configuration<'d> {
    pub domain: &'d Domain,
    pub bits: Vec<bool>,
    pub seed: u64,
    pub trial: u64,
}

impl<'d> Configuration<'d> {
    pub fn from_bits(domain: &'d Domain, bits: Vec<bool>) -> Result<Configuration<'d>> {
        if bits.len() != domain.len() {
            return Err(Error::InvalidParameter(format!(
                "{} bits for a domain of {} cells",
                bits.len(),
                domain.len()
            )));
        }
        Ok(Configuration { domain, bits, seed: 0, trial: 0 })
    }

    pub fn constant(domain: &'d Domain, open: bool) -> Configuration<'d> {
        Configuration { domain, bits: vec![open; domain.len()], seed: 0, trial: 0 }
    }
}

/// The static bit of the cell with generator key `key`.
#[inline]
pub fn cell_bit(seed: u64, trial: u64, key: u64, thr: u128) -> bool {
    rng::bernoulli(rng::hash(seed, trial, key, rng::STREAM_BITS), thr)
}

pub fn sample(domain: &Domain, p: f64, seed: u64, trial: u64) -> Result<Configuration<'_>> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidParameter(format!("p = {p} is not a probability")));
    }
    let thr = rng::threshold(p);
    let bits = domain.keys().iter().map(|&k| cell_bit(seed, trial, k, thr)).collect();
    Ok(Configuration { domain, bits, seed, trial })
}

fn check_domain(config: &Configuration<'_>, event: &EventSpec) -> Result<()> {
    let d = config.domain;
    if d.kind() != event.domain || d.lattice() != event.lattice {
        return Err(Error::DomainMismatch(format!(
            "event on {:?} ({:?}), configuration on {:?} ({:?})",
            event.domain,
            event.lattice,
            d.kind(),
            d.lattice()
        )));
    }
    if let EventKind::CellOpen(i) = event.kind {
        if i >= d.len() {
            return Err(Error::InvalidParameter(format!("cell {i} out of range")));
        }
    }
    Ok(())
}

pub fn decide(config: &Configuration<'_>, event: &EventSpec) -> Result<bool> {
    check_domain(config, event)?;
    Ok(decide_bits(config.domain, &config.bits, &event.kind))
}

/// Decision without domain checks; `bits` must belong to `domain`.
pub fn decide_bits(domain: &Domain, bits: &[bool], kind: &EventKind) -> bool {
    let g = domain.graph();
    let col = || g.colors(bits);
    match kind {
        EventKind::BoxLeftRight => reach(g, &col(), true, marks::LEFT, marks::RIGHT, None),
        EventKind::AnnulusOneArm(c) => reach(g, &col(), c.is_white(), marks::INNER, marks::OUTER, None),
        EventKind::AlternatingKArm(k) => {
            if domain.lattice() == LatticeKind::TriangularSite {
                interfaces::crossing_count(domain, bits) >= *k as usize
            } else {
                let col = col();
                let (w, b) = (crossing_labels(g, &col, true).1, crossing_labels(g, &col, false).1);
                2 * w.min(b) >= *k as usize
            }
        }
        EventKind::HalfPlaneKArm(seq) => half_plane_arms(g, &col(), seq),
        EventKind::JClusters(j, c) => crossing_labels(g, &col(), c.is_white()).1 >= *j as usize,
        EventKind::PolychromaticFiveArm => five_arm(g, &col()),
        EventKind::CellOpen(i) => bits[*i],
    }
}

/// Whether a path of nodes of color `white` joins `from`-marked nodes to
/// `to`-marked nodes, optionally inside `allowed`.
pub fn reach(
    g: &CellGraph,
    col: &[bool],
    white: bool,
    from: u8,
    to: u8,
    allowed: Option<&[bool]>,
) -> bool {
    let ok = |n: usize| col[n] == white && allowed.is_none_or(|a| a[n]);
    let mut seen = vec![false; g.len()];
    let mut stack = Vec::new();
    for n in 0..g.len() {
        if g.marks(n) & from != 0 && ok(n) {
            if g.marks(n) & to != 0 {
                return true;
            }
            seen[n] = true;
            stack.push(n);
        }
    }
    while let Some(n) = stack.pop() {
        for &m in g.neighbors(n) {
            let m = m as usize;
            if !seen[m] && ok(m) {
                if g.marks(m) & to != 0 {
                    return true;
                }
                seen[m] = true;
                stack.push(m);
            }
        }
    }
    false
}

/// Labels of clusters of one color that touch the hole, and how many of them
/// also touch the outer boundary. Unlabelled nodes get
/// `u32::MAX`; crossing clusters get labels `0..count`.
pub fn crossing_labels(g: &CellGraph, col: &[bool], white: bool) -> (Vec<u32>, usize) {
    let mut label = vec![u32::MAX; g.len()];
    let mut tmp = vec![u32::MAX; g.len()];
    let mut count = 0usize;
    let mut stack = Vec::new();
    let mut members = Vec::new();
    for s in 0..g.len() {
        if g.marks(s) & marks::HOLE == 0 || col[s] != white || tmp[s] != u32::MAX {
            continue;
        }
        tmp[s] = s as u32;
        stack.push(s);
        members.clear();
        let mut crosses = false;
        while let Some(n) = stack.pop() {
            members.push(n);
            crosses |= g.marks(n) & marks::OUTER != 0;
            for &m in g.neighbors(n) {
                let m = m as usize;
                if col[m] == white && tmp[m] == u32::MAX {
                    tmp[m] = s as u32;
                    stack.push(m);
                }
            }
        }
        if crosses {
            for &n in &members {
                label[n] = count as u32;
            }
            count += 1;
        }
    }
    (label, count)
}

pub fn count_crossing_clusters(config: &Configuration<'_>, color: Color) -> Result<usize> {
    if !matches!(config.domain.kind(), DomainKind::Annulus { .. }) {
        return Err(Error::DomainMismatch("crossing clusters need an annulus".into()));
    }
    let g = config.domain.graph();
    Ok(crossing_labels(g, &g.colors(&config.bits), color.is_white()).1)
}

/// Peel extremal crossings off the half-annulus, rightmost first.
fn half_plane_arms(g: &CellGraph, col: &[bool], seq: &[crate::sampler::Color]) -> bool {
    let n = g.len();
    let mut alive = vec![true; n];
    let mut wall: Vec<bool> = (0..n).map(|i| g.marks(i) & marks::RIGHT != 0).collect();
    for &c in seq {
        let w = c.is_white();
        if !reach(g, col, w, marks::INNER, marks::OUTER, Some(&alive)) {
            return false;
        }
        // Region right of the extremal crossing, then its boundary layer.
        let mut gone = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&i| alive[i] && wall[i] && col[i] != w).collect();
        for &i in &stack {
            gone[i] = true;
        }
        while let Some(i) = stack.pop() {
            for &m in g.neighbors(i) {
                let m = m as usize;
                if alive[m] && !gone[m] && col[m] != w {
                    gone[m] = true;
                    stack.push(m);
                }
            }
        }
        let mut layer = vec![false; n];
        for i in 0..n {
            if alive[i] && col[i] == w && (wall[i] || g.neighbors(i).iter().any(|&m| gone[m as usize])) {
                layer[i] = true;
            }
        }
        for i in 0..n {
            if gone[i] || layer[i] {
                alive[i] = false;
            }
        }
        // Keep what is still attached to the left base.
        let mut keep = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&i| alive[i] && g.marks(i) & marks::LEFT != 0).collect();
        for &i in &stack {
            keep[i] = true;
        }
        while let Some(i) = stack.pop() {
            for &m in g.neighbors(i) {
                let m = m as usize;
                if alive[m] && !keep[m] {
                    keep[m] = true;
                    stack.push(m);
                }
            }
        }
        alive = keep;
        for i in 0..n {
            wall[i] = alive[i] && g.neighbors(i).iter().any(|&m| layer[m as usize]);
        }
    }
    true
}

fn five_arm(g: &CellGraph, col: &[bool]) -> bool {
    let (wl, jw) = crossing_labels(g, col, true);
    let jb = crossing_labels(g, col, false).1;
    let j = jw.min(jb);
    if j >= 3 {
        return true;
    }
    if j < 2 {
        return false;
    }
    (0..jw as u32).any(|c| {
        let allowed: Vec<bool> = wl.iter().map(|&l| l == c).collect();
        disjoint_paths(g, &allowed, marks::HOLE, marks::OUTER, 2) >= 2
    })
}

/// Number of node-disjoint paths inside `allowed` from `from`-marked to
/// `to`-marked nodes, capped at `limit`.
pub fn disjoint_paths(g: &CellGraph, allowed: &[bool], from: u8, to: u8, limit: usize) -> usize {
    #[derive(Clone, Copy, PartialEq, Eq)]
    enum St {
        In(usize),
        Out(usize),
    }
    let n = g.len();
    let mut node_used = vec![false; n];
    let mut src_used = vec![false; n];
    let mut snk_used = vec![false; n];
    let mut flow: HashMap<(u32, u32), i32> = HashMap::new();
    let f = |flow: &HashMap<(u32, u32), i32>, a: usize, b: usize| -> i32 {
        *flow.get(&(a as u32, b as u32)).unwrap_or(&0)
    };
    let mut count = 0;
    while count < limit {
        // BFS over split nodes. prev maps a state to its predecessor; None marks the source.
        let mut prev_in: Vec<Option<Option<St>>> = vec![None; n];
        let mut prev_out: Vec<Option<Option<St>>> = vec![None; n];
        let mut q = VecDeque::new();
        for i in 0..n {
            if allowed[i] && g.marks(i) & from != 0 && !src_used[i] {
                prev_in[i] = Some(None);
                q.push_back(St::In(i));
            }
        }
        let mut found = None;
        while let Some(s) = q.pop_front() {
            match s {
                St::In(i) => {
                    if !node_used[i] && prev_out[i].is_none() {
                        prev_out[i] = Some(Some(s));
                        q.push_back(St::Out(i));
                    }
                    for &m in g.neighbors(i) {
                        let m = m as usize;
                        if allowed[m] && f(&flow, m, i) > 0 && prev_out[m].is_none() {
                            prev_out[m] = Some(Some(s));
                            q.push_back(St::Out(m));
                        }
                    }
                }
                St::Out(i) => {
                    if g.marks(i) & to != 0 && !snk_used[i] {
                        found = Some(i);
                        break;
                    }
                    if node_used[i] && prev_in[i].is_none() {
                        prev_in[i] = Some(Some(s));
                        q.push_back(St::In(i));
                    }
                    for &m in g.neighbors(i) {
                        let m = m as usize;
                        if allowed[m] && f(&flow, i, m) < 1 && prev_in[m].is_none() {
                            prev_in[m] = Some(Some(s));
                            q.push_back(St::In(m));
                        }
                    }
                }
            }
        }
        let Some(end) = found else { break };
        snk_used[end] = true;
        let mut cur = St::Out(end);
        loop {
            let p = match cur {
                St::In(i) => prev_in[i].unwrap(),
                St::Out(i) => prev_out[i].unwrap(),
            };
            match (p, cur) {
                (None, St::In(i)) => {
                    src_used[i] = true;
                    break;
                }
                (Some(St::In(a)), St::Out(b)) if a == b => node_used[a] = true,
                (Some(St::Out(a)), St::In(b)) if a == b => node_used[a] = false,
                (Some(St::Out(a)), St::In(b)) => {
                    *flow.entry((a as u32, b as u32)).or_insert(0) += 1;
                    *flow.entry((b as u32, a as u32)).or_insert(0) -= 1;
                }
                (Some(St::In(a)), St::Out(b)) => {
                    // cancel flow b -> a
                    *flow.entry((b as u32, a as u32)).or_insert(0) -= 1;
                    *flow.entry((a as u32, b as u32)).or_insert(0) += 1;
                }
                _ => unreachable!(),
            }
            cur = p.unwrap();
        }
        count += 1;
    }
    count
}

/// Cells whose single flip changes the event.
pub fn pivotal_set(config: &Configuration<'_>, event: &EventSpec) -> Result<Vec<usize>> {
    check_domain(config, event)?;
    let d = config.domain;
    let base = decide_bits(d, &config.bits, &event.kind);
    let mut bits = config.bits.clone();
    let mut out = Vec::new();
    for i in 0..bits.len() {
        // A monotone event can only change when the flip goes against it.
        if event.is_increasing() && bits[i] != base {
            continue;
        }
        if event.is_decreasing() && bits[i] == base {
            continue;
        }
        bits[i] = !bits[i];
        if decide_bits(d, &bits, &event.kind) != base {
            out.push(i);
        }
        bits[i] = !bits[i];
    }
    Ok(out)
}
