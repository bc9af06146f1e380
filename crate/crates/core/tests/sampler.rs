use std::collections::VecDeque;

use percolab::lattice::{marks, Domain, DomainKind, LatticeKind, Site};
use percolab::sampler::{
    count_crossing_clusters, crossing_labels, decide, decide_bits, disjoint_paths, pivotal_set,
    sample, Color, Configuration, EventKind, EventSpec,
};

const TRI: LatticeKind = LatticeKind::TriangularSite;

fn annulus(r: u32, big_r: u32) -> (Domain, DomainKind) {
    let k = DomainKind::Annulus { r, big_r };
    (Domain::new(k, TRI).unwrap(), k)
}

/// Plain BFS over sites by coordinates, independent of the domain's graph.
fn bfs_components(d: &Domain, bits: &[bool], white: bool) -> Vec<Vec<usize>> {
    let n = d.len();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if bits[s] != white || comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut q = VecDeque::from([s]);
        while let Some(i) = q.pop_front() {
            for nb in d.sites()[i].neighbors() {
                if let Some(j) = d.index_of(nb) {
                    if bits[j] == white && comp[j] == usize::MAX {
                        comp[j] = id;
                        members.push(j);
                        q.push_back(j);
                    }
                }
            }
        }
        out.push(members);
    }
    out
}

fn inner_r(d: &Domain) -> u32 {
    match d.kind() {
        DomainKind::Annulus { r, .. } => r,
        _ => unreachable!(),
    }
}

fn oracle_crossing(d: &Domain, bits: &[bool], white: bool) -> usize {
    let g = d.graph();
    bfs_components(d, bits, white)
        .iter()
        .filter(|c| {
            c.iter().any(|&i| d.sites()[i].neighbors().iter().any(|n| d.index_of(*n).is_none() && percolab::lattice::hex_inside_open_disk(*n, inner_r(d))))
                && c.iter().any(|&i| g.marks(i) & marks::OUTER != 0)
        })
        .count()
}

#[test]
fn extreme_probabilities() {
    let d = Domain::triangular_box(16).unwrap();
    assert!(sample(&d, 1.0, 3, 0).unwrap().bits.iter().all(|&b| b));
    assert!(sample(&d, 0.0, 3, 0).unwrap().bits.iter().all(|&b| !b));
    assert!(sample(&d, 1.5, 3, 0).is_err());
}

#[test]
fn bit_mean_is_one_half() {
    let d = Domain::triangular_box(64).unwrap();
    let trials = 10_000u64;
    let mut ones = 0u64;
    for t in 0..trials {
        ones += sample(&d, 0.5, 11, t).unwrap().bits.iter().filter(|&&b| b).count() as u64;
    }
    let n = (trials * d.len() as u64) as f64;
    let mean = ones as f64 / n;
    let sigma = (0.25 / n).sqrt();
    assert!((mean - 0.5).abs() < 4.0 * sigma, "mean {mean}");
}

#[test]
fn same_seed_same_bits_across_domains() {
    let (a, _) = annulus(4, 8);
    let (b, _) = annulus(4, 16);
    let ca = sample(&a, 0.5, 5, 9).unwrap();
    let cb = sample(&b, 0.5, 5, 9).unwrap();
    for (i, s) in a.sites().iter().enumerate() {
        let j = b.index_of(*s).expect("annulus(4,8) inside annulus(4,16)");
        assert_eq!(ca.bits[i], cb.bits[j]);
    }
}

#[test]
fn all_open_annulus() {
    let (d, k) = annulus(4, 16);
    let c = Configuration::constant(&d, true);
    let one = EventSpec::new(EventKind::AnnulusOneArm(Color::White), k, TRI).unwrap();
    let two = EventSpec::new(EventKind::AlternatingKArm(2), k, TRI).unwrap();
    assert!(decide(&c, &one).unwrap());
    assert!(!decide(&c, &two).unwrap());
    assert_eq!(count_crossing_clusters(&c, Color::White).unwrap(), 1);
    assert_eq!(count_crossing_clusters(&Configuration::constant(&d, false), Color::White).unwrap(), 0);
    // a fat annulus has no pivotal cell when everything is open
    assert!(pivotal_set(&c, &one).unwrap().is_empty());
}

#[test]
fn two_white_tubes() {
    let (d, k) = annulus(2, 6);
    let mut bits = vec![false; d.len()];
    for (i, s) in d.sites().iter().enumerate() {
        // two rays, east and west
        if s.v == 0 {
            bits[i] = true;
        }
    }
    let c = Configuration::from_bits(&d, bits.clone()).unwrap();
    let j2 = EventSpec::new(EventKind::JClusters(2, Color::White), k, TRI).unwrap();
    let j3 = EventSpec::new(EventKind::JClusters(3, Color::White), k, TRI).unwrap();
    assert!(decide(&c, &j2).unwrap());
    assert!(!decide(&c, &j3).unwrap());
    assert_eq!(oracle_crossing(&d, &bits, true), 2);
}

#[test]
fn crossing_clusters_match_bfs() {
    let (d, _) = annulus(4, 16);
    for t in 0..10_000 {
        let c = sample(&d, 0.5, 21, t).unwrap();
        for color in [Color::White, Color::Black] {
            let a = count_crossing_clusters(&c, color).unwrap();
            let b = oracle_crossing(&d, &c.bits, color.is_white());
            assert_eq!(a, b, "trial {t}");
        }
    }
}

#[test]
fn box_crossing_matches_bfs() {
    let d = Domain::triangular_box(12).unwrap();
    let ev = EventSpec::new(EventKind::BoxLeftRight, DomainKind::Box { side: 12 }, TRI).unwrap();
    let g = d.graph();
    for t in 0..10_000 {
        let c = sample(&d, 0.5, 2, t).unwrap();
        let want = bfs_components(&d, &c.bits, true).iter().any(|comp| {
            comp.iter().any(|&i| g.marks(i) & marks::LEFT != 0)
                && comp.iter().any(|&i| g.marks(i) & marks::RIGHT != 0)
        });
        assert_eq!(decide(&c, &ev).unwrap(), want);
    }
}

#[test]
fn alternating_arms_match_cluster_count() {
    let (d, k) = annulus(3, 12);
    let g = d.graph();
    for t in 0..5_000 {
        let c = sample(&d, 0.5, 4, t).unwrap();
        let col = g.colors(&c.bits);
        let j = crossing_labels(g, &col, true).1.min(crossing_labels(g, &col, false).1);
        for arms in [2u32, 4, 6] {
            let ev = EventSpec::new(EventKind::AlternatingKArm(arms), k, TRI).unwrap();
            assert_eq!(decide(&c, &ev).unwrap(), 2 * j >= arms as usize, "trial {t}, k = {arms}");
        }
    }
}

#[test]
fn alternating_arms_nest() {
    let (d, k) = annulus(2, 10);
    let four = EventSpec::new(EventKind::AlternatingKArm(4), k, TRI).unwrap();
    let two = EventSpec::new(EventKind::AlternatingKArm(2), k, TRI).unwrap();
    for t in 0..5_000 {
        let c = sample(&d, 0.5, 8, t).unwrap();
        assert!(!decide(&c, &four).unwrap() || decide(&c, &two).unwrap());
    }
}

#[test]
fn box_crossing_is_monotone() {
    let side = 5;
    let d = Domain::triangular_box(side).unwrap();
    let ev = EventSpec::new(EventKind::BoxLeftRight, DomainKind::Box { side }, TRI).unwrap();
    for t in 0..200 {
        let mut c = sample(&d, 0.5, 1, t).unwrap();
        for i in 0..d.len() {
            if c.bits[i] {
                continue;
            }
            let before = decide(&c, &ev).unwrap();
            c.bits[i] = true;
            assert!(!before || decide(&c, &ev).unwrap());
            c.bits[i] = false;
        }
    }
}

#[test]
fn pivotal_set_matches_flip_and_recheck() {
    let side = 8;
    let d = Domain::triangular_box(side).unwrap();
    let ev = EventSpec::new(EventKind::BoxLeftRight, DomainKind::Box { side }, TRI).unwrap();
    let (ad, ak) = annulus(3, 8);
    let jc = EventSpec::new(EventKind::JClusters(2, Color::White), ak, TRI).unwrap();
    for t in 0..300 {
        for (dom, e) in [(&d, &ev), (&ad, &jc)] {
            let c = sample(dom, 0.5, 6, t).unwrap();
            let base = decide(&c, e).unwrap();
            let mut want = Vec::new();
            for i in 0..dom.len() {
                let mut b = c.bits.clone();
                b[i] = !b[i];
                if decide_bits(dom, &b, &e.kind) != base {
                    want.push(i);
                }
            }
            assert_eq!(pivotal_set(&c, e).unwrap(), want);
        }
    }
    let full = Configuration::constant(&d, true);
    assert!(pivotal_set(&full, &ev).unwrap().is_empty());
}

#[test]
fn single_cell_pivotal() {
    let k = DomainKind::Rhombus { width: 1 };
    let d = Domain::new(k, TRI).unwrap();
    let ev = EventSpec::new(EventKind::CellOpen(0), k, TRI).unwrap();
    let c = Configuration::constant(&d, true);
    assert_eq!(pivotal_set(&c, &ev).unwrap(), vec![0]);
}

/// Brute force: enumerate simple crossings of each color and look for a
/// disjoint tuple in right-to-left order.
fn brute_half_plane(d: &Domain, bits: &[bool], seq: &[Color]) -> bool {
    let g = d.graph();
    let n = g.len();
    let mut paths: Vec<Vec<Vec<usize>>> = vec![Vec::new(), Vec::new()];
    for (ci, white) in [(0usize, true), (1, false)] {
        fn dfs(
            g: &percolab::lattice::CellGraph,
            bits: &[bool],
            white: bool,
            path: &mut Vec<usize>,
            on: &mut Vec<bool>,
            out: &mut Vec<Vec<usize>>,
        ) {
            let last = *path.last().unwrap();
            if g.marks(last) & marks::OUTER != 0 {
                out.push(path.clone());
                return;
            }
            for &m in g.neighbors(last) {
                let m = m as usize;
                if bits[m] == white && !on[m] && g.marks(m) & marks::INNER == 0 {
                    on[m] = true;
                    path.push(m);
                    dfs(g, bits, white, path, on, out);
                    path.pop();
                    on[m] = false;
                }
            }
        }
        for s in 0..n {
            if g.marks(s) & marks::INNER != 0 && bits[s] == white {
                let mut on = vec![false; n];
                on[s] = true;
                dfs(g, bits, white, &mut vec![s], &mut on, &mut paths[ci]);
            }
        }
    }
    // Is `b` strictly left of `a`: b unreachable from the right base avoiding a.
    let left_of = |a: &Vec<usize>, b: &Vec<usize>| -> bool {
        let mut blocked = vec![false; n];
        for &i in a {
            blocked[i] = true;
        }
        let mut seen = vec![false; n];
        let mut st: Vec<usize> = (0..n).filter(|&i| !blocked[i] && g.marks(i) & marks::RIGHT != 0).collect();
        for &i in &st {
            seen[i] = true;
        }
        while let Some(i) = st.pop() {
            for &m in g.neighbors(i) {
                let m = m as usize;
                if !blocked[m] && !seen[m] {
                    seen[m] = true;
                    st.push(m);
                }
            }
        }
        b.iter().all(|&i| !seen[i])
    };
    fn search(
        seq: &[Color],
        chosen: &mut Vec<Vec<usize>>,
        paths: &[Vec<Vec<usize>>],
        left_of: &dyn Fn(&Vec<usize>, &Vec<usize>) -> bool,
    ) -> bool {
        if chosen.len() == seq.len() {
            return true;
        }
        let ci = if seq[chosen.len()].is_white() { 0 } else { 1 };
        for p in &paths[ci] {
            let disjoint = chosen.iter().all(|q| q.iter().all(|i| !p.contains(i)));
            if disjoint && chosen.last().is_none_or(|q| left_of(q, p)) {
                chosen.push(p.clone());
                if search(seq, chosen, paths, left_of) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    search(seq, &mut Vec::new(), &paths, &left_of)
}

#[test]
fn half_plane_peeling_matches_brute_force() {
    let k = DomainKind::HalfPlaneAnnulus { r: 1, big_r: 4 };
    let d = Domain::new(k, TRI).unwrap();
    let seqs: Vec<Vec<Color>> = vec![
        vec![Color::White],
        vec![Color::Black],
        vec![Color::White, Color::Black],
        vec![Color::White, Color::White],
        vec![Color::Black, Color::White, Color::Black],
        vec![Color::White, Color::Black, Color::White],
    ];
    let mut hits = vec![0; seqs.len()];
    for t in 0..1500 {
        let c = sample(&d, 0.5, 13, t).unwrap();
        for (si, seq) in seqs.iter().enumerate() {
            let ev = EventSpec::new(EventKind::HalfPlaneKArm(seq.clone()), k, TRI).unwrap();
            let got = decide(&c, &ev).unwrap();
            assert_eq!(got, brute_half_plane(&d, &c.bits, seq), "trial {t}, seq {seq:?}");
            hits[si] += got as usize;
        }
    }
    // every sequence is exercised both ways
    assert!(hits.iter().all(|&h| h > 0 && h < 1500), "{hits:?}");
}

#[test]
fn two_disjoint_paths_match_single_cut() {
    let (d, _) = annulus(2, 6);
    let g = d.graph();
    for t in 0..2_000 {
        let c = sample(&d, 0.6, 17, t).unwrap();
        let allowed = c.bits.clone();
        let flow = disjoint_paths(g, &allowed, marks::INNER, marks::OUTER, 2);
        let conn = |a: &[bool]| percolab::sampler::reach(g, a, true, marks::INNER, marks::OUTER, None);
        let want = if !conn(&allowed) {
            0
        } else if (0..g.len()).filter(|&i| allowed[i]).any(|i| {
            let mut a = allowed.clone();
            a[i] = false;
            !conn(&a)
        }) {
            1
        } else {
            2
        };
        assert_eq!(flow, want, "trial {t}");
    }
}

#[test]
fn bond_box_counts_and_duality_smoke() {
    let k = DomainKind::Box { side: 4 };
    let d = Domain::new(k, LatticeKind::SquareBond).unwrap();
    let ev = EventSpec::new(EventKind::BoxLeftRight, k, LatticeKind::SquareBond).unwrap();
    assert!(decide(&Configuration::constant(&d, true), &ev).unwrap());
    assert!(!decide(&Configuration::constant(&d, false), &ev).unwrap());
    // a single open row crosses
    let mut bits = vec![false; d.len()];
    for (i, b) in d.bonds().iter().enumerate() {
        if b.a.1 == 0 && b.b.1 == 0 {
            bits[i] = true;
        }
    }
    assert!(decide(&Configuration::from_bits(&d, bits).unwrap(), &ev).unwrap());
}

#[test]
fn five_arm_implies_four_alternating() {
    let k = DomainKind::Annulus { r: 2, big_r: 8 };
    let d = Domain::new(k, LatticeKind::SquareBond).unwrap();
    let five = EventSpec::new(EventKind::PolychromaticFiveArm, k, LatticeKind::SquareBond).unwrap();
    let four = EventSpec::new(EventKind::AlternatingKArm(4), k, LatticeKind::SquareBond).unwrap();
    let mut seen = 0;
    for t in 0..5_000 {
        let c = sample(&d, 0.5, 3, t).unwrap();
        let f = decide(&c, &five).unwrap();
        seen += f as usize;
        assert!(!f || decide(&c, &four).unwrap());
    }
    assert!(seen > 0);
}

#[test]
fn mismatched_domain_is_rejected() {
    let (d, _) = annulus(4, 8);
    let ev = EventSpec::new(EventKind::AnnulusOneArm(Color::White), DomainKind::Annulus { r: 4, big_r: 16 }, TRI)
        .unwrap();
    assert!(decide(&Configuration::constant(&d, true), &ev).is_err());
    assert!(EventSpec::new(EventKind::AlternatingKArm(3), DomainKind::Annulus { r: 1, big_r: 4 }, TRI).is_err());
}

#[test]
fn site_lookup_is_consistent() {
    let (d, _) = annulus(4, 16);
    for (i, s) in d.sites().iter().enumerate() {
        assert_eq!(d.index_of(*s), Some(i));
    }
    assert_eq!(d.index_of(Site::new(0, 0)), None);
}

#[test]
fn square_annulus_geometry() {
    for (r, big_r) in [(1, 3), (2, 5), (4, 8), (4, 9), (8, 32)] {
        let k = DomainKind::Annulus { r, big_r };
        let d = Domain::new(k, LatticeKind::SquareBond).unwrap();
        let area = std::f64::consts::PI * f64::from(big_r * big_r - r * r);
        let ratio = d.len() as f64 / (2.0 * area);
        assert!((0.7..1.4).contains(&ratio), "({r},{big_r}): {} bonds", d.len());
        for (white, color) in [(true, Color::White), (false, Color::Black)] {
            let ev = EventSpec::new(EventKind::AnnulusOneArm(color), k, LatticeKind::SquareBond).unwrap();
            let c = Configuration::constant(&d, white);
            assert!(decide(&c, &ev).unwrap(), "({r},{big_r}) {color:?}");
            let other = Configuration::constant(&d, !white);
            assert!(!decide(&other, &ev).unwrap());
        }
    }
}
