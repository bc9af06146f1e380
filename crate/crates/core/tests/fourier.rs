use percolab::fourier::*;
use rand::{Rng, SeedableRng};

fn ex(n: i128, d: i128) -> Exact {
    Exact::new(n, d)
}

fn and(n: u32) -> TruthTable {
    TruthTable::boolean(n, |x| x == (1 << n) - 1).unwrap()
}

fn dictator(n: u32) -> TruthTable {
    TruthTable::boolean(n, |x| x & 1 == 1).unwrap()
}

fn maj3() -> TruthTable {
    TruthTable::boolean(3, |x| x.count_ones() >= 2).unwrap()
}

fn parity(n: u32) -> TruthTable {
    TruthTable::boolean(n, |x| x.count_ones() % 2 == 1).unwrap()
}

/// Direct O(4^n) transform.
fn brute(f: &TruthTable) -> Vec<f64> {
    let m = f.values.len();
    (0..m)
        .map(|s| {
            (0..m)
                .map(|x| if (s & x).count_ones() % 2 == 0 { f.values[x] } else { -f.values[x] })
                .sum::<f64>()
                / m as f64
        })
        .collect()
}

#[test]
fn small_transforms() {
    let s = walsh_transform(&and(2)).unwrap();
    assert_eq!(s.coeffs, vec![0.25, -0.25, -0.25, 0.25]);
    assert_eq!(s.coeff_exact(3), Some(ex(1, 4)));
    let s = walsh_transform(&dictator(3)).unwrap();
    assert_eq!(s.coeff(0), 0.5);
    assert_eq!(s.coeff(1), -0.5);
    assert!((2..8).all(|i| s.coeff(i) == 0.0));
    let one = TruthTable::from_fn(4, |_| 1.0).unwrap();
    let s = walsh_transform(&one).unwrap();
    assert_eq!(s.coeff(0), 1.0);
    assert!(s.coeffs[1..].iter().all(|&c| c == 0.0));
}

#[test]
fn transform_matches_brute_force_and_inverts() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for n in 0..=8 {
        let f = TruthTable::from_fn(n, |_| rng.gen_range(-2.0..2.0)).unwrap();
        let s = walsh_transform(&f).unwrap();
        for (a, b) in s.coeffs.iter().zip(brute(&f)) {
            assert!((a - b).abs() < 1e-12);
        }
        let back = inverse_walsh(&s);
        for (a, b) in back.values.iter().zip(&f.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn parseval_on_random_tables() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for n in [1, 4, 9, 12, 16] {
        for boolean in [false, true] {
            let f = if boolean {
                TruthTable::boolean(n, |_| rng.gen_bool(0.3)).unwrap()
            } else {
                TruthTable::from_fn(n, |_| rng.gen_range(-1.0..1.0)).unwrap()
            };
            let s = walsh_transform(&f).unwrap();
            let lhs: f64 = s.coeffs.iter().map(|c| c * c).sum();
            assert!((lhs - f.norm2()).abs() <= 1e-12 * f.norm2().max(1e-300));
            let by_level: f64 = (0..=n).map(|k| level_weight(&s, k).unwrap()).sum();
            assert!((by_level - lhs).abs() <= 1e-12 * lhs.max(1e-300));
        }
    }
}

#[test]
fn butterfly_twice_scales_by_two_to_the_n() {
    let f = TruthTable::from_fn(6, |x| (x * 7 % 5) as f64).unwrap();
    let s = walsh_transform(&f).unwrap();
    // the butterfly of the coefficients is f itself; applying it to f gives 2^n f̂
    let again = inverse_walsh(&SpectralVector { n: 6, coeffs: f.values.clone(), exact: None });
    for (a, b) in again.values.iter().zip(&s.coeffs) {
        assert!((a - 64.0 * b).abs() < 1e-9);
    }
}

#[test]
fn level_weights() {
    let s = walsh_transform(&dictator(1)).unwrap();
    assert_eq!(level_weight(&s, 1).unwrap(), 0.25);
    let s = walsh_transform(&and(2)).unwrap();
    assert_eq!(level_weight_exact(&s, 2).unwrap(), ex(1, 16));
    assert!(level_weight(&s, 3).is_err());
}

#[test]
fn noise_stability_values() {
    let corpus = [and(3), dictator(2), maj3(), parity(3), Tribes { groups: 2, width: 2 }.table().unwrap()];
    for f in &corpus {
        let s = walsh_transform(f).unwrap();
        assert!(noise_stability(&s, 0.5).unwrap().abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for i in 0..=50 {
            let e = i as f64 / 100.0;
            let v = noise_stability(&s, e).unwrap();
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }
    let s = walsh_transform(&dictator(3)).unwrap();
    for e in [0.0, 0.1, 0.3] {
        assert!((noise_stability(&s, e).unwrap() - 0.25 * (1.0 - 2.0 * e).powi(2)).abs() < 1e-15);
    }
    assert!(noise_stability(&s, 1.5).is_err());
}

#[test]
fn noise_stability_monte_carlo_agrees() {
    let corpus = [and(3), maj3(), parity(3), Tribes { groups: 2, width: 2 }.table().unwrap()];
    for (i, f) in corpus.iter().enumerate() {
        let s = walsh_transform(f).unwrap();
        for e in [0.05, 0.2, 0.4] {
            let exact = noise_stability(&s, e).unwrap();
            let (m, se) = noise_stability_mc(f, e, 200_000, i as u64).unwrap();
            assert!((m - exact).abs() <= 4.0 * se + 1e-12, "f{i} ε {e}: {m} vs {exact} (se {se})");
        }
    }
}

#[test]
fn influence_values() {
    let i = influences(&dictator(3)).unwrap();
    assert_eq!(i.per_index, vec![1.0, 0.0, 0.0]);
    let i = influences(&and(2)).unwrap();
    assert_eq!(i.exact, vec![ex(1, 2), ex(1, 2)]);
    assert_eq!(i.total, 1.0);
}

fn is_monotone(n: u32, t: u32) -> bool {
    (0..1u32 << n).all(|x| (0..n).all(|i| x >> i & 1 == 1 || (t >> x & 1) <= (t >> (x | 1 << i) & 1)))
}

#[test]
fn monotone_level_one_is_half_the_influence() {
    let mut checked = 0;
    for n in 1..=4u32 {
        for t in 0..1u64 << (1 << n) {
            let t = t as u32;
            if !is_monotone(n, t) {
                continue;
            }
            checked += 1;
            let f = TruthTable::boolean(n, |x| t >> x & 1 == 1).unwrap();
            let s = walsh_transform(&f).unwrap();
            let inf = influences(&f).unwrap();
            for i in 0..n {
                // increasing functions: 1-bits carry χ = -1, so the sign is negative
                assert_eq!(s.coeff_exact(1 << i).unwrap(), -inf.exact[i as usize] / Exact::from_integer(2));
            }
        }
    }
    // Dedekind numbers 3, 6, 20, 168
    assert_eq!(checked, 3 + 6 + 20 + 168);
}

#[test]
fn and_revealment_is_exact() {
    for n in 2..=5u32 {
        let r = exact_revealment(&RandomOrderAnd { n, limit: None }).unwrap();
        let want = (ex(2, 1) - ex(2, 1 << n)) / Exact::from_integer(n as i128);
        assert!(r.per_bit.iter().all(|&p| p == want));
        assert_eq!(r.delta, want);
    }
    assert_eq!(exact_revealment(&ReadAll(4)).unwrap().delta, ex(1, 1));
}

#[test]
fn majority_revealment_matches_monte_carlo() {
    let r = exact_revealment(&Majority3).unwrap();
    // the skipped bit is read exactly when the other two disagree
    assert_eq!(r.delta, ex(5, 6));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let trials = 100_000;
    let mut hits = 0u64;
    for _ in 0..trials {
        let x: u32 = rng.gen_range(0..8);
        let rand = rng.gen_range(0..3);
        let j = Examined(&Majority3).witness(rand, x).unwrap();
        hits += (j & 1) as u64;
    }
    let p = hits as f64 / trials as f64;
    let sd = (5.0 / 36.0 / trials as f64).sqrt();
    assert!((p - 5.0 / 6.0).abs() < 4.0 * sd);
}

struct Case {
    name: &'static str,
    f: TruthTable,
    alg: Box<dyn QueryAlgorithm>,
}

fn corpus() -> Vec<Case> {
    let rh = RhombusCrossing::new(3).unwrap();
    vec![
        Case { name: "and3", f: and(3), alg: Box::new(RandomOrderAnd { n: 3, limit: None }) },
        Case { name: "and5", f: and(5), alg: Box::new(RandomOrderAnd { n: 5, limit: None }) },
        Case { name: "dictator", f: dictator(3), alg: Box::new(ReadFixed { n: 3, read: vec![0] }) },
        Case { name: "maj3", f: maj3(), alg: Box::new(Majority3) },
        Case { name: "tribes", f: Tribes { groups: 2, width: 2 }.table().unwrap(), alg: Box::new(Tribes { groups: 2, width: 2 }) },
        Case { name: "parity3", f: parity(3), alg: Box::new(ReadAll(3)) },
        Case { name: "rhombus3", f: rh.table().unwrap(), alg: Box::new(rh) },
    ]
}

#[test]
fn level_bound_holds_on_corpus() {
    for c in corpus() {
        let rep = check_theorem_noise(&c.f, c.alg.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", c.name));
        assert_eq!(rep.residual, Exact::from_integer(0));
        for l in &rep.levels {
            assert!(l.holds, "{}: level {} weight {} > bound {}", c.name, l.k, l.weight, l.bound);
        }
        let rev = exact_revealment(c.alg.as_ref()).unwrap();
        let inf = influences(&c.f).unwrap();
        for (p, i) in rev.per_bit.iter().zip(&inf.exact) {
            assert!(p >= i, "{}: revealment below influence", c.name);
        }
    }
}

#[test]
fn rhombus_crossing_table_is_self_dual() {
    let rh = RhombusCrossing::new(3).unwrap();
    let f = rh.table().unwrap();
    // a 3x3 rhombus is crossed left-right by white iff it is not crossed
    // top-bottom by black, which has the same probability
    assert_eq!(f.values.iter().sum::<f64>(), 256.0);
}

#[test]
fn generalized_bound() {
    // exact algorithm: no residual variance
    let rep = check_generalized(&maj3(), &Majority3).unwrap();
    assert_eq!(rep.residual, Exact::from_integer(0));
    assert!(rep.all_hold());
    // reading nothing leaves the full variance
    let f = and(3);
    let rep = check_generalized(&f, &ReadFixed { n: 3, read: vec![] }).unwrap();
    assert_eq!(rep.residual, ex(1, 8) - ex(1, 64));
    assert_eq!(rep.delta, Exact::from_integer(0));
    assert!(rep.all_hold());
    // stopping early
    let alg = RandomOrderAnd { n: 3, limit: Some(2) };
    assert!(check_theorem_noise(&f, &alg).is_err());
    let rep = check_generalized(&f, &alg).unwrap();
    assert!(rep.residual > Exact::from_integer(0));
    assert!(rep.all_hold());
}

#[test]
fn majority_witness_breaks_the_bound() {
    let f = recursive_majority(2).unwrap();
    let s = walsh_transform(&f).unwrap();
    assert_eq!(level_weight_exact(&s, 1).unwrap(), ex(9, 16));
    let w = MajorityWitness { h: 2 };
    assert_eq!(witness_revealment(&w).unwrap().delta, ex(4, 9));
    let rep = check_witness_bound(&f, &w).unwrap();
    let l1 = &rep.levels[0];
    assert!(!l1.holds, "witness without conditional uniformity should violate the level-1 bound");
    assert_eq!(l1.bound, ex(4, 9));
}

#[test]
fn truth_table_text_format() {
    // x1 is the most significant input in the file: "0 0 1 1" is x1
    let f = parse_truth_table("2\n0 0 1 1\n").unwrap();
    assert_eq!(f, dictator(2));
    assert!(parse_truth_table("2\n0 1 1").is_err());
    assert!(parse_truth_table("25\n").is_err());
    assert!(parse_truth_table("1\n0 x").is_err());
    assert!(parse_truth_table("").is_err());
}

#[test]
fn size_limits() {
    assert!(TruthTable::from_fn(25, |_| 0.0).is_err());
    assert!(exact_revealment(&ReadAll(13)).is_err());
    assert!(TruthTable::new(2, vec![0.0; 3]).is_err());
}
