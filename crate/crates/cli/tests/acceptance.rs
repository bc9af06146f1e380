//! Acceptance run. Prints one line per criterion and exits non-zero if a
//! criterion that was evaluated at full scale fails.
//!
//! The exponent criterion needs about an hour on one core, so it only runs
//! when `PERCOLAB_ACCEPTANCE_FULL=1`; otherwise it is reported as not met.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use percolab::dynamics::{
    covering_numbers, crossing_time_set, dimension_bound, epsilon_grid, time_correlation, time_set_stats, DimensionBound,
};
use percolab::estimators::{
    arm_event, estimate_arm, fit_exponent, quasi_mult_table, reference_exponent, ArmMethod, FitPoint,
};
use percolab::explore::{
    annulus_algorithm, box_crossing_algorithm, measure_revealment, path_meets_disk, radial_interface, HashedBits,
    RadialExplorer, RevealAlgorithm,
};
use percolab::fourier::{builtin_corpus, check_theorem_noise, exact_revealment, Exact, RandomOrderAnd};
use percolab::lattice::{Domain, DomainKind, LatticeKind};
use percolab::rng;
use percolab::sampler::{self, decide_bits, sample, Color, EventKind, EventSpec};
use percolab::stats::Summary;

const TRI: LatticeKind = LatticeKind::TriangularSite;

type Outcome = percolab::Result<(bool, String)>;

fn full() -> bool {
    std::env::var("PERCOLAB_ACCEPTANCE_FULL").is_ok_and(|v| v == "1")
}

fn ac1() -> Outcome {
    let corpus = builtin_corpus()?;
    let mut violations = 0;
    for c in &corpus {
        let rep = check_theorem_noise(&c.f, c.alg.as_ref())?;
        violations += rep.levels.iter().filter(|l| !l.holds).count();
    }
    let ok = violations == 0 && corpus.len() >= 6;
    Ok((ok, format!("{} functions, {violations} level violations", corpus.len())))
}

fn ac2() -> Outcome {
    let mut ok = true;
    let mut got = Vec::new();
    for n in 2..=5u32 {
        let d = exact_revealment(&RandomOrderAnd { n, limit: None })?.delta;
        let want = Exact::new((1 << n) - 1, (1 << (n - 1)) * i128::from(n));
        ok &= d == want;
        got.push(format!("n={n}:{d}"));
    }
    Ok((ok, got.join(" ")))
}

fn ac3() -> Outcome {
    let seed = 301;
    let mut bad = 0u64;
    let mut n = 0u64;
    for side in [16, 32, 64] {
        let d = Domain::triangular_box(side)?;
        for t in 0..10_000 {
            let run = box_crossing_algorithm(&d, seed, t)?;
            let c = sample(&d, 0.5, seed, t)?;
            bad += u64::from(run.crossing != decide_bits(&d, &c.bits, &EventKind::BoxLeftRight));
            n += 1;
        }
    }
    for (r, big_r) in [(2, 8), (3, 16), (4, 32)] {
        let d = Domain::annulus(r, big_r)?;
        let mut ex = RadialExplorer::new(big_r)?;
        for t in 0..10_000 {
            let run = annulus_algorithm(&mut ex, r, seed, t)?;
            let c = sample(&d, 0.5, seed, t)?;
            bad += u64::from(run.outcome != decide_bits(&d, &c.bits, &EventKind::AnnulusOneArm(Color::White)));
            n += 1;
        }
    }
    Ok((bad == 0, format!("{bad} disagreements in {n} configurations (box 16/32/64, annulus 8/16/32)")))
}

fn ac4() -> Outcome {
    let (r, big_r, seed) = (4, 32, 401);
    let d = Domain::annulus(r, big_r)?;
    let mut ex = RadialExplorer::new(big_r)?;
    let edges = ex.region().boundary_edges().to_vec();
    let mut bad = 0;
    for t in 0..10_000 {
        let c = sample(&d, 0.5, seed, t)?;
        let want = decide_bits(&d, &c.bits, &EventKind::AnnulusOneArm(Color::White));
        let k = rng::index(rng::hash(seed, t, 0, rng::STREAM_ALGORITHM), edges.len());
        let run = radial_interface(&mut ex, edges[k], &HashedBits::new(seed, t, 0.5))?;
        bad += u32::from(path_meets_disk(&run, r) != want);
    }
    Ok((bad == 0, format!("{bad} disagreements in 10000 samples at (4,32)")))
}

fn ac5() -> Outcome {
    let k = DomainKind::Rhombus { width: 3 };
    let d = Domain::new(k, TRI)?;
    let ev = EventSpec::new(EventKind::BoxLeftRight, k, TRI)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, lag) in [0.25, 0.5, 1.0].into_iter().enumerate() {
        let c = time_correlation(&d, &ev, lag, 1_000_000, 501 + i as u64, 0)?;
        let exact = c.exact.expect("rhombus is small enough to enumerate");
        let z = (c.mean - exact) / c.stderr;
        ok &= z.abs() <= 4.0;
        parts.push(format!("t={lag}: {:.5} vs {:.5} ({z:+.2} sd)", c.mean, exact));
    }
    Ok((ok, parts.join(", ")))
}

fn influence_check(k: DomainKind, kind: EventKind, seed: u64) -> percolab::Result<(bool, String)> {
    let d = Domain::new(k, TRI)?;
    let ev = EventSpec::new(kind, k, TRI)?;
    let trials = 10_000;
    let st = time_set_stats(&d, &ev, 1.0, trials, seed, 0)?;
    let (i, se_dyn) = st.influence(1.0);
    let mut piv = Summary::default();
    for t in 0..trials {
        let c = sample(&d, 0.5, seed + 1, t)?;
        piv.push(sampler::pivotal_set(&c, &ev)?.len() as f64);
    }
    let se = (se_dyn.powi(2) + piv.stderr().powi(2)).sqrt();
    let z = (i - piv.mean()) / se;
    Ok((z.abs() <= 4.0, format!("{i:.3} vs {:.3} ({z:+.2} sd)", piv.mean())))
}

fn ac6() -> Outcome {
    let (a, sa) = influence_check(DomainKind::Box { side: 8 }, EventKind::BoxLeftRight, 601)?;
    let (b, sb) =
        influence_check(DomainKind::Annulus { r: 3, big_r: 12 }, EventKind::JClusters(2, Color::White), 603)?;
    Ok((a && b, format!("box 8: {sa}; two clusters (3,12): {sb}")))
}

fn ac7() -> Outcome {
    if !full() {
        return Ok((false, "not evaluated: needs 1e5 trials per point up to R = 256; set PERCOLAB_ACCEPTANCE_FULL=1".into()));
    }
    let events: [(&str, EventKind, LatticeKind, f64); 5] = [
        ("one-arm", EventKind::AnnulusOneArm(Color::White), TRI, 0.03),
        ("two-arm", EventKind::AlternatingKArm(2), TRI, 0.05),
        ("half-plane", EventKind::HalfPlaneKArm(vec![Color::White]), TRI, 0.05),
        ("four-arm", EventKind::AlternatingKArm(4), TRI, 0.15),
        ("five-arm", EventKind::PolychromaticFiveArm, LatticeKind::SquareBond, 0.2),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (name, kind, lattice, tol)) in events.into_iter().enumerate() {
        let reference = reference_exponent(&kind);
        let mut pts = Vec::new();
        for big_r in [32, 64, 128, 256] {
            let ev = arm_event(kind.clone(), 4, big_r, lattice)?;
            let e = estimate_arm(&ev, 100_000, 701 + i as u64, 0.5, ArmMethod::Decide, 0)?;
            pts.push(FitPoint::from_estimate(&e)?);
        }
        let f = fit_exponent(&pts, reference, tol, true)?;
        let pass = f.verdict == Some(true);
        ok &= pass;
        parts.push(format!("{name} {:.3}±{:.3} (ref {:.3})", f.slope, f.stderr, reference.unwrap_or(f64::NAN)));
    }
    Ok((ok, parts.join(", ")))
}

fn ac8() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in [8, 16, 32] {
        let d = Domain::new(DomainKind::Box { side: m }, LatticeKind::SquareBond)?;
        let n = 100_000u64;
        let mut k = 0u64;
        for t in 0..n {
            let c = sample(&d, 0.5, 801, t)?;
            k += u64::from(decide_bits(&d, &c.bits, &EventKind::BoxLeftRight));
        }
        let p = k as f64 / n as f64;
        let z = (p - 0.5) / (0.25 / n as f64).sqrt();
        ok &= z.abs() <= 3.0;
        parts.push(format!("m={m}: {p:.4} ({z:+.2} sd)"));
    }
    Ok((ok, parts.join(", ")))
}

/// Band on the per-doubling `log2` decrement of the box revealment, frozen
/// from a 2000-trial pilot (decrements 0.197, 0.218, 0.228).
const DECREMENT_BAND: (f64, f64) = (0.12, 0.38);

fn ac9() -> Outcome {
    let mut deltas = Vec::new();
    for side in [16, 32, 64, 128] {
        deltas.push(measure_revealment(RevealAlgorithm::Box { side }, 20_000, 901)?.delta_hat());
    }
    let dec: Vec<f64> = deltas.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let ok = deltas.windows(2).all(|w| w[1] < w[0]) && dec.iter().all(|&x| DECREMENT_BAND.0 <= x && x <= DECREMENT_BAND.1);
    let shown: Vec<String> = deltas.iter().map(|d| format!("{d:.4}")).collect();
    let decs: Vec<String> = dec.iter().map(|d| format!("{d:.3}")).collect();
    Ok((ok, format!("delta {} decrements {} band [{}, {}]", shown.join(" "), decs.join(" "), DECREMENT_BAND.0, DECREMENT_BAND.1)))
}

fn ac10() -> Outcome {
    let radii = [4u32, 8, 16, 32, 64];
    let mut triples = Vec::new();
    for i in 0..radii.len() {
        for j in i + 1..radii.len() {
            for k in j + 1..radii.len() {
                triples.push((radii[i], radii[j], radii[k]));
            }
        }
    }
    let rep = quasi_mult_table(2, &triples, 20_000, 1001, 0)?;
    let flagged = rep.rows.iter().filter(|r| r.flagged).count();
    let ok = flagged == 0 && rep.spread < 3.0;
    Ok((ok, format!("{} triples, spread {:.3}, {flagged} flagged", rep.rows.len(), rep.spread)))
}

fn ac11() -> Outcome {
    let mut worst = 0.0f64;
    let mut ok = true;
    for n in [10.0f64, 1e3, 1e6] {
        match dimension_bound(n.powf(-5.0 / 48.0), n.powf(31.0 / 48.0))? {
            DimensionBound::Value(v) => worst = worst.max((v - 31.0 / 36.0).abs()),
            _ => ok = false,
        }
    }
    Ok((ok && worst <= 1e-12, format!("max deviation from 31/36: {worst:.2e}")))
}

fn ac12() -> Outcome {
    let k = DomainKind::Box { side: 8 };
    let d = Domain::new(k, TRI)?;
    let ev = EventSpec::new(EventKind::BoxLeftRight, k, TRI)?;
    let grid = epsilon_grid(1.0);
    let mut violations = 0;
    for t in 0..1000 {
        let ts = crossing_time_set(&d, &ev, 1.0, 1201, t)?;
        let (mu, n) = (ts.measure(), ts.boundary_count() as f64);
        for (&eps, &c) in grid.iter().zip(&covering_numbers(&ts, &grid)?) {
            violations += u32::from(c as f64 > 2.0 * mu / eps + 4.0 * n + 1.0);
        }
    }
    Ok((violations == 0, format!("{violations} violations over 1000 trajectories x {} scales", grid.len())))
}

const SMALL_RUNS: [&[&str]; 10] = [
    &["arm-estimate", "--event", "one-arm", "--r", "2", "--R", "8,16", "--trials", "600"],
    &["fit-exponent", "--event", "one-arm", "--r", "2", "--R", "4,8,16,32", "--trials", "600"],
    &["revealment", "--alg", "box", "--R", "16", "--trials", "600"],
    &["fourier-check"],
    &["dynamics-correlation", "--trials", "2000"],
    &["crossing-times", "--size", "8", "--trials", "300"],
    &["dimension-bound", "--R", "8,16,32", "--trials", "300"],
    &["quasi-mult", "--radii", "4,8,16", "--trials", "600"],
    &["separation-tail", "--R", "16", "--trials", "300"],
    &["noise-curve", "--size", "8,16", "--eps", "0.1", "--trials", "600"],
];

fn payload(args: &[&str], workers: &str, out: &Path) -> Option<Vec<u8>> {
    let _ = fs::remove_dir_all(out);
    let st = Command::new(env!("CARGO_BIN_EXE_percolab"))
        .args(args)
        .args(["--seed", "13", "--workers", workers])
        .arg("--out")
        .arg(out)
        .output()
        .ok()?;
    if !st.status.success() {
        return None;
    }
    fs::read(out.join(format!("{}.csv", args[0]))).ok()
}

fn ac13() -> Outcome {
    let base = std::env::temp_dir().join(format!("percolab-acceptance-{}", std::process::id()));
    let mut bad = Vec::new();
    for args in SMALL_RUNS {
        let a = payload(args, "1", &base.join("a"));
        let b = payload(args, "1", &base.join("b"));
        let c = payload(args, "4", &base.join("c"));
        if a.is_none() || a != b || a != c {
            bad.push(args[0]);
        }
    }
    let _ = fs::remove_dir_all(&base);
    Ok((bad.is_empty(), format!("{} subcommands, differing: [{}]", SMALL_RUNS.len(), bad.join(", "))))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("AC1", ac1),
        ("AC2", ac2),
        ("AC3", ac3),
        ("AC4", ac4),
        ("AC5", ac5),
        ("AC6", ac6),
        ("AC7", ac7),
        ("AC8", ac8),
        ("AC9", ac9),
        ("AC10", ac10),
        ("AC11", ac11),
        ("AC12", ac12),
        ("AC13", ac13),
    ];
    let mut failed = Vec::new();
    for (id, f) in criteria {
        let start = Instant::now();
        let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        println!("{id} {} {detail} [{:.1}s]", if pass { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        // the exponent criterion is only binding when it actually ran
        if !pass && (id != "AC7" || full()) {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
