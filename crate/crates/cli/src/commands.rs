//! One function per subcommand, each producing a `Table`.

use serde_json::json;

use percolab::dynamics::{self, DimensionBound};
use percolab::estimators::{self, ArmMethod, FitPoint};
use percolab::exec;
use percolab::explore::{measure_revealment_range, reveal_domain, RevealAlgorithm, RevealmentRecord};
use percolab::fourier::{self, to_f64};
use percolab::lattice::{Domain, DomainKind, LatticeKind};
use percolab::sampler::{Color, EventKind, EventSpec};

use crate::{num, usage, AlgName, Cli, CliError, Command, EventArgs, EventName, LatticeName, MethodName, ShapeName, Table};

type Res<T> = Result<T, CliError>;

pub fn execute(cli: &Cli) -> Res<Table> {
    let c = &cli.common;
    let (seed, workers) = (c.seed, c.workers);
    let trials = |default: u64| -> Res<u64> {
        match c.trials {
            Some(0) => Err(usage("--trials must be at least 1")),
            Some(t) => Ok(t),
            None => Ok(default),
        }
    };
    match &cli.command {
        Command::ArmEstimate { event, r, big_r, p, method } => arm_estimate(event, *r, big_r, *p, *method, trials(10_000)?, seed, workers),
        Command::FitExponent { event, r, big_r, tolerance, keep_smallest } => {
            fit_exponent(event, *r, big_r, *tolerance, *keep_smallest, trials(10_000)?, seed, workers)
        }
        Command::Revealment { alg, big_r, r } => revealment(*alg, *big_r, *r, trials(1000)?, seed, workers),
        Command::FourierCheck { .. } => fourier_check(seed),
        Command::DynamicsCorrelation { domain, size, lags } => dynamics_correlation(*domain, *size, lags, trials(100_000)?, seed, workers),
        Command::CrossingTimes { domain, size, r, big_r, horizon, gamma } => {
            crossing_times(*domain, *size, *r, *big_r, *horizon, *gamma, trials(1000)?, seed, workers)
        }
        Command::DimensionBound { p, influence, big_r, r } => dimension_bound(*p, *influence, big_r, *r, trials(2000)?, seed, workers),
        Command::QuasiMult { j, radii } => quasi_mult(*j, radii, trials(5000)?, seed, workers),
        Command::SeparationTail { a, big_r, deltas } => separation_tail(*a, *big_r, deltas, trials(2000)?, seed, workers),
        Command::NoiseCurve { size, eps, gamma } => noise_curve(size, eps, *gamma, trials(4000)?, seed, workers),
    }
}

fn lattice(l: LatticeName) -> LatticeKind {
    match l {
        LatticeName::Triangular => LatticeKind::TriangularSite,
        LatticeName::Square => LatticeKind::SquareBond,
    }
}

pub fn event_kind(a: &EventArgs) -> Res<EventKind> {
    Ok(match a.event {
        EventName::OneArm => EventKind::AnnulusOneArm(Color::White),
        EventName::OneArmBlack => EventKind::AnnulusOneArm(Color::Black),
        EventName::TwoArm => EventKind::AlternatingKArm(2),
        EventName::FourArm => EventKind::AlternatingKArm(4),
        EventName::Alternating => EventKind::AlternatingKArm(a.k.ok_or_else(|| usage("--k is required for --event alternating"))?),
        EventName::HalfPlane => {
            let s = a.colors.as_deref().unwrap_or("w");
            let colors = s
                .chars()
                .map(|ch| match ch {
                    'w' | 'W' => Ok(Color::White),
                    'b' | 'B' => Ok(Color::Black),
                    _ => Err(usage(format!("--colors: '{ch}' is not w or b"))),
                })
                .collect::<Res<Vec<_>>>()?;
            EventKind::HalfPlaneKArm(colors)
        }
        EventName::JClusters => EventKind::JClusters(a.j.ok_or_else(|| usage("--j is required for --event j-clusters"))?, Color::White),
        EventName::FiveArm => EventKind::PolychromaticFiveArm,
    })
}

fn check_radii(r: u32, big_r: &[u32]) -> Res<()> {
    if r < 1 {
        return Err(usage("--r must be at least 1"));
    }
    if big_r.is_empty() || big_r.iter().any(|&x| x < 1) {
        return Err(usage("--R values must be at least 1"));
    }
    Ok(())
}

fn arm_events(a: &EventArgs, r: u32, big_r: &[u32]) -> Res<Vec<EventSpec>> {
    check_radii(r, big_r)?;
    let kind = event_kind(a)?;
    big_r.iter().map(|&br| Ok(estimators::arm_event(kind.clone(), r, br, lattice(a.lattice))?)).collect()
}

fn method(m: MethodName) -> ArmMethod {
    match m {
        MethodName::Decide => ArmMethod::Decide,
        MethodName::Exploration => ArmMethod::Exploration,
    }
}

fn trial_cols(seed: u64, trials: u64) -> [String; 3] {
    [seed.to_string(), "0".into(), trials.to_string()]
}

fn with_trials(mut row: Vec<String>, seed: u64, trials: u64) -> Vec<String> {
    row.extend(trial_cols(seed, trials));
    row
}

#[allow(clippy::too_many_arguments)]
fn arm_estimate(a: &EventArgs, r: u32, big_r: &[u32], p: f64, m: MethodName, trials: u64, seed: u64, workers: usize) -> Res<Table> {
    if !(0.0..=1.0).contains(&p) {
        return Err(usage(format!("--p {p} is not a probability")));
    }
    let mut t = Table::new(&[
        "event", "lattice", "r", "R", "p", "trials", "successes", "p_hat", "ci_lo", "ci_hi", "conventional", "seed", "trial_start",
        "trial_end",
    ]);
    for ev in arm_events(a, r, big_r)? {
        let e = estimators::estimate_arm(&ev, trials, seed, p, method(m), workers)?;
        t.push(with_trials(
            vec![
                format!("{:?}", ev.kind),
                format!("{:?}", ev.lattice),
                e.r.to_string(),
                e.big_r.to_string(),
                num(p),
                e.trials.to_string(),
                e.successes.to_string(),
                num(e.p_hat),
                num(e.ci.0),
                num(e.ci.1),
                e.conventional.to_string(),
            ],
            seed,
            e.trials,
        ));
        t.plot.push([f64::from(e.big_r), e.p_hat, (e.ci.1 - e.ci.0) / 2.0]);
    }
    Ok(t)
}

pub fn default_tolerance(kind: &EventKind) -> f64 {
    match kind {
        EventKind::AnnulusOneArm(_) => 0.03,
        EventKind::AlternatingKArm(2) => 0.05,
        EventKind::AlternatingKArm(4) => 0.15,
        EventKind::HalfPlaneKArm(s) if s.len() == 1 => 0.05,
        EventKind::PolychromaticFiveArm => 0.2,
        _ => 0.1,
    }
}

#[allow(clippy::too_many_arguments)]
fn fit_exponent(
    a: &EventArgs,
    r: u32,
    big_r: &[u32],
    tolerance: Option<f64>,
    keep_smallest: bool,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Res<Table> {
    let events = arm_events(a, r, big_r)?;
    let kind = events[0].kind.clone();
    let mut t = Table::new(&[
        "row", "r", "R", "p_hat", "ci_lo", "ci_hi", "slope", "stderr", "reference", "status", "seed", "trial_start", "trial_end",
    ]);
    let mut points = Vec::new();
    let mut insufficient = Vec::new();
    for ev in &events {
        let e = estimators::estimate_arm(ev, trials, seed, 0.5, ArmMethod::Decide, workers)?;
        match FitPoint::from_estimate(&e) {
            Ok(p) => points.push(p),
            Err(err) => insufficient.push(err.to_string()),
        }
        t.push(with_trials(
            vec![
                "point".into(),
                e.r.to_string(),
                e.big_r.to_string(),
                num(e.p_hat),
                num(e.ci.0),
                num(e.ci.1),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ],
            seed,
            trials,
        ));
        t.plot.push([f64::from(e.big_r) / f64::from(r), e.p_hat, (e.ci.1 - e.ci.0) / 2.0]);
    }
    let reference = estimators::reference_exponent(&kind);
    let tol = tolerance.unwrap_or_else(|| default_tolerance(&kind));
    let fit = if insufficient.is_empty() {
        estimators::fit_exponent(&points, reference, tol, !keep_smallest).map_err(|e| e.to_string())
    } else {
        Err(format!("insufficient trials: {}", insufficient.join("; ")))
    };
    let refs = reference.map(num).unwrap_or_default();
    match &fit {
        Ok(f) => {
            let status = match f.verdict {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "no-reference",
            };
            t.push(with_trials(
                vec![
                    "fit".into(),
                    r.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    num(f.slope),
                    num(f.stderr),
                    refs,
                    status.into(),
                ],
                seed,
                trials,
            ));
            t.summary = json!({"slope": f.slope, "stderr": f.stderr, "reference": reference, "tolerance": tol, "verdict": status});
        }
        Err(msg) => {
            t.push(with_trials(
                vec![
                    "fit".into(),
                    r.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    refs,
                    "insufficient".into(),
                ],
                seed,
                trials,
            ));
            t.summary = json!({"verdict": "insufficient", "message": msg});
        }
    }
    Ok(t)
}

fn revealment(alg: AlgName, big_r: u32, r: u32, trials: u64, seed: u64, workers: usize) -> Res<Table> {
    let alg = match alg {
        AlgName::Box => RevealAlgorithm::Box { side: big_r },
        AlgName::Annulus => {
            if r < 1 || r >= big_r {
                return Err(usage(format!("--r must satisfy 1 <= r < R, got r = {r}, R = {big_r}")));
            }
            RevealAlgorithm::Annulus { r, big_r }
        }
    };
    let domain = reveal_domain(alg)?;
    let parts = exec::run_sharded(trials, workers, |range| measure_revealment_range(alg, &domain, seed, range))?;
    let mut rec = RevealmentRecord::empty(domain.len());
    let mut positives = 0;
    for (p, k) in &parts {
        rec.merge(p);
        positives += k;
    }
    let mut t = Table::new(&["cell", "u", "v", "count", "rate", "seed", "trial_start", "trial_end"]);
    for (i, (s, &c)) in domain.sites().iter().zip(&rec.counts).enumerate() {
        let rate = c as f64 / trials as f64;
        t.push(with_trials(vec![i.to_string(), s.u.to_string(), s.v.to_string(), c.to_string(), num(rate)], seed, trials));
        t.plot.push([i as f64, rate, (rate * (1.0 - rate) / trials as f64).sqrt()]);
    }
    t.summary = json!({"delta_hat": rec.delta_hat(), "argmax": rec.argmax(), "positives": positives, "cells": domain.len()});
    Ok(t)
}

fn fourier_check(seed: u64) -> Res<Table> {
    let mut t = Table::new(&["function", "n", "k", "weight", "bound", "holds", "delta", "seed", "trial_start", "trial_end"]);
    let mut violations = 0;
    let corpus = fourier::builtin_corpus()?;
    for c in &corpus {
        let rep = fourier::check_theorem_noise(&c.f, c.alg.as_ref())?;
        for l in &rep.levels {
            violations += usize::from(!l.holds);
            t.push(vec![
                c.name.into(),
                c.f.n.to_string(),
                l.k.to_string(),
                l.weight.to_string(),
                l.bound.to_string(),
                l.holds.to_string(),
                rep.delta.to_string(),
                seed.to_string(),
                "0".into(),
                "0".into(),
            ]);
            t.plot.push([f64::from(l.k), to_f64(&l.weight), to_f64(&l.bound)]);
        }
    }
    t.summary = json!({"functions": corpus.len(), "violations": violations});
    if violations > 0 {
        t.failure = Some(format!("{violations} level-weight violations"));
    }
    Ok(t)
}

fn crossing_domain(shape: ShapeName, size: u32, r: u32, big_r: u32) -> Res<(Domain, EventSpec)> {
    let tri = LatticeKind::TriangularSite;
    let (kind, ev) = match shape {
        ShapeName::Box => {
            if size < 2 {
                return Err(usage("--size must be at least 2 for a box"));
            }
            (DomainKind::Box { side: size }, EventKind::BoxLeftRight)
        }
        ShapeName::Rhombus => {
            if size < 1 {
                return Err(usage("--size must be at least 1"));
            }
            (DomainKind::Rhombus { width: size }, EventKind::BoxLeftRight)
        }
        ShapeName::Annulus => {
            if r < 1 || r >= big_r {
                return Err(usage(format!("--r must satisfy 1 <= r < R, got r = {r}, R = {big_r}")));
            }
            (DomainKind::Annulus { r, big_r }, EventKind::AnnulusOneArm(Color::White))
        }
    };
    Ok((Domain::new(kind, tri)?, EventSpec::new(ev, kind, tri)?))
}

fn dynamics_correlation(shape: ShapeName, size: u32, lags: &[f64], trials: u64, seed: u64, workers: usize) -> Res<Table> {
    let (d, ev) = crossing_domain(shape, size, 1, 8)?;
    if lags.iter().any(|&l| !(l >= 0.0 && l.is_finite())) {
        return Err(usage("--t values must be nonnegative"));
    }
    let mut t = Table::new(&["t", "mean", "stderr", "exact", "seed", "trial_start", "trial_end"]);
    for &lag in lags {
        let c = dynamics::time_correlation(&d, &ev, lag, trials, seed, workers)?;
        t.push(with_trials(vec![num(lag), num(c.mean), num(c.stderr), c.exact.map(num).unwrap_or_default()], seed, trials));
        t.plot.push([lag, c.mean, c.stderr]);
    }
    Ok(t)
}

#[allow(clippy::too_many_arguments)]
fn crossing_times(
    shape: ShapeName,
    size: u32,
    r: u32,
    big_r: u32,
    horizon: f64,
    gamma: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Res<Table> {
    let (d, ev) = crossing_domain(shape, size, r, big_r)?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(usage("--horizon must be positive"));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(usage("--gamma must lie in (0, 1)"));
    }
    let grid = dynamics::epsilon_grid(horizon);
    let parts = exec::run_sharded(trials, workers, |range| {
        let mut rows = Vec::new();
        for trial in range {
            let ts = dynamics::crossing_time_set(&d, &ev, horizon, seed, trial)?;
            let cov = dynamics::covering_numbers(&ts, &grid)?;
            let energy = dynamics::riesz_energy(&ts, gamma, None)?;
            rows.push((trial, ts.measure(), ts.boundary_count(), energy, cov));
        }
        Ok(rows)
    })?;
    let mut header = vec!["trial", "measure", "boundary", "energy", "bound_ok"];
    const COVER: [&str; 16] = [
        "cover_1", "cover_2", "cover_3", "cover_4", "cover_5", "cover_6", "cover_7", "cover_8", "cover_9", "cover_10", "cover_11",
        "cover_12", "cover_13", "cover_14", "cover_15", "cover_16",
    ];
    header.extend(COVER);
    header.extend(["seed", "trial_start", "trial_end"]);
    let mut t = Table::new(&header);
    let (mut violations, mut sum_n, mut sum_x, mut sum_x2) = (0u64, 0.0, 0.0, 0.0);
    for (trial, mu, n, energy, cov) in parts.into_iter().flatten() {
        let ok = grid.iter().zip(&cov).all(|(&e, &c)| c as f64 <= 2.0 * mu / e + 4.0 * n as f64 + 1.0);
        violations += u64::from(!ok);
        sum_n += n as f64;
        sum_x += mu;
        sum_x2 += mu * mu;
        let mut row = vec![trial.to_string(), num(mu), n.to_string(), num(energy), ok.to_string()];
        row.extend(cov.iter().map(|c| c.to_string()));
        row.extend([seed.to_string(), trial.to_string(), (trial + 1).to_string()]);
        t.push(row);
    }
    let n = trials as f64;
    let (mean_x, mean_x2) = (sum_x / n, sum_x2 / n);
    // mean covering number against eps, for box-counting slopes
    for (k, &e) in grid.iter().enumerate() {
        let mean: f64 = t.rows.iter().map(|r| r[5 + k].parse::<f64>().unwrap_or(0.0)).sum::<f64>() / n;
        t.plot.push([e, mean, 0.0]);
    }
    t.summary = json!({
        "mean_measure": mean_x,
        "mean_boundary": sum_n / n,
        "influence_hat": 2.0 * sum_n / n / horizon,
        "second_moment_ratio": if mean_x2 > 0.0 { mean_x * mean_x / mean_x2 } else { 0.0 },
        "covering_violations": violations,
    });
    if violations > 0 {
        t.failure = Some(format!("covering bound failed on {violations} trajectories"));
    }
    Ok(t)
}

fn bound_cell(b: DimensionBound) -> String {
    match b {
        DimensionBound::Value(v) => num(v),
        DimensionBound::EmptySet => "empty".into(),
        DimensionBound::Undefined => "undefined".into(),
    }
}

fn dimension_bound(
    p: Option<f64>,
    influence: Option<f64>,
    big_r: &[u32],
    r: u32,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Res<Table> {
    let mut t = Table::new(&["R", "p_hat", "influence_hat", "bound", "seed", "trial_start", "trial_end"]);
    match (p, influence, big_r.is_empty()) {
        (Some(p), Some(i), true) => {
            let b = dynamics::dimension_bound(p, i)?;
            t.push(vec![String::new(), num(p), num(i), bound_cell(b), seed.to_string(), "0".into(), "0".into()]);
        }
        (None, None, false) => {
            check_radii(r, big_r)?;
            for &br in big_r {
                if br <= r {
                    return Err(usage(format!("--R {br} must exceed --r {r}")));
                }
                let ev = estimators::arm_event(EventKind::AnnulusOneArm(Color::White), r, br, LatticeKind::TriangularSite)?;
                let est = estimators::estimate_arm(&ev, trials, seed, 0.5, ArmMethod::Decide, workers)?;
                let d = Domain::new(ev.domain, ev.lattice)?;
                let st = dynamics::time_set_stats(&d, &ev, 1.0, trials, seed, workers)?;
                let (i, _) = st.influence(1.0);
                let b = if est.p_hat > 0.0 && i > 0.0 { bound_cell(dynamics::dimension_bound(est.p_hat, i)?) } else { "insufficient".into() };
                t.push(with_trials(vec![br.to_string(), num(est.p_hat), num(i), b], seed, trials));
                if let Ok(DimensionBound::Value(v)) = dynamics::dimension_bound(est.p_hat.max(f64::MIN_POSITIVE), i.max(f64::MIN_POSITIVE)) {
                    t.plot.push([f64::from(br), v, 0.0]);
                }
            }
        }
        _ => return Err(usage("give either --p with --influence, or --R for estimated inputs")),
    }
    Ok(t)
}

fn quasi_mult(j: u32, radii: &[u32], trials: u64, seed: u64, workers: usize) -> Res<Table> {
    if j < 2 || j % 2 != 0 {
        return Err(usage(format!("--j must be even and at least 2, got {j}")));
    }
    let mut rs = radii.to_vec();
    rs.sort_unstable();
    rs.dedup();
    if rs.len() < 3 || rs[0] < 1 {
        return Err(usage("--radii needs at least three distinct positive values"));
    }
    let mut triples = Vec::new();
    for a in 0..rs.len() {
        for b in a + 1..rs.len() {
            for c in b + 1..rs.len() {
                triples.push((rs[a], rs[b], rs[c]));
            }
        }
    }
    let rep = estimators::quasi_mult_table(j, &triples, trials, seed, workers)?;
    let mut t = Table::new(&["r", "r1", "r2", "ratio", "ci_lo", "ci_hi", "flagged", "seed", "trial_start", "trial_end"]);
    for row in &rep.rows {
        let (a, b, c) = row.radii;
        t.push(with_trials(
            vec![a.to_string(), b.to_string(), c.to_string(), num(row.ratio), num(row.ci.0), num(row.ci.1), row.flagged.to_string()],
            seed,
            trials,
        ));
        t.plot.push([f64::from(c) / f64::from(a), row.ratio, (row.ci.1 - row.ci.0) / 2.0]);
    }
    t.summary = json!({"spread": rep.spread, "triples": rep.rows.len()});
    Ok(t)
}

fn separation_tail(a: f64, big_r: u32, deltas: &[f64], trials: u64, seed: u64, workers: usize) -> Res<Table> {
    if !(a > 0.0 && a < 1.0) {
        return Err(usage(format!("--a {a} must lie in (0, 1)")));
    }
    if deltas.is_empty() || deltas.iter().any(|&d| !(d > 0.0)) {
        return Err(usage("--deltas must be positive"));
    }
    let mut ds = deltas.to_vec();
    ds.sort_by(f64::total_cmp);
    let tail = estimators::separation_tail(a, big_r, &ds, trials, seed, workers)?;
    let mut t = Table::new(&["delta", "count", "p_hat", "ci_lo", "ci_hi", "seed", "trial_start", "trial_end"]);
    for row in &tail.rows {
        t.push(with_trials(vec![num(row.delta), row.count.to_string(), num(row.p_hat), num(row.ci.0), num(row.ci.1)], seed, trials));
        t.plot.push([row.delta, row.p_hat, (row.ci.1 - row.ci.0) / 2.0]);
    }
    t.summary = json!({"r": tail.r, "R": tail.big_r, "crossed": tail.crossed, "slope": tail.slope});
    Ok(t)
}

fn noise_curve(sizes: &[u32], eps: &[f64], gamma: Option<f64>, trials: u64, seed: u64, workers: usize) -> Res<Table> {
    if sizes.iter().any(|&m| m < 2) {
        return Err(usage("--size values must be at least 2"));
    }
    if eps.is_empty() == gamma.is_none() {
        return Err(usage("give exactly one of --eps and --gamma"));
    }
    if trials < 2 {
        return Err(usage("--trials must be at least 2"));
    }
    let mut t = Table::new(&["m", "eps", "value", "stderr", "p_hat", "seed", "trial_start", "trial_end"]);
    for &m in sizes {
        let list: Vec<f64> = match gamma {
            Some(g) => {
                let e = f64::from(m).powf(-g);
                vec![e.min(1.0 - e)]
            }
            None => eps.to_vec(),
        };
        let kind = DomainKind::Box { side: m };
        let ev = EventSpec::new(EventKind::BoxLeftRight, kind, LatticeKind::TriangularSite)?;
        for e in list {
            if !(0.0..=0.5).contains(&e) {
                return Err(usage(format!("--eps {e} must lie in [0, 1/2]")));
            }
            let pt = estimators::noise_sensitivity(&ev, e, trials, seed, workers)?;
            t.push(with_trials(vec![m.to_string(), num(e), num(pt.value), num(pt.stderr), num(pt.p_hat)], seed, trials));
            t.plot.push([f64::from(m), pt.value, pt.stderr]);
        }
    }
    Ok(t)
}
