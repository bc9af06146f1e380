//! Arm probabilities with confidence intervals, log-log exponent fits,
//! quasi-multiplicativity ratios, separation tails and noise sensitivity.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exec;
use crate::explore::{annulus_algorithm, separation_statistic, RadialExplorer};
use crate::lattice::{Domain, DomainKind, LatticeKind};
use crate::rng;
use crate::sampler::{self, decide_bits, Color, EventKind, EventSpec};
use crate::stats::{wilson, Summary, Z95};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArmMethod {
    /// Sample every cell and decide.
    Decide,
    /// Run the annulus algorithm; white one-arm events only.
    Exploration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArmEstimate {
    pub event: EventSpec,
    pub r: u32,
    pub big_r: u32,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci: (f64, f64),
    /// Set when `r >= R` and the probability is 1 by convention.
    pub conventional: bool,
}

impl ArmEstimate {
    fn from_counts(event: EventSpec, r: u32, big_r: u32, trials: u64, successes: u64) -> ArmEstimate {
        let p_hat = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        ArmEstimate { event, r, big_r, trials, successes, p_hat, ci: wilson(successes, trials, Z95), conventional: false }
    }

    fn conventional(event: EventSpec, r: u32, big_r: u32) -> ArmEstimate {
        ArmEstimate { event, r, big_r, trials: 0, successes: 0, p_hat: 1.0, ci: (1.0, 1.0), conventional: true }
    }

    /// Variance of `ln p_hat` by the delta method; zero for conventional
    /// values.
    pub fn log_variance(&self) -> f64 {
        if self.conventional {
            0.0
        } else {
            (1.0 - self.p_hat) / (self.trials as f64 * self.p_hat)
        }
    }
}

pub fn radii(kind: DomainKind) -> Option<(u32, u32)> {
    match kind {
        DomainKind::Annulus { r, big_r } | DomainKind::HalfPlaneAnnulus { r, big_r } => Some((r, big_r)),
        _ => None,
    }
}

/// The event `kind` on the annulus (or half-annulus) between `r` and `R`.
pub fn arm_event(kind: EventKind, r: u32, big_r: u32, lattice: LatticeKind) -> Result<EventSpec> {
    let domain = if matches!(kind, EventKind::HalfPlaneKArm(_)) {
        DomainKind::HalfPlaneAnnulus { r, big_r }
    } else {
        DomainKind::Annulus { r, big_r }
    };
    EventSpec::new(kind, domain, lattice)
}

pub fn estimate_arm(
    event: &EventSpec,
    trials: u64,
    seed: u64,
    p: f64,
    method: ArmMethod,
    workers: usize,
) -> Result<ArmEstimate> {
    let (r, big_r) = radii(event.domain)
        .ok_or_else(|| Error::DomainMismatch(format!("arm event on {:?}", event.domain)))?;
    if r >= big_r {
        return Ok(ArmEstimate::conventional(event.clone(), r, big_r));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is needed".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} is not a probability")));
    }
    let domain = Domain::new(event.domain, event.lattice)?;
    let counts = match method {
        ArmMethod::Decide => {
            exec::run_sharded(trials, workers, |range| {
                let mut k = 0u64;
                for trial in range {
                    let c = sampler::sample(&domain, p, seed, trial)?;
                    k += u64::from(decide_bits(&domain, &c.bits, &event.kind));
                }
                Ok(k)
            })?
        }
        ArmMethod::Exploration => {
            let ok = event.kind == EventKind::AnnulusOneArm(Color::White)
                && event.lattice == LatticeKind::TriangularSite
                && matches!(event.domain, DomainKind::Annulus { .. })
                && p == 0.5;
            if !ok {
                return Err(Error::DomainMismatch(
                    "exploration estimates need the white one-arm event on a triangular annulus at p = 1/2".into(),
                ));
            }
            exec::run_sharded(trials, workers, |range| {
                let mut ex = RadialExplorer::new(big_r)?;
                let mut k = 0u64;
                for trial in range {
                    k += u64::from(annulus_algorithm(&mut ex, r, seed, trial)?.outcome);
                }
                Ok(k)
            })?
        }
    };
    Ok(ArmEstimate::from_counts(event.clone(), r, big_r, trials, counts.iter().sum()))
}

/// Several events decided on the same configurations.
#[derive(Clone, Debug)]
pub struct SharedEstimate {
    pub estimates: Vec<ArmEstimate>,
    /// `joint[i][j]`: trials where events `i` and `j` both hold.
    pub joint: Vec<Vec<u64>>,
}

pub fn estimate_shared(events: &[EventSpec], trials: u64, seed: u64, p: f64, workers: usize) -> Result<SharedEstimate> {
    let first = events.first().ok_or_else(|| Error::InvalidParameter("no events".into()))?;
    if events.iter().any(|e| e.domain != first.domain || e.lattice != first.lattice) {
        return Err(Error::DomainMismatch("shared estimation needs one domain".into()));
    }
    let (r, big_r) = radii(first.domain).unwrap_or((0, 0));
    let domain = Domain::new(first.domain, first.lattice)?;
    let m = events.len();
    let parts = exec::run_sharded(trials, workers, |range| {
        let mut joint = vec![vec![0u64; m]; m];
        for trial in range {
            let c = sampler::sample(&domain, p, seed, trial)?;
            let hold: Vec<bool> = events.iter().map(|e| decide_bits(&domain, &c.bits, &e.kind)).collect();
            for i in 0..m {
                for j in 0..m {
                    joint[i][j] += u64::from(hold[i] && hold[j]);
                }
            }
        }
        Ok(joint)
    })?;
    let mut joint = vec![vec![0u64; m]; m];
    for part in &parts {
        for i in 0..m {
            for j in 0..m {
                joint[i][j] += part[i][j];
            }
        }
    }
    let estimates = (0..m).map(|i| ArmEstimate::from_counts(events[i].clone(), r, big_r, trials, joint[i][i])).collect();
    Ok(SharedEstimate { estimates, joint })
}

/// Asymptotic exponent of `P[event]` in `R/r`, when one is known.
pub fn reference_exponent(kind: &EventKind) -> Option<f64> {
    match kind {
        EventKind::AnnulusOneArm(_) => Some(-5.0 / 48.0),
        EventKind::AlternatingKArm(k) => {
            let k = f64::from(*k);
            Some((1.0 - k * k) / 12.0)
        }
        EventKind::HalfPlaneKArm(seq) => {
            let k = seq.len() as f64;
            Some(-k * (k + 1.0) / 6.0)
        }
        EventKind::PolychromaticFiveArm => Some(-2.0),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitPoint {
    pub scale: f64,
    pub p_hat: f64,
    /// Inverse variance of `ln p_hat`.
    pub weight: f64,
}

impl FitPoint {
    /// Scale `R / r`.
    pub fn from_estimate(e: &ArmEstimate) -> Result<FitPoint> {
        if e.conventional || e.successes == 0 || e.successes == e.trials {
            return Err(Error::Insufficient(format!(
                "{} successes in {} trials at ({}, {})",
                e.successes, e.trials, e.r, e.big_r
            )));
        }
        Ok(FitPoint { scale: f64::from(e.big_r) / f64::from(e.r), p_hat: e.p_hat, weight: 1.0 / e.log_variance() })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit {
    pub points: Vec<(f64, f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub reference: Option<f64>,
    pub tolerance: f64,
    pub verdict: Option<bool>,
}

/// Weighted least squares of `ln p` on `ln scale`. The smallest scale is
/// dropped when `drop_smallest` is set.
pub fn fit_exponent(points: &[FitPoint], reference: Option<f64>, tolerance: f64, drop_smallest: bool) -> Result<ExponentFit> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.scale.total_cmp(&b.scale));
    if drop_smallest && !pts.is_empty() {
        pts.remove(0);
    }
    if pts.len() < 3 {
        return Err(Error::Insufficient(format!("{} radii, need at least 3", pts.len())));
    }
    if let Some(q) = pts.iter().find(|q| !(q.p_hat > 0.0 && q.weight > 0.0 && q.scale > 0.0)) {
        return Err(Error::Insufficient(format!("unusable point {q:?}")));
    }
    let xy: Vec<(f64, f64, f64)> = pts.iter().map(|q| (q.scale.ln(), q.p_hat.ln(), q.weight)).collect();
    let sw: f64 = xy.iter().map(|t| t.2).sum();
    let mx = xy.iter().map(|t| t.2 * t.0).sum::<f64>() / sw;
    let my = xy.iter().map(|t| t.2 * t.1).sum::<f64>() / sw;
    let sxx: f64 = xy.iter().map(|t| t.2 * (t.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|t| t.2 * (t.0 - mx) * (t.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::Insufficient("all radii equal".into()));
    }
    let slope = sxy / sxx;
    let stderr = (1.0 / sxx).sqrt();
    let verdict = reference.map(|r| (slope - r).abs() <= tolerance);
    Ok(ExponentFit { points: xy, slope, intercept: my - slope * mx, stderr, reference, tolerance, verdict })
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiMultRow {
    pub radii: (u32, u32, u32),
    pub ratio: f64,
    pub ci: (f64, f64),
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiMultReport {
    pub arms: u32,
    pub rows: Vec<QuasiMultRow>,
    /// Largest over smallest ratio among unflagged rows.
    pub spread: f64,
}

/// Per-annulus seed, so every `(r, R)` gets its own configurations.
fn annulus_seed(seed: u64, r: u32, big_r: u32) -> u64 {
    rng::hash(seed, u64::from(r), u64::from(big_r), rng::STREAM_RESAMPLE)
}

/// `α_j(r,r') α_j(r',r'') / α_j(r,r'')` with delta-method intervals.
pub fn quasi_mult_table(
    arms: u32,
    triples: &[(u32, u32, u32)],
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<QuasiMultReport> {
    let mut cache: BTreeMap<(u32, u32), ArmEstimate> = BTreeMap::new();
    let mut rows = Vec::new();
    for &(a, b, c) in triples {
        if !(a <= b && b <= c && a < c) {
            return Err(Error::InvalidParameter(format!("radii ({a}, {b}, {c}) out of order")));
        }
        let keys = [(a, b), (b, c), (a, c)];
        for &(r, big_r) in &keys {
            if !cache.contains_key(&(r, big_r)) {
                let ev = arm_event(EventKind::AlternatingKArm(arms), r, big_r, LatticeKind::TriangularSite)?;
                let est = estimate_arm(&ev, trials, annulus_seed(seed, r, big_r), 0.5, ArmMethod::Decide, workers)?;
                cache.insert((r, big_r), est);
            }
        }
        let e: Vec<&ArmEstimate> = keys.iter().map(|k| &cache[k]).collect();
        if e.iter().any(|x| x.p_hat == 0.0) {
            rows.push(QuasiMultRow { radii: (a, b, c), ratio: f64::NAN, ci: (f64::NAN, f64::NAN), flagged: true });
            continue;
        }
        let ratio = e[0].p_hat * e[1].p_hat / e[2].p_hat;
        // equal keys share one estimate, so coefficients add before squaring
        let mut coef: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for (k, s) in keys.iter().zip([1.0, 1.0, -1.0]) {
            *coef.entry(*k).or_insert(0.0) += s;
        }
        let var: f64 = coef.iter().map(|(k, c)| c * c * cache[k].log_variance()).sum();
        let half = Z95 * var.sqrt();
        rows.push(QuasiMultRow { radii: (a, b, c), ratio, ci: (ratio * (-half).exp(), ratio * half.exp()), flagged: false });
    }
    let good: Vec<f64> = rows.iter().filter(|r| !r.flagged).map(|r| r.ratio).collect();
    let spread = if good.is_empty() {
        f64::NAN
    } else {
        good.iter().cloned().fold(f64::MIN, f64::max) / good.iter().cloned().fold(f64::MAX, f64::min)
    };
    Ok(QuasiMultReport { arms, rows, spread })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailRow {
    pub delta: f64,
    pub count: u64,
    pub p_hat: f64,
    pub ci: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationTail {
    pub r: u32,
    pub big_r: u32,
    pub trials: u64,
    /// Samples with at least two crossing interfaces.
    pub crossed: u64,
    pub rows: Vec<TailRow>,
    /// Log-log slope of the tail against `δ` over rows with positive counts.
    pub slope: Option<f64>,
}

/// Empirical `P[s(aR, R) < δR]` over the grid.
pub fn separation_tail(a: f64, big_r: u32, deltas: &[f64], trials: u64, seed: u64, workers: usize) -> Result<SeparationTail> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter(format!("a = {a} not in (0, 1)")));
    }
    let r = ((a * f64::from(big_r)).round() as u32).max(1);
    if r >= big_r {
        return Err(Error::InvalidParameter(format!("inner radius {r} not below {big_r}")));
    }
    let domain = Domain::annulus(r, big_r)?;
    let parts = exec::run_sharded(trials, workers, |range| {
        let mut v = Vec::new();
        for trial in range {
            let c = sampler::sample(&domain, 0.5, seed, trial)?;
            v.push(separation_statistic(&c)?.s_value);
        }
        Ok(v)
    })?;
    let s: Vec<f64> = parts.into_iter().flatten().collect();
    let crossed = s.iter().filter(|x| x.is_finite()).count() as u64;
    let rows: Vec<TailRow> = deltas
        .iter()
        .map(|&d| {
            let count = s.iter().filter(|&&x| x < d * f64::from(big_r)).count() as u64;
            TailRow { delta: d, count, p_hat: count as f64 / trials as f64, ci: wilson(count, trials, Z95) }
        })
        .collect();
    let pts: Vec<FitPoint> = rows
        .iter()
        .filter(|t| t.count > 0 && t.count < trials && t.delta > 0.0)
        .map(|t| FitPoint { scale: t.delta, p_hat: t.p_hat, weight: t.count as f64 / (1.0 - t.p_hat) })
        .collect();
    let slope = fit_exponent(&pts, None, 0.0, false).ok().map(|f| f.slope);
    Ok(SeparationTail { r, big_r, trials, crossed, rows, slope })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisePoint {
    pub eps: f64,
    pub value: f64,
    pub stderr: f64,
    pub p_hat: f64,
}

/// `Var(E[1_A(Y) | X])` where `Y` flips each bit of `X` with probability
/// `eps`. Two independent noisy copies of each sample give
/// `Cov(f(Y1), f(Y2))`, the quantity wanted.
pub fn noise_sensitivity(event: &EventSpec, eps: f64, trials: u64, seed: u64, workers: usize) -> Result<NoisePoint> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::InvalidParameter(format!("eps = {eps} not in [0, 1/2]")));
    }
    if trials < 2 {
        return Err(Error::InvalidParameter("at least two trials are needed".into()));
    }
    let domain = Domain::new(event.domain, event.lattice)?;
    let thr = rng::threshold(eps);
    let keys = domain.keys();
    let parts = exec::run_sharded(trials, workers, |range| {
        let mut v = Vec::new();
        for trial in range {
            let x = sampler::sample(&domain, 0.5, seed, trial)?;
            let noisy = |stream| -> Vec<bool> {
                x.bits
                    .iter()
                    .zip(keys)
                    .map(|(&b, &k)| b ^ rng::bernoulli(rng::hash(seed, trial, k, stream), thr))
                    .collect()
            };
            let f1 = decide_bits(&domain, &noisy(rng::STREAM_NOISE_A), &event.kind);
            let f2 = decide_bits(&domain, &noisy(rng::STREAM_NOISE_B), &event.kind);
            v.push((f1, f2));
        }
        Ok(v)
    })?;
    let pairs: Vec<(bool, bool)> = parts.into_iter().flatten().collect();
    let n = pairs.len() as f64;
    let p = pairs.iter().map(|&(a, b)| f64::from(u8::from(a)) + f64::from(u8::from(b))).sum::<f64>() / (2.0 * n);
    let mut psi = Summary::default();
    let mut u = 0.0;
    for &(a, b) in &pairs {
        let (a, b) = (f64::from(u8::from(a)), f64::from(u8::from(b)));
        u += a * b;
        psi.push(a * b - p * (a + b));
    }
    Ok(NoisePoint { eps, value: u / n - p * p, stderr: psi.stderr(), p_hat: p })
}

pub fn noise_sensitivity_curve(
    event: &EventSpec,
    eps: &[f64],
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<NoisePoint>> {
    eps.iter().map(|&e| noise_sensitivity(event, e, trials, seed, workers)).collect()
}
