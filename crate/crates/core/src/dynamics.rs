//! Dynamical percolation at p = 1/2: every cell is re-randomized by a fair
//! coin at the times of an independent rate-1 Poisson clock.

use std::fmt::Write as _;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::fourier::{walsh_transform, TruthTable};
use crate::lattice::Domain;
use crate::rng;
use crate::sampler::{decide_bits, EventKind, EventSpec};
use crate::stats::Summary;

/// Re-randomization history of one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellHistory {
    pub initial: bool,
    /// Strictly increasing times in `(0, T]` with the coin drawn at each.
    pub events: Vec<(f64, bool)>,
}

impl CellHistory {
    /// State at `t`; the process is right-continuous.
    pub fn state_at(&self, t: f64) -> bool {
        let k = self.events.partition_point(|&(s, _)| s <= t);
        if k == 0 {
            self.initial
        } else {
            self.events[k - 1].1
        }
    }

    /// Times at which the state actually changes, with the new state.
    pub fn flips(&self) -> Vec<(f64, bool)> {
        let mut cur = self.initial;
        let mut out = Vec::new();
        for &(t, b) in &self.events {
            if b != cur {
                out.push((t, b));
                cur = b;
            }
        }
        out
    }
}

/// Cell histories are drawn on first access from a generator keyed by
/// `(seed, trial, cell key)`, so the order of queries does not matter.
pub struct Trajectory<'d> {
    pub domain: &'d Domain,
    pub horizon: f64,
    pub seed: u64,
    pub trial: u64,
    cells: Vec<OnceLock<CellHistory>>,
}

pub fn generate_trajectory(domain: &Domain, horizon: f64, seed: u64, trial: u64) -> Result<Trajectory<'_>> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter(format!("horizon {horizon} must be positive")));
    }
    let cells = (0..domain.len()).map(|_| OnceLock::new()).collect();
    Ok(Trajectory { domain, horizon, seed, trial, cells })
}

impl<'d> Trajectory<'d> {
    pub fn cell(&self, i: usize) -> &CellHistory {
        self.cells[i].get_or_init(|| {
            let key = self.domain.keys()[i];
            let mut g = rng::stream_rng(self.seed, self.trial, key, rng::STREAM_DYNAMICS);
            let initial = g.gen::<bool>();
            let mut events = Vec::new();
            let mut t = 0.0;
            loop {
                // 1 - U lies in (0, 1], so the gap is finite and positive
                // except for a zero-probability tie we skip.
                let gap = -(1.0 - g.gen::<f64>()).ln();
                t += gap;
                if t > self.horizon {
                    break;
                }
                if gap > 0.0 {
                    events.push((t, g.gen::<bool>()));
                }
            }
            CellHistory { initial, events }
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn state_at(&self, t: f64) -> Vec<bool> {
        (0..self.len()).map(|i| self.cell(i).state_at(t)).collect()
    }

    /// Number of materialized cells.
    pub fn materialized(&self) -> usize {
        self.cells.iter().filter(|c| c.get().is_some()).count()
    }

    /// All state-changing flips `(time, cell, new state)` sorted by time.
    pub fn flips(&self) -> Vec<(f64, usize, bool)> {
        let mut all: Vec<_> = (0..self.len())
            .flat_map(|i| self.cell(i).flips().into_iter().map(move |(t, b)| (t, i, b)))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        all
    }

    /// The same trajectory run backwards: the state at `t` becomes the state
    /// at `T - t`, kept right-continuous.
    pub fn reversed(&self) -> Vec<CellHistory> {
        let t_max = self.horizon;
        (0..self.len())
            .map(|i| {
                let h = self.cell(i);
                // at reversed time T - t the state takes the value held just before t
                let events = (0..h.events.len())
                    .rev()
                    .filter(|&k| h.events[k].0 < t_max)
                    .map(|k| (t_max - h.events[k].0, if k == 0 { h.initial } else { h.events[k - 1].1 }))
                    .collect();
                let initial = h.events.last().map_or(h.initial, |e| e.1);
                CellHistory { initial, events }
            })
            .collect()
    }

    /// `cell time outcome` lines, sorted by time.
    pub fn export(&self) -> String {
        let mut rows: Vec<(f64, usize, bool)> = (0..self.len())
            .flat_map(|i| self.cell(i).events.iter().map(move |&(t, b)| (t, i, b)))
            .collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut s = String::new();
        for (i, h) in self.cells.iter().enumerate() {
            let _ = writeln!(s, "{i} 0 {}", u8::from(h.get().unwrap().initial));
        }
        for (t, i, b) in rows {
            let _ = writeln!(s, "{i} {t:.17e} {}", u8::from(b));
        }
        s
    }
}

/// Disjoint sorted intervals `[a, b)` inside `[0, T]` where an event holds.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSet {
    pub horizon: f64,
    pub intervals: Vec<(f64, f64)>,
}

impl TimeSet {
    pub fn empty(horizon: f64) -> TimeSet {
        TimeSet { horizon, intervals: Vec::new() }
    }

    /// Builds a time set from a right-continuous indicator given by its
    /// value at 0 and its change points.
    pub fn from_switches(horizon: f64, start: bool, switches: &[(f64, bool)]) -> TimeSet {
        let mut intervals = Vec::new();
        let mut open = if start { Some(0.0) } else { None };
        for &(t, v) in switches {
            match (open, v) {
                (None, true) => open = Some(t),
                (Some(a), false) => {
                    if t > a {
                        intervals.push((a, t));
                    }
                    open = None;
                }
                _ => {}
            }
        }
        if let Some(a) = open {
            if horizon > a {
                intervals.push((a, horizon));
            }
        }
        TimeSet { horizon, intervals }
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    /// Interval endpoints strictly inside `(0, T)`.
    pub fn boundary_count(&self) -> usize {
        self.intervals
            .iter()
            .map(|&(a, b)| usize::from(a > 0.0) + usize::from(b < self.horizon))
            .sum()
    }

    pub fn contains(&self, t: f64) -> bool {
        let k = self.intervals.partition_point(|&(a, _)| a <= t);
        k > 0 && t < self.intervals[k - 1].1
    }

    pub fn reversed(&self) -> TimeSet {
        let h = self.horizon;
        TimeSet { horizon: h, intervals: self.intervals.iter().rev().map(|&(a, b)| (h - b, h - a)).collect() }
    }
}

fn check_event(domain: &Domain, event: &EventSpec) -> Result<()> {
    if domain.kind() != event.domain || domain.lattice() != event.lattice {
        return Err(Error::DomainMismatch(format!(
            "event on {:?}, domain {:?}",
            event.domain,
            domain.kind()
        )));
    }
    if let EventKind::CellOpen(i) = event.kind {
        if i >= domain.len() {
            return Err(Error::InvalidParameter(format!("cell {i} out of range")));
        }
    }
    Ok(())
}

/// The event is re-decided after every flip that could change it.
pub fn time_set_of(traj: &Trajectory<'_>, event: &EventSpec) -> Result<TimeSet> {
    let hs: Vec<CellHistory> = (0..traj.len()).map(|i| traj.cell(i).clone()).collect();
    time_set_from(traj.domain, traj.horizon, &hs, event)
}

/// Time set of explicit cell histories, one per domain cell.
pub fn time_set_from(domain: &Domain, horizon: f64, hs: &[CellHistory], event: &EventSpec) -> Result<TimeSet> {
    check_event(domain, event)?;
    if hs.len() != domain.len() {
        return Err(Error::InvalidParameter(format!("{} histories for {} cells", hs.len(), domain.len())));
    }
    let mut bits: Vec<bool> = hs.iter().map(|h| h.initial).collect();
    let start = decide_bits(domain, &bits, &event.kind);
    let mut flips: Vec<(f64, usize, bool)> = hs
        .iter()
        .enumerate()
        .flat_map(|(i, h)| h.flips().into_iter().map(move |(t, b)| (t, i, b)))
        .collect();
    flips.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut cur = start;
    let mut switches = Vec::new();
    let (inc, dec) = (event.is_increasing(), event.is_decreasing());
    for (t, i, b) in flips {
        bits[i] = b;
        // a monotone event cannot leave its state when the flip agrees with it
        if (inc && b == cur) || (dec && b != cur) {
            continue;
        }
        let v = decide_bits(domain, &bits, &event.kind);
        if v != cur {
            switches.push((t, v));
            cur = v;
        }
    }
    Ok(TimeSet::from_switches(horizon, start, &switches))
}

pub fn crossing_time_set(domain: &Domain, event: &EventSpec, horizon: f64, seed: u64, trial: u64) -> Result<TimeSet> {
    let traj = generate_trajectory(domain, horizon, seed, trial)?;
    time_set_of(&traj, event)
}

/// Monte Carlo estimate of `E[f(ω_0) f(ω_t)]` for the indicator `f` of the event.
#[derive(Clone, Debug)]
pub struct Correlation {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    /// Spectral value when the domain is small enough to enumerate.
    pub exact: Option<f64>,
}

pub fn time_correlation(
    domain: &Domain,
    event: &EventSpec,
    lag: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<Correlation> {
    check_event(domain, event)?;
    if !(lag >= 0.0 && lag.is_finite()) {
        return Err(Error::InvalidParameter(format!("lag {lag} must be nonnegative")));
    }
    let horizon = lag.max(f64::MIN_POSITIVE);
    let parts = exec::run_sharded(trials, workers, |r| {
        let mut s = Summary::default();
        for trial in r {
            let traj = generate_trajectory(domain, horizon, seed, trial)?;
            let a = decide_bits(domain, &traj.state_at(0.0), &event.kind);
            let b = decide_bits(domain, &traj.state_at(lag), &event.kind);
            s.push(f64::from(u8::from(a && b)));
        }
        Ok(s)
    })?;
    let mut s = Summary::default();
    parts.iter().for_each(|p| s.merge(p));
    let exact = if domain.len() <= 12 { Some(exact_time_correlation(domain, event, lag)?) } else { None };
    Ok(Correlation { mean: s.mean(), stderr: s.stderr(), trials, exact })
}

/// `Σ_S f̂(S)² e^{-t|S|}` with bit `i` of the table index the state of cell `i`.
pub fn spectral_correlation(f: &TruthTable, lag: f64) -> Result<f64> {
    let spec = walsh_transform(f)?;
    Ok(spec
        .coeffs
        .iter()
        .enumerate()
        .map(|(s, &c)| c * c * (-lag * (s as u32).count_ones() as f64).exp())
        .sum())
}

pub fn event_table(domain: &Domain, event: &EventSpec) -> Result<TruthTable> {
    check_event(domain, event)?;
    let n = domain.len();
    if n > crate::fourier::MAX_BITS as usize {
        return Err(Error::TooLarge(format!("{n} cells")));
    }
    let mut bits = vec![false; n];
    TruthTable::boolean(n as u32, |x| {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = x >> i & 1 == 1;
        }
        decide_bits(domain, &bits, &event.kind)
    })
}

pub fn exact_time_correlation(domain: &Domain, event: &EventSpec, lag: f64) -> Result<f64> {
    spectral_correlation(&event_table(domain, event)?, lag)
}

/// Per-trial statistics of the time set.
#[derive(Clone, Debug, Default)]
pub struct TimeSetStats {
    pub boundary: Summary,
    pub measure: Summary,
}

impl TimeSetStats {
    /// Influence estimate `2 E[N] / T`.
    pub fn influence(&self, horizon: f64) -> (f64, f64) {
        (2.0 * self.boundary.mean() / horizon, 2.0 * self.boundary.stderr() / horizon)
    }

    /// `E[X]² / E[X²]`.
    pub fn second_moment_ratio(&self) -> f64 {
        let m = self.measure.mean();
        let m2 = self.measure.sum_sq / self.measure.n.max(1) as f64;
        if m2 == 0.0 {
            0.0
        } else {
            m * m / m2
        }
    }
}

pub fn time_set_stats(
    domain: &Domain,
    event: &EventSpec,
    horizon: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<TimeSetStats> {
    check_event(domain, event)?;
    let parts = exec::run_sharded(trials, workers, |r| {
        let mut st = TimeSetStats::default();
        for trial in r {
            let ts = crossing_time_set(domain, event, horizon, seed, trial)?;
            st.boundary.push(ts.boundary_count() as f64);
            st.measure.push(ts.measure());
        }
        Ok(st)
    })?;
    let mut st = TimeSetStats::default();
    for p in &parts {
        st.boundary.merge(&p.boundary);
        st.measure.merge(&p.measure);
    }
    Ok(st)
}

/// Mean boundary count and the influence estimate `2 N̂ / T`.
pub fn flip_boundary_count(
    domain: &Domain,
    event: &EventSpec,
    horizon: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<(f64, f64)> {
    let st = time_set_stats(domain, event, horizon, trials, seed, workers)?;
    Ok((st.boundary.mean(), st.influence(horizon).0))
}

/// `ε = T 2^{-j}` for `j = 1..=16`.
pub fn epsilon_grid(horizon: f64) -> Vec<f64> {
    (1..=16).map(|j| horizon * 0.5f64.powi(j)).collect()
}

/// Fewest closed intervals of length `eps` covering the set, by the greedy
/// left-to-right sweep.
pub fn covering_number(ts: &TimeSet, eps: f64) -> Result<u64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps {eps} must be positive")));
    }
    let mut count = 0u64;
    let mut reach = f64::NEG_INFINITY;
    for &(a, b) in &ts.intervals {
        if a > reach {
            count += 1;
            reach = a + eps;
        }
        if b > reach {
            let more = ((b - reach) / eps).ceil();
            count += more as u64;
            reach += more * eps;
        }
    }
    Ok(count)
}

pub fn covering_numbers(ts: &TimeSet, grid: &[f64]) -> Result<Vec<u64>> {
    grid.iter().map(|&e| covering_number(ts, e)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DimensionBound {
    Value(f64),
    /// Bounded influence: the exceptional set is empty.
    EmptySet,
    /// The formula divides by zero.
    Undefined,
}

/// `(1 - ln P / ln I)^{-1}` for `I > 1`.
pub fn dimension_bound(p: f64, influence: f64) -> Result<DimensionBound> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("probability {p} not in (0, 1]")));
    }
    if !(influence > 0.0 && influence.is_finite()) {
        return Err(Error::InvalidParameter(format!("influence {influence} must be positive")));
    }
    if p == influence || influence == 1.0 {
        return Ok(DimensionBound::Undefined);
    }
    if influence < 1.0 {
        return Ok(DimensionBound::EmptySet);
    }
    Ok(DimensionBound::Value(1.0 / (1.0 - p.ln() / influence.ln())))
}

/// `∬ |t-s|^{-γ}` over the set squared, optionally for the measure divided
/// by `alpha`.
pub fn riesz_energy(ts: &TimeSet, gamma: f64, alpha: Option<f64>) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma {gamma} not in (0, 1)")));
    }
    let phi = |x: f64| x.abs().powf(2.0 - gamma) / ((1.0 - gamma) * (2.0 - gamma));
    let mut e = 0.0;
    for &(a, b) in &ts.intervals {
        for &(c, d) in &ts.intervals {
            e += phi(b - c) - phi(a - c) - phi(b - d) + phi(a - d);
        }
    }
    match alpha {
        Some(al) if al > 0.0 => Ok(e / (al * al)),
        Some(al) => Err(Error::InvalidParameter(format!("normalization {al} must be positive"))),
        None => Ok(e),
    }
}
