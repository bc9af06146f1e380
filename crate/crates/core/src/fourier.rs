//! Fourier–Walsh analysis of small functions on `{0,1}^n`, exact revealment
//! of query algorithms with enumerable randomness, and the level-weight
//! bounds in terms of revealment.
//!
//! Inputs are bitmasks: bit `i` of `x` is the input bit `x_{i+1}`.
//! Characters are `χ_S(x) = (-1)^{|S ∩ x|}`, so 1-bits contribute `-1`.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::explore::{box_crossing_choices, box_crossing_from};
use crate::lattice::{Domain, DomainKind, LatticeKind, Site};

pub type Exact = Ratio<i128>;

pub const MAX_BITS: u32 = 24;
/// Bound for exhaustive enumeration over inputs and randomness.
pub const MAX_ENUM_BITS: u32 = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct TruthTable {
    pub n: u32,
    pub values: Vec<f64>,
}

impl TruthTable {
    pub fn new(n: u32, values: Vec<f64>) -> Result<TruthTable> {
        if n > MAX_BITS {
            return Err(Error::TooLarge(format!("n = {n} exceeds {MAX_BITS}")));
        }
        if values.len() != 1usize << n {
            return Err(Error::InvalidParameter(format!(
                "truth table for n = {n} needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        Ok(TruthTable { n, values })
    }

    pub fn from_fn(n: u32, f: impl FnMut(u32) -> f64) -> Result<TruthTable> {
        if n > MAX_BITS {
            return Err(Error::TooLarge(format!("n = {n} exceeds {MAX_BITS}")));
        }
        TruthTable::new(n, (0..1u32 << n).map(f).collect())
    }

    pub fn boolean(n: u32, mut f: impl FnMut(u32) -> bool) -> Result<TruthTable> {
        TruthTable::from_fn(n, |x| f(x) as u8 as f64)
    }

    /// Integer values, if every value is an integer of moderate size.
    pub fn integer_values(&self) -> Option<Vec<i64>> {
        self.values
            .iter()
            .map(|&v| (v.fract() == 0.0 && v.abs() <= (1u64 << 30) as f64).then_some(v as i64))
            .collect()
    }

    /// `‖f‖² = 2^-n Σ f(x)²`.
    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64
    }

    fn norm2_exact(&self) -> Result<Exact> {
        let iv = self.exact_values()?;
        let s: i128 = iv.iter().map(|&v| v as i128 * v as i128).sum();
        Ok(Exact::new(s, 1i128 << self.n))
    }

    fn exact_values(&self) -> Result<Vec<i64>> {
        self.integer_values()
            .ok_or_else(|| Error::NotExact("exact checks need integer-valued functions".into()))
    }
}

/// Parse `n` on the first line followed by `2^n` values in lexicographic
/// input order (`x_1` most significant).
pub fn parse_truth_table(text: &str) -> Result<TruthTable> {
    let mut tokens = text.split_whitespace();
    let n: u32 = tokens
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty truth table".into()))?
        .parse()
        .map_err(|e| Error::InvalidParameter(format!("bad bit count: {e}")))?;
    if n > MAX_BITS {
        return Err(Error::TooLarge(format!("n = {n} exceeds {MAX_BITS}")));
    }
    let lex: Vec<f64> = tokens
        .map(|t| t.parse::<f64>().map_err(|e| Error::InvalidParameter(format!("bad value {t:?}: {e}"))))
        .collect::<Result<_>>()?;
    if lex.len() != 1usize << n {
        return Err(Error::InvalidParameter(format!("expected {} values, got {}", 1usize << n, lex.len())));
    }
    let mut values = vec![0.0; lex.len()];
    for (j, v) in lex.into_iter().enumerate() {
        values[reverse_bits(j as u32, n) as usize] = v;
    }
    TruthTable::new(n, values)
}

fn reverse_bits(x: u32, n: u32) -> u32 {
    if n == 0 {
        0
    } else {
        x.reverse_bits() >> (32 - n)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVector {
    pub n: u32,
    pub coeffs: Vec<f64>,
    /// Numerators over `2^n`, present for integer-valued inputs.
    pub exact: Option<Vec<i64>>,
}

impl SpectralVector {
    pub fn coeff(&self, s: u32) -> f64 {
        self.coeffs[s as usize]
    }

    pub fn coeff_exact(&self, s: u32) -> Option<Exact> {
        self.exact.as_ref().map(|e| Exact::new(e[s as usize] as i128, 1i128 << self.n))
    }
}

fn butterfly<T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T>>(a: &mut [T]) {
    let mut h = 1;
    while h < a.len() {
        for i in (0..a.len()).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (a[j], a[j + h]);
                a[j] = x + y;
                a[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// `f̂(S) = 2^-n Σ_x f(x) χ_S(x)` by the fast butterfly.
pub fn walsh_transform(f: &TruthTable) -> Result<SpectralVector> {
    if f.n > MAX_BITS {
        return Err(Error::TooLarge(format!("n = {} exceeds {MAX_BITS}", f.n)));
    }
    let exact = f.integer_values().map(|mut v| {
        butterfly(&mut v);
        v
    });
    let scale = 1.0 / f.values.len() as f64;
    let coeffs = match &exact {
        Some(e) => e.iter().map(|&c| c as f64 * scale).collect(),
        None => {
            let mut v = f.values.clone();
            butterfly(&mut v);
            v.iter_mut().for_each(|c| *c *= scale);
            v
        }
    };
    Ok(SpectralVector { n: f.n, coeffs, exact })
}

/// `f = Σ_S f̂(S) χ_S`.
pub fn inverse_walsh(spec: &SpectralVector) -> TruthTable {
    let mut v = spec.coeffs.clone();
    butterfly(&mut v);
    TruthTable { n: spec.n, values: v }
}

fn check_level(n: u32, k: u32) -> Result<()> {
    if k > n {
        Err(Error::InvalidParameter(format!("level {k} out of range 0..={n}")))
    } else {
        Ok(())
    }
}

pub fn level_weight(spec: &SpectralVector, k: u32) -> Result<f64> {
    check_level(spec.n, k)?;
    Ok(spec
        .coeffs
        .iter()
        .enumerate()
        .filter(|(s, _)| s.count_ones() == k)
        .map(|(_, c)| c * c)
        .sum())
}

pub fn level_weight_exact(spec: &SpectralVector, k: u32) -> Result<Exact> {
    check_level(spec.n, k)?;
    let e = spec
        .exact
        .as_ref()
        .ok_or_else(|| Error::NotExact("spectrum has no exact coefficients".into()))?;
    let s: i128 = e
        .iter()
        .enumerate()
        .filter(|(s, _)| s.count_ones() == k)
        .map(|(_, &c)| c as i128 * c as i128)
        .sum();
    Ok(Exact::new(s, 1i128 << (2 * spec.n)))
}

/// `N(f, ε) = Σ_{S ≠ ∅} f̂(S)² (1 - 2ε)^{2|S|}`.
pub fn noise_stability(spec: &SpectralVector, eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("ε = {eps} outside [0, 1]")));
    }
    let rho2 = (1.0 - 2.0 * eps).powi(2);
    let mut by_level = vec![0.0; spec.n as usize + 1];
    for (s, c) in spec.coeffs.iter().enumerate() {
        by_level[s.count_ones() as usize] += c * c;
    }
    Ok(by_level.iter().enumerate().skip(1).map(|(k, w)| w * rho2.powi(k as i32)).sum())
}

/// Monte Carlo estimate of `N(f, ε)` from pairs of independent
/// ε-perturbations of one uniform input: mean of `f(Y1) f(Y2) - f̂(∅)²`.
/// Returns the estimate and its standard error.
pub fn noise_stability_mc(f: &TruthTable, eps: f64, samples: u64, seed: u64) -> Result<(f64, f64)> {
    use rand::Rng;
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("ε = {eps} outside [0, 1]")));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least 2 samples".into()));
    }
    let mean = f.values.iter().sum::<f64>() / f.values.len() as f64;
    let mut rng = crate::rng::stream_rng(seed, 0, 0, crate::rng::STREAM_NOISE_A);
    let (mut s, mut s2) = (0.0, 0.0);
    let flip = |x: u32, rng: &mut rand_chacha::ChaCha8Rng| {
        (0..f.n).fold(x, |y, i| if rng.gen_bool(eps) { y ^ (1 << i) } else { y })
    };
    for _ in 0..samples {
        let x: u32 = rng.gen_range(0..1u32 << f.n);
        let (y1, y2) = (flip(x, &mut rng), flip(x, &mut rng));
        let z = f.values[y1 as usize] * f.values[y2 as usize] - mean * mean;
        s += z;
        s2 += z * z;
    }
    let m = s / samples as f64;
    let var = (s2 / samples as f64 - m * m).max(0.0);
    Ok((m, (var / (samples - 1) as f64).sqrt()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfluenceVector {
    pub exact: Vec<Exact>,
    pub per_index: Vec<f64>,
    pub total: f64,
}

/// `I_i = P[f(x) ≠ f(x ⊕ e_i)]`.
pub fn influences(f: &TruthTable) -> Result<InfluenceVector> {
    if f.n > MAX_BITS {
        return Err(Error::TooLarge(format!("n = {} exceeds {MAX_BITS}", f.n)));
    }
    let size = f.values.len();
    let exact: Vec<Exact> = (0..f.n)
        .map(|i| {
            let c = (0..size).filter(|&x| f.values[x] != f.values[x ^ (1 << i)]).count();
            Exact::new(c as i128, size as i128)
        })
        .collect();
    let per_index: Vec<f64> = exact.iter().map(to_f64).collect();
    let total = per_index.iter().sum();
    Ok(InfluenceVector { exact, per_index, total })
}

pub fn to_f64(r: &Exact) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

// ---------------------------------------------------------------------------
// Query algorithms

/// A randomized algorithm that reads input bits one at a time. Its
/// randomness is an index in `0..randomness()`, each equally likely.
pub trait QueryAlgorithm: Sync {
    fn bits(&self) -> u32;
    fn randomness(&self) -> usize;
    /// Run on one input; `query(i)` returns bit `i`.
    fn run(&self, rand: usize, query: &mut dyn FnMut(u32) -> bool) -> Result<()>;
}

/// A rule assigning a set of bits to each (randomness, input) pair. Every
/// query algorithm gives one (the examined set); arbitrary witness rules
/// need not come from an algorithm.
pub trait WitnessRule: Sync {
    fn bits(&self) -> u32;
    fn randomness(&self) -> usize;
    fn witness(&self, rand: usize, x: u32) -> Result<u32>;
}

/// The set examined by a query algorithm, as a witness rule.
pub struct Examined<'a>(pub &'a dyn QueryAlgorithm);

impl WitnessRule for Examined<'_> {
    fn bits(&self) -> u32 {
        self.0.bits()
    }

    fn randomness(&self) -> usize {
        self.0.randomness()
    }

    fn witness(&self, rand: usize, x: u32) -> Result<u32> {
        let mut j = 0u32;
        let mut order = Vec::new();
        self.0.run(rand, &mut |i| {
            if j >> i & 1 == 1 {
                order.push(i);
            }
            j |= 1 << i;
            x >> i & 1 == 1
        })?;
        if let Some(i) = order.first() {
            return Err(Error::Oracle(format!("bit {i} queried twice")));
        }
        Ok(j)
    }
}

fn enum_check(n: u32, rand: usize) -> Result<()> {
    if n > MAX_ENUM_BITS || (rand as u128) << n > 1 << 28 {
        return Err(Error::TooLarge(format!(
            "enumeration over 2^{n} inputs and {rand} random strings is too large"
        )));
    }
    if rand == 0 {
        return Err(Error::InvalidParameter("randomness space is empty".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Revealment {
    pub per_bit: Vec<Exact>,
    pub delta: Exact,
}

fn revealment_of(rule: &dyn WitnessRule) -> Result<(Revealment, Vec<u32>)> {
    let (n, rn) = (rule.bits(), rule.randomness());
    enum_check(n, rn)?;
    let mut counts = vec![0i128; n as usize];
    let mut sets = Vec::with_capacity(rn << n);
    for rand in 0..rn {
        for x in 0..1u32 << n {
            let j = rule.witness(rand, x)?;
            for (i, c) in counts.iter_mut().enumerate() {
                *c += (j >> i & 1) as i128;
            }
            sets.push(j);
        }
    }
    let total = (rn as i128) << n;
    let per_bit: Vec<Exact> = counts.iter().map(|&c| Exact::new(c, total)).collect();
    let delta = per_bit.iter().copied().max().unwrap_or_else(|| Exact::from_integer(0));
    Ok((Revealment { per_bit, delta }, sets))
}

/// Exact `P[i ∈ J]` by enumerating every input and random string.
pub fn exact_revealment(alg: &dyn QueryAlgorithm) -> Result<Revealment> {
    Ok(revealment_of(&Examined(alg))?.0)
}

pub fn witness_revealment(rule: &dyn WitnessRule) -> Result<Revealment> {
    Ok(revealment_of(rule)?.0)
}

/// `E[var_Ω(f_J)]`: the mean, over inputs and randomness, of the variance of
/// `f` on the subcube agreeing with the input on `J`.
fn expected_residual_variance(f: &[i64], n: u32, sets: &[u32]) -> Exact {
    let full = (1u32 << n) - 1;
    let mut acc = Exact::from_integer(0);
    for (k, &j) in sets.iter().enumerate() {
        let x = (k as u32) & full;
        let free = full & !j;
        let (mut s, mut s2, mut m) = (0i128, 0i128, 0i128);
        // enumerate submasks of the free bits
        let mut y = free;
        loop {
            let v = f[((x & j) | y) as usize] as i128;
            s += v;
            s2 += v * v;
            m += 1;
            if y == 0 {
                break;
            }
            y = (y - 1) & free;
        }
        acc += Exact::new(m * s2 - s * s, m * m);
    }
    acc / Exact::from_integer(sets.len() as i128)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelCheck {
    pub k: u32,
    pub weight: Exact,
    pub bound: Exact,
    pub slack: Exact,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseReport {
    pub delta: Exact,
    pub norm2: Exact,
    /// `E[var_Ω(f_J)]`; zero for algorithms that determine `f`.
    pub residual: Exact,
    pub levels: Vec<LevelCheck>,
}

impl NoiseReport {
    pub fn all_hold(&self) -> bool {
        self.levels.iter().all(|l| l.holds)
    }
}

fn level_report(
    f: &TruthTable,
    delta: Exact,
    residual: Exact,
    bound: impl Fn(u32, Exact, Exact, Exact) -> Exact,
) -> Result<NoiseReport> {
    let spec = walsh_transform(f)?;
    let norm2 = f.norm2_exact()?;
    let levels = (1..=f.n)
        .map(|k| {
            let weight = level_weight_exact(&spec, k)?;
            let b = bound(k, delta, norm2, residual);
            Ok(LevelCheck { k, weight, bound: b, slack: b - weight, holds: weight <= b })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NoiseReport { delta, norm2, residual, levels })
}

/// `Σ_{|S|=k} f̂(S)² ≤ δ k ‖f‖²` for a witness rule that determines `f`.
pub fn check_witness_bound(f: &TruthTable, rule: &dyn WitnessRule) -> Result<NoiseReport> {
    if rule.bits() != f.n {
        return Err(Error::InvalidParameter("rule and function have different bit counts".into()));
    }
    let vals = f.exact_values()?;
    let (rev, sets) = revealment_of(rule)?;
    let residual = expected_residual_variance(&vals, f.n, &sets);
    if residual != Exact::from_integer(0) {
        return Err(Error::NotExact("the examined bits do not always determine f".into()));
    }
    level_report(f, rev.delta, residual, |k, d, n2, _| d * Exact::from_integer(k as i128) * n2)
}

/// The level-weight bound for an algorithm that determines `f`.
pub fn check_theorem_noise(f: &TruthTable, alg: &dyn QueryAlgorithm) -> Result<NoiseReport> {
    check_witness_bound(f, &Examined(alg))
}

/// `Σ_{|S|=k} f̂(S)² ≤ 2kδ‖f‖² + 2 E[var_Ω(f_J)]` for any algorithm.
pub fn check_generalized(f: &TruthTable, alg: &dyn QueryAlgorithm) -> Result<NoiseReport> {
    if alg.bits() != f.n {
        return Err(Error::InvalidParameter("algorithm and function have different bit counts".into()));
    }
    let vals = f.exact_values()?;
    let (rev, sets) = revealment_of(&Examined(alg))?;
    let residual = expected_residual_variance(&vals, f.n, &sets);
    let two = Exact::from_integer(2);
    level_report(f, rev.delta, residual, |k, d, n2, e| two * Exact::from_integer(k as i128) * d * n2 + two * e)
}

// ---------------------------------------------------------------------------
// Corpus

fn factorial(n: u32) -> usize {
    (1..=n as usize).product()
}

/// The permutation of `0..n` with Lehmer index `k`.
pub fn permutation(n: u32, mut k: usize) -> Vec<u32> {
    let mut pool: Vec<u32> = (0..n).collect();
    let mut out = Vec::with_capacity(n as usize);
    for i in (0..n).rev() {
        let f = factorial(i);
        out.push(pool.remove(k / f));
        k %= f;
    }
    out
}

/// AND of `n` bits; reads bits in a uniformly random order and stops at the
/// first zero, or after `limit` reads.
pub struct RandomOrderAnd {
    pub n: u32,
    pub limit: Option<u32>,
}

impl QueryAlgorithm for RandomOrderAnd {
    fn bits(&self) -> u32 {
        self.n
    }

    fn randomness(&self) -> usize {
        factorial(self.n)
    }

    fn run(&self, rand: usize, query: &mut dyn FnMut(u32) -> bool) -> Result<()> {
        for (t, i) in permutation(self.n, rand).into_iter().enumerate() {
            if self.limit.is_some_and(|l| t as u32 >= l) || !query(i) {
                break;
            }
        }
        Ok(())
    }
}

/// Reads every bit in order.
pub struct ReadAll(pub u32);

impl QueryAlgorithm for ReadAll {
    fn bits(&self) -> u32 {
        self.0
    }

    fn randomness(&self) -> usize {
        1
    }

    fn run(&self, _: usize, query: &mut dyn FnMut(u32) -> bool) -> Result<()> {
        (0..self.0).for_each(|i| {
            query(i);
        });
        Ok(())
    }
}

/// Reads a fixed list of bits and nothing else.
pub struct ReadFixed {
    pub n: u32,
    pub read: Vec<u32>,
}

impl QueryAlgorithm for ReadFixed {
    fn bits(&self) -> u32 {
        self.n
    }

    fn randomness(&self) -> usize {
        1
    }

    fn run(&self, _: usize, query: &mut dyn FnMut(u32) -> bool) -> Result<()> {
        self.read.iter().for_each(|&i| {
            query(i);
        });
        Ok(())
    }
}

/// Majority of three: read two bits chosen by the randomness (3 choices of
/// the skipped one), then the third only if they disagree.
pub struct Majority3;

impl QueryAlgorithm for Majority3 {
    fn bits(&self) -> u32 {
        3
    }

    fn randomness(&self) -> usize {
        3
    }

    fn run(&self, rand: usize, query: &mut dyn FnMut(u32) -> bool) -> Result<()> {
        let last = rand as u32;
        let (a, b) = ((last + 1) % 3, (last + 2) % 3);
        if query(a) != query(b) {
            query(last);
        }
        Ok(())
    }
}

/// OR of ANDs over consecutive groups of `width` bits, read group by group
/// with early stopping inside and across groups.
pub struct Tribes {
    pub groups: u32,
    pub width: u32,
}

impl Tribes {
    pub fn table(&self) -> Result<TruthTable> {
        let w = self.width;
        let mask = (1u32 << w) - 1;
        TruthTable::boolean(self.groups * w, |x| (0..self.groups).any(|g| x >> (g * w) & mask == mask))
    }
}

impl QueryAlgorithm for Tribes {
    fn bits(&self) -> u32 {
        self.groups * self.width
    }

    fn randomness(&self) -> usize {
        1
    }

    fn run(&self, _: usize, query: &mut dyn FnMut(u32) -> bool) -> Result<()> {
        for g in 0..self.groups {
            if (0..self.width).all(|i| query(g * self.width + i)) {
                break;
            }
        }
        Ok(())
    }
}

/// The box-crossing algorithm on a rhombus, bits indexed by the domain.
pub struct RhombusCrossing {
    domain: Domain,
    choices: usize,
}

impl RhombusCrossing {
    pub fn new(width: u32) -> Result<RhombusCrossing> {
        let domain = Domain::new(DomainKind::Rhombus { width }, LatticeKind::TriangularSite)?;
        if domain.len() as u32 > MAX_ENUM_BITS {
            return Err(Error::TooLarge(format!("rhombus of width {width} has too many cells")));
        }
        let choices = box_crossing_choices(&domain)?;
        Ok(RhombusCrossing { domain, choices })
    }

    pub fn table(&self) -> Result<TruthTable> {
        let n = self.domain.len() as u32;
        TruthTable::boolean(n, |x| {
            let bits: Vec<bool> = (0..n).map(|i| x >> i & 1 == 1).collect();
            crate::sampler::decide_bits(&self.domain, &bits, &crate::sampler::EventKind::BoxLeftRight)
        })
    }
}

impl QueryAlgorithm for RhombusCrossing {
    fn bits(&self) -> u32 {
        self.domain.len() as u32
    }

    fn randomness(&self) -> usize {
        self.choices
    }

    fn run(&self, rand: usize, query: &mut dyn FnMut(u32) -> bool) -> Result<()> {
        let cell = std::cell::RefCell::new(query);
        let src = |s: Site| {
            let i = self.domain.index_of(s).expect("site in domain") as u32;
            (cell.borrow_mut())(i)
        };
        box_crossing_from(&self.domain, rand, &src)?;
        Ok(())
    }
}

/// Recursive ternary majority of height `h`, valued in `{-1, 1}` (1-bits
/// give `+1` leaves).
pub fn recursive_majority(h: u32) -> Result<TruthTable> {
    let n = 3u32.pow(h);
    TruthTable::from_fn(n, |x| if rtm_value(x, 0, h) { 1.0 } else { -1.0 })
}

fn rtm_value(x: u32, offset: u32, h: u32) -> bool {
    if h == 0 {
        return x >> offset & 1 == 1;
    }
    let w = 3u32.pow(h - 1);
    (0..3).filter(|&c| rtm_value(x, offset + c * w, h - 1)).count() >= 2
}

/// The natural witness for recursive majority: at each node keep two
/// children agreeing with it, choosing uniformly among the three pairs when
/// all children agree.
pub struct MajorityWitness {
    pub h: u32,
}

impl MajorityWitness {
    fn nodes(h: u32) -> u32 {
        (0..h).map(|k| 3u32.pow(k)).sum()
    }

    fn collect(&self, x: u32, offset: u32, h: u32, rand: &mut usize, out: &mut u32) {
        if h == 0 {
            *out |= 1 << offset;
            return;
        }
        let w = 3u32.pow(h - 1);
        let vals: Vec<bool> = (0..3).map(|c| rtm_value(x, offset + c * w, h - 1)).collect();
        let choice = *rand % 3;
        *rand /= 3;
        let skip = if vals[0] == vals[1] && vals[1] == vals[2] {
            choice
        } else {
            (0..3).find(|&c| vals.iter().filter(|&&v| v == vals[c]).count() == 1).unwrap()
        };
        for c in 0..3 {
            if c != skip {
                self.collect(x, offset + c as u32 * w, h - 1, rand, out);
            }
        }
    }
}

impl WitnessRule for MajorityWitness {
    fn bits(&self) -> u32 {
        3u32.pow(self.h)
    }

    fn randomness(&self) -> usize {
        3usize.pow(MajorityWitness::nodes(self.h))
    }

    fn witness(&self, rand: usize, x: u32) -> Result<u32> {
        let (mut r, mut out) = (rand, 0u32);
        self.collect(x, 0, self.h, &mut r, &mut out);
        Ok(out)
    }
}

pub struct CorpusEntry {
    pub name: &'static str,
    pub f: TruthTable,
    pub alg: Box<dyn QueryAlgorithm>,
}

/// Small functions paired with algorithms that determine them.
pub fn builtin_corpus() -> Result<Vec<CorpusEntry>> {
    let and = |n: u32| TruthTable::boolean(n, |x| x == (1 << n) - 1);
    let tribes = Tribes { groups: 2, width: 2 };
    let rh = RhombusCrossing::new(3)?;
    let mut out = Vec::new();
    for n in [2, 3, 4, 5] {
        let name = ["and2", "and3", "and4", "and5"][n as usize - 2];
        out.push(CorpusEntry { name, f: and(n)?, alg: Box::new(RandomOrderAnd { n, limit: None }) });
    }
    out.push(CorpusEntry {
        name: "dictator3",
        f: TruthTable::boolean(3, |x| x & 1 == 1)?,
        alg: Box::new(ReadFixed { n: 3, read: vec![0] }),
    });
    out.push(CorpusEntry { name: "majority3", f: TruthTable::boolean(3, |x| x.count_ones() >= 2)?, alg: Box::new(Majority3) });
    out.push(CorpusEntry { name: "tribes4", f: tribes.table()?, alg: Box::new(tribes) });
    out.push(CorpusEntry { name: "parity3", f: TruthTable::boolean(3, |x| x.count_ones() % 2 == 1)?, alg: Box::new(ReadAll(3)) });
    out.push(CorpusEntry { name: "rhombus3", f: rh.table()?, alg: Box::new(rh) });
    Ok(out)
}
