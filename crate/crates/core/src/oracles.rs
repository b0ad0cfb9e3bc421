//! Ground-truth engines: exact type enumeration, Monte Carlo estimates of the
//! empirical-entropy CDF, and a random-binning Slepian-Wolf simulator.
//!
//! All randomness is drawn from a ChaCha stream keyed by `(seed, trial)`, so
//! results do not depend on how trials are spread over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::sw_stats::JointPmf2;
use crate::{invalid, Error, Result};

/// Largest number of types any exact enumeration will visit.
pub const MAX_TYPES: u64 = 10_000_000;

/// Ceiling on the joint-type count used by the simulator's pair-collision term.
pub const MAX_SIM_TYPES: u64 = 50_000_000;

const TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// Work-splitting hint; never changes results.
    pub shards: usize,
}

impl SimConfig {
    pub fn new(n: usize, trials: u64, seed: u64) -> Result<Self> {
        let c = SimConfig { n, trials, seed, shards: 1 };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.trials == 0 || self.shards == 0 {
            return invalid("n, trials and shards must all be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimReport {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
    /// False when the decoder used the type-class collision model instead of
    /// scanning both bins.
    pub exhaustive: bool,
}

impl SimReport {
    fn from_count(hits: u64, trials: u64, seed: u64, exhaustive: bool) -> Self {
        let estimate = hits as f64 / trials as f64;
        let stderr = (estimate * (1.0 - estimate) / trials as f64).sqrt();
        SimReport { estimate, stderr, trials, seed, exhaustive }
    }
}

fn binom(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of types of length `n` over an alphabet of size `k`.
pub fn type_count(n: usize, k: usize) -> f64 {
    binom((n + k - 1) as u64, (k - 1) as u64)
}

/// Calls `f` on every composition of `n` into `k` nonnegative parts.
fn for_each_composition<F: FnMut(&[usize])>(n: usize, k: usize, f: &mut F) {
    fn rec<F: FnMut(&[usize])>(rem: usize, i: usize, buf: &mut Vec<usize>, f: &mut F) {
        if i + 1 == buf.len() {
            buf[i] = rem;
            f(buf);
            return;
        }
        for c in 0..=rem {
            buf[i] = c;
            rec(rem - c, i + 1, buf, f);
        }
    }
    let mut buf = vec![0; k];
    rec(n, 0, &mut buf, f);
}

/// `ln k!` for `k = 0..=n`.
fn ln_fact(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    for k in 1..=n {
        v[k] = v[k - 1] + (k as f64).ln();
    }
    v
}

/// Entropy in bits of a count vector with total `n`.
fn ent_counts<'a>(counts: impl IntoIterator<Item = &'a usize>, n: usize) -> f64 {
    let nf = n as f64;
    let s: f64 = counts.into_iter().filter(|&&c| c > 0).map(|&c| c as f64 * (c as f64).log2()).sum();
    nf.log2() - s / nf
}

/// Empirical entropy triple `(Ĥ(X1|X2), Ĥ(X2|X1), Ĥ(X1,X2))` of a joint type
/// given as row-major counts.
fn type_entropies(counts: &[usize], rows: usize, cols: usize, n: usize) -> [f64; 3] {
    let h12 = ent_counts(counts, n);
    let m1: Vec<usize> = (0..rows).map(|a| (0..cols).map(|b| counts[a * cols + b]).sum()).collect();
    let m2: Vec<usize> = (0..cols).map(|b| (0..rows).map(|a| counts[a * cols + b]).sum()).collect();
    let h1 = ent_counts(&m1, n);
    let h2 = ent_counts(&m2, n);
    [h12 - h2, h12 - h1, h12]
}

fn below(h: &[f64; 3], z: &[f64; 3]) -> bool {
    (0..3).all(|t| h[t] <= z[t] + TIE)
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Exact `P(Ĥ(X1ⁿ, X2ⁿ) ≤ z)` componentwise, by enumerating joint types.
pub fn exact_entropy_cdf(pmf: &JointPmf2, n: usize, z: [f64; 3]) -> Result<f64> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    if z.iter().any(|x| x.is_nan()) {
        return invalid("z must not contain NaN");
    }
    if z.iter().any(|&x| x < 0.0) {
        return Ok(0.0);
    }
    let k = pmf.cells().len();
    let types = type_count(n, k);
    if types > MAX_TYPES as f64 {
        return Err(Error::Resource(format!("{types:.3e} joint types exceed the enumeration guard")));
    }
    let lf = ln_fact(n);
    let lp: Vec<f64> = pmf.cells().iter().map(|p| if *p > 0.0 { p.ln() } else { f64::NEG_INFINITY }).collect();
    let (rows, cols) = (pmf.rows(), pmf.cols());
    let mut acc = Neumaier::default();
    for_each_composition(n, k, &mut |c| {
        let mut l = lf[n];
        for (i, &ci) in c.iter().enumerate() {
            if ci > 0 {
                l += ci as f64 * lp[i] - lf[ci];
            }
        }
        if l == f64::NEG_INFINITY {
            return;
        }
        if below(&type_entropies(c, rows, cols, n), &z) {
            acc.add(l.exp());
        }
    });
    Ok(acc.value().clamp(0.0, 1.0))
}

/// Exact `P(‖P_{Xⁿ} − p‖₁ ≥ t)` for i.i.d. draws from `p`.
pub fn l1_deviation_prob(p: &[f64], n: usize, t: f64) -> Result<f64> {
    if p.is_empty() || p.iter().any(|x| !(*x >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return invalid("p must be a probability vector");
    }
    if n == 0 {
        return invalid("n must be at least 1");
    }
    if type_count(n, p.len()) > MAX_TYPES as f64 {
        return Err(Error::Resource("type enumeration guard exceeded".into()));
    }
    let lf = ln_fact(n);
    let mut acc = Neumaier::default();
    for_each_composition(n, p.len(), &mut |c| {
        let d: f64 = c.iter().zip(p).map(|(&ci, pi)| (ci as f64 / n as f64 - pi).abs()).sum();
        if d >= t - TIE {
            let mut l = lf[n];
            for (&ci, pi) in c.iter().zip(p) {
                if ci > 0 {
                    l += ci as f64 * pi.ln() - lf[ci];
                }
            }
            acc.add(l.exp());
        }
    });
    Ok(acc.value().clamp(0.0, 1.0))
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn cumulative(pmf: &JointPmf2) -> Vec<f64> {
    let mut acc = 0.0;
    pmf.cells()
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn draw_cell(cum: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let i = cum.partition_point(|&c| c <= u);
    if i < cum.len() {
        return i;
    }
    // rounding left u above the last partial sum; take the last cell with mass
    (0..cum.len()).rev().find(|&j| j == 0 || cum[j] > cum[j - 1]).unwrap()
}

fn count_trials<F: Fn(u64) -> bool + Sync>(cfg: &SimConfig, f: F) -> u64 {
    let chunk = (cfg.trials / cfg.shards as u64).max(1) as usize;
    (0..cfg.trials as usize)
        .into_par_iter()
        .with_min_len(chunk.min(4096))
        .filter(|&t| f(t as u64))
        .count() as u64
}

/// Monte Carlo estimate of `P(Ĥ(X1ⁿ, X2ⁿ) ≤ z)`.
pub fn mc_entropy_cdf(pmf: &JointPmf2, cfg: &SimConfig, z: [f64; 3]) -> Result<SimReport> {
    cfg.validate()?;
    if z.iter().any(|x| x.is_nan()) {
        return invalid("z must not contain NaN");
    }
    let cum = cumulative(pmf);
    let (rows, cols, n) = (pmf.rows(), pmf.cols(), cfg.n);
    let hits = count_trials(cfg, |t| {
        let mut rng = trial_rng(cfg.seed, t);
        let mut counts = vec![0usize; rows * cols];
        for _ in 0..n {
            counts[draw_cell(&cum, &mut rng)] += 1;
        }
        below(&type_entropies(&counts, rows, cols, n), &z)
    });
    Ok(SimReport::from_count(hits, cfg.trials, cfg.seed, true))
}

/// Decoder threshold backoff `(|X1||X2| + 1/2)·log₂(n+1)/n`.
pub fn delta_n(rows: usize, cols: usize, n: usize) -> f64 {
    ((rows * cols) as f64 + 0.5) * ((n + 1) as f64).log2() / n as f64
}

/// `log₂ ⌈2^{nR}⌉`.
fn log2_bins(n: usize, r: f64) -> f64 {
    let e = n as f64 * r;
    if e <= 0.0 {
        0.0
    } else if e < 52.0 {
        e.exp2().ceil().log2()
    } else {
        e
    }
}

/// `ln P(no collision)` when `2^{log2_count}` candidates each land in a given
/// bin independently with probability `2^{-log2_m}`.
fn ln_no_collision(log2_count: f64, log2_m: f64) -> f64 {
    if log2_count == f64::NEG_INFINITY {
        return 0.0;
    }
    if log2_m == 0.0 {
        return f64::NEG_INFINITY;
    }
    let count = log2_count.exp2();
    let inv_m = (-log2_m).exp2();
    count * (-inv_m).ln_1p()
}

/// `log₂ Σ 2^{x_i}` accumulator.
#[derive(Clone, Copy)]
struct Log2Sum(f64);

impl Log2Sum {
    fn new() -> Self {
        Log2Sum(f64::NEG_INFINITY)
    }

    fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        let (a, b) = if self.0 > x { (self.0, x) } else { (x, self.0) };
        self.0 = a + (b - a).exp2().ln_1p() / std::f64::consts::LN_2;
    }
}

fn log2_minus(a: f64, b: f64) -> f64 {
    // log₂(2^a − 2^b), or −∞ when the difference is not positive
    if b == f64::NEG_INFINITY {
        return a;
    }
    if b >= a {
        return f64::NEG_INFINITY;
    }
    a + (-(b - a).exp2()).ln_1p() / std::f64::consts::LN_2
}

fn mix(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Keyed uniform bin index of a sequence encoded as an integer.
fn bin_of(seed: u64, trial: u64, encoder: u64, seq: u64, bins: f64) -> u64 {
    let h = mix(mix(mix(seed ^ 0x9e37_79b9_7f4a_7c15) ^ trial) ^ (encoder << 61) ^ mix(seq));
    if bins >= 1.8e19 {
        h
    } else {
        h % (bins as u64)
    }
}

struct Setup {
    rows: usize,
    cols: usize,
    n: usize,
    thr: [f64; 3],
    log2_m: [f64; 2],
    cum: Vec<f64>,
    lf: Vec<f64>,
}

impl Setup {
    fn pass(&self, counts: &[usize]) -> bool {
        below(&type_entropies(counts, self.rows, self.cols, self.n), &self.thr)
    }

    // log₂ of the number of x1' sequences (including the true one) whose joint
    // type with the fixed x2 passes the threshold; `by_col[b]` is the count of
    // symbol b in x2.
    fn log2_partners(&self, by_col: &[usize], transpose: bool) -> f64 {
        let (inner, outer) = if transpose { (self.cols, self.rows) } else { (self.rows, self.cols) };
        let mut counts = vec![0usize; self.rows * self.cols];
        let mut acc = Log2Sum::new();
        let ln2 = std::f64::consts::LN_2;
        // recursive walk over one composition per fixed-symbol value
        fn walk(
            s: &Setup,
            by: &[usize],
            b: usize,
            inner: usize,
            outer: usize,
            transpose: bool,
            counts: &mut Vec<usize>,
            log_mult: f64,
            acc: &mut Log2Sum,
            ln2: f64,
        ) {
            if b == outer {
                if s.pass(counts) {
                    acc.add(log_mult / ln2);
                }
                return;
            }
            let nb = by[b];
            let mut comp = vec![0usize; inner];
            for_each_composition(nb, inner, &mut |c| {
                comp.copy_from_slice(c);
                let mut lm = s.lf[nb];
                for (a, &ca) in comp.iter().enumerate() {
                    lm -= s.lf[ca];
                    let idx = if transpose { b * s.cols + a } else { a * s.cols + b };
                    counts[idx] = ca;
                }
                walk(s, by, b + 1, inner, outer, transpose, counts, log_mult + lm, acc, ln2);
            });
        }
        walk(self, by_col, 0, inner, outer, transpose, &mut counts, 0.0, &mut acc, ln2);
        acc.0
    }

    fn log2_all_pairs(&self) -> f64 {
        let mut acc = Log2Sum::new();
        let n = self.n;
        for_each_composition(n, self.rows * self.cols, &mut |c| {
            if self.pass(c) {
                let mut l = self.lf[n];
                for &ci in c {
                    l -= self.lf[ci];
                }
                acc.add(l / std::f64::consts::LN_2);
            }
        });
        acc.0
    }
}

/// Random binning with minimum-empirical-entropy decoding; the report's
/// estimate is the block error rate.
///
/// For small alphabets and blocklengths both bins are scanned. Otherwise the
/// collision events are drawn from their exact per-class probabilities, with
/// pairs wrong in both coordinates treated as independent.
pub fn binning_simulator(pmf: &JointPmf2, r1: f64, r2: f64, cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    if !(r1.is_finite() && r2.is_finite() && r1 >= 0.0 && r2 >= 0.0) {
        return invalid("rates must be finite and nonnegative");
    }
    let (rows, cols, n) = (pmf.rows(), pmf.cols(), cfg.n);
    let d = delta_n(rows, cols, n);
    let setup = Setup {
        rows,
        cols,
        n,
        thr: [r1 - d, r2 - d, r1 + r2 - d],
        log2_m: [log2_bins(n, r1), log2_bins(n, r2)],
        cum: cumulative(pmf),
        lf: ln_fact(n),
    };
    let seq1 = (rows as f64).powi(n as i32);
    let seq2 = (cols as f64).powi(n as i32);
    let pairs = seq1 / setup.log2_m[0].exp2() * seq2 / setup.log2_m[1].exp2();
    if n <= 16 && seq1 <= 65536.0 && seq2 <= 65536.0 && pairs <= 1e5 {
        let hits = count_trials(cfg, |t| exhaustive_trial(&setup, cfg, t));
        return Ok(SimReport::from_count(hits, cfg.trials, cfg.seed, true));
    }
    if type_count(n, rows * cols) > MAX_SIM_TYPES as f64 {
        return Err(Error::Resource("joint-type count exceeds the simulator guard".into()));
    }
    let all = setup.log2_all_pairs();
    let hits = count_trials(cfg, |t| type_trial(&setup, cfg, t, all));
    Ok(SimReport::from_count(hits, cfg.trials, cfg.seed, false))
}

fn draw_pair(s: &Setup, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mut x1 = Vec::with_capacity(s.n);
    let mut x2 = Vec::with_capacity(s.n);
    for _ in 0..s.n {
        let c = draw_cell(&s.cum, rng);
        x1.push(c / s.cols);
        x2.push(c % s.cols);
    }
    (x1, x2)
}

fn joint_counts(s: &Setup, x1: &[usize], x2: &[usize]) -> Vec<usize> {
    let mut c = vec![0usize; s.rows * s.cols];
    for (a, b) in x1.iter().zip(x2) {
        c[a * s.cols + b] += 1;
    }
    c
}

fn encode(x: &[usize], base: usize) -> u64 {
    x.iter().fold(0u64, |acc, &v| acc * base as u64 + v as u64)
}

fn decode(mut v: u64, base: usize, n: usize) -> Vec<usize> {
    let mut x = vec![0; n];
    for i in (0..n).rev() {
        x[i] = (v % base as u64) as usize;
        v /= base as u64;
    }
    x
}

fn exhaustive_trial(s: &Setup, cfg: &SimConfig, t: u64) -> bool {
    let mut rng = trial_rng(cfg.seed, t);
    let (x1, x2) = draw_pair(s, &mut rng);
    let m1 = s.log2_m[0].exp2().round();
    let m2 = s.log2_m[1].exp2().round();
    let (e1, e2) = (encode(&x1, s.rows), encode(&x2, s.cols));
    let b1 = bin_of(cfg.seed, t, 1, e1, m1);
    let b2 = bin_of(cfg.seed, t, 2, e2, m2);
    let cand1: Vec<u64> = (0..(s.rows as u64).pow(s.n as u32)).filter(|&v| bin_of(cfg.seed, t, 1, v, m1) == b1).collect();
    let cand2: Vec<u64> = (0..(s.cols as u64).pow(s.n as u32)).filter(|&v| bin_of(cfg.seed, t, 2, v, m2) == b2).collect();
    let mut passing = 0usize;
    let mut true_passes = false;
    for &v1 in &cand1 {
        let y1 = decode(v1, s.rows, s.n);
        for &v2 in &cand2 {
            let y2 = decode(v2, s.cols, s.n);
            if s.pass(&joint_counts(s, &y1, &y2)) {
                passing += 1;
                if v1 == e1 && v2 == e2 {
                    true_passes = true;
                }
                if passing > 1 {
                    return true;
                }
            }
        }
    }
    !(true_passes && passing == 1)
}

fn type_trial(s: &Setup, cfg: &SimConfig, t: u64, log2_all: f64) -> bool {
    let mut rng = trial_rng(cfg.seed, t);
    let (x1, x2) = draw_pair(s, &mut rng);
    let jc = joint_counts(s, &x1, &x2);
    if !s.pass(&jc) {
        return true;
    }
    let by_col: Vec<usize> = (0..s.cols).map(|b| (0..s.rows).map(|a| jc[a * s.cols + b]).sum()).collect();
    let by_row: Vec<usize> = (0..s.rows).map(|a| (0..s.cols).map(|b| jc[a * s.cols + b]).sum()).collect();
    // candidates other than the true sequence
    let n2 = log2_minus(s.log2_partners(&by_col, false), 0.0);
    let n3 = log2_minus(s.log2_partners(&by_row, true), 0.0);
    let mut shared = Log2Sum::new();
    shared.add(n2);
    shared.add(n3);
    shared.add(0.0);
    let n4 = log2_minus(log2_all, shared.0);
    let ln_ok = ln_no_collision(n2, s.log2_m[0])
        + ln_no_collision(n3, s.log2_m[1])
        + ln_no_collision(n4, s.log2_m[0] + s.log2_m[1]);
    let u: f64 = rng.gen();
    u >= ln_ok.exp()
}
