//! Complex LMS runs and Monte Carlo ensembles.
//!
//! `w(n) = w(n-1) + mu e*(n) x(n)` with `e(n) = d(n) + m(n) - w^H(n-1) x(n)`.
//!
//! Ensembles split the runs into fixed chunks of [`CHUNK_RUNS`]; each chunk
//! is reduced in run order and the chunk partials are merged in chunk order,
//! so results do not depend on how many worker threads execute the chunks.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{LmsError, Result};
use crate::numerics::{CplxVec, C64};
use crate::signals::{run_seed, ScenarioSpec, StreamGenerator};

/// Runs per reduction chunk.
pub const CHUNK_RUNS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct LmsRunResult {
    /// `|e(n)|^2` for `n = 1..=T` (index `n - 1`); truncated at divergence.
    pub sq_error: Vec<f64>,
    pub final_weights: CplxVec,
    /// Iteration index at which a non-finite value first appeared.
    pub diverged_at: Option<usize>,
}

impl LmsRunResult {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }
}

fn check_run_args(scenario: &ScenarioSpec, mu: f64, w0: &CplxVec) -> Result<()> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(LmsError::InvalidParameter(format!("mu must be positive (got {mu})")));
    }
    if w0.len() != scenario.filter_len {
        return Err(LmsError::Size(format!("w0 has {} taps, expected {}", w0.len(), scenario.filter_len)));
    }
    Ok(())
}

/// One LMS realization over `steps` samples of the scenario stream for `seed`.
pub fn lms_run(scenario: &ScenarioSpec, mu: f64, steps: usize, seed: u64, w0: &CplxVec) -> Result<LmsRunResult> {
    check_run_args(scenario, mu, w0)?;
    if steps < scenario.filter_len {
        return Err(LmsError::Size(format!("steps {steps} shorter than filter_len {}", scenario.filter_len)));
    }
    let mut gen = StreamGenerator::new(scenario, seed)?;
    Ok(run_with(&mut gen, scenario.filter_len, mu, steps, w0))
}

fn run_with(gen: &mut StreamGenerator<'_>, n: usize, mu: f64, steps: usize, w0: &CplxVec) -> LmsRunResult {
    let mut w: Vec<C64> = w0.as_slice().to_vec();
    let mut x = vec![C64::new(0.0, 0.0); n];
    let mut sq_error = Vec::with_capacity(steps);
    let mut diverged_at = None;
    for step in 0..steps {
        let (d, m) = gen.next_into(&mut x);
        let y: C64 = w.iter().zip(&x).map(|(wi, xi)| wi.conj() * xi).sum();
        let e = d + m - y;
        let g = e.conj() * mu;
        for (wi, xi) in w.iter_mut().zip(&x) {
            *wi += g * xi;
        }
        let e2 = e.norm_sqr();
        if !e2.is_finite() || w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            diverged_at = Some(step);
            break;
        }
        sq_error.push(e2);
    }
    LmsRunResult { sq_error, final_weights: CplxVec::from(w), diverged_at }
}

/// Ensemble-averaged learning curve.
#[derive(Debug, Clone, PartialEq)]
pub struct MseCurve {
    pub mean_sq_error: Vec<f64>,
    /// Standard error of each mean: sample standard deviation over `sqrt(runs)`.
    pub stderr: Vec<f64>,
    /// Runs contributing to the mean.
    pub runs: usize,
    pub diverged_runs: usize,
}

impl MseCurve {
    pub fn len(&self) -> usize {
        self.mean_sq_error.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean_sq_error.is_empty()
    }
}

/// Curve plus ensemble statistics of the final weights.
#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub curve: MseCurve,
    pub mean_final_weights: CplxVec,
    /// Per-tap standard error of the mean final weight (`sqrt(E|w - mean|^2 / runs)`).
    pub final_weight_stderr: Vec<f64>,
}

/// Running mean and centered second moment per slot, mergeable in a fixed order.
#[derive(Debug, Clone)]
struct Moments {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Self { count: 0, mean: vec![0.0; len], m2: vec![0.0; len] }
    }

    fn push(&mut self, values: impl Iterator<Item = f64>) {
        self.count += 1;
        let nf = self.count as f64;
        for ((m, s), x) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(values) {
            let delta = x - *m;
            *m += delta / nf;
            *s += delta * (x - *m);
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * nb / n;
            self.m2[i] += other.m2[i] + delta * delta * na * nb / n;
        }
        self.count += other.count;
    }

    fn stderr(&self) -> Vec<f64> {
        if self.count < 2 {
            return vec![0.0; self.mean.len()];
        }
        let n = self.count as f64;
        self.m2.iter().map(|s| (s / (n - 1.0)).max(0.0).sqrt() / n.sqrt()).collect()
    }
}

struct ChunkAcc {
    mse: Moments,
    /// Real and imaginary parts of the final weights, interleaved.
    weights: Moments,
    diverged: usize,
}

fn run_chunk(
    scenario: &ScenarioSpec,
    mu: f64,
    steps: usize,
    base_seed: u64,
    w0: &CplxVec,
    runs: std::ops::Range<usize>,
) -> Result<ChunkAcc> {
    let n = scenario.filter_len;
    let mut acc = ChunkAcc { mse: Moments::new(steps), weights: Moments::new(2 * n), diverged: 0 };
    for r in runs {
        let mut gen = StreamGenerator::new(scenario, run_seed(base_seed, r as u64))?;
        let res = run_with(&mut gen, n, mu, steps, w0);
        if res.diverged() {
            acc.diverged += 1;
            continue;
        }
        acc.mse.push(res.sq_error.iter().copied());
        acc.weights.push(res.final_weights.iter().flat_map(|z| [z.re, z.im]));
    }
    Ok(acc)
}

/// Monte Carlo ensemble of `runs` independent LMS realizations.
///
/// Run `r` uses seed [`run_seed`]`(base_seed, r)`. Diverged runs are counted
/// and excluded from the averages.
pub fn monte_carlo(
    scenario: &ScenarioSpec,
    mu: f64,
    steps: usize,
    runs: usize,
    base_seed: u64,
    w0: &CplxVec,
) -> Result<EnsembleResult> {
    check_run_args(scenario, mu, w0)?;
    scenario.validate()?;
    if runs == 0 {
        return Err(LmsError::InvalidParameter("runs must be at least 1".into()));
    }
    if steps < scenario.filter_len {
        return Err(LmsError::Size(format!("steps {steps} shorter than filter_len {}", scenario.filter_len)));
    }
    let chunks: Vec<std::ops::Range<usize>> =
        (0..runs).step_by(CHUNK_RUNS).map(|start| start..(start + CHUNK_RUNS).min(runs)).collect();

    #[cfg(feature = "parallel")]
    let partials: Vec<Result<ChunkAcc>> =
        chunks.into_par_iter().map(|range| run_chunk(scenario, mu, steps, base_seed, w0, range)).collect();
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<Result<ChunkAcc>> =
        chunks.into_iter().map(|range| run_chunk(scenario, mu, steps, base_seed, w0, range)).collect();

    let n = scenario.filter_len;
    let mut mse = Moments::new(steps);
    let mut weights = Moments::new(2 * n);
    let mut diverged = 0;
    for p in partials {
        let p = p?;
        mse.merge(&p.mse);
        weights.merge(&p.weights);
        diverged += p.diverged;
    }
    if mse.count == 0 {
        return Err(LmsError::AllDiverged { runs });
    }
    let curve = MseCurve { stderr: mse.stderr(), runs: mse.count, diverged_runs: diverged, mean_sq_error: mse.mean };
    let w_se = weights.stderr();
    let mean_final_weights = CplxVec::from(weights.mean.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect::<Vec<_>>());
    let final_weight_stderr = w_se.chunks_exact(2).map(|c| c[0].hypot(c[1])).collect();
    Ok(EnsembleResult { curve, mean_final_weights, final_weight_stderr })
}

/// Learning curve of a Monte Carlo ensemble; see [`monte_carlo`].
pub fn monte_carlo_mse(
    scenario: &ScenarioSpec,
    mu: f64,
    steps: usize,
    runs: usize,
    base_seed: u64,
    w0: &CplxVec,
) -> Result<MseCurve> {
    Ok(monte_carlo(scenario, mu, steps, runs, base_seed, w0)?.curve)
}

/// Average of the curve over indices `from_iter..`.
///
/// The returned error is the mean of the per-iteration standard errors,
/// which bounds the window-mean error when iterations are positively correlated.
pub fn tail_estimate(curve: &MseCurve, from_iter: usize) -> Result<(f64, f64)> {
    let window = curve.mean_sq_error.get(from_iter..).filter(|w| !w.is_empty());
    let Some(window) = window else {
        return Err(LmsError::Size(format!("tail window starting at {from_iter} is empty (curve has {} points)", curve.len())));
    };
    let len = window.len() as f64;
    let mean = window.iter().sum::<f64>() / len;
    let se = curve.stderr[from_iter..].iter().sum::<f64>() / len;
    Ok((mean, se))
}
