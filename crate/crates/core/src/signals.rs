//! Improper white Gaussian sources and the two scenario streams.
//!
//! All randomness comes from `ChaCha8Rng` seeded with `seed_from_u64`;
//! standard normals are drawn with `rand_distr::StandardNormal`. A complex
//! input sample consumes two normals `(a, b)`:
//!
//! ```text
//! u = sqrt(r_uu) * a
//! v = sqrt(r_vv) * (rho_uv * a + sqrt(1 - rho_uv^2) * b)
//! x = u + j v
//! ```
//!
//! Circular noise of variance `s2` is `sqrt(s2 / 2) * (a + j b)`.
//!
//! Regressors use the delay-line convention `x(n) = [in(n), in(n-1), ..., in(n-N+1)]`
//! and the input is pre-rolled so the first emitted regressor is fully populated.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{LmsError, Result};
use crate::numerics::{CplxVec, C64};

/// Second-order description of a scalar improper white Gaussian source,
/// parameterized by the real/imaginary part variances and their correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImproperWhiteSpec {
    pub r_uu: f64,
    pub r_vv: f64,
    pub rho_uv: f64,
}

/// Covariance, pseudo-covariance and impropriety coefficient of a scalar source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMoments {
    pub r_x: f64,
    pub q_x: C64,
    pub rho_x: C64,
}

impl ImproperWhiteSpec {
    pub fn new(r_uu: f64, r_vv: f64, rho_uv: f64) -> Result<Self> {
        let spec = Self { r_uu, r_vv, rho_uv };
        spec.validate()?;
        Ok(spec)
    }

    /// Proper (circular) source of total variance `r_x`.
    pub fn proper(r_x: f64) -> Self {
        Self { r_uu: r_x / 2.0, r_vv: r_x / 2.0, rho_uv: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { r_uu, r_vv, rho_uv } = *self;
        if !(r_uu.is_finite() && r_vv.is_finite() && rho_uv.is_finite()) {
            return Err(LmsError::NonFinite("input spec".into()));
        }
        if r_uu < 0.0 || r_vv < 0.0 {
            return Err(LmsError::InvalidParameter(format!("variances must be nonnegative (r_uu={r_uu}, r_vv={r_vv})")));
        }
        if rho_uv.abs() > 1.0 {
            return Err(LmsError::InvalidParameter(format!("|rho_uv| must not exceed 1 (got {rho_uv})")));
        }
        if r_uu + r_vv <= 0.0 {
            return Err(LmsError::Degenerate("r_uu + r_vv must be positive".into()));
        }
        Ok(())
    }

    pub fn moments(&self) -> Result<ScalarMoments> {
        moments_of_spec(self)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> C64 {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        let rho = self.rho_uv;
        let u = self.r_uu.sqrt() * a;
        let v = self.r_vv.sqrt() * (rho * a + (1.0 - rho * rho).max(0.0).sqrt() * b);
        C64::new(u, v)
    }
}

/// `r_x = r_uu + r_vv`, `q_x = r_uu - r_vv + 2j sqrt(r_uu r_vv) rho_uv`, `rho_x = q_x / r_x`.
pub fn moments_of_spec(spec: &ImproperWhiteSpec) -> Result<ScalarMoments> {
    spec.validate()?;
    let r_x = spec.r_uu + spec.r_vv;
    let q_x = C64::new(spec.r_uu - spec.r_vv, 2.0 * spec.r_uu.sqrt() * spec.r_vv.sqrt() * spec.rho_uv);
    Ok(ScalarMoments { r_x, q_x, rho_x: q_x / r_x })
}

fn circular_noise(var: f64, rng: &mut ChaCha8Rng) -> C64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    let s = (var / 2.0).sqrt();
    C64::new(s * a, s * b)
}

/// `count` i.i.d. samples of the improper white source, deterministic per seed.
pub fn gen_improper_white(spec: &ImproperWhiteSpec, count: usize, seed: u64) -> Result<Vec<C64>> {
    spec.validate()?;
    if count == 0 {
        return Err(LmsError::Size("count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| spec.sample(&mut rng)).collect())
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for ensemble member `run` derived from `base_seed`.
pub fn run_seed(base_seed: u64, run: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(run))
}

/// Plant generating the desired signal.
#[derive(Debug, Clone, PartialEq)]
pub enum Plant {
    /// Widely linear FIR system `d(n) = f^H x(n) + g^H x*(n)` observed in
    /// circular white noise of variance `noise_var`.
    SysIdWl { f: CplxVec, g: CplxVec },
    /// FIR channel followed by circular noise; the equalizer targets `d(n) = u(n - delay)`.
    ///
    /// The received sample is `sum_k taps[k] u(n - latency - k) + nu(n)`.
    ChannelEq { channel_taps: CplxVec, delay: usize, latency: usize },
}

/// Complete description of one adaptive filtering experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub plant: Plant,
    pub input: ImproperWhiteSpec,
    /// Measurement noise variance (system identification) or channel noise
    /// variance (equalization).
    pub noise_var: f64,
    pub filter_len: usize,
}

impl ScenarioSpec {
    pub fn sysid(f: CplxVec, g: CplxVec, input: ImproperWhiteSpec, noise_var: f64) -> Result<Self> {
        let filter_len = f.len();
        let s = Self { plant: Plant::SysIdWl { f, g }, input, noise_var, filter_len };
        s.validate()?;
        Ok(s)
    }

    pub fn channel(
        channel_taps: CplxVec,
        delay: usize,
        latency: usize,
        filter_len: usize,
        input: ImproperWhiteSpec,
        noise_var: f64,
    ) -> Result<Self> {
        let s = Self { plant: Plant::ChannelEq { channel_taps, delay, latency }, input, noise_var, filter_len };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.input.validate()?;
        if self.filter_len == 0 {
            return Err(LmsError::Size("filter_len must be at least 1".into()));
        }
        if !(self.noise_var >= 0.0) || !self.noise_var.is_finite() {
            return Err(LmsError::InvalidParameter(format!("noise_var must be finite and >= 0 (got {})", self.noise_var)));
        }
        match &self.plant {
            Plant::SysIdWl { f, g } => {
                if f.len() != self.filter_len || g.len() != self.filter_len {
                    return Err(LmsError::Size(format!(
                        "f and g must both have filter_len={} taps (got {} and {})",
                        self.filter_len,
                        f.len(),
                        g.len()
                    )));
                }
                if !f.is_finite() || !g.is_finite() {
                    return Err(LmsError::NonFinite("plant coefficients".into()));
                }
            }
            Plant::ChannelEq { channel_taps, delay, latency } => {
                if channel_taps.is_empty() {
                    return Err(LmsError::Size("channel needs at least one tap".into()));
                }
                if !channel_taps.is_finite() {
                    return Err(LmsError::NonFinite("channel taps".into()));
                }
                let limit = self.filter_len + channel_taps.len() + latency;
                if *delay >= limit {
                    return Err(LmsError::InvalidParameter(format!("delay {delay} must be below {limit}")));
                }
            }
        }
        Ok(())
    }
}

/// Regressors, desired samples and measurement noise for one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStream {
    filter_len: usize,
    x: Vec<C64>,
    pub d: Vec<C64>,
    pub m: Vec<C64>,
}

impl SampleStream {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn filter_len(&self) -> usize {
        self.filter_len
    }

    /// Regressor `x(n)`.
    pub fn regressor(&self, n: usize) -> &[C64] {
        &self.x[n * self.filter_len..(n + 1) * self.filter_len]
    }

    pub fn regressors(&self) -> std::slice::ChunksExact<'_, C64> {
        self.x.chunks_exact(self.filter_len)
    }
}

/// Sequential sample source for a scenario.
///
/// Produces the same samples as [`synthesize_stream`] without storing them,
/// so long Monte Carlo runs stay allocation free.
pub struct StreamGenerator<'a> {
    scenario: &'a ScenarioSpec,
    rng: ChaCha8Rng,
    /// Newest sample first.
    line: VecDeque<C64>,
    /// Transmitted symbol history for equalization, newest first.
    symbols: VecDeque<C64>,
}

impl<'a> StreamGenerator<'a> {
    pub fn new(scenario: &'a ScenarioSpec, seed: u64) -> Result<Self> {
        scenario.validate()?;
        let n = scenario.filter_len;
        let mut gen = Self {
            scenario,
            rng: ChaCha8Rng::seed_from_u64(seed),
            line: VecDeque::with_capacity(n + 1),
            symbols: VecDeque::new(),
        };
        match &scenario.plant {
            Plant::SysIdWl { .. } => {
                for _ in 0..n.saturating_sub(1) {
                    let s = scenario.input.sample(&mut gen.rng);
                    gen.push_line(s);
                }
            }
            Plant::ChannelEq { channel_taps, delay, latency } => {
                let span = (latency + channel_taps.len() - 1).max(*delay);
                gen.symbols = VecDeque::with_capacity(span + 2);
                let warmup = (n - 1 + latency + channel_taps.len() - 1).max(*delay);
                for _ in 0..warmup {
                    gen.advance_channel();
                }
            }
        }
        Ok(gen)
    }

    fn push_line(&mut self, s: C64) {
        self.line.push_front(s);
        self.line.truncate(self.scenario.filter_len);
    }

    /// Draws the next transmitted symbol and received sample.
    fn advance_channel(&mut self) {
        let Plant::ChannelEq { channel_taps, delay, latency } = &self.scenario.plant else {
            unreachable!("channel advance on non-channel scenario")
        };
        let u = self.scenario.input.sample(&mut self.rng);
        let nu = circular_noise(self.scenario.noise_var, &mut self.rng);
        self.symbols.push_front(u);
        let keep = (latency + channel_taps.len()).max(delay + 1);
        self.symbols.truncate(keep);
        let mut r = nu;
        for (k, h) in channel_taps.iter().enumerate() {
            if let Some(s) = self.symbols.get(latency + k) {
                r += h * s;
            }
        }
        self.push_line(r);
    }

    /// Writes the next regressor into `x` and returns `(d(n), m(n))`.
    pub fn next_into(&mut self, x: &mut [C64]) -> (C64, C64) {
        debug_assert_eq!(x.len(), self.scenario.filter_len);
        match &self.scenario.plant {
            Plant::SysIdWl { f, g } => {
                let s = self.scenario.input.sample(&mut self.rng);
                self.push_line(s);
                let m = circular_noise(self.scenario.noise_var, &mut self.rng);
                let mut d = C64::new(0.0, 0.0);
                for (i, xi) in self.line.iter().enumerate() {
                    x[i] = *xi;
                    d += f[i].conj() * xi + g[i].conj() * xi.conj();
                }
                (d, m)
            }
            Plant::ChannelEq { delay, .. } => {
                let delay = *delay;
                self.advance_channel();
                for (i, xi) in self.line.iter().enumerate() {
                    x[i] = *xi;
                }
                (self.symbols[delay], C64::new(0.0, 0.0))
            }
        }
    }
}

/// Materializes `length` samples of the scenario.
pub fn synthesize_stream(scenario: &ScenarioSpec, length: usize, seed: u64) -> Result<SampleStream> {
    if length < scenario.filter_len {
        return Err(LmsError::Size(format!("stream length {length} is shorter than filter_len {}", scenario.filter_len)));
    }
    let n = scenario.filter_len;
    let mut gen = StreamGenerator::new(scenario, seed)?;
    let mut x = vec![C64::new(0.0, 0.0); length * n];
    let mut d = Vec::with_capacity(length);
    let mut m = Vec::with_capacity(length);
    for chunk in x.chunks_exact_mut(n) {
        let (dn, mn) = gen.next_into(chunk);
        d.push(dn);
        m.push(mn);
    }
    Ok(SampleStream { filter_len: n, x, d, m })
}
