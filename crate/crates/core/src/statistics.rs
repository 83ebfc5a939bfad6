//! Second-order statistics of the scenarios and the strictly linear Wiener solution.

use crate::error::{LmsError, Result};
use crate::numerics::{hermitian_eig, solve_hermitian, CplxMat, CplxVec, C64};
use crate::signals::{moments_of_spec, ImproperWhiteSpec, Plant, SampleStream, ScenarioSpec};

/// Covariance, pseudo-covariance and cross moments driving the models.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderStats {
    /// `E{x x^H}`
    pub r: CplxMat,
    /// `E{x x^T}`
    pub c: CplxMat,
    /// `E{x d*}`
    pub p: CplxVec,
    /// `E{x d}`
    pub q: CplxVec,
    pub sigma_d2: f64,
    pub sigma_m2: f64,
}

impl SecondOrderStats {
    pub fn filter_len(&self) -> usize {
        self.p.len()
    }

    /// Checks shapes and that the augmented covariance `[[R, C], [C*, R*]]` is PSD.
    pub fn validate(&self) -> Result<()> {
        let n = self.p.len();
        if self.r.rows() != n || self.r.cols() != n || self.c.rows() != n || self.c.cols() != n || self.q.len() != n {
            return Err(LmsError::Size("inconsistent statistic dimensions".into()));
        }
        if !self.r.is_hermitian() {
            return Err(LmsError::Structure("R is not Hermitian".into()));
        }
        if !self.c.is_symmetric() {
            return Err(LmsError::Structure("C is not symmetric".into()));
        }
        let smallest = self.augmented_min_eigenvalue()?;
        if smallest < -1e-10 {
            return Err(LmsError::Structure(format!("augmented covariance is indefinite (eigenvalue {smallest:.3e})")));
        }
        Ok(())
    }

    pub fn augmented_min_eigenvalue(&self) -> Result<f64> {
        let n = self.p.len();
        let (rc, cc) = (self.r.conj(), self.c.conj());
        let mut aug = CplxMat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => self.r[(i, j)],
            (true, false) => self.c[(i, j - n)],
            (false, true) => cc[(i - n, j)],
            (false, false) => rc[(i - n, j - n)],
        });
        aug.symmetrize_hermitian();
        Ok(*hermitian_eig(&aug)?.values.last().expect("non-empty"))
    }
}

/// Optimal strictly linear filter and the quantities that separate the models.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerQuantities {
    pub w_inf: CplxVec,
    pub j_min: f64,
    /// Pseudo-cross-correlation `E{x e_o} = q - C w_inf*`.
    pub k: CplxVec,
}

impl WienerQuantities {
    /// `k^H k`.
    pub fn k_norm2(&self) -> f64 {
        self.k.norm_sqr()
    }
}

/// Exact statistics of the widely linear system identification setup.
pub fn stats_sysid(f: &CplxVec, g: &CplxVec, spec: &ImproperWhiteSpec, noise_var: f64) -> Result<SecondOrderStats> {
    if f.len() != g.len() {
        return Err(LmsError::Size(format!("|f| = {} but |g| = {}", f.len(), g.len())));
    }
    let n = f.len();
    let mom = moments_of_spec(spec)?;
    let r = CplxMat::scaled_identity(n, C64::new(mom.r_x, 0.0));
    let c = CplxMat::scaled_identity(n, mom.q_x);
    let p = &r.mul_vec(f) + &c.mul_vec(g);
    let q = &c.mul_vec(&f.conj()) + &r.mul_vec(&g.conj());
    let power = f.dot(&r.mul_vec(f)) + f.dot(&c.mul_vec(g)) + g.dot(&c.conj().mul_vec(f)) + g.dot(&r.transpose().mul_vec(g));
    debug_assert!(power.im.abs() <= 1e-12 * power.norm().max(1.0));
    Ok(SecondOrderStats { r, c, p, q, sigma_d2: power.re, sigma_m2: noise_var })
}

/// Exact statistics of the equalization setup.
///
/// With `H[i][i + k] = taps[k]`, the regressor is `x = H u + nu` where
/// `u = [u(n - latency), u(n - latency - 1), ...]`, giving
/// `R = r_u H H^H + s2 I`, `C = q_u H H^T`, `p = r_u H e`, `q = q_u H e`
/// with `e` selecting `u(n - delay)`.
pub fn stats_equalization(
    channel_taps: &CplxVec,
    delay: usize,
    latency: usize,
    n: usize,
    spec: &ImproperWhiteSpec,
    channel_noise_var: f64,
) -> Result<SecondOrderStats> {
    if n == 0 || channel_taps.is_empty() {
        return Err(LmsError::Size("filter length and channel must be non-empty".into()));
    }
    let mom = moments_of_spec(spec)?;
    let m = channel_taps.len();
    let span = n + m - 1;
    let h = CplxMat::from_fn(n, span, |i, l| if l >= i && l - i < m { channel_taps[l - i] } else { C64::new(0.0, 0.0) });
    let hh = &h * &h.adjoint();
    let ht = &h * &h.transpose();
    let mut r = &hh.scale_real(mom.r_x) + &CplxMat::scaled_identity(n, C64::new(channel_noise_var, 0.0));
    r.symmetrize_hermitian();
    let mut c = ht.scale(mom.q_x);
    c.symmetrize();
    // Out-of-window delays select nothing.
    let sel = delay.checked_sub(latency).filter(|&l| l < span);
    let he = match sel {
        Some(l) => h.column(l),
        None => CplxVec::zeros(n),
    };
    let p = he.scale(C64::new(mom.r_x, 0.0));
    let q = he.scale(mom.q_x);
    Ok(SecondOrderStats { r, c, p, q, sigma_d2: mom.r_x, sigma_m2: 0.0 })
}

/// Exact statistics for any scenario.
pub fn stats_for(scenario: &ScenarioSpec) -> Result<SecondOrderStats> {
    scenario.validate()?;
    match &scenario.plant {
        Plant::SysIdWl { f, g } => stats_sysid(f, g, &scenario.input, scenario.noise_var),
        Plant::ChannelEq { channel_taps, delay, latency } => {
            stats_equalization(channel_taps, *delay, *latency, scenario.filter_len, &scenario.input, scenario.noise_var)
        }
    }
}

/// Empirical statistics with per-entry standard errors.
#[derive(Debug, Clone)]
pub struct EmpiricalStats {
    pub stats: SecondOrderStats,
    /// Standard errors of the entries of R, C (row-major), p and q.
    pub se_r: Vec<f64>,
    pub se_c: Vec<f64>,
    pub se_p: Vec<f64>,
    pub se_q: Vec<f64>,
}

struct MomentSums {
    r: CplxMat,
    c: CplxMat,
    p: CplxVec,
    q: CplxVec,
    d2: f64,
    m2: f64,
}

impl MomentSums {
    fn new(n: usize) -> Self {
        Self {
            r: CplxMat::zeros(n, n),
            c: CplxMat::zeros(n, n),
            p: CplxVec::zeros(n),
            q: CplxVec::zeros(n),
            d2: 0.0,
            m2: 0.0,
        }
    }

    fn accumulate(&mut self, x: &[C64], d: C64, m: C64) {
        let n = x.len();
        for i in 0..n {
            for j in 0..n {
                self.r[(i, j)] += x[i] * x[j].conj();
                self.c[(i, j)] += x[i] * x[j];
            }
            self.p[i] += x[i] * d.conj();
            self.q[i] += x[i] * d;
        }
        self.d2 += d.norm_sqr();
        self.m2 += m.norm_sqr();
    }

    fn into_stats(self, count: usize) -> SecondOrderStats {
        let s = 1.0 / count as f64;
        let mut r = self.r.scale_real(s);
        r.symmetrize_hermitian();
        let mut c = self.c.scale_real(s);
        c.symmetrize();
        SecondOrderStats {
            r,
            c,
            p: self.p.scale(C64::new(s, 0.0)),
            q: self.q.scale(C64::new(s, 0.0)),
            sigma_d2: self.d2 * s,
            sigma_m2: self.m2 * s,
        }
    }
}

/// Sample averages of `x x^H`, `x x^T`, `x d*`, `x d`, `|d|^2`, `|m|^2`.
pub fn sample_second_order_stats(stream: &SampleStream) -> Result<SecondOrderStats> {
    let n = stream.filter_len();
    if stream.len() < 10 * n {
        return Err(LmsError::Size(format!("need at least {} samples, got {}", 10 * n, stream.len())));
    }
    let mut sums = MomentSums::new(n);
    for ((x, d), m) in stream.regressors().zip(&stream.d).zip(&stream.m) {
        sums.accumulate(x, *d, *m);
    }
    Ok(sums.into_stats(stream.len()))
}

/// Sample statistics plus batch-means standard errors (`batches` equal blocks).
///
/// Batch means keep the error estimate honest for colored regressors,
/// where consecutive outer products are correlated.
pub fn empirical_stats(stream: &SampleStream, batches: usize) -> Result<EmpiricalStats> {
    let n = stream.filter_len();
    let stats = sample_second_order_stats(stream)?;
    let batches = batches.max(2);
    let per = stream.len() / batches;
    if per == 0 {
        return Err(LmsError::Size("stream shorter than batch count".into()));
    }
    let mut batch_stats = Vec::with_capacity(batches);
    for b in 0..batches {
        let mut sums = MomentSums::new(n);
        for t in b * per..(b + 1) * per {
            sums.accumulate(stream.regressor(t), stream.d[t], stream.m[t]);
        }
        batch_stats.push(sums.into_stats(per));
    }
    let bf = batches as f64;
    let se = |get: &dyn Fn(&SecondOrderStats) -> C64| -> f64 {
        let mean: C64 = batch_stats.iter().map(get).sum::<C64>() / bf;
        let var: f64 = batch_stats.iter().map(|s| (get(s) - mean).norm_sqr()).sum::<f64>() / (bf - 1.0);
        (var / bf).sqrt()
    };
    let mut se_r = Vec::with_capacity(n * n);
    let mut se_c = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            se_r.push(se(&|s: &SecondOrderStats| s.r[(i, j)]));
            se_c.push(se(&|s: &SecondOrderStats| s.c[(i, j)]));
        }
    }
    let se_p = (0..n).map(|i| se(&|s: &SecondOrderStats| s.p[i])).collect();
    let se_q = (0..n).map(|i| se(&|s: &SecondOrderStats| s.q[i])).collect();
    Ok(EmpiricalStats { stats, se_r, se_c, se_p, se_q })
}

/// `w_inf = R^{-1} p`, `J_min = s_d^2 + s_m^2 - Re(p^H w_inf)`, `k = q - C w_inf*`.
pub fn wiener_solution(stats: &SecondOrderStats) -> Result<WienerQuantities> {
    let w_inf = solve_hermitian(&stats.r, &stats.p)?;
    let j_min = (stats.sigma_d2 + stats.sigma_m2 - stats.p.dot(&w_inf).re).max(0.0);
    let k = &stats.q - &stats.c.mul_vec(&w_inf.conj());
    Ok(WienerQuantities { w_inf, j_min, k })
}

/// `k = (R - C R^{-*} C^*) g^*` for the widely linear plant.
pub fn k_sysid_closed_form(stats: &SecondOrderStats, g: &CplxVec) -> Result<CplxVec> {
    let n = stats.filter_len();
    if g.len() != n {
        return Err(LmsError::Size(format!("|g| = {} but N = {n}", g.len())));
    }
    let r_conj = stats.r.conj();
    let c_conj = stats.c.conj();
    // Columns of R^{-*} C^*.
    let mut solved = CplxMat::zeros(n, n);
    for j in 0..n {
        let col = solve_hermitian(&r_conj, &c_conj.column(j))?;
        for i in 0..n {
            solved[(i, j)] = col[i];
        }
    }
    let schur = &stats.r - &(&stats.c * &solved);
    Ok(schur.mul_vec(&g.conj()))
}

/// Sample check of `E{x e_o*} = 0` and `E{x e_o} = k` with `w` frozen at `w_inf`.
///
/// Returns `(|avg x e_o*|, |avg x e_o - k|)`.
pub fn orthogonality_residual(
    stats: &SecondOrderStats,
    wiener: &WienerQuantities,
    stream: &SampleStream,
) -> Result<(f64, f64)> {
    let n = stats.filter_len();
    if stream.filter_len() != n {
        return Err(LmsError::Size("stream and statistics disagree on filter length".into()));
    }
    if stream.is_empty() {
        return Err(LmsError::Size("empty stream".into()));
    }
    let mut a = vec![C64::new(0.0, 0.0); n];
    let mut b = vec![C64::new(0.0, 0.0); n];
    for ((x, d), m) in stream.regressors().zip(&stream.d).zip(&stream.m) {
        let y: C64 = wiener.w_inf.iter().zip(x).map(|(w, xi)| w.conj() * xi).sum();
        let e = d + m - y;
        for i in 0..n {
            a[i] += x[i] * e.conj();
            b[i] += x[i] * e;
        }
    }
    let t = stream.len() as f64;
    let r1 = a.iter().map(|z| (z / t).norm_sqr()).sum::<f64>().sqrt();
    let r2 = b.iter().zip(wiener.k.iter()).map(|(z, k)| (z / t - k).norm_sqr()).sum::<f64>().sqrt();
    Ok((r1, r2))
}
