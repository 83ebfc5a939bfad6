//! Transient and steady-state models of the complex LMS algorithm.
//!
//! The weight-error mean `vbar(n)` and correlation `V(n) = E{v v^H}` evolve as
//!
//! ```text
//! vbar(n) = (I - mu R) vbar(n-1)
//! V(n)    = V - mu (R V + V R)
//!           + mu^2 (J R + R V R + k k^H - k vbar^T C* - C vbar* k^H + C V* C*)
//! J       = J_min + tr(R V)
//! ```
//!
//! with every right-hand side quantity taken at step `n-1`. The
//! independence-assumption model is the same recursion with the three
//! `k`-bearing terms removed.

use serde::Serialize;

use crate::error::{LmsError, Result};
use crate::numerics::{hermitian_eig, takagi_factorize, CplxMat, CplxVec, C64};
use crate::statistics::{SecondOrderStats, WienerQuantities};

/// Relative tolerance for recognizing the structured (Case A/B) statistics.
const SHAPE_TOL: f64 = 1e-9;

/// Which MSE model to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelVariant {
    /// Keeps the pseudo-cross-correlation terms.
    Proposed,
    /// Drops them, as under the independence assumptions.
    Independence,
}

/// Per-iteration output of a model recursion.
///
/// Index `i` holds the state after `i` updates; `j[i] = J_min + tr(R V(i))`
/// is the predicted `E|e(i+1)|^2`.
#[derive(Debug, Clone)]
pub struct TheoryTrajectory {
    pub variant: ModelVariant,
    pub j: Vec<f64>,
    pub vbar: Vec<CplxVec>,
    pub v: Vec<CplxMat>,
    /// First update index that produced a non-finite or negative MSE.
    pub diverged_at: Option<usize>,
    /// Largest relative Hermitian defect of `V` seen before symmetrization.
    pub max_hermitian_drift: f64,
}

impl TheoryTrajectory {
    pub fn last(&self) -> f64 {
        *self.j.last().expect("trajectory has the initial state")
    }

    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    /// Mean of `j[from..]`.
    pub fn tail_mean(&self, from: usize) -> Option<f64> {
        let tail = self.j.get(from..)?;
        if tail.is_empty() {
            return None;
        }
        Some(tail.iter().sum::<f64>() / tail.len() as f64)
    }
}

/// `E{w(n)} = (I - mu R) E{w(n-1)} + mu p`; returns `steps + 1` vectors starting at `w0`.
pub fn mean_weight_trajectory(stats: &SecondOrderStats, mu: f64, w0: &CplxVec, steps: usize) -> Result<Vec<CplxVec>> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(LmsError::InvalidParameter(format!("mu must be finite and nonnegative (got {mu})")));
    }
    if w0.len() != stats.filter_len() {
        return Err(LmsError::Size(format!("w0 has {} taps, expected {}", w0.len(), stats.filter_len())));
    }
    let mu_c = C64::new(mu, 0.0);
    let step_p = stats.p.scale(mu_c);
    let mut out = Vec::with_capacity(steps + 1);
    let mut w = w0.clone();
    out.push(w.clone());
    for _ in 0..steps {
        let rw = stats.r.mul_vec(&w).scale(mu_c);
        w = &(&w - &rw) + &step_p;
        out.push(w.clone());
    }
    Ok(out)
}

/// One natural mode of the mean weight error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanErrorMode {
    pub eigenvalue: f64,
    /// `1 - mu lambda`
    pub contraction: f64,
    /// `-1 / ln|1 - mu lambda|`, absent for divergent modes.
    pub tau_exact: Option<f64>,
    /// `1 / (mu lambda)`
    pub tau_approx: f64,
    pub divergent: bool,
}

/// Contraction factors and time constants of the modes of `R`, in descending eigenvalue order.
pub fn mean_error_modes(stats: &SecondOrderStats, mu: f64) -> Result<Vec<MeanErrorMode>> {
    if !(mu > 0.0) {
        return Err(LmsError::InvalidParameter(format!("mu must be positive (got {mu})")));
    }
    let eig = hermitian_eig(&stats.r)?;
    Ok(eig
        .values
        .iter()
        .map(|&lambda| {
            let contraction = 1.0 - mu * lambda;
            let divergent = contraction.abs() >= 1.0;
            let tau_exact = (!divergent).then(|| -1.0 / contraction.abs().ln());
            MeanErrorMode { eigenvalue: lambda, contraction, tau_exact, tau_approx: 1.0 / (mu * lambda), divergent }
        })
        .collect())
}

/// Step-size limits derived from the input statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepSizeReport {
    pub lambda_max: f64,
    pub trace_r: f64,
    /// `1 / tr(R)`
    pub mean_bound: f64,
    /// `2 / tr(R)`
    pub mse_bound: f64,
    /// Normalized time constants `1 / lambda_i`; the time constant at step
    /// size `mu` is approximately `time_constants[i] / mu`.
    pub time_constants: Vec<f64>,
    /// Approximate bound from the Case A or Case B closed form, when the
    /// statistics have that structure.
    pub case_bound: Option<f64>,
}

impl StepSizeReport {
    pub fn time_constants_at(&self, mu: f64) -> Vec<f64> {
        self.time_constants.iter().map(|t| t / mu).collect()
    }
}

pub fn step_bounds(stats: &SecondOrderStats) -> Result<StepSizeReport> {
    let eig = hermitian_eig(&stats.r)?;
    let trace_r: f64 = eig.values.iter().sum();
    if !(trace_r > 0.0) {
        return Err(LmsError::Degenerate(format!("trace of R is {trace_r}")));
    }
    let n = stats.filter_len() as f64;
    let case_bound = if let Some(a) = CaseAShape::detect(stats) {
        let lmax = a.circ_coeffs.iter().cloned().fold(0.0, f64::max);
        Some(2.0 / (a.sigma2 * (n + 1.0 + lmax * lmax)))
    } else {
        CaseBShape::detect(stats).map(|b| {
            let smax = b.sigmas2.iter().cloned().fold(0.0, f64::max);
            2.0 / (smax * (n + 1.0 + b.lambda * b.lambda))
        })
    };
    Ok(StepSizeReport {
        lambda_max: eig.values[0],
        trace_r,
        mean_bound: 1.0 / trace_r,
        mse_bound: 2.0 / trace_r,
        time_constants: eig.values.iter().map(|&l| 1.0 / l).collect(),
        case_bound,
    })
}

/// `R = sigma^2 I` with `Q^H C Q* = sigma^2 diag(lambda_i)` from a Takagi factorization of `C`.
#[derive(Debug, Clone)]
pub struct CaseAShape {
    pub sigma2: f64,
    pub circ_coeffs: Vec<f64>,
    pub basis: CplxMat,
}

impl CaseAShape {
    pub fn detect(stats: &SecondOrderStats) -> Option<Self> {
        let n = stats.filter_len();
        let sigma2 = stats.r.trace().re / n as f64;
        if !(sigma2 > 0.0) {
            return None;
        }
        let dev = (&stats.r - &CplxMat::scaled_identity(n, C64::new(sigma2, 0.0))).max_abs();
        if dev > SHAPE_TOL * stats.r.max_abs() {
            return None;
        }
        let t = takagi_factorize(&stats.c).ok()?;
        Some(Self { sigma2, circ_coeffs: t.sigma.iter().map(|s| s / sigma2).collect(), basis: t.vectors })
    }

    pub fn k_tilde(&self, k: &CplxVec) -> CplxVec {
        self.basis.adjoint().mul_vec(k)
    }
}

/// `R = U diag(sigma_i^2) U^H`, `C = lambda U diag(sigma_i^2) U^T`.
#[derive(Debug, Clone)]
pub struct CaseBShape {
    pub sigmas2: Vec<f64>,
    pub lambda: f64,
    pub basis: CplxMat,
}

impl CaseBShape {
    pub fn detect(stats: &SecondOrderStats) -> Option<Self> {
        let scale = stats.r.max_abs();
        if !(scale > 0.0) {
            return None;
        }
        let (sigmas2, lambda, basis) = if stats.c.max_abs() <= SHAPE_TOL * scale {
            let eig = hermitian_eig(&stats.r).ok()?;
            (eig.values, 0.0, eig.vectors)
        } else {
            // C C* = lambda^2 R^2 pins lambda; the Takagi vectors of C then diagonalize R.
            let cc = stats.c.trace_of_product(&stats.c.conj()).re;
            let rr = stats.r.trace_of_product(&stats.r).re;
            let lambda = (cc / rr).sqrt();
            let t = takagi_factorize(&stats.c).ok()?;
            (t.sigma.iter().map(|s| s / lambda).collect(), lambda, t.vectors)
        };
        let d = CplxMat::diag(&sigmas2.iter().map(|&s| C64::new(s, 0.0)).collect::<Vec<_>>());
        let r_fit = &(&basis * &d) * &basis.adjoint();
        let c_fit = (&(&basis * &d) * &basis.transpose()).scale_real(lambda);
        if (&r_fit - &stats.r).max_abs() > SHAPE_TOL * scale || (&c_fit - &stats.c).max_abs() > SHAPE_TOL * scale {
            return None;
        }
        Some(Self { sigmas2, lambda, basis })
    }

    pub fn k_tilde(&self, k: &CplxVec) -> CplxVec {
        self.basis.adjoint().mul_vec(k)
    }
}

/// Runs the MSE model recursion for `steps` updates from the deterministic start `w0`.
///
/// `V(0) = vbar(0) vbar(0)^H` with `vbar(0) = w0 - w_inf`.
pub fn model_trajectory(
    stats: &SecondOrderStats,
    wiener: &WienerQuantities,
    mu: f64,
    w0: &CplxVec,
    steps: usize,
    variant: ModelVariant,
) -> Result<TheoryTrajectory> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(LmsError::InvalidParameter(format!("mu must be positive (got {mu})")));
    }
    if steps == 0 {
        return Err(LmsError::InvalidParameter("steps must be at least 1".into()));
    }
    let n = stats.filter_len();
    if w0.len() != n {
        return Err(LmsError::Size(format!("w0 has {} taps, expected {n}", w0.len())));
    }
    let r = &stats.r;
    let c = &stats.c;
    let c_conj = c.conj();
    let k = match variant {
        ModelVariant::Proposed => wiener.k.clone(),
        ModelVariant::Independence => CplxVec::zeros(n),
    };
    let kk = k.outer(&k);
    let mu2 = mu * mu;

    let mut vbar = w0 - &wiener.w_inf;
    let mut v = vbar.outer(&vbar);
    let j0 = wiener.j_min + r.trace_of_product(&v).re;

    let mut traj = TheoryTrajectory {
        variant,
        j: vec![j0],
        vbar: vec![vbar.clone()],
        v: vec![v.clone()],
        diverged_at: None,
        max_hermitian_drift: 0.0,
    };

    for step in 1..=steps {
        let j_prev = *traj.j.last().expect("non-empty");
        let rv = r * &v;
        let vr = &v * r;
        let rvr = &rv * r;
        let cvc = &(c * &v.conj()) * &c_conj;
        // k vbar^T C*  and its Hermitian partner C vbar* k^H
        let kvc = &CplxMat::from_fn(n, n, |i, j| k[i] * vbar[j]) * &c_conj;
        let cvk = kvc.adjoint();

        let mut second = &(&(&r.scale_real(j_prev) + &rvr) + &kk) - &kvc;
        second = &(&second - &cvk) + &cvc;
        let first = &rv + &vr;
        let mut next = &(&v - &first.scale_real(mu)) + &second.scale_real(mu2);

        let scale = next.max_abs();
        if scale > 0.0 && scale.is_finite() {
            traj.max_hermitian_drift = traj.max_hermitian_drift.max(next.hermitian_defect() / scale);
        }
        next.symmetrize_hermitian();
        let vbar_next = &vbar - &r.mul_vec(&vbar).scale(C64::new(mu, 0.0));
        let j_next = wiener.j_min + r.trace_of_product(&next).re;

        if !j_next.is_finite() || j_next < 0.0 || !next.is_finite() {
            traj.diverged_at = Some(step);
            break;
        }
        v = next;
        vbar = vbar_next;
        traj.j.push(j_next);
        traj.vbar.push(vbar.clone());
        traj.v.push(v.clone());
    }
    Ok(traj)
}

/// Where a steady-state value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SteadyStateSource {
    GeneralFormula,
    CaseAClosedForm,
    CaseBClosedForm,
    RecursionLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyStateReport {
    pub j_min: f64,
    pub j_inf: f64,
    pub j_ex_inf: f64,
    /// `J_ex / J_min`; absent when `J_min = 0`.
    pub misadjustment: Option<f64>,
    /// `mu/2 (tr R + k^H k / J_min)`; absent when `J_min = 0`.
    pub misadjustment_small_mu: Option<f64>,
    pub source: SteadyStateSource,
}

impl SteadyStateReport {
    fn new(j_min: f64, j_ex_inf: f64, small_mu: Option<f64>, source: SteadyStateSource) -> Self {
        let misadjustment = (j_min > 0.0).then(|| j_ex_inf / j_min);
        Self { j_min, j_inf: j_min + j_ex_inf, j_ex_inf, misadjustment, misadjustment_small_mu: small_mu, source }
    }
}

fn small_mu_misadjustment(mu: f64, trace_r: f64, k_norm2: f64, j_min: f64) -> Option<f64> {
    (j_min > 0.0).then(|| 0.5 * mu * (trace_r + k_norm2 / j_min))
}

/// `J_ex = mu (J_min tr R + k^H k) / (2 - mu tr R)`.
///
/// This closed form keeps only the trace-level balance of the `V` recursion
/// and ignores the `R V R` and `C V* C*` contributions, so at large step
/// sizes it sits below the recursion limit.
pub fn steady_state_general(stats: &SecondOrderStats, wiener: &WienerQuantities, mu: f64) -> Result<SteadyStateReport> {
    let trace_r = stats.r.trace().re;
    if !(trace_r > 0.0) {
        return Err(LmsError::Degenerate(format!("trace of R is {trace_r}")));
    }
    let mu_max = 2.0 / trace_r;
    if !(mu > 0.0) || mu >= mu_max {
        return Err(LmsError::Unstable { mu, bound: mu_max });
    }
    let kk = wiener.k_norm2();
    let j_ex = mu * (wiener.j_min * trace_r + kk) / (2.0 - mu * trace_r);
    Ok(SteadyStateReport::new(
        wiener.j_min,
        j_ex,
        small_mu_misadjustment(mu, trace_r, kk, wiener.j_min),
        SteadyStateSource::GeneralFormula,
    ))
}

/// Shared evaluation of the Case A/B closed forms: mode `i` has power
/// `sigma2[i]` and circularity `lambda[i]`.
fn diagonal_closed_form(
    sigma2: &[f64],
    lambda: &[f64],
    k_tilde: &CplxVec,
    j_min: f64,
    mu: f64,
    bound: f64,
) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(LmsError::InvalidParameter(format!("mu must be positive (got {mu})")));
    }
    if sigma2.len() != k_tilde.len() || lambda.len() != k_tilde.len() {
        return Err(LmsError::Size("mode count mismatch".into()));
    }
    let mut numer = 0.0;
    let mut load = 0.0;
    for ((&s2, &l), kt) in sigma2.iter().zip(lambda).zip(k_tilde.iter()) {
        let den = 2.0 - mu * s2 * (1.0 + l * l);
        if den <= 0.0 {
            return Err(LmsError::Unstable { mu, bound });
        }
        numer += (j_min * s2 + kt.norm_sqr()) / den;
        load += mu * s2 / den;
    }
    let denom = 1.0 - load;
    if denom <= 0.0 {
        return Err(LmsError::Unstable { mu, bound });
    }
    Ok(mu * numer / denom)
}

/// Closed-form steady state for `R = sigma^2 I` (uncorrelated non-circular input).
pub fn case_a_steady_state(
    sigma2: f64,
    circ_coeffs: &[f64],
    k_tilde: &CplxVec,
    j_min: f64,
    mu: f64,
) -> Result<SteadyStateReport> {
    let n = circ_coeffs.len();
    let lmax = circ_coeffs.iter().cloned().fold(0.0, f64::max);
    let bound = 2.0 / (sigma2 * (n as f64 + 1.0 + lmax * lmax));
    let j_ex = diagonal_closed_form(&vec![sigma2; n], circ_coeffs, k_tilde, j_min, mu, bound)?;
    Ok(SteadyStateReport::new(
        j_min,
        j_ex,
        small_mu_misadjustment(mu, sigma2 * n as f64, k_tilde.norm_sqr(), j_min),
        SteadyStateSource::CaseAClosedForm,
    ))
}

/// Closed-form steady state for `R = U S^2 U^H`, `C = lambda U S^2 U^T`.
pub fn case_b_steady_state(
    sigmas2: &[f64],
    lambda: f64,
    k_tilde: &CplxVec,
    j_min: f64,
    mu: f64,
) -> Result<SteadyStateReport> {
    let n = sigmas2.len();
    let smax = sigmas2.iter().cloned().fold(0.0, f64::max);
    let bound = 2.0 / (smax * (n as f64 + 1.0 + lambda * lambda));
    let j_ex = diagonal_closed_form(sigmas2, &vec![lambda; n], k_tilde, j_min, mu, bound)?;
    Ok(SteadyStateReport::new(
        j_min,
        j_ex,
        small_mu_misadjustment(mu, sigmas2.iter().sum(), k_tilde.norm_sqr(), j_min),
        SteadyStateSource::CaseBClosedForm,
    ))
}

/// Case A closed form evaluated directly from the statistics, if they have that shape.
pub fn case_a_from_stats(stats: &SecondOrderStats, wiener: &WienerQuantities, mu: f64) -> Option<Result<SteadyStateReport>> {
    let shape = CaseAShape::detect(stats)?;
    Some(case_a_steady_state(shape.sigma2, &shape.circ_coeffs, &shape.k_tilde(&wiener.k), wiener.j_min, mu))
}

/// Case B closed form evaluated directly from the statistics, if they have that shape.
pub fn case_b_from_stats(stats: &SecondOrderStats, wiener: &WienerQuantities, mu: f64) -> Option<Result<SteadyStateReport>> {
    let shape = CaseBShape::detect(stats)?;
    Some(case_b_steady_state(&shape.sigmas2, shape.lambda, &shape.k_tilde(&wiener.k), wiener.j_min, mu))
}

/// Steady state read from the last value of a converged trajectory.
pub fn recursion_limit(traj: &TheoryTrajectory, stats: &SecondOrderStats, wiener: &WienerQuantities, mu: f64) -> Option<SteadyStateReport> {
    if traj.diverged() {
        return None;
    }
    let j_min = wiener.j_min;
    let kk = match traj.variant {
        ModelVariant::Proposed => wiener.k_norm2(),
        ModelVariant::Independence => 0.0,
    };
    Some(SteadyStateReport::new(
        j_min,
        traj.last() - j_min,
        small_mu_misadjustment(mu, stats.r.trace().re, kk, j_min),
        SteadyStateSource::RecursionLimit,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::ImproperWhiteSpec;
    use crate::statistics::{stats_equalization, stats_sysid, wiener_solution};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn s1_stats() -> SecondOrderStats {
        let f1 = CplxVec::new(vec![c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let g1 = CplxVec::new(vec![c(0.0, 0.5), c(0.5, 0.0), c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        stats_sysid(&f1, &g1, &ImproperWhiteSpec::new(0.1, 0.1, 0.0).unwrap(), 1e-3).unwrap()
    }

    fn s2_stats() -> SecondOrderStats {
        let f2 = CplxVec::new(vec![c(1.0, 0.0), c(0.0, 0.5), c(0.5, 0.0), c(-1.0, 0.0)]).unwrap();
        let g2 = CplxVec::new(vec![c(0.2, 0.0), c(0.0, 0.5), c(0.5, 0.0), c(0.0, -0.2)]).unwrap();
        stats_sysid(&f2, &g2, &ImproperWhiteSpec::new(0.1, 0.1, 0.8).unwrap(), 1e-3).unwrap()
    }

    #[test]
    fn mean_weights_fixed_point_and_zero_step() {
        let st = s1_stats();
        let w = wiener_solution(&st).unwrap();
        let traj = mean_weight_trajectory(&st, 0.7, &w.w_inf, 50).unwrap();
        assert!(traj.iter().all(|v| (v - &w.w_inf).norm() < 1e-14));
        let w0 = CplxVec::from_real(&[0.3, -0.2, 0.1, 0.0]);
        let frozen = mean_weight_trajectory(&st, 0.0, &w0, 10).unwrap();
        assert!(frozen.iter().all(|v| v == &w0));
    }

    #[test]
    fn mean_weights_converge_on_s1() {
        let st = s1_stats();
        let w = wiener_solution(&st).unwrap();
        let traj = mean_weight_trajectory(&st, 1.0, &CplxVec::zeros(4), 200).unwrap();
        assert!((traj.last().unwrap() - &w.w_inf).norm() < 1e-10);
        // (I - mu R)^n contraction at rate 0.8
        for (n, v) in traj.iter().enumerate().take(30) {
            let err = (v - &w.w_inf).norm();
            assert!((err - 0.8f64.powi(n as i32) * w.w_inf.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn modes_on_s1() {
        let modes = mean_error_modes(&s1_stats(), 1.0).unwrap();
        for m in &modes {
            assert!((m.contraction - 0.8).abs() < 1e-14);
            assert!((m.tau_exact.unwrap() - 1.0 / (1.0f64 / 0.8).ln()).abs() < 1e-12);
            assert!((m.tau_exact.unwrap() - 4.4814).abs() < 1e-4);
        }
    }

    #[test]
    fn modes_small_step_and_divergence() {
        let st = SecondOrderStats {
            r: CplxMat::identity(1),
            c: CplxMat::zeros(1, 1),
            p: CplxVec::from_real(&[1.0]),
            q: CplxVec::zeros(1),
            sigma_d2: 1.0,
            sigma_m2: 0.0,
        };
        let m = mean_error_modes(&st, 0.01).unwrap()[0];
        assert!((m.tau_approx - 100.0).abs() < 1e-12);
        assert!((m.tau_exact.unwrap() - (100.0 - 0.5)).abs() < 0.01);
        let d = mean_error_modes(&st, 2.0 + 1e-3).unwrap()[0];
        assert!(d.divergent && d.tau_exact.is_none());
    }

    #[test]
    fn bounds_s1_s2_and_unit() {
        let b1 = step_bounds(&s1_stats()).unwrap();
        assert!((b1.trace_r - 0.8).abs() < 1e-14);
        assert!((b1.mean_bound - 1.25).abs() < 1e-12);
        assert!((b1.mse_bound - 2.5).abs() < 1e-12);
        assert!((b1.case_bound.unwrap() - 2.0).abs() < 1e-12);

        let b2 = step_bounds(&s2_stats()).unwrap();
        assert!((b2.case_bound.unwrap() - 2.0 / (0.2 * 5.64)).abs() < 1e-9);
        assert!((b2.case_bound.unwrap() - 1.773).abs() < 1e-3);

        let unit = SecondOrderStats {
            r: CplxMat::identity(1),
            c: CplxMat::zeros(1, 1),
            p: CplxVec::zeros(1),
            q: CplxVec::zeros(1),
            sigma_d2: 0.0,
            sigma_m2: 0.0,
        };
        let b = step_bounds(&unit).unwrap();
        assert_eq!((b.mean_bound, b.mse_bound), (1.0, 2.0));
    }

    #[test]
    fn bounds_reject_zero_trace() {
        let zero = SecondOrderStats {
            r: CplxMat::zeros(2, 2),
            c: CplxMat::zeros(2, 2),
            p: CplxVec::zeros(2),
            q: CplxVec::zeros(2),
            sigma_d2: 0.0,
            sigma_m2: 0.0,
        };
        assert!(matches!(step_bounds(&zero), Err(LmsError::Degenerate(_))));
    }

    #[test]
    fn time_constants_ascending() {
        let taps = CplxVec::new(vec![c(0.3, 0.0), c(-0.5, 0.0), c(0.0, -0.7), c(1.0, 0.0)]).unwrap();
        let st = stats_equalization(&taps, 4, 1, 5, &ImproperWhiteSpec::new(0.1, 0.1, 1.0).unwrap(), 1e-2).unwrap();
        let b = step_bounds(&st).unwrap();
        assert!(b.time_constants.windows(2).all(|w| w[0] <= w[1]));
        assert!(b.case_bound.is_none());
    }

    #[test]
    fn s1_model_tails() {
        let st = s1_stats();
        let w = wiener_solution(&st).unwrap();
        let p = model_trajectory(&st, &w, 1.0, &CplxVec::zeros(4), 300, ModelVariant::Proposed).unwrap();
        let i = model_trajectory(&st, &w, 1.0, &CplxVec::zeros(4), 300, ModelVariant::Independence).unwrap();
        assert!((p.tail_mean(100).unwrap() - 0.3018).abs() < 5e-4);
        assert!((i.tail_mean(100).unwrap() - 0.2718).abs() < 5e-4);
        assert!(p.max_hermitian_drift <= 1e-10);
        assert!(p.j.iter().all(|&j| j >= w.j_min - 1e-12));
    }

    #[test]
    fn s2_model_tails() {
        let st = s2_stats();
        let w = wiener_solution(&st).unwrap();
        let p = model_trajectory(&st, &w, 1.0, &CplxVec::zeros(4), 300, ModelVariant::Proposed).unwrap();
        let i = model_trajectory(&st, &w, 1.0, &CplxVec::zeros(4), 300, ModelVariant::Independence).unwrap();
        assert!((p.last() - 0.08544).abs() < 5e-4, "{}", p.last());
        assert!((i.last() - 0.08204).abs() < 5e-4, "{}", i.last());
    }

    #[test]
    fn models_coincide_without_k() {
        let f = CplxVec::new(vec![c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let st = stats_sysid(&f, &CplxVec::zeros(4), &ImproperWhiteSpec::new(0.1, 0.1, 0.0).unwrap(), 1e-3).unwrap();
        let w = wiener_solution(&st).unwrap();
        let p = model_trajectory(&st, &w, 1.0, &CplxVec::zeros(4), 200, ModelVariant::Proposed).unwrap();
        let i = model_trajectory(&st, &w, 1.0, &CplxVec::zeros(4), 200, ModelVariant::Independence).unwrap();
        for (a, b) in p.j.iter().zip(&i.j) {
            assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn divergence_is_flagged() {
        let st = s1_stats();
        let w = wiener_solution(&st).unwrap();
        let t = model_trajectory(&st, &w, 4.0, &CplxVec::zeros(4), 5000, ModelVariant::Proposed).unwrap();
        assert!(t.diverged());
        assert!(t.j.iter().all(|j| j.is_finite()));
    }

    #[test]
    fn general_formula_s1() {
        let st = s1_stats();
        let w = wiener_solution(&st).unwrap();
        let r = steady_state_general(&st, &w, 1.0).unwrap();
        let expected = 0.151 * (1.0 + 0.8 / 1.2) + 0.03 / 1.2;
        assert!((r.j_inf - expected).abs() < 1e-12);
        assert!((r.j_inf - 0.2767).abs() < 1e-4);
        assert!((r.j_inf - (r.j_min + r.j_ex_inf)).abs() < 1e-12);
        assert!((r.misadjustment.unwrap() - r.j_ex_inf / r.j_min).abs() < 1e-12);
        assert!(matches!(steady_state_general(&st, &w, 2.5), Err(LmsError::Unstable { .. })));
    }

    #[test]
    fn general_formula_small_step_limit() {
        let f = CplxVec::from_real(&[1.0, -0.5, 0.25]);
        let st = stats_sysid(&f, &CplxVec::zeros(3), &ImproperWhiteSpec::proper(0.5), 0.1).unwrap();
        let w = wiener_solution(&st).unwrap();
        let tr = st.r.trace().re;
        for mu in [1e-3, 1e-4, 1e-5] {
            let r = steady_state_general(&st, &w, mu).unwrap();
            let first_order = 0.5 * mu * w.j_min * tr;
            assert!((r.j_ex_inf - first_order).abs() / first_order < 2.0 * mu * tr);
        }
    }

    #[test]
    fn case_a_hand_values() {
        let kt = CplxVec::new(vec![c(0.0, 0.1), c(0.1, 0.0), c(0.0, 0.0), c(0.1, 0.0)]).unwrap();
        let r = case_a_steady_state(0.2, &[0.0; 4], &kt, 0.151, 1.0).unwrap();
        assert!((r.j_ex_inf - 0.1508).abs() < 1e-12);
        assert!((r.j_inf - 0.3018).abs() < 1e-12);
        let r0 = case_a_steady_state(0.2, &[0.0; 4], &CplxVec::zeros(4), 0.151, 1.0).unwrap();
        assert!((r0.j_ex_inf - 0.1208).abs() < 1e-12);
        assert!((r0.j_inf - 0.2718).abs() < 1e-12);
    }

    #[test]
    fn case_a_scalar() {
        let (s2, jmin) = (0.5, 0.2);
        for mu in [0.1, 0.5, 1.0, 1.9] {
            let r = case_a_steady_state(s2, &[0.0], &CplxVec::zeros(1), jmin, mu).unwrap();
            assert!((r.j_ex_inf - mu * s2 * jmin / (2.0 - 2.0 * mu * s2)).abs() < 1e-12);
        }
        assert!(matches!(
            case_a_steady_state(s2, &[0.0], &CplxVec::zeros(1), jmin, 2.0),
            Err(LmsError::Unstable { .. })
        ));
    }

    #[test]
    fn case_b_uniform_reduces_to_case_a() {
        let kt = CplxVec::new(vec![c(0.05, 0.02), c(-0.1, 0.0), c(0.0, 0.03)]).unwrap();
        let a = case_a_steady_state(0.3, &[0.6; 3], &kt, 0.1, 0.5).unwrap();
        let b = case_b_steady_state(&[0.3; 3], 0.6, &kt, 0.1, 0.5).unwrap();
        assert!((a.j_ex_inf - b.j_ex_inf).abs() < 1e-15);
    }

    #[test]
    fn case_b_proper_special_case() {
        let s = [0.1, 0.3, 0.45];
        let (jmin, mu) = (0.2, 0.4);
        let r = case_b_steady_state(&s, 0.0, &CplxVec::zeros(3), jmin, mu).unwrap();
        let num: f64 = s.iter().map(|x| jmin * x / (2.0 - mu * x)).sum();
        let den: f64 = 1.0 - s.iter().map(|x| mu * x / (2.0 - mu * x)).sum::<f64>();
        assert!((r.j_ex_inf - mu * num / den).abs() < 1e-14);
    }

    #[test]
    fn shapes_detected_for_sysid() {
        let a = CaseAShape::detect(&s2_stats()).unwrap();
        assert!((a.sigma2 - 0.2).abs() < 1e-14);
        assert!(a.circ_coeffs.iter().all(|l| (l - 0.8).abs() < 1e-12));
        let b = CaseBShape::detect(&s2_stats()).unwrap();
        assert!((b.lambda - 0.8).abs() < 1e-12);
        assert!(b.sigmas2.iter().all(|s| (s - 0.2).abs() < 1e-12));
    }

    #[test]
    fn case_a_s2_matches_recursion() {
        let st = s2_stats();
        let w = wiener_solution(&st).unwrap();
        let ss = case_a_from_stats(&st, &w, 1.0).unwrap().unwrap();
        let t = model_trajectory(&st, &w, 1.0, &CplxVec::zeros(4), 400, ModelVariant::Proposed).unwrap();
        assert!((ss.j_inf - t.last()).abs() / t.last() < 1e-6);
    }
}
