//! Browser bindings for the interactive demo page.
//!
//! Every entry point takes a JSON experiment config (the same format the CLI
//! reads) and returns a JSON string. The plain `*_json` functions hold the
//! logic so they can be tested natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use improper_lms::experiment::{parse_config, run_experiment, ExperimentConfig, ModelOutcome, PRESETS};
use improper_lms::statistics::{stats_for, wiener_solution};
use improper_lms::theory::{model_trajectory, step_bounds, steady_state_general, ModelVariant};

/// Longest model recursion used when sweeping the step size.
const SWEEP_MAX_STEPS: usize = 20_000;

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() { json!(x) } else { Value::Null }
}

fn with_overrides(config: &str, mu: Option<f64>, runs: Option<usize>, seed: Option<u64>) -> Result<ExperimentConfig, String> {
    let mut cfg = parse_config(config).map_err(|e| e.to_string())?;
    if let Some(mu) = mu {
        if mu <= 0.0 || !mu.is_finite() {
            return Err(format!("step size must be positive, got {mu}"));
        }
        cfg.mu = mu;
    }
    if let Some(r) = runs {
        cfg.runs = r.max(1);
    }
    if let Some(s) = seed {
        cfg.base_seed = s;
    }
    Ok(cfg)
}

/// Shipped presets as `[{name, description, config}]`.
pub fn presets_json() -> String {
    let list: Vec<Value> = PRESETS
        .iter()
        .map(|(name, text)| {
            let description = parse_config(text).ok().and_then(|c| c.description).unwrap_or_default();
            json!({ "name": name, "description": description, "config": text })
        })
        .collect();
    Value::Array(list).to_string()
}

/// Proposed and independence MSE curves plus the step-size report.
pub fn theory_curves_json(config: &str, mu: f64) -> Result<String, String> {
    let cfg = with_overrides(config, Some(mu), None, None)?;
    let stats = stats_for(&cfg.scenario).map_err(|e| e.to_string())?;
    let wiener = wiener_solution(&stats).map_err(|e| e.to_string())?;
    let bounds = step_bounds(&stats).map_err(|e| e.to_string())?;
    let curve = |variant| -> Result<Vec<Value>, String> {
        let t = model_trajectory(&stats, &wiener, cfg.mu, &cfg.w0, cfg.steps, variant).map_err(|e| e.to_string())?;
        Ok(t.j.iter().map(|&v| finite_or_null(v)).collect())
    };
    Ok(json!({
        "mu": cfg.mu,
        "j_min": wiener.j_min,
        "k_norm2": wiener.k_norm2(),
        "trace_r": bounds.trace_r,
        "lambda_max": bounds.lambda_max,
        "mean_bound": bounds.mean_bound,
        "mse_bound": bounds.mse_bound,
        "proposed": curve(ModelVariant::Proposed)?,
        "independence": curve(ModelVariant::Independence)?,
    })
    .to_string())
}

/// Monte Carlo ensemble with the model comparison for the config's models.
pub fn simulate_json(config: &str, mu: f64, runs: usize, seed: u64) -> Result<String, String> {
    let cfg = with_overrides(config, Some(mu), Some(runs), Some(seed))?;
    let res = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let rep = &res.report;
    let rows: Vec<Value> = rep
        .rows
        .iter()
        .map(|r| {
            let (value, status) = match &r.outcome {
                ModelOutcome::Value(v) => (finite_or_null(*v), "ok".to_string()),
                ModelOutcome::NotApplicable(why) => (Value::Null, format!("not applicable: {why}")),
                ModelOutcome::Unstable { bound } => (Value::Null, format!("unstable above mu = {bound:.4}")),
            };
            json!({ "model": r.model.name(), "value": value, "rel_err_pct": r.rel_err_pct, "status": status })
        })
        .collect();
    let curve = &res.ensemble.curve;
    Ok(json!({
        "mc": curve.mean_sq_error.iter().map(|&v| finite_or_null(v)).collect::<Vec<_>>(),
        "mc_stderr": curve.stderr.iter().map(|&v| finite_or_null(v)).collect::<Vec<_>>(),
        "runs": curve.runs,
        "diverged_runs": curve.diverged_runs,
        "tail_from": cfg.tail_from,
        "mc_tail": rep.mc_tail,
        "mc_tail_stderr": rep.mc_tail_stderr,
        "j_min": rep.j_min,
        "k_norm2": rep.k_norm2,
        "models": rows,
    })
    .to_string())
}

/// Steady-state MSE of both recursions and the general formula over
/// `points` step sizes spread evenly over `(0, mu_max)`.
pub fn steady_state_sweep_json(config: &str, points: usize) -> Result<String, String> {
    let cfg = with_overrides(config, None, None, None)?;
    let stats = stats_for(&cfg.scenario).map_err(|e| e.to_string())?;
    let wiener = wiener_solution(&stats).map_err(|e| e.to_string())?;
    let bounds = step_bounds(&stats).map_err(|e| e.to_string())?;
    let lambda_min = bounds.time_constants.iter().cloned().fold(0.0, f64::max).recip();
    let points = points.clamp(2, 200);
    let mut mus = Vec::with_capacity(points);
    let mut proposed = Vec::with_capacity(points);
    let mut independence = Vec::with_capacity(points);
    let mut general = Vec::with_capacity(points);
    for i in 1..=points {
        let mu = bounds.mse_bound * i as f64 / (points + 1) as f64;
        // long enough for the slowest mean mode to settle
        let steps = ((30.0 / (mu * lambda_min)).ceil() as usize).clamp(cfg.steps, SWEEP_MAX_STEPS);
        let tail = |variant| {
            model_trajectory(&stats, &wiener, mu, &cfg.w0, steps, variant)
                .ok()
                .filter(|t| !t.diverged())
                .map_or(Value::Null, |t| finite_or_null(t.last()))
        };
        mus.push(mu);
        proposed.push(tail(ModelVariant::Proposed));
        independence.push(tail(ModelVariant::Independence));
        general.push(steady_state_general(&stats, &wiener, mu).map_or(Value::Null, |r| finite_or_null(r.j_inf)));
    }
    Ok(json!({
        "mu": mus,
        "proposed": proposed,
        "independence": independence,
        "general": general,
        "j_min": wiener.j_min,
        "mse_bound": bounds.mse_bound,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn presets() -> String {
    presets_json()
}

#[wasm_bindgen]
pub fn theory_curves(config: &str, mu: f64) -> Result<String, JsValue> {
    theory_curves_json(config, mu).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn simulate(config: &str, mu: f64, runs: usize, seed: u64) -> Result<String, JsValue> {
    simulate_json(config, mu, runs, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn steady_state_sweep(config: &str, points: usize) -> Result<String, JsValue> {
    steady_state_sweep_json(config, points).map_err(|e| JsValue::from_str(&e))
}
