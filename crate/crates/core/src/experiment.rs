//! Experiment configuration, orchestration and CSV output.
//!
//! A config is a JSON document:
//!
//! ```json
//! {
//!   "description": "optional free text",
//!   "scenario": {
//!     "kind": "sysid_wl",
//!     "input": { "r_uu": 0.1, "r_vv": 0.1, "rho_uv": 0.0 },
//!     "noise_var": 0.001,
//!     "f": [[1, 0], [0, 1], [1, 0], [0, 1]],
//!     "g": [[0, 0.5], [0.5, 0], [0, 0], [0.5, 0]]
//!   },
//!   "mu": 1.0, "steps": 150, "runs": 10000, "base_seed": 1,
//!   "tail_from": 100, "outputs": "fig2",
//!   "models": ["proposed", "independence", "case_a", "case_b", "general_steady_state"]
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs or plain reals. Channel equalization
//! uses `"kind": "channel_eq"` with `channel_taps`, `delay`, `filter_len` and
//! an optional `latency` (default 0).

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LmsError, Result};
use crate::numerics::{CplxVec, C64};
use crate::signals::{ImproperWhiteSpec, Plant, ScenarioSpec};
use crate::simulator::{monte_carlo, tail_estimate, EnsembleResult};
use crate::statistics::{stats_for, wiener_solution, SecondOrderStats, WienerQuantities};
use crate::theory::{
    case_a_from_stats, case_b_from_stats, model_trajectory, step_bounds, steady_state_general, ModelVariant,
    StepSizeReport, TheoryTrajectory,
};

/// Models a run can compare against the Monte Carlo curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Proposed,
    Independence,
    CaseA,
    CaseB,
    GeneralSteadyState,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] =
        [Self::Proposed, Self::Independence, Self::CaseA, Self::CaseB, Self::GeneralSteadyState];

    pub fn name(self) -> &'static str {
        match self {
            Self::Proposed => "proposed",
            Self::Independence => "independence",
            Self::CaseA => "case_a",
            Self::CaseB => "case_b",
            Self::GeneralSteadyState => "general_steady_state",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s.trim())
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub description: Option<String>,
    pub scenario: ScenarioSpec,
    pub mu: f64,
    pub steps: usize,
    pub runs: usize,
    pub base_seed: u64,
    /// First curve index of the steady-state window.
    pub tail_from: usize,
    /// Output path prefix.
    pub outputs: String,
    pub models: Vec<ModelKind>,
    pub w0: CplxVec,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexJson {
    Real(f64),
    Pair([f64; 2]),
}

impl From<&ComplexJson> for C64 {
    fn from(z: &ComplexJson) -> C64 {
        match *z {
            ComplexJson::Real(re) => C64::new(re, 0.0),
            ComplexJson::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum ScenarioKind {
    SysidWl,
    ChannelEq,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    kind: ScenarioKind,
    input: ImproperWhiteSpec,
    noise_var: f64,
    filter_len: Option<usize>,
    f: Option<Vec<ComplexJson>>,
    g: Option<Vec<ComplexJson>>,
    channel_taps: Option<Vec<ComplexJson>>,
    delay: Option<usize>,
    latency: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    description: Option<String>,
    scenario: RawScenario,
    mu: f64,
    steps: usize,
    runs: usize,
    #[serde(alias = "seed")]
    base_seed: u64,
    tail_from: Option<usize>,
    outputs: Option<String>,
    models: Option<Vec<ModelKind>>,
    w0: Option<Vec<ComplexJson>>,
}

fn config_err(path: &str, message: impl Into<String>) -> LmsError {
    LmsError::Config { path: path.into(), message: message.into() }
}

fn complex_vec(path: &str, values: &[ComplexJson]) -> Result<CplxVec> {
    CplxVec::new(values.iter().map(C64::from).collect()).map_err(|e| config_err(path, e.to_string()))
}

fn required<T>(path: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| config_err(path, "missing field"))
}

fn forbid<T>(path: &str, v: &Option<T>, kind: &str) -> Result<()> {
    match v {
        Some(_) => Err(config_err(path, format!("not allowed for kind `{kind}`"))),
        None => Ok(()),
    }
}

impl RawScenario {
    fn into_spec(self) -> Result<ScenarioSpec> {
        self.input.validate().map_err(|e| config_err("scenario.input", e.to_string()))?;
        if !(self.noise_var >= 0.0) || !self.noise_var.is_finite() {
            return Err(config_err("scenario.noise_var", "must be finite and >= 0"));
        }
        let spec = match self.kind {
            ScenarioKind::SysidWl => {
                forbid("scenario.channel_taps", &self.channel_taps, "sysid_wl")?;
                forbid("scenario.delay", &self.delay, "sysid_wl")?;
                forbid("scenario.latency", &self.latency, "sysid_wl")?;
                let f = complex_vec("scenario.f", &required("scenario.f", self.f)?)?;
                let g = complex_vec("scenario.g", &required("scenario.g", self.g)?)?;
                if g.len() != f.len() {
                    return Err(config_err("scenario.g", format!("expected {} taps to match f, got {}", f.len(), g.len())));
                }
                if let Some(n) = self.filter_len {
                    if n != f.len() {
                        return Err(config_err("scenario.filter_len", format!("{n} disagrees with |f| = {}", f.len())));
                    }
                }
                ScenarioSpec { filter_len: f.len(), plant: Plant::SysIdWl { f, g }, input: self.input, noise_var: self.noise_var }
            }
            ScenarioKind::ChannelEq => {
                forbid("scenario.f", &self.f, "channel_eq")?;
                forbid("scenario.g", &self.g, "channel_eq")?;
                let taps = complex_vec("scenario.channel_taps", &required("scenario.channel_taps", self.channel_taps)?)?;
                let filter_len = required("scenario.filter_len", self.filter_len)?;
                if filter_len == 0 {
                    return Err(config_err("scenario.filter_len", "must be at least 1"));
                }
                let delay = required("scenario.delay", self.delay)?;
                let latency = self.latency.unwrap_or(0);
                let limit = filter_len + taps.len() + latency;
                if delay >= limit {
                    return Err(config_err("scenario.delay", format!("must be below {limit}")));
                }
                ScenarioSpec {
                    plant: Plant::ChannelEq { channel_taps: taps, delay, latency },
                    input: self.input,
                    noise_var: self.noise_var,
                    filter_len,
                }
            }
        };
        spec.validate().map_err(|e| config_err("scenario", e.to_string()))?;
        Ok(spec)
    }
}

/// Parses and validates a JSON experiment config, filling defaults
/// (`w0 = 0`, `tail_from = 2 steps / 3`, all models, `outputs = "experiment"`).
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        config_err(&path, e.into_inner().to_string())
    })?;
    let scenario = raw.scenario.into_spec()?;
    if !(raw.mu > 0.0) || !raw.mu.is_finite() {
        return Err(config_err("mu", format!("must be positive (got {})", raw.mu)));
    }
    if raw.runs == 0 {
        return Err(config_err("runs", "must be at least 1"));
    }
    if raw.steps < scenario.filter_len {
        return Err(config_err("steps", format!("must be at least filter_len = {}", scenario.filter_len)));
    }
    let tail_from = raw.tail_from.unwrap_or(2 * raw.steps / 3);
    if tail_from >= raw.steps {
        return Err(config_err("tail_from", format!("must be below steps = {}", raw.steps)));
    }
    let w0 = match raw.w0 {
        Some(v) => {
            let w = complex_vec("w0", &v)?;
            if w.len() != scenario.filter_len {
                return Err(config_err("w0", format!("expected {} taps, got {}", scenario.filter_len, w.len())));
            }
            w
        }
        None => CplxVec::zeros(scenario.filter_len),
    };
    let mut models = raw.models.unwrap_or_else(|| ModelKind::ALL.to_vec());
    let mut seen = Vec::new();
    models.retain(|m| {
        let fresh = !seen.contains(m);
        seen.push(*m);
        fresh
    });
    Ok(ExperimentConfig {
        description: raw.description,
        scenario,
        mu: raw.mu,
        steps: raw.steps,
        runs: raw.runs,
        base_seed: raw.base_seed,
        tail_from,
        outputs: raw.outputs.unwrap_or_else(|| "experiment".into()),
        models,
        w0,
    })
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| LmsError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_config(&text)
}

/// Presets reproducing the published figures, as `(name, json)`.
pub const PRESETS: [(&str, &str); 3] = [
    ("fig2", include_str!("../presets/fig2.json")),
    ("fig3", include_str!("../presets/fig3.json")),
    ("fig4", include_str!("../presets/fig4.json")),
];

pub fn preset(name: &str) -> Option<Result<ExperimentConfig>> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| parse_config(text))
}

/// Outcome of one model in the comparison.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelOutcome {
    Value(f64),
    NotApplicable(String),
    /// Step size outside the model's stability region.
    Unstable { bound: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelRow {
    pub model: ModelKind,
    pub outcome: ModelOutcome,
    /// `100 (prediction - mc) / mc`.
    pub rel_err_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub mc_tail: f64,
    pub mc_tail_stderr: f64,
    /// Single ensemble-average sample at iteration `tail_from`.
    pub mc_sample: f64,
    pub rows: Vec<ModelRow>,
    pub j_min: f64,
    pub k_norm2: f64,
    pub mu: f64,
    pub bounds: StepSizeReport,
}

impl ComparisonReport {
    pub fn row(&self, model: ModelKind) -> Option<&ModelRow> {
        self.rows.iter().find(|r| r.model == model)
    }

    pub fn value(&self, model: ModelKind) -> Option<f64> {
        match self.row(model)?.outcome {
            ModelOutcome::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn rel_err(&self, model: ModelKind) -> Option<f64> {
        self.row(model)?.rel_err_pct
    }

    pub fn has_inapplicable(&self) -> bool {
        self.rows.iter().any(|r| matches!(r.outcome, ModelOutcome::NotApplicable(_)))
    }

    pub fn has_unstable(&self) -> bool {
        self.rows.iter().any(|r| matches!(r.outcome, ModelOutcome::Unstable { .. }))
    }
}

/// Everything produced by one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentResults {
    pub config: ExperimentConfig,
    pub stats: SecondOrderStats,
    pub wiener: WienerQuantities,
    pub ensemble: EnsembleResult,
    pub trajectories: Vec<TheoryTrajectory>,
    pub report: ComparisonReport,
}

impl ExperimentResults {
    pub fn trajectory(&self, variant: ModelVariant) -> Option<&TheoryTrajectory> {
        self.trajectories.iter().find(|t| t.variant == variant)
    }
}

fn rel_err(pred: f64, mc: f64) -> f64 {
    100.0 * (pred - mc) / mc
}

/// Runs the Monte Carlo ensemble and every requested model.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResults> {
    let stats = stats_for(&config.scenario)?;
    let wiener = wiener_solution(&stats)?;
    let bounds = step_bounds(&stats)?;
    let ensemble = monte_carlo(&config.scenario, config.mu, config.steps, config.runs, config.base_seed, &config.w0)?;
    let (mc_tail, mc_tail_stderr) = tail_estimate(&ensemble.curve, config.tail_from)?;
    let mc_sample = ensemble.curve.mean_sq_error[config.tail_from.saturating_sub(1)];

    let mut trajectories = Vec::new();
    let mut rows = Vec::new();
    for &model in &config.models {
        let outcome = match model {
            ModelKind::Proposed | ModelKind::Independence => {
                let variant =
                    if model == ModelKind::Proposed { ModelVariant::Proposed } else { ModelVariant::Independence };
                let traj = model_trajectory(&stats, &wiener, config.mu, &config.w0, config.steps, variant)?;
                let outcome = if traj.diverged() {
                    ModelOutcome::Unstable { bound: bounds.mse_bound }
                } else {
                    ModelOutcome::Value(traj.last())
                };
                trajectories.push(traj);
                outcome
            }
            ModelKind::CaseA => closed_form_outcome(case_a_from_stats(&stats, &wiener, config.mu), "R is not a multiple of I")?,
            ModelKind::CaseB => {
                closed_form_outcome(case_b_from_stats(&stats, &wiener, config.mu), "R and C do not share the SUT structure")?
            }
            ModelKind::GeneralSteadyState => match steady_state_general(&stats, &wiener, config.mu) {
                Ok(r) => ModelOutcome::Value(r.j_inf),
                Err(LmsError::Unstable { bound, .. }) => ModelOutcome::Unstable { bound },
                Err(e) => return Err(e),
            },
        };
        let rel_err_pct = match outcome {
            ModelOutcome::Value(v) => Some(rel_err(v, mc_tail)),
            _ => None,
        };
        rows.push(ModelRow { model, outcome, rel_err_pct });
    }

    let report = ComparisonReport {
        mc_tail,
        mc_tail_stderr,
        mc_sample,
        rows,
        j_min: wiener.j_min,
        k_norm2: wiener.k_norm2(),
        mu: config.mu,
        bounds,
    };
    Ok(ExperimentResults { config: config.clone(), stats, wiener, ensemble, trajectories, report })
}

fn closed_form_outcome(
    res: Option<Result<crate::theory::SteadyStateReport>>,
    reason: &str,
) -> Result<ModelOutcome> {
    Ok(match res {
        None => ModelOutcome::NotApplicable(reason.into()),
        Some(Ok(r)) => ModelOutcome::Value(r.j_inf),
        Some(Err(LmsError::Unstable { bound, .. })) => ModelOutcome::Unstable { bound },
        Some(Err(e)) => return Err(e),
    })
}

/// Formats a value with six significant digits in plain decimal notation
/// where that is short, otherwise in scientific notation.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("valid float");
    let a = rounded.abs();
    if (1e-4..1e7).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

pub const CURVES_SUFFIX: &str = "_curves.csv";
pub const REPORT_SUFFIX: &str = "_report.csv";

/// Renders `curves.csv`.
pub fn curves_csv(results: &ExperimentResults) -> String {
    let curve = &results.ensemble.curve;
    let proposed = results.trajectory(ModelVariant::Proposed);
    let independence = results.trajectory(ModelVariant::Independence);
    let mut header = vec!["iter", "mc_mse", "mc_stderr"];
    if proposed.is_some() {
        header.push("proposed_mse");
    }
    if independence.is_some() {
        header.push("independence_mse");
    }
    header.push("j_min");
    let mut out = header.join(",");
    out.push('\n');
    let j_min = format_sig6(results.wiener.j_min);
    let cell = |t: Option<&TheoryTrajectory>, i: usize| t.and_then(|t| t.j.get(i)).map_or(String::new(), |v| format_sig6(*v));
    for i in 0..curve.len() {
        let mut row = vec![(i + 1).to_string(), format_sig6(curve.mean_sq_error[i]), format_sig6(curve.stderr[i])];
        if proposed.is_some() {
            row.push(cell(proposed, i));
        }
        if independence.is_some() {
            row.push(cell(independence, i));
        }
        row.push(j_min.clone());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Renders `report.csv`.
pub fn report_csv(results: &ExperimentResults) -> String {
    let rep = &results.report;
    let tail = [
        format_sig6(rep.k_norm2),
        format_sig6(rep.j_min),
        format_sig6(rep.mu),
        format_sig6(rep.bounds.mse_bound),
        format_sig6(rep.bounds.trace_r),
        format_sig6(rep.bounds.lambda_max),
    ]
    .join(",");
    let mut out = String::from("model,steady_state,rel_err_pct,k_norm2,j_min,mu,mu_max,trace_r,lambda_max\n");
    out.push_str(&format!("monte_carlo,{},0,{tail}\n", format_sig6(rep.mc_tail)));
    out.push_str(&format!(
        "monte_carlo_sample,{},{},{tail}\n",
        format_sig6(rep.mc_sample),
        format_sig6(rel_err(rep.mc_sample, rep.mc_tail))
    ));
    for row in &rep.rows {
        let (value, err) = match &row.outcome {
            ModelOutcome::Value(v) => (format_sig6(*v), row.rel_err_pct.map(format_sig6).unwrap_or_default()),
            ModelOutcome::NotApplicable(_) => ("not_applicable".to_string(), String::new()),
            ModelOutcome::Unstable { .. } => ("unstable".to_string(), String::new()),
        };
        out.push_str(&format!("{},{value},{err},{tail}\n", row.model));
    }
    out
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err = |e: std::io::Error| LmsError::Io { path: path.display().to_string(), message: e.to_string() };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut file = fs::File::create(&tmp).map_err(io_err)?;
    file.write_all(contents.as_bytes()).map_err(io_err)?;
    file.sync_all().map_err(io_err)?;
    drop(file);
    fs::rename(&tmp, path).map_err(io_err)
}

/// Writes `<prefix>_curves.csv` and `<prefix>_report.csv`; returns their paths.
pub fn emit_csv(results: &ExperimentResults, prefix: &str) -> Result<(PathBuf, PathBuf)> {
    let curves = PathBuf::from(format!("{prefix}{CURVES_SUFFIX}"));
    let report = PathBuf::from(format!("{prefix}{REPORT_SUFFIX}"));
    if let Some(dir) = curves.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| LmsError::Io { path: dir.display().to_string(), message: e.to_string() })?;
    }
    write_atomic(&curves, &curves_csv(results))?;
    write_atomic(&report, &report_csv(results))?;
    Ok((curves, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "scenario": {
            "kind": "sysid_wl",
            "input": {"r_uu": 0.1, "r_vv": 0.1, "rho_uv": 0.0},
            "noise_var": 0.001,
            "f": [1, [0, 1], 1, [0, 1]],
            "g": [[0, 0.5], 0.5, 0, 0.5]
        },
        "mu": 1.0, "steps": 150, "runs": 100, "seed": 3
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.tail_from, 100);
        assert_eq!(cfg.w0, CplxVec::zeros(4));
        assert_eq!(cfg.models, ModelKind::ALL.to_vec());
        assert_eq!(cfg.base_seed, 3);
        assert_eq!(cfg.scenario.filter_len, 4);
    }

    #[test]
    fn rejects_nonpositive_step() {
        let text = MINIMAL.replace("\"mu\": 1.0", "\"mu\": 0.0");
        match parse_config(&text) {
            Err(LmsError::Config { path, .. }) => assert_eq!(path, "mu"),
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace("\"mu\": 1.0", "\"mu\": -0.5");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn unknown_keys_report_their_path() {
        let text = MINIMAL.replace("\"noise_var\"", "\"bogus\": 1, \"noise_var\"");
        match parse_config(&text) {
            Err(LmsError::Config { path, message }) => {
                assert!(path.starts_with("scenario"), "{path}");
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace("\"mu\": 1.0", "\"mu\": \"fast\"");
        match parse_config(&text) {
            Err(LmsError::Config { path, .. }) => assert_eq!(path, "mu"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invariant_violations() {
        let bad_tail = MINIMAL.replace("\"seed\": 3", "\"seed\": 3, \"tail_from\": 150");
        assert!(matches!(parse_config(&bad_tail), Err(LmsError::Config { path, .. }) if path == "tail_from"));
        let no_runs = MINIMAL.replace("\"runs\": 100", "\"runs\": 0");
        assert!(matches!(parse_config(&no_runs), Err(LmsError::Config { path, .. }) if path == "runs"));
        let short_g = MINIMAL.replace("\"g\": [[0, 0.5], 0.5, 0, 0.5]", "\"g\": [0, 0]");
        assert!(matches!(parse_config(&short_g), Err(LmsError::Config { path, .. }) if path == "scenario.g"));
        let rho = MINIMAL.replace("\"rho_uv\": 0.0", "\"rho_uv\": 2.0");
        assert!(matches!(parse_config(&rho), Err(LmsError::Config { path, .. }) if path == "scenario.input"));
    }

    #[test]
    fn fig2_preset_parameters() {
        let cfg = preset("fig2").unwrap().unwrap();
        let Plant::SysIdWl { f, g } = &cfg.scenario.plant else { panic!("fig2 is system identification") };
        let c = C64::new;
        assert_eq!(f.as_slice(), &[c(1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(g.as_slice(), &[c(0.0, 0.5), c(0.5, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert_eq!(cfg.mu, 1.0);
        assert_eq!(cfg.scenario.noise_var, 1e-3);
        assert_eq!(cfg.scenario.input, ImproperWhiteSpec { r_uu: 0.1, r_vv: 0.1, rho_uv: 0.0 });
    }

    #[test]
    fn all_presets_parse() {
        for (name, _) in PRESETS {
            preset(name).unwrap().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(0.30180000000001), "0.3018");
        assert_eq!(format_sig6(0.123456789), "0.123457");
        assert_eq!(format_sig6(150.0), "150");
        assert_eq!(format_sig6(1.234567e-7), "1.23457e-7");
        assert_eq!(format_sig6(0.0), "0");
    }

    #[test]
    fn channel_config_requires_delay() {
        let text = r#"{
            "scenario": {"kind": "channel_eq", "input": {"r_uu": 0.1, "r_vv": 0.1, "rho_uv": 1.0},
                         "noise_var": 0.01, "filter_len": 5, "channel_taps": [0.3, -0.5, [0, -0.7], 1]},
            "mu": 0.2, "steps": 300, "runs": 10, "base_seed": 1
        }"#;
        assert!(matches!(parse_config(text), Err(LmsError::Config { path, .. }) if path == "scenario.delay"));
    }
}
