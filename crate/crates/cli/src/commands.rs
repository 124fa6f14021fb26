//! The five subcommands, sharing the scan → minima → filter pipeline.

use serde_json::{json, Value};

use specgap::distfun::{format_float, hat_f, local_minima, scan as sweep, ScanResult};
use specgap::enclosure::{enclose as run_enclosure, filter_candidates};
use specgap::lehmann::{equivalence_check, tau_extremes};
use specgap::models::{collapse_quotient, pollution_ritz_matrix, synthesize_pollution, CoefficientModel};
use specgap::operator::{ritz_spectrum, GapProblem};

use crate::config::{DemoConfig, Format, Resolved};
use crate::output::{emit, wrap};
use crate::CliError;

/// Bracket width to which candidate minima are refined before use.
const MINIMA_REFINE_TOL: f64 = 1e-10;

pub fn scan(cfg: &Resolved) -> Result<(), CliError> {
    let model = cfg.require_model()?;
    let pair = model.coeff.build(model.single_n())?;
    let swept = sweep(&pair, model.interval, model.grid)?;
    let refined = if swept.minima.is_empty() {
        Vec::new()
    } else {
        local_minima(&swept, &pair, MINIMA_REFINE_TOL)?
    };

    match cfg.format {
        Format::Csv => {
            let text = if cfg.epsilon_s > 0.0 {
                csv_with_hat(&swept, cfg.epsilon_s, cfg.digits)
            } else {
                swept.to_csv(cfg.digits)
            };
            emit(cfg.out.as_deref(), &text)
        }
        Format::Json => {
            let points: Vec<Value> = swept
                .points
                .iter()
                .map(|p| {
                    let mut row = json!({
                        "lambda": p.lambda,
                        "f": p.f_value,
                        "f_prime": p.f_prime,
                    });
                    if cfg.epsilon_s > 0.0 {
                        row["f_hat"] = json!(hat_f(p, cfg.epsilon_s));
                    }
                    row
                })
                .collect();
            let result = json!({
                "points": points,
                "grid_minima": swept.minima,
                "minima": refined,
            });
            emit(cfg.out.as_deref(), &wrap(cfg, result))
        }
    }
}

fn csv_with_hat(swept: &ScanResult, epsilon: f64, digits: Option<usize>) -> String {
    let mut out = String::from("lambda,f,f_prime,f_hat\n");
    for p in &swept.points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_float(p.lambda, digits),
            format_float(p.f_value, digits),
            format_float(p.f_prime, digits),
            format_float(hat_f(p, epsilon), digits)
        ));
    }
    out
}

pub fn enclose(cfg: &Resolved) -> Result<(), CliError> {
    let model = cfg.require_model()?;
    let ladder = model.ladder_pairs()?;
    let coarsest = &ladder[0];
    let swept = sweep(coarsest, model.interval, model.grid)?;
    if swept.minima.is_empty() {
        return Err(CliError::Numerical(
            "no candidate minima on the scanned interval".into(),
        ));
    }
    let refined = local_minima(&swept, coarsest, MINIMA_REFINE_TOL)?;
    let sigmas = filter_candidates(model.interval, &refined, cfg.spurious_threshold);
    if sigmas.is_empty() {
        return Err(CliError::Numerical(
            "every candidate minimum was filtered out as spurious".into(),
        ));
    }
    let gap = GapProblem::new(model.interval.0, model.interval.1, sigmas.clone())?;

    match run_enclosure(&ladder, &gap, cfg.tol) {
        Ok((_, report)) => {
            let result = serde_json::to_value(&report).expect("report serializes");
            emit(cfg.out.as_deref(), &wrap(cfg, result))
        }
        Err(specgap::Error::HypothesisHViolated { index, lower, upper }) => {
            let result = json!({
                "violation": {
                    "hypothesis": "interlacing",
                    "interval_index": index,
                    "lower": lower,
                    "upper": upper,
                },
                "sigmas": sigmas,
            });
            emit(cfg.out.as_deref(), &wrap(cfg, result))?;
            Err(CliError::Hypothesis(format!(
                "interlacing refuted at interval {index}: lower {lower:.17e} ≥ upper {upper:.17e}"
            )))
        }
        Err(other) => Err(other.into()),
    }
}

pub fn bounds(cfg: &Resolved) -> Result<(), CliError> {
    let model = cfg.require_model()?;
    let pair = model.coeff.build(model.single_n())?;
    let result = tau_extremes(&pair, model.nu, model.mu)?;
    if result.perturbed {
        eprintln!("specgap: warning: singular pencil; the spectral shifts were nudged");
    }
    let value = serde_json::to_value(&result).expect("result serializes");
    emit(cfg.out.as_deref(), &wrap(cfg, value))
}

pub fn compare(cfg: &Resolved) -> Result<(), CliError> {
    let model = cfg.require_model()?;
    let pair = model.coeff.build(model.single_n())?;
    let report = equivalence_check(&pair, model.nu, model.mu)?;
    let value = serde_json::to_value(&report).expect("report serializes");
    emit(cfg.out.as_deref(), &wrap(cfg, value))
}

pub fn pollute(cfg: &Resolved) -> Result<(), CliError> {
    let mut rows: Vec<(usize, f64, Option<f64>)> = Vec::new();
    if let Some(model) = &cfg.model {
        let (lo, hi) = model.interval;
        // Ritz approximants of the band edges land a rounding error inside
        // the open interval; the margin keeps them out of the table.
        let margin = 1e-9 * (1.0 + lo.abs() + hi.abs());
        for &n in &model.ns {
            let pair = model.coeff.build(n)?;
            for (index, value) in ritz_spectrum(&pair).iter().enumerate() {
                if !(lo + margin < *value && *value < hi - margin) {
                    continue;
                }
                let quotient = match &model.coeff {
                    CoefficientModel::Step(step) => Some(collapse_quotient(step, n, index)?),
                    CoefficientModel::Linear(_) => None,
                };
                rows.push((n, *value, quotient));
            }
        }
    }
    let demo = cfg.demo.as_ref().map(run_demo).transpose()?;

    match cfg.format {
        Format::Csv => {
            if demo.is_some() {
                return Err(CliError::Config(
                    "the synthetic-collapse demo reports as JSON; use --format json".into(),
                ));
            }
            let mut text = String::from("n,ritz,quotient\n");
            for (n, ritz, quotient) in &rows {
                let quotient =
                    quotient.map(|q| format_float(q, cfg.digits)).unwrap_or_default();
                text.push_str(&format!("{n},{},{quotient}\n", format_float(*ritz, cfg.digits)));
            }
            emit(cfg.out.as_deref(), &text)
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(n, ritz, quotient)| json!({"n": n, "ritz": ritz, "quotient": quotient}))
                .collect();
            let result = json!({"rows": rows, "demo": demo});
            emit(cfg.out.as_deref(), &wrap(cfg, result))
        }
    }
}

/// Synthesizes the collapse construction on ladder brackets
/// `(low − k, high + k)` and verifies the Ritz matrix against `μ·I`.
fn run_demo(demo: &DemoConfig) -> Result<Value, CliError> {
    let lambda0: Vec<f64> = (0..demo.levels).map(|k| demo.low - k as f64).collect();
    let lambda1: Vec<f64> = (0..demo.levels).map(|k| demo.high + k as f64).collect();
    let construction = synthesize_pollution(&lambda0, &lambda1, demo.mu)?;
    let mut max_off = 0.0f64;
    for n in 1..=demo.levels {
        let ritz = pollution_ritz_matrix(&construction, n)?;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { demo.mu } else { 0.0 };
                max_off = max_off.max((ritz.entry(i, j) - target).abs());
            }
        }
    }
    Ok(json!({
        "construction": construction,
        "checked_trial_sizes": demo.levels,
        "max_deviation_from_target_identity": max_off,
    }))
}
