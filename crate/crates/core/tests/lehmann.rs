mod common;

use std::f64::consts::FRAC_PI_2;

use common::{assert_close, rng};
use rand::Rng;
use specgap::lehmann::{
    assemble_a_matrices, check_condition_a, equivalence_check, tau_extremes,
};
use specgap::linalg::SymMatrix;
use specgap::models::{
    build_linear, build_step, PiecewiseLinearCoefficient, StepCoefficient,
};
use specgap::operator::TruncatedPair;
use specgap::Error;

fn step_pair(cut: f64, n: usize) -> TruncatedPair {
    build_step(&StepCoefficient::new(cut).unwrap(), n).unwrap()
}

fn diagonal_pair(values: &[f64], cushion: f64) -> TruncatedPair {
    let mut m = SymMatrix::zeros(values.len()).unwrap();
    for (i, v) in values.iter().enumerate() {
        m.set(i, i, *v);
    }
    let mut d = m.mul_sym(&m);
    if cushion > 0.0 {
        d.shift_diagonal(cushion);
    }
    TruncatedPair::new(m, d, cushion == 0.0).unwrap()
}

#[test]
fn golden_pencil_extremes_for_the_asymmetric_model() {
    let pair = step_pair(1.0, 8);
    let result = tau_extremes(&pair, 0.0, 1.0).unwrap();
    assert_close(result.tau_plus, 1.4669422069242608, 1e-9, "tau plus");
    assert_close(result.tau_minus, -3.1415703536464097, 1e-9, "tau minus");
    assert!(result.condition_a);
    assert!(!result.perturbed);
    assert_eq!(result.rho_low, 0.0);
    assert_eq!(result.rho_high, 1.0);

    // The reciprocal corrections reproduce the distance-route enclosure.
    assert_close(result.upper_bound, 0.681690113816209, 1e-9, "pencil upper bound");
    assert_close(result.lower_bound, 0.6816878543435123, 1e-9, "pencil lower bound");
    assert!(result.tau_plus > 0.0 && result.tau_minus < 0.0);
}

#[test]
fn the_two_routes_coincide_on_the_step_model() {
    let pair = step_pair(1.0, 8);
    let report = equivalence_check(&pair, 0.0, 1.0).unwrap();
    assert!(
        report.max_deviation <= 1e-10 * report.scale,
        "deviation {:e} too large (scale {})",
        report.max_deviation,
        report.scale
    );
    assert_close(report.dist_upper, report.lehmann_upper, 1e-10, "upper identity");
    assert_close(report.dist_lower, report.lehmann_lower, 1e-10, "lower identity");
    assert_close(
        report.s,
        report.nu + 1.0 / (2.0 * report.tau_plus),
        1e-10,
        "left root identity",
    );
    assert_close(
        report.t,
        report.mu + 1.0 / (2.0 * report.tau_minus),
        1e-10,
        "right root identity",
    );
}

#[test]
fn the_two_routes_coincide_on_the_linear_model() {
    let coeff = PiecewiseLinearCoefficient::new(-1.0, 1.0, 30.0, 40.0).unwrap();
    let pair = build_linear(&coeff, 50).unwrap();
    let report = equivalence_check(&pair, 0.23, 0.72).unwrap();
    assert!(
        report.max_deviation <= 1e-9 * report.scale,
        "deviation {:e} too large",
        report.max_deviation
    );
    let root = 0.4532614340417437;
    assert!(
        report.dist_lower - 1e-12 <= root && root <= report.dist_upper + 1e-12,
        "bounds [{}, {}] must capture the eigenvalue",
        report.dist_lower,
        report.dist_upper
    );
}

#[test]
fn side_condition_is_checked() {
    let pair = step_pair(FRAC_PI_2, 10);
    assert!(check_condition_a(&pair, 0.0, 1.0));
    assert!(!check_condition_a(&pair, 3.0, 4.0));

    let small = diagonal_pair(&[0.3, 0.6], 1e-8);
    let err = tau_extremes(&small, 0.7, 0.9).unwrap_err();
    assert!(
        matches!(err, Error::ConditionAViolated { nu, mu } if nu == 0.7 && mu == 0.9),
        "got {err:?}"
    );
    assert!(matches!(
        tau_extremes(&pair, 0.9, 0.1),
        Err(Error::BadInput(_))
    ));
}

#[test]
fn singular_pencils_retry_with_a_nudged_shift() {
    // ρ exactly on an eigenvalue of a quadratically exact pair makes
    // A_2(ρ) = (M − ρ)² singular; the nudge must rescue the solve.
    let pair = diagonal_pair(&[-1.0, 0.3, 2.0], 0.0);
    let result = tau_extremes(&pair, 0.3, 0.9).unwrap();
    assert!(result.perturbed);
    assert!(result.rho_low != 0.3, "the singular shift must have moved");
    assert!((result.rho_low - 0.3).abs() < 1e-6, "but only by a hair");
    // The planted eigenvalue dominates the perturbed pencil, so the upper
    // bound snaps back onto it.
    assert_close(result.upper_bound, 0.3, 1e-9, "recovered eigenvalue");
}

#[test]
fn pencil_quadratic_forms_obey_the_shift_identity() {
    // For F = s − ν and any vector x:
    //   xᵀA_2(s)x − F²·xᵀA_0x = xᵀA_2(ν)x − 2F·xᵀA_1(ν)x
    // — the algebra behind trading the pencil shift for a distance value.
    let pair = step_pair(1.0, 8);
    let mut r = rng(37);
    for _ in 0..20 {
        let nu = r.gen_range(-0.5..0.5);
        let s = nu + r.gen_range(0.01..1.0);
        let f = s - nu;
        let x: Vec<f64> = (0..pair.dim()).map(|_| r.gen_range(-1.0..1.0)).collect();

        let (a0, _, a2_s) = assemble_a_matrices(&pair, s);
        let (_, a1_nu, a2_nu) = assemble_a_matrices(&pair, nu);
        let lhs = a2_s.quad_form(&x) - f * f * a0.quad_form(&x);
        let rhs = a2_nu.quad_form(&x) - 2.0 * f * a1_nu.quad_form(&x);
        assert_close(lhs, rhs, 1e-10, "pencil shift identity");
    }
}

#[test]
fn lehmann_result_serializes_with_the_documented_keys() {
    let pair = step_pair(1.0, 8);
    let result = tau_extremes(&pair, 0.0, 1.0).unwrap();
    let value = serde_json::to_value(&result).unwrap();
    for key in [
        "rho_low",
        "rho_high",
        "tau_plus",
        "tau_minus",
        "lower_bound",
        "upper_bound",
    ] {
        assert!(value[key].is_f64(), "missing key {key}");
    }
    assert_eq!(value["condition_a"], serde_json::Value::Bool(true));
    assert_eq!(value["perturbed"], serde_json::Value::Bool(false));
}
