//! Acceptance gate: one test per shipped criterion, each printing a single
//! `criterion N: PASS/FAIL` line (visible with `--nocapture`) and failing
//! loudly if any pinned value drifts.
//!
//! Criterion 4 is expected to stay red: seven of its quoted table entries
//! do not match the defining quantities at the quoted truncation sizes, and
//! the notes attached to the verdict pin down where those entries actually
//! come from. The literals are asserted as quoted rather than silently
//! re-derived.

mod common;

use std::f64::consts::PI;

use rand::Rng;

use specgap::distfun::{eval_f, local_minima, scan};
use specgap::enclosure::{enclose, initial_enclosure, refine, solve_left, solve_right};
use specgap::lehmann::equivalence_check;
use specgap::linalg::eig_sym;
use specgap::models::{
    build_linear, build_step, pollution_ritz_matrix, synthesize_pollution, CoefficientModel,
    PiecewiseLinearCoefficient, StepCoefficient,
};
use specgap::operator::{ritz_spectrum, two_level_pair, GapProblem, TruncatedPair};

struct Criterion {
    number: usize,
    summary: &'static str,
    checks: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new(number: usize, summary: &'static str) -> Self {
        Criterion { number, summary, checks: 0, failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.checks += 1;
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn close_to(&mut self, actual: f64, expected: f64, tol: f64, what: impl std::fmt::Display) {
        let off = (actual - expected).abs();
        self.check(
            off <= tol,
            format!("{what}: got {actual:.10}, want {expected} ± {tol:.0e} (off by {off:.2e})"),
        );
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    fn finish(self) {
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {verdict} — {} ({}/{} checks)",
            self.number,
            self.summary,
            self.checks - self.failures.len(),
            self.checks
        );
        for note in &self.notes {
            println!("  note: {note}");
        }
        for failure in &self.failures {
            println!("  failed: {failure}");
        }
        assert!(
            self.failures.is_empty(),
            "criterion {} failed {} of {} checks:\n{}",
            self.number,
            self.failures.len(),
            self.checks,
            self.failures.join("\n")
        );
    }
}

fn step_pair(cut: f64, n: usize) -> TruncatedPair {
    build_step(&StepCoefficient::new(cut).expect("valid cut"), n).expect("step model builds")
}

fn linear_benchmark() -> PiecewiseLinearCoefficient {
    PiecewiseLinearCoefficient::new(-1.0, 1.0, 30.0, 40.0).expect("valid coefficients")
}

fn f_at(pair: &TruncatedPair, lambda: f64) -> f64 {
    eval_f(pair, lambda, None).expect("evaluation succeeds").f_value
}

#[test]
fn criterion_1_spurious_ritz_values_flood_the_gap() {
    let mut crit = Criterion::new(1, "truncation pollutes the symmetric gap on schedule");
    let table: [(usize, [f64; 4]); 4] = [
        (50, [0.0526, 0.4632, 0.5368, 0.9474]),
        (100, [0.0691, 0.4750, 0.5250, 0.9309]),
        (200, [0.0856, 0.4830, 0.5170, 0.9144]),
        (400, [0.1019, 0.4884, 0.5116, 0.8981]),
    ];
    for (n, row) in table {
        let pair = step_pair(PI / 2.0, n);
        let mut ritz = ritz_spectrum(&pair);
        ritz.sort_by(|a, b| {
            (a - 0.5).abs().partial_cmp(&(b - 0.5).abs()).expect("finite Ritz values")
        });
        let mut nearest: Vec<f64> = ritz.into_iter().take(4).collect();
        nearest.sort_by(|a, b| a.partial_cmp(b).expect("finite Ritz values"));
        for (got, want) in nearest.iter().zip(&row) {
            crit.close_to(*got, *want, 5e-5, format!("n = {n}: Ritz value nearest 1/2"));
        }
    }
    crit.finish();
}

#[test]
fn criterion_2_distance_function_pins_the_symmetric_gap_eigenvalue() {
    let mut crit = Criterion::new(2, "F_10 values and side roots in the symmetric gap");
    let pair = step_pair(PI / 2.0, 10);
    crit.close_to(f_at(&pair, 0.0), 0.00000679, 5e-9, "F_10(0)");
    crit.close_to(f_at(&pair, 1.0), 0.00000679, 5e-9, "F_10(1)");
    crit.close_to(f_at(&pair, 0.5), 0.10049280, 5e-9, "F_10(1/2)");
    let (s, _) = solve_left(&pair, 0.0, 0.5).expect("left side equation solves");
    let (t, _) = solve_right(&pair, 0.5, 1.0).expect("right side equation solves");
    crit.close_to(s, 0.25, 1e-6, "left root s");
    crit.close_to(t, 0.75, 1e-6, "right root t");
    crit.finish();
}

#[test]
fn criterion_3_two_sided_enclosure_of_the_asymmetric_eigenvalue() {
    let mut crit = Criterion::new(3, "minima, side roots and certified enclosure at cut 1");
    let pair = step_pair(1.0, 8);

    let swept = scan(&pair, (0.0, 1.0), 1025).expect("scan succeeds");
    let minima = local_minima(&swept, &pair, 1e-10).expect("minima refine");
    crit.check(minima.len() == 2, format!("expected 2 interior minima, found {}", minima.len()));
    if minima.len() == 2 {
        crit.close_to(minima[0].0, 0.697669, 1e-6, "first minimum location");
        crit.close_to(minima[0].1, 0.106699, 1e-6, "first minimum value");
        crit.close_to(minima[1].0, 0.999313, 1e-6, "second minimum location");
        crit.close_to(minima[1].1, 0.026051, 1e-6, "second minimum value");
    }

    let sigma = minima[0].0;
    let (s, _) = solve_left(&pair, 0.0, sigma).expect("left side equation solves");
    let (t, _) = solve_right(&pair, sigma, 1.0).expect("right side equation solves");
    crit.close_to(s, 0.340845, 1e-6, "left root s");
    crit.close_to(t, 0.840844, 1e-6, "right root t");

    let gap = GapProblem::new(0.0, 1.0, vec![sigma]).expect("valid gap problem");
    let pairs = [pair];
    let (state, _) = enclose(&pairs, &gap, 1e-12).expect("enclosure converges");
    let interval = &state.intervals[0];
    crit.check(
        interval.lower >= 0.681687,
        format!("lower bound {:.9} must reach 0.681687", interval.lower),
    );
    crit.check(
        interval.upper <= 0.681691,
        format!("upper bound {:.9} must stay below 0.681691", interval.upper),
    );
    let eigenvalue = (PI - 1.0) / PI;
    crit.check(
        interval.lower - 1e-12 <= eigenvalue && eigenvalue <= interval.upper + 1e-12,
        format!(
            "enclosure [{:.15}, {:.15}] must contain {eigenvalue:.15} (1-ulp slack 1e-12)",
            interval.lower, interval.upper
        ),
    );
    crit.finish();
}

#[test]
fn criterion_4_convergence_table() {
    let mut crit = Criterion::new(4, "quoted convergence table at s, t, 1/2, 3/4");
    let coeff = StepCoefficient::new(1.0).expect("valid cut");
    let points = [0.340845, 0.840844, 0.5, 0.75];
    let labels = ["s", "t", "1/2", "3/4"];
    let rows: [(usize, [f64; 4]); 6] = [
        (2, [0.340873, 0.269294, 0.254218, 0.433012]),
        (4, [0.340845, 0.162575, 0.238589, 0.146875]),
        (6, [0.340845, 0.159219, 0.221431, 0.137537]),
        (8, [0.340845, 0.159156, 0.210113, 0.116463]),
        (10, [0.340845, 0.159155, 0.207660, 0.108933]),
        (100, [0.340845, 0.159155, 0.187173, 0.077840]),
    ];
    for (n, row) in rows {
        let pair = build_step(&coeff, n).expect("step model builds");
        for ((x, label), want) in points.iter().zip(labels).zip(row) {
            crit.close_to(f_at(&pair, *x), want, 1e-6, format!("F_{n}({label})"));
        }
    }

    // Where the persistently failing entries actually live: every quoted
    // value in the 3/4 column matches the computed F at one truncation level
    // lower, and the quoted final row of the last two columns matches the
    // half-size truncations. The quoted table appears to shift those indices;
    // the literals above are asserted as quoted and stay red.
    for (n, want_v) in [(2, 0.433012), (4, 0.146875), (6, 0.137537), (8, 0.116463), (10, 0.108933)]
    {
        let shifted = f_at(&build_step(&coeff, n - 1).expect("step model builds"), 0.75);
        common::assert_close(shifted, want_v, 1e-6, "shifted-index value in the 3/4 column");
        crit.note(format!("quoted F_{n}(3/4) = {want_v} equals computed F_{}(3/4)", n - 1));
    }
    let v_half = f_at(&build_step(&coeff, 49).expect("step model builds"), 0.75);
    common::assert_close(v_half, 0.077840, 1e-6, "half-size value in the 3/4 column");
    crit.note("quoted F_100(3/4) = 0.077840 equals computed F_49(3/4)".to_string());
    let u_half = f_at(&build_step(&coeff, 50).expect("step model builds"), 0.5);
    common::assert_close(u_half, 0.187173, 5e-5, "half-size value in the 1/2 column");
    crit.note(format!(
        "quoted F_100(1/2) = 0.187173 sits within 2e-5 of computed F_50(1/2) = {u_half:.7}"
    ));
    crit.finish();
}

#[test]
fn criterion_5_midpoint_value_collapses_onto_the_eigenvalue_distance() {
    let mut crit = Criterion::new(5, "F_n(m/2) − m/2 shrinks below threshold across cuts");
    for k in 1..=20 {
        let cut = 2.3 * k as f64 / 21.0;
        let m = (PI - cut) / PI;
        let excess = f_at(&step_pair(cut, 10), m / 2.0) - m / 2.0;
        crit.check(
            (-1e-12..=1e-6).contains(&excess),
            format!("cut {cut:.4}: F_10(m/2) − m/2 = {excess:.3e} outside [−1e-12, 1e-6]"),
        );
    }
    for k in 1..=10 {
        let cut = 2.9 * k as f64 / 11.0;
        let m = (PI - cut) / PI;
        let excess = f_at(&step_pair(cut, 50), m / 2.0) - m / 2.0;
        crit.check(
            (-1e-12..=1e-8).contains(&excess),
            format!("cut {cut:.4}: F_50(m/2) − m/2 = {excess:.3e} outside [−1e-12, 1e-8]"),
        );
    }
    crit.finish();
}

#[test]
fn criterion_6_piecewise_linear_benchmark() {
    let mut crit = Criterion::new(6, "secular root, two-point bounds and truncation ladder");
    let coeff = linear_benchmark();
    let model = CoefficientModel::Linear(coeff);

    let root = model.xi_solve((-1.0, 1.0)).expect("secular root exists in the gap");
    crit.close_to(root, 0.453261434, 5e-9, "secular root");

    let pair = build_linear(&coeff, 50).expect("linear model builds");
    let f_low = f_at(&pair, 0.23);
    let f_high = f_at(&pair, 0.72);
    crit.close_to(f_low, 0.22326196, 5e-8, "F_50(0.23)");
    crit.close_to(f_high, 0.26673868, 5e-8, "F_50(0.72)");
    let (lower, upper) = (0.72 - f_high, 0.23 + f_low);
    crit.check(
        lower < root && root < upper,
        format!("two-point enclosure [{lower:.10}, {upper:.10}] must contain {root:.10}"),
    );

    let ladder: [(usize, f64); 5] = [
        (10, 0.50275311),
        (20, 0.45504606),
        (50, 0.45326153),
        (75, 0.45326143),
        (100, 0.45326143),
    ];
    for (n, want) in ladder {
        let ritz = ritz_spectrum(&build_linear(&coeff, n).expect("linear model builds"));
        let nearest = ritz
            .into_iter()
            .filter(|r| (-1.0..1.0).contains(r))
            .min_by(|a, b| {
                (a - root).abs().partial_cmp(&(b - root).abs()).expect("finite Ritz values")
            })
            .expect("a Ritz value lies in the gap");
        crit.close_to(nearest, want, 5e-8, format!("n = {n}: gap Ritz value nearest the root"));
    }
    crit.finish();
}

#[test]
fn criterion_7_both_bound_routes_coincide() {
    let mut crit = Criterion::new(7, "distance-function and pencil bounds agree everywhere");

    let step = step_pair(1.0, 8);
    let report = equivalence_check(&step, 0.0, 1.0).expect("equivalence runs on the step model");
    crit.check(
        report.max_deviation < 1e-8 * report.scale,
        format!("step model: max deviation {:.3e} ≥ 1e-8·scale", report.max_deviation),
    );

    let linear = build_linear(&linear_benchmark(), 50).expect("linear model builds");
    let report =
        equivalence_check(&linear, 0.23, 0.72).expect("equivalence runs on the linear model");
    crit.check(
        report.max_deviation < 1e-8 * report.scale,
        format!("linear model: max deviation {:.3e} ≥ 1e-8·scale", report.max_deviation),
    );

    let mut rng = common::rng(7);
    for k in 0..50usize {
        let dim = 6 + k % 7;
        let (pair, _) = common::random_gap_pair(dim, &mut rng);
        match equivalence_check(&pair, -0.7, 0.7) {
            Ok(report) => crit.check(
                report.max_deviation < 1e-8 * report.scale,
                format!(
                    "random pair {k} (dim {dim}): max deviation {:.3e} ≥ 1e-8·scale",
                    report.max_deviation
                ),
            ),
            Err(err) => crit.check(false, format!("random pair {k} (dim {dim}) errored: {err}")),
        }
    }
    crit.finish();
}

#[test]
fn criterion_8_structural_property_sweep() {
    let mut crit = Criterion::new(8, "contraction, monotonicity, containment, determinism");
    let mut rng = common::rng(8);

    let (pair, _) = common::random_gap_pair(9, &mut rng);
    let mut last: Option<(f64, f64)> = None;
    let mut excess: f64 = f64::NEG_INFINITY;
    for _ in 0..200 {
        let lambda = rng.gen_range(-4.0..4.0);
        let f = f_at(&pair, lambda);
        if let Some((last_lambda, last_f)) = last {
            excess = excess.max((f - last_f).abs() - (lambda - last_lambda).abs());
        }
        last = Some((lambda, f));
    }
    crit.check(excess <= 1e-9, format!("Lipschitz excess {excess:.2e} above 1e-9"));

    let (coarse, fine) = (step_pair(1.0, 6), step_pair(1.0, 12));
    for k in 0..=10 {
        let lambda = k as f64 / 10.0;
        let (f6, f12) = (f_at(&coarse, lambda), f_at(&fine, lambda));
        crit.check(
            f12 <= f6 + 1e-11,
            format!("λ = {lambda}: F grew from {f6} to {f12} on the finer truncation"),
        );
    }

    let values: Vec<f64> = (0..12).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let host = common::random_conjugated_diag(&values, &mut rng);
    let block = two_level_pair(&host, 9).expect("two-level pair builds");
    for _ in 0..10 {
        let lambda = rng.gen_range(-3.5..3.5);
        let f = f_at(&block, lambda);
        let dist =
            values.iter().map(|v| (v - lambda).abs()).fold(f64::INFINITY, f64::min);
        crit.check(
            dist <= f + 1e-9,
            format!("window [λ ± F] misses the planted spectrum at λ = {lambda:.4}"),
        );
    }

    let gap = GapProblem::new(0.0, 1.0, vec![0.6976692547613075]).expect("valid gap problem");
    let mut state = initial_enclosure(&coarse, &gap).expect("initial enclosure");
    for _ in 0..2 {
        let next = refine(&coarse, &state).expect("refinement sweep");
        for (old, new) in state.intervals.iter().zip(&next.intervals) {
            crit.check(new.lower >= old.lower, "refinement widened a lower bound".to_string());
            crit.check(new.upper <= old.upper, "refinement widened an upper bound".to_string());
        }
        state = next;
    }

    for (label, candidate) in [
        ("step", step_pair(PI / 2.0, 10)),
        ("linear", build_linear(&linear_benchmark(), 10).expect("linear model builds")),
        ("random", common::random_gap_pair(8, &mut rng).0),
    ] {
        let mm = candidate.m().mul_sym(candidate.m());
        let dim = candidate.dim();
        let mut rows = vec![vec![0.0; dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                rows[i][j] = candidate.d().entry(i, j) - mm.entry(i, j);
            }
        }
        let excess =
            eig_sym(&specgap::linalg::SymMatrix::from_rows(&rows).expect("symmetric difference"));
        let scale = excess.iter().map(|p| p.value.abs()).fold(1.0, f64::max);
        crit.check(
            excess[0].value >= -1e-10 * scale,
            format!("{label}: D − M² dips to {:.3e}", excess[0].value),
        );
    }

    let mut smooth = 0usize;
    let h = 1e-6;
    while smooth < 10 {
        let lambda = rng.gen_range(-1.5..1.5);
        let center = eval_f(&pair, lambda, None).expect("evaluation succeeds");
        let left = eval_f(&pair, lambda - h, None).expect("evaluation succeeds");
        let right = eval_f(&pair, lambda + h, None).expect("evaluation succeeds");
        let overlap: f64 =
            left.minimizer.iter().zip(&right.minimizer).map(|(a, b)| a * b).sum();
        if center.degenerate || overlap.abs() < 0.9999 || center.f_value < 1e-6 {
            continue;
        }
        let stencil = (right.f_value - left.f_value) / (2.0 * h);
        crit.check(
            (stencil - center.f_prime).abs() <= 1e-5,
            format!("λ = {lambda:.4}: derivative {} vs stencil {stencil}", center.f_prime),
        );
        smooth += 1;
    }

    for lambda in [0.1, 0.5, 0.77] {
        let a = eval_f(&coarse, lambda, None).expect("evaluation succeeds");
        let b = eval_f(&coarse, lambda, None).expect("evaluation succeeds");
        crit.check(
            a.f_value.to_bits() == b.f_value.to_bits()
                && a.f_prime.to_bits() == b.f_prime.to_bits(),
            format!("rerun at λ = {lambda} was not byte-identical"),
        );
    }
    let first = scan(&coarse, (0.1, 0.9), 65).expect("scan succeeds").to_csv(None);
    let second = scan(&coarse, (0.1, 0.9), 65).expect("scan succeeds").to_csv(None);
    crit.check(first == second, "scan reruns differ".to_string());

    crit.finish();
}

#[test]
fn criterion_9_rotated_trial_bases_collapse_the_ritz_matrix() {
    let mut crit = Criterion::new(9, "Ritz matrix equals the target multiple of I up to N = 8");
    let mut configs: Vec<(Vec<f64>, Vec<f64>, f64)> = vec![
        (
            (1..=10).map(|k| -(k as f64)).collect(),
            (1..=10).map(|k| 3.0 + 0.5 * k as f64).collect(),
            0.3,
        ),
        (
            (1..=10).map(|k| -0.1 - 0.3 * k as f64).collect(),
            (1..=10).map(|k| 2.0 / k as f64).collect(),
            -0.05,
        ),
    ];
    let mut rng = common::rng(9);
    for _ in 0..5 {
        let mu = rng.gen_range(-1.0..1.0);
        let lambda0: Vec<f64> = (0..10).map(|_| mu - rng.gen_range(0.1..3.0)).collect();
        let lambda1: Vec<f64> = (0..10).map(|_| mu + rng.gen_range(0.1..3.0)).collect();
        configs.push((lambda0, lambda1, mu));
    }
    for (which, (lambda0, lambda1, mu)) in configs.iter().enumerate() {
        let construction =
            synthesize_pollution(lambda0, lambda1, *mu).expect("admissible construction");
        for n in 1..=8usize {
            let ritz = pollution_ritz_matrix(&construction, n).expect("Ritz matrix assembles");
            let mut off = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { *mu } else { 0.0 };
                    off = off.max((ritz.entry(i, j) - want).abs());
                }
            }
            crit.check(
                off <= 1e-12,
                format!("config {which}, N = {n}: |Ritz − μI| = {off:.3e} above 1e-12"),
            );
        }
    }
    crit.finish();
}
