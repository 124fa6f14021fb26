//! The distance function `F_n(λ)`, its derivative, graph scans and minima.
//!
//! `F_n(λ) = √(smallest eigenvalue of B_n(λ))` is the distance from `λ` to
//! the action of the operator on the trial space: it dominates the true
//! distance to the spectrum, is 1-Lipschitz in `λ`, and dips toward zero near
//! genuine spectral points. Its graph over a gap of the essential spectrum is
//! the central object here: local minima flag eigenvalue candidates, and the
//! enclosure module turns values of `F_n` into certified two-sided bounds.
//!
//! Writing `G_n(λ)` for the smallest eigenvalue itself and `f_n(λ)` for its
//! unit eigenvector, the derivative is available in closed form wherever the
//! smallest eigenvalue is simple:
//!
//! ```text
//! G_n′(λ) = 2λ − 2⟨M_n f_n(λ), f_n(λ)⟩,    F_n′(λ) = G_n′(λ) / (2√G_n(λ))
//! ```
//!
//! which the scan exploits both for minimum refinement and as a warm-start
//! quality check. Near a point where `G_n` vanishes the quotient is
//! meaningless; such evaluations are flagged degenerate and report a zero
//! derivative.

use crate::error::{Error, Result};
use crate::linalg::{eig_sym, smallest_eig, EigenPair};
use crate::operator::{assemble_b, TruncatedPair};

/// Below this value of `G_n(λ)` the derivative quotient is considered
/// degenerate (`F ≈ 1e-12`, at the edge of attainable accuracy).
pub const DEGENERATE_G: f64 = 1e-24;

/// Default scan resolution: points per unit of interval length.
pub const GRID_PER_UNIT: f64 = 257.0;

/// One evaluation of the distance function.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualPoint {
    /// Evaluation point.
    pub lambda: f64,
    /// `F_n(λ) ≥ 0`.
    pub f_value: f64,
    /// `F_n′(λ)`; zero when `degenerate` is set.
    pub f_prime: f64,
    /// The minimizing unit vector `f_n(λ)`.
    pub minimizer: Vec<f64>,
    /// Inverse-iteration steps spent (diagnostic; warm starts lower it).
    pub iterations: usize,
    /// Set when `G_n(λ)` is too small for the derivative quotient.
    pub degenerate: bool,
}

/// A swept interval: all evaluated points in ascending `λ` order, plus the
/// interior grid minima (before refinement).
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub points: Vec<ResidualPoint>,
    /// Interior grid-detected minima as `(λ, F_n(λ))`, ascending.
    pub minima: Vec<(f64, f64)>,
}

impl ScanResult {
    /// Plot-ready CSV with header `lambda,f,f_prime`.
    ///
    /// `digits = None` prints 17 significant digits (round-trip safe);
    /// `Some(d)` prints fixed-point with `d` decimals for table-style output.
    pub fn to_csv(&self, digits: Option<usize>) -> String {
        let mut out = String::from("lambda,f,f_prime\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{}\n",
                format_float(p.lambda, digits),
                format_float(p.f_value, digits),
                format_float(p.f_prime, digits)
            ));
        }
        out
    }
}

/// Formats with 17 significant digits by default, or fixed decimals.
pub fn format_float(v: f64, digits: Option<usize>) -> String {
    match digits {
        None => format!("{v:.16e}"),
        Some(d) => format!("{v:.d$}"),
    }
}

/// Evaluates `F_n`, its derivative and minimizer at one point.
///
/// `warm` seeds the inverse iteration (typically the minimizer of a nearby
/// evaluation); it affects only the iteration count, never the value. If the
/// iterative solver exhausts its budget, the evaluation falls back to the
/// full Jacobi decomposition.
pub fn eval_f(pair: &TruncatedPair, lambda: f64, warm: Option<&[f64]>) -> Result<ResidualPoint> {
    let b = assemble_b(pair, lambda);
    let pair_eig: EigenPair = match smallest_eig(&b, warm) {
        Ok(p) => p,
        Err(Error::IterationCapExceeded { cap, .. }) => {
            let mut p = eig_sym(&b)
                .into_iter()
                .next()
                .expect("matrix has at least one eigenvalue");
            p.iterations += cap;
            p
        }
        Err(e) => return Err(e),
    };

    // B is positive semidefinite up to eigensolver noise; clamp the noise.
    let g = pair_eig.value.max(0.0);
    let f_value = g.sqrt();
    let degenerate = g < DEGENERATE_G;
    let f_prime = if degenerate {
        0.0
    } else {
        let m_quad = pair.m().quad_form(&pair_eig.vector);
        (lambda - m_quad) / f_value
    };
    Ok(ResidualPoint {
        lambda,
        f_value,
        f_prime,
        minimizer: pair_eig.vector,
        iterations: pair_eig.iterations,
        degenerate,
    })
}

/// The safeguard transform `F̂ = F + ε·e^{−F}`.
///
/// Strictly dominates `F`, with derivative magnitude strictly below 1
/// wherever `|F′| ≤ 1` — useful when the strict-domination hypothesis behind
/// the enclosure lemmas needs to be forced rather than assumed. All standard
/// runs keep it off (`ε = 0` upstream); it is exposed for callers who want
/// the belt-and-braces variant.
pub fn hat_f(point: &ResidualPoint, epsilon: f64) -> f64 {
    assert!(epsilon > 0.0, "hat_f requires epsilon > 0");
    point.f_value + epsilon * (-point.f_value).exp()
}

/// Sweeps `F_n` over an inclusive uniform grid with the Ritz-anchored
/// warm-start schedule.
///
/// The grid is partitioned by the midpoints between consecutive Ritz values
/// of `M_n` inside the interval. Within each cell, points below the anchor
/// are processed by a descending sweep and points above it by an ascending
/// sweep, each seeded first with the anchor's Ritz eigenvector and then
/// chained on the previous minimizer; the last point before a cell boundary
/// is seeded with the renormalized sum of the two flanking minimizers once
/// both sides of the boundary have been visited. The eigensolver's
/// definiteness certificate makes the seeding safe even across kinks of
/// `F_n`, where a chained start enters aligned with the wrong eigenvalue
/// branch of `B_n`: values agree with cold evaluation to the solver
/// tolerance, and warm starting only reduces iteration counts.
pub fn scan(pair: &TruncatedPair, interval: (f64, f64), grid_count: usize) -> Result<ScanResult> {
    let (a, b) = interval;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::BadInput(format!(
            "scan interval must satisfy a < b, got ({a}, {b})"
        )));
    }
    if grid_count < 2 {
        return Err(Error::BadInput(format!(
            "scan needs at least 2 grid points, got {grid_count}"
        )));
    }

    let step = (b - a) / (grid_count - 1) as f64;
    let grid: Vec<f64> = (0..grid_count)
        .map(|i| if i + 1 == grid_count { b } else { a + i as f64 * step })
        .collect();

    // Ritz anchors strictly inside the interval, with their eigenvectors.
    let ritz = eig_sym(pair.m());
    let anchors: Vec<&EigenPair> = ritz.iter().filter(|p| a < p.value && p.value < b).collect();

    let mut slots: Vec<Option<ResidualPoint>> = vec![None; grid_count];
    if anchors.is_empty() {
        // No anchors: one ascending chain across the whole grid.
        let mut prev: Option<Vec<f64>> = None;
        for (i, &lam) in grid.iter().enumerate() {
            let p = eval_f(pair, lam, prev.as_deref())?;
            prev = Some(p.minimizer.clone());
            slots[i] = Some(p);
        }
    } else {
        // Cell boundaries: interval ends and midpoints between anchors.
        let mut bounds = vec![a];
        for w in anchors.windows(2) {
            bounds.push(0.5 * (w[0].value + w[1].value));
        }
        bounds.push(b);

        for (c, anchor) in anchors.iter().enumerate() {
            let (lo, hi) = (bounds[c], bounds[c + 1]);
            let cell: Vec<usize> = (0..grid_count)
                .filter(|&i| {
                    let x = grid[i];
                    (x >= lo || c == 0) && (x < hi || c + 1 == anchors.len() && x <= hi)
                })
                .filter(|&i| slots[i].is_none())
                .collect();
            let above: Vec<usize> =
                cell.iter().copied().filter(|&i| grid[i] >= anchor.value).collect();
            let below: Vec<usize> =
                cell.iter().copied().filter(|&i| grid[i] < anchor.value).collect();

            // Ascending away from the anchor toward the upper boundary.
            let mut prev: Option<Vec<f64>> = Some(anchor.vector.clone());
            for &i in &above {
                let p = eval_f(pair, grid[i], prev.as_deref())?;
                prev = Some(p.minimizer.clone());
                slots[i] = Some(p);
            }
            // Descending away from the anchor toward the lower boundary,
            // blending with the minimizer already computed across it.
            prev = Some(anchor.vector.clone());
            for (k, &i) in below.iter().rev().enumerate() {
                let last_before_boundary = k + 1 == below.len() && i > 0;
                let warm: Option<Vec<f64>> = if last_before_boundary {
                    slots[i - 1]
                        .as_ref()
                        .map(|left| blend(left.minimizer.as_slice(), prev.as_deref()))
                        .or(prev.clone())
                } else {
                    prev.clone()
                };
                let p = eval_f(pair, grid[i], warm.as_deref())?;
                prev = Some(p.minimizer.clone());
                slots[i] = Some(p);
            }
        }
        // Points outside all cells (possible only through rounding at the
        // boundaries): plain cold evaluations.
        for i in 0..grid_count {
            if slots[i].is_none() {
                slots[i] = Some(eval_f(pair, grid[i], None)?);
            }
        }
    }

    let points: Vec<ResidualPoint> = slots.into_iter().map(|s| s.expect("slot filled")).collect();
    let minima = grid_minima(&points);
    Ok(ScanResult { points, minima })
}

/// Renormalized sum of two unit vectors (falls back to the first when the sum
/// cancels).
fn blend(left: &[f64], right: Option<&[f64]>) -> Vec<f64> {
    let Some(right) = right else { return left.to_vec() };
    let mut sum: Vec<f64> = left.iter().zip(right).map(|(x, y)| x + y).collect();
    let norm = sum.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return left.to_vec();
    }
    for v in sum.iter_mut() {
        *v /= norm;
    }
    sum
}

/// Interior grid minima of the already-evaluated scan points.
fn grid_minima(points: &[ResidualPoint]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..points.len().saturating_sub(1) {
        let (l, c, r) = (&points[i - 1], &points[i], &points[i + 1]);
        if c.f_value < l.f_value && c.f_value <= r.f_value {
            out.push((c.lambda, c.f_value));
        }
    }
    out
}

/// Refines each grid minimum of a scan by bisection on the derivative sign
/// change, to a bracket width below `refine_tol`.
///
/// Only interior minima are returned (candidates must sit strictly inside the
/// scanned interval); duplicates collapsing onto one point are merged.
pub fn local_minima(
    scanres: &ScanResult,
    pair: &TruncatedPair,
    refine_tol: f64,
) -> Result<Vec<(f64, f64)>> {
    if refine_tol <= 0.0 {
        return Err(Error::BadInput(format!(
            "refine tolerance must be positive, got {refine_tol}"
        )));
    }
    if scanres.minima.is_empty() {
        return Err(Error::NoMinimumFound);
    }
    let grid: Vec<f64> = scanres.points.iter().map(|p| p.lambda).collect();
    let (scan_lo, scan_hi) = (grid[0], grid[grid.len() - 1]);

    let mut refined: Vec<(f64, f64)> = Vec::new();
    for &(sigma, _) in &scanres.minima {
        let idx = grid
            .iter()
            .position(|&x| x == sigma)
            .expect("grid minimum comes from the scan grid");
        let (mut lo, mut hi) = (grid[idx - 1], grid[idx + 1]);
        let mut warm = scanres.points[idx].minimizer.clone();
        // Bisection on the sign of F′: negative slope keeps the minimum to
        // the right, non-negative slope to the left. This also converges at
        // kinks, where the derivative jumps across zero.
        while hi - lo > refine_tol {
            let mid = 0.5 * (lo + hi);
            let p = eval_f(pair, mid, Some(&warm))?;
            warm = p.minimizer;
            if p.f_prime < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let sigma_ref = 0.5 * (lo + hi);
        if sigma_ref <= scan_lo || sigma_ref >= scan_hi {
            continue;
        }
        let value = eval_f(pair, sigma_ref, Some(&warm))?.f_value;
        match refined.last() {
            Some(&(prev, _)) if (sigma_ref - prev).abs() <= 10.0 * refine_tol => {}
            _ => refined.push((sigma_ref, value)),
        }
    }
    if refined.is_empty() {
        return Err(Error::NoMinimumFound);
    }
    Ok(refined)
}
