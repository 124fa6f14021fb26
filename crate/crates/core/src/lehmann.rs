//! Right-definite Lehmann bounds and their equivalence with the distance
//! function.
//!
//! The classical route to certified eigenvalue bounds runs through the
//! matrix pencils built from a shift `ρ`:
//!
//! ```text
//! A_0 = I,    A_1(ρ) = M_n − ρ·I,    A_2(ρ) = B_n(ρ) = D_n − 2ρ·M_n + ρ²·I
//! ```
//!
//! With evaluation points `ν < μ` flanking the eigenvalue from below and
//! above, the largest eigenvalue `τ⁺` of the pencil `(A_1(ν), A_2(ν))` and
//! the smallest eigenvalue `τ⁻` of `(A_1(μ), A_2(μ))` give the two-sided
//! bounds
//!
//! ```text
//! μ + 1/τ⁻  ≤  m  ≤  ν + 1/τ⁺.
//! ```
//!
//! These are exactly the bounds the distance-function route produces: with
//! `s` solving `F_n(s) = s − ν` and `t` solving `F_n(t) = μ − t`,
//!
//! ```text
//! s + F_n(s) = ν + 1/τ⁺,    s = ν + 1/(2τ⁺),
//! t − F_n(t) = μ + 1/τ⁻,    t = μ + 1/(2τ⁻),
//! ```
//!
//! so the two methods are one method in different clothes. The pencil route
//! needs a generalized eigensolve per shift and a definiteness side
//! condition; the distance route needs only the smallest eigenvalue of
//! `B_n(λ)` along a scan. [`equivalence_check`] runs both and reports how
//! far apart they land — a couple of ulps, in practice.

use serde::Serialize;

use crate::distfun::scan;
use crate::enclosure::{solve_left, solve_right};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, gen_eig_extreme, Extreme, SymMatrix};
use crate::operator::{assemble_b, TruncatedPair};

/// Relative size of the shift perturbation used when a pencil matrix
/// `A_2(ρ)` turns out numerically singular. The nudge `δ` lifts the offending
/// eigenvalue of `A_2` by `δ²`, so it must clear the roundoff floor of the
/// assembly (`~1e-16·‖B‖`) with room to spare.
pub const SINGULAR_SHIFT_REL: f64 = 1e-7;

/// Grid resolution used by [`equivalence_check`] to locate the minimum of
/// `F_n` between the evaluation points.
pub const EQUIVALENCE_GRID: usize = 257;

/// Two-sided Lehmann bounds from one pair of evaluation points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LehmannResult {
    /// Left evaluation point actually used (perturbed if necessary).
    pub rho_low: f64,
    /// Right evaluation point actually used.
    pub rho_high: f64,
    /// Largest eigenvalue of the pencil at `rho_low`; positive under the
    /// side condition.
    pub tau_plus: f64,
    /// Smallest eigenvalue of the pencil at `rho_high`; negative under the
    /// side condition.
    pub tau_minus: f64,
    /// `rho_high + 1/tau_minus`.
    pub lower_bound: f64,
    /// `rho_low + 1/tau_plus`.
    pub upper_bound: f64,
    /// The side condition held (always true in a returned result).
    pub condition_a: bool,
    /// A singular pencil forced a perturbed evaluation point.
    pub perturbed: bool,
}

/// Both routes to the same bounds, with their mutual deviations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub nu: f64,
    pub mu: f64,
    pub tau_plus: f64,
    pub tau_minus: f64,
    /// Bounds from the pencil route.
    pub lehmann_lower: f64,
    pub lehmann_upper: f64,
    /// Bounds from the distance-function route.
    pub dist_lower: f64,
    pub dist_upper: f64,
    /// Side-equation roots of the distance route.
    pub s: f64,
    pub t: f64,
    /// `|dist_upper − lehmann_upper|` and friends.
    pub dev_upper: f64,
    pub dev_lower: f64,
    /// Deviations of the roots from their pencil predictions
    /// `ν + 1/(2τ⁺)` and `μ + 1/(2τ⁻)`.
    pub dev_s: f64,
    pub dev_t: f64,
    pub max_deviation: f64,
    /// Natural comparison scale `1 + |ν| + |μ|`.
    pub scale: f64,
}

/// The three pencil matrices `(A_0, A_1(ρ), A_2(ρ))` at a shift.
pub fn assemble_a_matrices(pair: &TruncatedPair, rho: f64) -> (SymMatrix, SymMatrix, SymMatrix) {
    let dim = pair.dim();
    let a0 = SymMatrix::identity(dim).expect("dimension already validated");
    let mut a1 = pair.m().clone();
    a1.shift_diagonal(-rho);
    let a2 = assemble_b(pair, rho);
    (a0, a1, a2)
}

/// The side condition: the Ritz values must flank both evaluation points —
/// the largest must exceed `nu` and the smallest must undercut `mu`.
///
/// Without this the pencils lose the eigenvalue signs the bounds rely on.
pub fn check_condition_a(pair: &TruncatedPair, nu: f64, mu: f64) -> bool {
    let ritz = eig_sym(pair.m());
    let min = ritz.first().map(|p| p.value);
    let max = ritz.last().map(|p| p.value);
    matches!((min, max), (Some(lo), Some(hi)) if lo < mu && hi > nu)
}

/// Computes `τ⁺`, `τ⁻` and the Lehmann bounds for the eigenvalue between
/// `nu` and `mu`.
///
/// Fails with [`Error::ConditionAViolated`] when the side condition does not
/// hold. A numerically singular `A_2(ρ)` is retried with `ρ` nudged by
/// `±1e-7·(μ − ν)`, preferring the nudge that moves away from the
/// eigenvalue; the result records the shift actually used and sets
/// `perturbed`.
pub fn tau_extremes(pair: &TruncatedPair, nu: f64, mu: f64) -> Result<LehmannResult> {
    if !(nu < mu) || !nu.is_finite() || !mu.is_finite() {
        return Err(Error::BadInput(format!(
            "evaluation points must satisfy nu < mu, got ({nu}, {mu})"
        )));
    }
    if !check_condition_a(pair, nu, mu) {
        return Err(Error::ConditionAViolated { nu, mu });
    }
    let delta = SINGULAR_SHIFT_REL * (mu - nu);
    let (tau_plus, rho_low, perturbed_low) =
        pencil_extreme(pair, nu, Extreme::Largest, -delta)?;
    let (tau_minus, rho_high, perturbed_high) =
        pencil_extreme(pair, mu, Extreme::Smallest, delta)?;
    Ok(LehmannResult {
        rho_low,
        rho_high,
        tau_plus,
        tau_minus,
        lower_bound: rho_high + 1.0 / tau_minus,
        upper_bound: rho_low + 1.0 / tau_plus,
        condition_a: true,
        perturbed: perturbed_low || perturbed_high,
    })
}

/// Extreme pencil eigenvalue at `rho`, retrying a nudged shift (preferred
/// direction first) when `A_2(ρ)` is not positive definite.
fn pencil_extreme(
    pair: &TruncatedPair,
    rho: f64,
    which: Extreme,
    preferred_nudge: f64,
) -> Result<(f64, f64, bool)> {
    let mut last_err = None;
    for (attempt, shift) in [rho, rho + preferred_nudge, rho - preferred_nudge]
        .into_iter()
        .enumerate()
    {
        let mut a1 = pair.m().clone();
        a1.shift_diagonal(-shift);
        let a2 = assemble_b(pair, shift);
        match gen_eig_extreme(&a1, &a2, which) {
            Ok(p) => return Ok((p.value, shift, attempt > 0)),
            Err(e @ Error::NotPositiveDefinite { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("loop ran at least once"))
}

/// Runs the pencil route and the distance route between the same evaluation
/// points and reports the four identity deviations.
///
/// The inner bracket end for both side equations is the deepest interior
/// grid minimum of `F_n` whose inclusion window `[σ − F, σ + F]` stays
/// inside `(nu, mu)` — a global argmin would latch onto the near-zero values
/// `F_n` takes next to essential-spectrum edges. No surviving minimum
/// surfaces as [`Error::NoMinimumFound`].
pub fn equivalence_check(pair: &TruncatedPair, nu: f64, mu: f64) -> Result<EquivalenceReport> {
    let lehmann = tau_extremes(pair, nu, mu)?;

    let swept = scan(pair, (nu, mu), EQUIVALENCE_GRID)?;
    let mut sigma = None;
    let mut best = f64::INFINITY;
    for &(cand, f) in &swept.minima {
        if cand - f > nu && cand + f < mu && f < best {
            best = f;
            sigma = Some(cand);
        }
    }
    let sigma = sigma.ok_or(Error::NoMinimumFound)?;

    let (s, dist_upper) = solve_left(pair, nu, sigma)?;
    let (t, dist_lower) = solve_right(pair, sigma, mu)?;

    let dev_upper = (dist_upper - lehmann.upper_bound).abs();
    let dev_lower = (dist_lower - lehmann.lower_bound).abs();
    let dev_s = (s - (nu + 1.0 / (2.0 * lehmann.tau_plus))).abs();
    let dev_t = (t - (mu + 1.0 / (2.0 * lehmann.tau_minus))).abs();
    Ok(EquivalenceReport {
        nu,
        mu,
        tau_plus: lehmann.tau_plus,
        tau_minus: lehmann.tau_minus,
        lehmann_lower: lehmann.lower_bound,
        lehmann_upper: lehmann.upper_bound,
        dist_lower,
        dist_upper,
        s,
        t,
        dev_upper,
        dev_lower,
        dev_s,
        dev_t,
        max_deviation: dev_upper.max(dev_lower).max(dev_s).max(dev_t),
        scale: 1.0 + nu.abs() + mu.abs(),
    })
}
