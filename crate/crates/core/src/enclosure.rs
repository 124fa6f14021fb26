//! Certified two-sided eigenvalue enclosures inside a spectral gap.
//!
//! Spectral inclusion says every interval `[λ − F_n(λ), λ + F_n(λ)]` meets
//! the spectrum. Inside a gap `(α, β)` of the essential spectrum, the
//! interlacing hypothesis — each candidate window is separated from its
//! neighbours and captures exactly one eigenvalue — turns that inclusion into
//! one-sided bounds:
//!
//! * if `F_n(s) < s − ν` for an anchor `ν` lying above everything to the
//!   left of the eigenvalue `m`, then `m ≤ s + F_n(s)`;
//! * if `F_n(t) < μ − t` for an anchor `μ` lying below everything to the
//!   right, then `m ≥ t − F_n(t)`.
//!
//! The sharpest such bounds come from the equations `F_n(s) = s − ν` and
//! `F_n(t) = μ − t`. Both side functions are monotone wherever `|F_n′| < 1`,
//! so the roots are simple bisection targets. Bounds certified once can then
//! serve as anchors for the neighbouring eigenvalue in the next sweep, which
//! contracts the enclosures geometrically; the gap edges `α` and `β` stay
//! pinned as the outermost anchors throughout.
//!
//! The capture hypothesis itself is never proved here — every report carries
//! an explicit `assumed_H` flag, and a refuting configuration (bounds that
//! cross, or windows that collide) surfaces as
//! [`Error::HypothesisHViolated`] rather than being silently patched.

use serde::Serialize;

use crate::distfun::{eval_f, ResidualPoint};
use crate::error::{Error, Result};
use crate::operator::{GapProblem, TruncatedPair};

/// Bisection stops once the root bracket is narrower than this.
pub const SOLVE_BISECT_TOL: f64 = 1e-12;

/// The returned root satisfies `|F_n(x) − (side gap)| <` this bound.
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-10;

/// Newton steps allowed after bisection (each is bracket-guarded).
pub const NEWTON_POLISH_STEPS: usize = 3;

/// Refinement sweeps allowed per truncation level before giving up.
pub const REFINE_SWEEP_CAP: usize = 200;

/// Enclosure of one eigenvalue: the outer window `[μ, ν]` read directly off
/// the minimum of `F_n`, and the certified interval `[lower, upper]` from the
/// side equations.
#[derive(Debug, Clone, PartialEq)]
pub struct EnclosureInterval {
    /// Local minimum of `F_n` anchoring this eigenvalue.
    pub sigma: f64,
    /// Outer lower bound `σ − F_n(σ)`.
    pub mu: f64,
    /// Outer upper bound `σ + F_n(σ)`.
    pub nu: f64,
    /// Certified lower bound `t − F_n(t)`.
    pub lower: f64,
    /// Certified upper bound `s + F_n(s)`.
    pub upper: f64,
    /// Root of `F_n(s) = s − (left anchor)`.
    pub s: f64,
    /// Root of `F_n(t) = (right anchor) − t`.
    pub t: f64,
}

impl EnclosureInterval {
    /// Width of the certified interval.
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// All enclosures over one gap, plus sweep bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct EnclosureState {
    /// Lower edge of the gap (left anchor of the first eigenvalue).
    pub alpha: f64,
    /// Upper edge of the gap (right anchor of the last eigenvalue).
    pub beta: f64,
    /// One entry per candidate eigenvalue, in ascending order.
    pub intervals: Vec<EnclosureInterval>,
    /// Refinement sweeps applied so far.
    pub iteration: usize,
    /// The capture hypothesis is assumed, not proved; always `true`.
    pub assumed_h: bool,
}

impl EnclosureState {
    /// Largest certified-interval width across all eigenvalues.
    pub fn max_width(&self) -> f64 {
        self.intervals.iter().map(EnclosureInterval::width).fold(0.0, f64::max)
    }
}

/// One certified interval in serialized reports.
#[derive(Debug, Clone, Serialize)]
pub struct IntervalReport {
    pub lower: f64,
    pub upper: f64,
    pub s: f64,
    pub t: f64,
}

/// Per-sweep convergence record.
#[derive(Debug, Clone, Serialize)]
pub struct HistoryRow {
    /// Cumulative sweep number.
    pub iteration: usize,
    /// Trial-space dimension the sweep ran on.
    pub dim: usize,
    /// Largest certified width after the sweep.
    pub max_width: f64,
}

/// Serializable summary of an enclosure run.
#[derive(Debug, Clone, Serialize)]
pub struct EnclosureReport {
    pub gap: [f64; 2],
    #[serde(rename = "assumed_H")]
    pub assumed_h: bool,
    pub intervals: Vec<IntervalReport>,
    pub iterations: usize,
    pub history: Vec<HistoryRow>,
}

/// Drops candidate minima whose inclusion window escapes the gap.
///
/// `candidates` are `(σ, F_n(σ))` pairs as produced by
/// [`crate::distfun::local_minima`]. A window `[σ − F, σ + F]` that pokes
/// outside `(a, b)` cannot capture an isolated eigenvalue of the gap — this
/// is what cuts spurious minima parked near the gap edges. An optional
/// absolute threshold on `F_n(σ)` tightens the cut further.
pub fn filter_candidates(
    interval: (f64, f64),
    candidates: &[(f64, f64)],
    spurious_threshold: Option<f64>,
) -> Vec<f64> {
    let (a, b) = interval;
    candidates
        .iter()
        .filter(|&&(sigma, f)| {
            let contained = sigma - f > a && sigma + f < b;
            let below = spurious_threshold.map_or(true, |th| f < th);
            contained && below
        })
        .map(|&(sigma, _)| sigma)
        .collect()
}

/// Solves `F_n(s) = s − nu_prev` on `(nu_prev, bracket_hi)` and returns
/// `(s, s + F_n(s))`.
///
/// The side function `φ(s) = F_n(s) − (s − nu_prev)` must be positive at the
/// left end and negative at the right end, else the bracket carries no root
/// and [`Error::BracketInvalid`] is returned. Bisection keeps the sign
/// change; a few guarded Newton steps sharpen the bracket. The returned `s`
/// sits on the `φ < 0` side, so `s + F_n(s)` over-estimates the exact root's
/// bound by at most the bracket width and the certificate survives solver
/// rounding.
pub fn solve_left(pair: &TruncatedPair, nu_prev: f64, bracket_hi: f64) -> Result<(f64, f64)> {
    solve_side(pair, nu_prev, bracket_hi, Side::Left)
}

/// Solves `F_n(t) = mu_next − t` on `(bracket_lo, mu_next)` and returns
/// `(t, t − F_n(t))`.
///
/// Mirror image of [`solve_left`]: `ψ(t) = F_n(t) − (mu_next − t)` is
/// negative at the left end and positive at the right end, and the returned
/// `t` sits on the conservative `ψ < 0` side.
pub fn solve_right(pair: &TruncatedPair, bracket_lo: f64, mu_next: f64) -> Result<(f64, f64)> {
    solve_side(pair, bracket_lo, mu_next, Side::Right)
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Left,
    Right,
}

impl Side {
    fn name(self) -> &'static str {
        match self {
            Side::Left => "solve_left",
            Side::Right => "solve_right",
        }
    }

    /// The side function: `φ` for [`Side::Left`], `ψ` for [`Side::Right`].
    /// Its anchor is the bracket end the bound is measured from.
    fn residual(self, point: &ResidualPoint, anchor: f64) -> f64 {
        match self {
            Side::Left => point.f_value - (point.lambda - anchor),
            Side::Right => point.f_value - (anchor - point.lambda),
        }
    }

    fn slope(self, point: &ResidualPoint) -> f64 {
        match self {
            Side::Left => point.f_prime - 1.0,
            Side::Right => point.f_prime + 1.0,
        }
    }
}

fn solve_side(pair: &TruncatedPair, lo0: f64, hi0: f64, side: Side) -> Result<(f64, f64)> {
    let bad = |lo: f64, hi: f64| Error::BracketInvalid { what: side.name(), lo, hi };
    if !(lo0 < hi0) || !lo0.is_finite() || !hi0.is_finite() {
        return Err(bad(lo0, hi0));
    }
    let anchor = match side {
        Side::Left => lo0,
        Side::Right => hi0,
    };
    let (mut lo, mut hi) = (lo0, hi0);
    let p_lo = eval_f(pair, lo, None)?;
    let p_hi = eval_f(pair, hi, Some(&p_lo.minimizer))?;
    let (r_lo, r_hi) = (side.residual(&p_lo, anchor), side.residual(&p_hi, anchor));
    // The residual is positive at the anchor end and negative at the other;
    // `kept_f` carries `F_n` at whichever end currently sits on the negative
    // (conservative) side, saving a final evaluation.
    let mut kept_f = match side {
        Side::Left => {
            if !(r_lo > 0.0 && r_hi < 0.0) {
                return Err(bad(lo0, hi0));
            }
            p_hi.f_value
        }
        Side::Right => {
            if !(r_lo < 0.0 && r_hi > 0.0) {
                return Err(bad(lo0, hi0));
            }
            p_lo.f_value
        }
    };
    let mut warm = p_hi.minimizer;

    let absorb = |x: f64, p: &ResidualPoint, lo: &mut f64, hi: &mut f64, kept_f: &mut f64| {
        let r = side.residual(p, anchor);
        if r < 0.0 {
            *kept_f = p.f_value;
            match side {
                Side::Left => *hi = x,
                Side::Right => *lo = x,
            }
        } else {
            match side {
                Side::Left => *lo = x,
                Side::Right => *hi = x,
            }
        }
        r
    };

    while hi - lo > SOLVE_BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        let p = eval_f(pair, mid, Some(&warm))?;
        absorb(mid, &p, &mut lo, &mut hi, &mut kept_f);
        warm = p.minimizer;
    }

    // Guarded Newton polish on the residual, never leaving the bracket.
    let mut x = 0.5 * (lo + hi);
    for _ in 0..NEWTON_POLISH_STEPS {
        if !(lo < x && x < hi) {
            break;
        }
        let p = eval_f(pair, x, Some(&warm))?;
        let r = absorb(x, &p, &mut lo, &mut hi, &mut kept_f);
        let slope = side.slope(&p);
        let usable = match side {
            Side::Left => slope < -1e-6,
            Side::Right => slope > 1e-6,
        };
        let degenerate = p.degenerate;
        warm = p.minimizer;
        if degenerate || !usable {
            break;
        }
        x -= r / slope;
    }

    match side {
        Side::Left => Ok((hi, hi + kept_f)),
        Side::Right => Ok((lo, lo - kept_f)),
    }
}

/// Builds the first enclosure of every candidate in the gap.
///
/// Reads the outer windows `[σ − F_n(σ), σ + F_n(σ)]` off the candidate
/// minima, checks that consecutive windows (and the gap edges) do not
/// collide, then solves the side equations anchored on the neighbouring
/// outer bounds. Window collisions and crossed bounds report
/// [`Error::HypothesisHViolated`] with the offending candidate index.
pub fn initial_enclosure(pair: &TruncatedPair, gap: &GapProblem) -> Result<EnclosureState> {
    let sigmas = gap.sigmas();
    if sigmas.is_empty() {
        return Err(Error::BadInput(
            "gap problem lists no candidate eigenvalues".into(),
        ));
    }
    let (alpha, beta) = (gap.alpha(), gap.beta());
    let r_count = sigmas.len();

    let mut intervals: Vec<EnclosureInterval> = Vec::with_capacity(r_count);
    for &sigma in sigmas {
        let p = eval_f(pair, sigma, None)?;
        intervals.push(EnclosureInterval {
            sigma,
            mu: sigma - p.f_value,
            nu: sigma + p.f_value,
            lower: f64::NAN,
            upper: f64::NAN,
            s: f64::NAN,
            t: f64::NAN,
        });
    }

    // Interlacing: α < μ_0, ν_j < μ_{j+1}, ν_last < β.
    for j in 0..=r_count {
        let left = if j == 0 { alpha } else { intervals[j - 1].nu };
        let right = if j == r_count { beta } else { intervals[j].mu };
        if !(left < right) {
            return Err(Error::HypothesisHViolated { index: j, lower: left, upper: right });
        }
    }

    for j in 0..r_count {
        let left_anchor = if j == 0 { alpha } else { intervals[j - 1].nu };
        let right_anchor = if j + 1 == r_count { beta } else { intervals[j + 1].mu };
        let sigma = intervals[j].sigma;
        let (s, upper) = solve_left(pair, left_anchor, sigma)?;
        let (t, lower) = solve_right(pair, sigma, right_anchor)?;
        let it = &mut intervals[j];
        it.s = s;
        it.t = t;
        // The side solutions can never be worse than the outer window;
        // clamping makes that exact against solver rounding.
        it.upper = upper.min(it.nu);
        it.lower = lower.max(it.mu);
        if it.lower > it.upper {
            return Err(Error::HypothesisHViolated {
                index: j,
                lower: it.lower,
                upper: it.upper,
            });
        }
    }

    Ok(EnclosureState { alpha, beta, intervals, iteration: 0, assumed_h: true })
}

/// One refinement sweep: re-solves every candidate with its neighbours'
/// current certified bounds as anchors.
///
/// All anchors come from the *previous* state, so the sweep is
/// order-independent. The first candidate keeps `α` as its left anchor and
/// the last keeps `β` on the right. New bounds are clamped against the old
/// ones, making the shrinkage exactly monotone; crossed bounds report
/// [`Error::HypothesisHViolated`].
pub fn refine(pair: &TruncatedPair, state: &EnclosureState) -> Result<EnclosureState> {
    let r_count = state.intervals.len();
    let mut next = state.clone();
    for j in 0..r_count {
        let left_anchor = if j == 0 { state.alpha } else { state.intervals[j - 1].upper };
        let right_anchor =
            if j + 1 == r_count { state.beta } else { state.intervals[j + 1].lower };
        let sigma = state.intervals[j].sigma;
        let (s, upper) = solve_left(pair, left_anchor, sigma)?;
        let (t, lower) = solve_right(pair, sigma, right_anchor)?;
        let it = &mut next.intervals[j];
        it.s = s;
        it.t = t;
        it.upper = upper.min(state.intervals[j].upper);
        it.lower = lower.max(state.intervals[j].lower);
        if it.lower > it.upper {
            return Err(Error::HypothesisHViolated {
                index: j,
                lower: it.lower,
                upper: it.upper,
            });
        }
    }
    next.iteration = state.iteration + 1;
    Ok(next)
}

/// Runs the full enclosure pipeline over a ladder of truncation levels.
///
/// `pairs` must be ordered by strictly increasing dimension. Each level is
/// swept until the largest one-sweep improvement drops below `tol` (or the
/// sweep cap trips); the state then carries over to the next level, where
/// fresh outer windows are intersected with the bounds already certified so
/// the enclosures never widen when the trial space grows.
pub fn enclose(
    pairs: &[TruncatedPair],
    gap: &GapProblem,
    tol: f64,
) -> Result<(EnclosureState, EnclosureReport)> {
    if pairs.is_empty() {
        return Err(Error::BadInput("enclose needs at least one truncation level".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::BadInput(format!("tolerance must be positive, got {tol}")));
    }
    for w in pairs.windows(2) {
        if w[1].dim() <= w[0].dim() {
            return Err(Error::BadInput(format!(
                "truncation dimensions must strictly increase, got {} then {}",
                w[0].dim(),
                w[1].dim()
            )));
        }
    }

    let mut history: Vec<HistoryRow> = Vec::new();
    let mut state = initial_enclosure(&pairs[0], gap)?;
    let mut total = 0usize;

    for (k, pair) in pairs.iter().enumerate() {
        if k > 0 {
            let fresh = initial_enclosure(pair, gap)?;
            state = carry_over(&state, fresh)?;
        }
        let mut sweeps = 0usize;
        loop {
            if sweeps >= REFINE_SWEEP_CAP {
                return Err(Error::IterationCapExceeded {
                    what: "enclosure refinement",
                    cap: REFINE_SWEEP_CAP,
                });
            }
            let next = refine(pair, &state)?;
            sweeps += 1;
            total += 1;
            let improvement = state
                .intervals
                .iter()
                .zip(&next.intervals)
                .map(|(old, new)| (old.upper - new.upper).max(new.lower - old.lower))
                .fold(0.0, f64::max);
            history.push(HistoryRow {
                iteration: total,
                dim: pair.dim(),
                max_width: next.max_width(),
            });
            state = next;
            if improvement < tol {
                break;
            }
        }
    }

    let report = EnclosureReport {
        gap: [gap.alpha(), gap.beta()],
        assumed_h: state.assumed_h,
        intervals: state
            .intervals
            .iter()
            .map(|it| IntervalReport { lower: it.lower, upper: it.upper, s: it.s, t: it.t })
            .collect(),
        iterations: total,
        history,
    };
    Ok((state, report))
}

/// Intersects carried bounds with a fresh state from a finer truncation.
fn carry_over(prev: &EnclosureState, mut fresh: EnclosureState) -> Result<EnclosureState> {
    debug_assert_eq!(prev.intervals.len(), fresh.intervals.len());
    for (j, (old, new)) in prev.intervals.iter().zip(fresh.intervals.iter_mut()).enumerate() {
        new.upper = new.upper.min(old.upper);
        new.lower = new.lower.max(old.lower);
        if new.lower > new.upper {
            return Err(Error::HypothesisHViolated {
                index: j,
                lower: new.lower,
                upper: new.upper,
            });
        }
    }
    fresh.iteration = prev.iteration;
    Ok(fresh)
}
