//! Benchmark operators with known spectra, and pollution constructions.
//!
//! Two families of multiplication-type operators are provided. Both have
//! purely essential band spectrum as plain multiplication operators; the
//! twist is a compression to the orthogonal complement of one distinguished
//! step-shaped mode, which plants exactly one genuine eigenvalue inside the
//! spectral gap. The eigenvalue solves a closed-form secular equation, so
//! every bound produced elsewhere in the crate can be checked against a
//! near-exact reference value.
//!
//! * **Step family** — multiplication by the indicator of `(0, cut)` on
//!   `(0, π)`, written in the cosine basis `e_r(x) = √(2/π)·cos(rx)` and
//!   compressed off the constant mode. Essential spectrum `{0} ∪ {1}`, one
//!   eigenvalue `(π − cut)/π` in the gap `(0, 1)`, secular function
//!   `Ξ(λ) = cut/(1 − λ)` with the eigenvalue at `Ξ(λ) = π`. The
//!   eigenfunction is itself a step, so its cosine coefficients decay only
//!   like `1/r` — convergence is slow and spurious minima appear readily at
//!   coarse truncations, which makes this the pollution stress test.
//! * **Piecewise-linear family** — multiplication by `α± + β±·x` on the two
//!   halves of `(−2, 2)`, in half-interval Legendre bases, compressed off
//!   the odd mode `sign(x)/2`. Essential spectrum
//!   `[α⁻ − 2β⁻, α⁻] ∪ [α⁺, α⁺ + 2β⁺]`, gap `(α⁻, α⁺)`, secular function
//!   `Ξ(λ) = 4 + λ·g(λ)` with logarithmic `g`; `Ξ(λ) = 4` also holds
//!   trivially at `λ = 0`, so the eigenvalue is the root of the reduced
//!   factor `g`. The matrix truncations are tridiagonal and the quadratic
//!   data `D = M² + E` is exact, with `E` the corner correction for the
//!   couplings the truncation cuts off.
//!
//! The module also synthesizes spectral pollution on demand: a diagonal
//! operator with eigenvalue pairs straddling a target `μ`, plus rotated
//! two-dimensional trial vectors whose Ritz matrix is exactly `μ·I` at every
//! trial-space size. Plain Galerkin eigenvalues are helpless against this;
//! the distance function is not, which is the point of the exercise.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_sym, SymMatrix};
use crate::operator::TruncatedPair;

/// Bisection width for secular-equation roots.
pub const XI_SOLVE_TOL: f64 = 1e-12;

/// Relative inset from the gap edges when bracketing secular roots.
pub const XI_BRACKET_INSET: f64 = 1e-9;

/// Step coefficient: the indicator of `(0, cut)` on `(0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCoefficient {
    cut: f64,
}

impl StepCoefficient {
    /// Requires `0 < cut < π`.
    pub fn new(cut: f64) -> Result<Self> {
        if !cut.is_finite() || !(0.0 < cut && cut < PI) {
            return Err(Error::BadInput(format!(
                "step cut must lie strictly between 0 and pi, got {cut}"
            )));
        }
        Ok(Self { cut })
    }

    pub fn cut(&self) -> f64 {
        self.cut
    }

    /// The genuine eigenvalue `(π − cut)/π` planted in the gap `(0, 1)`.
    pub fn eigenvalue(&self) -> f64 {
        (PI - self.cut) / PI
    }
}

/// Piecewise-linear coefficient: `α⁻ + β⁻·x` on `(−2, 0)`, `α⁺ + β⁺·x` on
/// `(0, 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseLinearCoefficient {
    alpha_minus: f64,
    alpha_plus: f64,
    beta_minus: f64,
    beta_plus: f64,
}

impl PiecewiseLinearCoefficient {
    /// Requires `α⁻ < α⁺` (a nonempty gap) and `β± ≥ 0` (bands that do not
    /// invade the gap). Zero slopes are allowed — they degenerate the bands
    /// to points — but the secular machinery needs both slopes positive.
    pub fn new(alpha_minus: f64, alpha_plus: f64, beta_minus: f64, beta_plus: f64) -> Result<Self> {
        let all_finite = alpha_minus.is_finite()
            && alpha_plus.is_finite()
            && beta_minus.is_finite()
            && beta_plus.is_finite();
        if !all_finite || !(alpha_minus < alpha_plus) || beta_minus < 0.0 || beta_plus < 0.0 {
            return Err(Error::BadInput(format!(
                "piecewise-linear coefficient needs alpha- < alpha+ and beta± >= 0, got \
                 alpha = [{alpha_minus}, {alpha_plus}], beta = [{beta_minus}, {beta_plus}]"
            )));
        }
        Ok(Self { alpha_minus, alpha_plus, beta_minus, beta_plus })
    }

    pub fn alpha_minus(&self) -> f64 {
        self.alpha_minus
    }

    pub fn alpha_plus(&self) -> f64 {
        self.alpha_plus
    }

    pub fn beta_minus(&self) -> f64 {
        self.beta_minus
    }

    pub fn beta_plus(&self) -> f64 {
        self.beta_plus
    }
}

/// Either benchmark family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientModel {
    Step(StepCoefficient),
    Linear(PiecewiseLinearCoefficient),
}

impl CoefficientModel {
    /// The gap of the essential spectrum the eigenvalue sits in.
    pub fn spectral_gap(&self) -> (f64, f64) {
        match self {
            CoefficientModel::Step(_) => (0.0, 1.0),
            CoefficientModel::Linear(c) => (c.alpha_minus, c.alpha_plus),
        }
    }

    /// Builds the truncation pair at size `n`.
    ///
    /// For the step family `n` is the number of cosine modes; for the
    /// piecewise-linear family the matrix dimension is `2n + 1`.
    pub fn build(&self, n: usize) -> Result<TruncatedPair> {
        match self {
            CoefficientModel::Step(c) => build_step(c, n),
            CoefficientModel::Linear(c) => build_linear(c, n),
        }
    }

    /// The secular function `Ξ(λ)` on the gap.
    pub fn xi(&self, lambda: f64) -> Result<f64> {
        match self {
            CoefficientModel::Step(c) => {
                if lambda == 1.0 {
                    return Err(Error::BadInput("xi is singular at lambda = 1".into()));
                }
                Ok(c.cut / (1.0 - lambda))
            }
            CoefficientModel::Linear(c) => Ok(4.0 + lambda * linear_g(c, lambda)?),
        }
    }

    /// Target value of `Ξ` at the eigenvalue: the length of the underlying
    /// interval.
    pub fn xi_target(&self) -> f64 {
        match self {
            CoefficientModel::Step(_) => PI,
            CoefficientModel::Linear(_) => 4.0,
        }
    }

    /// Solves the secular equation for the eigenvalue inside `interval`.
    ///
    /// The reduced secular factor is strictly increasing on the gap, so a
    /// sign check at the (slightly inset) interval ends either certifies a
    /// root or returns [`Error::NoRootInGap`]. For the piecewise-linear
    /// family the reduced factor is `g` itself, which skips the trivial
    /// non-eigenvalue solution of `Ξ(λ) = 4` at `λ = 0`.
    pub fn xi_solve(&self, interval: (f64, f64)) -> Result<f64> {
        let (a, b) = interval;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::BadInput(format!(
                "xi_solve interval must satisfy a < b, got ({a}, {b})"
            )));
        }
        let inset = XI_BRACKET_INSET * (b - a);
        let (mut lo, mut hi) = (a + inset, b - inset);
        let reduced = |lambda: f64| -> Result<f64> {
            match self {
                CoefficientModel::Step(c) => Ok(c.cut / (1.0 - lambda) - PI),
                CoefficientModel::Linear(c) => linear_g(c, lambda),
            }
        };
        let (r_lo, r_hi) = (reduced(lo)?, reduced(hi)?);
        if !(r_lo < 0.0 && r_hi > 0.0) {
            return Err(Error::NoRootInGap { lo: a, hi: b });
        }
        while hi - lo > XI_SOLVE_TOL {
            let mid = 0.5 * (lo + hi);
            if reduced(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// The logarithmic factor `g` of the piecewise-linear secular function.
///
/// Strictly increasing from `−∞` to `+∞` on the gap `(α⁻, α⁺)`; its root is
/// the eigenvalue. Needs both slopes strictly positive.
fn linear_g(c: &PiecewiseLinearCoefficient, lambda: f64) -> Result<f64> {
    if !(c.beta_minus > 0.0 && c.beta_plus > 0.0) {
        return Err(Error::BadInput(
            "the secular function needs strictly positive slopes beta±".into(),
        ));
    }
    if !(c.alpha_minus < lambda && lambda < c.alpha_plus) {
        return Err(Error::BadInput(format!(
            "xi is defined on the open gap ({}, {}), got {lambda}",
            c.alpha_minus, c.alpha_plus
        )));
    }
    let plus = ((c.alpha_plus + 2.0 * c.beta_plus - lambda) / (c.alpha_plus - lambda)).ln()
        / c.beta_plus;
    let minus = ((c.alpha_minus - lambda) / (c.alpha_minus - 2.0 * c.beta_minus - lambda)).ln()
        / c.beta_minus;
    Ok(plus + minus)
}

/// Serializable model description, as read from configuration files.
///
/// ```json
/// {"model": "step", "cut": 1.0, "n": 8}
/// {"model": "linear", "alpha": [-1.0, 1.0], "beta": [30.0, 40.0], "n": 50}
/// ```
///
/// The `alpha`/`beta` arrays list the minus-side value first. `n` is an
/// optional default truncation size; command-line flags override it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Step {
        cut: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    Linear {
        alpha: [f64; 2],
        beta: [f64; 2],
        #[serde(skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
}

impl ModelSpec {
    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json)
            .map_err(|e| Error::BadInput(format!("cannot parse model spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model spec serializes")
    }

    /// Validates the parameters into a coefficient model.
    pub fn coefficient(&self) -> Result<CoefficientModel> {
        match *self {
            ModelSpec::Step { cut, .. } => Ok(CoefficientModel::Step(StepCoefficient::new(cut)?)),
            ModelSpec::Linear { alpha, beta, .. } => Ok(CoefficientModel::Linear(
                PiecewiseLinearCoefficient::new(alpha[0], alpha[1], beta[0], beta[1])?,
            )),
        }
    }

    /// The default truncation size carried by the spec, if any.
    pub fn default_n(&self) -> Option<usize> {
        match *self {
            ModelSpec::Step { n, .. } | ModelSpec::Linear { n, .. } => n,
        }
    }
}

/// Builds the step-family truncation with `n` cosine modes.
///
/// With `e_r(x) = √(2/π)·cos(rx)` and `χ` the indicator of `(0, cut)`:
///
/// ```text
/// M_rs = (1/π)·[sin((r−s)·cut)/(r−s) + sin((r+s)·cut)/(r+s)]   (r ≠ s)
/// M_rr = (1/π)·[cut + sin(2r·cut)/(2r)]
/// c_r  = (√2/π)·sin(r·cut)/r
/// ```
///
/// `c` collects the couplings into the compressed-away constant mode, so
/// `D = M − c·cᵀ` is the exact quadratic data of the compression and the
/// pair carries `exact_d`.
pub fn build_step(coeff: &StepCoefficient, n: usize) -> Result<TruncatedPair> {
    if n == 0 {
        return Err(Error::BadInput("truncation size must be at least 1".into()));
    }
    let cut = coeff.cut;
    let mut m = SymMatrix::zeros(n)?;
    let mut d = SymMatrix::zeros(n)?;
    let c: Vec<f64> =
        (1..=n).map(|r| 2f64.sqrt() / PI * (r as f64 * cut).sin() / r as f64).collect();
    for i in 0..n {
        let r = (i + 1) as f64;
        for j in i..n {
            let s = (j + 1) as f64;
            let entry = if i == j {
                (cut + (2.0 * r * cut).sin() / (2.0 * r)) / PI
            } else {
                (((r - s) * cut).sin() / (r - s) + ((r + s) * cut).sin() / (r + s)) / PI
            };
            m.set(i, j, entry);
            d.set(i, j, entry - c[i] * c[j]);
        }
    }
    TruncatedPair::new(m, d, true)
}

/// Builds the piecewise-linear truncation of dimension `2n + 1`.
///
/// Rows are indexed by the Legendre level `r ∈ {−n, …, n}` (stored at
/// `r + n`): level `r ≥ 1` is the degree-`r` shifted Legendre polynomial on
/// `(0, 2)`, level `r ≤ −1` its counterpart on `(−2, 0)`, and level 0 is
/// the constant mode. With `γ_k = k/√(4k² − 1)`, `M` is
/// tridiagonal and the only products lost to truncation are the couplings to
/// levels `±(n+1)`, which the corner matrix `E` restores:
///
/// ```text
/// D = M² + E,    E = diag((β⁻γ_{n+1})², 0, …, 0, (β⁺γ_{n+1})²)
/// ```
///
/// so the pair carries `exact_d` at every size.
pub fn build_linear(coeff: &PiecewiseLinearCoefficient, n: usize) -> Result<TruncatedPair> {
    if n == 0 {
        return Err(Error::BadInput("truncation size must be at least 1".into()));
    }
    let dim = 2 * n + 1;
    let gamma = |k: usize| -> f64 {
        let k = k as f64;
        k / (4.0 * k * k - 1.0).sqrt()
    };
    let (am, ap, bm, bp) = (coeff.alpha_minus, coeff.alpha_plus, coeff.beta_minus, coeff.beta_plus);

    let mut m = SymMatrix::zeros(dim)?;
    for r in -(n as i64)..=(n as i64) {
        let i = (r + n as i64) as usize;
        let diag = if r >= 1 {
            ap + bp
        } else if r <= -1 {
            am - bm
        } else {
            0.5 * (ap + bp + am - bm)
        };
        m.set(i, i, diag);
        if r < n as i64 {
            let off = if r >= 1 {
                bp * gamma(r as usize + 1)
            } else if r == 0 {
                bp * gamma(1) * FRAC_1_SQRT_2
            } else if r == -1 {
                bm * gamma(1) * FRAC_1_SQRT_2
            } else {
                bm * gamma(r.unsigned_abs() as usize)
            };
            m.set(i, i + 1, off);
        }
    }

    let mut d = m.mul_sym(&m);
    let corner_minus = (bm * gamma(n + 1)).powi(2);
    let corner_plus = (bp * gamma(n + 1)).powi(2);
    d.set(0, 0, d.entry(0, 0) + corner_minus);
    d.set(dim - 1, dim - 1, d.entry(dim - 1, dim - 1) + corner_plus);
    TruncatedPair::new(m, d, true)
}

/// A synthesized spectral-pollution construction.
///
/// Level `k` of the host operator contributes the eigenvalue pair
/// `(λ⁰_k, λ¹_k)` straddling the target, and the trial vector
/// `ψ_k = cos(a_k)·e_{2k} + sin(a_k)·e_{2k+1}` mixes the two eigenvectors so
/// that every Rayleigh quotient equals the target exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PollutionConstruction {
    /// The value the Ritz matrix collapses onto.
    pub target_mu: f64,
    /// Mixing angles `a_k`, one per level.
    pub angles: Vec<f64>,
    /// Lower eigenvalue of each level.
    pub lambda0: Vec<f64>,
    /// Upper eigenvalue of each level.
    pub lambda1: Vec<f64>,
    /// Human-readable recipe for the trial vectors.
    pub basis_map: String,
}

impl PollutionConstruction {
    /// Number of synthesized levels (host dimension is twice this).
    pub fn levels(&self) -> usize {
        self.angles.len()
    }
}

/// Chooses mixing angles so every trial vector has Rayleigh quotient `mu`.
///
/// Each level needs `λ⁰_k ≤ mu ≤ λ¹_k` with `λ⁰_k < λ¹_k`; the angle solves
/// `sin²(a_k) = (mu − λ⁰_k)/(λ¹_k − λ⁰_k)`. A target outside some bracket
/// reports [`Error::MuOutsideBrackets`] for that level.
pub fn synthesize_pollution(
    lambda0: &[f64],
    lambda1: &[f64],
    mu: f64,
) -> Result<PollutionConstruction> {
    if lambda0.is_empty() || lambda0.len() != lambda1.len() {
        return Err(Error::BadInput(format!(
            "level arrays must be nonempty and of equal length, got {} and {}",
            lambda0.len(),
            lambda1.len()
        )));
    }
    if !mu.is_finite() {
        return Err(Error::BadInput(format!("target must be finite, got {mu}")));
    }
    let mut angles = Vec::with_capacity(lambda0.len());
    for (k, (&lo, &hi)) in lambda0.iter().zip(lambda1).enumerate() {
        if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
            return Err(Error::BadInput(format!(
                "level {k} needs finite lambda0 < lambda1, got ({lo}, {hi})"
            )));
        }
        if !(lo <= mu && mu <= hi) {
            return Err(Error::MuOutsideBrackets { index: k, mu, lo, hi });
        }
        angles.push(((mu - lo) / (hi - lo)).sqrt().asin());
    }
    Ok(PollutionConstruction {
        target_mu: mu,
        angles,
        lambda0: lambda0.to_vec(),
        lambda1: lambda1.to_vec(),
        basis_map: "psi_k = cos(a_k)*e_{2k} + sin(a_k)*e_{2k+1}".into(),
    })
}

/// Computes the Ritz matrix of the pollution construction honestly.
///
/// Assembles the diagonal host operator of dimension `2·levels`, applies it
/// to the first `n_trial` rotated trial vectors and takes inner products —
/// no shortcut through the algebra that predicts the answer. The result
/// equals `target_mu · I` up to rounding, which is exactly the failure mode
/// this crate exists to defeat.
pub fn pollution_ritz_matrix(
    construction: &PollutionConstruction,
    n_trial: usize,
) -> Result<SymMatrix> {
    let levels = construction.levels();
    if n_trial == 0 || n_trial > levels {
        return Err(Error::BadInput(format!(
            "trial count must lie in 1..={levels}, got {n_trial}"
        )));
    }
    let host_dim = 2 * levels;
    let mut host = vec![0.0; host_dim];
    for k in 0..levels {
        host[2 * k] = construction.lambda0[k];
        host[2 * k + 1] = construction.lambda1[k];
    }
    let trial: Vec<Vec<f64>> = (0..n_trial)
        .map(|k| {
            let mut v = vec![0.0; host_dim];
            v[2 * k] = construction.angles[k].cos();
            v[2 * k + 1] = construction.angles[k].sin();
            v
        })
        .collect();
    let mut ritz = SymMatrix::zeros(n_trial)?;
    for j in 0..n_trial {
        let applied: Vec<f64> = trial[j].iter().zip(&host).map(|(v, h)| v * h).collect();
        for k in j..n_trial {
            let entry: f64 = applied.iter().zip(&trial[k]).map(|(a, t)| a * t).sum();
            ritz.set(j, k, entry);
        }
    }
    Ok(ritz)
}

/// The mode-weighted mass `√(Σ_r c_r² / r²)` of a coefficient vector
/// (`r` counts from 1).
///
/// For a unit vector this lies in `[1/n, 1]`: concentrating on the first
/// mode gives 1, on the last mode `1/n`. It collapses toward zero exactly
/// when the coefficient mass escapes to ever-higher modes as `n` grows.
pub fn smoothness_quotient(c: &[f64]) -> f64 {
    c.iter()
        .enumerate()
        .map(|(i, &v)| (v / (i + 1) as f64).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Smoothness quotient of one Ritz vector of the step model at size `n`.
///
/// Ritz pairs are indexed ascending by value. A spurious Ritz value keeps
/// its quotient collapsing as `n` grows — its vectors flee to high modes —
/// while the Ritz value tracking the genuine eigenvalue keeps a quotient
/// bounded away from zero.
pub fn collapse_quotient(coeff: &StepCoefficient, n: usize, which_ritz: usize) -> Result<f64> {
    let pair = build_step(coeff, n)?;
    let eigs = eig_sym(pair.m());
    let Some(pair_k) = eigs.get(which_ritz) else {
        return Err(Error::RitzIndexOutOfRange { index: which_ritz, len: eigs.len() });
    };
    Ok(smoothness_quotient(&pair_k.vector))
}
