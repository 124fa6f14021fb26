//! The truncated operator pair `(M_n, D_n)` and the matrix family `B_n(λ)`.
//!
//! A truncation of a self-adjoint operator `M` to an n-dimensional trial
//! space with orthonormal basis is described completely by two matrices: the
//! compression `M_n` (entries `⟨Mψ_r, ψ_s⟩`) and the Gram matrix `D_n`
//! (entries `⟨Mψ_r, Mψ_s⟩`, or a computable surrogate). Everything the
//! distance-function method evaluates is assembled from them:
//!
//! ```text
//! B_n(λ) = D_n − 2λ·M_n + λ²·I
//! ```
//!
//! whose smallest eigenvalue is `min ‖Mf − λf‖²` over unit vectors in the
//! trial space — when `D_n` is exact. When only a larger truncation
//! `M_m` (m ≥ n) is available, the surrogate `D = P_n M P_m M P_n` gives the
//! two-level variant `B(m, n, λ)`, a lower bound on the exact quantity that
//! improves as `m` grows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_sym, Cholesky, SymMatrix};

/// Relative tolerance for the positive semidefiniteness of `D_n − M_n²`.
/// Eigensolver accuracy dominates, so anything stricter would reject valid
/// pairs.
pub const PSD_REL_TOL: f64 = 1e-10;

/// A truncated operator: the pair `(M_n, D_n)` plus a flag recording whether
/// `D_n` is the exact Gram matrix of `Mf` or a two-level surrogate.
///
/// Invariant: `D_n − M_n²` is positive semidefinite up to `−1e-10·‖D_n‖`
/// (it is the Gram matrix of the part of `Mf` outside the trial space), and
/// the two matrices share one dimension. Checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPair {
    m_mat: SymMatrix,
    d_mat: SymMatrix,
    exact_d: bool,
}

/// Serialization mirror of [`TruncatedPair`]:
/// `{"dim": n, "m": [[...]], "d": [[...]], "exact_d": bool}`.
#[derive(Serialize, Deserialize)]
struct PairDto {
    dim: usize,
    m: Vec<Vec<f64>>,
    d: Vec<Vec<f64>>,
    exact_d: bool,
}

impl TruncatedPair {
    /// Builds a pair, validating dimensions and the `D − M²` semidefiniteness
    /// invariant.
    pub fn new(m_mat: SymMatrix, d_mat: SymMatrix, exact_d: bool) -> Result<Self> {
        if m_mat.dim() != d_mat.dim() {
            return Err(Error::BadInput(format!(
                "matrix dimensions differ: m is {}, d is {}",
                m_mat.dim(),
                d_mat.dim()
            )));
        }
        let gap = d_mat.add_scaled(-1.0, &m_mat.mul_sym(&m_mat));
        let tol = PSD_REL_TOL * d_mat.frobenius();
        if !is_psd_within(&gap, tol) {
            return Err(Error::BadInput(
                "d − m² has an eigenvalue below the semidefiniteness tolerance".into(),
            ));
        }
        Ok(Self { m_mat, d_mat, exact_d })
    }

    /// Trial-space dimension.
    pub fn dim(&self) -> usize {
        self.m_mat.dim()
    }

    /// The compression `M_n`.
    pub fn m(&self) -> &SymMatrix {
        &self.m_mat
    }

    /// The Gram matrix `D_n` (exact or surrogate).
    pub fn d(&self) -> &SymMatrix {
        &self.d_mat
    }

    /// Whether `D_n` is exact. With a surrogate, distance values are lower
    /// bounds of the exact ones rather than equalities.
    pub fn exact_d(&self) -> bool {
        self.exact_d
    }

    /// Serializes to the JSON object `{"dim", "m", "d", "exact_d"}`.
    pub fn to_json(&self) -> String {
        let dto = PairDto {
            dim: self.dim(),
            m: self.m_mat.to_rows(),
            d: self.d_mat.to_rows(),
            exact_d: self.exact_d,
        };
        serde_json::to_string(&dto).expect("pair serialization cannot fail")
    }

    /// Parses and validates the JSON form. Slightly asymmetric matrices are
    /// symmetrized; shape or semidefiniteness violations are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let dto: PairDto = serde_json::from_str(text)
            .map_err(|e| Error::BadInput(format!("pair JSON: {e}")))?;
        let m = SymMatrix::from_rows(&dto.m)?;
        let d = SymMatrix::from_rows(&dto.d)?;
        if m.dim() != dto.dim {
            return Err(Error::BadInput(format!(
                "declared dim {} does not match matrix dimension {}",
                dto.dim,
                m.dim()
            )));
        }
        Self::new(m, d, dto.exact_d)
    }
}

/// A gap `(α, β)` of the essential spectrum together with the ascending
/// candidate minima `σ_r` believed to sit near the isolated eigenvalues
/// inside it.
///
/// Invariant: `α < σ_0 < σ_1 < ... < β`, all strictly.
#[derive(Debug, Clone, PartialEq)]
pub struct GapProblem {
    alpha: f64,
    beta: f64,
    sigmas: Vec<f64>,
}

impl GapProblem {
    /// Validates the strict ordering `α < σ_0 < ... < β`.
    pub fn new(alpha: f64, beta: f64, sigmas: Vec<f64>) -> Result<Self> {
        if !(alpha < beta) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::BadInput(format!(
                "gap endpoints must satisfy alpha < beta, got ({alpha}, {beta})"
            )));
        }
        let mut prev = alpha;
        for (i, &s) in sigmas.iter().enumerate() {
            if !(prev < s && s < beta) {
                return Err(Error::BadInput(format!(
                    "candidate sigma[{i}] = {s} breaks the ordering alpha < sigmas < beta"
                )));
            }
            prev = s;
        }
        Ok(Self { alpha, beta, sigmas })
    }

    /// Left gap endpoint `α`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Right gap endpoint `β`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The candidate minima, ascending.
    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }
}

/// `A + tol·I` positive definite implies the smallest eigenvalue of `A` is
/// at least `−tol`; a cheap Cholesky probe decides most cases, with a full
/// eigendecomposition as the tie-breaker when the probe fails marginally.
fn is_psd_within(a: &SymMatrix, tol: f64) -> bool {
    let mut probe = a.clone();
    probe.shift_diagonal(tol.max(f64::MIN_POSITIVE));
    if Cholesky::factor(&probe).is_ok() {
        return true;
    }
    let smallest = eig_sym(a).first().map(|p| p.value).unwrap_or(0.0);
    smallest >= -tol
}

/// Assembles `B_n(λ) = D_n − 2λ·M_n + λ²·I`.
///
/// The result is positive semidefinite up to the usual tolerance; its
/// smallest eigenvalue is the squared distance `F_n(λ)²`.
pub fn assemble_b(pair: &TruncatedPair, lambda: f64) -> SymMatrix {
    let mut b = pair.d().add_scaled(-2.0 * lambda, pair.m());
    b.shift_diagonal(lambda * lambda);
    b
}

/// Builds the two-level pair for the leading `n`-dimensional block of a
/// larger compression `M_m`: `M = (M_m)|_n` and the surrogate
/// `D_{rs} = Σ_{k<m} (M_m)_{rk}(M_m)_{ks}`, i.e. `P_n M P_m M P_n`.
///
/// With `m = n` this degenerates to `D = M²`, which recovers nothing beyond
/// the plain Ritz values; as `m` grows the surrogate increases toward the
/// exact Gram matrix.
pub fn two_level_pair(m_big: &SymMatrix, n: usize) -> Result<TruncatedPair> {
    let m = m_big.dim();
    if n == 0 || n > m {
        return Err(Error::BadInput(format!(
            "two-level block size {n} must be in 1..={m}"
        )));
    }
    let mut sub = SymMatrix::zeros(n)?;
    let mut d = SymMatrix::zeros(n)?;
    for r in 0..n {
        for s in r..n {
            sub.set(r, s, m_big.entry(r, s));
            let mut acc = 0.0;
            for k in 0..m {
                acc += m_big.entry(r, k) * m_big.entry(k, s);
            }
            d.set(r, s, acc);
        }
    }
    TruncatedPair::new(sub, d, false)
}

/// Assembles the two-level matrix
/// `B(m, n, λ) = P_n M P_m M P_n − 2λ·P_n M P_n + λ²·I` directly from a large
/// compression.
pub fn assemble_b_two_level(m_big: &SymMatrix, n: usize, lambda: f64) -> Result<SymMatrix> {
    let pair = two_level_pair(m_big, n)?;
    Ok(assemble_b(&pair, lambda))
}

/// Plain Ritz spectrum: the eigenvalues of `M_n`, ascending.
///
/// No filtering is applied — inside a gap of the essential spectrum these
/// values may be pure pollution, which is exactly what the rest of the crate
/// exists to detect and avoid.
pub fn ritz_spectrum(pair: &TruncatedPair) -> Vec<f64> {
    eig_sym(pair.m()).into_iter().map(|p| p.value).collect()
}
