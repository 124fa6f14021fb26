//! Dense real symmetric linear algebra.
//!
//! Exactly what the enclosure machinery needs and nothing more: full
//! eigendecomposition by cyclic Jacobi rotations, the smallest eigenpair by
//! shifted inverse iteration with Rayleigh-quotient shifts, Cholesky
//! factorization, and the symmetric-definite generalized eigenproblem reduced
//! through the Cholesky factor.
//!
//! Jacobi was chosen over faster tridiagonalization-based methods because it
//! is unconditionally stable for symmetric matrices and trivially
//! deterministic: the rotation order is fixed, so equal inputs give
//! bit-identical eigensystems on every run. All matrices here are desk-scale
//! (dimension ≤ [`DIM_CAP`]).

use crate::error::{Error, Result};

/// Hard limit on matrix dimension; larger requests are rejected up front.
pub const DIM_CAP: usize = 2048;

/// Jacobi terminates when the off-diagonal Frobenius norm falls below this
/// multiple of the full Frobenius norm.
const JACOBI_REL_TOL: f64 = 1e-14;

/// Jacobi sweep budget. Convergence is quadratic; well-conditioned symmetric
/// matrices need fewer than 15 sweeps even at the dimension cap.
const JACOBI_MAX_SWEEPS: usize = 60;

/// Default iteration budget for the inverse-iteration eigensolver.
const INVERSE_ITERATION_CAP: usize = 500;

/// Dense symmetric matrix in row-major storage.
///
/// Symmetry is a structural invariant, not a convention: every constructor and
/// mutator writes both `(i, j)` and `(j, i)`, so `entry(i, j) == entry(j, i)`
/// holds exactly (bitwise) at all times.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 || dim > DIM_CAP {
            return Err(Error::DimensionCap { dim, cap: DIM_CAP });
        }
        Ok(Self { dim, data: vec![0.0; dim * dim] })
    }

    /// Identity matrix of the given dimension.
    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        Ok(m)
    }

    /// Builds from dense rows, symmetrizing via `(a + aᵀ)/2` so that slightly
    /// asymmetric external data (e.g. hand-written JSON) is accepted. Rejects
    /// non-square input and non-finite entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::BadInput(format!(
                    "row {i} has length {}, expected {dim}",
                    row.len()
                )));
            }
        }
        for i in 0..dim {
            for j in i..dim {
                let v = 0.5 * (rows[i][j] + rows[j][i]);
                if !v.is_finite() {
                    return Err(Error::BadInput(format!("non-finite entry at ({i}, {j})")));
                }
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at `(i, j)`.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    /// Dense rows, for serialization.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| self.data[i * self.dim..(i + 1) * self.dim].to_vec())
            .collect()
    }

    /// `y = A·x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "matvec dimension mismatch");
        let mut y = vec![0.0; self.dim];
        for i in 0..self.dim {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            y[i] = acc;
        }
        y
    }

    /// Quadratic form `xᵀAx`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(&self.matvec(x), x)
    }

    /// `A·B` symmetrized; used for explicit squares of symmetric matrices,
    /// where the product is symmetric up to rounding.
    pub fn mul_sym(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim, other.dim, "mul_sym dimension mismatch");
        let n = self.dim;
        let mut out = SymMatrix { dim: n, data: vec![0.0; n * n] };
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.entry(i, k) * other.entry(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, s: f64, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim, other.dim, "add_scaled dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + s * b)
            .collect();
        SymMatrix { dim: self.dim, data }
    }

    /// Adds `s` to every diagonal entry, in place.
    pub fn shift_diagonal(&mut self, s: f64) {
        for i in 0..self.dim {
            self.data[i * self.dim + i] += s;
        }
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Trace.
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }
}

/// An eigenvalue with its unit eigenvector.
///
/// `iterations` is a diagnostic: the number of inverse-iteration steps (or
/// Jacobi sweeps for full decompositions) that produced the pair. It carries
/// no numerical meaning beyond letting callers observe warm-start savings.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// Which end of the spectrum to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Smallest,
    Largest,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &mut [f64]) {
    let n = norm(a);
    if n > 0.0 {
        for v in a.iter_mut() {
            *v /= n;
        }
    }
}

/// Flips the vector's sign so that its entry of largest magnitude is positive.
/// Eigenvectors are only defined up to sign; fixing it keeps outputs
/// reproducible byte for byte.
fn canonical_sign(v: &mut [f64]) {
    let mut best = 0usize;
    let mut best_abs = 0.0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = i;
        }
    }
    if v.get(best).copied().unwrap_or(0.0) < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

fn off_diagonal_frobenius(a: &SymMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = a.entry(i, j);
            acc += 2.0 * v * v;
        }
    }
    acc.sqrt()
}

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// Returns all `dim` eigenpairs sorted ascending by eigenvalue, eigenvectors
/// mutually orthonormal. The rotation schedule is the fixed row-cyclic order,
/// so results are deterministic. Convergence is declared when the off-diagonal
/// Frobenius norm drops below `1e-14·‖A‖_F`.
///
/// # Panics
///
/// Panics if the sweep budget is exhausted, which for a finite symmetric
/// matrix indicates a broken invariant (e.g. NaN entries smuggled past the
/// constructors), not a recoverable numerical condition.
pub fn eig_sym(a: &SymMatrix) -> Vec<EigenPair> {
    let n = a.dim();
    let mut w = a.clone();
    let mut vecs = SymMatrix::identity(n).expect("dimension already validated");
    let scale = a.frobenius();
    let tol = JACOBI_REL_TOL * scale;

    let mut sweeps = 0;
    if scale > 0.0 {
        while off_diagonal_frobenius(&w) > tol {
            assert!(
                sweeps < JACOBI_MAX_SWEEPS,
                "Jacobi failed to converge in {JACOBI_MAX_SWEEPS} sweeps; matrix invariants violated"
            );
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut w, &mut vecs, p, q);
                }
            }
            sweeps += 1;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        w.entry(i, i)
            .partial_cmp(&w.entry(j, j))
            .expect("eigenvalues are finite")
    });

    order
        .into_iter()
        .map(|k| {
            let mut vector: Vec<f64> = (0..n).map(|i| vecs.data[i * n + k]).collect();
            canonical_sign(&mut vector);
            EigenPair { value: w.entry(k, k), vector, iterations: sweeps }
        })
        .collect()
}

/// One Jacobi rotation annihilating the `(p, q)` entry, accumulated into `v`.
/// `v` is a plain square matrix reusing `SymMatrix` storage; its symmetry
/// invariant does not apply here (entries are written directly).
fn jacobi_rotate(w: &mut SymMatrix, v: &mut SymMatrix, p: usize, q: usize) {
    let n = w.dim();
    let apq = w.entry(p, q);
    if apq == 0.0 {
        return;
    }
    let theta = (w.entry(q, q) - w.entry(p, p)) / (2.0 * apq);
    // Smaller-angle root of t² + 2θt − 1 = 0, stable for large |θ|.
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    let app = w.entry(p, p);
    let aqq = w.entry(q, q);
    w.data[p * n + p] = app - t * apq;
    w.data[q * n + q] = aqq + t * apq;
    w.data[p * n + q] = 0.0;
    w.data[q * n + p] = 0.0;
    for k in 0..n {
        if k != p && k != q {
            let akp = w.entry(k, p);
            let akq = w.entry(k, q);
            let new_kp = akp - s * (akq + tau * akp);
            let new_kq = akq + s * (akp - tau * akq);
            w.set(k, p, new_kp);
            w.set(k, q, new_kq);
        }
    }
    for k in 0..n {
        let vkp = v.data[k * n + p];
        let vkq = v.data[k * n + q];
        v.data[k * n + p] = vkp - s * (vkq + tau * vkp);
        v.data[k * n + q] = vkq + s * (vkp - tau * vkq);
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    dim: usize,
    /// Row-major lower triangle, including the diagonal.
    l: Vec<f64>,
}

impl Cholesky {
    /// Factors `A = L·Lᵀ`. Fails with [`Error::NotPositiveDefinite`] on a
    /// non-positive pivot.
    pub fn factor(a: &SymMatrix) -> Result<Self> {
        let n = a.dim();
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut acc = a.entry(i, j);
                for k in 0..j {
                    acc -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if acc <= 0.0 {
                        return Err(Error::NotPositiveDefinite { index: i, pivot: acc });
                    }
                    l[i * n + i] = acc.sqrt();
                } else {
                    l[i * n + j] = acc / l[j * n + j];
                }
            }
        }
        Ok(Self { dim: n, l })
    }

    /// Solves `A·x = b` via the two triangular solves.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut y = b.to_vec();
        self.forward(&mut y);
        self.backward(&mut y);
        y
    }

    /// In-place forward substitution `L·y = b`.
    pub fn forward(&self, y: &mut [f64]) {
        let n = self.dim;
        for i in 0..n {
            let mut acc = y[i];
            for k in 0..i {
                acc -= self.l[i * n + k] * y[k];
            }
            y[i] = acc / self.l[i * n + i];
        }
    }

    /// In-place backward substitution `Lᵀ·x = y`.
    pub fn backward(&self, y: &mut [f64]) {
        let n = self.dim;
        for i in (0..n).rev() {
            let mut acc = y[i];
            for k in (i + 1)..n {
                acc -= self.l[k * n + i] * y[k];
            }
            y[i] = acc / self.l[i * n + i];
        }
    }
}

/// Smallest eigenpair of a symmetric positive semidefinite matrix by shifted
/// block inverse iteration with a two-dimensional Rayleigh–Ritz step.
///
/// The block pairs the caller's start vector with a fixed generic companion,
/// applies the shifted inverse to both, and extracts the smaller Ritz pair of
/// the resulting two-dimensional subspace. Carrying two directions is what
/// makes warm starts safe: a single-vector Rayleigh iteration seeded just past
/// a crossing of the two lowest eigenvalue branches locks onto the branch the
/// seed remembers, while the block keeps a foothold on both branches and the
/// Ritz step picks the true minimum.
///
/// The shift starts at zero and, from the third step on, tracks the current
/// Ritz value — offset below it by the residual norm so that the factored
/// matrix `A − shift·I + μ_reg·I` stays positive definite
/// (`μ_reg = 1e-14·trace/dim` absorbs semidefinite zeros). If a factorization
/// still fails, the shift is stepped further down by doubled multiples of
/// `1e-14·‖A‖`; a shift that remains singular after that raises
/// [`Error::SingularShift`].
///
/// A converged pair `(ρ, v)` is accepted only after a definiteness
/// certificate: `A − (ρ − margin)·I` must admit a Cholesky factorization,
/// proving no eigenvalue lies below `ρ − margin` (`margin = 1e-12·‖A‖`).
/// A start vector that happens to be an exact eigenvector of a higher branch
/// would otherwise pass the residual test instantly; the failed certificate
/// instead drops the shift below the smaller eigenvalue it just exposed, and
/// the iteration recovers it. The returned value therefore exceeds the true
/// smallest eigenvalue by at most `margin`, and never undercuts it by more
/// than the residual tolerance.
///
/// `start` seeds the primary direction; the deterministic cold start is the
/// normalized all-ones vector. A start with good overlap converges in fewer
/// iterations, observable through [`EigenPair::iterations`].
///
/// Fails with [`Error::IterationCapExceeded`] after 500 steps; callers are
/// expected to fall back to [`eig_sym`].
pub fn smallest_eig(a: &SymMatrix, start: Option<&[f64]>) -> Result<EigenPair> {
    let n = a.dim();
    let scale = a.frobenius().max(1.0);
    let mu_reg = 1e-14 * a.trace().abs().max(scale) / n as f64;
    let residual_tol = 1e-13 * scale;

    if n == 1 {
        return Ok(EigenPair { value: a.entry(0, 0), vector: vec![1.0], iterations: 0 });
    }

    let mut v1: Vec<f64> = match start {
        Some(s) => {
            assert_eq!(s.len(), n, "start vector dimension mismatch");
            s.to_vec()
        }
        None => vec![1.0; n],
    };
    if norm(&v1) == 0.0 {
        v1 = vec![1.0; n];
    }
    normalize(&mut v1);
    // Companion direction: the all-ones probe when a warm start occupies the
    // primary slot, an alternating sign pattern otherwise.
    let seed2: Vec<f64> = if start.is_some() {
        vec![1.0; n]
    } else {
        (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()
    };
    let mut v2 = companion(&v1, seed2);

    let mut shift = 0.0;
    for iter in 1..=INVERSE_ITERATION_CAP {
        let factor = factor_shifted(a, shift, mu_reg, scale)?;
        let mut w1 = factor.solve(&v1);
        normalize(&mut w1);
        let w2 = companion(&w1, factor.solve(&v2));

        // Rayleigh–Ritz in span{w1, w2}.
        let aw1 = a.matvec(&w1);
        let aw2 = a.matvec(&w2);
        let s11 = dot(&w1, &aw1);
        let s12 = dot(&w1, &aw2);
        let s22 = dot(&w2, &aw2);
        let (c, s) = small_ritz_direction(s11, s12, s22);

        let mut x: Vec<f64> = w1.iter().zip(&w2).map(|(p, q)| c * p + s * q).collect();
        normalize(&mut x);
        let ax: Vec<f64> = aw1.iter().zip(&aw2).map(|(p, q)| c * p + s * q).collect();
        let rho = dot(&x, &ax);
        let res_norm = {
            let mut acc = 0.0;
            for (r, xi) in ax.iter().zip(&x) {
                let d = r - rho * xi;
                acc += d * d;
            }
            acc.sqrt()
        };
        if res_norm <= residual_tol {
            let margin = 10.0 * residual_tol;
            let mut sliced = a.clone();
            sliced.shift_diagonal(margin - rho);
            if Cholesky::factor(&sliced).is_ok() {
                canonical_sign(&mut x);
                return Ok(EigenPair { value: rho, vector: x, iterations: iter });
            }
            // Certified non-minimal: some eigenvalue sits below ρ − margin.
            // Aim the shift under it and keep going.
            v1 = x;
            v2 = w1.iter().zip(&w2).map(|(p, q)| -s * p + c * q).collect();
            shift = rho - margin;
            continue;
        }

        v1 = x;
        v2 = w1.iter().zip(&w2).map(|(p, q)| -s * p + c * q).collect();
        if iter >= 2 {
            // Ritz-value shift, kept on the positive definite side: the
            // smallest eigenvalue lies within res_norm of rho.
            shift = rho - res_norm;
        }
    }
    Err(Error::IterationCapExceeded {
        what: "inverse iteration",
        cap: INVERSE_ITERATION_CAP,
    })
}

/// Orthonormalizes `candidate` against the unit vector `against`; if the
/// candidate collapses, falls back to coordinate vectors in order.
fn companion(against: &[f64], candidate: Vec<f64>) -> Vec<f64> {
    let n = against.len();
    let mut w = candidate;
    let mut attempt = 0usize;
    loop {
        let proj = dot(&w, against);
        for (wi, ai) in w.iter_mut().zip(against) {
            *wi -= proj * ai;
        }
        let len = norm(&w);
        if len > 1e-8 {
            for wi in w.iter_mut() {
                *wi /= len;
            }
            return w;
        }
        assert!(attempt < n, "no direction independent of a unit vector found");
        w = vec![0.0; n];
        w[attempt] = 1.0;
        attempt += 1;
    }
}

/// Unit eigenvector coefficients `(c, s)` of the smaller eigenvalue of the
/// symmetric 2×2 matrix `[[a11, a12], [a12, a22]]`.
fn small_ritz_direction(a11: f64, a12: f64, a22: f64) -> (f64, f64) {
    if a12 == 0.0 {
        return if a11 <= a22 { (1.0, 0.0) } else { (0.0, 1.0) };
    }
    let mid = 0.5 * (a11 + a22);
    let theta = mid - (0.5 * (a11 - a22)).hypot(a12);
    // Two algebraically equivalent expressions for the eigenvector; pick the
    // better-conditioned one.
    let (u1, u2) = (a12, theta - a11);
    let (t1, t2) = (theta - a22, a12);
    let (mut c, mut s) = if u1.hypot(u2) >= t1.hypot(t2) { (u1, u2) } else { (t1, t2) };
    let len = c.hypot(s);
    c /= len;
    s /= len;
    (c, s)
}

/// Cholesky of `A − shift·I + μ_reg·I`, walking the shift downward when the
/// matrix is not quite positive definite.
fn factor_shifted(a: &SymMatrix, shift: f64, mu_reg: f64, scale: f64) -> Result<Cholesky> {
    let mut delta = 0.0;
    let mut step = 1e-14 * scale;
    for _ in 0..64 {
        let mut shifted = a.clone();
        shifted.shift_diagonal(mu_reg - shift + delta);
        match Cholesky::factor(&shifted) {
            Ok(f) => return Ok(f),
            Err(Error::NotPositiveDefinite { .. }) => {
                delta += step;
                step *= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::SingularShift { shift })
}

/// Extreme eigenpair of the symmetric-definite pencil `A·x = τ·B·x`.
///
/// `B` must be symmetric positive definite. The pencil is reduced with the
/// Cholesky factor `B = L·Lᵀ` to the ordinary symmetric problem
/// `(L⁻¹·A·L⁻ᵀ)·y = τ·y`, solved by [`eig_sym`]; the returned vector
/// `x = L⁻ᵀ·y` is normalized so that `xᵀBx = 1`.
pub fn gen_eig_extreme(a: &SymMatrix, b: &SymMatrix, which: Extreme) -> Result<EigenPair> {
    assert_eq!(a.dim(), b.dim(), "pencil dimension mismatch");
    let n = a.dim();
    let chol = Cholesky::factor(b)?;

    // C = L⁻¹ A L⁻ᵀ, built column by column: solve L·z = A·col, then place z
    // as a column of Z = L⁻¹A, and finally apply L⁻¹ to Zᵀ's columns.
    let mut z = vec![0.0; n * n];
    for j in 0..n {
        let mut col: Vec<f64> = (0..n).map(|i| a.entry(i, j)).collect();
        chol.forward(&mut col);
        for i in 0..n {
            z[i * n + j] = col[i];
        }
    }
    let mut c = SymMatrix::zeros(n)?;
    for i in 0..n {
        let mut row: Vec<f64> = z[i * n..(i + 1) * n].to_vec();
        chol.forward(&mut row);
        for j in 0..=i {
            // (L⁻¹ Z ᵀ)ᵀ is symmetric in exact arithmetic; average the
            // rounding halves while filling the triangle.
            let prev = c.entry(i, j);
            if prev == 0.0 {
                c.set(i, j, row[j]);
            } else {
                c.set(i, j, 0.5 * (prev + row[j]));
            }
        }
        for j in (i + 1)..n {
            c.set(i, j, row[j]);
        }
    }

    let pairs = eig_sym(&c);
    let chosen = match which {
        Extreme::Smallest => pairs.first().expect("nonempty spectrum"),
        Extreme::Largest => pairs.last().expect("nonempty spectrum"),
    };
    let mut x = chosen.vector.clone();
    chol.backward(&mut x);
    // xᵀBx = yᵀy = 1 already, up to rounding; renormalize in the B inner
    // product for a clean contract.
    let bnorm = b.quad_form(&x).sqrt();
    if bnorm > 0.0 {
        for v in x.iter_mut() {
            *v /= bnorm;
        }
    }
    canonical_sign(&mut x);
    Ok(EigenPair { value: chosen.value, vector: x, iterations: chosen.iterations })
}
