//! Shared oracles and generators for the integration tests.
//!
//! The quadrature oracles recompute model matrix entries from their defining
//! integrals, independently of the closed forms shipped in the library; the
//! generators build randomized-but-seeded operators with planted spectra.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use specgap::linalg::SymMatrix;
use specgap::operator::TruncatedPair;

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual:.17e}, expected {expected:.17e} (tol {tol:.1e}, off by {:.3e})",
        (actual - expected).abs()
    );
}

/// Adaptive Simpson quadrature for smooth integrands.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Normalized Legendre polynomial `√((2k+1)/2)·P_k(t)` on `(−1, 1)`.
pub fn legendre_normalized(k: usize, t: f64) -> f64 {
    let mut p_prev = 1.0;
    let mut p = t;
    if k == 0 {
        return (0.5f64).sqrt();
    }
    for j in 1..k {
        let j = j as f64;
        let next = ((2.0 * j + 1.0) * t * p - j * p_prev) / (j + 1.0);
        p_prev = p;
        p = next;
    }
    ((2.0 * k as f64 + 1.0) / 2.0).sqrt() * p
}

/// Step-model basis function `e_r(x) = √(2/π)·cos(rx)` (`r ≥ 1`) on `(0, π)`.
pub fn step_basis(r: usize, x: f64) -> f64 {
    (2.0 / std::f64::consts::PI).sqrt() * (r as f64 * x).cos()
}

/// Step entry oracle: `(2/π)·∫_0^cut cos(rx)·cos(sx) dx` by quadrature.
pub fn step_entry_oracle(cut: f64, r: usize, s: usize) -> f64 {
    integrate(&|x| step_basis(r, x) * step_basis(s, x), 0.0, cut, 1e-13)
}

/// Step coupling oracle: `∫_0^cut e_r(x)·(1/√π) dx` by quadrature.
pub fn step_coupling_oracle(cut: f64, r: usize) -> f64 {
    integrate(
        &|x| step_basis(r, x) / std::f64::consts::PI.sqrt(),
        0.0,
        cut,
        1e-13,
    )
}

/// Piecewise-linear-model basis function for level `r` on `(−2, 2)`.
///
/// Level 0 is the constant `1/2`; level `r ≥ 1` is the shifted normalized
/// Legendre polynomial of degree `r` on `(0, 2)`, level `r ≤ −1` its
/// counterpart of degree `|r|` on `(−2, 0)`.
pub fn linear_basis(r: i64, x: f64) -> f64 {
    if r == 0 {
        0.5
    } else if r >= 1 {
        if x <= 0.0 {
            0.0
        } else {
            legendre_normalized(r as usize, x - 1.0)
        }
    } else if x >= 0.0 {
        0.0
    } else {
        legendre_normalized((-r) as usize, x + 1.0)
    }
}

/// Piecewise-linear entry oracle: `∫ m(x)·e_r(x)·e_s(x) dx` by per-half
/// quadrature of the coefficient `m(x) = α± + β±·x`.
pub fn linear_entry_oracle(
    alpha: [f64; 2],
    beta: [f64; 2],
    r: i64,
    s: i64,
) -> f64 {
    let f = |x: f64| {
        let m = if x < 0.0 { alpha[0] + beta[0] * x } else { alpha[1] + beta[1] * x };
        m * linear_basis(r, x) * linear_basis(s, x)
    };
    integrate(&f, -2.0, 0.0, 1e-13) + integrate(&f, 0.0, 2.0, 1e-13)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Conjugates `diag(values)` by a product of random Givens rotations.
pub fn random_conjugated_diag(values: &[f64], rng: &mut ChaCha8Rng) -> SymMatrix {
    let n = values.len();
    let mut rows = vec![vec![0.0; n]; n];
    for (i, &v) in values.iter().enumerate() {
        rows[i][i] = v;
    }
    for _ in 0..3 * n * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let (c, s) = (theta.cos(), theta.sin());
        // Symmetric two-sided rotation in the (i, j) plane.
        for k in 0..n {
            let (a, b) = (rows[i][k], rows[j][k]);
            rows[i][k] = c * a - s * b;
            rows[j][k] = s * a + c * b;
        }
        for k in 0..n {
            let (a, b) = (rows[k][i], rows[k][j]);
            rows[k][i] = c * a - s * b;
            rows[k][j] = s * a + c * b;
        }
    }
    SymMatrix::from_rows(&rows).expect("rotation preserves symmetry")
}

/// A random symmetric positive definite matrix with unit-ish scale.
pub fn random_spd(dim: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
    let g: Vec<Vec<f64>> =
        (0..dim).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let mut rows = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = 0.0;
            for (row_k, _) in g.iter().enumerate() {
                acc += g[row_k][i] * g[row_k][j];
            }
            rows[i][j] = acc / dim as f64;
            if i == j {
                rows[i][j] += 0.1;
            }
        }
    }
    SymMatrix::from_rows(&rows).expect("Gram matrix is symmetric")
}

/// A random truncation pair whose `M` has essential-looking clusters in
/// `[−3, −1]` and `[1, 3]` plus one planted eigenvalue in `(−0.4, 0.4)`,
/// and whose `D` exceeds `M²` by a small positive definite margin.
///
/// The planted eigenvalue is returned alongside; the gap to probe is
/// `(−1, 1)` with evaluation points `∓0.7`.
pub fn random_gap_pair(dim: usize, rng: &mut ChaCha8Rng) -> (TruncatedPair, f64) {
    assert!(dim >= 3);
    let planted = rng.gen_range(-0.4..0.4);
    let mut values = vec![planted];
    for k in 0..dim - 1 {
        let band = if k % 2 == 0 { (1.0, 3.0) } else { (-3.0, -1.0) };
        values.push(rng.gen_range(band.0..band.1));
    }
    let m = random_conjugated_diag(&values, rng);
    let mm = m.mul_sym(&m);
    let bump = random_spd(dim, rng);
    let mut d_rows = mm.to_rows();
    let bump_rows = bump.to_rows();
    for i in 0..dim {
        for j in 0..dim {
            d_rows[i][j] += 1e-4 * bump_rows[i][j];
        }
    }
    let d = SymMatrix::from_rows(&d_rows).expect("sum of symmetric matrices");
    (TruncatedPair::new(m, d, false).expect("d dominates m^2 by construction"), planted)
}
