//! Small dense linear algebra on `ndarray` matrices, generic over the scalar.
//!
//! Everything here runs on matrices of a few dozen rows at most (normal
//! equations, Kalman innovation covariances, companion forms), so plain
//! O(n^3) routines with partial pivoting are the right tool.

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::num::{cast, Scalar};

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
/// Returns `None` when a pivot drops below `eps` times the largest diagonal.
pub fn cholesky<F: Scalar>(a: ArrayView2<F>) -> Option<Array2<F>> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let max_diag = (0..n).fold(F::zero(), |m, i| m.max(a[[i, i]].abs()));
    let floor = cast::<F>(1e-14) * max_diag.max(F::one());
    let mut l = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[[i, j]];
            for k in 0..j {
                s = s - l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if s <= floor {
                    return None;
                }
                l[[i, i]] = s.sqrt();
            } else {
                l[[i, j]] = s / l[[j, j]];
            }
        }
    }
    Some(l)
}

/// Solves `A x = b` for symmetric positive-definite `A` via Cholesky.
pub fn solve_spd<F: Scalar>(a: ArrayView2<F>, b: ArrayView2<F>) -> Option<Array2<F>> {
    let l = cholesky(a)?;
    let n = a.nrows();
    let m = b.ncols();
    let mut x = b.to_owned();
    // forward: L y = b
    for col in 0..m {
        for i in 0..n {
            let mut s = x[[i, col]];
            for k in 0..i {
                s = s - l[[i, k]] * x[[k, col]];
            }
            x[[i, col]] = s / l[[i, i]];
        }
        // back: L' x = y
        for i in (0..n).rev() {
            let mut s = x[[i, col]];
            for k in i + 1..n {
                s = s - l[[k, i]] * x[[k, col]];
            }
            x[[i, col]] = s / l[[i, i]];
        }
    }
    Some(x)
}

/// Solves `A x = b` by LU with partial pivoting; `None` if singular.
pub fn solve_lu<F: Scalar>(a: ArrayView2<F>, b: ArrayView2<F>) -> Option<Array2<F>> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let mut lu = a.to_owned();
    let mut x = b.to_owned();
    let m = b.ncols();
    for col in 0..n {
        let mut piv = col;
        let mut best = lu[[col, col]].abs();
        for r in col + 1..n {
            let v = lu[[r, col]].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < cast::<F>(1e-13) {
            return None;
        }
        if piv != col {
            for c in 0..n {
                lu.swap([col, c], [piv, c]);
            }
            for c in 0..m {
                x.swap([col, c], [piv, c]);
            }
        }
        for r in col + 1..n {
            let f = lu[[r, col]] / lu[[col, col]];
            lu[[r, col]] = f;
            for c in col + 1..n {
                let upd = lu[[col, c]] * f;
                lu[[r, c]] = lu[[r, c]] - upd;
            }
            for c in 0..m {
                let upd = x[[col, c]] * f;
                x[[r, c]] = x[[r, c]] - upd;
            }
        }
    }
    for c in 0..m {
        for i in (0..n).rev() {
            let mut s = x[[i, c]];
            for k in i + 1..n {
                s = s - lu[[i, k]] * x[[k, c]];
            }
            x[[i, c]] = s / lu[[i, i]];
        }
    }
    Some(x)
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns `(eigenvalues, eigenvectors)` with eigenvalues descending and
/// eigenvectors in the corresponding columns.
pub fn jacobi_eigh<F: Scalar>(a: ArrayView2<F>) -> (Array1<F>, Array2<F>) {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let mut m = a.to_owned();
    let mut v: Array2<F> = Array2::eye(n);
    let tol = cast::<F>(1e-14);
    for _sweep in 0..100 {
        let mut off = F::zero();
        for i in 0..n {
            for j in i + 1..n {
                off = off + m[[i, j]] * m[[i, j]];
            }
        }
        let scale = (0..n).fold(F::zero(), |s, i| s + m[[i, i]].abs()).max(F::one());
        if off.sqrt() <= tol * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[[p, q]].abs() <= tol * scale * cast::<F>(1e-2) {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (cast::<F>(2.0) * m[[p, q]]);
                let t = {
                    let s = if theta >= F::zero() { F::one() } else { -F::one() };
                    s / (theta.abs() + (theta * theta + F::one()).sqrt())
                };
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[[j, j]]
            .partial_cmp(&m[[i, i]])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let mut vecs = Array2::zeros((n, n));
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vecs[[r, new]] = v[[r, old]];
        }
    }
    (vals, vecs)
}

/// Spectral radius estimate of a (possibly non-symmetric) matrix.
///
/// Power iteration on the norm growth rate, which converges to the dominant
/// eigenvalue modulus even when it belongs to a complex pair. Used only as a
/// stability guard, so a percent-level estimate is enough.
pub fn spectral_radius<F: Scalar>(a: ArrayView2<F>) -> F {
    let n = a.nrows();
    if n == 0 {
        return F::zero();
    }
    let mut x = Array1::from_elem(n, F::one());
    for i in 0..n {
        // deterministic, incommensurate start to avoid landing in an invariant subspace
        x[i] = cast::<F>(1.0 + 0.37 * (i as f64 + 1.0).sin());
    }
    let norm = |v: &Array1<F>| v.iter().fold(F::zero(), |s, &e| s + e * e).sqrt();
    let mut rho = F::zero();
    let mut growth_log = 0.0f64;
    let mut steps = 0usize;
    let mut nx = norm(&x);
    if nx == F::zero() {
        return F::zero();
    }
    x = x / nx;
    for it in 0..400 {
        x = a.dot(&x);
        nx = norm(&x);
        if nx < cast::<F>(1e-300) {
            return F::zero();
        }
        x = x / nx;
        if it >= 100 {
            growth_log += nx.to_f64().unwrap_or(0.0).ln();
            steps += 1;
        }
        rho = nx;
    }
    if steps > 0 {
        cast::<F>((growth_log / steps as f64).exp())
    } else {
        rho
    }
}

/// Solves the discrete Lyapunov equation `P = A P A' + Q` by doubling.
/// Returns `None` when the iteration fails to settle (unstable `A`).
pub fn discrete_lyapunov<F: Scalar>(a: ArrayView2<F>, q: ArrayView2<F>) -> Option<Array2<F>> {
    let mut ak = a.to_owned();
    let mut p = q.to_owned();
    for _ in 0..60 {
        let incr = ak.dot(&p).dot(&ak.t());
        let delta = incr.iter().fold(F::zero(), |s, &e| s.max(e.abs()));
        let p_new = &p + &incr;
        let ak_new = ak.dot(&ak);
        p = p_new;
        ak = ak_new;
        let scale = p.iter().fold(F::zero(), |s, &e| s.max(e.abs())).max(F::one());
        if !delta.is_finite() || !scale.is_finite() {
            return None;
        }
        if delta <= cast::<F>(1e-14) * scale {
            // symmetrize residual rounding
            let pt = p.t().to_owned();
            return Some((&p + &pt) * cast::<F>(0.5));
        }
    }
    None
}

/// Sample covariance of the rows of `x` (divisor `rows`), no centering.
pub fn gram<F: Scalar>(x: ArrayView2<F>) -> Array2<F> {
    let t = F::from_usize(x.nrows()).unwrap();
    x.t().dot(&x) / t
}

/// Column means of a matrix.
pub fn col_means<F: Scalar>(x: ArrayView2<F>) -> Array1<F> {
    let t = F::from_usize(x.nrows()).unwrap();
    x.sum_axis(Axis(0)) / t
}
