//! Natural cubic spline interpolation for missing-data initialization.

use crate::error::{Error, Result};
use crate::num::{cast, Scalar};

/// Fills a series with missing entries: interior gaps by a natural cubic
/// spline through the observed points, leading/trailing gaps by holding the
/// nearest observation. Observed entries pass through unchanged.
pub fn spline_fill<F: Scalar>(series: &[Option<F>]) -> Result<Vec<F>> {
    let knots: Vec<(usize, F)> = series
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|x| (i, x)))
        .collect();
    if knots.len() < 2 {
        return Err(Error::SplineTooFew(knots.len()));
    }
    let second_derivs = natural_second_derivatives(&knots);
    let first = knots[0];
    let last = *knots.last().unwrap();
    let mut out = Vec::with_capacity(series.len());
    let mut seg = 0usize;
    for (t, v) in series.iter().enumerate() {
        if let Some(x) = v {
            out.push(*x);
            continue;
        }
        if t < first.0 {
            out.push(first.1);
            continue;
        }
        if t > last.0 {
            out.push(last.1);
            continue;
        }
        while knots[seg + 1].0 < t {
            seg += 1;
        }
        out.push(eval_segment(&knots, &second_derivs, seg, t));
    }
    Ok(out)
}

/// Second derivatives at the knots under natural boundary conditions
/// (zero curvature at both ends), via the standard tridiagonal system.
fn natural_second_derivatives<F: Scalar>(knots: &[(usize, F)]) -> Vec<F> {
    let n = knots.len();
    let mut m = vec![F::zero(); n];
    if n < 3 {
        return m;
    }
    let h = |i: usize| cast::<F>((knots[i + 1].0 - knots[i].0) as f64);
    let slope = |i: usize| (knots[i + 1].1 - knots[i].1) / h(i);
    // Thomas algorithm over interior knots 1..n-1
    let rows = n - 2;
    let mut diag = vec![F::zero(); rows];
    let mut upper = vec![F::zero(); rows];
    let mut rhs = vec![F::zero(); rows];
    let two = cast::<F>(2.0);
    let six = cast::<F>(6.0);
    for r in 0..rows {
        let i = r + 1;
        diag[r] = two * (h(i - 1) + h(i));
        upper[r] = h(i);
        rhs[r] = six * (slope(i) - slope(i - 1));
    }
    for r in 1..rows {
        let lower = h(r); // sub-diagonal entry for row r is h(i-1) with i = r+1
        let w = lower / diag[r - 1];
        diag[r] = diag[r] - w * upper[r - 1];
        rhs[r] = rhs[r] - w * rhs[r - 1];
    }
    let mut interior = vec![F::zero(); rows];
    interior[rows - 1] = rhs[rows - 1] / diag[rows - 1];
    for r in (0..rows - 1).rev() {
        interior[r] = (rhs[r] - upper[r] * interior[r + 1]) / diag[r];
    }
    m[1..=rows].copy_from_slice(&interior);
    m
}

fn eval_segment<F: Scalar>(knots: &[(usize, F)], m: &[F], seg: usize, t: usize) -> F {
    let (x0, y0) = knots[seg];
    let (x1, y1) = knots[seg + 1];
    let h = cast::<F>((x1 - x0) as f64);
    let a = cast::<F>((x1 - t) as f64) / h;
    let b = cast::<F>((t - x0) as f64) / h;
    let six = cast::<F>(6.0);
    a * y0
        + b * y1
        + ((a * a * a - a) * m[seg] + (b * b * b - b) * m[seg + 1]) * (h * h) / six
}
