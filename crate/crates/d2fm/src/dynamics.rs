//! Linear stochastic dynamics: per-series AR(d) idiosyncratic models and
//! VAR(p) factor dynamics, both by least squares, plus the filtering and
//! unconditional-variance pieces the training loop needs.

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_lu, solve_spd, spectral_radius};
use crate::network::MMWeights;
use crate::num::{cast, Scalar};

/// Stationarity cap on AR spectral radii.
const STATIONARY_CAP: f64 = 0.99;

/// AR(d) model of one idiosyncratic series: coefficients and innovation
/// variance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArModel<F> {
    pub phi: Vec<F>,
    pub q: F,
}

impl<F: Scalar> ArModel<F> {
    /// White-noise model of a given order (all coefficients zero).
    pub fn white_noise(order: usize, q: F) -> Self {
        ArModel {
            phi: vec![F::zero(); order],
            q,
        }
    }

    pub fn order(&self) -> usize {
        self.phi.len()
    }

    /// Companion-matrix spectral radius (0 for the empty model).
    pub fn spectral_radius(&self) -> F {
        let d = self.phi.len();
        if d == 0 {
            return F::zero();
        }
        if d == 1 {
            return self.phi[0].abs();
        }
        let mut c = Array2::zeros((d, d));
        for (j, &p) in self.phi.iter().enumerate() {
            c[[0, j]] = p;
        }
        for i in 1..d {
            c[[i, i - 1]] = F::one();
        }
        spectral_radius(c.view())
    }
}

/// OLS fit of an AR(d) without intercept on a masked residual series.
///
/// Regression windows containing any missing value are skipped. Coefficients
/// are clipped into the stationary region; a singular normal-equations
/// system degrades to the white-noise model with `q` = residual variance.
pub fn fit_ar<F: Scalar>(series: &[Option<F>], d: usize) -> Result<ArModel<F>> {
    assert!(d >= 1, "AR order must be at least 1");
    let mut rows_x: Vec<Vec<F>> = Vec::new();
    let mut rows_y: Vec<F> = Vec::new();
    for t in d..series.len() {
        if let Some(y) = series[t] {
            let lags: Option<Vec<F>> = (1..=d).map(|j| series[t - j]).collect();
            if let Some(x) = lags {
                rows_x.push(x);
                rows_y.push(y);
            }
        }
    }
    let need = 10;
    if rows_y.len() < need {
        return Err(Error::InsufficientArData {
            order: d,
            rows: rows_y.len(),
            need,
        });
    }
    let n_rows = rows_y.len();
    let mut xtx = Array2::<F>::zeros((d, d));
    let mut xty = Array2::<F>::zeros((d, 1));
    for (x, &y) in rows_x.iter().zip(rows_y.iter()) {
        for a in 0..d {
            for b in 0..d {
                xtx[[a, b]] += x[a] * x[b];
            }
            xty[[a, 0]] += x[a] * y;
        }
    }
    let count = F::from_usize(n_rows).unwrap();
    let scale = (0..d).fold(F::zero(), |s, a| s.max(xtx[[a, a]].abs()));
    let degenerate = scale <= cast::<F>(1e-24) * count;
    let solution = if degenerate {
        None
    } else {
        solve_spd(xtx.view(), xty.view()).or_else(|| solve_lu(xtx.view(), xty.view()))
    };
    let mut model = match solution {
        Some(sol) => {
            let phi: Vec<F> = (0..d).map(|j| sol[[j, 0]]).collect();
            let mut rss = F::zero();
            for (x, &y) in rows_x.iter().zip(rows_y.iter()) {
                let fit = x.iter().zip(&phi).fold(F::zero(), |s, (&xi, &p)| s + xi * p);
                let e = y - fit;
                rss = rss + e * e;
            }
            ArModel {
                phi,
                q: rss / count,
            }
        }
        None => {
            let mu = rows_y.iter().copied().sum::<F>() / count;
            let var = rows_y.iter().map(|&y| (y - mu) * (y - mu)).sum::<F>() / count;
            ArModel::white_noise(d, var)
        }
    };
    clip_stationary(&mut model);
    Ok(model)
}

/// Scales coefficients so the companion spectral radius stays below the cap.
/// Scaling `phi_j` by `s^j` scales every characteristic root by `s`.
fn clip_stationary<F: Scalar>(model: &mut ArModel<F>) {
    let cap = cast::<F>(STATIONARY_CAP);
    if model.order() == 1 {
        if model.phi[0].abs() > cap {
            model.phi[0] = cap * model.phi[0].signum();
        }
        return;
    }
    let rho = model.spectral_radius();
    if rho > cap {
        // small margin against the power-iteration estimate error
        let s = cast::<F>(0.985) / rho;
        let mut factor = s;
        for p in model.phi.iter_mut() {
            *p = *p * factor;
            factor = factor * s;
        }
    }
}

/// Subtracts the one-step-ahead predictable idiosyncratic component from
/// every series: `y[t,i] - sum_j phi_j eps_hat[t - j*stride_i, i]`.
///
/// `strides` gives the lag spacing per series (1 for monthly, 3 for series
/// whose idiosyncratic dynamics live on the quarterly grid). Lags before the
/// start of the sample contribute nothing; with `eps_hat` all zero (first
/// iteration) this is the identity.
pub fn idio_filter<F: Scalar>(
    values: ArrayView2<F>,
    ars: &[ArModel<F>],
    strides: &[usize],
    eps_hat: ArrayView2<F>,
) -> Array2<F> {
    let (t_len, n) = values.dim();
    debug_assert_eq!(ars.len(), n);
    debug_assert_eq!(strides.len(), n);
    debug_assert_eq!(eps_hat.dim(), (t_len, n));
    let mut out = values.to_owned();
    for i in 0..n {
        let stride = strides[i].max(1);
        for t in 0..t_len {
            let mut pred = F::zero();
            for (j, &p) in ars[i].phi.iter().enumerate() {
                let lag = (j + 1) * stride;
                if t >= lag {
                    pred = pred + p * eps_hat[[t - lag, i]];
                }
            }
            out[[t, i]] = out[[t, i]] - pred;
        }
    }
    out
}

/// Unconditional variance of a stationary AR(d): `q / (1 - phi^2)` for
/// d = 1, the Yule-Walker solution in general.
pub fn unconditional_variance<F: Scalar>(ar: &ArModel<F>) -> Result<F> {
    let rho = ar.spectral_radius();
    if rho >= F::one() {
        return Err(Error::NonStationaryAr(rho.to_f64().unwrap_or(f64::NAN)));
    }
    let d = ar.order();
    if d == 0 {
        return Ok(ar.q);
    }
    if d == 1 {
        let p = ar.phi[0];
        return Ok(ar.q / (F::one() - p * p));
    }
    // unknowns g = [gamma_0, ..., gamma_d]
    let m = d + 1;
    let mut a = Array2::<F>::zeros((m, m));
    let mut b = Array2::<F>::zeros((m, 1));
    // gamma_0 - sum_j phi_j gamma_j = q
    a[[0, 0]] = F::one();
    for j in 1..=d {
        a[[0, j]] -= ar.phi[j - 1];
    }
    b[[0, 0]] = ar.q;
    // gamma_k - sum_j phi_j gamma_{|k-j|} = 0 for k = 1..d
    for k in 1..=d {
        a[[k, k]] += F::one();
        for j in 1..=d {
            let idx = k.abs_diff(j);
            a[[k, idx]] -= ar.phi[j - 1];
        }
        b[[k, 0]] = F::zero();
    }
    let sol = solve_lu(a.view(), b.view()).ok_or(Error::RankDeficient)?;
    Ok(sol[[0, 0]])
}

/// VAR(p) factor dynamics: coefficient matrices and innovation covariance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VarModel<F> {
    /// `B_1 ... B_p`, each r x r.
    pub coeffs: Vec<Array2<F>>,
    /// Innovation covariance, r x r, symmetric PSD.
    pub cov: Array2<F>,
}

impl<F: Scalar> VarModel<F> {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn n_vars(&self) -> usize {
        self.cov.nrows()
    }

    /// Companion matrix `[B1 .. Bp; I 0]`, r*p square.
    pub fn companion(&self) -> Array2<F> {
        let r = self.n_vars();
        let p = self.order();
        let dim = r * p;
        let mut c = Array2::zeros((dim, dim));
        for (j, b) in self.coeffs.iter().enumerate() {
            for a in 0..r {
                for bb in 0..r {
                    c[[a, j * r + bb]] = b[[a, bb]];
                }
            }
        }
        for i in r..dim {
            c[[i, i - r]] = F::one();
        }
        c
    }

    pub fn spectral_radius(&self) -> F {
        spectral_radius(self.companion().view())
    }
}

/// Equation-by-equation OLS without intercept on a complete factor matrix;
/// the innovation covariance is the residual covariance.
pub fn fit_var<F: Scalar>(factors: ArrayView2<F>, p: usize) -> Result<VarModel<F>> {
    assert!(p >= 1, "VAR order must be at least 1");
    let (t_len, r) = factors.dim();
    if t_len < r * p + 10 {
        return Err(Error::Invalid(format!(
            "fit_var needs at least r*p + 10 = {} rows, got {}",
            r * p + 10,
            t_len
        )));
    }
    let rows = t_len - p;
    let k = r * p;
    let mut x = Array2::<F>::zeros((rows, k));
    let mut y = Array2::<F>::zeros((rows, r));
    for t in p..t_len {
        for j in 0..p {
            for c in 0..r {
                x[[t - p, j * r + c]] = factors[[t - 1 - j, c]];
            }
        }
        for c in 0..r {
            y[[t - p, c]] = factors[[t, c]];
        }
    }
    let xtx = x.t().dot(&x);
    let xty = x.t().dot(&y);
    let theta = solve_spd(xtx.view(), xty.view())
        .or_else(|| solve_lu(xtx.view(), xty.view()))
        .ok_or(Error::RankDeficient)?;
    // theta is (r*p) x r stacked as [B1'; B2'; ...; Bp']
    let mut coeffs = Vec::with_capacity(p);
    for j in 0..p {
        let mut b = Array2::zeros((r, r));
        for a in 0..r {
            for c in 0..r {
                b[[a, c]] = theta[[j * r + c, a]];
            }
        }
        coeffs.push(b);
    }
    let resid = &y - &x.dot(&theta);
    let cov = resid.t().dot(&resid) / F::from_usize(rows).unwrap();
    let model = VarModel { coeffs, cov };
    let rho = model.spectral_radius();
    if rho >= F::one() {
        log::warn!(
            "fitted VAR companion spectral radius {:.4} >= 1; keeping coefficients",
            rho.to_f64().unwrap_or(f64::NAN)
        );
    }
    Ok(model)
}

/// Residuals of a fitted VAR on the same sample (for diagnostics/tests).
pub fn var_residuals<F: Scalar>(model: &VarModel<F>, factors: ArrayView2<F>) -> Array2<F> {
    let (t_len, r) = factors.dim();
    let p = model.order();
    let rows = t_len.saturating_sub(p);
    let mut resid = Array2::zeros((rows, r));
    for t in p..t_len {
        let mut pred = Array1::<F>::zeros(r);
        for (j, b) in model.coeffs.iter().enumerate() {
            let lag = factors.row(t - 1 - j);
            pred = pred + b.dot(&lag);
        }
        for c in 0..r {
            resid[[t - p, c]] = factors[[t, c]] - pred[c];
        }
    }
    resid
}

/// Maps a quarterly-lag AR(1) fit onto the monthly latent AR(1) whose
/// three-month composition and aggregation-window variance reproduce it:
/// `phi_m = sign(phi_q) |phi_q|^(1/3)`, innovation variance chosen so the
/// weighted 5-month window has the quarterly residual's variance.
pub fn monthly_idio_from_quarterly<F: Scalar>(
    phi_q: F,
    q_q: F,
    w: &MMWeights<F>,
) -> Result<(F, F)> {
    if phi_q.abs() >= F::one() {
        return Err(Error::NonStationaryAr(phi_q.abs().to_f64().unwrap_or(f64::NAN)));
    }
    let third = F::one() / cast::<F>(3.0);
    let phi_m = phi_q.signum() * phi_q.abs().powf(third);
    let var_q = q_q / (F::one() - phi_q * phi_q);
    // Var(w' eta window) = sigma_m^2 * sum_jk w_j w_k phi_m^|j-k|
    let mut window_factor = F::zero();
    let ws = w.weights();
    for j in 0..5 {
        for k in 0..5 {
            let lag = j.abs_diff(k) as i32;
            window_factor = window_factor + ws[j] * ws[k] * phi_m.powi(lag);
        }
    }
    let sigma_m2 = var_q / window_factor;
    let q_m = sigma_m2 * (F::one() - phi_m * phi_m);
    Ok((phi_m, q_m.max(F::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn simulate_ar1(phi: f64, q: f64, t: usize, seed: u64) -> Vec<Option<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = 0.0;
        let mut out = Vec::with_capacity(t);
        for _ in 0..t + 50 {
            x = phi * x + q.sqrt() * rng.sample::<f64, _>(StandardNormal);
            out.push(Some(x));
        }
        out.split_off(50)
    }

    #[test]
    fn ar1_recovery_within_sampling_band() {
        let data = simulate_ar1(0.7, 1.0, 500, 4);
        let m = fit_ar(&data, 1).unwrap();
        assert!(
            (0.6..=0.8).contains(&m.phi[0]),
            "phi estimate {}",
            m.phi[0]
        );
        assert!((m.q - 1.0).abs() < 0.2);
    }

    #[test]
    fn white_noise_has_no_persistence() {
        let data = simulate_ar1(0.0, 1.0, 500, 9);
        let m = fit_ar(&data, 1).unwrap();
        assert!(m.phi[0].abs() < 2.0 / (500f64).sqrt(), "phi {}", m.phi[0]);
    }

    #[test]
    fn zero_residuals_degenerate_to_zero_model() {
        let data = vec![Some(0.0); 50];
        let m = fit_ar(&data, 1).unwrap();
        assert_eq!(m.phi[0], 0.0);
        assert_eq!(m.q, 0.0);
    }

    #[test]
    fn insufficient_windows_error() {
        let data = vec![Some(1.0); 8];
        assert!(matches!(
            fit_ar(&data, 1),
            Err(Error::InsufficientArData { .. })
        ));
        // interleaved missing values break every second window
        let mut holey: Vec<Option<f64>> = Vec::new();
        for i in 0..30 {
            holey.push((i % 2 == 0).then_some(1.0));
        }
        assert!(matches!(
            fit_ar(&holey, 1),
            Err(Error::InsufficientArData { .. })
        ));
    }

    #[test]
    fn missing_windows_are_skipped_not_interpolated() {
        // AR(1) with a gap: estimates still consistent because bad windows drop
        let mut data = simulate_ar1(0.6, 1.0, 400, 11);
        for t in 100..110 {
            data[t] = None;
        }
        let m = fit_ar(&data, 1).unwrap();
        assert!((m.phi[0] - 0.6).abs() < 0.12, "phi {}", m.phi[0]);
    }

    #[test]
    fn clipping_caps_explosive_fits() {
        // random walk-ish input drives the OLS estimate toward 1
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut x = 0.0;
        let data: Vec<Option<f64>> = (0..300)
            .map(|_| {
                x += rng.sample::<f64, _>(StandardNormal) * 0.1 + 0.05;
                Some(x)
            })
            .collect();
        let m = fit_ar(&data, 1).unwrap();
        assert!(m.phi[0].abs() <= 0.99 + 1e-12);
    }

    #[test]
    fn idio_filter_identity_cases() {
        let y = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]];
        let ars = vec![ArModel::white_noise(1, 1.0), ArModel::white_noise(1, 1.0)];
        let eps = Array2::zeros((3, 2));
        // zero coefficients: identity
        let out = idio_filter(y.view(), &ars, &[1, 1], eps.view());
        assert_eq!(out, y);
        // zero eps_hat (first iteration): identity even with phi != 0
        let ars = vec![
            ArModel {
                phi: vec![0.5],
                q: 1.0,
            },
            ArModel {
                phi: vec![0.8],
                q: 1.0,
            },
        ];
        let out = idio_filter(y.view(), &ars, &[1, 1], eps.view());
        assert_eq!(out, y);
    }

    #[test]
    fn idio_filter_hand_case() {
        // phi = 0.5, eps_hat[t-1] = 2 => y_t - 1
        let y = array![[10.0], [10.0]];
        let mut eps = Array2::zeros((2, 1));
        eps[[0, 0]] = 2.0;
        let ars = vec![ArModel {
            phi: vec![0.5],
            q: 1.0,
        }];
        let out = idio_filter(y.view(), &ars, &[1], eps.view());
        assert_eq!(out[[0, 0]], 10.0); // no lag available at t = 0
        assert_eq!(out[[1, 0]], 9.0);
    }

    #[test]
    fn idio_filter_quarterly_stride() {
        let y = Array2::from_elem((7, 1), 10.0);
        let mut eps = Array2::zeros((7, 1));
        eps[[3, 0]] = 4.0;
        let ars = vec![ArModel {
            phi: vec![0.25],
            q: 1.0,
        }];
        let out = idio_filter(y.view(), &ars, &[3], eps.view());
        assert_eq!(out[[6, 0]], 9.0); // t=6 sees eps at t-3
        assert_eq!(out[[5, 0]], 10.0);
    }

    #[test]
    fn unconditional_variance_cases() {
        let wn = ArModel {
            phi: vec![0.0],
            q: 1.0,
        };
        assert_abs_diff_eq!(unconditional_variance(&wn).unwrap(), 1.0, epsilon = 1e-14);
        let half = ArModel {
            phi: vec![0.5],
            q: 0.75,
        };
        assert_abs_diff_eq!(unconditional_variance(&half).unwrap(), 1.0, epsilon = 1e-14);
        let near = ArModel {
            phi: vec![0.99],
            q: 1.0,
        };
        assert_abs_diff_eq!(
            unconditional_variance(&near).unwrap(),
            50.25125628140704,
            epsilon = 1e-8
        );
        let bad = ArModel {
            phi: vec![1.0],
            q: 1.0,
        };
        assert!(matches!(
            unconditional_variance(&bad),
            Err(Error::NonStationaryAr(_))
        ));
    }

    #[test]
    fn yule_walker_matches_simulation_for_ar2() {
        let ar = ArModel {
            phi: vec![0.5, 0.2],
            q: 1.0,
        };
        let v = unconditional_variance(&ar).unwrap();
        // simulate long path and compare
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (mut x1, mut x2) = (0.0, 0.0);
        let mut acc = 0.0;
        let n = 200_000;
        for _ in 0..n + 100 {
            let x = 0.5 * x1 + 0.2 * x2 + rng.sample::<f64, _>(StandardNormal);
            x2 = x1;
            x1 = x;
            acc += x * x;
        }
        let sim = acc / (n + 100) as f64;
        assert!((v - sim).abs() / sim < 0.05, "yw {v} vs sim {sim}");
    }

    #[test]
    fn variance_never_below_innovation_variance() {
        for phi in [-0.9, -0.3, 0.0, 0.4, 0.95] {
            let ar = ArModel {
                phi: vec![phi],
                q: 0.7,
            };
            assert!(unconditional_variance(&ar).unwrap() >= 0.7 - 1e-12);
        }
    }

    fn simulate_var2(t: usize, seed: u64) -> (Array2<f64>, [Array2<f64>; 2]) {
        let b1 = array![[0.5, 0.1], [0.0, 0.4]];
        let b2 = array![[0.2, 0.0], [0.1, 0.1]];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = Array2::zeros((t, 2));
        let (mut p1, mut p2) = (Array1::<f64>::zeros(2), Array1::<f64>::zeros(2));
        for row in 0..t + 80 {
            let mut x = b1.dot(&p1) + b2.dot(&p2);
            for k in 0..2 {
                x[k] += rng.sample::<f64, _>(StandardNormal);
            }
            if row >= 80 {
                f.row_mut(row - 80).assign(&x);
            }
            p2 = p1;
            p1 = x;
        }
        (f, [b1, b2])
    }

    #[test]
    fn var2_monte_carlo_recovery() {
        let (f, truth) = simulate_var2(1000, 3);
        let m = fit_var(f.view(), 2).unwrap();
        for (est, b) in m.coeffs.iter().zip(truth.iter()) {
            for (a, e) in est.iter().zip(b.iter()) {
                assert!((a - e).abs() < 0.1, "coefficient error {}", (a - e).abs());
            }
        }
    }

    #[test]
    fn var_on_iid_data_estimates_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let t = 2000;
        let f = Array2::from_shape_fn((t, 2), |_| rng.sample::<f64, _>(StandardNormal));
        let m = fit_var(f.view(), 2).unwrap();
        let bound = 3.0 / (t as f64).sqrt();
        for b in &m.coeffs {
            for &x in b.iter() {
                assert!(x.abs() < bound, "coefficient {x} above {bound}");
            }
        }
    }

    #[test]
    fn var_residuals_orthogonal_to_regressors() {
        let (f, _) = simulate_var2(600, 10);
        let m = fit_var(f.view(), 2).unwrap();
        let resid = var_residuals(&m, f.view());
        let t_len = f.nrows();
        let mut scale = 0.0f64;
        let mut max_inner = 0.0f64;
        for lag in 1..=2 {
            for a in 0..2 {
                for b in 0..2 {
                    let mut inner = 0.0;
                    for t in 2..t_len {
                        inner += resid[[t - 2, a]] * f[[t - lag, b]];
                        scale = scale.max(resid[[t - 2, a]].abs() * f[[t - lag, b]].abs());
                    }
                    max_inner = max_inner.max(inner.abs());
                }
            }
        }
        assert!(
            max_inner < 1e-8 * scale * t_len as f64,
            "inner product {max_inner}"
        );
    }

    #[test]
    fn var_rank_deficiency_detected() {
        // second column duplicates the first: regressors collinear
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = 60;
        let mut f = Array2::zeros((t, 2));
        for row in 0..t {
            let x: f64 = rng.sample(StandardNormal);
            f[[row, 0]] = x;
            f[[row, 1]] = 2.0 * x;
        }
        assert!(matches!(fit_var(f.view(), 1), Err(Error::RankDeficient)));
    }

    #[test]
    fn scalar_var_matches_unclipped_ar() {
        let data = simulate_ar1(0.7, 1.0, 400, 12);
        let vals: Vec<f64> = data.iter().map(|v| v.unwrap()).collect();
        let f = Array2::from_shape_vec((vals.len(), 1), vals).unwrap();
        let var = fit_var(f.view(), 1).unwrap();
        let ar = fit_ar(&data, 1).unwrap();
        assert_abs_diff_eq!(var.coeffs[0][[0, 0]], ar.phi[0], epsilon = 1e-10);
    }

    #[test]
    fn ar_coverage_across_seeds() {
        // 95% OLS intervals should cover the true coefficient in >= 90% of runs
        let mut covered = 0;
        let runs = 50;
        for seed in 0..runs {
            let data = simulate_ar1(0.6, 1.0, 300, 1000 + seed);
            let m = fit_ar(&data, 1).unwrap();
            // se(phi) ~ sqrt(q / sum x_{t-1}^2)
            let mut sum_sq = 0.0;
            for t in 1..data.len() {
                sum_sq += data[t - 1].unwrap().powi(2);
            }
            let se = (m.q / sum_sq).sqrt();
            if (m.phi[0] - 1.96 * se..=m.phi[0] + 1.96 * se).contains(&0.6) {
                covered += 1;
            }
        }
        assert!(covered >= 45, "coverage {covered}/{runs}");
    }

    #[test]
    fn quarterly_to_monthly_idio_mapping() {
        let w: MMWeights<f64> = MMWeights::standard();
        let (phi_m, q_m) = monthly_idio_from_quarterly(0.512, 1.0, &w).unwrap();
        assert_abs_diff_eq!(phi_m, 0.8, epsilon = 1e-12); // 0.8^3 = 0.512
        assert!(q_m > 0.0);
        // implied window variance equals the quarterly unconditional variance
        let sigma_m2 = q_m / (1.0 - phi_m * phi_m);
        let mut window = 0.0;
        for j in 0..5usize {
            for k in 0..5usize {
                window += w.weights()[j] * w.weights()[k] * phi_m.powi(j.abs_diff(k) as i32);
            }
        }
        let var_q = 1.0 / (1.0 - 0.512f64 * 0.512);
        assert_abs_diff_eq!(sigma_m2 * window, var_q, epsilon = 1e-10);
        // zero-persistence case
        let (phi0, q0) = monthly_idio_from_quarterly(0.0, 1.9, &w).unwrap();
        assert_eq!(phi0, 0.0);
        assert_abs_diff_eq!(q0, 1.9 / (19.0 / 9.0), epsilon = 1e-12);
    }
}
