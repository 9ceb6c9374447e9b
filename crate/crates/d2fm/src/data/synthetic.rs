//! Synthetic data generating process for tests and the simulate command:
//! VAR(2) factors, AR(1) idiosyncratic components, a linear decoder, and
//! quarterly columns aggregated from latent monthly values.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::calendar::Month;
use crate::data::{monthly_meta, quarterly_meta, Panel, SeriesMeta};
use crate::error::{Error, Result};
use crate::linalg::spectral_radius;
use crate::network::MMWeights;
use crate::num::{cast, Scalar};

/// Configuration of the synthetic DGP. Scalars are f64; generation casts
/// into the requested panel scalar type.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgpConfig {
    pub n_series: usize,
    pub t_len: usize,
    pub n_factors: usize,
    /// First-lag VAR coefficient matrix, row-major r x r.
    pub var_b1: Vec<Vec<f64>>,
    /// Second-lag VAR coefficient matrix, row-major r x r.
    pub var_b2: Vec<Vec<f64>>,
    /// Diagonal of the factor innovation covariance (length r or 1).
    #[serde(default = "default_unit_vec")]
    pub factor_innovation_var: Vec<f64>,
    /// Idiosyncratic AR(1) coefficients (length n or 1).
    #[serde(default = "default_phi")]
    pub idio_phi: Vec<f64>,
    /// Idiosyncratic innovation variances (length n or 1).
    #[serde(default = "default_unit_vec")]
    pub idio_var: Vec<f64>,
    /// Standard deviation of the Gaussian loadings.
    #[serde(default = "default_loading_scale")]
    pub loading_scale: f64,
    /// Probability that an otherwise-observed entry is dropped.
    #[serde(default)]
    pub missing_rate: f64,
    /// Column indices observed quarterly (at quarter-ending months).
    #[serde(default)]
    pub quarterly_cols: Vec<usize>,
    /// First month of the grid.
    #[serde(default = "default_start")]
    pub start: Month,
    #[serde(default = "default_monthly_delay")]
    pub monthly_delay_days: i32,
    #[serde(default = "default_quarterly_delay")]
    pub quarterly_delay_days: i32,
}

fn default_unit_vec() -> Vec<f64> {
    vec![1.0]
}
fn default_phi() -> Vec<f64> {
    vec![0.5]
}
fn default_loading_scale() -> f64 {
    1.0
}
fn default_start() -> Month {
    Month::new(1980, 1)
}
fn default_monthly_delay() -> i32 {
    14
}
fn default_quarterly_delay() -> i32 {
    30
}

/// Ground truth returned alongside the synthetic panel.
#[derive(Clone, Debug)]
pub struct SyntheticTruth<F> {
    /// Latent factors, T x r.
    pub factors: Array2<F>,
    /// Decoder loadings, n x r.
    pub loadings: Array2<F>,
    /// Latent monthly common component (loadings . factors), T x n.
    pub common: Array2<F>,
}

fn broadcast(v: &[f64], n: usize, what: &str) -> Result<Vec<f64>> {
    match v.len() {
        1 => Ok(vec![v[0]; n]),
        len if len == n => Ok(v.to_vec()),
        len => Err(Error::Invalid(format!(
            "{what} must have length 1 or {n}, got {len}"
        ))),
    }
}

fn matrix_from_rows(rows: &[Vec<f64>], r: usize, what: &str) -> Result<Array2<f64>> {
    if rows.len() != r || rows.iter().any(|row| row.len() != r) {
        return Err(Error::Invalid(format!("{what} must be {r}x{r}")));
    }
    let mut m = Array2::zeros((r, r));
    for (i, row) in rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            m[[i, j]] = x;
        }
    }
    Ok(m)
}

/// Companion matrix of the VAR(2) `[B1 B2; I 0]`.
fn var2_companion(b1: &Array2<f64>, b2: &Array2<f64>) -> Array2<f64> {
    let r = b1.nrows();
    let mut c = Array2::zeros((2 * r, 2 * r));
    for i in 0..r {
        for j in 0..r {
            c[[i, j]] = b1[[i, j]];
            c[[i, r + j]] = b2[[i, j]];
        }
        c[[r + i, i]] = 1.0;
    }
    c
}

/// Generates a panel from the latent linear factor model. Deterministic
/// given the seed: all draws flow from named ChaCha sub-streams.
pub fn generate_synthetic_panel<F: Scalar>(
    cfg: &DgpConfig,
    rng_seed: u64,
) -> Result<(Panel<F>, SyntheticTruth<F>)> {
    let n = cfg.n_series;
    let t_len = cfg.t_len;
    let r = cfg.n_factors;
    if n == 0 || t_len == 0 || r == 0 {
        return Err(Error::Invalid("n_series, t_len, n_factors must be > 0".into()));
    }
    if !(0.0..1.0).contains(&cfg.missing_rate) {
        return Err(Error::Invalid("missing_rate must be in [0, 1)".into()));
    }
    let b1 = matrix_from_rows(&cfg.var_b1, r, "var_b1")?;
    let b2 = matrix_from_rows(&cfg.var_b2, r, "var_b2")?;
    let rho = spectral_radius(var2_companion(&b1, &b2).view());
    if rho >= 1.0 {
        return Err(Error::UnstableVar(rho));
    }
    let u_var = broadcast(&cfg.factor_innovation_var, r, "factor_innovation_var")?;
    let phi = broadcast(&cfg.idio_phi, n, "idio_phi")?;
    let q_var = broadcast(&cfg.idio_var, n, "idio_var")?;
    if phi.iter().any(|p| p.abs() >= 1.0) {
        return Err(Error::Invalid("idio_phi entries must satisfy |phi| < 1".into()));
    }
    for &c in &cfg.quarterly_cols {
        if c >= n {
            return Err(Error::Invalid(format!(
                "quarterly column index {c} out of range (n = {n})"
            )));
        }
    }

    let mut rng_loadings = ChaCha8Rng::seed_from_u64(rng_seed);
    rng_loadings.set_stream(0);
    let mut rng_factors = ChaCha8Rng::seed_from_u64(rng_seed);
    rng_factors.set_stream(1);
    let mut rng_idio = ChaCha8Rng::seed_from_u64(rng_seed);
    rng_idio.set_stream(2);
    let mut rng_missing = ChaCha8Rng::seed_from_u64(rng_seed);
    rng_missing.set_stream(3);

    let mut normal = |rng: &mut ChaCha8Rng| -> f64 { rng.sample(StandardNormal) };

    let mut loadings = Array2::<f64>::zeros((n, r));
    for i in 0..n {
        for k in 0..r {
            loadings[[i, k]] = cfg.loading_scale * normal(&mut rng_loadings);
        }
    }

    // VAR(2) factor path with burn-in
    let burn = 120usize;
    let total = burn + t_len;
    let mut f_prev = Array1::<f64>::zeros(r);
    let mut f_prev2 = Array1::<f64>::zeros(r);
    let mut factors = Array2::<f64>::zeros((t_len, r));
    for t in 0..total {
        let mut f_t = b1.dot(&f_prev) + b2.dot(&f_prev2);
        for k in 0..r {
            f_t[k] += u_var[k].sqrt() * normal(&mut rng_factors);
        }
        if t >= burn {
            factors.row_mut(t - burn).assign(&f_t);
        }
        f_prev2 = f_prev;
        f_prev = f_t;
    }

    // AR(1) idiosyncratic paths with burn-in
    let mut idio = Array2::<f64>::zeros((t_len, n));
    for i in 0..n {
        let mut e = 0.0f64;
        for t in 0..total {
            e = phi[i] * e + q_var[i].sqrt() * normal(&mut rng_idio);
            if t >= burn {
                idio[[t - burn, i]] = e;
            }
        }
    }

    let common = factors.dot(&loadings.t()); // T x n
    let latent = &common + &idio;

    let dates: Vec<Month> = (0..t_len as i32).map(|k| cfg.start.offset(k)).collect();
    let w: MMWeights<f64> = MMWeights::standard();
    let is_quarterly = |i: usize| cfg.quarterly_cols.contains(&i);

    let mut values = Array2::<F>::zeros((t_len, n));
    let mut mask = Array2::from_elem((t_len, n), false);
    for t in 0..t_len {
        for i in 0..n {
            if is_quarterly(i) {
                if dates[t].is_quarter_end() && t >= 4 {
                    let window = [
                        latent[[t, i]],
                        latent[[t - 1, i]],
                        latent[[t - 2, i]],
                        latent[[t - 3, i]],
                        latent[[t - 4, i]],
                    ];
                    values[[t, i]] = cast(w.aggregate_slice(&window));
                    mask[[t, i]] = true;
                }
            } else {
                values[[t, i]] = cast(latent[[t, i]]);
                mask[[t, i]] = true;
            }
        }
    }
    // uniform missingness over observed entries
    if cfg.missing_rate > 0.0 {
        for t in 0..t_len {
            for i in 0..n {
                if mask[[t, i]] && rng_missing.gen::<f64>() < cfg.missing_rate {
                    mask[[t, i]] = false;
                }
            }
        }
    }

    let meta: Vec<SeriesMeta> = (0..n)
        .map(|i| {
            if is_quarterly(i) {
                quarterly_meta(&format!("Q{i:03}"), cfg.quarterly_delay_days)
            } else {
                monthly_meta(&format!("M{i:03}"), cfg.monthly_delay_days)
            }
        })
        .collect();
    let panel = Panel::new(dates, values, mask, meta)?;
    let truth = SyntheticTruth {
        factors: factors.mapv(|x| cast(x)),
        loadings: loadings.mapv(|x| cast(x)),
        common: common.mapv(|x| cast(x)),
    };
    Ok((panel, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ar_config(n: usize, t_len: usize) -> DgpConfig {
        DgpConfig {
            n_series: n,
            t_len,
            n_factors: 1,
            var_b1: vec![vec![0.9]],
            var_b2: vec![vec![0.0]],
            factor_innovation_var: vec![1.0],
            idio_phi: vec![0.3],
            idio_var: vec![0.5],
            loading_scale: 1.0,
            missing_rate: 0.0,
            quarterly_cols: vec![],
            start: Month::new(1980, 1),
            monthly_delay_days: 14,
            quarterly_delay_days: 30,
        }
    }

    #[test]
    fn factor_autocorrelation_matches_dgp() {
        let cfg = ar_config(10, 300);
        let (_, truth) = generate_synthetic_panel::<f64>(&cfg, 7).unwrap();
        let f = truth.factors.column(0);
        let t = f.len();
        let mean = f.sum() / t as f64;
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 1..t {
            num += (f[k] - mean) * (f[k - 1] - mean);
        }
        for k in 0..t {
            den += (f[k] - mean) * (f[k] - mean);
        }
        let rho = num / den;
        assert!((rho - 0.9).abs() < 0.05, "autocorrelation {rho}");
    }

    #[test]
    fn zero_noise_reproduces_common_component() {
        let mut cfg = ar_config(6, 60);
        cfg.idio_var = vec![0.0];
        cfg.quarterly_cols = vec![5];
        let (panel, truth) = generate_synthetic_panel::<f64>(&cfg, 3).unwrap();
        for t in 0..panel.t_len() {
            for i in 0..5 {
                assert!(panel.observed(t, i));
                assert!(
                    (panel.values()[[t, i]] - truth.common[[t, i]]).abs() < 1e-12,
                    "monthly entry differs from loadings x factors"
                );
            }
            if panel.observed(t, 5) {
                let w: MMWeights<f64> = MMWeights::standard();
                let window = [
                    truth.common[[t, 5]],
                    truth.common[[t - 1, 5]],
                    truth.common[[t - 2, 5]],
                    truth.common[[t - 3, 5]],
                    truth.common[[t - 4, 5]],
                ];
                assert!(
                    (panel.values()[[t, 5]] - w.aggregate_slice(&window)).abs() < 1e-12,
                    "quarterly entry differs from aggregated common component"
                );
            }
        }
    }

    #[test]
    fn same_seed_is_bitwise_identical() {
        let mut cfg = ar_config(8, 120);
        cfg.missing_rate = 0.15;
        cfg.quarterly_cols = vec![0];
        let (p1, t1) = generate_synthetic_panel::<f64>(&cfg, 42).unwrap();
        let (p2, t2) = generate_synthetic_panel::<f64>(&cfg, 42).unwrap();
        assert_eq!(p1.values(), p2.values());
        assert_eq!(p1.mask(), p2.mask());
        assert_eq!(t1.factors, t2.factors);
        assert_eq!(t1.loadings, t2.loadings);
        let (p3, _) = generate_synthetic_panel::<f64>(&cfg, 43).unwrap();
        assert_ne!(p1.values(), p3.values());
    }

    #[test]
    fn unstable_var_rejected() {
        let mut cfg = ar_config(4, 50);
        cfg.var_b1 = vec![vec![1.05]];
        let err = generate_synthetic_panel::<f64>(&cfg, 1).unwrap_err();
        assert!(matches!(err, Error::UnstableVar(_)));
    }

    #[test]
    fn quarterly_columns_follow_slot_rule() {
        let mut cfg = ar_config(3, 30);
        cfg.quarterly_cols = vec![1];
        let (panel, _) = generate_synthetic_panel::<f64>(&cfg, 5).unwrap();
        for (t, d) in panel.dates().iter().enumerate() {
            if panel.observed(t, 1) {
                assert!(d.is_quarter_end());
                assert!(t >= 4);
            }
        }
    }
}
