//! Panel ingestion, stationarity transforms, standardization, interpolation,
//! and pseudo-real-time vintage construction.

mod io;
mod spline;
mod synthetic;
mod tcode;

pub use io::{load_panel, read_meta, write_meta_csv, write_panel_csv};
pub use spline::spline_fill;
pub use synthetic::{generate_synthetic_panel, DgpConfig, SyntheticTruth};
pub use tcode::{apply_tcode, tcode_lag_depth};

use chrono::{Duration, NaiveDate};
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::calendar::Month;
use crate::error::{Error, Result};
use crate::num::{cast, Scalar};

/// Observation frequency of one series on the monthly grid.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Monthly,
    Quarterly,
}

/// Per-series metadata: identifier, stationarity transform, frequency,
/// publication delay in days, and group category.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub code: String,
    pub tcode: u8,
    pub frequency: Frequency,
    pub delay_days: i32,
    pub group: u32,
}

impl SeriesMeta {
    pub fn validate(&self) -> Result<()> {
        if !(1..=6).contains(&self.tcode) {
            return Err(Error::BadMeta {
                code: self.code.clone(),
                reason: format!("tcode {} outside 1-6", self.tcode),
            });
        }
        if self.delay_days < -3 {
            return Err(Error::BadMeta {
                code: self.code.clone(),
                reason: format!("delay_days {} below -3", self.delay_days),
            });
        }
        Ok(())
    }

    /// Calendar date at which the value for reference month `m` becomes
    /// public: end of the reference period plus the publication delay.
    /// Negative delays (surveys) release before the period ends.
    pub fn release_date(&self, m: Month) -> NaiveDate {
        m.last_day() + Duration::days(self.delay_days as i64)
    }

    /// Grid stride between consecutive observations (1 month or 3 months).
    pub fn stride(&self) -> usize {
        match self.frequency {
            Frequency::Monthly => 1,
            Frequency::Quarterly => 3,
        }
    }
}

/// Monthly-grid panel of transformed series values with a missing mask.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Panel<F> {
    dates: Vec<Month>,
    values: Array2<F>,
    mask: Array2<bool>,
    meta: Vec<SeriesMeta>,
}

impl<F: Scalar> Panel<F> {
    /// Builds a panel, enforcing the grid and frequency invariants:
    /// contiguous strictly increasing monthly dates, matching shapes, and
    /// quarterly series observed only in quarter-ending months.
    pub fn new(
        dates: Vec<Month>,
        values: Array2<F>,
        mask: Array2<bool>,
        meta: Vec<SeriesMeta>,
    ) -> Result<Self> {
        let t = dates.len();
        let n = meta.len();
        if values.dim() != (t, n) || mask.dim() != (t, n) {
            return Err(Error::Invalid(format!(
                "panel shape mismatch: {} dates, {} series, values {:?}, mask {:?}",
                t,
                n,
                values.dim(),
                mask.dim()
            )));
        }
        for w in dates.windows(2) {
            if w[1].months_since(w[0]) != 1 {
                return Err(Error::DateGap(w[0].to_string(), w[1].to_string()));
            }
        }
        for m in &meta {
            m.validate()?;
        }
        for (i, m) in meta.iter().enumerate() {
            if m.frequency == Frequency::Quarterly {
                for (row, date) in dates.iter().enumerate() {
                    if mask[[row, i]] && !date.is_quarter_end() {
                        return Err(Error::QuarterlySlot {
                            code: m.code.clone(),
                            month: date.to_string(),
                        });
                    }
                }
            }
        }
        Ok(Panel {
            dates,
            values,
            mask,
            meta,
        })
    }

    pub fn dates(&self) -> &[Month] {
        &self.dates
    }

    pub fn values(&self) -> &Array2<F> {
        &self.values
    }

    pub fn mask(&self) -> &Array2<bool> {
        &self.mask
    }

    pub fn meta(&self) -> &[SeriesMeta] {
        &self.meta
    }

    pub fn t_len(&self) -> usize {
        self.dates.len()
    }

    pub fn n_series(&self) -> usize {
        self.meta.len()
    }

    pub fn series_index(&self, code: &str) -> Result<usize> {
        self.meta
            .iter()
            .position(|m| m.code == code)
            .ok_or_else(|| Error::UnknownSeries(code.to_string()))
    }

    pub fn observed(&self, t: usize, i: usize) -> bool {
        self.mask[[t, i]]
    }

    /// One series as `Option` values (None = missing).
    pub fn column(&self, i: usize) -> Vec<Option<F>> {
        (0..self.t_len())
            .map(|t| self.mask[[t, i]].then(|| self.values[[t, i]]))
            .collect()
    }

    /// Row index of a month, if on the grid.
    pub fn row_of(&self, m: Month) -> Option<usize> {
        let first = *self.dates.first()?;
        let k = m.months_since(first);
        (k >= 0 && (k as usize) < self.t_len()).then_some(k as usize)
    }

    /// Last row with at least one observation, if any.
    pub fn last_observed_row(&self) -> Option<usize> {
        (0..self.t_len()).rev().find(|&t| {
            (0..self.n_series()).any(|i| self.mask[[t, i]])
        })
    }

    /// Sub-panel over rows `[0, end]` (inclusive).
    pub fn truncate_rows(&self, end: usize) -> Panel<F> {
        let t = end + 1;
        Panel {
            dates: self.dates[..t].to_vec(),
            values: self.values.slice(ndarray::s![..t, ..]).to_owned(),
            mask: self.mask.slice(ndarray::s![..t, ..]).to_owned(),
            meta: self.meta.clone(),
        }
    }

    /// Replaces a single entry (testing and perturbation audits).
    pub fn set_value(&mut self, t: usize, i: usize, value: F) {
        self.values[[t, i]] = value;
        self.mask[[t, i]] = true;
    }
}

/// Per-series affine map fixed on a fitting window: `z = (x - mean) / std`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Standardizer<F> {
    pub mean: Array1<F>,
    pub std: Array1<F>,
}

impl<F: Scalar> Standardizer<F> {
    pub fn apply_entry(&self, i: usize, x: F) -> F {
        (x - self.mean[i]) / self.std[i]
    }

    pub fn invert_entry(&self, i: usize, z: F) -> F {
        z * self.std[i] + self.mean[i]
    }
}

/// Standardizes every series using statistics from observed entries inside
/// `fit_range` only; entries outside the range are scaled with the same
/// statistics (no look-ahead). Sample standard deviation (n-1 divisor).
pub fn standardize<F: Scalar>(
    panel: &Panel<F>,
    fit_range: (Month, Month),
) -> Result<(Panel<F>, Standardizer<F>)> {
    let (lo, hi) = fit_range;
    let n = panel.n_series();
    let mut mean = Array1::zeros(n);
    let mut std = Array1::zeros(n);
    for i in 0..n {
        let mut xs: Vec<F> = Vec::new();
        for (t, &date) in panel.dates().iter().enumerate() {
            if date >= lo && date <= hi && panel.observed(t, i) {
                xs.push(panel.values()[[t, i]]);
            }
        }
        if xs.len() < 2 {
            return Err(Error::TooFewObserved(panel.meta()[i].code.clone()));
        }
        let count = F::from_usize(xs.len()).unwrap();
        let mu = xs.iter().copied().sum::<F>() / count;
        let ss = xs.iter().map(|&x| (x - mu) * (x - mu)).sum::<F>();
        let var = ss / (count - F::one());
        if var <= F::zero() {
            return Err(Error::ZeroVariance(panel.meta()[i].code.clone()));
        }
        mean[i] = mu;
        std[i] = var.sqrt();
    }
    let mut values = panel.values().clone();
    for t in 0..panel.t_len() {
        for i in 0..n {
            values[[t, i]] = (values[[t, i]] - mean[i]) / std[i];
        }
    }
    let out = Panel {
        dates: panel.dates.clone(),
        values,
        mask: panel.mask.clone(),
        meta: panel.meta.clone(),
    };
    Ok((out, Standardizer { mean, std }))
}

/// Applies a standardizer to a (raw) panel without refitting statistics.
pub fn apply_standardizer<F: Scalar>(panel: &Panel<F>, s: &Standardizer<F>) -> Panel<F> {
    let mut values = panel.values().clone();
    for t in 0..panel.t_len() {
        for i in 0..panel.n_series() {
            values[[t, i]] = s.apply_entry(i, values[[t, i]]);
        }
    }
    Panel {
        dates: panel.dates.clone(),
        values,
        mask: panel.mask.clone(),
        meta: panel.meta.clone(),
    }
}

/// The information set available at a calendar date: the source panel with
/// its mask tightened by publication delays. Values are never revised.
#[derive(Clone, Debug)]
pub struct Vintage<F> {
    pub as_of: NaiveDate,
    pub panel: Panel<F>,
}

/// Entry `(t, i)` is observed in the vintage iff it is observed in the
/// source and its release date is on or before `as_of`.
pub fn make_vintage<F: Scalar>(panel: &Panel<F>, as_of: NaiveDate) -> Vintage<F> {
    let mut mask = panel.mask().clone();
    for (i, meta) in panel.meta().iter().enumerate() {
        for (t, &date) in panel.dates().iter().enumerate() {
            if mask[[t, i]] && meta.release_date(date) > as_of {
                mask[[t, i]] = false;
            }
        }
    }
    Vintage {
        as_of,
        panel: Panel {
            dates: panel.dates.clone(),
            values: panel.values().clone(),
            mask,
            meta: panel.meta().to_vec(),
        },
    }
}

/// Spline-fills every column of a panel, returning a dense value matrix.
/// Quarterly columns are interpolated through their quarter-end knots.
pub fn fill_panel<F: Scalar>(panel: &Panel<F>) -> Result<Array2<F>> {
    let mut filled = panel.values().clone();
    for i in 0..panel.n_series() {
        let col = panel.column(i);
        let dense = spline_fill(&col)?;
        for t in 0..panel.t_len() {
            filled[[t, i]] = dense[t];
        }
    }
    Ok(filled)
}

/// Fraction of grid slots that are missing for one series (quarterly series
/// count their off-quarter months as missing).
pub fn missing_fraction<F: Scalar>(panel: &Panel<F>, i: usize) -> f64 {
    let t = panel.t_len();
    if t == 0 {
        return 0.0;
    }
    let missing = (0..t).filter(|&row| !panel.observed(row, i)).count();
    missing as f64 / t as f64
}

/// Convenience constructor for a monthly `SeriesMeta` in tests and synthetic
/// data.
pub fn monthly_meta(code: &str, delay_days: i32) -> SeriesMeta {
    SeriesMeta {
        code: code.to_string(),
        tcode: 1,
        frequency: Frequency::Monthly,
        delay_days,
        group: 1,
    }
}

/// Convenience constructor for a quarterly `SeriesMeta`.
pub fn quarterly_meta(code: &str, delay_days: i32) -> SeriesMeta {
    SeriesMeta {
        code: code.to_string(),
        tcode: 1,
        frequency: Frequency::Quarterly,
        delay_days,
        group: 1,
    }
}

/// Missing-aware per-series variance of observed entries (population
/// divisor); used for degenerate fallbacks.
pub fn observed_variance<F: Scalar>(xs: &[Option<F>]) -> F {
    let vals: Vec<F> = xs.iter().flatten().copied().collect();
    if vals.len() < 2 {
        return F::zero();
    }
    let count = F::from_usize(vals.len()).unwrap();
    let mu = vals.iter().copied().sum::<F>() / count;
    vals.iter().map(|&x| (x - mu) * (x - mu)).sum::<F>() / count
}

pub(crate) fn _unused_cast_guard<F: Scalar>() -> F {
    cast::<F>(0.0)
}
