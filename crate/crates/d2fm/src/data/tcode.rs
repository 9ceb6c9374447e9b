//! Stationarity transforms selected by integer code, FRED-MD style:
//!
//! ```text
//! 1: x            2: (1-L)x          3: (1-L)(1-L^12)x
//! 4: log x        5: (1-L)log x      6: (1-L)(1-L^12)log x
//! ```
//!
//! Lags operate in grid steps of the input slice; quarterly series should be
//! compressed to their native grid before transforming.

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Number of leading entries consumed by the lags of a transform code.
pub fn tcode_lag_depth(tcode: u8) -> Result<usize> {
    match tcode {
        1 | 4 => Ok(0),
        2 | 5 => Ok(1),
        3 | 6 => Ok(13),
        other => Err(Error::UnknownTcode(other)),
    }
}

/// Applies the transform for `tcode` to a series with missing entries.
///
/// Entries whose own value or any required lag is missing come out missing;
/// leading entries consumed by the lags are always missing. Log transforms
/// reject non-positive observed values.
pub fn apply_tcode<F: Scalar>(series: &[Option<F>], tcode: u8) -> Result<Vec<Option<F>>> {
    let depth = tcode_lag_depth(tcode)?;
    if series.len() < depth.max(1) {
        return Err(Error::SeriesTooShort {
            tcode,
            len: series.len(),
            need: depth.max(1),
        });
    }
    let logged: Vec<Option<F>> = if matches!(tcode, 4 | 5 | 6) {
        series
            .iter()
            .enumerate()
            .map(|(i, v)| match v {
                Some(x) if *x <= F::zero() => Err(Error::NonPositiveLog {
                    index: i,
                    value: x.to_f64().unwrap_or(f64::NAN),
                }),
                Some(x) => Ok(Some(x.ln())),
                None => Ok(None),
            })
            .collect::<Result<_>>()?
    } else {
        series.to_vec()
    };

    let at = |t: i64| -> Option<F> {
        if t < 0 {
            None
        } else {
            logged.get(t as usize).copied().flatten()
        }
    };

    let out = (0..series.len() as i64)
        .map(|t| match tcode {
            1 | 4 => at(t),
            2 | 5 => match (at(t), at(t - 1)) {
                (Some(a), Some(b)) => Some(a - b),
                _ => None,
            },
            3 | 6 => match (at(t), at(t - 1), at(t - 12), at(t - 13)) {
                (Some(a), Some(b), Some(c), Some(d)) => Some(a - b - c + d),
                _ => None,
            },
            _ => unreachable!("tcode validated above"),
        })
        .collect();
    Ok(out)
}
