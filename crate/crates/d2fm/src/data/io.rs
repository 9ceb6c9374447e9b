//! CSV ingestion and export.
//!
//! Data file: header `date,<code>,...`, ISO-8601 month dates, empty cell =
//! missing. Meta file: header `code,tcode,frequency,delay_days,group`.

use std::collections::HashSet;
use std::path::Path;

use ndarray::Array2;

use crate::calendar::Month;
use crate::data::{Frequency, Panel, SeriesMeta};
use crate::error::{Error, Result};
use crate::num::{cast, Scalar};

/// Reads the series metadata file.
pub fn read_meta(path: &Path) -> Result<Vec<SeriesMeta>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = rdr.headers()?.clone();
    let expect = ["code", "tcode", "frequency", "delay_days", "group"];
    let idx: Vec<usize> = expect
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| Error::Invalid(format!("meta file missing column `{name}`")))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record?;
        let field = |k: usize| record.get(idx[k]).unwrap_or("").to_string();
        let code = field(0);
        if !seen.insert(code.clone()) {
            return Err(Error::BadMeta {
                code,
                reason: "duplicate code in meta file".into(),
            });
        }
        let tcode: u8 = field(1).parse().map_err(|_| Error::BadMeta {
            code: code.clone(),
            reason: format!("bad tcode `{}`", field(1)),
        })?;
        let frequency = match field(2).to_ascii_lowercase().as_str() {
            "monthly" | "m" => Frequency::Monthly,
            "quarterly" | "q" => Frequency::Quarterly,
            other => {
                return Err(Error::BadMeta {
                    code,
                    reason: format!("bad frequency `{other}`"),
                })
            }
        };
        let delay_days: i32 = field(3).parse().map_err(|_| Error::BadMeta {
            code: code.clone(),
            reason: format!("bad delay_days `{}`", field(3)),
        })?;
        let group: u32 = field(4).parse().map_err(|_| Error::BadMeta {
            code: code.clone(),
            reason: format!("bad group `{}`", field(4)),
        })?;
        let meta = SeriesMeta {
            code,
            tcode,
            frequency,
            delay_days,
            group,
        };
        meta.validate()?;
        out.push(meta);
    }
    Ok(out)
}

/// Loads a raw (untransformed) panel from data + meta CSV files.
///
/// The data file's series columns must match the meta file exactly (both
/// directions); columns are reordered to meta order. Quarterly values may
/// appear only in quarter-ending month rows.
pub fn load_panel<F: Scalar>(data_path: &Path, meta_path: &Path) -> Result<Panel<F>> {
    let meta = read_meta(meta_path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(data_path)?;
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || headers.get(0) != Some("date") {
        return Err(Error::Invalid(
            "data file must start with a `date` column".into(),
        ));
    }
    let data_codes: Vec<String> = headers.iter().skip(1).map(|s| s.to_string()).collect();
    let meta_codes: HashSet<&str> = meta.iter().map(|m| m.code.as_str()).collect();
    for code in &data_codes {
        if !meta_codes.contains(code.as_str()) {
            return Err(Error::SeriesMismatch(format!(
                "data column `{code}` not present in meta file"
            )));
        }
    }
    let data_set: HashSet<&str> = data_codes.iter().map(|s| s.as_str()).collect();
    for m in &meta {
        if !data_set.contains(m.code.as_str()) {
            return Err(Error::SeriesMismatch(format!(
                "meta series `{}` not present in data file",
                m.code
            )));
        }
    }
    // column position in the data file for each meta series
    let col_of: Vec<usize> = meta
        .iter()
        .map(|m| data_codes.iter().position(|c| *c == m.code).unwrap() + 1)
        .collect();

    let mut dates: Vec<Month> = Vec::new();
    let mut rows: Vec<Vec<Option<F>>> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let date: Month = record
            .get(0)
            .ok_or_else(|| Error::BadDate(String::new()))?
            .parse()?;
        if let Some(last) = dates.last() {
            let gap = date.months_since(*last);
            if gap == 0 {
                return Err(Error::DuplicateDate(date.to_string()));
            }
            if gap != 1 {
                return Err(Error::DateGap(last.to_string(), date.to_string()));
            }
        }
        dates.push(date);
        let row: Vec<Option<F>> = col_of
            .iter()
            .map(|&c| {
                let cell = record.get(c).unwrap_or("");
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>()
                        .map(|x| Some(cast::<F>(x)))
                        .map_err(|_| Error::Invalid(format!("bad numeric cell `{cell}`")))
                }
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    let t = dates.len();
    let n = meta.len();
    let mut values = Array2::zeros((t, n));
    let mut mask = Array2::from_elem((t, n), false);
    for (r, row) in rows.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            if let Some(x) = cell {
                values[[r, c]] = *x;
                mask[[r, c]] = true;
            }
        }
    }
    Panel::new(dates, values, mask, meta)
}

/// Writes a panel in the same CSV shape the loader reads (missing = empty
/// cell). Vintage export uses this with the tightened mask.
pub fn write_panel_csv<F: Scalar>(panel: &Panel<F>, path: &Path) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    let mut header = vec!["date".to_string()];
    header.extend(panel.meta().iter().map(|m| m.code.clone()));
    wtr.write_record(&header)?;
    for (t, date) in panel.dates().iter().enumerate() {
        let mut row = vec![date.to_string()];
        for i in 0..panel.n_series() {
            if panel.observed(t, i) {
                row.push(format!("{}", panel.values()[[t, i]]));
            } else {
                row.push(String::new());
            }
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes the metadata file in the canonical column order.
pub fn write_meta_csv(meta: &[SeriesMeta], path: &Path) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(["code", "tcode", "frequency", "delay_days", "group"])?;
    for m in meta {
        let freq = match m.frequency {
            Frequency::Monthly => "monthly",
            Frequency::Quarterly => "quarterly",
        };
        wtr.write_record([
            m.code.as_str(),
            &m.tcode.to_string(),
            freq,
            &m.delay_days.to_string(),
            &m.group.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
