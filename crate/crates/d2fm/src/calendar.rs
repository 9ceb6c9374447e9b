//! Monthly calendar grid and release-date arithmetic.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A calendar month, the unit of the panel's time grid.
///
/// Stored as a flat month count so arithmetic and ordering are cheap.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Month(i32);

impl Month {
    pub fn new(year: i32, month: u32) -> Self {
        assert!((1..=12).contains(&month), "month out of range: {month}");
        Month(year * 12 + month as i32 - 1)
    }

    pub fn year(self) -> i32 {
        self.0.div_euclid(12)
    }

    pub fn month(self) -> u32 {
        self.0.rem_euclid(12) as u32 + 1
    }

    /// Month shifted by `k` (negative shifts go back in time).
    pub fn offset(self, k: i32) -> Self {
        Month(self.0 + k)
    }

    pub fn next(self) -> Self {
        self.offset(1)
    }

    /// Signed number of months from `earlier` to `self`.
    pub fn months_since(self, earlier: Month) -> i32 {
        self.0 - earlier.0
    }

    /// Mar/Jun/Sep/Dec: the months in which quarterly values sit.
    pub fn is_quarter_end(self) -> bool {
        self.month() % 3 == 0
    }

    /// The quarter-ending month of the quarter containing `self`.
    pub fn quarter_end(self) -> Self {
        let m = self.month();
        self.offset(((3 - m % 3) % 3) as i32)
    }

    pub fn first_day(self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year(), self.month(), 1).expect("valid month")
    }

    /// Last calendar day of the month (the reference-period end).
    pub fn last_day(self) -> NaiveDate {
        let next = self.next();
        next.first_day() - Duration::days(1)
    }

    /// Month containing a calendar date.
    pub fn containing(date: NaiveDate) -> Self {
        Month::new(date.year(), date.month())
    }
}

impl FromStr for Month {
    type Err = Error;

    /// Accepts `YYYY-MM` or a full `YYYY-MM-DD` (day ignored).
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let parts: Vec<&str> = s.split('-').collect();
        let bad = || Error::BadDate(s.to_string());
        if parts.len() != 2 && parts.len() != 3 {
            return Err(bad());
        }
        let year: i32 = parts[0].parse().map_err(|_| bad())?;
        let month: u32 = parts[1].parse().map_err(|_| bad())?;
        if !(1..=12).contains(&month) {
            return Err(bad());
        }
        if parts.len() == 3 {
            let day: u32 = parts[2].parse().map_err(|_| bad())?;
            NaiveDate::from_ymd_opt(year, month, day).ok_or_else(bad)?;
        }
        Ok(Month::new(year, month))
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year(), self.month())
    }
}

impl Serialize for Month {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Month {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Contiguous ascending grid `[start, start + len)`.
pub fn month_grid(start: Month, len: usize) -> Vec<Month> {
    (0..len as i32).map(|k| start.offset(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let m: Month = "2019-03".parse().unwrap();
        assert_eq!(m, Month::new(2019, 3));
        assert_eq!(m.to_string(), "2019-03");
        let with_day: Month = "2019-03-15".parse().unwrap();
        assert_eq!(with_day, m);
        assert!("2019-13".parse::<Month>().is_err());
        assert!("2019".parse::<Month>().is_err());
    }

    #[test]
    fn quarter_ends() {
        assert!(Month::new(2020, 3).is_quarter_end());
        assert!(Month::new(2020, 12).is_quarter_end());
        assert!(!Month::new(2020, 2).is_quarter_end());
        assert_eq!(Month::new(2020, 1).quarter_end(), Month::new(2020, 3));
        assert_eq!(Month::new(2020, 3).quarter_end(), Month::new(2020, 3));
        assert_eq!(Month::new(2020, 11).quarter_end(), Month::new(2020, 12));
    }

    #[test]
    fn period_end_dates() {
        assert_eq!(
            Month::new(2020, 2).last_day(),
            NaiveDate::from_ymd_opt(2020, 2, 29).unwrap()
        );
        assert_eq!(
            Month::new(2019, 1).last_day(),
            NaiveDate::from_ymd_opt(2019, 1, 31).unwrap()
        );
    }

    #[test]
    fn offsets_cross_year_boundaries() {
        let m = Month::new(2020, 1);
        assert_eq!(m.offset(-1), Month::new(2019, 12));
        assert_eq!(m.offset(12), Month::new(2021, 1));
        assert_eq!(m.offset(14).months_since(m), 14);
    }
}
