//! Password length from encrypted payload size.
//!
//! Length-preserving encryption leaks `payload = overhead + bytes_per_char ·
//! length`; a [`SiteProfile`] captures one site's line.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiteProfile {
    pub bytes_per_char: u64,
    pub overhead: u64,
}

impl SiteProfile {
    pub fn new(bytes_per_char: u64, overhead: u64) -> Result<Self> {
        if bytes_per_char == 0 {
            return Err(Error::InvalidParams("bytes_per_char must be at least 1".into()));
        }
        Ok(Self { bytes_per_char, overhead })
    }

    pub fn payload(&self, length: u64) -> u64 {
        self.overhead + self.bytes_per_char * length
    }
}

/// Recovers the password length behind a payload size.
pub fn infer_length(payload: u64, profile: &SiteProfile) -> Result<u64> {
    let minimum = profile.overhead + profile.bytes_per_char;
    if payload < minimum {
        return Err(Error::PayloadTooSmall { payload, minimum });
    }
    let body = payload - profile.overhead;
    if !body.is_multiple_of(profile.bytes_per_char) {
        return Err(Error::NonIntegralLength { payload });
    }
    Ok(body / profile.bytes_per_char)
}

/// Solves the profile from `(length, payload)` observations and checks every
/// observation against it exactly.
pub fn calibrate(observations: &[(u64, u64)]) -> Result<SiteProfile> {
    let &(l1, p1) = observations.first().ok_or(Error::InsufficientData)?;
    let &(l2, p2) = observations.iter().find(|o| o.0 != l1).ok_or(Error::InsufficientData)?;
    let (l1, p1, l2, p2) = (l1 as i128, p1 as i128, l2 as i128, p2 as i128);
    let (dl, dp) = (l2 - l1, p2 - p1);
    // collinearity with the first two points, in exact integer arithmetic
    let on_line = |&(l, p): &(u64, u64)| (p as i128 - p1) * dl == (l as i128 - l1) * dp;
    if !observations.iter().all(on_line) {
        return Err(Error::InconsistentObservations);
    }
    if dp % dl != 0 || dp / dl <= 0 {
        return Err(Error::NonIntegerProfile);
    }
    let rate = dp / dl;
    let overhead = p1 - rate * l1;
    if overhead < 0 {
        return Err(Error::NonIntegerProfile);
    }
    SiteProfile::new(rate as u64, overhead as u64)
}

/// Reads `length,payload` CSV rows; a non-numeric first row is treated as a
/// header.
pub fn read_pairs<R: Read>(source: R) -> Result<Vec<(u64, u64)>> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).flexible(true).from_reader(source);
    let mut pairs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::MalformedLine { line: i + 1, content: e.to_string() })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed = match (record.get(0), record.get(1), record.len()) {
            (Some(l), Some(p), 2) => l.parse::<u64>().ok().zip(p.parse::<u64>().ok()),
            _ => None,
        };
        match parsed {
            Some(pair) => pairs.push(pair),
            None if i == 0 => continue,
            None => {
                return Err(Error::MalformedLine { line: i + 1, content: record.iter().collect::<Vec<_>>().join(",") })
            }
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inference_examples() {
        assert_eq!(infer_length(12, &SiteProfile::new(1, 0).unwrap()).unwrap(), 12);
        assert_eq!(infer_length(24, &SiteProfile::new(2, 0).unwrap()).unwrap(), 12);
        let p = SiteProfile::new(1, 50).unwrap();
        assert!(matches!(infer_length(50, &p), Err(Error::PayloadTooSmall { .. })));
        let p = SiteProfile::new(2, 3).unwrap();
        assert!(matches!(infer_length(10, &p), Err(Error::NonIntegralLength { .. })));
        assert!(SiteProfile::new(0, 0).is_err());
    }

    #[test]
    fn calibration_examples() {
        let p = calibrate(&[(8, 58), (9, 59), (10, 60)]).unwrap();
        assert_eq!(p, SiteProfile { bytes_per_char: 1, overhead: 50 });
        let p = calibrate(&[(8, 16), (10, 20)]).unwrap();
        assert_eq!(p, SiteProfile { bytes_per_char: 2, overhead: 0 });
        assert!(matches!(calibrate(&[(8, 58), (9, 60), (10, 61)]), Err(Error::InconsistentObservations)));
    }

    #[test]
    fn calibration_errors() {
        assert!(matches!(calibrate(&[]), Err(Error::InsufficientData)));
        assert!(matches!(calibrate(&[(8, 58), (8, 58)]), Err(Error::InsufficientData)));
        assert!(matches!(calibrate(&[(2, 10), (4, 13)]), Err(Error::NonIntegerProfile)));
        assert!(matches!(calibrate(&[(2, 10), (4, 8)]), Err(Error::NonIntegerProfile)));
        assert!(matches!(calibrate(&[(2, 1), (4, 5)]), Err(Error::NonIntegerProfile)));
    }

    #[test]
    fn pair_parsing() {
        let pairs = read_pairs("length,payload\n8, 58\n9,59\n\n".as_bytes()).unwrap();
        assert_eq!(pairs, vec![(8, 58), (9, 59)]);
        assert!(read_pairs("8,58\nx,1\n".as_bytes()).is_err());
    }
}
