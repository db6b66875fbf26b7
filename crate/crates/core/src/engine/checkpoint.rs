//! Line-oriented checkpoint files.
//!
//! ```text
//! schema=1
//! lo=6
//! hi=10000
//! next_e=5000
//! verified=2497
//! failures=
//! records=6:3,12:5,30:7,98:19,220:23,308:31,556:47,992:73,2642:103
//! checksum=<sha256 of every preceding byte, hex>
//! ```

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::RecordEntry;

pub const SCHEMA: u32 = 1;

const KEYS: [&str; 7] = ["schema", "lo", "hi", "next_e", "verified", "failures", "records"];

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("checkpoint field `{field}`: {reason}")]
    Field { field: String, reason: String },
}

impl CheckpointError {
    fn field(field: &str, reason: impl Into<String>) -> Self {
        CheckpointError::Field {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    /// Name of the offending field, for parse errors.
    pub fn offending_field(&self) -> Option<&str> {
        match self {
            CheckpointError::Field { field, .. } => Some(field),
            CheckpointError::Io { .. } => None,
        }
    }
}

/// Progress of a sweep over `[lo, hi)`: everything below `next_e` is done.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub lo: u64,
    pub hi: u64,
    pub next_e: u64,
    pub verified: u64,
    pub failures: Vec<u64>,
    pub records: Vec<RecordEntry>,
}

fn checksum(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

impl Checkpoint {
    pub fn is_complete(&self) -> bool {
        self.next_e >= self.hi
    }

    pub fn to_text(&self) -> String {
        let mut body = String::new();
        let _ = writeln!(body, "schema={SCHEMA}");
        let _ = writeln!(body, "lo={}", self.lo);
        let _ = writeln!(body, "hi={}", self.hi);
        let _ = writeln!(body, "next_e={}", self.next_e);
        let _ = writeln!(body, "verified={}", self.verified);
        let failures: Vec<String> = self.failures.iter().map(u64::to_string).collect();
        let _ = writeln!(body, "failures={}", failures.join(","));
        let records: Vec<String> = self
            .records
            .iter()
            .map(|r| format!("{}:{}", r.e, r.min_p1))
            .collect();
        let _ = writeln!(body, "records={}", records.join(","));
        let sum = checksum(&body);
        body.push_str("checksum=");
        body.push_str(&sum);
        body.push('\n');
        body
    }

    pub fn parse(text: &str) -> Result<Self, CheckpointError> {
        let (body, last) = match text.trim_end_matches('\n').rsplit_once('\n') {
            Some((body, last)) => (format!("{body}\n"), last),
            None => return Err(CheckpointError::field("checksum", "missing")),
        };
        let found = last
            .strip_prefix("checksum=")
            .ok_or_else(|| CheckpointError::field("checksum", "missing"))?;
        if found != checksum(&body) {
            return Err(CheckpointError::field("checksum", "does not match contents"));
        }

        let mut values: [Option<&str>; 7] = [None; 7];
        for line in body.lines() {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CheckpointError::field(line, "expected key=value"))?;
            let slot = KEYS
                .iter()
                .position(|&key| key == k)
                .ok_or_else(|| CheckpointError::field(k, "unknown key"))?;
            if values[slot].replace(v).is_some() {
                return Err(CheckpointError::field(k, "repeated"));
            }
        }
        let get = |i: usize| values[i].ok_or_else(|| CheckpointError::field(KEYS[i], "missing"));
        let int = |i: usize| -> Result<u64, CheckpointError> {
            get(i)?
                .parse()
                .map_err(|_| CheckpointError::field(KEYS[i], "not an unsigned integer"))
        };

        let schema = int(0)?;
        if schema != u64::from(SCHEMA) {
            return Err(CheckpointError::field(
                "schema",
                format!("version {schema} is not supported (expected {SCHEMA})"),
            ));
        }
        let (lo, hi, next_e, verified) = (int(1)?, int(2)?, int(3)?, int(4)?);
        let failures = split_list(get(5)?)
            .map(|s| {
                s.parse()
                    .map_err(|_| CheckpointError::field("failures", format!("bad entry `{s}`")))
            })
            .collect::<Result<Vec<u64>, _>>()?;
        let records = split_list(get(6)?)
            .map(|s| {
                let bad = || CheckpointError::field("records", format!("bad entry `{s}`"));
                let (e, p) = s.split_once(':').ok_or_else(bad)?;
                Ok(RecordEntry {
                    e: e.parse().map_err(|_| bad())?,
                    min_p1: p.parse().map_err(|_| bad())?,
                })
            })
            .collect::<Result<Vec<_>, CheckpointError>>()?;

        let cp = Checkpoint {
            lo,
            hi,
            next_e,
            verified,
            failures,
            records,
        };
        cp.validate()?;
        Ok(cp)
    }

    fn validate(&self) -> Result<(), CheckpointError> {
        if self.lo < 6 || self.lo & 1 == 1 {
            return Err(CheckpointError::field("lo", "must be even and at least 6"));
        }
        if self.hi & 1 == 1 || self.hi <= self.lo {
            return Err(CheckpointError::field("hi", "must be even and above lo"));
        }
        if self.next_e & 1 == 1 || self.next_e < self.lo || self.next_e > self.hi {
            return Err(CheckpointError::field("next_e", "must be even and within [lo, hi]"));
        }
        let done = (self.next_e - self.lo) / 2;
        if self.verified + self.failures.len() as u64 != done {
            return Err(CheckpointError::field(
                "verified",
                format!("verified plus failures must equal {done} processed evens"),
            ));
        }
        if self
            .failures
            .iter()
            .any(|&f| f < self.lo || f >= self.next_e || f & 1 == 1)
            || !self.failures.windows(2).all(|w| w[0] < w[1])
        {
            return Err(CheckpointError::field("failures", "entries out of range or order"));
        }
        if self.records.iter().any(|r| r.e < self.lo || r.e >= self.next_e)
            || !self
                .records
                .windows(2)
                .all(|w| w[0].e < w[1].e && w[0].min_p1 < w[1].min_p1)
        {
            return Err(CheckpointError::field("records", "entries out of range or not strictly ascending"));
        }
        Ok(())
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').filter(|t| !t.is_empty())
}

/// Writes the checkpoint through a temporary file and a rename.
pub fn checkpoint_save(cp: &Checkpoint, path: &Path) -> Result<(), CheckpointError> {
    let io_err = |source| CheckpointError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, cp.to_text()).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

pub fn checkpoint_resume(path: &Path) -> Result<Checkpoint, CheckpointError> {
    let text = fs::read_to_string(path).map_err(|source| CheckpointError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Checkpoint::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        Checkpoint {
            lo: 6,
            hi: 10_000,
            next_e: 100,
            verified: 47,
            failures: vec![],
            records: vec![
                RecordEntry { e: 6, min_p1: 3 },
                RecordEntry { e: 12, min_p1: 5 },
                RecordEntry { e: 30, min_p1: 7 },
                RecordEntry { e: 98, min_p1: 19 },
            ],
        }
    }

    #[test]
    fn text_round_trip() {
        let cp = sample();
        let text = cp.to_text();
        assert!(text.starts_with("schema=1\nlo=6\nhi=10000\nnext_e=100\nverified=47\nfailures=\nrecords=6:3,12:5,30:7,98:19\nchecksum="));
        assert_eq!(Checkpoint::parse(&text).unwrap(), cp);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.ckpt");
        checkpoint_save(&sample(), &path).unwrap();
        assert_eq!(checkpoint_resume(&path).unwrap(), sample());
    }

    fn field_of(text: &str) -> String {
        Checkpoint::parse(text)
            .unwrap_err()
            .offending_field()
            .unwrap()
            .to_string()
    }

    /// Re-seals an edited body so only the semantic check can fail.
    fn reseal(body: &str) -> String {
        format!("{body}checksum={}\n", checksum(body))
    }

    #[test]
    fn corruption_is_detected() {
        let text = sample().to_text().replace("verified=47", "verified=48");
        assert_eq!(field_of(&text), "checksum");
        let text = sample().to_text();
        let truncated = &text[..text.len() - 10];
        assert_eq!(field_of(truncated), "checksum");
    }

    #[test]
    fn errors_name_the_field() {
        let body = sample().to_text();
        let body = &body[..body.find("checksum=").unwrap()];
        assert_eq!(field_of(&reseal(&body.replace("schema=1", "schema=2"))), "schema");
        assert_eq!(field_of(&reseal(&body.replace("verified=47", "verified=48"))), "verified");
        assert_eq!(field_of(&reseal(&body.replace("next_e=100", "next_e=101"))), "next_e");
        assert_eq!(field_of(&reseal(&body.replace("lo=6", "lo=x"))), "lo");
        assert_eq!(field_of(&reseal(&body.replace("30:7", "30:2"))), "records");
        assert_eq!(field_of(&reseal(&body.replace("98:19", "98-19"))), "records");
        assert_eq!(field_of(&reseal(&format!("{body}extra=1\n"))), "extra");
        assert_eq!(field_of(&reseal(&body.replace("hi=10000\n", ""))), "hi");
    }
}
