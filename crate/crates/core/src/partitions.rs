//! Goldbach partitions of even numbers into two odd primes.
//!
//! `p1` candidates are drawn in ascending order from a [`PrimeTable`]; the
//! complement `e - p1` is tested against any [`PrimeSource`]. When the table
//! runs out before `e / 2`, the search continues over odd candidates with
//! [`is_prime`] so the answer stays exact for every even `e < 2^64`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::primes::{is_prime, PrimeSource, PrimeTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("{e} is not an even number greater than 4")]
    NotEvenAboveFour { e: u64 },
    #[error("comet bounds [{lo}, {hi}) must be even with 6 <= lo < hi")]
    BadBounds { lo: u64, hi: u64 },
    #[error("({p1}, {p2}) is not a Goldbach partition of {e}")]
    Invalid { e: u64, p1: u64, p2: u64 },
}

/// `e = p1 + p2` with odd primes `3 <= p1 <= p2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GoldbachPartition {
    e: u64,
    p1: u64,
    p2: u64,
}

impl GoldbachPartition {
    /// Validates the pair, including primality of both parts.
    pub fn new(p1: u64, p2: u64) -> Result<Self, PartitionError> {
        let (p1, p2) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let e = p1.checked_add(p2);
        match e {
            Some(e) if p1 >= 3 && p1 & 1 == 1 && p2 & 1 == 1 && is_prime(p1) && is_prime(p2) => {
                Ok(Self { e, p1, p2 })
            }
            _ => Err(PartitionError::Invalid {
                e: e.unwrap_or(u64::MAX),
                p1,
                p2,
            }),
        }
    }

    // Callers have already checked primality of both parts.
    #[inline]
    fn trusted(e: u64, p1: u64) -> Self {
        debug_assert!(p1 >= 3 && p1 <= e - p1);
        Self { e, p1, p2: e - p1 }
    }

    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn p1(&self) -> u64 {
        self.p1
    }

    pub fn p2(&self) -> u64 {
        self.p2
    }

    /// Half of `e`; the radius of the Goldbach Circle.
    pub fn n(&self) -> u64 {
        self.e / 2
    }
}

/// Number of Goldbach partitions of one even number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CometPoint {
    pub e: u64,
    pub count: u64,
}

pub(crate) fn check_even(e: u64) -> Result<(), PartitionError> {
    if e < 6 || e & 1 == 1 {
        return Err(PartitionError::NotEvenAboveFour { e });
    }
    Ok(())
}

/// Ascending odd `p1` candidates up to `half`: table primes first, then odd
/// numbers past the table filtered by [`is_prime`].
fn odd_prime_candidates(table: &PrimeTable, half: u64) -> impl Iterator<Item = u64> + '_ {
    let from_table = table
        .odd_primes()
        .iter()
        .map(|&p| u64::from(p))
        .take_while(move |&p| p <= half);
    let beyond_start = (table.limit() + 1) | 1;
    let beyond = (beyond_start..=half)
        .step_by(2)
        .filter(|&p| is_prime(p));
    from_table.chain(beyond)
}

/// The partition with the smallest `p1`, or `None` if `e` has no partition.
///
/// `probes` supplies `p1` candidates; `complement` decides `e - p1`.
pub fn minimal_partition<S: PrimeSource + ?Sized>(
    e: u64,
    probes: &PrimeTable,
    complement: &S,
) -> Result<Option<GoldbachPartition>, PartitionError> {
    check_even(e)?;
    let half = e / 2;
    for p in probes.odd_primes() {
        let p = u64::from(*p);
        if p > half {
            return Ok(None);
        }
        if complement.is_prime(e - p) {
            return Ok(Some(GoldbachPartition::trusted(e, p)));
        }
    }
    if probes.limit() < half {
        log::warn!(
            "probe table exhausted at {} while searching e = {e}; continuing with single-number tests",
            probes.limit()
        );
        let beyond_start = (probes.limit() + 1) | 1;
        for p in (beyond_start..=half).step_by(2) {
            if is_prime(p) && complement.is_prime(e - p) {
                return Ok(Some(GoldbachPartition::trusted(e, p)));
            }
        }
    }
    Ok(None)
}

/// Every partition of `e`, ascending in `p1`.
pub fn all_partitions(e: u64, table: &PrimeTable) -> Result<Vec<GoldbachPartition>, PartitionError> {
    check_even(e)?;
    Ok(odd_prime_candidates(table, e / 2)
        .filter(|&p| table.is_prime(e - p))
        .map(|p| GoldbachPartition::trusted(e, p))
        .collect())
}

/// `all_partitions(e).len()` without building the list.
pub fn count_partitions(e: u64, table: &PrimeTable) -> Result<u64, PartitionError> {
    check_even(e)?;
    Ok(odd_prime_candidates(table, e / 2)
        .filter(|&p| table.is_prime(e - p))
        .count() as u64)
}

/// Partition counts for each even `e` in `[lo, hi)`, ascending.
pub fn comet(
    lo: u64,
    hi: u64,
    table: &PrimeTable,
) -> Result<impl Iterator<Item = CometPoint> + '_, PartitionError> {
    if lo < 6 || lo & 1 == 1 || hi & 1 == 1 || lo >= hi {
        return Err(PartitionError::BadBounds { lo, hi });
    }
    Ok((lo..hi).step_by(2).map(move |e| CometPoint {
        e,
        count: count_partitions(e, table).expect("bounds checked"),
    }))
}
