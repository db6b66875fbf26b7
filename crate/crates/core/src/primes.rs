//! Exact primality over `u64`.
//!
//! Three tools, each suited to a different access pattern:
//!
//! * [`sieve_upto`] builds a [`PrimeTable`]: an ordered prime list plus an
//!   odd-only bitmap for O(1) membership, for limits up to `2^32`.
//! * [`segment_sieve`] sieves a window `[lo, hi)` anywhere below `2^64` using
//!   a base table that reaches `sqrt(hi)`. Sweeps use one window per chunk.
//! * [`is_prime`] answers single queries with a deterministic strong
//!   pseudoprime test whose witness sets are proven complete below `2^64`.
//!
//! All bitmaps store one bit per odd integer; even numbers other than 2 are
//! never prime and need no storage.

use thiserror::Error;

/// Largest limit accepted by [`sieve_upto`].
pub const MAX_TABLE_LIMIT: u64 = 1 << 32;

/// Default number of odd candidates sieved per window.
pub const DEFAULT_SEGMENT_SPAN: u64 = 1 << 21;

/// Odd integers covered by one block when building a table.
const TABLE_BLOCK_ODDS: u64 = 1 << 21;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrimeError {
    #[error("sieve limit {limit} outside [2, 2^32]")]
    LimitOutOfRange { limit: u64 },
    #[error("window lower bound {lo} must be even")]
    OddLowerBound { lo: u64 },
    #[error("empty window [{lo}, {hi})")]
    EmptyWindow { lo: u64, hi: u64 },
    #[error("base table reaches {have} but window needs primes up to {needed}")]
    BaseTooSmall { needed: u64, have: u64 },
}

/// Anything that can answer exact primality questions.
pub trait PrimeSource {
    fn is_prime(&self, x: u64) -> bool;
}

/// Stateless source backed by [`is_prime`].
#[derive(Debug, Clone, Copy, Default)]
pub struct MillerRabin;

impl PrimeSource for MillerRabin {
    #[inline]
    fn is_prime(&self, x: u64) -> bool {
        is_prime(x)
    }
}

/// All primes up to an inclusive limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u32>,
    // bit i <=> 2i + 1 is prime
    odd_bits: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Primes in increasing order.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Primes above 2, in increasing order.
    pub fn odd_primes(&self) -> &[u32] {
        let skip = usize::from(self.primes.first() == Some(&2));
        &self.primes[skip..]
    }

    /// Prime-counting function at the table limit.
    pub fn pi(&self) -> usize {
        self.primes.len()
    }

    /// Membership for `x <= limit`; `None` when `x` is past the table.
    #[inline]
    pub fn contains(&self, x: u64) -> Option<bool> {
        if x > self.limit {
            return None;
        }
        if x & 1 == 0 {
            return Some(x == 2);
        }
        let i = x >> 1;
        Some((self.odd_bits[(i >> 6) as usize] >> (i & 63)) & 1 == 1)
    }
}

impl PrimeSource for PrimeTable {
    /// Table lookup, falling back to [`is_prime`] past the limit.
    #[inline]
    fn is_prime(&self, x: u64) -> bool {
        match self.contains(x) {
            Some(b) => b,
            None => is_prime(x),
        }
    }
}

/// Primality flags for the odd integers of `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentBitmap {
    lo: u64,
    hi: u64,
    // bit i <=> lo + 2i + 1 is prime
    bits: Vec<u64>,
}

impl SegmentBitmap {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Primality of `x`, or `None` when `x` lies outside the window.
    #[inline]
    pub fn lookup(&self, x: u64) -> Option<bool> {
        if x < self.lo || x >= self.hi {
            return None;
        }
        if x & 1 == 0 {
            return Some(x == 2);
        }
        let i = (x - self.lo) >> 1;
        Some((self.bits[(i >> 6) as usize] >> (i & 63)) & 1 == 1)
    }

    /// Number of odd primes in the window.
    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Odd primes in the window, ascending.
    pub fn odd_primes(&self) -> impl Iterator<Item = u64> + '_ {
        let lo = self.lo;
        self.bits.iter().enumerate().flat_map(move |(wi, &word)| {
            BitIter(word).map(move |b| lo + 2 * (wi as u64 * 64 + u64::from(b)) + 1)
        })
    }
}

/// A sieved window backed by a table (and ultimately [`is_prime`]) for
/// everything outside it.
#[derive(Debug, Clone, Copy)]
pub struct Windowed<'a> {
    pub table: &'a PrimeTable,
    pub window: &'a SegmentBitmap,
}

impl PrimeSource for Windowed<'_> {
    #[inline]
    fn is_prime(&self, x: u64) -> bool {
        match self.window.lookup(x) {
            Some(b) => b,
            None => self.table.is_prime(x),
        }
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// A bit vector with the first `n` bits set.
fn ones(n: u64) -> Vec<u64> {
    let words = n.div_ceil(64) as usize;
    let mut bits = vec![u64::MAX; words];
    let tail = n % 64;
    if tail != 0 {
        bits[words - 1] = (1u64 << tail) - 1;
    }
    bits
}

/// Clears the bits of odd composites in `[lo, hi)`. `bits` indexes odd
/// numbers from `lo + 1`; `lo` is even. `odd_primes` must include every odd
/// prime up to `sqrt(hi - 1)`; larger ones are ignored.
fn cross_off(bits: &mut [u64], lo: u64, hi: u64, odd_primes: impl IntoIterator<Item = u64>) {
    let n_odds = (hi - lo) / 2;
    for p in odd_primes {
        let sq = match p.checked_mul(p) {
            Some(sq) if sq < hi => sq,
            _ => break,
        };
        let start = if sq > lo {
            sq
        } else {
            // smallest odd multiple of p above lo
            let m = u128::from(lo / p + 1) * u128::from(p);
            let m = if m & 1 == 0 { m + u128::from(p) } else { m };
            if m >= u128::from(hi) {
                continue;
            }
            m as u64
        };
        let mut i = (start - lo) / 2;
        while i < n_odds {
            bits[(i >> 6) as usize] &= !(1u64 << (i & 63));
            i += p;
        }
    }
    if lo == 0 && n_odds > 0 {
        // 1 is not prime
        bits[0] &= !1;
    }
}

/// Builds the table of all primes up to `limit` (inclusive).
pub fn sieve_upto(limit: u64) -> Result<PrimeTable, PrimeError> {
    if !(2..=MAX_TABLE_LIMIT).contains(&limit) {
        return Err(PrimeError::LimitOutOfRange { limit });
    }
    let root = limit.isqrt();
    let base = small_odd_primes(root);

    // odd numbers 1, 3, .., up to limit
    let n_odds = limit.div_ceil(2);
    let mut odd_bits = ones(n_odds);

    // Blocks are a multiple of 64 odds wide so each maps to whole words.
    let mut block_lo = 0u64;
    while block_lo < 2 * n_odds {
        let block_hi = (block_lo + 2 * TABLE_BLOCK_ODDS).min(2 * n_odds);
        let w0 = (block_lo / 128) as usize;
        let w1 = (block_hi / 2).div_ceil(64) as usize;
        cross_off(
            &mut odd_bits[w0..w1],
            block_lo,
            block_hi,
            base.iter().copied(),
        );
        block_lo = block_hi;
    }

    let mut primes = Vec::with_capacity(prime_count_estimate(limit));
    primes.push(2);
    for (wi, &word) in odd_bits.iter().enumerate() {
        for b in BitIter(word) {
            primes.push((2 * (wi as u64 * 64 + u64::from(b)) + 1) as u32);
        }
    }
    Ok(PrimeTable {
        limit,
        primes,
        odd_bits,
    })
}

/// Odd primes up to `limit` by a plain odd-only sieve. Used for base primes.
fn small_odd_primes(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = limit.div_ceil(2);
    let mut composite = vec![false; n as usize];
    let mut i = 1u64;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i as usize] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < n {
                composite[j as usize] = true;
                j += p;
            }
        }
        i += 1;
    }
    (1..n)
        .filter(|&i| !composite[i as usize])
        .map(|i| 2 * i + 1)
        .collect()
}

fn prime_count_estimate(limit: u64) -> usize {
    if limit < 17 {
        return 8;
    }
    let x = limit as f64;
    (1.26 * x / x.ln()) as usize
}

/// Sieves the odd integers of `[lo, hi)`.
///
/// `base` must contain every prime up to `floor(sqrt(hi - 1))`.
pub fn segment_sieve(lo: u64, hi: u64, base: &PrimeTable) -> Result<SegmentBitmap, PrimeError> {
    if lo & 1 == 1 {
        return Err(PrimeError::OddLowerBound { lo });
    }
    if lo >= hi {
        return Err(PrimeError::EmptyWindow { lo, hi });
    }
    let needed = (hi - 1).isqrt();
    if base.limit() < needed {
        return Err(PrimeError::BaseTooSmall {
            needed,
            have: base.limit(),
        });
    }
    let n_odds = (hi - lo) / 2;
    let mut bits = ones(n_odds);
    cross_off(
        &mut bits,
        lo,
        lo + 2 * n_odds,
        base.odd_primes().iter().map(|&p| u64::from(p)),
    );
    Ok(SegmentBitmap { lo, hi, bits })
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Strong probable-prime test of odd `n > 2` to base `a`.
fn strong_probable_prime(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let d_shift = (n - 1).trailing_zeros();
    let d = (n - 1) >> d_shift;
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..d_shift {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

// Jaeschke: {2, 7, 61} is exact below 4,759,123,141.
const WITNESSES_32: [u64; 3] = [2, 7, 61];
const WITNESSES_32_BOUND: u64 = 4_759_123_141;
// Sinclair's seven bases are exact for all n < 2^64.
const WITNESSES_64: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// Deterministic primality for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in SMALL_PRIMES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let witnesses: &[u64] = if n < WITNESSES_32_BOUND {
        &WITNESSES_32
    } else {
        &WITNESSES_64
    };
    witnesses.iter().all(|&a| strong_probable_prime(n, a))
}
