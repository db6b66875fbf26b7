//! Exact certificates for the Goldbach Circle.
//!
//! For `2n = p1 + p2`, put `A` and `B` at the ends of a diameter of length
//! `2n`, `E` on `AB` with `AE = p1` and `EB = p2`, `C` at the centre, and `D`
//! on the circle directly above `E`. Then
//!
//! ```text
//! AD^2 = p1 * 2n    BD^2 = p2 * 2n    DE^2 = p1 * p2    EC = (p2 - p1) / 2
//! ```
//!
//! Only `EC` is an integer in general, so every other length is carried
//! squared. The four right triangles `ADE`, `BDE`, `DEC` and `ADB` each give
//! a Pythagorean identity that is checked with exact integer arithmetic in
//! the chosen [`ExactInt`] width. Version 5 asks for the whole figure: all
//! four triangles, both segments prime, and `p1 + p2 = 2n`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partitions::{all_partitions, GoldbachPartition, PartitionError};
use crate::primes::{MillerRabin, PrimeSource, PrimeTable};
use crate::scalar::ExactInt;

/// Largest radius accepted when building a certificate.
pub const MAX_RADIUS: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("radius {n} is below 3")]
    RadiusTooSmall { n: u64 },
    #[error("partition of {e} does not match diameter 2*{n}")]
    PartitionMismatch { n: u64, e: u64 },
    #[error("segments {p1} + {p2} do not split diameter 2*{n} into halves of equal parity")]
    BadSegments { n: u64, p1: u64, p2: u64 },
    #[error("radius {n} too large for exact {bits}-bit squared lengths")]
    OutOfRange { n: u64, bits: u32 },
    #[error("version {k} outside 1..=5")]
    NoSuchVersion { k: u64 },
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// The five geometric restatements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Version {
    /// Right angle at `E` in `ADE`: `AE^2 + DE^2 = AD^2`.
    Ade = 1,
    /// Right angle at `E` in `BDE`: `BE^2 + DE^2 = BD^2`.
    Bde = 2,
    /// Right angle at `E` in `DEC`: `DE^2 + EC^2 = CD^2`.
    Dec = 3,
    /// Right angle at `D` in `ADB`: `AD^2 + BD^2 = AB^2`.
    Adb = 4,
    /// The full circle exists.
    Circle = 5,
}

impl Version {
    pub const ALL: [Version; 5] = [
        Version::Ade,
        Version::Bde,
        Version::Dec,
        Version::Adb,
        Version::Circle,
    ];

    pub fn from_index(k: u64) -> Result<Self, GeometryError> {
        match k {
            1 => Ok(Version::Ade),
            2 => Ok(Version::Bde),
            3 => Ok(Version::Dec),
            4 => Ok(Version::Adb),
            5 => Ok(Version::Circle),
            _ => Err(GeometryError::NoSuchVersion { k }),
        }
    }

    pub fn index(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V{}", self.index())
    }
}

/// Squared side lengths of one Goldbach Circle.
///
/// Fields are public so callers can inspect (or deliberately corrupt) a
/// certificate; [`verify_certificate`] rechecks everything from scratch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GoldbachCertificate<T> {
    /// Radius `CD`.
    pub n: T,
    /// Diameter `AB`.
    pub e: T,
    /// `AE`.
    pub p1: T,
    /// `EB`.
    pub p2: T,
    pub ad_sq: T,
    pub bd_sq: T,
    pub de_sq: T,
    /// `EC`, an integer since `p1` and `p2` share parity.
    pub ec: T,
}

impl<T: ExactInt> GoldbachCertificate<T> {
    /// Evaluates the side lengths for any split `p1 + p2 = 2n` with
    /// `p1 <= p2` of equal parity. Primality is not checked here.
    pub fn from_segments(n: u64, p1: u64, p2: u64) -> Result<Self, GeometryError> {
        let bad = GeometryError::BadSegments { n, p1, p2 };
        let e = n.checked_mul(2).ok_or_else(|| bad.clone())?;
        if p1 > p2 || p1.checked_add(p2) != Some(e) || (p2 - p1) & 1 == 1 {
            return Err(bad);
        }
        let range = GeometryError::OutOfRange { n, bits: T::BITS };
        let lift = |x: u64| T::from_u64(x).ok_or(range.clone());
        let (tn, te, tp1, tp2) = (lift(n)?, lift(e)?, lift(p1)?, lift(p2)?);
        // AB^2 is the largest quantity any check forms
        te.checked_mul(&te).ok_or(range.clone())?;
        Ok(Self {
            n: tn,
            e: te,
            p1: tp1,
            p2: tp2,
            ad_sq: tp1.checked_mul(&te).ok_or(range.clone())?,
            bd_sq: tp2.checked_mul(&te).ok_or(range.clone())?,
            de_sq: tp1.checked_mul(&tp2).ok_or(range.clone())?,
            ec: lift((p2 - p1) / 2)?,
        })
    }

    /// Flat record used for text and JSON output.
    pub fn record<S: PrimeSource + ?Sized>(&self, primes: &S) -> CertificateRecord {
        let wide = |x: T| x.to_u128().expect("unsigned fits u128");
        let mut versions = [false; 5];
        for v in Version::ALL {
            versions[v as usize - 1] = check_version_with(self, v, primes).holds;
        }
        CertificateRecord {
            n: wide(self.n),
            p1: wide(self.p1),
            p2: wide(self.p2),
            ad_sq: wide(self.ad_sq),
            bd_sq: wide(self.bd_sq),
            de_sq: wide(self.de_sq),
            ec: wide(self.ec),
            v1: versions[0],
            v2: versions[1],
            v3: versions[2],
            v4: versions[3],
            v5: versions[4],
        }
    }
}

/// Builds the certificate for radius `n` from a validated partition of `2n`.
pub fn build_certificate<T: ExactInt>(
    n: u64,
    p: &GoldbachPartition,
) -> Result<GoldbachCertificate<T>, GeometryError> {
    if n < 3 {
        return Err(GeometryError::RadiusTooSmall { n });
    }
    if n.checked_mul(2) != Some(p.e()) {
        return Err(GeometryError::PartitionMismatch { n, e: p.e() });
    }
    if n > MAX_RADIUS {
        return Err(GeometryError::OutOfRange { n, bits: T::BITS });
    }
    GoldbachCertificate::from_segments(n, p.p1(), p.p2())
}

/// Outcome of one exact identity check.
///
/// For versions 1 to 4, `lhs` and `rhs` are the two squared magnitudes
/// compared. For version 5 they count clauses: `lhs` is how many of the
/// seven conditions hold (four triangles, two primalities, the sum) and
/// `rhs` is 7.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VersionCheck<T> {
    pub version: Version,
    pub holds: bool,
    pub lhs: T,
    pub rhs: T,
}

fn compare<T: ExactInt>(version: Version, lhs: Option<T>, rhs: Option<T>) -> VersionCheck<T> {
    // an overflowing side cannot come from a well-formed certificate
    match (lhs, rhs) {
        (Some(lhs), Some(rhs)) => VersionCheck {
            version,
            holds: lhs == rhs,
            lhs,
            rhs,
        },
        (lhs, rhs) => VersionCheck {
            version,
            holds: false,
            lhs: lhs.unwrap_or_else(T::max_value),
            rhs: rhs.unwrap_or_else(T::max_value),
        },
    }
}

fn sum_of_squares<T: ExactInt>(a: T, b_sq: T) -> Option<T> {
    a.checked_mul(&a)?.checked_add(&b_sq)
}

/// Checks version `k` (1..=5) using [`is_prime`](crate::primes::is_prime)
/// for the primality clauses.
pub fn check_version<T: ExactInt>(
    c: &GoldbachCertificate<T>,
    k: u64,
) -> Result<VersionCheck<T>, GeometryError> {
    Ok(check_version_with(c, Version::from_index(k)?, &MillerRabin))
}

/// Checks one version with a caller-supplied primality source.
pub fn check_version_with<T: ExactInt, S: PrimeSource + ?Sized>(
    c: &GoldbachCertificate<T>,
    version: Version,
    primes: &S,
) -> VersionCheck<T> {
    match version {
        Version::Ade => compare(version, sum_of_squares(c.p1, c.de_sq), Some(c.ad_sq)),
        Version::Bde => compare(version, sum_of_squares(c.p2, c.de_sq), Some(c.bd_sq)),
        Version::Dec => compare(
            version,
            sum_of_squares(c.ec, c.de_sq),
            c.n.checked_mul(&c.n),
        ),
        Version::Adb => compare(
            version,
            c.ad_sq.checked_add(&c.bd_sq),
            c.e.checked_mul(&c.e),
        ),
        Version::Circle => {
            let prime = |x: T| x.to_u64().is_some_and(|x| primes.is_prime(x));
            let two = T::one() + T::one();
            let clauses = [
                check_version_with(c, Version::Ade, primes).holds,
                check_version_with(c, Version::Bde, primes).holds,
                check_version_with(c, Version::Dec, primes).holds,
                check_version_with(c, Version::Adb, primes).holds,
                prime(c.p1) && c.p1 > two,
                prime(c.p2) && c.p2 > two,
                c.p1.checked_add(&c.p2) == Some(c.e) && c.n.checked_mul(&two) == Some(c.e),
            ];
            let satisfied = clauses.iter().filter(|&&b| b).count();
            let lhs = T::from_usize(satisfied).expect("small count");
            let rhs = T::from_usize(clauses.len()).expect("small count");
            VersionCheck {
                version,
                holds: lhs == rhs,
                lhs,
                rhs,
            }
        }
    }
}

/// True iff every version holds.
pub fn verify_certificate<T: ExactInt>(c: &GoldbachCertificate<T>) -> bool {
    verify_certificate_with(c, &MillerRabin)
}

pub fn verify_certificate_with<T: ExactInt, S: PrimeSource + ?Sized>(
    c: &GoldbachCertificate<T>,
    primes: &S,
) -> bool {
    // Version 5 already includes 1-4.
    check_version_with(c, Version::Circle, primes).holds
}

/// `n^2 = g^2 + h^2` with `g^2 = p1 p2` and `h = (p2 - p1) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FermatLikeDecomposition<T> {
    pub n: u64,
    pub g_sq: T,
    pub h: T,
    pub source: GoldbachPartition,
}

impl<T: ExactInt> FermatLikeDecomposition<T> {
    pub fn identity_holds(&self) -> bool {
        let Some(n) = T::from_u64(self.n) else {
            return false;
        };
        n.checked_mul(&n) == sum_of_squares(self.h, self.g_sq)
    }

    /// Whether `g` itself is an integer.
    pub fn g_is_integer(&self) -> bool {
        let g_sq = self.g_sq.to_u128().expect("unsigned fits u128");
        let g = g_sq.isqrt();
        g * g == g_sq
    }

    /// `g` rounded to a float, for display only.
    pub fn g_approx(&self) -> f64 {
        self.g_sq.to_f64().expect("finite").sqrt()
    }
}

/// One decomposition per Goldbach partition of `2n`, ascending in `h`.
pub fn fermat_like<T: ExactInt>(
    n: u64,
    table: &PrimeTable,
) -> Result<Vec<FermatLikeDecomposition<T>>, GeometryError> {
    if n < 3 {
        return Err(GeometryError::RadiusTooSmall { n });
    }
    let e = n
        .checked_mul(2)
        .ok_or(GeometryError::OutOfRange { n, bits: T::BITS })?;
    let mut out = all_partitions(e, table)?
        .into_iter()
        .map(|p| {
            let c = build_certificate::<T>(n, &p)?;
            Ok(FermatLikeDecomposition {
                n,
                g_sq: c.de_sq,
                h: c.ec,
                source: p,
            })
        })
        .collect::<Result<Vec<_>, GeometryError>>()?;
    // partitions ascend in p1, so h descends
    out.reverse();
    Ok(out)
}

/// Flat key/value view of a certificate and its five verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub n: u128,
    pub p1: u128,
    pub p2: u128,
    pub ad_sq: u128,
    pub bd_sq: u128,
    pub de_sq: u128,
    pub ec: u128,
    pub v1: bool,
    pub v2: bool,
    pub v3: bool,
    pub v4: bool,
    pub v5: bool,
}

impl CertificateRecord {
    pub const KEYS: [&'static str; 12] = [
        "n", "p1", "p2", "ad_sq", "bd_sq", "de_sq", "ec", "V1", "V2", "V3", "V4", "V5",
    ];

    pub fn verdicts(&self) -> [bool; 5] {
        [self.v1, self.v2, self.v3, self.v4, self.v5]
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts().iter().all(|&b| b)
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

impl fmt::Display for CertificateRecord {
    /// `n=5 p1=3 p2=7 ad_sq=30 bd_sq=70 de_sq=21 ec=2 V1=PASS ... V5=PASS`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} p1={} p2={} ad_sq={} bd_sq={} de_sq={} ec={}",
            self.n, self.p1, self.p2, self.ad_sq, self.bd_sq, self.de_sq, self.ec
        )?;
        for (i, v) in self.verdicts().into_iter().enumerate() {
            write!(f, " V{}={}", i + 1, verdict(v))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad certificate record field `{field}`: {reason}")]
pub struct RecordParseError {
    pub field: String,
    pub reason: String,
}

impl FromStr for CertificateRecord {
    type Err = RecordParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |field: &str, reason: &str| RecordParseError {
            field: field.to_string(),
            reason: reason.to_string(),
        };
        let tokens: Vec<&str> = s.split_whitespace().collect();
        if tokens.len() != Self::KEYS.len() {
            return Err(err("*", "expected 12 key=value pairs"));
        }
        let mut ints = [0u128; 7];
        let mut flags = [false; 5];
        for (i, (tok, key)) in tokens.iter().zip(Self::KEYS).enumerate() {
            let (k, v) = tok.split_once('=').ok_or_else(|| err(key, "missing '='"))?;
            if k != key {
                return Err(err(key, &format!("found key `{k}`")));
            }
            if i < 7 {
                ints[i] = v.parse().map_err(|_| err(key, "not an unsigned integer"))?;
            } else {
                flags[i - 7] = match v {
                    "PASS" => true,
                    "FAIL" => false,
                    _ => return Err(err(key, "expected PASS or FAIL")),
                };
            }
        }
        let [n, p1, p2, ad_sq, bd_sq, de_sq, ec] = ints;
        let [v1, v2, v3, v4, v5] = flags;
        Ok(Self {
            n,
            p1,
            p2,
            ad_sq,
            bd_sq,
            de_sq,
            ec,
            v1,
            v2,
            v3,
            v4,
            v5,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::sieve_upto;

    fn cert(n: u64, p1: u64, p2: u64) -> GoldbachCertificate<u128> {
        build_certificate(n, &GoldbachPartition::new(p1, p2).unwrap()).unwrap()
    }

    fn sides(c: &GoldbachCertificate<u128>) -> (u128, u128, u128, u128) {
        (c.ad_sq, c.bd_sq, c.de_sq, c.ec)
    }

    #[test]
    fn side_lengths() {
        assert_eq!(sides(&cert(3, 3, 3)), (18, 18, 9, 0));
        assert_eq!(sides(&cert(5, 3, 7)), (30, 70, 21, 2));
        assert_eq!(sides(&cert(8, 3, 13)), (48, 208, 39, 5));
    }

    #[test]
    fn version_examples() {
        let c = cert(5, 3, 7);
        let v3 = check_version(&c, 3).unwrap();
        assert_eq!((v3.lhs, v3.rhs, v3.holds), (25, 25, true));
        let v4 = check_version(&c, 4).unwrap();
        assert_eq!((v4.lhs, v4.rhs, v4.holds), (100, 100, true));
        let v3 = check_version(&cert(3, 3, 3), 3).unwrap();
        assert_eq!((v3.lhs, v3.rhs, v3.holds), (9, 9, true));
        let v5 = check_version(&c, 5).unwrap();
        assert_eq!((v5.lhs, v5.rhs, v5.holds), (7, 7, true));
    }

    #[test]
    fn version_index_errors() {
        let c = cert(5, 3, 7);
        assert_eq!(check_version(&c, 0), Err(GeometryError::NoSuchVersion { k: 0 }));
        assert_eq!(check_version(&c, 6), Err(GeometryError::NoSuchVersion { k: 6 }));
    }

    #[test]
    fn build_errors() {
        let p = GoldbachPartition::new(3, 7).unwrap();
        assert_eq!(
            build_certificate::<u128>(6, &p),
            Err(GeometryError::PartitionMismatch { n: 6, e: 10 })
        );
        let probes = sieve_upto(1000).unwrap();
        let big = crate::partitions::minimal_partition(2 * (MAX_RADIUS + 1), &probes, &MillerRabin)
            .unwrap()
            .unwrap();
        assert_eq!(
            build_certificate::<u128>(MAX_RADIUS + 1, &big),
            Err(GeometryError::OutOfRange {
                n: MAX_RADIUS + 1,
                bits: 128
            })
        );
        assert!(matches!(
            GoldbachCertificate::<u64>::from_segments(MAX_RADIUS, 1, 2 * MAX_RADIUS - 1),
            Err(GeometryError::OutOfRange { bits: 64, .. })
        ));
        assert!(GoldbachCertificate::<u128>::from_segments(10, 4, 15).is_err());
        assert!(GoldbachCertificate::<u128>::from_segments(10, 11, 9).is_err());
    }

    #[test]
    fn narrow_width_agrees_with_wide() {
        let p = GoldbachPartition::new(3, 13).unwrap();
        let narrow = build_certificate::<u64>(8, &p).unwrap();
        let wide = build_certificate::<u128>(8, &p).unwrap();
        assert_eq!(narrow.record(&MillerRabin), wide.record(&MillerRabin));
        assert!(verify_certificate(&narrow));
    }

    #[test]
    fn tampering_with_altitude() {
        let mut c = cert(5, 3, 7);
        assert!(verify_certificate(&c));
        c.de_sq += 1;
        assert!(!verify_certificate(&c));
        for k in 1..=3 {
            assert!(!check_version(&c, k).unwrap().holds, "V{k}");
        }
        assert!(check_version(&c, 4).unwrap().holds);
    }

    #[test]
    fn composite_decoy() {
        let c = GoldbachCertificate::<u128>::from_segments(10, 9, 11).unwrap();
        for k in 1..=4 {
            assert!(check_version(&c, k).unwrap().holds, "V{k}");
        }
        let v5 = check_version(&c, 5).unwrap();
        assert!(!v5.holds);
        assert_eq!((v5.lhs, v5.rhs), (6, 7));
        assert!(!verify_certificate(&c));
    }

    #[test]
    fn two_is_not_an_odd_prime() {
        // 2 + 2 = 4 passes the triangles but not the odd-prime clause
        let c = GoldbachCertificate::<u128>::from_segments(2, 2, 2).unwrap();
        assert!(!verify_certificate(&c));
    }

    #[test]
    fn fermat_examples() {
        let t = sieve_upto(100).unwrap();
        let got = |n| {
            fermat_like::<u128>(n, &t)
                .unwrap()
                .iter()
                .map(|d| (d.g_sq, d.h))
                .collect::<Vec<_>>()
        };
        assert_eq!(got(3), vec![(9, 0)]);
        assert_eq!(got(5), vec![(25, 0), (21, 2)]);
        assert_eq!(got(11), vec![(121, 0), (85, 6), (57, 8)]);
        assert_eq!(
            fermat_like::<u128>(2, &t),
            Err(GeometryError::RadiusTooSmall { n: 2 })
        );
    }

    #[test]
    fn record_text_round_trip() {
        let r = cert(5, 3, 7).record(&MillerRabin);
        let line = r.to_string();
        assert_eq!(
            line,
            "n=5 p1=3 p2=7 ad_sq=30 bd_sq=70 de_sq=21 ec=2 V1=PASS V2=PASS V3=PASS V4=PASS V5=PASS"
        );
        assert_eq!(line.parse::<CertificateRecord>().unwrap(), r);
        let e = "n=5 p1=3 p2=x ad_sq=30 bd_sq=70 de_sq=21 ec=2 V1=PASS V2=PASS V3=PASS V4=PASS V5=PASS"
            .parse::<CertificateRecord>()
            .unwrap_err();
        assert_eq!(e.field, "p2");
    }
}
