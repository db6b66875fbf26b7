//! Goldbach range verification with exact Goldbach Circle certificates.
//!
//! Every even `2n >= 6` that splits as `p1 + p2` into odd primes yields a
//! circle of radius `n` with an inscribed right triangle whose foot divides
//! the diameter into `p1` and `p2`. This crate finds those splits over whole
//! ranges, certifies each figure with exact integer Pythagorean identities,
//! tracks records of the minimal `p1`, and draws the figure as SVG.
//!
//! The geometry is generic over the integer width of the squared lengths
//! ([`ExactInt`]) and the float type of drawing coordinates ([`Coord`]); the
//! aliases below fix the widths used throughout the engine and CLI.

pub mod engine;
pub mod geometry;
pub mod partitions;
pub mod primes;
pub mod render;
pub mod scalar;

pub use engine::{merge_reports, verify_range, RangeReport, RecordEntry, Sweep, SweepConfig};
pub use geometry::{
    build_certificate, check_version, fermat_like, verify_certificate, CertificateRecord,
    FermatLikeDecomposition, GoldbachCertificate, Version, VersionCheck,
};
pub use partitions::{
    all_partitions, comet, count_partitions, minimal_partition, CometPoint, GoldbachPartition,
};
pub use primes::{is_prime, segment_sieve, sieve_upto, PrimeSource, PrimeTable, SegmentBitmap};
pub use render::{emit_svg, layout, SceneCoordinates, StyleOptions};
pub use scalar::{Coord, ExactInt};

/// Certificate with 128-bit squared lengths, exact for every `n <= 2^31`.
pub type Certificate = GoldbachCertificate<u128>;

pub type Check = VersionCheck<u128>;

pub type Decomposition = FermatLikeDecomposition<u128>;

/// Scene in double precision.
pub type Scene = SceneCoordinates<f64>;
