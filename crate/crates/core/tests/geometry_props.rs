use goldbach_core::geometry::{check_version, fermat_like, verify_certificate, GoldbachCertificate};
use goldbach_core::primes::is_prime;
use goldbach_core::{count_partitions, emit_svg, layout, sieve_upto, Certificate, Scene, StyleOptions};
use proptest::prelude::*;

proptest! {
    // V1-V4 are polynomial identities in (n, p1) once p1 + p2 = 2n.
    #[test]
    fn triangles_hold_for_any_split(n in 1u64..(1 << 31), frac in 0.0f64..1.0) {
        let mut p1 = ((n as f64) * frac) as u64;
        p1 = p1.min(n);
        let p2 = 2 * n - p1;
        let c = GoldbachCertificate::<u128>::from_segments(n, p1, p2).unwrap();
        for k in 1..=4 {
            let v = check_version(&c, k).unwrap();
            prop_assert!(v.holds);
            prop_assert_eq!(v.lhs, v.rhs);
        }
    }

    #[test]
    fn circle_fails_exactly_without_two_odd_primes(n in 3u64..200_000, p1 in 1u64..200_000) {
        prop_assume!(p1 <= n);
        let p2 = 2 * n - p1;
        let c = GoldbachCertificate::<u128>::from_segments(n, p1, p2).unwrap();
        let genuine = p1 >= 3 && is_prime(p1) && is_prime(p2);
        prop_assert_eq!(verify_certificate(&c), genuine);
        let v5 = check_version(&c, 5).unwrap();
        prop_assert_eq!(v5.holds, v5.lhs == v5.rhs);
    }
}

#[test]
fn fermat_like_is_a_bijection_onto_partitions() {
    let t = sieve_upto(20_000).unwrap();
    for n in 3..=5_000u64 {
        let ds = fermat_like::<u128>(n, &t).unwrap();
        assert_eq!(ds.len() as u64, count_partitions(2 * n, &t).unwrap());
        let mut keys: Vec<(u128, u128)> = ds.iter().map(|d| (d.g_sq, d.h)).collect();
        assert!(keys.windows(2).all(|w| w[0].1 < w[1].1), "ascending h");
        keys.dedup();
        assert_eq!(keys.len(), ds.len());
        for d in &ds {
            assert!(d.identity_holds());
            assert!(d.h <= u128::from(n - 3));
            assert_eq!(d.g_is_integer(), d.source.p1() == d.source.p2());
        }
    }
}

#[test]
fn svg_is_well_formed_xml() {
    for (n, p1) in [(3, 3), (5, 3), (8, 3), (11, 5), (1_000_003, 3)] {
        let c = Certificate::from_segments(n, p1, 2 * n - p1).unwrap();
        let scene: Scene = layout(&c).unwrap();
        let svg = emit_svg(&scene, &StyleOptions::default()).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let root = doc.root_element();
        assert_eq!(root.tag_name().name(), "svg");
        let circles = root.descendants().filter(|n| n.has_tag_name("circle")).count();
        assert_eq!(circles, 1);
        let labels: Vec<&str> = root
            .descendants()
            .filter(|n| n.has_tag_name("text"))
            .filter_map(|n| n.text())
            .collect();
        assert_eq!(labels, ["A", "B", "C", "D", "E"]);
    }
}

#[test]
fn degenerate_svg_snapshot() {
    let c = Certificate::from_segments(3, 3, 3).unwrap();
    let svg = emit_svg(&layout::<u128, f64>(&c).unwrap(), &StyleOptions::default()).unwrap();
    let expected = r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="800" height="800" viewBox="0 0 800 800">
  <title>Goldbach Circle n=3 p1=3 p2=3</title>
  <g fill="none" stroke="black" stroke-width="2" stroke-linecap="round">
    <circle cx="400" cy="400" r="360"/>
    <line id="AB" x1="40" y1="400" x2="760" y2="400"/>
    <line id="AD" x1="40" y1="400" x2="400" y2="40"/>
    <line id="DB" x1="400" y1="40" x2="760" y2="400"/>
    <line id="DE" x1="400" y1="40" x2="400" y2="400"/>
  </g>
  <g font-family="serif" font-style="italic" font-size="20" fill="black">
    <text x="32" y="407" text-anchor="end">A</text>
    <text x="768" y="407" text-anchor="start">B</text>
    <text x="412" y="424" text-anchor="middle">C</text>
    <text x="400" y="30" text-anchor="middle">D</text>
    <text x="388" y="424" text-anchor="middle">E</text>
  </g>
</svg>
"#;
    assert_eq!(svg, expected);
}
