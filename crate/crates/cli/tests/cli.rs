use goldbach_cli::{format_certificate, run, FermatLine, PartitionLine, SweepSummary, EXIT_OK, EXIT_USAGE};
use goldbach_core::{CertificateRecord, Certificate};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("goldbach").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn partition_all() {
    let (code, out, _) = call(&["partition", "10", "--all"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "3 7\n5 5\n");
}

#[test]
fn partition_minimal_and_jsonl() {
    let (code, out, _) = call(&["partition", "98"]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "19 79\n"));
    let (_, out, _) = call(&["partition", "22", "--all", "--format", "jsonl"]);
    let lines: Vec<PartitionLine> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    for (line, text) in lines.iter().zip(out.lines()) {
        assert_eq!(serde_json::to_string(line).unwrap(), text);
    }
}

#[test]
fn odd_partition_is_a_usage_error() {
    let (code, out, err) = call(&["partition", "7"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(err.contains("even"), "{err}");
}

#[test]
fn unknown_subcommand_and_flag() {
    let (code, _, err) = call(&["prove"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("Usage"), "{err}");
    let (code, _, _) = call(&["partition", "10", "--bogus"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = call(&["partition", "-4"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verify"));
}

#[test]
fn certificate_text() {
    let (code, out, _) = call(&["certificate", "5", "--p1", "3"]);
    assert_eq!(code, EXIT_OK);
    for needle in ["n=5", "de_sq=21", "ec=2", "V1=PASS", "V2=PASS", "V3=PASS", "V4=PASS", "V5=PASS"] {
        assert!(out.contains(needle), "{needle} in {out}");
    }
    let (_, out, _) = call(&["certificate", "3"]);
    assert!(out.contains("ec=0"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn certificate_jsonl_round_trip() {
    let (_, out, _) = call(&["certificate", "8", "--format", "jsonl"]);
    let rec: CertificateRecord = serde_json::from_str(out.trim_end()).unwrap();
    assert_eq!((rec.p1, rec.p2, rec.ad_sq, rec.bd_sq, rec.de_sq, rec.ec), (3, 13, 48, 208, 39, 5));
    assert_eq!(serde_json::to_string(&rec).unwrap(), out.trim_end());

    let c = Certificate::from_segments(5, 3, 7).unwrap();
    let text = format_certificate(&c, false);
    let parsed: CertificateRecord = text.parse().unwrap();
    assert_eq!(parsed.to_string(), text);
    let json = format_certificate(&c, true);
    assert_eq!(serde_json::from_str::<CertificateRecord>(&json).unwrap(), parsed);
}

#[test]
fn certificate_single_version_and_bad_partition() {
    let (code, out, _) = call(&["certificate", "5", "--p1", "3", "--version", "4"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "V4=PASS lhs=100 rhs=100\n");
    let (code, _, err) = call(&["certificate", "10", "--p1", "9"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("not a Goldbach partition"), "{err}");
    let (code, _, _) = call(&["certificate", "5", "--version", "6"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = call(&["certificate", "2"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn fermat_lines() {
    let (code, out, _) = call(&["fermat", "11"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "11 121 0\n11 85 6\n11 57 8\n");
    let (_, out, _) = call(&["fermat", "5", "--float"]);
    assert_eq!(out, "5 25 0 5.00000000000\n5 21 2 4.58257569496\n");
    let (_, out, _) = call(&["fermat", "5", "--format", "jsonl"]);
    let rows: Vec<FermatLine> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.g.is_none() && 25 == r.g_sq + r.h * r.h));
}

#[test]
fn comet_csv() {
    let (code, out, _) = call(&["comet", "--from", "6", "--to", "12"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "6,1\n8,1\n10,2\n");
}

#[test]
fn records_listing() {
    let (code, out, _) = call(&["records", "--from", "6", "--to", "100"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "6 3\n12 5\n30 7\n98 19\n");
}

#[test]
fn verify_summary_formats() {
    let (code, out, _) = call(&["verify", "--from", "6", "--to", "100", "--workers", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("range=[6,100) verified=47 failures=0 records=4 last_record=98:19"), "{out}");
    let (_, out, _) = call(&["verify", "--from", "6", "--to", "100", "--format", "jsonl"]);
    let s: SweepSummary = serde_json::from_str(out.trim_end()).unwrap();
    assert_eq!(s.records, vec![(6, 3), (12, 5), (30, 7), (98, 19)]);
    assert_eq!(serde_json::to_string(&s).unwrap(), out.trim_end());
    let (code, _, _) = call(&["verify", "--from", "7", "--to", "100"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn verify_checkpoint_then_resume() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("run.ckpt");
    let ckpt = ckpt.to_str().unwrap();
    let (code, _, _) = call(&["verify", "--from", "6", "--to", "5000", "--checkpoint", ckpt, "--format", "jsonl"]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(ckpt).unwrap();
    assert!(text.contains("next_e=5000\n"));
    let (code, out, _) = call(&["resume", "--checkpoint", ckpt, "--format", "jsonl"]);
    assert_eq!(code, EXIT_OK);
    let s: SweepSummary = serde_json::from_str(out.trim_end()).unwrap();
    assert_eq!((s.lo, s.hi, s.verified), (6, 5000, 2497));

    let (code, _, err) = call(&["resume", "--checkpoint", "/nonexistent/x.ckpt"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("checkpoint"));
}

#[test]
fn render_to_file_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for p in [&a, &b] {
        let (code, _, _) = call(&["render", "5", "--p1", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK);
    }
    let a = std::fs::read(a).unwrap();
    assert_eq!(a, std::fs::read(b).unwrap());
    let svg = String::from_utf8(a).unwrap();
    roxmltree::Document::parse(&svg).unwrap();
    let (code, out, _) = call(&["render", "8", "--canvas", "400"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains(r#"width="400""#));
    let (code, _, err) = call(&["render", "8", "--canvas", "0"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("canvas"));
}
