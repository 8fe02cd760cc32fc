use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_siegel-hecke");

fn run(args: &[&str], cache: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .env("SIEGEL_HECKE_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn census(cache: &Path, primes: &str) -> Output {
    run(&["census", "--primes", primes], cache)
}

#[test]
fn census_writes_three_files_with_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = census(dir.path(), "3");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.matches("mass-check ok").count(), 3, "{out}");

    let expected = [
        ("elliptic_p3.csv", "elliptic-fp", "a,count"),
        ("elliptic_p3_sq.csv", "elliptic-fp2", "a,count"),
        ("genus2_p3.csv", "genus2-jacobian", "a1,a2,count"),
    ];
    for (file, locus, columns) in expected {
        let text = std::fs::read_to_string(dir.path().join(file)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "format_version,p,locus,normalizer,total_model_count,checksum"
        );
        let values: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(values[0], "1");
        assert_eq!(values[1], "3");
        assert_eq!(values[2], locus);
        assert_eq!(values[5].len(), 64);
        assert_eq!(lines[2], columns);
    }
    let g = std::fs::read_to_string(dir.path().join("genus2_p3.csv")).unwrap();
    assert!(g
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("1,3,genus2-jacobian,48,1296,"));
}

#[test]
fn census_rerun_hits_cache() {
    let dir = tempfile::tempdir().unwrap();
    census(dir.path(), "3");
    let path = dir.path().join("genus2_p3.csv");
    let before = std::fs::metadata(&path).unwrap().modified().unwrap();
    let o = census(dir.path(), "3");
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("cache hit"));
    assert_eq!(
        std::fs::metadata(&path).unwrap().modified().unwrap(),
        before
    );
}

#[test]
fn census_rejects_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(census(dir.path(), "2").status.code(), Some(2));
    assert_eq!(census(dir.path(), "9").status.code(), Some(2));
}

#[test]
fn trace_csv_three_rows() {
    let dir = tempfile::tempdir().unwrap();
    census(dir.path(), "3,5,7");
    let o = run(
        &["trace", "--k1", "8", "--k2", "6", "--primes", "3,5,7"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "k1",
            "k2",
            "p",
            "traceA2",
            "secondRow",
            "endoTerm",
            "fourTimesTrace",
            "heckeTrace",
            "checksPassed"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for (row, p) in rows.iter().zip([3i64, 5, 7]) {
        assert_eq!(&row[2], p.to_string());
        assert_eq!(&row[4], (-p.pow(4)).to_string());
        assert_eq!(&row[7], "0");
        assert_eq!(&row[8], "true");
    }
}

#[test]
fn trace_json_is_an_array_of_reports() {
    let dir = tempfile::tempdir().unwrap();
    census(dir.path(), "3");
    let o = run(
        &[
            "trace",
            "--max-weight-sum",
            "22",
            "--primes",
            "3",
            "--format",
            "json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 28);
    for r in arr {
        for key in [
            "k1",
            "k2",
            "p",
            "trace_a2",
            "jacobian_term",
            "product_term",
            "second_row",
            "endoscopic_term",
            "eisenstein_term",
            "four_times_trace",
            "hecke_trace",
            "normalization_factor",
            "divisible",
            "provenance",
        ] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
        assert_eq!(
            r["provenance"]["census_checksums"]["genus2"]
                .as_str()
                .unwrap()
                .len(),
            64
        );
    }
    let sym6 = arr.iter().find(|r| r["k1"] == 14 && r["k2"] == 8).unwrap();
    assert_eq!(sym6["hecke_trace"], "-27000");
}

#[test]
fn trace_rejects_odd_weight_before_computing() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["trace", "--k1", "7", "--k2", "4", "--primes", "3"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn trace_needs_cache_or_auto_census() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["trace", "--k1", "6", "--k2", "4", "--primes", "3"];
    assert_eq!(run(&args, dir.path()).status.code(), Some(3));
    let mut auto = args.to_vec();
    auto.push("--auto-census");
    let o = run(&auto, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("genus2_p3.csv").is_file());
}

#[test]
fn trace_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    census(dir.path(), "3,5");
    let args = [
        "trace",
        "--max-weight-sum",
        "20",
        "--primes",
        "3,5",
        "--format",
        "json",
    ];
    let a = run(&args, dir.path());
    let b = run(&args, dir.path());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn selftest_passes_and_detects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["selftest"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(
        stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(),
        8
    );

    let path = dir.path().join("genus2_p5.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let last = lines.len() - 1;
    lines[last] = lines[last]
        .rsplit_once(',')
        .map(|(k, _)| format!("{k},1"))
        .unwrap();
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();

    let o = run(&["selftest"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(
        stdout(&o).contains("FAIL mass-identities"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn selftest_skips_weights_over_budget() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["selftest", "--oracle-budget", "10"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("notice: (6,5) skipped"));
}
