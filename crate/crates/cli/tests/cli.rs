//! End-to-end runs of the `wgz` binary against fixture files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const FIXTURES: [&str; 3] = ["tiny.txt", "dense_runs.txt", "web_small.txt"];

const CODEC_ARGS: [&[&str]; 6] = [
    &[
        "--codec", "ssl", "--flags", "2", "--code", "a", "--bsize", "64",
    ],
    &[
        "--codec", "ssl", "--flags", "4", "--code", "b", "--bsize", "8192",
    ],
    &["--codec", "lm-bitmap", "--h", "8"],
    &["--codec", "lm-bitmap", "--h", "128", "--code", "a"],
    &["--codec", "lm-diff", "--h", "16"],
    &["--codec", "lm-diff", "--h", "128"],
];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn wgz<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_wgz"))
        .args(args)
        .output()
        .expect("running wgz")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn porcelain_value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in {text:?}"))
        .to_owned()
}

fn compress(dir: &TempDir, input: &Path, args: &[&str]) -> PathBuf {
    let out = dir.path().join("g.wgz");
    let mut cmd: Vec<&std::ffi::OsStr> = vec!["--porcelain".as_ref(), "compress".as_ref()];
    cmd.extend(args.iter().map(std::ffi::OsStr::new));
    cmd.push(input.as_os_str());
    cmd.push(out.as_os_str());
    let res = wgz(cmd);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    out
}

#[test]
fn fixtures_round_trip_byte_identical() {
    let dir = TempDir::new().unwrap();
    for name in FIXTURES {
        let original = fs::read(fixture(name)).unwrap();
        for args in CODEC_ARGS {
            let packed = compress(&dir, &fixture(name), args);
            let back = dir.path().join("back.txt");
            let res = wgz(["decompress".as_ref(), packed.as_os_str(), back.as_os_str()]);
            assert!(res.status.success(), "{name} {args:?}");
            assert_eq!(fs::read(&back).unwrap(), original, "{name} {args:?}");
        }
    }
}

#[test]
fn empty_graph_round_trip() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("empty.txt");
    fs::write(&input, "0\n").unwrap();
    for args in CODEC_ARGS {
        let packed = compress(&dir, &input, args);
        let back = dir.path().join("back.txt");
        let res = wgz(["decompress".as_ref(), packed.as_os_str(), back.as_os_str()]);
        assert!(res.status.success());
        assert_eq!(fs::read(&back).unwrap(), b"0\n");
        let stats = wgz(["--porcelain".as_ref(), "stats".as_ref(), packed.as_os_str()]);
        assert!(stats.status.success());
        assert_eq!(porcelain_value(&stdout(&stats), "bpe"), "n/a");
    }
}

#[test]
fn truncated_and_corrupt_containers_are_data_errors() {
    let dir = TempDir::new().unwrap();
    let packed = compress(&dir, &fixture("web_small.txt"), &["--codec", "ssl"]);
    let bytes = fs::read(&packed).unwrap();
    let back = dir.path().join("back.txt");
    for cut in [0, 4, 20, bytes.len() / 2, bytes.len() - 1] {
        let bad = dir.path().join("bad.wgz");
        fs::write(&bad, &bytes[..cut]).unwrap();
        let res = wgz(["decompress".as_ref(), bad.as_os_str(), back.as_os_str()]);
        assert_eq!(res.status.code(), Some(2), "cut at {cut}");
        let res = wgz(["get".as_ref(), bad.as_os_str(), "0".as_ref()]);
        assert_eq!(res.status.code(), Some(2), "cut at {cut}");
    }
    let missing = dir.path().join("missing.wgz");
    let res = wgz(["stats".as_ref(), missing.as_os_str()]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn parse_errors_are_data_errors() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("bad.txt");
    let out = dir.path().join("bad.wgz");
    for text in ["2\n1\n5\n", "2\n1 1\n\n", "2\n1\n", "x\n", "1\n0"] {
        fs::write(&input, text).unwrap();
        let res = wgz(["compress".as_ref(), input.as_os_str(), out.as_os_str()]);
        assert_eq!(res.status.code(), Some(2), "{text:?}");
        let res = wgz(["stats".as_ref(), input.as_os_str()]);
        assert_eq!(res.status.code(), Some(2), "{text:?}");
    }
}

#[test]
fn get_prints_lists_and_rejects_out_of_range() {
    let dir = TempDir::new().unwrap();
    for args in CODEC_ARGS {
        let packed = compress(&dir, &fixture("tiny.txt"), args);
        let expected = ["1 2\n", "\n", "0\n"];
        for (node, line) in expected.iter().enumerate() {
            let res = wgz([
                "get".as_ref(),
                packed.as_os_str(),
                node.to_string().as_ref(),
            ]);
            assert!(res.status.success());
            assert_eq!(stdout(&res), *line, "{args:?} node {node}");
        }
        let res = wgz(["get".as_ref(), packed.as_os_str(), "3".as_ref()]);
        assert_eq!(res.status.code(), Some(1));
        assert!(res.stdout.is_empty());
    }
}

#[test]
fn get_matches_every_line_of_a_fixture() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(fixture("dense_runs.txt")).unwrap();
    let lines: Vec<&str> = text.lines().skip(1).collect();
    for args in [CODEC_ARGS[0], CODEC_ARGS[5]] {
        let packed = compress(&dir, &fixture("dense_runs.txt"), args);
        for (node, line) in lines.iter().enumerate() {
            let res = wgz([
                "get".as_ref(),
                packed.as_os_str(),
                node.to_string().as_ref(),
            ]);
            assert_eq!(stdout(&res), format!("{line}\n"));
        }
    }
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let input = fixture("tiny.txt");
    let out = dir.path().join("g.wgz");
    let bad: [&[&str]; 6] = [
        &["--codec", "lm-diff", "--h", "256"],
        &["--codec", "lm-bitmap", "--h", "12"],
        &["--codec", "ssl", "--flags", "3"],
        &["--codec", "ssl", "--h", "16"],
        &["--codec", "lm-bitmap", "--bsize", "64"],
        &["--codec", "gzip"],
    ];
    for args in bad {
        let mut cmd: Vec<&std::ffi::OsStr> = vec!["compress".as_ref()];
        cmd.extend(args.iter().map(std::ffi::OsStr::new));
        cmd.push(input.as_os_str());
        cmd.push(out.as_os_str());
        let res = wgz(cmd);
        assert_eq!(res.status.code(), Some(1), "{args:?}");
        assert!(!res.stderr.is_empty());
    }
    assert_eq!(wgz(["frobnicate"]).status.code(), Some(1));
    assert_eq!(wgz(["get"]).status.code(), Some(1));
    assert_eq!(wgz(["--help"]).status.code(), Some(0));

    let packed = compress(&dir, &input, &["--codec", "ssl"]);
    let res = wgz([
        "bench".as_ref(),
        packed.as_os_str(),
        "--queries".as_ref(),
        "0".as_ref(),
    ]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn compress_report_matches_stats() {
    let dir = TempDir::new().unwrap();
    let input = fixture("web_small.txt");
    let packed = compress(&dir, &input, &["--codec", "lm-bitmap", "--h", "16"]);
    let again = wgz([
        "--porcelain".as_ref(),
        "compress".as_ref(),
        "--codec".as_ref(),
        "lm-bitmap".as_ref(),
        "--h".as_ref(),
        "16".as_ref(),
        input.as_os_str(),
        packed.as_os_str(),
    ]);
    let report = stdout(&again);
    let stats = stdout(&wgz([
        "--porcelain".as_ref(),
        "stats".as_ref(),
        packed.as_os_str(),
    ]));

    let size_bits: f64 = porcelain_value(&stats, "size_bits").parse().unwrap();
    let edges: f64 = porcelain_value(&stats, "edges").parse().unwrap();
    assert_eq!(size_bits, 8.0 * fs::metadata(&packed).unwrap().len() as f64);
    let bpe: f64 = porcelain_value(&stats, "bpe").parse().unwrap();
    assert!((bpe - size_bits / edges).abs() < 1e-4);
    for key in ["nodes", "edges", "bpe", "size_bits", "codec"] {
        assert_eq!(
            porcelain_value(&report, key),
            porcelain_value(&stats, key),
            "{key}"
        );
    }
    assert_eq!(porcelain_value(&stats, "codec"), "lm-bitmap/16");
    let share: f64 = porcelain_value(&stats, "single_bit_windows")
        .parse()
        .unwrap();
    assert!((0.0..=1.0).contains(&share));
}

#[test]
fn stats_on_text_input() {
    let res = wgz([
        "--porcelain".as_ref(),
        "stats".as_ref(),
        fixture("tiny.txt").as_os_str(),
    ]);
    assert!(res.status.success());
    assert_eq!(
        stdout(&res),
        "nodes=3\nedges=3\nedges_per_node=1.00\nempty_lists_pct=33.333\nlongest_list=2\n"
    );
    let aligned = stdout(&wgz(["stats".as_ref(), fixture("tiny.txt").as_os_str()]));
    assert!(aligned
        .lines()
        .any(|l| l.split_whitespace().eq(["longest_list", "2"])));
}

#[test]
fn ssl_stats_have_no_window_share() {
    let dir = TempDir::new().unwrap();
    let packed = compress(
        &dir,
        &fixture("web_small.txt"),
        &["--codec", "ssl", "--flags", "2"],
    );
    let stats = stdout(&wgz([
        "--porcelain".as_ref(),
        "stats".as_ref(),
        packed.as_os_str(),
    ]));
    assert_eq!(porcelain_value(&stats, "codec"), "ssl-2b/8192");
    assert!(!stats.contains("single_bit_windows"));
}

#[test]
fn bench_is_seeded_and_thread_count_keeps_results() {
    let dir = TempDir::new().unwrap();
    let packed = compress(
        &dir,
        &fixture("web_small.txt"),
        &["--codec", "ssl", "--bsize", "1024"],
    );
    let run = |seed: &str, threads: &str| {
        let res = wgz([
            "--porcelain".as_ref(),
            "bench".as_ref(),
            packed.as_os_str(),
            "--queries".as_ref(),
            "2000".as_ref(),
            "--seed".as_ref(),
            seed.as_ref(),
            "--threads".as_ref(),
            threads.as_ref(),
        ]);
        assert!(res.status.success());
        stdout(&res)
    };
    let a = run("5", "1");
    let b = run("5", "1");
    let c = run("5", "4");
    let d = run("6", "1");
    let touched = |r: &str| porcelain_value(r, "edges_touched");
    assert_eq!(touched(&a), touched(&b));
    assert_eq!(touched(&a), touched(&c));
    assert_ne!(touched(&a), touched(&d));
    assert_eq!(porcelain_value(&c, "threads"), "4");
    assert_eq!(porcelain_value(&a, "queries"), "2000");
    let tpe: f64 = porcelain_value(&a, "time_per_edge_us").parse().unwrap();
    let total: f64 = porcelain_value(&a, "total_ms").parse().unwrap();
    let edges: f64 = touched(&a).parse().unwrap();
    assert!((tpe - total * 1e3 / edges).abs() <= 1e-3 + tpe * 1e-3);
}

#[test]
fn compressing_twice_gives_identical_files() {
    let dir = TempDir::new().unwrap();
    for args in CODEC_ARGS {
        let first = fs::read(compress(&dir, &fixture("web_small.txt"), args)).unwrap();
        let second = fs::read(compress(&dir, &fixture("web_small.txt"), args)).unwrap();
        assert_eq!(first, second, "{args:?}");
    }
}
