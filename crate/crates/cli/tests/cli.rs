//! End-to-end tests of the `psolab` binary.

use std::path::Path;
use std::process::{Command, Output};

fn psolab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psolab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tempdir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("psolab-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn list_prints_the_registries() {
    let dir = tempdir("list");
    let out = psolab(&["list"], &dir);
    assert!(out.status.success());
    let text = stdout(&out);
    for id in [
        "standard",
        "constricted",
        "barebones",
        "barebones-scalar",
        "gaussian-dep",
        "gaussian-indep",
        "gaussian-current-dep",
        "gaussian-current-indep",
        "gaussian-gbest-trace",
        "bayes-standard",
        "kalman",
        "kernel-standard",
        "kernel-dep",
        "kernel-indep",
    ] {
        assert!(text.contains(&format!("  {id}\n")), "missing algorithm {id}");
    }
    for id in [
        "hyper_ellipsoid",
        "griewank",
        "rastrigin",
        "rosenbrock",
        "salomon",
        "schwefel",
        "sphere",
        "step",
        "modulus_sum",
    ] {
        assert!(text.contains(&format!("  {id}\n")), "missing objective {id}");
    }
    for id in ["sqrt_shift", "sinc", "poisson", "trig", "linear"] {
        assert!(text.contains(&format!("  {id}\n")), "missing kernel {id}");
    }
    let algorithms = text
        .lines()
        .skip_while(|l| *l != "algorithms:")
        .skip(1)
        .take_while(|l| l.starts_with("  "))
        .count();
    assert_eq!(algorithms, 14);
}

#[test]
fn run_is_deterministic_per_seed() {
    let dir = tempdir("run-det");
    let args = [
        "run",
        "--algo",
        "gaussian-indep",
        "--fn",
        "sphere",
        "--dim",
        "3",
        "--particles",
        "12",
        "--seed",
        "42",
        "--max-iters",
        "40",
    ];
    let a = psolab(&args, &dir);
    let b = psolab(&args, &dir);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let line = |o: &Output| {
        stdout(o)
            .lines()
            .find(|l| l.starts_with("best value:"))
            .unwrap()
            .to_owned()
    };
    assert_eq!(line(&a), line(&b));
}

#[test]
fn unknown_ids_exit_with_code_2() {
    let dir = tempdir("unknown");
    let out = psolab(&["run", "--algo", "nope", "--fn", "sphere"], &dir);
    assert_eq!(out.status.code(), Some(2));
    let out = psolab(&["run", "--algo", "standard", "--fn", "nope"], &dir);
    assert_eq!(out.status.code(), Some(2));
    let out = psolab(&["run", "--algo", "standard", "--no-such-flag"], &dir);
    assert_eq!(out.status.code(), Some(2));
    let out = psolab(&["run", "--algo", "standard", "--dim", "abc"], &dir);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn suite_writes_results_and_report() {
    let dir = tempdir("suite");
    let out = psolab(
        &[
            "suite",
            "--algos",
            "barebones,gaussian-indep",
            "--fns",
            "sphere,griewank",
            "--runs",
            "3",
            "--seed",
            "7",
            "--dim",
            "2",
            "--particles",
            "6",
            "--max-iters",
            "15",
            "--format",
            "csv",
            "--out",
            "suite-out",
        ],
        &dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let results = std::fs::read_to_string(dir.join("suite-out/results.csv")).unwrap();
    // header + 2 algos x 2 fns x 3 runs
    assert_eq!(results.lines().count(), 13);
    assert!(dir.join("suite-out/report.csv").exists());

    // re-render is byte-identical
    let rendered = std::fs::read_to_string(dir.join("suite-out/report.csv")).unwrap();
    let again = psolab(
        &["report", "suite-out/results.csv", "--format", "csv"],
        &dir,
    );
    assert!(again.status.success());
    assert_eq!(stdout(&again), rendered);
    let markdown = psolab(&["report", "suite-out/results.csv"], &dir);
    let md = stdout(&markdown);
    assert!(md.contains("| Function |"), "{md}");
}

#[test]
fn config_file_precedence() {
    let dir = tempdir("config");
    std::fs::write(
        dir.join("exp.conf"),
        "algo = barebones\nfn = sphere\ndim = 2\nparticles = 6\nmax-iters = 10\nseed = 5\n",
    )
    .unwrap();
    // config file supplies everything
    let from_config = psolab(&["run", "--config", "exp.conf"], &dir);
    assert!(
        from_config.status.success(),
        "{}",
        String::from_utf8_lossy(&from_config.stderr)
    );
    assert!(stdout(&from_config).contains("algorithm:   barebones"));
    // flags override the config file
    let overridden = psolab(
        &["run", "--config", "exp.conf", "--algo", "standard", "--seed", "5"],
        &dir,
    );
    assert!(overridden.status.success());
    assert!(stdout(&overridden).contains("algorithm:   standard"));
    // unknown config keys are usage errors
    std::fs::write(dir.join("bad.conf"), "gama = 1\n").unwrap();
    let bad = psolab(&["run", "--config", "bad.conf", "--algo", "standard"], &dir);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn suite_copies_the_config_verbatim() {
    let dir = tempdir("suite-config");
    let config_text = "algos = barebones\nfns = sphere\nruns = 2\ndim = 2\nparticles = 5\nmax-iters = 10\n# a comment kept verbatim\n";
    std::fs::write(dir.join("exp.conf"), config_text).unwrap();
    let out = psolab(
        &["suite", "--config", "exp.conf", "--out", "out", "--format", "json"],
        &dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        std::fs::read_to_string(dir.join("out/config.txt")).unwrap(),
        config_text
    );
    assert!(dir.join("out/report.json").exists());
}

#[test]
fn run_out_writes_json() {
    let dir = tempdir("run-out");
    let out = psolab(
        &[
            "run",
            "--algo",
            "constricted",
            "--fn",
            "sphere",
            "--dim",
            "2",
            "--particles",
            "10",
            "--seed",
            "1",
            "--max-iters",
            "100",
            "--out",
            "result.json",
        ],
        &dir,
    );
    assert!(out.status.success());
    let json = std::fs::read_to_string(dir.join("result.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(value["best_value"].is_number());
    assert!(value["trace"].is_array(), "run --out records the gbest trace");
}

#[test]
fn help_documents_the_defaults() {
    let dir = tempdir("help");
    let out = psolab(&["suite", "--help"], &dir);
    let text = stdout(&out);
    for needle in [
        "[default: 0.8]",
        "[default: 0.4 dependence, 0.1 independence]",
        "[default: 0.5]",
        "[default: uniform]",
        "[default: 0.2]",
        "[default: 100000]",
        "[default: 0.001]",
        "[default: 100]",
    ] {
        assert!(text.contains(needle), "--help is missing `{needle}`:\n{text}");
    }
}
