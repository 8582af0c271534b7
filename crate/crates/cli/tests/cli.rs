use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pgd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgd"))
        .args(args)
        .current_dir(dir)
        .env_remove("PGD_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Lines after the `#` header block.
fn body(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

fn table(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = body(path);
    let mut lines = text.lines();
    let cols = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (cols, rows)
}

#[test]
fn unknown_flag_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgd(dir.path(), &["riemann", "--f9", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--f9"), "{}", stderr(&o));
}

#[test]
fn bad_values_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["riemann", "--t", "abc"],
        vec!["riemann", "--f1", "-1"],
        vec!["riemann", "--t", "0"],
        vec!["mollified", "--data", "sine"],
        vec!["sticky", "--flux", "cubic"],
        vec!["riemann", "--grid", "2:1:5"],
        vec!["sticky", "--oracle-n", "10"],
    ] {
        let o = pgd(dir.path(), &args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn riemann_middle_velocity() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgd(dir.path(), &["riemann", "--f1", "1", "--f2", "0", "--u1", "0", "--u2", "-1", "--t", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (cols, rows) = table(&dir.path().join("riemann.csv"));
    assert_eq!(cols, ["x", "rho_regular", "u"]);
    let mid: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] > -0.95 && r[0] < -0.05).collect();
    assert!(!mid.is_empty());
    for r in mid {
        assert_eq!(r[2], -0.5);
        assert_eq!(r[1], 2.0);
    }
    assert!(dir.path().join("riemann.atoms.csv").exists());
}

#[test]
fn atoms_go_to_the_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgd(dir.path(), &["riemann", "--u2", "1", "--f3", "2", "--out", "r.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (cols, atoms) = table(&dir.path().join("r.atoms.csv"));
    assert_eq!(cols, ["x", "amplitude"]);
    assert_eq!(atoms.len(), 2);
    assert_eq!(atoms.iter().map(|a| a[1]).sum::<f64>(), 2.0);
}

#[test]
fn sticky_matches_particle_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgd(dir.path(), &["sticky", "--data", "riemann:1,1,0,-1", "--t-end", "1", "--oracle-n", "10000"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (cols, rows) = table(&dir.path().join("sticky.csv"));
    assert_eq!(&cols[..6], ["t", "x_j", "m", "v", "lax_low", "lax_high"]);
    let dx = cols.iter().position(|c| c == "dx").unwrap();
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1.0);
    assert!(last[dx].abs() < 0.02);
    assert!(rows.iter().all(|r| r[4] < r[3] && r[3] < r[5]));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["oracle", "--paths", "5000", "--seed", "7", "--grid", "-1:0.5:16"];
    let a = pgd(dir.path(), &[&args[..], &["--out", "a.csv"]].concat());
    let b = pgd(dir.path(), &[&args[..], &["--out", "b.csv"]].concat());
    assert_eq!((code(&a), code(&b)), (0, 0), "{}", stderr(&a));
    assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
    let c = pgd(dir.path(), &["oracle", "--paths", "5000", "--seed", "8", "--grid", "-1:0.5:16", "--out", "c.csv"]);
    assert_eq!(code(&c), 0);
    assert_ne!(body(&dir.path().join("a.csv")), body(&dir.path().join("c.csv")));
}

#[test]
fn rerun_from_header_reproduces_body() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 4] = [
        &["riemann", "--u1", "0.5", "--u2", "-1", "--f2", "0.5", "--flux", "exp", "--grid", "-2:2:17"],
        &["sticky", "--data", "riemann:2,1,0.5,-2,0.5", "--dt", "0.05", "--oracle-n", "2000"],
        &["mollified", "--data", "riemann:1,1,-0.5,1", "--grid", "-1:1:9", "--t", "0.5"],
        &["oracle", "--paths", "3000", "--grid", "-1:1:9", "--check"],
    ];
    for args in runs {
        let first = pgd(dir.path(), &[args, &["--out", "first.csv"]].concat());
        assert_eq!(code(&first), 0, "{args:?}: {}", stderr(&first));
        let again = pgd(dir.path(), &[args[0], "--config", "first.csv", "--out", "again.csv"]);
        assert_eq!(code(&again), 0, "{args:?}: {}", stderr(&again));
        assert_eq!(
            fs::read(dir.path().join("first.csv")).unwrap(),
            fs::read(dir.path().join("again.csv")).unwrap(),
            "{args:?}"
        );
    }
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "[riemann]\nu2 = -2\nt = 0.5\ngrid = \"-1:1:5\"\n\n[sticky]\nt_end = 2\n")
        .unwrap();
    let o = pgd(dir.path(), &["riemann", "--config", "run.toml", "--t", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("riemann.csv")).unwrap();
    assert!(text.contains("# u2 = -2.0\n"));
    assert!(text.contains("# t = 1.0\n"));
    assert!(text.contains("# grid = \"-1:1:5\"\n"));

    fs::write(dir.path().join("bad.toml"), "[riemann]\nu3 = 1\n").unwrap();
    let o = pgd(dir.path(), &["riemann", "--config", "bad.toml"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("u3"));

    fs::write(dir.path().join("bad2.toml"), "[shock]\nt = 1\n").unwrap();
    assert_eq!(code(&pgd(dir.path(), &["riemann", "--config", "bad2.toml"])), 2);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_pgd"))
        .args(["riemann", "--grid", "-1:1:3"])
        .current_dir(dir.path())
        .env("PGD_OUT_DIR", "artifacts")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("artifacts/riemann.csv").exists());
}

#[test]
fn audit_strict_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&pgd(dir.path(), &["riemann", "--f3", "1"])), 0);
    let ok = pgd(dir.path(), &["audit", "riemann.csv", "--strict"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    let table = String::from_utf8_lossy(&ok.stdout).into_owned();
    assert!(table.contains("momentum with pressure"));
    assert!(table.contains("FAIL (informational)"));

    let path = dir.path().join("riemann.csv");
    let tampered = fs::read_to_string(&path).unwrap().replacen(",2,-0.5", ",2.5,-0.5", 1);
    fs::write(&path, tampered).unwrap();
    assert_eq!(code(&pgd(dir.path(), &["audit", "riemann.csv"])), 0);
    assert_eq!(code(&pgd(dir.path(), &["audit", "riemann.csv", "--strict"])), 4);

    assert_eq!(code(&pgd(dir.path(), &["sticky", "--dt", "0.1"])), 0);
    assert_eq!(code(&pgd(dir.path(), &["audit", "sticky.csv", "--strict"])), 0);
}

#[test]
fn flux_composes_with_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgd(dir.path(), &["riemann", "--flux", "exp", "--u1", "0.5", "--u2", "-1", "--grid", "-3:3:7"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (cols, rows) = table(&dir.path().join("riemann.csv"));
    assert_eq!(cols.last().unwrap(), "v");
    assert!((rows[0][3] - 0.5).abs() < 1e-14);
    assert!((rows[6][3] + 0.5).abs() < 1e-14);
    let o = pgd(dir.path(), &["flux-demo", "--flux", "square-positive", "--v0", "arctan:-0.2,1"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let o = pgd(dir.path(), &["flux-demo"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (_, rows) = table(&dir.path().join("flux-demo.csv"));
    assert!(rows.iter().all(|r| r[4].abs() < 1e-4 && r[5].abs() < 1e-3));
}

#[test]
fn blowup_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgd(dir.path(), &["blowup", "--sigma-sweep", "0.01,0.001"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = fs::read_to_string(dir.path().join("blowup.report.txt")).unwrap();
    assert!(report.contains("t_star = 1\n"));
    assert!(report.contains("m = 3\n"));
    let (_, rows) = table(&dir.path().join("blowup.csv"));
    assert!((rows[0][2] + 2.0 / 3.0).abs() < 0.05);
    assert_eq!(code(&pgd(dir.path(), &["blowup", "--data", "riemann:1,0,0,-1"])), 2);
}

#[test]
fn past_blowup_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgd(dir.path(), &["flux-demo", "--t", "3"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}
