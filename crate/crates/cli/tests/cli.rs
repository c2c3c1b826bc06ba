use invscat::forward::ScatteringDataset;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn invscat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invscat")).args(args).output().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn dump_config_reloads_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = invscat(&["--set", "n=64", "--set", "ks=3,6,12.5", "--seed", "7", "--dump-config", "sweep"]);
    assert!(first.status.success(), "{}", text(&first.stderr));
    let path = dir.path().join("run.cfg");
    fs::write(&path, &first.stdout).unwrap();
    let second = invscat(&["--config", path.to_str().unwrap(), "--dump-config"]);
    assert!(second.status.success(), "{}", text(&second.stderr));
    assert_eq!(text(&first.stdout), text(&second.stdout));
    assert!(text(&first.stdout).contains("command = sweep"));
    assert!(text(&first.stdout).contains("seed = 7"));
}

#[test]
fn help_lists_every_default() {
    let out = invscat(&["--help"]);
    assert!(out.status.success());
    let s = text(&out.stdout);
    for key in ["half_width", "krylov_tol", "probe_re", "min_coverage", "timings"] {
        assert!(s.contains(key), "{key} missing from --help");
    }
}

#[test]
fn version_has_build_identifier() {
    let out = invscat(&["--version"]);
    assert!(out.status.success());
    assert!(text(&out.stdout).contains("build "));
}

#[test]
fn unknown_subcommand_prints_usage() {
    let out = invscat(&["scatter"]);
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("Usage"));
}

#[test]
fn unknown_key_is_named() {
    let out = invscat(&["--set", "grid_size=3", "forward"]);
    assert_eq!(out.status.code(), Some(1));
    let err = text(&out.stderr);
    assert!(err.starts_with("error: code=parse"), "{err}");
    assert!(err.contains("grid_size"));
}

#[test]
fn coarse_grid_is_a_resolution_error() {
    let out = invscat(&["--set", "n=16", "--set", "k=12", "--set", "ks=6,12", "--set", "z_max=20", "forward"]);
    assert_eq!(out.status.code(), Some(1));
    let err = text(&out.stderr);
    assert!(err.contains("code=resolution"), "{err}");
    assert!(err.contains("1.5000") && err.contains("0.7854"), "{err}");
}

fn zero_dataset(path: &Path) {
    let ds = ScatteringDataset::read_csv(std::io::BufReader::new(fs::File::open(path).unwrap())).unwrap();
    match ds {
        ScatteringDataset::FarField { records, .. } => {
            assert!(!records.is_empty());
            assert!(records.iter().flat_map(|r| &r.pairs).all(|p| p.value.norm() == 0.0));
        }
        ScatteringDataset::NearField { records, .. } => {
            assert!(!records.is_empty());
            assert!(records.iter().all(|r| r.dirichlet.iter().chain(&r.neumann).all(|x| x.norm() == 0.0)));
        }
    }
}

#[test]
fn forward_on_zero_potential_writes_zero_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let far = invscat(&["--set", "potential=zero", "--set", "n=32", "--set", "k=4", "--set", "ks=4", "--out", out, "forward"]);
    assert!(far.status.success(), "{}", text(&far.stderr));
    zero_dataset(&dir.path().join("far_field.csv"));
    let near = invscat(&["--set", "potential=zero", "--set", "n=32", "--set", "k=4", "--set", "ks=4", "--set", "data=near", "--out", out, "forward"]);
    assert!(near.status.success(), "{}", text(&near.stderr));
    zero_dataset(&dir.path().join("near_field.csv"));
}

#[test]
fn forward_then_reconstruct() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let common = ["--set", "n=48", "--set", "k=8", "--set", "ks=8", "--out", out];
    let f = invscat(&[&common[..], &["forward"]].concat());
    assert!(f.status.success(), "{}", text(&f.stderr));
    let r = invscat(&[&common[..], &["reconstruct"]].concat());
    assert!(r.status.success(), "{}", text(&r.stderr));
    assert!(dir.path().join("reconstruction.txt").exists());
    assert!(text(&r.stdout).contains("relative L2 error"));
}

fn error_column(report: &str) -> Vec<f64> {
    report.lines().skip(2).map(|l| l.split(", ").nth(2).unwrap().parse().unwrap()).collect()
}

#[test]
fn sweep_error_does_not_increase_and_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let run = |dir: &Path| {
        let out = invscat(&[
            "--set", "n=48", "--set", "ks=4,8,16", "--set", "eta=0.01", "--set", "trials=3", "--set", "timings=false",
            "--threads", "1", "--out", dir.to_str().unwrap(), "sweep",
        ]);
        assert!(out.status.success(), "{}", text(&out.stderr));
        fs::read(dir.join("report.csv")).unwrap()
    };
    let (ra, rb) = (run(a.path()), run(b.path()));
    assert_eq!(ra, rb);
    let errs = error_column(&text(&ra));
    assert_eq!(errs.len(), 3);
    assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{errs:?}");
}

#[test]
fn continuation_table_stays_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = invscat(&["--set", "k=4", "--set", "z_max=6", "--out", dir.path().to_str().unwrap(), "continuation"]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let table = fs::read_to_string(dir.path().join("continuation.csv")).unwrap();
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|l| l.ends_with(", 1")));
}

#[test]
fn probe_resolvent_writes_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = invscat(&[
        "--set", "n=24", "--set", "k=4", "--set", "ks=4", "--set", "probe_re=10,20", "--set", "probe_re_count=3", "--set",
        "probe_im_count=2", "--out", dir.path().to_str().unwrap(), "probe-resolvent",
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("probe.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6);
}

#[test]
fn selftest_passes() {
    let out = invscat(&["selftest"]);
    assert!(out.status.success(), "{}\n{}", text(&out.stdout), text(&out.stderr));
    assert!(!text(&out.stdout).contains("FAIL"));
}
