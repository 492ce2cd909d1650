use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dqdot(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqdot")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL: &str = "solver = \"mo\"\nbasis_level = \"hm\"\nvariational = false\nb_grid = [0.0, 1.0]\ndistance_grid = [30.0]\nvb_grid = [20.0]\n";

fn csv_files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    v.sort();
    v
}

#[test]
fn unknown_key_is_a_config_error_with_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "solver = \"mo\"\nb_grid = [0.0]\nbogus = 3\n");
    let o = dqdot(&["sweep", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let e = stderr(&o);
    assert!(e.contains("kind=config") && e.contains("line 3"), "{e}");
}

#[test]
fn incompatible_solver_and_basis_point_at_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = dqdot(&["sweep", "--solver", "hl", "--basis", "sp"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--basis"), "{}", stderr(&o));
}

#[test]
fn zero_jobs_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = dqdot(&["sweep", "--jobs", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--jobs"));
}

#[test]
fn unknown_preset_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = dqdot(&["sweep", "--preset", "fig1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spectrum_output_is_deterministic_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", &format!("{SMALL}seed = 5\n"));
    let cache = dir.path().join("cache");
    let run = |out: &str| {
        let o = dqdot(&["spectrum", "--config", &cfg, "--out", out, "--cache", cache.to_str().unwrap(), "--seed", "9"], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        o
    };
    let first = run("a");
    // the flag overrides the file and says so
    assert!(stderr(&first).contains("seed"), "{}", stderr(&first));
    let entries = fs::read_dir(&cache).unwrap().count();
    assert!(entries > 0);
    run("b");
    assert_eq!(fs::read_dir(&cache).unwrap().count(), entries);

    let a = csv_files(&dir.path().join("a"));
    assert_eq!(a, csv_files(&dir.path().join("b")));
    assert!(!a.is_empty());
    for name in &a {
        let x = fs::read(dir.path().join("a").join(name)).unwrap();
        let y = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
    let text = fs::read_to_string(dir.path().join("a").join(&a[0])).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("B_T,"), "{header}");
    assert!(header.contains("J_meV") && header.contains("P_double"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn calibrate_reports_the_barriers() {
    let dir = tempfile::tempdir().unwrap();
    let o = dqdot(&["calibrate", "--preset", "table1", "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("out").join("calibration.csv")).unwrap();
    assert_eq!(text.lines().count(), 4, "{text}");
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("calibration.csv"));
}

#[test]
fn unreachable_barrier_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "deep.toml", "vb_grid = [20.0]\ncalibration = [[20.0, 500.0]]\n");
    let o = dqdot(&["calibrate", "--config", &cfg, "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("kind=numerical"));
}
