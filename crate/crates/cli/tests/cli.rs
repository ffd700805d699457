use std::path::Path;
use std::process::{Command, Output};

fn repgeo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repgeo"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const DEGREE_SIX: &str = r#"
field = "Q(sqrt 2)"
cap = 6
identities = ["x1*x2*x3*x4*x5*x6"]
"#;

#[test]
fn basis_and_ibn() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("v6.cfg"), DEGREE_SIX).unwrap();
    let o = repgeo(dir.path(), &["basis", "--variety", "v6.cfg"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Lyndon counts [2, 1, 2, 3, 6, 9]"));
    assert!(stdout(&o).contains("dim A = 63"));
    for (n1, n2) in [("1", "1"), ("2", "1"), ("2", "2"), ("3", "2")] {
        let o = repgeo(dir.path(), &["ibn", "--variety", "v6.cfg", "--n1", n1, "--n2", n2]);
        assert_eq!(o.status.code(), Some(0), "{n1},{n2}");
        assert!(stdout(&o).contains("recovered"));
    }
}

#[test]
fn json_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["twist", "--field", "Q(sqrt 2)", "--a", "1", "--phi", "conj", "--json"];
    let a = repgeo(dir.path(), &args);
    let b = repgeo(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("\"schema\": \"repgeo/report\""));
}

#[test]
fn inner_and_group_certificates_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("v.cfg"), DEGREE_SIX).unwrap();
    let o = repgeo(dir.path(), &["inner", "--variety", "v.cfg", "--a", "1", "--phi", "conj", "--out", "inner.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("is not inner"));
    assert!(dir.path().join("inner.cert.json").exists());
    let o = repgeo(dir.path(), &["--verify", "inner.cert.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let o = repgeo(dir.path(), &["group", "--variety", "v.cfg", "--field", "Q(sqrt 2)", "--out", "g.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("order 2"));
    assert_eq!(repgeo(dir.path(), &["verify", "g.json"]).status.code(), Some(0));
    let o = repgeo(dir.path(), &["group", "--field", "Q"]);
    assert!(stdout(&o).contains("trivial"), "{}", stdout(&o));
}

#[test]
fn closure_command() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("sys.txt"), "# one equation\nx1*v1\n").unwrap();
    std::fs::write(dir.path().join("H.cfg"), "n1 = 1\nn2 = 1\n").unwrap();
    let o = repgeo(
        dir.path(),
        &["closure", "--n1", "1", "--n2", "1", "--system", "sys.txt", "--target", "H.cfg", "--out", "c.json"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("is closed"));
    assert_eq!(repgeo(dir.path(), &["--verify", "c.cert.json"]).status.code(), Some(0));

    // a tampered certificate is rejected
    let path = dir.path().join("c.cert.json");
    let text = std::fs::read_to_string(&path).unwrap().replace("\"x1*v1\"", "\"x1*x1*v1\"");
    std::fs::write(&path, text).unwrap();
    assert_eq!(repgeo(dir.path(), &["--verify", "c.cert.json"]).status.code(), Some(1));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), "cap = \"six\"").unwrap();
    assert_eq!(repgeo(dir.path(), &["basis", "--variety", "bad.cfg"]).status.code(), Some(2));
    assert_eq!(repgeo(dir.path(), &["basis", "--variety", "missing.cfg"]).status.code(), Some(2));
    assert_eq!(repgeo(dir.path(), &["inner", "--a", "1 +"]).status.code(), Some(2));
    assert_eq!(repgeo(dir.path(), &["inner", "--a", "0"]).status.code(), Some(2));
    assert_eq!(repgeo(dir.path(), &["inner", "--a", "1", "--phi", "frobenius"]).status.code(), Some(2));
    assert_eq!(repgeo(dir.path(), &["separate", "--d", "4", "--lambda", "1"]).status.code(), Some(2));
    std::fs::write(dir.path().join("junk.json"), "{}").unwrap();
    assert_eq!(repgeo(dir.path(), &["--verify", "junk.json"]).status.code(), Some(2));
}

#[test]
fn separate_emits_revalidating_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let o = repgeo(dir.path(), &["separate", "--d", "2", "--lambda", "sqrt(2)", "--out", "sep.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    for item in ["[pass] (i)", "[pass] (ii)", "[pass] (iii)", "[pass] (iv)", "[pass] (v)"] {
        assert!(out.contains(item), "{item}");
    }
    let o = repgeo(dir.path(), &["--verify", "sep.cert.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn low_degree_bound_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let o = repgeo(dir.path(), &["separate", "--d", "2", "--lambda", "sqrt(2)", "--degree-bound", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degree"));
}
