use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn nhqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhqc")).args(args).output().expect("binary runs")
}

fn fixture() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/reference.toml").to_string()
}

fn custom_config(dir: &Path, gates: &str) -> PathBuf {
    let path = dir.join("custom.toml");
    let device = std::fs::read_to_string(fixture()).unwrap();
    std::fs::write(&path, format!("{device}\n{gates}")).unwrap();
    path
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(2)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn fig2_csv_is_deterministic_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = nhqc(&[
            "fig2", "--config", &fixture(), "--kappa-khz", "0,4,8", "--grid-1q", "11", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# params: scenario=fig2_up;"));
    assert_eq!(lines.next().unwrap(), "kappa_over_2pi_kHz,state_fidelity,gate_fidelity,leakage");
    let data = rows(&text);
    assert_eq!(data.iter().map(|r| r[0]).collect::<Vec<_>>(), [0.0, 4.0, 8.0]);
    for r in &data {
        for &f in &r[1..3] {
            assert!((0.0..=1.0 + 1e-9).contains(&f));
        }
        assert!((0.0..=1.0).contains(&r[3]));
    }
    assert!(data.windows(2).all(|w| w[1][1] <= w[0][1]));
}

#[test]
fn malformed_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[qubit.A]\nrole = 3\n").unwrap();
    let o = nhqc(&["fig2", "--config", path.to_str().unwrap(), "--kappa-khz", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = nhqc(&["custom", "--kappa-khz", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = nhqc(&["fig2", "--kappa-khz", "3,1", "--grid-1q", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unsolvable_duration_exits_with_four_unless_retuned() {
    let dir = tempfile::tempdir().unwrap();
    let gate = "[[gate]]\nkind = \"rot_z\"\nangle = 0.39269908169872414\ntargets = [\"A\"]\nauxiliary = \"B\"\ndrive_MHz = 11.26\n";
    let path = custom_config(dir.path(), gate);
    let p = path.to_str().unwrap();
    let o = nhqc(&["recipe-dump", "custom", "--config", p]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    let o = nhqc(&["recipe-dump", "custom", "--config", p, "--retune"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("kind = \"rot_z\"") && text.contains("branch = \"G_z\""));
}

#[test]
fn failed_cyclicity_exits_with_three() {
    // With the coupling switched off the drive on B sees the static ZZ shift
    // of the A–B edge, and the subspace does not return.
    let dir = tempfile::tempdir().unwrap();
    let gate = "[[gate]]\nkind = \"rot_y\"\nangle = 3.141592653589793\ntargets = [\"A\"]\nauxiliary = \"B\"\n";
    let path = custom_config(dir.path(), gate);
    let p = path.to_str().unwrap();
    let o = nhqc(&["check-holonomy", "custom", "--config", p]);
    assert_eq!(o.status.code(), Some(3));
    let o = nhqc(&["check-holonomy", "custom", "--config", p, "--mode", "effective"]);
    assert!(o.status.success());
    let o = nhqc(&["custom", "--config", p, "--kappa-khz", "0", "--check-holonomy"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn holonomy_report_lists_every_gate() {
    let o = nhqc(&["check-holonomy", "fig2"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let overlap: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!(overlap >= 0.99);
}

#[test]
fn two_qubit_custom_sequence_runs() {
    let dir = tempfile::tempdir().unwrap();
    let gate = "[[gate]]\nkind = \"two_qubit\"\nangle = 1.5707963267948966\nphase = 3.141592653589793\ntargets = [\"A\", \"C\"]\nauxiliary = \"B\"\n";
    let path = custom_config(dir.path(), gate);
    let o = nhqc(&[
        "custom", "--config", path.to_str().unwrap(), "--mode", "effective", "--kappa-khz", "0", "--grid-2q", "4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let data = rows(&String::from_utf8(o.stdout).unwrap());
    assert!((data[0][1] - 1.0).abs() <= 1e-9 && (data[0][2] - 1.0).abs() <= 1e-9);
}
