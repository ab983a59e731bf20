use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fracstab_cli::csv_io::{read_table, write_trajectory};
use fracstab_core::solver::solve;
use fracstab_core::presets;
use tempfile::TempDir;

fn fracstab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracstab"))
        .args(args)
        .current_dir(cwd)
        .env_remove("FRACSTAB_OUT")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn simulate_example1_row_count() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "e1.cfg", "preset = example1\n");
    let o = fracstab(&["simulate", &cfg, "--out", "run"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("run/trajectory.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x1,x2");
    assert_eq!(lines.len() - 1, 5001);
    assert_eq!(lines[1], "0,-10,10");
    assert!(lines[5001].starts_with("50,"));
}

#[test]
fn simulate_example2_first_row() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "e2.cfg", "preset = example2\noutput = from_config\n");
    let o = fracstab(&["simulate", &cfg], dir.path());
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("from_config/trajectory.csv")).unwrap();
    assert_eq!(text.lines().nth(1), Some("0,0.10000000000000001"));
}

#[test]
fn env_var_sets_default_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "e2.cfg", "preset = example2\nt_end = 1\n");
    let o = Command::new(env!("CARGO_BIN_EXE_fracstab"))
        .args(["simulate", &cfg])
        .current_dir(dir.path())
        .env("FRACSTAB_OUT", "via_env")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("via_env/trajectory.csv").exists());
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "e2.cfg", "preset = example2\n");
    fs::write(dir.path().join("blocker"), "a file, not a directory").unwrap();
    let o = fracstab(&["simulate", &cfg, "--out", "blocker/sub"], dir.path());
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("blocker"));
}

#[test]
fn missing_config_file_is_io_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&fracstab(&["simulate", "absent.cfg"], dir.path())), 3);
}

#[test]
fn config_errors_exit_1_with_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "order = 0.5\nx0 = [1]\nstep = 0.1\n");
    let o = fracstab(&["simulate", &cfg], dir.path());
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("unknown key 'step'"), "{err}");
}

#[test]
fn usage_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&fracstab(&[], dir.path())), 1);
    assert_eq!(code(&fracstab(&["reproduce", "4"], dir.path())), 1);
    assert_eq!(code(&fracstab(&["frobnicate"], dir.path())), 1);
    assert_eq!(code(&fracstab(&["--help"], dir.path())), 0);
    assert_eq!(code(&fracstab(&["--version"], dir.path())), 0);
}

#[test]
fn divergence_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "blowup.cfg",
        "order = 0.5\nx0 = [1]\nrhs1 = \"x1^2\"\nt_end = 10\nh = 0.01\n",
    );
    let o = fracstab(&["simulate", &cfg, "--out", "o"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("diverged"));
}

#[test]
fn check_nr1_seed7() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", "checks = nr1:200\nseed = 7\n");
    let o = fracstab(&["check", &cfg, "--out", "a"], dir.path());
    assert_eq!(code(&o), 0);
    let summary = fs::read_to_string(dir.path().join("a/check_summary.csv")).unwrap();
    assert_eq!(summary, "name,instances,passes,max_violation\nnr1,200,200,0\n");
    let detail = fs::read_to_string(dir.path().join("a/check_nr1.csv")).unwrap();
    assert_eq!(detail.lines().count(), 201);

    fracstab(&["check", &cfg, "--out", "b"], dir.path());
    let again = fs::read(dir.path().join("b/check_nr1.csv")).unwrap();
    assert_eq!(again, detail.as_bytes());
}

#[test]
fn check_identity_suite() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", "checks = nr4_identity:50\n");
    let o = fracstab(&["check", &cfg, "--out", "o"], dir.path());
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("o/check_summary.csv")).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..3], &["nr4_identity", "50", "50"]);
    assert!(row[3].parse::<f64>().unwrap() <= 1e-10);
}

#[test]
fn check_unknown_name_exit_4() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", "checks = bogus\n");
    assert_eq!(code(&fracstab(&["check", &cfg, "--out", "o"], dir.path())), 4);
    assert!(!dir.path().join("o").exists());
    let cfg = write_config(dir.path(), "c2.cfg", "checks = [nr1:2, bogus]\n");
    assert_eq!(code(&fracstab(&["check", &cfg], dir.path())), 4);
}

#[test]
fn reproduce_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    for out in ["a", "b"] {
        let o = fracstab(&["reproduce", "2", "--out", out], dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    }
    let names = ["trajectory.csv", "candidate.csv", "dissipation.csv", "summary.csv", "stability.txt"];
    for name in names {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name} differs");
    }
    let summary = fs::read_to_string(dir.path().join("a/summary.csv")).unwrap();
    assert!(summary.lines().skip(1).all(|l| l.split(',').nth(1) == Some("pass")), "{summary}");
    let text = fs::read_to_string(dir.path().join("a/stability.txt")).unwrap();
    assert!(text.contains("alpha=0.80000000000000004\nx0=0.10000000000000001\n"), "{text}");
}

#[test]
fn reproduce_example3_ball() {
    let dir = TempDir::new().unwrap();
    let o = fracstab(&["reproduce", "3", "--out", "o"], dir.path());
    assert_eq!(code(&o), 0);
    let summary = fs::read_to_string(dir.path().join("o/summary.csv")).unwrap();
    assert!(summary.contains("\nball,pass,0,0,\n"), "{summary}");
    assert!(summary.contains("\ndissipation,pass,"));
    assert!(!summary.contains("sandwich"));
}

#[test]
fn trajectory_csv_round_trips() {
    let dir = TempDir::new().unwrap();
    let p = presets::example1();
    let traj = solve(&p.system, &p.grid()).unwrap();
    let path = dir.path().join("t.csv");
    write_trajectory(&path, &traj).unwrap();
    let table = read_table(&path).unwrap();
    assert_eq!(table.rows.len(), traj.len());
    for (i, s) in traj.states().iter().enumerate() {
        let col = table.column(&format!("x{}", i + 1)).unwrap();
        let bits: Vec<u64> = col.iter().map(|v| v.to_bits()).collect();
        let want: Vec<u64> = s.values().iter().map(|v| v.to_bits()).collect();
        assert_eq!(bits, want);
    }
    let t = table.column("t").unwrap();
    assert!(t.iter().enumerate().all(|(j, &v)| v.to_bits() == traj.grid().node(j).to_bits()));
}

#[test]
fn convergence_writes_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "cv.cfg",
        "order = 1\nx0 = [1]\nrhs1 = \"-x1\"\nt_end = 1\nh_list = [0.1, 0.05, 0.025]\n",
    );
    let o = fracstab(&["convergence", &cfg, "--out", "o"], dir.path());
    assert_eq!(code(&o), 0);
    let t = read_table(&dir.path().join("o/convergence.csv")).unwrap();
    assert_eq!(t.header, ["h", "max_error"]);
    assert_eq!(t.column("h").unwrap(), vec![0.1, 0.05, 0.025]);
    let fit = read_table(&dir.path().join("o/convergence_fit.csv")).unwrap();
    let p = fit.column("fitted_order").unwrap()[0];
    assert!((p - 2.0).abs() < 0.3, "{p}");
}

#[test]
fn plot_script_for_trajectory() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "e2.cfg", "preset = example2\nt_end = 1\n");
    fracstab(&["simulate", &cfg, "--out", "o"], dir.path());
    let o = fracstab(&["plot", "o/trajectory.csv", "--out", "o"], dir.path());
    assert_eq!(code(&o), 0);
    let gp = fs::read_to_string(dir.path().join("o/trajectory.gp")).unwrap();
    assert!(gp.contains("plot for [i=2:2] 'o/trajectory.csv' using 1:i with lines"));
}
