use kkp_cli::output::decode_snapshot;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kkp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kkp")).args(args).output().expect("spawn kkp")
}

fn kkp_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kkp")).args(args).env("KKP_THREADS", threads).output().expect("spawn kkp")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

const SMALL_RUN: &str = "\
beta = -1
sigma = 1
mode = kkp2d
nx = 64
ny = 4
lx = 60
ly = 4
dt = 0.02
t_end = 0.2
snapshot_every = 5
";

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.conf");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn soliton_writes_profiles_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = kkp(&["--out", out, "soliton", "--beta", "-4,-1", "--kappa", "8", "--zero-background", "--points", "11"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(header(&dir.path().join("soliton_kappa_8.0.csv")), "xi,U_beta=-4.0,U_beta=-1.0");
    let zero = fs::read_to_string(dir.path().join("soliton_zero_background.csv")).unwrap();
    assert_eq!(zero.lines().count(), 12);
    let summary = fs::read_to_string(dir.path().join("soliton_summary.csv")).unwrap();
    assert_eq!(summary.lines().next().unwrap(), "beta,kappa,mu,nu,p,q,r,c,theta");
    // β = −4, κ = 8: p = 8 + 576/169
    let row: Vec<f64> = summary.lines().nth(3).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], -4.0);
    assert!((row[4] - (8.0 + 576.0 / 169.0)).abs() < 1e-12);
}

#[test]
fn soliton_rejects_nonnegative_beta() {
    let dir = tempfile::tempdir().unwrap();
    let o = kkp(&["--out", dir.path().to_str().unwrap(), "soliton", "--beta", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error"));
}

#[test]
fn kinematics_writes_both_signs() {
    let dir = tempfile::tempdir().unwrap();
    let o = kkp(&["--out", dir.path().to_str().unwrap(), "kinematics", "--theta-points", "51"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["kinematics_sigma_plus.csv", "kinematics_sigma_minus.csv"] {
        assert_eq!(header(&dir.path().join(f)), "theta,c_ratio_sq=1.0,c_ratio_sq=2.0,c_ratio_sq=4.0,c_ratio_sq=10.0");
    }
    let features = fs::read_to_string(dir.path().join("kinematics_features.csv")).unwrap();
    assert_eq!(features.lines().count(), 9);
}

#[test]
fn kinematics_from_beta() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        kkp(&["--out", dir.path().to_str().unwrap(), "kinematics", "--beta", "-2.1666666666666665", "--sigma", "-1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(!dir.path().join("kinematics_sigma_plus.csv").exists());
    assert!(stdout(&o).contains("ratio_sq=1.0"));
}

#[test]
fn verify_ansatz_reports_constants() {
    let dir = tempfile::tempdir().unwrap();
    let o = kkp(&["--out", dir.path().to_str().unwrap(), "verify-ansatz"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = fs::read_to_string(dir.path().join("ansatz_report.txt")).unwrap();
    assert_eq!(report, stdout(&o));
    assert!(report.contains("C1 = p^2/2 - kappa p"));
    assert!(report.contains("NOTE reference C1"));
    assert!(report.contains("NOTE reference C2"));
    assert!(report.ends_with("overall: PASS\n"));
    assert_eq!(header(&dir.path().join("ansatz.csv")), "beta,kappa,status,residual");
}

#[test]
fn verify_ansatz_custom_grid_and_bad_rational() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let betas = "-1,-2,-3,-13/4,-5,-6,-7,-8,-9/2";
    let o = kkp(&["--out", out, "verify-ansatz", "--betas", betas, "--kappas", "2/7,-1,3,5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = fs::read_to_string(dir.path().join("ansatz.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 36);
    // too few samples to certify the polynomial degrees
    let o = kkp(&["--out", out, "verify-ansatz", "--betas", "-1,-13/4", "--kappas", "2/7"]);
    assert_eq!(o.status.code(), Some(2));
    let o = kkp(&["--out", out, "verify-ansatz", "--betas", "-1,x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_claws_single_law() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = kkp(&[
        "--out",
        out,
        "verify-claws",
        "--claw",
        "3",
        "--f",
        "t",
        "--sigma",
        "1",
        "--skip-symmetries",
        "--skip-charges",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(dir.path().join("claws.csv")).unwrap();
    assert_eq!(table.lines().next().unwrap(), "sigma,law,f,h,residual,order");
    assert_eq!(table.lines().count(), 1 + 8);
    assert!(!dir.path().join("symmetries.csv").exists());
}

#[test]
fn verification_failure_exits_one_and_names_the_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // three coarse levels never reach the residual threshold
    let o = kkp(&[
        "--out",
        out,
        "verify-claws",
        "--claw",
        "1",
        "--sigma",
        "1",
        "--h0",
        "3",
        "--levels",
        "3",
        "--skip-symmetries",
        "--skip-charges",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL (first failing check: sigma=1 law 1 f=1)"), "{}", stdout(&o));
}

#[test]
fn bad_usage_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(kkp(&["--out", out, "verify-claws", "--claw", "6"]).status.code(), Some(2));
    assert_eq!(kkp(&["--out", out, "verify-claws", "--f", "t3"]).status.code(), Some(2));
    assert_eq!(kkp(&["--out", out, "verify-claws", "--point", "1,2"]).status.code(), Some(2));
    assert_eq!(kkp(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(kkp_env(&["--out", out, "kinematics"], "0").status.code(), Some(2));
    assert_eq!(kkp_env(&["--out", out, "kinematics"], "two").status.code(), Some(2));
}

#[test]
fn stability_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = kkp(&["--out", dir.path().to_str().unwrap(), "stability", "--lengths", "50", "--points-per-length", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("PASS symbol positivity"));
    assert!(text.contains("NOTE rescaled relation as quoted does not hold"));
    assert!(text.contains("PASS rescaled relation with speed term 12/35"));
    let csv = fs::read_to_string(dir.path().join("stability.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn simulate_writes_manifest_diagnostics_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_RUN);
    let out = dir.path().join("run");
    let o = kkp(&["--out", out.to_str().unwrap(), "simulate", "--config", &cfg]);
    assert!(o.status.success(), "{}\n{}", stdout(&o), stderr(&o));
    let manifest = fs::read_to_string(out.join("run_manifest.txt")).unwrap();
    for key in ["beta = -1", "nx = 64", "kappa = ", "r = ", "p = ", "q = ", "steps = 10"] {
        assert!(manifest.contains(key), "{key} missing from\n{manifest}");
    }
    let diag = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert_eq!(diag.lines().next().unwrap(), "t,M,My,Px,Py,E,chi_M,Pxy,Mx,PxF_1,PyF_1,PxF_t,PyF_t,PxF_t2,PyF_t2");
    assert_eq!(diag.lines().count(), 1 + 3);
    for k in 0..3 {
        let bytes = fs::read(out.join(format!("snapshot_{k:04}.kkp"))).unwrap();
        let (grid, t, field) = decode_snapshot(&bytes).unwrap();
        assert_eq!((grid.nx, grid.ny), (64, 4));
        assert_eq!(field.len(), 64 * 4);
        assert_eq!(t, [0.0, 0.1, 0.2][k]);
    }
    assert!(!out.join("snapshot_0003.kkp").exists());
}

#[test]
fn simulate_with_zero_end_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL_RUN.replace("t_end = 0.2", "t_end = 0"));
    let out = dir.path().join("run");
    let o = kkp(&["--out", out.to_str().unwrap(), "simulate", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("run_manifest.txt").exists());
    assert!(out.join("snapshot_0000.kkp").exists());
    assert!(!out.join("snapshot_0001.kkp").exists());
    let diag = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert_eq!(diag.lines().count(), 2);
    assert!(diag.lines().nth(1).unwrap().starts_with("0.0,"));
}

#[test]
fn simulate_uses_output_dir_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_config");
    let text = format!("{SMALL_RUN}output_dir = {}\n", target.display());
    let cfg = write_config(dir.path(), &text);
    let o = kkp(&["simulate", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(target.join("diagnostics.csv").exists());
}

#[test]
fn zero_mass_packet_reports_undefined_centre() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_RUN
        .replace("nx = 64", "nx = 128")
        .replace("ny = 4", "ny = 128")
        .replace("lx = 60", "lx = 64")
        .replace("ly = 4", "ly = 64")
        + "initial = tilted_packet\nmu = 0.5\n";
    let cfg = write_config(dir.path(), &text);
    let out = dir.path().join("run");
    let o = kkp(&["--out", out.to_str().unwrap(), "simulate", "--config", &cfg]);
    assert!(o.status.success(), "{}\n{}", stdout(&o), stderr(&o));
    let diag = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert!(diag.lines().skip(1).all(|l| l.split(',').nth(6) == Some("undefined")));
}

#[test]
fn config_errors_exit_two_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (SMALL_RUN.replace("sigma = 1", "sigma = 2"), "sigma must be +1 or -1"),
        (format!("{SMALL_RUN}colour = blue\n"), "line 11"),
        (SMALL_RUN.replace("beta = -1", "beta = 0"), "beta must be nonzero"),
        (SMALL_RUN.replace("nx = 64", "nx = sixty"), "line 4"),
        (SMALL_RUN.replace("dt = 0.02\n", ""), "dt"),
    ];
    for (text, needle) in cases {
        let cfg = write_config(dir.path(), &text);
        let o = kkp(&["--out", dir.path().join("x").to_str().unwrap(), "simulate", "--config", &cfg]);
        assert_eq!(o.status.code(), Some(2), "{needle}");
        assert!(stderr(&o).contains(needle), "{needle}: {}", stderr(&o));
    }
    let o = kkp(&["simulate", "--config", dir.path().join("missing.conf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn divergence_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = "\
beta = -1
sigma = 1
mode = kawahara1d
nx = 32
ny = 1
lx = 10
ly = 1
dt = 1
t_end = 50
dealias = false
initial = tilted_packet
amplitude = 1000
width_x = 1
";
    let cfg = write_config(dir.path(), text);
    let o = kkp(&["--out", dir.path().join("run").to_str().unwrap(), "simulate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1), "{}\n{}", stdout(&o), stderr(&o));
    assert!(stderr(&o).contains("diverg"), "{}", stderr(&o));
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_RUN);
    let runs: [&[&str]; 3] = [&["verify-ansatz"], &["verify-claws", "--skip-charges"], &["simulate", "--config", &cfg]];
    for args in runs {
        let mut outputs = Vec::new();
        for threads in ["1", "4"] {
            let out = dir.path().join(format!("t{threads}"));
            let _ = fs::remove_dir_all(&out);
            let mut full = vec!["--out", out.to_str().unwrap()];
            full.extend_from_slice(args);
            let o = kkp_env(&full, threads);
            assert!(o.status.success(), "{args:?}: {}", stderr(&o));
            let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out)
                .unwrap()
                .map(|e| {
                    let e = e.unwrap();
                    (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
                })
                .collect();
            files.sort();
            outputs.push((stdout(&o), files));
        }
        assert_eq!(outputs[0], outputs[1], "{args:?}");
    }
}
