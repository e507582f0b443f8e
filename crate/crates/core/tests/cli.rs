use std::fs;
use std::path::Path;
use std::process::Command;

fn lowres(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_lowres")).args(args).output().expect("binary runs")
}

fn body(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

fn kerr_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("kerr.cfg");
    fs::write(
        &path,
        "# two coupled Kerr modes\nomega1 = 1\nomega2 = 1\ng1 = 0.05\ng2 = 0.05\ng = 0.02\nhbar = 1\n\
         q10 = 2.8284271247461903\np10 = 0\nq20 = 0\np20 = 2.8284271247461903\nt_max = 20\nt_steps = 50\n",
    )
    .unwrap();
    path
}

#[test]
fn trajectory_writes_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = kerr_config(dir.path());
    let out = lowres(&["trajectory", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(text.starts_with("# lowres "));
    assert!(text.contains("# g1 = 5e-2"));
    assert!(text.contains("# command = trajectory"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "t,mode,q_cl,p_cl,q_qm,p_qm,A,phi,residual_norm");
    assert_eq!(rows.len(), 1 + 100);
}

#[test]
fn entropy_includes_oracle_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = kerr_config(dir.path());
    let out = lowres(&[
        "entropy",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "t_steps=5",
    ]);
    assert!(out.status.success());
    let b = body(&dir.path().join("entropy.csv"));
    let mut lines = b.lines();
    assert_eq!(lines.next().unwrap(), "t,E_exact,E_short_zform,E_short_sform,E_oracle");
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((f[1] - f[4]).abs() < 1e-8);
    }
}

#[test]
fn fig2_writes_six_panels() {
    let dir = tempfile::tempdir().unwrap();
    let out = lowres(&["fig2", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for tag in ['a', 'b', 'c', 'd', 'e', 'f'] {
        let b = body(&dir.path().join(format!("fig2_{tag}.csv")));
        assert!(b.starts_with("x_k,P_k,density\n"));
        let total: f64 = b.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-9, "panel {tag}: {total}");
    }
    assert!(dir.path().join("fig2_visibility.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    for cmd in ["trajectory", "revivals", "schmidt-sweep", "commutator-sweep", "hbar-scan"] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let cfg = kerr_config(a.path());
        let threads = [("1", &a), ("4", &b)];
        for (n, dir) in threads {
            let out = lowres(&[
                cmd,
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                dir.path().to_str().unwrap(),
                "--threads",
                n,
                "--set",
                "s_max=3",
            ]);
            assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        }
        for entry in fs::read_dir(a.path()).unwrap() {
            let name = entry.unwrap().file_name();
            if name.to_str().unwrap().ends_with(".csv") {
                assert_eq!(
                    fs::read(a.path().join(&name)).unwrap(),
                    fs::read(b.path().join(&name)).unwrap(),
                    "{cmd} {name:?}"
                );
            }
        }
    }
}

#[test]
fn bad_config_exits_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "g1 = 0.1\nwidth = 3\n").unwrap();
    let out = lowres(&["trajectory", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("width"), "{err}");
}

#[test]
fn bad_override_and_unknown_command_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(lowres(&["trajectory", "--out", d, "--set", "hbar=-1"]).status.code(), Some(2));
    assert_eq!(lowres(&["plot", "--out", d]).status.code(), Some(2));
    assert_eq!(lowres(&["entropy", "--out", d, "--tail-eps", "2"]).status.code(), Some(2));
}

#[test]
fn selftest_passes_and_reports_each_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = lowres(&["selftest", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let b = body(&dir.path().join("selftest.csv"));
    assert!(b.lines().skip(1).all(|l| l.ends_with(",true")));
    assert!(b.lines().count() > 10);
}

#[test]
fn reduced_density_and_fock_dump() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = kerr_config(dir.path());
    let out = lowres(&["reduced-density", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let probs = body(&dir.path().join("fock_probs.csv"));
    let total: f64 = probs.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-10);
    let rho = body(&dir.path().join("reduced_density.csv"));
    for line in rho.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((f[2] - f[4]).abs() < 1e-9 && (f[3] - f[5]).abs() < 1e-9, "{line}");
    }
}
