use std::fs;
use std::process::{Command, Output};

fn nhq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn nhq_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhq"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn parse(text: &str) -> Self {
        let mut lines = text.lines().map(|l| l.split(',').map(String::from).collect::<Vec<_>>());
        let header = lines.next().unwrap();
        Csv {
            header,
            rows: lines.collect(),
        }
    }

    fn col(&self, name: &str) -> Vec<f64> {
        let i = self
            .header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }
}

#[test]
fn help_and_version_exit_zero() {
    let o = nhq(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify"));
    assert_eq!(nhq(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(nhq(&["run", "--bogus"]).status.code(), Some(3));
    assert_eq!(nhq(&[]).status.code(), Some(3));
    let o = nhq(&["run", "--nu", "abc"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("flag --nu: invalid number `abc`"), "{}", stderr(&o));
    assert_eq!(nhq(&["run", "--pairs", "xq"]).status.code(), Some(3));
    assert_eq!(nhq(&["run", "--model", "zz"]).status.code(), Some(3));
    assert_eq!(nhq(&["sweep", "--param", "dt", "--values", "1"]).status.code(), Some(3));
}

#[test]
fn config_diagnostics_name_line_and_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ini");
    fs::write(&path, "[scenario]\nmodel = ed\n\n[time]\nt_max = -2\n").unwrap();
    let o = nhq(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("config line 5, key `t_max`"), "{}", stderr(&o));
}

#[test]
fn config_file_with_flag_override_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.ini");
    let out = dir.path().join("out.csv");
    fs::write(
        &cfg,
        "[scenario]\nmodel = pd\ninit = z\nnu = 0.5\n[time]\nt_max = 1\nstride = 100\n[outputs]\npairs = zz\nkind = nonlinear\n",
    )
    .unwrap();
    let o = nhq(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--nu",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let csv = Csv::parse(&fs::read_to_string(&out).unwrap());
    assert_eq!(csv.header, ["t", "c_zz.re", "c_zz.im", "c_zz.ok"]);
    // ν = 0: 𝒞_zz = (1 − 2t)/(2t² − 2t + 1)
    let (t, c) = (csv.col("t"), csv.col("c_zz.re"));
    for (t, c) in t.iter().zip(c) {
        let expected = (1.0 - 2.0 * t) / (2.0 * t * t - 2.0 * t + 1.0);
        assert!((c - expected).abs() < 1e-12);
    }
}

#[test]
fn autocorrelation_duplicates_average_on_ed() {
    let o = nhq(&[
        "run",
        "--model",
        "ed",
        "--a2",
        "1",
        "--init",
        "x",
        "--averages",
        "--pairs",
        "xx",
        "--kind",
        "nonlinear",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = Csv::parse(&stdout(&o));
    for (a, b) in csv.col("sx.re").iter().zip(csv.col("c_xx.re")) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn identity_pair_is_constant_one() {
    let o = nhq(&[
        "run", "--model", "dph", "--gamma", "-1", "--nu", "0.5", "--pairs", "ii", "--kind", "both",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = Csv::parse(&stdout(&o));
    for name in ["c_ii.re", "cl_ii.re"] {
        assert!(csv.col(name).iter().all(|v| (v - 1.0).abs() < 1e-12), "{name}");
    }
}

#[test]
fn undefined_samples_are_flagged() {
    // pd, ρ_z, ν = 0.5: tr Ω ∝ (t − 1)², zero on the grid at t = 1
    let o = nhq(&[
        "run",
        "--model",
        "pd",
        "--init",
        "z",
        "--nu",
        "0.5",
        "--averages",
        "--tmax",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = Csv::parse(&stdout(&o));
    let ok = csv.col("sz.ok");
    let t = csv.col("t");
    let idx = t.iter().position(|&t| (t - 1.0).abs() < 1e-9).unwrap();
    assert_eq!(ok[idx], 0.0);
    assert!(csv.rows[idx].iter().any(|f| f == "nan"));
    assert_eq!(ok.iter().filter(|&&v| v == 0.0).count(), 1);
}

#[test]
fn run_is_deterministic() {
    let args = [
        "run",
        "--model",
        "ed",
        "--a2",
        "-1",
        "--init",
        "z",
        "--nu",
        "-0.5",
        "--averages",
        "--pairs",
        "zz,zx,zy",
        "--delta-c",
        "--ratio",
    ];
    let (a, b) = (nhq(&args), nhq(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn singularity_exits_two_with_time() {
    let o = nhq(&["run", "--model", "ed", "--a2", "200", "--averages"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("t = "), "{}", stderr(&o));
}

#[test]
fn direct_integration_is_noted() {
    let o = nhq(&[
        "run",
        "--model",
        "pd",
        "--init",
        "z",
        "--pairs",
        "xz",
        "--kind",
        "nonlinear",
        "--tmax",
        "0.5",
        "--method",
        "rk4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stderr(&o).contains("note: c_xz uses direct RK4 integration"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn verify_passes_and_reports() {
    let o = nhq(&["verify", "--model", "ed", "--a2", "1", "--init", "x"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("delta_c_xx max |value|"));
    assert!(text.contains("result: PASS"));

    let o = nhq(&["verify", "--model", "pd", "--init", "x"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("notice: sx compared against the corrected closed form"));
}

#[test]
fn verify_lists_exclusions() {
    let o = nhq(&["verify", "--model", "ed", "--a2", "-1", "--init", "z"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("excluded: asymptote"));

    let o = nhq(&["verify", "--model", "dph", "--gamma", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("excluded: finite-t closed forms"));
}

#[test]
fn coarse_rk4_fails_verification() {
    let o = nhq(&["verify", "--model", "ed", "--a2", "1", "--method", "rk4", "--dt", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL"));
    let errors: Vec<f64> = text
        .lines()
        .skip(2)
        .take(5)
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(errors.iter().any(|&e| e > 1e-8));
}

#[test]
fn verify_rejects_raw_scenarios() {
    let o = nhq(&["verify", "--model", "raw"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn raw_scenario_matches_built_in_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("raw.ini");
    fs::write(
        &cfg,
        "[scenario]\nmodel = raw\nh_plus = 0, -1, -1, 0\ngamma_op = 1, 0, 0, -1\nrho0 = 1, 0, 0, 0\n[outputs]\npairs = zz\n",
    )
    .unwrap();
    let raw = nhq(&["run", "--config", cfg.to_str().unwrap()]);
    let built = nhq(&["run", "--model", "pd", "--init", "z", "--pairs", "zz"]);
    assert_eq!(raw.status.code(), Some(0), "{}", stderr(&raw));
    assert_eq!(raw.stdout, built.stdout);
}

#[test]
fn sweep_ratio_tracks_one_minus_nu() {
    let args = [
        "sweep", "--model", "ed", "--a2", "-0.5", "--init", "z", "--pairs", "zz", "--ratio", "--tmax", "30",
        "--stride", "1000", "--param", "nu", "--values", "0,0.5,1",
    ];
    let o = nhq(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = Csv::parse(&stdout(&o));
    assert_eq!(csv.header[0], "nu");
    assert_eq!(csv.rows.len(), 3 * 31);
    let (nu, t, r) = (csv.col("nu"), csv.col("t"), csv.col("r_zz.re"));
    for want in [0.0, 0.5, 1.0] {
        let last = (0..nu.len()).rev().find(|&i| nu[i] == want).unwrap();
        assert!((t[last] - 30.0).abs() < 1e-9);
        assert!((r[last] - (1.0 - want)).abs() < 1e-3, "ν={want}: {}", r[last]);
    }

    let single = nhq_env(&args, "NHQ_THREADS", "1");
    assert_eq!(single.stdout, o.stdout);
}

#[test]
fn sweep_orders_by_given_values() {
    let o = nhq(&[
        "sweep", "--model", "dph", "--param", "gamma", "--values", "1,0,-1", "--tmax", "1", "--stride", "500",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = Csv::parse(&stdout(&o));
    let gammas: Vec<f64> = csv.col("gamma");
    assert_eq!(gammas, vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0, -1.0, -1.0, -1.0]);
}

#[test]
fn asymptote_command() {
    let o = nhq(&["asymptote", "--model", "ed", "--a2", "-1", "--init", "x"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("series,re,im,ok,erratum\n"));
    assert!(
        text.contains("sz,-1.0000000000000000e0,0.0000000000000000e0,1,0"),
        "{text}"
    );

    let o = nhq(&["asymptote", "--model", "dph", "--gamma", "-0.5", "--init", "z"]);
    assert!(stdout(&o)
        .lines()
        .any(|l| l.starts_with("c_zz_l,") && l.ends_with(",1")));

    let o = nhq(&["asymptote", "--model", "ed", "--a2", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("degenerate"));
}
