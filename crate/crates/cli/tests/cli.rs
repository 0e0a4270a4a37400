use std::fs;
use std::process::{Command, Output};

fn gwcoupler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwcoupler"))
        .args(args)
        .output()
        .expect("failed to run gwcoupler")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

/// `key=value` pairs of the trailing comment line.
fn summary(csv: &str) -> Vec<(String, String)> {
    let line = csv.lines().last().unwrap();
    assert!(line.starts_with("# "), "no summary line: {line}");
    line[2..]
        .split_whitespace()
        .map(|kv| {
            let (k, v) = kv.split_once('=').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn summary_value(csv: &str, key: &str) -> f64 {
    summary(csv)
        .into_iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("no {key} in summary"))
        .1
        .parse()
        .unwrap()
}

#[test]
fn modes_table_for_default_config() {
    let csv = stdout(&gwcoupler(&["modes"]));
    assert_eq!(
        csv.lines().next().unwrap(),
        "well,index,parity,kx_d,beta_nm,kappa_nm,theta_deg"
    );
    let source: Vec<_> = data_rows(&csv)
        .into_iter()
        .filter(|r| r[0] == "source")
        .collect();
    assert!(source.len() >= 2);
    assert_eq!(source[0][1], "1");
    assert_eq!(source[0][2], "symmetric");
}

#[test]
fn modes_angle_at_300_nm() {
    let csv = stdout(&gwcoupler(&["modes", "--d-nm", "300"]));
    let theta: f64 = data_rows(&csv)[0][6].parse().unwrap();
    assert!(((theta - 78.809) / 78.809).abs() < 0.15, "θ = {theta}");
}

#[test]
fn modes_profile_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    stdout(&gwcoupler(&[
        "modes",
        "--profile-points",
        "11",
        "--profile",
        path.to_str().unwrap(),
    ]));
    let csv = fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("x_nm,u_source_1,"));
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn nonpositive_width_is_a_config_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("modes.csv");
    for d in ["0", "-5"] {
        let out = gwcoupler(&["modes", "--d-nm", d, "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2));
        assert!(!path.exists());
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "d_nm = 200\nseperation_nm = 50\n").unwrap();
    let out = gwcoupler(&["modes", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        gwcoupler(&["modes", "--seperation-nm", "50"]).status.code(),
        Some(2)
    );
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "d_nm = 100\nseparation_nm = 50\n").unwrap();
    let from_flag = stdout(&gwcoupler(&[
        "modes",
        "--config",
        cfg.to_str().unwrap(),
        "--d-nm",
        "300",
    ]));
    let direct = stdout(&gwcoupler(&["modes", "--d-nm", "300"]));
    assert_eq!(from_flag, direct);
}

#[test]
fn help_lists_every_key_with_default() {
    let keys = [
        "d-nm",
        "d-drain-nm",
        "separation-nm",
        "barrier-mev",
        "v1-mev",
        "v2-mev",
        "mass-ratio",
        "electron-energy-mev",
        "k1d-over-pi",
        "mode-m",
        "mode-n",
        "transfer-order",
        "y-max-nm",
        "dy-nm",
        "propagator",
        "override-coupling",
        "d-values",
        "separation-values",
        "fixed-energy",
        "gate-offsets-mev",
        "profile-points",
    ];
    for sub in ["modes", "couple", "propagate", "switching", "sweep", "fit"] {
        let help = stdout(&gwcoupler(&[sub, "--help"]));
        for key in keys {
            let line = help
                .lines()
                .skip_while(|l| !l.contains(&format!("--{key} ")))
                .nth(1)
                .unwrap_or_else(|| panic!("{sub}: --{key} missing"));
            assert!(
                line.contains("[default:"),
                "{sub}: --{key} has no default: {line}"
            );
        }
    }
}

#[test]
fn couple_all_pairs_covers_the_mode_grid() {
    let modes = stdout(&gwcoupler(&["modes"]));
    let per_well = data_rows(&modes)
        .iter()
        .filter(|r| r[0] == "source")
        .count();
    let csv = stdout(&gwcoupler(&["couple", "--all-pairs"]));
    assert_eq!(data_rows(&csv).len(), per_well * per_well);
    let single = stdout(&gwcoupler(&["couple"]));
    assert_eq!(data_rows(&single), data_rows(&csv)[..1]);
    assert_eq!(data_rows(&single)[0][7], "true");
}

#[test]
fn propagate_trace_format() {
    let csv = stdout(&gwcoupler(&[
        "propagate",
        "--y-max-nm",
        "100",
        "--dy-nm",
        "10",
    ]));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "y_nm,p1,p2,re_a1,im_a1,re_a2,im_a2");
    assert_eq!(data_rows(&csv).len(), 11);
    assert!(summary_value(&csv, "L_nm") > 0.0);
    assert!(summary_value(&csv, "fT_hz") > 0.0);
}

#[test]
fn propagate_reaches_full_transfer_within_5000_nm() {
    let csv = stdout(&gwcoupler(&["propagate", "--y-max-nm", "5000"]));
    let best = data_rows(&csv)
        .iter()
        .map(|r| r[2].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(best > 0.999, "max p2 over (0, 5000] nm = {best}");
}

#[test]
fn propagate_full_transfer_at_reported_length() {
    let csv = stdout(&gwcoupler(&["propagate"]));
    let length = summary_value(&csv, "L_nm");
    let rows = data_rows(&csv);
    let (y, p2) = rows
        .iter()
        .map(|r| (r[0].parse::<f64>().unwrap(), r[2].parse::<f64>().unwrap()))
        .fold(
            (0.0, 0.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    assert!(p2 > 0.999, "max p2 = {p2}");
    assert!((y - length).abs() <= 1.0, "peak at {y}, L = {length}");
}

#[test]
fn second_mode_pair_transfers_faster() {
    let l11 = summary_value(
        &stdout(&gwcoupler(&["propagate", "--y-max-nm", "1"])),
        "L_nm",
    );
    let l22 = summary_value(
        &stdout(&gwcoupler(&[
            "propagate",
            "--y-max-nm",
            "1",
            "--mode-m",
            "2",
            "--mode-n",
            "2",
        ])),
        "L_nm",
    );
    assert!(l22 < l11, "L(2,2) = {l22}, L(1,1) = {l11}");
}

#[test]
fn unequal_pair_is_labelled_symmetrized() {
    let csv = stdout(&gwcoupler(&[
        "propagate",
        "--y-max-nm",
        "1",
        "--mode-n",
        "2",
    ]));
    assert!(summary(&csv).contains(&("symmetrized".into(), "true".into())));
}

#[test]
fn zero_coupling_is_a_physics_error() {
    let out = gwcoupler(&["propagate", "--override-coupling", "0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn every_propagator_is_selectable() {
    let traces: Vec<String> = ["rk4-phase", "rk4-rotating", "analytic"]
        .iter()
        .map(|p| {
            stdout(&gwcoupler(&[
                "propagate",
                "--propagator",
                p,
                "--y-max-nm",
                "2000",
            ]))
        })
        .collect();
    for t in &traces[1..] {
        for (a, b) in data_rows(&traces[0]).iter().zip(data_rows(t)) {
            let pa: f64 = a[2].parse().unwrap();
            let pb: f64 = b[2].parse().unwrap();
            assert!((pa - pb).abs() < 1e-8);
        }
    }
    assert_eq!(
        gwcoupler(&["propagate", "--propagator", "euler"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn switching_curve_starts_at_full_transfer() {
    let csv = stdout(&gwcoupler(&[
        "switching",
        "--gate-offsets-mev",
        "0:0.2:0.05",
    ]));
    let transfer: Vec<f64> = data_rows(&csv)
        .iter()
        .map(|r| r[4].parse().unwrap())
        .collect();
    assert_eq!(transfer.len(), 5);
    assert!((transfer[0] - 1.0).abs() < 1e-6);
    assert!(transfer.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn single_cell_sweep_matches_propagate_summary() {
    let sweep = stdout(&gwcoupler(&["sweep"]));
    let rows = data_rows(&sweep);
    assert_eq!(rows.len(), 1);
    let prop = stdout(&gwcoupler(&["propagate", "--y-max-nm", "1"]));
    let s = summary(&prop);
    assert_eq!(rows[0][2], s[1].1);
    assert_eq!(rows[0][3], s[0].1);
    assert_eq!(rows[0][5], "ok");
}

#[test]
fn separation_sweep_decreases_and_fits() {
    let csv = stdout(&gwcoupler(&["sweep", "--separation-values", "30:100:10"]));
    assert_eq!(
        csv.lines().next().unwrap(),
        "d_nm,D_nm,fT_hz,L_nm,Ec_meV,status"
    );
    let ft: Vec<f64> = data_rows(&csv)
        .iter()
        .map(|r| r[2].parse().unwrap())
        .collect();
    assert_eq!(ft.len(), 8);
    assert!(ft.windows(2).all(|w| w[1] < w[0]));
    assert!(summary_value(&csv, "r2") > 0.99);
    assert!(summary_value(&csv, "gamma_nm") > 0.0);
    assert!(summary_value(&csv, "omega0_nm") > 0.0);
}

#[test]
fn failed_cells_are_reported_in_band() {
    let csv = stdout(&gwcoupler(&[
        "sweep",
        "--d-values",
        "20,200",
        "--separation-values",
        "50",
        "--fixed-energy",
        "--mode-m",
        "2",
        "--mode-n",
        "2",
    ]));
    let rows = data_rows(&csv);
    assert_eq!(rows[0][5], "ModeNotFound");
    assert!(rows[0][2].is_empty() && rows[0][3].is_empty() && rows[0][4].is_empty());
    assert_eq!(rows[1][5], "ok");
}

#[test]
fn descending_axes_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    for axis in [
        ["--separation-values", "100:30:-10"],
        ["--d-values", "300,200"],
    ] {
        let out = gwcoupler(&["sweep", axis[0], axis[1], "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2));
        assert!(!path.exists());
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let runs: [&[&str]; 4] = [
        &[
            "sweep",
            "--d-values",
            "150:250:50",
            "--separation-values",
            "30:70:20",
        ],
        &[
            "sweep",
            "--d-values",
            "150:250:50",
            "--separation-values",
            "30:70:20",
            "--threads",
            "1",
        ],
        &["propagate", "--y-max-nm", "500"],
        &["switching"],
    ];
    let first = stdout(&gwcoupler(runs[0]));
    assert_eq!(first, stdout(&gwcoupler(runs[0])));
    assert_eq!(first, stdout(&gwcoupler(runs[1])));
    for args in &runs[2..] {
        assert_eq!(stdout(&gwcoupler(args)), stdout(&gwcoupler(args)));
    }
}

#[test]
fn fit_from_file_matches_fit_from_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let axis = ["--separation-values", "30:100:10"];
    stdout(&gwcoupler(&[
        "sweep",
        axis[0],
        axis[1],
        "--out",
        path.to_str().unwrap(),
    ]));
    let from_file = stdout(&gwcoupler(&["fit", "--input", path.to_str().unwrap()]));
    let direct = stdout(&gwcoupler(&["fit", axis[0], axis[1]]));
    assert_eq!(from_file, direct);
    assert!(from_file.starts_with("omega0_nm,gamma_nm,r2\n"));
}

#[test]
fn fit_needs_three_points() {
    let out = gwcoupler(&["fit", "--separation-values", "30,40"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unguided_well_is_a_physics_error() {
    let out = gwcoupler(&["modes", "--electron-energy-mev", "1000"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn energy_and_k1d_together_are_a_config_error() {
    let out = gwcoupler(&[
        "modes",
        "--electron-energy-mev",
        "501",
        "--k1d-over-pi",
        "4.96",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
