use std::fs;
use std::process::{Command, Output};

fn deltares(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deltares"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn verify_small_alpha_passes() {
    let out = deltares(&["verify", "--h", "0.02", "--alpha", "0.7", "--eps", "0.3"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.starts_with("k,re_z,im_z,predicted_width,deviation,bound,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn verify_big_alpha_passes() {
    let out = deltares(&["verify", "--h", "0.02", "--alpha", "2", "--eps", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_transitional_reports_without_verdict() {
    let out = deltares(&["verify", "--h", "0.1", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|l| l.ends_with(",,")));
}

#[test]
fn negative_h_is_invalid() {
    let out = deltares(&["verify", "--h", "-1", "--alpha", "0.7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("h must be positive"));
}

#[test]
fn malformed_arguments_are_invalid() {
    assert_eq!(deltares(&["compute", "--h", "0.1"]).status.code(), Some(2));
    assert_eq!(deltares(&["figure", "--id", "4"]).status.code(), Some(2));
    assert_eq!(
        deltares(&["compute", "--h", "0.1", "--alpha", "2", "--window", "1,2,3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        deltares(&["compute", "--h", "0.1", "--alpha", "2", "--window", "2,1,-1,0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        deltares(&["coeffs", "--max-weight", "41"]).status.code(),
        Some(2)
    );
}

#[test]
fn compute_is_byte_identical_across_runs() {
    let args = ["compute", "--h", "0.05", "--alpha", "0.7"];
    let a = deltares(&args);
    let b = deltares(&args);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn compute_rows_are_ordered_and_typed() {
    let out = deltares(&["compute", "--h", "0.1", "--alpha", "2"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,re_z_series,im_z_series,re_z_refined,im_z_refined,residual_refined,in_annulus"
    );
    let ks: Vec<i64> = lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            assert_eq!(cells.len(), 7);
            assert!(cells[6] == "true" || cells[6] == "false");
            let im: f64 = cells[4].parse().unwrap();
            assert!(im < 0.0);
            cells[0].parse().unwrap()
        })
        .collect();
    assert!(ks.windows(2).all(|w| w[0] < w[1]));
    assert!(!ks.contains(&0));
}

#[test]
fn compute_window_filters_rows() {
    let out = deltares(&[
        "compute",
        "--h",
        "0.1",
        "--alpha",
        "0.7",
        "--window",
        "0.2,2,-0.25,0",
    ]);
    assert_eq!(stdout(&out).lines().count(), 1 + 6);
}

#[test]
fn json_output_wraps_params() {
    let out = deltares(&["verify", "--h", "0.05", "--alpha", "2", "--format", "json"]);
    let text = stdout(&out);
    assert!(text.contains("\"params\""));
    assert!(text.contains("\"regime\": \"big_alpha\""));
    assert!(text.contains("\"rows\""));
}

#[test]
fn figure_writes_three_tables() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let out = deltares(&["figure", "--id", "2", "--grid", "400,200", "--out", path]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let read = |name: &str| fs::read_to_string(dir.path().join(name)).unwrap();

    let contours = read("fig2_contours.csv");
    assert!(contours.starts_with("curve_id,field,point_index,re_z,im_z\n"));
    assert!(contours.contains(",re,") && contours.contains(",im,"));

    let resonances = read("fig2_resonances.csv");
    assert_eq!(resonances.lines().count(), 1 + 6);

    let curves = read("fig2_curves.csv");
    assert!(curves.starts_with("curve_id,re_z,neg_im_z\n"));
    assert!(curves.lines().skip(1).all(|l| l.starts_with("quad_width,")));
}

#[test]
fn transitional_figure_has_both_curves() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let out = deltares(&[
        "figure", "--id", "3", "--grid", "300,150", "--format", "json", "--out", path,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let curves = fs::read_to_string(dir.path().join("fig3_curves.json")).unwrap();
    assert!(curves.contains("\"log_width\"") && curves.contains("\"quad_width\""));
    assert!(dir.path().join("fig3_contours.json").exists());
}

#[test]
fn figure_output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = deltares(&[
            "figure",
            "--id",
            "1",
            "--grid",
            "300,150",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    for name in [
        "fig1_contours.csv",
        "fig1_resonances.csv",
        "fig1_curves.csv",
    ] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
    }
}

#[test]
fn wdump_lists_branches() {
    let out = deltares(&["wdump", "--h", "0.1", "--alpha", "0.7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("k,re_w,im_w,abs_remainder,tail_bound,max_j,max_m\n"));
    assert!(text.lines().count() > 10);
}

#[test]
fn coeffs_triangle() {
    let out = deltares(&["coeffs", "--max-weight", "4"]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 10);
    assert!(text.contains("\n0,4,1,4,2.5000000000000000e-1\n"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("res.csv");
    let out = deltares(&[
        "compute",
        "--h",
        "0.1",
        "--alpha",
        "2",
        "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(fs::read_to_string(file).unwrap().starts_with("k,"));
}
