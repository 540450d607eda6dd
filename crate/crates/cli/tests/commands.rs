use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gyroprior::frames::FrameDir;
use gyroprior::profiles::read_calibration;
use gyroprior::tables::{read_trajectory, read_truth};
use gyroprior_core::tracker::FeatureStatus;
use gyroprior_core::Mat3;

fn gyroprior(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gyroprior")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = gyroprior(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    gyroprior(args).status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Renders a scene into `dir/name` and returns that directory.
fn synth(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut args = vec!["synth", "--out", s(&out)];
    args.extend_from_slice(extra);
    ok(&args);
    out
}

fn seq_args<'a>(frames: &'a str, gyro: &'a str, calib: &'a str) -> [&'a str; 6] {
    ["--frames", frames, "--gyro", gyro, "--calib", calib]
}

#[test]
fn synth_writes_a_complete_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "seq", &["--count", "6", "--features", "5"]);
    for f in ["gyro.csv", "calib.txt", "truth.csv", "homographies.csv", "scene.txt", "frames/timestamps.csv"] {
        assert!(seq.join(f).exists(), "{f}");
    }
    assert_eq!(FrameDir::open(&seq.join("frames"), 30.0).unwrap().len(), 6);
    let truth = read_truth(&seq.join("truth.csv")).unwrap();
    assert_eq!(truth.tracks().len(), 5);
}

#[test]
fn plain_tracking_of_a_static_scene_stays_put() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "still", &["--count", "10", "--wobble", "0", "--roll", "0"]);
    let out = dir.path().join("track");
    let stdout = ok(&["track", "--frames", s(&seq.join("frames")), "--variant", "descent-plain", "--max-features", "30", "--out", s(&out)]);
    assert!(stdout.contains("fps = "), "{stdout}");
    let rows = read_trajectory(&out.join("trajectory.csv")).unwrap();
    let start: HashMap<u64, _> = rows.iter().filter(|r| r.frame == 0).map(|r| (r.feature_id, r.position)).collect();
    assert!(start.len() >= 10, "detector found {} features", start.len());
    // Features whose search window crosses the border are dropped, but
    // nothing moves while it is tracked.
    for r in &rows {
        assert!((r.position - start[&r.feature_id]).norm() < 0.1, "{r:?}");
    }
    let kept = rows.iter().filter(|r| r.frame == 9 && r.status == FeatureStatus::Active).count();
    assert!(kept * 5 >= start.len() * 4, "{kept} of {} kept", start.len());
}

#[test]
fn gyro_prior_tracking_follows_a_rotating_scene() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "rot", &["--count", "30", "--wobble", "0.2", "--features", "12"]);
    let (frames, gyro, calib, truth) =
        (seq.join("frames"), seq.join("gyro.csv"), seq.join("calib.txt"), seq.join("truth.csv"));
    let out = dir.path().join("track");
    let mut args = vec!["track", "--variant", "descent-gyro-prior", "--truth", s(&truth), "--out", s(&out)];
    args.extend_from_slice(&seq_args(s(&frames), s(&gyro), s(&calib)));
    ok(&args);
    let truth = read_truth(&truth).unwrap();
    let rows = read_trajectory(&out.join("trajectory.csv")).unwrap();
    let mut checked = 0;
    for r in rows.iter().filter(|r| r.status == FeatureStatus::Active) {
        if let Some(t) = truth.track(r.feature_id).and_then(|t| t.at(r.frame)) {
            assert!((r.position - t).norm() < 1.0, "{r:?} vs {t:?}");
            checked += 1;
        }
    }
    assert!(checked > 12 * 20, "only {checked} rows compared");
}

#[test]
fn gyro_variant_without_gyro_is_a_config_error_with_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "seq", &["--count", "3"]);
    let out = dir.path().join("never");
    let frames = seq.join("frames");
    assert_eq!(code(&["track", "--frames", s(&frames), "--variant", "descent-gyro-prior", "--out", s(&out)]), 2);
    assert!(!out.exists());
}

#[test]
fn exit_codes_separate_config_data_and_processing_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&["track", "--no-such-flag"]), 2);
    assert_eq!(code(&["track", "--frames", s(&dir.path().join("missing")), "--out", s(dir.path())]), 2);

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "t,rx,ry,rz\n0.0,1,2\n").unwrap();
    assert_eq!(code(&["debias", "--gyro", s(&bad), "--out", s(&dir.path().join("o"))]), 3);

    // Rolling only: the calibration system cannot be solved.
    let seq = synth(dir.path(), "roll", &["--count", "8", "--wobble", "0", "--roll", "0.5"]);
    let (frames, gyro, homs, out) =
        (seq.join("frames"), seq.join("gyro.csv"), seq.join("homographies.csv"), dir.path().join("cal"));
    let args = ["calibrate-kmat", "--frames", s(&frames), "--gyro", s(&gyro), "--homographies", s(&homs), "--out", s(&out)];
    assert_eq!(code(&args), 4);
}

#[test]
fn calibration_recovers_the_generating_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "seq", &["--count", "12", "--wobble", "0.4", "--roll", "0.3"]);
    let out = dir.path().join("cal");
    ok(&[
        "calibrate-kmat",
        "--frames",
        s(&seq.join("frames")),
        "--gyro",
        s(&seq.join("gyro.csv")),
        "--homographies",
        s(&seq.join("homographies.csv")),
        "--out",
        s(&out),
    ]);
    let truth = read_calibration(&seq.join("calib.txt")).unwrap();
    let got = read_calibration(&out.join("calib.txt")).unwrap();
    let err: Mat3 = got.k_tilde - truth.k_tilde;
    assert!(err.abs().max() < 1e-6, "{err}");
}

#[test]
fn latency_is_recovered_from_ground_truth_flow() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "seq", &["--count", "90", "--wobble", "0.3", "--latency", "0.1", "--features", "8"]);
    let stdout = ok(&[
        "estimate-latency",
        "--frames",
        s(&seq.join("frames")),
        "--gyro",
        s(&seq.join("gyro.csv")),
        "--trajectory",
        s(&seq.join("truth.csv")),
    ]);
    let latency: f64 = stdout.trim().strip_prefix("latency = ").unwrap().parse().unwrap();
    assert!((latency - 0.1).abs() < 1e-9, "{stdout}");
}

#[test]
fn debias_estimates_the_offset_from_the_still_lead_in() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "seq", &["--count", "5", "--gyro-bias", "0.01,-0.02,0.005"]);
    let out = dir.path().join("db");
    let stdout = ok(&["debias", "--gyro", s(&seq.join("gyro.csv")), "--calib", s(&seq.join("calib.txt")), "--out", s(&out)]);
    let cal = read_calibration(&out.join("calib.txt")).unwrap();
    assert!((cal.bias - gyroprior_core::Vec3::new(0.01, -0.02, 0.005)).norm() < 1e-12, "{stdout}");
    let corrected = gyroprior::tables::read_gyro(&out.join("gyro.csv")).unwrap();
    assert!(corrected.samples()[0].rate.norm() < 1e-12);
}

#[test]
fn predicted_points_follow_the_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "seq", &["--count", "10", "--features", "4"]);
    let truth = read_truth(&seq.join("truth.csv")).unwrap();
    let points = dir.path().join("points.csv");
    let mut text = String::from("feature_id,x,y\n");
    for t in truth.tracks() {
        let p = t.at(0).unwrap();
        text.push_str(&format!("{},{},{}\n", t.id, p.x, p.y));
    }
    std::fs::write(&points, text).unwrap();
    let out = dir.path().join("pf");
    ok(&[
        "predict-flow",
        "--frames",
        s(&seq.join("frames")),
        "--gyro",
        s(&seq.join("gyro.csv")),
        "--calib",
        s(&seq.join("calib.txt")),
        "--points",
        s(&points),
        "--out",
        s(&out),
    ]);
    let rows = read_trajectory(&out.join("predicted.csv")).unwrap();
    assert_eq!(rows.len(), 4 * 10);
    let mut compared = 0;
    for r in rows {
        if let Some(t) = truth.track(r.feature_id).unwrap().at(r.frame) {
            assert!((r.position - t).norm() < 1e-3, "{r:?}");
            compared += 1;
        }
    }
    assert!(compared > 20);
    let h = gyroprior::tables::read_homographies(&out.join("homographies.csv")).unwrap();
    assert_eq!(h.len(), 9);
}

#[test]
fn identity_degradation_reproduces_the_input_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "seq", &["--count", "3", "--scene", "noise"]);
    let out = dir.path().join("deg");
    ok(&["degrade", "--frames", s(&seq.join("frames")), "--preset", "identity", "--out", s(&out)]);
    for k in 0..3 {
        let name = format!("frame_{k:06}.pgm");
        assert_eq!(std::fs::read(seq.join("frames").join(&name)).unwrap(), std::fs::read(out.join(&name)).unwrap());
    }
}

#[test]
fn seeded_degradation_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "seq", &["--count", "2"]);
    let frames = seq.join("frames");
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        ok(&["degrade", "--frames", s(&frames), "--preset", "high", "--seed", seed, "--out", s(&out)]);
        std::fs::read(out.join("frame_000001.pgm")).unwrap()
    };
    let a = run("a", "5");
    assert_eq!(a, run("b", "5"));
    assert_ne!(a, run("c", "6"));
}

#[test]
fn degrade_refuses_to_write_over_its_input() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "seq", &["--count", "2"]);
    let frames = seq.join("frames");
    let before = std::fs::read(frames.join("frame_000000.pgm")).unwrap();
    assert_eq!(code(&["degrade", "--frames", s(&frames), "--preset", "high", "--out", s(&frames)]), 2);
    assert_eq!(before, std::fs::read(frames.join("frame_000000.pgm")).unwrap());
}

#[test]
fn evaluating_the_truth_reports_no_losses() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "seq", &["--count", "20", "--features", "6"]);
    let out = dir.path().join("ev");
    let truth = seq.join("truth.csv");
    let stdout = ok(&["eval", "--truth", s(&truth), "--trajectory", s(&truth), "--out", s(&out)]);
    let report = std::fs::read_to_string(out.join("report.csv")).unwrap();
    let mut lines = report.lines();
    assert_eq!(lines.next().unwrap(), "sequence,tracker,lambda,frames,segments,losses,mean_track_length");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[5], "0", "{stdout}");
    let t = read_truth(&truth).unwrap();
    let lifespans: Vec<usize> = t.tracks().iter().map(|tr| (0..20).filter(|&k| tr.at(k).is_some()).count()).collect();
    let mean = lifespans.iter().sum::<usize>() as f64 / lifespans.len() as f64;
    assert_eq!(row[4], lifespans.len().to_string());
    assert_eq!(row[6], format!("{mean:.4}"));
}

#[test]
fn eval_runs_every_available_variant() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "seq", &["--count", "8", "--features", "6"]);
    let out = dir.path().join("ev");
    let frames = seq.join("frames");
    let stdout = ok(&[
        "eval",
        "--frames",
        s(&frames),
        "--gyro",
        s(&seq.join("gyro.csv")),
        "--calib",
        s(&seq.join("calib.txt")),
        "--truth",
        s(&seq.join("truth.csv")),
        "--out",
        s(&out),
    ]);
    for v in ["descent-plain", "descent-gyro-init", "descent-gyro-prior", "multi-gyro-prior"] {
        assert!(stdout.contains(v), "{stdout}");
    }
    assert!(stdout.contains("rotation rate"));

    let no_gyro = dir.path().join("ev2");
    let stdout = ok(&["eval", "--frames", s(&frames), "--truth", s(&seq.join("truth.csv")), "--out", s(&no_gyro)]);
    assert!(stdout.contains("descent-plain") && !stdout.contains("multi-gyro-prior"), "{stdout}");
    assert!(stdout.contains("skipped"));
}

#[test]
fn learn_reports_one_row_per_variant() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "a", &["--count", "6", "--features", "4"]);
    let b = synth(dir.path(), "b", &["--count", "6", "--features", "4", "--scene", "noise"]);
    let out = dir.path().join("learn");
    ok(&["learn", "--training", s(&a), "--training", s(&b), "--variant", "descent-gyro-prior", "--grid", "0.01,0", "--out", s(&out)]);
    let text = std::fs::read_to_string(out.join("learned.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    // Perfect tracking on both: the tie goes to the smaller weight.
    assert!(lines[1].starts_with("descent-gyro-prior,0,6.0000"), "{text}");
}

#[test]
fn overlay_of_an_empty_trajectory_is_the_input_in_color() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "seq", &["--count", "2", "--width", "240", "--height", "200"]);
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "frame,feature_id,x,y,status\n").unwrap();
    let out = dir.path().join("ov");
    ok(&["overlay", "--frames", s(&seq.join("frames")), "--trajectory", s(&empty), "--out", s(&out)]);
    let gray = gyroprior::pnm::read_gray(&seq.join("frames/frame_000001.pgm")).unwrap();
    let color = image::open(out.join("frame_000001.ppm")).unwrap().to_rgb8();
    for (x, y, p) in color.enumerate_pixels() {
        let v = gray.pixel(x as usize, y as usize) as u8;
        assert_eq!(p.0, [v, v, v]);
    }
}

#[test]
fn overlay_draws_tracks_and_links_to_truth() {
    let dir = tempfile::tempdir().unwrap();
    let seq = synth(dir.path(), "seq", &["--count", "1", "--features", "1"]);
    let truth = read_truth(&seq.join("truth.csv")).unwrap();
    let t = truth.tracks()[0].at(0).unwrap().map(f64::round);
    let traj = dir.path().join("t.csv");
    std::fs::write(&traj, format!("frame,feature_id,x,y,status\n0,0,{},{},active\n0,99,10,10,active\n", t.x - 5.0, t.y)).unwrap();
    let out = dir.path().join("ov");
    let res = gyroprior(&[
        "overlay",
        "--frames",
        s(&seq.join("frames")),
        "--trajectory",
        s(&traj),
        "--truth",
        s(&seq.join("truth.csv")),
        "--out",
        s(&out),
    ]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("99"));
    let img = image::open(out.join("frame_000000.ppm")).unwrap().to_rgb8();
    let red = [255, 0, 0];
    let (tx, ty) = (t.x as u32, t.y as u32);
    assert_eq!(img.get_pixel(tx - 5, ty).0, red);
    assert_eq!(img.get_pixel(tx, ty).0, red);
    assert_eq!(img.get_pixel(tx + 5, ty).0, [0, 255, 0]);
    assert_eq!(img.get_pixel(6, 10).0, red);
}

#[test]
fn config_file_drives_commands_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "scene.frames = 5\nscene.kind = noise\nscene.width = 240\nscene.height = 200\n").unwrap();
    let out = dir.path().join("seq");
    ok(&["synth", "--config", s(&cfg), "--count", "3", "--out", s(&out)]);
    assert_eq!(FrameDir::open(&out.join("frames"), 30.0).unwrap().len(), 3);
    let saved = std::fs::read_to_string(out.join("scene.txt")).unwrap();
    assert!(saved.contains("scene.kind = noise") && saved.contains("scene.frames = 3"));

    // The echoed config regenerates the same sequence.
    let again = dir.path().join("again");
    ok(&["synth", "--config", s(&out.join("scene.txt")), "--out", s(&again)]);
    assert_eq!(std::fs::read(out.join("frames/frame_000002.pgm")).unwrap(), std::fs::read(again.join("frames/frame_000002.pgm")).unwrap());

    std::fs::write(&cfg, "scene.frames = 5\nscene.colour = red\n").unwrap();
    assert_eq!(code(&["synth", "--config", s(&cfg), "--out", s(&dir.path().join("x"))]), 2);
}
