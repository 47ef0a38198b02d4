use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cpma::bench::{read_results, OutputFormat};
use cpma::grid::{load_grid, save_grid, GridFormat};
use cpma::synth;

fn cpma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpma")).args(args).output().expect("run cpma")
}

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_dataset(dir: &Path) -> PathBuf {
    let ds = dir.join("shapes");
    fs::create_dir_all(&ds).unwrap();
    save_grid(&synth::disc(40), ds.join("disc.pbm"), GridFormat::Pbm).unwrap();
    save_grid(&synth::l_shape(40), ds.join("ell.pbm"), GridFormat::Pbm).unwrap();
    ds
}

#[test]
fn skeletonize_connected_cpma() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("suite2d/disc.pbm");
    let before = fs::read(&input).unwrap();
    let out = dir.path().join("disc_skel.pbm");
    let scores = dir.path().join("scores.csv");
    let o = cpma(&["skeletonize", s(&input), "--method", "cpma", "--connect", "--output", s(&out), "--score-output", s(&scores)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let skel = load_grid(&out, GridFormat::Pbm).unwrap();
    assert_eq!(skel.components(cpma::grid::Connectivity::Full).len(), 1);
    let text = fs::read_to_string(&scores).unwrap();
    assert!(text.starts_with("x,y,z,score\n"));
    assert!(text.lines().count() > 1);
    assert_eq!(fs::read(&input).unwrap(), before, "input modified");
    assert!(String::from_utf8_lossy(&o.stdout).contains("points"));
}

#[test]
fn missing_gamma_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.pbm");
    let o = cpma(&["skeletonize", s(&fixture("suite2d/disc.pbm")), "--method", "gima", "--output", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--gamma"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unimplemented_method_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.pbm");
    let o = cpma(&["skeletonize", s(&fixture("suite2d/disc.pbm")), "--method", "poisson", "--output", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("method not implemented"), "{}", stderr(&o));
}

#[test]
fn unreadable_input_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = cpma(&["skeletonize", s(&dir.path().join("nope.pbm")), "--method", "mat", "--output", s(&dir.path().join("o.pbm"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn reconstruct_from_mat_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rec.pbm");
    let o = cpma(&["reconstruct", s(&fixture("suite2d/star.pbm")), "--method", "mat", "--output", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("jaccard\t1\n"));
}

#[test]
fn metrics_between_skeletons() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.pbm"), dir.path().join("b.pbm"));
    let input = fixture("suite2d/rectangle.pbm");
    assert!(cpma(&["skeletonize", s(&input), "--method", "mat", "--output", s(&a)]).status.success());
    assert!(cpma(&["skeletonize", s(&input), "--method", "cpma", "--output", s(&b)]).status.success());
    let o = cpma(&["metrics", s(&a), s(&b)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("hausdorff\t") && text.contains("dubuisson_jain\t"));
}

#[test]
fn noise_bench_record_count_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let ds = small_dataset(dir.path());
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = cpma(&["noise-bench", "--dataset", s(&ds), "--methods", "cpma,mat", "--levels", "1..5", "--seed", "7", "--out", s(&out)]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(String::from_utf8_lossy(&o.stdout).starts_with("method\tparams"));
        out
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let recs = read_results(&a, OutputFormat::Csv).unwrap();
    assert_eq!(recs.len(), 2 * 5 * 2 * 2);
    assert!(!dir.path().join("a.partial.csv").exists());
}

#[test]
fn rotation_bench_zero_angle_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let ds = small_dataset(dir.path());
    let out = dir.path().join("rot.json");
    let o = cpma(&["rotation-bench", "--dataset", s(&ds), "--angles", "0", "--methods", "cpma,thinning", "--format", "json", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let recs = read_results(&out, OutputFormat::Json).unwrap();
    assert_eq!(recs.len(), 2 * 2 * 2);
    assert!(recs.iter().all(|r| r.value == 0.0));
}

#[test]
fn tau_sweep_writes_jaccard_and_points() {
    let dir = tempfile::tempdir().unwrap();
    let ds = small_dataset(dir.path());
    let out = dir.path().join("sweep.csv");
    let o = cpma(&["tau-sweep", "--dataset", s(&ds), "--taus", "0.2,0.47", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read_results(&out, OutputFormat::Csv).unwrap().len(), 2 * 2 * 2);
}

#[test]
fn bench_flag_validation() {
    let dir = tempfile::tempdir().unwrap();
    let ds = small_dataset(dir.path());
    let out = dir.path().join("x.csv");
    for args in [
        vec!["noise-bench", "--dataset", s(&ds), "--methods", "gima", "--out", s(&out)],
        vec!["rotation-bench", "--dataset", s(&ds), "--angles", "120", "--out", s(&out)],
        vec!["tau-sweep", "--dataset", s(&ds), "--taus", "1.5", "--out", s(&out)],
        vec!["noise-bench", "--dataset", s(&dir.path().join("missing")), "--out", s(&out)],
    ] {
        let o = cpma(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    assert!(!out.exists());
}

#[test]
fn voxelize_cube() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cube.vox");
    let o = cpma(&["voxelize", s(&fixture("mesh/cube.ply")), "--resolution", "10", "--output", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g = load_grid(&out, GridFormat::Vox).unwrap();
    assert!((343..=1000).contains(&g.count()));
}
