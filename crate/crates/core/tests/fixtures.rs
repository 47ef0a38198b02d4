use std::fs;
use std::path::Path;

use cpma::bench::load_item;
use cpma::synth;

fn root() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures"))
}

#[test]
fn committed_fixtures_match_generator() {
    for (rel, bytes) in synth::fixture_files().unwrap() {
        let on_disk = fs::read(root().join(&rel)).unwrap_or_else(|e| panic!("{rel}: {e}"));
        assert!(on_disk == bytes, "{rel} is stale; rerun `cargo run --example gen_fixtures`");
    }
}

#[test]
fn fixtures_load_to_generated_shapes() {
    for (name, g) in synth::suite_2d(synth::SUITE_2D_SIZE) {
        let loaded = load_item(&root().join(format!("suite2d/{name}.pbm")), 64).unwrap();
        assert_eq!(loaded, g, "{name}");
    }
    for (name, g) in synth::suite_3d(synth::SUITE_3D_SIZE) {
        let loaded = load_item(&root().join(format!("suite3d/{name}.vox")), 64).unwrap();
        assert_eq!(loaded, g, "{name}");
    }
}

#[test]
fn voxelized_cube_mesh_is_a_block() {
    let g = load_item(&root().join("suite3d/cube_mesh.ply"), 10).unwrap();
    let n = g.count();
    assert!((343..=1000).contains(&n), "{n}");
    assert_eq!(g.components(cpma::grid::Connectivity::Full).len(), 1);
}
