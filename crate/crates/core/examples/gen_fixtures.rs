//! Regenerates the committed fixture suite.
//!
//! ```text
//! cargo run --example gen_fixtures [-- <output dir>]
//! ```

use std::path::PathBuf;

fn main() -> anyhow::Result<()> {
    let root = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    cpma::synth::write_fixtures(&root)?;
    println!("wrote fixtures to {}", root.display());
    Ok(())
}
