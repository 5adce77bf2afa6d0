//! The full storage-ratio/request-count sweep, written as CSV plus the two
//! aggregated tables the `figures` command produces.
//!
//! Run with `cargo run --release --example experiment_sweep [OUT_DIR]`.

use std::path::PathBuf;

use social_cache::cli::{cmd_figures, cmd_run};

fn main() {
    let out_dir = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("social-cache-sweep"), PathBuf::from);
    std::fs::create_dir_all(&out_dir).unwrap();
    let csv = out_dir.join("results.csv");
    let mut stdout = std::io::stdout();
    cmd_run(None, &csv, None, &mut stdout).expect("sweep runs");
    cmd_figures(&csv, &out_dir, &mut stdout).expect("tables written");
}
