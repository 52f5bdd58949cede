//! Runs every stage end to end on the mock scorer and writes the artifacts.
//!
//!     cargo run --example mock_pipeline -- [out_dir] [seed]

use std::path::PathBuf;

use zoomlens::pipeline::run_demo;

fn main() -> zoomlens::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "demo_out".into()));
    let seed = args.next().map(|s| s.parse().expect("seed must be an integer")).unwrap_or(0);
    let summary = run_demo(seed, &out)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}
