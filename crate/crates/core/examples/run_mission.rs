//! Runs a scenario file and prints the run report.
//!
//! cargo run --release --example run_mission -- data/three_fires.scn /tmp/out

use embr::sim::{run_scenario, Scenario};
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let mut args = std::env::args().skip(1);
    let scn = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/three_fires.scn").into());
    let out: PathBuf = args.next().map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("embr_mission"));
    let scenario = Scenario::load(&scn)?;
    let report = run_scenario(&scenario, &out, None)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    println!("logs in {}", out.display());
    Ok(())
}
