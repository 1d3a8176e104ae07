// Driving the experiment harness from a JSON config, as the `magic-mps`
// binary does, and rendering the provenance-stamped report.
//
//     cargo run --release --example experiment_config

use magic_mps::harness::{self, Report, RunConfig};
use serde_json::{json, Map};

pub fn run(config_json: &str) -> magic_mps::Result<Report> {
    // flags override the file, which overrides the defaults
    let mut flags = Map::new();
    flags.insert("format".into(), json!("csv"));
    let config = RunConfig::layered(Some(config_json), flags)?;
    let report = harness::run(&config)?.expect("not a sample run");
    print!("{}", report.render()?);
    Ok(report)
}

fn main() -> magic_mps::Result<()> {
    run(r#"{
        "experiment": "tstate-bench",
        "n_sites": 8,
        "n_samples": 4000,
        "phi_grid": [0.0, 0.3926990816987241, 0.7853981633974483],
        "clifford_depth": 8,
        "seed": 3
    }"#)?;
    Ok(())
}
