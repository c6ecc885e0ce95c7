//! Compile the bundled urban scenario: parse and validate the YAML, expand
//! the X2 mesh, place UEs, and emit the long-form configuration.
//!
//! ```text
//! cargo run --example compile_scenario [path/to/scenario.yaml]
//! ```

use std::path::PathBuf;

use ranforge::scenario::{emit_config, expand_x2, parse_scenario};
use ranforge::Deployment;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/urban_embb.yaml"));
    let yaml = std::fs::read_to_string(&path)?;
    let spec = parse_scenario(&yaml)?;
    let seed = spec.seed.unwrap_or(1);

    let plan = expand_x2(&spec);
    let deployment = Deployment::generate(&spec, seed, 0);
    let config = emit_config(&spec, &plan, &deployment, seed);

    println!("scenario      {}", path.display());
    println!("environment   {}", spec.environment);
    println!("sites/cells   {}/{}", spec.sites.len(), spec.cell_count());
    println!("UEs           {}", deployment.ues.len());
    println!("X2 links      {}", plan.links.len());
    println!("ports, site 0 {:?}", &plan.port_map[0][..plan.port_map[0].len().min(4)]);
    println!("YAML lines    {}", yaml.lines().count());
    println!("config lines  {}", config.lines().count());
    println!();
    for line in config.lines().skip_while(|l| *l != "[Cell 0]").take(10) {
        println!("  {line}");
    }

    // an invalid edit is reported with the offending key path
    let broken = yaml.replace("per_sector: 10", "per_sector: ten");
    if let Err(e) = parse_scenario(&broken) {
        println!("\nbroken copy -> {e}");
    }
    Ok(())
}
