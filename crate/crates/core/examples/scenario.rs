//! Run a JSON scenario from code, as the `fnls-lab` binary does.

use fnls_lab::scenario::{run_scenario, RunOptions, ScenarioConfig};

fn main() -> fnls_lab::Result<()> {
    let cfg = ScenarioConfig::from_json(
        r#"{
            "kind": "balakrishnan-check",
            "params": { "s": 0.75, "p": 3.0, "sign": "focusing" },
            "grid": { "d": 1, "n": 1024, "l": 64.0 },
            "initial": { "type": "gaussian", "amplitude": 1.0, "width": 1.0 },
            "checks": { "quad_nodes": 200, "commutator_radii": [2.0, 4.0, 8.0, 16.0] }
        }"#,
    )?;
    let out = std::env::temp_dir().join("fnls_scenario_example");
    let report = run_scenario(
        &cfg,
        &RunOptions {
            out: Some(out.clone()),
            ..Default::default()
        },
    )?;
    for r in &report.diagnostics {
        println!("{:<24} {:>11.3e}  pass={}", r.name, r.value, r.pass);
    }
    println!(
        "exit code {} ; files in {}",
        report.exit_code,
        out.display()
    );
    Ok(())
}
