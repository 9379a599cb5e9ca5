//! Running a JSON config through the same path as the `subell` binary.

use subelliptic::cli::{execute, parse_config, resolve, tabulate, Command, CommonArgs, RunReport};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let src = r#"{
        "geometry": {"kind": "HType7"},
        "task": {"kind": "growth", "u": "(1 + rho^2)^(-4)", "nu": 0.5},
        "sampling": {"r0": 16, "rungs": 5, "per_rung": 64}
    }"#;
    let cfg = resolve(Command::Growth, parse_config(src, "inline")?, &CommonArgs::default())?;
    let report = RunReport::new(cfg.clone(), execute(&cfg)?, None);
    print!("{}", tabulate(&report)?);
    println!("exit status {}", report.exit_status);
    Ok(())
}
