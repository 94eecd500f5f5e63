//! Drive a sweep from a TOML configuration without going through the
//! binary, and print the resulting CSV.

use helmcert::cli::{run, Command, ExperimentConfig};

const CONFIG: &str = r#"
k = [0.5, 1.0, 2.0]
seed = 1

[surface]
kind = "sphere"
radius = 1.0

[impedance]
gamma = "1 + i"

[resolution]
grid = [24, 48]
sphere = [48, 96]
"#;

fn main() -> helmcert::Result<()> {
    let prepared = ExperimentConfig::from_toml_str(CONFIG)?.prepare()?;
    for out in run(Command::Sweep, &prepared)? {
        if out.name.ends_with(".csv") {
            print!("{}", out.contents);
        }
    }
    Ok(())
}
