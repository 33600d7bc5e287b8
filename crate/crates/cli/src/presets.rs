//! Built-in experiments.

use crate::config::ExperimentConfig;
use crate::error::CliError;

const TABLE_DESIGN: &str = r#"[design]
n_sites = 10
coupling = 40.0
e_c = 200.0
e_j = 12500.0
boundary = "matched"
"#;

fn benchmark(observable: &str, state: &str, dir: &str) -> String {
    format!(
        r#"{TABLE_DESIGN}
[evolution]
t_max = 0.5
n_steps = 2000
method = "auto"

[experiment]
kind = "compare"
observables = ["{observable}"]
initial_state = "{state}"
cutoff = 2
boson_hamiltonian = "jja"
variant = "simplified"

[output]
dir = "out/{dir}"
"#
    )
}

pub const NAMES: [&str; 4] = ["fig2_sz", "fig2_mx", "fig2_cxx", "table1_design"];

/// TOML source of a preset.
pub fn source(name: &str) -> Result<String, CliError> {
    match name {
        "fig2_sz" => Ok(benchmark("sz1", "domain_wall", name)),
        "fig2_mx" => Ok(benchmark("mx", "all_up_x", name)),
        "fig2_cxx" => Ok(benchmark("cxx", "neel", name)),
        "table1_design" => Ok(format!(
            "{TABLE_DESIGN}\n[experiment]\nkind = \"design\"\n\n[output]\ndir = \"out/{name}\"\n"
        )),
        _ => Err(CliError::Usage(format!("unknown preset `{name}`; known: {}", NAMES.join(", ")))),
    }
}

pub fn load(name: &str) -> Result<ExperimentConfig, CliError> {
    ExperimentConfig::from_toml(&source(name)?, &format!("preset {name}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_and_validates() {
        for name in NAMES {
            load(name).unwrap().validate().unwrap();
        }
        assert!(matches!(load("fig3"), Err(CliError::Usage(_))));
    }
}
