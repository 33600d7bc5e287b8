//! Experiment configuration files.
//!
//! TOML with `[model]`, `[circuit]`, `[design]`, `[evolution]`,
//! `[experiment]` and `[output]` sections. A `.json` file with the same
//! layout is accepted too.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spinbridge::dynamics::EvolutionConfig;
use spinbridge::mapping::{
    coupling_josephson_from_simplified, design_circuit, exact_coupling_energy, DesignAnchors, DesignTarget,
};
use spinbridge::operators::{JjaVariant, ObservableKind};
use spinbridge::{BoundaryLinks, CircuitSpec, InitialState, SpinModelSpec};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignSection>,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Heisenberg chain given directly. `couplings` and `fields`, when present,
/// override the homogeneous values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub n_sites: usize,
    #[serde(default)]
    pub coupling: f64,
    #[serde(default)]
    pub field: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<f64>>,
}

/// Homogeneous junction array, MHz. `e_prime_j` may instead be derived from
/// `e_coup_simplified`; `e_coup` defaults to the exact matching value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSection {
    pub n_sites: usize,
    pub e_c: f64,
    pub e_j: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_prime_j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_coup_simplified: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_coup: Option<f64>,
    #[serde(default)]
    pub boundary: BoundaryLinks,
}

/// Inverse design from a target coupling (and optionally a bulk field).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    pub n_sites: usize,
    pub coupling: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<f64>,
    pub e_c: f64,
    pub e_j: f64,
    #[serde(default)]
    pub boundary: BoundaryLinks,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Spin,
    Boson,
    Jja,
    Compare,
    Design,
    Verify,
}

impl Kind {
    pub fn evolves(&self) -> bool {
        matches!(self, Self::Spin | Self::Boson | Self::Jja | Self::Compare)
    }
}

/// Boson-side Hamiltonian for `boson`, `compare` and `verify` runs. `auto`
/// picks the array Hamiltonian when a circuit is configured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BosonHamiltonian {
    #[default]
    Auto,
    Ebh,
    Jja,
}

fn all_observables() -> Vec<ObservableKind> {
    ObservableKind::ALL.to_vec()
}

fn default_state() -> InitialState {
    InitialState::DomainWall
}

fn default_cutoff() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: Kind,
    #[serde(default = "all_observables")]
    pub observables: Vec<ObservableKind>,
    #[serde(default = "default_state")]
    pub initial_state: InitialState,
    /// Local boson dimension.
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
    #[serde(default)]
    pub boson_hamiltonian: BosonHamiltonian,
    #[serde(default)]
    pub variant: JjaVariant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Significant digits of every printed number.
    pub precision: usize,
    /// Write `<observable>_<sector>.dat` series files.
    pub plot_data: bool,
    /// Write the Hamiltonians as sparse triplets (verify runs).
    pub dump_matrices: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), precision: 12, plot_data: true, dump_matrices: false }
    }
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
            CliError::Parse { origin: origin.to_string(), line, column, message: e.message().to_string() }
        })
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Reads a config file, choosing the format from the extension.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let origin = path.display().to_string();
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text, &origin),
            _ => Self::from_toml(&text, &origin),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything that can be checked before building operators.
    pub fn validate(&self) -> Result<(), CliError> {
        let exp = &self.experiment;
        if exp.cutoff < 2 {
            return Err(CliError::Validation(format!("cutoff must be at least 2, got {}", exp.cutoff)));
        }
        if !(1..=17).contains(&self.output.precision) {
            return Err(CliError::Validation(format!(
                "output precision must be 1..=17 digits, got {}",
                self.output.precision
            )));
        }
        if self.circuit.is_some() && self.design.is_some() {
            return Err(CliError::Validation("give either [circuit] or [design], not both".into()));
        }
        if exp.kind.evolves() {
            self.evolution.validate()?;
        }
        let has_circuit = self.circuit.is_some() || self.design.is_some();
        let needs_circuit = match exp.kind {
            Kind::Jja | Kind::Design => true,
            Kind::Boson | Kind::Compare | Kind::Verify => exp.boson_hamiltonian == BosonHamiltonian::Jja,
            Kind::Spin => false,
        };
        if needs_circuit && !has_circuit {
            return Err(CliError::Validation(format!(
                "kind {:?} needs a [circuit] or [design] section",
                exp.kind
            )));
        }
        if !has_circuit && self.model.is_none() {
            return Err(CliError::Validation("no [model], [circuit] or [design] section".into()));
        }
        Ok(())
    }

    /// The circuit described by `[circuit]` or designed by `[design]`.
    pub fn circuit(&self) -> Result<Option<CircuitSpec>, CliError> {
        if let Some(c) = &self.circuit {
            let e_prime = match (c.e_prime_j, c.e_coup_simplified) {
                (Some(e), None) => e,
                (None, Some(x)) => coupling_josephson_from_simplified(c.e_c, c.e_j, x)?,
                (Some(_), Some(_)) => {
                    return Err(CliError::Validation("give either e_prime_j or e_coup_simplified, not both".into()))
                }
                (None, None) => return Err(CliError::Validation("circuit needs e_prime_j or e_coup_simplified".into())),
            };
            let e_coup = c.e_coup.unwrap_or_else(|| exact_coupling_energy(e_prime, c.e_c, c.e_j + 2.0 * e_prime));
            let spec = CircuitSpec::homogeneous(c.n_sites, c.e_c, c.e_j, e_prime, e_coup, c.boundary)?;
            return Ok(Some(spec));
        }
        if let Some(d) = &self.design {
            let target = DesignTarget { n_sites: d.n_sites, coupling: d.coupling, field: d.field };
            let anchors = DesignAnchors { e_c: d.e_c, e_j: d.e_j };
            return Ok(Some(design_circuit(&target, &anchors, d.boundary)?));
        }
        Ok(None)
    }

    /// The explicit `[model]`, if any.
    pub fn model(&self) -> Result<Option<SpinModelSpec>, CliError> {
        let Some(m) = &self.model else { return Ok(None) };
        let couplings = m.couplings.clone().unwrap_or_else(|| vec![m.coupling; m.n_sites.saturating_sub(1)]);
        let fields = m.fields.clone().unwrap_or_else(|| vec![m.field; m.n_sites]);
        if fields.len() != m.n_sites || couplings.len() + 1 != m.n_sites.max(1) {
            return Err(CliError::Validation(format!(
                "model with {} sites needs {} fields and {} couplings",
                m.n_sites,
                m.n_sites,
                m.n_sites.saturating_sub(1)
            )));
        }
        Ok(Some(SpinModelSpec::chain_with(&couplings, &fields)?))
    }
}
