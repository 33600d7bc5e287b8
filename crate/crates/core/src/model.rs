//! Declarative descriptions of the spin model and of the Josephson junction
//! array.
//!
//! Sites are 0-indexed. A circuit with `N` sites has `N + 1` links: link `0`
//! ties site `0` to ground, link `i` (for `0 < i < N`) joins sites `i - 1`
//! and `i`, and link `N` ties site `N - 1` to ground.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A coupling `J_jk` between sites `j < k`, in MHz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub j: usize,
    pub k: usize,
    pub coupling: f64,
}

/// Heisenberg model `-sum J_jk S_j.S_k + sum h_j S^z_j`.
///
/// Positive couplings are ferromagnetic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinModelSpec {
    pub n_sites: usize,
    pub edges: Vec<Edge>,
    pub fields: Vec<f64>,
}

impl SpinModelSpec {
    /// Homogeneous open chain with nearest-neighbour coupling `coupling` and
    /// uniform field `field`.
    pub fn chain(n_sites: usize, coupling: f64, field: f64) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidSpec("chain needs at least one site".into()));
        }
        if !coupling.is_finite() || !field.is_finite() {
            return Err(Error::InvalidSpec("coupling and field must be finite".into()));
        }
        let edges = (0..n_sites - 1)
            .map(|j| Edge { j, k: j + 1, coupling })
            .collect();
        Ok(Self { n_sites, edges, fields: vec![field; n_sites] })
    }

    /// Open chain with per-bond couplings and per-site fields.
    pub fn chain_with(couplings: &[f64], fields: &[f64]) -> Result<Self> {
        if fields.is_empty() || couplings.len() + 1 != fields.len() {
            return Err(Error::InvalidSpec(format!(
                "a chain of {} sites needs {} couplings, got {}",
                fields.len(),
                fields.len().saturating_sub(1),
                couplings.len()
            )));
        }
        let edges = couplings
            .iter()
            .enumerate()
            .map(|(j, &coupling)| Edge { j, k: j + 1, coupling })
            .collect();
        Ok(Self { n_sites: fields.len(), edges, fields: fields.to_vec() })
    }

    /// Bond couplings when the edges form exactly the open chain
    /// `(0,1), (1,2), ...` in order; `None` for any other topology.
    pub fn chain_couplings(&self) -> Option<Vec<f64>> {
        if self.edges.len() + 1 != self.n_sites {
            return None;
        }
        self.edges
            .iter()
            .enumerate()
            .map(|(b, e)| (e.j == b && e.k == b + 1).then_some(e.coupling))
            .collect()
    }

    pub fn is_chain(&self) -> bool {
        self.chain_couplings().is_some()
    }

    /// Fails with the first fatal violation, if any.
    pub fn ensure_valid(&self) -> Result<()> {
        self.validate().into_result()
    }
}

/// How the two grounded end links of a homogeneous array are populated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryLinks {
    /// End links carry no energy.
    #[default]
    Grounded,
    /// End links carry the same energies as the interior links, so every site
    /// sees the same inductive energy.
    Matched,
}

/// Josephson junction array, energies in MHz.
///
/// Per site: charging energy `e_c` and Josephson energy `e_j`. Per link
/// (`n_sites + 1` entries): coupling Josephson energy `e_prime_j` and
/// capacitive coupling energy `e_coup`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub e_c: Vec<f64>,
    pub e_j: Vec<f64>,
    pub e_prime_j: Vec<f64>,
    pub e_coup: Vec<f64>,
}

impl CircuitSpec {
    pub fn homogeneous(
        n_sites: usize,
        e_c: f64,
        e_j: f64,
        e_prime_j: f64,
        e_coup: f64,
        boundary: BoundaryLinks,
    ) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidSpec("circuit needs at least one site".into()));
        }
        let mut e_prime = vec![e_prime_j; n_sites + 1];
        let mut coup = vec![e_coup; n_sites + 1];
        if boundary == BoundaryLinks::Grounded {
            for link in [0, n_sites] {
                e_prime[link] = 0.0;
                coup[link] = 0.0;
            }
        }
        Ok(Self {
            e_c: vec![e_c; n_sites],
            e_j: vec![e_j; n_sites],
            e_prime_j: e_prime,
            e_coup: coup,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.e_c.len()
    }

    /// Inductive energy `E_L = E_J + E'_J(left link) + E'_J(right link)` of
    /// every site.
    pub fn inductive_energies(&self) -> Vec<f64> {
        (0..self.n_sites())
            .map(|s| self.e_j[s] + self.e_prime_j[s] + self.e_prime_j[s + 1])
            .collect()
    }

    pub fn ensure_valid(&self) -> Result<()> {
        self.validate().into_result()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

/// Outcome of [`Validate::validate`]; an empty report means valid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn error(&mut self, message: impl Into<String>) {
        self.violations.push(Violation { severity: Severity::Error, message: message.into() });
    }

    fn warn(&mut self, message: impl Into<String>) {
        self.violations.push(Violation { severity: Severity::Warning, message: message.into() });
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.violations.iter().any(|v| v.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Warning)
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.into_iter().find(|v| v.severity == Severity::Error) {
            Some(v) => Err(Error::InvalidSpec(v.message)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Pure, report-only validation.
pub trait Validate {
    fn validate(&self) -> ValidationReport;
}

/// `E_C / E_J` above this is outside the transmon-like regime.
pub const CHARGING_RATIO_WARN: f64 = 0.1;
/// `E'_J = E_J x / (1 - 2x)` with `x = E_coup / E_C` diverges here.
pub const COUPLING_RATIO_LIMIT: f64 = 0.5;

impl Validate for SpinModelSpec {
    fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.n_sites == 0 {
            report.error("n_sites must be positive");
        }
        if self.fields.len() != self.n_sites {
            report.error(format!(
                "fields has {} entries, expected n_sites = {}",
                self.fields.len(),
                self.n_sites
            ));
        }
        let mut seen = HashSet::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.j >= self.n_sites || e.k >= self.n_sites {
                report.error(format!(
                    "edge {i} ({}, {}) has a site outside [0, {})",
                    e.j, e.k, self.n_sites
                ));
            }
            if e.j >= e.k {
                report.error(format!("edge {i} ({}, {}) violates j<k ordering", e.j, e.k));
            }
            if !seen.insert((e.j.min(e.k), e.j.max(e.k))) {
                report.error(format!("edge {i} ({}, {}) is a duplicate", e.j, e.k));
            }
            if !e.coupling.is_finite() {
                report.error(format!("edge {i} has a non-finite coupling"));
            }
        }
        for (s, h) in self.fields.iter().enumerate() {
            if !h.is_finite() {
                report.error(format!("field at site {s} is not finite"));
            }
        }
        report
    }
}

impl Validate for CircuitSpec {
    fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.n_sites();
        if n == 0 {
            report.error("circuit needs at least one site");
            return report;
        }
        if self.e_j.len() != n {
            report.error(format!("e_j has {} entries, expected {n}", self.e_j.len()));
        }
        for (name, v) in [("e_prime_j", &self.e_prime_j), ("e_coup", &self.e_coup)] {
            if v.len() != n + 1 {
                report.error(format!("{name} has {} entries, expected {} links", v.len(), n + 1));
            }
        }
        if report.has_errors() {
            return report;
        }
        for s in 0..n {
            for (name, v) in [("e_c", self.e_c[s]), ("e_j", self.e_j[s])] {
                if !(v.is_finite() && v > 0.0) {
                    report.error(format!("{name} at site {s} must be positive, got {v}"));
                }
            }
        }
        for link in 0..=n {
            for (name, v) in [("e_prime_j", self.e_prime_j[link]), ("e_coup", self.e_coup[link])] {
                if !(v.is_finite() && v >= 0.0) {
                    report.error(format!("{name} on link {link} must be non-negative, got {v}"));
                }
            }
        }
        if report.has_errors() {
            return report;
        }
        for s in 0..n {
            let ratio = self.e_c[s] / self.e_j[s];
            if ratio > CHARGING_RATIO_WARN {
                report.warn(format!(
                    "E_C/E_J = {ratio:.4} at site {s} exceeds {CHARGING_RATIO_WARN}"
                ));
            }
        }
        // Interior links only; an end link couples to ground.
        for link in 1..n {
            let ratio = self.e_coup[link] / self.e_c[link - 1];
            if ratio >= COUPLING_RATIO_LIMIT {
                report.error(format!(
                    "E_coup/E_C = {ratio:.4} on link {link} is not below {COUPLING_RATIO_LIMIT}"
                ));
            }
        }
        report
    }
}
