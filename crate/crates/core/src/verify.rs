//! Equivalence checks between spin and boson descriptions.

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::sparse::SparseOperator;

/// Block of an operator on a subspace, and its couplings to the complement.
#[derive(Clone, Debug)]
pub struct Projection {
    /// `P H P` in mask order.
    pub block: SparseOperator,
    /// Largest entry of `Q H P`: amplitude carried out of the subspace.
    pub coupling_norm: f64,
    /// Largest entry of `P H Q`.
    pub reverse_coupling_norm: f64,
}

/// Restricts `h` to the sorted, in-range `mask`.
pub fn project(h: &SparseOperator, mask: &[usize]) -> Result<Projection> {
    if mask.is_empty() {
        return Err(Error::InvalidSpec("projection mask is empty".into()));
    }
    let mut inside = vec![false; h.dim()];
    for &i in mask {
        if i >= h.dim() {
            return Err(Error::DimensionMismatch { expected: h.dim(), found: i });
        }
        inside[i] = true;
    }
    let (mut out, mut back) = (0.0f64, 0.0f64);
    for (r, c, v) in h.iter() {
        match (inside[r], inside[c]) {
            (false, true) => out = out.max(v.norm()),
            (true, false) => back = back.max(v.norm()),
            _ => {}
        }
    }
    Ok(Projection { block: h.restrict(mask)?, coupling_norm: out, reverse_coupling_norm: back })
}

/// How closely a boson Hamiltonian reproduces a spin Hamiltonian on the
/// physical subspace, up to a constant energy shift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// Fitted shift `c` in `P H_boson P ~ H_spin + c`, MHz.
    pub offset: f64,
    pub residual_max: f64,
    pub residual_frobenius: f64,
    /// Largest entry of `Q H_boson P`.
    pub coupling_norm: f64,
    /// Largest entry of `P H_boson Q`.
    pub reverse_coupling_norm: f64,
    pub boson_hermiticity: f64,
    pub spin_hermiticity: f64,
    /// Largest entry of `H_spin`, the scale for relative tolerances.
    pub spin_max_abs: f64,
    pub boson_dim: usize,
    pub spin_dim: usize,
}

impl EquivalenceReport {
    pub fn relative_residual(&self) -> f64 {
        self.residual_max / self.spin_max_abs.max(f64::MIN_POSITIVE)
    }
}

/// Compares `P H_boson P` with `H_spin`, fitting the scalar offset by trace
/// matching. `mask[s]` must be the boson index of spin basis state `s`.
pub fn compare_projected(
    h_boson: &SparseOperator,
    h_spin: &SparseOperator,
    mask: &[usize],
) -> Result<EquivalenceReport> {
    if mask.len() != h_spin.dim() {
        return Err(Error::DimensionMismatch { expected: h_spin.dim(), found: mask.len() });
    }
    let proj = project(h_boson, mask)?;
    let offset = (proj.block.trace().re - h_spin.trace().re) / mask.len() as f64;
    let residual = proj.block.sub(&h_spin.shift(offset))?;
    Ok(EquivalenceReport {
        offset,
        residual_max: residual.max_abs(),
        residual_frobenius: residual.frobenius(),
        coupling_norm: proj.coupling_norm,
        reverse_coupling_norm: proj.reverse_coupling_norm,
        boson_hermiticity: h_boson.hermiticity_deviation(),
        spin_hermiticity: h_spin.hermiticity_deviation(),
        spin_max_abs: h_spin.max_abs(),
        boson_dim: h_boson.dim(),
        spin_dim: h_spin.dim(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesDistance {
    pub name: String,
    pub max_abs: f64,
    pub rms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDistance {
    pub per_observable: Vec<SeriesDistance>,
    pub overall_max: f64,
}

/// Per-observable distances between two trajectories on the same grid.
/// Observables are matched by name; names missing from `b` are an error.
pub fn compare_trajectories(a: &Trajectory, b: &Trajectory) -> Result<TrajectoryDistance> {
    if a.times.len() != b.times.len() || a.times.iter().zip(&b.times).any(|(x, y)| x != y) {
        return Err(Error::InvalidSpec("trajectories are on different time grids".into()));
    }
    let mut per_observable = Vec::with_capacity(a.series.len());
    for s in &a.series {
        let other = b
            .series(&s.name)
            .ok_or_else(|| Error::UnknownName(s.name.clone()))?;
        let diffs: Vec<f64> = s.values.iter().zip(other).map(|(x, y)| (x - y).abs()).collect();
        let max_abs = diffs.iter().copied().fold(0.0, f64::max);
        let rms = (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len().max(1) as f64).sqrt();
        per_observable.push(SeriesDistance { name: s.name.clone(), max_abs, rms });
    }
    let overall_max = per_observable.iter().map(|d| d.max_abs).fold(0.0, f64::max);
    Ok(TrajectoryDistance { per_observable, overall_max })
}
