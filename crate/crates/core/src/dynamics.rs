//! Unitary time evolution `psi(t) = exp(-i 2 pi H t) psi(0)`, with `H` in MHz
//! and `t` in microseconds.
//!
//! Two propagators are available. [`SpectralPropagator`] diagonalizes `H` once,
//! block by block over the connected components of its sparsity graph (the
//! number-conserving Hamiltonians here split into particle-number sectors),
//! and reuses the decomposition for every output time. [`KrylovPropagator`]
//! runs short Lanczos recurrences with adaptive step halving.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::StateVector;
use crate::sparse::SparseOperator;
use crate::units;
use crate::C64;

/// Auto method selection uses the spectral propagator up to this dimension.
pub const DENSE_MAX_DIM: usize = 4096;
/// Tolerated imaginary part of an expectation value, relative to `max(1, |O|_max)`.
pub const IMAGINARY_TOLERANCE: f64 = 1e-9;
/// Step halvings allowed per Krylov step before giving up.
pub const MAX_HALVINGS: u32 = 60;
/// Amplitudes synthesized per batch by the spectral propagator.
const DENSE_BATCH_ENTRIES: usize = 1 << 19;
/// Bisection steps spent growing a Krylov step back after a halving.
const REFINE_STEPS: u32 = 4;
/// A second reorthogonalization pass runs when the first leaves less than
/// this fraction of the vector.
const REORTH_RATIO: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Spectral up to [`DENSE_MAX_DIM`], Krylov above.
    #[default]
    Auto,
    DenseEig,
    Krylov,
}

impl Method {
    pub fn resolve(self, dim: usize) -> Method {
        match self {
            Method::Auto if dim <= DENSE_MAX_DIM => Method::DenseEig,
            Method::Auto => Method::Krylov,
            m => m,
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "dense_eig" => Ok(Self::DenseEig),
            "krylov" => Ok(Self::Krylov),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    /// Horizon in microseconds.
    pub t_max: f64,
    /// Number of output grid points, `0` and `t_max` included.
    pub n_steps: usize,
    pub method: Method,
    pub krylov_dim: usize,
    /// Local error target of one Krylov step.
    pub step_tolerance: f64,
    /// Keep the state at every grid point in the trajectory.
    pub retain_states: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            t_max: 0.5,
            n_steps: 2000,
            method: Method::Auto,
            krylov_dim: 30,
            step_tolerance: 1e-10,
            retain_states: false,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidSpec(format!("t_max must be positive, got {}", self.t_max)));
        }
        if self.n_steps < 2 {
            return Err(Error::InvalidSpec(format!("n_steps must be at least 2, got {}", self.n_steps)));
        }
        if self.krylov_dim < 2 {
            return Err(Error::InvalidSpec(format!(
                "krylov_dim must be at least 2, got {}",
                self.krylov_dim
            )));
        }
        if !(self.step_tolerance > 0.0) {
            return Err(Error::InvalidSpec("step_tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Inclusive linear grid on `[0, t_max]`.
    pub fn times(&self) -> Vec<f64> {
        let last = (self.n_steps - 1) as f64;
        (0..self.n_steps)
            .map(|i| if i + 1 == self.n_steps { self.t_max } else { self.t_max * i as f64 / last })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub series: Vec<Series>,
    /// Population outside the leakage mask at each time, when requested.
    pub leakage: Option<Vec<f64>>,
    pub norms: Vec<f64>,
    /// Largest imaginary part seen before taking real parts.
    pub max_imaginary: f64,
    pub hamiltonian_label: String,
    pub state_label: String,
    pub states: Option<Vec<StateVector>>,
}

impl Trajectory {
    pub fn labelled(mut self, hamiltonian: impl Into<String>, state: impl Into<String>) -> Self {
        self.hamiltonian_label = hamiltonian.into();
        self.state_label = state.into();
        self
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.series.iter().find(|s| s.name == name).map(|s| s.values.as_slice())
    }

    pub fn max_leakage(&self) -> Option<f64> {
        self.leakage.as_ref().map(|l| l.iter().copied().fold(0.0, f64::max))
    }
}

fn ensure_hermitian(op: &SparseOperator) -> Result<()> {
    if !op.is_hermitian() {
        return Err(Error::NonHermitian { deviation: op.hermiticity_deviation() });
    }
    Ok(())
}

fn expectation_raw(op: &SparseOperator, amps: &[C64]) -> C64 {
    (0..op.dim())
        .map(|r| {
            let row: C64 = op.row(r).map(|(c, v)| v * amps[c]).sum();
            amps[r].conj() * row
        })
        .sum()
}

/// `<psi|O|psi>` complete with its imaginary part.
pub fn expectation_complex(op: &SparseOperator, psi: &StateVector) -> Result<C64> {
    if op.dim() != psi.basis().dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), found: psi.basis().dim() });
    }
    Ok(expectation_raw(op, psi.amplitudes()))
}

/// Real expectation value of a Hermitian observable.
pub fn expectation(op: &SparseOperator, psi: &StateVector) -> Result<f64> {
    ensure_hermitian(op)?;
    let value = expectation_complex(op, psi)?;
    let tol = IMAGINARY_TOLERANCE * op.max_abs().max(1.0);
    if value.im.abs() > tol {
        return Err(Error::Numerical(format!("expectation has imaginary part {:e}", value.im)));
    }
    Ok(value.re)
}

/// `1 - sum_{i in mask} |psi_i|^2` for a unit-norm state, clamped to `[0, 1]`.
///
/// Summed over the complement so that a full mask gives exactly zero.
pub fn leakage(psi: &StateVector, mask: &[usize]) -> f64 {
    let amps = psi.amplitudes();
    let mut outside = vec![true; amps.len()];
    mask.iter().for_each(|&i| outside[i] = false);
    let lost: f64 = amps.iter().zip(&outside).filter(|(_, &o)| o).fold(0.0, |acc, (a, _)| acc + a.norm_sqr());
    lost.clamp(0.0, 1.0)
}

/// Connected components of the symmetric sparsity pattern.
fn components(op: &SparseOperator) -> Vec<Vec<usize>> {
    let n = op.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (r, c, _) in op.iter() {
        let (a, b) = (find(&mut parent, r), find(&mut parent, c));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

#[derive(Clone, Debug)]
enum Eigenvectors {
    Real(DMatrix<f64>),
    Complex(DMatrix<C64>),
}

#[derive(Clone, Debug)]
struct SpectralBlock {
    indices: Vec<usize>,
    eigenvalues: Vec<f64>,
    eigenvectors: Eigenvectors,
}

/// Exact propagator from a one-time block diagonalization.
#[derive(Clone, Debug)]
pub struct SpectralPropagator {
    dim: usize,
    blocks: Vec<SpectralBlock>,
}

impl SpectralPropagator {
    pub fn new(h: &SparseOperator) -> Result<Self> {
        ensure_hermitian(h)?;
        let real = h.is_real();
        let mut blocks = Vec::new();
        for indices in components(h) {
            let block = h.restrict(&indices)?;
            let (eigenvalues, eigenvectors): (Vec<f64>, Eigenvectors) = if real {
                let m = DMatrix::from_fn(indices.len(), indices.len(), |r, c| block.get(r, c).re);
                let eig = SymmetricEigen::new(m);
                (eig.eigenvalues.iter().copied().collect(), Eigenvectors::Real(eig.eigenvectors))
            } else {
                let eig = SymmetricEigen::new(block.to_dense());
                (eig.eigenvalues.iter().copied().collect(), Eigenvectors::Complex(eig.eigenvectors))
            };
            if eigenvalues.iter().any(|e| !e.is_finite()) {
                return Err(Error::Numerical("diagonalization produced non-finite eigenvalues".into()));
            }
            blocks.push(SpectralBlock { indices, eigenvalues, eigenvectors });
        }
        Ok(Self { dim: h.dim(), blocks })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.blocks.iter().flat_map(|b| b.eigenvalues.iter().copied()).collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Eigenbasis coefficients of `psi`, one vector per block.
    fn coefficients(&self, amps: &[C64]) -> Vec<DVector<C64>> {
        self.blocks
            .iter()
            .map(|b| {
                let local = DVector::from_iterator(b.indices.len(), b.indices.iter().map(|&i| amps[i]));
                match &b.eigenvectors {
                    Eigenvectors::Real(v) => {
                        let re = v.tr_mul(&local.map(|x| x.re));
                        let im = v.tr_mul(&local.map(|x| x.im));
                        re.zip_map(&im, C64::new)
                    }
                    Eigenvectors::Complex(v) => v.adjoint() * local,
                }
            })
            .collect()
    }

    fn synthesize(&self, coeffs: &[DVector<C64>], t: f64) -> Vec<C64> {
        self.synthesize_many(coeffs, &[t]).pop().expect("one time requested")
    }

    /// States at several times, one matrix product per block.
    fn synthesize_many(&self, coeffs: &[DVector<C64>], times: &[f64]) -> Vec<Vec<C64>> {
        let mut out = vec![vec![C64::new(0.0, 0.0); self.dim]; times.len()];
        for (b, c) in self.blocks.iter().zip(coeffs) {
            let rotated = DMatrix::from_fn(c.len(), times.len(), |k, col| {
                c[k] * C64::from_polar(1.0, -units::phase(b.eigenvalues[k], times[col]))
            });
            let local = match &b.eigenvectors {
                Eigenvectors::Real(v) => {
                    let re = v * rotated.map(|x| x.re);
                    let im = v * rotated.map(|x| x.im);
                    re.zip_map(&im, C64::new)
                }
                Eigenvectors::Complex(v) => v * rotated,
            };
            for (col, state) in out.iter_mut().enumerate() {
                for (k, &i) in b.indices.iter().enumerate() {
                    state[i] = local[(k, col)];
                }
            }
        }
        out
    }

    /// `exp(-i 2 pi H t) psi`; negative `t` runs backwards.
    pub fn apply(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        self.check(psi)?;
        let coeffs = self.coefficients(psi.amplitudes());
        Ok(StateVector::from_raw(*psi.basis(), self.synthesize(&coeffs, t)))
    }

    fn check(&self, psi: &StateVector) -> Result<()> {
        if psi.basis().dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: psi.basis().dim() });
        }
        Ok(())
    }
}

/// Short-iteration Lanczos propagator.
#[derive(Clone, Debug)]
pub struct KrylovPropagator<'a> {
    h: &'a SparseOperator,
    krylov_dim: usize,
    step_tolerance: f64,
}

struct LanczosBasis {
    vectors: Vec<Vec<C64>>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    /// Coupling to the next, unbuilt Krylov vector; zero on breakdown.
    residual_beta: f64,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

impl LanczosBasis {
    /// Coefficients of `exp(-i theta T) e_1` in the Krylov basis.
    fn propagated(&self, theta: f64) -> Vec<C64> {
        let k = self.eigenvalues.len();
        let weights: Vec<C64> = (0..k)
            .map(|l| C64::from_polar(self.eigenvectors[(0, l)], -theta * self.eigenvalues[l]))
            .collect();
        (0..k).map(|i| (0..k).map(|l| weights[l] * self.eigenvectors[(i, l)]).sum()).collect()
    }
}

impl<'a> KrylovPropagator<'a> {
    pub fn new(h: &'a SparseOperator, krylov_dim: usize, step_tolerance: f64) -> Result<Self> {
        ensure_hermitian(h)?;
        if krylov_dim < 2 {
            return Err(Error::InvalidSpec("krylov_dim must be at least 2".into()));
        }
        Ok(Self { h, krylov_dim, step_tolerance })
    }

    fn lanczos(&self, start: &[C64]) -> LanczosBasis {
        let n = start.len();
        let m = self.krylov_dim.min(n);
        let scale = self.h.max_abs().max(f64::MIN_POSITIVE);
        let mut vectors: Vec<Vec<C64>> = vec![start.to_vec()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut w = vec![C64::new(0.0, 0.0); n];
        let mut residual_beta = 0.0;
        loop {
            let j = vectors.len() - 1;
            self.h.matvec_into(&vectors[j], &mut w);
            let a = dot(&vectors[j], &w).re;
            alpha.push(a);
            // Full reorthogonalization, repeated once when it cancels most of `w`.
            let mut b = norm(&w);
            for _ in 0..2 {
                for v in &vectors {
                    let p = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= p * y);
                }
                let after = norm(&w);
                let settled = after > REORTH_RATIO * b;
                b = after;
                if settled {
                    break;
                }
            }
            if b <= 1e-12 * scale {
                break;
            }
            if vectors.len() == m {
                residual_beta = b;
                break;
            }
            beta.push(b);
            vectors.push(w.iter().map(|x| x / b).collect());
        }
        let k = alpha.len();
        let t = DMatrix::from_fn(k, k, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        LanczosBasis {
            vectors,
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
            residual_beta,
        }
    }

    /// Advances `amps` (unit norm) by `dt` microseconds in adaptive substeps.
    pub fn advance(&self, amps: &mut Vec<C64>, dt: f64) -> Result<()> {
        let mut remaining = dt;
        while remaining != 0.0 {
            let basis = self.lanczos(amps);
            let attempt = |tau: f64| {
                let c = basis.propagated(2.0 * std::f64::consts::PI * tau);
                let err = basis.residual_beta * c.last().map_or(0.0, |x| x.norm());
                (err <= self.step_tolerance).then_some(c)
            };
            let mut tau = remaining;
            let mut halvings = 0;
            let coeffs = loop {
                if let Some(mut c) = attempt(tau) {
                    if halvings > 0 {
                        // Recover part of the last halving.
                        let (mut lo, mut hi) = (tau, 2.0 * tau);
                        for _ in 0..REFINE_STEPS {
                            let mid = 0.5 * (lo + hi);
                            match attempt(mid) {
                                Some(better) => {
                                    lo = mid;
                                    c = better;
                                }
                                None => hi = mid,
                            }
                        }
                        tau = lo;
                    }
                    break c;
                }
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(Error::Numerical(format!(
                        "Krylov step did not reach tolerance {:e} after {MAX_HALVINGS} halvings",
                        self.step_tolerance
                    )));
                }
                tau /= 2.0;
            };
            let mut next = vec![C64::new(0.0, 0.0); amps.len()];
            for (v, c) in basis.vectors.iter().zip(&coeffs) {
                next.iter_mut().zip(v).for_each(|(x, y)| *x += c * y);
            }
            *amps = next;
            remaining -= tau;
            if remaining.abs() <= 1e-15 * dt.abs() {
                break;
            }
        }
        Ok(())
    }

    pub fn apply(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if psi.basis().dim() != self.h.dim() {
            return Err(Error::DimensionMismatch { expected: self.h.dim(), found: psi.basis().dim() });
        }
        let mut amps = psi.amplitudes().to_vec();
        self.advance(&mut amps, t)?;
        Ok(StateVector::from_raw(*psi.basis(), amps))
    }
}

struct Recorder<'a> {
    observables: &'a [(&'a str, &'a SparseOperator)],
    leakage_mask: Option<&'a [usize]>,
    values: Vec<Vec<f64>>,
    leakage: Vec<f64>,
    norms: Vec<f64>,
    max_imaginary: f64,
    states: Option<Vec<StateVector>>,
}

impl<'a> Recorder<'a> {
    fn record(&mut self, psi: StateVector) -> Result<()> {
        for (k, (name, op)) in self.observables.iter().enumerate() {
            let value = expectation_raw(op, psi.amplitudes());
            let tol = IMAGINARY_TOLERANCE * op.max_abs().max(1.0);
            if value.im.abs() > tol {
                return Err(Error::Numerical(format!(
                    "observable {name} has imaginary part {:e}",
                    value.im
                )));
            }
            self.max_imaginary = self.max_imaginary.max(value.im.abs());
            self.values[k].push(value.re);
        }
        if let Some(mask) = self.leakage_mask {
            self.leakage.push(leakage(&psi, mask));
        }
        self.norms.push(psi.norm());
        if let Some(states) = self.states.as_mut() {
            states.push(psi);
        }
        Ok(())
    }
}

/// Evolves `psi0` under `h`, recording the observables at every grid time.
pub fn evolve(
    h: &SparseOperator,
    psi0: &StateVector,
    cfg: &EvolutionConfig,
    observables: &[(&str, &SparseOperator)],
) -> Result<Trajectory> {
    evolve_tracked(h, psi0, cfg, observables, None)
}

/// As [`evolve`], also recording the population outside `leakage_mask`.
pub fn evolve_tracked(
    h: &SparseOperator,
    psi0: &StateVector,
    cfg: &EvolutionConfig,
    observables: &[(&str, &SparseOperator)],
    leakage_mask: Option<&[usize]>,
) -> Result<Trajectory> {
    cfg.validate()?;
    ensure_hermitian(h)?;
    let dim = h.dim();
    if psi0.basis().dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: psi0.basis().dim() });
    }
    for (name, op) in observables {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: op.dim() });
        }
        if !op.is_hermitian() {
            log::debug!("observable {name} is not Hermitian");
            return Err(Error::NonHermitian { deviation: op.hermiticity_deviation() });
        }
    }
    let times = cfg.times();
    let mut rec = Recorder {
        observables,
        leakage_mask,
        values: vec![Vec::with_capacity(times.len()); observables.len()],
        leakage: Vec::new(),
        norms: Vec::with_capacity(times.len()),
        max_imaginary: 0.0,
        states: cfg.retain_states.then(Vec::new),
    };
    let basis = *psi0.basis();
    match cfg.method.resolve(dim) {
        Method::DenseEig => {
            let prop = SpectralPropagator::new(h)?;
            let coeffs = prop.coefficients(psi0.amplitudes());
            let chunk = (DENSE_BATCH_ENTRIES / dim).max(1);
            for batch in times.chunks(chunk) {
                for (&t, amps) in batch.iter().zip(prop.synthesize_many(&coeffs, batch)) {
                    let amps = if t == 0.0 { psi0.amplitudes().to_vec() } else { amps };
                    rec.record(StateVector::from_raw(basis, amps))?;
                }
            }
        }
        Method::Krylov => {
            let prop = KrylovPropagator::new(h, cfg.krylov_dim, cfg.step_tolerance)?;
            let mut amps = psi0.amplitudes().to_vec();
            let mut now = 0.0;
            for &t in &times {
                if t > now {
                    prop.advance(&mut amps, t - now)?;
                    now = t;
                }
                rec.record(StateVector::from_raw(basis, amps.clone()))?;
            }
        }
        Method::Auto => unreachable!("resolved above"),
    }
    let series = observables
        .iter()
        .zip(rec.values)
        .map(|((name, _), values)| Series { name: name.to_string(), values })
        .collect();
    Ok(Trajectory {
        times,
        series,
        leakage: leakage_mask.map(|_| rec.leakage),
        norms: rec.norms,
        max_imaginary: rec.max_imaginary,
        hamiltonian_label: String::new(),
        state_label: String::new(),
        states: rec.states,
    })
}
