//! Hamiltonians and observables.
//!
//! Every many-body operator is a sum of [`ProductTerm`]s: a coefficient times
//! a product of site-local `d x d` factors. Factors on one site are multiplied
//! in the written order, so `a_j n_j` means "apply `n_j`, then `a_j`".

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{FockBasis, Sector};
use crate::mapping::JjaParams;
use crate::model::SpinModelSpec;
use crate::sparse::{CooBuilder, SparseOperator};
use crate::C64;

/// Largest chain handled by [`build_h_spin`].
pub const MAX_SPIN_SITES: usize = 24;

type Local = DMatrix<C64>;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Truncated single-mode operators for local dimension `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperatorSet {
    pub local_dim: usize,
    pub annihilation: Local,
    pub creation: Local,
    pub number: Local,
    pub identity: Local,
}

impl LocalOperatorSet {
    pub fn new(local_dim: usize) -> Self {
        let d = local_dim;
        let mut a = Local::zeros(d, d);
        for k in 1..d {
            a[(k - 1, k)] = re((k as f64).sqrt());
        }
        let number = Local::from_diagonal(&nalgebra::DVector::from_fn(d, |k, _| re(k as f64)));
        Self { local_dim: d, creation: a.adjoint(), annihilation: a, number, identity: Local::identity(d, d) }
    }

    /// Quadrature `(a + a^dag) / 2`.
    pub fn quadrature(&self) -> Local {
        (&self.annihilation + &self.creation) * re(0.5)
    }

    /// Spin-1/2 operators, available for `d = 2` only.
    pub fn spin(&self) -> Result<SpinOperators> {
        if self.local_dim != 2 {
            return Err(Error::InvalidSpec(format!(
                "spin operators need local dimension 2, got {}",
                self.local_dim
            )));
        }
        SpinEncoding::Spin.operators(2)
    }
}

/// Local representation of `S^+`, `S^-`, `S^z`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinOperators {
    pub raising: Local,
    pub lowering: Local,
    pub z: Local,
}

impl SpinOperators {
    pub fn x(&self) -> Local {
        (&self.raising + &self.lowering) * re(0.5)
    }

    pub fn y(&self) -> Local {
        (&self.raising - &self.lowering) * C64::new(0.0, -0.5)
    }
}

/// How spin operators are written on a site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinEncoding {
    /// Bare spin-1/2 matrices (`d = 2`).
    Spin,
    /// `S^+ = a^dag (1 - n)`, `S^- = (1 - n) a`, `S^z = n - 1/2`.
    HolsteinPrimakoff,
    /// `S^+ = a^dag (1 - n)`, `S^- = a`, `S^z = n - 1/2`.
    DysonMaleev,
}

impl SpinEncoding {
    pub fn operators(&self, local_dim: usize) -> Result<SpinOperators> {
        let ops = LocalOperatorSet::new(local_dim);
        let one_minus_n = &ops.identity - &ops.number;
        let z = &ops.number - &ops.identity * re(0.5);
        match self {
            Self::Spin => {
                if local_dim != 2 {
                    return Err(Error::InvalidSpec("bare spin operators need d = 2".into()));
                }
                let mut raising = Local::zeros(2, 2);
                raising[(1, 0)] = re(1.0);
                Ok(SpinOperators { lowering: raising.adjoint(), raising, z })
            }
            Self::HolsteinPrimakoff => Ok(SpinOperators {
                raising: &ops.creation * &one_minus_n,
                lowering: &one_minus_n * &ops.annihilation,
                z,
            }),
            Self::DysonMaleev => Ok(SpinOperators {
                raising: &ops.creation * &one_minus_n,
                lowering: ops.annihilation.clone(),
                z,
            }),
        }
    }
}

/// Coefficient times a product of site-local factors.
#[derive(Clone, Debug)]
pub struct ProductTerm {
    pub coefficient: C64,
    factors: Vec<(usize, Local)>,
}

impl ProductTerm {
    pub fn new(coefficient: C64) -> Self {
        Self { coefficient, factors: Vec::new() }
    }

    /// Right-multiplies by `local` on `site`.
    pub fn times(mut self, site: usize, local: &Local) -> Self {
        match self.factors.iter_mut().find(|(s, _)| *s == site) {
            Some((_, m)) => *m = &*m * local,
            None => self.factors.push((site, local.clone())),
        }
        self
    }

    pub fn adjoint(&self) -> Self {
        Self {
            coefficient: self.coefficient.conj(),
            factors: self.factors.iter().map(|(s, m)| (*s, m.adjoint())).collect(),
        }
    }
}

/// Assembles `sum_terms coefficient * prod factors` on `basis`.
pub fn assemble(basis: &FockBasis, terms: &[ProductTerm]) -> Result<SparseOperator> {
    let d = basis.local_dim();
    let mut coo = CooBuilder::new(basis.dim());
    for term in terms {
        if term.coefficient == re(0.0) {
            continue;
        }
        // Nonzero entries of each factor, grouped by input occupation.
        let mut columns: Vec<(usize, usize, Vec<Vec<(usize, C64)>>)> = Vec::new();
        for (site, m) in &term.factors {
            if *site >= basis.n_sites() {
                return Err(Error::InvalidSpec(format!(
                    "site {site} outside a {}-site basis",
                    basis.n_sites()
                )));
            }
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: m.nrows() });
            }
            let cols = (0..d)
                .map(|c| (0..d).filter(|&r| m[(r, c)] != re(0.0)).map(|r| (r, m[(r, c)])).collect())
                .collect();
            columns.push((*site, basis.stride(*site), cols));
        }
        for col in 0..basis.dim() {
            let mut outputs = vec![(col as isize, term.coefficient)];
            for (site, stride, cols) in &columns {
                let occ = basis.occupation(col, *site);
                let mut next = Vec::with_capacity(outputs.len() * cols[occ].len());
                for &(row, amp) in &outputs {
                    for &(r, v) in &cols[occ] {
                        let shift = (r as isize - occ as isize) * *stride as isize;
                        next.push((row + shift, amp * v));
                    }
                }
                outputs = next;
                if outputs.is_empty() {
                    break;
                }
            }
            for (row, v) in outputs {
                coo.add(row as usize, col, v);
            }
        }
    }
    Ok(coo.build())
}

/// Identity on every site except `site`, where `local` acts.
pub fn embed(basis: &FockBasis, site: usize, local: &Local) -> Result<SparseOperator> {
    assemble(basis, &[ProductTerm::new(re(1.0)).times(site, local)])
}

fn check_spec(spec: &SpinModelSpec, basis: &FockBasis) -> Result<()> {
    spec.ensure_valid()?;
    if spec.n_sites != basis.n_sites() {
        return Err(Error::DimensionMismatch { expected: spec.n_sites, found: basis.n_sites() });
    }
    Ok(())
}

/// `-sum J (S^+S^-/2 + S^-S^+/2 + S^zS^z) + sum h S^z` with the spin operators
/// of `encoding` on each site, products taken as written.
pub fn build_h_encoded(
    spec: &SpinModelSpec,
    basis: &FockBasis,
    encoding: SpinEncoding,
) -> Result<SparseOperator> {
    check_spec(spec, basis)?;
    let s = encoding.operators(basis.local_dim())?;
    let mut terms = Vec::new();
    for e in &spec.edges {
        let (j, k) = (e.j, e.k);
        terms.push(ProductTerm::new(re(-e.coupling / 2.0)).times(j, &s.raising).times(k, &s.lowering));
        terms.push(ProductTerm::new(re(-e.coupling / 2.0)).times(j, &s.lowering).times(k, &s.raising));
        terms.push(ProductTerm::new(re(-e.coupling)).times(j, &s.z).times(k, &s.z));
    }
    for (j, &h) in spec.fields.iter().enumerate() {
        terms.push(ProductTerm::new(re(h)).times(j, &s.z));
    }
    assemble(basis, &terms)
}

/// Heisenberg Hamiltonian on the `2^N` spin basis, raising/lowering form.
pub fn build_h_spin(spec: &SpinModelSpec) -> Result<SparseOperator> {
    if spec.n_sites > MAX_SPIN_SITES {
        return Err(Error::DimensionOverflow { n_sites: spec.n_sites, local_dim: 2 });
    }
    build_h_encoded(spec, &FockBasis::spin(spec.n_sites)?, SpinEncoding::Spin)
}

/// Heisenberg Hamiltonian built from `S^x S^x + S^y S^y + S^z S^z`.
pub fn build_h_spin_cartesian(spec: &SpinModelSpec) -> Result<SparseOperator> {
    if spec.n_sites > MAX_SPIN_SITES {
        return Err(Error::DimensionOverflow { n_sites: spec.n_sites, local_dim: 2 });
    }
    let basis = FockBasis::spin(spec.n_sites)?;
    check_spec(spec, &basis)?;
    let s = SpinEncoding::Spin.operators(2)?;
    let (x, y) = (s.x(), s.y());
    let mut terms = Vec::new();
    for e in &spec.edges {
        for m in [&x, &y, &s.z] {
            terms.push(ProductTerm::new(re(-e.coupling)).times(e.j, m).times(e.k, m));
        }
    }
    for (j, &h) in spec.fields.iter().enumerate() {
        terms.push(ProductTerm::new(re(h)).times(j, &s.z));
    }
    assemble(&basis, &terms)
}

/// Extended Bose-Hubbard image of the Heisenberg model under
/// Holstein-Primakoff, keeping the `-1/2` offsets:
///
/// `-(J/2)(a^dag_j a_k - a^dag_j (n_j + n_k) a_k + h.c.)
///  - J (n_j - 1/2)(n_k - 1/2) + sum h (n_j - 1/2)`.
pub fn build_h_ebh(spec: &SpinModelSpec, basis: &FockBasis) -> Result<SparseOperator> {
    check_spec(spec, basis)?;
    let o = LocalOperatorSet::new(basis.local_dim());
    let z = &o.number - &o.identity * re(0.5);
    let mut terms = Vec::new();
    for e in &spec.edges {
        let (j, k, jj) = (e.j, e.k, e.coupling);
        let bare = ProductTerm::new(re(-jj / 2.0)).times(j, &o.creation).times(k, &o.annihilation);
        // a^dag_j n_j a_k and a^dag_j n_k a_k
        let corr_j = ProductTerm::new(re(jj / 2.0))
            .times(j, &o.creation)
            .times(j, &o.number)
            .times(k, &o.annihilation);
        let corr_k = ProductTerm::new(re(jj / 2.0))
            .times(j, &o.creation)
            .times(k, &o.number)
            .times(k, &o.annihilation);
        for t in [bare, corr_j, corr_k] {
            terms.push(t.adjoint());
            terms.push(t);
        }
        terms.push(ProductTerm::new(re(-jj)).times(j, &z).times(k, &z));
    }
    for (j, &h) in spec.fields.iter().enumerate() {
        terms.push(ProductTerm::new(re(h)).times(j, &z));
    }
    assemble(basis, &terms)
}

/// Dyson-Maleev image of the Heisenberg model; non-Hermitian for `d > 2`.
pub fn build_h_dm(spec: &SpinModelSpec, basis: &FockBasis) -> Result<SparseOperator> {
    build_h_encoded(spec, basis, SpinEncoding::DysonMaleev)
}

/// Which rotating-wave array Hamiltonian to build.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JjaVariant {
    /// With the anharmonic `(a^dag)^2 a^2` and pair-hopping terms.
    Full,
    /// Without any term containing `a^2`.
    #[default]
    Simplified,
}

/// Operator order inside the correlated-hopping terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoppingOrder {
    /// `T a^dag_{j+1} n_j a_j + T' a^dag_{j+1} n_{j+1} a_j + h.c.`: the
    /// occupation is counted with the hopping boson removed, which makes the
    /// array Hamiltonian coincide with the extended Bose-Hubbard chain.
    #[default]
    Normal,
    /// `T a_j n_j a^dag_{j+1} + T' a_j n_{j+1} a^dag_{j+1} + h.c.`, applied
    /// right to left. On the hard-core subspace this adds `2T` to the bare
    /// hopping.
    AsWritten,
}

/// Rotating-wave Josephson junction array Hamiltonian (constants dropped).
pub fn build_h_jja(params: &JjaParams, basis: &FockBasis, variant: JjaVariant) -> Result<SparseOperator> {
    build_h_jja_ordered(params, basis, variant, HoppingOrder::default())
}

pub fn build_h_jja_ordered(
    params: &JjaParams,
    basis: &FockBasis,
    variant: JjaVariant,
    order: HoppingOrder,
) -> Result<SparseOperator> {
    params.check_shape()?;
    if params.n_sites() != basis.n_sites() {
        return Err(Error::DimensionMismatch { expected: params.n_sites(), found: basis.n_sites() });
    }
    let o = LocalOperatorSet::new(basis.local_dim());
    let (a, ad, n) = (&o.annihilation, &o.creation, &o.number);
    let ad2 = ad * ad;
    let a2 = a * a;
    let mut terms = Vec::new();
    for s in 0..params.n_sites() {
        let onsite = params.omega[s] + params.delta_omega[s] - params.delta_tilde[s];
        terms.push(ProductTerm::new(re(onsite)).times(s, n));
        if variant == JjaVariant::Full {
            terms.push(ProductTerm::new(re(params.delta_omega[s] / 2.0)).times(s, &ad2).times(s, &a2));
        }
    }
    for b in 0..params.n_sites() - 1 {
        let (j, k) = (b, b + 1);
        let t = params.hopping[b];
        terms.push(ProductTerm::new(re(t)).times(j, ad).times(k, a));
        terms.push(ProductTerm::new(re(t)).times(j, a).times(k, ad));
        terms.push(ProductTerm::new(re(-params.cross_kerr[b])).times(j, n).times(k, n));
        let (corr, corr_prime) = match order {
            HoppingOrder::Normal => (
                ProductTerm::new(re(params.corr_hopping[b])).times(k, ad).times(j, n).times(j, a),
                ProductTerm::new(re(params.corr_hopping_prime[b])).times(k, ad).times(k, n).times(j, a),
            ),
            HoppingOrder::AsWritten => (
                ProductTerm::new(re(params.corr_hopping[b])).times(j, a).times(j, n).times(k, ad),
                ProductTerm::new(re(params.corr_hopping_prime[b])).times(j, a).times(k, n).times(k, ad),
            ),
        };
        for term in [corr, corr_prime] {
            terms.push(term.adjoint());
            terms.push(term);
        }
        if variant == JjaVariant::Full {
            let pair = ProductTerm::new(re(-params.cross_kerr[b] / 4.0)).times(k, &a2).times(j, &ad2);
            terms.push(pair.adjoint());
            terms.push(pair);
        }
    }
    assemble(basis, &terms)
}

/// The three benchmark observables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    /// `S^z` of site 0, or `n_0 - 1/2`.
    Sz1,
    /// `sum_j S^x_j / N`, or `sum_j X_j / N` with `X = (a + a^dag)/2`.
    Mx,
    /// `S^x_0 S^x_1`, or `X_0 X_1`.
    Cxx,
}

impl ObservableKind {
    pub const ALL: [ObservableKind; 3] = [Self::Sz1, Self::Mx, Self::Cxx];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Sz1 => "sz1",
            Self::Mx => "mx",
            Self::Cxx => "cxx",
        }
    }
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObservableKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// Matrix of a benchmark observable in the given sector.
pub fn observable(kind: ObservableKind, sector: Sector, basis: &FockBasis) -> Result<SparseOperator> {
    let o = LocalOperatorSet::new(basis.local_dim());
    let (z, x) = match sector {
        Sector::Spin => {
            let s = o.spin()?;
            (s.z.clone(), s.x())
        }
        Sector::Boson => (&o.number - &o.identity * re(0.5), o.quadrature()),
    };
    let n = basis.n_sites();
    let terms = match kind {
        ObservableKind::Sz1 => vec![ProductTerm::new(re(1.0)).times(0, &z)],
        ObservableKind::Mx => (0..n).map(|j| ProductTerm::new(re(1.0 / n as f64)).times(j, &x)).collect(),
        ObservableKind::Cxx => {
            if n < 2 {
                return Err(Error::InvalidSpec("cxx needs at least two sites".into()));
            }
            vec![ProductTerm::new(re(1.0)).times(0, &x).times(1, &x)]
        }
    };
    assemble(basis, &terms)
}
