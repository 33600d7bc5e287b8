//! Tensor-product Fock bases, product states and the hard-core subspace.
//!
//! A basis state of `N` sites with local dimension `d` is labelled by the
//! occupations `n_0 .. n_{N-1}` and stored at index `sum_j n_j d^j`, so site 0
//! is the least significant digit. For `d = 2` the same layout doubles as the
//! spin basis, with occupation 1 meaning spin up (`S^z = n - 1/2`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Largest supported basis dimension.
pub const MAX_DIM: usize = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockBasis {
    n_sites: usize,
    local_dim: usize,
    dim: usize,
}

impl FockBasis {
    pub fn new(n_sites: usize, local_dim: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidSpec("basis needs at least one site".into()));
        }
        if local_dim < 2 {
            return Err(Error::InvalidSpec(format!("local dimension {local_dim} is below 2")));
        }
        let overflow = || Error::DimensionOverflow { n_sites, local_dim };
        let exp = u32::try_from(n_sites).map_err(|_| overflow())?;
        let dim = local_dim.checked_pow(exp).ok_or_else(overflow)?;
        if dim > MAX_DIM {
            return Err(overflow());
        }
        Ok(Self { n_sites, local_dim, dim })
    }

    /// The spin-1/2 basis of `n_sites` sites.
    pub fn spin(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, 2)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Index step between neighbouring occupations of `site`.
    #[inline]
    pub fn stride(&self, site: usize) -> usize {
        self.local_dim.pow(site as u32)
    }

    /// Occupation of one site in basis state `index`.
    #[inline]
    pub fn occupation(&self, index: usize, site: usize) -> usize {
        (index / self.stride(site)) % self.local_dim
    }

    pub fn index_of(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.n_sites {
            return Err(Error::DimensionMismatch {
                expected: self.n_sites,
                found: occupations.len(),
            });
        }
        let mut index = 0;
        for (site, &n) in occupations.iter().enumerate().rev() {
            if n >= self.local_dim {
                return Err(Error::OccupationOutOfRange { site, value: n, local_dim: self.local_dim });
            }
            index = index * self.local_dim + n;
        }
        Ok(index)
    }

    pub fn occupations_of(&self, mut index: usize) -> Vec<usize> {
        debug_assert!(index < self.dim);
        let mut out = Vec::with_capacity(self.n_sites);
        for _ in 0..self.n_sites {
            out.push(index % self.local_dim);
            index /= self.local_dim;
        }
        out
    }

    pub fn is_physical(&self, index: usize) -> bool {
        let mut i = index;
        for _ in 0..self.n_sites {
            if i % self.local_dim > 1 {
                return false;
            }
            i /= self.local_dim;
        }
        true
    }

    /// Indices of all states with at most one boson per site, in the order of
    /// the corresponding spin basis. Entry `s` of the result is the image of
    /// spin basis state `s`.
    pub fn physical_mask(&self) -> Vec<usize> {
        (0..1usize << self.n_sites)
            .map(|s| {
                (0..self.n_sites)
                    .filter(|&site| s >> site & 1 == 1)
                    .map(|site| self.stride(site))
                    .sum()
            })
            .collect()
    }
}

/// Convenience wrapper for [`FockBasis::physical_mask`].
pub fn physical_mask(basis: &FockBasis) -> Vec<usize> {
    basis.physical_mask()
}

/// Dense, normalized state vector over a [`FockBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    basis: FockBasis,
    amplitudes: Vec<C64>,
}

fn norm_of(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

impl StateVector {
    /// Normalizes `amplitudes`; fails on a length mismatch or a zero vector.
    pub fn from_amplitudes(basis: FockBasis, mut amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: amplitudes.len() });
        }
        let norm = norm_of(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::DegenerateState("state has zero norm".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { basis, amplitudes })
    }

    pub fn basis_state(basis: FockBasis, occupations: &[usize]) -> Result<Self> {
        let index = basis.index_of(occupations)?;
        let mut amplitudes = vec![C64::new(0.0, 0.0); basis.dim()];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { basis, amplitudes })
    }

    /// Normalized tensor product of one length-`d` ket per site.
    pub fn product(basis: FockBasis, local_kets: &[Vec<C64>]) -> Result<Self> {
        if local_kets.len() != basis.n_sites() {
            return Err(Error::DimensionMismatch {
                expected: basis.n_sites(),
                found: local_kets.len(),
            });
        }
        let d = basis.local_dim();
        let mut kets = Vec::with_capacity(local_kets.len());
        for (site, ket) in local_kets.iter().enumerate() {
            if ket.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: ket.len() });
            }
            let norm = norm_of(ket);
            if !(norm.is_finite() && norm > 0.0) {
                return Err(Error::DegenerateState(format!("local ket at site {site} is zero")));
            }
            kets.push(ket.iter().map(|a| a / norm).collect::<Vec<_>>());
        }
        let mut amplitudes = vec![C64::new(1.0, 0.0); basis.dim()];
        for (index, amp) in amplitudes.iter_mut().enumerate() {
            let mut rest = index;
            for ket in &kets {
                *amp *= ket[rest % d];
                rest /= d;
            }
        }
        Self::from_amplitudes(basis, amplitudes)
    }

    /// Lifts a spin-basis state into `basis` through the physical mask.
    pub fn embed_physical(&self, basis: FockBasis) -> Result<Self> {
        if self.basis.local_dim() != 2 || self.basis.n_sites() != basis.n_sites() {
            return Err(Error::DimensionMismatch {
                expected: 1 << basis.n_sites(),
                found: self.basis.dim(),
            });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); basis.dim()];
        for (s, &i) in basis.physical_mask().iter().enumerate() {
            amplitudes[i] = self.amplitudes[s];
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm_of(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.basis != other.basis {
            return Err(Error::DimensionMismatch { expected: self.basis.dim(), found: other.basis.dim() });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Wraps already-normalized amplitudes produced by a propagator.
    pub(crate) fn from_raw(basis: FockBasis, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), basis.dim());
        Self { basis, amplitudes }
    }
}

/// The three benchmark initial states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// First half of the chain up, second half down.
    DomainWall,
    /// Every spin along +x.
    AllUpX,
    /// Alternating up/down starting with up on site 0.
    Neel,
}

impl InitialState {
    pub const ALL: [InitialState; 3] = [Self::DomainWall, Self::AllUpX, Self::Neel];

    pub fn name(&self) -> &'static str {
        match self {
            Self::DomainWall => "domain_wall",
            Self::AllUpX => "all_up_x",
            Self::Neel => "neel",
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitialState {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// Which side of the spin/boson correspondence an object lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Spin,
    Boson,
}

impl Sector {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Spin => "spin",
            Self::Boson => "boson",
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Sector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spin" => Ok(Self::Spin),
            "boson" => Ok(Self::Boson),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// Builds one of the benchmark states. Spin up maps to occupation 1.
pub fn named_initial_state(basis: FockBasis, state: InitialState, sector: Sector) -> Result<StateVector> {
    if sector == Sector::Spin && basis.local_dim() != 2 {
        return Err(Error::InvalidSpec(format!(
            "spin states need local dimension 2, got {}",
            basis.local_dim()
        )));
    }
    let n = basis.n_sites();
    match state {
        InitialState::DomainWall => {
            if n % 2 != 0 {
                return Err(Error::Unsupported(format!(
                    "domain wall needs an even number of sites, got {n}"
                )));
            }
            let occ: Vec<usize> = (0..n).map(|j| usize::from(j < n / 2)).collect();
            StateVector::basis_state(basis, &occ)
        }
        InitialState::Neel => {
            let occ: Vec<usize> = (0..n).map(|j| usize::from(j % 2 == 0)).collect();
            StateVector::basis_state(basis, &occ)
        }
        InitialState::AllUpX => {
            let mut ket = vec![C64::new(0.0, 0.0); basis.local_dim()];
            ket[0] = C64::new(1.0, 0.0);
            ket[1] = C64::new(1.0, 0.0);
            StateVector::product(basis, &vec![ket; n])
        }
    }
}
