//! Dense brute-force builders used as independent oracles.
//!
//! Everything here is written from explicit Kronecker products on the full
//! space, without going through the library's term assembly.

#![allow(dead_code)]

use nalgebra::DMatrix;
use spinbridge::C64;

pub type Dense = DMatrix<C64>;

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn annihilation(d: usize) -> Dense {
    Dense::from_fn(d, d, |r, col| if col == r + 1 { c((col as f64).sqrt()) } else { c(0.0) })
}

pub fn number(d: usize) -> Dense {
    Dense::from_fn(d, d, |r, col| if r == col { c(r as f64) } else { c(0.0) })
}

/// Spin-1/2 matrices in the (down, up) ordering used by the occupation basis.
pub fn pauli_halves() -> (Dense, Dense, Dense) {
    let sx = Dense::from_row_slice(2, 2, &[c(0.0), c(0.5), c(0.5), c(0.0)]);
    let sy = Dense::from_row_slice(2, 2, &[c(0.0), C64::new(0.0, 0.5), C64::new(0.0, -0.5), c(0.0)]);
    let sz = Dense::from_row_slice(2, 2, &[c(-0.5), c(0.0), c(0.0), c(0.5)]);
    (sx, sy, sz)
}

/// `1 x .. x local x .. x 1` with site 0 the fastest-varying index.
pub fn site_op(local: &Dense, site: usize, n: usize) -> Dense {
    let d = local.nrows();
    let left = Dense::identity(d.pow((n - 1 - site) as u32), d.pow((n - 1 - site) as u32));
    let right = Dense::identity(d.pow(site as u32), d.pow(site as u32));
    left.kronecker(local).kronecker(&right)
}

pub fn identity(d: usize, n: usize) -> Dense {
    let dim = d.pow(n as u32);
    Dense::identity(dim, dim)
}

/// Indices whose base-`d` digits are all 0 or 1, ascending.
pub fn hard_core_indices(d: usize, n: usize) -> Vec<usize> {
    (0..d.pow(n as u32))
        .filter(|&i| {
            let mut x = i;
            (0..n).all(|_| {
                let digit = x % d;
                x /= d;
                digit <= 1
            })
        })
        .collect()
}

pub fn restrict(m: &Dense, idx: &[usize]) -> Dense {
    Dense::from_fn(idx.len(), idx.len(), |r, col| m[(idx[r], idx[col])])
}

/// Largest entry of `m` in rows outside `idx` and columns inside it.
pub fn leak_norm(m: &Dense, idx: &[usize]) -> f64 {
    let mut inside = vec![false; m.nrows()];
    idx.iter().for_each(|&i| inside[i] = true);
    let mut worst = 0.0f64;
    for &col in idx {
        for r in (0..m.nrows()).filter(|&r| !inside[r]) {
            worst = worst.max(m[(r, col)].norm());
        }
    }
    worst
}

pub fn max_abs(m: &Dense) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    max_abs(&(a - b))
}

/// `-sum J_b (Sx Sx + Sy Sy + Sz Sz) + sum h_s Sz` from Cartesian components.
pub fn spin_chain(couplings: &[f64], fields: &[f64]) -> Dense {
    let n = fields.len();
    let (sx, sy, sz) = pauli_halves();
    let mut h = Dense::zeros(1 << n, 1 << n);
    for (b, &j) in couplings.iter().enumerate() {
        for s in [&sx, &sy, &sz] {
            h -= site_op(s, b, n) * site_op(s, b + 1, n) * c(j);
        }
    }
    for (s, &f) in fields.iter().enumerate() {
        h += site_op(&sz, s, n) * c(f);
    }
    h
}

/// Extended Bose-Hubbard chain with the half offsets kept.
pub fn ebh_chain(couplings: &[f64], fields: &[f64], d: usize) -> Dense {
    let n = fields.len();
    let a: Vec<Dense> = (0..n).map(|s| site_op(&annihilation(d), s, n)).collect();
    let ad: Vec<Dense> = a.iter().map(|m| m.adjoint()).collect();
    let num: Vec<Dense> = (0..n).map(|s| site_op(&number(d), s, n)).collect();
    let half = identity(d, n) * c(0.5);
    let mut h = Dense::zeros(a[0].nrows(), a[0].nrows());
    for (b, &jc) in couplings.iter().enumerate() {
        let (j, k) = (b, b + 1);
        let fwd = &ad[j] * &a[k] - &ad[j] * (&num[j] + &num[k]) * &a[k];
        h -= (&fwd + fwd.adjoint()) * c(jc / 2.0);
        h -= (&num[j] - &half) * (&num[k] - &half) * c(jc);
    }
    for (s, &f) in fields.iter().enumerate() {
        h += (&num[s] - &half) * c(f);
    }
    h
}

/// Boson image of the chain with `S^+ = a^dag (1 - n)` and the given `S^-`.
fn encoded_chain(couplings: &[f64], fields: &[f64], d: usize, dyson: bool) -> Dense {
    let n = fields.len();
    let a = annihilation(d);
    let one_minus_n = Dense::identity(d, d) - number(d);
    let sp_local = a.adjoint() * &one_minus_n;
    let sm_local = if dyson { a.clone() } else { &one_minus_n * &a };
    let sz_local = number(d) - Dense::identity(d, d) * c(0.5);
    let sp: Vec<Dense> = (0..n).map(|s| site_op(&sp_local, s, n)).collect();
    let sm: Vec<Dense> = (0..n).map(|s| site_op(&sm_local, s, n)).collect();
    let sz: Vec<Dense> = (0..n).map(|s| site_op(&sz_local, s, n)).collect();
    let mut h = Dense::zeros(sp[0].nrows(), sp[0].nrows());
    for (b, &jc) in couplings.iter().enumerate() {
        let (j, k) = (b, b + 1);
        h -= (&sp[j] * &sm[k] * c(0.5) + &sm[j] * &sp[k] * c(0.5) + &sz[j] * &sz[k]) * c(jc);
    }
    for (s, &f) in fields.iter().enumerate() {
        h += &sz[s] * c(f);
    }
    h
}

pub fn hp_chain(couplings: &[f64], fields: &[f64], d: usize) -> Dense {
    encoded_chain(couplings, fields, d, false)
}

pub fn dm_chain(couplings: &[f64], fields: &[f64], d: usize) -> Dense {
    encoded_chain(couplings, fields, d, true)
}

/// Homogeneous rotating-wave array without constants:
/// on-site `(w + dw - Dt_s) n`, hopping `t`, cross-Kerr `-D n n`, correlated
/// hopping `T a^dag_k n_j a_j + T a^dag_k n_k a_j + h.c.`, and when `full`
/// the terms `dw/2 (a^dag)^2 a^2` and `-D/4 (a_k^2 (a^dag_j)^2 + h.c.)`.
pub struct ArrayOracle {
    pub omega: f64,
    pub delta_omega: f64,
    pub hopping: f64,
    pub cross_kerr: f64,
    pub corr: f64,
}

impl ArrayOracle {
    pub fn build(&self, n: usize, d: usize, full: bool) -> Dense {
        let a: Vec<Dense> = (0..n).map(|s| site_op(&annihilation(d), s, n)).collect();
        let ad: Vec<Dense> = a.iter().map(|m| m.adjoint()).collect();
        let num: Vec<Dense> = (0..n).map(|s| site_op(&number(d), s, n)).collect();
        let mut h = Dense::zeros(a[0].nrows(), a[0].nrows());
        for s in 0..n {
            let bonds = (s > 0) as usize + (s + 1 < n) as usize;
            let tilde = self.cross_kerr * bonds as f64 / 2.0;
            h += &num[s] * c(self.omega + self.delta_omega - tilde);
            if full {
                h += &ad[s] * &ad[s] * &a[s] * &a[s] * c(self.delta_omega / 2.0);
            }
        }
        for j in 0..n.saturating_sub(1) {
            let k = j + 1;
            let hop = &ad[j] * &a[k];
            h += (&hop + hop.adjoint()) * c(self.hopping);
            h -= &num[j] * &num[k] * c(self.cross_kerr);
            let corr = &ad[k] * &num[j] * &a[j] + &ad[k] * &num[k] * &a[j];
            h += (&corr + corr.adjoint()) * c(self.corr);
            if full {
                let pair = &a[k] * &a[k] * &ad[j] * &ad[j];
                h -= (&pair + pair.adjoint()) * c(self.cross_kerr / 4.0);
            }
        }
        h
    }
}
