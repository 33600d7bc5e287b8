//! Parameter arithmetic between circuit energies, the rotating-wave array
//! Hamiltonian and the Heisenberg chain.
//!
//! Bond `b` of an `N`-site array joins sites `b` and `b + 1`; it is circuit
//! link `b + 1`. Bond quantities use the charging and inductive energy of
//! their left site, which is exact when `E_C / E_L` is uniform along the
//! array (checked and warned otherwise).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoundaryLinks, CircuitSpec, SpinModelSpec, Validate, COUPLING_RATIO_LIMIT};
use crate::units;

/// Relative spread of `E_C / E_L` tolerated before warning.
pub const RATIO_UNIFORMITY_TOL: f64 = 1e-6;
/// Relative constraint residual tolerated by [`circuit_to_spin`] before warning.
pub const CONSTRAINT_WARN_TOL: f64 = 1e-6;
/// Coupling capacitance ratio `C'/C` above which the weak-coupling limit is doubtful.
pub const CAPACITANCE_RATIO_WARN: f64 = 0.1;

/// Rotating-wave Hamiltonian parameters, MHz, `omega` as `omega / 2 pi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JjaParams {
    /// Oscillator frequency per site.
    pub omega: Vec<f64>,
    /// Anharmonicity per site, `-E_C`.
    pub delta_omega: Vec<f64>,
    /// Inductive energy per site.
    pub e_l: Vec<f64>,
    /// Edge-halved average of the neighbouring cross-Kerr couplings, per site.
    pub delta_tilde: Vec<f64>,
    /// Linear hopping per bond.
    pub hopping: Vec<f64>,
    /// Cross-Kerr coupling per bond.
    pub cross_kerr: Vec<f64>,
    /// Correlated hopping conditioned on the left site, per bond.
    pub corr_hopping: Vec<f64>,
    /// Correlated hopping conditioned on the right site, per bond.
    pub corr_hopping_prime: Vec<f64>,
}

impl JjaParams {
    pub fn n_sites(&self) -> usize {
        self.omega.len()
    }

    pub fn check_shape(&self) -> Result<()> {
        let n = self.n_sites();
        if n == 0 {
            return Err(Error::InvalidSpec("array needs at least one site".into()));
        }
        let site_ok = [&self.delta_omega, &self.e_l, &self.delta_tilde].iter().all(|v| v.len() == n);
        let bond_ok = [&self.hopping, &self.cross_kerr, &self.corr_hopping, &self.corr_hopping_prime]
            .iter()
            .all(|v| v.len() + 1 == n);
        if !(site_ok && bond_ok) {
            return Err(Error::Unsupported(
                "array parameters must describe an open nearest-neighbour chain".into(),
            ));
        }
        Ok(())
    }

    /// Site-averaged bond quantity: `(x_{s-1} + x_s) / 2` with missing bonds
    /// counted as zero, i.e. halved at the chain ends.
    pub fn edge_halved(bonds: &[f64], n_sites: usize) -> Vec<f64> {
        (0..n_sites)
            .map(|s| {
                let left = if s > 0 { bonds[s - 1] } else { 0.0 };
                let right = bonds.get(s).copied().unwrap_or(0.0);
                (left + right) / 2.0
            })
            .collect()
    }
}

/// Charging and capacitive-coupling energies, MHz.
#[derive(Clone, Debug, PartialEq)]
pub struct CapacitiveEnergies {
    pub e_c: Vec<f64>,
    /// Per link; the two grounded end links carry zero.
    pub e_coup: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Charging energies from the site capacitances `c` (fF, one per site) and the
/// coupling capacitances `c_coup` (fF, one per link, `n + 1` entries).
pub fn capacitive_energies(c: &[f64], c_coup: &[f64]) -> Result<CapacitiveEnergies> {
    let n = c.len();
    if n == 0 || c_coup.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: c_coup.len() });
    }
    if let Some(bad) = c.iter().chain(c_coup).find(|&&x| !(x.is_finite() && x >= 0.0)) {
        return Err(Error::InvalidSpec(format!("capacitance {bad} must be non-negative")));
    }
    if c.iter().any(|&x| x == 0.0) {
        return Err(Error::InvalidSpec("site capacitance must be positive".into()));
    }
    // Total capacitance seen by each site.
    let total: Vec<f64> = (0..n).map(|s| c[s] + c_coup[s] + c_coup[s + 1]).collect();
    let e_c: Vec<f64> = total.iter().map(|&t| units::charging_energy_mhz(t)).collect();
    let mut e_coup = vec![0.0; n + 1];
    for link in 1..n {
        let (left, right) = (link - 1, link);
        // e^2 C' / (2 C_left C_right) = 2 E_C,left E_C,right C' / e^2
        e_coup[link] = units::charging_energy_mhz(total[left]) * c_coup[link] / total[right];
    }
    let warnings = (0..n)
        .flat_map(|s| [(s, c_coup[s]), (s, c_coup[s + 1])])
        .filter(|&(s, cc)| cc / c[s] > CAPACITANCE_RATIO_WARN)
        .map(|(s, cc)| format!("C'/C = {:.4} at site {s} exceeds {CAPACITANCE_RATIO_WARN}", cc / c[s]))
        .collect();
    Ok(CapacitiveEnergies { e_c, e_coup, warnings })
}

/// Right-hand side of the exact matching condition,
/// `E'_J (E_C / E_L) (1 - sqrt(E_C / 2 E_L))`.
pub fn exact_coupling_energy(e_prime_j: f64, e_c: f64, e_l: f64) -> f64 {
    e_prime_j * (e_c / e_l) * (1.0 - (e_c / (2.0 * e_l)).sqrt())
}

/// Leading-order form of the matching condition, `E'_J E_C / E_L`.
pub fn simplified_coupling_energy(e_prime_j: f64, e_c: f64, e_l: f64) -> f64 {
    e_prime_j * e_c / e_l
}

/// Inverts the leading-order condition with `E_L = E_J + 2 E'_J`:
/// `E'_J = E_J x / (1 - 2x)`, `x = E_coup / E_C`.
pub fn coupling_josephson_from_simplified(e_c: f64, e_j: f64, e_coup: f64) -> Result<f64> {
    let x = e_coup / e_c;
    if !(x >= 0.0 && x < COUPLING_RATIO_LIMIT) {
        return Err(Error::Infeasible(format!(
            "E_coup/E_C = {x} must lie in [0, {COUPLING_RATIO_LIMIT})"
        )));
    }
    Ok(e_j * x / (1.0 - 2.0 * x))
}

/// Linear hopping `sqrt(2) E_coup sqrt(E_L/E_C) - sqrt(2) E'_J sqrt(E_C/E_L)`.
pub fn linear_hopping(e_coup: f64, e_prime_j: f64, e_c: f64, e_l: f64) -> f64 {
    let s2 = std::f64::consts::SQRT_2;
    s2 * e_coup * (e_l / e_c).sqrt() - s2 * e_prime_j * (e_c / e_l).sqrt()
}

fn warn_nonuniform_ratio(e_c: &[f64], e_l: &[f64]) {
    let ratios: Vec<f64> = e_c.iter().zip(e_l).map(|(c, l)| c / l).collect();
    let first = ratios[0];
    if let Some((s, r)) = ratios
        .iter()
        .enumerate()
        .find(|(_, &r)| ((r - first) / first).abs() > RATIO_UNIFORMITY_TOL)
    {
        log::warn!("E_C/E_L = {r} at site {s} differs from {first} at site 0");
    }
}

fn validated(circuit: &CircuitSpec) -> Result<Vec<f64>> {
    let report = circuit.validate();
    for w in report.warnings() {
        log::warn!("{}", w.message);
    }
    report.into_result()?;
    let e_l = circuit.inductive_energies();
    warn_nonuniform_ratio(&circuit.e_c, &e_l);
    Ok(e_l)
}

/// Oscillator and coupling parameters of the rotating-wave Hamiltonian.
pub fn derive_jja_params(circuit: &CircuitSpec) -> Result<JjaParams> {
    let e_l = validated(circuit)?;
    let n = circuit.n_sites();
    let e_c = &circuit.e_c;
    let omega: Vec<f64> = (0..n).map(|s| (8.0 * e_c[s] * e_l[s]).sqrt()).collect();
    let delta_omega: Vec<f64> = e_c.iter().map(|&x| -x).collect();
    let mut hopping = Vec::with_capacity(n.saturating_sub(1));
    let mut cross_kerr = Vec::with_capacity(n.saturating_sub(1));
    for b in 0..n.saturating_sub(1) {
        let link = b + 1;
        let ep = circuit.e_prime_j[link];
        cross_kerr.push(2.0 * ep * e_c[b] / e_l[b]);
        hopping.push(linear_hopping(circuit.e_coup[link], ep, e_c[b], e_l[b]));
    }
    let corr: Vec<f64> = cross_kerr.iter().map(|d| d / 2.0).collect();
    Ok(JjaParams {
        delta_tilde: JjaParams::edge_halved(&cross_kerr, n),
        omega,
        delta_omega,
        e_l,
        hopping,
        cross_kerr,
        corr_hopping: corr.clone(),
        corr_hopping_prime: corr,
    })
}

/// `E_coup - E'_J (E_C/E_L)(1 - sqrt(E_C/2E_L))` per bond; zero means the
/// array realizes the Heisenberg chain exactly.
pub fn constraint_residual(circuit: &CircuitSpec) -> Result<Vec<f64>> {
    let e_l = validated(circuit)?;
    Ok((0..circuit.n_sites().saturating_sub(1))
        .map(|b| {
            let link = b + 1;
            circuit.e_coup[link] - exact_coupling_energy(circuit.e_prime_j[link], circuit.e_c[b], e_l[b])
        })
        .collect())
}

/// Heisenberg couplings and fields realized by a circuit:
/// `J_b = 2 E'_J E_C / E_L` and
/// `h_s = sqrt(8 E_C E_L) - E_C - 4 E~'_J E_C / E_L`, where `E~'_J` is the
/// edge-halved average of the interior coupling junctions.
pub fn circuit_to_spin(circuit: &CircuitSpec) -> Result<SpinModelSpec> {
    let e_l = validated(circuit)?;
    let n = circuit.n_sites();
    let e_c = &circuit.e_c;
    let interior: Vec<f64> = (1..n).map(|link| circuit.e_prime_j[link]).collect();
    let couplings: Vec<f64> = (0..n.saturating_sub(1))
        .map(|b| 2.0 * interior[b] * e_c[b] / e_l[b])
        .collect();
    let e_prime_tilde = JjaParams::edge_halved(&interior, n);
    let fields: Vec<f64> = (0..n)
        .map(|s| (8.0 * e_c[s] * e_l[s]).sqrt() - e_c[s] - 4.0 * e_prime_tilde[s] * e_c[s] / e_l[s])
        .collect();
    for (b, r) in constraint_residual(circuit)?.into_iter().enumerate() {
        let scale = circuit.e_coup[b + 1].abs().max(f64::MIN_POSITIVE);
        if r.abs() > CONSTRAINT_WARN_TOL * scale {
            log::warn!("bond {b} misses the matching condition by {r:.6} MHz");
        }
    }
    SpinModelSpec::chain_with(&couplings, &fields)
}

/// Spin parameters read off the Hamiltonian parameters directly:
/// `J = Delta`, `h = omega + delta_omega - 2 Delta~`.
pub fn spin_from_jja(params: &JjaParams) -> Result<SpinModelSpec> {
    params.check_shape()?;
    let fields: Vec<f64> = (0..params.n_sites())
        .map(|s| params.omega[s] + params.delta_omega[s] - 2.0 * params.delta_tilde[s])
        .collect();
    SpinModelSpec::chain_with(&params.cross_kerr, &fields)
}

/// Homogeneous design target. The field, when given, is the bulk field of
/// an interior site.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignTarget {
    pub n_sites: usize,
    pub coupling: f64,
    pub field: Option<f64>,
}

/// Fixed circuit energies the design is built around, MHz. `e_j` is ignored
/// when a target field is requested.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignAnchors {
    pub e_c: f64,
    pub e_j: f64,
}

/// Absolute tolerance on `E_J` (MHz) for the field solve.
pub const DESIGN_SOLVE_TOL: f64 = 1e-9;
/// The field solve brackets `E_J` in `[E_C, DESIGN_BRACKET_MAX * E_C]`.
pub const DESIGN_BRACKET_MAX: f64 = 1e6;

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Infeasible(format!(
            "no sign change on [{lo}, {hi}] (f = {f_lo}, {f_hi})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Coupling junction energy realizing `coupling` for a bulk site:
/// `J (E_J + 2E'_J) = 2 E'_J E_C` gives `E'_J = E_J J / (2 (E_C - J))`.
pub fn coupling_josephson_for(coupling: f64, e_c: f64, e_j: f64) -> Result<f64> {
    if !(coupling >= 0.0 && coupling < e_c) {
        return Err(Error::Infeasible(format!(
            "coupling {coupling} MHz must lie in [0, E_C = {e_c})"
        )));
    }
    Ok(e_j * coupling / (2.0 * (e_c - coupling)))
}

/// Bulk field of a homogeneous array with the given energies.
fn bulk_field(e_c: f64, e_j: f64, e_prime_j: f64) -> f64 {
    let e_l = e_j + 2.0 * e_prime_j;
    (8.0 * e_c * e_l).sqrt() - e_c - 4.0 * e_prime_j * e_c / e_l
}

/// Homogeneous inverse design: fixes `E'_J` from the coupling, optionally
/// solves `E_J` for the bulk field, then sets `E_coup` from the exact
/// matching condition.
pub fn design_circuit(
    target: &DesignTarget,
    anchors: &DesignAnchors,
    boundary: BoundaryLinks,
) -> Result<CircuitSpec> {
    let e_c = anchors.e_c;
    if target.n_sites == 0 {
        return Err(Error::InvalidSpec("design needs at least one site".into()));
    }
    if !(e_c.is_finite() && e_c > 0.0) {
        return Err(Error::InvalidSpec(format!("E_C must be positive, got {e_c}")));
    }
    let j = target.coupling;
    coupling_josephson_for(j, e_c, 1.0)?;
    let e_j = match target.field {
        None => anchors.e_j,
        Some(h) => {
            let residual = |e_j: f64| {
                let e_prime = e_j * j / (2.0 * (e_c - j));
                bulk_field(e_c, e_j, e_prime) - h
            };
            bisect(residual, e_c, DESIGN_BRACKET_MAX * e_c, DESIGN_SOLVE_TOL).map_err(|e| {
                Error::Infeasible(format!("field {h} MHz is not reachable with E_C = {e_c}: {e}"))
            })?
        }
    };
    if !(e_j.is_finite() && e_j > 0.0) {
        return Err(Error::InvalidSpec(format!("E_J must be positive, got {e_j}")));
    }
    let e_prime = coupling_josephson_for(j, e_c, e_j)?;
    let e_coup = exact_coupling_energy(e_prime, e_c, e_j + 2.0 * e_prime);
    CircuitSpec::homogeneous(target.n_sites, e_c, e_j, e_prime, e_coup, boundary)
}

/// Table-style summary of a homogeneous design, MHz, `omega` as `omega/2pi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSheet {
    pub e_c: f64,
    pub e_j: f64,
    pub e_l: f64,
    pub e_coup: f64,
    pub e_coup_simplified: f64,
    pub e_prime_j: f64,
    pub omega: f64,
    pub corr_hopping: f64,
    pub delta_omega: f64,
    pub cross_kerr: f64,
    pub hopping: f64,
    pub constraint_residual: f64,
    pub coupling: f64,
    pub field_bulk: f64,
    pub field_edge: f64,
}

impl ParameterSheet {
    /// Summarizes the bulk of a circuit with at least two sites.
    pub fn from_circuit(circuit: &CircuitSpec) -> Result<Self> {
        let n = circuit.n_sites();
        if n < 2 {
            return Err(Error::InvalidSpec("a parameter sheet needs at least two sites".into()));
        }
        let params = derive_jja_params(circuit)?;
        let spin = circuit_to_spin(circuit)?;
        let residual = constraint_residual(circuit)?;
        let s = n / 2;
        let b = s.min(n - 2);
        Ok(Self {
            e_c: circuit.e_c[s],
            e_j: circuit.e_j[s],
            e_l: params.e_l[s],
            e_coup: circuit.e_coup[b + 1],
            e_coup_simplified: simplified_coupling_energy(
                circuit.e_prime_j[b + 1],
                circuit.e_c[b],
                params.e_l[b],
            ),
            e_prime_j: circuit.e_prime_j[b + 1],
            omega: params.omega[s],
            corr_hopping: params.corr_hopping[b],
            delta_omega: params.delta_omega[s],
            cross_kerr: params.cross_kerr[b],
            hopping: params.hopping[b],
            constraint_residual: residual[b],
            coupling: spin.edges[b].coupling,
            field_bulk: spin.fields[s],
            field_edge: spin.fields[0],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const E_C: f64 = 200.0;
    const E_J: f64 = 12_500.0;
    const E_PRIME: f64 = 1_562.5;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn table(n: usize, e_coup: f64) -> CircuitSpec {
        CircuitSpec::homogeneous(n, E_C, E_J, E_PRIME, e_coup, BoundaryLinks::Matched).unwrap()
    }

    #[test]
    fn table_oscillator_parameters() {
        let p = derive_jja_params(&table(4, 18.4)).unwrap();
        for s in 0..4 {
            assert_eq!(p.e_l[s], 15_625.0);
            assert!(rel(p.omega[s], 5_000.0) < 1e-15);
            assert_eq!(p.delta_omega[s], -200.0);
        }
        for b in 0..3 {
            assert!(rel(p.cross_kerr[b], 40.0) < 1e-15);
            assert!(rel(p.corr_hopping[b], 20.0) < 1e-15);
            assert!(rel(p.corr_hopping_prime[b], 20.0) < 1e-15);
            assert!(rel(p.hopping[b], -20.0) < 1e-9, "{}", p.hopping[b]);
        }
        assert_eq!(p.delta_tilde, vec![20.0, 40.0, 40.0, 20.0]);
    }

    #[test]
    fn decoupled_junctions() {
        let c = CircuitSpec::homogeneous(3, E_C, E_J, 0.0, 10.0, BoundaryLinks::Matched).unwrap();
        let p = derive_jja_params(&c).unwrap();
        assert!(p.cross_kerr.iter().all(|&d| d == 0.0));
        assert!(p.corr_hopping.iter().all(|&t| t == 0.0));
        let expect = std::f64::consts::SQRT_2 * 10.0 * (E_J / E_C).sqrt();
        assert!(rel(p.hopping[0], expect) < 1e-15);
    }

    #[test]
    fn residuals() {
        let exact = constraint_residual(&table(3, 18.4)).unwrap();
        assert!(exact.iter().all(|r| r.abs() < 1e-9), "{exact:?}");
        let simple = constraint_residual(&table(3, 20.0)).unwrap();
        assert!(simple.iter().all(|r| (r - 1.6).abs() < 1e-9), "{simple:?}");
        let none = CircuitSpec::homogeneous(3, E_C, E_J, 0.0, 0.0, BoundaryLinks::Matched).unwrap();
        assert!(constraint_residual(&none).unwrap().iter().all(|&r| r == 0.0));
    }

    #[test]
    fn table_spin_parameters() {
        let spin = circuit_to_spin(&table(5, 18.4)).unwrap();
        assert!(spin.edges.iter().all(|e| rel(e.coupling, 40.0) < 1e-15));
        assert!(rel(spin.fields[0], 4_760.0) < 1e-15);
        assert!(rel(spin.fields[2], 4_720.0) < 1e-15);
        assert!(rel(spin.fields[4], 4_760.0) < 1e-15);
    }

    #[test]
    fn two_routes_to_spin_parameters_agree() {
        for boundary in [BoundaryLinks::Matched, BoundaryLinks::Grounded] {
            let c = CircuitSpec::homogeneous(6, E_C, E_J, E_PRIME, 18.4, boundary).unwrap();
            let direct = circuit_to_spin(&c).unwrap();
            let via = spin_from_jja(&derive_jja_params(&c).unwrap()).unwrap();
            if boundary == BoundaryLinks::Matched {
                for (a, b) in direct.fields.iter().zip(&via.fields) {
                    assert!(rel(*a, *b) < 1e-12);
                }
            }
            for (a, b) in direct.edges.iter().zip(&via.edges) {
                assert!(rel(a.coupling, b.coupling) < 1e-12);
            }
        }
    }

    #[test]
    fn exact_hopping_equals_minus_half_cross_kerr_symbolically() {
        // With the exact coupling energy the sqrt(2) terms reduce to
        // -E'_J E_C / E_L, i.e. -Delta/2.
        for (e_c, e_j, e_prime) in [(200.0, 12_500.0, 1_562.5), (150.0, 9_000.0, 300.0), (300.0, 20_000.0, 50.0)] {
            let e_l = e_j + 2.0 * e_prime;
            let e_coup = exact_coupling_energy(e_prime, e_c, e_l);
            let t = linear_hopping(e_coup, e_prime, e_c, e_l);
            assert!(rel(t, -e_prime * e_c / e_l) < 1e-9);
            let t_simple = linear_hopping(simplified_coupling_energy(e_prime, e_c, e_l), e_prime, e_c, e_l);
            assert!(t_simple.abs() < 1e-9 * e_prime);
        }
    }

    #[test]
    fn simplified_inverse() {
        let ep = coupling_josephson_from_simplified(E_C, E_J, 20.0).unwrap();
        assert!(rel(ep, 1_562.5) < 1e-12);
        assert!(coupling_josephson_from_simplified(E_C, E_J, 120.0).is_err());
    }

    #[test]
    fn design_table_circuit() {
        let target = DesignTarget { n_sites: 4, coupling: 40.0, field: None };
        let anchors = DesignAnchors { e_c: E_C, e_j: E_J };
        let c = design_circuit(&target, &anchors, BoundaryLinks::Matched).unwrap();
        assert!(rel(c.e_prime_j[1], 1_562.5) < 1e-15);
        assert!(rel(c.e_coup[1], 18.4) < 1e-12, "{}", c.e_coup[1]);
        assert!(constraint_residual(&c).unwrap().iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn design_decoupling_limit() {
        let target = DesignTarget { n_sites: 3, coupling: 0.0, field: None };
        let c = design_circuit(&target, &DesignAnchors { e_c: E_C, e_j: E_J }, BoundaryLinks::Matched)
            .unwrap();
        assert!(c.e_prime_j.iter().all(|&x| x == 0.0));
        assert!(c.e_coup.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn infeasible_designs() {
        let anchors = DesignAnchors { e_c: E_C, e_j: E_J };
        for j in [200.0, 250.0] {
            let target = DesignTarget { n_sites: 3, coupling: j, field: None };
            assert!(matches!(
                design_circuit(&target, &anchors, BoundaryLinks::Matched),
                Err(Error::Infeasible(_))
            ));
        }
        let unreachable = DesignTarget { n_sites: 3, coupling: 40.0, field: Some(-1.0) };
        assert!(matches!(
            design_circuit(&unreachable, &anchors, BoundaryLinks::Matched),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn design_hits_requested_field() {
        let target = DesignTarget { n_sites: 5, coupling: 40.0, field: Some(4_720.0) };
        let c = design_circuit(&target, &DesignAnchors { e_c: E_C, e_j: 1.0 }, BoundaryLinks::Matched)
            .unwrap();
        assert!((c.e_j[0] - E_J).abs() < 1e-6, "{}", c.e_j[0]);
        let spin = circuit_to_spin(&c).unwrap();
        assert!(rel(spin.fields[2], 4_720.0) < 1e-9);
    }

    #[test]
    fn capacitive_limits() {
        // Decoupled: E_C = e^2 / 2C, no coupling energy.
        let e = capacitive_energies(&[96.85, 96.85], &[0.0, 0.0, 0.0]).unwrap();
        assert!(rel(e.e_c[0], units::charging_energy_mhz(96.85)) < 1e-15);
        assert!(e.e_coup.iter().all(|&x| x == 0.0));

        let (c, cc) = (100.0, 2.0);
        let e = capacitive_energies(&[c; 3], &[cc; 4]).unwrap();
        assert!(rel(e.e_c[1], units::charging_energy_mhz(c + 2.0 * cc)) < 1e-15);
        assert!(e.warnings.is_empty());
        assert!(capacitive_energies(&[0.0, 1.0], &[0.0; 3]).is_err());
        assert!(capacitive_energies(&[1.0, 1.0], &[0.0; 2]).is_err());
    }

    #[test]
    fn weak_capacitive_coupling_ratio() {
        // Choose C so that E_C = 200 MHz including the coupling capacitors.
        let total = units::charging_energy_mhz(1.0) / 200.0;
        let c = total / 1.02;
        let cc = 0.01 * c;
        let e = capacitive_energies(&[c; 3], &[0.0, cc, cc, 0.0]).unwrap();
        // Interior site sees both links.
        assert!(rel(e.e_c[1], 200.0) < 1e-12);
        // E_coup / E_C = C' / C_total(right neighbour).
        let ratio = e.e_coup[1] / e.e_c[0];
        let right_total = c + 2.0 * cc;
        assert!(rel(ratio, cc / right_total) < 1e-12);
        assert!((ratio - 0.01).abs() < 0.01 * 0.02);
    }

    #[test]
    fn sheet_matches_table() {
        let sheet = ParameterSheet::from_circuit(&table(10, 18.4)).unwrap();
        assert_eq!(sheet.e_l, 15_625.0);
        assert!(rel(sheet.omega, 5_000.0) < 1e-15);
        assert!(rel(sheet.e_coup_simplified, 20.0) < 1e-15);
        assert!(rel(sheet.field_bulk, 4_720.0) < 1e-15);
        assert!(rel(sheet.field_edge, 4_760.0) < 1e-15);
    }
}
