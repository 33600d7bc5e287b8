//! Acceptance suite. One line per criterion:
//!
//! `PASS [n] name: measured values (budget)` or `FAIL [n] ...`.
//!
//! Run with `cargo test -p spinbridge --test acceptance`.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use common::{c, Dense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinbridge::dynamics::{evolve, EvolutionConfig, Method, Trajectory};
use spinbridge::hilbert::named_initial_state;
use spinbridge::mapping::{
    circuit_to_spin, coupling_josephson_from_simplified, derive_jja_params, exact_coupling_energy,
    ParameterSheet,
};
use spinbridge::operators::{
    build_h_dm, build_h_ebh, build_h_jja, build_h_spin, embed, observable, JjaVariant, ObservableKind,
    SpinEncoding,
};
use spinbridge::units;
use spinbridge::verify::{compare_projected, compare_trajectories, project};
use spinbridge::{BoundaryLinks, C64, CircuitSpec, FockBasis, InitialState, Sector, SparseOperator, SpinModelSpec, StateVector};

const TABLE_E_C: f64 = 200.0;
const TABLE_E_J: f64 = 12_500.0;
const TABLE_E_COUP_SIMPLIFIED: f64 = 20.0;

const TOL_TABLE: f64 = 1e-12;
const TOL_HOPPING: f64 = 1e-9;
const TOL_BENCHMARK: f64 = 1e-8;
const BUDGET_BENCHMARK_S: f64 = 30.0;
const TOL_HARD_CORE: f64 = 1e-12;
const TOL_DM_HP: f64 = 1e-12;
const TOL_JJA_RELATIVE: f64 = 1e-9;
const TOL_JJA_VARIANTS: f64 = 1e-12;
const TOL_ANALYTIC: f64 = 1e-8;
const TOL_PROPAGATORS: f64 = 1e-8;
const TOL_NORM: f64 = 1e-9;
const TOL_ENERGY: f64 = 1e-8;
const BUDGET_PROPAGATORS_S: f64 = 60.0;
const TOL_COMMUTATOR: f64 = 1e-12;

type Outcome = Result<String, String>;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn gate(ok: bool, detail: String) -> Outcome {
    if ok { Ok(detail) } else { Err(detail) }
}

fn table_circuit(n: usize, e_coup: f64) -> CircuitSpec {
    let e_prime = coupling_josephson_from_simplified(TABLE_E_C, TABLE_E_J, TABLE_E_COUP_SIMPLIFIED).unwrap();
    CircuitSpec::homogeneous(n, TABLE_E_C, TABLE_E_J, e_prime, e_coup, BoundaryLinks::Matched).unwrap()
}

fn exact_e_coup() -> f64 {
    let e_prime = coupling_josephson_from_simplified(TABLE_E_C, TABLE_E_J, TABLE_E_COUP_SIMPLIFIED).unwrap();
    exact_coupling_energy(e_prime, TABLE_E_C, TABLE_E_J + 2.0 * e_prime)
}

fn table_round_trip() -> Outcome {
    let sheet = ParameterSheet::from_circuit(&table_circuit(4, TABLE_E_COUP_SIMPLIFIED)).unwrap();
    let checks = [
        ("E'_J", sheet.e_prime_j, 1_562.5),
        ("E_L", sheet.e_l, 15_625.0),
        ("omega", sheet.omega, 5_000.0),
        ("delta_omega", sheet.delta_omega, -200.0),
        ("Delta", sheet.cross_kerr, 40.0),
        ("T", sheet.corr_hopping, 20.0),
    ];
    let worst = checks.iter().map(|&(_, got, want)| rel(got, want)).fold(0.0, f64::max);
    let listing: Vec<String> = checks.iter().map(|(k, v, _)| format!("{k}={v}")).collect();
    gate(worst < TOL_TABLE, format!("{} max rel err {worst:.2e} (tol {TOL_TABLE:e})", listing.join(" ")))
}

fn exact_constraint_hopping() -> Outcome {
    let e_coup = exact_e_coup();
    let exact = ParameterSheet::from_circuit(&table_circuit(4, e_coup)).unwrap();
    let simplified = ParameterSheet::from_circuit(&table_circuit(4, TABLE_E_COUP_SIMPLIFIED)).unwrap();
    let err = rel(exact.hopping, -exact.cross_kerr / 2.0);
    let coup_err = rel(e_coup, 18.4);
    let t_simplified_zero = simplified.hopping.abs() < TOL_HOPPING * simplified.cross_kerr;
    let flagged = simplified.constraint_residual.abs() > 1e-6 * TABLE_E_COUP_SIMPLIFIED
        && exact.constraint_residual.abs() <= 1e-12 * e_coup;
    gate(
        err < TOL_HOPPING && coup_err < TOL_HOPPING && t_simplified_zero && flagged,
        format!(
            "E_coup={e_coup} t={} rel err vs -Delta/2 {err:.2e} (tol {TOL_HOPPING:e}); simplified t={:.3e}, \
             constraint residual {:.4} MHz flagged={flagged}",
            exact.hopping, simplified.hopping, simplified.constraint_residual
        ),
    )
}

fn benchmark_pairs() -> [(InitialState, ObservableKind); 3] {
    [
        (InitialState::DomainWall, ObservableKind::Sz1),
        (InitialState::AllUpX, ObservableKind::Mx),
        (InitialState::Neel, ObservableKind::Cxx),
    ]
}

fn run(h: &SparseOperator, psi: &StateVector, cfg: &EvolutionConfig, obs: &SparseOperator, name: &str) -> Trajectory {
    evolve(h, psi, cfg, &[(name, obs)]).unwrap()
}

fn benchmark_equivalence() -> Outcome {
    let start = Instant::now();
    let n = 10;
    let circuit = table_circuit(n, exact_e_coup());
    let spec = circuit_to_spin(&circuit).unwrap();
    let coupling = spec.edges[0].coupling;
    let spin_basis = FockBasis::spin(n).unwrap();
    let boson_basis = FockBasis::new(n, 2).unwrap();
    let h_spin = build_h_spin(&spec).unwrap();
    let h_jja = build_h_jja(&derive_jja_params(&circuit).unwrap(), &boson_basis, JjaVariant::Simplified).unwrap();
    let h_ebh = build_h_ebh(&spec, &boson_basis).unwrap();
    let cfg = EvolutionConfig { t_max: 0.5, n_steps: 2000, method: Method::DenseEig, ..Default::default() };
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (state, kind) in benchmark_pairs() {
        let psi_s = named_initial_state(spin_basis, state, Sector::Spin).unwrap();
        let psi_b = named_initial_state(boson_basis, state, Sector::Boson).unwrap();
        let o_s = observable(kind, Sector::Spin, &spin_basis).unwrap();
        let o_b = observable(kind, Sector::Boson, &boson_basis).unwrap();
        let a = run(&h_spin, &psi_s, &cfg, &o_s, kind.name());
        let mut pair_worst = 0.0f64;
        for h_b in [&h_jja, &h_ebh] {
            let b = run(h_b, &psi_b, &cfg, &o_b, kind.name());
            pair_worst = pair_worst.max(compare_trajectories(&a, &b).unwrap().overall_max);
        }
        worst = worst.max(pair_worst);
        parts.push(format!("{}/{}={pair_worst:.2e}", state.name(), kind.name()));
    }
    let secs = start.elapsed().as_secs_f64();
    gate(
        worst < TOL_BENCHMARK && secs < BUDGET_BENCHMARK_S && (coupling - 40.0).abs() < 1e-9,
        format!(
            "N={n} J={coupling} h_bulk={} {} max {worst:.2e} (tol {TOL_BENCHMARK:e}) in {secs:.1}s (budget {BUDGET_BENCHMARK_S}s)",
            spec.fields[n / 2],
            parts.join(" ")
        ),
    )
}

fn hard_core_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut leak, mut resid, mut oracle) = (0.0f64, 0.0f64, 0.0f64);
    for d in [3, 4] {
        for n in 2..=6 {
            for _ in 0..3 {
                let j: f64 = rng.gen_range(-2.0..2.0);
                let h: f64 = rng.gen_range(-2.0..2.0);
                let spec = SpinModelSpec::chain(n, j, h).unwrap();
                let basis = FockBasis::new(n, d).unwrap();
                let h_ebh = build_h_ebh(&spec, &basis).unwrap();
                let report = compare_projected(&h_ebh, &build_h_spin(&spec).unwrap(), &basis.physical_mask()).unwrap();
                leak = leak.max(report.coupling_norm);
                resid = resid.max(report.residual_max);
                if basis.dim() <= 1024 {
                    let dense = common::ebh_chain(&vec![j; n - 1], &vec![h; n], d);
                    let idx = common::hard_core_indices(d, n);
                    oracle = oracle.max(common::max_diff(&h_ebh.to_dense(), &dense));
                    leak = leak.max(common::leak_norm(&dense, &idx));
                    let spin = common::spin_chain(&vec![j; n - 1], &vec![h; n]);
                    resid = resid.max(common::max_diff(&common::restrict(&dense, &idx), &spin));
                }
            }
        }
    }
    gate(
        leak < TOL_HARD_CORE && resid < TOL_HARD_CORE && oracle < TOL_HARD_CORE,
        format!(
            "d in {{3,4}}, N=2..6, 3 draws each: |QHP| {leak:.2e}, residual {resid:.2e}, builder vs oracle {oracle:.2e} \
             (tol {TOL_HARD_CORE:e})"
        ),
    )
}

fn dm_hp_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1);
    let (mut diff, mut oracle) = (0.0f64, 0.0f64);
    let mut min_non_hermiticity = f64::INFINITY;
    for d in 2..=4 {
        for n in 1..=6 {
            let j: f64 = rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let h: f64 = rng.gen_range(-2.0..2.0);
            let spec = SpinModelSpec::chain(n, j, h).unwrap();
            let basis = FockBasis::new(n, d).unwrap();
            let mask = basis.physical_mask();
            let h_dm = build_h_dm(&spec, &basis).unwrap();
            let h_ebh = build_h_ebh(&spec, &basis).unwrap();
            let a = project(&h_dm, &mask).unwrap().block;
            let b = project(&h_ebh, &mask).unwrap().block;
            diff = diff.max(a.max_abs_diff(&b).unwrap());
            if d >= 3 && n >= 2 {
                min_non_hermiticity = min_non_hermiticity.min(h_dm.hermiticity_deviation() / j.abs());
                if h_dm.is_hermitian() {
                    return Err(format!("H_dm flagged Hermitian at d={d}, N={n}"));
                }
            }
            if basis.dim() <= 1024 {
                let dense = common::dm_chain(&vec![j; n.saturating_sub(1)], &vec![h; n], d);
                oracle = oracle.max(common::max_diff(&h_dm.to_dense(), &dense));
            }
        }
    }
    gate(
        diff < TOL_DM_HP && oracle < TOL_DM_HP && min_non_hermiticity > 1e-3,
        format!(
            "d=2..4, N=1..6: |P H_dm P - P H_ebh P| {diff:.2e}, builder vs oracle {oracle:.2e} (tol {TOL_DM_HP:e}); \
             min |H_dm - H_dm^dag|/|J| for d>=3 = {min_non_hermiticity:.3}"
        ),
    )
}

fn jja_projected_equivalence() -> Outcome {
    let n = 4;
    let circuit = table_circuit(n, exact_e_coup());
    let params = derive_jja_params(&circuit).unwrap();
    let spec = circuit_to_spin(&circuit).unwrap();
    let basis = FockBasis::new(n, 3).unwrap();
    let mask = basis.physical_mask();
    let h_spin = build_h_spin(&spec).unwrap();
    let simplified = build_h_jja(&params, &basis, JjaVariant::Simplified).unwrap();
    let full = build_h_jja(&params, &basis, JjaVariant::Full).unwrap();
    let report = compare_projected(&simplified, &h_spin, &mask).unwrap();
    let full_report = compare_projected(&full, &h_spin, &mask).unwrap();
    let blocks = project(&simplified, &mask)
        .unwrap()
        .block
        .max_abs_diff(&project(&full, &mask).unwrap().block)
        .unwrap();
    let outside = simplified.max_abs_diff(&full).unwrap();
    let oracle = common::ArrayOracle {
        omega: params.omega[1],
        delta_omega: params.delta_omega[1],
        hopping: params.hopping[0],
        cross_kerr: params.cross_kerr[0],
        corr: params.corr_hopping[0],
    };
    let scale = common::max_abs(&oracle.build(n, 3, true));
    let oracle_err = common::max_diff(&simplified.to_dense(), &oracle.build(n, 3, false))
        .max(common::max_diff(&full.to_dense(), &oracle.build(n, 3, true)))
        / scale;
    let dense_spin = common::spin_chain(&vec![spec.edges[0].coupling; n - 1], &spec.fields);
    let spin_oracle = common::max_diff(&h_spin.to_dense(), &dense_spin) / report.spin_max_abs;
    let relative = report.relative_residual();
    gate(
        relative < TOL_JJA_RELATIVE
            && blocks < TOL_JJA_VARIANTS
            && outside > 0.0
            && oracle_err < 1e-14
            && spin_oracle < 1e-14,
        format!(
            "N=4 d=3: residual_max {:.2e} = {relative:.2e} x |H_spin|_max (tol {TOL_JJA_RELATIVE:e}), offset {:.6}, \
             |QHP| simplified {:.2e} full {:.2e}; full vs simplified PHP {blocks:.2e} (tol {TOL_JJA_VARIANTS:e}), \
             outside {outside:.2e}; builder vs oracle {oracle_err:.1e} rel",
            report.residual_max, report.offset, report.coupling_norm, full_report.coupling_norm
        ),
    )
}

fn analytic_oracles() -> Outcome {
    let mut worst = 0.0f64;
    let field = 5.0;
    let coupling = 3.0;
    for method in [Method::DenseEig, Method::Krylov] {
        let cfg = EvolutionConfig { t_max: 5.0 / field, n_steps: 2001, method, ..Default::default() };
        let b = FockBasis::spin(1).unwrap();
        let h = build_h_spin(&SpinModelSpec::chain(1, 0.0, field).unwrap()).unwrap();
        let psi = named_initial_state(b, InitialState::AllUpX, Sector::Spin).unwrap();
        let traj = run(&h, &psi, &cfg, &observable(ObservableKind::Mx, Sector::Spin, &b).unwrap(), "x");
        for (t, v) in traj.times.iter().zip(traj.series("x").unwrap()) {
            worst = worst.max((v - 0.5 * units::phase(field, *t).cos()).abs());
        }

        let cfg = EvolutionConfig { t_max: 5.0 / coupling, n_steps: 2001, method, ..Default::default() };
        let b = FockBasis::spin(2).unwrap();
        let h = build_h_spin(&SpinModelSpec::chain(2, coupling, 0.7).unwrap()).unwrap();
        let psi = named_initial_state(b, InitialState::Neel, Sector::Spin).unwrap();
        let traj = run(&h, &psi, &cfg, &observable(ObservableKind::Sz1, Sector::Spin, &b).unwrap(), "z");
        for (t, v) in traj.times.iter().zip(traj.series("z").unwrap()) {
            worst = worst.max((v - 0.5 * units::phase(coupling, *t).cos()).abs());
        }
    }
    gate(
        worst < TOL_ANALYTIC,
        format!("Larmor h={field} and exchange J={coupling}, five periods, both propagators: max {worst:.2e} (tol {TOL_ANALYTIC:e})"),
    )
}

struct Agreement {
    observables: f64,
    norm: f64,
    energy: f64,
}

fn cross_validate(h: &SparseOperator, psi: &StateVector, obs: &[(&str, &SparseOperator)]) -> Agreement {
    let mut with_energy = obs.to_vec();
    with_energy.push(("energy", h));
    let base = EvolutionConfig { t_max: 0.5, n_steps: 2000, ..Default::default() };
    let dense = evolve(h, psi, &EvolutionConfig { method: Method::DenseEig, ..base.clone() }, &with_energy).unwrap();
    let krylov = evolve(h, psi, &EvolutionConfig { method: Method::Krylov, ..base }, &with_energy).unwrap();
    let dist = compare_trajectories(&dense, &krylov).unwrap();
    let observables = dist.per_observable.iter().filter(|d| d.name != "energy").map(|d| d.max_abs).fold(0.0, f64::max);
    let norm = dense.norms.iter().chain(&krylov.norms).map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
    let mut energy = 0.0f64;
    for traj in [&dense, &krylov] {
        let e = traj.series("energy").unwrap();
        let scale = e[0].abs().max(h.max_abs());
        energy = energy.max(e.iter().map(|x| (x - e[0]).abs() / scale).fold(0.0, f64::max));
    }
    Agreement { observables, norm, energy }
}

fn propagator_cross_validation() -> Outcome {
    let start = Instant::now();
    let n = 8;
    let spec = circuit_to_spin(&table_circuit(n, exact_e_coup())).unwrap();
    let spin_basis = FockBasis::spin(n).unwrap();
    let h_spin = build_h_spin(&spec).unwrap();
    let psi = named_initial_state(spin_basis, InitialState::DomainWall, Sector::Spin).unwrap();
    let obs: Vec<(ObservableKind, SparseOperator)> = ObservableKind::ALL
        .iter()
        .map(|&k| (k, observable(k, Sector::Spin, &spin_basis).unwrap()))
        .collect();
    let named: Vec<(&str, &SparseOperator)> = obs.iter().map(|(k, o)| (k.name(), o)).collect();
    let spin = cross_validate(&h_spin, &psi, &named);

    let n = 6;
    let circuit = table_circuit(n, exact_e_coup());
    let boson_basis = FockBasis::new(n, 3).unwrap();
    let h_boson = build_h_jja(&derive_jja_params(&circuit).unwrap(), &boson_basis, JjaVariant::Full).unwrap();
    // Five bosons with doubly occupied sites, so the d=3 levels take part.
    let mut amps = vec![c(0.0); boson_basis.dim()];
    amps[boson_basis.index_of(&[2, 0, 1, 1, 0, 1]).unwrap()] = c(1.0);
    amps[boson_basis.index_of(&[1, 1, 0, 2, 1, 0]).unwrap()] = C64::new(0.0, 1.0);
    let psi = StateVector::from_amplitudes(boson_basis, amps).unwrap();
    let obs: Vec<(ObservableKind, SparseOperator)> = ObservableKind::ALL
        .iter()
        .map(|&k| (k, observable(k, Sector::Boson, &boson_basis).unwrap()))
        .collect();
    let named: Vec<(&str, &SparseOperator)> = obs.iter().map(|(k, o)| (k.name(), o)).collect();
    let boson = cross_validate(&h_boson, &psi, &named);

    let secs = start.elapsed().as_secs_f64();
    let ok = [&spin, &boson]
        .iter()
        .all(|a| a.observables < TOL_PROPAGATORS && a.norm < TOL_NORM && a.energy < TOL_ENERGY);
    gate(
        ok && secs < BUDGET_PROPAGATORS_S,
        format!(
            "spin N=8: obs {:.2e} norm {:.2e} energy {:.2e}; boson N=6 d=3: obs {:.2e} norm {:.2e} energy {:.2e} \
             (tol {TOL_PROPAGATORS:e}/{TOL_NORM:e}/{TOL_ENERGY:e}) in {secs:.1}s (budget {BUDGET_PROPAGATORS_S}s)",
            spin.observables, spin.norm, spin.energy, boson.observables, boson.norm, boson.energy
        ),
    )
}

fn commutator_suite() -> Outcome {
    let mut worst = 0.0f64;
    let mut oracle = 0.0f64;
    let mut cases = 0;
    for d in 2..=4 {
        let local = SpinEncoding::HolsteinPrimakoff.operators(d).unwrap();
        let dense_a = common::annihilation(d);
        let one_minus_n = Dense::identity(d, d) - common::number(d);
        let dense_plus = dense_a.adjoint() * &one_minus_n;
        for n in 1..=4 {
            let basis = FockBasis::new(n, d).unwrap();
            let mask = basis.physical_mask();
            let ops = |m: &Dense| -> Vec<SparseOperator> { (0..n).map(|s| embed(&basis, s, m).unwrap()).collect() };
            let (plus, minus, z) = (ops(&local.raising), ops(&local.lowering), ops(&local.z));
            for s in 0..n {
                oracle = oracle.max(common::max_diff(&plus[s].to_dense(), &common::site_op(&dense_plus, s, n)));
            }
            let p = |op: &SparseOperator| op.restrict(&mask).unwrap();
            let zero = SparseOperator::zeros(mask.len());
            for j in 0..n {
                for k in 0..n {
                    let same = j == k;
                    let checks = [
                        (p(&z[j].commutator(&plus[k]).unwrap()), if same { p(&plus[j]) } else { zero.clone() }),
                        (p(&z[j].commutator(&minus[k]).unwrap()), if same { p(&minus[j]).scale(c(-1.0)) } else { zero.clone() }),
                        (p(&plus[j].commutator(&minus[k]).unwrap()), if same { p(&z[j]).scale(c(2.0)) } else { zero.clone() }),
                    ];
                    for (lhs, rhs) in checks {
                        worst = worst.max(lhs.max_abs_diff(&rhs).unwrap());
                        cases += 1;
                    }
                }
            }
        }
    }
    gate(
        worst < TOL_COMMUTATOR && oracle < TOL_COMMUTATOR,
        format!("{cases} relations, d=2..4, N=1..4: max {worst:.2e}, embed vs kron {oracle:.2e} (tol {TOL_COMMUTATOR:e})"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("parameter table round trip", table_round_trip),
        ("exact-constraint hopping", exact_constraint_hopping),
        ("benchmark dynamics equivalence, N=10 d=2", benchmark_equivalence),
        ("hard-core invariance of H_ebh", hard_core_invariance),
        ("DM/HP projected equality", dm_hp_equivalence),
        ("JJA projected equivalence", jja_projected_equivalence),
        ("analytic dynamics oracles", analytic_oracles),
        ("dense vs Krylov", propagator_cross_validation),
        ("HP commutator suite", commutator_suite),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| Err(format!("panicked: {}", e.downcast_ref::<String>().cloned().unwrap_or_default())));
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
