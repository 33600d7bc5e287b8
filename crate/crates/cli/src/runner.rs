//! Executes a validated experiment and writes its artifacts.

use std::path::PathBuf;

use serde::Serialize;
use spinbridge::dynamics::{evolve_tracked, Trajectory};
use spinbridge::hilbert::named_initial_state;
use spinbridge::mapping::{circuit_to_spin, derive_jja_params, ParameterSheet};
use spinbridge::operators::{build_h_ebh, build_h_jja, build_h_spin, observable, JjaVariant};
use spinbridge::verify::{compare_projected, EquivalenceReport};
use spinbridge::{CircuitSpec, FockBasis, Sector, SparseOperator, SpinModelSpec};

use crate::config::{BosonHamiltonian, ExperimentConfig, Kind};
use crate::error::CliError;
use crate::output;

/// Environment variable bounding the worker threads of a run.
pub const THREADS_ENV: &str = "SPINBRIDGE_THREADS";

#[derive(Debug, Default)]
pub struct Summary {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

fn threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

struct Setup {
    spin: SpinModelSpec,
    circuit: Option<CircuitSpec>,
}

fn setup(cfg: &ExperimentConfig) -> Result<Setup, CliError> {
    let circuit = cfg.circuit()?;
    let spin = match (cfg.model()?, &circuit) {
        (Some(m), _) => m,
        (None, Some(c)) => circuit_to_spin(c)?,
        (None, None) => return Err(CliError::Validation("no spin model".into())),
    };
    Ok(Setup { spin, circuit })
}

struct BosonSide {
    h: SparseOperator,
    label: &'static str,
}

fn boson_side(
    cfg: &ExperimentConfig,
    setup: &Setup,
    basis: &FockBasis,
    force_jja: bool,
) -> Result<BosonSide, CliError> {
    let choice = match cfg.experiment.boson_hamiltonian {
        _ if force_jja => BosonHamiltonian::Jja,
        BosonHamiltonian::Auto if setup.circuit.is_some() => BosonHamiltonian::Jja,
        BosonHamiltonian::Auto => BosonHamiltonian::Ebh,
        other => other,
    };
    match choice {
        BosonHamiltonian::Jja => {
            let circuit = setup
                .circuit
                .as_ref()
                .ok_or_else(|| CliError::Validation("the array Hamiltonian needs a circuit".into()))?;
            let params = derive_jja_params(circuit)?;
            let label = match cfg.experiment.variant {
                JjaVariant::Full => "jja_full",
                JjaVariant::Simplified => "jja_simplified",
            };
            Ok(BosonSide { h: build_h_jja(&params, basis, cfg.experiment.variant)?, label })
        }
        _ => Ok(BosonSide { h: build_h_ebh(&setup.spin, basis)?, label: "ebh" }),
    }
}

struct Job {
    sector: Sector,
    basis: FockBasis,
    h: SparseOperator,
    label: &'static str,
    mask: Option<Vec<usize>>,
}

fn evolve_job(cfg: &ExperimentConfig, job: &Job) -> Result<Trajectory, CliError> {
    let exp = &cfg.experiment;
    let psi = named_initial_state(job.basis, exp.initial_state, job.sector)?;
    let ops: Vec<SparseOperator> = exp
        .observables
        .iter()
        .map(|&k| observable(k, job.sector, &job.basis))
        .collect::<spinbridge::Result<_>>()?;
    let named: Vec<(&str, &SparseOperator)> = exp.observables.iter().map(|k| k.name()).zip(&ops).collect();
    let traj = evolve_tracked(&job.h, &psi, &cfg.evolution, &named, job.mask.as_deref())?;
    Ok(traj.labelled(job.label, exp.initial_state.name()))
}

/// Evolves the jobs, concurrently when more than one thread is allowed.
fn evolve_all(cfg: &ExperimentConfig, jobs: &[Job]) -> Result<Vec<Trajectory>, CliError> {
    if threads() < 2 || jobs.len() < 2 {
        return jobs.iter().map(|j| evolve_job(cfg, j)).collect();
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = jobs.iter().map(|j| scope.spawn(move || evolve_job(cfg, j))).collect();
        handles.into_iter().map(|h| h.join().expect("evolution thread panicked")).collect()
    })
}

fn spin_job(setup: &Setup) -> Result<Job, CliError> {
    let basis = FockBasis::spin(setup.spin.n_sites)?;
    Ok(Job { sector: Sector::Spin, basis, h: build_h_spin(&setup.spin)?, label: "spin", mask: None })
}

fn boson_job(cfg: &ExperimentConfig, setup: &Setup, force_jja: bool) -> Result<Job, CliError> {
    let basis = FockBasis::new(setup.spin.n_sites, cfg.experiment.cutoff)?;
    let side = boson_side(cfg, setup, &basis, force_jja)?;
    Ok(Job { sector: Sector::Boson, basis, h: side.h, label: side.label, mask: Some(basis.physical_mask()) })
}

#[derive(Serialize)]
struct VerifyOutput {
    boson_hamiltonian: &'static str,
    cutoff: usize,
    n_sites: usize,
    relative_residual: f64,
    report: EquivalenceReport,
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Summary, CliError> {
    cfg.validate()?;
    let dir = cfg.output.dir.clone();
    let digits = cfg.output.precision;
    let mut summary = Summary::default();
    let exp = &cfg.experiment;
    if exp.kind.evolves() && exp.observables.is_empty() {
        log::warn!("no observables requested; nothing to evolve");
        return Ok(summary);
    }
    let setup = setup(cfg)?;
    match exp.kind {
        Kind::Spin | Kind::Boson | Kind::Jja => {
            let job = match exp.kind {
                Kind::Spin => spin_job(&setup)?,
                _ => boson_job(cfg, &setup, exp.kind == Kind::Jja)?,
            };
            let traj = evolve_job(cfg, &job)?;
            let name = format!("trajectory_{}.csv", job.sector.name());
            summary.files.push(output::write(&dir.join(name), &output::trajectory_csv(&traj, digits))?);
            if cfg.output.plot_data {
                summary.files.extend(output::emit_plotdata(&dir, &[(job.sector, &traj)], digits)?);
            }
            if let Some(leak) = traj.max_leakage() {
                summary.lines.push(format!("{}: max leakage {leak:.3e}", traj.hamiltonian_label));
            }
        }
        Kind::Compare => {
            let jobs = [spin_job(&setup)?, boson_job(cfg, &setup, false)?];
            let trajs = evolve_all(cfg, &jobs)?;
            let (spin, boson) = (&trajs[0], &trajs[1]);
            for kind in &exp.observables {
                let csv = output::compare_csv(spin, boson, kind.name(), digits)?;
                summary.files.push(output::write(&dir.join(format!("compare_{}.csv", kind.name())), &csv)?);
                let a = spin.series(kind.name()).unwrap_or_default();
                let b = boson.series(kind.name()).unwrap_or_default();
                let worst = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                summary.lines.push(format!("{}: max |spin - {}| = {worst:.3e}", kind.name(), boson.hamiltonian_label));
            }
            summary.lines.push(format!("max leakage {:.3e}", boson.max_leakage().unwrap_or(0.0)));
            if cfg.output.plot_data {
                let runs = [(Sector::Spin, spin), (Sector::Boson, boson)];
                summary.files.extend(output::emit_plotdata(&dir, &runs, digits)?);
            }
        }
        Kind::Design => {
            let circuit = setup.circuit.as_ref().expect("validated");
            let sheet = ParameterSheet::from_circuit(circuit)?;
            let csv = output::parameter_sheet_csv(&sheet, digits);
            summary.files.push(output::write(&dir.join("parameter_sheet.csv"), &csv)?);
            summary.lines.push(format!(
                "E'_J = {} MHz, omega = {} MHz, Delta = {} MHz, T = {} MHz, t = {} MHz, E_coup = {} MHz",
                sheet.e_prime_j, sheet.omega, sheet.cross_kerr, sheet.corr_hopping, sheet.hopping, sheet.e_coup
            ));
            if sheet.constraint_residual.abs() > 1e-9 * sheet.e_coup.abs().max(1.0) {
                summary.lines.push(format!(
                    "warning: E_coup misses the matching condition by {} MHz",
                    sheet.constraint_residual
                ));
            }
        }
        Kind::Verify => {
            let spin = spin_job(&setup)?;
            let boson = boson_job(cfg, &setup, false)?;
            let report = compare_projected(&boson.h, &spin.h, boson.mask.as_deref().expect("boson mask"))?;
            let out = VerifyOutput {
                boson_hamiltonian: boson.label,
                cutoff: exp.cutoff,
                n_sites: setup.spin.n_sites,
                relative_residual: report.relative_residual(),
                report,
            };
            let json = serde_json::to_string_pretty(&out).expect("report serializes") + "\n";
            summary.files.push(output::write(&dir.join("equivalence_report.json"), &json)?);
            summary.lines.push(format!(
                "{}: offset {:.6} MHz, residual {:.3e} ({:.3e} relative), |QHP| {:.3e}",
                boson.label, out.report.offset, out.report.residual_max, out.relative_residual, out.report.coupling_norm
            ));
            if cfg.output.dump_matrices {
                for (name, h) in [("h_spin.triplets", &spin.h), ("h_boson.triplets", &boson.h)] {
                    let mut buf = Vec::new();
                    h.write_triplets(&mut buf).expect("writing to memory");
                    let text = String::from_utf8(buf).expect("triplets are ASCII");
                    summary.files.push(output::write(&dir.join(name), &text)?);
                }
            }
        }
    }
    Ok(summary)
}
