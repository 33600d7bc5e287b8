//! Text artifacts: CSV tables, plot series, parameter sheets.

use std::fs;
use std::path::{Path, PathBuf};

use spinbridge::dynamics::Trajectory;
use spinbridge::mapping::ParameterSheet;
use spinbridge::Sector;

use crate::error::CliError;

/// `x` with `digits` significant digits in scientific notation.
pub fn format_number(x: f64, digits: usize) -> String {
    if x == 0.0 {
        // Also folds -0.
        return format!("{:.*e}", digits.saturating_sub(1), 0.0);
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
}

/// The value a printed number reads back as.
fn printed(x: f64, digits: usize) -> f64 {
    format_number(x, digits).parse().expect("formatted numbers parse")
}

pub fn write(path: &Path, contents: &str) -> Result<PathBuf, CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| CliError::Io { path: parent.to_path_buf(), source })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    Ok(path.to_path_buf())
}

fn table(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `time_us,<observable>...[,leakage]` for one trajectory.
pub fn trajectory_csv(traj: &Trajectory, digits: usize) -> String {
    let mut header = vec!["time_us".to_string()];
    header.extend(traj.series.iter().map(|s| s.name.clone()));
    if traj.leakage.is_some() {
        header.push("leakage".into());
    }
    let rows = traj.times.iter().enumerate().map(|(i, &t)| {
        let mut row = vec![format_number(t, digits)];
        row.extend(traj.series.iter().map(|s| format_number(s.values[i], digits)));
        if let Some(l) = &traj.leakage {
            row.push(format_number(l[i], digits));
        }
        row
    });
    table(&header, rows)
}

/// `time_us,value_spin,value_boson,abs_diff,leakage` for one observable.
///
/// `abs_diff` is computed from the printed values, so it can be recomputed
/// from the other two columns.
pub fn compare_csv(spin: &Trajectory, boson: &Trajectory, name: &str, digits: usize) -> Result<String, CliError> {
    let missing = || CliError::Numerical(format!("observable {name} missing from a trajectory"));
    let a = spin.series(name).ok_or_else(missing)?;
    let b = boson.series(name).ok_or_else(missing)?;
    if spin.times != boson.times {
        return Err(CliError::Numerical("spin and boson runs use different grids".into()));
    }
    let header: Vec<String> =
        ["time_us", "value_spin", "value_boson", "abs_diff", "leakage"].iter().map(|s| s.to_string()).collect();
    let rows = spin.times.iter().enumerate().map(|(i, &t)| {
        let diff = (printed(a[i], digits) - printed(b[i], digits)).abs();
        let leak = boson.leakage.as_ref().map_or(0.0, |l| l[i]);
        vec![
            format_number(t, digits),
            format_number(a[i], digits),
            format_number(b[i], digits),
            format_number(diff, digits),
            format_number(leak, digits),
        ]
    });
    Ok(table(&header, rows))
}

/// Writes one `<observable>_<sector>.dat` file per recorded series.
pub fn emit_plotdata(
    dir: &Path,
    runs: &[(Sector, &Trajectory)],
    digits: usize,
) -> Result<Vec<PathBuf>, CliError> {
    if runs.iter().all(|(_, t)| t.series.is_empty()) {
        log::warn!("no trajectories to write as plot data");
        return Ok(Vec::new());
    }
    let mut files = Vec::new();
    for (sector, traj) in runs {
        for s in &traj.series {
            let mut body = format!("# time_us {}_{}\n", s.name, sector.name());
            for (t, v) in traj.times.iter().zip(&s.values) {
                body.push_str(&format!("{} {}\n", format_number(*t, digits), format_number(*v, digits)));
            }
            files.push(write(&dir.join(format!("{}_{}.dat", s.name, sector.name())), &body)?);
        }
    }
    Ok(files)
}

/// One-row sheet; the first nine columns are the design energies in the
/// conventional table order.
pub fn parameter_sheet_csv(sheet: &ParameterSheet, digits: usize) -> String {
    let columns: [(&str, f64); 15] = [
        ("e_c_mhz", sheet.e_c),
        ("e_j_mhz", sheet.e_j),
        ("e_l_mhz", sheet.e_l),
        ("e_coup_mhz", sheet.e_coup),
        ("e_prime_j_mhz", sheet.e_prime_j),
        ("omega_mhz", sheet.omega),
        ("t_corr_mhz", sheet.corr_hopping),
        ("delta_omega_mhz", sheet.delta_omega),
        ("delta_mhz", sheet.cross_kerr),
        ("e_coup_simplified_mhz", sheet.e_coup_simplified),
        ("hopping_mhz", sheet.hopping),
        ("constraint_residual_mhz", sheet.constraint_residual),
        ("coupling_mhz", sheet.coupling),
        ("field_bulk_mhz", sheet.field_bulk),
        ("field_edge_mhz", sheet.field_edge),
    ];
    let header: Vec<String> = columns.iter().map(|(k, _)| k.to_string()).collect();
    let row: Vec<String> = columns.iter().map(|(_, v)| format_number(*v, digits)).collect();
    table(&header, std::iter::once(row))
}
