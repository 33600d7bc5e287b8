//! Unit convention.
//!
//! Every energy is stored as the ordinary frequency `nu = E / (2 pi hbar)` in
//! MHz, every time in microseconds. Since MHz times microseconds is
//! dimensionless, the propagator phase for an energy `nu` over a time `t` is
//! `exp(-i 2 pi nu t)` with no further factors. Oscillator frequencies are
//! stored as `omega / 2 pi`.

use std::f64::consts::PI;

/// Planck constant in J s (exact, SI 2019).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge in C (exact, SI 2019).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// One femtofarad in farads.
pub const FEMTOFARAD: f64 = 1e-15;

const HZ_PER_MHZ: f64 = 1e6;

/// Energy in joules of a frequency given in MHz.
pub fn mhz_to_joules(nu_mhz: f64) -> f64 {
    nu_mhz * HZ_PER_MHZ * PLANCK
}

/// Frequency in MHz of an energy given in joules.
pub fn joules_to_mhz(energy: f64) -> f64 {
    energy / PLANCK / HZ_PER_MHZ
}

/// `e^2 / 2C` expressed in MHz, with the capacitance in fF.
pub fn charging_energy_mhz(capacitance_ff: f64) -> f64 {
    let e2 = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE;
    joules_to_mhz(e2 / (2.0 * capacitance_ff * FEMTOFARAD))
}

/// Phase `2 pi nu t` accumulated by an energy `nu` (MHz) over `t` (us).
#[inline]
pub fn phase(nu_mhz: f64, t_us: f64) -> f64 {
    2.0 * PI * nu_mhz * t_us
}
