/// CODATA 2018 exact SI values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Coulombs.
    pub electron_charge: f64,
    /// Joule-seconds.
    pub planck_h: f64,
    /// Webers, `h / 2e`.
    pub flux_quantum: f64,
}

pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;
pub const PLANCK_H: f64 = 6.626_070_15e-34;

pub const CODATA: PhysicalConstants = PhysicalConstants {
    electron_charge: ELECTRON_CHARGE,
    planck_h: PLANCK_H,
    flux_quantum: PLANCK_H / (2.0 * ELECTRON_CHARGE),
};

/// `e² / h` expressed in GHz·fF, so `E/h [GHz] = E2_OVER_H * (1/C [fF])`.
pub(crate) const E2_OVER_H_GHZ_FF: f64 = ELECTRON_CHARGE * ELECTRON_CHARGE / PLANCK_H / 1e-15 / 1e9;
