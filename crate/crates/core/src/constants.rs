//! Named physical and mathematical constants.

/// Reduced Planck constant times the speed of light, in eV nm.
pub const HBAR_C_EV_NM: f64 = 197.326_980_4;

/// Fine-structure constant.
pub const ALPHA: f64 = 1.0 / 137.035_999;

/// Graphene conductivity `sigma = e^2 / (4 hbar)` in units of `c / (2 pi)`: `pi alpha / 2`.
pub const ETA_GRAPHENE: f64 = std::f64::consts::PI * ALPHA / 2.0;

/// Riemann zeta(3).
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

/// Hurwitz zeta(-2, 3/2).
pub const ZETA_H_MINUS2_3HALF: f64 = -0.25;

/// Hurwitz zeta(0, 3/2).
pub const ZETA_H_0_3HALF: f64 = -1.0;

/// Perfect-conductor plates, total: `-pi^2 / 720`.
pub const Q_PLANAR_PERFECT: f64 = -std::f64::consts::PI * std::f64::consts::PI / 720.0;

/// Perfect-conductor plates, one polarization: `-pi^2 / 1440`.
pub const Q_PLANAR_PERFECT_POLARIZATION: f64 =
    -std::f64::consts::PI * std::f64::consts::PI / 1440.0;

/// Asymptotic TE part of the perfectly conducting shell.
pub const Q_TE_SPHERE_AS_PERFECT: f64 = 17.0 / 128.0;

/// Asymptotic TM part of the perfectly conducting shell.
pub const Q_TM_SPHERE_AS_PERFECT: f64 = -11.0 / 128.0;

/// Published shell values, kept for reports and comparisons.
pub mod published {
    pub const Q_SPHERE_PERFECT: f64 = 0.046;
    pub const Q_TE_SPHERE_NUM_PERFECT: f64 = 0.0009;
    pub const Q_TM_SPHERE_NUM_PERFECT: f64 = -0.0016;
    pub const Q_TE_SPHERE_PERFECT: f64 = 0.1337;
    pub const Q_TM_SPHERE_PERFECT: f64 = -0.0875;
    pub const Q_SPHERE_SMALL_ETA_SLOPE: f64 = -0.0542;
    pub const Q_TM_SPHERE_NUM_SMALL_ETA_SLOPE: f64 = -0.00123;
    pub const Q_SPHERE_GRAPHENE: f64 = -0.000621;
    pub const ETA_CRITICAL: f64 = 1.578;
    pub const GRAPHENE_Z: f64 = 1.024;
}
