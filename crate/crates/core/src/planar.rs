//! Two parallel sheets of constant conductivity.
//!
//! With `y = kappa d` and `x = cos(theta)`,
//!
//! ```text
//! Q(eta) = 1/(4 pi^2) int_0^inf y^2 dy int_0^1 dx ln(1 - rho^2 e^{-2y})
//! ```
//!
//! where `rho_TM = eta/(eta + x)` and `rho_TE = eta x/(1 + eta x)`. The energy
//! per unit area is `hbar c Q / d^3`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::constants::{ALPHA, ZETA_3};
use crate::energy::{EnergyUnit, EnergyValue, Geometry, Length};
use crate::error::{Error, Result};
use crate::eta::Eta;
use crate::quadrature::{integrate_finite, integrate_semi_infinite, ToleranceConfig};
use crate::qvalue::{Diagnostics, QValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Te,
    Tm,
}

/// Integration variables at one point of the double integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarIntegrandVars {
    pub y: f64,
    pub x: f64,
    pub rho_tm: f64,
    pub rho_te: f64,
}

impl PlanarIntegrandVars {
    pub fn new(eta: Eta, y: f64, x: f64) -> Self {
        let (rho_tm, rho_te) = match eta {
            Eta::Infinite => (1.0, 1.0),
            Eta::Finite(e) => (
                if e == 0.0 { 0.0 } else { e / (e + x) },
                e * x / (1.0 + e * x),
            ),
        };
        PlanarIntegrandVars {
            y,
            x,
            rho_tm,
            rho_te,
        }
    }

    /// `ln(1 - rho^2 e^{-2y})` for one polarization.
    pub fn log_term(&self, pol: Polarization) -> f64 {
        let rho = match pol {
            Polarization::Tm => self.rho_tm,
            Polarization::Te => self.rho_te,
        };
        (-(rho * rho) * (-2.0 * self.y).exp()).ln_1p()
    }
}

fn not_converged(what: &str, value: f64, abs_error: f64) -> Error {
    Error::NotConverged {
        what: what.to_string(),
        value,
        abs_error,
    }
}

fn perfect(tol: &ToleranceConfig) -> Result<QValue> {
    // rho = 1 makes the x-integral trivial.
    let norm = 1.0 / (4.0 * PI * PI);
    let r = integrate_semi_infinite(|y| y * y * (-(-2.0 * y).exp()).ln_1p(), tol);
    let value = norm * r.value;
    let abs_error = norm * r.abs_error;
    if !r.converged {
        return Err(not_converged(
            "perfect-conductor planar integral",
            value,
            abs_error,
        ));
    }
    Ok(QValue {
        value,
        abs_error,
        parts: None,
        diagnostics: Diagnostics {
            l_max_used: None,
            evals: r.evals,
        },
    })
}

fn finite(pol: Polarization, eta: f64, tol: &ToleranceConfig) -> Result<QValue> {
    let inner_tol = tol.with_tolerances(tol.abs_tol * 1e-3, tol.rel_tol * 1e-2);
    let mut evals = 0usize;
    let mut inner_ok = true;
    let mut inner: Vec<(f64, f64)> = Vec::new();
    // The TM reflection coefficient changes on the scale x ~ eta.
    let split = if pol == Polarization::Tm && eta < 0.5 {
        Some(eta)
    } else {
        None
    };
    let outer = integrate_semi_infinite(
        |y| {
            if y == 0.0 {
                return 0.0;
            }
            let f = |x: f64| PlanarIntegrandVars::new(Eta::Finite(eta), y, x).log_term(pol);
            let pieces = match split {
                Some(s) => [(0.0, s), (s, 1.0)],
                None => [(0.0, 0.5), (0.5, 1.0)],
            };
            let mut sum = 0.0;
            let mut err = 0.0;
            for (a, b) in pieces {
                let r = integrate_finite(f, a, b, &inner_tol);
                evals += r.evals;
                inner_ok &= r.converged;
                sum += r.value;
                err += r.abs_error;
            }
            if sum != 0.0 {
                inner.push((y * y * sum.abs(), err / sum.abs()));
            }
            y * y * sum
        },
        tol,
    );
    // Relative inner error over the region that carries the integral; far
    // out the inner results sit at the absolute floor and contribute nothing.
    let peak = inner.iter().map(|p| p.0).fold(0.0, f64::max);
    let inner_rel = inner
        .iter()
        .filter(|p| p.0 >= 1e-6 * peak)
        .map(|p| p.1)
        .fold(0.0, f64::max);
    let norm = 1.0 / (4.0 * PI * PI);
    let value = norm * outer.value;
    let abs_error = norm * (outer.abs_error + inner_rel * outer.value.abs());
    if !(outer.converged && inner_ok) {
        return Err(not_converged("planar double integral", value, abs_error));
    }
    Ok(QValue {
        value,
        abs_error,
        parts: None,
        diagnostics: Diagnostics {
            l_max_used: None,
            evals: evals + outer.evals,
        },
    })
}

fn q_planar(pol: Polarization, eta: Eta, tol: &ToleranceConfig) -> Result<QValue> {
    match eta {
        Eta::Infinite => perfect(tol),
        Eta::Finite(e) if e == 0.0 => Ok(QValue::exact(0.0)),
        Eta::Finite(e) => finite(pol, e, tol),
    }
}

/// TM contribution. The perfect conductor uses `rho = 1` exactly.
pub fn q_tm_planar(eta: Eta, tol: &ToleranceConfig) -> Result<QValue> {
    q_planar(Polarization::Tm, eta, tol)
}

/// TE contribution.
pub fn q_te_planar(eta: Eta, tol: &ToleranceConfig) -> Result<QValue> {
    q_planar(Polarization::Te, eta, tol)
}

pub fn q_planar_total(eta: Eta, tol: &ToleranceConfig) -> Result<QValue> {
    Ok(q_tm_planar(eta, tol)?.add(q_te_planar(eta, tol)?))
}

/// Leading small-eta behaviour of the TM part, `Q_TM ~ slope * eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallEtaSlope {
    /// `-pi^2/6 - pi^4/360 + 4 ln 2 - zeta(3)/2`.
    pub bracket: f64,
    /// `-bracket / (4 pi^2)`.
    pub slope: f64,
    /// `4 * bracket`; the graphene sheet energy is `-Z alpha hbar c / (32 pi d^3)`.
    pub z: f64,
}

pub fn planar_small_eta_tm_slope() -> SmallEtaSlope {
    let bracket = -PI * PI / 6.0 - PI.powi(4) / 360.0 + 4.0 * 2f64.ln() - ZETA_3 / 2.0;
    SmallEtaSlope {
        bracket,
        slope: -bracket / (4.0 * PI * PI),
        z: 4.0 * bracket,
    }
}

/// Planar energy at small conductivity from the slope formula, `-alpha Z / (32 pi)`
/// at the graphene value.
pub fn planar_graphene_q_estimate() -> f64 {
    -ALPHA * planar_small_eta_tm_slope().z / (32.0 * PI)
}

/// Energy per unit area of two sheets a distance `d` apart.
pub fn planar_energy(
    eta: Eta,
    d: Length,
    unit: EnergyUnit,
    tol: &ToleranceConfig,
) -> Result<EnergyValue> {
    let q = q_planar_total(eta, tol)?;
    Ok(EnergyValue::new(q, Geometry::Separation(d), unit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{ETA_GRAPHENE, Q_PLANAR_PERFECT, Q_PLANAR_PERFECT_POLARIZATION};
    use approx::assert_relative_eq;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn zero_eta() {
        assert_eq!(q_tm_planar(Eta::Finite(0.0), &tol()).unwrap().value, 0.0);
        assert_eq!(q_te_planar(Eta::Finite(0.0), &tol()).unwrap().value, 0.0);
        assert_eq!(q_planar_total(Eta::Finite(0.0), &tol()).unwrap().value, 0.0);
    }

    #[test]
    fn perfect_conductor() {
        let tm = q_tm_planar(Eta::Infinite, &tol()).unwrap();
        let te = q_te_planar(Eta::Infinite, &tol()).unwrap();
        assert_relative_eq!(tm.value, Q_PLANAR_PERFECT_POLARIZATION, max_relative = 1e-9);
        assert_relative_eq!(te.value, Q_PLANAR_PERFECT_POLARIZATION, max_relative = 1e-9);
        let total = q_planar_total(Eta::Infinite, &tol()).unwrap();
        assert_relative_eq!(total.value, Q_PLANAR_PERFECT, max_relative = 1e-9);
    }

    #[test]
    fn slope_constants() {
        let s = planar_small_eta_tm_slope();
        assert_relative_eq!(s.bracket, 0.256_045_395_383_973, max_relative = 1e-12);
        assert!((s.z - 1.024).abs() < 1e-3);
        assert_relative_eq!(s.slope, -0.006_485_8, max_relative = 1e-4);
    }

    #[test]
    fn graphene_sheet() {
        let q = q_tm_planar(Eta::Finite(ETA_GRAPHENE), &tol()).unwrap();
        assert_relative_eq!(q.value, -7.43e-5, max_relative = 2e-2);
        assert_relative_eq!(planar_graphene_q_estimate(), -7.43e-5, max_relative = 2e-3);
    }

    #[test]
    fn te_small_eta() {
        let eta = 1e-2;
        let q = q_te_planar(Eta::Finite(eta), &tol()).unwrap();
        assert_relative_eq!(q.value, -eta * eta / (48.0 * PI * PI), max_relative = 2e-2);
    }

    #[test]
    fn integrand_vars() {
        let v = PlanarIntegrandVars::new(Eta::Finite(1.0), 1.0, 0.5);
        assert_relative_eq!(v.rho_tm, 2.0 / 3.0);
        assert_relative_eq!(v.rho_te, 1.0 / 3.0);
        let v = PlanarIntegrandVars::new(Eta::Infinite, 1.0, 0.0);
        assert_eq!((v.rho_tm, v.rho_te), (1.0, 1.0));
        assert_relative_eq!(v.log_term(Polarization::Te), (1.0 - (-2.0f64).exp()).ln());
    }

    #[test]
    fn energy_units() {
        let d: Length = "100nm".parse().unwrap();
        let e = planar_energy(Eta::Infinite, d, EnergyUnit::ElectronVolt, &tol()).unwrap();
        assert_relative_eq!(
            e.energy,
            Q_PLANAR_PERFECT * 197.326_980_4 / 1e6,
            max_relative = 1e-8
        );
        let e = planar_energy(Eta::Finite(0.0), d, EnergyUnit::Natural, &tol()).unwrap();
        assert_eq!(e.energy, 0.0);
    }
}
