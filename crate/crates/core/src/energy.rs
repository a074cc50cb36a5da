//! Physical energies from dimensionless Q values.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::constants::{ALPHA, HBAR_C_EV_NM};
use crate::error::{domain, Error, Result};
use crate::qvalue::QValue;

/// Output unit for an energy.
///
/// * `Natural`: multiples of `hbar c / d^3` (planar) or `hbar c / R` (sphere),
///   lengths taken as plain numbers.
/// * `ElectronVolt`: lengths in nm, energies in eV/nm^2 (planar) or eV.
/// * `ChargeSquared`: multiples of `e^2 / d^3` or `e^2 / R`, i.e. `Q / alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyUnit {
    Natural,
    #[serde(rename = "eV")]
    ElectronVolt,
    #[serde(rename = "e2")]
    ChargeSquared,
}

impl FromStr for EnergyUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "natural" | "hbarc" => Ok(EnergyUnit::Natural),
            "ev" => Ok(EnergyUnit::ElectronVolt),
            "e2" | "e^2" => Ok(EnergyUnit::ChargeSquared),
            other => Err(domain(format!("unknown unit {other:?} (natural, eV, e2)"))),
        }
    }
}

impl fmt::Display for EnergyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnergyUnit::Natural => "natural",
            EnergyUnit::ElectronVolt => "eV",
            EnergyUnit::ChargeSquared => "e2",
        })
    }
}

/// A positive length. Parsed from strings such as `100nm`, `1.5um`, `2e-9m`
/// or a bare number (nanometres).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Length {
    pub nm: f64,
}

impl Length {
    pub fn from_nm(nm: f64) -> Result<Self> {
        if nm.is_finite() && nm > 0.0 {
            Ok(Length { nm })
        } else {
            Err(domain(format!(
                "length must be positive and finite, got {nm}"
            )))
        }
    }
}

impl FromStr for Length {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        const SUFFIXES: [(&str, f64); 7] = [
            ("pm", 1e-3),
            ("nm", 1.0),
            ("um", 1e3),
            ("µm", 1e3),
            ("mm", 1e6),
            ("cm", 1e7),
            ("m", 1e9),
        ];
        let (number, scale) = SUFFIXES
            .iter()
            .find_map(|&(suf, scale)| t.strip_suffix(suf).map(|n| (n, scale)))
            .unwrap_or((t, 1.0));
        let v: f64 = number
            .trim()
            .parse()
            .map_err(|_| domain(format!("cannot parse length from {s:?}")))?;
        Length::from_nm(v * scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Separation(Length),
    Radius(Length),
}

/// Energy per unit area (planar) or total energy (sphere).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyValue {
    pub q: QValue,
    pub geometry: Geometry,
    pub unit: EnergyUnit,
    pub energy: f64,
    pub abs_error: f64,
}

impl EnergyValue {
    pub fn new(q: QValue, geometry: Geometry, unit: EnergyUnit) -> Self {
        let scale = match geometry {
            Geometry::Separation(d) => d.nm.powi(-3),
            Geometry::Radius(r) => 1.0 / r.nm,
        };
        let unit_factor = match unit {
            EnergyUnit::Natural => 1.0,
            EnergyUnit::ElectronVolt => HBAR_C_EV_NM,
            EnergyUnit::ChargeSquared => 1.0 / ALPHA,
        };
        EnergyValue {
            q,
            geometry,
            unit,
            energy: q.value * unit_factor * scale,
            abs_error: q.abs_error * unit_factor * scale,
        }
    }
}
