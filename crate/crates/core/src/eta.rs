//! Dimensionless surface conductivity `eta = 2 pi sigma / c`.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// A nonnegative conductivity, or the perfect-conductor limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eta {
    Finite(f64),
    Infinite,
}

impl Eta {
    /// Accepts any finite `value >= 0`; `+inf` maps to [`Eta::Infinite`].
    pub fn new(value: f64) -> Result<Self> {
        if value == f64::INFINITY {
            Ok(Eta::Infinite)
        } else if value.is_finite() && value >= 0.0 {
            Ok(Eta::Finite(value))
        } else {
            Err(domain(format!("eta must be >= 0, got {value}")))
        }
    }

    /// Conductivity of a graphene sheet, `pi alpha / 2`.
    pub fn graphene() -> Self {
        Eta::Finite(crate::constants::ETA_GRAPHENE)
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Eta::Infinite)
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Eta::Finite(v) if v == 0.0)
    }

    /// Numeric value, with `f64::INFINITY` for the perfect conductor.
    pub fn value(self) -> f64 {
        match self {
            Eta::Finite(v) => v,
            Eta::Infinite => f64::INFINITY,
        }
    }

    pub(crate) fn positive(self, what: &str) -> Result<Self> {
        match self {
            Eta::Finite(v) if !(v > 0.0) => {
                Err(domain(format!("{what} requires eta > 0, got {v}")))
            }
            e => Ok(e),
        }
    }
}

impl fmt::Display for Eta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eta::Finite(v) => write!(f, "{v}"),
            Eta::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Eta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" => Ok(Eta::Infinite),
            "graphene" => Ok(Eta::graphene()),
            _ => {
                let v: f64 = t
                    .parse()
                    .map_err(|_| domain(format!("cannot parse eta from {s:?}")))?;
                Eta::new(v)
            }
        }
    }
}

impl Serialize for Eta {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Eta::Finite(v) => s.serialize_f64(*v),
            Eta::Infinite => s.serialize_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse() {
        assert_eq!("inf".parse::<Eta>().unwrap(), Eta::Infinite);
        assert_eq!("0.5".parse::<Eta>().unwrap(), Eta::Finite(0.5));
        assert_eq!(" 0 ".parse::<Eta>().unwrap(), Eta::Finite(0.0));
        assert!("-1".parse::<Eta>().is_err());
        assert!("nan".parse::<Eta>().is_err());
        assert!("abc".parse::<Eta>().is_err());
    }

    #[test]
    fn infinite_from_value() {
        assert_eq!(Eta::new(f64::INFINITY).unwrap(), Eta::Infinite);
        assert!(Eta::new(f64::NEG_INFINITY).is_err());
        assert!(Eta::Infinite.value().is_infinite());
    }

    #[test]
    fn positivity_guard() {
        assert!(Eta::Finite(0.0).positive("x").is_err());
        assert!(Eta::Finite(1e-300).positive("x").is_ok());
        assert!(Eta::Infinite.positive("x").is_ok());
    }
}
