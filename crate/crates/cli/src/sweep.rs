use std::thread;

use casimir_core::planar::{q_te_planar, q_tm_planar};
use casimir_core::quadrature::ToleranceConfig;
use casimir_core::sphere::{q_sphere_total, SumConfig};
use casimir_core::{Eta, Result};
use clap::ValueEnum;
use serde::Serialize;

use crate::output::{num, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepGeometry {
    Planar,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub geometry: SweepGeometry,
    pub eta_min: f64,
    pub eta_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl SweepSpec {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.eta_min.is_finite() && self.eta_max.is_finite()) {
            return Err("sweep bounds must be finite".into());
        }
        if !(self.eta_min > 0.0 && self.eta_min < self.eta_max) {
            return Err(format!(
                "need 0 < eta-min < eta-max, got {} and {}",
                self.eta_min, self.eta_max
            ));
        }
        if self.points < 2 {
            return Err(format!("need at least 2 points, got {}", self.points));
        }
        Ok(())
    }

    /// Grid with exact endpoints.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.eta_min;
                }
                if i == n - 1 {
                    return self.eta_max;
                }
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.eta_min + f * (self.eta_max - self.eta_min),
                    Spacing::Log => {
                        (self.eta_min.ln() + f * (self.eta_max / self.eta_min).ln()).exp()
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub eta: f64,
    pub q_te: f64,
    pub q_tm: f64,
    pub q_total: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_te_as: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_te_num: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_tm_as: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_tm_num: Option<f64>,
    pub abs_error: f64,
}

pub const PLANAR_COLUMNS: [&str; 5] = ["eta", "q_te", "q_tm", "q_total", "abs_error"];
pub const SPHERE_COLUMNS: [&str; 9] = [
    "eta",
    "q_te",
    "q_tm",
    "q_total",
    "q_te_as",
    "q_te_num",
    "q_tm_as",
    "q_tm_num",
    "abs_error",
];

impl SweepRow {
    pub fn planar(eta: Eta, tol: &ToleranceConfig) -> Result<Self> {
        let te = q_te_planar(eta, tol)?;
        let tm = q_tm_planar(eta, tol)?;
        Ok(SweepRow {
            eta: eta.value(),
            q_te: te.value,
            q_tm: tm.value,
            q_total: te.value + tm.value,
            q_te_as: None,
            q_te_num: None,
            q_tm_as: None,
            q_tm_num: None,
            abs_error: te.abs_error + tm.abs_error,
        })
    }

    pub fn sphere(eta: Eta, cfg: &SumConfig) -> Result<Self> {
        let b = q_sphere_total(eta, cfg)?;
        Ok(SweepRow {
            eta: eta.value(),
            q_te: b.te(),
            q_tm: b.tm(),
            q_total: b.total,
            q_te_as: Some(b.te_as),
            q_te_num: Some(b.te_num),
            q_tm_as: Some(b.tm_as),
            q_tm_num: Some(b.tm_num),
            abs_error: b.abs_error,
        })
    }

    pub fn cells(&self) -> Vec<String> {
        let mut v = vec![
            num(self.eta),
            num(self.q_te),
            num(self.q_tm),
            num(self.q_total),
        ];
        for part in [self.q_te_as, self.q_te_num, self.q_tm_as, self.q_tm_num]
            .into_iter()
            .flatten()
        {
            v.push(num(part));
        }
        v.push(num(self.abs_error));
        v
    }
}

pub fn table(geometry: SweepGeometry, rows: &[SweepRow]) -> Table {
    let header = match geometry {
        SweepGeometry::Planar => PLANAR_COLUMNS.to_vec(),
        SweepGeometry::Sphere => SPHERE_COLUMNS.to_vec(),
    };
    let mut t = Table::new(header);
    for r in rows {
        t.push(r.cells());
    }
    t
}

/// Evaluates every grid point, in parallel, and returns rows in grid order.
pub fn run(spec: &SweepSpec, tol: &ToleranceConfig, cfg: &SumConfig) -> Result<Vec<SweepRow>> {
    let grid = spec.grid();
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(grid.len());
    let chunk = grid.len().div_ceil(workers);
    let results: Vec<Result<SweepRow>> = thread::scope(|s| {
        let handles: Vec<_> = grid
            .chunks(chunk)
            .map(|etas| {
                s.spawn(move || {
                    etas.iter()
                        .map(|&e| match spec.geometry {
                            SweepGeometry::Planar => SweepRow::planar(Eta::Finite(e), tol),
                            SweepGeometry::Sphere => SweepRow::sphere(Eta::Finite(e), cfg),
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    results.into_iter().collect()
}
