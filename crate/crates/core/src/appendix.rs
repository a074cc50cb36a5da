//! The s = 0 integrals behind the asymptotic shell parts, each available as a
//! closed form and as direct quadrature, plus the linear combinations that
//! rebuild the asymptotic TE and TM parts from them.
//!
//! With `t = 1/sqrt(1+z^2)`:
//!
//! ```text
//! J0  = eta   int z t^3 / (1 + eta t z)
//! M_k = eta   int z t^{3+2k} / (1 + eta t z)^2
//! N_k = eta^2 int z^4 t^{6+2k} / (1 + eta t z)^2
//! A_k = eta   int z t^{1+2k} / (z + eta/t)^2
//! B_k = eta^2 int z^2 t^{2+2k} / (z + eta/t)^2
//! I0  = -eta  int_1^inf dx / (sqrt(x^2-1) (1 + eta^2 (x^2-1)))
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::closed::{evaluate, Form};
use crate::constants::{ZETA_3, ZETA_H_0_3HALF, ZETA_H_MINUS2_3HALF};
use crate::error::{domain, Error, Result};
use crate::eta::Eta;
use crate::quadrature::{integrate_semi_infinite, QuadratureResult, ToleranceConfig};

/// Relative agreement required between a closed form and its quadrature.
pub const PIECE_REL_TOL: f64 = 1e-8;
/// Multiple of the quadrature error estimate that also counts as agreement.
pub const PIECE_ERR_FACTOR: f64 = 10.0;
/// Relative agreement required of the assembly identities.
pub const ASSEMBLY_REL_TOL: f64 = 1e-12;

/// The conductivities used by the default verification run.
pub const DEFAULT_ETA_GRID: [f64; 7] = [0.1, 0.5, 0.9, 1.1, 2.0, 5.0, 20.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PieceName {
    J0,
    M(u8),
    N(u8),
    I0,
    A(u8),
    B(u8),
}

impl PieceName {
    pub fn all() -> [PieceName; 16] {
        use PieceName::*;
        [
            J0,
            M(0),
            M(1),
            M(2),
            M(3),
            N(0),
            N(1),
            N(2),
            I0,
            A(0),
            A(1),
            A(2),
            A(3),
            B(0),
            B(1),
            B(2),
        ]
    }

    fn checked(self) -> Result<Self> {
        let ok = match self {
            PieceName::M(k) | PieceName::A(k) => k <= 3,
            PieceName::N(k) | PieceName::B(k) => k <= 2,
            PieceName::J0 | PieceName::I0 => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(domain(format!("no appendix piece {self}")))
        }
    }

    fn form(self) -> Form {
        match self {
            PieceName::J0 => Form::J0,
            PieceName::M(k) => Form::M(k),
            PieceName::N(k) => Form::N(k),
            PieceName::I0 => Form::I0,
            PieceName::A(k) => Form::A(k),
            PieceName::B(k) => Form::B(k),
        }
    }
}

impl fmt::Display for PieceName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PieceName::J0 => f.write_str("J0"),
            PieceName::I0 => f.write_str("I0"),
            PieceName::M(k) => write!(f, "M{k}"),
            PieceName::N(k) => write!(f, "N{k}"),
            PieceName::A(k) => write!(f, "A{k}"),
            PieceName::B(k) => write!(f, "B{k}"),
        }
    }
}

impl FromStr for PieceName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        let parsed = match t.as_str() {
            "J0" => Some(PieceName::J0),
            "I0" => Some(PieceName::I0),
            _ => {
                let mut chars = t.chars();
                let head = chars.next();
                let k = chars.as_str().parse::<u8>().ok();
                match (head, k) {
                    (Some('M'), Some(k)) => Some(PieceName::M(k)),
                    (Some('N'), Some(k)) => Some(PieceName::N(k)),
                    (Some('A'), Some(k)) => Some(PieceName::A(k)),
                    (Some('B'), Some(k)) => Some(PieceName::B(k)),
                    _ => None,
                }
            }
        };
        parsed
            .ok_or_else(|| domain(format!("unknown appendix piece {s:?}")))?
            .checked()
    }
}

impl Serialize for PieceName {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Zeta values entering the assemblies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaConstants {
    pub zeta_h_minus2_3half: f64,
    pub zeta_h_0_3half: f64,
    pub zeta_r_3: f64,
}

impl Default for ZetaConstants {
    fn default() -> Self {
        ZetaConstants {
            zeta_h_minus2_3half: ZETA_H_MINUS2_3HALF,
            zeta_h_0_3half: ZETA_H_0_3HALF,
            zeta_r_3: ZETA_3,
        }
    }
}

/// Closed form of any piece at `eta > 0` (or infinity).
pub fn closed_piece(name: PieceName, eta: Eta) -> Result<f64> {
    Ok(evaluate(
        name.checked()?.form(),
        eta.positive("appendix piece")?,
    ))
}

pub fn closed_j0(eta: Eta) -> Result<f64> {
    closed_piece(PieceName::J0, eta)
}

pub fn closed_mk(k: u8, eta: Eta) -> Result<f64> {
    closed_piece(PieceName::M(k), eta)
}

pub fn closed_nk(k: u8, eta: Eta) -> Result<f64> {
    closed_piece(PieceName::N(k), eta)
}

pub fn closed_i0(eta: Eta) -> Result<f64> {
    closed_piece(PieceName::I0, eta)
}

pub fn closed_ak(k: u8, eta: Eta) -> Result<f64> {
    closed_piece(PieceName::A(k), eta)
}

pub fn closed_bk(k: u8, eta: Eta) -> Result<f64> {
    closed_piece(PieceName::B(k), eta)
}

/// Tolerances used for the direct quadratures.
pub fn oracle_tolerance() -> ToleranceConfig {
    ToleranceConfig {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_evals: 2_000_000,
    }
}

fn finite_positive(eta: f64) -> Result<f64> {
    if eta.is_finite() && eta > 0.0 {
        Ok(eta)
    } else {
        Err(domain(format!(
            "quadrature oracle needs finite eta > 0, got {eta}"
        )))
    }
}

/// Direct quadrature of any piece at finite `eta > 0`.
pub fn numeric_piece(name: PieceName, eta: f64) -> Result<QuadratureResult> {
    let e = finite_positive(eta)?;
    let tol = oracle_tolerance();
    let t_of = |z: f64| 1.0 / 1f64.hypot(z);
    let r = match name.checked()? {
        PieceName::J0 => integrate_semi_infinite(
            |z| {
                let t = t_of(z);
                e * z * t.powi(3) / (1.0 + e * t * z)
            },
            &tol,
        ),
        PieceName::M(k) => integrate_semi_infinite(
            |z| {
                let t = t_of(z);
                e * z * t.powi(3 + 2 * k as i32) / (1.0 + e * t * z).powi(2)
            },
            &tol,
        ),
        PieceName::N(k) => integrate_semi_infinite(
            |z| {
                let t = t_of(z);
                e * e * z.powi(4) * t.powi(6 + 2 * k as i32) / (1.0 + e * t * z).powi(2)
            },
            &tol,
        ),
        PieceName::A(k) => integrate_semi_infinite(
            |z| {
                let t = t_of(z);
                e * z * t.powi(1 + 2 * k as i32) / (z + e / t).powi(2)
            },
            &tol,
        ),
        PieceName::B(k) => integrate_semi_infinite(
            |z| {
                let t = t_of(z);
                e * e * z * z * t.powi(2 + 2 * k as i32) / (z + e / t).powi(2)
            },
            &tol,
        ),
        PieceName::I0 => {
            // x = 1 + v^2 removes the endpoint singularity analytically.
            let r = integrate_semi_infinite(
                |v| {
                    let w = v * v * (2.0 + v * v);
                    2.0 / ((2.0 + v * v).sqrt() * (1.0 + e * e * w))
                },
                &tol,
            );
            QuadratureResult {
                value: -e * r.value,
                abs_error: e * r.abs_error,
                ..r
            }
        }
    };
    Ok(r)
}

pub fn numeric_j0(eta: f64) -> Result<QuadratureResult> {
    numeric_piece(PieceName::J0, eta)
}

pub fn numeric_mk(k: u8, eta: f64) -> Result<QuadratureResult> {
    numeric_piece(PieceName::M(k), eta)
}

pub fn numeric_nk(k: u8, eta: f64) -> Result<QuadratureResult> {
    numeric_piece(PieceName::N(k), eta)
}

/// Rotated-contour representation of `I0`.
pub fn numeric_i0(eta: f64) -> Result<QuadratureResult> {
    numeric_piece(PieceName::I0, eta)
}

pub fn numeric_ak(k: u8, eta: f64) -> Result<QuadratureResult> {
    numeric_piece(PieceName::A(k), eta)
}

pub fn numeric_bk(k: u8, eta: f64) -> Result<QuadratureResult> {
    numeric_piece(PieceName::B(k), eta)
}

/// One piece evaluated both ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AppendixPiece {
    pub name: PieceName,
    pub eta: Eta,
    pub closed: f64,
    pub numeric: QuadratureResult,
}

impl AppendixPiece {
    pub fn evaluate(name: PieceName, eta: f64) -> Result<Self> {
        Ok(AppendixPiece {
            name,
            eta: Eta::Finite(eta),
            closed: closed_piece(name, Eta::Finite(eta))?,
            numeric: numeric_piece(name, eta)?,
        })
    }

    pub fn rel_discrepancy(&self) -> f64 {
        (self.closed - self.numeric.value).abs() / self.closed.abs().max(f64::MIN_POSITIVE)
    }

    pub fn allowed(&self) -> f64 {
        (PIECE_REL_TOL * self.closed.abs()).max(PIECE_ERR_FACTOR * self.numeric.abs_error)
    }

    pub fn agrees(&self) -> bool {
        self.numeric.converged && (self.closed - self.numeric.value).abs() <= self.allowed()
    }
}

fn assemble_te<F: Fn(PieceName) -> f64>(c: F, z: &ZetaConstants) -> f64 {
    use PieceName::*;
    let m = 2.0 * c(M(0)) - 27.0 * c(M(1)) + 60.0 * c(M(2)) - 35.0 * c(M(3));
    let n = c(N(0)) - 12.0 * c(N(1)) + 15.0 * c(N(2));
    -(c(J0) * z.zeta_h_minus2_3half - z.zeta_h_0_3half / 8.0 * m - z.zeta_h_0_3half / 4.0 * n) / PI
}

fn assemble_tm<F: Fn(PieceName) -> f64>(c: F, z: &ZetaConstants) -> f64 {
    use PieceName::*;
    let a = 2.0 * c(A(0)) - 25.0 * c(A(1)) + 60.0 * c(A(2)) - 35.0 * c(A(3));
    let b = c(B(0)) - 12.0 * c(B(1)) + 21.0 * c(B(2));
    -(c(I0) * z.zeta_h_minus2_3half + z.zeta_h_0_3half / 8.0 * a + z.zeta_h_0_3half / 4.0 * b) / PI
}

/// Asymptotic TE part rebuilt from `J0`, `M_k` and `N_k`.
pub fn assemble_q_te_as(eta: Eta) -> Result<f64> {
    let eta = eta.positive("appendix piece")?;
    Ok(assemble_te(
        |p| evaluate(p.form(), eta),
        &ZetaConstants::default(),
    ))
}

/// Asymptotic TM part rebuilt from `I0`, `A_k` and `B_k`.
pub fn assemble_q_tm_as(eta: Eta) -> Result<f64> {
    let eta = eta.positive("appendix piece")?;
    Ok(assemble_tm(
        |p| evaluate(p.form(), eta),
        &ZetaConstants::default(),
    ))
}

/// Deliberate corruption of one closed form, used as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Perturbation {
    pub piece: PieceName,
    pub relative: f64,
}

impl FromStr for Perturbation {
    type Err = Error;

    /// `NAME=REL`, e.g. `M2=1e-6`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rel) = s
            .split_once('=')
            .ok_or_else(|| domain(format!("perturbation must look like M2=1e-6, got {s:?}")))?;
        let relative: f64 = rel
            .trim()
            .parse()
            .map_err(|_| domain(format!("bad perturbation size {rel:?}")))?;
        Ok(Perturbation {
            piece: name.parse()?,
            relative,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieceSummary {
    pub name: PieceName,
    pub max_rel_discrepancy: f64,
    pub worst_eta: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssemblyCheck {
    pub eta: f64,
    pub te_closed: f64,
    pub te_assembled: f64,
    pub tm_closed: f64,
    pub tm_assembled: f64,
    pub te_rel: f64,
    pub tm_rel: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub eta_grid: Vec<f64>,
    pub pieces: Vec<AppendixPiece>,
    pub summary: Vec<PieceSummary>,
    pub assembly: Vec<AssemblyCheck>,
    pub perturbation: Option<Perturbation>,
    pub pass: bool,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Compares every closed form with its quadrature on `eta_grid` and checks
/// both assembly identities there and at infinity.
pub fn verify(eta_grid: &[f64], perturbation: Option<Perturbation>) -> Result<VerifyReport> {
    if eta_grid.is_empty() {
        return Err(domain("empty eta grid"));
    }
    for &e in eta_grid {
        finite_positive(e)?;
    }
    let factor = |name: PieceName| match perturbation {
        Some(p) if p.piece == name => 1.0 + p.relative,
        _ => 1.0,
    };
    let closed = |name: PieceName, eta: Eta| evaluate(name.form(), eta) * factor(name);

    let mut pieces = Vec::new();
    for name in PieceName::all() {
        for &eta in eta_grid {
            pieces.push(AppendixPiece {
                name,
                eta: Eta::Finite(eta),
                closed: closed(name, Eta::Finite(eta)),
                numeric: numeric_piece(name, eta)?,
            });
        }
    }

    let summary: Vec<PieceSummary> = PieceName::all()
        .iter()
        .map(|&name| {
            let rows = pieces.iter().filter(|p| p.name == name);
            let (worst, worst_eta) = rows
                .clone()
                .map(|p| (p.rel_discrepancy(), p.eta.value()))
                .fold((0.0, f64::NAN), |acc, x| {
                    if x.0 > acc.0 || acc.1.is_nan() {
                        x
                    } else {
                        acc
                    }
                });
            PieceSummary {
                name,
                max_rel_discrepancy: worst,
                worst_eta,
                pass: rows.clone().all(|p| p.agrees()),
            }
        })
        .collect();

    let zeta = ZetaConstants::default();
    let mut etas: Vec<Eta> = eta_grid.iter().map(|&e| Eta::Finite(e)).collect();
    etas.push(Eta::Infinite);
    let assembly = etas
        .iter()
        .map(|&eta| {
            let te_closed = evaluate(Form::QTeAs, eta);
            let tm_closed = evaluate(Form::QTmAs, eta);
            let te_assembled = assemble_te(|p| closed(p, eta), &zeta);
            let tm_assembled = assemble_tm(|p| closed(p, eta), &zeta);
            let te_rel = rel(te_assembled, te_closed);
            let tm_rel = rel(tm_assembled, tm_closed);
            AssemblyCheck {
                eta: eta.value(),
                te_closed,
                te_assembled,
                tm_closed,
                tm_assembled,
                te_rel,
                tm_rel,
                pass: te_rel <= ASSEMBLY_REL_TOL && tm_rel <= ASSEMBLY_REL_TOL,
            }
        })
        .collect::<Vec<_>>();

    let pass = summary.iter().all(|s| s.pass) && assembly.iter().all(|a| a.pass);
    Ok(VerifyReport {
        eta_grid: eta_grid.to_vec(),
        pieces,
        summary,
        assembly,
        perturbation,
        pass,
    })
}
