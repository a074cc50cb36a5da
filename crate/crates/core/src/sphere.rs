//! Spherical shell of constant conductivity.
//!
//! Each polarization splits into a closed-form asymptotic part and a
//! numerically summed remainder,
//!
//! ```text
//! Q_TE^num = -(1/pi) sum_{l>=1} nu^2 int_0^inf z [2 eta nu (s e)'/(1 + 2 eta s e) - F0 - F2/nu^2] dz
//! Q_TM^num = -(1/pi) sum_{l>=1} nu^2 int_0^inf [a(z) + K_TM(z)] dz
//! ```
//!
//! with `x = nu z`, `nu = l + 1/2` and `a = -2 eta z nu (1 + (1 - 1/(4nu^2))/z^2) (s e)'/(1 - 2 eta s'e')`.
//! The shell energy is `hbar c Q / R`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::closed::{evaluate, Form};
use crate::constants::{Q_TE_SPHERE_AS_PERFECT, Q_TM_SPHERE_AS_PERFECT};
use crate::energy::{EnergyUnit, EnergyValue, Geometry, Length};
use crate::error::{domain, Error, Result};
use crate::eta::Eta;
use crate::quadrature::{integrate_semi_infinite, ToleranceConfig};
use crate::qvalue::{Diagnostics, QValue};
use crate::specfun::{
    f0_te, f0_te_perfect, f2_te, f2_te_perfect, kernel_tm, kernel_tm_perfect, products_unchecked,
};

pub use crate::closed::{branch_log_inv, branch_log_ratio};

/// Remainder model for the truncated angular-momentum sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TailModel {
    /// No extrapolation beyond `l_max`.
    None,
    /// `c_l ~ a nu^{-p}`, with `a` fitted to the last terms and `p` fixed.
    FixedExponent { p: f64 },
    /// Both `a` and `p` fitted by least squares to the last `window` terms.
    Fitted { window: usize },
}

/// Truncation and accuracy settings for the angular-momentum sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumConfig {
    pub l_max: usize,
    pub tail_model: TailModel,
    /// Target absolute error of a summed part, in units of `min(eta, 1)`;
    /// every part vanishes linearly as `eta -> 0`.
    pub target_tol: f64,
    pub max_evals: usize,
}

impl Default for SumConfig {
    fn default() -> Self {
        SumConfig {
            l_max: 60,
            tail_model: TailModel::Fitted { window: 10 },
            target_tol: 1e-6,
            max_evals: 1_000_000,
        }
    }
}

impl SumConfig {
    pub fn new(l_max: usize, tail_model: TailModel, target_tol: f64) -> Result<Self> {
        let cfg = SumConfig {
            l_max,
            tail_model,
            target_tol,
            ..SumConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_l_max(self, l_max: usize) -> Self {
        SumConfig { l_max, ..self }
    }

    pub fn with_target_tol(self, target_tol: f64) -> Self {
        SumConfig { target_tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l_max < 5 || self.l_max > crate::specfun::DEFAULT_MAX_ORDER {
            return Err(domain(format!(
                "l_max must be in 5..={}, got {}",
                crate::specfun::DEFAULT_MAX_ORDER,
                self.l_max
            )));
        }
        if !(self.target_tol.is_finite() && self.target_tol > 0.0) {
            return Err(domain(format!(
                "target_tol must be > 0, got {}",
                self.target_tol
            )));
        }
        match self.tail_model {
            TailModel::FixedExponent { p } if !(p > 1.0) => {
                Err(domain(format!("tail exponent must exceed 1, got {p}")))
            }
            TailModel::Fitted { window } if window < 3 || window > self.l_max => Err(domain(
                format!("tail window must be in 3..=l_max, got {window}"),
            )),
            _ => Ok(()),
        }
    }
}

/// The four parts of the shell coefficient and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereQBreakdown {
    pub eta: Eta,
    pub te_as: f64,
    pub te_num: f64,
    pub tm_as: f64,
    pub tm_num: f64,
    pub total: f64,
    /// Combined error estimate of the two numeric parts.
    pub abs_error: f64,
    pub l_max_used: usize,
    pub evals: usize,
}

impl SphereQBreakdown {
    pub fn te(&self) -> f64 {
        self.te_as + self.te_num
    }

    pub fn tm(&self) -> f64 {
        self.tm_as + self.tm_num
    }
}

/// Closed-form TE asymptotic part; exactly 17/128 at infinity.
pub fn q_te_sphere_as(eta: Eta) -> Result<f64> {
    match eta.positive("q_te_sphere_as")? {
        Eta::Infinite => Ok(Q_TE_SPHERE_AS_PERFECT),
        e => Ok(evaluate(Form::QTeAs, e)),
    }
}

/// Closed-form TM asymptotic part; exactly -11/128 at infinity.
pub fn q_tm_sphere_as(eta: Eta) -> Result<f64> {
    match eta.positive("q_tm_sphere_as")? {
        Eta::Infinite => Ok(Q_TM_SPHERE_AS_PERFECT),
        e => Ok(evaluate(Form::QTmAs, e)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Te,
    Tm,
}

fn te_integrand(l: usize, z: f64, eta: Eta) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let nu = l as f64 + 0.5;
    let t = 1.0 / 1f64.hypot(z);
    let p = products_unchecked(l, nu * z);
    let bracket = match eta {
        Eta::Finite(e) => {
            2.0 * e * nu * p.dse / (1.0 + 2.0 * e * p.se)
                - f0_te(z, t, e)
                - f2_te(z, t, e) / (nu * nu)
        }
        Eta::Infinite => nu * p.dse / p.se - f0_te_perfect(z, t) - f2_te_perfect(z, t) / (nu * nu),
    };
    z * bracket
}

fn tm_integrand(l: usize, z: f64, eta: Eta) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let nu = l as f64 + 0.5;
    let t = 1.0 / 1f64.hypot(z);
    let p = products_unchecked(l, nu * z);
    // (s'e')' = (1 + (nu^2 - 1/4)/x^2) (se)'
    let fac = 1.0 + (1.0 - 0.25 / (nu * nu)) / (z * z);
    match eta {
        Eta::Finite(e) => {
            -2.0 * e * z * fac * nu * p.dse / (1.0 - 2.0 * e * p.dsde) + kernel_tm(nu, z, t, e)
        }
        Eta::Infinite => z * fac * nu * p.dse / p.dsde + kernel_tm_perfect(nu, z, t),
    }
}

/// `sum_{l > l_max} a nu^{-p}` through Euler-Maclaurin for the Hurwitz zeta.
fn power_tail(a: f64, p: f64, l_max: usize) -> f64 {
    let q = l_max as f64 + 1.5;
    let zeta = q.powf(1.0 - p) / (p - 1.0) + 0.5 * q.powf(-p) + p * q.powf(-p - 1.0) / 12.0
        - p * (p + 1.0) * (p + 2.0) * q.powf(-p - 3.0) / 720.0;
    a * zeta
}

fn tail_estimate(terms: &[f64], model: TailModel) -> f64 {
    let l_max = terms.len();
    let nu = |i: usize| (i + 1) as f64 + 0.5;
    match model {
        TailModel::None => 0.0,
        TailModel::FixedExponent { p } => {
            let last = terms[l_max - 1];
            power_tail(last * nu(l_max - 1).powf(p), p, l_max)
        }
        TailModel::Fitted { window } => {
            let start = l_max - window;
            let slice = &terms[start..];
            let same_sign = slice.iter().all(|c| *c > 0.0) || slice.iter().all(|c| *c < 0.0);
            if !same_sign {
                return tail_estimate(terms, TailModel::FixedExponent { p: 2.0 });
            }
            let n = window as f64;
            let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
            for (k, c) in slice.iter().enumerate() {
                let x = nu(start + k).ln();
                let y = c.abs().ln();
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            let p = -slope;
            if !(p > 1.2) {
                return tail_estimate(terms, TailModel::FixedExponent { p: 2.0 });
            }
            let ln_a = (sy + p * sx) / n;
            terms[l_max - 1].signum() * power_tail(ln_a.exp(), p, l_max)
        }
    }
}

/// Per-`l` contributions to a numeric part, tail excluded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialWaveTerms {
    pub terms: Vec<f64>,
    pub errors: Vec<f64>,
    pub evals: usize,
}

fn scale_of(eta: Eta) -> f64 {
    match eta {
        Eta::Finite(e) => e.min(1.0),
        Eta::Infinite => 1.0,
    }
}

const INTEGRAND_FLOOR: f64 = 5e-14;

fn partial_waves(mode: Mode, eta: Eta, cfg: &SumConfig) -> Result<PartialWaveTerms> {
    cfg.validate()?;
    let scale = scale_of(eta);
    let mut out = PartialWaveTerms {
        terms: Vec::with_capacity(cfg.l_max),
        errors: Vec::with_capacity(cfg.l_max),
        evals: 0,
    };
    for l in 1..=cfg.l_max {
        let nu = l as f64 + 0.5;
        let weight = -nu * nu / PI;
        let tol = ToleranceConfig {
            // The subtracted integrands reach roundoff near this level, which
            // rises with the order.
            abs_tol: (scale * cfg.target_tol / (cfg.l_max as f64 * weight.abs()))
                .max(INTEGRAND_FLOOR * (nu / 30.0).powi(2).max(1.0)),
            rel_tol: 1e-9,
            max_evals: cfg.max_evals,
        };
        let r = match mode {
            Mode::Te => integrate_semi_infinite(|z| te_integrand(l, z, eta), &tol),
            Mode::Tm => integrate_semi_infinite(|z| tm_integrand(l, z, eta), &tol),
        };
        out.evals += r.evals;
        if !r.converged {
            return Err(Error::NotConverged {
                what: format!("{mode:?} partial wave l = {l}"),
                value: weight * r.value,
                abs_error: weight.abs() * r.abs_error,
            });
        }
        out.terms.push(weight * r.value);
        out.errors.push(weight.abs() * r.abs_error);
    }
    Ok(out)
}

/// Per-`l` contributions `-(nu^2/pi) int ...` for `l = 1..=l_max`.
pub fn te_partial_waves(eta: Eta, cfg: &SumConfig) -> Result<PartialWaveTerms> {
    partial_waves(Mode::Te, eta, cfg)
}

pub fn tm_partial_waves(eta: Eta, cfg: &SumConfig) -> Result<PartialWaveTerms> {
    partial_waves(Mode::Tm, eta, cfg)
}

fn numeric_part(mode: Mode, eta: Eta, cfg: &SumConfig) -> Result<QValue> {
    if eta.is_zero() {
        return Ok(QValue::exact(0.0));
    }
    let waves = partial_waves(mode, eta, cfg)?;
    let sum: f64 = waves.terms.iter().sum();
    let err: f64 = waves.errors.iter().sum();
    let tail = tail_estimate(&waves.terms, cfg.tail_model);
    Ok(QValue {
        value: sum + tail,
        abs_error: err + tail.abs(),
        parts: None,
        diagnostics: Diagnostics {
            l_max_used: Some(cfg.l_max),
            evals: waves.evals,
        },
    })
}

/// Numerically summed TE remainder.
pub fn q_te_sphere_num(eta: Eta, cfg: &SumConfig) -> Result<QValue> {
    numeric_part(Mode::Te, eta, cfg)
}

/// Numerically summed TM remainder.
pub fn q_tm_sphere_num(eta: Eta, cfg: &SumConfig) -> Result<QValue> {
    numeric_part(Mode::Tm, eta, cfg)
}

/// TE coefficient with its asymptotic/numeric split.
pub fn q_te_sphere(eta: Eta, cfg: &SumConfig) -> Result<QValue> {
    if eta.is_zero() {
        return Ok(QValue::exact(0.0));
    }
    Ok(QValue::with_parts(
        q_te_sphere_as(eta)?,
        q_te_sphere_num(eta, cfg)?,
    ))
}

/// TM coefficient with its asymptotic/numeric split.
pub fn q_tm_sphere(eta: Eta, cfg: &SumConfig) -> Result<QValue> {
    if eta.is_zero() {
        return Ok(QValue::exact(0.0));
    }
    Ok(QValue::with_parts(
        q_tm_sphere_as(eta)?,
        q_tm_sphere_num(eta, cfg)?,
    ))
}

pub fn q_sphere_total(eta: Eta, cfg: &SumConfig) -> Result<SphereQBreakdown> {
    cfg.validate()?;
    if eta.is_zero() {
        return Ok(SphereQBreakdown {
            eta,
            te_as: 0.0,
            te_num: 0.0,
            tm_as: 0.0,
            tm_num: 0.0,
            total: 0.0,
            abs_error: 0.0,
            l_max_used: cfg.l_max,
            evals: 0,
        });
    }
    let te_as = q_te_sphere_as(eta)?;
    let tm_as = q_tm_sphere_as(eta)?;
    let te_num = q_te_sphere_num(eta, cfg)?;
    let tm_num = q_tm_sphere_num(eta, cfg)?;
    Ok(SphereQBreakdown {
        eta,
        te_as,
        te_num: te_num.value,
        tm_as,
        tm_num: tm_num.value,
        total: te_as + te_num.value + tm_as + tm_num.value,
        abs_error: te_num.abs_error + tm_num.abs_error,
        l_max_used: cfg.l_max,
        evals: te_num.diagnostics.evals + tm_num.diagnostics.evals,
    })
}

/// Shell energy `hbar c Q / R`.
pub fn sphere_energy(
    eta: Eta,
    radius: Length,
    unit: EnergyUnit,
    cfg: &SumConfig,
) -> Result<EnergyValue> {
    let b = q_sphere_total(eta, cfg)?;
    let q = QValue {
        value: b.total,
        abs_error: b.abs_error,
        parts: Some(crate::qvalue::Parts {
            asymptotic: b.te_as + b.tm_as,
            numeric: b.te_num + b.tm_num,
        }),
        diagnostics: Diagnostics {
            l_max_used: Some(b.l_max_used),
            evals: b.evals,
        },
    };
    Ok(EnergyValue::new(q, Geometry::Radius(radius), unit))
}

/// Conductivity at which the shell energy changes sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalEta {
    pub eta: f64,
    /// `Q^s` at the returned root and its error estimate.
    pub q_at_root: f64,
    pub abs_error: f64,
    pub bracket: (f64, f64),
    pub q_at_bracket: (f64, f64),
    pub evaluations: usize,
}

struct XTolerance {
    tol: f64,
    max_iter: usize,
}

impl roots::Convergency<f64> for XTolerance {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }

    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() < self.tol
    }

    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= self.max_iter
    }
}

pub const CRITICAL_BRACKET: (f64, f64) = (1.0, 2.0);

/// Root of `Q^s(eta)` on [1, 2] by Brent's method.
pub fn critical_eta(cfg: &SumConfig, root_tol: f64) -> Result<CriticalEta> {
    if !(root_tol.is_finite() && root_tol > 0.0) {
        return Err(domain(format!("root_tol must be > 0, got {root_tol}")));
    }
    cfg.validate()?;
    let (lo, hi) = CRITICAL_BRACKET;
    let cache: RefCell<HashMap<u64, f64>> = RefCell::new(HashMap::new());
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let objective = |eta: f64| -> f64 {
        if let Some(v) = cache.borrow().get(&eta.to_bits()) {
            return *v;
        }
        let v = match q_sphere_total(Eta::Finite(eta), cfg) {
            Ok(b) => b.total,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        cache.borrow_mut().insert(eta.to_bits(), v);
        v
    };
    let q_lo = objective(lo);
    let q_hi = objective(hi);
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    if !(q_lo * q_hi < 0.0) {
        return Err(Error::NoSignChange { lo, hi });
    }
    let mut conv = XTolerance {
        tol: root_tol,
        max_iter: 100,
    };
    let root = roots::find_root_brent(lo, hi, &objective, &mut conv);
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    let eta = root.map_err(|e| Error::NotConverged {
        what: format!("critical eta root search ({e:?})"),
        value: f64::NAN,
        abs_error: f64::NAN,
    })?;
    let at_root = q_sphere_total(Eta::Finite(eta), cfg)?;
    let evaluations = cache.borrow().len();
    Ok(CriticalEta {
        eta,
        q_at_root: at_root.total,
        abs_error: at_root.abs_error,
        bracket: (lo, hi),
        q_at_bracket: (q_lo, q_hi),
        evaluations,
    })
}
