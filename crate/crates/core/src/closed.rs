//! Closed-form evaluation of the s = 0 integrals and the asymptotic
//! energy parts.
//!
//! Every form is `[P(eta) + R(eta) B(eta)] / (1 - eta^2)^m` with Laurent
//! polynomials `P`, `R` and `B` one of the two branch logarithms. Near the
//! points where the raw expression cancels (eta -> 0 with the arccos branch,
//! eta -> inf with the inverse branch, eta -> 1 for every form) the same data
//! are expanded into a truncated power series once and cached.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{domain, Result};
use crate::eta::Eta;

const SERIES_TERMS: usize = 200;
const TAYLOR_ORDER: usize = 4;
const NEAR_ONE: f64 = 1e-4;
const SMALL_ETA: f64 = 0.7;
const LARGE_ETA: f64 = 1.4;
const G_SERIES_RADIUS: f64 = 0.25;

/// `arcsin(sqrt(u)) / sqrt(u)` for `|u| < 1`, continued analytically to u < 0.
fn g_series(u: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..200 {
        let kf = k as f64;
        term *= u * (2.0 * kf + 1.0).powi(2) / (2.0 * (kf + 1.0) * (2.0 * kf + 3.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn g_coefficients(n: usize) -> Vec<f64> {
    let mut g = vec![1.0; n];
    for k in 0..n.saturating_sub(1) {
        let kf = k as f64;
        g[k + 1] = g[k] * (2.0 * kf + 1.0).powi(2) / (2.0 * (kf + 1.0) * (2.0 * kf + 3.0));
    }
    g
}

// sqrt(eta^2 - 1) without overflow for large eta.
fn sqrt_eta2_minus_1(eta: f64) -> f64 {
    if eta > 1e150 {
        eta
    } else {
        ((eta - 1.0) * (eta + 1.0)).sqrt()
    }
}

pub(crate) fn log_ratio(eta: f64) -> f64 {
    let u = (1.0 - eta) * (1.0 + eta);
    if u.abs() < G_SERIES_RADIUS {
        g_series(u)
    } else if eta < 1.0 {
        eta.acos() / u.sqrt()
    } else if eta > 1e8 {
        ((2.0 * eta).ln() - 0.25 / (eta * eta)) / sqrt_eta2_minus_1(eta)
    } else {
        eta.acosh() / sqrt_eta2_minus_1(eta)
    }
}

pub(crate) fn log_inv(eta: f64) -> f64 {
    let u = (1.0 - eta) * (1.0 + eta);
    if u.abs() < G_SERIES_RADIUS {
        let w = 1.0 / eta;
        g_series((1.0 - w) * (1.0 + w)) * w
    } else if eta < 1.0 {
        let r = u.sqrt();
        (r.ln_1p() - eta.ln()) / r
    } else {
        (1.0 / eta).acos() / sqrt_eta2_minus_1(eta)
    }
}

/// `L(eta)`: `arccos(eta)/sqrt(1-eta^2)` below 1, `acosh(eta)/sqrt(eta^2-1)`
/// above 1, and 1 at `eta = 1`.
pub fn branch_log_ratio(eta: f64) -> Result<f64> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(domain(format!(
            "branch_log_ratio requires finite eta > 0, got {eta}"
        )));
    }
    Ok(log_ratio(eta))
}

/// `L(1/eta)/eta`: `ln((1+sqrt(1-eta^2))/eta)/sqrt(1-eta^2)` below 1,
/// `arccos(1/eta)/sqrt(eta^2-1)` above 1, and 1 at `eta = 1`.
pub fn branch_log_inv(eta: f64) -> Result<f64> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(domain(format!(
            "branch_log_inv requires finite eta > 0, got {eta}"
        )));
    }
    Ok(log_inv(eta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Ratio,
    Inverse,
}

/// Every closed form known to the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Form {
    J0,
    M(u8),
    N(u8),
    I0,
    A(u8),
    B(u8),
    QTeAs,
    QTmAs,
}

const ALL_FORMS: [Form; 18] = [
    Form::J0,
    Form::M(0),
    Form::M(1),
    Form::M(2),
    Form::M(3),
    Form::N(0),
    Form::N(1),
    Form::N(2),
    Form::I0,
    Form::A(0),
    Form::A(1),
    Form::A(2),
    Form::A(3),
    Form::B(0),
    Form::B(1),
    Form::B(2),
    Form::QTeAs,
    Form::QTmAs,
];

impl Form {
    fn index(self) -> usize {
        ALL_FORMS
            .iter()
            .position(|f| *f == self)
            .expect("known form")
    }
}

/// `[sum p_k eta^k + (sum r_k eta^k) B(eta)] / (1 - eta^2)^pole`.
struct Spec {
    p: Vec<(i32, f64)>,
    r: Vec<(i32, f64)>,
    pole: u32,
    branch: Branch,
}

fn spec(form: Form) -> Spec {
    use Branch::*;
    let (p, r, pole, branch): (Vec<(i32, f64)>, Vec<(i32, f64)>, u32, Branch) = match form {
        Form::J0 => (vec![(0, PI / 2.0)], vec![(0, -1.0)], 0, Ratio),
        Form::M(0) => (vec![(1, 1.0)], vec![(2, -1.0)], 1, Ratio),
        Form::M(1) => (
            vec![(-1, -2.0), (-2, PI)],
            vec![(0, 1.0), (-2, -2.0)],
            0,
            Ratio,
        ),
        Form::M(2) => (
            vec![(-1, -7.0 / 3.0), (-3, 4.0), (-2, 1.5 * PI), (-4, -2.0 * PI)],
            vec![(0, 1.0), (-2, -5.0), (-4, 4.0)],
            0,
            Ratio,
        ),
        Form::M(3) => (
            vec![
                (-1, -38.0 / 15.0),
                (-3, 9.0),
                (-5, -6.0),
                (-2, 15.0 / 8.0 * PI),
                (-4, -5.0 * PI),
                (-6, 3.0 * PI),
            ],
            vec![(0, 1.0), (-2, -8.0), (-4, 13.0), (-6, -6.0)],
            0,
            Ratio,
        ),
        Form::N(0) => (
            vec![
                (-1, -3.0),
                (1, 2.0),
                (-2, 1.5 * PI),
                (0, -1.25 * PI),
                (2, -0.25 * PI),
            ],
            vec![(-2, -3.0), (0, 4.0)],
            1,
            Ratio,
        ),
        Form::N(1) => (
            vec![
                (-1, -2.0 / 3.0),
                (-3, 5.0),
                (0, PI / 16.0),
                (-2, 0.75 * PI),
                (-4, -2.5 * PI),
            ],
            vec![(-4, 5.0), (-2, -4.0)],
            0,
            Ratio,
        ),
        Form::N(2) => (
            vec![
                (-1, -0.4),
                (-3, 19.0 / 3.0),
                (-5, -7.0),
                (0, PI / 32.0),
                (-2, 9.0 / 16.0 * PI),
                (-4, -3.75 * PI),
                (-6, 3.5 * PI),
            ],
            vec![(-2, -4.0), (-4, 11.0), (-6, -7.0)],
            0,
            Ratio,
        ),
        Form::I0 => (vec![], vec![(1, -1.0)], 0, Inverse),
        Form::A(0) => (vec![(1, -1.0)], vec![(1, 1.0)], 1, Inverse),
        Form::A(1) => (
            vec![(1, -2.0), (2, PI)],
            vec![(1, 1.0), (3, -2.0)],
            0,
            Inverse,
        ),
        Form::A(2) => (
            vec![(1, -7.0 / 3.0), (3, 4.0), (2, 1.5 * PI), (4, -2.0 * PI)],
            vec![(1, 1.0), (3, -5.0), (5, 4.0)],
            0,
            Inverse,
        ),
        Form::A(3) => (
            vec![
                (1, -38.0 / 15.0),
                (3, 9.0),
                (5, -6.0),
                (2, 15.0 / 8.0 * PI),
                (4, -5.0 * PI),
                (6, 3.0 * PI),
            ],
            vec![(1, 1.0), (3, -8.0), (5, 13.0), (7, -6.0)],
            0,
            Inverse,
        ),
        Form::B(0) => (
            vec![(3, 1.0), (2, 0.5 * PI), (4, -0.5 * PI)],
            vec![(3, -2.0), (5, 1.0)],
            1,
            Inverse,
        ),
        Form::B(1) => (
            vec![(3, 3.0), (2, 0.25 * PI), (4, -1.5 * PI)],
            vec![(3, -2.0), (5, 3.0)],
            0,
            Inverse,
        ),
        Form::B(2) => (
            vec![
                (3, 11.0 / 3.0),
                (5, -5.0),
                (2, 3.0 / 16.0 * PI),
                (4, -2.25 * PI),
                (6, 2.5 * PI),
            ],
            vec![(3, -2.0), (5, 7.0), (7, -5.0)],
            0,
            Inverse,
        ),
        Form::QTeAs => (
            vec![
                (0, 17.0 / 128.0),
                (-1, -1.0 / (12.0 * PI)),
                (-2, 3.0 / 32.0),
                (-3, 5.0 / (8.0 * PI)),
                (-4, -5.0 / 16.0),
            ],
            vec![
                (-4, 5.0 / (8.0 * PI)),
                (-2, -4.0 / (8.0 * PI)),
                (0, -2.0 / (8.0 * PI)),
            ],
            0,
            Ratio,
        ),
        Form::QTmAs => (
            vec![
                (1, -40.0 / (96.0 * PI)),
                (3, 84.0 / (96.0 * PI)),
                (2, 27.0 / 96.0),
                (4, -42.0 / 96.0),
            ],
            vec![(3, -1.0 / PI), (5, 7.0 / (8.0 * PI))],
            0,
            Inverse,
        ),
        Form::M(_) | Form::N(_) | Form::A(_) | Form::B(_) => unreachable!("no such piece"),
    };
    Spec { p, r, pole, branch }
}

/// Truncated power series helpers; all vectors have the same length.
mod series {
    pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        let n = a.len();
        let mut out = vec![0.0; n];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            for (j, &bj) in b.iter().take(n - i).enumerate() {
                out[i + j] += ai * bj;
            }
        }
        out
    }

    /// `(1 + c x)^alpha`.
    pub fn binomial(alpha: f64, c: f64, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        let mut term = 1.0;
        for (k, o) in out.iter_mut().enumerate() {
            *o = term;
            term *= c * (alpha - k as f64) / (k as f64 + 1.0);
        }
        out
    }

    /// `sum g_k u(x)^k` for a series `u` without constant term.
    pub fn compose(g: &[f64], u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let mut out = vec![0.0; n];
        for &gk in g.iter().rev() {
            out = mul(&out, u);
            out[0] += gk;
        }
        out
    }

    pub fn horner(c: &[f64], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
    }
}

/// Drops the leading `shift` coefficients, which cancel analytically.
fn drop_leading(mut c: Vec<f64>, shift: usize) -> Vec<f64> {
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    for (k, v) in c.iter().take(shift).enumerate() {
        debug_assert!(
            v.abs() <= 1e-9 * scale,
            "coefficient {k} should cancel but is {v:e}"
        );
    }
    c.drain(..shift.min(c.len()));
    c
}

/// Series in `eta` about 0 for the arccos branch.
fn small_eta_series(s: &Spec) -> Vec<f64> {
    const SHIFT: i32 = 6;
    let n = SERIES_TERMS + SHIFT as usize;
    let mut f = vec![0.0; n];
    f[0] = PI / 2.0;
    f[1] = -1.0;
    for k in 1..n - 1 {
        f[k + 1] = k as f64 * f[k - 1] / (k as f64 + 1.0);
    }
    let mut p = vec![0.0; n];
    let mut r = vec![0.0; n];
    for &(k, c) in &s.p {
        p[(k + SHIFT) as usize] += c;
    }
    for &(k, c) in &s.r {
        r[(k + SHIFT) as usize] += c;
    }
    let mut num: Vec<f64> = p
        .iter()
        .zip(series::mul(&r, &f))
        .map(|(a, b)| a + b)
        .collect();
    let inv = {
        let mut v = vec![0.0; n];
        for k in (0..n).step_by(2) {
            v[k] = 1.0;
        }
        v
    };
    for _ in 0..s.pole {
        num = series::mul(&num, &inv);
    }
    drop_leading(num, SHIFT as usize)
}

/// Series in `w = 1/eta` about 0 for the inverse branch, where
/// `Li(eta) = w f(w)` with the same `f` as above.
fn large_eta_series(s: &Spec) -> Vec<f64> {
    const SHIFT: i32 = 8;
    let n = SERIES_TERMS + SHIFT as usize;
    let mut f = vec![0.0; n];
    f[0] = PI / 2.0;
    f[1] = -1.0;
    for k in 1..n - 1 {
        f[k + 1] = k as f64 * f[k - 1] / (k as f64 + 1.0);
    }
    let mut p = vec![0.0; n];
    let mut r = vec![0.0; n];
    for &(k, c) in &s.p {
        p[(SHIFT - k) as usize] += c;
    }
    for &(k, c) in &s.r {
        r[(SHIFT - k + 1) as usize] += c;
    }
    let mut num: Vec<f64> = p
        .iter()
        .zip(series::mul(&r, &f))
        .map(|(a, b)| a + b)
        .collect();
    // 1/(1-eta^2) = -w^2/(1-w^2)
    let mut inv = vec![0.0; n];
    for k in (2..n).step_by(2) {
        inv[k] = -1.0;
    }
    for _ in 0..s.pole {
        num = series::mul(&num, &inv);
    }
    drop_leading(num, SHIFT as usize)
}

/// Taylor series in `delta = eta - 1`.
fn near_one_series(s: &Spec) -> Vec<f64> {
    let m = s.pole as usize;
    let n = TAYLOR_ORDER + 1 + m;
    let g = g_coefficients(3 * n);
    let branch = match s.branch {
        // u = 1 - eta^2 = -2 delta - delta^2
        Branch::Ratio => {
            let mut u = vec![0.0; n];
            u[1] = -2.0;
            if n > 2 {
                u[2] = -1.0;
            }
            series::compose(&g, &u)
        }
        // G(1 - eta^-2) / eta
        Branch::Inverse => {
            let mut u: Vec<f64> = series::binomial(-2.0, 1.0, n).iter().map(|c| -c).collect();
            u[0] += 1.0;
            series::mul(&series::compose(&g, &u), &series::binomial(-1.0, 1.0, n))
        }
    };
    let mut num = vec![0.0; n];
    for &(k, c) in &s.p {
        for (acc, b) in num.iter_mut().zip(series::binomial(k as f64, 1.0, n)) {
            *acc += c * b;
        }
    }
    let mut rs = vec![0.0; n];
    for &(k, c) in &s.r {
        for (acc, b) in rs.iter_mut().zip(series::binomial(k as f64, 1.0, n)) {
            *acc += c * b;
        }
    }
    for (acc, v) in num.iter_mut().zip(series::mul(&rs, &branch)) {
        *acc += v;
    }
    // (1 - eta^2)^m = delta^m (-2)^m (1 + delta/2)^m
    let mut out = drop_leading(num, m);
    out.resize(TAYLOR_ORDER + 1, 0.0);
    let tail: Vec<f64> = series::binomial(-(m as f64), 0.5, TAYLOR_ORDER + 1)
        .iter()
        .map(|c| c * (-0.5f64).powi(m as i32))
        .collect();
    series::mul(&out, &tail)
}

struct Expansion {
    spec: Spec,
    near_one: Vec<f64>,
    outer: Vec<f64>,
}

fn expansions() -> &'static [Expansion] {
    static CACHE: OnceLock<Vec<Expansion>> = OnceLock::new();
    CACHE.get_or_init(|| {
        ALL_FORMS
            .iter()
            .map(|&form| {
                let spec = spec(form);
                let near_one = near_one_series(&spec);
                let outer = match spec.branch {
                    Branch::Ratio => small_eta_series(&spec),
                    Branch::Inverse => large_eta_series(&spec),
                };
                Expansion {
                    spec,
                    near_one,
                    outer,
                }
            })
            .collect()
    })
}

fn raw(s: &Spec, eta: f64) -> f64 {
    let poly = |terms: &[(i32, f64)]| terms.iter().map(|&(k, c)| c * eta.powi(k)).sum::<f64>();
    let b = match s.branch {
        Branch::Ratio => log_ratio(eta),
        Branch::Inverse => log_inv(eta),
    };
    let num = poly(&s.p) + poly(&s.r) * b;
    num / ((1.0 - eta) * (1.0 + eta)).powi(s.pole as i32)
}

/// Limit at infinite eta of an arccos-branch form. The branch term decays
/// like `ln(eta)/eta`, so only the rational part survives.
fn ratio_limit(s: &Spec) -> f64 {
    let lead = 2 * s.pole as i32;
    debug_assert!(s.p.iter().all(|&(k, _)| k <= lead));
    debug_assert!(s.r.iter().all(|&(k, _)| k <= lead));
    let sign = if s.pole % 2 == 0 { 1.0 } else { -1.0 };
    sign * s
        .p
        .iter()
        .filter(|&&(k, _)| k == lead)
        .map(|&(_, c)| c)
        .sum::<f64>()
}

/// Evaluates a form at `eta > 0` or infinity.
pub(crate) fn evaluate(form: Form, eta: Eta) -> f64 {
    let e = &expansions()[form.index()];
    let x = match eta {
        Eta::Infinite => {
            return match e.spec.branch {
                Branch::Ratio => ratio_limit(&e.spec),
                Branch::Inverse => e.outer[0],
            }
        }
        Eta::Finite(v) => v,
    };
    let delta = x - 1.0;
    if delta.abs() < NEAR_ONE {
        return series::horner(&e.near_one, delta);
    }
    match e.spec.branch {
        Branch::Ratio if x < SMALL_ETA => series::horner(&e.outer, x),
        Branch::Inverse if x > LARGE_ETA => series::horner(&e.outer, 1.0 / x),
        _ => raw(&e.spec, x),
    }
}

#[cfg(test)]
pub(crate) fn evaluate_raw(form: Form, eta: f64) -> f64 {
    raw(&spec(form), eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn branch_examples() {
        assert_eq!(branch_log_ratio(1.0).unwrap(), 1.0);
        assert_relative_eq!(
            branch_log_ratio(2.0).unwrap(),
            0.760_345_996_300_946_3,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            branch_log_ratio(0.5).unwrap(),
            1.209_199_576_156_145_2,
            max_relative = 1e-14
        );
        assert_eq!(branch_log_inv(1.0).unwrap(), 1.0);
        assert_relative_eq!(
            branch_log_inv(0.5).unwrap(),
            1.520_691_992_601_892_7,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            branch_log_inv(2.0).unwrap(),
            0.604_599_788_078_072_6,
            max_relative = 1e-14
        );
    }

    #[test]
    fn branch_domain() {
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(branch_log_ratio(bad).is_err());
            assert!(branch_log_inv(bad).is_err());
        }
    }

    #[test]
    fn branch_series_switch_is_seamless() {
        for eta in [0.866, 0.8661, 1.118, 1.1181, 0.5, 2.0] {
            let u: f64 = 1.0 - eta * eta;
            let direct = if eta < 1.0 {
                eta.acos() / u.sqrt()
            } else {
                eta.acosh() / (-u).sqrt()
            };
            assert_relative_eq!(log_ratio(eta), direct, max_relative = 1e-14);
        }
    }

    #[test]
    fn branch_large_eta() {
        let eta = 1e12;
        assert_relative_eq!(log_ratio(eta), (2.0 * eta).ln() / eta, max_relative = 1e-14);
        assert_relative_eq!(log_inv(eta), PI / (2.0 * eta), max_relative = 1e-11);
        assert!(log_ratio(1e300).is_finite());
    }

    #[test]
    fn series_regimes_match_raw_at_boundaries() {
        for &form in &ALL_FORMS {
            for eta in [
                0.4, 0.49, 0.51, 0.6, 0.69, 0.71, 1.39, 1.41, 0.98, 0.9995, 1.0005, 1.02, 1.9,
                2.01, 2.5,
            ] {
                let raw = evaluate_raw(form, eta);
                let got = evaluate(form, Eta::Finite(eta));
                assert!(
                    (got - raw).abs() <= 1e-10 * raw.abs().max(1e-3),
                    "{form:?} at {eta}: {got} vs raw {raw}"
                );
            }
        }
    }

    #[test]
    fn continuity_at_one() {
        for &form in &ALL_FORMS {
            let at = evaluate(form, Eta::Finite(1.0));
            let h = 1e-6;
            let two_sided = 0.5 * (evaluate_raw(form, 1.0 - h) + evaluate_raw(form, 1.0 + h));
            assert!(
                (two_sided - at).abs() < 1e-8,
                "{form:?}: {two_sided} vs {at}"
            );
            for eta in [1.0 - 1e-3, 1.0 + 1e-3] {
                let taylor = series::horner(&expansions()[form.index()].near_one, eta - 1.0);
                let raw = evaluate_raw(form, eta);
                assert!(
                    (taylor - raw).abs() < 1e-10,
                    "{form:?} at {eta}: {taylor} vs {raw}"
                );
            }
        }
    }

    #[test]
    fn infinite_limits() {
        let inf = Eta::Infinite;
        assert_relative_eq!(evaluate(Form::J0, inf), PI / 2.0);
        for k in 0..4 {
            assert!(evaluate(Form::M(k), inf).abs() < 1e-15);
            assert!(evaluate(Form::A(k), inf).abs() < 1e-15);
        }
        assert_relative_eq!(evaluate(Form::N(0), inf), PI / 4.0, max_relative = 1e-15);
        assert_relative_eq!(evaluate(Form::N(1), inf), PI / 16.0, max_relative = 1e-15);
        assert_relative_eq!(evaluate(Form::N(2), inf), PI / 32.0, max_relative = 1e-15);
        assert_relative_eq!(evaluate(Form::I0, inf), -PI / 2.0, max_relative = 1e-15);
        assert_relative_eq!(evaluate(Form::B(0), inf), PI / 4.0, max_relative = 1e-15);
        assert_relative_eq!(evaluate(Form::B(1), inf), PI / 16.0, max_relative = 1e-15);
        assert_relative_eq!(evaluate(Form::B(2), inf), PI / 32.0, max_relative = 1e-13);
        assert_eq!(evaluate(Form::QTeAs, inf), 17.0 / 128.0);
        assert_relative_eq!(
            evaluate(Form::QTmAs, inf),
            -11.0 / 128.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn large_finite_eta_approaches_limits() {
        for &form in &ALL_FORMS {
            let lim = evaluate(form, Eta::Infinite);
            let v = evaluate(form, Eta::Finite(1e9));
            assert!((v - lim).abs() < 1e-7, "{form:?}: {v} vs {lim}");
        }
    }

    #[test]
    fn small_eta_asymptotics() {
        let eta = 1e-4;
        assert_relative_eq!(
            evaluate(Form::QTeAs, Eta::Finite(eta)),
            eta / (4.0 * PI),
            max_relative = 1e-3
        );
        assert_relative_eq!(
            evaluate(Form::QTmAs, Eta::Finite(eta)),
            -5.0 * eta / (12.0 * PI),
            max_relative = 1e-3
        );
        assert_relative_eq!(
            evaluate(Form::J0, Eta::Finite(eta)),
            eta,
            max_relative = 1e-3
        );
    }
}
