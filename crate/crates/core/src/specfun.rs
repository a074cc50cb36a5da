//! Modified spherical Bessel functions of half-integer order and the Debye
//! subtraction kernels.
//!
//! `s_l(x) = sqrt(pi x / 2) I_{l+1/2}(x)` and `e_l(x) = sqrt(2 x / pi) K_{l+1/2}(x)`.
//! Everything the energy integrands need is a product of one `s` and one `e`
//! factor, so the core routine works with the two logarithmic derivatives
//! `s'/s` and `e'/e` and rebuilds the products through the Wronskian
//! `s e' - s' e = -1`. Nothing in that path can overflow.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::eta::Eta;

/// Largest multipole order accepted by the checked entry points.
pub const DEFAULT_MAX_ORDER: usize = 200;

/// Below this argument the leading small-x behaviour is used for `s'/s`.
pub const SMALL_X: f64 = 1e-8;

/// Scaled values of `s_l`, `e_l` and their derivatives at one point.
///
/// With `k = exponent`, `e^{-x} s_l(x) = s_scaled * 2^-k` and
/// `e^{x} e_l(x) = e_scaled * 2^k`. `k` is zero unless one of the two
/// scaled values would leave the double range (large `l`, tiny `x`);
/// products of an `s` factor with an `e` factor never depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselPair {
    pub l: usize,
    pub x: f64,
    pub s_scaled: f64,
    pub e_scaled: f64,
    pub ds_scaled: f64,
    pub de_scaled: f64,
    pub exponent: i32,
}

impl BesselPair {
    /// `s_l(x) e'_l(x) - s'_l(x) e_l(x)`, equal to -1.
    pub fn wronskian(&self) -> f64 {
        self.s_scaled * self.de_scaled - self.ds_scaled * self.e_scaled
    }

    pub fn product_se(&self) -> f64 {
        self.s_scaled * self.e_scaled
    }

    pub fn product_dsde(&self) -> f64 {
        self.ds_scaled * self.de_scaled
    }
}

/// Products needed by the shell integrands at one `(l, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Products {
    /// `s_l e_l = x I K`
    pub se: f64,
    /// `d/dx (s_l e_l)`
    pub dse: f64,
    /// `s'_l e'_l`
    pub dsde: f64,
}

/// Variables of the uniform (Debye) expansion at order `nu` and `x = nu z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformVariables {
    pub nu: f64,
    pub z: f64,
    pub t: f64,
}

impl UniformVariables {
    pub fn new(nu: f64, z: f64) -> Self {
        UniformVariables {
            nu,
            z,
            t: 1.0 / 1f64.hypot(z),
        }
    }

    pub fn from_order(l: usize, z: f64) -> Self {
        Self::new(l as f64 + 0.5, z)
    }
}

fn check_args(l: usize, x: f64, max_order: usize) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain(format!(
            "Bessel argument must be finite and > 0, got {x}"
        )));
    }
    if l > max_order {
        return Err(domain(format!("order {l} exceeds maximum {max_order}")));
    }
    Ok(())
}

/// `e_{l+1}(x) / e_l(x)` by upward recurrence, which is stable for the
/// growing solution.
fn e_ratio(l: usize, x: f64) -> f64 {
    let mut ratio = 1.0 + 1.0 / x;
    for k in 1..=l {
        ratio = 1.0 / ratio + (2 * k + 1) as f64 / x;
    }
    ratio
}

/// `e'_l / e_l`.
fn e_log_derivative(l: usize, x: f64) -> f64 {
    (l + 1) as f64 / x - e_ratio(l, x)
}

/// `I_{nu+1}(x) / I_nu(x)` for `nu = l + 1/2` from its continued fraction
/// (modified Lentz).
fn i_ratio(l: usize, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let nu = l as f64 + 0.5;
    let mut f = TINY;
    let mut c = f;
    let mut d = 0.0;
    for j in 1..1_000_000 {
        let b = 2.0 * (nu + j as f64) / x;
        d = b + d;
        if d == 0.0 {
            d = TINY;
        }
        d = 1.0 / d;
        c = b + 1.0 / c;
        if c == 0.0 {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f
}

/// `s'_l / s_l`.
fn s_log_derivative(l: usize, x: f64) -> f64 {
    if l == 0 {
        return 1.0 / x.tanh();
    }
    let leading = (l + 1) as f64 / x;
    if x < SMALL_X {
        leading + x / (2 * l + 3) as f64
    } else {
        leading + i_ratio(l, x)
    }
}

/// Above this argument the terminating large-x expansion is used for the
/// products; its terms then decrease monotonically.
fn large_x_threshold(l: usize) -> f64 {
    2.0 * (l as f64 + 0.5) + 2.0
}

/// `s_l e_l` and its derivative from the exact half-integer expansion
/// `2 s_l e_l = A(x) - (-1)^l e^{-2x} P(x)^2`, with `A` a finite series in
/// `1/x^2` and `P = e^x e_l`.
fn large_x_products(l: usize, x: f64) -> (f64, f64) {
    let mu = ((2 * l + 1) * (2 * l + 1)) as f64;
    let inv_4x2 = 1.0 / (4.0 * x * x);
    let mut a = 1.0;
    let mut da = 0.0;
    let mut term = 1.0;
    for j in 1..=l {
        let odd = (2 * j - 1) as f64;
        term *= -(odd / (2 * j) as f64) * (mu - odd * odd) * inv_4x2;
        a += term;
        da -= 2.0 * j as f64 * term / x;
    }

    let mut p = 0.0;
    let mut dp = 0.0;
    let mut term = 1.0;
    for k in 0..=l {
        p += term;
        dp -= k as f64 * term / x;
        term *= ((l + k + 1) * (l - k)) as f64 / ((k + 1) as f64 * 2.0 * x);
    }
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    let damp = (-2.0 * x).exp();
    let se = 0.5 * (a - sign * damp * p * p);
    let dse = 0.5 * (da + sign * damp * (2.0 * p * p - 2.0 * p * dp));
    (se, dse)
}

/// Products of `s_l`, `e_l` and derivatives without argument checks.
pub(crate) fn products_unchecked(l: usize, x: f64) -> Products {
    let q = e_log_derivative(l, x);
    let (se, dse) = if x >= large_x_threshold(l) {
        large_x_products(l, x)
    } else {
        let r = s_log_derivative(l, x);
        let se = 1.0 / (r - q);
        (se, (r + q) * se)
    };
    // s' e' = q (1 + q s e), from the Wronskian; no cancellation.
    let dsde = q * (1.0 + q * se);
    Products { se, dse, dsde }
}

/// Products of `s_l`, `e_l` and their derivatives at `x`.
pub fn products(l: usize, x: f64) -> Result<Products> {
    check_args(l, x, DEFAULT_MAX_ORDER)?;
    Ok(products_unchecked(l, x))
}

/// Scaled `s_l`, `e_l` and derivatives, with orders up to `max_order`.
pub fn bessel_pair_with_max(l: usize, x: f64, max_order: usize) -> Result<BesselPair> {
    check_args(l, x, max_order)?;
    let p = products_unchecked(l, x);
    let q = e_log_derivative(l, x);

    // ln(e^x e_l) accumulated from the ratios e_{k+1}/e_k.
    let mut ln_e = 0.0;
    let mut ratio = 1.0 + 1.0 / x;
    for k in 0..l {
        if k > 0 {
            ratio = 1.0 / ratio + (2 * k + 1) as f64 / x;
        }
        ln_e += ratio.ln();
    }
    let ln_s = p.se.ln() - ln_e;
    const LIMIT: f64 = 600.0;
    let exponent = if ln_e.abs() > LIMIT || ln_s.abs() > LIMIT {
        ((ln_e - ln_s) / (2.0 * std::f64::consts::LN_2)).round() as i32
    } else {
        0
    };
    let shift = exponent as f64 * std::f64::consts::LN_2;
    let e_scaled = (ln_e - shift).exp();
    let s_scaled = p.se / e_scaled;
    Ok(BesselPair {
        l,
        x,
        s_scaled,
        e_scaled,
        // e^{-x} s' = (1 + q s e) / (e^x e)
        ds_scaled: (1.0 + q * p.se) / e_scaled,
        de_scaled: q * e_scaled,
        exponent,
    })
}

pub fn bessel_pair(l: usize, x: f64) -> Result<BesselPair> {
    bessel_pair_with_max(l, x, DEFAULT_MAX_ORDER)
}

/// `s_l(x) e_l(x)`.
pub fn product_se(l: usize, x: f64) -> Result<f64> {
    Ok(products(l, x)?.se)
}

/// `d/dx [s_l(x) e_l(x)]`.
pub fn product_se_deriv(l: usize, x: f64) -> Result<f64> {
    Ok(products(l, x)?.dse)
}

/// `s'_l(x) e'_l(x)`.
pub fn product_dsde(l: usize, x: f64) -> Result<f64> {
    Ok(products(l, x)?.dsde)
}

pub(crate) fn f0_te(z: f64, t: f64, eta: f64) -> f64 {
    eta * t * t * t / (1.0 + eta * t * z)
}

pub(crate) fn f0_te_perfect(z: f64, t: f64) -> f64 {
    t * t / z
}

pub(crate) fn f2_te(z: f64, t: f64, eta: f64) -> f64 {
    let t2 = t * t;
    let denom = 1.0 + eta * t * z;
    let poly = 2.0 - 27.0 * t2 + 60.0 * t2 * t2 - 35.0 * t2 * t2 * t2;
    let coupling = 2.0 * t2 * t * z * z * z * eta * (1.0 - 12.0 * t2 + 15.0 * t2 * t2);
    -eta * t2 * t / (8.0 * denom * denom) * (poly + coupling)
}

pub(crate) fn f2_te_perfect(z: f64, t: f64) -> f64 {
    let t2 = t * t;
    -0.25 * z * t2 * t2 * (1.0 - 12.0 * t2 + 15.0 * t2 * t2)
}

pub(crate) fn kernel_tm(nu: f64, z: f64, t: f64, eta: f64) -> f64 {
    let t2 = t * t;
    let denom = z + eta / t;
    let poly = 2.0 - 25.0 * t2 + 60.0 * t2 * t2 - 35.0 * t2 * t2 * t2
        + 2.0 * eta * t * z * (1.0 - 12.0 * t2 + 21.0 * t2 * t2);
    eta * t / denom - eta * t * z / (8.0 * nu * nu * denom * denom) * poly
}

pub(crate) fn kernel_tm_perfect(nu: f64, z: f64, t: f64) -> f64 {
    let t2 = t * t;
    t2 - 0.25 * t2 * t2 * z * z * (1.0 - 12.0 * t2 + 21.0 * t2 * t2) / (nu * nu)
}

/// Leading TE Debye kernel `eta t^3 / (1 + eta t z)`.
pub fn debye_f0_te(uv: UniformVariables, eta: Eta) -> f64 {
    match eta {
        Eta::Finite(e) => f0_te(uv.z, uv.t, e),
        Eta::Infinite => f0_te_perfect(uv.z, uv.t),
    }
}

/// Order `1/nu^2` TE Debye kernel.
pub fn debye_f2_te(uv: UniformVariables, eta: Eta) -> f64 {
    match eta {
        Eta::Finite(e) => f2_te(uv.z, uv.t, e),
        Eta::Infinite => f2_te_perfect(uv.z, uv.t),
    }
}

/// TM subtraction kernel through order `1/nu^2`.
pub fn debye_kernel_tm(uv: UniformVariables, eta: Eta) -> f64 {
    match eta {
        Eta::Finite(e) => kernel_tm(uv.nu, uv.z, uv.t, e),
        Eta::Infinite => kernel_tm_perfect(uv.nu, uv.z, uv.t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn order_zero_closed_forms() {
        for &x in &[1e-6, 0.01, 0.5, 1.0, 3.0, 25.0, 300.0] {
            let p = products(0, x).unwrap();
            assert_relative_eq!(p.se, -(-2.0 * x).exp_m1() / 2.0, max_relative = 1e-14);
            assert_relative_eq!(p.dse, (-2.0 * x).exp(), max_relative = 1e-13);
            assert_relative_eq!(
                p.dsde,
                -(1.0 + (-2.0 * x).exp()) / 2.0,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn order_one_closed_form() {
        assert_relative_eq!(
            product_se(1, 1.0).unwrap(),
            2.0 * (-2.0f64).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn documented_values() {
        assert_relative_eq!(
            product_se(0, 1.0).unwrap(),
            0.432_332_358_381_693_7,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            product_se_deriv(0, 1.0).unwrap(),
            0.135_335_283_236_612_7,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            product_se_deriv(0, 0.5).unwrap(),
            0.367_879_441_171_442_3,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            product_dsde(0, 1.0).unwrap(),
            -0.567_667_641_618_306_3,
            max_relative = 1e-14
        );
    }

    #[test]
    fn small_argument_limit() {
        for l in [0usize, 1, 4, 30] {
            let x = 1e-10;
            let p = products(l, x).unwrap();
            assert_relative_eq!(p.se, x / (2 * l + 1) as f64, max_relative = 1e-9);
        }
    }

    #[test]
    fn large_argument_limit() {
        // s e = 1/2 - l(l+1)/(4 x^2) + O(x^-4)
        for l in [0usize, 1, 5, 12] {
            let x = 20.0 + (l * l) as f64;
            let lead = (l * (l + 1)) as f64 / (4.0 * x * x);
            let se = product_se(l, x).unwrap();
            assert!(
                (0.5 - se - lead).abs() <= lead * lead * 8.0 + 1e-15,
                "l={l}"
            );
            let far = 1e6;
            assert!((product_se(l, far).unwrap() - 0.5).abs() < 1e-6);
            assert!((product_dsde(l, far).unwrap() + 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn regimes_agree_at_switch() {
        for l in [1usize, 3, 10, 40, 150] {
            let x = large_x_threshold(l);
            let (se_hi, dse_hi) = large_x_products(l, x);
            let q = e_log_derivative(l, x);
            let r = s_log_derivative(l, x);
            let se_lo = 1.0 / (r - q);
            assert_relative_eq!(se_hi, se_lo, max_relative = 1e-13);
            assert_relative_eq!(dse_hi, (r + q) * se_lo, max_relative = 1e-9);
        }
    }

    #[test]
    fn pair_is_balanced_for_extreme_arguments() {
        let p = bessel_pair(200, 1e-3).unwrap();
        assert!(p.exponent != 0);
        assert!(p.s_scaled.is_finite() && p.e_scaled.is_finite());
        assert!(p.ds_scaled.is_finite() && p.de_scaled.is_finite());
        assert_relative_eq!(p.wronskian(), -1.0, max_relative = 1e-12);
        let small = bessel_pair(2, 1.0).unwrap();
        assert_eq!(small.exponent, 0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bessel_pair(0, 0.0).is_err());
        assert!(bessel_pair(0, -1.0).is_err());
        assert!(bessel_pair(0, f64::NAN).is_err());
        assert!(bessel_pair(0, f64::INFINITY).is_err());
        assert!(bessel_pair(DEFAULT_MAX_ORDER + 1, 1.0).is_err());
        assert!(bessel_pair_with_max(300, 1.0, 400).is_ok());
    }

    #[test]
    fn uniform_variables() {
        for &z in &[0.0, 1e-8, 0.3, 1.0, 17.0, 1e8] {
            let uv = UniformVariables::new(2.5, z);
            assert_relative_eq!(uv.t * uv.t * (1.0 + z * z), 1.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn f0_values() {
        let eta = Eta::Finite(1.0);
        assert_eq!(
            debye_f0_te(UniformVariables::new(1.5, 0.0), Eta::Finite(0.7)),
            0.7
        );
        let v = debye_f0_te(UniformVariables::new(1.5, 1.0), eta);
        let expected = 2f64.powf(-1.5) / (1.0 + 2f64.powf(-0.5));
        assert_relative_eq!(v, expected, max_relative = 1e-15);
        assert_relative_eq!(v, 0.207_106_781_186_547_5, max_relative = 1e-13);
        let uv = UniformVariables::new(1.5, 2.0);
        assert_relative_eq!(
            debye_f0_te(uv, Eta::Finite(1e12)),
            debye_f0_te(uv, Eta::Infinite),
            max_relative = 1e-10
        );
    }

    #[test]
    fn f2_values() {
        // At z = 0 (t = 1) the polynomial 2 - 27 + 60 - 35 vanishes and so
        // does the z^3 coupling term.
        for e in [0.1, 1.0, 10.0] {
            assert_eq!(
                debye_f2_te(UniformVariables::new(1.5, 0.0), Eta::Finite(e)),
                0.0
            );
        }
        for &z in &[0.1, 1.0, 5.0] {
            assert_eq!(
                debye_f2_te(UniformVariables::new(1.5, z), Eta::Finite(0.0)),
                0.0
            );
        }
        // 60-digit recomputation of the kernel at eta = 1, z = 1.
        let v = debye_f2_te(UniformVariables::new(1.5, 1.0), Eta::Finite(1.0));
        assert_relative_eq!(v, F2_ETA1_Z1, max_relative = 1e-14);
        let uv = UniformVariables::new(1.5, 0.8);
        assert_relative_eq!(
            debye_f2_te(uv, Eta::Finite(1e12)),
            debye_f2_te(uv, Eta::Infinite),
            max_relative = 1e-9
        );
    }

    #[test]
    fn tm_kernel_values() {
        assert_eq!(
            debye_kernel_tm(UniformVariables::new(1.5, 0.4), Eta::Finite(0.0)),
            0.0
        );
        let v = debye_kernel_tm(UniformVariables::new(1.5, 1.0), Eta::Finite(1.0));
        assert_relative_eq!(v, TM_ETA1_Z1_NU1P5, max_relative = 1e-14);
        let uv = UniformVariables::new(1e9, 0.7);
        let leading = 0.3 * uv.t / (uv.z + 0.3 / uv.t);
        assert_relative_eq!(
            debye_kernel_tm(uv, Eta::Finite(0.3)),
            leading,
            max_relative = 1e-15
        );
        let uv = UniformVariables::new(3.5, 0.8);
        assert_relative_eq!(
            debye_kernel_tm(uv, Eta::Finite(1e12)),
            debye_kernel_tm(uv, Eta::Infinite),
            max_relative = 1e-9
        );
    }

    // mpmath, 60 digits.
    const F2_ETA1_Z1: f64 = 0.026_673_543_456_039_805;
    const TM_ETA1_Z1_NU1P5: f64 = 0.289_667_759_826_874_26;
}
