//! Adaptive 15-point Gauss-Kronrod quadrature.
//!
//! Every integral in the crate goes through [`integrate_finite`],
//! [`integrate_semi_infinite`] or [`integrate_from_one`]. Subdivision always
//! bisects the interval with the largest error estimate (ties go to the
//! older interval), so results are bit-reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{domain, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const RULE_EVALS: usize = 15;

/// Outcome of one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error: f64,
    pub evals: usize,
    pub converged: bool,
}

impl QuadratureResult {
    fn zero() -> Self {
        QuadratureResult {
            value: 0.0,
            abs_error: 0.0,
            evals: 0,
            converged: true,
        }
    }
}

/// Error targets for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_evals: 1_000_000,
        }
    }
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_evals: usize) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(abs_tol) || !ok(rel_tol) || max_evals == 0 {
            return Err(domain(format!(
                "tolerances must be positive (abs_tol={abs_tol}, rel_tol={rel_tol}, max_evals={max_evals})"
            )));
        }
        Ok(ToleranceConfig {
            abs_tol,
            rel_tol,
            max_evals,
        })
    }

    /// Same limits with both tolerances replaced.
    pub fn with_tolerances(self, abs_tol: f64, rel_tol: f64) -> Self {
        ToleranceConfig {
            abs_tol,
            rel_tol,
            ..self
        }
    }

    pub(crate) fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    seq: u64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One 15-point Kronrod evaluation with its embedded 7-point Gauss estimate.
fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let value = res_k * half;
    let error = rescale_error(err, res_abs * half.abs(), res_asc * half.abs());
    (value, error)
}

fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    initial_pieces: usize,
    tol: &ToleranceConfig,
) -> QuadratureResult {
    let mut heap = BinaryHeap::new();
    let mut done: Vec<Segment> = Vec::new();
    let mut seq = 0u64;
    let mut evals = 0usize;
    let mut value = 0.0;
    let mut error = 0.0;
    let width = (b - a) / initial_pieces as f64;
    for i in 0..initial_pieces {
        let lo = a + width * i as f64;
        let hi = if i + 1 == initial_pieces {
            b
        } else {
            lo + width
        };
        let (v, e) = kronrod15(&mut f, lo, hi);
        evals += RULE_EVALS;
        value += v;
        error += e;
        heap.push(Segment {
            a: lo,
            b: hi,
            value: v,
            error: e,
            seq,
        });
        seq += 1;
    }

    let mut finite = value.is_finite() && error.is_finite();
    while finite && error > tol.target(value) && evals + 2 * RULE_EVALS <= tol.max_evals {
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.a + seg.b);
        let scale = seg.a.abs().max(seg.b.abs()).max(f64::MIN_POSITIVE);
        if (seg.b - seg.a) <= 64.0 * f64::EPSILON * scale || mid <= seg.a || mid >= seg.b {
            // Cannot split further; its error stays in the total.
            done.push(seg);
            continue;
        }
        let (v1, e1) = kronrod15(&mut f, seg.a, mid);
        let (v2, e2) = kronrod15(&mut f, mid, seg.b);
        evals += 2 * RULE_EVALS;
        value += v1 + v2 - seg.value;
        error += e1 + e2 - seg.error;
        finite = v1.is_finite() && v2.is_finite() && e1.is_finite() && e2.is_finite();
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
            seq,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
            seq: seq + 1,
        });
        seq += 2;
    }

    let mut segments = heap.into_vec();
    segments.extend(done);
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: f64 = segments.iter().map(|s| s.value).sum();
    let abs_error: f64 = segments.iter().map(|s| s.error).sum();
    let converged = value.is_finite() && abs_error.is_finite() && abs_error <= tol.target(value);
    QuadratureResult {
        value,
        abs_error,
        evals,
        converged,
    }
}

/// `int_a^b f(x) dx`. Reversed bounds flip the sign; equal bounds give 0.
pub fn integrate_finite<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: &ToleranceConfig,
) -> QuadratureResult {
    if a == b {
        return QuadratureResult::zero();
    }
    if a > b {
        let r = adaptive(f, b, a, 1, tol);
        return QuadratureResult {
            value: -r.value,
            ..r
        };
    }
    adaptive(f, a, b, 1, tol)
}

/// `int_0^inf f(z) dz` through the map `z = u / (1 - u)`.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    tol: &ToleranceConfig,
) -> QuadratureResult {
    let mapped = move |u: f64| {
        let w = 1.0 - u;
        let z = u / w;
        if !z.is_finite() {
            return 0.0;
        }
        let fz = f(z);
        if fz == 0.0 {
            0.0
        } else {
            fz / (w * w)
        }
    };
    adaptive(mapped, 0.0, 1.0, 4, tol)
}

/// `int_1^inf f(x) dx` for integrands with an inverse-square-root endpoint
/// singularity at 1. Uses `x = 1 + v^2` before the semi-infinite map.
pub fn integrate_from_one<F: FnMut(f64) -> f64>(
    mut f: F,
    tol: &ToleranceConfig,
) -> QuadratureResult {
    integrate_semi_infinite(
        move |v| {
            if v == 0.0 {
                return 0.0;
            }
            let fx = f(1.0 + v * v);
            if fx == 0.0 {
                0.0
            } else {
                2.0 * v * fx
            }
        },
        tol,
    )
}
