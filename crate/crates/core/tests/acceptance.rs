//! Acceptance gate. Runs every criterion, prints one line per criterion and
//! exits non-zero if any of them fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use casimir_core::appendix::{verify, DEFAULT_ETA_GRID};
use casimir_core::constants::{ETA_GRAPHENE, Q_PLANAR_PERFECT, Q_PLANAR_PERFECT_POLARIZATION};
use casimir_core::planar::{planar_small_eta_tm_slope, q_planar_total, q_te_planar, q_tm_planar};
use casimir_core::quadrature::ToleranceConfig;
use casimir_core::specfun::bessel_pair;
use casimir_core::sphere::{
    critical_eta, q_sphere_total, q_te_sphere_as, q_te_sphere_num, q_tm_sphere_as, q_tm_sphere_num,
    SumConfig,
};
use casimir_core::Eta;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn rel(value: f64, target: f64) -> f64 {
    (value - target).abs() / target.abs()
}

fn timed<F: FnOnce() -> Outcome>(limit: Option<Duration>, f: F) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if let Some(limit) = limit {
        if took > limit {
            o.pass = false;
        }
        o.detail
            .push_str(&format!("; {:.2?} (limit {:?})", took, limit));
    } else {
        o.detail.push_str(&format!("; {took:.2?}"));
    }
    o
}

fn planar_perfect() -> Outcome {
    let tol = ToleranceConfig::default();
    let perfect = q_planar_total(Eta::Infinite, &tol).unwrap().value;
    let large = q_planar_total(Eta::Finite(1e4), &tol).unwrap().value;
    let r_perfect = rel(perfect, Q_PLANAR_PERFECT);
    let r_large = rel(large, Q_PLANAR_PERFECT);
    outcome(
        r_perfect <= 1e-8 && r_large <= 1e-3,
        format!(
            "rho = 1 path {perfect:.10e} (rel {r_perfect:.1e}, need 1e-8); eta = 1e4 {large:.10e} (rel {r_large:.4e}, need 1e-3)"
        ),
    )
}

fn planar_split() -> Outcome {
    let tol = ToleranceConfig::default();
    let te = q_te_planar(Eta::Infinite, &tol).unwrap().value;
    let tm = q_tm_planar(Eta::Infinite, &tol).unwrap().value;
    let (a, b) = (
        rel(te, Q_PLANAR_PERFECT_POLARIZATION),
        rel(tm, Q_PLANAR_PERFECT_POLARIZATION),
    );
    outcome(
        a <= 1e-8 && b <= 1e-8,
        format!("TE {te:.10e} (rel {a:.1e}), TM {tm:.10e} (rel {b:.1e})"),
    )
}

fn planar_small_tm() -> Outcome {
    let tol = ToleranceConfig::default();
    let eta = 1e-3;
    let ratio = q_tm_planar(Eta::Finite(eta), &tol).unwrap().value / eta;
    let constant = planar_small_eta_tm_slope();
    let r = rel(ratio, constant.slope);
    let z = -16.0 * PI * PI * ratio;
    outcome(
        r <= 5e-3 && within(z, 1.024, 1e-3) && within(constant.z, 1.024, 1e-3),
        format!(
            "Q_TM/eta = {ratio:.7e} vs {:.7e} (rel {r:.2e}, need 5e-3); Z from ratio {z:.5}, exact {:.5}",
            constant.slope, constant.z
        ),
    )
}

fn planar_small_te() -> Outcome {
    let tol = ToleranceConfig::default();
    let eta: f64 = 1e-2;
    let q = q_te_planar(Eta::Finite(eta), &tol).unwrap().value;
    let expected = -eta * eta / (48.0 * PI * PI);
    let r = rel(q, expected);
    outcome(
        r <= 0.02,
        format!("{q:.6e} vs {expected:.6e} (rel {r:.2e}, need 2e-2)"),
    )
}

fn sphere_te() -> Outcome {
    let cfg = SumConfig::default();
    let as_ = q_te_sphere_as(Eta::Infinite).unwrap();
    let num = q_te_sphere_num(Eta::Infinite, &cfg).unwrap().value;
    let total = as_ + num;
    outcome(
        as_ == 17.0 / 128.0 && within(num, 0.0009, 0.0003) && within(total, 0.1337, 0.0005),
        format!(
            "as {as_} (17/128 = {}), num {num:.6}, total {total:.6}",
            17.0 / 128.0
        ),
    )
}

fn sphere_tm() -> Outcome {
    let cfg = SumConfig::default();
    let as_ = q_tm_sphere_as(Eta::Infinite).unwrap();
    let num = q_tm_sphere_num(Eta::Infinite, &cfg).unwrap().value;
    let total = as_ + num;
    outcome(
        as_ == -11.0 / 128.0 && within(num, -0.0016, 0.0005) && within(total, -0.0875, 0.001),
        format!(
            "as {as_} (-11/128 = {}), num {num:.6}, total {total:.6}",
            -11.0 / 128.0
        ),
    )
}

fn boyer() -> Outcome {
    let b = q_sphere_total(Eta::Infinite, &SumConfig::default()).unwrap();
    outcome(
        within(b.total, 0.046, 0.001),
        format!(
            "total {:.7} +/- {:.1e}, target 0.046 +/- 0.001",
            b.total, b.abs_error
        ),
    )
}

fn sphere_slope() -> Outcome {
    let eta = 1e-3;
    let b = q_sphere_total(Eta::Finite(eta), &SumConfig::default()).unwrap();
    let slope = b.total / eta;
    outcome(
        within(slope, -0.0542, 0.0011),
        format!("Q/eta = {slope:.6}, target -0.0542 +/- 0.0011"),
    )
}

fn critical() -> Outcome {
    let cfg = SumConfig::default();
    let c = critical_eta(&cfg, 1e-6).unwrap();
    let lo = q_sphere_total(Eta::Finite(1.0), &cfg).unwrap().total;
    let hi = q_sphere_total(Eta::Finite(2.0), &cfg).unwrap().total;
    outcome(
        within(c.eta, 1.578, 0.005) && lo < 0.0 && hi > 0.0,
        format!(
            "root {:.6}, Q(1) = {lo:.4e}, Q(2) = {hi:.4e}, target 1.578 +/- 0.005",
            c.eta
        ),
    )
}

fn graphene_sphere() -> Outcome {
    let cfg = SumConfig::default();
    let b = q_sphere_total(Eta::Finite(ETA_GRAPHENE), &cfg).unwrap();
    let small = q_sphere_total(Eta::Finite(1e-3), &cfg).unwrap().total / 1e-3;
    outcome(
        within(b.total, -0.000621, 1e-5),
        format!(
            "total {:.4e} +/- {:.1e}, target -6.21e-4 +/- 1e-5; linear extrapolation slope*eta = {:.4e}, published slope -0.0542*eta = {:.4e}",
            b.total,
            b.abs_error,
            small * ETA_GRAPHENE,
            -0.0542 * ETA_GRAPHENE
        ),
    )
}

fn appendix() -> Outcome {
    let report = verify(&DEFAULT_ETA_GRID, None).unwrap();
    let worst_piece = report
        .summary
        .iter()
        .map(|s| s.max_rel_discrepancy)
        .fold(0.0, f64::max);
    let worst_assembly = report
        .assembly
        .iter()
        .map(|a| a.te_rel.max(a.tm_rel))
        .fold(0.0, f64::max);
    let failing: Vec<String> = report
        .summary
        .iter()
        .filter(|s| !s.pass)
        .map(|s| s.name.to_string())
        .collect();
    outcome(
        report.pass && report.summary.len() == 16,
        format!(
            "{} pieces x {} etas, worst closed/quadrature rel {worst_piece:.1e}, worst assembly rel {worst_assembly:.1e}, failing {failing:?}",
            report.summary.len(),
            report.eta_grid.len()
        ),
    )
}

fn properties() -> Outcome {
    let mut notes = Vec::new();

    let mut worst_w = 0.0f64;
    for l in 0..=100 {
        for i in 0..61 {
            let x = 10f64.powf(-3.0 + 6.0 * i as f64 / 60.0);
            worst_w = worst_w.max((bessel_pair(l, x).unwrap().wronskian() + 1.0).abs());
        }
    }
    let wronskian = worst_w < 1e-10;
    notes.push(format!("wronskian {worst_w:.1e}"));

    let mut worst_c = 0.0f64;
    for f in [q_te_sphere_as, q_tm_sphere_as] {
        let at = f(Eta::Finite(1.0)).unwrap();
        let lo = f(Eta::Finite(1.0 - 1e-6)).unwrap();
        let hi = f(Eta::Finite(1.0 + 1e-6)).unwrap();
        worst_c = worst_c.max((0.5 * (lo + hi) - at).abs());
    }
    let continuity = worst_c < 1e-8;
    notes.push(format!("continuity {worst_c:.1e}"));

    let tol = ToleranceConfig::default();
    let grid = [0.01, 0.1, 1.0, 10.0, 100.0];
    let te: Vec<f64> = grid
        .iter()
        .map(|&e| q_te_planar(Eta::Finite(e), &tol).unwrap().value)
        .collect();
    let tm: Vec<f64> = grid
        .iter()
        .map(|&e| q_tm_planar(Eta::Finite(e), &tol).unwrap().value)
        .collect();
    let planar = te.iter().chain(&tm).all(|q| *q < 0.0)
        && te.windows(2).chain(tm.windows(2)).all(|w| w[1] <= w[0])
        && [0, 1, 2].iter().all(|&i| tm[i].abs() >= te[i].abs());
    notes.push(format!(
        "planar grid {}",
        if planar { "ok" } else { "violated" }
    ));

    let cfg = SumConfig::default();
    let sphere_grid = [
        Eta::Finite(0.01),
        Eta::Finite(0.1),
        Eta::Finite(0.5),
        Eta::Finite(1.0),
        Eta::Finite(1.578),
        Eta::Finite(2.0),
        Eta::Finite(5.0),
        Eta::Finite(10.0),
        Eta::Infinite,
    ];
    let mut signs = true;
    let mut small = true;
    let mut doubling = true;
    for eta in sphere_grid {
        let b = q_sphere_total(eta, &cfg).unwrap();
        signs &= b.te() > 0.0 && b.tm() < 0.0;
        small &= b.te_num.abs() <= 0.1 * b.te_as.abs() && b.tm_num.abs() <= 0.1 * b.tm_as.abs();
        let short = cfg.with_l_max(40);
        let long = cfg.with_l_max(80);
        for f in [q_te_sphere_num, q_tm_sphere_num] {
            let a = f(eta, &short).unwrap();
            let b = f(eta, &long).unwrap();
            doubling &= (a.value - b.value).abs() < a.abs_error;
        }
    }
    notes.push(format!(
        "sphere signs {}",
        if signs { "ok" } else { "violated" }
    ));
    notes.push(format!(
        "num/as smallness {}",
        if small { "ok" } else { "violated" }
    ));
    notes.push(format!(
        "l_max doubling {}",
        if doubling { "ok" } else { "violated" }
    ));

    outcome(
        wronskian && continuity && planar && signs && small && doubling,
        notes.join(", "),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        (
            "planar perfect conductor",
            Some(Duration::from_secs(1)),
            planar_perfect,
        ),
        ("planar TE/TM split at infinity", None, planar_split),
        ("planar small-eta TM slope", None, planar_small_tm),
        ("planar small-eta TE", None, planar_small_te),
        ("sphere TE limits", Some(Duration::from_secs(30)), sphere_te),
        ("sphere TM limits", None, sphere_tm),
        ("perfect shell total", None, boyer),
        ("sphere small-eta slope", None, sphere_slope),
        (
            "critical conductivity",
            Some(Duration::from_secs(120)),
            critical,
        ),
        ("graphene shell", None, graphene_sphere),
        (
            "appendix closed forms vs quadrature",
            Some(Duration::from_secs(60)),
            appendix,
        ),
        ("property suites", None, properties),
    ];
    let mut failed = 0;
    for (i, (title, limit, f)) in criteria.into_iter().enumerate() {
        let o = timed(limit, f);
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {title}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
