mod output;
mod sweep;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use casimir_core::appendix::{self, Perturbation, VerifyReport, DEFAULT_ETA_GRID};
use casimir_core::constants::{self, published};
use casimir_core::planar::{planar_small_eta_tm_slope, q_te_planar, q_tm_planar};
use casimir_core::quadrature::ToleranceConfig;
use casimir_core::qvalue::{Diagnostics, Parts};
use casimir_core::sphere::{critical_eta, q_sphere_total, SphereQBreakdown, SumConfig, TailModel};
use casimir_core::{EnergyUnit, EnergyValue, Error, Eta, Geometry, Length, QValue};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use output::{emit, num, render, Table};
use sweep::{Spacing, SweepGeometry, SweepRow, SweepSpec};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICS: u8 = 3;

/// Casimir energies of conducting sheets and spherical shells.
#[derive(Debug, Parser)]
#[command(name = "casimir", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Two parallel sheets a distance d apart.
    Planar(PlanarArgs),
    /// A spherical shell of radius R.
    Sphere(SphereArgs),
    /// Conductivity at which the shell energy changes sign.
    Critical(CriticalArgs),
    /// Tabulate Q over a range of conductivities.
    Sweep(SweepArgs),
    /// Compare every closed-form piece with direct quadrature.
    Verify(VerifyArgs),
    /// Named constants and reference values.
    Constants(OutputArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write CSV instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Output file (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct QuadArgs {
    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    abs_tol: f64,
    /// Maximum integrand evaluations per integral.
    #[arg(long, default_value_t = 1_000_000)]
    max_evals: usize,
}

impl QuadArgs {
    fn config(&self) -> Result<ToleranceConfig, Error> {
        ToleranceConfig::new(self.abs_tol, self.tol, self.max_evals)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TailKind {
    None,
    Fitted,
    Fixed,
}

#[derive(Debug, Args)]
struct SumArgs {
    /// Target error of each summed part, per unit of min(eta, 1).
    #[arg(long = "sum-tol", default_value_t = 1e-6)]
    sum_tol: f64,
    /// Highest angular momentum summed explicitly.
    #[arg(long, default_value_t = 60)]
    l_max: usize,
    /// Remainder model beyond l-max.
    #[arg(long, value_enum, default_value_t = TailKind::Fitted)]
    tail: TailKind,
    /// Number of terms used by the fitted tail.
    #[arg(long, default_value_t = 10)]
    tail_window: usize,
    /// Decay exponent used by the fixed tail.
    #[arg(long, default_value_t = 2.0)]
    tail_exponent: f64,
}

impl SumArgs {
    fn config(&self) -> Result<SumConfig, Error> {
        let tail = match self.tail {
            TailKind::None => TailModel::None,
            TailKind::Fitted => TailModel::Fitted {
                window: self.tail_window,
            },
            TailKind::Fixed => TailModel::FixedExponent {
                p: self.tail_exponent,
            },
        };
        SumConfig::new(self.l_max, tail, self.sum_tol)
    }
}

#[derive(Debug, Args)]
struct PlanarArgs {
    /// Conductivity 2 pi sigma / c, a number, `inf` or `graphene`.
    #[arg(long, default_value = "inf")]
    eta: Eta,
    /// Separation, e.g. `100nm`; adds the energy per unit area.
    #[arg(long)]
    d: Option<Length>,
    /// Energy unit, used with --d.
    #[arg(long, default_value = "natural")]
    unit: EnergyUnit,
    #[command(flatten)]
    quad: QuadArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SphereArgs {
    /// Conductivity 2 pi sigma / c, a number, `inf` or `graphene`.
    #[arg(long, default_value = "inf")]
    eta: Eta,
    /// Shell radius, e.g. `1um`; adds the total energy.
    #[arg(long)]
    radius: Option<Length>,
    /// Energy unit, used with --radius.
    #[arg(long, default_value = "natural")]
    unit: EnergyUnit,
    /// Same as --sum-tol.
    #[arg(long, conflicts_with = "sum_tol")]
    tol: Option<f64>,
    #[command(flatten)]
    sum: SumArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct CriticalArgs {
    /// Root tolerance in eta.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    sum: SumArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Geometry to tabulate.
    #[arg(long, value_enum, default_value_t = SweepGeometry::Sphere)]
    geometry: SweepGeometry,
    #[arg(long, default_value_t = 0.01)]
    eta_min: f64,
    #[arg(long, default_value_t = 10.0)]
    eta_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 50)]
    points: usize,
    /// Logarithmic spacing.
    #[arg(long)]
    log: bool,
    #[command(flatten)]
    quad: QuadArgs,
    #[command(flatten)]
    sum: SumArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Comma-separated conductivities to check.
    #[arg(long, value_delimiter = ',')]
    eta_grid: Option<Vec<f64>>,
    /// Corrupt one closed form by a relative amount, e.g. `M2=1e-6`.
    #[arg(long, hide = true)]
    perturb: Option<Perturbation>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerics(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => Failure::Usage(e.to_string()),
            Error::NotConverged { .. } | Error::NoSignChange { .. } => {
                Failure::Numerics(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = Result<ExitCode, Failure>;

#[derive(Serialize)]
struct PlanarReport {
    eta: Eta,
    q_te: QValue,
    q_tm: QValue,
    q_total: QValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<EnergyValue>,
}

fn energy_cells(t: &mut Table, row: &mut Vec<String>, energy: &Option<EnergyValue>) {
    if let Some(e) = energy {
        t.header.extend(["unit", "energy", "energy_abs_error"]);
        row.extend([e.unit.to_string(), num(e.energy), num(e.abs_error)]);
    }
}

fn cmd_planar(a: PlanarArgs) -> CmdResult {
    let tol = a.quad.config()?;
    let q_te = q_te_planar(a.eta, &tol)?;
    let q_tm = q_tm_planar(a.eta, &tol)?;
    let q_total = q_te.add(q_tm);
    let energy =
        a.d.map(|d| EnergyValue::new(q_total, Geometry::Separation(d), a.unit));
    let report = PlanarReport {
        eta: a.eta,
        q_te,
        q_tm,
        q_total,
        energy,
    };
    let rendered = render(&report, a.output.csv, || {
        let mut t = Table::new(sweep::PLANAR_COLUMNS.to_vec());
        let mut row = vec![
            num(a.eta.value()),
            num(q_te.value),
            num(q_tm.value),
            num(q_total.value),
            num(q_total.abs_error),
        ];
        energy_cells(&mut t, &mut row, &report.energy);
        t.push(row);
        t
    })?;
    emit(a.output.out.as_deref(), rendered)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SphereReport {
    #[serde(flatten)]
    breakdown: SphereQBreakdown,
    q_te: f64,
    q_tm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<EnergyValue>,
}

fn cmd_sphere(a: SphereArgs) -> CmdResult {
    let mut cfg = a.sum.config()?;
    if let Some(t) = a.tol {
        cfg = cfg.with_target_tol(t);
        cfg.validate()?;
    }
    let b = q_sphere_total(a.eta, &cfg)?;
    let energy = a.radius.map(|r| {
        let q = QValue {
            value: b.total,
            abs_error: b.abs_error,
            parts: Some(Parts {
                asymptotic: b.te_as + b.tm_as,
                numeric: b.te_num + b.tm_num,
            }),
            diagnostics: Diagnostics {
                l_max_used: Some(b.l_max_used),
                evals: b.evals,
            },
        };
        EnergyValue::new(q, Geometry::Radius(r), a.unit)
    });
    let report = SphereReport {
        breakdown: b,
        q_te: b.te(),
        q_tm: b.tm(),
        energy,
    };
    let rendered = render(&report, a.output.csv, || {
        let row = SweepRow {
            eta: b.eta.value(),
            q_te: b.te(),
            q_tm: b.tm(),
            q_total: b.total,
            q_te_as: Some(b.te_as),
            q_te_num: Some(b.te_num),
            q_tm_as: Some(b.tm_as),
            q_tm_num: Some(b.tm_num),
            abs_error: b.abs_error,
        };
        let mut t = Table::new(sweep::SPHERE_COLUMNS.to_vec());
        let mut cells = row.cells();
        energy_cells(&mut t, &mut cells, &report.energy);
        t.push(cells);
        t
    })?;
    emit(a.output.out.as_deref(), rendered)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_critical(a: CriticalArgs) -> CmdResult {
    let cfg = a.sum.config()?;
    let c = critical_eta(&cfg, a.tol)?;
    let rendered = render(&c, a.output.csv, || {
        let mut t = Table::new(vec![
            "eta",
            "q_at_root",
            "abs_error",
            "bracket_lo",
            "bracket_hi",
            "q_at_lo",
            "q_at_hi",
            "evaluations",
        ]);
        t.push(vec![
            num(c.eta),
            num(c.q_at_root),
            num(c.abs_error),
            num(c.bracket.0),
            num(c.bracket.1),
            num(c.q_at_bracket.0),
            num(c.q_at_bracket.1),
            c.evaluations.to_string(),
        ]);
        t
    })?;
    emit(a.output.out.as_deref(), rendered)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SweepReport<'a> {
    spec: &'a SweepSpec,
    rows: &'a [SweepRow],
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    let spec = SweepSpec {
        geometry: a.geometry,
        eta_min: a.eta_min,
        eta_max: a.eta_max,
        points: a.points,
        spacing: if a.log { Spacing::Log } else { Spacing::Linear },
    };
    spec.validate().map_err(Failure::Usage)?;
    let tol = a.quad.config()?;
    let cfg = a.sum.config()?;
    let rows = sweep::run(&spec, &tol, &cfg)?;
    let report = SweepReport {
        spec: &spec,
        rows: &rows,
    };
    let rendered = render(&report, a.output.csv, || sweep::table(spec.geometry, &rows))?;
    emit(a.output.out.as_deref(), rendered)?;
    Ok(ExitCode::SUCCESS)
}

fn verify_table(r: &VerifyReport) -> Table {
    let mut t = Table::new(vec!["check", "max_rel_discrepancy", "worst_eta", "pass"]);
    for s in &r.summary {
        t.push(vec![
            s.name.to_string(),
            num(s.max_rel_discrepancy),
            num(s.worst_eta),
            s.pass.to_string(),
        ]);
    }
    for (label, pick) in [
        (
            "assembly_te",
            (|c: &appendix::AssemblyCheck| c.te_rel) as fn(&appendix::AssemblyCheck) -> f64,
        ),
        ("assembly_tm", |c| c.tm_rel),
    ] {
        let worst = r.assembly.iter().fold((0.0, f64::NAN), |acc, c| {
            if pick(c) > acc.0 || acc.1.is_nan() {
                (pick(c), c.eta)
            } else {
                acc
            }
        });
        t.push(vec![
            label.to_string(),
            num(worst.0),
            num(worst.1),
            (worst.0 <= appendix::ASSEMBLY_REL_TOL).to_string(),
        ]);
    }
    t
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let grid = a.eta_grid.unwrap_or_else(|| DEFAULT_ETA_GRID.to_vec());
    let report = appendix::verify(&grid, a.perturb)?;
    let rendered = render(&report, a.output.csv, || verify_table(&report))?;
    emit(a.output.out.as_deref(), rendered)?;
    for s in report.summary.iter().filter(|s| !s.pass) {
        eprintln!(
            "verify: {} disagrees with quadrature (max relative discrepancy {:e} at eta = {})",
            s.name, s.max_rel_discrepancy, s.worst_eta
        );
    }
    for c in report.assembly.iter().filter(|c| !c.pass) {
        eprintln!(
            "verify: assembly identity off at eta = {} (TE {:e}, TM {:e})",
            c.eta, c.te_rel, c.tm_rel
        );
    }
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    })
}

#[derive(Serialize)]
struct NamedConstant {
    name: &'static str,
    value: f64,
    expression: &'static str,
    /// `exact`, `computed`, `published` or `codata`.
    source: &'static str,
}

fn constants_list() -> Vec<NamedConstant> {
    let slope = planar_small_eta_tm_slope();
    let c = |name, value, expression, source| NamedConstant {
        name,
        value,
        expression,
        source,
    };
    vec![
        c(
            "q_planar_perfect",
            constants::Q_PLANAR_PERFECT,
            "-pi^2/720",
            "exact",
        ),
        c(
            "q_planar_perfect_polarization",
            constants::Q_PLANAR_PERFECT_POLARIZATION,
            "-pi^2/1440",
            "exact",
        ),
        c(
            "q_te_sphere_as_perfect",
            constants::Q_TE_SPHERE_AS_PERFECT,
            "17/128",
            "exact",
        ),
        c(
            "q_tm_sphere_as_perfect",
            constants::Q_TM_SPHERE_AS_PERFECT,
            "-11/128",
            "exact",
        ),
        c(
            "planar_small_eta_bracket",
            slope.bracket,
            "-pi^2/6 - pi^4/360 + 4 ln 2 - zeta(3)/2",
            "exact",
        ),
        c(
            "planar_small_eta_tm_slope",
            slope.slope,
            "-bracket/(4 pi^2)",
            "exact",
        ),
        c("graphene_z", slope.z, "4 bracket", "exact"),
        c(
            "graphene_z_published",
            published::GRAPHENE_Z,
            "Z",
            "published",
        ),
        c(
            "eta_graphene",
            constants::ETA_GRAPHENE,
            "pi alpha/2",
            "exact",
        ),
        c(
            "q_te_sphere_num_perfect",
            published::Q_TE_SPHERE_NUM_PERFECT,
            "",
            "published",
        ),
        c(
            "q_tm_sphere_num_perfect",
            published::Q_TM_SPHERE_NUM_PERFECT,
            "",
            "published",
        ),
        c(
            "q_te_sphere_perfect",
            published::Q_TE_SPHERE_PERFECT,
            "",
            "published",
        ),
        c(
            "q_tm_sphere_perfect",
            published::Q_TM_SPHERE_PERFECT,
            "",
            "published",
        ),
        c(
            "q_sphere_perfect",
            published::Q_SPHERE_PERFECT,
            "",
            "published",
        ),
        c(
            "q_sphere_small_eta_slope",
            published::Q_SPHERE_SMALL_ETA_SLOPE,
            "",
            "published",
        ),
        c(
            "q_sphere_graphene",
            published::Q_SPHERE_GRAPHENE,
            "",
            "published",
        ),
        c("eta_critical", published::ETA_CRITICAL, "", "published"),
        c("zeta_3", constants::ZETA_3, "zeta(3)", "exact"),
        c(
            "zeta_h_minus2_3half",
            constants::ZETA_H_MINUS2_3HALF,
            "zeta_H(-2, 3/2)",
            "exact",
        ),
        c(
            "zeta_h_0_3half",
            constants::ZETA_H_0_3HALF,
            "zeta_H(0, 3/2)",
            "exact",
        ),
        c("pi", PI, "pi", "exact"),
        c("alpha", constants::ALPHA, "e^2/(hbar c)", "codata"),
        c(
            "hbar_c_ev_nm",
            constants::HBAR_C_EV_NM,
            "hbar c [eV nm]",
            "codata",
        ),
    ]
}

fn cmd_constants(a: OutputArgs) -> CmdResult {
    let list = constants_list();
    let rendered = render(&list, a.csv, || {
        let mut t = Table::new(vec!["name", "value", "expression", "source"]);
        for c in &list {
            t.push(vec![
                c.name.to_string(),
                num(c.value),
                c.expression.to_string(),
                c.source.to_string(),
            ]);
        }
        t
    })?;
    emit(a.out.as_deref(), rendered)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Planar(a) => cmd_planar(a),
        Command::Sphere(a) => cmd_sphere(a),
        Command::Critical(a) => cmd_critical(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Constants(a) => cmd_constants(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerics(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERICS)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
