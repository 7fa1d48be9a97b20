//! Command-line front end: argument parsing, the resolved run configuration
//! echoed into every output, and the seven commands.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use quarter_green_core::asymptotics::{constant_c, constant_c_unchecked, green_asymptotic, green_asymptotic_two_term};
use quarter_green_core::curve::ExtendedReal;
use quarter_green_core::green::{green_value, GreenEstimate, RayContour};
use quarter_green_core::martin::{martin_limit_diagnostic_with, Direction, MartinConfig};
use quarter_green_core::uniformization::{uniformize, UniformizationData};
use quarter_green_core::walk::{
    harmonicity_residual, kernel_from_cubic_family, validate_kernel, CubicFamilyParams, LatticePoint, Rect,
};
use quarter_green_core::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{AppError, AppResult};
use crate::oracle::{absorption_from_grid, TruncationConfig};
use crate::output::{normalize_numbers, Cell, Format, Report, Table};
use crate::simulate::{simulate, SimulationConfig};
use crate::spec::{ResolvedWalk, WalkSpec};
use crate::store::green_truncated_cached;

/// A lattice point written `i,j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Point(pub LatticePoint);

impl FromStr for Point {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected i,j, got {s:?}"))?;
        let p = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
        Ok(Point(LatticePoint::new(p(a)?, p(b)?)))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0.i, self.0.j)
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An escape direction: `j=J`, `i=I`, `slope=S` or a bare slope `j/i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionArg(pub Direction);

impl FromStr for DirectionArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let err = |e: &dyn fmt::Display| format!("bad direction {s:?}: {e}");
        let d = match s.split_once('=') {
            Some(("j", v)) => Direction::FixedJ(v.parse().map_err(|e| err(&e))?),
            Some(("i", v)) => Direction::FixedI(v.parse().map_err(|e| err(&e))?),
            Some(("slope", v)) => Direction::Slope(v.parse().map_err(|e| err(&e))?),
            Some((k, _)) => return Err(err(&format!("unknown key {k:?}"))),
            None => Direction::Slope(s.parse().map_err(|e| err(&e))?),
        };
        if let Direction::Slope(v) = d {
            if !(v.is_finite() && v > 0.0) {
                return Err(err(&"slope must be positive"));
            }
        }
        Ok(DirectionArg(d))
    }
}

impl Serialize for DirectionArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

/// `lo:hi:count`, `count` evenly spaced values including both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RangeArg {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl RangeArg {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        (0..self.count)
            .map(|n| self.lo + (self.hi - self.lo) * n as f64 / (self.count - 1) as f64)
            .collect()
    }
}

impl FromStr for RangeArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || format!("expected lo:hi:count, got {s:?}");
        let [lo, hi, count] = parts.as_slice() else { return Err(bad()) };
        let r = RangeArg {
            lo: lo.parse().map_err(|_| bad())?,
            hi: hi.parse().map_err(|_| bad())?,
            count: count.parse().map_err(|_| bad())?,
        };
        if r.count == 0 || !(r.lo <= r.hi) {
            return Err(bad());
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "quarter-green", version, about = "Green functions of zero-drift walks killed at the boundary of the quarter plane")]
pub struct Cli {
    /// Walk specification (JSON).
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Command {
    /// Check the kernel and the harmonicity of its cubic.
    Validate {
        /// Harmonicity is checked on [1, region]².
        #[arg(long, default_value_t = 20)]
        region: u32,
    },
    /// Branch points, uniformization constants and the branch ledger.
    Uniformize,
    /// Contour values of the Green function.
    Green {
        #[arg(long, default_value = "1,1")]
        start: Point,
        /// Target point `i,j`; repeatable.
        #[arg(long = "target")]
        targets: Vec<Point>,
        /// Adds every interior target with `i + j ≤ MAX_SUM`.
        #[arg(long)]
        max_sum: Option<u32>,
        /// Ray angle; the steepest-descent angle when absent.
        #[arg(long)]
        theta: Option<f64>,
        /// Adds lattice-solve values on `[1, N]²` and their ratio.
        #[arg(long)]
        compare_oracle: Option<usize>,
    },
    /// Lattice solve on a truncated box.
    Oracle {
        #[arg(long, default_value = "1,1")]
        start: Point,
        #[arg(long, default_value_t = 600)]
        n: usize,
        /// Also solve at 2N and report the difference as the error.
        #[arg(long)]
        extrapolate: bool,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Only grid points with `i, j ≤ WINDOW` are written (default: all).
        #[arg(long)]
        window: Option<usize>,
        /// Monte Carlo paths for a cross-check on `i, j ≤ 10` (0 disables).
        #[arg(long, default_value_t = 0)]
        mc_paths: u64,
    },
    /// Contour values against the asymptotic formula.
    Asymptotic {
        #[arg(long, default_value = "1,1")]
        start: Point,
        #[arg(long = "direction", default_values = ["j=2", "slope=0.5", "slope=1", "slope=2", "i=2"])]
        directions: Vec<DirectionArg>,
        #[arg(long = "radius", default_values_t = [25u32, 50, 100])]
        radii: Vec<u32>,
    },
    /// Martin kernel table against the limit `h(start)/h(reference)`.
    Martin {
        #[arg(long, default_value = "2,3")]
        start: Point,
        #[arg(long, default_value = "1,1")]
        reference: Point,
        #[arg(long = "direction", default_values = ["slope=0.125", "slope=1", "slope=8"])]
        directions: Vec<DirectionArg>,
        #[arg(long = "radius", default_values_t = [25u32, 50, 100])]
        radii: Vec<u32>,
    },
    /// Scan of the family over `(α, β, p₁₁, p₁₀)`.
    Sweep {
        #[arg(long, default_value = "0.5:2:4")]
        alpha: RangeArg,
        #[arg(long, default_value = "-0.5:0.5:3")]
        beta: RangeArg,
        /// `(p₁₁, p₁₀)` on the `GRID × GRID` lattice of `[0, 1]²`.
        #[arg(long, default_value_t = 5)]
        grid: usize,
    },
}

impl Command {
    fn needs_spec(&self) -> bool {
        !matches!(self, Command::Sweep { .. })
    }
}

/// Everything that determines a run's output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub spec_path: Option<PathBuf>,
    pub spec: Option<WalkSpec>,
    pub format: Format,
    pub threads: Option<usize>,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> AppResult<Self> {
        let spec = match (&cli.spec, cli.command.needs_spec()) {
            (Some(p), _) => Some(WalkSpec::load(p)?),
            (None, true) => return Err(AppError::Usage("--spec is required for this command".into())),
            (None, false) => None,
        };
        Ok(Self {
            command: cli.command.clone(),
            spec_path: cli.spec.clone(),
            spec,
            format: cli.format,
            threads: cli.threads,
            seed: cli.seed,
        })
    }

    pub fn echo(&self) -> Value {
        normalize_numbers(serde_json::to_value(self).unwrap_or(Value::Null))
    }

    fn walk(&self) -> AppResult<ResolvedWalk> {
        self.spec
            .as_ref()
            .ok_or_else(|| AppError::Usage("--spec is required for this command".into()))?
            .resolve()
    }
}

/// Resolves a spec into a checked kernel.
fn valid_walk(cfg: &RunConfig) -> AppResult<ResolvedWalk> {
    let w = cfg.walk()?;
    let report = validate_kernel(&w.kernel);
    if !report.is_valid() {
        let list: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(AppError::Validation(list.join("; ")));
    }
    Ok(w)
}

fn family_walk(cfg: &RunConfig) -> AppResult<(ResolvedWalk, UniformizationData, f64, f64)> {
    let w = valid_walk(cfg)?;
    let (alpha, beta) = w.require_cubic()?;
    let u = uniformize(&w.kernel)?.with_alpha(alpha);
    Ok((w, u, alpha, beta))
}

fn estimate_cells(g: &GreenEstimate) -> Vec<Cell> {
    vec![
        g.value.into(),
        g.abs_error.into(),
        g.method.name().into(),
        g.meta.theta.into(),
        g.meta.evaluations.into(),
        g.meta.imag.into(),
        g.meta.correction.into(),
    ]
}

fn cmd_validate(cfg: &RunConfig, region: u32) -> AppResult<Vec<Table>> {
    let w = cfg.walk()?;
    let report = validate_kernel(&w.kernel);
    if !report.is_valid() {
        let list: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(AppError::Validation(list.join("; ")));
    }
    let mut warnings = Table::new("warnings", &["kind", "di", "dj"]);
    for (di, dj) in &report.zero_entries {
        warnings.push(vec!["zero_entry".into(), (*di as i64).into(), (*dj as i64).into()]);
    }
    let (dx, dy) = w.kernel.drift();
    let mut summary = Table::new("summary", &["quantity", "value"]);
    summary.push(vec!["valid".into(), true.into()]);
    summary.push(vec!["total_mass".into(), w.kernel.total_mass().into()]);
    summary.push(vec!["drift_x".into(), dx.into()]);
    summary.push(vec!["drift_y".into(), dy.into()]);
    summary.push(vec!["cubic_family".into(), w.cubic.is_some().into()]);
    if let Some((alpha, beta)) = w.cubic {
        summary.push(vec!["alpha".into(), alpha.into()]);
        summary.push(vec!["beta".into(), beta.into()]);
        let r = harmonicity_residual(&w.kernel, alpha, beta, Rect::square(1, region.max(1)));
        summary.push(vec!["harmonicity_residual".into(), r.into()]);
    }
    let mut kernel = Table::new("kernel", &["di", "dj", "p"]);
    for (di, dj, p) in w.kernel.steps() {
        kernel.push(vec![(di as i64).into(), (dj as i64).into(), p.into()]);
    }
    Ok(vec![summary, kernel, warnings])
}

fn extended(v: ExtendedReal) -> Cell {
    v.finite().unwrap_or(f64::INFINITY).into()
}

fn cmd_uniformize(cfg: &RunConfig) -> AppResult<Vec<Table>> {
    let w = valid_walk(cfg)?;
    let mut u = uniformize(&w.kernel)?;
    if let Some((alpha, _)) = w.cubic {
        u = u.with_alpha(alpha);
    }
    let mut branch = Table::new("branch_points", &["name", "value"]);
    branch.push(vec!["x1".into(), u.branch.x1().into()]);
    branch.push(vec!["x4".into(), extended(u.branch.x4())]);
    branch.push(vec!["y1".into(), u.branch.y1().into()]);
    branch.push(vec!["y4".into(), extended(u.branch.y4())]);
    let mut constants = Table::new("constants", &["name", "re", "im", "abs", "arg"]);
    let named: [(&str, Complex64); 5] = [("z0", u.z0), ("z1", u.z1), ("z2", u.z2), ("z3", u.z3), ("K", u.k)];
    for (name, z) in named {
        constants.push(vec![name.into(), z.re.into(), z.im.into(), z.norm().into(), z.arg().into()]);
    }
    let mut scalars = Table::new("scalars", &["name", "value"]);
    scalars.push(vec!["omega_x".into(), u.omega_x.into()]);
    scalars.push(vec!["omega_y".into(), u.omega_y.into()]);
    scalars.push(vec!["alpha".into(), u.alpha().into()]);
    let mut ledger = Table::new("ledger", &["z0", "z1", "z2", "z3", "k_lower", "k_re", "k_im", "residual", "accepted", "selected"]);
    for e in &u.ledger {
        let a = e.assignment;
        ledger.push(vec![
            a.z0.into(),
            a.z1.into(),
            a.z2.into(),
            a.z3.into(),
            a.k_lower.into(),
            e.k.re.into(),
            e.k.im.into(),
            e.residual.into(),
            e.accepted.into(),
            (a == u.assignment).into(),
        ]);
    }
    let mut group = Table::new("group", &["element", "length", "a_re", "a_im", "b_re", "b_im", "c_re", "c_im", "d_re", "d_im"]);
    for g in u.group() {
        let m = g.moebius;
        let mut row: Vec<Cell> = vec![g.label.name().into(), (g.length as u32).into()];
        for c in [m.a, m.b, m.c, m.d] {
            row.push(c.re.into());
            row.push(c.im.into());
        }
        group.push(row);
    }
    Ok(vec![branch, constants, scalars, group, ledger])
}

fn green_targets(targets: &[Point], max_sum: Option<u32>) -> AppResult<Vec<LatticePoint>> {
    let mut out: Vec<LatticePoint> = targets.iter().map(|p| p.0).collect();
    if let Some(s) = max_sum {
        for i in 1..s {
            for j in 1..=s - i {
                out.push(LatticePoint::new(i, j));
            }
        }
    }
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(AppError::Usage("give --target or --max-sum".into()));
    }
    for p in &out {
        p.require_interior()?;
    }
    Ok(out)
}

fn cmd_green(
    cfg: &RunConfig,
    start: LatticePoint,
    targets: &[Point],
    max_sum: Option<u32>,
    theta: Option<f64>,
    compare: Option<usize>,
) -> AppResult<Vec<Table>> {
    let (w, u, _, _) = family_walk(cfg)?;
    start.require_interior()?;
    let targets = green_targets(targets, max_sum)?;
    let contour = theta.map(RayContour::new);
    let values: Vec<GreenEstimate> = targets
        .par_iter()
        .map(|p| green_value(&u, start.i, start.j, p.i, p.j, contour.as_ref()))
        .collect::<Result<_, _>>()?;
    let oracle = match compare {
        Some(n) => Some(green_truncated_cached(&w.kernel, start, &TruncationConfig::new(n))?),
        None => None,
    };
    let mut cols = vec!["i0", "j0", "i", "j", "value", "abs_error", "method", "theta", "evaluations", "imag", "correction"];
    if oracle.is_some() {
        cols.extend(["oracle", "ratio"]);
    }
    let mut t = Table::new("green", &cols);
    for (p, g) in targets.iter().zip(&values) {
        let mut row: Vec<Cell> = vec![start.i.into(), start.j.into(), p.i.into(), p.j.into()];
        row.extend(estimate_cells(g));
        if let Some(o) = &oracle {
            let v = o.get(p.i as usize, p.j as usize);
            row.push(v.into());
            row.push((g.value / v).into());
        }
        t.push(row);
    }
    Ok(vec![t])
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    cfg: &RunConfig,
    start: LatticePoint,
    n: usize,
    extrapolate: bool,
    tol: f64,
    window: Option<usize>,
    mc_paths: u64,
) -> AppResult<Vec<Table>> {
    let w = valid_walk(cfg)?;
    let tc = TruncationConfig {
        n,
        solver_tol: tol,
        extrapolate,
        ..TruncationConfig::default()
    };
    let g = green_truncated_cached(&w.kernel, start, &tc)?;
    let a = absorption_from_grid(&w.kernel, &g);
    let win = window.unwrap_or(n).min(n);
    let mut grid = Table::new("grid", &["i", "j", "value", "abs_error"]);
    for i in 1..=win {
        for j in 1..=win {
            let err = g.abs_error.as_ref().map(|_| g.error(i, j));
            grid.push(vec![i.into(), j.into(), g.get(i, j).into(), err.into()]);
        }
    }
    let mut absorption = Table::new("absorption", &["side", "index", "value"]);
    for (m, v) in a.horizontal.iter().enumerate().take(win + 1) {
        absorption.push(vec!["horizontal".into(), (m + 1).into(), (*v).into()]);
    }
    for (m, v) in a.vertical.iter().enumerate().take(win + 1) {
        absorption.push(vec!["vertical".into(), (m + 1).into(), (*v).into()]);
    }
    absorption.push(vec!["corner".into(), 0usize.into(), a.corner.into()]);
    let mut summary = Table::new("summary", &["quantity", "value"]);
    summary.push(vec!["solved_n".into(), g.solved_n.into()]);
    summary.push(vec!["cycles".into(), g.residual_history.len().into()]);
    summary.push(vec!["final_residual".into(), g.residual_history.last().copied().into()]);
    summary.push(vec!["absorbed_mass".into(), a.total_mass().into()]);
    let mut tables = vec![summary, grid, absorption];
    if mc_paths > 0 {
        let m = win.min(10) as u32;
        let targets: Vec<LatticePoint> = (1..=m).flat_map(|i| (1..=m).map(move |j| LatticePoint::new(i, j))).collect();
        let sc = SimulationConfig {
            paths: mc_paths,
            seed: cfg.seed,
            ..SimulationConfig::default()
        };
        let r = simulate(&w.kernel, start, &targets, &sc)?;
        let mut mc = Table::new("monte_carlo", &["i", "j", "mean", "std_error", "oracle", "z_score"]);
        for (p, e) in &r.targets {
            let o = g.get(p.i as usize, p.j as usize);
            let z = if e.se > 0.0 { Some((e.mean - o) / e.se) } else { None };
            mc.push(vec![p.i.into(), p.j.into(), e.mean.into(), e.se.into(), o.into(), z.into()]);
        }
        tables[0].push(vec!["mc_truncated_paths".into(), (r.truncated_paths as usize).into()]);
        tables.push(mc);
    }
    Ok(tables)
}

fn cmd_asymptotic(cfg: &RunConfig, start: LatticePoint, directions: &[DirectionArg], radii: &[u32]) -> AppResult<Vec<Table>> {
    let (_, u, alpha, beta) = family_walk(cfg)?;
    start.require_interior()?;
    let model = constant_c(&u, alpha, beta)?;
    let cells: Vec<(DirectionArg, u32)> = directions.iter().flat_map(|d| radii.iter().map(move |r| (*d, *r))).collect();
    let rows: Vec<Vec<Cell>> = cells
        .par_iter()
        .map(|(d, r)| -> AppResult<Vec<Cell>> {
            let (i, j) = d.0.point(*r);
            let g = green_value(&u, start.i, start.j, i, j, None)?;
            let a = green_asymptotic(&model, start.i, start.j, i, j);
            let a2 = green_asymptotic_two_term(&u, &model, start.i, start.j, i, j);
            Ok(vec![
                d.0.to_string().into(),
                (*r).into(),
                i.into(),
                j.into(),
                g.value.into(),
                g.abs_error.into(),
                a.into(),
                a2.into(),
                (g.value / a).into(),
            ])
        })
        .collect::<AppResult<_>>()?;
    let mut t = Table::new(
        "asymptotic",
        &["direction", "radius", "i", "j", "exact", "abs_error", "asymptotic", "two_term", "ratio"],
    );
    rows.into_iter().for_each(|r| t.push(r));
    let mut s = Table::new("constant", &["quantity", "value"]);
    s.push(vec!["C".into(), model.c.into()]);
    s.push(vec!["assembled".into(), model.pieces.assembled.into()]);
    s.push(vec!["sign_flipped".into(), model.sign_flipped.into()]);
    s.push(vec!["empirical".into(), model.empirical.into()]);
    Ok(vec![s, t])
}

fn cmd_martin(
    cfg: &RunConfig,
    start: LatticePoint,
    reference: LatticePoint,
    directions: &[DirectionArg],
    radii: &[u32],
) -> AppResult<Vec<Table>> {
    let (_, u, alpha, beta) = family_walk(cfg)?;
    let mc = MartinConfig {
        reference,
        directions: directions.iter().map(|d| d.0).collect(),
        radii: radii.to_vec(),
    };
    // Evaluate every needed value in parallel, then replay them in order.
    let mut needed: Vec<(u32, u32, u32, u32)> = Vec::new();
    for &r in radii {
        for d in directions {
            let (i, j) = d.0.point(r);
            needed.push((start.i, start.j, i, j));
            needed.push((reference.i, reference.j, i, j));
        }
    }
    start.require_interior()?;
    reference.require_interior()?;
    let values: Vec<GreenEstimate> = needed
        .par_iter()
        .map(|&(a, b, i, j)| green_value(&u, a, b, i, j, None))
        .collect::<Result<_, _>>()?;
    let lookup = |a, b, i, j| {
        let n = needed.iter().position(|q| *q == (a, b, i, j)).expect("value was precomputed");
        Ok(values[n])
    };
    let d = martin_limit_diagnostic_with(lookup, alpha, beta, start, &mc)?;
    let mut t = Table::new(
        "martin",
        &["direction", "radius", "i", "j", "kernel", "abs_error", "prediction", "deviation"],
    );
    for r in &d.table {
        t.push(vec![
            r.direction.clone().into(),
            r.radius.into(),
            r.i.into(),
            r.j.into(),
            r.kernel.into(),
            r.abs_error.into(),
            d.limit_prediction.into(),
            r.deviation.into(),
        ]);
    }
    let mut s = Table::new("deviation", &["radius", "max_deviation", "spread"]);
    for (r, dev) in &d.max_deviation {
        s.push(vec![(*r).into(), (*dev).into(), d.spread(*r).into()]);
    }
    Ok(vec![t, s])
}

fn cmd_sweep(alpha: &RangeArg, beta: &RangeArg, grid: usize) -> AppResult<Vec<Table>> {
    if grid < 2 {
        return Err(AppError::Usage("--grid must be at least 2".into()));
    }
    let step = 1.0 / (grid - 1) as f64;
    let mut points = Vec::new();
    for a in alpha.values() {
        for b in beta.values() {
            for m in 0..grid {
                for n in 0..grid {
                    points.push(CubicFamilyParams::new(a, b, m as f64 * step, n as f64 * step));
                }
            }
        }
    }
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|c| {
            let mut row: Vec<Cell> = vec![c.alpha.into(), c.beta.into(), c.p11.into(), c.p10.into()];
            let solved = kernel_from_cubic_family(c)
                .ok()
                .and_then(|k| uniformize(&k).ok())
                .map(|u| (constant_c_unchecked(&u, c.alpha, c.beta), u));
            match solved {
                Some((m, u)) => row.extend([
                    true.into(),
                    m.c.into(),
                    m.pieces.assembled.into(),
                    u.omega_x.into(),
                    u.k.re.into(),
                    u.k.im.into(),
                ]),
                None => {
                    row.push(false.into());
                    row.extend(std::iter::repeat_n(Cell::Empty, 5));
                }
            }
            row
        })
        .collect();
    let mut t = Table::new(
        "sweep",
        &["alpha", "beta", "p11", "p10", "feasible", "C", "assembled", "omega_x", "k_re", "k_im"],
    );
    rows.into_iter().for_each(|r| t.push(r));
    Ok(vec![t])
}

/// Runs one command, producing its report.
pub fn run(cfg: &RunConfig) -> AppResult<Report> {
    let tables = match &cfg.command {
        Command::Validate { region } => cmd_validate(cfg, *region)?,
        Command::Uniformize => cmd_uniformize(cfg)?,
        Command::Green {
            start,
            targets,
            max_sum,
            theta,
            compare_oracle,
        } => cmd_green(cfg, start.0, targets, *max_sum, *theta, *compare_oracle)?,
        Command::Oracle {
            start,
            n,
            extrapolate,
            tol,
            window,
            mc_paths,
        } => cmd_oracle(cfg, start.0, *n, *extrapolate, *tol, *window, *mc_paths)?,
        Command::Asymptotic { start, directions, radii } => cmd_asymptotic(cfg, start.0, directions, radii)?,
        Command::Martin {
            start,
            reference,
            directions,
            radii,
        } => cmd_martin(cfg, start.0, reference.0, directions, radii)?,
        Command::Sweep { alpha, beta, grid } => cmd_sweep(alpha, beta, *grid)?,
    };
    Ok(Report {
        config: cfg.echo(),
        tables,
    })
}

/// Parses, runs and renders; errors come back as the JSON error document.
/// Returns the exit code and the text for standard output.
pub fn execute(cli: &Cli) -> (i32, String) {
    let result = (|| -> AppResult<String> {
        let cfg = RunConfig::from_cli(cli)?;
        let job = || run(&cfg).map(|r| r.render(cfg.format));
        let text = match cfg.threads {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| AppError::Usage(e.to_string()))?
                .install(job)?,
            None => job()?,
        };
        match &cli.out {
            Some(path) => {
                std::fs::write(path, &text).map_err(|e| AppError::io(path, e))?;
                Ok(String::new())
            }
            None => Ok(text),
        }
    })();
    match result {
        Ok(text) => (0, text),
        Err(e) => (1, format!("{}\n", e.to_json())),
    }
}

/// Error document for argument-parsing failures.
pub fn usage_error(message: &str) -> String {
    format!("{}\n", json!({ "error": { "kind": "usage", "message": message.trim_end() } }))
}
