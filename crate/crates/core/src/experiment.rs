//! Experiment driver: JSON configuration, orchestration (limit solve, tau/R,
//! lambda-continuation with diagnostics), CSV and raw field dumps, the
//! trend report over the schedule, and the invariant check suite.

use crate::coulomb::{energy_identity_defect, CoulombSolver};
use crate::error::{Error, Result};
use crate::functionals::{self, Context, FunctionalKind};
use crate::grid::{self, build_grid, ScalarField};
use crate::model::{cutoff_constants, ModelParams};
use crate::nehari::{self, MinimizeOptions, MinimizeResult, NehariCoefficients};
use crate::solver::{
    self, initial_guess, ContinuationSchedule, LevelData, SolveOptions, SolveResult,
};
use crate::wells::{self, Ball, UpsilonSelection};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
    pub half_width: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelConfig {
    pub q: f64,
    pub delta_coercivity: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Relative residual target of the penalized solves.
    pub tol: f64,
    pub max_iterations: usize,
    /// Residual target of the limit / Neumann minimizations.
    pub limit_tol: f64,
    pub limit_max_iterations: usize,
    /// Perturbed-restart rounds after each minimization.
    pub restarts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-6,
            max_iterations: 30_000,
            limit_tol: 1e-8,
            limit_max_iterations: 20_000,
            restarts: 2,
        }
    }
}

/// One JSON document describing a full experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub wells: Vec<Ball>,
    pub enlargement: f64,
    #[serde(default = "default_a_max")]
    pub a_max: f64,
    pub ramp_width: f64,
    pub model: ModelConfig,
    pub upsilon: Vec<usize>,
    pub lambda_schedule: Vec<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_mu_factor")]
    pub mu_factor: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_perturb")]
    pub perturb_amplitude: f64,
    /// Populate the c_(lambda,Upsilon) column (one Neumann solve per row).
    #[serde(default = "default_true")]
    pub neumann_levels: bool,
    #[serde(default = "default_scan_resolution")]
    pub path_scan_resolution: usize,
    #[serde(default = "default_true")]
    pub dump_fields: bool,
}

fn default_a_max() -> f64 {
    1.0
}
fn default_mu_factor() -> f64 {
    0.1
}
fn default_perturb() -> f64 {
    0.05
}
fn default_true() -> bool {
    true
}
fn default_scan_resolution() -> usize {
    33
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }
}

/// Fully validated experiment: context plus schedule.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub ctx: Context,
    pub schedule: ContinuationSchedule,
}

impl Experiment {
    /// Validate a config and construct the runtime objects. Every failure
    /// here is a configuration error (CLI exit code 2).
    pub fn prepare(config: ExperimentConfig) -> Result<Self> {
        let grid = build_grid(config.grid.n, config.grid.half_width)?;
        let geometry = wells::build_geometry(
            config.wells.clone(),
            config.enlargement,
            config.a_max,
            config.ramp_width,
        )?;
        let upsilon = UpsilonSelection::new(config.upsilon.clone(), geometry.k())?;
        let params = ModelParams::new(config.model.q, config.model.delta_coercivity)?;
        let ctx = Context::new(grid, geometry, upsilon, params)?;
        let schedule = ContinuationSchedule::new(config.lambda_schedule.clone(), true)?;
        if !(config.mu_factor > 0.0) {
            return Err(Error::Config(format!(
                "mu_factor must be positive, got {}",
                config.mu_factor
            )));
        }
        Ok(Experiment {
            config,
            ctx,
            schedule,
        })
    }

    fn minimize_opts(&self) -> MinimizeOptions {
        MinimizeOptions {
            tol: self.config.solver.limit_tol,
            max_iterations: self.config.solver.limit_max_iterations,
            restarts: self.config.solver.restarts,
        }
    }

    fn solve_opts(&self) -> SolveOptions {
        SolveOptions {
            tol: self.config.solver.tol,
            max_iterations: self.config.solver.max_iterations,
        }
    }

    /// Limit problem only: w_Upsilon and c_Upsilon.
    pub fn solve_limit(&self) -> Result<MinimizeResult> {
        let init = initial_guess(&self.ctx, self.config.seed, self.config.perturb_amplitude);
        nehari::minimize_limit(&self.ctx, &init, self.minimize_opts())
    }
}

/// One row per scheduled lambda; the CSV schema in column order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub lambda: f64,
    pub energy: f64,
    pub residual: f64,
    /// int_{outside Omega'_Y} u^2 / int u^2.
    pub tail_mass: f64,
    /// lambda int a u^2.
    pub penalty_mass: f64,
    pub outside_sup: f64,
    pub classification: solver::Classification,
    /// phi_lambda(u) - c_Upsilon.
    pub c_gap: f64,
    pub c_lambda_upsilon: f64,
    pub b_hat: f64,
}

pub const CSV_HEADER: &str =
    "lambda,energy,residual,tail_mass,penalty_mass,outside_sup,classification,c_gap,c_lambda_upsilon,b_hat";

pub fn rows_to_csv(rows: &[DiagnosticsRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.lambda,
            r.energy,
            r.residual,
            r.tail_mass,
            r.penalty_mass,
            r.outside_sup,
            r.classification,
            r.c_gap,
            r.c_lambda_upsilon,
            r.b_hat
        );
    }
    out
}

/// Raw little-endian f64 dump with a JSON sidecar carrying the grid metadata.
pub fn write_field(dir: &Path, name: &str, field: &ScalarField) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut bytes = Vec::with_capacity(field.values().len() * 8);
    for v in field.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(dir.join(format!("{name}.f64")), &bytes)?;
    let g = field.grid();
    let sidecar = serde_json::json!({
        "format_version": 1,
        "dtype": "f64-le",
        "order": "x-fastest",
        "n": g.n(),
        "half_width": g.half_width(),
        "spacing": g.spacing(),
        "count": field.values().len(),
    });
    fs::write(
        dir.join(format!("{name}.json")),
        serde_json::to_string_pretty(&sidecar)?,
    )?;
    Ok(())
}

pub fn read_field(dir: &Path, name: &str) -> Result<ScalarField> {
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join(format!("{name}.json")))?)?;
    let n = sidecar["n"]
        .as_u64()
        .ok_or_else(|| Error::Config("sidecar missing n".into()))? as usize;
    let half_width = sidecar["half_width"]
        .as_f64()
        .ok_or_else(|| Error::Config("sidecar missing half_width".into()))?;
    let grid = build_grid(n, half_width)?;
    let bytes = fs::read(dir.join(format!("{name}.f64")))?;
    if bytes.len() != grid.len() * 8 {
        return Err(Error::Config(format!(
            "field dump has {} bytes, expected {}",
            bytes.len(),
            grid.len() * 8
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ScalarField::from_values(grid, values)
}

/// Everything `run` produces besides the files.
pub struct RunReport {
    pub rows: Vec<DiagnosticsRow>,
    pub levels: LevelData,
    pub limit: MinimizeResult,
    pub mu: f64,
    /// Stage index and message when continuation failed part-way.
    pub failure: Option<(usize, String)>,
}

/// Full pipeline: limit problem, tau/R, path bound, continuation with
/// per-lambda diagnostics; writes CSV (and field dumps) into `out_dir`.
pub fn run(exp: &Experiment, out_dir: &Path) -> Result<RunReport> {
    let ctx = &exp.ctx;
    let cfg = &exp.config;
    fs::create_dir_all(out_dir)?;

    let limit = exp.solve_limit()?;
    let c_upsilon = limit.energy.total;
    let (tau, big_r) = nehari::estimate_tau_r(ctx, &limit.field)?;
    let levels = LevelData::new(c_upsilon, tau, big_r, ctx.params.theta);
    let mu = cfg.mu_factor * c_upsilon;

    // the pinned-surface bound does not depend on lambda
    let scan = solver::gamma0_path_scan(
        ctx,
        &limit.field,
        big_r,
        exp.schedule.lambdas()[0],
        cfg.path_scan_resolution,
    )?;

    if cfg.dump_fields {
        write_field(out_dir, "w_upsilon", &limit.field)?;
    }

    // seed-perturbed warm start for the first continuation stage
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut init = limit.field.clone();
    if cfg.perturb_amplitude != 0.0 {
        for v in init.values_mut() {
            *v *= 1.0 + cfg.perturb_amplitude * rng.gen_range(-1.0..1.0);
        }
        init.clip_negative();
    }

    let outcome = solver::continuation(ctx, &exp.schedule, &init, exp.solve_opts());
    let mut rows = Vec::new();
    for res in &outcome.results {
        let row = diagnostics_row(exp, res, &limit.field, &levels, scan.b_hat)?;
        if cfg.dump_fields {
            write_field(out_dir, &format!("u_lambda_{}", res.lambda), &res.field)?;
        }
        rows.push(row);
    }

    fs::write(out_dir.join("diagnostics.csv"), rows_to_csv(&rows))?;
    let levels_json = serde_json::json!({
        "c_upsilon": levels.c_upsilon,
        "tau": levels.tau,
        "R": levels.big_r,
        "delta_theta": levels.delta_theta,
        "r_radius": levels.r_radius,
        "mu": mu,
        "b_hat": scan.b_hat,
        "boundary_max": scan.boundary_max,
        "limit_residual": limit.residual,
    });
    fs::write(
        out_dir.join("levels.json"),
        serde_json::to_string_pretty(&levels_json)?,
    )?;

    Ok(RunReport {
        rows,
        levels,
        limit,
        mu,
        failure: outcome.failure.map(|(k, e)| (k, e.to_string())),
    })
}

fn diagnostics_row(
    exp: &Experiment,
    res: &SolveResult,
    w_limit: &ScalarField,
    levels: &LevelData,
    b_hat: f64,
) -> Result<DiagnosticsRow> {
    let ctx = &exp.ctx;
    let u = &res.field;
    let total = grid::weighted_l2_sq(u, None, None);
    let outside = grid::weighted_l2_sq(
        u,
        None,
        Some(&ctx.masks.omega_prime_upsilon.complement()),
    );
    let tail_mass = if total > 0.0 { outside / total } else { 0.0 };
    let penalty_mass =
        res.lambda * grid::weighted_l2_sq(u, Some(&ctx.potential), None);
    let outside_sup = solver::outside_sup(ctx, u);
    let c_lambda_upsilon = if exp.config.neumann_levels {
        // start from the limit minimizer: the Neumann set contains it, so
        // descent keeps c_(lambda,Y) at or below c_Y
        let neumann =
            nehari::minimize_neumann(ctx, res.lambda, w_limit, exp.minimize_opts())?;
        neumann.energy.total
    } else {
        f64::NAN
    };
    Ok(DiagnosticsRow {
        lambda: res.lambda,
        energy: res.energy.total,
        residual: res.residual,
        tail_mass,
        penalty_mass,
        outside_sup,
        classification: res.classification,
        c_gap: res.energy.total - levels.c_upsilon,
        c_lambda_upsilon,
        b_hat,
    })
}

/// Verdict of one trend item.
#[derive(Debug, Clone, Serialize)]
pub struct TrendVerdict {
    pub name: &'static str,
    pub values: Vec<f64>,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PsInftyReport {
    pub penalty_mass: TrendVerdict,
    pub tail_mass: TrendVerdict,
    pub energy_gap: TrendVerdict,
    pub overall_pass: bool,
}

const TREND_NOISE: f64 = 0.05;

fn trend(name: &'static str, values: Vec<f64>) -> TrendVerdict {
    let mut pass = true;
    let mut detail = String::from("decreasing");
    for (k, w) in values.windows(2).enumerate() {
        if w[1] > w[0] * (1.0 + TREND_NOISE) + f64::MIN_POSITIVE {
            pass = false;
            detail = format!("{name} increased at stage {} ({} -> {})", k + 1, w[0], w[1]);
            break;
        }
    }
    if pass && values.last().copied() >= values.first().copied() {
        pass = false;
        detail = format!("{name} shows no overall decrease across the schedule");
    }
    TrendVerdict {
        name,
        values,
        pass,
        detail,
    }
}

/// Trend tests standing in for the lambda -> infinity limits: penalty mass
/// and tail mass must trend down (5% noise allowed), and the energy must
/// approach c_Upsilon.
pub fn ps_infty_report(rows: &[DiagnosticsRow], c_upsilon: f64) -> Result<PsInftyReport> {
    if rows.len() < 3 {
        return Err(Error::TooFewRows {
            need: 3,
            got: rows.len(),
        });
    }
    if rows.windows(2).any(|w| w[1].lambda <= w[0].lambda) {
        return Err(Error::InsufficientLambdaSpread);
    }
    let penalty = trend(
        "penalty_mass",
        rows.iter().map(|r| r.penalty_mass).collect(),
    );
    let tail = trend("tail_mass", rows.iter().map(|r| r.tail_mass).collect());
    let gap = trend(
        "energy_gap",
        rows.iter().map(|r| (r.energy - c_upsilon).abs()).collect(),
    );
    let overall = penalty.pass && tail.pass && gap.pass;
    Ok(PsInftyReport {
        penalty_mass: penalty,
        tail_mass: tail,
        energy_gap: gap,
        overall_pass: overall,
    })
}

/// One line of the check suite.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: &'static str,
    pub pass: bool,
    pub measured: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// Grid points per axis for the field-level checks (>= 12).
    pub n: usize,
    /// Kernel fault-injection hook; 1.0 is the production kernel.
    pub kernel_scale: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            n: 16,
            kernel_scale: 1.0,
        }
    }
}

/// Cross-checks of the main identities against their oracles on small grids.
/// Tolerances loosen on reduced grids (documented in the table below).
pub fn check_suite(opts: CheckOptions) -> Result<Vec<CheckLine>> {
    let n = opts.n.max(12);
    let mut lines = Vec::new();
    let push = |name: &'static str, measured: f64, bound: f64, lines: &mut Vec<CheckLine>| {
        lines.push(CheckLine {
            name,
            pass: measured <= bound,
            measured,
            bound,
        });
    };

    // tolerance table by grid size
    let (tol_fft, tol_identity, tol_grad) = if n >= 16 {
        (1e-6, 0.06, 1e-5)
    } else {
        (1e-6, 0.14, 1e-5)
    };

    // 1. FFT vs direct summation
    {
        let g = build_grid(12, 2.0)?;
        let s = CoulombSolver::with_kernel_scale(g, opts.kernel_scale);
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let u = ScalarField::from_fn(g, |_, _, _| rng.gen_range(-1.0..1.0));
        let a = s.poisson_fft(&u)?;
        let b = s.poisson_direct(&u)?;
        let scale = b.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = a
            .values()
            .iter()
            .zip(b.values())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
            / scale;
        push("poisson fft vs direct (rel)", err, tol_fft, &mut lines);
    }

    // 2. quadratic scaling of phi and quartic scaling of the energy
    {
        let g = build_grid(n.min(16), 2.0)?;
        let s = CoulombSolver::with_kernel_scale(g, opts.kernel_scale);
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let u = ScalarField::from_fn(g, |_, _, _| rng.gen_range(0.0..1.0));
        let phi = s.poisson_fft(&u)?;
        let phi3 = s.poisson_fft(&u.scaled(3.0))?;
        let mut worst = 0.0f64;
        for (a, b) in phi3.values().iter().zip(phi.values()) {
            worst = worst.max((a - 9.0 * b).abs() / (9.0 * b).abs());
        }
        push("phi(tu) = t^2 phi(u) (rel)", worst, 1e-13, &mut lines);
        let e1 = s.nonlocal_energy(&u)?;
        let e2 = s.nonlocal_energy(&u.scaled(2.0))?;
        push(
            "nonlocal energy t^4 scaling (rel)",
            (e2 - 16.0 * e1).abs() / e2,
            1e-12,
            &mut lines,
        );
    }

    // 3. Dirichlet-form identity with far-field closure (fails under a
    // mis-scaled kernel)
    {
        let g = build_grid(n, 3.0)?;
        let s = CoulombSolver::with_kernel_scale(g, opts.kernel_scale);
        let u = ScalarField::from_fn(g, |x, y, z| {
            let r2 = x * x + y * y + z * z;
            0.8 * (-r2 / 0.5).exp() + 0.4 * (-r2 / 1.3).exp()
        });
        let defect = energy_identity_defect(&s, &u)?;
        push(
            "grad-form identity defect (rel)",
            defect,
            tol_identity,
            &mut lines,
        );
    }

    // 4. gradient vs central differences on the test geometry
    {
        let ctx = small_context(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        let u = ScalarField::from_fn(ctx.grid, |_, _, _| rng.gen_range(-0.5..1.0));
        let v = ScalarField::from_fn(ctx.grid, |_, _, _| rng.gen_range(-1.0..1.0));
        let kind = FunctionalKind::Penalized { lambda: 5.0 };
        let eps = 1e-4;
        let ep = functionals::energy(&ctx, kind, &v.scaled(eps).axpy(1.0, &u)?)?.total;
        let em = functionals::energy(&ctx, kind, &v.scaled(-eps).axpy(1.0, &u)?)?.total;
        let fd = (ep - em) / (2.0 * eps);
        let exact = grid::inner(&functionals::grad(&ctx, kind, &u)?, &v);
        push(
            "penalized gradient vs central differences (rel)",
            (fd - exact).abs() / exact.abs().max(1e-12),
            tol_grad,
            &mut lines,
        );
    }

    // 5. amplitude system vs grid-search oracle
    {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let coeffs = NehariCoefficients {
                a: vec![rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0)],
                b: {
                    let d0 = rng.gen_range(0.0..5.0);
                    let d1 = rng.gen_range(0.0..5.0);
                    let off = rng.gen_range(0.0..5.0);
                    vec![vec![d0, off], vec![off, d1]]
                },
                c: vec![rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0)],
            };
            let t = nehari::solve_t_system(&coeffs, 4.0)?;
            let oracle = t_grid_search(&coeffs, 4.0);
            for k in 0..2 {
                worst = worst.max((t[k] - oracle[k]).abs());
            }
        }
        push("amplitude system vs grid search", worst, 1e-6, &mut lines);
    }

    // 6. cap level against bisection
    {
        let (nu, a_cut) = cutoff_constants(0.5, 3.5)?;
        let hfun = |x: f64| x.powf(2.5) - nu;
        let (mut lo, mut hi) = (1e-9, 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hfun(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        push(
            "cap level vs bisection",
            (a_cut - 0.5 * (lo + hi)).abs(),
            1e-12,
            &mut lines,
        );
    }

    // 7. quarter-norm bound on projected fields
    {
        let ctx = small_context(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(104);
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let mut u = initial_guess(&ctx, rng.gen(), 0.0);
            for v in u.values_mut() {
                *v *= rng.gen_range(0.4..2.0);
            }
            let p = nehari::project_to_m(&ctx, FunctionalKind::Limit, &u)?;
            let e = functionals::energy(&ctx, FunctionalKind::Limit, &p.field)?.total;
            let azero = ScalarField::zeros(ctx.grid);
            let norm = grid::norm_lambda(&p.field, &azero, 0.0, None)?;
            worst = worst.max(norm * norm / 4.0 - e);
        }
        push("J >= ||u||^2/4 on M (defect)", worst, 1e-8, &mut lines);
    }

    Ok(lines)
}

fn small_context(n: usize) -> Result<Context> {
    let grid = build_grid(n.clamp(12, 24), 4.0)?;
    let geometry = wells::build_geometry(
        vec![
            Ball {
                center: [-1.9, 0.0, 0.0],
                radius: 0.8,
            },
            Ball {
                center: [1.9, 0.0, 0.0],
                radius: 0.8,
            },
        ],
        0.6,
        1.0,
        0.5,
    )?;
    let upsilon = UpsilonSelection::new(vec![0, 1], 2)?;
    Context::new(grid, geometry, upsilon, ModelParams::new(4.0, 0.5)?)
}

fn t_grid_search(c: &NehariCoefficients, q: f64) -> Vec<f64> {
    let mut lo = [0.05f64, 0.05];
    let mut hi = [20.0f64, 20.0];
    let mut best = (f64::INFINITY, vec![1.0, 1.0]);
    for round in 0..8 {
        let steps = if round == 0 { 400 } else { 40 };
        best.0 = f64::INFINITY;
        for i in 0..=steps {
            let t0 = (lo[0] + (hi[0] - lo[0]) * i as f64 / steps as f64).max(1e-9);
            for j in 0..=steps {
                let t1 = (lo[1] + (hi[1] - lo[1]) * j as f64 / steps as f64).max(1e-9);
                let t = [t0, t1];
                let r = c.residual(&t, q, 0).abs() + c.residual(&t, q, 1).abs();
                if r < best.0 {
                    best = (r, t.to_vec());
                }
            }
        }
        let w0 = (hi[0] - lo[0]) / steps as f64;
        let w1 = (hi[1] - lo[1]) / steps as f64;
        lo = [best.1[0] - 2.0 * w0, best.1[1] - 2.0 * w1];
        hi = [best.1[0] + 2.0 * w0, best.1[1] + 2.0 * w1];
    }
    best.1
}

/// Render the check table and return overall success.
pub fn print_check_table(lines: &[CheckLine], sink: &mut impl std::io::Write) -> bool {
    let mut all = true;
    let _ = writeln!(sink, "{:<52} {:>12} {:>12}  status", "check", "measured", "bound");
    for l in lines {
        all &= l.pass;
        let _ = writeln!(
            sink,
            "{:<52} {:>12.3e} {:>12.3e}  {}",
            l.name,
            l.measured,
            l.bound,
            if l.pass { "pass" } else { "FAIL" }
        );
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Classification;
    use tempfile::tempdir;

    pub fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            grid: GridConfig {
                n: 16,
                half_width: 4.0,
            },
            wells: vec![
                Ball {
                    center: [-1.9, 0.0, 0.0],
                    radius: 0.8,
                },
                Ball {
                    center: [1.9, 0.0, 0.0],
                    radius: 0.8,
                },
            ],
            enlargement: 0.6,
            a_max: 1.0,
            ramp_width: 0.5,
            model: ModelConfig {
                q: 4.0,
                delta_coercivity: 0.5,
            },
            upsilon: vec![0],
            lambda_schedule: vec![5.0, 50.0],
            solver: SolverConfig {
                tol: 1e-5,
                max_iterations: 8000,
                limit_tol: 1e-6,
                limit_max_iterations: 5000,
                restarts: 1,
            },
            mu_factor: 0.1,
            seed: 11,
            perturb_amplitude: 0.05,
            neumann_levels: true,
            path_scan_resolution: 17,
            dump_fields: true,
        }
    }

    #[test]
    fn config_roundtrip_and_validation() {
        let cfg = tiny_config();
        let json = serde_json::to_string(&cfg).unwrap();
        let back = ExperimentConfig::from_json_str(&json).unwrap();
        assert_eq!(back.grid.n, 16);
        assert!(Experiment::prepare(back).is_ok());

        let mut bad = tiny_config();
        bad.upsilon = vec![];
        let err = match Experiment::prepare(bad) {
            Err(e) => e,
            Ok(_) => panic!("empty upsilon accepted"),
        };
        assert!(err.to_string().contains("non-empty subset"));

        let mut bad = tiny_config();
        bad.wells[1].center = [-1.0, 0.0, 0.0];
        let err = match Experiment::prepare(bad) {
            Err(e) => e,
            Ok(_) => panic!("overlapping wells accepted"),
        };
        assert!(err.to_string().contains("overlap"), "{err}");

        let mut bad = tiny_config();
        bad.lambda_schedule = vec![50.0, 5.0];
        assert!(Experiment::prepare(bad).is_err());
    }

    #[test]
    fn field_dump_roundtrip_exact() {
        let g = build_grid(12, 2.0).unwrap();
        let f = ScalarField::from_fn(g, |x, y, z| (x * 12.3 + y).sin() * z.cos() + 1e-17 * x);
        let dir = tempdir().unwrap();
        write_field(dir.path(), "probe", &f).unwrap();
        let back = read_field(dir.path(), "probe").unwrap();
        assert_eq!(f, back);
    }

    fn synth_row(lambda: f64, pen: f64, tail: f64, energy: f64) -> DiagnosticsRow {
        DiagnosticsRow {
            lambda,
            energy,
            residual: 1e-7,
            tail_mass: tail,
            penalty_mass: pen,
            outside_sup: 0.1,
            classification: Classification::Original,
            c_gap: 0.0,
            c_lambda_upsilon: f64::NAN,
            b_hat: 1.0,
        }
    }

    #[test]
    fn trend_report_verdicts() {
        let c = 1.0;
        let good = vec![
            synth_row(10.0, 1.0, 1e-2, 0.8),
            synth_row(100.0, 0.5, 1e-3, 0.9),
            synth_row(1000.0, 0.2, 1e-4, 0.97),
        ];
        let rep = ps_infty_report(&good, c).unwrap();
        assert!(rep.overall_pass);

        // increasing tail trend is named in the verdict
        let bad = vec![
            synth_row(10.0, 1.0, 1e-4, 0.8),
            synth_row(100.0, 0.5, 1e-3, 0.9),
            synth_row(1000.0, 0.2, 1e-2, 0.97),
        ];
        let rep = ps_infty_report(&bad, c).unwrap();
        assert!(!rep.overall_pass);
        assert!(!rep.tail_mass.pass);
        assert!(rep.tail_mass.detail.contains("tail_mass"));

        // constant lambda rejected
        let flat = vec![
            synth_row(10.0, 1.0, 1e-2, 0.8),
            synth_row(10.0, 0.9, 1e-3, 0.9),
            synth_row(10.0, 0.8, 1e-4, 0.95),
        ];
        assert!(matches!(
            ps_infty_report(&flat, c),
            Err(Error::InsufficientLambdaSpread)
        ));

        assert!(matches!(
            ps_infty_report(&good[..2], c),
            Err(Error::TooFewRows { .. })
        ));
    }

    #[test]
    fn check_suite_passes_and_detects_faults() {
        let lines = check_suite(CheckOptions::default()).unwrap();
        assert!(lines.iter().all(|l| l.pass), "{lines:?}");

        // reduced grid with loosened tolerances still passes
        let lines = check_suite(CheckOptions {
            n: 12,
            kernel_scale: 1.0,
        })
        .unwrap();
        assert!(lines.iter().all(|l| l.pass), "{lines:?}");

        // fault injection: mis-scaled kernel breaks the identity check
        let lines = check_suite(CheckOptions {
            n: 16,
            kernel_scale: 1.3,
        })
        .unwrap();
        let identity = lines
            .iter()
            .find(|l| l.name.contains("identity"))
            .unwrap();
        assert!(!identity.pass);
    }

    #[test]
    fn run_writes_reproducible_csv() {
        let mut cfg = tiny_config();
        cfg.lambda_schedule = vec![5.0, 20.0, 80.0];
        cfg.dump_fields = false;
        cfg.neumann_levels = false;
        let exp = Experiment::prepare(cfg.clone()).unwrap();
        let d1 = tempdir().unwrap();
        let r1 = run(&exp, d1.path()).unwrap();
        assert!(r1.failure.is_none());
        assert_eq!(r1.rows.len(), 3);

        let exp2 = Experiment::prepare(cfg).unwrap();
        let d2 = tempdir().unwrap();
        let _ = run(&exp2, d2.path()).unwrap();
        let c1 = fs::read(d1.path().join("diagnostics.csv")).unwrap();
        let c2 = fs::read(d2.path().join("diagnostics.csv")).unwrap();
        assert_eq!(c1, c2, "same config and seed must reproduce the CSV bytes");
    }
}
