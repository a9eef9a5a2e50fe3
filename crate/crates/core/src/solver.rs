//! The penalized problem: descent on phi_lambda with a global Nehari rescale,
//! lambda-continuation with warm starts, the reduction test back to the
//! original problem, and the gamma_0 path bound for the minimax level.

use crate::error::{Error, Result};
use crate::functionals::{self, Context, EnergyBreakdown, FunctionalKind};
use crate::grid::{self, ScalarField};
use crate::model;
use crate::nehari;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Whether a converged auxiliary solution also solves the original problem
/// (sup bound outside the enlarged wells).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "auxiliary-only")]
    AuxiliaryOnly,
    #[serde(rename = "original")]
    Original,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Classification::AuxiliaryOnly => write!(f, "auxiliary-only"),
            Classification::Original => write!(f, "original"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub field: ScalarField,
    pub energy: EnergyBreakdown,
    pub residual: f64,
    pub lambda: f64,
    pub classification: Classification,
    pub iterations: usize,
    /// Accepted phi_lambda values (non-increasing up to the line-search window).
    pub energy_trace: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-6,
            max_iterations: 30_000,
        }
    }
}

/// Smooth compactly supported bumps seeded in the selected wells, with an
/// optional multiplicative perturbation drawn from the experiment seed.
pub fn initial_guess(ctx: &Context, seed: u64, noise_amplitude: f64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = ScalarField::zeros(ctx.grid);
    for &j in ctx.upsilon.indices() {
        let ball = ctx.geometry.wells[j];
        let bump = ScalarField::from_fn(ctx.grid, |x, y, z| {
            let d2 = (x - ball.center[0]).powi(2)
                + (y - ball.center[1]).powi(2)
                + (z - ball.center[2]).powi(2);
            (1.0 - d2 / (ball.radius * ball.radius)).max(0.0).powi(2)
        });
        // normalize each component in the lambda-free norm, then give it
        // enough amplitude for the power term to engage
        let norm = functionals::quad_form(ctx, FunctionalKind::Limit, &bump).sqrt();
        field = bump.scaled(2.0 / norm).axpy(1.0, &field).expect("same grid");
    }
    if noise_amplitude != 0.0 {
        for v in field.values_mut() {
            *v *= 1.0 + noise_amplitude * rng.gen_range(-1.0..1.0);
        }
        field.clip_negative();
    }
    field
}

/// Data for the global Nehari rescale of phi_lambda along a ray t -> t v:
/// the inside part is an exact power, the capped outside part is evaluated
/// from the collected positive samples.
struct Ray {
    quad: f64,
    coulomb: f64,
    inside_power: f64,
    outside_positive: Vec<f64>,
    h3: f64,
}

impl Ray {
    fn build(ctx: &Context, lambda: f64, v: &ScalarField, phi: &ScalarField) -> Ray {
        let h3 = ctx.grid.cell_volume();
        let quad = functionals::quad_form(ctx, FunctionalKind::Penalized { lambda }, v);
        let rho = crate::coulomb::square(v);
        let coulomb = grid::inner(phi, &rho);
        let mut inside_power = 0.0;
        let mut outside_positive = Vec::new();
        for idx in 0..ctx.grid.len() {
            let val = v.values()[idx];
            if val <= 0.0 {
                continue;
            }
            if ctx.masks.chi.values()[idx] == 1.0 {
                inside_power += model::big_f_eval(val, &ctx.params) * (ctx.params.q + 1.0);
            } else {
                outside_positive.push(val);
            }
        }
        inside_power *= h3;
        Ray {
            quad,
            coulomb,
            inside_power,
            outside_positive,
            h3,
        }
    }

    /// phi_lambda'(t v)(t v) / t^2
    fn constraint(&self, ctx: &Context, t: f64) -> f64 {
        let p = &ctx.params;
        let mut outside = 0.0;
        for &v in &self.outside_positive {
            let s = t * v;
            outside += model::f_tilde(s, p) * s;
        }
        outside *= self.h3;
        let tq = if p.q == 4.0 {
            t * t * t
        } else {
            t.powf(p.q - 1.0)
        };
        self.quad + t * t * self.coulomb - tq * self.inside_power - outside / (t * t)
    }

    /// Nehari amplitude on the ray: the positive root of `constraint`.
    fn rescale(&self, ctx: &Context) -> Option<f64> {
        let mut hi = 1.0;
        let mut lo = 1.0;
        if self.constraint(ctx, 1.0) > 0.0 {
            while self.constraint(ctx, hi) > 0.0 {
                hi *= 2.0;
                if hi > 1e12 {
                    return None;
                }
            }
            lo = hi / 2.0;
        } else {
            while self.constraint(ctx, lo) <= 0.0 {
                lo *= 0.5;
                if lo < 1e-12 {
                    return None;
                }
            }
            hi = lo * 2.0;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.constraint(ctx, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// phi_lambda(t v) given phi_{tv} = t^2 phi_v.
    fn energy(&self, ctx: &Context, t: f64) -> f64 {
        let p = &ctx.params;
        let mut outside = 0.0;
        for &val in &self.outside_positive {
            outside += model::big_f_tilde(t * val, p);
        }
        outside *= self.h3;
        let tq1 = if p.q == 4.0 {
            let t2 = t * t;
            t2 * t2 * t
        } else {
            t.powf(p.q + 1.0)
        };
        0.5 * t * t * self.quad + 0.25 * t.powi(4) * self.coulomb
            - tq1 * self.inside_power / (p.q + 1.0)
            - outside
    }
}

/// Rebalance the amplitudes of the well components of u: scale each part
/// u restricted to Omega'_j so the per-component Nehari constraints of the
/// functional restricted to the enlarged wells hold, leaving the exterior
/// tail untouched. Without this the descent drains mass from one selected
/// well into another (the transfer mode is downhill on the single global
/// constraint set), which loses every multi-bump configuration; with the
/// amplitudes pinned the flow stays in the per-component region the
/// deformation argument confines itself to. No-op for a single component
/// or when any component is degenerate.
fn balance_components(ctx: &Context, lambda: f64, u: &ScalarField) -> Result<ScalarField> {
    let masks = ctx.component_masks(FunctionalKind::NeumannPenalized { lambda });
    if masks.len() < 2 {
        return Ok(u.clone());
    }
    let parts: Vec<ScalarField> = masks
        .iter()
        .map(|m| u.masked(m))
        .collect::<Result<_>>()?;
    if parts
        .iter()
        .any(|p| functionals::quad_form(ctx, FunctionalKind::NeumannPenalized { lambda }, p) <= 0.0)
    {
        return Ok(u.clone());
    }
    let coeffs = nehari::component_coeffs(
        ctx,
        FunctionalKind::NeumannPenalized { lambda },
        &parts,
        &ctx.masks.omega_prime_upsilon,
    )?;
    if coeffs.a.iter().any(|a| !(*a > 0.0)) || coeffs.c.iter().any(|c| !(*c > 0.0)) {
        return Ok(u.clone());
    }
    let t = match nehari::solve_t_system(&coeffs, ctx.params.q) {
        Ok(t) => t,
        Err(_) => return Ok(u.clone()),
    };
    let mut out = u.clone();
    for (tj, m) in t.iter().zip(&masks) {
        for idx in 0..ctx.grid.len() {
            if m.contains(idx) {
                out.values_mut()[idx] *= tj;
            }
        }
    }
    Ok(out)
}

/// Gradient-flow descent on phi_lambda: preconditioned step with BB step
/// adaptation and backtracking, negative-part clipping, then a per-component
/// amplitude balance inside the enlarged wells followed by a global Nehari
/// rescale each accepted iteration; stops when the L2 residual of
/// -Delta u + (lambda a + 1) u + phi_u u - g(x,u) drops below tol * ||u||.
pub fn solve_penalized(
    ctx: &Context,
    lambda: f64,
    init: &ScalarField,
    opts: SolveOptions,
) -> Result<SolveResult> {
    let kind = FunctionalKind::Penalized { lambda };
    let h = ctx.grid.spacing();
    let lap_scale = 12.0 / (h * h);
    let norm_floor = 1e-10 * init.l2_norm().max(1e-6);

    // land the initial point on the Nehari set of phi_lambda
    let mut u = init.clone();
    u.clip_negative();
    if u.l2_norm() < norm_floor {
        return Err(Error::TrivialAttractor);
    }
    u = balance_components(ctx, lambda, &u)?;
    let mut phi = ctx.coulomb.poisson_fft(&u)?;
    {
        let ray = Ray::build(ctx, lambda, &u, &phi);
        let t = ray.rescale(ctx).ok_or(Error::TrivialAttractor)?;
        u.scale_in_place(t);
        phi.scale_in_place(t * t);
    }
    let mut energy_now = functionals::energy_with_phi(ctx, kind, &u, &phi).total;
    let mut trace = vec![energy_now];
    let mut prev: Option<(ScalarField, ScalarField)> = None;
    let mut step = 1.0 / lap_scale;
    let mut residual = f64::INFINITY;
    let mut iterations_done = 0;

    for iteration in 0..opts.max_iterations {
        iterations_done = iteration;
        let grad = functionals::grad_with_phi(ctx, kind, &u, &phi);
        let unorm = u.l2_norm();
        residual = grad.l2_norm();
        if residual <= opts.tol * unorm.max(f64::MIN_POSITIVE) {
            let energy = functionals::energy_with_phi(ctx, kind, &u, &phi);
            return Ok(SolveResult {
                field: u,
                energy,
                residual,
                lambda,
                classification: Classification::AuxiliaryOnly,
                iterations: iteration,
                energy_trace: trace,
            });
        }
        if unorm < norm_floor {
            return Err(Error::TrivialAttractor);
        }

        if let Some((pu, pg)) = &prev {
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..ctx.grid.len() {
                let du = u.values()[i] - pu.values()[i];
                let dg = grad.values()[i] - pg.values()[i];
                num += du * du;
                den += du * dg;
            }
            step = if den > 0.0 {
                (num / den).clamp(1e-3 / lap_scale, 1e4 / lap_scale)
            } else {
                1.0 / lap_scale
            };
        }
        prev = Some((u.clone(), grad.clone()));

        // Jacobi preconditioner on the stiff potential term
        let mut dir = grad.clone();
        for idx in 0..ctx.grid.len() {
            let w = lap_scale + lambda * ctx.potential.values()[idx] + 1.0;
            dir.values_mut()[idx] *= lap_scale / w;
        }
        let slope = grid::inner(&grad, &dir);

        // monotone Armijo backtracking on the post-rescale energy, with a
        // flat-step fallback so the recorded sequence never increases
        let mut s = step;
        let mut accepted: Option<(ScalarField, ScalarField, f64)> = None;
        let mut fallback: Option<(ScalarField, ScalarField, f64)> = None;
        for _ in 0..45 {
            let mut cand = dir.scaled(-s).axpy(1.0, &u)?;
            cand.clip_negative();
            if cand.l2_norm() < norm_floor {
                s *= 0.5;
                continue;
            }
            let cand = balance_components(ctx, lambda, &cand)?;
            let phic = ctx.coulomb.poisson_fft(&cand)?;
            let ray = Ray::build(ctx, lambda, &cand, &phic);
            let Some(t) = ray.rescale(ctx) else {
                s *= 0.5;
                continue;
            };
            let e_cand = ray.energy(ctx, t);
            if e_cand <= energy_now - 1e-4 * s * slope {
                let mut cand = cand;
                cand.scale_in_place(t);
                let mut phic = phic;
                phic.scale_in_place(t * t);
                accepted = Some((cand, phic, e_cand));
                break;
            }
            if e_cand <= energy_now && fallback.is_none() {
                let mut keep = cand.clone();
                keep.scale_in_place(t);
                let mut phik = phic.clone();
                phik.scale_in_place(t * t);
                fallback = Some((keep, phik, e_cand));
            }
            s *= 0.5;
        }
        let chosen = accepted.or(fallback);
        let Some((cand, phic, e_cand)) = chosen else {
            break;
        };
        u = cand;
        phi = phic;
        energy_now = e_cand;
        trace.push(e_cand);
    }

    let unorm = u.l2_norm();
    if residual <= 50.0 * opts.tol * unorm {
        let energy = functionals::energy_with_phi(ctx, kind, &u, &phi);
        return Ok(SolveResult {
            field: u,
            energy,
            residual,
            lambda,
            classification: Classification::AuxiliaryOnly,
            iterations: iterations_done,
            energy_trace: trace,
        });
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        residual,
        tol: opts.tol,
    })
}

/// Sup bound of the reduction test: the auxiliary solution solves the
/// original problem iff its values outside the enlarged selected wells stay
/// at or below the cap level. Updates the classification.
pub fn verify_original(ctx: &Context, result: &mut SolveResult) -> bool {
    let ok = outside_sup(ctx, &result.field) <= ctx.params.a_cut;
    result.classification = if ok {
        Classification::Original
    } else {
        Classification::AuxiliaryOnly
    };
    ok
}

/// max of u over grid points outside Omega'_Upsilon.
pub fn outside_sup(ctx: &Context, u: &ScalarField) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for idx in 0..ctx.grid.len() {
        if !ctx.masks.omega_prime_upsilon.contains(idx) {
            m = m.max(u.values()[idx]);
        }
    }
    m
}

/// Strictly increasing lambda values, all >= 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuationSchedule {
    lambdas: Vec<f64>,
    pub warm_start: bool,
}

impl ContinuationSchedule {
    pub fn new(lambdas: Vec<f64>, warm_start: bool) -> Result<Self> {
        if lambdas.is_empty() || lambdas[0] < 1.0 {
            return Err(Error::BadSchedule);
        }
        if lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::BadSchedule);
        }
        Ok(ContinuationSchedule {
            lambdas,
            warm_start,
        })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }
}

/// Continuation outcome: per-lambda solves, plus the failure point when a
/// stage did not converge (partial results are kept).
pub struct ContinuationOutcome {
    pub results: Vec<SolveResult>,
    pub failure: Option<(usize, Error)>,
}

/// Solve the auxiliary problem along the schedule, warm-starting each stage
/// from the previous solution, and classify each solution.
pub fn continuation(
    ctx: &Context,
    schedule: &ContinuationSchedule,
    init: &ScalarField,
    opts: SolveOptions,
) -> ContinuationOutcome {
    let mut results = Vec::new();
    let mut current = init.clone();
    for (k, &lambda) in schedule.lambdas.iter().enumerate() {
        match solve_penalized(ctx, lambda, &current, opts) {
            Ok(mut res) => {
                verify_original(ctx, &mut res);
                if schedule.warm_start {
                    current = res.field.clone();
                }
                results.push(res);
            }
            Err(e) => {
                return ContinuationOutcome {
                    results,
                    failure: Some((k, e)),
                }
            }
        }
    }
    ContinuationOutcome {
        results,
        failure: None,
    }
}

/// Tensor scan of phi_lambda over the pinned surface gamma_0(t) = sum t_j R w_j,
/// t in [1/R^2, 1]^l.
#[derive(Debug, Clone)]
pub struct PathScan {
    /// max over the scanned grid: an upper bound for the minimax level.
    pub b_hat: f64,
    /// max over the boundary of the cube of amplitudes.
    pub boundary_max: f64,
    pub argmax: Vec<f64>,
}

/// Evaluate the scan. The supports of the components lie in the wells where
/// a(x) = 0, so the value does not depend on lambda; the energies come from
/// the exact component coefficients (one Poisson solve per component).
pub fn gamma0_path_scan(
    ctx: &Context,
    w: &ScalarField,
    big_r: f64,
    lambda: f64,
    resolution: usize,
) -> Result<PathScan> {
    let _ = lambda;
    let coeffs = nehari::component_ray_coeffs(ctx, w)?;
    let l = coeffs.len();
    let q = ctx.params.q;
    let lo = 1.0 / (big_r * big_r);
    let res = resolution.max(3);
    // amplitude grid per axis, with the Nehari scaling 1/R injected exactly
    let mut axis: Vec<f64> = (0..res)
        .map(|i| lo + (1.0 - lo) * i as f64 / (res - 1) as f64)
        .collect();
    let nehari_t = 1.0 / big_r;
    if axis.iter().all(|t| (t - nehari_t).abs() > 1e-12) {
        axis.push(nehari_t);
        axis.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    let m = axis.len();
    let energy_at = |t: &[f64]| -> f64 {
        let mut e = 0.0;
        for i in 0..l {
            let si = t[i] * big_r;
            e += 0.5 * si * si * coeffs.a[i];
            for j in 0..l {
                let sj = t[j] * big_r;
                e += 0.25 * si * si * sj * sj * coeffs.b[i][j];
            }
            let sq1 = if q == 4.0 {
                let s2 = si * si;
                s2 * s2 * si
            } else {
                si.powf(q + 1.0)
            };
            e -= sq1 * coeffs.c[i] / (q + 1.0);
        }
        e
    };
    let mut idx = vec![0usize; l];
    let mut b_hat = f64::NEG_INFINITY;
    let mut boundary_max = f64::NEG_INFINITY;
    let mut argmax = vec![axis[0]; l];
    loop {
        let t: Vec<f64> = idx.iter().map(|&k| axis[k]).collect();
        let e = energy_at(&t);
        if e > b_hat {
            b_hat = e;
            argmax = t.clone();
        }
        if idx.iter().any(|&k| k == 0 || k == m - 1) {
            boundary_max = boundary_max.max(e);
        }
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < m {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == l {
                return Ok(PathScan {
                    b_hat,
                    boundary_max,
                    argmax,
                });
            }
        }
    }
}

/// Level and neighborhood data derived from the limit solution.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LevelData {
    pub c_upsilon: f64,
    pub tau: f64,
    pub big_r: f64,
    /// tau / (48 R), the deformation-neighborhood radius.
    pub delta_theta: f64,
    /// R^2 (1/2 - 1/theta)^(-1) c_Upsilon, logged for reference.
    pub r_radius: f64,
}

impl LevelData {
    pub fn new(c_upsilon: f64, tau: f64, big_r: f64, theta: f64) -> Self {
        LevelData {
            c_upsilon,
            tau,
            big_r,
            delta_theta: tau / (48.0 * big_r),
            r_radius: big_r * big_r * c_upsilon / (0.5 - 1.0 / theta),
        }
    }
}

/// Membership in the (relaxed) neighborhood A_mu: every selected component
/// norm ||u||_{lambda, Omega'_j} above tau/(8R) - 2 delta and the energy
/// within mu of c_Upsilon.
pub fn a_mu_membership(
    ctx: &Context,
    u: &ScalarField,
    lambda: f64,
    mu: f64,
    levels: &LevelData,
) -> Result<bool> {
    let floor = levels.tau / (8.0 * levels.big_r) - 2.0 * levels.delta_theta;
    for &j in ctx.upsilon.indices() {
        let nj = grid::norm_lambda(u, &ctx.potential, lambda, Some(&ctx.masks.omega_prime[j]))?;
        if nj <= floor {
            return Ok(false);
        }
    }
    let e = functionals::energy(ctx, FunctionalKind::Penalized { lambda }, u)?.total;
    Ok((e - levels.c_upsilon).abs() <= mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::model::ModelParams;
    use crate::nehari::{minimize_limit, MinimizeOptions};
    use crate::wells::{self, Ball, UpsilonSelection};

    fn ctx_small(upsilon: Vec<usize>) -> Context {
        let grid = build_grid(20, 4.0).unwrap();
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
        )
        .unwrap();
        Context::new(
            grid,
            geometry,
            UpsilonSelection::new(upsilon, 2).unwrap(),
            ModelParams::new(4.0, 0.5).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn initial_guess_supports() {
        let ctx = ctx_small(vec![0]);
        let g = initial_guess(&ctx, 7, 0.05);
        // supported in well 0 only
        for idx in 0..ctx.grid.len() {
            if g.values()[idx] != 0.0 {
                assert!(ctx.masks.omega[0].contains(idx));
            }
        }
        let ctx = ctx_small(vec![0, 1]);
        let g = initial_guess(&ctx, 7, 0.05);
        for m in ctx.component_masks(FunctionalKind::Limit) {
            let part = g.masked(m).unwrap();
            assert!(part.l2_norm() > 0.0);
        }
        // projectable
        let p = nehari::project_to_m(&ctx, FunctionalKind::Limit, &g).unwrap();
        let masks = ctx.component_masks(FunctionalKind::Limit);
        let res =
            functionals::constraint_values(&ctx, FunctionalKind::Limit, &p.field, &masks).unwrap();
        for r in res {
            assert!(r.abs() < 1e-8);
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(ContinuationSchedule::new(vec![1.0, 10.0, 100.0], true).is_ok());
        assert!(ContinuationSchedule::new(vec![], true).is_err());
        assert!(ContinuationSchedule::new(vec![0.5, 2.0], true).is_err());
        assert!(ContinuationSchedule::new(vec![10.0, 10.0], true).is_err());
    }

    #[test]
    fn verify_original_bounds() {
        let ctx = ctx_small(vec![0]);
        let a_cut = ctx.params.a_cut;
        let mk = |v: f64| SolveResult {
            field: ScalarField::constant(ctx.grid, v),
            energy: EnergyBreakdown {
                quadratic: 0.0,
                nonlocal: 0.0,
                potential: 0.0,
                total: 0.0,
            },
            residual: 0.0,
            lambda: 1.0,
            classification: Classification::AuxiliaryOnly,
            iterations: 0,
            energy_trace: vec![],
        };
        let mut r = mk(a_cut / 2.0);
        assert!(verify_original(&ctx, &mut r));
        assert_eq!(r.classification, Classification::Original);

        let mut r = mk(a_cut / 2.0);
        // plant a single violation outside the enlarged wells
        let far = ctx.grid.index(0, 0, 0);
        assert!(!ctx.masks.omega_prime_upsilon.contains(far));
        r.field.values_mut()[far] = 2.0 * a_cut;
        assert!(!verify_original(&ctx, &mut r));
        assert_eq!(r.classification, Classification::AuxiliaryOnly);
    }

    #[test]
    fn penalized_single_well_converges() {
        let ctx = ctx_small(vec![0]);
        let init = initial_guess(&ctx, 3, 0.0);
        let res = solve_penalized(&ctx, 50.0, &init, SolveOptions::default()).unwrap();
        assert!(res.residual <= 50.0 * 1e-6 * res.field.l2_norm());
        // mass concentrated near the selected well
        let inside = grid::weighted_l2_sq(&res.field, None, Some(&ctx.masks.omega_prime[0]));
        let total = grid::weighted_l2_sq(&res.field, None, None);
        assert!(inside / total > 0.9, "mass fraction {}", inside / total);
        // descent of accepted energies up to the non-monotone window
        let worst = res
            .energy_trace
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(worst <= 1e-9 * res.energy.total.abs().max(1.0));

        // zero init collapses
        let z = ScalarField::zeros(ctx.grid);
        assert!(matches!(
            solve_penalized(&ctx, 50.0, &z, SolveOptions::default()),
            Err(Error::TrivialAttractor)
        ));
    }

    #[test]
    fn gamma0_scan_and_membership() {
        let ctx = ctx_small(vec![0, 1]);
        let init = initial_guess(&ctx, 5, 0.0);
        let w = minimize_limit(&ctx, &init, MinimizeOptions::default()).unwrap();
        let c_upsilon = w.energy.total;
        let (tau, big_r) = nehari::estimate_tau_r(&ctx, &w.field).unwrap();
        let levels = LevelData::new(c_upsilon, tau, big_r, ctx.params.theta);
        assert!(levels.delta_theta > 0.0 && levels.r_radius > 0.0);

        let scan = gamma0_path_scan(&ctx, &w.field, big_r, 1.0, 33).unwrap();
        assert!(
            scan.b_hat <= c_upsilon + 1e-6,
            "b_hat = {}, c = {}",
            scan.b_hat,
            c_upsilon
        );
        assert!(scan.boundary_max < c_upsilon);
        for t in &scan.argmax {
            assert!(
                (t - 1.0 / big_r).abs() < 0.05,
                "argmax {t} should sit near 1/R = {}",
                1.0 / big_r
            );
        }
        // lambda independence on the pinned surface
        let scan100 = gamma0_path_scan(&ctx, &w.field, big_r, 100.0, 33).unwrap();
        assert_eq!(scan.b_hat, scan100.b_hat);

        // membership: w itself qualifies with mu = 0.1 c for any lambda
        let mu = 0.1 * c_upsilon;
        assert!(a_mu_membership(&ctx, &w.field, 13.0, mu, &levels).unwrap());
        let z = ScalarField::zeros(ctx.grid);
        assert!(!a_mu_membership(&ctx, &z, 13.0, mu, &levels).unwrap());
        assert!(!a_mu_membership(&ctx, &w.field.scaled(10.0), 13.0, mu, &levels).unwrap());
    }
}
