//! Energy functionals and their L2 gradients.
//!
//! Three functionals share one discretization:
//!
//! * `Penalized{lambda}`: phi_lambda(u) = 1/2 int (|grad u|^2 + (lambda a+1)u^2)
//!   + 1/4 int phi_u u^2 - int G(x,u) on the whole box, where G switches from
//!   F inside the enlarged selected wells to the capped primitive outside.
//! * `Limit`: J(u) = 1/2 int_{Omega_Y} (|grad u|^2 + u^2) + 1/4 int phi_u u^2
//!   - int F(u) for u vanishing outside the selected wells (Dirichlet via
//!   masking; the quadratic form is that of the zero extension).
//! * `NeumannPenalized{lambda}`: same density on the enlarged wells but with
//!   the interior-link (no boundary penalty) form, the functional of the
//!   Neumann auxiliary problem.
//!
//! In every case the nonlocal term uses the free-space convolution of the
//! zero-extended field, which is the kernel the limit problems are stated
//! with. Gradients are the exact derivatives of the discrete energies, so a
//! central-difference check agrees to quadrature accuracy, and the quartic
//! term differentiates to phi_u u (no 1/2).

use crate::coulomb::{square, CoulombSolver};
use crate::error::{Error, Result};
use crate::grid::{
    self, apply_laplacian, apply_neumann_laplacian, link_energy, neumann_link_energy, Grid3,
    RegionMask, ScalarField,
};
use crate::model::{self, ModelParams};
use crate::wells::{self, UpsilonSelection, WellGeometry, WellMasks};

/// Everything the functionals need: grid, geometry, masks, sampled a(x),
/// model constants and the shared Poisson solver.
pub struct Context {
    pub grid: Grid3,
    pub geometry: WellGeometry,
    pub upsilon: UpsilonSelection,
    pub masks: WellMasks,
    pub potential: ScalarField,
    pub params: ModelParams,
    pub coulomb: CoulombSolver,
}

impl Context {
    pub fn new(
        grid: Grid3,
        geometry: WellGeometry,
        upsilon: UpsilonSelection,
        params: ModelParams,
    ) -> Result<Self> {
        if let Some(&idx) = upsilon.indices().iter().find(|&&i| i >= geometry.k()) {
            return Err(Error::UpsilonIndexOutOfRange {
                idx,
                k: geometry.k(),
            });
        }
        let masks = wells::masks(&geometry, grid, &upsilon);
        for &j in upsilon.indices() {
            if masks.omega[j].count() == 0 {
                return Err(Error::InvalidParam(format!(
                    "well {j} contains no grid points at this resolution"
                )));
            }
        }
        let potential = wells::sample_potential(&geometry, grid);
        let coulomb = CoulombSolver::new(grid);
        Ok(Context {
            grid,
            geometry,
            upsilon,
            masks,
            potential,
            params,
            coulomb,
        })
    }

    /// Component masks of the selected wells, in Upsilon order:
    /// Omega_j for the limit problem, Omega'_j for the Neumann one.
    pub fn component_masks(&self, kind: FunctionalKind) -> Vec<&RegionMask> {
        let source = match kind {
            FunctionalKind::NeumannPenalized { .. } => &self.masks.omega_prime,
            _ => &self.masks.omega,
        };
        self.upsilon.indices().iter().map(|&j| &source[j]).collect()
    }
}

/// Which functional to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionalKind {
    Penalized { lambda: f64 },
    Limit,
    NeumannPenalized { lambda: f64 },
}

impl FunctionalKind {
    pub fn lambda(&self) -> f64 {
        match self {
            FunctionalKind::Penalized { lambda } => *lambda,
            FunctionalKind::Limit => 0.0,
            FunctionalKind::NeumannPenalized { lambda } => *lambda,
        }
    }
}

/// quadratic = 1/2 ||u||^2 over the relevant region, nonlocal = 1/4 int phi u^2,
/// potential = int G (or F); total = quadratic + nonlocal - potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub quadratic: f64,
    pub nonlocal: f64,
    pub potential: f64,
    pub total: f64,
}

fn domain_mask<'c>(ctx: &'c Context, kind: FunctionalKind) -> Option<&'c RegionMask> {
    match kind {
        FunctionalKind::Penalized { .. } => None,
        FunctionalKind::Limit => Some(&ctx.masks.omega_upsilon),
        FunctionalKind::NeumannPenalized { .. } => Some(&ctx.masks.omega_prime_upsilon),
    }
}

/// Reject fields carrying mass outside the functional's admissible region.
fn check_admissible(ctx: &Context, kind: FunctionalKind, u: &ScalarField) -> Result<()> {
    if u.grid() != ctx.grid {
        return Err(Error::GridMismatch);
    }
    if let Some(mask) = domain_mask(ctx, kind) {
        let outside = grid::weighted_l2_sq(u, None, Some(&mask.complement()));
        let total = grid::weighted_l2_sq(u, None, None);
        if outside > 1e-20 * total.max(f64::MIN_POSITIVE) {
            return Err(Error::MassOutsideRegion(outside.sqrt()));
        }
    }
    Ok(())
}

/// The quadratic form ||u||^2 of `kind` (twice the quadratic energy part).
pub fn quad_form(ctx: &Context, kind: FunctionalKind, u: &ScalarField) -> f64 {
    let h3 = ctx.grid.cell_volume();
    match kind {
        FunctionalKind::Penalized { lambda } => {
            let mut s = 0.0;
            for (uv, av) in u.values().iter().zip(ctx.potential.values()) {
                s += (lambda * av + 1.0) * uv * uv;
            }
            link_energy(u) + s * h3
        }
        FunctionalKind::Limit => link_energy(u) + grid::weighted_l2_sq(u, None, None),
        FunctionalKind::NeumannPenalized { lambda } => {
            let mask = &ctx.masks.omega_prime_upsilon;
            let mut s = 0.0;
            for idx in 0..ctx.grid.len() {
                if mask.contains(idx) {
                    let uv = u.values()[idx];
                    s += (lambda * ctx.potential.values()[idx] + 1.0) * uv * uv;
                }
            }
            neumann_link_energy(u, mask).expect("same grid") + s * h3
        }
    }
}

fn potential_term(ctx: &Context, kind: FunctionalKind, u: &ScalarField) -> f64 {
    let p = &ctx.params;
    let h3 = ctx.grid.cell_volume();
    let mut s = 0.0;
    match kind {
        FunctionalKind::Penalized { .. } => {
            for (uv, cv) in u.values().iter().zip(ctx.masks.chi.values()) {
                s += model::big_g_eval(*cv == 1.0, *uv, p);
            }
        }
        _ => {
            // masked fields: F(0) = 0 off the region
            for uv in u.values() {
                s += model::big_f_eval(*uv, p);
            }
        }
    }
    s * h3
}

/// Energy with a precomputed phi_u (phi must belong to the same u).
pub fn energy_with_phi(
    ctx: &Context,
    kind: FunctionalKind,
    u: &ScalarField,
    phi: &ScalarField,
) -> EnergyBreakdown {
    let quadratic = 0.5 * quad_form(ctx, kind, u);
    let nonlocal = 0.25 * grid::inner(phi, &square(u));
    let potential = potential_term(ctx, kind, u);
    EnergyBreakdown {
        quadratic,
        nonlocal,
        potential,
        total: quadratic + nonlocal - potential,
    }
}

/// Evaluate the functional `kind` at `u`.
pub fn energy(ctx: &Context, kind: FunctionalKind, u: &ScalarField) -> Result<EnergyBreakdown> {
    check_admissible(ctx, kind, u)?;
    let phi = ctx.coulomb.poisson_fft(u)?;
    Ok(energy_with_phi(ctx, kind, u, &phi))
}

/// Gradient with precomputed phi_u. For the masked functionals the gradient
/// is restricted to the admissible region (hard Dirichlet masking).
pub fn grad_with_phi(
    ctx: &Context,
    kind: FunctionalKind,
    u: &ScalarField,
    phi: &ScalarField,
) -> ScalarField {
    let p = &ctx.params;
    match kind {
        FunctionalKind::Penalized { lambda } => {
            let mut out = apply_laplacian(u);
            let ov = out.values_mut();
            for idx in 0..u.values().len() {
                let uv = u.values()[idx];
                let inside = ctx.masks.chi.values()[idx] == 1.0;
                ov[idx] = -ov[idx]
                    + (lambda * ctx.potential.values()[idx] + 1.0) * uv
                    + phi.values()[idx] * uv
                    - model::g_eval(inside, uv, p);
            }
            out
        }
        FunctionalKind::Limit => {
            let mask = &ctx.masks.omega_upsilon;
            let mut out = apply_laplacian(u);
            let ov = out.values_mut();
            for idx in 0..u.values().len() {
                if mask.contains(idx) {
                    let uv = u.values()[idx];
                    ov[idx] = -ov[idx] + uv + phi.values()[idx] * uv - model::f_eval(uv, p);
                } else {
                    ov[idx] = 0.0;
                }
            }
            out
        }
        FunctionalKind::NeumannPenalized { lambda } => {
            let mask = &ctx.masks.omega_prime_upsilon;
            let mut out = apply_neumann_laplacian(u, mask).expect("same grid");
            let ov = out.values_mut();
            for idx in 0..u.values().len() {
                if mask.contains(idx) {
                    let uv = u.values()[idx];
                    ov[idx] = -ov[idx]
                        + (lambda * ctx.potential.values()[idx] + 1.0) * uv
                        + phi.values()[idx] * uv
                        - model::f_eval(uv, p);
                } else {
                    ov[idx] = 0.0;
                }
            }
            out
        }
    }
}

/// L2 gradient of the functional at u; critical points have residual ~ 0.
pub fn grad(ctx: &Context, kind: FunctionalKind, u: &ScalarField) -> Result<ScalarField> {
    check_admissible(ctx, kind, u)?;
    let phi = ctx.coulomb.poisson_fft(u)?;
    Ok(grad_with_phi(ctx, kind, u, &phi))
}

/// Per-component Nehari residuals <grad(u), u chi_j> for a disjoint partition.
pub fn constraint_values(
    ctx: &Context,
    kind: FunctionalKind,
    u: &ScalarField,
    partition: &[&RegionMask],
) -> Result<Vec<f64>> {
    for (i, a) in partition.iter().enumerate() {
        if a.grid() != ctx.grid {
            return Err(Error::GridMismatch);
        }
        for b in partition.iter().skip(i + 1) {
            if a.intersects(b) {
                return Err(Error::OverlappingMasks);
            }
        }
    }
    let g = grad(ctx, kind, u)?;
    let h3 = ctx.grid.cell_volume();
    Ok(partition
        .iter()
        .map(|m| {
            let mut s = 0.0;
            for idx in 0..ctx.grid.len() {
                if m.contains(idx) {
                    s += g.values()[idx] * u.values()[idx];
                }
            }
            s * h3
        })
        .collect())
}

/// Same residuals from a precomputed gradient field.
pub fn constraint_values_from_grad(
    ctx: &Context,
    gradient: &ScalarField,
    u: &ScalarField,
    partition: &[&RegionMask],
) -> Vec<f64> {
    let h3 = ctx.grid.cell_volume();
    partition
        .iter()
        .map(|m| {
            let mut s = 0.0;
            for idx in 0..ctx.grid.len() {
                if m.contains(idx) {
                    s += gradient.values()[idx] * u.values()[idx];
                }
            }
            s * h3
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::wells::Ball;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn test_context(n: usize) -> Context {
        let grid = build_grid(n, 4.0).unwrap();
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
        let upsilon = UpsilonSelection::new(vec![0, 1], 2).unwrap();
        let params = ModelParams::new(4.0, 0.5).unwrap();
        Context::new(grid, geometry, upsilon, params).unwrap()
    }

    fn bump_in_well(ctx: &Context, j: usize, amp: f64) -> ScalarField {
        let c = ctx.geometry.wells[j].center;
        let r = ctx.geometry.wells[j].radius;
        ScalarField::from_fn(ctx.grid, move |x, y, z| {
            let d2 = (x - c[0]).powi(2) + (y - c[1]).powi(2) + (z - c[2]).powi(2);
            amp * (1.0 - d2 / (r * r)).max(0.0).powi(2)
        })
        .masked(&ctx.masks.omega[j])
        .unwrap()
    }

    #[test]
    fn zero_field_all_parts_zero() {
        let ctx = test_context(16);
        let z = ScalarField::zeros(ctx.grid);
        for kind in [
            FunctionalKind::Penalized { lambda: 3.0 },
            FunctionalKind::Limit,
            FunctionalKind::NeumannPenalized { lambda: 3.0 },
        ] {
            let e = energy(&ctx, kind, &z).unwrap();
            assert_eq!(
                (e.quadratic, e.nonlocal, e.potential, e.total),
                (0.0, 0.0, 0.0, 0.0)
            );
        }
    }

    #[test]
    fn breakdown_sums() {
        let ctx = test_context(16);
        let u = bump_in_well(&ctx, 0, 1.3);
        let e = energy(&ctx, FunctionalKind::Penalized { lambda: 2.0 }, &u).unwrap();
        let recomposed = e.quadratic + e.nonlocal - e.potential;
        assert!((e.total - recomposed).abs() <= 1e-12 * e.total.abs().max(1.0));
    }

    #[test]
    fn supported_in_wells_penalized_equals_limit_and_neumann() {
        let ctx = test_context(16);
        let u = bump_in_well(&ctx, 0, 1.1)
            .axpy(1.0, &bump_in_well(&ctx, 1, 0.7))
            .unwrap();
        let ej = energy(&ctx, FunctionalKind::Limit, &u).unwrap().total;
        for lam in [1.0, 10.0, 100.0] {
            let ep = energy(&ctx, FunctionalKind::Penalized { lambda: lam }, &u)
                .unwrap()
                .total;
            assert!(
                (ep - ej).abs() <= 1e-12 * ej.abs().max(1.0),
                "lambda={lam}: {ep} vs {ej}"
            );
            let en = energy(&ctx, FunctionalKind::NeumannPenalized { lambda: lam }, &u)
                .unwrap()
                .total;
            assert!((en - ej).abs() <= 1e-12 * ej.abs().max(1.0));
        }
    }

    #[test]
    fn penalized_energy_increases_in_lambda() {
        let ctx = test_context(16);
        // support meeting {a > 0}: a wide bump spilling out of the well
        let u = ScalarField::from_fn(ctx.grid, |x, y, z| {
            let d2 = (x + 1.9).powi(2) + y * y + z * z;
            (1.0 - d2 / 4.0).max(0.0).powi(2)
        });
        let e1 = energy(&ctx, FunctionalKind::Penalized { lambda: 1.0 }, &u)
            .unwrap()
            .total;
        let e10 = energy(&ctx, FunctionalKind::Penalized { lambda: 10.0 }, &u)
            .unwrap()
            .total;
        let e100 = energy(&ctx, FunctionalKind::Penalized { lambda: 100.0 }, &u)
            .unwrap()
            .total;
        assert!(e1 < e10 && e10 < e100);
    }

    #[test]
    fn limit_rejects_mass_outside() {
        let ctx = test_context(16);
        let u = ScalarField::constant(ctx.grid, 0.5);
        assert!(matches!(
            energy(&ctx, FunctionalKind::Limit, &u),
            Err(Error::MassOutsideRegion(_))
        ));
    }

    fn fd_check(ctx: &Context, kind: FunctionalKind, u: &ScalarField, v: &ScalarField) -> f64 {
        let eps = 1e-4;
        let ep = energy_with_phi(
            ctx,
            kind,
            &v.scaled(eps).axpy(1.0, u).unwrap(),
            &ctx.coulomb
                .poisson_fft(&v.scaled(eps).axpy(1.0, u).unwrap())
                .unwrap(),
        )
        .total;
        let em = energy_with_phi(
            ctx,
            kind,
            &v.scaled(-eps).axpy(1.0, u).unwrap(),
            &ctx.coulomb
                .poisson_fft(&v.scaled(-eps).axpy(1.0, u).unwrap())
                .unwrap(),
        )
        .total;
        let fd = (ep - em) / (2.0 * eps);
        let g = grad(ctx, kind, u).unwrap();
        let exact = grid::inner(&g, v);
        (fd - exact).abs() / exact.abs().max(1e-12)
    }

    #[test]
    fn gradients_match_central_differences() {
        let ctx = test_context(14);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..4 {
            let u_free = ScalarField::from_fn(ctx.grid, |_, _, _| rng.gen_range(-0.6..1.2));
            let v_free = ScalarField::from_fn(ctx.grid, |_, _, _| rng.gen_range(-1.0..1.0));
            let r = fd_check(
                &ctx,
                FunctionalKind::Penalized { lambda: 7.0 },
                &u_free,
                &v_free,
            );
            assert!(r < 1e-5, "penalized trial {trial}: rel {r}");

            let um = u_free.masked(&ctx.masks.omega_upsilon).unwrap();
            let vm = v_free.masked(&ctx.masks.omega_upsilon).unwrap();
            let r = fd_check(&ctx, FunctionalKind::Limit, &um, &vm);
            assert!(r < 1e-5, "limit trial {trial}: rel {r}");

            let un = u_free.masked(&ctx.masks.omega_prime_upsilon).unwrap();
            let vn = v_free.masked(&ctx.masks.omega_prime_upsilon).unwrap();
            let r = fd_check(
                &ctx,
                FunctionalKind::NeumannPenalized { lambda: 7.0 },
                &un,
                &vn,
            );
            assert!(r < 1e-5, "neumann trial {trial}: rel {r}");
        }
    }

    #[test]
    fn small_amplitude_gradient_is_linear_part() {
        // with u tiny inside a well, phi u and f(u) are higher order and the
        // gradient collapses to (-lap + 1) u there
        let ctx = test_context(16);
        let u = bump_in_well(&ctx, 0, 1e-5);
        let g = grad(&ctx, FunctionalKind::Limit, &u).unwrap();
        let lap = apply_laplacian(&u);
        let mut worst = 0.0f64;
        for idx in 0..ctx.grid.len() {
            if ctx.masks.omega_upsilon.contains(idx) {
                let lin = -lap.values()[idx] + u.values()[idx];
                worst = worst.max((g.values()[idx] - lin).abs());
            }
        }
        assert!(worst <= 1e-9 * 1e-5, "nonlinear residue {worst}");
    }

    #[test]
    fn constraint_values_basics() {
        let ctx = test_context(16);
        let masks = ctx.component_masks(FunctionalKind::Limit);
        let z = ScalarField::zeros(ctx.grid);
        let c = constraint_values(&ctx, FunctionalKind::Limit, &z, &masks).unwrap();
        assert_eq!(c, vec![0.0, 0.0]);

        let u1 = bump_in_well(&ctx, 0, 1.0);
        let c = constraint_values(&ctx, FunctionalKind::Limit, &u1, &masks).unwrap();
        assert_eq!(c[1], 0.0);
        assert!(c[0] != 0.0);

        // <grad, u> equals the single full-domain constraint
        let g = grad(&ctx, FunctionalKind::Limit, &u1).unwrap();
        let full = grid::RegionMask::all(ctx.grid);
        let total = constraint_values_from_grad(&ctx, &g, &u1, &[&full])[0];
        let direct = grid::inner(&g, &u1);
        assert!((total - direct).abs() <= 1e-12 * direct.abs().max(1e-30));

        // overlapping masks rejected
        let overlapping = vec![&ctx.masks.omega_upsilon, &ctx.masks.omega[0]];
        assert!(matches!(
            constraint_values(&ctx, FunctionalKind::Limit, &u1, &overlapping),
            Err(Error::OverlappingMasks)
        ));
    }
}
