//! Uniform Cartesian discretization of the truncated box [-L,L]^3.
//!
//! Nodes form the symmetric tensor lattice x_i = (2i - (n-1)) h/2 with
//! h = 2L/(n-1), stored x-fastest (index = ix + n*(iy + n*iz)). Each node owns
//! a cell of volume h^3 and integrals are plain rectangle sums over owned
//! cells, so `integrate` of the constant 1 returns (n h)^3, not (2L)^3.
//!
//! Gradient energies use the forward-difference link sum
//!     sum_links (u_a - u_b)^2 h  (+ ghost links with u = 0 outside the box),
//! which equals <(-Delta_h) u, u> h^3 for the 7-point Laplacian exactly. The
//! energies of the variational problems therefore differentiate to the same
//! stencils used for residuals, with no quadrature mismatch. For masked norms
//! the link sum is redistributed to nodes (half of each interior link to each
//! endpoint, ghost links wholly to their node), which keeps norm^2 additive
//! over any partition of the box.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform n^3 lattice on [-L,L]^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    n: usize,
    half_width: f64,
    spacing: f64,
}

impl Grid3 {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 8 {
            return Err(Error::GridTooCoarse(n));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::NonPositiveHalfWidth(half_width));
        }
        let spacing = 2.0 * half_width / (n - 1) as f64;
        Ok(Grid3 {
            n,
            half_width,
            spacing,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing * self.spacing * self.spacing
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of lattice index i along one axis. Symmetric by construction:
    /// coord(n-1-i) == -coord(i) exactly in floating point.
    pub fn coord(&self, i: usize) -> f64 {
        (2.0 * i as f64 - (self.n - 1) as f64) * (0.5 * self.spacing)
    }

    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        ix + self.n * (iy + self.n * iz)
    }

    /// Inverse of `index`.
    pub fn coords_of(&self, idx: usize) -> (usize, usize, usize) {
        let ix = idx % self.n;
        let iy = (idx / self.n) % self.n;
        let iz = idx / (self.n * self.n);
        (ix, iy, iz)
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let (ix, iy, iz) = self.coords_of(idx);
        [self.coord(ix), self.coord(iy), self.coord(iz)]
    }
}

/// Construct the lattice; rejects n < 8 and non-positive L.
pub fn build_grid(n: usize, half_width: f64) -> Result<Grid3> {
    Grid3::new(n, half_width)
}

/// Real scalar field sampled on a `Grid3`, x-fastest storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid3,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid3) -> Self {
        ScalarField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid3, c: f64) -> Self {
        ScalarField {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_values(grid: Grid3, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(ScalarField { grid, values })
    }

    pub fn from_fn(grid: Grid3, mut f: impl FnMut(f64, f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for iz in 0..n {
            let z = grid.coord(iz);
            for iy in 0..n {
                let y = grid.coord(iy);
                for ix in 0..n {
                    values.push(f(grid.coord(ix), y, z));
                }
            }
        }
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> Grid3 {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// a*x + y with x = self.
    pub fn axpy(&self, a: f64, y: &ScalarField) -> Result<ScalarField> {
        if self.grid != y.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&y.values)
            .map(|(x, y)| a * x + y)
            .collect();
        Ok(ScalarField {
            grid: self.grid,
            values,
        })
    }

    pub fn scaled(&self, a: f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }

    pub fn scale_in_place(&mut self, a: f64) {
        for v in &mut self.values {
            *v *= a;
        }
    }

    /// Zero out the negative part.
    pub fn clip_negative(&mut self) {
        for v in &mut self.values {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
    }

    /// Restrict to a mask (zero outside).
    pub fn masked(&self, mask: &RegionMask) -> Result<ScalarField> {
        if self.grid != mask.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(mask.inside.iter())
            .map(|(v, &m)| if m { *v } else { 0.0 })
            .collect();
        Ok(ScalarField {
            grid: self.grid,
            values,
        })
    }

    pub fn l2_norm(&self) -> f64 {
        (self
            .values
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            * self.grid.cell_volume())
        .sqrt()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Boolean subset of the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMask {
    grid: Grid3,
    inside: Vec<bool>,
}

impl RegionMask {
    pub fn from_fn(grid: Grid3, mut f: impl FnMut(f64, f64, f64) -> bool) -> Self {
        let n = grid.n();
        let mut inside = Vec::with_capacity(grid.len());
        for iz in 0..n {
            let z = grid.coord(iz);
            for iy in 0..n {
                let y = grid.coord(iy);
                for ix in 0..n {
                    inside.push(f(grid.coord(ix), y, z));
                }
            }
        }
        RegionMask { grid, inside }
    }

    pub fn all(grid: Grid3) -> Self {
        RegionMask {
            grid,
            inside: vec![true; grid.len()],
        }
    }

    pub fn grid(&self) -> Grid3 {
        self.grid
    }

    pub fn inside(&self) -> &[bool] {
        &self.inside
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.inside[idx]
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> RegionMask {
        RegionMask {
            grid: self.grid,
            inside: self.inside.iter().map(|b| !b).collect(),
        }
    }

    pub fn union(&self, other: &RegionMask) -> Result<RegionMask> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(RegionMask {
            grid: self.grid,
            inside: self
                .inside
                .iter()
                .zip(&other.inside)
                .map(|(a, b)| *a || *b)
                .collect(),
        })
    }

    pub fn intersects(&self, other: &RegionMask) -> bool {
        self.inside
            .iter()
            .zip(&other.inside)
            .any(|(a, b)| *a && *b)
    }

    /// True if every point of `self` lies in `other`.
    pub fn subset_of(&self, other: &RegionMask) -> bool {
        self.inside
            .iter()
            .zip(&other.inside)
            .all(|(a, b)| !*a || *b)
    }
}

/// Rectangle-rule integral, optionally restricted to a mask.
pub fn integrate(f: &ScalarField, mask: Option<&RegionMask>) -> Result<f64> {
    let mut s = 0.0;
    match mask {
        None => {
            for v in f.values() {
                s += v;
            }
        }
        Some(m) => {
            if m.grid != f.grid {
                return Err(Error::GridMismatch);
            }
            for (v, &inside) in f.values().iter().zip(m.inside.iter()) {
                if inside {
                    s += v;
                }
            }
        }
    }
    Ok(s * f.grid.cell_volume())
}

/// 7-point Laplacian with homogeneous Dirichlet ghost values outside the box.
pub fn apply_laplacian(u: &ScalarField) -> ScalarField {
    let grid = u.grid;
    let n = grid.n();
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let v = u.values();
    let mut out = vec![0.0; v.len()];
    let n2 = n * n;
    for iz in 0..n {
        for iy in 0..n {
            let row = n * (iy + n * iz);
            for ix in 0..n {
                let idx = row + ix;
                let c = v[idx];
                let xm = if ix > 0 { v[idx - 1] } else { 0.0 };
                let xp = if ix + 1 < n { v[idx + 1] } else { 0.0 };
                let ym = if iy > 0 { v[idx - n] } else { 0.0 };
                let yp = if iy + 1 < n { v[idx + n] } else { 0.0 };
                let zm = if iz > 0 { v[idx - n2] } else { 0.0 };
                let zp = if iz + 1 < n { v[idx + n2] } else { 0.0 };
                out[idx] = ((xm + xp) + (ym + yp) + (zm + zp) - 6.0 * c) * inv_h2;
            }
        }
    }
    ScalarField {
        grid,
        values: out,
    }
}

/// Full-box link sum: sum over interior and ghost links of (du)^2 * h.
/// Equals <(-Delta_h) u, u> h^3 up to floating-point reassociation.
pub fn link_energy(u: &ScalarField) -> f64 {
    let grid = u.grid;
    let n = grid.n();
    let v = u.values();
    let n2 = n * n;
    let mut s = 0.0;
    for iz in 0..n {
        for iy in 0..n {
            let row = n * (iy + n * iz);
            for ix in 0..n {
                let idx = row + ix;
                let c = v[idx];
                // forward links; ghost value 0 past the last plane
                let dx = if ix + 1 < n { v[idx + 1] - c } else { -c };
                let dy = if iy + 1 < n { v[idx + n] - c } else { -c };
                let dz = if iz + 1 < n { v[idx + n2] - c } else { -c };
                s += dx * dx + dy * dy + dz * dz;
                // ghost links on the low faces
                if ix == 0 {
                    s += c * c;
                }
                if iy == 0 {
                    s += c * c;
                }
                if iz == 0 {
                    s += c * c;
                }
            }
        }
    }
    s * grid.spacing()
}

/// Per-node gradient-energy density: half of each interior link to each
/// endpoint, ghost links wholly to their node. Summed over all nodes this
/// reproduces `link_energy`; summed over a mask it defines the masked norms.
pub fn grad_energy_density(u: &ScalarField) -> ScalarField {
    let grid = u.grid;
    let n = grid.n();
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let v = u.values();
    let n2 = n * n;
    let mut out = vec![0.0; v.len()];
    for iz in 0..n {
        for iy in 0..n {
            let row = n * (iy + n * iz);
            for ix in 0..n {
                let idx = row + ix;
                let c = v[idx];
                let mut acc = 0.0;
                // each direction contributes half a link (full for ghosts)
                let terms = [
                    (ix > 0, if ix > 0 { v[idx - 1] } else { 0.0 }),
                    (ix + 1 < n, if ix + 1 < n { v[idx + 1] } else { 0.0 }),
                    (iy > 0, if iy > 0 { v[idx - n] } else { 0.0 }),
                    (iy + 1 < n, if iy + 1 < n { v[idx + n] } else { 0.0 }),
                    (iz > 0, if iz > 0 { v[idx - n2] } else { 0.0 }),
                    (iz + 1 < n, if iz + 1 < n { v[idx + n2] } else { 0.0 }),
                ];
                for (interior, nb) in terms {
                    let d = nb - c;
                    acc += if interior { 0.5 * d * d } else { d * d };
                }
                out[idx] = acc * inv_h2;
            }
        }
    }
    ScalarField {
        grid,
        values: out,
    }
}

/// The weighted norm ||u||_{lambda,O} = (int_O |grad u|^2 + (lambda a + 1) u^2)^(1/2)
/// with the link-based gradient density described in the module docs.
pub fn norm_lambda(
    u: &ScalarField,
    a: &ScalarField,
    lambda: f64,
    mask: Option<&RegionMask>,
) -> Result<f64> {
    if u.grid != a.grid {
        return Err(Error::GridMismatch);
    }
    if lambda < 0.0 {
        return Err(Error::NegativeLambda(lambda));
    }
    if let Some(&bad) = a.values().iter().find(|v| **v < 0.0) {
        return Err(Error::NegativePotential(bad));
    }
    if let Some(m) = mask {
        if m.grid != u.grid {
            return Err(Error::GridMismatch);
        }
    }
    let dens = grad_energy_density(u);
    let h3 = u.grid.cell_volume();
    let mut s = 0.0;
    for idx in 0..u.grid.len() {
        if let Some(m) = mask {
            if !m.inside[idx] {
                continue;
            }
        }
        let uv = u.values[idx];
        s += dens.values[idx] + (lambda * a.values[idx] + 1.0) * uv * uv;
    }
    Ok((s * h3).sqrt())
}

/// Link sum restricted to links with both endpoints in `mask` (no boundary
/// penalty: the form of the Neumann problem on the masked region).
pub fn neumann_link_energy(u: &ScalarField, mask: &RegionMask) -> Result<f64> {
    if u.grid != mask.grid {
        return Err(Error::GridMismatch);
    }
    let grid = u.grid;
    let n = grid.n();
    let v = u.values();
    let m = mask.inside();
    let n2 = n * n;
    let mut s = 0.0;
    for iz in 0..n {
        for iy in 0..n {
            let row = n * (iy + n * iz);
            for ix in 0..n {
                let idx = row + ix;
                if !m[idx] {
                    continue;
                }
                let c = v[idx];
                if ix + 1 < n && m[idx + 1] {
                    let d = v[idx + 1] - c;
                    s += d * d;
                }
                if iy + 1 < n && m[idx + n] {
                    let d = v[idx + n] - c;
                    s += d * d;
                }
                if iz + 1 < n && m[idx + n2] {
                    let d = v[idx + n2] - c;
                    s += d * d;
                }
            }
        }
    }
    Ok(s * grid.spacing())
}

/// Laplacian of the masked region with natural (no-flux) treatment of links
/// leaving the mask; zero outside the mask. The exact gradient of
/// 0.5 * `neumann_link_energy`.
pub fn apply_neumann_laplacian(u: &ScalarField, mask: &RegionMask) -> Result<ScalarField> {
    if u.grid != mask.grid {
        return Err(Error::GridMismatch);
    }
    let grid = u.grid;
    let n = grid.n();
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let v = u.values();
    let m = mask.inside();
    let n2 = n * n;
    let mut out = vec![0.0; v.len()];
    for iz in 0..n {
        for iy in 0..n {
            let row = n * (iy + n * iz);
            for ix in 0..n {
                let idx = row + ix;
                if !m[idx] {
                    continue;
                }
                let c = v[idx];
                let mut acc = 0.0;
                if ix > 0 && m[idx - 1] {
                    acc += v[idx - 1] - c;
                }
                if ix + 1 < n && m[idx + 1] {
                    acc += v[idx + 1] - c;
                }
                if iy > 0 && m[idx - n] {
                    acc += v[idx - n] - c;
                }
                if iy + 1 < n && m[idx + n] {
                    acc += v[idx + n] - c;
                }
                if iz > 0 && m[idx - n2] {
                    acc += v[idx - n2] - c;
                }
                if iz + 1 < n && m[idx + n2] {
                    acc += v[idx + n2] - c;
                }
                out[idx] = acc * inv_h2;
            }
        }
    }
    Ok(ScalarField {
        grid,
        values: out,
    })
}

/// Sum of w * u^2 * h^3 over the mask (w = None means weight 1).
pub fn weighted_l2_sq(
    u: &ScalarField,
    w: Option<&ScalarField>,
    mask: Option<&RegionMask>,
) -> f64 {
    let mut s = 0.0;
    for idx in 0..u.grid.len() {
        if let Some(m) = mask {
            if !m.inside[idx] {
                continue;
            }
        }
        let uv = u.values[idx];
        let wv = w.map_or(1.0, |w| w.values[idx]);
        s += wv * uv * uv;
    }
    s * u.grid.cell_volume()
}

/// <f, g> = int f g dx on the full box.
pub fn inner(f: &ScalarField, g: &ScalarField) -> f64 {
    debug_assert_eq!(f.grid, g.grid);
    f.values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        * f.grid.cell_volume()
}
