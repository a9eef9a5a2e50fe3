//! Potential wells: the zero set of a(x) as a union of disjoint closed balls,
//! their enlargements, the selected subset Upsilon, and the derived masks.
//!
//! a(x) = a_max * min(1, dist(x, union of wells) / ramp_width) is continuous,
//! vanishes exactly on the closed wells and is strictly positive outside
//! them, saturating at a_max one ramp width away.

use crate::error::{Error, Result};
use crate::grid::{Grid3, RegionMask, ScalarField};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Ball {
    pub center: [f64; 3],
    pub radius: f64,
}

impl Ball {
    fn dist_to_surface(&self, x: f64, y: f64, z: f64) -> f64 {
        let dx = x - self.center[0];
        let dy = y - self.center[1];
        let dz = z - self.center[2];
        (dx * dx + dy * dy + dz * dz).sqrt() - self.radius
    }
}

/// Disjoint well balls with enlargement margin and ramp data for a(x).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WellGeometry {
    pub wells: Vec<Ball>,
    /// Enlargement margin: Omega'_j is the ball with radius + margin.
    pub enlargement: f64,
    /// Plateau height of a(x).
    pub a_max: f64,
    /// Ramp width of a(x) off the wells.
    pub ramp_width: f64,
}

/// Validated construction: wells pairwise disjoint, enlargements pairwise
/// disjoint, all margins positive.
pub fn build_geometry(
    wells: Vec<Ball>,
    enlargement: f64,
    a_max: f64,
    ramp_width: f64,
) -> Result<WellGeometry> {
    if wells.is_empty() {
        return Err(Error::InvalidParam("at least one well is required".into()));
    }
    for (j, b) in wells.iter().enumerate() {
        if !(b.radius > 0.0) {
            return Err(Error::InvalidParam(format!(
                "well {j} has non-positive radius {}",
                b.radius
            )));
        }
        if b.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParam(format!("well {j} has non-finite center")));
        }
    }
    if !(enlargement > 0.0) {
        return Err(Error::InvalidParam(format!(
            "enlargement margin must be positive, got {enlargement}"
        )));
    }
    if !(a_max > 0.0) {
        return Err(Error::InvalidParam(format!(
            "plateau height must be positive, got {a_max}"
        )));
    }
    if !(ramp_width > 0.0) {
        return Err(Error::InvalidParam(format!(
            "ramp width must be positive, got {ramp_width}"
        )));
    }
    for i in 0..wells.len() {
        for j in i + 1..wells.len() {
            let d = {
                let a = wells[i].center;
                let b = wells[j].center;
                ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
            };
            let sep = d - wells[i].radius - wells[j].radius;
            if sep <= 0.0 {
                return Err(Error::WellsOverlap {
                    i,
                    j,
                    which: "wells",
                    sep,
                });
            }
            let sep_enl = sep - 2.0 * enlargement;
            if sep_enl <= 0.0 {
                return Err(Error::WellsOverlap {
                    i,
                    j,
                    which: "enlargements",
                    sep: sep_enl,
                });
            }
        }
    }
    Ok(WellGeometry {
        wells,
        enlargement,
        a_max,
        ramp_width,
    })
}

impl WellGeometry {
    pub fn k(&self) -> usize {
        self.wells.len()
    }

    /// Distance from a point to the union of closed wells (0 inside).
    pub fn dist_to_wells(&self, x: f64, y: f64, z: f64) -> f64 {
        self.wells
            .iter()
            .map(|b| b.dist_to_surface(x, y, z))
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }

    pub fn potential_at(&self, x: f64, y: f64, z: f64) -> f64 {
        let d = self.dist_to_wells(x, y, z);
        self.a_max * (d / self.ramp_width).min(1.0)
    }
}

/// Sample a(x) on the grid.
pub fn sample_potential(geometry: &WellGeometry, grid: Grid3) -> ScalarField {
    ScalarField::from_fn(grid, |x, y, z| geometry.potential_at(x, y, z))
}

/// Non-empty subset of well indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpsilonSelection {
    indices: Vec<usize>,
}

impl UpsilonSelection {
    pub fn new(mut indices: Vec<usize>, k: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::EmptyUpsilon);
        }
        if let Some(&idx) = indices.iter().find(|&&i| i >= k) {
            return Err(Error::UpsilonIndexOutOfRange { idx, k });
        }
        Ok(UpsilonSelection { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Grid masks for the wells, their enlargements, the selected unions, and the
/// indicator field chi of Omega'_Upsilon.
#[derive(Debug, Clone)]
pub struct WellMasks {
    pub omega: Vec<RegionMask>,
    pub omega_prime: Vec<RegionMask>,
    pub omega_upsilon: RegionMask,
    pub omega_prime_upsilon: RegionMask,
    pub chi: ScalarField,
}

pub fn masks(geometry: &WellGeometry, grid: Grid3, upsilon: &UpsilonSelection) -> WellMasks {
    let ball_mask = |b: &Ball, extra: f64| {
        let r = b.radius + extra;
        let r2 = r * r;
        RegionMask::from_fn(grid, |x, y, z| {
            let dx = x - b.center[0];
            let dy = y - b.center[1];
            let dz = z - b.center[2];
            dx * dx + dy * dy + dz * dz <= r2
        })
    };
    let omega: Vec<RegionMask> = geometry.wells.iter().map(|b| ball_mask(b, 0.0)).collect();
    let omega_prime: Vec<RegionMask> = geometry
        .wells
        .iter()
        .map(|b| ball_mask(b, geometry.enlargement))
        .collect();
    let mut omega_upsilon = RegionMask::from_fn(grid, |_, _, _| false);
    let mut omega_prime_upsilon = omega_upsilon.clone();
    for &j in upsilon.indices() {
        omega_upsilon = omega_upsilon.union(&omega[j]).expect("same grid");
        omega_prime_upsilon = omega_prime_upsilon.union(&omega_prime[j]).expect("same grid");
    }
    let mut chi = ScalarField::zeros(grid);
    for (v, &inside) in chi
        .values_mut()
        .iter_mut()
        .zip(omega_prime_upsilon.inside().iter())
    {
        *v = if inside { 1.0 } else { 0.0 };
    }
    WellMasks {
        omega,
        omega_prime,
        omega_upsilon,
        omega_prime_upsilon,
        chi,
    }
}
