use serde::Serialize;

use crate::error::{Error, Result};

/// Cell-centred radial finite-volume grid on `[0, R_max]` in `ℝᴺ`.
///
/// Cell `j` spans `[jh, (j+1)h]` with centre `(j + 1/2)h`; no node sits at
/// the origin. Weights are exact shell volumes and face areas are exact
/// sphere areas, so flat data integrate exactly up to rounding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid {
    r_max: f64,
    cells: usize,
    dim: usize,
    h: f64,
    #[serde(skip)]
    centers: Vec<f64>,
    #[serde(skip)]
    weights: Vec<f64>,
    /// `cells + 1` face areas; face 0 is the origin.
    #[serde(skip)]
    face_areas: Vec<f64>,
}

impl RadialGrid {
    pub fn new(r_max: f64, cells: usize, dim: usize) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "r_max",
                value: r_max,
                reason: "domain radius must be positive and finite".into(),
            });
        }
        if cells == 0 {
            return Err(Error::InvalidParameter {
                name: "cells",
                value: 0.0,
                reason: "at least one cell is required".into(),
            });
        }
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                value: 0.0,
                reason: "space dimension must be at least 1".into(),
            });
        }
        let h = r_max / cells as f64;
        let omega = unit_sphere_area(dim);
        let n = dim as i32;
        let centers = (0..cells).map(|j| (j as f64 + 0.5) * h).collect();
        let weights = (0..cells)
            .map(|j| {
                let lo = j as f64 * h;
                let hi = (j + 1) as f64 * h;
                omega * (hi.powi(n) - lo.powi(n)) / dim as f64
            })
            .collect();
        let face_areas = (0..=cells)
            .map(|f| omega * (f as f64 * h).powi(n - 1))
            .collect();
        Ok(Self {
            r_max,
            cells,
            dim,
            h,
            centers,
            weights,
            face_areas,
        })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn face_areas(&self) -> &[f64] {
        &self.face_areas
    }

    /// `Σ w_j`, equal to the volume of `B(0, R_max)` up to rounding.
    pub fn volume(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Same domain and dimension with a different cell count.
    pub fn with_cells(&self, cells: usize) -> Result<Self> {
        Self::new(self.r_max, cells, self.dim)
    }
}

/// Surface area `ω_N = 2π^{N/2}/Γ(N/2)` of the unit sphere in `ℝᴺ`
/// (`ω_1 = 2`, `ω_2 = 2π`, `ω_3 = 4π`).
pub fn unit_sphere_area(dim: usize) -> f64 {
    use std::f64::consts::PI;
    2.0 * PI.powf(dim as f64 / 2.0) / gamma_half_integer(dim)
}

/// `Γ(n/2)` for a positive integer `n`, from `Γ(1/2) = √π`, `Γ(1) = 1` and
/// `Γ(x + 1) = xΓ(x)`.
fn gamma_half_integer(n: usize) -> f64 {
    let (mut x, mut g) = if n.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (0.5, std::f64::consts::PI.sqrt())
    };
    while 2.0 * x < n as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(unit_sphere_area(1), 2.0, max_relative = 1e-15);
        assert_relative_eq!(unit_sphere_area(2), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(unit_sphere_area(3), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(unit_sphere_area(4), 2.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(unit_sphere_area(5), 8.0 * PI * PI / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn layout() {
        let g = RadialGrid::new(1.0, 4, 2).unwrap();
        assert_eq!(g.centers(), &[0.125, 0.375, 0.625, 0.875]);
        assert_eq!(g.face_areas().len(), 5);
        assert_eq!(g.face_areas()[0], 0.0);
        assert!(g.weights().iter().all(|&w| w > 0.0));
        assert_relative_eq!(g.volume(), PI, max_relative = 1e-14);
        let g1 = RadialGrid::new(2.0, 8, 1).unwrap();
        assert_relative_eq!(g1.volume(), 4.0, max_relative = 1e-15);
        assert_eq!(g1.face_areas()[0], 2.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(RadialGrid::new(0.0, 4, 1).is_err());
        assert!(RadialGrid::new(1.0, 0, 1).is_err());
        assert!(RadialGrid::new(1.0, 4, 0).is_err());
    }
}
