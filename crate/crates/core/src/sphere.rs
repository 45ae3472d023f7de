//! Equal-area partition of the unit sphere with an antipodally closed node set.
//!
//! The upper hemisphere is cut into `order` latitude bands whose edges sit at
//! `z = 1 - i²/order²`; band `i` (counted from the pole) holds `4(2i-1)` cells of
//! equal azimuthal width, so every cell has area `π / (2 order²)`. The lower
//! hemisphere is the point reflection of the upper one, which makes the node
//! set closed under `v ↦ -v` and integrates every odd function exactly.

use crate::geometry::Vec3;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct SpherePartition {
    directions: Vec<Vec3>,
    area: f64,
}

impl SpherePartition {
    /// Panics if `order == 0`.
    pub fn new(order: usize) -> Self {
        assert!(order > 0, "sphere partition order must be positive");
        let n = order as f64;
        let mut upper = Vec::with_capacity(4 * order * order);
        for band in 1..=order {
            let i = band as f64;
            let z_top = 1.0 - (i - 1.0) * (i - 1.0) / (n * n);
            let z_bottom = 1.0 - i * i / (n * n);
            let z = 0.5 * (z_top + z_bottom);
            let s = (1.0 - z * z).max(0.0).sqrt();
            let cells = 4 * (2 * band - 1);
            for j in 0..cells {
                let phi = (j as f64 + 0.5) * 2.0 * PI / cells as f64;
                upper.push(Vec3::new(s * phi.cos(), s * phi.sin(), z));
            }
        }
        let lower: Vec<Vec3> = upper.iter().map(|&d| -d).collect();
        let mut directions = upper;
        directions.extend(lower);
        Self {
            directions,
            area: PI / (2.0 * n * n),
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    /// Solid angle of each cell.
    pub fn cell_area(&self) -> f64 {
        self.area
    }

    /// Index of the reflected node `-d`.
    pub fn antipode(&self, index: usize) -> usize {
        let half = self.directions.len() / 2;
        if index < half {
            index + half
        } else {
            index - half
        }
    }
}
