//! Uniform 1-D grids shared by the stationary builders and the PDE solver.

use crate::error::{domain, Result};
use crate::reaction::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return domain(format!("grid needs x_min < x_max; got [{x_min}, {x_max}]"));
        }
        if n < 3 {
            return domain(format!("grid needs at least 3 points; got {n}"));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Default truncation for a given strip: ±(L + 40) at spacing ≈ h.
    /// The slowest tail rate is √α, so the boundary contamination at a
    /// classification window edge 20 units from the strip is exponentially
    /// small.
    pub fn default_for(p: &ModelParams, h: f64) -> Result<Self> {
        let half = p.half_width() + 40.0;
        Self::with_spacing(-half, half, h)
    }

    /// Grid over [x_min, x_max] with spacing as close to `h` as an integer
    /// point count allows.
    pub fn with_spacing(x_min: f64, x_max: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return domain(format!("grid spacing must be positive; got {h}"));
        }
        let n = ((x_max - x_min) / h).round() as usize + 1;
        Self::new(x_min, x_max, n.max(3))
    }

    #[inline]
    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.x_max
        } else {
            self.x_min + i as f64 * self.h()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// The grid must reach past the strip on both sides to host a profile or
    /// a simulation with the strip inside.
    pub fn check_covers_strip(&self, p: &ModelParams) -> Result<()> {
        let l = p.half_width();
        if self.x_min > -l - self.h() || self.x_max < l + self.h() {
            return domain(format!(
                "grid [{}, {}] does not cover the strip [-{l}, {l}] with margin",
                self.x_min, self.x_max
            ));
        }
        Ok(())
    }
}
