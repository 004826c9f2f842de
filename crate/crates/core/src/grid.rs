//! Sampling grids for sup-norm estimation.

use serde::{Deserialize, Serialize};

/// Per-coordinate sample counts plus the number of refinement levels used
/// for extrapolation-style upper estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Sample counts along the two surface coordinates.
    pub counts: [usize; 2],
    /// Refinement levels (each level doubles both counts).  Level 0 means a
    /// single grid.
    #[serde(default)]
    pub refine_levels: usize,
}

impl GridSpec {
    pub fn new(n0: usize, n1: usize) -> Self {
        GridSpec {
            counts: [n0, n1],
            refine_levels: 0,
        }
    }

    pub fn with_refinement(n0: usize, n1: usize, levels: usize) -> Self {
        GridSpec {
            counts: [n0, n1],
            refine_levels: levels,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.counts[0] < 2 || self.counts[1] < 2 {
            return Err(crate::Error::domain("grid counts must be >= 2"));
        }
        Ok(())
    }

    /// Grid refined `level` times (counts doubled per level).
    pub fn at_level(&self, level: usize) -> GridSpec {
        GridSpec {
            counts: [self.counts[0] << level, self.counts[1] << level],
            refine_levels: 0,
        }
    }

    pub fn total(&self) -> usize {
        self.counts[0] * self.counts[1]
    }

    pub fn describe(&self) -> String {
        format!("{}x{}", self.counts[0], self.counts[1])
    }
}

/// Axis-aligned rectangle in the plane used to window plane grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWindow {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl PlaneWindow {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        PlaneWindow { x0, x1, y0, y1 }
    }

    pub fn square(half_width: f64) -> Self {
        PlaneWindow {
            x0: -half_width,
            x1: half_width,
            y0: -half_width,
            y1: half_width,
        }
    }

    pub fn inflate(&self, pad: f64) -> Self {
        PlaneWindow {
            x0: self.x0 - pad,
            x1: self.x1 + pad,
            y0: self.y0 - pad,
            y1: self.y1 + pad,
        }
    }

    pub fn union(&self, other: &PlaneWindow) -> Self {
        PlaneWindow {
            x0: self.x0.min(other.x0),
            x1: self.x1.max(other.x1),
            y0: self.y0.min(other.y0),
            y1: self.y1.max(other.y1),
        }
    }

    pub fn diameter(&self) -> f64 {
        ((self.x1 - self.x0).powi(2) + (self.y1 - self.y0).powi(2)).sqrt()
    }
}

impl Default for PlaneWindow {
    fn default() -> Self {
        PlaneWindow::square(2.0)
    }
}
