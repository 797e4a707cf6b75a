//! Discrete Radon projections of small square windows.
//!
//! A projection at angle θ assigns every pixel of a w×w window to exactly one
//! of w bins along the projection axis and sums intensities per bin. With
//! centered coordinates x = c − (w−1)/2 (rightward) and y = r − (w−1)/2
//! (downward, raster convention), a pixel's signed offset along the axis is
//! t = x·cosθ + y·sinθ, and its bin is
//!
//! ```text
//! round(t · (w−1) / (2·t_max)) + (w−1)/2,   t_max = (w−1)/2 · (|cosθ| + |sinθ|)
//! ```
//!
//! with ties rounded half away from zero. θ = 0° yields column sums, 90° row
//! sums; for w = 3 the diagonals at 45°/135° produce three-bin sums with an
//! equal three-pixel population per bin. Every pixel lands in exactly one bin
//! per angle, so each projection conserves the window's total intensity.

use crate::error::{Error, Result};
use crate::imaging::GrayImage;

/// Square pixel window sampled from an image.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    side: usize,
    values: Vec<f64>,
}

impl Window {
    /// Wraps a row-major w×w buffer. `side` must be odd and >= 3.
    pub fn from_values(side: usize, values: Vec<f64>) -> Result<Self> {
        if side < 3 || side % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "window side must be odd and >= 3, got {side}"
            )));
        }
        if values.len() != side * side {
            return Err(Error::InvalidInput(format!(
                "window buffer length {} does not match {side}x{side}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "non-finite intensity in window".into(),
            ));
        }
        Ok(Self { side, values })
    }

    /// Copies the w×w window anchored at (`row`, `col`) out of an image.
    pub fn from_image(img: &GrayImage, row: usize, col: usize, side: usize) -> Result<Self> {
        if row + side > img.height() || col + side > img.width() {
            return Err(Error::InvalidInput(format!(
                "window {side}x{side} at ({row}, {col}) exceeds {}x{} image",
                img.width(),
                img.height()
            )));
        }
        let mut values = Vec::with_capacity(side * side);
        for r in row..row + side {
            values.extend_from_slice(&img.row(r)[col..col + side]);
        }
        Self::from_values(side, values)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// One projection direction: per-bin line sums of a window.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    angle_deg: f64,
    bins: Vec<f64>,
}

impl Projection {
    pub fn angle_deg(&self) -> f64 {
        self.angle_deg
    }

    pub fn bins(&self) -> &[f64] {
        &self.bins
    }
}

/// Projections of one window at equidistant angles k·180°/n_P, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSet {
    side: usize,
    projections: Vec<Projection>,
}

impl ProjectionSet {
    pub fn n_projections(&self) -> usize {
        self.projections.len()
    }

    /// Window side length shared by all projections.
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn projections(&self) -> &[Projection] {
        &self.projections
    }
}

/// The angle of projection `k` out of `n_p` equidistant directions.
#[inline]
pub(crate) fn projection_angle(k: usize, n_p: usize) -> f64 {
    k as f64 * 180.0 / n_p as f64
}

/// Bin index for every pixel of a w×w window at the given angle, row-major.
/// Depends only on the geometry, so callers sweeping many windows compute it
/// once per angle.
pub(crate) fn bin_table(side: usize, angle_deg: f64) -> Vec<usize> {
    let theta = angle_deg.to_radians();
    let cos = theta.cos();
    let sin = theta.sin();
    let half = (side as f64 - 1.0) / 2.0;
    let t_max = half * (cos.abs() + sin.abs());
    let mut table = Vec::with_capacity(side * side);
    for r in 0..side {
        let y = r as f64 - half;
        for c in 0..side {
            let x = c as f64 - half;
            let t = x * cos + y * sin;
            // f64::round ties away from zero, the tie rule this mapping needs.
            let bin = ((t * (side as f64 - 1.0) / (2.0 * t_max)).round() + half) as usize;
            debug_assert!(bin < side);
            table.push(bin.min(side - 1));
        }
    }
    table
}

/// Projects a window at one angle in `[0°, 180°)`.
pub fn project_window(window: &Window, angle_deg: f64) -> Result<Projection> {
    if !(0.0..180.0).contains(&angle_deg) {
        return Err(Error::InvalidInput(format!(
            "projection angle must be in [0, 180), got {angle_deg}"
        )));
    }
    let table = bin_table(window.side, angle_deg);
    let mut bins = vec![0.0; window.side];
    for (value, &bin) in window.values.iter().zip(&table) {
        bins[bin] += value;
    }
    Ok(Projection { angle_deg, bins })
}

/// Projects a window at `n_p` equidistant angles k·180°/n_P, k = 0..n_P−1.
/// The default n_P = 4 yields 0°, 45°, 90°, 135°.
pub fn project_all(window: &Window, n_p: usize) -> Result<ProjectionSet> {
    if n_p < 2 {
        return Err(Error::InvalidInput(format!(
            "projection count must be >= 2, got {n_p}"
        )));
    }
    let projections = (0..n_p)
        .map(|k| project_window(window, projection_angle(k, n_p)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProjectionSet {
        side: window.side,
        projections,
    })
}
