//! Beam-shape diagnostics shared by tests and scenario runners: azimuthal
//! petal counting, second-moment beam sizes, peak-width measurement and
//! phase-slope fits.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::SampledField;

/// Azimuthal structure of the brightest ring of an intensity pattern.
#[derive(Debug, Clone)]
pub struct RingMaxima {
    /// Radius of the brightest ring, meters.
    pub ring_radius: f64,
    /// Angles (radians, in [0, 2π)) of the local intensity maxima along the
    /// ring.
    pub angles: Vec<f64>,
}

impl RingMaxima {
    pub fn count(&self) -> usize {
        self.angles.len()
    }
}

fn bilinear_f64(data: &Array2<f64>, fx: f64, fy: f64) -> f64 {
    let n = data.nrows();
    if fx < 0.0 || fy < 0.0 || fx > (n - 1) as f64 || fy > (n - 1) as f64 {
        return 0.0;
    }
    let ix = (fx.floor() as usize).min(n - 2);
    let iy = (fy.floor() as usize).min(n - 2);
    let tx = fx - ix as f64;
    let ty = fy - iy as f64;
    data[(iy, ix)] * (1.0 - tx) * (1.0 - ty)
        + data[(iy, ix + 1)] * tx * (1.0 - ty)
        + data[(iy + 1, ix)] * (1.0 - tx) * ty
        + data[(iy + 1, ix + 1)] * tx * ty
}

/// Count the azimuthal intensity maxima along the brightest ring.
///
/// The ring radius is taken from the global intensity maximum; the ring is
/// then sampled at `samples` azimuthal points and strict local maxima above
/// half the ring peak are counted (with wraparound).
pub fn count_ring_maxima(field: &SampledField, samples: usize) -> Result<RingMaxima> {
    if samples < 8 {
        return Err(Error::Domain {
            name: "samples",
            value: samples as f64,
        });
    }
    let intensity = field.intensity();
    let grid = &field.grid;
    let mut peak = 0.0;
    let mut peak_pos = (0usize, 0usize);
    for ((row, col), &value) in intensity.indexed_iter() {
        if value > peak {
            peak = value;
            peak_pos = (row, col);
        }
    }
    if peak <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let ring_radius = grid.x(peak_pos.1).hypot(grid.y(peak_pos.0));

    let n = grid.n;
    let ring: Vec<f64> = (0..samples)
        .map(|k| {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
            let x = ring_radius * phi.cos();
            let y = ring_radius * phi.sin();
            let fx = (x - grid.center_x) / grid.pitch + (n / 2) as f64;
            let fy = (y - grid.center_y) / grid.pitch + (n / 2) as f64;
            bilinear_f64(&intensity, fx, fy)
        })
        .collect();
    let ring_peak = ring.iter().copied().fold(0.0, f64::max);
    let threshold = 0.5 * ring_peak;

    let mut angles = Vec::new();
    for k in 0..samples {
        let prev = ring[(k + samples - 1) % samples];
        let here = ring[k];
        let next = ring[(k + 1) % samples];
        if here > threshold && here > prev && here > next {
            angles.push(2.0 * std::f64::consts::PI * k as f64 / samples as f64);
        }
    }
    Ok(RingMaxima {
        ring_radius,
        angles,
    })
}

/// Second-moment (D4σ) beam diameter, averaged over the two transverse
/// axes. For an LG(p=0, l) beam this equals `2 w √(|l|+1)`.
pub fn d4sigma_diameter(field: &SampledField) -> Result<f64> {
    let intensity = field.intensity();
    let grid = &field.grid;
    let total: f64 = intensity.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let mut cx = 0.0;
    let mut cy = 0.0;
    for ((row, col), &value) in intensity.indexed_iter() {
        cx += value * grid.x(col);
        cy += value * grid.y(row);
    }
    cx /= total;
    cy /= total;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for ((row, col), &value) in intensity.indexed_iter() {
        let dx = grid.x(col) - cx;
        let dy = grid.y(row) - cy;
        var_x += value * dx * dx;
        var_y += value * dy * dy;
    }
    var_x /= total;
    var_y /= total;
    Ok(2.0 * (var_x.sqrt() + var_y.sqrt()))
}

/// Least-squares slope of `phase = slope · order` through the origin.
pub fn fit_phase_slope(orders: &[f64], phases: &[f64]) -> Result<f64> {
    if orders.len() != phases.len() || orders.is_empty() {
        return Err(Error::EmptyPath);
    }
    let num: f64 = orders.iter().zip(phases).map(|(o, p)| o * p).sum();
    let den: f64 = orders.iter().map(|o| o * o).sum();
    if den == 0.0 {
        return Err(Error::ZeroPower);
    }
    Ok(num / den)
}

/// Full width at half maximum of the tallest peak of a sampled curve, by
/// linear interpolation of the half-maximum crossings on both flanks.
/// `None` when a flank never drops below half maximum inside the range.
pub fn fwhm_of_sampled_peak(axis: &[f64], values: &[f64]) -> Option<f64> {
    if axis.len() != values.len() || axis.len() < 3 {
        return None;
    }
    let (peak_idx, peak) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        });
    let half = peak / 2.0;

    let mut left = None;
    for i in (1..=peak_idx).rev() {
        if values[i - 1] <= half && values[i] >= half {
            let t = (half - values[i - 1]) / (values[i] - values[i - 1]);
            left = Some(axis[i - 1] + t * (axis[i] - axis[i - 1]));
            break;
        }
    }
    let mut right = None;
    for i in peak_idx..values.len() - 1 {
        if values[i] >= half && values[i + 1] <= half {
            let t = (values[i] - half) / (values[i] - values[i + 1]);
            right = Some(axis[i] + t * (axis[i + 1] - axis[i]));
            break;
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        _ => None,
    }
}
