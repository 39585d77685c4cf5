//! Square sampling grids and the complex field state that lives on them.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform square sampling grid. Sample `i` along an axis sits at
/// `(i − n/2)·pitch + offset`, so the grid is symmetric about the optical
/// axis when the offsets are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Samples per side; a power of two, at least 32.
    pub n: usize,
    /// Sample spacing, meters.
    pub pitch: f64,
    /// Transverse offset of the grid center, meters.
    pub center_x: f64,
    /// Transverse offset of the grid center, meters.
    pub center_y: f64,
}

impl GridSpec {
    pub fn centered(n: usize, pitch: f64) -> Result<Self> {
        Self::with_center(n, pitch, 0.0, 0.0)
    }

    pub fn with_center(n: usize, pitch: f64, center_x: f64, center_y: f64) -> Result<Self> {
        if !n.is_power_of_two() || n < 32 {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be a power of two, at least 32"
            )));
        }
        if !pitch.is_finite() || pitch <= 0.0 {
            return Err(Error::InvalidGrid(format!("pitch = {pitch}")));
        }
        if !center_x.is_finite() || !center_y.is_finite() {
            return Err(Error::InvalidGrid("non-finite center offset".into()));
        }
        Ok(GridSpec {
            n,
            pitch,
            center_x,
            center_y,
        })
    }

    pub fn is_centered(&self) -> bool {
        self.center_x == 0.0 && self.center_y == 0.0
    }

    /// Physical x coordinate of column `i`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.n / 2) as f64) * self.pitch + self.center_x
    }

    /// Physical y coordinate of row `j`.
    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.pitch + self.center_y
    }

    /// Half the window side length, meters.
    pub fn half_window(&self) -> f64 {
        (self.n / 2) as f64 * self.pitch
    }

    pub fn half_diagonal(&self) -> f64 {
        self.half_window() * std::f64::consts::SQRT_2
    }

    /// Area element pitch², m².
    pub fn cell_area(&self) -> f64 {
        self.pitch * self.pitch
    }

    /// Grids close enough (1 ppb) to support sample-wise arithmetic.
    pub fn compatible_with(&self, other: &GridSpec) -> bool {
        self.n == other.n
            && (self.pitch - other.pitch).abs() <= 1e-9 * self.pitch
            && (self.center_x - other.center_x).abs() <= 1e-9 * self.pitch
            && (self.center_y - other.center_y).abs() <= 1e-9 * self.pitch
    }
}

/// N×N complex amplitude grid with physical pitch: the wave-optics state.
///
/// The plane-wave carrier `exp(-ik(L+z₀))` is factored out of the samples
/// and tracked in `accumulated_axial_phase` (radians); only phase
/// differences between transverse positions live in `amplitudes`.
#[derive(Debug, Clone)]
pub struct SampledField {
    pub grid: GridSpec,
    /// Row-major `[row = y index, column = x index]`.
    pub amplitudes: Array2<Complex64>,
    /// Wavelength, meters.
    pub wavelength: f64,
    /// Total carrier phase k·(path) accumulated so far, radians.
    pub accumulated_axial_phase: f64,
}

impl SampledField {
    pub fn zeros(grid: GridSpec, wavelength: f64) -> Result<Self> {
        if !wavelength.is_finite() || wavelength <= 0.0 {
            return Err(Error::Domain {
                name: "wavelength",
                value: wavelength,
            });
        }
        Ok(SampledField {
            grid,
            amplitudes: Array2::zeros((grid.n, grid.n)),
            wavelength,
            accumulated_axial_phase: 0.0,
        })
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }

    /// Total power `Σ|E|²·pitch²`.
    pub fn power(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn peak_intensity(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .fold(0.0, f64::max)
    }

    pub fn intensity(&self) -> Array2<f64> {
        self.amplitudes.mapv(|a| a.norm_sqr())
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.amplitudes.mapv_inplace(|a| a * factor);
    }

    /// Inner product `⟨self|other⟩ = Σ conj(self)·other·pitch²`.
    pub fn overlap(&self, other: &SampledField) -> Result<Complex64> {
        if !self.grid.compatible_with(&other.grid) {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        let dot: Complex64 = self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(dot * self.grid.cell_area())
    }

    /// `|⟨self|other⟩|²` normalized by both powers; 1 for identical shapes.
    pub fn normalized_overlap_sq(&self, other: &SampledField) -> Result<f64> {
        let dot = self.overlap(other)?;
        let denom = self.power() * other.power();
        if denom == 0.0 {
            return Err(Error::ZeroPower);
        }
        Ok(dot.norm_sqr() / denom)
    }

    /// Relative L2 distance to `other`, minimized over one global phase:
    /// `min_φ ‖self·e^{iφ} − other‖ / ‖other‖`.
    pub fn relative_l2_error_mod_phase(&self, other: &SampledField) -> Result<f64> {
        let dot = self.overlap(other)?;
        let p_self = self.power();
        let p_other = other.power();
        if p_other == 0.0 {
            return Err(Error::ZeroPower);
        }
        let dist_sq = (p_self + p_other - 2.0 * dot.norm()).max(0.0);
        Ok((dist_sq / p_other).sqrt())
    }

    /// Bilinear interpolation of the complex amplitude at a physical point;
    /// zero outside the sampled window.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> Complex64 {
        let n = self.grid.n;
        let fx = (x - self.grid.center_x) / self.grid.pitch + (n / 2) as f64;
        let fy = (y - self.grid.center_y) / self.grid.pitch + (n / 2) as f64;
        if fx < 0.0 || fy < 0.0 || fx > (n - 1) as f64 || fy > (n - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let ix = (fx.floor() as usize).min(n - 2);
        let iy = (fy.floor() as usize).min(n - 2);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let a00 = self.amplitudes[(iy, ix)];
        let a01 = self.amplitudes[(iy, ix + 1)];
        let a10 = self.amplitudes[(iy + 1, ix)];
        let a11 = self.amplitudes[(iy + 1, ix + 1)];
        a00 * ((1.0 - tx) * (1.0 - ty))
            + a01 * (tx * (1.0 - ty))
            + a10 * ((1.0 - tx) * ty)
            + a11 * (tx * ty)
    }
}
