//! Laguerre-Gaussian mode mathematics: generalized Laguerre polynomials,
//! transverse field evaluation, grid sampling, superpositions and overlap
//! decomposition.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledField};

/// Mode label: radial index `p ≥ 0` and topological charge `l` of either
/// sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LGIndex {
    pub p: u32,
    pub l: i32,
}

impl LGIndex {
    pub const fn new(p: u32, l: i32) -> Self {
        LGIndex { p, l }
    }

    /// Transverse mode order `2p + |l| + 1`, the Gouy-phase weight.
    pub fn mode_order(&self) -> f64 {
        (2 * self.p + self.l.unsigned_abs() + 1) as f64
    }
}

impl std::fmt::Display for LGIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LG(p={}, l={})", self.p, self.l)
    }
}

/// Position in cylindrical coordinates about the beam axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationPoint {
    /// Radial distance, meters (≥ 0).
    pub rho: f64,
    /// Azimuth in [0, 2π).
    pub phi: f64,
    /// Axial position, meters.
    pub z: f64,
}

impl EvaluationPoint {
    pub fn new(rho: f64, phi: f64, z: f64) -> Result<Self> {
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::Domain {
                name: "rho",
                value: rho,
            });
        }
        Ok(EvaluationPoint {
            rho,
            phi: phi.rem_euclid(2.0 * PI),
            z,
        })
    }

    pub fn from_cartesian(x: f64, y: f64, z: f64) -> Self {
        EvaluationPoint {
            rho: x.hypot(y),
            phi: y.atan2(x).rem_euclid(2.0 * PI),
            z,
        }
    }
}

/// Gaussian beam parameter set: wavelength, waist radius and waist position
/// along the axis. All derived quantities follow the sign conventions
/// documented at the crate root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    /// Wavelength, meters.
    pub wavelength: f64,
    /// 1/e² intensity radius at the waist, meters.
    pub waist_radius: f64,
    /// Axial position of the waist, meters.
    pub waist_position: f64,
}

impl BeamGeometry {
    pub fn new(wavelength: f64, waist_radius: f64, waist_position: f64) -> Result<Self> {
        if !wavelength.is_finite() || wavelength <= 0.0 {
            return Err(Error::Domain {
                name: "wavelength",
                value: wavelength,
            });
        }
        if !waist_radius.is_finite() || waist_radius <= 0.0 {
            return Err(Error::Domain {
                name: "waist_radius",
                value: waist_radius,
            });
        }
        if !waist_position.is_finite() {
            return Err(Error::Domain {
                name: "waist_position",
                value: waist_position,
            });
        }
        Ok(BeamGeometry {
            wavelength,
            waist_radius,
            waist_position,
        })
    }

    /// Geometry whose complex beam parameter at the plane `plane_z` equals
    /// `q = (plane_z − z₀) + i·z_R`. Fails unless `Im q > 0`.
    pub fn from_q(wavelength: f64, q: Complex64, plane_z: f64) -> Result<Self> {
        if q.im.is_nan() || q.im <= 0.0 {
            return Err(Error::Domain {
                name: "Im(q)",
                value: q.im,
            });
        }
        let waist_radius = (wavelength * q.im / PI).sqrt();
        BeamGeometry::new(wavelength, waist_radius, plane_z - q.re)
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Rayleigh range `π w₀² / λ`.
    pub fn rayleigh_range(&self) -> f64 {
        PI * self.waist_radius * self.waist_radius / self.wavelength
    }

    /// Beam radius `w(z)`.
    pub fn width(&self, z: f64) -> f64 {
        let zeta = (z - self.waist_position) / self.rayleigh_range();
        self.waist_radius * (1.0 + zeta * zeta).sqrt()
    }

    /// Wavefront curvature `1/R(z)`; zero at the waist where R diverges.
    pub fn curvature(&self, z: f64) -> f64 {
        let zeta = z - self.waist_position;
        let zr = self.rayleigh_range();
        zeta / (zeta * zeta + zr * zr)
    }

    /// Gouy phase `ψ(z) = −atan((z−z₀)/z_R)`, zero at the waist.
    ///
    /// The sign makes the mode factor `exp(−i(2p+|l|+1)ψ(z))` advance
    /// through a focus, matching the diffraction kernel (see the crate-root
    /// conventions).
    pub fn gouy_phase(&self, z: f64) -> f64 {
        -((z - self.waist_position) / self.rayleigh_range()).atan()
    }

    /// Complex beam parameter `q(z) = (z − z₀) + i z_R`.
    pub fn q_parameter(&self, z: f64) -> Complex64 {
        Complex64::new(z - self.waist_position, self.rayleigh_range())
    }
}

/// Generalized Laguerre polynomial `L_p^α(x)` by the stable upward
/// three-term recurrence in `p`.
pub fn laguerre_polynomial(p: u32, alpha: u32, x: f64) -> f64 {
    let a = alpha as f64;
    if p == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut curr = 1.0 + a - x;
    for k in 1..p {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * curr - (kf + a) * prev) / (kf + 1.0);
        prev = curr;
        curr = next;
    }
    curr
}

/// `(p+1)(p+2)···(p+l_abs)` = `(p+|l|)! / p!`.
fn rising_product(p: u32, l_abs: u32) -> f64 {
    (1..=l_abs).map(|k| (p + k) as f64).product()
}

/// Transverse Laguerre-Gaussian field at one point.
///
/// The returned value contains the normalization
/// `√(2 p! / (π (|l|+p)!))`, the radial envelope, the curvature phase
/// `exp(−ikρ²/(2R))`, the mode Gouy factor `exp(−i(2p+|l|+1)ψ(z))` and the
/// azimuthal phase `exp(−ilφ)`. The plane-wave carrier `exp(−ikz)` is *not*
/// included; propagation tracks it separately.
///
/// With `e0 = 1` the transverse power integrates to one at every plane.
pub fn lg_field(index: LGIndex, geom: &BeamGeometry, point: &EvaluationPoint, e0: f64) -> Complex64 {
    let l_abs = index.l.unsigned_abs();
    let w = geom.width(point.z);
    let norm = (2.0 / (PI * rising_product(index.p, l_abs))).sqrt();
    let u = 2.0 * point.rho * point.rho / (w * w);
    let radial = (SQRT_2 * point.rho / w).powi(l_abs as i32)
        * laguerre_polynomial(index.p, l_abs, u)
        * (-point.rho * point.rho / (w * w)).exp();
    let phase = -0.5 * geom.wavenumber() * geom.curvature(point.z) * point.rho * point.rho
        - index.mode_order() * geom.gouy_phase(point.z)
        - index.l as f64 * point.phi;
    Complex64::from_polar(e0 * norm / w * radial, phase)
}

/// Effective transverse mode radius `w(z)·√(2p+|l|+1)`, used only for
/// sampling preconditions.
pub fn mode_radius(index: LGIndex, geom: &BeamGeometry, z: f64) -> f64 {
    geom.width(z) * index.mode_order().sqrt()
}

fn check_resolution(index: LGIndex, geom: &BeamGeometry, grid: &GridSpec, z: f64) -> Result<()> {
    let scale = mode_radius(index, geom, z);
    if 8.0 * grid.pitch > scale {
        return Err(Error::SamplingResolution {
            p: index.p,
            l: index.l,
            pitch_m: grid.pitch,
            half_window_m: grid.half_window(),
            reason: "pitch coarser than one eighth of the mode radius",
        });
    }
    Ok(())
}

/// Sample one mode onto a Cartesian grid at the plane `z` with unit analytic
/// power.
///
/// Fails when the pitch cannot resolve the mode or when the window clips it:
/// the sampled power must agree with the analytic unit power to 0.1%.
pub fn sample_mode(
    index: LGIndex,
    geom: &BeamGeometry,
    grid: &GridSpec,
    z: f64,
) -> Result<SampledField> {
    check_resolution(index, geom, grid, z)?;
    let mut field = SampledField::zeros(*grid, geom.wavelength)?;
    for row in 0..grid.n {
        let y = grid.y(row);
        for col in 0..grid.n {
            let x = grid.x(col);
            let point = EvaluationPoint::from_cartesian(x, y, z);
            field.amplitudes[(row, col)] = lg_field(index, geom, &point, 1.0);
        }
    }
    let power = field.power();
    if (power - 1.0).abs() > 1e-3 {
        return Err(Error::SamplingResolution {
            p: index.p,
            l: index.l,
            pitch_m: grid.pitch,
            half_window_m: grid.half_window(),
            reason: "grid window clips the mode (sampled power off by more than 0.1%)",
        });
    }
    Ok(field)
}

/// Complex mode amplitudes over a reference beam geometry.
///
/// Iteration order is the `LGIndex` ordering, which keeps every downstream
/// output deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoefficients {
    geometry: BeamGeometry,
    amplitudes: BTreeMap<LGIndex, Complex64>,
}

impl ModeCoefficients {
    pub fn new(geometry: BeamGeometry) -> Self {
        ModeCoefficients {
            geometry,
            amplitudes: BTreeMap::new(),
        }
    }

    /// Single mode with unit amplitude.
    pub fn single(geometry: BeamGeometry, index: LGIndex) -> Self {
        let mut coeffs = Self::new(geometry);
        coeffs.insert(index, Complex64::new(1.0, 0.0));
        coeffs
    }

    pub fn from_pairs<I>(geometry: BeamGeometry, pairs: I) -> Self
    where
        I: IntoIterator<Item = (LGIndex, Complex64)>,
    {
        let mut coeffs = Self::new(geometry);
        for (index, amplitude) in pairs {
            coeffs.insert(index, amplitude);
        }
        coeffs
    }

    pub fn geometry(&self) -> &BeamGeometry {
        &self.geometry
    }

    pub fn insert(&mut self, index: LGIndex, amplitude: Complex64) {
        self.amplitudes.insert(index, amplitude);
    }

    pub fn get(&self, index: LGIndex) -> Complex64 {
        self.amplitudes
            .get(&index)
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (LGIndex, Complex64)> + '_ {
        self.amplitudes.iter().map(|(k, v)| (*k, *v))
    }

    pub fn indices(&self) -> impl Iterator<Item = LGIndex> + '_ {
        self.amplitudes.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// `Σ|c|²`.
    pub fn total_power(&self) -> f64 {
        self.amplitudes.values().map(|c| c.norm_sqr()).sum()
    }

    /// Rescale so `Σ|c|² = 1`.
    pub fn normalize(&mut self) -> Result<()> {
        let total = self.total_power();
        if total <= 0.0 {
            return Err(Error::ZeroPower);
        }
        let inv = 1.0 / total.sqrt();
        for value in self.amplitudes.values_mut() {
            *value *= inv;
        }
        Ok(())
    }
}

/// Sample the linear combination `Σ c_j · LG_j` at the plane `z`.
///
/// The coefficients must be normalized (`Σ|c|² = 1` within 1e−6); the
/// sampled power then equals 1 to the same grid accuracy as
/// [`sample_mode`].
pub fn superpose(coeffs: &ModeCoefficients, grid: &GridSpec, z: f64) -> Result<SampledField> {
    let total = coeffs.total_power();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized { total_power: total });
    }
    let geom = coeffs.geometry();
    let mut out = SampledField::zeros(*grid, geom.wavelength)?;
    for (index, amplitude) in coeffs.iter() {
        if amplitude.norm_sqr() == 0.0 {
            continue;
        }
        let mode = sample_mode(index, geom, grid, z)?;
        out.amplitudes
            .zip_mut_with(&mode.amplitudes, |acc, m| *acc += amplitude * m);
    }
    Ok(out)
}

/// Basis order of the six-state discrete-Fourier family:
/// `|+1⟩, |−1⟩, |+3⟩, |−3⟩, |+5⟩, |−5⟩`.
pub const DFT6_BASIS: [LGIndex; 6] = [
    LGIndex::new(0, 1),
    LGIndex::new(0, -1),
    LGIndex::new(0, 3),
    LGIndex::new(0, -3),
    LGIndex::new(0, 5),
    LGIndex::new(0, -5),
];

/// Row `j` of the six-dimensional DFT matrix over [`DFT6_BASIS`]:
/// coefficients `ω^{j·m}/√6` with `ω = exp(iπ/3)`. The six rows are pairwise
/// orthonormal.
pub fn dft6_coefficients(j: usize, geometry: BeamGeometry) -> Result<ModeCoefficients> {
    if j > 5 {
        return Err(Error::SuperpositionIndex(j));
    }
    let norm = 1.0 / 6.0_f64.sqrt();
    let mut coeffs = ModeCoefficients::new(geometry);
    for (m, index) in DFT6_BASIS.iter().enumerate() {
        let angle = PI / 3.0 * (j * m) as f64;
        coeffs.insert(*index, Complex64::from_polar(norm, angle));
    }
    Ok(coeffs)
}

/// Result of projecting a sampled field onto a finite LG basis.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub coefficients: ModeCoefficients,
    /// `Σ|c|²` divided by the field power.
    pub captured_power_fraction: f64,
    /// False when less than 99% of the power lies in the basis span.
    pub in_span: bool,
}

/// Project a field at the plane `z` onto LG modes by discrete overlap
/// integrals, `c_j = Σ conj(LG_j)·field·pitch²`.
///
/// The projection modes carry the plane-local width and curvature but not
/// the per-mode Gouy factor, so free-space propagation advances each
/// coefficient phase by `exp(−i(2p+|l|+1)ψ(z))` while leaving its modulus
/// unchanged.
pub fn decompose(
    field: &SampledField,
    basis: &[LGIndex],
    geom: &BeamGeometry,
    z: f64,
) -> Result<Decomposition> {
    let field_power = field.power();
    if field_power <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let mut coefficients = ModeCoefficients::new(*geom);
    for &index in basis {
        let mode = sample_mode(index, geom, &field.grid, z)?;
        let raw = mode.overlap(field)?;
        // Strip the mode's own Gouy factor from the projector so the
        // coefficient keeps the propagation phase.
        let gouy = index.mode_order() * geom.gouy_phase(z);
        coefficients.insert(index, raw * Complex64::from_polar(1.0, -gouy));
    }
    let captured = coefficients.total_power() / field_power;
    Ok(Decomposition {
        coefficients,
        captured_power_fraction: captured,
        in_span: captured >= 0.99,
    })
}
