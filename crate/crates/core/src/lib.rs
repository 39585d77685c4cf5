//! Physical-optics simulation of degenerate ring cavities that co-resonate
//! many Laguerre-Gaussian (orbital-angular-momentum) beams.
//!
//! The crate is layered bottom-up:
//!
//! * [`ray`] — paraxial 2×2 ray-transfer matrices, thick-lens reduction and
//!   the degeneracy / stability metric,
//! * [`cavity`] — closed-loop layouts of lenses, gaps and mirrors, with the
//!   free spectral range and linewidth arithmetic,
//! * [`modes`] — generalized Laguerre polynomials, Laguerre-Gaussian
//!   transverse fields, grid sampling, superposition and decomposition,
//! * [`propagate`] — wave-optics propagation of sampled fields through
//!   arbitrary ABCD paths (chirp–FFT–chirp transform), hard apertures, full
//!   cavity round trips and a power-iteration eigenmode solver,
//! * [`resonance`] — mode-resolved resonance frequencies, dispersion curves,
//!   Airy transmission spectra and simulated PZT length scans,
//! * [`analysis`] — beam-shape diagnostics used by tests and scenario
//!   runners (petal counting, second-moment widths, phase-slope fits).
//!
//! # Sign conventions
//!
//! All phases follow one family, fixed here and never mixed:
//!
//! * the plane-wave carrier is `exp(-ikz)` and is tracked separately from the
//!   transverse profile as [`grid::SampledField::accumulated_axial_phase`];
//! * the azimuthal factor of a charge-`l` vortex is `exp(-ilφ)`;
//! * a wavefront diverging away from its waist carries `exp(-ikρ²/(2R))`
//!   with curvature radius `R > 0`;
//! * the Gouy phase accessor [`modes::BeamGeometry::gouy_phase`] returns
//!   `ψ(z) = -atan((z - z₀)/z_R)`, so the mode factor
//!   `exp(-i(2p+|l|+1)ψ(z))` *advances* through a focus exactly as the
//!   `i/(λB)` diffraction kernel of [`propagate::collins_propagate`]
//!   propagates it. Decomposition coefficients therefore pick up
//!   `exp(-i(2p+|l|+1)ψ)` under free-space propagation.
//!
//! Everything is SI internally: meters, hertz, radians.
//!
//! # Example
//!
//! Build the reference ring, check that it is degenerate, and send a
//! charge-5 vortex once around it:
//!
//! ```
//! use lgcavity::cavity::default_mirrors;
//! use lgcavity::{
//!     degeneracy_metric, equivalent_thin_lens, round_trip, sample_mode, BeamGeometry,
//!     CavityLayout, GridSpec, LGIndex, ThickLensSpec,
//! };
//!
//! let lens = ThickLensSpec::new(38.9e-3, 4.0e-3, 1.51, 22.8e-3)?;
//! let ring = CavityLayout::degenerate_ring(lens, default_mirrors(), 0.999)?;
//!
//! // Ray level: the round trip is the identity, so every mode co-resonates.
//! assert!(degeneracy_metric(&ring.ray_matrix()).degenerate);
//! let fsr_mhz = ring.free_spectral_range() / 1e6;
//! assert!((fsr_mhz - 480.6).abs() < 0.1);
//!
//! // Wave level: a charge-5 vortex reproduces itself after one round trip.
//! let geometry = BeamGeometry::new(780e-9, 0.75e-3, 0.0)?;
//! let relay_b = 2.0 * equivalent_thin_lens(&lens)?.focal_length;
//! let pitch = (geometry.wavelength * relay_b / 256.0).sqrt();
//! let grid = GridSpec::centered(256, pitch)?;
//! let input = sample_mode(LGIndex::new(0, 5), &geometry, &grid, 0.0)?;
//! let output = round_trip(&input, &ring)?;
//! assert!(input.normalized_overlap_sq(&output)? > 0.9999);
//! # Ok::<(), lgcavity::Error>(())
//! ```

pub mod analysis;
pub mod cavity;
pub mod error;
mod fft2;
pub mod grid;
pub mod modes;
pub mod propagate;
pub mod ray;
pub mod resonance;

pub use cavity::{CavityLayout, Element, LensKind, Linewidth, MirrorSpec};
pub use error::{Error, Result};
pub use grid::{GridSpec, SampledField};
pub use modes::{
    decompose, dft6_coefficients, laguerre_polynomial, lg_field, sample_mode, superpose,
    BeamGeometry, Decomposition, EvaluationPoint, LGIndex, ModeCoefficients,
};
pub use propagate::{
    apply_aperture, collins_propagate, fox_li_dominant_mode, imaging_limit, round_trip,
};
pub use ray::{
    compose, degeneracy_metric, degenerate_spacing, equivalent_thin_lens, thick_lens_matrix,
    DegeneracyMetric, EquivalentLens, RayMatrix, ThickLensSpec,
};
pub use resonance::{DispersionCurve, PztScan, ScanRamp, Spectrum};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
