//! Shared fixtures for the integration suites.
#![allow(dead_code)]

use lgcavity::cavity::default_mirrors;
use lgcavity::{BeamGeometry, CavityLayout, GridSpec, ThickLensSpec};

pub fn reference_lens() -> ThickLensSpec {
    ThickLensSpec::new(38.9e-3, 4.0e-3, 1.51, 22.8e-3).unwrap()
}

pub fn reference_ring() -> CavityLayout {
    CavityLayout::degenerate_ring(reference_lens(), default_mirrors(), 0.999).unwrap()
}

pub fn default_geometry() -> BeamGeometry {
    BeamGeometry::new(780e-9, 0.75e-3, 0.0).unwrap()
}

/// Pitch that maps to itself through a segment with the given |B|: the
/// transform's output pitch λ|B|/(n·pitch) equals the input pitch.
pub fn self_pitched_grid(n: usize, wavelength: f64, b_abs: f64) -> GridSpec {
    let pitch = (wavelength * b_abs / n as f64).sqrt();
    GridSpec::centered(n, pitch).unwrap()
}

/// |B| of one lens-to-lens segment of the ring (lens plus one gap).
pub fn ring_segment_b(lens: &ThickLensSpec) -> f64 {
    let eq = lgcavity::equivalent_thin_lens(lens).unwrap();
    2.0 * eq.focal_length
}
