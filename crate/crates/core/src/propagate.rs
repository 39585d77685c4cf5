//! Wave-optics propagation of sampled fields through ABCD paths.
//!
//! The workhorse is [`collins_propagate`], a single-transform evaluation of
//! the quadratic diffraction kernel
//!
//! ```text
//! E₁(x₁,y₁) = (i/λB) ∫∫ E₀(x₀,y₀)
//!             · exp(−i k/(2B) [A(x₀²+y₀²) − 2(x₀x₁+y₀y₁) + D(x₁²+y₁²)])
//!             dx₀ dy₀
//! ```
//!
//! as chirp-multiply → centered DFT → chirp-multiply, with output pitch
//! `λ|B|/(n·pitch)`. The discrete sum is unitary, so lossless paths conserve
//! power to rounding. [`collins_propagate_direct`] evaluates the same sum by
//! brute force in O(n⁴) and exists as an independent reference for
//! validation on small grids.

use num_complex::Complex64;

use crate::cavity::{CavityLayout, Element};
use crate::error::{Error, Result};
use crate::fft2::{centered_dft2, CenteredSign};
use crate::grid::{GridSpec, SampledField};
use crate::ray::{degeneracy_metric, RayMatrix};

/// Below this |B| the chirp transform's output pitch degenerates; such paths
/// go through [`imaging_limit`] instead.
pub const B_MIN: f64 = 1e-6;

/// Grace band on the π-per-sample chirp bound. Self-imaging relay segments
/// (|A| = 1 at the matched pitch) sit exactly on the bound and small
/// detunings push a few dead edge samples marginally past it; hard failure
/// starts 5% beyond.
const ALIAS_GRACE: f64 = 0.05;

fn require_centered(grid: &GridSpec) -> Result<()> {
    if grid.is_centered() {
        Ok(())
    } else {
        Err(Error::InvalidGrid(
            "diffraction transform requires a centered grid".into(),
        ))
    }
}

/// Propagate through an ABCD path with `|B| > B_MIN` over the optical path
/// length `path_length` (used only for the carrier phase).
///
/// Errors when |B| is too small (use [`imaging_limit`]) or when the input
/// quadratic chirp would exceed π per sample at the grid edge, reporting the
/// maximum admissible half-window.
pub fn collins_propagate(
    field: &SampledField,
    m: &RayMatrix,
    path_length: f64,
) -> Result<SampledField> {
    let grid = field.grid;
    require_centered(&grid)?;
    let b = m.b;
    let b_abs = b.abs();
    if b_abs <= B_MIN {
        return Err(Error::SingularB {
            b_abs,
            b_min: B_MIN,
        });
    }
    let lambda = field.wavelength;
    let k = field.wavenumber();
    let n = grid.n;

    // Input-chirp sampling bound: the phase k·A·x²/(2B) must change by at
    // most π per sample at the grid edge, or the transform aliases.
    if m.a != 0.0 {
        let max_half_window = lambda * b_abs / (2.0 * m.a.abs() * grid.pitch);
        if grid.half_window() > max_half_window * (1.0 + ALIAS_GRACE) {
            return Err(Error::Aliasing {
                max_half_window_m: max_half_window,
                half_window_m: grid.half_window(),
            });
        }
    }

    let out_grid = GridSpec::centered(n, lambda * b_abs / (n as f64 * grid.pitch))?;

    let mut data = field.amplitudes.clone();
    let chirp_in = -k * m.a / (2.0 * b);
    for ((row, col), value) in data.indexed_iter_mut() {
        let x = grid.x(col);
        let y = grid.y(row);
        *value *= Complex64::from_polar(1.0, chirp_in * (x * x + y * y));
    }

    let sign = if b > 0.0 {
        CenteredSign::Plus
    } else {
        CenteredSign::Minus
    };
    centered_dft2(&mut data, sign);

    let prefactor = Complex64::new(0.0, 1.0) / (lambda * b) * grid.cell_area();
    let chirp_out = -k * m.d / (2.0 * b);
    for ((row, col), value) in data.indexed_iter_mut() {
        let x = out_grid.x(col);
        let y = out_grid.y(row);
        *value *= prefactor * Complex64::from_polar(1.0, chirp_out * (x * x + y * y));
    }

    Ok(SampledField {
        grid: out_grid,
        amplitudes: data,
        wavelength: lambda,
        accumulated_axial_phase: field.accumulated_axial_phase + k * path_length,
    })
}

/// Brute-force O(n⁴) evaluation of the same discrete diffraction sum as
/// [`collins_propagate`]. Reference implementation for validation; keep the
/// grid at 64² or below.
pub fn collins_propagate_direct(
    field: &SampledField,
    m: &RayMatrix,
    path_length: f64,
) -> Result<SampledField> {
    let grid = field.grid;
    require_centered(&grid)?;
    let b = m.b;
    if b.abs() <= B_MIN {
        return Err(Error::SingularB {
            b_abs: b.abs(),
            b_min: B_MIN,
        });
    }
    let lambda = field.wavelength;
    let k = field.wavenumber();
    let n = grid.n;
    let out_grid = GridSpec::centered(n, lambda * b.abs() / (n as f64 * grid.pitch))?;
    let mut out = SampledField::zeros(out_grid, lambda)?;
    let prefactor = Complex64::new(0.0, 1.0) / (lambda * b) * grid.cell_area();
    let coeff = -k / (2.0 * b);
    for row_out in 0..n {
        let y1 = out_grid.y(row_out);
        for col_out in 0..n {
            let x1 = out_grid.x(col_out);
            let mut acc = Complex64::new(0.0, 0.0);
            for row_in in 0..n {
                let y0 = grid.y(row_in);
                for col_in in 0..n {
                    let x0 = grid.x(col_in);
                    let arg = coeff
                        * (m.a * (x0 * x0 + y0 * y0) - 2.0 * (x0 * x1 + y0 * y1)
                            + m.d * (x1 * x1 + y1 * y1));
                    acc += field.amplitudes[(row_in, col_in)] * Complex64::from_polar(1.0, arg);
                }
            }
            out.amplitudes[(row_out, col_out)] = prefactor * acc;
        }
    }
    out.accumulated_axial_phase = field.accumulated_axial_phase + k * path_length;
    Ok(out)
}

/// B → 0 limit of the diffraction integral: magnification by `A` plus the
/// residual quadratic phase,
/// `E₁(x,y) = (1/A)·E₀(x/A, y/A)·exp(−ikC(x²+y²)/(2A))`.
///
/// Resamples bilinearly when `A ≠ 1`; the identity matrix returns the input
/// samples untouched (only the carrier phase advances by `k·path_length`).
pub fn imaging_limit(field: &SampledField, m: &RayMatrix, path_length: f64) -> Result<SampledField> {
    if m.b.abs() > B_MIN {
        return Err(Error::NotImaging { b_abs: m.b.abs() });
    }
    if m.a.abs() < 1e-9 {
        return Err(Error::DegenerateMagnification { a_abs: m.a.abs() });
    }
    let k = field.wavenumber();
    let grid = field.grid;

    let mut out = if m.a == 1.0 {
        field.clone()
    } else {
        let mut resampled = SampledField::zeros(grid, field.wavelength)?;
        let scale = 1.0 / m.a;
        for row in 0..grid.n {
            let y = grid.y(row);
            for col in 0..grid.n {
                let x = grid.x(col);
                resampled.amplitudes[(row, col)] =
                    field.sample_bilinear(x * scale, y * scale) * scale;
            }
        }
        resampled.accumulated_axial_phase = field.accumulated_axial_phase;
        resampled
    };

    if m.c != 0.0 {
        let coeff = -k * m.c / (2.0 * m.a);
        for ((row, col), value) in out.amplitudes.indexed_iter_mut() {
            let x = grid.x(col);
            let y = grid.y(row);
            *value *= Complex64::from_polar(1.0, coeff * (x * x + y * y));
        }
    }
    out.accumulated_axial_phase += k * path_length;
    Ok(out)
}

/// Field after a hard circular aperture, plus the fraction of power it
/// removed.
#[derive(Debug, Clone)]
pub struct ApertureResult {
    pub field: SampledField,
    pub clipped_power_fraction: f64,
}

/// Zero the amplitudes outside `radius` about the optical axis.
pub fn apply_aperture(field: &SampledField, radius: f64) -> Result<ApertureResult> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::Domain {
            name: "radius",
            value: radius,
        });
    }
    // Nothing on the grid lies beyond its half diagonal.
    if radius >= field.grid.half_diagonal() {
        return Ok(ApertureResult {
            field: field.clone(),
            clipped_power_fraction: 0.0,
        });
    }
    let input_power = field.power();
    let mut out = field.clone();
    let grid = out.grid;
    let r_sq = radius * radius;
    for ((row, col), value) in out.amplitudes.indexed_iter_mut() {
        let x = grid.x(col);
        let y = grid.y(row);
        if x * x + y * y > r_sq {
            *value = Complex64::new(0.0, 0.0);
        }
    }
    let clipped = if input_power > 0.0 {
        ((input_power - out.power()) / input_power).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(ApertureResult {
        field: out,
        clipped_power_fraction: clipped,
    })
}

/// Resample onto another grid by bilinear interpolation (zero outside the
/// source window).
pub fn resample_to(field: &SampledField, grid: &GridSpec) -> Result<SampledField> {
    let mut out = SampledField::zeros(*grid, field.wavelength)?;
    for row in 0..grid.n {
        let y = grid.y(row);
        for col in 0..grid.n {
            let x = grid.x(col);
            out.amplitudes[(row, col)] = field.sample_bilinear(x, y);
        }
    }
    out.accumulated_axial_phase = field.accumulated_axial_phase;
    Ok(out)
}

fn flush_segment(
    current: SampledField,
    m: &RayMatrix,
    path: f64,
    scalar: Complex64,
) -> Result<SampledField> {
    let mut out = if m.b.abs() > B_MIN {
        collins_propagate(&current, m, path)?
    } else {
        imaging_limit(&current, m, path)?
    };
    if scalar != Complex64::new(1.0, 0.0) {
        out.scale(scalar);
    }
    Ok(out)
}

/// One full round trip through the layout, starting and ending at the plane
/// just before the first element.
///
/// Stretches between lens planes are composed into single ABCD segments and
/// propagated in one transform each; lens clear apertures are applied at the
/// lens planes; every mirror contributes the scalar `−√R` (amplitude
/// reflectivity with a π phase flip) and every lens the scalar `√T`.
pub fn round_trip(field: &SampledField, layout: &CavityLayout) -> Result<SampledField> {
    let mut current = field.clone();
    let mut pending = RayMatrix::IDENTITY;
    let mut pending_path = 0.0;
    let mut pending_scalar = Complex64::new(1.0, 0.0);
    let identity_scalar = Complex64::new(1.0, 0.0);

    for element in layout.elements() {
        match element {
            Element::FreeSpace(d) => {
                pending = RayMatrix::free_space(*d).after(&pending);
                pending_path += d;
            }
            Element::Mirror(mirror) => {
                pending_scalar *= -mirror.reflectivity.sqrt();
            }
            Element::Lens {
                kind,
                transmittance,
            } => {
                if pending != RayMatrix::IDENTITY
                    || pending_path != 0.0
                    || pending_scalar != identity_scalar
                {
                    current = flush_segment(current, &pending, pending_path, pending_scalar)?;
                    pending_scalar = identity_scalar;
                }
                if let Some(radius) = kind.clear_aperture_radius() {
                    current = apply_aperture(&current, radius)?.field;
                }
                current.scale(Complex64::new(transmittance.sqrt(), 0.0));
                pending = kind.matrix();
                pending_path = kind.optical_path();
            }
        }
    }
    if pending != RayMatrix::IDENTITY || pending_path != 0.0 || pending_scalar != identity_scalar {
        current = flush_segment(current, &pending, pending_path, pending_scalar)?;
    }
    Ok(current)
}

/// Outcome of the round-trip power iteration.
#[derive(Debug, Clone)]
pub struct FoxLiOutcome {
    /// Final (unit-power) iterate.
    pub mode: SampledField,
    /// Complex round-trip multiplier of the final iterate: loss modulus and
    /// transverse phase (the axial carrier is tracked separately).
    pub round_trip_eigenvalue: Complex64,
    pub iterations: usize,
    /// Phase-aligned L2 change of the last step.
    pub residual: f64,
    pub converged: bool,
}

/// Power iteration on the round-trip operator: repeatedly propagate,
/// renormalize and compare successive iterates up to a global phase.
///
/// Returns a non-converged outcome (carrying the last residual) rather than
/// an error when `max_iter` is exhausted. For an exactly degenerate lossless
/// ring the round trip is the identity, every field is an eigenvector, and
/// the seed itself is returned after one iteration.
pub fn fox_li_dominant_mode(
    layout: &CavityLayout,
    seed: &SampledField,
    max_iter: usize,
    tol: f64,
) -> Result<FoxLiOutcome> {
    let metric = degeneracy_metric(&layout.ray_matrix());
    if !metric.stable {
        return Err(Error::Unstable {
            half_trace_mag: layout.ray_matrix().trace().abs() / 2.0,
        });
    }
    let seed_power = seed.power();
    if seed_power <= 0.0 {
        return Err(Error::ZeroPower);
    }

    let mut v = seed.clone();
    v.scale(Complex64::new(1.0 / seed_power.sqrt(), 0.0));
    let mut eigenvalue = Complex64::new(0.0, 0.0);
    let mut residual = f64::INFINITY;

    for iteration in 1..=max_iter.max(1) {
        let mut w = round_trip(&v, layout)?;
        if !w.grid.compatible_with(&v.grid) {
            // Perturbed layouts drift the pitch slightly per trip; iterate
            // on the seed grid.
            w = resample_to(&w, &v.grid)?;
        }
        eigenvalue = v.overlap(&w)?;
        let w_power = w.power();
        if w_power <= 0.0 {
            return Err(Error::ZeroPower);
        }
        w.scale(Complex64::new(1.0 / w_power.sqrt(), 0.0));
        let alignment = v.overlap(&w)?;
        residual = (2.0 - 2.0 * alignment.norm()).max(0.0).sqrt();
        v = w;
        if residual < tol {
            return Ok(FoxLiOutcome {
                mode: v,
                round_trip_eigenvalue: eigenvalue,
                iterations: iteration,
                residual,
                converged: true,
            });
        }
    }
    Ok(FoxLiOutcome {
        mode: v,
        round_trip_eigenvalue: eigenvalue,
        iterations: max_iter.max(1),
        residual,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{sample_mode, BeamGeometry, LGIndex};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn geometry() -> BeamGeometry {
        BeamGeometry::new(780e-9, 0.75e-3, 0.0).unwrap()
    }

    #[test]
    fn free_space_preserves_power() {
        let geom = geometry();
        let grid = GridSpec::centered(128, 10.0 * 0.75e-3 / 128.0).unwrap();
        let field = sample_mode(LGIndex::new(0, 2), &geom, &grid, 0.0).unwrap();
        let z = geom.rayleigh_range() * 0.8;
        let out = collins_propagate(&field, &RayMatrix::free_space(z), z).unwrap();
        assert_relative_eq!(out.power(), field.power(), max_relative = 1e-6);
        assert_relative_eq!(
            out.accumulated_axial_phase,
            field.wavenumber() * z,
            max_relative = 1e-12
        );
    }

    #[test]
    fn singular_b_is_rejected() {
        let geom = geometry();
        let grid = GridSpec::centered(64, 8e-5).unwrap();
        let field = sample_mode(LGIndex::new(0, 0), &geom, &grid, 0.0).unwrap();
        let err = collins_propagate(&field, &RayMatrix::thin_lens(0.1), 0.0).unwrap_err();
        assert!(matches!(err, Error::SingularB { .. }));
    }

    #[test]
    fn aliasing_is_reported_with_admissible_window() {
        let geom = BeamGeometry::new(780e-9, 1e-2, 0.0).unwrap();
        let grid = GridSpec::centered(64, 1e-3).unwrap();
        let field = sample_mode(LGIndex::new(0, 0), &geom, &grid, 0.0).unwrap();
        // n·pitch² = 6.4e-5 m² greatly exceeds λ·B = 7.8e-8 m².
        let err = collins_propagate(&field, &RayMatrix::free_space(0.1), 0.1).unwrap_err();
        match err {
            Error::Aliasing {
                max_half_window_m,
                half_window_m,
            } => {
                assert_relative_eq!(
                    max_half_window_m,
                    780e-9 * 0.1 / (2.0 * 1e-3),
                    max_relative = 1e-12
                );
                assert!(half_window_m > max_half_window_m);
            }
            other => panic!("expected aliasing error, got {other:?}"),
        }
    }

    #[test]
    fn imaging_identity_is_bit_exact() {
        let geom = geometry();
        let grid = GridSpec::centered(64, 8e-5).unwrap();
        let field = sample_mode(LGIndex::new(1, 1), &geom, &grid, 0.0).unwrap();
        let out = imaging_limit(&field, &RayMatrix::IDENTITY, 0.25).unwrap();
        assert_eq!(out.amplitudes, field.amplitudes);
        assert_relative_eq!(
            out.accumulated_axial_phase - field.accumulated_axial_phase,
            field.wavenumber() * 0.25,
            max_relative = 1e-12
        );
    }

    #[test]
    fn imaging_rejects_non_imaging_paths() {
        let geom = geometry();
        let grid = GridSpec::centered(64, 8e-5).unwrap();
        let field = sample_mode(LGIndex::new(0, 0), &geom, &grid, 0.0).unwrap();
        assert!(matches!(
            imaging_limit(&field, &RayMatrix::free_space(0.1), 0.1),
            Err(Error::NotImaging { .. })
        ));
        let degenerate = RayMatrix {
            a: 0.0,
            b: 0.0,
            c: -1.0,
            d: 1.0,
        };
        assert!(matches!(
            imaging_limit(&field, &degenerate, 0.0),
            Err(Error::DegenerateMagnification { .. })
        ));
    }

    #[test]
    fn thin_lens_is_a_pure_phase_mask() {
        let geom = geometry();
        let grid = GridSpec::centered(64, 8e-5).unwrap();
        let field = sample_mode(LGIndex::new(0, 0), &geom, &grid, 0.0).unwrap();
        let f = 0.2;
        let out = imaging_limit(&field, &RayMatrix::thin_lens(f), 0.0).unwrap();
        let k = field.wavenumber();
        for ((row, col), value) in out.amplitudes.indexed_iter() {
            let x = grid.x(col);
            let y = grid.y(row);
            let expected = field.amplitudes[(row, col)]
                * Complex64::from_polar(1.0, k * (x * x + y * y) / (2.0 * f));
            assert!((value - expected).norm() < 1e-12 * field.peak_intensity().sqrt());
        }
    }

    #[test]
    fn inversion_imaging_flips_parity() {
        let geom = geometry();
        let grid = GridSpec::centered(128, 8.0 * 0.75e-3 / 128.0).unwrap();
        let inversion = RayMatrix {
            a: -1.0,
            b: 0.0,
            c: 0.0,
            d: -1.0,
        };
        for l in 0..=3 {
            let field = sample_mode(LGIndex::new(0, l), &geom, &grid, 0.0).unwrap();
            let out = imaging_limit(&field, &inversion, 0.0).unwrap();
            // E -> -E(-x,-y): LG modes pick up -(-1)^l.
            let expected_sign = -if l % 2 == 0 { 1.0 } else { -1.0 };
            let dot = field.overlap(&out).unwrap();
            assert_abs_diff_eq!(dot.re, expected_sign, epsilon = 2e-2);
            assert_abs_diff_eq!(dot.im, 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn imaging_reciprocity_within_interpolation_error() {
        let geom = geometry();
        // Bilinear error falls quadratically with the pitch; 96 samples per
        // waist keeps the double resample below 1e-4 with margin, and the
        // window must still hold the magnified beam.
        let grid = GridSpec::centered(1024, 0.75e-3 / 96.0).unwrap();
        let field = sample_mode(LGIndex::new(0, 0), &geom, &grid, 0.0).unwrap();
        let magnify = RayMatrix {
            a: 1.25,
            b: 0.0,
            c: 0.0,
            d: 0.8,
        };
        let shrink = RayMatrix {
            a: 0.8,
            b: 0.0,
            c: 0.0,
            d: 1.25,
        };
        let there = imaging_limit(&field, &magnify, 0.0).unwrap();
        let back = imaging_limit(&there, &shrink, 0.0).unwrap();
        let err = back.relative_l2_error_mod_phase(&field).unwrap();
        assert!(err < 1e-4, "reciprocity error {err}");
    }

    #[test]
    fn aperture_edge_cases() {
        let geom = geometry();
        let grid = GridSpec::centered(256, 8.0 * 0.75e-3 / 256.0).unwrap();
        let field = sample_mode(LGIndex::new(0, 0), &geom, &grid, 0.0).unwrap();

        let unclipped = apply_aperture(&field, field.grid.half_diagonal() * 1.01).unwrap();
        assert_eq!(unclipped.clipped_power_fraction, 0.0);

        // Only the on-axis sample survives a sub-micron pinhole.
        let pinhole = apply_aperture(&field, 0.001 * 0.75e-3).unwrap();
        assert_abs_diff_eq!(pinhole.clipped_power_fraction, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn wide_aperture_passes_high_charge_mode() {
        let geom = geometry();
        // Window wide enough to contain the 11.4 mm clear-aperture radius.
        let grid = GridSpec::centered(512, 60e-6).unwrap();
        let field = sample_mode(LGIndex::new(0, 15), &geom, &grid, 0.0).unwrap();
        let result = apply_aperture(&field, 11.4e-3).unwrap();
        assert!(
            result.clipped_power_fraction < 1e-6,
            "clipped {:.3e}",
            result.clipped_power_fraction
        );
    }
}
