//! Paraxial ray-matrix algebra: element matrices, thick-lens reduction and
//! the degeneracy/stability metric of composed paths.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gouy angles below this threshold count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Slack allowed on |A+D|/2 = 1 before a path is declared unstable, so that
/// rounding in long compositions of an exactly-degenerate ring does not flip
/// the verdict.
const TRACE_SLACK: f64 = 1e-12;

/// Half-trace window treated as exactly degenerate. arccos turns trace
/// rounding of order 1e−15 into Gouy angles of order 1e−7, so angles whose
/// half trace sits within 1e−12 of +1 (θ ≲ 1.4e−6 rad) are below what double
/// precision can resolve and snap to zero.
const HALF_TRACE_SNAP: f64 = 1e-12;

/// 2×2 paraxial ray-transfer matrix acting on (position, angle) vectors.
///
/// `a` and `d` are dimensionless, `b` is in meters, `c` in 1/meters. The
/// determinant equals n_in/n_out and is exactly 1 for any path that starts
/// and ends in the same medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RayMatrix {
    pub const IDENTITY: RayMatrix = RayMatrix {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Propagation through `length` meters of a uniform medium.
    pub fn free_space(length: f64) -> Self {
        RayMatrix {
            a: 1.0,
            b: length,
            c: 0.0,
            d: 1.0,
        }
    }

    /// Ideal thin lens of the given focal length.
    pub fn thin_lens(focal_length: f64) -> Self {
        RayMatrix {
            a: 1.0,
            b: 0.0,
            c: -1.0 / focal_length,
            d: 1.0,
        }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Matrix product `self · rhs`: `rhs` is traversed first.
    pub fn after(&self, rhs: &RayMatrix) -> RayMatrix {
        RayMatrix {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn max_abs_diff(&self, other: &RayMatrix) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }

    /// Self-consistent complex beam parameter of a stable round trip: the
    /// root of `Cq² + (D−A)q − B = 0` with positive imaginary part, i.e. the
    /// `q = (z−z₀) + i·z_R` that reproduces itself through this matrix.
    ///
    /// Returns `None` for unstable paths and for the degenerate/parabolic
    /// case `C = 0` where every (or no) beam is self-consistent.
    pub fn self_consistent_q(&self) -> Option<Complex64> {
        let discriminant = 4.0 - self.trace() * self.trace();
        if discriminant <= 0.0 || self.c == 0.0 {
            return None;
        }
        let imag = discriminant.sqrt() / (2.0 * self.c);
        let q = Complex64::new((self.a - self.d) / (2.0 * self.c), imag);
        Some(if q.im > 0.0 { q } else { q.conj() })
    }
}

impl std::ops::Mul for RayMatrix {
    type Output = RayMatrix;
    fn mul(self, rhs: RayMatrix) -> RayMatrix {
        self.after(&rhs)
    }
}

/// Right-to-left product of a path in propagation order: `path[0]` is
/// traversed first.
pub fn compose(path: &[RayMatrix]) -> Result<RayMatrix> {
    if path.is_empty() {
        return Err(Error::EmptyPath);
    }
    Ok(path
        .iter()
        .copied()
        .reduce(|acc, m| m.after(&acc))
        .expect("non-empty"))
}

/// Parameters of a planoconvex thick lens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThickLensSpec {
    /// Radius of curvature of the convex face, meters (> 0).
    pub radius_of_curvature: f64,
    /// Center thickness, meters (> 0).
    pub center_thickness: f64,
    /// Refractive index of the lens material.
    pub lens_index: f64,
    /// Refractive index of the surrounding medium (usually 1).
    pub ambient_index: f64,
    /// Clear aperture diameter, meters (> 0).
    pub clear_aperture_diameter: f64,
}

impl ThickLensSpec {
    /// Lens in vacuum/air (`ambient_index` = 1).
    pub fn new(
        radius_of_curvature: f64,
        center_thickness: f64,
        lens_index: f64,
        clear_aperture_diameter: f64,
    ) -> Result<Self> {
        Self::with_ambient(
            radius_of_curvature,
            center_thickness,
            lens_index,
            1.0,
            clear_aperture_diameter,
        )
    }

    pub fn with_ambient(
        radius_of_curvature: f64,
        center_thickness: f64,
        lens_index: f64,
        ambient_index: f64,
        clear_aperture_diameter: f64,
    ) -> Result<Self> {
        let reject = |name: &'static str, value: f64| Err(Error::Domain { name, value });
        if !radius_of_curvature.is_finite() || radius_of_curvature <= 0.0 {
            return reject("radius_of_curvature", radius_of_curvature);
        }
        if !center_thickness.is_finite() || center_thickness <= 0.0 {
            return reject("center_thickness", center_thickness);
        }
        if !lens_index.is_finite() || lens_index <= 0.0 {
            return reject("lens_index", lens_index);
        }
        if !ambient_index.is_finite() || ambient_index < 1.0 {
            return reject("ambient_index", ambient_index);
        }
        // Equality is allowed so the no-refraction limit stays expressible;
        // operations that need focusing power reject it themselves.
        if lens_index < ambient_index {
            return reject("lens_index", lens_index);
        }
        if !clear_aperture_diameter.is_finite() || clear_aperture_diameter <= 0.0 {
            return reject("clear_aperture_diameter", clear_aperture_diameter);
        }
        Ok(ThickLensSpec {
            radius_of_curvature,
            center_thickness,
            lens_index,
            ambient_index,
            clear_aperture_diameter,
        })
    }

    pub fn clear_aperture_radius(&self) -> f64 {
        self.clear_aperture_diameter / 2.0
    }
}

/// Reduction of a thick lens to an ideal thin lens followed by a stretch of
/// free space, `M = FreeSpace(L_eq) · ThinLens(f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalentLens {
    pub focal_length: f64,
    pub equivalent_free_length: f64,
}

impl EquivalentLens {
    pub fn matrix(&self) -> RayMatrix {
        RayMatrix::free_space(self.equivalent_free_length)
            .after(&RayMatrix::thin_lens(self.focal_length))
    }
}

/// Ray matrix of a planoconvex thick lens, curved face first: refraction at
/// the curved entry surface, translation through the glass, refraction at
/// the flat exit surface.
pub fn thick_lens_matrix(lens: &ThickLensSpec) -> RayMatrix {
    let n1 = lens.ambient_index;
    let n2 = lens.lens_index;
    let r = lens.radius_of_curvature;
    let h = lens.center_thickness;
    let entry = RayMatrix {
        a: 1.0,
        b: 0.0,
        c: (n1 - n2) / (n2 * r),
        d: n1 / n2,
    };
    let glass = RayMatrix::free_space(h);
    let exit = RayMatrix {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: n2 / n1,
    };
    exit.after(&glass).after(&entry)
}

/// Factor a thick lens into `FreeSpace(L_eq) · ThinLens(f)`.
///
/// Fails with [`Error::NoFocusingPower`] when the C entry vanishes
/// (`lens_index == ambient_index`).
pub fn equivalent_thin_lens(lens: &ThickLensSpec) -> Result<EquivalentLens> {
    let m = thick_lens_matrix(lens);
    if m.c == 0.0 {
        return Err(Error::NoFocusingPower);
    }
    Ok(EquivalentLens {
        focal_length: -1.0 / m.c,
        equivalent_free_length: m.b,
    })
}

/// Surface-to-surface air gap between adjacent lenses of the degenerate
/// ring, `s = 2f − L_eq`.
pub fn degenerate_spacing(lens: &ThickLensSpec) -> Result<f64> {
    let eq = equivalent_thin_lens(lens)?;
    Ok(2.0 * eq.focal_length - eq.equivalent_free_length)
}

/// Stability and degeneracy report of a round-trip ray matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyMetric {
    /// Round-trip Gouy angle `arccos((A+D)/2)`; `None` when unstable.
    pub gouy_angle: Option<f64>,
    /// `true` when stable and the Gouy angle is below [`DEGENERACY_TOL`].
    pub degenerate: bool,
    /// `true` when |A+D| ≤ 2.
    pub stable: bool,
}

/// Classify a round-trip matrix. Unstable paths are a valid report, not an
/// error.
pub fn degeneracy_metric(m: &RayMatrix) -> DegeneracyMetric {
    let half_trace = m.trace() / 2.0;
    if half_trace.abs() <= 1.0 + TRACE_SLACK {
        // Snap rounding noise to an exact zero so degenerate layouts report
        // offsets of exactly zero downstream.
        let theta = if half_trace >= 1.0 - HALF_TRACE_SNAP {
            0.0
        } else {
            half_trace.clamp(-1.0, 1.0).acos()
        };
        let theta = if theta < DEGENERACY_TOL { 0.0 } else { theta };
        DegeneracyMetric {
            gouy_angle: Some(theta),
            degenerate: theta == 0.0,
            stable: true,
        }
    } else {
        DegeneracyMetric {
            gouy_angle: None,
            degenerate: false,
            stable: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// Reference lens used across the test suites.
    pub(crate) fn reference_lens() -> ThickLensSpec {
        ThickLensSpec::new(38.9e-3, 4.0e-3, 1.51, 22.8e-3).unwrap()
    }

    #[test]
    fn thick_lens_matches_explicit_triple_product() {
        // Oracle: multiply the three constituent matrices numerically,
        // without the closed forms used by the implementation.
        let lens = reference_lens();
        let (n1, n2, r, h) = (1.0, 1.51, 38.9e-3, 4.0e-3);
        let entry = RayMatrix {
            a: 1.0,
            b: 0.0,
            c: (n1 - n2) / (n2 * r),
            d: n1 / n2,
        };
        let oracle = compose(&[entry, RayMatrix::free_space(h), RayMatrix {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: n2 / n1,
        }])
        .unwrap();

        let m = thick_lens_matrix(&lens);
        assert!(m.max_abs_diff(&oracle) < 1e-15);

        // Closed forms from the symbolic expansion of the product.
        assert_relative_eq!(m.c, -(n2 - 1.0) / r, max_relative = 1e-14);
        assert_relative_eq!(m.b, h / n2, max_relative = 1e-14);
        // Quoted figures: c = -0.013111 mm^-1, b = 2.6490 mm.
        assert_abs_diff_eq!(m.c * 1e-3, -0.013111, epsilon = 5e-7);
        assert_abs_diff_eq!(m.b * 1e3, 2.6490, epsilon = 5e-4);
        assert_relative_eq!(m.det(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn thin_lens_limit() {
        let lens = ThickLensSpec::new(38.9e-3, 1e-12, 1.51, 22.8e-3).unwrap();
        let m = thick_lens_matrix(&lens);
        let f = 38.9e-3 / 0.51;
        assert!(m.max_abs_diff(&RayMatrix::thin_lens(f)) < 1e-9);
    }

    #[test]
    fn matched_indices_give_identity() {
        for (r, h) in [(38.9e-3, 4.0e-3), (0.2, 0.01)] {
            let lens = ThickLensSpec::with_ambient(r, h, 1.0, 1.0, 22.8e-3).unwrap();
            let m = thick_lens_matrix(&lens);
            // No refraction: pure translation through h of index-matched glass.
            assert!(m.max_abs_diff(&RayMatrix::free_space(h)) < 1e-15);
            assert!(equivalent_thin_lens(&lens).is_err());
        }
    }

    #[test]
    fn rejects_non_physical_lenses() {
        assert!(ThickLensSpec::new(-38.9e-3, 4.0e-3, 1.51, 22.8e-3).is_err());
        assert!(ThickLensSpec::new(38.9e-3, -4.0e-3, 1.51, 22.8e-3).is_err());
        assert!(ThickLensSpec::new(38.9e-3, 4.0e-3, -1.0, 22.8e-3).is_err());
        assert!(ThickLensSpec::new(38.9e-3, 4.0e-3, 1.51, 0.0).is_err());
        assert!(ThickLensSpec::new(f64::NAN, 4.0e-3, 1.51, 22.8e-3).is_err());
    }

    #[test]
    fn equivalent_lens_reproduces_thick_matrix() {
        let lens = reference_lens();
        let eq = equivalent_thin_lens(&lens).unwrap();
        assert_relative_eq!(eq.focal_length * 1e3, 76.2745, max_relative = 1e-5);
        assert_relative_eq!(eq.equivalent_free_length * 1e3, 2.6490, max_relative = 1e-4);

        let rebuilt = eq.matrix();
        let m = thick_lens_matrix(&lens);
        assert_relative_eq!(rebuilt.a, m.a, max_relative = 1e-12);
        assert_relative_eq!(rebuilt.b, m.b, max_relative = 1e-12);
        assert_relative_eq!(rebuilt.c, m.c, max_relative = 1e-12);
        assert_relative_eq!(rebuilt.d, m.d, max_relative = 1e-12);
    }

    #[test]
    fn focal_length_closed_form() {
        // f = r/(n2-1) for n1 = 1, independent of thickness.
        let f0 = 0.1;
        let lens = ThickLensSpec::new(f0 * 0.5, 3e-3, 1.5, 25e-3).unwrap();
        let eq = equivalent_thin_lens(&lens).unwrap();
        assert_relative_eq!(eq.focal_length, f0, max_relative = 1e-12);

        let doubled = ThickLensSpec::new(f0 * 0.5, 6e-3, 1.5, 25e-3).unwrap();
        let eq2 = equivalent_thin_lens(&doubled).unwrap();
        assert_relative_eq!(eq2.focal_length, eq.focal_length, max_relative = 1e-12);
        assert_relative_eq!(
            eq2.equivalent_free_length,
            2.0 * eq.equivalent_free_length,
            max_relative = 1e-12
        );
    }

    #[test]
    fn degenerate_spacing_reference_value() {
        let s = degenerate_spacing(&reference_lens()).unwrap();
        // 2·76.2745 mm − 2.6490 mm.
        assert_abs_diff_eq!(s * 1e3, 149.900, epsilon = 5e-4);
    }

    #[test]
    fn degenerate_spacing_limits() {
        // Ideal thin lens: s -> 2f.
        let thin = ThickLensSpec::new(50e-3, 1e-13, 1.5, 25e-3).unwrap();
        let eq = equivalent_thin_lens(&thin).unwrap();
        let s = degenerate_spacing(&thin).unwrap();
        assert_relative_eq!(s, 2.0 * eq.focal_length, max_relative = 1e-9);

        // Large index: L_eq -> 0 absolutely, so s -> 2f absolutely.
        let dense = ThickLensSpec::new(50e-3, 4.0e-3, 1e4, 25e-3).unwrap();
        let eqd = equivalent_thin_lens(&dense).unwrap();
        let sd = degenerate_spacing(&dense).unwrap();
        assert!(eqd.equivalent_free_length < 1e-6);
        assert!((sd - 2.0 * eqd.focal_length).abs() < 1e-6);
    }

    #[test]
    fn compose_basics() {
        let id = RayMatrix::IDENTITY;
        assert_eq!(compose(&[id, id]).unwrap(), id);

        let total = compose(&[RayMatrix::free_space(0.3), RayMatrix::free_space(0.45)]).unwrap();
        assert!(total.max_abs_diff(&RayMatrix::free_space(0.75)) < 1e-15);

        assert!(compose(&[]).is_err());
    }

    #[test]
    fn degenerate_ring_composes_to_identity() {
        let lens = reference_lens();
        let s = degenerate_spacing(&lens).unwrap();
        let m_lens = thick_lens_matrix(&lens);
        let mut path = Vec::new();
        for _ in 0..4 {
            path.push(m_lens);
            path.push(RayMatrix::free_space(s));
        }
        let ring = compose(&path).unwrap();
        assert!(
            ring.max_abs_diff(&RayMatrix::IDENTITY) < 1e-10,
            "ring deviates from identity: {ring:?}"
        );

        let metric = degeneracy_metric(&ring);
        assert!(metric.stable);
        assert!(metric.degenerate);
        assert_eq!(metric.gouy_angle, Some(0.0));
    }

    #[test]
    fn metric_special_points() {
        let id = degeneracy_metric(&RayMatrix::IDENTITY);
        assert_eq!(id.gouy_angle, Some(0.0));
        assert!(id.degenerate);

        // Trace zero, e.g. a confocal-like path.
        let m = RayMatrix {
            a: 0.0,
            b: 0.1,
            c: -10.0,
            d: 0.0,
        };
        let metric = degeneracy_metric(&m);
        assert_abs_diff_eq!(
            metric.gouy_angle.unwrap(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-15
        );
        assert!(!metric.degenerate);

        let unstable = degeneracy_metric(&RayMatrix {
            a: 1.5,
            b: 0.0,
            c: 0.0,
            d: 1.5,
        });
        assert!(!unstable.stable);
        assert_eq!(unstable.gouy_angle, None);
    }

    /// The literal single-lens axial displacement (upstream gap −δ,
    /// downstream gap +δ) makes the ring weakly hyperbolic: the half trace
    /// becomes 1 + (δ/f)²/2 exactly, so the metric must report unstable.
    #[test]
    fn literal_axial_displacement_is_hyperbolic() {
        let lens = reference_lens();
        let s = degenerate_spacing(&lens).unwrap();
        let eq = equivalent_thin_lens(&lens).unwrap();
        let m_lens = thick_lens_matrix(&lens);
        let delta = 1.0e-3;

        let gaps = [s - delta, s + delta, s, s];
        let mut path = Vec::new();
        for gap in gaps {
            path.push(m_lens);
            path.push(RayMatrix::free_space(gap));
        }
        let ring = compose(&path).unwrap();
        let u = delta / eq.focal_length;
        assert_relative_eq!(ring.trace(), 2.0 + u * u, max_relative = 1e-9);

        let metric = degeneracy_metric(&ring);
        assert!(!metric.stable);
        assert_eq!(metric.gouy_angle, None);
    }

    /// Lengthening both gaps that flank one lens by δ keeps the ring stable
    /// with half trace 1 − (δ/f)²/2 exactly; the Gouy angle is ≈ δ/f. This
    /// is the perturbation the displaced scenarios use.
    #[test]
    fn spacing_detuning_regression() {
        let lens = reference_lens();
        let s = degenerate_spacing(&lens).unwrap();
        let eq = equivalent_thin_lens(&lens).unwrap();
        let m_lens = thick_lens_matrix(&lens);
        let delta = 1.0e-3;

        let gaps = [s + delta, s + delta, s, s];
        let mut path = Vec::new();
        for gap in gaps {
            path.push(m_lens);
            path.push(RayMatrix::free_space(gap));
        }
        let ring = compose(&path).unwrap();
        let u = delta / eq.focal_length;
        assert_relative_eq!(ring.trace(), 2.0 - u * u, max_relative = 1e-9);

        let metric = degeneracy_metric(&ring);
        assert!(metric.stable);
        assert!(!metric.degenerate);
        let theta = metric.gouy_angle.unwrap();
        let expected = (1.0 - u * u / 2.0).acos();
        assert_relative_eq!(theta, expected, max_relative = 1e-9);
        // Regression value for delta = 1 mm on the reference lens.
        assert_abs_diff_eq!(theta, 0.013110643, epsilon = 1e-8);
    }

    #[test]
    fn self_consistent_q_round_trips() {
        // Mode-matched rotation: q* = i z_R by construction.
        let z_r = 0.37;
        let theta: f64 = 0.21;
        let m = RayMatrix {
            a: theta.cos(),
            b: z_r * theta.sin(),
            c: -theta.sin() / z_r,
            d: theta.cos(),
        };
        let q = m.self_consistent_q().unwrap();
        assert_abs_diff_eq!(q.re, 0.0, epsilon = 1e-12);
        assert_relative_eq!(q.im, z_r, max_relative = 1e-12);

        // q must reproduce itself through the matrix.
        let mapped = (m.a * q + m.b) / (m.c * q + m.d);
        assert!((mapped - q).norm() < 1e-12);

        assert!(RayMatrix::IDENTITY.self_consistent_q().is_none());
    }
}
