//! Full-cavity wave-optics checks: self-reproduction in the degenerate
//! ring, linearity, ray/wave Gouy consistency for detuned rings, and the
//! power-iteration eigenmode solver.

mod common;

use common::{default_geometry, reference_lens, reference_ring, ring_segment_b, self_pitched_grid};
use lgcavity::cavity::{CavityLayout, MirrorSpec};
use lgcavity::modes::{sample_mode, superpose, ModeCoefficients};
use lgcavity::{
    decompose, degeneracy_metric, fox_li_dominant_mode, round_trip, BeamGeometry, LGIndex,
    ThickLensSpec,
};
use num_complex::Complex64;

fn lossless_ring(lens: ThickLensSpec) -> CavityLayout {
    let perfect = MirrorSpec {
        reflectivity: 1.0,
        transmittance: 0.0,
    };
    CavityLayout::degenerate_ring(lens, [perfect; 4], 1.0).unwrap()
}

/// Geometry matched to the self-consistent beam parameter of a stable ring,
/// referenced to the plane before the first element.
fn matched_geometry(layout: &CavityLayout, wavelength: f64) -> BeamGeometry {
    let q = layout
        .ray_matrix()
        .self_consistent_q()
        .expect("stable non-degenerate ring");
    BeamGeometry::from_q(wavelength, q, 0.0).unwrap()
}

#[test]
fn degenerate_ring_reproduces_modes() {
    let ring = reference_ring();
    let geom = default_geometry();
    let grid = self_pitched_grid(256, geom.wavelength, ring_segment_b(&reference_lens()));

    for index in [LGIndex::new(0, 0), LGIndex::new(0, 5), LGIndex::new(0, -8)] {
        let input = sample_mode(index, &geom, &grid, 0.0).unwrap();
        let output = round_trip(&input, &ring).unwrap();
        assert!(output.grid.compatible_with(&input.grid));
        let overlap = input.normalized_overlap_sq(&output).unwrap();
        assert!(
            overlap > 1.0 - 1e-4,
            "{index}: round-trip overlap {overlap}"
        );
    }
}

#[test]
fn round_trip_is_linear_on_superpositions() {
    let ring = reference_ring();
    let geom = default_geometry();
    let grid = self_pitched_grid(256, geom.wavelength, ring_segment_b(&reference_lens()));

    let basis = [
        LGIndex::new(0, 0),
        LGIndex::new(0, 2),
        LGIndex::new(0, -3),
        LGIndex::new(1, 1),
    ];
    let mut coeffs = ModeCoefficients::from_pairs(
        geom,
        [
            (basis[0], Complex64::new(0.4, 0.1)),
            (basis[1], Complex64::new(-0.3, 0.5)),
            (basis[2], Complex64::new(0.2, -0.6)),
            (basis[3], Complex64::new(0.1, 0.25)),
        ],
    );
    coeffs.normalize().unwrap();

    let input = superpose(&coeffs, &grid, 0.0).unwrap();
    let output = round_trip(&input, &ring).unwrap();

    let c_in = decompose(&input, &basis, &geom, 0.0).unwrap().coefficients;
    let c_out = decompose(&output, &basis, &geom, 0.0).unwrap().coefficients;

    // One common complex factor (loss plus a global phase) on every
    // coefficient.
    let reference_ratio = c_out.get(basis[0]) / c_in.get(basis[0]);
    for &index in &basis {
        let ratio = c_out.get(index) / c_in.get(index);
        assert!(
            (ratio - reference_ratio).norm() < 1e-5,
            "{index}: ratio {ratio} vs {reference_ratio}"
        );
    }
}

#[test]
fn detuned_ring_phases_match_ray_gouy_angle() {
    let lens = reference_lens();
    let ring = lossless_ring(lens)
        .with_spacing_detuning(0, 0.8e-3)
        .unwrap();
    let metric = degeneracy_metric(&ring.ray_matrix());
    let theta_ray = metric.gouy_angle.expect("stable detuned ring");
    assert!(theta_ray > 1e-3);

    let geom = matched_geometry(&ring, 780e-9);
    let grid = self_pitched_grid(256, geom.wavelength, ring_segment_b(&lens));

    let modes = [
        LGIndex::new(0, 0),
        LGIndex::new(0, 1),
        LGIndex::new(0, 2),
        LGIndex::new(0, 3),
        LGIndex::new(1, 0),
        LGIndex::new(1, 1),
        LGIndex::new(2, 0),
    ];
    let amp = Complex64::new(1.0 / (modes.len() as f64).sqrt(), 0.0);
    let coeffs = ModeCoefficients::from_pairs(geom, modes.iter().map(|&m| (m, amp)));

    let input = superpose(&coeffs, &grid, 0.0).unwrap();
    let output = round_trip(&input, &ring).unwrap();
    assert!(
        output.grid.compatible_with(&input.grid),
        "palindromic detuning must preserve the pitch"
    );

    let c_in = decompose(&input, &modes, &geom, 0.0).unwrap().coefficients;
    let c_out = decompose(&output, &modes, &geom, 0.0).unwrap().coefficients;

    let orders: Vec<f64> = modes.iter().map(|m| m.mode_order()).collect();
    let phases: Vec<f64> = modes
        .iter()
        .map(|&m| (c_out.get(m) / c_in.get(m)).arg())
        .collect();
    let slope = lgcavity::analysis::fit_phase_slope(&orders, &phases).unwrap();
    assert!(
        (slope.abs() - theta_ray).abs() < 1e-4,
        "wave slope {slope:.6} vs ray angle {theta_ray:.6}"
    );
}

#[test]
fn fox_li_returns_seed_for_degenerate_ring() {
    let ring = lossless_ring(reference_lens());
    let geom = default_geometry();
    let grid = self_pitched_grid(256, geom.wavelength, ring_segment_b(&reference_lens()));

    let mut coeffs = ModeCoefficients::from_pairs(
        geom,
        [
            (LGIndex::new(0, 1), Complex64::new(0.6, 0.0)),
            (LGIndex::new(0, -4), Complex64::new(0.0, 0.8)),
        ],
    );
    coeffs.normalize().unwrap();
    let seed = superpose(&coeffs, &grid, 0.0).unwrap();

    let outcome = fox_li_dominant_mode(&ring, &seed, 20, 1e-6).unwrap();
    assert!(outcome.converged);
    assert_eq!(outcome.iterations, 1);
    let overlap = seed.normalized_overlap_sq(&outcome.mode).unwrap();
    assert!(overlap > 1.0 - 1e-6, "mode vs seed overlap {overlap}");
    assert!((outcome.round_trip_eigenvalue.norm() - 1.0).abs() < 1e-6);
}

#[test]
fn fox_li_fixed_point_converges_immediately() {
    let lens = reference_lens();
    let ring = lossless_ring(lens)
        .with_spacing_detuning(0, 0.8e-3)
        .unwrap();
    let geom = matched_geometry(&ring, 780e-9);
    let grid = self_pitched_grid(256, geom.wavelength, ring_segment_b(&lens));
    let seed = sample_mode(LGIndex::new(0, 0), &geom, &grid, 0.0).unwrap();

    let outcome = fox_li_dominant_mode(&ring, &seed, 10, 1e-6).unwrap();
    assert!(outcome.converged, "residual {}", outcome.residual);
    assert_eq!(outcome.iterations, 1);
    assert!(outcome.round_trip_eigenvalue.norm() <= 1.0 + 1e-9);
    // Lossless ring: the multiplier is the pure Gouy phase of the mode.
    let theta = degeneracy_metric(&ring.ray_matrix())
        .gouy_angle
        .unwrap();
    let expected = Complex64::from_polar(1.0, theta);
    assert!(
        (outcome.round_trip_eigenvalue - expected).norm() < 1e-4,
        "eigenvalue {} vs {}",
        outcome.round_trip_eigenvalue,
        expected
    );
}

#[test]
fn fox_li_converges_to_lowest_loss_mode_under_aperture() {
    // Tight lens apertures discriminate the transverse orders; noise must
    // settle on the matched fundamental.
    let lens = ThickLensSpec::new(38.9e-3, 4.0e-3, 1.51, 0.44e-3).unwrap();
    let perfect = MirrorSpec {
        reflectivity: 1.0,
        transmittance: 0.0,
    };
    let ring = CavityLayout::degenerate_ring(lens, [perfect; 4], 1.0)
        .unwrap()
        .with_spacing_detuning(0, 0.8e-3)
        .unwrap();
    let geom = matched_geometry(&ring, 780e-9);
    let grid = self_pitched_grid(256, geom.wavelength, ring_segment_b(&lens));

    // Deterministic speckle seed.
    let mut seed = lgcavity::SampledField::zeros(grid, geom.wavelength).unwrap();
    let mut state = 0x243f6a8885a308d3u64;
    for value in seed.amplitudes.iter_mut() {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let re = ((state >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let im = ((state >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
        *value = Complex64::new(re, im);
    }

    let outcome = fox_li_dominant_mode(&ring, &seed, 400, 1e-5).unwrap();
    assert!(outcome.converged, "residual stuck at {}", outcome.residual);
    assert!(outcome.round_trip_eigenvalue.norm() <= 1.0 + 1e-9);
    assert!(outcome.round_trip_eigenvalue.norm() < 1.0);

    let fundamental = sample_mode(LGIndex::new(0, 0), &geom, &grid, 0.0).unwrap();
    let overlap = fundamental.normalized_overlap_sq(&outcome.mode).unwrap();
    assert!(overlap > 0.9, "fundamental overlap {overlap}");
}

#[test]
fn fox_li_reports_non_convergence_with_residual() {
    // One iteration cannot settle a far-from-eigenmode seed in a lossy
    // cavity; the outcome must say so and carry the last residual.
    let lens = ThickLensSpec::new(38.9e-3, 4.0e-3, 1.51, 0.44e-3).unwrap();
    let perfect = MirrorSpec {
        reflectivity: 1.0,
        transmittance: 0.0,
    };
    let ring = CavityLayout::degenerate_ring(lens, [perfect; 4], 1.0)
        .unwrap()
        .with_spacing_detuning(0, 0.8e-3)
        .unwrap();
    let geom = matched_geometry(&ring, 780e-9);
    let grid = self_pitched_grid(256, geom.wavelength, ring_segment_b(&lens));
    // Strongly mixed seed, far from the aperture-selected fundamental.
    let mut coeffs = ModeCoefficients::from_pairs(
        geom,
        [
            (LGIndex::new(0, 3), Complex64::new(0.8, 0.0)),
            (LGIndex::new(2, 0), Complex64::new(0.0, 0.6)),
        ],
    );
    coeffs.normalize().unwrap();
    let seed = superpose(&coeffs, &grid, 0.0).unwrap();

    let outcome = fox_li_dominant_mode(&ring, &seed, 1, 1e-9).unwrap();
    assert!(!outcome.converged);
    assert_eq!(outcome.iterations, 1);
    assert!(outcome.residual > 1e-9 && outcome.residual.is_finite());
    assert!(outcome.round_trip_eigenvalue.norm() <= 1.0 + 1e-9);
}

#[test]
fn fox_li_rejects_unstable_and_empty_seeds() {
    let ring = reference_ring();
    let geom = default_geometry();
    let grid = self_pitched_grid(256, geom.wavelength, ring_segment_b(&reference_lens()));

    let zero = lgcavity::SampledField::zeros(grid, geom.wavelength).unwrap();
    assert!(matches!(
        fox_li_dominant_mode(&ring, &zero, 5, 1e-6),
        Err(lgcavity::Error::ZeroPower)
    ));

    let unstable = ring.with_axial_displacement(0, 1e-3).unwrap();
    let seed = sample_mode(LGIndex::new(0, 0), &geom, &grid, 0.0).unwrap();
    assert!(matches!(
        fox_li_dominant_mode(&unstable, &seed, 5, 1e-6),
        Err(lgcavity::Error::Unstable { .. })
    ));
}
