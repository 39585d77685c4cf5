//! The run manifest: inputs echoed, derived quantities recomputed from
//! first principles, output inventory and final status. Written for every
//! run, including failed ones, with no volatile fields so identical runs
//! produce identical bytes.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Derived, ScenarioConfig, Spacing};

#[derive(Serialize)]
struct ManifestRun {
    scenario: String,
    seed: u64,
    status: String,
    failures: Vec<String>,
    warnings: Vec<String>,
    defaults_applied: Vec<String>,
}

#[derive(Serialize)]
struct ManifestCavity {
    lens_radius_m: f64,
    lens_thickness_m: f64,
    lens_index: f64,
    clear_aperture_m: f64,
    spacing: String,
    mirror_reflectivity: Vec<f64>,
    mirror_transmittance: Vec<f64>,
    lens_transmittance: f64,
    displacement_m: f64,
}

#[derive(Serialize)]
struct ManifestBeam {
    wavelength_m: f64,
    waist_m: f64,
    grid_n: usize,
    grid_pitch_m: f64,
}

#[derive(Serialize)]
struct ManifestDerived {
    focal_length_m: f64,
    equivalent_free_length_m: f64,
    spacing_m: f64,
    optical_path_m: f64,
    fsr_hz: f64,
    round_trip_survival: f64,
    finesse: f64,
    fwhm_hz: f64,
    hwhm_hz: f64,
}

#[derive(Serialize)]
struct ManifestOutputs {
    csv: Vec<String>,
    images: Vec<String>,
}

#[derive(Serialize)]
struct Manifest {
    schema: String,
    run: ManifestRun,
    cavity: ManifestCavity,
    beam: ManifestBeam,
    derived: ManifestDerived,
    /// Scenario-specific derived values (calibrated displacement, Gouy
    /// angle, grids actually used, image normalization policy).
    notes: std::collections::BTreeMap<String, String>,
    outputs: ManifestOutputs,
}

pub struct ManifestBuilder {
    scenario: String,
    seed: u64,
    config: ScenarioConfig,
    derived: Derived,
    pub notes: std::collections::BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl ManifestBuilder {
    pub fn new(scenario: &str, seed: u64, config: &ScenarioConfig, derived: Derived) -> Self {
        let warnings = config.expectation_warnings(&derived);
        ManifestBuilder {
            scenario: scenario.to_string(),
            seed,
            config: config.clone(),
            derived,
            notes: std::collections::BTreeMap::new(),
            warnings,
        }
    }

    pub fn note(&mut self, key: &str, value: impl std::fmt::Display) {
        self.notes.insert(key.to_string(), value.to_string());
    }

    /// Serialize and write `manifest.toml`; returns its path.
    pub fn write(
        &self,
        out_dir: &Path,
        failures: &[String],
        csv: &[PathBuf],
        images: &[PathBuf],
    ) -> std::io::Result<PathBuf> {
        let config = &self.config;
        let manifest = Manifest {
            schema: "lgcavity.manifest.v1".to_string(),
            run: ManifestRun {
                scenario: self.scenario.clone(),
                seed: self.seed,
                status: if failures.is_empty() {
                    "ok".to_string()
                } else {
                    "failed".to_string()
                },
                failures: failures.to_vec(),
                warnings: self.warnings.clone(),
                defaults_applied: config.defaults_applied.clone(),
            },
            cavity: ManifestCavity {
                lens_radius_m: config.cavity.lens.radius_of_curvature,
                lens_thickness_m: config.cavity.lens.center_thickness,
                lens_index: config.cavity.lens.lens_index,
                clear_aperture_m: config.cavity.lens.clear_aperture_diameter,
                spacing: match config.cavity.spacing {
                    Spacing::AutoDegenerate => "auto-degenerate".to_string(),
                    Spacing::Explicit(s) => format!("{s:.9e}m"),
                },
                mirror_reflectivity: config
                    .cavity
                    .mirrors
                    .iter()
                    .map(|m| m.reflectivity)
                    .collect(),
                mirror_transmittance: config
                    .cavity
                    .mirrors
                    .iter()
                    .map(|m| m.transmittance)
                    .collect(),
                lens_transmittance: config.cavity.lens_transmittance,
                displacement_m: config.cavity.displacement,
            },
            beam: ManifestBeam {
                wavelength_m: config.beam.wavelength,
                waist_m: config.beam.waist,
                grid_n: config.beam.grid_n,
                grid_pitch_m: config.beam.grid_pitch,
            },
            derived: ManifestDerived {
                focal_length_m: self.derived.focal_length_m,
                equivalent_free_length_m: self.derived.equivalent_free_length_m,
                spacing_m: self.derived.spacing_m,
                optical_path_m: self.derived.optical_path_m,
                fsr_hz: self.derived.fsr_hz,
                round_trip_survival: self.derived.survival,
                finesse: self.derived.finesse,
                fwhm_hz: self.derived.fwhm_hz,
                hwhm_hz: self.derived.hwhm_hz,
            },
            notes: self.notes.clone(),
            outputs: ManifestOutputs {
                csv: csv.iter().map(|p| file_name(p)).collect(),
                images: images.iter().map(|p| file_name(p)).collect(),
            },
        };
        let text = toml::to_string_pretty(&manifest).expect("manifest serializes");
        let path = out_dir.join("manifest.toml");
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}
