//! Scenario configuration: a TOML file with explicit unit suffixes,
//! validated into SI quantities. Unknown keys are rejected; omitted beam
//! settings fall back to recorded defaults.

use std::path::Path;

use serde::Deserialize;

use lgcavity::cavity::{CavityLayout, Element, LensKind, Linewidth, MirrorSpec};
use lgcavity::{
    degenerate_spacing, equivalent_thin_lens, BeamGeometry, GridSpec, ThickLensSpec,
};

use crate::units::{parse_frequency, parse_length, parse_time};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    cavity: RawCavity,
    beam: Option<RawBeam>,
    scenario: Option<RawScenario>,
    expect: Option<RawExpect>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCavity {
    lens_radius: String,
    lens_thickness: String,
    lens_index: f64,
    clear_aperture: String,
    /// "auto-degenerate" or an explicit length.
    spacing: Option<String>,
    mirror_reflectivity: Option<Vec<f64>>,
    mirror_transmittance: Option<Vec<f64>>,
    lens_transmittance: Option<f64>,
    /// Spacing detuning applied at lens 1 for the displaced variants.
    displacement: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBeam {
    wavelength: Option<String>,
    waist: Option<String>,
    grid_n: Option<usize>,
    grid_pitch: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    charges: Option<Vec<i32>>,
    dispersion_max_charge: Option<i32>,
    threshold: Option<String>,
    threshold_charge: Option<u32>,
    ramp_period: Option<String>,
    ramp_span_fsr: Option<f64>,
    scan_samples: Option<usize>,
    image_format: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExpect {
    fsr: Option<String>,
    finesse: Option<f64>,
    fwhm: Option<String>,
    hwhm: Option<String>,
}

/// Lens spacing policy for the ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spacing {
    AutoDegenerate,
    Explicit(f64),
}

#[derive(Debug, Clone)]
pub struct CavitySettings {
    pub lens: ThickLensSpec,
    pub spacing: Spacing,
    pub mirrors: [MirrorSpec; 4],
    pub lens_transmittance: f64,
    pub displacement: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct BeamSettings {
    pub wavelength: f64,
    pub waist: f64,
    pub grid_n: usize,
    pub grid_pitch: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    Png,
}

impl ImageFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            ImageFormat::Pgm => "pgm",
            ImageFormat::Png => "png",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioSettings {
    /// Topological charges exercised by the scan and image scenarios; both
    /// signs are generated for nonzero entries. Each scenario has its own
    /// default set when omitted.
    pub charges: Option<Vec<i32>>,
    pub dispersion_max_charge: i32,
    pub threshold_hz: f64,
    pub threshold_charge: u32,
    pub ramp_period_s: f64,
    pub ramp_span_fsr: f64,
    pub scan_samples: usize,
    pub image_format: ImageFormat,
}

#[derive(Debug, Clone, Default)]
pub struct Expectations {
    pub fsr_hz: Option<f64>,
    pub finesse: Option<f64>,
    pub fwhm_hz: Option<f64>,
    pub hwhm_hz: Option<f64>,
}

/// Derived first-principles quantities, recomputed on every load and echoed
/// in the manifest.
#[derive(Debug, Clone, Copy)]
pub struct Derived {
    pub focal_length_m: f64,
    pub equivalent_free_length_m: f64,
    pub spacing_m: f64,
    pub optical_path_m: f64,
    pub fsr_hz: f64,
    pub survival: f64,
    pub finesse: f64,
    pub fwhm_hz: f64,
    pub hwhm_hz: f64,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub cavity: CavitySettings,
    pub beam: BeamSettings,
    pub scenario: ScenarioSettings,
    pub expect: Expectations,
    /// Names of settings that fell back to defaults.
    pub defaults_applied: Vec<String>,
}

/// Configuration failure: parse errors carry the TOML location, validation
/// errors list every violated constraint.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

const DEFAULT_WAVELENGTH: f64 = 780e-9;
const DEFAULT_WAIST: f64 = 0.75e-3;
const DEFAULT_GRID_N: usize = 512;
const DEFAULT_GRID_PITCH: f64 = 20e-6;

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| ConfigError(format!("config parse error: {e}")))?;

    let mut violations: Vec<String> = Vec::new();
    let mut defaults: Vec<String> = Vec::new();

    let mut get_length = |field: &str, value: &str| match parse_length(value) {
        Ok(v) => v,
        Err(e) => {
            violations.push(format!("cavity.{field}: {e}"));
            f64::NAN
        }
    };

    let lens_radius = get_length("lens_radius", &raw.cavity.lens_radius);
    let lens_thickness = get_length("lens_thickness", &raw.cavity.lens_thickness);
    let clear_aperture = get_length("clear_aperture", &raw.cavity.clear_aperture);

    let lens = if violations.is_empty() {
        match ThickLensSpec::new(lens_radius, lens_thickness, raw.cavity.lens_index, clear_aperture)
        {
            Ok(lens) => Some(lens),
            Err(e) => {
                violations.push(format!("cavity lens: {e}"));
                None
            }
        }
    } else {
        None
    };

    let spacing = match raw.cavity.spacing.as_deref() {
        None | Some("auto-degenerate") | Some("auto") => Spacing::AutoDegenerate,
        Some(text) => match parse_length(text) {
            Ok(v) if v > 0.0 => Spacing::Explicit(v),
            Ok(v) => {
                violations.push(format!("cavity.spacing: non-positive length {v}"));
                Spacing::AutoDegenerate
            }
            Err(e) => {
                violations.push(format!("cavity.spacing: {e}"));
                Spacing::AutoDegenerate
            }
        },
    };

    let reflectivities = raw
        .cavity
        .mirror_reflectivity
        .unwrap_or_else(|| vec![0.9999, 0.9999, 0.93, 0.93]);
    if reflectivities.len() != 4 {
        violations.push(format!(
            "cavity.mirror_reflectivity: expected 4 entries, got {}",
            reflectivities.len()
        ));
    }
    let transmittances = raw
        .cavity
        .mirror_transmittance
        .unwrap_or_else(|| reflectivities.iter().map(|r| (1.0 - r).max(0.0)).collect());
    if transmittances.len() != 4 {
        violations.push(format!(
            "cavity.mirror_transmittance: expected 4 entries, got {}",
            transmittances.len()
        ));
    }
    let mut mirrors = [MirrorSpec {
        reflectivity: 1.0,
        transmittance: 0.0,
    }; 4];
    if reflectivities.len() == 4 && transmittances.len() == 4 {
        for i in 0..4 {
            match MirrorSpec::new(reflectivities[i], transmittances[i]) {
                Ok(m) => mirrors[i] = m,
                Err(e) => violations.push(format!("cavity mirror {i}: {e}")),
            }
        }
    }

    let lens_transmittance = raw.cavity.lens_transmittance.unwrap_or(0.999);
    if !(0.0..=1.0).contains(&lens_transmittance) {
        violations.push(format!(
            "cavity.lens_transmittance: {lens_transmittance} outside [0, 1]"
        ));
    }

    let displacement = match raw.cavity.displacement.as_deref() {
        None => 0.0,
        Some(text) => match parse_length(text) {
            Ok(v) if v >= 0.0 => v,
            Ok(v) => {
                violations.push(format!("cavity.displacement: negative length {v}"));
                0.0
            }
            Err(e) => {
                violations.push(format!("cavity.displacement: {e}"));
                0.0
            }
        },
    };

    let beam = raw.beam.unwrap_or(RawBeam {
        wavelength: None,
        waist: None,
        grid_n: None,
        grid_pitch: None,
    });
    let wavelength = match beam.wavelength {
        Some(ref text) => parse_length(text).unwrap_or_else(|e| {
            violations.push(format!("beam.wavelength: {e}"));
            f64::NAN
        }),
        None => {
            defaults.push("beam.wavelength".into());
            DEFAULT_WAVELENGTH
        }
    };
    let waist = match beam.waist {
        Some(ref text) => parse_length(text).unwrap_or_else(|e| {
            violations.push(format!("beam.waist: {e}"));
            f64::NAN
        }),
        None => {
            defaults.push("beam.waist".into());
            DEFAULT_WAIST
        }
    };
    let grid_n = match beam.grid_n {
        Some(n) => {
            if !n.is_power_of_two() || n < 32 {
                violations.push(format!("beam.grid_n: {n} must be a power of two, at least 32"));
            }
            n
        }
        None => {
            defaults.push("beam.grid_n".into());
            DEFAULT_GRID_N
        }
    };
    let grid_pitch = match beam.grid_pitch {
        Some(ref text) => parse_length(text).unwrap_or_else(|e| {
            violations.push(format!("beam.grid_pitch: {e}"));
            f64::NAN
        }),
        None => {
            defaults.push("beam.grid_pitch".into());
            DEFAULT_GRID_PITCH
        }
    };

    let scn = raw.scenario.unwrap_or(RawScenario {
        charges: None,
        dispersion_max_charge: None,
        threshold: None,
        threshold_charge: None,
        ramp_period: None,
        ramp_span_fsr: None,
        scan_samples: None,
        image_format: None,
    });
    let charges = scn.charges;
    if charges.is_none() {
        defaults.push("scenario.charges".into());
    }
    let dispersion_max_charge = scn.dispersion_max_charge.unwrap_or(15);
    if dispersion_max_charge < 1 {
        violations.push(format!(
            "scenario.dispersion_max_charge: {dispersion_max_charge} must be positive"
        ));
    }
    let threshold_hz = match scn.threshold {
        Some(ref text) => parse_frequency(text).unwrap_or_else(|e| {
            violations.push(format!("scenario.threshold: {e}"));
            f64::NAN
        }),
        None => 12e6,
    };
    let threshold_charge = scn.threshold_charge.unwrap_or(7);
    if threshold_charge == 0 {
        violations.push("scenario.threshold_charge: must be at least 1".into());
    }
    let ramp_period_s = match scn.ramp_period {
        Some(ref text) => parse_time(text).unwrap_or_else(|e| {
            violations.push(format!("scenario.ramp_period: {e}"));
            f64::NAN
        }),
        None => {
            defaults.push("scenario.ramp_period".into());
            0.1
        }
    };
    let ramp_span_fsr = scn.ramp_span_fsr.unwrap_or_else(|| {
        defaults.push("scenario.ramp_span_fsr".into());
        1.5
    });
    if ramp_span_fsr.is_nan() || ramp_span_fsr <= 0.0 {
        violations.push(format!("scenario.ramp_span_fsr: {ramp_span_fsr} must be positive"));
    }
    let scan_samples = scn.scan_samples.unwrap_or(4000);
    if scan_samples < 16 {
        violations.push(format!("scenario.scan_samples: {scan_samples} below 16"));
    }
    let image_format = match scn.image_format.as_deref() {
        None | Some("pgm") => ImageFormat::Pgm,
        Some("png") => ImageFormat::Png,
        Some(other) => {
            violations.push(format!("scenario.image_format: unknown format {other:?}"));
            ImageFormat::Pgm
        }
    };

    let mut expect = Expectations::default();
    if let Some(raw_expect) = raw.expect {
        if let Some(ref text) = raw_expect.fsr {
            match parse_frequency(text) {
                Ok(v) => expect.fsr_hz = Some(v),
                Err(e) => violations.push(format!("expect.fsr: {e}")),
            }
        }
        expect.finesse = raw_expect.finesse;
        if let Some(ref text) = raw_expect.fwhm {
            match parse_frequency(text) {
                Ok(v) => expect.fwhm_hz = Some(v),
                Err(e) => violations.push(format!("expect.fwhm: {e}")),
            }
        }
        if let Some(ref text) = raw_expect.hwhm {
            match parse_frequency(text) {
                Ok(v) => expect.hwhm_hz = Some(v),
                Err(e) => violations.push(format!("expect.hwhm: {e}")),
            }
        }
    }

    if !violations.is_empty() {
        return Err(ConfigError(format!(
            "config validation failed:\n  - {}",
            violations.join("\n  - ")
        )));
    }

    let config = ScenarioConfig {
        cavity: CavitySettings {
            lens: lens.expect("validated"),
            spacing,
            mirrors,
            lens_transmittance,
            displacement,
        },
        beam: BeamSettings {
            wavelength,
            waist,
            grid_n,
            grid_pitch,
        },
        scenario: ScenarioSettings {
            charges,
            dispersion_max_charge,
            threshold_hz,
            threshold_charge,
            ramp_period_s,
            ramp_span_fsr,
            scan_samples,
            image_format,
        },
        expect,
        defaults_applied: defaults,
    };

    // The layout itself must construct.
    config
        .layout()
        .map_err(|e| ConfigError(format!("config produces an invalid layout: {e}")))?;
    config
        .beam_geometry()
        .map_err(|e| ConfigError(format!("config produces an invalid beam: {e}")))?;
    config
        .sampling_grid()
        .map_err(|e| ConfigError(format!("config produces an invalid grid: {e}")))?;

    Ok(config)
}

impl ScenarioConfig {
    /// Resolved lens spacing (auto-degenerate or explicit).
    pub fn spacing(&self) -> lgcavity::Result<f64> {
        match self.cavity.spacing {
            Spacing::AutoDegenerate => degenerate_spacing(&self.cavity.lens),
            Spacing::Explicit(s) => Ok(s),
        }
    }

    /// The ring without any displacement.
    pub fn layout(&self) -> lgcavity::Result<CavityLayout> {
        let s = self.spacing()?;
        let mut elements = Vec::with_capacity(16);
        for mirror in self.cavity.mirrors {
            elements.push(Element::Lens {
                kind: LensKind::Thick(self.cavity.lens),
                transmittance: self.cavity.lens_transmittance,
            });
            elements.push(Element::FreeSpace(s / 2.0));
            elements.push(Element::Mirror(mirror));
            elements.push(Element::FreeSpace(s / 2.0));
        }
        CavityLayout::new(elements)
    }

    /// The ring with the configured (or supplied) spacing detuning applied
    /// at lens 1.
    pub fn displaced_layout(&self, displacement: f64) -> lgcavity::Result<CavityLayout> {
        self.layout()?.with_spacing_detuning(0, displacement)
    }

    pub fn beam_geometry(&self) -> lgcavity::Result<BeamGeometry> {
        BeamGeometry::new(self.beam.wavelength, self.beam.waist, 0.0)
    }

    /// Grid from the configured n and pitch (mode sampling, diagnostics).
    pub fn sampling_grid(&self) -> lgcavity::Result<GridSpec> {
        GridSpec::centered(self.beam.grid_n, self.beam.grid_pitch)
    }

    /// Grid matched to the ring's lens-to-lens relay: the transform of each
    /// segment maps this pitch onto itself, so a round trip ends on the grid
    /// it started from and the chirp stays inside its sampling bound.
    pub fn relay_grid(&self) -> lgcavity::Result<GridSpec> {
        let eq = equivalent_thin_lens(&self.cavity.lens)?;
        let b = self.spacing()? + eq.equivalent_free_length;
        let pitch = (self.beam.wavelength * b / self.beam.grid_n as f64).sqrt();
        GridSpec::centered(self.beam.grid_n, pitch)
    }

    /// First-principles quantities; never copied from the config.
    pub fn derived(&self) -> lgcavity::Result<Derived> {
        let eq = equivalent_thin_lens(&self.cavity.lens)?;
        let layout = self.layout()?;
        let fsr = layout.free_spectral_range();
        let (finesse, fwhm, hwhm) = match layout.linewidth()? {
            Linewidth::Finite {
                fwhm,
                hwhm,
                finesse,
            } => (finesse, fwhm, hwhm),
            Linewidth::Unbounded => (f64::INFINITY, 0.0, 0.0),
        };
        Ok(Derived {
            focal_length_m: eq.focal_length,
            equivalent_free_length_m: eq.equivalent_free_length,
            spacing_m: self.spacing()?,
            optical_path_m: layout.optical_path(),
            fsr_hz: fsr,
            survival: layout.round_trip_survival(),
            finesse,
            fwhm_hz: fwhm,
            hwhm_hz: hwhm,
        })
    }

    /// Warnings for expectation mismatches (looser than 1%).
    pub fn expectation_warnings(&self, derived: &Derived) -> Vec<String> {
        let mut warnings = Vec::new();
        let mut check = |name: &str, asserted: Option<f64>, computed: f64| {
            if let Some(value) = asserted {
                if (value - computed).abs() > 0.01 * computed.abs() {
                    warnings.push(format!(
                        "expect.{name} = {value:.6e} disagrees with computed {computed:.6e}; \
                         computed value used"
                    ));
                }
            }
        };
        check("fsr", self.expect.fsr_hz, derived.fsr_hz);
        check("finesse", self.expect.finesse, derived.finesse);
        check("fwhm", self.expect.fwhm_hz, derived.fwhm_hz);
        check("hwhm", self.expect.hwhm_hz, derived.hwhm_hz);
        warnings
    }

    /// Configured charges expanded to both signs, deduplicated and sorted;
    /// `default` applies when the config omits the list.
    pub fn signed_charges(&self, default: &[i32]) -> Vec<i32> {
        let mut out: Vec<i32> = self
            .scenario
            .charges
            .as_deref()
            .unwrap_or(default)
            .iter()
            .flat_map(|&l| if l == 0 { vec![0] } else { vec![l, -l] })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Configured charges folded to positive values, deduplicated, sorted.
    pub fn positive_charges(&self, default: &[i32]) -> Vec<i32> {
        let mut out: Vec<i32> = self
            .scenario
            .charges
            .as_deref()
            .unwrap_or(default)
            .iter()
            .map(|l| l.abs())
            .filter(|&l| l > 0)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}
