//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by the simulation layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A lens or layout parameter is outside its physical domain.
    #[error("non-physical parameter {name} = {value}")]
    Domain { name: &'static str, value: f64 },

    /// The lens has no focusing power, so the thin-lens + free-space
    /// factorization does not exist.
    #[error("lens has no focusing power; equivalent thin-lens factorization does not exist")]
    NoFocusingPower,

    /// An empty element sequence was supplied where a path is required.
    #[error("element sequence is empty")]
    EmptyPath,

    /// Layout validation failed.
    #[error("invalid cavity layout: {0}")]
    InvalidLayout(String),

    /// The round-trip ray matrix is geometrically unstable, |A+D| > 2.
    #[error("layout is unstable: |A+D| = {half_trace_mag:.9} exceeds 2")]
    Unstable { half_trace_mag: f64 },

    /// Grid construction rejected.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// The grid cannot resolve the requested mode.
    #[error(
        "grid cannot resolve LG(p={p}, l={l}): {reason} \
         (pitch {pitch_m:.3e} m, window half-width {half_window_m:.3e} m)"
    )]
    SamplingResolution {
        p: u32,
        l: i32,
        pitch_m: f64,
        half_window_m: f64,
        reason: &'static str,
    },

    /// The quadratic input chirp of the diffraction transform would alias.
    #[error(
        "input chirp exceeds pi per sample at the grid edge; \
         maximum admissible half-window is {max_half_window_m:.6e} m \
         (grid has {half_window_m:.6e} m)"
    )]
    Aliasing {
        max_half_window_m: f64,
        half_window_m: f64,
    },

    /// |B| is below the chirp-transform conditioning threshold.
    #[error("|B| = {b_abs:.3e} m is below {b_min:.1e} m; use the imaging limit")]
    SingularB { b_abs: f64, b_min: f64 },

    /// The matrix is not an imaging path (|B| too large for the B -> 0 limit).
    #[error("|B| = {b_abs:.3e} m is not an imaging path; use the diffraction transform")]
    NotImaging { b_abs: f64 },

    /// Magnification too close to zero to invert.
    #[error("degenerate magnification |A| = {a_abs:.3e} in imaging limit")]
    DegenerateMagnification { a_abs: f64 },

    /// Fields live on incompatible grids.
    #[error("incompatible grids: {0}")]
    GridMismatch(String),

    /// A field with zero power was supplied where a seed is required.
    #[error("field has zero power")]
    ZeroPower,

    /// Root bracketing failed during calibration.
    #[error("no root in bracket ({lo:.6e}, {hi:.6e}) for target {target:.6e}")]
    NoRoot { lo: f64, hi: f64, target: f64 },

    /// The scan ramp does not cover the requested span.
    #[error("ramp sweeps {covered_fsr:.3} free spectral ranges, {required_fsr:.3} requested")]
    RampSpan { covered_fsr: f64, required_fsr: f64 },

    /// Superposition row index outside the six-state family.
    #[error("superposition row index {0} outside 0..=5")]
    SuperpositionIndex(usize),

    /// Coefficients were expected to be normalized.
    #[error("mode coefficients are not normalized: sum |c|^2 = {total_power:.9}")]
    NotNormalized { total_power: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
