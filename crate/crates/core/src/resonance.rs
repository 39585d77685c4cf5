//! Frequency-domain cavity model: mode-resolved resonance frequencies,
//! dispersion curves versus topological charge, Airy transmission spectra
//! and simulated piezo length scans.
//!
//! Mode `(p, l)` of a stable ring with round-trip Gouy angle
//! `θ = arccos((A+D)/2)` resonates at
//!
//! ```text
//! ν_n = (c/L₀) · (n + (2p+|l|+1)·θ/(2π)),    n ∈ ℤ
//! ```
//!
//! so adjacent resonances of one mode are spaced by exactly one free
//! spectral range and a degenerate ring (θ = 0) co-resonates every mode.

use crate::analysis::fwhm_of_sampled_peak;
use crate::cavity::{CavityLayout, Element, Linewidth};
use crate::error::{Error, Result};
use crate::modes::{LGIndex, ModeCoefficients};
use crate::ray::{degeneracy_metric, equivalent_thin_lens};
use crate::SPEED_OF_LIGHT;

use std::f64::consts::PI;

/// Round-trip Gouy angle of a stable layout.
fn gouy_angle(layout: &CavityLayout) -> Result<f64> {
    let m = layout.ray_matrix();
    degeneracy_metric(&m).gouy_angle.ok_or(Error::Unstable {
        half_trace_mag: m.trace().abs() / 2.0,
    })
}

/// Resonance frequencies `ν_n` of one mode for `n` in the given window.
pub fn resonant_frequencies(
    layout: &CavityLayout,
    mode: LGIndex,
    n_window: std::ops::RangeInclusive<i64>,
) -> Result<Vec<f64>> {
    let theta = gouy_angle(layout)?;
    let fsr = layout.free_spectral_range();
    let offset = mode.mode_order() * theta / (2.0 * PI);
    Ok(n_window.map(|n| fsr * (n as f64 + offset)).collect())
}

/// Frequency offset of mode `(p, l)` from the co-scanned fundamental,
/// `Δν = (2p+|l|)·θ·FSR/(2π)`. Exactly zero for a degenerate layout.
pub fn mode_offset(layout: &CavityLayout, mode: LGIndex) -> Result<f64> {
    let theta = gouy_angle(layout)?;
    let weight = (2 * mode.p + mode.l.unsigned_abs()) as f64;
    Ok(weight * theta * layout.free_spectral_range() / (2.0 * PI))
}

/// One point of a dispersion curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint {
    pub l: i32,
    pub offset_hz: f64,
}

/// Frequency offset versus topological charge, with the linewidth band the
/// offsets are judged against.
#[derive(Debug, Clone)]
pub struct DispersionCurve {
    /// Entries sorted by `l`.
    pub entries: Vec<DispersionPoint>,
    /// Human-readable layout descriptor.
    pub descriptor: String,
    /// Half width at half maximum of the cavity line, Hz; offsets inside
    /// ±band still overlap the fundamental resonance.
    pub band_hwhm_hz: f64,
}

/// Tabulate [`mode_offset`] over a charge range at fixed radial index.
pub fn dispersion_curve(
    layout: &CavityLayout,
    l_range: std::ops::RangeInclusive<i32>,
    p: u32,
    descriptor: &str,
) -> Result<DispersionCurve> {
    let Linewidth::Finite { hwhm, .. } = layout.linewidth()? else {
        return Err(Error::InvalidLayout(
            "lossless layout has no linewidth band".into(),
        ));
    };
    let mut entries = Vec::new();
    for l in l_range {
        entries.push(DispersionPoint {
            l,
            offset_hz: mode_offset(layout, LGIndex::new(p, l))?,
        });
    }
    Ok(DispersionCurve {
        entries,
        descriptor: descriptor.to_string(),
        band_hwhm_hz: hwhm,
    })
}

/// Spacing detuning δ (applied via
/// [`CavityLayout::with_spacing_detuning`] at lens 1) that lifts
/// `mode_offset(0, l_star)` to `threshold` Hz, found by bisection on
/// δ ∈ (0, f/2) to 0.1% relative accuracy.
pub fn displacement_for_threshold(
    layout: &CavityLayout,
    l_star: u32,
    threshold_hz: f64,
) -> Result<f64> {
    if l_star == 0 {
        return Err(Error::Domain {
            name: "l_star",
            value: 0.0,
        });
    }
    if threshold_hz.is_nan() || threshold_hz <= 0.0 {
        return Err(Error::Domain {
            name: "threshold_hz",
            value: threshold_hz,
        });
    }
    let lens = layout
        .elements()
        .iter()
        .find_map(|e| match e {
            Element::Lens { kind, .. } => Some(*kind),
            _ => None,
        })
        .ok_or_else(|| Error::InvalidLayout("layout has no lens to displace".into()))?;
    let focal_length = match lens {
        crate::cavity::LensKind::Thick(spec) => equivalent_thin_lens(&spec)?.focal_length,
        crate::cavity::LensKind::Equivalent(eq) => eq.focal_length,
    };
    let mode = LGIndex::new(0, l_star as i32);
    let offset_at = |delta: f64| -> Result<f64> {
        let detuned = layout.with_spacing_detuning(0, delta)?;
        mode_offset(&detuned, mode)
    };

    let mut lo = 0.0;
    let mut hi = focal_length / 2.0;
    let f_hi = offset_at(hi)?;
    if f_hi < threshold_hz {
        return Err(Error::NoRoot {
            lo,
            hi,
            target: threshold_hz,
        });
    }
    // Offset grows monotonically with δ on this bracket; bisect.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = offset_at(mid)?;
        if (f_mid - threshold_hz).abs() <= 1e-4 * threshold_hz {
            return Ok(mid);
        }
        if f_mid < threshold_hz {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoRoot {
        lo,
        hi,
        target: threshold_hz,
    })
}

/// Which physical quantity a spectrum's axis samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumAxis {
    DetuningHz,
    ScanSeconds,
}

/// One annotated transmission peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakAnnotation {
    pub mode: LGIndex,
    /// Position on the spectrum axis (Hz or seconds).
    pub center: f64,
    /// Transmission at the peak center.
    pub height: f64,
}

/// Sampled transmission curve with per-mode peak annotations.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub axis_kind: SpectrumAxis,
    pub axis: Vec<f64>,
    /// Transmission in [0, 1] per axis sample.
    pub transmission: Vec<f64>,
    pub peaks: Vec<PeakAnnotation>,
}

impl Spectrum {
    /// FWHM of the tallest sampled peak, by interpolated half-maximum
    /// crossings.
    pub fn fwhm_of_tallest_peak(&self) -> Option<f64> {
        fwhm_of_sampled_peak(&self.axis, &self.transmission)
    }
}

fn airy(detuning: f64, fsr: f64, finesse: f64) -> f64 {
    let s = (PI * detuning / fsr).sin();
    let coeff = (2.0 * finesse / PI).powi(2);
    1.0 / (1.0 + coeff * s * s)
}

/// Airy transmission of the input superposition versus laser detuning from
/// the fundamental resonance. Peak transmission is normalized to 1; peak
/// heights scale with the mode powers `|c|²`.
pub fn transmission_spectrum(
    layout: &CavityLayout,
    input: &ModeCoefficients,
    detuning_range: (f64, f64),
    samples: usize,
) -> Result<Spectrum> {
    if samples < 2 {
        return Err(Error::Domain {
            name: "samples",
            value: samples as f64,
        });
    }
    let Linewidth::Finite { finesse, .. } = layout.linewidth()? else {
        return Err(Error::InvalidLayout(
            "lossless layout has delta-function peaks".into(),
        ));
    };
    let fsr = layout.free_spectral_range();
    let (lo, hi) = detuning_range;
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(Error::Domain {
            name: "detuning_range",
            value: hi - lo,
        });
    }

    let offsets: Vec<(LGIndex, f64, f64)> = input
        .iter()
        .map(|(mode, amplitude)| {
            mode_offset(layout, mode).map(|off| (mode, off, amplitude.norm_sqr()))
        })
        .collect::<Result<_>>()?;

    let step = (hi - lo) / (samples - 1) as f64;
    let axis: Vec<f64> = (0..samples).map(|i| lo + step * i as f64).collect();
    let transmission: Vec<f64> = axis
        .iter()
        .map(|&nu| {
            offsets
                .iter()
                .map(|(_, off, weight)| weight * airy(nu - off, fsr, finesse))
                .sum::<f64>()
                .min(1.0)
        })
        .collect();

    // Annotate every resonance order that falls inside the range.
    let mut peaks = Vec::new();
    for (mode, off, _) in &offsets {
        let k_lo = ((lo - off) / fsr).ceil() as i64;
        let k_hi = ((hi - off) / fsr).floor() as i64;
        for k in k_lo..=k_hi {
            let center = off + k as f64 * fsr;
            let height = offsets
                .iter()
                .map(|(_, o, w)| w * airy(center - o, fsr, finesse))
                .sum::<f64>()
                .min(1.0);
            peaks.push(PeakAnnotation {
                mode: *mode,
                center,
                height,
            });
        }
    }
    peaks.sort_by(|a, b| a.center.total_cmp(&b.center).then(a.mode.cmp(&b.mode)));

    Ok(Spectrum {
        axis_kind: SpectrumAxis::DetuningHz,
        axis,
        transmission,
        peaks,
    })
}

/// Triangular cavity-length ramp: `period` seconds per cycle, peak-to-peak
/// length change `amplitude` meters (0 → amplitude → 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRamp {
    pub period: f64,
    pub amplitude: f64,
}

impl ScanRamp {
    pub fn new(period: f64, amplitude: f64) -> Result<Self> {
        if !period.is_finite() || period <= 0.0 {
            return Err(Error::Domain {
                name: "period",
                value: period,
            });
        }
        if !amplitude.is_finite() || amplitude <= 0.0 {
            return Err(Error::Domain {
                name: "amplitude",
                value: amplitude,
            });
        }
        Ok(ScanRamp { period, amplitude })
    }

    /// Cavity length change at time `t` (triangular, period-periodic).
    pub fn length_change(&self, t: f64) -> f64 {
        let phase = (t / self.period).rem_euclid(1.0);
        let tri = if phase < 0.5 {
            2.0 * phase
        } else {
            2.0 * (1.0 - phase)
        };
        self.amplitude * tri
    }

    /// Length change rate on the rising slope, m/s.
    pub fn up_rate(&self) -> f64 {
        2.0 * self.amplitude / self.period
    }
}

/// Simulated piezo scan over one ramp period.
#[derive(Debug, Clone)]
pub struct PztScan {
    /// Time axis, seconds, spanning one period.
    pub time: Vec<f64>,
    /// Cavity length change at each sample, meters.
    pub cavity_length_change: Vec<f64>,
    /// Transmission of the input superposition.
    pub signal: Vec<f64>,
    /// Transmission of the frequency-shifted fundamental reference tone.
    pub reference: Vec<f64>,
    pub signal_peaks: Vec<PeakAnnotation>,
    pub reference_peaks: Vec<PeakAnnotation>,
    /// Frequency sweep rate on the rising slope, Hz/s.
    pub scan_rate_hz_per_s: f64,
}

/// Scan the cavity length with a triangular ramp and record signal and
/// reference transmission versus time.
///
/// Increasing the length lowers every resonance (`δν = −ν·δL/L₀`), so one
/// wavelength of length change sweeps exactly one free spectral range past
/// the fixed laser. The reference is a fundamental-mode tone offset by
/// `reference_offset_hz` (one FSR in the experiments, which makes its peaks
/// coincide with the fundamental signal peaks).
///
/// `min_span_fsr` is the sweep coverage the caller requires; the ramp must
/// sweep at least that many FSRs or the scan is rejected.
pub fn pzt_scan(
    layout: &CavityLayout,
    input: &ModeCoefficients,
    ramp: &ScanRamp,
    reference_offset_hz: f64,
    samples: usize,
    min_span_fsr: f64,
) -> Result<PztScan> {
    if samples < 16 {
        return Err(Error::Domain {
            name: "samples",
            value: samples as f64,
        });
    }
    let Linewidth::Finite { finesse, .. } = layout.linewidth()? else {
        return Err(Error::InvalidLayout(
            "lossless layout has delta-function peaks".into(),
        ));
    };
    let fsr = layout.free_spectral_range();
    let l0 = layout.optical_path();
    let lambda = input.geometry().wavelength;
    let optical_frequency = SPEED_OF_LIGHT / lambda;

    // One wavelength of length change sweeps one FSR.
    let covered_fsr = optical_frequency * ramp.amplitude / (l0 * fsr);
    if covered_fsr + 1e-9 < min_span_fsr {
        return Err(Error::RampSpan {
            covered_fsr,
            required_fsr: min_span_fsr,
        });
    }

    let offsets: Vec<(LGIndex, f64, f64)> = input
        .iter()
        .map(|(mode, amplitude)| {
            mode_offset(layout, mode).map(|off| (mode, off, amplitude.norm_sqr()))
        })
        .collect::<Result<_>>()?;

    let mut time = Vec::with_capacity(samples);
    let mut length_change = Vec::with_capacity(samples);
    let mut signal = Vec::with_capacity(samples);
    let mut reference = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = ramp.period * i as f64 / samples as f64;
        let dl = ramp.length_change(t);
        // Sweep detuning of the laser relative to the co-moving resonances.
        let sweep = optical_frequency * dl / l0;
        time.push(t);
        length_change.push(dl);
        signal.push(
            offsets
                .iter()
                .map(|(_, off, weight)| weight * airy(sweep - off, fsr, finesse))
                .sum::<f64>()
                .min(1.0),
        );
        reference.push(airy(sweep + reference_offset_hz, fsr, finesse));
    }

    // Exact crossing times: δL*(mode, k) = (offset/FSR + k)·λ on the rising
    // slope, mirrored on the falling slope.
    let annotate = |offset_hz: f64, mode: LGIndex, peaks: &mut Vec<PeakAnnotation>| {
        let mut k = (-offset_hz / fsr).ceil() as i64;
        loop {
            let dl_star = (offset_hz / fsr + k as f64) * lambda;
            if dl_star > ramp.amplitude {
                break;
            }
            if dl_star >= 0.0 {
                let t_up = dl_star / ramp.up_rate();
                peaks.push(PeakAnnotation {
                    mode,
                    center: t_up,
                    height: 1.0,
                });
                let t_down = ramp.period - t_up;
                if t_down < ramp.period && t_down != t_up {
                    peaks.push(PeakAnnotation {
                        mode,
                        center: t_down,
                        height: 1.0,
                    });
                }
            }
            k += 1;
        }
    };

    let mut signal_peaks = Vec::new();
    for (mode, off, _) in &offsets {
        annotate(*off, *mode, &mut signal_peaks);
    }
    let mut reference_peaks = Vec::new();
    annotate(-reference_offset_hz, LGIndex::new(0, 0), &mut reference_peaks);
    signal_peaks.sort_by(|a, b| a.center.total_cmp(&b.center).then(a.mode.cmp(&b.mode)));
    reference_peaks.sort_by(|a, b| a.center.total_cmp(&b.center));

    Ok(PztScan {
        time,
        cavity_length_change: length_change,
        signal,
        reference,
        signal_peaks,
        reference_peaks,
        scan_rate_hz_per_s: optical_frequency * ramp.up_rate() / l0,
    })
}
