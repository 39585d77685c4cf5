//! Closed-loop cavity layouts and their frequency-domain scalars: round-trip
//! ray matrix, optical path, free spectral range, finesse and linewidth.

use crate::error::{Error, Result};
use crate::ray::{
    degenerate_spacing, thick_lens_matrix, EquivalentLens, RayMatrix, ThickLensSpec,
};
use crate::SPEED_OF_LIGHT;

/// Flat mirror with intensity reflectivity and transmittance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorSpec {
    pub reflectivity: f64,
    pub transmittance: f64,
}

impl MirrorSpec {
    pub fn new(reflectivity: f64, transmittance: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&reflectivity) {
            return Err(Error::Domain {
                name: "reflectivity",
                value: reflectivity,
            });
        }
        if !(0.0..=1.0).contains(&transmittance) {
            return Err(Error::Domain {
                name: "transmittance",
                value: transmittance,
            });
        }
        Ok(MirrorSpec {
            reflectivity,
            transmittance,
        })
    }
}

/// Lens description inside a layout: either the full thick-lens data or the
/// reduced thin-lens + free-space pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LensKind {
    Thick(ThickLensSpec),
    Equivalent(EquivalentLens),
}

impl LensKind {
    pub fn matrix(&self) -> RayMatrix {
        match self {
            LensKind::Thick(spec) => thick_lens_matrix(spec),
            LensKind::Equivalent(eq) => eq.matrix(),
        }
    }

    /// Optical path contributed by the lens: `n₂·h` for the thick form.
    /// The reduced form only knows its equivalent free length.
    pub fn optical_path(&self) -> f64 {
        match self {
            LensKind::Thick(spec) => spec.lens_index * spec.center_thickness,
            LensKind::Equivalent(eq) => eq.equivalent_free_length,
        }
    }

    pub fn geometric_path(&self) -> f64 {
        match self {
            LensKind::Thick(spec) => spec.center_thickness,
            LensKind::Equivalent(eq) => eq.equivalent_free_length,
        }
    }

    pub fn clear_aperture_radius(&self) -> Option<f64> {
        match self {
            LensKind::Thick(spec) => Some(spec.clear_aperture_radius()),
            LensKind::Equivalent(_) => None,
        }
    }
}

/// One element of the closed loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    /// Air gap of the given length, meters.
    FreeSpace(f64),
    /// Lens with its single-pass intensity transmittance.
    Lens { kind: LensKind, transmittance: f64 },
    /// Flat mirror; contributes no length and no ray-matrix action.
    Mirror(MirrorSpec),
}

/// Cavity linewidth report. A lossless loop has unbounded finesse, which is
/// reported as such rather than as a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Linewidth {
    Finite {
        /// Full width at half maximum of one transmission peak, Hz.
        fwhm: f64,
        /// Half width at half maximum, Hz.
        hwhm: f64,
        /// FSR divided by FWHM.
        finesse: f64,
    },
    Unbounded,
}

/// Ordered closed loop of optical elements. The element list is traversed in
/// propagation order and is implicitly periodic: the first element follows
/// the last.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityLayout {
    elements: Vec<Element>,
}

impl CavityLayout {
    pub fn new(elements: Vec<Element>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidLayout("layout has no elements".into()));
        }
        for element in &elements {
            match element {
                Element::FreeSpace(d) => {
                    if !d.is_finite() || *d < 0.0 {
                        return Err(Error::InvalidLayout(format!("free-space length {d}")));
                    }
                }
                Element::Lens { transmittance, .. } => {
                    if !(0.0..=1.0).contains(transmittance) {
                        return Err(Error::InvalidLayout(format!(
                            "lens transmittance {transmittance}"
                        )));
                    }
                }
                Element::Mirror(m) => {
                    // MirrorSpec::new validates, but layouts can be built
                    // from raw structs too.
                    if !(0.0..=1.0).contains(&m.reflectivity)
                        || !(0.0..=1.0).contains(&m.transmittance)
                    {
                        return Err(Error::InvalidLayout(format!(
                            "mirror R = {}, T = {}",
                            m.reflectivity, m.transmittance
                        )));
                    }
                }
            }
        }
        let layout = CavityLayout { elements };
        if layout.optical_path() <= 0.0 {
            return Err(Error::InvalidLayout(
                "round-trip optical path must be positive".into(),
            ));
        }
        Ok(layout)
    }

    /// Degenerate ring of four identical lenses separated by
    /// the degenerate spacing, one mirror at the middle of each gap.
    pub fn degenerate_ring(
        lens: ThickLensSpec,
        mirrors: [MirrorSpec; 4],
        lens_transmittance: f64,
    ) -> Result<Self> {
        let s = degenerate_spacing(&lens)?;
        let mut elements = Vec::with_capacity(16);
        for mirror in mirrors {
            elements.push(Element::Lens {
                kind: LensKind::Thick(lens),
                transmittance: lens_transmittance,
            });
            elements.push(Element::FreeSpace(s / 2.0));
            elements.push(Element::Mirror(mirror));
            elements.push(Element::FreeSpace(s / 2.0));
        }
        Self::new(elements)
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Layout with the element sequence cyclically rotated so that element
    /// `start` comes first. Round-trip scalars are invariant under this.
    pub fn rotated(&self, start: usize) -> Self {
        let n = self.elements.len();
        let mut elements = Vec::with_capacity(n);
        for i in 0..n {
            elements.push(self.elements[(start + i) % n]);
        }
        CavityLayout { elements }
    }

    /// Index of the `k`-th lens in the element list.
    fn lens_position(&self, k: usize) -> Result<usize> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| matches!(e, Element::Lens { .. }))
            .map(|(i, _)| i)
            .nth(k)
            .ok_or_else(|| Error::InvalidLayout(format!("no lens with index {k}")))
    }

    fn gap_before(&self, lens_pos: usize) -> Result<usize> {
        let n = self.elements.len();
        (1..n)
            .map(|step| (lens_pos + n - step) % n)
            .find(|&i| matches!(self.elements[i], Element::FreeSpace(_)))
            .ok_or_else(|| Error::InvalidLayout("no free-space gap before lens".into()))
    }

    fn gap_after(&self, lens_pos: usize) -> Result<usize> {
        let n = self.elements.len();
        (1..n)
            .map(|step| (lens_pos + step) % n)
            .find(|&i| matches!(self.elements[i], Element::FreeSpace(_)))
            .ok_or_else(|| Error::InvalidLayout("no free-space gap after lens".into()))
    }

    fn adjust_gap(&mut self, index: usize, delta: f64) -> Result<()> {
        if let Element::FreeSpace(d) = &mut self.elements[index] {
            let new = *d + delta;
            if new < 0.0 {
                return Err(Error::InvalidLayout(format!(
                    "gap adjustment drives length negative: {new}"
                )));
            }
            *d = new;
            Ok(())
        } else {
            Err(Error::InvalidLayout("adjust target is not a gap".into()))
        }
    }

    /// Axially displace lens `lens_index` by `delta`: the air gap upstream
    /// of the lens shrinks by `delta` and the downstream gap grows by
    /// `delta`, preserving the total loop length.
    ///
    /// For a degenerate ring this perturbation is weakly hyperbolic — the
    /// half trace becomes `1 + (δ/f)²/2` — so the result reports unstable in
    /// [`degeneracy_metric`](crate::ray::degeneracy_metric).
    pub fn with_axial_displacement(&self, lens_index: usize, delta: f64) -> Result<Self> {
        let pos = self.lens_position(lens_index)?;
        let before = self.gap_before(pos)?;
        let after = self.gap_after(pos)?;
        if before == after {
            return Err(Error::InvalidLayout(
                "layout has a single gap; cannot displace".into(),
            ));
        }
        let mut out = self.clone();
        out.adjust_gap(before, -delta)?;
        out.adjust_gap(after, delta)?;
        Ok(out)
    }

    /// Detune the spacing around lens `lens_index`: both flanking air gaps
    /// grow by `delta`. This is the stable counterpart of a lens-position
    /// error — the half trace becomes `1 − (δ/f)²/2`, giving a round-trip
    /// Gouy angle of about `δ/f` — and is what the displaced scenarios use.
    pub fn with_spacing_detuning(&self, lens_index: usize, delta: f64) -> Result<Self> {
        let pos = self.lens_position(lens_index)?;
        let before = self.gap_before(pos)?;
        let after = self.gap_after(pos)?;
        if before == after {
            return Err(Error::InvalidLayout(
                "layout has a single gap; cannot detune".into(),
            ));
        }
        let mut out = self.clone();
        out.adjust_gap(before, delta)?;
        out.adjust_gap(after, delta)?;
        Ok(out)
    }

    /// Round-trip ray matrix, elements composed in propagation order.
    pub fn ray_matrix(&self) -> RayMatrix {
        self.elements
            .iter()
            .fold(RayMatrix::IDENTITY, |acc, e| match e {
                Element::FreeSpace(d) => RayMatrix::free_space(*d).after(&acc),
                Element::Lens { kind, .. } => kind.matrix().after(&acc),
                Element::Mirror(_) => acc,
            })
    }

    /// Geometric round-trip path length, meters.
    pub fn geometric_path(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| match e {
                Element::FreeSpace(d) => *d,
                Element::Lens { kind, .. } => kind.geometric_path(),
                Element::Mirror(_) => 0.0,
            })
            .sum()
    }

    /// Round-trip optical path length L₀ (glass spans weighted by the lens
    /// index), meters.
    pub fn optical_path(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| match e {
                Element::FreeSpace(d) => *d,
                Element::Lens { kind, .. } => kind.optical_path(),
                Element::Mirror(_) => 0.0,
            })
            .sum()
    }

    /// Round-trip intensity survival ρ: product of mirror reflectivities and
    /// lens transmittances.
    pub fn round_trip_survival(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| match e {
                Element::FreeSpace(_) => 1.0,
                Element::Lens { transmittance, .. } => *transmittance,
                Element::Mirror(m) => m.reflectivity,
            })
            .product()
    }

    /// Free spectral range `c / L₀`, Hz.
    pub fn free_spectral_range(&self) -> f64 {
        SPEED_OF_LIGHT / self.optical_path()
    }

    /// Closed-form linewidth from the round-trip survival ρ:
    /// finesse `π√ρ/(1−ρ)`, FWHM `FSR/finesse`.
    pub fn linewidth(&self) -> Result<Linewidth> {
        let rho = self.round_trip_survival();
        if rho <= 0.0 {
            return Err(Error::InvalidLayout(
                "round-trip survival is zero; linewidth undefined".into(),
            ));
        }
        if rho >= 1.0 {
            return Ok(Linewidth::Unbounded);
        }
        let finesse = std::f64::consts::PI * rho.sqrt() / (1.0 - rho);
        let fwhm = self.free_spectral_range() / finesse;
        Ok(Linewidth::Finite {
            fwhm,
            hwhm: fwhm / 2.0,
            finesse,
        })
    }
}

/// Default mirror set of the reference ring: two high reflectors
/// (R = 99.99%) and two output couplers (R = 93%).
pub fn default_mirrors() -> [MirrorSpec; 4] {
    [
        MirrorSpec {
            reflectivity: 0.9999,
            transmittance: 0.0001,
        },
        MirrorSpec {
            reflectivity: 0.9999,
            transmittance: 0.0001,
        },
        MirrorSpec {
            reflectivity: 0.93,
            transmittance: 0.07,
        },
        MirrorSpec {
            reflectivity: 0.93,
            transmittance: 0.07,
        },
    ]
}
