//! Device description: well widths, separation, barrier and gate potentials.
//!
//! A [`CouplerSpec`] is the validated, immutable description every other
//! module consumes. Build it from a flat [`DeviceConfig`] with [`build_spec`]
//! or directly with [`CouplerSpec::new`].

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quantities::{energy_from_wavevector, wavevector_from_energy, HBAR2_OVER_2ME};

/// GaAs conduction-band effective mass ratio.
pub const DEFAULT_MASS_RATIO: f64 = 0.067;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Source,
    Drain,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Source => "source",
            Channel::Drain => "drain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveguideSpec {
    pub label: String,
    /// Well width `d`, nm.
    pub width_nm: f64,
    /// Gate-controlled channel potential, meV.
    pub gate_potential_mev: f64,
}

impl WaveguideSpec {
    pub fn new(label: impl Into<String>, width_nm: f64, gate_potential_mev: f64) -> Result<Self> {
        if !(width_nm > 0.0) || !width_nm.is_finite() {
            return Err(Error::NonPositiveWidth(width_nm));
        }
        if !gate_potential_mev.is_finite() {
            return Err(Error::InvalidConfig("gate potential must be finite".into()));
        }
        Ok(WaveguideSpec {
            label: label.into(),
            width_nm,
            gate_potential_mev,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplerSpec {
    source: WaveguideSpec,
    drain: WaveguideSpec,
    separation_nm: f64,
    barrier_mev: f64,
    barrier_mass_ratio: f64,
    electron_energy_mev: f64,
}

impl CouplerSpec {
    pub fn new(
        source: WaveguideSpec,
        drain: WaveguideSpec,
        separation_nm: f64,
        barrier_mev: f64,
        barrier_mass_ratio: f64,
        electron_energy_mev: f64,
    ) -> Result<Self> {
        for w in [&source, &drain] {
            if !(w.width_nm > 0.0) || !w.width_nm.is_finite() {
                return Err(Error::NonPositiveWidth(w.width_nm));
            }
        }
        if !(separation_nm >= 0.0) || !separation_nm.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "separation must be non-negative, got {separation_nm} nm"
            )));
        }
        if !barrier_mev.is_finite() {
            return Err(Error::InvalidConfig("barrier height must be finite".into()));
        }
        if !(barrier_mass_ratio > 0.0) || !barrier_mass_ratio.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "barrier mass ratio must be positive, got {barrier_mass_ratio}"
            )));
        }
        let gate = source.gate_potential_mev.max(drain.gate_potential_mev);
        if !(electron_energy_mev > gate) || !electron_energy_mev.is_finite() {
            return Err(Error::EnergyBelowGate {
                energy: electron_energy_mev,
                gate,
            });
        }
        Ok(CouplerSpec {
            source,
            drain,
            separation_nm,
            barrier_mev,
            barrier_mass_ratio,
            electron_energy_mev,
        })
    }

    pub fn source(&self) -> &WaveguideSpec {
        &self.source
    }

    pub fn drain(&self) -> &WaveguideSpec {
        &self.drain
    }

    pub fn waveguide(&self, which: Channel) -> &WaveguideSpec {
        match which {
            Channel::Source => &self.source,
            Channel::Drain => &self.drain,
        }
    }

    pub fn separation_nm(&self) -> f64 {
        self.separation_nm
    }

    pub fn barrier_mev(&self) -> f64 {
        self.barrier_mev
    }

    pub fn barrier_mass_ratio(&self) -> f64 {
        self.barrier_mass_ratio
    }

    pub fn electron_energy_mev(&self) -> f64 {
        self.electron_energy_mev
    }

    /// Set when the barrier does not exceed either gate potential; no
    /// confinement is expected in that regime but the spec is still usable.
    pub fn barrier_warning(&self) -> bool {
        self.barrier_mev
            <= self
                .source
                .gate_potential_mev
                .max(self.drain.gate_potential_mev)
    }

    /// `kᵢ = (E − Vᵢ)/ħv_F`.
    pub fn channel_wavevector(&self, which: Channel) -> f64 {
        wavevector_from_energy(
            self.electron_energy_mev,
            self.waveguide(which).gate_potential_mev,
        )
    }

    /// Signed barrier wavevector squared, `k₀² = −(E − V₀)·m*/m / (ħ²/2mₑ)`.
    /// Positive below the barrier, negative above it.
    pub fn barrier_k0_squared(&self) -> f64 {
        -(self.electron_energy_mev - self.barrier_mev) * self.barrier_mass_ratio / HBAR2_OVER_2ME
    }

    pub fn geometry(&self) -> CouplerGeometry {
        CouplerGeometry::new(
            self.source.width_nm,
            self.drain.width_nm,
            self.separation_nm,
        )
    }

    pub fn with_separation(&self, separation_nm: f64) -> Result<Self> {
        let mut s = self.clone();
        s.separation_nm = separation_nm;
        s.revalidate()
    }

    /// Both wells set to `width_nm`; energy unchanged.
    pub fn with_widths(&self, width_nm: f64) -> Result<Self> {
        let mut s = self.clone();
        s.source.width_nm = width_nm;
        s.drain.width_nm = width_nm;
        s.revalidate()
    }

    pub fn with_energy(&self, electron_energy_mev: f64) -> Result<Self> {
        let mut s = self.clone();
        s.electron_energy_mev = electron_energy_mev;
        s.revalidate()
    }

    /// Drain gate shifted by `offset_mev` relative to its current value.
    pub fn with_drain_offset(&self, offset_mev: f64) -> Result<Self> {
        let mut s = self.clone();
        s.drain.gate_potential_mev += offset_mev;
        s.revalidate()
    }

    fn revalidate(self) -> Result<Self> {
        CouplerSpec::new(
            self.source,
            self.drain,
            self.separation_nm,
            self.barrier_mev,
            self.barrier_mass_ratio,
            self.electron_energy_mev,
        )
    }
}

/// Energy that puts `k₁d = k1d_over_pi·π` in a well of width `width_nm`
/// gated at `gate_mev`.
pub fn energy_for_k1d(gate_mev: f64, k1d_over_pi: f64, width_nm: f64) -> f64 {
    energy_from_wavevector(k1d_over_pi * PI / width_nm, gate_mev)
}

/// Positions of the two wells along `x`.
///
/// The origin sits in the middle of the gap: the source well occupies
/// `[−D/2 − d₁, −D/2]` and the drain well `[D/2, D/2 + d₂]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerGeometry {
    pub well1: (f64, f64),
    pub well2: (f64, f64),
}

impl CouplerGeometry {
    pub fn new(source_width: f64, drain_width: f64, separation: f64) -> Self {
        let half = 0.5 * separation;
        CouplerGeometry {
            well1: (-half - source_width, -half),
            well2: (half, half + drain_width),
        }
    }

    pub fn interval(&self, which: Channel) -> (f64, f64) {
        match which {
            Channel::Source => self.well1,
            Channel::Drain => self.well2,
        }
    }

    pub fn center(&self, which: Channel) -> f64 {
        let (l, r) = self.interval(which);
        0.5 * (l + r)
    }

    pub fn separation(&self) -> f64 {
        self.well2.0 - self.well1.1
    }
}

/// Flat key-value description of a device. Every field is optional here;
/// [`build_spec`] decides what is required.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub d_nm: Option<f64>,
    /// Drain width; defaults to `d_nm`.
    pub d_drain_nm: Option<f64>,
    pub separation_nm: Option<f64>,
    pub barrier_mev: Option<f64>,
    pub v1_mev: Option<f64>,
    /// Drain gate; defaults to `v1_mev`.
    pub v2_mev: Option<f64>,
    pub mass_ratio: Option<f64>,
    pub electron_energy_mev: Option<f64>,
    pub k1d_over_pi: Option<f64>,
}

impl DeviceConfig {
    /// The default device of the Fig. 4 traces: d = 200 nm, D = 50 nm,
    /// V₀ = 500 meV, V₁ = V₂ = 450 meV, k₁d = 4.96π.
    pub fn reference() -> Self {
        DeviceConfig {
            d_nm: Some(200.0),
            d_drain_nm: None,
            separation_nm: Some(50.0),
            barrier_mev: Some(500.0),
            v1_mev: Some(450.0),
            v2_mev: None,
            mass_ratio: Some(DEFAULT_MASS_RATIO),
            electron_energy_mev: None,
            k1d_over_pi: Some(4.96),
        }
    }
}

/// Validate a [`DeviceConfig`] into a [`CouplerSpec`].
///
/// The electron energy comes either from `electron_energy_mev` or from
/// `k1d_over_pi` through the source gate and width, never both.
pub fn build_spec(config: &DeviceConfig) -> Result<CouplerSpec> {
    let d = config.d_nm.ok_or(Error::MissingField("d_nm"))?;
    let d2 = config.d_drain_nm.unwrap_or(d);
    let separation = config
        .separation_nm
        .ok_or(Error::MissingField("separation_nm"))?;
    let barrier = config
        .barrier_mev
        .ok_or(Error::MissingField("barrier_mev"))?;
    let v1 = config.v1_mev.ok_or(Error::MissingField("v1_mev"))?;
    let v2 = config.v2_mev.unwrap_or(v1);
    let mass_ratio = config.mass_ratio.unwrap_or(DEFAULT_MASS_RATIO);

    let source = WaveguideSpec::new("source", d, v1)?;
    let drain = WaveguideSpec::new("drain", d2, v2)?;

    let energy = match (config.electron_energy_mev, config.k1d_over_pi) {
        (Some(e), None) => e,
        (None, Some(k1d)) => {
            if !(k1d > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "k1d_over_pi must be positive, got {k1d}"
                )));
            }
            energy_for_k1d(v1, k1d, d)
        }
        (Some(_), Some(_)) => {
            return Err(Error::InvalidConfig(
                "give either electron_energy_mev or k1d_over_pi, not both".into(),
            ))
        }
        (None, None) => return Err(Error::MissingField("electron_energy_mev")),
    };

    CouplerSpec::new(source, drain, separation, barrier, mass_ratio, energy)
}
