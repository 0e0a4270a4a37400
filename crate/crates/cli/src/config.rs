//! Run configuration: a flat TOML document overlaid by command-line flags.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::Args;
use gwcoupler::cmt::PropagatorRegistry;
use gwcoupler::device::{build_spec, CouplerSpec, DeviceConfig, DEFAULT_MASS_RATIO};
use gwcoupler::sweep::EnergyRule;
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_D_NM: f64 = 200.0;
pub const DEFAULT_SEPARATION_NM: f64 = 50.0;
pub const DEFAULT_BARRIER_MEV: f64 = 500.0;
pub const DEFAULT_V1_MEV: f64 = 450.0;
pub const DEFAULT_K1D_OVER_PI: f64 = 4.96;
pub const DEFAULT_DY_NM: f64 = 1.0;
pub const DEFAULT_PROFILE_POINTS: usize = 1001;
pub const DEFAULT_GATE_OFFSETS: &str = "0:1:0.05";

/// A list of values, written either as `a,b,c` or as
/// `start:stop:step` (inclusive of `stop`).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "AxisRepr")]
pub struct Axis(pub Vec<f64>);

#[derive(Deserialize)]
#[serde(untagged)]
enum AxisRepr {
    List(Vec<f64>),
    Text(String),
}

impl TryFrom<AxisRepr> for Axis {
    type Error = String;

    fn try_from(repr: AxisRepr) -> Result<Self, String> {
        match repr {
            AxisRepr::List(v) => Ok(Axis(v)),
            AxisRepr::Text(s) => s.parse(),
        }
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let number = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {t:?}"))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [start, stop, step] => {
                let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
                if step == 0.0 || !step.is_finite() {
                    return Err(format!("range step must be finite and nonzero: {s:?}"));
                }
                let count = ((stop - start) / step + 1e-9).floor();
                if !(count >= 0.0) || count > 1e6 {
                    return Err(format!("empty or oversized range: {s:?}"));
                }
                Ok(Axis(
                    (0..=count as usize)
                        .map(|i| start + i as f64 * step)
                        .collect(),
                ))
            }
            [list] => list
                .split(',')
                .map(number)
                .collect::<Result<_, _>>()
                .map(Axis),
            _ => Err(format!("expected a,b,c or start:stop:step, got {s:?}")),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&text.join(","))
    }
}

/// Every configuration key. Each one may come from the `--config` file or a
/// flag of the same name; flags win.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Source well width in nm [default: 200]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub d_nm: Option<f64>,
    /// Drain well width in nm [default: d_nm]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub d_drain_nm: Option<f64>,
    /// Barrier width between the wells in nm [default: 50]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub separation_nm: Option<f64>,
    /// Barrier gate potential V0 in meV [default: 500]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub barrier_mev: Option<f64>,
    /// Source gate potential V1 in meV [default: 450]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub v1_mev: Option<f64>,
    /// Drain gate potential V2 in meV [default: v1_mev]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub v2_mev: Option<f64>,
    /// Effective mass ratio in the barrier [default: 0.067]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mass_ratio: Option<f64>,
    /// Electron energy in meV; replaces k1d_over_pi when set [default: unset]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub electron_energy_mev: Option<f64>,
    /// Source-well k1·d in units of π, fixing the energy [default: 4.96]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub k1d_over_pi: Option<f64>,
    /// Source mode index, 1-based [default: 1]
    #[arg(long, global = true)]
    pub mode_m: Option<usize>,
    /// Drain mode index, 1-based [default: 1]
    #[arg(long, global = true)]
    pub mode_n: Option<usize>,
    /// Report the transfer maximum of this order, L = (2n+1)π/(2Ω) [default: 0]
    #[arg(long, global = true)]
    pub transfer_order: Option<u32>,
    /// Propagation length in nm [default: twice the transfer length]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub y_max_nm: Option<f64>,
    /// Propagation step in nm [default: 1]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub dy_nm: Option<f64>,
    /// Integrator: rk4-phase, rk4-rotating or analytic [default: rk4-phase]
    #[arg(long, global = true)]
    pub propagator: Option<String>,
    /// Replace C12 and C21 by this value in nm^-1 when propagating [default: unset]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub override_coupling: Option<f64>,
    /// Sweep well widths, a,b,c or start:stop:step [default: d_nm]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub d_values: Option<Axis>,
    /// Sweep separations, a,b,c or start:stop:step [default: separation_nm]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub separation_values: Option<Axis>,
    /// Hold the electron energy fixed across the d axis instead of k1·d [default: false]
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub fixed_energy: Option<bool>,
    /// Drain gate offsets for switching, a,b,c or start:stop:step [default: 0:1:0.05]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gate_offsets_mev: Option<Axis>,
    /// Samples in the mode profile dump [default: 1001]
    #[arg(long, global = true)]
    pub profile_points: Option<usize>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),* $(,)?) => {
        Settings { $($field: $top.$field.or($base.$field)),* }
    };
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))
    }

    /// `self` with every key set in `flags` replaced.
    pub fn overlaid_by(self, flags: Settings) -> Settings {
        overlay!(
            self,
            flags,
            d_nm,
            d_drain_nm,
            separation_nm,
            barrier_mev,
            v1_mev,
            v2_mev,
            mass_ratio,
            electron_energy_mev,
            k1d_over_pi,
            mode_m,
            mode_n,
            transfer_order,
            y_max_nm,
            dy_nm,
            propagator,
            override_coupling,
            d_values,
            separation_values,
            fixed_energy,
            gate_offsets_mev,
            profile_points,
        )
    }

    /// The `k1·d/π` in effect: the configured one, or the default when no
    /// energy is given.
    pub fn k1d_over_pi(&self) -> Option<f64> {
        match (self.k1d_over_pi, self.electron_energy_mev) {
            (Some(k), _) => Some(k),
            (None, Some(_)) => None,
            (None, None) => Some(DEFAULT_K1D_OVER_PI),
        }
    }

    pub fn device(&self) -> DeviceConfig {
        DeviceConfig {
            d_nm: Some(self.d_nm.unwrap_or(DEFAULT_D_NM)),
            d_drain_nm: self.d_drain_nm,
            separation_nm: Some(self.separation_nm.unwrap_or(DEFAULT_SEPARATION_NM)),
            barrier_mev: Some(self.barrier_mev.unwrap_or(DEFAULT_BARRIER_MEV)),
            v1_mev: Some(self.v1_mev.unwrap_or(DEFAULT_V1_MEV)),
            v2_mev: self.v2_mev,
            mass_ratio: Some(self.mass_ratio.unwrap_or(DEFAULT_MASS_RATIO)),
            electron_energy_mev: self.electron_energy_mev,
            k1d_over_pi: self.k1d_over_pi(),
        }
    }

    pub fn spec(&self) -> Result<CouplerSpec, CliError> {
        Ok(build_spec(&self.device())?)
    }

    pub fn mode_pair(&self) -> Result<(usize, usize), CliError> {
        let pair = (self.mode_m.unwrap_or(1), self.mode_n.unwrap_or(1));
        if pair.0 == 0 || pair.1 == 0 {
            return Err(CliError::Config("mode indices are 1-based".into()));
        }
        Ok(pair)
    }

    pub fn transfer_order(&self) -> u32 {
        self.transfer_order.unwrap_or(0)
    }

    pub fn dy_nm(&self) -> Result<f64, CliError> {
        let dy = self.dy_nm.unwrap_or(DEFAULT_DY_NM);
        if !(dy > 0.0 && dy.is_finite()) {
            return Err(CliError::Config(format!(
                "dy_nm must be positive, got {dy}"
            )));
        }
        Ok(dy)
    }

    pub fn propagator_name(&self, registry: &PropagatorRegistry) -> Result<String, CliError> {
        let name = self
            .propagator
            .clone()
            .unwrap_or_else(|| PropagatorRegistry::DEFAULT.to_string());
        registry.get(&name)?;
        Ok(name)
    }

    pub fn energy_rule(&self) -> EnergyRule {
        match (self.fixed_energy.unwrap_or(false), self.k1d_over_pi()) {
            (false, Some(k)) => EnergyRule::FixedK1d(k),
            _ => EnergyRule::FixedEnergy,
        }
    }

    pub fn d_axis(&self) -> Vec<f64> {
        match &self.d_values {
            Some(a) => a.0.clone(),
            None => vec![self.d_nm.unwrap_or(DEFAULT_D_NM)],
        }
    }

    pub fn separation_axis(&self) -> Vec<f64> {
        match &self.separation_values {
            Some(a) => a.0.clone(),
            None => vec![self.separation_nm.unwrap_or(DEFAULT_SEPARATION_NM)],
        }
    }

    pub fn gate_offsets(&self) -> Vec<f64> {
        match &self.gate_offsets_mev {
            Some(a) => a.0.clone(),
            None => DEFAULT_GATE_OFFSETS
                .parse::<Axis>()
                .map(|a| a.0)
                .unwrap_or_default(),
        }
    }

    pub fn profile_points(&self) -> Result<usize, CliError> {
        let n = self.profile_points.unwrap_or(DEFAULT_PROFILE_POINTS);
        if n < 2 {
            return Err(CliError::Config("profile_points must be at least 2".into()));
        }
        Ok(n)
    }
}
