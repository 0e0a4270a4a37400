//! Guided transverse modes of a single graphene well.
//!
//! The scalar profile `u(x)` oscillates inside the well with wavevector `k_x`
//! and decays as `e^{−κ|x|}` in the barrier. Matching `u` and `u′` at the
//! edges gives the two parity branches
//!
//! ```text
//! symmetric:       k_x·tan(k_x d/2) = κ
//! antisymmetric:  −k_x·cot(k_x d/2) = κ
//! ```
//!
//! with `β² = k² − k_x²` and `κ² = β² + k₀²` (`k₀²` signed, see
//! [`CouplerSpec::barrier_k0_squared`]).

use serde::{Deserialize, Serialize};

use crate::device::{Channel, CouplerGeometry, CouplerSpec};
use crate::error::{Error, Result};

/// Initial samples per parity branch.
pub const SCAN_POINTS: usize = 4096;
/// Upper bound for the adaptive scan density.
pub const MAX_SCAN_POINTS: usize = 1 << 20;
/// Relative bracket width at which bisection stops.
pub const ROOT_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

impl Parity {
    /// `u(c − ξ) = sign·u(c + ξ)`.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Symmetric => 1.0,
            Parity::Antisymmetric => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Symmetric => "symmetric",
            Parity::Antisymmetric => "antisymmetric",
        }
    }

    /// cos for symmetric, sin for antisymmetric.
    fn inner(self, phase: f64) -> f64 {
        match self {
            Parity::Symmetric => phase.cos(),
            Parity::Antisymmetric => phase.sin(),
        }
    }
}

/// Everything the dispersion relation of one well depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionContext {
    pub well_width_nm: f64,
    /// `k₁` or `k₂`, nm⁻¹.
    pub k_well: f64,
    /// Signed `k₀²`, nm⁻².
    pub k0_squared: f64,
}

impl DispersionContext {
    pub fn new(well_width_nm: f64, k_well: f64, k0_squared: f64) -> Result<Self> {
        if !(well_width_nm > 0.0) || !well_width_nm.is_finite() {
            return Err(Error::NonPositiveWidth(well_width_nm));
        }
        if !(k_well > 0.0) || !k_well.is_finite() || !k0_squared.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "invalid dispersion context: k = {k_well}, k0^2 = {k0_squared}"
            )));
        }
        Ok(DispersionContext {
            well_width_nm,
            k_well,
            k0_squared,
        })
    }

    pub fn from_spec(spec: &CouplerSpec, which: Channel) -> Result<Self> {
        DispersionContext::new(
            spec.waveguide(which).width_nm,
            spec.channel_wavevector(which),
            spec.barrier_k0_squared(),
        )
    }

    /// Upper end of the guided window: `β` real and `κ² ≥ 0`.
    /// Non-positive when the window is empty.
    pub fn kx_max(&self) -> f64 {
        let sq = self.k_well * self.k_well + self.k0_squared.min(0.0);
        if sq > 0.0 {
            sq.sqrt()
        } else {
            0.0
        }
    }

    pub fn kappa_squared(&self, k_x: f64) -> f64 {
        self.k_well * self.k_well - k_x * k_x + self.k0_squared
    }

    fn kappa(&self, k_x: f64) -> f64 {
        self.kappa_squared(k_x).max(0.0).sqrt()
    }

    /// Residual with the `k_x → 0⁺` limit filled in and no domain check.
    fn raw_residual(&self, k_x: f64, parity: Parity) -> f64 {
        let half = 0.5 * self.well_width_nm;
        if k_x == 0.0 {
            return match parity {
                Parity::Symmetric => -self.kappa(0.0),
                Parity::Antisymmetric => -1.0 / half - self.kappa(0.0),
            };
        }
        let phase = k_x * half;
        let kappa = self.kappa(k_x);
        match parity {
            Parity::Symmetric => k_x * phase.tan() - kappa,
            Parity::Antisymmetric => -k_x / phase.tan() - kappa,
        }
    }
}

/// Signed matching residual; its roots in `k_x` are the guided modes.
pub fn dispersion_residual(k_x: f64, ctx: &DispersionContext, parity: Parity) -> Result<f64> {
    if !(k_x > 0.0) || k_x > ctx.kx_max() || ctx.kappa_squared(k_x) < 0.0 {
        return Err(Error::OutOfDomain(k_x));
    }
    Ok(ctx.raw_residual(k_x, parity))
}

/// One bound transverse mode of a well, with closed-form normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidedMode {
    /// 1-based, ordered by increasing `k_x`.
    pub index: usize,
    pub parity: Parity,
    pub k_x: f64,
    pub beta: f64,
    pub kappa: f64,
    pub theta_deg: f64,
    /// Amplitude of the cos/sin inside the well, nm^(−1/2).
    pub norm_inside: f64,
    /// Value at the right well edge, nm^(−1/2). The left edge carries
    /// `parity.sign()` times this.
    pub norm_outside: f64,
    pub k_well: f64,
    pub well_width_nm: f64,
}

impl GuidedMode {
    fn from_root(ctx: &DispersionContext, parity: Parity, k_x: f64, index: usize) -> Self {
        let half = 0.5 * ctx.well_width_nm;
        let beta = (ctx.k_well * ctx.k_well - k_x * k_x).max(0.0).sqrt();
        let kappa = ctx.kappa(k_x);
        let edge = parity.inner(k_x * half);
        let inside = match parity {
            Parity::Symmetric => half + (2.0 * k_x * half).sin() / (2.0 * k_x),
            Parity::Antisymmetric => half - (2.0 * k_x * half).sin() / (2.0 * k_x),
        };
        let norm_inside = 1.0 / (inside + edge * edge / kappa).sqrt();
        GuidedMode {
            index,
            parity,
            k_x,
            beta,
            kappa,
            theta_deg: injection_angle_deg(k_x, ctx.k_well),
            norm_inside,
            norm_outside: norm_inside * edge,
            k_well: ctx.k_well,
            well_width_nm: ctx.well_width_nm,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.well_width_nm
    }

    /// Value at the left well edge.
    pub fn left_edge_value(&self) -> f64 {
        self.parity.sign() * self.norm_outside
    }

    /// `u` at offset `s` from the well center.
    pub fn profile_at(&self, s: f64) -> f64 {
        let h = self.half_width();
        if s.abs() <= h {
            self.norm_inside * self.parity.inner(self.k_x * s)
        } else if s > 0.0 {
            self.norm_outside * (-self.kappa * (s - h)).exp()
        } else {
            self.left_edge_value() * (-self.kappa * (-s - h)).exp()
        }
    }
}

/// `θ = asin(β/k)` in degrees, with `β = √(k² − k_x²)`.
pub fn injection_angle_deg(k_x: f64, k_well: f64) -> f64 {
    let ratio = (k_x / k_well).clamp(-1.0, 1.0);
    (1.0 - ratio * ratio).sqrt().asin().to_degrees()
}

pub fn injection_angle(mode: &GuidedMode) -> f64 {
    (mode.beta / mode.k_well)
        .clamp(-1.0, 1.0)
        .asin()
        .to_degrees()
}

/// `u(x)` of `mode` placed in `which` well of `geometry`.
///
/// The drain well is the mirror image of the source well about the gap
/// center, so drain profiles are evaluated at the reflected offset. This only
/// changes the sign convention of antisymmetric drain modes.
pub fn evaluate_profile(
    mode: &GuidedMode,
    geometry: &CouplerGeometry,
    which: Channel,
    x: f64,
) -> f64 {
    let offset = x - geometry.center(which);
    match which {
        Channel::Source => mode.profile_at(offset),
        Channel::Drain => mode.profile_at(-offset),
    }
}

/// Roots of one parity branch from an `n`-point uniform scan of `(0, k_x,max]`.
///
/// Tangent poles flip the residual from `+` to `−`, genuine roots from `−` to
/// `+`, so only rising sign changes are bracketed. Bisection keeps
/// `f(lo) < 0 < f(hi)` and therefore cannot settle on a pole.
fn scan_branch(ctx: &DispersionContext, parity: Parity, n: usize) -> Vec<f64> {
    let top = ctx.kx_max();
    let mut roots = Vec::new();
    if top <= 0.0 {
        return roots;
    }
    let mut prev_x = 0.0;
    let mut prev_f = ctx.raw_residual(0.0, parity);
    for i in 1..=n {
        let x = top * (i as f64) / (n as f64);
        let f = ctx.raw_residual(x, parity);
        if prev_f < 0.0 && f >= 0.0 {
            let root = if f == 0.0 {
                x
            } else {
                bisect(ctx, parity, prev_x, x)
            };
            if root > 0.0 && ctx.kappa_squared(root) > 0.0 {
                roots.push(root);
            }
        }
        prev_x = x;
        prev_f = f;
    }
    roots
}

fn bisect(ctx: &DispersionContext, parity: Parity, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= ROOT_RTOL * hi || mid <= lo || mid >= hi {
            break;
        }
        if ctx.raw_residual(mid, parity) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn scan_all(ctx: &DispersionContext, n: usize) -> Vec<(f64, Parity)> {
    let mut roots: Vec<(f64, Parity)> = [Parity::Symmetric, Parity::Antisymmetric]
        .into_iter()
        .flat_map(|p| scan_branch(ctx, p, n).into_iter().map(move |r| (r, p)))
        .collect();
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots
}

/// All guided modes of the well, sorted by `k_x` and indexed from 1.
///
/// The scan starts at [`SCAN_POINTS`] samples per branch and doubles until
/// two consecutive densities agree on the mode count (or
/// [`MAX_SCAN_POINTS`] is reached).
pub fn find_modes(ctx: &DispersionContext) -> Result<Vec<GuidedMode>> {
    if ctx.kx_max() <= 0.0 {
        return Err(Error::NoModesFound);
    }
    let mut n = SCAN_POINTS;
    let mut roots = scan_all(ctx, n);
    while n < MAX_SCAN_POINTS {
        n *= 2;
        let finer = scan_all(ctx, n);
        let settled = finer.len() == roots.len();
        roots = finer;
        if settled {
            break;
        }
    }
    if roots.is_empty() {
        return Err(Error::NoModesFound);
    }
    Ok(roots
        .into_iter()
        .enumerate()
        .map(|(i, (k_x, parity))| GuidedMode::from_root(ctx, parity, k_x, i + 1))
        .collect())
}

/// Convenience: modes of one well of a device.
pub fn modes_of(spec: &CouplerSpec, which: Channel) -> Result<Vec<GuidedMode>> {
    find_modes(&DispersionContext::from_spec(spec, which)?)
}
