//! Mode overlap and coupled-mode coefficients between the two wells.
//!
//! ```text
//! C₁₂ = ½ (k₂² − k₀²)/β₁ₘ · ∫ u₁ₘ u₂ₙ dx
//! C₂₁ = ½ (k₁² − k₀²)/β₂ₙ · ∫ u₁ₘ u₂ₙ dx
//! ```
//!
//! The overlap is evaluated in closed form over five regions: outer tail,
//! source well, gap, drain well, outer tail. Drain-well profiles are the
//! mirror image of the source convention (see [`crate::modes::evaluate_profile`]),
//! so like modes of identical wells overlap positively.

use serde::{Deserialize, Serialize};

use crate::device::{Channel, CouplerGeometry, CouplerSpec};
use crate::error::{Error, Result};
use crate::modes::{modes_of, GuidedMode, Parity};
use crate::quantities::HBAR_VF;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingResult {
    /// nm⁻¹
    pub c12: f64,
    /// nm⁻¹
    pub c21: f64,
    pub overlap: f64,
    pub coupling_energy_mev: f64,
    /// (source mode index, drain mode index), 1-based.
    pub mode_pair: (usize, usize),
    /// `Δ = β₁ₘ − β₂ₙ`, nm⁻¹.
    pub delta: f64,
}

impl CouplingResult {
    /// `C₁₂ = C₂₁` within relative 1e-10.
    pub fn is_hermitian(&self) -> bool {
        is_symmetric_pair(self.c12, self.c21)
    }
}

pub(crate) fn is_symmetric_pair(c12: f64, c21: f64) -> bool {
    let scale = c12.abs().max(c21.abs());
    (c12 - c21).abs() <= 1e-10 * scale
}

/// `ħv_F·C` in meV.
pub fn coupling_energy(c: f64) -> f64 {
    debug_assert!(c >= 0.0);
    HBAR_VF * c
}

/// `∫_{−h}^{h} g(k s)·e^{p(s − h)} ds` with `g = cos` (symmetric) or `sin`.
fn well_exp_integral(parity: Parity, k: f64, h: f64, p: f64) -> f64 {
    let denom = p * p + k * k;
    let (s, c) = (k * h).sin_cos();
    let e = (-2.0 * p * h).exp();
    match parity {
        Parity::Symmetric => ((p * c + k * s) - e * (p * c - k * s)) / denom,
        Parity::Antisymmetric => ((p * s - k * c) + e * (p * s + k * c)) / denom,
    }
}

/// `∫_0^L e^{−a t}·e^{−b (L − t)} dt`, symmetric in `a`, `b`.
fn gap_integral(a: f64, b: f64, length: f64) -> f64 {
    if length <= 0.0 {
        return 0.0;
    }
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let q = hi - lo;
    let base = (-lo * length).exp();
    if q * length == 0.0 {
        base * length
    } else {
        base * (-(-q * length).exp_m1()) / q
    }
}

/// `sin(q h)/q`, with the `q → 0` limit.
fn sinc_h(q: f64, h: f64) -> f64 {
    if (q * h).abs() < 1e-12 {
        h
    } else {
        (q * h).sin() / q
    }
}

/// `∫ u₁ₘ(x)·u₂ₙ(x) dx` for `source` in the source well and `drain` in the
/// drain well of `geometry`.
pub fn overlap_integral(
    source: &GuidedMode,
    drain: &GuidedMode,
    geometry: &CouplerGeometry,
) -> f64 {
    let (ka, kb) = (source.kappa, drain.kappa);
    let (ha, hb) = (source.half_width(), drain.half_width());
    debug_assert!(((geometry.well1.1 - geometry.well1.0) - 2.0 * ha).abs() <= 1e-9 * ha);
    debug_assert!(((geometry.well2.1 - geometry.well2.0) - 2.0 * hb).abs() <= 1e-9 * hb);
    let gap = geometry.separation();

    // Edge values: the source tail facing the gap is its right edge; the
    // mirrored drain mode presents its `norm_outside` to the gap.
    let ra = source.norm_outside;
    let la = source.left_edge_value();
    let rb = drain.norm_outside;
    let far_b = drain.parity.sign() * rb;
    let tails = 1.0 / (ka + kb);

    let left_tail = la * rb * (-kb * (2.0 * ha + gap)).exp() * tails;
    let in_source = source.norm_inside
        * rb
        * (-kb * gap).exp()
        * well_exp_integral(source.parity, source.k_x, ha, kb);
    let in_gap = ra * rb * gap_integral(ka, kb, gap);
    let in_drain = drain.norm_inside
        * ra
        * (-ka * gap).exp()
        * well_exp_integral(drain.parity, drain.k_x, hb, ka);
    let right_tail = ra * far_b * (-ka * (gap + 2.0 * hb)).exp() * tails;

    left_tail + in_source + in_gap + in_drain + right_tail
}

/// `∫ u_a u_b dx` for two modes of the same well. Equals 1 for `a = b` and
/// vanishes for distinct modes.
pub fn same_well_overlap(a: &GuidedMode, b: &GuidedMode) -> f64 {
    if a.parity != b.parity {
        return 0.0;
    }
    let h = a.half_width();
    debug_assert!((a.well_width_nm - b.well_width_nm).abs() <= 1e-12 * a.well_width_nm);
    let diff = sinc_h(a.k_x - b.k_x, h);
    let sum = sinc_h(a.k_x + b.k_x, h);
    let inside = match a.parity {
        Parity::Symmetric => diff + sum,
        Parity::Antisymmetric => diff - sum,
    };
    a.norm_inside * b.norm_inside * inside
        + 2.0 * a.norm_outside * b.norm_outside / (a.kappa + b.kappa)
}

fn pick(modes: &[GuidedMode], index: usize, well: Channel) -> Result<&GuidedMode> {
    if index == 0 || index > modes.len() {
        return Err(Error::ModeNotFound {
            well: well.name(),
            index,
            available: modes.len(),
        });
    }
    Ok(&modes[index - 1])
}

/// Coupling between source mode `m` and drain mode `n` from precomputed
/// mode lists.
pub fn couple_modes(
    spec: &CouplerSpec,
    source_modes: &[GuidedMode],
    drain_modes: &[GuidedMode],
    m: usize,
    n: usize,
) -> Result<CouplingResult> {
    let a = pick(source_modes, m, Channel::Source)?;
    let b = pick(drain_modes, n, Channel::Drain)?;
    let overlap = overlap_integral(a, b, &spec.geometry());
    let k1 = spec.channel_wavevector(Channel::Source);
    let k2 = spec.channel_wavevector(Channel::Drain);
    let k0_sq = spec.barrier_k0_squared();
    let c12 = 0.5 * (k2 * k2 - k0_sq) / a.beta * overlap;
    let c21 = 0.5 * (k1 * k1 - k0_sq) / b.beta * overlap;
    Ok(CouplingResult {
        c12,
        c21,
        overlap,
        coupling_energy_mev: coupling_energy((c12 * c21).abs().sqrt()),
        mode_pair: (m, n),
        delta: a.beta - b.beta,
    })
}

/// Solve both wells and couple source mode `m` to drain mode `n`.
pub fn coupling_coefficients(spec: &CouplerSpec, m: usize, n: usize) -> Result<CouplingResult> {
    let source = modes_of(spec, Channel::Source)?;
    let drain = modes_of(spec, Channel::Drain)?;
    couple_modes(spec, &source, &drain, m, n)
}
