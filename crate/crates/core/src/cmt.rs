//! Two-level coupled-mode dynamics along the propagation coordinate `y`.
//!
//! ```text
//! da₁/dy = −i C₁₂ e^{+iΔy} a₂
//! da₂/dy = −i C₂₁ e^{−iΔy} a₁
//! ```
//!
//! Integrators implement [`Propagator`] and are looked up by name in a
//! [`PropagatorRegistry`]:
//!
//! | name           | method                                                   |
//! |----------------|----------------------------------------------------------|
//! | `rk4-phase`    | RK4 on the phase-explicit equations above (default)      |
//! | `rk4-rotating` | RK4 on the constant rotating-frame matrix, mapped back   |
//! | `analytic`     | closed-form Rabi solution sampled on the same grid        |

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::coupling::{couple_modes, is_symmetric_pair, CouplingResult};
use crate::device::{Channel, CouplerSpec};
use crate::error::{Error, Result};
use crate::modes::modes_of;
use crate::quantities::transition_frequency;

pub type Amplitudes = [Complex64; 2];

/// `dy·max(|C₁₂|, |C₂₁|, |Δ|)` above which a fixed step is refused.
pub const MAX_STEP_PHASE: f64 = 0.1;

/// All amplitude in the source waveguide.
pub const SOURCE_POPULATED: Amplitudes = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmtSystem {
    pub c12: f64,
    pub c21: f64,
    pub delta: f64,
}

impl CmtSystem {
    pub fn new(c12: f64, c21: f64, delta: f64) -> Self {
        CmtSystem { c12, c21, delta }
    }

    /// Resonant, symmetric coupling `C`.
    pub fn symmetric(c: f64) -> Self {
        CmtSystem::new(c, c, 0.0)
    }

    pub fn from_coupling(r: &CouplingResult) -> Self {
        CmtSystem::new(r.c12, r.c21, r.delta)
    }

    pub fn is_hermitian(&self) -> bool {
        is_symmetric_pair(self.c12, self.c21)
    }

    /// Replace `C₁₂, C₂₁` by their geometric mean `±√(C₁₂C₂₁)`. An
    /// approximation for unequal wells; returns `None` when the coefficients
    /// have opposite signs.
    pub fn symmetrized(&self) -> Option<Self> {
        let product = self.c12 * self.c21;
        if product < 0.0 {
            return None;
        }
        let c = product.sqrt().copysign(self.c12);
        Some(CmtSystem::new(c, c, self.delta))
    }

    fn rate_scale(&self) -> f64 {
        self.c12.abs().max(self.c21.abs()).max(self.delta.abs())
    }

    fn check_step(&self, dy: f64) -> Result<()> {
        let scale = self.rate_scale();
        if dy * scale > MAX_STEP_PHASE {
            return Err(Error::StepTooLarge { dy, scale });
        }
        Ok(())
    }

    /// Right-hand side of the phase-explicit equations.
    fn derivative(&self, y: f64, a: &Amplitudes) -> Amplitudes {
        let phase = Complex64::from_polar(1.0, self.delta * y);
        let minus_i = Complex64::new(0.0, -1.0);
        [
            minus_i * self.c12 * phase * a[1],
            minus_i * self.c21 * phase.conj() * a[0],
        ]
    }
}

/// Sampled amplitudes along `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationTrace {
    pub y: Vec<f64>,
    pub a1: Vec<Complex64>,
    pub a2: Vec<Complex64>,
}

impl PropagationTrace {
    fn with_capacity(n: usize) -> Self {
        PropagationTrace {
            y: Vec::with_capacity(n),
            a1: Vec::with_capacity(n),
            a2: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, y: f64, a: Amplitudes) {
        self.y.push(y);
        self.a1.push(a[0]);
        self.a2.push(a[1]);
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn p1(&self) -> Vec<f64> {
        self.a1.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn p2(&self) -> Vec<f64> {
        self.a2.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn last(&self) -> Option<Amplitudes> {
        Some([*self.a1.last()?, *self.a2.last()?])
    }

    /// `max_k |p1 + p2 − p1[0] − p2[0]|`.
    pub fn norm_drift(&self) -> f64 {
        let total = |k: usize| self.a1[k].norm_sqr() + self.a2[k].norm_sqr();
        let start = total(0);
        (0..self.len())
            .map(|k| (total(k) - start).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with header `y_nm,p1,p2,re_a1,im_a1,re_a2,im_a2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("y_nm,p1,p2,re_a1,im_a1,re_a2,im_a2\n");
        for k in 0..self.len() {
            let (a1, a2) = (self.a1[k], self.a2[k]);
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                self.y[k],
                a1.norm_sqr(),
                a2.norm_sqr(),
                a1.re,
                a1.im,
                a2.re,
                a2.im
            ));
        }
        out
    }
}

/// Uniform grid on `[0, y_max]` whose step does not exceed `dy`.
fn grid(y_max: f64, dy: f64) -> Result<(usize, f64)> {
    if !(dy > 0.0) || !dy.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "step must be positive, got {dy}"
        )));
    }
    if !(y_max >= dy) || !y_max.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "propagation length {y_max} nm shorter than one step {dy} nm"
        )));
    }
    let steps = ((y_max / dy) - 1e-9).ceil().max(1.0) as usize;
    Ok((steps, y_max / steps as f64))
}

fn check_initial(a0: &Amplitudes) -> Result<()> {
    let norm = a0[0].norm_sqr() + a0[1].norm_sqr();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidConfig(
            "initial amplitudes must be nonzero".into(),
        ));
    }
    Ok(())
}

fn rk4_step(
    f: impl Fn(f64, &Amplitudes) -> Amplitudes,
    y: f64,
    a: &Amplitudes,
    h: f64,
) -> Amplitudes {
    let add = |a: &Amplitudes, k: &Amplitudes, s: f64| [a[0] + k[0] * s, a[1] + k[1] * s];
    let k1 = f(y, a);
    let k2 = f(y + 0.5 * h, &add(a, &k1, 0.5 * h));
    let k3 = f(y + 0.5 * h, &add(a, &k2, 0.5 * h));
    let k4 = f(y + h, &add(a, &k3, h));
    let w = h / 6.0;
    [
        a[0] + (k1[0] + k2[0] * 2.0 + k3[0] * 2.0 + k4[0]) * w,
        a[1] + (k1[1] + k2[1] * 2.0 + k3[1] * 2.0 + k4[1]) * w,
    ]
}

/// An integrator for the two-level amplitude equations.
pub trait Propagator: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Trace on a uniform grid over `[0, y_max]` with step at most `dy`.
    fn propagate(
        &self,
        system: &CmtSystem,
        a0: Amplitudes,
        y_max: f64,
        dy: f64,
    ) -> Result<PropagationTrace>;
}

/// Classical RK4 on the phase-explicit equations.
#[derive(Debug, Default, Clone, Copy)]
pub struct PhaseExplicitRk4;

impl Propagator for PhaseExplicitRk4 {
    fn name(&self) -> &'static str {
        "rk4-phase"
    }

    fn description(&self) -> &'static str {
        "fixed-step RK4 on the phase-explicit coupled equations"
    }

    fn propagate(
        &self,
        system: &CmtSystem,
        a0: Amplitudes,
        y_max: f64,
        dy: f64,
    ) -> Result<PropagationTrace> {
        check_initial(&a0)?;
        let (steps, h) = grid(y_max, dy)?;
        system.check_step(h)?;
        let mut trace = PropagationTrace::with_capacity(steps + 1);
        let mut a = a0;
        trace.push(0.0, a);
        for k in 0..steps {
            let y = k as f64 * h;
            a = rk4_step(|y, a| system.derivative(y, a), y, &a, h);
            trace.push((k + 1) as f64 * h, a);
        }
        Ok(trace)
    }
}

/// RK4 on `i db/dy = M b` with `M = [[Δ/2, C₁₂], [C₂₁, −Δ/2]]`, where
/// `b₁ = a₁e^{−iΔy/2}`, `b₂ = a₂e^{+iΔy/2}`.
#[derive(Debug, Default, Clone, Copy)]
pub struct RotatingFrameRk4;

impl Propagator for RotatingFrameRk4 {
    fn name(&self) -> &'static str {
        "rk4-rotating"
    }

    fn description(&self) -> &'static str {
        "fixed-step RK4 on the constant rotating-frame matrix"
    }

    fn propagate(
        &self,
        system: &CmtSystem,
        a0: Amplitudes,
        y_max: f64,
        dy: f64,
    ) -> Result<PropagationTrace> {
        check_initial(&a0)?;
        let (steps, h) = grid(y_max, dy)?;
        system.check_step(h)?;
        let half = 0.5 * system.delta;
        let minus_i = Complex64::new(0.0, -1.0);
        let rhs = |_: f64, b: &Amplitudes| {
            [
                minus_i * (b[0] * half + b[1] * system.c12),
                minus_i * (b[0] * system.c21 - b[1] * half),
            ]
        };
        let to_lab = |y: f64, b: &Amplitudes| {
            let rot = Complex64::from_polar(1.0, half * y);
            [b[0] * rot, b[1] * rot.conj()]
        };
        let mut trace = PropagationTrace::with_capacity(steps + 1);
        let mut b = a0;
        trace.push(0.0, a0);
        for k in 0..steps {
            b = rk4_step(rhs, k as f64 * h, &b, h);
            let y = (k + 1) as f64 * h;
            trace.push(y, to_lab(y, &b));
        }
        Ok(trace)
    }
}

/// Closed-form solution sampled on the propagation grid.
#[derive(Debug, Default, Clone, Copy)]
pub struct AnalyticPropagator;

impl Propagator for AnalyticPropagator {
    fn name(&self) -> &'static str {
        "analytic"
    }

    fn description(&self) -> &'static str {
        "closed-form Rabi solution (Hermitian systems only)"
    }

    fn propagate(
        &self,
        system: &CmtSystem,
        a0: Amplitudes,
        y_max: f64,
        dy: f64,
    ) -> Result<PropagationTrace> {
        check_initial(&a0)?;
        let (steps, h) = grid(y_max, dy)?;
        let mut trace = PropagationTrace::with_capacity(steps + 1);
        for k in 0..=steps {
            let y = k as f64 * h;
            trace.push(y, analytic_rabi(system, y, a0)?);
        }
        Ok(trace)
    }
}

/// Integrators registered by name.
pub struct PropagatorRegistry {
    entries: Vec<Box<dyn Propagator>>,
}

impl PropagatorRegistry {
    pub const DEFAULT: &'static str = "rk4-phase";

    pub fn empty() -> Self {
        PropagatorRegistry {
            entries: Vec::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut reg = PropagatorRegistry::empty();
        reg.register(Box::new(PhaseExplicitRk4));
        reg.register(Box::new(RotatingFrameRk4));
        reg.register(Box::new(AnalyticPropagator));
        reg
    }

    /// Later registrations under an existing name replace the earlier one.
    pub fn register(&mut self, propagator: Box<dyn Propagator>) {
        self.entries.retain(|p| p.name() != propagator.name());
        self.entries.push(propagator);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Propagator> {
        self.entries
            .iter()
            .find(|p| p.name() == name)
            .map(|p| p.as_ref())
            .ok_or_else(|| Error::UnknownPropagator(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.iter().map(|p| p.name())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Propagator> + '_ {
        self.entries.iter().map(|p| p.as_ref())
    }
}

impl Default for PropagatorRegistry {
    fn default() -> Self {
        PropagatorRegistry::with_builtins()
    }
}

/// Propagate with the default integrator.
pub fn propagate(
    system: &CmtSystem,
    a0: Amplitudes,
    y_max: f64,
    dy: f64,
) -> Result<PropagationTrace> {
    PhaseExplicitRk4.propagate(system, a0, y_max, dy)
}

/// Exact amplitudes at `y` for a Hermitian system.
///
/// In the rotating frame the generator is constant and squares to
/// `Ω_R²·I` with `Ω_R = √(C² + (Δ/2)²)`, so
/// `b(y) = [cos(Ω_R y) − i sin(Ω_R y)/Ω_R · M] b(0)`.
pub fn analytic_rabi(system: &CmtSystem, y: f64, a0: Amplitudes) -> Result<Amplitudes> {
    if !system.is_hermitian() {
        return Err(Error::NonHermitian {
            c12: system.c12,
            c21: system.c21,
        });
    }
    let half = 0.5 * system.delta;
    let omega = rabi_frequency(system);
    let cos = (omega * y).cos();
    // sin(Ωy)/Ω, finite as Ω → 0
    let sinc = if omega == 0.0 {
        y
    } else {
        (omega * y).sin() / omega
    };
    let minus_i_sinc = Complex64::new(0.0, -sinc);
    let b1 = a0[0] * cos + minus_i_sinc * (a0[0] * half + a0[1] * system.c12);
    let b2 = a0[1] * cos + minus_i_sinc * (a0[0] * system.c21 - a0[1] * half);
    let rot = Complex64::from_polar(1.0, half * y);
    Ok([b1 * rot, b2 * rot.conj()])
}

/// `Ω_R = √(C₁₂C₂₁ + (Δ/2)²)`.
pub fn rabi_frequency(system: &CmtSystem) -> f64 {
    (system.c12 * system.c21 + 0.25 * system.delta * system.delta)
        .max(0.0)
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferMetrics {
    pub transfer_length_nm: f64,
    pub transition_frequency_hz: f64,
    pub max_transfer: f64,
    pub transfer_order: u32,
}

/// First full-transfer length `L = π/(2Ω_R)` and `f_T = v_F/L`.
pub fn transfer_metrics(system: &CmtSystem) -> Result<TransferMetrics> {
    transfer_metrics_of_order(system, 0)
}

/// Length to the `order`-th transfer maximum, `(2n + 1)·π/(2Ω_R)`.
pub fn transfer_metrics_of_order(system: &CmtSystem, order: u32) -> Result<TransferMetrics> {
    if !system.is_hermitian() {
        return Err(Error::NonHermitian {
            c12: system.c12,
            c21: system.c21,
        });
    }
    if system.c12 == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let omega = rabi_frequency(system);
    let length = (2 * order + 1) as f64 * PI / (2.0 * omega);
    let c_sq = system.c12 * system.c21;
    Ok(TransferMetrics {
        transfer_length_nm: length,
        transition_frequency_hz: transition_frequency(length),
        max_transfer: c_sq / (omega * omega),
        transfer_order: order,
    })
}

/// One row of a gate-detuning scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchingPoint {
    pub gate_offset_mev: f64,
    pub c12: f64,
    pub c21: f64,
    pub delta: f64,
    pub max_transfer: f64,
    pub transfer_length_nm: f64,
    /// Set when `C₁₂ ≠ C₂₁` and the geometric mean was used.
    pub symmetrized: bool,
}

/// Detune the drain gate by each offset and report the reachable transfer.
///
/// Off resonance the wells differ, so `C₁₂ ≠ C₂₁`; the metrics then come from
/// the symmetrized system and the row is flagged.
pub fn switching_curve(
    spec: &CouplerSpec,
    mode_pair: (usize, usize),
    gate_offsets: &[f64],
) -> Result<Vec<SwitchingPoint>> {
    let source = modes_of(spec, Channel::Source)?;
    gate_offsets
        .iter()
        .map(|&offset| switching_point(spec, &source, mode_pair, offset))
        .collect()
}

fn switching_point(
    spec: &CouplerSpec,
    source: &[crate::modes::GuidedMode],
    (m, n): (usize, usize),
    offset: f64,
) -> Result<SwitchingPoint> {
    let detuned = spec.with_drain_offset(offset)?;
    let drain = modes_of(&detuned, Channel::Drain)?;
    let coupling = couple_modes(&detuned, source, &drain, m, n)?;
    let raw = CmtSystem::from_coupling(&coupling);
    let symmetrized = !raw.is_hermitian();
    let system = if symmetrized {
        raw.symmetrized().ok_or(Error::NonHermitian {
            c12: raw.c12,
            c21: raw.c21,
        })?
    } else {
        raw
    };
    let metrics = transfer_metrics(&system)?;
    Ok(SwitchingPoint {
        gate_offset_mev: offset,
        c12: coupling.c12,
        c21: coupling.c21,
        delta: coupling.delta,
        max_transfer: metrics.max_transfer,
        transfer_length_nm: metrics.transfer_length_nm,
        symmetrized,
    })
}

/// Drain-gate offset in `(0, max_offset]` at which the maximum reachable
/// transfer drops to `target` (0 < target < 1), found by bisection on the
/// switching curve.
pub fn offset_for_transfer(
    spec: &CouplerSpec,
    mode_pair: (usize, usize),
    target: f64,
    max_offset: f64,
) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "target transfer must lie in (0, 1), got {target}"
        )));
    }
    let source = modes_of(spec, Channel::Source)?;
    let excess = |offset: f64| -> Result<f64> {
        Ok(switching_point(spec, &source, mode_pair, offset)?.max_transfer - target)
    };
    let (mut lo, mut hi) = (0.0, max_offset);
    if excess(lo)? <= 0.0 || excess(hi)? > 0.0 {
        return Err(Error::InvalidConfig(format!(
            "transfer {target} not bracketed by offsets [0, {max_offset}] meV"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-14 * hi.abs().max(1e-300) || mid == lo || mid == hi {
            break;
        }
        if excess(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
