//! Independent oracles shared by the integration suites. Nothing here calls
//! the closed-form or root-finding paths it is used to check.

#![allow(dead_code)]

use gwcoupler::device::{build_spec, Channel, CouplerSpec, DeviceConfig};
use gwcoupler::modes::{modes_of, DispersionContext, Parity};
use rand::Rng;

pub fn reference_spec() -> CouplerSpec {
    build_spec(&DeviceConfig::reference()).unwrap()
}

/// Matching residual written out from scratch.
fn residual(ctx: &DispersionContext, parity: Parity, kx: f64) -> f64 {
    let kappa = (ctx.k_well * ctx.k_well - kx * kx + ctx.k0_squared)
        .max(0.0)
        .sqrt();
    let t = (0.5 * kx * ctx.well_width_nm).tan();
    match parity {
        Parity::Symmetric => kx * t - kappa,
        Parity::Antisymmetric => -kx / t - kappa,
    }
}

/// Roots of both parity branches from a dense uniform scan, refined by
/// bisection. Returned sorted by `k_x`.
pub fn brute_force_roots(ctx: &DispersionContext, points: usize) -> Vec<(f64, Parity)> {
    let top = (ctx.k_well * ctx.k_well + ctx.k0_squared.min(0.0))
        .max(0.0)
        .sqrt();
    let mut roots = Vec::new();
    if top == 0.0 {
        return roots;
    }
    for parity in [Parity::Symmetric, Parity::Antisymmetric] {
        // k_x → 0⁺ is negative on both branches
        let mut prev = (0.0, -1.0);
        for i in 1..=points {
            let x = top * i as f64 / points as f64;
            let f = residual(ctx, parity, x);
            if prev.1 < 0.0 && f >= 0.0 {
                let (mut lo, mut hi) = (prev.0, x);
                for _ in 0..300 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if residual(ctx, parity, mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let root = 0.5 * (lo + hi);
                let kappa_sq = ctx.k_well * ctx.k_well - root * root + ctx.k0_squared;
                if kappa_sq > 0.0 {
                    roots.push((root, parity));
                }
            }
            prev = (x, f);
        }
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots
}

/// A random guided-mode context with a nonempty window.
pub fn random_context(rng: &mut impl Rng) -> DispersionContext {
    let d = rng.gen_range(20.0..500.0);
    let k = rng.gen_range(0.01..0.2);
    let k0_sq = k * k * rng.gen_range(-0.9..1.0);
    DispersionContext::new(d, k, k0_sq).unwrap()
}

/// A random device around the reference configuration in which both wells
/// guide at least one mode.
pub fn random_spec(rng: &mut impl Rng) -> CouplerSpec {
    loop {
        let spec = random_device(rng);
        let guided = [Channel::Source, Channel::Drain]
            .iter()
            .all(|&c| modes_of(&spec, c).is_ok());
        if guided {
            return spec;
        }
    }
}

fn random_device(rng: &mut impl Rng) -> CouplerSpec {
    let v1 = 450.0;
    let cfg = DeviceConfig {
        d_nm: Some(rng.gen_range(50.0..400.0)),
        d_drain_nm: None,
        separation_nm: Some(rng.gen_range(5.0..150.0)),
        barrier_mev: Some(500.0),
        v1_mev: Some(v1),
        v2_mev: Some(v1 + rng.gen_range(-5.0..5.0)),
        mass_ratio: Some(rng.gen_range(0.04..0.2)),
        electron_energy_mev: None,
        k1d_over_pi: Some(rng.gen_range(3.0..8.0)),
    };
    build_spec(&cfg).unwrap()
}

#[allow(clippy::too_many_arguments)]
fn simpson_adapt(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson over `[a, b]` split into `panels` equal panels, each
/// refined until its Richardson error estimate falls below its share of `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, tol: f64) -> f64 {
    let width = (b - a) / panels as f64;
    let share = tol / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * width;
            let hi = if i + 1 == panels { b } else { lo + width };
            let (fa, fb, fm) = (f(lo), f(hi), f(0.5 * (lo + hi)));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson_adapt(&f, lo, hi, fa, fm, fb, whole, share, 40)
        })
        .sum()
}

/// Quadrature of a piecewise-smooth integrand with kinks at `breaks`, to a
/// relative tolerance measured against a plain 64-panel Simpson estimate.
pub fn piecewise_simpson(f: impl Fn(f64) -> f64, breaks: &[f64], rtol: f64) -> f64 {
    let coarse: f64 = breaks
        .windows(2)
        .map(|w| {
            let h = (w[1] - w[0]) / 128.0;
            let mut s = f(w[0]) + f(w[1]);
            for i in 1..128 {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(w[0] + i as f64 * h);
            }
            s * h / 3.0
        })
        .sum();
    let tol = rtol * coarse.abs();
    breaks
        .windows(2)
        .map(|w| adaptive_simpson(&f, w[0], w[1], 64, tol / breaks.len() as f64))
        .sum()
}
