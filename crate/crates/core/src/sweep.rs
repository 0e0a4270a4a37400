//! Design-space sweeps over well width `d` and separation `D`, and the
//! exponential separation law `f_T = 2v_F Ω₀ e^{−γD}/π`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::cmt::{transfer_metrics, CmtSystem, TransferMetrics};
use crate::coupling::{coupling_coefficients, CouplingResult};
use crate::device::{energy_for_k1d, CouplerSpec};
use crate::error::{Error, Result};
use crate::quantities::FERMI_VELOCITY_NM_S;

/// How the electron energy follows the well width across the `d` axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EnergyRule {
    /// Keep `k₁d = k1d_over_pi·π`; `E` changes with `d`.
    FixedK1d(f64),
    /// Keep the base spec's energy.
    FixedEnergy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    d_values: Vec<f64>,
    separation_values: Vec<f64>,
    base_spec: CouplerSpec,
    mode_pair: (usize, usize),
    energy_rule: EnergyRule,
}

fn strictly_ascending(axis: &[f64]) -> bool {
    !axis.is_empty() && axis.iter().all(|v| v.is_finite()) && axis.windows(2).all(|w| w[0] < w[1])
}

impl SweepGrid {
    pub fn new(
        d_values: Vec<f64>,
        separation_values: Vec<f64>,
        base_spec: CouplerSpec,
        mode_pair: (usize, usize),
        energy_rule: EnergyRule,
    ) -> Result<Self> {
        if !strictly_ascending(&d_values) {
            return Err(Error::InvalidConfig(
                "d axis must be nonempty and strictly ascending".into(),
            ));
        }
        if !strictly_ascending(&separation_values) {
            return Err(Error::InvalidConfig(
                "separation axis must be nonempty and strictly ascending".into(),
            ));
        }
        if let EnergyRule::FixedK1d(k1d) = energy_rule {
            if !(k1d > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "k1d_over_pi must be positive, got {k1d}"
                )));
            }
        }
        Ok(SweepGrid {
            d_values,
            separation_values,
            base_spec,
            mode_pair,
            energy_rule,
        })
    }

    pub fn d_values(&self) -> &[f64] {
        &self.d_values
    }

    pub fn separation_values(&self) -> &[f64] {
        &self.separation_values
    }

    pub fn mode_pair(&self) -> (usize, usize) {
        self.mode_pair
    }

    /// Device at one grid point.
    pub fn cell_spec(&self, d: f64, separation: f64) -> Result<CouplerSpec> {
        let spec = self.base_spec.with_widths(d)?.with_separation(separation)?;
        match self.energy_rule {
            EnergyRule::FixedK1d(k1d) => {
                spec.with_energy(energy_for_k1d(spec.source().gate_potential_mev, k1d, d))
            }
            EnergyRule::FixedEnergy => Ok(spec),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellStatus {
    Ok,
    NoModes,
    ModeNotFound,
    ZeroCoupling,
    NonHermitian,
    InvalidSpec,
}

impl CellStatus {
    fn from_error(e: &Error) -> Self {
        match e {
            Error::NoModesFound => CellStatus::NoModes,
            Error::ModeNotFound { .. } => CellStatus::ModeNotFound,
            Error::ZeroCoupling => CellStatus::ZeroCoupling,
            Error::NonHermitian { .. } => CellStatus::NonHermitian,
            _ => CellStatus::InvalidSpec,
        }
    }
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CellStatus::Ok => "ok",
            CellStatus::NoModes => "NoModes",
            CellStatus::ModeNotFound => "ModeNotFound",
            CellStatus::ZeroCoupling => "ZeroCoupling",
            CellStatus::NonHermitian => "NonHermitian",
            CellStatus::InvalidSpec => "InvalidSpec",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellValues {
    pub transition_frequency_hz: f64,
    pub transfer_length_nm: f64,
    pub coupling_energy_mev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub d_nm: f64,
    pub separation_nm: f64,
    pub status: CellStatus,
    /// `None` unless `status` is `Ok`.
    pub values: Option<CellValues>,
}

/// The modes → coupling → transfer pipeline for one device.
pub fn evaluate_pipeline(
    spec: &CouplerSpec,
    (m, n): (usize, usize),
) -> Result<(CouplingResult, TransferMetrics)> {
    let coupling = coupling_coefficients(spec, m, n)?;
    let metrics = transfer_metrics(&CmtSystem::from_coupling(&coupling))?;
    Ok((coupling, metrics))
}

fn evaluate_cell(grid: &SweepGrid, d: f64, separation: f64) -> SweepCell {
    let outcome = grid
        .cell_spec(d, separation)
        .and_then(|spec| evaluate_pipeline(&spec, grid.mode_pair));
    match outcome {
        Ok((coupling, metrics)) => SweepCell {
            d_nm: d,
            separation_nm: separation,
            status: CellStatus::Ok,
            values: Some(CellValues {
                transition_frequency_hz: metrics.transition_frequency_hz,
                transfer_length_nm: metrics.transfer_length_nm,
                coupling_energy_mev: coupling.coupling_energy_mev,
            }),
        },
        Err(e) => SweepCell {
            d_nm: d,
            separation_nm: separation,
            status: CellStatus::from_error(&e),
            values: None,
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub d_values: Vec<f64>,
    pub separation_values: Vec<f64>,
    pub mode_pair: (usize, usize),
    /// Row-major: `d` outer, `D` inner.
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn cell(&self, d_index: usize, separation_index: usize) -> &SweepCell {
        &self.cells[d_index * self.separation_values.len() + separation_index]
    }

    /// `(D, f_T)` of the successful cells in row `d_index`.
    pub fn frequencies_at(&self, d_index: usize) -> (Vec<f64>, Vec<f64>) {
        let width = self.separation_values.len();
        self.cells[d_index * width..(d_index + 1) * width]
            .iter()
            .filter_map(|c| {
                c.values
                    .map(|v| (c.separation_nm, v.transition_frequency_hz))
            })
            .unzip()
    }

    /// Exponential fit along `D`, available for single-`d` sweeps.
    pub fn single_d_fit(&self) -> Option<Result<ExponentialFit>> {
        if self.d_values.len() != 1 {
            return None;
        }
        let (ds, fts) = self.frequencies_at(0);
        Some(fit_exponential(&ds, &fts))
    }

    /// CSV with header `d_nm,D_nm,fT_hz,L_nm,Ec_meV,status`. Failed cells
    /// leave the numeric fields empty. Single-`d` sweeps end with a fit
    /// comment line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d_nm,D_nm,fT_hz,L_nm,Ec_meV,status\n");
        for c in &self.cells {
            match c.values {
                Some(v) => out.push_str(&format!(
                    "{:e},{:e},{:e},{:e},{:e},{}\n",
                    c.d_nm,
                    c.separation_nm,
                    v.transition_frequency_hz,
                    v.transfer_length_nm,
                    v.coupling_energy_mev,
                    c.status
                )),
                None => out.push_str(&format!(
                    "{:e},{:e},,,,{}\n",
                    c.d_nm, c.separation_nm, c.status
                )),
            }
        }
        match self.single_d_fit() {
            Some(Ok(fit)) => out.push_str(&format!(
                "# omega0_nm={:e} gamma_nm={:e} r2={:e}\n",
                fit.omega0, fit.gamma, fit.r_squared
            )),
            Some(Err(e)) => out.push_str(&format!("# fit unavailable: {e}\n")),
            None => {}
        }
        out
    }
}

/// Evaluate every cell on the global thread pool.
pub fn sweep_grid(grid: &SweepGrid) -> SweepResult {
    assemble(grid, |pairs| {
        pairs
            .par_iter()
            .map(|&(d, s)| evaluate_cell(grid, d, s))
            .collect()
    })
}

/// Evaluate every cell in order on the calling thread.
pub fn sweep_grid_serial(grid: &SweepGrid) -> SweepResult {
    assemble(grid, |pairs| {
        pairs
            .iter()
            .map(|&(d, s)| evaluate_cell(grid, d, s))
            .collect()
    })
}

/// Evaluate on a dedicated pool of `threads` workers (`1` runs serially).
pub fn sweep_grid_with_threads(grid: &SweepGrid, threads: usize) -> Result<SweepResult> {
    if threads <= 1 {
        return Ok(sweep_grid_serial(grid));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(|| sweep_grid(grid)))
}

fn assemble(grid: &SweepGrid, run: impl FnOnce(&[(f64, f64)]) -> Vec<SweepCell>) -> SweepResult {
    let pairs: Vec<(f64, f64)> = grid
        .d_values
        .iter()
        .flat_map(|&d| grid.separation_values.iter().map(move |&s| (d, s)))
        .collect();
    SweepResult {
        d_values: grid.d_values.clone(),
        separation_values: grid.separation_values.clone(),
        mode_pair: grid.mode_pair,
        cells: run(&pairs),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    /// Maximum coupling strength `Ω₀`, nm⁻¹.
    pub omega0: f64,
    /// Decay rate `γ`, nm⁻¹.
    pub gamma: f64,
    pub r_squared: f64,
}

impl ExponentialFit {
    pub fn predict(&self, separation_nm: f64) -> f64 {
        2.0 * FERMI_VELOCITY_NM_S * self.omega0 * (-self.gamma * separation_nm).exp() / PI
    }
}

/// Ordinary least squares of `ln f_T` against `D`.
pub fn fit_exponential(separations: &[f64], frequencies: &[f64]) -> Result<ExponentialFit> {
    if separations.len() != frequencies.len() {
        return Err(Error::InvalidConfig(format!(
            "{} separations but {} frequencies",
            separations.len(),
            frequencies.len()
        )));
    }
    let n = separations.len();
    if n < 3 {
        return Err(Error::InsufficientPoints(n));
    }
    if let Some(&bad) = frequencies.iter().find(|f| !(**f > 0.0)) {
        return Err(Error::NonPositiveFrequency(bad));
    }
    let logs: Vec<f64> = frequencies.iter().map(|f| f.ln()).collect();
    let nf = n as f64;
    let mean_x = separations.iter().sum::<f64>() / nf;
    let mean_y = logs.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in separations.iter().zip(&logs) {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("all separations are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = separations
        .iter()
        .zip(&logs)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(ExponentialFit {
        omega0: PI * intercept.exp() / (2.0 * FERMI_VELOCITY_NM_S),
        gamma: -slope,
        r_squared,
    })
}
