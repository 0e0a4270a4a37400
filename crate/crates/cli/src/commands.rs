//! Subcommand bodies. Each returns the complete output text, so nothing is
//! written unless the whole computation succeeded.

use std::fmt::Write as _;
use std::path::Path;

use gwcoupler::cmt::{
    switching_curve, transfer_metrics_of_order, CmtSystem, PropagatorRegistry, SOURCE_POPULATED,
};
use gwcoupler::coupling::couple_modes;
use gwcoupler::device::{Channel, CouplerSpec};
use gwcoupler::modes::{evaluate_profile, modes_of, GuidedMode};
use gwcoupler::sweep::{
    fit_exponential, sweep_grid, sweep_grid_with_threads, ExponentialFit, SweepGrid, SweepResult,
};

use crate::config::Settings;
use crate::CliError;

const SWEEP_HEADER: &str = "d_nm,D_nm,fT_hz,L_nm,Ec_meV,status";

fn warn_if_unconfined(spec: &CouplerSpec) {
    if spec.barrier_warning() {
        eprintln!(
            "gwcoupler: warning: electron energy {} meV exceeds the barrier gate {} meV",
            spec.electron_energy_mev(),
            spec.barrier_mev()
        );
    }
}

fn both_wells(spec: &CouplerSpec) -> Result<(Vec<GuidedMode>, Vec<GuidedMode>), CliError> {
    Ok((
        modes_of(spec, Channel::Source)?,
        modes_of(spec, Channel::Drain)?,
    ))
}

/// Mode table, and optionally the profile dump.
pub fn modes(
    settings: &Settings,
    with_profiles: bool,
) -> Result<(String, Option<String>), CliError> {
    let spec = settings.spec()?;
    warn_if_unconfined(&spec);
    let points = settings.profile_points()?;
    let (source, drain) = both_wells(&spec)?;
    let mut out = String::from("well,index,parity,kx_d,beta_nm,kappa_nm,theta_deg\n");
    for (which, list) in [(Channel::Source, &source), (Channel::Drain, &drain)] {
        for m in list.iter() {
            writeln!(
                out,
                "{},{},{},{:e},{:e},{:e},{:e}",
                which.name(),
                m.index,
                m.parity.name(),
                m.k_x * m.well_width_nm,
                m.beta,
                m.kappa,
                m.theta_deg
            )
            .unwrap();
        }
    }
    let profiles = with_profiles.then(|| profile_table(&spec, &source, &drain, points));
    Ok((out, profiles))
}

fn profile_table(
    spec: &CouplerSpec,
    source: &[GuidedMode],
    drain: &[GuidedMode],
    points: usize,
) -> String {
    let g = spec.geometry();
    let kappa = source
        .iter()
        .chain(drain)
        .map(|m| m.kappa)
        .fold(f64::INFINITY, f64::min);
    let lo = g.well1.0 - 5.0 / kappa;
    let hi = g.well2.1 + 5.0 / kappa;
    let mut out = String::from("x_nm");
    for m in source {
        write!(out, ",u_source_{}", m.index).unwrap();
    }
    for m in drain {
        write!(out, ",u_drain_{}", m.index).unwrap();
    }
    out.push('\n');
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        write!(out, "{x:e}").unwrap();
        for m in source {
            write!(out, ",{:e}", evaluate_profile(m, &g, Channel::Source, x)).unwrap();
        }
        for m in drain {
            write!(out, ",{:e}", evaluate_profile(m, &g, Channel::Drain, x)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn couple(settings: &Settings, all_pairs: bool) -> Result<String, CliError> {
    let spec = settings.spec()?;
    warn_if_unconfined(&spec);
    let (source, drain) = both_wells(&spec)?;
    let pairs: Vec<(usize, usize)> = if all_pairs {
        (1..=source.len())
            .flat_map(|m| (1..=drain.len()).map(move |n| (m, n)))
            .collect()
    } else {
        vec![settings.mode_pair()?]
    };
    let mut out = String::from("m,n,c12_nm,c21_nm,overlap,Ec_meV,delta_nm,hermitian\n");
    for (m, n) in pairs {
        let r = couple_modes(&spec, &source, &drain, m, n)?;
        writeln!(
            out,
            "{m},{n},{:e},{:e},{:e},{:e},{:e},{}",
            r.c12,
            r.c21,
            r.overlap,
            r.coupling_energy_mev,
            r.delta,
            r.is_hermitian()
        )
        .unwrap();
    }
    Ok(out)
}

pub fn propagate(settings: &Settings) -> Result<String, CliError> {
    let spec = settings.spec()?;
    warn_if_unconfined(&spec);
    let (m, n) = settings.mode_pair()?;
    let dy = settings.dy_nm()?;
    let registry = PropagatorRegistry::with_builtins();
    let propagator = registry.get(&settings.propagator_name(&registry)?)?;

    let (source, drain) = both_wells(&spec)?;
    let coupling = couple_modes(&spec, &source, &drain, m, n)?;
    let mut system = CmtSystem::from_coupling(&coupling);
    if let Some(c) = settings.override_coupling {
        if !c.is_finite() {
            return Err(CliError::Config(format!(
                "override_coupling must be finite, got {c}"
            )));
        }
        system.c12 = c;
        system.c21 = c;
    }
    let symmetrized = !system.is_hermitian();
    let reference = if symmetrized {
        system.symmetrized().ok_or(gwcoupler::Error::NonHermitian {
            c12: system.c12,
            c21: system.c21,
        })?
    } else {
        system
    };
    let metrics = transfer_metrics_of_order(&reference, settings.transfer_order())?;
    let y_max = settings
        .y_max_nm
        .unwrap_or((2.0 * metrics.transfer_length_nm).max(1.0));
    if !(y_max > 0.0 && y_max.is_finite()) {
        return Err(CliError::Config(format!(
            "y_max_nm must be positive, got {y_max}"
        )));
    }
    let trace = propagator.propagate(&system, SOURCE_POPULATED, y_max, dy)?;
    let mut out = trace.to_csv();
    write!(
        out,
        "# L_nm={:e} fT_hz={:e}",
        metrics.transfer_length_nm, metrics.transition_frequency_hz
    )
    .unwrap();
    if symmetrized {
        out.push_str(" symmetrized=true");
    }
    out.push('\n');
    Ok(out)
}

pub fn switching(settings: &Settings) -> Result<String, CliError> {
    let spec = settings.spec()?;
    warn_if_unconfined(&spec);
    let pair = settings.mode_pair()?;
    let rows = switching_curve(&spec, pair, &settings.gate_offsets())?;
    let mut out = String::from("dV_meV,c12_nm,c21_nm,delta_nm,max_transfer,L_nm,symmetrized\n");
    for p in rows {
        writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e},{:e},{}",
            p.gate_offset_mev,
            p.c12,
            p.c21,
            p.delta,
            p.max_transfer,
            p.transfer_length_nm,
            p.symmetrized
        )
        .unwrap();
    }
    Ok(out)
}

fn run_sweep(settings: &Settings, threads: Option<usize>) -> Result<SweepResult, CliError> {
    let grid = SweepGrid::new(
        settings.d_axis(),
        settings.separation_axis(),
        settings.spec()?,
        settings.mode_pair()?,
        settings.energy_rule(),
    )?;
    match threads {
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(t) => Ok(sweep_grid_with_threads(&grid, t)?),
        None => Ok(sweep_grid(&grid)),
    }
}

pub fn sweep(settings: &Settings, threads: Option<usize>) -> Result<String, CliError> {
    Ok(run_sweep(settings, threads)?.to_csv())
}

fn fit_row(fit: &ExponentialFit) -> String {
    format!(
        "omega0_nm,gamma_nm,r2\n{:e},{:e},{:e}\n",
        fit.omega0, fit.gamma, fit.r_squared
    )
}

pub fn fit(
    settings: &Settings,
    input: Option<&Path>,
    threads: Option<usize>,
) -> Result<String, CliError> {
    let (separations, frequencies) = match input {
        Some(path) => read_sweep_csv(path)?,
        None => {
            let result = run_sweep(settings, threads)?;
            if result.d_values.len() != 1 {
                return Err(CliError::Config("fit needs a single d value".into()));
            }
            result.frequencies_at(0)
        }
    };
    Ok(fit_row(&fit_exponential(&separations, &frequencies)?))
}

/// `(D, f_T)` of the `ok` rows of a single-`d` sweep CSV.
fn read_sweep_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let bad =
        |line: usize, what: &str| CliError::Config(format!("{}:{line}: {what}", path.display()));
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#'));
    match lines.next() {
        Some((_, header)) if header.trim() == SWEEP_HEADER => {}
        _ => return Err(bad(1, "expected a sweep CSV header")),
    }
    let mut d_seen: Option<f64> = None;
    let (mut separations, mut frequencies) = (Vec::new(), Vec::new());
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(bad(i + 1, "expected 6 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(i + 1, "malformed number"));
        let d = num(fields[0])?;
        if d_seen.is_some_and(|prev| prev != d) {
            return Err(bad(i + 1, "fit needs a single d value"));
        }
        d_seen = Some(d);
        if fields[5] == "ok" {
            separations.push(num(fields[1])?);
            frequencies.push(num(fields[2])?);
        }
    }
    Ok((separations, frequencies))
}
