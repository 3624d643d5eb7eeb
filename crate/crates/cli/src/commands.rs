//! The four subcommands. Each returns its tables; writing is separate.

use std::f64::consts::TAU;

use serde_json::{json, Value};
use spinlab_core::diagram::{boundary_consistency, boundary_curves, sweep, PhaseGrid};
use spinlab_core::landscape::{
    classify_configuration, eps_classical, find_stationary_points, global_minimum_with, lowest_minimum,
    total_surface, Angles, ExtremumKind,
};
use spinlab_core::perturbative::{match_levels, total_levels, SigmaIndex};
use spinlab_core::spectrum::{exact_spectrum, ground_energy_per_spin_scan, EffectiveHamiltonian};
use spinlab_core::{Branch, Error, ModelParams, Spin};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::output::{Field, Table};

/// Largest spin the exact diagonalisation accepts.
pub const MAX_SPIN: f64 = 200.0;

fn guard(spins: &[Spin]) -> Result<(), CliError> {
    if spins.is_empty() {
        return Err(CliError::Config("spin list is empty".into()));
    }
    match spins.iter().find(|s| s.value() > MAX_SPIN) {
        Some(s) => Err(CliError::DimensionGuard {
            spin: s.value(),
            max: MAX_SPIN,
        }),
        None => Ok(()),
    }
}

fn block_missing(command: Command) -> CliError {
    CliError::Config(format!("config has no `{command}` block"))
}

fn kind_str(kind: ExtremumKind) -> &'static str {
    match kind {
        ExtremumKind::Minimum => "minimum",
        ExtremumKind::Maximum => "maximum",
    }
}

pub struct Report {
    pub echo: Value,
    pub tables: Vec<Table>,
}

pub fn cmd_spectrum(config: &RunConfig) -> Result<Report, CliError> {
    let block = config.spectrum.as_ref().ok_or_else(|| block_missing(Command::Spectrum))?;
    guard(&block.spins)?;
    config.model.validate()?;

    let mut exact_t = Table::new("spectrum_exact", &["spin", "index", "energy", "fg_residual", "fg_status"]);
    let mut pert_t = Table::new(
        "spectrum_perturbative",
        &["spin", "sigma", "e_plus", "e_minus", "upper", "lower", "status"],
    );
    let mut match_t = Table::new("spectrum_matched", &["spin", "rank", "exact", "perturbative", "residual"]);

    for &spin in &block.spins {
        let params = config.model.with_spin(spin);
        let s = spin.value();
        let exact = exact_spectrum(&params)?;
        let heff = EffectiveHamiltonian::new(&params)?;
        for (k, &e) in exact.eigenvalues.iter().enumerate() {
            let (residual, status) = match heff.residual(e) {
                Ok(r) => (r, "ok"),
                Err(Error::PoleProximity { .. }) => (f64::NAN, "pole_excluded"),
                Err(other) => return Err(other.into()),
            };
            exact_t.push(vec![s.into(), k.into(), e.into(), residual.into(), status.into()]);
        }

        let mut energies = Vec::with_capacity(exact.eigenvalues.len());
        let mut complete = true;
        for sigma in SigmaIndex::all(spin) {
            match total_levels(&params, sigma) {
                Ok(level) => {
                    energies.push(level.upper);
                    energies.push(level.lower);
                    pert_t.push(vec![
                        s.into(),
                        sigma.value().into(),
                        level.e_plus.into(),
                        level.e_minus.into(),
                        level.upper.into(),
                        level.lower.into(),
                        "ok".into(),
                    ]);
                }
                Err(Error::PerturbationBreakdown { .. }) => {
                    complete = false;
                    let nan = f64::NAN;
                    pert_t.push(vec![
                        s.into(),
                        sigma.value().into(),
                        nan.into(),
                        nan.into(),
                        nan.into(),
                        nan.into(),
                        "breakdown".into(),
                    ]);
                }
                Err(other) => return Err(other.into()),
            }
        }
        // Rank matching only makes sense with the full perturbative ladder.
        if complete {
            energies.sort_by(f64::total_cmp);
            for m in match_levels(&exact.eigenvalues, &energies)? {
                match_t.push(vec![
                    s.into(),
                    m.rank.into(),
                    m.exact.into(),
                    m.perturbative.into(),
                    m.residual.into(),
                ]);
            }
        }
    }
    Ok(Report {
        echo: config.echo(),
        tables: vec![exact_t, pert_t, match_t],
    })
}

pub fn cmd_landscape(config: &RunConfig) -> Result<Report, CliError> {
    let block = config.landscape.as_ref().ok_or_else(|| block_missing(Command::Landscape))?;
    let params = &config.model;
    params.validate()?;
    if block.samples < 2 {
        return Err(CliError::Config("landscape.samples must be at least 2".into()));
    }

    let mut profile = Table::new("landscape_profile", &["theta", "eps_plus", "eps_minus", "e_plus", "e_minus"]);
    let last = (block.samples - 1) as f64;
    for i in 0..block.samples {
        let theta = if i + 1 == block.samples { TAU } else { TAU * i as f64 / last };
        let a = Angles::new(theta, block.phi_section)?;
        profile.push(vec![
            theta.into(),
            eps_classical(params, a, Branch::Plus).into(),
            eps_classical(params, a, Branch::Minus).into(),
            total_surface(params, a, Branch::Plus).into(),
            total_surface(params, a, Branch::Minus).into(),
        ]);
    }

    let mut points_t = Table::new(
        "landscape_points",
        &["theta", "phi_section", "energy", "curvature", "kind", "location", "global", "label", "status"],
    );
    match find_stationary_points(params, block.resolution) {
        Ok(points) => {
            let label = classify_configuration(&points).label;
            let global = lowest_minimum(&points).map(|(p, _)| p);
            for p in points.iter().filter(|p| p.phi_section == block.phi_section) {
                let is_global = global.is_some_and(|g| g.theta == p.theta && g.phi_section == p.phi_section);
                points_t.push(vec![
                    p.theta.into(),
                    p.phi_section.to_string().into(),
                    p.energy.into(),
                    p.curvature.into(),
                    kind_str(p.kind).into(),
                    p.location.to_string().into(),
                    is_global.into(),
                    label.as_str().into(),
                    "ok".into(),
                ]);
            }
        }
        Err(Error::DegenerateExtremum { theta, curvature }) => {
            points_t.push(vec![
                theta.into(),
                block.phi_section.to_string().into(),
                Field::Empty,
                curvature.into(),
                Field::Empty,
                Field::Empty,
                Field::Empty,
                Field::Empty,
                "degenerate".into(),
            ]);
        }
        Err(other) => return Err(other.into()),
    }
    Ok(Report {
        echo: config.echo(),
        tables: vec![profile, points_t],
    })
}

fn grid_table(grid: &PhaseGrid) -> Table {
    let mut t = Table::new("diagram", &["j", "j_couple", "label", "e_min", "theta_min", "phi_section"]);
    for c in &grid.cells {
        t.push(vec![
            c.j.into(),
            c.j_couple.into(),
            c.label.as_str().into(),
            c.e_min.into(),
            c.theta_min.into(),
            c.phi_section.map(|p| p.to_string()).into(),
        ]);
    }
    t
}

pub fn cmd_diagram(config: &RunConfig) -> Result<Report, CliError> {
    let spec = config.sweep_spec().ok_or_else(|| block_missing(Command::Diagram))?;
    spec.validate()?;
    let grid = sweep(&spec)?;
    let curves = boundary_curves(&spec);

    let mut flags = Table::new("diagram_flags", &["j", "j_couple", "diagnostic"]);
    for c in grid.cells.iter().filter(|c| c.diagnostic.is_some()) {
        flags.push(vec![c.j.into(), c.j_couple.into(), c.diagnostic.clone().into()]);
    }

    let mut bounds = Table::new("diagram_boundaries", &["j_couple", "j_solid", "j_dashed"]);
    for (k, &jc) in curves.j_couple.iter().enumerate() {
        bounds.push(vec![jc.into(), curves.solid[k].into(), curves.dashed[k].into()]);
    }

    let mut consistency = Table::new(
        "diagram_consistency",
        &["j_couple", "pi_deviation_cells", "zero_deviation_cells"],
    );
    let mut summary = Table::new(
        "diagram_summary",
        &["labels", "unlisted_patterns", "flagged_cells", "max_pi_deviation", "max_zero_deviation", "missing_flips"],
    );
    let labels: Vec<&str> = grid.label_inventory().iter().map(|l| l.as_str()).collect();
    let (max_pi, max_zero, missing) = if spec.j_steps >= 2 {
        let report = boundary_consistency(&grid, &curves)?;
        for col in &report.columns {
            consistency.push(vec![col.j_couple.into(), col.pi_deviation.into(), col.zero_deviation.into()]);
        }
        (
            Field::from(report.max_pi_deviation),
            Field::from(report.max_zero_deviation),
            Field::from(report.missing_flips),
        )
    } else {
        (Field::Empty, Field::Empty, Field::Empty)
    };
    summary.push(vec![
        labels.join(" ").into(),
        grid.unlisted_patterns().into(),
        grid.flagged_cells().into(),
        max_pi,
        max_zero,
        missing,
    ]);

    let echo = json!({ "config": config.echo(), "sweep": spec });
    Ok(Report {
        echo,
        tables: vec![grid_table(&grid), flags, bounds, consistency, summary],
    })
}

pub fn cmd_convergence(config: &RunConfig) -> Result<Report, CliError> {
    let block = config.convergence.as_ref().ok_or_else(|| block_missing(Command::Convergence))?;
    guard(&block.spins)?;
    let template: ModelParams = config.model;
    template.validate()?;
    let classical = global_minimum_with(&template, block.resolution)?.0.energy;
    let scan = ground_energy_per_spin_scan(&template, &block.spins)?;

    let mut t = Table::new("convergence", &["spin", "e_min_per_spin", "classical_limit", "gap"]);
    for (spin, e) in scan {
        t.push(vec![spin.value().into(), e.into(), classical.into(), (e - classical).into()]);
    }
    Ok(Report {
        echo: config.echo(),
        tables: vec![t],
    })
}

pub fn dispatch(command: Command, config: &RunConfig) -> Result<Report, CliError> {
    let present = config.command()?;
    if present != command {
        return Err(CliError::Config(format!(
            "subcommand `{command}` does not match the config's `{present}` block"
        )));
    }
    match command {
        Command::Spectrum => cmd_spectrum(config),
        Command::Landscape => cmd_landscape(config),
        Command::Diagram => cmd_diagram(config),
        Command::Convergence => cmd_convergence(config),
    }
}
