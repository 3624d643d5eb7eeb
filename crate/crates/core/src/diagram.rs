//! Phase diagram on the (chain coupling, spin–chain coupling) plane.
//!
//! Every cell is an independent classification of the lower surface. Cells
//! are evaluated in parallel on the current rayon pool and stored by index,
//! so the grid does not depend on scheduling.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::{
    classify_configuration, find_stationary_points, lowest_minimum, Configuration, PhiSection,
    MIN_RESOLUTION,
};
use crate::spin::{ModelParams, Spin};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub j_min: f64,
    pub j_max: f64,
    pub j_steps: usize,
    pub jc_min: f64,
    pub jc_max: f64,
    pub jc_steps: usize,
    pub omega: f64,
    pub omega_t: f64,
    pub delta: f64,
    pub delta_t: f64,
    pub resolution: usize,
}

impl SweepSpec {
    /// `omega = 1`, `omega_t = 0.2`, `delta = 0.5`, `delta_t = 0` on
    /// `J in [0, 2]`, `J~ in [0, 4]`.
    pub fn reference(steps: usize) -> Self {
        SweepSpec {
            j_min: 0.0,
            j_max: 2.0,
            j_steps: steps,
            jc_min: 0.0,
            jc_max: 4.0,
            jc_steps: steps,
            omega: 1.0,
            omega_t: 0.2,
            delta: 0.5,
            delta_t: 0.0,
            resolution: 1024,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("j_min", self.j_min),
            ("j_max", self.j_max),
            ("jc_min", self.jc_min),
            ("jc_max", self.jc_max),
            ("omega", self.omega),
            ("omega_t", self.omega_t),
            ("delta", self.delta),
            ("delta_t", self.delta_t),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} = {v} is not finite")));
            }
        }
        for (name, steps, lo, hi) in [
            ("j", self.j_steps, self.j_min, self.j_max),
            ("jc", self.jc_steps, self.jc_min, self.jc_max),
        ] {
            if steps == 0 {
                return Err(Error::InvalidArgument(format!("{name}_steps must be positive")));
            }
            if steps == 1 && lo != hi {
                return Err(Error::InvalidArgument(format!(
                    "{name}_steps = 1 requires {name}_min = {name}_max"
                )));
            }
            if hi < lo {
                return Err(Error::InvalidArgument(format!("{name}_max < {name}_min")));
            }
        }
        if self.resolution < MIN_RESOLUTION {
            return Err(Error::InvalidArgument(format!(
                "resolution {} below minimum {MIN_RESOLUTION}",
                self.resolution
            )));
        }
        Ok(())
    }

    fn axis(min: f64, max: f64, steps: usize) -> Vec<f64> {
        if steps == 1 {
            return vec![min];
        }
        let step = (max - min) / (steps - 1) as f64;
        (0..steps)
            .map(|i| if i + 1 == steps { max } else { min + step * i as f64 })
            .collect()
    }

    pub fn j_values(&self) -> Vec<f64> {
        Self::axis(self.j_min, self.j_max, self.j_steps)
    }

    pub fn jc_values(&self) -> Vec<f64> {
        Self::axis(self.jc_min, self.jc_max, self.jc_steps)
    }

    pub fn j_step(&self) -> f64 {
        (self.j_max - self.j_min) / (self.j_steps.max(2) - 1) as f64
    }

    pub fn params(&self, j_chain: f64, j_couple: f64) -> ModelParams {
        ModelParams {
            omega: self.omega,
            delta: self.delta,
            omega_t: self.omega_t,
            delta_t: self.delta_t,
            j_chain,
            j_couple,
            spin: Spin::HALF,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub j: f64,
    pub j_couple: f64,
    pub label: Configuration,
    /// Lowest minimum of the lower surface; NaN when the cell failed.
    pub e_min: f64,
    pub theta_min: f64,
    pub phi_section: Option<PhiSection>,
    pub zero_is_min: Option<bool>,
    pub pi_is_min: Option<bool>,
    /// Set when the stationary-point search failed for this cell.
    pub diagnostic: Option<String>,
}

pub fn evaluate_cell(params: &ModelParams, resolution: usize) -> Cell {
    let failed = |msg: String| Cell {
        j: params.j_chain,
        j_couple: params.j_couple,
        label: Configuration::Other,
        e_min: f64::NAN,
        theta_min: f64::NAN,
        phi_section: None,
        zero_is_min: None,
        pi_is_min: None,
        diagnostic: Some(msg),
    };
    let points = match find_stationary_points(params, resolution) {
        Ok(points) => points,
        Err(e) => return failed(e.to_string()),
    };
    let label = classify_configuration(&points);
    let Some((min, _)) = lowest_minimum(&points) else {
        return failed("no minimum found".into());
    };
    Cell {
        j: params.j_chain,
        j_couple: params.j_couple,
        label: label.label,
        e_min: min.energy,
        theta_min: min.theta,
        phi_section: Some(min.phi_section),
        zero_is_min: Some(label.zero_is_min),
        pi_is_min: Some(label.pi_is_min),
        diagnostic: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub spec: SweepSpec,
    /// Row-major: row `i` is `j_values()[i]`, column `k` is `jc_values()[k]`.
    pub cells: Vec<Cell>,
}

impl PhaseGrid {
    pub fn cell(&self, j_index: usize, jc_index: usize) -> &Cell {
        &self.cells[j_index * self.spec.jc_steps + jc_index]
    }

    pub fn labels(&self) -> Vec<Vec<Configuration>> {
        self.cells
            .chunks(self.spec.jc_steps)
            .map(|row| row.iter().map(|c| c.label).collect())
            .collect()
    }

    pub fn minima_energy(&self) -> Vec<Vec<f64>> {
        self.cells
            .chunks(self.spec.jc_steps)
            .map(|row| row.iter().map(|c| c.e_min).collect())
            .collect()
    }

    pub fn label_inventory(&self) -> BTreeSet<Configuration> {
        self.cells.iter().map(|c| c.label).collect()
    }

    /// Cells with a well-formed extremum pattern outside the six listed
    /// configurations.
    pub fn unlisted_patterns(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| c.label == Configuration::Other && c.diagnostic.is_none())
            .count()
    }

    pub fn flagged_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.diagnostic.is_some()).count()
    }
}

fn cell_params(spec: &SweepSpec) -> Vec<ModelParams> {
    let jc = spec.jc_values();
    spec.j_values()
        .into_iter()
        .flat_map(|j| jc.iter().map(move |&k| spec.params(j, k)))
        .collect()
}

/// Classifies every cell of the sweep on the current rayon pool.
pub fn sweep(spec: &SweepSpec) -> Result<PhaseGrid> {
    spec.validate()?;
    let cells = cell_params(spec)
        .par_iter()
        .map(|p| evaluate_cell(p, spec.resolution))
        .collect();
    Ok(PhaseGrid { spec: *spec, cells })
}

pub fn sweep_serial(spec: &SweepSpec) -> Result<PhaseGrid> {
    spec.validate()?;
    let cells = cell_params(spec)
        .iter()
        .map(|p| evaluate_cell(p, spec.resolution))
        .collect();
    Ok(PhaseGrid { spec: *spec, cells })
}

/// Chain couplings at which the `theta = pi` (solid) and `theta = 0` (dashed)
/// endpoint curvatures vanish, sampled on the sweep's coupling axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurves {
    pub j_couple: Vec<f64>,
    pub solid: Vec<f64>,
    pub dashed: Vec<f64>,
}

pub fn solid_boundary(spec: &SweepSpec, j_couple: f64) -> f64 {
    let split = j_couple - spec.omega;
    spec.omega_t + j_couple * split / (2.0 * split.hypot(spec.delta))
}

pub fn dashed_boundary(spec: &SweepSpec, j_couple: f64) -> f64 {
    let split = j_couple + spec.omega;
    -spec.omega_t + j_couple * split / (2.0 * split.hypot(spec.delta))
}

pub fn boundary_curves(spec: &SweepSpec) -> BoundaryCurves {
    let j_couple = spec.jc_values();
    BoundaryCurves {
        solid: j_couple.iter().map(|&k| solid_boundary(spec, k)).collect(),
        dashed: j_couple.iter().map(|&k| dashed_boundary(spec, k)).collect(),
        j_couple,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnDeviation {
    pub j_couple: f64,
    /// Distance, in cells, between the `theta = pi` flip and the solid curve.
    pub pi_deviation: Option<f64>,
    pub zero_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub columns: Vec<ColumnDeviation>,
    pub max_pi_deviation: f64,
    pub max_zero_deviation: f64,
    /// Columns where a curve crosses the window but the grid shows no flip.
    pub missing_flips: usize,
}

impl ConsistencyReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_pi_deviation.max(self.max_zero_deviation)
    }

    pub fn is_consistent(&self, max_cells: f64) -> bool {
        self.missing_flips == 0 && self.max_deviation() <= max_cells
    }
}

/// Worst distance (in cells) between flips of an endpoint flag along one
/// column and the analytic boundary `curve`. `None` when neither exists.
fn column_deviation(
    rows: &[(f64, Option<bool>)],
    curve: f64,
    step: f64,
    missing: &mut usize,
) -> Option<f64> {
    let known: Vec<(f64, bool)> = rows.iter().filter_map(|&(j, f)| f.map(|f| (j, f))).collect();
    let flips: Vec<f64> = known
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| 0.5 * (w[0].0 + w[1].0))
        .collect();
    let (first, last) = (rows.first()?.0, rows.last()?.0);
    if flips.is_empty() {
        if curve > first && curve < last {
            *missing += 1;
        }
        return None;
    }
    flips
        .iter()
        .map(|&j| (j - curve).abs() / step)
        .reduce(f64::max)
}

pub fn boundary_consistency(grid: &PhaseGrid, curves: &BoundaryCurves) -> Result<ConsistencyReport> {
    let spec = &grid.spec;
    if spec.j_steps < 2 {
        return Err(Error::InvalidArgument("consistency check needs at least two J rows".into()));
    }
    if curves.j_couple != spec.jc_values() {
        return Err(Error::InvalidArgument("curves were sampled on a different grid".into()));
    }
    let step = spec.j_step();
    let j = spec.j_values();
    let mut missing = 0;
    let mut columns = Vec::with_capacity(spec.jc_steps);
    for (k, &jc) in curves.j_couple.iter().enumerate() {
        let pi_rows: Vec<_> = j.iter().enumerate().map(|(i, &v)| (v, grid.cell(i, k).pi_is_min)).collect();
        let zero_rows: Vec<_> = j.iter().enumerate().map(|(i, &v)| (v, grid.cell(i, k).zero_is_min)).collect();
        columns.push(ColumnDeviation {
            j_couple: jc,
            pi_deviation: column_deviation(&pi_rows, curves.solid[k], step, &mut missing),
            zero_deviation: column_deviation(&zero_rows, curves.dashed[k], step, &mut missing),
        });
    }
    let worst = |f: fn(&ColumnDeviation) -> Option<f64>| {
        columns.iter().filter_map(f).fold(0.0, f64::max)
    };
    Ok(ConsistencyReport {
        max_pi_deviation: worst(|c| c.pi_deviation),
        max_zero_deviation: worst(|c| c.zero_deviation),
        missing_flips: missing,
        columns,
    })
}
