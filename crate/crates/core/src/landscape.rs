//! Classical energy surfaces of the chain in the thermodynamic limit and the
//! structure of their stationary points.
//!
//! The chain is replaced by a spin coherent state with
//! `<S_z> = S cos(theta)` and `<S_x> = S sin(theta) cos(phi)`. All energies are
//! per spin. The surfaces depend on `phi` only through `cos(phi)` and are
//! stationary in `phi` wherever `sin(phi) sin(theta) = 0`, so extrema are
//! searched on the two sections `phi = 0` and `phi = pi`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots;
use crate::spin::{Branch, ModelParams};

/// Default number of grid cells for the stationary-point scan.
pub const DEFAULT_RESOLUTION: usize = 2048;
pub const MIN_RESOLUTION: usize = 400;
/// Curvatures smaller than this are not classified.
pub const CURVATURE_TOLERANCE: f64 = 1e-10;

const ROOT_TOL: f64 = 1e-12;
const MERGE_TOL: f64 = 1e-8;
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PhiSection {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "pi")]
    Pi,
}

impl PhiSection {
    pub fn angle(self) -> f64 {
        match self {
            PhiSection::Zero => 0.0,
            PhiSection::Pi => PI,
        }
    }

    pub fn cos(self) -> f64 {
        match self {
            PhiSection::Zero => 1.0,
            PhiSection::Pi => -1.0,
        }
    }
}

impl fmt::Display for PhiSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhiSection::Zero => "0",
            PhiSection::Pi => "pi",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Angles {
    pub theta: f64,
    pub phi: PhiSection,
}

impl Angles {
    pub fn new(theta: f64, phi: PhiSection) -> Result<Self> {
        if !(0.0..=TAU).contains(&theta) {
            return Err(Error::InvalidArgument(format!("theta = {theta} outside [0, 2pi]")));
        }
        Ok(Angles { theta, phi })
    }
}

/// Bare chain surface of one branch.
pub fn eps_classical(params: &ModelParams, angles: Angles, branch: Branch) -> f64 {
    eps_at(params, angles.theta, angles.phi.cos(), branch)
}

fn eps_at(params: &ModelParams, theta: f64, cos_phi: f64, branch: Branch) -> f64 {
    let (s, c) = theta.sin_cos();
    params.field(branch) * c + 0.5 * params.j_chain * c * c + params.delta_t * s * cos_phi
}

/// Upper (`Branch::Plus`) or lower (`Branch::Minus`) surface of the coupled
/// system.
pub fn total_surface(params: &ModelParams, angles: Angles, branch: Branch) -> f64 {
    surface_at(params, angles.theta, angles.phi.cos(), branch)
}

fn surface_at(params: &ModelParams, theta: f64, cos_phi: f64, branch: Branch) -> f64 {
    let plus = eps_at(params, theta, cos_phi, Branch::Plus);
    let minus = eps_at(params, theta, cos_phi, Branch::Minus);
    let root = (params.omega + plus - minus).hypot(params.delta);
    0.5 * (plus + minus + branch.sign() * root)
}

/// `omega + j_couple cos(theta)`, the single-spin splitting along the surface.
fn splitting(params: &ModelParams, cos_theta: f64) -> f64 {
    params.omega + params.j_couple * cos_theta
}

fn dtheta(params: &ModelParams, theta: f64, cos_phi: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let d = splitting(params, c);
    let r = d.hypot(params.delta);
    -params.omega_t * s - params.j_chain * c * s
        + params.delta_t * c * cos_phi
        + 0.5 * params.j_couple * s * d / r
}

/// `dE^-/dtheta / sin(theta)` when `delta_t = 0`; smooth, and its zeros are the
/// interior stationary points.
fn reduced_dtheta(params: &ModelParams, theta: f64) -> f64 {
    let c = theta.cos();
    let d = splitting(params, c);
    -params.omega_t - params.j_chain * c + 0.5 * params.j_couple * d / d.hypot(params.delta)
}

fn reduced_dtheta_slope(params: &ModelParams, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let r = splitting(params, c).hypot(params.delta);
    params.j_chain * s - 0.5 * params.j_couple * params.j_couple * s * params.delta * params.delta / (r * r * r)
}

/// `d^2 E^- / dtheta^2` at fixed `phi`.
pub fn surface_curvature(params: &ModelParams, theta: f64, phi: f64) -> f64 {
    curvature_at(params, theta, phi.cos())
}

fn curvature_at(params: &ModelParams, theta: f64, cos_phi: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let d = splitting(params, c);
    let r = d.hypot(params.delta);
    let coupling = c * d / r - params.j_couple * s * s * params.delta * params.delta / (r * r * r);
    -params.omega_t * c - params.j_chain * (2.0 * theta).cos() - params.delta_t * s * cos_phi
        + 0.5 * params.j_couple * coupling
}

/// `(dE^-/dtheta, dE^-/dphi)` for unrestricted `phi`.
pub fn surface_gradient(params: &ModelParams, theta: f64, phi: f64) -> (f64, f64) {
    let (sin_phi, cos_phi) = phi.sin_cos();
    (
        dtheta(params, theta, cos_phi),
        -params.delta_t * theta.sin() * sin_phi,
    )
}

/// Field below which the bare chain (`j_couple = 0`) breaks the symmetry.
pub fn bare_critical_field(params: &ModelParams) -> f64 {
    params.j_chain
}

/// Broken-symmetry angle of the bare chain on the `phi = 0` section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrokenAngle {
    /// Minimum of the bare surface in `[pi/2, 3pi/2]`.
    pub theta_root: f64,
    /// `|pi - theta_root|`, the angle whose cosine is quoted as the
    /// broken-phase projection `omega_t / J` at `delta_t = 0`.
    pub theta0: f64,
}

impl BrokenAngle {
    fn from_root(theta_root: f64) -> Self {
        BrokenAngle {
            theta_root,
            theta0: (PI - theta_root).abs(),
        }
    }

    pub fn cos_theta0(&self) -> f64 {
        self.theta0.cos()
    }
}

/// Solves `cos(theta) (J sin(theta) - delta_t) + omega_t sin(theta) = 0` on
/// `[pi/2, 3pi/2]` for the lowest minimum of the bare chain. `j_couple` is
/// ignored.
pub fn bare_broken_theta(params: &ModelParams) -> Result<BrokenAngle> {
    params.validate()?;
    let (omega_t, j, delta_t) = (params.omega_t, params.j_chain, params.delta_t);
    if delta_t == 0.0 {
        if j <= 0.0 || omega_t.abs() >= j {
            return Err(Error::NoBrokenPhase);
        }
        return Ok(BrokenAngle::from_root((-omega_t / j).acos()));
    }

    let f = |t: f64| {
        let (s, c) = t.sin_cos();
        c * (j * s - delta_t) + omega_t * s
    };
    let df = |t: f64| {
        let (s, c) = t.sin_cos();
        -s * (j * s - delta_t) + j * c * c + omega_t * c
    };
    let bare = ModelParams {
        j_couple: 0.0,
        ..*params
    };
    let mut best: Option<(f64, f64)> = None;
    for bracket in roots::scan(&f, FRAC_PI_2, 3.0 * FRAC_PI_2, 4096) {
        let theta = roots::refine(&f, &df, bracket, ROOT_TOL)?;
        // f = -d(eps)/dtheta, so minima have f' < 0
        if df(theta) >= 0.0 {
            continue;
        }
        let energy = eps_at(&bare, theta, 1.0, Branch::Plus);
        if best.is_none_or(|(_, e)| energy < e - TIE_TOL) {
            best = Some((theta, energy));
        }
    }
    best.map(|(theta, _)| BrokenAngle::from_root(theta))
        .ok_or(Error::NoBrokenPhase)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointCurvatures {
    pub at_pi: f64,
    /// Shared by `theta = 0` and `theta = 2pi`.
    pub at_zero: f64,
}

/// Closed-form `d^2 E^-/dtheta^2` at `theta = pi` and `theta = 0`; exact for
/// `delta_t = 0`.
pub fn endpoint_curvatures(params: &ModelParams) -> EndpointCurvatures {
    let correction = |split: f64| {
        params.j_couple * split / (2.0 * split.hypot(params.delta))
    };
    EndpointCurvatures {
        at_pi: params.omega_t - params.j_chain + correction(params.j_couple - params.omega),
        at_zero: -params.omega_t - params.j_chain + correction(params.j_couple + params.omega),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointStability {
    pub pi_is_min: bool,
    pub zero_is_min: bool,
}

pub fn endpoint_stability(params: &ModelParams) -> EndpointStability {
    let c = endpoint_curvatures(params);
    EndpointStability {
        pi_is_min: c.at_pi > 0.0,
        zero_is_min: c.at_zero > 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocationClass {
    #[serde(rename = "endpoint_0_2pi")]
    EndpointZero,
    #[serde(rename = "endpoint_pi")]
    EndpointPi,
    #[serde(rename = "intermediate")]
    Intermediate,
}

impl fmt::Display for LocationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LocationClass::EndpointZero => "endpoint_0_2pi",
            LocationClass::EndpointPi => "endpoint_pi",
            LocationClass::Intermediate => "intermediate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub theta: f64,
    pub phi_section: PhiSection,
    /// Lower surface per spin.
    pub energy: f64,
    pub curvature: f64,
    pub kind: ExtremumKind,
    pub location: LocationClass,
}

impl StationaryPoint {
    pub fn is_minimum(&self) -> bool {
        self.kind == ExtremumKind::Minimum
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Stationary points of the lower surface on both `phi` sections.
///
/// Each section is scanned on `resolution` cells of `[0, 2pi]`; sign changes
/// of `dE/dtheta` are refined by bisection. For `delta_t = 0` the endpoints
/// `0` and `pi` are stationary by symmetry and the interior roots are taken
/// from `dE/dtheta / sin(theta)`. `theta = 2pi` is reported as `theta = 0`.
pub fn find_stationary_points(params: &ModelParams, resolution: usize) -> Result<Vec<StationaryPoint>> {
    params.validate()?;
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} below minimum {MIN_RESOLUTION}"
        )));
    }
    let mut out = section_points(params, PhiSection::Zero, resolution)?;
    out.extend(section_points(params, PhiSection::Pi, resolution)?);
    Ok(out)
}

fn section_points(params: &ModelParams, phi: PhiSection, resolution: usize) -> Result<Vec<StationaryPoint>> {
    let cos_phi = phi.cos();
    let grad = |t: f64| dtheta(params, t, cos_phi);
    let curv = |t: f64| curvature_at(params, t, cos_phi);
    let symmetric = params.delta_t == 0.0;

    let mut thetas = Vec::new();
    if symmetric {
        thetas.extend([0.0, PI]);
        let reduced = |t: f64| reduced_dtheta(params, t);
        let reduced_slope = |t: f64| reduced_dtheta_slope(params, t);
        for bracket in roots::scan(&reduced, 0.0, TAU, resolution) {
            let t = roots::refine(&reduced, &reduced_slope, bracket, ROOT_TOL)?;
            if [0.0, PI, TAU].iter().all(|&e| (t - e).abs() > MERGE_TOL) {
                thetas.push(t);
            }
        }
    } else {
        for bracket in roots::scan(&grad, 0.0, TAU, resolution) {
            thetas.push(roots::refine(&grad, &curv, bracket, ROOT_TOL)?);
        }
    }

    for t in thetas.iter_mut() {
        if *t >= TAU - MERGE_TOL {
            *t = 0.0;
        }
    }
    thetas.sort_by(f64::total_cmp);
    thetas.dedup_by(|a, b| (*a - *b).abs() <= MERGE_TOL);

    let mut points = Vec::with_capacity(thetas.len());
    for theta in thetas {
        let curvature = curv(theta);
        if !(curvature.abs() > CURVATURE_TOLERANCE) {
            return Err(Error::DegenerateExtremum { theta, curvature });
        }
        points.push(StationaryPoint {
            theta,
            phi_section: phi,
            energy: surface_at(params, theta, cos_phi, Branch::Minus),
            curvature,
            kind: if curvature > 0.0 {
                ExtremumKind::Minimum
            } else {
                ExtremumKind::Maximum
            },
            location: LocationClass::Intermediate,
        });
    }

    if symmetric {
        for p in points.iter_mut() {
            if p.theta == 0.0 {
                p.location = LocationClass::EndpointZero;
            } else if p.theta == PI {
                p.location = LocationClass::EndpointPi;
            }
        }
    } else {
        // endpoints drift off {0, pi}; take the nearest stationary point
        for (nominal, class) in [(0.0, LocationClass::EndpointZero), (PI, LocationClass::EndpointPi)] {
            let nearest = points
                .iter()
                .enumerate()
                .map(|(i, p)| (i, circular_distance(p.theta, nominal)))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((i, d)) = nearest {
                if d <= FRAC_PI_4 {
                    points[i].location = class;
                }
            }
        }
    }
    Ok(points)
}

/// Extremum configurations of the lower surface.
///
/// Suffix `a`: the extrema at `0` and `pi` are of different type; `b`: same
/// type. The digit counts the pattern of intermediate extrema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Configuration {
    #[serde(rename = "1a")]
    OneA,
    #[serde(rename = "2a")]
    TwoA,
    #[serde(rename = "4a")]
    FourA,
    #[serde(rename = "1b")]
    OneB,
    #[serde(rename = "2b")]
    TwoB,
    #[serde(rename = "4b")]
    FourB,
    #[serde(rename = "other")]
    Other,
}

impl Configuration {
    pub const LISTED: [Configuration; 6] = [
        Configuration::OneA,
        Configuration::TwoA,
        Configuration::FourA,
        Configuration::OneB,
        Configuration::TwoB,
        Configuration::FourB,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Configuration::OneA => "1a",
            Configuration::TwoA => "2a",
            Configuration::FourA => "4a",
            Configuration::OneB => "1b",
            Configuration::TwoB => "2b",
            Configuration::FourB => "4b",
            Configuration::Other => "other",
        }
    }

    pub fn from_pattern(zero_is_min: bool, pi_is_min: bool, intermediate_minima: usize) -> Self {
        match (zero_is_min, pi_is_min, intermediate_minima) {
            (true, false, 0) => Configuration::OneA,
            (false, true, 0) => Configuration::TwoA,
            (true, false, 2) | (false, true, 2) => Configuration::FourA,
            (true, true, 0) => Configuration::OneB,
            (false, false, 2) => Configuration::TwoB,
            (false, false, 4) => Configuration::FourB,
            _ => Configuration::Other,
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseLabel {
    pub label: Configuration,
    pub zero_is_min: bool,
    pub pi_is_min: bool,
    pub intermediate_minima: usize,
    pub minima: Vec<StationaryPoint>,
}

/// Labels the extremum pattern of one `phi` section (`phi = 0` when present).
///
/// The two sections are mirror images, `E(theta, pi) = E(2pi - theta, 0)`, so
/// either carries the full pattern.
pub fn classify_configuration(points: &[StationaryPoint]) -> PhaseLabel {
    let section = if points.iter().any(|p| p.phi_section == PhiSection::Zero) {
        PhiSection::Zero
    } else {
        PhiSection::Pi
    };
    let own: Vec<&StationaryPoint> = points.iter().filter(|p| p.phi_section == section).collect();
    let is_min_at = |class| own.iter().any(|p| p.location == class && p.is_minimum());
    let zero_is_min = is_min_at(LocationClass::EndpointZero);
    let pi_is_min = is_min_at(LocationClass::EndpointPi);
    let intermediate_minima = own
        .iter()
        .filter(|p| p.location == LocationClass::Intermediate && p.is_minimum())
        .count();
    PhaseLabel {
        label: Configuration::from_pattern(zero_is_min, pi_is_min, intermediate_minima),
        zero_is_min,
        pi_is_min,
        intermediate_minima,
        minima: own.into_iter().filter(|p| p.is_minimum()).copied().collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    SymmetricUp,
    SymmetricDown,
    Broken,
}

impl PhaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseKind::SymmetricUp => "symmetric_up",
            PhaseKind::SymmetricDown => "symmetric_down",
            PhaseKind::Broken => "broken",
        }
    }
}

/// Lowest minimum among `points`. Ties within rounding prefer the `phi = 0`
/// section, then `theta` in `(0, pi]`.
pub fn lowest_minimum(points: &[StationaryPoint]) -> Option<(StationaryPoint, PhaseKind)> {
    let minima: Vec<&StationaryPoint> = points.iter().filter(|p| p.is_minimum()).collect();
    let lowest = minima.iter().map(|p| p.energy).fold(f64::INFINITY, f64::min);
    let tol = TIE_TOL * (1.0 + lowest.abs());
    let pick = minima
        .into_iter()
        .filter(|p| p.energy <= lowest + tol)
        .min_by(|a, b| {
            let key = |p: &StationaryPoint| {
                (
                    p.phi_section != PhiSection::Zero,
                    !(p.theta > 0.0 && p.theta <= PI),
                )
            };
            key(a).cmp(&key(b)).then(a.theta.total_cmp(&b.theta))
        })?;
    let kind = match pick.location {
        LocationClass::EndpointZero => PhaseKind::SymmetricUp,
        LocationClass::EndpointPi => PhaseKind::SymmetricDown,
        LocationClass::Intermediate => PhaseKind::Broken,
    };
    Some((*pick, kind))
}

pub fn global_minimum(params: &ModelParams) -> Result<(StationaryPoint, PhaseKind)> {
    global_minimum_with(params, DEFAULT_RESOLUTION)
}

pub fn global_minimum_with(params: &ModelParams, resolution: usize) -> Result<(StationaryPoint, PhaseKind)> {
    let points = find_stationary_points(params, resolution)?;
    lowest_minimum(&points).ok_or_else(|| Error::NumericalFailure {
        context: "no minimum found on the lower surface".into(),
        iterations: resolution,
    })
}
