//! Exact diagonalization of the finite-N Hamiltonian and the energy-dependent
//! effective Hamiltonian obtained by eliminating the lower single-spin block.

use faer::Side;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spin::{build_full, build_lmg, Branch, ModelParams, Spin};

const SYMMETRY_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;

/// Default distance below which a trial energy counts as sitting on a pole of
/// the lower-block resolvent.
pub const DEFAULT_POLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: Option<DMatrix<f64>>,
}

impl SpectrumResult {
    pub fn ground(&self) -> f64 {
        self.eigenvalues[0]
    }
}

fn check_symmetric(matrix: &DMatrix<f64>) -> Result<()> {
    if !matrix.is_square() {
        return Err(Error::InvalidArgument(format!(
            "matrix is {}x{}, expected square",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let scale = matrix.amax().max(f64::MIN_POSITIVE);
    let n = matrix.nrows();
    for i in 0..n {
        for j in i + 1..n {
            if (matrix[(i, j)] - matrix[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::InvalidArgument(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Full spectrum of a real symmetric matrix, ascending.
///
/// Every returned pair is checked against `|Hv - λv| <= 1e-10 ‖H‖`.
pub fn eigensolve_sym(matrix: &DMatrix<f64>, with_vectors: bool) -> Result<SpectrumResult> {
    check_symmetric(matrix)?;
    let n = matrix.nrows();
    if n == 0 {
        return Ok(SpectrumResult {
            eigenvalues: Vec::new(),
            eigenvectors: with_vectors.then(|| DMatrix::zeros(0, 0)),
        });
    }
    let eig = faer::Mat::<f64>::from_fn(n, n, |i, j| matrix[(i, j)]).selfadjoint_eigendecomposition(Side::Lower);
    let (lambdas, u) = (eig.s().column_vector(), eig.u());

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lambdas.read(a).total_cmp(&lambdas.read(b)));

    let norm = matrix.norm().max(f64::MIN_POSITIVE);
    let mut vectors = DMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (k, &idx) in order.iter().enumerate() {
        let lambda = lambdas.read(idx);
        let v = DMatrix::from_fn(n, 1, |i, _| u.read(i, idx));
        let residual = (matrix * &v - &v * lambda).norm();
        if !(residual <= RESIDUAL_TOL * norm) {
            return Err(Error::NumericalFailure {
                context: format!("eigenpair {k} residual {residual:e} exceeds tolerance"),
                iterations: 1,
            });
        }
        values.push(lambda);
        vectors.set_column(k, &v.column(0));
    }
    Ok(SpectrumResult {
        eigenvalues: values,
        eigenvectors: with_vectors.then_some(vectors),
    })
}

/// Eigenvalues of the full `2(2S+1)`-dimensional Hamiltonian.
pub fn exact_spectrum(params: &ModelParams) -> Result<SpectrumResult> {
    eigensolve_sym(&build_full(params)?, false)
}

/// `±omega/2 + H_LMG^±` for the given branch.
fn shifted_block(params: &ModelParams, branch: Branch) -> Result<DMatrix<f64>> {
    let mut h = build_lmg(params, branch)?;
    let shift = branch.sign() * params.omega / 2.0;
    for k in 0..h.nrows() {
        h[(k, k)] += shift;
    }
    Ok(h)
}

/// Evaluates the upper effective Hamiltonian at trial energies.
///
/// The lower-block spectrum (the resolvent poles) is computed once.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    upper: DMatrix<f64>,
    lower: DMatrix<f64>,
    poles: Vec<f64>,
    coupling: f64,
    pole_tolerance: f64,
}

impl EffectiveHamiltonian {
    pub fn new(params: &ModelParams) -> Result<Self> {
        Self::with_pole_tolerance(params, DEFAULT_POLE_TOLERANCE)
    }

    pub fn with_pole_tolerance(params: &ModelParams, pole_tolerance: f64) -> Result<Self> {
        if !(pole_tolerance >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "pole tolerance {pole_tolerance} must be non-negative"
            )));
        }
        let lower = shifted_block(params, Branch::Minus)?;
        let poles = eigensolve_sym(&lower, false)?.eigenvalues;
        Ok(EffectiveHamiltonian {
            upper: shifted_block(params, Branch::Plus)?,
            lower,
            poles,
            coupling: params.delta * params.delta / 4.0,
            pole_tolerance,
        })
    }

    /// Eigenvalues of `-omega/2 + H_LMG^-`, ascending.
    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    /// Nearest resolvent pole and its distance from `energy`.
    pub fn nearest_pole(&self, energy: f64) -> (f64, f64) {
        self.poles
            .iter()
            .map(|&p| (p, (p - energy).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((f64::NAN, f64::INFINITY))
    }

    /// `omega/2 + H_LMG^+ - (delta^2/4) (-omega/2 + H_LMG^- - E)^{-1}`.
    pub fn matrix(&self, energy: f64) -> Result<DMatrix<f64>> {
        let (pole, distance) = self.nearest_pole(energy);
        if distance <= self.pole_tolerance {
            return Err(Error::PoleProximity {
                energy,
                pole,
                distance,
            });
        }
        let n = self.lower.nrows();
        let mut shifted = self.lower.clone();
        for k in 0..n {
            shifted[(k, k)] -= energy;
        }
        let lu = shifted.lu();
        let green = lu
            .solve(&DMatrix::identity(n, n))
            .ok_or_else(|| Error::NumericalFailure {
                context: format!("resolvent solve at E = {energy}"),
                iterations: 1,
            })?;
        let mut h = &self.upper - green * self.coupling;
        // the resolvent of a symmetric matrix is symmetric; drop solver noise
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 * (h[(i, j)] + h[(j, i)]);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        Ok(h)
    }

    /// Smallest `|λ(E) - E|` over the eigenvalues `λ(E)` of the effective
    /// Hamiltonian. Zero exactly when `E` is a level of the full system.
    pub fn residual(&self, energy: f64) -> Result<f64> {
        let h = self.matrix(energy)?;
        let eig = eigensolve_sym(&h, false)?;
        Ok(eig
            .eigenvalues
            .iter()
            .map(|l| (l - energy).abs())
            .fold(f64::INFINITY, f64::min))
    }
}

pub fn fg_residual(params: &ModelParams, energy: f64) -> Result<f64> {
    EffectiveHamiltonian::new(params)?.residual(energy)
}

/// Copy of `params` with the single-spin energies multiplied by `S`.
///
/// The per-spin ground energy of this Hamiltonian converges to the minimum of
/// the classical lower surface as `S` grows.
pub fn extensive_params(params: &ModelParams) -> ModelParams {
    let s = params.spin.value();
    ModelParams {
        omega: params.omega * s,
        delta: params.delta * s,
        ..*params
    }
}

/// Lowest level per spin, `E_min / S`, for each spin of an ascending list.
///
/// The single-spin energies of `template` are scaled extensively (see
/// [`extensive_params`]) so that the sequence approaches the classical
/// minimum.
pub fn ground_energy_per_spin_scan(template: &ModelParams, spins: &[Spin]) -> Result<Vec<(Spin, f64)>> {
    if spins.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("spin list must be strictly ascending".into()));
    }
    spins
        .iter()
        .map(|&spin| {
            let params = extensive_params(&template.with_spin(spin));
            let ground = exact_spectrum(&params)?.ground();
            Ok((spin, ground / spin.value()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic(spin: Spin) -> ModelParams {
        ModelParams {
            omega: 1.0,
            delta: 0.5,
            omega_t: 0.2,
            delta_t: 0.3,
            j_chain: 0.7,
            j_couple: 1.3,
            spin,
        }
    }

    #[test]
    fn trivial_matrices() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let r = eigensolve_sym(&m, true).unwrap();
        assert!((r.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((r.eigenvalues[1] - 1.0).abs() < 1e-15);

        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -2.0, 0.5]));
        let r = eigensolve_sym(&d, false).unwrap();
        assert_eq!(r.eigenvalues, vec![-2.0, 0.5, 3.0]);
        assert!(r.eigenvectors.is_none());
    }

    #[test]
    fn rejects_non_symmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.1, 0.0]);
        assert!(matches!(eigensolve_sym(&m, false), Err(Error::InvalidArgument(_))));
        let m = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(eigensolve_sym(&m, false), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn eigenvectors_orthonormal() {
        let h = build_full(&generic(Spin::new(4.0).unwrap())).unwrap();
        let r = eigensolve_sym(&h, true).unwrap();
        let v = r.eigenvectors.unwrap();
        let gram = v.transpose() * &v;
        let n = gram.nrows();
        assert!((gram - DMatrix::identity(n, n)).amax() < 1e-10);
        assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn decoupled_two_level_system() {
        let p = ModelParams {
            omega: 1.0,
            delta: 0.5,
            omega_t: 0.0,
            delta_t: 0.0,
            j_chain: 0.0,
            j_couple: 0.0,
            spin: Spin::HALF,
        };
        let e = exact_spectrum(&p).unwrap().eigenvalues;
        let half = 0.5 * 1.25f64.sqrt();
        for (got, want) in e.iter().zip([-half, -half, half, half]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_hamiltonian_spectrum() {
        let spin = Spin::new(3.5).unwrap();
        let p = ModelParams {
            omega: 0.8,
            delta: 0.0,
            omega_t: 0.3,
            delta_t: 0.0,
            j_chain: 1.1,
            j_couple: 0.0,
            spin,
        };
        let s = spin.value();
        let mut want: Vec<f64> = spin
            .m_values()
            .flat_map(|m| {
                let chain = p.omega_t * m + p.j_chain * m * m / (2.0 * s);
                [chain + p.omega / 2.0, chain - p.omega / 2.0]
            })
            .collect();
        want.sort_by(f64::total_cmp);
        let got = exact_spectrum(&p).unwrap().eigenvalues;
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn union_of_blocks_when_single_spin_decoupled() {
        let mut p = generic(Spin::new(6.0).unwrap());
        p.delta = 0.0;
        let mut want = eigensolve_sym(&shifted_block(&p, Branch::Plus).unwrap(), false)
            .unwrap()
            .eigenvalues;
        want.extend(
            eigensolve_sym(&shifted_block(&p, Branch::Minus).unwrap(), false)
                .unwrap()
                .eigenvalues,
        );
        want.sort_by(f64::total_cmp);
        let got = exact_spectrum(&p).unwrap().eigenvalues;
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10);
        }
    }

    #[test]
    fn parity_relabelling_leaves_spectrum_invariant() {
        let p = generic(Spin::new(5.5).unwrap());
        let q = ModelParams {
            omega_t: -p.omega_t,
            j_couple: -p.j_couple,
            ..p
        };
        let a = exact_spectrum(&p).unwrap().eigenvalues;
        let b = exact_spectrum(&q).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn fg_residual_vanishes_on_upper_block_when_decoupled() {
        let mut p = generic(Spin::new(3.0).unwrap());
        p.delta = 0.0;
        let eff = EffectiveHamiltonian::new(&p).unwrap();
        let upper = eigensolve_sym(&shifted_block(&p, Branch::Plus).unwrap(), false).unwrap();
        for e in upper.eigenvalues {
            assert!(eff.residual(e).unwrap() < 1e-12);
        }
    }

    #[test]
    fn fg_residual_positive_far_from_spectrum() {
        let p = generic(Spin::new(3.0).unwrap());
        let spec = exact_spectrum(&p).unwrap().eigenvalues;
        let width = spec.last().unwrap() - spec[0];
        let e = spec.last().unwrap() + 10.0 * width;
        assert!(fg_residual(&p, e).unwrap() > 1.0);
    }

    #[test]
    fn fg_residual_at_exact_levels() {
        let p = generic(Spin::new(5.0).unwrap());
        let eff = EffectiveHamiltonian::new(&p).unwrap();
        let spec = exact_spectrum(&p).unwrap().eigenvalues;
        let mut found = 0;
        let mut excluded = 0;
        for &e in &spec {
            match eff.residual(e) {
                Ok(r) => {
                    assert!(r <= 1e-8, "residual {r:e} at E = {e}");
                    found += 1;
                }
                Err(Error::PoleProximity { .. }) => excluded += 1,
                Err(other) => panic!("{other}"),
            }
        }
        assert_eq!(found + excluded, spec.len());
        assert_eq!(excluded, 0);
    }

    #[test]
    fn fg_pole_is_reported() {
        let mut p = generic(Spin::new(2.0).unwrap());
        p.delta = 0.0;
        let eff = EffectiveHamiltonian::new(&p).unwrap();
        let pole = eff.poles()[1];
        match eff.residual(pole) {
            Err(Error::PoleProximity { pole: reported, .. }) => assert_eq!(reported, pole),
            other => panic!("expected pole error, got {other:?}"),
        }
        let loose = EffectiveHamiltonian::with_pole_tolerance(&p, 1e-3).unwrap();
        assert!(loose.residual(pole + 5e-4).is_err());
        assert!(EffectiveHamiltonian::with_pole_tolerance(&p, -1.0).is_err());
    }

    #[test]
    fn per_spin_scan_diagonal_case_is_size_independent() {
        let template = ModelParams {
            omega: 0.6,
            delta: 0.0,
            omega_t: 1.5,
            delta_t: 0.0,
            j_chain: 1.0,
            j_couple: 0.0,
            spin: Spin::HALF,
        };
        let spins: Vec<Spin> = [1.0, 2.5, 5.0, 10.0].iter().map(|&s| Spin::new(s).unwrap()).collect();
        let scan = ground_energy_per_spin_scan(&template, &spins).unwrap();
        let want = -template.omega / 2.0 - template.omega_t + template.j_chain / 2.0;
        for (_, e) in scan {
            assert!((e - want).abs() < 1e-12);
        }
        assert!(ground_energy_per_spin_scan(&template, &[spins[1], spins[0]]).is_err());
    }
}
