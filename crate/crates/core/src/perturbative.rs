//! Strong spin–chain coupling: second-order chain levels in the transverse
//! chain field and the resulting single-spin level pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{sx_element, Branch, ModelParams, Spin};

/// Relative gap below which two unperturbed levels count as degenerate.
pub const DEFAULT_DEGENERACY_TOLERANCE: f64 = 1e-8;

/// Eigenvalue `sigma` of `S_z`, stored as `sigma + S` (a non-negative integer).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SigmaIndex {
    spin: Spin,
    offset: u32,
}

impl SigmaIndex {
    pub fn new(spin: Spin, sigma: f64) -> Result<Self> {
        let offset = sigma + spin.value();
        if !offset.is_finite() || offset.fract() != 0.0 || offset < 0.0 || offset > spin.twice() as f64 {
            return Err(Error::InvalidArgument(format!(
                "sigma = {sigma} is not an S_z eigenvalue for S = {spin}"
            )));
        }
        Ok(SigmaIndex {
            spin,
            offset: offset as u32,
        })
    }

    /// All `2S + 1` values, ascending.
    pub fn all(spin: Spin) -> impl Iterator<Item = SigmaIndex> {
        (0..=spin.twice()).map(move |offset| SigmaIndex { spin, offset })
    }

    pub fn spin(self) -> Spin {
        self.spin
    }

    pub fn value(self) -> f64 {
        self.offset as f64 - self.spin.value()
    }

    /// Position in the ascending `|S, m>` basis.
    pub fn basis_index(self) -> usize {
        self.offset as usize
    }

    fn neighbours(self) -> impl Iterator<Item = SigmaIndex> {
        let below = self.offset.checked_sub(1);
        let above = (self.offset < self.spin.twice()).then_some(self.offset + 1);
        below
            .into_iter()
            .chain(above)
            .map(move |offset| SigmaIndex { spin: self.spin, offset })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeLevel {
    pub sigma: SigmaIndex,
    /// Chain level of the upper block to second order.
    pub e_plus: f64,
    /// Chain level of the lower block to second order.
    pub e_minus: f64,
    pub upper: f64,
    pub lower: f64,
}

fn check_sigma(params: &ModelParams, sigma: SigmaIndex) -> Result<()> {
    if sigma.spin() != params.spin {
        return Err(Error::InvalidArgument(format!(
            "sigma belongs to S = {}, params have S = {}",
            sigma.spin(),
            params.spin
        )));
    }
    Ok(())
}

/// `(omega_t ± j_couple/2) sigma + j_chain sigma^2 / (2S)`.
pub fn zeroth_energy(params: &ModelParams, sigma: SigmaIndex, branch: Branch) -> f64 {
    let s = params.spin.value();
    let m = sigma.value();
    params.field(branch) * m + params.j_chain / (2.0 * s) * m * m
}

pub fn second_order_shift(params: &ModelParams, sigma: SigmaIndex, branch: Branch) -> Result<f64> {
    second_order_shift_with(params, sigma, branch, DEFAULT_DEGENERACY_TOLERANCE)
}

/// Second-order shift from `delta_t S_x`, which couples `sigma` only to
/// `sigma ± 1`.
///
/// `tolerance` is relative to the largest unperturbed level magnitude of the
/// branch.
pub fn second_order_shift_with(
    params: &ModelParams,
    sigma: SigmaIndex,
    branch: Branch,
    tolerance: f64,
) -> Result<f64> {
    params.validate()?;
    check_sigma(params, sigma)?;
    if params.delta_t == 0.0 {
        return Ok(0.0);
    }
    let scale = SigmaIndex::all(params.spin)
        .map(|t| zeroth_energy(params, t, branch).abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let e0 = zeroth_energy(params, sigma, branch);
    let mut shift = 0.0;
    for other in sigma.neighbours() {
        let gap = e0 - zeroth_energy(params, other, branch);
        if gap.abs() <= tolerance * scale {
            return Err(Error::PerturbationBreakdown {
                sigma: sigma.value(),
                sigma_prime: other.value(),
                gap,
            });
        }
        let m = sigma.value().min(other.value());
        let element = params.delta_t * sx_element(params.spin, m);
        shift += element * element / gap;
    }
    Ok(shift)
}

/// Chain level `e_0 + c` of one branch.
pub fn chain_level(params: &ModelParams, sigma: SigmaIndex, branch: Branch) -> Result<f64> {
    Ok(zeroth_energy(params, sigma, branch) + second_order_shift(params, sigma, branch)?)
}

/// Roots of the secular equation for the level pair labelled by `sigma`.
pub fn total_levels(params: &ModelParams, sigma: SigmaIndex) -> Result<PerturbativeLevel> {
    let e_plus = chain_level(params, sigma, Branch::Plus)?;
    let e_minus = chain_level(params, sigma, Branch::Minus)?;
    let mean = 0.5 * (e_plus + e_minus);
    let split = 0.5 * (params.omega + e_plus - e_minus).hypot(params.delta);
    Ok(PerturbativeLevel {
        sigma,
        e_plus,
        e_minus,
        upper: mean + split,
        lower: mean - split,
    })
}

/// Eigenvalues `(lower, upper)` of the single-spin matrix
/// `[[omega/2 + e_plus, delta/2], [delta/2, -omega/2 + e_minus]]`.
///
/// Computed from trace and determinant, independently of [`total_levels`].
pub fn born_oppenheimer_levels(params: &ModelParams, sigma: SigmaIndex) -> Result<(f64, f64)> {
    let e_plus = chain_level(params, sigma, Branch::Plus)?;
    let e_minus = chain_level(params, sigma, Branch::Minus)?;
    let a = 0.5 * params.omega + e_plus;
    let d = -0.5 * params.omega + e_minus;
    let b = 0.5 * params.delta;
    let half_trace = 0.5 * (a + d);
    let det = a * d - b * b;
    let disc = (half_trace * half_trace - det).max(0.0).sqrt();
    Ok((half_trace - disc, half_trace + disc))
}

/// All `2S + 1` level pairs.
pub fn perturbative_spectrum(params: &ModelParams) -> Result<Vec<PerturbativeLevel>> {
    SigmaIndex::all(params.spin)
        .map(|sigma| total_levels(params, sigma))
        .collect()
}

/// All perturbative energies (both members of every pair), ascending.
pub fn sorted_energies(levels: &[PerturbativeLevel]) -> Vec<f64> {
    let mut all: Vec<f64> = levels.iter().flat_map(|l| [l.lower, l.upper]).collect();
    all.sort_by(f64::total_cmp);
    all
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedLevel {
    pub rank: usize,
    pub exact: f64,
    pub perturbative: f64,
    pub residual: f64,
}

/// Pairs two spectra by rank after sorting both ascending.
pub fn match_levels(exact: &[f64], perturbative: &[f64]) -> Result<Vec<MatchedLevel>> {
    if exact.len() != perturbative.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot match {} exact levels against {} perturbative levels",
            exact.len(),
            perturbative.len()
        )));
    }
    let mut a = exact.to_vec();
    let mut b = perturbative.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(a.into_iter()
        .zip(b)
        .enumerate()
        .map(|(rank, (exact, perturbative))| MatchedLevel {
            rank,
            exact,
            perturbative,
            residual: (exact - perturbative).abs(),
        })
        .collect())
}

pub fn max_residual(matched: &[MatchedLevel]) -> f64 {
    matched.iter().map(|m| m.residual).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{eigensolve_sym, exact_spectrum};
    use crate::spin::build_lmg;
    use proptest::prelude::*;

    fn strong(spin: f64, delta_t: f64) -> ModelParams {
        ModelParams {
            omega: 1.0,
            delta: 0.5,
            omega_t: 0.2,
            delta_t,
            j_chain: 1.0,
            j_couple: 3.0,
            spin: Spin::new(spin).unwrap(),
        }
    }

    fn sigma(p: &ModelParams, v: f64) -> SigmaIndex {
        SigmaIndex::new(p.spin, v).unwrap()
    }

    #[test]
    fn sigma_index_validation() {
        let s = Spin::new(1.5).unwrap();
        assert!(SigmaIndex::new(s, -1.5).is_ok());
        assert!(SigmaIndex::new(s, 0.5).is_ok());
        assert!(SigmaIndex::new(s, 0.0).is_err());
        assert!(SigmaIndex::new(s, 2.5).is_err());
        assert_eq!(SigmaIndex::all(s).count(), 4);
        assert_eq!(SigmaIndex::new(s, -1.5).unwrap().basis_index(), 0);
    }

    #[test]
    fn zeroth_examples() {
        let p = strong(4.0, 0.05);
        assert_eq!(zeroth_energy(&p, sigma(&p, 0.0), Branch::Plus), 0.0);

        let mut p = strong(5.0, 0.0);
        p.j_couple = 2.0;
        assert!((zeroth_energy(&p, sigma(&p, -5.0), Branch::Plus) + 3.5).abs() < 1e-14);

        p.j_couple = 0.0;
        for t in SigmaIndex::all(p.spin) {
            assert_eq!(zeroth_energy(&p, t, Branch::Plus), zeroth_energy(&p, t, Branch::Minus));
        }
    }

    #[test]
    fn shift_vanishes_without_transverse_field() {
        let p = strong(3.0, 0.0);
        for t in SigmaIndex::all(p.spin) {
            assert_eq!(second_order_shift(&p, t, Branch::Minus).unwrap(), 0.0);
        }
    }

    #[test]
    fn shift_at_top_of_ladder_has_one_term() {
        let p = strong(3.0, 0.05);
        let top = sigma(&p, 3.0);
        let below = sigma(&p, 2.0);
        let el = p.delta_t * sx_element(p.spin, 2.0);
        let want = el * el / (zeroth_energy(&p, top, Branch::Plus) - zeroth_energy(&p, below, Branch::Plus));
        let got = second_order_shift(&p, top, Branch::Plus).unwrap();
        assert!((got - want).abs() < 1e-16);
    }

    #[test]
    fn shift_matches_single_block_diagonalization() {
        // exact LMG block levels are the oracle; in the strong field they stay
        // ordered like sigma, so sorted lists pair up level by level
        let block_error = |delta_t: f64, branch: Branch| {
            let p = strong(10.0, delta_t);
            let exact = eigensolve_sym(&build_lmg(&p, branch).unwrap(), false).unwrap();
            let mut pairs: Vec<(f64, f64)> = SigmaIndex::all(p.spin)
                .map(|t| (zeroth_energy(&p, t, branch), second_order_shift(&p, t, branch).unwrap()))
                .collect();
            pairs.sort_by(|a, b| (a.0 + a.1).total_cmp(&(b.0 + b.1)));
            let mut worst: f64 = 0.0;
            for ((e0, shift), exact) in pairs.iter().zip(&exact.eigenvalues) {
                let err = (exact - e0 - shift).abs();
                if *shift != 0.0 {
                    assert!(err < 0.1 * shift.abs(), "shift {shift:e}, err {err:e}");
                }
                worst = worst.max(err);
            }
            worst
        };
        for branch in [Branch::Plus, Branch::Minus] {
            let ratio = block_error(0.025, branch) / block_error(0.05, branch);
            assert!(ratio > 1.0 / 32.0 && ratio < 1.0 / 8.0, "{branch:?}: ratio {ratio}");
        }
    }

    #[test]
    fn degeneracy_is_reported() {
        // omega_t + j_couple/2 = 0 and j_chain = 0 make the plus branch flat
        let p = ModelParams {
            omega: 1.0,
            delta: 0.5,
            omega_t: -1.0,
            delta_t: 0.1,
            j_chain: 0.0,
            j_couple: 2.0,
            spin: Spin::new(2.0).unwrap(),
        };
        match second_order_shift(&p, sigma(&p, 0.0), Branch::Plus) {
            Err(Error::PerturbationBreakdown { sigma, .. }) => assert_eq!(sigma, 0.0),
            other => panic!("expected breakdown, got {other:?}"),
        }
        assert!(second_order_shift(&p, sigma(&p, 0.0), Branch::Minus).is_ok());
        assert!(total_levels(&p, sigma(&p, 1.0)).is_err());
    }

    #[test]
    fn sigma_from_other_spin_rejected() {
        let p = strong(3.0, 0.1);
        let foreign = SigmaIndex::new(Spin::new(4.0).unwrap(), 4.0).unwrap();
        assert!(second_order_shift(&p, foreign, Branch::Plus).is_err());
    }

    #[test]
    fn decoupled_single_spin_collapses_root() {
        let mut p = strong(4.0, 0.07);
        p.delta = 0.0;
        let mut checked = 0;
        for t in SigmaIndex::all(p.spin) {
            let l = total_levels(&p, t).unwrap();
            let (up, down) = (p.omega / 2.0 + l.e_plus, -p.omega / 2.0 + l.e_minus);
            if p.omega + l.e_plus - l.e_minus > 0.0 {
                assert!((l.upper - up).abs() < 1e-12);
                assert!((l.lower - down).abs() < 1e-12);
                checked += 1;
            } else {
                assert!((l.upper - down).abs() < 1e-12);
                assert!((l.lower - up).abs() < 1e-12);
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn branch_independent_chain_energy() {
        let mut p = strong(4.0, 0.0);
        p.j_couple = 0.0;
        let half = 0.5 * p.omega.hypot(p.delta);
        for t in SigmaIndex::all(p.spin) {
            let l = total_levels(&p, t).unwrap();
            let e0 = zeroth_energy(&p, t, Branch::Plus);
            assert!((l.upper - (e0 + half)).abs() < 1e-13);
            assert!((l.lower - (e0 - half)).abs() < 1e-13);
        }
    }

    #[test]
    fn born_oppenheimer_special_cases() {
        let mut p = strong(2.0, 0.1);
        p.omega = 0.0;
        p.delta = 0.0;
        for t in SigmaIndex::all(p.spin) {
            let l = total_levels(&p, t).unwrap();
            let (lo, hi) = born_oppenheimer_levels(&p, t).unwrap();
            assert!((lo - l.e_plus.min(l.e_minus)).abs() < 1e-13);
            assert!((hi - l.e_plus.max(l.e_minus)).abs() < 1e-13);
        }
    }

    #[test]
    fn fourth_order_scaling_without_single_spin_tunnelling() {
        // with delta = 0 the blocks decouple and the only error is the
        // fourth-order chain term
        let residual = |delta_t: f64| {
            let mut p = strong(10.0, delta_t);
            p.delta = 0.0;
            let exact = exact_spectrum(&p).unwrap().eigenvalues;
            let pert = sorted_energies(&perturbative_spectrum(&p).unwrap());
            max_residual(&match_levels(&exact, &pert).unwrap())
        };
        let ratio = residual(0.05) / residual(0.1);
        assert!(ratio > 1.0 / 32.0 && ratio < 1.0 / 8.0, "ratio {ratio}");
        let ratio = residual(0.025) / residual(0.05);
        assert!(ratio > 1.0 / 32.0 && ratio < 1.0 / 8.0, "ratio {ratio}");
    }

    #[test]
    fn ground_level_tracks_exact_ground_state() {
        let p = strong(10.0, 0.05);
        let exact = exact_spectrum(&p).unwrap().ground();
        let pert = sorted_energies(&perturbative_spectrum(&p).unwrap())[0];
        assert!((exact - pert).abs() < 1e-3, "{exact} vs {pert}");
    }

    #[test]
    fn match_levels_length_mismatch() {
        assert!(match_levels(&[1.0, 2.0], &[1.0]).is_err());
        let m = match_levels(&[2.0, 1.0], &[1.5, 0.0]).unwrap();
        assert_eq!(m[0].residual, 1.0);
        assert_eq!(m[1].residual, 0.5);
    }

    #[test]
    fn monotone_ladder_without_chain_coupling() {
        let mut p = strong(6.0, 0.0);
        p.j_chain = 0.0;
        p.j_couple = 0.3; // both fields share the sign of omega_t
        let lower: Vec<f64> = SigmaIndex::all(p.spin)
            .map(|t| total_levels(&p, t).unwrap().lower)
            .collect();
        assert!(lower.windows(2).all(|w| w[0] < w[1]));
    }

    fn arb_params() -> impl Strategy<Value = ModelParams> {
        (
            -2.0..2.0f64,
            -2.0..2.0f64,
            -1.0..1.0f64,
            0.0..0.1f64,
            -1.0..1.0f64,
            2.0..5.0f64,
            1u32..30,
        )
            .prop_map(|(omega, delta, omega_t, delta_t, j_chain, j_couple, twice)| ModelParams {
                omega,
                delta,
                omega_t,
                delta_t,
                j_chain,
                j_couple,
                spin: Spin::from_twice(twice).unwrap(),
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn born_oppenheimer_agrees_with_secular_roots(p in arb_params(), pick in 0.0..1.0f64) {
            let t = SigmaIndex::all(p.spin).nth((pick * p.spin.dim() as f64) as usize % p.spin.dim()).unwrap();
            if let Ok(level) = total_levels(&p, t) {
                let (lo, hi) = born_oppenheimer_levels(&p, t).unwrap();
                let scale = 1.0 + level.e_plus.abs() + level.e_minus.abs() + p.omega.abs() + p.delta.abs();
                prop_assert!((lo - level.lower).abs() <= 1e-12 * scale);
                prop_assert!((hi - level.upper).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn sum_rule_and_ordering(p in arb_params()) {
            if let Ok(levels) = perturbative_spectrum(&p) {
                for l in levels {
                    let scale = 1.0 + l.e_plus.abs() + l.e_minus.abs();
                    prop_assert!((l.upper + l.lower - l.e_plus - l.e_minus).abs() <= 1e-13 * scale);
                    prop_assert!(l.upper >= l.lower);
                    if p.delta != 0.0 {
                        prop_assert!(l.upper > l.lower);
                    }
                }
            }
        }
    }
}
