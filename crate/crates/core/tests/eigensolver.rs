use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinlab_core::spectrum::eigensolve_sym;

/// Number of eigenvalues of `a` below `x`, from the signs of the pivots of
/// `a - x I` (Sylvester's law of inertia).
fn count_below(a: &DMatrix<f64>, x: f64) -> usize {
    let n = a.nrows();
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] -= x;
    }
    let mut negatives = 0;
    for k in 0..n {
        let mut pivot = m[(k, k)];
        if pivot == 0.0 {
            pivot = -1e-300;
        }
        if pivot < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let f = m[(i, k)] / pivot;
            for j in k + 1..n {
                m[(i, j)] -= f * m[(k, j)];
            }
        }
    }
    negatives
}

fn bisection_spectrum(a: &DMatrix<f64>) -> Vec<f64> {
    let bound = a.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max) + 1.0;
    (0..a.nrows())
        .map(|k| {
            let (mut lo, mut hi) = (-bound, bound);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(a, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

#[test]
fn matches_inertia_bisection_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..20 {
        let mut a = DMatrix::<f64>::zeros(10, 10);
        for i in 0..10 {
            for j in 0..=i {
                let v = rng.gen_range(-1.0..1.0);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let got = eigensolve_sym(&a, true).unwrap();
        let oracle = bisection_spectrum(&a);
        for (g, o) in got.eigenvalues.iter().zip(&oracle) {
            assert!((g - o).abs() < 1e-8, "{g} vs {o}");
        }
        let v = got.eigenvectors.unwrap();
        assert!((v.transpose() * &v - DMatrix::identity(10, 10)).amax() < 1e-12);
    }
}
