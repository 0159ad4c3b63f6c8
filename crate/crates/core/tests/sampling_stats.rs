use marginal_udp::linalg::{self, C64};
use marginal_udp::sampling::{generic_schmidt_state, genericity_check, haar_state, haar_unitary, RandomSource};
use marginal_udp::states::{PureState, SubsystemSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const DRAWS: usize = 10_000;

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Purity of the first-two-qubit marginal of a 16-amplitude vector, by
/// explicit index loops.
fn purity_ab(psi: &[C64]) -> f64 {
    let mut total = 0.0;
    for x in 0..4 {
        for y in 0..4 {
            let mut rho = linalg::ZERO;
            for e in 0..4 {
                rho += psi[4 * x + e] * psi[4 * y + e].conj();
            }
            total += rho.norm_sqr();
        }
    }
    total
}

/// Independent sampler: normalized vector of complex Gaussians.
fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

#[test]
fn haar_unitary_entry_has_mean_one_over_dim() {
    let mut rng = RandomSource::new(21, 0);
    let xs: Vec<f64> = (0..DRAWS).map(|_| haar_unitary(4, &mut rng).unwrap()[(0, 0)].norm_sqr()).collect();
    let (m, se) = mean_and_se(&xs);
    assert!((m - 0.25).abs() <= 3.0 * se, "mean {m} se {se}");
}

#[test]
fn haar_unitary_is_unitary() {
    let mut rng = RandomSource::new(22, 0);
    for dim in [1, 2, 5, 16] {
        let u = haar_unitary(dim, &mut rng).unwrap();
        assert!(linalg::unitarity_defect(&u) < 1e-12);
    }
}

#[test]
fn marginal_purity_matches_gaussian_oracle() {
    let mut rng = RandomSource::new(23, 0);
    let lib: Vec<f64> = (0..DRAWS).map(|_| purity_ab(haar_state(&[2; 4], &mut rng).unwrap().amplitudes())).collect();
    let mut orng = ChaCha8Rng::seed_from_u64(23);
    let oracle: Vec<f64> = (0..DRAWS).map(|_| purity_ab(&gaussian_vector(&mut orng, 16))).collect();
    let ((m1, s1), (m2, s2)) = (mean_and_se(&lib), mean_and_se(&oracle));
    assert!((m1 - m2).abs() <= 3.0 * (s1 * s1 + s2 * s2).sqrt(), "{m1} vs {m2}");
}

#[test]
fn fixed_unitary_preserves_statistics() {
    let fixed = haar_unitary(16, &mut RandomSource::new(99, 0)).unwrap();
    let mut r1 = RandomSource::new(24, 0);
    let mut r2 = RandomSource::new(25, 0);
    let rotated: Vec<f64> = (0..DRAWS)
        .map(|_| {
            let psi = haar_state(&[2; 4], &mut r1).unwrap();
            let v = &fixed * nalgebra::DVector::from_column_slice(psi.amplitudes());
            purity_ab(v.as_slice())
        })
        .collect();
    let plain: Vec<f64> = (0..DRAWS).map(|_| purity_ab(haar_state(&[2; 4], &mut r2).unwrap().amplitudes())).collect();
    let ((m1, s1), (m2, s2)) = (mean_and_se(&rotated), mean_and_se(&plain));
    let z = (m1 - m2) / (s1 * s1 + s2 * s2).sqrt();
    // Two-sided test at significance 0.01.
    assert!(z.abs() < 2.576, "z = {z}");
}

#[test]
fn generic_draws_are_generic() {
    let mut rng = RandomSource::new(26, 0);
    let generic = (0..1000).filter(|_| genericity_check(&generic_schmidt_state(2, &mut rng).unwrap().1, 1e-6).is_generic).count();
    assert!(generic >= 999, "{generic}/1000");
}

#[test]
fn schmidt_bases_are_orthonormal_and_uncorrelated() {
    let mut rng = RandomSource::new(27, 0);
    let mut left = Vec::new();
    let mut right = Vec::new();
    for _ in 0..2000 {
        let (psi, sd) = generic_schmidt_state(2, &mut rng).unwrap();
        assert!(linalg::unitarity_defect(sd.left_basis()) < 1e-12);
        assert!(linalg::unitarity_defect(sd.right_basis()) < 1e-12);
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        left.push(sd.left_basis()[(0, 0)].norm_sqr());
        right.push(sd.right_basis()[(0, 0)].norm_sqr());
    }
    let (ml, _) = mean_and_se(&left);
    let (mr, _) = mean_and_se(&right);
    let cov: f64 = left.iter().zip(&right).map(|(a, b)| (a - ml) * (b - mr)).sum::<f64>() / left.len() as f64;
    let sl = (left.iter().map(|a| (a - ml).powi(2)).sum::<f64>() / left.len() as f64).sqrt();
    let sr = (right.iter().map(|b| (b - mr).powi(2)).sum::<f64>() / right.len() as f64).sqrt();
    let corr = cov / (sl * sr);
    assert!(corr.abs() < 3.0 / (left.len() as f64).sqrt(), "corr {corr}");
}

#[test]
fn split_marginal_spectrum_matches_schmidt_coefficients() {
    let mut rng = RandomSource::new(28, 0);
    let (psi, sd) = generic_schmidt_state(3, &mut rng).unwrap();
    let ev = psi.partial_trace(&SubsystemSet::parse("AB").unwrap()).unwrap().eigenvalues();
    for (a, b) in ev.iter().zip(sd.coefficients()) {
        assert!((a - b).abs() < 1e-12);
    }
    let again: PureState = generic_schmidt_state(3, &mut RandomSource::new(28, 0)).unwrap().0;
    assert_eq!(again, psi);
}
