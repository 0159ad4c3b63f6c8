use marginal_udp::certifier::{
    assemble_linear_system, build_operator_blocks, certify_with, gamma_from_phases, gamma_pairs, modulus_defect,
    normalized_from_phases, solve_nullspace, triple_defect, CertifyOptions, Verdict,
};
use marginal_udp::families::{default_verification, family_a, family_a_settings, family_b, family_c, phase_grid};
use marginal_udp::linalg::{self, CMatrix, C64};
use marginal_udp::sampling::{haar_state, haar_unitary, RandomSource};
use marginal_udp::search::{survey_row, SearchOptions, SurveyVerdict};
use marginal_udp::states::{all_pairs, parse_config, schmidt_decompose, PureState, SubsystemSet};
use proptest::prelude::*;

fn random_state(seed: u64, d: usize) -> PureState {
    haar_state(&[d; 4], &mut RandomSource::new(seed, 0)).unwrap()
}

fn opts(seed: u64) -> CertifyOptions {
    CertifyOptions { seed, ..CertifyOptions::default() }
}

fn ab_cd(psi: &PureState) -> marginal_udp::states::SchmidtDecomposition {
    schmidt_decompose(psi, &"AB".parse().unwrap(), &"CD".parse().unwrap()).unwrap()
}

#[test]
fn system_shapes() {
    for (d, shape) in [(2, (9, 12)), (3, (64, 72))] {
        let psi = random_state(3, d);
        let blocks = build_operator_blocks(&ab_cd(&psi), &"BD".parse().unwrap()).unwrap();
        assert_eq!(assemble_linear_system(&blocks).shape(), shape);
    }
}

#[test]
fn operator_traces_by_direct_contraction() {
    // Tr O_ij is the full trace of |ii><jj|, summed entry by entry.
    let psi = random_state(4, 2);
    let sd = ab_cd(&psi);
    let blocks = build_operator_blocks(&sd, &"BD".parse().unwrap()).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let tr = blocks.o(i, j).trace();
            let vi = sd.product_vector(i, i);
            let vj = sd.product_vector(j, j);
            let direct: C64 = vi.iter().zip(&vj).map(|(a, b)| a * b.conj()).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((tr - C64::new(expected, 0.0)).norm() < 1e-12);
            assert!((direct - C64::new(expected, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn q_blocks_trace_and_adjoint() {
    for seed in 0..100 {
        let psi = random_state(seed, 2);
        let blocks = build_operator_blocks(&ab_cd(&psi), &"BD".parse().unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = C64::new(if i == j { 1.0 } else { 0.0 }, 0.0);
                assert!((blocks.q(i, j).trace() - expected).norm() <= 1e-10);
                assert!((blocks.r(i, j).trace() - expected).norm() <= 1e-10);
                assert!(linalg::max_abs(&(blocks.q(i, j).adjoint() - blocks.q(j, i))) <= 1e-10);
                assert!(linalg::max_abs(&(blocks.r(i, j).adjoint() - blocks.r(j, i))) <= 1e-10);
            }
        }
    }
}

#[test]
fn generic_kernel_has_d_squared_minus_one_dimensions() {
    for (d, dim) in [(2, 3), (3, 8)] {
        let psi = random_state(11, d);
        let blocks = build_operator_blocks(&ab_cd(&psi), &"BD".parse().unwrap()).unwrap();
        let kernel = solve_nullspace(&assemble_linear_system(&blocks), 1e-8);
        assert_eq!(kernel.dim(), dim);
        if d == 2 {
            assert_eq!(blocks.span_dim(1e-8), 13);
        }
    }
}

#[test]
fn families_are_never_certified_unique() {
    let pairs = all_pairs(&marginal_udp::states::default_labels(4));
    let config = vec![pairs[0].clone(), pairs[5].clone(), pairs[4].clone()];
    let mut members = Vec::new();
    for (a, b, s) in family_a_settings() {
        members.push(family_a(a, b, s, 0.7).unwrap());
    }
    members.push(family_b(0.4));
    members.push(family_c(0.0, C64::new(0.8, 0.0), C64::new(0.6, 0.0), 0.3, 0.3).unwrap().psi);
    for m in &members {
        let v = certify_with(m, &config, &opts(1)).unwrap().verdict;
        assert!(matches!(v, Verdict::NonuniqueWitness | Verdict::NotGeneric), "{v}");
    }
}

#[test]
fn family_a_phi_zero_and_pi_fidelity() {
    // |<φ=0|φ=π>| = |a² + b² - |s|²| / (a² + b² + |s|²).
    for (a, b, s) in family_a_settings() {
        let n2 = a * a + b * b + s.norm_sqr();
        let expected = (a * a + b * b - s.norm_sqr()).abs() / n2;
        let f = marginal_udp::states::fidelity(&family_a(a, b, s, 0.0).unwrap(), &family_a(a, b, s, std::f64::consts::PI).unwrap()).unwrap();
        assert!((f - expected).abs() < 1e-12);
        assert!(f < 1.0);
    }
}

#[test]
fn family_b_quarter_turn_fidelity() {
    // <φ=0|φ=π/2> = 1/4 + (1/2) e^{iπ/2} + (1/4) e^{iπ}.
    let overlap = C64::new(0.25, 0.0) + C64::new(0.5, 0.0) * C64::from_polar(1.0, std::f64::consts::FRAC_PI_2)
        + C64::new(0.25, 0.0) * C64::from_polar(1.0, std::f64::consts::PI);
    let f = marginal_udp::states::fidelity(&family_b(0.0), &family_b(std::f64::consts::FRAC_PI_2)).unwrap();
    assert!((f - overlap.norm()).abs() < 1e-12);
    assert!(f < 1.0 - 1e-6);
}

#[test]
fn infeasible_family_c_marginals_differ() {
    let mut rng = RandomSource::new(9, 0);
    let pairs = all_pairs(&marginal_udp::states::default_labels(4));
    for _ in 0..10 {
        use rand::Rng;
        let (pr, ps): (f64, f64) = (rng.random_range(0.3..3.0), rng.random_range(0.3..3.0));
        let pair = family_c(0.4, C64::new(0.6, 0.1), C64::new(0.5, -0.2), pr, ps).unwrap();
        assert!(!pair.feasible);
        let m1 = marginal_udp::states::marginal_set(&pair.psi, &pairs).unwrap();
        let m2 = marginal_udp::states::marginal_set(&pair.phi_state, &pairs).unwrap();
        assert!(marginal_udp::states::marginal_distance(&m1, &m2).unwrap() > 1e-6);
    }
}

#[test]
fn default_verification_rows_share_marginals() {
    for row in default_verification(20).unwrap() {
        assert!(row.max_deviation <= 1e-10, "{row:?}");
    }
    assert_eq!(phase_grid(20).len(), 20);
}

#[test]
fn survey_agrees_with_certify_on_shared_seeds() {
    let config = parse_config("AB,CD,BD").unwrap();
    for seed in 100..105 {
        let cert = certify_with(&random_state(seed, 2), &config, &opts(seed)).unwrap();
        let row = survey_row(&config, seed, 10, &SearchOptions::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::Unique);
        assert_eq!(row.verdict, SurveyVerdict::NoDistinctFound);
    }
}

fn local_unitaries(seed: u64, d: usize) -> Vec<CMatrix> {
    let mut rng = RandomSource::new(seed, 5);
    (0..4).map(|_| haar_unitary(d, &mut rng).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn phase_identities_hold(phases in prop::collection::vec(-10.0f64..10.0, 2..7)) {
        let n = phases.len();
        // Independent evaluation of c_ij = 1 - e^{i(φ_i - φ_j)}.
        let c = |i: usize, j: usize| C64::new(1.0, 0.0) - C64::from_polar(1.0, phases[i] - phases[j]);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((c(i, j).norm_sqr() - c(i, j) - c(i, j).conj()).norm() <= 1e-12);
                for k in 0..n {
                    prop_assert!((c(i, j) * c(j, k) - c(i, j) - c(j, k) + c(i, k)).norm() <= 1e-12);
                }
            }
        }
        let lib = normalized_from_phases(&phases);
        prop_assert!(triple_defect(&lib, n) <= 1e-12);
        prop_assert!(modulus_defect(&lib) <= 1e-12);
        for (p, &(i, j)) in gamma_pairs(n).iter().enumerate() {
            prop_assert!((lib[p] - c(i, j)).norm() <= 1e-12);
        }
    }

    #[test]
    fn gamma_vanishes_exactly_for_equal_phases(common in -10.0f64..10.0, shifts in prop::collection::vec(0.01f64..6.27, 3)) {
        let lambdas = [0.4, 0.3, 0.2, 0.1];
        let equal = [common; 4];
        let g = gamma_from_phases(&lambdas, &equal);
        prop_assert!(g.iter().all(|z| z.norm() < 1e-15));
        // Two-pi multiples count as equal.
        let wrapped = [common, common + std::f64::consts::TAU, common - 2.0 * std::f64::consts::TAU, common];
        prop_assert!(gamma_from_phases(&lambdas, &wrapped).iter().all(|z| z.norm() < 1e-12));
        let mut distinct = [common; 4];
        distinct[1] += shifts[0];
        distinct[2] += shifts[1];
        distinct[3] += shifts[2];
        prop_assert!(gamma_from_phases(&lambdas, &distinct).iter().any(|z| z.norm() > 1e-4));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn verdict_invariant_under_relabeling(seed in 0u64..1000, perm_idx in 0usize..24) {
        let psi = random_state(seed, 2);
        let config = parse_config("AB,CD,BD").unwrap();
        let base = certify_with(&psi, &config, &opts(seed)).unwrap().verdict;
        let mut perm: Vec<usize> = (0..4).collect();
        let mut k = perm_idx;
        for i in (1..4).rev() {
            perm.swap(i, k % (i + 1));
            k /= i + 1;
        }
        let names = ["A", "B", "C", "D"];
        let new_labels: Vec<String> = perm.iter().map(|&p| names[p].to_string()).collect();
        let relabeled = psi.relabeled(new_labels.clone()).unwrap();
        let map = |s: &SubsystemSet| {
            SubsystemSet::new(s.labels().iter().map(|l| new_labels[names.iter().position(|n| n == l).unwrap()].clone())).unwrap()
        };
        let new_config: Vec<SubsystemSet> = config.iter().map(map).collect();
        prop_assert_eq!(certify_with(&relabeled, &new_config, &opts(seed)).unwrap().verdict, base);
    }

    #[test]
    fn verdict_invariant_under_local_unitaries(seed in 0u64..1000) {
        let psi = random_state(seed, 2);
        let config = parse_config("AB,CD,BD").unwrap();
        let base = certify_with(&psi, &config, &opts(seed)).unwrap().verdict;
        let us = local_unitaries(seed, 2);
        let ops: Vec<(&str, &CMatrix)> = ["A", "B", "C", "D"].into_iter().zip(us.iter()).collect();
        let rotated = psi.apply_local_unitaries(&ops).unwrap();
        prop_assert_eq!(certify_with(&rotated, &config, &opts(seed)).unwrap().verdict, base);
    }
}
