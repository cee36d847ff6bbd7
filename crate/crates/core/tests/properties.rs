//! Property tests over random inputs.

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use fiberent::channels::{apply_channel, r_correlated, r_uncorrelated, NetworkConfig, SpectralModel};
use fiberent::metrics::{closed_form_report, evaluate, pair_concurrences_closed_form, witness_closed_form};
use fiberent::qlinalg::{eigvals_general, eigvals_hermitian, kron, partial_trace, ComplexMatrix, DensityMatrix, PSD_TOL};
use fiberent::states::{witness_spec, PureState, StateKind};

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
        let data = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        ComplexMatrix::from_vec(n, n, data).unwrap()
    })
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n).prop_map(|m| (&m + &m.adjoint()).scale(Complex64::new(0.5, 0.0)))
}

/// Random mixed state `A A† / tr(A A†)`.
fn density(n_qubits: usize) -> impl Strategy<Value = DensityMatrix> {
    matrix(1 << n_qubits).prop_map(move |a| {
        let m = a.matmul(&a.adjoint()).unwrap();
        DensityMatrix::normalized(n_qubits, m).unwrap()
    })
}

fn kind() -> impl Strategy<Value = StateKind> {
    prop_oneof![Just(StateKind::Ghz), Just(StateKind::W)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(a in matrix(2), b in matrix(2), c in matrix(2)) {
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn partial_trace_of_product(a in density(1), b in density(2)) {
        let ab = DensityMatrix::new(3, kron(a.matrix(), b.matrix())).unwrap();
        prop_assert!(partial_trace(&ab, &[0]).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-13);
        prop_assert!(partial_trace(&ab, &[1, 2]).unwrap().matrix().max_abs_diff(b.matrix()) < 1e-13);
    }

    #[test]
    fn partial_traces_compose(rho in density(3)) {
        // tracing out qubit 2 then qubit 1 equals keeping qubit 0 directly
        let step = partial_trace(&partial_trace(&rho, &[0, 1]).unwrap(), &[0]).unwrap();
        let direct = partial_trace(&rho, &[0]).unwrap();
        prop_assert!(step.matrix().max_abs_diff(direct.matrix()) < 1e-14);
    }

    #[test]
    fn hermitian_eigenvalues_sum_to_trace(m in hermitian(6)) {
        let ev = eigvals_hermitian(&m).unwrap();
        let sum: f64 = ev.iter().sum();
        prop_assert!((sum - m.trace().re).abs() < 1e-12);
        prop_assert!(ev.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn general_solver_agrees_on_hermitian(m in hermitian(4)) {
        let h = eigvals_hermitian(&m).unwrap();
        let g = eigvals_general(&m).unwrap();
        for (x, z) in h.iter().zip(&g) {
            prop_assert!((x - z.re).abs() < 1e-9 && z.im.abs() < 1e-9, "{h:?} vs {g:?}");
        }
    }

    #[test]
    fn general_eigenvalues_match_trace_and_det_2x2(m in matrix(2)) {
        let ev = eigvals_general(&m).unwrap();
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        prop_assert!((ev[0] + ev[1] - m.trace()).norm() < 1e-12);
        prop_assert!((ev[0] * ev[1] - det).norm() < 1e-12);
    }

    #[test]
    fn correlated_r_ignores_common_delay(
        taus in prop::collection::vec(-2.0..2.0f64, 4),
        bw in prop::collection::vec(0.2..2.0f64, 4),
        shift in -3.0..3.0f64,
    ) {
        let shifted: Vec<f64> = taus.iter().map(|t| t + shift).collect();
        let a = r_correlated(&taus, &bw).unwrap();
        let b = r_correlated(&shifted, &bw).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!(a > 0.0 && a <= 1.0);
    }

    #[test]
    fn uncorrelated_r_is_even_and_decreasing(
        taus in prop::collection::vec(-2.0..2.0f64, 3),
        bw in prop::collection::vec(0.2..2.0f64, 3),
        i in 0usize..3,
        grow in 1.0..2.0f64,
    ) {
        let r = r_uncorrelated(&taus, &bw).unwrap();
        let mut flipped = taus.clone();
        flipped[i] = -flipped[i];
        prop_assert!((r - r_uncorrelated(&flipped, &bw).unwrap()).abs() < 1e-15);
        let mut longer = taus.clone();
        longer[i] *= grow;
        prop_assert!(r_uncorrelated(&longer, &bw).unwrap() <= r + 1e-15);
    }

    #[test]
    fn outputs_are_density_matrices(
        kind in kind(),
        pmd in any::<bool>(),
        correlated in any::<bool>(),
        params in prop::collection::vec(0.0..3.0f64, 3),
        signs in prop::collection::vec(any::<bool>(), 3),
    ) {
        let cfg = network(pmd, correlated, &params, &signs);
        let rho = apply_channel(&PureState::of_kind(kind, 3).unwrap(), &cfg).unwrap();
        prop_assert!(rho.matrix().hermitian_deviation() <= 1e-12);
        prop_assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(rho.validate_psd().is_ok());
        prop_assert!(rho.eigenvalues().unwrap().iter().all(|&l| l >= -PSD_TOL));
    }

    #[test]
    fn matrix_route_matches_closed_form(
        kind in kind(),
        n in 2usize..=4,
        pmd in any::<bool>(),
        correlated in any::<bool>(),
        params in prop::collection::vec(0.0..2.0f64, 4),
        signs in prop::collection::vec(any::<bool>(), 4),
    ) {
        let cfg = network(pmd, correlated, &params[..n], &signs[..n]);
        let rho = apply_channel(&PureState::of_kind(kind, n).unwrap(), &cfg).unwrap();
        let full = evaluate(&rho, &witness_spec(kind, n).unwrap()).unwrap();
        let closed = closed_form_report(&cfg, kind).unwrap();
        prop_assert!((full.witness_value - closed.witness_value).abs() < 1e-10);
        for (pair, c) in &closed.pair_concurrences {
            prop_assert!((full.pair_concurrences[pair] - c).abs() < 1e-12, "{pair:?}");
        }
    }

    #[test]
    fn relabelling_photons_permutes_pairs(
        pmd in any::<bool>(),
        params in prop::collection::vec(0.0..2.0f64, 4),
        rot in 1usize..4,
    ) {
        let n = 4;
        let signs = [false; 4];
        let cfg = network(pmd, true, &params, &signs);
        // photon i of the rotated network is photon (i + rot) % n of the original
        let rotated: Vec<f64> = (0..n).map(|i| params[(i + rot) % n]).collect();
        let cfg_rot = network(pmd, true, &rotated, &signs);
        let a = pair_concurrences_closed_form(&cfg, StateKind::W).unwrap();
        let b = pair_concurrences_closed_form(&cfg_rot, StateKind::W).unwrap();
        for (&(i, j), c) in &b {
            let (p, q) = ((i + rot) % n, (j + rot) % n);
            let orig = a[&(p.min(q), p.max(q))];
            prop_assert!((orig - c).abs() < 1e-12);
        }
        let wa = witness_closed_form(&cfg, StateKind::W).unwrap();
        let wb = witness_closed_form(&cfg_rot, StateKind::W).unwrap();
        prop_assert!((wa - wb).abs() < 1e-12);
    }
}

fn network(pmd: bool, correlated: bool, params: &[f64], signs: &[bool]) -> NetworkConfig {
    let n = params.len();
    let spectrum = if correlated {
        SpectralModel::correlated(vec![1.0; n])
    } else {
        SpectralModel::uncorrelated(vec![1.0; n])
    };
    if pmd {
        NetworkConfig::pmd(params, spectrum).unwrap()
    } else {
        let signed: Vec<f64> = params.iter().zip(signs).map(|(g, &s)| if s { -g } else { *g }).collect();
        NetworkConfig::pdl(&signed).unwrap()
    }
}

#[test]
fn pure_inputs_have_target_witness() {
    for n in 2..=8 {
        for kind in [StateKind::Ghz, StateKind::W] {
            let spec = witness_spec(kind, n).unwrap();
            let rho = PureState::of_kind(kind, n).unwrap().density_matrix();
            let r = evaluate(&rho, &spec).unwrap();
            assert_abs_diff_eq!(r.witness_value, spec.pure_value(), epsilon = 1e-12);
        }
    }
}
