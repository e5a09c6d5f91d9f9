use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use valence_mps::angular_momentum::{irrep_generators, SiteSystem};
use valence_mps::mps_engine::{
    expand_state, random_unitary, reduced_density_matrix, MpsChain, SiteTensor, Window,
};
use valence_mps::parent_hamiltonian::{closed_form_spin1_couplings, Spin1Couplings, Spin1Model};
use valence_mps::spherical_tensors::{aklt_rank1_tensor, canonical_tensor, vbs_tensor, verify_spherical};
use valence_mps::spin_numerics::{
    commutator, distance_up_to_scalar, eigvals_hermitian, fit_operator_expansion, hermitian_deviation,
    kernel_basis, CMatrix, HalfInt, Settings, C64,
};
use valence_mps::valence_bond::mg_chain;

fn spin() -> impl Strategy<Value = HalfInt> {
    (1..=8i32).prop_map(HalfInt::from_twice)
}

fn small_spin() -> impl Strategy<Value = HalfInt> {
    (1..=3i32).prop_map(HalfInt::from_twice)
}

fn cmatrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn spin1_model() -> &'static Spin1Model {
    static MODEL: OnceLock<Spin1Model> = OnceLock::new();
    MODEL.get_or_init(|| Spin1Model::new(&Settings::default()).unwrap())
}

/// A few small periodic chains with different structure.
fn chain(kind: usize, s: HalfInt) -> MpsChain {
    match kind {
        0 => mg_chain(s, 4).unwrap(),
        1 => MpsChain::uniform(SiteTensor::from(&aklt_rank1_tensor()), 5).unwrap(),
        _ => MpsChain::uniform(SiteTensor::from(&canonical_tensor(s).unwrap()), 4).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn su2_relations(s in spin()) {
        let g = irrep_generators(s).unwrap();
        let two = C64::new(2.0, 0.0);
        prop_assert!((commutator(&g.lz, &g.lplus) - &g.lplus).norm() < 1e-10);
        prop_assert!((commutator(&g.lz, &g.lminus) + &g.lminus).norm() < 1e-10);
        prop_assert!((commutator(&g.lplus, &g.lminus) - &g.lz * two).norm() < 1e-10);
        let casimir = g.casimir();
        let expect = CMatrix::identity(g.dim(), g.dim()) * C64::new(s.casimir(), 0.0);
        prop_assert!((casimir - expect).norm() < 1e-9);
    }

    #[test]
    fn canonical_tensors_are_spherical(s in spin()) {
        let fam = canonical_tensor(s).unwrap();
        prop_assert_eq!(fam.aux_dim(), s.multiplicity() + 1);
        let chk = verify_spherical(&fam, &fam.generators(), 1e-10).unwrap();
        prop_assert!(chk.passed, "max deviation {}", chk.max_deviation());
    }

    #[test]
    fn kernel_of_low_rank_product(rows in 2usize..7, cols in 2usize..7, rank in 1usize..4, seed in any::<u64>()) {
        let rank = rank.min(rows).min(cols);
        let m = cmatrix(rows, rank, seed) * cmatrix(rank, cols, seed ^ 0x9e37);
        let tol = Settings::default().tol;
        let ker = kernel_basis(&m, &tol);
        prop_assert_eq!(ker.len(), cols - rank);
        for (i, v) in ker.iter().enumerate() {
            prop_assert!((&m * v).norm() < 1e-9);
            for (j, w) in ker.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((v.dotc(w) - C64::new(want, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn fit_round_trip(coef in prop::collection::vec(-5.0f64..5.0, 4)) {
        let sys = SiteSystem::uniform(HalfInt::HALF, 3).unwrap();
        let basis = vec![
            ("I".to_string(), CMatrix::identity(8, 8)),
            ("a".to_string(), sys.spin_dot(0, 1).unwrap()),
            ("b".to_string(), sys.spin_dot(0, 2).unwrap()),
            ("c".to_string(), sys.spin_dot(1, 2).unwrap()),
        ];
        let target = basis
            .iter()
            .zip(&coef)
            .fold(CMatrix::zeros(8, 8), |acc, ((_, b), w)| acc + b * C64::new(*w, 0.0));
        let fit = fit_operator_expansion(&target, &basis).unwrap();
        prop_assert!(fit.residual < 1e-9);
        for (a, b) in fit.coefficients.iter().zip(&coef) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn gauge_leaves_state_invariant(kind in 0usize..3, s in small_spin(), seed in any::<u64>(),
                                    r in 0.3f64..3.0, theta in 0.0f64..std::f64::consts::TAU) {
        let settings = Settings::default();
        let ch = chain(kind, s);
        let psi = expand_state(&ch, &settings).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(ch.aux_dim(), &mut rng);
        let moved = expand_state(&ch.gauge_transform(&u, C64::from_polar(r, theta)).unwrap(), &settings).unwrap();
        prop_assert!(distance_up_to_scalar(&psi, &moved) < 1e-9);
    }

    #[test]
    fn rdm_is_a_density_matrix(kind in 0usize..3, s in small_spin(), start in 0usize..4, len in 1usize..4) {
        let settings = Settings::default();
        let ch = chain(kind, s);
        let rho = match reduced_density_matrix(&ch, Window::new(start, len), &settings) {
            Ok(r) => r,
            // a vanishing chain has no density matrix
            Err(_) => return Ok(()),
        };
        prop_assert!(hermitian_deviation(&rho) < 1e-12);
        prop_assert!((rho.trace() - C64::new(1.0, 0.0)).norm() < 1e-10);
        let ev = eigvals_hermitian(&rho, &settings.tol).unwrap();
        prop_assert!(ev.iter().all(|&x| x > -1e-10));
    }

    #[test]
    fn translation_covariance(kind in 1usize..3, s in small_spin(), shift in 1usize..4, len in 1usize..3) {
        // uniform chains only; the dimer chain is invariant under two-site shifts
        let settings = Settings::default();
        let ch = chain(kind, s);
        let a = reduced_density_matrix(&ch, Window::new(0, len), &settings);
        let b = reduced_density_matrix(&ch, Window::new(shift, len), &settings);
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn dimer_chain_period_two(s in small_spin(), len in 1usize..3) {
        let settings = Settings::default();
        let ch = mg_chain(s, 6).unwrap();
        let a = reduced_density_matrix(&ch, Window::new(1, len), &settings).unwrap();
        let b = reduced_density_matrix(&ch, Window::new(3, len), &settings).unwrap();
        prop_assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn fitted_j_equals_closed_form_j(l in prop::array::uniform5(0.0f64..10.0)) {
        let settings = Settings::default();
        let cp = Spin1Couplings::new(l[0], l[1], l[2], l[3], l[4]).unwrap();
        let table = spin1_model().table(&cp, &settings).unwrap();
        let closed_form = closed_form_spin1_couplings(&cp);
        for (a, b) in table.fitted.iter().zip(closed_form) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn vbs_tensors_are_spherical(a in 1i32..=4, b in 1i32..=4) {
        let fam = vbs_tensor(HalfInt::from_twice(a), HalfInt::from_twice(b)).unwrap();
        let chk = verify_spherical(&fam, &fam.generators(), 1e-10).unwrap();
        prop_assert!(chk.passed);
    }
}
