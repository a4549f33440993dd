use maxcons::bounds::{upper_bound_alternative, upper_bound_ldp, upper_bound_mgf_direct};
use maxcons::consensus::{run_noisy_max, StreamSeed};
use maxcons::graph::generators;
use maxcons::maxplus::{build_noise_matrix, mp_multiply, mp_product, path_max_oracle, propagate};
use maxcons::{Graph, MaxPlusMatrix, NoiseFamily, NoiseModel, StateVector};
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn family() -> impl Strategy<Value = NoiseFamily> {
    prop_oneof![Just(NoiseFamily::Gaussian), Just(NoiseFamily::Laplace), Just(NoiseFamily::Uniform)]
}

fn entry() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(f64::NEG_INFINITY), 4 => (-20i32..20).prop_map(|v| v as f64 * 0.25)]
}

fn matrix(n: usize) -> impl Strategy<Value = MaxPlusMatrix> {
    proptest::collection::vec(proptest::collection::vec(entry(), n), n)
        .prop_map(|rows| MaxPlusMatrix::from_rows(&rows).unwrap())
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..=6, 0.2f64..0.9, any::<u64>()).prop_map(|(n, q, s)| generators::gnp_connected(n, q, s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative(a in matrix(4), b in matrix(4), c in matrix(4)) {
        // Quarter-integer entries keep sums exact, so equality is bitwise.
        let l = mp_multiply(&mp_multiply(&a, &b).unwrap(), &c).unwrap();
        let r = mp_multiply(&a, &mp_multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn identity_is_two_sided(a in matrix(5)) {
        let id = MaxPlusMatrix::identity(5);
        prop_assert_eq!(&mp_multiply(&a, &id).unwrap(), &a);
        prop_assert_eq!(&mp_multiply(&id, &a).unwrap(), &a);
    }

    #[test]
    fn oracle_equals_product(g in small_graph(), t in 1usize..=5, seed in any::<u64>(), p in 0.0f64..0.6, fam in family()) {
        let m = NoiseModel::new(fam, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mats: Vec<MaxPlusMatrix> = (0..t)
            .map(|_| {
                let real = g.sample_realization(p, &mut rng).unwrap();
                build_noise_matrix(&real, &m, &mut rng, false)
            })
            .collect();
        let prod = mp_product(&mats).unwrap();
        for i in 0..g.n_nodes() {
            for j in 0..g.n_nodes() {
                prop_assert_eq!(path_max_oracle(&g, &mats, i, j).unwrap().to_bits(), prod.get(i, j).to_bits());
            }
        }
    }

    #[test]
    fn propagation_agrees_with_product(g in small_graph(), seed in any::<u64>()) {
        let m = NoiseModel::gaussian(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = g.n_nodes();
        let x0 = StateVector::new((0..n).map(|k| k as f64).collect()).unwrap();
        let mats: Vec<MaxPlusMatrix> = (0..4).map(|_| build_noise_matrix(&g.full_realization(), &m, &mut rng, false)).collect();
        let mut x = x0.clone();
        for w in &mats {
            x = propagate(w, &x).unwrap();
        }
        let y = propagate(&mp_product(&mats).unwrap(), &x0).unwrap();
        for (a, b) in x.values().iter().zip(y.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn walk_counts_bounded_by_spectral_power(g in (2usize..=12, 0.15f64..0.9, any::<u64>()).prop_map(|(n, q, s)| generators::gnp_connected(n, q, s).unwrap()), t in 1usize..=8) {
        let rho = g.spectral_radius().unwrap();
        for i in 0..g.n_nodes() {
            for j in 0..g.n_nodes() {
                let a = g.adjacency_power_entry(t, i, j).unwrap() as f64;
                prop_assert!(a <= rho.powi(t as i32) + 1e-6);
            }
        }
    }

    #[test]
    fn uncompensated_runs_nondecreasing(g in small_graph(), seed in any::<u64>(), p in 0.0f64..0.9, fam in family()) {
        let m = NoiseModel::new(fam, 2.0).unwrap();
        let tr = run_noisy_max(&g, &StateVector::zeros(g.n_nodes()), &m, p, 30, StreamSeed::new(seed, 0), None).unwrap();
        for w in tr.states().windows(2) {
            prop_assert!(w[0].iter().zip(&w[1]).all(|(a, b)| b >= a));
        }
    }

    #[test]
    fn runs_are_deterministic(g in small_graph(), seed in any::<u64>(), stream in any::<u64>()) {
        let m = NoiseModel::laplace(1.0).unwrap();
        let x0 = StateVector::zeros(g.n_nodes());
        let s = StreamSeed::new(seed, stream);
        prop_assert_eq!(
            run_noisy_max(&g, &x0, &m, 0.25, 20, s, None).unwrap(),
            run_noisy_max(&g, &x0, &m, 0.25, 20, s, None).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rate_function_is_convex_and_increasing(fam in family(), var in 0.1f64..4.0, x in 0.01f64..3.0, h in 0.01f64..0.5) {
        let m = NoiseModel::new(fam, var).unwrap();
        let s = m.std_dev();
        let (a, b, c) = (x * s, (x + h) * s, (x + 2.0 * h) * s);
        let ia = m.rate_function(a).unwrap().value;
        let ib = m.rate_function(b).unwrap().value;
        let ic = m.rate_function(c).unwrap().value;
        prop_assert!(ib >= ia - 1e-12 && ic >= ib - 1e-12);
        prop_assert!(ia - 2.0 * ib + ic >= -1e-8 * ic.max(1.0));
    }

    #[test]
    fn rate_function_legendre_inequality(fam in family(), x in 0.01f64..4.0, g in 0.01f64..1.3) {
        // I(x) ≥ xγ − log M(γ) for every admissible γ.
        let m = NoiseModel::new(fam, 1.0).unwrap();
        let i = m.rate_function(x).unwrap();
        prop_assert!(i.value >= x * g - m.log_mgf(g).unwrap() - 1e-10);
        prop_assert!((i.value - (x * i.maximizer_gamma - m.log_mgf(i.maximizer_gamma).unwrap())).abs() < 1e-10);
    }

    #[test]
    fn m_plus_increasing_in_degree(fam in family(), d in 1usize..30) {
        let m = NoiseModel::new(fam, 1.0).unwrap();
        prop_assert!(m.m_plus(d + 1).unwrap() > m.m_plus(d).unwrap());
    }

    #[test]
    fn upper_bound_orderings(fam in family(), rho in 1.0f64..100.0, p in 0.0f64..0.9) {
        let m = NoiseModel::new(fam, 1.0).unwrap();
        let (ldp, beta) = upper_bound_ldp(&m, rho, p).unwrap();
        prop_assert!((0.0..=1.0).contains(&beta));
        let k = rho * (1.0 - p);
        let alt = upper_bound_alternative(&m, k).unwrap();
        prop_assert!(alt >= ldp - 1e-6);
        if k >= 1.0 {
            prop_assert!((upper_bound_mgf_direct(&m, k).unwrap() - ldp).abs() < 2e-3);
        }
        let (full, _) = upper_bound_ldp(&m, rho, 0.0).unwrap();
        prop_assert!(ldp <= full + 1e-9);
    }
}
