mod common;

use common::*;
use kcompound::certify::{certify_tau, JacobianSampler};
use kcompound::compounds::{additive_compound, multiplicative_compound, parallelotope_volume};
use kcompound::duality::DualityMatrix;
use kcompound::dynamics::{find_equilibrium, integrate, HopfieldModel};
use kcompound::lexidx::{binomial, generate_sequences, rank, unrank};
use kcompound::lognorms::{mu, mu_compound_direct, mu_p, LogNormSpec, NormKind, Scaling};
use kcompound::{Matrix, Matrix32};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn matrix_strategy(max_n: usize) -> impl Strategy<Value = Matrix<f64>> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-2.0f64..2.0, n * n).prop_map(move |v| Matrix::from_vec(n, n, v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn table_matches_oracle_enumeration(n in 1usize..=9, k in 1usize..=9) {
        prop_assume!(k <= n);
        let table = generate_sequences(k, n).unwrap();
        let want = combos(k, n);
        prop_assert_eq!(table.len(), want.len());
        prop_assert_eq!(table.len() as u64, binomial(n, k));
        for (i, (seq, c)) in table.iter().zip(&want).enumerate() {
            let zero: Vec<usize> = seq.zero_based().collect();
            prop_assert_eq!(&zero, c);
            prop_assert_eq!(rank(seq), i + 1);
            prop_assert_eq!(&unrank(i + 1, k, n).unwrap(), seq);
        }
    }

    #[test]
    fn compound_matches_determinant_oracle(a in matrix_strategy(5), kr in 0usize..5) {
        let k = 1 + kr % a.rows();
        let got = multiplicative_compound(&a, k).unwrap().into_matrix();
        prop_assert!(max_abs_diff(&got, &compound_oracle(&a, k)) < 1e-9);
    }

    #[test]
    fn additive_compound_is_linear(a in matrix_strategy(4), c in -3.0f64..3.0, kr in 0usize..4) {
        let n = a.rows();
        let k = 1 + kr % n;
        let b = Matrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let lhs = additive_compound(&a.scale(c).try_add(&b).unwrap(), k).unwrap().into_matrix();
        let rhs = additive_compound(&a, k).unwrap().into_matrix().scale(c)
            .try_add(additive_compound(&b, k).unwrap().matrix()).unwrap();
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn log_norm_duality(a in matrix_strategy(6)) {
        // μ_p(A) = μ_q(Aᵀ)
        let at = a.transpose();
        prop_assert_eq!(mu_p(&a, NormKind::L1).unwrap(), mu_p(&at, NormKind::LInf).unwrap());
        prop_assert_eq!(mu_p(&a, NormKind::LInf).unwrap(), mu_p(&at, NormKind::L1).unwrap());
        prop_assert!((mu_p(&a, NormKind::L2).unwrap() - mu_p(&at, NormKind::L2).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn signed_permutation_invariance() {
    // U from the duality module is a signed permutation
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in 2..=6 {
        for k in 1..n {
            let u = DualityMatrix::new(k, n).unwrap();
            let r = u.r();
            let scaling = Scaling::new(u.to_dense::<f64>()).unwrap();
            for _ in 0..10 {
                let b = random_matrix(&mut rng, r, r);
                for p in NormKind::ALL {
                    let plain = mu_p(&b, p).unwrap();
                    let scaled = mu(&b, &LogNormSpec::scaled(p, scaling.clone())).unwrap();
                    assert!((plain - scaled).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn compound_log_norm_formula_matches_explicit_compound() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=n);
        let a = random_matrix(&mut rng, n, n);
        let ak = additive_compound(&a, k).unwrap().into_matrix();
        for p in NormKind::ALL {
            let direct = mu_compound_direct(&a, k, p).unwrap();
            let explicit = match p {
                NormKind::L2 => na_sym_eigenvalues(&ak.symmetric_part())[0],
                _ => mu_p(&ak, p).unwrap(),
            };
            assert!((direct - explicit).abs() < 1e-10, "n={n} k={k} p={p}");
        }
    }
}

#[test]
fn volumes_against_gram_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let n = rng.gen_range(2..=6);
        let k = rng.gen_range(1..=n);
        let x = random_matrix(&mut rng, n, k);
        let cols: Vec<Vec<f64>> = (0..k).map(|j| x.column(j)).collect();
        let gram = na_det(&(&x.transpose() * &x));
        assert!((parallelotope_volume(&cols).unwrap() - gram.sqrt()).abs() < 1e-10);
    }
}

#[test]
fn two_volumes_shrink_along_hopfield_trajectories() {
    // ẏ = J^[2](x(t)) y next to ẋ = f(x); with the certificate passing at rate
    // η, log|y|∞ (the scaled norm with D = I) falls with slope at most -η + 0.1.
    let m = HopfieldModel::three_neuron_example(0.49f64).unwrap();
    let eta = 0.08;
    let sampler = JacobianSampler::hopfield(m.clone()).with_grid(&[-4.0; 3], &[4.0; 3], 9).unwrap();
    assert!(certify_tau(&sampler, 2, NormKind::LInf, None, eta).unwrap().passed);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..4 {
        let x0: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let y0: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut z0 = x0.clone();
        z0.extend(&y0);
        let tr = integrate(
            |_t, z: &[f64]| {
                let (x, y) = z.split_at(3);
                let mut out = m.field(x);
                out.extend(additive_compound(&m.jacobian(x), 2).unwrap().matrix().mul_vec(y));
                out
            },
            &z0,
            (0.0, 5.0),
            1e-3,
        )
        .unwrap();
        let log_norm = |z: &[f64]| z[3..].iter().fold(0.0f64, |a, v| a.max(v.abs())).ln();
        let (t0, t1) = (tr.times[0], tr.final_time());
        let slope = (log_norm(tr.final_state()) - log_norm(&tr.states[0])) / (t1 - t0);
        assert!(slope <= -eta + 0.1, "slope {slope}");
        for w in tr.states.windows(2) {
            assert!(log_norm(&w[1]) <= log_norm(&w[0]) + 1e-12);
        }
    }
}

#[test]
fn equilibria_are_roots() {
    let m = HopfieldModel::three_neuron_example(0.49f64).unwrap();
    let e2 = find_equilibrium(|x| m.field(x), |x| m.jacobian(x), &[1.0; 3]).unwrap();
    // x = 1.47 tanh(x) solved by bisection as an independent oracle
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid - 1.47 * mid.tanh() < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!(e2.iter().all(|v| (v - lo).abs() < 1e-10));
}

#[test]
fn single_precision_path() {
    let a = Matrix32::from_rows(&[[-1.0f32, 0.5, 0.0], [0.2, -2.0, 0.3], [0.0, 0.1, -3.0]]).unwrap();
    let a64 = a.cast::<f64>();
    let c32 = additive_compound(&a, 2).unwrap().into_matrix().cast::<f64>();
    let c64 = additive_compound(&a64, 2).unwrap().into_matrix();
    assert!(max_abs_diff(&c32, &c64) < 1e-5);
    let s = JacobianSampler::constant(a).unwrap();
    assert!(certify_tau(&s, 2, NormKind::L1, None, 0.0f32).unwrap().passed);
}
