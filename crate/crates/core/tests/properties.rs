use faer::Mat;
use haar_fluct::laws::{expmixture_cdf, expmixture_density};
use haar_fluct::montecarlo::{histogram, Bins};
use haar_fluct::ncpoly::NCPolynomial;
use haar_fluct::randmat::{haar_unitary, unitarity_defect};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn poly(seed: u64, complex: bool) -> NCPolynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    NCPolynomial::random(&mut rng, 6, 5, 6, complex)
}

/// Distinct nonzero rates, at least 0.5 apart relative to the largest.
fn mixture() -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::btree_set(-6i32..=6, 1..=4), 0.2f64..5.0).prop_filter_map("nonzero", |(set, scale)| {
        let v: Vec<f64> = set.into_iter().filter(|&k| k != 0).map(|k| k as f64 * scale / 2.0).collect();
        (!v.is_empty()).then_some(v)
    })
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_reassembles(seed in any::<u64>(), complex in any::<bool>()) {
        let p = poly(seed, complex);
        prop_assert_eq!(p.decompose().reassemble(), p);
    }

    #[test]
    fn display_parses_back(seed in any::<u64>(), complex in any::<bool>()) {
        let p = poly(seed, complex);
        let printed = p.to_string();
        let again = NCPolynomial::parse(&printed).unwrap();
        prop_assert_eq!(&again, &p);
        prop_assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn scalar_and_diagonal_evaluation(seed in any::<u64>(), xs in prop::collection::vec((-1.5f64..1.5, -1.5f64..1.5), 3)) {
        let p = poly(seed, true);
        let a: Vec<Complex64> = xs.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let b: Vec<Complex64> = a.iter().map(|z| z.conj() * 0.7 + 0.1).collect();
        let scalar = |z: Complex64| Mat::from_fn(1, 1, |_, _| z);
        let one = p.eval_matrix(&scalar(a[0]), &scalar(b[0])).unwrap();
        let want = p.eval_commutative(a[0], b[0]);
        prop_assert!((one[(0, 0)] - want).norm() <= 1e-12 * (1.0 + want.norm()));

        let da = Mat::from_fn(3, 3, |i, j| if i == j { a[i] } else { Complex64::ZERO });
        let db = Mat::from_fn(3, 3, |i, j| if i == j { b[i] } else { Complex64::ZERO });
        let m = p.eval_matrix(&da, &db).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { p.eval_commutative(a[i], b[i]) } else { Complex64::ZERO };
                prop_assert!((m[(i, j)] - want).norm() <= 1e-12 * (1.0 + want.norm()));
            }
        }
    }

    #[test]
    fn mixture_density_integrates_to_one(coeffs in mixture()) {
        let reach = 40.0 * coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
        let finest = coeffs.iter().map(|c| c.abs()).fold(f64::INFINITY, f64::min);
        let steps = 2 * (reach / finest * 10.0).ceil() as usize;
        let f = |x: f64| expmixture_density(&coeffs, x).unwrap();
        let total = simpson(f, -reach, -1e-300, steps) + simpson(f, 1e-300, reach, steps);
        prop_assert!((total - 1.0).abs() < 1e-6, "total {}", total);
        prop_assert!(f(0.3 * reach / 40.0) >= -1e-12);
    }

    #[test]
    fn mixture_cdf_derivative_is_density(coeffs in mixture(), t in 0.02f64..3.0, neg in any::<bool>()) {
        let scale = coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
        let x = if neg { -t * scale } else { t * scale };
        let h = 1e-5 * scale;
        let cdf = |x: f64| expmixture_cdf(&coeffs, x).unwrap();
        let numeric = (cdf(x + h) - cdf(x - h)) / (2.0 * h);
        let density = expmixture_density(&coeffs, x).unwrap();
        prop_assert!((numeric - density).abs() < 1e-5 / scale, "{} vs {}", numeric, density);
        prop_assert!(cdf(x - h) <= cdf(x + h));
    }

    #[test]
    fn histogram_area_is_one(xs in prop::collection::vec(-1e3f64..1e3, 1..300), bins in prop::option::of(1usize..40)) {
        let h = histogram(&xs, bins.map(Bins::Count)).unwrap();
        prop_assert!((h.area() - 1.0).abs() < 1e-9);
        prop_assert_eq!(h.counts.iter().sum::<usize>(), xs.len());
    }

    #[test]
    fn haar_matrices_are_unitary(seed in any::<u64>(), n in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(unitarity_defect(&haar_unitary(n, &mut rng)) < 1e-12);
    }
}
