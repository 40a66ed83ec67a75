use proptest::prelude::*;
use rand::Rng;

use tensordiag::diagonal::{dense_expansion, Decomposition, DiagonalTensor};
use tensordiag::numerics::{lq_norm, phase_root, relative_deviation, Field, LpParams, Scalar};
use tensordiag::oapoly::{
    diagonal_of_multilinear, extend_diagonal_functional, is_orthogonally_additive, polarize,
    AdditivityTolerances, OrthAddPolynomial,
};
use tensordiag::rademacher::{integrate_product, integrate_product_by_pieces};
use tensordiag::sampling;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-10.0..10.0_f64, -10.0..10.0_f64).prop_map(|(re, im)| Scalar::new(re, im))
}

fn real_scalar() -> impl Strategy<Value = Scalar> {
    (-10.0..10.0_f64).prop_map(|re| Scalar::new(re, 0.0))
}

fn vector(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Scalar>> {
    prop_oneof![
        prop::collection::vec(scalar(), n.clone()),
        prop::collection::vec(real_scalar(), n)
    ]
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY), 1.0..12.0_f64]
}

/// `(k, p)` with `p` in `{k + 1/2, k + 1, 2k}`.
fn high_params() -> impl Strategy<Value = LpParams> {
    (2u32..=4, 0usize..3).prop_map(|(k, j)| {
        let kf = f64::from(k);
        let p = [kf + 0.5, kf + 1.0, 2.0 * kf][j];
        LpParams::new(p, k).unwrap()
    })
}

fn low_params() -> impl Strategy<Value = LpParams> {
    (2u32..=4, 0.0..1.0_f64)
        .prop_map(|(k, t)| LpParams::new(1.0 + t * (f64::from(k) - 1.0), k).unwrap())
}

fn dense_diagonal(a: &[Scalar], k: u32) -> Vec<Scalar> {
    let n = a.len();
    let mut out = vec![Scalar::new(0.0, 0.0); n.pow(k)];
    let stride: usize = (0..k).map(|j| n.pow(j)).sum();
    for (i, &ai) in a.iter().enumerate() {
        out[i * stride] = ai;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn holder_pairing(v in vector(1..=8), seed in any::<u64>(), q in exponent()) {
        let mut rng = sampling::stream_rng(seed, 0);
        let w = sampling::gaussian_vector(&mut rng, v.len(), Field::Complex);
        let pairing: Scalar = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let bound = lq_norm(&v, q).unwrap() * lq_norm(&w, tensordiag::numerics::holder_conjugate(q)).unwrap();
        prop_assert!(pairing.norm() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn lq_norm_is_homogeneous(v in vector(0..=8), lambda in scalar(), q in exponent()) {
        let scaled: Vec<Scalar> = v.iter().map(|&a| a * lambda).collect();
        let lhs = lq_norm(&scaled, q).unwrap();
        let rhs = lambda.norm() * lq_norm(&v, q).unwrap();
        prop_assert!(relative_deviation(lhs, rhs) <= 1e-15, "{lhs} vs {rhs}");
    }

    #[test]
    fn phase_root_rebuilds_scalar(a in scalar(), k in 1u32..=7) {
        let s = phase_root(a, k).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-15);
        let rebuilt = (s * a.norm().powf(1.0 / f64::from(k))).powu(k);
        prop_assert!((rebuilt - a).norm() <= 1e-12 * a.norm().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn lq_norms_decrease_in_the_exponent(v in vector(1..=8), p in 1.0..6.0_f64, extra in 0.0..6.0_f64) {
        prop_assert!(lq_norm(&v, p + extra).unwrap() <= lq_norm(&v, p).unwrap() * (1.0 + 1e-15));
    }

    #[test]
    fn averaging_reconstructs_diagonal(a in vector(1..=5), k in 2u32..=3, symmetric in any::<bool>()) {
        let u = DiagonalTensor::new(a.clone(), LpParams::new(4.0, k).unwrap()).unwrap();
        let kind = if symmetric { Decomposition::Symmetric } else { Decomposition::SlotOneSign };
        let terms = u.averaging_decomposition(kind).unwrap();
        let dense = dense_expansion(&terms, a.len(), k).unwrap();
        let want = dense_diagonal(&a, k);
        let l1 = lq_norm(&a, 1.0).unwrap();
        for (g, w) in dense.iter().zip(&want) {
            if w.norm() == 0.0 {
                prop_assert!(g.norm() <= 1e-12 * l1);
            } else {
                prop_assert!((g - w).norm() <= 1e-12 * w.norm());
            }
        }
    }

    #[test]
    fn sandwich_above_the_degree(a in vector(1..=6), params in high_params()) {
        let u = DiagonalTensor::new(a, params).unwrap();
        let closed = u.pi_norm_closed_form();
        let lower = u.pi_lower_bound();
        let upper = u.pi_upper_bound().unwrap();
        prop_assert!(lower <= closed * (1.0 + 1e-12) && closed <= upper * (1.0 + 1e-12));
        prop_assert!(relative_deviation(lower, closed) <= 1e-10);
        prop_assert!(relative_deviation(upper, closed) <= 1e-10);
    }

    #[test]
    fn sandwich_at_or_below_the_degree(a in prop::collection::vec(real_scalar(), 1..=6), params in low_params()) {
        let u = DiagonalTensor::new(a, params).unwrap();
        let closed = u.pi_norm_closed_form();
        prop_assert_eq!(u.pi_lower_bound(), closed);
        prop_assert!(relative_deviation(u.pi_upper_bound().unwrap(), closed) <= 1e-12);
    }

    #[test]
    fn pi_norm_is_homogeneous(a in vector(1..=8), lambda in scalar(), params in high_params()) {
        let u = DiagonalTensor::new(a, params).unwrap();
        let lhs = u.scaled(lambda).pi_norm_closed_form();
        let rhs = lambda.norm() * u.pi_norm_closed_form();
        prop_assert!(relative_deviation(lhs, rhs) <= 1e-14);
    }

    #[test]
    fn pi_norm_is_permutation_invariant(a in vector(1..=8), params in high_params(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut b = a.clone();
        b.shuffle(&mut sampling::stream_rng(seed, 0));
        let lhs = DiagonalTensor::new(a, params).unwrap().pi_norm_closed_form();
        let rhs = DiagonalTensor::new(b, params).unwrap().pi_norm_closed_form();
        // summation order may differ; the sum itself is permutation invariant
        prop_assert!(relative_deviation(lhs, rhs) <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn isometry_above_the_degree(c in vector(1..=8), params in high_params(), seed in any::<u64>()) {
        let p = OrthAddPolynomial::new(c, params).unwrap();
        let closed = p.norm_closed_form();
        prop_assume!(closed > 0.0);
        let numeric = p.norm_numeric(20, 500, seed);
        prop_assert!(relative_deviation(numeric, closed) <= 1e-6, "{numeric} vs {closed}");
        let w = p.norm_witness().unwrap();
        prop_assert!(relative_deviation(w.value, closed) <= 1e-12);
    }

    #[test]
    fn sup_norm_at_or_below_the_degree(c in vector(1..=8), params in low_params(), seed in any::<u64>()) {
        let p = OrthAddPolynomial::new(c, params).unwrap();
        let bound = p.norm_closed_form();
        let mut rng = sampling::stream_rng(seed, 0);
        for _ in 0..200 {
            let x = sampling::random_unit_vector(&mut rng, p.dim(), params.p(), Field::Complex);
            prop_assert!(p.evaluate(&x).unwrap().norm() <= bound + 1e-12 * bound.max(1.0));
        }
        if bound > 0.0 {
            prop_assert_eq!(p.norm_witness().unwrap().value, bound);
        }
    }

    #[test]
    fn additive_on_disjoint_supports(c in vector(1..=8), k in 1u32..=4, seed in any::<u64>()) {
        let p = OrthAddPolynomial::new(c, LpParams::new(3.0, k).unwrap()).unwrap();
        let mut rng = sampling::stream_rng(seed, 0);
        let (x, y) = sampling::disjoint_pair(&mut rng, p.dim(), Field::Complex);
        let sum: Vec<Scalar> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let (px, py, pxy) = (p.evaluate(&x).unwrap(), p.evaluate(&y).unwrap(), p.evaluate(&sum).unwrap());
        prop_assert!((pxy - px - py).norm() <= 1e-10 * (px.norm() + py.norm()).max(1.0));
    }

    #[test]
    fn polarization_round_trip(c in vector(1..=4), k in 1u32..=4) {
        let p = OrthAddPolynomial::new(c.clone(), LpParams::new(5.0, k).unwrap()).unwrap();
        let form = polarize(&p.to_homogeneous(), 5.0).unwrap();
        let (d, _) = diagonal_of_multilinear(&form);
        for (di, ci) in d.iter().zip(&c) {
            prop_assert!((di - ci).norm() <= 1e-12 * ci.norm().max(1.0));
        }
        let report = is_orthogonally_additive(&form, AdditivityTolerances::default(), 16, 0);
        prop_assert!(report.is_additive());
    }

    #[test]
    fn extension_then_extraction_is_identity(c in vector(1..=6), params in high_params()) {
        prop_assume!(c.len().pow(params.k()) <= 100_000);
        let form = extend_diagonal_functional(&c, params).unwrap();
        prop_assert_eq!(diagonal_of_multilinear(&form).0, c);
    }

    #[test]
    fn representation_is_linear(c in vector(3..=3), d in vector(3..=3), lambda in scalar(), params in high_params(), seed in any::<u64>()) {
        let sum: Vec<Scalar> = c.iter().zip(&d).map(|(a, b)| a * lambda + b).collect();
        let (pc, pd, ps) = (
            OrthAddPolynomial::new(c, params).unwrap(),
            OrthAddPolynomial::new(d, params).unwrap(),
            OrthAddPolynomial::new(sum, params).unwrap(),
        );
        let x = sampling::gaussian_vector(&mut sampling::stream_rng(seed, 0), 3, Field::Complex);
        let lhs = ps.evaluate(&x).unwrap();
        let rhs = pc.evaluate(&x).unwrap() * lambda + pd.evaluate(&x).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        let n1 = pc.scaled(lambda).norm_closed_form();
        let n2 = lambda.norm() * pc.norm_closed_form();
        prop_assert!(relative_deviation(n1, n2) <= 1e-14);
    }

    #[test]
    fn low_regime_witness_is_scale_invariant(c in vector(1..=8), params in low_params(), scale in 0.01..100.0_f64) {
        let p = OrthAddPolynomial::new(c, params).unwrap();
        prop_assume!(p.norm_closed_form() > 0.0);
        let a = p.norm_witness().unwrap().point;
        let b = p.scaled(Scalar::new(scale, 0.0)).norm_witness().unwrap().point;
        let idx = |v: &[Scalar]| v.iter().position(|x| x.norm() == 1.0).unwrap();
        prop_assert_eq!(idx(&a), idx(&b));
        let best = p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        prop_assert_eq!(p.coeffs()[idx(&a)].norm(), best);
        prop_assert!(p.coeffs()[..idx(&a)].iter().all(|c| c.norm() < best));
    }
}

#[test]
fn holder_certificate_for_norming_forms() {
    let mut rng = sampling::stream_rng(11, 0);
    for (k, p) in [
        (2u32, 3.0),
        (2, 4.0),
        (3, 3.5),
        (3, 6.0),
        (2, 2.0),
        (3, 1.5),
    ] {
        let params = LpParams::new(p, k).unwrap();
        let a = sampling::gaussian_vector(&mut rng, 4, Field::Complex);
        let form = DiagonalTensor::new(a, params).unwrap().build_dual_form();
        let bound = form.holder_bound();
        for _ in 0..10_000 {
            let xs: Vec<Vec<Scalar>> = (0..k)
                .map(|_| {
                    let v = sampling::random_unit_vector(&mut rng, 4, p, Field::Complex);
                    let shrink: f64 = rng.random();
                    v.into_iter().map(|x| x * shrink).collect()
                })
                .collect();
            let args: Vec<&[Scalar]> = xs.iter().map(Vec::as_slice).collect();
            assert!(form.evaluate(&args).unwrap().norm() <= bound + 1e-12);
        }
    }
}

#[test]
fn multiplicity_rule_matches_piecewise_sum() {
    for k in 2u32..=4 {
        let tuples = 3usize.pow(k);
        for code in 0..tuples {
            let levels: Vec<u32> = (0..k)
                .map(|j| (code / 3usize.pow(j) % 3) as u32 + 1)
                .collect();
            let rule = integrate_product(&levels, k).unwrap();
            let pieces = integrate_product_by_pieces(&levels, k).unwrap();
            assert_eq!(pieces.as_integer(), Some(i64::from(rule)), "{levels:?}");
            assert_eq!(rule == 1, levels.iter().all(|&n| n == levels[0]));
        }
    }
}
