use isokit::geom::convex_hull;
use isokit::john::{isodiametric_quotient, normalize};
use isokit::{Mat3, Polytope, Vec3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BOUND: f64 = std::f64::consts::SQRT_2 / 12.0;

fn random_polytope(rng: &mut ChaCha8Rng) -> Polytope {
    loop {
        let n = rng.gen_range(4..=20);
        let pts: Vec<[f64; 3]> = (0..n)
            .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        if let Ok(p) = convex_hull(&pts) {
            if p.volume() > 1e-6 {
                return p;
            }
        }
    }
}

#[test]
fn random_polytopes_clear_the_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let p = random_polytope(&mut rng);
        let r = normalize(&p, 1e-9).unwrap();
        assert!(r.idq >= BOUND - 1e-6, "idq {}", r.idq);
        assert!(r.witness.1 >= 1.0 / 2f64.sqrt() - 1e-6, "witness {}", r.witness.1);
        assert!(r.decomposition.residual() <= 1e-7);
        assert!((r.recompute_idq(&p) - r.idq).abs() <= 1e-9);
    }
}

fn well_conditioned(entries: [f64; 9]) -> Option<Mat3> {
    let a = Mat3::from_row_slice(&entries);
    let svd = a.svd(false, false);
    let (lo, hi) = (svd.singular_values.min(), svd.singular_values.max());
    (lo > 0.2 && hi / lo < 20.0).then_some(a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normalized_quotient_is_linear_invariant(
        seed in 0u64..10_000,
        entries in prop::array::uniform9(-2.0f64..2.0),
    ) {
        let Some(a) = well_conditioned(entries) else { return Ok(()); };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polytope(&mut rng);
        let q = p.transformed(&a);
        let r1 = normalize(&q, 1e-9).unwrap();
        let r2 = normalize(&p, 1e-9).unwrap();
        prop_assert!((r1.idq - r2.idq).abs() <= 1e-6, "{} vs {}", r1.idq, r2.idq);
    }

    #[test]
    fn mvee_is_affine_equivariant(
        seed in 0u64..10_000,
        entries in prop::array::uniform9(-2.0f64..2.0),
    ) {
        let Some(a) = well_conditioned(entries) else { return Ok(()); };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polytope(&mut rng);
        let pts = isokit::difference_body(&p).vertex_vectors();
        let mapped: Vec<Vec3> = pts.iter().map(|s| a * s).collect();
        let m = *isokit::mvee::mvee_centered(&pts, 1e-9).unwrap().shape();
        let ma = *isokit::mvee::mvee_centered(&mapped, 1e-9).unwrap().shape();
        let ainv = a.try_inverse().unwrap();
        let expected = ainv.transpose() * m * ainv;
        let scale = expected.abs().max();
        prop_assert!((ma - expected).abs().max() <= 1e-6 * scale.max(1.0));
    }

    #[test]
    fn mvee_contains_and_touches(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polytope(&mut rng);
        let pts = isokit::difference_body(&p).vertex_vectors();
        let sol = isokit::mvee::mvee_centered_detailed(&pts, 1e-9, None).unwrap();
        let g: Vec<f64> = pts.iter().map(|s| sol.ellipsoid.gauge_squared(s)).collect();
        let max = g.iter().cloned().fold(f64::MIN, f64::max);
        prop_assert!((max - 1.0).abs() <= 1e-9);
        prop_assert!(isokit::mvee::contact_points(&sol.ellipsoid, &pts, 1e-9).is_ok());
        prop_assert!(sol.log_det_history.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn quotient_is_scale_invariant(seed in 0u64..10_000, s in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polytope(&mut rng);
        let q = p.transformed(&(Mat3::identity() * s));
        prop_assert!((isodiametric_quotient(&p) - isodiametric_quotient(&q)).abs() <= 1e-12);
    }
}
