use isokit::geom::convex_hull;
use isokit::lattice::*;
use isokit::Polytope;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn random_lattice_polytope(rng: &mut ChaCha8Rng, hi: i64) -> Polytope<BigRational> {
    loop {
        let n = rng.gen_range(4..=12);
        let pts: Vec<[BigRational; 3]> = (0..n).map(|_| [0; 3].map(|_| int(rng.gen_range(0..=hi)))).collect();
        if let Ok(p) = convex_hull(&pts) {
            return p;
        }
    }
}

// Product of random elementary row operations and sign flips.
fn random_unimodular(rng: &mut ChaCha8Rng) -> [[i64; 3]; 3] {
    let mut u = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    for _ in 0..6 {
        let i = rng.gen_range(0..3);
        let j = (i + rng.gen_range(1..3)) % 3;
        let k = rng.gen_range(-2..=2);
        for c in 0..3 {
            u[i][c] += k * u[j][c];
        }
        if rng.gen_bool(0.3) {
            u[i] = u[i].map(|x| -x);
        }
    }
    u
}

fn apply(u: &[[i64; 3]; 3], p: &Polytope<BigRational>) -> Polytope<BigRational> {
    let pts: Vec<[BigRational; 3]> = p
        .vertices()
        .iter()
        .map(|v| std::array::from_fn(|r| (0..3).map(|c| int(u[r][c]) * &v[c]).sum()))
        .collect();
    convex_hull(&pts).unwrap()
}

#[test]
fn width_is_unimodular_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let p = random_lattice_polytope(&mut rng, 3);
        let u = random_unimodular(&mut rng);
        let w = lattice_width(&p).unwrap().omega;
        assert_eq!(lattice_width(&apply(&u, &p)).unwrap().omega, w, "U = {u:?}");
    }
}

#[test]
fn random_lattice_polytopes_satisfy_the_corollary() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let p = random_lattice_polytope(&mut rng, 3);
        let r = verify_width_volume_corollary(&p).unwrap();
        assert!(r.satisfied, "{:?}", r.to_json());
        if r.nonseparable == Some(true) {
            let c = chain_check(&p, 1e-6).unwrap();
            assert!(c.holds, "{c:?}");
        }
    }
}

proptest! {
    #[test]
    fn difference_body_support_is_width(
        pts in prop::collection::vec(prop::array::uniform3(-4i64..=4), 4..10),
        dir in prop::array::uniform3(-3i64..=3),
    ) {
        prop_assume!(dir != [0, 0, 0]);
        let pts: Vec<[BigRational; 3]> = pts.iter().map(|p| p.map(int)).collect();
        let Ok(p) = convex_hull(&pts) else { return Ok(()) };
        let u = LatticeDirection::new(dir).unwrap();
        let d = isokit::difference_body(&p);
        prop_assert_eq!(support(&d, &u), width_in_direction(&p, &u));
    }
}
