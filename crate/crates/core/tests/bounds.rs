use isokit::admissible::LambdaVector;
use isokit::bounds::*;
use proptest::prelude::*;

fn lambda() -> impl Strategy<Value = LambdaVector> {
    prop::array::uniform6(0.0f64..1.0)
        .prop_filter("positive", |v| v.iter().sum::<f64>() > 1e-3)
        .prop_map(|v| LambdaVector::normalized(v).unwrap())
}

fn permute(l: &LambdaVector, p: &[usize; 5]) -> LambdaVector {
    let mut v = [0.0; 6];
    for i in 0..5 {
        v[p[i] - 1] = l[i];
    }
    v[5] = l[5];
    LambdaVector::try_new(v).unwrap()
}

proptest! {
    #[test]
    fn pair_drop_symmetries(l in lambda(), p in Just([1usize, 2, 3, 4, 5]).prop_shuffle()) {
        let a = pair_drop_sum(&l, 1, 2, 3, 4).unwrap().value;
        let swapped = pair_drop_sum(&l, 3, 4, 1, 2).unwrap().value;
        prop_assert!((a - swapped).abs() <= 1e-15);
        let mut perm = [0; 5];
        perm.copy_from_slice(&p);
        let q = permute(&l, &perm);
        let b = pair_drop_sum(&q, perm[0], perm[1], perm[2], perm[3]).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn random_weights_respect_bounds(l in lambda()) {
        for (k, ll, m, n) in [(1, 2, 3, 4), (2, 5, 1, 3), (4, 5, 2, 3)] {
            prop_assert!(pair_drop_sum(&l, k, ll, m, n).unwrap().satisfied);
        }
        for (k, ll, n) in [(1, 2, 3), (3, 4, 5), (1, 3, 5)] {
            prop_assert!(triple_drop_sum(&l, k, ll, n).unwrap().satisfied);
        }
        prop_assert!(weighted_sum(&l).satisfied);
    }

    #[test]
    fn zero_first_weights_respect_bound(raw in prop::array::uniform5(0.0f64..1.0), k in 2usize..=5, d in 1usize..=3) {
        prop_assume!(raw.iter().sum::<f64>() > 1e-3);
        let l = LambdaVector::normalized([0.0, raw[0], raw[1], raw[2], raw[3], raw[4]]).unwrap();
        prop_assume!(l[0] == 0.0);
        let ll = 2 + (k - 2 + d) % 4;
        prop_assert!(zero_lambda_drop(&l, k, ll).unwrap().satisfied);
    }

    #[test]
    fn ignore_term_holds(a in 0.0f64..5.0, b in 0.0f64..5.0, c in 0.0f64..5.0, x in -1.0f64..=1.0, t in 0.0f64..=1.0) {
        // Parametrize y in the range that keeps z = -x-y inside [-1, 1].
        let (lo, hi) = ((-1.0 - x).max(-1.0), (1.0 - x).min(1.0));
        let y = lo + t * (hi - lo);
        let z = -x - y;
        prop_assume!(z.abs() <= 1.0);
        let e = ignore_term_bound(a, b, c, x, y, -(x + y)).unwrap();
        prop_assert!(e.satisfied, "{e:?}");
    }
}

#[test]
fn grid_reports_are_deterministic() {
    let a = grid_verify_all(0.2).unwrap();
    let b = grid_verify_all(0.2).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.violation_count, 0);
}
