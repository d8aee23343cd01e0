use isokit::admissible::*;
use isokit::Vec3;
use proptest::prelude::*;

fn unit(v: [f64; 3]) -> Vec3 {
    Vec3::from(v).normalize()
}

fn vec3() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.0f64..1.0).prop_filter("nonzero", |v| v.iter().map(|c| c * c).sum::<f64>() > 1e-3)
}

// Independent oracle: planar points p_i with a_ij = p_i × p_j.
fn from_planar(p: &[[f64; 2]; 5]) -> AdmissibleSet {
    let mut a = [0.0; 10];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let (u, v) = (p[i - 1], p[j - 1]);
        a[k] = u[0] * v[1] - u[1] * v[0];
    }
    AdmissibleSet::from_values(a)
}

proptest! {
    #[test]
    fn contact_sets_satisfy_relations(vs in prop::array::uniform6(vec3())) {
        let u = vs.map(unit);
        let a = from_contact_vectors(&u);
        prop_assert!(check_relations(&a, 1e-9));
        prop_assert!(a.max_abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn planar_cross_products_are_admissible_up_to_scale(p in prop::array::uniform5(prop::array::uniform2(-1.0f64..1.0))) {
        let a = from_planar(&p);
        prop_assert!(check_relations(&a, 1e-12));
        let m = a.max_abs();
        if m > 0.0 {
            let b = a.scaled(1.0 / m);
            prop_assert!(AdmissibleSet::try_new(*b.values(), 1e-9).is_ok());
        }
    }

    #[test]
    fn g_keeps_points_in_omega(x in 0.5f64..=1.0, y in 0.5f64..=1.0) {
        if omega_contains(x, y) {
            let (gx, gy) = g_map(x, y).unwrap();
            prop_assert!(omega_contains_within(gx, gy, OMEGA_IMAGE_SLACK));
            prop_assert!(five_square_max(x, y) <= 9.0 / 16.0 + 1e-12);
        }
    }

    #[test]
    fn peculiar_sets_are_admissible(x in 0.01f64..=1.0, y in 0.01f64..=1.0, seed in any::<u64>()) {
        prop_assume!(x + y >= 1.0);
        let a = peculiar_from(x, y, seed).unwrap();
        prop_assert!(check_relations(&a, RELATION_TOL));
        prop_assert!(a.max_abs() <= 1.0 + 1e-12);
        prop_assert!(objective(&a, &[0.5; 6]) <= 2.0 + 1e-9);
    }

    #[test]
    fn combined_f_bound_holds(raw in prop::array::uniform6(0.0f64..1.0), x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        prop_assume!(raw.iter().sum::<f64>() > 1e-6);
        let l = LambdaVector::normalized(raw).unwrap();
        if let Ok(v) = f_combined(x, y, &l) {
            prop_assert!(v <= 2.0 + 1e-9, "value {v} at ({x}, {y}) with {l:?}");
        }
    }
}

#[test]
fn omega_grid_is_invariant_under_g() {
    let n = 400;
    for i in 0..=n {
        for j in 0..=n {
            let x = 0.5 + 0.5 * i as f64 / n as f64;
            let y = 0.5 + 0.5 * j as f64 / n as f64;
            if omega_contains(x, y) {
                let (gx, gy) = g_map(x, y).unwrap();
                assert!(omega_contains_within(gx, gy, OMEGA_IMAGE_SLACK), "({x}, {y})");
            }
        }
    }
}

#[test]
fn small_sweeps_are_clean() {
    let r = omega_monte_carlo(20_000, 3);
    assert!(r.in_omega > 0);
    assert!(r.g_violations.is_empty());
    assert!(r.max_five_square <= 9.0 / 16.0 + 1e-12);
    let p = peculiar_sweep(200, 50, 3);
    assert_eq!(p.relation_failures, 0);
    assert!(p.max_objective <= 2.0 + 1e-9);
    assert!(p.max_f_combined <= 2.0 + 1e-9);
}
