mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sharpkit::minimax::{solve, solve_real, DiscreteInstance};

fn random_instance(rng: &mut ChaCha8Rng, complex: bool) -> DiscreteInstance {
    let k1 = rng.random_range(1..=3);
    let m = rng.random_range(k1 + 1..=6);
    let mut c = || {
        let re = rng.random_range(-1.0..1.0);
        let im = if complex {
            rng.random_range(-1.0..1.0)
        } else {
            0.0
        };
        Complex64::new(re, im)
    };
    let u: Vec<Vec<Complex64>> = (0..m).map(|_| (0..k1).map(|_| c()).collect()).collect();
    let d: Vec<Complex64> = (0..m).map(|_| c()).collect();
    DiscreteInstance::new(u, d).unwrap()
}

#[test]
fn solver_matches_coefficient_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 40 {
        let inst = random_instance(&mut rng, checked % 2 == 1);
        let dn = inst.targets().iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let Some((grid, _)) =
            common::brute_force_minimax(inst.rows(), inst.targets(), 2.0 * dn, 1e-3)
        else {
            continue;
        };
        let s = solve(&inst).unwrap();
        assert!(
            s.delta <= grid + 1e-9,
            "solver {} above grid {}",
            s.delta,
            grid
        );
        assert!(grid - s.delta <= 2e-3, "solver {} grid {}", s.delta, grid);
        checked += 1;
    }
}

fn real_instance() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (1usize..=3).prop_flat_map(|k1| {
        (k1 + 1..=8).prop_flat_map(move |m| {
            (
                prop::collection::vec(prop::collection::vec(-1.0f64..1.0, k1), m),
                prop::collection::vec(-1.0f64..1.0, m),
            )
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn real_optimum_has_enough_active_points((u, d) in real_instance()) {
        let k1 = u[0].len();
        let inst = DiscreteInstance::from_real(u, d).unwrap();
        let Ok(s) = solve_real(&inst) else { return Ok(()); };
        let recomputed = inst.deviation(&s.f);
        prop_assert!((recomputed - s.delta).abs() <= 1e-9 * s.delta.max(1.0));
        let tol = 1e-7 * s.delta.max(1.0);
        let active = (0..inst.num_points())
            .filter(|&n| inst.residual(&s.f, n).norm() >= s.delta - tol)
            .count();
        prop_assert!(active > k1 || s.delta <= tol, "active {active} for {k1} unknowns");
    }

    #[test]
    fn adding_a_point_never_decreases_delta(
        (u, d) in real_instance(), extra in prop::collection::vec(-1.0f64..1.0, 4)
    ) {
        let k1 = u[0].len();
        let inst = DiscreteInstance::from_real(u.clone(), d.clone()).unwrap();
        let Ok(before) = solve_real(&inst) else { return Ok(()); };
        let mut u2 = u;
        let mut d2 = d;
        u2.push(extra[..k1].to_vec());
        d2.push(extra[3]);
        let after = solve_real(&DiscreteInstance::from_real(u2, d2).unwrap()).unwrap();
        prop_assert!(after.delta >= before.delta - 1e-9);
    }
}
