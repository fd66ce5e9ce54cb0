use cavity_core::asymptotics::*;
use cavity_core::Complex64 as c64;
use rand::{rngs::StdRng, Rng, SeedableRng};

#[test]
fn table_one_for_several_magnifications() {
    // Rows I1, I2, I3; columns are the five regions in increasing y.
    let table = [
        [false, false, false, false, true],
        [false, true, true, true, false],
        [true, false, false, false, false],
    ];
    for m in [1.5, 3.0, 4.79] {
        let samples = [-2.0 * m, -(1.0 + m) / 2.0, 0.3, (1.0 + m) / 2.0, 2.0 * m];
        for (col, (&y, region)) in samples.iter().zip(Region::ALL).enumerate() {
            let class = classify_stationary(y, m).unwrap();
            assert_eq!(class.region, region);
            for row in 0..3 {
                assert_eq!(class.contains_stationary[row], table[row][col], "M={m}, y={y}, I{}", row + 1);
            }
        }
    }
}

#[test]
fn additivity_on_random_tuples() {
    let mut rng = StdRng::seed_from_u64(11);
    let opts = QuadratureOptions::default();
    for _ in 0..100 {
        let m = rng.gen_range(1.2..6.0);
        let y = rng.gen_range(-2.0 * m..2.0 * m);
        let t = rng.gen_range(5.0..200.0);
        let g = Gaussian::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.2..1.5));
        let p = eval_partial_integrals_quadrature(y, t, m, &|x| g.eval(x), &opts).unwrap();
        assert!(p.additivity_residual() < 1e-10, "{:e} full={:e} i={:e},{:e},{:e} y={y} m={m} t={t} g={g:?}", p.additivity_residual(), p.full.unwrap().norm(), p.i1.norm(), p.i2.norm(), p.i3.norm());
    }
}

#[test]
fn mirror_symmetry_swaps_outer_integrals() {
    let g = Gaussian::new(0.0, 0.8);
    let opts = QuadratureOptions::default();
    for y in [0.4, 2.0, 7.5] {
        let a = eval_partial_integrals_quadrature(y, 40.0, 3.0, &|x| g.eval(x), &opts).unwrap();
        let b = eval_partial_integrals_quadrature(-y, 40.0, 3.0, &|x| g.eval(x), &opts).unwrap();
        let scale = a.total().norm();
        assert!((a.i1 - b.i3).norm() < 1e-12 * scale);
        assert!((a.i3 - b.i1).norm() < 1e-12 * scale);
        assert!((a.i2 - b.i2).norm() < 1e-12 * scale);
    }
}

#[test]
fn leading_order_converges_with_chirp() {
    let g = Gaussian::new(0.0, 1.0);
    let f = |x: f64| g.eval(x);
    let opts = QuadratureOptions::default();
    let mut errors = Vec::new();
    for t in [50.0, 200.0, 800.0] {
        let q = eval_partial_integrals_quadrature(0.0, t, 4.0, &f, &opts).unwrap();
        let lead = stationary_phase_leading(0.0, t, 4.0, &f).unwrap();
        errors.push(leading_order_error(&q, &lead));
    }
    assert!(errors[0] < 0.05);
    assert!(errors[1] < errors[0] && errors[2] < errors[1]);
    assert!(errors[2] / errors[1] < 0.7);
    // Full scaled-kernel action tends to g(y/M).
    let q = eval_partial_integrals_quadrature(0.0, 800.0, 4.0, &f, &opts).unwrap();
    assert!((q.kernel_action() - c64::new(1.0, 0.0)).norm() < 2e-3);
}

#[test]
fn leading_order_at_t200_away_from_boundaries() {
    let opts = QuadratureOptions::default();
    let m = 3.0;
    // Stationary points y/M in I2 interior, >= 0.2 from +-1.
    for y in [-4.5, -2.0, -0.9, 0.0, 1.1, 2.3, 5.0] {
        let g = Gaussian::new(y / m, 0.5);
        let f = |x: f64| g.eval(x);
        let q = eval_partial_integrals_quadrature(y, 200.0, m, &f, &opts).unwrap();
        let lead = stationary_phase_leading(y, 200.0, m, &f).unwrap();
        assert!(leading_order_error(&q, &lead) < 0.05);
    }
}
