mod common;

use cavity_core::geometry::horwitz_params;
use cavity_core::operators::*;
use cavity_core::spectrum::*;
use cavity_core::Complex64 as c64;

fn greedy_match(a: &[c64], b: &[c64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

#[test]
fn coupled_spectrum_is_union_of_parity_sectors() {
    let geom = common::g0_t20();
    let grid = make_grid(256, 3.0).unwrap();
    let coupled = solve_eigenvalues(&build_operator(OperatorKind::Coupled, &grid, &geom).unwrap(), OperatorKind::Coupled).unwrap();
    let mut union = solve_eigenvalues(&build_operator(OperatorKind::ParityPlus, &grid, &geom).unwrap(), OperatorKind::ParityPlus).unwrap();
    union.extend(solve_eigenvalues(&build_operator(OperatorKind::ParityMinus, &grid, &geom).unwrap(), OperatorKind::ParityMinus).unwrap());
    assert_eq!(coupled.len(), union.len());
    assert!(greedy_match(&coupled, &union) < 1e-8);
}

#[test]
fn coupled_modes_carry_parity_labels() {
    let geom = common::g0_t20();
    let grid = make_grid(128, 3.0).unwrap();
    let spec = operator_spectrum(OperatorKind::Coupled, &grid, &geom).unwrap();
    let plus = solve_eigenvalues(&build_operator(OperatorKind::ParityPlus, &grid, &geom).unwrap(), OperatorKind::ParityPlus).unwrap();
    let minus = solve_eigenvalues(&build_operator(OperatorKind::ParityMinus, &grid, &geom).unwrap(), OperatorKind::ParityMinus).unwrap();
    let nearest = |set: &[c64], z: c64| set.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
    for pair in spec.pairs.iter().take(10) {
        assert!(pair.residual <= RESIDUAL_TOLERANCE);
        assert!((grid.norm(&pair.mode) - 1.0).abs() < 1e-12);
        let expected = if nearest(&plus, pair.gamma) < nearest(&minus, pair.gamma) {
            ModeParity::Even
        } else {
            ModeParity::Odd
        };
        assert_eq!(pair.parity, expected, "gamma = {}", pair.gamma);
    }
}

#[test]
fn coupled_top_modes_are_nearly_unitary() {
    let geom = common::g0_t20();
    let grid = make_grid(256, 3.0).unwrap();
    let values = solve_eigenvalues(&build_operator(OperatorKind::Coupled, &grid, &geom).unwrap(), OperatorKind::Coupled).unwrap();
    for g in &values[..10] {
        assert!((g.norm() - 1.0).abs() < 0.05);
    }
}

#[test]
fn decoupled_subcavity_loses_power() {
    let geom = common::g0_t20();
    let m = horwitz_params(&geom).unwrap().magnification;
    let grid = make_grid(768, default_half_width(Some(m))).unwrap();
    let spec = decoupled_subcavity_spectrum(&grid, &geom).unwrap();
    assert!(spec.pairs.iter().all(|p| p.gamma.norm() < 1.0));
    let top = spec.pairs[0].gamma.norm();
    assert!((top - m.powf(-0.5)).abs() / m.powf(-0.5) < 0.25, "top |gamma| = {top}");
}

#[test]
fn scaled_operator_matches_parity_operator() {
    let geom = common::g0_t20();
    let horwitz = horwitz_params(&geom).unwrap();
    let grid = make_grid(640, 3.0).unwrap();
    let alpha = horwitz.gauge_chirp(geom.scaled().half_cavity.a);
    for (parity, kind) in [(Parity::Even, OperatorKind::ParityPlus), (Parity::Odd, OperatorKind::ParityMinus)] {
        let phys = operator_spectrum(kind, &grid, &geom).unwrap();
        let scaled = operator_spectrum(OperatorKind::Scaled(parity), &grid, &geom).unwrap();
        for p in phys.pairs.iter().take(5) {
            let q = scaled
                .pairs
                .iter()
                .min_by(|a, b| {
                    let da = (a.gamma / horwitz.eigenvalue_scale() - p.gamma).norm();
                    let db = (b.gamma / horwitz.eigenvalue_scale() - p.gamma).norm();
                    da.total_cmp(&db)
                })
                .unwrap();
            let rescaled = q.gamma / horwitz.eigenvalue_scale();
            assert!((rescaled - p.gamma).norm() / p.gamma.norm() < 1e-5);
            let g = gauge_transform(&p.mode, &grid, alpha, GaugeDirection::ToScaled).unwrap();
            let dot: c64 = g.iter().zip(&q.mode).map(|(a, b)| a.conj() * b).sum();
            let cos = dot.norm() / (grid.norm(&g) * grid.norm(&q.mode)) * grid.step();
            assert!(cos > 0.999, "cosine similarity {cos}");
        }
    }
}

#[test]
fn unitarity_report_on_reference_grid() {
    let geom = common::g0_t20();
    let grid = make_grid(512, 3.0).unwrap();
    let report = check_unitarity(&grid, &geom).unwrap();
    assert_eq!(report.mask_sum, 0.0);
    assert_eq!(report.mask_cross, 0.0);
    assert!(report.norm_conservation < 1e-14);
    assert!(report.kernel_probe < 0.05);
}
