use std::f64::consts::PI;

use liouville_core::degree::{ProblemInstance, SurfaceSpec};
use liouville_core::matrix::InteractionMatrix;
use liouville_core::spectrum::SingularitySet;
use liouville_core::torus::{
    build_weights, functional_j, periodic_weight, residual, solve_continuation, FieldSet, SmoothFactor, SolverOptions,
    TorusGrid, TrigMode, WeightSpec,
};
use proptest::prelude::*;

fn mode_field(grid: &TorusGrid, k: [i64; 2], phase: f64) -> Vec<f64> {
    grid.nodes()
        .map(|x| (2.0 * PI * (k[0] as f64 * x[0] + k[1] as f64 * x[1]) + phase).cos())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_of_a_mode(half in 2usize..=16, k1 in -16i64..=16, k2 in -16i64..=16, phase in 0.0..6.3f64) {
        let m = 2 * half;
        let k = [k1.clamp(-(half as i64) + 1, half as i64 - 1), k2.clamp(-(half as i64) + 1, half as i64 - 1)];
        let grid = TorusGrid::new(m).unwrap();
        let u = mode_field(&grid, k, phase);
        let lap = grid.spectral().laplacian(&u);
        let factor = -4.0 * PI * PI * (k[0] * k[0] + k[1] * k[1]) as f64;
        let scale = 1.0 + factor.abs();
        for (l, v) in lap.iter().zip(&u) {
            prop_assert!((l - factor * v).abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn weight_vanishes_quadratically_at_source() {
    for h in [1e-2, 1e-3, 1e-4] {
        for dir in [[1.0, 0.0], [0.6, 0.8], [-0.28, 0.96]] {
            let z = [h * dir[0], h * dir[1]];
            let ratio = periodic_weight(z) / (h * h);
            assert!((ratio - 1.0).abs() <= 4.0 * h * h, "h = {h}: ratio {ratio}");
        }
    }
}

#[test]
fn residual_at_zero_matches_direct_formula() {
    let grid = TorusGrid::new(16).unwrap();
    let a = InteractionMatrix::new(&[vec![0.0, 2.0], vec![2.0, 1.0]]).unwrap();
    let s = SingularitySet::with_positions(vec![1.0], vec![[0.25, 0.5]]).unwrap();
    let p = ProblemInstance::new(SurfaceSpec::torus(), s.clone(), a.clone(), vec![1.5, 0.5]).unwrap();
    let f = SmoothFactor { base: 2.0, modes: vec![TrigMode { amplitude: 0.5, k: [0, 1], phase: 0.3 }] };
    let w = WeightSpec { smooth_factors: vec![f.clone(), SmoothFactor::constant(1.0)], singularities: s };
    let h = build_weights(&w, 2, &grid).unwrap();
    let r = residual(&FieldSet::zeros(2, &grid), &p, &h, &grid).unwrap();
    let direct_h = |j: usize, x: [f64; 2]| {
        let g = if j == 0 { f.eval(x) } else { 1.0 };
        g * periodic_weight([x[0] - 0.25, x[1] - 0.5])
    };
    let means: Vec<f64> = (0..2).map(|j| grid.nodes().map(|x| direct_h(j, x)).sum::<f64>() / grid.len() as f64).collect();
    for (idx, x) in grid.nodes().enumerate() {
        for i in 0..2 {
            let expected: f64 = (0..2).map(|j| a.get(i, j) * p.rho[j] * (direct_h(j, x) / means[j] - 1.0)).sum();
            assert!((r.values[i][idx] - expected).abs() <= 1e-12, "{} vs {expected}", r.values[i][idx]);
        }
    }
    for v in &r.values {
        assert!(grid.mean(v).abs() <= 1e-10);
    }
}

#[test]
fn functional_of_a_single_mode() {
    let grid = TorusGrid::new(32).unwrap();
    let p = ProblemInstance::new(SurfaceSpec::torus(), SingularitySet::empty(), InteractionMatrix::new(&[vec![1.0]]).unwrap(), vec![3.0]).unwrap();
    let h = build_weights(&WeightSpec::uniform(SingularitySet::empty()), 1, &grid).unwrap();
    let eps = 0.3;
    let u = FieldSet { resolution: 32, values: vec![mode_field(&grid, [1, 0], 0.0).into_iter().map(|v| eps * v).collect()] };
    let log_mass = (grid.nodes().map(|x| (eps * (2.0 * PI * x[0]).cos()).exp()).sum::<f64>() / grid.len() as f64).ln();
    let expected = 0.5 * 4.0 * PI * PI * eps * eps / 2.0 - 3.0 * log_mass;
    let got = functional_j(&u, &p, &h, &grid).unwrap();
    assert!((got - expected).abs() <= 1e-12, "{got} vs {expected}");
}

fn singular_instance(rho: f64, at: [f64; 2], factor: SmoothFactor) -> (ProblemInstance, WeightSpec) {
    let s = SingularitySet::with_positions(vec![1.0], vec![at]).unwrap();
    let a = InteractionMatrix::new(&[vec![1.0]]).unwrap();
    let p = ProblemInstance::new(SurfaceSpec::torus(), s.clone(), a, vec![rho]).unwrap();
    (p, WeightSpec { smooth_factors: vec![factor], singularities: s })
}

#[test]
fn translating_the_data_translates_the_solution() {
    let m = 32;
    let grid = TorusGrid::new(m).unwrap();
    let f = SmoothFactor { base: 1.0, modes: vec![TrigMode { amplitude: 0.2, k: [1, 2], phase: 0.4 }] };
    let at = [0.5, 0.25];
    let (p, w) = singular_instance(5.0, at, f.clone());
    let base = solve_continuation(&p, &w, &grid, &SolverOptions::default()).unwrap().u;
    let (sa, sb) = (5usize, 11usize);
    let shift = [sa as f64 / m as f64, sb as f64 / m as f64];
    let moved = [(at[0] + shift[0]).rem_euclid(1.0), (at[1] + shift[1]).rem_euclid(1.0)];
    let (pt, wt) = singular_instance(5.0, moved, f.translated(shift));
    let shifted = solve_continuation(&pt, &wt, &grid, &SolverOptions::default()).unwrap().u;
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let v = base.values[0][a * m + b];
            let t = shifted.values[0][((a + sa) % m) * m + (b + sb) % m];
            worst = worst.max((v - t).abs());
        }
    }
    assert!(worst <= 1e-10, "translation defect {worst:e}");
}

#[test]
fn converges_on_approach_to_first_level() {
    let grid = TorusGrid::new(32).unwrap();
    let f = SmoothFactor { base: 1.0, modes: vec![TrigMode { amplitude: 0.3, k: [1, 0], phase: 0.0 }] };
    let mut sizes = Vec::new();
    for frac in [0.5, 0.7, 0.9] {
        let (p, w) = singular_instance(8.0 * PI * frac, [0.5, 0.5], f.clone());
        let out = solve_continuation(&p, &w, &grid, &SolverOptions::default())
            .unwrap_or_else(|e| panic!("q = {frac}: {e}"));
        assert!(out.final_residual <= 1e-8);
        sizes.push(out.u.max_abs());
    }
    assert!(sizes.windows(2).all(|s| s[1] > s[0]), "max|u| along the family: {sizes:?}");
}

#[test]
fn small_data_response_is_nearly_linear() {
    let grid = TorusGrid::new(32).unwrap();
    let a = InteractionMatrix::new(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let g = SmoothFactor { base: 1.0, modes: vec![TrigMode { amplitude: 0.1, k: [1, 0], phase: 0.0 }] };
    let w = WeightSpec { smooth_factors: vec![g.clone(), g], singularities: SingularitySet::empty() };
    let solve = |rho: f64| {
        let p = ProblemInstance::new(SurfaceSpec::torus(), SingularitySet::empty(), a.clone(), vec![rho, rho]).unwrap();
        solve_continuation(&p, &w, &grid, &SolverOptions::default()).unwrap().u.max_abs()
    };
    let (full, half) = (solve(1.0), solve(0.5));
    assert!(full <= 1.0);
    let ratio = full / half;
    assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn finite_difference_residual_agrees_away_from_source() {
    let m = 64;
    let grid = TorusGrid::new(m).unwrap();
    let (p, w) = singular_instance(1.0, [0.5, 0.5], SmoothFactor::constant(1.0));
    let u = solve_continuation(&p, &w, &grid, &SolverOptions::default()).unwrap().u;
    let h = build_weights(&w, 1, &grid).unwrap();
    let v = &u.values[0];
    let mass = grid.mean(&v.iter().zip(&h[0]).map(|(x, hh)| hh * x.exp()).collect::<Vec<_>>());
    let dx = 1.0 / m as f64;
    let at = |a: usize, b: usize| v[(a % m) * m + b % m];
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let x = grid.node(a * m + b);
            if (x[0] - 0.5).abs() < 0.15 && (x[1] - 0.5).abs() < 0.15 {
                continue;
            }
            let lap = (at(a + 1, b) + at(a + m - 1, b) + at(a, b + 1) + at(a, b + m - 1) - 4.0 * at(a, b)) / (dx * dx);
            let r = lap + (h[0][a * m + b] * at(a, b).exp() / mass - 1.0);
            worst = worst.max(r.abs());
        }
    }
    assert!(worst <= 1e-3, "finite-difference residual {worst:e}");
}
