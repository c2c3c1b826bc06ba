use invscat::builtins::{gaussian, two_bump};
use invscat::fields::{ClassParams, ComplexField, Grid, ScalarField};
use invscat::forward::{
    add_noise, boundary_count, boundary_points, born_oracle, far_field_pattern, near_field_trace, ForwardSolver, PlaneWave,
    ScatteringDataset, SolverConfig,
};
use num_complex::Complex64;

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn tight() -> SolverConfig {
    SolverConfig { krylov_tol: 1e-11, ..SolverConfig::default() }
}

#[test]
fn zero_potential_returns_incident_wave() {
    for (dim, n) in [(2usize, 32usize), (3, 16)] {
        let grid = Grid::new(dim, 1.0, n).unwrap();
        let class = ClassParams::new(1.0, 1.0, 0.8).unwrap();
        let v = ScalarField::zeros(grid, class).unwrap();
        let mut d = vec![0.0; dim];
        d[dim - 1] = 1.0;
        let wave = PlaneWave::new(3.0, d.clone()).unwrap();
        let solver = ForwardSolver::new(&v, None, 3.0, &SolverConfig::default()).unwrap();
        let u = solver.solve(&wave).unwrap();
        let inc = wave.sample(&grid);
        let diff: Vec<Complex64> = u.field.values.iter().zip(&inc).map(|(a, b)| a - b).collect();
        assert!(l2(&diff) <= 1e-12 * l2(&inc));
        let thetas = vec![d.clone()];
        assert!(solver.far_field(&u.field, &thetas).unwrap().iter().all(|a| a.norm() == 0.0));
        let m = boundary_count(3.0, 0.8);
        let rec = near_field_trace(&solver, &u.field, &d, boundary_points(dim, 0.8, m), 0.8).unwrap();
        assert!(rec.dirichlet.iter().chain(&rec.neumann).all(|x| x.norm() == 0.0));
    }
}

#[test]
fn born_remainder_is_quadratic() {
    let grid = Grid::new(2, 1.0, 48).unwrap();
    let class = ClassParams::new(1.0, 1.0, 0.6).unwrap();
    let wave = PlaneWave::new(6.0, vec![0.6, 0.8]).unwrap();
    let remainder = |a: f64| {
        let v = gaussian(grid, class, a, 0.2).unwrap();
        let solver = ForwardSolver::new(&v, None, 6.0, &tight()).unwrap();
        let u = solver.solve(&wave).unwrap();
        let born = solver.born_field(&wave);
        let diff: Vec<Complex64> = u.field.values.iter().zip(&born).map(|(x, y)| x - y).collect();
        l2(&diff)
    };
    let ratio = remainder(0.05) / remainder(0.025);
    assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn reciprocity() {
    for (dim, n) in [(2usize, 40usize), (3, 20)] {
        let grid = Grid::new(dim, 1.0, n).unwrap();
        let class = ClassParams::new(1.0, 1.0, 0.7).unwrap();
        let v = two_bump(grid, class, 2.0).unwrap();
        let kappa = 4.0;
        let solver = ForwardSolver::new(&v, None, kappa, &tight()).unwrap();
        let (theta, d): (Vec<f64>, Vec<f64>) = if dim == 2 {
            (vec![0.8, 0.6], vec![0.0, -1.0])
        } else {
            (vec![0.48, 0.6, 0.64], vec![0.0, -0.6, 0.8])
        };
        let neg = |x: &[f64]| x.iter().map(|v| -v).collect::<Vec<f64>>();
        let a = solver.far_field(&solver.solve(&PlaneWave::new(kappa, d.clone()).unwrap()).unwrap().field, &[theta.clone()]).unwrap()[0];
        let b = solver.far_field(&solver.solve(&PlaneWave::new(kappa, neg(&theta)).unwrap()).unwrap().field, &[neg(&d)]).unwrap()[0];
        assert!((a - b).norm() <= 1e-8 * a.norm(), "{dim}D: {a} vs {b}");
    }
}

#[test]
fn weak_far_field_is_close_to_born() {
    let grid = Grid::new(3, 0.5, 24).unwrap();
    let class = ClassParams::new(1.0, 1.0, 0.45).unwrap();
    let v = gaussian(grid, class, 0.05, 0.12).unwrap();
    let kappa = 8.0;
    let solver = ForwardSolver::new(&v, None, kappa, &tight()).unwrap();
    let d = vec![0.0, 0.0, 1.0];
    let u = solver.solve(&PlaneWave::new(kappa, d.clone()).unwrap()).unwrap();
    let theta = vec![0.6, 0.0, 0.8];
    let rec = far_field_pattern(&solver, &u.field, &d, &[theta.clone()]).unwrap();
    let born = born_oracle(&v, kappa, &theta, &d);
    assert!((rec.pairs[0].value - born).norm() < 0.01 * born.norm());
}

#[test]
fn representation_matches_grid_field_outside_support() {
    let grid = Grid::new(2, 1.0, 48).unwrap();
    let class = ClassParams::new(1.0, 1.0, 0.5).unwrap();
    let v = gaussian(grid, class, 0.5, 0.15).unwrap();
    let kappa = 6.0;
    let solver = ForwardSolver::new(&v, None, kappa, &tight()).unwrap();
    let wave = PlaneWave::new(kappa, vec![1.0, 0.0]).unwrap();
    let u = solver.solve(&wave).unwrap();
    let inc = wave.sample(&grid);
    let outside: Vec<usize> = (0..grid.len()).filter(|&i| grid.radius(i) > 0.7 && grid.radius(i) < 0.9).collect();
    let pts: Vec<Vec<f64>> = outside.iter().map(|&i| grid.point(i)[..2].to_vec()).collect();
    let rep = solver.represent(&u.field, &pts).unwrap();
    let grid_us: Vec<Complex64> = outside.iter().map(|&i| u.field.values[i] - inc[i]).collect();
    let diff: Vec<Complex64> = rep.iter().zip(&grid_us).map(|(a, b)| a - b).collect();
    assert!(l2(&diff) <= 1e-5 * l2(&grid_us), "relative {}", l2(&diff) / l2(&grid_us));
}

#[test]
fn dense_oracle_on_a_tiny_grid() {
    let grid = Grid::new(2, 1.0, 12).unwrap();
    let class = ClassParams::new(1.0, 1.0, 0.6).unwrap();
    let v = gaussian(grid, class, 0.3, 0.25).unwrap();
    let kappa = 3.0;
    let solver = ForwardSolver::new(&v, None, kappa, &tight()).unwrap();
    let wave = PlaneWave::new(kappa, vec![0.6, 0.8]).unwrap();
    let u = solver.solve(&wave).unwrap();
    let table = solver.kernel_table();
    let m = solver.torus_points_per_axis();
    let n = grid.points_per_axis();
    // A x = x + Σ_j t[(k − j) mod M] V_j x_j, applied densely
    let apply = |x: &[Complex64]| -> Vec<Complex64> {
        (0..grid.len())
            .map(|k| {
                let [ka, kb, _] = grid.index(k);
                let mut acc = x[k];
                for j in 0..grid.len() {
                    let vj = v.values()[j];
                    if vj == 0.0 {
                        continue;
                    }
                    let [ja, jb, _] = grid.index(j);
                    let ta = (ka + m - ja) % m;
                    let tb = (kb + m - jb) % m;
                    acc += table[ta * m + tb] * vj * x[j];
                }
                acc
            })
            .collect()
    };
    let ax = apply(&u.field.values);
    let rhs = wave.sample(&grid);
    let res: Vec<Complex64> = ax.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    assert!(l2(&res) <= 1e-9 * l2(&rhs));
    assert_eq!(n * 2, m);
}

#[test]
fn datasets_round_trip_and_noise_is_seeded() {
    let grid = Grid::new(2, 1.0, 32).unwrap();
    let class = ClassParams::new(1.0, 1.0, 0.6).unwrap();
    let v = gaussian(grid, class, 0.3, 0.2).unwrap();
    let kappa = 5.0;
    let solver = ForwardSolver::new(&v, None, kappa, &SolverConfig::default()).unwrap();
    let d = vec![1.0, 0.0];
    let u = solver.solve(&PlaneWave::new(kappa, d.clone()).unwrap()).unwrap();
    let rec = near_field_trace(&solver, &u.field, &d, boundary_points(2, 0.8, 64), 0.8).unwrap();
    let ds = ScatteringDataset::NearField { dim: 2, radius: 0.8, records: vec![rec] };
    let mut buf = Vec::new();
    ds.write_csv(&mut buf).unwrap();
    assert_eq!(ScatteringDataset::read_csv(&buf[..]).unwrap(), ds);
    let a = add_noise(&ds, 0.01, 9).unwrap();
    assert_eq!(a, add_noise(&ds, 0.01, 9).unwrap());
    assert_ne!(a, add_noise(&ds, 0.01, 10).unwrap());
}

#[test]
fn field_type_is_shared_across_calls() {
    let grid = Grid::new(2, 1.0, 8).unwrap();
    let f = ComplexField::new(grid, vec![Complex64::new(1.0, 0.0); 64]).unwrap();
    assert!(ComplexField::new(grid, vec![Complex64::new(1.0, 0.0); 63]).is_err());
    assert_eq!(f.values.len(), grid.len());
}

#[test]
fn magnetic_representation_matches_grid_field() {
    use invscat::builtins::{curl_field, MagneticProfile};
    let grid = Grid::new(3, 0.8, 32).unwrap();
    let class = ClassParams::new(1.0, 1.0, 0.45).unwrap();
    let b = curl_field(grid, class, MagneticProfile::Gaussian(0.1), [0.0, 0.0, 1.0], 0.05).unwrap();
    let v = gaussian(grid, class, 0.05, 0.1).unwrap();
    let kappa = 6.0;
    let solver = ForwardSolver::new(&v, Some(&b), kappa, &tight()).unwrap();
    let wave = PlaneWave::new(kappa, vec![0.0, 0.6, 0.8]).unwrap();
    let u = solver.solve(&wave).unwrap();
    let inc = wave.sample(&grid);
    let outside: Vec<usize> = (0..grid.len()).filter(|&i| grid.radius(i) > 0.65 && grid.radius(i) < 0.75).collect();
    let pts: Vec<Vec<f64>> = outside.iter().map(|&i| grid.point(i).to_vec()).collect();
    let rep = solver.represent(&u.field, &pts).unwrap();
    let grid_us: Vec<Complex64> = outside.iter().map(|&i| u.field.values[i] - inc[i]).collect();
    let diff: Vec<Complex64> = rep.iter().zip(&grid_us).map(|(a, b)| a - b).collect();
    assert!(l2(&diff) <= 5e-4 * l2(&grid_us), "relative {}", l2(&diff) / l2(&grid_us));
}
