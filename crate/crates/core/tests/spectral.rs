use nalgebra::SymmetricEigen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparse_ldp::entry_laws::{Gaussian, Rademacher};
use sparse_ldp::experiments::{plant_clique, plant_vertex, sphere_vector, CliqueWeight, PlantSpec};
use sparse_ldp::matrix_lab::{
    count_eigs_above, localization_profile, parse_snapshot, read_snapshot, resolvent_quadratic,
    sample_adjacency_centered, sample_wigner, shifted_solve, shifted_solve_many, snapshot_csv, write_snapshot,
    DenseSolver, EigenSolver, LanczosSolver, SymMatrix,
};

fn gaussian_sample(n: usize, p: f64, seed: u64) -> SymMatrix {
    sample_wigner(n, p, &Gaussian, &Gaussian, seed).unwrap().matrix
}

fn assert_solvers_agree(a: &SymMatrix, k: usize) {
    let dense = DenseSolver.top(a, k).unwrap();
    let lanczos = LanczosSolver::default().top(a, k).unwrap();
    for i in 0..k {
        assert!(
            (dense.values[i] - lanczos.values[i]).abs() < 1e-8,
            "pair {i}: {} vs {}",
            dense.values[i],
            lanczos.values[i]
        );
        assert!(lanczos.residuals[i] < 1e-6, "residual {}", lanczos.residuals[i]);
    }
    let overlap: f64 = dense.vectors[0].iter().zip(&lanczos.vectors[0]).map(|(a, b)| a * b).sum();
    assert!(overlap.abs() > 1.0 - 1e-8, "top vectors overlap {overlap}");
}

#[test]
fn lanczos_matches_dense_on_unplanted_samples() {
    assert_solvers_agree(&gaussian_sample(512, 0.1, 11), 4);
    assert_solvers_agree(&sample_adjacency_centered(512, 0.1, 12).unwrap().matrix, 4);
}

#[test]
fn lanczos_matches_dense_with_a_separated_outlier() {
    let mut a = gaussian_sample(512, 0.1, 13);
    let k = 12;
    plant_clique(&mut a, k, CliqueWeight::FiniteK.weight(k, 3.0).unwrap()).unwrap();
    assert_solvers_agree(&a, 4);

    let mut b = gaussian_sample(512, 0.1, 14);
    let PlantSpec::Vertex { r, s, .. } = PlantSpec::vertex_from_r(0.0, 3.0).unwrap() else {
        unreachable!()
    };
    plant_vertex(&mut b, r, s).unwrap();
    assert_solvers_agree(&b, 4);
}

#[test]
fn count_above_matches_full_spectrum() {
    let a = gaussian_sample(300, 0.2, 15);
    let eig = SymmetricEigen::new(a.to_dense());
    for threshold in [-2.5, -1.0, 0.0, 1.3, 1.9, 2.5] {
        let want = eig.eigenvalues.iter().filter(|&&v| v >= threshold).count();
        assert_eq!(count_eigs_above(&a, threshold).unwrap(), want, "threshold {threshold}");
    }
}

#[test]
fn resolvent_matches_eigen_expansion() {
    let a = gaussian_sample(300, 0.2, 16);
    let eig = SymmetricEigen::new(a.to_dense());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = sphere_vector(300, &mut rng);
    for lambda in [2.6, 3.0, 5.0] {
        let expansion: f64 = (0..300)
            .map(|i| {
                let c: f64 = eig.eigenvectors.column(i).iter().zip(&u).map(|(v, x)| v * x).sum();
                c * c / (lambda - eig.eigenvalues[i])
            })
            .sum();
        let cg = resolvent_quadratic(&a, lambda, &u).unwrap();
        assert!((cg - expansion).abs() < 1e-9, "lambda {lambda}: {cg} vs {expansion}");
    }
}

#[test]
fn batched_solves_match_single_solves() {
    let a = sample_adjacency_centered(400, 0.1, 17).unwrap().matrix;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let us: Vec<Vec<f64>> = (0..7).map(|_| sphere_vector(400, &mut rng)).collect();
    let many = shifted_solve_many(&a, 3.0, &us).unwrap();
    for (u, x) in us.iter().zip(&many) {
        let single = shifted_solve(&a, 3.0, u).unwrap();
        let diff = single.iter().zip(x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-9, "{diff}");
    }
    assert!(shifted_solve_many(&a, 3.0, &[]).unwrap().is_empty());
}

#[test]
fn top_vector_profile_is_consistent() {
    let mut a = gaussian_sample(400, 0.1, 18);
    plant_vertex(&mut a, 0.0, 7.854101966249685).unwrap();
    let top = DenseSolver.top(&a, 1).unwrap();
    let profile = localization_profile(&top.vectors[0], &[0.0, 0.3, 0.99]).unwrap();
    assert_eq!(profile[0].count, 400);
    assert!((profile[0].mass - 1.0).abs() < 1e-10);
    assert!(profile[1].mass <= profile[0].mass && profile[2].mass <= profile[1].mass);
    assert!(profile[1].count >= 1, "a heavy vertex localizes the top vector");
    assert!((profile[1].norm - profile[1].mass.sqrt()).abs() < 1e-15);
}

#[test]
fn samples_are_reproducible_and_thread_invariant() {
    let a = sample_wigner(600, 0.05, &Rademacher, &Gaussian, 99).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| sample_wigner(600, 0.05, &Rademacher, &Gaussian, 99).unwrap());
    assert_eq!(a, b);
    let c = sample_wigner(600, 0.05, &Rademacher, &Gaussian, 100).unwrap();
    assert_ne!(a.matrix, c.matrix);
}

#[test]
fn sample_density_matches_p() {
    let (n, p) = (2000, 0.02);
    let a = sample_wigner(n, p, &Gaussian, &Gaussian, 3).unwrap().matrix;
    let expected = p * (n * (n + 1) / 2) as f64;
    let sd = (expected * (1.0 - p)).sqrt();
    let nnz = a.upper_nnz() as f64;
    assert!((nnz - expected).abs() < 5.0 * sd, "nnz {nnz}, expected {expected}");
    assert!(a.is_symmetric());

    let adj = sample_adjacency_centered(n, p, 3).unwrap().matrix;
    let off = p * (n * (n - 1) / 2) as f64;
    assert!((adj.upper_nnz() as f64 - off).abs() < 5.0 * (off * (1.0 - p)).sqrt());
    let scale = 1.0 / (n as f64 * p).sqrt();
    assert!((adj.get(5, 5) + p * scale).abs() < 1e-15);
}

#[test]
fn snapshot_round_trip() {
    let sample = sample_adjacency_centered(150, 0.2, 21).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap.csv");
    write_snapshot(&sample, &path).unwrap();
    let back = read_snapshot(&path).unwrap();
    assert_eq!((back.n, back.p, back.seed), (150, 0.2, 21));
    assert_eq!(back.matrix, sample.matrix);
    assert_eq!(parse_snapshot(&snapshot_csv(&sample)).unwrap(), back);
    assert!(parse_snapshot("not a snapshot").is_err());
    assert!(read_snapshot(&dir.path().join("missing.csv")).is_err());
}
