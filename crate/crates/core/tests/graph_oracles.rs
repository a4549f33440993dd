use maxcons::graph::generators;
use maxcons::Graph;
use nalgebra::DMatrix;

fn eigen_radius(g: &Graph) -> f64 {
    let n = g.n_nodes();
    let a = g.adjacency_matrix();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j] as f64);
    m.symmetric_eigen().eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

#[test]
fn spectral_radius_matches_dense_eigensolver() {
    let mut graphs = vec![
        generators::complete(7).unwrap(),
        generators::path(9).unwrap(),
        generators::cycle(10).unwrap(),
        generators::star(6).unwrap(),
        generators::random_geometric(75, 1, Some(30.56)).unwrap(),
    ];
    for s in 0..20 {
        graphs.push(generators::gnp_connected(5 + s as usize, 0.3, s).unwrap());
    }
    for g in &graphs {
        let want = eigen_radius(g);
        let got = g.spectral_radius().unwrap();
        assert!((got - want).abs() <= 1e-8 * want.max(1.0), "N={}: {got} vs {want}", g.n_nodes());
    }
}

#[test]
fn closed_form_radii() {
    assert!((generators::complete(6).unwrap().spectral_radius().unwrap() - 5.0).abs() < 1e-9);
    assert!((generators::cycle(8).unwrap().spectral_radius().unwrap() - 2.0).abs() < 1e-9);
    assert!((generators::star(9).unwrap().spectral_radius().unwrap() - 3.0).abs() < 1e-9);
    let n = 7.0f64;
    let path = 2.0 * (std::f64::consts::PI / (n + 1.0)).cos();
    assert!((generators::path(7).unwrap().spectral_radius().unwrap() - path).abs() < 1e-9);
}

#[test]
fn benchmark_geometric_graph() {
    let g = generators::random_geometric(75, 1, Some(30.56)).unwrap();
    assert!(g.is_connected());
    assert!((g.spectral_radius().unwrap() - 30.56).abs() < 0.5);
}

#[test]
fn edge_list_round_trip() {
    let g = generators::gnp_connected(12, 0.4, 3).unwrap();
    let back = maxcons::graph::parse_edge_list(&maxcons::graph::to_edge_list(&g), false).unwrap();
    assert_eq!(back.edges(), g.edges());
}
