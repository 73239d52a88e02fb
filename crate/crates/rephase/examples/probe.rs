use rephase::atlas;

fn main() {
    let t0 = std::time::Instant::now();
    let dl_axis: Vec<f64> = (1..=100).map(|i| 0.5 * i as f64).collect();
    let eta_axis: Vec<f64> = (0..=60).map(|j| 0.30 + 0.01 * j as f64).collect();
    let grid = atlas::generate_fuel_atlas(&dl_axis, &eta_axis, 0.1, 42).unwrap();
    println!("desk atlas: {} cells, convergence {:.4}, [{:?}]", grid.cells.len(), grid.convergence_rate(), t0.elapsed());
    let mut monotone_cols = 0;
    for i in 0..dl_axis.len() {
        let ok = (1..eta_axis.len()).all(|j| {
            let a = grid.cell(i, j - 1);
            let b = grid.cell(i, j);
            !a.converged || !b.converged || b.j_norm <= a.j_norm + 1e-7
        });
        if ok { monotone_cols += 1; }
    }
    println!("monotone columns: {monotone_cols}/{}", dl_axis.len());

    // mutation column at dL = 21, eps = 0.01
    let t0 = std::time::Instant::now();
    let eta_axis: Vec<f64> = (0..=15).map(|j| 0.32 + 0.01 * j as f64).collect();
    let grid = atlas::generate_fuel_atlas(&[20.5, 21.0, 21.5], &eta_axis, 0.01, 42).unwrap();
    println!("mutation grid convergence {:.3} [{:?}]", grid.convergence_rate(), t0.elapsed());
    for (j, &eta) in eta_axis.iter().enumerate() {
        let c = grid.cell(1, j);
        println!("eta={eta:.2}: l1={:+.4} arcs={} conv={} J={:.5}", c.l1, c.n_arcs, c.converged, c.j_norm);
    }
}
