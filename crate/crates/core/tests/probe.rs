// temporary diagnostic; removed before release
use linesource::harness::{run_threshold_scan, ExperimentConfig};

#[test]
#[ignore]
fn probe_aniso_cells() {
    // the 12 criterion-7 cells: gamma cells at mu* + 0.25 fixed is replaced by
    // the spec harness example's fixed safe values (gamma = 0.5 for mu cells)
    let run = |beta: [usize; 2], gamma: f64, mu: f64| {
        let mut cfg = ExperimentConfig::default();
        cfg.density.kind = "one-plus-sine".into();
        cfg.ladder.rho0 = 0.25 / 8.0;
        cfg.ladder.steps = 6;
        cfg.grids.beta = vec![beta];
        cfg.grids.gamma = vec![gamma];
        cfg.grids.mu = vec![mu];
        cfg.grids.anisotropic = true;
        let rep = run_threshold_scan(&cfg).unwrap();
        let c = &rep.cells[0];
        println!(
            "beta=({},{}) gamma={gamma} mu={mu}: slope={:?} verdict={} predicted={} pts={:?}",
            beta[0], beta[1], c.slope, c.verdict, c.predicted,
            c.points.iter().map(|p| (p.1 * 1e4).round() / 1e4).collect::<Vec<_>>()
        );
    };
    // mu cells at gamma = 0.5 fixed
    for (beta, mu) in [([0usize, 1usize], 0.75), ([0, 1], 0.25), ([1, 0], -0.25), ([1, 0], -0.75), ([1, 1], 0.75), ([1, 1], 0.25)] {
        run(beta, 0.5, mu);
    }
    // gamma cells at mu = k_s - 1/2 + 0.25 fixed
    for (beta, gamma) in [([0usize, 1usize], -0.75), ([0, 1], -1.25), ([1, 0], 0.25), ([1, 0], -0.25), ([1, 1], 0.25), ([1, 1], -0.25)] {
        let mu = beta[1] as f64 - 0.5 + 0.25;
        run(beta, gamma, mu);
    }
}
