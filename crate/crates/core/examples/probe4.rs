use pedge_core::continuum::{FdSpec, SingularityConfig};
use pedge_core::lattice::Domain;
use pedge_core::minimize::*;
use std::f64::consts::PI;
use std::time::Instant;

fn main() {
    let sigma = 0.5;
    let x0 = [0.5f64.sqrt() * 0.01, 0.3f64.sqrt() * 0.01];
    println!("-- pedge ladder at off-lattice center, restarts 2, sweep caps");
    for (ratio, cap) in [(16.0f64, 4000), (32.0, 4000), (64.0, 3000)] {
        let eps = sigma / ratio;
        let opts = SolverOptions {
            restarts: 2,
            max_sweeps: cap,
            ..Default::default()
        };
        let t = Instant::now();
        let r = gamma_pedge(eps, sigma, x0, 1.0, &opts).unwrap();
        println!(
            "ratio {ratio:5}: E = {:.8}  4E - pilog = {:.8}  disp = {:.2e} sweeps {} conv {} ({:?})",
            r.value,
            4.0 * r.value - PI * ratio.ln(),
            r.report.restart_dispersion,
            r.report.sweeps,
            r.report.converged,
            t.elapsed()
        );
    }
    println!("-- screw at same center for rowwise comparison");
    for ratio in [16.0f64, 32.0, 64.0] {
        let eps = sigma / ratio;
        let opts = SolverOptions { restarts: 2, max_sweeps: 20_000, ..Default::default() };
        let r = gamma_screw(eps, sigma, x0, &opts).unwrap();
        println!("ratio {ratio:5}: r_screw = {:.8}", r.value - PI * ratio.ln());
    }

    println!("-- m_sigma ladder (delta_0, B_1, sigma = 0.25)");
    let omega = Domain::disc([0.0, 0.0], 1.0);
    let cfg = SingularityConfig::new(vec![([0.0, 0.0], 1)], &omega).unwrap();
    for (k, cap) in [(64.0f64, 800), (128.0, 500)] {
        let eps = 1.0 / k;
        let t = Instant::now();
        let o = SolverOptions { restarts: 1, max_sweeps: cap, ..Default::default() };
        let (v, rep) =
            m_sigma_discrete(&cfg, &omega, 0.25, eps, FdSpec::default(), &o).unwrap();
        println!(
            "eps=1/{k}: value = {:.6} (target {:.6}) sweeps {} residual {:.2e} ({:?})",
            v,
            PI * 4.0f64.ln(),
            rep.sweeps,
            rep.residual,
            t.elapsed()
        );
    }
}
