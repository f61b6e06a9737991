use pedge_core::minimize::*;
use std::f64::consts::PI;
use std::time::Instant;

fn main() {
    let sigma = 0.5;
    for tol in [1e-10] {
        println!("-- screw ladder, tolerance {tol:e}, restarts 1");
        for ratio in [8.0f64, 16.0, 32.0, 64.0] {
            let eps = sigma / ratio;
            let opts = SolverOptions {
                restarts: 1,
                max_sweeps: 200_000,
                tolerance: tol,
                ..Default::default()
            };
            let t = Instant::now();
            let r = gamma_screw(eps, sigma, [0.0, 0.0], &opts).unwrap();
            let rk = r.value - PI * ratio.ln();
            println!(
                "ratio {ratio:5}: E = {:.10}  r = {:.10}  sweeps = {} ({:?})",
                r.value,
                rk,
                r.report.sweeps,
                t.elapsed()
            );
        }
    }
}
