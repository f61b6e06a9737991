use pedge_core::continuum::{FdSpec, SingularityConfig};
use pedge_core::lattice::Domain;
use pedge_core::minimize::*;
use std::f64::consts::PI;
use std::time::Instant;

fn main() {
    let sigma = 0.5;
    let opts = SolverOptions { restarts: 8, max_sweeps: 50_000, ..Default::default() };
    println!("-- screw ladder, sigma = {sigma}");
    let mut series = vec![];
    for ratio in [8.0, 16.0, 32.0] {
        let eps = sigma / ratio;
        let t = Instant::now();
        let r = gamma_screw(eps, sigma, [0.0, 0.0], &opts).unwrap();
        let rk = r.value - PI * ratio_ln(ratio);
        println!(
            "ratio {ratio:5}: E = {:.8}  r = {:.8}  disp = {:.2e}  sweeps = {} ({:?})",
            r.value, rk, r.report.restart_dispersion, r.report.sweeps, t.elapsed()
        );
        series.push((eps, sigma, r.value));
    }
    let est = extrapolate_gamma(&series, GammaMode::Screw).unwrap();
    println!("rs: {:?}\ndiffs: {:?}", est.renormalized, est.diffs);

    println!("-- pedge ladder, alpha = 1");
    let mut pseries = vec![];
    for ratio in [16.0, 32.0, 64.0] {
        let eps = sigma / ratio;
        let t = Instant::now();
        let r = gamma_pedge(eps, sigma, [0.0, 0.0], 1.0, &opts).unwrap();
        let rk = 4.0 * r.value - PI * ratio_ln(ratio);
        println!(
            "ratio {ratio:5}: E = {:.8}  4E-pi log = {:.8}  disp = {:.2e}  sweeps = {} ({:?})",
            r.value, rk, r.report.restart_dispersion, r.report.sweeps, t.elapsed()
        );
        pseries.push((eps, sigma, r.value));
    }
    // pedge vs screw at matched ratios 8,16,32
    println!("-- pedge at screw ratios");
    for ratio in [16.0, 32.0] {
        let eps = sigma / ratio;
        let s = gamma_screw(eps, sigma, [0.0, 0.0], &opts).unwrap();
        let p = gamma_pedge(eps, sigma, [0.0, 0.0], 1.0, &opts).unwrap();
        println!(
            "ratio {ratio}: 4*pedge - pilog = {:.6}, screw - pilog = {:.6}",
            4.0 * p.value - PI * ratio_ln(ratio),
            s.value - PI * ratio_ln(ratio)
        );
    }

    println!("-- m_sigma ladder (delta_0, B_1, sigma=0.25)");
    let omega = Domain::disc([0.0, 0.0], 1.0);
    let cfg = SingularityConfig::new(vec![([0.0, 0.0], 1)], &omega).unwrap();
    for k in [64.0, 128.0] {
        let eps = 1.0 / k;
        let t = Instant::now();
        let o = SolverOptions { restarts: 1, max_sweeps: 500, ..Default::default() };
        let (v, rep) = m_sigma_discrete(&cfg, &omega, 0.25, eps, FdSpec::default(), &o).unwrap();
        println!(
            "eps=1/{k}: value = {:.6} (target {:.6}), sweeps {} residual {:.2e} ({:?})",
            v, PI * 4.0f64.ln(), rep.sweeps, rep.residual, t.elapsed()
        );
    }
}

fn ratio_ln(r: f64) -> f64 { r.ln() }
