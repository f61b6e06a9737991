use pedge_core::continuum::AngleField;
use pedge_core::configurations::{vortex_lifting, Cut, LiftingSpec};
use pedge_core::fields::DisplacementField;
use pedge_core::lattice::{self, BoundaryLayer, Domain, LatticeGeometry, Site};
use pedge_core::minimize::*;
use std::collections::HashSet;
use std::f64::consts::PI;

fn site_centered(eps: f64, sigma: f64) -> f64 {
    let geom = LatticeGeometry::new(eps).unwrap();
    let center = [0.0, 0.0];
    let domain = Domain::disc(center, sigma);
    let lifting = vortex_lifting(&LiftingSpec { center, degree: 1, cut: Cut::RightRay });
    let all = lattice::sites(&domain, &geom, None);
    let ring = lattice::discrete_boundary(&domain, &geom, BoundaryLayer::Single);
    let ring_set: HashSet<Site> = ring.iter().copied().collect();
    let sample = |s: Site| {
        if s.i1 == 0 && s.i2 == 0 {
            0.25
        } else {
            lifting.angle(geom.position(s)) / (2.0 * PI)
        }
    };
    let fixed: Vec<(Site, f64)> = ring.iter().map(|&s| (s, sample(s))).collect();
    let free: Vec<Site> = all.iter().copied().filter(|s| !ring_set.contains(s)).collect();
    let initial = DisplacementField::from_sites(geom, &all, sample);
    let problem = MinimizationProblem {
        kind: EnergyKind::Screw,
        domain,
        geom,
        fixed,
        free,
        initial,
        options: SolverOptions { restarts: 1, max_sweeps: 200_000, ..Default::default() },
    };
    let (_, report) = solve(&problem).unwrap();
    report.final_energy
}

fn main() {
    let sigma = 0.5;
    println!("-- site-centered ladder");
    for ratio in [8.0f64, 16.0, 32.0, 64.0] {
        let eps = sigma / ratio;
        let e = site_centered(eps, sigma);
        println!("ratio {ratio:5}: E = {:.10}  r = {:.10}", e, e - PI * ratio.ln());
    }
    println!("-- fixed off-lattice center ladder");
    let x0 = [0.5f64.sqrt() * 0.01, 0.3f64.sqrt() * 0.01];
    for ratio in [8.0f64, 16.0, 32.0, 64.0] {
        let eps = sigma / ratio;
        let opts = SolverOptions { restarts: 1, max_sweeps: 200_000, ..Default::default() };
        let r = gamma_screw(eps, sigma, x0, &opts).unwrap();
        println!("ratio {ratio:5}: E = {:.10}  r = {:.10}", r.value, r.value - PI * ratio.ln());
    }
}
