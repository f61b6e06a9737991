//! Experiment drivers: scaling ladders, renormalization studies and the
//! cross-module property suite. Ladder points fan out across workers and
//! are assembled in ladder order, so outputs are deterministic for a given
//! config and seed.

use crate::config::{
    general_position_center, Experiment, FieldSpec, GammaModeConfig, StudyConfig,
};
use crate::report::{fmt_f64, CsvTable};
use pedge_core::configurations::{
    discrete_vortex, half_vortex_even_odd, recovery_configuration, Cut, HalfVortexVariant,
    LiftingSpec,
};
use pedge_core::continuum::{renormalized_energy, FdSpec, SingularityConfig};
use pedge_core::energies::{energy_pedge, verify_comparisons, PotentialParams};
use pedge_core::fields::DisplacementField;
use pedge_core::lattice::{Domain, LatticeGeometry};
use pedge_core::minimize::{gamma_pedge, gamma_screw, SolverOptions};
use pedge_core::stacking::line_tension;
use pedge_core::vorticity::{
    dipole_free_representative, flat_distance, plaquette_circulation, vorticity_measure,
    ScanLattice,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

pub struct StudyError(pub String);

impl<E: std::fmt::Display> From<E> for StudyError {
    fn from(e: E) -> Self {
        StudyError(e.to_string())
    }
}

type StudyResult<T> = Result<T, StudyError>;

fn solver_options(cfg: &StudyConfig) -> SolverOptions {
    SolverOptions {
        tolerance: cfg.solver.tolerance,
        max_sweeps: cfg.solver.max_sweeps,
        restarts: cfg.solver.restarts,
        seed: cfg.seed,
    }
}

/// Core-energy scaling ladder: one row per `(mode, ratio)` with the
/// renormalized value `r = energy - pi log(sigma/eps)` (screw) or
/// `4 energy - pi log(sigma/eps)` (partial edge).
pub fn run_gamma_study(cfg: &StudyConfig, hash: &str) -> StudyResult<String> {
    let sigma = cfg.sigma.ok_or(StudyError("gamma study needs `sigma`".into()))?;
    if cfg.ratios.len() < 2 {
        return Err(StudyError("gamma study needs a `ratios` ladder".into()));
    }
    let x0 = cfg.x0.unwrap_or_else(general_position_center);
    let opts = solver_options(cfg);
    let mode = cfg.mode.unwrap_or(GammaModeConfig::Both);
    let mut jobs: Vec<(&str, f64)> = Vec::new();
    if matches!(mode, GammaModeConfig::Screw | GammaModeConfig::Both) {
        for &r in &cfg.ratios {
            jobs.push(("screw", r));
        }
    }
    if matches!(mode, GammaModeConfig::Pedge | GammaModeConfig::Both) {
        for &r in &cfg.ratios {
            jobs.push(("pedge", r));
        }
    }
    let alpha = cfg.alpha;
    let rows: Vec<StudyResult<Vec<String>>> = jobs
        .par_iter()
        .map(|(kind, ratio)| {
            let eps = sigma / ratio;
            let (value, dispersion) = match *kind {
                "screw" => {
                    let r = gamma_screw(eps, sigma, x0, &opts).map_err(StudyError::from)?;
                    (r.value, r.report.restart_dispersion)
                }
                _ => {
                    let r = gamma_pedge(eps, sigma, x0, alpha, &opts)
                        .map_err(StudyError::from)?;
                    (r.value, r.report.restart_dispersion)
                }
            };
            let renorm = match *kind {
                "screw" => value - PI * (sigma / eps).ln(),
                _ => 4.0 * value - PI * (sigma / eps).ln(),
            };
            Ok(vec![
                kind.to_string(),
                fmt_f64(eps),
                fmt_f64(sigma),
                fmt_f64(value),
                fmt_f64(renorm),
                fmt_f64(dispersion),
            ])
        })
        .collect();
    let mut table = CsvTable::new(
        hash,
        &["mode", "epsilon", "sigma", "energy", "renormalized", "dispersion"],
    );
    for row in rows {
        table.push_row(&row?);
    }
    Ok(table.finish())
}

/// Renormalization study: the recovery configuration's energy against the
/// continuum limit pieces (renormalized energy and line tension).
pub fn run_renormalization_study(cfg: &StudyConfig, hash: &str) -> StudyResult<String> {
    let sigma = cfg.sigma.ok_or(StudyError("renorm study needs `sigma`".into()))?;
    if cfg.epsilons.is_empty() {
        return Err(StudyError("renorm study needs an `epsilons` ladder".into()));
    }
    let config = SingularityConfig::new(
        cfg.mu.iter().map(|c| ([c.x, c.y], c.charge as i8)).collect(),
        &cfg.domain,
    )
    .map_err(StudyError::from)?;
    let m = config.len() as f64;
    let w = renormalized_energy(&config, &cfg.domain, FdSpec::default())
        .map_err(StudyError::from)?
        .w;
    let (l, fault) = line_tension(&config, &cfg.domain).map_err(StudyError::from)?;
    let opts = solver_options(cfg);
    let alpha = cfg.alpha;
    let rows: Vec<StudyResult<Vec<String>>> = cfg
        .epsilons
        .par_iter()
        .map(|&eps| {
            let geom = LatticeGeometry::new(eps).map_err(StudyError::from)?;
            let u = recovery_configuration(
                &cfg.domain,
                &geom,
                &config,
                &fault,
                sigma,
                alpha,
                &opts,
            )
            .map_err(StudyError::from)?;
            let f = energy_pedge(&u, &cfg.domain, &PotentialParams::new(alpha))
                .map_err(StudyError::from)?
                .total;
            let gap = f - m / 4.0 * PI * eps.ln().abs();
            Ok(vec![
                fmt_f64(eps),
                fmt_f64(alpha),
                fmt_f64(f),
                fmt_f64(gap),
                fmt_f64(w),
                fmt_f64(l),
            ])
        })
        .collect();
    let mut table = CsvTable::new(
        hash,
        &["epsilon", "alpha", "f_pedge", "gap", "renormalized_w", "line_tension"],
    );
    for row in rows {
        table.push_row(&row?);
    }
    Ok(table.finish())
}

/// Deliberate defect injected into the property suite to confirm the suite
/// catches broken invariants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    None,
    /// Flip the sign of the screw summand inside the chain inequality.
    FlipF1Sign,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub results: Vec<PropertyResult>,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

/// Machine-readable pass/fail per cross-module invariant, with a
/// counterexample dump on failure.
pub fn run_property_suite(seed: u64, sizes: &[usize], mutation: Mutation) -> PropertyReport {
    let mut results = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &n in sizes {
        let eps = 1.0 / n as f64;
        let geom = LatticeGeometry::new(eps).unwrap();
        let domain = Domain::rect([0.0, 0.0], [1.0, 1.0]);
        let params = PotentialParams::new(1.0);
        for trial in 0..8 {
            let u = DisplacementField::over_bounding_box(geom, &domain, |_| {
                rng.gen::<f64>() * 4.0 - 2.0
            });

            // Chain and identity checks (optionally mutated).
            let rep = verify_comparisons(&u, &domain, &params).unwrap();
            let chain_holds = match mutation {
                Mutation::None => rep.chain_ok,
                Mutation::FlipF1Sign => {
                    // With the screw term negated the chain must break for
                    // any field with vertical energy.
                    let neg_screw = -rep.f_screw_doubled;
                    !(rep.f_edge_doubled >= neg_screw && neg_screw >= rep.f_xy_squared)
                        && rep.f_xy_squared > 0.0
                        || rep.f_xy_squared == 0.0
                }
            };
            let name = match mutation {
                Mutation::None => format!("chain-and-identity/n{n}/t{trial}"),
                Mutation::FlipF1Sign => format!("chain-mutation-detected/n{n}/t{trial}"),
            };
            let ok = match mutation {
                Mutation::None => rep.identity_ok && chain_holds && rep.sublattice_ok,
                Mutation::FlipF1Sign => chain_holds,
            };
            results.push(PropertyResult {
                name,
                passed: ok,
                counterexample: if ok { None } else { Some(format!("{rep:?}")) },
            });

            // Vorticity quantization.
            let mut quantized = true;
            for cell in pedge_core::lattice::cells(&domain, &geom) {
                let w = plaquette_circulation(&u, cell).unwrap();
                if !(-1..=1).contains(&w) {
                    quantized = false;
                }
            }
            results.push(PropertyResult {
                name: format!("vorticity-quantization/n{n}/t{trial}"),
                passed: quantized,
                counterexample: None,
            });

            // Dipole-free representative: equal screw energies, equal
            // vorticity, edge equals screw on the representative.
            let tilde = dipole_free_representative(&u, &domain);
            let s0 = pedge_core::energies::energy_screw(&u, &domain).unwrap();
            let s1 = pedge_core::energies::energy_screw(&tilde, &domain).unwrap();
            let e1 = pedge_core::energies::energy_edge(&tilde, &domain).unwrap();
            let mu0 = vorticity_measure(&u, &domain, ScanLattice::Base).unwrap();
            let mu1 = vorticity_measure(&tilde, &domain, ScanLattice::Base).unwrap();
            let ok = (s0 - s1).abs() < 1e-9 && (s1 - e1).abs() < 1e-9 && mu0 == mu1;
            results.push(PropertyResult {
                name: format!("dipole-free-representative/n{n}/t{trial}"),
                passed: ok,
                counterexample: if ok {
                    None
                } else {
                    Some(format!("screw {s0} vs {s1}, edge {e1}"))
                },
            });
        }
    }
    PropertyReport { seed, sizes: sizes.to_vec(), results }
}

/// CSV dump of a generated field: `i1,i2,value`, one row per site.
pub fn dump_field(cfg: &StudyConfig, hash: &str) -> StudyResult<String> {
    let eps = cfg.epsilon.ok_or(StudyError("dump-field needs `epsilon`".into()))?;
    let geom = LatticeGeometry::new(eps).map_err(StudyError::from)?;
    let spec = cfg
        .field
        .as_ref()
        .ok_or(StudyError("dump-field needs a `field` generator".into()))?;
    let field = match spec {
        FieldSpec::Vortex { center, degree } => {
            discrete_vortex(
                &cfg.domain,
                &geom,
                &LiftingSpec { center: *center, degree: *degree, cut: Cut::RightRay },
            )
            .0
        }
        FieldSpec::HalfVortex { center, opposite_cuts } => {
            let variant = if *opposite_cuts {
                HalfVortexVariant::OppositeCuts
            } else {
                HalfVortexVariant::SameCut
            };
            half_vortex_even_odd(&cfg.domain, &geom, *center, variant).0
        }
        FieldSpec::Recovery { sigma } => {
            let config = SingularityConfig::new(
                cfg.mu.iter().map(|c| ([c.x, c.y], c.charge as i8)).collect(),
                &cfg.domain,
            )
            .map_err(StudyError::from)?;
            let (_, fault) = line_tension(&config, &cfg.domain).map_err(StudyError::from)?;
            recovery_configuration(
                &cfg.domain,
                &geom,
                &config,
                &fault,
                *sigma,
                cfg.alpha,
                &solver_options(cfg),
            )
            .map_err(StudyError::from)?
        }
    };
    let mut table = CsvTable::new(hash, &["i1", "i2", "value"]);
    for (s, v) in field.grid.iter() {
        table.push_row(&[s.i1.to_string(), s.i2.to_string(), fmt_f64(v)]);
    }
    Ok(table.finish())
}

/// Flat distance between the `mu` and `nu` measures of the config (JSON).
pub fn flat_distance_cmd(cfg: &StudyConfig) -> StudyResult<String> {
    let mu = crate::config::measure_from(&cfg.mu);
    let nu = crate::config::measure_from(&cfg.nu);
    let d = flat_distance(&mu, &nu, &cfg.domain);
    Ok(serde_json::to_string_pretty(&serde_json::json!({
        "flat_distance": d,
        "mu": mu,
        "nu": nu,
    }))? + "\n")
}

/// Line tension and the optimal fault of the config's measure (JSON).
pub fn line_tension_cmd(cfg: &StudyConfig) -> StudyResult<String> {
    let config = SingularityConfig::new(
        cfg.mu.iter().map(|c| ([c.x, c.y], c.charge as i8)).collect(),
        &cfg.domain,
    )
    .map_err(StudyError::from)?;
    let (l, fault) = line_tension(&config, &cfg.domain).map_err(StudyError::from)?;
    Ok(serde_json::to_string_pretty(&serde_json::json!({
        "line_tension": l,
        "fault": fault,
    }))? + "\n")
}

/// Dispatch a parsed config.
pub fn run(cfg: &StudyConfig, hash: &str) -> StudyResult<(String, i32)> {
    match cfg.experiment {
        Experiment::Gamma => Ok((run_gamma_study(cfg, hash)?, 0)),
        Experiment::Renorm => Ok((run_renormalization_study(cfg, hash)?, 0)),
        Experiment::LineTension => Ok((line_tension_cmd(cfg)?, 0)),
        Experiment::DumpField => Ok((dump_field(cfg, hash)?, 0)),
        Experiment::FlatDistance => Ok((flat_distance_cmd(cfg)?, 0)),
        Experiment::Verify => {
            let sizes = if cfg.sizes.is_empty() { vec![16] } else { cfg.sizes.clone() };
            let report = run_property_suite(cfg.seed, &sizes, Mutation::None);
            let code = if report.all_passed() { 0 } else { 2 };
            Ok((serde_json::to_string_pretty(&report)? + "\n", code))
        }
    }
}
