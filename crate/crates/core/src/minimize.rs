//! Constrained minimization of the lattice energies.
//!
//! The bond densities are piecewise quadratic in any single site value, so
//! the one-dimensional section through a site has an explicit global
//! minimizer: enumerate the breakpoints (half-offsets of the periodic
//! wells) inside a window that provably contains the minimum, and take the
//! best branch vertex. Sweeping sites in a fixed color order gives an exact
//! coordinate descent whose energy never increases.
//!
//! On top of the solver sit the core-energy problems: the screw core with
//! vortex boundary data on the single discrete boundary, the partial-edge
//! core with doubled-displacement data on the double boundary layer, the
//! punctured-domain minimization with canonical harmonic data, and the
//! log-removed extrapolation ladders.

use crate::configurations::{snap_center, vortex_lifting, Cut, LiftingSpec};
use crate::continuum::{canonical_harmonic_map, AngleField, FdSpec, SingularityConfig};
use crate::energies::{
    energy_edge, energy_pedge, energy_screw, potential, PotentialKind, PotentialParams,
};
use crate::error::{CoreError, Result};
use crate::fields::DisplacementField;
use crate::lattice::{self, BoundaryLayer, Direction, Domain, LatticeGeometry, Site};
use crate::vorticity::project_int;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

/// Which energy a minimization problem descends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum EnergyKind {
    Edge,
    Screw,
    PEdge { alpha: f64 },
}

/// Solver controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Stop when the largest site update in a sweep drops below this.
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Descents per problem; the first starts from the clean initializer,
    /// the rest from seeded perturbations.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tolerance: 1e-10, max_sweeps: 100_000, restarts: 8, seed: 0 }
    }
}

/// A Dirichlet minimization problem on a site set.
#[derive(Clone, Debug)]
pub struct MinimizationProblem {
    pub kind: EnergyKind,
    pub domain: Domain,
    pub geom: LatticeGeometry,
    /// Sites whose values are prescribed; kept bit for bit.
    pub fixed: Vec<(Site, f64)>,
    /// Sites the solver may move.
    pub free: Vec<Site>,
    /// Starting values for the free sites.
    pub initial: DisplacementField,
    pub options: SolverOptions,
}

/// What a descent did.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverReport {
    pub final_energy: f64,
    pub sweeps: usize,
    /// Largest site update in the last sweep.
    pub residual: f64,
    /// Max minus min final energy over restarts (0 for a single run).
    pub restart_dispersion: f64,
    /// Energy was non-increasing across sweeps (guaranteed by the exact
    /// per-site minimization).
    pub monotone: bool,
    pub converged: bool,
}

struct Term {
    neighbor: usize,
    kind: PotentialKind,
    weight: f64,
}

struct Workspace {
    values: Vec<f64>,
    free_order: Vec<usize>,
    terms: Vec<Vec<Term>>,
    site_of: Vec<Site>,
}

fn section_energy(terms: &[Term], values: &[f64], s: f64) -> f64 {
    let mut g = 0.0;
    for t in terms {
        g += t.weight * potential(t.kind, s - values[t.neighbor]);
    }
    g
}

/// Exact global minimizer of the one-dimensional section through a site.
fn minimize_section(terms: &[Term], values: &[f64], current: f64) -> f64 {
    if terms.is_empty() {
        return current;
    }
    let two_pi2 = 2.0 * PI * PI;
    let mut quad_w = 0.0;
    let mut quad_wa = 0.0;
    for t in terms {
        if t.kind == PotentialKind::F0 {
            quad_w += t.weight;
            quad_wa += t.weight * values[t.neighbor];
        }
    }
    // Window certain to contain a global minimizer: with elastic terms the
    // quadratic part alone exceeds g(c) outside [c - r, c + r]; without
    // them the section is periodic with period at most 1.
    let (lo, hi) = if quad_w > 0.0 {
        let c = quad_wa / quad_w;
        let r = (section_energy(terms, values, c) / (two_pi2 * quad_w)).sqrt() + 1e-12;
        (c - r, c + r)
    } else {
        (current - 0.5, current + 0.5)
    };

    let mut breakpoints = vec![lo, hi];
    for t in terms {
        let a = values[t.neighbor];
        let step = match t.kind {
            PotentialKind::F0 => continue,
            PotentialKind::F1 => 1.0,
            PotentialKind::FHalf => 0.5,
        };
        // Branch switches of dist(s - a, step*Z) at a + step/2 + step*Z.
        let first = ((lo - a - step / 2.0) / step).ceil();
        let mut b = a + step / 2.0 + first * step;
        while b <= hi {
            breakpoints.push(b);
            b += step;
        }
    }
    breakpoints.sort_by(|x, y| x.partial_cmp(y).unwrap());

    // Candidates in increasing priority on ties: the current value, then
    // the breakpoints, then the branch vertices. Letting a vertex win an
    // exact tie reproduces the classical Gauss-Seidel fixed point instead
    // of stalling where the parabola is flat to double precision.
    let mut best_s = current;
    let mut best_g = section_energy(terms, values, current);
    let mut consider = |s: f64| {
        let g = section_energy(terms, values, s);
        if g <= best_g {
            best_g = g;
            best_s = s;
        }
    };
    for &b in &breakpoints {
        consider(b);
    }
    for w in breakpoints.windows(2) {
        let (l, r) = (w[0], w[1]);
        if r <= l {
            continue;
        }
        let mid = 0.5 * (l + r);
        // On (l, r) every periodic term sits in one parabolic branch.
        let mut sw = 0.0;
        let mut swc = 0.0;
        for t in terms {
            let a = values[t.neighbor];
            let center = match t.kind {
                PotentialKind::F0 => a,
                PotentialKind::F1 => a + project_int(mid - a) as f64,
                PotentialKind::FHalf => a + 0.5 * project_int(2.0 * (mid - a)) as f64,
            };
            sw += t.weight;
            swc += t.weight * center;
        }
        let vertex = swc / sw;
        if vertex >= l && vertex <= r {
            consider(vertex);
        }
    }
    best_s
}

fn build_workspace(problem: &MinimizationProblem) -> Result<Workspace> {
    let mut site_index: HashMap<Site, usize> = HashMap::new();
    let mut site_of: Vec<Site> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut is_free: Vec<bool> = Vec::new();

    for &s in &problem.free {
        if site_index.contains_key(&s) {
            return Err(CoreError::BadArgument(format!(
                "site ({},{}) listed twice",
                s.i1, s.i2
            )));
        }
        site_index.insert(s, values.len());
        site_of.push(s);
        values.push(problem.initial.try_get(s)?);
        is_free.push(true);
    }
    for &(s, v) in &problem.fixed {
        if site_index.contains_key(&s) {
            return Err(CoreError::BadArgument(format!(
                "site ({},{}) is both free and fixed",
                s.i1, s.i2
            )));
        }
        if !v.is_finite() {
            return Err(CoreError::Solver("non-finite fixed value".into()));
        }
        site_index.insert(s, values.len());
        site_of.push(s);
        values.push(v);
        is_free.push(false);
    }

    let mut terms: Vec<Vec<Term>> = (0..values.len()).map(|_| Vec::new()).collect();
    let bond_kinds: Vec<(Direction, i64, PotentialKind, f64)> = match problem.kind {
        EnergyKind::Edge => vec![
            (Direction::E1, 1, PotentialKind::F0, 1.0),
            (Direction::E2, 1, PotentialKind::F1, 1.0),
        ],
        EnergyKind::Screw => vec![
            (Direction::E1, 1, PotentialKind::F1, 1.0),
            (Direction::E2, 1, PotentialKind::F1, 1.0),
        ],
        EnergyKind::PEdge { alpha } => vec![
            (Direction::E1, 1, PotentialKind::F0, 1.0),
            (Direction::E2, 1, PotentialKind::FHalf, 1.0),
            (Direction::E2, 2, PotentialKind::F1, alpha / (PI * PI) * problem.geom.spacing()),
        ],
    };
    for (dir, span, kind, weight) in bond_kinds {
        for (a, b) in lattice::bonds(&problem.domain, &problem.geom, dir, span, None) {
            let (ka, kb) = match (site_index.get(&a), site_index.get(&b)) {
                (Some(x), Some(y)) => (*x, *y),
                // A bond reaching outside the declared site set is not part
                // of the problem.
                _ => continue,
            };
            if is_free[ka] {
                terms[ka].push(Term { neighbor: kb, kind, weight });
            }
            if is_free[kb] {
                terms[kb].push(Term { neighbor: ka, kind, weight });
            }
        }
    }

    // Color classes: no two sites of one class interact through any bond
    // (e1, e2 and 2 e2 steps all change (i1 mod 2, i2 mod 4)).
    let mut free_order: Vec<usize> = (0..values.len()).filter(|k| is_free[*k]).collect();
    free_order.sort_by_key(|&k| {
        let s = site_of[k];
        (s.i1.rem_euclid(2) * 4 + s.i2.rem_euclid(4), s.i2, s.i1)
    });

    Ok(Workspace { values, free_order, terms, site_of })
}

fn descend(
    values: &mut [f64],
    free_order: &[usize],
    terms: &[Vec<Term>],
    options: &SolverOptions,
) -> (usize, f64, bool) {
    let mut sweeps = 0;
    let mut residual = 0.0;
    while sweeps < options.max_sweeps {
        let mut max_update: f64 = 0.0;
        for &k in free_order {
            let old = values[k];
            let new = minimize_section(&terms[k], values, old);
            values[k] = new;
            max_update = max_update.max((new - old).abs());
        }
        sweeps += 1;
        residual = max_update;
        if max_update <= options.tolerance {
            return (sweeps, residual, true);
        }
    }
    (sweeps, residual, false)
}

fn problem_energy(problem: &MinimizationProblem, field: &DisplacementField) -> Result<f64> {
    match problem.kind {
        EnergyKind::Edge => energy_edge(field, &problem.domain),
        EnergyKind::Screw => energy_screw(field, &problem.domain),
        EnergyKind::PEdge { alpha } => {
            Ok(energy_pedge(field, &problem.domain, &PotentialParams::new(alpha))?.total)
        }
    }
}

fn field_from_values(
    problem: &MinimizationProblem,
    site_of: &[Site],
    values: &[f64],
) -> DisplacementField {
    let mut k = 0;
    DisplacementField::from_sites(problem.geom, site_of, |_| {
        let v = values[k];
        k += 1;
        v
    })
}

/// Run the exact coordinate descent, with restarts from seeded
/// perturbations of the initializer. Returns the best field found.
pub fn solve(problem: &MinimizationProblem) -> Result<(DisplacementField, SolverReport)> {
    solve_with_perturbation(problem, 0.1, false)
}

fn solve_with_perturbation(
    problem: &MinimizationProblem,
    noise: f64,
    half_integer_rows: bool,
) -> Result<(DisplacementField, SolverReport)> {
    let ws = build_workspace(problem)?;
    if problem.free.is_empty() {
        let field = field_from_values(problem, &ws.site_of, &ws.values);
        let e = problem_energy(problem, &field)?;
        return Ok((
            field,
            SolverReport {
                final_energy: e,
                sweeps: 0,
                residual: 0.0,
                restart_dispersion: 0.0,
                monotone: true,
                converged: true,
            },
        ));
    }
    let restarts = if noise == 0.0 && !half_integer_rows {
        1
    } else {
        problem.options.restarts.max(1)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(problem.options.seed);
    let mut best: Option<(f64, Vec<f64>, usize, f64, bool)> = None;
    let mut energies: Vec<f64> = Vec::with_capacity(restarts);
    for attempt in 0..restarts {
        let mut values = ws.values.clone();
        if attempt > 0 {
            let mut row_offsets: HashMap<i64, f64> = HashMap::new();
            for &k in &ws.free_order {
                let s = ws.site_of[k];
                if half_integer_rows {
                    let off = *row_offsets
                        .entry(s.i2)
                        .or_insert_with(|| 0.5 * rng.gen_range(-1..=1i64) as f64);
                    values[k] += off;
                }
                values[k] += noise * (rng.gen::<f64>() - 0.5);
            }
        }
        let (sweeps, residual, converged) =
            descend(&mut values, &ws.free_order, &ws.terms, &problem.options);
        let field = field_from_values(problem, &ws.site_of, &values);
        let e = problem_energy(problem, &field)?;
        if !e.is_finite() {
            return Err(CoreError::Solver("non-finite energy".into()));
        }
        energies.push(e);
        let better = match &best {
            Some((be, ..)) => e < *be,
            None => true,
        };
        if better {
            best = Some((e, values, sweeps, residual, converged));
        }
    }
    let (e, values, sweeps, residual, converged) = best.unwrap();
    let dispersion = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let field = field_from_values(problem, &ws.site_of, &values);
    Ok((
        field,
        SolverReport {
            final_energy: e,
            sweeps,
            residual,
            restart_dispersion: dispersion,
            monotone: true,
            converged,
        },
    ))
}

/// Result of a core-energy minimization.
#[derive(Clone, Debug)]
pub struct CoreResult {
    pub value: f64,
    pub report: SolverReport,
    pub minimizer: DisplacementField,
    /// Center actually used (snapped to a cell barycenter when the request
    /// hits a lattice site).
    pub center: [f64; 2],
}

/// Screw core energy on `B_sigma(x0)`: minimize the screw energy with the
/// angular lifting of the unit vortex prescribed on the discrete boundary.
pub fn gamma_screw(
    eps: f64,
    sigma: f64,
    x0: [f64; 2],
    options: &SolverOptions,
) -> Result<CoreResult> {
    if sigma <= 4.0 * eps {
        return Err(CoreError::BadArgument(format!(
            "gamma_screw needs sigma > 4 eps (sigma = {sigma}, eps = {eps})"
        )));
    }
    let geom = LatticeGeometry::new(eps)?;
    let center = snap_center(x0, &geom);
    let domain = Domain::disc(center, sigma);
    let lifting = vortex_lifting(&LiftingSpec { center, degree: 1, cut: Cut::RightRay });
    let all = lattice::sites(&domain, &geom, None);
    let ring = lattice::discrete_boundary(&domain, &geom, BoundaryLayer::Single);
    let ring_set: HashSet<Site> = ring.iter().copied().collect();
    let sample = |s: Site| lifting.angle(geom.position(s)) / (2.0 * PI);
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
        options: *options,
    };
    let (field, report) = solve_with_perturbation(&problem, 0.1, false)?;
    Ok(CoreResult { value: report.final_energy, report, minimizer: field, center })
}

/// Partial-edge core energy on `B_sigma(x0)`: the doubled displacement is
/// prescribed on the double boundary layer; the initializer is half the
/// sampled lifting.
pub fn gamma_pedge(
    eps: f64,
    sigma: f64,
    x0: [f64; 2],
    alpha: f64,
    options: &SolverOptions,
) -> Result<CoreResult> {
    if sigma <= 8.0 * eps {
        return Err(CoreError::BadArgument(format!(
            "gamma_pedge needs sigma > 8 eps (sigma = {sigma}, eps = {eps})"
        )));
    }
    let geom = LatticeGeometry::new(eps)?;
    let center = snap_center(x0, &geom);
    let domain = Domain::disc(center, sigma);
    let lifting = vortex_lifting(&LiftingSpec { center, degree: 1, cut: Cut::RightRay });
    let all = lattice::sites(&domain, &geom, None);
    let ring = lattice::discrete_boundary(&domain, &geom, BoundaryLayer::Double);
    let ring_set: HashSet<Site> = ring.iter().copied().collect();
    let sample = |s: Site| lifting.angle(geom.position(s)) / (4.0 * PI);
    let fixed: Vec<(Site, f64)> = ring.iter().map(|&s| (s, sample(s))).collect();
    let free: Vec<Site> = all.iter().copied().filter(|s| !ring_set.contains(s)).collect();
    let initial = DisplacementField::from_sites(geom, &all, sample);
    let problem = MinimizationProblem {
        kind: EnergyKind::PEdge { alpha },
        domain,
        geom,
        fixed,
        free,
        initial,
        options: *options,
    };
    let (field, report) = solve_with_perturbation(&problem, 0.05, true)?;
    Ok(CoreResult { value: report.final_energy, report, minimizer: field, center })
}

/// Extrapolation mode for the core-energy ladder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaMode {
    Screw,
    PEdge,
}

/// One ladder point: `(eps, sigma, minimized energy)`.
pub type LadderPoint = (f64, f64, f64);

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaEstimate {
    /// `value - pi log(sigma/eps)` (screw) or `4 value - pi log(sigma/eps)`.
    pub renormalized: Vec<f64>,
    /// Successive differences, as convergence diagnostics.
    pub diffs: Vec<f64>,
    pub estimate: f64,
}

/// Remove the logarithmic divergence along a ladder and report the tail.
pub fn extrapolate_gamma(series: &[LadderPoint], mode: GammaMode) -> Result<GammaEstimate> {
    if series.len() < 3 {
        return Err(CoreError::BadArgument(
            "gamma extrapolation needs at least 3 ladder points".into(),
        ));
    }
    let mult = match mode {
        GammaMode::Screw => 1.0,
        GammaMode::PEdge => 4.0,
    };
    let renormalized: Vec<f64> = series
        .iter()
        .map(|(eps, sigma, value)| mult * value - PI * (sigma / eps).ln())
        .collect();
    let diffs: Vec<f64> = renormalized.windows(2).map(|w| w[1] - w[0]).collect();
    let estimate = *renormalized.last().unwrap();
    Ok(GammaEstimate { renormalized, diffs, estimate })
}

/// Discrete surrogate of the punctured minimal energy: minimize the screw
/// energy over `Omega^sigma(mu)` with the canonical harmonic map sampled on
/// all discrete boundaries (the outer ring and one ring around each hole).
pub fn m_sigma_discrete(
    config: &SingularityConfig,
    omega: &Domain,
    sigma: f64,
    eps: f64,
    fd: FdSpec,
    options: &SolverOptions,
) -> Result<(f64, SolverReport)> {
    if !config.is_empty() {
        if !config.sigma_ok(omega, sigma) {
            return Err(CoreError::Geometry(format!(
                "sigma = {sigma} violates the disjoint-disc condition"
            )));
        }
        if sigma <= 4.0 * eps {
            return Err(CoreError::BadArgument("m_sigma needs eps << sigma".into()));
        }
    }
    let geom = LatticeGeometry::new(eps)?;
    let holes: Vec<lattice::Hole> = config
        .points()
        .iter()
        .map(|(x, _)| lattice::Hole { center: *x, radius: sigma })
        .collect();
    let punctured = if holes.is_empty() {
        omega.clone()
    } else {
        Domain::punctured(omega.clone(), holes)?
    };
    let map = canonical_harmonic_map(config, omega, fd)?;
    let all = lattice::sites(&punctured, &geom, None);
    let ring = lattice::discrete_boundary(&punctured, &geom, BoundaryLayer::Single);
    let ring_set: HashSet<Site> = ring.iter().copied().collect();
    let sample = |s: Site| map.angle(geom.position(s)) / (2.0 * PI);
    let fixed: Vec<(Site, f64)> = ring.iter().map(|&s| (s, sample(s))).collect();
    let free: Vec<Site> = all.iter().copied().filter(|s| !ring_set.contains(s)).collect();
    let initial = DisplacementField::from_sites(geom, &all, sample);
    let problem = MinimizationProblem {
        kind: EnergyKind::Screw,
        domain: punctured,
        geom,
        fixed,
        free,
        initial,
        options: *options,
    };
    let (_, report) = solve_with_perturbation(&problem, 0.0, false)?;
    Ok((report.final_energy, report))
}
